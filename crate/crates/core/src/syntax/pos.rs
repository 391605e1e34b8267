use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{ParseTree, SyntaxError};
use crate::text::{normalize, Token};

/// Coarse part-of-speech tag set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CoarseTag {
    Noun,
    Verb,
    Num,
    Adj,
    Adv,
    Pron,
    Det,
    Adp,
    Conj,
    Prt,
    Punct,
    X,
}

impl CoarseTag {
    pub const ALL: [CoarseTag; 12] = [
        CoarseTag::Noun,
        CoarseTag::Verb,
        CoarseTag::Num,
        CoarseTag::Adj,
        CoarseTag::Adv,
        CoarseTag::Pron,
        CoarseTag::Det,
        CoarseTag::Adp,
        CoarseTag::Conj,
        CoarseTag::Prt,
        CoarseTag::Punct,
        CoarseTag::X,
    ];

    /// Tags that carry semantic content.
    pub fn is_content(self) -> bool {
        matches!(
            self,
            CoarseTag::Noun | CoarseTag::Verb | CoarseTag::Num | CoarseTag::Adj | CoarseTag::Adv
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CoarseTag::Noun => "NOUN",
            CoarseTag::Verb => "VERB",
            CoarseTag::Num => "NUM",
            CoarseTag::Adj => "ADJ",
            CoarseTag::Adv => "ADV",
            CoarseTag::Pron => "PRON",
            CoarseTag::Det => "DET",
            CoarseTag::Adp => "ADP",
            CoarseTag::Conj => "CONJ",
            CoarseTag::Prt => "PRT",
            CoarseTag::Punct => "PUNCT",
            CoarseTag::X => "X",
        }
    }

    /// Maps a Penn Treebank POS label to the coarse set.
    pub fn from_penn(label: &str) -> CoarseTag {
        let label = super::tree::base_label(label);
        match label {
            "NN" | "NNS" | "NNP" | "NNPS" | "NP" => CoarseTag::Noun,
            "MD" => CoarseTag::Verb,
            "CD" => CoarseTag::Num,
            "PRP" | "PRP$" | "WP" | "WP$" => CoarseTag::Pron,
            "DT" | "PDT" | "WDT" | "EX" => CoarseTag::Det,
            "IN" => CoarseTag::Adp,
            "CC" => CoarseTag::Conj,
            "RP" | "TO" | "POS" => CoarseTag::Prt,
            "." | "," | ":" | "``" | "''" | "-LRB-" | "-RRB-" | "#" | "$" | "HYPH" | "NFP" => {
                CoarseTag::Punct
            }
            l if l.starts_with("VB") => CoarseTag::Verb,
            l if l.starts_with("JJ") => CoarseTag::Adj,
            l if l.starts_with("RB") || l == "WRB" => CoarseTag::Adv,
            _ => CoarseTag::X,
        }
    }
}

impl fmt::Display for CoarseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CoarseTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CoarseTag::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown coarse tag {s:?}"))
    }
}

/// One coarse tag per word token, keyed by the token's index.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PosTagging {
    pub tags: Vec<(usize, CoarseTag)>,
}

impl PosTagging {
    pub fn from_tags(tags: impl IntoIterator<Item = CoarseTag>) -> Self {
        PosTagging {
            tags: tags.into_iter().enumerate().collect(),
        }
    }

    pub fn tag_sequence(&self) -> Vec<CoarseTag> {
        self.tags.iter().map(|&(_, t)| t).collect()
    }

    pub fn count_content_words(&self) -> usize {
        self.tags.iter().filter(|(_, t)| t.is_content()).count()
    }
}

/// Tags the word tokens of `tokens`. With trees, Penn preterminal labels are
/// mapped to the coarse set; without, the rule-based tagger is used.
pub fn pos_tag(tokens: &[Token], trees: Option<&[ParseTree]>) -> Result<PosTagging, SyntaxError> {
    match trees {
        Some(trees) => tag_from_trees(tokens, trees),
        None => Ok(tag_heuristic(tokens)),
    }
}

/// Aligns tree leaves to word tokens. Punctuation leaves and `-NONE-` empty
/// elements are skipped; consecutive leaves may together form one token
/// (`do` + `n't` = `don't`), in which case the first leaf's tag is used.
fn tag_from_trees(tokens: &[Token], trees: &[ParseTree]) -> Result<PosTagging, SyntaxError> {
    let leaves: Vec<(String, &str)> = trees
        .iter()
        .flat_map(|t| t.preterminals())
        .filter(|(label, _)| *label != "-NONE-")
        .map(|(label, leaf)| (normalize(leaf), label))
        .filter(|(norm, _)| !norm.is_empty())
        .collect();

    let mismatch = || SyntaxError::LeafMismatch {
        leaves: leaves.iter().map(|(n, _)| n.clone()).collect(),
        tokens: tokens
            .iter()
            .filter(|t| t.is_word)
            .map(|t| t.norm.clone())
            .collect(),
    };

    let mut tags = Vec::new();
    let mut next = 0;
    for (idx, tok) in tokens.iter().enumerate().filter(|(_, t)| t.is_word) {
        let (_, first_label) = leaves.get(next).ok_or_else(mismatch)?;
        let mut joined = String::new();
        while joined.len() < tok.norm.len() {
            let (norm, _) = leaves.get(next).ok_or_else(mismatch)?;
            joined.push_str(norm);
            next += 1;
        }
        if joined != tok.norm {
            return Err(mismatch());
        }
        tags.push((idx, CoarseTag::from_penn(first_label)));
    }
    if next != leaves.len() {
        return Err(mismatch());
    }
    Ok(PosTagging { tags })
}

const DETERMINERS: &[&str] = &[
    "the", "a", "an", "this", "that", "these", "those", "each", "every", "either", "neither",
    "some", "any", "no", "all", "both", "another", "such", "what", "whatever", "which",
    "whichever", "half", "enough", "several", "many", "few", "much", "more", "most", "less",
    "least", "other", "own",
];

const PRONOUNS: &[&str] = &[
    "i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself", "yourselves", "he",
    "him", "his", "himself", "she", "her", "hers", "herself", "it", "its", "itself", "we", "us",
    "our", "ours", "ourselves", "they", "them", "their", "theirs", "themselves", "who", "whom",
    "whose", "whoever", "someone", "somebody", "something", "anyone", "anybody", "anything",
    "everyone", "everybody", "everything", "nobody", "nothing", "none", "oneself", "thee", "thou",
    "thy", "ye", "im", "ive", "youre", "hes", "shes", "theyre", "weve", "theyve", "youve",
    "youll", "theyll", "itll", "youd", "theyd",
];

const POSSESSIVES: &[&str] = &["my", "your", "his", "her", "its", "our", "their", "whose", "thy"];

const ADPOSITIONS: &[&str] = &[
    "of", "in", "on", "at", "by", "for", "with", "about", "against", "between", "into", "through",
    "during", "before", "after", "above", "below", "from", "up", "down", "over", "under",
    "across", "along", "among", "around", "behind", "beside", "besides", "beyond", "despite",
    "except", "inside", "near", "off", "onto", "outside", "past", "since", "than", "toward",
    "towards", "upon", "within", "without", "via", "per", "like", "unlike", "throughout", "until",
    "till", "amid", "beneath", "underneath", "concerning", "regarding", "as", "out",
];

const CONJUNCTIONS: &[&str] = &[
    "and", "or", "but", "nor", "yet", "because", "although", "though", "while", "whereas", "if",
    "unless", "whether", "whilst", "so",
];

const PARTICLES: &[&str] = &["to", "s"];

const AUXILIARIES: &[&str] = &[
    "is", "are", "was", "were", "be", "been", "being", "am", "have", "has", "had", "having", "do",
    "does", "did", "done", "doing", "will", "would", "shall", "should", "can", "could", "may",
    "might", "must", "isnt", "arent", "wasnt", "werent", "dont", "doesnt", "didnt", "wont",
    "wouldnt", "cant", "cannot", "couldnt", "shouldnt", "hasnt", "havent", "hadnt", "mustnt",
    "ought", "lets", "thats", "theres", "heres", "whats",
];

const ADVERBS: &[&str] = &[
    "not", "very", "too", "also", "just", "only", "even", "still", "already", "always", "never",
    "often", "sometimes", "usually", "here", "there", "now", "then", "today", "tomorrow",
    "yesterday", "soon", "again", "ever", "quite", "rather", "almost", "perhaps", "maybe",
    "however", "therefore", "thus", "instead", "else", "away", "back", "well", "once", "twice",
    "later", "ago", "together", "yet", "far", "where", "when", "why", "how", "indeed", "anyway",
    "somewhat", "nearly", "hardly", "seldom", "forever", "abroad", "ahead", "alone", "aloud",
    "everywhere", "somewhere", "nowhere", "anywhere", "otherwise", "meanwhile", "tonight",
    "downstairs", "upstairs", "outdoors", "indoors", "fast", "hard", "late", "early",
];

const NUMBER_WORDS: &[&str] = &[
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
    "hundred", "thousand", "million", "billion", "dozen",
];

const ADJECTIVES: &[&str] = &[
    "good", "bad", "big", "small", "large", "little", "long", "short", "old", "new", "young",
    "great", "high", "low", "hot", "cold", "warm", "cool", "happy", "sad", "nice", "best",
    "better", "worse", "worst", "fine", "free", "full", "empty", "true", "false", "real", "right",
    "wrong", "easy", "difficult", "hard", "simple", "strong", "weak", "dark", "light", "bright",
    "red", "blue", "green", "yellow", "black", "white", "brown", "gray", "grey", "pink", "orange",
    "purple", "clean", "dirty", "rich", "poor", "quick", "slow", "tall", "wide", "deep", "thin",
    "thick", "heavy", "soft", "loud", "quiet", "sweet", "kind", "brave", "wise", "clever",
    "pretty", "ugly", "fat", "sick", "well", "busy", "ready", "sure", "able", "certain", "clear",
    "close", "common", "dead", "dear", "dry", "wet", "fair", "fresh", "main", "major", "whole",
    "same", "different", "important", "possible", "public", "late", "early", "last", "next",
    "first", "second", "third", "final", "general", "human", "local", "national", "natural",
    "social", "special", "political", "economic", "recent", "likely", "only", "own", "tiny",
    "huge", "lovely", "friendly", "lonely", "silly", "ugly", "angry", "hungry", "funny", "sunny",
];

const VERBS: &[&str] = &[
    "go", "went", "gone", "goes", "come", "came", "say", "said", "says", "get", "got", "gotten",
    "make", "made", "know", "knew", "known", "think", "thought", "take", "took", "taken", "see",
    "saw", "seen", "want", "give", "gave", "given", "look", "use", "find", "found", "tell",
    "told", "ask", "work", "seem", "feel", "felt", "try", "leave", "left", "call", "run", "ran",
    "keep", "kept", "let", "begin", "began", "begun", "help", "show", "shown", "hear", "heard",
    "play", "move", "live", "believe", "bring", "brought", "happen", "write", "wrote", "written",
    "sit", "sat", "stand", "stood", "lose", "lost", "pay", "paid", "meet", "met", "include",
    "continue", "set", "learn", "change", "lead", "led", "understand", "understood", "watch",
    "follow", "stop", "create", "speak", "spoke", "spoken", "read", "spend", "spent", "grow",
    "grew", "grown", "open", "walk", "win", "won", "teach", "taught", "offer", "remember",
    "love", "consider", "appear", "buy", "bought", "wait", "serve", "die", "send", "sent",
    "expect", "build", "built", "stay", "fall", "fell", "fallen", "cut", "reach", "kill",
    "remain", "suggest", "raise", "pass", "sell", "sold", "require", "report", "decide", "pull",
    "eat", "ate", "eaten", "chase", "jump", "sleep", "slept", "swim", "swam", "drink", "drank",
    "fly", "flew", "flown", "sing", "sang", "sung", "catch", "caught", "throw", "threw",
    "thrown", "bark", "hold", "held", "become", "became", "put", "mean", "meant", "break",
    "broke", "broken", "choose", "chose", "chosen", "drive", "drove", "driven", "ride", "rode",
    "draw", "drew", "drawn", "forget", "forgot", "hide", "hid", "hit", "hurt", "shut", "sing",
    "sink", "sank", "smile", "laugh", "cry", "shout", "climb", "carry", "wash", "cook", "dance",
    "listen", "answer", "arrive", "close", "enjoy", "hope", "hate", "need", "like", "wish",
    "agree", "allow", "explain", "describe", "return", "visit", "add", "fill", "finish",
    "improve", "prepare", "produce", "provide", "receive", "seek", "sought", "wear", "wore",
    "worn", "wake", "woke", "feed", "fed", "fight", "fought", "rise", "rose", "risen", "shake",
    "shook", "steal", "stole", "strike", "struck", "swing", "swung", "tear", "tore", "torn",
    "beat", "bite", "bit", "blow", "blew", "bend", "bent", "dig", "dug", "lay", "lie", "lied",
];

fn lexicon() -> &'static HashMap<&'static str, CoarseTag> {
    static LEXICON: OnceLock<HashMap<&'static str, CoarseTag>> = OnceLock::new();
    LEXICON.get_or_init(|| {
        // later lists take precedence
        let mut m = HashMap::new();
        let lists: [(&[&str], CoarseTag); 10] = [
            (VERBS, CoarseTag::Verb),
            (ADJECTIVES, CoarseTag::Adj),
            (ADVERBS, CoarseTag::Adv),
            (NUMBER_WORDS, CoarseTag::Num),
            (ADPOSITIONS, CoarseTag::Adp),
            (CONJUNCTIONS, CoarseTag::Conj),
            (AUXILIARIES, CoarseTag::Verb),
            (DETERMINERS, CoarseTag::Det),
            (PRONOUNS, CoarseTag::Pron),
            (PARTICLES, CoarseTag::Prt),
        ];
        for (words, tag) in lists {
            for w in words {
                m.insert(*w, tag);
            }
        }
        m
    })
}

fn is_numeric(word: &str) -> bool {
    word.chars().any(|c| c.is_ascii_digit())
        && word.chars().all(|c| c.is_ascii_digit() || matches!(c, 's' | 't' | 'h' | 'n' | 'd' | 'r'))
}

const ADJ_SUFFIXES: &[&str] = &["ous", "ful", "able", "ible", "ive", "less", "ical", "ic", "ish"];
const LY_NOUNS: &[&str] = &[
    "family", "supply", "reply", "ally", "belly", "bully", "jelly", "lily", "rally", "holly",
    "fly", "july", "italy", "assembly", "anomaly", "monopoly", "butterfly",
];

/// Does the previous tag force a nominal reading of a verb/noun-ambiguous word?
fn nominal_context(prev: Option<(CoarseTag, &str)>) -> bool {
    match prev {
        Some((CoarseTag::Det, _)) | Some((CoarseTag::Adj, _)) | Some((CoarseTag::Num, _)) => true,
        Some((CoarseTag::Pron, w)) => POSSESSIVES.contains(&w),
        _ => false,
    }
}

fn heuristic_tag(tok: &Token, sentence_initial: bool, prev: Option<(CoarseTag, &str)>) -> CoarseTag {
    let w = tok.norm.as_str();
    if is_numeric(w) {
        return CoarseTag::Num;
    }
    let lex = lexicon();
    if let Some(&tag) = lex.get(w) {
        // "that", "so", etc. stay closed-class; open-class verbs yield to
        // a nominal context
        if tag == CoarseTag::Verb && !AUXILIARIES.contains(&w) && nominal_context(prev) {
            return CoarseTag::Noun;
        }
        return tag;
    }
    if !sentence_initial && tok.is_capitalized() {
        return CoarseTag::Noun;
    }
    // third-person verb forms: chases, carries
    for (suffix, repl) in [("ies", "y"), ("es", ""), ("es", "e"), ("s", "")] {
        if let Some(stem) = w.strip_suffix(suffix) {
            let base = format!("{stem}{repl}");
            if lex.get(base.as_str()) == Some(&CoarseTag::Verb) {
                return if nominal_context(prev) || prev.is_none() {
                    CoarseTag::Noun
                } else {
                    CoarseTag::Verb
                };
            }
        }
    }
    if w.len() > 4 && w.ends_with("ly") && !LY_NOUNS.contains(&w) {
        return CoarseTag::Adv;
    }
    if w.len() > 4 && w.ends_with("ing") {
        return if nominal_context(prev) {
            CoarseTag::Noun
        } else {
            CoarseTag::Verb
        };
    }
    if w.len() > 3 && w.ends_with("ed") {
        return CoarseTag::Verb;
    }
    if w.len() > 4 && ADJ_SUFFIXES.iter().any(|s| w.ends_with(s)) {
        return CoarseTag::Adj;
    }
    CoarseTag::Noun
}

/// Rule-based tagger: a closed-class lexicon, a small open-class lexicon,
/// suffix rules and a NOUN default.
pub fn tag_heuristic(tokens: &[Token]) -> PosTagging {
    let mut tags = Vec::new();
    let mut prev: Option<(CoarseTag, &str)> = None;
    let mut sentence_initial = true;
    for (idx, tok) in tokens.iter().enumerate() {
        if !tok.is_word {
            if matches!(tok.surface.as_str(), "." | "!" | "?") {
                sentence_initial = true;
                prev = None;
            }
            continue;
        }
        let tag = heuristic_tag(tok, sentence_initial, prev);
        tags.push((idx, tag));
        prev = Some((tag, tok.norm.as_str()));
        sentence_initial = false;
    }
    PosTagging { tags }
}

/// Counts noun-phrase chunks matching `DET? ADJ* NOUN+` over a tag sequence.
pub fn chunk_noun_phrases(tags: &[CoarseTag]) -> usize {
    let mut count = 0;
    let mut i = 0;
    while i < tags.len() {
        let mut j = i;
        if tags[j] == CoarseTag::Det {
            j += 1;
        }
        while j < tags.len() && tags[j] == CoarseTag::Adj {
            j += 1;
        }
        let nouns_start = j;
        while j < tags.len() && tags[j] == CoarseTag::Noun {
            j += 1;
        }
        if j > nouns_start {
            count += 1;
            i = j;
        } else {
            i += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_bracketed;
    use crate::text::tokenize;
    use CoarseTag::*;

    fn heuristic(s: &str) -> Vec<CoarseTag> {
        tag_heuristic(&tokenize(s)).tag_sequence()
    }

    #[test]
    fn tree_tags_mapped() {
        let tree = parse_bracketed("(S (NP (DT the) (NN dog)) (VP (VBD ran)))").unwrap();
        let tagging = pos_tag(&tokenize("the dog ran"), Some(&[tree])).unwrap();
        assert_eq!(tagging.tag_sequence(), vec![Det, Noun, Verb]);
        assert_eq!(tagging.count_content_words(), 2);
    }

    #[test]
    fn tree_alignment_skips_punct_and_joins_clitics() {
        let tree = parse_bracketed(
            "(S (NP (PRP I)) (VP (VBP do) (RB n't) (VP (VB know))) (. .))",
        )
        .unwrap();
        let toks = tokenize("I don't know.");
        let tagging = pos_tag(&toks, Some(&[tree])).unwrap();
        assert_eq!(tagging.tag_sequence(), vec![Pron, Verb, Verb]);
        assert_eq!(tagging.tags.iter().map(|t| t.0).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn leaf_mismatch() {
        let tree = parse_bracketed("(NN dog)").unwrap();
        assert!(matches!(
            pos_tag(&tokenize("the dog"), Some(&[tree.clone()])),
            Err(SyntaxError::LeafMismatch { .. })
        ));
        assert!(matches!(
            pos_tag(&tokenize("cat"), Some(&[tree.clone()])),
            Err(SyntaxError::LeafMismatch { .. })
        ));
        assert!(matches!(
            pos_tag(&[], Some(&[tree])),
            Err(SyntaxError::LeafMismatch { .. })
        ));
    }

    #[test]
    fn penn_mapping_table() {
        for (penn, coarse) in [
            ("NN", Noun), ("NNS", Noun), ("NNP", Noun), ("NNPS", Noun),
            ("VB", Verb), ("VBD", Verb), ("VBG", Verb), ("VBN", Verb), ("VBP", Verb),
            ("VBZ", Verb), ("MD", Verb), ("JJ", Adj), ("JJR", Adj), ("JJS", Adj),
            ("RB", Adv), ("RBR", Adv), ("RBS", Adv), ("WRB", Adv), ("CD", Num),
            ("PRP", Pron), ("PRP$", Pron), ("WP", Pron), ("DT", Det), ("WDT", Det),
            ("EX", Det), ("IN", Adp), ("CC", Conj), ("TO", Prt), ("RP", Prt), ("POS", Prt),
            (".", Punct), (",", Punct), ("-LRB-", Punct), ("FW", X), ("UH", X), ("SYM", X),
        ] {
            assert_eq!(CoarseTag::from_penn(penn), coarse, "{penn}");
        }
    }

    #[test]
    fn heuristic_numbers() {
        assert_eq!(heuristic("3 dogs"), vec![Num, Noun]);
        assert_eq!(heuristic("Twenty 1990s cars"), vec![Num, Num, Noun]);
    }

    #[test]
    fn heuristic_context() {
        assert_eq!(heuristic("the big dog ran"), vec![Det, Adj, Noun, Verb]);
        assert_eq!(heuristic("dogs chase cats"), vec![Noun, Verb, Noun]);
        assert_eq!(heuristic("the dog chases a cat"), vec![Det, Noun, Verb, Det, Noun]);
        assert_eq!(heuristic("my walk was quickly finished"), vec![Pron, Noun, Verb, Adv, Verb]);
        assert_eq!(heuristic("She met Anna in Paris."), vec![Pron, Verb, Noun, Adp, Noun]);
    }

    #[test]
    fn content_words() {
        assert_eq!(PosTagging::from_tags([Det, Noun, Verb]).count_content_words(), 2);
        assert_eq!(PosTagging::from_tags([Punct, Det]).count_content_words(), 0);
        assert_eq!(PosTagging::from_tags([Noun; 5]).count_content_words(), 5);
    }

    #[test]
    fn chunker_patterns() {
        assert_eq!(chunk_noun_phrases(&[Det, Adj, Noun, Verb]), 1);
        assert_eq!(chunk_noun_phrases(&[Noun, Verb, Noun]), 2);
        assert_eq!(chunk_noun_phrases(&[Det, Adj, Adj, Noun, Noun, Adp, Noun]), 2);
        assert_eq!(chunk_noun_phrases(&[Det, Adj, Verb]), 0);
        assert_eq!(chunk_noun_phrases(&[]), 0);
    }

    #[test]
    fn tag_names_round_trip() {
        for tag in CoarseTag::ALL {
            assert_eq!(tag.as_str().parse::<CoarseTag>().unwrap(), tag);
        }
    }
}
