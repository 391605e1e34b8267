//! Tokenization, sentence segmentation, syllable counting and the surface
//! statistics every traditional formula consumes.
//!
//! All rules here are deterministic and dictionary-free so that counts are
//! reproducible bit-for-bit across platforms:
//!
//! * a word token is a maximal run of alphanumerics, allowing apostrophes and
//!   hyphens *between* alphanumerics (`it's`, `rule-based`);
//! * every other non-whitespace character is emitted as its own non-word token;
//! * a sentence ends after `.`, `!` or `?` when the next word token is
//!   capitalized (or the input ends), unless the `.` closes a known
//!   abbreviation.

use std::collections::HashSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by the text pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TextError {
    #[error("text contains no word tokens")]
    EmptyText,
    #[error("reading rate must be positive, got {0}")]
    NonPositiveRate(f64),
}

/// A single token of the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// Original form as it appeared in the text.
    pub surface: String,
    /// Lowercased alphanumerics only; empty for non-word tokens.
    pub norm: String,
    pub is_word: bool,
}

impl Token {
    fn word(surface: &str) -> Self {
        let norm = normalize(surface);
        Token {
            surface: surface.to_string(),
            is_word: !norm.is_empty(),
            norm,
        }
    }

    fn punct(c: char) -> Self {
        Token {
            surface: c.to_string(),
            norm: String::new(),
            is_word: false,
        }
    }

    /// True when the first character of the surface form is uppercase.
    pub fn is_capitalized(&self) -> bool {
        self.surface.chars().next().is_some_and(char::is_uppercase)
    }
}

/// Case-folds and strips everything but alphanumerics.
pub fn normalize(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '-' | '\u{2010}' | '\u{2011}')
}

/// Splits `text` into word and punctuation tokens.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_alphanumeric() {
            let start = i;
            i += 1;
            loop {
                if i < chars.len() && chars[i].is_alphanumeric() {
                    i += 1;
                } else if i + 1 < chars.len()
                    && is_joiner(chars[i])
                    && chars[i + 1].is_alphanumeric()
                {
                    i += 2;
                } else {
                    break;
                }
            }
            let surface: String = chars[start..i].iter().collect();
            tokens.push(Token::word(&surface));
        } else {
            tokens.push(Token::punct(c));
            i += 1;
        }
    }
    tokens
}

/// Half-open range of token indices forming one sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceSpan {
    pub token_range: Range<usize>,
}

impl SentenceSpan {
    pub fn tokens<'a>(&self, tokens: &'a [Token]) -> &'a [Token] {
        &tokens[self.token_range.clone()]
    }
}

/// Abbreviations that do not end a sentence, written in normalized form with
/// internal periods (`e.g`, `u.s`).
pub const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "dr", "ms", "st", "vs", "etc", "e.g", "i.e", "u.s", "fig", "no",
];

/// Rule-based sentence splitter with a configurable abbreviation list.
#[derive(Debug, Clone)]
pub struct SentenceSplitter {
    abbreviations: HashSet<String>,
}

impl Default for SentenceSplitter {
    fn default() -> Self {
        Self::with_abbreviations(DEFAULT_ABBREVIATIONS.iter().copied())
    }
}

impl SentenceSplitter {
    pub fn with_abbreviations<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        SentenceSplitter {
            abbreviations: abbreviations
                .into_iter()
                .map(|a| a.as_ref().trim_end_matches('.').to_lowercase())
                .collect(),
        }
    }

    /// Is the period at `dot` part of an abbreviation? Considers `word . word .`
    /// chains on both sides so that both periods of `e.g.` and `U.S.` match.
    fn in_abbreviation(&self, tokens: &[Token], dot: usize) -> bool {
        let mut back = Vec::new();
        let mut j = dot;
        while j > 0 && tokens[j - 1].is_word {
            back.push(tokens[j - 1].norm.as_str());
            if j >= 2 && tokens[j - 2].surface == "." {
                j -= 2;
            } else {
                break;
            }
        }
        back.reverse();
        let mut forward = Vec::new();
        let mut k = dot + 1;
        while k + 1 < tokens.len() && tokens[k].is_word && tokens[k + 1].surface == "." {
            forward.push(tokens[k].norm.as_str());
            k += 2;
        }
        (0..back.len()).any(|from| {
            (0..=forward.len()).any(|ahead| {
                let candidate: Vec<&str> =
                    back[from..].iter().chain(&forward[..ahead]).copied().collect();
                self.abbreviations.contains(&candidate.join("."))
            })
        })
    }

    pub fn split(&self, tokens: &[Token]) -> Vec<SentenceSpan> {
        let mut spans = Vec::new();
        let mut start = 0;
        let mut has_word = false;
        let mut i = 0;
        while i < tokens.len() {
            let tok = &tokens[i];
            if tok.is_word {
                has_word = true;
                i += 1;
                continue;
            }
            let terminal = matches!(tok.surface.as_str(), "." | "!" | "?");
            if !terminal || !has_word {
                i += 1;
                continue;
            }
            if tok.surface == "." && self.in_abbreviation(tokens, i) {
                i += 1;
                continue;
            }
            // absorb trailing punctuation (closing quotes, repeated marks)
            let mut end = i + 1;
            while end < tokens.len() && !tokens[end].is_word {
                end += 1;
            }
            if end == tokens.len() || tokens[end].is_capitalized() {
                spans.push(SentenceSpan {
                    token_range: start..end,
                });
                start = end;
                has_word = false;
            }
            i = end;
        }
        if has_word {
            spans.push(SentenceSpan {
                token_range: start..tokens.len(),
            });
        } else if let Some(last) = spans.last_mut() {
            // trailing punctuation with no word joins the previous sentence
            last.token_range.end = tokens.len();
        }
        spans
    }
}

/// Splits tokens into sentences using the default abbreviation list.
pub fn split_sentences(tokens: &[Token]) -> Vec<SentenceSpan> {
    SentenceSplitter::default().split(tokens)
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Heuristic English syllable count for a normalized word.
///
/// Counts maximal vowel groups (`y` included), drops a silent final `e` that
/// follows a consonant unless it forms a consonant + `le` ending or is the
/// only vowel group, and never returns less than 1. Purely numeric tokens
/// count as one syllable.
pub fn count_syllables(norm_word: &str) -> usize {
    let chars: Vec<char> = norm_word.chars().collect();
    if chars.iter().all(|c| c.is_ascii_digit()) {
        return 1;
    }
    let mut groups = 0;
    let mut prev_vowel = false;
    for &c in &chars {
        let v = is_vowel(c);
        if v && !prev_vowel {
            groups += 1;
        }
        prev_vowel = v;
    }
    let n = chars.len();
    if groups > 1 && n >= 2 && chars[n - 1] == 'e' && !is_vowel(chars[n - 2]) {
        let consonant_le = n >= 3 && chars[n - 2] == 'l' && !is_vowel(chars[n - 3]);
        if !consonant_le {
            groups -= 1;
        }
    }
    groups.max(1)
}

/// Syllable thresholds for the FOGI and SMOG word classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsConfig {
    /// Minimum syllables for a FOGI "difficult" word.
    pub difficult_min_syllables: usize,
    /// Minimum syllables for a SMOG polysyllable.
    pub polysyllable_min_syllables: usize,
}

impl Default for StatsConfig {
    fn default() -> Self {
        StatsConfig {
            difficult_min_syllables: 3,
            polysyllable_min_syllables: 3,
        }
    }
}

/// Surface counts of one document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TextStats {
    pub words: usize,
    pub sentences: usize,
    pub syllables: usize,
    pub letters: usize,
    pub difficult_words: usize,
    pub polysyllable_words: usize,
    pub unique_words: usize,
}

/// Tokens and sentence spans of a document, computed once and shared by the
/// stats, lexicon and syntax stages.
#[derive(Debug, Clone)]
pub struct Document {
    pub tokens: Vec<Token>,
    pub sentences: Vec<SentenceSpan>,
}

impl Document {
    pub fn new(text: &str) -> Self {
        Self::with_splitter(text, &SentenceSplitter::default())
    }

    pub fn with_splitter(text: &str, splitter: &SentenceSplitter) -> Self {
        let normalized;
        let text = if text.contains('\r') {
            normalized = text.replace("\r\n", "\n").replace('\r', "\n");
            normalized.as_str()
        } else {
            text
        };
        let tokens = tokenize(text);
        let sentences = splitter.split(&tokens);
        Document { tokens, sentences }
    }

    pub fn word_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_word).count()
    }

    pub fn stats(&self, config: &StatsConfig) -> Result<TextStats, TextError> {
        let mut stats = TextStats {
            words: 0,
            sentences: self.sentences.len(),
            syllables: 0,
            letters: 0,
            difficult_words: 0,
            polysyllable_words: 0,
            unique_words: 0,
        };
        let mut seen = HashSet::new();
        for tok in self.tokens.iter().filter(|t| t.is_word) {
            let syl = count_syllables(&tok.norm);
            stats.words += 1;
            stats.syllables += syl;
            stats.letters += tok.surface.chars().filter(|c| c.is_alphanumeric()).count();
            if syl >= config.difficult_min_syllables {
                stats.difficult_words += 1;
            }
            if syl >= config.polysyllable_min_syllables {
                stats.polysyllable_words += 1;
            }
            seen.insert(tok.norm.as_str());
        }
        if stats.words == 0 {
            return Err(TextError::EmptyText);
        }
        stats.unique_words = seen.len();
        Ok(stats)
    }
}

/// Surface statistics with the default syllable thresholds.
pub fn text_stats(text: &str) -> Result<TextStats, TextError> {
    Document::new(text).stats(&StatsConfig::default())
}

/// Reading rates offered out of the box, in words per minute.
pub const STANDARD_WPM: [f64; 3] = [175.0, 240.0, 300.0];

/// Reading time in minutes at `wpm` words per minute.
pub fn read_time(stats: &TextStats, wpm: f64) -> Result<f64, TextError> {
    if !(wpm > 0.0) {
        return Err(TextError::NonPositiveRate(wpm));
    }
    Ok(stats.words as f64 / wpm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().filter(|t| t.is_word).map(|t| t.norm.as_str()).collect()
    }

    #[test]
    fn tokenize_simple_sentence() {
        let toks = tokenize("The dog ran.");
        assert_eq!(toks.len(), 4);
        assert_eq!(toks.iter().filter(|t| t.is_word).count(), 3);
        assert_eq!(toks[3].surface, ".");
        assert!(toks[3].norm.is_empty());
    }

    #[test]
    fn tokenize_empty() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  \n\t ").is_empty());
    }

    #[test]
    fn tokenize_apostrophes_and_hyphens() {
        let toks = tokenize("it's rule-based");
        assert_eq!(words(&toks), vec!["its", "rulebased"]);
        assert_eq!(toks[0].surface, "it's");
        // a leading or trailing joiner is punctuation
        let toks = tokenize("'quoted' -dash-");
        assert_eq!(words(&toks), vec!["quoted", "dash"]);
        assert_eq!(toks.len(), 6);
        assert_eq!(words(&tokenize("don\u{2019}t")), vec!["dont"]);
    }

    #[test]
    fn sentences_two_clauses() {
        let toks = tokenize("A cat. A dog.");
        let spans = split_sentences(&toks);
        assert_eq!(spans.len(), 2);
        assert_eq!(spans[0].token_range, 0..3);
        assert_eq!(spans[1].token_range, 3..6);
    }

    #[test]
    fn sentences_abbreviation() {
        assert_eq!(split_sentences(&tokenize("Dr. Lee slept.")).len(), 1);
        assert_eq!(
            split_sentences(&tokenize("We met in the U.S. Army base. It rained.")).len(),
            2
        );
        assert_eq!(
            split_sentences(&tokenize("Fruit, e.g. Apples, is good. Yes.")).len(),
            2
        );
    }

    #[test]
    fn sentences_fallback_and_lowercase_continuation() {
        assert_eq!(split_sentences(&tokenize("no punctuation here")).len(), 1);
        assert_eq!(split_sentences(&tokenize("it was 3.5 m. wide")).len(), 1);
        let toks = tokenize("He said \"Stop!\" Then he left.");
        let spans = split_sentences(&toks);
        assert_eq!(spans.len(), 2);
        assert_eq!(spans[0].tokens(&toks).last().unwrap().surface, "\"");
    }

    #[test]
    fn sentences_custom_abbreviations() {
        let splitter = SentenceSplitter::with_abbreviations(["Prof."]);
        assert_eq!(splitter.split(&tokenize("Prof. Kim spoke.")).len(), 1);
        assert_eq!(splitter.split(&tokenize("Dr. Kim spoke.")).len(), 2);
    }

    #[test]
    fn sentences_punctuation_only_tail() {
        let toks = tokenize("Hello there. ...");
        let spans = split_sentences(&toks);
        assert_eq!(spans.len(), 1);
        assert_eq!(spans[0].token_range, 0..toks.len());
    }

    #[test]
    fn syllables_reference_words() {
        assert_eq!(count_syllables("banana"), 3);
        assert_eq!(count_syllables("the"), 1);
        assert_eq!(count_syllables("readability"), 5);
        assert_eq!(count_syllables("make"), 1);
        assert_eq!(count_syllables("table"), 2);
        assert_eq!(count_syllables("agree"), 2);
        assert_eq!(count_syllables("rhythm"), 1);
        assert_eq!(count_syllables("psst"), 1);
        assert_eq!(count_syllables("2024"), 1);
    }

    #[test]
    fn stats_small_text() {
        let s = text_stats("A cat sat.").unwrap();
        assert_eq!((s.words, s.sentences, s.syllables, s.letters), (3, 1, 3, 7));
        assert_eq!(s.unique_words, 3);
    }

    #[test]
    fn stats_repeated_word() {
        let s = text_stats("Banana banana.").unwrap();
        assert_eq!(s.unique_words, 1);
        assert_eq!(s.difficult_words, 2);
        assert_eq!(s.polysyllable_words, 2);
    }

    #[test]
    fn stats_empty() {
        assert_eq!(text_stats(""), Err(TextError::EmptyText));
        assert_eq!(text_stats("?!"), Err(TextError::EmptyText));
    }

    #[test]
    fn stats_thresholds_configurable() {
        let config = StatsConfig {
            difficult_min_syllables: 3,
            polysyllable_min_syllables: 4,
        };
        let s = Document::new("Banana readability.").stats(&config).unwrap();
        assert_eq!(s.difficult_words, 2);
        assert_eq!(s.polysyllable_words, 1);
    }

    #[test]
    fn crlf_normalized() {
        assert_eq!(text_stats("One.\r\nTwo."), text_stats("One.\nTwo."));
    }

    #[test]
    fn read_time_rates() {
        let stats = |words| TextStats {
            words,
            sentences: 1,
            syllables: words,
            letters: words,
            difficult_words: 0,
            polysyllable_words: 0,
            unique_words: 1,
        };
        assert_eq!(read_time(&stats(480), 240.0).unwrap(), 2.0);
        assert_eq!(read_time(&stats(175), 175.0).unwrap(), 1.0);
        assert!((read_time(&stats(100), 300.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(read_time(&stats(1), 0.0), Err(TextError::NonPositiveRate(0.0)));
        assert!(read_time(&stats(1), -5.0).is_err());
        assert!(read_time(&stats(1), f64::NAN).is_err());
    }
}
