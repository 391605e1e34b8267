use std::fmt;

use super::SyntaxError;

/// A constituency tree node. Preterminals carry a leaf token, every other
/// node carries children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTree {
    pub label: String,
    pub children: Vec<ParseTree>,
    pub leaf: Option<String>,
}

impl ParseTree {
    pub fn preterminal(label: impl Into<String>, leaf: impl Into<String>) -> Self {
        ParseTree {
            label: label.into(),
            children: Vec::new(),
            leaf: Some(leaf.into()),
        }
    }

    pub fn node(label: impl Into<String>, children: Vec<ParseTree>) -> Self {
        ParseTree {
            label: label.into(),
            children,
            leaf: None,
        }
    }

    pub fn is_preterminal(&self) -> bool {
        self.leaf.is_some()
    }

    /// Height with the leaf token counted as one level, so a preterminal
    /// has height 2.
    pub fn height(&self) -> usize {
        if self.leaf.is_some() {
            2
        } else {
            1 + self.children.iter().map(ParseTree::height).max().unwrap_or(0)
        }
    }

    /// Number of nodes labeled `NP`, ignoring functional suffixes
    /// (`NP-SBJ`, `NP-TMP-1`).
    pub fn count_np(&self) -> usize {
        let own = usize::from(base_label(&self.label) == "NP");
        own + self.children.iter().map(ParseTree::count_np).sum::<usize>()
    }

    /// Preterminal `(label, leaf)` pairs in left-to-right order.
    pub fn preterminals(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::new();
        self.collect_preterminals(&mut out);
        out
    }

    fn collect_preterminals<'a>(&'a self, out: &mut Vec<(&'a str, &'a str)>) {
        match &self.leaf {
            Some(leaf) => out.push((&self.label, leaf)),
            None => self.children.iter().for_each(|c| c.collect_preterminals(out)),
        }
    }

    /// Single-line Penn bracketed form, parentheses in leaves escaped.
    pub fn to_bracketed(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.label)?;
        if let Some(leaf) = &self.leaf {
            write!(f, " {}", encode_leaf(leaf))?;
        }
        for child in &self.children {
            write!(f, " {child}")?;
        }
        f.write_str(")")
    }
}

/// Label with functional annotation stripped at the first hyphen. Labels that
/// start with a hyphen (`-LRB-`, `-NONE-`) are returned unchanged.
pub fn base_label(label: &str) -> &str {
    match label.find('-') {
        Some(i) if i > 0 => &label[..i],
        _ => label,
    }
}

fn decode_leaf(atom: &str) -> String {
    match atom {
        "-LRB-" => "(".into(),
        "-RRB-" => ")".into(),
        _ => atom.into(),
    }
}

fn encode_leaf(leaf: &str) -> &str {
    match leaf {
        "(" => "-LRB-",
        ")" => "-RRB-",
        _ => leaf,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Lexeme<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn lex(s: &str) -> Vec<(usize, Lexeme<'_>)> {
    let mut out = Vec::new();
    let mut atom_start = None;
    for (i, c) in s.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(start) = atom_start.take() {
                out.push((start, Lexeme::Atom(&s[start..i])));
            }
            match c {
                '(' => out.push((i, Lexeme::Open)),
                ')' => out.push((i, Lexeme::Close)),
                _ => {}
            }
        } else if atom_start.is_none() {
            atom_start = Some(i);
        }
    }
    if let Some(start) = atom_start {
        out.push((start, Lexeme::Atom(&s[start..])));
    }
    out
}

struct Parser<'a> {
    lexemes: Vec<(usize, Lexeme<'a>)>,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<Lexeme<'a>> {
        self.lexemes.get(self.pos).map(|&(_, l)| l)
    }

    fn offset(&self) -> usize {
        self.lexemes.get(self.pos).map_or(self.end, |&(o, _)| o)
    }

    fn expect_close(&mut self) -> Result<(), SyntaxError> {
        match self.peek() {
            Some(Lexeme::Close) => {
                self.pos += 1;
                Ok(())
            }
            Some(Lexeme::Atom(a)) => Err(SyntaxError::UnexpectedToken {
                position: self.offset(),
                found: a.to_string(),
            }),
            _ => Err(SyntaxError::UnbalancedBrackets {
                position: self.offset(),
            }),
        }
    }

    /// Parses one bracketed node; the cursor is at its `(`. A node without a
    /// label is returned with an empty label for the caller to resolve.
    fn node(&mut self) -> Result<ParseTree, SyntaxError> {
        let open_at = self.offset();
        self.pos += 1;
        let label = match self.peek() {
            Some(Lexeme::Atom(a)) => {
                self.pos += 1;
                a.to_string()
            }
            _ => String::new(),
        };
        match self.peek() {
            Some(Lexeme::Atom(a)) => {
                self.pos += 1;
                if label.is_empty() {
                    return Err(SyntaxError::EmptyNode { position: open_at });
                }
                let tree = ParseTree::preterminal(label, decode_leaf(a));
                self.expect_close()?;
                Ok(tree)
            }
            Some(Lexeme::Open) => {
                let mut children = Vec::new();
                while let Some(Lexeme::Open) = self.peek() {
                    let child = self.node()?;
                    if child.label.is_empty() {
                        return Err(SyntaxError::EmptyNode { position: open_at });
                    }
                    children.push(child);
                }
                self.expect_close()?;
                Ok(ParseTree::node(label, children))
            }
            Some(Lexeme::Close) => Err(SyntaxError::EmptyNode { position: open_at }),
            None => Err(SyntaxError::UnbalancedBrackets {
                position: self.end,
            }),
        }
    }

    /// A top-level tree; an unlabeled wrapper `( (S ...) )` around a single
    /// tree is removed.
    fn root(&mut self) -> Result<ParseTree, SyntaxError> {
        let open_at = self.offset();
        let tree = self.node()?;
        if !tree.label.is_empty() {
            return Ok(tree);
        }
        let mut children = tree.children;
        if children.len() == 1 {
            Ok(children.remove(0))
        } else {
            Err(SyntaxError::EmptyNode { position: open_at })
        }
    }
}

/// Parses every tree in `s` (a forest of consecutive bracketed trees).
pub fn parse_forest(s: &str) -> Result<Vec<ParseTree>, SyntaxError> {
    let mut parser = Parser {
        lexemes: lex(s),
        pos: 0,
        end: s.len(),
    };
    let mut trees = Vec::new();
    while let Some(lexeme) = parser.peek() {
        match lexeme {
            Lexeme::Open => trees.push(parser.root()?),
            Lexeme::Close => {
                return Err(SyntaxError::UnbalancedBrackets {
                    position: parser.offset(),
                })
            }
            Lexeme::Atom(a) => {
                return Err(SyntaxError::UnexpectedToken {
                    position: parser.offset(),
                    found: a.to_string(),
                })
            }
        }
    }
    Ok(trees)
}

/// Parses exactly one Penn-style bracketed tree.
pub fn parse_bracketed(s: &str) -> Result<ParseTree, SyntaxError> {
    let mut trees = parse_forest(s)?;
    match trees.len() {
        1 => Ok(trees.remove(0)),
        0 => Err(SyntaxError::EmptyNode { position: 0 }),
        _ => Err(SyntaxError::TrailingInput),
    }
}

/// Collapses runs of whitespace and removes whitespace adjacent to
/// parentheses' inner side, giving the canonical form `to_bracketed` emits.
pub fn normalize_bracketed(s: &str) -> String {
    let lexemes = lex(s);
    let mut out = String::with_capacity(s.len());
    let mut prev: Option<Lexeme> = None;
    for (_, l) in lexemes {
        match l {
            Lexeme::Open => {
                if matches!(prev, Some(Lexeme::Atom(_)) | Some(Lexeme::Close)) {
                    out.push(' ');
                }
                out.push('(');
            }
            Lexeme::Close => out.push(')'),
            Lexeme::Atom(a) => {
                if matches!(prev, Some(Lexeme::Atom(_)) | Some(Lexeme::Close)) {
                    out.push(' ');
                }
                out.push_str(a);
            }
        }
        prev = Some(l);
    }
    out
}

/// Parses a parse sidecar: one tree per line, documents separated by blank
/// lines. Errors carry the 1-based line number.
pub fn read_sidecar(contents: &str) -> Result<Vec<Vec<ParseTree>>, SyntaxError> {
    let mut docs = Vec::new();
    let mut current = Vec::new();
    for (idx, line) in contents.lines().enumerate() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                docs.push(std::mem::take(&mut current));
            }
            continue;
        }
        let tree = parse_bracketed(line).map_err(|e| SyntaxError::AtLine {
            line: idx + 1,
            source: Box::new(e),
        })?;
        current.push(tree);
    }
    if !current.is_empty() {
        docs.push(current);
    }
    Ok(docs)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOG_RAN: &str = "(S (NP (DT the) (NN dog)) (VP (VBD ran)))";

    #[test]
    fn smallest_tree() {
        let t = parse_bracketed("(NN dog)").unwrap();
        assert_eq!(t, ParseTree::preterminal("NN", "dog"));
        assert_eq!(t.height(), 2);
        assert_eq!(t.count_np(), 0);
    }

    #[test]
    fn three_level_tree() {
        let t = parse_bracketed(DOG_RAN).unwrap();
        assert_eq!(t.label, "S");
        assert_eq!(t.children.len(), 2);
        assert_eq!(
            t.preterminals(),
            vec![("DT", "the"), ("NN", "dog"), ("VBD", "ran")]
        );
        assert_eq!(t.height(), 4);
        assert_eq!(t.count_np(), 1);
        assert_eq!(t.to_bracketed(), DOG_RAN);
    }

    #[test]
    fn unbalanced() {
        assert!(matches!(
            parse_bracketed("(S (NP"),
            Err(SyntaxError::UnbalancedBrackets { .. })
        ));
        assert!(matches!(
            parse_bracketed("(NN dog))"),
            Err(SyntaxError::UnbalancedBrackets { position: 8 })
        ));
        assert!(matches!(
            parse_bracketed("(S (NN dog)"),
            Err(SyntaxError::UnbalancedBrackets { position: 11 })
        ));
    }

    #[test]
    fn empty_nodes() {
        for s in ["()", "(NN)", "( (A x) (B y) )", "(S () )", "( dog)"] {
            assert!(
                matches!(parse_bracketed(s), Err(SyntaxError::EmptyNode { .. })),
                "{s}"
            );
        }
        assert!(matches!(parse_bracketed(""), Err(SyntaxError::EmptyNode { .. })));
    }

    #[test]
    fn unexpected_tokens() {
        assert!(matches!(
            parse_bracketed("(NN dog cat)"),
            Err(SyntaxError::UnexpectedToken { .. })
        ));
        assert!(matches!(
            parse_bracketed("dog"),
            Err(SyntaxError::UnexpectedToken { .. })
        ));
        assert!(matches!(
            parse_bracketed("(NN a) (NN b)"),
            Err(SyntaxError::TrailingInput)
        ));
    }

    #[test]
    fn unlabeled_root_unwrapped() {
        let t = parse_bracketed(&format!("( {DOG_RAN} )")).unwrap();
        assert_eq!(t.to_bracketed(), DOG_RAN);
    }

    #[test]
    fn bracket_leaves_decoded() {
        let t = parse_bracketed("(PRN (-LRB- -LRB-) (NN aside) (-RRB- -RRB-))").unwrap();
        assert_eq!(
            t.preterminals(),
            vec![("-LRB-", "("), ("NN", "aside"), ("-RRB-", ")")]
        );
        assert_eq!(
            t.to_bracketed(),
            "(PRN (-LRB- -LRB-) (NN aside) (-RRB- -RRB-))"
        );
    }

    #[test]
    fn np_suffixes() {
        let t = parse_bracketed("(S (NP (NP (NN dog)) (PP (IN of) (NP (NN war)))))").unwrap();
        assert_eq!(t.count_np(), 3);
        assert_eq!(parse_bracketed("(NP-SBJ (NN dog))").unwrap().count_np(), 1);
        assert_eq!(parse_bracketed("(NPX (NN dog))").unwrap().count_np(), 0);
        assert_eq!(base_label("-NONE-"), "-NONE-");
        assert_eq!(base_label("NP-TMP-1"), "NP");
    }

    #[test]
    fn unary_chain_height() {
        let mut t = ParseTree::preterminal("X", "w");
        for k in 1..=6 {
            assert_eq!(t.height(), k + 1);
            t = ParseTree::node("U", vec![t]);
        }
    }

    #[test]
    fn normalization() {
        assert_eq!(
            normalize_bracketed("  ( S\n ( NP  (DT the)(NN dog) ) )  "),
            "(S (NP (DT the) (NN dog)))"
        );
    }

    #[test]
    fn sidecar_documents() {
        let docs = read_sidecar(
            "(S (NN a))\n(S (NN b))\n\n\n(S (NN c))\n",
        )
        .unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].len(), 2);
        assert_eq!(docs[1][0].preterminals(), vec![("NN", "c")]);

        match read_sidecar("(S (NN a))\n\n(S (NN\n") {
            Err(SyntaxError::AtLine { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
