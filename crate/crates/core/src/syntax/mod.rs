//! Constituency-tree ingestion and the syntactic counts NERF uses: tree
//! height, noun-phrase count and content-word count.
//!
//! Trees normally come from an external parser as Penn-style bracketed
//! strings. When none are supplied, [`heuristic_syntax`] derives an
//! approximate NP count and height from the rule-based tagger; callers must
//! flag such results as approximate.

mod pos;
mod tree;

use thiserror::Error;

pub use pos::{chunk_noun_phrases, pos_tag, tag_heuristic, CoarseTag, PosTagging};
pub use tree::{base_label, normalize_bracketed, parse_bracketed, parse_forest, read_sidecar, ParseTree};

use crate::text::Token;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("unbalanced brackets at byte {position}")]
    UnbalancedBrackets { position: usize },
    #[error("empty or unlabeled node at byte {position}")]
    EmptyNode { position: usize },
    #[error("unexpected token {found:?} at byte {position}")]
    UnexpectedToken { position: usize, found: String },
    #[error("input continues after the tree")]
    TrailingInput,
    #[error("tree leaves {leaves:?} do not align with word tokens {tokens:?}")]
    LeafMismatch {
        leaves: Vec<String>,
        tokens: Vec<String>,
    },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<SyntaxError>,
    },
}

pub fn tree_height(tree: &ParseTree) -> usize {
    tree.height()
}

pub fn count_np(tree: &ParseTree) -> usize {
    tree.count_np()
}

pub fn count_content_words(tagging: &PosTagging) -> usize {
    tagging.count_content_words()
}

/// Syntactic counts estimated without a parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeuristicSyntax {
    pub np_count: usize,
    pub tree_height: usize,
}

/// Height proxy `3 + ceil(log2(words))`, clamped to `[3, 12]`.
pub fn height_proxy(words: usize) -> usize {
    let log = if words <= 1 {
        0
    } else {
        (usize::BITS - (words - 1).leading_zeros()) as usize
    };
    (3 + log).clamp(3, 12)
}

/// NP count from the `DET? ADJ* NOUN+` chunker over heuristic tags, and the
/// height proxy, for one sentence.
pub fn heuristic_syntax(sentence: &[Token]) -> HeuristicSyntax {
    let tagging = tag_heuristic(sentence);
    let words = sentence.iter().filter(|t| t.is_word).count();
    HeuristicSyntax {
        np_count: chunk_noun_phrases(&tagging.tag_sequence()),
        tree_height: height_proxy(words),
    }
}
