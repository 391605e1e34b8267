//! NERF: a linear readability model over six linguistic features.
//!
//! ```text
//! NERF = (w_aoa·ΣAoA + w_fam·ΣFamiliarity) / #Sentence
//!      + (w_cw·#ContentWord + w_np·#NounPhrase + w_th·ΣTreeHeight) / #Sentence
//!      + w_ttr·#UniqueWord / √#Word
//!      + bias
//! ```
//!
//! Tree height enters as the per-sentence sum, so after the division by the
//! sentence count it is the mean height.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formulas::{Score, ScoreKind, Variant};
use crate::lexicon::{Lexicon, LookupSum};
use crate::syntax::{self, ParseTree, SyntaxError};
use crate::text::{Document, StatsConfig, TextError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NerfError {
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("invalid feature vector: {0}")]
    InvalidFeatures(String),
}

/// The raw NERF feature vector of one document.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NerfFeatures {
    pub aoa_sum: f64,
    pub familiarity_sum: f64,
    pub content_words: usize,
    pub noun_phrases: usize,
    pub tree_height_sum: usize,
    pub unique_words: usize,
    pub words: usize,
    pub sentences: usize,
    /// Syntax counts came from the heuristic provider, not real parses.
    pub approximate_syntax: bool,
}

impl NerfFeatures {
    pub fn validate(&self) -> Result<(), NerfError> {
        let fail = |m: &str| Err(NerfError::InvalidFeatures(m.to_string()));
        if self.sentences == 0 {
            return fail("sentences must be >= 1");
        }
        if self.unique_words == 0 || self.unique_words > self.words {
            return fail("need words >= unique_words >= 1");
        }
        if !(self.aoa_sum.is_finite() && self.aoa_sum >= 0.0) {
            return fail("aoa_sum must be finite and >= 0");
        }
        if !(self.familiarity_sum.is_finite() && self.familiarity_sum >= 0.0) {
            return fail("familiarity_sum must be finite and >= 0");
        }
        Ok(())
    }

    /// Regressors in coefficient order `[aoa, fam, cw, np, th, ttr, 1]`.
    pub fn design_row(&self) -> [f64; 7] {
        let s = self.sentences as f64;
        [
            self.aoa_sum / s,
            self.familiarity_sum / s,
            self.content_words as f64 / s,
            self.noun_phrases as f64 / s,
            self.tree_height_sum as f64 / s,
            self.unique_words as f64 / (self.words as f64).sqrt(),
            1.0,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NerfCoefficients {
    pub w_aoa: f64,
    pub w_fam: f64,
    pub w_cw: f64,
    pub w_np: f64,
    pub w_th: f64,
    pub w_ttr: f64,
    pub bias: f64,
}

impl Default for NerfCoefficients {
    fn default() -> Self {
        default_nerf_coefficients()
    }
}

impl NerfCoefficients {
    pub fn to_array(&self) -> [f64; 7] {
        [
            self.w_aoa, self.w_fam, self.w_cw, self.w_np, self.w_th, self.w_ttr, self.bias,
        ]
    }

    pub fn from_array([w_aoa, w_fam, w_cw, w_np, w_th, w_ttr, bias]: [f64; 7]) -> Self {
        NerfCoefficients {
            w_aoa,
            w_fam,
            w_cw,
            w_np,
            w_th,
            w_ttr,
            bias,
        }
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("coefficients serialize")
    }
}

/// The published NERF weights.
pub fn default_nerf_coefficients() -> NerfCoefficients {
    NerfCoefficients {
        w_aoa: 0.04876,
        w_fam: -0.1145,
        w_cw: 0.3091,
        w_np: 0.1866,
        w_th: 0.2645,
        w_ttr: 1.1017,
        bias: -4.125,
    }
}

/// Evaluates NERF on a feature vector. The caller guarantees `f` is valid
/// (see [`NerfFeatures::validate`]).
pub fn nerf_score(f: &NerfFeatures, c: &NerfCoefficients) -> Score {
    let sentences = f.sentences as f64;
    let lexical = (c.w_aoa * f.aoa_sum + c.w_fam * f.familiarity_sum) / sentences;
    let syntactic = (c.w_cw * f.content_words as f64
        + c.w_np * f.noun_phrases as f64
        + c.w_th * f.tree_height_sum as f64)
        / sentences;
    let richness = c.w_ttr * f.unique_words as f64 / (f.words as f64).sqrt();
    Score {
        value: lexical + syntactic + richness + c.bias,
        formula: ScoreKind::Nerf,
        variant: if *c == default_nerf_coefficients() {
            Variant::Original
        } else {
            Variant::Custom
        },
        rounded: false,
    }
}

/// The two lexicons NERF's lexical-difficulty term reads.
#[derive(Debug, Clone, Copy)]
pub struct NerfLexicons<'a> {
    pub aoa: &'a Lexicon,
    pub familiarity: &'a Lexicon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NerfOptions {
    /// Retry lexicon misses with suffix-stripped lemmas.
    pub lemma_fallback: bool,
}

impl Default for NerfOptions {
    fn default() -> Self {
        NerfOptions {
            lemma_fallback: true,
        }
    }
}

/// Features plus lexicon coverage for one document.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureReport {
    pub features: NerfFeatures,
    pub aoa_lookup: LookupSum,
    pub familiarity_lookup: LookupSum,
}

/// Extracts the NERF features of `text`.
///
/// With `parses`, each tree is one sentence: NP count and height are exact
/// and the tree count is the sentence count. Without, the sentence splitter
/// and heuristic syntax provider are used and the result is flagged
/// approximate.
pub fn extract_features(
    text: &str,
    lexicons: NerfLexicons<'_>,
    parses: Option<&[ParseTree]>,
    options: &NerfOptions,
) -> Result<FeatureReport, NerfError> {
    let doc = Document::new(text);
    extract_from_document(&doc, lexicons, parses, options)
}

pub fn extract_from_document(
    doc: &Document,
    lexicons: NerfLexicons<'_>,
    parses: Option<&[ParseTree]>,
    options: &NerfOptions,
) -> Result<FeatureReport, NerfError> {
    let stats = doc.stats(&StatsConfig::default())?;
    let aoa_lookup = lexicons.aoa.lookup_sum(&doc.tokens, options.lemma_fallback);
    let familiarity_lookup = lexicons
        .familiarity
        .lookup_sum(&doc.tokens, options.lemma_fallback);

    let (sentences, content_words, noun_phrases, tree_height_sum, approximate_syntax) =
        match parses {
            Some(trees) if !trees.is_empty() => {
                let tagging = syntax::pos_tag(&doc.tokens, Some(trees))?;
                (
                    trees.len(),
                    tagging.count_content_words(),
                    trees.iter().map(ParseTree::count_np).sum(),
                    trees.iter().map(ParseTree::height).sum(),
                    false,
                )
            }
            _ => {
                let tagging = syntax::tag_heuristic(&doc.tokens);
                let (np, th) = doc
                    .sentences
                    .iter()
                    .map(|span| syntax::heuristic_syntax(span.tokens(&doc.tokens)))
                    .fold((0, 0), |(np, th), h| (np + h.np_count, th + h.tree_height));
                (stats.sentences, tagging.count_content_words(), np, th, true)
            }
        };

    Ok(FeatureReport {
        features: NerfFeatures {
            aoa_sum: aoa_lookup.sum,
            familiarity_sum: familiarity_lookup.sum,
            content_words,
            noun_phrases,
            tree_height_sum,
            unique_words: stats.unique_words,
            words: stats.words,
            sentences,
            approximate_syntax,
        },
        aoa_lookup,
        familiarity_lookup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::LexiconKind;
    use crate::syntax::parse_bracketed;

    fn mini() -> (Lexicon, Lexicon) {
        (
            Lexicon::from_pairs(LexiconKind::Aoa, [("dog", 4.2)]).unwrap(),
            Lexicon::from_pairs(
                LexiconKind::Familiarity,
                [("dog", 3.9), ("the", 4.1), ("ran", 3.0)],
            )
            .unwrap(),
        )
    }

    fn features(cw: usize, np: usize, th: usize, unique: usize, words: usize, sents: usize) -> NerfFeatures {
        NerfFeatures {
            aoa_sum: 0.0,
            familiarity_sum: 0.0,
            content_words: cw,
            noun_phrases: np,
            tree_height_sum: th,
            unique_words: unique,
            words,
            sentences: sents,
            approximate_syntax: false,
        }
    }

    #[test]
    fn defaults_match_published() {
        let c = default_nerf_coefficients();
        assert_eq!(c.w_aoa, 0.04876);
        assert_eq!(c.w_fam, -0.1145);
        assert_eq!(c.w_cw, 0.3091);
        assert_eq!(c.w_np, 0.1866);
        assert_eq!(c.w_th, 0.2645);
        assert_eq!(c.w_ttr, 1.1017);
        assert_eq!(c.bias, -4.125);
    }

    #[test]
    fn dog_ran_fixture() {
        let (aoa, fam) = mini();
        let tree = parse_bracketed("(S (NP (DT the) (NN dog)) (VP (VBD ran)))").unwrap();
        let report = extract_features(
            "The dog ran.",
            NerfLexicons { aoa: &aoa, familiarity: &fam },
            Some(&[tree]),
            &NerfOptions::default(),
        )
        .unwrap();
        let f = report.features;
        assert_eq!((f.content_words, f.noun_phrases, f.tree_height_sum), (2, 1, 4));
        assert_eq!((f.unique_words, f.words, f.sentences), (3, 3, 1));
        assert!((f.aoa_sum - 4.2).abs() < 1e-12);
        assert!((f.familiarity_sum - 11.0).abs() < 1e-12);
        assert!(!f.approximate_syntax);
        assert_eq!(report.aoa_lookup.misses, 2);
        let s = nerf_score(&f, &default_nerf_coefficients());
        assert!((s.value - (-1.4087076253013677)).abs() < 1e-9, "{}", s.value);
        assert_eq!(s.variant, Variant::Original);
    }

    #[test]
    fn empty_lexicons_all_miss() {
        let aoa = Lexicon::empty(LexiconKind::Aoa);
        let fam = Lexicon::empty(LexiconKind::Familiarity);
        let r = extract_features(
            "Cats sleep on warm mats.",
            NerfLexicons { aoa: &aoa, familiarity: &fam },
            None,
            &NerfOptions::default(),
        )
        .unwrap();
        assert_eq!(r.features.aoa_sum, 0.0);
        assert_eq!(r.features.familiarity_sum, 0.0);
        assert_eq!(r.aoa_lookup.misses, 5);
        assert_eq!(r.familiarity_lookup.misses, 5);
        assert!(r.features.approximate_syntax);
    }

    #[test]
    fn near_empty_vector() {
        let s = nerf_score(&features(0, 0, 0, 1, 1, 1), &default_nerf_coefficients());
        assert!((s.value - (-3.0233)).abs() < 1e-12);
    }

    #[test]
    fn constant_model() {
        let c = NerfCoefficients::from_array([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 7.0]);
        for f in [features(0, 0, 0, 1, 1, 1), features(30, 9, 40, 20, 50, 4)] {
            let s = nerf_score(&f, &c);
            assert_eq!(s.value, 7.0);
            assert_eq!(s.variant, Variant::Custom);
        }
    }

    #[test]
    fn doubled_document_doubles_counts() {
        let (aoa, fam) = mini();
        let lex = NerfLexicons { aoa: &aoa, familiarity: &fam };
        let once = "The dog ran. A cat sat on the mat.";
        let twice = format!("{once} {once}");
        let a = extract_features(once, lex, None, &NerfOptions::default()).unwrap().features;
        let b = extract_features(&twice, lex, None, &NerfOptions::default()).unwrap().features;
        assert_eq!(b.words, 2 * a.words);
        assert_eq!(b.sentences, 2 * a.sentences);
        assert_eq!(b.content_words, 2 * a.content_words);
        assert_eq!(b.noun_phrases, 2 * a.noun_phrases);
        assert_eq!(b.tree_height_sum, 2 * a.tree_height_sum);
        assert!((b.aoa_sum - 2.0 * a.aoa_sum).abs() < 1e-12);
        assert_eq!(b.unique_words, a.unique_words);

        let tree = parse_bracketed("(S (NP (DT the) (NN dog)) (VP (VBD ran)))").unwrap();
        let one = extract_features("The dog ran.", lex, Some(&[tree.clone()]), &NerfOptions::default())
            .unwrap()
            .features;
        let two = extract_features(
            "The dog ran. The dog ran.",
            lex,
            Some(&[tree.clone(), tree]),
            &NerfOptions::default(),
        )
        .unwrap()
        .features;
        assert_eq!(two.sentences, 2 * one.sentences);
        assert_eq!(two.tree_height_sum, 2 * one.tree_height_sum);
        assert_eq!(two.noun_phrases, 2 * one.noun_phrases);
        assert_eq!(two.content_words, 2 * one.content_words);
    }

    #[test]
    fn leaf_mismatch_propagates() {
        let (aoa, fam) = mini();
        let tree = parse_bracketed("(NN dog)").unwrap();
        let err = extract_features(
            "The dog.",
            NerfLexicons { aoa: &aoa, familiarity: &fam },
            Some(&[tree]),
            &NerfOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, NerfError::Syntax(SyntaxError::LeafMismatch { .. })));
    }

    #[test]
    fn empty_text() {
        let (aoa, fam) = mini();
        let err = extract_features(
            "",
            NerfLexicons { aoa: &aoa, familiarity: &fam },
            None,
            &NerfOptions::default(),
        )
        .unwrap_err();
        assert_eq!(err, NerfError::Text(TextError::EmptyText));
    }

    #[test]
    fn validation() {
        assert!(features(0, 0, 0, 1, 1, 1).validate().is_ok());
        assert!(features(0, 0, 0, 1, 1, 0).validate().is_err());
        assert!(features(0, 0, 0, 2, 1, 1).validate().is_err());
        assert!(features(0, 0, 0, 0, 0, 1).validate().is_err());
        let mut f = features(0, 0, 0, 1, 1, 1);
        f.aoa_sum = f64::NAN;
        assert!(f.validate().is_err());
    }

    #[test]
    fn design_row_matches_score() {
        let mut f = features(7, 3, 19, 12, 20, 2);
        f.aoa_sum = 55.5;
        f.familiarity_sum = 40.25;
        let c = default_nerf_coefficients();
        let dot: f64 = f.design_row().iter().zip(c.to_array()).map(|(x, w)| x * w).sum();
        assert!((dot - nerf_score(&f, &c).value).abs() < 1e-12);
    }
}
