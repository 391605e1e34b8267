//! The five traditional grade-level formulas.
//!
//! | formula | value                                        |
//! |---------|----------------------------------------------|
//! | FKGL    | `a·W/S + b·Y/W + c`                          |
//! | FOGI    | `a·(W/S + b·D/W) + c`                        |
//! | SMOG    | `a·√(b·P/S) + c`                             |
//! | COLE    | `a·100·L/W + b·100·S/W + c`                  |
//! | AUTO    | `a·L/W + b·W/S + c`, ceiled for the original |
//!
//! with W words, S sentences, Y syllables, L letters, D difficult words and
//! P polysyllable words. Every formula ships with its original coefficients
//! and a set recalibrated on Common Core Appendix B story texts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::TextStats;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormulaError {
    #[error("coefficients are for {found}, expected {expected}")]
    WrongFormula { expected: Formula, found: Formula },
    #[error("SMOG radicand {0} is negative")]
    NegativeRadicand(f64),
    #[error("statistics need at least one word and one sentence")]
    EmptyStats,
    #[error("unknown formula {0:?}")]
    UnknownFormula(String),
    #[error("unknown variant {0:?}")]
    UnknownVariant(String),
    #[error("invalid coefficient document: {0}")]
    InvalidCoefficients(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formula {
    Fkgl,
    Fogi,
    Smog,
    Cole,
    Auto,
}

impl Formula {
    pub const ALL: [Formula; 5] = [
        Formula::Fkgl,
        Formula::Fogi,
        Formula::Smog,
        Formula::Cole,
        Formula::Auto,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Formula::Fkgl => "fkgl",
            Formula::Fogi => "fogi",
            Formula::Smog => "smog",
            Formula::Cole => "cole",
            Formula::Auto => "auto",
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name().to_uppercase())
    }
}

impl FromStr for Formula {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Formula::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| FormulaError::UnknownFormula(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Original,
    Adjusted,
    Custom,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Original => "original",
            Variant::Adjusted => "adjusted",
            Variant::Custom => "custom",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Variant::Original, Variant::Adjusted, Variant::Custom]
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| FormulaError::UnknownVariant(s.to_string()))
    }
}

/// The `(a, b, c)` coefficients of one traditional formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub formula: Formula,
    pub variant: Variant,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl CoefficientSet {
    pub fn custom(formula: Formula, a: f64, b: f64, c: f64) -> Self {
        CoefficientSet {
            formula,
            variant: Variant::Custom,
            a,
            b,
            c,
        }
    }

    pub fn params(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    /// Reads the JSON document `{formula, variant, a, b, c}`.
    pub fn from_json(json: &str) -> Result<Self, FormulaError> {
        let set: CoefficientSet = serde_json::from_str(json)
            .map_err(|e| FormulaError::InvalidCoefficients(e.to_string()))?;
        set.validate()?;
        Ok(set)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("coefficient set serializes")
    }

    pub fn validate(&self) -> Result<(), FormulaError> {
        if ![self.a, self.b, self.c].iter().all(|v| v.is_finite()) {
            return Err(FormulaError::InvalidCoefficients(
                "coefficients must be finite".into(),
            ));
        }
        if self.formula == Formula::Smog && self.b < 0.0 {
            return Err(FormulaError::InvalidCoefficients(
                "SMOG requires b >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Published coefficients. Adjusted values were fit on CCB story texts with
/// grade-band midpoints as targets. `Custom` has no built-in set and yields
/// the original one.
pub fn builtin_coefficients(formula: Formula, variant: Variant) -> CoefficientSet {
    let (a, b, c) = match (formula, variant) {
        (Formula::Fkgl, Variant::Adjusted) => (0.1014, 20.89, -21.94),
        (Formula::Fkgl, _) => (0.390, 11.80, -15.59),
        (Formula::Fogi, Variant::Adjusted) => (0.1229, 415.7, 1.866),
        (Formula::Fogi, _) => (0.4000, 100.0, 0.0000),
        (Formula::Smog, Variant::Adjusted) => (2.694, 8.815, 3.367),
        (Formula::Smog, _) => (1.043, 30.00, 3.129),
        (Formula::Cole, Variant::Adjusted) => (0.03993, -0.4976, -5.747),
        (Formula::Cole, _) => (0.05880, -0.2960, -15.80),
        (Formula::Auto, Variant::Adjusted) => (6.000, 0.1035, -19.61),
        (Formula::Auto, _) => (4.710, 0.5000, -21.43),
    };
    let variant = match variant {
        Variant::Custom => Variant::Original,
        v => v,
    };
    CoefficientSet {
        formula,
        variant,
        a,
        b,
        c,
    }
}

/// What produced a [`Score`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreKind {
    Nerf,
    Fkgl,
    Fogi,
    Smog,
    Cole,
    Auto,
}

impl From<Formula> for ScoreKind {
    fn from(f: Formula) -> Self {
        match f {
            Formula::Fkgl => ScoreKind::Fkgl,
            Formula::Fogi => ScoreKind::Fogi,
            Formula::Smog => ScoreKind::Smog,
            Formula::Cole => ScoreKind::Cole,
            Formula::Auto => ScoreKind::Auto,
        }
    }
}

impl ScoreKind {
    pub fn name(self) -> &'static str {
        match self {
            ScoreKind::Nerf => "nerf",
            ScoreKind::Fkgl => "fkgl",
            ScoreKind::Fogi => "fogi",
            ScoreKind::Smog => "smog",
            ScoreKind::Cole => "cole",
            ScoreKind::Auto => "auto",
        }
    }
}

/// A grade-level score. Values are not clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub value: f64,
    pub formula: ScoreKind,
    pub variant: Variant,
    /// Set when the value was ceiling-rounded (AUTO original only).
    pub rounded: bool,
}

/// The ratios the traditional formulas are built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceRatios {
    pub words_per_sentence: f64,
    pub syllables_per_word: f64,
    pub letters_per_word: f64,
    pub sentences_per_word: f64,
    pub difficult_per_word: f64,
    pub polysyllables_per_sentence: f64,
}

impl SurfaceRatios {
    pub fn from_stats(stats: &TextStats) -> Result<Self, FormulaError> {
        if stats.words == 0 || stats.sentences == 0 {
            return Err(FormulaError::EmptyStats);
        }
        let words = stats.words as f64;
        let sentences = stats.sentences as f64;
        Ok(SurfaceRatios {
            words_per_sentence: words / sentences,
            syllables_per_word: stats.syllables as f64 / words,
            letters_per_word: stats.letters as f64 / words,
            sentences_per_word: sentences / words,
            difficult_per_word: stats.difficult_words as f64 / words,
            polysyllables_per_sentence: stats.polysyllable_words as f64 / sentences,
        })
    }
}

/// Raw (un-rounded) formula value for parameters `[a, b, c]`.
pub fn raw_value(formula: Formula, r: &SurfaceRatios, [a, b, c]: [f64; 3]) -> Result<f64, FormulaError> {
    Ok(match formula {
        Formula::Fkgl => a * r.words_per_sentence + b * r.syllables_per_word + c,
        Formula::Fogi => a * (r.words_per_sentence + b * r.difficult_per_word) + c,
        Formula::Smog => {
            let radicand = b * r.polysyllables_per_sentence;
            if radicand < 0.0 {
                return Err(FormulaError::NegativeRadicand(radicand));
            }
            a * radicand.sqrt() + c
        }
        Formula::Cole => a * 100.0 * r.letters_per_word + b * 100.0 * r.sentences_per_word + c,
        Formula::Auto => a * r.letters_per_word + b * r.words_per_sentence + c,
    })
}

/// Scores `stats` with any formula; the formula is taken from `coeffs`.
pub fn score(stats: &TextStats, coeffs: &CoefficientSet) -> Result<Score, FormulaError> {
    let ratios = SurfaceRatios::from_stats(stats)?;
    let mut value = raw_value(coeffs.formula, &ratios, coeffs.params())?;
    let rounded = coeffs.formula == Formula::Auto && coeffs.variant == Variant::Original;
    if rounded {
        value = value.ceil();
    }
    Ok(Score {
        value,
        formula: coeffs.formula.into(),
        variant: coeffs.variant,
        rounded,
    })
}

fn score_as(
    expected: Formula,
    stats: &TextStats,
    coeffs: &CoefficientSet,
) -> Result<Score, FormulaError> {
    if coeffs.formula != expected {
        return Err(FormulaError::WrongFormula {
            expected,
            found: coeffs.formula,
        });
    }
    score(stats, coeffs)
}

pub fn fkgl(stats: &TextStats, coeffs: &CoefficientSet) -> Result<Score, FormulaError> {
    score_as(Formula::Fkgl, stats, coeffs)
}

pub fn fogi(stats: &TextStats, coeffs: &CoefficientSet) -> Result<Score, FormulaError> {
    score_as(Formula::Fogi, stats, coeffs)
}

pub fn smog(stats: &TextStats, coeffs: &CoefficientSet) -> Result<Score, FormulaError> {
    score_as(Formula::Smog, stats, coeffs)
}

pub fn cole(stats: &TextStats, coeffs: &CoefficientSet) -> Result<Score, FormulaError> {
    score_as(Formula::Cole, stats, coeffs)
}

/// AUTO; the original variant is ceiling-rounded, others are returned raw.
pub fn auto(stats: &TextStats, coeffs: &CoefficientSet) -> Result<Score, FormulaError> {
    score_as(Formula::Auto, stats, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(words: usize, sentences: usize) -> TextStats {
        TextStats {
            words,
            sentences,
            syllables: words,
            letters: words,
            difficult_words: 0,
            polysyllable_words: 0,
            unique_words: 1,
        }
    }

    fn orig(f: Formula) -> CoefficientSet {
        builtin_coefficients(f, Variant::Original)
    }

    fn adj(f: Formula) -> CoefficientSet {
        builtin_coefficients(f, Variant::Adjusted)
    }

    fn close(x: f64, y: f64) {
        assert!((x - y).abs() < 1e-9, "{x} != {y}");
    }

    #[test]
    fn fkgl_examples() {
        let s = TextStats { syllables: 150, ..stats(100, 10) };
        close(fkgl(&s, &orig(Formula::Fkgl)).unwrap().value, 6.01);
        close(fkgl(&s, &adj(Formula::Fkgl)).unwrap().value, 10.409);
        close(fkgl(&stats(1, 1), &orig(Formula::Fkgl)).unwrap().value, -3.40);
    }

    #[test]
    fn fogi_examples() {
        let s = TextStats { difficult_words: 10, ..stats(100, 10) };
        close(fogi(&s, &orig(Formula::Fogi)).unwrap().value, 8.0);
        close(fogi(&s, &adj(Formula::Fogi)).unwrap().value, 8.203953);
        close(fogi(&stats(10, 1), &orig(Formula::Fogi)).unwrap().value, 4.0);
    }

    #[test]
    fn smog_examples() {
        let s = TextStats { polysyllable_words: 30, ..stats(300, 30) };
        close(smog(&s, &orig(Formula::Smog)).unwrap().value, 1.043 * 30f64.sqrt() + 3.129);
        close(smog(&s, &adj(Formula::Smog)).unwrap().value, 2.694 * 8.815f64.sqrt() + 3.367);
        assert!((smog(&s, &orig(Formula::Smog)).unwrap().value - 8.8417).abs() < 1e-4);
        assert!((smog(&s, &adj(Formula::Smog)).unwrap().value - 11.3655).abs() < 1e-4);
        assert_eq!(smog(&stats(10, 2), &orig(Formula::Smog)).unwrap().value, 3.129);
    }

    #[test]
    fn smog_negative_radicand() {
        let s = TextStats { polysyllable_words: 3, ..stats(10, 2) };
        let bad = CoefficientSet::custom(Formula::Smog, 1.0, -1.0, 0.0);
        assert!(matches!(smog(&s, &bad), Err(FormulaError::NegativeRadicand(_))));
        assert!(bad.validate().is_err());
    }

    #[test]
    fn cole_examples() {
        // letters/words = 4.5, sentences/words = 0.05
        let s = TextStats { letters: 450, ..stats(100, 5) };
        close(cole(&s, &orig(Formula::Cole)).unwrap().value, 9.18);
        close(cole(&s, &adj(Formula::Cole)).unwrap().value, 9.7335);
        close(cole(&stats(7, 7), &orig(Formula::Cole)).unwrap().value, -39.52);
    }

    #[test]
    fn auto_examples() {
        // letters/words = 4.5, words/sentences = 20
        let s = TextStats { letters: 450, ..stats(100, 5) };
        let o = auto(&s, &orig(Formula::Auto)).unwrap();
        assert_eq!(o.value, 10.0);
        assert!(o.rounded);
        let a = auto(&s, &adj(Formula::Auto)).unwrap();
        close(a.value, 9.46);
        assert!(!a.rounded);
        // integral raw values are a fixed point of the ceiling
        let integral = CoefficientSet { a: 1.0, b: 1.0, c: -2.0, ..orig(Formula::Auto) };
        assert_eq!(auto(&TextStats { letters: 50, ..stats(10, 1) }, &integral).unwrap().value, 13.0);
    }

    #[test]
    fn wrong_formula() {
        let s = stats(10, 1);
        assert_eq!(
            fkgl(&s, &orig(Formula::Smog)),
            Err(FormulaError::WrongFormula { expected: Formula::Fkgl, found: Formula::Smog })
        );
        assert!(fogi(&s, &orig(Formula::Fkgl)).is_err());
        assert!(smog(&s, &orig(Formula::Cole)).is_err());
        assert!(cole(&s, &orig(Formula::Auto)).is_err());
        assert!(auto(&s, &orig(Formula::Fogi)).is_err());
    }

    #[test]
    fn empty_stats_rejected() {
        assert_eq!(score(&stats(0, 0), &orig(Formula::Fkgl)), Err(FormulaError::EmptyStats));
    }

    #[test]
    fn json_round_trip() {
        let set = adj(Formula::Cole);
        let json = set.to_json();
        assert!(json.contains("\"formula\": \"cole\""));
        assert!(json.contains("\"variant\": \"adjusted\""));
        assert_eq!(CoefficientSet::from_json(&json).unwrap(), set);
        assert!(CoefficientSet::from_json(r#"{"formula":"nope","variant":"custom","a":1,"b":1,"c":1}"#).is_err());
        assert!(CoefficientSet::from_json(r#"{"formula":"smog","variant":"custom","a":1,"b":-1,"c":1}"#).is_err());
    }

    #[test]
    fn names_parse() {
        for f in Formula::ALL {
            assert_eq!(f.name().parse::<Formula>().unwrap(), f);
        }
        assert_eq!("ADJUSTED".parse::<Variant>().unwrap(), Variant::Adjusted);
        assert!("nerf".parse::<Formula>().is_err());
    }
}
