//! Per-text request handle with the shortcut surface: `nerf`, `fkgl`,
//! `fogi`, `smog`, `cole`, `auto`, `rt`, plus long-form aliases.
//!
//! Surface statistics and NERF features are computed on first use and
//! cached. Lexicons come from an explicit [`LexiconPair`] or, failing that,
//! from the directory named by `READGAUGE_LEXICON_DIR`.

use std::cell::OnceCell;
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::calibration::CalibrationError;
use crate::corpus::CorpusError;
use crate::evaluation::EvalError;
use crate::formulas::{builtin_coefficients, score, CoefficientSet, Formula, FormulaError, Score, Variant};
use crate::lexicon::{Lexicon, LexiconColumns, LexiconError, LexiconKind, LEXICON_DIR_ENV};
use crate::nerf::{extract_from_document, nerf_score, FeatureReport, NerfCoefficients, NerfError, NerfLexicons, NerfOptions};
use crate::syntax::{ParseTree, SyntaxError};
use crate::text::{read_time, Document, StatsConfig, TextError, TextStats, STANDARD_WPM};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Nerf(#[from] NerfError),
    #[error(transparent)]
    Calibration(#[from] CalibrationError),
    #[error(transparent)]
    Evaluation(#[from] EvalError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("NERF needs lexicons: set {LEXICON_DIR_ENV} to a directory holding aoa and familiarity tables")]
    LexiconsNotConfigured,
}

pub type Result<T> = std::result::Result<T, Error>;

/// AoA and familiarity lexicons loaded together.
#[derive(Debug, Clone)]
pub struct LexiconPair {
    pub aoa: Lexicon,
    pub familiarity: Lexicon,
}

impl LexiconPair {
    pub fn load(aoa: &Path, familiarity: &Path, columns: &LexiconColumns) -> Result<Self> {
        Ok(LexiconPair {
            aoa: Lexicon::load_with_columns(aoa, LexiconKind::Aoa, columns)?,
            familiarity: Lexicon::load_with_columns(familiarity, LexiconKind::Familiarity, columns)?,
        })
    }

    pub fn from_dir(dir: &Path, columns: &LexiconColumns) -> Result<Self> {
        Ok(LexiconPair {
            aoa: Lexicon::load_from_dir(dir, LexiconKind::Aoa, columns)?,
            familiarity: Lexicon::load_from_dir(dir, LexiconKind::Familiarity, columns)?,
        })
    }

    /// Loads from `READGAUGE_LEXICON_DIR`, once per distinct directory.
    pub fn from_env() -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<PathBuf, Arc<LexiconPair>>>> = OnceLock::new();
        let dir = std::env::var_os(LEXICON_DIR_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .ok_or(Error::LexiconsNotConfigured)?;
        let cache = CACHE.get_or_init(Default::default);
        if let Some(pair) = cache.lock().unwrap().get(&dir) {
            return Ok(pair.clone());
        }
        let pair = Arc::new(Self::from_dir(&dir, &LexiconColumns::default())?);
        cache.lock().unwrap().insert(dir, pair.clone());
        Ok(pair)
    }

    pub fn as_nerf(&self) -> NerfLexicons<'_> {
        NerfLexicons {
            aoa: &self.aoa,
            familiarity: &self.familiarity,
        }
    }
}

/// One text and its lazily computed measurements.
#[derive(Debug)]
pub struct Request {
    text: String,
    lexicons: Option<Arc<LexiconPair>>,
    parses: Option<Vec<ParseTree>>,
    nerf_coefficients: NerfCoefficients,
    document: OnceCell<Document>,
    stats: OnceCell<TextStats>,
    features: OnceCell<FeatureReport>,
}

pub fn request(text: impl Into<String>) -> Request {
    Request::new(text)
}

impl Request {
    pub fn new(text: impl Into<String>) -> Self {
        Request {
            text: text.into(),
            lexicons: None,
            parses: None,
            nerf_coefficients: NerfCoefficients::default(),
            document: OnceCell::new(),
            stats: OnceCell::new(),
            features: OnceCell::new(),
        }
    }

    pub fn with_lexicons(mut self, lexicons: Arc<LexiconPair>) -> Self {
        self.lexicons = Some(lexicons);
        self.features = OnceCell::new();
        self
    }

    /// One tree per sentence; makes NERF's syntax counts exact.
    pub fn with_parses(mut self, parses: Vec<ParseTree>) -> Self {
        self.parses = Some(parses);
        self.features = OnceCell::new();
        self
    }

    pub fn with_nerf_coefficients(mut self, coefficients: NerfCoefficients) -> Self {
        self.nerf_coefficients = coefficients;
        self
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn document(&self) -> &Document {
        self.document.get_or_init(|| Document::new(&self.text))
    }

    pub fn stats(&self) -> Result<&TextStats> {
        if let Some(s) = self.stats.get() {
            return Ok(s);
        }
        let s = self.document().stats(&StatsConfig::default())?;
        Ok(self.stats.get_or_init(|| s))
    }

    pub fn features(&self) -> Result<&FeatureReport> {
        if let Some(f) = self.features.get() {
            return Ok(f);
        }
        let lexicons = match &self.lexicons {
            Some(l) => l.clone(),
            None => LexiconPair::from_env()?,
        };
        let report = extract_from_document(
            self.document(),
            lexicons.as_nerf(),
            self.parses.as_deref(),
            &NerfOptions::default(),
        )?;
        Ok(self.features.get_or_init(|| report))
    }

    pub fn score(&self, coefficients: &CoefficientSet) -> Result<Score> {
        Ok(score(self.stats()?, coefficients)?)
    }

    pub fn formula(&self, formula: Formula, adjusted: bool) -> Result<f64> {
        let variant = if adjusted { Variant::Adjusted } else { Variant::Original };
        Ok(self.score(&builtin_coefficients(formula, variant))?.value)
    }

    pub fn nerf_score(&self) -> Result<Score> {
        self.nerf_score_with(&self.nerf_coefficients)
    }

    pub fn nerf_score_with(&self, coefficients: &NerfCoefficients) -> Result<Score> {
        let report = self.features()?;
        report.features.validate()?;
        Ok(nerf_score(&report.features, coefficients))
    }

    pub fn nerf(&self) -> Result<f64> {
        Ok(self.nerf_score()?.value)
    }

    pub fn fkgl(&self, adjusted: bool) -> Result<f64> {
        self.formula(Formula::Fkgl, adjusted)
    }

    pub fn fogi(&self, adjusted: bool) -> Result<f64> {
        self.formula(Formula::Fogi, adjusted)
    }

    pub fn smog(&self, adjusted: bool) -> Result<f64> {
        self.formula(Formula::Smog, adjusted)
    }

    pub fn cole(&self, adjusted: bool) -> Result<f64> {
        self.formula(Formula::Cole, adjusted)
    }

    pub fn auto(&self, adjusted: bool) -> Result<f64> {
        self.formula(Formula::Auto, adjusted)
    }

    /// Reading time in minutes.
    pub fn rt(&self, wpm: f64) -> Result<f64> {
        Ok(read_time(self.stats()?, wpm)?)
    }

    /// Reading time at the default 240 words per minute.
    pub fn rt_default(&self) -> Result<f64> {
        self.rt(STANDARD_WPM[1])
    }

    pub fn new_english_readability_formula(&self) -> Result<f64> {
        self.nerf()
    }

    pub fn flesch_kincaid_grade_level(&self, adjusted: bool) -> Result<f64> {
        self.fkgl(adjusted)
    }

    pub fn fog_index(&self, adjusted: bool) -> Result<f64> {
        self.fogi(adjusted)
    }

    pub fn smog_index(&self, adjusted: bool) -> Result<f64> {
        self.smog(adjusted)
    }

    pub fn coleman_liau_index(&self, adjusted: bool) -> Result<f64> {
        self.cole(adjusted)
    }

    pub fn automated_readability_index(&self, adjusted: bool) -> Result<f64> {
        self.auto(adjusted)
    }

    pub fn read_time(&self, wpm: f64) -> Result<f64> {
        self.rt(wpm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexicons() -> Arc<LexiconPair> {
        Arc::new(LexiconPair {
            aoa: Lexicon::from_pairs(LexiconKind::Aoa, [("cat", 3.0), ("sat", 4.0)]).unwrap(),
            familiarity: Lexicon::from_pairs(LexiconKind::Familiarity, [("cat", 2.5), ("the", 4.0)]).unwrap(),
        })
    }

    #[test]
    fn shortcuts_match_aliases() {
        let r = request("The cat sat on the mat. It was a remarkably comfortable afternoon.").with_lexicons(lexicons());
        for adjusted in [false, true] {
            assert_eq!(r.fkgl(adjusted).unwrap(), r.flesch_kincaid_grade_level(adjusted).unwrap());
            assert_eq!(r.fogi(adjusted).unwrap(), r.fog_index(adjusted).unwrap());
            assert_eq!(r.smog(adjusted).unwrap(), r.smog_index(adjusted).unwrap());
            assert_eq!(r.cole(adjusted).unwrap(), r.coleman_liau_index(adjusted).unwrap());
            assert_eq!(r.auto(adjusted).unwrap(), r.automated_readability_index(adjusted).unwrap());
        }
        assert_eq!(r.nerf().unwrap(), r.new_english_readability_formula().unwrap());
        assert_eq!(r.rt(240.0).unwrap(), r.read_time(240.0).unwrap());
        assert_eq!(r.rt_default().unwrap(), r.rt(240.0).unwrap());
    }

    #[test]
    fn matches_library_calls() {
        let text = "Dogs bark loudly. Cats, however, prefer quiet evenings indoors.";
        let r = request(text).with_lexicons(lexicons());
        let stats = crate::text::text_stats(text).unwrap();
        let direct = score(&stats, &builtin_coefficients(Formula::Cole, Variant::Adjusted)).unwrap();
        assert_eq!(r.cole(true).unwrap(), direct.value);
        assert_eq!(r.stats().unwrap(), &stats);
    }

    #[test]
    fn empty_text_errors() {
        let r = request("  ...  ");
        assert!(matches!(r.fkgl(true), Err(Error::Text(TextError::EmptyText))));
        assert!(matches!(r.rt(0.0), Err(Error::Text(_))));
    }
}
