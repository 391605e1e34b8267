//! Coefficient calibration against a labeled corpus.
//!
//! Traditional formulas are fit by Levenberg–Marquardt on their raw
//! (un-rounded) value with analytic Jacobians; NERF is linear in its seven
//! weights and is solved directly from the normal equations.

pub mod lm;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::LabeledCorpus;
use crate::formulas::{raw_value, CoefficientSet, Formula, FormulaError, SurfaceRatios, Variant};
use crate::nerf::{NerfCoefficients, NerfFeatures};
use crate::text::{Document, StatsConfig, TextStats};

pub use lm::{LmConfig, StopReason};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalibrationError {
    #[error("unknown grade band {0:?}")]
    UnknownBand(String),
    #[error("{items} items cannot determine {params} parameters")]
    TooFewItems { items: usize, params: usize },
    #[error("item {id:?}: {reason}")]
    NonFiniteStats { id: String, reason: String },
    #[error("fit diverged: residuals became non-finite")]
    DivergedFit,
    #[error("{features} feature rows for {labels} labels")]
    LengthMismatch { features: usize, labels: usize },
    #[error("design matrix is rank deficient; ridge solution attached")]
    RankDeficient(Box<FitResult<NerfCoefficients>>),
}

/// CCB grade bands and the grade each stands for.
pub const GRADE_BANDS: [(&str, f64); 6] = [
    ("K1", 1.0),
    ("K2-3", 2.5),
    ("K4-5", 4.5),
    ("K6-8", 7.0),
    ("K9-10", 9.5),
    ("K11-CCR", 12.0),
];

/// Converts a band label (`K2-3`) or numeric grade (`7`, `K7.0`) to a grade.
pub fn grade_band_to_midpoint(band: &str) -> Result<f64, CalibrationError> {
    let trimmed = band.trim();
    if let Some((_, grade)) = GRADE_BANDS
        .iter()
        .find(|(name, _)| name.eq_ignore_ascii_case(trimmed))
    {
        return Ok(*grade);
    }
    let numeric = trimmed
        .strip_prefix(['K', 'k'])
        .unwrap_or(trimmed)
        .parse::<f64>()
        .ok()
        .filter(|g| g.is_finite());
    numeric.ok_or_else(|| CalibrationError::UnknownBand(band.to_string()))
}

/// The band whose grade range contains `grade`.
pub fn band_for_grade(grade: f64) -> &'static str {
    match grade {
        g if g < 2.0 => "K1",
        g if g < 4.0 => "K2-3",
        g if g < 6.0 => "K4-5",
        g if g < 9.0 => "K6-8",
        g if g < 11.0 => "K9-10",
        _ => "K11-CCR",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult<C> {
    pub coefficients: C,
    pub residual_sum_squares: f64,
    pub initial_rss: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `‖Jᵀr‖∞` at the returned point.
    pub gradient_norm: f64,
}

/// Partial derivatives of a formula's raw value with respect to `(a, b, c)`.
pub fn formula_jacobian(formula: Formula, r: &SurfaceRatios, [a, b, _c]: [f64; 3]) -> [f64; 3] {
    match formula {
        Formula::Fkgl => [r.words_per_sentence, r.syllables_per_word, 1.0],
        Formula::Fogi => [
            r.words_per_sentence + b * r.difficult_per_word,
            a * r.difficult_per_word,
            1.0,
        ],
        Formula::Smog => {
            let x = r.polysyllables_per_sentence;
            let root = (b * x).max(0.0).sqrt();
            // d/db a·√(b·x) = a·x / (2√(b·x)); at b·x = 0 use a tiny floor
            let db = if x == 0.0 {
                0.0
            } else {
                a * x / (2.0 * root.max(1e-12))
            };
            [root, db, 1.0]
        }
        Formula::Cole => [100.0 * r.letters_per_word, 100.0 * r.sentences_per_word, 1.0],
        Formula::Auto => [r.letters_per_word, r.words_per_sentence, 1.0],
    }
}

struct FormulaProblem<'a> {
    formula: Formula,
    ratios: &'a [SurfaceRatios],
    targets: &'a [f64],
}

impl lm::Problem for FormulaProblem<'_> {
    fn residuals(&self, p: &DVector<f64>) -> DVector<f64> {
        let params = [p[0], p[1], p[2]];
        DVector::from_iterator(
            self.ratios.len(),
            self.ratios.iter().zip(self.targets).map(|(r, y)| {
                raw_value(self.formula, r, params).unwrap_or(f64::NAN) - y
            }),
        )
    }

    fn jacobian(&self, p: &DVector<f64>) -> DMatrix<f64> {
        let params = [p[0], p[1], p[2]];
        let mut jac = DMatrix::zeros(self.ratios.len(), 3);
        for (i, r) in self.ratios.iter().enumerate() {
            for (j, d) in formula_jacobian(self.formula, r, params).into_iter().enumerate() {
                jac[(i, j)] = d;
            }
        }
        jac
    }

    fn project(&self, p: &mut DVector<f64>) {
        if self.formula == Formula::Smog {
            p[1] = p[1].max(0.0);
        }
    }
}

/// Fits `(a, b, c)` to precomputed surface ratios.
pub fn fit_formula_ratios(
    ratios: &[SurfaceRatios],
    targets: &[f64],
    init: &CoefficientSet,
    config: &LmConfig,
) -> Result<FitResult<CoefficientSet>, CalibrationError> {
    if ratios.len() != targets.len() {
        return Err(CalibrationError::LengthMismatch {
            features: ratios.len(),
            labels: targets.len(),
        });
    }
    if ratios.len() < 3 {
        return Err(CalibrationError::TooFewItems {
            items: ratios.len(),
            params: 3,
        });
    }
    let problem = FormulaProblem {
        formula: init.formula,
        ratios,
        targets,
    };
    let out = lm::minimize(&problem, DVector::from_row_slice(&init.params()), config);
    if !out.rss.is_finite() || out.stop == StopReason::NonFinite {
        return Err(CalibrationError::DivergedFit);
    }
    Ok(FitResult {
        coefficients: CoefficientSet {
            formula: init.formula,
            variant: Variant::Custom,
            a: out.params[0],
            b: out.params[1],
            c: out.params[2],
        },
        residual_sum_squares: out.rss,
        initial_rss: out.initial_rss,
        iterations: out.iterations,
        converged: out.converged,
        gradient_norm: out.gradient_norm,
    })
}

/// Fits from surface statistics.
pub fn fit_formula_stats(
    stats: &[TextStats],
    targets: &[f64],
    init: &CoefficientSet,
) -> Result<FitResult<CoefficientSet>, CalibrationError> {
    let ratios = stats
        .iter()
        .enumerate()
        .map(|(i, s)| {
            SurfaceRatios::from_stats(s).map_err(|e: FormulaError| CalibrationError::NonFiniteStats {
                id: i.to_string(),
                reason: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    fit_formula_ratios(&ratios, targets, init, &LmConfig::default())
}

/// Grade targets of a corpus.
pub fn corpus_targets(corpus: &LabeledCorpus) -> Result<Vec<f64>, CalibrationError> {
    corpus
        .items
        .iter()
        .map(|item| grade_band_to_midpoint(&item.label))
        .collect()
}

/// Surface statistics of every corpus item.
pub fn corpus_stats(corpus: &LabeledCorpus, config: &StatsConfig) -> Result<Vec<TextStats>, CalibrationError> {
    corpus
        .items
        .iter()
        .map(|item| {
            Document::new(&item.text)
                .stats(config)
                .map_err(|e| CalibrationError::NonFiniteStats {
                    id: item.id.clone(),
                    reason: e.to_string(),
                })
        })
        .collect()
}

/// Fits `formula` on `corpus`, starting from `init` (the original
/// coefficients when `None`).
pub fn fit_formula(
    corpus: &LabeledCorpus,
    formula: Formula,
    init: Option<&CoefficientSet>,
) -> Result<FitResult<CoefficientSet>, CalibrationError> {
    if corpus.len() < 3 {
        return Err(CalibrationError::TooFewItems {
            items: corpus.len(),
            params: 3,
        });
    }
    let default_init = crate::formulas::builtin_coefficients(formula, Variant::Original);
    let init = CoefficientSet {
        formula,
        ..*init.unwrap_or(&default_init)
    };
    let targets = corpus_targets(corpus)?;
    let stats = corpus_stats(corpus, &StatsConfig::default())?;
    let ratios = stats
        .iter()
        .zip(&corpus.items)
        .map(|(s, item)| {
            SurfaceRatios::from_stats(s).map_err(|e| CalibrationError::NonFiniteStats {
                id: item.id.clone(),
                reason: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    fit_formula_ratios(&ratios, &targets, &init, &LmConfig::default())
}

/// Ridge strength used when the NERF design matrix is rank deficient.
pub const RIDGE_LAMBDA: f64 = 1e-9;

/// Fits NERF's seven weights by linear least squares. The model is linear,
/// so `init` only matters for reporting the initial RSS.
pub fn fit_nerf(
    features: &[NerfFeatures],
    targets: &[f64],
    init: &NerfCoefficients,
) -> Result<FitResult<NerfCoefficients>, CalibrationError> {
    const P: usize = 7;
    if features.len() != targets.len() {
        return Err(CalibrationError::LengthMismatch {
            features: features.len(),
            labels: targets.len(),
        });
    }
    if features.len() < P {
        return Err(CalibrationError::TooFewItems {
            items: features.len(),
            params: P,
        });
    }
    for (i, f) in features.iter().enumerate() {
        if let Err(e) = f.validate() {
            return Err(CalibrationError::NonFiniteStats {
                id: i.to_string(),
                reason: e.to_string(),
            });
        }
    }
    let n = features.len();
    let design = DMatrix::from_fn(n, P, |i, j| features[i].design_row()[j]);
    let y = DVector::from_row_slice(targets);

    // equilibrate columns so the rank test and solve are scale-free
    let col_scale: Vec<f64> = (0..P)
        .map(|j| {
            let norm = design.column(j).norm();
            if norm > 0.0 {
                1.0 / norm
            } else {
                1.0
            }
        })
        .collect();
    let scaled = DMatrix::from_fn(n, P, |i, j| design[(i, j)] * col_scale[j]);
    let singular = scaled.clone().singular_values();
    let max_sv = singular.max();
    let rank_deficient = singular.iter().any(|&s| s <= max_sv * 1e-10);

    let mut normal = scaled.transpose() * &scaled;
    let rhs = scaled.transpose() * &y;
    if rank_deficient {
        for i in 0..P {
            normal[(i, i)] += RIDGE_LAMBDA;
        }
    }
    let solved = normal
        .clone()
        .cholesky()
        .map(|c| c.solve(&rhs))
        .or_else(|| normal.lu().solve(&rhs))
        .ok_or(CalibrationError::DivergedFit)?;
    let weights: [f64; P] = std::array::from_fn(|j| solved[j] * col_scale[j]);

    let rss_at = |w: &[f64; P]| -> f64 {
        features
            .iter()
            .zip(targets)
            .map(|(f, y)| {
                let pred: f64 = f.design_row().iter().zip(w).map(|(x, w)| x * w).sum();
                (pred - y).powi(2)
            })
            .sum()
    };
    let rss = rss_at(&weights);
    if !rss.is_finite() {
        return Err(CalibrationError::DivergedFit);
    }
    let residual = &design * DVector::from_row_slice(&weights) - &y;
    let gradient_norm = (design.transpose() * residual).amax();
    let result = FitResult {
        coefficients: NerfCoefficients::from_array(weights),
        residual_sum_squares: rss,
        initial_rss: rss_at(&init.to_array()),
        iterations: 1,
        converged: !rank_deficient,
        gradient_norm,
    };
    if rank_deficient {
        Err(CalibrationError::RankDeficient(Box::new(result)))
    } else {
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::builtin_coefficients;

    #[test]
    fn band_midpoints() {
        assert_eq!(grade_band_to_midpoint("K2-3").unwrap(), 2.5);
        assert_eq!(grade_band_to_midpoint("K11-CCR").unwrap(), 12.0);
        assert_eq!(grade_band_to_midpoint("k1").unwrap(), 1.0);
        assert_eq!(grade_band_to_midpoint("7").unwrap(), 7.0);
        assert_eq!(grade_band_to_midpoint("K9.5").unwrap(), 9.5);
        assert_eq!(
            grade_band_to_midpoint("K13-14"),
            Err(CalibrationError::UnknownBand("K13-14".into()))
        );
        assert!(grade_band_to_midpoint("nan").is_err());
        assert!(grade_band_to_midpoint("").is_err());
    }

    #[test]
    fn band_round_trip() {
        for (band, grade) in GRADE_BANDS {
            assert_eq!(band_for_grade(grade_band_to_midpoint(band).unwrap()), band);
            assert_eq!(grade_band_to_midpoint(band_for_grade(grade)).unwrap(), grade);
        }
    }

    fn ratios(wps: f64, spw: f64) -> SurfaceRatios {
        SurfaceRatios {
            words_per_sentence: wps,
            syllables_per_word: spw,
            letters_per_word: 4.0 + spw,
            sentences_per_word: 1.0 / wps,
            difficult_per_word: spw - 1.0,
            polysyllables_per_sentence: wps * (spw - 1.0),
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let r = ratios(12.0, 1.4);
        for formula in Formula::ALL {
            let p = builtin_coefficients(formula, Variant::Adjusted).params();
            let analytic = formula_jacobian(formula, &r, p);
            for j in 0..3 {
                let h = 1e-6 * p[j].abs().max(1.0);
                let mut hi = p;
                let mut lo = p;
                hi[j] += h;
                lo[j] -= h;
                let fd = (raw_value(formula, &r, hi).unwrap() - raw_value(formula, &r, lo).unwrap()) / (2.0 * h);
                assert!(
                    (fd - analytic[j]).abs() <= 1e-6 * fd.abs().max(1.0),
                    "{formula} param {j}: fd {fd} vs analytic {}",
                    analytic[j]
                );
            }
        }
    }

    #[test]
    fn exact_fkgl_recovery_from_original() {
        let rs: Vec<_> = (0..20)
            .map(|i| ratios(5.0 + i as f64 * 1.3, 1.1 + (i * 7 % 11) as f64 * 0.07))
            .collect();
        let gen = builtin_coefficients(Formula::Fkgl, Variant::Original);
        let ys: Vec<f64> = rs.iter().map(|r| raw_value(Formula::Fkgl, r, gen.params()).unwrap()).collect();
        let fit = fit_formula_ratios(&rs, &ys, &gen, &LmConfig::default()).unwrap();
        for (got, want) in fit.coefficients.params().iter().zip(gen.params()) {
            assert!((got - want).abs() < 1e-6);
        }
        assert_eq!(fit.coefficients.variant, Variant::Custom);
    }

    #[test]
    fn too_few_items() {
        let rs = vec![ratios(10.0, 1.2), ratios(12.0, 1.5)];
        let init = builtin_coefficients(Formula::Fkgl, Variant::Original);
        assert_eq!(
            fit_formula_ratios(&rs, &[1.0, 2.0], &init, &LmConfig::default()),
            Err(CalibrationError::TooFewItems { items: 2, params: 3 })
        );
        let corpus = LabeledCorpus::default();
        assert!(matches!(
            fit_formula(&corpus, Formula::Fkgl, None),
            Err(CalibrationError::TooFewItems { .. })
        ));
    }

    #[test]
    fn smog_b_projected_nonnegative() {
        // targets decreasing in polysyllables push b below zero without the bound
        let rs: Vec<_> = (1..12).map(|i| ratios(10.0, 1.0 + i as f64 * 0.05)).collect();
        let ys: Vec<f64> = rs.iter().map(|r| 10.0 - r.polysyllables_per_sentence).collect();
        let init = builtin_coefficients(Formula::Smog, Variant::Original);
        let fit = fit_formula_ratios(&rs, &ys, &init, &LmConfig::default()).unwrap();
        assert!(fit.coefficients.b >= 0.0);
        assert!(fit.residual_sum_squares <= fit.initial_rss);
    }

    #[test]
    fn nonfinite_residuals_diverge() {
        let rs = vec![ratios(10.0, 1.2), ratios(12.0, 1.5), ratios(8.0, 1.1)];
        let init = builtin_coefficients(Formula::Fkgl, Variant::Original);
        assert_eq!(
            fit_formula_ratios(&rs, &[1.0, f64::NAN, 2.0], &init, &LmConfig::default()),
            Err(CalibrationError::DivergedFit)
        );
    }

    fn nerf_features(i: usize) -> NerfFeatures {
        let k = i as f64;
        NerfFeatures {
            aoa_sum: 40.0 + (k * 37.0) % 90.0,
            familiarity_sum: 20.0 + (k * 53.0) % 70.0,
            content_words: 5 + (i * 7) % 13,
            noun_phrases: 1 + (i * 5) % 7,
            tree_height_sum: 6 + (i * 11) % 17,
            unique_words: 10 + (i * 3) % 9,
            words: 30 + (i * 13) % 40,
            sentences: 1 + i % 3,
            approximate_syntax: false,
        }
    }

    #[test]
    fn nerf_exact_linear_recovery() {
        let feats: Vec<_> = (0..30).map(nerf_features).collect();
        let truth = NerfCoefficients::default();
        let ys: Vec<f64> = feats.iter().map(|f| crate::nerf::nerf_score(f, &truth).value).collect();
        let init = NerfCoefficients::from_array([0.0; 7]);
        let fit = fit_nerf(&feats, &ys, &init).unwrap();
        for (got, want) in fit.coefficients.to_array().iter().zip(truth.to_array()) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
        assert!(fit.residual_sum_squares < 1e-18);
        assert!(fit.residual_sum_squares <= fit.initial_rss);
    }

    #[test]
    fn nerf_identical_rows_rank_deficient() {
        let feats = vec![nerf_features(3); 10];
        let ys: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let mean = 4.5;
        match fit_nerf(&feats, &ys, &NerfCoefficients::default()) {
            Err(CalibrationError::RankDeficient(fit)) => {
                let pred: f64 = feats[0]
                    .design_row()
                    .iter()
                    .zip(fit.coefficients.to_array())
                    .map(|(x, w)| x * w)
                    .sum();
                assert!((pred - mean).abs() < 1e-6, "{pred}");
                assert!(!fit.converged);
            }
            other => panic!("expected RankDeficient, got {other:?}"),
        }
    }

    #[test]
    fn nerf_too_few_items() {
        let feats: Vec<_> = (0..6).map(nerf_features).collect();
        assert_eq!(
            fit_nerf(&feats, &[1.0; 6], &NerfCoefficients::default()),
            Err(CalibrationError::TooFewItems { items: 6, params: 7 })
        );
    }
}
