//! Regression metrics, simplification-ranking accuracy, and the two
//! feature-generalizability point schemes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::corpus::PairedGroup;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("length mismatch: {pred} predictions vs {truth} targets")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("truth values are constant; r² is undefined")]
    ConstantTruth,
    #[error("series is constant; correlation is undefined")]
    ConstantSeries,
    #[error("no groups to rank")]
    EmptyGroups,
    #[error("no pairs to compare")]
    EmptyPairs,
    #[error("group {id:?} has {versions} version(s); at least 2 required")]
    ShortGroup { id: String, versions: usize },
    #[error("cannot read {path}: {source}")]
    Unreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    Malformed {
        path: PathBuf,
        line: u64,
        reason: String,
    },
}

fn check_lengths(pred: &[f64], truth: &[f64]) -> Result<(), EvalError> {
    if pred.len() != truth.len() {
        return Err(EvalError::LengthMismatch {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    Ok(())
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn mae(pred: &[f64], truth: &[f64]) -> Result<f64, EvalError> {
    check_lengths(pred, truth)?;
    Ok(pred.iter().zip(truth).map(|(p, t)| (p - t).abs()).sum::<f64>() / pred.len() as f64)
}

/// Coefficient of determination of `pred` against `truth`; negative when
/// worse than predicting the mean.
pub fn r2_score(pred: &[f64], truth: &[f64]) -> Result<f64, EvalError> {
    check_lengths(pred, truth)?;
    let m = mean(truth);
    let ss_tot: f64 = truth.iter().map(|t| (t - m).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(EvalError::ConstantTruth);
    }
    let ss_res: f64 = pred.iter().zip(truth).map(|(p, t)| (t - p).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
    check_lengths(x, y)?;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EvalError::ConstantSeries);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Strictly decreasing along hard → easy. Ties and NaN are incorrect.
pub fn group_correct(scores: &[f64]) -> bool {
    scores.windows(2).all(|w| w[0] > w[1])
}

/// Fraction of score sequences that are strictly decreasing.
pub fn rank_accuracy_from_scores(groups: &[Vec<f64>]) -> Result<f64, EvalError> {
    if groups.is_empty() {
        return Err(EvalError::EmptyGroups);
    }
    let correct = groups.iter().filter(|s| group_correct(s)).count();
    Ok(correct as f64 / groups.len() as f64)
}

fn check_groups(groups: &[PairedGroup]) -> Result<(), EvalError> {
    if groups.is_empty() {
        return Err(EvalError::EmptyGroups);
    }
    match groups.iter().find(|g| g.versions.len() < 2) {
        Some(g) => Err(EvalError::ShortGroup {
            id: g.id.clone(),
            versions: g.versions.len(),
        }),
        None => Ok(()),
    }
}

/// k-way ranking accuracy: a group counts when every version scores strictly
/// higher than the next simpler one.
pub fn rank_accuracy<F>(groups: &[PairedGroup], mut scorer: F) -> Result<f64, EvalError>
where
    F: FnMut(&str) -> f64,
{
    check_groups(groups)?;
    let scores: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| g.versions.iter().map(|v| scorer(v)).collect())
        .collect();
    rank_accuracy_from_scores(&scores)
}

/// Fraction of `(hard, easy)` score pairs with `hard > easy`.
pub fn pairwise_accuracy_from_scores(pairs: &[(f64, f64)]) -> Result<f64, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::EmptyPairs);
    }
    let correct = pairs.iter().filter(|(h, e)| h > e).count();
    Ok(correct as f64 / pairs.len() as f64)
}

pub fn pairwise_accuracy<F>(pairs: &[(&str, &str)], mut scorer: F) -> Result<f64, EvalError>
where
    F: FnMut(&str) -> f64,
{
    let scored: Vec<(f64, f64)> = pairs.iter().map(|(h, e)| (scorer(h), scorer(e))).collect();
    pairwise_accuracy_from_scores(&scored)
}

/// Every `(harder, simpler)` combination within each group.
pub fn pairs_from_groups(groups: &[PairedGroup]) -> Result<Vec<(&str, &str)>, EvalError> {
    check_groups(groups)?;
    let mut pairs = Vec::new();
    for g in groups {
        for (i, hard) in g.versions.iter().enumerate() {
            for easy in &g.versions[i + 1..] {
                pairs.push((hard.as_str(), easy.as_str()));
            }
        }
    }
    Ok(pairs)
}

/// Absolute correlations, features × datasets.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub features: Vec<String>,
    pub datasets: Vec<String>,
    /// `values[feature][dataset]`
    pub values: Vec<Vec<f64>>,
}

impl FeatureTable {
    /// Builds a table, taking absolute values. Entries must lie in [−1, 1].
    pub fn new(features: Vec<String>, datasets: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self, String> {
        if values.len() != features.len() {
            return Err(format!("{} rows for {} features", values.len(), features.len()));
        }
        let mut abs = Vec::with_capacity(values.len());
        for (name, row) in features.iter().zip(values) {
            if row.len() != datasets.len() {
                return Err(format!("{name}: {} values for {} datasets", row.len(), datasets.len()));
            }
            if let Some(v) = row.iter().find(|v| !(v.is_finite() && v.abs() <= 1.0)) {
                return Err(format!("{name}: correlation {v} outside [-1, 1]"));
            }
            abs.push(row.into_iter().map(f64::abs).collect());
        }
        Ok(FeatureTable {
            features,
            datasets,
            values: abs,
        })
    }

    /// Reads a delimited matrix: first column feature names, header row
    /// dataset names. Tab-delimited for `.tsv` or a tab in the header.
    pub fn load(path: &Path) -> Result<Self, EvalError> {
        let raw = fs::read_to_string(path).map_err(|source| EvalError::Unreadable {
            path: path.to_path_buf(),
            source,
        })?;
        let malformed = |line: u64, reason: String| EvalError::Malformed {
            path: path.to_path_buf(),
            line,
            reason,
        };
        let tsv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("tsv"))
            || raw.lines().next().is_some_and(|h| h.contains('\t'));
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(if tsv { b'\t' } else { b',' })
            .from_reader(raw.as_bytes());
        let headers = reader.headers().map_err(|e| malformed(1, e.to_string()))?;
        let datasets: Vec<String> = headers.iter().skip(1).map(|h| h.trim().to_string()).collect();
        if datasets.is_empty() {
            return Err(malformed(1, "no dataset columns".into()));
        }
        let (mut features, mut values) = (Vec::new(), Vec::new());
        for record in reader.records() {
            let record = record.map_err(|e| malformed(e.position().map_or(0, |p| p.line()), e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line());
            let mut fields = record.iter();
            let name = fields.next().unwrap_or_default().trim().to_string();
            let row = fields
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|_| malformed(line, format!("{name}: not a number: {f:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let table_row = FeatureTable::new(vec![name.clone()], datasets.clone(), vec![row])
                .map_err(|reason| malformed(line, reason))?;
            features.push(name);
            values.extend(table_row.values);
        }
        if features.is_empty() {
            return Err(malformed(1, "no feature rows".into()));
        }
        Ok(FeatureTable {
            features,
            datasets,
            values,
        })
    }

    /// 1-based rank of every feature within dataset `d`: descending
    /// correlation, ties by feature name.
    pub fn ranks(&self, d: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.features.len()).collect();
        order.sort_by(|&i, &j| {
            self.values[j][d]
                .total_cmp(&self.values[i][d])
                .then_with(|| self.features[i].cmp(&self.features[j]))
        });
        let mut ranks = vec![0; order.len()];
        for (pos, &i) in order.iter().enumerate() {
            ranks[i] = pos + 1;
        }
        ranks
    }
}

/// Points for a rank: 1–10 earn 10, 11–20 earn 9, …, 91–100 earn 1.
pub fn approach_a_points(rank: usize) -> u32 {
    match rank {
        1..=100 => 10 - ((rank - 1) / 10) as u32,
        _ => 0,
    }
}

/// Points for a correlation: `[k/10, (k+1)/10)` earns `k + 1`, 1.0 earns 10.
pub fn approach_b_points(r: f64) -> u32 {
    let r = r.abs();
    (1..10u32)
        .rev()
        .find(|&k| r >= k as f64 / 10.0)
        .map_or(1, |k| k + 1)
}

pub fn approach_a_scores(table: &FeatureTable) -> BTreeMap<String, u32> {
    let mut totals: BTreeMap<String, u32> = table.features.iter().map(|f| (f.clone(), 0)).collect();
    for d in 0..table.datasets.len() {
        for (i, rank) in table.ranks(d).into_iter().enumerate() {
            *totals.get_mut(&table.features[i]).unwrap() += approach_a_points(rank);
        }
    }
    totals
}

pub fn approach_b_scores(table: &FeatureTable) -> BTreeMap<String, u32> {
    table
        .features
        .iter()
        .zip(&table.values)
        .map(|(f, row)| (f.clone(), row.iter().map(|&r| approach_b_points(r)).sum()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn mae_examples() {
        assert_eq!(mae(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mae(&[1.0, 3.0], &[2.0, 2.0]).unwrap(), 1.0);
        assert!(matches!(
            mae(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(EvalError::LengthMismatch { pred: 2, truth: 3 })
        ));
        assert!(matches!(mae(&[], &[]), Err(EvalError::EmptyInput)));
    }

    #[test]
    fn r2_examples() {
        let t = [1.0, 2.0, 3.0];
        assert_eq!(r2_score(&t, &t).unwrap(), 1.0);
        assert_eq!(r2_score(&[2.0; 3], &t).unwrap(), 0.0);
        assert_eq!(r2_score(&[0.0; 3], &t).unwrap(), -6.0);
        assert!(matches!(r2_score(&t, &[4.0; 3]), Err(EvalError::ConstantTruth)));
    }

    #[test]
    fn pearson_examples() {
        let x = [1.0, 2.0, 3.0, 5.0];
        let lin: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!(close(pearson_r(&x, &lin).unwrap(), 1.0));
        assert!(close(pearson_r(&x, &neg).unwrap(), -1.0));
        assert!(close(pearson_r(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap(), 0.5));
        assert!(matches!(pearson_r(&x, &[1.0; 4]), Err(EvalError::ConstantSeries)));
    }

    fn group(id: &str, versions: &[&str]) -> PairedGroup {
        PairedGroup {
            id: id.into(),
            versions: versions.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn ranking_examples() {
        assert!(group_correct(&[9.0, 5.0, 2.0]));
        assert!(!group_correct(&[9.0, 9.0, 2.0]));
        assert!(!group_correct(&[9.0, f64::NAN, 2.0]));

        let groups = vec![group("a", &["ccc", "bb", "a"]), group("b", &["dddd", "dd"])];
        let len = |s: &str| s.len() as f64;
        assert_eq!(rank_accuracy(&groups, len).unwrap(), 1.0);
        assert_eq!(rank_accuracy(&groups, |s| -len(s)).unwrap(), 0.0);
        assert!(matches!(rank_accuracy(&[], len), Err(EvalError::EmptyGroups)));
        assert!(matches!(
            rank_accuracy(&[group("c", &["x"])], len),
            Err(EvalError::ShortGroup { versions: 1, .. })
        ));
    }

    #[test]
    fn pairwise_examples() {
        let pairs = [("long text", "short"), ("longer", "tiny")];
        let len = |s: &str| s.len() as f64;
        assert_eq!(pairwise_accuracy(&pairs, len).unwrap(), 1.0);
        let reversed: Vec<_> = pairs.iter().map(|&(h, e)| (e, h)).collect();
        assert_eq!(pairwise_accuracy(&reversed, len).unwrap(), 0.0);
        let half = [("long text", "short"), ("tiny", "longer")];
        assert_eq!(pairwise_accuracy(&half, len).unwrap(), 0.5);
        assert_eq!(pairwise_accuracy_from_scores(&[(1.0, 1.0)]).unwrap(), 0.0);
        assert!(matches!(pairwise_accuracy(&[], len), Err(EvalError::EmptyPairs)));

        let g = vec![group("a", &["3", "2", "1"])];
        assert_eq!(pairs_from_groups(&g).unwrap(), vec![("3", "2"), ("3", "1"), ("2", "1")]);
    }

    #[test]
    fn approach_a_rule() {
        let total: u32 = [5, 15, 95, 120, 101].into_iter().map(approach_a_points).sum();
        assert_eq!(total, 20);
        assert_eq!(approach_a_points(1), 10);
        assert_eq!(approach_a_points(10), 10);
        assert_eq!(approach_a_points(11), 9);
        assert_eq!(approach_a_points(100), 1);
        assert_eq!(approach_a_points(0), 0);
    }

    #[test]
    fn approach_b_bands() {
        assert_eq!(approach_b_points(0.95), 10);
        assert_eq!(approach_b_points(1.0), 10);
        assert_eq!(approach_b_points(0.9), 10);
        assert_eq!(approach_b_points(0.85), 9);
        assert_eq!(approach_b_points(0.1), 2);
        assert_eq!(approach_b_points(0.09), 1);
        assert_eq!(approach_b_points(0.05), 1);
        assert_eq!(approach_b_points(0.0), 1);
        for k in 1..10 {
            assert_eq!(approach_b_points(k as f64 / 10.0), k + 1);
            assert_eq!(approach_b_points(format!("0.{k}").parse().unwrap()), k + 1);
        }
        assert_eq!(approach_b_points(0.95) + approach_b_points(0.85) + approach_b_points(0.05), 20);
    }

    #[test]
    fn ranks_break_ties_by_name() {
        let t = FeatureTable::new(
            vec!["b".into(), "a".into(), "c".into()],
            vec!["d1".into()],
            vec![vec![0.5], vec![0.5], vec![-0.7]],
        )
        .unwrap();
        assert_eq!(t.ranks(0), vec![3, 2, 1]);
        assert!(FeatureTable::new(vec!["x".into()], vec!["d".into()], vec![vec![1.5]]).is_err());
    }

    #[test]
    fn table_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        fs::write(&path, "feature,ose,wb\nf1,0.5,-0.2\nf2,0.3,0.9\n").unwrap();
        let t = FeatureTable::load(&path).unwrap();
        assert_eq!(t.datasets, ["ose", "wb"]);
        assert_eq!(t.values[0], [0.5, 0.2]);
        let a = approach_a_scores(&t);
        assert_eq!(a["f1"], 20);
        let b = approach_b_scores(&t);
        assert_eq!(b["f1"], 6 + 3);
        assert_eq!(b["f2"], 4 + 10);

        fs::write(&path, "feature,ose\nf1,abc\n").unwrap();
        match FeatureTable::load(&path) {
            Err(EvalError::Malformed { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
