use std::io::Write;
use std::sync::Arc;

use anyhow::Context;
use rayon::prelude::*;
use serde::Serialize;

use readgauge::calibration::{
    corpus_targets, fit_formula_stats, fit_nerf, CalibrationError, FitResult,
};
use readgauge::corpus::{load_groups, LabeledCorpus};
use readgauge::evaluation::{
    mae, pairwise_accuracy_from_scores, pearson_r, r2_score, rank_accuracy_from_scores,
};
use readgauge::formulas::{builtin_coefficients, Formula, Score, Variant};
use readgauge::nerf::{NerfCoefficients, NerfFeatures};
use readgauge::syntax::ParseTree;
use readgauge::text::read_time;
use readgauge::{LexiconPair, Request};

use crate::input::{
    load_lexicons, read_coefficients, read_inputs, read_nerf_coefficients, read_parses, scorers,
    single_formula, Scorer,
};
use crate::{
    CalibrateArgs, CliError, CliResult, EvaluateArgs, FeaturesArgs, FormulaArg, Format, RankArgs,
    RankMode, ReadtimeArgs, ScoreArgs,
};

fn emit<T, W, F>(records: &[T], format: Format, out: &mut W, text: F) -> CliResult<()>
where
    T: Serialize,
    W: Write,
    F: Fn(&T) -> String,
{
    let io = |e: std::io::Error| CliError::Data(anyhow::Error::new(e).context("writing output"));
    match format {
        Format::Json => {
            for r in records {
                let line = serde_json::to_string(r).context("serializing record")?;
                writeln!(out, "{line}").map_err(io)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            for r in records {
                w.serialize(r).context("writing csv")?;
            }
            w.flush().map_err(io)?;
        }
        Format::Text => {
            for r in records {
                writeln!(out, "{}", text(r)).map_err(io)?;
            }
        }
    }
    Ok(())
}

fn request(text: &str, trees: Option<&Vec<ParseTree>>, lexicons: Option<&Arc<LexiconPair>>) -> Request {
    let mut r = Request::new(text);
    if let Some(l) = lexicons {
        r = r.with_lexicons(l.clone());
    }
    if let Some(t) = trees {
        r = r.with_parses(t.clone());
    }
    r
}

/// Score plus the approximate-syntax flag for one scorer.
fn run_scorer(r: &Request, scorer: &Scorer) -> readgauge::api::Result<(Score, bool)> {
    match scorer {
        Scorer::Traditional(c) => Ok((r.score(c)?, false)),
        Scorer::Nerf(c) => {
            let approximate = r.features()?.features.approximate_syntax;
            Ok((r.nerf_score_with(c)?, approximate))
        }
    }
}

fn nerf_lexicons(scorers: &[Scorer], args: &crate::LexiconArgs) -> CliResult<Option<Arc<LexiconPair>>> {
    if scorers.iter().any(Scorer::is_nerf) {
        load_lexicons(args).map(Some)
    } else {
        Ok(None)
    }
}

#[derive(Debug, Serialize)]
struct ScoreRecord {
    id: String,
    formula: &'static str,
    variant: &'static str,
    score: f64,
    rounded: bool,
    approximate_syntax: bool,
}

pub fn score<W: Write>(args: &ScoreArgs, out: &mut W) -> CliResult<()> {
    let scorers = scorers(&args.selection)?;
    let lexicons = nerf_lexicons(&scorers, &args.lexicons)?;
    let docs = read_inputs(&args.input)?;
    let parses = read_parses(args.parses.as_deref(), docs.len())?;

    let per_doc: Vec<Vec<ScoreRecord>> = docs
        .par_iter()
        .enumerate()
        .map(|(i, doc)| {
            let r = request(&doc.text, parses.as_ref().map(|p| &p[i]), lexicons.as_ref());
            scorers
                .iter()
                .map(|s| {
                    let (score, approximate_syntax) =
                        run_scorer(&r, s).with_context(|| format!("document {:?}", doc.id))?;
                    Ok(ScoreRecord {
                        id: doc.id.clone(),
                        formula: score.formula.name(),
                        variant: score.variant.name(),
                        score: score.value,
                        rounded: score.rounded,
                        approximate_syntax,
                    })
                })
                .collect::<anyhow::Result<Vec<_>>>()
        })
        .collect::<anyhow::Result<_>>()?;
    let records: Vec<ScoreRecord> = per_doc.into_iter().flatten().collect();
    emit(&records, args.format, out, |r| {
        format!(
            "{}\t{}\t{}\t{}{}",
            r.id,
            r.formula.to_uppercase(),
            r.variant,
            r.score,
            if r.approximate_syntax { "\t(approximate syntax)" } else { "" }
        )
    })
}

#[derive(Debug, Serialize)]
struct FeatureRecord {
    id: String,
    aoa_sum: f64,
    familiarity_sum: f64,
    content_words: usize,
    noun_phrases: usize,
    tree_height_sum: usize,
    unique_words: usize,
    words: usize,
    sentences: usize,
    approximate_syntax: bool,
    aoa_hits: usize,
    aoa_misses: usize,
    familiarity_hits: usize,
    familiarity_misses: usize,
}

pub fn features<W: Write>(args: &FeaturesArgs, out: &mut W) -> CliResult<()> {
    let lexicons = load_lexicons(&args.lexicons)?;
    let docs = read_inputs(&args.input)?;
    let parses = read_parses(args.parses.as_deref(), docs.len())?;
    let records: Vec<FeatureRecord> = docs
        .par_iter()
        .enumerate()
        .map(|(i, doc)| {
            let r = request(&doc.text, parses.as_ref().map(|p| &p[i]), Some(&lexicons));
            let report = r.features().with_context(|| format!("document {:?}", doc.id))?;
            let f = report.features;
            Ok(FeatureRecord {
                id: doc.id.clone(),
                aoa_sum: f.aoa_sum,
                familiarity_sum: f.familiarity_sum,
                content_words: f.content_words,
                noun_phrases: f.noun_phrases,
                tree_height_sum: f.tree_height_sum,
                unique_words: f.unique_words,
                words: f.words,
                sentences: f.sentences,
                approximate_syntax: f.approximate_syntax,
                aoa_hits: report.aoa_lookup.hits,
                aoa_misses: report.aoa_lookup.misses,
                familiarity_hits: report.familiarity_lookup.hits,
                familiarity_misses: report.familiarity_lookup.misses,
            })
        })
        .collect::<anyhow::Result<_>>()?;
    emit(&records, args.format, out, |r| {
        format!(
            "{}\taoa={} fam={} cw={} np={} th={} unique={} words={} sentences={}{}",
            r.id,
            r.aoa_sum,
            r.familiarity_sum,
            r.content_words,
            r.noun_phrases,
            r.tree_height_sum,
            r.unique_words,
            r.words,
            r.sentences,
            if r.approximate_syntax { " (approximate syntax)" } else { "" }
        )
    })
}

fn load_corpus(path: &std::path::Path) -> CliResult<(LabeledCorpus, Vec<f64>)> {
    let corpus = LabeledCorpus::load(path).map_err(anyhow::Error::from)?;
    if corpus.is_empty() {
        return Err(CliError::Data(anyhow::anyhow!("{}: corpus has no items", path.display())));
    }
    let targets = corpus_targets(&corpus).with_context(|| format!("{}", path.display()))?;
    Ok((corpus, targets))
}

#[derive(Debug, Serialize)]
struct Metrics {
    items: usize,
    mae: f64,
    r2: Option<f64>,
    pearson_r: Option<f64>,
}

fn metrics(pred: &[f64], truth: &[f64]) -> CliResult<Metrics> {
    Ok(Metrics {
        items: pred.len(),
        mae: mae(pred, truth).context("computing MAE")?,
        r2: r2_score(pred, truth).ok(),
        pearson_r: pearson_r(pred, truth).ok(),
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |v| v.to_string())
}

#[derive(Debug, Serialize)]
struct CalibrationReport<C> {
    formula: &'static str,
    items: usize,
    residual_sum_squares: f64,
    initial_rss: f64,
    iterations: usize,
    converged: bool,
    gradient_norm: f64,
    coefficients: C,
    #[serde(skip_serializing_if = "Option::is_none")]
    holdout: Option<Metrics>,
}

/// Index split matching `LabeledCorpus::holdout`: every N-th item held out.
fn split<T: Clone>(items: &[T], every: Option<u64>) -> (Vec<T>, Vec<T>) {
    let Some(every) = every else {
        return (items.to_vec(), Vec::new());
    };
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (i, item) in items.iter().enumerate() {
        if (i as u64 + 1) % every == 0 {
            test.push(item.clone());
        } else {
            train.push(item.clone());
        }
    }
    (train, test)
}

fn report_from<C: Serialize + Copy>(
    formula: &'static str,
    fit: &FitResult<C>,
    items: usize,
    holdout: Option<Metrics>,
) -> CalibrationReport<C> {
    CalibrationReport {
        formula,
        items,
        residual_sum_squares: fit.residual_sum_squares,
        initial_rss: fit.initial_rss,
        iterations: fit.iterations,
        converged: fit.converged,
        gradient_norm: fit.gradient_norm,
        coefficients: fit.coefficients,
        holdout,
    }
}

fn emit_report<C: Serialize, W: Write>(
    report: &CalibrationReport<C>,
    coefficients_json: String,
    args: &CalibrateArgs,
    out: &mut W,
) -> CliResult<()> {
    if let Some(path) = &args.output {
        std::fs::write(path, coefficients_json + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    emit(std::slice::from_ref(report), args.format, out, |r| {
        let mut s = format!(
            "{}: {} items, RSS {} (from {}), {} iterations, converged {}\ncoefficients {}",
            r.formula.to_uppercase(),
            r.items,
            r.residual_sum_squares,
            r.initial_rss,
            r.iterations,
            r.converged,
            serde_json::to_string(&r.coefficients).unwrap_or_default()
        );
        if let Some(h) = &r.holdout {
            s += &format!(
                "\nholdout: {} items, MAE {}, r2 {}, pearson r {}",
                h.items,
                h.mae,
                fmt_opt(h.r2),
                fmt_opt(h.pearson_r)
            );
        }
        s
    })
}

pub fn calibrate<W: Write>(args: &CalibrateArgs, out: &mut W) -> CliResult<()> {
    if args.formula == FormulaArg::All {
        return Err(CliError::Usage("calibrate fits one formula at a time; pick --formula".into()));
    }
    if args.format == Format::Csv {
        return Err(CliError::Usage("calibrate reports nest coefficients; use --format json or text".into()));
    }
    let (corpus, targets) = load_corpus(&args.corpus)?;

    if args.formula == FormulaArg::Nerf {
        let lexicons = load_lexicons(&args.lexicons)?;
        let parses = read_parses(args.parses.as_deref(), corpus.len())?;
        let init = match &args.coeffs {
            Some(p) => read_nerf_coefficients(p)?,
            None => NerfCoefficients::default(),
        };
        let features: Vec<NerfFeatures> = corpus
            .items
            .par_iter()
            .enumerate()
            .map(|(i, item)| {
                let r = request(&item.text, parses.as_ref().map(|p| &p[i]), Some(&lexicons));
                Ok(r.features().with_context(|| format!("corpus item {:?}", item.id))?.features)
            })
            .collect::<anyhow::Result<_>>()?;
        let rows: Vec<(NerfFeatures, f64)> = features.into_iter().zip(targets).collect();
        let (train, test) = split(&rows, args.holdout);
        let (tf, ty): (Vec<_>, Vec<_>) = train.into_iter().unzip();
        let fit = match fit_nerf(&tf, &ty, &init) {
            Ok(fit) => fit,
            Err(CalibrationError::RankDeficient(fit)) => {
                eprintln!("warning: NERF design matrix is rank deficient; using the ridge solution");
                *fit
            }
            Err(e) => return Err(CliError::Data(e.into())),
        };
        let holdout = if test.is_empty() {
            None
        } else {
            let pred: Vec<f64> = test
                .iter()
                .map(|(f, _)| readgauge::nerf::nerf_score(f, &fit.coefficients).value)
                .collect();
            let truth: Vec<f64> = test.iter().map(|(_, y)| *y).collect();
            Some(metrics(&pred, &truth)?)
        };
        emit_report(&report_from("nerf", &fit, ty.len(), holdout), fit.coefficients.to_json(), args, out)
    } else {
        let formula: Formula = single_formula(args.formula).expect("traditional formula");
        let init = match &args.coeffs {
            Some(p) => read_coefficients(p, formula)?,
            None => builtin_coefficients(formula, Variant::Original),
        };
        let stats = corpus
            .items
            .iter()
            .map(|item| {
                Request::new(item.text.as_str())
                    .stats()
                    .copied()
                    .with_context(|| format!("corpus item {:?}", item.id))
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        let rows: Vec<_> = stats.into_iter().zip(targets).collect();
        let (train, test) = split(&rows, args.holdout);
        let (ts, ty): (Vec<_>, Vec<_>) = train.into_iter().unzip();
        let fit = fit_formula_stats(&ts, &ty, &init).context("calibration failed")?;
        let holdout = if test.is_empty() {
            None
        } else {
            let pred = test
                .iter()
                .map(|(s, _)| readgauge::formulas::score(s, &fit.coefficients).map(|s| s.value))
                .collect::<Result<Vec<_>, _>>()
                .context("scoring held-out items")?;
            let truth: Vec<f64> = test.iter().map(|(_, y)| *y).collect();
            Some(metrics(&pred, &truth)?)
        };
        emit_report(&report_from(formula.name(), &fit, ty.len(), holdout), fit.coefficients.to_json(), args, out)
    }
}

#[derive(Debug, Serialize)]
struct EvaluationRecord {
    formula: &'static str,
    variant: &'static str,
    items: usize,
    mae: f64,
    r2: Option<f64>,
    pearson_r: Option<f64>,
}

pub fn evaluate<W: Write>(args: &EvaluateArgs, out: &mut W) -> CliResult<()> {
    let scorers = scorers(&args.selection)?;
    let lexicons = nerf_lexicons(&scorers, &args.lexicons)?;
    let (corpus, targets) = load_corpus(&args.corpus)?;
    let parses = read_parses(args.parses.as_deref(), corpus.len())?;

    let per_item: Vec<Vec<Score>> = corpus
        .items
        .par_iter()
        .enumerate()
        .map(|(i, item)| {
            let r = request(&item.text, parses.as_ref().map(|p| &p[i]), lexicons.as_ref());
            scorers
                .iter()
                .map(|s| Ok(run_scorer(&r, s).with_context(|| format!("corpus item {:?}", item.id))?.0))
                .collect::<anyhow::Result<Vec<_>>>()
        })
        .collect::<anyhow::Result<_>>()?;

    let mut records = Vec::new();
    for (j, _) in scorers.iter().enumerate() {
        let pred: Vec<f64> = per_item.iter().map(|s| s[j].value).collect();
        let m = metrics(&pred, &targets)?;
        let first = per_item[0][j];
        records.push(EvaluationRecord {
            formula: first.formula.name(),
            variant: first.variant.name(),
            items: m.items,
            mae: m.mae,
            r2: m.r2,
            pearson_r: m.pearson_r,
        });
    }
    emit(&records, args.format, out, |r| {
        format!(
            "{} ({}): n={} MAE {} r2 {} pearson r {}",
            r.formula.to_uppercase(),
            r.variant,
            r.items,
            r.mae,
            fmt_opt(r.r2),
            fmt_opt(r.pearson_r)
        )
    })
}

#[derive(Debug, Serialize)]
struct RankRecord {
    formula: &'static str,
    variant: &'static str,
    mode: &'static str,
    groups: usize,
    comparisons: usize,
    accuracy: f64,
}

pub fn rank<W: Write>(args: &RankArgs, out: &mut W) -> CliResult<()> {
    let scorers = scorers(&args.selection)?;
    let lexicons = nerf_lexicons(&scorers, &args.lexicons)?;
    let groups = load_groups(&args.groups).map_err(anyhow::Error::from)?;
    if let Some(g) = groups.iter().find(|g| g.versions.len() < 2) {
        return Err(CliError::Data(anyhow::anyhow!(
            "{}: group {:?} has {} version(s); at least 2 required",
            args.groups.display(),
            g.id,
            g.versions.len()
        )));
    }
    if groups.is_empty() {
        return Err(CliError::Data(anyhow::anyhow!("{}: no groups", args.groups.display())));
    }

    // scores[group][version][scorer]
    let scores: Vec<Vec<Vec<Score>>> = groups
        .par_iter()
        .map(|g| {
            g.versions
                .iter()
                .enumerate()
                .map(|(v, text)| {
                    let r = request(text, None, lexicons.as_ref());
                    scorers
                        .iter()
                        .map(|s| Ok(run_scorer(&r, s).with_context(|| format!("group {:?} version {v}", g.id))?.0))
                        .collect::<anyhow::Result<Vec<_>>>()
                })
                .collect::<anyhow::Result<Vec<_>>>()
        })
        .collect::<anyhow::Result<_>>()?;

    let mut records = Vec::new();
    for (j, _) in scorers.iter().enumerate() {
        let per_group: Vec<Vec<f64>> = scores
            .iter()
            .map(|g| g.iter().map(|v| v[j].value).collect())
            .collect();
        let (mode, comparisons, accuracy) = match args.mode {
            RankMode::Kway => ("kway", per_group.len(), rank_accuracy_from_scores(&per_group)),
            RankMode::Pairwise => {
                let pairs: Vec<(f64, f64)> = per_group
                    .iter()
                    .flat_map(|g| {
                        (0..g.len()).flat_map(move |a| (a + 1..g.len()).map(move |b| (g[a], g[b])))
                    })
                    .collect();
                ("pairwise", pairs.len(), pairwise_accuracy_from_scores(&pairs))
            }
        };
        let first = scores[0][0][j];
        records.push(RankRecord {
            formula: first.formula.name(),
            variant: first.variant.name(),
            mode,
            groups: groups.len(),
            comparisons,
            accuracy: accuracy.context("ranking")?,
        });
    }
    emit(&records, args.format, out, |r| {
        format!(
            "{} ({}): {} accuracy {} over {} comparisons",
            r.formula.to_uppercase(),
            r.variant,
            r.mode,
            r.accuracy,
            r.comparisons
        )
    })
}

#[derive(Debug, Serialize)]
struct ReadtimeRecord {
    id: String,
    words: usize,
    wpm: f64,
    minutes: f64,
}

pub fn readtime<W: Write>(args: &ReadtimeArgs, out: &mut W) -> CliResult<()> {
    if let Some(bad) = args.wpm.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(CliError::Usage(format!("--wpm values must be positive, got {bad}")));
    }
    let docs = read_inputs(&args.input)?;
    let mut records = Vec::new();
    for doc in &docs {
        let stats = *Request::new(doc.text.as_str())
            .stats()
            .with_context(|| format!("document {:?}", doc.id))?;
        for &wpm in &args.wpm {
            records.push(ReadtimeRecord {
                id: doc.id.clone(),
                words: stats.words,
                wpm,
                minutes: read_time(&stats, wpm).context("reading time")?,
            });
        }
    }
    emit(&records, args.format, out, |r| {
        format!("{}\t{} words\t{} wpm\t{} min", r.id, r.words, r.wpm, r.minutes)
    })
}
