use std::fs;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};

use readgauge::formulas::{builtin_coefficients, CoefficientSet, Formula, Variant};
use readgauge::lexicon::{LexiconColumns, LEXICON_DIR_ENV};
use readgauge::nerf::NerfCoefficients;
use readgauge::syntax::{read_sidecar, ParseTree};
use readgauge::{Error, LexiconPair};

use crate::{CliError, CliResult, FormulaArg, FormulaSelection, LexiconArgs, VariantArg};

#[derive(Debug, Clone)]
pub struct InputDoc {
    pub id: String,
    pub text: String,
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn is_table(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv") || e.eq_ignore_ascii_case("tsv"))
}

/// Documents named by `--input`, in a stable order.
pub fn read_inputs(input: &str) -> anyhow::Result<Vec<InputDoc>> {
    if input == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).context("reading stdin")?;
        return Ok(vec![InputDoc { id: "stdin".into(), text }]);
    }
    let path = Path::new(input);
    if path.is_dir() {
        let mut files: Vec<_> = fs::read_dir(path)
            .with_context(|| format!("cannot list {}", path.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "txt"))
            .collect();
        files.sort();
        if files.is_empty() {
            bail!("{}: no .txt documents", path.display());
        }
        return files
            .into_iter()
            .map(|p| {
                let text = fs::read_to_string(&p).with_context(|| format!("cannot read {}", p.display()))?;
                Ok(InputDoc { id: stem(&p), text })
            })
            .collect();
    }
    if is_table(path) {
        return read_table(path);
    }
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(vec![InputDoc { id: stem(path), text }])
}

/// An `id`/`text` table; other columns are ignored.
fn read_table(path: &Path) -> anyhow::Result<Vec<InputDoc>> {
    let raw = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let tab = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("tsv"))
        || raw.lines().next().is_some_and(|h| h.contains('\t'));
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(if tab { b'\t' } else { b',' })
        .from_reader(raw.as_bytes());
    let headers = reader
        .headers()
        .with_context(|| format!("{}:1: unreadable header", path.display()))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or_else(|| anyhow!("{}: column {name:?} not found in header", path.display()))
    };
    let (id_col, text_col) = (column("id")?, column("text")?);
    let mut docs = Vec::new();
    for record in reader.records() {
        let record = record.with_context(|| format!("{}: malformed row", path.display()))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| {
            record
                .get(i)
                .map(str::to_string)
                .ok_or_else(|| anyhow!("{}:{line}: missing field", path.display()))
        };
        docs.push(InputDoc {
            id: field(id_col)?.trim().to_string(),
            text: field(text_col)?,
        });
    }
    Ok(docs)
}

/// Parse blocks aligned one-to-one with `expected` documents.
pub fn read_parses(path: Option<&Path>, expected: usize) -> anyhow::Result<Option<Vec<Vec<ParseTree>>>> {
    let Some(path) = path else { return Ok(None) };
    let raw = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let blocks = read_sidecar(&raw).with_context(|| format!("{}", path.display()))?;
    if blocks.len() != expected {
        bail!(
            "{}: {} parse blocks for {expected} documents",
            path.display(),
            blocks.len()
        );
    }
    Ok(Some(blocks))
}

/// Lexicons from explicit files, a directory, or the environment.
pub fn load_lexicons(args: &LexiconArgs) -> CliResult<Arc<LexiconPair>> {
    let columns = LexiconColumns {
        word: args.lex_word_col.clone(),
        value: args.lex_value_col.clone(),
    };
    let explicit = match (&args.aoa, &args.familiarity, &args.lexicon_dir) {
        (Some(aoa), Some(fam), _) => Some(LexiconPair::load(aoa, fam, &columns)),
        (_, _, Some(dir)) => Some(LexiconPair::from_dir(dir, &columns)),
        _ => None,
    };
    let pair = match explicit {
        Some(result) => result.map(Arc::new),
        None => match std::env::var_os(LEXICON_DIR_ENV).filter(|v| !v.is_empty()) {
            Some(dir) => LexiconPair::from_dir(Path::new(&dir), &columns).map(Arc::new),
            None => Err(Error::LexiconsNotConfigured),
        },
    };
    pair.map_err(|e| match e {
        Error::LexiconsNotConfigured => CliError::Usage(format!(
            "{e} (or pass --lexicon-dir, or --aoa with --familiarity)"
        )),
        other => CliError::Data(other.into()),
    })
}

/// One selected scorer.
#[derive(Debug, Clone, Copy)]
pub enum Scorer {
    Traditional(CoefficientSet),
    Nerf(NerfCoefficients),
}

impl Scorer {
    pub fn is_nerf(&self) -> bool {
        matches!(self, Scorer::Nerf(_))
    }
}

fn to_formula(f: FormulaArg) -> Option<Formula> {
    match f {
        FormulaArg::Fkgl => Some(Formula::Fkgl),
        FormulaArg::Fogi => Some(Formula::Fogi),
        FormulaArg::Smog => Some(Formula::Smog),
        FormulaArg::Cole => Some(Formula::Cole),
        FormulaArg::Auto => Some(Formula::Auto),
        FormulaArg::Nerf | FormulaArg::All => None,
    }
}

pub fn variant_of(v: VariantArg) -> Variant {
    match v {
        VariantArg::Original => Variant::Original,
        VariantArg::Adjusted => Variant::Adjusted,
    }
}

fn read_json(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Traditional coefficients from a JSON file, checked against `formula`.
pub fn read_coefficients(path: &Path, formula: Formula) -> CliResult<CoefficientSet> {
    let set = CoefficientSet::from_json(&read_json(path)?)
        .with_context(|| format!("{}", path.display()))?;
    if set.formula != formula {
        return Err(CliError::Usage(format!(
            "--coeffs {} holds {} coefficients, but --formula is {formula}",
            path.display(),
            set.formula
        )));
    }
    Ok(set)
}

pub fn read_nerf_coefficients(path: &Path) -> CliResult<NerfCoefficients> {
    Ok(NerfCoefficients::from_json(&read_json(path)?).with_context(|| format!("{}", path.display()))?)
}

/// Scorers in output order: the five traditional formulas, then NERF.
pub fn scorers(sel: &FormulaSelection) -> CliResult<Vec<Scorer>> {
    let variant = variant_of(sel.variant);
    match (sel.formula, &sel.coeffs) {
        (FormulaArg::All, Some(_)) => Err(CliError::Usage(
            "--coeffs needs a single --formula, not all".into(),
        )),
        (FormulaArg::All, None) => {
            let mut all: Vec<Scorer> = Formula::ALL
                .iter()
                .map(|&f| Scorer::Traditional(builtin_coefficients(f, variant)))
                .collect();
            all.push(Scorer::Nerf(NerfCoefficients::default()));
            Ok(all)
        }
        (FormulaArg::Nerf, coeffs) => Ok(vec![Scorer::Nerf(match coeffs {
            Some(path) => read_nerf_coefficients(path)?,
            None => NerfCoefficients::default(),
        })]),
        (f, coeffs) => {
            let formula = to_formula(f).expect("single traditional formula");
            Ok(vec![Scorer::Traditional(match coeffs {
                Some(path) => read_coefficients(path, formula)?,
                None => builtin_coefficients(formula, variant),
            })])
        }
    }
}

pub fn single_formula(f: FormulaArg) -> Option<Formula> {
    to_formula(f)
}
