//! `readgauge` command-line frontend.
//!
//! Exit status: 0 success, 1 usage error, 2 data error.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "readgauge", version, about = "Readability scoring, calibration and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score documents with one or more formulas.
    Score(ScoreArgs),
    /// Dump the NERF feature vector of each document.
    Features(FeaturesArgs),
    /// Fit coefficients on a labeled corpus.
    Calibrate(CalibrateArgs),
    /// MAE, r² and Pearson r against a labeled corpus.
    Evaluate(EvaluateArgs),
    /// Ranking accuracy on paired simplification groups.
    Rank(RankArgs),
    /// Reading time in minutes.
    Readtime(ReadtimeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormulaArg {
    Nerf,
    Fkgl,
    Fogi,
    Smog,
    Cole,
    Auto,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Original,
    Adjusted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RankMode {
    Kway,
    Pairwise,
}

#[derive(Debug, Args)]
pub struct LexiconArgs {
    /// Age-of-acquisition table (overrides the lexicon directory).
    #[arg(long, requires = "familiarity")]
    pub aoa: Option<PathBuf>,
    /// Familiarity table (overrides the lexicon directory).
    #[arg(long, requires = "aoa")]
    pub familiarity: Option<PathBuf>,
    /// Directory holding aoa.{tsv,csv} and familiarity.{tsv,csv}; defaults
    /// to READGAUGE_LEXICON_DIR.
    #[arg(long)]
    pub lexicon_dir: Option<PathBuf>,
    #[arg(long, default_value = "word")]
    pub lex_word_col: String,
    #[arg(long, default_value = "value")]
    pub lex_value_col: String,
}

#[derive(Debug, Args)]
pub struct FormulaSelection {
    #[arg(long, value_enum, default_value_t = FormulaArg::All)]
    pub formula: FormulaArg,
    #[arg(long, value_enum, default_value_t = VariantArg::Adjusted)]
    pub variant: VariantArg,
    /// Coefficient JSON for a single formula; overrides --variant.
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub selection: FormulaSelection,
    /// File, directory of .txt files, id/text table (.csv/.tsv), or `-`.
    #[arg(long, default_value = "-")]
    pub input: String,
    /// Bracketed parses, one blank-line separated block per document.
    #[arg(long)]
    pub parses: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub lexicons: LexiconArgs,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[arg(long, default_value = "-")]
    pub input: String,
    #[arg(long)]
    pub parses: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub lexicons: LexiconArgs,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Labeled corpus: id/label/text table or directory with labels file.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_enum)]
    pub formula: FormulaArg,
    /// Starting coefficients (defaults to the original set).
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    /// Where to write the fitted coefficient JSON (stdout when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Hold out every N-th item and report metrics on it.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub holdout: Option<u64>,
    #[arg(long)]
    pub parses: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub lexicons: LexiconArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[command(flatten)]
    pub selection: FormulaSelection,
    #[arg(long)]
    pub parses: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub lexicons: LexiconArgs,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// JSON array of {id, versions} ordered hardest first.
    #[arg(long)]
    pub groups: PathBuf,
    #[arg(long, value_enum, default_value_t = RankMode::Kway)]
    pub mode: RankMode,
    #[command(flatten)]
    pub selection: FormulaSelection,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub lexicons: LexiconArgs,
}

#[derive(Debug, Args)]
pub struct ReadtimeArgs {
    #[arg(long, default_value = "-")]
    pub input: String,
    /// Reading rates in words per minute.
    #[arg(long, value_delimiter = ',', default_value = "240")]
    pub wpm: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Data(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let mut out = std::io::stdout().lock();
    let result = match cli.command {
        Command::Score(args) => commands::score(&args, &mut out),
        Command::Features(args) => commands::features(&args, &mut out),
        Command::Calibrate(args) => commands::calibrate(&args, &mut out),
        Command::Evaluate(args) => commands::evaluate(&args, &mut out),
        Command::Rank(args) => commands::rank(&args, &mut out),
        Command::Readtime(args) => commands::readtime(&args, &mut out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
