//! Labeled corpora and paired simplification groups, with their file formats.
//!
//! * Labeled corpus: a delimited table with `id`, `label` and `text` columns
//!   (text quoted, may span lines), or a directory holding `labels.csv` /
//!   `labels.tsv` (`id`, `label`) next to one `<id>.txt` per document.
//! * Paired groups: a JSON array of `{"id": .., "versions": [..]}` ordered
//!   from most difficult to simplest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Unreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: column {column:?} not found in header")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}:{line}: {reason}")]
    Malformed {
        path: PathBuf,
        line: u64,
        reason: String,
    },
    #[error("{0}: no labels.csv or labels.tsv in corpus directory")]
    NoLabelsFile(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledItem {
    pub id: String,
    pub text: String,
    /// Grade band (`K2-3`) or numeric grade.
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LabeledCorpus {
    pub items: Vec<LabeledItem>,
}

fn unreadable(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Unreadable {
        path: path.to_path_buf(),
        source,
    }
}

fn delimiter_for(path: &Path, header: Option<&str>) -> u8 {
    let tsv_ext = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("tsv"));
    if tsv_ext || header.is_some_and(|h| h.contains('\t')) {
        b'\t'
    } else {
        b','
    }
}

/// Reads a delimited table and returns, per data row, its line number and
/// the requested columns in order.
fn read_columns(path: &Path, columns: &[&str]) -> Result<Vec<(u64, Vec<String>)>, CorpusError> {
    let raw = fs::read_to_string(path).map_err(unreadable(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter_for(path, raw.lines().next()))
        .flexible(true)
        .from_reader(raw.as_bytes());
    let malformed = |line: u64, reason: String| CorpusError::Malformed {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let headers = reader.headers().map_err(|e| malformed(1, e.to_string()))?.clone();
    let idx: Vec<usize> = columns
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h.trim().eq_ignore_ascii_case(name))
                .ok_or_else(|| CorpusError::MissingColumn {
                    path: path.to_path_buf(),
                    column: name.to_string(),
                })
        })
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            malformed(e.position().map_or(0, |p| p.line()), e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let fields = idx
            .iter()
            .zip(columns)
            .map(|(&i, name)| {
                record
                    .get(i)
                    .map(str::to_string)
                    .ok_or_else(|| malformed(line, format!("missing {name} field")))
            })
            .collect::<Result<_, _>>()?;
        rows.push((line, fields));
    }
    Ok(rows)
}

impl LabeledCorpus {
    pub fn new(items: Vec<LabeledItem>) -> Self {
        LabeledCorpus { items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Loads a delimited file or a corpus directory.
    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        if path.is_dir() {
            Self::load_dir(path)
        } else {
            Self::load_delimited(path)
        }
    }

    pub fn load_delimited(path: &Path) -> Result<Self, CorpusError> {
        let items = read_columns(path, &["id", "label", "text"])?
            .into_iter()
            .map(|(_, mut f)| LabeledItem {
                text: f.pop().unwrap_or_default(),
                label: f.pop().unwrap_or_default().trim().to_string(),
                id: f.pop().unwrap_or_default().trim().to_string(),
            })
            .collect();
        Ok(LabeledCorpus { items })
    }

    pub fn load_dir(dir: &Path) -> Result<Self, CorpusError> {
        let labels = ["labels.tsv", "labels.csv"]
            .iter()
            .map(|f| dir.join(f))
            .find(|p| p.is_file())
            .ok_or_else(|| CorpusError::NoLabelsFile(dir.to_path_buf()))?;
        let mut items = Vec::new();
        for (line, fields) in read_columns(&labels, &["id", "label"])? {
            let id = fields[0].trim().to_string();
            let text_path = dir.join(format!("{id}.txt"));
            let text = fs::read_to_string(&text_path).map_err(|source| CorpusError::Malformed {
                path: labels.clone(),
                line,
                reason: format!("cannot read {}: {source}", text_path.display()),
            })?;
            items.push(LabeledItem {
                id,
                text,
                label: fields[1].trim().to_string(),
            });
        }
        Ok(LabeledCorpus { items })
    }

    /// Deterministic split: every `every`-th item (1-based) goes to the
    /// held-out part.
    pub fn holdout(&self, every: usize) -> (LabeledCorpus, LabeledCorpus) {
        let every = every.max(2);
        let (test, train): (Vec<_>, Vec<_>) = self
            .items
            .iter()
            .cloned()
            .enumerate()
            .partition(|(i, _)| (i + 1) % every == 0);
        let strip = |v: Vec<(usize, LabeledItem)>| LabeledCorpus {
            items: v.into_iter().map(|(_, item)| item).collect(),
        };
        (strip(train), strip(test))
    }
}

/// Versions of one text ordered from most difficult to simplest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairedGroup {
    pub id: String,
    pub versions: Vec<String>,
}

pub fn load_groups(path: &Path) -> Result<Vec<PairedGroup>, CorpusError> {
    let raw = fs::read_to_string(path).map_err(unreadable(path))?;
    parse_groups(&raw).map_err(|e| CorpusError::Malformed {
        path: path.to_path_buf(),
        line: e.line() as u64,
        reason: e.to_string(),
    })
}

pub fn parse_groups(json: &str) -> Result<Vec<PairedGroup>, serde_json::Error> {
    serde_json::from_str(json)
}
