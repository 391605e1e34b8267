//! Word-level psycholinguistic lexicons: age of acquisition (years) and word
//! familiarity (Lg10CD, log10 contextual diversity).
//!
//! Lexicon files are delimited tables with a header row. The delimiter is
//! inferred from the header line (tab if present, comma otherwise) and the word
//! and value columns are looked up by name.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::Token;

/// Environment variable naming the directory that holds `aoa.{csv,tsv}` and
/// `familiarity.{csv,tsv}`.
pub const LEXICON_DIR_ENV: &str = "READGAUGE_LEXICON_DIR";

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon {path}: {source}")]
    FileUnreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: column {column:?} not found in header")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}:{line}: malformed row: {reason}")]
    MalformedRow {
        path: PathBuf,
        line: u64,
        reason: String,
    },
    #[error("{path}: lexicon has no valid entries")]
    EmptyLexicon { path: PathBuf },
    #[error("no {kind} lexicon found in {dir} (expected {kind}.csv or {kind}.tsv)")]
    NotInDirectory { dir: PathBuf, kind: LexiconKind },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LexiconKind {
    /// Age of acquisition in years; values must be positive.
    Aoa,
    /// Word familiarity as Lg10CD; values must be non-negative.
    Familiarity,
}

impl LexiconKind {
    pub fn file_stem(self) -> &'static str {
        match self {
            LexiconKind::Aoa => "aoa",
            LexiconKind::Familiarity => "familiarity",
        }
    }

    fn check(self, value: f64) -> Result<(), String> {
        if !value.is_finite() {
            return Err(format!("value {value} is not finite"));
        }
        match self {
            LexiconKind::Aoa if value <= 0.0 => Err(format!("age of acquisition {value} <= 0")),
            LexiconKind::Familiarity if value < 0.0 => Err(format!("familiarity {value} < 0")),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for LexiconKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.file_stem())
    }
}

/// Column names used when reading a lexicon table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconColumns {
    pub word: String,
    pub value: String,
}

impl Default for LexiconColumns {
    fn default() -> Self {
        LexiconColumns {
            word: "word".into(),
            value: "value".into(),
        }
    }
}

/// Immutable word → value map.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    kind: LexiconKind,
    entries: HashMap<String, f64>,
    /// Rows dropped because their word was already present.
    duplicates: usize,
    rows: usize,
}

/// Result of summing lexicon values over a token sequence.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LookupSum {
    pub sum: f64,
    pub hits: usize,
    pub misses: usize,
}

impl std::ops::Add for LookupSum {
    type Output = LookupSum;

    fn add(self, rhs: LookupSum) -> LookupSum {
        LookupSum {
            sum: self.sum + rhs.sum,
            hits: self.hits + rhs.hits,
            misses: self.misses + rhs.misses,
        }
    }
}

impl Lexicon {
    /// Builds a lexicon from in-memory pairs. Keys are normalized; the first
    /// occurrence of a word wins.
    pub fn from_pairs<I, S>(kind: LexiconKind, pairs: I) -> Result<Self, String>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let mut lex = Lexicon {
            kind,
            entries: HashMap::new(),
            duplicates: 0,
            rows: 0,
        };
        for (word, value) in pairs {
            lex.insert(word.as_ref(), value)?;
        }
        Ok(lex)
    }

    /// An empty lexicon: every lookup misses.
    pub fn empty(kind: LexiconKind) -> Self {
        Lexicon {
            kind,
            entries: HashMap::new(),
            duplicates: 0,
            rows: 0,
        }
    }

    fn insert(&mut self, word: &str, value: f64) -> Result<(), String> {
        let key = crate::text::normalize(word);
        if key.is_empty() {
            return Err(format!("word {word:?} has no alphanumeric characters"));
        }
        self.kind.check(value)?;
        self.rows += 1;
        if self.entries.contains_key(&key) {
            self.duplicates += 1;
        } else {
            self.entries.insert(key, value);
        }
        Ok(())
    }

    pub fn load(path: &Path, kind: LexiconKind) -> Result<Self, LexiconError> {
        Self::load_with_columns(path, kind, &LexiconColumns::default())
    }

    pub fn load_with_columns(
        path: &Path,
        kind: LexiconKind,
        columns: &LexiconColumns,
    ) -> Result<Self, LexiconError> {
        let unreadable = |source| LexiconError::FileUnreadable {
            path: path.to_path_buf(),
            source,
        };
        let mut raw = String::new();
        File::open(path)
            .and_then(|f| BufReader::new(f).read_to_string(&mut raw))
            .map_err(unreadable)?;
        let lex = Self::parse(&raw, path, kind, columns)?;
        if lex.is_empty() {
            return Err(LexiconError::EmptyLexicon {
                path: path.to_path_buf(),
            });
        }
        Ok(lex)
    }

    /// Looks for `<kind>.tsv` then `<kind>.csv` inside `dir`.
    pub fn load_from_dir(
        dir: &Path,
        kind: LexiconKind,
        columns: &LexiconColumns,
    ) -> Result<Self, LexiconError> {
        for ext in ["tsv", "csv"] {
            let candidate = dir.join(format!("{}.{ext}", kind.file_stem()));
            if candidate.is_file() {
                return Self::load_with_columns(&candidate, kind, columns);
            }
        }
        Err(LexiconError::NotInDirectory {
            dir: dir.to_path_buf(),
            kind,
        })
    }

    fn parse(
        raw: &str,
        path: &Path,
        kind: LexiconKind,
        columns: &LexiconColumns,
    ) -> Result<Self, LexiconError> {
        let header = raw.lines().next();
        let delimiter = match header {
            Some(h) if h.contains('\t') => b'\t',
            _ => b',',
        };
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(raw.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| LexiconError::MalformedRow {
                path: path.to_path_buf(),
                line: 1,
                reason: e.to_string(),
            })?
            .clone();
        let find = |name: &str| {
            headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case(name))
                .ok_or_else(|| LexiconError::MissingColumn {
                    path: path.to_path_buf(),
                    column: name.to_string(),
                })
        };
        let word_col = find(&columns.word)?;
        let value_col = find(&columns.value)?;

        let mut lex = Lexicon::empty(kind);
        for record in reader.records() {
            let malformed = |line: u64, reason: String| LexiconError::MalformedRow {
                path: path.to_path_buf(),
                line,
                reason,
            };
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                malformed(line, e.to_string())
            })?;
            let line = record.position().map_or(0, |p| p.line());
            if record.iter().all(str::is_empty) {
                continue;
            }
            let word = record
                .get(word_col)
                .ok_or_else(|| malformed(line, "missing word column".into()))?;
            let value = record
                .get(value_col)
                .ok_or_else(|| malformed(line, "missing value column".into()))?;
            let value: f64 = value
                .parse()
                .map_err(|_| malformed(line, format!("value {value:?} is not a number")))?;
            lex.insert(word, value).map_err(|reason| malformed(line, reason))?;
        }
        Ok(lex)
    }

    pub fn kind(&self) -> LexiconKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of duplicate rows ignored during loading.
    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    /// Number of data rows read (duplicates included).
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn get(&self, norm: &str) -> Option<f64> {
        self.entries.get(norm).copied()
    }

    /// Looks up `norm`, falling back to naive suffix-stripped lemmas when
    /// `lemma_fallback` is set.
    pub fn lookup(&self, norm: &str, lemma_fallback: bool) -> Option<f64> {
        self.get(norm).or_else(|| {
            if lemma_fallback {
                lemma_candidates(norm).find_map(|c| self.get(&c))
            } else {
                None
            }
        })
    }

    /// Sums values over the word tokens of `tokens`. Out-of-vocabulary words
    /// add nothing and are counted as misses.
    pub fn lookup_sum(&self, tokens: &[Token], lemma_fallback: bool) -> LookupSum {
        let mut out = LookupSum::default();
        for tok in tokens.iter().filter(|t| t.is_word) {
            match self.lookup(&tok.norm, lemma_fallback) {
                Some(v) => {
                    out.sum += v;
                    out.hits += 1;
                }
                None => out.misses += 1,
            }
        }
        out
    }
}

/// Candidate lemmas for an inflected form, most specific rule first.
fn lemma_candidates(word: &str) -> impl Iterator<Item = String> + '_ {
    const RULES: &[(&str, &str)] = &[
        ("ies", "y"),
        ("es", ""),
        ("s", ""),
        ("ied", "y"),
        ("ed", ""),
        ("ed", "e"),
        ("ing", ""),
        ("ing", "e"),
    ];
    let stripped = RULES.iter().filter_map(move |(suffix, repl)| {
        let stem = word.strip_suffix(suffix)?;
        (stem.chars().count() >= 2).then(|| format!("{stem}{repl}"))
    });
    // running -> run, stopped -> stop
    let undoubled = ["ing", "ed"].into_iter().filter_map(move |suffix| {
        let stem = word.strip_suffix(suffix)?;
        let mut chars = stem.chars().rev();
        let (last, prev) = (chars.next()?, chars.next()?);
        (last == prev && stem.len() >= 3).then(|| stem[..stem.len() - last.len_utf8()].to_string())
    });
    stripped.chain(undoubled)
}
