use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::literal::parse_matrix_literal;
use crate::knots::{knot_det, knot_signature, KnotError, SeifertMatrix};

/// Prime knots up to ten crossings, extracted from KnotInfo.
pub const BUNDLED_TABLE: &str = include_str!("../../data/knotinfo_prime_le10.csv");
pub const BUNDLED_TABLE_NAME: &str = "knotinfo_prime_le10.csv";

/// Closed range of possible unknotting numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct URange {
    pub min: u32,
    pub max: u32,
}

impl URange {
    pub fn exact(u: u32) -> Self {
        URange { min: u, max: u }
    }

    pub fn is_exact(&self) -> bool {
        self.min == self.max
    }
}

impl std::ops::Add for URange {
    type Output = URange;

    fn add(self, rhs: URange) -> URange {
        URange {
            min: self.min + rhs.min,
            max: self.max + rhs.max,
        }
    }
}

impl fmt::Display for URange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.min)
        } else {
            write!(f, "{}..{}", self.min, self.max)
        }
    }
}

impl FromStr for URange {
    type Err = String;

    /// Accepts `n`, `lo..hi`, or KnotInfo's `[lo,hi]`.
    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        let parse = |x: &str| {
            x.trim()
                .parse::<u32>()
                .map_err(|_| format!("invalid unknotting number {s:?}"))
        };
        let r = if let Some((lo, hi)) = t.split_once("..") {
            URange {
                min: parse(lo)?,
                max: parse(hi)?,
            }
        } else if let Some(inner) = t.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
            let (lo, hi) = inner
                .split_once(',')
                .ok_or_else(|| format!("invalid unknotting number {s:?}"))?;
            URange {
                min: parse(lo)?,
                max: parse(hi)?,
            }
        } else {
            URange::exact(parse(t)?)
        };
        if r.min > r.max {
            return Err(format!("unknotting range {s:?} has min > max"));
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnotRecord {
    pub name: String,
    pub crossing_number: Option<u32>,
    pub seifert: SeifertMatrix,
    pub sigma: Option<i64>,
    pub det: Option<BigInt>,
    pub s: Option<i64>,
    pub tau: Option<i64>,
    pub u: Option<URange>,
    pub alternating: Option<bool>,
    pub bridge_index: Option<u32>,
    pub amphicheiral: Option<bool>,
}

impl KnotRecord {
    /// A record with only a Seifert matrix.
    pub fn new(name: impl Into<String>, seifert: SeifertMatrix) -> Self {
        KnotRecord {
            name: name.into(),
            crossing_number: None,
            seifert,
            sigma: None,
            det: None,
            s: None,
            tau: None,
            u: None,
            alternating: None,
            bridge_index: None,
            amphicheiral: None,
        }
    }

    pub fn is_two_bridge(&self) -> Option<bool> {
        self.bridge_index.map(|b| b == 2)
    }

    /// Cross-checks recorded columns against the Seifert matrix and fills
    /// `s`/`tau` for alternating knots from `-σ = s = 2τ`.
    fn validate(&mut self) -> Result<(), String> {
        let det = knot_det(&self.seifert);
        if let Some(d) = &self.det {
            if *d != det {
                return Err(format!(
                    "determinant column says {d}, Seifert matrix gives {det}"
                ));
            }
        }
        let sigma = knot_signature(&self.seifert);
        if let Some(s) = self.sigma {
            if s != sigma {
                return Err(format!(
                    "signature column says {s}, Seifert matrix gives {sigma}"
                ));
            }
        }
        if let Some(s) = self.s {
            if s % 2 != 0 {
                return Err(format!("s-invariant {s} is odd"));
            }
        }
        if self.alternating == Some(true) {
            self.s.get_or_insert(-sigma);
            self.tau.get_or_insert(-sigma / 2);
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed table: {0}")]
    Csv(String),
    #[error("missing required column {0:?}")]
    MissingColumn(&'static str),
    #[error("{} invalid record(s):\n{}", .0.len(), .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n"))]
    Records(Vec<RecordError>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line} ({name}): {message}")]
pub struct RecordError {
    pub line: u64,
    pub name: String,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Field delimiter; detected from the header (tab if present, else comma) when unset.
    pub delimiter: Option<u8>,
}

#[derive(Debug, Clone)]
pub struct KnotTable {
    records: Vec<KnotRecord>,
    index: HashMap<String, usize>,
    source: String,
    digest: String,
}

impl KnotTable {
    /// Builds a table from already-validated records; the digest covers the record names and matrices.
    pub fn from_records(records: Vec<KnotRecord>, source: impl Into<String>) -> Result<Self, TableError> {
        let mut hasher = Sha256::new();
        for r in &records {
            hasher.update(r.name.as_bytes());
            hasher.update(r.seifert.matrix().to_string().as_bytes());
            hasher.update(b"\n");
        }
        Self::assemble(records, source.into(), hex::encode(hasher.finalize()))
    }

    fn assemble(records: Vec<KnotRecord>, source: String, digest: String) -> Result<Self, TableError> {
        let mut index = HashMap::new();
        let mut dups = Vec::new();
        for (i, r) in records.iter().enumerate() {
            if index.insert(r.name.clone(), i).is_some() {
                dups.push(RecordError {
                    line: 0,
                    name: r.name.clone(),
                    message: "duplicate knot name".into(),
                });
            }
        }
        if !dups.is_empty() {
            return Err(TableError::Records(dups));
        }
        Ok(KnotTable {
            records,
            index,
            source,
            digest,
        })
    }

    pub fn bundled() -> Self {
        parse_table(BUNDLED_TABLE.as_bytes(), BUNDLED_TABLE_NAME, &LoadOptions::default())
            .expect("bundled table is valid")
    }

    pub fn get(&self, name: &str) -> Option<&KnotRecord> {
        self.index.get(name).map(|&i| &self.records[i])
    }

    pub fn records(&self) -> &[KnotRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// SHA-256 of the table bytes, hex encoded.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn is_amphicheiral(&self, name: &str) -> bool {
        self.get(name)
            .and_then(|r| r.amphicheiral)
            .unwrap_or(false)
    }
}

pub fn load_table(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<KnotTable, TableError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| TableError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_table(&bytes, &path.display().to_string(), opts)
}

const COLUMNS: [&str; 11] = [
    "name",
    "seifert_matrix",
    "crossing_number",
    "signature",
    "determinant",
    "s_invariant",
    "tau_invariant",
    "unknotting_number",
    "alternating",
    "bridge_index",
    "amphicheiral",
];

fn parse_flag(s: &str) -> Result<bool, String> {
    match s.trim() {
        "Y" | "y" | "true" | "TRUE" | "1" => Ok(true),
        "N" | "n" | "false" | "FALSE" | "0" => Ok(false),
        other => Err(format!("expected Y or N, got {other:?}")),
    }
}

fn parse_opt<T: FromStr>(field: Option<&str>, column: &str) -> Result<Option<T>, String> {
    match field.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| format!("invalid {column} {v:?}")),
    }
}

pub fn parse_table(bytes: &[u8], source: &str, opts: &LoadOptions) -> Result<KnotTable, TableError> {
    let header_line = bytes.split(|&b| b == b'\n').next().unwrap_or_default();
    let delimiter = opts
        .delimiter
        .unwrap_or(if header_line.contains(&b'\t') { b'\t' } else { b',' });
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let headers = reader
        .headers()
        .map_err(|e| TableError::Csv(e.to_string()))?
        .clone();
    let col: HashMap<&str, usize> = COLUMNS
        .iter()
        .filter_map(|&c| headers.iter().position(|h| h == c).map(|i| (c, i)))
        .collect();
    for required in ["name", "seifert_matrix"] {
        if !col.contains_key(required) {
            return Err(TableError::MissingColumn(required));
        }
    }

    let mut records = Vec::new();
    let mut errors = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| TableError::Csv(e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |c: &str| col.get(c).and_then(|&i| row.get(i));
        let name = field("name").unwrap_or_default().to_string();
        match parse_record(&name, &field) {
            Ok(r) => records.push(r),
            Err(message) => errors.push(RecordError {
                line,
                name,
                message,
            }),
        }
    }
    if !errors.is_empty() {
        return Err(TableError::Records(errors));
    }
    let digest = hex::encode(Sha256::digest(bytes));
    KnotTable::assemble(records, source.to_string(), digest)
}

fn parse_record<'a>(name: &str, field: &impl Fn(&str) -> Option<&'a str>) -> Result<KnotRecord, String> {
    if name.is_empty() {
        return Err("empty name".into());
    }
    let literal = field("seifert_matrix").unwrap_or_default();
    let matrix = parse_matrix_literal(literal).map_err(|e| format!("seifert_matrix: {e}"))?;
    let seifert = SeifertMatrix::new(matrix).map_err(|e| match e {
        KnotError::InvalidSeifert { reason, .. } => reason,
        other => other.to_string(),
    })?;
    let mut rec = KnotRecord {
        name: name.to_string(),
        crossing_number: parse_opt(field("crossing_number"), "crossing_number")?,
        seifert,
        sigma: parse_opt(field("signature"), "signature")?,
        det: parse_opt(field("determinant"), "determinant")?,
        s: parse_opt(field("s_invariant"), "s_invariant")?,
        tau: parse_opt(field("tau_invariant"), "tau_invariant")?,
        u: parse_opt(field("unknotting_number"), "unknotting_number")?,
        alternating: field("alternating")
            .filter(|s| !s.trim().is_empty())
            .map(parse_flag)
            .transpose()?,
        bridge_index: parse_opt(field("bridge_index"), "bridge_index")?,
        amphicheiral: field("amphicheiral")
            .filter(|s| !s.trim().is_empty())
            .map(parse_flag)
            .transpose()?,
    };
    rec.validate()?;
    Ok(rec)
}
