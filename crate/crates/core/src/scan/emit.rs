use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ScanRow, ScanSummary};

pub const CSV_COLUMNS: [&str; 16] = [
    "pair_key",
    "knotJ",
    "knotK",
    "detJ",
    "detK",
    "coprime",
    "bound_sigma",
    "bound_s",
    "bound_tau",
    "bound_fp",
    "d1_status",
    "d2_status",
    "lower",
    "upper",
    "exact",
    "millis",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Text,
    Csv,
    Json,
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Text => "text",
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        })
    }
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown format {other:?}: expected text, csv or json")),
        }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_fields(r: &ScanRow) -> [String; 16] {
    [
        r.pair_key.clone(),
        r.knot_j.clone(),
        r.knot_k.clone(),
        r.det_j.to_string(),
        r.det_k.to_string(),
        r.coprime.to_string(),
        r.bound_sigma.to_string(),
        opt(r.bound_s),
        opt(r.bound_tau),
        r.bound_fp.to_string(),
        r.d1_status.to_string(),
        r.d2_status.to_string(),
        r.lower.to_string(),
        opt(r.upper),
        r.exact.to_string(),
        opt(r.millis),
    ]
}

#[derive(Serialize)]
struct JsonReport<'a> {
    summary: &'a ScanSummary,
    rows: &'a [ScanRow],
}

/// Writes rows and summary. Missing values are empty CSV fields and JSON `null`.
pub fn emit_report(
    rows: &[ScanRow],
    summary: &ScanSummary,
    format: ReportFormat,
    out: &mut dyn Write,
) -> std::io::Result<()> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_COLUMNS)?;
            for r in rows {
                w.write_record(csv_fields(r))?;
            }
            w.flush()?;
        }
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, &JsonReport { summary, rows })?;
            writeln!(out)?;
        }
        ReportFormat::Text => {
            for r in rows {
                let upper = r.upper.map_or("?".to_string(), |u| u.to_string());
                writeln!(
                    out,
                    "{:<28} d1={:<12} d2={:<12} lower={} upper={}{}",
                    r.pair_key,
                    r.d1_status,
                    r.d2_status,
                    r.lower,
                    upper,
                    if r.exact { " exact" } else { "" }
                )?;
            }
            write_summary(summary, out)?;
        }
    }
    Ok(())
}

fn write_summary(s: &ScanSummary, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "pairs: {} ({} prime, {} coprime, {} capped, {} exact)", s.pairs, s.prime_pairs, s.coprime_pairs, s.capped, s.exact)?;
    writeln!(out, "d>=2 beats classical: {} prime / {} all; exact: {} prime / {} all", s.d1_prime.beats, s.d1_all.beats, s.d1_prime.exact, s.d1_all.exact)?;
    writeln!(out, "d>=3 beats classical: {} prime / {} all; exact: {} prime / {} all", s.d2_prime.beats, s.d2_all.beats, s.d2_prime.exact, s.d2_all.exact)
}
