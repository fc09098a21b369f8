//! Per-iteration statistics of the best-so-far value across trials.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{io_err, CliError, Result};
use crate::experiment::TrialRecord;
use crate::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(CliError::InvalidSpec(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub rows: Vec<SummaryRow>,
}

impl Summary {
    pub fn last(&self) -> Option<&SummaryRow> {
        self.rows.last()
    }

    pub fn final_mean(&self) -> f64 {
        self.last().map_or(f64::NAN, |r| r.mean)
    }

    pub fn final_median(&self) -> f64 {
        self.last().map_or(f64::NAN, |r| r.median)
    }
}

/// Quantile of sorted data by linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Statistics of one column of values, one value per trial.
pub fn row_stats(n: usize, values: &[f64]) -> SummaryRow {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
    SummaryRow {
        n,
        mean,
        median: quantile(&sorted, 0.5),
        q25: quantile(&sorted, 0.25),
        q75: quantile(&sorted, 0.75),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
    }
}

/// Aggregates the best-so-far columns of equally long trials. Trials are
/// summed in the order given, so callers pass them in trial order.
pub fn summarize(records: &[TrialRecord]) -> Result<Summary> {
    let first = records.first().ok_or(CliError::EmptyRecords)?;
    let len = first.rows.len();
    for r in records {
        if r.rows.len() != len {
            return Err(CliError::RaggedRecords {
                trial: r.trial,
                expected: len,
                got: r.rows.len(),
            });
        }
    }
    let mut column = vec![0.0; records.len()];
    let rows = (0..len)
        .map(|i| {
            for (slot, r) in column.iter_mut().zip(records) {
                *slot = r.rows[i].best_z;
            }
            row_stats(first.rows[i].n, &column)
        })
        .collect();
    Ok(Summary {
        trials: records.len(),
        rows,
    })
}

pub fn write_summary<W: Write>(summary: &Summary, format: OutputFormat, w: W) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut out = csv::Writer::from_writer(w);
            out.write_record(["n", "mean", "median", "q25", "q75", "min", "max"])?;
            for r in &summary.rows {
                out.write_record([
                    r.n.to_string(),
                    fmt_f64(r.mean),
                    fmt_f64(r.median),
                    fmt_f64(r.q25),
                    fmt_f64(r.q75),
                    fmt_f64(r.min),
                    fmt_f64(r.max),
                ])?;
            }
            out.flush().map_err(CliError::Write)?;
        }
        OutputFormat::Json => {
            let mut w = w;
            serde_json::to_writer_pretty(&mut w, summary)?;
            w.write_all(b"\n").map_err(CliError::Write)?;
        }
    }
    Ok(())
}

pub fn emit_summary(summary: &Summary, format: OutputFormat, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    write_summary(summary, format, &mut w)?;
    w.flush().map_err(io_err(path))
}

/// Parses a summary back from either format.
pub fn read_summary(path: &Path) -> Result<Summary> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    if path.extension().is_some_and(|e| e == "json") {
        return Ok(serde_json::from_str(&text)?);
    }
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows = rdr
        .deserialize()
        .collect::<std::result::Result<Vec<SummaryRow>, _>>()?;
    Ok(Summary { trials: 0, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{IterationRow, RowMode};

    fn record(trial: usize, best: &[f64]) -> TrialRecord {
        let rows = best
            .iter()
            .enumerate()
            .map(|(i, &b)| IterationRow {
                n: i + 1,
                mode: RowMode::Psi,
                x: vec![0.0],
                z: b,
                best_z: b,
                gamma: None,
                micros: 0,
            })
            .collect();
        TrialRecord {
            trial,
            seed: trial as u64,
            rows,
            gap: None,
        }
    }

    #[test]
    fn single_trial_collapses_statistics() {
        let s = summarize(&[record(0, &[3.0, 2.0, 2.0])]).unwrap();
        for (r, v) in s.rows.iter().zip([3.0, 2.0, 2.0]) {
            for stat in [r.mean, r.median, r.q25, r.q75, r.min, r.max] {
                assert_eq!(stat, v);
            }
        }
    }

    #[test]
    fn two_trial_arithmetic() {
        let s = summarize(&[record(0, &[1.0]), record(1, &[3.0])]).unwrap();
        let r = &s.rows[0];
        assert_eq!((r.mean, r.median, r.min, r.max), (2.0, 2.0, 1.0, 3.0));
        assert_eq!((r.q25, r.q75), (1.5, 2.5));
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0, 10.0];
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.25), 2.0);
        assert!((quantile(&v, 0.9) - 7.6).abs() < 1e-12);
    }

    #[test]
    fn empty_and_ragged_inputs_fail() {
        assert!(matches!(summarize(&[]), Err(CliError::EmptyRecords)));
        let err = summarize(&[record(0, &[1.0, 1.0]), record(1, &[1.0])]).unwrap_err();
        assert!(matches!(err, CliError::RaggedRecords { trial: 1, .. }));
    }

    #[test]
    fn csv_and_json_agree() {
        let s = summarize(&[record(0, &[0.1, -1.0 / 3.0]), record(1, &[2.5e-17, -7.0])]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("s.csv");
        let json_path = dir.path().join("s.json");
        emit_summary(&s, OutputFormat::Csv, &csv_path).unwrap();
        emit_summary(&s, OutputFormat::Json, &json_path).unwrap();
        let a = read_summary(&csv_path).unwrap();
        let b = read_summary(&json_path).unwrap();
        assert_eq!(a.rows, s.rows);
        assert_eq!(b.rows, s.rows);
    }
}
