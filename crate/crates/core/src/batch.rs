//! Many-marker analysis: one two-group comparison per row of a matrix.
//!
//! Input is comma-separated text. The header's first cell is `id`; every
//! other header cell is the group label (`0` or `1`) of that column. Each
//! following line is one marker: its id, then one number per column.
//! Blank lines are skipped; CRLF line endings and a leading UTF-8 BOM are
//! accepted.

use std::collections::HashSet;
use std::io::{self, BufRead, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format::{fmt_num, fmt_opt};
use crate::inference::{infer_summaries, InferenceConfig};
use crate::types::{summarize, validate, InferenceResult, TwoGroupSample};
use crate::welch::{welch_summaries, WelchResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub id: String,
    pub sample: TwoGroupSample,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkerDataset {
    pub markers: Vec<Marker>,
    pub n0: usize,
    pub n1: usize,
}

fn split_cells(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

pub fn parse_matrix<R: BufRead>(input: R) -> Result<MarkerDataset> {
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut header = None;
    for (line_no, line) in lines.by_ref() {
        let line = line.map_err(|e| Error::MalformedHeader {
            line: line_no,
            reason: e.to_string(),
        })?;
        let line = line.trim_start_matches('\u{feff}');
        if !line.trim().is_empty() {
            header = Some((line_no, line.to_string()));
            break;
        }
    }
    let (header_line, header) = header.ok_or(Error::MalformedHeader {
        line: 1,
        reason: "input is empty".into(),
    })?;
    let cells = split_cells(&header);
    if cells[0] != "id" {
        return Err(Error::MalformedHeader {
            line: header_line,
            reason: format!("first cell must be \"id\", found {:?}", cells[0]),
        });
    }
    let mut labels = Vec::with_capacity(cells.len() - 1);
    for cell in &cells[1..] {
        match *cell {
            "0" => labels.push(false),
            "1" => labels.push(true),
            other => {
                return Err(Error::MalformedHeader {
                    line: header_line,
                    reason: format!("group label must be 0 or 1, found {other:?}"),
                })
            }
        }
    }
    let n1 = labels.iter().filter(|&&t| t).count();
    let n0 = labels.len() - n1;
    if n0 < 2 || n1 < 2 {
        return Err(Error::MalformedHeader {
            line: header_line,
            reason: format!("need at least 2 columns per group, found n0={n0}, n1={n1}"),
        });
    }

    let mut markers = Vec::new();
    let mut seen = HashSet::new();
    for (line_no, line) in lines {
        let line = line.map_err(|e| Error::InvalidSample(format!("line {line_no}: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let cells = split_cells(&line);
        if cells.len() != labels.len() + 1 {
            return Err(Error::RaggedRow {
                line: line_no,
                expected: labels.len() + 1,
                found: cells.len(),
            });
        }
        let id = cells[0].to_string();
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId { line: line_no, id });
        }
        let mut y0 = Vec::with_capacity(n0);
        let mut y1 = Vec::with_capacity(n1);
        for (col, (cell, &is_test)) in cells[1..].iter().zip(&labels).enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::NonNumericCell {
                line: line_no,
                column: col + 2,
                token: cell.to_string(),
            })?;
            if is_test {
                y1.push(v);
            } else {
                y0.push(v);
            }
        }
        markers.push(Marker {
            id,
            sample: TwoGroupSample::new(y0, y1),
        });
    }
    Ok(MarkerDataset { markers, n0, n1 })
}

/// Results of both methods for one marker.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkerFit {
    pub proposed: InferenceResult,
    pub welch: WelchResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkerResult {
    pub id: String,
    pub outcome: std::result::Result<MarkerFit, Error>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BatchSummary {
    pub markers: usize,
    pub failed: usize,
    pub significant_proposed: usize,
    pub significant_welch: usize,
    pub empty_proposed: usize,
}

impl std::fmt::Display for BatchSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "significant_proposed={} significant_welch={} empty_proposed={} markers={} failed={}",
            self.significant_proposed, self.significant_welch, self.empty_proposed, self.markers, self.failed
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchReport {
    pub results: Vec<MarkerResult>,
    pub summary: BatchSummary,
}

impl BatchReport {
    /// Markers that could not be analyzed, with the reason.
    pub fn failures(&self) -> impl Iterator<Item = (&str, &Error)> {
        self.results
            .iter()
            .filter_map(|r| r.outcome.as_ref().err().map(|e| (r.id.as_str(), e)))
    }
}

fn analyze_marker(marker: &Marker, config: &InferenceConfig) -> MarkerResult {
    let outcome = (|| {
        validate(&marker.sample)?;
        let s0 = summarize(&marker.sample.y0)?;
        let s1 = summarize(&marker.sample.y1)?;
        Ok(MarkerFit {
            proposed: infer_summaries(&s0, &s1, config)?,
            welch: welch_summaries(&s0, &s1, config.alpha)?,
        })
    })();
    MarkerResult {
        id: marker.id.clone(),
        outcome,
    }
}

fn summarize_results(results: &[MarkerResult]) -> BatchSummary {
    let mut s = BatchSummary {
        markers: results.len(),
        ..BatchSummary::default()
    };
    for r in results {
        match &r.outcome {
            Ok(fit) => {
                s.significant_proposed += fit.proposed.significant as usize;
                s.significant_welch += fit.welch.significant as usize;
                s.empty_proposed += fit.proposed.interval.is_empty() as usize;
            }
            Err(_) => s.failed += 1,
        }
    }
    s
}

/// Runs both methods on every marker in parallel; results keep input order.
pub fn analyze_all(dataset: &MarkerDataset, alpha: f64) -> Result<BatchReport> {
    let config = InferenceConfig::with_alpha(alpha);
    config.check()?;
    let results: Vec<MarkerResult> = dataset
        .markers
        .par_iter()
        .map(|m| analyze_marker(m, &config))
        .collect();
    let summary = summarize_results(&results);
    Ok(BatchReport { results, summary })
}

/// Single-threaded variant of [`analyze_all`].
pub fn analyze_all_serial(dataset: &MarkerDataset, alpha: f64) -> Result<BatchReport> {
    let config = InferenceConfig::with_alpha(alpha);
    config.check()?;
    let results: Vec<MarkerResult> = dataset
        .markers
        .iter()
        .map(|m| analyze_marker(m, &config))
        .collect();
    let summary = summarize_results(&results);
    Ok(BatchReport { results, summary })
}

pub const RESULT_HEADER: &str =
    "id,delta_hat,rmse,ci_lo,ci_hi,empty,significant,welch_delta,welch_lo,welch_hi,welch_significant,status";

fn status_cell(err: &Error) -> String {
    err.to_string().replace([',', '\n', '\r'], ";")
}

/// Writes one result line (no header).
pub fn write_result_row<W: Write>(out: &mut W, result: &MarkerResult) -> io::Result<()> {
    match &result.outcome {
        Ok(fit) => {
            let p = &fit.proposed;
            let w = &fit.welch;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},ok",
                result.id,
                fmt_num(p.delta_hat),
                fmt_num(p.rmse),
                fmt_opt(p.interval.lo()),
                fmt_opt(p.interval.hi()),
                p.interval.is_empty() as u8,
                p.significant as u8,
                fmt_num(w.delta_hat_std),
                fmt_opt(w.interval.lo()),
                fmt_opt(w.interval.hi()),
                w.significant as u8,
            )
        }
        Err(e) => writeln!(out, "{},,,,,,,,,,,{}", result.id, status_cell(e)),
    }
}

pub fn write_results<W: Write>(mut out: W, results: &[MarkerResult]) -> io::Result<()> {
    writeln!(out, "{RESULT_HEADER}")?;
    for r in results {
        write_result_row(&mut out, r)?;
    }
    Ok(())
}
