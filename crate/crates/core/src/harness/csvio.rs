//! CSV persistence of sweep records and the JSON-lines summary.

use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::sig9;
use crate::measures::MeasureKind;

use super::imse::ImseRow;
use super::sweep::SweepRecord;

pub const RECORD_HEADER: [&str; 12] =
    ["family", "nonlinearity", "rho", "I_theoretical", "n", "run_index", "seed", "measure", "estimate", "theoretical", "runtime_ns", "error"];

pub const IMSE_HEADER: [&str; 8] = ["family", "nonlinearity", "measure", "n", "imse", "grid_points", "excluded_nan", "error"];

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("csv: {other:?}")),
    }
}

/// Finite values with nine significant digits; NaN as an empty field.
fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        sig9(v)
    }
}

pub fn write_records<W: Write>(out: W, records: &[SweepRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(RECORD_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.family.clone(),
            r.nonlinearity.clone(),
            num(r.rho),
            num(r.i_theoretical),
            r.n.to_string(),
            r.run_index.to_string(),
            r.seed.to_string(),
            r.measure.name().to_string(),
            num(r.estimate),
            num(r.theoretical),
            r.runtime_ns.map(|t| t.to_string()).unwrap_or_default(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn parse_num(field: &str, name: &str, line: usize) -> Result<f64> {
    if field.is_empty() {
        return Ok(f64::NAN);
    }
    field.parse().map_err(|_| Error::Parse(format!("line {line}: bad {name} '{field}'")))
}

fn parse_int<T: std::str::FromStr>(field: &str, name: &str, line: usize) -> Result<T> {
    field.parse().map_err(|_| Error::Parse(format!("line {line}: bad {name} '{field}'")))
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rd.headers().map_err(csv_err)?.clone();
    if header.iter().ne(RECORD_HEADER.iter().copied()) {
        return Err(Error::Parse(format!("unexpected header; expected {}", RECORD_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for (k, row) in rd.records().enumerate() {
        let row = row.map_err(csv_err)?;
        let line = k + 2;
        let f = |i: usize| row.get(i).unwrap_or("");
        let measure: MeasureKind = f(7).parse()?;
        out.push(SweepRecord {
            family: f(0).to_string(),
            nonlinearity: f(1).to_string(),
            rho: parse_num(f(2), "rho", line)?,
            i_theoretical: parse_num(f(3), "I_theoretical", line)?,
            n: parse_int(f(4), "n", line)?,
            run_index: parse_int(f(5), "run_index", line)?,
            seed: parse_int(f(6), "seed", line)?,
            measure,
            estimate: parse_num(f(8), "estimate", line)?,
            theoretical: parse_num(f(9), "theoretical", line)?,
            runtime_ns: if f(10).is_empty() { None } else { Some(parse_int(f(10), "runtime_ns", line)?) },
            error: if f(11).is_empty() { None } else { Some(f(11).to_string()) },
        });
    }
    Ok(out)
}

pub fn write_imse<W: Write>(out: W, rows: &[ImseRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(IMSE_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.family.clone(),
            r.nonlinearity.clone(),
            r.measure.name().to_string(),
            r.n.to_string(),
            num(r.imse),
            r.grid_points.to_string(),
            r.excluded_nan.to_string(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Per-cell statistics for the summary sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub family: String,
    pub nonlinearity: String,
    pub rho: f64,
    pub n: usize,
    pub measure: MeasureKind,
    pub i_theoretical: f64,
    pub theoretical: f64,
    pub mean: f64,
    pub std: f64,
    pub runs: usize,
    pub failures: usize,
}

/// Groups consecutive records sharing `(family, nonlinearity, rho, n, measure)`.
pub fn summarize(records: &[SweepRecord]) -> Vec<CellSummary> {
    let mut groups: Vec<(CellSummary, Vec<f64>)> = Vec::new();
    for r in records {
        let pos = groups.iter().position(|(s, _)| {
            s.family == r.family && s.nonlinearity == r.nonlinearity && s.rho == r.rho && s.n == r.n && s.measure == r.measure
        });
        let idx = pos.unwrap_or_else(|| {
            groups.push((
                CellSummary {
                    family: r.family.clone(),
                    nonlinearity: r.nonlinearity.clone(),
                    rho: r.rho,
                    n: r.n,
                    measure: r.measure,
                    i_theoretical: r.i_theoretical,
                    theoretical: r.theoretical,
                    mean: f64::NAN,
                    std: f64::NAN,
                    runs: 0,
                    failures: 0,
                },
                Vec::new(),
            ));
            groups.len() - 1
        });
        let (s, vals) = &mut groups[idx];
        s.runs += 1;
        if r.estimate.is_nan() {
            s.failures += 1;
        } else {
            vals.push(r.estimate);
        }
    }
    groups
        .into_iter()
        .map(|(mut s, vals)| {
            if !vals.is_empty() {
                let m = vals.iter().sum::<f64>() / vals.len() as f64;
                s.mean = m;
                s.std = if vals.len() > 1 {
                    (vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (vals.len() - 1) as f64).sqrt()
                } else {
                    f64::NAN
                };
            }
            s
        })
        .collect()
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SummaryLine<'a> {
    Cell(&'a CellSummary),
    Imse(&'a ImseRow),
}

/// Writes one JSON object per line: cell statistics, then IMSE rows.
/// Non-finite numbers become `null`.
pub fn write_summary<W: Write>(mut out: W, cells: &[CellSummary], imse: &[ImseRow]) -> Result<()> {
    let lines = cells.iter().map(SummaryLine::Cell).chain(imse.iter().map(SummaryLine::Imse));
    for line in lines {
        let json = serde_json::to_string(&line).map_err(|e| Error::Parse(e.to_string()))?;
        writeln!(out, "{json}")?;
    }
    Ok(())
}
