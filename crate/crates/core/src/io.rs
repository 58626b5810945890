//! Edgelist and covariate files.
//!
//! Edgelists are CSV with header `t,s,r` or a JSON array of `[t, s, r]`
//! triples. Missing sender/receiver fields (empty, `NA`, or JSON `null`) are
//! only legal on the terminal null row of an exact-time edgelist.
//!
//! Actor covariates are CSV with one row per actor and one column per
//! covariate. Dyad covariates are CSV holding `p` stacked `n × n` slices
//! (rows are senders, columns receivers). A header row is optional in both.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::covariates::Covariate;
use crate::error::{RemError, Result};
use crate::history::{parse_edgelist, EventHistory, Timing};

fn parse_cell(raw: &str) -> std::result::Result<Option<f64>, ()> {
    let s = raw.trim();
    if s.is_empty() || s.eq_ignore_ascii_case("na") || s.eq_ignore_ascii_case("nan") {
        return Ok(None);
    }
    s.parse::<f64>().map(Some).map_err(|_| ())
}

/// Numeric CSV table; a leading non-numeric row is taken as a header.
fn read_table<R: Read>(reader: R) -> Result<Vec<Vec<Option<f64>>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<Option<f64>>, ()> = rec.iter().map(parse_cell).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(()) if i == 0 => continue,
            Err(()) => {
                return Err(RemError::InvalidInput(format!(
                    "line {}: non-numeric value in {:?}",
                    i + 1,
                    rec.iter().collect::<Vec<_>>()
                )))
            }
        }
    }
    Ok(rows)
}

fn edgelist_rows(table: Vec<Vec<Option<f64>>>) -> Result<Vec<[Option<f64>; 3]>> {
    table
        .into_iter()
        .enumerate()
        .map(|(i, row)| match row.as_slice() {
            [t, s, r] => Ok([*t, *s, *r]),
            [t] => Ok([*t, None, None]),
            _ => Err(RemError::InvalidInput(format!(
                "edgelist row {} has {} columns, expected 3",
                i + 1,
                row.len()
            ))),
        })
        .collect()
}

pub fn edgelist_rows_from_csv<R: Read>(reader: R) -> Result<Vec<[Option<f64>; 3]>> {
    edgelist_rows(read_table(reader)?)
}

pub fn edgelist_rows_from_json(text: &str) -> Result<Vec<[Option<f64>; 3]>> {
    let rows: Vec<Vec<Option<f64>>> = serde_json::from_str(text)?;
    edgelist_rows(rows)
}

/// Reads an edgelist file; `.json` files (or content starting with `[`) are
/// parsed as JSON, everything else as CSV.
pub fn read_edgelist(path: &Path, n: usize, timing: Timing) -> Result<EventHistory> {
    let text = fs::read_to_string(path)?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || text.trim_start().starts_with('[');
    let rows = if is_json {
        edgelist_rows_from_json(&text)?
    } else {
        edgelist_rows_from_csv(text.as_bytes())?
    };
    parse_edgelist(&rows, n, timing)
}

fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Writes `t,s,r` CSV with 1-based ids and, for exact histories, the
/// terminal null row.
pub fn write_edgelist<W: Write>(h: &EventHistory, mut out: W) -> Result<()> {
    writeln!(out, "t,s,r")?;
    for row in h.to_rows() {
        let cells: Vec<String> = row.iter().map(|c| c.map(fmt_num).unwrap_or_default()).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn read_actor_covariate(path: &Path) -> Result<Covariate> {
    let table = read_table(fs::File::open(path)?)?;
    let values = complete(table, path)?;
    Ok(Covariate::actor(values))
}

/// Reads stacked `n × n` slices.
pub fn read_dyad_covariate(path: &Path, n: usize) -> Result<Covariate> {
    let table = read_table(fs::File::open(path)?)?;
    let rows = complete(table, path)?;
    if rows.is_empty() || rows.len() % n != 0 {
        return Err(RemError::Shape {
            entry: path.display().to_string(),
            expected: format!("a multiple of {n} rows"),
            found: format!("{} rows", rows.len()),
        });
    }
    let slices = rows.chunks(n).map(|c| c.to_vec()).collect();
    Ok(Covariate::dyad(slices))
}

fn complete(table: Vec<Vec<Option<f64>>>, path: &Path) -> Result<Vec<Vec<f64>>> {
    table
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.into_iter()
                .map(|c| {
                    c.ok_or_else(|| {
                        RemError::InvalidInput(format!("{}: missing value on data row {}", path.display(), i + 1))
                    })
                })
                .collect()
        })
        .collect()
}

/// Writes a count matrix as headerless CSV.
pub fn write_matrix<W: Write>(m: &[Vec<u64>], mut out: W) -> Result<()> {
    for row in m {
        let cells: Vec<String> = row.iter().map(u64::to_string).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
