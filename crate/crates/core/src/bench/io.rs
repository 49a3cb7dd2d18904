//! CSV persistence of run records.
//!
//! The records file has the header `method,j,k,L,eta,M,time,F_GS`; the
//! populations sidecar is long format `record,slice,state,population` keyed by
//! the zero-based record index. Reals are written with 17 significant digits.

use std::path::Path;

use crate::bench::sweep::{Method, RunRecord};
use crate::error::{Error, Result};

pub const RECORD_HEADER: [&str; 8] = ["method", "j", "k", "L", "eta", "M", "time", "F_GS"];
pub const POPULATION_HEADER: [&str; 4] = ["record", "slice", "state", "population"];

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn from_csv(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => csv_error(path, line, format!("{other:?}")),
    }
}

/// Writes the records file and, when any record carries populations, the sidecar.
pub fn write_records(records: &[RunRecord], path: &Path, populations_path: Option<&Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| from_csv(path, e))?;
    w.write_record(RECORD_HEADER).map_err(|e| from_csv(path, e))?;
    for r in records {
        w.write_record([
            r.method.to_string(),
            r.j.to_string(),
            r.k.to_string(),
            r.slices.to_string(),
            r.eta.map(real).unwrap_or_default(),
            r.steps.to_string(),
            real(r.time),
            real(r.fidelity),
        ])
        .map_err(|e| from_csv(path, e))?;
    }
    w.flush()?;

    let Some(pop_path) = populations_path else {
        return Ok(());
    };
    if records.iter().all(|r| r.slice_populations.is_none()) {
        return Ok(());
    }
    let mut w = csv::Writer::from_path(pop_path).map_err(|e| from_csv(pop_path, e))?;
    w.write_record(POPULATION_HEADER).map_err(|e| from_csv(pop_path, e))?;
    for (index, r) in records.iter().enumerate() {
        for (slice, row) in r.slice_populations.iter().flatten().enumerate() {
            for (state, p) in row.iter().enumerate() {
                w.write_record([index.to_string(), slice.to_string(), state.to_string(), real(*p)])
                    .map_err(|e| from_csv(pop_path, e))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn check_header(path: &Path, found: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    if found.iter().ne(expected.iter().copied()) {
        return Err(csv_error(path, 1, format!("expected header {}", expected.join(","))));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(path: &Path, line: u64, row: &csv::StringRecord, i: usize, name: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = row
        .get(i)
        .ok_or_else(|| csv_error(path, line, format!("missing column {name}")))?;
    raw.parse()
        .map_err(|e| csv_error(path, line, format!("column {name}: `{raw}`: {e}")))
}

/// Reads records back; the sidecar is read when `populations_path` exists.
pub fn read_records(path: &Path, populations_path: Option<&Path>) -> Result<Vec<RunRecord>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| from_csv(path, e))?;
    check_header(path, reader.headers().map_err(|e| from_csv(path, e))?, &RECORD_HEADER)?;
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| from_csv(path, e))?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != RECORD_HEADER.len() {
            return Err(csv_error(
                path,
                line,
                format!("expected 8 columns, found {}", row.len()),
            ));
        }
        let eta = match row.get(4) {
            Some("") => None,
            _ => Some(field::<f64>(path, line, &row, 4, "eta")?),
        };
        let fidelity: f64 = field(path, line, &row, 7, "F_GS")?;
        if !(0.0..=1.0).contains(&fidelity) {
            return Err(csv_error(path, line, format!("F_GS = {fidelity} outside [0, 1]")));
        }
        records.push(RunRecord {
            method: field::<Method>(path, line, &row, 0, "method")?,
            j: field(path, line, &row, 1, "j")?,
            k: field(path, line, &row, 2, "k")?,
            slices: field(path, line, &row, 3, "L")?,
            eta,
            steps: field(path, line, &row, 5, "M")?,
            time: field(path, line, &row, 6, "time")?,
            fidelity,
            slice_populations: None,
        });
    }

    let Some(pop_path) = populations_path.filter(|p| p.exists()) else {
        return Ok(records);
    };
    let mut reader = csv::Reader::from_path(pop_path).map_err(|e| from_csv(pop_path, e))?;
    check_header(
        pop_path,
        reader.headers().map_err(|e| from_csv(pop_path, e))?,
        &POPULATION_HEADER,
    )?;
    for row in reader.records() {
        let row = row.map_err(|e| from_csv(pop_path, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let index: usize = field(pop_path, line, &row, 0, "record")?;
        let slice: usize = field(pop_path, line, &row, 1, "slice")?;
        let state: usize = field(pop_path, line, &row, 2, "state")?;
        let value: f64 = field(pop_path, line, &row, 3, "population")?;
        let record = records
            .get_mut(index)
            .ok_or_else(|| csv_error(pop_path, line, format!("record index {index} out of range")))?;
        let table = record.slice_populations.get_or_insert_with(Vec::new);
        if slice > table.len() || (slice < table.len().saturating_sub(1)) {
            return Err(csv_error(pop_path, line, "rows out of order"));
        }
        if slice == table.len() {
            table.push(Vec::new());
        }
        let row_values = &mut table[slice];
        if state != row_values.len() {
            return Err(csv_error(pop_path, line, "rows out of order"));
        }
        row_values.push(value);
    }
    Ok(records)
}
