use std::fmt::Write as _;

use crate::bench::sweep::{Method, RunRecord};
use crate::error::{Error, Result};

/// Alternating records by descending `F_GS`, ties broken by smaller time;
/// at most `k` are returned.
pub fn top_k(records: &[RunRecord], k: usize) -> Vec<RunRecord> {
    let mut ranked: Vec<&RunRecord> = records.iter().filter(|r| r.method == Method::Alternating).collect();
    ranked.sort_by(|a, b| b.fidelity.total_cmp(&a.fidelity).then(a.time.total_cmp(&b.time)));
    ranked.into_iter().take(k).cloned().collect()
}

/// Fixed-width table with columns No., F_GS, T_eff, j, k, L.
pub fn table_report(rows: &[RunRecord]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:>4}  {:>8}  {:>9}  {:>3}  {:>3}  {:>3}",
        "No.", "F_GS", "T_eff", "j", "k", "L"
    )
    .unwrap();
    for (i, r) in rows.iter().enumerate() {
        writeln!(
            out,
            "{:>4}  {:>8.4}  {:>9.2}  {:>3}  {:>3}  {:>3}",
            i + 1,
            r.fidelity,
            r.time,
            r.j,
            r.k,
            r.slices
        )
        .unwrap();
    }
    out
}

/// Per-slice eigenstate populations as text, one line per slice, listing the
/// ground-state population, the most populated eigenstate and the Shannon
/// entropy of the distribution.
pub fn population_report(record: &RunRecord) -> Result<String> {
    let table = record.slice_populations.as_ref().ok_or(Error::MissingSlices)?;
    let mut out = String::new();
    writeln!(
        out,
        "{:>5}  {:>10}  {:>6}  {:>10}  {:>8}",
        "slice", "ground", "argmax", "max", "entropy"
    )
    .unwrap();
    for (l, row) in table.iter().enumerate() {
        let (arg, max) = argmax(row);
        writeln!(
            out,
            "{:>5}  {:>10.6}  {:>6}  {:>10.6}  {:>8.4}",
            l,
            row.first().copied().unwrap_or(0.0),
            arg,
            max,
            shannon_entropy(row)
        )
        .unwrap();
    }
    Ok(out)
}

pub fn argmax(row: &[f64]) -> (usize, f64) {
    row.iter().copied().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |best, (i, p)| {
            if p > best.1 {
                (i, p)
            } else {
                best
            }
        },
    )
}

/// `-sum p ln p` over entries with `p > 0`.
pub fn shannon_entropy(row: &[f64]) -> f64 {
    row.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
}
