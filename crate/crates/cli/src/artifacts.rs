//! Atomic file output and the CSV/JSON layouts.

use std::fs;
use std::io::Write;
use std::path::Path;

use predfront_core::grid::interp_pred_to_line;
use predfront_core::SimulationResult;
use serde::Serialize;

use crate::error::CliError;

pub const FRONTS_HEADER: [&str; 7] = ["t", "g", "h", "g_dot", "h_dot", "sup_u", "probe_v"];
pub const SNAPSHOT_HEADER: [&str; 3] = ["x", "u", "v"];

/// Seventeen significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

pub fn csv_bytes<'a, I>(header: &[&str], rows: I) -> Result<Vec<u8>, CliError>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| fmt_num(v))).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let bytes = csv_bytes(header, rows.iter().map(Vec::as_slice))?;
    write_atomic(path, &bytes)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.into()))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn fronts_rows(r: &SimulationResult) -> Vec<Vec<f64>> {
    r.series.iter().map(|s| vec![s.t, s.g, s.h, s.g_dot, s.h_dot, s.sup_u, s.probe_v]).collect()
}

/// `x, u, v` on the prey grid for every snapshot.
pub fn snapshot_rows(r: &SimulationResult) -> Vec<Vec<Vec<f64>>> {
    let grid = r.numerics.straight_grid();
    let line = r.numerics.line_grid();
    r.snapshots
        .iter()
        .map(|s| {
            let u = interp_pred_to_line(&s.w, &grid, &s.front, &line).expect("recorded states are valid");
            line.x.iter().zip(&u).zip(&s.z).map(|((&x, &u), &v)| vec![x, u, v]).collect()
        })
        .collect()
}

/// Writes `fronts.csv` and, when asked, `snapshots/NNNN.csv`.
pub fn write_run(dir: &Path, r: &SimulationResult, snapshots: bool) -> Result<(), CliError> {
    write_csv(&dir.join("fronts.csv"), &FRONTS_HEADER, &fronts_rows(r))?;
    if snapshots {
        for (k, rows) in snapshot_rows(r).iter().enumerate() {
            write_csv(&dir.join("snapshots").join(format!("{k:04}.csv")), &SNAPSHOT_HEADER, rows)?;
        }
    }
    Ok(())
}

/// Reads a numeric CSV written by [`write_csv`]; returns header and rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = rdr.headers().map_err(csv_err)?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| CliError::Config(format!("{}: {e}", path.display()))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// CSV with preformatted cells, for tables that mix labels and numbers.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    write_atomic(path, &bytes)
}
