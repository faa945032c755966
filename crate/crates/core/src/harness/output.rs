//! CSV and metadata writers.
//!
//! | file | columns |
//! |------|---------|
//! | `errors.csv` | `t, cpu_seconds, err_psi_l2, err_omega_l2, err_omega_linf` |
//! | `reference.csv` | `t, psi_l2, omega_l2, omega_linf` |
//! | `trajectories.csv` | `t, observer_id, x, y` |
//! | `spectrum.csv` | `k, reference, assimilated` |
//! | `index.csv` | `name, kind, observers, status, t_final, err_psi_l2, cpu_seconds, dir` |
//!
//! `t` is time since the start of assimilation.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;

use super::run::RunSummary;
use crate::assimilator::{ErrorRecord, ReferenceNorms};
use crate::observers::Point;
use crate::{Error, Result};

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(format!("{}: {e}", path.display())))
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| csv_error(path, e))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_errors_csv(path: &Path, records: &[ErrorRecord]) -> Result<()> {
    if records.is_empty() {
        std::fs::write(path, "t,cpu_seconds,err_psi_l2,err_omega_l2,err_omega_linf\n")?;
        return Ok(());
    }
    write_rows(path, records)
}

pub fn read_errors_csv(path: &Path) -> Result<Vec<ErrorRecord>> {
    #[derive(serde::Deserialize)]
    struct Row {
        t: f64,
        cpu_seconds: f64,
        err_psi_l2: f64,
        err_omega_l2: f64,
        err_omega_linf: f64,
    }
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    r.deserialize::<Row>()
        .map(|row| {
            let row = row.map_err(|e| csv_error(path, e))?;
            Ok(ErrorRecord {
                t: row.t,
                cpu_seconds: row.cpu_seconds,
                err_psi_l2: row.err_psi_l2,
                err_omega_l2: row.err_omega_l2,
                err_omega_linf: row.err_omega_linf,
            })
        })
        .collect()
}

pub fn write_reference_csv(path: &Path, norms: &[ReferenceNorms]) -> Result<()> {
    write_rows(path, norms)
}

#[derive(Serialize)]
struct SpectrumRow {
    k: usize,
    reference: f64,
    assimilated: f64,
}

pub fn write_spectrum_csv(path: &Path, reference: &[f64], assimilated: &[f64]) -> Result<()> {
    let rows: Vec<SpectrumRow> = reference
        .iter()
        .zip(assimilated)
        .enumerate()
        .map(|(k, (&r, &a))| SpectrumRow { k, reference: r, assimilated: a })
        .collect();
    write_rows(path, &rows)
}

#[derive(Serialize)]
struct TrajectoryRow {
    t: f64,
    observer_id: usize,
    x: f64,
    y: f64,
}

/// Streams observer positions as they move.
pub struct TrajectoryWriter {
    inner: csv::Writer<BufWriter<File>>,
    path: std::path::PathBuf,
}

impl TrajectoryWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let file = BufWriter::new(File::create(path)?);
        Ok(Self { inner: csv::Writer::from_writer(file), path: path.to_path_buf() })
    }

    pub fn record(&mut self, t: f64, positions: &[Point]) -> Result<()> {
        for (observer_id, p) in positions.iter().enumerate() {
            self.inner
                .serialize(TrajectoryRow { t, observer_id, x: p[0], y: p[1] })
                .map_err(|e| csv_error(&self.path, e))?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

#[derive(Serialize)]
struct IndexRow<'a> {
    name: &'a str,
    kind: &'a str,
    observers: usize,
    status: &'a str,
    t_final: f64,
    err_psi_l2: f64,
    cpu_seconds: f64,
    dir: String,
}

pub fn write_index_csv(path: &Path, runs: &[RunSummary]) -> Result<()> {
    let rows: Vec<IndexRow> = runs
        .iter()
        .map(|r| IndexRow {
            name: &r.name,
            kind: r.kind.name(),
            observers: r.observer_count,
            status: r.status.name(),
            t_final: r.t_final,
            err_psi_l2: r.final_error.map_or(f64::NAN, |e| e.err_psi_l2),
            cpu_seconds: r.cpu_seconds,
            dir: r.output_dir.as_ref().map(|d| d.display().to_string()).unwrap_or_default(),
        })
        .collect();
    write_rows(path, &rows)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(file, value)?;
    Ok(())
}
