//! Binary reference-state checkpoints.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic   8 bytes  "AOTSIMCK"
//! version u32
//! N       u64
//! nu, G   f64, f64
//! seed    u64      forcing seed
//! t       f64
//! step    u64      step index
//! dt      f64
//! band    f64, f64 forcing shell
//! hist    u64      number of history entries (0..=2)
//! omega   N*N complex (re f64, im f64)
//! per history entry: t f64, then N*N complex
//! ```

use std::collections::VecDeque;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::model::Physics;
use crate::integrator::{HistoryEntry, StepperState};
use crate::spectral::{Grid, SpectralField};
use crate::{Error, Result};

pub const MAGIC: &[u8; 8] = b"AOTSIMCK";
pub const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckpointHeader {
    pub n: usize,
    pub physics: Physics,
    pub t: f64,
    pub step_index: u64,
}

fn put_coeffs(w: &mut impl Write, coeffs: &[Complex64]) -> std::io::Result<()> {
    for c in coeffs {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_checkpoint(path: &Path, physics: &Physics, state: &StepperState) -> Result<()> {
    let fail = |e: std::io::Error| Error::Checkpoint { path: path.to_path_buf(), reason: e.to_string() };
    let mut w = BufWriter::new(File::create(path).map_err(fail)?);
    let body = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(state.grid().n() as u64).to_le_bytes())?;
        w.write_all(&physics.nu.to_le_bytes())?;
        w.write_all(&physics.grashof.to_le_bytes())?;
        w.write_all(&physics.forcing_seed.to_le_bytes())?;
        w.write_all(&state.t.to_le_bytes())?;
        w.write_all(&state.step_index.to_le_bytes())?;
        w.write_all(&physics.dt.to_le_bytes())?;
        w.write_all(&physics.forcing_band.0.to_le_bytes())?;
        w.write_all(&physics.forcing_band.1.to_le_bytes())?;
        w.write_all(&(state.history.len() as u64).to_le_bytes())?;
        put_coeffs(w, state.omega.coeffs())?;
        for h in &state.history {
            w.write_all(&h.t.to_le_bytes())?;
            put_coeffs(w, h.rhs.coeffs())?;
        }
        w.flush()
    };
    body(&mut w).map_err(fail)
}

struct Reader<R> {
    inner: R,
}

impl<R: Read> Reader<R> {
    fn bytes<const K: usize>(&mut self) -> std::io::Result<[u8; K]> {
        let mut b = [0u8; K];
        self.inner.read_exact(&mut b)?;
        Ok(b)
    }

    fn u32(&mut self) -> std::io::Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn u64(&mut self) -> std::io::Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn f64(&mut self) -> std::io::Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }

    fn coeffs(&mut self, len: usize) -> std::io::Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            let re = self.f64()?;
            let im = self.f64()?;
            out.push(Complex64::new(re, im));
        }
        Ok(out)
    }
}

/// Only the header.
pub fn read_checkpoint_header(path: &Path) -> Result<CheckpointHeader> {
    let (header, _) = read_parts(path, false)?;
    Ok(header)
}

pub fn read_checkpoint(path: &Path) -> Result<(CheckpointHeader, StepperState)> {
    let (header, state) = read_parts(path, true)?;
    Ok((header, state.expect("body requested")))
}

fn read_parts(path: &Path, with_body: bool) -> Result<(CheckpointHeader, Option<StepperState>)> {
    let bad = |reason: String| Error::Checkpoint { path: path.to_path_buf(), reason };
    let io = |e: std::io::Error| bad(e.to_string());
    let mut r = Reader { inner: BufReader::new(File::open(path).map_err(io)?) };
    if &r.bytes::<8>().map_err(io)? != MAGIC {
        return Err(bad("not a checkpoint file".into()));
    }
    let version = r.u32().map_err(io)?;
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let n = r.u64().map_err(io)? as usize;
    let nu = r.f64().map_err(io)?;
    let grashof = r.f64().map_err(io)?;
    let forcing_seed = r.u64().map_err(io)?;
    let t = r.f64().map_err(io)?;
    let step_index = r.u64().map_err(io)?;
    let dt = r.f64().map_err(io)?;
    let forcing_band = (r.f64().map_err(io)?, r.f64().map_err(io)?);
    let physics = Physics { nu, grashof, dt, forcing_seed, forcing_band };
    let header = CheckpointHeader { n, physics, t, step_index };
    let hist = r.u64().map_err(io)?;
    if hist > 2 {
        return Err(bad(format!("history length {hist} exceeds 2")));
    }
    if !with_body {
        return Ok((header, None));
    }
    let grid = Grid::new(n).map_err(|e| bad(e.to_string()))?;
    let omega = SpectralField::from_coeffs(&grid, r.coeffs(grid.len()).map_err(io)?);
    let mut history = VecDeque::with_capacity(2);
    for _ in 0..hist {
        let t = r.f64().map_err(io)?;
        let rhs = SpectralField::from_coeffs(&grid, r.coeffs(grid.len()).map_err(io)?);
        history.push_back(HistoryEntry { t, rhs });
    }
    if r.inner.read(&mut [0u8; 1]).map_err(io)? != 0 {
        return Err(bad("trailing bytes".into()));
    }
    let state = StepperState { omega, history, t: header.t, step_index: header.step_index };
    Ok((header, Some(state)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assimilator::model::{spin_up, Model, Physics};

    #[test]
    fn round_trip_and_bit_exact_restart() {
        let g = Grid::new(32).unwrap();
        let mut phys = Physics::new(1e-2, 2000.0, 0.01, 5);
        phys.forcing_band = (3.0, 5.0);
        let m = Model::new(&g, phys).unwrap();
        let st = spin_up(&m, 0.2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ref.ckpt");
        write_checkpoint(&path, &phys, &st).unwrap();
        let (h, back) = read_checkpoint(&path).unwrap();
        assert_eq!(h.n, 32);
        assert_eq!(h.step_index, 20);
        assert_eq!(h.physics, phys);
        assert_eq!(back, st);
        assert_eq!(read_checkpoint_header(&path).unwrap(), h);

        let mut a = st;
        let mut b = back;
        for _ in 0..100 {
            m.step(&mut a).unwrap();
            m.step(&mut b).unwrap();
        }
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk");
        std::fs::write(&path, b"hello world, not a checkpoint").unwrap();
        assert!(matches!(read_checkpoint(&path), Err(Error::Checkpoint { .. })));
        assert!(read_checkpoint(&dir.path().join("missing")).is_err());
    }

    #[test]
    fn truncated_file_is_an_error() {
        let g = Grid::new(16).unwrap();
        let st = StepperState::new(SpectralField::zeros(&g), 0.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c");
        write_checkpoint(&path, &Physics::new(0.1, 1.0, 0.01, 0), &st).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(read_checkpoint(&path).is_err());
    }
}
