use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spectral::{Grid, SpectralField};
use crate::{Error, Result};

/// Default forcing shell `32 <= |k| <= 34`.
pub const DEFAULT_FORCING_BAND: (f64, f64) = (32.0, 34.0);

/// Time-independent vorticity forcing with Grashof number `G = ||f||_{L^2} / nu^2`.
///
/// Every retained mode with `|k|` in the shell gets the same velocity-level
/// amplitude and a seeded uniform random phase; the whole field is then
/// scaled so the velocity-level forcing has `L^2` norm `G nu^2`.
pub fn build_forcing(grid: &Grid, grashof: f64, nu: f64, seed: u64) -> Result<SpectralField> {
    build_forcing_in_band(grid, grashof, nu, seed, DEFAULT_FORCING_BAND)
}

pub fn build_forcing_in_band(
    grid: &Grid,
    grashof: f64,
    nu: f64,
    seed: u64,
    band: (f64, f64),
) -> Result<SpectralField> {
    if !(grashof > 0.0 && grashof.is_finite()) || !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "forcing needs G > 0 and nu > 0, got G={grashof}, nu={nu}"
        )));
    }
    let (lo, hi) = band;
    let n = grid.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid);
    let mut count = 0usize;
    for iy in 0..n {
        let ky = grid.wavenumber(iy);
        for ix in 0..n {
            let kx = grid.wavenumber(ix);
            // one representative per conjugate pair
            if !(ky > 0 || (ky == 0 && kx > 0)) {
                continue;
            }
            let idx = iy * n + ix;
            let k = grid.k_squared(idx).sqrt();
            if !grid.is_retained(idx) || k < lo || k > hi {
                continue;
            }
            let phase: f64 = rng.gen_range(0.0..2.0 * PI);
            f.set_mode_pair(kx, ky, Complex64::from_polar(k, phase));
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::EmptyForcingBand { lo, hi, n });
    }
    let norm = velocity_level_norm(&f);
    Ok(f.scaled(grashof * nu * nu / norm))
}

/// `L^2` norm of the divergence-free velocity whose curl is `f`.
pub fn velocity_level_norm(f: &SpectralField) -> f64 {
    let grid = f.grid();
    let s: f64 = f
        .coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.norm_sqr() / grid.k_squared(i))
        .sum();
    2.0 * PI * s.sqrt()
}
