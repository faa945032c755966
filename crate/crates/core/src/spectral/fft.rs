//! Transform pair between nodal values and Fourier coefficients.
//!
//! `to_spectral` returns true Fourier coefficients on `[-pi, pi)^2`, so a
//! constant field `c` has mean coefficient `c` and `to_physical` inverts it
//! exactly. Two real fields can share one complex transform; the solver
//! kernels use that to halve their FFT count.

use num_complex::Complex64;
use rustfft::Fft;

use super::{Grid, PhysicalField, SpectralField};
use crate::Result;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn transform_rows(plan: &dyn Fft<f64>, data: &mut [Complex64], scratch: &mut [Complex64]) {
    plan.process_with_scratch(data, scratch);
}

fn transpose(n: usize, src: &[Complex64], dst: &mut [Complex64]) {
    const BLOCK: usize = 32;
    for by in (0..n).step_by(BLOCK) {
        for bx in (0..n).step_by(BLOCK) {
            for y in by..(by + BLOCK).min(n) {
                for x in bx..(bx + BLOCK).min(n) {
                    dst[x * n + y] = src[y * n + x];
                }
            }
        }
    }
}

/// Unnormalized 2D FFT in place. `inverse` selects the `e^{+i}` kernel.
pub(crate) fn fft2_in_place(grid: &Grid, data: &mut [Complex64], inverse: bool) {
    let n = grid.n();
    let plan: &dyn Fft<f64> =
        if inverse { grid.inverse_plan().as_ref() } else { grid.forward_plan().as_ref() };
    let mut scratch = vec![ZERO; plan.get_inplace_scratch_len()];
    let mut buf = vec![ZERO; n * n];
    transform_rows(plan, data, &mut scratch);
    transpose(n, data, &mut buf);
    transform_rows(plan, &mut buf, &mut scratch);
    transpose(n, &buf, data);
}

pub fn to_spectral(p: &PhysicalField) -> SpectralField {
    let grid = p.grid();
    let mut data: Vec<Complex64> = p.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2_in_place(grid, &mut data, false);
    let scale = 1.0 / grid.len() as f64;
    for (c, s) in data.iter_mut().zip(grid.parity()) {
        *c *= s * scale;
    }
    SpectralField::from_coeffs(grid, data)
}

pub fn to_physical(s: &SpectralField) -> PhysicalField {
    let grid = s.grid();
    let mut data: Vec<Complex64> =
        s.coeffs().iter().zip(grid.parity()).map(|(c, p)| c * p).collect();
    fft2_in_place(grid, &mut data, true);
    PhysicalField::from_values(grid, data.into_iter().map(|c| c.re).collect())
}

/// `to_physical` on two Hermitian coefficient arrays at the cost of one
/// complex transform: the real part of the result is `a`, the imaginary `b`.
pub(crate) fn to_physical_pair(
    grid: &Grid,
    a: &[Complex64],
    b: &[Complex64],
) -> (PhysicalField, PhysicalField) {
    let i = Complex64::new(0.0, 1.0);
    let mut data: Vec<Complex64> = a
        .iter()
        .zip(b)
        .zip(grid.parity())
        .map(|((a, b), p)| (a + i * b) * p)
        .collect();
    fft2_in_place(grid, &mut data, true);
    let re = data.iter().map(|c| c.re).collect();
    let im = data.iter().map(|c| c.im).collect();
    (PhysicalField::from_values(grid, re), PhysicalField::from_values(grid, im))
}

/// `to_spectral` on two real fields with one complex transform.
pub(crate) fn to_spectral_pair(
    a: &PhysicalField,
    b: &PhysicalField,
) -> Result<(SpectralField, SpectralField)> {
    let grid = a.grid();
    grid.ensure_same(b.grid())?;
    let mut z: Vec<Complex64> =
        a.values().iter().zip(b.values()).map(|(&x, &y)| Complex64::new(x, y)).collect();
    fft2_in_place(grid, &mut z, false);
    let scale = 0.5 / grid.len() as f64;
    let mut fa = vec![ZERO; grid.len()];
    let mut fb = vec![ZERO; grid.len()];
    for idx in 0..grid.len() {
        let zk = z[idx];
        let zm = z[grid.conjugate_index(idx)].conj();
        let s = grid.parity()[idx] * scale;
        fa[idx] = (zk + zm) * s;
        // (zk - zm) / (2i)
        let d = zk - zm;
        fb[idx] = Complex64::new(d.im, -d.re) * s;
    }
    Ok((SpectralField::from_coeffs(grid, fa), SpectralField::from_coeffs(grid, fb)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: &Grid, seed: u64) -> PhysicalField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        PhysicalField::from_values(grid, values)
    }

    #[test]
    fn constant_maps_to_mean_mode() {
        let g = Grid::new(16).unwrap();
        let s = to_spectral(&PhysicalField::from_fn(&g, |_, _| 2.5));
        assert!((s.mean() - Complex64::new(2.5, 0.0)).norm() < 1e-14);
        for c in &s.coeffs()[1..] {
            assert!(c.norm() < 1e-14);
        }
    }

    #[test]
    fn cosine_has_two_modes() {
        let g = Grid::new(32).unwrap();
        let s = to_spectral(&PhysicalField::from_fn(&g, |x, _| (3.0 * x).cos()));
        for idx in 0..g.len() {
            let c = s.coeffs()[idx];
            if idx == g.mode_index(3, 0) || idx == g.mode_index(-3, 0) {
                assert!((c - Complex64::new(0.5, 0.0)).norm() < 1e-14, "{c}");
            } else {
                assert!(c.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn sine_coefficients_account_for_node_offset() {
        // sin(x) = (e^{ix} - e^{-ix}) / 2i, independent of where the nodes start
        let g = Grid::new(16).unwrap();
        let s = to_spectral(&PhysicalField::from_fn(&g, |x, _| x.sin()));
        assert!((s.mode(1, 0) - Complex64::new(0.0, -0.5)).norm() < 1e-14);
        assert!((s.mode(-1, 0) - Complex64::new(0.0, 0.5)).norm() < 1e-14);
    }

    #[test]
    fn round_trip_random_field_n128() {
        let g = Grid::new(128).unwrap();
        let p = random_field(&g, 7);
        let back = to_physical(&to_spectral(&p));
        let err = p.sub(&back).unwrap().max_abs();
        assert!(err < 1e-13, "round trip error {err:e}");
    }

    #[test]
    fn inverse_of_hermitian_data_is_real() {
        let g = Grid::new(32).unwrap();
        let s = to_spectral(&random_field(&g, 3));
        assert!(s.hermitian_defect() < 1e-15);
        let mut data: Vec<Complex64> =
            s.coeffs().iter().zip(g.parity()).map(|(c, p)| c * p).collect();
        fft2_in_place(&g, &mut data, true);
        let max_im = data.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        assert!(max_im < 1e-13);
    }

    #[test]
    fn paired_transforms_match_single() {
        let g = Grid::new(32).unwrap();
        let a = random_field(&g, 1);
        let b = random_field(&g, 2);
        let (fa, fb) = to_spectral_pair(&a, &b).unwrap();
        let sa = to_spectral(&a);
        let sb = to_spectral(&b);
        for i in 0..g.len() {
            assert!((fa.coeffs()[i] - sa.coeffs()[i]).norm() < 1e-15);
            assert!((fb.coeffs()[i] - sb.coeffs()[i]).norm() < 1e-15);
        }
        let (pa, pb) = to_physical_pair(&g, sa.coeffs(), sb.coeffs());
        assert!(pa.sub(&a).unwrap().max_abs() < 1e-13);
        assert!(pb.sub(&b).unwrap().max_abs() < 1e-13);
    }
}
