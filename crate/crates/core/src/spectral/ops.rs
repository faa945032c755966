use std::f64::consts::PI;

use num_complex::Complex64;

use super::fft::{to_physical_pair, to_spectral_pair};
use super::{to_physical, to_spectral, PhysicalField, SpectralField};
use crate::{Error, Result};

/// Mean vorticity above this is treated as a gauge violation.
pub const MEAN_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Zero every mode with `max(|kx|, |ky|) > N/3`, and the Nyquist row/column.
pub fn dealias(s: &SpectralField) -> SpectralField {
    let mut out = s.clone();
    dealias_in_place(&mut out);
    out
}

pub fn dealias_in_place(s: &mut SpectralField) {
    let grid = s.grid().clone();
    for (c, &keep) in s.coeffs_mut().iter_mut().zip(grid.keep()) {
        if !keep {
            *c = ZERO;
        }
    }
}

fn check_mean(omega: &SpectralField) -> Result<()> {
    let m = omega.mean().norm();
    if m > MEAN_TOLERANCE {
        Err(Error::NonzeroMean(m))
    } else {
        Ok(())
    }
}

/// Solve `laplacian(psi) = omega`: `psi_k = -omega_k / |k|^2`, `psi_0 = 0`.
pub fn streamfunction(omega: &SpectralField) -> Result<SpectralField> {
    check_mean(omega)?;
    Ok(streamfunction_unchecked(omega))
}

pub(crate) fn streamfunction_unchecked(omega: &SpectralField) -> SpectralField {
    let grid = omega.grid();
    let coeffs = omega.coeffs().iter().zip(grid.inv_k2()).map(|(w, ik)| -w * ik).collect();
    SpectralField::from_coeffs(grid, coeffs)
}

/// Spectral velocity `(-d_y psi, d_x psi)` for the vorticity `omega`.
pub(crate) fn velocity_coeffs(omega: &SpectralField) -> (Vec<Complex64>, Vec<Complex64>) {
    let grid = omega.grid();
    let n = grid.n();
    let ks = grid.wavenumbers();
    let mut u1 = vec![ZERO; grid.len()];
    let mut u2 = vec![ZERO; grid.len()];
    for iy in 0..n {
        let ky = ks[iy] as f64;
        for ix in 0..n {
            let idx = iy * n + ix;
            if !grid.keep()[idx] {
                continue;
            }
            let kx = ks[ix] as f64;
            let psi = -omega.coeffs()[idx] * grid.inv_k2()[idx];
            // -i ky psi, i kx psi
            u1[idx] = Complex64::new(ky * psi.im, -ky * psi.re);
            u2[idx] = Complex64::new(-kx * psi.im, kx * psi.re);
        }
    }
    (u1, u2)
}

/// Velocity field recovered from vorticity, in physical space.
pub fn velocity(omega: &SpectralField) -> Result<(PhysicalField, PhysicalField)> {
    check_mean(omega)?;
    Ok(velocity_unchecked(omega))
}

pub(crate) fn velocity_unchecked(omega: &SpectralField) -> (PhysicalField, PhysicalField) {
    let (u1, u2) = velocity_coeffs(omega);
    to_physical_pair(omega.grid(), &u1, &u2)
}

/// Advection term plus the velocity it used.
pub(crate) struct Advection {
    pub rhs: SpectralField,
    pub velocity: (PhysicalField, PhysicalField),
}

pub(crate) fn advection(omega: &SpectralField) -> Advection {
    let grid = omega.grid();
    let n = grid.n();
    let ks = grid.wavenumbers();
    let (u1, u2) = velocity_coeffs(omega);
    let mut wx = vec![ZERO; grid.len()];
    let mut wy = vec![ZERO; grid.len()];
    for iy in 0..n {
        let ky = ks[iy] as f64;
        for ix in 0..n {
            let idx = iy * n + ix;
            if !grid.keep()[idx] {
                continue;
            }
            let kx = ks[ix] as f64;
            let w = omega.coeffs()[idx];
            wx[idx] = Complex64::new(-kx * w.im, kx * w.re);
            wy[idx] = Complex64::new(-ky * w.im, ky * w.re);
        }
    }
    let (pu1, pu2) = to_physical_pair(grid, &u1, &u2);
    let (pwx, pwy) = to_physical_pair(grid, &wx, &wy);
    let product: Vec<f64> = pu1
        .values()
        .iter()
        .zip(pu2.values())
        .zip(pwx.values().iter().zip(pwy.values()))
        .map(|((a, b), (c, d))| -(a * c + b * d))
        .collect();
    let mut rhs = to_spectral(&PhysicalField::from_values(grid, product));
    dealias_in_place(&mut rhs);
    rhs.coeffs_mut()[0] = ZERO;
    Advection { rhs, velocity: (pu1, pu2) }
}

/// `-(u . grad omega)`, dealiased, with zero mean.
pub fn nonlinear_rhs(omega: &SpectralField) -> SpectralField {
    advection(omega).rhs
}

/// Spectral curl `d_x g2 - d_y g1` of a physical vector field, dealiased.
pub fn curl(g1: &PhysicalField, g2: &PhysicalField) -> Result<SpectralField> {
    let grid = g1.grid().clone();
    let (s1, s2) = to_spectral_pair(g1, g2)?;
    let n = grid.n();
    let ks = grid.wavenumbers();
    let mut out = vec![ZERO; grid.len()];
    for iy in 0..n {
        let ky = ks[iy] as f64;
        for ix in 0..n {
            let idx = iy * n + ix;
            if !grid.keep()[idx] || idx == 0 {
                continue;
            }
            let kx = ks[ix] as f64;
            let a = s1.coeffs()[idx];
            let b = s2.coeffs()[idx];
            // i kx b - i ky a
            let d = b * kx - a * ky;
            out[idx] = Complex64::new(-d.im, d.re);
        }
    }
    Ok(SpectralField::from_coeffs(&grid, out))
}

/// Shell-binned kinetic energy `E(m)`, `m - 1/2 <= |k| < m + 1/2`.
///
/// Normalized so that `sum_m E(m) = (1/2) ||u||_{L^2}^2` over the torus.
pub fn energy_spectrum(omega: &SpectralField) -> Vec<f64> {
    let grid = omega.grid();
    let shells = (grid.n() as f64 / 2.0 * std::f64::consts::SQRT_2).ceil() as usize + 2;
    let mut e = vec![0.0; shells];
    let area = (2.0 * PI) * (2.0 * PI);
    for (idx, w) in omega.coeffs().iter().enumerate() {
        if idx == 0 {
            continue;
        }
        let k2 = grid.k_squared(idx);
        let m = (k2.sqrt() + 0.5).floor() as usize;
        e[m] += 0.5 * area * w.norm_sqr() / k2;
    }
    while e.len() > 1 && *e.last().unwrap() == 0.0 {
        e.pop();
    }
    e
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norms {
    pub l2: f64,
    pub linf: f64,
}

/// `||f||_{L^2}` with `||f||^2 = integral over the torus of f^2`.
pub fn l2_norm(s: &SpectralField) -> f64 {
    2.0 * PI * s.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn linf_norm(p: &PhysicalField) -> f64 {
    p.max_abs()
}

impl Norms {
    pub fn of_spectral(s: &SpectralField) -> Self {
        Self { l2: l2_norm(s), linf: linf_norm(&to_physical(s)) }
    }

    pub fn of_physical(p: &PhysicalField) -> Self {
        Self { l2: l2_norm(&to_spectral(p)), linf: linf_norm(p) }
    }
}

/// Inner product `integral f g` over the torus, via Parseval.
pub fn inner_product(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    a.grid().ensure_same(b.grid())?;
    let s: f64 = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x * y.conj()).re).sum();
    Ok(4.0 * PI * PI * s)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vorticity(grid: &Grid, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut s = dealias(&to_spectral(&PhysicalField::from_values(grid, values)));
        s.coeffs_mut()[0] = ZERO;
        s
    }

    #[test]
    fn dealias_cutoff_behaviour() {
        let g = Grid::new(1024).unwrap();
        let mut s = SpectralField::zeros(&g);
        s.set_mode_pair(342, 0, Complex64::new(1.0, 0.0));
        s.set_mode_pair(341, 0, Complex64::new(0.5, 0.25));
        let d = dealias(&s);
        assert_eq!(d.mode(342, 0), ZERO);
        assert_eq!(d.mode(341, 0), Complex64::new(0.5, 0.25));
    }

    #[test]
    fn dealias_is_idempotent_projection() {
        let g = Grid::new(32).unwrap();
        let s = to_spectral(&PhysicalField::from_fn(&g, |x, y| (x * 7.0).sin() * (y * 13.0).cos() + x));
        let once = dealias(&s);
        assert_eq!(dealias(&once), once);
        assert!(l2_norm(&once) <= l2_norm(&s));
    }

    #[test]
    fn streamfunction_cases() {
        let g = Grid::new(16).unwrap();
        let mut w = SpectralField::zeros(&g);
        *w.mode_mut(1, 0) = Complex64::new(1.0, 0.0);
        let psi = streamfunction(&w).unwrap();
        assert_eq!(psi.mode(1, 0), Complex64::new(-1.0, 0.0));

        let w = to_spectral(&PhysicalField::from_fn(&g, |x, y| x.sin() * y.sin()));
        let psi = to_physical(&streamfunction(&w).unwrap());
        let expected = PhysicalField::from_fn(&g, |x, y| -0.5 * x.sin() * y.sin());
        assert!(psi.sub(&expected).unwrap().max_abs() < 1e-14);

        let zero = streamfunction(&SpectralField::zeros(&g)).unwrap();
        assert_eq!(zero, SpectralField::zeros(&g));
    }

    #[test]
    fn streamfunction_rejects_mean() {
        let g = Grid::new(16).unwrap();
        let mut w = SpectralField::zeros(&g);
        w.coeffs_mut()[0] = Complex64::new(1e-6, 0.0);
        assert!(matches!(streamfunction(&w), Err(Error::NonzeroMean(_))));
        assert!(velocity(&w).is_err());
    }

    #[test]
    fn velocity_of_taylor_green() {
        let g = Grid::new(32).unwrap();
        // psi = sin x sin y  =>  omega = -2 sin x sin y
        let w = to_spectral(&PhysicalField::from_fn(&g, |x, y| -2.0 * x.sin() * y.sin()));
        let (u1, u2) = velocity(&w).unwrap();
        let e1 = PhysicalField::from_fn(&g, |x, y| -x.sin() * y.cos());
        let e2 = PhysicalField::from_fn(&g, |x, y| x.cos() * y.sin());
        assert!(u1.sub(&e1).unwrap().max_abs() < 1e-14);
        assert!(u2.sub(&e2).unwrap().max_abs() < 1e-14);

        let (z1, z2) = velocity(&SpectralField::zeros(&g)).unwrap();
        assert_eq!(z1.max_abs(), 0.0);
        assert_eq!(z2.max_abs(), 0.0);
    }

    #[test]
    fn velocity_is_divergence_free() {
        let g = Grid::new(32).unwrap();
        let w = random_vorticity(&g, 11);
        let (u1, u2) = velocity_coeffs(&w);
        let umax = u1.iter().chain(&u2).map(|c| c.norm()).fold(0.0, f64::max);
        for idx in 0..g.len() {
            let kx = g.wavenumber(idx % 32) as f64;
            let ky = g.wavenumber(idx / 32) as f64;
            let div = (u1[idx] * kx + u2[idx] * ky).norm();
            assert!(div <= 1e-12 * umax);
        }
    }

    #[test]
    fn nonlinear_vanishes_on_eigenfunctions() {
        let g = Grid::new(32).unwrap();
        let tg = to_spectral(&PhysicalField::from_fn(&g, |x, y| x.sin() * y.sin()));
        assert!(nonlinear_rhs(&tg).max_abs() < 1e-12);
        let single = to_spectral(&PhysicalField::from_fn(&g, |x, y| (2.0 * x + 3.0 * y).cos()));
        assert!(nonlinear_rhs(&single).max_abs() < 1e-12);
    }

    #[test]
    fn nonlinear_has_zero_mean_and_is_hermitian() {
        let g = Grid::new(32).unwrap();
        let w = random_vorticity(&g, 5);
        let r = nonlinear_rhs(&w);
        assert_eq!(r.mean(), ZERO);
        assert!(r.hermitian_defect() < 1e-14 * r.max_abs().max(1.0));
        for idx in 0..g.len() {
            if !g.is_retained(idx) {
                assert_eq!(r.coeffs()[idx], ZERO);
            }
        }
    }

    #[test]
    fn advection_conserves_energy_and_enstrophy() {
        // <psi, J> = 0 and <omega, J> = 0 for alias-free products
        let g = Grid::new(32).unwrap();
        let w = random_vorticity(&g, 9);
        let r = nonlinear_rhs(&w);
        let psi = streamfunction(&w).unwrap();
        let scale = l2_norm(&r) * l2_norm(&w);
        assert!(inner_product(&psi, &r).unwrap().abs() < 1e-12 * scale);
        assert!(inner_product(&w, &r).unwrap().abs() < 1e-12 * scale);
    }

    #[test]
    fn spectrum_single_mode_and_zero() {
        let g = Grid::new(32).unwrap();
        let mut w = SpectralField::zeros(&g);
        w.set_mode_pair(3, 4, Complex64::new(0.3, -0.1));
        let e = energy_spectrum(&w);
        for (m, v) in e.iter().enumerate() {
            if m == 5 {
                assert!(*v > 0.0);
            } else {
                assert_eq!(*v, 0.0);
            }
        }
        let z = energy_spectrum(&SpectralField::zeros(&g));
        assert!(z.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn norms_of_sine() {
        let g = Grid::new(32).unwrap();
        let s = to_spectral(&PhysicalField::from_fn(&g, |x, _| x.sin()));
        let n = Norms::of_spectral(&s);
        assert!((n.l2 * n.l2 - 2.0 * PI * PI).abs() < 1e-12);
        assert!((n.linf - 1.0).abs() < 1e-12);
        let z = Norms::of_spectral(&SpectralField::zeros(&g));
        assert_eq!(z, Norms { l2: 0.0, linf: 0.0 });
    }

    #[test]
    fn curl_of_velocity_recovers_vorticity() {
        let g = Grid::new(32).unwrap();
        let w = random_vorticity(&g, 21);
        let (u1, u2) = velocity(&w).unwrap();
        let back = curl(&u1, &u2).unwrap();
        assert!(back.sub(&w).unwrap().max_abs() < 1e-13);
    }
}
