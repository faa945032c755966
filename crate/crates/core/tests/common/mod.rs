#![allow(dead_code)]

use aotsim::integrator::{if_multistep_update, Scheme};
use aotsim::spectral::{Grid, SpectralField};
use num_complex::Complex64;

/// `-(u . grad omega)` by direct convolution over retained modes, output dealiased.
pub fn dense_nonlinear(omega: &SpectralField) -> SpectralField {
    let g = omega.grid();
    let n = g.n();
    let modes: Vec<(i64, i64, Complex64)> = (0..g.len())
        .filter(|&i| g.is_retained(i) && i != 0)
        .map(|i| (g.wavenumber(i % n), g.wavenumber(i / n), omega.coeffs()[i]))
        .collect();
    let cut = g.dealias_cutoff() as i64;
    let mut out = SpectralField::zeros(g);
    let im = Complex64::new(0.0, 1.0);
    for &(px, py, wp) in &modes {
        let psi = -wp / (px * px + py * py) as f64;
        let u1 = -im * py as f64 * psi;
        let u2 = im * px as f64 * psi;
        for &(qx, qy, wq) in &modes {
            let (kx, ky) = (px + qx, py + qy);
            if kx.abs() > cut || ky.abs() > cut || (kx == 0 && ky == 0) {
                continue;
            }
            let grad = (u1 * qx as f64 + u2 * qy as f64) * im * wq;
            *out.mode_mut(kx, ky) -= grad;
        }
    }
    out
}

/// Exact solution of `y' = -y + y^2`, `y(0) = 1/4`.
pub fn bernoulli_exact(t: f64) -> f64 {
    1.0 / (1.0 + 3.0 * t.exp())
}

/// Global error at `t_end` of IF-AB3 on `y' = -y + y^2`, treating `-y` with
/// the integrating factor. `exact_start` seeds the two past right-hand sides
/// from the exact solution; otherwise the Euler/AB2 bootstrap is used.
pub fn bernoulli_error(dt: f64, t_end: f64, exact_start: bool) -> f64 {
    let steps = (t_end / dt).round() as usize;
    let decay = [(-dt).exp()];
    let rhs_of = |y: f64| Complex64::new(y * y, 0.0);
    let mut y = [Complex64::new(bernoulli_exact(0.0), 0.0)];
    let mut hist: Vec<Complex64> = if exact_start {
        vec![rhs_of(bernoulli_exact(-dt)), rhs_of(bernoulli_exact(-2.0 * dt))]
    } else {
        Vec::new()
    };
    for step in 0..steps {
        let now = rhs_of(y[0].re);
        let scheme = if exact_start { Scheme::Ab3 } else { Scheme::for_step(step as u64) };
        let mut all = vec![now];
        all.extend(hist.iter().copied());
        let slices: Vec<&[Complex64]> = all.iter().map(std::slice::from_ref).collect();
        if_multistep_update(scheme, &mut y, &decay, &slices, dt);
        hist.insert(0, now);
        hist.truncate(2);
    }
    (y[0].re - bernoulli_exact(steps as f64 * dt)).abs()
}

/// Least-squares slope and R^2 of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

/// Observed order from errors at successively halved steps.
pub fn observed_order(dts: &[f64], errs: &[f64]) -> f64 {
    let lx: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ly: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    linear_fit(&lx, &ly).0
}

/// Kolmogorov-Smirnov statistic of `samples` against U(a, b).
pub fn ks_uniform(samples: &[f64], a: f64, b: f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = ((v - a) / (b - a)).clamp(0.0, 1.0);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub fn chi_square(counts: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = counts.iter().sum();
    counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| {
            let e = p * total as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum()
}

pub fn grid(n: usize) -> Grid {
    Grid::new(n).unwrap()
}
