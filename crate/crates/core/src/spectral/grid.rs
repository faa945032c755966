use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

/// Uniform `N x N` grid on `[-pi, pi)^2` together with its Fourier tables.
///
/// Storage for both nodal and spectral arrays is row-major with `x` fastest:
/// entry `iy * N + ix`. Spectral index `j` holds wavenumber `j` for
/// `j <= N/2` and `j - N` otherwise.
///
/// Cloning is cheap; the tables and FFT plans are shared.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridTables>,
}

struct GridTables {
    n: usize,
    /// Signed wavenumber per index along one axis.
    wavenumbers: Vec<i64>,
    /// `|k|^2` per spectral entry.
    k2: Vec<f64>,
    /// `1 / |k|^2`, zero at the mean mode.
    inv_k2: Vec<f64>,
    /// Retained modes under the 2/3 rule (Nyquist always dropped).
    keep: Vec<bool>,
    /// `(-1)^(kx + ky)`: phase of the node offset `x_0 = -pi`.
    parity: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Grid {
    pub const MIN_SIZE: usize = 16;

    pub fn new(n: usize) -> Result<Self> {
        if n < Self::MIN_SIZE || !n.is_multiple_of(2) {
            return Err(Error::InvalidGridSize(n));
        }
        let wavenumbers: Vec<i64> = (0..n)
            .map(|j| if j <= n / 2 { j as i64 } else { j as i64 - n as i64 })
            .collect();
        let mut k2 = vec![0.0; n * n];
        let mut inv_k2 = vec![0.0; n * n];
        let mut keep = vec![false; n * n];
        let mut parity = vec![0.0; n * n];
        for iy in 0..n {
            for ix in 0..n {
                let idx = iy * n + ix;
                let (kx, ky) = (wavenumbers[ix], wavenumbers[iy]);
                let mag2 = (kx * kx + ky * ky) as f64;
                k2[idx] = mag2;
                if idx != 0 {
                    inv_k2[idx] = 1.0 / mag2;
                }
                let kmax = kx.unsigned_abs().max(ky.unsigned_abs()) as usize;
                keep[idx] = 3 * kmax <= n;
                parity[idx] = if (ix + iy) % 2 == 0 { 1.0 } else { -1.0 };
            }
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Self {
            inner: Arc::new(GridTables {
                n,
                wavenumbers,
                k2,
                inv_k2,
                keep,
                parity,
                forward,
                inverse,
            }),
        })
    }

    /// Modes per dimension.
    #[inline]
    pub fn n(&self) -> usize {
        self.inner.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.inner.n * self.inner.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn side_length(&self) -> f64 {
        2.0 * PI
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        2.0 * PI / self.inner.n as f64
    }

    /// Coordinate of node `i` along either axis.
    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        -PI + i as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.node(i)).collect()
    }

    /// Signed wavenumber at spectral index `j`.
    #[inline]
    pub fn wavenumber(&self, j: usize) -> i64 {
        self.inner.wavenumbers[j]
    }

    /// Spectral index holding wavenumber `k` (taken modulo `N`).
    #[inline]
    pub fn index_of(&self, k: i64) -> usize {
        k.rem_euclid(self.n() as i64) as usize
    }

    /// Flat spectral index of the mode `(kx, ky)`.
    #[inline]
    pub fn mode_index(&self, kx: i64, ky: i64) -> usize {
        self.index_of(ky) * self.n() + self.index_of(kx)
    }

    /// Flat index of `-k` for the mode stored at `idx`.
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.n();
        let (iy, ix) = (idx / n, idx % n);
        ((n - iy) % n) * n + (n - ix) % n
    }

    /// Largest retained `|k_i|` under the 2/3 rule: `floor(N/3)`.
    pub fn dealias_cutoff(&self) -> usize {
        self.n() / 3
    }

    /// The cutoff as a real number, `(2/3)(N/2)`.
    pub fn dealias_cutoff_exact(&self) -> f64 {
        self.n() as f64 / 3.0
    }

    pub(crate) fn inv_k2(&self) -> &[f64] {
        &self.inner.inv_k2
    }

    pub(crate) fn keep(&self) -> &[bool] {
        &self.inner.keep
    }

    pub(crate) fn parity(&self) -> &[f64] {
        &self.inner.parity
    }

    pub(crate) fn wavenumbers(&self) -> &[i64] {
        &self.inner.wavenumbers
    }

    pub(crate) fn forward_plan(&self) -> &Arc<dyn Fft<f64>> {
        &self.inner.forward
    }

    pub(crate) fn inverse_plan(&self) -> &Arc<dyn Fft<f64>> {
        &self.inner.inverse
    }

    /// `|k|^2` for a flat spectral index.
    pub fn k_squared(&self, idx: usize) -> f64 {
        self.inner.k2[idx]
    }

    pub fn is_retained(&self, idx: usize) -> bool {
        self.inner.keep[idx]
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self.n() == other.n() {
            Ok(())
        } else {
            Err(Error::GridMismatch { left: self.n(), right: other.n() })
        }
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n() == other.n()
    }
}

impl Eq for Grid {}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("n", &self.n()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_small_sizes() {
        assert!(matches!(Grid::new(7), Err(Error::InvalidGridSize(7))));
        assert!(Grid::new(8).is_err());
        assert!(Grid::new(14).is_err());
        assert!(Grid::new(17).is_err());
        assert!(Grid::new(16).is_ok());
    }

    #[test]
    fn spacing_and_nodes() {
        let g = Grid::new(16).unwrap();
        assert!((g.dx() * 16.0 - 2.0 * PI).abs() < 1e-15);
        assert_eq!(g.node(0), -PI);
        assert!((g.node(4) - (-PI / 2.0)).abs() < 1e-15);
        // no duplicated endpoint
        assert!(g.node(15) < PI);
        assert!((g.node(15) + g.dx() - PI).abs() < 1e-14);
    }

    #[test]
    fn cutoff_at_1024_is_341() {
        let g = Grid::new(1024).unwrap();
        assert_eq!(g.dealias_cutoff(), 341);
        assert!((g.dealias_cutoff_exact() - 341.333_333_333_333_3).abs() < 1e-9);
        assert!(g.is_retained(g.mode_index(341, 0)));
        assert!(!g.is_retained(g.mode_index(342, 0)));
        assert!(!g.is_retained(g.mode_index(0, -342)));
        assert!(!g.is_retained(g.mode_index(512, 0)));
    }

    #[test]
    fn wavenumber_magnitudes() {
        let g = Grid::new(16).unwrap();
        for idx in 0..g.len() {
            let k2 = g.k_squared(idx);
            assert_eq!(k2.fract(), 0.0);
            assert!(k2 >= 0.0);
            assert_eq!(k2 == 0.0, idx == 0);
        }
        assert_eq!(g.wavenumber(8), 8);
        assert_eq!(g.wavenumber(9), -7);
        let idx = g.mode_index(3, -2);
        assert_eq!(g.conjugate_index(idx), g.mode_index(-3, 2));
    }
}
