use std::f64::consts::PI;

use crate::spectral::{Grid, PhysicalField};
use crate::{Error, Result};

/// Grid-aligned vertical strip `[x_L, x_L + w) x [-pi, pi)`, periodic in `x`.
///
/// Stored as a start column and a column count so the edges always sit on
/// grid lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    n: usize,
    start: usize,
    columns: usize,
}

impl Region {
    pub fn new(grid: &Grid, start: usize, columns: usize) -> Result<Self> {
        let n = grid.n();
        if columns == 0 || columns > n {
            return Err(Error::InvalidObservers(format!("region width {columns} outside 1..={n} cells")));
        }
        Ok(Self { n, start: start % n, columns })
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn x_left(&self) -> f64 {
        -PI + self.start as f64 * (2.0 * PI / self.n as f64)
    }

    pub fn width(&self) -> f64 {
        self.columns as f64 * (2.0 * PI / self.n as f64)
    }

    pub fn contains_column(&self, ix: usize) -> bool {
        (ix + self.n - self.start) % self.n < self.columns
    }

    pub fn column_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.columns).map(move |j| (self.start + j) % self.n)
    }

    pub(crate) fn shift(&mut self, cells: usize) {
        self.start = (self.start + cells) % self.n;
    }
}

/// Thin-sweep window at time `t`: `a` cells wide, starting at `-pi` and
/// moving `b` cells per step of size `dt`.
pub fn region_thin_sweep(t: f64, a: usize, b: usize, dt: f64, grid: &Grid) -> Result<Region> {
    if !(dt > 0.0) || t < 0.0 {
        return Err(Error::InvalidParameter(format!("region time {t} with step {dt}")));
    }
    let steps = (t / dt).round() as u128;
    let start = (steps * b as u128 % grid.n() as u128) as usize;
    Region::new(grid, start, a)
}

/// `w * chi_R`: exact values inside the region, zero outside.
pub fn apply_region_mask(w: &PhysicalField, region: &Region) -> PhysicalField {
    let n = w.grid().n();
    let mut out = w.clone();
    for row in out.values_mut().chunks_mut(n) {
        for (ix, v) in row.iter_mut().enumerate() {
            if !region.contains_column(ix) {
                *v = 0.0;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thin_window_advances_b_cells_per_step() {
        let g = Grid::new(64).unwrap();
        let r0 = region_thin_sweep(0.0, 3, 3, 0.005, &g).unwrap();
        let r1 = region_thin_sweep(0.005, 3, 3, 0.005, &g).unwrap();
        assert_eq!(r0.x_left(), -PI);
        assert!((r1.x_left() - r0.x_left() - 3.0 * g.dx()).abs() < 1e-14);
        assert!((r1.width() - 3.0 * g.dx()).abs() < 1e-15);
        // 22 steps of 3 cells = 66 = 2 (mod 64)
        assert_eq!(region_thin_sweep(22.0 * 0.005, 3, 3, 0.005, &g).unwrap().start(), 2);
    }

    #[test]
    fn thin_window_observes_3072_nodes_at_1024() {
        let g = Grid::new(1024).unwrap();
        let r = region_thin_sweep(0.0, 3, 3, 0.005, &g).unwrap();
        assert_eq!(r.columns() * g.n(), 3072);
    }

    #[test]
    fn window_wraps_across_seam() {
        let g = Grid::new(16).unwrap();
        let r = Region::new(&g, 15, 2).unwrap();
        assert!((r.x_left() - (PI - g.dx())).abs() < 1e-15);
        let cols: Vec<usize> = r.column_indices().collect();
        assert_eq!(cols, vec![15, 0]);
        assert!(r.contains_column(0) && r.contains_column(15) && !r.contains_column(1));
    }

    #[test]
    fn mask_cases() {
        let g = Grid::new(16).unwrap();
        let w = PhysicalField::from_fn(&g, |x, y| 1.0 + x * y);
        let full = Region::new(&g, 5, 16).unwrap();
        assert_eq!(apply_region_mask(&w, &full), w);
        let all_but_one = Region::new(&g, 0, 15).unwrap();
        let out = apply_region_mask(&w, &all_but_one);
        for iy in 0..16 {
            assert_eq!(out.at(15, iy), 0.0);
            for ix in 0..15 {
                assert_eq!(out.at(ix, iy), w.at(ix, iy));
            }
        }
        assert!(Region::new(&g, 0, 0).is_err());
        let zero = apply_region_mask(&PhysicalField::zeros(&g), &all_but_one);
        assert_eq!(zero.max_abs(), 0.0);
        // support containment: masking twice changes nothing
        assert_eq!(apply_region_mask(&out, &all_but_one), out);
    }
}
