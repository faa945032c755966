//! The two interpolation directions used by the nudging term.
//!
//! * `J`: grid field to observer points ([`sample_bilinear`]).
//! * `I_{h,t}`: observed values back to grid nodes. Scattered points go
//!   through a Delaunay triangulation of the 3x3 periodic tiling of the
//!   observations ([`ScatterInterpolant`]); tensor-product observer lattices
//!   use separable bilinear weights ([`LatticeInterpolant`]).

use std::f64::consts::PI;

use spade::{DelaunayTriangulation, HasPosition, Point2, Triangulation};

use super::Point;
use crate::spectral::{Grid, PhysicalField};
use crate::{Error, Result};

/// Offsets closer than this (in cell units) to an integer are treated as on a node.
const SNAP: f64 = 1e-9;

/// Barycentric coordinates down to this are accepted as inside a triangle.
const INSIDE_TOL: f64 = -1e-12;

/// Cell index and fractional offset of coordinate `x` along one axis.
#[inline]
fn locate(grid: &Grid, x: f64) -> (usize, f64) {
    let s = (x + PI) / grid.dx();
    let r = s.round();
    let (cell, frac) = if (s - r).abs() < SNAP { (r, 0.0) } else { (s.floor(), s - s.floor()) };
    (cell.rem_euclid(grid.n() as f64) as usize % grid.n(), frac)
}

/// Periodic bilinear interpolation of `field` at each point.
pub fn sample_bilinear(field: &PhysicalField, points: &[Point]) -> Vec<f64> {
    let grid = field.grid();
    let n = grid.n();
    points
        .iter()
        .map(|&[x, y]| {
            let (i0, fx) = locate(grid, x);
            let (j0, fy) = locate(grid, y);
            let (i1, j1) = ((i0 + 1) % n, (j0 + 1) % n);
            let f00 = field.at(i0, j0);
            if fx == 0.0 && fy == 0.0 {
                return f00;
            }
            let f10 = field.at(i1, j0);
            let f01 = field.at(i0, j1);
            let f11 = field.at(i1, j1);
            (1.0 - fy) * ((1.0 - fx) * f00 + fx * f10) + fy * ((1.0 - fx) * f01 + fx * f11)
        })
        .collect()
}

/// Nodal values at integer node coordinates.
pub fn sample_nodes(field: &PhysicalField, nodes: &[(usize, usize)]) -> Vec<f64> {
    nodes.iter().map(|&(ix, iy)| field.at(ix, iy)).collect()
}

#[derive(Clone, Copy, Debug)]
struct Site {
    x: f64,
    y: f64,
    obs: usize,
}

impl HasPosition for Site {
    type Scalar = f64;

    fn position(&self) -> Point2<f64> {
        Point2::new(self.x, self.y)
    }
}

/// Piecewise-linear interpolant from scattered points to every grid node.
///
/// Observations are replicated on `[-3 pi, 3 pi]^2` before triangulating, so
/// the result is periodic and nodes near the seam see their true periodic
/// neighbours. The node weights are precomputed; [`apply`](Self::apply)
/// is a sparse product.
#[derive(Clone, Debug)]
pub struct ScatterInterpolant {
    grid: Grid,
    points: usize,
    /// Three (observation, weight) pairs per node.
    weights: Vec<[(u32, f64); 3]>,
}

impl ScatterInterpolant {
    pub fn new(grid: &Grid, points: &[Point]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::DegenerateGeometry("no observation points".into()));
        }
        // Lexicographic order fixes the triangulation for a given point set;
        // exact duplicates collapse onto their first observation.
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| {
            points[a][0].total_cmp(&points[b][0]).then(points[a][1].total_cmp(&points[b][1]))
        });
        order.dedup_by(|b, a| points[*a] == points[*b]);

        let two_pi = 2.0 * PI;
        let mut sites = Vec::with_capacity(order.len() * 9);
        for &obs in &order {
            let [x, y] = points[obs];
            for sx in [-1.0, 0.0, 1.0] {
                for sy in [-1.0, 0.0, 1.0] {
                    sites.push(Site { x: x + sx * two_pi, y: y + sy * two_pi, obs });
                }
            }
        }
        let tri = DelaunayTriangulation::<Site>::bulk_load(sites)
            .map_err(|e| Error::DegenerateGeometry(format!("triangulation failed: {e:?}")))?;
        if tri.num_inner_faces() == 0 {
            return Err(Error::DegenerateGeometry("all tiled points are collinear".into()));
        }

        let n = grid.n();
        let dx = grid.dx();
        let mut weights = vec![[(0u32, 0.0); 3]; grid.len()];
        let mut assigned = vec![false; grid.len()];
        let mut remaining = grid.len();
        for face in tri.inner_faces() {
            let [a, b, c] = face.vertices().map(|v| *v.data());
            let xmin = a.x.min(b.x).min(c.x);
            let xmax = a.x.max(b.x).max(c.x);
            let ymin = a.y.min(b.y).min(c.y);
            let ymax = a.y.max(b.y).max(c.y);
            if xmax < -PI - 1e-12 || xmin >= PI || ymax < -PI - 1e-12 || ymin >= PI {
                continue;
            }
            let col = |v: f64, up: bool| {
                let s = (v + PI) / dx;
                if up { (s - 1e-9).ceil() } else { (s + 1e-9).floor() }
            };
            let ix0 = col(xmin, true).max(0.0) as usize;
            let ix1 = col(xmax, false).min((n - 1) as f64);
            let iy0 = col(ymin, true).max(0.0) as usize;
            let iy1 = col(ymax, false).min((n - 1) as f64);
            if ix1 < 0.0 || iy1 < 0.0 {
                continue;
            }
            let (ix1, iy1) = (ix1 as usize, iy1 as usize);
            let det = (b.y - c.y) * (a.x - c.x) + (c.x - b.x) * (a.y - c.y);
            if det == 0.0 {
                continue;
            }
            for iy in iy0..=iy1 {
                let y = grid.node(iy);
                for ix in ix0..=ix1 {
                    let idx = iy * n + ix;
                    if assigned[idx] {
                        continue;
                    }
                    let x = grid.node(ix);
                    let la = ((b.y - c.y) * (x - c.x) + (c.x - b.x) * (y - c.y)) / det;
                    let lb = ((c.y - a.y) * (x - c.x) + (a.x - c.x) * (y - c.y)) / det;
                    let lc = 1.0 - la - lb;
                    if la >= INSIDE_TOL && lb >= INSIDE_TOL && lc >= INSIDE_TOL {
                        weights[idx] =
                            [(a.obs as u32, la), (b.obs as u32, lb), (c.obs as u32, lc)];
                        assigned[idx] = true;
                        remaining -= 1;
                    }
                }
            }
        }
        if remaining > 0 {
            return Err(Error::DegenerateGeometry(format!(
                "{remaining} grid nodes not covered by the triangulation"
            )));
        }
        Ok(Self { grid: grid.clone(), points: points.len(), weights })
    }

    pub fn num_points(&self) -> usize {
        self.points
    }

    /// Interpolate one observed value per input point onto the grid.
    pub fn apply(&self, values: &[f64]) -> PhysicalField {
        assert_eq!(values.len(), self.points, "one value per observation point");
        let out = self
            .weights
            .iter()
            .map(|w| w.iter().map(|&(i, l)| l * values[i as usize]).sum())
            .collect();
        PhysicalField::from_values(&self.grid, out)
    }
}

/// Interpolate scattered observations `values` at `points` onto the grid.
pub fn scatter_to_grid(points: &[Point], values: &[f64], grid: &Grid) -> Result<PhysicalField> {
    if points.len() != values.len() {
        return Err(Error::InvalidObservers(format!(
            "{} points but {} values",
            points.len(),
            values.len()
        )));
    }
    Ok(ScatterInterpolant::new(grid, points)?.apply(values))
}

/// Observer lattice nodes along one axis, as offsets from an origin node.
#[derive(Clone, Debug)]
pub struct LatticeAxis {
    origin: usize,
    offsets: Vec<usize>,
    periodic: bool,
}

impl LatticeAxis {
    /// `offsets` strictly increasing and below `n`.
    pub fn new(origin: usize, offsets: Vec<usize>, periodic: bool) -> Self {
        debug_assert!(offsets.windows(2).all(|w| w[0] < w[1]));
        Self { origin, offsets, periodic }
    }

    /// `m` nodes spread evenly around the whole periodic axis.
    pub fn uniform_periodic(n: usize, m: usize) -> Self {
        let mut offsets: Vec<usize> =
            (0..m).map(|j| ((j * n) as f64 / m as f64).round() as usize % n).collect();
        offsets.dedup();
        Self::new(0, offsets, true)
    }

    /// `m >= 2` nodes from `origin` to `origin + span` inclusive, no wrap-around link.
    pub fn uniform_window(origin: usize, span: usize, m: usize) -> Self {
        let mut offsets: Vec<usize> = (0..m)
            .map(|j| ((j * span) as f64 / (m - 1).max(1) as f64).round() as usize)
            .collect();
        offsets.dedup();
        Self::new(origin, offsets, false)
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn set_origin(&mut self, origin: usize) {
        self.origin = origin;
    }

    /// Grid node indices of the lattice, in lattice order.
    pub fn nodes(&self, n: usize) -> Vec<usize> {
        self.offsets.iter().map(|o| (self.origin + o) % n).collect()
    }

    /// `(lower lattice index, upper lattice index, weight of upper)` for node `i`.
    fn bracket(&self, n: usize, i: usize) -> Option<(usize, usize, f64)> {
        let off = (i + n - self.origin % n) % n;
        let m = self.offsets.len();
        let pos = self.offsets.partition_point(|&o| o <= off);
        if pos == 0 {
            // before the first lattice node
            if !self.periodic {
                return None;
            }
            let (lo, hi) = (m - 1, 0);
            let span = self.offsets[0] + n - self.offsets[m - 1];
            let d = off + n - self.offsets[m - 1];
            return Some((lo, hi, d as f64 / span as f64));
        }
        let lo = pos - 1;
        if self.offsets[lo] == off {
            return Some((lo, lo, 0.0));
        }
        if pos == m {
            if !self.periodic {
                return None;
            }
            let span = self.offsets[0] + n - self.offsets[lo];
            return Some((lo, 0, (off - self.offsets[lo]) as f64 / span as f64));
        }
        let span = self.offsets[pos] - self.offsets[lo];
        Some((lo, pos, (off - self.offsets[lo]) as f64 / span as f64))
    }
}

/// Separable bilinear interpolant on a tensor-product observer lattice
/// whose nodes are grid nodes. Nodes outside a non-periodic axis get zero.
#[derive(Clone, Debug)]
pub struct LatticeInterpolant {
    pub x: LatticeAxis,
    pub y: LatticeAxis,
}

impl LatticeInterpolant {
    pub fn new(x: LatticeAxis, y: LatticeAxis) -> Self {
        Self { x, y }
    }

    pub fn num_points(&self) -> usize {
        self.x.len() * self.y.len()
    }

    /// Grid nodes of the lattice, row-major (`x` fastest).
    pub fn nodes(&self, n: usize) -> Vec<(usize, usize)> {
        let xs = self.x.nodes(n);
        let ys = self.y.nodes(n);
        ys.iter().flat_map(|&iy| xs.iter().map(move |&ix| (ix, iy))).collect()
    }

    /// Observe `field` at the lattice nodes and interpolate back to the grid.
    pub fn observe(&self, field: &PhysicalField) -> PhysicalField {
        let grid = field.grid();
        let values = sample_nodes(field, &self.nodes(grid.n()));
        self.apply(grid, &values)
    }

    /// `values` row-major over the lattice, as returned by [`nodes`](Self::nodes).
    pub fn apply(&self, grid: &Grid, values: &[f64]) -> PhysicalField {
        let n = grid.n();
        let mx = self.x.len();
        assert_eq!(values.len(), mx * self.y.len());
        let bx: Vec<_> = (0..n).map(|i| self.x.bracket(n, i)).collect();
        let by: Vec<_> = (0..n).map(|j| self.y.bracket(n, j)).collect();
        let mut out = vec![0.0; grid.len()];
        for (iy, b) in by.iter().enumerate() {
            let Some((y0, y1, wy)) = *b else { continue };
            let row0 = &values[y0 * mx..(y0 + 1) * mx];
            let row1 = &values[y1 * mx..(y1 + 1) * mx];
            for (ix, b) in bx.iter().enumerate() {
                let Some((x0, x1, wx)) = *b else { continue };
                let lower = (1.0 - wx) * row0[x0] + wx * row0[x1];
                out[iy * n + ix] = if wy == 0.0 {
                    lower
                } else {
                    let upper = (1.0 - wx) * row1[x0] + wx * row1[x1];
                    (1.0 - wy) * lower + wy * upper
                };
            }
        }
        PhysicalField::from_values(grid, out)
    }
}
