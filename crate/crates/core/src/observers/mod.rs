//! Observer sets and their movement strategies.
//!
//! Every strategy keeps its observers inside `[-pi, pi)^2` and never changes
//! the observer count. Grid-aligned strategies (static grid, bleeps, creeps,
//! both sweeps) track integer node indices so positions stay exactly on
//! nodes. Random sweeps and Lagrangian particles move off-grid, so their
//! observations go through the bilinear sampler `J` first.

mod interp;
mod region;

use std::collections::VecDeque;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Open01;
use serde::{Deserialize, Serialize};

pub use interp::{
    sample_bilinear, sample_nodes, scatter_to_grid, LatticeAxis, LatticeInterpolant,
    ScatterInterpolant,
};
pub use region::{apply_region_mask, region_thin_sweep, Region};

use crate::integrator::Scheme;
use crate::spectral::{Grid, PhysicalField};
use crate::{Error, Result};

pub type Point = [f64; 2];

/// Wrap a coordinate into `[-pi, pi)`.
pub fn wrap(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let y = (x + PI).rem_euclid(two_pi) - PI;
    if y >= PI {
        y - two_pi
    } else {
        y
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    #[serde(alias = "static-grid")]
    Static,
    Bleeps,
    ThinSweep,
    ThickSweep,
    RandomSweep,
    Creeps,
    Lagrangian,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 7] = [
        StrategyKind::Static,
        StrategyKind::Bleeps,
        StrategyKind::ThinSweep,
        StrategyKind::ThickSweep,
        StrategyKind::RandomSweep,
        StrategyKind::Creeps,
        StrategyKind::Lagrangian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Static => "static",
            StrategyKind::Bleeps => "bleeps",
            StrategyKind::ThinSweep => "thin-sweep",
            StrategyKind::ThickSweep => "thick-sweep",
            StrategyKind::RandomSweep => "random-sweep",
            StrategyKind::Creeps => "creeps",
            StrategyKind::Lagrangian => "lagrangian",
        }
    }

    /// Independent RNG stream per strategy for a shared seed.
    fn stream(self) -> u64 {
        match self {
            StrategyKind::Static => 1,
            StrategyKind::Bleeps => 2,
            StrategyKind::ThinSweep => 3,
            StrategyKind::ThickSweep => 4,
            StrategyKind::RandomSweep => 5,
            StrategyKind::Creeps => 6,
            StrategyKind::Lagrangian => 7,
        }
    }
}

/// Creep displacement in cells for a direction draw `j` in `1..=5`.
pub fn creep_direction(j: u8) -> (i64, i64) {
    match j {
        1 => (1, 0),
        2 => (-1, 0),
        3 => (0, 1),
        4 => (0, -1),
        5 => (0, 0),
        _ => panic!("creep direction must be in 1..=5, got {j}"),
    }
}

#[derive(Clone, Debug)]
enum State {
    Static { lattice: LatticeInterpolant },
    Bleeps { nodes: Vec<(usize, usize)>, interval: u64 },
    Creeps { nodes: Vec<(usize, usize)>, interval: u64 },
    ThinSweep { region: Region, b: usize },
    ThickSweep { region: Region, lattice: LatticeInterpolant, b: usize },
    RandomSweep { velocities: Vec<Point> },
    Lagrangian { history: VecDeque<Vec<Point>> },
}

/// Positions of all observers plus the state their strategy needs to move.
#[derive(Clone, Debug)]
pub struct ObserverSet {
    grid: Grid,
    kind: StrategyKind,
    positions: Vec<Point>,
    state: State,
    rng: ChaCha8Rng,
    seed: u64,
    steps: u64,
    /// Triangulation for the current positions, rebuilt after a move.
    scatter: Option<ScatterInterpolant>,
}

fn node_positions(grid: &Grid, nodes: &[(usize, usize)]) -> Vec<Point> {
    nodes.iter().map(|&(ix, iy)| [grid.node(ix), grid.node(iy)]).collect()
}

fn strategy_rng(kind: StrategyKind, seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(kind.stream());
    rng
}

impl ObserverSet {
    fn build(grid: &Grid, kind: StrategyKind, state: State, positions: Vec<Point>, rng: ChaCha8Rng, seed: u64) -> Self {
        Self { grid: grid.clone(), kind, positions, state, rng, seed, steps: 0, scatter: None }
    }

    /// Uniform `m x m` lattice snapped to grid nodes.
    pub fn init_static_grid(grid: &Grid, m: usize) -> Result<Self> {
        if m < 2 || m > grid.n() {
            return Err(Error::InvalidObservers(format!(
                "static lattice needs 2 <= M <= N={}, got M={m}",
                grid.n()
            )));
        }
        let lattice = LatticeInterpolant::new(
            LatticeAxis::uniform_periodic(grid.n(), m),
            LatticeAxis::uniform_periodic(grid.n(), m),
        );
        let positions = node_positions(grid, &lattice.nodes(grid.n()));
        Ok(Self::build(grid, StrategyKind::Static, State::Static { lattice }, positions, strategy_rng(StrategyKind::Static, 0), 0))
    }

    fn random_nodes(grid: &Grid, count: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
        let n = grid.n();
        // Draws from {0, ..., N}; N is the same node as 0 on the torus.
        (0..count).map(|_| (rng.gen_range(0..=n) % n, rng.gen_range(0..=n) % n)).collect()
    }

    /// `count` observers re-placed at random nodes every `interval` steps.
    pub fn init_bleeps(grid: &Grid, count: usize, interval: u64, seed: u64) -> Result<Self> {
        if count == 0 || interval == 0 {
            return Err(Error::InvalidObservers("bleeps need count >= 1 and interval >= 1".into()));
        }
        let mut rng = strategy_rng(StrategyKind::Bleeps, seed);
        let nodes = Self::random_nodes(grid, count, &mut rng);
        let positions = node_positions(grid, &nodes);
        Ok(Self::build(grid, StrategyKind::Bleeps, State::Bleeps { nodes, interval }, positions, rng, seed))
    }

    /// `count` random walkers starting at random nodes, moving every `interval` steps.
    pub fn init_creeps(grid: &Grid, count: usize, interval: u64, seed: u64) -> Result<Self> {
        if count == 0 || interval == 0 {
            return Err(Error::InvalidObservers("creeps need count >= 1 and interval >= 1".into()));
        }
        let mut rng = strategy_rng(StrategyKind::Creeps, seed);
        let nodes = Self::random_nodes(grid, count, &mut rng);
        let positions = node_positions(grid, &nodes);
        Ok(Self::build(grid, StrategyKind::Creeps, State::Creeps { nodes, interval }, positions, rng, seed))
    }

    /// Full observation of an `a`-column strip moving `b` columns per step.
    pub fn init_thin_sweep(grid: &Grid, a: usize, b: usize) -> Result<Self> {
        if a == 0 || a > grid.n() {
            return Err(Error::InvalidObservers(format!("thin sweep width a={a} outside 1..={}", grid.n())));
        }
        let region = Region::new(grid, 0, a)?;
        let positions = Self::region_positions(grid, &region);
        Ok(Self::build(grid, StrategyKind::ThinSweep, State::ThinSweep { region, b }, positions, strategy_rng(StrategyKind::ThinSweep, 0), 0))
    }

    /// `columns x rows` observer lattice in the quarter-domain window
    /// `[-pi, -pi/2] x [-pi, pi]`, moving `b` columns per step.
    pub fn init_thick_sweep(grid: &Grid, columns: usize, rows: usize, b: usize) -> Result<Self> {
        let n = grid.n();
        if !n.is_multiple_of(4) {
            return Err(Error::InvalidObservers(format!("thick sweep needs N divisible by 4, got {n}")));
        }
        let span = n / 4;
        if columns < 2 || columns > span + 1 || rows == 0 || rows > n {
            return Err(Error::InvalidObservers(format!(
                "thick sweep lattice {columns}x{rows} does not fit a window of {} columns",
                span + 1
            )));
        }
        let region = Region::new(grid, 0, span + 1)?;
        let lattice = LatticeInterpolant::new(
            LatticeAxis::uniform_window(0, span, columns),
            LatticeAxis::uniform_periodic(n, rows),
        );
        let positions = node_positions(grid, &lattice.nodes(n));
        Ok(Self::build(grid, StrategyKind::ThickSweep, State::ThickSweep { region, lattice, b }, positions, strategy_rng(StrategyKind::ThickSweep, 0), 0))
    }

    /// `count` off-grid observers with fixed velocities uniform on `(-1, 1)^2`.
    pub fn init_random_sweep(grid: &Grid, count: usize, seed: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidObservers("random sweep needs count >= 1".into()));
        }
        let mut rng = strategy_rng(StrategyKind::RandomSweep, seed);
        let mut positions = Vec::with_capacity(count);
        let mut velocities = Vec::with_capacity(count);
        for _ in 0..count {
            let u: f64 = rng.sample(Open01);
            let v: f64 = rng.sample(Open01);
            positions.push([wrap(-PI + 2.0 * PI * u), wrap(-PI + 2.0 * PI * v)]);
        }
        for _ in 0..count {
            let a: f64 = rng.sample(Open01);
            let b: f64 = rng.sample(Open01);
            velocities.push([2.0 * a - 1.0, 2.0 * b - 1.0]);
        }
        Ok(Self::build(grid, StrategyKind::RandomSweep, State::RandomSweep { velocities }, positions, rng, seed))
    }

    /// Lagrangian particles released from an `m x m` lattice.
    pub fn init_lagrangian(grid: &Grid, m: usize) -> Result<Self> {
        let lattice = Self::init_static_grid(grid, m)?;
        Ok(Self::build(
            grid,
            StrategyKind::Lagrangian,
            State::Lagrangian { history: VecDeque::with_capacity(2) },
            lattice.positions,
            strategy_rng(StrategyKind::Lagrangian, 0),
            0,
        ))
    }

    /// Lagrangian particles starting at arbitrary positions.
    pub fn init_lagrangian_at(grid: &Grid, positions: Vec<Point>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidObservers("no particles".into()));
        }
        let positions = positions.into_iter().map(|[x, y]| [wrap(x), wrap(y)]).collect();
        Ok(Self::build(grid, StrategyKind::Lagrangian, State::Lagrangian { history: VecDeque::with_capacity(2) }, positions, strategy_rng(StrategyKind::Lagrangian, 0), 0))
    }

    fn region_positions(grid: &Grid, region: &Region) -> Vec<Point> {
        let mut out = Vec::with_capacity(region.columns() * grid.n());
        for iy in 0..grid.n() {
            for ix in region.column_indices() {
                out.push([grid.node(ix), grid.node(iy)]);
            }
        }
        out
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of completed movement steps.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Current observation window for the sweeps.
    pub fn region(&self) -> Option<&Region> {
        match &self.state {
            State::ThinSweep { region, .. } | State::ThickSweep { region, .. } => Some(region),
            _ => None,
        }
    }

    /// Per-observer velocities of a random sweep.
    pub fn velocities(&self) -> Option<&[Point]> {
        match &self.state {
            State::RandomSweep { velocities } => Some(velocities),
            _ => None,
        }
    }

    /// Node indices for node-bound point strategies.
    pub fn nodes(&self) -> Option<&[(usize, usize)]> {
        match &self.state {
            State::Bleeps { nodes, .. } | State::Creeps { nodes, .. } => Some(nodes),
            _ => None,
        }
    }

    fn mismatch(&self, wanted: StrategyKind) -> Error {
        Error::InvalidObservers(format!("{} step called on a {} observer set", wanted.name(), self.kind.name()))
    }

    /// Move the observers forward by one time step. `velocity` is the
    /// reference flow at the current time, needed only by Lagrangian sets.
    pub fn advance(&mut self, dt: f64, velocity: Option<(&PhysicalField, &PhysicalField)>) -> Result<()> {
        match self.kind {
            StrategyKind::Static => {
                self.steps += 1;
                Ok(())
            }
            StrategyKind::Bleeps => self.step_bleeps(),
            StrategyKind::Creeps => self.step_creeps(),
            StrategyKind::ThinSweep => self.step_thin_sweep(),
            StrategyKind::ThickSweep => self.step_thick_sweep(),
            StrategyKind::RandomSweep => self.step_random_sweep(dt),
            StrategyKind::Lagrangian => {
                let (u1, u2) = velocity.ok_or_else(|| {
                    Error::InvalidObservers("Lagrangian observers need the flow velocity".into())
                })?;
                self.step_lagrangian(u1, u2, dt)
            }
        }
    }

    pub fn step_bleeps(&mut self) -> Result<()> {
        let State::Bleeps { nodes, interval } = &mut self.state else {
            return Err(self.mismatch(StrategyKind::Bleeps));
        };
        self.steps += 1;
        if self.steps.is_multiple_of(*interval) {
            let count = nodes.len();
            *nodes = Self::random_nodes(&self.grid, count, &mut self.rng);
            self.positions = node_positions(&self.grid, nodes);
            self.scatter = None;
        }
        Ok(())
    }

    /// Draw `j` uniformly from `1..=5` for each observer and move by `d(j)`.
    pub fn step_creeps(&mut self) -> Result<()> {
        let State::Creeps { nodes, interval } = &mut self.state else {
            return Err(self.mismatch(StrategyKind::Creeps));
        };
        self.steps += 1;
        if self.steps.is_multiple_of(*interval) {
            let n = self.grid.n() as i64;
            for node in nodes.iter_mut() {
                let (dx, dy) = creep_direction(self.rng.gen_range(1..=5));
                node.0 = (node.0 as i64 + dx).rem_euclid(n) as usize;
                node.1 = (node.1 as i64 + dy).rem_euclid(n) as usize;
            }
            self.positions = node_positions(&self.grid, nodes);
            self.scatter = None;
        }
        Ok(())
    }

    pub fn step_thin_sweep(&mut self) -> Result<()> {
        let State::ThinSweep { region, b } = &mut self.state else {
            return Err(self.mismatch(StrategyKind::ThinSweep));
        };
        region.shift(*b);
        self.positions = Self::region_positions(&self.grid, region);
        self.steps += 1;
        Ok(())
    }

    pub fn step_thick_sweep(&mut self) -> Result<()> {
        let State::ThickSweep { region, lattice, b } = &mut self.state else {
            return Err(self.mismatch(StrategyKind::ThickSweep));
        };
        region.shift(*b);
        lattice.x.set_origin(region.start());
        self.positions = node_positions(&self.grid, &lattice.nodes(self.grid.n()));
        self.steps += 1;
        Ok(())
    }

    pub fn step_random_sweep(&mut self, dt: f64) -> Result<()> {
        let State::RandomSweep { velocities } = &self.state else {
            return Err(self.mismatch(StrategyKind::RandomSweep));
        };
        for (p, v) in self.positions.iter_mut().zip(velocities) {
            p[0] = wrap(p[0] + v[0] * dt);
            p[1] = wrap(p[1] + v[1] * dt);
        }
        self.scatter = None;
        self.steps += 1;
        Ok(())
    }

    /// Advance `d l / dt = u(l, t)` with AB3 (Euler, AB2 while starting up),
    /// sampling `u` bilinearly at the particle positions.
    pub fn step_lagrangian(&mut self, u1: &PhysicalField, u2: &PhysicalField, dt: f64) -> Result<()> {
        let State::Lagrangian { history } = &mut self.state else {
            return Err(self.mismatch(StrategyKind::Lagrangian));
        };
        self.grid.ensure_same(u1.grid())?;
        self.grid.ensure_same(u2.grid())?;
        let s1 = sample_bilinear(u1, &self.positions);
        let s2 = sample_bilinear(u2, &self.positions);
        history.push_front(s1.into_iter().zip(s2).map(|(a, b)| [a, b]).collect());
        history.truncate(3);
        let scheme = Scheme::for_step(history.len() as u64 - 1);
        let coeffs = scheme.coefficients();
        for (i, p) in self.positions.iter_mut().enumerate() {
            let mut d = [0.0, 0.0];
            for (c, h) in coeffs.iter().zip(history.iter()) {
                d[0] += c * h[i][0];
                d[1] += c * h[i][1];
            }
            p[0] = wrap(p[0] + dt * d[0]);
            p[1] = wrap(p[1] + dt * d[1]);
        }
        history.truncate(2);
        self.scatter = None;
        self.steps += 1;
        Ok(())
    }

    /// `I_{h,t}(w)` for one scalar component `w` of the observed difference.
    pub fn interpolate(&mut self, w: &PhysicalField) -> Result<PhysicalField> {
        Ok(self.interpolate_components(&[w])?.remove(0))
    }

    /// `I_{h,t}` applied to both velocity components of a difference field.
    pub fn interpolate_pair(&mut self, w1: &PhysicalField, w2: &PhysicalField) -> Result<(PhysicalField, PhysicalField)> {
        let mut out = self.interpolate_components(&[w1, w2])?;
        let second = out.pop().expect("two components");
        Ok((out.pop().expect("two components"), second))
    }

    fn interpolate_components(&mut self, ws: &[&PhysicalField]) -> Result<Vec<PhysicalField>> {
        for w in ws {
            self.grid.ensure_same(w.grid())?;
        }
        let out = match &self.state {
            State::Static { lattice } => ws.iter().map(|w| lattice.observe(w)).collect(),
            State::ThinSweep { region, .. } => ws.iter().map(|w| apply_region_mask(w, region)).collect(),
            State::ThickSweep { region, lattice, .. } => {
                ws.iter().map(|w| apply_region_mask(&lattice.observe(w), region)).collect()
            }
            State::Bleeps { nodes, .. } | State::Creeps { nodes, .. } => {
                let values: Vec<Vec<f64>> = ws.iter().map(|w| sample_nodes(w, nodes)).collect();
                let interp = self.scatter_interpolant()?;
                values.iter().map(|v| interp.apply(v)).collect()
            }
            State::RandomSweep { .. } | State::Lagrangian { .. } => {
                let values: Vec<Vec<f64>> =
                    ws.iter().map(|w| sample_bilinear(w, &self.positions)).collect();
                let interp = self.scatter_interpolant()?;
                values.iter().map(|v| interp.apply(v)).collect()
            }
        };
        Ok(out)
    }

    fn scatter_interpolant(&mut self) -> Result<&ScatterInterpolant> {
        if self.scatter.is_none() {
            self.scatter = Some(ScatterInterpolant::new(&self.grid, &self.positions)?);
        }
        Ok(self.scatter.as_ref().expect("just built"))
    }
}
