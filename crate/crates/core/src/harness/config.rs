use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::assimilator::{Physics, DEFAULT_FORCING_BAND};
use crate::observers::{ObserverSet, StrategyKind};
use crate::spectral::Grid;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    Paper,
    Desk,
}

impl std::str::FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Scale::Paper),
            "desk" => Ok(Scale::Desk),
            other => Err(Error::Config(format!("unknown scale '{other}', expected paper or desk"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PhysicsConfig {
    pub nu: f64,
    pub grashof: f64,
    pub dt: f64,
    pub t_spin: f64,
    pub t_run: f64,
    #[serde(default)]
    pub forcing_seed: u64,
    #[serde(default = "default_band")]
    pub forcing_band: (f64, f64),
}

fn default_band() -> (f64, f64) {
    DEFAULT_FORCING_BAND
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NudgingConfig {
    pub mu: f64,
    #[serde(default = "default_sample_every")]
    pub error_sample_every: u64,
    /// Runs stop once `err_psi_l2` drops below this.
    #[serde(default = "default_floor")]
    pub convergence_floor: f64,
}

fn default_sample_every() -> u64 {
    10
}

fn default_floor() -> f64 {
    1e-14
}

/// Observer strategy. Which size keys are required depends on `kind`:
///
/// | kind | keys |
/// |------|------|
/// | static, lagrangian | `m` (an `m x m` lattice) |
/// | bleeps, creeps, random-sweep | `count` |
/// | thin-sweep | `a` (columns), `b` (columns per step) |
/// | thick-sweep | `columns`, `rows`, `b` |
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct StrategyConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<StrategyKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default = "default_interval")]
    pub move_interval: u64,
    #[serde(default)]
    pub seed: u64,
}

fn default_interval() -> u64 {
    1
}

impl StrategyConfig {
    pub fn lattice(kind: StrategyKind, m: usize) -> Self {
        Self { kind: Some(kind), m: Some(m), move_interval: 1, ..Self::default() }
    }

    pub fn points(kind: StrategyKind, count: usize, seed: u64) -> Self {
        Self { kind: Some(kind), count: Some(count), move_interval: 1, seed, ..Self::default() }
    }

    pub fn thin_sweep(a: usize, b: usize) -> Self {
        Self { kind: Some(StrategyKind::ThinSweep), a: Some(a), b: Some(b), move_interval: 1, ..Self::default() }
    }

    pub fn thick_sweep(columns: usize, rows: usize, b: usize) -> Self {
        Self {
            kind: Some(StrategyKind::ThickSweep),
            columns: Some(columns),
            rows: Some(rows),
            b: Some(b),
            move_interval: 1,
            ..Self::default()
        }
    }

    fn required(kind: StrategyKind) -> &'static [&'static str] {
        match kind {
            StrategyKind::Static | StrategyKind::Lagrangian => &["m"],
            StrategyKind::Bleeps | StrategyKind::Creeps | StrategyKind::RandomSweep => &["count"],
            StrategyKind::ThinSweep => &["a", "b"],
            StrategyKind::ThickSweep => &["columns", "rows", "b"],
        }
    }

    fn present(&self) -> Vec<&'static str> {
        [
            ("count", self.count),
            ("m", self.m),
            ("a", self.a),
            ("b", self.b),
            ("columns", self.columns),
            ("rows", self.rows),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|_| k))
        .collect()
    }

    pub fn validate(&self) -> Result<StrategyKind> {
        let Some(kind) = self.kind else {
            return Err(Error::Config("strategy is missing keys: kind".into()));
        };
        let present = self.present();
        let missing: Vec<&str> =
            Self::required(kind).iter().copied().filter(|k| !present.contains(k)).collect();
        if !missing.is_empty() {
            return Err(Error::Config(format!(
                "strategy '{}' is missing keys: {}",
                kind.name(),
                missing.join(", ")
            )));
        }
        let extra: Vec<&str> =
            present.into_iter().filter(|k| !Self::required(kind).contains(k)).collect();
        if !extra.is_empty() {
            return Err(Error::Config(format!(
                "strategy '{}' does not use keys: {}",
                kind.name(),
                extra.join(", ")
            )));
        }
        if self.move_interval == 0 {
            return Err(Error::Config("moveInterval must be at least 1".into()));
        }
        Ok(kind)
    }

    /// Short label such as `bleeps-256` or `thick-sweep-8x32-b1`.
    pub fn label(&self) -> String {
        let Some(kind) = self.kind else { return "unknown".into() };
        let name = kind.name();
        match kind {
            StrategyKind::Static | StrategyKind::Lagrangian => {
                let m = self.m.unwrap_or(0);
                format!("{name}-{m}x{m}")
            }
            StrategyKind::Bleeps | StrategyKind::Creeps | StrategyKind::RandomSweep => {
                format!("{name}-{}", self.count.unwrap_or(0))
            }
            StrategyKind::ThinSweep => format!("{name}-a{}-b{}", self.a.unwrap_or(0), self.b.unwrap_or(0)),
            StrategyKind::ThickSweep => format!(
                "{name}-{}x{}-b{}",
                self.columns.unwrap_or(0),
                self.rows.unwrap_or(0),
                self.b.unwrap_or(0)
            ),
        }
    }

    pub fn build(&self, grid: &Grid) -> Result<ObserverSet> {
        let kind = self.validate()?;
        let get = |v: Option<usize>| v.expect("validated");
        match kind {
            StrategyKind::Static => ObserverSet::init_static_grid(grid, get(self.m)),
            StrategyKind::Lagrangian => ObserverSet::init_lagrangian(grid, get(self.m)),
            StrategyKind::Bleeps => ObserverSet::init_bleeps(grid, get(self.count), self.move_interval, self.seed),
            StrategyKind::Creeps => ObserverSet::init_creeps(grid, get(self.count), self.move_interval, self.seed),
            StrategyKind::RandomSweep => ObserverSet::init_random_sweep(grid, get(self.count), self.seed),
            StrategyKind::ThinSweep => ObserverSet::init_thin_sweep(grid, get(self.a), get(self.b)),
            StrategyKind::ThickSweep => {
                ObserverSet::init_thick_sweep(grid, get(self.columns), get(self.rows), get(self.b))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct IoConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint_path: Option<PathBuf>,
    #[serde(default)]
    pub log_trajectories: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub physics: PhysicsConfig,
    pub nudging: NudgingConfig,
    pub strategy: StrategyConfig,
    #[serde(default)]
    pub io: IoConfig,
}

impl RunConfig {
    /// Base configuration at a scale: static observers, `mu = 10`.
    pub fn preset(scale: Scale) -> Self {
        match scale {
            Scale::Desk => Self {
                grid: GridConfig { n: 128 },
                physics: PhysicsConfig {
                    nu: 1e-3,
                    grashof: 5e4,
                    dt: 0.005,
                    t_spin: 200.0,
                    t_run: 100.0,
                    forcing_seed: 0,
                    forcing_band: DESK_FORCING_BAND,
                },
                nudging: NudgingConfig { mu: 10.0, error_sample_every: 10, convergence_floor: 1e-14 },
                strategy: StrategyConfig::lattice(StrategyKind::Static, 16),
                io: IoConfig::default(),
            },
            Scale::Paper => Self {
                grid: GridConfig { n: 1024 },
                physics: PhysicsConfig {
                    nu: 1e-4,
                    grashof: 1e6,
                    dt: 0.005,
                    t_spin: 25_000.0,
                    t_run: 100.0,
                    forcing_seed: 0,
                    forcing_band: DEFAULT_FORCING_BAND,
                },
                nudging: NudgingConfig { mu: 10.0, error_sample_every: 10, convergence_floor: 1e-14 },
                strategy: StrategyConfig::lattice(StrategyKind::Static, 75),
                io: IoConfig::default(),
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn physics(&self) -> Physics {
        Physics {
            nu: self.physics.nu,
            grashof: self.physics.grashof,
            dt: self.physics.dt,
            forcing_seed: self.physics.forcing_seed,
            forcing_band: self.physics.forcing_band,
        }
    }

    /// Checks invariants; returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let p = &self.physics;
        let positive = [("nu", p.nu), ("grashof", p.grashof), ("dt", p.dt), ("mu", self.nudging.mu)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("tSpin", p.t_spin), ("tRun", p.t_run)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be nonnegative, got {v}")));
            }
        }
        if !(p.forcing_band.0 >= 0.0 && p.forcing_band.1 >= p.forcing_band.0) {
            return Err(Error::Config(format!("forcingBand must satisfy 0 <= lo <= hi, got {:?}", p.forcing_band)));
        }
        if self.nudging.error_sample_every == 0 {
            return Err(Error::Config("errorSampleEvery must be at least 1".into()));
        }
        if !(self.nudging.convergence_floor >= 0.0) {
            return Err(Error::Config("convergenceFloor must be nonnegative".into()));
        }
        Grid::new(self.grid.n).map_err(|e| Error::Config(e.to_string()))?;
        let kind = self.strategy.validate()?;
        let mut warnings = Vec::new();
        let mu_dt = self.nudging.mu * p.dt;
        let grid_aligned = matches!(kind, StrategyKind::Static | StrategyKind::ThickSweep);
        if grid_aligned && mu_dt >= 2.0 {
            warnings.push(format!("mu*dt = {mu_dt} >= 2; the nudged solve is expected to be unstable"));
        }
        Ok(warnings)
    }

    pub fn mu_dt(&self) -> f64 {
        self.nudging.mu * self.physics.dt
    }
}

/// Forcing shell used by the desk preset.
pub const DESK_FORCING_BAND: (f64, f64) = (2.0, 4.0);

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    RunConfig::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_round_trip() {
        for scale in [Scale::Desk, Scale::Paper] {
            let cfg = RunConfig::preset(scale);
            assert!(cfg.validate().unwrap().is_empty());
            assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        }
        let paper = RunConfig::preset(Scale::Paper);
        assert_eq!(paper.grid.n, 1024);
        assert_eq!(paper.strategy.m, Some(75));
    }

    #[test]
    fn empty_strategy_lists_missing_keys() {
        let mut v: serde_json::Value = serde_json::from_str(&RunConfig::preset(Scale::Desk).to_json()).unwrap();
        v["strategy"] = serde_json::json!({});
        let err = RunConfig::from_json(&v.to_string()).unwrap_err().to_string();
        assert!(err.contains("missing keys: kind"), "{err}");
        v["strategy"] = serde_json::json!({"kind": "thick-sweep"});
        let err = RunConfig::from_json(&v.to_string()).unwrap_err().to_string();
        assert!(err.contains("columns, rows, b"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&RunConfig::preset(Scale::Desk).to_json()).unwrap();
        v["physics"]["reynolds"] = serde_json::json!(3);
        assert!(RunConfig::from_json(&v.to_string()).is_err());
        let mut v: serde_json::Value = serde_json::from_str(&RunConfig::preset(Scale::Desk).to_json()).unwrap();
        v["strategy"]["count"] = serde_json::json!(3);
        assert!(RunConfig::from_json(&v.to_string()).unwrap_err().to_string().contains("does not use"));
    }

    #[test]
    fn defaults_apply() {
        let text = r#"{
            "grid": {"n": 64},
            "physics": {"nu": 0.01, "grashof": 100, "dt": 0.01, "tSpin": 1, "tRun": 1},
            "nudging": {"mu": 5},
            "strategy": {"kind": "bleeps", "count": 10}
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.nudging.error_sample_every, 10);
        assert_eq!(cfg.nudging.convergence_floor, 1e-14);
        assert_eq!(cfg.strategy.move_interval, 1);
        assert_eq!(cfg.physics.forcing_band, DEFAULT_FORCING_BAND);
        assert!(!cfg.io.log_trajectories);
    }

    #[test]
    fn mu_dt_warnings() {
        let mut cfg = RunConfig::preset(Scale::Desk);
        cfg.nudging.mu = 500.0;
        assert_eq!(cfg.validate().unwrap().len(), 1);
        cfg.strategy = StrategyConfig::thin_sweep(5, 5);
        cfg.nudging.mu = 30.0;
        assert!(cfg.validate().unwrap().is_empty());
        cfg.physics.nu = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn shipped_config_files() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
        assert_eq!(parse_config(&dir.join("desk.json")).unwrap(), RunConfig::preset(Scale::Desk));
        assert_eq!(parse_config(&dir.join("paper.json")).unwrap(), RunConfig::preset(Scale::Paper));
        let thin = parse_config(&dir.join("thin-sweep-desk.json")).unwrap();
        assert_eq!(thin.nudging.mu, 30.0);
        assert!(thin.validate().unwrap().is_empty());
        assert!(parse_config(&dir.join("missing.json")).is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(StrategyConfig::thick_sweep(8, 32, 1).label(), "thick-sweep-8x32-b1");
        assert_eq!(StrategyConfig::points(StrategyKind::Bleeps, 64, 0).label(), "bleeps-64");
        assert_eq!(StrategyConfig::lattice(StrategyKind::Static, 16).label(), "static-16x16");
    }
}
