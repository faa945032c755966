use std::path::Path;

use serde::Serialize;

use super::config::{RunConfig, Scale, StrategyConfig};
use super::output::{write_index_csv, write_json};
use super::run::{prepare_reference, run_from_reference, RunStatus, RunSummary};
use crate::observers::StrategyKind;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Battery {
    EqualCount,
    MinCount,
    ThickSpeed,
}

impl std::str::FromStr for Battery {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal-count" => Ok(Battery::EqualCount),
            "min-count" => Ok(Battery::MinCount),
            "thick-speed" => Ok(Battery::ThickSpeed),
            other => Err(Error::Config(format!(
                "unknown comparison '{other}', expected equal-count, min-count or thick-speed"
            ))),
        }
    }
}

/// One battery member: strategy plus its nudging strength.
#[derive(Clone, Debug, PartialEq)]
pub struct Member {
    pub strategy: StrategyConfig,
    pub mu: f64,
}

fn member(strategy: StrategyConfig, mu: f64) -> Member {
    Member { strategy, mu }
}

/// Strategies run by a battery at a given scale.
pub fn battery(which: Battery, scale: Scale, seed: u64) -> Vec<Member> {
    use StrategyKind::*;
    let pts = |kind, count| StrategyConfig::points(kind, count, seed);
    match (which, scale) {
        (Battery::EqualCount, Scale::Paper) => vec![
            member(StrategyConfig::lattice(Static, 75), 10.0),
            member(pts(Bleeps, 5625), 10.0),
            member(StrategyConfig::thin_sweep(5, 5), 30.0),
            member(StrategyConfig::thick_sweep(38, 150, 3), 10.0),
            member(pts(RandomSweep, 5625), 10.0),
            member(pts(Creeps, 5625), 10.0),
            member(StrategyConfig::lattice(Lagrangian, 75), 10.0),
        ],
        (Battery::EqualCount, Scale::Desk) => vec![
            member(StrategyConfig::lattice(Static, 16), 10.0),
            member(pts(Bleeps, 256), 10.0),
            member(StrategyConfig::thin_sweep(2, 2), 30.0),
            member(StrategyConfig::thick_sweep(8, 32, 1), 10.0),
            member(pts(RandomSweep, 256), 10.0),
            member(pts(Creeps, 256), 10.0),
            member(StrategyConfig::lattice(Lagrangian, 16), 10.0),
        ],
        (Battery::MinCount, Scale::Paper) => vec![
            member(StrategyConfig::lattice(Static, 75), 10.0),
            member(pts(Bleeps, 1600), 10.0),
            member(StrategyConfig::thin_sweep(3, 3), 30.0),
            member(StrategyConfig::thick_sweep(20, 80, 3), 10.0),
            member(pts(RandomSweep, 2500), 10.0),
            member(pts(Creeps, 2500), 10.0),
            member(StrategyConfig::lattice(Lagrangian, 60), 10.0),
        ],
        (Battery::MinCount, Scale::Desk) => vec![
            member(StrategyConfig::lattice(Static, 16), 10.0),
            member(pts(Bleeps, 64), 10.0),
            member(StrategyConfig::thin_sweep(1, 1), 30.0),
            member(StrategyConfig::thick_sweep(6, 16, 1), 10.0),
            member(pts(RandomSweep, 100), 10.0),
            member(pts(Creeps, 100), 10.0),
            member(StrategyConfig::lattice(Lagrangian, 12), 10.0),
        ],
        (Battery::ThickSpeed, Scale::Paper) => vec![
            member(StrategyConfig::thick_sweep(38, 150, 1), 10.0),
            member(StrategyConfig::thick_sweep(38, 150, 3), 10.0),
        ],
        (Battery::ThickSpeed, Scale::Desk) => vec![
            member(StrategyConfig::thick_sweep(8, 32, 1), 10.0),
            member(StrategyConfig::thick_sweep(8, 32, 3), 10.0),
        ],
    }
}

/// Run a battery against one shared reference. Each member writes to
/// `out/<label>/`; `out/index.csv` lists them all. A member that fails with an
/// error is reported and skipped; the rest still run.
pub fn run_comparison(base: &RunConfig, which: Battery, scale: Scale, out: &Path) -> Result<Vec<RunSummary>> {
    base.validate()?;
    std::fs::create_dir_all(out)?;
    let reference = prepare_reference(base)?;
    let mut summaries = Vec::new();
    let mut failures = Vec::new();
    for m in battery(which, scale, base.strategy.seed) {
        let mut cfg = base.clone();
        cfg.strategy = m.strategy;
        cfg.nudging.mu = m.mu;
        let name = cfg.strategy.label();
        let dir = out.join(&name);
        match run_from_reference(&cfg, &reference, &name, Some(&dir)) {
            Ok(s) => {
                eprintln!(
                    "{name}: {} at t={:.3} err_psi_l2={:.3e} cpu={:.1}s",
                    s.status.name(),
                    s.t_final,
                    s.final_error.map_or(f64::NAN, |e| e.err_psi_l2),
                    s.cpu_seconds
                );
                summaries.push(s);
            }
            Err(e) => {
                eprintln!("{name}: failed: {e}");
                failures.push(serde_json::json!({"name": name, "error": e.to_string()}));
            }
        }
    }
    write_index_csv(&out.join("index.csv"), &summaries)?;
    write_json(
        &out.join("index.json"),
        &serde_json::json!({
            "battery": which,
            "scale": scale,
            "runs": summaries,
            "failures": failures,
        }),
    )?;
    Ok(summaries)
}

/// Count of members with a given status.
pub fn count_status(runs: &[RunSummary], status: RunStatus) -> usize {
    runs.iter().filter(|r| r.status == status).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn batteries_build_at_both_scales() {
        for scale in [Scale::Desk, Scale::Paper] {
            let n = RunConfig::preset(scale).grid.n;
            let grid = Grid::new(n).unwrap();
            for which in [Battery::EqualCount, Battery::MinCount, Battery::ThickSpeed] {
                for m in battery(which, scale, 1) {
                    let obs = m.strategy.build(&grid).unwrap();
                    assert!(!obs.is_empty());
                }
            }
        }
    }

    #[test]
    fn paper_equal_count_sizes() {
        let grid = Grid::new(1024).unwrap();
        let members = battery(Battery::EqualCount, Scale::Paper, 0);
        assert_eq!(members.len(), 7);
        let counts: Vec<usize> = members.iter().map(|m| m.strategy.build(&grid).unwrap().len()).collect();
        assert_eq!(counts[0], 5625);
        assert_eq!(counts[1], 5625);
        assert_eq!(counts[3], 5700);
        let thick = battery(Battery::ThickSpeed, Scale::Paper, 0);
        assert_eq!(thick.len(), 2);
        assert_eq!(thick[0].strategy.b, Some(1));
        assert_eq!(thick[1].strategy.b, Some(3));
    }
}
