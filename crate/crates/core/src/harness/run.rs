use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::RunConfig;
use super::output::{
    write_errors_csv, write_json, write_reference_csv, write_spectrum_csv, TrajectoryWriter,
};
use crate::assimilator::{
    advance_coupled, error_metrics, read_checkpoint, spin_up, write_checkpoint, CoupledState,
    ErrorRecord, Model, ReferenceNorms, StepOutcome,
};
use crate::integrator::StepperState;
use crate::observers::StrategyKind;
use crate::spectral::{energy_spectrum, Grid};
use crate::{Error, Result};

pub const VERSION_TAG: &str = concat!("aotsim-v", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Converged,
    TimedOut,
    Diverged,
}

impl RunStatus {
    pub fn name(self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::TimedOut => "timed-out",
            RunStatus::Diverged => "diverged",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub name: String,
    pub kind: StrategyKind,
    pub observer_count: usize,
    pub status: RunStatus,
    pub steps: u64,
    pub t_final: f64,
    pub final_error: Option<ErrorRecord>,
    pub cpu_seconds: f64,
    pub output_dir: Option<PathBuf>,
    #[serde(skip)]
    pub records: Vec<ErrorRecord>,
}

/// The spun-up reference solution and the solver that produced it.
#[derive(Clone, Debug)]
pub struct Reference {
    pub model: Model,
    pub state: StepperState,
}

/// Load the spin-up checkpoint when it matches `config`, otherwise spin up
/// (and write the checkpoint if a path is configured).
pub fn prepare_reference(config: &RunConfig) -> Result<Reference> {
    let grid = Grid::new(config.grid.n)?;
    let model = Model::new(&grid, config.physics())?;
    let steps = model.steps_for(config.physics.t_spin);
    if let Some(path) = &config.io.checkpoint_path {
        if path.exists() {
            let (header, state) = read_checkpoint(path)?;
            if header.n != config.grid.n || header.physics != config.physics() || header.step_index != steps {
                return Err(Error::Checkpoint {
                    path: path.clone(),
                    reason: format!(
                        "holds N={}, step {} with {:?}, config wants N={}, step {steps} with {:?}",
                        header.n,
                        header.step_index,
                        header.physics,
                        config.grid.n,
                        config.physics()
                    ),
                });
            }
            return Ok(Reference { model, state });
        }
    }
    let state = spin_up(&model, config.physics.t_spin)?;
    if let Some(path) = &config.io.checkpoint_path {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        write_checkpoint(path, model.physics(), &state)?;
    }
    Ok(Reference { model, state })
}

#[derive(Serialize)]
struct Conventions {
    domain: &'static str,
    vorticity: &'static str,
    grashof: &'static str,
    forcing: String,
    nudging: &'static str,
    dealiasing: &'static str,
    time: &'static str,
    initial_nudged_state: &'static str,
}

#[derive(Serialize)]
struct Metadata<'a> {
    name: &'a str,
    version: &'a str,
    config: &'a RunConfig,
    observer_count: usize,
    mu_dt: f64,
    warnings: &'a [String],
    reference_start_time: f64,
    reference_start_step: u64,
    conventions: Conventions,
    status: RunStatus,
    steps: u64,
    t_final: f64,
    cpu_seconds: f64,
    final_error: Option<ErrorRecord>,
}

fn conventions(config: &RunConfig) -> Conventions {
    let (lo, hi) = config.physics.forcing_band;
    Conventions {
        domain: "[-pi, pi)^2, N x N nodes x_i = -pi + 2 pi i / N, row-major with x fastest",
        vorticity: "omega = laplacian(psi), u = (-d_y psi, d_x psi)",
        grashof: "G = ||f||_L2 / nu^2 with f the velocity-level forcing",
        forcing: format!(
            "time-independent, uniform random phases (seed {}), equal velocity amplitude on retained modes with {lo} <= |k| <= {hi}",
            config.physics.forcing_seed
        ),
        nudging: "explicit increment dt * curl(mu I(u - v)) after the IF-AB3 step, from pre-step fields and observer positions",
        dealiasing: "2/3 rule: keep 3 max(|kx|, |ky|) <= N, Nyquist removed",
        time: "t columns are measured from the start of assimilation",
        initial_nudged_state: "zero vorticity",
    }
}

/// Full lifecycle: reference, coupled run, outputs.
pub fn run_experiment(config: &RunConfig) -> Result<RunSummary> {
    let reference = prepare_reference(config)?;
    let name = config.strategy.label();
    let out = config.io.output_dir.clone();
    run_from_reference(config, &reference, &name, out.as_deref())
}

/// Coupled run starting from an already spun-up reference. Writes outputs to
/// `out` when given.
pub fn run_from_reference(
    config: &RunConfig,
    reference: &Reference,
    name: &str,
    out: Option<&Path>,
) -> Result<RunSummary> {
    let warnings = config.validate()?;
    for w in &warnings {
        eprintln!("warning: {name}: {w}");
    }
    let model = &reference.model;
    let grid = model.grid();
    if grid.n() != config.grid.n {
        return Err(Error::Config(format!("reference grid {} does not match config {}", grid.n(), config.grid.n)));
    }
    let observers = config.strategy.build(grid)?;
    let observer_count = observers.len();
    let kind = observers.kind();
    let mut state = CoupledState::new(reference.state.clone(), observers, config.nudging.mu)?;
    let t0 = state.t();
    let steps = model.steps_for(config.physics.t_run);
    let every = config.nudging.error_sample_every;

    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
    }
    let mut trajectories = match (out, config.io.log_trajectories) {
        (Some(dir), true) => Some(TrajectoryWriter::create(&dir.join("trajectories.csv"))?),
        _ => None,
    };

    let sample = |state: &CoupledState| -> Result<(ErrorRecord, ReferenceNorms)> {
        let mut e = error_metrics(state)?;
        e.t -= t0;
        let mut r = ReferenceNorms::of(&state.reference);
        r.t -= t0;
        Ok((e, r))
    };

    let mut records = Vec::new();
    let mut norms = Vec::new();
    let (e, r) = sample(&state)?;
    records.push(e);
    norms.push(r);
    if let Some(tw) = trajectories.as_mut() {
        tw.record(0.0, state.observers.positions())?;
    }

    let mut status = RunStatus::TimedOut;
    let mut taken = 0;
    for step in 1..=steps {
        let outcome = advance_coupled(model, &mut state)?;
        taken = step;
        if outcome == StepOutcome::Diverged {
            let (e, r) = sample(&state)?;
            records.push(e);
            norms.push(r);
            status = RunStatus::Diverged;
            break;
        }
        if step % every == 0 || step == steps {
            let (e, r) = sample(&state)?;
            records.push(e);
            norms.push(r);
            if let Some(tw) = trajectories.as_mut() {
                tw.record(e.t, state.observers.positions())?;
            }
            if e.err_psi_l2 < config.nudging.convergence_floor {
                status = RunStatus::Converged;
                break;
            }
        }
    }

    let summary = RunSummary {
        name: name.to_string(),
        kind,
        observer_count,
        status,
        steps: taken,
        t_final: state.t() - t0,
        final_error: records.last().copied(),
        cpu_seconds: state.cpu_seconds,
        output_dir: out.map(Path::to_path_buf),
        records,
    };

    if let Some(dir) = out {
        write_errors_csv(&dir.join("errors.csv"), &summary.records)?;
        write_reference_csv(&dir.join("reference.csv"), &norms)?;
        write_spectrum_csv(
            &dir.join("spectrum.csv"),
            &energy_spectrum(&state.reference.omega),
            &energy_spectrum(&state.assimilated.omega),
        )?;
        if let Some(tw) = trajectories {
            tw.finish()?;
        }
        let meta = Metadata {
            name,
            version: VERSION_TAG,
            config,
            observer_count,
            mu_dt: config.mu_dt(),
            warnings: &warnings,
            reference_start_time: t0,
            reference_start_step: reference.state.step_index,
            conventions: conventions(config),
            status,
            steps: taken,
            t_final: summary.t_final,
            cpu_seconds: summary.cpu_seconds,
            final_error: summary.final_error,
        };
        write_json(&dir.join("metadata.json"), &meta)?;
    }
    Ok(summary)
}
