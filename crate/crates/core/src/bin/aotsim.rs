use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use aotsim::assimilator::{spin_up_with, write_checkpoint, Model};
use aotsim::harness::{
    parse_config, run_comparison, run_experiment, write_spectrum_csv, Battery, RunConfig, RunStatus, Scale,
};
use aotsim::observers::StrategyKind;
use aotsim::spectral::{energy_spectrum, l2_norm, streamfunction, Grid};

#[derive(Parser)]
#[command(name = "aotsim", version, about = "Nudging data assimilation for forced 2D turbulence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spin up the reference flow from rest and write a checkpoint.
    Spinup(Common),
    /// One assimilation run.
    Run(Common),
    /// A strategy battery sharing one reference: equal-count, min-count or thick-speed.
    Compare(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; overrides the scale preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `run`: strategy kind to use with the scale preset. `compare`: battery name.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, default_value = "desk")]
    scale: Scale,
    /// Observer seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Spin-up checkpoint; read if it exists, written otherwise.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => parse_config(path)?,
            None => RunConfig::preset(self.scale),
        };
        if let Some(seed) = self.seed {
            cfg.strategy.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.io.output_dir = Some(out.clone());
        }
        if let Some(ckpt) = &self.checkpoint {
            cfg.io.checkpoint_path = Some(ckpt.clone());
        }
        Ok(cfg)
    }
}

/// Scale-appropriate strategy for `run --preset <kind>`.
fn strategy_preset(cfg: &mut RunConfig, kind: StrategyKind, scale: Scale) -> Result<()> {
    let members = aotsim::harness::battery(Battery::EqualCount, scale, cfg.strategy.seed);
    let Some(m) = members.into_iter().find(|m| m.strategy.kind == Some(kind)) else {
        bail!("no preset for strategy {}", kind.name());
    };
    cfg.strategy = m.strategy;
    cfg.nudging.mu = m.mu;
    Ok(())
}

fn spinup(args: &Common) -> Result<()> {
    let cfg = args.config()?;
    cfg.validate()?;
    let Some(path) = cfg.io.checkpoint_path.clone() else {
        bail!("spinup needs --checkpoint or io.checkpointPath");
    };
    let grid = Grid::new(cfg.grid.n)?;
    let model = Model::new(&grid, cfg.physics())?;
    let total = model.steps_for(cfg.physics.t_spin);
    let report = (total / 20).max(1);
    let state = spin_up_with(&model, cfg.physics.t_spin, |s| {
        if s.step_index % report == 0 {
            let psi = streamfunction(&s.omega).map(|p| l2_norm(&p)).unwrap_or(f64::NAN);
            eprintln!("t={:.2} |omega|={:.4e} |psi|={:.4e}", s.t, l2_norm(&s.omega), psi);
        }
    })?;
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    write_checkpoint(&path, model.physics(), &state)?;
    if let Some(out) = &cfg.io.output_dir {
        std::fs::create_dir_all(out)?;
        let spec = energy_spectrum(&state.omega);
        write_spectrum_csv(&out.join("spinup_spectrum.csv"), &spec, &vec![0.0; spec.len()])?;
    }
    eprintln!("wrote {} at t={}", path.display(), state.t);
    Ok(())
}

fn run(args: &Common) -> Result<RunStatus> {
    let mut cfg = args.config()?;
    if let Some(name) = &args.preset {
        let kind: StrategyKind = serde_json::from_value(serde_json::Value::String(name.clone()))
            .with_context(|| format!("unknown strategy preset '{name}'"))?;
        strategy_preset(&mut cfg, kind, args.scale)?;
    }
    if cfg.io.output_dir.is_none() {
        cfg.io.output_dir = Some(PathBuf::from("out").join(cfg.strategy.label()));
    }
    let s = run_experiment(&cfg)?;
    println!(
        "{}: {} after {} steps, t={:.3}, err_psi_l2={:.3e}, cpu={:.2}s",
        s.name,
        s.status.name(),
        s.steps,
        s.t_final,
        s.final_error.map_or(f64::NAN, |e| e.err_psi_l2),
        s.cpu_seconds
    );
    Ok(s.status)
}

fn compare(args: &Common) -> Result<()> {
    let cfg = args.config()?;
    let which: Battery = args.preset.as_deref().unwrap_or("equal-count").parse()?;
    let out = cfg.io.output_dir.clone().unwrap_or_else(|| PathBuf::from("out/compare"));
    let runs = run_comparison(&cfg, which, args.scale, &out)?;
    for s in &runs {
        println!("{}\t{}\t{}\t{:.3}", s.name, s.observer_count, s.status.name(), s.t_final);
    }
    println!("index: {}", out.join("index.csv").display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spinup(a) => spinup(a),
        Command::Run(a) => run(a).map(|_| ()),
        Command::Compare(a) => compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
