//! Experiment orchestration: configuration, presets, run lifecycle and outputs.

mod compare;
mod config;
mod output;
mod run;

pub use compare::{battery, count_status, run_comparison, Battery, Member};
pub use config::{
    parse_config, GridConfig, IoConfig, NudgingConfig, PhysicsConfig, RunConfig, Scale,
    StrategyConfig, DESK_FORCING_BAND,
};
pub use output::{
    read_errors_csv, write_errors_csv, write_index_csv, write_spectrum_csv, TrajectoryWriter,
};
pub use run::{prepare_reference, run_experiment, run_from_reference, Reference, RunStatus, RunSummary, VERSION_TAG};
