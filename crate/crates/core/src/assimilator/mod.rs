//! Coupled reference and nudged evolution.
//!
//! The reference vorticity `omega` evolves under the forced Navier-Stokes
//! equations; the nudged vorticity follows the same equations plus the curl
//! of `mu I_{h,t}(u - v)`, where `I_{h,t}` interpolates velocity observations
//! from the current observer set.

mod checkpoint;
mod coupled;
mod forcing;
mod model;
mod timing;

pub use checkpoint::{read_checkpoint, read_checkpoint_header, write_checkpoint, CheckpointHeader};
pub use coupled::{
    advance_coupled, difference_metrics, error_metrics, nudging_term, CoupledState, ErrorRecord,
    ReferenceNorms, StepOutcome, DIVERGENCE_RATIO,
};
pub use forcing::{build_forcing, build_forcing_in_band, velocity_level_norm, DEFAULT_FORCING_BAND};
pub use model::{continue_reference, spin_up, spin_up_with, Model, Physics, Velocity};
pub use timing::{thread_cpu_time, CpuStopwatch};
