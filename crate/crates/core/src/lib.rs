//! Continuous data assimilation for the 2D incompressible Navier-Stokes
//! equations on the periodic torus `[-pi, pi)^2`, with observers that move.
//!
//! The reference flow `u` is integrated with a dealiased pseudospectral
//! vorticity/stream-function solver. A second solution `v` is nudged
//! toward it through `mu * I_{h,t}(u - v)`, where the interpolant is built
//! from whatever the current observer set sees.
//!
//! Modules, bottom-up:
//!
//! * [`spectral`]: grid, transforms, Poisson inversion, nonlinear term, norms.
//! * [`integrator`]: integrating-factor Adams-Bashforth stepping.
//! * [`observers`]: observer strategies and the `J` / `I_{h,t}` operators.
//! * [`assimilator`]: forcing, spin-up, the coupled step and error metrics.
//! * [`harness`]: configuration, experiment runs, batteries and output files.

pub mod assimilator;
pub mod error;
pub mod harness;
pub mod integrator;
pub mod observers;
pub mod spectral;

pub use error::{Error, Result};
