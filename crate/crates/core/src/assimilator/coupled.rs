use serde::Serialize;

use super::model::{Model, Velocity};
use super::timing::CpuStopwatch;
use crate::integrator::StepperState;
use crate::observers::ObserverSet;
use crate::spectral::{curl, l2_norm, linf_norm, streamfunction_unchecked, to_physical, PhysicalField, SpectralField};
use crate::{Error, Result};

/// Ratio `||omega_v|| / ||omega_u||` treated as blow-up.
pub const DIVERGENCE_RATIO: f64 = 1e6;

/// Reference solve, nudged solve and the observers tying them together.
#[derive(Clone, Debug)]
pub struct CoupledState {
    pub reference: StepperState,
    pub assimilated: StepperState,
    pub observers: ObserverSet,
    pub mu: f64,
    /// CPU seconds spent in [`advance_coupled`], observer updates included.
    pub cpu_seconds: f64,
}

impl CoupledState {
    /// Nudged solve started from zero vorticity at the reference time.
    pub fn new(reference: StepperState, observers: ObserverSet, mu: f64) -> Result<Self> {
        let v0 = StepperState::new(SpectralField::zeros(reference.grid()), reference.t);
        Self::with_initial(reference, v0, observers, mu)
    }

    pub fn with_initial(
        reference: StepperState,
        assimilated: StepperState,
        observers: ObserverSet,
        mu: f64,
    ) -> Result<Self> {
        reference.grid().ensure_same(assimilated.grid())?;
        reference.grid().ensure_same(observers.grid())?;
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!("mu must be nonnegative, got {mu}")));
        }
        if reference.t.to_bits() != assimilated.t.to_bits() {
            return Err(Error::InvalidParameter(format!(
                "reference and nudged clocks differ: {} vs {}",
                reference.t, assimilated.t
            )));
        }
        Ok(Self { reference, assimilated, observers, mu, cpu_seconds: 0.0 })
    }

    pub fn t(&self) -> f64 {
        self.reference.t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Stable,
    Diverged,
}

/// `curl(mu * I(u - v))` in spectral space, dealiased with zero mean.
pub fn nudging_term(
    u: (&PhysicalField, &PhysicalField),
    v: (&PhysicalField, &PhysicalField),
    observers: &mut ObserverSet,
    mu: f64,
) -> Result<SpectralField> {
    let d1 = u.0.sub(v.0)?;
    let d2 = u.1.sub(v.1)?;
    let (g1, g2) = observers.interpolate_pair(&d1, &d2)?;
    curl(&g1.scaled(mu), &g2.scaled(mu))
}

/// One coupled step.
///
/// Both fields use their pre-step velocities and the observers at their
/// pre-step positions; the nudging increment `dt * curl(mu I(u - v))` is added
/// to the nudged vorticity after its IF-AB3 update, then the observers move.
pub fn advance_coupled(model: &Model, state: &mut CoupledState) -> Result<StepOutcome> {
    let clock = CpuStopwatch::start();
    let outcome = advance_inner(model, state);
    state.cpu_seconds += clock.elapsed_secs();
    outcome
}

fn advance_inner(model: &Model, state: &mut CoupledState) -> Result<StepOutcome> {
    let dt = model.dt();
    let (rhs_u, vel_u): (SpectralField, Velocity) = model.rhs(&state.reference.omega)?;
    let (rhs_v, vel_v) = model.rhs(&state.assimilated.omega)?;
    let nudge = nudging_term((&vel_u.0, &vel_u.1), (&vel_v.0, &vel_v.1), &mut state.observers, state.mu)?;

    model.integrator().step(&mut state.reference, rhs_u)?;
    if !state.reference.omega.is_finite() {
        return Err(Error::NonFinite("reference solution"));
    }
    if !rhs_v.is_finite() || !nudge.is_finite() {
        return Ok(StepOutcome::Diverged);
    }
    model.integrator().step(&mut state.assimilated, rhs_v)?;
    state.assimilated.omega.axpy(dt, &nudge)?;
    state.observers.advance(dt, Some((&vel_u.0, &vel_u.1)))?;

    let nv = l2_norm(&state.assimilated.omega);
    let nu = l2_norm(&state.reference.omega);
    if !nv.is_finite() || !state.assimilated.omega.is_finite() || nv > DIVERGENCE_RATIO * nu.max(f64::MIN_POSITIVE) {
        return Ok(StepOutcome::Diverged);
    }
    Ok(StepOutcome::Stable)
}

/// Errors at one sampling instant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub t: f64,
    pub cpu_seconds: f64,
    pub err_psi_l2: f64,
    pub err_omega_l2: f64,
    pub err_omega_linf: f64,
}

/// Norms of the reference solution at one sampling instant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReferenceNorms {
    pub t: f64,
    pub psi_l2: f64,
    pub omega_l2: f64,
    pub omega_linf: f64,
}

impl ReferenceNorms {
    pub fn of(state: &StepperState) -> Self {
        Self {
            t: state.t,
            psi_l2: l2_norm(&streamfunction_unchecked(&state.omega)),
            omega_l2: l2_norm(&state.omega),
            omega_linf: linf_norm(&to_physical(&state.omega)),
        }
    }
}

pub fn error_metrics(state: &CoupledState) -> Result<ErrorRecord> {
    let diff = state.reference.omega.sub(&state.assimilated.omega)?;
    Ok(difference_metrics(state.t(), state.cpu_seconds, &diff))
}

/// Metrics of an arbitrary vorticity difference.
pub fn difference_metrics(t: f64, cpu_seconds: f64, diff: &SpectralField) -> ErrorRecord {
    ErrorRecord {
        t,
        cpu_seconds,
        err_psi_l2: l2_norm(&streamfunction_unchecked(diff)),
        err_omega_l2: l2_norm(diff),
        err_omega_linf: linf_norm(&to_physical(diff)),
    }
}
