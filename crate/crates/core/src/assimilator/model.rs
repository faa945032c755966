use serde::{Deserialize, Serialize};

use super::forcing::{build_forcing_in_band, DEFAULT_FORCING_BAND};
use crate::integrator::{Integrator, StepperState};
use crate::spectral::{advection, Grid, PhysicalField, SpectralField};
use crate::{Error, Result};

/// Physical and numerical parameters shared by the reference and nudged solves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Physics {
    pub nu: f64,
    pub grashof: f64,
    pub dt: f64,
    pub forcing_seed: u64,
    pub forcing_band: (f64, f64),
}

impl Physics {
    pub fn new(nu: f64, grashof: f64, dt: f64, forcing_seed: u64) -> Self {
        Self { nu, grashof, dt, forcing_seed, forcing_band: DEFAULT_FORCING_BAND }
    }
}

/// Forced Navier-Stokes solver: integrator plus the fixed forcing.
#[derive(Clone, Debug)]
pub struct Model {
    physics: Physics,
    integrator: Integrator,
    forcing: SpectralField,
}

/// Velocity of the pre-step field, returned so callers can reuse it.
pub type Velocity = (PhysicalField, PhysicalField);

impl Model {
    pub fn new(grid: &Grid, physics: Physics) -> Result<Self> {
        let forcing = build_forcing_in_band(
            grid,
            physics.grashof,
            physics.nu,
            physics.forcing_seed,
            physics.forcing_band,
        )?;
        Self::with_forcing(physics, forcing)
    }

    /// Model with an explicitly supplied forcing field.
    pub fn with_forcing(physics: Physics, forcing: SpectralField) -> Result<Self> {
        let integrator = Integrator::new(forcing.grid(), physics.nu, physics.dt)?;
        Ok(Self { physics, integrator, forcing })
    }

    pub fn grid(&self) -> &Grid {
        self.forcing.grid()
    }

    pub fn physics(&self) -> &Physics {
        &self.physics
    }

    pub fn dt(&self) -> f64 {
        self.physics.dt
    }

    pub fn forcing(&self) -> &SpectralField {
        &self.forcing
    }

    pub fn integrator(&self) -> &Integrator {
        &self.integrator
    }

    /// Explicit right-hand side `-(u . grad omega) + f` and the velocity of `omega`.
    pub fn rhs(&self, omega: &SpectralField) -> Result<(SpectralField, Velocity)> {
        let adv = advection(omega);
        let rhs = adv.rhs.add(&self.forcing)?;
        Ok((rhs, adv.velocity))
    }

    /// One unnudged step. Returns the velocity at the start of the step.
    pub fn step(&self, state: &mut StepperState) -> Result<Velocity> {
        let (rhs, vel) = self.rhs(&state.omega)?;
        self.integrator.step(state, rhs)?;
        Ok(vel)
    }

    /// Number of steps needed to cover `duration`.
    pub fn steps_for(&self, duration: f64) -> u64 {
        (duration / self.physics.dt).round().max(0.0) as u64
    }
}

/// Evolve zero vorticity under the forcing for `t_spin`.
pub fn spin_up(model: &Model, t_spin: f64) -> Result<StepperState> {
    spin_up_with(model, t_spin, |_| {})
}

/// [`spin_up`] calling `observe` after every step.
pub fn spin_up_with(
    model: &Model,
    t_spin: f64,
    mut observe: impl FnMut(&StepperState),
) -> Result<StepperState> {
    if !(t_spin >= 0.0 && t_spin.is_finite()) {
        return Err(Error::InvalidParameter(format!("spin-up time must be nonnegative, got {t_spin}")));
    }
    let mut state = StepperState::new(SpectralField::zeros(model.grid()), 0.0);
    continue_reference(model, &mut state, model.steps_for(t_spin), &mut observe)?;
    Ok(state)
}

/// Advance a reference state by `steps` unnudged steps.
pub fn continue_reference(
    model: &Model,
    state: &mut StepperState,
    steps: u64,
    mut observe: impl FnMut(&StepperState),
) -> Result<()> {
    for _ in 0..steps {
        match model.step(state) {
            Err(Error::NonFinite(_)) => return Err(Error::NonFinite("spin-up blew up; the parameters are under-resolved")),
            r => {
                r?;
            }
        }
        if !state.omega.is_finite() {
            return Err(Error::NonFinite("spin-up blew up; the parameters are under-resolved"));
        }
        observe(state);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_spin_up_is_zero() {
        let g = Grid::new(64).unwrap();
        let mut phys = Physics::new(1e-2, 100.0, 0.01, 1);
        phys.forcing_band = (4.0, 6.0);
        let m = Model::new(&g, phys).unwrap();
        let st = spin_up(&m, 0.0).unwrap();
        assert!(st.omega.coeffs().iter().all(|c| c.norm() == 0.0));
        assert_eq!(st.step_index, 0);
        assert!(spin_up(&m, -1.0).is_err());
    }

    #[test]
    fn short_spin_up_gains_energy() {
        let g = Grid::new(64).unwrap();
        let mut phys = Physics::new(1e-2, 100.0, 0.01, 1);
        phys.forcing_band = (4.0, 6.0);
        let m = Model::new(&g, phys).unwrap();
        let mut count = 0;
        let st = spin_up_with(&m, 0.5, |_| count += 1).unwrap();
        assert_eq!(count, 50);
        assert_eq!(st.step_index, 50);
        assert!((st.t - 0.5).abs() < 1e-12);
        assert!(st.omega.max_abs() > 0.0);
    }

    #[test]
    fn blow_up_is_reported() {
        let g = Grid::new(16).unwrap();
        let mut phys = Physics::new(1e-4, 1e10, 1.0, 1);
        phys.forcing_band = (1.0, 4.0);
        let m = Model::new(&g, phys).unwrap();
        assert!(matches!(spin_up(&m, 400.0), Err(Error::NonFinite(_))));
    }
}
