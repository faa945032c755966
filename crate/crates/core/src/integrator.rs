//! Integrating-factor Adams-Bashforth time stepping.
//!
//! The viscous term is integrated exactly through `E_k = exp(-nu |k|^2 dt)`;
//! every explicit right-hand side is carried from its own time level to the
//! new one, so `rhs^{n-j}` is damped by `E^{j+1}`:
//!
//! ```text
//! w^{n+1} = E w^n + dt * sum_j c_j E^{j+1} rhs^{n-j}
//! ```
//!
//! with `c = [1]` (Euler), `[3/2, -1/2]` (AB2) or `[23/12, -16/12, 5/12]` (AB3).
//! Steps 0 and 1 bootstrap with Euler and AB2.

use std::collections::VecDeque;

use num_complex::Complex64;

use crate::spectral::{dealias_in_place, Grid, SpectralField};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Euler,
    Ab2,
    Ab3,
}

impl Scheme {
    pub fn coefficients(self) -> &'static [f64] {
        match self {
            Scheme::Euler => &[1.0],
            Scheme::Ab2 => &[1.5, -0.5],
            Scheme::Ab3 => &[23.0 / 12.0, -16.0 / 12.0, 5.0 / 12.0],
        }
    }

    /// Scheme used at a given step index during startup.
    pub fn for_step(step_index: u64) -> Self {
        match step_index {
            0 => Scheme::Euler,
            1 => Scheme::Ab2,
            _ => Scheme::Ab3,
        }
    }
}

/// One integrating-factor multistep update applied mode by mode.
///
/// `rhs[0]` is the newest right-hand side. `decay[i]` is the one-step factor
/// for entry `i`. Works on any slice, so scalar model problems use it as is.
pub fn if_multistep_update(
    scheme: Scheme,
    values: &mut [Complex64],
    decay: &[f64],
    rhs: &[&[Complex64]],
    dt: f64,
) {
    let coeffs = scheme.coefficients();
    assert!(rhs.len() >= coeffs.len(), "{scheme:?} needs {} right-hand sides", coeffs.len());
    assert_eq!(values.len(), decay.len());
    for (i, (w, &e)) in values.iter_mut().zip(decay).enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut damp = e;
        for (c, r) in coeffs.iter().zip(rhs) {
            acc += r[i] * (c * damp);
            damp *= e;
        }
        *w = *w * e + acc * dt;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HistoryEntry {
    pub t: f64,
    pub rhs: SpectralField,
}

/// Vorticity plus up to two past explicit right-hand sides (newest first).
#[derive(Clone, Debug, PartialEq)]
pub struct StepperState {
    pub omega: SpectralField,
    pub history: VecDeque<HistoryEntry>,
    pub t: f64,
    pub step_index: u64,
}

impl StepperState {
    pub fn new(omega: SpectralField, t: f64) -> Self {
        Self { omega, history: VecDeque::with_capacity(2), t, step_index: 0 }
    }

    pub fn grid(&self) -> &Grid {
        self.omega.grid()
    }

    pub fn is_bootstrapped(&self) -> bool {
        self.history.len() >= 2
    }
}

/// Precomputed integrating factors for one `(grid, nu, dt)`.
#[derive(Clone, Debug)]
pub struct Integrator {
    grid: Grid,
    nu: f64,
    dt: f64,
    decay: Vec<f64>,
}

impl Integrator {
    pub fn new(grid: &Grid, nu: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(Error::InvalidParameter(format!("viscosity must be nonnegative, got {nu}")));
        }
        let decay = (0..grid.len()).map(|i| (-nu * grid.k_squared(i) * dt).exp()).collect();
        Ok(Self { grid: grid.clone(), nu, dt, decay })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn decay(&self) -> &[f64] {
        &self.decay
    }

    /// Bootstrap while history is short, AB3 afterwards.
    pub fn step(&self, state: &mut StepperState, rhs_now: SpectralField) -> Result<()> {
        if state.is_bootstrapped() {
            self.if_ab3_step(state, rhs_now)
        } else {
            self.bootstrap_step(state, rhs_now)
        }
    }

    pub fn if_ab3_step(&self, state: &mut StepperState, rhs_now: SpectralField) -> Result<()> {
        if state.history.len() < 2 {
            return Err(Error::MissingHistory { needed: 2, have: state.history.len() });
        }
        self.advance(Scheme::Ab3, state, rhs_now)
    }

    /// IF-Euler at step 0, IF-AB2 at step 1.
    pub fn bootstrap_step(&self, state: &mut StepperState, rhs_now: SpectralField) -> Result<()> {
        let scheme = match state.step_index {
            0 => Scheme::Euler,
            1 => Scheme::Ab2,
            k => return Err(Error::BootstrapComplete(k)),
        };
        if state.history.len() < scheme.coefficients().len() - 1 {
            return Err(Error::MissingHistory {
                needed: scheme.coefficients().len() - 1,
                have: state.history.len(),
            });
        }
        self.advance(scheme, state, rhs_now)
    }

    fn advance(&self, scheme: Scheme, state: &mut StepperState, rhs_now: SpectralField) -> Result<()> {
        self.grid.ensure_same(state.grid())?;
        self.grid.ensure_same(rhs_now.grid())?;
        if !rhs_now.is_finite() || !state.omega.is_finite() {
            return Err(Error::NonFinite("integrator input"));
        }
        {
            let mut rhs: Vec<&[Complex64]> = vec![rhs_now.coeffs()];
            rhs.extend(state.history.iter().map(|h| h.rhs.coeffs()));
            if_multistep_update(scheme, state.omega.coeffs_mut(), &self.decay, &rhs, self.dt);
        }
        dealias_in_place(&mut state.omega);
        state.omega.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
        state.history.push_front(HistoryEntry { t: state.t, rhs: rhs_now });
        state.history.truncate(2);
        state.step_index += 1;
        state.t += self.dt;
        Ok(())
    }
}
