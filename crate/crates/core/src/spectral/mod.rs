//! Fourier grid and pseudospectral kernels.
//!
//! Conventions: `omega = d_x u2 - d_y u1`, `u = (-d_y psi, d_x psi)`, hence
//! `omega = laplacian(psi)`. Mean modes of `omega`, `psi` and the forcing are
//! held at zero. The Nyquist row and column are always zero.

mod fft;
mod field;
mod grid;
mod ops;

pub use fft::{to_physical, to_spectral};
pub use field::{PhysicalField, SpectralField};
pub use grid::Grid;
pub(crate) use ops::{advection, streamfunction_unchecked};
pub use ops::{
    curl, dealias, dealias_in_place, energy_spectrum, inner_product, l2_norm, linf_norm,
    nonlinear_rhs, streamfunction, velocity, Norms, MEAN_TOLERANCE,
};

/// Build the grid for `n` modes per dimension.
pub fn make_grid(n: usize) -> crate::Result<Grid> {
    Grid::new(n)
}
