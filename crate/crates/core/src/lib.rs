//! Exact-diagonalization toolkit for the PXP chain.
//!
//! The crate is organised bottom-up:
//!
//! * [`hilbert`]: blockade-constrained bases, symmetry sectors and cut bookkeeping.
//! * [`operators`]: sparse Hamiltonians and diagonal observables on those bases.
//! * [`spectra`]: dense eigendecomposition and the zero-energy shell.
//! * [`scars`]: forward-scattering tower and scar/thermal separation.
//! * [`states`]: named states (Néel product state, interpolations, projected rotations).
//! * [`entanglement`]: reduced density matrices, entropies, MI, TMI and QFI.
//! * [`ergotropy`]: passive energy, ergotropy and the optimal extraction unitary.
//! * [`dynamics`]: eigenbasis and Krylov propagation, quench time series.
//! * [`analytics`]: closed-form transfer-matrix results for rotated states.
//! * [`fits`]: finite-size scaling fits.

pub mod analytics;
pub mod dynamics;
pub mod entanglement;
pub mod ergotropy;
mod error;
pub mod fits;
pub mod hilbert;
pub mod operators;
pub mod scars;
pub mod spectra;
pub mod states;

pub use error::{Error, Result};

/// Complex scalar used for all state amplitudes.
pub type C64 = num_complex::Complex64;
