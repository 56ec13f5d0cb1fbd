//! Quantum and Bohmian dissipation of a harmonic oscillator coupled
//! bilinearly to a discretized ohmic bath.
//!
//! * [`bath`]: discretization, memory kernels, effective frequency
//! * [`modes`]: pairwise normal-mode decoupling and the ground state
//! * [`potentials`]: classical and quantum potentials, Bohmian force
//! * [`dynamics`]: full Hamiltonian, GLE and closed-form damped solutions
//! * [`analysis`]: damped-sine fits, trajectory comparison, regimes
//! * [`io`]: CSV writers and readers

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bath;
pub mod dynamics;
pub mod io;
pub mod modes;
pub mod potentials;
pub mod rng;
pub mod stats;

use thiserror::Error;

/// Union of all module errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Bath(#[from] bath::BathError),
    #[error(transparent)]
    Modes(#[from] modes::ModesError),
    #[error(transparent)]
    Potentials(#[from] potentials::PotentialsError),
    #[error(transparent)]
    Dynamics(#[from] dynamics::DynamicsError),
    #[error(transparent)]
    Fit(#[from] analysis::FitError),
    #[error(transparent)]
    Io(#[from] io::IoError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
