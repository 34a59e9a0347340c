//! Spectral machinery for the damped wave equation `u_tt − Δ_H u + u_t = 0`
//! on the Heisenberg group `H_n`.
//!
//! Each Fourier mode `(λ, k)` of the solution obeys a scalar damped oscillator
//! with frequency `z = μ_k|λ|`, `μ_k = 2|k| + n`. The crate provides the
//! closed-form propagator for that oscillator, an independent ODE reference,
//! a numerical group Fourier transform on `H_1`, truncated Plancherel norms
//! and a driver for measuring decay rates.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decay;
pub mod error;
pub mod fourier;
pub mod group;
pub mod hermite;
pub mod oracle;
pub mod plancherel;
pub mod propagator;
pub mod quadrature;

pub use error::{Error, Result};
pub use group::GroupParams;
pub use hermite::{GradedBasis, MultiIndex};
pub use plancherel::{CoefficientField, FrequencyGrid};
pub use propagator::{evolve_mode, ModeParams, ModeState};
