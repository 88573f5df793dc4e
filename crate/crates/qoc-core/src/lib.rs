//! Optimal control of open quantum systems under Markovian (Lindblad) dynamics.
//!
//! The crate synthesizes piecewise-constant control pulses with Krotov's
//! monotonically convergent method. It covers the full pipeline:
//!
//! - [`quantum`]: density operators, Hamiltonians, Lindblad generators and the
//!   primitive algebra on them (Hilbert-Schmidt products, purity, dissipators).
//! - [`dynamics`]: exact per-step propagation in Liouville space, forward for
//!   states and backward for co-states, with a shared time grid for states and
//!   a midpoint grid for controls.
//! - [`functionals`]: state-to-state and gate fidelity figures of merit,
//!   including the reduced basis-state sets that certify a gate with three or
//!   `d + 1` states instead of `d^2`.
//! - [`krotov`]: the sequential-update optimizer with shape functions,
//!   step-size control and convergence bookkeeping.
//! - [`spectral`]: frequency-domain penalties and filters that confine the
//!   control update to a prescribed band.
//! - [`controllability`]: Lie-algebra rank analysis and basis-state
//!   connectivity for the bilinear control system.
//! - [`models`]: prebuilt generators for the recurring physical settings
//!   (damped/dephasing qubits, lambda systems, anharmonic ladders, coupled
//!   qubit pairs).
//!
//! The crate is `no_std`-compatible (with `alloc`); disable the default `std`
//! feature to use it in such environments. All numerics are hand-rolled dense
//! linear algebra: system dimensions in scope are small (d <= 16), so exact
//! scaling-and-squaring exponentials and Jacobi eigensolves are both simpler
//! and more reproducible than an external LAPACK.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod cmatrix;
pub mod controllability;
pub mod dynamics;
pub mod error;
pub mod expm;
pub mod functionals;
pub mod grid;
pub mod krotov;
mod math;
pub mod models;
pub mod quantum;
pub mod rng;
pub mod spectral;

pub use num_complex;

pub use cmatrix::CMatrix;
pub use error::Error;
pub use grid::{ControlField, TimeGrid};
pub use quantum::{Channel, DensityOperator, LindbladGenerator, OperatorMatrix};

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
