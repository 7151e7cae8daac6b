//! Twisted quantum walk simulator.
//!
//! A two-component walker on a periodic 1D lattice, stepped by products of
//! coins, coin-conditioned shifts and twisted shifts `T^-1 S T`. The crate
//! covers exact lattice evolution, Bloch spectra, the epsilon to 0 continuum
//! limit and wavepacket observables.

pub mod algebra;
pub mod continuum;
pub mod error;
pub mod exec;
pub mod lattice;
pub mod momentum;
pub mod observables;
pub mod walk;

pub use algebra::{coin, pauli_decompose, rotation, Axis, CoinParams, Mat2, PauliCoeffs};
pub use error::{Result, TqwError};
pub use exec::Execution;
pub use lattice::{evolve, evolve_with, gaussian_init, SpinorField, Stepper};
pub use walk::{ScalingLaw, Variant, WalkSpec};

pub use num_complex::Complex64;
