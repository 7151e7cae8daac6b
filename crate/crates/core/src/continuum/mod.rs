//! Continuous limit: scaling, continuum Hamiltonians, existence constraints,
//! epsilon-sequence residual checks and discrete-vs-continuum convergence.

mod constraints;
mod convergence;
mod limit;
mod model;

pub use crate::walk::ScalingLaw;
pub use constraints::{
    check_constraints, check_walk, ConstraintCheck, ConstraintReport, DeltaCase, GeneralCoinFamily,
    PredictedHamiltonian, DEFAULT_TOL,
};
pub use convergence::{convergence_study, ConvergenceRow, ConvergenceTable, InitialState};
pub use limit::{
    fit_loglog_slope, numeric_limit_check, numeric_limit_check_family, numeric_limit_check_with,
    LimitReport,
};
pub use model::{continuum_spectrum, evolve_continuum, ContinuumModel};
