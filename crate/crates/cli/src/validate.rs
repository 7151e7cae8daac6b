use std::fmt;

use serde::Serialize;
use tqw_core::observables::BlochAngles;
use tqw_core::{TqwError, Variant};

use crate::config::{ExperimentConfig, Kind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// A block the experiment needs is missing or contradictory.
    Schema,
    /// A value outside what the numerics accept.
    Physics,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub level: Level,
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    fn new(level: Level, field: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            level,
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn is_schema(&self) -> bool {
        self.level == Level::Schema
    }

    pub fn is_error(&self) -> bool {
        self.level != Level::Warning
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.level {
            Level::Schema => "error (schema)",
            Level::Physics => "error",
            Level::Warning => "warning",
        };
        write!(f, "{tag} [{}]: {}", self.field, self.message)
    }
}

struct Collector(Vec<Diagnostic>);

impl Collector {
    fn schema(&mut self, field: &str, msg: impl Into<String>) {
        self.0.push(Diagnostic::new(Level::Schema, field, msg));
    }

    fn physics(&mut self, field: &str, msg: impl Into<String>) {
        self.0.push(Diagnostic::new(Level::Physics, field, msg));
    }

    fn warn(&mut self, field: &str, msg: impl Into<String>) {
        self.0.push(Diagnostic::new(Level::Warning, field, msg));
    }

    fn positive(&mut self, field: &str, v: f64) {
        if !(v.is_finite() && v > 0.0) {
            self.physics(field, format!("must be positive and finite, got {v}"));
        }
    }

    fn finite(&mut self, field: &str, v: f64) {
        if !v.is_finite() {
            self.physics(field, format!("must be finite, got {v}"));
        }
    }
}

/// Every problem that would stop `run`, plus warnings. No error-level
/// entries means the run will start.
pub fn validate(cfg: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut c = Collector(Vec::new());
    let w = &cfg.walk;
    c.positive("walk.epsilon", w.epsilon);
    for (f, v) in [("walk.alpha1", w.alpha1), ("walk.theta", w.theta), ("walk.theta1", w.theta1), ("walk.mass", w.mass)] {
        c.finite(f, v);
    }
    if let Variant::General(g) = &w.variant {
        if g.legs.is_empty() {
            c.physics("walk.variant.general.legs", "needs at least one leg");
        }
    }
    if matches!(w.variant, Variant::Xi) && !w.scale_twist {
        let msg = "the XI twist must scale as sqrt(epsilon) for a continuum limit to exist; this walk has none";
        if cfg.kind == Kind::Converge {
            c.physics("walk.scale_twist", msg);
        } else {
            c.warn("walk.scale_twist", msg);
        }
    }
    if cfg.kind == Kind::Converge && matches!(w.variant, Variant::General(_)) {
        c.warn("walk.variant", "general walks converge only if they satisfy the constraints and reduce to a sigma_y model");
    }

    let needs_initial = matches!(cfg.kind, Kind::Simulate | Kind::Converge | Kind::EntropyScan);
    match &cfg.initial {
        None if needs_initial => c.schema("initial", format!("required for {}", cfg.kind.name())),
        None => {}
        Some(init) => {
            c.finite("initial.mu_x", init.mu_x);
            c.positive("initial.sigma2", init.sigma2);
            match (&init.bloch, &init.spinor) {
                (Some(_), Some(_)) => c.schema("initial", "give either bloch or spinor, not both"),
                (None, None) if cfg.kind != Kind::EntropyScan && needs_initial => {
                    c.schema("initial", "needs bloch or spinor")
                }
                (Some(b), None) => {
                    if let Err(TqwError::InvalidParameter { name, reason }) = BlochAngles::new(b.theta_b, b.phi_b) {
                        c.physics(&format!("initial.bloch.{name}"), reason);
                    }
                }
                (None, Some(s)) => {
                    let n: f64 = s.iter().flatten().map(|v| v * v).sum();
                    if !(n.is_finite() && n > 0.0) {
                        c.physics("initial.spinor", "must be nonzero and finite");
                    }
                }
                (None, None) => {}
            }
            if cfg.kind == Kind::EntropyScan && (init.bloch.is_some() || init.spinor.is_some()) {
                c.warn("initial", "entropy-scan sweeps the spinor; the one given is ignored");
            }
        }
    }

    match cfg.kind {
        Kind::Simulate => {
            let l = &cfg.lattice;
            if let Some(n) = l.n_sites {
                if n == 0 || !n.is_multiple_of(2) {
                    c.physics("lattice.n_sites", format!("must be positive and even, got {n}"));
                }
            }
            if l.stride == 0 {
                c.physics("lattice.stride", "must be at least 1");
            }
        }
        Kind::Spectrum => {
            if cfg.spectrum.k_points < 2 {
                c.physics("spectrum.k_points", "need at least 2 points");
            }
            c.positive("spectrum.zero_tol", cfg.spectrum.zero_tol);
        }
        Kind::Constraints => {
            let k = &cfg.constraints;
            c.positive("constraints.tolerance", k.tolerance);
            if k.epsilons.len() < 2 {
                c.physics("constraints.epsilons", "need at least two values");
            }
            if k.epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
                c.physics("constraints.epsilons", "values must be positive and finite");
            }
            if k.epsilons.windows(2).any(|p| p[1].partial_cmp(&p[0]) != Some(std::cmp::Ordering::Less)) {
                c.physics("constraints.epsilons", "must be strictly decreasing");
            }
            match &k.k_values {
                Some(v) if v.is_empty() => c.physics("constraints.k_values", "must not be empty"),
                Some(v) if v.iter().any(|x| !x.is_finite()) => c.physics("constraints.k_values", "must be finite"),
                Some(_) => {}
                None => {
                    if k.random_k == 0 {
                        c.physics("constraints.random_k", "must be at least 1 when k_values is absent");
                    }
                    c.positive("constraints.k_range", k.k_range);
                }
            }
        }
        Kind::Converge => {
            let v = &cfg.convergence;
            if v.epsilons.is_empty() || v.epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
                c.physics("convergence.epsilons", "need at least one positive, finite value");
            }
            if !(v.t_final.is_finite() && v.t_final >= 0.0) {
                c.physics("convergence.t_final", format!("must be >= 0, got {}", v.t_final));
            }
        }
        Kind::EntropyScan => {
            let s = &cfg.entropy_scan;
            match s.random_points {
                Some(0) => c.physics("entropy_scan.random_points", "must be at least 1"),
                None if s.resolution == 0 => c.physics("entropy_scan.resolution", "must be at least 1"),
                _ => {}
            }
            if s.steps < 9 {
                c.physics("entropy_scan.steps", "need at least 9 steps for the diagnostics");
            }
        }
    }
    c.0
}
