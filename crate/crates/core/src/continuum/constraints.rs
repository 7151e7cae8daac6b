//! Numerical check of the continuum-limit existence conditions for the
//! two-coin, one-twist family `U = (T^-1 S T C_beta S C_alpha)^2`.
//!
//! Every condition is an equality modulo a period; its residual is the
//! distance to the nearest admissible branch with branch integer in
//! `[-BRANCH_WINDOW, BRANCH_WINDOW]`. The sign integer `r` is chosen to
//! minimise the worst residual.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::{Axis, Mat2};
use crate::error::{invalid, Result};
use crate::walk::{
    alpha_coin_family, beta_coin_family, GeneralWalk, Leg, ScaledCoin, TwistRotation, Variant,
    WalkSpec,
};

pub const DEFAULT_TOL: f64 = 1e-9;
const BRANCH_WINDOW: i64 = 4;

/// Two epsilon-scaled coins and a fixed `R_y` twist on both beta legs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GeneralCoinFamily {
    pub alpha: ScaledCoin,
    pub beta: ScaledCoin,
    pub twist: f64,
}

impl GeneralCoinFamily {
    pub fn yy(alpha1: f64, theta: f64) -> Self {
        GeneralCoinFamily {
            alpha: alpha_coin_family(alpha1),
            beta: beta_coin_family(alpha1),
            twist: theta,
        }
    }

    pub fn walk(&self) -> GeneralWalk {
        let t = if self.twist == 0.0 {
            Vec::new()
        } else {
            vec![TwistRotation {
                axis: Axis::Y,
                angle: self.twist,
                scaled: false,
            }]
        };
        GeneralWalk {
            coin_alpha: self.alpha,
            coin_beta: self.beta,
            legs: vec![Leg::Alpha, Leg::Beta(t.clone()), Leg::Alpha, Leg::Beta(t)],
        }
    }

    pub fn spec(&self, epsilon: f64) -> WalkSpec {
        WalkSpec::general(self.walk(), 0.0, epsilon)
    }
}

/// Which value `delta_alpha + delta_beta` takes modulo pi.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaCase {
    /// Multiple of pi: pure Dirac limit, constrained twist, no k^2 term.
    DiracOnly,
    /// pi/2 plus a multiple of pi: Dirac and twist-induced k^2 terms.
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub name: String,
    pub residual: f64,
    /// Integer of the nearest branch, where one applies.
    pub branch: Option<i64>,
    pub passed: bool,
}

/// `H(k) = sum_i (linear_i k + quadratic_i k^2) sigma_i - (mass/2) sigma_z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictedHamiltonian {
    pub linear: [f64; 3],
    pub quadratic: [f64; 3],
    pub mass: f64,
}

impl PredictedHamiltonian {
    pub fn at(&self, k: f64) -> Mat2 {
        let paulis = [Mat2::sigma_x(), Mat2::sigma_y(), Mat2::sigma_z()];
        let mut h = Mat2::sigma_z().scale(C64::new(-self.mass / 2.0, 0.0));
        for (i, s) in paulis.iter().enumerate() {
            let c = self.linear[i] * k + self.quadratic[i] * k * k;
            h = h + s.scale(C64::new(c, 0.0));
        }
        h
    }

    /// `(c1, c2)` when the momentum terms are pure sigma_y.
    pub fn sigma_y_coefficients(&self) -> (f64, f64) {
        (self.linear[1], self.quadratic[1])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub case: DeltaCase,
    /// Sign integer of the `(-1)^r` relations.
    pub r: i64,
    pub checks: Vec<ConstraintCheck>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub satisfied: bool,
    /// Continuum Hamiltonian implied by the family; `None` when not satisfied.
    pub predicted: Option<PredictedHamiltonian>,
}

/// Distance of `x` to `offset + n period`, nearest `n` in the window.
fn branch_residual(x: f64, offset: f64, period: f64) -> (f64, i64) {
    let n = ((x - offset) / period).round().clamp(-BRANCH_WINDOW as f64, BRANCH_WINDOW as f64) as i64;
    ((x - offset - n as f64 * period).abs(), n)
}

fn modular(name: &str, x: f64, offset: f64, period: f64) -> ConstraintCheck {
    let (residual, n) = branch_residual(x, offset, period);
    ConstraintCheck {
        name: name.to_string(),
        residual,
        branch: Some(n),
        passed: false,
    }
}

fn plain(name: &str, residual: f64) -> ConstraintCheck {
    ConstraintCheck {
        name: name.to_string(),
        residual,
        branch: None,
        passed: false,
    }
}

fn either(name: &str, a: ConstraintCheck, b: ConstraintCheck) -> ConstraintCheck {
    let pick = if a.residual <= b.residual { a } else { b };
    ConstraintCheck {
        name: name.to_string(),
        ..pick
    }
}

fn classify(f: &GeneralCoinFamily) -> DeltaCase {
    let m = ((f.alpha.delta + f.beta.delta) / FRAC_PI_2).round() as i64;
    if m.rem_euclid(2) == 0 {
        DeltaCase::DiracOnly
    } else {
        DeltaCase::Mixed
    }
}

fn checks_for(f: &GeneralCoinFamily, case: DeltaCase, r: i64) -> Vec<ConstraintCheck> {
    let (a, b) = (&f.alpha, &f.beta);
    let sign = if r == 0 { 1.0 } else { -1.0 };
    let rp1 = (r + 1) as f64 * PI;
    let dsum = a.delta + b.delta;
    match case {
        DeltaCase::Mixed => vec![
            modular("delta_sum", dsum, FRAC_PI_2, PI),
            either(
                "phi_alpha_or_theta_alpha0",
                modular("", a.phi, 0.0, PI),
                modular("", a.theta0, 0.0, PI),
            ),
            either(
                "phi_alpha_or_theta_half",
                modular("", a.phi, FRAC_PI_2, PI),
                plain("", (b.theta_half - sign * a.theta_half).abs()),
            ),
            modular("theta_beta0", b.theta0 - sign * a.theta0, PI, 2.0 * PI),
            modular("zeta_beta", b.zeta - a.phi, rp1, 2.0 * PI),
            modular("phi_beta", b.phi + a.zeta, rp1, 2.0 * PI),
        ],
        DeltaCase::DiracOnly => vec![
            modular("delta_sum", dsum, 0.0, PI),
            plain("theta_half", (b.theta_half - sign * a.theta_half).abs()),
            modular("theta_beta0", b.theta0 - sign * a.theta0, 0.0, 2.0 * PI),
            modular("zeta_beta", b.zeta + a.phi, rp1, 2.0 * PI),
            modular("phi_beta", b.phi + a.zeta, rp1, 2.0 * PI),
            plain("twist_cos", (f.twist.cos() + a.theta0.cos()).abs()),
            plain("twist_sin", (f.twist.sin() + a.theta0.sin() * a.phi.cos()).abs()),
            plain("twist_axis", (a.theta0.sin() * a.phi.sin()).abs()),
        ],
    }
}

fn predict(f: &GeneralCoinFamily, case: DeltaCase) -> PredictedHamiltonian {
    let a = &f.alpha;
    let (s0, c0) = a.theta0.sin_cos();
    let (sp, cp) = a.phi.sin_cos();
    match case {
        DeltaCase::Mixed => PredictedHamiltonian {
            linear: [0.0, -a.theta_half * c0 * sp, 0.0],
            quadratic: [0.0, -(c0 * f.twist.sin() - f.twist.cos() * s0 * cp), 0.0],
            mass: 0.0,
        },
        DeltaCase::DiracOnly => PredictedHamiltonian {
            linear: [
                a.theta_half * cp * c0,
                -a.theta_half * sp * c0,
                a.theta_half * s0,
            ],
            quadratic: [0.0; 3],
            mass: 0.0,
        },
    }
}

/// Test every existence condition of `family`; never fails, only reports.
pub fn check_constraints(family: &GeneralCoinFamily, tol: f64) -> ConstraintReport {
    let case = classify(family);
    let worst = |cs: &[ConstraintCheck]| cs.iter().map(|c| c.residual).fold(0.0, f64::max);
    let (r, mut checks) = [0, 1]
        .into_iter()
        .map(|r| (r, checks_for(family, case, r)))
        .min_by(|x, y| worst(&x.1).total_cmp(&worst(&y.1)))
        .expect("two candidates");
    for c in &mut checks {
        c.passed = c.residual < tol;
    }
    let max_residual = worst(&checks);
    let satisfied = max_residual < tol && max_residual.is_finite();
    ConstraintReport {
        case,
        r,
        checks,
        max_residual,
        tolerance: tol,
        satisfied,
        predicted: satisfied.then(|| predict(family, case)),
    }
}

/// Constraint report for a walk spec. The XI walk is checked through its
/// zeroth-order coins (the scaled twist reduces to the identity) and its
/// prediction is replaced by the XI Dirac Hamiltonian.
pub fn check_walk(spec: &WalkSpec, tol: f64) -> Result<ConstraintReport> {
    spec.validate()?;
    let (family, xi) = match &spec.variant {
        Variant::Yy => (GeneralCoinFamily::yy(spec.alpha1, spec.theta), false),
        Variant::Xi => {
            if !spec.scale_twist {
                return Err(invalid(
                    "scale_twist",
                    "an unscaled XI twist is outside the checked family",
                ));
            }
            (GeneralCoinFamily::yy(spec.alpha1, 0.0), true)
        }
        Variant::General(w) => (family_of(w)?, false),
    };
    let mut rep = check_constraints(&family, tol);
    if let Some(h) = rep.predicted.as_mut() {
        if xi {
            let beta = 2.0 * spec.alpha1 + spec.theta1 / 2.0;
            *h = PredictedHamiltonian {
                linear: [0.0, -beta, 0.0],
                quadratic: [0.0; 3],
                mass: 0.0,
            };
        }
        h.mass = spec.mass;
    }
    Ok(rep)
}

fn family_of(w: &GeneralWalk) -> Result<GeneralCoinFamily> {
    let unsupported = || {
        invalid(
            "legs",
            "constraint check supports the pattern [alpha, beta(T), alpha, beta(T)] with T an unscaled R_y or none",
        )
    };
    let twist = match w.legs.as_slice() {
        [Leg::Alpha, Leg::Beta(t1), Leg::Alpha, Leg::Beta(t2)] if t1 == t2 => match t1.as_slice() {
            [] => 0.0,
            [TwistRotation { axis: Axis::Y, angle, scaled: false }] => *angle,
            _ => return Err(unsupported()),
        },
        _ => return Err(unsupported()),
    };
    Ok(GeneralCoinFamily {
        alpha: w.coin_alpha,
        beta: w.coin_beta,
        twist,
    })
}
