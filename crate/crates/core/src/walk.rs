//! Walk definitions: the two named variants, a general leg-list walk, the
//! epsilon scaling laws, and compilation to a list of 2x2 substep matrices.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::{coin, rotation, Axis, CoinParams, Mat2};
use crate::error::{invalid, require_finite, Result};

/// Coin angles with a square-root-of-epsilon correction on theta:
/// `theta(eps) = theta0 + sqrt(eps) * theta_half`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScaledCoin {
    pub delta: f64,
    pub theta0: f64,
    pub theta_half: f64,
    pub phi: f64,
    pub zeta: f64,
}

impl ScaledCoin {
    pub fn at(&self, epsilon: f64) -> CoinParams {
        CoinParams::new(
            self.delta,
            self.theta0 + epsilon.sqrt() * self.theta_half,
            self.phi,
            self.zeta,
        )
    }

    pub fn matrix(&self, epsilon: f64) -> Mat2 {
        coin(self.at(epsilon))
    }

    fn angles(&self) -> [f64; 5] {
        [self.delta, self.theta0, self.theta_half, self.phi, self.zeta]
    }
}

/// Coin of the alpha legs of both named walks, as a function of alpha1.
pub fn alpha_coin_family(alpha1: f64) -> ScaledCoin {
    ScaledCoin {
        delta: FRAC_PI_2,
        theta0: -PI,
        theta_half: -2.0 * alpha1,
        phi: FRAC_PI_2,
        zeta: -1.5 * PI,
    }
}

/// Coin of the beta legs of both named walks, as a function of alpha1.
pub fn beta_coin_family(alpha1: f64) -> ScaledCoin {
    ScaledCoin {
        delta: 0.0,
        theta0: -2.0 * PI,
        theta_half: -2.0 * alpha1,
        phi: FRAC_PI_2,
        zeta: -FRAC_PI_2,
    }
}

/// `C_alpha = sigma_y R_x(-2 alpha)`.
pub fn coin_alpha(alpha: f64) -> Mat2 {
    coin(CoinParams::new(FRAC_PI_2, -PI - 2.0 * alpha, FRAC_PI_2, -1.5 * PI))
}

/// `C_beta = -R_x(-2 alpha)`.
pub fn coin_beta(alpha: f64) -> Mat2 {
    coin(CoinParams::new(0.0, -2.0 * PI - 2.0 * alpha, FRAC_PI_2, -FRAC_PI_2))
}

/// One factor of a twist; `scaled` multiplies the angle by sqrt(eps).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistRotation {
    pub axis: Axis,
    pub angle: f64,
    #[serde(default)]
    pub scaled: bool,
}

/// A substep. `Alpha` is `S C_alpha`; `Beta` is `T^-1 S T C_beta` with `T`
/// the ordered product of the listed rotations (empty list: plain shift).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Leg {
    Alpha,
    Beta(Vec<TwistRotation>),
}

/// Arbitrary pattern of alpha/beta legs with epsilon-scaled coins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralWalk {
    pub coin_alpha: ScaledCoin,
    pub coin_beta: ScaledCoin,
    pub legs: Vec<Leg>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Homogeneous twist `R_y(theta)` on both beta legs, two `G` per step.
    Yy,
    /// Alternating twist `R_x(sqrt(eps) theta1)` then identity.
    Xi,
    General(GeneralWalk),
}

fn default_true() -> bool {
    true
}

/// Full description of one walk.
///
/// `alpha1` is the coin coefficient with `alpha = sqrt(eps) alpha1`; at
/// `epsilon = 1` it is the bare coin angle. `theta` is the YY twist angle,
/// held fixed as eps varies. `theta1` is the XI twist coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkSpec {
    pub variant: Variant,
    #[serde(default)]
    pub alpha1: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub theta1: f64,
    #[serde(default)]
    pub mass: f64,
    pub epsilon: f64,
    /// XI only: scale the twist with sqrt(eps). Turning this off breaks the
    /// continuum limit and exists to demonstrate exactly that.
    #[serde(default = "default_true")]
    pub scale_twist: bool,
}

impl WalkSpec {
    pub fn yy(alpha1: f64, theta: f64, mass: f64, epsilon: f64) -> Self {
        WalkSpec {
            variant: Variant::Yy,
            alpha1,
            theta,
            theta1: 0.0,
            mass,
            epsilon,
            scale_twist: true,
        }
    }

    pub fn xi(alpha1: f64, theta1: f64, mass: f64, epsilon: f64) -> Self {
        WalkSpec {
            variant: Variant::Xi,
            alpha1,
            theta: 0.0,
            theta1,
            mass,
            epsilon,
            scale_twist: true,
        }
    }

    pub fn general(walk: GeneralWalk, mass: f64, epsilon: f64) -> Self {
        WalkSpec {
            variant: Variant::General(walk),
            alpha1: 0.0,
            theta: 0.0,
            theta1: 0.0,
            mass,
            epsilon,
            scale_twist: true,
        }
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        WalkSpec {
            epsilon,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_finite("epsilon", self.epsilon)?;
        if self.epsilon <= 0.0 {
            return Err(invalid("epsilon", format!("must be > 0, got {}", self.epsilon)));
        }
        require_finite("alpha1", self.alpha1)?;
        require_finite("theta", self.theta)?;
        require_finite("theta1", self.theta1)?;
        require_finite("mass", self.mass)?;
        if let Variant::General(w) = &self.variant {
            if w.legs.is_empty() {
                return Err(invalid("legs", "general walk needs at least one leg"));
            }
            let coins = w.coin_alpha.angles().into_iter().chain(w.coin_beta.angles());
            let twists = w.legs.iter().flat_map(|l| match l {
                Leg::Alpha => Vec::new(),
                Leg::Beta(t) => t.iter().map(|r| r.angle).collect(),
            });
            if !coins.chain(twists).all(f64::is_finite) {
                return Err(invalid("general", "all angles must be finite"));
            }
        }
        Ok(())
    }

    pub fn scaling(&self) -> ScalingLaw {
        ScalingLaw::new(self)
    }

    /// Substep matrices at this spec's epsilon.
    pub fn plan(&self) -> Result<StepPlan> {
        self.validate()?;
        let law = self.scaling();
        let (ca, cb, legs) = match &self.variant {
            Variant::Yy => {
                let t = rotation(Axis::Y, self.theta);
                let twisted = Some(t);
                (
                    coin_alpha(law.alpha),
                    coin_beta(law.alpha),
                    vec![None, twisted, None, twisted],
                )
            }
            Variant::Xi => {
                let t1 = rotation(Axis::X, law.twist);
                (
                    coin_alpha(law.alpha),
                    coin_beta(law.alpha),
                    vec![None, Some(t1), None, Some(Mat2::identity())],
                )
            }
            Variant::General(w) => {
                let legs = w
                    .legs
                    .iter()
                    .map(|l| match l {
                        Leg::Alpha => None,
                        Leg::Beta(rots) => Some(twist_matrix(rots, self.epsilon)),
                    })
                    .collect();
                (w.coin_alpha.matrix(self.epsilon), w.coin_beta.matrix(self.epsilon), legs)
            }
        };
        let legs = legs
            .into_iter()
            .map(|t| match t {
                None => PlanLeg { coin: ca, twist: None },
                Some(t) => PlanLeg { coin: cb, twist: Some(t) },
            })
            .collect();
        Ok(StepPlan {
            legs,
            mass_phase: law.mu,
        })
    }
}

pub fn twist_matrix(rots: &[TwistRotation], epsilon: f64) -> Mat2 {
    rots.iter().fold(Mat2::identity(), |acc, r| {
        let angle = if r.scaled { epsilon.sqrt() * r.angle } else { r.angle };
        acc * rotation(r.axis, angle)
    })
}

/// Lattice quantities implied by epsilon.
///
/// One full walk step advances continuum time by `2 eps`: the step operator
/// approximates `exp(-2 i eps H_c)`, matching `lambda_eff = arccos(d0) / (2 dt)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingLaw {
    pub epsilon: f64,
    pub dt: f64,
    pub dx: f64,
    pub alpha: f64,
    pub mu: f64,
    /// Twist angle actually used at this epsilon (YY: theta, XI: sqrt(eps) theta1).
    pub twist: f64,
}

impl ScalingLaw {
    pub fn new(spec: &WalkSpec) -> Self {
        let e = spec.epsilon;
        let twist = match spec.variant {
            Variant::Yy => spec.theta,
            Variant::Xi if spec.scale_twist => e.sqrt() * spec.theta1,
            Variant::Xi => spec.theta1,
            Variant::General(_) => 0.0,
        };
        ScalingLaw {
            epsilon: e,
            dt: e,
            dx: e.sqrt(),
            alpha: e.sqrt() * spec.alpha1,
            mu: spec.mass * e,
            twist,
        }
    }

    /// Continuum time elapsed per walk step.
    pub fn time_per_step(&self) -> f64 {
        2.0 * self.dt
    }

    /// Lattice quasi-momentum for a physical wavenumber.
    pub fn lattice_k(&self, k_phys: f64) -> f64 {
        self.dx * k_phys
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanLeg {
    pub coin: Mat2,
    /// `None` means a plain shift; `Some(T)` means `T^-1 S T`.
    pub twist: Option<Mat2>,
}

/// A walk step compiled to matrices: legs in application order, then `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepPlan {
    pub legs: Vec<PlanLeg>,
    pub mass_phase: f64,
}

impl StepPlan {
    pub fn mass_matrix(&self) -> Mat2 {
        Mat2::diag(
            C64::from_polar(1.0, self.mass_phase),
            C64::from_polar(1.0, -self.mass_phase),
        )
    }

    /// Bloch form of one step for the plane wave `e^{i k l}`: the shift acts
    /// as `diag(e^{ik}, e^{-ik})`.
    pub fn bloch(&self, k: f64) -> Mat2 {
        let s = Mat2::diag(C64::from_polar(1.0, k), C64::from_polar(1.0, -k));
        let mut u = Mat2::identity();
        for leg in &self.legs {
            let w = match leg.twist {
                None => s * leg.coin,
                Some(t) => t.adjoint() * s * t * leg.coin,
            };
            u = w * u;
        }
        self.mass_matrix() * u
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coin_families_reproduce_named_coins() {
        let a1 = 0.8;
        let e: f64 = 0.04;
        let a = e.sqrt() * a1;
        assert!(alpha_coin_family(a1).matrix(e).max_abs_diff(&coin_alpha(a)) < 1e-14);
        assert!(beta_coin_family(a1).matrix(e).max_abs_diff(&coin_beta(a)) < 1e-14);
    }

    #[test]
    fn scaling_law_values() {
        let s = WalkSpec::xi(2.0, 3.0, 5.0, 0.01).scaling();
        assert!((s.dx - 0.1).abs() < 1e-15);
        assert!((s.alpha - 0.2).abs() < 1e-15);
        assert!((s.mu - 0.05).abs() < 1e-15);
        assert!((s.twist - 0.3).abs() < 1e-15);
        assert!((s.time_per_step() - 0.02).abs() < 1e-15);
        let y = WalkSpec::yy(1.0, 0.7, 0.0, 0.01).scaling();
        assert_eq!(y.twist, 0.7);
    }

    #[test]
    fn rejects_bad_epsilon() {
        assert!(WalkSpec::yy(1.0, 0.0, 0.0, 0.0).plan().is_err());
        assert!(WalkSpec::yy(1.0, 0.0, 0.0, f64::NAN).plan().is_err());
    }

    #[test]
    fn general_walk_reproduces_yy() {
        let (a1, th, e) = (0.9, 0.6, 0.02);
        let twist = vec![TwistRotation { axis: Axis::Y, angle: th, scaled: false }];
        let g = GeneralWalk {
            coin_alpha: alpha_coin_family(a1),
            coin_beta: beta_coin_family(a1),
            legs: vec![Leg::Alpha, Leg::Beta(twist.clone()), Leg::Alpha, Leg::Beta(twist)],
        };
        let yy = WalkSpec::yy(a1, th, 0.3, e).plan().unwrap();
        let gen = WalkSpec::general(g, 0.3, e).plan().unwrap();
        for k in [-1.2, 0.0, 0.4] {
            assert!(yy.bloch(k).max_abs_diff(&gen.bloch(k)) < 1e-13);
        }
    }

    #[test]
    fn spec_roundtrips_through_json() {
        let s = WalkSpec::xi(0.3, 1.0, 0.0, 0.01);
        let txt = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<WalkSpec>(&txt).unwrap(), s);
    }
}
