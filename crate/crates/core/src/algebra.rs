//! 2x2 complex matrices, Pauli matrices, axis rotations and the general coin.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Dense 2x2 complex matrix, row-major `[[a, b], [c, d]]`.
///
/// Every coin, twist, shift-at-fixed-k and full step operator is one of these.
/// Nothing forces unitarity at the type level; use [`Mat2::unitarity_defect`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub const fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn zero() -> Self {
        Mat2::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn sigma_x() -> Self {
        Mat2::new(ZERO, ONE, ONE, ZERO)
    }

    pub const fn sigma_y() -> Self {
        Mat2::new(ZERO, C64::new(0.0, -1.0), I, ZERO)
    }

    pub const fn sigma_z() -> Self {
        Mat2::new(ONE, ZERO, ZERO, C64::new(-1.0, 0.0))
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Mat2::new(a, ZERO, ZERO, d)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[r][c]
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Mat2::new(s * m[0][0], s * m[0][1], s * m[1][0], s * m[1][1])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Matrix-vector product on a single spinor.
    #[inline]
    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let d = *self - *other;
        d.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm of `M^dag M - I`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Mat2::identity()).frobenius_norm()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `exp(-i t n.sigma)` for a real vector `n`.
    pub fn exp_pauli(n: [f64; 3], t: f64) -> Self {
        let w = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if w == 0.0 {
            return Mat2::identity();
        }
        let (s, c) = (w * t).sin_cos();
        let f = s / w;
        // cos(wt) I - i sin(wt)/w (n.sigma)
        Mat2::new(
            C64::new(c, -f * n[2]),
            C64::new(-f * n[1], -f * n[0]),
            C64::new(f * n[1], -f * n[0]),
            C64::new(c, f * n[2]),
        )
    }
}

impl Default for Mat2 {
    fn default() -> Self {
        Mat2::identity()
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    #[inline]
    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;

    fn sub(self, rhs: Mat2) -> Mat2 {
        self + (-rhs)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;

    fn neg(self) -> Mat2 {
        self.scale(-ONE)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            m[0][0], m[0][1], m[1][0], m[1][1]
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn pauli(self) -> Mat2 {
        match self {
            Axis::X => Mat2::sigma_x(),
            Axis::Y => Mat2::sigma_y(),
            Axis::Z => Mat2::sigma_z(),
        }
    }

    fn unit(self) -> [f64; 3] {
        match self {
            Axis::X => [1.0, 0.0, 0.0],
            Axis::Y => [0.0, 1.0, 0.0],
            Axis::Z => [0.0, 0.0, 1.0],
        }
    }
}

/// `R_a(angle) = exp(-i angle sigma_a / 2)`.
pub fn rotation(axis: Axis, angle: f64) -> Mat2 {
    Mat2::exp_pauli(axis.unit(), angle / 2.0)
}

/// Angles of the general U(2) coin `e^{i delta} R_z(zeta) R_y(theta) R_z(phi)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoinParams {
    pub delta: f64,
    pub theta: f64,
    pub phi: f64,
    pub zeta: f64,
}

impl CoinParams {
    pub const fn new(delta: f64, theta: f64, phi: f64, zeta: f64) -> Self {
        CoinParams {
            delta,
            theta,
            phi,
            zeta,
        }
    }
}

/// The general coin, evaluated entrywise.
pub fn coin(p: CoinParams) -> Mat2 {
    let (s, c) = (p.theta / 2.0).sin_cos();
    let sum = (p.phi + p.zeta) / 2.0;
    let dif = (p.phi - p.zeta) / 2.0;
    let g = C64::from_polar(1.0, p.delta);
    Mat2::new(
        g * C64::from_polar(c, -sum),
        g * C64::from_polar(-s, dif),
        g * C64::from_polar(s, -dif),
        g * C64::from_polar(c, sum),
    )
}

/// Coefficients of a matrix on `(sigma_0, sigma_x, sigma_y, sigma_z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliCoeffs {
    pub d0: C64,
    pub d1: C64,
    pub d2: C64,
    pub d3: C64,
}

pub fn pauli_decompose(u: &Mat2) -> PauliCoeffs {
    let m = &u.0;
    let half = 0.5;
    PauliCoeffs {
        d0: (m[0][0] + m[1][1]) * half,
        d1: (m[0][1] + m[1][0]) * half,
        d2: (m[0][1] - m[1][0]) * I * half,
        d3: (m[0][0] - m[1][1]) * half,
    }
}

impl PauliCoeffs {
    pub fn reconstruct(&self) -> Mat2 {
        Mat2::new(
            self.d0 + self.d3,
            self.d1 - I * self.d2,
            self.d1 + I * self.d2,
            self.d0 - self.d3,
        )
    }

    /// Real parts of the three Pauli components, for Hermitian inputs.
    pub fn vector(&self) -> [f64; 3] {
        [self.d1.re, self.d2.re, self.d3.re]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    // truncated Taylor series of exp(A), independent of the closed form
    fn expm_series(a: Mat2) -> Mat2 {
        let mut term = Mat2::identity();
        let mut acc = Mat2::identity();
        for n in 1..40 {
            term = (term * a).scale(c(1.0 / n as f64, 0.0));
            acc = acc + term;
        }
        acc
    }

    fn rot_oracle(axis: Axis, angle: f64) -> Mat2 {
        expm_series(axis.pauli().scale(c(0.0, -angle / 2.0)))
    }

    #[test]
    fn zero_rotation_is_identity() {
        assert_eq!(rotation(Axis::Z, 0.0), Mat2::identity());
    }

    #[test]
    fn full_turn_flips_sign() {
        let r = rotation(Axis::Y, 2.0 * PI);
        assert!(r.max_abs_diff(&(-Mat2::identity())) < 1e-12);
    }

    #[test]
    fn quarter_x_rotation_matches_series() {
        let r = rotation(Axis::X, FRAC_PI_2);
        let h = FRAC_PI_4.cos();
        let want = Mat2::new(c(h, 0.0), c(0.0, -h), c(0.0, -h), c(h, 0.0));
        assert!(r.max_abs_diff(&want) < 1e-12);
        assert!(r.max_abs_diff(&rot_oracle(Axis::X, FRAC_PI_2)) < 1e-12);
    }

    #[test]
    fn coin_zero_is_identity() {
        assert!(coin(CoinParams::default()).max_abs_diff(&Mat2::identity()) < 1e-15);
    }

    #[test]
    fn coin_matches_rotation_product() {
        let p = CoinParams::new(0.3, -1.1, 2.4, 0.7);
        let prod = rotation(Axis::Z, p.zeta) * rotation(Axis::Y, p.theta) * rotation(Axis::Z, p.phi);
        let want = prod.scale(C64::from_polar(1.0, p.delta));
        assert!(coin(p).max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn alpha_coin_at_zero_is_sigma_y() {
        let m = coin(CoinParams::new(FRAC_PI_2, -PI, FRAC_PI_2, -1.5 * PI));
        assert!(m.max_abs_diff(&Mat2::sigma_y()) < 1e-12);
    }

    #[test]
    fn beta_coin_at_half_pi() {
        let a = FRAC_PI_2;
        let m = coin(CoinParams::new(0.0, -2.0 * PI - 2.0 * a, FRAC_PI_2, -FRAC_PI_2));
        let want = -rot_oracle(Axis::X, -2.0 * a);
        assert!(m.max_abs_diff(&want) < 1e-12);
        // -R_x(-pi) = [[0, -i], [-i, 0]]
        let explicit = Mat2::new(ZERO, c(0.0, -1.0), c(0.0, -1.0), ZERO);
        assert!(m.max_abs_diff(&explicit) < 1e-12);
    }

    #[test]
    fn decompose_identity_and_sigma_y() {
        let p = pauli_decompose(&Mat2::identity());
        assert_eq!((p.d0, p.d1, p.d2, p.d3), (ONE, ZERO, ZERO, ZERO));
        let p = pauli_decompose(&Mat2::sigma_y());
        assert_eq!((p.d0, p.d1, p.d2, p.d3), (ZERO, ZERO, ONE, ZERO));
    }

    #[test]
    fn decompose_matches_projection() {
        let u = rotation(Axis::Y, 0.7) * rotation(Axis::Z, 1.3);
        let p = pauli_decompose(&u);
        let proj = |s: Mat2| (s * u).trace() * 0.5;
        assert!((p.d0 - proj(Mat2::identity())).norm() < 1e-12);
        assert!((p.d1 - proj(Mat2::sigma_x())).norm() < 1e-12);
        assert!((p.d2 - proj(Mat2::sigma_y())).norm() < 1e-12);
        assert!((p.d3 - proj(Mat2::sigma_z())).norm() < 1e-12);
    }

    #[test]
    fn exp_pauli_matches_series() {
        let n = [0.3, -1.2, 0.8];
        let h = Mat2::sigma_x().scale(c(n[0], 0.0))
            + Mat2::sigma_y().scale(c(n[1], 0.0))
            + Mat2::sigma_z().scale(c(n[2], 0.0));
        let t = 0.9;
        let want = expm_series(h.scale(c(0.0, -t)));
        assert!(Mat2::exp_pauli(n, t).max_abs_diff(&want) < 1e-12);
    }

    fn angle() -> impl Strategy<Value = f64> {
        -10.0f64..10.0
    }

    fn any_mat() -> impl Strategy<Value = Mat2> {
        proptest::array::uniform8(-5.0f64..5.0).prop_map(|v| {
            Mat2::new(c(v[0], v[1]), c(v[2], v[3]), c(v[4], v[5]), c(v[6], v[7]))
        })
    }

    fn any_axis() -> impl Strategy<Value = Axis> {
        prop_oneof![Just(Axis::X), Just(Axis::Y), Just(Axis::Z)]
    }

    proptest! {
        #[test]
        fn rotations_compose(axis in any_axis(), a in angle(), b in angle()) {
            let lhs = rotation(axis, a) * rotation(axis, b);
            prop_assert!(lhs.max_abs_diff(&rotation(axis, a + b)) < 1e-12);
        }

        #[test]
        fn rotation_is_unitary_with_unit_det(axis in any_axis(), a in angle()) {
            let r = rotation(axis, a);
            prop_assert!((r * r.adjoint()).max_abs_diff(&Mat2::identity()) < 1e-12);
            prop_assert!((r.det().norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn coin_is_unitary(d in angle(), t in angle(), p in angle(), z in angle()) {
            let u = coin(CoinParams::new(d, t, p, z));
            prop_assert!((u * u.adjoint()).max_abs_diff(&Mat2::identity()) < 1e-12);
            prop_assert!((u.det().norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn decompose_roundtrip(m in any_mat()) {
            let back = pauli_decompose(&m).reconstruct();
            prop_assert!(back.max_abs_diff(&m) < 1e-12);
        }

        // The matrix [[sin a, -i cos a], [i cos a, -sin a]] is sigma_y R_x(-2a).
        #[test]
        fn walk_coins_match_rotation_forms(a in -PI..PI) {
            let ca = coin(CoinParams::new(FRAC_PI_2, -PI - 2.0 * a, FRAC_PI_2, -1.5 * PI));
            let explicit = Mat2::new(c(a.sin(), 0.0), c(0.0, -a.cos()), c(0.0, a.cos()), c(-a.sin(), 0.0));
            prop_assert!(ca.max_abs_diff(&explicit) < 1e-12);
            prop_assert!(ca.max_abs_diff(&(Mat2::sigma_y() * rot_oracle(Axis::X, -2.0 * a))) < 1e-12);

            let cb = coin(CoinParams::new(0.0, -2.0 * PI - 2.0 * a, FRAC_PI_2, -FRAC_PI_2));
            prop_assert!(cb.max_abs_diff(&(-rot_oracle(Axis::X, -2.0 * a))) < 1e-12);
        }
    }

    #[test]
    fn positive_angle_form_is_not_the_alpha_coin() {
        let a = 0.4;
        let ca = coin(CoinParams::new(FRAC_PI_2, -PI - 2.0 * a, FRAC_PI_2, -1.5 * PI));
        let other = Mat2::sigma_y() * rotation(Axis::X, 2.0 * a);
        assert_abs_diff_eq!(ca.max_abs_diff(&other), 2.0 * a.sin(), epsilon = 1e-12);
    }
}
