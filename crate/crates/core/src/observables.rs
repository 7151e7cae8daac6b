//! Densities, moments, coin-position entanglement and entropy diagnostics.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_finite, Result, TqwError};
use crate::lattice::{unit_spinor, SpinorField};

/// Tolerance on reduced-density eigenvalues before they count as garbage.
pub const EIGEN_TOL: f64 = 1e-10;
/// Hysteresis used when counting extrema of an entropy series.
pub const EXTREMA_HYSTERESIS: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
}

pub fn density(state: &SpinorField) -> DensityProfile {
    DensityProfile {
        x: state.positions(),
        rho: state
            .plus()
            .iter()
            .zip(state.minus())
            .map(|(p, m)| p.norm_sqr() + m.norm_sqr())
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub m1: f64,
    pub m2: f64,
    pub variance: f64,
}

pub fn moments(p: &DensityProfile) -> Moments {
    let m1: f64 = p.x.iter().zip(&p.rho).map(|(x, r)| x * r).sum();
    let m2: f64 = p.x.iter().zip(&p.rho).map(|(x, r)| x * x * r).sum();
    // centred sum: same value as m2 - m1^2 without the cancellation
    let variance: f64 = p.x.iter().zip(&p.rho).map(|(x, r)| (x - m1).powi(2) * r).sum();
    Moments {
        m1,
        m2,
        variance: variance.max(0.0),
    }
}

/// `Im[psi+ conj(psi-)]` of the normalized spinor.
pub fn coherence_im(spinor: [C64; 2]) -> Result<f64> {
    let s = unit_spinor(spinor)?;
    Ok((s[0] * s[1].conj()).im)
}

/// Drift of the YY walk in the continuum: `mu + 4 t alpha1 Im[psi+ conj(psi-)]`.
pub fn theory_m1_yy(t: f64, mu_x: f64, alpha1: f64, spinor: [C64; 2]) -> Result<f64> {
    Ok(mu_x + 4.0 * t * alpha1 * coherence_im(spinor)?)
}

/// Variance of the YY walk in the continuum:
/// `sigma2 + sin^2(theta)/sigma2 t^2 + 4 alpha1^2 (1 - 4 Im^2) t^2`.
pub fn theory_variance_yy(t: f64, sigma2: f64, alpha1: f64, theta: f64, spinor: [C64; 2]) -> Result<f64> {
    require_finite("sigma2", sigma2)?;
    if sigma2 <= 0.0 {
        return Err(invalid("sigma2", format!("must be > 0, got {sigma2}")));
    }
    let im = coherence_im(spinor)?;
    let t2 = t * t;
    Ok(sigma2 + theta.sin().powi(2) / sigma2 * t2 + 4.0 * alpha1 * alpha1 * (1.0 - 4.0 * im * im) * t2)
}

/// Shannon entropy in bits of `{p, 1 - p}`, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    let p = p.clamp(0.0, 1.0);
    h(p) + h(1.0 - p)
}

/// Coin reduced density matrix `rho_cc' = sum_l psi^c_l conj(psi^c'_l)`
/// as `(rho_++, rho_--, rho_+-)`.
pub fn reduced_density(state: &SpinorField) -> (f64, f64, C64) {
    let mut a = 0.0;
    let mut d = 0.0;
    let mut b = C64::new(0.0, 0.0);
    for (p, m) in state.plus().iter().zip(state.minus()) {
        a += p.norm_sqr();
        d += m.norm_sqr();
        b += p * m.conj();
    }
    (a, d, b)
}

/// Von Neumann entropy (bits) of the coin after tracing out position.
pub fn entanglement_entropy(state: &SpinorField) -> Result<f64> {
    let (a, d, b) = reduced_density(state);
    let mid = (a + d) / 2.0;
    let rad = ((a - d).powi(2) / 4.0 + b.norm_sqr()).sqrt();
    let (hi, lo) = (mid + rad, mid - rad);
    for v in [hi, lo] {
        if !(-EIGEN_TOL..=1.0 + EIGEN_TOL).contains(&v) {
            return Err(TqwError::EigenvalueOutOfRange { value: v });
        }
    }
    Ok(binary_entropy(lo))
}

fn entropy_from_radius_sq(r2: f64) -> Result<f64> {
    if r2 < -1e-12 || !r2.is_finite() {
        return Err(TqwError::NegativeDiscriminant { value: r2 });
    }
    let r = r2.max(0.0).sqrt().min(1.0);
    Ok(binary_entropy((1.0 - r) / 2.0))
}

/// Continuum YY entanglement entropy from the closed-form eigenvalues
/// `1/2 [1 +- sqrt(1 + 4 |psi+|^2 |psi-|^2 (F - 1))]`,
/// `F = exp(-4 alpha1^2 t^2 / (1 + t^2 sin^2 theta)) / sqrt(1 + t^2 sin^2 theta)`.
///
/// The expression carries no initial width: it corresponds to a unit-variance
/// packet. It also only involves the populations `|psi+|^2, |psi-|^2`, as if
/// `sigma_z` coherences were irrelevant; the discrete walk does not share that
/// symmetry, so this is a reference curve rather than a derivation valid for
/// every spinor.
pub fn continuum_entropy_yy(t: f64, alpha1: f64, theta: f64, spinor: [C64; 2]) -> Result<f64> {
    require_finite("t", t)?;
    let s = unit_spinor(spinor)?;
    let pq = s[0].norm_sqr() * s[1].norm_sqr();
    let g = 1.0 + t * t * theta.sin().powi(2);
    let f = (-4.0 * alpha1 * alpha1 * t * t / g).exp() / g.sqrt();
    entropy_from_radius_sq(1.0 + 4.0 * pq * (f - 1.0))
}

/// Continuum XI entanglement entropy for a packet of width `sigma` under the
/// Dirac Hamiltonian with velocity `beta`. The Bloch vector of the coin keeps
/// its `sigma_y` component `2 Im[psi+ conj(psi-)]`; the other two decay with
/// `exp(-t^2 beta^2 / sigma^2)`, so
/// `lambda = 1/2 [1 +- sqrt(4 Im^2 + e^{..} (4 Re^2 + (2|psi+|^2 - 1)^2))]`.
pub fn continuum_entropy_xi(t: f64, beta: f64, sigma: f64, spinor: [C64; 2]) -> Result<f64> {
    require_finite("t", t)?;
    require_finite("beta", beta)?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid("sigma", format!("must be > 0, got {sigma}")));
    }
    let s = unit_spinor(spinor)?;
    let c = s[0] * s[1].conj();
    let a = s[0].norm_sqr();
    let decay = (-(t * beta / sigma).powi(2)).exp();
    entropy_from_radius_sq(4.0 * c.im * c.im + decay * (4.0 * c.re * c.re + (2.0 * a - 1.0).powi(2)))
}

/// Initial spinor `(cos(theta_b/2), e^{i phi_b} sin(theta_b/2))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochAngles {
    pub theta_b: f64,
    pub phi_b: f64,
}

impl BlochAngles {
    pub fn new(theta_b: f64, phi_b: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta_b) {
            return Err(invalid("theta_b", format!("must lie in [0, pi], got {theta_b}")));
        }
        if !(0.0..2.0 * PI).contains(&phi_b) {
            return Err(invalid("phi_b", format!("must lie in [0, 2 pi), got {phi_b}")));
        }
        Ok(BlochAngles { theta_b, phi_b })
    }

    pub fn spinor(&self) -> [C64; 2] {
        let (s, c) = (self.theta_b / 2.0).sin_cos();
        [C64::new(c, 0.0), C64::from_polar(s, self.phi_b)]
    }
}

/// Per-time observables: `t, m1, m1_theory, V, V_theory, S`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    pub m1: Vec<f64>,
    pub m1_theory: Vec<Option<f64>>,
    pub variance: Vec<f64>,
    pub variance_theory: Vec<Option<f64>>,
    pub entropy: Vec<f64>,
}

impl ObservableSeries {
    /// Measure `state` at time `t`; theory values are optional.
    pub fn record(&mut self, t: f64, state: &SpinorField, theory: Option<(f64, f64)>) -> Result<()> {
        let m = moments(&density(state));
        self.times.push(t);
        self.m1.push(m.m1);
        self.variance.push(m.variance);
        self.m1_theory.push(theory.map(|x| x.0));
        self.variance_theory.push(theory.map(|x| x.1));
        self.entropy.push(entanglement_entropy(state)?);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        writeln!(w, "t,m1,m1_theory,V,V_theory,S")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                self.times[i],
                self.m1[i],
                opt(self.m1_theory[i]),
                self.variance[i],
                opt(self.variance_theory[i]),
                self.entropy[i]
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyDiagnostics {
    /// Earliest time after which every sample stays within 5% of `s_infinity`.
    pub tau_5pct: f64,
    /// Local maxima plus minima, ignoring wiggles below the hysteresis.
    pub n_extrema: usize,
    pub n_maxima: usize,
    /// Mean of the final 10% of samples.
    pub s_infinity: f64,
}

pub fn convergence_diagnostics(times: &[f64], values: &[f64]) -> Result<EntropyDiagnostics> {
    const MIN: usize = 10;
    if times.len() != values.len() {
        return Err(invalid("series", "times and values differ in length"));
    }
    if values.len() < MIN {
        return Err(TqwError::SeriesTooShort { len: values.len(), min: MIN });
    }
    let n = values.len();
    let tail = (n / 10).max(1);
    let s_inf = values[n - tail..].iter().sum::<f64>() / tail as f64;
    let band = 0.05 * s_inf.abs();
    let tau = match values.iter().rposition(|v| (v - s_inf).abs() > band) {
        Some(i) if i + 1 < n => times[i + 1],
        Some(i) => times[i],
        None => times[0],
    };

    let h = EXTREMA_HYSTERESIS;
    let (mut dir, mut ext) = (0i8, values[0]);
    let (mut maxima, mut minima) = (0, 0);
    for &v in &values[1..] {
        match dir {
            0 if v > ext + h => (dir, ext) = (1, v),
            0 if v < ext - h => (dir, ext) = (-1, v),
            1 if v > ext => ext = v,
            1 if v < ext - h => {
                maxima += 1;
                (dir, ext) = (-1, v);
            }
            -1 if v < ext => ext = v,
            -1 if v > ext + h => {
                minima += 1;
                (dir, ext) = (1, v);
            }
            _ => {}
        }
    }
    Ok(EntropyDiagnostics {
        tau_5pct: tau,
        n_extrema: maxima + minima,
        n_maxima: maxima,
        s_infinity: s_inf,
    })
}
