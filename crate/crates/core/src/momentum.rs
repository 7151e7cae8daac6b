//! Bloch unitaries, closed-form half-traces and effective spectra.

use std::f64::consts::FRAC_PI_2;
use std::io::{self, Write};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::Mat2;
use crate::error::{invalid, Result, TqwError};
use crate::exec::{self, Execution};
use crate::walk::{Variant, WalkSpec};

/// |d0| above 1 by less than this is clamped silently.
pub const SOFT_CLAMP: f64 = 1e-9;
/// |d0| above 1 by more than this is an assembly bug.
pub const HARD_CLAMP: f64 = 1e-6;

/// One-step Bloch unitary at lattice quasi-momentum `k` (radians per site).
pub fn unitary_at_k(spec: &WalkSpec, k: f64) -> Result<Mat2> {
    Ok(spec.plan()?.bloch(k))
}

/// Same, at physical wavenumber `k` (lattice momentum `sqrt(eps) k`).
pub fn unitary_at_physical_k(spec: &WalkSpec, k: f64) -> Result<Mat2> {
    let plan = spec.plan()?;
    Ok(plan.bloch(spec.scaling().lattice_k(k)))
}

/// Half-trace of the massless YY step in closed form, `A = cos 4a`, `B = sin theta`.
///
/// The coefficient of the `sin^3 k cos k` term is `2 B sin 4a`; writing it as
/// `2 B sqrt(1 - A^2)` only agrees for `sin 4a >= 0`.
pub fn d0_yy(alpha: f64, theta: f64, k: f64) -> f64 {
    let a = (4.0 * alpha).cos();
    let s = (4.0 * alpha).sin();
    let b = theta.sin();
    let sk = k.sin();
    (11.0 - a) / 16.0
        + (2.0 * k).cos() * (1.0 + a) / 4.0
        + (4.0 * k).cos() * (1.0 - 3.0 * a) / 16.0
        + sk.powi(4) * (1.0 + a) / 2.0 * (1.0 - 2.0 * b * b)
        + sk.powi(3) * k.cos() * 2.0 * b * s
}

/// Half-trace of the massless XI step in closed form, `A = sin 2a`.
/// `theta` is the twist angle actually applied (`sqrt(eps) theta1`).
pub fn d0_xi(alpha: f64, theta: f64, k: f64) -> f64 {
    let a = (2.0 * alpha).sin();
    let (st, ct) = theta.sin_cos();
    a * (a + st) / 4.0 * ((4.0 * k).cos() - 1.0)
        + (1.0 - ct) / 2.0 * (2.0 * k).cos()
        + (1.0 + ct) / 2.0
}

/// Half-trace of a unitary normalized by the principal square root of its determinant.
pub fn half_trace(u: &Mat2) -> C64 {
    u.trace() / (2.0 * u.det().sqrt())
}

/// Uniform endpoint-inclusive grid over `[-pi/2, pi/2]`, exactly symmetric about 0.
pub fn bz_grid(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(invalid("k_points", format!("need at least 2 points, got {n}")));
    }
    let h = 2.0 * FRAC_PI_2 / (n - 1) as f64;
    let mid = (n - 1) as f64 / 2.0;
    // (i - mid) is exact, so k_i = -k_{n-1-i} bit for bit
    Ok((0..n).map(|i| (i as f64 - mid) * h + 0.0).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub k: f64,
    pub d0: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub spec: WalkSpec,
    pub epsilon: f64,
    /// Time attributed to one step when converting phases to energies.
    pub time_per_step: f64,
    pub samples: Vec<SpectrumSample>,
    /// Samples whose |d0| exceeded 1 by more than the soft tolerance.
    pub clamped: usize,
}

impl SpectrumTable {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "k,d0,lambda_plus,lambda_minus")?;
        for s in &self.samples {
            writeln!(w, "{},{},{},{}", s.k, s.d0, s.lambda_plus, s.lambda_minus)?;
        }
        Ok(())
    }

    /// Largest `|lambda_+(k) - lambda_+(-k)|`, pairing grid points `i` and `n-1-i`.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.samples.len();
        (0..n / 2)
            .map(|i| (self.samples[i].lambda_plus - self.samples[n - 1 - i].lambda_plus).abs())
            .fold(0.0, f64::max)
    }
}

fn closed_form_d0(spec: &WalkSpec) -> Option<Box<dyn Fn(f64) -> f64 + Sync + Send>> {
    if spec.mass != 0.0 {
        return None;
    }
    let law = spec.scaling();
    let (alpha, theta) = (law.alpha, law.twist);
    match spec.variant {
        Variant::Yy => Some(Box::new(move |k| d0_yy(alpha, theta, k))),
        Variant::Xi => Some(Box::new(move |k| d0_xi(alpha, theta, k))),
        Variant::General(_) => None,
    }
}

fn clamp_d0(k: f64, d0: f64) -> Result<(f64, bool)> {
    let over = d0.abs() - 1.0;
    if !d0.is_finite() || over > HARD_CLAMP {
        return Err(TqwError::HalfTraceOutOfRange { k, d0 });
    }
    Ok((d0.clamp(-1.0, 1.0), over > SOFT_CLAMP))
}

/// Effective spectrum `+-arccos(d0) / (2 dt)` over `k_grid` (lattice momenta).
pub fn effective_spectrum(spec: &WalkSpec, k_grid: &[f64], exec: Execution) -> Result<SpectrumTable> {
    let tps = spec.scaling().time_per_step();
    effective_spectrum_scaled(spec, k_grid, tps, exec)
}

/// As [`effective_spectrum`] with an explicit time per step.
pub fn effective_spectrum_scaled(
    spec: &WalkSpec,
    k_grid: &[f64],
    time_per_step: f64,
    exec: Execution,
) -> Result<SpectrumTable> {
    if !(time_per_step > 0.0 && time_per_step.is_finite()) {
        return Err(invalid("time_per_step", "must be positive and finite"));
    }
    if k_grid.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(invalid("k_grid", "must be strictly increasing"));
    }
    let plan = spec.plan()?;
    let closed = closed_form_d0(spec);
    let rows = exec::map(exec, k_grid, |&k| -> Result<(SpectrumSample, bool)> {
        let raw = match &closed {
            Some(f) => f(k),
            None => half_trace(&plan.bloch(k)).re,
        };
        let (d0, clamped) = clamp_d0(k, raw)?;
        let lam = d0.acos() / time_per_step;
        Ok((
            SpectrumSample {
                k,
                d0: raw,
                lambda_plus: lam,
                lambda_minus: -lam,
            },
            clamped,
        ))
    });
    let mut samples = Vec::with_capacity(rows.len());
    let mut clamped = 0;
    for r in rows {
        let (s, c) = r?;
        samples.push(s);
        clamped += c as usize;
    }
    Ok(SpectrumTable {
        spec: spec.clone(),
        epsilon: spec.epsilon,
        time_per_step,
        samples,
        clamped,
    })
}

/// Contiguous run of grid points with `|lambda| < zero_tol`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroRegion {
    pub k_from: f64,
    pub k_to: f64,
    /// Point of smallest `|lambda|` in the run (ties: smallest `|k|`).
    pub k: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingReport {
    pub zeros: Vec<ZeroRegion>,
    pub edge_gap_left: f64,
    pub edge_gap_right: f64,
    /// Smaller of the two edge gaps.
    pub edge_gap: f64,
    /// XI only: the gap under the `2 theta1` convention, for comparison.
    pub nominal_gap: Option<f64>,
}

impl DoublingReport {
    pub fn has_zero_near(&self, k: f64, tol: f64) -> bool {
        self.zeros
            .iter()
            .any(|z| z.k_from - tol <= k && k <= z.k_to + tol)
    }
}

pub fn doubling_scan(table: &SpectrumTable, zero_tol: f64) -> Result<DoublingReport> {
    let s = &table.samples;
    if s.len() < 2 {
        return Err(TqwError::SeriesTooShort { len: s.len(), min: 2 });
    }
    let mut zeros = Vec::new();
    let mut open: Option<(ZeroRegion, f64)> = None;
    for smp in s {
        let a = smp.lambda_plus.abs();
        if a < zero_tol {
            match open.as_mut() {
                Some((z, best)) => {
                    z.k_to = smp.k;
                    if a < *best || (a == *best && smp.k.abs() < z.k.abs()) {
                        z.k = smp.k;
                        *best = a;
                    }
                }
                None => {
                    open = Some((ZeroRegion { k_from: smp.k, k_to: smp.k, k: smp.k }, a));
                }
            }
        } else if let Some((z, _)) = open.take() {
            zeros.push(z);
        }
    }
    if let Some((z, _)) = open {
        zeros.push(z);
    }
    let gap = |x: &SpectrumSample| x.lambda_plus - x.lambda_minus;
    let left = gap(&s[0]);
    let right = gap(&s[s.len() - 1]);
    let nominal_gap = matches!(table.spec.variant, Variant::Xi).then(|| 2.0 * table.spec.theta1);
    Ok(DoublingReport {
        zeros,
        edge_gap_left: left,
        edge_gap_right: right,
        edge_gap: left.min(right),
        nominal_gap,
    })
}
