//! Position-space spinor field on a periodic lattice and exact walk steps.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::Mat2;
use crate::error::{invalid, require_finite, Result, TqwError};
use crate::exec::{self, Execution};
use crate::walk::{StepPlan, Variant, WalkSpec};

/// Coins further than this from unitary are rejected.
pub const UNITARITY_TOL: f64 = 1e-8;

/// Two complex amplitudes per site on a ring of `n_sites` (even) sites.
/// Site `l` sits at `x_l = (l - n_sites/2) dx`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinorField {
    plus: Vec<C64>,
    minus: Vec<C64>,
    dx: f64,
}

impl SpinorField {
    pub fn zeros(n_sites: usize, dx: f64) -> Result<Self> {
        check_grid(n_sites, dx)?;
        Ok(SpinorField {
            plus: vec![C64::new(0.0, 0.0); n_sites],
            minus: vec![C64::new(0.0, 0.0); n_sites],
            dx,
        })
    }

    pub fn from_components(plus: Vec<C64>, minus: Vec<C64>, dx: f64) -> Result<Self> {
        if plus.len() != minus.len() {
            return Err(invalid(
                "amplitudes",
                format!("component lengths differ ({} vs {})", plus.len(), minus.len()),
            ));
        }
        check_grid(plus.len(), dx)?;
        Ok(SpinorField { plus, minus, dx })
    }

    /// Whole amplitude on one site.
    pub fn localized(n_sites: usize, dx: f64, site: usize, spinor: [C64; 2]) -> Result<Self> {
        let mut f = SpinorField::zeros(n_sites, dx)?;
        if site >= n_sites {
            return Err(invalid("site", format!("{site} out of range for {n_sites} sites")));
        }
        let s = unit_spinor(spinor)?;
        f.plus[site] = s[0];
        f.minus[site] = s[1];
        Ok(f)
    }

    /// `e^{i k l} chi / sqrt(n)`; `k` should be a multiple of `2 pi / n_sites`.
    pub fn plane_wave(n_sites: usize, dx: f64, k: f64, spinor: [C64; 2]) -> Result<Self> {
        check_grid(n_sites, dx)?;
        let s = unit_spinor(spinor)?;
        let norm = (n_sites as f64).sqrt().recip();
        let phase: Vec<C64> = (0..n_sites)
            .map(|l| C64::from_polar(norm, k * l as f64))
            .collect();
        Ok(SpinorField {
            plus: phase.iter().map(|p| p * s[0]).collect(),
            minus: phase.iter().map(|p| p * s[1]).collect(),
            dx,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.plus.len()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn plus(&self) -> &[C64] {
        &self.plus
    }

    pub fn minus(&self) -> &[C64] {
        &self.minus
    }

    pub fn site(&self, l: usize) -> [C64; 2] {
        [self.plus[l], self.minus[l]]
    }

    pub fn position(&self, l: usize) -> f64 {
        (l as f64 - (self.n_sites() / 2) as f64) * self.dx
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_sites()).map(|l| self.position(l)).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.plus
            .iter()
            .zip(&self.minus)
            .map(|(p, m)| p.norm_sqr() + m.norm_sqr())
            .sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr().sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(invalid("state", "cannot normalize a zero or non-finite field"));
        }
        let s = n.recip();
        self.plus.iter_mut().chain(self.minus.iter_mut()).for_each(|z| *z *= s);
        Ok(())
    }

    /// Max over sites of the spinor distance between two fields.
    pub fn max_abs_diff(&self, other: &SpinorField) -> f64 {
        self.plus
            .iter()
            .zip(&other.plus)
            .chain(self.minus.iter().zip(&other.minus))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Cyclic translation by `sites` (positive: towards larger `l`).
    pub fn translated(&self, sites: isize) -> SpinorField {
        let n = self.n_sites() as isize;
        let r = sites.rem_euclid(n) as usize;
        let mut out = self.clone();
        out.plus.rotate_right(r);
        out.minus.rotate_right(r);
        out
    }

    /// Coin-conditioned shift: `psi+` moves one site down and `psi-` one
    /// site up, so the plane wave `e^{ikl}` picks up `diag(e^{ik}, e^{-ik})`.
    pub fn shift_in_place(&mut self) {
        self.plus.rotate_left(1);
        self.minus.rotate_right(1);
    }

    /// Multiply every site spinor by `m`, no unitarity check.
    pub fn apply_in_place(&mut self, m: &Mat2, exec: Execution) {
        let m = *m;
        exec::zip_mut(exec, &mut self.plus, &mut self.minus, move |p, q| {
            let [a, b] = m.apply([*p, *q]);
            *p = a;
            *q = b;
        });
    }
}

fn check_grid(n_sites: usize, dx: f64) -> Result<()> {
    if n_sites == 0 || !n_sites.is_multiple_of(2) {
        return Err(invalid("n_sites", format!("must be positive and even, got {n_sites}")));
    }
    require_finite("dx", dx)?;
    if dx <= 0.0 {
        return Err(invalid("dx", format!("must be > 0, got {dx}")));
    }
    Ok(())
}

pub(crate) fn unit_spinor(s: [C64; 2]) -> Result<[C64; 2]> {
    let n = (s[0].norm_sqr() + s[1].norm_sqr()).sqrt();
    if !(n > 0.0 && n.is_finite()) {
        return Err(invalid("spinor", "must be nonzero and finite"));
    }
    Ok([s[0] / n, s[1] / n])
}

pub fn shift(state: &SpinorField) -> SpinorField {
    let mut out = state.clone();
    out.shift_in_place();
    out
}

pub fn apply_coin(state: &SpinorField, c: &Mat2) -> Result<SpinorField> {
    check_unitary(c)?;
    let mut out = state.clone();
    out.apply_in_place(c, Execution::Sequential);
    Ok(out)
}

fn check_unitary(c: &Mat2) -> Result<()> {
    let deviation = c.unitarity_defect();
    if deviation > UNITARITY_TOL || !deviation.is_finite() {
        return Err(TqwError::NonUnitary { deviation });
    }
    Ok(())
}

/// Applies a compiled step repeatedly.
#[derive(Clone, Debug)]
pub struct Stepper {
    ops: Vec<Op>,
    exec: Execution,
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Apply(Mat2),
    Shift,
}

impl Stepper {
    pub fn new(spec: &WalkSpec, exec: Execution) -> Result<Self> {
        Stepper::from_plan(&spec.plan()?, exec)
    }

    pub fn from_plan(plan: &StepPlan, exec: Execution) -> Result<Self> {
        let mut ops = Vec::with_capacity(3 * plan.legs.len() + 1);
        for leg in &plan.legs {
            check_unitary(&leg.coin)?;
            match leg.twist {
                Some(t) if t != Mat2::identity() => {
                    check_unitary(&t)?;
                    ops.push(Op::Apply(t * leg.coin));
                    ops.push(Op::Shift);
                    ops.push(Op::Apply(t.adjoint()));
                }
                _ => {
                    ops.push(Op::Apply(leg.coin));
                    ops.push(Op::Shift);
                }
            }
        }
        if plan.mass_phase != 0.0 {
            ops.push(Op::Apply(plan.mass_matrix()));
        }
        Ok(Stepper { ops, exec })
    }

    pub fn step(&self, state: &mut SpinorField) {
        for op in &self.ops {
            match op {
                Op::Apply(m) => state.apply_in_place(m, self.exec),
                Op::Shift => state.shift_in_place(),
            }
        }
    }

    /// Number of shifts per step, i.e. the maximal spread in sites per step and side.
    pub fn shifts_per_step(&self) -> usize {
        self.ops.iter().filter(|o| matches!(o, Op::Shift)).count()
    }
}

fn step_checked(state: &SpinorField, spec: &WalkSpec, want: fn(&Variant) -> bool, name: &str) -> Result<SpinorField> {
    if !want(&spec.variant) {
        return Err(invalid("variant", format!("{name} needs a matching walk variant")));
    }
    step(state, spec)
}

/// One YY step: `M G^2` with `G = W_beta W_alpha`.
pub fn step_yy(state: &SpinorField, spec: &WalkSpec) -> Result<SpinorField> {
    step_checked(state, spec, |v| matches!(v, Variant::Yy), "step_yy")
}

/// One XI step: `M W_beta2 W_alpha W_beta1 W_alpha`.
pub fn step_xi(state: &SpinorField, spec: &WalkSpec) -> Result<SpinorField> {
    step_checked(state, spec, |v| matches!(v, Variant::Xi), "step_xi")
}

/// One step of any variant.
pub fn step(state: &SpinorField, spec: &WalkSpec) -> Result<SpinorField> {
    let stepper = Stepper::new(spec, Execution::Sequential)?;
    let mut out = state.clone();
    stepper.step(&mut out);
    Ok(out)
}

/// Gaussian packet `sqrt(g(x_l)) chi`, with `g` the normal density of mean
/// `mu_x` and variance `sigma2`, sampled at site centres and renormalized.
pub fn gaussian_init(
    n_sites: usize,
    dx: f64,
    mu_x: f64,
    sigma2: f64,
    spinor: [C64; 2],
) -> Result<SpinorField> {
    require_finite("mu_x", mu_x)?;
    require_finite("sigma2", sigma2)?;
    if sigma2 <= 0.0 {
        return Err(invalid("sigma2", format!("must be > 0, got {sigma2}")));
    }
    let s = unit_spinor(spinor)?;
    let mut f = SpinorField::zeros(n_sites, dx)?;
    // subtract the smallest exponent so the peak is exactly 1 even for very narrow packets
    let d2: Vec<f64> = (0..n_sites).map(|l| (f.position(l) - mu_x).powi(2)).collect();
    let d2min = d2.iter().copied().fold(f64::INFINITY, f64::min);
    for (l, d) in d2.into_iter().enumerate() {
        let amp = (-(d - d2min) / (4.0 * sigma2)).exp();
        f.plus[l] = s[0] * amp;
        f.minus[l] = s[1] * amp;
    }
    f.normalize()?;
    Ok(f)
}

/// Lattice size below which a wavefront may wrap around the ring:
/// `2 * shifts * n_steps + 10 sigma / dx`.
pub fn required_sites(shifts_per_step: usize, n_steps: usize, sigma: f64, dx: f64) -> usize {
    2 * shifts_per_step * n_steps + (10.0 * sigma / dx).ceil() as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WrapWarning {
    pub n_sites: usize,
    pub required: usize,
}

impl std::fmt::Display for WrapWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "lattice of {} sites may let the wavefront wrap; sizing rule asks for {}",
            self.n_sites, self.required
        )
    }
}

/// Sizing-rule check, with the packet width estimated from the state itself.
pub fn wrap_check(state: &SpinorField, shifts_per_step: usize, n_steps: usize) -> Option<WrapWarning> {
    let xs = state.positions();
    let rho: Vec<f64> = state
        .plus
        .iter()
        .zip(&state.minus)
        .map(|(p, m)| p.norm_sqr() + m.norm_sqr())
        .collect();
    let tot: f64 = rho.iter().sum();
    let m1 = xs.iter().zip(&rho).map(|(x, r)| x * r).sum::<f64>() / tot;
    let var = xs.iter().zip(&rho).map(|(x, r)| (x - m1).powi(2) * r).sum::<f64>() / tot;
    let required = required_sites(shifts_per_step, n_steps, var.max(0.0).sqrt(), state.dx);
    (state.n_sites() < required).then_some(WrapWarning {
        n_sites: state.n_sites(),
        required,
    })
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub final_state: SpinorField,
    /// `(step, field)` every `stride` steps, including step 0.
    pub snapshots: Vec<(usize, SpinorField)>,
    pub wrap: Option<WrapWarning>,
}

/// Evolve `n_steps`, calling `observe(step, &state)` after every step
/// (and once for step 0).
pub fn evolve_with<F>(
    state: &SpinorField,
    spec: &WalkSpec,
    n_steps: usize,
    exec: Execution,
    mut observe: F,
) -> Result<(SpinorField, Option<WrapWarning>)>
where
    F: FnMut(usize, &SpinorField),
{
    let stepper = Stepper::new(spec, exec)?;
    let wrap = wrap_check(state, stepper.shifts_per_step(), n_steps);
    let mut cur = state.clone();
    observe(0, &cur);
    for j in 1..=n_steps {
        stepper.step(&mut cur);
        observe(j, &cur);
    }
    Ok((cur, wrap))
}

/// Evolve keeping a snapshot every `stride` steps (`stride == 0`: none).
pub fn evolve(
    state: &SpinorField,
    spec: &WalkSpec,
    n_steps: usize,
    stride: usize,
    exec: Execution,
) -> Result<Trajectory> {
    let mut snapshots = Vec::new();
    let (final_state, wrap) = evolve_with(state, spec, n_steps, exec, |j, s| {
        if stride > 0 && j % stride == 0 {
            snapshots.push((j, s.clone()));
        }
    })?;
    Ok(Trajectory {
        final_state,
        snapshots,
        wrap,
    })
}
