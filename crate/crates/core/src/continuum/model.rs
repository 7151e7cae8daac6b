use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::algebra::Mat2;
use crate::error::{invalid, require_finite, Result};
use crate::lattice::SpinorField;
use crate::walk::{Variant, WalkSpec};

use super::constraints::check_walk;

/// `H_c(k) = -(m/2) sigma_z + (c1 k + c2 k^2) sigma_y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuumModel {
    pub mass: f64,
    pub c1: f64,
    pub c2: f64,
}

impl ContinuumModel {
    /// YY: `c1 = -2 alpha1`, `c2 = sin theta`.
    pub fn yy(alpha1: f64, theta: f64, mass: f64) -> Self {
        ContinuumModel {
            mass,
            c1: -2.0 * alpha1,
            c2: theta.sin(),
        }
    }

    /// XI: `c1 = -beta` with `beta = 2 alpha1 + theta1 / 2`, no dispersion.
    pub fn xi(alpha1: f64, theta1: f64, mass: f64) -> Self {
        ContinuumModel {
            mass,
            c1: -(2.0 * alpha1 + theta1 / 2.0),
            c2: 0.0,
        }
    }

    pub fn from_spec(spec: &WalkSpec) -> Result<Self> {
        spec.validate()?;
        match &spec.variant {
            Variant::Yy => Ok(ContinuumModel::yy(spec.alpha1, spec.theta, spec.mass)),
            Variant::Xi if spec.scale_twist => Ok(ContinuumModel::xi(spec.alpha1, spec.theta1, spec.mass)),
            Variant::Xi => Err(invalid(
                "scale_twist",
                "an XI twist that does not scale with sqrt(eps) has no continuum limit",
            )),
            Variant::General(_) => {
                let rep = check_walk(spec, super::DEFAULT_TOL)?;
                let h = rep
                    .predicted
                    .filter(|_| rep.satisfied)
                    .ok_or_else(|| invalid("general", "walk fails the continuum-limit constraints"))?;
                let off_axis = [0, 2].iter().any(|&i| h.linear[i].abs() > 1e-12 || h.quadratic[i].abs() > 1e-12);
                if off_axis {
                    return Err(invalid("general", "continuum Hamiltonian has sigma_x or sigma_z momentum terms"));
                }
                Ok(ContinuumModel {
                    mass: spec.mass,
                    c1: h.linear[1],
                    c2: h.quadratic[1],
                })
            }
        }
    }

    pub fn pauli_vector(&self, k: f64) -> [f64; 3] {
        [0.0, self.c1 * k + self.c2 * k * k, -self.mass / 2.0]
    }

    pub fn hamiltonian(&self, k: f64) -> Mat2 {
        let [_, y, z] = self.pauli_vector(k);
        Mat2::sigma_y().scale(C64::new(y, 0.0)) + Mat2::sigma_z().scale(C64::new(z, 0.0))
    }

    /// `exp(-i t H_c(k))`.
    pub fn propagator(&self, k: f64, t: f64) -> Mat2 {
        Mat2::exp_pauli(self.pauli_vector(k), t)
    }
}

/// Eigenvalues `(+, -)` of `H_c(k)`.
pub fn continuum_spectrum(model: &ContinuumModel, k: f64) -> (f64, f64) {
    let [_, y, z] = model.pauli_vector(k);
    let e = y.hypot(z);
    (e, -e)
}

/// Physical wavenumbers of the DFT modes of an `n`-site grid, in FFT order.
pub(crate) fn fft_wavenumbers(n: usize, dx: f64) -> Vec<f64> {
    let scale = 2.0 * std::f64::consts::PI / (n as f64 * dx);
    (0..n)
        .map(|j| if j < n / 2 { j as f64 } else { j as f64 - n as f64 })
        .map(|f| f * scale)
        .collect()
}

/// Exact evolution under `H_c` on the periodic grid of `initial`:
/// each Fourier mode is multiplied by `exp(-i t H_c(k))`.
pub fn evolve_continuum(initial: &SpinorField, model: &ContinuumModel, t: f64) -> Result<SpinorField> {
    require_finite("t", t)?;
    if t < 0.0 {
        return Err(invalid("t", format!("must be >= 0, got {t}")));
    }
    let n = initial.n_sites();
    let mut plus = initial.plus().to_vec();
    let mut minus = initial.minus().to_vec();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    fwd.process(&mut plus);
    fwd.process(&mut minus);
    let ks = fft_wavenumbers(n, initial.dx());
    let norm = 1.0 / n as f64;
    for (j, &k) in ks.iter().enumerate() {
        let [a, b] = model.propagator(k, t).apply([plus[j], minus[j]]);
        plus[j] = a * norm;
        minus[j] = b * norm;
    }
    inv.process(&mut plus);
    inv.process(&mut minus);
    SpinorField::from_components(plus, minus, initial.dx())
}
