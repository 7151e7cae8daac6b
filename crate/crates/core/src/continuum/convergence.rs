use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_finite, Result};
use crate::exec::{self, Execution};
use crate::lattice::{gaussian_init, required_sites, Stepper};
use crate::observables::density;
use crate::walk::WalkSpec;

use super::model::{evolve_continuum, ContinuumModel};

/// Gaussian initial data shared by the walk and the continuum solution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub mu_x: f64,
    pub sigma2: f64,
    pub spinor: [C64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub epsilon: f64,
    pub n_steps: usize,
    /// Time actually reached, `2 eps n_steps`.
    pub time: f64,
    /// The requested time was not a whole number of steps and was rounded.
    pub snapped: bool,
    pub n_sites: usize,
    pub dx: f64,
    /// `sqrt(sum_l (rho_walk - rho_cont)^2 / dx)`, the L2 distance of the
    /// two densities per unit length.
    pub l2_error: f64,
    pub wrapped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub strictly_decreasing: bool,
}

impl ConvergenceTable {
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "epsilon,n_steps,time,snapped,n_sites,dx,l2_error,wrapped")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.epsilon, r.n_steps, r.time, r.snapped, r.n_sites, r.dx, r.l2_error, r.wrapped
            )?;
        }
        Ok(())
    }
}

fn even_at_least(n: usize) -> usize {
    n + n % 2
}

fn run_one(spec: &WalkSpec, model: &ContinuumModel, eps: f64, t_final: f64, init: &InitialState, exec: Execution) -> Result<ConvergenceRow> {
    let s = spec.with_epsilon(eps);
    let law = s.scaling();
    let exact = t_final / law.time_per_step();
    let n_steps = exact.round() as usize;
    let snapped = (exact - n_steps as f64).abs() > 1e-9;
    let time = n_steps as f64 * law.time_per_step();

    let stepper = Stepper::new(&s, exec)?;
    let sigma = init.sigma2.sqrt();
    let need = required_sites(stepper.shifts_per_step(), n_steps, sigma, law.dx);
    let n_sites = even_at_least(need.max((40.0 * sigma / law.dx).ceil() as usize));

    let psi0 = gaussian_init(n_sites, law.dx, init.mu_x, init.sigma2, init.spinor)?;
    let mut walk = psi0.clone();
    for _ in 0..n_steps {
        stepper.step(&mut walk);
    }
    let cont = evolve_continuum(&psi0, model, time)?;
    let (rw, rc) = (density(&walk), density(&cont));
    let sq: f64 = rw.rho.iter().zip(&rc.rho).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(ConvergenceRow {
        epsilon: eps,
        n_steps,
        time,
        snapped,
        n_sites,
        dx: law.dx,
        l2_error: (sq / law.dx).sqrt(),
        wrapped: n_sites < need,
    })
}

/// Walk versus exact continuum evolution at each epsilon (run in parallel).
/// Step counts are `t_final / (2 eps)`, rounded when not integral.
pub fn convergence_study(
    spec: &WalkSpec,
    eps_list: &[f64],
    t_final: f64,
    initial: &InitialState,
    exec: Execution,
) -> Result<ConvergenceTable> {
    require_finite("t_final", t_final)?;
    if t_final < 0.0 {
        return Err(invalid("t_final", "must be >= 0"));
    }
    if eps_list.is_empty() || eps_list.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(invalid("eps_list", "values must be positive and finite"));
    }
    let model = ContinuumModel::from_spec(spec)?;
    let rows = exec::map(exec, eps_list, |&e| run_one(spec, &model, e, t_final, initial, Execution::Sequential));
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let strictly_decreasing = rows.windows(2).all(|w| w[1].l2_error < w[0].l2_error);
    Ok(ConvergenceTable {
        rows,
        strictly_decreasing,
    })
}
