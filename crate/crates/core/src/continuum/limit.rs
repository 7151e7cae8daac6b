use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::Mat2;
use crate::error::{invalid, Result};
use crate::walk::WalkSpec;

use super::constraints::{check_constraints, GeneralCoinFamily, DEFAULT_TOL};
use super::model::ContinuumModel;

/// Residuals of the small-epsilon expansion `U(eps) = I - 2 i eps H + o(eps)`
/// at one physical wavenumber, Frobenius norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub k: f64,
    pub eps: Vec<f64>,
    /// `|U(eps) - I|`.
    pub zeroth: Vec<f64>,
    /// `|(U(eps) - I)/eps + 2 i H(k)|`.
    pub first: Vec<f64>,
    /// Least-squares slope of `log zeroth` against `log eps`.
    pub zeroth_slope: Option<f64>,
    pub first_slope: Option<f64>,
    /// First residual shrinks monotonically along the sequence.
    pub converges: bool,
}

/// Slope of the least-squares line through `(ln x, ln y)`; `None` if any
/// value is non-positive or non-finite.
pub fn fit_loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    if x.iter().chain(y).any(|v| !(v.is_finite() && *v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn check_eps(eps_list: &[f64]) -> Result<()> {
    if eps_list.len() < 2 {
        return Err(invalid("eps_list", "need at least two values"));
    }
    if eps_list.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(invalid("eps_list", "values must be positive and finite"));
    }
    if eps_list.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Less)) {
        return Err(invalid("eps_list", "must be strictly decreasing"));
    }
    Ok(())
}

/// Generic form: `unitary(eps)` against a fixed continuum generator `h`.
pub fn numeric_limit_check_with<F>(unitary: F, h: Mat2, eps_list: &[f64], k: f64) -> Result<LimitReport>
where
    F: Fn(f64) -> Result<Mat2>,
{
    check_eps(eps_list)?;
    let two_i_h = h.scale(C64::new(0.0, 2.0));
    let mut zeroth = Vec::with_capacity(eps_list.len());
    let mut first = Vec::with_capacity(eps_list.len());
    for &e in eps_list {
        let d = unitary(e)? - Mat2::identity();
        zeroth.push(d.frobenius_norm());
        first.push((d.scale(C64::new(1.0 / e, 0.0)) + two_i_h).frobenius_norm());
    }
    // roundoff in U is ~1e-15, so anything below 1e-13 / eps is noise
    let floor: Vec<f64> = eps_list.iter().map(|e| 1e-13 / e).collect();
    let converges = first.iter().all(|r| r.is_finite())
        && (1..first.len()).all(|i| first[i] < first[i - 1] || first[i] < floor[i]);
    Ok(LimitReport {
        k,
        eps: eps_list.to_vec(),
        zeroth_slope: fit_loglog_slope(eps_list, &zeroth),
        first_slope: fit_loglog_slope(eps_list, &first),
        zeroth,
        first,
        converges,
    })
}

/// Residual sequence for a walk spec (epsilon replaced by each list entry)
/// against its continuum model, at physical wavenumber `k`.
///
/// For an XI spec with an unscaled twist the comparison uses the XI model
/// anyway, which is how its divergence shows up.
pub fn numeric_limit_check(spec: &WalkSpec, eps_list: &[f64], k: f64) -> Result<LimitReport> {
    let model = match ContinuumModel::from_spec(spec) {
        Ok(m) => m,
        Err(_) if !spec.scale_twist => ContinuumModel::xi(spec.alpha1, spec.theta1, spec.mass),
        Err(e) => return Err(e),
    };
    numeric_limit_check_with(
        |e| {
            let s = spec.with_epsilon(e);
            Ok(s.plan()?.bloch(e.sqrt() * k))
        },
        model.hamiltonian(k),
        eps_list,
        k,
    )
}

/// Residual sequence for a coin family against the Hamiltonian its
/// constraint report predicts.
pub fn numeric_limit_check_family(family: &GeneralCoinFamily, eps_list: &[f64], k: f64) -> Result<LimitReport> {
    let rep = check_constraints(family, DEFAULT_TOL);
    let h = rep
        .predicted
        .ok_or_else(|| invalid("family", "fails the continuum-limit constraints"))?;
    numeric_limit_check_with(
        |e| Ok(family.spec(e).plan()?.bloch(e.sqrt() * k)),
        h.at(k),
        eps_list,
        k,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn slope_of_power_law() {
        let x = [1e-2, 1e-3, 1e-4];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(0.75)).collect();
        assert!((fit_loglog_slope(&x, &y).unwrap() - 0.75).abs() < 1e-12);
        assert_eq!(fit_loglog_slope(&x, &[1.0, 0.0, 1.0]), None);
    }

    #[test]
    fn yy_zeroth_residual_is_first_order() {
        let spec = WalkSpec::yy(1.0, PI / 6.0, 0.0, 0.01);
        let rep = numeric_limit_check(&spec, &[1e-2, 1e-3, 1e-4], 1.0).unwrap();
        assert!((rep.zeroth_slope.unwrap() - 1.0).abs() < 0.05);
        assert!(rep.converges);
    }

    // leading correction is sqrt(eps): the slope tends to 1/2
    #[test]
    fn yy_first_residual_is_half_order() {
        let spec = WalkSpec::yy(1.0, PI / 6.0, 0.0, 0.01);
        let eps = [1e-4, 1e-5, 1e-6];
        let rep = numeric_limit_check(&spec, &eps, 0.8).unwrap();
        assert!((rep.first_slope.unwrap() - 0.5).abs() < 0.02, "{rep:?}");
        assert!(rep.first[2] < 1e-2);
    }

    #[test]
    fn unscaled_xi_twist_diverges() {
        let mut spec = WalkSpec::xi(0.3, 1.0, 0.0, 0.01);
        spec.scale_twist = false;
        let rep = numeric_limit_check(&spec, &[1e-2, 1e-3, 1e-4], 0.9).unwrap();
        assert!(!rep.converges);
        assert!(rep.first[2] > rep.first[0]);
        let scaled = WalkSpec::xi(0.3, 1.0, 0.0, 0.01);
        assert!(numeric_limit_check(&scaled, &[1e-2, 1e-3, 1e-4], 0.9).unwrap().converges);
    }

    #[test]
    fn trivial_family_gives_identity() {
        let spec = WalkSpec::yy(0.0, 0.0, 0.0, 0.01);
        let rep = numeric_limit_check(&spec, &[1e-2, 1e-3, 1e-4], 0.7).unwrap();
        assert!(rep.zeroth.iter().all(|r| *r < 1e-14));
        // roundoff divided by eps
        assert!(rep.first.iter().all(|r| *r < 1e-10));
        assert!(rep.converges);
    }

    #[test]
    fn rejects_bad_eps_list() {
        let spec = WalkSpec::yy(1.0, 0.3, 0.0, 0.01);
        assert!(numeric_limit_check(&spec, &[1e-3, 1e-2], 1.0).is_err());
        assert!(numeric_limit_check(&spec, &[1e-3], 1.0).is_err());
        assert!(numeric_limit_check(&spec, &[1e-3, 0.0], 1.0).is_err());
    }
}
