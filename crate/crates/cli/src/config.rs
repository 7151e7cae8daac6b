use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tqw_core::continuum::{GeneralCoinFamily, DEFAULT_TOL};
use tqw_core::observables::BlochAngles;
use tqw_core::{Complex64 as C64, Variant, WalkSpec};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Simulate,
    Spectrum,
    Constraints,
    Converge,
    EntropyScan,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Simulate => "simulate",
            Kind::Spectrum => "spectrum",
            Kind::Constraints => "constraints",
            Kind::Converge => "converge",
            Kind::EntropyScan => "entropy-scan",
        }
    }
}

/// One experiment, as read from a JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub walk: WalkConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialConfig>,
    #[serde(default)]
    pub lattice: LatticeConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub constraints: ConstraintsConfig,
    #[serde(default)]
    pub convergence: ConvergenceConfig,
    #[serde(default)]
    pub entropy_scan: EntropyScanConfig,
    /// Seeds random wavenumbers and random Bloch points.
    #[serde(default)]
    pub seed: u64,
    /// Used when no `--out` is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkConfig {
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
    #[serde(default = "yes")]
    pub scale_twist: bool,
}

fn yes() -> bool {
    true
}

impl WalkConfig {
    pub fn spec(&self) -> WalkSpec {
        WalkSpec {
            variant: self.variant.clone(),
            alpha1: self.alpha1,
            theta: self.theta,
            theta1: self.theta1,
            mass: self.mass,
            epsilon: self.epsilon,
            scale_twist: self.scale_twist,
        }
    }
}

/// Gaussian packet; give exactly one of `bloch` and `spinor`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default)]
    pub mu_x: f64,
    pub sigma2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bloch: Option<BlochAngles>,
    /// `[[re, im], [re, im]]`, normalized on use.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spinor: Option<[[f64; 2]; 2]>,
}

impl InitialConfig {
    pub fn spinor(&self) -> Option<[C64; 2]> {
        match (&self.bloch, &self.spinor) {
            (Some(b), None) => Some(b.spinor()),
            (None, Some(s)) => Some([C64::new(s[0][0], s[0][1]), C64::new(s[1][0], s[1][1])]),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    /// Defaults to the wrap-free size for the run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_sites: Option<usize>,
    pub steps: usize,
    /// Record observables every `stride` steps.
    pub stride: usize,
    /// Also write the density at each recorded step.
    pub write_density: bool,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig {
            n_sites: None,
            steps: 0,
            stride: 1,
            write_density: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub k_points: usize,
    pub zero_tol: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            k_points: 1001,
            zero_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstraintsConfig {
    /// Explicit coin family; when absent the walk block is checked.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<GeneralCoinFamily>,
    pub tolerance: f64,
    /// Strictly decreasing epsilons for the residual sequence.
    pub epsilons: Vec<f64>,
    /// Physical wavenumbers; when absent `random_k` are drawn from `[-k_range, k_range]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_values: Option<Vec<f64>>,
    pub random_k: usize,
    pub k_range: f64,
}

impl Default for ConstraintsConfig {
    fn default() -> Self {
        ConstraintsConfig {
            family: None,
            tolerance: DEFAULT_TOL,
            epsilons: vec![1e-2, 1e-3, 1e-4],
            k_values: None,
            random_k: 10,
            k_range: 3.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub epsilons: Vec<f64>,
    pub t_final: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig {
            epsilons: vec![0.04, 0.01, 0.0025],
            t_final: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntropyScanConfig {
    /// Grid of `resolution x resolution` Bloch angles.
    pub resolution: usize,
    /// Draw this many uniform points on the sphere instead of the grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random_points: Option<usize>,
    pub steps: usize,
}

impl Default for EntropyScanConfig {
    fn default() -> Self {
        EntropyScanConfig {
            resolution: 20,
            random_points: None,
            steps: 300,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Canonical serialization, used for the echo and the hash.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_are_rejected() {
        let e = ExperimentConfig::from_json(r#"{"kind":"spectrum","walk":{"variant":"yy","epsilon":1,"alpha":1}}"#);
        assert!(matches!(e, Err(CliError::Schema(_))));
        let e = ExperimentConfig::from_json(r#"{"kind":"spectrum","walk":{"variant":"yy","epsilon":1},"steps":3}"#);
        assert!(matches!(e, Err(CliError::Schema(_))));
    }

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_json(r#"{"kind":"entropy-scan","walk":{"variant":"xi","epsilon":0.01}}"#).unwrap();
        assert!(c.walk.scale_twist);
        assert_eq!(c.spectrum.k_points, 1001);
        assert_eq!(c.entropy_scan.resolution, 20);
        assert_eq!(c.kind.name(), "entropy-scan");
    }

    #[test]
    fn echo_round_trips() {
        let c = ExperimentConfig::from_json(
            r#"{"kind":"constraints","walk":{"variant":"yy","alpha1":1,"epsilon":0.01},
                "constraints":{"family":{"alpha":{"delta":1,"theta0":0,"theta_half":0.5,"phi":0,"zeta":0},
                "beta":{"delta":0,"theta0":0,"theta_half":0.5,"phi":0,"zeta":0},"twist":0}}}"#,
        )
        .unwrap();
        assert_eq!(ExperimentConfig::from_json(&c.to_json()).unwrap(), c);
    }
}
