//! Experiment configuration: one JSON file per experiment.

use crate::error::{Error, Result};
use crate::inverse::{ContinuationParams, SourceSpec};
use crate::resolvent::OmegaDelta;
use crate::spectral::PotentialSpec;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadratureSizes {
    pub n_r: usize,
    pub n_theta: usize,
    pub n_phi: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BasisSizes {
    pub l_max: usize,
    pub n_max: usize,
    /// Galerkin basis size for the perturbed eigenproblem.
    pub galerkin_j: usize,
}

/// Which wavenumbers carry data: sorted eigen-mode indices (1-based), or a
/// real band sampled uniformly.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WavenumberSelection {
    EigenIndices(Vec<usize>),
    Band { min: f64, max: f64, count: usize },
}

/// Rectangular complex-plane grid for the resolvent scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanConfig {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub re_steps: usize,
    pub im_steps: usize,
    /// Resonance-free-region membership constants.
    pub omega: OmegaDelta,
    /// Grid used for the scan operators (coarser than the data grid).
    pub quadrature: QuadratureSizes,
}

/// Low band plus test points for the continuation-inequality report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContinuationConfig {
    pub params: ContinuationParams,
    /// Grid points approximating the low-band supremum.
    pub band_points: usize,
    pub test_kappas: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub radius: f64,
    pub potential: PotentialSpec,
    pub source: SourceSpec,
    pub quadrature: QuadratureSizes,
    pub basis: BasisSizes,
    pub wavenumbers: WavenumberSelection,
    pub noise_level: f64,
    pub seed: u64,
    pub output_dir: String,
    /// Use the `V = 0` data-norm weights; defaults to whether the potential
    /// vanishes.
    #[serde(default)]
    pub v_zero_weights: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuation: Option<ContinuationConfig>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            radius: 1.0,
            potential: PotentialSpec::none(),
            source: SourceSpec::from_coefficients(vec![1.0, 0.5, -0.25, 0.1, 0.05], 2, 2.0),
            quadrature: QuadratureSizes {
                n_r: 24,
                n_theta: 12,
                n_phi: 24,
            },
            basis: BasisSizes {
                l_max: 8,
                n_max: 6,
                galerkin_j: 60,
            },
            wavenumbers: WavenumberSelection::EigenIndices(vec![1, 2, 3, 4, 5]),
            noise_level: 0.0,
            seed: 1,
            output_dir: "out".to_string(),
            v_zero_weights: None,
            scan: None,
            continuation: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn effective_v_zero_weights(&self) -> bool {
        self.v_zero_weights
            .unwrap_or_else(|| self.potential.is_zero())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::config(
                "radius",
                format!("must be positive, got {}", self.radius),
            ));
        }
        self.potential
            .validate(self.radius)
            .map_err(|e| Error::config("potential", e.to_string()))?;
        self.source
            .validate()
            .map_err(|e| Error::config("source", e.to_string()))?;
        validate_sizes("quadrature", &self.quadrature)?;
        if self.basis.l_max > 30 {
            return Err(Error::config("basis.l_max", "must be <= 30".to_string()));
        }
        if self.basis.n_max == 0 || self.basis.n_max > 100 {
            return Err(Error::config(
                "basis.n_max",
                "must lie in 1..=100".to_string(),
            ));
        }
        if self.basis.galerkin_j == 0 {
            return Err(Error::config(
                "basis.galerkin_j",
                "must be >= 1".to_string(),
            ));
        }
        match &self.wavenumbers {
            WavenumberSelection::EigenIndices(idx) => {
                if idx.is_empty() {
                    return Err(Error::config(
                        "wavenumbers",
                        "eigen index list is empty".to_string(),
                    ));
                }
                if idx.iter().any(|&j| j == 0) {
                    return Err(Error::config(
                        "wavenumbers",
                        "eigen indices are 1-based".to_string(),
                    ));
                }
            }
            WavenumberSelection::Band { min, max, count } => {
                if !(*min > 0.0 && max > min) {
                    return Err(Error::config(
                        "wavenumbers.band",
                        format!("need 0 < min < max, got [{min}, {max}]"),
                    ));
                }
                if *count == 0 {
                    return Err(Error::config(
                        "wavenumbers.band.count",
                        "must be >= 1".to_string(),
                    ));
                }
            }
        }
        if !(self.noise_level >= 0.0 && self.noise_level.is_finite()) {
            return Err(Error::config(
                "noise_level",
                format!("must be finite and >= 0, got {}", self.noise_level),
            ));
        }
        if self.output_dir.is_empty() {
            return Err(Error::config("output_dir", "must not be empty".to_string()));
        }
        if let Some(scan) = &self.scan {
            if !(scan.re_max >= scan.re_min && scan.im_max >= scan.im_min) {
                return Err(Error::config(
                    "scan",
                    "grid bounds are not ordered".to_string(),
                ));
            }
            if scan.re_steps == 0 || scan.im_steps == 0 {
                return Err(Error::config("scan.steps", "must be >= 1".to_string()));
            }
            scan.omega
                .validate(self.radius)
                .map_err(|e| Error::config("scan.omega", e.to_string()))?;
            validate_sizes("scan.quadrature", &scan.quadrature)?;
        }
        if let Some(cont) = &self.continuation {
            cont.params
                .validate()
                .map_err(|e| Error::config("continuation.params", e.to_string()))?;
            if cont.band_points < 2 {
                return Err(Error::config(
                    "continuation.band_points",
                    "must be >= 2".to_string(),
                ));
            }
            if cont.test_kappas.is_empty() {
                return Err(Error::config(
                    "continuation.test_kappas",
                    "must not be empty".to_string(),
                ));
            }
        }
        Ok(())
    }
}

fn validate_sizes(field: &str, q: &QuadratureSizes) -> Result<()> {
    if q.n_r < 2 || q.n_r > 512 {
        return Err(Error::config(
            format!("{field}.n_r"),
            "must lie in 2..=512".to_string(),
        ));
    }
    if q.n_theta < 2 || q.n_theta > 512 {
        return Err(Error::config(
            format!("{field}.n_theta"),
            "must lie in 2..=512".to_string(),
        ));
    }
    if q.n_phi < 4 || q.n_phi > 2048 {
        return Err(Error::config(
            format!("{field}.n_phi"),
            "must lie in 4..=2048".to_string(),
        ));
    }
    Ok(())
}
