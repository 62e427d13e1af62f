//! Experiment drivers behind the command-line subcommands.

use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, WavenumberSelection};
use crate::harness::report;
use crate::harness::rng::SplitMix64;
use crate::inverse::{
    reconstruct, tail_bound, verify_continuation_inequality, ContinuationReport,
    ReconstructionResult,
};
use crate::quadrature::{ball_rule, sphere_rule, QuadratureRule};
use crate::resolvent::{
    resonance_region_check, solve_forward, BoundaryDataset, ComplexWavenumber, ResonancePoint,
};
use crate::spectral::{
    l2_boundary_norm, navier_eigenpairs_free, navier_eigenpairs_perturbed, sample_combination,
    EigenPair, Mode,
};
use num_complex::Complex64;
use rayon::prelude::*;
use std::path::Path;

/// Assembled quadrature rules and eigenpairs shared by the subcommands.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub sphere: QuadratureRule,
    /// Data-synthesis grid covering the full ball.
    pub ball: QuadratureRule,
    /// Free basis on the full ball.
    pub free_basis: Vec<EigenPair>,
    /// Modes the data and reconstruction refer to: the free basis when
    /// `V = 0`, Galerkin eigenpairs otherwise.
    pub pairs: Vec<EigenPair>,
}

impl Experiment {
    pub fn prepare(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let q = config.quadrature;
        let sphere = sphere_rule(config.radius, q.n_theta, q.n_phi)?;
        let ball = ball_rule(config.radius, q.n_r, q.n_theta, q.n_phi)?;
        let free_basis = navier_eigenpairs_free(
            config.radius,
            config.basis.l_max,
            config.basis.n_max,
            &sphere,
        )?;
        let pairs = if config.potential.is_zero() {
            free_basis.clone()
        } else {
            let count = match &config.wavenumbers {
                WavenumberSelection::EigenIndices(idx) => {
                    *idx.iter().max().expect("validated non-empty")
                }
                WavenumberSelection::Band { .. } => 1,
            };
            let count = count
                .max(config.source.coefficients.as_ref().map_or(0, |c| c.len()))
                .max(1);
            let j = config.basis.galerkin_j.min(free_basis.len());
            if j < 4 * count {
                return Err(Error::config(
                    "basis.galerkin_j",
                    format!(
                        "{j} modes cannot resolve {count} perturbed pairs (need >= {})",
                        4 * count
                    ),
                ));
            }
            navier_eigenpairs_perturbed(
                &config.potential,
                config.radius,
                &free_basis[..j],
                count,
                &ball,
            )?
        };
        Ok(Experiment {
            config,
            sphere,
            ball,
            free_basis,
            pairs,
        })
    }

    /// Source samples at the ball nodes, from explicit samples or from
    /// coefficients against the active modes.
    pub fn source_samples(&self) -> Result<Vec<f64>> {
        if let Some(samples) = &self.config.source.samples {
            if samples.len() != self.ball.len() {
                return Err(Error::config(
                    "source.samples",
                    format!(
                        "{} samples for a {}-node grid",
                        samples.len(),
                        self.ball.len()
                    ),
                ));
            }
            return Ok(samples.clone());
        }
        let coeffs = self
            .config
            .source
            .coefficients
            .as_ref()
            .expect("validated: coefficients or samples present");
        if coeffs.len() > self.pairs.len() {
            return Err(Error::config(
                "source.coefficients",
                format!(
                    "{} coefficients but only {} modes",
                    coeffs.len(),
                    self.pairs.len()
                ),
            ));
        }
        // Collapse to free-basis coefficients so one sampling pass serves
        // both the free and the Galerkin case.
        let mut free_coeffs = vec![0.0f64; self.free_basis.len()];
        for (j, c) in coeffs.iter().enumerate() {
            match &self.pairs[j].mode {
                Mode::Free { .. } => free_coeffs[j] += c,
                Mode::Expansion { coeffs: expansion } => {
                    for (k, e) in expansion.iter().enumerate() {
                        free_coeffs[k] += c * e;
                    }
                }
            }
        }
        sample_combination(&free_coeffs, &self.free_basis, &self.ball.nodes)
    }

    /// Distinct data wavenumbers among the first `truncation` modes.
    pub fn distinct_kappas(&self, truncation: usize) -> Vec<f64> {
        let mut kappas: Vec<f64> = Vec::new();
        for pair in self.pairs.iter().take(truncation) {
            if kappas
                .iter()
                .all(|&k| (k - pair.kappa).abs() > 1e-9 * pair.kappa.max(1.0))
            {
                kappas.push(pair.kappa);
            }
        }
        kappas
    }

    /// Forward data at every distinct wavenumber among the first
    /// `truncation` modes, with the configured noise.  Dataset `i` draws its
    /// noise from the child stream `(seed, i)`, so the set is reproducible
    /// regardless of worker count.
    pub fn synthesize_datasets(&self, truncation: usize) -> Result<Vec<BoundaryDataset>> {
        self.synthesize_at(&self.distinct_kappas(truncation))
    }

    fn synthesize_at(&self, kappas: &[f64]) -> Result<Vec<BoundaryDataset>> {
        let f = self.source_samples()?;
        let fields: Vec<Result<BoundaryDataset>> = kappas
            .par_iter()
            .enumerate()
            .map(|(i, &kappa)| {
                let lambda = ComplexWavenumber::real(kappa)?;
                let field =
                    solve_forward(&f, &self.config.potential, lambda, &self.ball, &self.sphere)?;
                field.into_dataset()?.with_noise(
                    self.config.noise_level,
                    SplitMix64::child(self.config.seed, i as u64).next_u64(),
                )
            })
            .collect();
        fields.into_iter().collect()
    }

    /// Wavenumbers carrying data under the configured selection: distinct
    /// eigen-wavenumbers for an index list, a uniform grid for a band.
    pub fn data_kappas(&self) -> Result<Vec<f64>> {
        match &self.config.wavenumbers {
            WavenumberSelection::EigenIndices(_) => {
                let indices = self.requested_indices()?;
                Ok(self.distinct_kappas(*indices.iter().max().unwrap()))
            }
            WavenumberSelection::Band { min, max, count } => Ok((0..*count)
                .map(|i| {
                    if *count == 1 {
                        *min
                    } else {
                        min + (max - min) * i as f64 / (*count - 1) as f64
                    }
                })
                .collect()),
        }
    }

    pub fn requested_indices(&self) -> Result<Vec<usize>> {
        match &self.config.wavenumbers {
            WavenumberSelection::EigenIndices(idx) => {
                let max = *idx.iter().max().unwrap();
                if max > self.pairs.len() {
                    return Err(Error::config(
                        "wavenumbers",
                        format!(
                            "index {max} exceeds the {} available modes",
                            self.pairs.len()
                        ),
                    ));
                }
                Ok(idx.clone())
            }
            WavenumberSelection::Band { .. } => Err(Error::invalid(
                "this subcommand needs eigen-mode indices, not a band".to_string(),
            )),
        }
    }

    /// Reconstruction at one truncation level, with the configured source
    /// as ground truth when it is given by coefficients.
    pub fn run_reconstruct(
        &self,
        truncation: usize,
        datasets: &[BoundaryDataset],
    ) -> Result<ReconstructionResult> {
        let truth = self.config.source.coefficients.as_deref();
        reconstruct(
            datasets,
            &self.pairs,
            truncation,
            truth,
            &self.sphere,
            self.config.effective_v_zero_weights(),
        )
    }

    /// Stability sweep: reconstruct at every configured truncation level.
    /// Levels run concurrently; the row order follows the config.
    pub fn run_sweep(&self) -> Result<Vec<(usize, f64, f64, f64)>> {
        let indices = self.requested_indices()?;
        let max_n = *indices.iter().max().unwrap();
        let datasets = self.synthesize_datasets(max_n)?;
        let rows: Vec<Result<(usize, f64, f64, f64)>> = indices
            .par_iter()
            .map(|&n| {
                let res = self.run_reconstruct(n, &datasets)?;
                let bound = tail_bound(&self.config.source, n + 1)?;
                Ok((
                    n,
                    res.discrepancy_sq,
                    res.l2_error_sq.unwrap_or(f64::NAN),
                    bound,
                ))
            })
            .collect();
        rows.into_iter().collect()
    }

    /// Eigen-table rows `(index, l, m, n, mu, kappa, trace_norm_ratio)`.
    pub fn run_eig(&self) -> Vec<(usize, usize, i64, usize, f64, f64, f64)> {
        self.pairs
            .iter()
            .enumerate()
            .map(|(i, pair)| {
                let (l, m, n) = pair.mode_indices(&self.free_basis);
                let power = if pair.is_free() { 1 } else { 2 };
                let ratio =
                    l2_boundary_norm(&pair.norm_trace, &self.sphere) / pair.kappa.powi(power);
                (i + 1, l, m, n, pair.mu, pair.kappa, ratio)
            })
            .collect()
    }

    /// Resolvent scan over the configured rectangular grid.
    pub fn run_scan(&self) -> Result<Vec<ResonancePoint>> {
        let scan = self
            .config
            .scan
            .as_ref()
            .ok_or_else(|| Error::config("scan", "missing scan section".to_string()))?;
        let grid = ball_rule(
            self.config.radius,
            scan.quadrature.n_r,
            scan.quadrature.n_theta,
            scan.quadrature.n_phi,
        )?;
        let mut samples = Vec::with_capacity(scan.re_steps * scan.im_steps);
        for i in 0..scan.im_steps {
            let im = if scan.im_steps == 1 {
                scan.im_min
            } else {
                scan.im_min + (scan.im_max - scan.im_min) * i as f64 / (scan.im_steps - 1) as f64
            };
            for j in 0..scan.re_steps {
                let re = if scan.re_steps == 1 {
                    scan.re_min
                } else {
                    scan.re_min
                        + (scan.re_max - scan.re_min) * j as f64 / (scan.re_steps - 1) as f64
                };
                samples.push(Complex64::new(re, im));
            }
        }
        resonance_region_check(&self.config.potential, &samples, &grid, &scan.omega)
    }

    /// Continuation-inequality report on forward data: low-band grid plus
    /// configured test points.
    pub fn run_continuation(&self) -> Result<(ContinuationReport, Vec<f64>)> {
        let cont = self.config.continuation.as_ref().ok_or_else(|| {
            Error::config("continuation", "missing continuation section".to_string())
        })?;
        let v_zero = self.config.effective_v_zero_weights();
        let (band_lo, band_hi) = if v_zero {
            (cont.params.eps_shift.max(1e-3), cont.params.sector_a1)
        } else {
            (
                cont.params.slab_a_tilde.max(1e-3),
                cont.params.slab_a_tilde1,
            )
        };
        if band_hi <= band_lo {
            return Err(Error::config(
                "continuation.params",
                format!("empty low band ({band_lo}, {band_hi})"),
            ));
        }
        let f = self.source_samples()?;
        let run_at = |kappa: f64| -> Result<BoundaryDataset> {
            let lambda = ComplexWavenumber::real(kappa)?;
            solve_forward(&f, &self.config.potential, lambda, &self.ball, &self.sphere)?
                .into_dataset()
        };
        let band_kappas: Vec<f64> = (0..cont.band_points)
            .map(|i| band_lo + (band_hi - band_lo) * (i as f64 + 0.5) / cont.band_points as f64)
            .collect();
        let low: Vec<Result<BoundaryDataset>> =
            band_kappas.par_iter().map(|&k| run_at(k)).collect();
        let low: Vec<BoundaryDataset> = low.into_iter().collect::<Result<_>>()?;
        let test: Vec<Result<BoundaryDataset>> =
            cont.test_kappas.par_iter().map(|&k| run_at(k)).collect();
        let test: Vec<BoundaryDataset> = test.into_iter().collect::<Result<_>>()?;
        let report = verify_continuation_inequality(
            &low,
            &test,
            &cont.params,
            self.config.source.q_bound,
            self.config.radius,
            &self.sphere,
            v_zero,
        )?;
        Ok((report, band_kappas))
    }
}

/// Write per-wavenumber dataset files and the manifest for `forward`.
pub fn emit_forward(experiment: &Experiment, out_dir: &Path) -> Result<()> {
    let kappas = experiment.data_kappas()?;
    let datasets = experiment.synthesize_at(&kappas)?;
    report::ensure_dir(out_dir)?;
    let mut manifest = Vec::new();
    for (i, ds) in datasets.iter().enumerate() {
        let name = format!("dataset_k{:04}.csv", i + 1);
        report::write_dataset_csv(&out_dir.join(&name), ds)?;
        manifest.push(format!(
            "{name},{},{},{}",
            ds.kappa, ds.noise_level, ds.seed
        ));
    }
    report::write_lines(
        &out_dir.join("datasets.csv"),
        "file,kappa,noise_level,seed",
        manifest,
    )?;
    Ok(())
}

/// Read a dataset directory written by [`emit_forward`].
pub fn load_datasets(dir: &Path) -> Result<Vec<BoundaryDataset>> {
    let manifest = std::fs::read_to_string(dir.join("datasets.csv"))?;
    let mut out = Vec::new();
    for (lineno, line) in manifest.lines().enumerate() {
        if lineno == 0 {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::invalid(format!(
                "datasets.csv line {}: expected 4 fields",
                lineno + 1
            )));
        }
        let kappa: f64 = fields[1]
            .parse()
            .map_err(|e| Error::invalid(format!("datasets.csv: bad kappa: {e}")))?;
        let noise: f64 = fields[2]
            .parse()
            .map_err(|e| Error::invalid(format!("datasets.csv: bad noise: {e}")))?;
        let seed: u64 = fields[3]
            .parse()
            .map_err(|e| Error::invalid(format!("datasets.csv: bad seed: {e}")))?;
        out.push(report::read_dataset_csv(
            &dir.join(fields[0]),
            kappa,
            noise,
            seed,
        )?);
    }
    Ok(out)
}
