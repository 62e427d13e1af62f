//! The `check` subcommand: a fast cross-module invariant suite.
//!
//! Every invariant prints one `PASS`/`FAIL` line; the caller exits nonzero
//! if any failed.  The suite sticks to second-scale checks — the heavier
//! statements live in the acceptance test target.

use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::rng::SplitMix64;
use crate::inverse::{
    continuation_bound_beta, continuation_bound_eta, recover_coefficient, tail_bound,
    ContinuationParams, SourceSpec,
};
use crate::quadrature::{ball_rule, sphere_rule};
use crate::resolvent::{
    dist_to_spectrum, free_kernel, solve_forward, ComplexWavenumber, ManufacturedBump,
};
use crate::specfun::{bessel_zero, bessel_zeros_upto, gauss_legendre, real_spherical_harmonic};
use crate::spectral::{navier_eigenpairs_free, sample_free_basis, PotentialSpec};
use num_complex::Complex64;
use std::f64::consts::PI;

pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn record(results: &mut Vec<CheckOutcome>, name: &'static str, passed: bool, detail: String) {
    results.push(CheckOutcome {
        name,
        passed,
        detail,
    });
}

/// Run the invariant suite for one configuration.
pub fn run_checks(config: &ExperimentConfig) -> Result<Vec<CheckOutcome>> {
    let mut results = Vec::new();

    // Bessel zeros: golden values and interlacing.
    {
        let z11 = bessel_zero(1, 1)?.alpha;
        let z21 = bessel_zero(2, 1)?.alpha;
        let golden = (z11 - 4.4934094579).abs() < 1e-9 && (z21 - 5.7634591969).abs() < 1e-9;
        let mut npi = true;
        for n in 1..=50 {
            npi &= (bessel_zero(0, n)?.alpha - n as f64 * PI).abs() < 1e-12;
        }
        record(
            &mut results,
            "bessel zero golden values",
            golden && npi,
            format!("alpha_11 = {z11:.10}, alpha_21 = {z21:.10}"),
        );
        let rows = bessel_zeros_upto(5, 20)?;
        let mut interlaced = true;
        for l in 1..=5usize {
            for n in 0..20 {
                interlaced &= rows[l - 1][n] < rows[l][n] && rows[l][n] < rows[l - 1][n + 1];
            }
        }
        record(
            &mut results,
            "bessel zero interlacing",
            interlaced,
            String::new(),
        );
    }

    // Harmonic addition identity.
    {
        let mut rng = SplitMix64::new(11);
        let mut ok = true;
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let theta = rng.next_f64() * PI;
            let phi = rng.next_f64() * 2.0 * PI;
            for l in 0..=4usize {
                let mut sum = 0.0;
                for m in -(l as i64)..=(l as i64) {
                    let y = real_spherical_harmonic(l, m, theta, phi)?;
                    sum += y * y;
                }
                let dev = (sum - (2 * l + 1) as f64 / (4.0 * PI)).abs();
                worst = worst.max(dev);
                ok &= dev < 1e-10;
            }
        }
        record(
            &mut results,
            "spherical harmonic addition identity",
            ok,
            format!("worst deviation {worst:.2e}"),
        );
    }

    // Gauss-Legendre weight structure.
    {
        let mut ok = true;
        for &n in &[1usize, 8, 64, 512] {
            let rule = gauss_legendre(n)?;
            let sum: f64 = rule.iter().map(|&(_, w)| w).sum();
            ok &= (sum - 2.0).abs() < 1e-14 && rule.iter().all(|&(_, w)| w > 0.0);
        }
        record(&mut results, "gauss-legendre weights", ok, String::new());
    }

    // Quadrature measures.
    {
        let sphere = sphere_rule(config.radius, 8, 16)?;
        let ball = ball_rule(config.radius, 12, 8, 16)?;
        let r2 = config.radius * config.radius;
        let area: f64 = sphere.weights.iter().sum();
        let vol: f64 = ball.weights.iter().sum();
        let ok = ((area - 4.0 * PI * r2) / (4.0 * PI * r2)).abs() < 1e-12
            && ((vol - 4.0 * PI * r2 * config.radius / 3.0) / vol).abs() < 1e-12;
        record(
            &mut results,
            "quadrature measures",
            ok,
            format!("area {area:.9}, volume {vol:.9}"),
        );
    }

    // Spectral basics: first eigenvalue and trace relation.
    {
        let sphere = sphere_rule(config.radius, 8, 16)?;
        let pairs = navier_eigenpairs_free(config.radius, 4, 3, &sphere)?;
        let want = (PI / config.radius).powi(4);
        let mut ok = (pairs[0].mu - want).abs() < 1e-10 * want;
        for p in &pairs {
            let k2 = p.kappa * p.kappa;
            for (t, lt) in p.norm_trace.iter().zip(&p.lap_trace) {
                ok &= lt + k2 * t == 0.0;
            }
        }
        record(
            &mut results,
            "first eigenvalue and trace relation",
            ok,
            format!("mu_1 = {:.9}", pairs[0].mu),
        );
        // Level multiplicities 2l+1.
        let mut counts = std::collections::BTreeMap::new();
        for p in &pairs {
            let (l, _, n) = p.mode_indices(&[]);
            *counts.entry((l, n)).or_insert(0usize) += 1;
        }
        let ok = counts.iter().all(|(&(l, _), &c)| c == 2 * l + 1);
        record(&mut results, "eigenvalue multiplicities", ok, String::new());
    }

    // Spectral-distance formula against brute force.
    {
        let mut rng = SplitMix64::new(0xd157);
        let mut ok = true;
        for _ in 0..500 {
            let lam = Complex64::new(8.0 * (rng.next_f64() - 0.5), 8.0 * (rng.next_f64() - 0.5));
            if lam.norm() < 1e-6 {
                continue;
            }
            let d = dist_to_spectrum(&ComplexWavenumber::new(lam)?);
            let z = lam * lam * lam * lam;
            let b = if z.re >= 0.0 { z.im.abs() } else { z.norm() };
            ok &= (d - b).abs() <= 1e-12 * d.abs().max(b.abs()).max(1e-300);
        }
        record(&mut results, "spectral distance formula", ok, String::new());
    }

    // Kernel removable singularity.
    {
        let lam = ComplexWavenumber::new(Complex64::new(2.0, 1.0))?;
        let k0 = free_kernel(&lam, 0.0);
        let ok = (0..4).all(|i| {
            let r = 10f64.powi(-(i + 3));
            (free_kernel(&lam, r) - k0).norm() <= 0.2 * r
        });
        record(
            &mut results,
            "kernel removable singularity",
            ok,
            String::new(),
        );
    }

    // Manufactured forward solution at coarse resolution.
    {
        let grid = ball_rule(0.5 * config.radius, 16, 10, 20)?;
        let sphere = sphere_rule(config.radius, 6, 12)?;
        let kappa = 2.0 / config.radius;
        let bump = ManufacturedBump {
            rho: 0.5 * config.radius,
        };
        let f = bump.source_samples(kappa, &grid);
        let lam = ComplexWavenumber::real(kappa)?;
        let out = solve_forward(&f, &PotentialSpec::none(), lam, &grid, &sphere)?;
        let probes = vec![
            [0.1 * config.radius, 0.0, 0.0],
            [0.0, 0.2 * config.radius, 0.1 * config.radius],
        ];
        let u = crate::resolvent::evaluate_field(&out.density, &grid, &lam, &probes);
        let mut worst = 0.0f64;
        for (p, val) in probes.iter().zip(&u) {
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            worst = worst.max((val - Complex64::new(bump.psi(r), 0.0)).norm());
        }
        record(
            &mut results,
            "manufactured forward solution",
            worst < 1e-3,
            format!("worst probe error {worst:.2e}"),
        );
    }

    // Recovery identity on the ground mode, at coarse angular resolution.
    {
        let sphere = sphere_rule(config.radius, 12, 24)?;
        let grid = ball_rule(config.radius, 16, 12, 24)?;
        let pairs = navier_eigenpairs_free(config.radius, 2, 2, &sphere)?;
        let f = sample_free_basis(&pairs[..1], &grid.nodes)?;
        let lam = ComplexWavenumber::real(pairs[0].kappa)?;
        let data =
            solve_forward(&f, &PotentialSpec::none(), lam, &grid, &sphere)?.into_dataset()?;
        let coeff = recover_coefficient(&data, &pairs[0], &sphere)?;
        record(
            &mut results,
            "eigenmode recovery identity",
            (coeff - 1.0).abs() < 1e-2,
            format!("recovered {coeff:.6}"),
        );
    }

    // Continuation bound arithmetic.
    {
        let params = ContinuationParams {
            sector_a: 1.0,
            sector_a1: 1.1,
            eps_shift: 0.1,
            slab_a_tilde: -0.51,
            slab_a_tilde1: 0.49,
            slab_d: 1.0,
            c0: 1.0,
        };
        let beta_mid = continuation_bound_beta(1.15, &params)?;
        let beta_tail = continuation_bound_beta(2.1, &params)?;
        let eta_half = continuation_bound_eta(0.5, &params)?;
        let ok = beta_mid == 0.5
            && (beta_tail - 1.0 / (PI * 15f64.sqrt())).abs() < 1e-14
            && (eta_half - 64.0 / (15.0 * PI * PI)).abs() < 1e-14;
        record(
            &mut results,
            "continuation bound arithmetic",
            ok,
            String::new(),
        );
    }

    // Tail bound power law.
    {
        let src = SourceSpec::from_coefficients(vec![1.0], 2, 1.0);
        let ok = (tail_bound(&src, 8)? - 0.015625).abs() < 1e-15
            && (tail_bound(&src, 16)? / tail_bound(&src, 8)? - 0.25).abs() < 1e-15;
        record(&mut results, "tail bound power law", ok, String::new());
    }

    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_passes_every_invariant() {
        let results = run_checks(&ExperimentConfig::default()).unwrap();
        assert!(results.len() >= 10);
        for r in &results {
            assert!(r.passed, "invariant `{}` failed: {}", r.name, r.detail);
        }
    }
}
