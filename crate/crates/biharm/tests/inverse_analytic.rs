//! Inverse-pipeline invariants on quadrature-free (analytically projected)
//! boundary data.

mod common;

use biharm::inverse::{reconstruct, recover_coefficient};
use biharm::quadrature::{ball_rule, sphere_rule};
use biharm::resolvent::{solve_forward, ComplexWavenumber};
use biharm::spectral::{navier_eigenpairs_free, sample_combination, PotentialSpec};
use common::analytic_dataset;

#[test]
fn analytic_oracle_matches_forward_pipeline() {
    let sphere = sphere_rule(1.0, 16, 32).unwrap();
    let grid = ball_rule(1.0, 24, 16, 32).unwrap();
    let pairs = navier_eigenpairs_free(1.0, 2, 2, &sphere).unwrap();
    let coeffs = [0.7, 0.0, -0.3];
    let kappa = pairs[0].kappa;
    let oracle = analytic_dataset(&coeffs, &pairs, kappa, &sphere);
    let f = sample_combination(&coeffs, &pairs, &grid.nodes).unwrap();
    let lam = ComplexWavenumber::real(kappa).unwrap();
    let numeric = solve_forward(&f, &PotentialSpec::none(), lam, &grid, &sphere)
        .unwrap()
        .into_dataset()
        .unwrap();
    let scale = oracle
        .u_values
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    for i in 0..sphere.len() {
        assert!(
            (oracle.u_values[i] - numeric.u_values[i]).norm() < 1e-4 * scale,
            "u mismatch at node {i}"
        );
    }
    let lap_scale = oracle
        .lap_u_values
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    for i in 0..sphere.len() {
        assert!(
            (oracle.lap_u_values[i] - numeric.lap_u_values[i]).norm() < 1e-2 * lap_scale,
            "lap mismatch at node {i}"
        );
    }
}

#[test]
fn reconstruction_is_identity_on_the_eigenbasis() {
    let sphere = sphere_rule(1.0, 12, 24).unwrap();
    let pairs = navier_eigenpairs_free(1.0, 3, 3, &sphere).unwrap();
    for target in [0usize, 2, 5] {
        let mut coeffs = vec![0.0; target + 1];
        coeffs[target] = 1.0;
        for (j, pair) in pairs.iter().take(10).enumerate() {
            let data = analytic_dataset(&coeffs, &pairs, pair.kappa, &sphere);
            let got = recover_coefficient(&data, pair, &sphere).unwrap();
            let want = if j == target { 1.0 } else { 0.0 };
            assert!(
                (got - want).abs() < 1e-9,
                "target {target}, probe {j}: recovered {got}"
            );
        }
    }
}

#[test]
fn parseval_sum_reaches_the_band_energy() {
    let sphere = sphere_rule(1.0, 12, 24).unwrap();
    let pairs = navier_eigenpairs_free(1.0, 3, 3, &sphere).unwrap();
    let truth = [1.0, 0.5, -0.25, 0.1, 0.05];
    let energy: f64 = truth.iter().map(|c| c * c).sum();
    // Distinct wavenumbers among the first five modes.
    let mut kappas: Vec<f64> = Vec::new();
    for p in pairs.iter().take(truth.len()) {
        if kappas.iter().all(|&k| (k - p.kappa).abs() > 1e-9) {
            kappas.push(p.kappa);
        }
    }
    let datasets: Vec<_> = kappas
        .iter()
        .map(|&k| analytic_dataset(&truth, &pairs, k, &sphere))
        .collect();
    let mut partial = 0.0;
    for (n, pair) in pairs.iter().take(truth.len()).enumerate() {
        let ds = datasets
            .iter()
            .find(|d| (d.kappa - pair.kappa).abs() < 1e-9)
            .unwrap();
        let est = recover_coefficient(ds, pair, &sphere).unwrap();
        partial += est * est;
        if n + 1 == truth.len() {
            assert!(
                (partial - energy).abs() < 1e-6,
                "band energy {partial} vs {energy}"
            );
        } else {
            assert!(partial <= energy + 1e-9);
        }
    }
}

#[test]
fn noise_part_of_discrepancy_scales_quadratically() {
    // The delta-dependent part of the weighted data norm is the noise
    // energy E ||noisy - clean||^2, which scales as delta^2; averaged over
    // ten seeds the ratio between delta = 1e-2 and 1e-3 must be 100 within
    // 20 percent.
    use biharm::harness::rng::SplitMix64;
    use biharm::inverse::data_norm_sq;
    use biharm::resolvent::BoundaryDataset;

    let sphere = sphere_rule(1.0, 12, 24).unwrap();
    let pairs = navier_eigenpairs_free(1.0, 3, 3, &sphere).unwrap();
    let truth = [1.0, 0.5, -0.25, 0.1, 0.05];
    let mut kappas: Vec<f64> = Vec::new();
    for p in pairs.iter().take(truth.len()) {
        if kappas.iter().all(|&k| (k - p.kappa).abs() > 1e-9) {
            kappas.push(p.kappa);
        }
    }
    let clean: Vec<BoundaryDataset> = kappas
        .iter()
        .map(|&k| analytic_dataset(&truth, &pairs, k, &sphere))
        .collect();
    let noise_disc_sq = |delta: f64| -> f64 {
        let mut total = 0.0;
        for seed in 0..10u64 {
            for (i, ds) in clean.iter().enumerate() {
                let noisy = ds
                    .clone()
                    .with_noise(delta, SplitMix64::child(seed, i as u64).next_u64())
                    .unwrap();
                let diff = BoundaryDataset {
                    kappa: ds.kappa,
                    u_values: ds
                        .u_values
                        .iter()
                        .zip(&noisy.u_values)
                        .map(|(a, b)| b - a)
                        .collect(),
                    lap_u_values: ds
                        .lap_u_values
                        .iter()
                        .zip(&noisy.lap_u_values)
                        .map(|(a, b)| b - a)
                        .collect(),
                    noise_level: delta,
                    seed: 0,
                };
                total += data_norm_sq(&diff, &sphere, true);
            }
        }
        total / 10.0
    };
    let low = noise_disc_sq(1e-3);
    let high = noise_disc_sq(1e-2);
    let ratio = high / low;
    assert!(
        (ratio - 100.0).abs() <= 20.0,
        "delta^2 scaling ratio {ratio} outside 100 +- 20%"
    );
}

#[test]
fn noiseless_error_is_non_increasing_in_truncation() {
    let sphere = sphere_rule(1.0, 12, 24).unwrap();
    let pairs = navier_eigenpairs_free(1.0, 3, 3, &sphere).unwrap();
    let truth = [1.0, 0.5, -0.25, 0.1, 0.05, 0.04, -0.03, 0.02, -0.015, 0.01];
    let mut kappas: Vec<f64> = Vec::new();
    for p in pairs.iter().take(truth.len()) {
        if kappas.iter().all(|&k| (k - p.kappa).abs() > 1e-9) {
            kappas.push(p.kappa);
        }
    }
    let datasets: Vec<_> = kappas
        .iter()
        .map(|&k| analytic_dataset(&truth, &pairs, k, &sphere))
        .collect();
    let mut prev = f64::INFINITY;
    for n in 1..=10usize {
        let res = reconstruct(&datasets, &pairs, n, Some(&truth), &sphere, true).unwrap();
        let err = res.l2_error_sq.unwrap();
        assert!(
            err <= prev + 1e-12,
            "error increased at N = {n}: {prev} -> {err}"
        );
        prev = err;
    }
    assert!(prev < 1e-12, "final squared error {prev}");
}
