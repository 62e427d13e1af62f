//! Artifact emission: CSV tables and summary JSON with stable schemas.
//!
//! All files are UTF-8 with LF line endings; floats are printed with Rust's
//! shortest round-trip formatting, so two runs with the same inputs produce
//! byte-identical artifacts.

use crate::error::Result;
use crate::inverse::ReconstructionResult;
use crate::resolvent::{BoundaryDataset, ResonancePoint};
use std::fs;
use std::io::Write;
use std::path::Path;

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

pub fn write_lines(
    path: &Path,
    header: &str,
    rows: impl IntoIterator<Item = String>,
) -> Result<()> {
    let mut out = Vec::new();
    writeln!(out, "{header}")?;
    for row in rows {
        writeln!(out, "{row}")?;
    }
    fs::write(path, out)?;
    Ok(())
}

/// `stability_sweep.csv`: one row per truncation level.
pub fn write_sweep_csv(path: &Path, rows: &[(usize, f64, f64, f64)]) -> Result<()> {
    write_lines(
        path,
        "N,discrepancy_sq,l2_error_sq,tail_bound",
        rows.iter().map(|(n, d, e, t)| format!("{n},{d},{e},{t}")),
    )
}

/// `resolvent_scan.csv`: one row per complex wavenumber sample.
pub fn write_scan_csv(path: &Path, points: &[ResonancePoint]) -> Result<()> {
    write_lines(
        path,
        "re_lambda,im_lambda,hs_estimate,vr0_norm,in_omega_delta,bound_satisfied",
        points.iter().map(|p| {
            format!(
                "{},{},{},{},{},{}",
                p.lambda.re,
                p.lambda.im,
                p.hs_estimate,
                p.vr0_norm,
                p.in_omega_delta,
                p.bound_satisfied
            )
        }),
    )
}

/// `eig.csv`: one row per eigenpair.
pub fn write_eig_csv(
    path: &Path,
    rows: &[(usize, usize, i64, usize, f64, f64, f64)],
) -> Result<()> {
    write_lines(
        path,
        "index,l,m,n,mu,kappa,trace_norm_ratio",
        rows.iter()
            .map(|(i, l, m, n, mu, k, r)| format!("{i},{l},{m},{n},{mu},{k},{r}")),
    )
}

/// Per-wavenumber boundary data file.
pub fn write_dataset_csv(path: &Path, dataset: &BoundaryDataset) -> Result<()> {
    write_lines(
        path,
        "node_index,re_u,im_u,re_lap_u,im_lap_u",
        dataset
            .u_values
            .iter()
            .zip(&dataset.lap_u_values)
            .enumerate()
            .map(|(i, (u, lap))| format!("{i},{},{},{},{}", u.re, u.im, lap.re, lap.im)),
    )
}

/// Parse a dataset file written by [`write_dataset_csv`].
pub fn read_dataset_csv(
    path: &Path,
    kappa: f64,
    noise_level: f64,
    seed: u64,
) -> Result<BoundaryDataset> {
    let text = fs::read_to_string(path)?;
    let mut u_values = Vec::new();
    let mut lap_u_values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(crate::error::Error::invalid(format!(
                "{}: line {} has {} fields, expected 5",
                path.display(),
                lineno + 1,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|e| {
                crate::error::Error::invalid(format!("{}: bad float `{s}`: {e}", path.display()))
            })
        };
        u_values.push(num_complex::Complex64::new(
            parse(fields[1])?,
            parse(fields[2])?,
        ));
        lap_u_values.push(num_complex::Complex64::new(
            parse(fields[3])?,
            parse(fields[4])?,
        ));
    }
    Ok(BoundaryDataset {
        kappa,
        u_values,
        lap_u_values,
        noise_level,
        seed,
    })
}

/// `recovered_coefficients.csv` plus `summary.json` for one reconstruction.
pub fn write_reconstruction(dir: &Path, result: &ReconstructionResult) -> Result<()> {
    write_lines(
        &dir.join("recovered_coefficients.csv"),
        "index,f_j",
        result.recovered.iter().map(|(j, c)| format!("{j},{c}")),
    )?;
    let summary = serde_json::json!({
        "n": result.truncation,
        "discrepancy_sq": result.discrepancy_sq,
        "tail_sq": result.tail_sq,
        "l2_error_sq": result.l2_error_sq,
    });
    fs::write(dir.join("summary.json"), format!("{:#}\n", summary))?;
    Ok(())
}
