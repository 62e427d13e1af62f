//! `biharm` — experiment driver for the forward and inverse biharmonic
//! source problem.
//!
//! ```text
//! biharm <subcommand> [--config <path>] [--out <dir>] [--seed <u64>]
//! ```
//!
//! Subcommands: `eig`, `forward`, `reconstruct`, `sweep`, `scan-resolvent`,
//! `check`.  Exit codes: 0 success, 1 invariant/internal failure, 2 invalid
//! configuration or usage, 3 near-resonance.

use biharm::error::Error;
use biharm::harness::{check, report, ExperimentConfig};
use biharm::harness::{emit_forward, load_datasets, Experiment};
use std::path::PathBuf;
use std::process::ExitCode;

struct Args {
    subcommand: String,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
}

fn parse_args() -> Result<Args, String> {
    let mut argv = std::env::args().skip(1);
    let subcommand = argv.next().ok_or_else(usage)?;
    let mut args = Args {
        subcommand,
        config: None,
        out: None,
        seed: None,
    };
    while let Some(flag) = argv.next() {
        match flag.as_str() {
            "--config" => {
                let v = argv.next().ok_or("--config needs a path".to_string())?;
                args.config = Some(PathBuf::from(v));
            }
            "--out" => {
                let v = argv.next().ok_or("--out needs a directory".to_string())?;
                args.out = Some(PathBuf::from(v));
            }
            "--seed" => {
                let v = argv.next().ok_or("--seed needs a value".to_string())?;
                args.seed = Some(v.parse().map_err(|e| format!("bad --seed: {e}"))?);
            }
            other => return Err(format!("unknown flag `{other}`\n{}", usage())),
        }
    }
    Ok(args)
}

fn usage() -> String {
    "usage: biharm <eig|forward|reconstruct|sweep|scan-resolvent|check> \
     [--config <path>] [--out <dir>] [--seed <u64>]"
        .to_string()
}

fn init_threads() {
    if let Ok(value) = std::env::var("BIHARM_THREADS") {
        if let Ok(n) = value.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn run(args: Args) -> Result<(), Error> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let out_dir = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&config.output_dir));

    match args.subcommand.as_str() {
        "check" => {
            let results = check::run_checks(&config)?;
            let mut failed = 0usize;
            for r in &results {
                let mark = if r.passed { "PASS" } else { "FAIL" };
                if r.detail.is_empty() {
                    println!("[{mark}] {}", r.name);
                } else {
                    println!("[{mark}] {} ({})", r.name, r.detail);
                }
                failed += usize::from(!r.passed);
            }
            if failed > 0 {
                return Err(Error::Consistency(format!("{failed} invariant(s) failed")));
            }
            println!("all {} invariants passed", results.len());
            Ok(())
        }
        "eig" => {
            let experiment = Experiment::prepare(config)?;
            let rows = experiment.run_eig();
            report::ensure_dir(&out_dir)?;
            report::write_eig_csv(&out_dir.join("eig.csv"), &rows)?;
            println!(
                "wrote {} eigenpairs to {}",
                rows.len(),
                out_dir.join("eig.csv").display()
            );
            Ok(())
        }
        "forward" => {
            let experiment = Experiment::prepare(config)?;
            report::ensure_dir(&out_dir)?;
            emit_forward(&experiment, &out_dir)?;
            println!("wrote boundary datasets to {}", out_dir.display());
            Ok(())
        }
        "reconstruct" => {
            let experiment = Experiment::prepare(config)?;
            let datasets = load_datasets(&out_dir)?;
            let indices = experiment.requested_indices()?;
            let truncation = *indices.iter().max().unwrap();
            let result = experiment.run_reconstruct(truncation, &datasets)?;
            report::write_reconstruction(&out_dir, &result)?;
            println!(
                "recovered {} coefficients; discrepancy_sq = {:.6e}",
                result.recovered.len(),
                result.discrepancy_sq
            );
            Ok(())
        }
        "sweep" => {
            let experiment = Experiment::prepare(config)?;
            let rows = experiment.run_sweep()?;
            report::ensure_dir(&out_dir)?;
            report::write_sweep_csv(&out_dir.join("stability_sweep.csv"), &rows)?;
            println!(
                "wrote {} sweep rows to {}",
                rows.len(),
                out_dir.join("stability_sweep.csv").display()
            );
            Ok(())
        }
        "scan-resolvent" => {
            let experiment = Experiment::prepare(config)?;
            let points = experiment.run_scan()?;
            report::ensure_dir(&out_dir)?;
            report::write_scan_csv(&out_dir.join("resolvent_scan.csv"), &points)?;
            let violations = points
                .iter()
                .filter(|p| p.in_omega_delta && !p.bound_satisfied)
                .count();
            println!(
                "scanned {} wavenumbers, {} in-region violation(s)",
                points.len(),
                violations
            );
            Ok(())
        }
        other => Err(Error::invalid(format!(
            "unknown subcommand `{other}`\n{}",
            usage()
        ))),
    }
}

fn main() -> ExitCode {
    init_threads();
    let args = match parse_args() {
        Ok(args) => args,
        Err(message) => {
            eprintln!("{message}");
            return ExitCode::from(2);
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
