//! Experiment orchestration: configs, seeded noise, CSV emission, sweeps,
//! and the invariant suite behind `biharm check`.

pub mod check;
pub mod config;
pub mod report;
pub mod rng;
pub mod run;

pub use config::{
    BasisSizes, ContinuationConfig, ExperimentConfig, QuadratureSizes, ScanConfig,
    WavenumberSelection,
};
pub use run::{emit_forward, load_datasets, Experiment};
