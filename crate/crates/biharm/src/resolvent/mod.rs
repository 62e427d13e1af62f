//! Free biharmonic resolvent kernel, the Nystrom forward solver, and the
//! resonance-free-region diagnostics.

mod forward;
mod kernel;
mod system;

pub use forward::{
    evaluate_field, solve_forward, BoundaryDataset, ForwardField, ManufacturedBump,
    NEAR_RESONANCE_COND,
};
pub use kernel::{dist_to_spectrum, free_kernel, laplacian_free_kernel, ComplexWavenumber, Region};
pub use system::{
    hs_bound_shape, hs_norm_estimate, resonance_region_check, vr0_norm_estimate, KernelSystem,
    OmegaDelta, ResonancePoint,
};
