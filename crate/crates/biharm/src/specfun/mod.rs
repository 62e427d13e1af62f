//! Closed-form special functions used throughout the crate: spherical
//! Bessel functions and their zeros, real spherical harmonics, and
//! Gauss-Legendre rules.  All operations are pure and reentrant.

mod bessel;
mod gauss;
mod harmonic;

pub use bessel::{
    bessel_zero, bessel_zeros_upto, spherical_bessel_j, spherical_bessel_j_prime, BesselZero,
    L_MAX, ZERO_N_MAX,
};
pub use gauss::{gauss_legendre, GL_N_MAX};
pub use harmonic::{real_harmonics_upto, real_spherical_harmonic};
