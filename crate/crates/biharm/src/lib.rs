//! Forward and inverse source solvers for the perturbed biharmonic operator
//! `(Lap^2 + V - kappa^4) u = f` on a ball, driven by boundary data
//! `u` and `Lap u` on the sphere at many wavenumbers.
//!
//! The layers, bottom up:
//!
//! * [`specfun`] — spherical Bessel functions and their zeros, real
//!   spherical harmonics, Gauss-Legendre rules.
//! * [`quadrature`] — product rules on the measurement sphere and the ball.
//! * [`spectral`] — the Navier eigenbasis of `Lap^2 + V` with analytic
//!   boundary traces; Galerkin projection for nonzero potentials.
//! * [`resolvent`] — the free-resolvent kernel, the Nystrom forward solver,
//!   and the resonance-free-region diagnostics.
//! * [`inverse`] — per-mode coefficient recovery from boundary data,
//!   truncation sweeps, tail and analytic-continuation bounds.
//! * [`harness`] — experiment configs, seeded noise, CSV/JSON artifacts,
//!   and the drivers behind the `biharm` binary.
//!
//! The [`guide`] module carries the book chapters; their code blocks run
//! under `cargo test --doc`.

pub mod error;
pub mod guide;
pub mod harness;
pub mod inverse;
pub(crate) mod linalg;
pub mod quadrature;
pub mod resolvent;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
