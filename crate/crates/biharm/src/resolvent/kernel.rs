//! Free biharmonic resolvent kernel and spectral-distance formulas.
//!
//! The kernel of `(Lap^2 - lambda^4)^{-1}` with outgoing behavior splits
//! into a Helmholtz part and an exponentially decaying part,
//!
//! ```text
//! K(lambda, r) = (e^{i lambda r} - e^{-lambda r}) / (8 pi lambda^2 r),
//! ```
//!
//! which is bounded at `r = 0` with limit `(1+i)/(8 pi lambda)`.  The image
//! under the Laplacian keeps a genuine `1/r` singularity:
//! `-(e^{i lambda r} + e^{-lambda r}) / (8 pi r)`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Which part of the complex plane a wavenumber sits in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Open first quadrant, where `lambda^4` sweeps `C \ [0, inf)`.
    Quadrant1,
    Other,
}

/// Nonzero complex wavenumber `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexWavenumber {
    pub lambda: Complex64,
}

impl ComplexWavenumber {
    pub fn new(lambda: Complex64) -> Result<Self> {
        if lambda == Complex64::new(0.0, 0.0) || !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(Error::invalid(
                "wavenumber must be nonzero and finite (lambda = 0 is the simple pole of the kernel)"
                    .to_string(),
            ));
        }
        Ok(ComplexWavenumber { lambda })
    }

    /// Real positive wavenumber on the physical axis.
    pub fn real(kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::invalid(format!(
                "real wavenumber must be positive, got {kappa}"
            )));
        }
        Self::new(Complex64::new(kappa, 0.0))
    }

    pub fn region(&self) -> Region {
        if self.lambda.re > 0.0 && self.lambda.im > 0.0 {
            Region::Quadrant1
        } else {
            Region::Other
        }
    }
}

/// `(e^{iw} - e^{-w}) / w`, entire in `w`; series near the origin, direct
/// exponentials elsewhere.
fn exp_difference_ratio(w: Complex64) -> Complex64 {
    if w.norm() < 0.5 {
        // sum_{k>=1} d_k w^{k-1} / k!  with d_k cycling (1+i, -2, 1-i, 0).
        let d = [
            Complex64::new(1.0, 1.0),
            Complex64::new(-2.0, 0.0),
            Complex64::new(1.0, -1.0),
            Complex64::new(0.0, 0.0),
        ];
        let mut term = Complex64::new(1.0, 0.0); // w^{k-1} / k! at k = 1
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 1..=20 {
            sum += d[(k - 1) % 4] * term;
            term = term * w / (k as f64 + 1.0);
        }
        sum
    } else {
        ((Complex64::i() * w).exp() - (-w).exp()) / w
    }
}

/// Free-resolvent kernel as a function of the distance `r = |x - y|`.
///
/// Continuous in `r`, with the removable-singularity value
/// `(1+i)/(8 pi lambda)` at `r = 0`.
pub fn free_kernel(lambda: &ComplexWavenumber, r: f64) -> Complex64 {
    kernel_value(lambda.lambda, r)
}

/// Unchecked kernel evaluation for assembly loops.
#[inline]
pub(crate) fn kernel_value(lambda: Complex64, r: f64) -> Complex64 {
    exp_difference_ratio(lambda * r) / (8.0 * PI * lambda)
}

/// `Lap_x` of the free kernel away from the diagonal:
/// `-(e^{i lambda r} + e^{-lambda r}) / (8 pi r)`.  Singular as `1/r`.
pub fn laplacian_free_kernel(lambda: &ComplexWavenumber, r: f64) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(Error::invalid(format!(
            "laplacian_free_kernel needs r > 0, got {r}"
        )));
    }
    Ok(laplacian_kernel_value(lambda.lambda, r))
}

#[inline]
pub(crate) fn laplacian_kernel_value(lambda: Complex64, r: f64) -> Complex64 {
    let w = lambda * r;
    -((Complex64::i() * w).exp() + (-w).exp()) / (8.0 * PI * r)
}

/// Distance from `lambda^4` to the ray `[0, inf)`, via the closed case
/// split on the sign of `Re(lambda^4)`.
pub fn dist_to_spectrum(lambda: &ComplexWavenumber) -> f64 {
    let x = lambda.lambda.re;
    let y = lambda.lambda.im;
    let x2 = x * x;
    let y2 = y * y;
    let re4 = x2 * x2 + y2 * y2 - 6.0 * x2 * y2;
    if re4 >= 0.0 {
        (4.0 * x * y * (x2 - y2)).abs()
    } else {
        let m2 = x2 + y2;
        m2 * m2
    }
}
