//! Shared test oracles, independent of the library's forward pipeline.
//!
//! For `V = 0` and an eigenmode source the boundary data has a closed
//! radial form: expanding both kernel parts in spherical harmonics turns
//! the volume integral into Lommel-type radial integrals,
//!
//! ```text
//! u(R xhat)     = Y_lm(xhat) / (2 k^2) [ i k h_l(kR) J_hel - (2k/pi) k_l(kR) J_mod ]
//! Lap u(R xhat) = -Y_lm(xhat) / 2     [ i k h_l(kR) J_hel + (2k/pi) k_l(kR) J_mod ]
//! ```
//!
//! with `J_hel = c R alpha j_l(kR) j_l'(alpha) / (k^2 - (alpha/R)^2)`
//! (removable at `k = alpha/R`) and
//! `J_mod = -c R alpha i_l(kR) j_l'(alpha) / (k^2 + (alpha/R)^2)`.

#![allow(dead_code)]

use biharm::quadrature::QuadratureRule;
use biharm::resolvent::BoundaryDataset;
use biharm::specfun::{real_spherical_harmonic, spherical_bessel_j, spherical_bessel_j_prime};
use biharm::spectral::{EigenPair, Mode};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Spherical Neumann function by upward recurrence.
pub fn sph_neumann(l: usize, x: f64) -> f64 {
    let mut ym = -x.cos() / x;
    if l == 0 {
        return ym;
    }
    let mut yc = -x.cos() / (x * x) - x.sin() / x;
    for k in 1..l {
        let yn = (2 * k + 1) as f64 / x * yc - ym;
        ym = yc;
        yc = yn;
    }
    yc
}

/// Modified spherical Bessel function of the first kind, by Miller's
/// downward recurrence normalized against `i_0 = sinh x / x`.
pub fn mod_sph_bessel_i(l: usize, x: f64) -> f64 {
    let start = l + 20 + x as usize;
    let mut fp = 0.0f64;
    let mut fc = 1e-30f64;
    let mut f_l = 0.0;
    let mut f0 = 0.0;
    for k in (0..=start).rev() {
        // i_{k} from i_{k+1}, i_{k+2}: i_k = i_{k+2} + (2k+3)/x i_{k+1}
        let fm = (2 * k + 3) as f64 / x * fc + fp;
        fp = fc;
        fc = fm;
        if k == l {
            f_l = fc;
        }
        if k == 0 {
            f0 = fc;
        }
    }
    f_l * ((x.sinh() / x) / f0)
}

/// Modified spherical Bessel function of the second kind, upward.
pub fn mod_sph_bessel_k(l: usize, x: f64) -> f64 {
    let k0 = PI / (2.0 * x) * (-x).exp();
    if l == 0 {
        return k0;
    }
    let k1 = k0 * (1.0 + 1.0 / x);
    if l == 1 {
        return k1;
    }
    let mut km = k0;
    let mut kc = k1;
    for j in 1..l {
        let kn = km + (2 * j + 1) as f64 / x * kc;
        km = kc;
        kc = kn;
    }
    kc
}

/// Closed-form radial factors `(u, Lap u)` on the sphere `|x| = R` for a
/// unit-coefficient free mode at real wavenumber `kappa`.
pub fn analytic_radial_factors(pair: &EigenPair, kappa: f64) -> (Complex64, Complex64) {
    let Mode::Free {
        l, alpha, norm_c, ..
    } = pair.mode
    else {
        panic!("analytic factors exist for free modes only")
    };
    let radius = pair.radius;
    let q = alpha / radius;
    let jp = spherical_bessel_j_prime(l, alpha).unwrap();
    let x = kappa * radius;
    let j_hel = if (kappa - q).abs() < 1e-9 * q {
        // Removable point: lim j_l(kR) / (k^2 - q^2) = R j_l'(alpha) / (2q).
        norm_c * radius.powi(3) * jp * jp / 2.0
    } else {
        norm_c * radius * alpha * spherical_bessel_j(l, x).unwrap() * jp / (kappa * kappa - q * q)
    };
    let j_mod = -norm_c * radius * alpha * mod_sph_bessel_i(l, x) * jp / (kappa * kappa + q * q);
    let hankel = Complex64::new(spherical_bessel_j(l, x).unwrap(), sph_neumann(l, x));
    let helm = Complex64::new(0.0, kappa) * hankel * j_hel;
    let evan = Complex64::new(2.0 * kappa / PI * mod_sph_bessel_k(l, x) * j_mod, 0.0);
    let u = (helm - evan) / (2.0 * kappa * kappa);
    let lap = -(helm + evan) / 2.0;
    (u, lap)
}

/// Quadrature-free boundary data for `f = sum_k coeffs[k] phi_k` with
/// `V = 0` at real wavenumber `kappa`, sampled at the sphere-rule nodes.
pub fn analytic_dataset(
    coeffs: &[f64],
    pairs: &[EigenPair],
    kappa: f64,
    sphere: &QuadratureRule,
) -> BoundaryDataset {
    let mut u_values = vec![Complex64::new(0.0, 0.0); sphere.len()];
    let mut lap_u_values = vec![Complex64::new(0.0, 0.0); sphere.len()];
    for (k, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let pair = &pairs[k];
        let Mode::Free { l, m, .. } = pair.mode else {
            panic!("analytic data needs free modes")
        };
        let (u_rad, lap_rad) = analytic_radial_factors(pair, kappa);
        for (i, node) in sphere.nodes.iter().enumerate() {
            let r = (node[0] * node[0] + node[1] * node[1] + node[2] * node[2]).sqrt();
            let theta = (node[2] / r).clamp(-1.0, 1.0).acos();
            let phi = node[1].atan2(node[0]);
            let y = real_spherical_harmonic(l, m, theta, phi).unwrap();
            u_values[i] += c * y * u_rad;
            lap_u_values[i] += c * y * lap_rad;
        }
    }
    BoundaryDataset {
        kappa,
        u_values,
        lap_u_values,
        noise_level: 0.0,
        seed: 0,
    }
}
