//! Real spherical harmonics, orthonormal on the unit sphere.
//!
//! The basis is
//!
//! ```text
//! Y_{l,0}  = Pbar_l^0(cos th)
//! Y_{l,m}  = sqrt(2) Pbar_l^m(cos th) cos(m ph),   m > 0
//! Y_{l,-m} = sqrt(2) Pbar_l^m(cos th) sin(m ph),   m > 0
//! ```
//!
//! where `Pbar_l^m` is the fully normalized associated Legendre function,
//! evaluated by the stable (l - m) three-term recurrence.  The
//! Condon-Shortley factor is kept inside the `Pbar_m^m` seed, so some basis
//! functions differ in sign from conventions that strip it; orthonormality
//! and the addition identity `sum_m Y_{lm}^2 = (2l+1)/(4 pi)` are unaffected.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Real spherical harmonic `Y_{lm}(theta, phi)` with `|m| <= l`,
/// `0 <= theta <= pi`.
pub fn real_spherical_harmonic(l: usize, m: i64, theta: f64, phi: f64) -> Result<f64> {
    if m.unsigned_abs() as usize > l {
        return Err(Error::invalid(format!(
            "real_spherical_harmonic: |m| = {} exceeds l = {l}",
            m.unsigned_abs()
        )));
    }
    if !(0.0..=PI).contains(&theta) || !theta.is_finite() || !phi.is_finite() {
        return Err(Error::invalid(format!(
            "real_spherical_harmonic: theta must lie in [0, pi] and phi be finite, got ({theta}, {phi})"
        )));
    }
    let am = m.unsigned_abs() as usize;
    let p = normalized_assoc_legendre(l, am, theta.cos(), theta.sin());
    Ok(match m.signum() {
        0 => p,
        1 => std::f64::consts::SQRT_2 * p * (am as f64 * phi).cos(),
        _ => std::f64::consts::SQRT_2 * p * (am as f64 * phi).sin(),
    })
}

/// All `Y_{lm}` for `l <= l_max` at one direction, indexed by
/// `l*(l+1) + m` (the usual flattened ordering).
pub fn real_harmonics_upto(l_max: usize, theta: f64, phi: f64) -> Result<Vec<f64>> {
    if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
        return Err(Error::invalid(format!(
            "real_harmonics_upto: theta must lie in [0, pi] and phi be finite, got ({theta}, {phi})"
        )));
    }
    let ct = theta.cos();
    let st = theta.sin();
    let mut out = vec![0.0; (l_max + 1) * (l_max + 1)];
    // One column of Pbar per order m, extended upward in l.
    for m in 0..=l_max {
        let col = pbar_column(l_max, m, ct, st);
        let (cos_m, sin_m) = ((m as f64 * phi).cos(), (m as f64 * phi).sin());
        for l in m..=l_max {
            let base = l * (l + 1);
            let p = col[l - m];
            if m == 0 {
                out[base] = p;
            } else {
                out[(base as i64 + m as i64) as usize] = std::f64::consts::SQRT_2 * p * cos_m;
                out[(base as i64 - m as i64) as usize] = std::f64::consts::SQRT_2 * p * sin_m;
            }
        }
    }
    Ok(out)
}

fn normalized_assoc_legendre(l: usize, m: usize, ct: f64, st: f64) -> f64 {
    let col = pbar_column(l, m, ct, st);
    col[l - m]
}

/// `Pbar_l^m(ct)` for `l = m..=l_max`, in order.
fn pbar_column(l_max: usize, m: usize, ct: f64, st: f64) -> Vec<f64> {
    // Seed Pbar_m^m = (-1)^m sqrt((2m+1)!!/(2m)!! / (4 pi)) st^m, built
    // iteratively to stay in range.
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for k in 1..=m {
        pmm *= -((2 * k + 1) as f64 / (2 * k) as f64).sqrt() * st;
    }
    let mut col = Vec::with_capacity(l_max - m + 1);
    col.push(pmm);
    if l_max == m {
        return col;
    }
    let mut p_prev = pmm;
    let mut p_curr = (2.0 * m as f64 + 3.0).sqrt() * ct * pmm;
    col.push(p_curr);
    for l in (m + 2)..=l_max {
        let lf = l as f64;
        let mf = m as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b =
            (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
        let p_next = a * (ct * p_curr - b * p_prev);
        p_prev = p_curr;
        p_curr = p_next;
        col.push(p_curr);
    }
    col
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::rng::SplitMix64;

    #[test]
    fn monopole_is_constant() {
        for &(t, p) in &[(0.1, 0.3), (1.0, 2.0), (3.0, -4.0)] {
            let y = real_spherical_harmonic(0, 0, t, p).unwrap();
            assert!((y - 0.2820947918).abs() < 1e-10);
        }
    }

    #[test]
    fn dipole_axis_value() {
        let y = real_spherical_harmonic(1, 0, 0.0, 0.0).unwrap();
        assert!((y - 0.4886025119).abs() < 1e-10);
        // Closed form sqrt(3/4pi) cos(theta) along the whole axis angle.
        for &t in &[0.3, 1.1, 2.7] {
            let y = real_spherical_harmonic(1, 0, t, 0.0).unwrap();
            assert!((y - (3.0 / (4.0 * PI)).sqrt() * t.cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn addition_identity_at_random_directions() {
        // sum_m Y_lm^2 = (2l+1)/(4 pi) at 100 directions.
        let mut rng = SplitMix64::new(0x5eed_ba11);
        for _ in 0..100 {
            let theta = rng.next_f64() * PI;
            let phi = (rng.next_f64() - 0.5) * 4.0 * PI;
            for l in 0..=6usize {
                let mut sum = 0.0;
                for m in -(l as i64)..=(l as i64) {
                    let y = real_spherical_harmonic(l, m, theta, phi).unwrap();
                    sum += y * y;
                }
                let want = (2 * l + 1) as f64 / (4.0 * PI);
                assert!(
                    (sum - want).abs() < 1e-10,
                    "addition identity off at l={l}: {sum} vs {want}"
                );
            }
        }
    }

    #[test]
    fn flattened_table_matches_single_evaluations() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..20 {
            let theta = rng.next_f64() * PI;
            let phi = rng.next_f64() * 2.0 * PI;
            let table = real_harmonics_upto(8, theta, phi).unwrap();
            for l in 0..=8usize {
                for m in -(l as i64)..=(l as i64) {
                    let idx = (l * (l + 1)) as i64 + m;
                    let y = real_spherical_harmonic(l, m, theta, phi).unwrap();
                    assert!((table[idx as usize] - y).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn rejects_m_out_of_range() {
        assert!(real_spherical_harmonic(2, 3, 0.5, 0.0).is_err());
        assert!(real_spherical_harmonic(2, -3, 0.5, 0.0).is_err());
        assert!(real_spherical_harmonic(2, 1, -0.1, 0.0).is_err());
    }
}
