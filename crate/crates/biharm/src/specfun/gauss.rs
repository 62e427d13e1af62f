//! Gauss-Legendre quadrature on [-1, 1].
//!
//! Nodes are the roots of the Legendre polynomial `P_n`, found by Newton
//! iteration from the Chebyshev-like initial guess; weights follow from
//! `w_i = 2 / ((1 - x_i^2) P_n'(x_i)^2)`.  Only half the nodes are solved,
//! the rest come from mirroring, so the rule is symmetric to the last bit.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Maximum supported rule size.
pub const GL_N_MAX: usize = 512;

/// Gauss-Legendre nodes and weights on [-1, 1], sorted ascending.
///
/// Exact for polynomials of degree `2n - 1`; weights are positive and sum
/// to 2.
pub fn gauss_legendre(n: usize) -> Result<Vec<(f64, f64)>> {
    if n == 0 || n > GL_N_MAX {
        return Err(Error::invalid(format!(
            "gauss_legendre: n = {n} outside 1..={GL_N_MAX}"
        )));
    }
    let mut rule = vec![(0.0f64, 0.0f64); n];
    let half = n / 2;
    for i in 0..half {
        // i-th root counted from +1 downward.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            let step = p / d;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule[n - 1 - i] = (x, w);
        rule[i] = (-x, w);
    }
    if n % 2 == 1 {
        // Center node at exactly zero.
        let (_, d) = legendre_and_derivative(n, 0.0);
        rule[half] = (0.0, 2.0 / (d * d));
    }
    Ok(rule)
}

/// `(P_n(x), P_n'(x))` via the three-term recurrence.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p_curr = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let p_next = ((2 * k + 1) as f64 * x * p_curr - k as f64 * p_prev) / (k + 1) as f64;
        p_prev = p_curr;
        p_curr = p_next;
    }
    let d = n as f64 * (x * p_curr - p_prev) / (x * x - 1.0);
    (p_curr, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_point_rule_is_midpoint() {
        let r = gauss_legendre(1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].0, 0.0);
        assert!((r[0].1 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_point_rule() {
        let r = gauss_legendre(2).unwrap();
        assert!((r[0].0 + 0.5773502692).abs() < 1e-10);
        assert!((r[1].0 - 0.5773502692).abs() < 1e-10);
        assert!((r[0].1 - 1.0).abs() < 1e-14);
        assert!((r[1].1 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quartic_is_exact_with_three_points() {
        let r = gauss_legendre(3).unwrap();
        let integral: f64 = r.iter().map(|&(x, w)| w * x.powi(4)).sum();
        assert!((integral - 0.4).abs() < 1e-14);
    }

    #[test]
    fn weights_positive_sum_to_two_nodes_sorted() {
        for &n in &[1usize, 2, 3, 7, 16, 33, 64, 128, 512] {
            let r = gauss_legendre(n).unwrap();
            let sum: f64 = r.iter().map(|&(_, w)| w).sum();
            assert!((sum - 2.0).abs() < 1e-14, "n={n}: weight sum {sum}");
            for (i, &(x, w)) in r.iter().enumerate() {
                assert!(w > 0.0);
                if i > 0 {
                    assert!(x > r[i - 1].0);
                }
            }
        }
    }

    #[test]
    fn exactness_degree_2n_minus_1() {
        for &n in &[4usize, 9, 20] {
            let r = gauss_legendre(n).unwrap();
            for d in 0..(2 * n) {
                let integral: f64 = r.iter().map(|&(x, w)| w * x.powi(d as i32)).sum();
                let exact = if d % 2 == 0 {
                    2.0 / (d as f64 + 1.0)
                } else {
                    0.0
                };
                assert!(
                    (integral - exact).abs() < 1e-13,
                    "n={n}, degree {d}: {integral} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(gauss_legendre(0).is_err());
        assert!(gauss_legendre(513).is_err());
    }
}
