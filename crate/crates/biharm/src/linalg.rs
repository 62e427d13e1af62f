//! Small dense linear-algebra kernels used by the spectral and resolvent
//! modules.  Everything here is deterministic: pivot searches are
//! sequential scans, parallel updates touch disjoint rows, and no floating
//! reduction depends on the worker count.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

/// Eigenvalues (ascending) and eigenvectors of a symmetric matrix, by
/// cyclic Jacobi rotations.  `a` is row-major `n x n`; only the symmetric
/// part is read.  Eigenvector `k` is the column `v[i*n + k]`.
///
/// Ties in the eigenvalue sort keep the pre-sort order, so a diagonal
/// input comes back with identity eigenvectors.
pub(crate) fn sym_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frob: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        if off.sqrt() <= 1e-14 * frob {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].partial_cmp(&m[j * n + j]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vectors = vec![0.0f64; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + new_col] = v[i * n + old_col];
        }
    }
    (eigenvalues, vectors)
}

/// LU factorization with partial pivoting of a dense complex matrix.
///
/// The trailing update at each elimination step runs in parallel over rows;
/// every matrix entry is written by exactly one task, so the factorization
/// is bit-identical for any worker count.
pub(crate) struct ComplexLu {
    n: usize,
    data: Vec<Complex64>,
    piv: Vec<usize>,
    norm1: f64,
}

impl ComplexLu {
    pub fn factor(mut a: Vec<Complex64>, n: usize) -> Result<Self> {
        assert_eq!(a.len(), n * n);
        let norm1 = (0..n)
            .map(|j| (0..n).map(|i| a[i * n + j].norm()).sum::<f64>())
            .fold(0.0f64, f64::max);
        let mut piv = vec![0usize; n];
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].norm();
            for i in (k + 1)..n {
                let v = a[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            piv[k] = p;
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
            }
            let pivot = a[k * n + k];
            if pivot.norm() == 0.0 {
                return Err(Error::Consistency(format!(
                    "singular matrix at elimination step {k}"
                )));
            }
            let inv = Complex64::new(1.0, 0.0) / pivot;
            for i in (k + 1)..n {
                a[i * n + k] *= inv;
            }
            let (pivot_rows, trailing) = a.split_at_mut((k + 1) * n);
            let row_k = &pivot_rows[k * n..(k + 1) * n];
            trailing.par_chunks_mut(n).for_each(|row| {
                let lik = row[k];
                if lik.norm() != 0.0 {
                    for j in (k + 1)..n {
                        row[j] -= lik * row_k[j];
                    }
                }
            });
        }
        Ok(ComplexLu {
            n,
            data: a,
            piv,
            norm1,
        })
    }

    pub fn solve(&self, b: &mut [Complex64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        for k in 0..n {
            b.swap(k, self.piv[k]);
        }
        // Ly = Pb (unit lower), then Ux = y.
        for i in 1..n {
            let mut s = b[i];
            for j in 0..i {
                s -= self.data[i * n + j] * b[j];
            }
            b[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in (i + 1)..n {
                s -= self.data[i * n + j] * b[j];
            }
            b[i] = s / self.data[i * n + i];
        }
    }

    /// Solve `A^H z = b` using the stored factors of `A`.
    pub fn solve_adjoint(&self, b: &mut [Complex64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        // A^H = U^H L^H P, so solve U^H w = b, L^H v = w, then z = P^T v.
        for i in 0..n {
            let mut s = b[i];
            for j in 0..i {
                s -= self.data[j * n + i].conj() * b[j];
            }
            b[i] = s / self.data[i * n + i].conj();
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in (i + 1)..n {
                s -= self.data[j * n + i].conj() * b[j];
            }
            b[i] = s;
        }
        for k in (0..n).rev() {
            b.swap(k, self.piv[k]);
        }
    }

    /// One-norm condition estimate `norm1(A) * est(norm1(A^-1))`, with the
    /// inverse norm estimated by a few forward/adjoint solves (Hager's
    /// method).  Deterministic by construction.
    pub fn cond1_estimate(&self) -> f64 {
        let n = self.n;
        let mut x: Vec<Complex64> = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0f64;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let mut y = x.clone();
            self.solve(&mut y);
            let norm: f64 = y.iter().map(|v| v.norm()).sum();
            est = est.max(norm);
            let xi: Vec<Complex64> = y
                .iter()
                .map(|v| {
                    if v.norm() == 0.0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        v / v.norm()
                    }
                })
                .collect();
            let mut z = xi;
            self.solve_adjoint(&mut z);
            let (mut j_best, mut z_best) = (0usize, 0.0f64);
            for (j, v) in z.iter().enumerate() {
                if v.norm() > z_best {
                    z_best = v.norm();
                    j_best = j;
                }
            }
            if j_best == last_j {
                break;
            }
            last_j = j_best;
            x = vec![Complex64::new(0.0, 0.0); n];
            x[j_best] = Complex64::new(1.0, 0.0);
        }
        self.norm1 * est
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::rng::SplitMix64;

    #[test]
    fn jacobi_on_diagonal_is_identity() {
        let n = 4;
        let mut a = vec![0.0; n * n];
        for (i, &d) in [3.0, 1.0, 1.0, 2.0].iter().enumerate() {
            a[i * n + i] = d;
        }
        let (vals, vecs) = sym_eigen(&a, n);
        assert_eq!(vals, vec![1.0, 1.0, 2.0, 3.0]);
        // Degenerate pair keeps input order: columns 0,1 are e_1,e_2.
        assert_eq!(vecs[1 * n + 0], 1.0);
        assert_eq!(vecs[2 * n + 1], 1.0);
        assert_eq!(vecs[3 * n + 2], 1.0);
        assert_eq!(vecs[0 * n + 3], 1.0);
    }

    #[test]
    fn jacobi_recovers_known_spectrum() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let a = vec![2.0, 1.0, 1.0, 2.0];
        let (vals, vecs) = sym_eigen(&a, 2);
        assert!((vals[0] - 1.0).abs() < 1e-13);
        assert!((vals[1] - 3.0).abs() < 1e-13);
        // Residual ||A v - lambda v||.
        for k in 0..2 {
            for i in 0..2 {
                let av = a[i * 2] * vecs[k] + a[i * 2 + 1] * vecs[2 + k];
                assert!((av - vals[k] * vecs[i * 2 + k]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn jacobi_residual_on_random_symmetric() {
        let n = 30;
        let mut rng = SplitMix64::new(99);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let x = rng.next_f64() - 0.5;
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
        }
        let (vals, vecs) = sym_eigen(&a, n);
        for k in 0..n {
            for i in 0..n {
                let mut av = 0.0;
                for j in 0..n {
                    av += a[i * n + j] * vecs[j * n + k];
                }
                assert!(
                    (av - vals[k] * vecs[i * n + k]).abs() < 1e-10,
                    "residual at ({i},{k})"
                );
            }
            if k > 0 {
                assert!(vals[k] >= vals[k - 1]);
            }
        }
    }

    #[test]
    fn lu_solves_random_complex_system() {
        let n = 25;
        let mut rng = SplitMix64::new(5);
        let a: Vec<Complex64> = (0..n * n)
            .map(|_| Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5))
            .collect();
        let x_true: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5))
            .collect();
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                b[i] += a[i * n + j] * x_true[j];
            }
        }
        let lu = ComplexLu::factor(a.clone(), n).unwrap();
        let mut x = b.clone();
        lu.solve(&mut x);
        for i in 0..n {
            assert!((x[i] - x_true[i]).norm() < 1e-11);
        }
        // Adjoint solve: A^H z = c.
        let mut c = x_true.clone();
        let mut z = c.clone();
        lu.solve_adjoint(&mut z);
        let mut res = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                res[i] += a[j * n + i].conj() * z[j];
            }
        }
        for i in 0..n {
            assert!((res[i] - c[i]).norm() < 1e-10);
        }
        c.clear();
    }

    #[test]
    fn condition_estimate_on_diagonal() {
        let n = 6;
        let mut a = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            a[i * n + i] = Complex64::new(10f64.powi(-(i as i32)), 0.0);
        }
        let lu = ComplexLu::factor(a, n).unwrap();
        let cond = lu.cond1_estimate();
        // True 1-norm condition is 1e5.
        assert!(cond > 1e4 && cond < 1e6, "cond estimate {cond:e}");
    }

    #[test]
    fn singular_matrix_is_reported() {
        let n = 3;
        let a = vec![Complex64::new(0.0, 0.0); n * n];
        assert!(ComplexLu::factor(a, n).is_err());
    }
}
