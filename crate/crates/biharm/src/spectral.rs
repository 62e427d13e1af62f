//! Navier eigenpairs of `Lap^2 + V` on the ball `B_R`.
//!
//! With `V = 0` the eigenpairs are analytic: the eigenfunctions are the
//! Dirichlet Laplacian modes
//!
//! ```text
//! phi_{lmn}(x) = c_{ln} j_l(alpha_{ln} r / R) Y_{lm}(x / r),
//! ```
//!
//! where `alpha_{ln}` is the n-th positive zero of `j_l`, the eigenvalue is
//! `lambda = (alpha/R)^4` and the wavenumber `kappa = alpha/R`.  The
//! normalization `c_{ln} = sqrt(2/R^3) / |j_{l+1}(alpha_{ln})|` gives unit
//! L^2 norm on the ball.  Because each mode satisfies
//! `Lap phi = -kappa^2 phi`, its boundary traces obey
//! `d_nu(Lap phi) = -kappa^2 d_nu phi` identically — the arrays are built
//! from that same expression, not recomputed.
//!
//! With `V != 0` the pairs come from a Galerkin projection onto the free
//! basis: the matrix `M = diag(lambda_j) + G`, `G_jk = int V phi_j phi_k`,
//! is assembled with a ball rule and diagonalized.  Boundary traces of the
//! perturbed modes are then exact linear combinations of the analytic free
//! traces, so no numerical differentiation happens at the boundary.

use crate::error::{Error, Result};
use crate::linalg::sym_eigen;
use crate::quadrature::{QuadratureRule, RuleKind};
use crate::specfun::{
    bessel_zeros_upto, real_harmonics_upto, spherical_bessel_j, spherical_bessel_j_prime,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Zeroth-order potential added to the biharmonic operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    /// `V = 0` everywhere.
    None,
    /// `V(r) = amplitude (1 - r^2/s^2)^4` for `r < s`, zero outside; C^3
    /// across the support edge.
    RadialBump,
    /// `V = amplitude` on the whole ball.  Deliberately not compactly
    /// supported; used to validate the diagonal shift `mu_j = lambda_j + c`.
    ConstantTest,
}

/// Nonnegative potential specification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub amplitude: f64,
    pub support_radius: f64,
}

impl PotentialSpec {
    pub fn none() -> Self {
        PotentialSpec {
            kind: PotentialKind::None,
            amplitude: 0.0,
            support_radius: 0.0,
        }
    }

    pub fn radial_bump(amplitude: f64, support_radius: f64) -> Self {
        PotentialSpec {
            kind: PotentialKind::RadialBump,
            amplitude,
            support_radius,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, PotentialKind::None) || self.amplitude == 0.0
    }

    pub fn validate(&self, radius: f64) -> Result<()> {
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(Error::invalid(format!(
                "potential amplitude must be finite and >= 0, got {}",
                self.amplitude
            )));
        }
        if matches!(self.kind, PotentialKind::RadialBump)
            && !(self.support_radius > 0.0 && self.support_radius < radius)
        {
            return Err(Error::invalid(format!(
                "radial bump support radius must lie in (0, {radius}), got {}",
                self.support_radius
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64; 3]) -> f64 {
        match self.kind {
            PotentialKind::None => 0.0,
            PotentialKind::ConstantTest => self.amplitude,
            PotentialKind::RadialBump => {
                let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                let s2 = self.support_radius * self.support_radius;
                if r2 >= s2 {
                    0.0
                } else {
                    let t = 1.0 - r2 / s2;
                    self.amplitude * t * t * t * t
                }
            }
        }
    }
}

/// How an eigenfunction is represented.
#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    /// Analytic free mode `(l, m, n)` with its zero `alpha_{ln}` and
    /// normalization constant.
    Free {
        l: usize,
        m: i64,
        n: usize,
        alpha: f64,
        norm_c: f64,
    },
    /// Expansion coefficients over the free basis used at construction.
    Expansion { coeffs: Vec<f64> },
}

/// One Navier eigenpair, with boundary traces precomputed at the nodes of
/// the sphere rule passed at construction.
#[derive(Debug, Clone)]
pub struct EigenPair {
    /// Eigenvalue of `Lap^2 + V`.
    pub mu: f64,
    /// Wavenumber `mu^{1/4}`.
    pub kappa: f64,
    pub radius: f64,
    pub mode: Mode,
    /// `d_nu phi` at the sphere-rule nodes.
    pub norm_trace: Vec<f64>,
    /// `d_nu (Lap phi)` at the sphere-rule nodes.
    pub lap_trace: Vec<f64>,
}

impl EigenPair {
    pub fn is_free(&self) -> bool {
        matches!(self.mode, Mode::Free { .. })
    }

    /// `(l, m, n)` of a free mode, or of the dominant expansion component.
    pub fn mode_indices(&self, basis: &[EigenPair]) -> (usize, i64, usize) {
        match &self.mode {
            Mode::Free { l, m, n, .. } => (*l, *m, *n),
            Mode::Expansion { coeffs } => {
                let mut best = 0usize;
                for (j, c) in coeffs.iter().enumerate() {
                    if c.abs() > coeffs[best].abs() {
                        best = j;
                    }
                }
                basis
                    .get(best)
                    .map(|p| p.mode_indices(&[]))
                    .unwrap_or((0, 0, 0))
            }
        }
    }
}

fn spherical_angles(x: &[f64; 3]) -> (f64, f64, f64) {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if r == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    ((x[2] / r).clamp(-1.0, 1.0).acos(), x[1].atan2(x[0]), r)
}

fn check_sphere_rule(rule: &QuadratureRule, radius: f64) -> Result<()> {
    if rule.kind != RuleKind::Sphere {
        return Err(Error::invalid("expected a sphere rule".to_string()));
    }
    if (rule.radius - radius).abs() > 1e-12 * radius.max(1.0) {
        return Err(Error::invalid(format!(
            "sphere rule radius {} does not match eigenproblem radius {radius}",
            rule.radius
        )));
    }
    Ok(())
}

/// Free Navier eigenpairs on `B_R`, every `(l, m, n)` with `l <= l_max`,
/// `n <= n_max`, sorted by `(mu, l, m)`.  Boundary traces are evaluated at
/// the nodes of `sphere`.
pub fn navier_eigenpairs_free(
    radius: f64,
    l_max: usize,
    n_max: usize,
    sphere: &QuadratureRule,
) -> Result<Vec<EigenPair>> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::invalid(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if l_max > 30 {
        return Err(Error::invalid(format!("l_max = {l_max} exceeds 30")));
    }
    if n_max == 0 || n_max > 100 {
        return Err(Error::invalid(format!("n_max = {n_max} outside 1..=100")));
    }
    check_sphere_rule(sphere, radius)?;

    let zeros = bessel_zeros_upto(l_max, n_max)?;
    // Harmonic table per node, shared by all modes.
    let tables: Vec<Vec<f64>> = sphere
        .nodes
        .par_iter()
        .map(|x| {
            let (theta, phi, _) = spherical_angles(x);
            real_harmonics_upto(l_max, theta, phi).expect("theta in range by construction")
        })
        .collect();

    struct Level {
        l: usize,
        n: usize,
        alpha: f64,
        kappa: f64,
        mu: f64,
        norm_c: f64,
    }
    let mut levels = Vec::new();
    for l in 0..=l_max {
        for n in 1..=n_max {
            let alpha = zeros[l][n - 1];
            let kappa = alpha / radius;
            let mu = kappa * kappa * kappa * kappa;
            let norm_c =
                (2.0 / (radius * radius * radius)).sqrt() / spherical_bessel_j(l + 1, alpha)?.abs();
            levels.push(Level {
                l,
                n,
                alpha,
                kappa,
                mu,
                norm_c,
            });
        }
    }
    levels.sort_by(|a, b| a.mu.partial_cmp(&b.mu).unwrap().then(a.l.cmp(&b.l)));

    let mut pairs = Vec::with_capacity(levels.len());
    for lev in &levels {
        // d_nu phi on the boundary: c (alpha/R) j_l'(alpha) Y_lm.
        let dj = spherical_bessel_j_prime(lev.l, lev.alpha)?;
        let trace_pref = lev.norm_c * lev.kappa * dj;
        let k2 = lev.kappa * lev.kappa;
        for m in -(lev.l as i64)..=(lev.l as i64) {
            let idx = (lev.l * (lev.l + 1)) as i64 + m;
            let norm_trace: Vec<f64> = tables
                .iter()
                .map(|t| trace_pref * t[idx as usize])
                .collect();
            let lap_trace: Vec<f64> = norm_trace.iter().map(|&t| -(k2 * t)).collect();
            pairs.push(EigenPair {
                mu: lev.mu,
                kappa: lev.kappa,
                radius,
                mode: Mode::Free {
                    l: lev.l,
                    m,
                    n: lev.n,
                    alpha: lev.alpha,
                    norm_c: lev.norm_c,
                },
                norm_trace,
                lap_trace,
            });
        }
    }
    Ok(pairs)
}

/// Boundary traces `(d_nu phi, d_nu(Lap phi))` of a pair at the nodes of
/// `rule`.  Free modes are evaluated analytically; expansion modes return
/// the traces fixed at construction and require the same rule size.
pub fn boundary_traces(pair: &EigenPair, rule: &QuadratureRule) -> Result<(Vec<f64>, Vec<f64>)> {
    check_sphere_rule(rule, pair.radius)?;
    match &pair.mode {
        Mode::Free {
            l,
            m,
            alpha,
            norm_c,
            ..
        } => {
            let dj = spherical_bessel_j_prime(*l, *alpha)?;
            let pref = norm_c * pair.kappa * dj;
            let k2 = pair.kappa * pair.kappa;
            let idx = (l * (l + 1)) as i64 + m;
            let mut norm_trace = Vec::with_capacity(rule.len());
            for x in &rule.nodes {
                let (theta, phi, _) = spherical_angles(x);
                let y = real_harmonics_upto(*l, theta, phi)?[idx as usize];
                norm_trace.push(pref * y);
            }
            let lap_trace = norm_trace.iter().map(|&t| -(k2 * t)).collect();
            Ok((norm_trace, lap_trace))
        }
        Mode::Expansion { .. } => {
            if pair.norm_trace.len() != rule.len() {
                return Err(Error::invalid(
                    "expansion pair traces were built on a different sphere rule".to_string(),
                ));
            }
            Ok((pair.norm_trace.clone(), pair.lap_trace.clone()))
        }
    }
}

/// Values of every free-basis eigenfunction at the given points, laid out
/// point-major: `out[p * basis.len() + j] = phi_j(points[p])`.
pub fn sample_free_basis(basis: &[EigenPair], points: &[[f64; 3]]) -> Result<Vec<f64>> {
    struct Level {
        l: usize,
        alpha: f64,
        norm_c: f64,
        members: Vec<(usize, i64)>,
    }
    let mut levels: Vec<Level> = Vec::new();
    let mut l_max = 0usize;
    let mut radius = None;
    for (j, pair) in basis.iter().enumerate() {
        let Mode::Free {
            l,
            m,
            alpha,
            norm_c,
            ..
        } = pair.mode
        else {
            return Err(Error::invalid(
                "sample_free_basis requires free-mode pairs".to_string(),
            ));
        };
        match radius {
            None => radius = Some(pair.radius),
            Some(r) if (r - pair.radius).abs() > 1e-12 * r.max(1.0) => {
                return Err(Error::invalid(
                    "basis pairs live on different radii".to_string(),
                ))
            }
            _ => {}
        }
        l_max = l_max.max(l);
        if let Some(level) = levels
            .iter_mut()
            .find(|lev| lev.l == l && lev.alpha == alpha)
        {
            level.members.push((j, m));
        } else {
            levels.push(Level {
                l,
                alpha,
                norm_c,
                members: vec![(j, m)],
            });
        }
    }
    let radius = radius.ok_or_else(|| Error::invalid("empty basis".to_string()))?;
    let j_count = basis.len();

    let columns: Vec<Vec<f64>> = points
        .par_iter()
        .map(|x| {
            let (theta, phi, r) = spherical_angles(x);
            let table = real_harmonics_upto(l_max, theta, phi).expect("theta in range");
            let mut col = vec![0.0f64; j_count];
            for lev in &levels {
                let radial = lev.norm_c
                    * spherical_bessel_j(lev.l, lev.alpha * r / radius)
                        .expect("argument in documented range");
                for &(j, m) in &lev.members {
                    let idx = (lev.l * (lev.l + 1)) as i64 + m;
                    col[j] = radial * table[idx as usize];
                }
            }
            col
        })
        .collect();

    let mut out = vec![0.0f64; points.len() * j_count];
    for (p, col) in columns.into_iter().enumerate() {
        out[p * j_count..(p + 1) * j_count].copy_from_slice(&col);
    }
    Ok(out)
}

/// Values at `points` of the combination `sum_j coeffs[j] phi_j` over the
/// free basis.
pub fn sample_combination(
    coeffs: &[f64],
    basis: &[EigenPair],
    points: &[[f64; 3]],
) -> Result<Vec<f64>> {
    if coeffs.len() > basis.len() {
        return Err(Error::invalid(format!(
            "{} coefficients but only {} basis modes",
            coeffs.len(),
            basis.len()
        )));
    }
    let phi = sample_free_basis(&basis[..coeffs.len()], points)?;
    let j = coeffs.len();
    Ok((0..points.len())
        .map(|p| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * phi[p * j + k])
                .sum()
        })
        .collect())
}

/// Values of one eigenpair at `points`; expansion modes need the basis they
/// were built over.
pub fn sample_pair(pair: &EigenPair, basis: &[EigenPair], points: &[[f64; 3]]) -> Result<Vec<f64>> {
    match &pair.mode {
        Mode::Free { .. } => {
            let phi = sample_free_basis(std::slice::from_ref(pair), points)?;
            Ok(phi)
        }
        Mode::Expansion { coeffs } => sample_combination(coeffs, basis, points),
    }
}

/// Galerkin eigenpairs of `Lap^2 + V` in the span of `basis`, lowest
/// `count` of them.  The stiffness matrix `diag(lambda) + G` with
/// `G_jk = int_B V phi_j phi_k` is assembled with `ball` and diagonalized;
/// boundary traces are the coefficient-weighted free traces.
pub fn navier_eigenpairs_perturbed(
    potential: &PotentialSpec,
    radius: f64,
    basis: &[EigenPair],
    count: usize,
    ball: &QuadratureRule,
) -> Result<Vec<EigenPair>> {
    if count == 0 {
        return Err(Error::invalid("count must be >= 1".to_string()));
    }
    if basis.len() < 4 * count {
        return Err(Error::invalid(format!(
            "basis size {} below the 4x heuristic for count = {count}",
            basis.len()
        )));
    }
    if ball.kind != RuleKind::Ball || (ball.radius - radius).abs() > 1e-12 * radius.max(1.0) {
        return Err(Error::invalid(
            "perturbed eigenproblem needs a ball rule on the same radius".to_string(),
        ));
    }
    potential.validate(radius)?;
    let trace_len = basis.first().map(|p| p.norm_trace.len()).unwrap_or(0);
    if basis
        .iter()
        .any(|p| !p.is_free() || p.norm_trace.len() != trace_len)
    {
        return Err(Error::invalid(
            "basis must be free pairs with traces on a common sphere rule".to_string(),
        ));
    }

    let j_count = basis.len();
    let v_weighted: Vec<f64> = ball
        .nodes
        .iter()
        .zip(&ball.weights)
        .map(|(x, w)| {
            let v = potential.eval(x);
            debug_assert!(v.is_finite() && v >= 0.0);
            v * w
        })
        .collect();
    // Only nodes inside the support contribute to G.
    let active: Vec<usize> = (0..ball.len()).filter(|&q| v_weighted[q] != 0.0).collect();

    let phi = sample_free_basis(basis, &ball.nodes)?;
    let mut g = vec![0.0f64; j_count * j_count];
    g.par_chunks_mut(j_count).enumerate().for_each(|(j, row)| {
        for k in 0..j_count {
            let mut s = 0.0;
            for &q in &active {
                s += v_weighted[q] * phi[q * j_count + j] * phi[q * j_count + k];
            }
            row[k] = s;
        }
    });

    let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut max_asym = 0.0f64;
    for j in 0..j_count {
        for k in (j + 1)..j_count {
            max_asym = max_asym.max((g[j * j_count + k] - g[k * j_count + j]).abs());
        }
    }
    if max_asym > 1e-10 * scale {
        return Err(Error::Consistency(format!(
            "Galerkin matrix asymmetry {max_asym:e} exceeds tolerance"
        )));
    }
    for j in 0..j_count {
        for k in (j + 1)..j_count {
            let avg = 0.5 * (g[j * j_count + k] + g[k * j_count + j]);
            g[j * j_count + k] = avg;
            g[k * j_count + j] = avg;
        }
    }
    for j in 0..j_count {
        g[j * j_count + j] += basis[j].mu;
    }

    let (vals, vecs) = sym_eigen(&g, j_count);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let mu = vals[k];
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::Consistency(format!(
                "Galerkin eigenvalue {k} is not positive: {mu}"
            )));
        }
        let mut coeffs: Vec<f64> = (0..j_count).map(|j| vecs[j * j_count + k]).collect();
        // Fix the sign so the dominant coefficient is positive.
        let mut dom = 0usize;
        for (j, c) in coeffs.iter().enumerate() {
            if c.abs() > coeffs[dom].abs() {
                dom = j;
            }
        }
        if coeffs[dom] < 0.0 {
            for c in &mut coeffs {
                *c = -*c;
            }
        }
        let mut norm_trace = vec![0.0f64; trace_len];
        let mut lap_trace = vec![0.0f64; trace_len];
        for (j, c) in coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            for i in 0..trace_len {
                norm_trace[i] += c * basis[j].norm_trace[i];
                lap_trace[i] += c * basis[j].lap_trace[i];
            }
        }
        out.push(EigenPair {
            mu,
            kappa: mu.powf(0.25),
            radius,
            mode: Mode::Expansion { coeffs },
            norm_trace,
            lap_trace,
        });
    }
    Ok(out)
}

/// Weyl-law diagnostics for a sorted eigenvalue list.
#[derive(Debug, Clone, Copy)]
pub struct WeylReport {
    /// `min_n mu_n / n^{4/3}`.
    pub e1: f64,
    /// `max_n mu_n / n^{4/3}`.
    pub e2: f64,
    /// Least-squares slope of `log mu_n` against `log n`.
    pub fitted_exponent: f64,
}

pub fn weyl_check(pairs: &[EigenPair]) -> Result<WeylReport> {
    if pairs.len() < 50 {
        return Err(Error::invalid(format!(
            "weyl_check needs at least 50 eigenvalues, got {}",
            pairs.len()
        )));
    }
    let mut e1 = f64::INFINITY;
    let mut e2 = 0.0f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let count = pairs.len() as f64;
    for (i, p) in pairs.iter().enumerate() {
        let n = (i + 1) as f64;
        let ratio = p.mu / n.powf(4.0 / 3.0);
        e1 = e1.min(ratio);
        e2 = e2.max(ratio);
        let (x, y) = (n.ln(), p.mu.ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let fitted_exponent = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    Ok(WeylReport {
        e1,
        e2,
        fitted_exponent,
    })
}

/// Per-mode boundary-trace growth ratios.
#[derive(Debug, Clone)]
pub struct TraceGrowthReport {
    /// `(index, kappa, norm_ratio, lap_ratio)` per mode, where
    /// `norm_ratio = ||d_nu phi|| / kappa^p` with `p = 1` for free modes and
    /// `p = 2` for perturbed ones, and `lap_ratio = ||d_nu(Lap phi)|| / kappa^4`.
    pub rows: Vec<(usize, f64, f64, f64)>,
    pub max_norm_ratio: f64,
    pub max_lap_ratio: f64,
}

pub fn trace_growth_check(pairs: &[EigenPair], rule: &QuadratureRule) -> Result<TraceGrowthReport> {
    let mut rows = Vec::with_capacity(pairs.len());
    let mut max_norm_ratio = 0.0f64;
    let mut max_lap_ratio = 0.0f64;
    for (i, pair) in pairs.iter().enumerate() {
        if pair.norm_trace.len() != rule.len() {
            return Err(Error::invalid(format!(
                "pair {i} traces do not match the rule size"
            )));
        }
        let norm = l2_boundary_norm(&pair.norm_trace, rule);
        let lap = l2_boundary_norm(&pair.lap_trace, rule);
        let p = if pair.is_free() { 1 } else { 2 };
        let norm_ratio = norm / pair.kappa.powi(p);
        let lap_ratio = lap / pair.kappa.powi(4);
        max_norm_ratio = max_norm_ratio.max(norm_ratio);
        max_lap_ratio = max_lap_ratio.max(lap_ratio);
        rows.push((i + 1, pair.kappa, norm_ratio, lap_ratio));
    }
    Ok(TraceGrowthReport {
        rows,
        max_norm_ratio,
        max_lap_ratio,
    })
}

/// `L^2(boundary)` norm of nodal values under the rule weights.
pub fn l2_boundary_norm(values: &[f64], rule: &QuadratureRule) -> f64 {
    values
        .iter()
        .zip(&rule.weights)
        .map(|(v, w)| w * v * v)
        .sum::<f64>()
        .sqrt()
}
