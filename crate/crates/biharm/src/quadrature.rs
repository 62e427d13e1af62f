//! Quadrature rules on the sphere `|x| = R` and the ball `|x| <= R`.
//!
//! Both are product Gauss rules: Gauss-Legendre in `cos(theta)` crossed with
//! a uniform grid in `phi`, and for the ball an additional Gauss-Legendre
//! rule in the radius with the `r^2` Jacobian folded into the weights.
//! Boundary data is always sampled at the sphere-rule nodes, so the
//! recovery integrals over the sphere need no interpolation.

use crate::error::{Error, Result};
use crate::specfun::gauss_legendre;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

/// Whether a rule integrates over the boundary sphere or the solid ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RuleKind {
    Sphere,
    Ball,
}

/// Nodes and weights of a product rule, together with the measure they
/// carry (surface area on the sphere, volume on the ball).
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub kind: RuleKind,
    pub radius: f64,
    /// Largest spherical-harmonic degree integrated exactly on the angular
    /// factor.
    pub exactness: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Apply the rule to a function of the node position.
    pub fn integrate(&self, mut f: impl FnMut(&[f64; 3]) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(x))
            .sum()
    }

    /// Write the rule as CSV rows `x,y,z,w,kind`.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "x,y,z,w,kind")?;
        let kind = match self.kind {
            RuleKind::Sphere => "sphere",
            RuleKind::Ball => "ball",
        };
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            writeln!(out, "{},{},{},{},{kind}", x[0], x[1], x[2], w)?;
        }
        Ok(())
    }
}

/// Product rule on the sphere of radius `R`: `n_theta` Gauss-Legendre
/// points in `cos(theta)` times `n_phi` uniform points in `phi`.
///
/// Integrates every spherical harmonic with `l < min(2 n_theta, n_phi)`
/// exactly; weights sum to `4 pi R^2`.
pub fn sphere_rule(radius: f64, n_theta: usize, n_phi: usize) -> Result<QuadratureRule> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::invalid(format!(
            "sphere_rule: radius must be positive, got {radius}"
        )));
    }
    if n_theta < 2 || n_phi < 4 {
        return Err(Error::invalid(format!(
            "sphere_rule: need n_theta >= 2 and n_phi >= 4, got ({n_theta}, {n_phi})"
        )));
    }
    let gl = gauss_legendre(n_theta)?;
    let dphi = 2.0 * PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(n_theta * n_phi);
    let mut weights = Vec::with_capacity(n_theta * n_phi);
    for &(ct, wt) in &gl {
        let st = (1.0 - ct * ct).sqrt();
        for k in 0..n_phi {
            let phi = dphi * k as f64;
            nodes.push([
                radius * st * phi.cos(),
                radius * st * phi.sin(),
                radius * ct,
            ]);
            weights.push(radius * radius * wt * dphi);
        }
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        kind: RuleKind::Sphere,
        radius,
        exactness: (2 * n_theta).min(n_phi) - 1,
    })
}

/// Product rule on the ball of radius `R`: Gauss-Legendre in the radius,
/// mapped to `[0, R]` with the `r^2` Jacobian, times a unit sphere rule.
///
/// Weights sum to `4 pi R^3 / 3`.
pub fn ball_rule(radius: f64, n_r: usize, n_theta: usize, n_phi: usize) -> Result<QuadratureRule> {
    shell_rule(0.0, radius, n_r, n_theta, n_phi)
}

/// Ball rule restricted to the radial shell `a < |x| < b`; `ball_rule` is
/// the special case `a = 0`.  Exposed for volume cross-checks.
pub fn shell_rule(
    r_min: f64,
    r_max: f64,
    n_r: usize,
    n_theta: usize,
    n_phi: usize,
) -> Result<QuadratureRule> {
    if !(r_max.is_finite() && r_max > 0.0 && r_min >= 0.0 && r_min < r_max) {
        return Err(Error::invalid(format!(
            "shell_rule: need 0 <= r_min < r_max, got ({r_min}, {r_max})"
        )));
    }
    if n_r < 2 {
        return Err(Error::invalid(format!(
            "ball_rule: need n_r >= 2, got {n_r}"
        )));
    }
    let sphere = sphere_rule(1.0, n_theta, n_phi)?;
    let gl = gauss_legendre(n_r)?;
    let half = 0.5 * (r_max - r_min);
    let mid = 0.5 * (r_max + r_min);
    let mut nodes = Vec::with_capacity(n_r * sphere.len());
    let mut weights = Vec::with_capacity(n_r * sphere.len());
    for &(t, wr) in &gl {
        let r = mid + half * t;
        let radial_w = half * wr * r * r;
        for (dir, wa) in sphere.nodes.iter().zip(&sphere.weights) {
            nodes.push([r * dir[0], r * dir[1], r * dir[2]]);
            weights.push(radial_w * wa);
        }
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        kind: RuleKind::Ball,
        radius: r_max,
        exactness: sphere.exactness,
    })
}
