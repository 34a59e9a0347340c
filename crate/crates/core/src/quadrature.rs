//! One-dimensional quadrature rules and a deterministic pairwise reduction.
//!
//! [`QuadratureRule`] keeps the logarithm of every weight next to the weight
//! itself. Gauss–Hermite weights decay like `exp(-x²)` and underflow long
//! before the integrands they multiply do, so callers that integrate a bare
//! function (rather than `f(x)·exp(-x²)`) use [`QuadratureRule::envelope_weight`].

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and positive weights of an interpolatory rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    ln_weights: Vec<f64>,
}

impl QuadratureRule {
    /// Builds a rule from raw nodes and weights. Nodes must be strictly
    /// increasing and weights positive.
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let ln_weights = weights.iter().map(|w| w.ln()).collect();
        Self::from_parts(nodes, weights, ln_weights)
    }

    pub(crate) fn from_parts(nodes: Vec<f64>, weights: Vec<f64>, ln_weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() || nodes.len() != ln_weights.len() {
            return Err(Error::InvalidArgument(format!(
                "rule needs matching non-empty nodes/weights ({} vs {})",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("nodes must be strictly increasing".into()));
        }
        if ln_weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidArgument("weights must be positive".into()));
        }
        Ok(Self {
            nodes,
            weights,
            ln_weights,
        })
    }

    pub fn count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn ln_weights(&self) -> &[f64] {
        &self.ln_weights
    }

    /// `w_i · exp(x_i²)`, evaluated in log space so it stays finite even when
    /// `w_i` itself underflows.
    pub fn envelope_weight(&self, i: usize) -> f64 {
        let x = self.nodes[i];
        (self.ln_weights[i] + x * x).exp()
    }

    /// Σ wᵢ f(xᵢ).
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let terms: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).collect();
        pairwise_sum(&terms)
    }

    /// Maps a rule on `[-1, 1]` affinely onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Result<Self> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let nodes = self.nodes.iter().map(|&x| mid + half * x).collect();
        let weights: Vec<f64> = self.weights.iter().map(|&w| w * half).collect();
        let ln_half = half.ln();
        let ln_weights = self.ln_weights.iter().map(|&l| l + ln_half).collect();
        Self::from_parts(nodes, weights, ln_weights)
    }
}

/// Gauss–Legendre rule on `[-1, 1]` with `count` points, by Newton iteration
/// on the Legendre three-term recurrence.
pub fn gauss_legendre(count: usize) -> Result<QuadratureRule> {
    if count == 0 {
        return Err(Error::InvalidArgument(
            "Gauss-Legendre rule needs at least one point".into(),
        ));
    }
    let n = count;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut converged = false;
        let mut last = f64::INFINITY;
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let step = p / d;
            z -= step;
            last = step.abs();
            if last <= 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NodeSolve {
                index: i,
                count,
                last_step: last,
            });
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadratureRule::new(nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre rule on `[a, b]` with `panels` equal panels of
/// `points` nodes each.
pub fn composite_legendre(a: f64, b: f64, panels: usize, points: usize) -> Result<QuadratureRule> {
    if !(a < b) || panels == 0 {
        return Err(Error::InvalidArgument(format!(
            "composite rule needs a < b and panels > 0 (got [{a}, {b}], {panels})"
        )));
    }
    let base = gauss_legendre(points)?;
    let width = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * points);
    let mut weights = Vec::with_capacity(panels * points);
    for p in 0..panels {
        let lo = a + width * p as f64;
        let hi = if p + 1 == panels { b } else { lo + width };
        let r = base.mapped(lo, hi)?;
        nodes.extend_from_slice(r.nodes());
        weights.extend_from_slice(r.weights());
    }
    QuadratureRule::new(nodes, weights)
}

/// Composite Gauss–Legendre rule on `[a, b]` whose node density is at least
/// `density` points per unit length.
pub fn legendre_with_density(a: f64, b: f64, density: f64, points_per_panel: usize) -> Result<QuadratureRule> {
    let needed = ((b - a) * density / points_per_panel as f64).ceil().max(1.0) as usize;
    composite_legendre(a, b, needed, points_per_panel)
}

/// Pairwise (cascade) summation. The recursion splits at fixed positions, so
/// the result depends only on the order of `values`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        let mut s = 0.0;
        for v in values {
            s += v;
        }
        return s;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
