//! Frequency-side containers and the L² observables.
//!
//! A [`CoefficientField`] holds `û(λ_i)_{k,ℓ}` on a truncated lattice. Norms
//! are evaluated as
//!
//! ```text
//! ‖·‖²_{a,b} = c_n Σ_i w_i |λ_i|^{n+a} Σ_{k,ℓ} μ_k^b |û(λ_i)_{k,ℓ}|²
//! ```
//!
//! so `(0,0)` is `‖u‖`, `(1,1)` is `‖∇_hor u‖`, `(2,0)` is `‖Tu‖` and `(1,0)`
//! is `‖T^{1/2}u‖`. Grid weights are plain `dλ` weights; the `|λ|^n` density
//! is applied here.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::GroupParams;
use crate::hermite::{binomial, GradedBasis};
use crate::quadrature::{gauss_legendre, pairwise_sum};

/// Quadrature nodes over `λ ∈ ℝ \ {0}` with plain `dλ` weights.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    params: GroupParams,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    symmetric: bool,
}

impl FrequencyGrid {
    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Σ wᵢ f(λᵢ)
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let terms: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(&l, &w)| w * f(l)).collect();
        pairwise_sum(&terms)
    }

    /// Index of the node mirrored through zero, if the grid has one.
    pub fn mirror_of(&self, i: usize) -> Option<usize> {
        if !self.symmetric {
            return None;
        }
        Some(self.nodes.len() - 1 - i)
    }
}

/// Geometric panels on `[λ_min, λ_max]` with Gauss–Legendre points in each,
/// mirrored onto `[−λ_max, −λ_min]` when `symmetric`.
pub fn build_grid(
    params: GroupParams,
    lambda_min: f64,
    lambda_max: f64,
    panels: usize,
    points: usize,
    symmetric: bool,
) -> Result<FrequencyGrid> {
    if !(lambda_min > 0.0) || !(lambda_max > lambda_min) || !lambda_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "frequency range needs 0 < λ_min < λ_max (got [{lambda_min}, {lambda_max}])"
        )));
    }
    if panels == 0 || points == 0 {
        return Err(Error::InvalidArgument("panels and points must be positive".into()));
    }
    let base = gauss_legendre(points)?;
    let ratio = (lambda_max / lambda_min).powf(1.0 / panels as f64);
    let mut pos_nodes = Vec::with_capacity(panels * points);
    let mut pos_weights = Vec::with_capacity(panels * points);
    let mut lo = lambda_min;
    for p in 0..panels {
        let hi = if p + 1 == panels { lambda_max } else { lo * ratio };
        let r = base.mapped(lo, hi)?;
        pos_nodes.extend_from_slice(r.nodes());
        pos_weights.extend_from_slice(r.weights());
        lo = hi;
    }
    let (nodes, weights) = if symmetric {
        let mut nodes: Vec<f64> = pos_nodes.iter().rev().map(|l| -l).collect();
        let mut weights: Vec<f64> = pos_weights.iter().rev().copied().collect();
        nodes.extend_from_slice(&pos_nodes);
        weights.extend_from_slice(&pos_weights);
        (nodes, weights)
    } else {
        (pos_nodes, pos_weights)
    };
    Ok(FrequencyGrid {
        params,
        nodes,
        weights,
        symmetric,
    })
}

/// Complex coefficients `û(λ_i)_{k,ℓ}` on `grid × {|k| ≤ K_max} × {|ℓ| ≤ L_max}`,
/// stored λ-major, then `k`, then `ℓ`.
#[derive(Debug, Clone)]
pub struct CoefficientField {
    grid: Arc<FrequencyGrid>,
    k_basis: Arc<GradedBasis>,
    l_basis: Arc<GradedBasis>,
    values: Vec<Complex64>,
}

impl CoefficientField {
    pub fn zeros(grid: Arc<FrequencyGrid>, k_max: usize, l_max: usize) -> Self {
        let n = grid.params().n();
        Self::zeros_with(
            grid,
            Arc::new(GradedBasis::new(n, k_max)),
            Arc::new(GradedBasis::new(n, l_max)),
        )
    }

    pub fn zeros_with(grid: Arc<FrequencyGrid>, k_basis: Arc<GradedBasis>, l_basis: Arc<GradedBasis>) -> Self {
        let len = grid.len() * k_basis.len() * l_basis.len();
        Self {
            grid,
            k_basis,
            l_basis,
            values: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn from_values(
        grid: Arc<FrequencyGrid>,
        k_basis: Arc<GradedBasis>,
        l_basis: Arc<GradedBasis>,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        let len = grid.len() * k_basis.len() * l_basis.len();
        if values.len() != len {
            return Err(Error::Shape(format!(
                "expected {len} coefficients, got {}",
                values.len()
            )));
        }
        Ok(Self {
            grid,
            k_basis,
            l_basis,
            values,
        })
    }

    pub fn grid(&self) -> &Arc<FrequencyGrid> {
        &self.grid
    }

    pub fn k_basis(&self) -> &Arc<GradedBasis> {
        &self.k_basis
    }

    pub fn l_basis(&self) -> &Arc<GradedBasis> {
        &self.l_basis
    }

    pub fn k_max(&self) -> usize {
        self.k_basis.max_order()
    }

    pub fn l_max(&self) -> usize {
        self.l_basis.max_order()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Coefficients of one frequency node, `k`-major.
    pub fn slice(&self, i: usize) -> &[Complex64] {
        let block = self.k_basis.len() * self.l_basis.len();
        &self.values[i * block..(i + 1) * block]
    }

    pub fn slice_mut(&mut self, i: usize) -> &mut [Complex64] {
        let block = self.k_basis.len() * self.l_basis.len();
        &mut self.values[i * block..(i + 1) * block]
    }

    #[inline]
    pub fn offset(&self, i: usize, k: usize, l: usize) -> usize {
        (i * self.k_basis.len() + k) * self.l_basis.len() + l
    }

    pub fn get(&self, i: usize, k: usize, l: usize) -> Complex64 {
        self.values[self.offset(i, k, l)]
    }

    pub fn set(&mut self, i: usize, k: usize, l: usize, v: Complex64) {
        let o = self.offset(i, k, l);
        self.values[o] = v;
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    /// `Σ_{k,ℓ} |û(λ_i)_{k,ℓ}|²` over the flat lattice.
    pub fn hs_norm_sq(&self, i: usize) -> f64 {
        let terms: Vec<f64> = self.slice(i).iter().map(|v| v.norm_sqr()).collect();
        pairwise_sum(&terms)
    }

    /// `Σ_k ‖û(λ_i) e_k‖²`: inner sums over `ℓ` first.
    pub fn hs_norm_sq_by_rows(&self, i: usize) -> f64 {
        let nl = self.l_basis.len();
        let rows: Vec<f64> = self
            .slice(i)
            .chunks(nl)
            .map(|row| pairwise_sum(&row.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>()))
            .collect();
        pairwise_sum(&rows)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }
}

/// `‖field‖_{a,b}`: see the module docs.
pub fn weighted_norm(field: &CoefficientField, a: f64, b: f64) -> f64 {
    weighted_norm_sq(field, a, b).sqrt()
}

pub fn weighted_norm_sq(field: &CoefficientField, a: f64, b: f64) -> f64 {
    let grid = field.grid();
    let params = grid.params();
    let n = params.n() as f64;
    let nl = field.l_basis().len();
    let mu_pow: Vec<f64> = field
        .k_basis()
        .indices()
        .iter()
        .map(|k| if b == 0.0 { 1.0 } else { (k.eigenvalue() as f64).powf(b) })
        .collect();
    let mut per_node = Vec::with_capacity(grid.len());
    let mut terms = Vec::with_capacity(field.k_basis().len() * nl);
    for (i, (&lambda, &w)) in grid.nodes().iter().zip(grid.weights()).enumerate() {
        terms.clear();
        for (k, chunk) in field.slice(i).chunks(nl).enumerate() {
            let m = mu_pow[k];
            terms.extend(chunk.iter().map(|v| m * v.norm_sqr()));
        }
        per_node.push(w * lambda.abs().powf(n + a) * pairwise_sum(&terms));
    }
    params.plancherel_constant() * pairwise_sum(&per_node)
}

/// A derivative field together with the squared `(0,0)`-norm of the output
/// shell `|k| = K_max` that the one-shell truncation discarded.
#[derive(Debug, Clone)]
pub struct DerivativeField {
    pub field: CoefficientField,
    pub dropped_norm_sq: f64,
}

#[derive(Clone, Copy)]
enum Horizontal {
    X,
    Y,
}

/// Coefficients of `X_j u`:
/// `√(|λ|/2)·(√k_j û_{k−ε_j,ℓ} − √(k_j+1) û_{k+ε_j,ℓ})` on `|k| ≤ K_max − 1`.
/// `axis` is zero-based.
pub fn apply_x(field: &CoefficientField, axis: usize) -> Result<DerivativeField> {
    apply_horizontal(field, axis, Horizontal::X)
}

/// Coefficients of `Y_j u`:
/// `i·sign(λ)·√(|λ|/2)·(√k_j û_{k−ε_j,ℓ} + √(k_j+1) û_{k+ε_j,ℓ})` on
/// `|k| ≤ K_max − 1`.
pub fn apply_y(field: &CoefficientField, axis: usize) -> Result<DerivativeField> {
    apply_horizontal(field, axis, Horizontal::Y)
}

fn apply_horizontal(field: &CoefficientField, axis: usize, which: Horizontal) -> Result<DerivativeField> {
    let n = field.grid().params().n();
    if axis >= n {
        return Err(Error::InvalidArgument(format!("axis {axis} out of range for n = {n}")));
    }
    let k_max = field.k_max();
    if k_max == 0 {
        return Err(Error::InvalidArgument("derivative needs K_max >= 1".into()));
    }
    let in_basis = field.k_basis();
    let out_basis = Arc::new(GradedBasis::new(n, k_max - 1));
    let nl = field.l_basis().len();
    let grid = field.grid().clone();
    let mut out = CoefficientField::zeros_with(grid.clone(), out_basis.clone(), field.l_basis().clone());

    // Output rows, including the discarded shell |k| = K_max, as
    // (output position or None, source for lowering, source for raising, √k_j, √(k_j+1)).
    let mut plan = Vec::with_capacity(in_basis.len());
    for k in in_basis.indices() {
        let lower = k.lowered(axis).and_then(|m| in_basis.position(&m));
        let raise = in_basis.position(&k.raised(axis));
        let pos = out_basis.position(k);
        let kj = k.components()[axis] as f64;
        plan.push((pos, lower, raise, kj.sqrt(), (kj + 1.0).sqrt()));
    }

    let params = grid.params();
    let mut dropped_nodes = Vec::with_capacity(grid.len());
    for (i, &lambda) in grid.nodes().iter().enumerate() {
        let scale = (lambda.abs() / 2.0).sqrt();
        let (sign_raise, factor) = match which {
            Horizontal::X => (-1.0, Complex64::new(scale, 0.0)),
            Horizontal::Y => (1.0, Complex64::new(0.0, lambda.signum() * scale)),
        };
        let src = field.slice(i);
        let mut dropped_terms = Vec::new();
        for &(pos, lower, raise, sqrt_kj, sqrt_kj1) in &plan {
            for l in 0..nl {
                let mut acc = Complex64::new(0.0, 0.0);
                if let Some(lo) = lower {
                    acc += src[lo * nl + l] * sqrt_kj;
                }
                if let Some(hi) = raise {
                    acc += src[hi * nl + l] * (sign_raise * sqrt_kj1);
                }
                let v = factor * acc;
                match pos {
                    Some(p) => {
                        let o = out.offset(i, p, l);
                        out.values_mut()[o] = v;
                    }
                    None => dropped_terms.push(v.norm_sqr()),
                }
            }
        }
        dropped_nodes.push(grid.weights()[i] * lambda.abs().powi(params.n() as i32) * pairwise_sum(&dropped_terms));
    }
    Ok(DerivativeField {
        field: out,
        dropped_norm_sq: params.plancherel_constant() * pairwise_sum(&dropped_nodes),
    })
}

/// Partial sums of `Σ_k μ_k^{-(n+1)} = Σ_m C(m+n−1, n−1)·(2m+n)^{-(n+1)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    pub n: usize,
    pub k_max: usize,
    /// `Σ_{|k| ≤ K_max}`
    pub partial: f64,
    /// `Σ_{|k| > K_max}`
    pub tail: f64,
}

impl TailBound {
    pub fn full(&self) -> f64 {
        self.partial + self.tail
    }
}

/// `C(m+n−1, n−1)·(2m+n)^{-(n+1)}`: the contribution of shell `|k| = m`.
pub fn shell_term(n: usize, m: usize) -> f64 {
    let mut count = 1.0;
    for i in 1..n {
        count *= (m + i) as f64 / i as f64;
    }
    count * ((2 * m + n) as f64).powi(-(n as i32 + 1))
}

/// Number of multi-indices with `|k| = m` in `n` dimensions.
pub fn shell_count(n: usize, m: usize) -> usize {
    binomial(m + n - 1, n - 1)
}

/// Shells up to this index are summed term by term before the
/// Euler–Maclaurin remainder takes over.
const DIRECT_SHELLS: usize = 4000;

pub fn tail_bound(params: GroupParams, k_max: usize) -> TailBound {
    let n = params.n();
    let partial = pairwise_sum(&(0..=k_max).map(|m| shell_term(n, m)).collect::<Vec<_>>());
    let start = DIRECT_SHELLS.max(k_max + 1);
    let direct: Vec<f64> = (k_max + 1..start).rev().map(|m| shell_term(n, m)).collect();
    let tail = euler_maclaurin_remainder(n, start) + pairwise_sum(&direct);
    TailBound {
        n,
        k_max,
        partial,
        tail,
    }
}

/// `Σ_{m ≥ start} f(m)` for `f(m) = P(2m+n)·(2m+n)^{-(n+1)}`, where `P` is the
/// shell count written as a polynomial in `u = 2m + n`.
fn euler_maclaurin_remainder(n: usize, start: usize) -> f64 {
    // Π_{i=1}^{n−1} (u − n + 2i) / (2^{n−1} (n−1)!)
    let mut poly = vec![1.0];
    let mut denom = 1.0;
    for i in 1..n {
        let shift = 2.0 * i as f64 - n as f64;
        let mut next = vec![0.0; poly.len() + 1];
        for (j, c) in poly.iter().enumerate() {
            next[j + 1] += c;
            next[j] += c * shift;
        }
        poly = next;
        denom *= 2.0 * i as f64;
    }
    let u0 = (2 * start + n) as f64;
    // d^r/dm^r of u^p is 2^r·p(p−1)…(p−r+1)·u^{p−r}
    let deriv = |r: usize| -> f64 {
        poly.iter()
            .enumerate()
            .map(|(j, c)| {
                let p = j as f64 - n as f64 - 1.0;
                let mut falling = 1.0;
                for s in 0..r {
                    falling *= p - s as f64;
                }
                c * 2f64.powi(r as i32) * falling * u0.powf(p - r as f64)
            })
            .sum::<f64>()
            / denom
    };
    let integral: f64 = poly
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let p = j as f64 - n as f64 - 1.0;
            c * 0.5 * (-u0.powf(p + 1.0) / (p + 1.0))
        })
        .sum::<f64>()
        / denom;
    integral + 0.5 * deriv(0) - deriv(1) / 12.0 + deriv(3) / 720.0 - deriv(5) / 30240.0 + deriv(7) / 1_209_600.0
}
