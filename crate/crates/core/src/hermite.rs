//! Hermite functions, oscillator eigenvalues, ladder algebra and
//! Gauss–Hermite quadrature.
//!
//! Hermite polynomials follow the sign convention
//! `H_m(x) = (-1)^m e^{x²} (d/dx)^m e^{-x²}`, under which
//! `H_{m+1} = 2x H_m - 2m H_{m-1}` and `H'_m = 2m H_{m-1}`.
//!
//! The normalized functions `ψ_m(x) = (√π 2^m m!)^{-1/2} e^{-x²/2} H_m(x)`
//! are evaluated through their own three-term recurrence
//!
//! ```text
//! ψ_{m+1}(x) = x·√(2/(m+1))·ψ_m(x) − √(m/(m+1))·ψ_{m−1}(x),   ψ_0(x) = π^{-1/4} e^{-x²/2}
//! ```
//!
//! so neither `H_m` nor the normalization constant is ever formed.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;

/// `ln(π)/4`; `ψ_0(0) = e^{-LN_PI_QUARTER}`.
const LN_PI_QUARTER: f64 = 0.286_182_471_462_350_04;
/// Rescaling threshold for the log-scaled recurrence.
const RESCALE: f64 = 1e150;
/// Beyond `x²/2` above this the seed `ψ_0(x)` is too close to underflow.
const DIRECT_LIMIT: f64 = 600.0;

/// Hermite multi-index `k ∈ ℕⁿ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(components: Vec<usize>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("multi-index needs n >= 1 components".into()));
        }
        Ok(Self(components))
    }

    pub fn zero(n: usize) -> Self {
        assert!(n >= 1, "multi-index dimension must be positive");
        Self(vec![0; n])
    }

    /// `ε_j`, zero-based axis.
    pub fn unit(n: usize, axis: usize) -> Self {
        let mut k = Self::zero(n);
        k.0[axis] = 1;
        k
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[usize] {
        &self.0
    }

    /// `|k|`
    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    /// `μ_k = 2|k| + n`, the harmonic-oscillator eigenvalue of `e_k`.
    pub fn eigenvalue(&self) -> usize {
        2 * self.order() + self.dim()
    }

    pub fn raised(&self, axis: usize) -> Self {
        let mut k = self.clone();
        k.0[axis] += 1;
        k
    }

    pub fn lowered(&self, axis: usize) -> Option<Self> {
        if self.0[axis] == 0 {
            return None;
        }
        let mut k = self.clone();
        k.0[axis] -= 1;
        Some(k)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Free-function form of [`MultiIndex::eigenvalue`].
pub fn eigenvalue(k: &MultiIndex) -> usize {
    k.eigenvalue()
}

/// One term `coeff · e_index` of a ladder expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderTerm {
    pub index: MultiIndex,
    pub coeff: f64,
}

/// `∂_{w_j} e_k = √(k_j/2)·e_{k−ε_j} − √((k_j+1)/2)·e_{k+ε_j}`; the lowering
/// term is omitted when `k_j = 0`. `axis` is zero-based.
pub fn ladder_derivative(k: &MultiIndex, axis: usize) -> Vec<LadderTerm> {
    ladder(k, axis, -1.0)
}

/// `w_j e_k = √(k_j/2)·e_{k−ε_j} + √((k_j+1)/2)·e_{k+ε_j}`.
pub fn ladder_multiply(k: &MultiIndex, axis: usize) -> Vec<LadderTerm> {
    ladder(k, axis, 1.0)
}

fn ladder(k: &MultiIndex, axis: usize, raise_sign: f64) -> Vec<LadderTerm> {
    assert!(axis < k.dim(), "axis {axis} out of range for n = {}", k.dim());
    let mut terms = Vec::with_capacity(2);
    if let Some(lower) = k.lowered(axis) {
        terms.push(LadderTerm {
            index: lower,
            coeff: (k.0[axis] as f64 / 2.0).sqrt(),
        });
    }
    terms.push(LadderTerm {
        index: k.raised(axis),
        coeff: raise_sign * ((k.0[axis] + 1) as f64 / 2.0).sqrt(),
    });
    terms
}

/// `ψ_m(x)`. Total for finite `x`; uses a log-scaled recurrence so it neither
/// overflows nor loses the result to an underflowed seed.
pub fn hermite_function(m: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut log_scale = -0.5 * x * x - LN_PI_QUARTER;
    for j in 0..m {
        let jf = j as f64;
        let next = x * (2.0 / (jf + 1.0)).sqrt() * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    if cur == 0.0 {
        return 0.0;
    }
    cur.signum() * (cur.abs().ln() + log_scale).exp()
}

/// Writes `ψ_0(x), …, ψ_{out.len()-1}(x)` into `out`.
pub fn hermite_functions_into(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let half_sq = 0.5 * x * x;
    if half_sq < DIRECT_LIMIT {
        out[0] = (-half_sq - LN_PI_QUARTER).exp();
        if out.len() > 1 {
            out[1] = std::f64::consts::SQRT_2 * x * out[0];
        }
        for j in 1..out.len().saturating_sub(1) {
            let jf = j as f64;
            out[j + 1] = x * (2.0 / (jf + 1.0)).sqrt() * out[j] - (jf / (jf + 1.0)).sqrt() * out[j - 1];
        }
        return;
    }
    // Far tail: carry a running log scale and expand each entry separately.
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut log_scale = -half_sq - LN_PI_QUARTER;
    out[0] = (log_scale).exp();
    for j in 0..out.len() - 1 {
        let jf = j as f64;
        let next = x * (2.0 / (jf + 1.0)).sqrt() * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            log_scale += RESCALE.ln();
        }
        out[j + 1] = if cur == 0.0 {
            0.0
        } else {
            cur.signum() * (cur.abs().ln() + log_scale).exp()
        };
    }
}

/// `ψ_0(x), …, ψ_max_m(x)`.
pub fn hermite_functions(max_m: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; max_m + 1];
    hermite_functions_into(x, &mut out);
    out
}

/// Orthonormal Hermite polynomials `p_m(x) = ψ_m(x)·e^{x²/2}` for
/// `m = 0..out.len()`, orthonormal against the weight `e^{-x²}`.
pub fn hermite_polys_into(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = (-LN_PI_QUARTER).exp();
    if out.len() > 1 {
        out[1] = std::f64::consts::SQRT_2 * x * out[0];
    }
    for j in 1..out.len().saturating_sub(1) {
        let jf = j as f64;
        out[j + 1] = x * (2.0 / (jf + 1.0)).sqrt() * out[j] - (jf / (jf + 1.0)).sqrt() * out[j - 1];
    }
}

/// `e_k(w) = Π_j ψ_{k_j}(w_j)`.
pub fn hermite_function_nd(k: &MultiIndex, w: &[f64]) -> f64 {
    assert_eq!(k.dim(), w.len(), "dimension mismatch");
    k.components()
        .iter()
        .zip(w)
        .map(|(&m, &x)| hermite_function(m, x))
        .product()
}

/// Gauss–Hermite rule for the weight `e^{-x²}` with `count` nodes.
///
/// Nodes are bracketed by Sturm-sequence bisection on the Jacobi matrix and
/// polished with Newton steps on the orthonormal recurrence. Weights are `2/p'_n(x)²` in the
/// orthonormal normalisation and their logarithms are kept exactly, so
/// [`QuadratureRule::envelope_weight`] is usable for every node.
pub fn gauss_hermite(count: usize) -> Result<QuadratureRule> {
    if count == 0 {
        return Err(Error::InvalidArgument(
            "Gauss-Hermite rule needs at least one point".into(),
        ));
    }
    let n = count;
    let half = n.div_ceil(2);
    // largest zero of H_n lies below √(2n+1)
    let bound = (2.0 * n as f64 + 1.0).sqrt() + 1.0;
    let mut roots = vec![0.0; half];
    let mut ln_w = vec![0.0; half];
    for (slot, i) in (n - half..n).enumerate() {
        let (mut lo, mut hi) = (-bound, bound);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(n, mid) <= i {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut z = 0.5 * (lo + hi);
        let mut last = hi - lo;
        for _ in 0..3 {
            let (p, dp) = hermite_poly_with_derivative(n, z);
            if dp == 0.0 {
                break;
            }
            let next = z - p / dp;
            if !(next >= lo && next <= hi) {
                break;
            }
            last = (next - z).abs();
            z = next;
        }
        if !z.is_finite() {
            return Err(Error::NodeSolve {
                index: i,
                count,
                last_step: last,
            });
        }
        let (_, dp) = hermite_poly_with_derivative(n, z);
        roots[slot] = z;
        ln_w[slot] = std::f64::consts::LN_2 - 2.0 * dp.abs().ln();
    }
    // roots[] holds the non-negative half in ascending order
    let mut nodes = Vec::with_capacity(n);
    let mut lnw = Vec::with_capacity(n);
    let skip = n % 2;
    for j in (skip..half).rev() {
        nodes.push(-roots[j]);
        lnw.push(ln_w[j]);
    }
    if skip == 1 {
        // the middle root is exactly zero
        roots[0] = 0.0;
    }
    nodes.extend_from_slice(&roots);
    lnw.extend_from_slice(&ln_w);
    let weights = lnw.iter().map(|l| l.exp()).collect();
    let rule = QuadratureRule::from_parts(nodes, weights, lnw)?;
    if rule.nodes().windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NodeSolve {
            index: 0,
            count,
            last_step: f64::NAN,
        });
    }
    Ok(rule)
}

/// Number of eigenvalues below `x` of the Jacobi matrix of the Hermite
/// weight (zero diagonal, off-diagonal `√(j/2)`), i.e. zeros of `H_n` below `x`.
fn sturm_count(n: usize, x: f64) -> usize {
    let mut count = 0;
    let mut q = -x;
    for j in 0..n {
        if j > 0 {
            let b2 = j as f64 / 2.0;
            q = -x - b2 / q;
        }
        if q == 0.0 {
            q = -f64::EPSILON * (x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Orthonormal `p_n(x)` and its derivative `√(2n)·p_{n−1}(x)`.
fn hermite_poly_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 0.0;
    let mut p1 = (-LN_PI_QUARTER).exp();
    for j in 0..n {
        let jf = j as f64;
        let p2 = x * (2.0 / (jf + 1.0)).sqrt() * p1 - (jf / (jf + 1.0)).sqrt() * p0;
        p0 = p1;
        p1 = p2;
    }
    (p1, (2.0 * n as f64).sqrt() * p0)
}

/// All multi-indices with `|k| ≤ max_order`, in graded order: by `|k|`, then
/// lexicographically descending in the leading component.
#[derive(Debug, Clone)]
pub struct GradedBasis {
    dim: usize,
    max_order: usize,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
}

impl GradedBasis {
    pub fn new(dim: usize, max_order: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        let mut indices = Vec::new();
        for order in 0..=max_order {
            let mut buf = vec![0; dim];
            compositions(order, 0, &mut buf, &mut indices);
        }
        let lookup = indices.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        Self {
            dim,
            max_order,
            indices,
            lookup,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn get(&self, i: usize) -> &MultiIndex {
        &self.indices[i]
    }

    pub fn position(&self, k: &MultiIndex) -> Option<usize> {
        self.lookup.get(k).copied()
    }

    /// Number of indices with `|k| = m`: `C(m+n−1, n−1)`.
    pub fn shell_size(dim: usize, m: usize) -> usize {
        binomial(m + dim - 1, dim - 1)
    }
}

fn compositions(remaining: usize, slot: usize, buf: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
    let n = buf.len();
    if slot + 1 == n {
        buf[slot] = remaining;
        out.push(MultiIndex(buf.clone()));
        return;
    }
    for v in (0..=remaining).rev() {
        buf[slot] = v;
        compositions(remaining - v, slot + 1, buf, out);
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// `π^{-1/4}`
pub fn psi0_at_origin() -> f64 {
    PI.powf(-0.25)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn mi(v: &[usize]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn ground_state_at_origin() {
        assert!((hermite_function(0, 0.0) - 0.751_125_544_464_942_5).abs() < 1e-15);
        assert!((psi0_at_origin() - 0.751_125_544_464_942_5).abs() < 1e-15);
        assert_eq!(hermite_function(1, 0.0), 0.0);
    }

    #[test]
    fn eigenvalues() {
        assert_eq!(eigenvalue(&mi(&[0])), 1);
        assert_eq!(eigenvalue(&mi(&[1, 2])), 8);
        assert_eq!(eigenvalue(&mi(&[0, 0, 0])), 3);
    }

    #[test]
    fn ladder_terms() {
        let d = ladder_derivative(&mi(&[0]), 0);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].index, mi(&[1]));
        assert!((d[0].coeff + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-16);

        let d = ladder_derivative(&mi(&[3]), 0);
        assert_eq!(d[0].index, mi(&[2]));
        assert!((d[0].coeff - 1.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(d[1].index, mi(&[4]));
        assert!((d[1].coeff + 2f64.sqrt()).abs() < 1e-15);

        let m = ladder_multiply(&mi(&[0]), 0);
        assert_eq!(m.len(), 1);
        assert!((m[0].coeff - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-16);

        let m = ladder_multiply(&mi(&[2]), 0);
        assert_eq!(m[0].index, mi(&[1]));
        assert!((m[0].coeff - 1.0).abs() < 1e-15);
        assert_eq!(m[1].index, mi(&[3]));
        assert!((m[1].coeff - 1.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn derivative_ladder_matches_finite_differences() {
        let x = 0.7;
        let h = 1e-5;
        for m in 0..12 {
            let k = mi(&[m]);
            let fd = (hermite_function(m, x + h) - hermite_function(m, x - h)) / (2.0 * h);
            let lad: f64 = ladder_derivative(&k, 0)
                .iter()
                .map(|t| t.coeff * hermite_function(t.index.components()[0], x))
                .sum();
            assert!((fd - lad).abs() < 1e-8, "m={m}: {fd} vs {lad}");
        }
    }

    #[test]
    fn multiply_ladder_pointwise() {
        let x = -1.1;
        for m in 0..20 {
            let lad: f64 = ladder_multiply(&mi(&[m]), 0)
                .iter()
                .map(|t| t.coeff * hermite_function(t.index.components()[0], x))
                .sum();
            assert!((x * hermite_function(m, x) - lad).abs() < 1e-12);
        }
    }

    fn apply(
        op: fn(&MultiIndex, usize) -> Vec<LadderTerm>,
        v: &BTreeMap<MultiIndex, f64>,
        axis: usize,
    ) -> BTreeMap<MultiIndex, f64> {
        let mut out = BTreeMap::new();
        for (k, c) in v {
            for t in op(k, axis) {
                *out.entry(t.index).or_insert(0.0) += c * t.coeff;
            }
        }
        out
    }

    #[test]
    fn oscillator_eigenrelation_in_coefficient_space() {
        for k in [mi(&[0]), mi(&[5]), mi(&[2, 3]), mi(&[0, 1, 4])] {
            let start: BTreeMap<_, _> = [(k.clone(), 1.0)].into_iter().collect();
            let mut total: BTreeMap<MultiIndex, f64> = BTreeMap::new();
            for axis in 0..k.dim() {
                let dd = apply(ladder_derivative, &apply(ladder_derivative, &start, axis), axis);
                let xx = apply(ladder_multiply, &apply(ladder_multiply, &start, axis), axis);
                for (idx, c) in dd {
                    *total.entry(idx).or_insert(0.0) -= c;
                }
                for (idx, c) in xx {
                    *total.entry(idx).or_insert(0.0) += c;
                }
            }
            for (idx, c) in total {
                let want = if idx == k { k.eigenvalue() as f64 } else { 0.0 };
                assert!((c - want).abs() <= 1e-12, "{k} -> {idx}: {c}");
            }
        }
    }

    #[test]
    fn no_overflow_at_high_order() {
        let v = hermite_function(2000, 10.0);
        assert!(v.is_finite());
        assert!(v.abs() < 1.0);
        let far = hermite_function(10_000, 50.0);
        assert!(far.is_finite() && far != 0.0);
        assert!(hermite_function(10_000, -50.0).is_finite());
    }

    #[test]
    fn vector_and_scalar_evaluation_agree() {
        for &x in &[0.0, 0.3, -2.5, 9.0, 36.0, 41.0] {
            let all = hermite_functions(80, x);
            for (m, v) in all.iter().enumerate() {
                let s = hermite_function(m, x);
                assert!((v - s).abs() <= 1e-13 * s.abs().max(1e-300), "m={m} x={x}: {v} vs {s}");
            }
        }
    }

    #[test]
    fn small_gauss_hermite_rules() {
        let r = gauss_hermite(1).unwrap();
        assert_eq!(r.nodes(), &[0.0]);
        assert!((r.weights()[0] - PI.sqrt()).abs() < 1e-14);

        let r = gauss_hermite(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.nodes()[0] + s).abs() < 1e-15 && (r.nodes()[1] - s).abs() < 1e-15);
        for w in r.weights() {
            assert!((w - PI.sqrt() / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn gauss_hermite_weight_sum() {
        for n in [3, 10, 41, 80, 150, 300] {
            let r = gauss_hermite(n).unwrap();
            let s: f64 = r.weights().iter().sum();
            assert!((s / PI.sqrt() - 1.0).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn graded_basis_counts() {
        let b = GradedBasis::new(2, 3);
        assert_eq!(b.len(), 10);
        assert_eq!(b.get(0), &mi(&[0, 0]));
        assert_eq!(b.get(1), &mi(&[1, 0]));
        for (i, k) in b.indices().iter().enumerate() {
            assert_eq!(b.position(k), Some(i));
        }
        assert_eq!(GradedBasis::shell_size(3, 4), 15);
        assert_eq!(GradedBasis::new(3, 4).len(), 35);
    }
}
