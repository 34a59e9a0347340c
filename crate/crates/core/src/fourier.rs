//! Schrödinger-representation matrix coefficients and the forward group
//! Fourier transform of functions on `H_1`.
//!
//! With `α = √|λ|` and `s = sign λ`,
//!
//! ```text
//! R(λ,x,y; k,ℓ) = ∫ e^{i s α y·w} e_k(w + α x) e_ℓ(w) dw
//! f̂(λ)_{k,ℓ}   = (f̂(λ) e_k, e_ℓ)
//!              = ∫∫ g_λ(x,y) e^{-iλ x·y/2} conj(R(λ,x,y; ℓ,k)) dx dy,
//! g_λ(x,y)     = ∫ f(x,y,τ) e^{-iλτ} dτ.
//! ```
//!
//! Matrices are stored with rows indexed by `k` and columns by `ℓ`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermite::{gauss_hermite, hermite_function, hermite_functions_into, MultiIndex};
use crate::plancherel::{CoefficientField, FrequencyGrid};
use crate::quadrature::{legendre_with_density, pairwise_sum, QuadratureRule};

/// Disagreement between a rule and its doubled counterpart that is reported
/// as under-resolution.
pub const RESOLUTION_LIMIT: f64 = 1e-6;

/// Declared regularity of a physical function. Informational: it is carried
/// into reports and lets callers pick denser rules for rough data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Analytic,
    Smooth,
    Finite(u32),
}

type Sampler = dyn Fn(f64, f64, f64) -> Complex64 + Send + Sync;

/// A function on `H_1`, zero outside its support box `[x] × [y] × [τ]`.
#[derive(Clone)]
pub struct PhysicalFunction {
    sampler: Arc<Sampler>,
    support: [[f64; 2]; 3],
    smoothness: Smoothness,
    real: bool,
}

impl fmt::Debug for PhysicalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhysicalFunction")
            .field("support", &self.support)
            .field("smoothness", &self.smoothness)
            .field("real", &self.real)
            .finish_non_exhaustive()
    }
}

fn check_support(support: &[[f64; 2]; 3]) -> Result<()> {
    for [a, b] in support {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidArgument(format!(
                "support interval [{a}, {b}] is not a finite a < b"
            )));
        }
    }
    Ok(())
}

impl PhysicalFunction {
    pub fn new<F>(sampler: F, support: [[f64; 2]; 3], smoothness: Smoothness) -> Result<Self>
    where
        F: Fn(f64, f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        check_support(&support)?;
        Ok(Self {
            sampler: Arc::new(sampler),
            support,
            smoothness,
            real: false,
        })
    }

    /// A real-valued function. Real data let the transform use
    /// `f̂(−λ)_{k,ℓ} = conj(f̂(λ)_{k,ℓ})`.
    pub fn real<F>(sampler: F, support: [[f64; 2]; 3], smoothness: Smoothness) -> Result<Self>
    where
        F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        check_support(&support)?;
        Ok(Self {
            sampler: Arc::new(move |x, y, t| Complex64::new(sampler(x, y, t), 0.0)),
            support,
            smoothness,
            real: true,
        })
    }

    pub fn zero(support: [[f64; 2]; 3]) -> Result<Self> {
        Self::real(|_, _, _| 0.0, support, Smoothness::Analytic)
    }

    /// `e^{-(x²+y²+τ²)/2}` truncated to `[-half_width, half_width]³`.
    pub fn gaussian(half_width: f64) -> Result<Self> {
        let h = half_width;
        Self::real(
            |x, y, t| (-(x * x + y * y + t * t) / 2.0).exp(),
            [[-h, h], [-h, h], [-h, h]],
            Smoothness::Analytic,
        )
    }

    pub fn eval(&self, x: f64, y: f64, t: f64) -> Complex64 {
        let [[x0, x1], [y0, y1], [t0, t1]] = self.support;
        if x < x0 || x > x1 || y < y0 || y > y1 || t < t0 || t > t1 {
            return Complex64::new(0.0, 0.0);
        }
        (self.sampler)(x, y, t)
    }

    pub fn support(&self) -> [[f64; 2]; 3] {
        self.support
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn is_real(&self) -> bool {
        self.real
    }
}

/// One-dimensional factor of `R`, evaluated with the centred substitution
/// `w = u − c/2`, `c = αx`, which turns the two Hermite envelopes into a
/// single `e^{-u²}` weight.
fn rep_1d(alpha: f64, sign: f64, x: f64, y: f64, k: usize, l: usize, rule: &QuadratureRule) -> Complex64 {
    let c = alpha * x;
    let b = sign * alpha * y;
    let mut re = Vec::with_capacity(rule.count());
    let mut im = Vec::with_capacity(rule.count());
    for (i, &u) in rule.nodes().iter().enumerate() {
        let w = u - 0.5 * c;
        let amp = rule.envelope_weight(i) * hermite_function(k, u + 0.5 * c) * hermite_function(l, w);
        let (sn, cs) = (b * w).sin_cos();
        re.push(amp * cs);
        im.push(amp * sn);
    }
    Complex64::new(pairwise_sum(&re), pairwise_sum(&im))
}

/// `R(λ,x,y; k,ℓ)` evaluated with a single Gauss–Hermite rule.
pub fn rep_matrix_coefficient_unchecked(
    lambda: f64,
    x: &[f64],
    y: &[f64],
    k: &MultiIndex,
    l: &MultiIndex,
    rule: &QuadratureRule,
) -> Result<Complex64> {
    let n = k.dim();
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "λ must be finite and nonzero, got {lambda}"
        )));
    }
    if l.dim() != n || x.len() != n || y.len() != n {
        return Err(Error::Shape(format!(
            "dimension mismatch: k {}, ℓ {}, x {}, y {}",
            n,
            l.dim(),
            x.len(),
            y.len()
        )));
    }
    let alpha = lambda.abs().sqrt();
    let sign = lambda.signum();
    let mut out = Complex64::new(1.0, 0.0);
    for j in 0..n {
        out *= rep_1d(alpha, sign, x[j], y[j], k.components()[j], l.components()[j], rule);
    }
    Ok(out)
}

/// `R(λ,x,y; k,ℓ) = ∫ e^{i sign(λ)√|λ| y·w} e_k(w + √|λ| x) e_ℓ(w) dw`.
///
/// The value is recomputed with a rule of twice as many nodes; a difference
/// above [`RESOLUTION_LIMIT`] is an error. The doubled-rule value is returned.
pub fn rep_matrix_coefficient(
    lambda: f64,
    x: &[f64],
    y: &[f64],
    k: &MultiIndex,
    l: &MultiIndex,
    rule: &QuadratureRule,
) -> Result<Complex64> {
    let coarse = rep_matrix_coefficient_unchecked(lambda, x, y, k, l, rule)?;
    let fine_rule = gauss_hermite(2 * rule.count())?;
    let fine = rep_matrix_coefficient_unchecked(lambda, x, y, k, l, &fine_rule)?;
    let disagreement = (coarse - fine).norm();
    if disagreement > RESOLUTION_LIMIT {
        return Err(Error::Resolution {
            disagreement,
            limit: RESOLUTION_LIMIT,
            context: format!(
                "matrix coefficient at λ={lambda}, k={k}, ℓ={l} with {} nodes",
                rule.count()
            ),
        });
    }
    Ok(fine)
}

/// Quadrature settings for [`group_fourier`].
#[derive(Debug, Clone, PartialEq)]
pub struct FourierConfig {
    /// Points per oscillation period of `e^{-iλτ}`; at least 8.
    pub tau_points_per_period: f64,
    /// Points per oscillation period in the `x`, `y` and `w` integrals.
    pub points_per_period: f64,
    /// Floor on the node density, resolving the data themselves.
    pub base_points_per_unit: f64,
    /// Gauss–Legendre points per panel.
    pub panel_points: usize,
    /// The `w` integral runs over `|w| ≤ √(2·max(K,L)+1) + envelope_margin`.
    pub envelope_margin: f64,
    /// Frequencies with `∫∫|g_λ| ≤ negligible` return a zero matrix. Every
    /// entry is then at most this value, since `|R| ≤ 1`. The integral is
    /// taken on the base-density grid; `0` disables the test.
    pub negligible: f64,
    /// Upper bound on the relative Hilbert–Schmidt mass lost to the
    /// `K, L` truncation; `None` disables the check.
    pub tail_bound: Option<f64>,
}

impl Default for FourierConfig {
    fn default() -> Self {
        Self {
            tau_points_per_period: 8.0,
            points_per_period: 5.0,
            base_points_per_unit: 3.0,
            panel_points: 16,
            envelope_margin: 7.0,
            negligible: 0.0,
            tail_bound: None,
        }
    }
}

impl FourierConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_points_per_period >= 8.0) {
            return Err(Error::InvalidArgument("tau_points_per_period must be >= 8".into()));
        }
        if !(self.points_per_period > 0.0) || !(self.base_points_per_unit > 0.0) {
            return Err(Error::InvalidArgument("node densities must be positive".into()));
        }
        if self.panel_points == 0 || !(self.envelope_margin >= 0.0) || !(self.negligible >= 0.0) {
            return Err(Error::InvalidArgument("invalid panel/margin/threshold setting".into()));
        }
        Ok(())
    }

    /// Every density doubled: the reference for resolution checks.
    pub fn doubled(&self) -> Self {
        Self {
            tau_points_per_period: 2.0 * self.tau_points_per_period,
            points_per_period: 2.0 * self.points_per_period,
            base_points_per_unit: 2.0 * self.base_points_per_unit,
            ..self.clone()
        }
    }
}

/// Truncated `f̂(λ)` on `0 ≤ k ≤ K`, `0 ≤ ℓ ≤ L` (`n = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct FourierMatrix {
    pub lambda: f64,
    pub k_max: usize,
    pub l_max: usize,
    /// Row-major, rows `k`, columns `ℓ`.
    pub values: Vec<Complex64>,
    /// Untruncated `‖f̂(λ)‖²_HS = (2π/|λ|)·∫∫|g_λ|²`, from the Schrödinger
    /// model's isometry onto Hilbert–Schmidt operators.
    pub full_hs_norm_sq: f64,
    /// True when the frequency was below the negligibility threshold.
    pub skipped: bool,
}

impl FourierMatrix {
    pub fn get(&self, k: usize, l: usize) -> Complex64 {
        self.values[k * (self.l_max + 1) + l]
    }

    pub fn hs_norm_sq(&self) -> f64 {
        pairwise_sum(&self.values.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>())
    }

    /// Share of the Hilbert–Schmidt mass outside the truncation.
    pub fn relative_tail(&self) -> f64 {
        if self.full_hs_norm_sq == 0.0 {
            return 0.0;
        }
        ((self.full_hs_norm_sq - self.hs_norm_sq()) / self.full_hs_norm_sq).max(0.0)
    }

    /// Largest singular value, by power iteration on `A*A`.
    pub fn operator_norm(&self) -> f64 {
        operator_norm(&self.values, self.k_max + 1, self.l_max + 1)
    }

    /// The matrix at `−λ` for real data.
    pub fn conjugated(&self) -> Self {
        Self {
            lambda: -self.lambda,
            values: self.values.iter().map(|v| v.conj()).collect(),
            ..self.clone()
        }
    }
}

/// Largest singular value of a row-major `rows × cols` matrix.
pub fn operator_norm(a: &[Complex64], rows: usize, cols: usize) -> f64 {
    assert_eq!(a.len(), rows * cols);
    if a.iter().all(|v| v.norm_sqr() == 0.0) {
        return 0.0;
    }
    // v ∈ ℂ^rows; iterate v ← A A* v
    let mut v: Vec<Complex64> = (0..rows).map(|i| Complex64::new(1.0 + 0.01 * i as f64, 0.0)).collect();
    let mut estimate = 0.0;
    for _ in 0..2000 {
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        v.iter_mut().for_each(|c| *c /= norm);
        let mut u = vec![Complex64::new(0.0, 0.0); cols];
        for r in 0..rows {
            for c in 0..cols {
                u[c] += a[r * cols + c].conj() * v[r];
            }
        }
        let mut next = vec![Complex64::new(0.0, 0.0); rows];
        for r in 0..rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..cols {
                acc += a[r * cols + c] * u[c];
            }
            next[r] = acc;
        }
        let sigma_sq = u.iter().map(|c| c.norm_sqr()).sum::<f64>();
        let done = (sigma_sq - estimate).abs() <= 1e-13 * sigma_sq;
        estimate = sigma_sq;
        v = next;
        if done {
            break;
        }
    }
    estimate.sqrt()
}

/// Forward transform `f̂(λ)_{k,ℓ}` for `0 ≤ k ≤ K`, `0 ≤ ℓ ≤ L`.
///
/// Stage one integrates out `τ`; stage two factors the `(x, y, w)` integral as
/// `Σ_i c_i ψ_k(w_i) Σ_p W_p ψ_ℓ(w_i + αx_p) Σ_q W_q g(x_p,y_q) e^{-iλx_p y_q/2} e^{-isαy_q w_i}`.
pub fn group_fourier(
    f: &PhysicalFunction,
    lambda: f64,
    k_max: usize,
    l_max: usize,
    cfg: &FourierConfig,
) -> Result<FourierMatrix> {
    cfg.validate()?;
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "λ must be finite and nonzero, got {lambda}"
        )));
    }
    let abs_l = lambda.abs();
    let alpha = abs_l.sqrt();
    let sign = lambda.signum();
    let [xb, yb, tb] = f.support();
    let x_abs = xb[0].abs().max(xb[1].abs());
    let y_abs = yb[0].abs().max(yb[1].abs());
    let w_max = ((2 * k_max.max(l_max) + 1) as f64).sqrt() + cfg.envelope_margin;
    let per_period = |freq: f64, ppp: f64| cfg.base_points_per_unit + ppp * freq / (2.0 * PI);

    let tau = legendre_with_density(
        tb[0],
        tb[1],
        per_period(abs_l, cfg.tau_points_per_period),
        cfg.panel_points,
    )?;
    let fx = alpha * ((2 * l_max + 1) as f64).sqrt() + abs_l * y_abs / 2.0;
    let fy = abs_l * x_abs / 2.0 + alpha * w_max;
    let fw = alpha * y_abs + ((2 * k_max + 1) as f64).sqrt() + ((2 * l_max + 1) as f64).sqrt();
    let xr = legendre_with_density(xb[0], xb[1], per_period(fx, cfg.points_per_period), cfg.panel_points)?;
    let yr = legendre_with_density(yb[0], yb[1], per_period(fy, cfg.points_per_period), cfg.panel_points)?;
    let wr = legendre_with_density(-w_max, w_max, per_period(fw, cfg.points_per_period), cfg.panel_points)?;
    let (np, nq) = (xr.count(), yr.count());

    // Stage one: g(x_p, y_q) = ∫ f e^{-iλτ} dτ.
    let tau_phase: Vec<Complex64> = tau
        .nodes()
        .iter()
        .zip(tau.weights())
        .map(|(&t, &w)| Complex64::from_polar(w, -lambda * t))
        .collect();
    let g_at = |x: f64, y: f64| -> Complex64 {
        let (mut re, mut im) = (Vec::with_capacity(tau_phase.len()), Vec::with_capacity(tau_phase.len()));
        for (&t, ph) in tau.nodes().iter().zip(&tau_phase) {
            let v = f.eval(x, y, t) * ph;
            re.push(v.re);
            im.push(v.im);
        }
        Complex64::new(pairwise_sum(&re), pairwise_sum(&im))
    };
    let sample = |xr: &QuadratureRule, yr: &QuadratureRule| -> Vec<Vec<Complex64>> {
        xr.nodes()
            .par_iter()
            .map(|&x| yr.nodes().iter().map(|&y| g_at(x, y)).collect())
            .collect()
    };
    let moments = |g: &[Vec<Complex64>], xr: &QuadratureRule, yr: &QuadratureRule| -> (f64, f64) {
        let mut abs_terms = Vec::with_capacity(xr.count() * yr.count());
        let mut sq_terms = Vec::with_capacity(xr.count() * yr.count());
        for (p, row) in g.iter().enumerate() {
            for (q, v) in row.iter().enumerate() {
                let w = xr.weights()[p] * yr.weights()[q];
                abs_terms.push(w * v.norm());
                sq_terms.push(w * v.norm_sqr());
            }
        }
        (pairwise_sum(&abs_terms), 2.0 * PI / abs_l * pairwise_sum(&sq_terms))
    };
    let rows = k_max + 1;
    let cols = l_max + 1;

    if cfg.negligible > 0.0 {
        // The skip test only needs ∫∫|g|, which the base density resolves.
        let xc = legendre_with_density(xb[0], xb[1], cfg.base_points_per_unit, cfg.panel_points)?;
        let yc = legendre_with_density(yb[0], yb[1], cfg.base_points_per_unit, cfg.panel_points)?;
        let (g_l1, full_hs_norm_sq) = moments(&sample(&xc, &yc), &xc, &yc);
        if g_l1 <= cfg.negligible {
            return Ok(FourierMatrix {
                lambda,
                k_max,
                l_max,
                values: vec![Complex64::new(0.0, 0.0); rows * cols],
                full_hs_norm_sq,
                skipped: true,
            });
        }
    }
    let g = sample(&xr, &yr);
    let (_, full_hs_norm_sq) = moments(&g, &xr, &yr);

    // Split re/im tables for the (p, i) contraction over q.
    let mut e1_re = vec![0.0; np * nq];
    let mut e1_im = vec![0.0; np * nq];
    for p in 0..np {
        let x = xr.nodes()[p];
        for q in 0..nq {
            let v = g[p][q] * Complex64::from_polar(yr.weights()[q], -lambda * x * yr.nodes()[q] / 2.0);
            e1_re[p * nq + q] = v.re;
            e1_im[p * nq + q] = v.im;
        }
    }
    drop(g);

    let m_rows: Vec<Vec<Complex64>> = wr
        .nodes()
        .par_iter()
        .map(|&w| {
            let mut e2_re = Vec::with_capacity(nq);
            let mut e2_im = Vec::with_capacity(nq);
            for &y in yr.nodes() {
                let (s, c) = (-sign * alpha * y * w).sin_cos();
                e2_re.push(c);
                e2_im.push(s);
            }
            let mut psi = vec![0.0; cols];
            let mut m = vec![Complex64::new(0.0, 0.0); cols];
            for p in 0..np {
                let h = complex_dot(
                    &e1_re[p * nq..(p + 1) * nq],
                    &e1_im[p * nq..(p + 1) * nq],
                    &e2_re,
                    &e2_im,
                ) * xr.weights()[p];
                hermite_functions_into(w + alpha * xr.nodes()[p], &mut psi);
                for (ml, &ps) in m.iter_mut().zip(&psi) {
                    *ml += h * ps;
                }
            }
            m
        })
        .collect();

    let mut values = vec![Complex64::new(0.0, 0.0); rows * cols];
    let mut psi_k = vec![0.0; rows];
    for (i, &w) in wr.nodes().iter().enumerate() {
        hermite_functions_into(w, &mut psi_k);
        let ci = wr.weights()[i];
        for k in 0..rows {
            let a = ci * psi_k[k];
            if a == 0.0 {
                continue;
            }
            let row = &mut values[k * cols..(k + 1) * cols];
            for (v, m) in row.iter_mut().zip(&m_rows[i]) {
                *v += m * a;
            }
        }
    }

    let out = FourierMatrix {
        lambda,
        k_max,
        l_max,
        values,
        full_hs_norm_sq,
        skipped: false,
    };
    if let Some(bound) = cfg.tail_bound {
        let tail = out.relative_tail();
        if tail > bound {
            return Err(Error::TruncationTail { tail, bound });
        }
    }
    Ok(out)
}

/// `Σ (a_re + i a_im)(b_re + i b_im)` with four independent accumulators.
fn complex_dot(a_re: &[f64], a_im: &[f64], b_re: &[f64], b_im: &[f64]) -> Complex64 {
    let n = a_re.len();
    let mut re = [0.0; 4];
    let mut im = [0.0; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        for j in 0..4 {
            let i = 4 * c + j;
            re[j] += a_re[i] * b_re[i] - a_im[i] * b_im[i];
            im[j] += a_re[i] * b_im[i] + a_im[i] * b_re[i];
        }
    }
    let mut r = (re[0] + re[1]) + (re[2] + re[3]);
    let mut m = (im[0] + im[1]) + (im[2] + im[3]);
    for i in 4 * chunks..n {
        r += a_re[i] * b_re[i] - a_im[i] * b_im[i];
        m += a_re[i] * b_im[i] + a_im[i] * b_re[i];
    }
    Complex64::new(r, m)
}

/// Recomputes `f̂(λ)` with every node density doubled and returns the largest
/// entrywise difference relative to the largest entry. Above
/// [`RESOLUTION_LIMIT`] it is an error.
pub fn resolution_check(
    f: &PhysicalFunction,
    lambda: f64,
    k_max: usize,
    l_max: usize,
    cfg: &FourierConfig,
) -> Result<f64> {
    let coarse = group_fourier(f, lambda, k_max, l_max, cfg)?;
    let fine = group_fourier(f, lambda, k_max, l_max, &cfg.doubled())?;
    let scale = fine.values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let diff = coarse
        .values
        .iter()
        .zip(&fine.values)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    let rel = if scale > 0.0 { diff / scale } else { diff };
    if rel > RESOLUTION_LIMIT {
        return Err(Error::Resolution {
            disagreement: rel,
            limit: RESOLUTION_LIMIT,
            context: format!("group Fourier transform at λ={lambda}"),
        });
    }
    Ok(rel)
}

/// `∫|f|` and `∫|f|²` over the support box by a product Gauss–Legendre rule.
pub fn physical_norms(f: &PhysicalFunction, points_per_unit: f64, panel_points: usize) -> Result<(f64, f64)> {
    let [xb, yb, tb] = f.support();
    let xr = legendre_with_density(xb[0], xb[1], points_per_unit, panel_points)?;
    let yr = legendre_with_density(yb[0], yb[1], points_per_unit, panel_points)?;
    let tr = legendre_with_density(tb[0], tb[1], points_per_unit, panel_points)?;
    let per_x: Vec<(f64, f64)> = xr
        .nodes()
        .par_iter()
        .zip(xr.weights())
        .map(|(&x, &wx)| {
            let mut l1 = Vec::with_capacity(yr.count() * tr.count());
            let mut l2 = Vec::with_capacity(yr.count() * tr.count());
            for (&y, &wy) in yr.nodes().iter().zip(yr.weights()) {
                for (&t, &wt) in tr.nodes().iter().zip(tr.weights()) {
                    let a = f.eval(x, y, t).norm();
                    l1.push(wy * wt * a);
                    l2.push(wy * wt * a * a);
                }
            }
            (wx * pairwise_sum(&l1), wx * pairwise_sum(&l2))
        })
        .collect();
    let l1 = pairwise_sum(&per_x.iter().map(|p| p.0).collect::<Vec<_>>());
    let l2 = pairwise_sum(&per_x.iter().map(|p| p.1).collect::<Vec<_>>());
    Ok((l1, l2))
}

/// Transforms `f` at every node of an `n = 1` grid into a coefficient field
/// with `|k| ≤ K`, `|ℓ| ≤ L`. Real data on a symmetric grid reuse the
/// positive half through conjugation.
pub fn fourier_field(
    f: &PhysicalFunction,
    grid: Arc<FrequencyGrid>,
    k_max: usize,
    l_max: usize,
    cfg: &FourierConfig,
) -> Result<(CoefficientField, Vec<FourierMatrix>)> {
    if grid.params().n() != 1 {
        return Err(Error::InvalidArgument(
            "physical-data transforms are implemented for n = 1".into(),
        ));
    }
    let nodes = grid.nodes().to_vec();
    let mirror = f.is_real() && grid.is_symmetric();
    let compute: Vec<usize> = (0..nodes.len()).filter(|&i| !(mirror && nodes[i] < 0.0)).collect();
    let computed: Vec<Result<FourierMatrix>> = compute
        .par_iter()
        .map(|&i| group_fourier(f, nodes[i], k_max, l_max, cfg))
        .collect();
    let mut mats: Vec<Option<FourierMatrix>> = vec![None; nodes.len()];
    for (&i, m) in compute.iter().zip(computed) {
        mats[i] = Some(m?);
    }
    if mirror {
        for i in 0..nodes.len() {
            if mats[i].is_none() {
                let j = grid.mirror_of(i).expect("symmetric grid");
                mats[i] = Some(mats[j].as_ref().expect("positive half computed").conjugated());
            }
        }
    }
    let mats: Vec<FourierMatrix> = mats.into_iter().map(|m| m.expect("all nodes filled")).collect();
    let mut field = CoefficientField::zeros(grid, k_max, l_max);
    for (i, m) in mats.iter().enumerate() {
        field.slice_mut(i).copy_from_slice(&m.values);
    }
    Ok((field, mats))
}
