//! Synthetic frequency-side data, norm time series and decay-rate fits.
//!
//! Data classes are modelled by their behaviour near `λ = 0`: coefficients
//! that stay bounded there stand in for `L¹ ∩ L²` data (their transforms are
//! bounded in operator norm), profiles that vanish near zero or blow up in a
//! square-integrable way stand in for `L²`-only data.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::GroupParams;
use crate::hermite::{GradedBasis, MultiIndex};
use crate::plancherel::{weighted_norm, CoefficientField, FrequencyGrid};
use crate::propagator::{evolve_mode, ModeParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileKind {
    /// `amplitude` on the support.
    Flat,
    /// `amplitude·exp(1 − 1/(1 − s²))`, `s` the support mapped to `(−1, 1)`.
    Bandlimited,
    /// `amplitude·|λ|^σ` on the support.
    Power {
        sigma: f64,
    },
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeEntry {
    pub k: MultiIndex,
    pub l: MultiIndex,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModeSet {
    /// `k = ℓ = 0` with scale 1.
    Ground,
    /// Every `|k| ≤ K_max` with `ℓ = 0` and scale 1.
    AllK,
    List(Vec<ModeEntry>),
}

/// A coefficient profile `û(λ)_{k,ℓ} = scale_{k,ℓ}·p(|λ|)` on a mode set.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    pub amplitude: f64,
    /// `[a, b]` in `|λ|`, `0 ≤ a < b`.
    pub support: (f64, f64),
    pub modes: ModeSet,
}

impl ProfileSpec {
    pub fn zero() -> Self {
        Self {
            kind: ProfileKind::Zero,
            amplitude: 0.0,
            support: (0.0, 1.0),
            modes: ModeSet::Ground,
        }
    }

    /// Profile value at `|λ|`, before the per-mode scale.
    pub fn radial(&self, abs_lambda: f64) -> f64 {
        let (a, b) = self.support;
        if abs_lambda < a || abs_lambda > b {
            return 0.0;
        }
        match self.kind {
            ProfileKind::Flat => self.amplitude,
            ProfileKind::Bandlimited => {
                let s = (2.0 * abs_lambda - a - b) / (b - a);
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    self.amplitude * (1.0 - 1.0 / (1.0 - s * s)).exp()
                }
            }
            ProfileKind::Power { sigma } => self.amplitude * abs_lambda.powf(sigma),
            ProfileKind::Zero => 0.0,
        }
    }

    pub fn validate(&self, params: GroupParams) -> Result<()> {
        let (a, b) = self.support;
        if !(a >= 0.0) || !(b > a) || !b.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "profile support [{a}, {b}] needs 0 <= a < b"
            )));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::InvalidArgument("profile amplitude must be finite".into()));
        }
        match self.kind {
            ProfileKind::Bandlimited if a == 0.0 => {
                return Err(Error::InvalidArgument(
                    "bandlimited profiles must be supported away from 0".into(),
                ));
            }
            ProfileKind::Power { sigma } => {
                let limit = -(params.n() as f64 + 1.0) / 2.0;
                if !sigma.is_finite() {
                    return Err(Error::InvalidArgument("power exponent must be finite".into()));
                }
                if sigma <= limit && a == 0.0 {
                    return Err(Error::NotSquareIntegrable(format!(
                        "|λ|^{sigma} is not square integrable against |λ|^n dλ near 0 (needs σ > {limit})"
                    )));
                }
            }
            _ => {}
        }
        if let ModeSet::List(entries) = &self.modes {
            for e in entries {
                if e.k.dim() != params.n() || e.l.dim() != params.n() {
                    return Err(Error::Shape(format!(
                        "mode ({}, {}) does not match n = {}",
                        e.k,
                        e.l,
                        params.n()
                    )));
                }
                if !e.scale.is_finite() {
                    return Err(Error::InvalidArgument("mode scale must be finite".into()));
                }
            }
        }
        Ok(())
    }
}

/// Realises `spec` on `grid` with truncations `K_max`, `L_max`.
pub fn synth_field(
    spec: &ProfileSpec,
    grid: Arc<FrequencyGrid>,
    k_max: usize,
    l_max: usize,
) -> Result<CoefficientField> {
    let params = grid.params();
    spec.validate(params)?;
    let mut field = CoefficientField::zeros(grid.clone(), k_max, l_max);
    if spec.kind == ProfileKind::Zero {
        return Ok(field);
    }
    let n = params.n();
    let entries: Vec<(usize, usize, f64)> = match &spec.modes {
        ModeSet::Ground => vec![(0, 0, 1.0)],
        ModeSet::AllK => (0..field.k_basis().len()).map(|k| (k, 0, 1.0)).collect(),
        ModeSet::List(list) => {
            let mut out = Vec::with_capacity(list.len());
            for e in list {
                let k = field
                    .k_basis()
                    .position(&e.k)
                    .ok_or_else(|| Error::Shape(format!("mode k = {} lies outside K_max = {k_max}", e.k)))?;
                let l = field
                    .l_basis()
                    .position(&e.l)
                    .ok_or_else(|| Error::Shape(format!("mode ℓ = {} lies outside L_max = {l_max}", e.l)))?;
                out.push((k, l, e.scale));
            }
            out
        }
    };
    debug_assert_eq!(field.k_basis().dim(), n);
    for (i, &lambda) in grid.nodes().iter().enumerate() {
        let p = spec.radial(lambda.abs());
        if p == 0.0 {
            continue;
        }
        for &(k, l, scale) in &entries {
            let o = field.offset(i, k, l);
            field.values_mut()[o] += Complex64::new(p * scale, 0.0);
        }
    }
    Ok(field)
}

/// Evolved coefficients `û(t)` and `∂_t û(t)`.
pub fn evolve_field(
    u0: &CoefficientField,
    u1: &CoefficientField,
    t: f64,
) -> Result<(CoefficientField, CoefficientField)> {
    check_layout(u0, u1)?;
    let grid = u0.grid();
    let mu: Vec<f64> = u0.k_basis().indices().iter().map(|k| k.eigenvalue() as f64).collect();
    let nl = u0.l_basis().len();
    let mut u = u0.clone();
    let mut ut = u0.clone();
    for (i, &lambda) in grid.nodes().iter().enumerate() {
        let (a, b) = (u0.slice(i), u1.slice(i));
        let mut vs = Vec::with_capacity(a.len());
        let mut vds = Vec::with_capacity(a.len());
        for (k, &m) in mu.iter().enumerate() {
            let p = ModeParams::new(lambda, m)?;
            for l in 0..nl {
                let j = k * nl + l;
                if a[j] == Complex64::new(0.0, 0.0) && b[j] == Complex64::new(0.0, 0.0) {
                    vs.push(a[j]);
                    vds.push(a[j]);
                    continue;
                }
                let s = evolve_mode(t, &p, a[j], b[j]);
                vs.push(s.v);
                vds.push(s.v_dot);
            }
        }
        u.slice_mut(i).copy_from_slice(&vs);
        ut.slice_mut(i).copy_from_slice(&vds);
    }
    Ok((u, ut))
}

fn check_layout(u0: &CoefficientField, u1: &CoefficientField) -> Result<()> {
    if !u0.same_layout(u1) || u0.k_max() != u1.k_max() || u0.l_max() != u1.l_max() {
        return Err(Error::Shape("u0 and u1 must share grid and truncations".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    U,
    Dt,
    Grad,
    T,
}

impl Observable {
    pub const ALL: [Observable; 4] = [Observable::U, Observable::Grad, Observable::Dt, Observable::T];

    pub fn name(&self) -> &'static str {
        match self {
            Observable::U => "u",
            Observable::Dt => "dtu",
            Observable::Grad => "gradu",
            Observable::T => "Tu",
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMeta {
    pub n: usize,
    pub grid_nodes: usize,
    pub k_max: usize,
    pub l_max: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormSeries {
    pub times: Vec<f64>,
    pub norm_u: Vec<f64>,
    pub norm_dtu: Vec<f64>,
    pub norm_gradu: Vec<f64>,
    pub norm_tu: Vec<f64>,
    pub meta: SeriesMeta,
}

impl NormSeries {
    pub fn values(&self, obs: Observable) -> &[f64] {
        match obs {
            Observable::U => &self.norm_u,
            Observable::Dt => &self.norm_dtu,
            Observable::Grad => &self.norm_gradu,
            Observable::T => &self.norm_tu,
        }
    }
}

/// Norms of the solution at each time: `(0,0)` for `u`, `(1,1)` for
/// `∇_hor u`, `(2,0)` for `Tu` and `(0,0)` of the time derivative.
pub fn run_scenario(u0: &CoefficientField, u1: &CoefficientField, times: &[f64]) -> Result<NormSeries> {
    check_layout(u0, u1)?;
    if times.windows(2).any(|w| !(w[0] < w[1])) || times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidArgument(
            "times must be finite, >= 0 and strictly increasing".into(),
        ));
    }
    let rows: Vec<Result<[f64; 4]>> = times
        .par_iter()
        .map(|&t| {
            let (u, ut) = evolve_field(u0, u1, t)?;
            Ok([
                weighted_norm(&u, 0.0, 0.0),
                weighted_norm(&ut, 0.0, 0.0),
                weighted_norm(&u, 1.0, 1.0),
                weighted_norm(&u, 2.0, 0.0),
            ])
        })
        .collect();
    let mut series = NormSeries {
        times: times.to_vec(),
        norm_u: Vec::with_capacity(times.len()),
        norm_dtu: Vec::with_capacity(times.len()),
        norm_gradu: Vec::with_capacity(times.len()),
        norm_tu: Vec::with_capacity(times.len()),
        meta: SeriesMeta {
            n: u0.grid().params().n(),
            grid_nodes: u0.grid().len(),
            k_max: u0.k_max(),
            l_max: u0.l_max(),
        },
    };
    for r in rows {
        let [a, b, c, d] = r?;
        series.norm_u.push(a);
        series.norm_dtu.push(b);
        series.norm_gradu.push(c);
        series.norm_tu.push(d);
    }
    Ok(series)
}

/// `count` times from `start` to `end`, logarithmically spaced in `1 + t`.
pub fn log_times(start: f64, end: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 || !(start >= 0.0) || !(end > start) || !end.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "log schedule needs count >= 2 and 0 <= start < end (got {count}, [{start}, {end}])"
        )));
    }
    let (a, b) = ((1.0 + start).ln(), (1.0 + end).ln());
    let mut out: Vec<f64> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp() - 1.0)
        .collect();
    out[0] = start;
    out[count - 1] = end;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Least-squares fit of `log(norm)` against `log(1+t)` over `window`.
pub fn fit_decay_exponent(series: &NormSeries, obs: Observable, window: (f64, f64)) -> Result<Fit> {
    let values = series.values(obs);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in series.times.iter().zip(values) {
        if t < window.0 || t > window.1 {
            continue;
        }
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Fit(format!(
                "{obs} norm is {v} at t = {t}; cannot take logarithms"
            )));
        }
        xs.push((1.0 + t).ln());
        ys.push(v.ln());
    }
    if xs.len() < 8 {
        return Err(Error::Fit(format!(
            "{obs}: {} samples in window [{}, {}], need at least 8",
            xs.len(),
            window.0,
            window.1
        )));
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = (rss / (m - 2.0) / sxx).sqrt();
    Ok(Fit {
        slope,
        intercept,
        stderr,
        window,
        samples: xs.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    L2Only,
    L1AndL2,
}

/// Measured quantities of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub window: (f64, f64),
    /// Fits per observable, in [`Observable::ALL`] order; `None` where the
    /// fit was refused.
    pub fits: Vec<(Observable, Option<Fit>)>,
    /// `max_{t ≥ 1} norm(t)(1+t)^r / (norm(1)·2^r)` with the `L²`-only
    /// rates `r`; present when the series contains `t = 1`.
    pub bound_ratios: Vec<(Observable, f64)>,
}

impl DecayReport {
    pub fn fit(&self, obs: Observable) -> Option<&Fit> {
        self.fits.iter().find(|(o, _)| *o == obs).and_then(|(_, f)| f.as_ref())
    }

    pub fn bound_ratio(&self, obs: Observable) -> Option<f64> {
        self.bound_ratios.iter().find(|(o, _)| *o == obs).map(|(_, r)| *r)
    }
}

/// Rates of the `L²`-only estimate: bounded `u`, `(1+t)^{-1/2}` for the
/// gradient, `(1+t)^{-1}` for the time derivative.
pub fn l2_only_rate(obs: Observable) -> Option<f64> {
    match obs {
        Observable::U => Some(0.0),
        Observable::Grad => Some(0.5),
        Observable::Dt => Some(1.0),
        Observable::T => None,
    }
}

/// Expected slopes for `L¹ ∩ L²` data: `−Q/4`, `−Q/4 − ½`, `−Q/4 − 1`, `−Q/4 − 1`.
pub fn expected_slope(params: GroupParams, obs: Observable) -> f64 {
    let base = -(params.homogeneous_dim() as f64) / 4.0;
    match obs {
        Observable::U => base,
        Observable::Grad => base - 0.5,
        Observable::Dt | Observable::T => base - 1.0,
    }
}

/// Fits every observable and evaluates the calibrated bound ratios.
pub fn measure(series: &NormSeries, window: (f64, f64)) -> DecayReport {
    let fits = Observable::ALL
        .iter()
        .map(|&o| (o, fit_decay_exponent(series, o, window).ok()))
        .collect();
    let mut bound_ratios = Vec::new();
    if let Some(cal) = series.times.iter().position(|&t| t == 1.0) {
        for o in Observable::ALL {
            let Some(rate) = l2_only_rate(o) else { continue };
            let values = series.values(o);
            let reference = values[cal] * 2f64.powf(rate);
            let worst = series
                .times
                .iter()
                .zip(values)
                .filter(|(t, _)| **t >= 1.0)
                .map(|(t, v)| v * (1.0 + t).powf(rate))
                .fold(0.0f64, f64::max);
            let ratio = if reference > 0.0 {
                worst / reference
            } else if worst == 0.0 {
                1.0
            } else {
                f64::INFINITY
            };
            bound_ratios.push((o, ratio));
        }
    }
    DecayReport {
        window,
        fits,
        bound_ratios,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub u: f64,
    pub grad: f64,
    pub dt: f64,
    pub t: f64,
    /// Allowed growth over the `t = 1` calibration in `L²`-only mode.
    pub bound_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            u: 0.05,
            grad: 0.05,
            dt: 0.10,
            t: 0.10,
            bound_factor: 1.05,
        }
    }
}

impl Tolerances {
    pub fn for_observable(&self, obs: Observable) -> f64 {
        match obs {
            Observable::U => self.u,
            Observable::Grad => self.grad,
            Observable::Dt => self.dt,
            Observable::T => self.t,
        }
    }
}

/// One row of `report.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerdictRow {
    pub observable: Observable,
    pub slope: f64,
    pub stderr: f64,
    /// Target slope, or in `L²`-only mode the exponent `−r` of the bound.
    pub expected: f64,
    /// Slope tolerance, or in `L²`-only mode the calibration factor.
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub rows: Vec<VerdictRow>,
}

impl Verdict {
    pub fn pass(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.pass)
    }
}

/// Compares a report with the rates for the given data class.
///
/// `L1AndL2`: every fitted slope within its tolerance of
/// [`expected_slope`]; a missing fit fails. `L2Only`: the calibrated bound
/// ratios of `u`, `∇_hor u`, `∂_t u` stay below `bound_factor`; slopes are
/// reported for information.
pub fn verify_theorem(report: &DecayReport, params: GroupParams, regularity: Regularity, tol: &Tolerances) -> Verdict {
    let mut rows = Vec::new();
    for obs in Observable::ALL {
        let fit = report.fit(obs);
        let (slope, stderr) = fit.map_or((f64::NAN, f64::NAN), |f| (f.slope, f.stderr));
        match regularity {
            Regularity::L1AndL2 => {
                let expected = expected_slope(params, obs);
                let t = tol.for_observable(obs);
                rows.push(VerdictRow {
                    observable: obs,
                    slope,
                    stderr,
                    expected,
                    tol: t,
                    pass: fit.is_some() && (slope - expected).abs() <= t,
                });
            }
            Regularity::L2Only => {
                let Some(rate) = l2_only_rate(obs) else { continue };
                let ratio = report.bound_ratio(obs);
                rows.push(VerdictRow {
                    observable: obs,
                    slope,
                    stderr,
                    expected: -rate,
                    tol: tol.bound_factor,
                    pass: ratio.is_some_and(|r| r <= tol.bound_factor),
                });
            }
        }
    }
    Verdict { rows }
}

/// The `k` basis of a field as multi-indices, for callers building mode lists.
pub fn basis_indices(n: usize, k_max: usize) -> Vec<MultiIndex> {
    GradedBasis::new(n, k_max).indices().to_vec()
}
