//! The four subcommands. Each returns structured results; printing and exit
//! codes are left to the binary.

use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use hdamp_core::decay::{
    fit_decay_exponent, measure, run_scenario, synth_field, verify_theorem, DecayReport, NormSeries, Observable,
    Regularity, Verdict,
};
use hdamp_core::fourier::{fourier_field, physical_norms, resolution_check, PhysicalFunction};
use hdamp_core::oracle::{integrate_mode, relative_deviation, IntegratorConfig};
use hdamp_core::plancherel::{shell_count, shell_term, tail_bound, weighted_norm_sq, TailBound};
use hdamp_core::propagator::{evolve_mode, ModeParams};
use hdamp_core::GroupParams;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig, TestFunction};

pub const PROPCHECK_THRESHOLD: f64 = 1e-8;
pub const GFT_GAP_LIMIT: f64 = 0.02;
/// Frequencies whose `‖f̂(λ)‖²_HS` is below this share of the peak are not
/// resolution-checked.
const MASS_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical error: {0}")]
    Numerical(#[from] hdamp_core::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

/// `{:.16e}`: 17 significant digits, round-trip exact.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub series: NormSeries,
    pub report: DecayReport,
    pub verdict: Verdict,
    /// A fit the `L¹ ∩ L²` check needed but could not make.
    pub refused: Option<hdamp_core::Error>,
    pub elapsed: Duration,
}

/// Synthesises the data, evolves them over the schedule and checks the
/// configured rates.
pub fn scenario(cfg: &RunConfig) -> Result<ScenarioResult, CliError> {
    let start = Instant::now();
    let grid = Arc::new(cfg.frequency_grid()?);
    let u0 = synth_field(&cfg.u0, grid.clone(), cfg.k_max, cfg.l_max)?;
    let u1 = synth_field(&cfg.u1, grid, cfg.k_max, cfg.l_max)?;
    let series = run_scenario(&u0, &u1, &cfg.time.times()?)?;
    let report = measure(&series, cfg.window);
    let refused = match cfg.regularity {
        Regularity::L1AndL2 => Observable::ALL
            .iter()
            .find(|&&o| report.fit(o).is_none())
            .and_then(|&o| fit_decay_exponent(&series, o, cfg.window).err()),
        Regularity::L2Only => None,
    };
    let verdict = verify_theorem(&report, cfg.params(), cfg.regularity, &cfg.tol);
    Ok(ScenarioResult {
        series,
        report,
        verdict,
        refused,
        elapsed: start.elapsed(),
    })
}

impl ScenarioResult {
    pub fn pass(&self) -> bool {
        self.refused.is_none() && self.verdict.pass()
    }
}

pub fn write_norms_csv<W: Write>(mut w: W, series: &NormSeries) -> io::Result<()> {
    writeln!(w, "t,norm_u,norm_dtu,norm_gradu,norm_Tu")?;
    for i in 0..series.times.len() {
        writeln!(
            w,
            "{},{},{},{},{}",
            num(series.times[i]),
            num(series.norm_u[i]),
            num(series.norm_dtu[i]),
            num(series.norm_gradu[i]),
            num(series.norm_tu[i])
        )?;
    }
    Ok(())
}

pub fn write_report_csv<W: Write>(mut w: W, verdict: &Verdict) -> io::Result<()> {
    writeln!(w, "observable,slope,stderr,expected,tol,pass")?;
    for r in &verdict.rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.observable,
            num(r.slope),
            num(r.stderr),
            num(r.expected),
            num(r.tol),
            r.pass
        )?;
    }
    Ok(())
}

fn write_file(path: PathBuf, f: impl FnOnce(&mut io::BufWriter<fs::File>) -> io::Result<()>) -> Result<(), CliError> {
    let wrap = |source| CliError::Io {
        path: path.clone(),
        source,
    };
    let file = fs::File::create(&path).map_err(wrap)?;
    let mut w = io::BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(wrap)
}

/// Runs [`scenario`] and writes `norms.csv` and `report.csv` into `out`.
pub fn cmd_scenario(cfg: &RunConfig, out: &Path) -> Result<ScenarioResult, CliError> {
    fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let res = scenario(cfg)?;
    write_file(out.join("norms.csv"), |w| write_norms_csv(w, &res.series))?;
    // a refused fit leaves only the norms behind
    if let Some(err) = res.refused {
        return Err(err.into());
    }
    write_file(out.join("report.csv"), |w| write_report_csv(w, &res.verdict))?;
    Ok(res)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropcheckResult {
    pub samples: usize,
    pub seed: u64,
    pub max_deviation: f64,
    /// `(z, t)` of the worst sample.
    pub worst: (f64, f64),
    /// Closed form against `v = 2/e`, `v' = 0` at `z = ¼`, `t = 2`.
    pub golden_deviation: f64,
}

impl PropcheckResult {
    pub fn pass(&self) -> bool {
        self.max_deviation <= PROPCHECK_THRESHOLD && self.golden_deviation <= 1e-14
    }
}

struct Sample {
    z: f64,
    t: f64,
    v0: Complex64,
    v1: Complex64,
}

fn draw_samples(samples: usize, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Sample {
        z: 0.25,
        t: 2.0,
        v0: Complex64::new(0.0, 0.0),
        v1: Complex64::new(1.0, 0.0),
    }];
    let c = |rng: &mut ChaCha8Rng| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    while out.len() < samples {
        let z = 10f64.powf(rng.gen_range(-6.0..3.0));
        let t = rng.gen_range(0.0..200.0);
        let (v0, v1) = (c(&mut rng), c(&mut rng));
        out.push(Sample { z, t, v0, v1 });
    }
    out.truncate(samples);
    out
}

/// Closed-form propagator against the adaptive ODE oracle on seeded
/// samples. Sample 0 is the degenerate golden case.
pub fn cmd_propcheck(samples: usize, seed: u64) -> Result<PropcheckResult, CliError> {
    if samples == 0 {
        return Err(ConfigError {
            line: None,
            key: Some("samples".into()),
            message: "need at least one sample".into(),
        }
        .into());
    }
    let cfg = IntegratorConfig::default();
    let draws = draw_samples(samples, seed);
    let devs: Vec<Result<f64, CliError>> = draws
        .par_iter()
        .map(|s| {
            let p = ModeParams::with_z(s.z)?;
            let a = evolve_mode(s.t, &p, s.v0, s.v1);
            let b = integrate_mode(s.t, &p, s.v0, s.v1, &cfg)?;
            Ok(relative_deviation(&a, &b))
        })
        .collect();
    let mut max_deviation = 0.0;
    let mut worst = (draws[0].z, draws[0].t);
    for (s, d) in draws.iter().zip(devs) {
        let d = d?;
        if d > max_deviation {
            max_deviation = d;
            worst = (s.z, s.t);
        }
    }
    let golden = evolve_mode(
        2.0,
        &ModeParams::with_z(0.25)?,
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    );
    let golden_deviation = (golden.v - Complex64::new(2.0 / std::f64::consts::E, 0.0))
        .norm()
        .max(golden.v_dot.norm());
    Ok(PropcheckResult {
        samples,
        seed,
        max_deviation,
        worst,
        golden_deviation,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GftResult {
    /// `‖f‖_{L²}` by physical-side quadrature.
    pub grid_norm: f64,
    /// Frequency-side norm with `c_1 = (2π)^{-4}`.
    pub plancherel_norm: f64,
    pub gap: f64,
    /// Frequency-side norm with the Lebesgue-measure constant `(2π)^{-2}`.
    pub lebesgue_norm: f64,
    pub lebesgue_gap: f64,
    /// `min_λ (‖f‖_{L¹} − ‖f̂(λ)‖_op)` over the grid nodes.
    pub rl_margin: f64,
    pub l1_norm: f64,
    /// Largest relative change under a doubled rule at the checked frequencies.
    pub resolution: f64,
    pub nodes: usize,
    pub skipped: usize,
    pub elapsed: Duration,
}

impl GftResult {
    pub fn pass(&self) -> bool {
        self.gap <= GFT_GAP_LIMIT
    }
}

fn rel_gap(a: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        return if a == 0.0 { 0.0 } else { f64::INFINITY };
    }
    (a - reference).abs() / reference
}

/// Reconstructs `‖f‖_{L²(H_1)}` through the frequency side and compares it
/// with direct quadrature.
pub fn cmd_gftcheck(cfg: &RunConfig) -> Result<GftResult, CliError> {
    let start = Instant::now();
    if cfg.n != 1 {
        return Err(ConfigError {
            line: None,
            key: Some("n".into()),
            message: "gftcheck works on H_1 only".into(),
        }
        .into());
    }
    let h = cfg.gft.half_width;
    let f = match cfg.gft.function {
        TestFunction::Gaussian => PhysicalFunction::gaussian(h)?,
        TestFunction::Zero => PhysicalFunction::zero([[-h, h], [-h, h], [-h, h]])?,
    };
    let (l1, l2_sq) = physical_norms(&f, cfg.gft.physical_points_per_unit, cfg.gft.panel_points)?;
    let fcfg = cfg.gft.fourier_config(l1);
    let grid = Arc::new(cfg.frequency_grid()?);
    let (field, mats) = fourier_field(&f, grid, cfg.k_max, cfg.l_max, &fcfg)?;
    // the hardest frequencies: the largest one still carrying mass, and the smallest.
    // Above that the entries sit at the box-truncation floor and relative
    // changes say nothing about the reconstruction.
    let peak = mats.iter().map(|m| m.hs_norm_sq()).fold(0.0, f64::max);
    let computed: Vec<f64> = mats
        .iter()
        .filter(|m| !m.skipped && m.hs_norm_sq() >= MASS_FLOOR * peak)
        .map(|m| m.lambda.abs())
        .collect();
    let mut resolution = 0.0f64;
    if let (Some(lo), Some(hi)) = (
        computed.iter().copied().reduce(f64::min),
        computed.iter().copied().reduce(f64::max),
    ) {
        for lambda in [hi, lo] {
            resolution = resolution.max(resolution_check(&f, lambda, cfg.k_max, cfg.l_max, &fcfg)?);
        }
    }
    let params = GroupParams::new(1)?;
    let freq_sq = weighted_norm_sq(&field, 0.0, 0.0);
    let lebesgue_sq = freq_sq * params.lebesgue_plancherel_constant() / params.plancherel_constant();
    let rl_margin = mats
        .par_iter()
        .map(|m| l1 - m.operator_norm())
        .reduce(|| f64::INFINITY, f64::min);
    let grid_norm = l2_sq.sqrt();
    Ok(GftResult {
        grid_norm,
        plancherel_norm: freq_sq.sqrt(),
        gap: rel_gap(freq_sq.sqrt(), grid_norm),
        lebesgue_norm: lebesgue_sq.sqrt(),
        lebesgue_gap: rel_gap(lebesgue_sq.sqrt(), grid_norm),
        rl_margin,
        l1_norm: l1,
        resolution,
        nodes: mats.len(),
        skipped: mats.iter().filter(|m| m.skipped).count(),
        elapsed: start.elapsed(),
    })
}

/// Analytic `‖f‖_{L²}` of the untruncated Gaussian, `π^{3/4}`.
pub fn gaussian_l2_norm() -> f64 {
    PI.powf(0.75)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailRow {
    pub m: usize,
    pub count: usize,
    pub term: f64,
    pub partial: f64,
}

/// Shell-by-shell partial sums of `Σ_k μ_k^{-(n+1)}` up to `K_max`, and
/// the remainder.
pub fn cmd_tailbound(cfg: &RunConfig) -> (Vec<TailRow>, TailBound) {
    let n = cfg.n;
    let mut partial = 0.0;
    let rows = (0..=cfg.k_max)
        .map(|m| {
            let term = shell_term(n, m);
            partial += term;
            TailRow {
                m,
                count: shell_count(n, m),
                term,
                partial,
            }
        })
        .collect();
    (rows, tail_bound(cfg.params(), cfg.k_max))
}
