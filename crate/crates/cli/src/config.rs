//! Run configuration: flat `key = value` text with `#` comments and dotted
//! section keys. Every key is optional; missing keys take the defaults of
//! [`RunConfig::default`], which is the `n = 1` flat scenario.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use hdamp_core::decay::{log_times, ModeEntry, ModeSet, ProfileKind, ProfileSpec, Regularity, Tolerances};
use hdamp_core::fourier::FourierConfig;
use hdamp_core::hermite::MultiIndex;
use hdamp_core::plancherel::{build_grid, FrequencyGrid};
use hdamp_core::GroupParams;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.key) {
            (Some(l), Some(k)) => write!(f, "line {l}, key `{k}`: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "key `{k}`: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub panels: usize,
    pub points: usize,
    pub symmetric: bool,
}

/// `[0] ∪ log_times(start, end, count)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSpec {
    pub start: f64,
    pub end: f64,
    pub count: usize,
    pub include_zero: bool,
}

impl TimeSpec {
    pub fn times(&self) -> hdamp_core::Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.count + 1);
        if self.include_zero && self.start > 0.0 {
            out.push(0.0);
        }
        out.extend(log_times(self.start, self.end, self.count)?);
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    /// `e^{-(x²+y²+τ²)/2}` on a box.
    Gaussian,
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GftSpec {
    pub function: TestFunction,
    pub half_width: f64,
    pub tau_points_per_period: f64,
    pub points_per_period: f64,
    pub base_points_per_unit: f64,
    pub panel_points: usize,
    pub envelope_margin: f64,
    /// Skip threshold as a fraction of `‖f‖_{L¹}`.
    pub negligible_rel: f64,
    /// Node density of the physical-side norm quadrature.
    pub physical_points_per_unit: f64,
}

impl GftSpec {
    /// Transform settings once `‖f‖_{L¹}` is known.
    pub fn fourier_config(&self, l1: f64) -> FourierConfig {
        FourierConfig {
            tau_points_per_period: self.tau_points_per_period,
            points_per_period: self.points_per_period,
            base_points_per_unit: self.base_points_per_unit,
            panel_points: self.panel_points,
            envelope_margin: self.envelope_margin,
            negligible: self.negligible_rel * l1,
            tail_bound: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub grid: GridSpec,
    pub k_max: usize,
    pub l_max: usize,
    pub u0: ProfileSpec,
    pub u1: ProfileSpec,
    pub time: TimeSpec,
    pub window: (f64, f64),
    pub regularity: Regularity,
    pub tol: Tolerances,
    pub gft: GftSpec,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 1,
            grid: GridSpec {
                lambda_min: 1e-7,
                lambda_max: 0.125,
                panels: 40,
                points: 8,
                symmetric: false,
            },
            k_max: 8,
            l_max: 0,
            u0: ProfileSpec {
                kind: ProfileKind::Flat,
                amplitude: 1.0,
                support: (0.0, 0.125),
                modes: ModeSet::AllK,
            },
            u1: ProfileSpec::zero(),
            time: TimeSpec {
                start: 100.0,
                end: 1000.0,
                count: 32,
                include_zero: false,
            },
            window: (100.0, 1000.0),
            regularity: Regularity::L1AndL2,
            tol: Tolerances::default(),
            gft: GftSpec {
                function: TestFunction::Gaussian,
                half_width: 8.0,
                tau_points_per_period: 8.0,
                points_per_period: 5.0,
                base_points_per_unit: 3.0,
                panel_points: 16,
                envelope_margin: 7.0,
                negligible_rel: 1e-12,
                physical_points_per_unit: 4.0,
            },
            output_dir: PathBuf::from("out"),
        }
    }
}

const PROFILE_KEYS: [&str; 7] = [
    "kind",
    "amplitude",
    "support_min",
    "support_max",
    "sigma",
    "modes",
    "mode_list",
];

const KEYS: [&str; 30] = [
    "n",
    "grid.lambda_min",
    "grid.lambda_max",
    "grid.panels",
    "grid.points",
    "grid.symmetric",
    "trunc.k_max",
    "trunc.l_max",
    "time.start",
    "time.end",
    "time.count",
    "time.include_zero",
    "fit.window_min",
    "fit.window_max",
    "fit.regularity",
    "tol.u",
    "tol.grad",
    "tol.dt",
    "tol.t",
    "tol.bound_factor",
    "gft.function",
    "gft.half_width",
    "gft.tau_points_per_period",
    "gft.points_per_period",
    "gft.base_points_per_unit",
    "gft.panel_points",
    "gft.envelope_margin",
    "gft.negligible_rel",
    "gft.physical_points_per_unit",
    "output.dir",
];

fn known_key(key: &str) -> bool {
    if let Some((section, field)) = key.split_once('.') {
        if section == "u0" || section == "u1" {
            return PROFILE_KEYS.contains(&field);
        }
    }
    KEYS.contains(&key)
}

struct Entries {
    values: HashMap<String, (usize, String)>,
}

impl Entries {
    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            line: self.values.get(key).map(|(l, _)| *l),
            key: Some(key.to_string()),
            message: message.into(),
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(_, v)| v.as_str())
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, default: T, what: &str) -> Result<T, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| self.err(key, format!("expected {what}, got `{v}`"))),
        }
    }

    fn float(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let v = self.parsed(key, default, "a number")?;
        if !v.is_finite() {
            return Err(self.err(key, "value must be finite"));
        }
        Ok(v)
    }

    fn int(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        self.parsed(key, default, "a non-negative integer")
    }

    fn boolean(&self, key: &str, default: bool) -> Result<bool, ConfigError> {
        self.parsed(key, default, "`true` or `false`")
    }

    fn word<T: Copy>(&self, key: &str, default: T, choices: &[(&str, T)]) -> Result<T, ConfigError> {
        let Some(v) = self.raw(key) else { return Ok(default) };
        choices
            .iter()
            .find(|(name, _)| *name == v)
            .map(|(_, t)| *t)
            .ok_or_else(|| {
                let names: Vec<&str> = choices.iter().map(|(n, _)| *n).collect();
                self.err(key, format!("expected one of {}, got `{v}`", names.join(" | ")))
            })
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Flat,
    Bandlimited,
    Power,
    Zero,
}

#[derive(Clone, Copy)]
enum Modes {
    Ground,
    All,
    List,
}

fn kind_name(kind: &ProfileKind) -> &'static str {
    match kind {
        ProfileKind::Flat => "flat",
        ProfileKind::Bandlimited => "bandlimited",
        ProfileKind::Power { .. } => "power",
        ProfileKind::Zero => "zero",
    }
}

fn parse_index(text: &str) -> Option<MultiIndex> {
    let comps: Option<Vec<usize>> = text.split_whitespace().map(|c| c.parse().ok()).collect();
    MultiIndex::new(comps?).ok()
}

/// `k₁ … kₙ / ℓ₁ … ℓₙ / scale`, entries separated by `;`.
fn parse_mode_list(text: &str) -> Option<Vec<ModeEntry>> {
    text.split(';')
        .map(|entry| {
            let parts: Vec<&str> = entry.split('/').collect();
            let [k, l, s] = parts[..] else { return None };
            let scale: f64 = s.trim().parse().ok()?;
            Some(ModeEntry {
                k: parse_index(k)?,
                l: parse_index(l)?,
                scale,
            })
        })
        .collect()
}

fn join_index(m: &MultiIndex) -> String {
    m.components()
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn format_mode_list(entries: &[ModeEntry]) -> String {
    entries
        .iter()
        .map(|e| format!("{} / {} / {:?}", join_index(&e.k), join_index(&e.l), e.scale))
        .collect::<Vec<_>>()
        .join("; ")
}

fn profile(e: &Entries, section: &str, default: &ProfileSpec) -> Result<ProfileSpec, ConfigError> {
    let key = |f: &str| format!("{section}.{f}");
    let default_kind = match default.kind {
        ProfileKind::Flat => Kind::Flat,
        ProfileKind::Bandlimited => Kind::Bandlimited,
        ProfileKind::Power { .. } => Kind::Power,
        ProfileKind::Zero => Kind::Zero,
    };
    let kind = e.word(
        &key("kind"),
        default_kind,
        &[
            ("flat", Kind::Flat),
            ("bandlimited", Kind::Bandlimited),
            ("power", Kind::Power),
            ("zero", Kind::Zero),
        ],
    )?;
    let default_sigma = match default.kind {
        ProfileKind::Power { sigma } => sigma,
        _ => 0.0,
    };
    let sigma = e.float(&key("sigma"), default_sigma)?;
    let kind = match kind {
        Kind::Flat => ProfileKind::Flat,
        Kind::Bandlimited => ProfileKind::Bandlimited,
        Kind::Power => ProfileKind::Power { sigma },
        Kind::Zero => ProfileKind::Zero,
    };
    if !matches!(kind, ProfileKind::Power { .. }) && e.raw(&key("sigma")).is_some() {
        return Err(e.err(&key("sigma"), "only used with kind = power"));
    }
    let default_modes = match default.modes {
        ModeSet::Ground => Modes::Ground,
        ModeSet::AllK => Modes::All,
        ModeSet::List(_) => Modes::List,
    };
    let modes = e.word(
        &key("modes"),
        default_modes,
        &[("ground", Modes::Ground), ("all", Modes::All), ("list", Modes::List)],
    )?;
    let modes = match modes {
        Modes::Ground => ModeSet::Ground,
        Modes::All => ModeSet::AllK,
        Modes::List => {
            let k = key("mode_list");
            match e.raw(&k) {
                Some(text) => ModeSet::List(
                    parse_mode_list(text)
                        .ok_or_else(|| e.err(&k, "expected `k… / l… / scale` entries separated by `;`"))?,
                ),
                None => match &default.modes {
                    ModeSet::List(l) => ModeSet::List(l.clone()),
                    _ => return Err(e.err(&key("modes"), format!("`list` needs {k}"))),
                },
            }
        }
    };
    if !matches!(modes, ModeSet::List(_)) && e.raw(&key("mode_list")).is_some() {
        return Err(e.err(&key("mode_list"), "only used with modes = list"));
    }
    Ok(ProfileSpec {
        kind,
        amplitude: e.float(&key("amplitude"), default.amplitude)?,
        support: (
            e.float(&key("support_min"), default.support.0)?,
            e.float(&key("support_max"), default.support.1)?,
        ),
        modes,
    })
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|err| ConfigError {
            line: None,
            key: None,
            message: format!("cannot read {}: {err}", path.display()),
        })?;
        Self::parse(&text)
    }

    /// Parses and validates.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((k, v)) = content.split_once('=') else {
                return Err(ConfigError {
                    line: Some(line),
                    key: None,
                    message: format!("expected `key = value`, got `{content}`"),
                });
            };
            let (k, v) = (k.trim(), v.trim());
            let err = |message: &str| ConfigError {
                line: Some(line),
                key: Some(k.to_string()),
                message: message.to_string(),
            };
            if !known_key(k) {
                return Err(err("unknown key"));
            }
            if v.is_empty() {
                return Err(err("missing value"));
            }
            if let Some((first, _)) = values.insert(k.to_string(), (line, v.to_string())) {
                return Err(err(&format!("already set on line {first}")));
            }
        }
        let e = Entries { values };
        let d = Self::default();
        let cfg = Self {
            n: e.int("n", d.n)?,
            grid: GridSpec {
                lambda_min: e.float("grid.lambda_min", d.grid.lambda_min)?,
                lambda_max: e.float("grid.lambda_max", d.grid.lambda_max)?,
                panels: e.int("grid.panels", d.grid.panels)?,
                points: e.int("grid.points", d.grid.points)?,
                symmetric: e.boolean("grid.symmetric", d.grid.symmetric)?,
            },
            k_max: e.int("trunc.k_max", d.k_max)?,
            l_max: e.int("trunc.l_max", d.l_max)?,
            u0: profile(&e, "u0", &d.u0)?,
            u1: profile(&e, "u1", &d.u1)?,
            time: TimeSpec {
                start: e.float("time.start", d.time.start)?,
                end: e.float("time.end", d.time.end)?,
                count: e.int("time.count", d.time.count)?,
                include_zero: e.boolean("time.include_zero", d.time.include_zero)?,
            },
            window: (
                e.float("fit.window_min", d.window.0)?,
                e.float("fit.window_max", d.window.1)?,
            ),
            regularity: e.word(
                "fit.regularity",
                d.regularity,
                &[("l1_and_l2", Regularity::L1AndL2), ("l2_only", Regularity::L2Only)],
            )?,
            tol: Tolerances {
                u: e.float("tol.u", d.tol.u)?,
                grad: e.float("tol.grad", d.tol.grad)?,
                dt: e.float("tol.dt", d.tol.dt)?,
                t: e.float("tol.t", d.tol.t)?,
                bound_factor: e.float("tol.bound_factor", d.tol.bound_factor)?,
            },
            gft: GftSpec {
                function: e.word(
                    "gft.function",
                    d.gft.function,
                    &[("gaussian", TestFunction::Gaussian), ("zero", TestFunction::Zero)],
                )?,
                half_width: e.float("gft.half_width", d.gft.half_width)?,
                tau_points_per_period: e.float("gft.tau_points_per_period", d.gft.tau_points_per_period)?,
                points_per_period: e.float("gft.points_per_period", d.gft.points_per_period)?,
                base_points_per_unit: e.float("gft.base_points_per_unit", d.gft.base_points_per_unit)?,
                panel_points: e.int("gft.panel_points", d.gft.panel_points)?,
                envelope_margin: e.float("gft.envelope_margin", d.gft.envelope_margin)?,
                negligible_rel: e.float("gft.negligible_rel", d.gft.negligible_rel)?,
                physical_points_per_unit: e.float("gft.physical_points_per_unit", d.gft.physical_points_per_unit)?,
            },
            output_dir: e.raw("output.dir").map(PathBuf::from).unwrap_or(d.output_dir),
        };
        cfg.check().map_err(|(key, message)| e.err(key, message))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.check().map_err(|(key, message)| ConfigError {
            line: None,
            key: Some(key.to_string()),
            message,
        })
    }

    pub fn params(&self) -> GroupParams {
        GroupParams::new(self.n).expect("validated n")
    }

    pub fn frequency_grid(&self) -> hdamp_core::Result<FrequencyGrid> {
        let g = &self.grid;
        build_grid(
            self.params(),
            g.lambda_min,
            g.lambda_max,
            g.panels,
            g.points,
            g.symmetric,
        )
    }

    fn check(&self) -> Result<(), (&'static str, String)> {
        let params = GroupParams::new(self.n).map_err(|e| ("n", e.to_string()))?;
        self.frequency_grid().map_err(|e| ("grid.lambda_min", e.to_string()))?;
        self.u0.validate(params).map_err(|e| ("u0.kind", e.to_string()))?;
        self.u1.validate(params).map_err(|e| ("u1.kind", e.to_string()))?;
        let times = self.time.times().map_err(|e| ("time.start", e.to_string()))?;
        if self.regularity == Regularity::L2Only && !times.contains(&1.0) {
            return Err((
                "fit.regularity",
                "l2_only calibrates at t = 1, which the schedule must contain".into(),
            ));
        }
        let (a, b) = self.window;
        if !(a > 0.0 && b > a) {
            return Err(("fit.window_min", format!("window [{a}, {b}] needs 0 < min < max")));
        }
        let t = &self.tol;
        for (key, v) in [
            ("tol.u", t.u),
            ("tol.grad", t.grad),
            ("tol.dt", t.dt),
            ("tol.t", t.t),
            ("tol.bound_factor", t.bound_factor),
        ] {
            if !(v > 0.0) {
                return Err((key, "tolerance must be positive".into()));
            }
        }
        if !(self.gft.half_width > 0.0) {
            return Err(("gft.half_width", "must be positive".into()));
        }
        if !(self.gft.negligible_rel >= 0.0) {
            return Err(("gft.negligible_rel", "must be >= 0".into()));
        }
        if !(self.gft.physical_points_per_unit > 0.0) {
            return Err(("gft.physical_points_per_unit", "must be positive".into()));
        }
        self.gft
            .fourier_config(1.0)
            .validate()
            .map_err(|e| ("gft.points_per_period", e.to_string()))?;
        Ok(())
    }

    /// Every key, floats in shortest round-trip form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("n", self.n.to_string());
        put("grid.lambda_min", format!("{:?}", self.grid.lambda_min));
        put("grid.lambda_max", format!("{:?}", self.grid.lambda_max));
        put("grid.panels", self.grid.panels.to_string());
        put("grid.points", self.grid.points.to_string());
        put("grid.symmetric", self.grid.symmetric.to_string());
        put("trunc.k_max", self.k_max.to_string());
        put("trunc.l_max", self.l_max.to_string());
        for (section, p) in [("u0", &self.u0), ("u1", &self.u1)] {
            put(&format!("{section}.kind"), kind_name(&p.kind).into());
            if let ProfileKind::Power { sigma } = p.kind {
                put(&format!("{section}.sigma"), format!("{sigma:?}"));
            }
            put(&format!("{section}.amplitude"), format!("{:?}", p.amplitude));
            put(&format!("{section}.support_min"), format!("{:?}", p.support.0));
            put(&format!("{section}.support_max"), format!("{:?}", p.support.1));
            let modes = match &p.modes {
                ModeSet::Ground => "ground",
                ModeSet::AllK => "all",
                ModeSet::List(_) => "list",
            };
            put(&format!("{section}.modes"), modes.into());
            if let ModeSet::List(entries) = &p.modes {
                put(&format!("{section}.mode_list"), format_mode_list(entries));
            }
        }
        put("time.start", format!("{:?}", self.time.start));
        put("time.end", format!("{:?}", self.time.end));
        put("time.count", self.time.count.to_string());
        put("time.include_zero", self.time.include_zero.to_string());
        put("fit.window_min", format!("{:?}", self.window.0));
        put("fit.window_max", format!("{:?}", self.window.1));
        let reg = match self.regularity {
            Regularity::L1AndL2 => "l1_and_l2",
            Regularity::L2Only => "l2_only",
        };
        put("fit.regularity", reg.into());
        put("tol.u", format!("{:?}", self.tol.u));
        put("tol.grad", format!("{:?}", self.tol.grad));
        put("tol.dt", format!("{:?}", self.tol.dt));
        put("tol.t", format!("{:?}", self.tol.t));
        put("tol.bound_factor", format!("{:?}", self.tol.bound_factor));
        let g = &self.gft;
        let func = match g.function {
            TestFunction::Gaussian => "gaussian",
            TestFunction::Zero => "zero",
        };
        put("gft.function", func.into());
        put("gft.half_width", format!("{:?}", g.half_width));
        put("gft.tau_points_per_period", format!("{:?}", g.tau_points_per_period));
        put("gft.points_per_period", format!("{:?}", g.points_per_period));
        put("gft.base_points_per_unit", format!("{:?}", g.base_points_per_unit));
        put("gft.panel_points", g.panel_points.to_string());
        put("gft.envelope_margin", format!("{:?}", g.envelope_margin));
        put("gft.negligible_rel", format!("{:?}", g.negligible_rel));
        put(
            "gft.physical_points_per_unit",
            format!("{:?}", g.physical_points_per_unit),
        );
        put("output.dir", self.output_dir.display().to_string());
        s
    }
}
