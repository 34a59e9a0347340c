//! Independent reference for the mode propagator: adaptive Dormand–Prince
//! 5(4) integration of `(v, v')' = (v', −v' − z·v)`.
//!
//! Real and imaginary parts are carried as one real 4-vector. The error test is
//! norm-wise on that vector: `err ≤ abs_tol·σ(t) + rel_tol·‖y‖∞` where
//! `σ(t) = ‖y(0)‖∞·e^{-t/2}` follows the damping envelope, so the absolute
//! floor shrinks with the solution instead of swamping it at late times.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::propagator::{ModeParams, ModeState};

/// Largest `z` the oracle accepts; above it the closed form is used directly.
pub const MAX_ORACLE_Z: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-13,
            abs_tol: 1e-14,
            max_steps: 20_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol >= 1e-14) || !(self.abs_tol >= 1e-14) {
            return Err(Error::InvalidArgument(format!(
                "tolerances must be >= 1e-14 (rel {:e}, abs {:e})",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidArgument("max_steps must be positive".into()));
        }
        Ok(())
    }
}

// Dormand–Prince 5(4) tableau. The system is autonomous, so the nodes c_i
// are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type State = [f64; 4];

#[inline]
fn rhs(z: f64, y: &State) -> State {
    [y[2], y[3], -y[2] - z * y[0], -y[3] - z * y[1]]
}

#[inline]
fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..4 {
            out[i] += h * c * k[i];
        }
    }
    out
}

fn inf_norm(y: &State) -> f64 {
    y.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Integrates the mode ODE from `0` to `t`.
pub fn integrate_mode(
    t: f64,
    p: &ModeParams,
    v0: Complex64,
    v1: Complex64,
    cfg: &IntegratorConfig,
) -> Result<ModeState> {
    cfg.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be finite and >= 0, got {t}")));
    }
    let z = p.z();
    if z > MAX_ORACLE_Z {
        return Err(Error::OracleRange { z, limit: MAX_ORACLE_Z });
    }
    let mut y: State = [v0.re, v0.im, v1.re, v1.im];
    let scale0 = inf_norm(&y);
    if t == 0.0 || scale0 == 0.0 {
        return Ok(to_state(&y));
    }

    const SAFETY: f64 = 0.9;
    const ALPHA: f64 = 0.17;
    const BETA: f64 = 0.04;
    let mut time = 0.0;
    let mut h = (1e-3 / (1.0 + z.sqrt())).min(t);
    let mut err_prev: f64 = 1e-4;
    let mut k1 = rhs(z, &y);
    let mut steps = 0usize;

    while time < t {
        if steps >= cfg.max_steps {
            return Err(Error::StepLimit {
                max_steps: cfg.max_steps,
                reached: time,
                target: t,
            });
        }
        steps += 1;
        let last = time + h >= t;
        if last {
            h = t - time;
        }
        let k2 = rhs(z, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = rhs(z, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(z, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(z, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = rhs(
            z,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs(z, &y_new);

        let mut err_vec = [0.0; 4];
        for i in 0..4 {
            err_vec[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let envelope = scale0 * (-0.5 * (time + h)).exp();
        let sc = cfg.abs_tol * envelope + cfg.rel_tol * inf_norm(&y).max(inf_norm(&y_new));
        let err = (inf_norm(&err_vec) / sc).max(1e-300);

        if err <= 1.0 {
            time = if last { t } else { time + h };
            y = y_new;
            k1 = k7;
            let fac = (SAFETY * err.powf(-ALPHA) * err_prev.powf(BETA)).clamp(0.2, 10.0);
            err_prev = err.max(1e-4);
            h *= fac;
        } else {
            let fac = (SAFETY * err.powf(-ALPHA)).clamp(0.2, 1.0);
            h *= fac;
        }
        if h < 1e-14 * t.max(1.0) && time < t {
            return Err(Error::StepLimit {
                max_steps: steps,
                reached: time,
                target: t,
            });
        }
    }
    Ok(to_state(&y))
}

fn to_state(y: &State) -> ModeState {
    ModeState {
        v: Complex64::new(y[0], y[1]),
        v_dot: Complex64::new(y[2], y[3]),
    }
}

/// Norm-wise relative deviation `‖a − b‖∞ / ‖b‖∞` over the state
/// `(Re v, Im v, Re v', Im v')`.
pub fn relative_deviation(a: &ModeState, reference: &ModeState) -> f64 {
    let d = [
        a.v.re - reference.v.re,
        a.v.im - reference.v.im,
        a.v_dot.re - reference.v_dot.re,
        a.v_dot.im - reference.v_dot.im,
    ];
    let r = [reference.v.re, reference.v.im, reference.v_dot.re, reference.v_dot.im];
    let denom = inf_norm(&r);
    if denom == 0.0 {
        inf_norm(&d)
    } else {
        inf_norm(&d) / denom
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_time_returns_data() {
        let p = ModeParams::with_z(0.3).unwrap();
        let s = integrate_mode(0.0, &p, Complex64::new(1.0, 2.0), c(-1.0), &IntegratorConfig::default()).unwrap();
        assert_eq!(s.v, Complex64::new(1.0, 2.0));
        assert_eq!(s.v_dot, c(-1.0));
    }

    #[test]
    fn closed_form_golden_values() {
        let cfg = IntegratorConfig::default();
        let s = integrate_mode(2.0, &ModeParams::with_z(0.25).unwrap(), c(0.0), c(1.0), &cfg).unwrap();
        assert!((s.v.re - 2.0 * (-1f64).exp()).abs() < 1e-11);
        let s = integrate_mode(PI, &ModeParams::with_z(0.5).unwrap(), c(1.0), c(0.0), &cfg).unwrap();
        assert!((s.v.re - (-PI / 2.0).exp()).abs() < 1e-11);
    }

    #[test]
    fn refuses_large_z_and_bad_config() {
        let p = ModeParams::with_z(2e4).unwrap();
        assert!(matches!(
            integrate_mode(1.0, &p, c(1.0), c(0.0), &IntegratorConfig::default()),
            Err(Error::OracleRange { .. })
        ));
        let bad = IntegratorConfig {
            rel_tol: 1e-16,
            ..Default::default()
        };
        assert!(integrate_mode(1.0, &ModeParams::with_z(1.0).unwrap(), c(1.0), c(0.0), &bad).is_err());
    }

    #[test]
    fn step_limit_is_reported() {
        let cfg = IntegratorConfig {
            max_steps: 5,
            ..Default::default()
        };
        let r = integrate_mode(100.0, &ModeParams::with_z(10.0).unwrap(), c(1.0), c(0.0), &cfg);
        match r {
            Err(Error::StepLimit { reached, target, .. }) => {
                assert!(reached < target);
            }
            other => panic!("expected step limit, got {other:?}"),
        }
    }
}
