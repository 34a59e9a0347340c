//! Closed-form evolution of a single frequency mode.
//!
//! Each coefficient `v(t) = û(t,λ)_{k,ℓ}` obeys `v'' + v' + z·v = 0` with
//! `z = μ_k|λ|`. Writing `β² = ¼ − z`,
//!
//! ```text
//! v(t)  = e^{-t/2} [ v0·F + (v0/2 + v1)·G ]
//! v'(t) = e^{-t/2} [ −z·G·v0 + (F − G/2)·v1 ]
//! F = C(β²t²),  G = t·S(β²t²),  C(u) = cosh √u,  S(u) = sinh √u / √u
//! ```
//!
//! where `C` and `S` continue analytically to `u < 0` (cos, sin) and are
//! replaced by their Taylor series for `|u| < 1e-6`, so nothing is singular at
//! the double root `4z = 1`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Half-width of the band around `4z = 1` classified as degenerate.
pub const DEGENERATE_BAND: f64 = 1e-6;
/// Below this `|β²t²|` the Taylor series of `C` and `S` is used.
pub const SERIES_RADIUS: f64 = 1e-6;

/// Parameters of one projected mode: frequency `λ ≠ 0` and oscillator
/// eigenvalue `μ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeParams {
    lambda: f64,
    mu: f64,
}

impl ModeParams {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "λ must be finite and nonzero, got {lambda}"
            )));
        }
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidArgument(format!("μ must be positive, got {mu}")));
        }
        Ok(Self { lambda, mu })
    }

    /// A mode with `λ = z`, `μ = 1`.
    pub fn with_z(z: f64) -> Result<Self> {
        Self::new(z, 1.0)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `z = μ|λ|`
    pub fn z(&self) -> f64 {
        self.mu * self.lambda.abs()
    }

    /// `β² = ¼ − z`
    pub fn beta_sq(&self) -> f64 {
        0.25 - self.z()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `4z > 1`: complex roots, damped oscillation.
    Hyperbolic,
    /// `4z = 1` up to [`DEGENERATE_BAND`]: double root `−½`.
    Degenerate,
    /// `4z < 1`: two real roots.
    Elliptic,
}

pub fn classify_regime(p: &ModeParams) -> Regime {
    let d = 4.0 * p.z() - 1.0;
    if d > DEGENERATE_BAND {
        Regime::Hyperbolic
    } else if d < -DEGENERATE_BAND {
        Regime::Elliptic
    } else {
        Regime::Degenerate
    }
}

/// Value and derivative of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub v: Complex64,
    pub v_dot: Complex64,
}

impl ModeState {
    /// `½|v'|² + ½z|v|²`
    pub fn energy(&self, z: f64) -> f64 {
        0.5 * self.v_dot.norm_sqr() + 0.5 * z * self.v.norm_sqr()
    }
}

fn c_series(u: f64) -> f64 {
    1.0 + u / 2.0 * (1.0 + u / 12.0 * (1.0 + u / 30.0))
}

fn s_series(u: f64) -> f64 {
    1.0 + u / 6.0 * (1.0 + u / 20.0 * (1.0 + u / 42.0))
}

/// `C(u)`: `cosh √u` for `u > 0`, `cos √−u` for `u < 0`.
pub fn c_fn(u: f64) -> f64 {
    if u.abs() < SERIES_RADIUS {
        c_series(u)
    } else if u > 0.0 {
        u.sqrt().cosh()
    } else {
        (-u).sqrt().cos()
    }
}

/// `S(u)`: `sinh √u / √u` for `u > 0`, `sin √−u / √−u` for `u < 0`.
pub fn s_fn(u: f64) -> f64 {
    if u.abs() < SERIES_RADIUS {
        s_series(u)
    } else if u > 0.0 {
        let r = u.sqrt();
        r.sinh() / r
    } else {
        let r = (-u).sqrt();
        r.sin() / r
    }
}

/// Undamped pair `(F, G)` at time `t ≥ 0`. `F = ∂_t G`. In the elliptic
/// regime both grow like `e^{βt}`; use [`damped_fg`] for long times.
pub fn fg(t: f64, p: &ModeParams) -> (f64, f64) {
    let b2 = p.beta_sq();
    let u = b2 * t * t;
    (c_fn(u), t * s_fn(u))
}

/// `e^{-t/2}` times `F`, `G` and `F − G/2`, evaluated without overflow or
/// cancellation for any `t ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedPair {
    pub f: f64,
    pub g: f64,
    pub f_minus_half_g: f64,
}

pub fn damped_fg(t: f64, p: &ModeParams) -> DampedPair {
    let z = p.z();
    let b2 = p.beta_sq();
    let u = b2 * t * t;
    if u.abs() < SERIES_RADIUS {
        let env = (-0.5 * t).exp();
        let f = env * c_series(u);
        let g = env * t * s_series(u);
        return DampedPair {
            f,
            g,
            f_minus_half_g: f - 0.5 * g,
        };
    }
    if b2 > 0.0 {
        let beta = b2.sqrt();
        // β − ½ written without cancellation for small z
        let slow = -z / (beta + 0.5);
        let fast = -beta - 0.5;
        let ep = (slow * t).exp();
        let em = (fast * t).exp();
        let f = 0.5 * (ep + em);
        let g = if 2.0 * beta * t > 30.0 {
            (ep - em) / (2.0 * beta)
        } else {
            em * (2.0 * beta * t).exp_m1() / (2.0 * beta)
        };
        let f_minus_half_g = if beta > 0.25 {
            // 1 − 1/(2β) = −z / (β(β + ½))
            0.5 * ep * (-z / (beta * (beta + 0.5))) + 0.5 * em * (1.0 + 0.5 / beta)
        } else {
            f - 0.5 * g
        };
        DampedPair { f, g, f_minus_half_g }
    } else {
        let omega = (-b2).sqrt();
        let env = (-0.5 * t).exp();
        let (s, c) = (omega * t).sin_cos();
        let f = env * c;
        let g = env * s / omega;
        DampedPair {
            f,
            g,
            f_minus_half_g: f - 0.5 * g,
        }
    }
}

/// State at time `t` of the mode started from `(v0, v1)`.
pub fn evolve_mode(t: f64, p: &ModeParams, v0: Complex64, v1: Complex64) -> ModeState {
    let d = damped_fg(t, p);
    let z = p.z();
    ModeState {
        v: v0 * (d.f + 0.5 * d.g) + v1 * d.g,
        v_dot: v0 * (-z * d.g) + v1 * d.f_minus_half_g,
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
    fn regimes() {
        assert_eq!(classify_regime(&ModeParams::with_z(1.0).unwrap()), Regime::Hyperbolic);
        assert_eq!(classify_regime(&ModeParams::with_z(0.25).unwrap()), Regime::Degenerate);
        assert_eq!(classify_regime(&ModeParams::with_z(0.1).unwrap()), Regime::Elliptic);
        assert_eq!(
            classify_regime(&ModeParams::new(-0.5, 0.5).unwrap()),
            Regime::Degenerate
        );
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ModeParams::new(0.0, 1.0).is_err());
        assert!(ModeParams::new(1.0, 0.0).is_err());
        assert!(ModeParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn fg_examples() {
        let deg = ModeParams::with_z(0.25).unwrap();
        for t in [0.0, 0.3, 7.0, 150.0] {
            let (f, g) = fg(t, &deg);
            assert_eq!(f, 1.0);
            assert!((g - t).abs() <= 1e-15 * t);
        }
        for z in [1e-6, 0.1, 0.25, 3.0] {
            assert_eq!(fg(0.0, &ModeParams::with_z(z).unwrap()), (1.0, 0.0));
        }
        let (f, g) = fg(PI, &ModeParams::with_z(0.5).unwrap());
        assert!(f.abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn damped_pair_agrees_with_fg() {
        for z in [1e-7, 1e-3, 0.1, 0.2, 0.2499, 0.25, 0.2501, 0.5, 2.0, 400.0] {
            let p = ModeParams::with_z(z).unwrap();
            for t in [0.0, 0.01, 1.0, 3.3, 17.0, 60.0] {
                let (f, g) = fg(t, &p);
                let env = (-0.5 * t).exp();
                let d = damped_fg(t, &p);
                let scale = env * (f.abs() + g.abs() + 1.0);
                assert!((d.f - env * f).abs() <= 1e-13 * scale, "z={z} t={t}");
                assert!((d.g - env * g).abs() <= 1e-13 * scale, "z={z} t={t}");
                assert!(
                    (d.f_minus_half_g - env * (f - 0.5 * g)).abs() <= 1e-12 * scale,
                    "z={z} t={t}"
                );
            }
        }
    }

    #[test]
    fn evolve_examples() {
        let p = ModeParams::with_z(0.7).unwrap();
        let s = evolve_mode(0.0, &p, Complex64::new(0.3, -1.0), Complex64::new(2.0, 0.5));
        assert_eq!(s.v, Complex64::new(0.3, -1.0));
        assert_eq!(s.v_dot, Complex64::new(2.0, 0.5));

        let s = evolve_mode(2.0, &ModeParams::with_z(0.25).unwrap(), c(0.0), c(1.0));
        assert!((s.v.re - 2.0 * (-1f64).exp()).abs() < 1e-15);
        assert!(s.v_dot.norm() < 1e-15);

        let s = evolve_mode(PI, &ModeParams::with_z(0.5).unwrap(), c(1.0), c(0.0));
        assert!((s.v.re - (-PI / 2.0).exp()).abs() < 1e-15);

        let s = evolve_mode(4.0, &ModeParams::with_z(3.0 / 16.0).unwrap(), c(1.0), c(0.0));
        let want = (-2f64).exp() * (1f64.cosh() + 2.0 * 1f64.sinh());
        assert!((s.v.re - want).abs() < 1e-15);
    }

    #[test]
    fn f_is_time_derivative_of_g() {
        let h = 1e-5;
        for z in [1e-4, 0.1, 0.2499999, 0.25, 0.3, 5.0] {
            let p = ModeParams::with_z(z).unwrap();
            for t in [0.5, 2.0, 9.0] {
                let (f, _) = fg(t, &p);
                let dg = (fg(t + h, &p).1 - fg(t - h, &p).1) / (2.0 * h);
                assert!((f - dg).abs() <= 1e-6 * f.abs().max(1.0), "z={z} t={t}");
            }
        }
    }

    #[test]
    fn seam_is_continuous() {
        let at = ModeParams::with_z(0.25).unwrap();
        for dz in [1e-9, -1e-9] {
            let p = ModeParams::with_z(0.25 + dz).unwrap();
            for t in [0.0, 1.0, 10.0, 50.0, 100.0] {
                let (f0, g0) = fg(t, &at);
                let (f1, g1) = fg(t, &p);
                // |∂F/∂z|, |∂G/∂z| ≤ t²/2·e^{t/2}·(1 + t) near the seam
                let tol = (0.5 * t * t * (1.0 + t) * (0.5 * t).exp()) * dz.abs() + 1e-14 * (1.0 + t);
                assert!((f0 - f1).abs() <= tol && (g0 - g1).abs() <= tol, "dz={dz} t={t}");
            }
        }
    }

    #[test]
    fn elliptic_envelope() {
        for z in [1e-5, 0.01, 0.1, 0.2, 0.249] {
            let p = ModeParams::with_z(z).unwrap();
            let beta = p.beta_sq().sqrt();
            for i in 0..=200 {
                let t = 0.5 * i as f64;
                let d = damped_fg(t, &p);
                let lhs = d.f + beta * d.g;
                let exact = ((-0.5 + beta) * t).exp();
                assert!((lhs - exact).abs() <= 1e-12 * exact.max(1e-300));
                assert!(lhs <= (-z * t).exp() * (1.0 + 1e-12));
            }
        }
    }
}
