use hdamp_core::oracle::{integrate_mode, relative_deviation, IntegratorConfig};
use hdamp_core::propagator::{classify_regime, evolve_mode, fg, ModeParams, Regime};
use hdamp_core::quadrature::gauss_legendre;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn seam_against_oracle() {
    let cfg = IntegratorConfig::default();
    for d in [1e-14, 1e-10, 1e-6, 1e-4] {
        for sign in [-1.0, 1.0] {
            let z = (1.0 + sign * d) / 4.0;
            let p = ModeParams::with_z(z).unwrap();
            for t in [0.5, 3.0, 20.0, 80.0] {
                let (v0, v1) = (c(0.8, -0.1), c(-0.3, 0.6));
                let a = evolve_mode(t, &p, v0, v1);
                let b = integrate_mode(t, &p, v0, v1, &cfg).unwrap();
                let dev = relative_deviation(&a, &b);
                assert!(dev <= 1e-8, "|4z-1|={d:e} sign={sign} t={t}: {dev:e}");
            }
        }
    }
}

/// `F = Σ u^j/(2j)!`, `G = t·Σ u^j/(2j+1)!` with `u = (¼ − z)t²`, summed
/// to convergence. Independent of the branch logic in `fg`.
fn fg_series(t: f64, z: f64) -> (f64, f64) {
    let u = (0.25 - z) * t * t;
    let (mut c, mut s) = (0.0, 0.0);
    let mut term_c = 1.0;
    let mut term_s = 1.0;
    for j in 0..60 {
        c += term_c;
        s += term_s;
        let jf = j as f64;
        term_c *= u / ((2.0 * jf + 1.0) * (2.0 * jf + 2.0));
        term_s *= u / ((2.0 * jf + 2.0) * (2.0 * jf + 3.0));
    }
    (c, t * s)
}

#[test]
fn seam_continuity_of_fg() {
    for d in [1e-14, 1e-10, 1e-6, 1e-4] {
        for sign in [-1.0, 1.0] {
            let z = (1.0 + sign * d) / 4.0;
            let p = ModeParams::with_z(z).unwrap();
            for t in [0.1, 1.0, 2.0, 10.0] {
                let (f, g) = fg(t, &p);
                let (fs, gs) = fg_series(t, z);
                assert!((f - fs).abs() <= 1e-7 && (g - gs).abs() <= 1e-7, "d={d:e} t={t}");
            }
        }
    }
}

#[test]
fn regimes_at_the_seam() {
    assert_eq!(classify_regime(&ModeParams::with_z(0.25).unwrap()), Regime::Degenerate);
    assert_eq!(
        classify_regime(&ModeParams::with_z(0.25 * (1.0 + 1e-4)).unwrap()),
        Regime::Hyperbolic
    );
    assert_eq!(
        classify_regime(&ModeParams::with_z(0.25 * (1.0 - 1e-4)).unwrap()),
        Regime::Elliptic
    );
}

/// `v'' + v' + z v` by central differences of the closed form.
fn residual(z: f64, t: f64, v0: Complex64, v1: Complex64) -> f64 {
    let p = ModeParams::with_z(z).unwrap();
    let h = 1e-3;
    let at = |s: f64| evolve_mode(s, &p, v0, v1);
    let (m, c0, pl) = (at(t - h), at(t), at(t + h));
    let vpp = (pl.v - 2.0 * c0.v + m.v) / (h * h);
    (vpp + c0.v_dot + z * c0.v).norm()
}

#[test]
fn closed_form_solves_the_ode() {
    for z in [1e-6, 0.01, 0.2, 0.25, 0.3, 4.0, 50.0] {
        for t in [0.5, 2.0, 7.0] {
            let r = residual(z, t, c(1.0, 0.5), c(-0.2, 0.0));
            // O(h²·v'''') truncation of the difference quotient
            assert!(r < 1e-5 * (1.0 + z * z), "z={z} t={t}: {r:e}");
        }
    }
}

#[test]
fn energy_dissipation_identity() {
    let gl = gauss_legendre(20).unwrap();
    for z in [1e-5, 0.1, 0.24, 0.25, 0.26, 3.0, 400.0] {
        let p = ModeParams::with_z(z).unwrap();
        let (v0, v1) = (c(0.9, 0.2), c(-0.4, 0.7));
        let dt = 0.5f64.min(1.0 / z.sqrt());
        let mut e_prev = evolve_mode(0.0, &p, v0, v1).energy(z);
        let mut t = 0.0;
        while t < 40.0 {
            let rule = gl.mapped(t, t + dt).unwrap();
            let dissipated = rule.integrate(|s| evolve_mode(s, &p, v0, v1).v_dot.norm_sqr());
            let e = evolve_mode(t + dt, &p, v0, v1).energy(z);
            assert!(e <= e_prev + 1e-15 * e_prev.max(1.0), "z={z} t={t}: energy grew");
            let res = (e - e_prev + dissipated).abs();
            assert!(res <= 1e-10, "z={z} t={t}: residual {res:e}");
            e_prev = e;
            t += dt;
        }
    }
}

fn oracle_cfg() -> IntegratorConfig {
    IntegratorConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_matches_oracle(
        log_z in -6.0f64..3.0,
        t in 0.0f64..60.0,
        a in -1.0f64..1.0, b in -1.0f64..1.0, cc in -1.0f64..1.0, d in -1.0f64..1.0,
    ) {
        let p = ModeParams::with_z(10f64.powf(log_z)).unwrap();
        let (v0, v1) = (c(a, b), c(cc, d));
        let x = evolve_mode(t, &p, v0, v1);
        let y = integrate_mode(t, &p, v0, v1, &oracle_cfg()).unwrap();
        prop_assert!(relative_deviation(&x, &y) <= 1e-8);
    }

    #[test]
    fn per_mode_energy_bound(log_z in -6.0f64..3.0, t in 0.0f64..200.0, a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let z = 10f64.powf(log_z);
        let p = ModeParams::with_z(z).unwrap();
        let s0 = evolve_mode(0.0, &p, c(a, 0.0), c(b, 0.0));
        let s = evolve_mode(t, &p, c(a, 0.0), c(b, 0.0));
        prop_assert!(s.energy(z) <= s0.energy(z) * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn linearity(log_z in -4.0f64..2.0, t in 0.0f64..30.0, a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let p = ModeParams::with_z(10f64.powf(log_z)).unwrap();
        let x = evolve_mode(t, &p, c(a, 0.0), c(0.0, 0.0));
        let y = evolve_mode(t, &p, c(0.0, 0.0), c(b, 0.0));
        let s = evolve_mode(t, &p, c(a, 0.0), c(b, 0.0));
        prop_assert!((x.v + y.v - s.v).norm() <= 1e-14 * (1.0 + s.v.norm()));
        prop_assert!((x.v_dot + y.v_dot - s.v_dot).norm() <= 1e-14 * (1.0 + s.v_dot.norm()));
    }
}
