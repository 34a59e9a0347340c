use hdamp_core::hermite::{gauss_hermite, hermite_function, hermite_functions};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use std::f64::consts::PI;

/// Physicists' `H_0..=H_max` at a rational point, exactly.
fn exact_hermite(max: usize, x: &BigRational) -> Vec<BigRational> {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut out = vec![BigRational::from_integer(BigInt::from(1)), &two * x];
    for m in 1..max {
        let mm = BigRational::from_integer(BigInt::from(2 * m));
        let next = &two * x * &out[m] - mm * &out[m - 1];
        out.push(next);
    }
    out.truncate(max + 1);
    out
}

#[test]
fn matches_exact_polynomials() {
    for (num, den) in [(13, 10), (-7, 4), (1, 3), (5, 2)] {
        let xr = BigRational::new(BigInt::from(num), BigInt::from(den));
        let x = num as f64 / den as f64;
        let exact = exact_hermite(15, &xr);
        for (m, h) in exact.iter().enumerate() {
            let mut ln_fact = 0.0;
            for j in 1..=m {
                ln_fact += (j as f64).ln();
            }
            let ln_a = -0.5 * (m as f64 * 2f64.ln() + ln_fact + 0.5 * PI.ln());
            let want = h.to_f64().unwrap() * (ln_a - x * x / 2.0).exp();
            let got = hermite_function(m, x);
            assert!(
                (got - want).abs() <= 1e-13 * want.abs().max(1e-3),
                "m={m} x={x}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn fifth_function_at_one_point_three() {
    let xr = BigRational::new(BigInt::from(13), BigInt::from(10));
    let h5 = exact_hermite(5, &xr)[5].to_f64().unwrap();
    // H_5(x) = 32x⁵ − 160x³ + 120x
    let x = 1.3f64;
    assert!((h5 - (32.0 * x.powi(5) - 160.0 * x.powi(3) + 120.0 * x)).abs() < 1e-12);
    let want = h5 * (-x * x / 2.0).exp() / (PI.sqrt() * 32.0 * 120.0).sqrt();
    assert!((hermite_function(5, x) - want).abs() < 1e-14);
}

#[test]
fn orthonormal_up_to_order_sixty() {
    let rule = gauss_hermite(90).unwrap();
    let table: Vec<Vec<f64>> = rule.nodes().iter().map(|&x| hermite_functions(60, x)).collect();
    let mut worst = 0.0f64;
    for a in 0..=60 {
        for b in 0..=a {
            let s: f64 = (0..rule.count())
                .map(|i| rule.envelope_weight(i) * table[i][a] * table[i][b])
                .sum();
            let want = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((s - want).abs());
        }
    }
    assert!(worst <= 1e-10, "orthonormality error {worst:e}");
}

#[test]
fn gauss_hermite_high_moment() {
    let rule = gauss_hermite(40).unwrap();
    let got = rule.integrate(|x| x.powi(78));
    // Γ(39.5) = √π·Π_{j<39}(j + ½)
    let mut want = PI.sqrt();
    for j in 0..39 {
        want *= j as f64 + 0.5;
    }
    assert!((got / want - 1.0).abs() <= 1e-10, "{got:e} vs {want:e}");
}

#[test]
fn large_order_is_finite_and_small() {
    let v = hermite_function(2000, 10.0);
    assert!(v.is_finite());
    assert!(v.abs() <= 1.0);
    let row = hermite_functions(2000, 10.0);
    assert!((row[2000] - v).abs() <= 1e-12);
}

#[test]
fn leading_sign_is_positive() {
    for m in 0..30 {
        let far = (2.0 * m as f64 + 1.0).sqrt() + 3.0;
        assert!(hermite_function(m, far) > 0.0, "m={m}");
    }
}
