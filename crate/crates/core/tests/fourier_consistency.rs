use std::f64::consts::PI;
use std::sync::Arc;

use hdamp_core::fourier::{fourier_field, group_fourier, physical_norms, FourierConfig, PhysicalFunction, Smoothness};
use hdamp_core::plancherel::build_grid;
use hdamp_core::GroupParams;
use num_complex::Complex64;

const BOX: [[f64; 2]; 3] = [[-7.0, 7.0], [-7.0, 7.0], [-7.0, 7.0]];

fn lopsided(x: f64, y: f64, t: f64) -> f64 {
    (1.0 + x - 0.5 * y + 0.3 * x * y) * (-(x * x + 1.3 * y * y + (t - 0.4) * (t - 0.4)) / 2.0).exp()
}

#[test]
fn real_data_have_hermitian_symmetry() {
    // flagged complex so the −λ matrix is computed from scratch
    let f = PhysicalFunction::new(
        |x, y, t| Complex64::new(lopsided(x, y, t), 0.0),
        BOX,
        Smoothness::Analytic,
    )
    .unwrap();
    let cfg = FourierConfig::default();
    for lambda in [0.3, 1.7] {
        let a = group_fourier(&f, lambda, 6, 6, &cfg).unwrap();
        let b = group_fourier(&f, -lambda, 6, 6, &cfg).unwrap();
        let scale = a.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (p, q) in a.values.iter().zip(&b.values) {
            assert!((p.conj() - q).norm() <= 1e-8 * scale.max(1.0), "λ={lambda}: {p} vs {q}");
        }
    }
}

#[test]
fn radial_gaussian_is_diagonal() {
    let f = PhysicalFunction::gaussian(7.0).unwrap();
    let cfg = FourierConfig::default();
    let m = group_fourier(&f, 0.8, 8, 8, &cfg).unwrap();
    for k in 0..=8 {
        for l in 0..=8 {
            if k != l {
                assert!(m.get(k, l).norm() <= 1e-10, "({k},{l}) = {}", m.get(k, l));
            }
        }
        assert!(m.get(k, k).norm() > 0.0);
    }
}

#[test]
fn operator_norm_stays_below_l1_norm() {
    let f = PhysicalFunction::real(lopsided, BOX, Smoothness::Analytic).unwrap();
    let (l1, _) = physical_norms(&f, 4.0, 16).unwrap();
    let cfg = FourierConfig::default();
    for lambda in [-3.0, -0.2, 0.05, 0.9, 6.0] {
        let m = group_fourier(&f, lambda, 10, 10, &cfg).unwrap();
        assert!(m.operator_norm() <= l1 * (1.0 + 1e-6), "λ={lambda}");
    }
}

#[test]
fn untruncated_mass_matches_physical_norm() {
    // ∫‖f̂(λ)‖²_HS |λ| dλ / (2π)² against ‖f‖², with the untruncated HS norm
    let f = PhysicalFunction::gaussian(7.0).unwrap();
    let (_, l2_sq) = physical_norms(&f, 4.0, 16).unwrap();
    assert!((l2_sq / PI.powf(1.5) - 1.0).abs() <= 1e-9);
    let grid = Arc::new(build_grid(GroupParams::new(1).unwrap(), 1e-3, 12.0, 10, 8, true).unwrap());
    let (_, mats) = fourier_field(&f, grid.clone(), 2, 2, &FourierConfig::default()).unwrap();
    let total: f64 = mats
        .iter()
        .zip(grid.weights())
        .map(|(m, w)| w * m.full_hs_norm_sq * m.lambda.abs())
        .sum::<f64>()
        / (2.0 * PI).powi(2);
    assert!((total / l2_sq - 1.0).abs() <= 2e-3, "{total} vs {l2_sq}");
}

#[test]
fn zero_function_transforms_to_zero() {
    let f = PhysicalFunction::zero(BOX).unwrap();
    let grid = Arc::new(build_grid(GroupParams::new(1).unwrap(), 0.1, 1.0, 2, 4, true).unwrap());
    let (field, _) = fourier_field(&f, grid, 4, 4, &FourierConfig::default()).unwrap();
    assert!(field.is_zero());
}
