//! Penner saddle points, resolvent and trajectories.

use std::f64::consts::TAU;

use proptest::prelude::*;
use szego::curve::{curve_point, real_crossing};
use szego::penner::{
    density_scaling, match_sets, r_penner, resolvent, ri1b_residual, saddle_from_laguerre,
    saddle_newton, sd_residual, trajectory, winding_number, PennerParams,
};
use szego::Complex64;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn laguerre_saddles_satisfy_identity(n in 1usize..16, g in 0.02f64..2.0) {
        let cfg = saddle_from_laguerre(n, g).unwrap();
        prop_assert!((cfg.reciprocal_sum() + n as f64).norm() < 1e-10 * n as f64);
        let scale = n as f64 * (1.0 + 1.0 / g);
        prop_assert!(cfg.residual < 1e-10 * scale, "{}", cfg.residual);
    }

    #[test]
    fn critical_r_is_a_square(re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let z = Complex64::new(re, im);
        prop_assume!(z.norm() > 1e-3);
        let r = r_penner(z, 1.0).unwrap();
        prop_assert!((r - (1.0 - 1.0 / z).powi(2)).norm() < 1e-12 * (1.0 + r.norm()));
    }

    #[test]
    fn ovals_close_once_around_origin(t in 0.1f64..1.5) {
        let tr = trajectory(t, Complex64::new(real_crossing(t), 0.0), 2e-3, 200_000).unwrap();
        prop_assert!(tr.closed);
        prop_assert_eq!(tr.winding, 1);
        prop_assert!(tr.closure_gap < 1e-6);
        prop_assert!(tr.level_drift < 1e-8);
    }
}

#[test]
fn params_relations() {
    let p = PennerParams::new(1.0).unwrap();
    assert_eq!(p.coupling(10), 0.1);
    assert!((p.alpha(10) + 11.0).abs() < 1e-12);
    assert_eq!(p.charge(), -1.0);
    assert!(PennerParams::new(0.0).is_err());
}

#[test]
fn resolvent_residue_sum() {
    // (1/2 pi i) oint omega_n dz over |z| = 10 equals 1
    let cfg = saddle_from_laguerre(12, 1.0 / 12.0).unwrap();
    let m = 512;
    let sum: Complex64 = (0..m)
        .map(|j| {
            let z = Complex64::from_polar(10.0, TAU * j as f64 / m as f64);
            resolvent(&cfg, z).unwrap() * z
        })
        .sum::<Complex64>()
        / m as f64;
    assert!((sum - 1.0).norm() < 1e-12);
}

#[test]
fn schwinger_dyson_decays_on_circle() {
    let worst = |n: usize| {
        let cfg = saddle_from_laguerre(n, 1.0 / n as f64).unwrap();
        (0..64)
            .map(|j| sd_residual(&cfg, Complex64::from_polar(5.0, TAU * (j as f64 + 0.5) / 64.0)).unwrap())
            .fold(0.0, f64::max)
    };
    let (a, b, c) = (worst(25), worst(50), worst(100));
    assert!(a > b && b > c);
    // roughly O(1/n): doubling n at least does not slow the decay below 1/2^0.5
    assert!(c < a / 2.0, "{a} {b} {c}");
}

#[test]
fn ri1b_at_random_points() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for &(n, g) in &[(5usize, 0.2), (10, 0.1), (20, 0.05)] {
        let cfg = saddle_from_laguerre(n, g).unwrap();
        for _ in 0..20 {
            let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            assert!(ri1b_residual(&cfg, z).unwrap() < 1e-8);
        }
    }
}

#[test]
fn newton_from_default_init() {
    // report which basin the roots-of-unity start lands in
    for &(n, g) in &[(5usize, 0.2), (10, 0.1)] {
        let init = szego::penner::default_init(n, 0.0);
        let reference = saddle_from_laguerre(n, g).unwrap();
        match saddle_newton(n, g, &init) {
            Ok(cfg) => {
                let (_, d) = match_sets(&cfg.points, &reference.points).unwrap();
                assert!((cfg.reciprocal_sum() + n as f64).norm() < 1e-10);
                eprintln!("n = {n}: default start converged, distance to Laguerre saddle {d:e}");
            }
            Err(e) => eprintln!("n = {n}: default start did not converge: {e}"),
        }
    }
}

#[test]
fn density_mass_preserved_under_scaling() {
    let (t, big_t) = (0.4, 2.0);
    let m = 2048;
    let h = TAU / m as f64;
    let mass: f64 = (0..m)
        .map(|j| {
            let theta = h * (j as f64 + 0.5);
            let w = curve_point(t, theta).unwrap();
            let dw = -Complex64::i() * w / (w - 1.0);
            density_scaling(big_t * w, t, big_t).unwrap() * big_t * dw.norm() * h
        })
        .sum();
    assert!((mass - 1.0).abs() < 1e-10, "{mass}");
    let p = curve_point(t, 0.8).unwrap();
    assert!(
        (density_scaling(2.0 * p, t, 2.0).unwrap() - 0.5 * density_scaling(p, t, 1.0).unwrap()).abs() < 1e-14
    );
}

#[test]
fn winding_of_square() {
    let sq = [
        Complex64::new(1.0, 1.0),
        Complex64::new(-1.0, 1.0),
        Complex64::new(-1.0, -1.0),
        Complex64::new(1.0, -1.0),
    ];
    assert_eq!(winding_number(&sq), 1);
    let shifted: Vec<_> = sq.iter().map(|z| z + 5.0).collect();
    assert_eq!(winding_number(&shifted), 0);
}
