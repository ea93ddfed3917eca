mod common;

use mep_core::analysis::*;
use mep_core::convergence::build_reference;
use mep_core::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_direction(rng: &mut ChaCha8Rng, m: usize) -> Field64 {
    let mut v = NodeField::from_flat(2, (0..2 * (m + 1)).map(|_| rng.random_range(-1.0..1.0)).collect());
    v.at_mut(0).fill(0.0);
    v.at_mut(m).fill(0.0);
    v
}

fn shifted(p: &Path64, v: &Field64, eps: f64) -> Path64 {
    let c = p.coords().iter().zip(v.as_flat()).map(|(x, d)| x + eps * d).collect();
    DiscretePath::from_flat(2, c).unwrap()
}

/// Largest relative mismatch between the assembled Jacobian and central
/// differences of the residual over `n` random directions.
fn jacobian_mismatch(s: &Surface64, p: &Path64, n: usize, seed: u64) -> f64 {
    let lin = linearize_fh(s, p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps = 1e-6;
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let v = random_direction(&mut rng, p.m());
        let plus = residual_fh_at(s, &shifted(p, &v, eps), lin.k_sad).unwrap().residual;
        let minus = residual_fh_at(s, &shifted(p, &v, -eps), lin.k_sad).unwrap().residual;
        let jv = lin.apply(&v);
        // the end rows are not part of the operator
        let rows = 2..2 * p.m();
        let fd: Vec<f64> = plus.as_flat()[rows.clone()]
            .iter()
            .zip(&minus.as_flat()[rows.clone()])
            .map(|(a, b)| (a - b) / (2.0 * eps))
            .collect();
        let err = fd.iter().zip(&jv.as_flat()[rows]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(err / jv.sup_norm().max(1e-12));
    }
    worst
}

#[test]
fn jacobian_matches_central_differences() {
    for case in common::cases() {
        let p = common::converged(&case, 16, 1e-10).path;
        let err = jacobian_mismatch(&case.surface, &p, 20, 5);
        assert!(err <= 1e-5, "{}: {err:e}", case.name);
        // away from stationarity as well
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let bump = random_direction(&mut rng, 16);
        let scale = 1e-2 * p.min_spacing() * 16.0;
        let off = shifted(&p, &bump, scale);
        let err = jacobian_mismatch(&case.surface, &off, 20, 6);
        assert!(err <= 1e-5, "{} perturbed: {err:e}", case.name);
    }
}

#[test]
fn jacobian_is_linear() {
    let case = &common::cases()[2];
    let p = common::converged(case, 12, 1e-10).path;
    let lin = linearize_fh(&case.surface, &p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (u, v) = (random_direction(&mut rng, 12), random_direction(&mut rng, 12));
    let w = NodeField::from_flat(2, u.as_flat().iter().zip(v.as_flat()).map(|(a, b)| 2.0 * a - 3.0 * b).collect());
    let (au, av, aw) = (lin.apply(&u), lin.apply(&v), lin.apply(&w));
    for i in 0..aw.as_flat().len() {
        let expect = 2.0 * au.as_flat()[i] - 3.0 * av.as_flat()[i];
        assert!((aw.as_flat()[i] - expect).abs() <= 1e-10 * aw.sup_norm().max(1.0));
    }
    // boundary rows stay zero
    assert!(aw.at(0).iter().chain(aw.at(12)).all(|&x| x == 0.0));
}

#[test]
fn residual_on_the_semicircle_is_first_order() {
    let e = common::example1(Example1Variant::E);
    let ms = [32usize, 64, 128, 256];
    let r: Vec<f64> = ms.iter().map(|&m| residual_fh(&e, &common::circle(m)).unwrap().yh_norm).collect();
    let h: Vec<f64> = ms.iter().map(|&m| 1.0 / m as f64).collect();
    let slope = common::loglog_slope(&h, &r);
    assert!(slope >= 0.9, "{slope}");
}

#[test]
fn converged_path_has_small_perpendicular_residual() {
    let tol = 1e-10;
    for case in common::cases() {
        let p = common::converged(&case, 24, tol).path;
        let r = residual_fh(&case.surface, &p).unwrap();
        assert!(r.perpendicular.sup_norm() <= 10.0 * tol, "{}: {:e}", case.name, r.perpendicular.sup_norm());
        assert!(r.endpoint_residual <= 1e-9, "{}", case.name);
    }
}

#[test]
fn lambda_sign_pattern_on_every_surface() {
    for case in common::cases() {
        let reference = build_reference(
            &case.surface,
            &case.start,
            &case.end,
            &InitialPath::ArcVia(case.via.clone()),
            512,
            &common::tight(1e-10),
        )
        .unwrap();
        let l = lambda_profile(&case.surface, &reference.path).unwrap();
        assert!(l.sign_pattern, "{}", case.name);
        assert!(l.c_lower > 0.0 && l.c_upper >= l.c_lower, "{}", case.name);
        assert!(l.slope_start > 0.0 && l.slope_saddle < 0.0 && l.slope_end > 0.0, "{}", case.name);
    }
}

#[test]
fn stability_gain_is_uniform_on_example1() {
    let case = &common::cases()[0];
    let gains: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&m| {
            let p = common::converged(case, m, 1e-10).path;
            stability_gain(&case.surface, &p, 100, 7).unwrap().gain
        })
        .collect();
    let lo = gains.iter().copied().fold(f64::MAX, f64::min);
    let hi = gains.iter().copied().fold(0.0, f64::max);
    assert!(lo > 0.0 && hi <= 1.2 * lo, "{gains:?}");
}

#[test]
fn stability_gain_depends_only_on_the_seed() {
    let case = &common::cases()[1];
    let p = common::converged(case, 16, 1e-10).path;
    let a = stability_gain(&case.surface, &p, 30, 3).unwrap();
    let b = stability_gain(&case.surface, &p, 30, 3).unwrap();
    assert_eq!(a, b);
    assert!(a.gain <= a.random_min && a.gain <= a.inverse_min);
}
