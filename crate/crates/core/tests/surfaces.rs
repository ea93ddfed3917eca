mod common;

use mep_core::surface::{find_critical_point, Classification};
use mep_core::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Central differences of the energy, step 1e-5.
fn fd_gradient(s: &Surface64, x: &[f64]) -> Vec<f64> {
    let h = 1e-5;
    (0..2)
        .map(|i| {
            let mut p = x.to_vec();
            let mut q = x.to_vec();
            p[i] += h;
            q[i] -= h;
            (s.energy(&p).unwrap() - s.energy(&q).unwrap()) / (2.0 * h)
        })
        .collect()
}

/// Central differences of the gradient, step 1e-4.
fn fd_hessian(s: &Surface64, x: &[f64]) -> DMatrix<f64> {
    let h = 1e-4;
    let mut out = DMatrix::zeros(2, 2);
    let (mut gp, mut gm) = (vec![0.0; 2], vec![0.0; 2]);
    for j in 0..2 {
        let mut p = x.to_vec();
        let mut q = x.to_vec();
        p[j] += h;
        q[j] -= h;
        s.gradient(&p, &mut gp).unwrap();
        s.gradient(&q, &mut gm).unwrap();
        for i in 0..2 {
            out[(i, j)] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    out
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// 100 random points in a box, skipping those `reject` flags.
fn sample(seed: u64, lo: [f64; 2], hi: [f64; 2], reject: impl Fn(&[f64]) -> bool) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < 100 {
        let p = vec![rng.random_range(lo[0]..hi[0]), rng.random_range(lo[1]..hi[1])];
        if !reject(&p) {
            out.push(p);
        }
    }
    out
}

fn check_derivatives(s: &Surface64, points: &[Vec<f64>]) {
    let mut g = vec![0.0; 2];
    for x in points {
        s.gradient(x, &mut g).unwrap();
        let fd = fd_gradient(s, x);
        let diff: Vec<f64> = fd.iter().zip(&g).map(|(a, b)| a - b).collect();
        let eg = norm(&diff) / norm(&g).max(1.0);
        assert!(eg <= 1e-6, "{:?} gradient error {eg:e} at {x:?}", s.id());
        let h = s.hessian(x).unwrap();
        let eh = (fd_hessian(s, x) - &h).norm() / h.norm().max(1.0);
        assert!(eh <= 1e-5, "{:?} hessian error {eh:e} at {x:?}", s.id());
        let asym = (h[(0, 1)] - h[(1, 0)]).abs() / h.norm().max(1e-300);
        assert!(asym <= 1e-10);
    }
}

#[test]
fn example1_derivatives_match_finite_differences() {
    for v in [Example1Variant::E, Example1Variant::E1, Example1Variant::E2] {
        let pts = sample(1, [-1.5, -1.5], [1.5, 1.5], |p| p[0].hypot(p[1]) < 0.2);
        check_derivatives(&common::example1(v), &pts);
    }
}

#[test]
fn muller_derivatives_match_finite_differences() {
    let pts = sample(2, [-1.5, -0.5], [1.2, 2.0], |_| false);
    check_derivatives(&BuiltinSurface::from_id(SurfaceId::Muller), &pts);
    check_derivatives(&common::muller_literature(), &pts);
}

#[test]
fn lj_derivatives_match_finite_differences() {
    let lj = LjCell::<f64>::new(LjParams::default());
    // the cutoff is only C^1, so the Hessian stencil must not straddle a knot
    let pts = sample(3, [0.45, 0.45], [1.2, 1.2], |p| lj.near_cutoff_knot(p, 5e-3));
    check_derivatives(&common::lj(), &pts);
}

#[test]
fn example1_closed_form_values() {
    let e = common::example1(Example1Variant::E);
    assert_eq!(e.energy(&[1.0, 0.0]).unwrap(), 0.0);
    assert_eq!(e.energy(&[0.0, 1.0]).unwrap(), 1.0);
    // independent evaluation of (1 - x^2 - y^2)^2 + y^2 / (x^2 + y^2)
    let (x, y) = (0.3f64, -0.7f64);
    let r2 = x * x + y * y;
    let exact = (1.0 - r2).powi(2) + y * y / r2;
    assert!((e.energy(&[x, y]).unwrap() - exact).abs() < 1e-15);
    assert!(e.energy(&[0.0, 0.0]).is_err());

    let spectrum = |v: Example1Variant| {
        let s = common::example1(v);
        let r = find_critical_point(&s, &[0.9, 0.1], 1e-12).unwrap();
        r.eigenvalues
    };
    let close = |a: &[f64], b: [f64; 2]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9);
    assert!(close(&spectrum(Example1Variant::E), [2.0, 8.0]));
    assert!(close(&spectrum(Example1Variant::E1), [2.0, 2.0]));
    assert!(close(&spectrum(Example1Variant::E2), [1.0, 2.0]));
}

#[test]
fn lj_cutoff_knots() {
    let lj = LjCell::<f64>::new(LjParams::default());
    let full = |r: f64| 4.0 * (r.powi(-12) - r.powi(-6));
    assert_eq!(lj.pair(2.7).value, 0.0);
    assert!((lj.pair(1.9).value - full(1.9)).abs() < 1e-15);
    let (c, dc, _) = lj.cutoff(1.9);
    assert_eq!((c, dc), (1.0, 0.0));
    let (c, dc, _) = lj.cutoff(2.7);
    assert!(c.abs() < 1e-15 && dc.abs() < 1e-15);
    // enumeration beyond the interaction range adds nothing
    let wide = LjCell::<f64>::new(LjParams::default()).with_margin(3.0);
    for p in [[0.56, 0.96], [0.8, 0.75], [1.1, 0.6]] {
        assert_eq!(lj.energy(&p).unwrap(), wide.energy(&p).unwrap());
    }
}

/// Newton from every node of a 50 x 50 grid; distinct minimizers inside the box.
fn grid_minimizers(s: &Surface64, lo: [f64; 2], hi: [f64; 2]) -> Vec<Vec<f64>> {
    let mut found: Vec<Vec<f64>> = Vec::new();
    for i in 0..50 {
        for j in 0..50 {
            let g = [
                lo[0] + (hi[0] - lo[0]) * i as f64 / 49.0,
                lo[1] + (hi[1] - lo[1]) * j as f64 / 49.0,
            ];
            let Ok(r) = find_critical_point(s, &g, 1e-10) else { continue };
            let inside = (0..2).all(|d| r.location[d] >= lo[d] && r.location[d] <= hi[d]);
            if r.classification == Classification::Minimizer
                && inside
                && !found.iter().any(|f| (f[0] - r.location[0]).hypot(f[1] - r.location[1]) < 1e-6)
            {
                found.push(r.location);
            }
        }
    }
    found.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
    found
}

#[test]
fn muller_minimizers_by_grid_scan() {
    let (lo, hi) = ([-1.5, -0.5], [1.2, 2.0]);
    let printed = grid_minimizers(&BuiltinSurface::from_id(SurfaceId::Muller), lo, hi);
    assert_eq!(printed.len(), 1, "{printed:?}");
    let lit = grid_minimizers(&common::muller_literature(), lo, hi);
    assert_eq!(lit.len(), 3, "{lit:?}");
    let expect = [[-0.558, 1.442], [-0.050, 0.467], [0.623, 0.028]];
    for (f, e) in lit.iter().zip(expect) {
        assert!((f[0] - e[0]).abs() < 1e-3 && (f[1] - e[1]).abs() < 1e-3, "{f:?}");
    }
}

#[test]
fn lj_minimizers_by_grid_scan() {
    let found = grid_minimizers(&common::lj(), [0.5, 0.5], [1.1, 1.1]);
    assert!(found.len() >= 2);
    let has = |p: [f64; 2]| found.iter().any(|f| (f[0] - p[0]).abs() < 1e-6 && (f[1] - p[1]).abs() < 1e-6);
    assert!(has([0.5559435, 0.9629224]) && has([0.9629224, 0.5559435]), "{found:?}");
}

#[test]
fn critical_refinement_is_idempotent() {
    for case in common::cases() {
        for g in [&case.start, &case.end, &case.via] {
            let a = find_critical_point(&case.surface, g, 1e-10).unwrap();
            let b = find_critical_point(&case.surface, &a.location, 1e-10).unwrap();
            let moved = (a.location[0] - b.location[0]).hypot(a.location[1] - b.location[1]);
            assert!(moved <= 1e-10, "{} moved {moved:e}", case.name);
            assert!(a.grad_norm <= 1e-10);
        }
    }
}

#[test]
fn f32_surfaces_agree_with_f64() {
    let e32 = Example1::<f32>::new(Example1Variant::E2);
    let e64 = Example1::<f64>::new(Example1Variant::E2);
    let x = [0.4f32, 0.8];
    let a = e32.energy(&x).unwrap() as f64;
    let b = e64.energy(&[0.4, 0.8]).unwrap();
    assert!((a - b).abs() < 1e-5);
}

proptest! {
    #[test]
    fn example1_mirror_symmetry(x in 0.05f64..1.6, y in -1.6f64..1.6, variant in 0usize..3) {
        let v = [Example1Variant::E, Example1Variant::E1, Example1Variant::E2][variant];
        let s = common::example1(v);
        let (mut g, mut gm) = (vec![0.0; 2], vec![0.0; 2]);
        prop_assert_eq!(s.energy(&[x, y]).unwrap(), s.energy(&[-x, y]).unwrap());
        s.gradient(&[x, y], &mut g).unwrap();
        s.gradient(&[-x, y], &mut gm).unwrap();
        prop_assert!((g[0] + gm[0]).abs() <= 1e-12 * g[0].abs().max(1.0));
        prop_assert!((g[1] - gm[1]).abs() <= 1e-12 * g[1].abs().max(1.0));
    }

    #[test]
    fn classification_matches_eigen_signs(x in -1.4f64..1.1, y in -0.4f64..1.9) {
        let s = common::muller_literature();
        if let Ok(r) = find_critical_point(&s, &[x, y], 1e-10) {
            let neg = r.eigenvalues.iter().filter(|&&l| l < 0.0).count();
            let expected = match neg {
                0 => Classification::Minimizer,
                1 => Classification::Index1Saddle,
                n => Classification::Other { negative: n },
            };
            prop_assert_eq!(r.classification, expected);
        }
    }
}
