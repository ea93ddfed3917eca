mod common;

use mep_core::path::*;
use mep_core::*;

fn arc(case: &common::Case, m: usize) -> Path64 {
    make_initial_path_on(&case.surface, &InitialPath::ArcVia(case.via.clone()), &case.start, &case.end, m).unwrap()
}

fn ex1(v: Example1Variant) -> common::Case {
    common::cases().into_iter().find(|c| c.surface.id() == SurfaceId::Example1(v)).unwrap()
}

fn run(case: &common::Case, m: usize, config: &EvolveConfig) -> EvolveResult64 {
    evolve(&case.surface, &arc(case, m), config).unwrap()
}

fn explicit(method: Method, stepper: Stepper) -> EvolveConfig {
    EvolveConfig {
        method,
        stepper,
        ..common::tight(1e-8)
    }
}

#[test]
fn endpoints_are_never_moved() {
    let case = ex1(Example1Variant::E2);
    for cfg in [
        explicit(Method::Neb, Stepper::Euler),
        explicit(Method::Neb, Stepper::Fire),
        explicit(Method::String, Stepper::Euler),
    ] {
        let init = arc(&case, 16);
        let r = evolve(&case.surface, &init, &cfg).unwrap();
        assert!(r.converged);
        assert_eq!(r.path.image(0), init.image(0));
        assert_eq!(r.path.image(16), init.image(16));
    }
}

#[test]
fn converged_example1_path_is_mirror_symmetric_and_circular() {
    for v in [Example1Variant::E, Example1Variant::E1, Example1Variant::E2] {
        let case = ex1(v);
        let r = run(&case, 16, &explicit(Method::Neb, Stepper::Euler));
        assert!(r.converged);
        for k in 0..=16 {
            let (a, b) = (r.path.image(k), r.path.image(16 - k));
            assert!((a[0] + b[0]).abs() <= 1e-8 && (a[1] - b[1]).abs() <= 1e-8, "{v:?} k = {k}");
            if v == Example1Variant::E {
                let radius = a[0].hypot(a[1]);
                assert!((radius - 1.0).abs() <= 2e-2, "radius {radius}");
            }
        }
        let top = r.path.image(8);
        assert!(top[0].abs() < 1e-8 && (top[1] - 1.0).abs() < 1e-8);
    }
}

#[test]
fn string_method_equidistributes() {
    let case = ex1(Example1Variant::E2);
    let r = run(&case, 20, &explicit(Method::String, Stepper::Euler));
    assert!(r.converged);
    let p = &r.path;
    let chords: Vec<f64> = (0..20)
        .map(|k| (p.image(k + 1)[0] - p.image(k)[0]).hypot(p.image(k + 1)[1] - p.image(k)[1]))
        .collect();
    let mean = chords.iter().sum::<f64>() / 20.0;
    assert!(chords.iter().all(|c| (c - mean).abs() <= 1e-8 * mean));
}

#[test]
fn converged_force_is_within_tolerance() {
    for case in common::cases() {
        let r = common::converged(&case, 16, 1e-9);
        let f = neb_force(&case.surface, &r.path, 1.0).unwrap();
        assert!(f.sup_norm() <= 1e-9, "{}: {:e}", case.name, f.sup_norm());
        assert_eq!(f.at(0).iter().chain(f.at(16)).copied().fold(0.0, f64::max), 0.0);
    }
}

#[test]
fn stationary_path_stops_immediately() {
    let case = ex1(Example1Variant::E);
    let cfg = explicit(Method::Neb, Stepper::Euler);
    let r = run(&case, 12, &cfg);
    let again = evolve(&case.surface, &r.path, &cfg).unwrap();
    assert!(again.converged && again.steps <= 1);
    let polished = newton_polish(&case.surface, &r.path, &cfg).unwrap();
    assert!(polished.converged && polished.path.max_distance(&r.path) < 1e-7);
}

#[test]
fn fire_euler_and_newton_agree() {
    for case in common::cases().iter().filter(|c| c.name != "lj-cell") {
        let a = run(case, 12, &explicit(Method::Neb, Stepper::Euler));
        let b = run(case, 12, &explicit(Method::Neb, Stepper::Fire));
        let c = common::converged(case, 12, 1e-8);
        assert!(a.converged && b.converged, "{}", case.name);
        let scale = a.path.coords().iter().fold(1.0f64, |m, x| m.max(x.abs()));
        assert!(a.path.max_distance(&b.path) <= 1e-6 * scale, "{}", case.name);
        assert!(a.path.max_distance(&c.path) <= 1e-6 * scale, "{}", case.name);
    }
}

#[test]
fn upwind_matches_saddle_switch_at_convergence() {
    for case in common::cases() {
        let r = common::converged(&case, 24, 1e-10);
        let e = energies(&case.surface, &r.path).unwrap();
        // unimodal along the converged path
        let k = Barrier::from_energies(&e).k_max;
        assert!(e[..=k].windows(2).all(|w| w[0] < w[1]), "{}", case.name);
        assert!(e[k..].windows(2).all(|w| w[0] > w[1]), "{}", case.name);
        let up = tangent_upwind(&case.surface, &r.path).unwrap();
        let sw = tangent_saddle_switch(&r.path, SaddleIndex::new(k)).unwrap();
        assert_eq!(up.differences, sw.differences, "{}", case.name);
    }
}

#[test]
fn linear_path_through_the_origin_is_rejected() {
    let e = common::example1(Example1Variant::E);
    let r = make_initial_path_on(&e, &InitialPath::Linear, &[-1.0, 0.0], &[1.0, 0.0], 8);
    assert!(r.is_err());
    let r = make_initial_path_on(&e, &InitialPath::Linear, &[-1.0, 0.0], &[1.0, 0.0], 9);
    let bad = r.and_then(|p| evolve(&e, &p, &EvolveConfig::default()));
    assert!(bad.is_err());
}

#[test]
fn single_precision_run() {
    let e = Example1::<f32>::new(Example1Variant::E2);
    let init = make_initial_path(&InitialPath::ArcVia(vec![0.0, 1.0]), &[-1.0f32, 0.0], &[1.0, 0.0], 8).unwrap();
    let cfg = EvolveConfig {
        auto_dt: true,
        ..EvolveConfig::default().with_tol(1e-4)
    };
    let r = evolve(&e, &init, &cfg).unwrap();
    assert!(r.converged);
    assert!((r.barrier().value - 1.0).abs() < 1e-3);
}
