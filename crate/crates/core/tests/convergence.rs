mod common;

use mep_core::convergence::*;
use mep_core::path::energies;
use mep_core::*;

fn print(t: &ConvergenceTable) {
    eprintln!("{} (reference barrier {:.12})", t.name, t.reference_barrier);
    for (r, e) in t.measured() {
        eprintln!("  M {:4}  e_C1 {:.4e}  e_Eb {:.4e}  e_C {:.4e}", r.m, e.e_c1, e.e_eb, e.e_c);
    }
}

fn decreasing(t: &ConvergenceTable, f: fn(&ErrorTriple) -> f64) -> bool {
    let e: Vec<f64> = t.measured().map(|(_, e)| f(e)).collect();
    e.windows(2).all(|w| w[1] < w[0])
}

/// Slopes of every error on the full ladder and without its coarsest member.
fn slope_shift(t: &ConvergenceTable) -> [f64; 2] {
    let second = t.rows[1].m;
    let full = &t.slopes;
    let trimmed = t.fit_from(second);
    let d = |a: &Option<SlopeFit>, b: &Option<SlopeFit>| match (a, b) {
        (Some(a), Some(b)) => (a.slope - b.slope).abs(),
        _ => f64::NAN,
    };
    [d(&full.e_c1, &trimmed.e_c1), d(&full.e_c, &trimmed.e_c)]
}

#[test]
fn example1_ladder_against_the_semicircle() {
    let out = run_study(&common::study("example1:E")).unwrap();
    let t = &out.table;
    print(t);
    assert!(t.all_converged());
    assert_eq!(t.reference_barrier, 1.0);
    for (_, e) in t.measured() {
        assert!(e.e_c <= e.e_c1);
        assert!(e.e_c_inf <= e.e_c + 1e-15 && e.e_c1_inf <= e.e_c1 + 1e-15);
    }
    assert!(decreasing(t, |e| e.e_c1) && decreasing(t, |e| e.e_c) && decreasing(t, |e| e.e_eb));
    let s = &t.slopes;
    assert!((s.e_c1.unwrap().slope - 1.0).abs() < 0.1);
    assert!((s.e_c.unwrap().slope - 1.0).abs() < 0.1);
    assert!((s.e_eb.unwrap().slope - 2.0).abs() < 0.1);
    for shift in slope_shift(t) {
        assert!(shift < 0.15, "{shift}");
    }
}

#[test]
fn muller_ladder() {
    let out = run_study(&common::study("muller")).unwrap();
    let t = &out.table;
    print(t);
    assert!(t.all_converged());
    for (_, e) in t.measured() {
        assert!(e.e_c <= e.e_c1);
    }
    // the barrier error depends on where the saddle falls between images and is not monotone
    assert!(decreasing(t, |e| e.e_c1) && decreasing(t, |e| e.e_c));
    // the fitted rates are stable under dropping the coarsest mesh
    for shift in slope_shift(t) {
        assert!(shift < 0.15, "{shift}");
    }
    assert!(t.slopes.e_c.unwrap().slope > 0.8);
}

#[test]
fn warm_and_cold_starts_agree() {
    let spec = common::study("example1:E2");
    let surface: Surface64 = spec.surface.build().unwrap();
    let reference = study_reference(&spec, &surface).unwrap();
    let cfg = &spec.evolve;
    for m in [9, 17] {
        let warm = path::resample_equal_arclength(&reference.path, m).unwrap();
        let cold = make_initial_path_on(&surface, &InitialPath::ArcVia(spec.via.clone()), &spec.start, &spec.end, m)
            .unwrap();
        let a = relax(&surface, &warm, cfg).unwrap();
        let b = relax(&surface, &cold, cfg).unwrap();
        assert!(a.converged && b.converged);
        assert!(a.path.max_distance(&b.path) <= 1e-7, "M = {m}");
    }
}

#[test]
fn numeric_reference_is_reproducible_and_accurate() {
    let e = common::example1(Example1Variant::E);
    let cfg = common::tight(1e-10);
    let build = || build_reference(&e, &[-1.0, 0.0], &[1.0, 0.0], &InitialPath::ArcVia(vec![0.0, 1.0]), 512, &cfg).unwrap();
    let a = build();
    let b = build();
    assert_eq!(a, b);
    let radial = a.path.images().map(|p| (p[0].hypot(p[1]) - 1.0).abs()).fold(0.0, f64::max);
    assert!(radial <= 5e-3, "{radial}");
    assert!((a.barrier - 1.0).abs() <= 1e-4);
    assert!(a.path_barrier <= a.barrier + 1e-12);
    // the derivative of the semicircle has length pi
    let d = a.derivative.at(256);
    assert!((d[0].hypot(d[1]) - std::f64::consts::PI).abs() < 1e-2);
}

#[test]
fn a_path_measured_against_itself_has_no_position_error() {
    let case = &common::cases()[3];
    let r = common::converged(case, 16, 1e-10);
    let reference = reference_from_path(&case.surface, r.path.clone(), None).unwrap();
    let e = error_triple(&r.path, &energies(&case.surface, &r.path).unwrap(), &reference, 1e-12).unwrap();
    assert_eq!(e.e_c, 0.0);
    assert!(e.e_c1 > 0.0);
    // a mesh that does not divide the reference cannot be compared without a closed form
    let coarse = common::converged(case, 5, 1e-10);
    assert!(error_triple(&coarse.path, &coarse.energy_profile, &reference, 1e-12).is_err());
}

#[test]
fn slope_fit_recovers_power_laws() {
    let h = [0.1, 0.05, 0.025, 0.0125];
    let e: Vec<f64> = h.iter().map(|x: &f64| 3.0 * x.powf(1.7)).collect();
    let f = fit_slope(&h, &e).unwrap();
    assert!((f.slope - 1.7).abs() < 1e-12);
    assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
    assert!(f.spread95.unwrap() < 1e-10);
    assert!(fit_slope(&h[..1], &e[..1]).is_none());
    assert!(fit_slope(&h[..2], &[1.0, 0.0]).is_none());
}
