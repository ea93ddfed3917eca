#![allow(dead_code)]

use std::f64::consts::PI;

use mep_core::convergence::StudySpec;
use mep_core::surface::find_critical_point;
use mep_core::*;

/// Upper unit semicircle from (-1, 0) to (1, 0), equally spaced in angle.
pub fn circle(m: usize) -> Path64 {
    DiscretePath::new(
        (0..=m)
            .map(|k| {
                let t = PI * k as f64 / m as f64;
                vec![-t.cos(), t.sin()]
            })
            .collect(),
    )
    .unwrap()
}

pub fn example1(v: Example1Variant) -> Surface64 {
    BuiltinSurface::Example1(Example1::new(v))
}

/// Müller surface with the literature sign of the fourth amplitude.
pub fn muller_literature() -> Surface64 {
    let mut p = MullerParams::default();
    p.t[3] = 15.0;
    BuiltinSurface::Muller(Muller::new(p))
}

pub fn lj() -> Surface64 {
    BuiltinSurface::from_id(SurfaceId::LjCell)
}

/// A surface together with the refined ends and a via point of its study.
pub struct Case {
    pub name: &'static str,
    pub surface: Surface64,
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    pub via: Vec<f64>,
}

pub fn cases() -> Vec<Case> {
    let refined = |s: &Surface64, g: [f64; 2]| find_critical_point(s, &g, 1e-11).unwrap().location;
    let mut out = Vec::new();
    for (name, v) in [("E", Example1Variant::E), ("E1", Example1Variant::E1), ("E2", Example1Variant::E2)] {
        out.push(Case {
            name,
            surface: example1(v),
            start: vec![-1.0, 0.0],
            end: vec![1.0, 0.0],
            via: vec![0.0, 1.0],
        });
    }
    let m = muller_literature();
    out.push(Case {
        name: "muller",
        start: refined(&m, [-0.05, 0.47]),
        end: refined(&m, [0.62, 0.03]),
        surface: m,
        via: vec![0.21, 0.29],
    });
    let l = lj();
    out.push(Case {
        name: "lj-cell",
        start: refined(&l, [0.56, 0.97]),
        end: refined(&l, [0.97, 0.56]),
        surface: l,
        via: vec![0.85, 0.85],
    });
    out
}

pub fn tight(tol: f64) -> EvolveConfig {
    EvolveConfig {
        auto_dt: true,
        ..EvolveConfig::default().with_tol(tol)
    }
}

/// Converged NEB path with `m` segments for a case.
pub fn converged(case: &Case, m: usize, tol: f64) -> EvolveResult64 {
    let init = make_initial_path_on(&case.surface, &InitialPath::ArcVia(case.via.clone()), &case.start, &case.end, m)
        .unwrap();
    let r = relax(&case.surface, &init, &tight(tol)).unwrap();
    assert!(r.converged, "{} M = {m}: |F| = {:e}", case.name, r.final_force_inf);
    r
}

pub fn study(id: &str) -> StudySpec {
    StudySpec::default_for(id.parse().unwrap()).unwrap()
}

/// Least-squares slope of log e against log h.
pub fn loglog_slope(h: &[f64], e: &[f64]) -> f64 {
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
