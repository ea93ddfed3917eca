use std::path::Path;

use mep_core::analysis::{lambda_profile, residual_fh, stability_gain, LambdaProfile, ResidualReport, StabilityReport};
use mep_core::convergence::{build_reference, run_study, ConvergenceTable, StudySpec};
use mep_core::path::{discrete_length, write_snapshot};
use mep_core::surface::{
    find_critical_point, verify_assumptions, AssumptionVerdict, Classification, CriticalPointReport,
};
use mep_core::{
    evolve, make_initial_path_on, relax, write_trace, EvolveConfig, EvolveResult64, InitialPath, Method,
    Path64, Stepper, Surface64, SurfaceId,
};
use serde::Serialize;

use crate::config::{study_spec, FlagOverrides, InitialSpec, RunConfig, Solver};
use crate::error::CliError;
use crate::output::OutDir;

const CRITICAL_TOL: f64 = 1e-10;

pub struct Context<'a> {
    pub config: RunConfig,
    pub flags: FlagOverrides,
    pub out: OutDir,
    /// Directory that relative paths in the config refer to.
    pub base: &'a Path,
}

/// Exit status of a command that ran to completion.
pub enum Status {
    Ok,
    NotConverged,
}

fn surface(cfg: &RunConfig) -> Result<Surface64, CliError> {
    Ok(cfg.surface.build()?)
}

fn refine(surface: &Surface64, guess: &[f64], what: &str) -> Result<CriticalPointReport<f64>, CliError> {
    find_critical_point(surface, guess, CRITICAL_TOL)
        .map_err(|e| CliError::NoConvergence(format!("{what} from guess {guess:?}: {e}")))
}

fn refine_minimizer(surface: &Surface64, guess: &[f64], what: &str) -> Result<Vec<f64>, CliError> {
    let r = refine(surface, guess, what)?;
    if r.classification != Classification::Minimizer {
        return Err(CliError::NoConvergence(format!(
            "{what}: Newton from {guess:?} reached a {:?} at {:?}, not a minimizer",
            r.classification, r.location
        )));
    }
    Ok(r.location)
}

struct Ends {
    start: Vec<f64>,
    end: Vec<f64>,
    saddle_guess: Option<Vec<f64>>,
}

fn resolve_ends(cfg: &RunConfig, surface: &Surface64) -> Result<Ends, CliError> {
    if let Some(e) = &cfg.endpoints {
        return Ok(Ends {
            start: e.start.clone(),
            end: e.end.clone(),
            saddle_guess: None,
        });
    }
    let g = cfg.guesses();
    Ok(Ends {
        start: refine_minimizer(surface, &g.start, "start")?,
        end: refine_minimizer(surface, &g.end, "end")?,
        saddle_guess: g.saddle,
    })
}

fn initial_kind(cfg: &RunConfig, ends: &Ends, base: &Path) -> InitialPath {
    match (&cfg.initial, &ends.saddle_guess) {
        (Some(spec), _) => spec.to_initial(base),
        (None, Some(s)) => InitialSpec::ArcVia { via: s.clone() }.to_initial(base),
        (None, None) => InitialPath::Linear,
    }
}

/// Dynamics for commands that need a tightly converged path.
fn tight_config(cfg: &RunConfig) -> EvolveConfig {
    cfg.evolve.clone().unwrap_or(EvolveConfig {
        auto_dt: true,
        ..EvolveConfig::default().with_tol(1e-10)
    })
}

fn summary(r: &CriticalPointReport<f64>) -> String {
    format!(
        "({}) E = {:.10} |grad| = {:.1e} eigenvalues {:?} {:?}",
        r.location.iter().map(|x| format!("{x:.8}")).collect::<Vec<_>>().join(", "),
        r.energy,
        r.grad_norm,
        r.eigenvalues.iter().map(|x| (x * 1e8).round() / 1e8).collect::<Vec<_>>(),
        r.classification
    )
}

#[derive(Serialize)]
struct CriticalOutput {
    surface: SurfaceId,
    start: CriticalPointReport<f64>,
    saddle: CriticalPointReport<f64>,
    end: CriticalPointReport<f64>,
    endpoints_are_minimizers: bool,
    saddle_is_index1: bool,
    assumption_a: bool,
}

pub fn critical(ctx: &Context) -> Result<Status, CliError> {
    const OUT: &str = "critical.json";
    ctx.out.check(&[OUT])?;
    let cfg = &ctx.config;
    let s = surface(cfg)?;
    let g = match &cfg.endpoints {
        Some(e) => crate::config::Guesses {
            start: e.start.clone(),
            end: e.end.clone(),
            saddle: cfg.guesses().saddle,
        },
        None => cfg.guesses(),
    };
    let saddle_guess = g
        .saddle
        .clone()
        .ok_or_else(|| CliError::Config("guesses.saddle is required for this surface".into()))?;
    let start = refine(&s, &g.start, "start")?;
    let saddle = refine(&s, &saddle_guess, "saddle")?;
    let end = refine(&s, &g.end, "end")?;
    let endpoints_are_minimizers =
        start.classification == Classification::Minimizer && end.classification == Classification::Minimizer;
    let saddle_is_index1 = saddle.classification == Classification::Index1Saddle;
    println!("start  {}", summary(&start));
    println!("saddle {}", summary(&saddle));
    println!("end    {}", summary(&end));
    println!("assumption (A): {}", endpoints_are_minimizers && saddle_is_index1);
    let out = CriticalOutput {
        surface: s.id(),
        start,
        saddle,
        end,
        endpoints_are_minimizers,
        saddle_is_index1,
        assumption_a: endpoints_are_minimizers && saddle_is_index1,
    };
    ctx.out.write_json(OUT, &out)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct MepOutput<'a> {
    surface: SurfaceId,
    method: Method,
    stepper: Stepper,
    solver: Solver,
    images: usize,
    converged: bool,
    steps: usize,
    final_force_inf: f64,
    dt_halvings: usize,
    barrier: f64,
    k_max: usize,
    length: f64,
    energies: &'a [f64],
    path: Vec<Vec<f64>>,
}

fn run_path(cfg: &RunConfig, s: &Surface64, ends: &Ends, base: &Path, config: &EvolveConfig, solver: Solver) -> Result<EvolveResult64, CliError> {
    let kind = initial_kind(cfg, ends, base);
    let initial = make_initial_path_on(s, &kind, &ends.start, &ends.end, cfg.images)?;
    let r = match solver {
        Solver::Explicit => evolve(s, &initial, config)?,
        Solver::Relax => relax(s, &initial, config)?,
    };
    Ok(r)
}

pub fn mep(ctx: &Context) -> Result<Status, CliError> {
    let cfg = &ctx.config;
    let config = cfg.evolve_config();
    let tracing = config.trace_every > 0;
    let mut outs = vec!["mep.csv", "mep.json"];
    if tracing {
        outs.push("trace.csv");
    }
    ctx.out.check(&outs)?;
    let s = surface(cfg)?;
    let ends = resolve_ends(cfg, &s)?;
    let r = run_path(cfg, &s, &ends, ctx.base, &config, cfg.solver)?;
    let b = r.barrier();
    ctx.out.write_with("mep.csv", |buf| Ok(write_snapshot(buf, &r.path, &r.energy_profile)?))?;
    if tracing {
        ctx.out.write_with("trace.csv", |buf| Ok(write_trace(buf, &r.trace)?))?;
    }
    let out = MepOutput {
        surface: s.id(),
        method: config.method,
        stepper: config.stepper,
        solver: cfg.solver,
        images: r.path.m(),
        converged: r.converged,
        steps: r.steps,
        final_force_inf: r.final_force_inf,
        dt_halvings: r.dt_halvings,
        barrier: b.value,
        k_max: b.k_max,
        length: discrete_length(&r.path),
        energies: &r.energy_profile,
        path: r.path.to_vecs(),
    };
    ctx.out.write_json("mep.json", &out)?;
    println!(
        "M = {} converged = {} steps = {} |F|_inf = {:.3e} barrier = {:.10}",
        out.images, r.converged, r.steps, r.final_force_inf, b.value
    );
    Ok(if r.converged { Status::Ok } else { Status::NotConverged })
}

#[derive(Serialize)]
struct VerifyOutput {
    surface: SurfaceId,
    m_ref: usize,
    reference_barrier: f64,
    start: CriticalPointReport<f64>,
    saddle: CriticalPointReport<f64>,
    end: CriticalPointReport<f64>,
    tangent_start: Vec<f64>,
    tangent_end: Vec<f64>,
    verdict: AssumptionVerdict<f64>,
    lambda: LambdaProfile<f64>,
}

pub fn verify(ctx: &Context) -> Result<Status, CliError> {
    const OUT: &str = "verify.json";
    ctx.out.check(&[OUT])?;
    let cfg = &ctx.config;
    let s = surface(cfg)?;
    let ends = resolve_ends(cfg, &s)?;
    let kind = initial_kind(cfg, &ends, ctx.base);
    let m_ref = cfg.verify.m_ref;
    let reference = build_reference(&s, &ends.start, &ends.end, &kind, m_ref, &tight_config(cfg))?;
    let start = refine(&s, &ends.start, "start")?;
    let end = refine(&s, &ends.end, "end")?;
    let top = reference
        .saddle
        .clone()
        .unwrap_or_else(|| reference.path.image(mep_core::path::Barrier::from_energies(&reference.energies).k_max).to_vec());
    let saddle = refine(&s, &top, "saddle")?;
    let tangent_start = reference.derivative.at(0).to_vec();
    let tangent_end = reference.derivative.at(m_ref).to_vec();
    let verdict = verify_assumptions(&start, &saddle, &end, &tangent_start, &tangent_end, cfg.verify.degeneracy_tol);
    let lambda = lambda_profile(&s, &reference.path)?;
    println!("assumption (A): {}", verdict.assumption_a);
    println!(
        "assumption (B): {} (start: sigma {:.6} lowest {} simple {}; end: sigma {:.6} lowest {} simple {})",
        verdict.assumption_b,
        verdict.end_a.sigma,
        verdict.end_a.lowest,
        verdict.end_a.simple,
        verdict.end_b.sigma,
        verdict.end_b.lowest,
        verdict.end_b.simple
    );
    println!(
        "lambda slopes: start {:.6} saddle {:.6} end {:.6}; roots vanish {} sign pattern {}",
        lambda.slope_start, lambda.slope_saddle, lambda.slope_end, lambda.roots_vanish, lambda.sign_pattern
    );
    let out = VerifyOutput {
        surface: s.id(),
        m_ref,
        reference_barrier: reference.barrier,
        start,
        saddle,
        end,
        tangent_start,
        tangent_end,
        verdict,
        lambda,
    };
    ctx.out.write_json(OUT, &out)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct ConvergeOutput<'a> {
    spec: &'a StudySpec,
    table: &'a ConvergenceTable,
}

pub fn converge(ctx: &Context) -> Result<Status, CliError> {
    let cfg = &ctx.config;
    let mut spec = study_spec(cfg, &ctx.flags)?;
    if cfg.surface.overrides.is_some() || cfg.endpoints.is_some() || cfg.guesses.is_some() {
        let s = surface(cfg)?;
        let ends = resolve_ends(cfg, &s)?;
        spec.start = ends.start;
        spec.end = ends.end;
    }
    let csv = format!("{}.csv", spec.name);
    let json = format!("{}.json", spec.name);
    let paths_dir = format!("{}_paths", spec.name);
    let mut outs = vec![csv.as_str(), json.as_str()];
    if cfg.study.write_paths {
        outs.push(paths_dir.as_str());
    }
    ctx.out.check(&outs)?;
    let outcome = run_study(&spec)?;
    let table = &outcome.table;
    ctx.out.write_with(&csv, |buf| Ok(table.write_csv(buf)?))?;
    ctx.out.write_json(&json, &ConvergeOutput { spec: &spec, table })?;
    if cfg.study.write_paths {
        for p in &outcome.paths {
            ctx.out.write_with(&format!("{paths_dir}/M{}.csv", p.m), |buf| {
                Ok(write_snapshot(buf, &p.path, &p.energies)?)
            })?;
        }
    }
    println!("{}: reference barrier {:.10} (M_ref = {})", spec.name, table.reference_barrier, spec.m_ref);
    for r in &table.rows {
        match (&r.errors, &r.failure) {
            (Some(e), _) => println!(
                "M = {:4} e_C1 = {:.4e} e_Eb = {:.4e} e_C = {:.4e}",
                r.m, e.e_c1, e.e_eb, e.e_c
            ),
            (None, f) => println!("M = {:4} failed: {}", r.m, f.as_deref().unwrap_or("not converged")),
        }
    }
    let slopes = [("e_C1", &table.slopes.e_c1), ("e_Eb", &table.slopes.e_eb), ("e_C", &table.slopes.e_c)];
    for (name, fit) in slopes {
        match fit {
            Some(f) => match f.spread95 {
                Some(sp) => println!("{name} slope {:.3} +- {:.3}", f.slope, sp),
                None => println!("{name} slope {:.3}", f.slope),
            },
            None => println!("{name} slope not computed"),
        }
    }
    let fitted = slopes.iter().all(|(_, f)| f.is_some());
    Ok(if table.all_converged() && fitted { Status::Ok } else { Status::NotConverged })
}

#[derive(Serialize)]
struct ProbeOutput {
    surface: SurfaceId,
    images: usize,
    converged: bool,
    final_force_inf: f64,
    residual: ResidualReport<f64>,
    stability: StabilityReport<f64>,
}

pub fn probe(ctx: &Context) -> Result<Status, CliError> {
    const OUT: &str = "probe.json";
    ctx.out.check(&[OUT])?;
    let cfg = &ctx.config;
    let s = surface(cfg)?;
    let ends = resolve_ends(cfg, &s)?;
    let r = run_path(cfg, &s, &ends, ctx.base, &tight_config(cfg), Solver::Relax)?;
    if !r.converged {
        return Err(CliError::NoConvergence(format!(
            "path did not reach the force tolerance (|F|_inf = {:.3e})",
            r.final_force_inf
        )));
    }
    let path: &Path64 = &r.path;
    let residual = residual_fh(&s, path)?;
    let stability = stability_gain(&s, path, cfg.probe.trials, cfg.seed)?;
    println!(
        "M = {} |F_h|_Yh = {:.4e} stability gain <= {:.4e} ({} trials, seed {})",
        path.m(),
        residual.yh_norm,
        stability.gain,
        stability.trials,
        stability.seed
    );
    let out = ProbeOutput {
        surface: s.id(),
        images: path.m(),
        converged: r.converged,
        final_force_inf: r.final_force_inf,
        residual,
        stability,
    };
    ctx.out.write_json(OUT, &out)?;
    Ok(Status::Ok)
}
