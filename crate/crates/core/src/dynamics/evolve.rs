//! Time stepping of the path ODE `phi' = F(phi)` until the force vanishes.

use std::io::Write;

use serde::Serialize;

use super::config::{EvolveConfig, Method, Stepper};
use super::forces::{assemble, ForceKind, ForceWorkspace};
use crate::error::{MepError, Result};
use crate::path::{discrete_length, resample_equal_arclength, Barrier, DiscretePath, NodeField};
use crate::scalar::Real;
use crate::surface::Surface;

/// Barrier growth factor that counts as a blow-up.
const BLOWUP_FACTOR: f64 = 10.0;
const MAX_DT_HALVINGS: usize = 10;
/// FIRE step cap relative to the stable Euler step under `auto_dt`.
const STABLE_FIRE_FACTOR: f64 = 4.0;
/// Images closer than this fraction of the path length count as collided.
const COLLAPSE_FRACTION: f64 = 1e-12;

const FIRE_N_MIN: usize = 5;
const FIRE_F_INC: f64 = 1.1;
const FIRE_F_DEC: f64 = 0.5;
const FIRE_ALPHA0: f64 = 0.1;
const FIRE_F_ALPHA: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub step: usize,
    pub force_inf: f64,
    pub barrier: f64,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveResult<T: Real> {
    pub path: DiscretePath<T>,
    pub steps: usize,
    pub final_force_inf: T,
    pub converged: bool,
    pub energy_profile: Vec<T>,
    /// Number of restarts with a halved time step.
    pub dt_halvings: usize,
    pub trace: Vec<TraceRow>,
}

impl<T: Real> EvolveResult<T> {
    pub fn barrier(&self) -> Barrier<T> {
        Barrier::from_energies(&self.energy_profile)
    }
}

/// Writes trace rows as CSV `step,force_inf,barrier,length`.
pub fn write_trace<W: Write>(mut w: W, rows: &[TraceRow]) -> Result<()> {
    writeln!(w, "step,force_inf,barrier,length")?;
    for r in rows {
        writeln!(w, "{},{:e},{:.16e},{:.16e}", r.step, r.force_inf, r.barrier, r.length)?;
    }
    Ok(())
}

/// Explicit Euler step estimate, half the stability limit of the linearized
/// dynamics: `1 / (max_k |H(phi_k)|_F + 2 max_k |g_k| / min_k |phi_k+1 - phi_k| + 4 c M)`.
/// The middle term bounds the stiffness from rotating the tangent.
pub fn stable_dt<T: Real, S: Surface<T> + ?Sized>(surface: &S, path: &DiscretePath<T>, spring_c: f64) -> Result<f64> {
    let mut curvature = 0.0f64;
    let mut slope = 0.0f64;
    let mut g = vec![T::zero(); path.dim()];
    for x in path.images() {
        curvature = curvature.max(surface.hessian(x)?.norm().as_f64());
        surface.gradient(x, &mut g)?;
        slope = slope.max(crate::linalg::norm(&g).as_f64());
    }
    let rotation = 2.0 * slope / path.min_spacing().as_f64();
    Ok(1.0 / (curvature + rotation + 4.0 * spring_c * path.m() as f64))
}

enum RunError {
    /// Recoverable by restarting with a smaller step.
    Blowup(MepError),
    Fatal(MepError),
}

fn validate_initial<T: Real, S: Surface<T> + ?Sized>(surface: &S, path: &DiscretePath<T>) -> Result<()> {
    if path.dim() != surface.dim() {
        return Err(MepError::Dimension {
            expected: surface.dim(),
            got: path.dim(),
        });
    }
    path.check_distinct()?;
    for k in 0..path.m() {
        if surface.segment_excluded(path.image(k), path.image(k + 1)) {
            return Err(MepError::ExcludedRegion(k));
        }
    }
    Ok(())
}

/// Evolves `initial` with the NEB or string dynamics until the force sup-norm
/// drops below `config.force_tol` or `config.max_steps` is reached.
///
/// A run whose barrier grows tenfold, whose images collide, or that steps off
/// the surface's domain is restarted from `initial` with half the time step,
/// at most ten times; the last failure is returned after that.
pub fn evolve<T: Real, S: Surface<T> + ?Sized>(
    surface: &S,
    initial: &DiscretePath<T>,
    config: &EvolveConfig,
) -> Result<EvolveResult<T>> {
    config.validate()?;
    validate_initial(surface, initial)?;
    let mut dt = config.dt;
    let mut dt_max = config.fire_dt_max;
    if config.auto_dt {
        let stable = stable_dt(surface, initial, config.spring_c)?;
        dt = dt.min(stable);
        dt_max = dt_max.min(STABLE_FIRE_FACTOR * stable);
    }
    let mut last_err = None;
    for halvings in 0..=MAX_DT_HALVINGS {
        match run(surface, initial, config, dt, dt_max) {
            Ok(mut r) => {
                r.dt_halvings = halvings;
                return Ok(r);
            }
            Err(RunError::Fatal(e)) => return Err(e),
            Err(RunError::Blowup(e)) => {
                last_err = Some(e);
                dt *= 0.5;
                dt_max *= 0.5;
            }
        }
    }
    Err(last_err.expect("at least one attempt"))
}

struct State<'a, T: Real, S: Surface<T> + ?Sized> {
    surface: &'a S,
    kind: ForceKind<T>,
    tie: T,
    ws: ForceWorkspace<T>,
    force: NodeField<T>,
}

impl<'a, T: Real, S: Surface<T> + ?Sized> State<'a, T, S> {
    fn refresh(&mut self, path: &DiscretePath<T>) -> std::result::Result<T, RunError> {
        self.ws.evaluate(self.surface, path).map_err(RunError::Blowup)?;
        assemble(path, &self.ws, self.kind, self.tie, &mut self.force).map_err(RunError::Fatal)?;
        let f = self.force.sup_norm();
        if !f.is_finite() {
            return Err(RunError::Blowup(MepError::Config("force is not finite".into())));
        }
        Ok(f)
    }

    fn barrier(&self) -> T {
        Barrier::from_energies(&self.ws.energies).value
    }
}

fn run<T: Real, S: Surface<T> + ?Sized>(
    surface: &S,
    initial: &DiscretePath<T>,
    config: &EvolveConfig,
    dt: f64,
    dt_max: f64,
) -> std::result::Result<EvolveResult<T>, RunError> {
    let kind = match config.method {
        Method::Neb => ForceKind::Neb {
            spring_c: T::lit(config.spring_c),
        },
        Method::String => ForceKind::String,
    };
    let mut st = State {
        surface,
        kind,
        tie: T::lit(config.tie_rtol),
        ws: ForceWorkspace::new(initial.dim(), initial.len()),
        force: NodeField::zeros(initial.dim(), initial.len()),
    };
    let mut path = initial.clone();
    let m = path.m();
    let dim = path.dim();
    let tol = T::lit(config.force_tol);
    let mut fnorm = st.refresh(&path)?;
    let barrier0 = st.barrier();
    let blowup = T::lit(BLOWUP_FACTOR) * barrier0.abs().max(T::lit(1e-3));
    let mut trace = Vec::new();
    let record = |trace: &mut Vec<TraceRow>, step: usize, f: T, b: T, p: &DiscretePath<T>| {
        if config.trace_every > 0 && step % config.trace_every == 0 {
            trace.push(TraceRow {
                step,
                force_inf: f.as_f64(),
                barrier: b.as_f64(),
                length: discrete_length(p).as_f64(),
            });
        }
    };
    record(&mut trace, 0, fnorm, barrier0, &path);

    let mut step = 0;
    let mut h = T::lit(dt);
    // FIRE state
    let mut velocity = vec![T::zero(); path.coords().len()];
    let mut alpha = T::lit(FIRE_ALPHA0);
    let mut n_positive = 0usize;
    let interior = dim..dim * m;

    while fnorm > tol && step < config.max_steps {
        match config.stepper {
            Stepper::Euler => {
                let f = st.force.as_flat();
                let x = path.coords_mut();
                for i in interior.clone() {
                    x[i] += h * f[i];
                }
            }
            Stepper::Fire => {
                let f = &st.force.as_flat()[interior.clone()];
                let v = &mut velocity[interior.clone()];
                let power = crate::linalg::dot(f, v);
                if power > T::zero() {
                    let vn = crate::linalg::norm(v);
                    let fn_ = crate::linalg::norm(f);
                    for (vi, &fi) in v.iter_mut().zip(f) {
                        *vi = (T::one() - alpha) * *vi + alpha * vn * fi / fn_;
                    }
                    if n_positive > FIRE_N_MIN {
                        h = (h * T::lit(FIRE_F_INC)).min(T::lit(dt_max));
                        alpha *= T::lit(FIRE_F_ALPHA);
                    }
                    n_positive += 1;
                } else {
                    v.iter_mut().for_each(|vi| *vi = T::zero());
                    h *= T::lit(FIRE_F_DEC);
                    alpha = T::lit(FIRE_ALPHA0);
                    n_positive = 0;
                }
                let x = &mut path.coords_mut()[interior.clone()];
                for ((xi, vi), &fi) in x.iter_mut().zip(v.iter_mut()).zip(f) {
                    *vi += h * fi;
                    *xi += h * *vi;
                }
            }
        }
        if config.method == Method::String {
            path = resample_equal_arclength(&path, m).map_err(RunError::Fatal)?;
        }
        step += 1;
        fnorm = st.refresh(&path)?;
        let b = st.barrier();
        if !(b <= blowup) {
            return Err(RunError::Blowup(MepError::Config(format!(
                "barrier blew up to {b:e} at step {step}"
            ))));
        }
        let spacing = path.min_spacing();
        if spacing < T::lit(COLLAPSE_FRACTION) * discrete_length(&path) {
            return Err(RunError::Blowup(MepError::PathCollapsed {
                step,
                spacing: spacing.as_f64(),
            }));
        }
        record(&mut trace, step, fnorm, b, &path);
    }

    Ok(EvolveResult {
        converged: fnorm <= tol,
        steps: step,
        final_force_inf: fnorm,
        energy_profile: st.ws.energies.clone(),
        path,
        dt_halvings: 0,
        trace,
    })
}
