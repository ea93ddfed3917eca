//! Newton iteration on the stationary NEB equation `F(phi) = 0`.
//!
//! The force at image `k` depends only on images `k-1..=k+1` once the upwind
//! stencils are fixed, so the Jacobian is block tridiagonal.

use nalgebra::{DMatrix, DVector};

use super::config::{EvolveConfig, Method};
use super::evolve::EvolveResult;
use super::forces::{assemble_with, ForceKind, ForceWorkspace};
use crate::error::{MepError, Result};
use crate::linalg::norm;
use crate::path::tangent::{upwind_stencils, Stencil};
use crate::path::{DiscretePath, NodeField};
use crate::scalar::Real;
use crate::surface::Surface;

const MAX_ITERATIONS: usize = 50;
const MAX_BACKTRACKS: usize = 20;
/// Stencil patterns tried before giving up.
const MAX_BRANCHES: usize = 8;
/// Tolerance of the explicit pre-relaxation before Newton is retried.
const PRE_RELAX_TOL: f64 = 1e-5;

struct Solver<'a, T: Real, S: Surface<T> + ?Sized> {
    surface: &'a S,
    kind: ForceKind<T>,
    ws: ForceWorkspace<T>,
}

impl<'a, T: Real, S: Surface<T> + ?Sized> Solver<'a, T, S> {
    fn force(&mut self, path: &DiscretePath<T>, stencils: &[Stencil], out: &mut NodeField<T>) -> Result<()> {
        self.ws.evaluate(self.surface, path)?;
        assemble_with(path, &self.ws, self.kind, stencils, out)
    }

    /// Blocks `(lower, diag, upper)` of the Jacobian for interior rows `1..m`,
    /// assembled from the Hessians. With `tau = d/|d|`, `P = I - tau tau^T`
    /// and spring factor `s`, the difference `d` enters through
    /// `((g.tau) I + tau g^T + s I) P / |d|`.
    #[allow(clippy::type_complexity)]
    fn jacobian(
        &mut self,
        path: &DiscretePath<T>,
        stencils: &[Stencil],
    ) -> Result<(Vec<DMatrix<T>>, Vec<DMatrix<T>>, Vec<DMatrix<T>>)> {
        let m = path.m();
        let d = path.dim();
        let mut lower = vec![DMatrix::zeros(d, d); m + 1];
        let mut diag = vec![DMatrix::zeros(d, d); m + 1];
        let mut upper = vec![DMatrix::zeros(d, d); m + 1];
        self.ws.evaluate(self.surface, path)?;
        let spring_c = match self.kind {
            ForceKind::Neb { spring_c } => spring_c,
            ForceKind::String => T::zero(),
        };
        let mt = T::from_usize_lossy(m);
        let half = T::lit(0.5);
        let unit = |a: &[T], b: &[T]| {
            let v = DVector::from_iterator(d, a.iter().zip(b).map(|(&x, &y)| x - y));
            let n = v.norm();
            (v / n, n)
        };
        for k in 1..m {
            // weights of phi_{k-1}, phi_k, phi_{k+1} in the difference
            let (wl, wc, wu) = match stencils[k] {
                Stencil::Forward => (T::zero(), -mt, mt),
                Stencil::Backward => (-mt, mt, T::zero()),
                Stencil::Central => (-half * mt, T::zero(), half * mt),
            };
            let x = path.image(k);
            let diff = DVector::from_iterator(
                d,
                (0..d).map(|i| wl * path.image(k - 1)[i] + wc * x[i] + wu * path.image(k + 1)[i]),
            );
            let dn = diff.norm();
            if dn == T::zero() {
                return Err(MepError::ZeroTangent(k));
            }
            let tau = &diff / dn;
            let g = DVector::from_column_slice(self.ws.grads.at(k));
            let (up, lp) = unit(x, path.image(k + 1));
            let (um, lm) = unit(x, path.image(k - 1));
            let s = spring_c * mt * (lp - lm);
            let identity = DMatrix::<T>::identity(d, d);
            let proj = &identity - &tau * tau.transpose();
            let jd = (&identity * (g.dot(&tau) + s) + &tau * g.transpose()) * &proj / dn;
            let hess = self.surface.hessian(x)?;
            let cm = spring_c * mt;
            diag[k] = -(&proj * hess) + &jd * wc + (&tau * (&up - &um).transpose()) * cm;
            if k + 1 < m {
                upper[k] = &jd * wu - (&tau * up.transpose()) * cm;
            }
            if k > 1 {
                lower[k] = &jd * wl + (&tau * um.transpose()) * cm;
            }
        }
        Ok((lower, diag, upper))
    }
}

/// Solves the block tridiagonal system for interior blocks `1..m`.
fn solve_block_tridiagonal<T: Real>(
    lower: &[DMatrix<T>],
    diag: &[DMatrix<T>],
    upper: &[DMatrix<T>],
    rhs: &NodeField<T>,
) -> Result<NodeField<T>> {
    let m = rhs.len() - 1;
    let d = rhs.dim();
    let mut pivots: Vec<Option<nalgebra::LU<T, nalgebra::Dyn, nalgebra::Dyn>>> = Vec::with_capacity(m);
    let mut r: Vec<DVector<T>> = (0..=m).map(|k| DVector::from_column_slice(rhs.at(k))).collect();
    pivots.push(None);
    for k in 1..m {
        let mut b = diag[k].clone();
        if k > 1 {
            let prev = pivots[k - 1].as_ref().expect("previous pivot block");
            let y: DMatrix<T> = prev.solve(&upper[k - 1]).ok_or(MepError::SingularMatrix)?;
            let z: DVector<T> = prev.solve(&r[k - 1]).ok_or(MepError::SingularMatrix)?;
            b -= &lower[k] * y;
            let correction = &lower[k] * z;
            r[k] -= correction;
        }
        pivots.push(Some(b.lu()));
    }
    let mut x = NodeField::zeros(d, m + 1);
    let mut next: Option<DVector<T>> = None;
    for k in (1..m).rev() {
        let mut rk = r[k].clone();
        if let Some(xn) = &next {
            rk -= &upper[k] * xn;
        }
        let xk = pivots[k].as_ref().expect("pivot block").solve(&rk).ok_or(MepError::SingularMatrix)?;
        x.at_mut(k).copy_from_slice(xk.as_slice());
        next = Some(xk);
    }
    Ok(x)
}

/// Damped Newton on the force with the stencils held fixed. Returns the final
/// path and iteration count.
fn frozen_newton<T: Real, S: Surface<T> + ?Sized>(
    solver: &mut Solver<'_, T, S>,
    initial: &DiscretePath<T>,
    stencils: &[Stencil],
    tol: T,
) -> Result<(DiscretePath<T>, usize)> {
    let m = initial.m();
    let d = initial.dim();
    let mut path = initial.clone();
    let mut force = NodeField::zeros(d, m + 1);
    let mut trial_force = NodeField::zeros(d, m + 1);
    solver.force(&path, stencils, &mut force)?;
    let mut merit = norm(force.as_flat());
    let mut iterations = 0;
    while force.sup_norm() > tol && iterations < MAX_ITERATIONS {
        iterations += 1;
        let (lower, diag, upper) = solver.jacobian(&path, stencils)?;
        let delta = solve_block_tridiagonal(&lower, &diag, &upper, &force)?;
        let mut t = T::one();
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            let mut trial = path.clone();
            for (x, &dx) in trial.coords_mut()[d..d * m].iter_mut().zip(&delta.as_flat()[d..d * m]) {
                *x -= t * dx;
            }
            if trial.check_distinct().is_ok() && solver.force(&trial, stencils, &mut trial_force).is_ok() {
                let f = norm(trial_force.as_flat());
                if f < merit {
                    merit = f;
                    path = trial;
                    std::mem::swap(&mut force, &mut trial_force);
                    accepted = true;
                    break;
                }
            }
            t *= T::lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    Ok((path, iterations))
}

/// Drives an NEB path to `|F|_inf <= config.force_tol` by damped Newton
/// steps. The starting path should already be close to stationary, e.g. an
/// explicit run to a loose tolerance or a finer path resampled.
///
/// Newton runs with the upwind stencils of the current path held fixed; if
/// the energies of the result order differently, it restarts with the new
/// stencils. Returns `converged = false` when no stencil pattern is
/// self-consistent or the iteration stalls.
pub fn newton_polish<T: Real, S: Surface<T> + ?Sized>(
    surface: &S,
    initial: &DiscretePath<T>,
    config: &EvolveConfig,
) -> Result<EvolveResult<T>> {
    config.validate()?;
    if config.method != Method::Neb {
        return Err(MepError::Config("Newton polishing applies to the NEB force only".into()));
    }
    let m = initial.m();
    let d = initial.dim();
    let tie = T::lit(config.tie_rtol);
    let kind = ForceKind::Neb {
        spring_c: T::lit(config.spring_c),
    };
    let mut solver = Solver {
        surface,
        kind,
        ws: ForceWorkspace::new(d, m + 1),
    };
    let tol = T::lit(config.force_tol);
    let mut force = NodeField::zeros(d, m + 1);
    let mut path = initial.clone();
    solver.ws.evaluate(surface, &path)?;
    let mut stencils = upwind_stencils(&solver.ws.energies, tie);
    assemble_with(&path, &solver.ws, kind, &stencils, &mut force)?;
    let mut best = (force.sup_norm(), path.clone());
    let mut tried = Vec::new();
    let mut iterations = 0;
    for _ in 0..MAX_BRANCHES {
        if best.0 <= tol {
            break;
        }
        let (next, it) = match frozen_newton(&mut solver, &path, &stencils, tol) {
            Ok(step) => step,
            // a singular frozen Jacobian counts as a stall
            Err(MepError::SingularMatrix) => break,
            Err(e) => return Err(e),
        };
        iterations += it;
        solver.ws.evaluate(surface, &next)?;
        let actual = upwind_stencils(&solver.ws.energies, tie);
        assemble_with(&next, &solver.ws, kind, &actual, &mut force)?;
        let fnorm = force.sup_norm();
        if fnorm < best.0 {
            best = (fnorm, next.clone());
        }
        if actual == stencils || tried.contains(&actual) {
            break;
        }
        tried.push(std::mem::replace(&mut stencils, actual));
        path = next;
    }
    let (fnorm, path) = best;
    solver.ws.evaluate(surface, &path)?;
    Ok(EvolveResult {
        converged: fnorm <= tol,
        steps: iterations,
        final_force_inf: fnorm,
        energy_profile: solver.ws.energies.clone(),
        path,
        dt_halvings: 0,
        trace: Vec::new(),
    })
}

/// Finds the NEB stationary state near `initial`: Newton first, falling back
/// to explicit time stepping when Newton stalls.
pub fn relax<T: Real, S: Surface<T> + ?Sized>(
    surface: &S,
    initial: &DiscretePath<T>,
    config: &EvolveConfig,
) -> Result<EvolveResult<T>> {
    config.validate()?;
    if config.method != Method::Neb {
        return super::evolve(surface, initial, config);
    }
    let first = newton_polish(surface, initial, config)?;
    if first.converged {
        return Ok(first);
    }
    let loose = EvolveConfig {
        force_tol: config.force_tol.max(PRE_RELAX_TOL),
        ..config.clone()
    };
    let pre = super::evolve(surface, initial, &loose)?;
    let polished = newton_polish(surface, &pre.path, config)?;
    let mut result = if polished.converged {
        polished
    } else {
        super::evolve(surface, &pre.path, config)?
    };
    result.steps += first.steps + pre.steps;
    result.dt_halvings += pre.dt_halvings;
    Ok(result)
}
