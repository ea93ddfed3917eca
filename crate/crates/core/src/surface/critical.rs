//! Newton refinement of critical points and the endpoint/saddle assumption checks.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use super::Surface;
use crate::error::{MepError, Result};
use crate::linalg::{dot, norm};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Minimizer,
    Index1Saddle,
    /// Anything else; `negative` counts the negative eigenvalues.
    Other { negative: usize },
}

impl Classification {
    pub fn from_eigenvalues<T: Real>(vals: &[T]) -> Self {
        let negative = vals.iter().filter(|&&v| v < T::zero()).count();
        let positive = vals.iter().filter(|&&v| v > T::zero()).count();
        match (negative, positive == vals.len() - negative) {
            (0, true) => Classification::Minimizer,
            (1, true) => Classification::Index1Saddle,
            _ => Classification::Other { negative },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPointReport<T: Real> {
    pub location: Vec<T>,
    pub energy: T,
    pub grad_norm: T,
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// `eigenvectors[i]` belongs to `eigenvalues[i]`; orthonormal.
    pub eigenvectors: Vec<Vec<T>>,
    pub classification: Classification,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            max_halvings: 60,
        }
    }
}

/// Symmetric eigen-decomposition with eigenvalues sorted ascending.
pub fn sorted_eigen<T: Real>(h: &DMatrix<T>) -> (Vec<T>, Vec<Vec<T>>) {
    let sym = (h + h.transpose()) * T::lit(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    (vals, vecs)
}

/// Damped Newton iteration on `grad E = 0`.
///
/// The step is halved while the gradient norm does not decrease; evaluation
/// failures (e.g. stepping onto a singular point) count as no decrease.
pub fn find_critical_point<T: Real, S: Surface<T> + ?Sized>(
    surface: &S,
    guess: &[T],
    tol: T,
) -> Result<CriticalPointReport<T>> {
    find_critical_point_with(surface, guess, tol, NewtonOptions::default())
}

pub fn find_critical_point_with<T: Real, S: Surface<T> + ?Sized>(
    surface: &S,
    guess: &[T],
    tol: T,
    opts: NewtonOptions,
) -> Result<CriticalPointReport<T>> {
    let n = surface.dim();
    super::check_dim(n, guess.len())?;
    let mut x = guess.to_vec();
    let mut g = vec![T::zero(); n];
    surface.gradient(&x, &mut g)?;
    let mut gnorm = norm(&g);
    let mut iterations = 0;
    let mut trial = vec![T::zero(); n];
    let mut gt = vec![T::zero(); n];
    while gnorm > tol {
        if iterations == opts.max_iterations {
            return Err(MepError::NoConvergence {
                iterations,
                grad_norm: gnorm.as_f64(),
            });
        }
        iterations += 1;
        let h = surface.hessian(&x)?;
        let rhs = -DVector::from_column_slice(&g);
        let step = h.lu().solve(&rhs).ok_or(MepError::SingularHessian)?;
        if step.iter().any(|v| !v.is_finite()) {
            return Err(MepError::SingularHessian);
        }
        let mut scale = T::one();
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            for i in 0..n {
                trial[i] = x[i] + scale * step[i];
            }
            if surface.gradient(&trial, &mut gt).is_ok() {
                let tn = norm(&gt);
                if tn < gnorm {
                    x.copy_from_slice(&trial);
                    g.copy_from_slice(&gt);
                    gnorm = tn;
                    accepted = true;
                    break;
                }
            }
            scale *= T::lit(0.5);
        }
        if !accepted {
            return Err(MepError::NoConvergence {
                iterations,
                grad_norm: gnorm.as_f64(),
            });
        }
    }
    let energy = surface.energy(&x)?;
    let (eigenvalues, eigenvectors) = sorted_eigen(&surface.hessian(&x)?);
    let classification = Classification::from_eigenvalues(&eigenvalues);
    Ok(CriticalPointReport {
        location: x,
        energy,
        grad_norm: gnorm,
        eigenvalues,
        eigenvectors,
        classification,
        iterations,
    })
}

/// Alignment of one end tangent with its minimizer's Hessian spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EndpointVerdict<T: Real> {
    /// Eigenvalue whose eigenvector is best aligned with the tangent.
    pub sigma: T,
    /// `|cos|` between that eigenvector and the tangent.
    pub alignment: T,
    pub lowest: bool,
    /// Distance from `sigma` to the nearest other eigenvalue.
    pub gap: T,
    pub simple: bool,
}

impl<T: Real> EndpointVerdict<T> {
    pub fn pass(&self) -> bool {
        self.lowest && self.simple
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionVerdict<T: Real> {
    pub endpoints_are_minimizers: bool,
    pub saddle_is_index1: bool,
    pub assumption_a: bool,
    pub end_a: EndpointVerdict<T>,
    pub end_b: EndpointVerdict<T>,
    pub assumption_b: bool,
}

fn endpoint_verdict<T: Real>(
    report: &CriticalPointReport<T>,
    tangent: &[T],
    degeneracy_tol: T,
) -> EndpointVerdict<T> {
    let tn = norm(tangent);
    let (best, alignment) = report
        .eigenvectors
        .iter()
        .enumerate()
        .map(|(i, v)| (i, (dot(v, tangent) / (norm(v) * tn)).abs()))
        .fold((0, -T::one()), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    let sigma = report.eigenvalues[best];
    let scale = degeneracy_tol * sigma.abs();
    let gap = report
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, &v)| (v - sigma).abs())
        .fold(T::max_value().unwrap_or(T::lit(f64::MAX)), |a, b| a.min(b));
    let lowest = report.eigenvalues.iter().all(|&v| sigma <= v + scale);
    EndpointVerdict {
        sigma,
        alignment,
        lowest,
        gap,
        simple: gap > scale,
    }
}

/// Checks that the path ends are strong minimizers joined through an index-1
/// saddle, and that each end tangent follows a simple, lowest Hessian mode.
pub fn verify_assumptions<T: Real>(
    report_a: &CriticalPointReport<T>,
    report_s: &CriticalPointReport<T>,
    report_b: &CriticalPointReport<T>,
    tangent_a: &[T],
    tangent_b: &[T],
    degeneracy_tol: T,
) -> AssumptionVerdict<T> {
    let endpoints_are_minimizers = report_a.classification == Classification::Minimizer
        && report_b.classification == Classification::Minimizer;
    let saddle_is_index1 = report_s.classification == Classification::Index1Saddle;
    let end_a = endpoint_verdict(report_a, tangent_a, degeneracy_tol);
    let end_b = endpoint_verdict(report_b, tangent_b, degeneracy_tol);
    AssumptionVerdict {
        endpoints_are_minimizers,
        saddle_is_index1,
        assumption_a: endpoints_are_minimizers && saddle_is_index1,
        assumption_b: end_a.pass() && end_b.pass(),
        end_a,
        end_b,
    }
}
