//! Smooth potential energy surfaces and their derivatives.
//!
//! Every surface works on points stored as plain slices of length
//! [`Surface::dim`]; gradients are written into caller-provided buffers so the
//! path dynamics can run without per-image allocation.

mod catalog;
mod critical;
mod example1;
mod lj;
mod muller;

pub use catalog::{BuiltinSurface, SurfaceId, SurfaceSpec};
pub use critical::{
    find_critical_point, sorted_eigen, verify_assumptions, AssumptionVerdict, Classification,
    CriticalPointReport, EndpointVerdict, NewtonOptions,
};
pub use example1::{Example1, Example1Variant};
pub use lj::{LjCell, LjParams};
pub use muller::{Muller, MullerParams};

use nalgebra::DMatrix;

use crate::error::{MepError, Result};
use crate::scalar::Real;

/// Energy, gradient and Hessian at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceEval<T: Real> {
    pub energy: T,
    pub gradient: Vec<T>,
    pub hessian: DMatrix<T>,
}

/// A twice continuously differentiable energy landscape on `R^N`.
pub trait Surface<T: Real>: Send + Sync {
    fn dim(&self) -> usize;

    fn energy(&self, x: &[T]) -> Result<T>;

    /// Writes the gradient at `x` into `grad`.
    fn gradient(&self, x: &[T], grad: &mut [T]) -> Result<()>;

    fn hessian(&self, x: &[T]) -> Result<DMatrix<T>>;

    /// Energy and gradient together; surfaces with shared subexpressions override this.
    fn energy_gradient(&self, x: &[T], grad: &mut [T]) -> Result<T> {
        self.gradient(x, grad)?;
        self.energy(x)
    }

    /// True if `x` lies in a region where the surface is not defined.
    fn is_excluded(&self, _x: &[T]) -> bool {
        false
    }

    /// True if the straight segment `a -> b` touches the excluded region.
    fn segment_excluded(&self, a: &[T], b: &[T]) -> bool {
        self.is_excluded(a) || self.is_excluded(b)
    }

    fn evaluate(&self, x: &[T]) -> Result<SurfaceEval<T>> {
        let mut gradient = vec![T::zero(); self.dim()];
        let energy = self.energy_gradient(x, &mut gradient)?;
        let hessian = self.hessian(x)?;
        Ok(SurfaceEval {
            energy,
            gradient,
            hessian,
        })
    }
}

impl<T: Real, S: Surface<T> + ?Sized> Surface<T> for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn energy(&self, x: &[T]) -> Result<T> {
        (**self).energy(x)
    }
    fn gradient(&self, x: &[T], grad: &mut [T]) -> Result<()> {
        (**self).gradient(x, grad)
    }
    fn hessian(&self, x: &[T]) -> Result<DMatrix<T>> {
        (**self).hessian(x)
    }
    fn energy_gradient(&self, x: &[T], grad: &mut [T]) -> Result<T> {
        (**self).energy_gradient(x, grad)
    }
    fn is_excluded(&self, x: &[T]) -> bool {
        (**self).is_excluded(x)
    }
    fn segment_excluded(&self, a: &[T], b: &[T]) -> bool {
        (**self).segment_excluded(a, b)
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(MepError::Dimension { expected, got })
    }
}

/// Relative discrepancy between an analytic gradient and central finite
/// differences of the energy, `|g_fd - g| / max(|g|, 1)` in the Euclidean norm.
pub fn gradient_fd_error<T: Real, S: Surface<T> + ?Sized>(s: &S, x: &[T], step: T) -> Result<T> {
    let n = s.dim();
    let mut g = vec![T::zero(); n];
    s.gradient(x, &mut g)?;
    let mut xp = x.to_vec();
    let mut diff = T::zero();
    for i in 0..n {
        xp[i] = x[i] + step;
        let ep = s.energy(&xp)?;
        xp[i] = x[i] - step;
        let em = s.energy(&xp)?;
        xp[i] = x[i];
        let fd = (ep - em) / (step + step);
        diff += (fd - g[i]) * (fd - g[i]);
    }
    let gn = crate::linalg::norm(&g);
    Ok(diff.sqrt() / gn.max(T::one()))
}

/// Relative Frobenius discrepancy between the analytic Hessian and central
/// finite differences of the gradient.
pub fn hessian_fd_error<T: Real, S: Surface<T> + ?Sized>(s: &S, x: &[T], step: T) -> Result<T> {
    let n = s.dim();
    let h = s.hessian(x)?;
    let mut xp = x.to_vec();
    let mut gp = vec![T::zero(); n];
    let mut gm = vec![T::zero(); n];
    let mut fd = DMatrix::zeros(n, n);
    for j in 0..n {
        xp[j] = x[j] + step;
        s.gradient(&xp, &mut gp)?;
        xp[j] = x[j] - step;
        s.gradient(&xp, &mut gm)?;
        xp[j] = x[j];
        for i in 0..n {
            fd[(i, j)] = (gp[i] - gm[i]) / (step + step);
        }
    }
    Ok((fd - &h).norm() / h.norm().max(T::one()))
}
