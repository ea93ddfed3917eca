//! Discretization errors of a coarse discrete MEP against a reference.

use serde::{Deserialize, Serialize};

use super::reference::Reference;
use crate::error::{MepError, Result};
use crate::linalg::{distance, norm_inf};
use crate::path::{upwind_differences, Barrier, DiscretePath};
use crate::scalar::Real;

/// `e_c1 = max_k |D_h phi_k - phi'(kh)| + e_c`, `e_c = max_k |phi_k - phi(kh)|`,
/// `e_eb = |barrier - reference barrier|`; Euclidean per image, with the
/// component-wise max norm variants alongside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorTriple {
    pub e_c1: f64,
    pub e_eb: f64,
    pub e_c: f64,
    pub e_c1_inf: f64,
    pub e_c_inf: f64,
}

pub fn error_triple<T: Real>(
    path: &DiscretePath<T>,
    energies: &[T],
    reference: &Reference<T>,
    tie_rtol: T,
) -> Result<ErrorTriple> {
    let m = path.m();
    if energies.len() != path.len() {
        return Err(MepError::Dimension {
            expected: path.len(),
            got: energies.len(),
        });
    }
    if path.dim() != reference.path.dim() {
        return Err(MepError::Dimension {
            expected: reference.path.dim(),
            got: path.dim(),
        });
    }
    let diffs = upwind_differences(path, energies, tie_rtol);
    let (mut e_c, mut e_d, mut e_c_inf, mut e_d_inf) = (T::zero(), T::zero(), T::zero(), T::zero());
    let mut scratch = vec![T::zero(); path.dim()];
    for k in 0..=m {
        let (x, dx) = reference.at(k, m)?;
        e_c = e_c.max(distance(path.image(k), &x));
        e_d = e_d.max(distance(diffs.at(k), &dx));
        for (s, (&a, &b)) in scratch.iter_mut().zip(path.image(k).iter().zip(&x)) {
            *s = a - b;
        }
        e_c_inf = e_c_inf.max(norm_inf(&scratch));
        for (s, (&a, &b)) in scratch.iter_mut().zip(diffs.at(k).iter().zip(&dx)) {
            *s = a - b;
        }
        e_d_inf = e_d_inf.max(norm_inf(&scratch));
    }
    let barrier = Barrier::from_energies(energies).value;
    Ok(ErrorTriple {
        e_c1: (e_d + e_c).as_f64(),
        e_eb: (barrier - reference.barrier).abs().as_f64(),
        e_c: e_c.as_f64(),
        e_c1_inf: (e_d_inf + e_c_inf).as_f64(),
        e_c_inf: e_c_inf.as_f64(),
    })
}
