use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::linearize::{linearize_fh, Linearization};
use crate::error::{MepError, Result};
use crate::path::{xh_norm, yh_norm, DiscretePath, NodeField};
use crate::scalar::Real;
use crate::surface::Surface;

const INVERSE_ITERATIONS: usize = 40;

/// Estimate of `inf_v |dF_h v|_{Y_h} / |v|_{X_h}`. Only an upper bound on the
/// true infimum: it is the smallest ratio seen over the probed directions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport<T: Real> {
    pub gain: T,
    /// Smallest ratio over the random directions.
    pub random_min: T,
    /// Smallest ratio along the inverse iteration for the lowest singular vector.
    pub inverse_min: T,
    pub trials: usize,
    pub seed: u64,
}

fn ratio<T: Real>(lin: &Linearization<T>, interior: &[T]) -> Result<T> {
    let n = lin.dim;
    let mut v = NodeField::zeros(n, lin.m + 1);
    v.as_flat_mut()[n..n * lin.m].copy_from_slice(interior);
    let jv = lin.apply(&v);
    Ok(yh_norm(&jv, lin.k_sad)? / xh_norm(&v))
}

fn inverse_iteration<T: Real>(a: &DMatrix<T>, seed: u64) -> Result<Vec<DVector<T>>> {
    let size = a.nrows();
    let lu = a.clone().lu();
    let lu_t = a.transpose().lu();
    let diag = lu.u().diagonal();
    let max = diag.iter().fold(T::zero(), |acc, d| acc.max(d.abs()));
    let min = diag.iter().fold(max, |acc, d| acc.min(d.abs()));
    if !(min > max * T::epsilon() * T::from_usize_lossy(size)) {
        return Err(MepError::SingularMatrix);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = DVector::from_fn(size, |_, _| T::lit(rng.random_range(-1.0..1.0)));
    let mut out = Vec::with_capacity(INVERSE_ITERATIONS);
    for _ in 0..INVERSE_ITERATIONS {
        let y = lu_t.solve(&x).ok_or(MepError::SingularMatrix)?;
        let z = lu.solve(&y).ok_or(MepError::SingularMatrix)?;
        let nz = z.norm();
        if !nz.is_finite() || nz == T::zero() {
            return Err(MepError::SingularMatrix);
        }
        x = z / nz;
        out.push(x.clone());
    }
    Ok(out)
}

/// Probes the stability gain of the linearized residual at `path` with
/// `trials` random directions plus inverse iteration on `A^T A`.
pub fn stability_gain<T: Real, S: Surface<T> + ?Sized>(
    surface: &S,
    path: &DiscretePath<T>,
    trials: usize,
    seed: u64,
) -> Result<StabilityReport<T>> {
    let lin = linearize_fh(surface, path)?;
    let a = lin.interior();
    let size = a.nrows();

    let random_min = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64 + 1);
            let v: Vec<T> = (0..size).map(|_| T::lit(rng.random_range(-1.0..1.0))).collect();
            ratio(&lin, &v)
        })
        .collect::<Result<Vec<T>>>()?
        .into_iter()
        .fold(T::max_value().unwrap_or(T::lit(f64::MAX)), |a, b| a.min(b));

    let mut inverse_min = T::max_value().unwrap_or(T::lit(f64::MAX));
    for x in inverse_iteration(&a, seed)? {
        inverse_min = inverse_min.min(ratio(&lin, x.as_slice())?);
    }
    Ok(StabilityReport {
        gain: random_min.min(inverse_min),
        random_min,
        inverse_min,
        trials,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_operator_is_reported() {
        let a = DMatrix::<f64>::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(inverse_iteration(&a, 1).unwrap_err(), MepError::SingularMatrix);
        let b = DMatrix::<f64>::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1e-3]);
        let x = inverse_iteration(&b, 1).unwrap().pop().unwrap();
        assert!(x[1].abs() > 1.0 - 1e-12);
    }
}
