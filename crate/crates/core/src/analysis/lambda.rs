use serde::Serialize;

use crate::convergence::fourth_order_derivative;
use crate::error::Result;
use crate::linalg::dot;
use crate::path::{energies, saddle_index, DiscretePath, DEFAULT_TIE_RTOL};
use crate::scalar::Real;
use crate::surface::Surface;

/// Tolerance for `lambda` to count as vanishing at `0`, `s_bar` and `1`.
pub const LAMBDA_ROOT_TOL: f64 = 1e-6;

/// `lambda(alpha) = grad E . phi' / |phi'|^2` sampled along a fine path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaProfile<T: Real> {
    pub samples: Vec<T>,
    pub k_sad: usize,
    /// Parabolic refinement of `alpha_{k_sad}` from the three energies around it.
    pub s_bar: T,
    /// `lambda(s_bar)` by quadratic interpolation.
    pub lambda_at_s_bar: T,
    pub slope_start: T,
    pub slope_saddle: T,
    pub slope_end: T,
    /// Bounds of `|lambda / (alpha (alpha - 1) (alpha - s_bar))|` away from the roots.
    pub c_lower: T,
    pub c_upper: T,
    pub roots_vanish: bool,
    pub sign_pattern: bool,
}

pub fn lambda_profile<T: Real, S: Surface<T> + ?Sized>(
    surface: &S,
    reference: &DiscretePath<T>,
) -> Result<LambdaProfile<T>> {
    let m = reference.m();
    let mt = T::from_usize_lossy(m);
    let h = T::one() / mt;
    let two = T::lit(2.0);
    let dphi = fourth_order_derivative(reference)?;
    let mut g = vec![T::zero(); reference.dim()];
    let mut samples = Vec::with_capacity(m + 1);
    for k in 0..=m {
        surface.gradient(reference.image(k), &mut g)?;
        let d = dphi.at(k);
        samples.push(dot(&g, d) / dot(d, d));
    }

    let e = energies(surface, reference)?;
    let ks = saddle_index(&e, T::lit(DEFAULT_TIE_RTOL))?.get();
    let curv = e[ks - 1] - two * e[ks] + e[ks + 1];
    let shift = if curv < T::zero() {
        (e[ks - 1] - e[ks + 1]) / (two * curv)
    } else {
        T::zero()
    };
    let s_bar = (T::from_usize_lossy(ks) + shift) * h;

    let (l0, l1, l2) = (samples[ks - 1], samples[ks], samples[ks + 1]);
    let lambda_at_s_bar =
        l1 + shift * (l2 - l0) / two + shift * shift * (l2 - two * l1 + l0) / two;

    let three = T::lit(3.0);
    let four = T::lit(4.0);
    let slope_start = (-three * samples[0] + four * samples[1] - samples[2]) / (two * h);
    let slope_end = (three * samples[m] - four * samples[m - 1] + samples[m - 2]) / (two * h);
    let slope_saddle = (l2 - l0) / (two * h);

    let mut c_lower = T::max_value().unwrap_or(T::lit(f64::MAX));
    let mut c_upper = T::zero();
    let exclusion = two * h;
    for (k, &lam) in samples.iter().enumerate().take(m).skip(1) {
        let a = T::from_usize_lossy(k) * h;
        if a <= exclusion || T::one() - a <= exclusion || (a - s_bar).abs() <= exclusion {
            continue;
        }
        let q = (lam / (a * (a - T::one()) * (a - s_bar))).abs();
        c_lower = c_lower.min(q);
        c_upper = c_upper.max(q);
    }

    let tol = T::lit(LAMBDA_ROOT_TOL);
    let roots_vanish =
        samples[0].abs() <= tol && samples[m].abs() <= tol && lambda_at_s_bar.abs() <= tol;
    let sign_pattern =
        slope_start > T::zero() && slope_saddle < T::zero() && slope_end > T::zero();
    Ok(LambdaProfile {
        samples,
        k_sad: ks,
        s_bar,
        lambda_at_s_bar,
        slope_start,
        slope_saddle,
        slope_end,
        c_lower,
        c_upper,
        roots_vanish,
        sign_pattern,
    })
}
