//! Discrete norms on node fields.

use super::{NodeField, SaddleIndex};
use crate::error::{MepError, Result};
use crate::linalg::norm_inf;
use crate::scalar::Real;

/// `max_k |v_k|_inf`
pub fn sup_norm<T: Real>(v: &NodeField<T>) -> T {
    v.sup_norm()
}

/// Discrete C^1 norm `|D^ v|_inf + |v|_inf` with the backward difference `D^`.
pub fn xh_norm<T: Real>(v: &NodeField<T>) -> T {
    let m = v.len() - 1;
    let mt = T::from_usize_lossy(m);
    let mut d = T::zero();
    for k in 1..=m {
        for (a, b) in v.at(k).iter().zip(v.at(k - 1)) {
            d = d.max(((*a - *b) * mt).abs());
        }
    }
    // (D^ v)_0 repeats (D^ v)_1
    d + v.sup_norm()
}

/// Weighted residual norm
/// `max_{1<=k<=M-1} |f_k / (a_k (a_k - 1))|_inf + max_{k != k_sad} |(f_k - f_ksad) / (a_k - a_ksad)|_inf`.
///
/// Requires `f_0 = f_M = 0`.
pub fn yh_norm<T: Real>(f: &NodeField<T>, k_sad: SaddleIndex) -> Result<T> {
    let m = f.len() - 1;
    let ks = k_sad.get();
    if ks == 0 || ks >= m {
        return Err(MepError::InvalidSaddleIndex { k_sad: ks, m });
    }
    if f.at(0).iter().chain(f.at(m)).any(|&x| x != T::zero()) {
        return Err(MepError::NonzeroEndpoint);
    }
    let mt = T::from_usize_lossy(m);
    let alpha = |k: usize| T::from_usize_lossy(k) / mt;
    let mut first = T::zero();
    for k in 1..m {
        let a = alpha(k);
        first = first.max(norm_inf(f.at(k)) / (a * (a - T::one())).abs());
    }
    let fs = f.at(ks);
    let mut second = T::zero();
    for k in (0..=m).filter(|&k| k != ks) {
        let da = (alpha(k) - alpha(ks)).abs();
        for (x, y) in f.at(k).iter().zip(fs) {
            second = second.max((*x - *y).abs() / da);
        }
    }
    Ok(first + second)
}
