//! Small dense helpers on coordinate slices.

use crate::scalar::Real;

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

#[inline]
pub fn norm_inf<T: Real>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
}

#[inline]
pub fn distance<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
        .sqrt()
}

/// `out = (a - b) * scale`
#[inline]
pub fn scaled_diff<T: Real>(a: &[T], b: &[T], scale: T, out: &mut [T]) {
    for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
        *o = (x - y) * scale;
    }
}

/// Applies `P^perp_v = I - v v^T / |v|^2` to `g` in place. `v` must be nonzero.
#[inline]
pub fn project_perp<T: Real>(v: &[T], g: &mut [T]) {
    let c = dot(v, g) / dot(v, v);
    for (gi, &vi) in g.iter_mut().zip(v) {
        *gi -= c * vi;
    }
}
