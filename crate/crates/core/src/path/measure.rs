use serde::Serialize;

use super::tangent::strictly_greater;
use super::DiscretePath;
use crate::error::{MepError, Result};
use crate::linalg::distance;
use crate::scalar::Real;
use crate::surface::Surface;

pub fn energies<T: Real, S: Surface<T> + ?Sized>(surface: &S, path: &DiscretePath<T>) -> Result<Vec<T>> {
    path.images().map(|x| surface.energy(x)).collect()
}

/// Polygonal length `sum_k |phi_k - phi_{k-1}|`.
pub fn discrete_length<T: Real>(path: &DiscretePath<T>) -> T {
    (1..path.len()).fold(T::zero(), |acc, k| {
        acc + distance(path.image(k), path.image(k - 1))
    })
}

/// Index of the highest-energy interior image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SaddleIndex(usize);

impl SaddleIndex {
    pub fn new(k: usize) -> Self {
        Self(k)
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// Smallest index attaining the maximum energy (up to `tie_rtol`); must be interior.
pub fn saddle_index<T: Real>(energies: &[T], tie_rtol: T) -> Result<SaddleIndex> {
    let m = energies.len() - 1;
    let max = energies.iter().copied().fold(energies[0], |a, b| a.max(b));
    let k = energies
        .iter()
        .position(|&e| !strictly_greater(max, e, tie_rtol))
        .expect("maximum is attained");
    if k == 0 || k >= m {
        return Err(MepError::InvalidSaddleIndex { k_sad: k, m });
    }
    Ok(SaddleIndex(k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Barrier<T: Real> {
    /// `max_k E(phi_k) - E(phi_0)`
    pub value: T,
    /// Smallest index attaining the maximum.
    pub k_max: usize,
}

impl<T: Real> Barrier<T> {
    pub fn from_energies(energies: &[T]) -> Self {
        let (k_max, max) = energies
            .iter()
            .copied()
            .enumerate()
            .fold((0, energies[0]), |acc, (k, e)| if e > acc.1 { (k, e) } else { acc });
        Self {
            value: max - energies[0],
            k_max,
        }
    }

    pub fn saddle_index(&self, m: usize) -> Option<SaddleIndex> {
        (self.k_max > 0 && self.k_max < m).then_some(SaddleIndex(self.k_max))
    }
}

pub fn barrier<T: Real, S: Surface<T> + ?Sized>(surface: &S, path: &DiscretePath<T>) -> Result<Barrier<T>> {
    Ok(Barrier::from_energies(&energies(surface, path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{Example1, Example1Variant};
    use std::f64::consts::PI;

    fn semicircle(m: usize) -> DiscretePath<f64> {
        DiscretePath::new(
            (0..=m)
                .map(|k| {
                    let t = PI * k as f64 / m as f64;
                    vec![-t.cos(), t.sin()]
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn lengths() {
        assert!((discrete_length(&semicircle(256)) - PI).abs() < 1e-3);
        let seg = DiscretePath::new(vec![vec![-1.0, 0.0], vec![0.25, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(discrete_length(&seg), 2.0);
    }

    #[test]
    fn circle_barrier() {
        let e = Example1::<f64>::new(Example1Variant::E);
        let b = barrier(&e, &semicircle(100)).unwrap();
        assert!((b.value - 1.0).abs() < 1e-3);
        assert_eq!(b.k_max, 50);
        let e2 = Example1::<f64>::new(Example1Variant::E2);
        let b2 = barrier(&e2, &semicircle(100)).unwrap();
        assert!((b2.value - 1.0).abs() < 1e-3);
    }

    #[test]
    fn flat_barrier_is_zero() {
        let b = Barrier::from_energies(&[3.0, 3.0, 3.0, 3.0]);
        assert_eq!(b.value, 0.0);
        assert_eq!(b.k_max, 0);
        assert_eq!(b.saddle_index(3), None);
    }

    #[test]
    fn saddle_index_tie_breaking() {
        assert_eq!(saddle_index(&[0.0, 2.0, 2.0, 1.0], 0.0).unwrap().get(), 1);
        assert_eq!(saddle_index(&[0.0, 2.0, 2.0 + 1e-15, 1.0], 1e-12).unwrap().get(), 1);
        assert!(saddle_index(&[0.0, 1.0, 2.0], 0.0).is_err());
    }
}
