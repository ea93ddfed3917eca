//! First-order difference schemes for the path tangent.

use serde::Serialize;

use super::{DiscretePath, NodeField, SaddleIndex};
use crate::error::{MepError, Result};
use crate::linalg::{norm, scaled_diff};
use crate::scalar::Real;
use crate::surface::Surface;

/// Relative energy difference below which two image energies count as equal
/// when the upwind scheme orders them.
pub const DEFAULT_TIE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TangentScheme {
    /// Energy-upwinded: forward uphill, backward downhill, central otherwise.
    Upwind,
    /// Forward before the saddle index, central at it, backward after.
    SaddleSwitch,
    /// Forward at `k = 0`, backward elsewhere.
    Backward,
}

/// Unnormalized differences `(D phi)_k` and their unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentField<T> {
    pub scheme: TangentScheme,
    pub differences: NodeField<T>,
    pub units: NodeField<T>,
}

impl<T: Real> TangentField<T> {
    fn from_differences(scheme: TangentScheme, differences: NodeField<T>) -> Result<Self> {
        let mut units = differences.clone();
        for k in 0..units.len() {
            let v = units.at_mut(k);
            let n = norm(v);
            if n == T::zero() {
                return Err(MepError::ZeroTangent(k));
            }
            v.iter_mut().for_each(|x| *x /= n);
        }
        Ok(Self {
            scheme,
            differences,
            units,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stencil {
    Forward,
    Backward,
    Central,
}

#[inline]
pub(crate) fn strictly_greater<T: Real>(a: T, b: T, tie_rtol: T) -> bool {
    a - b > tie_rtol * (a.abs() + b.abs())
}

/// Stencil chosen by the upwind rule at every node.
pub(crate) fn upwind_stencils<T: Real>(energies: &[T], tie_rtol: T) -> Vec<Stencil> {
    let m = energies.len() - 1;
    let gt = |a: usize, b: usize| strictly_greater(energies[a], energies[b], tie_rtol);
    (0..=m)
        .map(|k| {
            if k == 0 {
                Stencil::Forward
            } else if k == m {
                Stencil::Backward
            } else if gt(k + 1, k) && gt(k, k - 1) {
                Stencil::Forward
            } else if gt(k - 1, k) && gt(k, k + 1) {
                Stencil::Backward
            } else {
                Stencil::Central
            }
        })
        .collect()
}

pub(crate) fn saddle_switch_stencils(m: usize, k_sad: usize) -> Vec<Stencil> {
    (0..=m)
        .map(|k| match k.cmp(&k_sad) {
            std::cmp::Ordering::Less => Stencil::Forward,
            std::cmp::Ordering::Equal => Stencil::Central,
            std::cmp::Ordering::Greater => Stencil::Backward,
        })
        .collect()
}

pub(crate) fn backward_stencils(m: usize) -> Vec<Stencil> {
    (0..=m)
        .map(|k| if k == 0 { Stencil::Forward } else { Stencil::Backward })
        .collect()
}

/// Applies per-node stencils to any node field with `M + 1` nodes.
pub(crate) fn apply_stencils<T: Real>(values: &NodeField<T>, stencils: &[Stencil]) -> NodeField<T> {
    let m = values.len() - 1;
    let mt = T::from_usize_lossy(m);
    let half_inv_h = mt * T::lit(0.5);
    let mut out = NodeField::zeros(values.dim(), m + 1);
    for (k, st) in stencils.iter().enumerate() {
        let (a, b, scale) = match st {
            Stencil::Forward => (k + 1, k, mt),
            Stencil::Backward => (k, k - 1, mt),
            Stencil::Central => (k + 1, k - 1, half_inv_h),
        };
        scaled_diff(values.at(a), values.at(b), scale, out.at_mut(k));
    }
    out
}

/// Raw upwind differences `(D_h phi)_k` given precomputed image energies.
pub fn upwind_differences<T: Real>(
    path: &DiscretePath<T>,
    energies: &[T],
    tie_rtol: T,
) -> NodeField<T> {
    apply_stencils(&path.field, &upwind_stencils(energies, tie_rtol))
}

/// Upwind tangent with the default tie tolerance.
pub fn tangent_upwind<T: Real, S: Surface<T> + ?Sized>(
    surface: &S,
    path: &DiscretePath<T>,
) -> Result<TangentField<T>> {
    let e = super::energies(surface, path)?;
    TangentField::from_differences(
        TangentScheme::Upwind,
        upwind_differences(path, &e, T::lit(DEFAULT_TIE_RTOL)),
    )
}

pub fn tangent_saddle_switch<T: Real>(
    path: &DiscretePath<T>,
    k_sad: SaddleIndex,
) -> Result<TangentField<T>> {
    let k = k_sad.get();
    if k == 0 || k >= path.m() {
        return Err(MepError::InvalidSaddleIndex { k_sad: k, m: path.m() });
    }
    TangentField::from_differences(
        TangentScheme::SaddleSwitch,
        apply_stencils(&path.field, &saddle_switch_stencils(path.m(), k)),
    )
}

pub fn tangent_backward<T: Real>(path: &DiscretePath<T>) -> Result<TangentField<T>> {
    TangentField::from_differences(
        TangentScheme::Backward,
        apply_stencils(&path.field, &backward_stencils(path.m())),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(m: usize) -> DiscretePath<f64> {
        DiscretePath::new((0..=m).map(|k| vec![k as f64 / m as f64, 0.5 * k as f64 / m as f64]).collect())
            .unwrap()
    }

    #[test]
    fn upwind_branches() {
        let p = DiscretePath::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 0.0]]).unwrap();
        let h_inv = 2.0;
        // increasing energies: forward at k = 1
        let d = upwind_differences(&p, &[0.0, 1.0, 2.0], 0.0);
        assert_eq!(d.at(1), &[(3.0 - 1.0) * h_inv, 0.0]);
        // decreasing: backward
        let d = upwind_differences(&p, &[2.0, 1.0, 0.0], 0.0);
        assert_eq!(d.at(1), &[(1.0 - 0.0) * h_inv, 0.0]);
        // local maximum: central
        let d = upwind_differences(&p, &[0.0, 1.0, 0.5], 0.0);
        assert_eq!(d.at(1), &[(3.0 - 0.0) * h_inv * 0.5, 0.0]);
        // ends are always one-sided
        assert_eq!(d.at(0), &[2.0, 0.0]);
        assert_eq!(d.at(2), &[4.0, 0.0]);
        // ties fall through to central
        let d = upwind_differences(&p, &[0.0, 1.0, 1.0], 1e-12);
        assert_eq!(d.at(1), &[3.0, 0.0]);
    }

    #[test]
    fn saddle_switch_on_a_line() {
        let p = line(4);
        let t = tangent_saddle_switch(&p, SaddleIndex::new(2)).unwrap();
        for k in 0..=4 {
            let d = t.differences.at(k);
            assert!((d[0] - 1.0).abs() < 1e-14 && (d[1] - 0.5).abs() < 1e-14);
        }
        assert!(tangent_saddle_switch(&p, SaddleIndex::new(4)).is_err());
    }

    #[test]
    fn saddle_switch_central_at_saddle() {
        let p = DiscretePath::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![2.0, 3.0],
            vec![4.0, 3.0],
            vec![5.0, 0.0],
        ])
        .unwrap();
        let t = tangent_saddle_switch(&p, SaddleIndex::new(2)).unwrap();
        // (phi_3 - phi_1) / (2h), h = 1/4
        assert_eq!(t.differences.at(2), &[6.0, 4.0]);
        assert_eq!(t.differences.at(1), &[4.0, 8.0]);
        assert_eq!(t.differences.at(3), &[8.0, 0.0]);
        let b = tangent_backward(&p).unwrap();
        assert_eq!(b.differences.at(0), &[4.0, 4.0]);
        assert_eq!(b.differences.at(1), &[4.0, 4.0]);
        assert_eq!(b.differences.at(4), &[4.0, -12.0]);
        let u: &[f64] = b.units.at(4);
        assert!((u[0] * u[0] + u[1] * u[1] - 1.0).abs() < 1e-15);
    }
}
