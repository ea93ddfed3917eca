use serde::Serialize;

use crate::error::Result;
use crate::linalg::{dot, norm, norm_inf};
use crate::path::{
    discrete_length, energies, saddle_index, tangent_backward, tangent_saddle_switch, yh_norm,
    DiscretePath, NodeField, SaddleIndex, DEFAULT_TIE_RTOL,
};
use crate::scalar::Real;
use crate::surface::Surface;

/// `alpha_k (alpha_k - 1) (alpha_k - alpha_{k_sad + 1/2})`
pub(crate) fn cubic_weight<T: Real>(k: usize, m: usize, k_sad: usize) -> T {
    let mt = T::from_usize_lossy(m);
    let a = T::from_usize_lossy(k) / mt;
    let a_half = (T::from_usize_lossy(k_sad) + T::lit(0.5)) / mt;
    a * (a - T::one()) * (a - a_half)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport<T: Real> {
    /// `perpendicular + tangential`
    pub residual: NodeField<T>,
    /// `P^perp grad E` with the saddle-switch tangent.
    pub perpendicular: NodeField<T>,
    /// Length-equalizing term.
    pub tangential: NodeField<T>,
    pub k_sad: SaddleIndex,
    /// Y_h norm of the residual with the two end values dropped.
    pub yh_norm: T,
    /// `max(|f_0|_inf, |f_M|_inf)`; zero when both ends are critical points.
    pub endpoint_residual: T,
    pub length: T,
}

/// Discrete MEP residual, with `k_sad` taken from the image energies.
pub fn residual_fh<T: Real, S: Surface<T> + ?Sized>(
    surface: &S,
    path: &DiscretePath<T>,
) -> Result<ResidualReport<T>> {
    let e = energies(surface, path)?;
    let k_sad = saddle_index(&e, T::lit(DEFAULT_TIE_RTOL))?;
    residual_fh_at(surface, path, k_sad)
}

/// Discrete MEP residual for a given saddle index.
pub fn residual_fh_at<T: Real, S: Surface<T> + ?Sized>(
    surface: &S,
    path: &DiscretePath<T>,
    k_sad: SaddleIndex,
) -> Result<ResidualReport<T>> {
    let m = path.m();
    let n = path.dim();
    let dt = tangent_saddle_switch(path, k_sad)?;
    let dh = tangent_backward(path)?;
    let length = discrete_length(path);

    let mut perpendicular = NodeField::zeros(n, m + 1);
    let mut tangential = NodeField::zeros(n, m + 1);
    let mut residual = NodeField::zeros(n, m + 1);
    let mut g = vec![T::zero(); n];
    for k in 0..=m {
        surface.gradient(path.image(k), &mut g)?;
        let tau = dt.units.at(k);
        let gt = dot(&g, tau);
        let stretch = norm(dh.differences.at(k)) - length;
        let c = cubic_weight::<T>(k, m, k_sad.get()) * stretch;
        let (p, t, f) = (perpendicular.at_mut(k), tangential.at_mut(k), residual.at_mut(k));
        for i in 0..n {
            p[i] = g[i] - gt * tau[i];
            t[i] = -c * tau[i];
        }
        for i in 0..n {
            f[i] = p[i] + t[i];
        }
    }

    let endpoint_residual = norm_inf(residual.at(0)).max(norm_inf(residual.at(m)));
    let mut interior = residual.clone();
    interior.at_mut(0).iter_mut().for_each(|x| *x = T::zero());
    interior.at_mut(m).iter_mut().for_each(|x| *x = T::zero());
    let yh = yh_norm(&interior, k_sad)?;
    Ok(ResidualReport {
        residual,
        perpendicular,
        tangential,
        k_sad,
        yh_norm: yh,
        endpoint_residual,
        length,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{Example1, Example1Variant};
    use std::f64::consts::PI;

    fn circle(m: usize) -> DiscretePath<f64> {
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
    fn straight_line_has_no_tangential_term() {
        struct Tilted;
        impl Surface<f64> for Tilted {
            fn dim(&self) -> usize {
                2
            }
            fn energy(&self, x: &[f64]) -> Result<f64> {
                Ok(x[0] + 0.5 * x[1])
            }
            fn gradient(&self, _x: &[f64], g: &mut [f64]) -> Result<()> {
                g[0] = 1.0;
                g[1] = 0.5;
                Ok(())
            }
            fn hessian(&self, _x: &[f64]) -> Result<nalgebra::DMatrix<f64>> {
                Ok(nalgebra::DMatrix::zeros(2, 2))
            }
        }
        let p = DiscretePath::new((0..=8).map(|k| vec![k as f64 / 8.0, 0.0]).collect()).unwrap();
        let r = residual_fh_at(&Tilted, &p, SaddleIndex::new(4)).unwrap();
        assert!(r.tangential.sup_norm() < 1e-14);
        for k in 0..=8 {
            assert!((r.perpendicular.at(k)[1] - 0.5).abs() < 1e-15);
            assert!(r.perpendicular.at(k)[0].abs() < 1e-15);
        }
    }

    #[test]
    fn exact_circle_residual_shrinks() {
        let s = Example1::<f64>::new(Example1Variant::E);
        let a = residual_fh(&s, &circle(64)).unwrap();
        let b = residual_fh(&s, &circle(128)).unwrap();
        assert_eq!(a.k_sad.get(), 32);
        assert!(a.endpoint_residual < 1e-12);
        let ratio = a.yh_norm / b.yh_norm;
        assert!(ratio > 1.6 && ratio < 2.4, "ratio {ratio}");
    }
}
