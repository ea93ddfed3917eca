use nalgebra::{DMatrix, DVector};

use super::residual::cubic_weight;
use crate::error::Result;
use crate::linalg::{dot, norm};
use crate::path::{
    discrete_length, energies, saddle_index, tangent_backward, tangent_saddle_switch, DiscretePath,
    NodeField, SaddleIndex, DEFAULT_TIE_RTOL,
};
use crate::scalar::Real;
use crate::surface::Surface;

/// Derivative of the discrete MEP residual at a path, with `k_sad` frozen.
///
/// `matrix` is `N(M+1)` square in node-major order. Rows and columns of the
/// two end nodes are zero, so it acts on fields with `v_0 = v_M = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Linearization<T: Real> {
    pub matrix: DMatrix<T>,
    pub dim: usize,
    pub m: usize,
    pub k_sad: SaddleIndex,
}

impl<T: Real> Linearization<T> {
    pub fn apply(&self, v: &NodeField<T>) -> NodeField<T> {
        let x = DVector::from_column_slice(v.as_flat());
        let y = &self.matrix * x;
        NodeField::from_flat(self.dim, y.iter().copied().collect())
    }

    /// The block acting on the interior nodes `1..M`.
    pub fn interior(&self) -> DMatrix<T> {
        let n = self.dim;
        let size = n * (self.m - 1);
        self.matrix.view((n, n), (size, size)).into_owned()
    }
}

/// `(node, weight)` pairs of the saddle-switch difference at `k`.
fn saddle_switch_weights<T: Real>(k: usize, m: usize, k_sad: usize) -> [(usize, T); 2] {
    let mt = T::from_usize_lossy(m);
    if k < k_sad {
        [(k, -mt), (k + 1, mt)]
    } else if k == k_sad {
        let half = mt * T::lit(0.5);
        [(k - 1, -half), (k + 1, half)]
    } else {
        [(k - 1, -mt), (k, mt)]
    }
}

pub fn linearize_fh<T: Real, S: Surface<T> + ?Sized>(
    surface: &S,
    path: &DiscretePath<T>,
) -> Result<Linearization<T>> {
    let e = energies(surface, path)?;
    let k_sad = saddle_index(&e, T::lit(DEFAULT_TIE_RTOL))?;
    linearize_fh_at(surface, path, k_sad)
}

pub fn linearize_fh_at<T: Real, S: Surface<T> + ?Sized>(
    surface: &S,
    path: &DiscretePath<T>,
    k_sad: SaddleIndex,
) -> Result<Linearization<T>> {
    let m = path.m();
    let n = path.dim();
    let mt = T::from_usize_lossy(m);
    let ks = k_sad.get();
    let dt = tangent_saddle_switch(path, k_sad)?;
    let dh = tangent_backward(path)?;
    let length = discrete_length(path);
    let mut a = DMatrix::<T>::zeros(n * (m + 1), n * (m + 1));
    let interior = |j: usize| j > 0 && j < m;

    // Derivative of L_h: sum_j c_j . v_j with c_j = t_j - t_{j+1}, t the backward units.
    let mut c = NodeField::zeros(n, m + 1);
    for j in 1..m {
        let (tj, tj1) = (dh.units.at(j), dh.units.at(j + 1));
        for (ci, (&x, &y)) in c.at_mut(j).iter_mut().zip(tj.iter().zip(tj1)) {
            *ci = x - y;
        }
    }

    let mut g = vec![T::zero(); n];
    for k in 1..m {
        let x = path.image(k);
        surface.gradient(x, &mut g)?;
        let hess = surface.hessian(x)?;
        let d = dt.differences.at(k);
        let dn = norm(d);
        let tau = DVector::from_column_slice(dt.units.at(k));
        let proj = DMatrix::<T>::identity(n, n) - &tau * tau.transpose();
        let gv = DVector::from_column_slice(&g);
        let pg = &proj * &gv;
        let lam = dot(&g, d) / (dn * dn);
        let w = cubic_weight::<T>(k, m, ks);
        let stretch = norm(dh.differences.at(k)) - length;

        let row = n * k;
        let mut add = |j: usize, block: &DMatrix<T>| {
            if interior(j) {
                let mut view = a.view_mut((row, n * j), (n, n));
                view += block;
            }
        };

        add(k, &(&proj * &hess));

        // tangent rotation terms and the stretch term all act through D~ v
        let rot = &proj * (-lam - w * stretch / dn) - &tau * pg.transpose() / dn;
        for (j, wt) in saddle_switch_weights::<T>(k, m, ks) {
            add(j, &(&rot * wt));
        }

        // -w (t_k . D^ v_k - dL_h[v]) tau
        let tk = DVector::from_column_slice(dh.units.at(k));
        let local = &tau * tk.transpose() * (-w * mt);
        add(k, &local);
        add(k - 1, &(-local.clone()));
        for j in 1..m {
            let cj = DVector::from_column_slice(c.at(j));
            add(j, &(&tau * cj.transpose() * w));
        }
    }
    Ok(Linearization {
        matrix: a,
        dim: n,
        m,
        k_sad,
    })
}
