//! Four-term Gaussian-sum Müller potential.
//!
//! The parameter vectors default to the printed benchmark values, including the
//! sign of `T[3] = -15`, and can be overridden from JSON.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{check_dim, Surface};
use crate::error::Result;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MullerParams {
    #[serde(rename = "T")]
    pub t: [f64; 4],
    pub a: [f64; 4],
    pub b: [f64; 4],
    pub c: [f64; 4],
    pub x_bar: [f64; 4],
    pub y_bar: [f64; 4],
}

impl Default for MullerParams {
    fn default() -> Self {
        Self {
            t: [-200.0, -100.0, -170.0, -15.0],
            a: [-1.0, -1.0, -6.5, 0.7],
            b: [0.0, 0.0, 11.0, 0.6],
            c: [-10.0, -10.0, -6.5, 0.7],
            x_bar: [1.0, 0.0, -0.5, -1.0],
            y_bar: [0.0, 0.5, 1.5, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Muller<T: Real> {
    params: MullerParams,
    terms: [[T; 6]; 4],
}

impl<T: Real> Muller<T> {
    pub fn new(params: MullerParams) -> Self {
        let terms = std::array::from_fn(|k| {
            [
                T::lit(params.t[k]),
                T::lit(params.a[k]),
                T::lit(params.b[k]),
                T::lit(params.c[k]),
                T::lit(params.x_bar[k]),
                T::lit(params.y_bar[k]),
            ]
        });
        Self { params, terms }
    }

    pub fn params(&self) -> &MullerParams {
        &self.params
    }

    /// Per-term weight `T_k exp(Q_k)` and the gradient of `Q_k`.
    #[inline]
    fn term(&self, k: usize, x: T, y: T) -> (T, T, T) {
        let [tk, a, b, c, xb, yb] = self.terms[k];
        let two = T::lit(2.0);
        let dx = x - xb;
        let dy = y - yb;
        let q = a * dx * dx + b * dx * dy + c * dy * dy;
        (tk * q.exp(), two * a * dx + b * dy, b * dx + two * c * dy)
    }
}

impl<T: Real> Default for Muller<T> {
    fn default() -> Self {
        Self::new(MullerParams::default())
    }
}

impl<T: Real> Surface<T> for Muller<T> {
    fn dim(&self) -> usize {
        2
    }

    fn energy(&self, p: &[T]) -> Result<T> {
        check_dim(2, p.len())?;
        Ok((0..4).fold(T::zero(), |e, k| e + self.term(k, p[0], p[1]).0))
    }

    fn gradient(&self, p: &[T], grad: &mut [T]) -> Result<()> {
        self.energy_gradient(p, grad).map(|_| ())
    }

    fn energy_gradient(&self, p: &[T], grad: &mut [T]) -> Result<T> {
        check_dim(2, p.len())?;
        let mut e = T::zero();
        grad[0] = T::zero();
        grad[1] = T::zero();
        for k in 0..4 {
            let (w, qx, qy) = self.term(k, p[0], p[1]);
            e += w;
            grad[0] += w * qx;
            grad[1] += w * qy;
        }
        Ok(e)
    }

    fn hessian(&self, p: &[T]) -> Result<DMatrix<T>> {
        check_dim(2, p.len())?;
        let two = T::lit(2.0);
        let mut h = DMatrix::zeros(2, 2);
        for k in 0..4 {
            let [_, a, b, c, _, _] = self.terms[k];
            let (w, qx, qy) = self.term(k, p[0], p[1]);
            h[(0, 0)] += w * (qx * qx + two * a);
            h[(0, 1)] += w * (qx * qy + b);
            h[(1, 1)] += w * (qy * qy + two * c);
        }
        h[(1, 0)] = h[(0, 1)];
        Ok(h)
    }
}
