//! Energy per cell of a two-atom periodic Lennard-Jones crystal.
//!
//! One atom sits at the origin, the other at `p = (x, y)`, and the lattice is
//! generated by `(2x, 0)` and `(x, y)`. The energy is the sum of the two site
//! energies, each half the pair potential summed over every lattice site except
//! the atom itself. The pair potential is cut off by a cubic in `r` that is flat
//! at both ends of `[r_on, r_off]`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{check_dim, Surface};
use crate::error::{MepError, Result};
use crate::scalar::Real;

const COLLISION_DISTANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LjParams {
    pub epsilon0: f64,
    pub sigma0: f64,
    pub r_on: f64,
    pub r_off: f64,
}

impl Default for LjParams {
    fn default() -> Self {
        Self {
            epsilon0: 1.0,
            sigma0: 1.0,
            r_on: 1.9,
            r_off: 2.7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LjCell<T: Real> {
    params: LjParams,
    eps: T,
    sigma: T,
    r_on: T,
    r_off: T,
    /// Added to `r_off + |p|` to get the lattice enumeration radius.
    margin: T,
}

/// `(phi, phi', phi'')` at one distance.
#[derive(Debug, Clone, Copy)]
pub struct PairValue<T> {
    pub value: T,
    pub d1: T,
    pub d2: T,
}

impl<T: Real> LjCell<T> {
    pub fn new(params: LjParams) -> Self {
        Self {
            params,
            eps: T::lit(params.epsilon0),
            sigma: T::lit(params.sigma0),
            r_on: T::lit(params.r_on),
            r_off: T::lit(params.r_off),
            margin: T::lit(0.5),
        }
    }

    /// Overrides the lattice enumeration safety margin (default 0.5).
    pub fn with_margin(mut self, margin: T) -> Self {
        self.margin = margin;
        self
    }

    pub fn params(&self) -> &LjParams {
        &self.params
    }

    /// Cubic cutoff and its first two derivatives.
    pub fn cutoff(&self, r: T) -> (T, T, T) {
        if r <= self.r_on {
            return (T::one(), T::zero(), T::zero());
        }
        if r >= self.r_off {
            return (T::zero(), T::zero(), T::zero());
        }
        let (two, three, six) = (T::lit(2.0), T::lit(3.0), T::lit(6.0));
        let w = self.r_off - self.r_on;
        let t = (r - self.r_on) / w;
        (
            T::one() - three * t * t + two * t * t * t,
            six * t * (t - T::one()) / w,
            six * (two * t - T::one()) / (w * w),
        )
    }

    /// Cut-off Lennard-Jones pair potential and derivatives.
    pub fn pair(&self, r: T) -> PairValue<T> {
        if r >= self.r_off {
            return PairValue {
                value: T::zero(),
                d1: T::zero(),
                d2: T::zero(),
            };
        }
        let four = T::lit(4.0);
        let s2 = (self.sigma / r) * (self.sigma / r);
        let s6 = s2 * s2 * s2;
        let s12 = s6 * s6;
        let u = four * self.eps * (s12 - s6);
        let u1 = four * self.eps * (T::lit(-12.0) * s12 + T::lit(6.0) * s6) / r;
        let u2 = four * self.eps * (T::lit(156.0) * s12 - T::lit(42.0) * s6) / (r * r);
        let (c, c1, c2) = self.cutoff(r);
        let two = T::lit(2.0);
        PairValue {
            value: u * c,
            d1: u1 * c + u * c1,
            d2: u2 * c + two * u1 * c1 + u * c2,
        }
    }

    /// True if some interacting pair distance lies within `margin` of a cutoff knot,
    /// where the Hessian is discontinuous.
    pub fn near_cutoff_knot(&self, p: &[T], margin: T) -> bool {
        let mut near = false;
        let _ = self.for_each_pair(p, |r, _, _| {
            if (r - self.r_on).abs() < margin || (r - self.r_off).abs() < margin {
                near = true;
            }
        });
        near
    }

    /// Visits every pair distance of both half sums as `(r, a, b)`, where the
    /// separation vector is `(a x, b y)` with integer coefficients `a, b`.
    fn for_each_pair(&self, p: &[T], mut visit: impl FnMut(T, T, T)) -> Result<()> {
        check_dim(2, p.len())?;
        let (x, y) = (p[0], p[1]);
        if y <= T::zero() {
            return Err(MepError::DegenerateLattice(y.as_f64()));
        }
        let tiny = T::lit(COLLISION_DISTANCE);
        let ax = (x + x).abs();
        if ax < tiny || y < tiny {
            return Err(MepError::Collision(ax.min(y).as_f64()));
        }
        let radius = self.r_off + (x * x + y * y).sqrt() + self.margin;
        let m_max = (radius / y).ceil().as_f64() as i64 + 1;
        for m in -m_max..=m_max {
            let mt = T::lit(m as f64);
            // |2x n + x m| <= radius
            let center = -mt * x / (x + x);
            let half = radius / ax;
            let n_lo = (center - half).floor().as_f64() as i64 - 1;
            let n_hi = (center + half).ceil().as_f64() as i64 + 1;
            for n in n_lo..=n_hi {
                let j = 2 * n + m;
                // site (n, m) seen from the origin atom, skipping itself
                if !(n == 0 && m == 0) {
                    self.visit_one(x, y, j, m, tiny, &mut visit)?;
                }
                // seen from the atom at p = site (0, 1), skipping itself
                if !(n == 0 && m == 1) {
                    self.visit_one(x, y, j - 1, m - 1, tiny, &mut visit)?;
                }
            }
        }
        Ok(())
    }

    #[inline]
    fn visit_one(
        &self,
        x: T,
        y: T,
        a: i64,
        b: i64,
        tiny: T,
        visit: &mut impl FnMut(T, T, T),
    ) -> Result<()> {
        let (at, bt) = (T::lit(a as f64), T::lit(b as f64));
        let r = ((x * at) * (x * at) + (y * bt) * (y * bt)).sqrt();
        if r < tiny {
            return Err(MepError::Collision(r.as_f64()));
        }
        if r < self.r_off {
            visit(r, at, bt);
        }
        Ok(())
    }
}

impl<T: Real> Default for LjCell<T> {
    fn default() -> Self {
        Self::new(LjParams::default())
    }
}

impl<T: Real> Surface<T> for LjCell<T> {
    fn dim(&self) -> usize {
        2
    }

    fn energy(&self, p: &[T]) -> Result<T> {
        let half = T::lit(0.5);
        let mut e = T::zero();
        self.for_each_pair(p, |r, _, _| e += half * self.pair(r).value)?;
        Ok(e)
    }

    fn gradient(&self, p: &[T], grad: &mut [T]) -> Result<()> {
        self.energy_gradient(p, grad).map(|_| ())
    }

    fn energy_gradient(&self, p: &[T], grad: &mut [T]) -> Result<T> {
        let half = T::lit(0.5);
        let (x, y) = (p[0], p[1]);
        let (mut e, mut gx, mut gy) = (T::zero(), T::zero(), T::zero());
        self.for_each_pair(p, |r, a, b| {
            let pv = self.pair(r);
            e += half * pv.value;
            // r_x = x a^2 / r, r_y = y b^2 / r
            gx += half * pv.d1 * x * a * a / r;
            gy += half * pv.d1 * y * b * b / r;
        })?;
        grad[0] = gx;
        grad[1] = gy;
        Ok(e)
    }

    fn hessian(&self, p: &[T]) -> Result<DMatrix<T>> {
        let half = T::lit(0.5);
        let (x, y) = (p[0], p[1]);
        let (mut hxx, mut hxy, mut hyy) = (T::zero(), T::zero(), T::zero());
        self.for_each_pair(p, |r, a, b| {
            let pv = self.pair(r);
            let (a2, b2) = (a * a, b * b);
            let r3 = r * r * r;
            let rx = x * a2 / r;
            let ry = y * b2 / r;
            let rxx = a2 / r - x * x * a2 * a2 / r3;
            let ryy = b2 / r - y * y * b2 * b2 / r3;
            let rxy = -x * y * a2 * b2 / r3;
            hxx += half * (pv.d2 * rx * rx + pv.d1 * rxx);
            hyy += half * (pv.d2 * ry * ry + pv.d1 * ryy);
            hxy += half * (pv.d2 * rx * ry + pv.d1 * rxy);
        })?;
        Ok(DMatrix::from_row_slice(2, 2, &[hxx, hxy, hxy, hyy]))
    }
}
