//! The ring potential `a (1 - x^2 - y^2)^2 + y^2 / (x^2 + y^2)` and its two
//! weakened-confinement variants.
//!
//! The minimizers sit at `(+-1, 0)` and the exact minimum energy path is the unit
//! circle. The prefactor `a` controls the radial stiffness at the minimizers:
//! `a = 1` gives Hessian eigenvalues `{2, 8}`, `a = 1/4` a doubly degenerate `2`,
//! and `a = 1/8` gives `{1, 2}`, where the tangential `2` is no longer lowest.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{check_dim, Surface};
use crate::error::{MepError, Result};
use crate::scalar::Real;

/// Squared radius below which a point is treated as the singular origin.
const SINGULAR_RADIUS2: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Example1Variant {
    E,
    E1,
    E2,
}

impl Example1Variant {
    pub fn prefactor(self) -> f64 {
        match self {
            Example1Variant::E => 1.0,
            Example1Variant::E1 => 0.25,
            Example1Variant::E2 => 0.125,
        }
    }
}

impl fmt::Display for Example1Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Example1Variant::E => "E",
            Example1Variant::E1 => "E1",
            Example1Variant::E2 => "E2",
        };
        f.write_str(s)
    }
}

impl FromStr for Example1Variant {
    type Err = MepError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "E" => Ok(Example1Variant::E),
            "E1" => Ok(Example1Variant::E1),
            "E2" => Ok(Example1Variant::E2),
            other => Err(MepError::UnknownSurface(format!("example1:{other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example1<T: Real> {
    variant: Example1Variant,
    a: T,
}

impl<T: Real> Example1<T> {
    pub fn new(variant: Example1Variant) -> Self {
        Self {
            variant,
            a: T::lit(variant.prefactor()),
        }
    }

    pub fn variant(&self) -> Example1Variant {
        self.variant
    }

    fn radius2(x: &[T]) -> Result<T> {
        check_dim(2, x.len())?;
        let s = x[0] * x[0] + x[1] * x[1];
        if s < T::lit(SINGULAR_RADIUS2) {
            return Err(MepError::SingularPoint(format!("{}, {}", x[0], x[1])));
        }
        Ok(s)
    }
}

impl<T: Real> Surface<T> for Example1<T> {
    fn dim(&self) -> usize {
        2
    }

    fn energy(&self, p: &[T]) -> Result<T> {
        let s = Self::radius2(p)?;
        let (_, y) = (p[0], p[1]);
        let w = T::one() - s;
        Ok(self.a * w * w + y * y / s)
    }

    fn gradient(&self, p: &[T], grad: &mut [T]) -> Result<()> {
        let s = Self::radius2(p)?;
        let (x, y) = (p[0], p[1]);
        let four = T::lit(4.0);
        let two = T::lit(2.0);
        let w = T::one() - s;
        let s2 = s * s;
        grad[0] = -four * self.a * x * w - two * x * y * y / s2;
        grad[1] = -four * self.a * y * w + two * y * x * x / s2;
        Ok(())
    }

    fn hessian(&self, p: &[T]) -> Result<DMatrix<T>> {
        let s = Self::radius2(p)?;
        let (x, y) = (p[0], p[1]);
        let (two, four, eight) = (T::lit(2.0), T::lit(4.0), T::lit(8.0));
        let a = self.a;
        let w = T::one() - s;
        let s2 = s * s;
        let s3 = s2 * s;
        let hxx = -four * a * w + eight * a * x * x - two * y * y / s2 + eight * x * x * y * y / s3;
        let hyy = -four * a * w + eight * a * y * y + two * x * x / s2 - eight * x * x * y * y / s3;
        let hxy = eight * a * x * y - four * x * y / s2 + eight * x * y * y * y / s3;
        Ok(DMatrix::from_row_slice(2, 2, &[hxx, hxy, hxy, hyy]))
    }

    fn energy_gradient(&self, p: &[T], grad: &mut [T]) -> Result<T> {
        let s = Self::radius2(p)?;
        let (x, y) = (p[0], p[1]);
        let (two, four) = (T::lit(2.0), T::lit(4.0));
        let w = T::one() - s;
        let s2 = s * s;
        grad[0] = -four * self.a * x * w - two * x * y * y / s2;
        grad[1] = -four * self.a * y * w + two * y * x * x / s2;
        Ok(self.a * w * w + y * y / s)
    }

    fn is_excluded(&self, p: &[T]) -> bool {
        p[0] * p[0] + p[1] * p[1] < T::lit(SINGULAR_RADIUS2)
    }

    fn segment_excluded(&self, a: &[T], b: &[T]) -> bool {
        // distance from the origin to the segment a -> b
        let d = [b[0] - a[0], b[1] - a[1]];
        let dd = d[0] * d[0] + d[1] * d[1];
        let t = if dd > T::zero() {
            (-(a[0] * d[0] + a[1] * d[1]) / dd).max(T::zero()).min(T::one())
        } else {
            T::zero()
        };
        let c = [a[0] + t * d[0], a[1] + t * d[1]];
        self.is_excluded(&c)
    }
}
