//! Built-in surfaces selected by string id with optional JSON overrides.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Example1, Example1Variant, LjCell, LjParams, Muller, MullerParams, Surface};
use crate::error::{MepError, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SurfaceId {
    Example1(Example1Variant),
    Muller,
    LjCell,
}

impl SurfaceId {
    pub const ALL: [SurfaceId; 5] = [
        SurfaceId::Example1(Example1Variant::E),
        SurfaceId::Example1(Example1Variant::E1),
        SurfaceId::Example1(Example1Variant::E2),
        SurfaceId::Muller,
        SurfaceId::LjCell,
    ];
}

impl fmt::Display for SurfaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceId::Example1(v) => write!(f, "example1:{v}"),
            SurfaceId::Muller => f.write_str("muller"),
            SurfaceId::LjCell => f.write_str("lj-cell"),
        }
    }
}

impl FromStr for SurfaceId {
    type Err = MepError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "muller" => Ok(SurfaceId::Muller),
            "lj-cell" => Ok(SurfaceId::LjCell),
            _ => match s.strip_prefix("example1:") {
                Some(v) => v
                    .parse()
                    .map(SurfaceId::Example1)
                    .map_err(|_| MepError::UnknownSurface(s.to_string())),
                None => Err(MepError::UnknownSurface(s.to_string())),
            },
        }
    }
}

impl Serialize for SurfaceId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SurfaceId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Surface id plus parameter overrides, as it appears in run configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub id: SurfaceId,
    /// Müller parameter vectors or Lennard-Jones `epsilon0/sigma0/r_on/r_off`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overrides: Option<serde_json::Value>,
}

impl SurfaceSpec {
    pub fn new(id: SurfaceId) -> Self {
        Self { id, overrides: None }
    }

    pub fn build<T: Real>(&self) -> Result<BuiltinSurface<T>> {
        let bad = |e: serde_json::Error| MepError::Config(format!("surface overrides: {e}"));
        match self.id {
            SurfaceId::Example1(v) => {
                if self.overrides.is_some() {
                    return Err(MepError::Config(format!("{} takes no overrides", self.id)));
                }
                Ok(BuiltinSurface::Example1(Example1::new(v)))
            }
            SurfaceId::Muller => {
                let params = match &self.overrides {
                    Some(v) => MullerParams::deserialize(v).map_err(bad)?,
                    None => MullerParams::default(),
                };
                Ok(BuiltinSurface::Muller(Muller::new(params)))
            }
            SurfaceId::LjCell => {
                let params = match &self.overrides {
                    Some(v) => LjParams::deserialize(v).map_err(bad)?,
                    None => LjParams::default(),
                };
                if !(params.r_on < params.r_off && params.sigma0 > 0.0) {
                    return Err(MepError::Config("lj-cell needs 0 < sigma0, r_on < r_off".into()));
                }
                Ok(BuiltinSurface::LjCell(LjCell::new(params)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinSurface<T: Real> {
    Example1(Example1<T>),
    Muller(Muller<T>),
    LjCell(LjCell<T>),
}

impl<T: Real> BuiltinSurface<T> {
    pub fn from_id(id: SurfaceId) -> Self {
        SurfaceSpec::new(id).build().expect("default parameters are valid")
    }

    pub fn id(&self) -> SurfaceId {
        match self {
            BuiltinSurface::Example1(s) => SurfaceId::Example1(s.variant()),
            BuiltinSurface::Muller(_) => SurfaceId::Muller,
            BuiltinSurface::LjCell(_) => SurfaceId::LjCell,
        }
    }

    fn inner(&self) -> &dyn Surface<T> {
        match self {
            BuiltinSurface::Example1(s) => s,
            BuiltinSurface::Muller(s) => s,
            BuiltinSurface::LjCell(s) => s,
        }
    }
}

impl<T: Real> Surface<T> for BuiltinSurface<T> {
    fn dim(&self) -> usize {
        self.inner().dim()
    }
    fn energy(&self, x: &[T]) -> Result<T> {
        self.inner().energy(x)
    }
    fn gradient(&self, x: &[T], grad: &mut [T]) -> Result<()> {
        self.inner().gradient(x, grad)
    }
    fn hessian(&self, x: &[T]) -> Result<DMatrix<T>> {
        self.inner().hessian(x)
    }
    fn energy_gradient(&self, x: &[T], grad: &mut [T]) -> Result<T> {
        self.inner().energy_gradient(x, grad)
    }
    fn is_excluded(&self, x: &[T]) -> bool {
        self.inner().is_excluded(x)
    }
    fn segment_excluded(&self, a: &[T], b: &[T]) -> bool {
        self.inner().segment_excluded(a, b)
    }
}
