//! Minimum energy paths on low-dimensional potential energy surfaces with
//! the nudged elastic band and string methods.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the `*64` aliases fix it to `f64`.

pub mod analysis;
pub mod convergence;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod path;
pub mod scalar;
pub mod surface;

pub use dynamics::{
    evolve, make_initial_path, make_initial_path_on, neb_force, newton_polish, relax, string_force, write_trace, EvolveConfig,
    EvolveResult, InitialPath, Method, Stepper, TraceRow,
};
pub use error::{MepError, Result};
pub use path::{DiscretePath, NodeField};
pub use scalar::Real;
pub use surface::{BuiltinSurface, Example1, Example1Variant, LjCell, LjParams, Muller, MullerParams, Surface, SurfaceId, SurfaceSpec};

pub type Path64 = DiscretePath<f64>;
pub type Field64 = NodeField<f64>;
pub type Surface64 = BuiltinSurface<f64>;
pub type EvolveResult64 = EvolveResult<f64>;
