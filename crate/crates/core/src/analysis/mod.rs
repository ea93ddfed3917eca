//! Diagnostics of the discrete MEP equation: residual, linearization,
//! stability probe and the `lambda` profile along a fine path.

mod lambda;
mod linearize;
mod residual;
mod stability;

pub use lambda::{lambda_profile, LambdaProfile, LAMBDA_ROOT_TOL};
pub use linearize::{linearize_fh, linearize_fh_at, Linearization};
pub use residual::{residual_fh, residual_fh_at, ResidualReport};
pub use stability::{stability_gain, StabilityReport};
