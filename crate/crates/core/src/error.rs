use thiserror::Error;

/// Errors raised by surfaces, path operations and path dynamics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MepError {
    #[error("surface is singular at ({0})")]
    SingularPoint(String),
    #[error("degenerate lattice: cell height {0} must be positive")]
    DegenerateLattice(f64),
    #[error("atoms collide: pair distance {0:e} below 1e-8")]
    Collision(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("path needs at least 3 images (M >= 2), got M = {0}")]
    TooFewImages(usize),
    #[error("images {0} and {1} coincide")]
    CoincidentImages(usize, usize),
    #[error("difference used for the tangent at image {0} vanishes")]
    ZeroTangent(usize),
    #[error("saddle index {k_sad} is not interior to 0..{m}")]
    InvalidSaddleIndex { k_sad: usize, m: usize },
    #[error("field is not in Y_h: endpoint values must vanish")]
    NonzeroEndpoint,
    #[error("path has zero length")]
    DegeneratePath,
    #[error("images collided during evolution (spacing {spacing:e} at step {step})")]
    PathCollapsed { step: usize, spacing: f64 },
    #[error("via point is collinear with the endpoints")]
    CollinearVia,
    #[error("initial path enters the excluded region at image {0}")]
    ExcludedRegion(usize),
    #[error("iteration did not converge after {iterations} iterations (residual {grad_norm:e})")]
    NoConvergence { iterations: usize, grad_norm: f64 },
    #[error("Hessian is singular at the current iterate")]
    SingularHessian,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("mesh mismatch: M = {m} does not divide reference M = {m_ref}")]
    MeshMismatch { m: usize, m_ref: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown surface id '{0}'")]
    UnknownSurface(String),
    #[error("snapshot format error: {0}")]
    Snapshot(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for MepError {
    fn from(e: std::io::Error) -> Self {
        MepError::Io(e.to_string())
    }
}

pub type Result<T, E = MepError> = std::result::Result<T, E>;
