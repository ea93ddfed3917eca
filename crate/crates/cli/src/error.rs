use mep_core::MepError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("did not converge: {0}")]
    NoConvergence(String),
    #[error("degenerate path: {0}")]
    Degenerate(String),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::NoConvergence(_) => 3,
            CliError::Degenerate(_) => 4,
            CliError::Output(_) => 1,
        }
    }
}

impl From<MepError> for CliError {
    fn from(e: MepError) -> Self {
        use MepError::*;
        let msg = e.to_string();
        match e {
            Config(_) | UnknownSurface(_) | Dimension { .. } | TooFewImages(_) | MeshMismatch { .. }
            | Snapshot(_) | CollinearVia | DegenerateLattice(_) => CliError::Config(msg),
            NoConvergence { .. } | SingularHessian | SingularMatrix => CliError::NoConvergence(msg),
            CoincidentImages(..) | ZeroTangent(_) | InvalidSaddleIndex { .. } | DegeneratePath
            | PathCollapsed { .. } | ExcludedRegion(_) | SingularPoint(_) | Collision(_)
            | NonzeroEndpoint => CliError::Degenerate(msg),
            Io(_) => CliError::Output(msg),
        }
    }
}
