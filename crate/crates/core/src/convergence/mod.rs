//! Mesh-refinement harness for the discrete MEP.

mod errors;
mod fit;
mod reference;
mod study;

pub use errors::{error_triple, ErrorTriple};
pub use fit::{fit_slope, SlopeFit};
pub use reference::{
    build_reference, exact_reference, fourth_order_derivative, reference_from_path, ExactArc, Reference,
};
pub use study::{
    example1_even_spec, run_study, study_reference, ConvergenceTable, StudyOutcome, StudyPath, StudySlopes, StudySpec,
    TableRow, STUDY_FORCE_TOL,
};
