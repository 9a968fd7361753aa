//! Condition checkers for convergence/divergence of indicator sums, plus the
//! closed-form three-point counterexample arithmetic.
//!
//! Verdicts are finite-scan statements: `Holds` and `Fails` are exact over
//! the scanned range, `Inconclusive` means the scan could not certify either
//! way. None of these claim almost-sure statements.

mod checks;
mod counterexample;
mod norm;
mod profile;
mod report;

pub use checks::{
    check_bc1, check_matrix_condition, check_mixing_condition, check_pairwise_independent,
    check_xz_conditions, kochen_stone_ratio, KochenStoneDiagnostic, MatrixBoundDiagnostic,
    XzDiagnostic, XzForm, DEFAULT_CHECK_TOL, DEFAULT_KS_EPSILON,
};
pub use counterexample::{
    counterexample_report, counterexample_variance, selection_model, CounterexampleReport,
    CounterexampleRow, ParityRule,
};
pub use norm::{operator_norm_estimate, NormError, NormEstimate};
pub use profile::{CorrelationMatrixSpec, MixingProfile};
pub use report::{ConditionId, DiagnosticsReport, ScanRange, Verdict, Witness};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("E S_m = 0 over the whole grid; ratio undefined")]
    ZeroMean,
    #[error("t = {t} out of range for m = {m}")]
    OutOfRange { t: usize, m: usize },
    #[error("scan parameter out of range: {0}")]
    InvalidScan(String),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Model(#[from] crate::models::ModelError),
}
