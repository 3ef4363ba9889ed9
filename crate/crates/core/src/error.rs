use thiserror::Error;

/// Errors raised by the quaternionic algorithms in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QsliceError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not chi-structured: residual {residual:e} exceeds {tol:e}")]
    StructureViolation { residual: f64, tol: f64 },

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal {off:e})")]
    Solver { sweeps: usize, off: f64 },

    #[error("matrix is singular within tolerance")]
    SingularMatrix,

    #[error("matrix is not positive semidefinite: eigenvalue {0:e}")]
    NotPsd(f64),

    #[error("leading coefficient of the series is singular")]
    SingularLeadingCoefficient,

    #[error("kernel evaluated on its singular sphere")]
    SingularKernelPoint,

    #[error("unsupported evaluation: {0}")]
    UnsupportedEvaluation(String),

    #[error("block {0} is singular")]
    SingularBlock(&'static str),

    #[error("function evaluated on a pole sphere")]
    SingularPoint,

    #[error("construction failed: {0}")]
    ConstructionFailure(String),

    #[error("resolvent pencil is singular")]
    ResolventSingular,

    #[error("realization pencil is singular")]
    EvaluationSingular,

    #[error("evaluation error: {0}")]
    Evaluation(String),
}

pub type Result<T> = std::result::Result<T, QsliceError>;
