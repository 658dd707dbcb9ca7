use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {dim} exceeds the cap {cap}")]
    SizeLimit { dim: usize, cap: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("decomposition failed (residual {residual:.3e})")]
    Decomposition { residual: f64 },

    #[error("ill-conditioned fit (condition number {condition:.3e})")]
    IllConditionedFit { condition: f64 },

    #[error("fit residual {residual:.3e} exceeds {limit:.1e}")]
    FitResidual { residual: f64, limit: f64 },

    #[error("leading coefficient vanishes; polynomial degree is degenerate")]
    DegenerateDegree,

    #[error("no convergence after {iterations} iterations (best residual {norm:.3e})")]
    NonConvergence {
        iterations: usize,
        norm: f64,
        best: Vec<f64>,
    },

    #[error("singular jacobian (smallest/largest singular value {ratio:.3e}); reseed")]
    SingularJacobian { ratio: f64 },

    #[error("integrand does not decay (|f({cutoff})| = {value:.3e})")]
    Divergence { cutoff: f64, value: f64 },

    #[error("quadrature error {error:.3e} above tolerance {tol:.1e}")]
    Quadrature { error: f64, tol: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular parameter: {0}")]
    SingularParameter(String),

    #[error("degenerate root configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("degeneracy of t(u0) not resolved after {attempts} draws")]
    DegeneracyResolution { attempts: usize },

    #[error("extraction failed: {0}")]
    Extraction(String),

    #[error("sign of lambda0 unknown; an ED-extracted value is required")]
    SignUnknown,

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Domain,
    Convergence,
    Io,
    Verification,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NonConvergence { .. }
            | Error::SingularJacobian { .. }
            | Error::Decomposition { .. }
            | Error::DegeneracyResolution { .. }
            | Error::Quadrature { .. }
            | Error::Divergence { .. }
            | Error::Extraction(_)
            | Error::FitResidual { .. }
            | Error::IllConditionedFit { .. } => ErrorKind::Convergence,
            Error::Io(_) | Error::Json(_) => ErrorKind::Io,
            Error::Verification(_) => ErrorKind::Verification,
            _ => ErrorKind::Domain,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Domain => 1,
            ErrorKind::Convergence => 2,
            ErrorKind::Io => 3,
            ErrorKind::Verification => 4,
        }
    }
}
