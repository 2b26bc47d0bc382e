use thiserror::Error;

/// Failure modes of the simulator.
///
/// Each variant belongs to one of three families (configuration, physics
/// domain, numerical accuracy); the CLI maps the family to its exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PdcError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("frequency {omega:.6e} rad/s outside valid range [{min:.6e}, {max:.6e}] rad/s")]
    Domain { omega: f64, min: f64, max: f64 },

    #[error("physics domain error: {0}")]
    Physics(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("backward-wave gain singularity: |D1| = {d1_abs:.3e} below {threshold:.1e} at detuning {omega:.6e} rad/s")]
    BackwardSingularity {
        d1_abs: f64,
        threshold: f64,
        omega: f64,
    },

    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate:.6e}, error {error:.3e})")]
    Accuracy {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },

    #[error("grid too narrow: edge level {edge_ratio:.3e} of peak exceeds {limit:.1e}")]
    GridTooNarrow { edge_ratio: f64, limit: f64 },

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),

    #[error("no sign change over bracket [{lo}, {hi}] THz: h(lo) = {h_lo:.6e}, h(hi) = {h_hi:.6e}")]
    Bracket {
        lo: f64,
        hi: f64,
        h_lo: f64,
        h_hi: f64,
    },

    #[error("oracle mismatch in {quantity}: relative deviation {rel_deviation:.3e} exceeds {tolerance:.1e}")]
    OracleMismatch {
        quantity: String,
        rel_deviation: f64,
        tolerance: f64,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Physics,
    Accuracy,
}

impl PdcError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            PdcError::Config(_) | PdcError::Bracket { .. } | PdcError::Io(_) => ErrorKind::Config,
            PdcError::Accuracy { .. } | PdcError::OracleMismatch { .. } => ErrorKind::Accuracy,
            _ => ErrorKind::Physics,
        }
    }

    /// Process exit code: 2 configuration, 3 physics domain, 4 accuracy.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Config => 2,
            ErrorKind::Physics => 3,
            ErrorKind::Accuracy => 4,
        }
    }
}

impl From<std::io::Error> for PdcError {
    fn from(e: std::io::Error) -> Self {
        PdcError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, PdcError>;
