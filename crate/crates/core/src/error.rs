use thiserror::Error;

/// Largest qubit count any dense representation in this crate accepts.
pub const MAX_QUBITS: usize = 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MagicError {
    #[error("amplitude vector length {0} is not a power of two >= 2")]
    NotPowerOfTwo(usize),
    #[error("state norm {norm} deviates from 1 by more than {tol:e}")]
    NotNormalized { norm: f64, tol: f64 },
    #[error("{what}: {n} qubits exceeds the limit of {max}")]
    DimensionOverflow {
        what: &'static str,
        n: usize,
        max: usize,
    },
    #[error("dimension mismatch: expected {expected} qubits, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("qubit {qubit} out of range for a {n}-qubit register")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid density operator: {0}")]
    InvalidDensity(String),
    #[error("gate is not diagonal (max off-diagonal magnitude {0:e}); use the Choi state instead")]
    NonDiagonalGate(f64),
    #[error("input state carries no magic ({0:e}); stabilizer inputs cannot produce magic")]
    ZeroInputMagic(f64),
    #[error("probability {0} is outside (0, 1]")]
    InvalidProbability(f64),
    #[error("invalid bound parameters: {0}")]
    InvalidParameters(String),
    #[error("angle {0} is congruent to 0 mod 2pi; the phase gate is the identity")]
    DegenerateAngle(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("optimizer failure: {0}")]
    Optimizer(String),
}

impl MagicError {
    /// True for errors caused by exceeding a size cap rather than malformed input.
    pub fn is_resource_error(&self) -> bool {
        matches!(self, MagicError::DimensionOverflow { .. })
    }
}

pub type Result<T> = std::result::Result<T, MagicError>;

pub(crate) fn check_qubits(what: &'static str, n: usize, max: usize) -> Result<()> {
    if n > max {
        Err(MagicError::DimensionOverflow { what, n, max })
    } else {
        Ok(())
    }
}
