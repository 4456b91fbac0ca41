use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not unitary (norm drift {drift:.3e})")]
    NotUnitary { drift: f64 },

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("wire {wire} out of range for a {width}-qutrit circuit")]
    WireOutOfRange { wire: usize, width: usize },

    #[error("wire {0} used more than once by a single gate")]
    DuplicateWire(usize),

    #[error("gate {gate} expects {expected} wires, got {found}")]
    Arity {
        gate: String,
        expected: usize,
        found: usize,
    },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("search length {0} exceeds the exact-search budget")]
    SearchBudget(usize),

    #[error("no realization of {target} found up to length {max_len}")]
    SynthesisFailed { target: String, max_len: usize },

    #[error("fit did not converge after {restarts} restarts (best residual {residual:.3e})")]
    NoConvergence { restarts: usize, residual: f64 },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
