use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The search stopped before it could prove optimality. `best_lower_bound`
    /// is a value the invariant is known to reach (1 + longest extremal
    /// sequence found so far).
    #[error("search budget exhausted after {nodes} nodes; invariant is at least {best_lower_bound}")]
    BudgetExhausted { best_lower_bound: u64, nodes: u64 },

    #[error("derivation failed: {0}")]
    DerivationFailed(String),

    #[error("input {index} ({value}) is not smooth over the factor base")]
    NotSmooth { index: usize, value: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
