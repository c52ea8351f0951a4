use thiserror::Error;

pub type Result<T, E = XtalError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum XtalError {
    /// Malformed or inconsistent input; `field` names the offending location.
    #[error("{field}: {message}")]
    Input { field: String, message: String },

    #[error("graph is disconnected: vertex {vertex} is unreachable from vertex {root}")]
    Disconnected { root: u32, vertex: u32 },

    #[error("voltages do not span Z^{dim} (sublattice index {index}, 0 means rank deficient)")]
    VoltagesNotSpanning { dim: usize, index: u64 },

    #[error("degenerate crystal: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular lattice basis (|det| = {det:e})")]
    SingularBasis { det: f64 },

    #[error("enumeration needs {needed} candidate points, budget is {budget}")]
    Budget { needed: u128, budget: u64 },

    #[error("eigensolver did not converge on a {size}x{size} matrix")]
    Eigensolver { size: usize },

    #[error("{0}")]
    Domain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl XtalError {
    pub fn input(field: impl Into<String>, message: impl Into<String>) -> Self {
        XtalError::Input {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 2 for input/usage problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            XtalError::Input { .. }
            | XtalError::Disconnected { .. }
            | XtalError::VoltagesNotSpanning { .. }
            | XtalError::DimensionMismatch { .. }
            | XtalError::SingularBasis { .. }
            | XtalError::Domain(_)
            | XtalError::Io(_) => 2,
            XtalError::Degenerate(_) | XtalError::Budget { .. } | XtalError::Eigensolver { .. } => 3,
        }
    }
}
