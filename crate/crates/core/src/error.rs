use thiserror::Error;

pub type Result<T> = std::result::Result<T, HbmError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HbmError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("singular direction at node {node}: {detail}")]
    SingularNode { node: usize, detail: String },
    #[error("field invariant violated at node {node}: {detail}")]
    Invariant { node: usize, detail: String },
    #[error("ill-conditioned D2h at node {node}: eigenvalue ratio {ratio:.3e}")]
    Conditioning { node: usize, ratio: f64 },
    #[error("degenerate hull: {0}")]
    DegenerateHull(String),
    #[error("eigensolver did not converge: residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl HbmError {
    /// Input-side errors (bad arguments, files, grammar) as opposed to a
    /// numerical guard tripping.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            HbmError::Input(_) | HbmError::Parse { .. } | HbmError::GridMismatch(_) | HbmError::Unsupported(_)
        )
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        HbmError::Input(msg.into())
    }
}
