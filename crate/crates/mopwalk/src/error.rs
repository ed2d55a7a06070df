use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("resonant parameters: alpha - beta = {0} is an integer")]
    ResonantParams(String),

    #[error("leading minor {0} of the moment matrix vanishes")]
    SingularMinor(usize),

    #[error("precision loss: {bits_lost} of {precision} bits cancelled")]
    PrecisionLoss { bits_lost: u32, precision: u32 },

    #[error("hypergeometric series does not terminate")]
    NonTerminating,

    #[error("normalizing value at index {0} is not positive")]
    NonpositiveValue(usize),

    #[error("negative entry at ({0}, {1})")]
    NegativeEntry(usize, usize),

    #[error("zero denominator in scaling recursion at row {0}")]
    ZeroDenominator(usize),

    #[error("node iteration stalled: {0}")]
    ConvergenceFailure(String),

    #[error("quadrature did not settle by {nodes} nodes: value {value:e}, error bound {bound:e}")]
    SlowConvergence { value: f64, bound: f64, nodes: usize },

    #[error("polynomial division left remainder {0:e}")]
    InexactDivision(f64),

    #[error("ratio estimates do not settle: spread {0:e}")]
    NoConvergence(f64),

    #[error("no trajectory started at state {0}")]
    InsufficientData(usize),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams(_) | Error::ResonantParams(_) => 2,
            Error::PrecisionLoss { .. } => 3,
            _ => 4,
        }
    }
}
