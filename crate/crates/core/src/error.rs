use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("non-finite matrix entry in {0}")]
    NonFinite(String),
    #[error("not trace preserving: ||sum K^dag K - 1|| = {0:.3e}")]
    NotTracePreserving(f64),
    #[error("not completely positive: Choi eigenvalue {0:.3e}")]
    NotCompletelyPositive(f64),
    #[error("Choi matrix not positive semidefinite: eigenvalue {0:.3e}")]
    NotPsd(f64),
    #[error("partial trace of Choi matrix is not the identity: deviation {0:.3e}")]
    PartialTraceNotIdentity(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("map is not unital: ||Phi(1) - 1|| = {0:.3e}")]
    NotUnital(f64),
    #[error("channel is not ergodic (fixed space has dimension {0})")]
    NotErgodic(usize),
    #[error("subspace is not closed under multiplication")]
    NotAnAlgebra,
    #[error("inconsistent algebra blocks: {0}")]
    InconsistentBlocks(String),
    #[error("Jordan block at peripheral eigenvalue {re:+.6}{im:+.6}i (algebraic {algebraic}, geometric {geometric})")]
    DefectivePeripheral {
        re: f64,
        im: f64,
        algebraic: usize,
        geometric: usize,
    },
    #[error("block extraction failed: {0}")]
    BlockExtractionFailed(String),
    #[error("block permutation ambiguous: {0}")]
    PermutationAmbiguous(String),
    #[error("{index} index: no certified verdict within bound {bound} (best guess {best_guess:?})")]
    BudgetExceeded {
        index: &'static str,
        bound: usize,
        best_guess: Option<usize>,
    },
    #[error("graph with {0} vertices exceeds the exact search limit")]
    TooLarge(usize),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by malformed or invalid input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::ShapeMismatch(_)
                | Error::DimensionMismatch { .. }
                | Error::NonFinite(_)
                | Error::NotTracePreserving(_)
                | Error::NotCompletelyPositive(_)
                | Error::NotPsd(_)
                | Error::PartialTraceNotIdentity(_)
                | Error::InvalidParams(_)
                | Error::Parse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
