//! Dense complex linear algebra and the Hilbert–Schmidt geometry of
//! operator subspaces.

mod algebra;
mod dense;
mod search;
mod subspace;
mod verdict;

pub use algebra::{algebra_block_dims, algebra_blocks, AlgebraBlock};
pub use dense::*;
pub use search::rank_one_element;
pub(crate) use search::{random_unit_vector, restart_rng};
pub use subspace::{
    commutant, complement, hermitian_span, intersection, is_abelian, is_algebra,
    orthonormal_basis, sum, OperatorSubspace,
};
pub use verdict::{Verdict, Witness};

/// Numerical tolerances shared by every computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Singular-value cutoff relative to the largest singular value.
    pub rank_eps: f64,
    /// Residual accepted for an eigenvector.
    pub eig_eps: f64,
    /// Eigenvalues with `1 − |λ| ≤ peripheral_eps` are peripheral.
    pub peripheral_eps: f64,
    /// Largest denominator tried when rationalizing eigenvalue angles;
    /// `None` means `d²`.
    pub angle_max_den: Option<u64>,
    /// Residual accepted for subspace membership.
    pub subspace_eps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_eps: 1e-9,
            eig_eps: 1e-9,
            peripheral_eps: 1e-8,
            angle_max_den: None,
            subspace_eps: 1e-8,
        }
    }
}

impl Tolerances {
    /// Upper edge of the band in which near-peripheral eigenvalues trigger a warning.
    pub const AMBIGUOUS_BAND: f64 = 1e-6;

    pub fn max_den(&self, d: usize) -> u64 {
        self.angle_max_den.unwrap_or((d * d) as u64).max((d * d) as u64)
    }

    /// Cutoff for singular values of `T − λ` at a peripheral eigenvalue.
    pub(crate) fn null_eps(&self) -> f64 {
        (self.peripheral_eps * 100.0).max(1e-7)
    }
}

/// Budget for randomized searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            restarts: 64,
            iterations: 200,
            seed: 42,
        }
    }
}

/// Tolerances plus search budget, threaded through the analysis functions.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Config {
    pub tol: Tolerances,
    pub search: SearchBudget,
}
