use std::fmt;

use super::dense::CVec;

/// Evidence attached to a verdict.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// A structural argument, e.g. "complement is the zero subspace".
    Structural(String),
    /// A pair of unit vectors together with the residual that was checked.
    Vectors { x: CVec, y: CVec, residual: f64 },
}

/// Outcome of a semidecidable predicate.
///
/// The boolean always refers to the predicate named by the producing
/// function. Heuristic variants record the search effort spent.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    CertifiedTrue(Witness),
    CertifiedFalse(Witness),
    HeuristicTrue { restarts: usize, best_residual: f64 },
    HeuristicFalse { restarts: usize, best_residual: f64 },
}

impl Verdict {
    pub fn value(&self) -> bool {
        matches!(self, Verdict::CertifiedTrue(_) | Verdict::HeuristicTrue { .. })
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::CertifiedTrue(_) | Verdict::CertifiedFalse(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::CertifiedTrue(w) | Verdict::CertifiedFalse(w) => Some(w),
            _ => None,
        }
    }

    /// The witness vectors, if any.
    pub fn vectors(&self) -> Option<(&CVec, &CVec)> {
        match self.witness() {
            Some(Witness::Vectors { x, y, .. }) => Some((x, y)),
            _ => None,
        }
    }

    /// Same certification status with the boolean flipped.
    pub fn negate(self) -> Verdict {
        match self {
            Verdict::CertifiedTrue(w) => Verdict::CertifiedFalse(w),
            Verdict::CertifiedFalse(w) => Verdict::CertifiedTrue(w),
            Verdict::HeuristicTrue {
                restarts,
                best_residual,
            } => Verdict::HeuristicFalse {
                restarts,
                best_residual,
            },
            Verdict::HeuristicFalse {
                restarts,
                best_residual,
            } => Verdict::HeuristicTrue {
                restarts,
                best_residual,
            },
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::CertifiedTrue(_) => write!(f, "true (certified)"),
            Verdict::CertifiedFalse(_) => write!(f, "false (certified)"),
            Verdict::HeuristicTrue { restarts, .. } => {
                write!(f, "true (not certified, {restarts} restarts)")
            }
            Verdict::HeuristicFalse { restarts, .. } => {
                write!(f, "false (not certified, {restarts} restarts)")
            }
        }
    }
}
