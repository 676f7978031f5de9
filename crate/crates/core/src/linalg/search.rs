//! Randomized search for rank-one elements `x y†` of an operator subspace.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::dense::*;
use super::subspace::OperatorSubspace;
use super::verdict::{Verdict, Witness};
use super::{SearchBudget, Tolerances};

/// Iterations granted to a restart whose residual already looks convergent.
const POLISH_ITERATIONS: usize = 5_000;
const POLISH_START: f64 = 1e-2;

pub(crate) fn random_unit_vector(d: usize, rng: &mut ChaCha8Rng) -> CVec {
    let v = CVec::from_fn(d, |_, _| {
        c(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    normalized(&v)
}

pub(crate) fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Distance of `x y†` from `V`, for unit `x`, `y`.
fn rank_one_residual(v: &OperatorSubspace, x: &CVec, y: &CVec) -> f64 {
    v.residual(&outer(x, y))
}

/// Does `V` contain a nonzero matrix of rank one?
///
/// `CertifiedTrue` carries unit vectors `x`, `y` with `x y†` in `V` (the
/// residual is re-verified before returning). `CertifiedFalse` is returned
/// only for the zero subspace. Otherwise an alternating search maximizes
/// `‖P_V(x y†)‖` over unit vectors: for fixed `y` the optimal `x` is the
/// top eigenvector of `Σ_B (B y)(B y)†`, and symmetrically for `y`.
pub fn rank_one_element(v: &OperatorSubspace, budget: &SearchBudget, tol: &Tolerances) -> Verdict {
    let d = v.ambient_dim();
    if v.dim() == 0 {
        return Verdict::CertifiedFalse(Witness::Structural("zero subspace".into()));
    }
    let accept = tol.subspace_eps;
    // Matrix units first: structured subspaces usually contain one.
    for i in 0..d {
        for j in 0..d {
            let (x, y) = (ket(d, i), ket(d, j));
            let r = rank_one_residual(v, &x, &y);
            if r <= accept {
                return Verdict::CertifiedTrue(Witness::Vectors { x, y, residual: r });
            }
        }
    }
    let basis = v.basis();
    let mut best = f64::INFINITY;
    for restart in 0..budget.restarts {
        let mut rng = restart_rng(budget.seed, restart);
        let mut y = random_unit_vector(d, &mut rng);
        let mut x = random_unit_vector(d, &mut rng);
        let mut limit = budget.iterations;
        let mut it = 0;
        let mut prev = f64::INFINITY;
        while it < limit {
            x = top_eigenvector(&basis, &y, false);
            y = top_eigenvector(&basis, &x, true);
            let r = rank_one_residual(v, &x, &y);
            if r <= accept {
                break;
            }
            if r < POLISH_START && limit == budget.iterations {
                limit = budget.iterations + POLISH_ITERATIONS;
            }
            if prev.is_finite() && (prev - r).abs() <= 1e-15 * prev.max(1.0) {
                break;
            }
            prev = r;
            it += 1;
        }
        let r = rank_one_residual(v, &x, &y);
        if r <= accept {
            return Verdict::CertifiedTrue(Witness::Vectors { x, y, residual: r });
        }
        best = best.min(r);
    }
    Verdict::HeuristicFalse {
        restarts: budget.restarts,
        best_residual: best,
    }
}

/// Top eigenvector of `Σ_B u_B u_B†` where `u_B = B z` (or `B† z` when
/// `adjoint` is set).
fn top_eigenvector(basis: &[CMat], z: &CVec, adjoint: bool) -> CVec {
    let d = z.len();
    let mut n = CMat::zeros(d, d);
    for b in basis {
        let u = if adjoint { b.adjoint() * z } else { b * z };
        n += &u * u.adjoint();
    }
    let e = herm_eig(&n);
    e.vectors.column(d - 1).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{complement, orthonormal_basis};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn matrix_unit_found() {
        let v = orthonormal_basis(&[unit(2, 0, 1)], &tol()).unwrap();
        let verdict = rank_one_element(&v, &SearchBudget::default(), &tol());
        let (x, y) = verdict.vectors().unwrap();
        assert_eq!((x, y), (&ket(2, 0), &ket(2, 1)));
    }

    #[test]
    fn zero_subspace_certified_false() {
        let v = OperatorSubspace::zero(3);
        assert!(matches!(
            rank_one_element(&v, &SearchBudget::default(), &tol()),
            Verdict::CertifiedFalse(_)
        ));
    }

    #[test]
    fn hidden_rank_one_found_by_search() {
        // x y† for non-basis x, y plus a full-rank distractor.
        let x = normalized(&CVec::from_vec(vec![c(1.0, 0.0), c(0.5, 0.5), c(-0.3, 0.2)]));
        let y = normalized(&CVec::from_vec(vec![c(0.2, -0.1), c(1.0, 0.0), c(0.7, 0.4)]));
        let distractor = identity(3) + unit(3, 0, 2);
        let v = orthonormal_basis(&[outer(&x, &y), distractor], &tol()).unwrap();
        let verdict = rank_one_element(&v, &SearchBudget::default(), &tol());
        assert!(verdict.is_certified() && verdict.value(), "{verdict:?}");
        let (a, b) = verdict.vectors().unwrap();
        assert!(v.residual(&outer(a, b)) <= 1e-8);
    }

    #[test]
    fn identity_span_has_no_rank_one_element_heuristically() {
        let v = orthonormal_basis(&[identity(3)], &tol()).unwrap();
        let budget = SearchBudget {
            restarts: 4,
            ..Default::default()
        };
        let verdict = rank_one_element(&v, &budget, &tol());
        assert!(matches!(verdict, Verdict::HeuristicFalse { .. }));
        // The complement of span{1} contains E12.
        assert!(rank_one_element(&complement(&v), &budget, &tol()).value());
    }
}
