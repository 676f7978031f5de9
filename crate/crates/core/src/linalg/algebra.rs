//! Wedderburn block structure of finite-dimensional *-algebras of matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::*;
use super::subspace::{commutant, intersection, is_algebra, OperatorSubspace};
use super::Tolerances;
use crate::error::{Error, Result};

/// One simple summand `M_{d} ⊗ 1_{m}` of a *-algebra.
#[derive(Clone, Debug)]
pub struct AlgebraBlock {
    pub d: usize,
    pub m: usize,
    /// Minimal central projection of the summand.
    pub projector: CMat,
}

const ATTEMPTS: usize = 8;

/// Block dimensions `(d_k, m_k)` sorted by `d_k` then `m_k`, descending.
pub fn algebra_block_dims(a: &OperatorSubspace, tol: &Tolerances) -> Result<Vec<(usize, usize)>> {
    Ok(algebra_blocks(a, tol)?.iter().map(|b| (b.d, b.m)).collect())
}

/// Minimal central projections of a *-algebra with the size of each summand.
///
/// The projections are the spectral projections of a random self-adjoint
/// element of the center; each candidate is checked to be central-minimal.
pub fn algebra_blocks(a: &OperatorSubspace, tol: &Tolerances) -> Result<Vec<AlgebraBlock>> {
    if !is_algebra(a, tol) {
        return Err(Error::NotAnAlgebra);
    }
    if a.dim() == 0 {
        return Ok(vec![]);
    }
    let center = intersection(a, &commutant(a, tol), tol);
    let zb = center.basis();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0b1c);
    let mut last_problem = String::from("empty center");
    for _ in 0..ATTEMPTS {
        match try_blocks(a, &zb, tol, &mut rng) {
            Ok(mut blocks) => {
                blocks.sort_by_key(|b| std::cmp::Reverse((b.d, b.m)));
                return Ok(blocks);
            }
            Err(problem) => last_problem = problem,
        }
    }
    Err(Error::InconsistentBlocks(last_problem))
}

fn try_blocks(
    a: &OperatorSubspace,
    center: &[CMat],
    tol: &Tolerances,
    rng: &mut ChaCha8Rng,
) -> std::result::Result<Vec<AlgebraBlock>, String> {
    let d = a.ambient_dim();
    let mut h = CMat::zeros(d, d);
    for z in center {
        h += hermitian_part(z).scale(rng.random_range(-1.0..1.0));
        h += anti_hermitian_part(z).scale(rng.random_range(-1.0..1.0));
    }
    let e = herm_eig(&h);
    let scale = e.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let gap = 1e-8 * scale.max(1.0);

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..d {
        match groups.last_mut() {
            Some(g) if e.values[k] - e.values[*g.last().unwrap()] <= gap => g.push(k),
            _ => groups.push(vec![k]),
        }
    }

    let basis = a.basis();
    let mut blocks = Vec::new();
    for g in groups {
        let mean = g.iter().map(|&k| e.values[k]).sum::<f64>() / g.len() as f64;
        let v = CMat::from_fn(d, g.len(), |i, j| e.vectors[(i, g[j])]);
        let p = &v * v.adjoint();
        if !a.contains(&p, tol) {
            if mean.abs() <= gap {
                // Kernel of the center element outside the algebra's unit.
                continue;
            }
            return Err("spectral projection of a central element left the algebra".into());
        }
        let rank = g.len();
        for z in center {
            let pzp = &p * z * &p;
            let lam = trace(&pzp) / c(rank as f64, 0.0);
            if (&pzp - &p * lam).norm() > tol.subspace_eps.sqrt() * z.norm().max(1.0) {
                return Err("central projection is not minimal".into());
            }
        }
        let compressed: Vec<CMat> = basis.iter().map(|b| &p * b * &p).collect();
        let block_dim = OperatorSubspace::span(d, &compressed, tol)
            .map_err(|e| e.to_string())?
            .dim();
        let dk = (block_dim as f64).sqrt().round() as usize;
        if dk == 0 || dk * dk != block_dim {
            return Err(format!("block of dimension {block_dim} is not a full matrix algebra"));
        }
        if rank % dk != 0 {
            return Err(format!("projection rank {rank} not divisible by {dk}"));
        }
        blocks.push(AlgebraBlock {
            d: dk,
            m: rank / dk,
            projector: p,
        });
    }
    let total: usize = blocks.iter().map(|b| b.d * b.d).sum();
    if total != a.dim() {
        return Err(format!("blocks account for {total} of {} dimensions", a.dim()));
    }
    Ok(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::orthonormal_basis;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn full_matrix_algebra() {
        let dims = algebra_block_dims(&OperatorSubspace::full(3), &tol()).unwrap();
        assert_eq!(dims, vec![(3, 1)]);
    }

    #[test]
    fn diagonal_algebra() {
        let set: Vec<CMat> = (0..3).map(|i| unit(3, i, i)).collect();
        let a = orthonormal_basis(&set, &tol()).unwrap();
        assert_eq!(algebra_block_dims(&a, &tol()).unwrap(), vec![(1, 1); 3]);
    }

    #[test]
    fn scalar_plus_point() {
        // C·1₂ ⊕ C inside M_3.
        let p = unit(3, 0, 0) + unit(3, 1, 1);
        let a = orthonormal_basis(&[p, unit(3, 2, 2)], &tol()).unwrap();
        assert_eq!(algebra_block_dims(&a, &tol()).unwrap(), vec![(1, 2), (1, 1)]);
    }

    #[test]
    fn tensor_with_identity_and_rotation() {
        // M_2 ⊗ 1_2 ⊕ C, then conjugated by a non-trivial unitary.
        let mut set = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                let mut x = CMat::zeros(5, 5);
                let block = kron(&unit(2, i, j), &identity(2));
                x.view_mut((0, 0), (4, 4)).copy_from(&block);
                set.push(x);
            }
        }
        set.push(unit(5, 4, 4));
        let theta = 0.3f64;
        let mut u = identity(5);
        u[(0, 0)] = c(theta.cos(), 0.0);
        u[(0, 4)] = c(-theta.sin(), 0.0);
        u[(4, 0)] = c(theta.sin(), 0.0);
        u[(4, 4)] = c(theta.cos(), 0.0);
        let rotated: Vec<CMat> = set.iter().map(|x| &u * x * u.adjoint()).collect();
        let a = orthonormal_basis(&rotated, &tol()).unwrap();
        let blocks = algebra_blocks(&a, &tol()).unwrap();
        assert_eq!(blocks.iter().map(|b| (b.d, b.m)).collect::<Vec<_>>(), vec![(2, 2), (1, 1)]);
        let total = &blocks[0].projector + &blocks[1].projector;
        assert!((total - identity(5)).norm() < 1e-8);
    }

    #[test]
    fn non_algebra_rejected() {
        let a = orthonormal_basis(&[identity(2), unit(2, 0, 1), unit(2, 1, 0)], &tol()).unwrap();
        assert_eq!(algebra_block_dims(&a, &tol()).unwrap_err(), Error::NotAnAlgebra);
    }
}
