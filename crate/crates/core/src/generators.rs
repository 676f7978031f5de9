//! Example channels and random ensembles.
//!
//! All random constructions take a caller-owned RNG so that a fixed seed
//! reproduces the same channel bit for bit.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::{Channel, CducParams, DucParams, StochasticMatrix};
use crate::error::Result;
use crate::linalg::*;

/// `A_d`: the column-stochastic matrix with extremal scrambling and
/// Wielandt indices. Column 0 goes to state `d−1`, column 1 splits evenly
/// between states 0 and `d−1`, and column `j ≥ 2` goes to state `j−1`.
pub fn a_d(d: usize) -> StochasticMatrix {
    assert!(d >= 3, "A_d needs d ≥ 3");
    let mut a = RMat::zeros(d, d);
    a[(0, 1)] = 0.5;
    a[(d - 1, 1)] = 0.5;
    a[(d - 1, 0)] = 1.0;
    for j in 2..d {
        a[(j - 1, j)] = 1.0;
    }
    StochasticMatrix::new(a).expect("A_d is stochastic")
}

pub fn a_d_channel(d: usize) -> Channel {
    Channel::classical(a_d(d)).expect("valid classical channel")
}

/// Kraus operators of the primitive unital qutrit channel whose operator
/// systems grow through the diagonal algebra, `M_2 ⊕ M_1`, and `M_3`.
pub fn m3_kraus() -> Vec<CMat> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        real_matrix(3, 3, &[0.0, 0.0, h, 0.0, 0.0, h, 0.0, 0.0, 0.0]),
        real_matrix(3, 3, &[h, 0.0, 0.0, -h, 0.0, 0.0, 0.0, 0.0, 0.0]),
        real_matrix(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
    ]
}

pub fn m3() -> Channel {
    Channel::from_kraus(m3_kraus()).expect("valid channel")
}

/// Stochastic matrix of the fully irreducible but non-scrambling unital
/// channel on `M_4`: `Φ(X)_kk = (X_kk + X_{k+1,k+1})/2`, indices mod 4.
pub fn firr4_matrix() -> StochasticMatrix {
    StochasticMatrix::from_rows(&[
        vec![0.5, 0.5, 0.0, 0.0],
        vec![0.0, 0.5, 0.5, 0.0],
        vec![0.0, 0.0, 0.5, 0.5],
        vec![0.5, 0.0, 0.0, 0.5],
    ])
    .expect("doubly stochastic")
}

pub fn firr4() -> Channel {
    Channel::classical(firr4_matrix()).expect("valid classical channel")
}

/// The 5×5 scrambling matrix whose square has a zero entry, as printed:
/// its rows, not its columns, sum to one.
pub fn scr5_printed_rows() -> Vec<Vec<f64>> {
    let t = 1.0 / 3.0;
    vec![
        vec![t, t, 0.0, 0.0, t],
        vec![0.0, t, t, 0.0, t],
        vec![t, 0.0, t, t, 0.0],
        vec![0.0, t, 0.0, t, t],
        vec![t, 0.0, t, 0.0, t],
    ]
}

/// Column-stochastic form (the transpose) of [`scr5_printed_rows`].
pub fn scr5_matrix() -> StochasticMatrix {
    let rows = scr5_printed_rows();
    let d = rows.len();
    StochasticMatrix::new(RMat::from_fn(d, d, |i, j| rows[j][i])).expect("transpose is stochastic")
}

pub fn scr5() -> Channel {
    Channel::classical(scr5_matrix()).expect("valid classical channel")
}

/// Cyclic shift `j → j + 1 mod d`.
pub fn cycle_matrix(d: usize) -> StochasticMatrix {
    StochasticMatrix::new(RMat::from_fn(d, d, |i, j| if i == (j + 1) % d { 1.0 } else { 0.0 }))
        .expect("permutation matrix")
}

pub fn cycle(d: usize) -> Channel {
    Channel::classical(cycle_matrix(d)).expect("valid classical channel")
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    c(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Orthonormalizes columns by twice-iterated Gram–Schmidt.
fn orthonormal_columns(mut m: CMat) -> CMat {
    for j in 0..m.ncols() {
        for _ in 0..2 {
            for k in 0..j {
                let proj = m.column(k).dotc(&m.column(j));
                let ck = m.column(k).into_owned();
                let mut cj = m.column_mut(j);
                cj -= ck * proj;
            }
        }
        let n = m.column(j).norm();
        m.column_mut(j).unscale_mut(n);
    }
    m
}

/// Haar-random unitary.
pub fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> CMat {
    orthonormal_columns(ginibre(d, d, rng))
}

/// Random isometry `C^cols → C^rows`.
pub fn random_isometry(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMat {
    orthonormal_columns(ginibre(rows, cols, rng))
}

/// Random density matrix of full rank from the Hilbert–Schmidt ensemble.
pub fn random_state(d: usize, rng: &mut ChaCha8Rng) -> CMat {
    let g = ginibre(d, d, rng);
    let rho = &g * g.adjoint();
    let t = trace(&rho);
    hermitian_part(&(rho / t))
}

/// Kraus operators of a random channel from a Haar-random Stinespring isometry.
pub fn random_kraus(d_in: usize, d_out: usize, rank: usize, rng: &mut ChaCha8Rng) -> Vec<CMat> {
    let v = random_isometry(d_out * rank, d_in, rng);
    (0..rank).map(|k| v.rows(k * d_out, d_out).into_owned()).collect()
}

pub fn random_channel(d: usize, rank: usize, rng: &mut ChaCha8Rng) -> Result<Channel> {
    Channel::from_kraus(random_kraus(d, d, rank, rng))
}

/// Random mixture of `n` Haar unitaries: a unital channel.
pub fn random_unital(d: usize, n: usize, rng: &mut ChaCha8Rng) -> Result<Channel> {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = w.iter().sum();
    let kraus = w
        .iter()
        .map(|&p| random_unitary(d, rng) * c((p / total).sqrt(), 0.0))
        .collect();
    Channel::from_kraus(kraus)
}

/// `X ↦ Tr(X) ρ` as Kraus operators `√λ_a |e_a⟩⟨b|` on `C^m`.
fn replacement_kraus(rho: &CMat) -> Vec<CMat> {
    let m = rho.nrows();
    let e = herm_eig(rho);
    let mut out = Vec::new();
    for a in 0..m {
        let lam = e.values[a].max(0.0);
        if lam <= 0.0 {
            continue;
        }
        let col = e.vectors.column(a).into_owned() * c(lam.sqrt(), 0.0);
        for b in 0..m {
            out.push(&col * ket(m, b).adjoint());
        }
    }
    out
}

/// One planted peripheral block `M_{d_k} ⊗ ρ_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSpec {
    pub d: usize,
    pub m: usize,
}

/// A channel with known peripheral structure and its plant.
#[derive(Clone, Debug)]
pub struct Planted {
    pub channel: Channel,
    pub blocks: Vec<BlockSpec>,
    pub transient: usize,
}

/// `⊕_k (U_k ⊗ 1)(Tr_2 X_k ⊗ ρ_k)(U_k ⊗ 1)†` on the block part, with a
/// transient subspace emptied into random block states in one step; the
/// whole channel is conjugated by a Haar unitary.
pub fn planted_blocks(blocks: &[BlockSpec], transient: usize, rng: &mut ChaCha8Rng) -> Result<Planted> {
    let sizes: Vec<usize> = blocks.iter().map(|b| b.d * b.m).collect();
    let dim_blocks: usize = sizes.iter().sum();
    let dim = dim_blocks + transient;
    let mut kraus = Vec::new();
    let mut offset = 0;
    for (b, &size) in blocks.iter().zip(&sizes) {
        let u = random_unitary(b.d, rng);
        let rho = random_state(b.m, rng);
        for r in replacement_kraus(&rho) {
            let local = u.kronecker(&r);
            let mut k = CMat::zeros(dim, dim);
            k.view_mut((offset, offset), (size, size)).copy_from(&local);
            kraus.push(k);
        }
        offset += size;
    }
    for t in 0..transient {
        let target = random_isometry(dim_blocks, 1, rng);
        let mut k = CMat::zeros(dim, dim);
        for i in 0..dim_blocks {
            k[(i, dim_blocks + t)] = target[(i, 0)];
        }
        kraus.push(k);
    }
    let w = random_unitary(dim, rng);
    let kraus = kraus.iter().map(|k| &w * k * w.adjoint()).collect();
    Ok(Planted {
        channel: Channel::from_kraus(kraus)?,
        blocks: blocks.to_vec(),
        transient,
    })
}

/// Random plant: 1–3 blocks with `d_k ∈ {1,2,3}`, `m_k ∈ {1,2}`, at most
/// `max_dim` in total, plus up to two transient dimensions.
pub fn random_planted(max_dim: usize, rng: &mut ChaCha8Rng) -> Result<Planted> {
    loop {
        let count = rng.random_range(1..=3);
        let blocks: Vec<BlockSpec> = (0..count)
            .map(|_| BlockSpec {
                d: rng.random_range(1..=3),
                m: rng.random_range(1..=2),
            })
            .collect();
        let transient = rng.random_range(0..=2);
        let dim: usize = blocks.iter().map(|b| b.d * b.m).sum::<usize>() + transient;
        if dim <= max_dim && dim >= 2 {
            return planted_blocks(&blocks, transient, rng);
        }
    }
}

/// Ergodic channel of period `q`: `q` cyclic classes of dimension `s`, each
/// mapped onto a fixed full-rank state of the next, plus `transient` decaying
/// dimensions, conjugated by a Haar unitary.
///
/// Returns the channel and the projections onto the classes, labelled so
/// that class `m` is sent to class `m + 1`.
pub fn periodic_ergodic(
    q: usize,
    s: usize,
    transient: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Channel, Vec<CMat>)> {
    let core = q * s;
    let dim = core + transient;
    let mut kraus = Vec::new();
    for m in 0..q {
        let next = (m + 1) % q;
        let rho = random_state(s, rng);
        for r in replacement_kraus(&rho) {
            let mut k = CMat::zeros(dim, dim);
            k.view_mut((next * s, m * s), (s, s)).copy_from(&r);
            kraus.push(k);
        }
    }
    for t in 0..transient {
        let target = random_isometry(core, 1, rng);
        let mut k = CMat::zeros(dim, dim);
        for i in 0..core {
            k[(i, core + t)] = target[(i, 0)];
        }
        kraus.push(k);
    }
    let w = random_unitary(dim, rng);
    let kraus = kraus.iter().map(|k| &w * k * w.adjoint()).collect();
    let projections = (0..q)
        .map(|m| {
            let mut p = CMat::zeros(dim, dim);
            for i in 0..s {
                p[(m * s + i, m * s + i)] = ONE;
            }
            &w * p * w.adjoint()
        })
        .collect();
    Ok((Channel::from_kraus(kraus)?, projections))
}

/// Direct sum `⊕_k Φ_k` of random channels on blocks of the given sizes,
/// conjugated by a Haar unitary; its fixed space has dimension `sizes.len()`.
pub fn random_direct_sum(sizes: &[usize], rng: &mut ChaCha8Rng) -> Result<Channel> {
    let dim: usize = sizes.iter().sum();
    let mut kraus = Vec::new();
    let mut offset = 0;
    for &s in sizes {
        let rank = if s == 1 { 1 } else { rng.random_range(2..=s * s) };
        for k in random_kraus(s, s, rank, rng) {
            let mut big = CMat::zeros(dim, dim);
            big.view_mut((offset, offset), (s, s)).copy_from(&k);
            kraus.push(big);
        }
        offset += s;
    }
    let w = random_unitary(dim, rng);
    Channel::from_kraus(kraus.iter().map(|k| &w * k * w.adjoint()).collect())
}

/// Random column-stochastic matrix in which each entry is zero with
/// probability `sparsity` (every column keeps at least one positive entry).
pub fn random_stochastic(d: usize, sparsity: f64, rng: &mut ChaCha8Rng) -> StochasticMatrix {
    let mut a = RMat::zeros(d, d);
    for j in 0..d {
        for i in 0..d {
            if rng.random::<f64>() >= sparsity {
                a[(i, j)] = rng.random_range(0.05..1.0);
            }
        }
        if a.column(j).sum() == 0.0 {
            a[(rng.random_range(0..d), j)] = 1.0;
        }
        let s = a.column(j).sum();
        a.column_mut(j).unscale_mut(s);
    }
    StochasticMatrix::new(a).expect("normalized columns")
}

/// Random valid `(A, B)`: `B = D^{1/2} G D^{1/2}` with `D = diag(A)` and `G`
/// a shrunken correlation matrix, so `B ⪰ 0` and `B_ii = A_ii`.
pub fn random_cduc_params(d: usize, sparsity: f64, rng: &mut ChaCha8Rng) -> CducParams {
    let a = random_stochastic(d, sparsity, rng);
    let v = ginibre(d, d, rng);
    let mut g = &v * v.adjoint();
    let diag: Vec<f64> = (0..d).map(|i| g[(i, i)].re.sqrt()).collect();
    let shrink = rng.random_range(0.0..1.0);
    for i in 0..d {
        for j in 0..d {
            g[(i, j)] = if i == j {
                ONE
            } else {
                g[(i, j)] * (shrink / (diag[i] * diag[j]))
            };
        }
    }
    let b = CMat::from_fn(d, d, |i, j| g[(i, j)] * (a.get(i, i) * a.get(j, j)).sqrt());
    CducParams::new(a, b).expect("positive semidefinite by construction")
}

/// Random valid `(A, C)` with `|C_ij|² ≤ A_ij A_ji` and `C` Hermitian.
pub fn random_duc_params(d: usize, sparsity: f64, rng: &mut ChaCha8Rng) -> DucParams {
    let a = random_stochastic(d, sparsity, rng);
    let mut cm = CMat::zeros(d, d);
    for i in 0..d {
        cm[(i, i)] = c(a.get(i, i), 0.0);
        for j in i + 1..d {
            let bound = (a.get(i, j) * a.get(j, i)).sqrt();
            let r = rng.random_range(0.0..1.0) * bound;
            let z = C64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU));
            cm[(i, j)] = z;
            cm[(j, i)] = z.conj();
        }
    }
    DucParams::new(a, cm).expect("entrywise bound holds by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn a3_matches_definition() {
        let a = a_d(3);
        assert_eq!(
            a.rows(),
            vec![vec![0.0, 0.5, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.5, 0.0]]
        );
    }

    #[test]
    fn scr5_printed_is_row_stochastic() {
        let rows = scr5_printed_rows();
        assert!(rows.iter().all(|r| (r.iter().sum::<f64>() - 1.0).abs() < 1e-15));
        assert!(StochasticMatrix::from_rows(&rows).is_err());
        let a = scr5_matrix();
        assert!(a.is_scrambling());
        assert!(!a.product(&a).is_strictly_positive());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(4, &mut rng);
        assert!((u.adjoint() * &u - identity(4)).norm() < 1e-12);
    }

    #[test]
    fn generators_are_deterministic() {
        let a = random_kraus(3, 3, 4, &mut ChaCha8Rng::seed_from_u64(7));
        let b = random_kraus(3, 3, 4, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
    }

    #[test]
    fn periodic_projections_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (ch, p) = periodic_ergodic(3, 2, 1, &mut rng).unwrap();
        for m in 0..3 {
            let out = ch.apply(&p[m]);
            let next = &p[(m + 1) % 3];
            assert!((next * &out * next - &out).norm() < 1e-10);
        }
    }

    #[test]
    fn random_structured_params_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            Channel::cduc(random_cduc_params(3, 0.3, &mut rng)).unwrap();
            Channel::duc(random_duc_params(3, 0.3, &mut rng)).unwrap();
        }
    }
}
