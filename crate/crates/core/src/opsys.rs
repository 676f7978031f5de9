//! Operator systems `S_Φ = span{K_i† K_j}`, their growth under iteration,
//! zero-error tests built on them, and multiplicative domains.

use crate::channel::{Channel, ChannelKind, CpMap, StochasticMatrix};
use crate::error::{Error, Result};
use crate::linalg::*;

/// Iterations granted to a restart of the code search once it looks convergent.
const POLISH_ITERATIONS: usize = 5_000;
const POLISH_START: f64 = 1e-2;

/// `S_Φ`, with a Hermitian orthonormal basis.
pub fn op_system(ch: &Channel, tol: &Tolerances) -> Result<OperatorSubspace> {
    let k = ch.kraus();
    let products: Vec<CMat> = k
        .iter()
        .flat_map(|a| k.iter().map(move |b| a.adjoint() * b))
        .collect();
    hermitian_span(ch.dim(), &products, tol)
}

/// `span{K_i† X K_j : X ∈ S}`.
fn next_system(ch: &Channel, s: &OperatorSubspace, tol: &Tolerances) -> Result<OperatorSubspace> {
    let basis = s.basis();
    let k = ch.kraus();
    let mut products = Vec::with_capacity(k.len() * k.len() * basis.len());
    for a in k {
        let ad = a.adjoint();
        for x in &basis {
            let left = &ad * x;
            for b in k {
                products.push(&left * b);
            }
        }
    }
    hermitian_span(ch.dim(), &products, tol)
}

/// The increasing chain `S_Φ ⊆ S_{Φ²} ⊆ …` up to stabilization.
#[derive(Clone, Debug)]
pub struct ChainResult {
    /// `dim S_{Φⁿ}` for `n = 1..=N`.
    pub dims: Vec<usize>,
    /// First `n` with `S_{Φⁿ} = S_{Φⁿ⁺¹}`.
    pub n: usize,
    pub stabilized: OperatorSubspace,
    /// Every `S_{Φⁿ}`, `n = 1..=N`.
    pub systems: Vec<OperatorSubspace>,
    /// `S_{Φ²}` from the recursion agrees with `S` of the explicit square.
    pub consistent: bool,
}

impl ChainResult {
    /// `S_{Φⁿ}` for any `n ≥ 1`.
    pub fn system(&self, n: usize) -> &OperatorSubspace {
        assert!(n >= 1);
        &self.systems[(n - 1).min(self.systems.len() - 1)]
    }
}

pub fn chain(ch: &Channel, tol: &Tolerances) -> Result<ChainResult> {
    let d = ch.dim();
    let mut systems = vec![op_system(ch, tol)?];
    let mut second = None;
    loop {
        let last = systems.last().expect("non-empty");
        let next = next_system(ch, last, tol)?;
        if second.is_none() {
            second = Some(next.clone());
        }
        if next.dim() <= last.dim() || systems.len() > d * d {
            break;
        }
        systems.push(next);
    }
    let explicit = op_system(&ch.power(2)?, tol)?;
    let consistent = second.expect("at least one step").same_as(&explicit, tol);
    Ok(ChainResult {
        dims: systems.iter().map(|s| s.dim()).collect(),
        n: systems.len(),
        stabilized: systems.last().expect("non-empty").clone(),
        systems,
        consistent,
    })
}

/// Confusability graph of a classical channel: `i ~ j` iff columns `i`, `j`
/// of `A` share a positive row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusabilityGraph {
    pub n: usize,
    pub adjacency: Vec<Vec<bool>>,
}

impl ConfusabilityGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![vec![false; n]; n];
        for &(i, j) in edges {
            if i != j {
                adjacency[i][j] = true;
                adjacency[j][i] = true;
            }
        }
        ConfusabilityGraph { n, adjacency }
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        i != j && self.adjacency[i][j]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.adjacency[i][j])
            .collect()
    }

    pub fn missing_edge(&self) -> Option<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .find(|&(i, j)| !self.adjacency[i][j])
    }

    pub fn is_complete(&self) -> bool {
        self.missing_edge().is_none()
    }
}

pub fn confusability_graph(a: &StochasticMatrix) -> ConfusabilityGraph {
    let d = a.dim();
    let mut adjacency = vec![vec![false; d]; d];
    for i in 0..d {
        for j in 0..d {
            adjacency[i][j] = i != j && (0..d).any(|k| a.get(k, i) * a.get(k, j) > 0.0);
        }
    }
    ConfusabilityGraph { n: d, adjacency }
}

/// Entanglement-assisted zero-error capacity vanishes iff `S_Φ = M_d`.
pub fn c0e_is_zero(ch: &Channel, tol: &Tolerances) -> Result<bool> {
    Ok(op_system(ch, tol)?.is_full())
}

fn basis_pair(d: usize, i: usize, j: usize, residual: f64) -> Witness {
    Witness::Vectors {
        x: ket(d, i),
        y: ket(d, j),
        residual,
    }
}

/// `Tr(Φ(xx†) Φ(yy†))`.
pub fn output_overlap(ch: &Channel, x: &CVec, y: &CVec) -> f64 {
    trace(&(ch.apply(&outer(x, x)) * ch.apply(&outer(y, y)))).re
}

/// Is the one-shot zero-error classical capacity zero?
///
/// A `false` verdict carries orthogonal inputs whose outputs are orthogonal.
pub fn c_scrambling(ch: &Channel, config: &Config) -> Result<Verdict> {
    c_scrambling_with(ch, &op_system(ch, &config.tol)?, config)
}

/// [`c_scrambling`] with `S_Φ` supplied.
pub fn c_scrambling_with(ch: &Channel, s: &OperatorSubspace, config: &Config) -> Result<Verdict> {
    let d = ch.dim();
    if let Some(a) = ch.stochastic() {
        return Ok(match a.non_overlapping_columns() {
            Some((i, j)) => {
                let overlap = output_overlap(ch, &ket(d, i), &ket(d, j));
                Verdict::CertifiedFalse(basis_pair(d, i, j, overlap))
            }
            None => Verdict::CertifiedTrue(Witness::Structural(
                "every pair of columns of A shares a positive row".into(),
            )),
        });
    }
    let perp = complement(s);
    if perp.dim() == 0 {
        return Ok(Verdict::CertifiedTrue(Witness::Structural("S_Φ = M_d".into())));
    }
    Ok(rank_one_element(&perp, &config.search, &config.tol).negate())
}

/// Is the one-shot zero-error quantum capacity zero?
pub fn q_scrambling(ch: &Channel, config: &Config) -> Result<Verdict> {
    q_scrambling_with(ch, &op_system(ch, &config.tol)?, config)
}

pub fn q_scrambling_with(ch: &Channel, s: &OperatorSubspace, config: &Config) -> Result<Verdict> {
    let tol = &config.tol;
    if matches!(ch.kind(), ChannelKind::Classical(_)) {
        return Ok(Verdict::CertifiedTrue(Witness::Structural(
            "classical channels transmit no qubit without error".into(),
        )));
    }
    if ch.dim() < 2 {
        return Ok(Verdict::CertifiedTrue(Witness::Structural("dimension 1".into())));
    }
    let comm = commutant(s, tol);
    let abelian = is_abelian(&comm, tol);
    if !abelian {
        return Ok(Verdict::CertifiedFalse(Witness::Structural(
            "commutant of S_Φ is non-abelian".into(),
        )));
    }
    if is_algebra(s, tol) {
        return Ok(Verdict::CertifiedTrue(Witness::Structural(
            "S_Φ is an algebra with abelian commutant".into(),
        )));
    }
    Ok(match two_dim_code_search(s, &config.search, tol) {
        Ok((xi, eta, residual)) => Verdict::CertifiedFalse(Witness::Vectors {
            x: xi,
            y: eta,
            residual,
        }),
        Err(best) => Verdict::HeuristicTrue {
            restarts: config.search.restarts,
            best_residual: best,
        },
    })
}

/// `(Σ_B ‖V†BV − ½Tr(V†BV) 1‖²)^{1/2}` and its Euclidean gradient direction.
fn code_residual(basis: &[CMat], v: &CMat) -> (f64, CMat) {
    let mut f = 0.0;
    let mut g = CMat::zeros(v.nrows(), 2);
    for b in basis {
        let bv = b * v;
        let m = v.adjoint() * &bv;
        let m0 = &m - identity(2) * (m.trace() * 0.5);
        f += m0.norm_squared();
        g += bv * m0;
    }
    (f.sqrt(), g)
}

fn orthonormalize2(v: &CMat) -> Option<CMat> {
    let a = v.column(0).into_owned();
    let na = a.norm();
    if na < 1e-12 {
        return None;
    }
    let a = a / c(na, 0.0);
    let b = v.column(1).into_owned();
    let b = &b - &a * a.dotc(&b);
    let nb = b.norm();
    if nb < 1e-12 {
        return None;
    }
    let b = b / c(nb, 0.0);
    let mut out = CMat::zeros(v.nrows(), 2);
    out.set_column(0, &a);
    out.set_column(1, &b);
    Some(out)
}

/// Searches for orthonormal `ξ, η` spanning a Knill–Laflamme code for `S`,
/// i.e. `⟨ξ|X|η⟩ = 0` and `⟨ξ|X|ξ⟩ = ⟨η|X|η⟩` for all `X ∈ S`, by gradient
/// descent on the Stiefel manifold. Returns the best residual on failure.
fn two_dim_code_search(
    s: &OperatorSubspace,
    budget: &SearchBudget,
    tol: &Tolerances,
) -> std::result::Result<(CVec, CVec, f64), f64> {
    let d = s.ambient_dim();
    let basis = s.basis();
    let mut best = f64::INFINITY;
    for restart in 0..budget.restarts {
        let mut rng = restart_rng(budget.seed ^ 0xc0de, restart);
        let init = CMat::from_fn(d, 2, |_, _| ZERO);
        let mut v = init;
        v.set_column(0, &random_unit_vector(d, &mut rng));
        v.set_column(1, &random_unit_vector(d, &mut rng));
        let Some(mut v) = orthonormalize2(&v) else {
            continue;
        };
        let (mut r, mut g) = code_residual(&basis, &v);
        let mut step = 0.5;
        let mut limit = budget.iterations;
        let mut it = 0;
        while it < limit && r > tol.subspace_eps {
            let vg = v.adjoint() * &g;
            let tangent = &g - &v * hermitian_part(&vg);
            let mut accepted = false;
            for _ in 0..40 {
                let trial = &v - &tangent * c(step, 0.0);
                if let Some(t) = orthonormalize2(&trial) {
                    let (rt, gt) = code_residual(&basis, &t);
                    if rt < r {
                        (v, r, g) = (t, rt, gt);
                        accepted = true;
                        step *= 2.0;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            if r < POLISH_START && limit == budget.iterations {
                limit += POLISH_ITERATIONS;
            }
            it += 1;
        }
        let (r, _) = code_residual(&basis, &v);
        if r <= tol.subspace_eps {
            return Ok((v.column(0).into_owned(), v.column(1).into_owned(), r));
        }
        best = best.min(r);
    }
    Err(best)
}

/// Does `Φ` map every state to a full-rank state?
///
/// A `false` verdict carries unit `φ, ψ` with `⟨φ|K_i|ψ⟩ = 0` for all `i`.
pub fn strictly_positive(ch: &Channel, config: &Config) -> Result<Verdict> {
    let d = ch.dim();
    if let Some(a) = ch.stochastic() {
        return Ok(match a.zero_entry() {
            Some((i, j)) => {
                let leak = ch.apply(&unit(d, j, j))[(i, i)].re;
                Verdict::CertifiedFalse(basis_pair(d, i, j, leak))
            }
            None => Verdict::CertifiedTrue(Witness::Structural("A is entrywise positive".into())),
        });
    }
    let span = OperatorSubspace::span(d, ch.kraus(), &config.tol)?;
    strictly_positive_span(&span, config)
}

/// Strict positivity decided from `span{K_i}` alone.
pub fn strictly_positive_span(span: &OperatorSubspace, config: &Config) -> Result<Verdict> {
    let perp = complement(span);
    if perp.dim() == 0 {
        return Ok(Verdict::CertifiedTrue(Witness::Structural("span{K_i} = M_d".into())));
    }
    Ok(rank_one_element(&perp, &config.search, &config.tol).negate())
}

fn require_unital(ch: &Channel, tol: &Tolerances) -> Result<()> {
    let defect = ch.unitality_defect();
    if !ch.is_square() || defect > tol.subspace_eps {
        return Err(Error::NotUnital(defect));
    }
    Ok(())
}

/// Multiplicative domain of a unital channel, with the commutant cross-check.
#[derive(Clone, Debug)]
pub struct MultDomain {
    pub space: OperatorSubspace,
    /// Agrees with the commutant of `S_Φ`.
    pub matches_commutant: bool,
}

/// `M_Φ = Fix(Φ* ∘ Φ)` for unital `Φ`.
pub fn mult_domain(ch: &Channel, tol: &Tolerances) -> Result<MultDomain> {
    require_unital(ch, tol)?;
    mult_domain_unchecked(ch, tol)
}

fn mult_domain_unchecked(ch: &Channel, tol: &Tolerances) -> Result<MultDomain> {
    let d = ch.dim();
    let k = ch.kraus();
    let composed = CpMap::new(
        d,
        d,
        k.iter()
            .flat_map(|a| k.iter().map(move |b| a.adjoint() * b))
            .collect(),
    );
    let t = composed.transfer_matrix();
    // Φ*∘Φ is positive semidefinite on Hilbert–Schmidt space with spectrum in [0, 1].
    let e = herm_eig(&hermitian_part(&t));
    let cut = tol.null_eps();
    let keep: Vec<usize> = (0..e.values.len()).filter(|&i| (e.values[i] - 1.0).abs() <= cut).collect();
    let mats: Vec<CMat> = keep
        .iter()
        .map(|&i| unvectorize(e.vectors.column(i).as_slice(), d))
        .collect();
    let space = if mats.is_empty() {
        OperatorSubspace::zero(d)
    } else {
        OperatorSubspace::span(d, &mats, tol)?
    };
    let comm = commutant(&op_system(ch, tol)?, tol);
    Ok(MultDomain {
        matches_commutant: comm.same_as(&space, tol),
        space,
    })
}

/// `dim M_{Φⁿ}` for `n = 1, 2, …` until two consecutive values agree; the
/// repeated value is not listed twice.
pub fn mult_domain_chain(ch: &Channel, tol: &Tolerances) -> Result<Vec<usize>> {
    require_unital(ch, tol)?;
    let d = ch.dim();
    let mut dims = Vec::new();
    let mut power = ch.clone();
    for _ in 0..=d * d {
        let m = mult_domain_unchecked(&power, tol)?.space.dim();
        if dims.last() == Some(&m) {
            break;
        }
        dims.push(m);
        power = power.compose(ch)?;
    }
    Ok(dims)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn m3() -> Channel {
        let s = 0.5f64.sqrt();
        let k1 = real_matrix(3, 3, &[0.0, 0.0, s, 0.0, 0.0, s, 0.0, 0.0, 0.0]);
        let k2 = real_matrix(3, 3, &[s, 0.0, 0.0, -s, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let k3 = real_matrix(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        Channel::from_kraus(vec![k1, k2, k3]).unwrap()
    }

    fn a3() -> StochasticMatrix {
        StochasticMatrix::from_rows(&[
            vec![0.0, 0.5, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.5, 0.0],
        ])
        .unwrap()
    }

    fn rotation(theta: f64) -> CMat {
        real_matrix(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()])
    }

    #[test]
    fn operator_systems() {
        let u = Channel::unitary(&rotation(0.3)).unwrap();
        assert_eq!(op_system(&u, &tol()).unwrap().dim(), 1);
        assert_eq!(op_system(&Channel::depolarizing(3), &tol()).unwrap().dim(), 9);
        let s = op_system(&m3(), &tol()).unwrap();
        assert_eq!(s.dim(), 3);
        for i in 0..3 {
            assert!(s.contains(&unit(3, i, i), &tol()));
        }
        assert!(s.contains_identity(&tol()) && s.is_self_adjoint(&tol()));
        assert_eq!(complement(&s).dim(), 6);
    }

    #[test]
    fn chains() {
        let c = chain(&m3(), &tol()).unwrap();
        assert_eq!(c.dims, vec![3, 5, 9]);
        assert_eq!(c.n, 3);
        assert!(c.consistent);
        let u = chain(&Channel::unitary(&rotation(0.3)).unwrap(), &tol()).unwrap();
        assert_eq!((u.dims.clone(), u.n), (vec![1], 1));
        let dep = chain(&Channel::depolarizing(2), &tol()).unwrap();
        assert_eq!((dep.dims.clone(), dep.n), (vec![4], 1));
    }

    #[test]
    fn commutant_of_second_system() {
        let c = chain(&m3(), &tol()).unwrap();
        assert_eq!(commutant(c.system(2), &tol()).dim(), 2);
    }

    #[test]
    fn graphs() {
        let id = StochasticMatrix::new(RMat::identity(3, 3)).unwrap();
        assert!(confusability_graph(&id).edges().is_empty());
        let pos = StochasticMatrix::new(RMat::from_element(3, 3, 1.0 / 3.0)).unwrap();
        assert!(confusability_graph(&pos).is_complete());
        // Columns of A_3: {2}, {0,2}, {1}.
        assert_eq!(confusability_graph(&a3()).edges(), vec![(0, 1)]);
    }

    #[test]
    fn entanglement_assisted_zero_test() {
        assert!(c0e_is_zero(&Channel::depolarizing(2), &tol()).unwrap());
        assert!(!c0e_is_zero(&Channel::unitary(&rotation(0.2)).unwrap(), &tol()).unwrap());
        let cube = Channel::classical(a3()).unwrap().power(3).unwrap();
        assert!(c0e_is_zero(&cube.as_generic(), &tol()).unwrap());
        let square = Channel::classical(a3()).unwrap().power(2).unwrap();
        assert!(!c0e_is_zero(&square.as_generic(), &tol()).unwrap());
    }

    #[test]
    fn scrambling_verdicts() {
        let cfg = Config::default();
        let dep = c_scrambling(&Channel::depolarizing(3), &cfg).unwrap();
        assert!(dep.is_certified() && dep.value());
        let a = StochasticMatrix::from_rows(&[
            vec![0.5, 0.5, 0.0, 0.0],
            vec![0.0, 0.5, 0.5, 0.0],
            vec![0.0, 0.0, 0.5, 0.5],
            vec![0.5, 0.0, 0.0, 0.5],
        ])
        .unwrap();
        let ch = Channel::classical(a).unwrap();
        for v in [c_scrambling(&ch, &cfg).unwrap(), c_scrambling(&ch.as_generic(), &cfg).unwrap()] {
            assert!(v.is_certified() && !v.value());
            let (x, y) = v.vectors().unwrap();
            assert!(output_overlap(&ch, x, y).abs() <= 1e-10);
        }
    }

    #[test]
    fn quantum_scrambling_verdicts() {
        let cfg = Config::default();
        let m = q_scrambling(&m3(), &cfg).unwrap();
        assert!(m.is_certified() && m.value());
        let id = q_scrambling(&Channel::identity(2), &cfg).unwrap();
        assert!(id.is_certified() && !id.value());
        let cl = q_scrambling(&Channel::classical(a3()).unwrap(), &cfg).unwrap();
        assert!(cl.is_certified() && cl.value());
    }

    #[test]
    fn code_search_finds_planted_code() {
        // Any orthonormal pair inside span{e1, e2} is a code for span{1, E_33}.
        let s = hermitian_span(3, &[identity(3), unit(3, 2, 2)], &tol()).unwrap();
        let (xi, eta, r) = two_dim_code_search(&s, &SearchBudget::default(), &tol()).unwrap();
        assert!(r <= 1e-8);
        assert!(xi.dotc(&eta).norm() < 1e-8);
    }

    #[test]
    fn strict_positivity() {
        let cfg = Config::default();
        let dep = strictly_positive(&Channel::depolarizing(2), &cfg).unwrap();
        assert!(dep.is_certified() && dep.value());
        let id = strictly_positive(&Channel::identity(2), &cfg).unwrap();
        assert!(id.is_certified() && !id.value());
        let scr = StochasticMatrix::from_rows(&[
            vec![1.0, 0.0, 1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 1.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0, 1.0, 0.0],
            vec![1.0, 1.0, 0.0, 1.0, 1.0],
        ]
        .iter()
        .map(|r| r.iter().map(|x| x / 3.0).collect())
        .collect::<Vec<_>>())
        .unwrap();
        let sq = Channel::classical(scr).unwrap().power(2).unwrap();
        let v = strictly_positive(&sq, &cfg).unwrap();
        assert!(v.is_certified() && !v.value());
        let g = strictly_positive(&sq.as_generic(), &cfg).unwrap();
        assert!(g.is_certified() && !g.value());
    }

    #[test]
    fn multiplicative_domains() {
        assert_eq!(mult_domain_chain(&m3(), &tol()).unwrap(), vec![3, 2, 1]);
        let md = mult_domain(&m3(), &tol()).unwrap();
        assert!(md.matches_commutant);
        let u = Channel::unitary(&rotation(0.4)).unwrap();
        assert_eq!(mult_domain_chain(&u, &tol()).unwrap(), vec![4]);
        assert_eq!(mult_domain_chain(&Channel::depolarizing(3), &tol()).unwrap(), vec![1]);
        let rho = real_matrix(2, 2, &[0.7, 0.0, 0.0, 0.3]);
        let err = mult_domain(&Channel::replacement(&rho).unwrap(), &tol()).unwrap_err();
        assert!(matches!(err, Error::NotUnital(_)));
    }
}
