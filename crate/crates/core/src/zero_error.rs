//! Zero-error capacities: exact values where the structure allows it,
//! certified bounds elsewhere, and explicit codes that can be re-verified.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::channel::{Channel, ChannelKind};
use crate::error::{Error, Result};
use crate::linalg::*;
use crate::opsys::{c_scrambling_with, confusability_graph, op_system, q_scrambling_with, ConfusabilityGraph};
use crate::spectral::{peripheral_structure, PeripheralStructure};

/// Largest graph handed to the exact independent-set search.
pub const MAX_EXACT_VERTICES: usize = 24;
pub const DEFAULT_SEARCH_TIME: Duration = Duration::from_secs(10);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependentSet {
    pub size: usize,
    pub vertices: Vec<usize>,
    /// The search finished, so `size` is the independence number.
    pub exact: bool,
}

/// Independence number of a confusability graph by branch and bound.
pub fn independence_number_graphical(g: &ConfusabilityGraph) -> Result<IndependentSet> {
    independence_number_within(g, DEFAULT_SEARCH_TIME)
}

/// As [`independence_number_graphical`] with an explicit time budget; when
/// the budget runs out the best set found so far is returned, not exact.
pub fn independence_number_within(g: &ConfusabilityGraph, budget: Duration) -> Result<IndependentSet> {
    let n = g.n;
    if n > MAX_EXACT_VERTICES {
        return Err(Error::TooLarge(n));
    }
    // Maximum clique in the complement graph.
    let comp: Vec<u32> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && !g.adjacent(i, j))
                .fold(0u32, |m, j| m | (1 << j))
        })
        .collect();
    let greedy = greedy_independent(g);
    let mut search = CliqueSearch {
        adj: &comp,
        best: greedy.iter().fold(0u32, |m, &v| m | (1 << v)),
        deadline: Instant::now() + budget,
        timed_out: false,
    };
    let all = if n == 0 { 0 } else { (u32::MAX) >> (32 - n) };
    search.expand(0, all);
    let vertices: Vec<usize> = (0..n).filter(|&v| search.best & (1 << v) != 0).collect();
    Ok(IndependentSet {
        size: vertices.len(),
        vertices,
        exact: !search.timed_out,
    })
}

struct CliqueSearch<'a> {
    adj: &'a [u32],
    best: u32,
    deadline: Instant,
    timed_out: bool,
}

impl CliqueSearch<'_> {
    fn expand(&mut self, clique: u32, mut cands: u32) {
        if self.timed_out || Instant::now() > self.deadline {
            self.timed_out = true;
            return;
        }
        // Greedy colouring of the candidates bounds the clique size reachable from each.
        let mut order = Vec::new();
        let mut colors = Vec::new();
        let mut uncolored = cands;
        let mut color = 0;
        while uncolored != 0 {
            color += 1;
            let mut avail = uncolored;
            while avail != 0 {
                let v = avail.trailing_zeros() as usize;
                avail &= !(1 << v);
                avail &= !self.adj[v];
                uncolored &= !(1 << v);
                order.push(v);
                colors.push(color);
            }
        }
        let size = clique.count_ones();
        for idx in (0..order.len()).rev() {
            if size + colors[idx] <= self.best.count_ones() {
                return;
            }
            let v = order[idx];
            let next = clique | (1 << v);
            let next_cands = cands & self.adj[v];
            if next_cands == 0 {
                if next.count_ones() > self.best.count_ones() {
                    self.best = next;
                }
            } else {
                self.expand(next, next_cands);
            }
            cands &= !(1 << v);
        }
    }
}

/// Minimum-degree greedy independent set.
fn greedy_independent(g: &ConfusabilityGraph) -> Vec<usize> {
    let n = g.n;
    let mut alive: Vec<bool> = vec![true; n];
    let mut out = Vec::new();
    loop {
        let pick = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (0..n).filter(|&u| u != v && alive[u] && g.adjacent(u, v)).count());
        let Some(v) = pick else {
            break;
        };
        out.push(v);
        alive[v] = false;
        for u in 0..n {
            if g.adjacent(u, v) {
                alive[u] = false;
            }
        }
    }
    out.sort_unstable();
    out
}

/// A closed interval of capacities in bits (or qubits).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub exact: bool,
}

impl Interval {
    fn new(lo: f64, hi: f64) -> Self {
        let hi = hi.max(lo);
        Interval {
            lo,
            hi,
            exact: (hi - lo).abs() < 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityBounds {
    /// One-shot zero-error classical capacity.
    pub c0: Interval,
    /// One-shot zero-error quantum capacity.
    pub q0: Interval,
    /// The entanglement-assisted zero-error capacity vanishes.
    pub c0e_zero: bool,
}

/// States whose outputs stay pairwise orthogonal under `Φⁿ`, `n ≤ horizon`.
#[derive(Clone, Debug)]
pub struct ZeroErrorCode {
    pub states: Vec<CMat>,
    pub horizon: usize,
}

/// States `|i⟩⟨i| ⊗ ρ_k`, one per minimal projection of each peripheral block.
pub fn peripheral_code(ch: &Channel, tol: &Tolerances) -> Result<ZeroErrorCode> {
    let ps = peripheral_structure(ch, tol)?;
    Ok(peripheral_code_of(&ps))
}

pub fn peripheral_code_of(ps: &PeripheralStructure) -> ZeroErrorCode {
    let rho = &ps.max_fixed_state;
    let states = ps
        .minimal_ranges
        .iter()
        .flatten()
        .map(|w| {
            let local = w.adjoint() * rho * w;
            let local = hermitian_part(&(&local / trace(&local)));
            hermitian_part(&(w * local * w.adjoint()))
        })
        .collect();
    ZeroErrorCode {
        states,
        horizon: 3 * ps.permutation_order().max(1),
    }
}

/// Largest pairwise overlap `Tr(Φⁿ(ρ_a) Φⁿ(ρ_b))` over `n = 1..=horizon`,
/// `a ≠ b`.
pub fn worst_code_overlap(ch: &Channel, code: &[CMat], horizon: usize) -> Result<f64> {
    let d = ch.dim();
    for s in code {
        if s.shape() != (d, d) {
            return Err(Error::ShapeMismatch(format!("code state must be {d}x{d}")));
        }
        check_finite(s, "code state")?;
    }
    let mut current: Vec<CMat> = code.to_vec();
    let mut worst: f64 = 0.0;
    for _ in 0..horizon {
        current = current.iter().map(|s| ch.apply(s)).collect();
        for a in 0..current.len() {
            for b in a + 1..current.len() {
                worst = worst.max(trace(&(&current[a] * &current[b])).re.abs());
            }
        }
    }
    Ok(worst)
}

/// Are the outputs of the code states pairwise orthogonal for `n = 1..=horizon`?
pub fn verify_zero_error_code(ch: &Channel, code: &[CMat], horizon: usize, tol: &Tolerances) -> Result<bool> {
    Ok(worst_code_overlap(ch, code, horizon)? <= tol.subspace_eps)
}

/// Knill–Laflamme test for the subspace spanned by orthonormal columns of `v`.
#[derive(Clone, Debug)]
pub struct Correctability {
    pub correctable: bool,
    /// `λ_ij` with `P K_i† K_j P ≈ λ_ij P`.
    pub lambda: CMat,
    pub residual: f64,
}

pub fn is_correctable_subspace(ch: &Channel, v: &CMat, tol: &Tolerances) -> Result<Correctability> {
    let d = ch.dim();
    if v.nrows() != d || v.ncols() == 0 {
        return Err(Error::ShapeMismatch(format!("basis must be {d} x k with k ≥ 1")));
    }
    let k = v.ncols();
    let gram_defect = (v.adjoint() * v - identity(k)).norm();
    if gram_defect > tol.subspace_eps {
        return Err(Error::InvalidParams(format!(
            "basis is not orthonormal (deviation {gram_defect:.3e})"
        )));
    }
    let kraus = ch.kraus();
    let p = kraus.len();
    let kv: Vec<CMat> = kraus.iter().map(|a| a * v).collect();
    let mut lambda = CMat::zeros(p, p);
    let mut residual: f64 = 0.0;
    for i in 0..p {
        for j in 0..p {
            let m = kv[i].adjoint() * &kv[j];
            let l = m.trace() / c(k as f64, 0.0);
            lambda[(i, j)] = l;
            residual = residual.max((m - identity(k) * l).norm());
        }
    }
    Ok(Correctability {
        correctable: residual <= tol.subspace_eps,
        lambda,
        residual,
    })
}

/// Largest set of columns `u_i` of the unitary `u` with every `u_i u_j†`
/// (`i ≠ j`) orthogonal to `S`: such inputs have orthogonal outputs.
fn basis_code(s: &OperatorSubspace, u: &CMat, tol: &Tolerances) -> Vec<CVec> {
    let d = u.nrows();
    let cols: Vec<CVec> = (0..d).map(|i| u.column(i).into_owned()).collect();
    let mut edges = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let x = outer(&cols[i], &cols[j]);
            if s.project(&x).norm() > tol.subspace_eps {
                edges.push((i, j));
            }
        }
    }
    let g = ConfusabilityGraph::from_edges(d, &edges);
    let set = if d <= MAX_EXACT_VERTICES {
        independence_number_within(&g, Duration::from_secs(1))
            .map(|s| s.vertices)
            .unwrap_or_default()
    } else {
        greedy_independent(&g)
    };
    set.into_iter().map(|i| cols[i].clone()).collect()
}

/// Certified bounds on the one-shot zero-error classical capacity.
pub fn c0_bounds(ch: &Channel, config: &Config) -> Result<Interval> {
    let s = op_system(ch, &config.tol)?;
    let ps = if ch.is_square() {
        peripheral_structure(ch, &config.tol).ok()
    } else {
        None
    };
    c0_bounds_with(ch, &s, ps.as_ref(), config)
}

pub fn c0_bounds_with(
    ch: &Channel,
    s: &OperatorSubspace,
    ps: Option<&PeripheralStructure>,
    config: &Config,
) -> Result<Interval> {
    let tol = &config.tol;
    let d = ch.input_dim();
    let ceiling = (d.min(ch.output_dim()) as f64).log2();
    if let ChannelKind::Classical(a) = ch.kind() {
        let g = confusability_graph(a);
        if g.n <= MAX_EXACT_VERTICES {
            let alpha = independence_number_graphical(&g)?;
            let v = (alpha.size as f64).log2();
            return Ok(if alpha.exact {
                Interval::new(v, v)
            } else {
                Interval::new(v, ceiling)
            });
        }
    }
    let mut best = 1usize;
    if let Some(ps) = ps {
        best = best.max(ps.sum_d());
    }
    best = best.max(basis_code(s, &identity(d), tol).len());
    let verdict = c_scrambling_with(ch, s, config)?;
    if !verdict.value() && verdict.is_certified() {
        best = best.max(2);
    }
    let hi = if verdict.value() && verdict.is_certified() {
        0.0
    } else {
        ceiling
    };
    Ok(Interval::new((best as f64).log2(), hi))
}

/// Certified bounds on the one-shot zero-error quantum capacity.
pub fn q0_bounds(ch: &Channel, config: &Config) -> Result<Interval> {
    let s = op_system(ch, &config.tol)?;
    let ps = if ch.is_square() {
        peripheral_structure(ch, &config.tol).ok()
    } else {
        None
    };
    q0_bounds_with(ch, &s, ps.as_ref(), config)
}

pub fn q0_bounds_with(
    ch: &Channel,
    s: &OperatorSubspace,
    ps: Option<&PeripheralStructure>,
    config: &Config,
) -> Result<Interval> {
    let d = ch.input_dim();
    let ceiling = (d.min(ch.output_dim()) as f64).log2();
    let mut lo: f64 = 0.0;
    if let Some(ps) = ps {
        lo = lo.max((ps.max_d().max(1) as f64).log2());
    }
    let verdict = q_scrambling_with(ch, s, config)?;
    if !verdict.value() && verdict.is_certified() {
        lo = lo.max(1.0);
    }
    let hi = if verdict.value() && verdict.is_certified() {
        0.0
    } else {
        ceiling
    };
    Ok(Interval::new(lo, hi))
}

/// Bounds on both one-shot capacities plus the entanglement-assisted zero test.
pub fn capacity_bounds(ch: &Channel, config: &Config) -> Result<CapacityBounds> {
    let s = op_system(ch, &config.tol)?;
    let ps = if ch.is_square() {
        peripheral_structure(ch, &config.tol).ok()
    } else {
        None
    };
    capacity_bounds_with(ch, &s, ps.as_ref(), config)
}

pub fn capacity_bounds_with(
    ch: &Channel,
    s: &OperatorSubspace,
    ps: Option<&PeripheralStructure>,
    config: &Config,
) -> Result<CapacityBounds> {
    let mut c0 = c0_bounds_with(ch, s, ps, config)?;
    let mut q0 = q0_bounds_with(ch, s, ps, config)?;
    // Q₀ ≤ C₀: a qubit code yields two orthogonal classical states.
    if q0.lo > c0.lo {
        c0 = Interval::new(q0.lo, c0.hi);
    }
    if q0.hi > c0.hi {
        q0 = Interval::new(q0.lo, c0.hi);
    }
    let d = ch.input_dim();
    Ok(CapacityBounds {
        c0,
        q0,
        c0e_zero: s.dim() == d * d,
    })
}

/// `2^{C₀(Φ^C)} + 2^{Q₀(Φ)} ≤ d + 1` evaluated on certified lower bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tradeoff {
    pub c0_complement_lo: f64,
    pub q0_lo: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

pub fn tradeoff_check(ch: &Channel, config: &Config) -> Result<Tradeoff> {
    let comp = ch.complementary()?;
    let c0c = c0_bounds(&comp, config)?.lo;
    let q0 = q0_bounds(ch, config)?.lo;
    Ok(tradeoff_of(ch.dim(), c0c, q0))
}

pub fn tradeoff_of(d: usize, c0_complement_lo: f64, q0_lo: f64) -> Tradeoff {
    let lhs = c0_complement_lo.exp2() + q0_lo.exp2();
    let rhs = d as f64 + 1.0;
    Tradeoff {
        c0_complement_lo,
        q0_lo,
        lhs,
        rhs,
        slack: rhs - lhs,
        holds: lhs <= rhs + 1e-9,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::StochasticMatrix;

    fn cfg() -> Config {
        Config::default()
    }

    #[test]
    fn independence_of_small_graphs() {
        let empty = ConfusabilityGraph::from_edges(5, &[]);
        assert_eq!(independence_number_graphical(&empty).unwrap().size, 5);
        let all: Vec<_> = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect();
        let complete = ConfusabilityGraph::from_edges(5, &all);
        assert_eq!(independence_number_graphical(&complete).unwrap().size, 1);
    }

    #[test]
    fn five_cycle_matches_brute_force() {
        let edges: Vec<_> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        let g = ConfusabilityGraph::from_edges(5, &edges);
        let brute = (0u32..32)
            .filter(|m| edges.iter().all(|&(a, b)| m & (1 << a) == 0 || m & (1 << b) == 0))
            .map(|m| m.count_ones())
            .max()
            .unwrap();
        assert_eq!(brute, 2);
        let r = independence_number_graphical(&g).unwrap();
        assert_eq!(r.size, 2);
        assert!(r.exact);
    }

    #[test]
    fn too_large_graph_rejected() {
        let g = ConfusabilityGraph::from_edges(25, &[]);
        assert!(matches!(independence_number_graphical(&g), Err(Error::TooLarge(25))));
    }

    #[test]
    fn cycle_channel_capacity_exact() {
        let a = StochasticMatrix::from_rows(&[
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ])
        .unwrap();
        let ch = Channel::classical(a).unwrap();
        let b = c0_bounds(&ch, &cfg()).unwrap();
        assert!(b.exact && (b.lo - 3f64.log2()).abs() < 1e-12);
        let code = peripheral_code(&ch, &Tolerances::default()).unwrap();
        assert_eq!(code.states.len(), 3);
        assert!(verify_zero_error_code(&ch, &code.states, 9, &Tolerances::default()).unwrap());
    }

    #[test]
    fn depolarizing_bounds_zero() {
        let ch = Channel::depolarizing(3);
        let b = capacity_bounds(&ch, &cfg()).unwrap();
        assert_eq!((b.c0.lo, b.c0.hi, b.q0.lo, b.q0.hi), (0.0, 0.0, 0.0, 0.0));
        assert!(b.c0e_zero);
        assert_eq!(peripheral_code(&ch, &Tolerances::default()).unwrap().states.len(), 1);
    }

    #[test]
    fn unitary_bounds_full() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = real_matrix(2, 2, &[h, h, h, -h]);
        let ch = Channel::unitary(&u).unwrap();
        let b = capacity_bounds(&ch, &cfg()).unwrap();
        assert!(b.q0.exact && (b.q0.lo - 1.0).abs() < 1e-12);
        let code = peripheral_code(&ch, &Tolerances::default()).unwrap();
        assert_eq!(code.states.len(), 2);
        assert!(verify_zero_error_code(&ch, &code.states, 6, &Tolerances::default()).unwrap());
    }

    #[test]
    fn identical_states_are_not_a_code() {
        let ch = Channel::identity(2);
        let s = unit(2, 0, 0);
        assert!(!verify_zero_error_code(&ch, &[s.clone(), s], 1, &Tolerances::default()).unwrap());
    }

    #[test]
    fn knill_laflamme() {
        let tol = Tolerances::default();
        let dep = Channel::depolarizing(3);
        let line = CMat::from_column_slice(3, 1, &[ONE, ZERO, ZERO]);
        assert!(is_correctable_subspace(&dep, &line, &tol).unwrap().correctable);
        let plane = CMat::from_fn(3, 2, |i, j| if i == j { ONE } else { ZERO });
        assert!(!is_correctable_subspace(&dep, &plane, &tol).unwrap().correctable);
        let u = Channel::unitary(&identity(3)).unwrap();
        assert!(is_correctable_subspace(&u, &identity(3), &tol).unwrap().correctable);
    }

    #[test]
    fn tradeoff_equality_for_unitary() {
        let t = tradeoff_check(&Channel::identity(3), &cfg()).unwrap();
        assert!(t.holds && t.slack.abs() < 1e-9, "{t:?}");
    }

    #[test]
    fn tradeoff_depolarizing() {
        let t = tradeoff_check(&Channel::depolarizing(3), &cfg()).unwrap();
        assert!(t.holds, "{t:?}");
    }
}
