//! Scrambling times and Wielandt indices.
//!
//! Classical and (C)DUC channels are decided exactly on the zero pattern of
//! `A`. Generic channels iterate a per-step predicate along the operator
//! system chain or the Kraus span chain, so no explicit channel powers are
//! formed. Infinite values are only ever reported on the strength of the
//! ergodic classification.

use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::channel::{Channel, ChannelKind, StochasticMatrix};
use crate::error::{Error, Result};
use crate::linalg::*;
use crate::opsys::{c_scrambling_with, chain, q_scrambling_with, strictly_positive_span, ChainResult};
use crate::spectral::{classify, Classification};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexValue {
    Finite(usize),
    Infinite,
}

impl IndexValue {
    pub fn finite(self) -> Option<usize> {
        match self {
            IndexValue::Finite(n) => Some(n),
            IndexValue::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, IndexValue::Finite(_))
    }
}

impl fmt::Display for IndexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexValue::Finite(n) => write!(f, "{n}"),
            IndexValue::Infinite => write!(f, "∞"),
        }
    }
}

impl Serialize for IndexValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            IndexValue::Finite(n) => s.serialize_u64(*n as u64),
            IndexValue::Infinite => s.serialize_str("infinite"),
        }
    }
}

/// Outcome of the predicate at one power `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IndexStep {
    pub n: usize,
    pub holds: bool,
    pub certified: bool,
}

impl IndexStep {
    fn from_verdict(n: usize, v: &Verdict) -> Self {
        IndexStep {
            n,
            holds: v.value(),
            certified: v.is_certified(),
        }
    }

    fn exact(n: usize, holds: bool) -> Self {
        IndexStep {
            n,
            holds,
            certified: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexResult {
    pub name: &'static str,
    pub value: IndexValue,
    /// Every step in the trail was certified, and so is the final answer.
    pub certified: bool,
    /// Steps `n = 1, 2, …` in order; a finite value `n` is the first step that holds.
    pub trail: Vec<IndexStep>,
    /// Largest power the iteration was prepared to examine.
    pub bound_used: usize,
    pub justification: Option<String>,
}

impl IndexResult {
    fn infinite(name: &'static str, bound_used: usize, why: impl Into<String>) -> Self {
        IndexResult {
            name,
            value: IndexValue::Infinite,
            certified: true,
            trail: vec![],
            bound_used,
            justification: Some(why.into()),
        }
    }

    fn with_name(mut self, name: &'static str, note: &str) -> Self {
        self.name = name;
        self.justification = Some(match self.justification.take() {
            Some(j) => format!("{note}; {j}"),
            None => note.to_string(),
        });
        self
    }
}

/// Runs `step(n)` for `n = 1..=bound` and stops at the first step that holds.
fn first_holding(
    name: &'static str,
    bound: usize,
    mut step: impl FnMut(usize) -> Result<Verdict>,
) -> Result<IndexResult> {
    let mut trail = Vec::new();
    for n in 1..=bound {
        let v = step(n)?;
        trail.push(IndexStep::from_verdict(n, &v));
        if v.value() {
            return Ok(IndexResult {
                name,
                value: IndexValue::Finite(n),
                certified: trail.iter().all(|s| s.certified),
                trail,
                bound_used: bound,
                justification: None,
            });
        }
    }
    Err(Error::BudgetExceeded {
        index: name,
        bound,
        best_guess: None,
    })
}

/// Exact properties of a column-stochastic matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClassicalPredicates {
    pub scrambling: bool,
    pub strictly_positive: bool,
    /// A unique closed class, and it is aperiodic.
    pub mixing: bool,
    /// Irreducible and aperiodic.
    pub primitive: bool,
    /// The spectral test on `A` gave the same mixing and primitive answers.
    pub spectral_agrees: bool,
}

type Pattern = Vec<Vec<bool>>;

fn bool_product(a: &Pattern, b: &Pattern) -> Pattern {
    let d = a.len();
    (0..d)
        .map(|i| (0..d).map(|j| (0..d).any(|k| a[i][k] && b[k][j])).collect())
        .collect()
}

fn pattern_scrambling(p: &Pattern) -> bool {
    let d = p.len();
    (0..d).all(|i| (i + 1..d).all(|j| (0..d).any(|k| p[k][i] && p[k][j])))
}

fn pattern_positive(p: &Pattern) -> bool {
    p.iter().all(|row| row.iter().all(|&x| x))
}

/// `reach[i][j]`: `j` is reachable from `i` along edges `i → k` with `A_ki > 0`.
fn reachability(sup: &Pattern) -> Pattern {
    let d = sup.len();
    let mut r: Pattern = (0..d).map(|i| (0..d).map(|j| i == j || sup[j][i]).collect()).collect();
    for k in 0..d {
        for i in 0..d {
            if r[i][k] {
                for j in 0..d {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Period of the strongly connected class `class` (gcd of cycle lengths).
fn class_period(sup: &Pattern, class: &[usize]) -> usize {
    let d = sup.len();
    let inside: Vec<bool> = (0..d).map(|i| class.contains(&i)).collect();
    let mut level = vec![usize::MAX; d];
    level[class[0]] = 0;
    let mut queue = std::collections::VecDeque::from([class[0]]);
    let mut g = 0;
    while let Some(u) = queue.pop_front() {
        for v in 0..d {
            if !(inside[v] && sup[v][u]) {
                continue;
            }
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            } else {
                g = gcd(g, (level[u] + 1).abs_diff(level[v]));
            }
        }
    }
    g
}

/// Graph-theoretic mixing and primitivity of `A`.
fn graph_mixing_primitive(a: &StochasticMatrix) -> (bool, bool) {
    let sup = a.support();
    let d = sup.len();
    let reach = reachability(&sup);
    let mut seen = vec![false; d];
    let mut closed = Vec::new();
    for i in 0..d {
        if seen[i] {
            continue;
        }
        let class: Vec<usize> = (0..d).filter(|&j| reach[i][j] && reach[j][i]).collect();
        for &j in &class {
            seen[j] = true;
        }
        let leaves = class.iter().any(|&u| (0..d).any(|v| reach[u][v] && !class.contains(&v)));
        if !leaves {
            closed.push(class);
        }
    }
    let mixing = closed.len() == 1 && class_period(&sup, &closed[0]) == 1;
    let primitive = mixing && closed[0].len() == d;
    (mixing, primitive)
}

/// Spectral mixing and primitivity of `A`: a simple, isolated eigenvalue 1
/// and, for primitivity, a strictly positive Perron vector.
fn spectral_mixing_primitive(a: &StochasticMatrix, tol: &Tolerances) -> Result<(bool, bool)> {
    let m = to_complex(a.matrix());
    let ev = eigenvalues(&m)?;
    let peripheral = ev.iter().filter(|z| z.norm() >= 1.0 - tol.peripheral_eps).count();
    let mixing = peripheral == 1;
    if !mixing {
        return Ok((false, false));
    }
    let d = a.dim();
    let v = null_space(&(m - identity(d)), tol.null_eps());
    if v.ncols() != 1 {
        return Ok((false, false));
    }
    let col = v.column(0);
    let s: C64 = col.iter().sum();
    let p: Vec<f64> = col.iter().map(|z| (z / s).re).collect();
    let top = p.iter().copied().fold(0.0, f64::max);
    Ok((true, p.iter().all(|&x| x > tol.rank_eps * top)))
}

pub fn classical_predicates(a: &StochasticMatrix, tol: &Tolerances) -> Result<ClassicalPredicates> {
    let (mixing, primitive) = graph_mixing_primitive(a);
    let spectral = spectral_mixing_primitive(a, tol)?;
    Ok(ClassicalPredicates {
        scrambling: a.is_scrambling(),
        strictly_positive: a.is_strictly_positive(),
        mixing,
        primitive,
        spectral_agrees: spectral == (mixing, primitive),
    })
}

/// `⌈(d² − 2d + 2)/2⌉`, the largest scrambling index of a primitive `d × d` matrix.
pub fn scrambling_bound(d: usize) -> usize {
    wielandt_bound(d).div_ceil(2)
}

/// `d² − 2d + 2`, the largest exponent of a primitive `d × d` matrix.
pub fn wielandt_bound(d: usize) -> usize {
    (d * d + 2).saturating_sub(2 * d).max(1)
}

/// First `n` at which the zero pattern of `Aⁿ` satisfies `test`.
///
/// Zero patterns of powers are eventually periodic, so the loop ends either
/// at a hit or at the first repeated pattern, which proves the value infinite.
fn classical_index(
    name: &'static str,
    a: &StochasticMatrix,
    bound: usize,
    test: fn(&Pattern) -> bool,
    never: &str,
) -> IndexResult {
    let sup = a.support();
    let mut p = sup.clone();
    let mut seen: HashMap<Pattern, usize> = HashMap::new();
    let mut trail = Vec::new();
    let mut n = 1;
    loop {
        let holds = test(&p);
        trail.push(IndexStep::exact(n, holds));
        if holds {
            return IndexResult {
                name,
                value: IndexValue::Finite(n),
                certified: true,
                trail,
                bound_used: bound,
                justification: (n > bound).then(|| format!("exceeds the primitive bound {bound}")),
            };
        }
        if let Some(first) = seen.insert(p.clone(), n) {
            return IndexResult {
                name,
                value: IndexValue::Infinite,
                certified: true,
                trail,
                bound_used: bound,
                justification: Some(format!(
                    "{never}: zero pattern of A^{n} repeats A^{first} without the property"
                )),
            };
        }
        p = bool_product(&sup, &p);
        n += 1;
    }
}

/// Scrambling index `c(A)`: least `n` with `Aⁿ` scrambling.
pub fn c_index_classical(a: &StochasticMatrix) -> IndexResult {
    classical_index("c", a, scrambling_bound(a.dim()), pattern_scrambling, "not mixing")
}

/// Exponent `w(A)`: least `n` with `Aⁿ` entrywise positive.
pub fn w_index_classical(a: &StochasticMatrix) -> IndexResult {
    classical_index("w", a, wielandt_bound(a.dim()), pattern_positive, "not primitive")
}

/// Operator-system chain bound `max(1, d² − dim S_Φ)` together with the chain.
fn chain_and_bound(ch: &Channel, tol: &Tolerances) -> Result<(ChainResult, usize)> {
    let d = ch.dim();
    let ch_res = chain(ch, tol)?;
    let paper_bound = (d * d).saturating_sub(ch_res.dims[0]).max(1);
    let bound = paper_bound.max(ch_res.n);
    Ok((ch_res, bound))
}

fn structured_note(kind: &ChannelKind) -> &'static str {
    match kind {
        ChannelKind::Classical(_) => "decided on the stochastic matrix A",
        _ => "decided on the stochastic matrix A of the covariant channel",
    }
}

/// Classical scrambling time `c(Φ)`: least `n` with `C₀(Φⁿ) = 0`.
pub fn c_index(ch: &Channel, config: &Config) -> Result<IndexResult> {
    if let Some(a) = ch.stochastic() {
        return Ok(c_index_classical(a).with_name("c", structured_note(ch.kind())));
    }
    let cl = classify(ch, &config.tol)?;
    c_index_with(ch, &cl, None, config)
}

/// [`c_index`] reusing a classification and, optionally, the chain.
pub fn c_index_with(
    ch: &Channel,
    cl: &Classification,
    chain_res: Option<&ChainResult>,
    config: &Config,
) -> Result<IndexResult> {
    if let Some(a) = ch.stochastic() {
        return Ok(c_index_classical(a).with_name("c", structured_note(ch.kind())));
    }
    let d = ch.dim();
    if !cl.mixing {
        return Ok(IndexResult::infinite("c", d * d, "not mixing"));
    }
    let owned;
    let (chain_res, bound) = match chain_res {
        Some(c) => (c, (d * d).saturating_sub(c.dims[0]).max(1).max(c.n)),
        None => {
            owned = chain_and_bound(ch, &config.tol)?;
            (&owned.0, owned.1)
        }
    };
    let generic = ch.as_generic();
    first_holding("c", bound, |n| c_scrambling_with(&generic, chain_res.system(n), config))
}

/// Entanglement-assisted scrambling time `c_E(Φ)`: least `n` with `S_{Φⁿ} = M_d`.
pub fn ce_index(ch: &Channel, config: &Config) -> Result<IndexResult> {
    let cl = classify(ch, &config.tol)?;
    ce_index_with(ch, &cl, None, config)
}

pub fn ce_index_with(
    ch: &Channel,
    cl: &Classification,
    chain_res: Option<&ChainResult>,
    config: &Config,
) -> Result<IndexResult> {
    let d = ch.dim();
    let mixing = match ch.stochastic() {
        Some(a) => classical_predicates(a, &config.tol)?.mixing,
        None => cl.mixing,
    };
    if !mixing {
        return Ok(IndexResult::infinite("cE", d * d, "not mixing"));
    }
    let owned;
    let (chain_res, bound) = match chain_res {
        Some(c) => (c, (d * d).saturating_sub(c.dims[0]).max(1).max(c.n)),
        None => {
            owned = chain_and_bound(ch, &config.tol)?;
            (&owned.0, owned.1)
        }
    };
    first_holding("cE", bound, |n| {
        let full = chain_res.system(n).dim() == d * d;
        Ok(if full {
            Verdict::CertifiedTrue(Witness::Structural("S = M_d".into()))
        } else {
            Verdict::CertifiedFalse(Witness::Structural("S ≠ M_d".into()))
        })
    })
}

/// Quantum scrambling time `q(Φ)`: least `n` with `Q₀(Φⁿ) = 0`.
pub fn q_index(ch: &Channel, config: &Config) -> Result<IndexResult> {
    let cl = classify(ch, &config.tol)?;
    q_index_with(ch, &cl, None, config)
}

pub fn q_index_with(
    ch: &Channel,
    cl: &Classification,
    chain_res: Option<&ChainResult>,
    config: &Config,
) -> Result<IndexResult> {
    let d = ch.dim();
    if matches!(ch.kind(), ChannelKind::Classical(_)) {
        return Ok(IndexResult {
            name: "q",
            value: IndexValue::Finite(1),
            certified: true,
            trail: vec![IndexStep::exact(1, true)],
            bound_used: 1,
            justification: Some("classical channels carry no quantum information".into()),
        });
    }
    if !cl.aeb {
        return Ok(IndexResult::infinite(
            "q",
            d * d,
            "not asymptotically entanglement-breaking",
        ));
    }
    let owned;
    let chain_res = match chain_res {
        Some(c) => c,
        None => {
            owned = chain(ch, &config.tol)?;
            &owned
        }
    };
    let bound = (d * d).max(chain_res.n);
    first_holding("q", bound, |n| q_scrambling_with(ch, chain_res.system(n), config))
}

/// Wielandt index together with the Kraus-span certificate time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WielandtResult {
    pub index: IndexResult,
    /// Least `n` with `span{K_{i₁}⋯K_{iₙ}} = M_d`, an upper bound on `w(Φ)`.
    pub kraus_span_time: Option<usize>,
}

/// Successive Kraus spans `K_n(Φ) = span{K_{i₁}⋯K_{iₙ}}`.
struct KrausSpans<'a> {
    ch: &'a Channel,
    tol: Tolerances,
    current: Option<OperatorSubspace>,
}

impl KrausSpans<'_> {
    fn next_span(&mut self) -> Result<&OperatorSubspace> {
        let d = self.ch.dim();
        let next = match &self.current {
            None => OperatorSubspace::span(d, self.ch.kraus(), &self.tol)?,
            Some(s) if s.dim() == d * d => s.clone(),
            Some(s) => {
                let products: Vec<CMat> = self
                    .ch
                    .kraus()
                    .iter()
                    .flat_map(|k| s.basis().into_iter().map(move |b| k * b))
                    .collect();
                OperatorSubspace::span(d, &products, &self.tol)?
            }
        };
        Ok(self.current.insert(next))
    }
}

/// Largest power examined when waiting for the Kraus span to fill `M_d`.
pub fn kraus_span_horizon(d: usize) -> usize {
    2 * d * d * (d.max(2) as f64).log2().ceil() as usize + wielandt_bound(d)
}

/// Wielandt index `w(Φ)`: least `n` with `Φⁿ` strictly positive.
pub fn w_index(ch: &Channel, config: &Config) -> Result<WielandtResult> {
    if let Some(a) = ch.stochastic() {
        let index = w_index_classical(a).with_name("w", structured_note(ch.kind()));
        // For Φ_A, K_n(Φ) is spanned by the matrix units on the support of Aⁿ.
        let kraus_span_time = match ch.kind() {
            ChannelKind::Classical(_) => index.value.finite(),
            _ => None,
        };
        return Ok(WielandtResult {
            index,
            kraus_span_time,
        });
    }
    let cl = classify(ch, &config.tol)?;
    w_index_with(ch, &cl, config)
}

pub fn w_index_with(ch: &Channel, cl: &Classification, config: &Config) -> Result<WielandtResult> {
    if ch.stochastic().is_some() {
        return w_index(ch, config);
    }
    let d = ch.dim();
    let horizon = kraus_span_horizon(d);
    if !cl.primitive {
        return Ok(WielandtResult {
            index: IndexResult::infinite("w", horizon, "not primitive"),
            kraus_span_time: None,
        });
    }
    let mut spans = KrausSpans {
        ch,
        tol: config.tol,
        current: None,
    };
    let mut trail = Vec::new();
    let mut found = None;
    let mut kraus_span_time = None;
    for n in 1..=horizon {
        let span = spans.next_span()?;
        let full = span.dim() == d * d;
        if full && kraus_span_time.is_none() {
            kraus_span_time = Some(n);
        }
        if found.is_none() {
            let v = strictly_positive_span(span, config)?;
            trail.push(IndexStep::from_verdict(n, &v));
            if v.value() {
                found = Some(n);
            }
        }
        if found.is_some() && kraus_span_time.is_some() {
            break;
        }
    }
    let Some(n) = found else {
        return Err(Error::BudgetExceeded {
            index: "w",
            bound: horizon,
            best_guess: None,
        });
    };
    Ok(WielandtResult {
        index: IndexResult {
            name: "w",
            value: IndexValue::Finite(n),
            certified: trail.iter().all(|s| s.certified),
            trail,
            bound_used: horizon,
            justification: None,
        },
        kraus_span_time,
    })
}

/// Least `n` with `K_n(Φ) = M_d`, searched up to `max_n`.
pub fn kraus_span_time(ch: &Channel, max_n: usize, tol: &Tolerances) -> Result<Option<usize>> {
    let d = ch.dim();
    let mut spans = KrausSpans {
        ch,
        tol: *tol,
        current: None,
    };
    for n in 1..=max_n {
        if spans.next_span()?.dim() == d * d {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Bounds `q ≤ d − 2` and `c ≤ 2(d − 1)` for primitive unital channels whose
/// operator systems are all algebras.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum AlgebraChainBounds {
    NotApplicable(String),
    Checked {
        q: IndexValue,
        c: IndexValue,
        q_bound: usize,
        c_bound: usize,
        q_holds: bool,
        c_holds: bool,
    },
}

pub fn algebra_chain_bounds(ch: &Channel, config: &Config) -> Result<AlgebraChainBounds> {
    let tol = &config.tol;
    let d = ch.dim();
    let defect = ch.unitality_defect();
    if defect > tol.subspace_eps {
        return Err(Error::NotUnital(defect));
    }
    let cl = classify(ch, tol)?;
    if !cl.primitive {
        return Ok(AlgebraChainBounds::NotApplicable("channel is not primitive".into()));
    }
    let chain_res = chain(ch, tol)?;
    if let Some(n) = (1..=chain_res.n).find(|&n| !is_algebra(chain_res.system(n), tol)) {
        return Ok(AlgebraChainBounds::NotApplicable(format!(
            "operator system of power {n} is not an algebra"
        )));
    }
    let q = q_index_with(ch, &cl, Some(&chain_res), config)?.value;
    let c = c_index_with(ch, &cl, Some(&chain_res), config)?.value;
    let q_bound = d.saturating_sub(2);
    let c_bound = 2 * (d - 1);
    let within = |v: IndexValue, b: usize| v.finite().is_some_and(|n| n <= b);
    Ok(AlgebraChainBounds::Checked {
        q,
        c,
        q_bound,
        c_bound,
        q_holds: within(q, q_bound),
        c_holds: within(c, c_bound),
    })
}
