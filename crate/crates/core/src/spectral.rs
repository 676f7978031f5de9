//! Spectral and ergodic classification, the peripheral space and its block
//! decomposition, cyclic codes, and the Kraus-span mixing test.

use rand::Rng;
use serde::Serialize;

use crate::channel::{Channel, CpMap};
use crate::error::{Error, Result};
use crate::linalg::*;

/// Peripheral eigenvalues closer than this are treated as one eigenvalue.
const CLUSTER_EPS: f64 = 1e-6;
/// Residual accepted when rationalizing an eigenvalue angle (radians).
const ANGLE_EPS: f64 = 1e-6;
/// Row mass a single block must carry for the block permutation to be read off.
const DOMINANCE: f64 = 0.9;

/// A peripheral eigenvalue with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PeripheralEigenvalue {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

impl PeripheralEigenvalue {
    pub fn value(&self) -> C64 {
        c(self.re, self.im)
    }
}

/// Peripheral part of a spectrum.
#[derive(Clone, Debug)]
pub struct PeripheralSpectrum {
    /// Clusters sorted by angle in `[0, 2π)`; the first is `λ = 1`.
    pub eigenvalues: Vec<PeripheralEigenvalue>,
    /// Eigenvalues with `peripheral_eps < 1 − |λ| ≤ AMBIGUOUS_BAND`.
    pub ambiguous: Vec<C64>,
    /// Full spectrum of the transfer matrix.
    pub spectrum: Vec<C64>,
}

impl PeripheralSpectrum {
    pub fn fixed_multiplicity(&self) -> usize {
        self.eigenvalues
            .iter()
            .find(|e| (e.value() - ONE).norm() <= CLUSTER_EPS)
            .map_or(0, |e| e.multiplicity)
    }

    pub fn total_multiplicity(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.multiplicity).sum()
    }
}

/// Peripheral eigenvalues of a transfer matrix, clustered.
pub fn peripheral_spectrum(t: &CMat, tol: &Tolerances) -> Result<PeripheralSpectrum> {
    let spectrum = eigenvalues(t)?;
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    let mut ambiguous = Vec::new();
    for &l in &spectrum {
        let gap = (1.0 - l.norm()).abs();
        if gap <= tol.peripheral_eps {
            match clusters.iter_mut().find(|(r, _)| (r - l).norm() <= CLUSTER_EPS) {
                Some((_, m)) => *m += 1,
                None => clusters.push((l, 1)),
            }
        } else if gap <= Tolerances::AMBIGUOUS_BAND {
            ambiguous.push(l);
        }
    }
    let angle = |z: &C64| {
        let a = z.arg();
        if a < -1e-12 {
            a + 2.0 * std::f64::consts::PI
        } else {
            a.max(0.0)
        }
    };
    clusters.sort_by(|a, b| angle(&a.0).total_cmp(&angle(&b.0)));
    Ok(PeripheralSpectrum {
        eigenvalues: clusters
            .into_iter()
            .map(|(v, m)| PeripheralEigenvalue {
                re: v.re,
                im: v.im,
                multiplicity: m,
            })
            .collect(),
        ambiguous,
        spectrum,
    })
}

/// Eigenvectors of `t` at `λ`, as columns, expecting `mult` of them.
fn eigenspace(t: &CMat, lambda: C64, mult: usize, tol: &Tolerances) -> Result<CMat> {
    let n = t.nrows();
    let shifted = t - CMat::identity(n, n) * lambda;
    let (vecs, worst) = smallest_right_singular(&shifted, mult);
    let cut = tol.null_eps();
    if worst > cut {
        return Err(Error::DefectivePeripheral {
            re: lambda.re,
            im: lambda.im,
            algebraic: mult,
            geometric: null_space(&shifted, cut).ncols(),
        });
    }
    Ok(vecs)
}

/// Peripheral eigenvectors of `t` (columns) for every cluster.
fn peripheral_vectors(t: &CMat, spec: &PeripheralSpectrum, tol: &Tolerances) -> Result<CMat> {
    let total = spec.total_multiplicity();
    let mut out = CMat::zeros(t.nrows(), total);
    let mut col = 0;
    for e in &spec.eigenvalues {
        let v = eigenspace(t, e.value(), e.multiplicity, tol)?;
        out.view_mut((0, col), (t.nrows(), e.multiplicity)).copy_from(&v);
        col += e.multiplicity;
    }
    Ok(out)
}

/// `Fix_Φ = {X : Φ(X) = X}` with a Hermitian basis.
pub fn fixed_space(ch: &Channel, tol: &Tolerances) -> Result<OperatorSubspace> {
    let t = ch.transfer_matrix();
    let spec = peripheral_spectrum(t, tol)?;
    let g = spec.fixed_multiplicity();
    let v = eigenspace(t, ONE, g, tol)?;
    let mats: Vec<CMat> = (0..g).map(|k| unvectorize(v.column(k).as_slice(), ch.dim())).collect();
    if mats.is_empty() {
        return Err(Error::NumericalFailure("no eigenvalue 1 found".into()));
    }
    hermitian_span(ch.dim(), &mats, tol)
}

/// χ(Φ): span of all peripheral eigenoperators.
pub fn peripheral_space(ch: &Channel, tol: &Tolerances) -> Result<OperatorSubspace> {
    let t = ch.transfer_matrix();
    let spec = peripheral_spectrum(t, tol)?;
    Ok(OperatorSubspace::from_columns(ch.dim(), &peripheral_vectors(t, &spec, tol)?, tol))
}

/// Ergodic-theoretic classification of a channel.
#[derive(Clone, Debug)]
pub struct Classification {
    pub ergodic: bool,
    pub irreducible: bool,
    pub mixing: bool,
    pub primitive: bool,
    /// Asymptotically entanglement-breaking: every peripheral block is one-dimensional.
    pub aeb: bool,
    pub fixed_dim: usize,
    /// The unique invariant state, for ergodic channels.
    pub invariant_state: Option<CMat>,
    /// Projector onto the support of the unique invariant state.
    pub invariant_support: Option<CMat>,
    pub peripheral_eigenvalues: Vec<PeripheralEigenvalue>,
    pub ambiguous_eigenvalues: Vec<C64>,
    /// Why `aeb` had to be decided without the block structure, if it did.
    pub structure_error: Option<String>,
}

pub fn classify(ch: &Channel, tol: &Tolerances) -> Result<Classification> {
    let d = ch.dim();
    let t = ch.transfer_matrix();
    let spec = peripheral_spectrum(t, tol)?;
    let g = spec.fixed_multiplicity();
    if g == 0 {
        return Err(Error::NumericalFailure("no eigenvalue 1 found".into()));
    }
    let ergodic = g == 1;
    let mixing = ergodic && spec.eigenvalues.len() == 1;
    let (invariant_state, invariant_support, full_rank) = if ergodic {
        let v = eigenspace(t, ONE, 1, tol)?;
        let x = unvectorize(v.column(0).as_slice(), d);
        let rho = hermitian_part(&(&x / trace(&x)));
        let iso = support_isometry(&rho, tol.rank_eps);
        let rank = iso.ncols();
        (Some(rho), Some(&iso * iso.adjoint()), rank == d)
    } else {
        (None, None, false)
    };
    let (aeb, structure_error) = match peripheral_structure_with(ch, &spec, tol) {
        Ok(ps) => (ps.blocks.iter().all(|&(dk, _)| dk == 1), None),
        Err(e) => {
            let chi = OperatorSubspace::from_columns(d, &peripheral_vectors(t, &spec, tol)?, tol);
            (is_abelian(&chi, tol), Some(e.to_string()))
        }
    };
    Ok(Classification {
        ergodic,
        irreducible: ergodic && full_rank,
        mixing,
        primitive: mixing && full_rank,
        aeb,
        fixed_dim: g,
        invariant_state,
        invariant_support,
        peripheral_eigenvalues: spec.eigenvalues,
        ambiguous_eigenvalues: spec.ambiguous,
        structure_error,
    })
}

/// Block decomposition `χ(Φ) = 0 ⊕ ⊕_k M_{d_k} ⊗ ρ_k` of the peripheral space.
#[derive(Clone, Debug)]
pub struct PeripheralStructure {
    pub space: OperatorSubspace,
    pub eigenvalues: Vec<PeripheralEigenvalue>,
    /// Least common multiple of the orders of the peripheral eigenvalues;
    /// `None` when some angle is not a rational multiple of `2π` with
    /// denominator at most `angle_max_den`.
    pub period: Option<u64>,
    /// `(d_k, m_k)`, sorted by `d_k` then `m_k`, descending.
    pub blocks: Vec<(usize, usize)>,
    /// Projector onto `H_{k,1} ⊗ H_{k,2}` for each block.
    pub block_projectors: Vec<CMat>,
    /// `ρ_k` as an `m_k × m_k` density matrix in an arbitrary basis of `H_{k,2}`.
    pub block_states: Vec<CMat>,
    /// For each block, isometries onto the ranges of `d_k` orthogonal
    /// minimal projections `|i⟩⟨i| ⊗ 1`.
    pub minimal_ranges: Vec<Vec<CMat>>,
    /// `Φ` carries block `k` onto block `permutation[k]`.
    pub permutation: Vec<usize>,
    /// Maximal-rank fixed state; its support is the complement of `H_0`.
    pub max_fixed_state: CMat,
    pub support_projector: CMat,
}

impl PeripheralStructure {
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn sum_d(&self) -> usize {
        self.blocks.iter().map(|b| b.0).sum()
    }

    pub fn max_d(&self) -> usize {
        self.blocks.iter().map(|b| b.0).max().unwrap_or(0)
    }

    /// Order of the block permutation.
    pub fn permutation_order(&self) -> usize {
        let mut order = 1u64;
        let n = self.permutation.len();
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.permutation[k];
                len += 1;
            }
            order = lcm(order, len as u64);
        }
        order as usize
    }
}

pub fn peripheral_structure(ch: &Channel, tol: &Tolerances) -> Result<PeripheralStructure> {
    let spec = peripheral_spectrum(ch.transfer_matrix(), tol)?;
    peripheral_structure_with(ch, &spec, tol)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Order `q` of `e^{iθ}` when `θ/2π ≈ p/q` with `q ≤ max_den`, via the
/// continued fraction convergents of `θ/2π`.
pub fn rational_order(theta: f64, max_den: u64) -> Option<u64> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let x = (theta / two_pi).rem_euclid(1.0);
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 as u64 > max_den {
            break;
        }
        let resid = two_pi * (x - h2 as f64 / k2 as f64).abs();
        if resid <= ANGLE_EPS {
            let q = k2 as u64;
            let p = h2.rem_euclid(k2) as u64;
            return Some(q / gcd(p, q).max(1));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

/// Period of the peripheral spectrum, if every angle rationalizes.
pub fn period(eigs: &[PeripheralEigenvalue], max_den: u64) -> Option<u64> {
    eigs.iter()
        .try_fold(1u64, |acc, e| rational_order(e.value().arg(), max_den).map(|q| lcm(acc, q)))
}

/// Spectral projection of `t` onto its `λ = 1` eigenspace applied to `x`.
fn fixed_projection(t: &CMat, g: usize, x: &CVec, tol: &Tolerances) -> Result<CVec> {
    let right = eigenspace(t, ONE, g, tol)?;
    let left = eigenspace(&t.adjoint(), ONE, g, tol)?;
    let gram = left.adjoint() * &right;
    let inv = gram
        .try_inverse()
        .ok_or_else(|| Error::NumericalFailure("left and right fixed vectors are orthogonal".into()))?;
    Ok(&right * (inv * (left.adjoint() * x)))
}

fn peripheral_structure_with(
    ch: &Channel,
    spec: &PeripheralSpectrum,
    tol: &Tolerances,
) -> Result<PeripheralStructure> {
    let d = ch.dim();
    let t = ch.transfer_matrix();
    let space = OperatorSubspace::from_columns(d, &peripheral_vectors(t, spec, tol)?, tol);

    // Maximal fixed state from the unit eigenprojection applied to 1/d.
    let g = spec.fixed_multiplicity();
    let mixed = vectorize(&identity(d).scale(1.0 / d as f64));
    let rho_vec = fixed_projection(t, g, &mixed, tol)?;
    let rho = unvectorize(rho_vec.as_slice(), d);
    let rho = hermitian_part(&(&rho / trace(&rho)));
    let iso = support_isometry(&rho, tol.subspace_eps);
    let r = iso.ncols();
    if r == 0 {
        return Err(Error::BlockExtractionFailed("maximal fixed state vanished".into()));
    }

    // Restriction to the support, which is invariant.
    let restricted = CpMap::new(
        r,
        r,
        ch.kraus().iter().map(|k| iso.adjoint() * k * &iso).collect(),
    );
    let t_adj = restricted.transfer_matrix().adjoint();
    let spec_adj = peripheral_spectrum(&t_adj, tol)?;
    let vecs = peripheral_vectors(&t_adj, &spec_adj, tol)?;
    let mats: Vec<CMat> = (0..vecs.ncols())
        .map(|k| unvectorize(vecs.column(k).as_slice(), r))
        .collect();
    let algebra = hermitian_span(r, &mats, tol)?;
    let blocks = algebra_blocks(&algebra, tol).map_err(|e| match e {
        Error::NotAnAlgebra => {
            Error::BlockExtractionFailed("peripheral space of the restricted adjoint is not an algebra".into())
        }
        other => Error::BlockExtractionFailed(other.to_string()),
    })?;
    let count = blocks.iter().map(|b| b.d * b.m).sum::<usize>();
    if count != r {
        return Err(Error::BlockExtractionFailed(format!(
            "block projectors cover rank {count} of the support rank {r}"
        )));
    }

    // Block permutation from output overlaps.
    let k_count = blocks.len();
    let mut permutation = vec![0; k_count];
    for (k, b) in blocks.iter().enumerate() {
        let sigma = b.projector.scale(1.0 / (b.d * b.m) as f64);
        let out = restricted.apply(&sigma);
        let row: Vec<f64> = blocks.iter().map(|q| trace(&(&q.projector * &out)).re).collect();
        let total: f64 = row.iter().sum();
        let (best, mass) = row
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(l, &m)| (l, m))
            .expect("at least one block");
        if mass < DOMINANCE * total {
            return Err(Error::PermutationAmbiguous(format!(
                "block {k} spreads over {row:?}"
            )));
        }
        permutation[k] = best;
    }
    let mut hit = vec![false; k_count];
    for (k, &l) in permutation.iter().enumerate() {
        if hit[l] || blocks[l].d != blocks[k].d {
            return Err(Error::BlockExtractionFailed(format!("block map {permutation:?} is not a dimension-preserving permutation")));
        }
        hit[l] = true;
    }

    // ρ_k: compression of the maximal fixed state to a minimal projection of block k.
    let rho_r = iso.adjoint() * &rho * &iso;
    let mut rng = restart_rng(0xb10c, 0);
    let mut block_states = Vec::with_capacity(k_count);
    let mut minimal_ranges_out = Vec::with_capacity(k_count);
    for b in &blocks {
        let ranges = minimal_ranges(&algebra, b, &mut rng, tol)?;
        let w = &ranges[0];
        let s = w.adjoint() * &rho_r * w;
        let s = hermitian_part(&(&s / trace(&s)));
        block_states.push(s);
        minimal_ranges_out.push(ranges.iter().map(|w| &iso * w).collect());
    }

    let max_den = tol.max_den(d);
    Ok(PeripheralStructure {
        space,
        period: period(&spec.eigenvalues, max_den),
        eigenvalues: spec.eigenvalues.clone(),
        blocks: blocks.iter().map(|b| (b.d, b.m)).collect(),
        block_projectors: blocks.iter().map(|b| &iso * &b.projector * iso.adjoint()).collect(),
        block_states,
        minimal_ranges: minimal_ranges_out,
        permutation,
        support_projector: &iso * iso.adjoint(),
        max_fixed_state: rho,
    })
}

/// Isometries onto the ranges of `d_k` orthogonal minimal projections
/// `|i⟩⟨i| ⊗ 1_{m}` of one block.
///
/// A random element of the algebra restricted to the block has the form
/// `H ⊗ 1_m`; its eigenvalues come in `d_k` clusters of size `m_k`.
fn minimal_ranges(
    algebra: &OperatorSubspace,
    block: &AlgebraBlock,
    rng: &mut rand_chacha::ChaCha8Rng,
    tol: &Tolerances,
) -> Result<Vec<CMat>> {
    let iso = support_isometry(&block.projector, 0.5);
    if block.d == 1 {
        return Ok(vec![iso]);
    }
    let basis = algebra.basis();
    let m = block.m;
    for _ in 0..8 {
        let mut h = CMat::zeros(iso.ncols(), iso.ncols());
        for b in &basis {
            let local = iso.adjoint() * b * &iso;
            h += hermitian_part(&local).scale(rng.random_range(-1.0..1.0));
            h += anti_hermitian_part(&local).scale(rng.random_range(-1.0..1.0));
        }
        let e = herm_eig(&h);
        let scale = e.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1e-300);
        let clustered = (0..block.d).all(|i| {
            let spread = e.values[i * m + m - 1] - e.values[i * m];
            let gap_ok = i + 1 == block.d || e.values[(i + 1) * m] - e.values[i * m + m - 1] > 1e-6 * scale;
            spread <= tol.subspace_eps.sqrt() * scale && gap_ok
        });
        if clustered {
            return Ok((0..block.d)
                .map(|i| &iso * e.vectors.columns(i * m, m).into_owned())
                .collect());
        }
    }
    Err(Error::BlockExtractionFailed("no minimal projection found in a block".into()))
}

/// `(log₂ Σ_k d_k, log₂ max_k d_k)`: the limits of the one-shot zero-error
/// classical and quantum capacities of `Φⁿ`.
pub fn asymptotic_capacities(ch: &Channel, tol: &Tolerances) -> Result<(f64, f64)> {
    let ps = peripheral_structure(ch, tol)?;
    Ok(capacities_of(&ps))
}

pub fn capacities_of(ps: &PeripheralStructure) -> (f64, f64) {
    ((ps.sum_d() as f64).log2(), (ps.max_d() as f64).log2())
}

/// Spectral projections `P_0, …, P_{q−1}` of the peripheral unitary
/// eigenoperator of `Φ*`, labelled so that `Φ*(P_{m+1}) = P_m`.
///
/// When that eigenoperator is not unitary on all of `C^d` (a transient state
/// leaks into several cyclic classes) the projections are taken inside the
/// invariant support, where the shift relation holds after compression.
pub fn ergodic_cycle_projections(ch: &Channel, tol: &Tolerances) -> Result<Vec<CMat>> {
    let d = ch.dim();
    let t = ch.transfer_matrix();
    let spec = peripheral_spectrum(t, tol)?;
    let g = spec.fixed_multiplicity();
    if g != 1 {
        return Err(Error::NotErgodic(g));
    }
    let q = spec.eigenvalues.len();
    if q == 1 {
        return Ok(vec![identity(d)]);
    }
    let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / q as f64);
    let t_adj = t.adjoint();
    let v = eigenspace(&t_adj, omega, 1, tol)?;
    let x = unvectorize(v.column(0).as_slice(), d);
    let unitary_defect = |u: &CMat| (u.adjoint() * u - identity(u.nrows())).norm();

    let build = |x: &CMat| -> Option<Vec<CMat>> {
        let n = x.nrows();
        // Scale so that x^q = 1; the eigenvalues are then exactly the q-th roots of unity.
        let xq = mat_pow(x, q as u64);
        let s = trace(&xq) / c(n as f64, 0.0);
        if s.norm() < 1e-300 {
            return None;
        }
        let u = x / s.powf(1.0 / q as f64);
        if unitary_defect(&u) > tol.subspace_eps.sqrt() {
            return None;
        }
        let powers: Vec<CMat> = (0..q).map(|k| mat_pow(&u, k as u64)).collect();
        let projs: Vec<CMat> = (0..q)
            .map(|m| {
                let mut p = CMat::zeros(n, n);
                for (k, uk) in powers.iter().enumerate() {
                    p += uk * omega.powi(-((m * k) as i32));
                }
                hermitian_part(&(p / c(q as f64, 0.0)))
            })
            .collect();
        Some(projs)
    };

    if let Some(p) = build(&x) {
        return Ok(p);
    }
    let cl = classify(ch, tol)?;
    let support = cl.invariant_support.expect("ergodic channel has an invariant state");
    let iso = support_isometry(&support, 0.5);
    let xs = iso.adjoint() * &x * &iso;
    let p = build(&xs).ok_or_else(|| {
        Error::NumericalFailure("peripheral eigenoperator is not unitary on the invariant support".into())
    })?;
    Ok(p.iter().map(|pm| &iso * pm * iso.adjoint()).collect())
}

/// Theorem-of-invariant-subspaces test: is `P⋆ K_n(Φ) = P⋆ M_d` for some
/// `n ≤ max_n`, where `K_n = span{K_{i_1} ⋯ K_{i_n}}`?
///
/// Stops early once the sequence of compressed spans revisits a subspace,
/// since it is then periodic and never reaches `P⋆ M_d`.
pub fn mixing_via_kraus(ch: &Channel, max_n: usize, tol: &Tolerances) -> Result<bool> {
    let d = ch.dim();
    let cl = classify(ch, tol)?;
    if !cl.ergodic {
        return Err(Error::NotErgodic(cl.fixed_dim));
    }
    let p = cl.invariant_support.expect("ergodic channel has an invariant state");
    let rank = trace(&p).re.round() as usize;
    let target = rank * d;
    let mut k_n = OperatorSubspace::span(d, ch.kraus(), tol)?;
    let mut history: Vec<OperatorSubspace> = Vec::new();
    for _ in 0..max_n {
        let compressed: Vec<CMat> = k_n.basis().iter().map(|x| &p * x).collect();
        let pk = OperatorSubspace::span(d, &compressed, tol)?;
        if pk.dim() >= target {
            return Ok(true);
        }
        if history.iter().any(|h| h.same_as(&k_n, tol)) {
            return Ok(false);
        }
        let basis = k_n.basis();
        let next: Vec<CMat> = ch
            .kraus()
            .iter()
            .flat_map(|k| basis.iter().map(move |x| k * x))
            .collect();
        history.push(k_n);
        k_n = OperatorSubspace::span(d, &next, tol)?;
    }
    Ok(false)
}

/// Default iteration cap for [`mixing_via_kraus`].
pub fn default_kraus_horizon(d: usize) -> usize {
    2 * d * d + 2
}

/// A certified lower bound `½‖Φ(ψ) − Φ(φ)‖₁ ≤ η^Tr(Φ)` with its witness.
#[derive(Clone, Debug)]
pub struct ContractionEstimate {
    pub lower_bound: f64,
    pub psi: CVec,
    pub phi: CVec,
}

fn pair_distance(ch: &Channel, psi: &CVec, phi: &CVec) -> f64 {
    let diff = ch.apply(&outer(psi, psi)) - ch.apply(&outer(phi, phi));
    0.5 * trace_norm_hermitian(&hermitian_part(&diff))
}

/// Gram–Schmidt `φ` against unit `ψ`.
fn orthogonalize(psi: &CVec, phi: &CVec) -> Option<CVec> {
    let r = phi - psi * psi.dotc(phi);
    (r.norm() > 1e-12).then(|| normalized(&r))
}

/// Best trace distance between outputs of orthogonal pure inputs found by
/// basis pairs, random pairs and a perturbative local search.
pub fn contraction_lower_bound(ch: &Channel, budget: &SearchBudget) -> ContractionEstimate {
    let d = ch.dim();
    let mut best = ContractionEstimate {
        lower_bound: 0.0,
        psi: ket(d, 0),
        phi: ket(d, if d > 1 { 1 } else { 0 }),
    };
    if d < 2 {
        return best;
    }
    best.lower_bound = pair_distance(ch, &best.psi, &best.phi);
    for i in 0..d {
        for j in i + 1..d {
            let (psi, phi) = (ket(d, i), ket(d, j));
            let v = pair_distance(ch, &psi, &phi);
            if v > best.lower_bound {
                best = ContractionEstimate { lower_bound: v, psi, phi };
            }
        }
    }
    for restart in 0..budget.restarts {
        let mut rng = restart_rng(budget.seed, restart);
        let mut psi = random_unit_vector(d, &mut rng);
        let Some(mut phi) = orthogonalize(&psi, &random_unit_vector(d, &mut rng)) else {
            continue;
        };
        let mut value = pair_distance(ch, &psi, &phi);
        let mut step = 0.3;
        for _ in 0..budget.iterations {
            let p2 = normalized(&(&psi + random_unit_vector(d, &mut rng) * c(step, 0.0)));
            let Some(f2) = orthogonalize(&p2, &(&phi + random_unit_vector(d, &mut rng) * c(step, 0.0))) else {
                continue;
            };
            let v = pair_distance(ch, &p2, &f2);
            if v > value {
                (psi, phi, value) = (p2, f2, v);
            } else {
                step = (step * 0.95).max(1e-4);
            }
        }
        if value > best.lower_bound {
            best = ContractionEstimate { lower_bound: value, psi, phi };
        }
    }
    best.lower_bound = best.lower_bound.min(1.0);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::StochasticMatrix;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn cycle3() -> Channel {
        let a = StochasticMatrix::from_rows(&[
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ])
        .unwrap();
        Channel::classical(a).unwrap()
    }

    fn a3() -> Channel {
        let a = StochasticMatrix::from_rows(&[
            vec![0.0, 0.5, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.5, 0.0],
        ])
        .unwrap();
        Channel::classical(a).unwrap()
    }

    #[test]
    fn fixed_space_examples() {
        assert_eq!(fixed_space(&Channel::identity(3), &tol()).unwrap().dim(), 9);
        assert_eq!(fixed_space(&Channel::depolarizing(3), &tol()).unwrap().dim(), 1);
        assert_eq!(fixed_space(&a3(), &tol()).unwrap().dim(), 1);
    }

    #[test]
    fn classification_of_basic_channels() {
        let dep = classify(&Channel::depolarizing(3), &tol()).unwrap();
        assert!(dep.primitive && dep.mixing && dep.ergodic && dep.irreducible && dep.aeb);
        let cyc = classify(&cycle3(), &tol()).unwrap();
        assert!(cyc.ergodic && !cyc.mixing && cyc.aeb);
        assert_eq!(cyc.peripheral_eigenvalues.len(), 3);
        for e in &cyc.peripheral_eigenvalues {
            assert!((e.value().powi(3) - ONE).norm() < 1e-10);
        }
        let id = classify(&Channel::identity(2), &tol()).unwrap();
        assert!(!id.ergodic && !id.aeb);
    }

    #[test]
    fn peripheral_space_examples() {
        let mut u = identity(2);
        u[(1, 1)] = C64::from_polar(1.0, std::f64::consts::PI / 3.0);
        let ch = Channel::unitary(&u).unwrap();
        assert_eq!(peripheral_space(&ch, &tol()).unwrap().dim(), 4);
        assert_eq!(peripheral_space(&Channel::depolarizing(3), &tol()).unwrap().dim(), 1);
        let chi = peripheral_space(&cycle3(), &tol()).unwrap();
        assert_eq!(chi.dim(), 3);
        for i in 0..3 {
            assert!(chi.contains(&unit(3, i, i), &tol()));
        }
    }

    #[test]
    fn unitary_structure() {
        let mut u = identity(2);
        u[(1, 1)] = C64::from_polar(1.0, std::f64::consts::PI / 3.0);
        let ps = peripheral_structure(&Channel::unitary(&u).unwrap(), &tol()).unwrap();
        assert_eq!(ps.blocks, vec![(2, 1)]);
        assert_eq!(ps.permutation, vec![0]);
        // Order 6 exceeds the default denominator cap d² = 4.
        assert_eq!(ps.period, None);
        let wide = Tolerances {
            angle_max_den: Some(6),
            ..tol()
        };
        let ps = peripheral_structure(&Channel::unitary(&u).unwrap(), &wide).unwrap();
        assert_eq!(ps.period, Some(6));
    }

    #[test]
    fn cycle_structure() {
        let ps = peripheral_structure(&cycle3(), &tol()).unwrap();
        assert_eq!(ps.blocks, vec![(1, 1); 3]);
        assert_eq!(ps.period, Some(3));
        assert_eq!(ps.permutation_order(), 3);
        let (c0, q0) = capacities_of(&ps);
        assert!((c0 - 3f64.log2()).abs() < 1e-15 && q0 == 0.0);
    }

    #[test]
    fn depolarizing_capacities_vanish() {
        assert_eq!(asymptotic_capacities(&Channel::depolarizing(2), &tol()).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn rationalization() {
        let pi = std::f64::consts::PI;
        assert_eq!(rational_order(0.0, 9), Some(1));
        assert_eq!(rational_order(2.0 * pi / 3.0, 9), Some(3));
        assert_eq!(rational_order(-2.0 * pi / 3.0, 9), Some(3));
        assert_eq!(rational_order(pi, 4), Some(2));
        assert_eq!(rational_order(2.0 * pi * 4.0 / 7.0, 49), Some(7));
        assert_eq!(rational_order(1.0, 9), None);
    }

    #[test]
    fn cycle_projections() {
        let p = ergodic_cycle_projections(&cycle3(), &tol()).unwrap();
        assert_eq!(p.len(), 3);
        let ch = cycle3();
        let adj = ch.adjoint();
        for m in 0..3 {
            assert!((trace(&p[m]).re - 1.0).abs() < 1e-10);
            assert!((adj.apply(&p[(m + 1) % 3]) - &p[m]).norm() < 1e-8);
        }
        assert_eq!(ergodic_cycle_projections(&Channel::depolarizing(2), &tol()).unwrap().len(), 1);
        assert_eq!(ergodic_cycle_projections(&a3(), &tol()).unwrap().len(), 1);
        assert!(matches!(
            ergodic_cycle_projections(&Channel::identity(2), &tol()),
            Err(Error::NotErgodic(4))
        ));
    }

    #[test]
    fn cycle_projections_with_leaking_transient() {
        // |2⟩ decays evenly into both classes of a 2-cycle on {|0⟩, |1⟩}.
        let s = 0.5f64.sqrt();
        let kraus = vec![unit(3, 1, 0), unit(3, 0, 1), unit(3, 0, 2).scale(s), unit(3, 1, 2).scale(s)];
        let ch = Channel::from_kraus(kraus).unwrap();
        let p = ergodic_cycle_projections(&ch, &tol()).unwrap();
        assert_eq!(p.len(), 2);
        for m in 0..2 {
            let out = ch.apply(&p[m]);
            assert!((trace(&(&out * &p[(m + 1) % 2])).re - trace(&p[m]).re).abs() < 1e-10);
        }
    }

    #[test]
    fn kraus_mixing_test() {
        assert!(mixing_via_kraus(&Channel::depolarizing(2), 10, &tol()).unwrap());
        assert!(!mixing_via_kraus(&cycle3(), 20, &tol()).unwrap());
        assert!(mixing_via_kraus(&a3(), 20, &tol()).unwrap());
    }

    #[test]
    fn contraction_examples() {
        let b = SearchBudget {
            restarts: 4,
            iterations: 20,
            seed: 1,
        };
        assert!((contraction_lower_bound(&Channel::identity(2), &b).lower_bound - 1.0).abs() < 1e-12);
        assert!(contraction_lower_bound(&Channel::depolarizing(3), &b).lower_bound < 1e-12);
        assert!((contraction_lower_bound(&cycle3(), &b).lower_bound - 1.0).abs() < 1e-12);
    }
}
