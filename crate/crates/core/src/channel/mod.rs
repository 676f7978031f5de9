//! Quantum channels in Kraus form, structured channel families and the
//! operations that build new channels from old ones.

mod structured;

use std::sync::OnceLock;

pub use structured::{ChannelKind, CducParams, DucParams, StochasticMatrix};

use crate::error::{Error, Result};
use crate::linalg::*;

/// Tolerance for the structured-kind consistency check.
const KIND_EPS: f64 = 1e-9;

/// A completely positive map `X ↦ Σ K X K†` between matrix algebras.
#[derive(Clone, Debug)]
pub struct CpMap {
    input_dim: usize,
    output_dim: usize,
    kraus: Vec<CMat>,
}

impl CpMap {
    pub fn new(input_dim: usize, output_dim: usize, kraus: Vec<CMat>) -> Self {
        CpMap {
            input_dim,
            output_dim,
            kraus,
        }
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn apply(&self, x: &CMat) -> CMat {
        apply_kraus(&self.kraus, self.output_dim, x)
    }

    pub fn transfer_matrix(&self) -> CMat {
        transfer_of(&self.kraus, self.input_dim, self.output_dim)
    }

    /// `‖Φ(1) − 1‖` for square maps.
    pub fn unitality_defect(&self) -> f64 {
        (self.apply(&identity(self.input_dim)) - identity(self.output_dim)).norm()
    }
}

fn apply_kraus(kraus: &[CMat], out: usize, x: &CMat) -> CMat {
    let mut y = CMat::zeros(out, out);
    for k in kraus {
        y += k * x * k.adjoint();
    }
    y
}

fn transfer_of(kraus: &[CMat], din: usize, dout: usize) -> CMat {
    let mut t = CMat::zeros(dout * dout, din * din);
    for k in kraus {
        t += kron(&k.map(|z| z.conj()), k);
    }
    t
}

/// Row-major flattening: entry `(a, i)` goes to `a·d_in + i`.
fn flatten_row_major(k: &CMat) -> CVec {
    let (r, c) = k.shape();
    CVec::from_fn(r * c, |idx, _| k[(idx / c, idx % c)])
}

fn unflatten_row_major(v: &[C64], rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |a, i| v[a * cols + i])
}

/// Linearly independent Kraus operators with the same action, obtained from
/// the singular value decomposition of the stacked Kraus vectors.
fn canonical_kraus(kraus: &[CMat], din: usize, dout: usize, tol: &Tolerances) -> Vec<CMat> {
    if kraus.is_empty() {
        return vec![];
    }
    let w = CMat::from_fn(din * dout, kraus.len(), |i, j| flatten_row_major(&kraus[j])[i]);
    let svd = svd(&w);
    let u = &svd.u;
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let mut out = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > tol.rank_eps * smax && s > 1e-14 {
            let col: Vec<C64> = u.column(k).iter().map(|z| z * s).collect();
            out.push(unflatten_row_major(&col, dout, din));
        }
    }
    out
}

/// A validated quantum channel (CPTP map).
///
/// The original Kraus list is retained; all computations use a linearly
/// independent Kraus set of at most `d_in · d_out` operators.
#[derive(Clone, Debug)]
pub struct Channel {
    input_dim: usize,
    output_dim: usize,
    original: Vec<CMat>,
    kraus: Vec<CMat>,
    kind: ChannelKind,
    choi: OnceLock<CMat>,
    transfer: OnceLock<CMat>,
}

impl Channel {
    /// Channel on `M_d` from a list of equally shaped square Kraus operators.
    pub fn from_kraus(kraus: Vec<CMat>) -> Result<Channel> {
        Self::from_kraus_with(kraus, &Tolerances::default())
    }

    pub fn from_kraus_with(kraus: Vec<CMat>, tol: &Tolerances) -> Result<Channel> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::ShapeMismatch("empty Kraus list".into()))?;
        let d = first.nrows();
        if !first.is_square() || d == 0 {
            return Err(Error::ShapeMismatch("Kraus operators must be square".into()));
        }
        Self::rectangular(d, d, kraus, tol)
    }

    /// Channel from `d_in` to `d_out` dimensions.
    fn rectangular(din: usize, dout: usize, kraus: Vec<CMat>, tol: &Tolerances) -> Result<Channel> {
        for k in &kraus {
            if k.shape() != (dout, din) {
                return Err(Error::ShapeMismatch(format!(
                    "Kraus operator has shape {}x{}, expected {dout}x{din}",
                    k.nrows(),
                    k.ncols()
                )));
            }
            check_finite(k, "Kraus operator")?;
        }
        let mut s = CMat::zeros(din, din);
        for k in &kraus {
            s += k.adjoint() * k;
        }
        let defect = (s - identity(din)).norm();
        if defect > tol.subspace_eps {
            return Err(Error::NotTracePreserving(defect));
        }
        let minimal = canonical_kraus(&kraus, din, dout, tol);
        Ok(Channel {
            input_dim: din,
            output_dim: dout,
            original: kraus,
            kraus: minimal,
            kind: ChannelKind::Generic,
            choi: OnceLock::new(),
            transfer: OnceLock::new(),
        })
    }

    /// Channel on `M_d` from its Choi matrix `Σ Φ(E_ij) ⊗ E_ij`.
    pub fn from_choi(j: &CMat, tol: &Tolerances) -> Result<Channel> {
        let n = j.nrows();
        let d = (n as f64).sqrt().round() as usize;
        if !j.is_square() || d * d != n || d == 0 {
            return Err(Error::ShapeMismatch(format!(
                "Choi matrix must be d²×d², got {}x{}",
                j.nrows(),
                j.ncols()
            )));
        }
        check_finite(j, "Choi matrix")?;
        let skew = (j - j.adjoint()).norm();
        if skew > tol.subspace_eps * j.norm().max(1.0) {
            return Err(Error::InvalidParams(format!("Choi matrix is not Hermitian (deviation {skew:.3e})")));
        }
        let e = herm_eig(j);
        let top = e.values.last().copied().unwrap_or(0.0).max(0.0);
        let low = e.values[0];
        if low < -(tol.rank_eps * top).max(1e-12) {
            return Err(Error::NotPsd(low));
        }
        let mut pt = CMat::zeros(d, d);
        for a in 0..d {
            for i in 0..d {
                for k in 0..d {
                    pt[(i, k)] += j[(a * d + i, a * d + k)];
                }
            }
        }
        let defect = (pt - identity(d)).norm();
        if defect > tol.subspace_eps {
            return Err(Error::PartialTraceNotIdentity(defect));
        }
        let mut kraus = Vec::new();
        for (k, &v) in e.values.iter().enumerate() {
            if v > tol.rank_eps * top {
                let col: Vec<C64> = e.vectors.column(k).iter().map(|z| z * v.sqrt()).collect();
                kraus.push(unflatten_row_major(&col, d, d));
            }
        }
        Self::rectangular(d, d, kraus, tol)
    }

    /// `Φ_A(X) = Σ A_ij X_jj |i⟩⟨i|` with Kraus operators `√A_ij |i⟩⟨j|`.
    pub fn classical(a: StochasticMatrix) -> Result<Channel> {
        let d = a.dim();
        let mut kraus = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let v = a.get(i, j);
                if v > 0.0 {
                    kraus.push(unit(d, i, j).scale(v.sqrt()));
                }
            }
        }
        let mut ch = Self::from_kraus(kraus)?;
        ch.set_kind(ChannelKind::Classical(a))?;
        Ok(ch)
    }

    pub fn cduc(p: CducParams) -> Result<Channel> {
        Self::structured(ChannelKind::Cduc(p))
    }

    pub fn duc(p: DucParams) -> Result<Channel> {
        Self::structured(ChannelKind::Duc(p))
    }

    fn structured(kind: ChannelKind) -> Result<Channel> {
        let d = kind.stochastic().expect("structured kind").dim();
        let mut j = CMat::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                let out = kind.apply(&unit(d, a, b)).expect("structured kind");
                // Φ(E_ab) ⊗ E_ab
                for r in 0..d {
                    for s in 0..d {
                        j[(r * d + a, s * d + b)] = out[(r, s)];
                    }
                }
            }
        }
        let mut ch = Self::from_choi(&j, &Tolerances::default())?;
        ch.set_kind(kind)?;
        Ok(ch)
    }

    /// Attaches a structured kind after checking it reproduces the Kraus action.
    fn set_kind(&mut self, kind: ChannelKind) -> Result<()> {
        let d = self.input_dim;
        if let Some(a) = kind.stochastic() {
            if a.dim() != d || self.output_dim != d {
                return Err(Error::DimensionMismatch { left: a.dim(), right: d });
            }
            for i in 0..d {
                for j in 0..d {
                    let x = unit(d, i, j);
                    let expected = kind.apply(&x).expect("structured kind");
                    let err = (self.apply(&x) - expected).norm();
                    if err > KIND_EPS {
                        return Err(Error::InvalidParams(format!(
                            "{} parameters disagree with the Kraus action on E_{i}{j} by {err:.3e}",
                            kind.name()
                        )));
                    }
                }
            }
        }
        self.kind = kind;
        Ok(())
    }

    pub fn identity(d: usize) -> Channel {
        Self::from_kraus(vec![identity(d)]).expect("identity is a channel")
    }

    /// `X ↦ U X U†`.
    pub fn unitary(u: &CMat) -> Result<Channel> {
        Self::from_kraus(vec![u.clone()])
    }

    /// `X ↦ Tr(X) ρ`.
    pub fn replacement(rho: &CMat) -> Result<Channel> {
        let d = rho.nrows();
        let e = herm_eig(rho);
        let mut kraus = Vec::new();
        for (k, &v) in e.values.iter().enumerate() {
            if v > 0.0 {
                let r = e.vectors.column(k).into_owned();
                for j in 0..d {
                    kraus.push(outer(&r, &ket(d, j)).scale(v.sqrt()));
                }
            }
        }
        Self::from_kraus(kraus)
    }

    /// Completely depolarizing channel onto `1/d`.
    pub fn depolarizing(d: usize) -> Channel {
        let s = 1.0 / (d as f64).sqrt();
        let kraus = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| unit(d, i, j).scale(s))
            .collect();
        Self::from_kraus(kraus).expect("depolarizing is a channel")
    }

    pub fn dim(&self) -> usize {
        self.input_dim
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn is_square(&self) -> bool {
        self.input_dim == self.output_dim
    }

    /// Linearly independent Kraus operators.
    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    /// Kraus operators as supplied.
    pub fn original_kraus(&self) -> &[CMat] {
        &self.original
    }

    pub fn kraus_rank(&self) -> usize {
        self.kraus.len()
    }

    pub fn kind(&self) -> &ChannelKind {
        &self.kind
    }

    pub fn stochastic(&self) -> Option<&StochasticMatrix> {
        self.kind.stochastic()
    }

    /// The same map with its structured kind forgotten.
    pub fn as_generic(&self) -> Channel {
        let mut ch = self.clone();
        ch.kind = ChannelKind::Generic;
        ch
    }

    pub fn apply(&self, x: &CMat) -> CMat {
        apply_kraus(&self.kraus, self.output_dim, x)
    }

    /// `Φ*(Y) = Σ K† Y K`.
    pub fn apply_adjoint(&self, y: &CMat) -> CMat {
        let mut x = CMat::zeros(self.input_dim, self.input_dim);
        for k in &self.kraus {
            x += k.adjoint() * y * k;
        }
        x
    }

    /// Choi matrix `Σ Φ(E_ij) ⊗ E_ij`, computed once.
    pub fn choi(&self) -> &CMat {
        self.choi.get_or_init(|| {
            let n = self.input_dim * self.output_dim;
            let mut j = CMat::zeros(n, n);
            for k in &self.kraus {
                let w = flatten_row_major(k);
                j += &w * w.adjoint();
            }
            j
        })
    }

    /// Matrix `T` with `T vec(X) = vec(Φ(X))` (column stacking), computed once.
    pub fn transfer_matrix(&self) -> &CMat {
        self.transfer
            .get_or_init(|| transfer_of(&self.kraus, self.input_dim, self.output_dim))
    }

    /// Adjoint map, unital and completely positive.
    pub fn adjoint(&self) -> CpMap {
        CpMap::new(
            self.output_dim,
            self.input_dim,
            self.kraus.iter().map(|k| k.adjoint()).collect(),
        )
    }

    pub fn as_cp_map(&self) -> CpMap {
        CpMap::new(self.input_dim, self.output_dim, self.kraus.clone())
    }

    /// `‖Φ(1) − 1‖`.
    pub fn unitality_defect(&self) -> f64 {
        self.as_cp_map().unitality_defect()
    }

    pub fn is_unital(&self, tol: &Tolerances) -> bool {
        self.is_square() && self.unitality_defect() <= tol.subspace_eps
    }

    /// `self ∘ other`, Kraus set recompressed.
    pub fn compose(&self, other: &Channel) -> Result<Channel> {
        if other.output_dim != self.input_dim {
            return Err(Error::DimensionMismatch {
                left: self.input_dim,
                right: other.output_dim,
            });
        }
        let tol = Tolerances::default();
        let mut products = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                products.push(a * b);
            }
        }
        let minimal = canonical_kraus(&products, other.input_dim, self.output_dim, &tol);
        let mut ch = Self::rectangular(other.input_dim, self.output_dim, minimal, &tol)?;
        let kind = self.kind.compose(&other.kind);
        if !matches!(kind, ChannelKind::Generic) {
            ch.set_kind(kind)?;
        }
        Ok(ch)
    }

    /// `Φⁿ` by repeated squaring; `n = 0` gives the identity channel.
    pub fn power(&self, n: usize) -> Result<Channel> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                left: self.input_dim,
                right: self.output_dim,
            });
        }
        let mut result: Option<Channel> = None;
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.compose(&base)?,
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.compose(&base)?;
            }
        }
        Ok(result.unwrap_or_else(|| Channel::identity(self.input_dim)))
    }

    /// Complementary channel `X ↦ Σ_ij Tr(K_i X K_j†) |i⟩⟨j|` into `M_p`,
    /// `p` the Kraus rank.
    ///
    /// Its adjoint is `Y ↦ Σ_ij Y_ij K_i† K_j`, whose range is `span{K_i† K_j}`.
    pub fn complementary(&self) -> Result<Channel> {
        let p = self.kraus.len();
        let (din, dout) = (self.input_dim, self.output_dim);
        let kraus: Vec<CMat> = (0..dout)
            .map(|row| CMat::from_fn(p, din, |i, col| self.kraus[i][(row, col)]))
            .collect();
        Self::rectangular(din, p, kraus, &Tolerances::default())
    }

    /// `X ↦ U Φ(U† X U) U†`; the structured kind is dropped.
    pub fn conjugated(&self, u: &CMat) -> Result<Channel> {
        let kraus = self.kraus.iter().map(|k| u * k * u.adjoint()).collect();
        Self::from_kraus(kraus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn a3() -> StochasticMatrix {
        StochasticMatrix::from_rows(&[
            vec![0.0, 0.5, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.5, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn identity_and_depolarizing() {
        let id = Channel::identity(3);
        assert_eq!(id.kraus_rank(), 1);
        let x = CMat::from_fn(3, 3, |i, j| c(i as f64, j as f64));
        assert!((id.apply(&x) - &x).norm() < 1e-12);
        let dep = Channel::depolarizing(3);
        assert_eq!(dep.kraus_rank(), 9);
        let y = dep.apply(&unit(3, 0, 0));
        assert!((y - identity(3).scale(1.0 / 3.0)).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_trace_preserving() {
        let err = Channel::from_kraus(vec![identity(2).scale(0.5)]).unwrap_err();
        assert!(matches!(err, Error::NotTracePreserving(_)));
    }

    #[test]
    fn choi_round_trip() {
        let ch = Channel::classical(a3()).unwrap();
        let back = Channel::from_choi(ch.choi(), &tol()).unwrap();
        assert!((back.choi() - ch.choi()).norm() < 1e-10);
        for i in 0..3 {
            for j in 0..3 {
                let x = unit(3, i, j);
                assert!((back.apply(&x) - ch.apply(&x)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn choi_of_identity_gives_single_kraus() {
        let ch = Channel::from_choi(Channel::identity(2).choi(), &tol()).unwrap();
        assert_eq!(ch.kraus_rank(), 1);
    }

    #[test]
    fn negative_choi_eigenvalue_rejected() {
        let mut j = Channel::depolarizing(2).choi().clone();
        // Subtract 1e-3 along a unit vector orthogonal to nothing in particular.
        let v = normalized(&CVec::from_vec(vec![ONE, ZERO, ZERO, ONE.scale(-1.0)]));
        let shift = &v * v.adjoint();
        let lam = (v.adjoint() * &j * &v)[(0, 0)].re;
        j -= shift.scale(lam + 1e-3);
        assert!(matches!(Channel::from_choi(&j, &tol()), Err(Error::NotPsd(_))));
    }

    #[test]
    fn negative_stochastic_entry_rejected() {
        let err = StochasticMatrix::from_rows(&[vec![1.5, 0.0], vec![-0.5, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::InvalidParams(_)));
    }

    #[test]
    fn identity_stochastic_matrix_gives_dephasing() {
        let ch = Channel::classical(StochasticMatrix::new(RMat::identity(2, 2)).unwrap()).unwrap();
        let x = CMat::from_fn(2, 2, |i, j| c(1.0 + i as f64, j as f64));
        let y = ch.apply(&x);
        assert!((y[(0, 1)]).norm() < 1e-15 && (y[(0, 0)] - x[(0, 0)]).norm() < 1e-15);
    }

    #[test]
    fn square_of_classical_channel_acts_as_square_matrix() {
        let a = a3();
        let ch = Channel::classical(a.clone()).unwrap().power(2).unwrap();
        let a2 = a.matrix() * a.matrix();
        for j in 0..3 {
            let out = ch.apply(&unit(3, j, j));
            for i in 0..3 {
                assert!((out[(i, i)].re - a2[(i, j)]).abs() < 1e-12);
            }
        }
        assert!(matches!(ch.kind(), ChannelKind::Classical(_)));
    }

    #[test]
    fn power_of_identity_is_identity() {
        let p = Channel::identity(3).power(7).unwrap();
        assert_eq!(p.kraus_rank(), 1);
        let x = CMat::from_fn(3, 3, |i, j| c(i as f64 - 1.0, 2.0 * j as f64));
        assert!((p.apply(&x) - x).norm() < 1e-12);
    }

    #[test]
    fn transfer_matrix_of_phase_flip() {
        let mut u = identity(2);
        u[(1, 1)] = c(-1.0, 0.0);
        let ch = Channel::unitary(&u).unwrap();
        let mut ev: Vec<f64> = eigenvalues(ch.transfer_matrix()).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        for (got, want) in ev.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let x = CMat::from_fn(2, 2, |i, j| c(i as f64 + 0.5, j as f64));
        let lhs = ch.transfer_matrix() * vectorize(&x);
        assert!((lhs - vectorize(&ch.apply(&x))).norm() < 1e-12);
    }

    #[test]
    fn adjoint_of_replacement_channel() {
        let rho = real_matrix(2, 2, &[0.7, 0.1, 0.1, 0.3]);
        let ch = Channel::replacement(&rho).unwrap();
        let adj = ch.adjoint();
        let x = real_matrix(2, 2, &[1.0, 2.0, 2.0, -1.0]);
        let expected = identity(2) * trace(&(&rho * &x));
        assert!((adj.apply(&x) - expected).norm() < 1e-12);
        assert!(adj.unitality_defect() < 1e-12);
    }

    #[test]
    fn cduc_with_diagonal_b_is_classical() {
        let a = a3();
        let b = CMat::zeros(3, 3);
        let ch = Channel::cduc(CducParams::new(a.clone(), b).unwrap()).unwrap();
        let cl = Channel::classical(a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let x = unit(3, i, j);
                assert!((ch.apply(&x) - cl.apply(&x)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn invalid_duc_parameters_reported() {
        let a = StochasticMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let mut cm = CMat::zeros(2, 2);
        cm[(0, 1)] = c(0.6, 0.0);
        cm[(1, 0)] = c(0.6, 0.0);
        let err = DucParams::new(a, cm).unwrap_err();
        assert!(err.to_string().contains("A[0][1]*A[1][0]"));
    }

    #[test]
    fn complementary_of_unitary_is_trace() {
        let theta = 0.4f64;
        let u = CMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) | (1, 1) => c(theta.cos(), 0.0),
            (0, 1) => c(-theta.sin(), 0.0),
            _ => c(theta.sin(), 0.0),
        });
        let comp = Channel::unitary(&u).unwrap().complementary().unwrap();
        assert_eq!(comp.output_dim(), 1);
        let x = real_matrix(2, 2, &[0.3, 0.2, 0.2, 0.7]);
        assert!((comp.apply(&x)[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn complementary_of_depolarizing_has_output_dim_d_squared() {
        let comp = Channel::depolarizing(3).complementary().unwrap();
        assert_eq!(comp.output_dim(), 9);
    }
}
