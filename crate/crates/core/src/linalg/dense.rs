//! Dense complex matrix helpers on top of `nalgebra`.
//!
//! Operators are vectorized by stacking columns, which is the native storage
//! order of `DMatrix`, so `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Builds a complex matrix from real row-major data.
pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMat {
    assert_eq!(data.len(), rows * cols);
    CMat::from_fn(rows, cols, |i, j| c(data[i * cols + j], 0.0))
}

pub fn to_complex(a: &RMat) -> CMat {
    a.map(|x| c(x, 0.0))
}

/// Matrix unit `|i⟩⟨j|` in `M_d`.
pub fn unit(d: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    m[(i, j)] = ONE;
    m
}

pub fn ket(d: usize, i: usize) -> CVec {
    let mut v = CVec::zeros(d);
    v[i] = ONE;
    v
}

/// `|x⟩⟨y|`.
pub fn outer(x: &CVec, y: &CVec) -> CMat {
    x * y.adjoint()
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn vectorize(x: &CMat) -> CVec {
    CVec::from_column_slice(x.as_slice())
}

pub fn unvectorize(v: &[C64], d: usize) -> CMat {
    CMat::from_column_slice(d, d, v)
}

/// Hilbert–Schmidt inner product `Tr(a† b)`.
pub fn hs_inner(a: &CMat, b: &CMat) -> C64 {
    a.dotc(b)
}

pub fn trace(a: &CMat) -> C64 {
    a.trace()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

pub fn anti_hermitian_part(a: &CMat) -> CMat {
    (a - a.adjoint()) * c(0.0, -0.5)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn all_finite(a: &CMat) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn check_finite(a: &CMat, what: &str) -> Result<()> {
    if all_finite(a) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues in ascending order.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

pub fn herm_eig(h: &CMat) -> HermEig {
    let n = h.nrows();
    if n == 0 {
        return HermEig {
            values: vec![],
            vectors: CMat::zeros(0, 0),
        };
    }
    let se = hermitian_part(h).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let vectors = CMat::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);
    HermEig { values, vectors }
}

/// Eigendecomposition of a real symmetric matrix, ascending.
pub fn sym_eig(h: &RMat) -> (Vec<f64>, RMat) {
    let n = h.nrows();
    let sym = (h + h.transpose()) * 0.5;
    let se = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let vectors = RMat::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian(h: &CMat) -> f64 {
    herm_eig(h).values.iter().map(|v| v.abs()).sum()
}

/// Positive and negative parts `h = h₊ − h₋` of a Hermitian matrix.
pub fn jordan_parts(h: &CMat) -> (CMat, CMat) {
    let e = herm_eig(h);
    let n = h.nrows();
    let mut pos = CMat::zeros(n, n);
    let mut neg = CMat::zeros(n, n);
    for (k, &v) in e.values.iter().enumerate() {
        let col = e.vectors.column(k).into_owned();
        let p = &col * col.adjoint();
        if v > 0.0 {
            pos += p.scale(v);
        } else if v < 0.0 {
            neg += p.scale(-v);
        }
    }
    (pos, neg)
}

/// Orthonormal columns spanning the eigenvectors of a PSD matrix whose
/// eigenvalues exceed `rel` times the largest one.
pub fn support_isometry(rho: &CMat, rel: f64) -> CMat {
    let e = herm_eig(rho);
    let n = rho.nrows();
    let top = e.values.last().copied().unwrap_or(0.0).max(0.0);
    let keep: Vec<usize> = (0..n).filter(|&k| top > 0.0 && e.values[k] > rel * top).collect();
    CMat::from_fn(n, keep.len(), |i, j| e.vectors[(i, keep[j])])
}

/// Orthonormal basis, as columns, of the numerical null space of `m`.
///
/// Singular values at most `rel_tol · max(1, σ_max)` count as zero.
pub fn null_space(m: &CMat, rel_tol: f64) -> CMat {
    let (v, sv) = right_singular(m);
    let n = m.ncols();
    let cut = rel_tol * sv.first().copied().unwrap_or(0.0).max(1.0);
    let idx: Vec<usize> = (0..n).filter(|&k| sv[k] <= cut).collect();
    CMat::from_fn(n, idx.len(), |i, j| v[(i, idx[j])])
}

/// The `k` right singular vectors with smallest singular values, plus the
/// largest of those `k` singular values.
pub fn smallest_right_singular(m: &CMat, k: usize) -> (CMat, f64) {
    let (v, sv) = right_singular(m);
    let n = m.ncols();
    let k = k.min(n);
    let idx: Vec<usize> = (n - k..n).collect();
    let worst = idx.iter().map(|&i| sv[i]).fold(0.0, f64::max);
    (CMat::from_fn(n, k, |i, j| v[(i, idx[j])]), worst)
}

/// Full `V` (n×n) and all n singular values in descending order. When `m`
/// has fewer rows than columns the trailing values are zero.
fn right_singular(m: &CMat) -> (CMat, Vec<f64>) {
    let (w, v) = jacobi_orthogonalize(m.clone());
    let norms = column_norms(&w);
    let order = descending(&norms);
    let vs = CMat::from_fn(v.nrows(), order.len(), |i, j| v[(i, order[j])]);
    (vs, order.iter().map(|&k| norms[k]).collect())
}

/// Thin singular value decomposition `m = U diag(σ) V†`.
///
/// `singular_values` has `min(rows, cols)` entries in descending order.
/// Columns of `u` belonging to zero singular values are zero.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMat,
    pub singular_values: Vec<f64>,
    pub v: CMat,
}

/// One-sided Jacobi SVD. Slower than bidiagonalization but accurate for
/// rank-deficient input, where `nalgebra`'s complex SVD is not.
pub fn svd(m: &CMat) -> Svd {
    if m.nrows() < m.ncols() {
        let t = svd(&m.adjoint());
        return Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    let (w, v) = jacobi_orthogonalize(m.clone());
    let norms = column_norms(&w);
    let order = descending(&norms);
    let mut u = CMat::zeros(m.nrows(), order.len());
    for (j, &k) in order.iter().enumerate() {
        if norms[k] > 0.0 {
            u.set_column(j, &w.column(k).unscale(norms[k]));
        }
    }
    Svd {
        u,
        singular_values: order.iter().map(|&k| norms[k]).collect(),
        v: CMat::from_fn(v.nrows(), order.len(), |i, j| v[(i, order[j])]),
    }
}

fn column_norms(w: &CMat) -> Vec<f64> {
    w.column_iter().map(|col| col.norm()).collect()
}

fn descending(x: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[b].total_cmp(&x[a]));
    idx
}

/// Rotates column pairs of `a` until all columns are mutually orthogonal.
/// Returns `(a V, V)` with `V` unitary.
fn jacobi_orthogonalize(mut a: CMat) -> (CMat, CMat) {
    const MAX_SWEEPS: usize = 100;
    let (r, n) = a.shape();
    let mut v = CMat::identity(n, n);
    let eps = f64::EPSILON * (r.max(1) as f64).sqrt();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                for k in 0..r {
                    let (x, y) = (a[(k, i)], a[(k, j)]);
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rephase column j so that the inner product is real, then
                // apply the real rotation that zeroes it.
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate(&mut a, i, j, phase, cs, sn);
                rotate(&mut v, i, j, phase, cs, sn);
            }
        }
        if !rotated {
            break;
        }
    }
    (a, v)
}

fn rotate(m: &mut CMat, i: usize, j: usize, phase: C64, cs: f64, sn: f64) {
    for k in 0..m.nrows() {
        let x = m[(k, i)];
        let y = m[(k, j)] * phase;
        m[(k, i)] = x * cs - y * sn;
        m[(k, j)] = x * sn + y * cs;
    }
}

/// Eigenvalues of a general complex square matrix from its Schur form.
pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(vec![]);
    }
    let max_iter = 10_000 * n.max(10);
    // nalgebra's shifted QR can cycle on highly structured
    // inputs; a unitary similarity keeps the spectrum and breaks the cycle.
    for attempt in 0..=SCHUR_RETRIES {
        let a = if attempt == 0 {
            m.clone()
        } else {
            let h = householder(n, attempt);
            &h * m * &h
        };
        if let Some(schur) = nalgebra::Schur::try_new(a, f64::EPSILON, max_iter) {
            let (_, t) = schur.unpack();
            return Ok((0..n).map(|i| t[(i, i)]).collect());
        }
    }
    Err(Error::NumericalFailure("Schur iteration did not converge".into()))
}

const SCHUR_RETRIES: usize = 8;

/// A fixed Householder reflector `I − 2vv*`, distinct for each `seed`.
fn householder(n: usize, seed: usize) -> CMat {
    let v = CVec::from_fn(n, |k, _| {
        let t = (seed * 7919 + k * 104_729) as f64;
        C64::new((0.618_033_988_7 * t).fract() - 0.5, (0.414_213_562_3 * t).fract() - 0.5)
    });
    let v = v.unscale(v.norm());
    CMat::identity(n, n) - (&v * v.adjoint()).scale(2.0)
}

/// Principal square root of a PSD matrix (negative eigenvalues clipped).
pub fn psd_sqrt(h: &CMat) -> CMat {
    let e = herm_eig(h);
    let n = h.nrows();
    let mut out = CMat::zeros(n, n);
    for (k, &v) in e.values.iter().enumerate() {
        if v > 0.0 {
            let col = e.vectors.column(k).into_owned();
            out += (&col * col.adjoint()).scale(v.sqrt());
        }
    }
    out
}

/// Inverse square root of a positive definite matrix.
pub fn pd_inv_sqrt(h: &CMat) -> CMat {
    let e = herm_eig(h);
    let n = h.nrows();
    let mut out = CMat::zeros(n, n);
    for (k, &v) in e.values.iter().enumerate() {
        let col = e.vectors.column(k).into_owned();
        out += (&col * col.adjoint()).scale(1.0 / v.max(f64::MIN_POSITIVE).sqrt());
    }
    out
}

/// Matrix power by repeated squaring.
pub fn mat_pow(m: &CMat, mut n: u64) -> CMat {
    let mut result = CMat::identity(m.nrows(), m.ncols());
    let mut base = m.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = &result * &base;
        }
        base = &base * &base;
        n >>= 1;
    }
    result
}

/// Normalizes a vector; zero vectors are returned unchanged.
pub fn normalized(v: &CVec) -> CVec {
    let n = v.norm();
    if n > 0.0 {
        v.unscale(n)
    } else {
        v.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectorization_matches_kronecker_identity() {
        let a = CMat::from_fn(2, 2, |i, j| c(i as f64 + 1.0, j as f64 - 0.5));
        let b = CMat::from_fn(2, 2, |i, j| c((i * j) as f64, 1.0));
        let x = CMat::from_fn(2, 2, |i, j| c(i as f64 - j as f64, 0.25));
        let lhs = vectorize(&(&a * &x * &b));
        let rhs = kron(&b.transpose(), &a) * vectorize(&x);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn null_space_of_rank_one() {
        let m = real_matrix(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        let ns = null_space(&m, 1e-10);
        assert_eq!(ns.ncols(), 2);
        assert!((&m * &ns).norm() < 1e-12);
    }

    fn low_rank(rows: usize, cols: usize, rank: usize) -> CMat {
        let a = CMat::from_fn(rows, rank, |i, j| {
            c(((i * 7 + j * 3) % 11) as f64 - 5.0, ((i * 5 + j) % 7) as f64 - 3.0)
        });
        let b = CMat::from_fn(rank, cols, |i, j| {
            c(((i * 3 + j * 5) % 13) as f64 - 6.0, ((i + j * 2) % 5) as f64 - 2.0)
        });
        a * b
    }

    #[test]
    fn svd_reconstructs_rank_deficient_matrices() {
        for (r, n) in [(40, 16), (64, 64), (49, 49), (16, 17), (9, 20)] {
            let m = low_rank(r, n, 5);
            let s = svd(&m);
            let sig = CMat::from_diagonal(&CVec::from_iterator(
                s.singular_values.len(),
                s.singular_values.iter().map(|&x| c(x, 0.0)),
            ));
            let err = (&s.u * sig * s.v.adjoint() - &m).norm();
            assert!(err < 1e-10 * m.norm(), "{r}x{n}: {err:e}");
            assert!(s.singular_values[5] < 1e-10 * s.singular_values[0]);
            assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
            let vv = s.v.adjoint() * &s.v;
            assert!((vv - CMat::identity(s.v.ncols(), s.v.ncols())).norm() < 1e-12);
        }
    }

    #[test]
    fn null_space_of_low_rank_square() {
        let m = low_rank(30, 30, 4);
        let ns = null_space(&m, 1e-10);
        assert_eq!(ns.ncols(), 26);
        assert!((&m * &ns).norm() < 1e-9);
    }

    #[test]
    fn jordan_parts_reconstruct() {
        let h = real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let (p, n) = jordan_parts(&h);
        assert!((&p - &n - &h).norm() < 1e-12);
        assert!((trace(&p).re - 1.0).abs() < 1e-12);
        assert!((trace_norm_hermitian(&h) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn schur_eigenvalues_of_rotation() {
        let m = real_matrix(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let mut ev = eigenvalues(&m).unwrap();
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-12);
    }
}
