use super::dense::*;
use super::Tolerances;
use crate::error::{Error, Result};

/// Absolute floor below which spanning vectors are treated as zero.
const ABS_FLOOR: f64 = 1e-13;

/// A subspace of `M_d` with an orthonormal Hilbert–Schmidt basis.
///
/// The basis is stored as the columns of a `d² × k` frame of vectorized
/// matrices.
#[derive(Clone, Debug)]
pub struct OperatorSubspace {
    d: usize,
    frame: CMat,
}

impl OperatorSubspace {
    pub fn zero(d: usize) -> Self {
        OperatorSubspace {
            d,
            frame: CMat::zeros(d * d, 0),
        }
    }

    pub fn full(d: usize) -> Self {
        OperatorSubspace {
            d,
            frame: CMat::identity(d * d, d * d),
        }
    }

    /// Wraps a frame whose columns are already orthonormal.
    pub(crate) fn from_orthonormal_frame(d: usize, frame: CMat) -> Self {
        debug_assert_eq!(frame.nrows(), d * d);
        OperatorSubspace { d, frame }
    }

    /// Span of the columns of `m` (each a vectorized `d × d` matrix).
    pub fn from_columns(d: usize, m: &CMat, tol: &Tolerances) -> Self {
        assert_eq!(m.nrows(), d * d);
        if m.ncols() == 0 {
            return Self::zero(d);
        }
        let svd = svd(m);
        let u = &svd.u;
        let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let cut = (tol.rank_eps * smax).max(ABS_FLOOR);
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&k| svd.singular_values[k] > cut)
            .collect();
        let frame = CMat::from_fn(d * d, keep.len(), |i, j| u[(i, keep[j])]);
        OperatorSubspace { d, frame }
    }

    pub fn span(d: usize, set: &[CMat], tol: &Tolerances) -> Result<Self> {
        for x in set {
            if x.shape() != (d, d) {
                return Err(Error::ShapeMismatch(format!(
                    "expected {d}x{d}, got {}x{}",
                    x.nrows(),
                    x.ncols()
                )));
            }
            check_finite(x, "spanning set")?;
        }
        let m = CMat::from_fn(d * d, set.len(), |i, j| set[j].as_slice()[i]);
        Ok(Self::from_columns(d, &m, tol))
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.d * self.d
    }

    pub fn frame(&self) -> &CMat {
        &self.frame
    }

    pub fn element(&self, k: usize) -> CMat {
        unvectorize(self.frame.column(k).as_slice(), self.d)
    }

    pub fn basis(&self) -> Vec<CMat> {
        (0..self.dim()).map(|k| self.element(k)).collect()
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, x: &CMat) -> CMat {
        let v = vectorize(x);
        let coeffs = self.frame.adjoint() * &v;
        let p = &self.frame * coeffs;
        unvectorize(p.as_slice(), self.d)
    }

    /// Norm of the coordinates of `x` along the basis.
    pub fn coefficient_norm(&self, x: &CMat) -> f64 {
        (self.frame.adjoint() * vectorize(x)).norm()
    }

    /// Distance from `x` to the subspace.
    pub fn residual(&self, x: &CMat) -> f64 {
        (x - self.project(x)).norm()
    }

    pub fn contains(&self, x: &CMat, tol: &Tolerances) -> bool {
        self.residual(x) <= tol.subspace_eps * x.norm().max(1.0)
    }

    pub fn contains_subspace(&self, other: &OperatorSubspace, tol: &Tolerances) -> bool {
        other.basis().iter().all(|b| self.contains(b, tol))
    }

    /// Equal dimensions and mutual containment.
    pub fn same_as(&self, other: &OperatorSubspace, tol: &Tolerances) -> bool {
        self.d == other.d
            && self.dim() == other.dim()
            && self.contains_subspace(other, tol)
            && other.contains_subspace(self, tol)
    }

    pub fn contains_identity(&self, tol: &Tolerances) -> bool {
        self.contains(&identity(self.d), tol)
    }

    /// Basis elements are closed under `†` up to tolerance.
    pub fn is_self_adjoint(&self, tol: &Tolerances) -> bool {
        self.basis().iter().all(|b| self.contains(&b.adjoint(), tol))
    }
}

/// Orthonormal basis of the span of a non-empty set of equally shaped square matrices.
pub fn orthonormal_basis(set: &[CMat], tol: &Tolerances) -> Result<OperatorSubspace> {
    let first = set
        .first()
        .ok_or_else(|| Error::ShapeMismatch("empty spanning set".into()))?;
    if !first.is_square() {
        return Err(Error::ShapeMismatch("spanning matrices must be square".into()));
    }
    OperatorSubspace::span(first.nrows(), set, tol)
}

/// Span of a set closed under `†`, with a basis of Hermitian matrices.
///
/// Hermitian and anti-Hermitian parts are orthonormalized with real
/// coefficients, so the returned basis consists of Hermitian matrices.
pub fn hermitian_span(d: usize, set: &[CMat], tol: &Tolerances) -> Result<OperatorSubspace> {
    let mut cols: Vec<CMat> = Vec::with_capacity(2 * set.len());
    for x in set {
        if x.shape() != (d, d) {
            return Err(Error::ShapeMismatch(format!("expected {d}x{d}")));
        }
        check_finite(x, "spanning set")?;
        cols.push(hermitian_part(x));
        cols.push(anti_hermitian_part(x));
    }
    let n = d * d;
    if cols.is_empty() {
        return Ok(OperatorSubspace::zero(d));
    }
    let real = RMat::from_fn(2 * n, cols.len(), |i, j| {
        let z = cols[j].as_slice()[i % n];
        if i < n {
            z.re
        } else {
            z.im
        }
    });
    let svd = svd(&to_complex(&real));
    let u = svd.u.map(|z| z.re);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = (tol.rank_eps * smax).max(ABS_FLOOR);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > cut)
        .collect();
    let frame = CMat::from_fn(n, keep.len(), |i, j| c(u[(i, keep[j])], u[(i + n, keep[j])]));
    // Hermitize each element to remove rounding drift.
    let mut out = CMat::zeros(n, keep.len());
    for j in 0..keep.len() {
        let h = hermitian_part(&unvectorize(frame.column(j).as_slice(), d));
        out.set_column(j, &vectorize(&h));
    }
    Ok(OperatorSubspace::from_orthonormal_frame(d, out))
}

/// Orthogonal complement in `M_d`.
pub fn complement(v: &OperatorSubspace) -> OperatorSubspace {
    let d = v.ambient_dim();
    let n = d * d;
    match v.dim() {
        0 => return OperatorSubspace::full(d),
        k if k == n => return OperatorSubspace::zero(d),
        _ => {}
    }
    let q = v.frame();
    let p = CMat::identity(n, n) - q * q.adjoint();
    let e = herm_eig(&p);
    let keep: Vec<usize> = (0..n).filter(|&k| e.values[k] > 0.5).collect();
    let frame = CMat::from_fn(n, keep.len(), |i, j| e.vectors[(i, keep[j])]);
    OperatorSubspace::from_orthonormal_frame(d, frame)
}

pub fn sum(v: &OperatorSubspace, w: &OperatorSubspace, tol: &Tolerances) -> OperatorSubspace {
    assert_eq!(v.ambient_dim(), w.ambient_dim());
    let d = v.ambient_dim();
    let mut m = CMat::zeros(d * d, v.dim() + w.dim());
    m.view_mut((0, 0), (d * d, v.dim())).copy_from(v.frame());
    m.view_mut((0, v.dim()), (d * d, w.dim())).copy_from(w.frame());
    OperatorSubspace::from_columns(d, &m, tol)
}

pub fn intersection(v: &OperatorSubspace, w: &OperatorSubspace, tol: &Tolerances) -> OperatorSubspace {
    complement(&sum(&complement(v), &complement(w), tol))
}

/// `{X : XB = BX for every B in V}`, as the null space of the stacked
/// commutator maps `X ↦ XB − BX`.
pub fn commutant(v: &OperatorSubspace, tol: &Tolerances) -> OperatorSubspace {
    let d = v.ambient_dim();
    let n = d * d;
    if v.dim() == 0 {
        return OperatorSubspace::full(d);
    }
    let id = identity(d);
    let mut stacked = CMat::zeros(n * v.dim(), n);
    for (k, b) in v.basis().iter().enumerate() {
        let l = kron(&b.transpose(), &id) - kron(&id, b);
        stacked.view_mut((k * n, 0), (n, n)).copy_from(&l);
    }
    let ns = null_space(&stacked, tol.subspace_eps);
    OperatorSubspace::from_orthonormal_frame(d, ns)
}

/// Every product of two basis elements lies in the subspace.
pub fn is_algebra(v: &OperatorSubspace, tol: &Tolerances) -> bool {
    if v.dim() == 0 || v.is_full() {
        return true;
    }
    let basis = v.basis();
    basis.iter().all(|a| basis.iter().all(|b| v.contains(&(a * b), tol)))
}

/// All basis elements commute pairwise.
pub fn is_abelian(v: &OperatorSubspace, tol: &Tolerances) -> bool {
    let basis = v.basis();
    for (i, a) in basis.iter().enumerate() {
        for b in basis.iter().skip(i + 1) {
            if commutator(a, b).norm() > tol.subspace_eps {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn diagonal_algebra(d: usize) -> OperatorSubspace {
        let set: Vec<CMat> = (0..d).map(|i| unit(d, i, i)).collect();
        orthonormal_basis(&set, &tol()).unwrap()
    }

    #[test]
    fn duplicates_are_removed() {
        let v = orthonormal_basis(&[unit(2, 0, 0), unit(2, 0, 0), unit(2, 0, 1)], &tol()).unwrap();
        assert_eq!(v.dim(), 2);
    }

    #[test]
    fn identity_spans_one_dimension() {
        let v = orthonormal_basis(&[identity(3)], &tol()).unwrap();
        assert_eq!(v.dim(), 1);
        assert!(v.contains_identity(&tol()));
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let err = orthonormal_basis(&[unit(2, 0, 0), unit(3, 0, 0)], &tol()).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch(_)));
    }

    #[test]
    fn basis_is_orthonormal() {
        let set = vec![
            real_matrix(2, 2, &[1.0, 2.0, 0.0, 1.0]),
            real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0]),
            real_matrix(2, 2, &[1.0, 3.0, 1.0, 1.0]),
        ];
        let v = orthonormal_basis(&set, &tol()).unwrap();
        assert_eq!(v.dim(), 2);
        let g = v.frame().adjoint() * v.frame();
        assert!((g - CMat::identity(2, 2)).norm() < 1e-12);
        for x in &set {
            assert!(v.contains(x, &tol()));
        }
    }

    #[test]
    fn complement_dimensions() {
        assert_eq!(complement(&OperatorSubspace::full(3)).dim(), 0);
        let one = orthonormal_basis(&[identity(2)], &tol()).unwrap();
        let c1 = complement(&one);
        assert_eq!(c1.dim(), 3);
        for b in c1.basis() {
            assert!(hs_inner(&identity(2), &b).norm() < 1e-12);
        }
        assert_eq!(complement(&diagonal_algebra(3)).dim(), 6);
    }

    #[test]
    fn commutant_examples() {
        let full = commutant(&OperatorSubspace::full(3), &tol());
        assert_eq!(full.dim(), 1);
        assert!(full.contains_identity(&tol()));
        let diag = diagonal_algebra(3);
        assert!(commutant(&diag, &tol()).same_as(&diag, &tol()));
    }

    #[test]
    fn algebra_and_abelian_predicates() {
        let diag = diagonal_algebra(3);
        assert!(is_algebra(&diag, &tol()) && is_abelian(&diag, &tol()));
        let nil = orthonormal_basis(&[identity(2), unit(2, 0, 1)], &tol()).unwrap();
        assert!(is_algebra(&nil, &tol()) && is_abelian(&nil, &tol()));
        let m2 = OperatorSubspace::full(2);
        assert!(is_algebra(&m2, &tol()) && !is_abelian(&m2, &tol()));
        let not_closed = orthonormal_basis(&[identity(2), unit(2, 0, 1), unit(2, 1, 0)], &tol()).unwrap();
        assert!(!is_algebra(&not_closed, &tol()));
    }

    #[test]
    fn hermitian_span_has_hermitian_basis() {
        let set = vec![unit(3, 0, 1), unit(3, 1, 0), identity(3)];
        let v = hermitian_span(3, &set, &tol()).unwrap();
        assert_eq!(v.dim(), 3);
        for b in v.basis() {
            assert!((&b - b.adjoint()).norm() < 1e-12);
        }
        let g = v.frame().adjoint() * v.frame();
        assert!((g - CMat::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn intersection_of_overlapping_spans() {
        let a = orthonormal_basis(&[unit(2, 0, 0), unit(2, 0, 1)], &tol()).unwrap();
        let b = orthonormal_basis(&[unit(2, 0, 0), unit(2, 1, 1)], &tol()).unwrap();
        let i = intersection(&a, &b, &tol());
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&unit(2, 0, 0), &tol()));
    }
}
