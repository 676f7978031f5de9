//! Classical, CDUC and DUC parameterizations.

use crate::error::{Error, Result};
use crate::linalg::*;

/// Deviation of a column sum from one that is silently renormalized.
const RENORMALIZE_WINDOW: f64 = 1e-12;
/// Tolerance for the positivity conditions on B and C.
const PARAM_EPS: f64 = 1e-10;

/// Entrywise non-negative, column-stochastic matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticMatrix {
    a: RMat,
}

impl StochasticMatrix {
    pub fn new(a: RMat) -> Result<Self> {
        let d = a.nrows();
        if a.ncols() != d || d == 0 {
            return Err(Error::ShapeMismatch(format!(
                "stochastic matrix must be square and non-empty, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let mut a = a;
        for i in 0..d {
            for j in 0..d {
                let v = a[(i, j)];
                if !v.is_finite() {
                    return Err(Error::NonFinite("stochastic matrix".into()));
                }
                if v < 0.0 {
                    if v < -RENORMALIZE_WINDOW {
                        return Err(Error::InvalidParams(format!("A[{i}][{j}] = {v} is negative")));
                    }
                    a[(i, j)] = 0.0;
                }
            }
        }
        for j in 0..d {
            let s: f64 = a.column(j).sum();
            if (s - 1.0).abs() > RENORMALIZE_WINDOW {
                return Err(Error::InvalidParams(format!("column {j} of A sums to {s}, not 1")));
            }
            if s != 1.0 {
                a.column_mut(j).unscale_mut(s);
            }
        }
        Ok(StochasticMatrix { a })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::ShapeMismatch("stochastic matrix rows must have length d".into()));
        }
        Self::new(RMat::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &RMat {
        &self.a
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[(i, j)]
    }

    pub fn product(&self, other: &StochasticMatrix) -> StochasticMatrix {
        let p = &self.a * &other.a;
        Self::new(p).expect("product of stochastic matrices is stochastic")
    }

    pub fn transpose_if_stochastic(&self) -> Result<StochasticMatrix> {
        Self::new(self.a.transpose())
    }

    /// Zero/nonzero pattern.
    pub fn support(&self) -> Vec<Vec<bool>> {
        let d = self.dim();
        (0..d).map(|i| (0..d).map(|j| self.a[(i, j)] > 0.0).collect()).collect()
    }

    /// A pair of columns with disjoint supports, if one exists.
    pub fn non_overlapping_columns(&self) -> Option<(usize, usize)> {
        let d = self.dim();
        let sup = self.support();
        (0..d)
            .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
            .find(|&(i, j)| !(0..d).any(|k| sup[k][i] && sup[k][j]))
    }

    /// Every pair of columns shares a positive row.
    pub fn is_scrambling(&self) -> bool {
        self.non_overlapping_columns().is_none()
    }

    /// A zero entry `(i, j)`, if one exists.
    pub fn zero_entry(&self) -> Option<(usize, usize)> {
        let d = self.dim();
        (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .find(|&(i, j)| self.a[(i, j)] <= 0.0)
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.zero_entry().is_none()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..d).map(|i| (0..d).map(|j| self.a[(i, j)]).collect()).collect()
    }
}

/// Parameters `(A, B)` of a conjugate diagonal-unitary covariant channel.
///
/// The diagonal of `B` never enters the channel's action; it is stored as
/// `B_ii = A_ii`, the completion under which positivity of `B` is the
/// complete-positivity condition.
#[derive(Clone, Debug, PartialEq)]
pub struct CducParams {
    pub a: StochasticMatrix,
    pub b: CMat,
}

impl CducParams {
    pub fn new(a: StochasticMatrix, b: CMat) -> Result<Self> {
        let d = a.dim();
        if b.shape() != (d, d) {
            return Err(Error::ShapeMismatch(format!("B must be {d}x{d}")));
        }
        check_finite(&b, "B")?;
        let mut b = b;
        for i in 0..d {
            b[(i, i)] = c(a.get(i, i), 0.0);
        }
        let skew = (&b - b.adjoint()).norm();
        if skew > PARAM_EPS {
            return Err(Error::InvalidParams(format!("B is not Hermitian (deviation {skew:.3e})")));
        }
        let b = hermitian_part(&b);
        let e = herm_eig(&b);
        let top = e.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if e.values[0] < -PARAM_EPS * top {
            return Err(Error::InvalidParams(format!(
                "B with diagonal diag(A) has eigenvalue {:.3e} < 0",
                e.values[0]
            )));
        }
        Ok(CducParams { a, b })
    }
}

/// Parameters `(A, C)` of a diagonal-unitary covariant channel.
///
/// `C_ii` is stored as `A_ii`; it does not enter the action.
#[derive(Clone, Debug, PartialEq)]
pub struct DucParams {
    pub a: StochasticMatrix,
    pub c: CMat,
}

impl DucParams {
    pub fn new(a: StochasticMatrix, cm: CMat) -> Result<Self> {
        let d = a.dim();
        if cm.shape() != (d, d) {
            return Err(Error::ShapeMismatch(format!("C must be {d}x{d}")));
        }
        check_finite(&cm, "C")?;
        let mut cm = cm;
        for i in 0..d {
            cm[(i, i)] = c(a.get(i, i), 0.0);
        }
        let skew = (&cm - cm.adjoint()).norm();
        if skew > PARAM_EPS {
            return Err(Error::InvalidParams(format!("C is not Hermitian (deviation {skew:.3e})")));
        }
        for i in 0..d {
            for j in 0..d {
                if i == j {
                    continue;
                }
                let lhs = a.get(i, j) * a.get(j, i);
                let rhs = cm[(i, j)].norm_sqr();
                if lhs < rhs - PARAM_EPS {
                    return Err(Error::InvalidParams(format!(
                        "A[{i}][{j}]*A[{j}][{i}] = {lhs:.6e} < |C[{i}][{j}]|^2 = {rhs:.6e}"
                    )));
                }
            }
        }
        Ok(DucParams {
            a,
            c: hermitian_part(&cm),
        })
    }
}

/// Structured family a channel belongs to.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum ChannelKind {
    #[default]
    Generic,
    Classical(StochasticMatrix),
    Cduc(CducParams),
    Duc(DucParams),
}

impl ChannelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ChannelKind::Generic => "generic",
            ChannelKind::Classical(_) => "classical",
            ChannelKind::Cduc(_) => "cduc",
            ChannelKind::Duc(_) => "duc",
        }
    }

    /// The stochastic matrix governing the diagonal action.
    pub fn stochastic(&self) -> Option<&StochasticMatrix> {
        match self {
            ChannelKind::Generic => None,
            ChannelKind::Classical(a) => Some(a),
            ChannelKind::Cduc(p) => Some(&p.a),
            ChannelKind::Duc(p) => Some(&p.a),
        }
    }

    /// Action of the structured formula, if the kind is structured.
    pub fn apply(&self, x: &CMat) -> Option<CMat> {
        let a = self.stochastic()?;
        let d = a.dim();
        let mut out = CMat::zeros(d, d);
        for i in 0..d {
            let mut s = ZERO;
            for j in 0..d {
                s += x[(j, j)] * a.get(i, j);
            }
            out[(i, i)] = s;
        }
        match self {
            ChannelKind::Cduc(p) => {
                for i in 0..d {
                    for j in 0..d {
                        if i != j {
                            out[(i, j)] = p.b[(i, j)] * x[(i, j)];
                        }
                    }
                }
            }
            ChannelKind::Duc(p) => {
                for i in 0..d {
                    for j in 0..d {
                        if i != j {
                            out[(i, j)] = p.c[(i, j)] * x[(j, i)];
                        }
                    }
                }
            }
            _ => {}
        }
        Some(out)
    }

    /// Kind of `self ∘ other`, exact for every pair of structured kinds.
    pub fn compose(&self, other: &ChannelKind) -> ChannelKind {
        use ChannelKind::*;
        let (Some(a1), Some(a2)) = (self.stochastic(), other.stochastic()) else {
            return Generic;
        };
        let a = a1.product(a2);
        let d = a.dim();
        if let (Classical(_), Classical(_)) = (self, other) {
            return Classical(a);
        }
        let diag_a: Vec<f64> = (0..d).map(|i| a.get(i, i)).collect();
        let off = |m: CMat| -> CMat {
            let mut m = m;
            for i in 0..d {
                m[(i, i)] = c(diag_a[i], 0.0);
            }
            m
        };
        let zero = CMat::zeros(d, d);
        // Off-diagonal data: (true, B) for conjugate-covariant, (false, C) for covariant.
        let data = |k: &ChannelKind| -> (bool, CMat) {
            match k {
                Cduc(p) => (true, p.b.clone()),
                Duc(p) => (false, p.c.clone()),
                _ => (true, zero.clone()),
            }
        };
        let (t1, m1) = data(self);
        let (t2, m2) = data(other);
        let (b_like, m) = match (t1, t2) {
            (true, true) => (true, m1.component_mul(&m2)),
            (true, false) => (false, m1.component_mul(&m2)),
            (false, true) => (false, m1.component_mul(&m2.transpose())),
            (false, false) => (true, m1.component_mul(&m2.transpose())),
        };
        if b_like {
            Cduc(CducParams { a, b: off(m) })
        } else {
            Duc(DucParams { a, c: off(m) })
        }
    }
}
