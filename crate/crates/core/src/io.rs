//! JSON representation of channels.
//!
//! Complex entries are `[re, im]` pairs, matrices are row-major lists of
//! rows, and `kraus` is a list of such matrices.

use serde::{Deserialize, Serialize};

use crate::channel::{Channel, ChannelKind, CducParams, DucParams, StochasticMatrix};
use crate::error::{Error, Result};
use crate::linalg::*;

pub type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecKind {
    Kraus,
    Classical,
    Cduc,
    Duc,
    Choi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub dim: usize,
    pub kind: SpecKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<ComplexRows>>,
    #[serde(default, rename = "A", skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<f64>>>,
    #[serde(default, rename = "B", skip_serializing_if = "Option::is_none")]
    pub b: Option<ComplexRows>,
    #[serde(default, rename = "C", skip_serializing_if = "Option::is_none")]
    pub c: Option<ComplexRows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choi: Option<ComplexRows>,
}

fn to_rows(m: &CMat) -> ComplexRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn from_rows(rows: &ComplexRows, shape: (usize, usize), field: &str) -> Result<CMat> {
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(Error::ShapeMismatch(format!(
            "{field} must be {}x{}",
            shape.0, shape.1
        )));
    }
    Ok(CMat::from_fn(shape.0, shape.1, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

fn require<'a, T>(x: &'a Option<T>, field: &str, kind: &str) -> Result<&'a T> {
    x.as_ref()
        .ok_or_else(|| Error::Parse(format!("kind \"{kind}\" requires field \"{field}\"")))
}

fn stochastic(rows: &[Vec<f64>], d: usize) -> Result<StochasticMatrix> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::ShapeMismatch(format!("A must be {d}x{d}")));
    }
    StochasticMatrix::from_rows(rows)
}

impl ChannelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("channel spec serializes")
    }

    pub fn to_channel(&self, tol: &Tolerances) -> Result<Channel> {
        let d = self.dim;
        if d == 0 {
            return Err(Error::ShapeMismatch("dim must be positive".into()));
        }
        match self.kind {
            SpecKind::Kraus => {
                let ks = require(&self.kraus, "kraus", "kraus")?;
                let ks = ks
                    .iter()
                    .enumerate()
                    .map(|(i, k)| from_rows(k, (d, d), &format!("kraus[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                Channel::from_kraus_with(ks, tol)
            }
            SpecKind::Classical => Channel::classical(stochastic(require(&self.a, "A", "classical")?, d)?),
            SpecKind::Cduc => {
                let a = stochastic(require(&self.a, "A", "cduc")?, d)?;
                let b = from_rows(require(&self.b, "B", "cduc")?, (d, d), "B")?;
                Channel::cduc(CducParams::new(a, b)?)
            }
            SpecKind::Duc => {
                let a = stochastic(require(&self.a, "A", "duc")?, d)?;
                let cm = from_rows(require(&self.c, "C", "duc")?, (d, d), "C")?;
                Channel::duc(DucParams::new(a, cm)?)
            }
            SpecKind::Choi => {
                let j = from_rows(require(&self.choi, "choi", "choi")?, (d * d, d * d), "choi")?;
                Channel::from_choi(&j, tol)
            }
        }
    }

    /// Structured channels are written by their parameters, all others by
    /// their original Kraus operators.
    pub fn from_channel(ch: &Channel) -> Self {
        let mut spec = ChannelSpec {
            dim: ch.dim(),
            kind: SpecKind::Kraus,
            kraus: None,
            a: None,
            b: None,
            c: None,
            choi: None,
        };
        match ch.kind() {
            ChannelKind::Generic => spec.kraus = Some(ch.original_kraus().iter().map(to_rows).collect()),
            ChannelKind::Classical(a) => {
                spec.kind = SpecKind::Classical;
                spec.a = Some(a.rows());
            }
            ChannelKind::Cduc(p) => {
                spec.kind = SpecKind::Cduc;
                spec.a = Some(p.a.rows());
                spec.b = Some(to_rows(&p.b));
            }
            ChannelKind::Duc(p) => {
                spec.kind = SpecKind::Duc;
                spec.a = Some(p.a.rows());
                spec.c = Some(to_rows(&p.c));
            }
        }
        spec
    }
}

/// Parses and validates a channel file.
pub fn parse_channel(text: &str, tol: &Tolerances) -> Result<Channel> {
    ChannelSpec::from_json(text)?.to_channel(tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_round_trip() {
        let text = r#"{"dim": 2, "kind": "classical", "A": [[0.5, 1.0], [0.5, 0.0]]}"#;
        let ch = parse_channel(text, &Tolerances::default()).unwrap();
        assert_eq!(ch.kind().name(), "classical");
        let again = parse_channel(&ChannelSpec::from_channel(&ch).to_json(), &Tolerances::default()).unwrap();
        assert_eq!(again.kind(), ch.kind());
    }

    #[test]
    fn kraus_round_trip() {
        let ch = Channel::depolarizing(2);
        let text = ChannelSpec::from_channel(&ch).to_json();
        let again = parse_channel(&text, &Tolerances::default()).unwrap();
        assert!((again.choi() - ch.choi()).norm() < 1e-12);
    }

    #[test]
    fn choi_input() {
        let ch = Channel::depolarizing(2);
        let spec = ChannelSpec {
            dim: 2,
            kind: SpecKind::Choi,
            kraus: None,
            a: None,
            b: None,
            c: None,
            choi: Some(to_rows(ch.choi())),
        };
        let again = spec.to_channel(&Tolerances::default()).unwrap();
        assert!((again.choi() - ch.choi()).norm() < 1e-12);
    }

    #[test]
    fn malformed_reports_position() {
        let err = ChannelSpec::from_json("{\"dim\": 2,\n \"kind\": }").unwrap_err();
        assert!(matches!(&err, Error::Parse(m) if m.starts_with("line 2")), "{err}");
        assert!(err.is_validation());
    }

    #[test]
    fn missing_field_and_bad_shape() {
        let e = parse_channel(r#"{"dim": 2, "kind": "classical"}"#, &Tolerances::default()).unwrap_err();
        assert!(matches!(e, Error::Parse(_)));
        let e = parse_channel(r#"{"dim": 3, "kind": "classical", "A": [[1.0]]}"#, &Tolerances::default())
            .unwrap_err();
        assert!(matches!(e, Error::ShapeMismatch(_)));
        let e = parse_channel(
            r#"{"dim": 1, "kind": "kraus", "kraus": [[[[0.5, 0.0]]]]}"#,
            &Tolerances::default(),
        )
        .unwrap_err();
        assert!(matches!(e, Error::NotTracePreserving(_)));
    }
}
