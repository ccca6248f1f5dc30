//! The `wrapkit/1` JSON document: a wrapping with exact coordinates.
//!
//! Every number is a field element `a + c·√d` written as the pair `["a", "c"]`
//! of rational strings `"num/den"`; the radicand `d` is stored once for the whole
//! document (`"1"` when everything is rational). No floats are ever written.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use wrapkit::characterize::{RootSign, WrapParams};
use wrapkit::construct::{ConstructionParams, WrappingSpec};
use wrapkit::field::{format_rational, QuadExt, Rational};
use wrapkit::geometry::{Point2, SquareShape};

pub const FORMAT: &str = "wrapkit/1";

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("unsupported document format {0:?} (expected {FORMAT:?})")]
    Format(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad number {0:?}: expected \"num/den\" with den > 0")]
    Number(String),
    #[error("bad radicand {0:?}")]
    Radicand(String),
    #[error("value {0} is not in the document field Q(sqrt({1}))")]
    Field(String, BigInt),
    #[error("square {0}: {1}")]
    Square(usize, String),
    #[error("side² {stored} disagrees with the squares ({actual})")]
    SideMismatch { stored: String, actual: String },
    #[error("construction record is inconsistent: {0}")]
    Provenance(String),
}

type Pair = [String; 2];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceDoc {
    pub p: String,
    pub r: String,
    pub sign: String,
    pub m: String,
    pub n: String,
    pub u: String,
    pub v: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WrappingDocument {
    pub format: String,
    pub d: String,
    pub b: Pair,
    pub side_sq: Pair,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<ProvenanceDoc>,
    /// Each square as four `[x, y]` vertices, counterclockwise.
    pub squares: Vec<[[Pair; 2]; 4]>,
}

fn parse_rational_str(s: &str) -> Result<Rational, DocumentError> {
    let bad = || DocumentError::Number(s.to_string());
    let (num, den) = s.split_once('/').ok_or_else(bad)?;
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if !den.is_positive() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

fn parse_int(s: &str) -> Result<BigInt, DocumentError> {
    BigInt::from_str(s).map_err(|_| DocumentError::Number(s.to_string()))
}

struct FieldCodec {
    d: BigInt,
}

impl FieldCodec {
    fn encode(&self, q: &QuadExt) -> Result<Pair, DocumentError> {
        if !q.is_rational() && q.radicand() != &self.d {
            return Err(DocumentError::Field(q.to_string(), self.d.clone()));
        }
        Ok([format_rational(q.rational_part()), format_rational(q.radical_coeff())])
    }

    fn decode(&self, pair: &Pair) -> Result<QuadExt, DocumentError> {
        let a = parse_rational_str(&pair[0])?;
        let c = parse_rational_str(&pair[1])?;
        Ok(QuadExt::new(a, c, &self.d))
    }

    fn encode_point(&self, p: &Point2) -> Result<[Pair; 2], DocumentError> {
        Ok([self.encode(&p.x)?, self.encode(&p.y)?])
    }

    fn decode_point(&self, p: &[Pair; 2]) -> Result<Point2, DocumentError> {
        Ok(Point2::new(self.decode(&p[0])?, self.decode(&p[1])?))
    }
}

/// The radicand shared by every value of the spec (1 if all are rational).
fn document_radicand(spec: &WrappingSpec) -> BigInt {
    std::iter::once(&spec.b)
        .chain(std::iter::once(&spec.side_sq))
        .chain(spec.squares.iter().flat_map(|s| s.vertices().iter().flat_map(|v| [&v.x, &v.y])))
        .find(|q| !q.is_rational())
        .map(|q| q.radicand().clone())
        .unwrap_or_else(BigInt::one)
}

fn sign_name(s: RootSign) -> &'static str {
    match s {
        RootSign::Plus => "plus",
        RootSign::Minus => "minus",
    }
}

impl WrappingDocument {
    pub fn from_spec(spec: &WrappingSpec) -> Result<Self, DocumentError> {
        let d = document_radicand(spec);
        let codec = FieldCodec { d: d.clone() };
        let squares = spec
            .squares
            .iter()
            .map(|s| {
                let v = s.vertices();
                Ok([
                    codec.encode_point(&v[0])?,
                    codec.encode_point(&v[1])?,
                    codec.encode_point(&v[2])?,
                    codec.encode_point(&v[3])?,
                ])
            })
            .collect::<Result<Vec<_>, DocumentError>>()?;
        let provenance = spec.provenance.as_ref().map(|cp| ProvenanceDoc {
            p: format_rational(&cp.w.p),
            r: format_rational(&cp.w.r),
            sign: sign_name(cp.w.sign).to_string(),
            m: cp.m.to_string(),
            n: cp.n.to_string(),
            u: cp.u.to_string(),
            v: cp.v.to_string(),
        });
        Ok(WrappingDocument {
            format: FORMAT.to_string(),
            d: d.to_string(),
            b: codec.encode(&spec.b)?,
            side_sq: codec.encode(&spec.side_sq)?,
            provenance,
            squares,
        })
    }

    pub fn to_spec(&self) -> Result<WrappingSpec, DocumentError> {
        if self.format != FORMAT {
            return Err(DocumentError::Format(self.format.clone()));
        }
        let d = parse_int(&self.d).map_err(|_| DocumentError::Radicand(self.d.clone()))?;
        if !d.is_positive() {
            return Err(DocumentError::Radicand(self.d.clone()));
        }
        let codec = FieldCodec { d };
        let b = codec.decode(&self.b)?;
        let side_sq = codec.decode(&self.side_sq)?;
        let squares = self
            .squares
            .iter()
            .enumerate()
            .map(|(i, quad)| {
                let mut pts = Vec::with_capacity(4);
                for p in quad {
                    pts.push(codec.decode_point(p)?);
                }
                let pts: [Point2; 4] = pts.try_into().expect("four vertices");
                let sq = SquareShape::from_vertices(pts).map_err(|e| DocumentError::Square(i, e.to_string()))?;
                if sq.side_sq() != &side_sq {
                    return Err(DocumentError::SideMismatch {
                        stored: side_sq.to_string(),
                        actual: sq.side_sq().to_string(),
                    });
                }
                Ok(sq)
            })
            .collect::<Result<Vec<_>, DocumentError>>()?;
        let mut spec = WrappingSpec::new(b, squares, side_sq);
        if let Some(pd) = &self.provenance {
            spec.provenance = Some(decode_provenance(pd, &spec.b)?);
        }
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }
}

fn decode_provenance(pd: &ProvenanceDoc, b: &QuadExt) -> Result<ConstructionParams, DocumentError> {
    let bad = |m: String| DocumentError::Provenance(m);
    let sign = match pd.sign.as_str() {
        "plus" => RootSign::Plus,
        "minus" => RootSign::Minus,
        other => return Err(bad(format!("unknown sign {other:?}"))),
    };
    let w = WrapParams::new(parse_rational_str(&pd.p)?, parse_rational_str(&pd.r)?, sign)
        .map_err(|e| bad(e.to_string()))?;
    let cp = ConstructionParams::from_params(&w).map_err(|e| bad(e.to_string()))?;
    let stored = [&pd.m, &pd.n, &pd.u, &pd.v].map(|s| parse_int(s)).into_iter().collect::<Result<Vec<_>, _>>()?;
    if stored != [cp.m.clone(), cp.n.clone(), cp.u.clone(), cp.v.clone()] {
        return Err(bad(format!("(m, n, u, v) = ({}, {}, {}, {}) do not follow from {w}", pd.m, pd.n, pd.u, pd.v)));
    }
    if &cp.b != b {
        return Err(bad(format!("{w} gives b = {}, document has {b}", cp.b)));
    }
    Ok(cp)
}
