//! Which envelope widths admit a wrapping: `b = p ± √(p² − r²)` with rational
//! `p >= r >= 0`, equivalently `b > 0` whose field norm is a rational square.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::field::{format_rational, normalize_radical, rational_sqrt, QuadExt, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharacterizeError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("envelope width must be positive, got {0}")]
    NonPositiveB(Box<QuadExt>),
    #[error("strip data inconsistent with b: {0}")]
    InconsistentStripData(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RootSign {
    Plus,
    Minus,
}

impl fmt::Display for RootSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RootSign::Plus => "plus",
            RootSign::Minus => "minus",
        })
    }
}

/// `(p, r, ±)` describing `b = p ± √(p² − r²)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WrapParams {
    pub p: Rational,
    pub r: Rational,
    pub sign: RootSign,
}

impl WrapParams {
    /// Checks `p >= r >= 0` and that the resulting width is positive.
    pub fn new(p: Rational, r: Rational, sign: RootSign) -> Result<Self, CharacterizeError> {
        let w = WrapParams { p, r, sign };
        w.validate()?;
        Ok(w)
    }

    fn validate(&self) -> Result<(), CharacterizeError> {
        if self.r.is_negative() {
            return Err(CharacterizeError::InvalidParams(format!(
                "r = {} is negative",
                format_rational(&self.r)
            )));
        }
        if self.p < self.r {
            return Err(CharacterizeError::InvalidParams(format!(
                "p = {} is smaller than r = {}",
                format_rational(&self.p),
                format_rational(&self.r)
            )));
        }
        if self.p.is_zero() || (self.sign == RootSign::Minus && self.r.is_zero()) {
            return Err(CharacterizeError::InvalidParams("width b would be zero".into()));
        }
        Ok(())
    }
}

impl fmt::Display for WrapParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p = {}, r = {}, sign = {}",
            format_rational(&self.p),
            format_rational(&self.r),
            self.sign
        )
    }
}

/// `b = p ± √(p² − r²)`, exact and with a squarefree radicand.
pub fn b_from_params(w: &WrapParams) -> Result<QuadExt, CharacterizeError> {
    w.validate()?;
    let disc = &w.p * &w.p - &w.r * &w.r;
    // √(N/M) = √(N·M) / M
    let radicand: BigInt = disc.numer() * disc.denom();
    let coeff = Rational::new(BigInt::one(), disc.denom().clone());
    let coeff = match w.sign {
        RootSign::Plus => coeff,
        RootSign::Minus => -coeff,
    };
    let b = QuadExt::from_rational(w.p.clone()) + normalize_radical(&coeff, &radicand);
    if !b.is_positive() {
        return Err(CharacterizeError::InvalidParams(format!("width b = {b} is not positive")));
    }
    Ok(b)
}

/// Outcome of the wrappability test, with the reason when negative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Wrappable(WrapParams),
    NegativeNorm(Rational),
    NormNotSquare(Rational),
}

impl Decision {
    pub fn params(&self) -> Option<&WrapParams> {
        match self {
            Decision::Wrappable(w) => Some(w),
            _ => None,
        }
    }
}

/// Classifies `b > 0`. Rational `b` gives `(b/2, 0, +)`; otherwise `p` is half the
/// trace and `r²` the norm.
pub fn classify(b: &QuadExt) -> Result<Decision, CharacterizeError> {
    if !b.is_positive() {
        return Err(CharacterizeError::NonPositiveB(Box::new(b.clone())));
    }
    if let Some(q) = b.as_rational() {
        let p = q / Rational::from_integer(2.into());
        return Ok(Decision::Wrappable(WrapParams { p, r: Rational::zero(), sign: RootSign::Plus }));
    }
    let norm = b.norm();
    if norm.is_negative() {
        return Ok(Decision::NegativeNorm(norm));
    }
    let Some(r) = rational_sqrt(&norm) else {
        return Ok(Decision::NormNotSquare(norm));
    };
    let sign = if b.radical_coeff().is_positive() { RootSign::Plus } else { RootSign::Minus };
    Ok(Decision::Wrappable(WrapParams { p: b.rational_part().clone(), r, sign }))
}

pub fn decide_wrappable(b: &QuadExt) -> Result<Option<WrapParams>, CharacterizeError> {
    Ok(classify(b)?.params().cloned())
}

/// Recovers `(p, r, ±)` from strip projection counts `q1, q2` and square count `g`.
///
/// With strip normal `(−sin α, cos α)` and side `a`: `2b·sin α = a·q1`,
/// `2·cos α = a·q2` and `g·a² = 2b`. Eliminating `α` and `a` gives
/// `b² − (2g/q2²)·b + (q1/q2)² = 0`, so `p = g/q2²` and `r = q1/q2`.
/// The identity is checked exactly before returning.
pub fn params_from_strip_data(
    q1: u64,
    q2: u64,
    g: u64,
    b: &QuadExt,
) -> Result<WrapParams, CharacterizeError> {
    if !b.is_positive() {
        return Err(CharacterizeError::NonPositiveB(Box::new(b.clone())));
    }
    if q1 == 0 && q2 == 0 {
        return Err(CharacterizeError::InconsistentStripData("q1 = q2 = 0".into()));
    }
    if g == 0 {
        return Err(CharacterizeError::InconsistentStripData("g = 0".into()));
    }
    if q2 == 0 {
        let Some(q) = b.as_rational() else {
            return Err(CharacterizeError::InconsistentStripData(format!(
                "q2 = 0 requires a rational width, got {b}"
            )));
        };
        let p = q / Rational::from_integer(2.into());
        return Ok(WrapParams { p, r: Rational::zero(), sign: RootSign::Plus });
    }
    let q2sq = Rational::from_integer(BigInt::from(q2) * BigInt::from(q2));
    let p = Rational::from_integer(BigInt::from(g)) / q2sq;
    let r = Rational::new(BigInt::from(q1), BigInt::from(q2));
    let two_p = QuadExt::from_rational(&p + &p);
    let residual = b * b - &two_p * b + QuadExt::from_rational(&r * &r);
    if !residual.is_zero() {
        return Err(CharacterizeError::InconsistentStripData(format!(
            "b² − 2p·b + r² = {residual} for p = {}, r = {}",
            format_rational(&p),
            format_rational(&r)
        )));
    }
    if p < r {
        return Err(CharacterizeError::InconsistentStripData("p < r".into()));
    }
    let sign = if *b >= QuadExt::from_rational(p.clone()) { RootSign::Plus } else { RootSign::Minus };
    Ok(WrapParams { p, r, sign })
}
