//! Exact arithmetic in a real quadratic field `Q(√d)`.
//!
//! A [`QuadExt`] stores `a + c·√d` with `a, c` rational and `d` a squarefree
//! integer `>= 2`, or `d = 0` when the value is rational. Every operation
//! returns a value in that canonical form, so structural equality is value
//! equality and hashing is consistent with it.
//!
//! Mixing two different radicands is an error: a computation lives in one
//! field, fixed by the envelope width it started from.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always stored reduced with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("incompatible radicands: sqrt({0}) and sqrt({1})")]
    IncompatibleRadicands(BigInt, BigInt),
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
}

/// An exact element `a + c·√d` of a real quadratic field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadExt {
    a: Rational,
    c: Rational,
    d: BigInt,
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Splits `n >= 1` as `s²·f` with `f` squarefree.
///
/// Trial division runs while `k³ <= rest`; what remains after that has at most
/// two prime factors, so it is either squarefree or a perfect square.
fn squarefree_split(n: &BigInt) -> (BigInt, BigInt) {
    debug_assert!(n.is_positive());
    let mut rest = n.clone();
    let mut square = BigInt::one();
    let mut free = BigInt::one();
    let mut k = BigInt::from(2u32);
    while &k * &k * &k <= rest {
        let kk = &k * &k;
        while (&rest % &kk).is_zero() {
            rest /= &kk;
            square *= &k;
        }
        if (&rest % &k).is_zero() {
            rest /= &k;
            free *= &k;
        }
        k += 1u32;
    }
    let root = rest.sqrt();
    if &root * &root == rest && !rest.is_one() {
        square *= root;
    } else {
        free *= rest;
    }
    (square, free)
}

/// Returns `c·√radicand` in canonical form (squarefree radicand, or rational).
pub fn normalize_radical(c: &Rational, radicand: &BigInt) -> QuadExt {
    assert!(!radicand.is_negative(), "radicand must be nonnegative");
    if c.is_zero() || radicand.is_zero() {
        return QuadExt::zero();
    }
    let (square, free) = squarefree_split(radicand);
    let coeff = c * Rational::from_integer(square);
    if free.is_one() {
        QuadExt::from_rational(coeff)
    } else {
        QuadExt { a: Rational::zero(), c: coeff, d: free }
    }
}

/// The nonnegative rational square root of `q`, if `q` is the square of a rational.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let (num, den) = (q.numer(), q.denom());
    let (rn, rd) = (num.sqrt(), den.sqrt());
    if &(&rn * &rn) == num && &(&rd * &rd) == den {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}

impl QuadExt {
    pub fn zero() -> Self {
        QuadExt { a: Rational::zero(), c: Rational::zero(), d: BigInt::zero() }
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(Rational::from_integer(n))
    }

    pub fn from_rational(a: Rational) -> Self {
        QuadExt { a, c: Rational::zero(), d: BigInt::zero() }
    }

    /// `√n` for a nonnegative integer `n`.
    pub fn sqrt_of(n: u64) -> Self {
        normalize_radical(&Rational::one(), &BigInt::from(n))
    }

    /// Builds `a + c·√radicand`, normalizing the radicand.
    pub fn new(a: Rational, c: Rational, radicand: &BigInt) -> Self {
        let rad = normalize_radical(&c, radicand);
        QuadExt { a: a + rad.a, c: rad.c, d: rad.d }
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn radical_coeff(&self) -> &Rational {
        &self.c
    }

    /// The squarefree radicand, or 0 for a rational value.
    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.c.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.c.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn conjugate(&self) -> Self {
        QuadExt { a: self.a.clone(), c: -&self.c, d: self.d.clone() }
    }

    /// `a² − c²·d`, the field norm `x · conj(x)`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.c * &self.c * Rational::from_integer(self.d.clone())
    }

    /// `2a`, the field trace `x + conj(x)`.
    pub fn trace(&self) -> Rational {
        &self.a + &self.a
    }

    /// The radicand shared by `self` and `other`, if they live in one field.
    pub fn common_radicand(&self, other: &Self) -> Result<BigInt, FieldError> {
        match (self.is_rational(), other.is_rational()) {
            (true, _) => Ok(other.d.clone()),
            (_, true) => Ok(self.d.clone()),
            _ if self.d == other.d => Ok(self.d.clone()),
            _ => Err(FieldError::IncompatibleRadicands(self.d.clone(), other.d.clone())),
        }
    }

    pub fn is_compatible(&self, other: &Self) -> bool {
        self.common_radicand(other).is_ok()
    }

    fn build(a: Rational, c: Rational, d: BigInt) -> Self {
        if c.is_zero() {
            Self::from_rational(a)
        } else {
            QuadExt { a, c, d }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FieldError> {
        let d = self.common_radicand(other)?;
        Ok(Self::build(&self.a + &other.a, &self.c + &other.c, d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, FieldError> {
        let d = self.common_radicand(other)?;
        Ok(Self::build(&self.a - &other.a, &self.c - &other.c, d))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, FieldError> {
        let d = self.common_radicand(other)?;
        let dr = Rational::from_integer(d.clone());
        let a = &self.a * &other.a + &self.c * &other.c * dr;
        let c = &self.a * &other.c + &self.c * &other.a;
        Ok(Self::build(a, c, d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        self.common_radicand(other)?;
        if other.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        // x / y = x · conj(y) / norm(y); the norm is nonzero because √d is irrational.
        let n = other.norm();
        let num = self.checked_mul(&other.conjugate())?;
        Ok(Self::build(num.a / &n, num.c / &n, num.d))
    }

    pub fn recip(&self) -> Result<Self, FieldError> {
        Self::one().checked_div(self)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::build(&self.a * k, &self.c * k, self.d.clone())
    }

    /// Dispatches one field operation; `Neg` ignores `y`.
    pub fn arith(x: &Self, y: &Self, op: ArithOp) -> Result<Self, FieldError> {
        match op {
            ArithOp::Add => x.checked_add(y),
            ArithOp::Sub => x.checked_sub(y),
            ArithOp::Mul => x.checked_mul(y),
            ArithOp::Div => x.checked_div(y),
            ArithOp::Neg => Ok(-x),
        }
    }

    /// Exact sign of `a + c·√d`, by comparing `a²` with `c²·d`.
    pub fn signum(&self) -> i8 {
        let sa = sign_of(&self.a);
        let sc = sign_of(&self.c);
        if sc == 0 {
            return sa;
        }
        if sa == 0 || sa == sc {
            return sc;
        }
        let a2 = &self.a * &self.a;
        let c2d = &self.c * &self.c * Rational::from_integer(self.d.clone());
        // a² = c²d is impossible here since d is squarefree and >= 2
        if a2 > c2d {
            sa
        } else {
            sc
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// The integer `k` with `k <= self < k + 1`.
    pub fn floor(&self) -> BigInt {
        let mut k = self.floor_estimate();
        while (self - &Self::from_bigint(k.clone())).is_negative() {
            k -= 1;
        }
        while !(self - &Self::from_bigint(&k + 1)).is_negative() {
            k += 1;
        }
        k
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    // Within a couple of units of the true floor.
    fn floor_estimate(&self) -> BigInt {
        let base = self.a.floor().to_integer();
        if self.c.is_zero() {
            return base;
        }
        let c2d = &self.c * &self.c * Rational::from_integer(self.d.clone());
        let root = c2d.floor().to_integer().sqrt();
        if self.c.is_positive() {
            base + root
        } else {
            base - root - 1
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.c.is_zero() {
            return a;
        }
        let c = self.c.to_f64().unwrap_or(f64::NAN);
        let d = self.d.to_f64().unwrap_or(f64::NAN);
        a + c * d.sqrt()
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

fn sign_of(q: &Rational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// Writes `num/den`, e.g. `3/1` or `-5/2`.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

impl fmt::Display for QuadExt {
    /// `a_num/a_den + c_num/c_den*sqrt(d)`, radical term omitted when `c = 0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(&self.a))?;
        if !self.c.is_zero() {
            write!(f, " + {}*sqrt({})", format_rational(&self.c), self.d)?;
        }
        Ok(())
    }
}

impl From<i64> for QuadExt {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<Rational> for QuadExt {
    fn from(q: Rational) -> Self {
        Self::from_rational(q)
    }
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadExt {
    /// Panics if the two values live in different quadratic fields.
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt { a: -&self.a, c: -&self.c, d: self.d.clone() }
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -&self
    }
}

// Operator forms panic on mixed radicands; use the `checked_*` methods where
// the inputs are not known to share a field.
macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&QuadExt> for &QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &QuadExt) -> QuadExt {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{}", e),
                }
            }
        }
        impl $trait<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &QuadExt) -> QuadExt {
                (&self).$method(rhs)
            }
        }
        impl $trait<QuadExt> for &QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Sum for QuadExt {
    fn sum<I: Iterator<Item = QuadExt>>(iter: I) -> QuadExt {
        iter.fold(QuadExt::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a QuadExt> for QuadExt {
    fn sum<I: Iterator<Item = &'a QuadExt>>(iter: I) -> QuadExt {
        iter.fold(QuadExt::zero(), |acc, x| acc + x)
    }
}
