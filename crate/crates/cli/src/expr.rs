//! Parser for exact numbers typed on the command line.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := rational ['*' radical] | radical
//! radical  := 'sqrt' '(' integer ')'
//! rational := integer ['/' integer]
//! integer  := ['-'] digit+
//! ```
//!
//! Whitespace between tokens is ignored. The optional minus on integers lets the
//! canonical `Display` form of a field element (`a/b + c/d*sqrt(n)`, where `c`
//! may be negative) parse back unchanged.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use wrapkit::field::{normalize_radical, QuadExt, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at column {}: {message}", position + 1)]
    SyntaxError { position: usize, message: String },
    #[error("terms use different radicands: sqrt({0}) and sqrt({1})")]
    MixedRadicands(BigInt, BigInt),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::SyntaxError { position: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn integer(&mut self) -> Result<BigInt, ExprError> {
        let negative = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let n: BigInt = digits.parse().expect("nonempty digit run");
        Ok(if negative { -n } else { n })
    }

    fn rational(&mut self) -> Result<Rational, ExprError> {
        let num = self.integer()?;
        if !self.eat(b'/') {
            return Ok(Rational::from_integer(num));
        }
        let at = self.pos;
        let den = self.integer()?;
        if !den.is_positive() {
            self.pos = at;
            return self.err("denominator must be a positive integer");
        }
        Ok(Rational::new(num, den))
    }

    fn at_keyword(&mut self) -> bool {
        self.peek();
        self.src[self.pos..].starts_with(b"sqrt")
    }

    /// Returns the radicand.
    fn radical(&mut self) -> Result<BigInt, ExprError> {
        if !self.at_keyword() {
            return self.err("expected 'sqrt'");
        }
        self.pos += 4;
        self.expect(b'(')?;
        let at = self.pos;
        let n = self.integer()?;
        if n.is_negative() {
            self.pos = at;
            return self.err("radicand must be nonnegative");
        }
        self.expect(b')')?;
        Ok(n)
    }

    fn term(&mut self) -> Result<QuadExt, ExprError> {
        if self.at_keyword() {
            let n = self.radical()?;
            return Ok(radical_value(&Rational::from_integer(1.into()), &n));
        }
        let q = self.rational()?;
        if self.eat(b'*') {
            let n = self.radical()?;
            return Ok(radical_value(&q, &n));
        }
        Ok(QuadExt::from_rational(q))
    }

    fn expr(&mut self) -> Result<QuadExt, ExprError> {
        let mut acc = self.term()?;
        loop {
            let negate = match self.peek() {
                Some(b'+') => false,
                Some(b'-') => true,
                None => return Ok(acc),
                Some(_) => return self.err("expected '+', '-' or end of input"),
            };
            self.pos += 1;
            let t = self.term()?;
            let t = if negate { -t } else { t };
            acc = combine(acc, t)?;
        }
    }
}

fn radical_value(coeff: &Rational, n: &BigInt) -> QuadExt {
    if n.is_zero() {
        QuadExt::zero()
    } else {
        normalize_radical(coeff, n)
    }
}

fn combine(x: QuadExt, y: QuadExt) -> Result<QuadExt, ExprError> {
    x.checked_add(&y).map_err(|_| ExprError::MixedRadicands(x.radicand().clone(), y.radicand().clone()))
}

/// Parses an exact value such as `2+sqrt(3)`, `3/2` or `1/2+1/2*sqrt(5)`.
pub fn parse_b(text: &str) -> Result<QuadExt, ExprError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    p.expr()
}

/// Parses a plain rational `n` or `n/d`.
pub fn parse_rational(text: &str) -> Result<Rational, ExprError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let q = p.rational()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use wrapkit::field::rat;

    fn q(a: Rational, c: Rational, d: i64) -> QuadExt {
        QuadExt::new(a, c, &BigInt::from(d))
    }

    #[test]
    fn examples() {
        assert_eq!(parse_b("2+sqrt(3)").unwrap(), q(rat(2, 1), rat(1, 1), 3));
        assert_eq!(parse_b("3/2").unwrap(), QuadExt::from_rational(rat(3, 2)));
        assert_eq!(parse_b("1/2+1/2*sqrt(5)").unwrap(), q(rat(1, 2), rat(1, 2), 5));
    }

    #[test]
    fn normalizes_radicands() {
        assert_eq!(parse_b("sqrt(8)").unwrap(), q(rat(0, 1), rat(2, 1), 2));
        assert_eq!(parse_b("3+sqrt(8)").unwrap(), q(rat(3, 1), rat(2, 1), 2));
        assert_eq!(parse_b("sqrt(9)").unwrap(), QuadExt::from_integer(3));
        assert_eq!(parse_b("sqrt(0) + 1").unwrap(), QuadExt::one());
        assert_eq!(parse_b("sqrt(8) - sqrt(2)").unwrap(), q(rat(0, 1), rat(1, 1), 2));
        assert_eq!(parse_b("sqrt(2) - sqrt(2)").unwrap(), QuadExt::zero());
    }

    #[test]
    fn whitespace_and_signs() {
        assert_eq!(parse_b("  2 - 1/3 * sqrt( 3 ) ").unwrap(), q(rat(2, 1), rat(-1, 3), 3));
        assert_eq!(parse_b("-1 + -2*sqrt(3)").unwrap(), q(rat(-1, 1), rat(-2, 1), 3));
        assert_eq!(parse_b("4/6").unwrap(), QuadExt::from_rational(rat(2, 3)));
    }

    #[test]
    fn rejects_mixed_radicands() {
        assert!(matches!(parse_b("sqrt(2)+sqrt(3)"), Err(ExprError::MixedRadicands(_, _))));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let pos = |s: &str| match parse_b(s) {
            Err(ExprError::SyntaxError { position, .. }) => position,
            other => panic!("{s}: {other:?}"),
        };
        assert_eq!(pos(""), 0);
        assert_eq!(pos("2+"), 2);
        assert_eq!(pos("2 x"), 2);
        assert_eq!(pos("1/0"), 2);
        assert_eq!(pos("sqrt(-2)"), 5);
        assert_eq!(pos("sqrt 2"), 5);
        assert_eq!(pos("2*3"), 2);
        assert_eq!(pos("sqrt(2"), 6);
    }

    #[test]
    fn display_round_trips() {
        for s in ["2+sqrt(3)", "1/2-7/3*sqrt(5)", "17/5", "-4+sqrt(12)", "0"] {
            let v = parse_b(s).unwrap();
            assert_eq!(parse_b(&v.to_string()).unwrap(), v, "{s} -> {v}");
        }
    }

    #[test]
    fn plain_rationals() {
        assert_eq!(parse_rational("5/6").unwrap(), rat(5, 6));
        assert_eq!(parse_rational("-3").unwrap(), rat(-3, 1));
        assert!(parse_rational("1+sqrt(2)").is_err());
    }
}
