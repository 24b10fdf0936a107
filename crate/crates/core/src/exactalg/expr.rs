//! Parser for exact expressions in the field generator `t` and the series
//! variable `z`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | base ('^' uint)?
//! base   := uint | 't' | 'z' | '(' expr ')'
//! ```

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::field::{FieldElem, NumberField};
use super::poly::Poly;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: &'a Arc<NumberField>,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { pos, msg: msg.into() })
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.factor()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            let at = self.pos;
            self.pos += 1;
            let rhs = self.factor()?;
            acc = if c == b'*' {
                &acc * &rhs
            } else {
                if rhs.is_zero() {
                    return err(at, "division by zero");
                }
                acc.div(&rhs)
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RatFunc> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-&self.factor()?);
        }
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let e = self.uint()?;
            let e: u32 = match e.try_into() {
                Ok(e) => e,
                Err(_) => return err(at, "exponent too large"),
            };
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn uint(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return err(start, "expected an unsigned integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }

    fn base(&mut self) -> Result<RatFunc> {
        let field = self.field;
        match self.peek() {
            Some(b'0'..=b'9') => {
                let n = self.uint()?;
                Ok(RatFunc::constant(FieldElem::from_rational(field, BigRational::from_integer(n))))
            }
            Some(b't') => {
                self.pos += 1;
                if field.is_rational_field() {
                    return err(self.pos - 1, "generator `t` used but no field was declared");
                }
                Ok(RatFunc::constant(FieldElem::generator(field)))
            }
            Some(b'z') => {
                self.pos += 1;
                Ok(RatFunc::from_poly(Poly::z(field)))
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return err(self.pos, "expected `)`");
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) => err(self.pos, format!("unexpected character `{}`", c as char)),
            None => err(self.pos, "unexpected end of input"),
        }
    }
}

/// Parses an expression as a rational function in `z` over the field.
pub fn parse_ratfunc(src: &str, field: &Arc<NumberField>) -> Result<RatFunc> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, field };
    let v = p.expr()?;
    if p.peek().is_some() {
        return err(p.pos, "trailing input");
    }
    Ok(v)
}

pub fn parse_poly(src: &str, field: &Arc<NumberField>) -> Result<Poly> {
    let r = parse_ratfunc(src, field)?;
    if !r.is_polynomial() {
        return err(0, format!("`{src}` is not a polynomial"));
    }
    Ok(r.num().clone())
}

pub fn parse_field_elem(src: &str, field: &Arc<NumberField>) -> Result<FieldElem> {
    let p = parse_poly(src, field)?;
    match p.degree() {
        None => Ok(FieldElem::zero(field)),
        Some(0) => Ok(p.coeff(0)),
        Some(_) => err(0, format!("`{src}` depends on z")),
    }
}

/// Parses a minimal polynomial written in `z` (or `t`) over Q.
pub fn parse_minpoly(src: &str) -> Result<Vec<BigRational>> {
    let q = NumberField::rationals();
    let normalized: String = src.chars().map(|c| if c == 't' { 'z' } else { c }).collect();
    let p = parse_poly(&normalized, &q)?;
    Ok(p.coeffs().iter().map(|c| c.coords()[0].clone()).collect())
}

/// Parses a decimal or fraction such as `-0.618`, `3/4` or `2`.
pub fn parse_rational(src: &str) -> Result<BigRational> {
    let s = src.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let bad = || Error::Parse { pos: 0, msg: format!("`{src}` is not a rational number") };
    let v = if let Some((n, d)) = body.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d == BigInt::from(0) {
            return Err(bad());
        }
        BigRational::new(n, d)
    } else if let Some((i, f)) = body.split_once('.') {
        let digits = format!("{i}{f}");
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        BigRational::new(n, BigInt::from(10).pow(f.len() as u32))
    } else {
        BigRational::from_integer(body.parse().map_err(|_| bad())?)
    };
    Ok(if neg { -v } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials() {
        let q = NumberField::rationals();
        assert_eq!(parse_poly("1+z", &q).unwrap(), Poly::from_ints(&q, &[1, 1]));
        assert_eq!(parse_poly("z^2 - z - 1", &q).unwrap(), Poly::from_ints(&q, &[-1, -1, 1]));
        assert_eq!(parse_poly("-(z-1)^2", &q).unwrap(), Poly::from_ints(&q, &[-1, 2, -1]));
    }

    #[test]
    fn rational_function_over_extension() {
        let k = NumberField::new(
            parse_minpoly("z^2 - z - 1").unwrap(),
            (parse_rational("-0.618").unwrap(), BigRational::from_integer(0.into())),
        )
        .unwrap();
        let r = parse_ratfunc("(1 - 2*t)/(1 - z^3)", &k).unwrap();
        assert!(!r.is_polynomial());
        assert_eq!(r.den().degree(), Some(3));
        let x = parse_field_elem("t^2", &k).unwrap();
        assert_eq!(x, parse_field_elem("t + 1", &k).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        let q = NumberField::rationals();
        assert!(matches!(parse_ratfunc("1 + * z", &q), Err(Error::Parse { pos: 4, .. })));
        assert!(matches!(parse_ratfunc("(1+z", &q), Err(Error::Parse { pos: 4, .. })));
        assert!(matches!(parse_ratfunc("1/(z-z)", &q), Err(Error::Parse { pos: 1, .. })));
        assert!(matches!(parse_ratfunc("t", &q), Err(Error::Parse { .. })));
    }

    #[test]
    fn decimals() {
        assert_eq!(parse_rational("-0.618").unwrap(), BigRational::new((-618).into(), 1000.into()));
        assert_eq!(parse_rational("3/4").unwrap(), BigRational::new(3.into(), 4.into()));
    }
}
