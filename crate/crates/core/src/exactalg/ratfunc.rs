//! Rational functions num/den in lowest terms with a monic denominator.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::field::{FieldElem, NumberField};
use super::poly::Poly;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Builds num/den and reduces it. Fails when `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            let field = den.field().clone();
            return RatFunc { num, den: Poly::one(&field) };
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (num.exact_div(&g), den.exact_div(&g))
        };
        let lead = d.lead().expect("nonzero denominator").clone();
        if !lead.is_one() {
            let inv = lead.inv();
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        RatFunc { num: n, den: d }
    }

    pub fn from_poly(p: Poly) -> Self {
        let field = p.field().clone();
        RatFunc { num: p, den: Poly::one(&field) }
    }

    pub fn constant(c: FieldElem) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        Self::from_poly(Poly::zero(field))
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::from_poly(Poly::one(field))
    }

    pub fn field(&self) -> &Arc<NumberField> {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn try_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(self.den.clone(), self.num.clone()))
    }

    pub fn inv(&self) -> Self {
        self.try_inv().expect("inverse of zero rational function")
    }

    pub fn div(&self, o: &Self) -> Self {
        self * &o.inv()
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        Self::reduced(self.num.scale(c), self.den.clone())
    }

    pub fn mul_poly(&self, p: &Poly) -> Self {
        Self::reduced(&self.num * p, self.den.clone())
    }

    /// r(z^q); stays reduced since composition with z^q preserves coprimality.
    pub fn compose_power(&self, q: usize) -> Self {
        RatFunc { num: self.num.compose_power(q), den: self.den.compose_power(q) }
    }

    /// Value at a point; fails when the point is a pole.
    pub fn eval(&self, x: &FieldElem) -> Result<FieldElem> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(x).div(&d))
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::reduced(n, &self.den * &self.den)
    }

    pub fn pow(&self, e: u32) -> Self {
        RatFunc { num: self.num.pow(e), den: self.den.pow(e) }
    }

    pub fn render(&self) -> String {
        if self.den.is_one() {
            return self.num.to_string();
        }
        let wrap = |p: &Poly| {
            let s = p.to_string();
            if p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        format!("{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::reduced(&self.num + &o.num, self.den.clone());
        }
        let n = &(&self.num * &o.den) + &(&o.num * &self.den);
        RatFunc::reduced(n, &self.den * &o.den)
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self + &(-o)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        if self.den.is_one() && o.den.is_one() {
            return RatFunc::from_poly(&self.num * &o.num);
        }
        RatFunc::reduced(&self.num * &o.num, &self.den * &o.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_lowest_terms() {
        let k = NumberField::rationals();
        let n = Poly::from_ints(&k, &[-1, 0, 1]);
        let d = Poly::from_ints(&k, &[-2, 2]);
        let r = RatFunc::new(n, d).unwrap();
        assert_eq!(r.den(), &Poly::one(&k));
        assert_eq!(r.num(), &Poly::from_ints(&k, &[1, 1]).scale(&FieldElem::from_rational(
            &k,
            num_rational::BigRational::new(1.into(), 2.into())
        )));
    }

    #[test]
    fn field_operations() {
        let k = NumberField::rationals();
        let a = RatFunc::new(Poly::one(&k), Poly::from_ints(&k, &[1, -1])).unwrap();
        let b = RatFunc::new(Poly::from_ints(&k, &[0, 1]), Poly::from_ints(&k, &[1, 1])).unwrap();
        let s = &(&a + &b) - &b;
        assert_eq!(s, a);
        assert!((&(&a * &a.inv()) - &RatFunc::one(&k)).is_zero());
        assert_eq!(a.to_string(), "-1/(z - 1)");
        assert!(RatFunc::new(Poly::one(&k), Poly::zero(&k)).is_err());
    }
}
