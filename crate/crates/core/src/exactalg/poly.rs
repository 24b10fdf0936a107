//! Univariate polynomials in `z` over a number field.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;

use super::field::{FieldElem, NumberField};

/// Dense polynomial, lowest degree first, without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: Arc<NumberField>,
    coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn zero(field: &Arc<NumberField>) -> Self {
        Poly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::constant(FieldElem::one(field))
    }

    pub fn constant(c: FieldElem) -> Self {
        let field = c.field().clone();
        Self::new(&field, vec![c])
    }

    /// The polynomial `z`.
    pub fn z(field: &Arc<NumberField>) -> Self {
        Self::monomial(FieldElem::one(field), 1)
    }

    /// c * z^e
    pub fn monomial(c: FieldElem, e: usize) -> Self {
        let field = c.field().clone();
        let mut coeffs = vec![FieldElem::zero(&field); e];
        coeffs.push(c);
        Self::new(&field, coeffs)
    }

    pub fn new(field: &Arc<NumberField>, mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { field: field.clone(), coeffs }
    }

    pub fn from_rationals(field: &Arc<NumberField>, cs: &[BigRational]) -> Self {
        Self::new(field, cs.iter().map(|c| FieldElem::from_rational(field, c.clone())).collect())
    }

    pub fn from_ints(field: &Arc<NumberField>, cs: &[i64]) -> Self {
        Self::new(field, cs.iter().map(|&c| FieldElem::from_int(field, c)).collect())
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<FieldElem> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| FieldElem::zero(&self.field))
    }

    pub fn lead(&self) -> Option<&FieldElem> {
        self.coeffs.last()
    }

    /// Index of the lowest nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        if c.is_zero() {
            return Self::zero(&self.field);
        }
        Poly { field: self.field.clone(), coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Multiplication by z^e.
    pub fn shift(&self, e: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![FieldElem::zero(&self.field); e];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { field: self.field.clone(), coeffs }
    }

    /// Division by z^e, discarding lower terms.
    pub fn unshift(&self, e: usize) -> Self {
        Self::new(&self.field, self.coeffs.iter().skip(e).cloned().collect())
    }

    /// Terms of degree < n.
    pub fn truncate(&self, n: usize) -> Self {
        Self::new(&self.field, self.coeffs.iter().take(n).cloned().collect())
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            None => self.clone(),
            Some(l) => self.scale(&l.inv()),
        }
    }

    /// Quotient and remainder. Panics when dividing by zero.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("polynomial division by zero");
        let inv_lead = d.coeffs[dd].inv();
        let mut r = self.coeffs.clone();
        let n = r.len();
        if n <= dd {
            return (Self::zero(&self.field), self.clone());
        }
        let mut q = vec![FieldElem::zero(&self.field); n - dd];
        for i in (dd..n).rev() {
            if r[i].is_zero() {
                continue;
            }
            let c = &r[i] * &inv_lead;
            for (j, dj) in d.coeffs.iter().enumerate() {
                if !dj.is_zero() {
                    r[i - dd + j] = &r[i - dd + j] - &(&c * dj);
                }
            }
            q[i - dd] = c;
        }
        r.truncate(dd);
        (Self::new(&self.field, q), Self::new(&self.field, r))
    }

    /// Exact quotient; panics when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Poly {
        let (q, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn divides(&self, p: &Poly) -> bool {
        p.divrem(self).1.is_zero()
    }

    /// Monic greatest common divisor (zero when both are zero).
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn lcm(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Self::zero(&self.field);
        }
        (self * o).exact_div(&self.gcd(o)).monic()
    }

    pub fn derivative(&self) -> Poly {
        Self::new(
            &self.field,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.scale(&BigRational::from_integer(i.into())))
                .collect(),
        )
    }

    pub fn eval(&self, x: &FieldElem) -> FieldElem {
        let mut acc = FieldElem::zero(&self.field);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// p(z^q)
    pub fn compose_power(&self, q: usize) -> Poly {
        if self.is_zero() || q == 1 {
            return self.clone();
        }
        let mut coeffs = vec![FieldElem::zero(&self.field); (self.coeffs.len() - 1) * q + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * q] = c.clone();
        }
        Poly { field: self.field.clone(), coeffs }
    }

    /// p(c z)
    pub fn dilate(&self, c: &FieldElem) -> Poly {
        let mut pw = FieldElem::one(&self.field);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for x in &self.coeffs {
            out.push(x * &pw);
            pw = &pw * c;
        }
        Self::new(&self.field, out)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Self::one(&self.field);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Largest m with (z - a)^m dividing a nonzero polynomial.
    pub fn root_multiplicity(&self, a: &FieldElem) -> usize {
        assert!(!self.is_zero(), "multiplicity in the zero polynomial");
        let lin = Self::new(&self.field, vec![-a, FieldElem::one(&self.field)]);
        let mut p = self.clone();
        let mut m = 0;
        loop {
            let (q, r) = p.divrem(&lin);
            if !r.is_zero() {
                return m;
            }
            p = q;
            m += 1;
        }
    }

    /// Renders with the given variable name, e.g. `(1/2*t + 1)*z^2 - z`.
    pub fn render(&self, var: &str) -> String {
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let (neg, body) = match c.to_rational() {
                Some(r) => {
                    let neg = r < BigRational::from_integer(0.into());
                    let a = if neg { -r } else { r };
                    let s = if mono.is_empty() {
                        a.to_string()
                    } else if a == BigRational::from_integer(1.into()) {
                        mono.clone()
                    } else {
                        format!("{a}*{mono}")
                    };
                    (neg, s)
                }
                None => {
                    let s = if mono.is_empty() { format!("({c})") } else { format!("({c})*{mono}") };
                    (false, s)
                }
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("z"))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), o.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Poly::new(&self.field, coeffs)
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(&self.field);
        }
        let mut out = vec![FieldElem::zero(&self.field); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        Poly::new(&self.field, out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
