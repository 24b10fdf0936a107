//! Number fields Q[t]/(m(t)) with one designated complex embedding.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::{cdiv, round_down, ComplexBox, RatInterval};
use super::qpoly::{self, QPoly};
use crate::error::{Error, Result};

/// The ambient field k = Q[t]/(minpoly) together with an isolating box for
/// the root that `t` is mapped to.
pub struct NumberField {
    minpoly: QPoly,
    root: ComplexBox,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({}, root ~ {:?})", qpoly::render(&self.minpoly, "t"), self.root)
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.minpoly == other.minpoly && self.root == other.root
    }
}

impl Eq for NumberField {}

impl std::hash::Hash for NumberField {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.minpoly.hash(state);
    }
}

const ISOLATION_BITS: u32 = 96;

impl NumberField {
    /// The rational field, presented as Q[t]/(t).
    pub fn rationals() -> Arc<NumberField> {
        Arc::new(NumberField {
            minpoly: vec![BigRational::zero(), BigRational::one()],
            root: ComplexBox::zero(),
        })
    }

    /// Builds a field from a squarefree polynomial over Q (made monic) and a
    /// complex approximation of the designated root.
    pub fn new(
        minpoly: Vec<BigRational>,
        hint: (BigRational, BigRational),
    ) -> Result<Arc<NumberField>> {
        let mut m = minpoly;
        qpoly::trim(&mut m);
        let deg = qpoly::degree(&m).ok_or(Error::EmptyMinpoly)?;
        if deg == 0 {
            return Err(Error::EmptyMinpoly);
        }
        let m = qpoly::monic(&m);
        let g = qpoly::gcd(&m, &qpoly::derivative(&m));
        if qpoly::degree(&g) != Some(0) {
            return Err(Error::NotSquarefree(qpoly::render(&m, "z")));
        }
        let root = if deg == 1 {
            ComplexBox::real(-m[0].clone())
        } else {
            isolate_root(&m, hint)?
        };
        Ok(Arc::new(NumberField { minpoly: m, root }))
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn minpoly(&self) -> &[BigRational] {
        &self.minpoly
    }

    pub fn minpoly_string(&self) -> String {
        qpoly::render(&self.minpoly, "z")
    }

    /// Isolating box of the designated root as stored at construction.
    pub fn root_box(&self) -> &ComplexBox {
        &self.root
    }

    pub fn is_rational_field(&self) -> bool {
        self.degree() == 1
    }

    /// Box around the designated root with width below 2^-bits. The boxes
    /// for increasing `bits` form a nested sequence.
    pub fn refined_root(&self, bits: u32) -> Result<ComplexBox> {
        if self.root.re.is_point() && self.root.im.is_point() {
            return Ok(self.root.clone());
        }
        let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
        let mut x = self.root.clone();
        let mut stalled = 0;
        while x.width() > target {
            let next = krawczyk_step(&self.minpoly, &x)
                .and_then(|k| k.intersect(&x))
                .ok_or_else(|| Error::AskMorePrecision {
                    bits,
                    context: "root refinement left the isolating box".into(),
                })?;
            if next.width() * BigRational::from_integer(2.into()) > x.width() {
                stalled += 1;
                if stalled > 8 {
                    return Err(Error::AskMorePrecision {
                        bits,
                        context: "root refinement stalled".into(),
                    });
                }
            }
            x = next;
        }
        Ok(x)
    }
}

fn grid_bits(b: &ComplexBox) -> u32 {
    let w = b.width();
    if w.is_zero() {
        return 4096;
    }
    let e = (w.denom().bits() as i64 - w.numer().bits() as i64).max(0) as u32;
    2 * e + 64
}

fn horner_box(p: &[BigRational], x: &ComplexBox, bits: u32) -> ComplexBox {
    let mut acc = ComplexBox::zero();
    for c in p.iter().rev() {
        acc = acc.mul(x).add(&ComplexBox::real(c.clone())).round(bits);
    }
    acc
}

fn horner_point(p: &[BigRational], re: &BigRational, im: &BigRational) -> (BigRational, BigRational) {
    let (mut ar, mut ai) = (BigRational::zero(), BigRational::zero());
    for c in p.iter().rev() {
        let nr = &ar * re - &ai * im + c;
        let ni = &ar * im + &ai * re;
        ar = nr;
        ai = ni;
    }
    (ar, ai)
}

/// One Krawczyk operator evaluation K(X) for the polynomial `p`.
/// Returns `None` when the derivative vanishes at the centre.
fn krawczyk_step(p: &[BigRational], x: &ComplexBox) -> Option<ComplexBox> {
    let bits = grid_bits(x);
    let (cr, ci) = x.center();
    let (cr, ci) = (round_down(&cr, bits), round_down(&ci, bits));
    let dp = qpoly::derivative(p);
    let (pr, pi) = horner_point(p, &cr, &ci);
    let (dr, di) = horner_point(&dp, &cr, &ci);
    if dr.is_zero() && di.is_zero() {
        return None;
    }
    let (yr, yi) = cdiv((&BigRational::one(), &BigRational::zero()), (&dr, &di));
    let y = ComplexBox::point(round_down(&yr, bits), round_down(&yi, bits));
    let c = ComplexBox::point(cr, ci);
    let pc = ComplexBox::point(pr, pi);
    let dpx = horner_box(&dp, x, bits);
    let one_minus = ComplexBox::one().sub(&y.mul(&dpx));
    let k = c.sub(&y.mul(&pc)).add(&one_minus.mul(&x.sub(&c)));
    Some(k.round(bits))
}

fn isolate_root(m: &[BigRational], hint: (BigRational, BigRational)) -> Result<ComplexBox> {
    let fail = |reason: &str| Error::RootNotIsolated {
        minpoly: qpoly::render(m, "z"),
        reason: reason.to_string(),
    };
    let dm = qpoly::derivative(m);
    let (mut re, mut im) = hint;
    for _ in 0..200 {
        let (pr, pi) = horner_point(m, &re, &im);
        let (dr, di) = horner_point(&dm, &re, &im);
        if dr.is_zero() && di.is_zero() {
            return Err(fail("derivative vanishes at Newton iterate"));
        }
        let (sr, si) = cdiv((&pr, &pi), (&dr, &di));
        re = round_down(&(re - &sr), ISOLATION_BITS);
        im = round_down(&(im - &si), ISOLATION_BITS);
        let step = sr.abs() + si.abs();
        if step < BigRational::new(BigInt::one(), BigInt::one() << 80u32) {
            break;
        }
    }
    let real = im.abs() < BigRational::new(BigInt::one(), BigInt::one() << 60u32);
    if real {
        im = BigRational::zero();
    }
    for k in 4..70u32 {
        let r = BigRational::new(BigInt::one(), BigInt::one() << k);
        let b = ComplexBox::new(
            RatInterval::new(&re - &r, &re + &r),
            RatInterval::new(&im - &r, &im + &r),
        );
        if let Some(kb) = krawczyk_step(m, &b) {
            if b.contains_interior(&kb) {
                let mut iso = kb;
                // a box symmetric about the real axis isolating a unique root
                // of a real polynomial must isolate a real root
                if real {
                    iso.im = RatInterval::zero();
                }
                return Ok(iso);
            }
        }
    }
    Err(fail("Krawczyk test failed at every radius"))
}

/// Element of a number field, stored as D rational coordinates on the
/// power basis 1, t, ..., t^(D-1).
#[derive(Clone)]
pub struct FieldElem {
    field: Arc<NumberField>,
    coeffs: Vec<BigRational>,
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for FieldElem {}

impl std::hash::Hash for FieldElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&qpoly::render(&self.coeffs, "t"))
    }
}

impl FieldElem {
    pub fn zero(field: &Arc<NumberField>) -> Self {
        FieldElem { field: field.clone(), coeffs: vec![BigRational::zero(); field.degree()] }
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::from_rational(field, BigRational::one())
    }

    pub fn from_rational(field: &Arc<NumberField>, x: BigRational) -> Self {
        let mut e = Self::zero(field);
        e.coeffs[0] = x;
        e
    }

    pub fn from_int(field: &Arc<NumberField>, x: i64) -> Self {
        Self::from_rational(field, BigRational::from_integer(x.into()))
    }

    /// The class of t.
    pub fn generator(field: &Arc<NumberField>) -> Self {
        Self::from_coeffs(field, vec![BigRational::zero(), BigRational::one()])
    }

    /// Reduces an arbitrary rational polynomial in t modulo the minimal polynomial.
    pub fn from_coeffs(field: &Arc<NumberField>, coeffs: Vec<BigRational>) -> Self {
        let d = field.degree();
        let mut c = if coeffs.len() > d {
            qpoly::divrem(&coeffs, &field.minpoly).1
        } else {
            coeffs
        };
        c.resize(d, BigRational::zero());
        FieldElem { field: field.clone(), coeffs: c }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// The element as a rational number, if it lies in Q.
    pub fn to_rational(&self) -> Option<BigRational> {
        self.coeffs[1..].iter().all(|c| c.is_zero()).then(|| self.coeffs[0].clone())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        FieldElem { field: self.field.clone(), coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Multiplicative inverse; fails for zero or when the element shares a
    /// factor with a reducible modulus.
    pub fn try_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.field.degree() == 1 {
            return Ok(Self::from_rational(&self.field, self.coeffs[0].recip()));
        }
        let (g, s) = qpoly::inverse_mod(&self.coeffs, &self.field.minpoly);
        if qpoly::degree(&g) != Some(0) {
            return Err(Error::ReducibleModulus { factor: qpoly::render(&g, "z") });
        }
        Ok(Self::from_coeffs(&self.field, s))
    }

    /// Multiplicative inverse. Panics on zero or on a zero divisor, which can
    /// only occur when the declared minimal polynomial is reducible.
    pub fn inv(&self) -> Self {
        match self.try_inv() {
            Ok(x) => x,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        self * &o.inv()
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Enclosure of the image under the designated embedding, with width
    /// roughly 2^-precision relative to the magnitude of the coordinates.
    pub fn embed_ball(&self, precision: u32) -> Result<ComplexBox> {
        if let Some(r) = self.to_rational() {
            return Ok(ComplexBox::real(r));
        }
        let root = self.field.refined_root(precision + 32)?;
        let bits = precision + 32;
        let mut acc = ComplexBox::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&root).add(&ComplexBox::real(c.clone())).round(bits);
        }
        Ok(acc)
    }
}

impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn add(self, o: &FieldElem) -> FieldElem {
        FieldElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn sub(self, o: &FieldElem) -> FieldElem {
        FieldElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem { field: self.field.clone(), coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn mul(self, o: &FieldElem) -> FieldElem {
        let d = self.coeffs.len();
        if d == 1 {
            return FieldElem {
                field: self.field.clone(),
                coeffs: vec![&self.coeffs[0] * &o.coeffs[0]],
            };
        }
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let m = &self.field.minpoly;
        for i in (d..prod.len()).rev() {
            let c = std::mem::take(&mut prod[i]);
            if c.is_zero() {
                continue;
            }
            for j in 0..d {
                prod[i - d + j] -= &c * &m[j];
            }
        }
        prod.truncate(d);
        FieldElem { field: self.field.clone(), coeffs: prod }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, o: FieldElem) -> FieldElem {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Q(phi) with phi the root of z^2 - z - 1 near -0.618.
    fn golden() -> Arc<NumberField> {
        NumberField::new(vec![q(-1, 1), q(-1, 1), q(1, 1)], (q(-618, 1000), q(0, 1))).unwrap()
    }

    #[test]
    fn phi_identities() {
        let k = golden();
        let phi = FieldElem::generator(&k);
        let one = FieldElem::one(&k);
        assert_eq!(&phi * &phi, &phi + &one);
        let lhs = &(&one - &phi) * &(-&phi);
        assert!(lhs.is_one());
        assert_eq!((&one - &phi).inv(), -&phi);
        // phi satisfies 1 + z - z^2 = 0
        assert!((&(&one + &phi) - &(&phi * &phi)).is_zero());
    }

    #[test]
    fn embedding_of_phi() {
        let k = golden();
        let phi = FieldElem::generator(&k);
        let b = phi.embed_ball(128).unwrap();
        // (1 - sqrt 5)/2 = -0.6180339887498948...
        assert!(b.re.contains(&q(-6180339887498948, 10000000000000000)) || b.re.hi < q(-618033988749894, 1000000000000000));
        assert!(b.re.lo > q(-6180339888, 10000000000) && b.re.hi < q(-6180339887, 10000000000));
        assert!(b.im.is_point());
        let half = FieldElem::from_rational(&k, q(1, 2));
        assert_eq!(half.embed_ball(64).unwrap(), ComplexBox::real(q(1, 2)));
        assert!(FieldElem::zero(&k).embed_ball(10).unwrap().contains_zero());
    }

    #[test]
    fn embedding_is_nested_in_precision() {
        let k = golden();
        let x = &FieldElem::generator(&k) * &FieldElem::from_rational(&k, q(3, 7));
        let lo = x.embed_ball(40).unwrap();
        let hi = x.embed_ball(80).unwrap();
        let higher = x.embed_ball(160).unwrap();
        assert!(lo.contains_box(&hi));
        assert!(hi.contains_box(&higher));
        assert!(hi.width() <= lo.width());
    }

    #[test]
    fn complex_root_isolation() {
        // t^2 + t + 1, root near -1/2 + 0.866 i
        let k = NumberField::new(vec![q(1, 1), q(1, 1), q(1, 1)], (q(-1, 2), q(866, 1000))).unwrap();
        let w = FieldElem::generator(&k);
        let b = w.embed_ball(64).unwrap();
        assert!(b.re.contains(&q(-1, 2)));
        assert!(b.im.lo > q(866, 1000) && b.im.hi < q(867, 1000));
        assert!(w.pow(3).is_one());
    }

    #[test]
    fn rejects_non_squarefree() {
        let r = NumberField::new(vec![q(1, 1), q(2, 1), q(1, 1)], (q(-1, 1), q(0, 1)));
        assert!(matches!(r, Err(Error::NotSquarefree(_))));
    }

    #[test]
    fn reducible_modulus_reports_factor() {
        // (t - 1)(t - 2): t - 1 is a zero divisor
        let k = NumberField::new(vec![q(2, 1), q(-3, 1), q(1, 1)], (q(1, 1), q(0, 1))).unwrap();
        let x = &FieldElem::generator(&k) - &FieldElem::one(&k);
        match x.try_inv() {
            Err(Error::ReducibleModulus { factor }) => assert_eq!(factor, "z - 1"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
