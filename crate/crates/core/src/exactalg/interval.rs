//! Certified interval and complex-box arithmetic with rational endpoints.
//!
//! Endpoints are exact rationals; `round` snaps them outward onto a dyadic
//! grid with a given number of significant bits so that sizes stay bounded.
//! A grid with more bits always refines a grid with fewer bits, which makes
//! repeated evaluation at increasing precision produce nested enclosures.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

/// Largest dyadic with `bits` significant bits that is <= x.
pub fn round_down(x: &BigRational, bits: u32) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    let e = x.numer().bits() as i64 - x.denom().bits() as i64;
    let k = bits as i64 - 1 - e;
    if k >= 0 {
        let scaled = (x.numer() << (k as u64)).div_floor(x.denom());
        BigRational::new(scaled, pow2(k as u64))
    } else {
        let den = x.denom() << ((-k) as u64);
        let scaled = x.numer().div_floor(&den);
        BigRational::from_integer(scaled << ((-k) as u64))
    }
}

pub fn round_up(x: &BigRational, bits: u32) -> BigRational {
    -round_down(&-x.clone(), bits)
}

/// Rational lower/upper bounds for sqrt(x), x >= 0, with about `bits` bits.
pub fn sqrt_bounds(x: &BigRational, bits: u32) -> (BigRational, BigRational) {
    assert!(!x.is_negative(), "sqrt of negative rational");
    if x.is_zero() {
        return (BigRational::zero(), BigRational::zero());
    }
    let scale = 2 * bits as u64;
    // floor(x * 4^bits) then integer sqrt
    let scaled = (x.numer() << scale).div_floor(x.denom());
    let root = scaled.sqrt();
    let den = pow2(bits as u64);
    let lo = BigRational::new(root.clone(), den.clone());
    let hi = BigRational::new(root + 1, den);
    (lo, hi)
}

#[derive(Clone, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl fmt::Debug for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:.12e}, {:.12e}]",
            self.lo.to_f64().unwrap_or(f64::NAN),
            self.hi.to_f64().unwrap_or(f64::NAN)
        )
    }
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        RatInterval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::point(BigRational::zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        RatInterval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Self) -> Self {
        RatInterval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> Self {
        RatInterval { lo: -self.hi.clone(), hi: -self.lo.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let ps = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = ps.iter().min().unwrap().clone();
        let hi = ps.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }

    pub fn sqr(&self) -> Self {
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        if self.contains(&BigRational::zero()) {
            RatInterval { lo: BigRational::zero(), hi: a.max(b) }
        } else {
            RatInterval { lo: a.clone().min(b.clone()), hi: a.max(b) }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if a <= b {
            RatInterval { lo: a, hi: b }
        } else {
            RatInterval { lo: b, hi: a }
        }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, o: &Self) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    /// `o` lies strictly inside `self`.
    pub fn contains_interior(&self, o: &Self) -> bool {
        if self.lo == self.hi {
            return o == self;
        }
        self.lo < o.lo && o.hi < self.hi
    }

    pub fn intersect(&self, o: &Self) -> Option<Self> {
        let lo = (&self.lo).max(&o.lo).clone();
        let hi = (&self.hi).min(&o.hi).clone();
        (lo <= hi).then_some(RatInterval { lo, hi })
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    /// Upper bound on |x| over the interval.
    pub fn mag(&self) -> BigRational {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn round(&self, bits: u32) -> Self {
        RatInterval { lo: round_down(&self.lo, bits), hi: round_up(&self.hi, bits) }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

/// Axis-aligned box in the complex plane.
#[derive(Clone, PartialEq, Eq)]
pub struct ComplexBox {
    pub re: RatInterval,
    pub im: RatInterval,
}

impl fmt::Debug for ComplexBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + i{:?}", self.re, self.im)
    }
}

impl ComplexBox {
    pub fn new(re: RatInterval, im: RatInterval) -> Self {
        ComplexBox { re, im }
    }

    pub fn point(re: BigRational, im: BigRational) -> Self {
        ComplexBox { re: RatInterval::point(re), im: RatInterval::point(im) }
    }

    pub fn real(x: BigRational) -> Self {
        Self::point(x, BigRational::zero())
    }

    pub fn zero() -> Self {
        Self::real(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::real(BigRational::one())
    }

    pub fn add(&self, o: &Self) -> Self {
        ComplexBox { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        ComplexBox { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn neg(&self) -> Self {
        ComplexBox { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        ComplexBox { re, im }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        ComplexBox { re: self.re.scale(c), im: self.im.scale(c) }
    }

    pub fn round(&self, bits: u32) -> Self {
        ComplexBox { re: self.re.round(bits), im: self.im.round(bits) }
    }

    /// Enclosure of |z|^2.
    pub fn norm_sq(&self) -> RatInterval {
        self.re.sqr().add(&self.im.sqr())
    }

    /// Rational upper bound on |z|.
    pub fn abs_upper(&self) -> BigRational {
        let n = self.norm_sq();
        sqrt_bounds(&n.hi, 64).1
    }

    /// Rational lower bound on |z| (zero if the box touches the origin).
    pub fn abs_lower(&self) -> BigRational {
        let n = self.norm_sq();
        sqrt_bounds(&n.lo, 64).0
    }

    pub fn contains(&self, re: &BigRational, im: &BigRational) -> bool {
        self.re.contains(re) && self.im.contains(im)
    }

    pub fn contains_box(&self, o: &Self) -> bool {
        self.re.contains_interval(&o.re) && self.im.contains_interval(&o.im)
    }

    pub fn contains_interior(&self, o: &Self) -> bool {
        self.re.contains_interior(&o.re) && self.im.contains_interior(&o.im)
    }

    pub fn intersect(&self, o: &Self) -> Option<Self> {
        Some(ComplexBox { re: self.re.intersect(&o.re)?, im: self.im.intersect(&o.im)? })
    }

    pub fn center(&self) -> (BigRational, BigRational) {
        (self.re.mid(), self.im.mid())
    }

    pub fn width(&self) -> BigRational {
        self.re.width().max(self.im.width())
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&BigRational::zero(), &BigRational::zero())
    }

    pub fn to_f64(&self) -> (f64, f64) {
        let (re, im) = self.center();
        (re.to_f64().unwrap_or(f64::NAN), im.to_f64().unwrap_or(f64::NAN))
    }
}

/// Exact complex division of rational points, used for Newton steps.
pub(crate) fn cdiv(
    a: (&BigRational, &BigRational),
    b: (&BigRational, &BigRational),
) -> (BigRational, BigRational) {
    let den = b.0 * b.0 + b.1 * b.1;
    let re = (a.0 * b.0 + a.1 * b.1) / &den;
    let im = (a.1 * b.0 - a.0 * b.1) / den;
    (re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rounding_brackets_value() {
        let x = q(1, 3);
        for bits in [4, 16, 53, 200] {
            let lo = round_down(&x, bits);
            let hi = round_up(&x, bits);
            assert!(lo <= x && x <= hi);
            assert!(&hi - &lo <= q(1, 1) / BigRational::from_integer(pow2(bits as u64 - 2)));
        }
        let y = q(-7, 5);
        assert!(round_down(&y, 8) <= y && y <= round_up(&y, 8));
    }

    #[test]
    fn finer_grid_nests_inside_coarser() {
        let x = q(22, 7);
        assert!(round_down(&x, 80) >= round_down(&x, 40));
        assert!(round_up(&x, 80) <= round_up(&x, 40));
    }

    #[test]
    fn sqrt_bounds_bracket() {
        let (lo, hi) = sqrt_bounds(&q(2, 1), 40);
        assert!(&lo * &lo <= q(2, 1) && q(2, 1) <= &hi * &hi);
    }

    #[test]
    fn complex_product_encloses() {
        let a = ComplexBox::point(q(1, 2), q(1, 3));
        let b = ComplexBox::point(q(-2, 1), q(5, 7));
        let p = a.mul(&b);
        // (1/2 + i/3)(-2 + 5i/7) = -1 - 5/21 + i(5/14 - 2/3)
        assert!(p.contains(&(q(-1, 1) - q(5, 21)), &(q(5, 14) - q(2, 3))));
    }
}
