//! Certified lower bounds for the moduli of polynomial roots.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::field::FieldElem;
use super::interval::{round_down, sqrt_bounds};
use super::poly::Poly;

const GRAEFFE_STEPS: u32 = 5;
const BITS: u32 = 64;

/// p(z) p(-z) rewritten in z^2: the roots are squared.
fn graeffe(p: &Poly) -> Poly {
    let field = p.field().clone();
    let minus = Poly::new(
        &field,
        p.coeffs().iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() }).collect(),
    );
    let prod = p * &minus;
    Poly::new(&field, prod.coeffs().iter().step_by(2).cloned().collect())
}

fn pow_rat(r: &BigRational, e: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= r;
    }
    acc
}

/// Largest dyadic r found by bisection with |a_0| > sum_{i>=1} |a_i| r^i,
/// using certified magnitude bounds of the coefficients.
fn cauchy_lower(p: &Poly) -> BigRational {
    let mags: Vec<BigRational> = p
        .coeffs()
        .iter()
        .map(|c| embed_mag(c).1)
        .collect();
    let a0 = embed_mag(&p.coeffs()[0]).0;
    let ok = |r: &BigRational| {
        let s: BigRational = mags.iter().enumerate().skip(1).map(|(i, m)| m * pow_rat(r, i)).sum();
        a0 > s
    };
    let mut lo = BigRational::zero();
    let mut hi = BigRational::one();
    while ok(&hi) {
        lo = hi.clone();
        hi *= BigRational::from_integer(2.into());
    }
    for _ in 0..BITS {
        let mid = (&lo + &hi) / BigRational::from_integer(2.into());
        if ok(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// (lower bound of |x|, upper bound of |x|)
fn embed_mag(x: &FieldElem) -> (BigRational, BigRational) {
    let b = x.embed_ball(BITS).expect("embedding of the ambient field");
    (b.abs_lower(), b.abs_upper())
}

/// A positive rational strictly below the modulus of every nonzero complex
/// root of `p` under the designated embedding, or `None` when `p` has no
/// nonzero root. Panics on the zero polynomial.
pub fn poly_roots_modulus_lower_bound(p: &Poly) -> Option<BigRational> {
    assert!(!p.is_zero(), "root bound of the zero polynomial");
    let v = p.valuation().expect("nonzero");
    let mut g = p.unshift(v);
    if g.degree() == Some(0) {
        return None;
    }
    for _ in 0..GRAEFFE_STEPS {
        g = graeffe(&g);
    }
    let mut r = cauchy_lower(&g);
    for _ in 0..GRAEFFE_STEPS {
        r = sqrt_bounds(&r, BITS).0;
    }
    let r = round_down(&r, BITS);
    if r.is_zero() {
        Some(BigRational::new(BigInt::one(), BigInt::one() << BITS))
    } else {
        Some(r)
    }
}
