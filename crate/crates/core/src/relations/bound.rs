//! The zero bound c beyond which a vanishing inner product vanishes identically.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

fn rat(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exponent n((qh+d+1)/(q-1) + q + 1) as a reduced fraction (num, den).
fn exponent(n: u64, d: u64, q: u64, h: u64) -> (BigInt, BigInt) {
    let num = BigInt::from(n) * BigInt::from(q * h + d + q * q);
    let den = BigInt::from(q - 1);
    let g = num.gcd(&den);
    (num / &g, den / g)
}

/// c = ceil((q^E (h+q) + nu - (h+d)/(q-1)) / (q-1)) with
/// E = n((qh+d+1)/(q-1) + q + 1).
///
/// # Panics
/// If q < 2.
pub fn zero_bound(n: u64, d: u64, q: u64, nu: u64, h: u64) -> BigInt {
    assert!(q >= 2, "q must be at least 2");
    if let Some(x) = zero_bound_exact(n, d, q, nu, h) {
        return x.ceil().to_integer();
    }
    let (a, b) = exponent(n, d, q, h);
    let b = u32::try_from(b).expect("small denominator");
    let a = u32::try_from(a).expect("exponent fits in u32");
    // T^b = q^a (h+q)^b with T = q^E (h+q) irrational here
    let tb = BigInt::from(q).pow(a) * BigInt::from(h + q).pow(b);
    let r = rat(nu) - rat(h + d) / rat(q - 1);
    let qm1 = rat(q - 1);
    let mut k: u64 = 16;
    loop {
        let scale = BigInt::one() << k;
        let floor_t = (&tb * (&scale).pow(b)).nth_root(b);
        let lo = (BigRational::new(floor_t, scale.clone()) + &r) / &qm1;
        let hi = &lo + BigRational::new(BigInt::one(), scale) / &qm1;
        let m = lo.floor() + BigRational::one();
        if m >= hi {
            return m.to_integer();
        }
        k *= 2;
    }
}

/// The value of c before the ceiling when it is rational, otherwise None.
pub fn zero_bound_exact(n: u64, d: u64, q: u64, nu: u64, h: u64) -> Option<BigRational> {
    assert!(q >= 2, "q must be at least 2");
    let (a, b) = exponent(n, d, q, h);
    let a = u32::try_from(a).expect("exponent fits in u32");
    let b = u32::try_from(b).expect("small denominator");
    let qa = BigInt::from(q).pow(a);
    let power = if b == 1 {
        qa
    } else {
        let root = qa.nth_root(b);
        if (&root).pow(b) != qa {
            return None;
        }
        root
    };
    let t = BigRational::from_integer(power * BigInt::from(h + q));
    let x = (t + rat(nu) - rat(h + d) / rat(q - 1)) / rat(q - 1);
    debug_assert!(!x.is_zero());
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(zero_bound(2, 2, 3, 0, 1), BigInt::from(9_565_938));
        assert_eq!(zero_bound(1, 0, 2, 0, 0), BigInt::from(32));
        let pre = zero_bound_exact(2, 2, 3, 0, 1).unwrap();
        assert_eq!(pre, BigRational::new(BigInt::from(3).pow(14u32) * 8 - 3, BigInt::from(4)));
    }

    #[test]
    fn irrational_exponent_matches_float() {
        // q = 3, n = 1, d = 0, h = 0: E = 9/2
        assert!(zero_bound_exact(1, 0, 3, 0, 0).is_none());
        let c = zero_bound(1, 0, 3, 0, 0);
        let approx = (3f64.powf(4.5) * 3.0) / 2.0;
        assert_eq!(c, BigInt::from(approx.ceil() as i64));
    }
}
