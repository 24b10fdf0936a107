//! Dense univariate polynomials over Q stored as coefficient vectors,
//! lowest degree first. Used for minimal polynomials and the inner
//! arithmetic of number-field elements.

use num_rational::BigRational;
use num_traits::{One, Zero};

pub(crate) type QPoly = Vec<BigRational>;

pub(crate) fn trim(p: &mut QPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub(crate) fn degree(p: &[BigRational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub(crate) fn mul(a: &[BigRational], b: &[BigRational]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    trim(&mut out);
    out
}

pub(crate) fn sub(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
        let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
        out.push(x - y);
    }
    trim(&mut out);
    out
}

/// Quotient and remainder; panics if `b` is zero.
pub(crate) fn divrem(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly) {
    let db = degree(b).expect("division by zero polynomial");
    let mut r: QPoly = a.to_vec();
    trim(&mut r);
    let lead = b[db].clone();
    let mut q = vec![BigRational::zero(); r.len().saturating_sub(db)];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = &r[dr] / &lead;
        let shift = dr - db;
        for (j, bj) in b.iter().enumerate().take(db + 1) {
            r[shift + j] -= &c * bj;
        }
        q[shift] = c;
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

pub(crate) fn monic(p: &[BigRational]) -> QPoly {
    match degree(p) {
        None => Vec::new(),
        Some(d) => {
            let lead = p[d].clone();
            p[..=d].iter().map(|c| c / &lead).collect()
        }
    }
}

pub(crate) fn gcd(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = divrem(&x, &y);
        x = y;
        y = r;
    }
    monic(&x)
}

pub(crate) fn derivative(p: &[BigRational]) -> QPoly {
    let mut out: QPoly = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(i.into()))
        .collect();
    trim(&mut out);
    out
}

/// Extended Euclid: returns (g, s) with s*a = g (mod m), g = gcd(a, m) monic.
pub(crate) fn inverse_mod(a: &[BigRational], m: &[BigRational]) -> (QPoly, QPoly) {
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    trim(&mut r0);
    trim(&mut r1);
    let (mut s0, mut s1): (QPoly, QPoly) = (Vec::new(), vec![BigRational::one()]);
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1);
        let s2 = sub(&s0, &mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    let d = degree(&r0).expect("gcd of nonzero polynomials");
    let lead = r0[d].clone();
    let g = r0.iter().map(|c| c / &lead).collect();
    let s = s0.iter().map(|c| c / &lead).collect();
    (g, s)
}

pub(crate) fn render(p: &[BigRational], var: &str) -> String {
    let mut out = String::new();
    for (i, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c < &BigRational::zero();
        let abs = if neg { -c.clone() } else { c.clone() };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        if mono.is_empty() {
            out.push_str(&abs.to_string());
        } else if abs.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{abs}*{mono}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
