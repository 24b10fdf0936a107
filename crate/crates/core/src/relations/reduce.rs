//! Elimination of one function through a known relation.

use crate::error::{Error, Result};
use crate::exactalg::{Matrix, Poly, RatFunc};
use crate::system::MahlerSystem;

/// Removes the component p (highest index with w_p != 0) using
/// f_p = -sum_(j != p) (w_j / w_p) f_j. The remaining functions satisfy
/// B_ij = A_ij - A_ip w_j(z^q) / w_p(z^q). Returns the new system and the
/// original indices of its components.
pub fn reduce_by_relation(s: &MahlerSystem, w: &[Poly]) -> Result<(MahlerSystem, Vec<usize>)> {
    if s.n() == 1 && w.len() == 1 && !w[0].is_zero() {
        return Err(Error::Precondition("a nonzero relation on one function forces it to vanish".into()));
    }
    let (b, keep) = reduce_matrix(s.matrix(), s.q(), w)?;
    let reduced = MahlerSystem::new(s.q(), b).map_err(|e| match e {
        Error::DegenerateSystem(m) => Error::DegenerateSystem(format!("reduced system is singular: {m}")),
        other => other,
    })?;
    Ok((reduced, keep))
}

/// The elimination of `reduce_by_relation` on a bare matrix, which may be
/// singular. Returns the (n-1)x(n-1) matrix and the kept indices.
pub(crate) fn reduce_matrix(a: &Matrix<RatFunc>, q: usize, w: &[Poly]) -> Result<(Matrix<RatFunc>, Vec<usize>)> {
    let n = a.rows();
    if w.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: w.len() });
    }
    let p = w
        .iter()
        .rposition(|x| !x.is_zero())
        .ok_or_else(|| Error::Precondition("cannot reduce by the zero relation".into()))?;
    let wp = RatFunc::from_poly(w[p].compose_power(q));
    let keep: Vec<usize> = (0..n).filter(|&i| i != p).collect();
    let ratio: Vec<RatFunc> = keep
        .iter()
        .map(|&j| RatFunc::from_poly(w[j].compose_power(q)).div(&wp))
        .collect();
    let b = Matrix::from_fn(n - 1, n - 1, |i, j| {
        let (ii, jj) = (keep[i], keep[j]);
        a.get(ii, jj) - &(a.get(ii, p) * &ratio[j])
    });
    Ok((b, keep))
}

/// Polynomial multiple of a rational vector.
pub(crate) fn clear_denominators(c: &[RatFunc]) -> Vec<Poly> {
    let field = c[0].field().clone();
    let l = c.iter().fold(Poly::one(&field), |acc, x| acc.lcm(x.den()));
    c.iter().map(|x| (x.num() * &l).exact_div(x.den())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::NumberField;

    #[test]
    fn duplicated_function() {
        let k = NumberField::rationals();
        let a = Poly::from_ints(&k, &[1, 1]);
        let zero = Poly::zero(&k);
        let s = MahlerSystem::from_polys(2, Matrix::from_rows(vec![vec![a.clone(), zero.clone()], vec![zero, a.clone()]]).unwrap()).unwrap();
        let w = vec![Poly::one(&k), Poly::from_ints(&k, &[-1])];
        let (r, keep) = reduce_by_relation(&s, &w).unwrap();
        assert_eq!(keep, vec![0]);
        assert_eq!(r.matrix().get(0, 0), &RatFunc::from_poly(a));
    }

    #[test]
    fn zero_relation_is_rejected() {
        let k = NumberField::rationals();
        let s = MahlerSystem::from_polys(2, Matrix::identity(2, &Poly::one(&k))).unwrap();
        assert!(matches!(reduce_by_relation(&s, &[Poly::zero(&k), Poly::zero(&k)]), Err(Error::Precondition(_))));
    }
}
