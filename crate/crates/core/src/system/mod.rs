//! Mahler systems f(z) = A(z) f(z^q), their normalization data, iterated
//! matrices and the classification of points of the unit disk.

mod transforms;

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactalg::interval::{round_down, round_up, RatInterval};
use crate::exactalg::{poly_roots_modulus_lower_bound, FieldElem, Matrix, NumberField, Poly, RatFunc};

pub use transforms::{dedouble_components, BbcTransform, MonomialIndex};

/// A Mahler system of size n with its normalization
/// b = gamma z^nu beta, beta(0) = 1, A_hat = b A / gamma.
#[derive(Clone)]
pub struct MahlerSystem {
    q: usize,
    a: Matrix<RatFunc>,
    field: Arc<NumberField>,
    b: Poly,
    gamma: FieldElem,
    nu: usize,
    beta: Poly,
    a_hat: Matrix<Poly>,
    d: usize,
    det: RatFunc,
    rho: OnceLock<BigRational>,
}

impl fmt::Debug for MahlerSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MahlerSystem(q = {}, n = {})\n{}", self.q, self.n(), self.a)
    }
}

impl PartialEq for MahlerSystem {
    fn eq(&self, o: &Self) -> bool {
        self.q == o.q && self.a == o.a
    }
}

/// Singularity status of a point for a given system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Regular,
    /// det A vanishes at alpha^(q^l).
    SingularDetZero(u32),
    /// alpha^(q^l) is a pole of an entry of A.
    SingularPole(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointClass {
    pub alpha: FieldElem,
    pub classification: Classification,
    /// Smallest l with |alpha^(q^l)| < rho, certified.
    pub l_star: usize,
}

impl PointClass {
    pub fn is_regular(&self) -> bool {
        self.classification == Classification::Regular
    }
}

const START_BITS: u32 = 128;
const MAX_BITS: u32 = 4096;

impl MahlerSystem {
    /// Builds a system from q >= 2 and a square invertible matrix.
    pub fn new(q: usize, a: Matrix<RatFunc>) -> Result<Self> {
        if q < 2 {
            return Err(Error::Precondition(format!("q must be at least 2, got {q}")));
        }
        if !a.is_square() || a.rows() == 0 {
            return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
        }
        Self::build(q, a, None)
    }

    /// Constructor for callers that already know det A.
    pub(crate) fn with_det(q: usize, a: Matrix<RatFunc>, det: RatFunc) -> Result<Self> {
        Self::build(q, a, Some(det))
    }

    fn build(q: usize, a: Matrix<RatFunc>, det: Option<RatFunc>) -> Result<Self> {
        let field = a.get(0, 0).field().clone();
        let mut b = Poly::one(&field);
        for e in a.entries() {
            b = b.lcm(e.den());
        }
        let nu = b.valuation().expect("nonzero lcm");
        let shifted = b.unshift(nu);
        let gamma = shifted.coeff(0);
        let beta = shifted.scale(&gamma.inv());
        let ginv = gamma.inv();
        let a_hat = a.map(|e| e.num().scale(&ginv) * b.exact_div(e.den()));
        let d = a_hat.max_degree().unwrap_or(0);
        let det = match det {
            Some(det) => det,
            None => {
                // det A = det(A_hat) (gamma / b)^n
                let scale = RatFunc::new(Poly::constant(gamma.clone()), b.clone())?.pow(a.rows() as u32);
                &RatFunc::from_poly(a_hat.det_fraction_free()) * &scale
            }
        };
        if det.is_zero() {
            return Err(Error::DegenerateSystem("det A(z) is identically zero".into()));
        }
        Ok(MahlerSystem { q, a, field, b, gamma, nu, beta, a_hat, d, det, rho: OnceLock::new() })
    }

    pub fn from_polys(q: usize, a: Matrix<Poly>) -> Result<Self> {
        Self::new(q, Matrix::from_polys(&a))
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn matrix(&self) -> &Matrix<RatFunc> {
        &self.a
    }

    /// Least common multiple of the entry denominators (monic).
    pub fn b(&self) -> &Poly {
        &self.b
    }

    pub fn gamma(&self) -> &FieldElem {
        &self.gamma
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn beta(&self) -> &Poly {
        &self.beta
    }

    /// b A / gamma, the polynomial matrix of the normalized equation
    /// z^nu f~(z) = A_hat(z) f~(z^q).
    pub fn a_hat(&self) -> &Matrix<Poly> {
        &self.a_hat
    }

    /// Maximal degree of the entries of b A.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn det(&self) -> &RatFunc {
        &self.det
    }

    pub fn is_polynomial(&self) -> bool {
        self.b.is_one()
    }

    /// Number of seed coefficients not determined by the normalized recursion.
    pub fn seed_len(&self) -> usize {
        self.nu / (self.q - 1) + 1
    }

    /// Certified radius below every nonzero pole of A and every nonzero
    /// root of det A, capped at 1.
    pub fn rho(&self) -> BigRational {
        self.rho
            .get_or_init(|| {
                let mut r = BigRational::one();
                let mut polys: Vec<&Poly> = self.a.entries().map(RatFunc::den).collect();
                polys.push(self.det.num());
                for p in polys {
                    if let Some(bnd) = poly_roots_modulus_lower_bound(p) {
                        if bnd < r {
                            r = bnd;
                        }
                    }
                }
                r
            })
            .clone()
    }

    /// A_l(z) = A(z) A(z^q) ... A(z^(q^(l-1))); A_0 is the identity.
    pub fn iterate(&self, l: usize) -> Matrix<RatFunc> {
        let mut acc = Matrix::identity(self.n(), &RatFunc::one(&self.field));
        let mut qk = 1;
        for _ in 0..l {
            acc = acc.mul(&self.a.compose_power(qk)).expect("square");
            qk *= self.q;
        }
        acc
    }

    /// A_l(alpha) evaluated factor by factor.
    pub fn iterate_at(&self, l: usize, alpha: &FieldElem) -> Result<Matrix<FieldElem>> {
        let mut acc = Matrix::identity(self.n(), &FieldElem::one(&self.field));
        let mut x = alpha.clone();
        for j in 0..l {
            let m = self.a.eval(&x).map_err(|_| Error::PoleHit(j as u32))?;
            acc = acc.mul(&m).expect("square");
            x = x.pow(self.q as u64);
        }
        Ok(acc)
    }

    fn is_pole(&self, x: &FieldElem) -> bool {
        self.a.entries().any(|e| e.den().eval(x).is_zero())
    }

    /// Classifies alpha, 0 < |alpha| < 1, as regular or singular.
    pub fn classify_point(&self, alpha: &FieldElem) -> Result<PointClass> {
        let rho = self.rho();
        let l_star = orbit_horizon(alpha, self.q, &rho)?;
        let mut x = alpha.clone();
        let mut classification = Classification::Regular;
        for l in 0..l_star {
            if self.is_pole(&x) {
                classification = Classification::SingularPole(l as u32);
                break;
            }
            if self.det.num().eval(&x).is_zero() {
                classification = Classification::SingularDetZero(l as u32);
                break;
            }
            x = x.pow(self.q as u64);
        }
        Ok(PointClass { alpha: alpha.clone(), classification, l_star })
    }

    /// First l with alpha^(q^l) a pole of A, searched over the whole orbit.
    pub fn first_pole_on_orbit(&self, alpha: &FieldElem) -> Result<Option<usize>> {
        let mut radius = BigRational::one();
        for e in self.a.entries() {
            if let Some(r) = poly_roots_modulus_lower_bound(e.den()) {
                if r < radius {
                    radius = r;
                }
            }
        }
        let horizon = orbit_horizon(alpha, self.q, &radius)?;
        let mut x = alpha.clone();
        for l in 0..horizon {
            if self.is_pole(&x) {
                return Ok(Some(l));
            }
            x = x.pow(self.q as u64);
        }
        Ok(None)
    }

    /// Block diagonal system diag(A, 1) for (f, 1).
    pub fn augment_constant(&self) -> MahlerSystem {
        let n = self.n();
        let zero = RatFunc::zero(&self.field);
        let one = RatFunc::one(&self.field);
        let m = Matrix::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
            (true, true) => self.a.get(i, j).clone(),
            (false, false) => one.clone(),
            _ => zero.clone(),
        });
        MahlerSystem::new(self.q, m).expect("block diagonal of invertible matrices")
    }
}

/// Certifies 0 < |alpha| < 1 and returns the smallest l with
/// |alpha^(q^l)| < radius, refining precision from 128 to 4096 bits.
pub(crate) fn orbit_horizon(alpha: &FieldElem, q: usize, radius: &BigRational) -> Result<usize> {
    if alpha.is_zero() {
        return Err(Error::PointOutsideDisk("alpha = 0".into()));
    }
    let r2 = radius * radius;
    let mut bits = START_BITS;
    loop {
        match horizon_at(alpha, q, &r2, bits)? {
            Some(l) => return Ok(l),
            None if bits >= MAX_BITS => {
                return Err(Error::AskMorePrecision {
                    bits,
                    context: format!("cannot compare |{alpha}|^(q^l) with the radius"),
                })
            }
            None => bits *= 2,
        }
    }
}

fn horizon_at(alpha: &FieldElem, q: usize, r2: &BigRational, bits: u32) -> Result<Option<usize>> {
    let n2 = alpha.embed_ball(bits)?.norm_sq();
    let one = BigRational::one();
    if n2.lo >= one {
        return Err(Error::PointOutsideDisk(format!("|{alpha}| >= 1")));
    }
    if n2.hi >= one || n2.lo.is_zero() {
        return Ok(None);
    }
    let mut p = n2;
    for l in 0..256 {
        if &p.hi < r2 {
            return Ok(Some(l));
        }
        if &p.lo < r2 {
            return Ok(None);
        }
        p = interval_pow(&p, q, bits);
    }
    Ok(None)
}

fn interval_pow(x: &RatInterval, e: usize, bits: u32) -> RatInterval {
    let mut lo = BigRational::one();
    let mut hi = BigRational::one();
    for _ in 0..e {
        lo = round_down(&(&lo * &x.lo), bits);
        hi = round_up(&(&hi * &x.hi), bits);
    }
    RatInterval::new(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thue(k: &Arc<NumberField>) -> MahlerSystem {
        let p = |c: &[i64]| Poly::from_ints(k, c);
        let m = Matrix::from_rows(vec![vec![p(&[1, 1]), p(&[0, 0, 1])], vec![p(&[0, 0, 1]), p(&[1, 1])]])
            .unwrap();
        MahlerSystem::from_polys(3, m).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn normalization_of_rational_entry() {
        let k = NumberField::rationals();
        let a = RatFunc::new(Poly::one(&k), Poly::from_ints(&k, &[0, 0, 3, -6])).unwrap();
        let s = MahlerSystem::new(2, Matrix::from_rows(vec![vec![a]]).unwrap()).unwrap();
        // b = z^3 - z^2/2 = -1/2 z^2 (1 - 2z)
        assert_eq!(s.nu(), 2);
        assert_eq!(s.gamma(), &FieldElem::from_rational(&k, q(-1, 2)));
        assert_eq!(s.beta(), &Poly::from_ints(&k, &[1, -2]));
        let lhs = s.beta().shift(s.nu()).scale(s.gamma());
        assert_eq!(&lhs, s.b());
        assert_eq!(s.seed_len(), 3);
    }

    #[test]
    fn rho_examples() {
        let k = NumberField::rationals();
        let s = thue(&k);
        let r = s.rho();
        assert!(r > q(0, 1) && &r * &r + &r < q(1, 1));
        let a = RatFunc::new(Poly::one(&k), Poly::from_ints(&k, &[1, -2])).unwrap();
        let s = MahlerSystem::new(2, Matrix::from_rows(vec![vec![a]]).unwrap()).unwrap();
        assert!(s.rho() < q(1, 2));
        let id = Matrix::identity(2, &RatFunc::one(&k));
        assert_eq!(MahlerSystem::new(2, id).unwrap().rho(), q(1, 1));
    }

    #[test]
    fn regular_points_of_thue_system() {
        let k = NumberField::rationals();
        let s = thue(&k);
        for x in [q(1, 2), q(1, 3)] {
            let c = s.classify_point(&FieldElem::from_rational(&k, x)).unwrap();
            assert!(c.is_regular());
        }
        let out = s.classify_point(&FieldElem::from_int(&k, 2));
        assert!(matches!(out, Err(Error::PointOutsideDisk(_))));
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let k = NumberField::rationals();
        let p = |c: &[i64]| Poly::from_ints(&k, c);
        let m = Matrix::from_rows(vec![vec![p(&[1, 1]), p(&[1, 1])], vec![p(&[0, 1]), p(&[0, 1])]]).unwrap();
        assert!(matches!(MahlerSystem::from_polys(2, m), Err(Error::DegenerateSystem(_))));
    }

    #[test]
    fn iterate_composition() {
        let k = NumberField::rationals();
        let s = thue(&k);
        let a2 = s.iterate(2);
        let direct = s.matrix().mul(&s.matrix().compose_power(3)).unwrap();
        assert_eq!(a2, direct);
        let a3 = s.iterate(3);
        let split = s.iterate(1).mul(&s.iterate(2).compose_power(3)).unwrap();
        assert_eq!(a3, split);
    }
}
