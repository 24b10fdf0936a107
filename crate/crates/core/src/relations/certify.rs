//! Section-closure certificates for candidate relations.
//!
//! Write z^nu f~ = A_hat f~(z^q) and split w A_hat = sum_r z^r u_r(z^q). Then
//! z^nu <w, f~> = sum_r z^r <u_r, f~>(z^q). Let V be a finite-dimensional
//! space of polynomial vectors containing w and closed under w -> u_r, and let
//! m be the least valuation of <v, f~> over v in V. If m is finite then
//! nu + m >= q m, so m <= nu/(q-1). Hence if every v in V vanishes to order
//! floor(nu/(q-1)) + 1, every inner product is identically zero. Valuations
//! agree for f and f~ since u is a unit, so either stream may be used.

use crate::error::{Error, Result};
use crate::exactalg::{FieldElem, Matrix, Poly};
use crate::series::{inner_valuation, CoefficientStream, Valuation};
use crate::system::MahlerSystem;

use super::kernel::{phi, phi_inv};

/// Machine-checkable proof that <w, f> = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionCertificate {
    pub relation: Vec<Poly>,
    /// Degree bound H of the closure.
    pub height: usize,
    /// Every closure member vanishes to this order.
    pub checked_order: usize,
    /// Semi-echelon basis of the closure.
    pub closure: Vec<Vec<Poly>>,
    /// sections[i][r]: coordinates of the r-th section of closure[i].
    pub sections: Vec<Vec<Vec<FieldElem>>>,
    /// Coordinates of the relation in the closure basis.
    pub relation_coords: Vec<FieldElem>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    /// <v, f> has a nonzero coefficient, so w is not a relation.
    NonVanishing,
    /// A section left degree H.
    DegreeEscape,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FailureWitness {
    pub member: Vec<Poly>,
    pub index: usize,
    pub kind: WitnessKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certification {
    Certified(SectionCertificate),
    Failed(FailureWitness),
}

impl Certification {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certification::Certified(_))
    }

    pub fn certificate(self) -> Option<SectionCertificate> {
        match self {
            Certification::Certified(c) => Some(c),
            Certification::Failed(_) => None,
        }
    }
}

/// Order to which closure members must vanish.
pub fn checked_order(s: &MahlerSystem) -> usize {
    s.nu() / (s.q() - 1) + 1
}

/// Smallest admissible closure height.
pub fn min_height(s: &MahlerSystem) -> usize {
    s.d().div_ceil(s.q() - 1)
}

/// The q sections u_0..u_(q-1) of v A_hat.
pub fn sections(v: &[Poly], a_hat: &Matrix<Poly>, q: usize) -> Vec<Vec<Poly>> {
    let n = v.len();
    let field = a_hat.get(0, 0).field().clone();
    let prod: Vec<Poly> = (0..n)
        .map(|j| {
            let mut acc = Poly::zero(&field);
            for (i, vi) in v.iter().enumerate() {
                if !vi.is_zero() {
                    acc = &acc + &(vi * a_hat.get(i, j));
                }
            }
            acc
        })
        .collect();
    (0..q)
        .map(|r| {
            prod.iter()
                .map(|p| Poly::new(&field, p.coeffs().iter().skip(r).step_by(q).cloned().collect()))
                .collect()
        })
        .collect()
}

/// Basis in semi-echelon form: each row has a unit pivot that is zero in all
/// rows added after it.
struct Echelon {
    rows: Vec<Vec<FieldElem>>,
    pivots: Vec<usize>,
}

impl Echelon {
    /// Reduces v, returning the remainder and the multipliers used.
    fn reduce(&self, v: &[FieldElem]) -> (Vec<FieldElem>, Vec<FieldElem>) {
        let mut v = v.to_vec();
        let mut coords = Vec::with_capacity(self.rows.len());
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p].clone();
            if !c.is_zero() {
                for (x, y) in v.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x = &*x - &(&c * y);
                    }
                }
            }
            coords.push(c);
        }
        (v, coords)
    }

    /// Adds v if independent; returns true when added.
    fn insert(&mut self, v: &[FieldElem]) -> bool {
        let (r, _) = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].inv();
        self.rows.push(r.iter().map(|x| x * &inv).collect());
        self.pivots.push(p);
        true
    }
}

/// Depth to which w itself is searched once it is known not to be a relation.
const WITNESS_SEARCH: usize = 4096;

/// Replaces a witness on a closure member by one on w when a nonzero
/// coefficient of <w, f> is within reach.
fn prefer_relation(w: &[Poly], f: &CoefficientStream, wit: FailureWitness) -> FailureWitness {
    match inner_valuation(w, f, WITNESS_SEARCH) {
        Valuation::Exact(i) => FailureWitness { member: w.to_vec(), index: i, kind: WitnessKind::NonVanishing },
        Valuation::AtLeast(_) => wit,
    }
}

fn degree_of(v: &[Poly]) -> usize {
    v.iter().filter_map(Poly::degree).max().unwrap_or(0)
}

/// Tries to certify <w, f> = 0 with closure height `height` (default
/// max(deg w, ceil(d/(q-1)))).
pub fn certify(
    w: &[Poly],
    s: &MahlerSystem,
    f: &CoefficientStream,
    height: Option<usize>,
) -> Result<Certification> {
    let n = s.n();
    if w.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: w.len() });
    }
    if f.width() != n {
        return Err(Error::DimensionMismatch { expected: n, found: f.width() });
    }
    let hmin = min_height(s);
    let h = height.unwrap_or_else(|| degree_of(w).max(hmin));
    if h < hmin {
        return Err(Error::Precondition(format!("closure height {h} is below ceil(d/(q-1)) = {hmin}")));
    }
    if degree_of(w) > h {
        return Err(Error::Precondition(format!("relation degree exceeds closure height {h}")));
    }
    let field = s.field().clone();
    let order = checked_order(s);
    let mut basis = Echelon { rows: Vec::new(), pivots: Vec::new() };
    let check = |v: &[Poly]| -> Option<FailureWitness> {
        match inner_valuation(v, f, order) {
            Valuation::Exact(i) => Some(prefer_relation(w, f, FailureWitness {
                member: v.to_vec(),
                index: i,
                kind: WitnessKind::NonVanishing,
            })),
            Valuation::AtLeast(_) => None,
        }
    };
    if let Some(wit) = check(w) {
        return Ok(Certification::Failed(wit));
    }
    basis.insert(&phi_inv(w, h));
    let mut next = 0;
    let mut table = Vec::new();
    while next < basis.rows.len() {
        let v = phi(&basis.rows[next], n, &field);
        if let Some(wit) = check(&v) {
            return Ok(Certification::Failed(wit));
        }
        let mut secs = Vec::with_capacity(s.q());
        for u in sections(&v, s.a_hat(), s.q()) {
            if degree_of(&u) > h {
                return Ok(Certification::Failed(FailureWitness { member: v, index: 0, kind: WitnessKind::DegreeEscape }));
            }
            secs.push(phi_inv(&u, h));
        }
        for u in &secs {
            basis.insert(u);
        }
        table.push(secs);
        next += 1;
    }
    let sections = table
        .iter()
        .map(|secs| secs.iter().map(|u| basis.reduce(u).1).collect())
        .collect();
    let relation_coords = basis.reduce(&phi_inv(w, h)).1;
    let closure = basis.rows.iter().map(|r| phi(r, n, &field)).collect();
    Ok(Certification::Certified(SectionCertificate {
        relation: w.to_vec(),
        height: h,
        checked_order: order,
        closure,
        sections,
        relation_coords,
    }))
}

impl SectionCertificate {
    /// Independently rechecks every claim of the certificate.
    pub fn verify(&self, s: &MahlerSystem, f: &CoefficientStream) -> bool {
        let field = s.field().clone();
        if self.height < min_height(s) || self.checked_order < checked_order(s) {
            return false;
        }
        if self.sections.len() != self.closure.len() || self.relation.len() != s.n() {
            return false;
        }
        let combine = |coords: &[FieldElem]| -> Option<Vec<Poly>> {
            if coords.len() != self.closure.len() {
                return None;
            }
            let mut acc = vec![Poly::zero(&field); s.n()];
            for (c, v) in coords.iter().zip(&self.closure) {
                for (a, p) in acc.iter_mut().zip(v) {
                    *a = &*a + &p.scale(c);
                }
            }
            Some(acc)
        };
        if combine(&self.relation_coords).as_deref() != Some(&self.relation[..]) {
            return false;
        }
        for (v, coords) in self.closure.iter().zip(&self.sections) {
            if v.len() != s.n() || degree_of(v) > self.height {
                return false;
            }
            if inner_valuation(v, f, self.checked_order) != Valuation::AtLeast(self.checked_order) {
                return false;
            }
            let secs = sections(v, s.a_hat(), s.q());
            if coords.len() != secs.len() {
                return false;
            }
            for (u, c) in secs.iter().zip(coords) {
                if combine(c).as_deref() != Some(&u[..]) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::NumberField;
    use crate::fixtures::thue3;

    #[test]
    fn sections_split_by_residue() {
        let k = NumberField::rationals();
        let a = Matrix::from_rows(vec![vec![Poly::from_ints(&k, &[1, 2, 3, 4, 5])]]).unwrap();
        let secs = sections(&[Poly::one(&k)], &a, 2);
        assert_eq!(secs[0], vec![Poly::from_ints(&k, &[1, 3, 5])]);
        assert_eq!(secs[1], vec![Poly::from_ints(&k, &[2, 4])]);
    }

    #[test]
    fn zero_relation_has_trivial_certificate() {
        let k = NumberField::rationals();
        let (s, f) = thue3(&k).unwrap();
        let w = vec![Poly::zero(&k), Poly::zero(&k)];
        let c = certify(&w, &s, &f, None).unwrap().certificate().unwrap();
        assert!(c.closure.is_empty());
        assert!(c.verify(&s, &f));
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        // f1 + f2 = 1/(1 - z) on the system augmented by the constant
        let k = NumberField::rationals();
        let (s, f) = thue3(&k).unwrap();
        let (s, f) = (s.augment_constant(), f.augment_constant());
        let w = vec![Poly::from_ints(&k, &[1, -1]), Poly::from_ints(&k, &[1, -1]), Poly::from_ints(&k, &[-1])];
        let c = certify(&w, &s, &f, None).unwrap().certificate().unwrap();
        assert!(c.verify(&s, &f));
        let mut bad = c.clone();
        bad.relation[2] = Poly::from_ints(&k, &[-2]);
        assert!(!bad.verify(&s, &f));
        let mut low = c;
        low.height = 0;
        assert!(!low.verify(&s, &f));
    }

    #[test]
    fn height_below_minimum_is_rejected() {
        let k = NumberField::rationals();
        let (s, f) = thue3(&k).unwrap();
        let w = vec![Poly::one(&k), Poly::zero(&k)];
        assert!(matches!(certify(&w, &s, &f, Some(0)), Err(Error::Precondition(_))));
        assert!(matches!(certify(&w[..1], &s, &f, None), Err(Error::DimensionMismatch { .. })));
    }
}
