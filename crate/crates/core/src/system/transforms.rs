//! Transformations of Mahler systems: doubling, the derivative embedding
//! removing poles along an orbit, and Hadamard powers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{orbit_horizon, MahlerSystem};
use crate::error::{Error, Result};
use crate::exactalg::{poly_roots_modulus_lower_bound, FieldElem, Matrix, Poly, RatFunc};

/// Component i of the solution after `j` doublings of a size-n system is
/// f_{orig}(z^(q^e)) for the returned pair (orig, e).
pub fn dedouble_components(n: usize, j: usize) -> Vec<(usize, u32)> {
    let mut comps: Vec<(usize, u32)> = (0..n).map(|i| (i, 0)).collect();
    for _ in 0..j {
        let shifted: Vec<(usize, u32)> = comps.iter().map(|&(i, e)| (i, e + 1)).collect();
        comps.extend(shifted);
    }
    comps
}

/// Result of the derivative embedding.
#[derive(Clone, Debug)]
pub struct BbcTransform {
    pub system: MahlerSystem,
    /// g_i(alpha) = lambda_i f_i(alpha) for i < n.
    pub lambda: Vec<FieldElem>,
    /// Index in the new system of the component attached to f_i.
    pub index: Vec<usize>,
    /// Multiplicity of alpha in the product of beta(z^(q^j)), j < n0.
    pub s: usize,
    /// One more than the last l with beta(alpha^(q^l)) = 0, or 0.
    pub n0: usize,
    /// P(z) = prod_{j < n0} beta(z^(q^j)) = (z - alpha)^s T(z).
    pub p: Poly,
    pub t: Poly,
}

/// Exponent vectors of the degree-`deg` monomials in f_1..f_n, in
/// degree-lexicographic order with f_1 > ... > f_n.
pub type MonomialIndex = Vec<Vec<u32>>;

fn monomials(n: usize, deg: u32) -> MonomialIndex {
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut MonomialIndex) {
        if cur.len() == n - 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, deg, &mut Vec::new(), &mut out);
    out
}

impl MahlerSystem {
    /// The system [[A - I, A(z^q)], [I, 0]] satisfied by (f, f(z^q)).
    pub fn dedouble(&self) -> MahlerSystem {
        let one = RatFunc::one(self.field());
        let id = Matrix::identity(self.n(), &one);
        let top_left = self.matrix().sub(&id).expect("square");
        let top_right = self.matrix().compose_power(self.q());
        let zero = Matrix::zeros(self.n(), self.n(), &one);
        let m = Matrix::block(&top_left, &top_right, &id, &zero);
        // swapping the block rows gives [[I, 0], [A - I, A(z^q)]]
        let mut det = self.det().compose_power(self.q());
        if self.n() % 2 == 1 {
            det = -&det;
        }
        MahlerSystem::with_det(self.q(), m, det).expect("det A(z^q) is nonzero")
    }

    /// Doubles until alpha is regular. Returns the system and the number of
    /// doublings performed.
    pub fn dedouble_until_regular(&self, alpha: &FieldElem) -> Result<(MahlerSystem, usize)> {
        if let Some(l) = self.first_pole_on_orbit(alpha)? {
            return Err(Error::PoleOnOrbit(l as u32));
        }
        let mut cur = self.clone();
        let mut j = 0;
        loop {
            let c = cur.classify_point(alpha)?;
            if c.is_regular() {
                return Ok((cur, j));
            }
            cur = cur.dedouble();
            j += 1;
        }
    }

    /// Embeds the system into one without poles on the orbit of alpha, at
    /// the cost of scaling the values at alpha by explicit nonzero factors.
    pub fn transform_bbc(&self, alpha: &FieldElem) -> Result<BbcTransform> {
        let field = self.field().clone();
        let n = self.n();
        let one_poly = Poly::one(&field);
        if self.b().degree() == Some(0) {
            return Ok(BbcTransform {
                system: self.clone(),
                lambda: vec![FieldElem::one(&field); n],
                index: (0..n).collect(),
                s: 0,
                n0: 0,
                p: one_poly.clone(),
                t: one_poly,
            });
        }
        let beta = self.beta();
        let q = self.q();
        let n0 = match poly_roots_modulus_lower_bound(beta) {
            None => 0,
            Some(r) => {
                let horizon = orbit_horizon(alpha, q, &r)?;
                let mut x = alpha.clone();
                let mut last = None;
                for l in 0..horizon {
                    if beta.eval(&x).is_zero() {
                        last = Some(l);
                    }
                    x = x.pow(q as u64);
                }
                last.map_or(0, |l| l + 1)
            }
        };
        let mut p = one_poly.clone();
        let mut qj = 1;
        for _ in 0..n0 {
            p = &p * &beta.compose_power(qj);
            qj *= q;
        }
        let s = p.root_multiplicity(alpha);
        let lin = Poly::new(&field, vec![-alpha, FieldElem::one(&field)]);
        let t = p.exact_div(&lin.pow(s as u32));
        let mut fact = BigRational::one();
        for i in 1..=s {
            fact *= BigRational::from_integer(BigInt::from(i));
        }
        let lam = t.eval(alpha).scale(&fact);

        // h = u f solves h = C h(z^q) with C = A_hat / z^nu
        let znu = Poly::monomial(FieldElem::one(&field), self.nu());
        let c0 = self.a_hat().map(|e| RatFunc::new(e.clone(), znu.clone()).expect("nonzero"));
        let qz = RatFunc::from_poly(Poly::monomial(FieldElem::from_int(&field, q as i64), q - 1));
        // blocks[m][p] = C_{m,p}, derivative order m expressed through order p
        let mut blocks: Vec<Vec<Matrix<RatFunc>>> = vec![vec![c0]];
        for m in 0..s {
            let mut next = Vec::with_capacity(m + 2);
            for pidx in 0..=m + 1 {
                let mut acc = if pidx <= m {
                    blocks[m][pidx].map(RatFunc::derivative)
                } else {
                    Matrix::zeros(n, n, &RatFunc::zero(&field))
                };
                if pidx >= 1 {
                    let prev = blocks[m][pidx - 1].map(|e| e * &qz);
                    acc = acc.add(&prev).expect("same shape");
                }
                next.push(acc);
            }
            blocks.push(next);
        }
        let denom = RatFunc::from_poly(beta.compose_power(q.pow(n0 as u32))).inv();
        let zero = RatFunc::zero(&field);
        // new block a holds derivative order s - a
        let big = Matrix::from_fn(n * (s + 1), n * (s + 1), |i, j| {
            let (a, bi) = (i / n, i % n);
            let (b, bj) = (j / n, j % n);
            let (m, pidx) = (s - a, s - b);
            if pidx > m {
                zero.clone()
            } else {
                blocks[m][pidx].get(bi, bj) * &denom
            }
        });
        let system = MahlerSystem::new(q, big)?;
        Ok(BbcTransform {
            system,
            lambda: vec![lam; n],
            index: (0..n).collect(),
            s,
            n0,
            p,
            t,
        })
    }

    /// System for all degree-`deg` monomials in f_1..f_n.
    pub fn monomial_power(&self, deg: u32) -> Result<(MahlerSystem, MonomialIndex)> {
        if deg == 0 {
            return Err(Error::Precondition("monomial degree must be at least 1".into()));
        }
        let n = self.n();
        let field = self.field().clone();
        let index = monomials(n, deg);
        let pos: BTreeMap<&Vec<u32>, usize> = index.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let zero = RatFunc::zero(&field);
        let mut m = Matrix::zeros(index.len(), index.len(), &zero);
        for (row, exps) in index.iter().enumerate() {
            // expand prod_i (sum_j A_ij f_j(z^q))^(e_i)
            let mut terms: BTreeMap<Vec<u32>, RatFunc> = BTreeMap::new();
            terms.insert(vec![0; n], RatFunc::one(&field));
            for (i, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    let mut next: BTreeMap<Vec<u32>, RatFunc> = BTreeMap::new();
                    for (mono, c) in &terms {
                        for j in 0..n {
                            let a = self.matrix().get(i, j);
                            if a.is_zero() {
                                continue;
                            }
                            let mut mj = mono.clone();
                            mj[j] += 1;
                            let v = c * a;
                            let slot = next.entry(mj).or_insert_with(|| zero.clone());
                            *slot = &*slot + &v;
                        }
                    }
                    terms = next;
                }
            }
            for (mono, c) in terms {
                if !c.is_zero() {
                    m.set(row, pos[&mono], c);
                }
            }
        }
        Ok((MahlerSystem::new(self.q(), m)?, index))
    }
}
