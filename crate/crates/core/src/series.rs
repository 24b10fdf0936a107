//! Lazy, memoized vector coefficient streams for solutions of Mahler systems.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::exactalg::{FieldElem, Matrix, NumberField, Poly};
use crate::system::{BbcTransform, MahlerSystem, MonomialIndex};

/// Computes coefficient `i` given all earlier coefficients of the same stream.
pub type Generator = dyn Fn(usize, &[Vec<FieldElem>]) -> Vec<FieldElem> + Send + Sync;

/// What backs a stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Automaton,
    Recursion,
    Derived,
    Explicit,
}

struct Inner {
    field: Arc<NumberField>,
    width: usize,
    source: Source,
    normalized: bool,
    random_access: bool,
    gen: Box<Generator>,
    cache: Mutex<Vec<Vec<FieldElem>>>,
}

/// Memoizing stream of coefficient vectors f_0, f_1, ... in k^n. Cloning is
/// cheap and clones share the cache; concurrent requests are serialized.
#[derive(Clone)]
pub struct CoefficientStream(Arc<Inner>);

impl fmt::Debug for CoefficientStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoefficientStream({:?}, width {})", self.0.source, self.0.width)
    }
}

/// Order of vanishing of an inner product, as far as it was examined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Exact(usize),
    AtLeast(usize),
}

impl CoefficientStream {
    /// Builds a stream from a generator. `random_access` promises that the
    /// generator never reads the earlier coefficients it is handed.
    pub fn from_generator(
        field: &Arc<NumberField>,
        width: usize,
        source: Source,
        random_access: bool,
        gen: Box<Generator>,
    ) -> Self {
        CoefficientStream(Arc::new(Inner {
            field: field.clone(),
            width,
            source,
            normalized: false,
            random_access,
            gen,
            cache: Mutex::new(Vec::new()),
        }))
    }

    /// Finitely many coefficients followed by zeros.
    pub fn explicit(field: &Arc<NumberField>, width: usize, coeffs: Vec<Vec<FieldElem>>) -> Self {
        let zero = vec![FieldElem::zero(field); width];
        Self::from_generator(
            field,
            width,
            Source::Explicit,
            true,
            Box::new(move |i, _| coeffs.get(i).cloned().unwrap_or_else(|| zero.clone())),
        )
    }

    pub fn zero(field: &Arc<NumberField>, width: usize) -> Self {
        Self::explicit(field, width, Vec::new())
    }

    fn with_normalized(self, normalized: bool) -> Self {
        let inner = Arc::try_unwrap(self.0).unwrap_or_else(|_| unreachable!("fresh stream"));
        CoefficientStream(Arc::new(Inner { normalized, ..inner }))
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.0.field
    }

    pub fn width(&self) -> usize {
        self.0.width
    }

    pub fn source(&self) -> Source {
        self.0.source
    }

    /// True when the stream holds u f with u = prod beta(z^(q^i)) != 1.
    pub fn is_normalized(&self) -> bool {
        self.0.normalized
    }

    pub fn is_random_access(&self) -> bool {
        self.0.random_access
    }

    /// Runs `f` on the coefficients 0..n.
    pub fn with_prefix<R>(&self, n: usize, f: impl FnOnce(&[Vec<FieldElem>]) -> R) -> R {
        let mut cache = self.0.cache.lock().expect("stream cache poisoned");
        while cache.len() < n {
            let i = cache.len();
            let c = (self.0.gen)(i, &cache);
            debug_assert_eq!(c.len(), self.0.width);
            cache.push(c);
        }
        f(&cache[..n])
    }

    pub fn coefficient(&self, i: usize) -> Vec<FieldElem> {
        self.with_prefix(i + 1, |c| c[i].clone())
    }

    pub fn prefix(&self, n: usize) -> Vec<Vec<FieldElem>> {
        self.with_prefix(n, <[_]>::to_vec)
    }

    /// Coefficients 0..n of one component.
    pub fn component(&self, i: usize, n: usize) -> Vec<FieldElem> {
        self.with_prefix(n, |c| c.iter().map(|v| v[i].clone()).collect())
    }

    /// Visits coefficients in `range` without growing the cache when the
    /// source allows random access; otherwise falls back to the cache.
    pub fn for_each_in(&self, range: std::ops::Range<usize>, mut f: impl FnMut(usize, &[FieldElem])) {
        if self.0.random_access {
            for i in range {
                let c = (self.0.gen)(i, &[]);
                f(i, &c);
            }
        } else {
            let end = range.end;
            self.with_prefix(end, |c| {
                for i in range {
                    f(i, &c[i]);
                }
            });
        }
    }

    /// Stream of (f, 1).
    pub fn augment_constant(&self) -> CoefficientStream {
        let parent = self.clone();
        let field = self.field().clone();
        Self::from_generator(
            self.field(),
            self.width() + 1,
            Source::Derived,
            self.is_random_access(),
            Box::new(move |i, _| {
                let mut v = parent.coefficient_fresh(i);
                v.push(if i == 0 { FieldElem::one(&field) } else { FieldElem::zero(&field) });
                v
            }),
        )
        .with_normalized(self.is_normalized())
    }

    fn coefficient_fresh(&self, i: usize) -> Vec<FieldElem> {
        if self.0.random_access {
            (self.0.gen)(i, &[])
        } else {
            self.coefficient(i)
        }
    }

    /// Stream whose component c is component `spec[c].0` of `self` composed
    /// with z^(q^e), e = `spec[c].1`.
    pub fn compose_components(&self, spec: Vec<(usize, u32)>, q: usize) -> CoefficientStream {
        let parent = self.clone();
        let field = self.field().clone();
        let width = spec.len();
        let steps: Vec<usize> = spec.iter().map(|&(_, e)| q.pow(e)).collect();
        Self::from_generator(
            self.field(),
            width,
            Source::Derived,
            false,
            Box::new(move |i, _| {
                spec.iter()
                    .zip(&steps)
                    .map(|(&(c, _), &st)| {
                        if i % st == 0 {
                            parent.coefficient(i / st)[c].clone()
                        } else {
                            FieldElem::zero(&field)
                        }
                    })
                    .collect()
            }),
        )
    }

    /// Componentwise product with a scalar series given as a width-1 stream.
    pub fn mul_series(&self, s: &CoefficientStream) -> CoefficientStream {
        let parent = self.clone();
        let s = s.clone();
        let field = self.field().clone();
        let width = self.width();
        Self::from_generator(
            self.field(),
            width,
            Source::Derived,
            false,
            Box::new(move |i, _| {
                let sc = s.component(0, i + 1);
                parent.with_prefix(i + 1, |pc| {
                    (0..width)
                        .map(|c| {
                            let mut acc = FieldElem::zero(&field);
                            for (k, sk) in sc.iter().enumerate() {
                                if !sk.is_zero() {
                                    let x = &pc[i - k][c];
                                    if !x.is_zero() {
                                        acc = &acc + &(sk * x);
                                    }
                                }
                            }
                            acc
                        })
                        .collect()
                })
            }),
        )
    }

    /// Scalar stream of the formal unit u = prod_{i >= 0} beta(z^(q^i)),
    /// beta(0) = 1.
    pub fn unit_product(beta: &Poly, q: usize) -> CoefficientStream {
        let field = beta.field().clone();
        let b: Vec<FieldElem> = beta.coeffs().to_vec();
        let f2 = field.clone();
        Self::from_generator(
            &field,
            1,
            Source::Derived,
            false,
            Box::new(move |i, prev| {
                if i == 0 {
                    return vec![FieldElem::one(&f2)];
                }
                // u = beta(z) u(z^q)
                let mut acc = FieldElem::zero(&f2);
                for (j, bj) in b.iter().enumerate().take(i + 1) {
                    if !bj.is_zero() && (i - j) % q == 0 {
                        acc = &acc + &(bj * &prev[(i - j) / q][0]);
                    }
                }
                vec![acc]
            }),
        )
    }

    /// Multiplicative inverse of a scalar stream with constant term 1.
    pub fn inverse_unit(&self) -> CoefficientStream {
        let parent = self.clone();
        let field = self.field().clone();
        Self::from_generator(
            self.field(),
            1,
            Source::Derived,
            false,
            Box::new(move |i, prev| {
                if i == 0 {
                    return vec![FieldElem::one(&field)];
                }
                let pc = parent.component(0, i + 1);
                let mut acc = FieldElem::zero(&field);
                for k in 1..=i {
                    if !pc[k].is_zero() {
                        acc = &acc - &(&pc[k] * &prev[i - k][0]);
                    }
                }
                vec![acc]
            }),
        )
    }

    /// The stream of f~ = u f for the given system.
    pub fn normalize(&self, s: &MahlerSystem) -> CoefficientStream {
        if self.is_normalized() || s.beta().is_one() {
            return self.clone();
        }
        self.mul_series(&Self::unit_product(s.beta(), s.q())).with_normalized(true)
    }

    /// The stream of f = f~ / u for the given system.
    pub fn denormalize(&self, s: &MahlerSystem) -> CoefficientStream {
        if !self.is_normalized() {
            return self.clone();
        }
        let inv = Self::unit_product(s.beta(), s.q()).inverse_unit();
        self.mul_series(&inv)
    }

    /// Stream of the solution of the derivative embedding built by
    /// `MahlerSystem::transform_bbc`, from the stream of f.
    pub fn bbc(&self, s: &MahlerSystem, t: &BbcTransform) -> CoefficientStream {
        if s.b().degree() == Some(0) {
            return self.clone();
        }
        let u = Self::unit_product(s.beta(), s.q());
        let h = if self.is_normalized() { self.clone() } else { self.mul_series(&u) };
        let qn0 = s.q().pow(t.n0 as u32);
        let uinv = u.inverse_unit();
        let field = self.field().clone();
        let n = self.width();
        let order = t.s;
        Self::from_generator(
            self.field(),
            n * (order + 1),
            Source::Derived,
            false,
            Box::new(move |i, _| {
                // coefficients of 1/v(z) = (1/u)(z^(q^n0)) up to index i
                let w: Vec<FieldElem> = (0..=i)
                    .map(|k| {
                        if k % qn0 == 0 {
                            uinv.coefficient(k / qn0)[0].clone()
                        } else {
                            FieldElem::zero(&field)
                        }
                    })
                    .collect();
                h.with_prefix(i + order + 1, |hc| {
                    let mut out = Vec::with_capacity(n * (order + 1));
                    for a in 0..=order {
                        let j = order - a;
                        for c in 0..n {
                            let mut acc = FieldElem::zero(&field);
                            for (k, wk) in w.iter().enumerate() {
                                if wk.is_zero() {
                                    continue;
                                }
                                let m = i - k;
                                let x = &hc[m + j][c];
                                if x.is_zero() {
                                    continue;
                                }
                                let mut fall = BigInt::from(1);
                                for r in 1..=j {
                                    fall *= BigInt::from(m + r);
                                }
                                acc = &acc + &(&x.scale(&BigRational::from_integer(fall)) * wk);
                            }
                            out.push(acc);
                        }
                    }
                    out
                })
            }),
        )
    }

    /// Stream of the degree-d monomials listed in `index`.
    pub fn monomials(&self, index: &MonomialIndex) -> CoefficientStream {
        let parent = self.clone();
        let field = self.field().clone();
        let index = index.clone();
        Self::from_generator(
            self.field(),
            index.len(),
            Source::Derived,
            false,
            Box::new(move |i, _| {
                parent.with_prefix(i + 1, |pc| {
                    index
                        .iter()
                        .map(|exps| {
                            // coefficient i of prod_c f_c^(e_c), by repeated truncated products
                            let mut acc: Vec<FieldElem> = vec![FieldElem::zero(&field); i + 1];
                            acc[0] = FieldElem::one(&field);
                            for (c, &e) in exps.iter().enumerate() {
                                for _ in 0..e {
                                    let mut next = vec![FieldElem::zero(&field); i + 1];
                                    for (a, x) in acc.iter().enumerate() {
                                        if x.is_zero() {
                                            continue;
                                        }
                                        for b in 0..=i - a {
                                            let y = &pc[b][c];
                                            if !y.is_zero() {
                                                next[a + b] = &next[a + b] + &(x * y);
                                            }
                                        }
                                    }
                                    acc = next;
                                }
                            }
                            acc[i].clone()
                        })
                        .collect()
                })
            }),
        )
    }

    /// Stream of the normalized solution f~ of z^nu f~ = A_hat f~(z^q) with
    /// the given first coefficients f~_0 .. f~_T, T = floor(nu/(q-1)).
    pub fn from_recursion(s: &MahlerSystem, seed: Vec<Vec<FieldElem>>) -> Result<CoefficientStream> {
        let n = s.n();
        let q = s.q();
        let nu = s.nu();
        let field = s.field().clone();
        if seed.len() != s.seed_len() {
            return Err(Error::SeedLength { expected: s.seed_len(), found: seed.len() });
        }
        if let Some(v) = seed.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        let layers = coefficient_matrices(s.a_hat());
        let zero = vec![FieldElem::zero(&field); n];
        let rhs = |m: usize, get: &dyn Fn(usize) -> Vec<FieldElem>| -> Vec<FieldElem> {
            let mut acc = zero.clone();
            for (j, layer) in layers.iter().enumerate().take(m + 1) {
                if (m - j) % q != 0 {
                    continue;
                }
                let v = get((m - j) / q);
                let add = layer.apply(&v);
                for (x, y) in acc.iter_mut().zip(add) {
                    *x = &*x + &y;
                }
            }
            acc
        };
        let t0 = seed.len() - 1;
        for m in 0..=t0 + nu {
            let lhs = if m >= nu { seed[m - nu].clone() } else { zero.clone() };
            let r = rhs(m, &|i| seed[i].clone());
            if lhs != r {
                let show = |v: &[FieldElem]| {
                    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                    format!("({})", parts.join(", "))
                };
                return Err(Error::InconsistentSeed { index: m, lhs: show(&lhs), rhs: show(&r) });
            }
        }
        let normalized = !s.beta().is_one();
        let stream = Self::from_generator(
            s.field(),
            n,
            Source::Recursion,
            false,
            Box::new(move |t, prev| {
                if t <= t0 {
                    return seed[t].clone();
                }
                let m = t + nu;
                let mut acc = vec![FieldElem::zero(&field); n];
                for (j, layer) in layers.iter().enumerate().take(m + 1) {
                    if (m - j) % q != 0 {
                        continue;
                    }
                    let add = layer.apply(&prev[(m - j) / q]);
                    for (x, y) in acc.iter_mut().zip(add) {
                        *x = &*x + &y;
                    }
                }
                acc
            }),
        );
        Ok(stream.with_normalized(normalized))
    }
}

/// Coefficient matrices M_j with A(z) = sum_j M_j z^j.
pub(crate) fn coefficient_matrices(a: &Matrix<Poly>) -> Vec<Matrix<FieldElem>> {
    let d = a.max_degree().unwrap_or(0);
    (0..=d).map(|j| a.map(|p| p.coeff(j))).collect()
}

/// Converts the first coefficients of f into those of f~ = u f.
pub fn normalize_seed(s: &MahlerSystem, f_seed: &[Vec<FieldElem>]) -> Vec<Vec<FieldElem>> {
    let u = CoefficientStream::unit_product(s.beta(), s.q()).component(0, f_seed.len());
    convolve(&u, f_seed)
}

/// Inverse of `normalize_seed`.
pub fn denormalize_seed(s: &MahlerSystem, g_seed: &[Vec<FieldElem>]) -> Vec<Vec<FieldElem>> {
    let u = CoefficientStream::unit_product(s.beta(), s.q()).inverse_unit().component(0, g_seed.len());
    convolve(&u, g_seed)
}

fn convolve(u: &[FieldElem], f: &[Vec<FieldElem>]) -> Vec<Vec<FieldElem>> {
    (0..f.len())
        .map(|i| {
            (0..f[i].len())
                .map(|c| {
                    let mut acc = FieldElem::zero(f[i][c].field());
                    for k in 0..=i {
                        acc = &acc + &(&u[k] * &f[i - k][c]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Smallest v < n with a nonzero coefficient of z^v in <w, f>.
pub fn inner_valuation(w: &[Poly], f: &CoefficientStream, n: usize) -> Valuation {
    assert_eq!(w.len(), f.width(), "relation length must match the stream width");
    if w.iter().all(Poly::is_zero) || n == 0 {
        return Valuation::AtLeast(n);
    }
    let field = f.field().clone();
    f.with_prefix(n, |c| {
        for v in 0..n {
            let mut acc = FieldElem::zero(&field);
            for (i, wi) in w.iter().enumerate() {
                for (e, we) in wi.coeffs().iter().enumerate().take(v + 1) {
                    if !we.is_zero() {
                        let x = &c[v - e][i];
                        if !x.is_zero() {
                            acc = &acc + &(we * x);
                        }
                    }
                }
            }
            if !acc.is_zero() {
                return Valuation::Exact(v);
            }
        }
        Valuation::AtLeast(n)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::RatFunc;

    #[test]
    fn unit_product_of_one_minus_z() {
        // prod (1 - z^(2^i)) has coefficients (-1)^(binary digit sum) on all n
        let k = NumberField::rationals();
        let beta = Poly::from_ints(&k, &[1, -1]);
        let u = CoefficientStream::unit_product(&beta, 2).component(0, 64);
        for (n, c) in u.iter().enumerate() {
            let sign = if n.count_ones() % 2 == 0 { 1 } else { -1 };
            assert_eq!(c, &FieldElem::from_int(&k, sign));
        }
        let inv = CoefficientStream::unit_product(&beta, 2).inverse_unit();
        let prod = CoefficientStream::unit_product(&beta, 2).mul_series(&inv).component(0, 20);
        assert!(prod[0].is_one() && prod[1..].iter().all(FieldElem::is_zero));
    }

    #[test]
    fn recursion_for_pole_system() {
        // f(z) = f(z^2)/(1 - z) has solution prod 1/(1 - z^(2^i)); f~ = 1
        let k = NumberField::rationals();
        let a = RatFunc::new(Poly::one(&k), Poly::from_ints(&k, &[1, -1])).unwrap();
        let s = MahlerSystem::new(2, Matrix::from_rows(vec![vec![a]]).unwrap()).unwrap();
        let g = CoefficientStream::from_recursion(&s, vec![vec![FieldElem::one(&k)]]).unwrap();
        assert!(g.is_normalized());
        let c = g.component(0, 100);
        assert!(c[0].is_one() && c[1..].iter().all(FieldElem::is_zero));
        // f counts binary partitions
        let f = g.denormalize(&s).component(0, 10);
        let expect = [1, 1, 2, 2, 4, 4, 6, 6, 10, 10];
        for (x, e) in f.iter().zip(expect) {
            assert_eq!(x, &FieldElem::from_int(&k, e));
        }
    }

    #[test]
    fn seed_validation() {
        let k = NumberField::rationals();
        // z f(z) = f(z^2): nu = 1, q = 2, one seed index beyond 0 is forced
        let a = RatFunc::new(Poly::one(&k), Poly::from_ints(&k, &[0, 1])).unwrap();
        let s = MahlerSystem::new(2, Matrix::from_rows(vec![vec![a]]).unwrap()).unwrap();
        assert_eq!(s.seed_len(), 2);
        let bad = CoefficientStream::from_recursion(&s, vec![vec![FieldElem::one(&k)], vec![FieldElem::zero(&k)]]);
        assert!(matches!(bad, Err(Error::InconsistentSeed { index: 0, .. })));
        let short = CoefficientStream::from_recursion(&s, vec![vec![FieldElem::one(&k)]]);
        assert!(matches!(short, Err(Error::SeedLength { expected: 2, found: 1 })));
    }

    #[test]
    fn zero_relation_has_infinite_valuation() {
        let k = NumberField::rationals();
        let f = CoefficientStream::explicit(&k, 2, vec![vec![FieldElem::one(&k), FieldElem::zero(&k)]]);
        assert_eq!(inner_valuation(&[Poly::zero(&k), Poly::zero(&k)], &f, 50), Valuation::AtLeast(50));
        assert_eq!(inner_valuation(&[Poly::one(&k), Poly::zero(&k)], &f, 50), Valuation::Exact(0));
    }
}
