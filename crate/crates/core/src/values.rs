//! Linear relations over k between the values f_1(alpha), ..., f_n(alpha)
//! at a point alpha of k in the punctured unit disk.
//!
//! The relation space is ker A_l(alpha) + ev_alpha(Rel), where l is the
//! least integer with |alpha^(q^l)| < rho and Rel is the space of k(z)-linear
//! relations between the functions. When the orbit of alpha meets a pole of
//! A, the system is first embedded by the derivative transform and doubled
//! until alpha is regular, and relations are pulled back.

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactalg::interval::RatInterval;
use crate::exactalg::{
    intersect, left_kernel, subspace_sum, ComplexBox, FieldElem, Matrix, Poly, RatFunc, SubspaceBasis,
};
use crate::relations::{find_relations, SearchOptions, Status};
use crate::series::CoefficientStream;
use crate::system::{MahlerSystem, PointClass};

/// Options for point computations.
#[derive(Clone, Debug, Default)]
pub struct PointOptions {
    /// Iteration depth; defaults to l_star and must not be smaller.
    pub l: Option<usize>,
    /// Use the embedding and doubling route even when it is not needed.
    pub force_pipeline: bool,
    pub search: SearchOptions,
}

/// How the relations at a point were obtained.
#[derive(Clone, Debug, PartialEq)]
pub struct Pipeline {
    pub bbc: bool,
    /// Order s of the derivative embedding.
    pub order: usize,
    pub lambda: Vec<FieldElem>,
    pub doublings: usize,
    /// Size of the system on which the relations were computed.
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointReport {
    pub alpha: FieldElem,
    pub class: PointClass,
    pub l: usize,
    /// ker_k A_l(alpha), absent when the pipeline was used.
    pub kernel: Option<SubspaceBasis>,
    /// Values at alpha of the functional relations.
    pub functional_eval: SubspaceBasis,
    pub value_relations: SubspaceBasis,
    /// Status of the functional relation basis used.
    pub status: Status,
    pub pipeline: Option<Pipeline>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Algebraic(FieldElem),
    Transcendental,
    Inconclusive(String),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Algebraic(v) => write!(f, "algebraic, value {v}"),
            Verdict::Transcendental => write!(f, "transcendental"),
            Verdict::Inconclusive(r) => write!(f, "inconclusive: {r}"),
        }
    }
}

/// Verdicts for every f_i(alpha), computed on the system augmented by the
/// constant function.
#[derive(Clone, Debug, PartialEq)]
pub struct VerdictReport {
    pub report: PointReport,
    pub verdicts: Vec<Verdict>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedVerdict {
    pub verdict: Verdict,
    /// A relation (omega, -value) in the augmented value relations.
    pub witness: Option<Vec<FieldElem>>,
    /// The witness split into a kernel part and a functional part.
    pub decomposition: Option<(Vec<FieldElem>, Vec<FieldElem>)>,
}

/// Replaces generators by combinations divided by (z - alpha) until their
/// values at alpha are independent; the values then span ev_alpha(Rel).
fn saturate(mut gens: Vec<Vec<Poly>>, alpha: &FieldElem) -> Vec<Vec<FieldElem>> {
    let field = alpha.field().clone();
    let lin = Poly::new(&field, vec![-alpha, FieldElem::one(&field)]);
    let deg = |w: &[Poly]| w.iter().filter_map(Poly::degree).max().unwrap_or(0);
    loop {
        let vals: Vec<Vec<FieldElem>> = gens.iter().map(|w| w.iter().map(|p| p.eval(alpha)).collect()).collect();
        if gens.is_empty() {
            return vals;
        }
        let m = Matrix::from_rows(vals.clone()).expect("rectangular");
        let ker = left_kernel(&m, &field);
        let Some(c) = ker.rows().first() else {
            return vals;
        };
        let i = (0..gens.len()).filter(|&i| !c[i].is_zero()).max_by_key(|&i| deg(&gens[i])).expect("nonzero");
        let n = gens[i].len();
        let combo: Vec<Poly> = (0..n)
            .map(|j| {
                let mut acc = Poly::zero(&field);
                for (ci, g) in c.iter().zip(&gens) {
                    if !ci.is_zero() {
                        acc = &acc + &g[j].scale(ci);
                    }
                }
                acc.exact_div(&lin)
            })
            .collect();
        gens[i] = combo;
    }
}

/// Relations over k between the values f_i(alpha).
pub fn value_relation_basis(
    s: &MahlerSystem,
    f: &CoefficientStream,
    alpha: &FieldElem,
    opts: &PointOptions,
) -> Result<PointReport> {
    if f.width() != s.n() {
        return Err(Error::DimensionMismatch { expected: s.n(), found: f.width() });
    }
    let class = s.classify_point(alpha)?;
    let l = opts.l.unwrap_or(class.l_star);
    if l < class.l_star {
        return Err(Error::Precondition(format!("l = {l} is below the certified depth {}", class.l_star)));
    }
    let direct = if opts.force_pipeline {
        None
    } else {
        match s.iterate_at(l, alpha) {
            Ok(m) => Some(m),
            Err(Error::PoleHit(_)) => None,
            Err(e) => return Err(e),
        }
    };
    let field = s.field().clone();
    let n = s.n();
    if let Some(al) = direct {
        let kernel = left_kernel(&al, &field);
        let rels = find_relations(s, f, &opts.search)?;
        let functional_eval = SubspaceBasis::span(&field, n, saturate(rels.vectors(), alpha))?;
        let value_relations = subspace_sum(&kernel, &functional_eval)?;
        return Ok(PointReport {
            alpha: alpha.clone(),
            class,
            l,
            kernel: Some(kernel),
            functional_eval,
            value_relations,
            status: rels.status,
            pipeline: None,
        });
    }
    let bbc = s.transform_bbc(alpha)?;
    let g = f.bbc(s, &bbc);
    let (regular, j) = bbc.system.dedouble_until_regular(alpha)?;
    let base = find_relations(&bbc.system, &g, &opts.search)?;
    let mut big = bbc.system.clone();
    let mut rels = base.vectors();
    for _ in 0..j {
        rels = doubled_relations(&big, &rels);
        big = big.dedouble();
    }
    debug_assert!(big == regular);
    let big = regular;
    let big_class = big.classify_point(alpha)?;
    let big_kernel = left_kernel(&big.iterate_at(big_class.l_star, alpha)?, &field);
    let big_eval = SubspaceBasis::span(&field, big.n(), saturate(rels, alpha))?;
    let inner_relations = subspace_sum(&big_kernel, &big_eval)?;
    // relations supported on the coordinates attached to f, then unscaled
    let dim = big.n();
    let support: Vec<Vec<FieldElem>> = bbc
        .index
        .iter()
        .map(|&i| {
            let mut e = vec![FieldElem::zero(&field); dim];
            e[i] = FieldElem::one(&field);
            e
        })
        .collect();
    let onto = intersect(&inner_relations, &SubspaceBasis::span(&field, dim, support)?)?;
    let pulled: Vec<Vec<FieldElem>> = onto
        .rows()
        .iter()
        .map(|r| bbc.index.iter().zip(&bbc.lambda).map(|(&i, lam)| &r[i] * lam).collect())
        .collect();
    let value_relations = SubspaceBasis::span(&field, n, pulled)?;
    Ok(PointReport {
        alpha: alpha.clone(),
        class,
        l,
        kernel: None,
        functional_eval: value_relations.clone(),
        value_relations,
        status: base.status,
        pipeline: Some(Pipeline {
            bbc: bbc.s > 0 || bbc.n0 > 0,
            order: bbc.s,
            lambda: bbc.lambda.clone(),
            doublings: j,
            size: dim,
        }),
    })
}

/// Relations of the doubled system from those of `s`: the solution
/// (f, f(z^q)) satisfies w1 f + w2 f(z^q) = 0 iff w1 A + w2 is a relation
/// of f(z^q). Generators: (e_i, -e_i A) and (0, r(z^q)).
fn doubled_relations(s: &MahlerSystem, rels: &[Vec<Poly>]) -> Vec<Vec<Poly>> {
    let n = s.n();
    let field = s.field().clone();
    let zero = RatFunc::zero(&field);
    let mut out = Vec::with_capacity(n + rels.len());
    for i in 0..n {
        let mut v = vec![zero.clone(); 2 * n];
        v[i] = RatFunc::one(&field);
        for j in 0..n {
            v[n + j] = -s.matrix().get(i, j);
        }
        out.push(clear_denominators(&v));
    }
    for r in rels {
        let mut v = vec![Poly::zero(&field); n];
        v.extend(r.iter().map(|p| p.compose_power(s.q())));
        out.push(v);
    }
    out
}

fn clear_denominators(c: &[RatFunc]) -> Vec<Poly> {
    let field = c[0].field().clone();
    let l = c.iter().fold(Poly::one(&field), |acc, x| acc.lcm(x.den()));
    c.iter().map(|x| (x.num() * &l).exact_div(x.den())).collect()
}

fn completeness_gap(report: &PointReport) -> Option<String> {
    (report.status != Status::Certified).then(|| "functional relations are not certified".to_string())
}

/// Relations that are proven: all of them when the functional relations are
/// certified, otherwise only ker A_l(alpha).
fn proven_relations(report: &PointReport) -> SubspaceBasis {
    if report.status == Status::Certified {
        return report.value_relations.clone();
    }
    match &report.kernel {
        Some(k) => k.clone(),
        None => SubspaceBasis::zero(report.value_relations.field(), report.value_relations.ambient()),
    }
}

/// Decides for every i whether f_i(alpha) lies in k or is transcendental.
pub fn verdict(s: &MahlerSystem, f: &CoefficientStream, alpha: &FieldElem, opts: &PointOptions) -> Result<VerdictReport> {
    let n = s.n();
    let report = value_relation_basis(&s.augment_constant(), &f.augment_constant(), alpha, opts)?;
    let field = s.field().clone();
    let gap = completeness_gap(&report);
    let proven = proven_relations(&report);
    let verdicts = (0..n)
        .map(|i| {
            let mut e = vec![FieldElem::zero(&field); n + 1];
            e[i] = FieldElem::one(&field);
            match solve_value(&proven, &e)? {
                Some((v, _)) => Ok(Verdict::Algebraic(v)),
                None => Ok(match &gap {
                    Some(r) => Verdict::Inconclusive(r.clone()),
                    None => Verdict::Transcendental,
                }),
            }
        })
        .collect::<Result<_>>()?;
    Ok(VerdictReport { report, verdicts })
}

/// Looks for x with (omega, -x) in the space; omega has length n+1 with a
/// zero last entry.
fn solve_value(space: &SubspaceBasis, omega: &[FieldElem]) -> Result<Option<(FieldElem, Vec<FieldElem>)>> {
    let field = space.field().clone();
    let m = omega.len();
    let mut last = vec![FieldElem::zero(&field); m];
    last[m - 1] = FieldElem::one(&field);
    let plane = SubspaceBasis::span(&field, m, vec![omega.to_vec(), last])?;
    let meet = intersect(space, &plane)?;
    let k = omega.iter().position(|x| !x.is_zero()).expect("nonzero weights");
    for r in meet.rows() {
        if !r[k].is_zero() {
            let a = r[k].div(&omega[k]);
            let v: Vec<FieldElem> = r.iter().map(|x| x.div(&a)).collect();
            let value = -v[m - 1].clone();
            return Ok(Some((value, v)));
        }
    }
    Ok(None)
}

/// Decides whether sum_i omega_i f_i(alpha) lies in k.
pub fn weighted_verdict(
    s: &MahlerSystem,
    f: &CoefficientStream,
    alpha: &FieldElem,
    omega: &[FieldElem],
    opts: &PointOptions,
) -> Result<WeightedVerdict> {
    let n = s.n();
    if omega.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: omega.len() });
    }
    if omega.iter().all(FieldElem::is_zero) {
        return Ok(WeightedVerdict {
            verdict: Verdict::Algebraic(FieldElem::zero(s.field())),
            witness: None,
            decomposition: None,
        });
    }
    let report = value_relation_basis(&s.augment_constant(), &f.augment_constant(), alpha, opts)?;
    let mut w = omega.to_vec();
    w.push(FieldElem::zero(s.field()));
    match solve_value(&proven_relations(&report), &w)? {
        Some((value, witness)) => {
            let decomposition = report.kernel.as_ref().and_then(|k| split(k, &report.functional_eval, &witness));
            Ok(WeightedVerdict { verdict: Verdict::Algebraic(value), witness: Some(witness), decomposition })
        }
        None => Ok(WeightedVerdict {
            verdict: match completeness_gap(&report) {
                Some(r) => Verdict::Inconclusive(r),
                None => Verdict::Transcendental,
            },
            witness: None,
            decomposition: None,
        }),
    }
}

/// Writes v = a + b with a in `u` and b in `w`, preferring the kernel part.
fn split(u: &SubspaceBasis, w: &SubspaceBasis, v: &[FieldElem]) -> Option<(Vec<FieldElem>, Vec<FieldElem>)> {
    let field = u.field().clone();
    let mut rows: Vec<Vec<FieldElem>> = u.rows().to_vec();
    rows.extend(w.rows().iter().cloned());
    rows.push(v.to_vec());
    let m = Matrix::from_rows(rows).ok()?;
    let ker = left_kernel(&m, &field);
    let last = m.rows() - 1;
    let c = ker.rows().iter().find(|c| !c[last].is_zero())?;
    let scale = -c[last].inv();
    let mut a = vec![FieldElem::zero(&field); v.len()];
    for (ci, r) in c.iter().zip(u.rows()) {
        for (x, y) in a.iter_mut().zip(r) {
            *x = &*x + &(&(ci * &scale) * y);
        }
    }
    let b = v.iter().zip(&a).map(|(x, y)| x - y).collect();
    Some((a, b))
}

/// One evaluated relation or value claim.
#[derive(Clone, Debug)]
pub struct Residual {
    pub label: String,
    pub ball: ComplexBox,
    pub contains_zero: bool,
}

/// Result of `numeric_check`.
#[derive(Clone, Debug)]
pub struct NumericCheck {
    pub residuals: Vec<Residual>,
    /// Bound on each tail sum_(m >= N) |f_(i,m) alpha^m|.
    pub tail: BigRational,
    /// False when the coefficient bound was estimated from the prefix.
    pub tail_certified: bool,
}

impl NumericCheck {
    pub fn all_contain_zero(&self) -> bool {
        self.residuals.iter().all(|r| r.contains_zero)
    }
}

/// Balls containing f_i(alpha) from N terms plus a tail bound. Without a
/// coefficient bound, twice the largest modulus seen in the prefix is used.
pub fn evaluate_at(
    f: &CoefficientStream,
    alpha: &FieldElem,
    terms: usize,
    precision: u32,
    coefficient_bound: Option<&BigRational>,
) -> Result<(Vec<ComplexBox>, BigRational, bool)> {
    if f.is_normalized() {
        return Err(Error::Precondition("numeric evaluation needs the unnormalized stream".into()));
    }
    let a = alpha.embed_ball(precision)?;
    let abs = a.abs_upper();
    if abs >= BigRational::one() {
        return Err(Error::PointOutsideDisk(alpha.to_string()));
    }
    let n = f.width();
    let mut cache: HashMap<FieldElem, ComplexBox> = HashMap::new();
    let mut sums = vec![ComplexBox::zero(); n];
    let mut seen = BigRational::zero();
    let mut pw = ComplexBox::one();
    let bits = precision + 16;
    let coeffs = f.prefix(terms);
    for c in &coeffs {
        for (i, x) in c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let b = match cache.get(x) {
                Some(b) => b.clone(),
                None => {
                    let b = x.embed_ball(bits)?;
                    let m = b.abs_upper();
                    if m > seen {
                        seen = m;
                    }
                    cache.insert(x.clone(), b.clone());
                    b
                }
            };
            sums[i] = sums[i].add(&b.mul(&pw)).round(bits);
        }
        pw = pw.mul(&a).round(bits);
    }
    let (bound, certified) = match coefficient_bound {
        Some(b) => (b.clone(), true),
        None => (seen * BigRational::from_integer(2.into()), false),
    };
    let mut abs_n = BigRational::one();
    for _ in 0..terms {
        abs_n = crate::exactalg::interval::round_up(&(&abs_n * &abs), 64);
    }
    let tail = bound * abs_n / (BigRational::one() - abs);
    let tail = crate::exactalg::interval::round_up(&tail, 64);
    let pad = RatInterval::new(-tail.clone(), tail.clone());
    let balls = sums.into_iter().map(|s| ComplexBox::new(s.re.add(&pad), s.im.add(&pad))).collect();
    Ok((balls, tail, certified))
}

fn combine(v: &[FieldElem], balls: &[ComplexBox], bits: u32) -> Result<ComplexBox> {
    let mut acc = ComplexBox::zero();
    for (x, b) in v.iter().zip(balls) {
        if !x.is_zero() {
            acc = acc.add(&x.embed_ball(bits)?.mul(b)).round(bits);
        }
    }
    Ok(acc)
}

/// Checks every value relation of the report, and every algebraic value in
/// `verdicts`, against partial sums of f at alpha. `f` must be the stream
/// the report was computed from (augmented when verdicts are given).
pub fn numeric_check(
    report: &PointReport,
    f: &CoefficientStream,
    verdicts: &[Verdict],
    terms: usize,
    precision: u32,
    coefficient_bound: Option<&BigRational>,
) -> Result<NumericCheck> {
    let (balls, tail, tail_certified) = evaluate_at(f, &report.alpha, terms, precision, coefficient_bound)?;
    let bits = precision + 16;
    let mut residuals = Vec::new();
    for (k, v) in report.value_relations.rows().iter().enumerate() {
        let ball = combine(v, &balls, bits)?;
        residuals.push(Residual { label: format!("relation {k}"), contains_zero: ball.contains_zero(), ball });
    }
    for (i, vd) in verdicts.iter().enumerate() {
        if let Verdict::Algebraic(x) = vd {
            let ball = balls[i].sub(&x.embed_ball(bits)?);
            residuals.push(Residual { label: format!("f{} - value", i + 1), contains_zero: ball.contains_zero(), ball });
        }
    }
    Ok(NumericCheck { residuals, tail, tail_certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::NumberField;
    use crate::fixtures::thue3;
    use crate::series::{inner_valuation, Valuation};
    use crate::system::dedouble_components;

    fn ints(k: &std::sync::Arc<crate::exactalg::NumberField>, v: &[i64]) -> Vec<FieldElem> {
        v.iter().map(|&x| FieldElem::from_int(k, x)).collect()
    }

    #[test]
    fn saturation_divides_out_common_root() {
        // (z - 1/2)(1, 1) and (1, 0) evaluate dependently at 1/2
        let k = NumberField::rationals();
        let half = FieldElem::from_rational(&k, BigRational::new(1.into(), 2.into()));
        let lin = Poly::new(&k, vec![-&half, FieldElem::one(&k)]);
        let gens = vec![vec![lin.clone(), lin], vec![Poly::one(&k), Poly::zero(&k)]];
        let vals = saturate(gens, &half);
        let span = SubspaceBasis::span(&k, 2, vals).unwrap();
        assert_eq!(span.dim(), 2);
    }

    #[test]
    fn doubled_relations_hold_on_stacked_stream() {
        let k = NumberField::rationals();
        let (s, f) = thue3(&k).unwrap();
        let (s, f) = (s.augment_constant(), f.augment_constant());
        let rel = vec![Poly::from_ints(&k, &[1, -1]), Poly::from_ints(&k, &[1, -1]), Poly::from_ints(&k, &[-1])];
        let stacked = f.compose_components(dedouble_components(3, 1), 3);
        for w in doubled_relations(&s, &[rel]) {
            assert_eq!(inner_valuation(&w, &stacked, 500), Valuation::AtLeast(500));
        }
    }

    #[test]
    fn value_is_read_off_the_relation_plane() {
        let k = NumberField::rationals();
        let space = SubspaceBasis::span(&k, 3, vec![ints(&k, &[2, 0, 1])]).unwrap();
        let (v, _) = solve_value(&space, &ints(&k, &[1, 0, 0])).unwrap().unwrap();
        assert_eq!(v, FieldElem::from_rational(&k, BigRational::new((-1).into(), 2.into())));
        assert!(solve_value(&space, &ints(&k, &[0, 1, 0])).unwrap().is_none());
    }

    #[test]
    fn uncertified_relations_never_give_values() {
        let k = crate::fixtures::golden_field();
        let (s, f) = thue3(&k).unwrap();
        let half = FieldElem::from_rational(&k, BigRational::new(1.into(), 2.into()));
        let mut opts = PointOptions::default();
        opts.search.max_columns = 3;
        let vr = verdict(&s, &f, &half, &opts).unwrap();
        assert_eq!(vr.report.status, Status::Candidate);
        assert!(vr.verdicts.iter().all(|v| matches!(v, Verdict::Inconclusive(_))));
    }

    #[test]
    fn verdict_display() {
        let k = NumberField::rationals();
        assert_eq!(Verdict::Algebraic(FieldElem::from_int(&k, 3)).to_string(), "algebraic, value 3");
        assert_eq!(Verdict::Transcendental.to_string(), "transcendental");
    }
}
