//! Discovery and certification of linear relations over k(z) between the
//! components of a solution of a Mahler system.

mod bound;
mod certify;
mod kernel;
mod reduce;

use crate::error::Result;
use crate::exactalg::{FieldElem, Poly};
use crate::series::CoefficientStream;
use crate::system::MahlerSystem;

pub use bound::{zero_bound, zero_bound_exact};
pub use certify::{
    certify, checked_order, min_height, sections, Certification, FailureWitness, SectionCertificate, WitnessKind,
};
pub use kernel::{
    incremental_kernel, phi, phi_inv, stream_dense_kernel, DenseKernelTracker, KernelRun, KernelTracker, SColumns,
};
pub use reduce::reduce_by_relation;

use kernel::run_tracker;

/// Default cap on the number of processed columns.
pub const DEFAULT_MAX_COLUMNS: usize = 1_000_000;

/// Above this many unknowns n(h+1) the basis search proceeds by repeated
/// independence decisions and reductions instead of one search at height h.
pub const LITERAL_LIMIT: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Certified,
    Candidate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Literal below `LITERAL_LIMIT`, reduction above.
    Auto,
    /// One kernel search at height 4^n d.
    Literal,
    /// Decide at height floor(d/(q-1)), reduce by any relation found, recurse.
    Reduction,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub max_columns: usize,
    /// Quiet columns before certification is attempted; None means n(h+1).
    pub window: Option<usize>,
    /// Raise `max_columns` to the zero bound c.
    pub full_bound: bool,
    pub strategy: Strategy,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { max_columns: DEFAULT_MAX_COLUMNS, window: None, full_bound: false, strategy: Strategy::Auto }
    }
}

impl SearchOptions {
    fn cap(&self, s: &MahlerSystem, h: usize) -> usize {
        if self.full_bound {
            let c = zero_bound(s.n() as u64, s.d() as u64, s.q() as u64, s.nu() as u64, h as u64);
            usize::try_from(c).unwrap_or(usize::MAX).max(self.max_columns)
        } else {
            self.max_columns
        }
    }

    fn window(&self, n: usize, h: usize) -> usize {
        self.window.unwrap_or(n * (h + 1)).max(1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub w: Vec<Poly>,
    pub status: Status,
    pub certificate: Option<SectionCertificate>,
}

/// Generators of the k(z)-space of relations, each normalized so that its
/// first nonzero coefficient (by component, then degree) is 1.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationBasis {
    pub generators: Vec<Relation>,
    pub rank: usize,
    pub status: Status,
    pub columns_used: usize,
    pub height: usize,
}

impl RelationBasis {
    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }

    pub fn vectors(&self) -> Vec<Vec<Poly>> {
        self.generators.iter().map(|g| g.w.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Independence {
    Independent { columns_used: usize },
    Dependent { relation: Vec<Poly>, certificate: SectionCertificate, columns_used: usize },
    Inconclusive { columns_used: usize },
}

/// Scales w so its first nonzero coefficient is 1.
pub fn normalize_relation(w: &[Poly]) -> Vec<Poly> {
    let lead = w.iter().find_map(|p| p.coeffs().iter().find(|c| !c.is_zero()).cloned());
    match lead {
        Some(c) => {
            let inv = c.inv();
            w.iter().map(|p| p.scale(&inv)).collect()
        }
        None => w.to_vec(),
    }
}

/// Height 4^n d of the basis theorem.
pub fn basis_height(s: &MahlerSystem) -> usize {
    4usize.saturating_pow(s.n() as u32).saturating_mul(s.d())
}

/// Height floor(d/(q-1)) of the independence criterion.
pub fn decision_height(s: &MahlerSystem) -> usize {
    s.d() / (s.q() - 1)
}

/// Decides whether the components of f are linearly independent over k(z).
pub fn decide_independence(s: &MahlerSystem, f: &CoefficientStream) -> Result<Independence> {
    decide_independence_with(s, f, &SearchOptions::default())
}

pub fn decide_independence_with(s: &MahlerSystem, f: &CoefficientStream, opts: &SearchOptions) -> Result<Independence> {
    let h = decision_height(s);
    let cap = opts.cap(s, h);
    let window = opts.window(s.n(), h);
    let mut t = KernelTracker::new(s.field(), s.n(), h);
    loop {
        let stable = run_tracker(&mut t, f, cap, window);
        if t.is_empty() {
            return Ok(Independence::Independent { columns_used: t.columns() });
        }
        if !stable {
            return Ok(Independence::Inconclusive { columns_used: t.columns() });
        }
        let mut gens: Vec<(usize, Vec<Poly>)> = t.degrees().into_iter().zip(t.generators()).collect();
        gens.sort_by_key(|(d, _)| *d);
        for (_, g) in gens {
            let g = normalize_relation(&g);
            if let Certification::Certified(c) = certify(&g, s, f, None)? {
                return Ok(Independence::Dependent { relation: g, certificate: c, columns_used: t.columns() });
            }
        }
    }
}

/// Computes generators of the space of k(z)-linear relations among the
/// components of f.
pub fn find_relations(s: &MahlerSystem, f: &CoefficientStream, opts: &SearchOptions) -> Result<RelationBasis> {
    let h = basis_height(s);
    let literal = match opts.strategy {
        Strategy::Literal => true,
        Strategy::Reduction => false,
        Strategy::Auto => s.n().saturating_mul(h.saturating_add(1)) <= LITERAL_LIMIT,
    };
    if literal {
        find_literal(s, f, opts, h)
    } else {
        find_by_reduction(s, f, opts)
    }
}

fn find_literal(s: &MahlerSystem, f: &CoefficientStream, opts: &SearchOptions, h: usize) -> Result<RelationBasis> {
    let cap = opts.cap(s, h);
    let window = opts.window(s.n(), h);
    let mut t = KernelTracker::new(s.field(), s.n(), h);
    loop {
        let stable = run_tracker(&mut t, f, cap, window);
        let gens: Vec<Vec<Poly>> = t.generators().iter().map(|g| normalize_relation(g)).collect();
        if t.is_empty() || !stable {
            let status = if t.is_empty() { Status::Certified } else { Status::Candidate };
            let generators: Vec<Relation> =
                gens.into_iter().map(|w| Relation { w, status: Status::Candidate, certificate: None }).collect();
            return Ok(RelationBasis {
                rank: generators.len(),
                generators,
                status,
                columns_used: t.columns(),
                height: h,
            });
        }
        let mut certified = Vec::with_capacity(gens.len());
        for g in &gens {
            match certify(g, s, f, None)? {
                Certification::Certified(c) => certified.push(c),
                Certification::Failed(_) => break,
            }
        }
        if certified.len() == gens.len() {
            let generators: Vec<Relation> = gens
                .into_iter()
                .zip(certified)
                .map(|(w, c)| Relation { w, status: Status::Certified, certificate: Some(c) })
                .collect();
            return Ok(RelationBasis {
                rank: generators.len(),
                generators,
                status: Status::Certified,
                columns_used: t.columns(),
                height: h,
            });
        }
    }
}

fn find_by_reduction(s: &MahlerSystem, f: &CoefficientStream, opts: &SearchOptions) -> Result<RelationBasis> {
    let h = decision_height(s);
    let (first, columns_used) = match decide_independence_with(s, f, opts)? {
        Independence::Independent { columns_used } => {
            return Ok(RelationBasis { generators: Vec::new(), rank: 0, status: Status::Certified, columns_used, height: h })
        }
        Independence::Inconclusive { columns_used } => {
            return Ok(RelationBasis { generators: Vec::new(), rank: 0, status: Status::Candidate, columns_used, height: h })
        }
        Independence::Dependent { relation, columns_used, .. } => (relation, columns_used),
    };
    let n = s.n();
    let field = s.field().clone();
    let lift = |w: Vec<Poly>, orig: &[usize]| -> Vec<Poly> {
        let mut out = vec![Poly::zero(&field); n];
        for (&i, p) in orig.iter().zip(w) {
            out[i] = p;
        }
        normalize_relation(&out)
    };
    // Rel(f) = k(z) w + Rel(remaining functions) at every elimination step
    let mut found = vec![first.clone()];
    let mut orig: Vec<usize> = (0..n).collect();
    let (mut mat, mut keep) = reduce::reduce_matrix(s.matrix(), s.q(), &first)?;
    let mut status = Status::Certified;
    let mut columns = columns_used;
    loop {
        orig = keep.iter().map(|&i| orig[i]).collect();
        if orig.is_empty() {
            break;
        }
        match MahlerSystem::new(s.q(), mat.clone()) {
            Ok(sub) => {
                let inner = find_relations(&sub, &select_components(f, &orig), opts)?;
                columns = columns.max(inner.columns_used);
                if inner.status == Status::Candidate {
                    status = Status::Candidate;
                }
                found.extend(inner.generators.into_iter().map(|g| lift(g.w, &orig)));
                break;
            }
            Err(crate::error::Error::DegenerateSystem(_)) => {
                // c B = 0 gives c f' = c B f'(z^q) = 0
                let c = mat.left_null_vector()?.expect("singular matrix has a null vector");
                let c = reduce::clear_denominators(&c);
                found.push(lift(c.clone(), &orig));
                (mat, keep) = reduce::reduce_matrix(&mat, s.q(), &c)?;
            }
            Err(e) => return Err(e),
        }
    }
    let mut generators = Vec::with_capacity(found.len());
    for w in found {
        let rel = match certify(&w, s, f, None)? {
            Certification::Certified(c) => Relation { w, status: Status::Certified, certificate: Some(c) },
            Certification::Failed(_) => {
                status = Status::Candidate;
                Relation { w, status: Status::Candidate, certificate: None }
            }
        };
        generators.push(rel);
    }
    Ok(RelationBasis { rank: generators.len(), generators, status, columns_used: columns, height: h })
}

/// Stream of the components listed in `keep`.
pub fn select_components(f: &CoefficientStream, keep: &[usize]) -> CoefficientStream {
    f.compose_components(keep.iter().map(|&i| (i, 0)).collect(), 2)
}

/// Evaluates each generator at alpha.
pub fn evaluate_relations(gens: &[Vec<Poly>], alpha: &FieldElem) -> Vec<Vec<FieldElem>> {
    gens.iter().map(|w| w.iter().map(|p| p.eval(alpha)).collect()).collect()
}
