//! Left kernels of the striped matrix S(h, M, f), maintained column by column.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactalg::{FieldElem, NumberField, Poly, SubspaceBasis};
use crate::series::CoefficientStream;

/// Columns of S(h, M, f): column i stacks f_i, f_(i-1), ..., f_(i-h), with
/// f_j = 0 for j < 0.
#[derive(Clone, Debug)]
pub struct SColumns {
    stream: CoefficientStream,
    h: usize,
}

impl SColumns {
    pub fn new(stream: &CoefficientStream, h: usize) -> Self {
        SColumns { stream: stream.clone(), h }
    }

    pub fn height(&self) -> usize {
        self.h
    }

    /// Length n(h+1) of every column.
    pub fn rows(&self) -> usize {
        self.stream.width() * (self.h + 1)
    }

    pub fn column(&self, i: usize) -> Vec<FieldElem> {
        let n = self.stream.width();
        let field = self.stream.field().clone();
        self.stream.with_prefix(i + 1, |c| {
            let mut out = Vec::with_capacity(n * (self.h + 1));
            for e in 0..=self.h {
                if e <= i {
                    out.extend(c[i - e].iter().cloned());
                } else {
                    out.extend(std::iter::repeat_with(|| FieldElem::zero(&field)).take(n));
                }
            }
            out
        })
    }
}

/// lambda = (w_0, ..., w_h) in (k^n)^(h+1) as the polynomial vector sum w_e z^e.
pub fn phi(lambda: &[FieldElem], n: usize, field: &Arc<NumberField>) -> Vec<Poly> {
    (0..n)
        .map(|i| Poly::new(field, lambda.iter().skip(i).step_by(n).cloned().collect()))
        .collect()
}

/// Inverse of `phi` at height h.
pub fn phi_inv(w: &[Poly], h: usize) -> Vec<FieldElem> {
    let n = w.len();
    let mut out = Vec::with_capacity(n * (h + 1));
    for e in 0..=h {
        for p in w {
            out.push(p.coeff(e));
        }
    }
    out
}

/// Literal left-kernel tracker: keeps a basis of { lambda : lambda S = 0 }
/// and updates it by elimination for every new column.
#[derive(Clone, Debug)]
pub struct DenseKernelTracker {
    field: Arc<NumberField>,
    dim: usize,
    basis: Vec<Vec<FieldElem>>,
    columns: usize,
}

impl DenseKernelTracker {
    pub fn new(field: &Arc<NumberField>, dim: usize) -> Self {
        let basis = SubspaceBasis::full(field, dim).rows().to_vec();
        DenseKernelTracker { field: field.clone(), dim, basis, columns: 0 }
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn kernel_dim(&self) -> usize {
        self.basis.len()
    }

    /// Applies one column; returns true when the kernel shrank.
    pub fn push(&mut self, col: &[FieldElem]) -> bool {
        assert_eq!(col.len(), self.dim);
        self.columns += 1;
        if self.basis.is_empty() {
            return false;
        }
        let dots: Vec<FieldElem> = self
            .basis
            .iter()
            .map(|b| {
                let mut acc = FieldElem::zero(&self.field);
                for (x, y) in b.iter().zip(col) {
                    if !x.is_zero() && !y.is_zero() {
                        acc = &acc + &(x * y);
                    }
                }
                acc
            })
            .collect();
        let Some(p) = dots.iter().position(|d| !d.is_zero()) else {
            return false;
        };
        let pivot = self.basis.remove(p);
        let dp = dots[p].clone();
        let mut k = 0;
        for (j, d) in dots.iter().enumerate() {
            if j == p {
                continue;
            }
            if !d.is_zero() {
                let f = d.div(&dp);
                for (x, y) in self.basis[k].iter_mut().zip(&pivot) {
                    if !y.is_zero() {
                        *x = &*x - &(&f * y);
                    }
                }
            }
            k += 1;
        }
        true
    }

    pub fn basis(&self) -> SubspaceBasis {
        SubspaceBasis::span(&self.field, self.dim, self.basis.clone()).expect("consistent lengths")
    }
}

/// One row of an order basis: a polynomial vector stored by degree, and its
/// degree delta.
#[derive(Clone, Debug)]
struct ApproxRow {
    coeffs: Vec<Vec<FieldElem>>,
    delta: usize,
}

/// Kernel of S(h, M, f) through a row-reduced order basis of the
/// approximants of f. After M columns the kernel is exactly
/// span{ z^e P_j : e + delta_j <= h } over the rows P_j still of degree <= h.
#[derive(Clone, Debug)]
pub struct KernelTracker {
    field: Arc<NumberField>,
    n: usize,
    h: usize,
    rows: Vec<ApproxRow>,
    columns: usize,
}

impl KernelTracker {
    pub fn new(field: &Arc<NumberField>, n: usize, h: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut v = vec![FieldElem::zero(field); n];
                v[i] = FieldElem::one(field);
                ApproxRow { coeffs: vec![v], delta: 0 }
            })
            .collect();
        KernelTracker { field: field.clone(), n, h, rows, columns: 0 }
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn kernel_dim(&self) -> usize {
        self.rows.iter().map(|r| self.h + 1 - r.delta).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Processes the next column using the stream; returns true when the
    /// kernel shrank.
    pub fn push(&mut self, f: &CoefficientStream) -> bool {
        let m = self.columns;
        self.columns += 1;
        if self.rows.is_empty() {
            return false;
        }
        let field = self.field.clone();
        let residuals: Vec<FieldElem> = f.with_prefix(m + 1, |c| {
            self.rows
                .iter()
                .map(|r| {
                    let mut acc = FieldElem::zero(&field);
                    for (e, v) in r.coeffs.iter().enumerate().take(m + 1) {
                        for (x, y) in v.iter().zip(&c[m - e]) {
                            if !x.is_zero() && !y.is_zero() {
                                acc = &acc + &(x * y);
                            }
                        }
                    }
                    acc
                })
                .collect()
        });
        let Some(p) = (0..self.rows.len())
            .filter(|&j| !residuals[j].is_zero())
            .min_by_key(|&j| (self.rows[j].delta, j))
        else {
            return false;
        };
        let inv = residuals[p].inv();
        let pivot = self.rows[p].clone();
        for (j, r) in residuals.iter().enumerate() {
            if j == p || r.is_zero() {
                continue;
            }
            let f = r * &inv;
            let row = &mut self.rows[j];
            for (e, v) in pivot.coeffs.iter().enumerate() {
                for (x, y) in row.coeffs[e].iter_mut().zip(v) {
                    if !y.is_zero() {
                        *x = &*x - &(&f * y);
                    }
                }
            }
        }
        let row = &mut self.rows[p];
        row.coeffs.insert(0, vec![FieldElem::zero(&field); self.n]);
        row.delta += 1;
        if row.delta > self.h {
            self.rows.remove(p);
        }
        true
    }

    /// Rows of degree <= h; they generate the height-h kernel as a module.
    pub fn generators(&self) -> Vec<Vec<Poly>> {
        self.rows
            .iter()
            .map(|r| {
                (0..self.n)
                    .map(|i| Poly::new(&self.field, r.coeffs.iter().map(|v| v[i].clone()).collect()))
                    .collect()
            })
            .collect()
    }

    /// Degrees of the generators.
    pub fn degrees(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.delta).collect()
    }

    /// The kernel in the coordinates of (k^n)^(h+1).
    pub fn basis(&self) -> SubspaceBasis {
        let dim = self.n * (self.h + 1);
        let mut vecs = Vec::new();
        for (g, r) in self.generators().iter().zip(&self.rows) {
            for e in 0..=self.h - r.delta {
                let shifted: Vec<Poly> = g.iter().map(|p| p.shift(e)).collect();
                vecs.push(phi_inv(&shifted, self.h));
            }
        }
        SubspaceBasis::span(&self.field, dim, vecs).expect("consistent lengths")
    }
}

/// Outcome of `incremental_kernel`.
#[derive(Clone, Debug)]
pub struct KernelRun {
    pub kernel: SubspaceBasis,
    pub generators: Vec<Vec<Poly>>,
    pub columns_used: usize,
    pub stabilized: bool,
}

/// Processes columns until the kernel is {0}, has not changed for `window`
/// columns, or `max_columns` columns were used.
pub fn incremental_kernel(f: &CoefficientStream, h: usize, max_columns: usize, window: usize) -> KernelRun {
    let mut t = KernelTracker::new(f.field(), f.width(), h);
    let stabilized = run_tracker(&mut t, f, max_columns, window);
    KernelRun { kernel: t.basis(), generators: t.generators(), columns_used: t.columns(), stabilized }
}

/// Pushes exactly `columns` columns of S(h, M, f) through a dense tracker,
/// generating coefficients on the fly so that nothing is cached. The stream
/// must allow random access.
pub fn stream_dense_kernel(
    f: &CoefficientStream,
    h: usize,
    columns: usize,
    mut progress: impl FnMut(usize),
) -> Result<DenseKernelTracker> {
    if !f.is_random_access() {
        return Err(Error::Precondition("streaming the full bound needs a random-access stream".into()));
    }
    let n = f.width();
    let field = f.field().clone();
    let mut t = DenseKernelTracker::new(&field, n * (h + 1));
    let zero = vec![FieldElem::zero(&field); n];
    let mut window: VecDeque<Vec<FieldElem>> = std::iter::repeat_with(|| zero.clone()).take(h + 1).collect();
    let mut col = Vec::with_capacity(n * (h + 1));
    f.for_each_in(0..columns, |i, c| {
        window.pop_back();
        window.push_front(c.to_vec());
        col.clear();
        for v in &window {
            col.extend(v.iter().cloned());
        }
        t.push(&col);
        if (i + 1) % (1 << 20) == 0 {
            progress(i + 1);
        }
    });
    Ok(t)
}

/// Advances until empty, stable for `window` columns, or at `max_columns`.
/// Returns whether it stopped because of stability.
pub(crate) fn run_tracker(t: &mut KernelTracker, f: &CoefficientStream, max_columns: usize, window: usize) -> bool {
    let mut quiet = 0;
    while t.columns() < max_columns && !t.is_empty() {
        if t.push(f) {
            quiet = 0;
        } else {
            quiet += 1;
            if quiet >= window {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_stream_keeps_full_kernel() {
        let k = NumberField::rationals();
        let f = CoefficientStream::zero(&k, 2);
        let run = incremental_kernel(&f, 1, 100, 4);
        assert!(run.stabilized);
        assert_eq!(run.kernel.dim(), 4);
        assert_eq!(run.columns_used, 4);
    }

    #[test]
    fn geometric_series_relation() {
        // f = 1/(1 - z) and g = 1: (1 - z) f - g = 0
        let k = NumberField::rationals();
        let one = FieldElem::one(&k);
        let zero = FieldElem::zero(&k);
        let coeffs = (0..200).map(|i| vec![one.clone(), if i == 0 { one.clone() } else { zero.clone() }]).collect();
        let f = CoefficientStream::explicit(&k, 2, coeffs);
        let run = incremental_kernel(&f, 2, 50, 6);
        assert_eq!(run.kernel.dim(), 2);
        assert_eq!(run.generators.len(), 1);
        let g = &run.generators[0];
        let c = g[0].coeff(0);
        let norm: Vec<Poly> = g.iter().map(|p| p.scale(&c.inv())).collect();
        assert_eq!(norm, vec![Poly::from_ints(&k, &[1, -1]), Poly::from_ints(&k, &[-1])]);
    }

    #[test]
    fn streamed_dense_run_matches_cached_columns() {
        let k = NumberField::rationals();
        let one = FieldElem::one(&k);
        let zero = FieldElem::zero(&k);
        let coeffs = (0..40).map(|i| vec![one.clone(), if i == 0 { one.clone() } else { zero.clone() }]).collect();
        let f = CoefficientStream::explicit(&k, 2, coeffs);
        let t = stream_dense_kernel(&f, 2, 60, |_| {}).unwrap();
        let mut d = DenseKernelTracker::new(&k, 6);
        let cols = SColumns::new(&f, 2);
        for i in 0..60 {
            d.push(&cols.column(i));
        }
        assert_eq!(t.columns(), 60);
        assert_eq!(t.basis(), d.basis());
    }

    #[test]
    fn phi_roundtrip() {
        let k = NumberField::rationals();
        let w = vec![Poly::from_ints(&k, &[1, -1]), Poly::from_ints(&k, &[0, 0, 3])];
        assert_eq!(phi(&phi_inv(&w, 2), 2, &k), w);
    }
}
