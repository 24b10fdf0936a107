//! Subspaces of k^m in reduced row echelon form and left kernels.

use std::fmt;
use std::sync::Arc;

use super::field::{FieldElem, NumberField};
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Subspace of k^m given by its reduced row echelon basis: leftmost pivots
/// first, pivot entries equal to one, rows sorted by pivot column.
#[derive(Clone, PartialEq)]
pub struct SubspaceBasis {
    field: Arc<NumberField>,
    ambient: usize,
    rows: Vec<Vec<FieldElem>>,
    pivots: Vec<usize>,
}

/// Reduces `rows` in place to reduced row echelon form and returns pivots.
pub fn rref(rows: &mut Vec<Vec<FieldElem>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv();
        if !inv.is_one() {
            for x in rows[r].iter_mut().skip(c) {
                *x = &*x * &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for j in c..ncols {
                if !pivot_row[j].is_zero() {
                    row[j] = &row[j] - &(&f * &pivot_row[j]);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

impl SubspaceBasis {
    pub fn zero(field: &Arc<NumberField>, ambient: usize) -> Self {
        SubspaceBasis { field: field.clone(), ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(field: &Arc<NumberField>, ambient: usize) -> Self {
        let rows = (0..ambient)
            .map(|i| {
                (0..ambient)
                    .map(|j| if i == j { FieldElem::one(field) } else { FieldElem::zero(field) })
                    .collect()
            })
            .collect();
        SubspaceBasis { field: field.clone(), ambient, rows, pivots: (0..ambient).collect() }
    }

    /// Span of arbitrary vectors of length `ambient`.
    pub fn span(field: &Arc<NumberField>, ambient: usize, vectors: Vec<Vec<FieldElem>>) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(Error::DimensionMismatch { expected: ambient, found: v.len() });
        }
        let mut rows = vectors;
        let pivots = rref(&mut rows, ambient);
        Ok(SubspaceBasis { field: field.clone(), ambient, rows, pivots })
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<FieldElem>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Remainder of `v` after eliminating against the pivots.
    pub fn reduce(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if out[p].is_zero() {
                continue;
            }
            let f = out[p].clone();
            for j in p..self.ambient {
                if !row[j].is_zero() {
                    out[j] = &out[j] - &(&f * &row[j]);
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[FieldElem]) -> bool {
        v.len() == self.ambient && self.reduce(v).iter().all(FieldElem::is_zero)
    }

    pub fn contains_subspace(&self, o: &SubspaceBasis) -> bool {
        o.rows.iter().all(|r| self.contains(r))
    }

    /// Coordinates of a member on the echelon basis.
    pub fn coordinates(&self, v: &[FieldElem]) -> Option<Vec<FieldElem>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    /// Image of the subspace under v -> v * m.
    pub fn map(&self, m: &Matrix<FieldElem>) -> Result<SubspaceBasis> {
        if m.rows() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: m.rows() });
        }
        let imgs = self.rows.iter().map(|r| m.left_apply(r)).collect();
        SubspaceBasis::span(&self.field, m.cols(), imgs)
    }

    /// Restricts to the coordinates in `keep`, in that order.
    pub fn project(&self, keep: &[usize]) -> SubspaceBasis {
        let imgs = self.rows.iter().map(|r| keep.iter().map(|&i| r[i].clone()).collect()).collect();
        SubspaceBasis::span(&self.field, keep.len(), imgs).expect("consistent lengths")
    }
}

impl fmt::Debug for SubspaceBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{{")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let parts: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", parts.join(", "))?;
        }
        write!(f, "}} in k^{}", self.ambient)
    }
}

/// Basis of { lambda in k^r : lambda M = 0 }.
pub fn left_kernel(m: &Matrix<FieldElem>, field: &Arc<NumberField>) -> SubspaceBasis {
    let (r, c) = (m.rows(), m.cols());
    // Echelonize the transpose, then read off its right null space.
    let mut t = m.transpose().to_rows();
    let pivots = rref(&mut t, r);
    let mut vecs = Vec::new();
    for free in (0..r).filter(|j| !pivots.contains(j)) {
        let mut v = vec![FieldElem::zero(field); r];
        v[free] = FieldElem::one(field);
        for (row, &p) in t.iter().zip(&pivots) {
            v[p] = -&row[free];
        }
        vecs.push(v);
    }
    let _ = c;
    SubspaceBasis::span(field, r, vecs).expect("consistent lengths")
}

pub fn rank(m: &Matrix<FieldElem>) -> usize {
    let mut rows = m.to_rows();
    rref(&mut rows, m.cols()).len()
}

pub fn subspace_sum(u: &SubspaceBasis, v: &SubspaceBasis) -> Result<SubspaceBasis> {
    if u.ambient != v.ambient {
        return Err(Error::DimensionMismatch { expected: u.ambient, found: v.ambient });
    }
    let mut all = u.rows.clone();
    all.extend(v.rows.iter().cloned());
    SubspaceBasis::span(&u.field, u.ambient, all)
}

pub fn intersect(u: &SubspaceBasis, v: &SubspaceBasis) -> Result<SubspaceBasis> {
    if u.ambient != v.ambient {
        return Err(Error::DimensionMismatch { expected: u.ambient, found: v.ambient });
    }
    if u.is_zero() || v.is_zero() {
        return Ok(SubspaceBasis::zero(&u.field, u.ambient));
    }
    // a U = b V  <=>  (a, b) [U; -V] = 0
    let mut stacked = u.rows.clone();
    stacked.extend(v.rows.iter().map(|r| r.iter().map(|x| -x).collect::<Vec<_>>()));
    let m = Matrix::from_rows(stacked)?;
    let ker = left_kernel(&m, &u.field);
    let vecs = ker
        .rows
        .iter()
        .map(|coef| {
            let mut acc = vec![FieldElem::zero(&u.field); u.ambient];
            for (a, row) in coef.iter().zip(&u.rows) {
                if a.is_zero() {
                    continue;
                }
                for (x, y) in acc.iter_mut().zip(row) {
                    *x = &*x + &(a * y);
                }
            }
            acc
        })
        .collect();
    SubspaceBasis::span(&u.field, u.ambient, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(k: &Arc<NumberField>, x: i64) -> FieldElem {
        FieldElem::from_int(k, x)
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let k = NumberField::rationals();
        let m = Matrix::identity(2, &e(&k, 0));
        assert_eq!(left_kernel(&m, &k).dim(), 0);
    }

    #[test]
    fn zero_matrix_has_full_kernel() {
        let k = NumberField::rationals();
        let m = Matrix::zeros(3, 2, &e(&k, 0));
        assert_eq!(left_kernel(&m, &k), SubspaceBasis::full(&k, 3));
    }

    #[test]
    fn sum_and_intersection() {
        let k = NumberField::rationals();
        let e1 = vec![e(&k, 1), e(&k, 0), e(&k, 0)];
        let e2 = vec![e(&k, 0), e(&k, 1), e(&k, 0)];
        let d = vec![e(&k, 1), e(&k, 1), e(&k, 0)];
        let u = SubspaceBasis::span(&k, 3, vec![e1.clone()]).unwrap();
        let v = SubspaceBasis::span(&k, 3, vec![e1.clone()]).unwrap();
        assert_eq!(subspace_sum(&u, &v).unwrap().dim(), 1);
        let w = SubspaceBasis::span(&k, 3, vec![e2, d.clone()]).unwrap();
        assert_eq!(intersect(&u, &w).unwrap(), u);
        let z = SubspaceBasis::zero(&k, 3);
        assert_eq!(subspace_sum(&z, &w).unwrap(), w);
        assert!(subspace_sum(&u, &SubspaceBasis::zero(&k, 2)).is_err());
    }
}
