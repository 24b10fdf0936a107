//! Dense matrices over an exact ring, with elimination over fields.

use std::fmt;

use super::field::FieldElem;
use super::poly::Poly;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

/// Exact commutative ring with values that know how to build their own
/// zero and one (elements carry their ambient field).
pub trait Ring: Clone + PartialEq + fmt::Display {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn radd(&self, o: &Self) -> Self;
    fn rsub(&self, o: &Self) -> Self;
    fn rmul(&self, o: &Self) -> Self;
    fn rneg(&self) -> Self;
}

pub trait Field: Ring {
    fn try_inv(&self) -> Result<Self>;
}

macro_rules! ring_impl {
    ($t:ty, $zero:expr, $one:expr) => {
        impl Ring for $t {
            fn zero_like(&self) -> Self {
                $zero(self.field())
            }
            fn one_like(&self) -> Self {
                $one(self.field())
            }
            fn is_zero(&self) -> bool {
                <$t>::is_zero(self)
            }
            fn radd(&self, o: &Self) -> Self {
                self + o
            }
            fn rsub(&self, o: &Self) -> Self {
                self - o
            }
            fn rmul(&self, o: &Self) -> Self {
                self * o
            }
            fn rneg(&self) -> Self {
                -self
            }
        }
    };
}

ring_impl!(FieldElem, FieldElem::zero, FieldElem::one);
ring_impl!(Poly, Poly::zero, Poly::one);
ring_impl!(RatFunc, RatFunc::zero, RatFunc::one);

impl Field for FieldElem {
    fn try_inv(&self) -> Result<Self> {
        FieldElem::try_inv(self)
    }
}

impl Field for RatFunc {
    fn try_inv(&self) -> Result<Self> {
        RatFunc::try_inv(self)
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch { expected: c, found: bad.len() });
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn identity(n: usize, proto: &T) -> Self {
        let (z, o) = (proto.zero_like(), proto.one_like());
        Self::from_fn(n, n, |i, j| if i == j { o.clone() } else { z.clone() })
    }

    pub fn zeros(rows: usize, cols: usize, proto: &T) -> Self {
        let z = proto.zero_like();
        Self::from_fn(rows, cols, |_, _| z.clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn map<U: Ring>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<U: Ring, E>(&self, f: impl FnMut(&T) -> Result<U, E>) -> Result<Matrix<U>, E> {
        let data = self.data.iter().map(f).collect::<Result<Vec<U>, E>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: o.rows });
        }
        Ok(Self::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = self.get(i, 0).zero_like();
            for k in 0..self.cols {
                let (a, b) = (self.get(i, k), o.get(k, j));
                if !a.is_zero() && !b.is_zero() {
                    acc = acc.radd(&a.rmul(b));
                }
            }
            acc
        }))
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return Err(Error::DimensionMismatch { expected: self.rows, found: o.rows });
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).radd(o.get(i, j))))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return Err(Error::DimensionMismatch { expected: self.rows, found: o.rows });
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).rsub(o.get(i, j))))
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[T]) -> Vec<T> {
        (0..self.cols)
            .map(|j| {
                let mut acc = self.get(0, j).zero_like();
                for (i, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !x.is_zero() && !a.is_zero() {
                        acc = acc.radd(&x.rmul(a));
                    }
                }
                acc
            })
            .collect()
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| {
                let mut acc = self.get(i, 0).zero_like();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !x.is_zero() && !a.is_zero() {
                        acc = acc.radd(&a.rmul(x));
                    }
                }
                acc
            })
            .collect()
    }

    /// Block matrix [[a, b], [c, d]].
    pub fn block(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let (r1, c1) = (a.rows, a.cols);
        Self::from_fn(a.rows + c.rows, a.cols + b.cols, |i, j| match (i < r1, j < c1) {
            (true, true) => a.get(i, j).clone(),
            (true, false) => b.get(i, j - c1).clone(),
            (false, true) => c.get(i - r1, j).clone(),
            (false, false) => d.get(i - r1, j - c1).clone(),
        })
    }
}

impl<T: Field> Matrix<T> {
    /// Determinant by Gaussian elimination.
    pub fn det(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let mut m = self.to_rows();
        let mut det = self.get(0, 0).one_like();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
                return Ok(det.zero_like());
            };
            if p != c {
                m.swap(p, c);
                det = det.rneg();
            }
            det = det.rmul(&m[c][c]);
            let inv = m[c][c].try_inv()?;
            for r in c + 1..n {
                if m[r][c].is_zero() {
                    continue;
                }
                let f = m[r][c].rmul(&inv);
                for j in c..n {
                    let t = f.rmul(&m[c][j]);
                    m[r][j] = m[r][j].rsub(&t);
                }
            }
        }
        Ok(det)
    }

    /// A nonzero c with c M = 0, if any.
    pub fn left_null_vector(&self) -> Result<Option<Vec<T>>> {
        let (r, c) = (self.rows, self.cols);
        if r == 0 {
            return Ok(None);
        }
        let one = self.get(0, 0).one_like();
        let zero = one.zero_like();
        // eliminate on [M | I]; a zero row on the left yields c
        let mut m: Vec<Vec<T>> = (0..r)
            .map(|i| {
                let mut row = self.row(i).to_vec();
                row.extend((0..r).map(|j| if i == j { one.clone() } else { zero.clone() }));
                row
            })
            .collect();
        let mut top = 0;
        for col in 0..c {
            let Some(p) = (top..r).find(|&i| !m[i][col].is_zero()) else {
                continue;
            };
            m.swap(p, top);
            let inv = m[top][col].try_inv()?;
            for i in top + 1..r {
                if m[i][col].is_zero() {
                    continue;
                }
                let f = m[i][col].rmul(&inv);
                for j in col..c + r {
                    let t = f.rmul(&m[top][j]);
                    m[i][j] = m[i][j].rsub(&t);
                }
            }
            top += 1;
        }
        Ok((top < r).then(|| m[top][c..].to_vec()))
    }

    /// Inverse by Gauss-Jordan; fails on singular input.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let mut m = self.to_rows();
        let mut inv = Self::identity(n, self.get(0, 0)).to_rows();
        for c in 0..n {
            let p = (c..n).find(|&r| !m[r][c].is_zero()).ok_or(Error::DivisionByZero)?;
            m.swap(p, c);
            inv.swap(p, c);
            let s = m[c][c].try_inv()?;
            for j in 0..n {
                m[c][j] = m[c][j].rmul(&s);
                inv[c][j] = inv[c][j].rmul(&s);
            }
            for r in 0..n {
                if r == c || m[r][c].is_zero() {
                    continue;
                }
                let f = m[r][c].clone();
                for j in 0..n {
                    let t = f.rmul(&m[c][j]);
                    m[r][j] = m[r][j].rsub(&t);
                    let t = f.rmul(&inv[c][j]);
                    inv[r][j] = inv[r][j].rsub(&t);
                }
            }
        }
        Self::from_rows(inv)
    }
}

impl Matrix<RatFunc> {
    pub fn from_polys(m: &Matrix<Poly>) -> Self {
        m.map(|p| RatFunc::from_poly(p.clone()))
    }

    /// Substitutes z -> z^q entrywise.
    pub fn compose_power(&self, q: usize) -> Self {
        self.map(|r| r.compose_power(q))
    }

    /// Evaluates every entry; fails at a pole.
    pub fn eval(&self, x: &FieldElem) -> Result<Matrix<FieldElem>> {
        self.try_map(|r| r.eval(x))
    }
}

impl Matrix<Poly> {
    pub fn compose_power(&self, q: usize) -> Self {
        self.map(|p| p.compose_power(q))
    }

    pub fn eval(&self, x: &FieldElem) -> Matrix<FieldElem> {
        self.map(|p| p.eval(x))
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det_fraction_free(&self) -> Poly {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let field = self.get(0, 0).field().clone();
        let mut m = self.to_rows();
        let mut prev = Poly::one(&field);
        let mut sign = false;
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
                return Poly::zero(&field);
            };
            if p != k {
                m.swap(p, k);
                sign = !sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                    m[i][j] = t.exact_div(&prev);
                }
            }
            prev = m[k][k].clone();
        }
        if sign {
            -&prev
        } else {
            prev
        }
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.data.iter().filter_map(Poly::degree).max()
    }
}

impl<T: Ring> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(|x| x.to_string()).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(0);
        for i in 0..self.rows {
            f.write_str("[ ")?;
            for j in 0..self.cols {
                write!(f, "{:>width$}", cells[i * self.cols + j])?;
                f.write_str(if j + 1 == self.cols { " ]" } else { "  " })?;
            }
            if i + 1 < self.rows {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

impl<T: Ring> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
