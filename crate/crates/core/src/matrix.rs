//! Dense square/rectangular matrices over a coefficient ring.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;

use crate::coeff::{Coeff, ScalarError};
use crate::par::par_range;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<C: Coeff> {
    rows: usize,
    cols: usize,
    ctx: C::Ctx,
    data: Vec<C>,
}

impl<C: Coeff> Matrix<C> {
    pub fn zeros(ctx: &C::Ctx, rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, ctx: ctx.clone(), data: vec![C::zero(ctx); rows * cols] }
    }

    pub fn identity(ctx: &C::Ctx, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, C::one(ctx));
        }
        m
    }

    pub fn from_fn(ctx: &C::Ctx, rows: usize, cols: usize, f: impl Fn(usize, usize) -> C) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Matrix { rows, cols, ctx: ctx.clone(), data }
    }

    pub fn from_rows(ctx: &C::Ctx, rows: Vec<Vec<C>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, ctx: ctx.clone(), data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ctx(&self) -> &C::Ctx {
        &self.ctx
    }

    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &C)> {
        self.data.iter().enumerate().map(move |(k, c)| (k / self.cols, k % self.cols, c))
    }

    pub fn column(&self, j: usize) -> Vec<C> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && self.entries().all(|(i, j, c)| if i == j { c.is_one() } else { c.is_zero() })
    }

    pub fn map<D: Coeff>(&self, ctx: &D::Ctx, f: impl Fn(&C) -> D) -> Matrix<D> {
        Matrix { rows: self.rows, cols: self.cols, ctx: ctx.clone(), data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<D: Coeff, E>(&self, ctx: &D::Ctx, f: impl Fn(&C) -> Result<D, E>) -> Result<Matrix<D>, E> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>, E>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, ctx: ctx.clone(), data })
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect();
        Matrix { rows: self.rows, cols: self.cols, ctx: self.ctx.clone(), data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect();
        Matrix { rows: self.rows, cols: self.cols, ctx: self.ctx.clone(), data }
    }

    pub fn neg(&self) -> Self {
        self.map(&self.ctx, |c| c.neg())
    }

    pub fn scale(&self, s: &C) -> Self {
        self.map(&self.ctx, |c| c.mul(s))
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        self.map(&self.ctx, |c| c.scale(r))
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(&self.ctx, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Matrix product; rows are computed in parallel.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let rows: Vec<Vec<C>> = par_range(self.rows, |i| {
            (0..other.cols)
                .map(|j| {
                    let mut acc = C::zero(&self.ctx);
                    for k in 0..self.cols {
                        let a = self.get(i, k);
                        if a.is_zero() {
                            continue;
                        }
                        let b = other.get(k, j);
                        if !b.is_zero() {
                            acc = acc.add(&a.mul(b));
                        }
                    }
                    acc
                })
                .collect()
        });
        Matrix { rows: self.rows, cols: other.cols, ctx: self.ctx.clone(), data: rows.into_iter().flatten().collect() }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn mul_vec(&self, v: &[C]) -> Vec<C> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = C::zero(&self.ctx);
                for (k, x) in v.iter().enumerate() {
                    let a = self.get(i, k);
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc.add(&a.mul(x));
                    }
                }
                acc
            })
            .collect()
    }

    /// Entry-wise `q_i d/dq_i`.
    pub fn euler(&self, i: usize) -> Self {
        self.map(&self.ctx, |c| c.euler(i))
    }

    pub fn at_q_zero(&self) -> Result<Self, ScalarError> {
        self.try_map(&self.ctx, |c| c.at_q_zero())
    }

    /// Entry-wise Laurent decomposition in `h`.
    pub fn h_coefficients(&self) -> Result<BTreeMap<i32, Self>, ScalarError> {
        let mut out: BTreeMap<i32, Self> = BTreeMap::new();
        for (i, j, c) in self.entries() {
            for (k, part) in c.h_coefficients()? {
                out.entry(k).or_insert_with(|| Self::zeros(&self.ctx, self.rows, self.cols)).set(i, j, part);
            }
        }
        Ok(out)
    }

    /// Gauss-Jordan inverse. A pivot is any invertible entry of the column;
    /// over a series ring this means a unit constant term.
    pub fn inverse(&self) -> Result<Self, ScalarError> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(&self.ctx, n);
        for col in 0..n {
            let mut pivot = None;
            for r in col..n {
                if let Ok(p) = a.get(r, col).inv() {
                    pivot = Some((r, p));
                    break;
                }
            }
            let (r, p) = pivot.ok_or(ScalarError::DivisionByZero)?;
            a.swap_rows(r, col);
            inv.swap_rows(r, col);
            a.scale_row(col, &p);
            inv.scale_row(col, &p);
            for other in 0..n {
                if other == col {
                    continue;
                }
                let f = a.get(other, col).clone();
                if f.is_zero() {
                    continue;
                }
                a.axpy_row(other, col, &f);
                inv.axpy_row(other, col, &f);
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, r: usize, s: usize) {
        if r == s {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(r * self.cols + j, s * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, s: &C) {
        for j in 0..self.cols {
            let v = self.get(r, j).mul(s);
            self.set(r, j, v);
        }
    }

    /// row[target] -= f * row[source]
    fn axpy_row(&mut self, target: usize, source: usize, f: &C) {
        for j in 0..self.cols {
            let s = self.get(source, j);
            if s.is_zero() {
                continue;
            }
            let v = self.get(target, j).sub(&f.mul(s));
            self.set(target, j, v);
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            (0..self.rows)
                .map(|i| serde_json::Value::Array((0..self.cols).map(|j| self.get(i, j).to_json()).collect()))
                .collect(),
        )
    }
}

impl<C: Coeff> fmt::Display for Matrix<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j).plain())?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::RatFunc;

    #[test]
    fn inverse_round_trip() {
        let q = RatFunc::q_var(&1, 0);
        let one = RatFunc::one(&1);
        let m = Matrix::from_rows(&1, vec![vec![one.clone(), q.clone()], vec![q.clone(), one.clone()]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        let singular = Matrix::from_rows(&1, vec![vec![q.clone(), q.clone()], vec![q.clone(), q]]);
        assert!(singular.inverse().is_err());
    }
}
