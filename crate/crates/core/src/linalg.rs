//! Dense exact linear algebra: echelon forms, rank, kernels and reduction
//! of vectors modulo a row space.
//!
//! Pivots are chosen by scanning columns left to right and, inside a column,
//! rows top to bottom; the first nonzero entry wins. Rank in rational mode
//! goes through fraction-free Bareiss elimination on integer rows.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{integer_row, Field, Sampler, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl Matrix {
    pub fn new(field: Field, rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(bad) = data.iter().find(|s| s.field() != field) {
            return Err(Error::MixedField(
                field.to_string(),
                bad.field().to_string(),
            ));
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    pub fn from_rows(field: Field, cols: usize, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Matrix::new(field, n, cols, data)
    }

    /// Integer entries, convenient in tests and catalog code.
    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(
            field,
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn random(sampler: &mut Sampler, rows: usize, cols: usize) -> Self {
        let data = sampler.random_vector(rows * cols);
        Matrix {
            field: sampler.field(),
            rows,
            cols,
            data,
        }
    }

    /// Uniform random matrix of full rank `min(rows, cols)`, redrawn until it is.
    pub fn random_full_rank(sampler: &mut Sampler, rows: usize, cols: usize) -> Self {
        loop {
            let m = Matrix::random(sampler, rows, cols);
            if m.rank() == rows.min(cols) {
                return m;
            }
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert_eq!(v.field(), self.field, "mixed-field matrix entry");
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Scalar]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            field: self.field,
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: rhs.rows,
            });
        }
        if self.field != rhs.field {
            return Err(Error::MixedField(
                self.field.to_string(),
                rhs.field.to_string(),
            ));
        }
        let mut out = Matrix::zeros(self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out.data[idx] = &out.data[idx] + &(a * rhs.get(k, j));
                }
            }
        }
        Ok(out)
    }

    /// `self · v` for a column vector `v`.
    pub fn apply(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok(self.row_iter().map(|row| dot(row, v)).collect())
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.cols,
            });
        }
        if self.field != other.field {
            return Err(Error::MixedField(
                self.field.to_string(),
                other.field.to_string(),
            ));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            field: self.field,
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Gauss-Jordan elimination to reduced row echelon form.
    pub fn echelon(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m.get(r, c).inv().expect("pivot is nonzero");
            for j in c..m.cols {
                let idx = r * m.cols + j;
                m.data[idx] = &m.data[idx] * &inv;
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let sub = &factor * m.get(r, j);
                    let idx = i * m.cols + j;
                    m.data[idx] = &m.data[idx] - &sub;
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { reduced: m, pivots }
    }

    /// Rank by Gaussian elimination, in either field.
    pub fn rank_gaussian(&self) -> usize {
        self.echelon().rank()
    }

    /// Exact rank. Fraction-free Bareiss elimination in rational mode.
    pub fn rank(&self) -> usize {
        match self.field {
            Field::Prime(_) => self.rank_gaussian(),
            Field::Rational => self.rank_bareiss(),
        }
    }

    fn rank_bareiss(&self) -> usize {
        let mut a: Vec<Vec<BigInt>> = self
            .row_iter()
            .map(|row| {
                let q: Vec<_> = row
                    .iter()
                    .map(|s| s.as_rational().expect("rational entry").clone())
                    .collect();
                integer_row(&q)
            })
            .collect();
        bareiss_rank(&mut a, self.cols)
    }

    /// Basis of the right null space, one vector per row.
    pub fn kernel_basis(&self) -> Matrix {
        let ech = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !ech.pivots.contains(c)).collect();
        let mut out = Matrix::zeros(self.field, free.len(), self.cols);
        for (k, &f) in free.iter().enumerate() {
            out.data[k * self.cols + f] = self.field.one();
            for (r, &pc) in ech.pivots.iter().enumerate() {
                out.data[k * self.cols + pc] = -ech.reduced.get(r, f);
            }
        }
        out
    }

    /// Reduces each row of `self` against the reduced echelon form of `basis`.
    ///
    /// The result has the shape of `self`, vanishes in every pivot column of
    /// `basis`, and spans together with `basis` the same space as `self` and
    /// `basis` together.
    pub fn reduce_modulo_rowspace(&self, basis: &Matrix) -> Result<Matrix> {
        if self.cols != basis.cols {
            return Err(Error::DimensionMismatch {
                expected: basis.cols,
                got: self.cols,
            });
        }
        let ech = basis.echelon();
        Ok(self.reduce_with(&ech))
    }

    pub(crate) fn reduce_with(&self, ech: &Echelon) -> Matrix {
        let mut out = self.clone();
        for i in 0..out.rows {
            for (r, &pc) in ech.pivots.iter().enumerate() {
                let factor = out.get(i, pc).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..out.cols {
                    let e = ech.reduced.get(r, j);
                    if e.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = &out.data[idx] - &(&factor * e);
                }
            }
        }
        out
    }

    /// Nonzero rows of the reduced echelon form: a canonical row-space basis.
    pub fn row_basis(&self) -> Matrix {
        let ech = self.echelon();
        let idx: Vec<usize> = (0..ech.rank()).collect();
        ech.reduced.select_rows(&idx)
    }
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut acc = match a.first() {
        Some(x) => x.zero_like(),
        None => {
            return b
                .first()
                .map_or_else(|| Field::Rational.zero(), Scalar::zero_like)
        }
    };
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = &acc + &(x * y);
        }
    }
    acc
}

/// Fraction-free Gaussian elimination over the integers; returns the rank.
pub(crate) fn bareiss_rank(a: &mut [Vec<BigInt>], cols: usize) -> usize {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                a[i][j] = q;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.row_iter() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}
