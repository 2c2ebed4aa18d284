use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::field::{Field, Ring, Scalar};

/// Relative pivot threshold used when the caller does not pass one.
pub const DEFAULT_TOL_RANK: f64 = 1e-9;

/// Dense row-major matrix over any [`Ring`].
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Reduced row echelon form with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref<T> {
    pub reduced: Matrix<T>,
    pub pivots: Vec<usize>,
}

impl<T: Ring> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, Error> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Rows must have equal length. An empty list gives a 0×0 matrix.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, Error> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged matrix rows".into()));
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

    pub fn diagonal(entries: &[T]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn column(entries: &[T]) -> Self {
        Matrix { rows: entries.len(), cols: 1, data: entries.to_vec() }
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(T::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<U: Ring, E>(&self, f: impl Fn(&T) -> Result<U, E>) -> Result<Matrix<U>, E> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>, E>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|a| a.clone() * c.clone())
    }

    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])].clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |i, j| self[(idx[i], j)].clone())
    }

    /// Writes `block` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    /// Horizontal concatenation; all parts need `rows` rows.
    pub fn hstack(rows: usize, parts: &[&Self]) -> Self {
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "hstack row mismatch");
            out.set_block(0, c0, p);
            c0 += p.cols;
        }
        out
    }

    /// Vertical concatenation; all parts need `cols` columns.
    pub fn vstack(cols: usize, parts: &[&Self]) -> Self {
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut out = Self::zeros(rows, cols);
        let mut r0 = 0;
        for p in parts {
            assert_eq!(p.cols, cols, "vstack column mismatch");
            out.set_block(r0, 0, p);
            r0 += p.rows;
        }
        out
    }

    /// Block-diagonal sum.
    pub fn direct_sum(a: &Self, b: &Self) -> Self {
        let mut out = Self::zeros(a.rows + b.rows, a.cols + b.cols);
        out.set_block(0, 0, a);
        out.set_block(a.rows, a.cols, b);
        out
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[dst] += c · row[src]`.
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, c: &T) {
        for j in 0..self.cols {
            let v = self[(src, j)].clone();
            if !v.is_zero() {
                self[(dst, j)] = self[(dst, j)].clone() + c.clone() * v;
            }
        }
    }

    /// `col[dst] += c · col[src]`.
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, c: &T) {
        for i in 0..self.rows {
            let v = self[(i, src)].clone();
            if !v.is_zero() {
                self[(i, dst)] = self[(i, dst)].clone() + v * c.clone();
            }
        }
    }

    pub fn scale_row(&mut self, i: usize, c: &T) {
        for j in 0..self.cols {
            self[(i, j)] = self[(i, j)].clone() * c.clone();
        }
    }

    pub fn scale_col(&mut self, j: usize, c: &T) {
        for i in 0..self.rows {
            self[(i, j)] = self[(i, j)].clone() * c.clone();
        }
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, Error> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(self * rhs)
    }
}

impl<T: Field> Matrix<T> {
    fn max_magnitude(&self) -> f64 {
        self.data.iter().filter_map(Field::pivot_magnitude).fold(0.0, f64::max)
    }

    fn find_pivot(&self, r0: usize, c: usize, thresh: f64) -> Option<usize> {
        if T::zero().pivot_magnitude().is_some() {
            let (best, mag) = (r0..self.rows)
                .map(|i| (i, self[(i, c)].pivot_magnitude().unwrap_or(0.0)))
                .fold((r0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            (mag > thresh && mag > 0.0).then_some(best)
        } else {
            (r0..self.rows).find(|&i| !self[(i, c)].is_zero_tol(thresh))
        }
    }

    /// Gauss–Jordan elimination. Exact fields ignore `tol`; floating fields
    /// treat entries below `tol · max|a_ij|` as zero.
    pub fn rref_tol(&self, tol: f64) -> Rref<T> {
        let mut a = self.clone();
        let thresh = tol * self.max_magnitude();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = a.find_pivot(r, c, thresh) else {
                continue;
            };
            a.swap_rows(r, p);
            let inv = a[(r, c)].inv();
            for k in c..a.cols {
                a[(r, k)] = a[(r, k)].clone() * inv.clone();
            }
            for i in 0..a.rows {
                if i == r || a[(i, c)].is_zero() {
                    continue;
                }
                let f = a[(i, c)].clone();
                for k in c..a.cols {
                    let v = a[(r, k)].clone();
                    if !v.is_zero() {
                        a[(i, k)] = a[(i, k)].clone() - f.clone() * v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { reduced: a, pivots }
    }

    pub fn rref(&self) -> Rref<T> {
        self.rref_tol(DEFAULT_TOL_RANK)
    }

    pub fn rank_tol(&self, tol: f64) -> usize {
        self.rref_tol(tol).pivots.len()
    }

    pub fn rank(&self) -> usize {
        self.rank_tol(DEFAULT_TOL_RANK)
    }

    /// Columns form a basis of the right null space.
    pub fn kernel_tol(&self, tol: f64) -> Matrix<T> {
        let Rref { reduced, pivots } = self.rref_tol(tol);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(self.cols, free.len());
        for (j, &f) in free.iter().enumerate() {
            k[(f, j)] = T::one();
            for (i, &p) in pivots.iter().enumerate() {
                k[(p, j)] = -reduced[(i, f)].clone();
            }
        }
        k
    }

    pub fn kernel(&self) -> Matrix<T> {
        self.kernel_tol(DEFAULT_TOL_RANK)
    }

    /// Indices of standard basis vectors completing the column span to the
    /// whole space, chosen greedily in index order.
    pub fn complement_indices_tol(&self, tol: f64) -> Vec<usize> {
        let aug = Matrix::hstack(self.rows, &[self, &Matrix::identity(self.rows)]);
        aug.rref_tol(tol)
            .pivots
            .into_iter()
            .filter(|&p| p >= self.cols)
            .map(|p| p - self.cols)
            .collect()
    }

    pub fn complement_indices(&self) -> Vec<usize> {
        self.complement_indices_tol(DEFAULT_TOL_RANK)
    }

    /// Pivot columns: a basis of the column space drawn from the columns.
    pub fn column_basis_indices(&self) -> Vec<usize> {
        self.rref().pivots
    }

    pub fn inverse_tol(&self, tol: f64) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = Matrix::hstack(n, &[self, &Matrix::identity(n)]);
        let Rref { reduced, pivots } = aug.rref_tol(tol);
        if pivots.len() < n || (n > 0 && pivots[n - 1] != n - 1) {
            return None;
        }
        Some(reduced.submatrix(0, n, n, n))
    }

    pub fn inverse(&self) -> Option<Self> {
        self.inverse_tol(DEFAULT_TOL_RANK)
    }

    /// Some `X` with `self · X = b`, free variables set to zero.
    pub fn solve_tol(&self, b: &Self, tol: f64) -> Option<Self> {
        assert_eq!(self.rows, b.rows, "solve: row mismatch");
        let aug = Matrix::hstack(self.rows, &[self, b]);
        let Rref { reduced, pivots } = aug.rref_tol(tol);
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Matrix::zeros(self.cols, b.cols);
        for (i, &p) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x[(p, j)] = reduced[(i, self.cols + j)].clone();
            }
        }
        Some(x)
    }

    pub fn solve(&self, b: &Self) -> Option<Self> {
        self.solve_tol(b, DEFAULT_TOL_RANK)
    }

    /// Determinant by elimination. Panics on a non-square matrix.
    pub fn det(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut a = self.clone();
        let n = self.rows;
        let mut det = T::one();
        for c in 0..n {
            let Some(p) = a.find_pivot(c, c, 0.0) else {
                return T::zero();
            };
            if p != c {
                a.swap_rows(p, c);
                det = -det;
            }
            let piv = a[(c, c)].clone();
            det = det * piv.clone();
            let inv = piv.inv();
            for i in c + 1..n {
                if a[(i, c)].is_zero() {
                    continue;
                }
                let f = a[(i, c)].clone() * inv.clone();
                a.add_row_multiple(i, c, &-f);
            }
        }
        det
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn to_c64(&self) -> Matrix<num_complex::Complex64> {
        self.map(Scalar::to_c64)
    }

    /// Frobenius norm of the complex approximation.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x.to_c64().norm_sqr()).sum::<f64>().sqrt()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Ring> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Matrix::<T>::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }
}

impl<T: Ring> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<T: Ring> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<T: Ring> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|a| -a.clone())
    }
}

impl<T: Ring> Mul for Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: Matrix<T>) -> Matrix<T> {
        &self * &rhs
    }
}

impl<T: Ring> Add for Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: Matrix<T>) -> Matrix<T> {
        &self + &rhs
    }
}

impl<T: Ring> Sub for Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: Matrix<T>) -> Matrix<T> {
        &self - &rhs
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} ", self.rows, self.cols)?;
        let mut l = f.debug_list();
        for i in 0..self.rows {
            l.entry(&&self.data[i * self.cols..(i + 1) * self.cols]);
        }
        l.finish()
    }
}

/// Serialised row-major as nested arrays. Zero-row matrices lose their
/// column count, so callers that need it carry dimensions separately.
impl<T: Serialize> Serialize for Matrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<&[T]> = (0..self.rows).map(|i| &self.data[i * self.cols..(i + 1) * self.cols]).collect();
        rows.serialize(s)
    }
}

impl<'de, T: Ring + Deserialize<'de>> Deserialize<'de> for Matrix<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<T>>::deserialize(d)?;
        Matrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}
