//! Dense matrices over a generic field, with exact Gaussian elimination.
//!
//! Exact routines (`rref`, `rank`, `inverse`) rely on `is_zero` being an exact
//! test, so they are meant for [`Q`]. Floating determinants and condition
//! numbers go through nalgebra in [`to_nalgebra`].

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num::complex::Complex64;
use num::traits::{NumOps, One, Zero};

use crate::rational::{FromQ, Magnitude, Q};

pub trait Scalar:
    Clone + PartialEq + Debug + Zero + One + NumOps + Neg<Output = Self> + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Clone + PartialEq + Debug + Zero + One + NumOps + Neg<Output = Self> + Send + Sync + 'static
{
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type QMatrix = Matrix<Q>;
pub type CMatrix = Matrix<Complex64>;

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn diagonal(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
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

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn trace(&self) -> T {
        assert!(self.is_square());
        (0..self.rows).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Adds `s * other` in place.
    pub fn axpy(&mut self, s: &T, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                *a = a.clone() + s.clone() * b.clone();
            }
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = T::one() / m[(r, c)].clone();
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].clone() * inv.clone();
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        if !m[(r, j)].is_zero() {
                            m[(i, j)] = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Exact inverse, `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                T::one()
            } else {
                T::zero()
            }
        });
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] >= n {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| r[(i, j + n)].clone()))
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<T>> {
        let (r, piv) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (k, &p) in piv.iter().enumerate() {
                    v[p] = -r[(k, f)].clone();
                }
                v
            })
            .collect()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

impl<T: Scalar + Magnitude> Matrix<T> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }
}

impl QMatrix {
    pub fn to_field<T: Scalar + FromQ>(&self) -> Matrix<T> {
        self.map(T::from_q)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, o: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, o: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, o: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        let mut out: Matrix<T> = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

pub fn to_nalgebra(m: &CMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Determinant of a complex matrix via LU.
pub fn complex_det(m: &CMatrix) -> Complex64 {
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    to_nalgebra(m).lu().determinant()
}

/// 2-norm condition number from singular values; infinite when singular.
pub fn condition_number(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let sv = to_nalgebra(m).singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}
