//! Square matrices over an exact coefficient ring.
//!
//! [`BMatrix`] (rational entries) realizes elements of the base algebra; the
//! same type over [`Poly`](crate::ring::Poly) carries `t`-dependent values.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::ring::{Poly, Ring};

/// A `dim x dim` matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<S> {
    dim: usize,
    data: Vec<S>,
}

/// Element of the base algebra: a rational square matrix.
pub type BMatrix = Matrix<Rational>;

/// Matrix with entries polynomial in `t` (and possibly `s`).
pub type PolyMatrix = Matrix<Poly>;

impl<S: Ring> Matrix<S> {
    pub fn zero(dim: usize) -> Self {
        Matrix { dim, data: vec![S::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.data[i * dim + i] = S::one();
        }
        m
    }

    /// Matrix unit `E_{row,col}` (0-based).
    pub fn unit(dim: usize, row: usize, col: usize) -> Self {
        let mut m = Self::zero(dim);
        m.data[row * dim + col] = S::one();
        m
    }

    /// The matrix unit with flat (row-major) index `k`.
    pub fn unit_flat(dim: usize, k: usize) -> Self {
        Self::unit(dim, k / dim, k % dim)
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Dimension("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Dimension(format!("row {i} has {} entries, expected {dim}", row.len())));
            }
            data.extend(row);
        }
        Ok(Matrix { dim, data })
    }

    pub fn from_flat(dim: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), dim * dim, "flat data length");
        Matrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> &S {
        &self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: S) {
        self.data[row * self.dim + col] = value;
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { dim: self.dim, data: self.data.iter().map(f).collect() }
    }

    fn check_same(&self, rhs: &Self, op: &str) -> Result<()> {
        if self.dim != rhs.dim {
            return Err(Error::Dimension(format!("{op} of {0}x{0} and {1}x{1}", self.dim, rhs.dim)));
        }
        Ok(())
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs, "sum")?;
        Ok(Matrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.add(b)).collect() })
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs, "difference")?;
        Ok(Matrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.sub(b)).collect() })
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs, "product")?;
        let n = self.dim;
        let mut data = vec![S::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs.data[k * n + j];
                    if !b.is_zero() {
                        let slot = &mut data[i * n + j];
                        *slot = slot.add(&a.mul(b));
                    }
                }
            }
        }
        Ok(Matrix { dim: n, data })
    }

    pub fn scale(&self, by: &S) -> Self {
        if by.is_zero() {
            return Self::zero(self.dim);
        }
        Matrix { dim: self.dim, data: self.data.iter().map(|a| a.mul(by)).collect() }
    }

    pub fn scale_rational(&self, by: &Rational) -> Self {
        Matrix { dim: self.dim, data: self.data.iter().map(|a| a.scale(by)).collect() }
    }

    /// In-place `self += coef * rhs`.
    pub fn add_scaled(&mut self, coef: &S, rhs: &Self) {
        assert_eq!(self.dim, rhs.dim, "add_scaled dimension");
        if coef.is_zero() {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            if !b.is_zero() {
                *a = a.add(&coef.mul(b));
            }
        }
    }

    pub fn add_assign(&mut self, rhs: &Self) {
        assert_eq!(self.dim, rhs.dim, "add_assign dimension");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            if !b.is_zero() {
                *a = a.add(b);
            }
        }
    }

    /// Nonzero entries as `(flat index, value)`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, &S)> {
        self.data.iter().enumerate().filter(|(_, v)| !v.is_zero())
    }
}

impl BMatrix {
    /// Lifts a rational matrix into any coefficient ring.
    pub fn lift<T: Ring>(&self) -> Matrix<T> {
        self.map(T::from_rational)
    }

    pub fn from_integers(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x)).collect()).collect())
    }

    /// `1x1` matrix holding a scalar.
    pub fn scalar(value: Rational) -> Self {
        Matrix { dim: 1, data: vec![value] }
    }
}

impl PolyMatrix {
    pub fn derivative(&self, v: crate::ring::Var) -> Self {
        self.map(|p| p.derivative(v))
    }
}

macro_rules! matrix_binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl<S: Ring> $tr<&Matrix<S>> for &Matrix<S> {
            type Output = Matrix<S>;
            fn $method(self, rhs: &Matrix<S>) -> Matrix<S> {
                self.$imp(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl<S: Ring> $tr<Matrix<S>> for Matrix<S> {
            type Output = Matrix<S>;
            fn $method(self, rhs: Matrix<S>) -> Matrix<S> {
                (&self).$imp(&rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

matrix_binop!(Add, add, try_add);
matrix_binop!(Sub, sub, try_sub);
matrix_binop!(Mul, mul, try_mul);

impl<S: Ring> Neg for &Matrix<S> {
    type Output = Matrix<S>;
    fn neg(self) -> Matrix<S> {
        Matrix { dim: self.dim, data: self.data.iter().map(S::neg).collect() }
    }
}

impl<S: Ring + fmt::Display> fmt::Display for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, row) in self.data.chunks(self.dim).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl<S: Ring> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.dim)).finish()
    }
}

impl Serialize for BMatrix {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> Result<Z::Ok, Z::Error> {
        self.rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<Rational>>::deserialize(deserializer)?;
        Matrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}
