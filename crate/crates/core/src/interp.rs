//! Exact polynomial interpolation at integer nodes with matrix values.

use crate::matrix::{BMatrix, PolyMatrix};
use crate::rational::Rational;
use crate::ring::{Poly, Var};

/// `sum_k coeffs[k] N^k` with trailing zero coefficients trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixPolynomial {
    dim: usize,
    coeffs: Vec<BMatrix>,
}

impl MatrixPolynomial {
    pub fn new(dim: usize, mut coeffs: Vec<BMatrix>) -> Self {
        assert!(coeffs.iter().all(|c| c.dim() == dim), "coefficient dimension");
        while coeffs.last().is_some_and(BMatrix::is_zero) {
            coeffs.pop();
        }
        MatrixPolynomial { dim, coeffs }
    }

    /// The polynomial of degree at most `values.len()` with `P(0) = 0` and
    /// `P(j) = values[j - 1]` for `j = 1..=values.len()`.
    pub fn through_origin(dim: usize, values: &[BMatrix]) -> Self {
        let m = values.len();
        // forward differences of y_0 = 0, y_1, ..., y_m
        let mut table: Vec<BMatrix> = std::iter::once(BMatrix::zero(dim)).chain(values.iter().cloned()).collect();
        let mut deltas = Vec::with_capacity(m + 1);
        for _ in 0..=m {
            deltas.push(table[0].clone());
            table = table.windows(2).map(|w| &w[1] - &w[0]).collect();
        }
        // P(x) = sum_k delta_k * binom(x, k)
        let mut coeffs = vec![BMatrix::zero(dim); m + 1];
        let mut basis = vec![Rational::one()]; // coefficients of binom(x, k)
        for (k, delta) in deltas.iter().enumerate() {
            for (p, c) in basis.iter().enumerate() {
                coeffs[p].add_scaled(c, delta);
            }
            // binom(x, k+1) = binom(x, k) * (x - k) / (k + 1)
            let mut next = vec![Rational::zero(); basis.len() + 1];
            let kq = Rational::from(k);
            let inv = Rational::new(1, k as i64 + 1);
            for (p, c) in basis.iter().enumerate() {
                next[p + 1] += &(c * &inv);
                next[p] -= &(&(c * &kq) * &inv);
            }
            basis = next;
        }
        Self::new(dim, coeffs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[BMatrix] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BMatrix {
        self.coeffs.get(k).cloned().unwrap_or_else(|| BMatrix::zero(self.dim))
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> BMatrix {
        let mut acc = BMatrix::zero(self.dim);
        for c in self.coeffs.iter().rev() {
            acc = &acc.scale(x) + c;
        }
        acc
    }

    /// The same polynomial as a matrix with entries in `Q[v]`.
    pub fn to_poly_matrix(&self, v: Var) -> PolyMatrix {
        let d = self.dim;
        let data = (0..d * d)
            .map(|e| Poly::from_coeffs(v, &self.coeffs.iter().map(|c| c.entries()[e].clone()).collect::<Vec<_>>()))
            .collect();
        PolyMatrix::from_flat(d, data)
    }
}
