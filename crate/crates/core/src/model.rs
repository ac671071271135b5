//! Concrete noncommutative probability spaces: `k x k` block matrices over the
//! base algebra of `d x d` rational matrices, with the conditional expectation
//! `a -> sum_i w_i a_ii`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::BMatrix;
use crate::rational::Rational;

/// A `k x k` block matrix with `d x d` blocks, stored as one `kd x kd` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMatrix {
    k: usize,
    d: usize,
    full: BMatrix,
}

impl BlockMatrix {
    pub fn from_blocks(blocks: Vec<Vec<BMatrix>>) -> Result<Self> {
        let k = blocks.len();
        if k == 0 {
            return Err(Error::Dimension("block matrix with no blocks".into()));
        }
        let d = blocks[0].first().map(BMatrix::dim).unwrap_or(0);
        if d == 0 {
            return Err(Error::Dimension("empty block".into()));
        }
        let mut full = BMatrix::zero(k * d);
        for (p, row) in blocks.iter().enumerate() {
            if row.len() != k {
                return Err(Error::Dimension(format!("block row {p} has {} blocks, expected {k}", row.len())));
            }
            for (q, b) in row.iter().enumerate() {
                if b.dim() != d {
                    return Err(Error::Dimension(format!("block ({p},{q}) is {0}x{0}, expected {d}x{d}", b.dim())));
                }
                for i in 0..d {
                    for j in 0..d {
                        full.set(p * d + i, q * d + j, b.get(i, j).clone());
                    }
                }
            }
        }
        Ok(BlockMatrix { k, d, full })
    }

    pub fn from_full(k: usize, d: usize, full: BMatrix) -> Result<Self> {
        if full.dim() != k * d {
            return Err(Error::Dimension(format!("{0}x{0} matrix is not {k}x{k} blocks of size {d}", full.dim())));
        }
        Ok(BlockMatrix { k, d, full })
    }

    pub fn block(&self, p: usize, q: usize) -> BMatrix {
        let d = self.d;
        let mut b = BMatrix::zero(d);
        for i in 0..d {
            for j in 0..d {
                b.set(i, j, self.full.get(p * d + i, q * d + j).clone());
            }
        }
        b
    }

    pub fn blocks(&self) -> Vec<Vec<BMatrix>> {
        (0..self.k).map(|p| (0..self.k).map(|q| self.block(p, q)).collect()).collect()
    }

    pub fn full(&self) -> &BMatrix {
        &self.full
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.k, self.d)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::Dimension("block shapes differ".into()));
        }
        Ok(BlockMatrix { k: self.k, d: self.d, full: self.full.try_mul(&rhs.full)? })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::Dimension("block shapes differ".into()));
        }
        Ok(BlockMatrix { k: self.k, d: self.d, full: self.full.try_add(&rhs.full)? })
    }
}

/// A matrix model `(A, B, phi)` with named random variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixModel {
    d: usize,
    k: usize,
    weights: Vec<Rational>,
    names: Vec<String>,
    variables: Vec<BlockMatrix>,
}

/// Orders `X2` before `X10`: compares the non-digit prefix, then the numeric suffix.
fn natural_cmp(a: &str, b: &str) -> Ordering {
    let split = |s: &str| {
        let cut = s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        let (head, tail) = s.split_at(cut);
        (head.to_owned(), tail.parse::<u128>().ok())
    };
    split(a).cmp(&split(b)).then_with(|| a.cmp(b))
}

impl MatrixModel {
    /// Validates and builds a model. Variables become components `0..r` in
    /// natural name order (`X1, X2, ..., X10`).
    pub fn new(d: usize, k: usize, weights: Vec<Rational>, variables: BTreeMap<String, BlockMatrix>) -> Result<Self> {
        if d == 0 || k == 0 {
            return Err(Error::Dimension("d and k must be positive".into()));
        }
        if weights.len() != k {
            return Err(Error::Dimension(format!("{} weights for k = {k}", weights.len())));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::Domain(format!("weights sum to {total}, expected 1")));
        }
        let mut named: Vec<(String, BlockMatrix)> = variables.into_iter().collect();
        named.sort_by(|a, b| natural_cmp(&a.0, &b.0));
        for (name, v) in &named {
            if v.shape() != (k, d) {
                return Err(Error::Dimension(format!("variable {name} is not {k}x{k} blocks of size {d}")));
            }
        }
        let (names, variables) = named.into_iter().unzip();
        Ok(MatrixModel { d, k, weights, names, variables })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of random variables (components).
    pub fn r(&self) -> usize {
        self.variables.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn variable(&self, i: usize) -> &BlockMatrix {
        &self.variables[i]
    }

    /// `phi(a) = sum_i w_i a_ii`.
    pub fn cond_expect(&self, a: &BlockMatrix) -> Result<BMatrix> {
        if a.shape() != (self.k, self.d) {
            return Err(Error::Dimension(format!(
                "expected {0}x{0} blocks of size {1}, got {2}x{2} blocks of size {3}",
                self.k,
                self.d,
                a.k,
                a.d
            )));
        }
        let mut out = BMatrix::zero(self.d);
        for (p, w) in self.weights.iter().enumerate() {
            out.add_scaled(w, &a.block(p, p));
        }
        Ok(out)
    }

    /// Diagonal unital embedding `b -> diag(b, ..., b)`.
    pub fn embed(&self, b: &BMatrix) -> Result<BlockMatrix> {
        if b.dim() != self.d {
            return Err(Error::Dimension(format!("cannot embed {0}x{0} into blocks of size {1}", b.dim(), self.d)));
        }
        let (k, d) = (self.k, self.d);
        let mut full = BMatrix::zero(k * d);
        for p in 0..k {
            for i in 0..d {
                for j in 0..d {
                    full.set(p * d + i, p * d + j, b.get(i, j).clone());
                }
            }
        }
        Ok(BlockMatrix { k, d, full })
    }

    /// `phi(b_1 X_{i_1} b_2 ... b_n X_{i_n})`, computed without materializing
    /// the embedded coefficients. Inputs are assumed validated.
    pub(crate) fn word_expectation(&self, indices: &[usize], args: &[BMatrix]) -> BMatrix {
        let (k, d) = (self.k, self.d);
        let n = indices.len();
        if n == 0 {
            return BMatrix::identity(d);
        }
        let x = |j: usize| self.variables[indices[j]].full();
        // acc = embed(b_1) * X_{i_1}
        let mut acc = left_embed_mul(k, d, &args[0], x(0));
        for (j, b) in args.iter().enumerate().take(n).skip(1) {
            acc = right_embed_mul(k, d, &acc, b);
            if j + 1 < n {
                acc = &acc * x(j);
            } else {
                return self.diag_product_expectation(&acc, x(j));
            }
        }
        // n == 1
        let mut out = BMatrix::zero(d);
        for (p, w) in self.weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for i in 0..d {
                for j in 0..d {
                    let v = acc.get(p * d + i, p * d + j);
                    if !v.is_zero() {
                        let cur = out.get(i, j) + &(w * v);
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    /// `phi(a * x)` using only the diagonal blocks of the product.
    fn diag_product_expectation(&self, a: &BMatrix, x: &BMatrix) -> BMatrix {
        let (k, d) = (self.k, self.d);
        let n = k * d;
        let mut out = BMatrix::zero(d);
        for (p, w) in self.weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for i in 0..d {
                let row = p * d + i;
                for j in 0..d {
                    let col = p * d + j;
                    let mut s = Rational::zero();
                    for m in 0..n {
                        let av = a.get(row, m);
                        if av.is_zero() {
                            continue;
                        }
                        let xv = x.get(m, col);
                        if !xv.is_zero() {
                            s += &(av * xv);
                        }
                    }
                    if !s.is_zero() {
                        let cur = out.get(i, j) + &(w * &s);
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }
}

/// `embed(b) * a`.
fn left_embed_mul(k: usize, d: usize, b: &BMatrix, a: &BMatrix) -> BMatrix {
    let n = k * d;
    let mut out = BMatrix::zero(n);
    for p in 0..k {
        for i in 0..d {
            for s in 0..d {
                let bv = b.get(i, s);
                if bv.is_zero() {
                    continue;
                }
                for col in 0..n {
                    let av = a.get(p * d + s, col);
                    if !av.is_zero() {
                        let cur = out.get(p * d + i, col) + &(bv * av);
                        out.set(p * d + i, col, cur);
                    }
                }
            }
        }
    }
    out
}

/// `a * embed(b)`.
fn right_embed_mul(k: usize, d: usize, a: &BMatrix, b: &BMatrix) -> BMatrix {
    let n = k * d;
    let mut out = BMatrix::zero(n);
    for row in 0..n {
        for q in 0..k {
            for s in 0..d {
                let av = a.get(row, q * d + s);
                if av.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let bv = b.get(s, j);
                    if !bv.is_zero() {
                        let cur = out.get(row, q * d + j) + &(av * bv);
                        out.set(row, q * d + j, cur);
                    }
                }
            }
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    d: usize,
    k: usize,
    weights: Vec<Rational>,
    variables: BTreeMap<String, Vec<Vec<BMatrix>>>,
}

impl MatrixModel {
    /// Parses the model JSON format. Errors carry serde's line/column location.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut variables = BTreeMap::new();
        for (name, blocks) in file.variables {
            let bm = BlockMatrix::from_blocks(blocks).map_err(|e| Error::Parse(format!("variable {name}: {e}")))?;
            variables.insert(name, bm);
        }
        Self::new(file.d, file.k, file.weights, variables)
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            d: self.d,
            k: self.k,
            weights: self.weights.clone(),
            variables: self.names.iter().cloned().zip(self.variables.iter().map(BlockMatrix::blocks)).collect(),
        };
        serde_json::to_string_pretty(&file).expect("model serialization")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn scalar_model(weights: Vec<Rational>, x: &[&[i64]]) -> MatrixModel {
        let blocks = x.iter().map(|row| row.iter().map(|&v| BMatrix::scalar(Rational::from_integer(v))).collect()).collect();
        let mut vars = BTreeMap::new();
        vars.insert("X1".to_string(), BlockMatrix::from_blocks(blocks).unwrap());
        MatrixModel::new(1, weights.len(), weights, vars).unwrap()
    }

    #[test]
    fn cond_expect_examples() {
        let m = scalar_model(vec![q(1, 2), q(1, 2)], &[&[0, 1], &[1, 0]]);
        assert_eq!(m.cond_expect(m.variable(0)).unwrap(), BMatrix::scalar(Rational::zero()));

        let m2 = scalar_model(vec![q(1, 3), q(2, 3)], &[&[1, 0], &[0, 4]]);
        assert_eq!(m2.cond_expect(m2.variable(0)).unwrap(), BMatrix::scalar(Rational::from_integer(3)));
    }

    #[test]
    fn embed_is_unital_homomorphism() {
        let m = scalar_model(vec![q(1, 2), q(1, 2)], &[&[0, 1], &[1, 0]]);
        let one = m.embed(&BMatrix::identity(1)).unwrap();
        assert_eq!(one.full(), &BMatrix::identity(2));
        let b = BMatrix::scalar(q(3, 5));
        assert_eq!(m.cond_expect(&m.embed(&b).unwrap()).unwrap(), b);
    }

    #[test]
    fn bimodularity_on_matrix_units() {
        // d = 2, k = 3; exhaustive over matrix units b1, b2 and block units of a.
        let w = vec![q(1, 6), q(1, 3), q(1, 2)];
        let mut vars = BTreeMap::new();
        vars.insert("X".into(), BlockMatrix::from_full(3, 2, BMatrix::identity(6)).unwrap());
        let m = MatrixModel::new(2, 3, w, vars).unwrap();
        for u1 in 0..4 {
            for u2 in 0..4 {
                let b1 = BMatrix::unit_flat(2, u1);
                let b2 = BMatrix::unit_flat(2, u2);
                for au in 0..36 {
                    let a = BlockMatrix::from_full(3, 2, BMatrix::unit_flat(6, au)).unwrap();
                    let a2 = BlockMatrix::from_full(3, 2, BMatrix::unit_flat(6, (au * 7 + 3) % 36)).unwrap();
                    let lhs_arg = m.embed(&b1).unwrap().try_mul(&a).unwrap().try_mul(&m.embed(&b2).unwrap()).unwrap();
                    let lhs = m.cond_expect(&lhs_arg.try_add(&a2).unwrap()).unwrap();
                    let rhs = &(&(&b1 * &m.cond_expect(&a).unwrap()) * &b2) + &m.cond_expect(&a2).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn word_expectation_matches_literal_product() {
        let text = r#"{"d":2,"k":2,"weights":["1/3","2/3"],
            "variables":{"X1":[[[["1","2"],["0","-1"]],[["1","0"],["1","1"]]],[[["0","1"],["2","0"]],[["-1","1"],["1","3"]]]],
                         "X2":[[[["0","1"],["1","0"]],[["2","0"],["0","0"]]],[[["1","1"],["0","1"]],[["0","0"],["1","-2"]]]]}}"#;
        let m = MatrixModel::from_json(text).unwrap();
        let bs = [BMatrix::from_integers(&[&[1, 2], &[3, 4]]).unwrap(), BMatrix::unit(2, 1, 0), BMatrix::identity(2)];
        let idx = [1usize, 0, 1];
        let mut prod = m.embed(&bs[0]).unwrap().try_mul(m.variable(idx[0])).unwrap();
        for j in 1..3 {
            prod = prod.try_mul(&m.embed(&bs[j]).unwrap()).unwrap().try_mul(m.variable(idx[j])).unwrap();
        }
        assert_eq!(m.word_expectation(&idx, &bs), m.cond_expect(&prod).unwrap());
        assert_eq!(m.word_expectation(&idx[..1], &bs[..1]), m.cond_expect(&m.embed(&bs[0]).unwrap().try_mul(m.variable(1)).unwrap()).unwrap());
    }

    #[test]
    fn json_validation() {
        assert!(MatrixModel::from_json(r#"{"d":1,"k":1,"weights":["1/0"],"variables":{}}"#).is_err());
        assert!(MatrixModel::from_json(r#"{"d":1,"k":2,"weights":["1/2","1/3"],"variables":{}}"#).is_err());
        let err = MatrixModel::from_json("{\"d\": 1,\n \"k\": }").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn natural_variable_order() {
        let one = BlockMatrix::from_full(1, 1, BMatrix::identity(1)).unwrap();
        let two = BlockMatrix::from_full(1, 1, BMatrix::scalar(Rational::from_integer(2))).unwrap();
        let mut vars = BTreeMap::new();
        vars.insert("X10".to_string(), two);
        vars.insert("X2".to_string(), one.clone());
        let m = MatrixModel::new(1, 1, vec![Rational::one()], vars).unwrap();
        assert_eq!(m.names(), &["X2".to_string(), "X10".to_string()]);
        assert_eq!(m.variable(0), &one);
    }
}
