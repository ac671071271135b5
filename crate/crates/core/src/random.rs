//! Seeded random models and matrices for tests and the CLI check suites.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::BMatrix;
use crate::model::{BlockMatrix, MatrixModel};
use crate::rational::Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A `dim x dim` matrix with integer entries in `-bound..=bound`.
pub fn int_matrix<R: Rng>(rng: &mut R, dim: usize, bound: i64) -> BMatrix {
    let data = (0..dim * dim).map(|_| Rational::from_integer(rng.gen_range(-bound..=bound))).collect();
    BMatrix::from_flat(dim, data)
}

/// A model with `r` variables `X1..Xr`, integer entries in `-2..=2` and
/// positive weights proportional to integers in `1..=3`.
pub fn seeded_model(seed: u64, d: usize, k: usize, r: usize) -> MatrixModel {
    let mut rng = rng(seed);
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=3)).collect();
    let total: i64 = raw.iter().sum();
    let weights = raw.iter().map(|&w| Rational::new(w, total)).collect();
    let variables: BTreeMap<String, BlockMatrix> = (1..=r)
        .map(|i| (format!("X{i}"), BlockMatrix::from_full(k, d, int_matrix(&mut rng, k * d, 2)).expect("shape")))
        .collect();
    MatrixModel::new(d, k, weights, variables).expect("seeded model is valid")
}

/// Replaces every variable `X` by `X - phi(X)`, so that `phi(X) = 0`.
pub fn centered(model: &MatrixModel) -> MatrixModel {
    let variables = model
        .names()
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let x = model.variable(i);
            let mean = model.cond_expect(x).expect("shape");
            let shift = model.embed(&mean).expect("shape");
            let full = x.full() - shift.full();
            (name.clone(), BlockMatrix::from_full(model.k(), model.d(), full).expect("shape"))
        })
        .collect();
    MatrixModel::new(model.d(), model.k(), model.weights().to_vec(), variables).expect("centered model is valid")
}

/// The scalar model `d = 1`, `k = 2`, weights `(1/2, 1/2)`, `X = [[0,1],[1,0]]`.
pub fn scalar_flip_model() -> MatrixModel {
    MatrixModel::from_json(r#"{"d":1,"k":2,"weights":["1/2","1/2"],"variables":{"X":[[[["0"]],[["1"]]],[[["1"]],[["0"]]]]}}"#)
        .expect("valid model")
}
