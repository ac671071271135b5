//! Monotone cumulants: the coefficient of `N` in the moment polynomial of
//! `N.X`, the moment-cumulant formula over monotone partitions, and its
//! triangular inversion.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::interp::MatrixPolynomial;
use crate::matrix::BMatrix;
use crate::moments::{functional_pi_unchecked, CumulantSystem, MomentSystem, Multilinear, PeelOrder};
use crate::oracle::{dot_moment, DotMethod};
use crate::partitions::{monotone_partitions, non_crossing_partitions, qmap_distribution, HasBlocks, SetPartition};
use crate::rational::Rational;

/// `phi_pi(b_1 X_{i_1}, ..., b_n X_{i_n})` for every `pi` in `NC(n)`.
fn phi_pi_table(x: &MomentSystem, indices: &[usize], args: &[BMatrix]) -> HashMap<SetPartition, BMatrix> {
    non_crossing_partitions(indices.len())
        .into_iter()
        .map(|pi| {
            let v = functional_pi_unchecked(x, pi.blocks(), indices, args, PeelOrder::Leftmost);
            (pi, v)
        })
        .collect()
}

/// `sum_{pi in NC(n)} a_pi(N) phi_pi` for each requested `N`.
fn universal_values(x: &MomentSystem, copies: &[usize], indices: &[usize], args: &[BMatrix]) -> Vec<BMatrix> {
    let table = phi_pi_table(x, indices, args);
    copies
        .iter()
        .map(|&c| {
            let mut total = BMatrix::zero(x.d());
            for (pi, count) in qmap_distribution(indices.len(), c).iter() {
                total.add_scaled(&Rational::from(*count), &table[pi]);
            }
            total
        })
        .collect()
}

/// `sum_{pi in NC(n)} a_pi(N) phi_pi(b_1 X_{i_1}, ..., b_n X_{i_n})`.
pub fn universal_dot_moment(x: &MomentSystem, copies: usize, indices: &[usize], args: &[BMatrix]) -> Result<BMatrix> {
    x.validate(indices, args)?;
    if indices.is_empty() {
        return Ok(BMatrix::identity(x.d()));
    }
    Ok(universal_values(x, &[copies], indices, args).pop().expect("one value"))
}

fn fit(d: usize, n: usize, values: &[BMatrix]) -> Result<MatrixPolynomial> {
    let poly = MatrixPolynomial::through_origin(d, &values[..n]);
    let check = poly.eval(&Rational::from(n + 1));
    if check != values[n] {
        return Err(Error::Consistency(format!("moment polynomial of degree {n} does not predict N = {}", n + 1)));
    }
    Ok(poly)
}

/// The polynomial `N -> phi(b_1 (N.X)_{i_1} ... b_n (N.X)_{i_n})`, interpolated
/// through `N = 1..n` with zero constant term and checked at `N = n + 1`.
pub fn dot_polynomial(x: &MomentSystem, indices: &[usize], args: &[BMatrix]) -> Result<MatrixPolynomial> {
    x.validate(indices, args)?;
    let n = indices.len();
    if n == 0 {
        return Ok(MatrixPolynomial::new(x.d(), vec![BMatrix::identity(x.d())]));
    }
    let copies: Vec<usize> = (1..=n + 1).collect();
    fit(x.d(), n, &universal_values(x, &copies, indices, args))
}

/// [`dot_polynomial`] with the sample values taken from [`dot_moment`].
pub fn dot_polynomial_by(x: &MomentSystem, indices: &[usize], args: &[BMatrix], method: DotMethod) -> Result<MatrixPolynomial> {
    x.validate(indices, args)?;
    let n = indices.len();
    if n == 0 {
        return Ok(MatrixPolynomial::new(x.d(), vec![BMatrix::identity(x.d())]));
    }
    let values = (1..=n + 1).map(|c| dot_moment(x, c, indices, args, method)).collect::<Result<Vec<_>>>()?;
    fit(x.d(), n, &values)
}

/// Cumulants as the coefficient of `N` in [`dot_polynomial`].
///
/// Evaluation panics with the consistency error if an interpolation check
/// fails; use [`cumulant_eval`] for a fallible single evaluation.
pub fn cumulant(x: &MomentSystem) -> CumulantSystem {
    let inner = x.clone();
    CumulantSystem::from_fn(x.r(), x.d(), x.degree_cap(), move |i, b| {
        dot_polynomial(&inner, i, b).unwrap_or_else(|e| panic!("{e}")).coeff(1)
    })
}

pub fn cumulant_eval(x: &MomentSystem, indices: &[usize], args: &[BMatrix]) -> Result<BMatrix> {
    Ok(dot_polynomial(x, indices, args)?.coeff(1))
}

/// `sum_{pi in M(n)} 1/|pi|!` grouped by the underlying non-crossing partition.
pub fn monotone_weights(n: usize) -> Arc<Vec<(SetPartition, Rational)>> {
    type Cache = Mutex<HashMap<usize, Arc<Vec<(SetPartition, Rational)>>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(w) = cache.lock().expect("weights cache").get(&n) {
        return w.clone();
    }
    let mut acc: BTreeMap<SetPartition, Rational> = BTreeMap::new();
    for pi in monotone_partitions(n) {
        let k = pi.block_count() as u64;
        let factorial: u64 = (1..=k).product();
        *acc.entry(pi.ordered().underlying()).or_insert_with(Rational::zero) += &Rational::new(1, factorial as i64);
    }
    let w = Arc::new(acc.into_iter().collect::<Vec<_>>());
    cache.lock().expect("weights cache").insert(n, w.clone());
    w
}

/// `phi(b_1 X_{i_1} ... b_n X_{i_n}) = sum_{pi in M(n)} 1/|pi|! K_pi`.
pub fn moments_from_cumulants(kappa: &CumulantSystem, indices: &[usize], args: &[BMatrix]) -> Result<BMatrix> {
    kappa.validate(indices, args)?;
    Ok(moments_from_cumulants_unchecked(kappa, indices, args))
}

fn moments_from_cumulants_unchecked(kappa: &CumulantSystem, indices: &[usize], args: &[BMatrix]) -> BMatrix {
    let n = indices.len();
    if n == 0 {
        return BMatrix::identity(kappa.d());
    }
    let mut total = BMatrix::zero(kappa.d());
    for (pi, w) in monotone_weights(n).iter() {
        total.add_scaled(w, &functional_pi_unchecked(kappa, pi.blocks(), indices, args, PeelOrder::Leftmost));
    }
    total
}

/// The moment system determined by a cumulant system.
pub fn moment_system(kappa: &CumulantSystem) -> MomentSystem {
    let inner = kappa.clone();
    MomentSystem::from_fn(kappa.r(), kappa.d(), kappa.degree_cap(), move |i, b| moments_from_cumulants_unchecked(&inner, i, b))
}

/// Cumulants by ascending triangular inversion of the moment-cumulant formula:
/// `kappa_n = mu_n - sum_{pi in M(n), |pi| >= 2} 1/|pi|! kappa_pi`.
pub fn cumulants_from_moments(x: &MomentSystem) -> CumulantSystem {
    let mu = x.clone();
    CumulantSystem::from_recursive(x.r(), x.d(), x.degree_cap(), move |kappa, i, b| {
        let mut value = mu.apply(i, b);
        for (pi, w) in monotone_weights(i.len()).iter() {
            if pi.block_count() >= 2 {
                let k = functional_pi_unchecked(kappa, pi.blocks(), i, b, PeelOrder::Leftmost);
                value.add_scaled(&-w, &k);
            }
        }
        value
    })
}
