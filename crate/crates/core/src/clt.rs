//! Central limit moments: `sum_{pi in M_2(n)} 1/|pi|! K_pi(b_1 X, ..., b_n X)`,
//! and the same limit read off as a coefficient of the moment polynomial of `N.X`.

use crate::cumulants::{cumulant, dot_polynomial};
use crate::error::{Error, Result};
use crate::matrix::BMatrix;
use crate::moments::{functional_pi_unchecked, MomentSystem, Multilinear, PeelOrder};
use crate::partitions::{monotone_pair_partitions, HasBlocks};
use crate::rational::Rational;

/// A single centered variable with arguments `b_1..b_n`.
#[derive(Clone, Debug)]
pub struct CltQuery {
    x: MomentSystem,
    args: Vec<BMatrix>,
}

impl CltQuery {
    /// Requires `r = 1`, `phi(X) = 0` and `n <= degree_cap`.
    pub fn new(x: &MomentSystem, args: Vec<BMatrix>) -> Result<Self> {
        if x.r() != 1 {
            return Err(Error::Domain(format!("central limit query needs one variable, got r = {}", x.r())));
        }
        x.validate(&vec![0; args.len()], &args)?;
        let mean = x.eval(&[0], &[BMatrix::identity(x.d())])?;
        if !mean.is_zero() {
            return Err(Error::Domain(format!("variable has nonzero mean {mean}")));
        }
        Ok(CltQuery { x: x.clone(), args })
    }

    pub fn n(&self) -> usize {
        self.args.len()
    }

    fn indices(&self) -> Vec<usize> {
        vec![0; self.args.len()]
    }
}

/// The limit moment over monotone pair partitions; `0` for odd `n`.
pub fn clt_limit(q: &CltQuery) -> Result<BMatrix> {
    let d = q.x.d();
    let n = q.n();
    if n % 2 == 1 {
        return Ok(BMatrix::zero(d));
    }
    if n == 0 {
        return Ok(BMatrix::identity(d));
    }
    let kappa = cumulant(&q.x);
    let indices = q.indices();
    let mut total = BMatrix::zero(d);
    for pi in monotone_pair_partitions(n)? {
        let k = pi.block_count() as i64;
        let factorial: i64 = (1..=k).product();
        let value = functional_pi_unchecked(&kappa, pi.blocks(), &indices, &q.args, PeelOrder::Leftmost);
        total.add_scaled(&Rational::new(1, factorial), &value);
    }
    Ok(total)
}

/// The coefficient of `N^{n/2}` in `N -> phi(b_1 (N.X) ... b_n (N.X))`, after
/// checking that the polynomial has degree at most `n/2`.
pub fn clt_oracle(q: &CltQuery) -> Result<BMatrix> {
    let n = q.n();
    let poly = dot_polynomial(&q.x, &q.indices(), &q.args)?;
    if let Some(deg) = poly.degree() {
        if deg > n / 2 {
            return Err(Error::Consistency(format!("moment polynomial has degree {deg} > {} for a centered variable", n / 2)));
        }
    }
    if n % 2 == 1 {
        return Ok(BMatrix::zero(q.x.d()));
    }
    Ok(poly.coeff(n / 2))
}
