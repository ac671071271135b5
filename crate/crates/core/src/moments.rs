//! Families of multilinear functionals `(i_1..i_n; b_1..b_n) -> B` (joint
//! moments and cumulants) and their evaluation on non-crossing partitions.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::matrix::BMatrix;
use crate::model::MatrixModel;
use crate::partitions::{is_non_crossing, Block};

/// A family of multilinear maps indexed by tuples over `0..r`.
///
/// Component indices are 0-based in the library API.
pub trait Multilinear: Send + Sync {
    fn r(&self) -> usize;
    fn d(&self) -> usize;
    fn degree_cap(&self) -> usize;

    /// Evaluates without validation; callers guarantee shapes and caps.
    fn apply(&self, indices: &[usize], args: &[BMatrix]) -> BMatrix;

    fn validate(&self, indices: &[usize], args: &[BMatrix]) -> Result<()> {
        if indices.len() != args.len() {
            return Err(Error::Dimension(format!("{} indices but {} arguments", indices.len(), args.len())));
        }
        if indices.len() > self.degree_cap() {
            return Err(Error::DegreeCap { requested: indices.len(), cap: self.degree_cap() });
        }
        if let Some(&index) = indices.iter().find(|&&i| i >= self.r()) {
            return Err(Error::IndexOutOfRange { index, r: self.r() });
        }
        if let Some(b) = args.iter().find(|b| b.dim() != self.d()) {
            return Err(Error::Dimension(format!("argument is {0}x{0}, expected {1}x{1}", b.dim(), self.d())));
        }
        Ok(())
    }
}

type Evaluator = dyn Fn(&System, &[usize], &[BMatrix]) -> BMatrix + Send + Sync;
type MemoKey = (Vec<usize>, Vec<BMatrix>);

const MEMO_LIMIT: usize = 1 << 21;

struct Inner {
    r: usize,
    d: usize,
    cap: usize,
    empty: BMatrix,
    eval: Box<Evaluator>,
    memo: Mutex<HashMap<MemoKey, BMatrix>>,
}

/// A memoized evaluator. The evaluator receives the system itself so that
/// recursive definitions (triangular inversion) hit the same cache.
#[derive(Clone)]
pub struct System(Arc<Inner>);

impl System {
    fn new(r: usize, d: usize, cap: usize, empty: BMatrix, eval: Box<Evaluator>) -> Self {
        System(Arc::new(Inner { r, d, cap, empty, eval, memo: Mutex::new(HashMap::new()) }))
    }

    fn eval(&self, indices: &[usize], args: &[BMatrix]) -> BMatrix {
        if indices.is_empty() {
            return self.0.empty.clone();
        }
        let key = (indices.to_vec(), args.to_vec());
        if let Some(v) = self.0.memo.lock().expect("memo").get(&key) {
            return v.clone();
        }
        let value = (self.0.eval)(self, indices, args);
        let mut memo = self.0.memo.lock().expect("memo");
        if memo.len() >= MEMO_LIMIT {
            memo.clear();
        }
        memo.insert(key, value.clone());
        value
    }
}

macro_rules! system_newtype {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(Clone)]
        pub struct $name(System);

        impl $name {
            /// Wraps an evaluator; the empty word evaluates to the family's constant.
            pub fn from_fn<F>(r: usize, d: usize, degree_cap: usize, f: F) -> Self
            where
                F: Fn(&[usize], &[BMatrix]) -> BMatrix + Send + Sync + 'static,
            {
                Self::from_recursive(r, d, degree_cap, move |_, i, b| f(i, b))
            }

            /// Like [`Self::from_fn`], but the evaluator may call back into the system.
            pub fn from_recursive<F>(r: usize, d: usize, degree_cap: usize, f: F) -> Self
            where
                F: Fn(&Self, &[usize], &[BMatrix]) -> BMatrix + Send + Sync + 'static,
            {
                let eval = move |s: &System, i: &[usize], b: &[BMatrix]| f(&$name(s.clone()), i, b);
                $name(System::new(r, d, degree_cap, Self::empty_value(d), Box::new(eval)))
            }

            /// Validated evaluation.
            pub fn eval(&self, indices: &[usize], args: &[BMatrix]) -> Result<BMatrix> {
                self.validate(indices, args)?;
                Ok(self.0.eval(indices, args))
            }

            /// The same family under a different degree cap.
            pub fn with_cap(&self, degree_cap: usize) -> Self {
                let inner = self.clone();
                Self::from_fn(self.r(), self.d(), degree_cap, move |i, b| inner.0.eval(i, b))
            }
        }

        impl Multilinear for $name {
            fn r(&self) -> usize {
                self.0 .0.r
            }
            fn d(&self) -> usize {
                self.0 .0.d
            }
            fn degree_cap(&self) -> usize {
                self.0 .0.cap
            }
            fn apply(&self, indices: &[usize], args: &[BMatrix]) -> BMatrix {
                self.0.eval(indices, args)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.debug_struct(stringify!($name))
                    .field("r", &self.r())
                    .field("d", &self.d())
                    .field("degree_cap", &self.degree_cap())
                    .finish()
            }
        }
    };
}

system_newtype!(MomentSystem, "Joint moments `mu_{i_1..i_n}(b_1..b_n) = phi(b_1 X_{i_1} ... b_n X_{i_n})`; `mu_() = 1`.");
system_newtype!(CumulantSystem, "Multivariate cumulants `kappa_{i_1..i_n}(b_1..b_n)`; `kappa_() = 0`.");

impl MomentSystem {
    fn empty_value(d: usize) -> BMatrix {
        BMatrix::identity(d)
    }

    /// The moments of a matrix model.
    pub fn from_model(model: MatrixModel, degree_cap: usize) -> Self {
        let model = Arc::new(model);
        let (r, d) = (model.r(), model.d());
        Self::from_fn(r, d, degree_cap, move |i, b| model.word_expectation(i, b))
    }
}

impl CumulantSystem {
    fn empty_value(d: usize) -> BMatrix {
        BMatrix::zero(d)
    }
}

/// Which interval block [`functional_pi`] collapses next.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PeelOrder {
    #[default]
    Leftmost,
    Rightmost,
}

/// `A_pi(b_1 X_{i_1}, ..., b_n X_{i_n})` for a non-crossing block list.
///
/// Interval blocks are collapsed one at a time. The value of a collapsed block
/// multiplies the next remaining argument on the left; a block reaching the
/// right end multiplies the final result on the right. Block order is ignored.
pub fn functional_pi(
    family: &dyn Multilinear,
    blocks: &[Block],
    indices: &[usize],
    args: &[BMatrix],
    order: PeelOrder,
) -> Result<BMatrix> {
    if indices.len() != args.len() {
        return Err(Error::Dimension(format!("{} indices but {} arguments", indices.len(), args.len())));
    }
    let n = indices.len();
    let mut seen = vec![false; n + 1];
    for b in blocks {
        if b.len() > family.degree_cap() {
            return Err(Error::DegreeCap { requested: b.len(), cap: family.degree_cap() });
        }
        for &x in b.elements() {
            if x > n || seen[x] {
                return Err(Error::Domain(format!("blocks do not partition 1..{n}")));
            }
            seen[x] = true;
        }
    }
    if seen[1..].iter().any(|s| !s) {
        return Err(Error::Domain(format!("blocks do not partition 1..{n}")));
    }
    if !is_non_crossing(blocks) {
        return Err(Error::Domain("crossing partition".into()));
    }
    if let Some(&index) = indices.iter().find(|&&i| i >= family.r()) {
        return Err(Error::IndexOutOfRange { index, r: family.r() });
    }
    if args.iter().any(|b| b.dim() != family.d()) {
        return Err(Error::Dimension("argument dimension".into()));
    }
    Ok(functional_pi_unchecked(family, blocks, indices, args, order))
}

pub(crate) fn functional_pi_unchecked(
    family: &dyn Multilinear,
    blocks: &[Block],
    indices: &[usize],
    args: &[BMatrix],
    order: PeelOrder,
) -> BMatrix {
    let n = indices.len();
    let mut owner = vec![0usize; n];
    for (k, b) in blocks.iter().enumerate() {
        for &x in b.elements() {
            owner[x - 1] = k;
        }
    }
    let mut current: Vec<BMatrix> = args.to_vec();
    // remaining positions, 0-based, in increasing order
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut right_factors: Vec<BMatrix> = Vec::new();
    let mut alive = vec![true; blocks.len()];
    while !remaining.is_empty() {
        // interval blocks of the remaining word, as (start, end) ranges in `remaining`
        let mut candidates = Vec::new();
        let mut s = 0;
        while s < remaining.len() {
            let k = owner[remaining[s]];
            let mut e = s;
            while e + 1 < remaining.len() && owner[remaining[e + 1]] == k {
                e += 1;
            }
            if alive[k] && e - s + 1 == blocks[k].len() {
                candidates.push((s, e, k));
            }
            s = e + 1;
        }
        let &(s, e, k) = match order {
            PeelOrder::Leftmost => candidates.first(),
            PeelOrder::Rightmost => candidates.last(),
        }
        .expect("a non-crossing partition always has an interval block");
        let pos = &remaining[s..=e];
        let idx: Vec<usize> = pos.iter().map(|&p| indices[p]).collect();
        let vals: Vec<BMatrix> = pos.iter().map(|&p| current[p].clone()).collect();
        let value = family.apply(&idx, &vals);
        if e + 1 < remaining.len() {
            let next = remaining[e + 1];
            current[next] = &value * &current[next];
        } else {
            right_factors.push(value);
        }
        alive[k] = false;
        remaining.drain(s..=e);
    }
    let mut out = BMatrix::identity(family.d());
    for f in right_factors.iter().rev() {
        out = &out * f;
    }
    out
}
