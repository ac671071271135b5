//! Mixed moments of monotone independent families, computed directly from the
//! defining factorization: a same-label segment at a strict peak of the label
//! sequence is replaced by its expectation until the word is exhausted.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::matrix::BMatrix;
use crate::moments::{functional_pi_unchecked, MomentSystem, Multilinear, PeelOrder};
use crate::partitions::{ordered_from_sequence, q_map, HasBlocks, SetPartition};

/// A generator `X_index` of the algebra carrying `label`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub label: usize,
    pub index: usize,
}

/// `c_0 g_1 c_1 g_2 ... g_n c_n` with coefficients in the base algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalWord {
    leading: BMatrix,
    letters: Vec<(Generator, BMatrix)>,
}

impl FormalWord {
    pub fn new(leading: BMatrix, letters: Vec<(Generator, BMatrix)>) -> Result<Self> {
        let d = leading.dim();
        if letters.iter().any(|(_, c)| c.dim() != d) {
            return Err(Error::Dimension("word coefficients differ in dimension".into()));
        }
        Ok(FormalWord { leading, letters })
    }

    /// `b_1 g_1 b_2 g_2 ... b_n g_n` (trailing coefficient 1).
    pub fn moment_word(labels: &[usize], indices: &[usize], args: &[BMatrix]) -> Result<Self> {
        let n = labels.len();
        if indices.len() != n || args.len() != n || n == 0 {
            return Err(Error::Dimension("labels, indices and arguments must have the same positive length".into()));
        }
        let d = args[0].dim();
        let letters = (0..n)
            .map(|j| {
                let next = if j + 1 < n { args[j + 1].clone() } else { BMatrix::identity(d) };
                (Generator { label: labels[j], index: indices[j] }, next)
            })
            .collect();
        Self::new(args[0].clone(), letters)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = &Generator> {
        self.letters.iter().map(|(g, _)| g)
    }
}

/// Marginal moment systems by algebra label.
pub trait Marginals {
    fn marginal(&self, label: usize) -> Option<&MomentSystem>;
}

impl Marginals for BTreeMap<usize, MomentSystem> {
    fn marginal(&self, label: usize) -> Option<&MomentSystem> {
        self.get(&label)
    }
}

/// Identically distributed copies: every label has the same marginal.
pub struct Iid<'a>(pub &'a MomentSystem);

impl Marginals for Iid<'_> {
    fn marginal(&self, _label: usize) -> Option<&MomentSystem> {
        Some(self.0)
    }
}

#[derive(Clone)]
struct State {
    coefs: Vec<BMatrix>,
    letters: Vec<Generator>,
}

/// Maximal same-label run `start..end` that sits at a strict peak.
#[derive(Clone, Copy, Debug)]
struct Peak {
    start: usize,
    end: usize,
    rank: usize,
}

impl State {
    fn new(word: &FormalWord) -> Self {
        let mut coefs = Vec::with_capacity(word.len() + 1);
        coefs.push(word.leading.clone());
        coefs.extend(word.letters.iter().map(|(_, c)| c.clone()));
        State { coefs, letters: word.letters.iter().map(|(g, _)| *g).collect() }
    }

    fn peaks(&self, rank: &HashMap<usize, usize>) -> Vec<Peak> {
        let mut runs = Vec::new();
        let mut s = 0;
        while s < self.letters.len() {
            let mut e = s + 1;
            while e < self.letters.len() && self.letters[e].label == self.letters[s].label {
                e += 1;
            }
            runs.push(Peak { start: s, end: e, rank: rank[&self.letters[s].label] });
            s = e;
        }
        (0..runs.len())
            .filter(|&j| {
                let k = runs[j].rank;
                (j == 0 || runs[j - 1].rank < k) && (j + 1 == runs.len() || runs[j + 1].rank < k)
            })
            .map(|j| runs[j])
            .collect()
    }

    fn collapse(&mut self, peak: Peak, marginals: &dyn Marginals) -> Result<()> {
        let label = self.letters[peak.start].label;
        let system = marginals.marginal(label).ok_or(Error::MissingMarginal(label))?;
        let len = peak.end - peak.start;
        if len > system.degree_cap() {
            return Err(Error::DegreeCap { requested: len, cap: system.degree_cap() });
        }
        let indices: Vec<usize> = self.letters[peak.start..peak.end].iter().map(|g| g.index).collect();
        let value = system.eval(&indices, &self.coefs[peak.start..peak.end])?;
        self.coefs[peak.end] = &value * &self.coefs[peak.end];
        self.coefs.drain(peak.start..peak.end);
        self.letters.drain(peak.start..peak.end);
        Ok(())
    }
}

fn ranks(word: &FormalWord, order: &[usize]) -> Result<HashMap<usize, usize>> {
    let rank: HashMap<usize, usize> = order.iter().enumerate().map(|(k, &l)| (l, k)).collect();
    if rank.len() != order.len() {
        return Err(Error::Domain("label order lists a label twice".into()));
    }
    if let Some(g) = word.letters().find(|g| !rank.contains_key(&g.label)) {
        return Err(Error::Domain(format!("label {} is not in the order", g.label)));
    }
    Ok(rank)
}

/// `phi(word)` for monotone independent algebras ordered by `order`
/// (labels listed from lowest to highest). At each step the leftmost segment
/// carrying the highest label present is collapsed.
pub fn mixed_moment(word: &FormalWord, marginals: &dyn Marginals, order: &[usize]) -> Result<BMatrix> {
    let rank = ranks(word, order)?;
    let mut state = State::new(word);
    while !state.letters.is_empty() {
        let peaks = state.peaks(&rank);
        let top = peaks.iter().map(|p| p.rank).max().expect("some segment is a peak");
        let peak = *peaks.iter().find(|p| p.rank == top).expect("nonempty");
        state.collapse(peak, marginals)?;
    }
    Ok(state.coefs.pop().expect("one coefficient remains"))
}

/// The results of every admissible reduction strategy: at each step any peak
/// segment may be collapsed.
pub fn mixed_moment_all_strategies(word: &FormalWord, marginals: &dyn Marginals, order: &[usize]) -> Result<Vec<BMatrix>> {
    fn walk(state: State, rank: &HashMap<usize, usize>, marginals: &dyn Marginals, out: &mut Vec<BMatrix>) -> Result<()> {
        if state.letters.is_empty() {
            out.push(state.coefs[0].clone());
            return Ok(());
        }
        for peak in state.peaks(rank) {
            let mut next = state.clone();
            next.collapse(peak, marginals)?;
            walk(next, rank, marginals, out)?;
        }
        Ok(())
    }
    let rank = ranks(word, order)?;
    let mut out = Vec::new();
    walk(State::new(word), &rank, marginals, &mut out)?;
    Ok(out)
}

/// How [`dot_moment`] evaluates `phi(b_1 (N.X)_{i_1} ... b_n (N.X)_{i_n})`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DotMethod {
    /// Expand over label sequences and reduce each word with [`mixed_moment`].
    #[default]
    Reduction,
    /// Sum `phi_{Q(pi)}` over the ordered partitions of the label sequences.
    Qmap,
}

/// Every sequence in `{1..copies}^n`, in lexicographic order.
pub(crate) fn for_each_sequence(n: usize, copies: usize, mut f: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    if copies == 0 {
        return Ok(());
    }
    let mut seq = vec![1usize; n];
    loop {
        f(&seq)?;
        let Some(i) = (0..n).rev().find(|&i| seq[i] < copies) else {
            return Ok(());
        };
        seq[i] += 1;
        seq[i + 1..].iter_mut().for_each(|x| *x = 1);
    }
}

/// Moments of `N.X = X^(1) + ... + X^(N)` for monotone i.i.d. copies, labels `1 < ... < N`.
pub fn dot_moment(x: &MomentSystem, copies: usize, indices: &[usize], args: &[BMatrix], method: DotMethod) -> Result<BMatrix> {
    x.validate(indices, args)?;
    let n = indices.len();
    if n == 0 {
        return Ok(BMatrix::identity(x.d()));
    }
    let mut total = BMatrix::zero(x.d());
    match method {
        DotMethod::Reduction => {
            let order: Vec<usize> = (1..=copies).collect();
            let marginals = Iid(x);
            for_each_sequence(n, copies, |seq| {
                let word = FormalWord::moment_word(seq, indices, args)?;
                total.add_assign(&mixed_moment(&word, &marginals, &order)?);
                Ok(())
            })?;
        }
        DotMethod::Qmap => {
            let mut values: HashMap<SetPartition, BMatrix> = HashMap::new();
            for_each_sequence(n, copies, |seq| {
                let pi = q_map(&ordered_from_sequence(seq)?);
                let v = values
                    .entry(pi)
                    .or_insert_with_key(|pi| functional_pi_unchecked(x, pi.blocks(), indices, args, PeelOrder::Leftmost));
                total.add_assign(v);
                Ok(())
            })?;
        }
    }
    Ok(total)
}

/// The moment system of `N.X`.
pub fn dot_system(x: &MomentSystem, copies: usize, method: DotMethod) -> MomentSystem {
    let inner = x.clone();
    MomentSystem::from_fn(x.r(), x.d(), x.degree_cap(), move |i, b| {
        dot_moment(&inner, copies, i, b, method).expect("validated by the outer system")
    })
}
