//! The algebra `Mul^r[[B]]` of sequences of multilinear functionals, with the
//! monotone composition `odot`, the operation `star`, and the polynomial
//! family `t -> mu^{t.X}`.
//!
//! Entries are evaluators rather than dense tensors; equality is decided on
//! matrix-unit argument tuples, which is complete by multilinearity.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;
use std::sync::{Arc, Mutex};

use rand::Rng;
use serde_json::{json, Value};

use crate::cumulants::{cumulant, dot_polynomial};
use crate::error::{Error, Result};
use crate::matrix::{BMatrix, Matrix, PolyMatrix};
use crate::moments::{CumulantSystem, MomentSystem, Multilinear};
use crate::oracle::{mixed_moment, FormalWord};
use crate::random::{int_matrix, rng};
use crate::rational::Rational;
use crate::ring::{Poly, Ring, Var};

/// Values a series can take: a unital ring, noncommutative in general.
pub trait SeriesValue: Clone + PartialEq + Eq + Hash + fmt::Debug + Send + Sync + 'static {
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;

    /// Matrix size, when the value is a matrix.
    fn dim(&self) -> Option<usize> {
        None
    }
}

impl<S: Ring + Eq + Hash> SeriesValue for Matrix<S> {
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn zero_like(&self) -> Self {
        Matrix::zero(Matrix::dim(self))
    }
    fn one_like(&self) -> Self {
        Matrix::identity(Matrix::dim(self))
    }
    fn dim(&self) -> Option<usize> {
        Some(Matrix::dim(self))
    }
}

type EntryFn<V> = dyn Fn(&[usize], &[V]) -> V + Send + Sync;

/// Values keyed by `(indices, flat matrix-unit indices)`.
type UnitTable<T> = Mutex<HashMap<(Vec<usize>, Vec<usize>), T>>;

/// An element `F = (F_(), F_{i_1}, F_{i_1 i_2}, ...)` of `Mul^r[[B]]`, truncated
/// at `degree_cap`. Component indices are 0-based.
#[derive(Clone)]
pub struct Series<V> {
    r: usize,
    degree_cap: usize,
    constant: V,
    entry: Arc<EntryFn<V>>,
}

impl<V: SeriesValue> fmt::Debug for Series<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Series")
            .field("r", &self.r)
            .field("degree_cap", &self.degree_cap)
            .field("constant", &self.constant)
            .finish_non_exhaustive()
    }
}

impl<V: SeriesValue> Series<V> {
    pub fn new(r: usize, degree_cap: usize, constant: V, entry: impl Fn(&[usize], &[V]) -> V + Send + Sync + 'static) -> Self {
        Series { r, degree_cap, constant, entry: Arc::new(entry) }
    }

    /// `Id_() = 1` and every other entry zero.
    pub fn identity(r: usize, degree_cap: usize, one: V) -> Self {
        let zero = one.zero_like();
        Series::new(r, degree_cap, one, move |_, _| zero.clone())
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    pub fn constant(&self) -> &V {
        &self.constant
    }

    /// Validated evaluation of `F_{i_1..i_n}(b_1..b_n)`; `n = 0` gives the constant.
    pub fn eval(&self, indices: &[usize], args: &[V]) -> Result<V> {
        if indices.len() != args.len() {
            return Err(Error::Dimension(format!("{} indices but {} arguments", indices.len(), args.len())));
        }
        if indices.len() > self.degree_cap {
            return Err(Error::DegreeCap { requested: indices.len(), cap: self.degree_cap });
        }
        if let Some(&index) = indices.iter().find(|&&i| i >= self.r) {
            return Err(Error::IndexOutOfRange { index, r: self.r });
        }
        if let Some(d) = self.constant.dim() {
            if args.iter().any(|a| a.dim() != Some(d)) {
                return Err(Error::Dimension("argument dimension".into()));
            }
        }
        Ok(self.at(indices, args))
    }

    fn at(&self, indices: &[usize], args: &[V]) -> V {
        if indices.is_empty() {
            self.constant.clone()
        } else {
            (self.entry)(indices, args)
        }
    }

    /// Caches entry values by exact argument tuple.
    pub fn memoized(self) -> Self {
        type Memo<V> = Mutex<HashMap<(Vec<usize>, Vec<V>), V>>;
        let memo: Memo<V> = Mutex::new(HashMap::new());
        let entry = self.entry.clone();
        Series::new(self.r, self.degree_cap, self.constant.clone(), move |i, b| {
            let key = (i.to_vec(), b.to_vec());
            if let Some(v) = memo.lock().expect("series memo").get(&key) {
                return v.clone();
            }
            let v = entry(i, b);
            let mut m = memo.lock().expect("series memo");
            if m.len() > 1 << 20 {
                m.clear();
            }
            m.insert(key, v.clone());
            v
        })
    }

    fn compatible(&self, other: &Self) -> Result<usize> {
        if self.r != other.r {
            return Err(Error::Dimension(format!("series over r = {} and r = {}", self.r, other.r)));
        }
        if self.constant.dim() != other.constant.dim() {
            return Err(Error::Dimension("series over different base algebras".into()));
        }
        Ok(self.degree_cap.min(other.degree_cap))
    }

    /// `(F odot G)_{i_1..i_n}(b_1..b_n) = sum_{V} F_{i(V)}(G_{i(V_1)}(b_{V_1}) b_{v_1}, ...) G_{i(V_{p+1})}(b_{V_{p+1}})`
    /// over subsets `V` with interpolation blocks `V_1..V_{p+1}`; `(F odot G)_() = F_() G_()`.
    pub fn odot(&self, g: &Self) -> Result<Self> {
        let cap = self.compatible(g)?;
        let (f, g) = (self.clone(), g.clone());
        let constant = f.constant.mul(&g.constant);
        Ok(Series::new(self.r, cap, constant, move |i, b| odot_entry(&f, &g, i, b)).memoized())
    }

    /// `(F star G)_{i_1..i_n}(b_1..b_n) = sum_{V = {k..k+l}} F_{i(V^c)}(b_1, ..., b_{k-1}, G_{i(V)}(b_V) b_{k+l+1}, ..., b_n)`,
    /// where a block reaching `n` contributes `F_{i(V^c)}(b_{V^c}) G_{i(V)}(b_V)`.
    pub fn star(&self, g: &Self) -> Result<Self> {
        let cap = self.compatible(g)?;
        let (f, g) = (self.clone(), g.clone());
        let constant = f.constant.mul(&g.constant);
        Ok(Series::new(self.r, cap, constant, move |i, b| star_entry(&f, &g, i, b)).memoized())
    }

    pub fn add(&self, g: &Self) -> Result<Self> {
        let cap = self.compatible(g)?;
        let (f, g) = (self.clone(), g.clone());
        let constant = f.constant.add(&g.constant);
        Ok(Series::new(self.r, cap, constant, move |i, b| f.at(i, b).add(&g.at(i, b))))
    }
}

fn odot_entry<V: SeriesValue>(f: &Series<V>, g: &Series<V>, i: &[usize], b: &[V]) -> V {
    let n = i.len();
    // G on every interval a..e, the empty interval giving G_()
    let mut gaps: Vec<Vec<Option<V>>> = vec![vec![None; n + 1]; n + 1];
    let mut gap = |a: usize, e: usize| -> V { gaps[a][e].get_or_insert_with(|| g.at(&i[a..e], &b[a..e])).clone() };
    let mut total = f.constant.zero_like();
    for mask in 0u32..(1 << n) {
        if mask == 0 {
            total = total.add(&f.constant.mul(&gap(0, n)));
            continue;
        }
        let mut f_idx = Vec::new();
        let mut f_args = Vec::new();
        let mut prev = 0;
        for v in (0..n).filter(|v| mask & (1 << v) != 0) {
            f_idx.push(i[v]);
            f_args.push(gap(prev, v).mul(&b[v]));
            prev = v + 1;
        }
        let term = f.at(&f_idx, &f_args).mul(&gap(prev, n));
        total = total.add(&term);
    }
    total
}

fn star_entry<V: SeriesValue>(f: &Series<V>, g: &Series<V>, i: &[usize], b: &[V]) -> V {
    let n = i.len();
    let mut total = f.constant.zero_like();
    for k in 0..n {
        for e in k + 1..=n {
            let inner = g.at(&i[k..e], &b[k..e]);
            let term = if e == n {
                f.at(&i[..k], &b[..k]).mul(&inner)
            } else {
                let f_idx: Vec<usize> = i[..k].iter().chain(&i[e..]).copied().collect();
                let mut f_args: Vec<V> = b[..k].to_vec();
                f_args.push(inner.mul(&b[e]));
                f_args.extend_from_slice(&b[e + 1..]);
                f.at(&f_idx, &f_args)
            };
            total = total.add(&term);
        }
    }
    total
}

impl<S: Ring + Eq + Hash> Series<Matrix<S>> {
    /// A series determined by its values on matrix-unit tuples (flat unit
    /// indices), extended multilinearly; unit values are cached.
    pub fn from_unit_values(
        r: usize,
        degree_cap: usize,
        constant: Matrix<S>,
        f: impl Fn(&[usize], &[usize]) -> Matrix<S> + Send + Sync + 'static,
    ) -> Self {
        let d = constant.dim();
        let table: UnitTable<Matrix<S>> = Mutex::new(HashMap::new());
        let lookup = move |i: &[usize], u: &[usize]| -> Matrix<S> {
            let key = (i.to_vec(), u.to_vec());
            if let Some(v) = table.lock().expect("unit table").get(&key) {
                return v.clone();
            }
            let v = f(i, u);
            table.lock().expect("unit table").insert(key, v.clone());
            v
        };
        Series::new(r, degree_cap, constant, move |i, b| {
            let parts: Vec<Vec<(usize, S)>> = b.iter().map(|m| m.nonzero().map(|(k, s)| (k, s.clone())).collect()).collect();
            let mut total = Matrix::zero(d);
            let mut units = vec![0; b.len()];
            contract(&parts, 0, S::one(), &mut units, &mut |u, c| total.add_scaled(c, &lookup(i, u)));
            total
        })
    }

    pub fn sub(&self, g: &Self) -> Result<Self> {
        let cap = self.compatible(g)?;
        let (f, g) = (self.clone(), g.clone());
        let constant = &f.constant - &g.constant;
        Ok(Series::new(self.r, cap, constant, move |i, b| &f.at(i, b) - &g.at(i, b)))
    }

    /// The first value on which two series differ, if any.
    pub fn difference(&self, g: &Self, mode: EqualityMode) -> Result<Option<Mismatch<S>>> {
        let cap = self.compatible(g)?;
        let d = self.constant.dim();
        if self.constant != g.constant {
            return Ok(Some(Mismatch { indices: vec![], args: vec![], left: self.constant.clone(), right: g.constant.clone() }));
        }
        let check = |i: &[usize], args: Vec<Matrix<S>>| -> Option<Mismatch<S>> {
            let (l, r) = (self.at(i, &args), g.at(i, &args));
            (l != r).then(|| Mismatch { indices: i.to_vec(), args, left: l, right: r })
        };
        match mode {
            EqualityMode::Exhaustive { degree } => {
                for n in 1..=degree.min(cap) {
                    for i in tuples(self.r, n) {
                        for u in tuples(d * d, n) {
                            let args = u.iter().map(|&k| Matrix::unit_flat(d, k)).collect();
                            if let Some(m) = check(&i, args) {
                                return Ok(Some(m));
                            }
                        }
                    }
                }
            }
            EqualityMode::Randomized { seed, degree, samples } => {
                let mut g = rng(seed);
                for n in 1..=degree.min(cap) {
                    for _ in 0..samples {
                        let i: Vec<usize> = (0..n).map(|_| g.gen_range(0..self.r)).collect();
                        let args = (0..n).map(|_| int_matrix(&mut g, d, 3).lift()).collect();
                        if let Some(m) = check(&i, args) {
                            return Ok(Some(m));
                        }
                    }
                }
            }
        }
        Ok(None)
    }
}

fn contract<S: Ring>(parts: &[Vec<(usize, S)>], j: usize, coef: S, units: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize], &S)) {
    if j == parts.len() {
        emit(units, &coef);
        return;
    }
    for (k, c) in &parts[j] {
        units[j] = *k;
        contract(parts, j + 1, coef.mul(c), units, emit);
    }
}

/// All tuples in `{0..base}^n`, lexicographically.
pub fn tuples(base: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|t| (0..base).map(move |x| [t.clone(), vec![x]].concat())).collect();
    }
    out
}

/// How [`series_equal`] compares entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqualityMode {
    /// Every index tuple and every matrix-unit argument tuple up to `degree`.
    Exhaustive { degree: usize },
    /// `samples` seeded integer-matrix argument tuples per degree up to `degree`.
    Randomized { seed: u64, degree: usize, samples: usize },
}

/// Where two series disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch<S: Ring> {
    pub indices: Vec<usize>,
    pub args: Vec<Matrix<S>>,
    pub left: Matrix<S>,
    pub right: Matrix<S>,
}

pub fn series_equal<S: Ring + Eq + Hash>(f: &Series<Matrix<S>>, g: &Series<Matrix<S>>, mode: EqualityMode) -> Result<bool> {
    Ok(f.difference(g, mode)?.is_none())
}

impl Series<BMatrix> {
    /// Entry values in `Q[t, s]`; entries on polynomial arguments are extended multilinearly.
    pub fn lift(&self) -> Series<PolyMatrix> {
        let f = self.clone();
        let d = self.constant.dim();
        Series::from_unit_values(self.r, self.degree_cap, self.constant.lift(), move |i, u| {
            let args: Vec<BMatrix> = u.iter().map(|&k| BMatrix::unit_flat(d, k)).collect();
            f.at(i, &args).lift()
        })
    }

    /// Dense table of entries on matrix-unit tuples up to `degree`, 1-based.
    pub fn export_json(&self, degree: usize) -> Value {
        let d = self.constant.dim();
        let mut entries = Vec::new();
        for n in 1..=degree.min(self.degree_cap) {
            for i in tuples(self.r, n) {
                for u in tuples(d * d, n) {
                    let args: Vec<BMatrix> = u.iter().map(|&k| BMatrix::unit_flat(d, k)).collect();
                    entries.push(json!({
                        "indices": i.iter().map(|x| x + 1).collect::<Vec<_>>(),
                        "args": u.iter().map(|&k| [k / d + 1, k % d + 1]).collect::<Vec<_>>(),
                        "value": self.at(&i, &args),
                    }));
                }
            }
        }
        json!({ "constant": self.constant, "entries": entries })
    }
}

/// `mu^X`: constant `1`, entries the joint moments.
pub fn from_moments(x: &MomentSystem) -> Series<BMatrix> {
    let inner = x.clone();
    Series::new(x.r(), x.degree_cap(), BMatrix::identity(x.d()), move |i, b| inner.apply(i, b))
}

/// `kappa^X`: constant `0`, entries the cumulants.
pub fn from_cumulants(kappa: &CumulantSystem) -> Series<BMatrix> {
    let inner = kappa.clone();
    Series::new(kappa.r(), kappa.degree_cap(), BMatrix::zero(kappa.d()), move |i, b| inner.apply(i, b))
}

/// `mu^{X+Y}` for monotone independent `X < Y`, by the composition `mu^X odot mu^Y`.
pub fn muraki_sum(x: &MomentSystem, y: &MomentSystem) -> Result<Series<BMatrix>> {
    from_moments(x).odot(&from_moments(y))
}

/// `mu^{X+Y}` by expanding `b_1 (X + Y)_{i_1} ... b_n (X + Y)_{i_n}` into `2^n`
/// words and reducing each with the mixed-moment oracle, `X` below `Y`.
pub fn muraki_oracle(x: &MomentSystem, y: &MomentSystem) -> Result<Series<BMatrix>> {
    if x.r() != y.r() || x.d() != y.d() {
        return Err(Error::Dimension("summands must share r and d".into()));
    }
    let marginals: BTreeMap<usize, MomentSystem> = [(1, x.clone()), (2, y.clone())].into_iter().collect();
    let cap = x.degree_cap().min(y.degree_cap());
    Ok(Series::new(x.r(), cap, BMatrix::identity(x.d()), move |i, b| {
        let n = i.len();
        let mut total = BMatrix::zero(b[0].dim());
        for mask in 0u32..(1 << n) {
            let labels: Vec<usize> = (0..n).map(|j| if mask & (1 << j) != 0 { 2 } else { 1 }).collect();
            let word = FormalWord::moment_word(&labels, i, b).expect("consistent word");
            total.add_assign(&mixed_moment(&word, &marginals, &[1, 2]).expect("validated degrees"));
        }
        total
    }))
}

/// `mu^{t.X}`: the moment series of `N.X` with `N` extended to a variable.
///
/// Built from the interpolated moment polynomials on matrix-unit tuples;
/// evaluation panics if an interpolation consistency check fails.
#[derive(Clone)]
pub struct TFamily {
    x: MomentSystem,
    table: Arc<UnitTable<PolyMatrix>>,
}

impl TFamily {
    pub fn new(x: &MomentSystem) -> Self {
        TFamily { x: x.clone(), table: Arc::new(Mutex::new(HashMap::new())) }
    }

    fn poly(&self, i: &[usize], u: &[usize]) -> PolyMatrix {
        let key = (i.to_vec(), u.to_vec());
        if let Some(p) = self.table.lock().expect("t table").get(&key) {
            return p.clone();
        }
        let d = self.x.d();
        let args: Vec<BMatrix> = u.iter().map(|&k| BMatrix::unit_flat(d, k)).collect();
        let p = dot_polynomial(&self.x, i, &args).unwrap_or_else(|e| panic!("{e}")).to_poly_matrix(Var::T);
        self.table.lock().expect("t table").insert(key, p.clone());
        p
    }

    fn mapped(&self, constant: PolyMatrix, f: fn(&Poly) -> Poly) -> Series<PolyMatrix> {
        let me = self.clone();
        Series::from_unit_values(self.x.r(), self.x.degree_cap(), constant, move |i, u| me.poly(i, u).map(f))
    }

    fn one(&self) -> PolyMatrix {
        PolyMatrix::identity(self.x.d())
    }

    /// `mu^{t.X}` with entries in `Q[t]`.
    pub fn series(&self) -> Series<PolyMatrix> {
        self.mapped(self.one(), Poly::clone)
    }

    /// `d/dt mu^{t.X}` (constant `0`).
    pub fn derivative(&self) -> Series<PolyMatrix> {
        self.mapped(PolyMatrix::zero(self.x.d()), |p| p.derivative(Var::T))
    }

    /// `mu^{s.X}`: the variable renamed to `s`.
    pub fn in_s(&self) -> Series<PolyMatrix> {
        self.mapped(self.one(), Poly::t_as_s)
    }

    /// `mu^{(t+s).X}`.
    pub fn shifted(&self) -> Series<PolyMatrix> {
        self.mapped(self.one(), Poly::shift_t_by_s)
    }

    /// `mu^{N.X}` read off at an integer `t = N`.
    pub fn at_integer(&self, copies: usize) -> Series<BMatrix> {
        let me = self.clone();
        let t = Rational::from(copies);
        Series::from_unit_values(self.x.r(), self.x.degree_cap(), BMatrix::identity(self.x.d()), move |i, u| {
            me.poly(i, u).map(|p| p.eval(&t, &Rational::zero()))
        })
    }
}

/// `(d/dt mu^{t.X} - kappa^X odot mu^{t.X}, d/dt mu^{t.X} - mu^{t.X} star kappa^X)`.
pub fn diff_eq_residuals(x: &MomentSystem) -> Result<(Series<PolyMatrix>, Series<PolyMatrix>)> {
    let family = TFamily::new(x);
    let mu_t = family.series();
    let dmu = family.derivative();
    let kappa = from_cumulants(&cumulant(x)).lift();
    Ok((dmu.sub(&kappa.odot(&mu_t)?)?, dmu.sub(&mu_t.star(&kappa)?)?))
}

/// `(mu^{(s+t).X}, mu^{t.X} odot mu^{s.X})`, equal as polynomials in `s, t`.
pub fn semigroup_sides(x: &MomentSystem) -> Result<(Series<PolyMatrix>, Series<PolyMatrix>)> {
    let family = TFamily::new(x);
    Ok((family.shifted(), family.series().odot(&family.in_s())?))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A seeded series whose entries are sums of `terms` words
/// `a_0 b_1 a_1 ... b_n a_n` with small integer matrices `a_j`.
pub fn random_series(seed: u64, r: usize, d: usize, degree_cap: usize, terms: usize) -> Series<BMatrix> {
    let constant = int_matrix(&mut rng(splitmix(seed)), d, 2);
    Series::new(r, degree_cap, constant, move |i, b| {
        let key = i.iter().fold(splitmix(seed ^ 0x5eed), |h, &x| splitmix(h ^ (x as u64 + 1)));
        let mut g = rng(key);
        let mut total = BMatrix::zero(d);
        for _ in 0..terms {
            let mut acc = int_matrix(&mut g, d, 2);
            for bj in b {
                acc = &(&acc * bj) * &int_matrix(&mut g, d, 2);
            }
            total.add_assign(&acc);
        }
        total
    })
    .memoized()
}

/// A formal sum of words with multiplicities, for counting expansion terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SymSum(BTreeMap<String, u64>);

impl SymSum {
    pub fn atom(name: &str) -> Self {
        SymSum([(name.to_string(), 1)].into_iter().collect())
    }

    /// Number of distinct words.
    pub fn distinct_terms(&self) -> usize {
        self.0.len()
    }

    /// Number of words counted with multiplicity.
    pub fn total_terms(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, u64)> {
        self.0.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

impl SeriesValue for SymSum {
    fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &rhs.0 {
            *out.0.entry(k.clone()).or_default() += v;
        }
        out
    }

    fn mul(&self, rhs: &Self) -> Self {
        let mut out = SymSum::default();
        for (a, x) in &self.0 {
            for (b, y) in &rhs.0 {
                let word = match (a.is_empty(), b.is_empty()) {
                    (true, _) => b.clone(),
                    (_, true) => a.clone(),
                    _ => format!("{a}.{b}"),
                };
                *out.0.entry(word).or_default() += x * y;
            }
        }
        out
    }

    fn zero_like(&self) -> Self {
        SymSum::default()
    }

    fn one_like(&self) -> Self {
        SymSum::atom("")
    }
}

/// An indeterminate series `name`: `name_()` and `name[i..](t_1, ..)` are free symbols.
pub fn symbolic_series(name: &str, r: usize, degree_cap: usize) -> Series<SymSum> {
    let name = name.to_string();
    let constant = SymSum::atom(&format!("{name}()"));
    Series::new(r, degree_cap, constant, move |i, b| {
        let head = format!("{name}{i:?}");
        let mut acc: Vec<(Vec<String>, u64)> = vec![(vec![], 1)];
        for arg in b {
            acc = acc
                .into_iter()
                .flat_map(|(words, m)| arg.0.iter().map(move |(w, k)| ([words.clone(), vec![w.clone()]].concat(), m * k)))
                .collect();
        }
        let mut out = SymSum::default();
        for (words, m) in acc {
            *out.0.entry(format!("{head}({})", words.join(","))).or_default() += m;
        }
        out
    })
}

/// The symbolic arguments `b1, ..., bn`.
pub fn symbolic_args(n: usize) -> Vec<SymSum> {
    (1..=n).map(|j| SymSum::atom(&format!("b{j}"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::seeded_model;

    fn unit(k: usize) -> BMatrix {
        BMatrix::unit_flat(2, k)
    }

    #[test]
    fn odot_low_degree_expansions() {
        let f = random_series(1, 2, 2, 4, 2);
        let g = random_series(2, 2, 2, 4, 2);
        let h = f.odot(&g).unwrap();
        let (fc, gc) = (f.constant().clone(), g.constant().clone());
        let b1 = BMatrix::from_integers(&[&[1, 2], &[0, 1]]).unwrap();
        let b2 = BMatrix::from_integers(&[&[0, -1], &[1, 3]]).unwrap();
        let e = |s: &Series<BMatrix>, i: &[usize], b: &[BMatrix]| s.eval(i, b).unwrap();
        let expected1 = &(&e(&f, &[1], &[&gc * &b1]) * &gc) + &(&fc * &e(&g, &[1], std::slice::from_ref(&b1)));
        assert_eq!(e(&h, &[1], std::slice::from_ref(&b1)), expected1);
        let expected2 = &(&(&e(&f, &[0, 1], &[&gc * &b1, &gc * &b2]) * &gc) + &(&e(&f, &[0], &[&gc * &b1]) * &e(&g, &[1], std::slice::from_ref(&b2))))
            + &(&(&e(&f, &[1], &[&e(&g, &[0], std::slice::from_ref(&b1)) * &b2]) * &gc) + &(&fc * &e(&g, &[0, 1], &[b1.clone(), b2.clone()])));
        assert_eq!(e(&h, &[0, 1], &[b1, b2]), expected2);
        assert_eq!(h.constant(), &(&fc * &gc));
    }

    #[test]
    fn star_low_degree_expansion() {
        let f = random_series(3, 1, 2, 4, 1);
        let g = random_series(4, 1, 2, 4, 1);
        let s = f.star(&g).unwrap();
        let (b1, b2) = (unit(1) + unit(2), unit(3));
        let e = |s: &Series<BMatrix>, i: &[usize], b: &[BMatrix]| s.eval(i, b).unwrap();
        assert_eq!(e(&s, &[0], std::slice::from_ref(&b1)), f.constant() * &e(&g, &[0], std::slice::from_ref(&b1)));
        let expected = &(&e(&f, &[0], &[&e(&g, &[0], std::slice::from_ref(&b1)) * &b2]) + &(&e(&f, &[0], std::slice::from_ref(&b1)) * &e(&g, &[0], std::slice::from_ref(&b2))))
            + &(f.constant() * &e(&g, &[0, 0], &[b1.clone(), b2.clone()]));
        assert_eq!(e(&s, &[0, 0], &[b1, b2]), expected);
    }

    #[test]
    fn identity_is_two_sided_for_odot_and_left_for_star() {
        let f = random_series(5, 2, 2, 3, 2);
        let id = Series::identity(2, 3, BMatrix::identity(2));
        let mode = EqualityMode::Exhaustive { degree: 3 };
        assert!(series_equal(&id.odot(&f).unwrap(), &f, mode).unwrap());
        assert!(series_equal(&f.odot(&id).unwrap(), &f, mode).unwrap());
        assert!(series_equal(&id.star(&f).unwrap(), &f, mode).unwrap());
    }

    #[test]
    fn moments_series_basics() {
        let x = MomentSystem::from_model(seeded_model(3, 2, 2, 2), 3);
        let mu = from_moments(&x);
        let kappa = from_cumulants(&cumulant(&x));
        assert_eq!(mu.constant(), &BMatrix::identity(2));
        assert!(kappa.constant().is_zero());
        let b = vec![BMatrix::from_integers(&[&[2, 1], &[1, 0]]).unwrap()];
        assert_eq!(mu.eval(&[1], &b).unwrap(), kappa.eval(&[1], &b).unwrap());
        let id = Series::identity(2, 3, BMatrix::identity(2));
        let diff = id.difference(&mu, EqualityMode::Exhaustive { degree: 3 }).unwrap().expect("differ");
        assert_eq!(diff.indices.len(), 1);
    }

    #[test]
    fn symbolic_term_counts_small() {
        let f = symbolic_series("F", 1, 4);
        let g = symbolic_series("G", 1, 4);
        let fg = f.odot(&g).unwrap();
        for n in 1..=4 {
            let v = fg.eval(&vec![0; n], &symbolic_args(n)).unwrap();
            assert_eq!(v.distinct_terms(), 1 << n);
            assert_eq!(v.total_terms(), 1 << n);
        }
        let one = fg.eval(&[0], &symbolic_args(1)).unwrap();
        let words: Vec<&str> = one.terms().map(|(w, _)| w).collect();
        assert_eq!(words, vec!["F().G[0](b1)", "F[0](G().b1).G()"]);
    }

    #[test]
    fn tuples_enumeration() {
        assert_eq!(tuples(2, 2), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(tuples(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn export_shape() {
        let x = MomentSystem::from_model(seeded_model(3, 1, 2, 1), 2);
        let v = from_moments(&x).export_json(2);
        assert_eq!(v["entries"].as_array().unwrap().len(), 2);
        assert_eq!(v["constant"], json!([["1"]]));
        assert_eq!(v["entries"][1]["indices"], json!([1, 1]));
    }

    proptest::proptest! {
        #[test]
        fn compositions_stay_multilinear(seed in 0u64..1000, slot in 0usize..3, alpha in -3i64..4) {
            use crate::random::{int_matrix, rng};
            use crate::rational::Rational;
            let f = random_series(seed, 2, 2, 3, 1);
            let g = random_series(seed + 1, 2, 2, 3, 1);
            let mut gen = rng(seed);
            let args: Vec<BMatrix> = (0..3).map(|_| int_matrix(&mut gen, 2, 2)).collect();
            let other = int_matrix(&mut gen, 2, 2);
            let a = Rational::from(alpha);
            let mut mixed = args.clone();
            mixed[slot] = &args[slot].scale(&a) + &other;
            let mut swapped = args.clone();
            swapped[slot] = other;
            let idx = [1, 0, (seed % 2) as usize];
            for h in [f.odot(&g).unwrap(), f.star(&g).unwrap()] {
                let expected = &h.eval(&idx, &args).unwrap().scale(&a) + &h.eval(&idx, &swapped).unwrap();
                proptest::prop_assert_eq!(h.eval(&idx, &mixed).unwrap(), expected);
            }
        }
    }
}
