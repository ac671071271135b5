//! Set, non-crossing, ordered and monotone partitions of `{1..n}`.
//!
//! Elements are 1-based throughout, matching the JSON representation
//! `[[1,3,4],[5,7],[2,6]]`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonempty, strictly increasing set of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Block(Vec<usize>);

impl Block {
    pub fn new(mut elements: Vec<usize>) -> Result<Self> {
        elements.sort_unstable();
        if elements.is_empty() {
            return Err(Error::Domain("empty block".into()));
        }
        if elements[0] == 0 {
            return Err(Error::Domain("block elements must be positive".into()));
        }
        if elements.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain(format!("duplicate element in block {elements:?}")));
        }
        Ok(Block(elements))
    }

    pub fn elements(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> usize {
        self.0[0]
    }

    pub fn max(&self) -> usize {
        self.0[self.0.len() - 1]
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    fn is_disjoint(&self, other: &Block) -> bool {
        self.0.iter().all(|x| !other.contains(*x))
    }
}

impl<'de> Deserialize<'de> for Block {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Block::new(Vec::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

/// Whether two blocks interleave as `a < b < c < d` with `a, c` in one and `b, d` in the other.
pub fn blocks_cross(v: &Block, w: &Block) -> bool {
    fn one_way(v: &Block, w: &Block) -> bool {
        // a < b < c < d, a,c in v, b,d in w: some b in w lies strictly inside v's span
        // with an element of v above it, and some d in w lies above that element.
        for &b in w.elements() {
            if b <= v.min() {
                continue;
            }
            if let Some(&c) = v.elements().iter().find(|&&c| c > b) {
                if w.max() > c {
                    return true;
                }
            }
        }
        false
    }
    one_way(v, w) || one_way(w, v)
}

pub fn is_non_crossing(blocks: &[Block]) -> bool {
    for (i, v) in blocks.iter().enumerate() {
        for w in &blocks[i + 1..] {
            if blocks_cross(v, w) {
                return false;
            }
        }
    }
    true
}

/// `V ≻ W`: some `i, j` in `W` bracket every element of `V`.
pub fn nests(v: &Block, w: &Block) -> Result<bool> {
    if !v.is_disjoint(w) {
        return Err(Error::Domain(format!("blocks {:?} and {:?} overlap", v.0, w.0)));
    }
    let below = w.elements().iter().any(|&i| i < v.min());
    let above = w.elements().iter().any(|&j| j > v.max());
    Ok(below && above)
}

fn validate_cover(n: usize, blocks: &[Block]) -> Result<()> {
    let mut seen = vec![false; n + 1];
    for b in blocks {
        for &x in b.elements() {
            if x > n {
                return Err(Error::Domain(format!("element {x} outside 1..{n}")));
            }
            if seen[x] {
                return Err(Error::Domain(format!("element {x} appears in two blocks")));
            }
            seen[x] = true;
        }
    }
    if let Some(x) = (1..=n).find(|&x| !seen[x]) {
        return Err(Error::Domain(format!("element {x} is not covered")));
    }
    Ok(())
}

/// Anything that is a list of blocks on `{1..n}`.
pub trait HasBlocks {
    fn ground(&self) -> usize;
    fn blocks(&self) -> &[Block];

    fn block_count(&self) -> usize {
        self.blocks().len()
    }
}

/// An unordered partition of `{1..n}`; blocks are kept sorted by minimum.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Block>,
}

impl SetPartition {
    pub fn new(n: usize, mut blocks: Vec<Block>) -> Result<Self> {
        validate_cover(n, &blocks)?;
        blocks.sort_by_key(Block::min);
        Ok(SetPartition { n, blocks })
    }

    pub fn from_vecs(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(n, blocks.into_iter().map(Block::new).collect::<Result<_>>()?)
    }

    /// Infers `n` as the largest element.
    pub fn from_blocks(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n = blocks.iter().flatten().copied().max().unwrap_or(0);
        Self::from_vecs(n, blocks)
    }

    pub fn is_non_crossing(&self) -> bool {
        is_non_crossing(&self.blocks)
    }

    /// Refinement order: every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &SetPartition) -> bool {
        self.n == other.n
            && self.blocks.iter().all(|v| other.blocks.iter().any(|w| v.elements().iter().all(|&x| w.contains(x))))
    }

    pub fn to_vecs(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.0.clone()).collect()
    }
}

impl HasBlocks for SetPartition {
    fn ground(&self) -> usize {
        self.n
    }
    fn blocks(&self) -> &[Block] {
        &self.blocks
    }
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.blocks.iter().map(|b| &b.0)).finish()
    }
}

/// A sequence of blocks `(V_1, ..., V_k)` whose underlying set is a partition.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedPartition {
    n: usize,
    blocks: Vec<Block>,
}

impl OrderedPartition {
    pub fn new(n: usize, blocks: Vec<Block>) -> Result<Self> {
        validate_cover(n, &blocks)?;
        Ok(OrderedPartition { n, blocks })
    }

    pub fn from_vecs(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(n, blocks.into_iter().map(Block::new).collect::<Result<_>>()?)
    }

    /// Infers `n` as the largest element.
    pub fn from_blocks(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n = blocks.iter().flatten().copied().max().unwrap_or(0);
        Self::from_vecs(n, blocks)
    }

    pub fn underlying(&self) -> SetPartition {
        let mut blocks = self.blocks.clone();
        blocks.sort_by_key(Block::min);
        SetPartition { n: self.n, blocks }
    }

    /// Position (1-based) of the block containing each element: the canonical
    /// encoding used for lexicographic enumeration order.
    pub fn rank_encoding(&self) -> Vec<usize> {
        let mut code = vec![0; self.n];
        for (pos, b) in self.blocks.iter().enumerate() {
            for &x in b.elements() {
                code[x - 1] = pos + 1;
            }
        }
        code
    }

    pub fn is_monotone(&self) -> bool {
        if !is_non_crossing(&self.blocks) {
            return false;
        }
        for (i, vi) in self.blocks.iter().enumerate() {
            for (j, vj) in self.blocks.iter().enumerate() {
                if i != j && nests(vi, vj).expect("blocks of a partition are disjoint") && i < j {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_vecs(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.0.clone()).collect()
    }
}

impl HasBlocks for OrderedPartition {
    fn ground(&self) -> usize {
        self.n
    }
    fn blocks(&self) -> &[Block] {
        &self.blocks
    }
}

impl fmt::Debug for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{:?}", b.0)?;
        }
        f.write_str(")")
    }
}

/// An ordered non-crossing partition in which inner blocks come later.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MonotonePartition(OrderedPartition);

impl MonotonePartition {
    pub fn new(pi: OrderedPartition) -> Result<Self> {
        if !is_non_crossing(&pi.blocks) {
            return Err(Error::Domain(format!("{pi:?} is crossing")));
        }
        if !pi.is_monotone() {
            return Err(Error::Domain(format!("{pi:?} lists an inner block before an outer one")));
        }
        Ok(MonotonePartition(pi))
    }

    pub fn ordered(&self) -> &OrderedPartition {
        &self.0
    }

    pub fn into_ordered(self) -> OrderedPartition {
        self.0
    }
}

impl HasBlocks for MonotonePartition {
    fn ground(&self) -> usize {
        self.0.n
    }
    fn blocks(&self) -> &[Block] {
        &self.0.blocks
    }
}

/// Which family [`enumerate`] lists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PartitionKind {
    All,
    NonCrossing,
    IntervalBlocks,
    Ordered,
    Monotone,
    MonotonePair,
}

impl std::str::FromStr for PartitionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "all" => PartitionKind::All,
            "nc" | "non-crossing" => PartitionKind::NonCrossing,
            "interval" | "interval-blocks" | "ib" => PartitionKind::IntervalBlocks,
            "ordered" | "lp" => PartitionKind::Ordered,
            "monotone" | "m" => PartitionKind::Monotone,
            "monotone-pair" | "m2" => PartitionKind::MonotonePair,
            other => return Err(Error::Parse(format!("unknown partition kind {other:?}"))),
        })
    }
}

/// Lists a partition family as block lists. Set partitions come in
/// lexicographic order of restricted growth strings, ordered families in
/// lexicographic order of [`OrderedPartition::rank_encoding`], and interval
/// blocks in lexicographic order of their elements (one block per item).
pub fn enumerate(kind: PartitionKind, n: usize) -> Result<Vec<Vec<Block>>> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    Ok(match kind {
        PartitionKind::All => set_partitions(n).into_iter().map(|p| p.blocks).collect(),
        PartitionKind::NonCrossing => non_crossing_partitions(n).into_iter().map(|p| p.blocks).collect(),
        PartitionKind::IntervalBlocks => interval_blocks(n).into_iter().map(|b| vec![b]).collect(),
        PartitionKind::Ordered => ordered_partitions(n).into_iter().map(|p| p.blocks).collect(),
        PartitionKind::Monotone => monotone_partitions(n).into_iter().map(|p| p.0.blocks).collect(),
        PartitionKind::MonotonePair => monotone_pair_partitions(n)?.into_iter().map(|p| p.0.blocks).collect(),
    })
}

fn from_rgs(rgs: &[usize]) -> SetPartition {
    let k = rgs.iter().max().map_or(0, |m| m + 1);
    let mut blocks = vec![Vec::new(); k];
    for (i, &b) in rgs.iter().enumerate() {
        blocks[b].push(i + 1);
    }
    SetPartition { n: rgs.len(), blocks: blocks.into_iter().map(Block).collect() }
}

fn rgs_walk(n: usize, prefix: &mut Vec<usize>, max: usize, keep: &dyn Fn(&[usize]) -> bool, out: &mut Vec<SetPartition>) {
    if prefix.len() == n {
        out.push(from_rgs(prefix));
        return;
    }
    let upper = if prefix.is_empty() { 0 } else { max + 1 };
    for b in 0..=upper {
        prefix.push(b);
        if keep(prefix) {
            rgs_walk(n, prefix, max.max(b), keep, out);
        }
        prefix.pop();
    }
}

/// All set partitions of `{1..n}` (Bell many).
pub fn set_partitions(n: usize) -> Vec<SetPartition> {
    let mut out = Vec::new();
    rgs_walk(n, &mut Vec::with_capacity(n), 0, &|_| true, &mut out);
    out
}

/// Whether the newest element of a restricted growth string creates a crossing.
fn last_element_crosses(rgs: &[usize]) -> bool {
    let e = rgs.len() - 1;
    let b = rgs[e];
    let Some(prev) = (0..e).rev().find(|&i| rgs[i] == b) else {
        return false;
    };
    // another block with an element strictly between prev and e and one before prev
    (prev + 1..e).any(|m| rgs[m] != b && (0..prev).any(|a| rgs[a] == rgs[m]))
}

/// `NC(n)` (Catalan many), generated with incremental crossing pruning.
pub fn non_crossing_partitions(n: usize) -> Vec<SetPartition> {
    let mut out = Vec::new();
    rgs_walk(n, &mut Vec::with_capacity(n), 0, &|p| !last_element_crosses(p), &mut out);
    out
}

/// `IB(n)`: all intervals `{k, ..., k+l}` of `{1..n}`.
pub fn interval_blocks(n: usize) -> Vec<Block> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for k in 1..=n {
        for end in k..=n {
            out.push(Block((k..=end).collect()));
        }
    }
    out
}

fn from_rank_encoding(code: &[usize]) -> OrderedPartition {
    let k = code.iter().copied().max().unwrap_or(0);
    let mut blocks = vec![Vec::new(); k];
    for (i, &pos) in code.iter().enumerate() {
        blocks[pos - 1].push(i + 1);
    }
    OrderedPartition { n: code.len(), blocks: blocks.into_iter().map(Block).collect() }
}

/// `LP(n)`: all ordered partitions (Fubini many).
pub fn ordered_partitions(n: usize) -> Vec<OrderedPartition> {
    fn walk(n: usize, code: &mut Vec<usize>, out: &mut Vec<OrderedPartition>) {
        if code.len() == n {
            let k = code.iter().copied().max().unwrap_or(0);
            let mut hit = vec![false; k + 1];
            code.iter().for_each(|&c| hit[c] = true);
            if hit[1..].iter().all(|&h| h) {
                out.push(from_rank_encoding(code));
            }
            return;
        }
        for c in 1..=n {
            code.push(c);
            walk(n, code, out);
            code.pop();
        }
    }
    let mut out = Vec::new();
    walk(n, &mut Vec::with_capacity(n), &mut out);
    out
}

/// All orderings of `blocks` in which every block comes after each block it
/// nests inside (linear extensions of the reverse nesting order).
pub fn monotone_orderings(blocks: &[Block]) -> Vec<Vec<usize>> {
    let k = blocks.len();
    // outer[i]: blocks that must precede block i
    let outer: Vec<Vec<usize>> = (0..k)
        .map(|i| (0..k).filter(|&j| j != i && nests(&blocks[i], &blocks[j]).unwrap_or(false)).collect())
        .collect();
    fn walk(outer: &[Vec<usize>], placed: &mut Vec<bool>, order: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if order.len() == outer.len() {
            out.push(order.clone());
            return;
        }
        for i in 0..outer.len() {
            if !placed[i] && outer[i].iter().all(|&j| placed[j]) {
                placed[i] = true;
                order.push(i);
                walk(outer, placed, order, out);
                order.pop();
                placed[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    walk(&outer, &mut vec![false; k], &mut Vec::with_capacity(k), &mut out);
    out
}

/// `M(n)`: every non-crossing partition with every admissible block order.
pub fn monotone_partitions(n: usize) -> Vec<MonotonePartition> {
    let mut out = Vec::new();
    for pi in non_crossing_partitions(n) {
        for order in monotone_orderings(&pi.blocks) {
            let blocks = order.iter().map(|&i| pi.blocks[i].clone()).collect();
            out.push(OrderedPartition { n, blocks });
        }
    }
    out.sort_by_cached_key(OrderedPartition::rank_encoding);
    out.into_iter().map(MonotonePartition).collect()
}

/// `M_2(n)`: monotone partitions whose blocks all have two elements.
pub fn monotone_pair_partitions(n: usize) -> Result<Vec<MonotonePartition>> {
    if n % 2 == 1 {
        return Err(Error::Domain(format!("pair partitions need an even ground set, got n = {n}")));
    }
    Ok(monotone_partitions(n).into_iter().filter(|p| p.blocks().iter().all(|b| b.len() == 2)).collect())
}

/// The gaps `V_1, ..., V_{p+1}` that a subset `V` leaves in a linearly ordered ground set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpolationBlocks {
    gaps: Vec<Vec<usize>>,
}

impl InterpolationBlocks {
    pub fn gaps(&self) -> &[Vec<usize>] {
        &self.gaps
    }
}

/// Interpolation blocks of `subset` inside `ground` (both need not be sorted).
pub fn interpolation_blocks(subset: &[usize], ground: &[usize]) -> Result<InterpolationBlocks> {
    let mut ground = ground.to_vec();
    ground.sort_unstable();
    ground.dedup();
    let mut v = subset.to_vec();
    v.sort_unstable();
    v.dedup();
    if let Some(x) = v.iter().find(|x| ground.binary_search(x).is_err()) {
        return Err(Error::Domain(format!("{x} is not in the ground set")));
    }
    let mut gaps = vec![Vec::new()];
    for &g in &ground {
        if v.binary_search(&g).is_ok() {
            gaps.push(Vec::new());
        } else {
            gaps.last_mut().expect("nonempty").push(g);
        }
    }
    Ok(InterpolationBlocks { gaps })
}

/// Ordered partition of positions by decreasing value: `V_1` holds the
/// positions of the largest entry, `V_2` those of the next largest, and so on.
pub fn ordered_from_sequence(seq: &[usize]) -> Result<OrderedPartition> {
    if seq.is_empty() {
        return Err(Error::Domain("empty sequence".into()));
    }
    let mut values: Vec<usize> = seq.to_vec();
    values.sort_unstable_by(|a, b| b.cmp(a));
    values.dedup();
    let blocks = values
        .iter()
        .map(|&v| Block(seq.iter().enumerate().filter(|(_, &x)| x == v).map(|(i, _)| i + 1).collect()))
        .collect();
    Ok(OrderedPartition { n: seq.len(), blocks })
}

/// The map `Q: LP(n) -> NC(n)`.
///
/// Blocks are processed in order; block `V_k` is cut between consecutive
/// elements `x < y` whenever an element of an earlier block `V_j` (`j < k`)
/// lies strictly between them. Earlier blocks are therefore never split by
/// later ones, and monotone partitions map to their underlying partition.
pub fn q_map(pi: &OrderedPartition) -> SetPartition {
    let mut owner = vec![usize::MAX; pi.n + 1];
    for (k, b) in pi.blocks.iter().enumerate() {
        for &x in b.elements() {
            owner[x] = k;
        }
    }
    let mut pieces = Vec::new();
    for (k, b) in pi.blocks.iter().enumerate() {
        let mut current = vec![b.0[0]];
        for w in b.0.windows(2) {
            let (x, y) = (w[0], w[1]);
            if (x + 1..y).any(|z| owner[z] < k) {
                pieces.push(Block(std::mem::take(&mut current)));
            }
            current.push(y);
        }
        pieces.push(Block(current));
    }
    pieces.sort_by_key(Block::min);
    SetPartition { n: pi.n, blocks: pieces }
}

/// Image counts of `Q ∘ ordered_from_sequence` over all sequences in `{1..N}^n`.
pub type QmapDistribution = Vec<(SetPartition, u64)>;

/// Cached distribution of `q_map(ordered_from_sequence(i))` over `i ∈ {1..N}^n`,
/// sorted by partition.
pub fn qmap_distribution(n: usize, copies: usize) -> Arc<QmapDistribution> {
    type Cache = Mutex<HashMap<(usize, usize), Arc<QmapDistribution>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("qmap cache").get(&(n, copies)) {
        return hit.clone();
    }
    let mut counts: HashMap<SetPartition, u64> = HashMap::new();
    if n > 0 && copies > 0 {
        let mut seq = vec![1usize; n];
        loop {
            let pi = ordered_from_sequence(&seq).expect("nonempty");
            *counts.entry(q_map(&pi)).or_default() += 1;
            // odometer increment
            let mut i = n;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if seq[i] < copies {
                    seq[i] += 1;
                    break;
                }
                seq[i] = 1;
                if i == 0 {
                    i = usize::MAX;
                    break;
                }
            }
            if i == usize::MAX {
                break;
            }
        }
    }
    let mut dist: QmapDistribution = counts.into_iter().collect();
    dist.sort();
    let dist = Arc::new(dist);
    cache.lock().expect("qmap cache").insert((n, copies), dist.clone());
    dist
}

/// `a_π(N)`: number of sequences in `{1..N}^n` whose ordered partition maps to `π` under `Q`.
pub fn a_pi_count(pi: &SetPartition, copies: usize) -> Result<u64> {
    if !pi.is_non_crossing() {
        return Err(Error::Domain(format!("{pi:?} is crossing")));
    }
    let dist = qmap_distribution(pi.n, copies);
    Ok(dist.binary_search_by(|(p, _)| p.cmp(pi)).map(|i| dist[i].1).unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blk(v: &[usize]) -> Block {
        Block::new(v.to_vec()).unwrap()
    }

    #[test]
    fn counts_of_small_families() {
        let bell = [1, 2, 5, 15, 52, 203];
        let fubini = [1, 3, 13, 75, 541, 4683];
        for n in 1..=6 {
            assert_eq!(set_partitions(n).len(), bell[n - 1]);
            assert_eq!(ordered_partitions(n).len(), fubini[n - 1]);
            assert_eq!(interval_blocks(n).len(), n * (n + 1) / 2);
        }
        assert_eq!(enumerate(PartitionKind::Monotone, 1).unwrap(), vec![vec![blk(&[1])]]);
        assert_eq!(monotone_partitions(3).len(), 12);
    }

    #[test]
    fn ordered_enumeration_is_lexicographic() {
        let codes: Vec<_> = ordered_partitions(4).iter().map(OrderedPartition::rank_encoding).collect();
        assert!(codes.windows(2).all(|w| w[0] < w[1]));
        let codes: Vec<_> = monotone_partitions(5).iter().map(|p| p.ordered().rank_encoding()).collect();
        assert!(codes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn nesting_examples() {
        assert!(nests(&blk(&[4, 5, 6]), &blk(&[3, 8, 10])).unwrap());
        assert!(!nests(&blk(&[1]), &blk(&[2, 3])).unwrap());
        assert!(nests(&blk(&[2]), &blk(&[1, 3])).unwrap());
        assert!(!nests(&blk(&[1, 3]), &blk(&[2])).unwrap());
        assert!(nests(&blk(&[1, 2]), &blk(&[2, 3])).is_err());
    }

    #[test]
    fn eleven_point_example_is_monotone() {
        let pi = OrderedPartition::from_blocks(vec![vec![2, 11], vec![3, 8, 10], vec![9], vec![7], vec![1], vec![4, 5, 6]]).unwrap();
        assert!(pi.is_monotone());
        // membership in M(11): the block set is non-crossing and the order is one of its monotone orderings
        let under = pi.underlying();
        assert!(under.is_non_crossing());
        let orders: Vec<Vec<Block>> = monotone_orderings(under.blocks())
            .into_iter()
            .map(|o| o.into_iter().map(|i| under.blocks()[i].clone()).collect())
            .collect();
        assert!(orders.iter().any(|o| o.as_slice() == pi.blocks()));
        // swapping the two outermost nested blocks breaks monotonicity
        let bad = OrderedPartition::from_blocks(vec![vec![3, 8, 10], vec![2, 11], vec![9], vec![7], vec![1], vec![4, 5, 6]]).unwrap();
        assert!(!bad.is_monotone());
        assert!(MonotonePartition::new(bad).is_err());
    }

    #[test]
    fn interpolation_block_examples() {
        let ib = interpolation_blocks(&[2, 3, 4, 6], &[1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(ib.gaps(), &[vec![1], vec![], vec![], vec![5], vec![]]);
        let ib = interpolation_blocks(&[3, 4, 7], &[1, 2, 3, 4, 6, 7, 8]).unwrap();
        assert_eq!(ib.gaps(), &[vec![1, 2], vec![], vec![6], vec![8]]);
        let ib = interpolation_blocks(&[], &[1, 2, 3]).unwrap();
        assert_eq!(ib.gaps(), &[vec![1, 2, 3]]);
        assert!(interpolation_blocks(&[5], &[1, 2]).is_err());
    }

    #[test]
    fn sequence_to_ordered_partition() {
        let v = |p: OrderedPartition| p.to_vecs();
        assert_eq!(v(ordered_from_sequence(&[1, 1, 1]).unwrap()), vec![vec![1, 2, 3]]);
        assert_eq!(v(ordered_from_sequence(&[3, 1, 2]).unwrap()), vec![vec![1], vec![3], vec![2]]);
        assert_eq!(v(ordered_from_sequence(&[2, 1, 2]).unwrap()), vec![vec![1, 3], vec![2]]);
        assert!(ordered_from_sequence(&[]).is_err());
    }

    #[test]
    fn q_map_worked_examples() {
        let fig3 = OrderedPartition::from_blocks(vec![vec![2, 6], vec![1, 3, 4], vec![5, 7]]).unwrap();
        assert_eq!(q_map(&fig3).to_vecs(), vec![vec![1], vec![2, 6], vec![3, 4], vec![5], vec![7]]);
        let fig4 = OrderedPartition::from_blocks(vec![vec![1, 3, 4], vec![2, 6], vec![5, 7]]).unwrap();
        assert_eq!(q_map(&fig4).to_vecs(), vec![vec![1, 3, 4], vec![2], vec![5], vec![6], vec![7]]);
    }

    #[test]
    fn a_pi_small_cases() {
        let single = SetPartition::from_blocks(vec![vec![1]]).unwrap();
        let pair = SetPartition::from_blocks(vec![vec![1, 2]]).unwrap();
        let split = SetPartition::from_blocks(vec![vec![1], vec![2]]).unwrap();
        for n in 0..6u64 {
            assert_eq!(a_pi_count(&single, n as usize).unwrap(), n);
            assert_eq!(a_pi_count(&pair, n as usize).unwrap(), n);
            assert_eq!(a_pi_count(&split, n as usize).unwrap(), n * n - n);
        }
        let crossing = SetPartition::from_blocks(vec![vec![1, 3], vec![2, 4]]).unwrap();
        assert!(a_pi_count(&crossing, 2).is_err());
    }

    #[test]
    fn refinement_order() {
        let fine = SetPartition::from_blocks(vec![vec![1], vec![2], vec![3]]).unwrap();
        let coarse = SetPartition::from_blocks(vec![vec![1, 2, 3]]).unwrap();
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
    }

    #[test]
    fn kind_parsing_and_odd_pairs() {
        assert_eq!("nc".parse::<PartitionKind>().unwrap(), PartitionKind::NonCrossing);
        assert_eq!("monotone_pair".parse::<PartitionKind>().unwrap(), PartitionKind::MonotonePair);
        assert!(enumerate(PartitionKind::MonotonePair, 3).is_err());
        assert_eq!(enumerate(PartitionKind::MonotonePair, 4).unwrap().len(), 3);
    }

    fn interleave(v: &[usize], w: &[usize]) -> bool {
        v.iter().any(|&a| w.iter().any(|&b| v.iter().any(|&c| w.iter().any(|&d| a < b && b < c && c < d))))
    }

    fn crossing_free(blocks: &[Vec<usize>]) -> bool {
        (0..blocks.len()).all(|i| (0..blocks.len()).all(|j| i == j || !interleave(&blocks[i], &blocks[j])))
    }

    #[test]
    fn enumerations_satisfy_their_axioms() {
        for n in 1..=6 {
            for pi in non_crossing_partitions(n) {
                assert!(crossing_free(&pi.to_vecs()), "{pi:?}");
            }
            for pi in monotone_partitions(n) {
                let bs = pi.ordered().to_vecs();
                assert!(crossing_free(&bs));
                for (i, v) in bs.iter().enumerate() {
                    for (j, w) in bs.iter().enumerate() {
                        let inner = w.iter().any(|&a| w.iter().any(|&b| v.iter().all(|&k| a < k && k < b)));
                        assert!(!inner || i > j, "{pi:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn q_map_is_non_crossing_and_fixes_monotone_partitions() {
        for n in 1..=6 {
            for pi in ordered_partitions(n) {
                let q = q_map(&pi);
                assert!(crossing_free(&q.to_vecs()), "{pi:?}");
                assert!(q.refines(&pi.underlying()));
            }
        }
        for n in 1..=5 {
            for pi in monotone_partitions(n) {
                assert_eq!(q_map(pi.ordered()), pi.ordered().underlying());
            }
        }
    }

    #[test]
    fn a_pi_counts_are_polynomial_and_sum_to_powers() {
        use crate::interp::MatrixPolynomial;
        use crate::matrix::BMatrix;
        use crate::rational::Rational;
        for n in 1..=4 {
            for pi in non_crossing_partitions(n) {
                assert_eq!(a_pi_count(&pi, 0).unwrap(), 0);
                let values: Vec<BMatrix> =
                    (1..=n + 1).map(|c| BMatrix::scalar(Rational::from(a_pi_count(&pi, c).unwrap()))).collect();
                let p = MatrixPolynomial::through_origin(1, &values[..n]);
                assert_eq!(p.eval(&Rational::from(n + 1)), values[n], "{pi:?}");
            }
        }
        for n in 1..=5 {
            for copies in 0..=4usize {
                let total: u64 = non_crossing_partitions(n).iter().map(|pi| a_pi_count(pi, copies).unwrap()).sum();
                assert_eq!(total, (copies as u64).pow(n as u32));
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn sequences_map_to_non_crossing_refinements(seq in proptest::collection::vec(1usize..5, 1..9)) {
            let pi = ordered_from_sequence(&seq).unwrap();
            let q = q_map(&pi);
            proptest::prop_assert!(crossing_free(&q.to_vecs()));
            proptest::prop_assert!(q.refines(&pi.underlying()));
            let top = *seq.iter().max().unwrap();
            let first: Vec<usize> = (1..=seq.len()).filter(|&k| seq[k - 1] == top).collect();
            proptest::prop_assert_eq!(pi.blocks()[0].elements(), first.as_slice());
        }
    }
}
