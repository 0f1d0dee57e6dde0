//! Set partitions in restricted-growth form, the noncrossing families and
//! the partition lattice.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition of `{1,…,k}` stored as its restricted-growth string.
///
/// Position `i` (0-based) carries the label of its block; labels are
/// assigned in order of first appearance, so equal partitions have equal
/// encodings and the derived `Ord` is lexicographic on the string.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    rgs: Vec<u8>,
}

impl SetPartition {
    /// Canonicalizes an arbitrary labelling.
    pub fn kernel<T: Eq + std::hash::Hash>(labels: &[T]) -> SetPartition {
        let mut seen: HashMap<&T, u8> = HashMap::new();
        let rgs = labels
            .iter()
            .map(|l| {
                let next = seen.len() as u8;
                *seen.entry(l).or_insert(next)
            })
            .collect();
        SetPartition { rgs }
    }

    pub fn from_rgs(rgs: Vec<u8>) -> Result<SetPartition> {
        let mut next = 0u8;
        for &l in &rgs {
            if l > next {
                return Err(Error::InvalidPartition(format!("{rgs:?} is not a restricted-growth string")));
            }
            if l == next {
                next += 1;
            }
        }
        Ok(SetPartition { rgs })
    }

    /// Builds a partition from 1-based blocks.
    pub fn from_blocks(k: usize, blocks: &[Vec<usize>]) -> Result<SetPartition> {
        let mut labels = vec![usize::MAX; k];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &x in block {
                if x == 0 || x > k || labels[x - 1] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("bad or repeated element {x} for k={k}")));
                }
                labels[x - 1] = b;
            }
        }
        if labels.contains(&usize::MAX) {
            return Err(Error::InvalidPartition(format!("blocks do not cover 1..{k}")));
        }
        Ok(SetPartition::kernel(&labels))
    }

    pub fn zero(k: usize) -> SetPartition {
        SetPartition { rgs: (0..k as u8).collect() }
    }

    pub fn one(k: usize) -> SetPartition {
        SetPartition { rgs: vec![0; k] }
    }

    /// Ground-set size.
    pub fn size(&self) -> usize {
        self.rgs.len()
    }

    pub fn block_count(&self) -> usize {
        self.rgs.iter().max().map_or(0, |&m| m as usize + 1)
    }

    pub fn rgs(&self) -> &[u8] {
        &self.rgs
    }

    /// Block label of the 0-based position `i`.
    pub fn label(&self, i: usize) -> usize {
        self.rgs[i] as usize
    }

    /// Blocks as sorted 0-based position lists, ordered by minimum.
    pub fn blocks0(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (i, &l) in self.rgs.iter().enumerate() {
            out[l as usize].push(i);
        }
        out
    }

    /// Blocks as sorted 1-based lists, ordered by minimum.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        self.blocks0().into_iter().map(|b| b.into_iter().map(|x| x + 1).collect()).collect()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.block_count()];
        for &l in &self.rgs {
            out[l as usize] += 1;
        }
        out
    }

    fn check_size(&self, other: &SetPartition) -> Result<()> {
        if self.size() != other.size() {
            return Err(Error::SizeMismatch(self.size(), other.size()));
        }
        Ok(())
    }

    pub fn join(&self, other: &SetPartition) -> Result<SetPartition> {
        self.check_size(other)?;
        Ok(self.join_unchecked(other))
    }

    pub(crate) fn join_unchecked(&self, other: &SetPartition) -> SetPartition {
        let k = self.size();
        let mut uf = UnionFind::new(k);
        for rel in [&self.rgs, &other.rgs] {
            let mut first = [usize::MAX; 256];
            for (i, &l) in rel.iter().enumerate() {
                let f = &mut first[l as usize];
                if *f == usize::MAX {
                    *f = i;
                } else {
                    uf.union(*f, i);
                }
            }
        }
        let roots: Vec<usize> = (0..k).map(|i| uf.find(i)).collect();
        SetPartition::kernel(&roots)
    }

    /// Number of blocks of the join, without building it.
    pub(crate) fn join_block_count(&self, other: &SetPartition) -> usize {
        let k = self.size();
        let mut uf = UnionFind::new(k);
        let mut comps = k;
        for rel in [&self.rgs, &other.rgs] {
            let mut first = [usize::MAX; 256];
            for (i, &l) in rel.iter().enumerate() {
                let f = &mut first[l as usize];
                if *f == usize::MAX {
                    *f = i;
                } else if uf.union(*f, i) {
                    comps -= 1;
                }
            }
        }
        comps
    }

    pub fn meet(&self, other: &SetPartition) -> Result<SetPartition> {
        self.check_size(other)?;
        let pairs: Vec<(u8, u8)> = self.rgs.iter().copied().zip(other.rgs.iter().copied()).collect();
        Ok(SetPartition::kernel(&pairs))
    }

    /// `self ≤ other` in refinement order.
    pub fn is_leq(&self, other: &SetPartition) -> Result<bool> {
        self.check_size(other)?;
        Ok(self.leq_unchecked(other))
    }

    pub(crate) fn leq_unchecked(&self, other: &SetPartition) -> bool {
        let mut image = [u8::MAX; 256];
        for (&a, &b) in self.rgs.iter().zip(&other.rgs) {
            let slot = &mut image[a as usize];
            if *slot == u8::MAX {
                *slot = b;
            } else if *slot != b {
                return false;
            }
        }
        true
    }

    /// `self ≤ ker(labels)`: labels agree within every block.
    pub fn fits<T: PartialEq>(&self, labels: &[T]) -> bool {
        let mut rep: [usize; 256] = [usize::MAX; 256];
        for (i, &l) in self.rgs.iter().enumerate() {
            let r = &mut rep[l as usize];
            if *r == usize::MAX {
                *r = i;
            } else if labels[*r] != labels[i] {
                return false;
            }
        }
        true
    }

    pub fn is_noncrossing(&self) -> bool {
        let k = self.size();
        let nb = self.block_count();
        let mut lo = vec![usize::MAX; nb];
        let mut hi = vec![0; nb];
        for (i, &l) in self.rgs.iter().enumerate() {
            lo[l as usize] = lo[l as usize].min(i);
            hi[l as usize] = i;
        }
        let mut last = vec![usize::MAX; nb];
        for c in 0..k {
            let l = self.rgs[c] as usize;
            if last[l] != usize::MAX {
                let a = last[l];
                for b in a + 1..c {
                    let m = self.rgs[b] as usize;
                    if lo[m] < a || hi[m] > c {
                        return false;
                    }
                }
            }
            last[l] = c;
        }
        true
    }

    /// Induced partition on the 1-based ordered `subset`, relabelled
    /// order-preservingly.
    pub fn restrict(&self, subset: &[usize]) -> Result<SetPartition> {
        if subset.iter().any(|&x| x == 0 || x > self.size()) || subset.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::SubsetOutOfRange(format!("{subset:?} in 1..{}", self.size())));
        }
        Ok(self.restrict0(subset.iter().map(|&x| x - 1)))
    }

    pub(crate) fn restrict0(&self, positions: impl IntoIterator<Item = usize>) -> SetPartition {
        let labels: Vec<u8> = positions.into_iter().map(|i| self.rgs[i]).collect();
        SetPartition::kernel(&labels)
    }

    pub fn is_pairing(&self) -> bool {
        self.block_sizes().iter().all(|&s| s == 2)
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (b, block) in self.blocks().iter().enumerate() {
            if b > 0 {
                f.write_str(",")?;
            }
            f.write_str("{")?;
            for (j, x) in block.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for SetPartition {
    type Err = Error;

    /// Parses `{{1,4,5},{2,3},{6}}`; the ground set is `1..=max`.
    fn from_str(s: &str) -> Result<SetPartition> {
        let bad = || Error::Parse(format!("not a partition: {s:?}"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = t.strip_prefix('{').and_then(|x| x.strip_suffix('}')).ok_or_else(bad)?;
        if inner.is_empty() {
            return Ok(SetPartition { rgs: Vec::new() });
        }
        let body = inner.strip_prefix('{').and_then(|x| x.strip_suffix('}')).ok_or_else(bad)?;
        let mut blocks = Vec::new();
        for part in body.split("},{") {
            let block: Vec<usize> = part
                .split(',')
                .map(|x| x.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            blocks.push(block);
        }
        let k = blocks.iter().flatten().copied().max().unwrap_or(0);
        SetPartition::from_blocks(k, &blocks)
    }
}

impl Serialize for SetPartition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SetPartition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(k: usize) -> Self {
        UnionFind { parent: (0..k).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// The partition families used as categories.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PartitionFamily {
    /// All partitions P(k).
    All,
    /// Noncrossing partitions NC(k).
    Nc,
    /// Noncrossing pairings NC₂(k).
    Nc2,
    /// Noncrossing partitions with even blocks.
    Nch,
    /// Noncrossing partitions with blocks of size at most two.
    Ncb,
}

impl PartitionFamily {
    pub fn contains(self, p: &SetPartition) -> bool {
        let sizes = || p.block_sizes();
        match self {
            PartitionFamily::All => true,
            PartitionFamily::Nc => p.is_noncrossing(),
            PartitionFamily::Nc2 => p.is_noncrossing() && sizes().iter().all(|&s| s == 2),
            PartitionFamily::Nch => p.is_noncrossing() && sizes().iter().all(|&s| s % 2 == 0),
            PartitionFamily::Ncb => p.is_noncrossing() && sizes().iter().all(|&s| s <= 2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PartitionFamily::All => "all",
            PartitionFamily::Nc => "nc",
            PartitionFamily::Nc2 => "nc2",
            PartitionFamily::Nch => "nch",
            PartitionFamily::Ncb => "ncb",
        }
    }
}

impl FromStr for PartitionFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "all" | "p" => Ok(PartitionFamily::All),
            "nc" => Ok(PartitionFamily::Nc),
            "nc2" => Ok(PartitionFamily::Nc2),
            "nch" => Ok(PartitionFamily::Nch),
            "ncb" => Ok(PartitionFamily::Ncb),
            _ => Err(Error::Parse(format!("unknown partition family {s:?}"))),
        }
    }
}

/// Every member of `family` on `k` points, in lexicographic
/// restricted-growth order.
pub fn enumerate(family: PartitionFamily, k: usize) -> Vec<SetPartition> {
    let mut gen = Generator {
        family,
        k,
        rgs: Vec::with_capacity(k),
        sizes: Vec::new(),
        first: Vec::new(),
        last: Vec::new(),
        out: Vec::new(),
    };
    gen.run();
    gen.out
}

struct Generator {
    family: PartitionFamily,
    k: usize,
    rgs: Vec<u8>,
    sizes: Vec<usize>,
    first: Vec<usize>,
    last: Vec<usize>,
    out: Vec<SetPartition>,
}

impl Generator {
    fn noncrossing_family(&self) -> bool {
        self.family != PartitionFamily::All
    }

    fn max_block(&self) -> usize {
        match self.family {
            PartitionFamily::Nc2 | PartitionFamily::Ncb => 2,
            _ => usize::MAX,
        }
    }

    fn feasible(&self) -> bool {
        let remaining = self.k - self.rgs.len();
        match self.family {
            PartitionFamily::Nc2 => self.sizes.iter().filter(|&&s| s == 1).count() <= remaining,
            PartitionFamily::Nch => self.sizes.iter().filter(|&&s| s % 2 == 1).count() <= remaining,
            _ => true,
        }
    }

    fn run(&mut self) {
        if !self.feasible() {
            return;
        }
        let i = self.rgs.len();
        if i == self.k {
            self.out.push(SetPartition { rgs: self.rgs.clone() });
            return;
        }
        for l in 0..=self.sizes.len() {
            if l < self.sizes.len() {
                if self.sizes[l] >= self.max_block() {
                    continue;
                }
                if self.noncrossing_family() {
                    let a = self.last[l];
                    if (a + 1..i).any(|b| self.first[self.rgs[b] as usize] < a) {
                        continue;
                    }
                }
                let prev = self.last[l];
                self.rgs.push(l as u8);
                self.sizes[l] += 1;
                self.last[l] = i;
                self.run();
                self.last[l] = prev;
                self.sizes[l] -= 1;
                self.rgs.pop();
            } else {
                self.rgs.push(l as u8);
                self.sizes.push(1);
                self.first.push(i);
                self.last.push(i);
                self.run();
                self.last.pop();
                self.first.pop();
                self.sizes.pop();
                self.rgs.pop();
            }
        }
    }
}

/// An enumeration together with its position index.
pub struct Catalog {
    pub items: Vec<SetPartition>,
    index: HashMap<SetPartition, usize>,
}

impl Catalog {
    pub fn position(&self, p: &SetPartition) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Shared, memoized enumeration of `family` on `k` points.
pub fn catalog(family: PartitionFamily, k: usize) -> Arc<Catalog> {
    static CACHE: OnceLock<Mutex<HashMap<(PartitionFamily, usize), Arc<Catalog>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().unwrap().get(&(family, k)) {
        return c.clone();
    }
    let items = enumerate(family, k);
    let index = items.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
    let c = Arc::new(Catalog { items, index });
    cache.lock().unwrap().entry((family, k)).or_insert(c).clone()
}
