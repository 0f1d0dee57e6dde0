//! Truncated B-valued distributions: cumulant and moment tables over
//! generators x_1..x_s, nested functionals ρ^(π), and the transforms
//! between moments and free cumulants.
//!
//! A table entry is keyed by a generator word r_1..r_k and the k−1 interior
//! basis insertions m_1..m_{k−1}; its value is ρ[x_{r_1}e_{m_1}, …, x_{r_k}].
//! A trailing insertion b_k is applied on the right, so every table is a
//! B-functional by construction.

use std::collections::HashMap;
use std::fmt;
use std::marker::PhantomData;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{BElem, BaseAlgebra};
use crate::error::{Error, Result};
use crate::partitions::SetPartition;
use crate::rational::Q;

pub(crate) type Key = (Vec<usize>, Vec<usize>);

/// All tuples over `0..base` of length `len`, in lexicographic order.
pub fn tuples(base: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = if len == 0 { 1 } else if base == 0 { 0 } else { base.pow(len as u32) };
    (0..total).map(move |mut c| {
        let mut t = vec![0; len];
        for slot in t.iter_mut().rev() {
            *slot = c % base;
            c /= base;
        }
        t
    })
}

pub trait TableKind: Clone + PartialEq {
    const NAME: &'static str;
    /// Value of the empty word, if the functional has one.
    fn empty(d: usize) -> Option<BElem>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cumulants {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Moments {}

impl TableKind for Cumulants {
    const NAME: &'static str = "cumulants";
    fn empty(_: usize) -> Option<BElem> {
        None
    }
}

impl TableKind for Moments {
    const NAME: &'static str = "moments";
    fn empty(d: usize) -> Option<BElem> {
        Some(BElem::identity(d))
    }
}

/// A truncated family of B-functionals ρ^{(k)}, k ≤ order, on generators
/// x_0..x_{s−1}. Missing entries are zero.
#[derive(Clone, PartialEq)]
pub struct Spec<T> {
    algebra: BaseAlgebra,
    s: usize,
    order: usize,
    involution: Vec<usize>,
    values: HashMap<Key, BElem>,
    kind: PhantomData<T>,
}

pub type DistributionSpec = Spec<Cumulants>;
pub type MomentSpec = Spec<Moments>;

impl<T: TableKind> Spec<T> {
    pub fn new(algebra: BaseAlgebra, s: usize, order: usize) -> Self {
        Spec { algebra, s, order, involution: (0..s).collect(), values: HashMap::new(), kind: PhantomData }
    }

    pub fn with_involution(mut self, involution: Vec<usize>) -> Result<Self> {
        if involution.len() != self.s || involution.iter().enumerate().any(|(r, &t)| t >= self.s || involution[t] != r)
        {
            return Err(Error::Dimension(format!("{involution:?} is not an involution of 0..{}", self.s)));
        }
        self.involution = involution;
        Ok(self)
    }

    pub fn algebra(&self) -> BaseAlgebra {
        self.algebra
    }

    pub fn d(&self) -> usize {
        self.algebra.d
    }

    pub fn generators(&self) -> usize {
        self.s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn involution(&self) -> &[usize] {
        &self.involution
    }

    fn check_key(&self, word: &[usize], ins: &[usize]) -> Result<()> {
        if word.len() > self.order {
            return Err(Error::TruncationExceeded { requested: word.len(), order: self.order });
        }
        if word.is_empty() || ins.len() + 1 != word.len() {
            return Err(Error::Dimension(format!(
                "a word of length {} takes {} interior insertions, got {}",
                word.len(),
                word.len().saturating_sub(1),
                ins.len()
            )));
        }
        if let Some(r) = word.iter().find(|&&r| r >= self.s) {
            return Err(Error::IndexOutOfRange(format!("generator {r} of {}", self.s)));
        }
        if let Some(m) = ins.iter().find(|&&m| m >= self.algebra.basis_len()) {
            return Err(Error::IndexOutOfRange(format!("basis index {m} of {}", self.algebra.basis_len())));
        }
        Ok(())
    }

    pub fn set(&mut self, word: &[usize], ins: &[usize], value: BElem) -> Result<()> {
        self.check_key(word, ins)?;
        if value.d() != self.d() {
            return Err(Error::Dimension(format!("value is {0}×{0}, algebra is {1}×{1}", value.d(), self.d())));
        }
        self.insert_unchecked((word.to_vec(), ins.to_vec()), value);
        Ok(())
    }

    pub(crate) fn insert_unchecked(&mut self, key: Key, value: BElem) {
        if value.is_zero() {
            self.values.remove(&key);
        } else {
            self.values.insert(key, value);
        }
    }

    /// ρ[x_{r_1}e_{m_1}, …, x_{r_k}] on basis insertions.
    pub fn get(&self, word: &[usize], ins: &[usize]) -> Result<BElem> {
        self.check_key(word, ins)?;
        Ok(self.lookup(word, ins).cloned().unwrap_or_else(|| self.algebra.zero()))
    }

    pub(crate) fn lookup(&self, word: &[usize], ins: &[usize]) -> Option<&BElem> {
        // borrowed lookups would need a custom key type; lengths here are tiny
        self.values.get(&(word.to_vec(), ins.to_vec()))
    }

    pub(crate) fn lookup_key(&self, key: &Key) -> Option<&BElem> {
        self.values.get(key)
    }

    /// ρ[x_{r_1}b_1, …, x_{r_k}b_k] for arbitrary insertions, by
    /// multilinear expansion of b_1..b_{k−1} and right multiplication by b_k.
    pub fn eval(&self, word: &[usize], args: &[BElem]) -> Result<BElem> {
        if word.len() != args.len() {
            return Err(Error::Dimension(format!("{} generators but {} insertions", word.len(), args.len())));
        }
        if word.len() > self.order {
            return Err(Error::TruncationExceeded { requested: word.len(), order: self.order });
        }
        if let Some(b) = args.iter().find(|b| b.d() != self.d()) {
            return Err(Error::Dimension(format!("insertion is {0}×{0}", b.d())));
        }
        let Some((last, interior)) = args.split_last() else {
            return T::empty(self.d())
                .ok_or_else(|| Error::Dimension(format!("{} are not defined on the empty word", T::NAME)));
        };
        if let Some(r) = word.iter().find(|&&r| r >= self.s) {
            return Err(Error::IndexOutOfRange(format!("generator {r} of {}", self.s)));
        }
        let mut acc = self.algebra.zero();
        let mut ins = Vec::with_capacity(interior.len());
        self.expand(word, interior, &mut ins, &Q::one(), &mut acc);
        Ok(&acc * last)
    }

    fn expand(&self, word: &[usize], interior: &[BElem], ins: &mut Vec<usize>, coef: &Q, acc: &mut BElem) {
        let Some(b) = interior.get(ins.len()) else {
            if let Some(v) = self.lookup(word, ins) {
                acc.add_scaled(coef, v);
            }
            return;
        };
        for (m, c) in b.support() {
            ins.push(m);
            self.expand(word, interior, ins, &(coef * c), acc);
            ins.pop();
        }
    }

    /// Nonzero entries in a fixed order: by length, then word, then insertions.
    pub fn entries(&self) -> Vec<(&[usize], &[usize], &BElem)> {
        let mut e: Vec<_> = self.values.iter().map(|((w, m), v)| (w.as_slice(), m.as_slice(), v)).collect();
        e.sort_by(|a, b| (a.0.len(), a.0, a.1).cmp(&(b.0.len(), b.0, b.1)));
        e
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    /// Every (word, interior insertions) key of length `len`.
    pub fn keys(&self, len: usize) -> impl Iterator<Item = Key> + '_ {
        let basis = self.algebra.basis_len();
        tuples(self.s, len).flat_map(move |w| tuples(basis, len.saturating_sub(1)).map(move |m| (w.clone(), m)))
    }

    /// The same data with every value multiplied by `t`.
    pub fn scaled(&self, t: &Q) -> Self {
        let mut out = Spec::new(self.algebra, self.s, self.order);
        out.involution = self.involution.clone();
        for (k, v) in &self.values {
            out.insert_unchecked(k.clone(), v.scale(t));
        }
        out
    }

    /// Restricted to words of length ≤ `order`.
    pub fn truncated(&self, order: usize) -> Self {
        let mut out = self.clone();
        out.order = order.min(self.order);
        out.values.retain(|(w, _), _| w.len() <= out.order);
        out
    }

    /// ρ^{(π)}[x_{r_1}b_1, …, x_{r_n}b_n].
    pub fn nested(&self, pi: &SetPartition, word: &[usize], args: &[BElem]) -> Result<BElem> {
        nested_eval(pi, word, args, |w, b| self.eval(w, b))
    }
}

impl<T: TableKind> fmt::Debug for Spec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct(T::NAME)
            .field("d", &self.d())
            .field("s", &self.s)
            .field("order", &self.order)
            .field("entries", &self.entries())
            .finish()
    }
}

/// ρ^{(π)} by repeated removal of the first interval block.
pub fn nested_eval<F>(pi: &SetPartition, word: &[usize], args: &[BElem], rho: F) -> Result<BElem>
where
    F: FnMut(&[usize], &[BElem]) -> Result<BElem>,
{
    nested_eval_with(pi, word, args, rho, |_| 0)
}

/// ρ^{(π)}, where `pick(c)` chooses which of the c interval blocks present
/// at each step is removed next.
pub fn nested_eval_with<F, P>(pi: &SetPartition, word: &[usize], args: &[BElem], mut rho: F, mut pick: P) -> Result<BElem>
where
    F: FnMut(&[usize], &[BElem]) -> Result<BElem>,
    P: FnMut(usize) -> usize,
{
    let n = pi.size();
    if word.len() != n || args.len() != n {
        return Err(Error::SizeMismatch(n, word.len().min(args.len())));
    }
    if !pi.is_noncrossing() {
        return Err(Error::Crossing(pi.to_string()));
    }
    let Some(d) = args.first().map(BElem::d) else {
        return Err(Error::Dimension("ρ^{(π)} needs at least one argument".into()));
    };
    // live arguments as (block label, generator, insertion)
    let mut live: Vec<(usize, usize, BElem)> = (0..n).map(|p| (pi.label(p), word[p], args[p].clone())).collect();
    let mut left = BElem::identity(d);
    let mut remaining = pi.block_count();
    loop {
        let mut sizes: HashMap<usize, usize> = HashMap::new();
        for x in &live {
            *sizes.entry(x.0).or_default() += 1;
        }
        let mut intervals = Vec::new();
        let mut start = 0;
        while start < live.len() {
            let label = live[start].0;
            let mut end = start;
            while end + 1 < live.len() && live[end + 1].0 == label {
                end += 1;
            }
            if sizes[&label] == end - start + 1 {
                intervals.push(start..end + 1);
            }
            start = end + 1;
        }
        let range = intervals.swap_remove(pick(intervals.len()).min(intervals.len() - 1));
        let gens: Vec<usize> = live[range.clone()].iter().map(|x| x.1).collect();
        let ins: Vec<BElem> = live[range.clone()].iter().map(|x| x.2.clone()).collect();
        let value = rho(&gens, &ins)?;
        remaining -= 1;
        if remaining == 0 {
            return Ok(&left * &value);
        }
        if range.start == 0 {
            left = &left * &value;
        } else {
            let before = &mut live[range.start - 1].2;
            *before = &*before * &value;
        }
        live.drain(range);
    }
}

/// Σ over the block V ∋ 1 of the term
/// κ_{w|V}[x b_{v_1}E[…]b, …, x_{v_s}] · b_{v_s}E[tail],
/// with E and κ on basis insertions. Shorter entries must already be known.
fn first_block_sum(
    alg: BaseAlgebra,
    word: &[usize],
    ins: &[usize],
    kappa: &DistributionSpec,
    moments: &MomentSpec,
    skip_full: bool,
) -> BElem {
    let l = word.len();
    let d = alg.d;
    let full = (1u64 << (l - 1)) - 1;
    let mut total = alg.zero();
    let mut blocks = Vec::with_capacity(l);
    'subsets: for mask in 0..=full {
        if skip_full && mask == full {
            continue;
        }
        blocks.clear();
        blocks.push(0);
        blocks.extend((1..l).filter(|i| mask >> (i - 1) & 1 == 1));
        let mut coef = Q::one();
        let mut mu = Vec::with_capacity(blocks.len() - 1);
        for w in blocks.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b == a + 1 {
                mu.push(ins[a]);
                continue;
            }
            let (ra, ca) = alg.split(ins[a]);
            let (rb, cb) = alg.split(ins[b - 1]);
            let Some(seg) = moments.lookup(&word[a + 1..b], &ins[a + 1..b - 1]) else {
                continue 'subsets;
            };
            let f = seg.get(ca, rb);
            if f.is_zero() {
                continue 'subsets;
            }
            coef *= f;
            mu.push(ra * d + cb);
        }
        let inner: Vec<usize> = blocks.iter().map(|&i| word[i]).collect();
        let Some(k) = kappa.lookup_key(&(inner, mu)) else {
            continue;
        };
        let last = *blocks.last().unwrap();
        if last + 1 == l {
            total.add_scaled(&coef, k);
        } else {
            let Some(tail) = moments.lookup(&word[last + 1..], &ins[last + 1..l - 1]) else {
                continue;
            };
            let (a, b) = alg.split(ins[last]);
            total.add_scaled(&coef, &(k * &tail.left_unit(a, b)));
        }
    }
    total
}

/// E = Σ_{π∈NC(n)} κ^{(π)} for every word up to the truncation order.
pub fn moments_from_cumulants(spec: &DistributionSpec) -> MomentSpec {
    let alg = spec.algebra;
    let mut out = MomentSpec::new(alg, spec.s, spec.order);
    out.involution = spec.involution.clone();
    for len in 1..=spec.order {
        let keys: Vec<Key> = spec.keys(len).collect();
        for key in keys {
            let v = first_block_sum(alg, &key.0, &key.1, spec, &out, false);
            out.insert_unchecked(key, v);
        }
    }
    out
}

/// Inverse of [`moments_from_cumulants`], solving the moment-cumulant
/// formula for the top cumulant one length at a time.
pub fn cumulants_from_moments(spec: &MomentSpec) -> DistributionSpec {
    let alg = spec.algebra;
    let mut out = DistributionSpec::new(alg, spec.s, spec.order);
    out.involution = spec.involution.clone();
    for len in 1..=spec.order {
        let keys: Vec<Key> = spec.keys(len).collect();
        for key in keys {
            let lower = first_block_sum(alg, &key.0, &key.1, &out, spec, true);
            let e = spec.lookup_key(&key).cloned().unwrap_or_else(|| alg.zero());
            out.insert_unchecked(key, &e - &lower);
        }
    }
    out
}

/// True iff no cumulant whose word meets two classes of `grouping`
/// (a partition of the generators) is nonzero.
pub fn freeness_check(spec: &DistributionSpec, grouping: &SetPartition) -> Result<bool> {
    if grouping.size() != spec.s {
        return Err(Error::SizeMismatch(grouping.size(), spec.s));
    }
    Ok(spec.values.keys().all(|(w, _)| w.iter().all(|&r| grouping.label(r) == grouping.label(w[0]))))
}

/// Joint distribution of free families: generators are concatenated and
/// mixed cumulants vanish.
pub fn free_product(specs: &[DistributionSpec]) -> Result<DistributionSpec> {
    let Some(first) = specs.first() else {
        return Err(Error::Dimension("free product of no distributions".into()));
    };
    let alg = first.algebra;
    if let Some(x) = specs.iter().find(|x| x.algebra != alg) {
        return Err(Error::Dimension(format!("base algebras of size {} and {}", alg.d, x.d())));
    }
    let order = specs.iter().map(|x| x.order).min().unwrap();
    let s: usize = specs.iter().map(|x| x.s).sum();
    let mut out = DistributionSpec::new(alg, s, order);
    let mut offset = 0;
    for x in specs {
        for (r, &t) in x.involution.iter().enumerate() {
            out.involution[offset + r] = offset + t;
        }
        for ((w, m), v) in &x.values {
            if w.len() <= order {
                out.values.insert((w.iter().map(|r| r + offset).collect(), m.clone()), v.clone());
            }
        }
        offset += x.s;
    }
    Ok(out)
}

/// Scalar distribution of one generator from its cumulant sequence κ_1..κ_K.
pub fn scalar_distribution(kappas: &[Q]) -> DistributionSpec {
    let mut spec = DistributionSpec::new(BaseAlgebra::scalars(), 1, kappas.len());
    for (k, c) in kappas.iter().enumerate() {
        spec.insert_unchecked((vec![0; k + 1], vec![0; k]), BElem::scalar(1, c.clone()));
    }
    spec
}

pub fn semicircular(order: usize) -> DistributionSpec {
    let kappas: Vec<Q> = (1..=order).map(|k| if k == 2 { Q::one() } else { Q::zero() }).collect();
    scalar_distribution(&kappas)
}

pub fn free_poisson(order: usize) -> DistributionSpec {
    scalar_distribution(&vec![Q::one(); order])
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    word: Vec<usize>,
    insertions: Vec<usize>,
    value: BElem,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    d: usize,
    s: usize,
    #[serde(rename = "K")]
    order: usize,
    involution: Vec<usize>,
    entries: Vec<EntryJson>,
}

impl<T: TableKind> Serialize for Spec<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecJson {
            d: self.d(),
            s: self.s,
            order: self.order,
            involution: self.involution.clone(),
            entries: self
                .entries()
                .into_iter()
                .map(|(w, m, v)| EntryJson { word: w.to_vec(), insertions: m.to_vec(), value: v.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de, T: TableKind> Deserialize<'de> for Spec<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = SpecJson::deserialize(d)?;
        let alg = BaseAlgebra::new(raw.d).map_err(D::Error::custom)?;
        let mut spec = Spec::new(alg, raw.s, raw.order).with_involution(raw.involution).map_err(D::Error::custom)?;
        for e in raw.entries {
            spec.set(&e.word, &e.insertions, e.value).map_err(D::Error::custom)?;
        }
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::mobius;
    use crate::partitions::{catalog, PartitionFamily};
    use crate::rational::{frac, q};

    fn scalar(x: &BElem) -> Q {
        x.get(0, 0).clone()
    }

    #[test]
    fn tuples_in_order() {
        let t: Vec<Vec<usize>> = tuples(2, 2).collect();
        assert_eq!(t, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(tuples(3, 0).count(), 1);
    }

    #[test]
    fn nesting_example() {
        // ρ^{(k)} records its call as a single string: each generator tags
        // its argument and each insertion is a distinct prime
        let pi: SetPartition = "{{1,8,9,10},{2,7},{3,4,5},{6}}".parse().unwrap();
        let primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];
        let args: Vec<BElem> = primes.iter().map(|&p| BElem::scalar(1, q(p))).collect();
        let word: Vec<usize> = (0..10).collect();
        let mut log = Vec::new();
        let v = nested_eval(&pi, &word, &args, |w, b| {
            log.push(w.to_vec());
            let prod: Q = b.iter().map(scalar).product();
            Ok(BElem::scalar(1, prod * q(w.len() as i64 + 100)))
        })
        .unwrap();
        assert_eq!(log, vec![vec![2, 3, 4], vec![5], vec![1, 6], vec![0, 7, 8, 9]]);
        let expect: Q = primes.iter().map(|&p| q(p)).product::<Q>() * q(103) * q(101) * q(102) * q(104);
        assert_eq!(scalar(&v), expect);
    }

    #[test]
    fn nesting_trivial_cases() {
        let spec = free_poisson(4);
        let args = vec![BElem::scalar(1, q(2)); 3];
        let one = spec.nested(&SetPartition::one(3), &[0, 0, 0], &args).unwrap();
        assert_eq!(one, spec.eval(&[0, 0, 0], &args).unwrap());
        let x = semicircular(4).scaled(&q(3));
        let zero = x.nested(&SetPartition::zero(2), &[0, 0], &args[..2]).unwrap();
        assert!(zero.is_zero());
        assert!(spec.nested(&"{{1,3},{2,4}}".parse().unwrap(), &[0; 4], &vec![BElem::identity(1); 4]).is_err());
    }

    fn catalan(k: usize) -> i64 {
        catalog(PartitionFamily::Nc, k).len() as i64
    }

    #[test]
    fn semicircular_and_poisson_moments() {
        let m = moments_from_cumulants(&semicircular(6));
        for k in 1..=6usize {
            let expect = if k % 2 == 0 { catalan(k / 2) } else { 0 };
            assert_eq!(scalar(&m.get(&vec![0; k], &vec![0; k - 1]).unwrap()), q(expect));
        }
        let m = moments_from_cumulants(&free_poisson(5));
        for k in 1..=5usize {
            assert_eq!(scalar(&m.get(&vec![0; k], &vec![0; k - 1]).unwrap()), q(catalan(k)));
        }
        let zero = moments_from_cumulants(&DistributionSpec::new(BaseAlgebra::new(2).unwrap(), 2, 3));
        assert_eq!(zero.support_len(), 0);
    }

    #[test]
    fn cumulants_of_known_moments() {
        let back = cumulants_from_moments(&moments_from_cumulants(&semicircular(6)));
        assert_eq!(back, semicircular(6));
        let mut ones = MomentSpec::new(BaseAlgebra::scalars(), 1, 5);
        for k in 1..=5 {
            ones.set(&vec![0; k], &vec![0; k - 1], BElem::identity(1)).unwrap();
        }
        let k = cumulants_from_moments(&ones);
        assert_eq!(k.get(&[0], &[]).unwrap(), BElem::identity(1));
        for len in 2..=5 {
            assert!(k.get(&vec![0; len], &vec![0; len - 1]).unwrap().is_zero());
        }
    }

    #[test]
    fn truncation_is_an_error() {
        let spec = semicircular(3);
        assert!(matches!(spec.get(&[0; 4], &[0; 3]), Err(Error::TruncationExceeded { .. })));
        assert!(spec.eval(&[0; 4], &vec![BElem::identity(1); 4]).is_err());
        assert_eq!(moments_from_cumulants(&spec).eval(&[], &[]).unwrap(), BElem::identity(1));
    }

    /// Moment of a word as Σ_{π∈NC(n)} κ^{(π)} evaluated literally.
    fn literal_moment(spec: &DistributionSpec, word: &[usize], args: &[BElem]) -> BElem {
        let mut acc = spec.algebra().zero();
        for pi in &catalog(PartitionFamily::Nc, word.len()).items {
            acc += &spec.nested(pi, word, args).unwrap();
        }
        acc
    }

    #[test]
    fn matrix_valued_agrees_with_literal_sum() {
        let alg = BaseAlgebra::new(2).unwrap();
        let mut spec = DistributionSpec::new(alg, 2, 4);
        let mut c = 0i64;
        for len in 1..=4 {
            for (w, m) in spec.keys(len).collect::<Vec<_>>() {
                c += 1;
                let v = BElem::from_rows(vec![
                    vec![frac(c % 5 - 2, 3), q(c % 3)],
                    vec![q((c * 7) % 4 - 1), frac(1, c % 4 + 1)],
                ])
                .unwrap();
                spec.set(&w, &m, v).unwrap();
            }
        }
        let moments = moments_from_cumulants(&spec);
        let b = BElem::from_rows(vec![vec![q(1), frac(-1, 2)], vec![q(2), q(3)]]).unwrap();
        let args = vec![b.clone(), alg.unit(1), b.clone(), alg.unit(2)];
        for word in [vec![0, 1, 1, 0], vec![1, 0, 1, 1], vec![0, 0, 0, 0]] {
            assert_eq!(moments.eval(&word, &args).unwrap(), literal_moment(&spec, &word, &args));
        }
        assert_eq!(cumulants_from_moments(&moments), spec);
    }

    #[test]
    fn mobius_route_for_cumulants() {
        let spec = free_poisson(5).scaled(&frac(2, 3));
        let moments = moments_from_cumulants(&spec);
        let n = 5;
        let args = vec![BElem::identity(1); n];
        let one = SetPartition::one(n);
        let mut acc = Q::zero();
        for sigma in &catalog(PartitionFamily::Nc, n).items {
            let e = scalar(&moments.nested(sigma, &[0; 5], &args).unwrap());
            acc += e * Q::from_integer(mobius(sigma, &one).unwrap());
        }
        assert_eq!(acc, frac(2, 3));
    }

    #[test]
    fn freeness_of_semicirculars() {
        let two = free_product(&[semicircular(4), semicircular(4)]).unwrap();
        let classes = SetPartition::zero(2);
        assert!(freeness_check(&two, &classes).unwrap());
        let mut mixed = two.clone();
        mixed.set(&[0, 1], &[0], BElem::identity(1)).unwrap();
        assert!(!freeness_check(&mixed, &classes).unwrap());
        assert!(freeness_check(&mixed, &SetPartition::one(2)).unwrap());
    }

    #[test]
    fn json_roundtrip() {
        let spec = free_product(&[semicircular(3), free_poisson(3)]).unwrap().with_involution(vec![0, 1]).unwrap();
        let s = serde_json::to_string(&spec).unwrap();
        assert!(s.starts_with(r#"{"d":1,"s":2,"K":3,"involution":[0,1],"entries":[{"word":[1],"insertions":[],"value":[["1"]]}"#));
        let back: DistributionSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, spec);
        let bad = r#"{"d":1,"s":1,"K":2,"involution":[0],"entries":[{"word":[0,0,0],"insertions":[0,0],"value":[["1"]]}]}"#;
        assert!(serde_json::from_str::<DistributionSpec>(bad).is_err());
    }
}
