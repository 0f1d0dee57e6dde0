//! Invariance of matrix families under conjugation by O⁺, S⁺, H⁺ and B⁺.
//!
//! A family is G-invariant iff for every word r the vector of moments
//! φ(x^{(r_1)}_{i_1 i_2} ⋯ x^{(r_k)}_{i_{2k−1} i_{2k}}) lies in the span of
//! the T_π, π ∈ D(2k). That linear system is solved exactly here, one
//! kernel class of index tuples per row. Index tuples are 0-based.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::BElem;
use crate::cumulants::{nested_eval, tuples, DistributionSpec};
use crate::error::{Error, Result};
use crate::linalg::{rank, RowReducer};
use crate::matrix_models::{determining_series, is_rcyclic, symmetric_semicircular, MatrixFamilySpec};
use crate::mobius::mobius_nc;
use crate::partitions::{catalog, enumerate, PartitionFamily, SetPartition};
use crate::rational::{serde_q, Q};
use crate::transforms::{hat, kreweras, nch_decompose};
use crate::weingarten::{weingarten, QuantumGroup, WeingartenMatrix};

/// T_π as a 0/1 vector over [n]^m in lexicographic tuple order.
pub fn tvector(pi: &SetPartition, n: usize) -> Vec<u32> {
    tuples(n, pi.size()).map(|i| pi.fits(&i) as u32).collect()
}

/// n(n−1)⋯(n−b+1)
fn falling(n: u64, b: usize) -> BigInt {
    if b as u64 > n {
        return BigInt::zero();
    }
    (0..b as u64).map(|t| BigInt::from(n - t)).product()
}

/// Σ_{i ∈ [n]^m, π ≤ ker i} f(ker i), summed over kernel classes ρ ≥ π,
/// each of which holds n(n−1)⋯(n−|ρ|+1) tuples.
pub fn pattern_sum(mut f: impl FnMut(&SetPartition) -> Q, pi: &SetPartition, n: u64) -> Q {
    try_pattern_sum(|rho| Ok(f(rho)), pi, n).expect("infallible")
}

fn try_pattern_sum(mut f: impl FnMut(&SetPartition) -> Result<Q>, pi: &SetPartition, n: u64) -> Result<Q> {
    let mut total = Q::zero();
    for beta in enumerate(PartitionFamily::All, pi.block_count()) {
        let count = falling(n, beta.block_count());
        if count.is_zero() {
            continue;
        }
        let labels: Vec<usize> = (0..pi.size()).map(|p| beta.label(pi.label(p))).collect();
        total += Q::from_integer(count) * f(&SetPartition::kernel(&labels))?;
    }
    Ok(total)
}

/// The index tuple read off a restricted-growth string.
pub fn representative(rho: &SetPartition) -> Vec<usize> {
    rho.rgs().iter().map(|&l| l as usize).collect()
}

#[derive(Clone, Debug, PartialEq)]
enum Values {
    Tuples(HashMap<(Vec<usize>, Vec<usize>), Q>),
    Kernels(HashMap<(Vec<usize>, SetPartition), Q>),
}

/// Scalar moments φ(x^{(r_1)}_{i_1 i_2} ⋯ x^{(r_k)}_{i_{2k−1} i_{2k}}) of the
/// entries of s matrices of size n, for words of length 1..=k_max. Stored
/// either per index tuple or, when they depend only on ker i, per kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentArray {
    s: usize,
    n: usize,
    k_max: usize,
    values: Values,
}

impl MomentArray {
    /// Expanded form, with `f(word, i)` called for every word and tuple.
    pub fn from_fn(s: usize, n: usize, k_max: usize, mut f: impl FnMut(&[usize], &[usize]) -> Result<Q>) -> Result<Self> {
        let mut values = HashMap::new();
        for k in 1..=k_max {
            for word in tuples(s, k) {
                for i in tuples(n, 2 * k) {
                    let v = f(&word, &i)?;
                    values.insert((word.clone(), i), v);
                }
            }
        }
        Ok(MomentArray { s, n, k_max, values: Values::Tuples(values) })
    }

    /// Kernel-compressed form, with `f(word, ρ)` called for every ρ ∈ P(2k)
    /// with at most n blocks.
    pub fn from_kernel_fn(
        s: usize,
        n: usize,
        k_max: usize,
        mut f: impl FnMut(&[usize], &SetPartition) -> Result<Q>,
    ) -> Result<Self> {
        let mut values = HashMap::new();
        for k in 1..=k_max {
            let kernels: Vec<SetPartition> =
                enumerate(PartitionFamily::All, 2 * k).into_iter().filter(|r| r.block_count() <= n).collect();
            for word in tuples(s, k) {
                for rho in &kernels {
                    let v = f(&word, rho)?;
                    values.insert((word.clone(), rho.clone()), v);
                }
            }
        }
        Ok(MomentArray { s, n, k_max, values: Values::Kernels(values) })
    }

    /// Every moment of the entries of `fam`, through its moment table.
    pub fn from_family(fam: &MatrixFamilySpec, k_max: usize) -> Result<Self> {
        check_order(fam, k_max)?;
        let small = fam.truncated(k_max);
        let moments = small.moments();
        let ones = vec![BElem::identity(fam.base().d); k_max];
        MomentArray::from_fn(fam.s(), fam.n(), k_max, |word, i| {
            let gens = entry_word(fam, word, i);
            Ok(moments.eval(&gens, &ones[..word.len()])?.tr())
        })
    }

    /// Moments of `fam` at one tuple per kernel class, each computed as
    /// Σ_{π ∈ NC(k)} φ(κ^{(π)}) from the entry cumulants. Only meaningful
    /// when the moments of `fam` depend on ker i alone.
    pub fn from_family_by_kernel(fam: &MatrixFamilySpec, k_max: usize) -> Result<Self> {
        check_order(fam, k_max)?;
        let ones = vec![BElem::identity(fam.base().d); k_max];
        MomentArray::from_kernel_fn(fam.s(), fam.n(), k_max, |word, rho| {
            let gens = entry_word(fam, word, &representative(rho));
            let mut total = Q::zero();
            for pi in &catalog(PartitionFamily::Nc, word.len()).items {
                total += fam.entries().nested(pi, &gens, &ones[..word.len()])?.tr();
            }
            Ok(total)
        })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn is_compressed(&self) -> bool {
        matches!(self.values, Values::Kernels(_))
    }

    fn missing(word: &[usize], what: String) -> Error {
        Error::IncompleteMoments(format!("word {word:?} at {what}"))
    }

    /// The moment at index tuple `i`.
    pub fn get(&self, word: &[usize], i: &[usize]) -> Result<Q> {
        match &self.values {
            Values::Tuples(v) => v.get(&(word.to_vec(), i.to_vec())),
            Values::Kernels(v) => v.get(&(word.to_vec(), SetPartition::kernel(i))),
        }
        .cloned()
        .ok_or_else(|| Self::missing(word, format!("{i:?}")))
    }

    /// The moment on kernel class ρ, read at its restricted-growth tuple.
    pub fn kernel_value(&self, word: &[usize], rho: &SetPartition) -> Result<Q> {
        match &self.values {
            Values::Tuples(v) => v.get(&(word.to_vec(), representative(rho))),
            Values::Kernels(v) => v.get(&(word.to_vec(), rho.clone())),
        }
        .cloned()
        .ok_or_else(|| Self::missing(word, format!("kernel {rho}")))
    }

    /// The kernel-compressed form, if the moments depend only on ker i.
    pub fn compress(&self) -> Option<MomentArray> {
        let Values::Tuples(v) = &self.values else {
            return Some(self.clone());
        };
        let mut out: HashMap<(Vec<usize>, SetPartition), Q> = HashMap::new();
        for ((word, i), x) in v {
            match out.entry((word.clone(), SetPartition::kernel(i))) {
                std::collections::hash_map::Entry::Occupied(e) if e.get() != x => return None,
                std::collections::hash_map::Entry::Occupied(_) => {}
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(x.clone());
                }
            }
        }
        Some(MomentArray { values: Values::Kernels(out), ..*self })
    }

    /// The expanded form; n^{2k} entries per word.
    pub fn expand(&self) -> Result<MomentArray> {
        if let Values::Tuples(_) = self.values {
            return Ok(self.clone());
        }
        MomentArray::from_fn(self.s, self.n, self.k_max, |w, i| self.get(w, i))
    }

    /// Every expected entry is present and in range.
    fn validate(&self) -> Result<()> {
        let expected: usize = (1..=self.k_max)
            .map(|k| {
                let per_word = match self.values {
                    Values::Tuples(_) => self.n.pow(2 * k as u32),
                    Values::Kernels(_) => {
                        enumerate(PartitionFamily::All, 2 * k).iter().filter(|r| r.block_count() <= self.n).count()
                    }
                };
                self.s.pow(k as u32) * per_word
            })
            .sum();
        let in_range = |w: &[usize], len: usize| {
            !w.is_empty() && w.len() <= self.k_max && w.iter().all(|&r| r < self.s) && len == 2 * w.len()
        };
        let ok = match &self.values {
            Values::Tuples(v) => {
                v.len() == expected && v.keys().all(|(w, i)| in_range(w, i.len()) && i.iter().all(|&x| x < self.n))
            }
            Values::Kernels(v) => {
                v.len() == expected
                    && v.keys().all(|(w, r)| in_range(w, r.size()) && r.block_count() <= self.n)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::IncompleteMoments(format!(
                "expected {expected} distinct entries for s={}, n={}, k_max={}",
                self.s, self.n, self.k_max
            )))
        }
    }

    /// Rows (word, tuple or kernel, value) in a fixed order.
    fn sorted_entries(&self) -> Vec<EntryJson> {
        let mut out: Vec<EntryJson> = match &self.values {
            Values::Tuples(v) => v
                .iter()
                .map(|((w, i), x)| EntryJson { word: w.clone(), pattern: None, tuple: Some(i.clone()), value: x.clone() })
                .collect(),
            Values::Kernels(v) => v
                .iter()
                .map(|((w, r), x)| EntryJson { word: w.clone(), pattern: Some(r.clone()), tuple: None, value: x.clone() })
                .collect(),
        };
        let key = |e: &EntryJson| {
            let place = e.tuple.clone().unwrap_or_else(|| representative(e.pattern.as_ref().unwrap()));
            (e.word.len(), e.word.clone(), place)
        };
        out.sort_by_cached_key(key);
        out
    }
}

fn check_order(fam: &MatrixFamilySpec, k_max: usize) -> Result<()> {
    if k_max > fam.order() {
        return Err(Error::TruncationExceeded { requested: k_max, order: fam.order() });
    }
    Ok(())
}

/// Entry generators x^{(r_l)}_{i_{2l} i_{2l+1}}.
fn entry_word(fam: &MatrixFamilySpec, word: &[usize], i: &[usize]) -> Vec<usize> {
    word.iter().enumerate().map(|(l, &r)| fam.gen(r, i[2 * l], i[2 * l + 1])).collect()
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    word: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pattern: Option<SetPartition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tuple: Option<Vec<usize>>,
    #[serde(with = "serde_q")]
    value: Q,
}

#[derive(Serialize, Deserialize)]
struct ArrayJson {
    s: usize,
    n: usize,
    k_max: usize,
    compressed: bool,
    entries: Vec<EntryJson>,
}

impl Serialize for MomentArray {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ArrayJson {
            s: self.s,
            n: self.n,
            k_max: self.k_max,
            compressed: self.is_compressed(),
            entries: self.sorted_entries(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MomentArray {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ArrayJson::deserialize(d)?;
        let values = if raw.compressed {
            let mut v = HashMap::new();
            for e in raw.entries {
                let p = e.pattern.ok_or_else(|| D::Error::custom("compressed entry without a pattern"))?;
                v.insert((e.word, p), e.value);
            }
            Values::Kernels(v)
        } else {
            let mut v = HashMap::new();
            for e in raw.entries {
                let t = e.tuple.ok_or_else(|| D::Error::custom("expanded entry without a tuple"))?;
                v.insert((e.word, t), e.value);
            }
            Values::Tuples(v)
        };
        let array = MomentArray { s: raw.s, n: raw.n, k_max: raw.k_max, values };
        array.validate().map_err(D::Error::custom)?;
        Ok(array)
    }
}

// ---------------------------------------------------------------------------
// the span test

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coefficient {
    pub partition: SetPartition,
    #[serde(with = "serde_q")]
    pub value: Q,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// c_{π,r} for every π ∈ D(2k), in canonical order.
    Coefficients(Vec<Coefficient>),
    /// An index tuple at which no combination of the T_π fits.
    Witness(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WordCertificate {
    pub word: Vec<usize>,
    /// The T_π are linearly dependent at this length, so the coefficients
    /// are one solution among many.
    pub dependent: bool,
    #[serde(flatten)]
    pub outcome: Outcome,
}

impl WordCertificate {
    pub fn coefficients(&self) -> Option<&[Coefficient]> {
        match &self.outcome {
            Outcome::Coefficients(c) => Some(c),
            Outcome::Witness(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&[usize]> {
        match &self.outcome {
            Outcome::Witness(w) => Some(w),
            Outcome::Coefficients(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvarianceCertificate {
    pub group: QuantumGroup,
    pub n: usize,
    pub consistent: bool,
    pub words: Vec<WordCertificate>,
    pub warnings: Vec<String>,
}

impl InvarianceCertificate {
    pub fn word(&self, word: &[usize]) -> Option<&WordCertificate> {
        self.words.iter().find(|w| w.word == word)
    }

    /// The first word without a solution.
    pub fn first_failure(&self) -> Option<&WordCertificate> {
        self.words.iter().find(|w| w.witness().is_some())
    }
}

/// Kernel classes with at most n blocks and the moment on each, one column
/// per word. For expanded data, a word whose moments differ inside one
/// kernel class gets the offending tuple as witness straight away.
fn kernel_rows(
    m: &MomentArray,
    k: usize,
    words: &[Vec<usize>],
) -> Result<(Vec<(SetPartition, Vec<Q>)>, Vec<Option<Vec<usize>>>)> {
    let kernels: Vec<SetPartition> =
        enumerate(PartitionFamily::All, 2 * k).into_iter().filter(|r| r.block_count() <= m.n).collect();
    let mut witness = vec![None; words.len()];
    let mut columns: Vec<HashMap<SetPartition, Q>> = Vec::with_capacity(words.len());
    for (w, word) in words.iter().enumerate() {
        let mut seen = HashMap::new();
        match &m.values {
            Values::Tuples(v) => {
                for i in tuples(m.n, 2 * k) {
                    let x = v.get(&(word.clone(), i.clone())).ok_or_else(|| MomentArray::missing(word, format!("{i:?}")))?;
                    let prev = seen.entry(SetPartition::kernel(&i)).or_insert_with(|| x.clone());
                    if prev != x && witness[w].is_none() {
                        witness[w] = Some(i);
                    }
                }
            }
            Values::Kernels(_) => {
                for rho in &kernels {
                    seen.insert(rho.clone(), m.kernel_value(word, rho)?);
                }
            }
        }
        columns.push(seen);
    }
    let rows = kernels
        .into_iter()
        .map(|rho| {
            let rhs = columns.iter().map(|c| c[&rho].clone()).collect();
            (rho, rhs)
        })
        .collect();
    Ok((rows, witness))
}

/// Decides G-invariance by solving φ(x_i) = Σ_{π ∈ D(2k), π ≤ ker i} c_{π,r}
/// exactly for every word of length 1..=k_max.
pub fn invariance_check(m: &MomentArray, group: QuantumGroup) -> Result<InvarianceCertificate> {
    let mut warnings = Vec::new();
    if m.n < 4 {
        warnings.push(format!("n = {} < 4: the vectors T_π may be linearly dependent", m.n));
    }
    let mut words = Vec::new();
    for k in 1..=m.k_max {
        let cols = catalog(group.category(), 2 * k);
        let rwords: Vec<Vec<usize>> = tuples(m.s, k).collect();
        let (rows, mut witness) = kernel_rows(m, k, &rwords)?;
        let mut red = RowReducer::new(cols.len(), rwords.len());
        for (rho, rhs) in &rows {
            let coeffs: Vec<Q> =
                cols.items.iter().map(|p| if p.leq_unchecked(rho) { Q::one() } else { Q::zero() }).collect();
            let pushed = red.push(&coeffs, rhs);
            for (w, r) in pushed.residual.iter().enumerate() {
                if !r.is_zero() && witness[w].is_none() {
                    witness[w] = Some(representative(rho));
                }
            }
        }
        let dependent = red.rank() < cols.len();
        if dependent {
            warnings.push(format!(
                "k = {k}: the {} vectors T_π span a space of dimension {}; coefficients are not unique",
                cols.len(),
                red.rank()
            ));
        }
        let solution = red.solution();
        for (w, word) in rwords.into_iter().enumerate() {
            let outcome = match witness[w].take() {
                Some(t) => Outcome::Witness(t),
                None => Outcome::Coefficients(
                    cols.items
                        .iter()
                        .zip(&solution[w])
                        .map(|(p, v)| Coefficient { partition: p.clone(), value: v.clone() })
                        .collect(),
                ),
            };
            words.push(WordCertificate { word, dependent, outcome });
        }
    }
    let consistent = words.iter().all(|w| w.witness().is_none());
    Ok(InvarianceCertificate { group, n: m.n, consistent, words, warnings })
}

fn check_shape(word: &[usize], tau: &SetPartition, j: &[usize]) -> Result<()> {
    if tau.size() != word.len() {
        return Err(Error::SizeMismatch(tau.size(), word.len()));
    }
    if j.len() != 2 * word.len() {
        return Err(Error::SizeMismatch(2 * word.len(), j.len()));
    }
    if !tau.is_noncrossing() {
        return Err(Error::Crossing(tau.to_string()));
    }
    Ok(())
}

/// φ(E^{(τ)}[x^{(r_1)}_{j_1 j_2}, …, x^{(r_k)}_{j_{2k−1} j_{2k}}]) for E the
/// expectation onto the fixed points of G_n:
/// Σ_{σ ≤ τ̂ ∧ ker j} Σ_{π ≤ τ̂} ∏_{V ∈ τ̂} W_{D(V),n}(π|_V, σ|_V) · Σ_{π ≤ ker i} φ(x_i),
/// σ, π ranging over D(2k).
pub fn moment_formula_rhs(
    m: &MomentArray,
    word: &[usize],
    tau: &SetPartition,
    j: &[usize],
    group: QuantumGroup,
    n: u64,
) -> Result<Q> {
    check_shape(word, tau, j)?;
    let k = word.len();
    let cat = catalog(group.category(), 2 * k);
    let th = hat(tau);
    let blocks = th.blocks0();
    let below: Vec<&SetPartition> = cat.items.iter().filter(|p| p.leq_unchecked(&th)).collect();
    let sums: Vec<Q> = below
        .iter()
        .map(|pi| try_pattern_sum(|rho| m.kernel_value(word, rho), pi, n))
        .collect::<Result<_>>()?;
    let ws: Vec<Arc<WeingartenMatrix>> =
        blocks.iter().map(|b| weingarten(group, b.len(), n)).collect::<Result<_>>()?;
    let restrict = |p: &SetPartition| -> Vec<SetPartition> {
        blocks.iter().map(|b| p.restrict0(b.iter().copied())).collect()
    };
    let pieces: Vec<Vec<SetPartition>> = below.iter().map(|p| restrict(p)).collect();
    let mut total = Q::zero();
    for (si, sigma) in below.iter().enumerate() {
        if !sigma.fits(j) {
            continue;
        }
        for (pi_parts, sum) in pieces.iter().zip(&sums) {
            if sum.is_zero() {
                continue;
            }
            let mut w = Q::one();
            for ((wm, a), b) in ws.iter().zip(pi_parts).zip(&pieces[si]) {
                w *= wm.get(a, b).expect("restrictions stay in the category");
                if w.is_zero() {
                    break;
                }
            }
            total += w * sum;
        }
    }
    Ok(total)
}

/// The finite-n expression
/// Σ_{σ ≤ ker j, σ ∨ 0̂_k = τ̂} Σ_{π ≤ σ} μ(π,σ) n^{−|π|} Σ_{π ≤ ker i} φ(x_i)
/// over σ, π ∈ D(2k), whose limit is φ(κ^{(τ)}[x^{(r_1)}_{j_1 j_2}, …]). The
/// kernel moments are taken as those of an infinite family, so `m` must
/// cover every kernel class with at most max(n_list) blocks.
pub fn limit_cumulant_estimate(
    m: &MomentArray,
    word: &[usize],
    tau: &SetPartition,
    j: &[usize],
    group: QuantumGroup,
    n_list: &[u64],
) -> Result<Vec<(u64, Q)>> {
    check_shape(word, tau, j)?;
    let k = word.len();
    let cat = catalog(group.category(), 2 * k);
    let th = hat(tau);
    let zh = hat(&SetPartition::zero(k));
    let sigmas: Vec<&SetPartition> =
        cat.items.iter().filter(|s| s.fits(j) && s.join_unchecked(&zh) == th).collect();
    // (π, Σ_σ μ(π,σ)) over the π below some σ
    let mut weights: Vec<(&SetPartition, BigInt)> = Vec::new();
    for pi in &cat.items {
        let w: BigInt = sigmas.iter().filter(|s| pi.leq_unchecked(s)).map(|s| mobius_nc(pi, s)).sum();
        if !w.is_zero() {
            weights.push((pi, w));
        }
    }
    n_list
        .iter()
        .map(|&n| {
            let mut total = Q::zero();
            for (pi, w) in &weights {
                let sum = try_pattern_sum(|rho| m.kernel_value(word, rho), pi, n)?;
                let scale = Q::new(w.clone(), BigInt::from(n).pow(pi.block_count() as u32));
                total += sum * scale;
            }
            Ok((n, total))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// determining series and H⁺

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DetSeriesWitness {
    pub word: Vec<usize>,
    pub insertions: Vec<usize>,
    /// i_1..i_k of θ(t^{(r_1)}_{i_1} ⋯ t^{(r_k)}_{i_k})
    pub indices: Vec<usize>,
}

/// Result of solving θ(t^{(r_1)}_{i_1}e_{m_1} ⋯ t^{(r_k)}_{i_k}) =
/// Σ_{σ ∈ NC(k), K(σ) ≤ ker i} c_{σ,r}[e_{m_1}, …] for all k ≤ K.
#[derive(Clone, Debug)]
pub struct DetSeriesCheck {
    pub invariant: bool,
    /// c_σ for every σ ∈ NC(k), k ≤ K, as a table over the family letters;
    /// empty unless invariant.
    pub coefficients: Vec<(SetPartition, DistributionSpec)>,
    pub witness: Option<DetSeriesWitness>,
}

impl DetSeriesCheck {
    pub fn coefficient(&self, sigma: &SetPartition) -> Option<&DistributionSpec> {
        self.coefficients.iter().find(|(s, _)| s == sigma).map(|(_, t)| t)
    }
}

/// Whether the determining series of an R-cyclic family is invariant under
/// quantum permutations, decided by exact elimination.
pub fn detseries_perm_invariance_check(fam: &MatrixFamilySpec) -> Result<DetSeriesCheck> {
    if !is_rcyclic(fam) {
        return Err(Error::NotRCyclic);
    }
    let theta = determining_series(fam);
    let (n, s, alg) = (fam.n(), fam.s(), fam.base());
    let basis = alg.basis_len();
    let mut coefficients = Vec::new();
    for k in 1..=fam.order() {
        let nc = catalog(PartitionFamily::Nc, k);
        let kr: Vec<SetPartition> = nc.items.iter().map(kreweras).collect::<Result<_>>()?;
        let keys: Vec<(Vec<usize>, Vec<usize>)> =
            tuples(s, k).flat_map(|w| tuples(basis, k - 1).map(move |m| (w.clone(), m))).collect();
        let mut red = RowReducer::new(nc.len(), keys.len() * basis);
        let zero = alg.zero();
        for idx in tuples(n, k) {
            let coeffs: Vec<Q> = kr.iter().map(|p| if p.fits(&idx) { Q::one() } else { Q::zero() }).collect();
            let mut rhs = Vec::with_capacity(keys.len() * basis);
            for (w, ins) in &keys {
                let t: Vec<usize> = w.iter().zip(&idx).map(|(r, i)| r * n + i).collect();
                let v = theta.lookup(&t, ins).unwrap_or(&zero);
                rhs.extend((0..basis).map(|m| v.coord(m).clone()));
            }
            let pushed = red.push(&coeffs, &rhs);
            if let Some(c) = pushed.residual.iter().position(|r| !r.is_zero()) {
                let (word, insertions) = keys[c / basis].clone();
                let witness = DetSeriesWitness { word, insertions, indices: idx };
                return Ok(DetSeriesCheck { invariant: false, coefficients: Vec::new(), witness: Some(witness) });
            }
        }
        let solution = red.solution();
        for (ci, sigma) in nc.items.iter().enumerate() {
            let mut table = DistributionSpec::new(alg, s, fam.order());
            for (ki, (w, ins)) in keys.iter().enumerate() {
                let mut v = alg.zero();
                for m in 0..basis {
                    let (a, b) = alg.split(m);
                    v.set(a, b, solution[ki * basis + m][ci].clone());
                }
                if !v.is_zero() {
                    table.set(w, ins, v)?;
                }
            }
            coefficients.push((sigma.clone(), table));
        }
    }
    Ok(DetSeriesCheck { invariant: true, coefficients, witness: None })
}

/// R-cyclic with a determining series invariant under quantum
/// permutations, which makes the family H_n^+-invariant.
pub fn hplus_invariance_of_rcyclic(fam: &MatrixFamilySpec) -> bool {
    is_rcyclic(fam) && detseries_perm_invariance_check(fam).is_ok_and(|c| c.invariant)
}

/// c_{σ,π,r}[1, …, 1]: the c_σ nested along the blocks of π, where a block V
/// contributes c_{σ|_V, r|_V}.
fn nested_coefficient(check: &DetSeriesCheck, sigma: &SetPartition, pi: &SetPartition, word: &[usize], d: usize) -> Result<BElem> {
    let k = word.len();
    let positions: Vec<usize> = (0..k).collect();
    let ones = vec![BElem::identity(d); k];
    nested_eval(pi, &positions, &ones, |pos, args| {
        let part = sigma.restrict0(pos.iter().copied());
        let letters: Vec<usize> = pos.iter().map(|&p| word[p]).collect();
        check.coefficient(&part).expect("c_σ for every block size up to K").eval(&letters, args)
    })
}

/// The coefficients c_{τ,r} = φ(c_{σ,π,r}[1, …, 1]), τ = σ̃ ∨ π̃ ∈ NC_h(2k),
/// that present the moments of a family with invariant determining series
/// as Σ_{τ ≤ ker i} c_{τ,r}; one list per word of length k.
pub fn hplus_coefficients(
    fam: &MatrixFamilySpec,
    check: &DetSeriesCheck,
    k: usize,
) -> Result<Vec<(Vec<usize>, Vec<Coefficient>)>> {
    if !check.invariant {
        return Err(Error::NotPermutationInvariant);
    }
    if k > fam.order() {
        return Err(Error::TruncationExceeded { requested: k, order: fam.order() });
    }
    let cat = catalog(PartitionFamily::Nch, 2 * k);
    let splits: Vec<(SetPartition, SetPartition)> = cat.items.iter().map(nch_decompose).collect::<Result<_>>()?;
    let d = fam.base().d;
    tuples(fam.s(), k)
        .map(|word| {
            let coeffs = cat
                .items
                .iter()
                .zip(&splits)
                .map(|(tau, (sigma, pi))| {
                    let value = nested_coefficient(check, sigma, pi, &word, d)?.tr();
                    Ok(Coefficient { partition: tau.clone(), value })
                })
                .collect::<Result<_>>()?;
            Ok((word, coeffs))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// the symmetric semicircular matrix and S⁺

/// Findings for the symmetric matrix with free semicircular entries.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub n: usize,
    /// The k = 2 system for S⁺ has no solution.
    pub inconsistent: bool,
    pub witness: Option<Vec<usize>>,
    /// φ(x_{i_1 i_2}x_{i_3 i_4}) = T_π + T_σ − T_τ with π = {13|24},
    /// σ = {14|23}, τ = 1_4.
    pub moments_match: bool,
    /// Rank of {T_ν : ν ∈ NC(4)}.
    pub rank_nc: usize,
    /// Rank after adding T_π for the crossing π.
    pub rank_with_crossing: usize,
}

impl CounterexampleReport {
    pub fn confirmed(&self) -> bool {
        self.inconsistent && self.moments_match && self.rank_with_crossing == self.rank_nc + 1
    }
}

pub fn splus_counterexample(n: usize) -> Result<CounterexampleReport> {
    let fam = symmetric_semicircular(n, 2);
    let m = MomentArray::from_family(&fam, 2)?;
    let cert = invariance_check(&m, QuantumGroup::SPlus)?;
    let word2 = cert.word(&[0, 0]).expect("k = 2 word");
    let parse = |s: &str| s.parse::<SetPartition>().expect("literal");
    let (pi, sigma, tau) = (parse("{{1,3},{2,4}}"), parse("{{1,4},{2,3}}"), SetPartition::one(4));
    let (tp, ts, tt) = (tvector(&pi, n), tvector(&sigma, n), tvector(&tau, n));
    let moments_match = tuples(n, 4).enumerate().all(|(x, i)| {
        let expect = tp[x] as i64 + ts[x] as i64 - tt[x] as i64;
        m.get(&[0, 0], &i).map(|v| v == Q::from_integer(expect.into())).unwrap_or(false)
    });
    let as_q = |v: Vec<u32>| -> Vec<Q> { v.into_iter().map(|x| Q::from_integer(x.into())).collect() };
    let mut vectors: Vec<Vec<Q>> = catalog(PartitionFamily::Nc, 4).items.iter().map(|p| as_q(tvector(p, n))).collect();
    let rank_nc = rank(&vectors);
    vectors.push(as_q(tp));
    let rank_with_crossing = rank(&vectors);
    Ok(CounterexampleReport {
        n,
        inconsistent: word2.witness().is_some(),
        witness: word2.witness().map(<[usize]>::to_vec),
        moments_match,
        rank_nc,
        rank_with_crossing,
    })
}
