//! Gram and Weingarten matrices of the free quantum groups and the Haar
//! integral of products of coordinates.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dense_mul_mod, modular_inverse, pow_mod, InverseOutcome, ModularMatrix, QMatrix, ScaledInverse};
use crate::mobius::mobius_nc;
use crate::partitions::{catalog, enumerate, Catalog, PartitionFamily, SetPartition};
use crate::rational::Q;

/// The four free orthogonal easy quantum groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QuantumGroup {
    #[serde(rename = "o+")]
    OPlus,
    #[serde(rename = "s+")]
    SPlus,
    #[serde(rename = "h+")]
    HPlus,
    #[serde(rename = "b+")]
    BPlus,
}

impl QuantumGroup {
    pub const ALL: [QuantumGroup; 4] = [QuantumGroup::OPlus, QuantumGroup::SPlus, QuantumGroup::HPlus, QuantumGroup::BPlus];

    /// The category D(k) of the group.
    pub fn category(self) -> PartitionFamily {
        match self {
            QuantumGroup::OPlus => PartitionFamily::Nc2,
            QuantumGroup::SPlus => PartitionFamily::Nc,
            QuantumGroup::HPlus => PartitionFamily::Nch,
            QuantumGroup::BPlus => PartitionFamily::Ncb,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            QuantumGroup::OPlus => "o+",
            QuantumGroup::SPlus => "s+",
            QuantumGroup::HPlus => "h+",
            QuantumGroup::BPlus => "b+",
        }
    }
}

impl fmt::Display for QuantumGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QuantumGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "o+" | "oplus" => Ok(QuantumGroup::OPlus),
            "s+" | "splus" => Ok(QuantumGroup::SPlus),
            "h+" | "hplus" => Ok(QuantumGroup::HPlus),
            "b+" | "bplus" => Ok(QuantumGroup::BPlus),
            _ => Err(Error::Parse(format!("unknown quantum group {s:?}"))),
        }
    }
}

/// G(π,σ) = n^{|π∨σ|} over D(k), stored as the exponent table.
#[derive(Clone)]
pub struct GramMatrix {
    pub group: QuantumGroup,
    pub k: usize,
    pub n: u64,
    pub order: Arc<Catalog>,
    exponents: Vec<u8>,
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.order.len()
    }

    pub fn exponent(&self, i: usize, j: usize) -> u32 {
        self.exponents[i * self.dim() + j] as u32
    }

    pub fn entry(&self, i: usize, j: usize) -> BigInt {
        num_traits::pow(BigInt::from(self.n), self.exponent(i, j) as usize)
    }

    pub fn to_qmatrix(&self) -> QMatrix {
        QMatrix::from_fn(self.dim(), self.dim(), |i, j| Q::from_integer(self.entry(i, j)))
    }
}

pub fn gram(group: QuantumGroup, k: usize, n: u64) -> GramMatrix {
    let order = catalog(group.category(), k);
    let d = order.len();
    let mut exponents = vec![0u8; d * d];
    for i in 0..d {
        for j in i..d {
            let e = order.items[i].join_block_count(&order.items[j]) as u8;
            exponents[i * d + j] = e;
            exponents[j * d + i] = e;
        }
    }
    GramMatrix { group, k, n, order, exponents }
}

/// Multiplication by G through G = Z·diag((n)_{|τ|})·Zᵀ, where Z is the
/// incidence π ≤ τ between D(k) and the full lattice P(k).
struct ZetaFactor {
    /// For each τ ∈ P(k): the members π ≤ τ of D(k).
    below: Vec<Vec<u32>>,
    blocks: Vec<usize>,
}

impl ZetaFactor {
    fn new(order: &Catalog, k: usize) -> ZetaFactor {
        let all = catalog(PartitionFamily::All, k);
        let mut below = vec![Vec::new(); all.len()];
        for (i, pi) in order.items.iter().enumerate() {
            let blocks = pi.blocks0();
            for rho in enumerate(PartitionFamily::All, blocks.len()) {
                let mut labels = vec![0usize; k];
                for (b, block) in blocks.iter().enumerate() {
                    for &x in block {
                        labels[x] = rho.label(b);
                    }
                }
                let tau = SetPartition::kernel(&labels);
                below[all.position(&tau).unwrap()].push(i as u32);
            }
        }
        let blocks = all.items.iter().map(|t| t.block_count()).collect();
        ZetaFactor { below, blocks }
    }
}

struct GramModular<'a> {
    gram: &'a GramMatrix,
    zeta: Option<ZetaFactor>,
}

impl ModularMatrix for GramModular<'_> {
    fn dim(&self) -> usize {
        self.gram.dim()
    }

    fn residues(&self, p: u64) -> Vec<u64> {
        let powers: Vec<u64> = (0..=self.gram.k as u64).map(|e| pow_mod(self.gram.n, e, p)).collect();
        self.gram.exponents.iter().map(|&e| powers[e as usize]).collect()
    }

    fn mul_mod(&self, x: &[u64], p: u64) -> Vec<u64> {
        let Some(zeta) = &self.zeta else {
            return dense_mul_mod(self, x, p);
        };
        let d = self.dim();
        let n = self.gram.n;
        let mut out = vec![0u64; d * d];
        let mut acc = vec![0u64; d];
        for (below, &b) in zeta.below.iter().zip(&zeta.blocks) {
            if below.is_empty() {
                continue;
            }
            let falling = (0..b as u64).fold(1u64, |f, t| if t >= n { 0 } else { f * ((n - t) % p) % p });
            if falling == 0 {
                continue;
            }
            acc.iter_mut().for_each(|a| *a = 0);
            for &i in below {
                for (a, &v) in acc.iter_mut().zip(&x[i as usize * d..(i as usize + 1) * d]) {
                    *a += v;
                }
            }
            for a in acc.iter_mut() {
                *a = *a % p * falling % p;
            }
            for &i in below {
                for (o, &a) in out[i as usize * d..(i as usize + 1) * d].iter_mut().zip(&acc) {
                    *o += a;
                }
            }
        }
        out.iter_mut().for_each(|o| *o %= p);
        out
    }

    fn entry_bits(&self) -> u64 {
        let max_e = self.gram.exponents.iter().copied().max().unwrap_or(0) as u64;
        (64 - self.gram.n.leading_zeros() as u64) * max_e + 1
    }
}

/// Exact inverse W of the Gram matrix, indexed like it.
#[derive(Clone)]
pub struct WeingartenMatrix {
    pub group: QuantumGroup,
    pub k: usize,
    pub n: u64,
    pub order: Arc<Catalog>,
    inverse: ScaledInverse,
}

impl WeingartenMatrix {
    pub fn dim(&self) -> usize {
        self.order.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> Q {
        self.inverse.entry(i, j)
    }

    pub fn get(&self, pi: &SetPartition, sigma: &SetPartition) -> Option<Q> {
        Some(self.entry(self.order.position(pi)?, self.order.position(sigma)?))
    }

    /// Integer numerators and per-column denominators.
    pub fn scaled(&self) -> &ScaledInverse {
        &self.inverse
    }

    pub fn to_qmatrix(&self) -> QMatrix {
        self.inverse.to_qmatrix()
    }
}

/// Dimensions above this are recomputed rather than kept in memory.
const MEMO_LIMIT: usize = 500;

/// The exact Weingarten matrix W = G⁻¹, memoized by (group, k, n).
pub fn weingarten(group: QuantumGroup, k: usize, n: u64) -> Result<Arc<WeingartenMatrix>> {
    type Memo = Mutex<HashMap<(QuantumGroup, usize, u64), Arc<WeingartenMatrix>>>;
    static MEMO: OnceLock<Memo> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if let Some(w) = memo.lock().unwrap().get(&(group, k, n)) {
        return Ok(w.clone());
    }
    let g = gram(group, k, n);
    let zeta = (k <= 9 && g.dim() >= 200).then(|| ZetaFactor::new(&g.order, k));
    let inverse = match modular_inverse(&GramModular { gram: &g, zeta }) {
        InverseOutcome::Inverse(inv) => inv,
        InverseOutcome::Singular(_) => {
            return Err(Error::SingularGram { group: group.name().into(), k, n });
        }
    };
    let w = Arc::new(WeingartenMatrix { group, k, n, order: g.order.clone(), inverse });
    if w.dim() <= MEMO_LIMIT {
        memo.lock().unwrap().insert((group, k, n), w.clone());
    }
    Ok(w)
}

/// ∫ u_{i₁j₁}⋯u_{i_kj_k} = Σ_{π ≤ ker i, σ ≤ ker j} W(π,σ); indices 1-based.
pub fn haar_integral(group: QuantumGroup, n: u64, i: &[usize], j: &[usize]) -> Result<Q> {
    if i.len() != j.len() {
        return Err(Error::Dimension(format!("index tuples of lengths {} and {}", i.len(), j.len())));
    }
    if let Some(bad) = i.iter().chain(j).find(|&&x| x == 0 || x as u64 > n) {
        return Err(Error::IndexOutOfRange(format!("{bad} not in 1..{n}")));
    }
    let k = i.len();
    let order = catalog(group.category(), k);
    if order.is_empty() {
        return Ok(Q::default());
    }
    let rows: Vec<usize> = (0..order.len()).filter(|&a| order.items[a].fits(i)).collect();
    let cols: Vec<usize> = (0..order.len()).filter(|&b| order.items[b].fits(j)).collect();
    if rows.is_empty() || cols.is_empty() {
        return Ok(Q::default());
    }
    let w = weingarten(group, k, n)?;
    let mut total = Q::default();
    for &a in &rows {
        for &b in &cols {
            total += w.entry(a, b);
        }
    }
    Ok(total)
}

/// n^{|π|}·W(π,σ) − μ(π,σ) for every pair in D(k) and every n.
#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticTable {
    pub group: QuantumGroup,
    pub k: usize,
    pub n_list: Vec<u64>,
    pub rows: Vec<AsymptoticRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticRow {
    pub pi: SetPartition,
    pub sigma: SetPartition,
    #[serde(serialize_with = "ser_q_vec")]
    pub errors: Vec<Q>,
}

fn ser_q_vec<S: serde::Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

pub fn asymptotic_table(group: QuantumGroup, k: usize, n_list: &[u64]) -> Result<AsymptoticTable> {
    let order = catalog(group.category(), k);
    let ws: Vec<Arc<WeingartenMatrix>> = n_list.iter().map(|&n| weingarten(group, k, n)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (a, pi) in order.items.iter().enumerate() {
        for (b, sigma) in order.items.iter().enumerate() {
            let mu = Q::from_integer(mobius_nc(pi, sigma));
            let errors = ws
                .iter()
                .map(|w| {
                    let scale = Q::from_integer(num_traits::pow(BigInt::from(w.n), pi.block_count()));
                    scale * w.entry(a, b) - &mu
                })
                .collect();
            rows.push(AsymptoticRow { pi: pi.clone(), sigma: sigma.clone(), errors });
        }
    }
    Ok(AsymptoticTable { group, k, n_list: n_list.to_vec(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational_inverse;
    use crate::rational::{frac, q};

    #[test]
    fn gram_examples() {
        let (z, o) = (SetPartition::zero(2), SetPartition::one(2));
        let g = gram(QuantumGroup::SPlus, 2, 7);
        let at = |a: &SetPartition, b: &SetPartition| {
            g.entry(g.order.position(a).unwrap(), g.order.position(b).unwrap())
        };
        assert_eq!(at(&z, &z), BigInt::from(49));
        assert_eq!(at(&z, &o), BigInt::from(7));
        assert_eq!(at(&o, &z), BigInt::from(7));
        assert_eq!(at(&o, &o), BigInt::from(7));
        let g = gram(QuantumGroup::OPlus, 2, 7);
        assert_eq!(g.to_qmatrix(), QMatrix::from_fn(1, 1, |_, _| q(7)));
    }

    #[test]
    fn weingarten_closed_forms() {
        let (z, o) = (SetPartition::zero(2), SetPartition::one(2));
        for n in 2..10i64 {
            let w = weingarten(QuantumGroup::SPlus, 2, n as u64).unwrap();
            let a = frac(1, n * (n - 1));
            assert_eq!(w.get(&z, &z), Some(a.clone()));
            assert_eq!(w.get(&z, &o), Some(-a.clone()));
            assert_eq!(w.get(&o, &z), Some(-a.clone()));
            assert_eq!(w.get(&o, &o), Some(frac(1, n - 1)));
            let w = weingarten(QuantumGroup::OPlus, 2, n as u64).unwrap();
            assert_eq!(w.entry(0, 0), frac(1, n));
        }
    }

    #[test]
    fn weingarten_matches_rational_inverse() {
        for group in QuantumGroup::ALL {
            for k in 1..=5 {
                let g = gram(group, k, 5).to_qmatrix();
                let w = weingarten(group, k, 5).unwrap().to_qmatrix();
                assert_eq!(Some(w), rational_inverse(&g), "{group} k={k}");
            }
        }
    }

    #[test]
    fn singular_gram_reported() {
        // n = 1 collapses every join count, so G is the all-ones matrix
        assert!(matches!(weingarten(QuantumGroup::SPlus, 2, 1), Err(Error::SingularGram { .. })));
        for group in QuantumGroup::ALL {
            for k in 1..=5 {
                for n in 1..4 {
                    let exact = rational_inverse(&gram(group, k, n).to_qmatrix());
                    let modular = weingarten(group, k, n);
                    assert_eq!(exact.is_none(), modular.is_err(), "{group} k={k} n={n}");
                    if let (Some(e), Ok(m)) = (exact, modular) {
                        assert_eq!(e, m.to_qmatrix());
                    }
                }
            }
        }
    }

    #[test]
    fn haar_examples() {
        for n in 4..8u64 {
            assert_eq!(haar_integral(QuantumGroup::SPlus, n, &[1], &[1]).unwrap(), frac(1, n as i64));
            assert_eq!(haar_integral(QuantumGroup::SPlus, n, &[1, 1], &[1, 1]).unwrap(), frac(1, n as i64));
            assert_eq!(haar_integral(QuantumGroup::OPlus, n, &[1], &[1]).unwrap(), q(0));
        }
        assert!(haar_integral(QuantumGroup::SPlus, 4, &[5], &[1]).is_err());
        assert!(haar_integral(QuantumGroup::SPlus, 4, &[1, 2], &[1]).is_err());
    }

    #[test]
    fn asymptotic_example() {
        let t = asymptotic_table(QuantumGroup::SPlus, 2, &[4, 8, 16]).unwrap();
        let row = t.rows.iter().find(|r| r.pi == SetPartition::zero(2) && r.sigma == SetPartition::one(2)).unwrap();
        assert_eq!(row.errors, vec![frac(-1, 3), frac(-1, 7), frac(-1, 15)]);
    }
}
