//! The Möbius function of the noncrossing lattice NC(n).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::partitions::{catalog, PartitionFamily, SetPartition};
use crate::rational::Q;

type Row = Arc<HashMap<SetPartition, BigInt>>;

/// μ(σ, ·) on the up-set of σ in NC(n), computed from the recursion
/// μ(σ,σ) = 1 and μ(σ,π) = −Σ_{σ≤τ<π} μ(σ,τ).
fn row(sigma: &SetPartition) -> Row {
    static CACHE: OnceLock<Mutex<HashMap<SetPartition, Row>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().unwrap().get(sigma) {
        return r.clone();
    }
    let cat = catalog(PartitionFamily::Nc, sigma.size());
    let mut up: Vec<&SetPartition> = cat.items.iter().filter(|t| sigma.leq_unchecked(t)).collect();
    // finer partitions first, so every τ < π is handled before π
    up.sort_by_key(|t| std::cmp::Reverse(t.block_count()));
    let mut values: Vec<BigInt> = Vec::with_capacity(up.len());
    for (j, pi) in up.iter().enumerate() {
        if j == 0 {
            values.push(BigInt::one());
            continue;
        }
        let mut acc = BigInt::zero();
        for (t, v) in up[..j].iter().zip(&values) {
            if t.block_count() > pi.block_count() && t.leq_unchecked(pi) {
                acc += v;
            }
        }
        values.push(-acc);
    }
    let r: Row = Arc::new(up.into_iter().cloned().zip(values).collect());
    cache.lock().unwrap().entry(sigma.clone()).or_insert(r).clone()
}

/// μ(σ, π) on NC(n); zero unless σ ≤ π.
pub fn mobius(sigma: &SetPartition, pi: &SetPartition) -> Result<BigInt> {
    if sigma.size() != pi.size() {
        return Err(Error::SizeMismatch(sigma.size(), pi.size()));
    }
    for x in [sigma, pi] {
        if !x.is_noncrossing() {
            return Err(Error::Crossing(x.to_string()));
        }
    }
    Ok(mobius_nc(sigma, pi))
}

/// [`mobius`] for arguments already known to be noncrossing of equal size.
pub(crate) fn mobius_nc(sigma: &SetPartition, pi: &SetPartition) -> BigInt {
    if !sigma.leq_unchecked(pi) {
        return BigInt::zero();
    }
    row(sigma).get(pi).cloned().unwrap_or_default()
}

/// Checks that `g = ζ·f` and `f = μ·g` on NC(n), both maps given in
/// canonical enumeration order.
pub fn mobius_inversion_check(n: usize, f: &[Q], g: &[Q]) -> bool {
    let cat = catalog(PartitionFamily::Nc, n);
    if f.len() != cat.len() || g.len() != cat.len() {
        return false;
    }
    let zeta_ok = cat.items.iter().zip(g).all(|(pi, gv)| {
        let s: Q = cat.items.iter().zip(f).filter(|(s, _)| s.leq_unchecked(pi)).map(|(_, v)| v).sum();
        &s == gv
    });
    let mobius_ok = cat.items.iter().zip(f).all(|(pi, fv)| {
        let s: Q = cat
            .items
            .iter()
            .zip(g)
            .filter(|(s, _)| s.leq_unchecked(pi))
            .map(|(s, v)| v * Q::from_integer(mobius_nc(s, pi)))
            .sum();
        &s == fv
    });
    zeta_ok && mobius_ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn small_values() {
        let (z2, o2) = (SetPartition::zero(2), SetPartition::one(2));
        assert_eq!(mobius(&z2, &z2).unwrap(), BigInt::one());
        assert_eq!(mobius(&z2, &o2).unwrap(), BigInt::from(-1));
        assert_eq!(mobius(&o2, &z2).unwrap(), BigInt::zero());
        assert_eq!(mobius(&SetPartition::zero(3), &SetPartition::one(3)).unwrap(), BigInt::from(2));
        let crossing: SetPartition = "{{1,3},{2,4}}".parse().unwrap();
        assert!(mobius(&SetPartition::zero(4), &crossing).is_err());
    }

    #[test]
    fn inversion_examples() {
        let n = 4;
        let cat = catalog(PartitionFamily::Nc, n);
        let bottom: Vec<Q> = cat.items.iter().map(|p| q((p == &SetPartition::zero(n)) as i64)).collect();
        assert!(mobius_inversion_check(n, &bottom, &vec![q(1); cat.len()]));
        let zero = SetPartition::zero(n);
        let f: Vec<Q> = cat.items.iter().map(|p| Q::from_integer(mobius_nc(&zero, p))).collect();
        assert!(mobius_inversion_check(n, &f, &bottom));
        assert!(!mobius_inversion_check(n, &bottom, &f));
        let mut g = vec![q(1); cat.len()];
        g[0] = q(2);
        assert!(!mobius_inversion_check(n, &bottom, &g));
    }
}
