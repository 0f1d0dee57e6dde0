//! Fattening, hats, shifts, wreath products and the Kreweras complement.

use crate::error::{Error, Result};
use crate::partitions::{PartitionFamily, SetPartition};

fn require_nc(pi: &SetPartition) -> Result<()> {
    if pi.is_noncrossing() {
        Ok(())
    } else {
        Err(Error::Crossing(pi.to_string()))
    }
}

/// The noncrossing pairing π̃ of `2k` points attached to `pi ∈ NC(k)`.
pub fn fatten(pi: &SetPartition) -> Result<SetPartition> {
    require_nc(pi)?;
    let k = pi.size();
    let mut labels = vec![0usize; 2 * k];
    let mut next = 0;
    let mut pair = |labels: &mut Vec<usize>, a: usize, b: usize| {
        labels[a - 1] = next;
        labels[b - 1] = next;
        next += 1;
    };
    for block in pi.blocks() {
        let s = block.len();
        pair(&mut labels, 2 * block[0] - 1, 2 * block[s - 1]);
        for w in block.windows(2) {
            pair(&mut labels, 2 * w[0], 2 * w[1] - 1);
        }
    }
    Ok(SetPartition::kernel(&labels))
}

/// π̂: the pairs (2i−1, 2i) grouped according to `pi`.
pub fn hat(pi: &SetPartition) -> SetPartition {
    let labels: Vec<usize> = (0..2 * pi.size()).map(|p| pi.label(p / 2)).collect();
    SetPartition::kernel(&labels)
}

/// Inverse of [`fatten`]: the τ with σ ∨ 0̂ = τ̂.
pub fn inverse_fatten(sigma: &SetPartition) -> Result<SetPartition> {
    if sigma.size() % 2 != 0 || !PartitionFamily::Nc2.contains(sigma) {
        return Err(Error::NotPairing(sigma.to_string()));
    }
    let k = sigma.size() / 2;
    let joined = sigma.join_unchecked(&hat(&SetPartition::zero(k)));
    Ok(joined.restrict0((0..k).map(|i| 2 * i)))
}

/// s ∼ t in the result iff s+1 ∼ t+1 in `pi`, positions taken mod k.
pub fn shift_left(pi: &SetPartition) -> SetPartition {
    let k = pi.size();
    let labels: Vec<usize> = (0..k).map(|s| pi.label((s + 1) % k)).collect();
    SetPartition::kernel(&labels)
}

/// Inverse of [`shift_left`].
pub fn shift_right(pi: &SetPartition) -> SetPartition {
    let k = pi.size();
    let labels: Vec<usize> = (0..k).map(|s| pi.label((s + k - 1) % k)).collect();
    SetPartition::kernel(&labels)
}

/// π ≀ σ: odd positions partitioned by `pi`, even positions by `sigma`.
pub fn wreath(pi: &SetPartition, sigma: &SetPartition) -> Result<SetPartition> {
    if pi.size() != sigma.size() {
        return Err(Error::SizeMismatch(pi.size(), sigma.size()));
    }
    let labels: Vec<(bool, usize)> = (0..2 * pi.size())
        .map(|p| if p % 2 == 0 { (false, pi.label(p / 2)) } else { (true, sigma.label(p / 2)) })
        .collect();
    Ok(SetPartition::kernel(&labels))
}

/// Successor of each point inside its block, blocks read as increasing cycles.
fn cycle_successor(pi: &SetPartition) -> Vec<usize> {
    let mut next = vec![0; pi.size()];
    for block in pi.blocks0() {
        for (j, &x) in block.iter().enumerate() {
            next[x] = block[(j + 1) % block.len()];
        }
    }
    next
}

fn inverse_perm(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

fn orbits(p: &[usize]) -> SetPartition {
    let mut labels = vec![usize::MAX; p.len()];
    for start in 0..p.len() {
        if labels[start] != usize::MAX {
            continue;
        }
        let mut x = start;
        while labels[x] == usize::MAX {
            labels[x] = start;
            x = p[x];
        }
    }
    SetPartition::kernel(&labels)
}

/// Kreweras complement: the largest σ ∈ NC(k) with π ≀ σ noncrossing,
/// computed as the cycles of π⁻¹γ for the long cycle γ = (1 2 … k).
pub fn kreweras(pi: &SetPartition) -> Result<SetPartition> {
    require_nc(pi)?;
    let k = pi.size();
    let inv = inverse_perm(&cycle_successor(pi));
    let perm: Vec<usize> = (0..k).map(|i| inv[(i + 1) % k]).collect();
    Ok(orbits(&perm))
}

/// Inverse of [`kreweras`]: the cycles of γσ⁻¹.
pub fn kreweras_inverse(sigma: &SetPartition) -> Result<SetPartition> {
    require_nc(sigma)?;
    let k = sigma.size();
    let inv = inverse_perm(&cycle_successor(sigma));
    let perm: Vec<usize> = (0..k).map(|i| (inv[i] + 1) % k).collect();
    Ok(orbits(&perm))
}

/// Splits τ ∈ NC_h(2k) as τ = π̃₁ ∨ π̃₂ with π₁ ≤ π₂, reading
/// K(τ) = π₁ ≀ K(π₂) off the odd and even positions.
pub fn nch_decompose(tau: &SetPartition) -> Result<(SetPartition, SetPartition)> {
    if tau.size() % 2 != 0 || !PartitionFamily::Nch.contains(tau) {
        return Err(Error::NotEvenBlocks(tau.to_string()));
    }
    let k = tau.size() / 2;
    let kt = kreweras(tau)?;
    let pi1 = kt.restrict0((0..k).map(|i| 2 * i));
    let k_pi2 = kt.restrict0((0..k).map(|i| 2 * i + 1));
    let pi2 = kreweras_inverse(&k_pi2)?;
    Ok((pi1, pi2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> SetPartition {
        s.parse().unwrap()
    }

    #[test]
    fn fatten_examples() {
        assert_eq!(fatten(&p("{{1,4,5},{2,3},{6}}")).unwrap(), p("{{1,10},{2,7},{3,6},{4,5},{8,9},{11,12}}"));
        assert_eq!(fatten(&SetPartition::zero(3)).unwrap(), p("{{1,2},{3,4},{5,6}}"));
        assert_eq!(fatten(&SetPartition::one(2)).unwrap(), p("{{1,4},{2,3}}"));
        assert!(fatten(&p("{{1,3},{2,4}}")).is_err());
    }

    #[test]
    fn inverse_fatten_examples() {
        let x = p("{{1,4,5},{2,3},{6}}");
        assert_eq!(inverse_fatten(&fatten(&x).unwrap()).unwrap(), x);
        assert_eq!(inverse_fatten(&p("{{1,2},{3,4},{5,6}}")).unwrap(), SetPartition::zero(3));
        assert_eq!(inverse_fatten(&p("{{1,4},{2,3}}")).unwrap(), SetPartition::one(2));
        assert!(inverse_fatten(&p("{{1,3},{2,4}}")).is_err());
        assert!(inverse_fatten(&p("{{1,2,3,4}}")).is_err());
    }

    #[test]
    fn hat_examples() {
        assert_eq!(hat(&SetPartition::one(3)), SetPartition::one(6));
        assert_eq!(hat(&SetPartition::zero(2)), p("{{1,2},{3,4}}"));
        assert_eq!(hat(&p("{{1,4,5},{2,3},{6}}")), p("{{1,2,7,8,9,10},{3,4,5,6},{11,12}}"));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift_left(&SetPartition::one(4)), SetPartition::one(4));
        // new position s carries the label of old position s+1
        assert_eq!(shift_left(&p("{{1,2},{3}}")), p("{{1,3},{2}}"));
        assert_eq!(shift_right(&p("{{1,3},{2}}")), p("{{1,2},{3}}"));
    }

    #[test]
    fn wreath_examples() {
        assert_eq!(wreath(&SetPartition::zero(3), &SetPartition::zero(3)).unwrap(), SetPartition::zero(6));
        assert_eq!(wreath(&SetPartition::one(2), &SetPartition::zero(2)).unwrap(), p("{{1,3},{2},{4}}"));
        assert!(wreath(&SetPartition::one(2), &SetPartition::one(3)).is_err());
    }

    #[test]
    fn kreweras_examples() {
        assert_eq!(kreweras(&p("{{1,5},{2,3,4},{6,8},{7}}")).unwrap(), p("{{1,4},{2},{3},{5,8},{6,7}}"));
        assert_eq!(kreweras(&SetPartition::zero(5)).unwrap(), SetPartition::one(5));
        assert_eq!(kreweras(&SetPartition::one(5)).unwrap(), SetPartition::zero(5));
        let x = p("{{1,5},{2,3,4},{6,8},{7}}");
        assert_eq!(kreweras_inverse(&kreweras(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn nch_examples() {
        assert_eq!(
            nch_decompose(&SetPartition::one(4)).unwrap(),
            (SetPartition::zero(2), SetPartition::one(2))
        );
        let s = p("{{1,3},{2}}");
        assert_eq!(nch_decompose(&fatten(&s).unwrap()).unwrap(), (s.clone(), s));
        assert!(nch_decompose(&p("{{1,2,3},{4}}")).is_err());
    }
}
