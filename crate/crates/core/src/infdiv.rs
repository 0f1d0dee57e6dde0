//! Free infinite divisibility as cumulant arithmetic, and its link with
//! uniformly R-cyclic matrices: X = build_uniform_rcyclic(base, n) has
//! κ_{E_B}-cumulants n^{k−1}·κ_base, so base splits into n free copies
//! with cumulants κ_base/n.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::algebra::BElem;
use crate::cumulants::{free_product, moments_from_cumulants, nested_eval, tuples, DistributionSpec, MomentSpec};
use crate::error::{Error, Result};
use crate::matrix_models::{build_uniform_rcyclic, MatrixFamilySpec};
use crate::mobius::mobius_nc;
use crate::partitions::{catalog, PartitionFamily, SetPartition};
use crate::rational::Q;

pub const POSITIVITY_NOTE: &str = "positivity is not checked: truncated cumulants can always be scaled by 1/n, \
so these are the structural identities of the equivalence, not a proof that a realization exists";

/// Every cumulant multiplied by t; t = 1/n gives the formal n-th free
/// convolution root.
pub fn convolution_power(spec: &DistributionSpec, t: &Q) -> DistributionSpec {
    spec.scaled(t)
}

/// Moments of y_r = y^{(1)}_r + ⋯ + y^{(m)}_r for m free copies of `piece`,
/// expanded copy by copy from the moments of the free product.
pub fn free_sum_moments(piece: &DistributionSpec, m: usize) -> Result<MomentSpec> {
    if m == 0 {
        return Err(Error::Dimension("a sum of zero copies".into()));
    }
    let joint = moments_from_cumulants(&free_product(&vec![piece.clone(); m])?);
    let s = piece.generators();
    let mut out = MomentSpec::new(piece.algebra(), s, piece.order()).with_involution(piece.involution().to_vec())?;
    for k in 1..=piece.order() {
        for (word, ins) in out.keys(k).collect::<Vec<_>>() {
            let mut total = piece.algebra().zero();
            for copies in tuples(m, k) {
                let w: Vec<usize> = word.iter().zip(&copies).map(|(r, c)| c * s + r).collect();
                total += &joint.get(&w, &ins)?;
            }
            if !total.is_zero() {
                out.set(&word, &ins, total)?;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub n: usize,
    pub k: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisibilityReport {
    pub note: String,
    pub checks: Vec<IdentityCheck>,
}

impl DivisibilityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// E_B[X_{r_1}b_1 ⋯ X_{r_k}b_k] = (1/n) Σ over closed index paths of
/// E[x_{i_0 i_1}b_1 x_{i_1 i_2} ⋯ x_{i_{k−1} i_0}]·b_k, each entry moment
/// summed over NC(k) from the entry cumulants.
fn trace_moment(fam: &MatrixFamilySpec, word: &[usize], args: &[BElem]) -> Result<BElem> {
    let (n, k) = (fam.n(), word.len());
    let nc = catalog(PartitionFamily::Nc, k);
    let mut total = fam.base().zero();
    for path in tuples(n, k) {
        let gens: Vec<usize> = (0..k).map(|l| fam.gen(word[l], path[l], path[(l + 1) % k])).collect();
        for pi in &nc.items {
            total += &fam.entries().nested(pi, &gens, args)?;
        }
    }
    Ok(total.scale(&Q::new(BigInt::one(), BigInt::from(n))))
}

/// κ^{(k)}_{E_B}[X_{r_1}b_1, …, X_{r_k}b_k] by Möbius inversion of
/// [`trace_moment`].
fn trace_cumulant(fam: &MatrixFamilySpec, word: &[usize], args: &[BElem]) -> Result<BElem> {
    let k = word.len();
    let one = SetPartition::one(k);
    let mut total = fam.base().zero();
    for sigma in &catalog(PartitionFamily::Nc, k).items {
        let mu = mobius_nc(sigma, &one);
        let v = nested_eval(sigma, word, args, |w, b| trace_moment(fam, w, b))?;
        total.add_scaled(&Q::from_integer(mu), &v);
    }
    Ok(total)
}

/// Checks, for X = build_uniform_rcyclic(base, n) and every order k ≤ K:
/// (a) the (1,1) entries x^{(r)}_{11} have the B-valued moments of base;
/// (b) κ_base^{(k)} = n^{1−k}·κ_{E_B}^{(k)}[X_{r_1}b_1, …];
/// (c) n free copies with cumulants κ_base/n sum to base.
pub fn verify_divisibility_equivalence(base: &DistributionSpec, n: usize) -> Result<DivisibilityReport> {
    if n == 0 {
        return Err(Error::Dimension("n must be positive".into()));
    }
    let order = base.order();
    let alg = base.algebra();
    let fam = build_uniform_rcyclic(base, n);
    let base_moments = moments_from_cumulants(base);
    let piece = convolution_power(base, &Q::new(BigInt::one(), BigInt::from(n)));
    let sum_moments = free_sum_moments(&piece, n)?;
    let nc_cache: Vec<_> = (0..=order).map(|k| catalog(PartitionFamily::Nc, k)).collect();
    let mut checks = Vec::new();
    for k in 1..=order {
        let keys: Vec<_> = base.keys(k).collect();
        let mut entry_ok = true;
        let mut scaling_ok = true;
        let mut split_ok = true;
        for (word, ins) in &keys {
            let mut args: Vec<BElem> = ins.iter().map(|&m| alg.unit(m)).collect();
            args.push(alg.one());
            let gens: Vec<usize> = word.iter().map(|&r| fam.gen(r, 0, 0)).collect();
            let mut entry = alg.zero();
            for pi in &nc_cache[k].items {
                entry += &fam.entries().nested(pi, &gens, &args)?;
            }
            let expected = base_moments.get(word, ins)?;
            entry_ok &= entry == expected;
            let scale = Q::new(BigInt::one(), BigInt::from(n).pow(k as u32 - 1));
            scaling_ok &= trace_cumulant(&fam, word, &args)?.scale(&scale) == base.get(word, ins)?;
            split_ok &= sum_moments.get(word, ins)? == expected;
        }
        for (identity, pass) in [("entry-distribution", entry_ok), ("cumulant-scaling", scaling_ok), ("free-decomposition", split_ok)] {
            checks.push(IdentityCheck { identity: identity.into(), n, k, pass });
        }
    }
    Ok(DivisibilityReport { note: POSITIVITY_NOTE.into(), checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulants::{free_poisson, semicircular};
    use crate::matrix_models::Target;
    use crate::rational::{frac, q};

    #[test]
    fn powers() {
        let s = convolution_power(&semicircular(4), &frac(1, 4));
        assert_eq!(s.get(&[0, 0], &[0]).unwrap(), BElem::scalar(1, frac(1, 4)));
        let p = convolution_power(&free_poisson(4), &frac(1, 3));
        for k in 1..=4 {
            assert_eq!(p.get(&vec![0; k], &vec![0; k - 1]).unwrap(), BElem::scalar(1, frac(1, 3)));
        }
        assert_eq!(convolution_power(&p, &q(1)), p);
        // integer powers are sums of free copies
        let sum = free_sum_moments(&free_poisson(4), 3).unwrap();
        assert_eq!(sum, moments_from_cumulants(&convolution_power(&free_poisson(4), &q(3))));
    }

    #[test]
    fn trace_cumulants_agree_with_model() {
        let fam = build_uniform_rcyclic(&free_poisson(3), 2);
        let one = BElem::identity(1);
        for k in 1..=3 {
            let word = vec![0; k];
            let args = vec![one.clone(); k];
            assert_eq!(trace_cumulant(&fam, &word, &args).unwrap(), fam.cumulant(Target::B, &word, &args).unwrap());
        }
    }

    #[test]
    fn divisibility_examples() {
        let r = verify_divisibility_equivalence(&semicircular(4), 2).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.checks.len(), 12);
        assert!(verify_divisibility_equivalence(&free_poisson(3), 3).unwrap().passed());
        let zero = DistributionSpec::new(crate::BaseAlgebra::scalars(), 1, 3);
        assert!(verify_divisibility_equivalence(&zero, 2).unwrap().passed());
    }
}
