use nc_core::{BElem, BaseAlgebra, DistributionSpec, Q};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_q(rng: &mut ChaCha8Rng) -> Q {
    Q::new(rng.gen_range(-6i64..=6).into(), rng.gen_range(1i64..=5).into())
}

/// Sparse random cumulants with d ≤ `d_max`, s ≤ `s_max`, order ≤ `k_max`.
pub fn random_spec(rng: &mut ChaCha8Rng, d_max: usize, s_max: usize, k_max: usize) -> DistributionSpec {
    let d = rng.gen_range(1..=d_max);
    let s = rng.gen_range(1..=s_max);
    let order = rng.gen_range(1..=k_max);
    let involution = if s == 2 && rng.gen_bool(0.5) { vec![1, 0] } else { (0..s).collect() };
    let mut spec = DistributionSpec::new(BaseAlgebra::new(d).unwrap(), s, order).with_involution(involution).unwrap();
    for k in 1..=order {
        let keys: Vec<_> = spec.keys(k).collect();
        for (word, ins) in keys {
            if rng.gen_bool(0.4) {
                let rows = (0..d).map(|_| (0..d).map(|_| random_q(rng)).collect()).collect();
                spec.set(&word, &ins, BElem::from_rows(rows).unwrap()).unwrap();
            }
        }
    }
    spec
}
