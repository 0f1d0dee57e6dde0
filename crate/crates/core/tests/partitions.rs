use nc_core::mobius::{mobius, mobius_inversion_check};
use nc_core::partitions::catalog;
use nc_core::transforms::{
    fatten, hat, inverse_fatten, kreweras, kreweras_inverse, nch_decompose, shift_left, shift_right, wreath,
};
use nc_core::{enumerate, PartitionFamily, SetPartition, Q};
use proptest::prelude::*;

fn nc(max_k: usize) -> impl Strategy<Value = SetPartition> {
    (1..=max_k, any::<prop::sample::Index>()).prop_map(|(k, i)| {
        let all = enumerate(PartitionFamily::Nc, k);
        all[i.index(all.len())].clone()
    })
}

fn any_partition(max_k: usize) -> impl Strategy<Value = SetPartition> {
    prop::collection::vec(0u8..6, 1..=max_k).prop_map(|labels| SetPartition::kernel(&labels))
}

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn join_and_meet_bound(pair in (1usize..=7).prop_flat_map(|k| {
        let labels = prop::collection::vec(0u8..5, k);
        (labels.clone(), labels)
    })) {
        let (a, b) = (SetPartition::kernel(&pair.0), SetPartition::kernel(&pair.1));
        let j = a.join(&b).unwrap();
        let m = a.meet(&b).unwrap();
        prop_assert!(a.is_leq(&j).unwrap() && b.is_leq(&j).unwrap());
        prop_assert!(m.is_leq(&a).unwrap() && m.is_leq(&b).unwrap());
        prop_assert_eq!(a.join(&m).unwrap(), a.clone());
        prop_assert_eq!(a.meet(&j).unwrap(), a);
    }

    #[test]
    fn fits_is_kernel_order(a in any_partition(7), labels in prop::collection::vec(0usize..4, 7)) {
        let labels = &labels[..a.size()];
        prop_assert_eq!(a.fits(labels), a.is_leq(&SetPartition::kernel(labels)).unwrap());
    }

    #[test]
    fn text_roundtrip(a in any_partition(9)) {
        prop_assert_eq!(a.to_string().parse::<SetPartition>().unwrap(), a);
    }

    #[test]
    fn fatten_inverts(p in nc(9)) {
        let f = fatten(&p).unwrap();
        prop_assert!(PartitionFamily::Nc2.contains(&f));
        prop_assert_eq!(inverse_fatten(&f).unwrap(), p.clone());
        prop_assert_eq!(hat(&p), f.join(&hat(&SetPartition::zero(p.size()))).unwrap());
    }

    #[test]
    fn kreweras_facts(p in nc(9)) {
        let k = kreweras(&p).unwrap();
        prop_assert!(k.is_noncrossing());
        prop_assert_eq!(p.block_count() + k.block_count(), p.size() + 1);
        prop_assert_eq!(kreweras_inverse(&k).unwrap(), p.clone());
        prop_assert!(wreath(&p, &k).unwrap().is_noncrossing());
        prop_assert_eq!(fatten(&k).unwrap(), shift_left(&fatten(&p).unwrap()));
    }

    #[test]
    fn shifts_are_inverse(p in any_partition(9)) {
        prop_assert_eq!(shift_left(&shift_right(&p)), p.clone());
        prop_assert_eq!(shift_right(&shift_left(&p)), p);
    }

    #[test]
    fn random_inversion_pairs(n in 1usize..=5, seed in prop::collection::vec(-9i64..=9, 42)) {
        let cat = catalog(PartitionFamily::Nc, n);
        let f: Vec<Q> = (0..cat.len()).map(|i| q(seed[i % seed.len()])).collect();
        let g: Vec<Q> = cat
            .items
            .iter()
            .map(|p| cat.items.iter().zip(&f).filter(|(s, _)| s.is_leq(p).unwrap()).map(|(_, v)| v.clone()).sum())
            .collect();
        prop_assert!(mobius_inversion_check(n, &f, &g));
    }
}

/// The largest σ with π ≀ σ noncrossing, by search over NC(k).
#[test]
fn kreweras_is_the_maximum() {
    for k in 1..=6 {
        let all = enumerate(PartitionFamily::Nc, k);
        for p in &all {
            let ok: Vec<&SetPartition> = all.iter().filter(|s| wreath(p, s).unwrap().is_noncrossing()).collect();
            let k_p = kreweras(p).unwrap();
            assert!(ok.contains(&&k_p));
            assert!(ok.iter().all(|s| s.is_leq(&k_p).unwrap()), "{p}");
        }
    }
}

#[test]
fn nch_roundtrip() {
    for k in 1..=5 {
        for tau in enumerate(PartitionFamily::Nch, 2 * k) {
            let (a, b) = nch_decompose(&tau).unwrap();
            assert!(a.is_leq(&b).unwrap());
            assert_eq!(fatten(&a).unwrap().join(&fatten(&b).unwrap()).unwrap(), tau);
        }
    }
    for s in enumerate(PartitionFamily::Nc, 4) {
        let f = fatten(&s).unwrap();
        assert_eq!(nch_decompose(&f).unwrap(), (s.clone(), s));
    }
}

#[test]
fn family_filters() {
    for k in 0..=8 {
        let all = enumerate(PartitionFamily::All, k);
        for fam in [PartitionFamily::Nc, PartitionFamily::Nc2, PartitionFamily::Nch, PartitionFamily::Ncb] {
            let filtered: Vec<SetPartition> = all.iter().filter(|p| fam.contains(p)).cloned().collect();
            assert_eq!(enumerate(fam, k), filtered, "{} k={k}", fam.name());
        }
    }
}

#[test]
fn mobius_hat_invariance() {
    // π ↦ π̂ is a lattice embedding of NC(k) into NC(2k)
    for k in 1..=5 {
        let all = enumerate(PartitionFamily::Nc, k);
        for s in &all {
            for p in &all {
                assert_eq!(mobius(s, p).unwrap(), mobius(&hat(s), &hat(p)).unwrap(), "{s} {p}");
            }
        }
    }
}
