//! One PASS/FAIL line per acceptance criterion, each with its time budget.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nc_core::cumulants::{cumulants_from_moments, free_poisson, moments_from_cumulants, semicircular, tuples};
use nc_core::invariance::{invariance_check, MomentArray};
use nc_core::linalg::rank;
use nc_core::matrix_models::symmetric_semicircular;
use nc_core::verify::{catalan, inverse_identity, model_suite, run, Suite, SuiteReport};
use nc_core::weingarten::QuantumGroup;
use nc_core::{enumerate, BElem, PartitionFamily, SetPartition, Q};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::random_spec;

struct Outcome {
    pass: bool,
    detail: String,
}

fn from_report(r: nc_core::Result<SuiteReport>) -> Outcome {
    match r {
        Ok(r) => {
            let failed: Vec<&str> = r.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
            let detail = if failed.is_empty() {
                format!("{} checks", r.checks.len())
            } else {
                format!("failed: {}", failed.join("; "))
            };
            Outcome { pass: failed.is_empty(), detail }
        }
        Err(e) => Outcome { pass: false, detail: e.to_string() },
    }
}

fn join(parts: Vec<Outcome>) -> Outcome {
    let pass = parts.iter().all(|o| o.pass);
    let detail = parts.iter().map(|o| o.detail.as_str()).collect::<Vec<_>>().join(" | ");
    Outcome { pass, detail }
}

/// Crossing test written out from the definition: a < b < c < d with a ~ c,
/// b ~ d and a ≁ b.
fn crosses(labels: &[u8]) -> bool {
    let k = labels.len();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                for d in c + 1..k {
                    if labels[a] == labels[c] && labels[b] == labels[d] && labels[a] != labels[b] {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn combinatorics() -> Outcome {
    let brute = (1..=8).all(|k| {
        let count = enumerate(PartitionFamily::All, k).iter().filter(|p| !crosses(p.rgs())).count();
        catalan(k) == count.into()
    });
    join(vec![
        from_report(run(Suite::Fatfacts, Some(6), None)),
        Outcome { pass: brute, detail: "brute-force NC counts k ≤ 8".into() },
    ])
}

fn weingarten_tables() -> Outcome {
    let mut bad = Vec::new();
    for group in QuantumGroup::ALL {
        for k in 1..=8 {
            if matches!(group, QuantumGroup::OPlus | QuantumGroup::HPlus) && k % 2 == 1 {
                continue;
            }
            for n in 4..=9 {
                if !inverse_identity(group, k, n).unwrap_or(false) {
                    bad.push(format!("{group} k={k} n={n}"));
                }
            }
        }
    }
    join(vec![
        Outcome {
            pass: bad.is_empty(),
            detail: if bad.is_empty() { "W·G = I, 2k ≤ 8, n = 4..9".into() } else { format!("W·G ≠ I: {bad:?}") },
        },
        from_report(run(Suite::WeingartenAsymptotics, Some(6), Some(vec![4, 8, 16]))),
    ])
}

fn cumulant_engine() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut roundtrips = 0;
    for _ in 0..50 {
        let spec = random_spec(&mut rng, 2, 2, 5);
        let moments = moments_from_cumulants(&spec);
        if cumulants_from_moments(&moments) == spec && moments_from_cumulants(&cumulants_from_moments(&moments)) == moments {
            roundtrips += 1;
        }
    }
    let one = BElem::identity(1);
    let sc = moments_from_cumulants(&semicircular(10));
    let fp = moments_from_cumulants(&free_poisson(10));
    let mut catalan_ok = true;
    for k in 1..=10 {
        let word = vec![0; k];
        let ins = vec![0; k - 1];
        let expect_sc = if k % 2 == 0 { catalan(k / 2) } else { 0.into() };
        catalan_ok &= sc.get(&word, &ins).unwrap() == BElem::scalar(1, Q::from_integer(expect_sc));
        let nc = enumerate(PartitionFamily::Nc, k).len();
        catalan_ok &= fp.get(&word, &ins).unwrap() == BElem::scalar(1, Q::from_integer(nc.into()));
        catalan_ok &= fp.eval(&word, &vec![one.clone(); k]).unwrap() == BElem::scalar(1, Q::from_integer(catalan(k)));
    }
    Outcome {
        pass: roundtrips == 50 && catalan_ok,
        detail: format!("{roundtrips}/50 random roundtrips, Catalan moments {catalan_ok}"),
    }
}

fn rcyclic_equivalences() -> Outcome {
    let members = model_suite(2, 4).map(|s| s.len()).unwrap_or(0).min(model_suite(3, 4).map(|s| s.len()).unwrap_or(0));
    join(vec![
        Outcome { pass: members >= 10, detail: format!("{members} families per n") },
        from_report(run(Suite::RcyclicEquivalence, Some(4), Some(vec![2, 3]))),
        from_report(run(Suite::UniformEquivalence, Some(4), Some(vec![2, 3]))),
    ])
}

/// T_π vectors built from the fitting condition directly.
fn counterexample() -> Outcome {
    let n = 4;
    let m = MomentArray::from_family(&symmetric_semicircular(n, 2), 2).unwrap();
    let cert = invariance_check(&m, QuantumGroup::SPlus).unwrap();
    let k2_fails = cert.word(&[0, 0]).is_some_and(|w| w.witness().is_some());
    let tvec = |p: &SetPartition| -> Vec<Q> {
        tuples(n, 4)
            .map(|i| {
                let fits = (0..4).all(|a| (0..4).all(|b| p.label(a) != p.label(b) || i[a] == i[b]));
                Q::from_integer((fits as i64).into())
            })
            .collect()
    };
    let mut vectors: Vec<Vec<Q>> = enumerate(PartitionFamily::Nc, 4).iter().map(tvec).collect();
    let r0 = rank(&vectors);
    vectors.push(tvec(&"{{1,3},{2,4}}".parse().unwrap()));
    let r1 = rank(&vectors);
    join(vec![
        Outcome {
            pass: k2_fails && r1 == r0 + 1,
            detail: format!("k=2 inconsistent {k2_fails}, rank {r0} -> {r1} in dimension {}", vectors[0].len()),
        },
        from_report(run(Suite::SplusCounterexample, None, Some(vec![4]))),
    ])
}

fn main() -> ExitCode {
    type Criterion = (&'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("combinatorics", 30, combinatorics),
        ("mobius", 30, || from_report(run(Suite::Mobius, Some(6), None))),
        ("weingarten", 120, weingarten_tables),
        ("cumulant engine", 60, cumulant_engine),
        ("r-cyclic equivalences", 300, rcyclic_equivalences),
        ("o+ invariance", 120, || from_report(run(Suite::OplusInvariance, Some(3), Some(vec![4, 5])))),
        ("h+ invariance", 180, || from_report(run(Suite::HplusInvariance, Some(3), Some(vec![4])))),
        ("s+ counterexample", 30, counterexample),
        ("limit cumulants", 180, || from_report(run(Suite::LimitConvergence, Some(3), Some(vec![4, 8, 16, 32])))),
        ("divisibility", 120, || from_report(run(Suite::Divisibility, Some(4), Some(vec![2, 3, 4])))),
    ];
    let mut failures = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let pass = outcome.pass && in_time;
        failures += !pass as usize;
        println!(
            "{} {:>2} {name}: {:.2}s (budget {budget}s) {}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            outcome.detail
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
