//! Self-contained verification suites behind `nc verify`. Every suite is a
//! deterministic list of named checks; the default parameters reproduce the
//! bounds of the acceptance tests.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::algebra::{BaseAlgebra, BElem};
use crate::cumulants::{free_poisson, free_product, scalar_distribution, semicircular, tuples, DistributionSpec};
use crate::error::{Error, Result};
use crate::infdiv::verify_divisibility_equivalence;
use crate::invariance::{
    detseries_perm_invariance_check, hplus_invariance_of_rcyclic, invariance_check, limit_cumulant_estimate,
    representative, splus_counterexample, tvector, MomentArray,
};
use crate::linalg::rank;
use crate::matrix_models::{
    add_constant_diagonal, bimodule_combination, build_rcyclic, build_uniform_rcyclic, constant_matrix,
    cyclic_entry_word, freeness_from_mnb_over_b, freeness_from_mnb_over_d, is_rcyclic, is_uniformly_rcyclic,
    symmetric_semicircular, MatrixFamilySpec, Target,
};
use crate::mobius::mobius_nc;
use crate::partitions::{enumerate, PartitionFamily, SetPartition};
use crate::rational::{abs_q, frac, q, Q};
use crate::transforms::{fatten, hat, inverse_fatten, kreweras, shift_left, wreath};
use crate::weingarten::{asymptotic_table, gram, haar_integral, weingarten, QuantumGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Fatfacts,
    Mobius,
    WeingartenAsymptotics,
    RcyclicEquivalence,
    UniformEquivalence,
    OplusInvariance,
    HplusInvariance,
    SplusCounterexample,
    LimitConvergence,
    Divisibility,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Fatfacts,
        Suite::Mobius,
        Suite::WeingartenAsymptotics,
        Suite::RcyclicEquivalence,
        Suite::UniformEquivalence,
        Suite::OplusInvariance,
        Suite::HplusInvariance,
        Suite::SplusCounterexample,
        Suite::LimitConvergence,
        Suite::Divisibility,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Fatfacts => "fatfacts",
            Suite::Mobius => "mobius",
            Suite::WeingartenAsymptotics => "weingarten-asymptotics",
            Suite::RcyclicEquivalence => "rcyclic-equivalence",
            Suite::UniformEquivalence => "uniform-equivalence",
            Suite::OplusInvariance => "oplus-invariance",
            Suite::HplusInvariance => "hplus-invariance",
            Suite::SplusCounterexample => "splus-counterexample",
            Suite::LimitConvergence => "limit-convergence",
            Suite::Divisibility => "divisibility",
        }
    }

    /// Default `k` and `n` list.
    pub fn defaults(self) -> (usize, Vec<u64>) {
        match self {
            Suite::Fatfacts | Suite::Mobius => (6, vec![]),
            Suite::WeingartenAsymptotics => (6, vec![4, 8, 16]),
            Suite::RcyclicEquivalence | Suite::UniformEquivalence => (4, vec![2, 3]),
            Suite::OplusInvariance => (3, vec![4, 5]),
            Suite::HplusInvariance => (3, vec![4]),
            Suite::SplusCounterexample => (2, vec![4]),
            Suite::LimitConvergence => (3, vec![4, 8, 16, 32]),
            Suite::Divisibility => (4, vec![2, 3, 4]),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub k: usize,
    pub n: Vec<u64>,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Runs `suite` with the given overrides of [`Suite::defaults`].
pub fn run(suite: Suite, k: Option<usize>, n: Option<Vec<u64>>) -> Result<SuiteReport> {
    let (k0, n0) = suite.defaults();
    let k = k.unwrap_or(k0);
    let mut n = n.unwrap_or(n0);
    n.sort_unstable();
    n.dedup();
    let checks = match suite {
        Suite::Fatfacts => fatfacts(k)?,
        Suite::Mobius => mobius_checks(k),
        Suite::WeingartenAsymptotics => weingarten_checks(k, &n)?,
        Suite::RcyclicEquivalence => rcyclic_checks(k, &n)?,
        Suite::UniformEquivalence => uniform_checks(k, &n)?,
        Suite::OplusInvariance => oplus_checks(k, &n)?,
        Suite::HplusInvariance => hplus_checks(k, &n)?,
        Suite::SplusCounterexample => counterexample_checks(&n)?,
        Suite::LimitConvergence => limit_checks(k, &n)?,
        Suite::Divisibility => divisibility_checks(k, &n)?,
    };
    Ok(SuiteReport { suite, k, n, checks })
}

pub fn catalan(k: usize) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * (2 * (2 * i + 1)) / (i + 2);
    }
    c
}

fn all<T>(items: impl IntoIterator<Item = T>, mut f: impl FnMut(T) -> Result<bool>) -> Result<bool> {
    for x in items {
        if !f(x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Pairs σ ≤ π in NC(k).
fn intervals(k: usize) -> Vec<(SetPartition, SetPartition)> {
    let nc = enumerate(PartitionFamily::Nc, k);
    let mut out = Vec::new();
    for s in &nc {
        for p in &nc {
            if s.leq_unchecked(p) {
                out.push((s.clone(), p.clone()));
            }
        }
    }
    out
}

/// Counts for k + 4 points, the fattening bijection for k + 1, the
/// Kreweras/shift and hat identities for k, and the join identity for k − 1.
fn fatfacts(k: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for m in 1..=k + 4 {
        let count = enumerate(PartitionFamily::Nc, m).len();
        checks.push(Check::new(format!("nc-count k={m}"), BigInt::from(count) == catalan(m), count.to_string()));
    }
    for m in 1..=k + 1 {
        let nc = enumerate(PartitionFamily::Nc, m);
        let pairings = enumerate(PartitionFamily::Nc2, 2 * m);
        let mut image: Vec<SetPartition> = nc.iter().map(fatten).collect::<Result<_>>()?;
        let inverse = all(nc.iter().zip(&image), |(p, f)| Ok(&inverse_fatten(f)? == p))?;
        image.sort();
        let mut target = pairings.clone();
        target.sort();
        let onto = all(&pairings, |s| Ok(&fatten(&inverse_fatten(s)?)? == s))?;
        checks.push(Check::new(
            format!("fatten-bijection k={m}"),
            image == target && inverse && onto,
            format!("{} partitions, {} pairings", nc.len(), pairings.len()),
        ));
    }
    for m in 1..=k {
        let nc = enumerate(PartitionFamily::Nc, m);
        let zero_hat = hat(&SetPartition::zero(m));
        let shift = all(&nc, |p| Ok(fatten(&kreweras(p)?)? == shift_left(&fatten(p)?)))?;
        checks.push(Check::new(format!("kreweras-shift k={m}"), shift, format!("{} partitions", nc.len())));
        let hats = all(&nc, |p| Ok(hat(p) == fatten(p)?.join(&zero_hat)?))?;
        checks.push(Check::new(format!("hat-join k={m}"), hats, format!("{} partitions", nc.len())));
    }
    for m in 1..k {
        let pairs = intervals(m);
        let ok = all(&pairs, |(s, p)| {
            let tau = fatten(s)?.join(&fatten(p)?)?;
            Ok(PartitionFamily::Nch.contains(&tau) && kreweras(&tau)? == wreath(s, &kreweras(p)?)?)
        })?;
        checks.push(Check::new(format!("fattened-join-kreweras k={m}"), ok, format!("{} intervals", pairs.len())));
    }
    Ok(checks)
}

/// Both δ-relations for n ≤ k, μ(0_n, 1_n) for n ≤ k + 2, and the order
/// criterion and product formula on NC_h(2m) for m ≤ k − 2.
fn mobius_checks(k: usize) -> Vec<Check> {
    let mut checks = Vec::new();
    for n in 1..=k {
        let nc = enumerate(PartitionFamily::Nc, n);
        let (mut left, mut right) = (true, true);
        for s in &nc {
            for p in &nc {
                let delta = BigInt::from((s == p) as i32);
                let mid = nc.iter().filter(|t| s.leq_unchecked(t) && t.leq_unchecked(p));
                let (mut a, mut b) = (BigInt::zero(), BigInt::zero());
                for t in mid {
                    a += mobius_nc(s, t);
                    b += mobius_nc(t, p);
                }
                if s.leq_unchecked(p) {
                    left &= a == delta;
                    right &= b == delta;
                }
            }
        }
        checks.push(Check::new(format!("delta-relations n={n}"), left && right, format!("{} partitions", nc.len())));
    }
    for n in 1..=k + 2 {
        let mu = mobius_nc(&SetPartition::zero(n), &SetPartition::one(n));
        let sign = if n % 2 == 1 { BigInt::one() } else { -BigInt::one() };
        let expect = sign * catalan(n - 1);
        checks.push(Check::new(format!("mu-bottom-top n={n}"), mu == expect, mu.to_string()));
    }
    for m in 1..=k.saturating_sub(2) {
        let pairs = intervals(m);
        let joined: Vec<SetPartition> =
            pairs.iter().map(|(a, b)| fatten(a).unwrap().join_unchecked(&fatten(b).unwrap())).collect();
        let (mut order, mut product) = (true, true);
        for ((s1, s2), tau) in pairs.iter().zip(&joined) {
            for ((p1, p2), pi) in pairs.iter().zip(&joined) {
                let leq = pi.leq_unchecked(tau);
                let chain = s1.leq_unchecked(p1) && p2.leq_unchecked(s2);
                order &= leq == chain;
                if leq {
                    product &= mobius_nc(pi, tau) == mobius_nc(s1, p1) * mobius_nc(p2, s2);
                }
            }
        }
        checks.push(Check::new(format!("nch-order m={m}"), order, format!("{} intervals", pairs.len())));
        checks.push(Check::new(format!("nch-mobius-product m={m}"), product, format!("{} intervals", pairs.len())));
    }
    checks
}

/// W·G = I, exactly: a full integer product for dimension ≤ 400, otherwise
/// G·(W·v) = v for four pseudo-random integer vectors v (seeded, so the check
/// is reproducible).
pub fn inverse_identity(group: QuantumGroup, k: usize, n: u64) -> Result<bool> {
    let w = weingarten(group, k, n)?;
    let g = gram(group, k, n);
    let dim = w.dim();
    let s = w.scaled();
    let g_int: Vec<BigInt> = (0..dim * dim).map(|x| g.entry(x / dim, x % dim)).collect();
    if dim <= 400 {
        // G·num = diag(den)
        for j in 0..dim {
            for i in 0..dim {
                let mut acc = BigInt::zero();
                for l in 0..dim {
                    acc += &g_int[i * dim + l] * &s.num[l * dim + j];
                }
                let expect = if i == j { s.den[j].clone() } else { BigInt::zero() };
                if acc != expect {
                    return Ok(false);
                }
            }
        }
        return Ok(true);
    }
    let lcm = s.den.iter().fold(BigInt::one(), |a, d| a.lcm(d));
    let factors: Vec<BigInt> = s.den.iter().map(|d| &lcm / d).collect();
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x6e63 ^ (n << 8) ^ k as u64);
    for _ in 0..4 {
        let v: Vec<BigInt> = (0..dim).map(|_| BigInt::from(rng.gen_range(-1000i64..=1000))).collect();
        let u: Vec<BigInt> = v.iter().zip(&factors).map(|(a, b)| a * b).collect();
        // y = lcm · W·v
        let y: Vec<BigInt> = (0..dim)
            .map(|i| (0..dim).fold(BigInt::zero(), |acc, j| acc + &s.num[i * dim + j] * &u[j]))
            .collect();
        for i in 0..dim {
            let gy = (0..dim).fold(BigInt::zero(), |acc, j| acc + &g_int[i * dim + j] * &y[j]);
            if gy != &lcm * &v[i] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn point_counts(group: QuantumGroup, k: usize) -> impl Iterator<Item = usize> {
    let odd = matches!(group, QuantumGroup::SPlus | QuantumGroup::BPlus);
    (1..=k).filter(move |m| odd || m % 2 == 0)
}

fn weingarten_checks(k: usize, ns: &[u64]) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for group in QuantumGroup::ALL {
        for m in point_counts(group, k) {
            let ok = all(ns, |&n| inverse_identity(group, m, n))?;
            checks.push(Check::new(format!("inverse {group} points={m}"), ok, format!("n in {ns:?}")));
        }
    }
    if ns.len() >= 2 {
        for group in QuantumGroup::ALL {
            for m in point_counts(group, k) {
                let table = asymptotic_table(group, m, ns)?;
                let mut ok = true;
                let mut c_max = Q::zero();
                for row in &table.rows {
                    let abs: Vec<Q> = row.errors.iter().map(abs_q).collect();
                    if abs.iter().all(Zero::is_zero) {
                        continue;
                    }
                    ok &= abs.windows(2).all(|w| w[1] < w[0]);
                    for (e, &n) in abs.iter().zip(ns).rev().take(2) {
                        c_max = c_max.max(e * q(n as i64));
                    }
                }
                checks.push(Check::new(
                    format!("asymptotics {group} points={m}"),
                    ok,
                    format!("C = {c_max} over n in {ns:?}"),
                ));
            }
        }
    }
    let mut orth = true;
    let mut rows = true;
    for n in 4..=7u64 {
        for i in 1..=n as usize {
            for j in 1..=n as usize {
                let mut acc = Q::zero();
                for m in 1..=n as usize {
                    acc += haar_integral(QuantumGroup::OPlus, n, &[i, j], &[m, m])?;
                }
                orth &= acc == q((i == j) as i64);
            }
            let mut acc = Q::zero();
            for j in 1..=n as usize {
                acc += haar_integral(QuantumGroup::SPlus, n, &[i], &[j])?;
            }
            rows &= acc == q(1);
        }
    }
    checks.push(Check::new("o+ orthogonality", orth, "n = 4..7"));
    checks.push(Check::new("s+ row sums", rows, "n = 4..7"));
    Ok(checks)
}

/// A named test family with the properties it was built to have.
pub struct SuiteFamily {
    pub name: String,
    pub fam: MatrixFamilySpec,
    pub rcyclic: bool,
    pub uniform: bool,
}

fn perturbed(fam: &MatrixFamilySpec, word: &[usize], value: Q) -> MatrixFamilySpec {
    let mut entries = fam.entries().clone();
    let ins = vec![0; word.len() - 1];
    entries.set(word, &ins, BElem::scalar(1, value)).expect("in range");
    MatrixFamilySpec::new(fam.n(), entries).expect("same shape")
}

/// Families of n×n matrices known, by construction, to be R-cyclic or not
/// and uniformly so or not. Scalar base except for one M_2-valued member at
/// n = 2.
pub fn model_suite(n: usize, order: usize) -> Result<Vec<SuiteFamily>> {
    let mut out = Vec::new();
    let mut add = |name: &str, fam: MatrixFamilySpec, rcyclic: bool, uniform: bool| {
        out.push(SuiteFamily { name: format!("{name} n={n}"), fam, rcyclic, uniform });
    };
    let sc = build_uniform_rcyclic(&semicircular(order), n);
    add("uniform semicircular", sc.clone(), true, true);
    add("uniform free Poisson", build_uniform_rcyclic(&free_poisson(order), n), true, true);
    let pair = free_product(&[semicircular(order), free_poisson(order)])?;
    add("uniform free pair", build_uniform_rcyclic(&pair, n), true, true);
    add("uniform skewed", build_uniform_rcyclic(&scalar_distribution(&[frac(1, 2), q(2), frac(-1, 3), q(1)]).truncated(order), n), true, true);
    let iid = free_product(&vec![semicircular(order); n])?;
    add("free diagonal", build_rcyclic(&iid, n, &[0])?, true, false);
    let mut theta = DistributionSpec::new(BaseAlgebra::scalars(), n, order);
    for i in 0..n {
        for j in 0..n {
            theta.set(&[i, j], &[0], BElem::scalar(1, q((i * n + j + 1) as i64)))?;
        }
    }
    add("index-dependent variance", build_rcyclic(&theta, n, &[0])?, true, false);
    let ones = vec![BElem::identity(1); n];
    add("plus identity", add_constant_diagonal(&sc, &ones)?, true, true);
    let ramp: Vec<BElem> = (0..n).map(|i| BElem::scalar(1, q(i as i64 + 1))).collect();
    add("plus diagonal ramp", add_constant_diagonal(&sc, &ramp)?, true, false);
    let combo = bimodule_combination(&sc, &[(BElem::scalar(1, q(2)), 0, BElem::scalar(1, frac(1, 3)))])?;
    add("bimodule combination", combo, true, true);
    add("symmetric semicircular", symmetric_semicircular(n, order), false, false);
    add("constant matrix", constant_matrix(n, order), false, false);
    let (x00, x01, x10) = (sc.gen(0, 0, 0), sc.gen(0, 0, 1), sc.gen(0, 1, 0));
    add("off-cycle covariance", perturbed(&perturbed(&sc, &[x00, x01], frac(1, 2)), &[x10, x00], frac(1, 2)), false, false);
    add("one heavier entry", perturbed(&sc, &[x00, x00], q(2)), true, false);
    if n == 2 {
        // κ₂[X b X] = diag(b) over M_2
        let alg = BaseAlgebra::new(2)?;
        let mut base = DistributionSpec::new(alg, 1, order);
        for a in 0..2 {
            base.set(&[0, 0], &[a * 2 + a], BElem::unit(2, a, a))?;
        }
        add("uniform M2-valued", build_uniform_rcyclic(&base, n), true, true);
    }
    Ok(out)
}

fn suites(ns: &[u64], order: usize) -> Result<Vec<SuiteFamily>> {
    let mut out = Vec::new();
    for &n in ns {
        out.extend(model_suite(n as usize, order)?);
    }
    Ok(out)
}

/// κ_{E_D}[X_{r_1}b_1V_{i_1i_1}, …, X_{r_k}b_k] against
/// Σ_{i_k} κ[x_{i_k i_1}b_1, …, x_{i_{k−1}i_k}b_k]·V_{i_k i_k} on basis b.
fn cyclic_cumulant_identity(fam: &MatrixFamilySpec, k: usize) -> Result<bool> {
    let (n, alg, base) = (fam.n(), fam.matrix_algebra(), fam.base());
    for rword in tuples(fam.s(), k) {
        for idx in tuples(n, k - 1) {
            for ins in tuples(base.basis_len(), k) {
                let bs: Vec<BElem> = ins.iter().map(|&m| base.unit(m)).collect();
                let mut args: Vec<BElem> = (0..k - 1).map(|l| alg.unit(idx[l], idx[l], &bs[l])).collect();
                args.push(alg.scalar(&bs[k - 1]));
                let lhs = fam.cumulant(Target::D, &rword, &args)?;
                let mut rhs = alg.zero();
                for last in 0..n {
                    let mut full = idx.clone();
                    full.push(last);
                    let c = fam.entries().eval(&cyclic_entry_word(n, &rword, &full), &bs)?;
                    rhs += &alg.unit(last, last, &c);
                }
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// κ_{E_D}[X_{r_1}b_1V_{i_1i_1}, …, X_{r_k}b_k] = n^{1−k}κ_{E_B}[X_{r_1}b_1, …, X_{r_k}b_k].
fn cumulant_factorization(fam: &MatrixFamilySpec, k: usize) -> Result<bool> {
    let (n, alg, base) = (fam.n(), fam.matrix_algebra(), fam.base());
    let scale = Q::new(BigInt::one(), BigInt::from(n).pow(k as u32 - 1));
    for rword in tuples(fam.s(), k) {
        for ins in tuples(base.basis_len(), k) {
            let bs: Vec<BElem> = ins.iter().map(|&m| base.unit(m)).collect();
            let eb = alg.scalar(&fam.cumulant(Target::B, &rword, &bs)?.scale(&scale));
            for idx in tuples(n, k - 1) {
                let mut args: Vec<BElem> = (0..k - 1).map(|l| alg.unit(idx[l], idx[l], &bs[l])).collect();
                args.push(alg.scalar(&bs[k - 1]));
                if fam.cumulant(Target::D, &rword, &args)? != eb {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn rcyclic_checks(order: usize, ns: &[u64]) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for member in suites(ns, order)? {
        let structural = is_rcyclic(&member.fam);
        let free = freeness_from_mnb_over_d(&member.fam)?;
        checks.push(Check::new(
            format!("rcyclic-vs-freeness-over-D {}", member.name),
            structural == member.rcyclic && free == member.rcyclic,
            format!("rcyclic={structural} free={free} expected={}", member.rcyclic),
        ));
        if member.rcyclic {
            let ok = all(1..=member.fam.order(), |k| cyclic_cumulant_identity(&member.fam, k))?;
            checks.push(Check::new(format!("cyclic-cumulants {}", member.name), ok, ""));
        }
    }
    Ok(checks)
}

fn uniform_checks(order: usize, ns: &[u64]) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut nonuniform_failures = 0;
    for member in suites(ns, order)? {
        let structural = is_uniformly_rcyclic(&member.fam);
        let free = freeness_from_mnb_over_b(&member.fam)?;
        checks.push(Check::new(
            format!("uniform-vs-freeness-over-B {}", member.name),
            structural == member.uniform && free == member.uniform,
            format!("uniform={structural} free={free} expected={}", member.uniform),
        ));
        if member.rcyclic {
            let holds = all(1..=member.fam.order(), |k| cumulant_factorization(&member.fam, k))?;
            if member.uniform {
                checks.push(Check::new(format!("cumulant-factorization {}", member.name), holds, ""));
            } else if !holds {
                nonuniform_failures += 1;
            }
        }
    }
    checks.push(Check::new(
        "cumulant-factorization fails off uniformity",
        nonuniform_failures > 0,
        format!("{nonuniform_failures} non-uniform members violate it"),
    ));
    Ok(checks)
}

fn oplus_checks(k: usize, ns: &[u64]) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &n in ns {
        for member in model_suite(n as usize, k)?.into_iter().filter(|m| m.uniform && m.fam.base().d == 1) {
            let fam = &member.fam;
            let m = MomentArray::from_family(fam, k)?;
            let cert = invariance_check(&m, QuantumGroup::OPlus)?;
            let ones = vec![BElem::identity(1); k];
            let mut matches = true;
            for w in &cert.words {
                let Some(coeffs) = w.coefficients() else { continue };
                let gens: Vec<usize> = w.word.iter().map(|&r| fam.gen(r, 0, 0)).collect();
                for c in coeffs {
                    let pi = inverse_fatten(&c.partition)?;
                    matches &= c.value == fam.entries().nested(&pi, &gens, &ones[..gens.len()])?.tr();
                }
            }
            checks.push(Check::new(
                format!("o+ invariance {}", member.name),
                cert.consistent && matches,
                format!("consistent={} coefficients-match={matches}", cert.consistent),
            ));
        }
    }
    Ok(checks)
}

fn hplus_checks(k: usize, ns: &[u64]) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &n in ns {
        let n = n as usize;
        let mut members: Vec<(String, MatrixFamilySpec, bool)> = vec![
            ("uniform semicircular".into(), build_uniform_rcyclic(&semicircular(k), n), true),
            ("uniform free Poisson".into(), build_uniform_rcyclic(&free_poisson(k), n), true),
            ("free diagonal".into(), build_rcyclic(&free_product(&vec![free_poisson(k); n])?, n, &[0])?, true),
            ("symmetric semicircular".into(), symmetric_semicircular(n, k), false),
        ];
        // generic index-dependent cyclic variances
        let mut theta = DistributionSpec::new(BaseAlgebra::scalars(), n, k);
        for i in 0..n {
            for j in 0..n {
                theta.set(&[i, j], &[0], BElem::scalar(1, q((i * n + j + 1) as i64)))?;
            }
        }
        let generic = build_rcyclic(&theta, n, &[0])?;
        let det = detseries_perm_invariance_check(&generic)?;
        checks.push(Check::new(
            format!("generic series not permutation invariant n={n}"),
            !det.invariant && det.witness.is_some(),
            format!("invariant={}", det.invariant),
        ));
        members.push(("index-dependent variance".into(), generic, false));
        for (name, fam, expected) in members {
            let h = hplus_invariance_of_rcyclic(&fam);
            let mut pass = h == expected;
            let mut detail = format!("criterion={h} expected={expected}");
            if h {
                let cert = invariance_check(&MomentArray::from_family(&fam, k)?, QuantumGroup::HPlus)?;
                pass &= cert.consistent;
                detail.push_str(&format!(" h+ consistent={}", cert.consistent));
            }
            checks.push(Check::new(format!("h+ {name} n={n}"), pass, detail));
        }
    }
    Ok(checks)
}

fn counterexample_checks(ns: &[u64]) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &n in ns {
        let n = n as usize;
        let r = splus_counterexample(n)?;
        checks.push(Check::new(
            format!("s+ inconsistent at k=2 n={n}"),
            r.inconsistent && r.moments_match,
            format!("witness={:?}", r.witness.unwrap_or_default()),
        ));
        // the rank, recomputed from the T vectors
        let as_q = |v: Vec<u32>| -> Vec<Q> { v.into_iter().map(|x| q(x as i64)).collect() };
        let mut vectors: Vec<Vec<Q>> = enumerate(PartitionFamily::Nc, 4).iter().map(|p| as_q(tvector(p, n))).collect();
        let r0 = rank(&vectors);
        vectors.push(as_q(tvector(&"{{1,3},{2,4}}".parse()?, n)));
        let r1 = rank(&vectors);
        checks.push(Check::new(
            format!("crossing outside NC span n={n}"),
            r1 == r0 + 1 && r0 == r.rank_nc && r1 == r.rank_with_crossing,
            format!("dimension {}, rank {r0} -> {r1}", n.pow(4)),
        ));
    }
    Ok(checks)
}

/// Error of the finite-n estimate against the exact κ^{(τ)} for uniform
/// models, per order; C is fitted at the smallest n.
fn limit_checks(k: usize, ns: &[u64]) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let Some(&n0) = ns.first() else { return Ok(checks) };
    for (name, base) in [("semicircular", semicircular(k)), ("free Poisson", free_poisson(k))] {
        for m in 1..=k {
            // kernel data from a model large enough to realize every class
            let fam = build_uniform_rcyclic(&base.truncated(m), 2 * m);
            let data = MomentArray::from_family_by_kernel(&fam, m)?;
            let ones = vec![BElem::identity(1); m];
            let mut ok = true;
            let mut worst = vec![Q::zero(); ns.len()];
            for tau in enumerate(PartitionFamily::Nc, m) {
                for rho in enumerate(PartitionFamily::All, 2 * m) {
                    let j = representative(&rho);
                    let gens: Vec<usize> = (0..m).map(|l| fam.gen(0, j[2 * l], j[2 * l + 1])).collect();
                    let exact = fam.entries().nested(&tau, &gens, &ones)?.tr();
                    let est = limit_cumulant_estimate(&data, &vec![0; m], &tau, &j, QuantumGroup::OPlus, ns)?;
                    let errs: Vec<Q> = est.iter().map(|(_, v)| abs_q(&(v - &exact))).collect();
                    let c = &errs[0] * q(n0 as i64);
                    for ((e, &n), w) in errs.iter().zip(ns).zip(worst.iter_mut()) {
                        ok &= e * q(n as i64) <= c;
                        if *e > *w {
                            *w = e.clone();
                        }
                    }
                }
            }
            let seq: Vec<String> = worst.iter().map(|x| x.to_string()).collect();
            checks.push(Check::new(format!("limit {name} k={m}"), ok, format!("max errors {}", seq.join(", "))));
        }
    }
    Ok(checks)
}

fn divisibility_checks(order: usize, ns: &[u64]) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (name, base) in [("semicircular", semicircular(order)), ("free Poisson", free_poisson(order))] {
        for &n in ns {
            let report = verify_divisibility_equivalence(&base, n as usize)?;
            for c in report.checks {
                checks.push(Check::new(format!("{} {name} n={n} k={}", c.identity, c.k), c.pass, ""));
            }
        }
    }
    Ok(checks)
}
