//! Matrix families X_1..X_s ∈ M_n(A) given by the joint distribution of
//! their entries: R-cyclicity, the conditional expectations onto M_n(B),
//! D and B, and freeness from M_n(B) decided on alternating words.
//!
//! Entry x^{(r)}_{ij} is generator (r·n + i)·n + j of the entry
//! distribution, indices 0-based. Elements of M_n(B) are stored as
//! elements of M_{nd}(Q) whose (i,j) block of size d is the B-entry.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{BElem, BaseAlgebra};
use crate::cumulants::{cumulants_from_moments, moments_from_cumulants, nested_eval, tuples, DistributionSpec, MomentSpec};
use crate::error::{Error, Result};
use crate::mobius::mobius_nc;
use crate::partitions::{catalog, PartitionFamily, SetPartition};
use crate::rational::Q;

/// M_n(B) realised inside M_{nd}(Q).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatrixAlgebra {
    pub n: usize,
    pub d: usize,
}

impl MatrixAlgebra {
    pub fn size(self) -> usize {
        self.n * self.d
    }

    pub fn zero(self) -> BElem {
        BElem::zero(self.size())
    }

    pub fn identity(self) -> BElem {
        BElem::identity(self.size())
    }

    /// b·V_ij
    pub fn unit(self, i: usize, j: usize, b: &BElem) -> BElem {
        let mut x = self.zero();
        for a in 0..self.d {
            for c in 0..self.d {
                x.set(i * self.d + a, j * self.d + c, b.get(a, c).clone());
            }
        }
        x
    }

    /// b ⊗ 1_n, the copy of B on the diagonal.
    pub fn scalar(self, b: &BElem) -> BElem {
        let mut x = self.zero();
        for i in 0..self.n {
            x.add_scaled(&Q::one(), &self.unit(i, i, b));
        }
        x
    }

    pub fn block(self, x: &BElem, i: usize, j: usize) -> BElem {
        let mut b = BElem::zero(self.d);
        for a in 0..self.d {
            for c in 0..self.d {
                b.set(a, c, x.get(i * self.d + a, j * self.d + c).clone());
            }
        }
        b
    }

    /// Nonzero blocks grouped by block row.
    fn rows(self, x: &BElem) -> Vec<Vec<(usize, BElem)>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| (j, self.block(x, i, j))).filter(|(_, b)| !b.is_zero()).collect())
            .collect()
    }

    /// E_D on M_n(B): the block diagonal.
    pub fn diagonal(self, x: &BElem) -> BElem {
        let mut y = self.zero();
        for i in 0..self.n {
            y.add_scaled(&Q::one(), &self.unit(i, i, &self.block(x, i, i)));
        }
        y
    }

    /// E_B on M_n(B): n⁻¹ Σ_i x_ii.
    pub fn trace(self, x: &BElem) -> BElem {
        let mut b = BElem::zero(self.d);
        for i in 0..self.n {
            b += &self.block(x, i, i);
        }
        b.scale(&Q::new(1.into(), (self.n as i64).into()))
    }
}

/// M_0 X_{r_1} M_1 ⋯ X_{r_k} M_k with coefficients in M_n(B).
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixWord {
    pub letters: Vec<usize>,
    pub coefs: Vec<BElem>,
}

impl MatrixWord {
    pub fn constant(c: BElem) -> Self {
        MatrixWord { letters: vec![], coefs: vec![c] }
    }

    pub fn letter(alg: MatrixAlgebra, r: usize) -> Self {
        MatrixWord { letters: vec![r], coefs: vec![alg.identity(), alg.identity()] }
    }

    /// X_{r_1} c_1 X_{r_2} ⋯ c_{k−1} X_{r_k}
    pub fn alternating(alg: MatrixAlgebra, letters: &[usize], between: &[BElem]) -> Self {
        let mut coefs = vec![alg.identity()];
        coefs.extend(between.iter().cloned());
        coefs.push(alg.identity());
        MatrixWord { letters: letters.to_vec(), coefs }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn then(&self, other: &MatrixWord) -> MatrixWord {
        let mut coefs = self.coefs.clone();
        let last = coefs.pop().unwrap();
        coefs.push(&last * &other.coefs[0]);
        coefs.extend(other.coefs[1..].iter().cloned());
        let mut letters = self.letters.clone();
        letters.extend(&other.letters);
        MatrixWord { letters, coefs }
    }

    pub fn scaled(&self, c: &Q) -> MatrixWord {
        let mut w = self.clone();
        w.coefs[0] = w.coefs[0].scale(c);
        w
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    /// E_{M_n(B)}, entrywise E
    MnB,
    /// E_D, the diagonal of E_{M_n(B)}
    D,
    /// E_B = E∘tr
    B,
}

/// A family X_1..X_s ∈ M_n(A) given by the cumulants of its entries.
#[derive(Clone)]
pub struct MatrixFamilySpec {
    n: usize,
    s: usize,
    entries: DistributionSpec,
    moments: OnceLock<Arc<MomentSpec>>,
}

impl PartialEq for MatrixFamilySpec {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.entries == other.entries
    }
}

impl fmt::Debug for MatrixFamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixFamilySpec").field("n", &self.n).field("s", &self.s).field("entries", &self.entries).finish()
    }
}

/// Generator involution (i,j,r) ↦ (j,i,σ(r)).
pub fn entry_involution(n: usize, sigma: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; n * n * sigma.len()];
    for (r, &t) in sigma.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                inv[(r * n + i) * n + j] = (t * n + j) * n + i;
            }
        }
    }
    inv
}

impl MatrixFamilySpec {
    pub fn new(n: usize, entries: DistributionSpec) -> Result<Self> {
        let g = entries.generators();
        if n == 0 || g % (n * n) != 0 {
            return Err(Error::Dimension(format!("{g} entry generators do not form n×n matrices for n={n}")));
        }
        let s = g / (n * n);
        let fam = MatrixFamilySpec { n, s, entries, moments: OnceLock::new() };
        let sigma = fam.sigma();
        if entry_involution(n, &sigma) != fam.entries.involution() {
            return Err(Error::Dimension("entry involution must send x^(r)_ij to x^(σ(r))_ji".into()));
        }
        Ok(fam)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn order(&self) -> usize {
        self.entries.order()
    }

    pub fn base(&self) -> BaseAlgebra {
        self.entries.algebra()
    }

    pub fn matrix_algebra(&self) -> MatrixAlgebra {
        MatrixAlgebra { n: self.n, d: self.base().d }
    }

    pub fn entries(&self) -> &DistributionSpec {
        &self.entries
    }

    /// The adjoint map on family indices, X_r* = X_{σ(r)}.
    pub fn sigma(&self) -> Vec<usize> {
        (0..self.s).map(|r| self.entries.involution()[self.gen(r, 0, 0)] / (self.n * self.n)).collect()
    }

    pub fn gen(&self, r: usize, i: usize, j: usize) -> usize {
        (r * self.n + i) * self.n + j
    }

    /// (r, i, j) of an entry generator.
    pub fn split(&self, g: usize) -> (usize, usize, usize) {
        (g / (self.n * self.n), g / self.n % self.n, g % self.n)
    }

    /// Joint moments of the entries, computed once.
    pub fn moments(&self) -> Arc<MomentSpec> {
        self.moments.get_or_init(|| Arc::new(moments_from_cumulants(&self.entries))).clone()
    }

    pub fn truncated(&self, order: usize) -> Self {
        MatrixFamilySpec { n: self.n, s: self.s, entries: self.entries.truncated(order), moments: OnceLock::new() }
    }

    /// Whether entry word (r_l, p_l, q_l) follows the cyclic pattern q_l = p_{l+1}.
    pub fn is_cyclic_word(&self, word: &[usize]) -> bool {
        let k = word.len();
        (0..k).all(|l| self.split(word[l]).2 == self.split(word[(l + 1) % k]).1)
    }

    /// E_{M_n(B)}, E_D or E_B of a word.
    pub fn expectation(&self, target: Target, w: &MatrixWord) -> Result<BElem> {
        let full = self.expect_mnb(w)?;
        let alg = self.matrix_algebra();
        Ok(match target {
            Target::MnB => full,
            Target::D => alg.diagonal(&full),
            Target::B => alg.trace(&full),
        })
    }

    fn expect_mnb(&self, w: &MatrixWord) -> Result<BElem> {
        let alg = self.matrix_algebra();
        let k = w.len();
        if w.coefs.len() != k + 1 || w.coefs.iter().any(|c| c.d() != alg.size()) {
            return Err(Error::Dimension("matrix word coefficients must be n·d square, one more than letters".into()));
        }
        if let Some(&r) = w.letters.iter().find(|&&r| r >= self.s) {
            return Err(Error::IndexOutOfRange(format!("family index {r} of {}", self.s)));
        }
        if k > self.order() {
            return Err(Error::TruncationExceeded { requested: k, order: self.order() });
        }
        if k == 0 {
            return Ok(w.coefs[0].clone());
        }
        let rows: Vec<_> = w.coefs.iter().map(|c| alg.rows(c)).collect();
        let moments = self.moments();
        let mut walk = Walk {
            fam: self,
            moments: &moments,
            letters: &w.letters,
            rows: &rows,
            gens: vec![0; k],
            ins: vec![self.base().zero(); k],
            out: vec![vec![self.base().zero(); self.n]; self.n],
        };
        for i in 0..self.n {
            for (a, left) in &rows[0][i] {
                walk.step(0, *a, i, left)?;
            }
        }
        let mut x = alg.zero();
        for (i, row) in walk.out.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                if !b.is_zero() {
                    x.add_scaled(&Q::one(), &alg.unit(i, j, b));
                }
            }
        }
        Ok(x)
    }

    /// κ^{(k)}_{E_D}[X_{r_1}c_1, …, X_{r_k}c_k] for c_l ∈ M_n(B), by Möbius
    /// inversion of the nested E_D-moments; `Target::B` gives κ_{E_B} with
    /// c_l ∈ B.
    pub fn cumulant(&self, base: Target, word: &[usize], args: &[BElem]) -> Result<BElem> {
        let alg = self.matrix_algebra();
        let k = word.len();
        if k == 0 || args.len() != k {
            return Err(Error::Dimension("cumulants need one insertion per letter".into()));
        }
        let rho = |w: &[usize], ins: &[BElem]| -> Result<BElem> {
            match base {
                Target::B => {
                    let lifted: Vec<BElem> = ins[..ins.len() - 1].iter().map(|b| alg.scalar(b)).collect();
                    let e = self.expectation(Target::B, &MatrixWord::alternating(alg, w, &lifted))?;
                    Ok(&e * &ins[ins.len() - 1])
                }
                _ => {
                    let e = self.expectation(base, &MatrixWord::alternating(alg, w, &ins[..ins.len() - 1]))?;
                    Ok(&e * &ins[ins.len() - 1])
                }
            }
        };
        let one = SetPartition::one(k);
        let mut acc: Option<BElem> = None;
        for sigma in &catalog(PartitionFamily::Nc, k).items {
            let mu = mobius_nc(sigma, &one);
            let term = nested_eval(sigma, word, args, rho)?.scale(&Q::from_integer(mu));
            match acc.as_mut() {
                Some(a) => *a += &term,
                None => acc = Some(term),
            }
        }
        Ok(acc.unwrap())
    }
}

/// Depth-first expansion of E_{M_n(B)} over index paths.
struct Walk<'a> {
    fam: &'a MatrixFamilySpec,
    moments: &'a MomentSpec,
    letters: &'a [usize],
    rows: &'a [Vec<Vec<(usize, BElem)>>],
    gens: Vec<usize>,
    ins: Vec<BElem>,
    out: Vec<Vec<BElem>>,
}

impl Walk<'_> {
    fn step(&mut self, l: usize, a: usize, row: usize, left: &BElem) -> Result<()> {
        let k = self.letters.len();
        for c in 0..self.fam.n {
            self.gens[l] = self.fam.gen(self.letters[l], a, c);
            for (next, b) in &self.rows[l + 1][c] {
                self.ins[l] = b.clone();
                if l + 1 == k {
                    let e = self.moments.eval(&self.gens, &self.ins)?;
                    if !e.is_zero() {
                        self.out[row][*next] += &(left * &e);
                    }
                } else {
                    self.step(l + 1, *next, row, left)?;
                }
            }
        }
        Ok(())
    }
}

/// Entry cumulants copied from `base` onto every cyclic index pattern and
/// zero elsewhere.
pub fn build_uniform_rcyclic(base: &DistributionSpec, n: usize) -> MatrixFamilySpec {
    let s = base.generators();
    let mut entries = DistributionSpec::new(base.algebra(), n * n * s, base.order())
        .with_involution(entry_involution(n, base.involution()))
        .expect("transposed involution");
    for (word, ins, v) in base.entries() {
        for idx in tuples(n, word.len()) {
            let w = cyclic_entry_word(n, word, &idx);
            entries.set(&w, ins, v.clone()).expect("in range");
        }
    }
    MatrixFamilySpec::new(n, entries).expect("consistent shape")
}

/// Entry generators x^{(r_1)}_{i_k i_1}, x^{(r_2)}_{i_1 i_2}, …
pub(crate) fn cyclic_entry_word(n: usize, rword: &[usize], idx: &[usize]) -> Vec<usize> {
    let k = rword.len();
    (0..k).map(|l| (rword[l] * n + idx[(l + k - 1) % k]) * n + idx[l]).collect()
}

/// The family whose cyclic cumulants are read from the determining series
/// `theta`, a distribution on generators t^{(r)}_i = r·n + i:
/// κ[x^{(r_1)}_{i_k i_1}b_1, …] = θ(t^{(r_1)}_{i_1}b_1 ⋯ t^{(r_k)}_{i_k}b_k).
pub fn build_rcyclic(theta: &DistributionSpec, n: usize, sigma: &[usize]) -> Result<MatrixFamilySpec> {
    let g = theta.generators();
    if n == 0 || g % n != 0 || g / n != sigma.len() {
        return Err(Error::Dimension(format!("{g} series variables do not match n={n}, s={}", sigma.len())));
    }
    let mut entries = DistributionSpec::new(theta.algebra(), n * g, theta.order());
    entries = entries.with_involution(entry_involution(n, sigma))?;
    for (word, ins, v) in theta.entries() {
        let rword: Vec<usize> = word.iter().map(|t| t / n).collect();
        let idx: Vec<usize> = word.iter().map(|t| t % n).collect();
        entries.set(&cyclic_entry_word(n, &rword, &idx), ins, v.clone())?;
    }
    MatrixFamilySpec::new(n, entries)
}

/// θ_X, the cyclic entry cumulants arranged as a series in t^{(r)}_i.
pub fn determining_series(fam: &MatrixFamilySpec) -> DistributionSpec {
    let n = fam.n;
    let mut theta = DistributionSpec::new(fam.base(), n * fam.s, fam.order());
    for (word, ins, v) in fam.entries.entries() {
        if fam.is_cyclic_word(word) {
            let t: Vec<usize> = word.iter().map(|&g| fam.split(g).0 * n + fam.split(g).2).collect();
            theta.set(&t, ins, v.clone()).expect("in range");
        }
    }
    theta
}

/// Every nonzero entry cumulant sits on a cyclic index pattern.
pub fn is_rcyclic(fam: &MatrixFamilySpec) -> bool {
    fam.entries.entries().iter().all(|(w, _, _)| fam.is_cyclic_word(w))
}

/// R-cyclic, with cyclic cumulants independent of the index word.
pub fn is_uniformly_rcyclic(fam: &MatrixFamilySpec) -> bool {
    if !is_rcyclic(fam) {
        return false;
    }
    let basis = fam.base().basis_len();
    for k in 1..=fam.order() {
        for rword in tuples(fam.s, k) {
            for ins in tuples(basis, k - 1) {
                let reference = fam.entries.get(&cyclic_entry_word(fam.n, &rword, &vec![0; k]), &ins).unwrap();
                for idx in tuples(fam.n, k) {
                    if fam.entries.get(&cyclic_entry_word(fam.n, &rword, &idx), &ins).unwrap() != reference {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// One summand c_0·x_{g_1}c_1 ⋯ x_{g_t}c_t of a polynomial in entry generators.
#[derive(Clone, Debug)]
pub struct Monomial {
    pub left: BElem,
    pub letters: Vec<(usize, BElem)>,
}

/// Family with entries given as polynomials in the entries of `fam`:
/// `polys[g]` is new entry generator g. The new distribution is exact up to
/// the order `fam.order() / max degree`.
pub fn derive_family(fam: &MatrixFamilySpec, polys: &[Vec<Monomial>], sigma: &[usize]) -> Result<MatrixFamilySpec> {
    let n = fam.n;
    if polys.len() != n * n * sigma.len() {
        return Err(Error::Dimension(format!("{} polynomials for {} new generators", polys.len(), n * n * sigma.len())));
    }
    let degree = polys.iter().flatten().map(|m| m.letters.len()).max().unwrap_or(0).max(1);
    let order = fam.order() / degree;
    let alg = fam.base();
    let old = fam.moments();
    let mut moments = MomentSpec::new(alg, polys.len(), order).with_involution(entry_involution(n, sigma))?;
    let mut keys = Vec::new();
    for len in 1..=order {
        keys.extend(moments.keys(len));
    }
    for (word, ins) in keys {
        let mut total = alg.zero();
        let choices: Vec<&Vec<Monomial>> = word.iter().map(|&g| &polys[g]).collect();
        if choices.iter().any(|c| c.is_empty()) {
            continue;
        }
        let sizes: Vec<usize> = choices.iter().map(|c| c.len()).collect();
        let mut counter = vec![0usize; word.len()];
        'combos: loop {
            let mut left = alg.one();
            let mut gens: Vec<usize> = Vec::new();
            let mut args: Vec<BElem> = Vec::new();
            for (l, c) in counter.iter().enumerate() {
                let mono = &choices[l][*c];
                multiply_tail(&mut left, &mut args, &mono.left);
                for (g, coef) in &mono.letters {
                    gens.push(*g);
                    args.push(coef.clone());
                }
                if l + 1 < word.len() {
                    multiply_tail(&mut left, &mut args, &alg.unit(ins[l]));
                }
            }
            let value = if gens.is_empty() { left } else { &left * &old.eval(&gens, &args)? };
            total += &value;
            for l in (0..counter.len()).rev() {
                counter[l] += 1;
                if counter[l] < sizes[l] {
                    continue 'combos;
                }
                counter[l] = 0;
            }
            break;
        }
        moments.set(&word, &ins, total)?;
    }
    MatrixFamilySpec::new(n, cumulants_from_moments(&moments))
}

fn multiply_tail(left: &mut BElem, args: &mut [BElem], c: &BElem) {
    match args.last_mut() {
        Some(last) => *last = &*last * c,
        None => *left = &*left * c,
    }
}

/// The family (X_{r_1}X_{r_2}) over the given pairs, valid to half the order.
pub fn product_family(fam: &MatrixFamilySpec, pairs: &[(usize, usize)]) -> Result<MatrixFamilySpec> {
    let n = fam.n;
    if let Some(&(a, b)) = pairs.iter().find(|(a, b)| *a >= fam.s || *b >= fam.s) {
        return Err(Error::IndexOutOfRange(format!("pair ({a},{b}) for s={}", fam.s)));
    }
    let one = fam.base().one();
    let mut polys = Vec::with_capacity(n * n * pairs.len());
    for &(a, b) in pairs {
        for i in 0..n {
            for j in 0..n {
                polys.push(
                    (0..n)
                        .map(|l| Monomial {
                            left: one.clone(),
                            letters: vec![(fam.gen(a, i, l), one.clone()), (fam.gen(b, l, j), one.clone())],
                        })
                        .collect(),
                );
            }
        }
    }
    // (X_a X_b)* = X_{σ(b)} X_{σ(a)}; without the adjoint pair present the
    // products are marked self-adjoint
    let sigma_old = fam.sigma();
    let sigma: Vec<usize> = pairs
        .iter()
        .enumerate()
        .map(|(p, &(a, b))| pairs.iter().position(|&x| x == (sigma_old[b], sigma_old[a])).unwrap_or(p))
        .collect();
    let sigma = if is_involution(&sigma) { sigma } else { (0..pairs.len()).collect() };
    derive_family(fam, &polys, &sigma)
}

fn is_involution(sigma: &[usize]) -> bool {
    sigma.iter().enumerate().all(|(r, &t)| t < sigma.len() && sigma[t] == r)
}

fn identity_polys(fam: &MatrixFamilySpec) -> Vec<Vec<Monomial>> {
    let one = fam.base().one();
    (0..fam.n * fam.n * fam.s).map(|g| vec![Monomial { left: one.clone(), letters: vec![(g, one.clone())] }]).collect()
}

/// X_1..X_s together with the constant diagonal matrix diag(b_1..b_n).
pub fn add_constant_diagonal(fam: &MatrixFamilySpec, diag: &[BElem]) -> Result<MatrixFamilySpec> {
    if diag.len() != fam.n {
        return Err(Error::Dimension(format!("{} diagonal entries for n={}", diag.len(), fam.n)));
    }
    let mut polys = identity_polys(fam);
    for i in 0..fam.n {
        for j in 0..fam.n {
            polys.push(if i == j { vec![Monomial { left: diag[i].clone(), letters: vec![] }] } else { vec![] });
        }
    }
    let mut sigma = fam.sigma();
    sigma.push(fam.s);
    derive_family(fam, &polys, &sigma)
}

/// X_1..X_s together with Σ_t c_t X_{r_t} c'_t for terms (c_t, r_t, c'_t), c ∈ B.
pub fn bimodule_combination(fam: &MatrixFamilySpec, terms: &[(BElem, usize, BElem)]) -> Result<MatrixFamilySpec> {
    if let Some((_, r, _)) = terms.iter().find(|(_, r, _)| *r >= fam.s) {
        return Err(Error::IndexOutOfRange(format!("family index {r} of {}", fam.s)));
    }
    let mut polys = identity_polys(fam);
    for i in 0..fam.n {
        for j in 0..fam.n {
            polys.push(
                terms
                    .iter()
                    .map(|(c, r, c2)| Monomial { left: c.clone(), letters: vec![(fam.gen(*r, i, j), c2.clone())] })
                    .collect(),
            );
        }
    }
    let mut sigma = fam.sigma();
    sigma.push(fam.s);
    derive_family(fam, &polys, &sigma)
}

/// Which subalgebra the freeness from M_n(B) is amalgamated over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Amalgamation {
    D,
    B,
}

/// An alternating product of centered letters with nonzero expectation.
#[derive(Clone, Debug)]
pub struct Violation {
    pub word: String,
    pub value: BElem,
}

struct Letter {
    label: String,
    terms: Vec<MatrixWord>,
    len: usize,
}

fn unit_label(alg: MatrixAlgebra, m: usize, i: usize, j: usize) -> String {
    format!("e{}{}V{}{}", m / alg.d + 1, m % alg.d + 1, i + 1, j + 1)
}

/// Centered family words X_{r_1} c X_{r_2} ⋯ with interior c from the
/// amalgamated algebra, up to `max_len` letters.
fn family_letters(fam: &MatrixFamilySpec, over: Amalgamation, max_len: usize) -> Result<Vec<Letter>> {
    let alg = fam.matrix_algebra();
    let base = fam.base();
    let middles: Vec<(String, BElem)> = match over {
        Amalgamation::D => (0..base.basis_len())
            .flat_map(|m| (0..alg.n).map(move |i| (m, i)))
            .map(|(m, i)| (unit_label(alg, m, i, i), alg.unit(i, i, &base.unit(m))))
            .collect(),
        Amalgamation::B => (0..base.basis_len())
            .map(|m| (format!("e{}{}", m / alg.d + 1, m % alg.d + 1), alg.scalar(&base.unit(m))))
            .collect(),
    };
    let target = match over {
        Amalgamation::D => Target::D,
        Amalgamation::B => Target::B,
    };
    let mut out = Vec::new();
    for len in 1..=max_len {
        for rword in tuples(fam.s, len) {
            for mids in tuples(middles.len(), len - 1) {
                let between: Vec<BElem> = mids.iter().map(|&m| middles[m].1.clone()).collect();
                let w = MatrixWord::alternating(alg, &rword, &between);
                let mut label = String::new();
                for (l, r) in rword.iter().enumerate() {
                    if l > 0 {
                        label.push_str(&middles[mids[l - 1]].0);
                    }
                    label.push_str(&format!("X{}", r + 1));
                }
                let e = fam.expectation(target, &w)?;
                let e = if over == Amalgamation::B { alg.scalar(&e) } else { e };
                let mut terms = vec![w];
                if !e.is_zero() {
                    terms.push(MatrixWord::constant(-&e));
                }
                out.push(Letter { label: format!("({label} − E)"), terms, len });
            }
        }
    }
    Ok(out)
}

/// A spanning set of the centered part of M_n(B).
fn constant_letters(fam: &MatrixFamilySpec, over: Amalgamation) -> Vec<(String, BElem)> {
    let alg = fam.matrix_algebra();
    let base = fam.base();
    let mut out = Vec::new();
    for m in 0..base.basis_len() {
        let b = base.unit(m);
        for i in 0..alg.n {
            for j in 0..alg.n {
                if i != j {
                    out.push((unit_label(alg, m, i, j), alg.unit(i, j, &b)));
                }
            }
        }
        if over == Amalgamation::B {
            let last = alg.n - 1;
            for i in 0..last {
                let x = &alg.unit(i, i, &b) - &alg.unit(last, last, &b);
                out.push((format!("({}−{})", unit_label(alg, m, i, i), unit_label(alg, m, last, last)), x));
            }
        }
    }
    out
}

/// Searches alternating products c_0 Y_1 c_1 Y_2 ⋯ Y_k c_k of centered
/// letters, with family length ≤ the truncation order, for one whose
/// expectation onto the amalgamated algebra is nonzero. The end letters
/// c_0, c_k may also be 1.
pub fn alternating_violation(fam: &MatrixFamilySpec, over: Amalgamation) -> Result<Option<Violation>> {
    let alg = fam.matrix_algebra();
    let order = fam.order();
    let letters = family_letters(fam, over, order)?;
    let consts = constant_letters(fam, over);
    let mut ends = vec![("1".to_string(), alg.identity())];
    ends.extend(consts.iter().cloned());
    let search = Search { fam, over, letters: &letters, consts: &consts, ends: &ends, order };
    for y in &letters {
        if let Some(v) = search.extend(&y.terms, y.label.clone(), y.len)? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

struct Search<'a> {
    fam: &'a MatrixFamilySpec,
    over: Amalgamation,
    letters: &'a [Letter],
    consts: &'a [(String, BElem)],
    ends: &'a [(String, BElem)],
    order: usize,
}

impl Search<'_> {
    fn extend(&self, terms: &[MatrixWord], label: String, len: usize) -> Result<Option<Violation>> {
        let alg = self.fam.matrix_algebra();
        let mut m = alg.zero();
        for t in terms {
            m += &self.fam.expectation(Target::MnB, t)?;
        }
        if !m.is_zero() {
            for (l0, c0) in self.ends {
                let left = c0 * &m;
                for (l1, c1) in self.ends {
                    let x = &left * c1;
                    let value = match self.over {
                        Amalgamation::D => alg.diagonal(&x),
                        Amalgamation::B => alg.trace(&x),
                    };
                    if !value.is_zero() {
                        return Ok(Some(Violation { word: format!("{l0}·{label}·{l1}"), value }));
                    }
                }
            }
        }
        for (lc, c) in self.consts {
            for y in self.letters.iter().filter(|y| y.len + len <= self.order) {
                let mut next = Vec::with_capacity(terms.len() * y.terms.len());
                for a in terms {
                    let ac = a.then(&MatrixWord::constant(c.clone()));
                    for b in &y.terms {
                        next.push(ac.then(b));
                    }
                }
                if let Some(v) = self.extend(&next, format!("{label}·{lc}·{}", y.label), len + y.len)? {
                    return Ok(Some(v));
                }
            }
        }
        Ok(None)
    }
}

/// Freeness of the algebra generated by the family and D from M_n(B),
/// with amalgamation over D, decided up to the truncation order.
pub fn freeness_from_mnb_over_d(fam: &MatrixFamilySpec) -> Result<bool> {
    Ok(alternating_violation(fam, Amalgamation::D)?.is_none())
}

/// Freeness of the family from M_n(B) with amalgamation over B.
pub fn freeness_from_mnb_over_b(fam: &MatrixFamilySpec) -> Result<bool> {
    Ok(alternating_violation(fam, Amalgamation::B)?.is_none())
}

/// Symmetric matrix with free semicircular entries x_ij = x_ji (i ≤ j) of
/// variance 1.
pub fn symmetric_semicircular(n: usize, order: usize) -> MatrixFamilySpec {
    let alg = BaseAlgebra::scalars();
    let mut entries = DistributionSpec::new(alg, n * n, order).with_involution(entry_involution(n, &[0])).unwrap();
    if order >= 2 {
        for i in 0..n {
            for j in 0..n {
                for (a, b) in [(i, j), (j, i)] {
                    entries.set(&[i * n + j, a * n + b], &[0], BElem::identity(1)).unwrap();
                }
            }
        }
    }
    MatrixFamilySpec::new(n, entries).unwrap()
}

/// The matrix with every entry equal to the constant 1.
pub fn constant_matrix(n: usize, order: usize) -> MatrixFamilySpec {
    let mut entries =
        DistributionSpec::new(BaseAlgebra::scalars(), n * n, order).with_involution(entry_involution(n, &[0])).unwrap();
    if order >= 1 {
        for g in 0..n * n {
            entries.set(&[g], &[], BElem::identity(1)).unwrap();
        }
    }
    MatrixFamilySpec::new(n, entries).unwrap()
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    n: usize,
    s: usize,
    involution: Vec<usize>,
    distribution: DistributionSpec,
}

impl Serialize for MatrixFamilySpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyJson { n: self.n, s: self.s, involution: self.sigma(), distribution: self.entries.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixFamilySpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = FamilyJson::deserialize(d)?;
        let fam = MatrixFamilySpec::new(raw.n, raw.distribution).map_err(D::Error::custom)?;
        if fam.s != raw.s || fam.sigma() != raw.involution {
            return Err(D::Error::custom("family size or involution disagrees with the entry distribution"));
        }
        Ok(fam)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulants::{free_poisson, free_product, semicircular};
    use crate::rational::{frac, q};

    fn sc(x: &BElem) -> Q {
        x.get(0, 0).clone()
    }

    fn one() -> BElem {
        BElem::identity(1)
    }

    #[test]
    fn uniform_semicircular_entries() {
        let fam = build_uniform_rcyclic(&semicircular(4), 2);
        let (x11, x12, x21) = (fam.gen(0, 0, 0), fam.gen(0, 0, 1), fam.gen(0, 1, 0));
        let k = fam.entries();
        assert_eq!(sc(&k.get(&[x12, x21], &[0]).unwrap()), q(1));
        assert_eq!(sc(&k.get(&[x12, x12], &[0]).unwrap()), q(0));
        assert_eq!(sc(&k.get(&[x11, x11], &[0]).unwrap()), q(1));
        let m = fam.moments();
        assert_eq!(sc(&m.get(&[x11, x11], &[0]).unwrap()), q(1));
        assert_eq!(sc(&m.get(&[x12, x21], &[0]).unwrap()), q(1));
        assert_eq!(sc(&m.get(&[x12, x12], &[0]).unwrap()), q(0));
        assert_eq!(build_uniform_rcyclic(&free_poisson(3), 1).entries(), &free_poisson(3));
        assert!(is_rcyclic(&fam) && is_uniformly_rcyclic(&fam));
    }

    #[test]
    fn determining_series_roundtrip() {
        let fam = build_uniform_rcyclic(&free_poisson(3), 3);
        let theta = determining_series(&fam);
        assert_eq!(build_rcyclic(&theta, 3, &fam.sigma()).unwrap(), fam);
        // only x11 has variance
        let mut theta = DistributionSpec::new(BaseAlgebra::scalars(), 2, 4);
        theta.set(&[0, 0], &[0], one()).unwrap();
        let fam = build_rcyclic(&theta, 2, &[0]).unwrap();
        assert!(is_rcyclic(&fam));
        assert!(!is_uniformly_rcyclic(&fam));
        assert_eq!(fam.entries().entries().len(), 1);
        assert_eq!(fam.entries().entries()[0].0, &[0, 0]);
    }

    #[test]
    fn non_rcyclic_examples() {
        assert!(!is_rcyclic(&symmetric_semicircular(2, 4)));
        assert!(!is_rcyclic(&constant_matrix(2, 4)));
        // free diagonal entries with equal cumulants: R-cyclic, not uniform
        let diag = build_rcyclic(
            &free_product(&[semicircular(4), semicircular(4)]).unwrap(),
            2,
            &[0],
        )
        .unwrap();
        assert!(is_rcyclic(&diag));
        assert!(!is_uniformly_rcyclic(&diag));
    }

    #[test]
    fn expectations() {
        let fam = build_uniform_rcyclic(&semicircular(4), 2);
        let alg = fam.matrix_algebra();
        let x = MatrixWord::letter(alg, 0);
        assert!(fam.expectation(Target::D, &x).unwrap().is_zero());
        let xx = x.then(&x);
        assert_eq!(fam.expectation(Target::B, &xx).unwrap(), BElem::scalar(1, q(2)));
        let b0 = alg.unit(0, 1, &BElem::scalar(1, frac(3, 7)));
        assert_eq!(fam.expectation(Target::MnB, &MatrixWord::constant(b0.clone())).unwrap(), b0);
        let w = xx.then(&MatrixWord::constant(b0)).then(&xx);
        let full = fam.expectation(Target::MnB, &w).unwrap();
        assert_eq!(alg.diagonal(&full), fam.expectation(Target::D, &w).unwrap());
        assert_eq!(alg.trace(&fam.expectation(Target::D, &w).unwrap()), fam.expectation(Target::B, &w).unwrap());
        assert!(matches!(
            fam.expectation(Target::B, &xx.then(&xx).then(&x)),
            Err(Error::TruncationExceeded { .. })
        ));
    }

    #[test]
    fn matrix_valued_expectation_by_hand() {
        // n=1 with d=2: E_{M_1(B)} is E itself
        let alg = BaseAlgebra::new(2).unwrap();
        let mut base = DistributionSpec::new(alg, 1, 2);
        base.set(&[0], &[], BElem::from_rows(vec![vec![q(1), q(2)], vec![q(0), q(3)]]).unwrap()).unwrap();
        base.set(&[0, 0], &[1], BElem::from_rows(vec![vec![q(0), q(1)], vec![q(1), q(0)]]).unwrap()).unwrap();
        let fam = build_uniform_rcyclic(&base, 1);
        let b = BElem::from_rows(vec![vec![q(1), q(-1)], vec![q(2), frac(1, 2)]]).unwrap();
        let w = MatrixWord::alternating(fam.matrix_algebra(), &[0, 0], &[b.clone()]);
        let direct = moments_from_cumulants(&base).eval(&[0, 0], &[b, BElem::identity(2)]).unwrap();
        assert_eq!(fam.expectation(Target::MnB, &w).unwrap(), direct);
    }

    #[test]
    fn cyclic_cumulants_small() {
        let mut theta = DistributionSpec::new(BaseAlgebra::scalars(), 2, 3);
        theta.set(&[0], &[], BElem::scalar(1, q(2))).unwrap();
        theta.set(&[0, 1], &[0], BElem::scalar(1, q(5))).unwrap();
        theta.set(&[1, 0], &[0], BElem::scalar(1, q(5))).unwrap();
        theta.set(&[1, 1], &[0], BElem::scalar(1, q(-1))).unwrap();
        theta.set(&[0, 1, 1], &[0, 0], BElem::scalar(1, frac(1, 3))).unwrap();
        let fam = build_rcyclic(&theta, 2, &[0]).unwrap();
        let alg = fam.matrix_algebra();
        let b = one();
        for k in 1..=3 {
            for idx in tuples(2, k - 1) {
                let mut args: Vec<BElem> = idx.iter().map(|&i| alg.unit(i, i, &b)).collect();
                args.push(alg.identity());
                let lhs = fam.cumulant(Target::D, &vec![0; k], &args).unwrap();
                let mut rhs = alg.zero();
                for last in 0..2 {
                    let mut full = idx.clone();
                    full.push(last);
                    let w = cyclic_entry_word(2, &vec![0; k], &full);
                    let c = fam.entries().get(&w, &vec![0; k - 1]).unwrap();
                    rhs += &alg.unit(last, last, &c);
                }
                assert_eq!(lhs, rhs, "k={k} idx={idx:?}");
            }
        }
    }

    #[test]
    fn cumulant_factorization_at_two() {
        let fam = build_uniform_rcyclic(&semicircular(4), 2);
        let alg = fam.matrix_algebra();
        let eb = fam.cumulant(Target::B, &[0, 0], &[one(), one()]).unwrap();
        assert_eq!(eb, BElem::scalar(1, q(2)));
        let ed = fam.cumulant(Target::D, &[0, 0], &[alg.unit(0, 0, &one()), alg.identity()]).unwrap();
        assert_eq!(ed, alg.scalar(&eb.scale(&frac(1, 2))));
        let k1 = fam.cumulant(Target::D, &[0], &[alg.identity()]).unwrap();
        assert_eq!(k1, fam.expectation(Target::D, &MatrixWord::letter(alg, 0)).unwrap());
    }

    #[test]
    fn freeness_examples() {
        let uniform = build_uniform_rcyclic(&semicircular(4), 2);
        assert!(freeness_from_mnb_over_d(&uniform).unwrap());
        assert!(freeness_from_mnb_over_b(&uniform).unwrap());
        let sym = symmetric_semicircular(2, 4);
        assert!(!freeness_from_mnb_over_d(&sym).unwrap());
        let diag = build_rcyclic(&free_product(&[semicircular(4), free_poisson(4)]).unwrap(), 2, &[0]).unwrap();
        assert!(freeness_from_mnb_over_d(&diag).unwrap());
        let v = alternating_violation(&diag, Amalgamation::B).unwrap();
        assert!(v.is_some());
        let zero = MatrixFamilySpec::new(2, DistributionSpec::new(BaseAlgebra::scalars(), 4, 4).with_involution(entry_involution(2, &[0])).unwrap()).unwrap();
        assert!(freeness_from_mnb_over_d(&zero).unwrap() && freeness_from_mnb_over_b(&zero).unwrap());
    }

    #[test]
    fn products_and_constants() {
        let scalar = build_uniform_rcyclic(&semicircular(4), 1);
        let sq = product_family(&scalar, &[(0, 0)]).unwrap();
        assert_eq!(sq.order(), 2);
        let m = sq.moments();
        assert_eq!(sc(&m.get(&[0], &[]).unwrap()), q(1));
        assert_eq!(sc(&m.get(&[0, 0], &[0]).unwrap()), q(2));

        let fam = build_uniform_rcyclic(&semicircular(4), 2);
        let with_id = add_constant_diagonal(&fam, &[one(), one()]).unwrap();
        assert!(is_rcyclic(&with_id));
        let times_id = product_family(&with_id, &[(0, 1)]).unwrap();
        assert_eq!(times_id.entries(), fam.truncated(2).entries());
        assert!(is_rcyclic(&product_family(&fam, &[(0, 0)]).unwrap()));
        let combo = bimodule_combination(&fam, &[(BElem::scalar(1, q(2)), 0, BElem::scalar(1, frac(1, 3)))]).unwrap();
        assert!(is_rcyclic(&combo));
    }

    #[test]
    fn json_roundtrip() {
        let fam = build_uniform_rcyclic(&semicircular(3), 2);
        let s = serde_json::to_string(&fam).unwrap();
        assert!(s.starts_with(r#"{"n":2,"s":1,"involution":[0],"distribution":{"d":1,"s":4,"K":3"#));
        assert_eq!(serde_json::from_str::<MatrixFamilySpec>(&s).unwrap(), fam);
    }
}
