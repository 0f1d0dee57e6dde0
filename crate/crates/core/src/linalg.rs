//! Exact linear algebra: dense rational matrices, incremental row
//! reduction, and multi-modular inversion of integer matrices with an
//! exactness certificate.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::Q;

/// Dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Q::one() } else { Q::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Q) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &QMatrix) -> Option<QMatrix> {
        if self.cols != other.rows {
            return None;
        }
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Some(out)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| *self.get(i, j) == if i == j { Q::one() } else { Q::zero() }))
    }
}

/// Gauss–Jordan inversion over the rationals; `None` when singular.
pub fn rational_inverse(m: &QMatrix) -> Option<QMatrix> {
    let n = m.rows;
    assert_eq!(n, m.cols, "square matrix required");
    let mut a: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut r = m.row(i).to_vec();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, piv);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[c].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == c || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(QMatrix::from_fn(n, n, |i, j| a[i][n + j].clone()))
}

/// Outcome of pushing one equation into a [`RowReducer`].
#[derive(Clone, Debug, PartialEq)]
pub struct Pushed {
    /// The coefficient row was independent of the rows seen so far.
    pub independent: bool,
    /// For a dependent row, the right-hand sides minus the value implied by
    /// earlier rows; a nonzero entry means that right-hand side is
    /// inconsistent.
    pub residual: Vec<Q>,
}

/// Incremental reduced row echelon form of `[A | B]` for a system
/// `A·X = B` with several right-hand sides.
#[derive(Clone, Debug)]
pub struct RowReducer {
    cols: usize,
    rhs: usize,
    basis: Vec<(usize, Vec<Q>)>,
}

impl RowReducer {
    pub fn new(cols: usize, rhs: usize) -> Self {
        RowReducer { cols, rhs, basis: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn push(&mut self, coeffs: &[Q], rhs: &[Q]) -> Pushed {
        assert_eq!(coeffs.len(), self.cols);
        assert_eq!(rhs.len(), self.rhs);
        let mut row: Vec<Q> = coeffs.iter().chain(rhs).cloned().collect();
        for (pc, b) in &self.basis {
            if row[*pc].is_zero() {
                continue;
            }
            let f = row[*pc].clone();
            for (x, y) in row.iter_mut().zip(b) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        match (0..self.cols).find(|&c| !row[c].is_zero()) {
            None => Pushed { independent: false, residual: row[self.cols..].to_vec() },
            Some(pc) => {
                let inv = row[pc].recip();
                for x in row.iter_mut() {
                    *x *= &inv;
                }
                for (_, b) in self.basis.iter_mut() {
                    if b[pc].is_zero() {
                        continue;
                    }
                    let f = b[pc].clone();
                    for (x, y) in b.iter_mut().zip(&row) {
                        if !y.is_zero() {
                            *x -= &f * y;
                        }
                    }
                }
                self.basis.push((pc, row));
                Pushed { independent: true, residual: vec![Q::zero(); self.rhs] }
            }
        }
    }

    /// A particular solution (free variables set to zero), one column per
    /// right-hand side.
    pub fn solution(&self) -> Vec<Vec<Q>> {
        let mut x = vec![vec![Q::zero(); self.cols]; self.rhs];
        for (pc, b) in &self.basis {
            for (r, col) in x.iter_mut().enumerate() {
                col[*pc] = b[self.cols + r].clone();
            }
        }
        x
    }
}

/// Exact rank of a list of rational vectors.
pub fn rank(vectors: &[Vec<Q>]) -> usize {
    let Some(first) = vectors.first() else { return 0 };
    let mut red = RowReducer::new(first.len(), 0);
    for v in vectors {
        red.push(v, &[]);
    }
    red.rank()
}

// ---------------------------------------------------------------------------
// multi-modular arithmetic

/// Primes below 2^26, largest first. Products of two residues fit in 52
/// bits, which lets elimination accumulate thousands of updates in a u64
/// before reducing.
pub(crate) fn primes() -> impl Iterator<Item = u64> {
    let is_prime = |p: u64| p % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= p).all(|d| p % d != 0);
    (1u64 << 25..1u64 << 26).rev().filter(move |&p| is_prime(p))
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Number of lazy multiply-adds a u64 can absorb before reduction.
fn lazy_budget(p: u64) -> usize {
    ((u64::MAX - p) / ((p - 1) * (p - 1))) as usize
}

/// In-place Gauss–Jordan inversion of an `n×n` matrix mod `p`; `false`
/// when singular mod `p`.
pub(crate) fn invert_mod(a: &mut [u64], n: usize, p: u64) -> bool {
    let budget = lazy_budget(p).max(1);
    let mut swaps = Vec::new();
    let mut since_reduce = 0;
    for k in 0..n {
        let mut piv = None;
        for r in k..n {
            a[r * n + k] %= p;
            if a[r * n + k] != 0 {
                piv = Some(r);
                break;
            }
        }
        let Some(piv) = piv else { return false };
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
        }
        swaps.push(piv);
        for j in 0..n {
            a[k * n + j] %= p;
        }
        let inv = inv_mod(a[k * n + k], p);
        a[k * n + k] = 1;
        for j in 0..n {
            a[k * n + j] = a[k * n + j] * inv % p;
        }
        if since_reduce + 1 >= budget {
            for x in a.iter_mut() {
                *x %= p;
            }
            since_reduce = 0;
        }
        since_reduce += 1;
        let (before, rest) = a.split_at_mut(k * n);
        let (pivot_row, after) = rest.split_at_mut(n);
        let pivot_row: &[u64] = pivot_row;
        for row in before.chunks_exact_mut(n).chain(after.chunks_exact_mut(n)) {
            let f = row[k] % p;
            row[k] = 0;
            if f == 0 {
                continue;
            }
            let c = p - f;
            for (x, &y) in row.iter_mut().zip(pivot_row) {
                *x += c * y;
            }
        }
    }
    for x in a.iter_mut() {
        *x %= p;
    }
    for (k, &piv) in swaps.iter().enumerate().rev() {
        if piv != k {
            for r in 0..n {
                a.swap(r * n + k, r * n + piv);
            }
        }
    }
    true
}

/// Reduced row echelon form mod `p` of a `rows×cols` matrix; returns the
/// pivot columns.
fn rref_mod(a: &mut [u64], rows: usize, cols: usize, p: u64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[i * cols + c] % p != 0) else { continue };
        for j in 0..cols {
            a.swap(r * cols + j, piv * cols + j);
        }
        let inv = inv_mod(a[r * cols + c] % p, p);
        for j in 0..cols {
            a[r * cols + j] = a[r * cols + j] % p * inv % p;
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = a[i * cols + c] % p;
            if f == 0 {
                continue;
            }
            for j in 0..cols {
                let y = a[r * cols + j];
                a[i * cols + j] = (a[i * cols + j] % p + (p - f) * y) % p;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// An integer matrix presented through its reductions.
pub trait ModularMatrix {
    fn dim(&self) -> usize;
    /// The matrix mod `p`, row-major.
    fn residues(&self, p: u64) -> Vec<u64>;
    /// `(M · X) mod p` for an `n×n` row-major `X` already reduced mod `p`.
    fn mul_mod(&self, x: &[u64], p: u64) -> Vec<u64> {
        dense_mul_mod(self, x, p)
    }
    /// Upper bound on the bit length of any |entry|.
    fn entry_bits(&self) -> u64;
}

/// Plain `(M · X) mod p` from the residues of `M`.
pub(crate) fn dense_mul_mod<M: ModularMatrix + ?Sized>(m: &M, x: &[u64], p: u64) -> Vec<u64> {
        let n = m.dim();
        let m = m.residues(p);
        let mut out = vec![0u64; n * n];
        let budget = lazy_budget(p).max(1);
        for i in 0..n {
            let orow = &mut out[i * n..(i + 1) * n];
            for (l, &a) in m[i * n..(i + 1) * n].iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (o, &b) in orow.iter_mut().zip(&x[l * n..(l + 1) * n]) {
                    *o += a * b;
                }
                if (l + 1) % budget == 0 {
                    orow.iter_mut().for_each(|o| *o %= p);
                }
            }
            orow.iter_mut().for_each(|o| *o %= p);
        }
        out
}

/// Exact inverse stored as integer numerators with one denominator per
/// column: `inverse[i][j] = num[i][j] / den[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledInverse {
    pub n: usize,
    pub num: Vec<BigInt>,
    pub den: Vec<BigInt>,
}

impl ScaledInverse {
    pub fn entry(&self, i: usize, j: usize) -> Q {
        Q::new(self.num[i * self.n + j].clone(), self.den[j].clone())
    }

    pub fn to_qmatrix(&self) -> QMatrix {
        QMatrix::from_fn(self.n, self.n, |i, j| self.entry(i, j))
    }
}

/// Result of [`modular_inverse`].
#[derive(Clone, Debug, PartialEq)]
pub enum InverseOutcome {
    Inverse(ScaledInverse),
    /// A nonzero integer vector `v` with `M·v = 0`, certifying singularity.
    Singular(Vec<BigInt>),
}

struct Crt {
    primes: Vec<u64>,
    residues: Vec<Vec<u32>>,
    /// `radix[i][l]` is the product of the first `l` primes mod `primes[i]`.
    radix: Vec<Vec<u64>>,
    inv_radix: Vec<u64>,
    modulus: BigInt,
}

impl Crt {
    fn new() -> Self {
        Crt { primes: vec![], residues: vec![], radix: vec![], inv_radix: vec![], modulus: BigInt::one() }
    }

    fn push(&mut self, p: u64, residues: Vec<u32>) {
        let mut radix = vec![1 % p];
        for &q in &self.primes {
            let last = *radix.last().unwrap();
            radix.push(last * (q % p) % p);
        }
        self.inv_radix.push(inv_mod(*radix.last().unwrap(), p));
        self.radix.push(radix);
        self.primes.push(p);
        self.residues.push(residues);
        self.modulus *= p;
    }

    /// Symmetric representative of `scale · x` where `x` is the entry with
    /// the given residues.
    fn value(&self, idx: usize, scale_mod: &[u64]) -> BigInt {
        let m = self.primes.len();
        let mut digits = [0u64; 64];
        for i in 0..m {
            let p = self.primes[i];
            let r = self.residues[i][idx] as u64 * scale_mod[i] % p;
            let mut acc = 0u64;
            for l in 0..i {
                acc = (acc + digits[l] * self.radix[i][l]) % p;
            }
            digits[i] = (r + p - acc) % p * self.inv_radix[i] % p;
        }
        let mut v = BigInt::zero();
        for i in (0..m).rev() {
            v = v * self.primes[i] + digits[i];
        }
        if &v * 2 > self.modulus {
            v - &self.modulus
        } else {
            v
        }
    }
}

/// Rational reconstruction of `u mod m` with numerator and denominator
/// bounded by `sqrt(m/2)`.
fn reconstruct(u: &BigInt, m: &BigInt) -> Option<(BigInt, BigInt)> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    if t1.is_negative() {
        Some((-r1, -t1))
    } else {
        Some((r1, t1))
    }
}

fn bits(x: &BigInt) -> u64 {
    x.bits()
}

/// Inverts a nonsingular integer matrix exactly: eliminations modulo
/// several primes, Chinese remaindering with rational reconstruction, then a
/// certificate that `M·num = diag(den)` holds modulo enough fresh primes to
/// exceed twice a bound on every entry. A singular matrix yields a verified
/// integer kernel vector instead.
pub fn modular_inverse(m: &dyn ModularMatrix) -> InverseOutcome {
    let n = m.dim();
    if n == 0 {
        return InverseOutcome::Inverse(ScaledInverse { n, num: vec![], den: vec![] });
    }
    let mut prime_iter = primes();
    let mut crt = Crt::new();
    let mut singular_hits = 0;
    let mut target = 2;
    loop {
        while crt.primes.len() < target {
            let p = prime_iter.next().expect("prime supply");
            let mut a = m.residues(p);
            if invert_mod(&mut a, n, p) {
                crt.push(p, a.into_iter().map(|x| x as u32).collect());
            } else {
                singular_hits += 1;
                if singular_hits >= 2 {
                    if let Some(v) = kernel_certificate(m, &mut prime_iter) {
                        return InverseOutcome::Singular(v);
                    }
                    singular_hits = 0;
                }
            }
        }
        if let Some(candidate) = assemble(&crt, n) {
            if certify(m, &candidate, &mut prime_iter) {
                return InverseOutcome::Inverse(candidate);
            }
        }
        target += (target / 2).max(1);
    }
}

fn assemble(crt: &Crt, n: usize) -> Option<ScaledInverse> {
    let modulus = crt.modulus.clone();
    let bound = (&modulus / 2u32).sqrt();
    let mut num = vec![BigInt::zero(); n * n];
    let mut den = Vec::with_capacity(n);
    for j in 0..n {
        let mut d = BigInt::one();
        let mut d_mod: Vec<u64> = crt.primes.iter().map(|_| 1).collect();
        let mut col: Vec<BigInt> = Vec::with_capacity(n);
        for i in 0..n {
            let v = crt.value(i * n + j, &d_mod);
            if v.abs() <= bound {
                col.push(v);
                continue;
            }
            let (a, b) = reconstruct(&v, &modulus)?;
            // earlier entries of the column gain the new factor b
            for c in col.iter_mut() {
                *c *= &b;
            }
            col.push(a);
            d *= &b;
            d_mod = crt.primes.iter().map(|&p| (&d % p).to_u64().unwrap()).collect();
        }
        for (i, v) in col.into_iter().enumerate() {
            num[i * n + j] = v;
        }
        den.push(d);
    }
    Some(ScaledInverse { n, num, den })
}

fn to_residue(x: &BigInt, p: u64) -> u64 {
    let r = (x % p).to_i64().unwrap();
    if r < 0 {
        (r + p as i64) as u64
    } else {
        r as u64
    }
}

/// Checks `M·num = diag(den)` exactly via enough fresh primes.
fn certify(m: &dyn ModularMatrix, inv: &ScaledInverse, primes: &mut impl Iterator<Item = u64>) -> bool {
    let n = inv.n;
    let num_bits = inv.num.iter().map(bits).max().unwrap_or(0);
    let den_bits = inv.den.iter().map(bits).max().unwrap_or(0);
    // |(M·num − diag(den))_ij| < 2^need / 2
    let need = m.entry_bits() + num_bits + (64 - (n as u64).leading_zeros() as u64) + den_bits.max(1) + 3;
    let mut have = 0u64;
    while have < need {
        let p = primes.next().expect("prime supply");
        let x: Vec<u64> = inv.num.iter().map(|v| to_residue(v, p)).collect();
        let prod = m.mul_mod(&x, p);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { to_residue(&inv.den[j], p) } else { 0 };
                if prod[i * n + j] != want {
                    return false;
                }
            }
        }
        have += 63 - p.leading_zeros() as u64;
    }
    true
}

/// Finds an integer vector in the kernel and proves `M·v = 0` exactly.
fn kernel_certificate(m: &dyn ModularMatrix, primes: &mut impl Iterator<Item = u64>) -> Option<Vec<BigInt>> {
    let n = m.dim();
    let mut crt = Crt::new();
    let mut free_col = None;
    for round in 0..64 {
        let p = primes.next().expect("prime supply");
        let mut a = m.residues(p);
        let pivots = rref_mod(&mut a, n, n, p);
        let Some(f) = (0..n).find(|c| !pivots.contains(c)) else { continue };
        if free_col.is_some_and(|g| g != f) {
            // rank pattern changed: restart with this prime
            crt = Crt::new();
        }
        free_col = Some(f);
        let mut v = vec![0u64; n];
        v[f] = 1;
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = (p - a[r * n + f] % p) % p;
        }
        crt.push(p, v.into_iter().map(|x| x as u32).collect());
        if round < 1 {
            continue;
        }
        let modulus = crt.modulus.clone();
        let mut d = BigInt::one();
        let mut vals = Vec::with_capacity(n);
        let mut ok = true;
        let ones = vec![1u64; crt.primes.len()];
        for i in 0..n {
            let u = crt.value(i, &ones);
            match reconstruct(&u, &modulus) {
                Some((a, b)) => vals.push((a, b)),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        for (_, b) in &vals {
            d = d.lcm(b);
        }
        let ints: Vec<BigInt> = vals.iter().map(|(a, b)| a * (&d / b)).collect();
        if kernel_holds(m, &ints, primes) {
            return Some(ints);
        }
    }
    None
}

fn kernel_holds(m: &dyn ModularMatrix, v: &[BigInt], primes: &mut impl Iterator<Item = u64>) -> bool {
    let n = m.dim();
    let need = m.entry_bits() + v.iter().map(bits).max().unwrap_or(0) + 64 - (n as u64).leading_zeros() as u64 + 2;
    let mut have = 0;
    while have < need {
        let p = primes.next().expect("prime supply");
        let mut x = vec![0u64; n * n];
        for (i, vi) in v.iter().enumerate() {
            x[i * n] = to_residue(vi, p);
        }
        let prod = m.mul_mod(&x, p);
        if (0..n).any(|i| prod[i * n] != 0) {
            return false;
        }
        have += 63 - p.leading_zeros() as u64;
    }
    v.iter().any(|x| x.sign() != Sign::NoSign)
}
