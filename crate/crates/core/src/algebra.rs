//! The base algebra B = M_d(Q) and its elements.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, q, Q};

/// M_d over the rationals, with the matrix units e_{ab} as basis in
/// row-major order: basis index m stands for e_{m/d, m%d}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BaseAlgebra {
    pub d: usize,
}

impl BaseAlgebra {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Dimension("base algebra needs d ≥ 1".into()));
        }
        Ok(BaseAlgebra { d })
    }

    pub fn scalars() -> Self {
        BaseAlgebra { d: 1 }
    }

    pub fn basis_len(self) -> usize {
        self.d * self.d
    }

    pub fn unit(self, m: usize) -> BElem {
        BElem::unit(self.d, m / self.d, m % self.d)
    }

    /// Row and column of basis element m.
    pub fn split(self, m: usize) -> (usize, usize) {
        (m / self.d, m % self.d)
    }

    pub fn zero(self) -> BElem {
        BElem::zero(self.d)
    }

    pub fn one(self) -> BElem {
        BElem::identity(self.d)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BElem {
    d: usize,
    entries: Vec<Q>,
}

impl BElem {
    pub fn zero(d: usize) -> Self {
        BElem { d, entries: vec![Q::zero(); d * d] }
    }

    pub fn identity(d: usize) -> Self {
        Self::scalar(d, Q::one())
    }

    pub fn scalar(d: usize, c: Q) -> Self {
        let mut e = Self::zero(d);
        for i in 0..d {
            e.entries[i * d + i] = c.clone();
        }
        e
    }

    pub fn unit(d: usize, a: usize, b: usize) -> Self {
        let mut e = Self::zero(d);
        e.entries[a * d + b] = Q::one();
        e
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::Dimension("base element must be a nonempty square array".into()));
        }
        Ok(BElem { d, entries: rows.into_iter().flatten().collect() })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, a: usize, b: usize) -> &Q {
        &self.entries[a * self.d + b]
    }

    pub fn set(&mut self, a: usize, b: usize, v: Q) {
        self.entries[a * self.d + b] = v;
    }

    /// Coordinate on basis element m.
    pub fn coord(&self, m: usize) -> &Q {
        &self.entries[m]
    }

    pub fn rows(&self) -> Vec<Vec<Q>> {
        self.entries.chunks(self.d).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Nonzero coordinates as (basis index, coefficient).
    pub fn support(&self) -> impl Iterator<Item = (usize, &Q)> {
        self.entries.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn scale(&self, c: &Q) -> Self {
        BElem { d: self.d, entries: self.entries.iter().map(|x| x * c).collect() }
    }

    pub fn trace(&self) -> Q {
        (0..self.d).map(|i| self.get(i, i)).sum()
    }

    /// Normalised trace, the scalar state on M_d.
    pub fn tr(&self) -> Q {
        self.trace() / q(self.d as i64)
    }

    /// `self += c · e_{ab}`
    pub fn add_unit(&mut self, a: usize, b: usize, c: &Q) {
        self.entries[a * self.d + b] += c;
    }

    /// `self += c · x`
    pub fn add_scaled(&mut self, c: &Q, x: &BElem) {
        for (s, v) in self.entries.iter_mut().zip(&x.entries) {
            if !v.is_zero() {
                *s += c * v;
            }
        }
    }

    /// e_{ab} · self
    pub fn left_unit(&self, a: usize, b: usize) -> Self {
        let mut r = Self::zero(self.d);
        for j in 0..self.d {
            r.set(a, j, self.get(b, j).clone());
        }
        r
    }
}

impl fmt::Debug for BElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.chunks(self.d).enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let cells: Vec<String> = row.iter().map(fmt_q).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Add for &BElem {
    type Output = BElem;
    fn add(self, o: &BElem) -> BElem {
        assert_eq!(self.d, o.d);
        BElem { d: self.d, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &BElem {
    type Output = BElem;
    fn sub(self, o: &BElem) -> BElem {
        assert_eq!(self.d, o.d);
        BElem { d: self.d, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &BElem {
    type Output = BElem;
    fn neg(self) -> BElem {
        BElem { d: self.d, entries: self.entries.iter().map(|a| -a).collect() }
    }
}

impl AddAssign<&BElem> for BElem {
    fn add_assign(&mut self, o: &BElem) {
        assert_eq!(self.d, o.d);
        for (s, v) in self.entries.iter_mut().zip(&o.entries) {
            if !v.is_zero() {
                *s += v;
            }
        }
    }
}

impl Mul for &BElem {
    type Output = BElem;
    fn mul(self, o: &BElem) -> BElem {
        assert_eq!(self.d, o.d);
        let d = self.d;
        if d == 1 {
            return BElem { d, entries: vec![&self.entries[0] * &o.entries[0]] };
        }
        let mut r = BElem::zero(d);
        for i in 0..d {
            for l in 0..d {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = o.get(l, j);
                    if !b.is_zero() {
                        r.entries[i * d + j] += a * b;
                    }
                }
            }
        }
        r
    }
}

/// Serialized as a list of rows of "p/q" strings.
impl Serialize for BElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.entries.chunks(self.d).map(|r| r.iter().map(fmt_q).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_q(s)).collect::<Result<Vec<Q>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        BElem::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn units_multiply() {
        let b = BaseAlgebra::new(2).unwrap();
        for m1 in 0..4 {
            for m2 in 0..4 {
                let (a, c) = b.split(m1);
                let (a2, c2) = b.split(m2);
                let expect = if c == a2 { BElem::unit(2, a, c2) } else { b.zero() };
                assert_eq!(&b.unit(m1) * &b.unit(m2), expect);
            }
        }
        let x = BElem::from_rows(vec![vec![q(1), frac(1, 2)], vec![q(-3), q(4)]]).unwrap();
        assert_eq!(x.left_unit(1, 0), &BElem::unit(2, 1, 0) * &x);
        assert_eq!(&x * &b.one(), x);
        assert_eq!(x.tr(), frac(5, 2));
    }

    #[test]
    fn json_roundtrip() {
        let x = BElem::from_rows(vec![vec![q(1), frac(-1, 3)], vec![q(0), q(7)]]).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"[["1","-1/3"],["0","7"]]"#);
        assert_eq!(serde_json::from_str::<BElem>(&s).unwrap(), x);
    }
}
