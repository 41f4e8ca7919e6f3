//! Arithmetic in F_{2^r} (r ≤ 16) and exact linear algebra over it.
//!
//! Elements are bit-encoded polynomials over F_2 reduced by a fixed
//! irreducible modulus. Multiplication goes through exp/log tables built
//! from a primitive element, so any irreducible modulus works.

mod dense;
mod packed;
mod sparse;

pub use dense::DenseOracle;
pub use packed::{Echelon, Rref};
pub use sparse::SpMat;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{shape, Error, Result};

/// One irreducible polynomial of degree r per r in 1..=16 (bit i = coefficient of x^i).
const MODULI: [u32; 16] = [
    0b11,
    0b111,
    0b1011,
    0b1_0011,
    0b10_0101,
    0b100_0011,
    0b1000_0011,
    0b1_0001_1101,
    0b10_0001_0001,
    0b100_0000_1001,
    0b1000_0000_0101,
    0b1_0000_0101_0011,
    0b10_0000_0001_1011,
    0b100_0100_0100_0011,
    0b1000_0000_0000_0011,
    0b1_0001_0000_0000_1011,
];

/// Degree and modulus of a binary extension field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub r: u32,
    pub modulus: u32,
}

impl FieldSpec {
    /// The built-in modulus for degree `r`.
    pub fn new(r: u32) -> Result<Self> {
        if !(1..=16).contains(&r) {
            return Err(Error::InvalidField(format!("degree {r} outside 1..=16")));
        }
        Ok(FieldSpec {
            r,
            modulus: MODULI[r as usize - 1],
        })
    }

    /// An explicit modulus; checked for exact degree and irreducibility.
    pub fn with_modulus(r: u32, modulus: u32) -> Result<Self> {
        if !(1..=16).contains(&r) {
            return Err(Error::InvalidField(format!("degree {r} outside 1..=16")));
        }
        if degree(modulus) != Some(r) {
            return Err(Error::InvalidField(format!(
                "modulus {modulus:#b} does not have degree {r}"
            )));
        }
        if !is_irreducible(modulus) {
            return Err(Error::InvalidField(format!(
                "modulus {modulus:#b} is reducible"
            )));
        }
        Ok(FieldSpec { r, modulus })
    }

    pub fn q(&self) -> usize {
        1usize << self.r
    }
}

fn degree(p: u32) -> Option<u32> {
    if p == 0 {
        None
    } else {
        Some(31 - p.leading_zeros())
    }
}

fn poly_mod(mut a: u32, m: u32) -> u32 {
    let dm = degree(m).unwrap();
    while let Some(da) = degree(a) {
        if da < dm {
            break;
        }
        a ^= m << (da - dm);
    }
    a
}

pub(crate) fn is_irreducible(p: u32) -> bool {
    let Some(d) = degree(p) else { return false };
    if d == 0 {
        return false;
    }
    for div in 2u32..(1u32 << (d / 2 + 1)) {
        let dd = degree(div).unwrap();
        if dd >= 1 && 2 * dd <= d && poly_mod(p, div) == 0 {
            return false;
        }
    }
    true
}

fn clmul_mod(a: u32, b: u32, m: u32, r: u32) -> u32 {
    let mut acc = 0u32;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> r & 1 == 1 {
            a ^= m;
        }
    }
    acc
}

/// A field element, stored as its bit encoding.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct FieldElem(pub u16);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dense vectors are plain element lists.
pub type FVec = Vec<FieldElem>;

struct Tables {
    spec: FieldSpec,
    exp: Vec<u16>,
    log: Vec<u32>,
    // mulx[c * r + i] = c * x^i
    mulx: Vec<u16>,
}

/// Shared handle to the arithmetic tables of one field.
#[derive(Clone)]
pub struct Field {
    t: Arc<Tables>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.t.spec == other.t.spec
    }
}
impl Eq for Field {}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        let spec = FieldSpec::with_modulus(spec.r, spec.modulus)?;
        let r = spec.r;
        let q = spec.q() as u32;
        let m = spec.modulus;
        let order = q - 1;
        let primes = prime_factors(order);
        let g = if q == 2 {
            1
        } else {
            (2..q)
                .find(|&c| {
                    primes
                        .iter()
                        .all(|&p| pow_slow(c, (order / p) as u64, m, r) != 1)
                })
                .ok_or_else(|| Error::InvalidField("no primitive element".into()))?
        };
        let mut exp = vec![0u16; 2 * order as usize];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..order {
            exp[i as usize] = x as u16;
            exp[(i + order) as usize] = x as u16;
            log[x as usize] = i;
            x = clmul_mod(x, g, m, r);
        }
        let mut mulx = vec![0u16; (q * r) as usize];
        for c in 0..q {
            for i in 0..r {
                mulx[(c * r + i) as usize] = clmul_mod(c, 1 << i, m, r) as u16;
            }
        }
        Ok(Field {
            t: Arc::new(Tables {
                spec,
                exp,
                log,
                mulx,
            }),
        })
    }

    /// F_{2^r} with the built-in modulus.
    pub fn with_degree(r: u32) -> Result<Self> {
        Field::new(FieldSpec::new(r)?)
    }

    pub fn binary() -> Self {
        Field::with_degree(1).unwrap()
    }

    pub fn spec(&self) -> FieldSpec {
        self.t.spec
    }

    pub fn r(&self) -> u32 {
        self.t.spec.r
    }

    pub fn q(&self) -> usize {
        self.t.spec.q()
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q() as u32).map(|v| FieldElem(v as u16))
    }

    /// Checked conversion from an integer encoding.
    pub fn elem(&self, v: u64) -> Result<FieldElem> {
        if (v as usize) < self.q() {
            Ok(FieldElem(v as u16))
        } else {
            Err(Error::InvalidField(format!(
                "{v} is not an element of F_{}",
                self.q()
            )))
        }
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(a.0 ^ b.0)
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        let t = &*self.t;
        FieldElem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.0 == 0 {
            return Err(Error::InverseOfZero);
        }
        let t = &*self.t;
        let order = self.q() as u32 - 1;
        let l = t.log[a.0 as usize];
        Ok(FieldElem(t.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return FieldElem::ONE;
        }
        if a.0 == 0 {
            return FieldElem::ZERO;
        }
        let t = &*self.t;
        let order = self.q() as u64 - 1;
        let l = (t.log[a.0 as usize] as u64 * (e % order)) % order;
        FieldElem(t.exp[l as usize])
    }

    /// Absolute trace to F_2: x + x^2 + x^4 + ... + x^{2^{r-1}}.
    pub fn trace(&self, x: FieldElem) -> FieldElem {
        let mut acc = FieldElem::ZERO;
        let mut p = x;
        for _ in 0..self.r() {
            acc = self.add(acc, p);
            p = self.mul(p, p);
        }
        acc
    }

    /// Bit pattern of c * x^i, used by the bit-sliced row operations.
    #[inline]
    pub(crate) fn mulx(&self, c: FieldElem, i: u32) -> u16 {
        self.t.mulx[(c.0 as u32 * self.r() + i) as usize]
    }

    /// Uniformly random element.
    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        FieldElem(rng.gen_range(0..self.q()) as u16)
    }

    /// Uniformly random nonzero element.
    pub fn random_nonzero<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        FieldElem(rng.gen_range(1..self.q()) as u16)
    }

    pub fn random_vec<R: rand::Rng + ?Sized>(&self, n: usize, rng: &mut R) -> FVec {
        (0..n).map(|_| self.random(rng)).collect()
    }

    /// dst += c * src.
    pub fn axpy(&self, dst: &mut [FieldElem], c: FieldElem, src: &[FieldElem]) {
        debug_assert_eq!(dst.len(), src.len());
        if c.is_zero() {
            return;
        }
        for (d, s) in dst.iter_mut().zip(src) {
            d.0 ^= self.mul(c, *s).0;
        }
    }

    pub fn scale(&self, v: &[FieldElem], c: FieldElem) -> FVec {
        v.iter().map(|&x| self.mul(c, x)).collect()
    }

    pub fn dot(&self, a: &[FieldElem], b: &[FieldElem]) -> FieldElem {
        let mut acc = 0u16;
        for (x, y) in a.iter().zip(b) {
            acc ^= self.mul(*x, *y).0;
        }
        FieldElem(acc)
    }

    /// Linear combination Σ coeffs[k] * rows[k].
    pub fn combine(&self, coeffs: &[FieldElem], rows: &[FVec], len: usize) -> FVec {
        let mut out = vec![FieldElem::ZERO; len];
        for (c, row) in coeffs.iter().zip(rows) {
            self.axpy(&mut out, *c, row);
        }
        out
    }

    /// Coordinatewise product u ⊙ v.
    pub fn entrywise_product(&self, u: &[FieldElem], v: &[FieldElem]) -> Result<FVec> {
        if u.len() != v.len() {
            return Err(shape("entrywise product", u.len(), v.len()));
        }
        Ok(u.iter().zip(v).map(|(a, b)| self.mul(*a, *b)).collect())
    }
}

/// Coordinatewise sum of two equal-length vectors.
pub fn add_vec(a: &[FieldElem], b: &[FieldElem]) -> FVec {
    a.iter().zip(b).map(|(x, y)| FieldElem(x.0 ^ y.0)).collect()
}

pub fn add_assign(a: &mut [FieldElem], b: &[FieldElem]) {
    for (x, y) in a.iter_mut().zip(b) {
        x.0 ^= y.0;
    }
}

/// Number of nonzero entries.
pub fn weight(v: &[FieldElem]) -> usize {
    v.iter().filter(|x| !x.is_zero()).count()
}

pub fn is_zero_vec(v: &[FieldElem]) -> bool {
    v.iter().all(|x| x.is_zero())
}

fn pow_slow(mut a: u32, mut e: u64, m: u32, r: u32) -> u32 {
    let mut acc = 1u32;
    while e > 0 {
        if e & 1 == 1 {
            acc = clmul_mod(acc, a, m, r);
        }
        a = clmul_mod(a, a, m, r);
        e >>= 1;
    }
    acc
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Reduced row echelon basis of the span of `vectors` (each of length `len`).
pub fn span_basis(field: &Field, len: usize, vectors: &[FVec]) -> Vec<FVec> {
    let mut e = Echelon::new(field.clone(), len);
    for v in vectors {
        e.insert_dense(v);
    }
    e.into_rref().basis()
}

/// True iff span(a) == span(b).
pub fn same_span(field: &Field, len: usize, a: &[FVec], b: &[FVec]) -> bool {
    span_basis(field, len, a) == span_basis(field, len, b)
}

/// True iff span(inner) ⊆ span(outer).
pub fn span_contains(field: &Field, len: usize, outer: &[FVec], inner: &[FVec]) -> bool {
    let mut e = Echelon::new(field.clone(), len);
    for v in outer {
        e.insert_dense(v);
    }
    inner.iter().all(|v| e.contains(v))
}

/// Representatives of span(z)/span(b): members of `z` that extend a basis of
/// span(b) to a basis of span(z), taken greedily in the given order.
pub fn quotient_reps(field: &Field, len: usize, z: &[FVec], b: &[FVec]) -> Result<Vec<FVec>> {
    let mut ze = Echelon::new(field.clone(), len);
    for v in z {
        if v.len() != len {
            return Err(shape("quotient_reps Z vector", len, v.len()));
        }
        ze.insert_dense(v);
    }
    for (i, v) in b.iter().enumerate() {
        if v.len() != len {
            return Err(shape("quotient_reps B vector", len, v.len()));
        }
        if !ze.contains(v) {
            return Err(Error::NotContained(i));
        }
    }
    let mut be = Echelon::new(field.clone(), len);
    for v in b {
        be.insert_dense(v);
    }
    let mut reps = Vec::new();
    for v in z {
        if be.insert_dense(v) {
            reps.push(v.clone());
        }
    }
    Ok(reps)
}
