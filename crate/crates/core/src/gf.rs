//! Finite fields F_q, q = p^k, with a deterministic choice of defining polynomial.
//!
//! Elements are encoded as integers in `[0, q)`: the coordinates `(a_0, ..., a_{k-1})`
//! of the polynomial basis `1, x, ..., x^{k-1}` are the base-p digits of the value.
//! Extension fields are built modulo the smallest monic irreducible polynomial of
//! degree k over F_p, where "smallest" means smallest base-p index of its lower
//! coefficients. Two constructions of the same `(p, k)` are therefore identical.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

/// Fields up to this order get full addition and multiplication tables.
const TABLE_LIMIT: u32 = 256;

/// An element of F_q in its canonical integer encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

enum Backend {
    Prime,
    Tables { add: Vec<u16>, mul: Vec<u16> },
    Generic,
}

struct Inner {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    inv: Vec<u32>,
    neg: Vec<u32>,
    backend: Backend,
}

/// A finite field description. Cheap to clone; all tables are shared.
#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.k == other.0.k && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.0.p)
            .field("k", &self.0.k)
            .field("q", &self.0.q)
            .field("modulus", &self.0.modulus)
            .finish()
    }
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits a prime power `q` into `(p, k)`.
pub fn prime_power(q: u64) -> Result<(u32, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    let mut p = 2u64;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut k = 0u32;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    if rest != 1 {
        return Err(Error::NotPrimePower(q));
    }
    if q > MAX_ORDER {
        return Err(Error::FieldTooLarge { p, k });
    }
    Ok((p as u32, k))
}

impl FieldSpec {
    /// Builds F_{p^k}.
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if k < 1 {
            return Err(Error::ZeroDegree);
        }
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        let q = (p as u128).checked_pow(k).unwrap_or(u128::MAX);
        if q > MAX_ORDER as u128 {
            return Err(Error::FieldTooLarge { p, k });
        }
        let p = p as u32;
        let q = q as u32;
        let modulus = if k == 1 { Vec::new() } else { smallest_irreducible(p, k) };

        let mut inner = Inner { p, k, q, modulus, inv: Vec::new(), neg: Vec::new(), backend: Backend::Generic };
        if k == 1 {
            inner.backend = Backend::Prime;
        }
        inner.neg = (0..q).map(|a| neg_digits(&inner, a)).collect();
        if k > 1 && q <= TABLE_LIMIT {
            let mut add = vec![0u16; (q * q) as usize];
            let mut mul = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    add[(a * q + b) as usize] = add_digits(&inner, a, b) as u16;
                    mul[(a * q + b) as usize] = mul_poly_basis(&inner, a, b) as u16;
                }
            }
            inner.backend = Backend::Tables { add, mul };
        }
        let mut field = FieldSpec(Arc::new(inner));
        let inv = field.build_inverses();
        Arc::get_mut(&mut field.0).expect("fresh field").inv = inv;
        Ok(field)
    }

    /// Builds the field of order `q`, which must be a prime power.
    pub fn from_order(q: u64) -> Result<Self> {
        let (p, k) = prime_power(q)?;
        Self::new(p as u64, k)
    }

    fn build_inverses(&self) -> Vec<u32> {
        let q = self.q();
        (0..q).map(|a| if a == 0 { 0 } else { self.pow(FieldElement(a), q as u64 - 2).0 }).collect()
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn k(&self) -> u32 {
        self.0.k
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Ascending prime-field coefficients of the defining polynomial (empty for k = 1).
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn is_odd(&self) -> bool {
        self.0.p != 2
    }

    pub fn element(&self, value: u32) -> Result<FieldElement> {
        if value >= self.q() {
            return Err(Error::BadCoefficient { value: value as u64, q: self.q() });
        }
        Ok(FieldElement(value))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q()).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let inner = &*self.0;
        match &inner.backend {
            Backend::Prime => {
                let s = a.0 + b.0;
                FieldElement(if s >= inner.p { s - inner.p } else { s })
            }
            Backend::Tables { add, .. } => FieldElement(add[(a.0 * inner.q + b.0) as usize] as u32),
            Backend::Generic => FieldElement(add_digits(inner, a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.0.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let inner = &*self.0;
        match &inner.backend {
            Backend::Prime => FieldElement(a.0 * b.0 % inner.p),
            Backend::Tables { mul, .. } => FieldElement(mul[(a.0 * inner.q + b.0) as usize] as u32),
            Backend::Generic => FieldElement(mul_poly_basis(inner, a.0, b.0)),
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldElement(self.0.inv[a.0 as usize]))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

fn digits(p: u32, k: u32, mut v: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(k as usize);
    for _ in 0..k {
        out.push(v % p);
        v /= p;
    }
    out
}

fn undigits(p: u32, ds: &[u32]) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn add_digits(inner: &Inner, a: u32, b: u32) -> u32 {
    let (p, k) = (inner.p, inner.k);
    let da = digits(p, k, a);
    let db = digits(p, k, b);
    let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
    undigits(p, &sum)
}

fn neg_digits(inner: &Inner, a: u32) -> u32 {
    let p = inner.p;
    let d: Vec<u32> = digits(p, inner.k, a).iter().map(|&x| (p - x) % p).collect();
    undigits(p, &d)
}

fn mul_poly_basis(inner: &Inner, a: u32, b: u32) -> u32 {
    let (p, k) = (inner.p, inner.k);
    if k == 1 {
        return a * b % p;
    }
    let da = digits(p, k, a);
    let db = digits(p, k, b);
    let mut prod = vec![0u32; 2 * k as usize - 1];
    for (i, x) in da.iter().enumerate() {
        for (j, y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    let m = &inner.modulus;
    let k = k as usize;
    for top in (k..prod.len()).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        for (i, &mc) in m.iter().enumerate().take(k) {
            let pos = top - k + i;
            prod[pos] = (prod[pos] + (p - c) * mc % p) % p;
        }
        prod[top] = 0;
    }
    undigits(p, &prod[..k])
}

/// Remainder of `f` modulo monic `g` over F_p, both ascending coefficient vectors.
fn rem_mod_p(p: u32, f: &[u32], g: &[u32]) -> Vec<u32> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        if c != 0 {
            for (i, &gc) in g.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - c) * gc % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn irreducible_mod_p(p: u32, f: &[u32]) -> bool {
    let deg = f.len() as u32 - 1;
    for d in 1..=deg / 2 {
        let count = p.pow(d);
        for idx in 0..count {
            let mut g = digits(p, d, idx);
            g.push(1);
            if rem_mod_p(p, f, &g).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    (0..p.pow(k))
        .map(|idx| {
            let mut f = digits(p, k, idx);
            f.push(1);
            f
        })
        .find(|f| irreducible_mod_p(p, f))
        .expect("an irreducible polynomial of every degree exists")
}
