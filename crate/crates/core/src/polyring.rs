//! Dense polynomials over F_q, the monic index bijection, and the enumerations
//! every statistic iterates over.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldSpec};

/// Degree of a polynomial. The zero polynomial has degree `NegInf`, which
/// compares below every finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInf,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::NegInf => None,
            Degree::Finite(d) => Some(d),
        }
    }

    /// Degree as a signed integer for error messages, -1 for zero.
    pub fn as_i64(self) -> i64 {
        self.finite().map_or(-1, i64::from)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInf => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// `q^n`, or `None` on u64 overflow.
pub fn checked_pow(q: u32, n: u32) -> Option<u64> {
    (q as u64).checked_pow(n)
}

/// `q^n`, panicking on overflow. Only for sizes already validated against a budget.
pub fn pow(q: u32, n: u32) -> u64 {
    checked_pow(q, n).expect("q^n overflows u64")
}

/// A polynomial over F_q with ascending coefficients and no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: FieldSpec,
    coeffs: Vec<FieldElement>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly(q={}, {})", self.field.q(), self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c.value()) {
                (0, v) => write!(f, "{v}")?,
                (1, 1) => write!(f, "T")?,
                (1, v) => write!(f, "{v}T")?,
                (i, 1) => write!(f, "T^{i}")?,
                (i, v) => write!(f, "{v}T^{i}")?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn new(field: &FieldSpec, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { field: field.clone(), coeffs }
    }

    /// Builds a polynomial from raw encodings, validating each against the field.
    pub fn from_values(field: &FieldSpec, values: &[u32]) -> Result<Self> {
        let coeffs = values.iter().map(|&v| field.element(v)).collect::<Result<Vec<_>>>()?;
        Ok(Self::new(field, coeffs))
    }

    pub fn zero(field: &FieldSpec) -> Self {
        Poly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &FieldSpec) -> Self {
        Self::constant(field, FieldElement::ONE)
    }

    pub fn constant(field: &FieldSpec, c: FieldElement) -> Self {
        Self::new(field, vec![c])
    }

    /// `c T^deg`.
    pub fn monomial(field: &FieldSpec, c: FieldElement, deg: u32) -> Self {
        let mut coeffs = vec![FieldElement::ZERO; deg as usize + 1];
        coeffs[deg as usize] = c;
        Self::new(field, coeffs)
    }

    /// The variable T.
    pub fn t(field: &FieldSpec) -> Self {
        Self::monomial(field, FieldElement::ONE, 1)
    }

    /// Parses the ascending literal syntax: `"2,1"` is T+2, `"1,0,1"` is T^2+1.
    pub fn parse(field: &FieldSpec, literal: &str) -> Result<Self> {
        let cleaned: String = literal.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::BadLiteral(literal.to_string()));
        }
        let mut values = Vec::new();
        for part in cleaned.split(',') {
            let v: u64 = part.parse().map_err(|_| Error::BadLiteral(literal.to_string()))?;
            if v >= field.q() as u64 {
                return Err(Error::BadCoefficient { value: v, q: field.q() });
            }
            values.push(v as u32);
        }
        if values.len() > 1 && values.last() == Some(&0) {
            return Err(Error::BadLiteral(literal.to_string()));
        }
        Self::from_values(field, &values)
    }

    /// The literal form accepted by [`Poly::parse`].
    pub fn to_literal(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        self.coeffs.iter().map(|c| c.value().to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Coefficient of `T^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInf,
            n => Degree::Finite(n as u32 - 1),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<FieldElement> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(FieldElement::ONE)
    }

    /// `||f|| = q^deg f`, `||0|| = 0`.
    pub fn norm(&self) -> BigUint {
        match self.degree() {
            Degree::NegInf => BigUint::from(0u32),
            Degree::Finite(d) => BigUint::from(self.field.q()).pow(d),
        }
    }

    fn check(&self, other: &Poly) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        let f = &self.field;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        Ok(Poly::new(f, coeffs))
    }

    pub fn neg(&self) -> Poly {
        let coeffs = self.coeffs.iter().map(|&c| self.field.neg(c)).collect();
        Poly::new(&self.field, coeffs)
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: FieldElement) -> Poly {
        let coeffs = self.coeffs.iter().map(|&x| self.field.mul(x, c)).collect();
        Poly::new(&self.field, coeffs)
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(&self.field));
        }
        let f = &self.field;
        let mut out = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Ok(Poly::new(f, out))
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(&self.field);
        for _ in 0..e {
            acc = acc.mul(self).expect("same field");
        }
        acc
    }

    /// Euclidean division: `self = quot * g + rem` with `deg rem < deg g`.
    pub fn divmod(&self, g: &Poly) -> Result<(Poly, Poly)> {
        self.check(g)?;
        let lead = g.leading().ok_or(Error::DivisionByZero)?;
        let f = &self.field;
        let lead_inv = f.inv(lead)?;
        let dg = g.coeffs.len() - 1;
        if self.coeffs.len() <= dg {
            return Ok((Poly::zero(f), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![FieldElement::ZERO; rem.len() - dg];
        for top in (dg..rem.len()).rev() {
            let c = f.mul(rem[top], lead_inv);
            if c.is_zero() {
                continue;
            }
            let shift = top - dg;
            quot[shift] = c;
            for (i, &gc) in g.coeffs.iter().enumerate() {
                rem[shift + i] = f.sub(rem[shift + i], f.mul(c, gc));
            }
        }
        rem.truncate(dg);
        let (quot, rem) = (Poly::new(f, quot), Poly::new(f, rem));
        #[cfg(test)]
        {
            let back = quot.mul(g).unwrap().add(&rem).unwrap();
            assert_eq!(&back, self, "divmod invariant");
        }
        Ok((quot, rem))
    }

    pub fn rem(&self, g: &Poly) -> Result<Poly> {
        Ok(self.divmod(g)?.1)
    }

    /// Divides by the leading coefficient. Zero stays zero.
    pub fn make_monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some(c) => self.scale(self.field.inv(c).expect("nonzero leading coefficient")),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        if self.is_zero() && other.is_zero() {
            return Err(Error::BothZero);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.make_monic())
    }

    /// Monic index of a monic polynomial.
    pub fn encode(&self) -> Result<MonicIndex> {
        if !self.is_monic() {
            return Err(Error::NotMonic);
        }
        let n = self.coeffs.len() as u32 - 1;
        let q = self.field.q() as u64;
        let idx = self.coeffs[..n as usize].iter().rev().fold(0u64, |acc, c| acc * q + c.value() as u64);
        Ok(MonicIndex { n, idx })
    }

    /// Index of an arbitrary polynomial of degree `<= len-1` among all such
    /// polynomials (base-q digits of its coefficients).
    pub fn dense_index(&self) -> u64 {
        let q = self.field.q() as u64;
        self.coeffs.iter().rev().fold(0u64, |acc, c| acc * q + c.value() as u64)
    }

    /// Inverse of [`Poly::dense_index`] for polynomials with at most `len` coefficients.
    pub fn from_dense_index(field: &FieldSpec, len: u32, mut idx: u64) -> Poly {
        let q = field.q() as u64;
        let mut coeffs = Vec::with_capacity(len as usize);
        for _ in 0..len {
            coeffs.push(FieldElement((idx % q) as u32));
            idx /= q;
        }
        Poly::new(field, coeffs)
    }
}

/// A monic polynomial of degree `n` identified by the base-q digits of its
/// lower coefficients: `idx = sum c_i q^i` for `i < n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonicIndex {
    pub n: u32,
    pub idx: u64,
}

impl MonicIndex {
    pub fn decode(self, field: &FieldSpec) -> Poly {
        let q = field.q() as u64;
        let mut coeffs = Vec::with_capacity(self.n as usize + 1);
        let mut rest = self.idx;
        for _ in 0..self.n {
            coeffs.push(FieldElement((rest % q) as u32));
            rest /= q;
        }
        coeffs.push(FieldElement::ONE);
        Poly::new(field, coeffs)
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree first, then coefficients from the top down.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

/// All monic polynomials of degree `n`, in increasing index order.
pub fn iter_monic(field: &FieldSpec, n: u32) -> impl Iterator<Item = MonicIndex> {
    (0..pow(field.q(), n)).map(move |idx| MonicIndex { n, idx })
}

/// All polynomials of degree at most `h`, zero included (`q^(h+1)` of them).
pub fn iter_p_le(field: &FieldSpec, h: u32) -> impl Iterator<Item = Poly> + '_ {
    (0..pow(field.q(), h + 1)).map(move |i| Poly::from_dense_index(field, h + 1, i))
}

/// The short interval `I(A; h) = A + P_{<=h}`.
pub fn iter_interval(a: &Poly, h: u32) -> Result<impl Iterator<Item = Poly> + '_> {
    match a.degree() {
        Degree::Finite(d) if h < d => {}
        deg => return Err(Error::BadInterval { h, deg: deg.as_i64() }),
    }
    Ok(iter_p_le(a.field(), h).map(move |g| a.add(&g).expect("same field")))
}

/// Digit-level helpers on packed indices. A packed index stores coefficient
/// `c_i` as the i-th base-q digit.
#[derive(Clone, Debug)]
pub struct DigitCodec {
    field: FieldSpec,
    q: u64,
}

impl DigitCodec {
    pub fn new(field: &FieldSpec) -> Self {
        DigitCodec { field: field.clone(), q: field.q() as u64 }
    }

    pub fn unpack(&self, mut idx: u64, out: &mut [u32]) {
        for d in out.iter_mut() {
            *d = (idx % self.q) as u32;
            idx /= self.q;
        }
    }

    pub fn pack(&self, digits: &[u32]) -> u64 {
        digits.iter().rev().fold(0u64, |acc, &d| acc * self.q + d as u64)
    }

    /// Digit-wise field addition of two packed vectors of `len` digits.
    pub fn add(&self, a: u64, b: u64, len: u32) -> u64 {
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..len {
            let s = self.field.add(FieldElement((a % self.q) as u32), FieldElement((b % self.q) as u32));
            out += s.value() as u64 * place;
            place *= self.q;
            a /= self.q;
            b /= self.q;
        }
        out
    }

    /// Permutation `low -> low + shift` on the `len` lowest digits.
    pub fn translation(&self, shift: u64, len: u32) -> Vec<u32> {
        let size = pow(self.q as u32, len);
        assert!(size <= u32::MAX as u64, "translation table too large");
        (0..size).map(|low| self.add(low, shift, len) as u32).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f3() -> FieldSpec {
        FieldSpec::new(3, 1).unwrap()
    }

    fn p(f: &FieldSpec, s: &str) -> Poly {
        Poly::parse(f, s).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let f = f3();
        assert_eq!(p(&f, "1,1").mul(&p(&f, "2,1")).unwrap(), p(&f, "2,0,1"));
        let g = p(&f, "1,2,1");
        assert_eq!(g.add(&Poly::zero(&f)).unwrap(), g);
        let z = p(&f, "1,0,1").sub(&p(&f, "1,0,1")).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.degree(), Degree::NegInf);
        assert_eq!(z.norm(), BigUint::from(0u32));
        assert_eq!(p(&f, "0,0,1").norm(), BigUint::from(9u32));
        assert!(Degree::NegInf < Degree::Finite(0));
    }

    #[test]
    fn divmod_examples() {
        let f = f3();
        let (qt, r) = p(&f, "0,0,1").divmod(&p(&f, "1,1")).unwrap();
        assert_eq!(qt, p(&f, "2,1"));
        assert_eq!(r, p(&f, "1"));
        let g = p(&f, "2,0,1,1");
        assert_eq!(g.divmod(&g).unwrap(), (Poly::one(&f), Poly::zero(&f)));
        let small = p(&f, "1,1");
        assert_eq!(small.divmod(&g).unwrap(), (Poly::zero(&f), small.clone()));
        assert_eq!(g.divmod(&Poly::zero(&f)).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn gcd_examples() {
        let f = f3();
        assert_eq!(p(&f, "2,0,1").gcd(&p(&f, "1,1")).unwrap(), p(&f, "1,1"));
        assert_eq!(p(&f, "1,2").gcd(&Poly::zero(&f)).unwrap(), p(&f, "2,1"));
        assert_eq!(p(&f, "1,0,1").gcd(&p(&f, "0,1")).unwrap(), Poly::one(&f));
        assert_eq!(Poly::zero(&f).gcd(&Poly::zero(&f)).unwrap_err(), Error::BothZero);
    }

    #[test]
    fn field_mismatch() {
        let f = f3();
        let g = FieldSpec::new(5, 1).unwrap();
        assert_eq!(Poly::one(&f).add(&Poly::one(&g)).unwrap_err(), Error::FieldMismatch);
    }

    #[test]
    fn encode_decode() {
        let f = f3();
        assert_eq!(MonicIndex { n: 2, idx: 5 }.decode(&f), p(&f, "2,1,1"));
        assert_eq!(MonicIndex { n: 4, idx: 0 }.decode(&f), Poly::monomial(&f, FieldElement::ONE, 4));
        for n in 0..=3 {
            for m in iter_monic(&f, n) {
                assert_eq!(m.decode(&f).encode().unwrap(), m);
            }
        }
        assert_eq!(p(&f, "1,2").encode().unwrap_err(), Error::NotMonic);
    }

    #[test]
    fn literal_parsing() {
        let f = f3();
        assert_eq!(p(&f, " 2, 1 ").to_literal(), "2,1");
        assert_eq!(p(&f, "0"), Poly::zero(&f));
        assert!(Poly::parse(&f, "1,3").is_err());
        assert!(Poly::parse(&f, "1,0").is_err());
        assert!(Poly::parse(&f, "").is_err());
        assert!(Poly::parse(&f, "a").is_err());
    }

    #[test]
    fn enumerations() {
        let f = f3();
        let a = p(&f, "0,0,1");
        let got: Vec<_> = iter_interval(&a, 0).unwrap().collect();
        assert_eq!(got, vec![p(&f, "0,0,1"), p(&f, "1,0,1"), p(&f, "2,0,1")]);
        let ple: Vec<_> = iter_p_le(&f, 1).collect();
        assert_eq!(ple.len(), 9);
        assert!(ple.contains(&Poly::zero(&f)));
        assert!(matches!(iter_interval(&a, 2), Err(Error::BadInterval { .. })));
        for m in iter_monic(&f, 3) {
            let a = m.decode(&f);
            for h in 0..3 {
                let members: Vec<_> = iter_interval(&a, h).unwrap().collect();
                assert_eq!(members.len() as u64, pow(3, h + 1));
                assert!(members.iter().all(|g| g.is_monic() && g.degree() == Degree::Finite(3)));
            }
        }
    }

    #[test]
    fn ring_axioms_exhaustive_q3_deg2() {
        let f = f3();
        let all: Vec<_> = iter_p_le(&f, 2).collect();
        for a in &all {
            for b in &all {
                assert_eq!(a.add(b).unwrap(), b.add(a).unwrap());
                assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
                for c in all.iter().step_by(2) {
                    assert_eq!(a.mul(&b.add(c).unwrap()).unwrap(), a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap());
                    assert_eq!(a.mul(b).unwrap().mul(c).unwrap(), a.mul(&b.mul(c).unwrap()).unwrap());
                }
            }
        }
    }

    #[test]
    fn interval_membership_partition() {
        // Each f in M_n lies in I(A; h) for exactly q^(h+1) centres A in M_n.
        let f = f3();
        for n in 1..=4 {
            let monics: Vec<_> = iter_monic(&f, n).map(|m| m.decode(&f)).collect();
            for h in 0..n {
                let mut hits = vec![0u64; monics.len()];
                for a in &monics {
                    for g in iter_interval(a, h).unwrap() {
                        hits[g.encode().unwrap().idx as usize] += 1;
                    }
                }
                assert!(hits.iter().all(|&c| c == pow(3, h + 1)), "n={n} h={h}");
            }
        }
    }

    #[test]
    fn translation_matches_poly_addition() {
        let f = FieldSpec::new(3, 2).unwrap();
        let codec = DigitCodec::new(&f);
        let shift = Poly::parse(&f, "4,7").unwrap();
        let table = codec.translation(shift.dense_index(), 2);
        for low in 0..81u64 {
            let g = Poly::from_dense_index(&f, 2, low);
            assert_eq!(table[low as usize] as u64, g.add(&shift).unwrap().dense_index());
        }
    }

    fn arb_poly(q: u32, max_len: usize) -> impl Strategy<Value = Vec<u32>> {
        proptest::collection::vec(0..q, 0..max_len)
    }

    proptest! {
        #[test]
        fn ring_and_division_laws(a in arb_poly(9, 7), b in arb_poly(9, 7), c in arb_poly(9, 5)) {
            let f = FieldSpec::new(3, 2).unwrap();
            let (a, b, c) = (Poly::from_values(&f, &a).unwrap(), Poly::from_values(&f, &b).unwrap(), Poly::from_values(&f, &c).unwrap());
            prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
            prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
            if !b.is_zero() {
                let (qt, r) = a.divmod(&b).unwrap();
                prop_assert!(r.degree() < b.degree());
                prop_assert_eq!(qt.mul(&b).unwrap().add(&r).unwrap(), a.clone());
            }
            if !(a.is_zero() && b.is_zero()) {
                let g = a.gcd(&b).unwrap();
                prop_assert!(g.is_monic());
                prop_assert!(a.rem(&g).unwrap().is_zero());
                prop_assert!(b.rem(&g).unwrap().is_zero());
                prop_assert_eq!(g, b.gcd(&a).unwrap());
            }
        }
    }
}
