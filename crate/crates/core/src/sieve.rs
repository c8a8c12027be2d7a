//! Smallest-prime-factor sieve over monic polynomials and the arithmetic
//! function tables derived from it.
//!
//! Degree-m tables are flat arrays indexed by [`MonicIndex::idx`]. For each degree
//! m the sieve marks every product `p * g` with `p` irreducible of degree at most
//! `m / 2`, visiting irreducibles in (degree, index) order and keeping the first
//! mark, so each entry ends up holding the smallest irreducible factor. Entries
//! left unmarked are irreducible.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldSpec};
use crate::polyring::{pow, MonicIndex, Poly};

pub mod cache;

/// SPF entry of an irreducible polynomial.
pub const SPF_IRREDUCIBLE: u64 = u64::MAX;
/// SPF entry of the constant polynomial 1.
pub const SPF_UNIT: u64 = u64::MAX - 1;

/// Packs `(degree, idx)` of an irreducible factor into one SPF entry.
pub fn spf_code(degree: u32, idx: u64) -> u64 {
    ((degree as u64) << 48) | idx
}

pub fn spf_decode(code: u64) -> Option<MonicIndex> {
    if code >= SPF_UNIT {
        return None;
    }
    Some(MonicIndex { n: (code >> 48) as u32, idx: code & ((1 << 48) - 1) })
}

/// Default memory cap for sieve construction.
pub const DEFAULT_BUDGET: u64 = 2 << 30;

/// Hard cap on the bytes a sieve may allocate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

/// Arithmetic function selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArithFn {
    Lambda,
    Mu,
    Divisor,
    Spf,
}

impl ArithFn {
    pub fn id(self) -> u8 {
        match self {
            ArithFn::Lambda => 0,
            ArithFn::Mu => 1,
            ArithFn::Divisor => 2,
            ArithFn::Spf => 3,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        [ArithFn::Lambda, ArithFn::Mu, ArithFn::Divisor, ArithFn::Spf].into_iter().find(|f| f.id() == id)
    }

    /// Bytes per table entry.
    pub fn width(self) -> u8 {
        match self {
            ArithFn::Lambda | ArithFn::Mu => 1,
            ArithFn::Divisor => 4,
            ArithFn::Spf => 8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ArithFn::Lambda => "lambda",
            ArithFn::Mu => "mu",
            ArithFn::Divisor => "divisor",
            ArithFn::Spf => "spf",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lambda" | "l" | "vonmangoldt" => Some(ArithFn::Lambda),
            "mu" | "mobius" | "moebius" => Some(ArithFn::Mu),
            "divisor" | "d" => Some(ArithFn::Divisor),
            "spf" => Some(ArithFn::Spf),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TableValues {
    Lambda(Arc<[u8]>),
    Mu(Arc<[i8]>),
    Divisor(Arc<[u32]>),
    Spf(Arc<[u64]>),
}

/// Values of one arithmetic function on all of M_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArithTable {
    field: FieldSpec,
    n: u32,
    values: TableValues,
}

impl ArithTable {
    pub fn new(field: &FieldSpec, n: u32, values: TableValues) -> Self {
        ArithTable { field: field.clone(), n, values }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn func(&self) -> ArithFn {
        match self.values {
            TableValues::Lambda(_) => ArithFn::Lambda,
            TableValues::Mu(_) => ArithFn::Mu,
            TableValues::Divisor(_) => ArithFn::Divisor,
            TableValues::Spf(_) => ArithFn::Spf,
        }
    }

    pub fn values(&self) -> &TableValues {
        &self.values
    }

    pub fn len(&self) -> usize {
        match &self.values {
            TableValues::Lambda(v) => v.len(),
            TableValues::Mu(v) => v.len(),
            TableValues::Divisor(v) => v.len(),
            TableValues::Spf(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Value at `idx` as a signed integer; SPF entries are returned raw.
    pub fn get(&self, idx: u64) -> i64 {
        let i = idx as usize;
        match &self.values {
            TableValues::Lambda(v) => v[i] as i64,
            TableValues::Mu(v) => v[i] as i64,
            TableValues::Divisor(v) => v[i] as i64,
            TableValues::Spf(v) => v[i] as i64,
        }
    }

    /// Little-endian payload bytes in the cache layout.
    pub fn payload_bytes(&self) -> Vec<u8> {
        match &self.values {
            TableValues::Lambda(v) => v.to_vec(),
            TableValues::Mu(v) => v.iter().map(|&x| x as u8).collect(),
            TableValues::Divisor(v) => v.iter().flat_map(|x| x.to_le_bytes()).collect(),
            TableValues::Spf(v) => v.iter().flat_map(|x| x.to_le_bytes()).collect(),
        }
    }
}

/// Exact sums of a table and of its squares.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableSums {
    pub sum: i128,
    pub sum_sq: i128,
}

pub fn table_sums(table: &ArithTable) -> TableSums {
    fn fold<T: Copy + Into<i64> + Sync>(v: &[T]) -> TableSums {
        let (sum, sum_sq) = v
            .par_chunks(1 << 16)
            .map(|c| {
                c.iter().fold((0i128, 0i128), |(s, s2), &x| {
                    let x: i64 = x.into();
                    (s + x as i128, s2 + (x as i128) * (x as i128))
                })
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        TableSums { sum, sum_sq }
    }
    match table.values() {
        TableValues::Lambda(v) => fold(v),
        TableValues::Mu(v) => fold(v),
        TableValues::Divisor(v) => fold(v),
        TableValues::Spf(_) => TableSums { sum: 0, sum_sq: 0 },
    }
}

/// Monic irreducibles of each degree, as sorted monic indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrreducibleList {
    by_degree: Vec<Vec<u64>>,
}

impl IrreducibleList {
    pub fn max_degree(&self) -> u32 {
        self.by_degree.len() as u32 - 1
    }

    pub fn of_degree(&self, d: u32) -> &[u64] {
        &self.by_degree[d as usize]
    }

    pub fn count(&self, d: u32) -> u64 {
        self.by_degree[d as usize].len() as u64
    }
}

/// Integer Möbius function.
pub fn mobius_z(mut n: u64) -> i64 {
    let mut result = 1i64;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Number of monic irreducibles of degree `d` over F_q by the necklace formula.
pub fn irreducible_count_formula(q: u32, d: u32) -> u64 {
    assert!(d >= 1);
    let total: i128 = (1..=d)
        .filter(|e| d.is_multiple_of(*e))
        .map(|e| mobius_z(e as u64) as i128 * (q as i128).pow(d / e))
        .sum();
    (total / d as i128) as u64
}

/// Bytes a sieve up to degree `n` will allocate, including derived tables.
pub fn sieve_bytes(q: u32, n: u32) -> Option<u64> {
    let per_entry = 8 + 1 + 1 + 4u64;
    let mut total = 0u64;
    for m in 0..=n {
        total = total.checked_add((q as u64).checked_pow(m)?.checked_mul(per_entry)?)?;
    }
    Some(total)
}

fn check_budget(field: &FieldSpec, n: u32, budget: Budget) -> Result<()> {
    match sieve_bytes(field.q(), n) {
        Some(needed) if needed <= budget.0 => Ok(()),
        Some(needed) => Err(Error::BudgetExceeded { needed, budget: budget.0 }),
        None => Err(Error::BudgetExceeded { needed: u64::MAX, budget: budget.0 }),
    }
}

/// SPF tables for every degree `0..=max_degree`.
#[derive(Clone, Debug)]
pub struct Sieve {
    field: FieldSpec,
    spf: Vec<Vec<u64>>,
    irreducibles: IrreducibleList,
}

impl Sieve {
    pub fn build(field: &FieldSpec, n: u32, budget: Budget) -> Result<Self> {
        check_budget(field, n, budget)?;
        let q = field.q();
        let mut spf: Vec<Vec<u64>> = vec![vec![SPF_UNIT]];
        let mut irreducibles: Vec<Vec<u64>> = vec![Vec::new()];
        for m in 1..=n {
            let mut table = vec![SPF_IRREDUCIBLE; pow(q, m) as usize];
            for d in 1..=m / 2 {
                let mut marker = MultipleEnumerator::new(field, d, m - d);
                for &pidx in &irreducibles[d as usize] {
                    let code = spf_code(d, pidx);
                    marker.for_each(pidx, |idx| {
                        let slot = &mut table[idx as usize];
                        if *slot == SPF_IRREDUCIBLE {
                            *slot = code;
                        }
                    });
                }
            }
            let irr: Vec<u64> =
                table.iter().enumerate().filter(|(_, &c)| c == SPF_IRREDUCIBLE).map(|(i, _)| i as u64).collect();
            irreducibles.push(irr);
            spf.push(table);
        }
        Ok(Sieve { field: field.clone(), spf, irreducibles: IrreducibleList { by_degree: irreducibles } })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn max_degree(&self) -> u32 {
        self.spf.len() as u32 - 1
    }

    pub fn spf(&self, m: u32) -> &[u64] {
        &self.spf[m as usize]
    }

    pub fn irreducibles(&self) -> &IrreducibleList {
        &self.irreducibles
    }

    /// Full factorization `[(irreducible, exponent)]` by repeated SPF division,
    /// factors in increasing (degree, index) order.
    pub fn factor(&self, m: u32, idx: u64) -> Vec<(MonicIndex, u32)> {
        let mut out: Vec<(MonicIndex, u32)> = Vec::new();
        let mut div = Divider::new(&self.field, m);
        let (mut m, mut idx) = (m, idx);
        while m > 0 {
            let p = match spf_decode(self.spf[m as usize][idx as usize]) {
                Some(p) => p,
                None => MonicIndex { n: m, idx },
            };
            match out.last_mut() {
                Some((last, e)) if *last == p => *e += 1,
                _ => out.push((p, 1)),
            }
            idx = div.quotient(m, idx, p);
            m -= p.n;
        }
        out
    }

    /// Derives Λ, μ and d for every degree up to the sieve's maximum.
    pub fn derive(&self) -> TableSet {
        let mut lambda: Vec<Arc<[u8]>> = vec![Arc::from(vec![0u8])];
        let mut mu: Vec<Arc<[i8]>> = vec![Arc::from(vec![1i8])];
        let mut divisor: Vec<Arc<[u32]>> = vec![Arc::from(vec![1u32])];
        for m in 1..=self.max_degree() {
            let size = self.spf[m as usize].len();
            let mut lam = vec![0u8; size];
            let mut mo = vec![0i8; size];
            let mut dv = vec![0u32; size];
            const CHUNK: usize = 1 << 14;
            lam.par_chunks_mut(CHUNK)
                .zip(mo.par_chunks_mut(CHUNK))
                .zip(dv.par_chunks_mut(CHUNK))
                .enumerate()
                .for_each(|(chunk, ((lam, mo), dv))| {
                    let mut div = Divider::new(&self.field, m);
                    let base = chunk * CHUNK;
                    for i in 0..lam.len() {
                        let (l, u, d) = self.local_factor(m, (base + i) as u64, &mut div, &mu, &divisor);
                        lam[i] = l;
                        mo[i] = u;
                        dv[i] = d;
                    }
                });
            lambda.push(Arc::from(lam));
            mu.push(Arc::from(mo));
            divisor.push(Arc::from(dv));
        }
        TableSet { field: self.field.clone(), lambda, mu, divisor, spf: self.spf.iter().map(|v| Arc::from(v.as_slice())).collect() }
    }

    /// Strips the smallest prime factor p completely, `f = p^e * rest`, and
    /// reads μ(rest), d(rest) from the lower-degree tables.
    fn local_factor(&self, m: u32, idx: u64, div: &mut Divider, mu: &[Arc<[i8]>], divisor: &[Arc<[u32]>]) -> (u8, i8, u32) {
        let code = self.spf[m as usize][idx as usize];
        let Some(p) = spf_decode(code) else {
            return (m as u8, -1, 2);
        };
        let mut e = 1u32;
        let mut rest_m = m - p.n;
        let mut rest = div.quotient(m, idx, p);
        loop {
            if rest_m == p.n && rest == p.idx {
                e += 1;
                rest_m = 0;
                rest = 0;
                break;
            }
            if rest_m > p.n && self.spf[rest_m as usize][rest as usize] == code {
                rest = div.quotient(rest_m, rest, p);
                rest_m -= p.n;
                e += 1;
            } else {
                break;
            }
        }
        let lam = if rest_m == 0 { p.n as u8 } else { 0 };
        let mo = if e >= 2 { 0 } else { -mu[rest_m as usize][rest as usize] };
        let d = (e + 1) * divisor[rest_m as usize][rest as usize];
        (lam, mo, d)
    }

    /// Λ on M_m built by marking every prime power `p^(m/d)` directly.
    pub fn lambda_by_prime_powers(&self, m: u32) -> Vec<u8> {
        let mut out = vec![0u8; pow(self.field.q(), m) as usize];
        for d in (1..=m).filter(|d| m.is_multiple_of(*d)) {
            for &pidx in self.irreducibles.of_degree(d) {
                let p = MonicIndex { n: d, idx: pidx }.decode(&self.field);
                let power = p.pow(m / d).encode().expect("power of monic is monic");
                out[power.idx as usize] = d as u8;
            }
        }
        out
    }
}

/// Derived tables for every degree up to the sieve's maximum.
#[derive(Clone, Debug)]
pub struct TableSet {
    field: FieldSpec,
    lambda: Vec<Arc<[u8]>>,
    mu: Vec<Arc<[i8]>>,
    divisor: Vec<Arc<[u32]>>,
    spf: Vec<Arc<[u64]>>,
}

impl TableSet {
    pub fn max_degree(&self) -> u32 {
        self.lambda.len() as u32 - 1
    }

    pub fn table(&self, m: u32, func: ArithFn) -> ArithTable {
        let m_ = m as usize;
        let values = match func {
            ArithFn::Lambda => TableValues::Lambda(self.lambda[m_].clone()),
            ArithFn::Mu => TableValues::Mu(self.mu[m_].clone()),
            ArithFn::Divisor => TableValues::Divisor(self.divisor[m_].clone()),
            ArithFn::Spf => TableValues::Spf(self.spf[m_].clone()),
        };
        ArithTable::new(&self.field, m, values)
    }
}

pub fn build_irreducibles(field: &FieldSpec, n: u32, budget: Budget) -> Result<IrreducibleList> {
    Ok(Sieve::build(field, n, budget)?.irreducibles)
}

/// One table on M_n.
pub fn build_table(field: &FieldSpec, n: u32, func: ArithFn, budget: Budget) -> Result<ArithTable> {
    let sieve = Sieve::build(field, n, budget)?;
    if func == ArithFn::Spf {
        return Ok(ArithTable::new(field, n, TableValues::Spf(Arc::from(sieve.spf(n)))));
    }
    Ok(sieve.derive().table(n, func))
}

/// Enumerates the monic indices of `p * g` for all `g` in M_e.
///
/// Walks `g = T^e + r` in index order like an odometer; every digit change of
/// `r` by `delta` at position `i` adds `delta * p * T^i` to the product, so each
/// step costs O(deg p) instead of a full multiplication.
struct MultipleEnumerator {
    field: FieldSpec,
    d: u32,
    e: u32,
    q: u32,
    powers: Vec<i64>,
    p: Vec<FieldElement>,
    prod: Vec<FieldElement>,
    r: Vec<u32>,
}

impl MultipleEnumerator {
    fn new(field: &FieldSpec, d: u32, e: u32) -> Self {
        let m = d + e;
        let q = field.q();
        let powers = (0..=m).map(|i| pow(q, i) as i64).collect();
        MultipleEnumerator {
            field: field.clone(),
            d,
            e,
            q,
            powers,
            p: vec![FieldElement::ZERO; d as usize + 1],
            prod: vec![FieldElement::ZERO; m as usize + 1],
            r: vec![0; e as usize],
        }
    }

    fn for_each(&mut self, pidx: u64, mut visit: impl FnMut(u64)) {
        let (d, e, q) = (self.d as usize, self.e as usize, self.q as u64);
        let mut rest = pidx;
        for t in 0..d {
            self.p[t] = FieldElement((rest % q) as u32);
            rest /= q;
        }
        self.p[d] = FieldElement::ONE;
        self.prod.iter_mut().for_each(|c| *c = FieldElement::ZERO);
        self.r.iter_mut().for_each(|c| *c = 0);
        let mut idx: i64 = 0;
        for t in 0..=d {
            self.prod[e + t] = self.p[t];
            if e + t < d + e {
                idx += self.p[t].value() as i64 * self.powers[e + t];
            }
        }
        let total = pow(self.q, self.e);
        for step in 0..total {
            visit(idx as u64);
            if step + 1 == total {
                break;
            }
            let mut i = 0usize;
            loop {
                let old = self.r[i];
                let new = if old + 1 == self.q { 0 } else { old + 1 };
                self.r[i] = new;
                let delta = self.field.sub(FieldElement(new), FieldElement(old));
                for t in 0..=d {
                    let pos = i + t;
                    let before = self.prod[pos];
                    let after = self.field.add(before, self.field.mul(delta, self.p[t]));
                    self.prod[pos] = after;
                    idx += (after.value() as i64 - before.value() as i64) * self.powers[pos];
                }
                if new != 0 {
                    break;
                }
                i += 1;
            }
        }
    }
}

/// Exact division of monic polynomials given by monic index.
struct Divider {
    field: FieldSpec,
    q: u64,
    num: Vec<FieldElement>,
    den: Vec<FieldElement>,
}

impl Divider {
    fn new(field: &FieldSpec, max_degree: u32) -> Self {
        let cap = max_degree as usize + 1;
        Divider { field: field.clone(), q: field.q() as u64, num: Vec::with_capacity(cap), den: Vec::with_capacity(cap) }
    }

    fn unpack(q: u64, n: u32, mut idx: u64, out: &mut Vec<FieldElement>) {
        out.clear();
        for _ in 0..n {
            out.push(FieldElement((idx % q) as u32));
            idx /= q;
        }
        out.push(FieldElement::ONE);
    }

    /// Monic index of `f / p`, assuming `p | f`.
    fn quotient(&mut self, m: u32, idx: u64, p: MonicIndex) -> u64 {
        Self::unpack(self.q, m, idx, &mut self.num);
        Self::unpack(self.q, p.n, p.idx, &mut self.den);
        let (m, d) = (m as usize, p.n as usize);
        let f = &self.field;
        let mut quot_idx = 0u64;
        for top in (d..=m).rev() {
            let c = self.num[top];
            let shift = top - d;
            if shift < m - d {
                quot_idx = quot_idx * self.q + c.value() as u64;
            }
            if c.is_zero() {
                continue;
            }
            for (i, &pc) in self.den.iter().enumerate() {
                self.num[shift + i] = f.sub(self.num[shift + i], f.mul(c, pc));
            }
        }
        debug_assert!(self.num[..d].iter().all(|c| c.is_zero()), "inexact division");
        quot_idx
    }
}

/// Decodes an irreducible factor list back into polynomials.
pub fn factors_as_polys(field: &FieldSpec, factors: &[(MonicIndex, u32)]) -> Vec<(Poly, u32)> {
    factors.iter().map(|&(m, e)| (m.decode(field), e)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::iter_monic;

    fn f3() -> FieldSpec {
        FieldSpec::new(3, 1).unwrap()
    }

    fn idx(f: &FieldSpec, lit: &str) -> u64 {
        Poly::parse(f, lit).unwrap().encode().unwrap().idx
    }

    #[test]
    fn irreducible_examples() {
        let f = f3();
        let irr = build_irreducibles(&f, 3, Budget::default()).unwrap();
        assert_eq!(irr.of_degree(1), &[0, 1, 2]);
        let quad: Vec<u64> = ["1,0,1", "2,1,1", "2,2,1"].iter().map(|l| idx(&f, l)).collect();
        assert_eq!(irr.of_degree(2), quad.as_slice());
        assert_eq!(irr.count(3), 8);
    }

    #[test]
    fn counts_match_necklace_formula() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let f = FieldSpec::from_order(q).unwrap();
            let n = match q {
                2 => 12,
                3 | 4 => 7,
                _ => 5,
            };
            let irr = build_irreducibles(&f, n, Budget::default()).unwrap();
            for d in 1..=n {
                assert_eq!(irr.count(d), irreducible_count_formula(f.q(), d), "q={q} d={d}");
            }
        }
    }

    #[test]
    fn degree_two_examples() {
        let f = f3();
        let set = Sieve::build(&f, 2, Budget::default()).unwrap().derive();
        let lam = set.table(2, ArithFn::Lambda);
        assert_eq!(lam.get(idx(&f, "1,0,1")), 2);
        assert_eq!(lam.get(idx(&f, "1,1,1")), 1);
        assert_eq!(lam.get(idx(&f, "2,0,1")), 0);
        let lams: Vec<i64> = (0..9).map(|i| lam.get(i)).collect();
        assert_eq!(lams, vec![1, 2, 0, 0, 1, 2, 0, 1, 2]);
        // the same values listed with c_1 as the fast digit
        let by_c1: Vec<i64> = (0..9).map(|i| lam.get((i % 3) * 3 + i / 3)).collect();
        assert_eq!(by_c1, vec![1, 0, 0, 2, 1, 1, 0, 2, 2]);
        assert_eq!(set.table(2, ArithFn::Divisor).get(idx(&f, "0,0,1")), 3);
        let mu = set.table(2, ArithFn::Mu);
        assert_eq!(mu.get(idx(&f, "2,0,1")), 1);
        assert_eq!(mu.get(idx(&f, "0,0,1")), 0);
        assert_eq!(set.table(1, ArithFn::Mu).get(0), -1);
    }

    #[test]
    fn sums_q3_n2() {
        let f = f3();
        let set = Sieve::build(&f, 2, Budget::default()).unwrap().derive();
        assert_eq!(table_sums(&set.table(2, ArithFn::Lambda)).sum, 9);
        assert_eq!(table_sums(&set.table(2, ArithFn::Divisor)), TableSums { sum: 27, sum_sq: 87 });
        assert_eq!(table_sums(&set.table(2, ArithFn::Mu)), TableSums { sum: 0, sum_sq: 6 });
    }

    #[test]
    fn spf_and_direct_lambda_agree() {
        for q in [2u64, 3, 4, 5, 9] {
            let f = FieldSpec::from_order(q).unwrap();
            let n = if q <= 4 { 7 } else { 5 };
            let sieve = Sieve::build(&f, n, Budget::default()).unwrap();
            let set = sieve.derive();
            for m in 1..=n {
                let TableValues::Lambda(v) = set.table(m, ArithFn::Lambda).values().clone() else { unreachable!() };
                assert_eq!(&v[..], sieve.lambda_by_prime_powers(m).as_slice(), "q={q} m={m}");
            }
        }
    }

    #[test]
    fn factorization_reconstructs() {
        let f = FieldSpec::new(2, 2).unwrap();
        let sieve = Sieve::build(&f, 5, Budget::default()).unwrap();
        for m in iter_monic(&f, 5) {
            let mut prod = Poly::one(&f);
            for (p, e) in factors_as_polys(&f, &sieve.factor(5, m.idx)) {
                prod = prod.mul(&p.pow(e)).unwrap();
            }
            assert_eq!(prod, m.decode(&f));
        }
    }

    #[test]
    fn multiplicativity_on_coprime_pairs() {
        let f = FieldSpec::new(5, 1).unwrap();
        let set = Sieve::build(&f, 5, Budget::default()).unwrap().derive();
        let mut checked = 0;
        for a in iter_monic(&f, 2) {
            for b in iter_monic(&f, 3).step_by(7) {
                let (pa, pb) = (a.decode(&f), b.decode(&f));
                if pa.gcd(&pb).unwrap() != Poly::one(&f) {
                    continue;
                }
                let ab = pa.mul(&pb).unwrap().encode().unwrap();
                let d = |m: MonicIndex, func| set.table(m.n, func).get(m.idx);
                assert_eq!(d(ab, ArithFn::Divisor), d(a, ArithFn::Divisor) * d(b, ArithFn::Divisor));
                assert_eq!(d(ab, ArithFn::Mu), d(a, ArithFn::Mu) * d(b, ArithFn::Mu));
                checked += 1;
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn budget_is_enforced() {
        let f = FieldSpec::new(3, 1).unwrap();
        let err = build_table(&f, 10, ArithFn::Lambda, Budget(1000)).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { budget: 1000, .. }));
    }

    #[test]
    fn mobius_z_values() {
        let got: Vec<i64> = (1..=12).map(mobius_z).collect();
        assert_eq!(got, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
    }
}
