//! Correlations, error terms, interval and progression statistics, all exact.
//!
//! Every operation is a fold over index ranges of an immutable [`ArithTable`].
//! Shards are summed in 128-bit integers and combined with [`WideSum`], so the
//! result does not depend on how rayon schedules the shards.
//!
//! Two index facts carry most of the work:
//! - `f + K` with `deg K < n` stays monic of degree n and only changes the low
//!   base-q digits of the monic index, so shifting is a digit translation.
//! - `I(A; h)` is the set of monic f sharing the top `n - h - 1` digits with A,
//!   so interval sums are sums over contiguous index blocks ("fibers").

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldSpec};
use crate::polyring::{pow, Degree, DigitCodec, MonicIndex, Poly};
pub use crate::rational::{big_pow, ExactRational, WideSum};
use crate::sieve::{ArithFn, ArithTable, TableValues};

/// Borrowed table values without the SPF variant.
#[derive(Clone, Copy)]
enum Weights<'a> {
    Lambda(&'a [u8]),
    Mu(&'a [i8]),
    Divisor(&'a [u32]),
}

macro_rules! with_weights {
    ($w:expr, $v:ident => $body:expr) => {
        match $w {
            Weights::Lambda($v) => $body,
            Weights::Mu($v) => $body,
            Weights::Divisor($v) => $body,
        }
    };
}

fn weights(table: &ArithTable) -> Result<Weights<'_>> {
    match table.values() {
        TableValues::Lambda(v) => Ok(Weights::Lambda(v)),
        TableValues::Mu(v) => Ok(Weights::Mu(v)),
        TableValues::Divisor(v) => Ok(Weights::Divisor(v)),
        TableValues::Spf(_) => Err(Error::WrongFunction { expected: "lambda, mu or divisor", found: "spf" }),
    }
}

fn require(table: &ArithTable, func: ArithFn) -> Result<()> {
    if table.func() != func {
        return Err(Error::WrongFunction { expected: func.name(), found: table.func().name() });
    }
    Ok(())
}

fn check_field(table: &ArithTable, p: &Poly) -> Result<()> {
    if table.field() != p.field() {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

/// Main term of the normalized autocorrelation: 1 for Λ, (n+1)^2 for d, 0 for μ.
pub fn main_term(func: ArithFn, n: u32) -> ExactRational {
    match func {
        ArithFn::Lambda => ExactRational::one(),
        ArithFn::Divisor => ExactRational::from_int((n as i64 + 1) * (n as i64 + 1)),
        ArithFn::Mu | ArithFn::Spf => ExactRational::zero(),
    }
}

const SHARD: u64 = 1 << 14;

/// Sums `body(range)` over shards of `0..len`.
fn par_fold<F>(len: u64, shard: u64, body: F) -> BigInt
where
    F: Fn(std::ops::Range<u64>) -> i128 + Sync,
{
    let shards = len.div_ceil(shard);
    (0..shards)
        .into_par_iter()
        .map(|s| {
            let lo = s * shard;
            body(lo..(lo + shard).min(len))
        })
        .fold(WideSum::default, |acc, x| acc.add_i128(x))
        .reduce(WideSum::default, WideSum::merge)
        .into_bigint()
}

/// Translation `idx -> index of (f + K)` on monic indices of degree n.
///
/// The lowest `low_len` digits go through one permutation table; any higher
/// digits of K go through further tables, applied once per block.
struct Translator {
    low_size: u64,
    low_perm: Vec<u32>,
    high: Vec<(u64, u64, Vec<u32>)>,
}

impl Translator {
    fn low_len(q: u32, n: u32) -> u32 {
        let mut len = 1;
        while len < n && pow(q, len + 1) <= 1 << 16 {
            len += 1;
        }
        len.min(n)
    }

    fn new(field: &FieldSpec, shift: &Poly, n: u32) -> Self {
        let q = field.q();
        let codec = DigitCodec::new(field);
        let low_len = Self::low_len(q, n);
        let group = Self::low_len(q, u32::MAX).max(1);
        let digits: Vec<u32> = (0..n as usize).map(|i| shift.coeff(i).value()).collect();
        let low_shift = codec.pack(&digits[..low_len as usize]);
        let low_perm = codec.translation(low_shift, low_len);
        let mut high = Vec::new();
        let mut start = low_len;
        let top = shift.degree().finite().map_or(0, |d| d + 1);
        while start < top {
            let len = group.min(n - start);
            let part = codec.pack(&digits[start as usize..(start + len) as usize]);
            high.push((pow(q, start), pow(q, len), codec.translation(part, len)));
            start += len;
        }
        Translator { low_size: pow(q, low_len), low_perm, high }
    }

    /// Translates a block base (a multiple of `low_size`).
    #[inline]
    fn block(&self, mut base: u64) -> u64 {
        for (place, size, perm) in &self.high {
            let digit = (base / place) % size;
            base = base - digit * place + perm[digit as usize] as u64 * place;
        }
        base
    }

    #[inline]
    fn apply(&self, idx: u64) -> u64 {
        let low = idx % self.low_size;
        self.block(idx - low) + self.low_perm[low as usize] as u64
    }
}

fn validate_shift(table: &ArithTable, shift: &Poly) -> Result<()> {
    check_field(table, shift)?;
    match shift.degree() {
        Degree::NegInf => Err(Error::ZeroShift),
        Degree::Finite(d) if d >= table.n() => Err(Error::DegreeTooLarge { deg: d as i64, bound: table.n() }),
        _ => Ok(()),
    }
}

/// `sum_{f in M_n} α(f) α(f + K)` as an exact integer.
pub fn shift_correlation(table: &ArithTable, shift: &Poly) -> Result<BigInt> {
    validate_shift(table, shift)?;
    let w = weights(table)?;
    let tr = Translator::new(table.field(), shift, table.n());
    let blocks = table.len() as u64 / tr.low_size;
    let size = tr.low_size;
    let shard = (SHARD / size).max(1);
    Ok(with_weights!(w, v => par_fold(blocks, shard, |range| {
        let mut acc = 0i128;
        for b in range {
            let base = b * size;
            let moved = tr.block(base);
            let src = &v[base as usize..(base + size) as usize];
            let mut part = 0i64;
            for (low, &x) in src.iter().enumerate() {
                let x: i64 = x.into();
                if x != 0 {
                    let y: i64 = v[(moved + tr.low_perm[low] as u64) as usize].into();
                    part += x * y;
                }
            }
            acc += part as i128;
        }
        acc
    })))
}

/// `(1/q^n) sum_{f in M_n} α(f) α(f + K)`.
pub fn autocorr(table: &ArithTable, shift: &Poly) -> Result<ExactRational> {
    let s = shift_correlation(table, shift)?;
    Ok(ExactRational::new(s, big_pow(table.field().q(), table.n())))
}

/// E(K,n,q), E_d(J,n,q) or E_μ(J,n,q) depending on the table.
pub fn error_term(table: &ArithTable, shift: &Poly) -> Result<ExactRational> {
    Ok(autocorr(table, shift)? - main_term(table.func(), table.n()))
}

/// Block sums `F[b] = sum_{low < q^level} α(b q^level + low)`.
pub fn fiber_sums(table: &ArithTable, level: u32) -> Result<Vec<i64>> {
    let w = weights(table)?;
    if level > table.n() {
        return Err(Error::DegreeTooLarge { deg: level as i64, bound: table.n() + 1 });
    }
    let size = pow(table.field().q(), level) as usize;
    Ok(with_weights!(w, v => v
        .par_chunks(size)
        .map(|c| c.iter().map(|&x| Into::<i64>::into(x)).sum::<i64>())
        .collect()))
}

/// `sum_{J : deg J = j, lead J = c} sum_{f in M_n} α(f) α(f + J)`.
///
/// Grouping f by its fiber at level j, every J in the class maps the fiber of f
/// onto the fiber whose lowest digit is shifted by c, so the class sum is
/// `sum_b F[b] F[b + c]` over level-j fibers.
pub fn degree_class_correlation(table: &ArithTable, j: u32, lead: FieldElement) -> Result<BigInt> {
    let n = table.n();
    if j >= n {
        return Err(Error::DegreeTooLarge { deg: j as i64, bound: n });
    }
    if lead.is_zero() {
        return Err(Error::ZeroShift);
    }
    let field = table.field();
    let fibers = fiber_sums(table, j)?;
    let q = field.q() as u64;
    Ok(par_fold(fibers.len() as u64, SHARD, |range| {
        let mut acc = 0i128;
        for b in range {
            let digit = b % q;
            let moved = b - digit + field.add(FieldElement(digit as u32), lead).value() as u64;
            acc += fibers[b as usize] as i128 * fibers[moved as usize] as i128;
        }
        acc
    }))
}

/// `sum_{J != 0, deg J <= h} sum_f α(f) α(f + J)`, read off the level-(h+1)
/// fibers: `sum_b F[b]^2 - sum_f α(f)^2`.
pub fn cumulative_shift_correlation(table: &ArithTable, h: u32) -> Result<BigInt> {
    if h >= table.n() {
        return Err(Error::BadInterval { h, deg: table.n() as i64 });
    }
    let fibers = fiber_sums(table, h + 1)?;
    let squares: BigInt = fibers.iter().map(|&x| BigInt::from(x as i128 * x as i128)).sum();
    let own = crate::sieve::table_sums(table).sum_sq;
    Ok(squares - own)
}

/// Sum of error terms over a degree class, in both normalizations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumE {
    /// Sum over monic J of degree k.
    pub monic: ExactRational,
    /// Sum over every nonzero J of degree k.
    pub all_nonzero: ExactRational,
}

/// `S_E(k,n,q) = sum_{K in M_k} E(K,n,q)` (and its divisor / Möbius analogues),
/// together with the sum over all nonzero K of degree k.
pub fn sum_e(table: &ArithTable, k: u32) -> Result<SumE> {
    let field = table.field();
    let (q, n) = (field.q(), table.n());
    if k >= n {
        return Err(Error::DegreeTooLarge { deg: k as i64, bound: n });
    }
    let qn = big_pow(q, n);
    let main = main_term(table.func(), n);
    let monic_raw = degree_class_correlation(table, k, FieldElement::ONE)?;
    let mut all_raw = monic_raw.clone();
    for c in 2..q {
        all_raw += degree_class_correlation(table, k, FieldElement(c))?;
    }
    let count = ExactRational::from_int(big_pow(q, k));
    let monic = ExactRational::new(monic_raw, qn.clone()) - &main * &count;
    let all_nonzero =
        ExactRational::new(all_raw, qn) - &main * &(&count * &ExactRational::from_int(q as i64 - 1));
    Ok(SumE { monic, all_nonzero })
}

/// The shifts `K Q` with `K` monic of degree `0..n - deg Q`, in increasing order.
pub fn twisted_shifts(modulus: &Poly, n: u32) -> Result<Vec<Poly>> {
    let field = modulus.field();
    let dq = match modulus.degree() {
        Degree::Finite(d) if d >= 1 && d < n => d,
        deg => return Err(Error::BadModulusDegree { deg: deg.as_i64(), n }),
    };
    let mut out = Vec::new();
    for j in 0..n - dq {
        for idx in 0..pow(field.q(), j) {
            let k = MonicIndex { n: j, idx }.decode(field);
            out.push(k.mul(modulus)?);
        }
    }
    Ok(out)
}

/// `sum_j sum_{K in M_j} sum_f α(f) α(f + K Q)` over `j < n - deg Q`.
pub fn twisted_correlation(table: &ArithTable, modulus: &Poly) -> Result<BigInt> {
    check_field(table, modulus)?;
    let mut total = BigInt::zero();
    for shift in twisted_shifts(modulus, table.n())? {
        total += shift_correlation(table, &shift)?;
    }
    Ok(total)
}

/// `S~_E(n,q;Q) = sum_{j=0}^{n - deg Q - 1} sum_{K in M_j} E(KQ,n,q)`.
pub fn twisted_sum_e(table: &ArithTable, modulus: &Poly) -> Result<ExactRational> {
    let q = table.field().q();
    let terms = twisted_shifts(modulus, table.n())?.len() as i64;
    let raw = twisted_correlation(table, modulus)?;
    Ok(ExactRational::new(raw, big_pow(q, table.n()))
        - &main_term(table.func(), table.n()) * &ExactRational::from_int(terms))
}

/// Number of terms in the twisted sum: `(q^(n - deg Q) - 1) / (q - 1)`.
pub fn twisted_term_count(q: u32, n: u32, deg_q: u32) -> u64 {
    (pow(q, n - deg_q) - 1) / (q as u64 - 1)
}

fn check_interval(table: &ArithTable, h: u32) -> Result<()> {
    if h >= table.n() {
        return Err(Error::BadInterval { h, deg: table.n() as i64 });
    }
    Ok(())
}

/// `υ_α(A;h) = sum_{f in I(A;h)} α(f)` for `A in M_n`.
pub fn interval_sum(table: &ArithTable, center: &Poly, h: u32) -> Result<i64> {
    check_field(table, center)?;
    if center.degree() != Degree::Finite(table.n()) {
        return Err(Error::WrongDegree { expected: table.n(), found: center.degree().finite().unwrap_or(0) });
    }
    check_interval(table, h)?;
    let a = center.encode()?;
    let size = pow(table.field().q(), h + 1);
    let base = a.idx - a.idx % size;
    let w = weights(table)?;
    Ok(with_weights!(w, v => v[base as usize..(base + size) as usize].iter().map(|&x| Into::<i64>::into(x)).sum()))
}

/// `sum_{A in M_n} υ_α(A;h)^2 = q^(h+1) sum_b F[b]^2` over level-(h+1) fibers.
pub fn interval_square_sum(table: &ArithTable, h: u32) -> Result<BigInt> {
    check_interval(table, h)?;
    let fibers = fiber_sums(table, h + 1)?;
    let squares: BigInt = fibers.iter().map(|&x| BigInt::from(x as i128 * x as i128)).sum();
    Ok(squares * big_pow(table.field().q(), h + 1))
}

/// `V(υ_α(•;h)) = (1/q^n) sum_{A in M_n} (υ_α(A;h) - <υ_α>)^2`.
pub fn interval_variance(table: &ArithTable, h: u32) -> Result<ExactRational> {
    check_interval(table, h)?;
    let q = table.field().q();
    let n = table.n();
    let fibers = fiber_sums(table, h + 1)?;
    let width = big_pow(q, h + 1);
    let qn = big_pow(q, n);
    let total: BigInt = fibers.iter().map(|&x| BigInt::from(x)).sum::<BigInt>() * &width;
    let squares: BigInt = fibers.iter().map(|&x| BigInt::from(x as i128 * x as i128)).sum::<BigInt>() * &width;
    // sum (υ - m)^2 = sum υ^2 - (sum υ)^2 / q^n with m = sum υ / q^n
    let sum_sq = ExactRational::from_int(squares) - ExactRational::new(&total * &total, qn.clone());
    Ok(sum_sq / ExactRational::from_int(qn))
}

/// `<α>_n = (1/q^n) sum_{f in M_n} α(f)`.
pub fn mean_value(table: &ArithTable) -> Result<ExactRational> {
    weights(table)?;
    let s = crate::sieve::table_sums(table).sum;
    Ok(ExactRational::new(BigInt::from(s), big_pow(table.field().q(), table.n())))
}

/// Trial-division factorization of a small nonzero polynomial into monic
/// irreducibles (the unit is dropped).
pub fn factor_small(f: &Poly) -> Result<Vec<(Poly, u32)>> {
    if f.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let field = f.field();
    let mut rest = f.make_monic();
    let mut out = Vec::new();
    let mut d = 1;
    while let Degree::Finite(deg) = rest.degree() {
        if deg == 0 {
            break;
        }
        if 2 * d > deg {
            out.push((rest.clone(), 1));
            break;
        }
        for idx in 0..pow(field.q(), d) {
            let p = MonicIndex { n: d, idx }.decode(field);
            let mut e = 0;
            loop {
                let (quot, r) = rest.divmod(&p)?;
                if !r.is_zero() {
                    break;
                }
                rest = quot;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
        }
        d += 1;
    }
    Ok(out)
}

fn check_modulus(modulus: &Poly) -> Result<u32> {
    match modulus.degree() {
        Degree::Finite(d) if d >= 1 => Ok(d),
        deg => Err(Error::BadModulusDegree { deg: deg.as_i64(), n: 0 }),
    }
}

/// Φ(Q) from the factorization: `prod (q^(d e) - q^(d (e-1)))`.
pub fn euler_phi_formula(modulus: &Poly) -> Result<BigInt> {
    check_modulus(modulus)?;
    let q = modulus.field().q();
    let mut phi = BigInt::one();
    for (p, e) in factor_small(modulus)? {
        let d = p.degree().finite().unwrap();
        phi *= big_pow(q, d * e) - big_pow(q, d * (e - 1));
    }
    Ok(phi)
}

/// Φ(Q) by counting residues `A`, `deg A < deg Q`, with `gcd(A, Q) = 1`.
pub fn euler_phi_by_count(modulus: &Poly) -> Result<BigInt> {
    let d = check_modulus(modulus)?;
    let field = modulus.field();
    let mut count = 0u64;
    for idx in 0..pow(field.q(), d) {
        let a = Poly::from_dense_index(field, d, idx);
        if !a.is_zero() && a.gcd(modulus)?.degree() == Degree::Finite(0) {
            count += 1;
        }
    }
    Ok(BigInt::from(count))
}

/// Largest residue space for which Φ is cross-checked by counting.
const PHI_COUNT_LIMIT: u64 = 1 << 16;

/// Φ(Q), the number of reduced residue classes modulo Q. Small moduli are
/// computed both by the product formula and by counting.
pub fn euler_phi(modulus: &Poly) -> Result<BigInt> {
    let phi = euler_phi_formula(modulus)?;
    let d = check_modulus(modulus)?;
    if crate::polyring::checked_pow(modulus.field().q(), d).is_some_and(|s| s <= PHI_COUNT_LIMIT) {
        let counted = euler_phi_by_count(modulus)?;
        assert_eq!(phi, counted, "Euler phi formula and count disagree for {modulus}");
    }
    Ok(phi)
}

/// Per-residue Λ sums for one modulus.
#[derive(Clone, Debug)]
pub struct ProgressionData {
    pub modulus: Poly,
    pub n: u32,
    /// Ψ(n;Q,A) for every residue `A` (dense index, `deg A < deg Q`), reduced or not.
    pub psi: Vec<i64>,
    /// Whether each residue is coprime to Q.
    pub reduced: Vec<bool>,
    pub phi: BigInt,
}

impl ProgressionData {
    pub fn reduced_psi(&self) -> impl Iterator<Item = i64> + '_ {
        self.psi.iter().zip(&self.reduced).filter(|(_, &r)| r).map(|(&s, _)| s)
    }

    /// `sum_{gcd(A,Q)=1} Ψ(n;Q,A)`.
    pub fn reduced_sum(&self) -> BigInt {
        self.reduced_psi().map(BigInt::from).sum()
    }

    /// `sum_{gcd(A,Q)=1} Ψ(n;Q,A)^2`.
    pub fn reduced_square_sum(&self) -> BigInt {
        self.reduced_psi().map(|s| BigInt::from(s as i128 * s as i128)).sum()
    }

    /// G(n;Q) evaluated term by term.
    pub fn variance(&self) -> ExactRational {
        let q = self.modulus.field().q();
        let expected = ExactRational::new(big_pow(q, self.n), self.phi.clone());
        self.reduced_psi()
            .map(|s| {
                let dev = ExactRational::from_int(s) - expected.clone();
                &dev * &dev
            })
            .fold(ExactRational::zero(), |a, b| a + b)
    }
}

/// Λ summed over each residue class of M_n modulo Q.
pub fn progression_data(table: &ArithTable, modulus: &Poly) -> Result<ProgressionData> {
    require(table, ArithFn::Lambda)?;
    check_field(table, modulus)?;
    let dq = check_modulus(modulus)?;
    let field = table.field();
    let (q, n) = (field.q(), table.n());
    let codec = DigitCodec::new(field);
    let residues = pow(q, dq);
    // residue of T^i for i <= n, packed
    let powers_mod: Vec<Poly> =
        (0..=n).map(|i| Poly::monomial(field, FieldElement::ONE, i).rem(modulus)).collect::<Result<_>>()?;
    let low_len = Translator::low_len(q, n);
    let low_size = pow(q, low_len);
    // residue of the low part sum_{i < low_len} c_i T^i for each low index
    let low_res: Vec<u64> = (0..low_size)
        .map(|low| {
            let g = Poly::from_dense_index(field, low_len, low);
            g.rem(modulus).map(|r| r.dense_index())
        })
        .collect::<Result<_>>()?;
    let top = powers_mod[n as usize].clone();
    let high_res = |block: u64| -> u64 {
        let mut r = top.clone();
        let mut rest = block;
        for i in low_len..n {
            let c = FieldElement((rest % q as u64) as u32);
            rest /= q as u64;
            if !c.is_zero() {
                r = r.add(&powers_mod[i as usize].scale(c)).expect("same field");
            }
        }
        r.dense_index()
    };
    let TableValues::Lambda(values) = table.values() else { unreachable!() };
    let blocks = values.len() as u64 / low_size;
    let psi = (0..blocks)
        .into_par_iter()
        .fold(
            || vec![0i64; residues as usize],
            |mut acc, b| {
                let hr = high_res(b);
                let base = (b * low_size) as usize;
                for (low, &lr) in low_res.iter().enumerate() {
                    let lam = values[base + low];
                    if lam != 0 {
                        acc[codec.add(hr, lr, dq) as usize] += lam as i64;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0i64; residues as usize],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let reduced = (0..residues)
        .map(|idx| {
            let a = Poly::from_dense_index(field, dq, idx);
            Ok(!a.is_zero() && a.gcd(modulus)?.degree() == Degree::Finite(0))
        })
        .collect::<Result<Vec<_>>>()?;
    let phi = euler_phi(modulus)?;
    Ok(ProgressionData { modulus: modulus.clone(), n, psi, reduced, phi })
}

/// `Ψ(n;Q,A) = sum_{f in M_n, f = A mod Q} Λ(f)`.
pub fn progression_sum(table: &ArithTable, modulus: &Poly, residue: &Poly) -> Result<i64> {
    check_field(table, residue)?;
    let data = progression_data(table, modulus)?;
    let a = residue.rem(modulus)?;
    if a.is_zero() || a.gcd(modulus)?.degree() != Degree::Finite(0) {
        return Err(Error::NotCoprime);
    }
    Ok(data.psi[a.dense_index() as usize])
}

/// `G(n;Q) = sum_{gcd(A,Q)=1} |Ψ(n;Q,A) - q^n / Φ(Q)|^2`.
pub fn progression_variance(table: &ArithTable, modulus: &Poly) -> Result<ExactRational> {
    Ok(progression_data(table, modulus)?.variance())
}

/// `sum_{f in M_n, gcd(f,Q)=1} α(f)^2`.
pub fn coprime_square_sum(table: &ArithTable, modulus: &Poly) -> Result<BigInt> {
    check_field(table, modulus)?;
    let w = weights(table)?;
    let field = table.field();
    let mut total = BigInt::zero();
    // Only prime powers contribute for Λ; for other tables walk everything.
    for m in crate::polyring::iter_monic(field, table.n()) {
        let x: i64 = with_weights!(w, v => v[m.idx as usize].into());
        if x == 0 {
            continue;
        }
        if m.decode(field).gcd(modulus)?.degree() == Degree::Finite(0) {
            total += BigInt::from(x as i128 * x as i128);
        }
    }
    Ok(total)
}

/// Outcome of a Chowla-type sum.
#[derive(Clone, Debug, PartialEq)]
pub struct ChowlaSum {
    pub value: BigInt,
    /// `2 r n q^(n - 1/2) + 3 r n^2 q^(n-1)` as a float, for display.
    pub bound: f64,
    /// Exact decision of `|value| <= bound`.
    pub within_bound: bool,
}

/// `|s| <= 2 r n q^(n-1) sqrt(q) + 3 r n^2 q^(n-1)`, decided in integers.
pub fn chowla_bound_holds(s: &BigInt, r: u32, n: u32, q: u32) -> bool {
    let qn1 = big_pow(q, n - 1);
    let abs = if s < &BigInt::zero() { -s.clone() } else { s.clone() };
    let rest = abs - BigInt::from(3 * r as u64 * n as u64 * n as u64) * &qn1;
    if rest <= BigInt::zero() {
        return true;
    }
    let lin = BigInt::from(2 * r as u64 * n as u64) * &qn1;
    &rest * &rest <= &lin * &lin * BigInt::from(q)
}

pub fn chowla_bound(r: u32, n: u32, q: u32) -> f64 {
    let (r, n, q) = (r as f64, n as f64, q as f64);
    2.0 * r * n * q.powf(n - 0.5) + 3.0 * r * n * n * q.powf(n - 1.0)
}

/// `sum_{f in M_n} prod_i μ(f + α_i)^(ε_i)`.
pub fn chowla_sum(table: &ArithTable, shifts: &[Poly], epsilons: &[u8]) -> Result<ChowlaSum> {
    require(table, ArithFn::Mu)?;
    let field = table.field();
    let n = table.n();
    let r = shifts.len();
    if r < 2 {
        return Err(Error::BadShifts("need at least two shifts".into()));
    }
    if epsilons.len() != r {
        return Err(Error::BadShifts(format!("{} shifts but {} exponents", r, epsilons.len())));
    }
    if epsilons.iter().any(|&e| e != 1 && e != 2) {
        return Err(Error::BadShifts("exponents must be 1 or 2".into()));
    }
    if epsilons.iter().all(|&e| e == 2) {
        return Err(Error::AllEven);
    }
    let min_n = if field.p() == 2 { 3 } else { 2 };
    if n < min_n {
        return Err(Error::BadShifts(format!("n must be at least {min_n}")));
    }
    for (i, s) in shifts.iter().enumerate() {
        check_field(table, s)?;
        if let Degree::Finite(d) = s.degree() {
            if d >= n {
                return Err(Error::DegreeTooLarge { deg: d as i64, bound: n });
            }
        }
        if shifts[..i].contains(s) {
            return Err(Error::BadShifts(format!("shift {s} repeated")));
        }
    }
    let TableValues::Mu(values) = table.values() else { unreachable!() };
    let translators: Vec<Translator> = shifts.iter().map(|s| Translator::new(field, s, n)).collect();
    let value = par_fold(values.len() as u64, SHARD, |range| {
        let mut acc = 0i128;
        for idx in range {
            let mut prod = 1i64;
            for (tr, &e) in translators.iter().zip(epsilons) {
                let m = values[tr.apply(idx) as usize] as i64;
                prod *= if e == 2 { m * m } else { m };
                if prod == 0 {
                    break;
                }
            }
            acc += prod as i128;
        }
        acc
    });
    let within_bound = chowla_bound_holds(&value, r as u32, n, field.q());
    Ok(ChowlaSum { value, bound: chowla_bound(r as u32, n, field.q()), within_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::{Budget, Sieve, TableSet};

    fn set(q: u64, n: u32) -> (FieldSpec, TableSet) {
        let f = FieldSpec::from_order(q).unwrap();
        let s = Sieve::build(&f, n, Budget::default()).unwrap().derive();
        (f, s)
    }

    fn p(f: &FieldSpec, s: &str) -> Poly {
        Poly::parse(f, s).unwrap()
    }

    fn r(n: i64, d: i64) -> ExactRational {
        ExactRational::new(n, d)
    }

    #[test]
    fn autocorr_examples() {
        let (f, s) = set(3, 2);
        let lam = s.table(2, ArithFn::Lambda);
        assert_eq!(autocorr(&lam, &p(&f, "1")).unwrap(), r(2, 3));
        assert_eq!(error_term(&lam, &p(&f, "1")).unwrap(), r(-1, 3));
        assert!(matches!(autocorr(&lam, &p(&f, "0,0,1")), Err(Error::DegreeTooLarge { .. })));
        assert_eq!(autocorr(&lam, &Poly::zero(&f)).unwrap_err(), Error::ZeroShift);
        let mu = s.table(2, ArithFn::Mu);
        assert_eq!(error_term(&mu, &p(&f, "1")).unwrap(), autocorr(&mu, &p(&f, "1")).unwrap());
        let d = s.table(2, ArithFn::Divisor);
        assert_eq!(error_term(&d, &p(&f, "1")).unwrap(), autocorr(&d, &p(&f, "1")).unwrap() - r(9, 1));
    }

    #[test]
    fn translator_matches_poly_addition() {
        let (f, _) = set(3, 1);
        let n = 12; // 3^11 > 2^16 forces a high group
        for lit in ["1", "2,1", "0,0,0,0,0,0,0,0,0,0,1", "1,2,0,1,0,2,2,0,1,0,2,1"] {
            let shift = p(&f, lit);
            let tr = Translator::new(&f, &shift, n);
            for idx in (0..pow(3, n)).step_by(997) {
                let g = MonicIndex { n, idx }.decode(&f).add(&shift).unwrap();
                assert_eq!(tr.apply(idx), g.encode().unwrap().idx, "{lit} idx={idx}");
            }
        }
    }

    #[test]
    fn degree_class_matches_per_shift_sums() {
        for q in [3u64, 4, 5] {
            let (f, s) = set(q, 4);
            for func in [ArithFn::Lambda, ArithFn::Mu, ArithFn::Divisor] {
                let t = s.table(4, func);
                for j in 0..4 {
                    for c in 1..f.q() {
                        let mut direct = BigInt::zero();
                        for idx in 0..pow(f.q(), j) {
                            let shift = MonicIndex { n: j, idx }.decode(&f).scale(FieldElement(c));
                            direct += shift_correlation(&t, &shift).unwrap();
                        }
                        assert_eq!(degree_class_correlation(&t, j, FieldElement(c)).unwrap(), direct);
                    }
                }
            }
        }
    }

    #[test]
    fn cumulative_matches_degree_classes() {
        let (f, s) = set(5, 4);
        let t = s.table(4, ArithFn::Lambda);
        for h in 0..4 {
            let mut classes = BigInt::zero();
            for j in 0..=h {
                for c in 1..f.q() {
                    classes += degree_class_correlation(&t, j, FieldElement(c)).unwrap();
                }
            }
            assert_eq!(cumulative_shift_correlation(&t, h).unwrap(), classes);
        }
    }

    #[test]
    fn sum_e_examples() {
        let (f, s) = set(3, 4);
        let lam2 = s.table(2, ArithFn::Lambda);
        assert_eq!(sum_e(&lam2, 0).unwrap().monic, r(-1, 3));
        let mu = s.table(4, ArithFn::Mu);
        for k in 0..4 {
            let se = sum_e(&mu, k).unwrap();
            assert_eq!(se.all_nonzero, &se.monic * &ExactRational::from_int(f.q() as i64 - 1));
        }
        assert!(matches!(sum_e(&mu, 4), Err(Error::DegreeTooLarge { .. })));
    }

    #[test]
    fn twisted_examples() {
        let (f, s) = set(3, 4);
        let lam = s.table(4, ArithFn::Lambda);
        let qq = p(&f, "1,0,0,1");
        assert_eq!(twisted_sum_e(&lam, &qq).unwrap(), error_term(&lam, &qq).unwrap());
        assert_eq!(twisted_shifts(&p(&f, "0,1"), 4).unwrap().len() as u64, twisted_term_count(3, 4, 1));
        assert_eq!(twisted_term_count(3, 4, 1), 13);
        assert!(matches!(twisted_sum_e(&lam, &p(&f, "1")), Err(Error::BadModulusDegree { .. })));
        assert!(matches!(twisted_sum_e(&lam, &p(&f, "0,0,0,0,1")), Err(Error::BadModulusDegree { .. })));
    }

    #[test]
    fn interval_examples() {
        let (f, s) = set(3, 2);
        let lam = s.table(2, ArithFn::Lambda);
        assert_eq!(interval_sum(&lam, &p(&f, "0,0,1"), 0).unwrap(), 3);
        assert_eq!(interval_sum(&s.table(2, ArithFn::Divisor), &p(&f, "0,0,1"), 1).unwrap(), 27);
        assert_eq!(interval_sum(&s.table(2, ArithFn::Mu), &p(&f, "0,0,1"), 1).unwrap(), 0);
        assert!(matches!(interval_sum(&lam, &p(&f, "0,0,1"), 2), Err(Error::BadInterval { .. })));
        assert_eq!(interval_variance(&lam, 0).unwrap(), ExactRational::zero());
    }

    #[test]
    fn interval_variance_matches_brute_force() {
        let (f, s) = set(3, 4);
        for func in [ArithFn::Lambda, ArithFn::Mu, ArithFn::Divisor] {
            let t = s.table(4, func);
            for h in 0..4 {
                let sums: Vec<i64> = crate::polyring::iter_monic(&f, 4)
                    .map(|a| {
                        crate::polyring::iter_interval(&a.decode(&f), h)
                            .unwrap()
                            .map(|g| t.get(g.encode().unwrap().idx))
                            .sum()
                    })
                    .collect();
                let n = ExactRational::from_int(sums.len() as i64);
                let mean = ExactRational::from_int(sums.iter().sum::<i64>()) / n.clone();
                let var = sums
                    .iter()
                    .map(|&x| {
                        let d = ExactRational::from_int(x) - mean.clone();
                        &d * &d
                    })
                    .fold(ExactRational::zero(), |a, b| a + b)
                    / n;
                assert_eq!(interval_variance(&t, h).unwrap(), var, "{func:?} h={h}");
            }
        }
    }

    #[test]
    fn progression_examples() {
        let (f, s) = set(3, 2);
        let lam = s.table(2, ArithFn::Lambda);
        let t = p(&f, "0,1");
        assert_eq!(progression_sum(&lam, &t, &p(&f, "1")).unwrap(), 4);
        assert_eq!(progression_sum(&lam, &t, &p(&f, "2")).unwrap(), 4);
        assert_eq!(progression_sum(&lam, &t, &p(&f, "0")).unwrap_err(), Error::NotCoprime);
        assert_eq!(progression_variance(&lam, &t).unwrap(), r(1, 2));
    }

    #[test]
    fn progression_matches_brute_force() {
        let (f, s) = set(5, 4);
        let lam = s.table(4, ArithFn::Lambda);
        for lit in ["0,1", "1,0,1", "2,3,1", "1,1,0,4"] {
            let qq = p(&f, lit);
            let data = progression_data(&lam, &qq).unwrap();
            let mut brute = vec![0i64; data.psi.len()];
            for m in crate::polyring::iter_monic(&f, 4) {
                let res = m.decode(&f).rem(&qq).unwrap().dense_index();
                brute[res as usize] += lam.get(m.idx);
            }
            assert_eq!(data.psi, brute, "Q = {lit}");
        }
    }

    #[test]
    fn euler_phi_examples() {
        let (f, _) = set(3, 1);
        assert_eq!(euler_phi(&p(&f, "0,1")).unwrap(), BigInt::from(2));
        assert_eq!(euler_phi(&p(&f, "0,0,1")).unwrap(), BigInt::from(6));
        assert!(matches!(euler_phi(&p(&f, "2")), Err(Error::BadModulusDegree { .. })));
        let (f9, _) = set(9, 1);
        for lit in ["1,0,1", "0,0,1", "3,4,1", "1,2,3,1", "0,1,0,0,1"] {
            let qq = p(&f9, lit);
            assert_eq!(euler_phi_formula(&qq).unwrap(), euler_phi_by_count(&qq).unwrap(), "{lit}");
        }
    }

    #[test]
    fn chowla_examples() {
        let (f, s) = set(3, 4);
        let mu = s.table(4, ArithFn::Mu);
        let j = p(&f, "1,1");
        let c = chowla_sum(&mu, &[Poly::zero(&f), j.clone()], &[1, 1]).unwrap();
        let e = error_term(&mu, &j).unwrap() * ExactRational::from_int(81);
        assert_eq!(ExactRational::from_int(c.value.clone()), e);
        assert!(c.within_bound);
        assert_eq!(chowla_sum(&mu, &[Poly::zero(&f), j.clone()], &[2, 2]).unwrap_err(), Error::AllEven);
        assert!(matches!(chowla_sum(&mu, &[j.clone(), j.clone()], &[1, 1]), Err(Error::BadShifts(_))));
        assert!(matches!(chowla_sum(&mu, std::slice::from_ref(&j), &[1]), Err(Error::BadShifts(_))));
    }

    #[test]
    fn chowla_bound_integer_test() {
        // r=2, n=2, q=4: 2*2*2*4^(1.5) + 3*2*4*4 = 64 + 96 = 160
        assert!(chowla_bound_holds(&BigInt::from(160), 2, 2, 4));
        assert!(!chowla_bound_holds(&BigInt::from(161), 2, 2, 4));
        assert!(chowla_bound_holds(&BigInt::from(-160), 2, 2, 4));
        assert!((chowla_bound(2, 2, 4) - 160.0).abs() < 1e-9);
    }

    #[test]
    fn means() {
        let (_, s) = set(3, 4);
        assert_eq!(mean_value(&s.table(4, ArithFn::Lambda)).unwrap(), ExactRational::one());
        assert_eq!(mean_value(&s.table(4, ArithFn::Divisor)).unwrap(), ExactRational::from_int(5));
        assert_eq!(mean_value(&s.table(4, ArithFn::Mu)).unwrap(), ExactRational::zero());
    }

    #[test]
    fn factor_small_reconstructs() {
        let (f, _) = set(5, 1);
        let g = p(&f, "3,1,0,2,4,1,2");
        let mut prod = Poly::one(&f);
        for (pp, e) in factor_small(&g).unwrap() {
            prod = prod.mul(&pp.pow(e)).unwrap();
        }
        assert_eq!(prod, g.make_monic());
    }
}
