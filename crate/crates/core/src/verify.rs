//! Runnable checks: exact identities (deviation must be literally zero) and
//! q-sweeps of the asymptotic statements with normalized deviations and fitted
//! decay slopes.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::polyring::{checked_pow, Poly};
use crate::rational::{big_pow, ExactRational};
use crate::sieve::{irreducible_count_formula, table_sums, ArithFn, ArithTable, Budget, Sieve, TableSet};
use crate::stats;

/// The asymptotic statements that can be swept over q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theorem {
    /// `G(n;Q)/q^n` against `deg Q - 1`.
    T11,
    /// `V(υ_Λ)/q^(h+1)` against `n - h - 2`.
    T12,
    /// `(q-1) S_E(k,n,q)` against `-1`.
    T13,
    /// `(q-1) S~_E(n,q;Q)` against `-(n - deg Q)`.
    T14,
    /// `(q-1) E(Q,n,q)` against `-1` for `deg Q = n - 1`.
    C15,
    /// `V(υ_d)/q^(h+1)` against the binomial main term.
    T41,
    /// `sum_{J in M_h} E_d(J,n,q)` against the binomial difference.
    T42,
    /// `V(υ_μ)/q^(h+1)` against 1.
    T44,
    /// `sum_{deg J = h} E_μ(J,n,q)` against 0, reported over monic J and over all nonzero J.
    T45,
}

impl Theorem {
    pub const ALL: [Theorem; 9] =
        [Theorem::T11, Theorem::T12, Theorem::T13, Theorem::T14, Theorem::C15, Theorem::T41, Theorem::T42, Theorem::T44, Theorem::T45];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::T11 => "t11",
            Theorem::T12 => "t12",
            Theorem::T13 => "t13",
            Theorem::T14 => "t14",
            Theorem::C15 => "c15",
            Theorem::T41 => "t41",
            Theorem::T42 => "t42",
            Theorem::T44 => "t44",
            Theorem::T45 => "t45",
        }
    }

    fn func(self) -> ArithFn {
        match self {
            Theorem::T41 | Theorem::T42 => ArithFn::Divisor,
            Theorem::T44 | Theorem::T45 => ArithFn::Mu,
            _ => ArithFn::Lambda,
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Theorem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| Error::ConstraintViolation(format!("unknown theorem {s:?}")))
    }
}

/// Main term of a statement and the decay exponent of its deviation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictedValue {
    pub theorem: Theorem,
    pub main: ExactRational,
    /// The deviation is expected to be `O(q^(-half_powers/2))`.
    pub half_powers: u32,
}

/// One row of a verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: String,
    pub q: u32,
    pub p: u32,
    pub k: u32,
    pub n: u32,
    pub h: Option<u32>,
    pub kshift: Option<u32>,
    #[serde(rename = "Q")]
    pub modulus: Option<String>,
    pub computed_num: String,
    pub computed_den: String,
    pub predicted_num: String,
    pub predicted_den: String,
    /// Exact `computed - predicted`.
    pub deviation: String,
    /// `|deviation| * q^e`, rounded to a float for display; `pass` is decided exactly.
    pub normalized_deviation: f64,
    pub pass: bool,
    pub ms: u64,
    /// Free-form remark shown in summaries (not serialized).
    #[serde(skip)]
    pub note: Option<String>,
}

impl VerificationReport {
    pub fn computed(&self) -> ExactRational {
        parse_fraction(&self.computed_num, &self.computed_den)
    }

    pub fn predicted(&self) -> ExactRational {
        parse_fraction(&self.predicted_num, &self.predicted_den)
    }

    pub fn deviation_value(&self) -> ExactRational {
        self.computed() - self.predicted()
    }
}

fn parse_fraction(num: &str, den: &str) -> ExactRational {
    let n: BigInt = num.parse().unwrap_or_default();
    let d: BigInt = den.parse().unwrap_or_else(|_| BigInt::one());
    ExactRational::new(n, d)
}

/// Parses `"3"`, `"2.5"`, `"-0.125"` or `"7/2"` as an exact rational.
pub fn parse_rational(s: &str) -> Result<ExactRational> {
    let bad = || Error::ConstraintViolation(format!("cannot parse number {s:?}"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(ExactRational::new(a, b));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty()) || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let value = ExactRational::new(digits, num_traits::pow(BigInt::from(10), frac.len()));
    Ok(if neg { -value } else { value })
}

/// Settings shared by every check.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    /// Pass iff `|deviation| * q^e <= threshold`.
    pub threshold: ExactRational,
    pub budget: Budget,
    /// Record wall time in `ms`; off by default so reports are byte-reproducible.
    pub timings: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { threshold: ExactRational::from_int(3), budget: Budget::default(), timings: false }
    }
}

/// Parameters of one theorem sweep; `modulus` holds coefficient values so the
/// same grid applies to every field in the sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TheoremParams {
    pub n: u32,
    pub h: Option<u32>,
    pub k: Option<u32>,
    pub modulus: Option<Vec<u32>>,
}

/// Least-squares fit of `log |deviation|` against `log q`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub points: usize,
    pub zeros: usize,
}

/// Fits the decay of the raw deviations of `reports` (one per q). Exact zeros
/// are excluded and counted; at least three distinct q must remain.
pub fn fit_decay(reports: &[VerificationReport]) -> Result<DecayFit> {
    let mut zeros = 0;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for r in reports {
        let dev = r.deviation_value();
        if dev.is_zero() {
            zeros += 1;
            continue;
        }
        pts.push(((r.q as f64).ln(), log_abs(&dev)));
    }
    let mut distinct: Vec<u32> = reports.iter().filter(|r| !r.deviation_value().is_zero()).map(|r| r.q).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::TooFewPoints { usable: pts.len(), zeros });
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(DecayFit { slope: sxy / sxx, points: pts.len(), zeros })
}

/// `ln |x|` without overflowing on huge numerators or denominators.
fn log_abs(x: &ExactRational) -> f64 {
    fn ln_big(b: &BigInt) -> f64 {
        let bits = b.bits();
        if bits < 1000 {
            return b.to_f64().unwrap().abs().ln();
        }
        let shift = bits - 60;
        let top: BigInt = b.abs() >> shift;
        top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
    ln_big(x.numer()) - ln_big(x.denom())
}

/// Outcome of one theorem sweep.
#[derive(Clone, Debug)]
pub struct TheoremRun {
    pub theorem: Theorem,
    pub reports: Vec<VerificationReport>,
    /// One fit per report family (`t45` has two), keyed by the report's theorem string.
    pub fits: Vec<(String, Result<DecayFit>)>,
}

impl TheoremRun {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

fn binom3(a: i64) -> i64 {
    if a < 3 {
        0
    } else {
        a * (a - 1) * (a - 2) / 6
    }
}

/// Regime of the divisor-function statements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum DivisorRegime {
    /// `2h <= n - 4`
    Main,
    /// `2h = n - 2`
    Edge,
    /// `2h >= n` (variance) or `2h > n` (J-sum)
    Vanishing,
}

fn divisor_regime(theorem: Theorem, n: u32, h: u32) -> Result<DivisorRegime> {
    let (n2, h2) = (n as i64, 2 * h as i64);
    if h >= n {
        return Err(Error::ConstraintViolation(format!("{theorem} requires h < n (got h={h}, n={n})")));
    }
    if h2 <= n2 - 4 {
        Ok(DivisorRegime::Main)
    } else if h2 == n2 - 2 {
        Ok(DivisorRegime::Edge)
    } else if (theorem == Theorem::T41 && h2 >= n2) || (theorem == Theorem::T42 && h2 > n2) {
        Ok(DivisorRegime::Vanishing)
    } else {
        let range = if theorem == Theorem::T41 { "n/2 <= h < n" } else { "n/2 < h < n" };
        Err(Error::ConstraintViolation(format!(
            "{theorem} requires 0 <= h <= n/2-2, h = n/2-1 or {range} (got h={h}, n={n})"
        )))
    }
}

fn need<T: Copy>(value: Option<T>, theorem: Theorem, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::ConstraintViolation(format!("{theorem} requires --{name}")))
}

fn modulus_degree(theorem: Theorem, params: &TheoremParams) -> Result<u32> {
    let m = params.modulus.as_ref().ok_or_else(|| Error::ConstraintViolation(format!("{theorem} requires --Q")))?;
    let deg = m.iter().rposition(|&c| c != 0).ok_or_else(|| Error::ConstraintViolation("Q must be nonzero".into()))?;
    if m[deg] != 1 {
        return Err(Error::ConstraintViolation("Q must be monic".into()));
    }
    Ok(deg as u32)
}

/// Checks a theorem's stated parameter constraints without computing anything.
pub fn check_constraints(theorem: Theorem, params: &TheoremParams) -> Result<()> {
    let n = params.n;
    if n == 0 {
        return Err(Error::ConstraintViolation("n must be positive".into()));
    }
    let fail = |msg: String| Err(Error::ConstraintViolation(msg));
    match theorem {
        Theorem::T11 => {
            let d = modulus_degree(theorem, params)?;
            if d < 1 || d > n {
                return fail(format!("t11 requires 1 <= deg Q <= n (got deg Q={d}, n={n})"));
            }
        }
        Theorem::T12 => {
            let h = need(params.h, theorem, "h")?;
            if h + 3 >= n {
                return fail(format!("t12 requires h < n-3 (got h={h}, n={n})"));
            }
        }
        Theorem::T13 => {
            let k = need(params.k, theorem, "k")?;
            if k + 3 >= n {
                return fail(format!("t13 requires k < n-3 (got k={k}, n={n})"));
            }
        }
        Theorem::T14 => {
            let d = modulus_degree(theorem, params)?;
            if d < 1 || d >= n {
                return fail(format!("t14 requires 1 <= deg Q < n (got deg Q={d}, n={n})"));
            }
        }
        Theorem::C15 if params.modulus.is_none() => {}
        Theorem::C15 => {
            let d = modulus_degree(theorem, params)?;
            if d + 1 != n {
                return fail(format!("c15 requires deg Q = n-1 (got deg Q={d}, n={n})"));
            }
        }
        Theorem::T41 | Theorem::T42 => {
            divisor_regime(theorem, n, need(params.h, theorem, "h")?)?;
        }
        Theorem::T44 | Theorem::T45 => {
            let h = need(params.h, theorem, "h")?;
            if h + 4 > n {
                return fail(format!("{theorem} requires h <= n-4 (got h={h}, n={n})"));
            }
        }
    }
    Ok(())
}

/// Main term and decay exponent of a theorem at the given parameters.
pub fn predicted_value(theorem: Theorem, params: &TheoremParams) -> Result<PredictedValue> {
    check_constraints(theorem, params)?;
    let n = params.n as i64;
    let int = |v: i64| ExactRational::from_int(v);
    let (main, half_powers) = match theorem {
        Theorem::T11 => (int(modulus_degree(theorem, params)? as i64 - 1), 1),
        Theorem::T12 => (int(n - params.h.unwrap() as i64 - 2), 1),
        Theorem::T13 | Theorem::C15 => (int(-1), 1),
        Theorem::T14 => (int(-(n - modulus_degree(theorem, params)? as i64)), 1),
        Theorem::T41 => {
            let h = params.h.unwrap();
            match divisor_regime(theorem, params.n, h)? {
                DivisorRegime::Main => (int(binom3(n - 2 * h as i64 + 1)), 1),
                _ => (int(0), 1),
            }
        }
        Theorem::T42 => {
            let h = params.h.unwrap() as i64;
            match divisor_regime(theorem, params.n, h as u32)? {
                DivisorRegime::Main => (int(binom3(n - 2 * h - 1) - binom3(n - 2 * h + 1)), 1),
                DivisorRegime::Edge => (int(-1), 1),
                DivisorRegime::Vanishing => (int(0), 1),
            }
        }
        Theorem::T44 => (int(1), 1),
        Theorem::T45 => (int(0), 3),
    };
    Ok(PredictedValue { theorem, main, half_powers })
}

/// The monic irreducible of degree `d` with the smallest index.
pub fn first_irreducible(field: &FieldSpec, d: u32) -> Result<Poly> {
    for m in crate::polyring::iter_monic(field, d) {
        let f = m.decode(field);
        let factors = stats::factor_small(&f)?;
        if factors.len() == 1 && factors[0].1 == 1 {
            return Ok(f);
        }
    }
    unreachable!("every degree has an irreducible")
}

fn coeff_literal(values: &[u32]) -> String {
    values.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

/// Fills the common columns of a report.
struct RowBuilder<'a> {
    field: &'a FieldSpec,
    n: u32,
    h: Option<u32>,
    kshift: Option<u32>,
    modulus: Option<String>,
    ms: u64,
}

impl RowBuilder<'_> {
    fn row(
        &self,
        name: &str,
        computed: &ExactRational,
        predicted: &ExactRational,
        half_powers: u32,
        pass: impl FnOnce(&ExactRational) -> bool,
    ) -> VerificationReport {
        let dev = computed - predicted;
        let q = self.field.q();
        let normalized = dev.abs().to_f64() * (q as f64).powf(half_powers as f64 / 2.0);
        let pass = pass(&dev);
        VerificationReport {
            theorem: name.to_string(),
            q,
            p: self.field.p(),
            k: self.field.k(),
            n: self.n,
            h: self.h,
            kshift: self.kshift,
            modulus: self.modulus.clone(),
            computed_num: computed.numer().to_string(),
            computed_den: computed.denom().to_string(),
            predicted_num: predicted.numer().to_string(),
            predicted_den: predicted.denom().to_string(),
            deviation: dev.to_string(),
            normalized_deviation: normalized,
            pass,
            ms: self.ms,
            note: None,
        }
    }

    fn exact(&self, name: &str, lhs: impl Into<ExactRational>, rhs: impl Into<ExactRational>) -> VerificationReport {
        self.row(name, &lhs.into(), &rhs.into(), 0, |d| d.is_zero())
    }
}

/// Builds the tables once per field, for the largest degree needed.
fn tables(field: &FieldSpec, n: u32, budget: Budget) -> Result<(Sieve, TableSet)> {
    let sieve = Sieve::build(field, n, budget)?;
    let set = sieve.derive();
    Ok((sieve, set))
}

fn rational_of(b: BigInt) -> ExactRational {
    ExactRational::from_int(b)
}

/// Evaluates one theorem at one field.
pub fn check_theorem_at(
    theorem: Theorem,
    field: &FieldSpec,
    params: &TheoremParams,
    cfg: &VerifyConfig,
) -> Result<Vec<VerificationReport>> {
    let predicted = predicted_value(theorem, params)?;
    let start = Instant::now();
    let n = params.n;
    let q = field.q();
    let table = crate::sieve::build_table(field, n, theorem.func(), cfg.budget)?;
    let modulus = match &params.modulus {
        Some(v) => Some(Poly::from_values(field, v)?),
        None if theorem == Theorem::C15 => Some(first_irreducible(field, n - 1)?),
        None => None,
    };
    let qm1 = ExactRational::from_int(q as i64 - 1);
    let per_h = |v: ExactRational, h: u32| v / ExactRational::from_int(big_pow(q, h + 1));
    let mut computed: Vec<(String, ExactRational)> = Vec::new();
    match theorem {
        Theorem::T11 => {
            let g = stats::progression_variance(&table, modulus.as_ref().unwrap())?;
            computed.push((theorem.id().into(), g / ExactRational::from_int(big_pow(q, n))));
        }
        Theorem::T12 | Theorem::T41 | Theorem::T44 => {
            let h = params.h.unwrap();
            computed.push((theorem.id().into(), per_h(stats::interval_variance(&table, h)?, h)));
        }
        Theorem::T13 => {
            let s = stats::sum_e(&table, params.k.unwrap())?;
            computed.push((theorem.id().into(), &qm1 * &s.monic));
        }
        Theorem::T14 => {
            let s = stats::twisted_sum_e(&table, modulus.as_ref().unwrap())?;
            computed.push((theorem.id().into(), &qm1 * &s));
        }
        Theorem::C15 => {
            let e = stats::error_term(&table, modulus.as_ref().unwrap())?;
            computed.push((theorem.id().into(), &qm1 * &e));
        }
        Theorem::T42 => {
            computed.push((theorem.id().into(), stats::sum_e(&table, params.h.unwrap())?.monic));
        }
        Theorem::T45 => {
            let s = stats::sum_e(&table, params.h.unwrap())?;
            computed.push(("t45-monic".into(), s.monic));
            computed.push(("t45-all".into(), s.all_nonzero));
        }
    }
    let ms = if cfg.timings { start.elapsed().as_millis() as u64 } else { 0 };
    let rows = RowBuilder {
        field,
        n,
        h: params.h.filter(|_| matches!(theorem, Theorem::T12 | Theorem::T41 | Theorem::T42 | Theorem::T44 | Theorem::T45)),
        kshift: params.k.filter(|_| theorem == Theorem::T13),
        modulus: modulus.as_ref().map(Poly::to_literal).filter(|_| matches!(theorem, Theorem::T11 | Theorem::T14 | Theorem::C15)),
        ms,
    };
    let vanishing = theorem == Theorem::T41 && divisor_regime(theorem, n, params.h.unwrap())? == DivisorRegime::Vanishing;
    Ok(computed
        .into_iter()
        .map(|(name, value)| {
            let mut r = if vanishing {
                // recorded as a measurement, never failed
                rows.row(&name, &value, &predicted.main, predicted.half_powers, |_| true)
            } else {
                rows.row(&name, &value, &predicted.main, predicted.half_powers, |d| {
                    d.abs_scaled_le(q, predicted.half_powers, &cfg.threshold)
                })
            };
            if vanishing {
                r.note = Some(if value.is_zero() { "exact zero".into() } else { "asymptotic regime".into() });
            } else if theorem.func() == ArithFn::Lambda && !field.is_odd() {
                r.note = Some("outside stated theorem scope (even q)".into());
            }
            r
        })
        .collect())
}

/// Sweeps a theorem over a list of fields: one report per field (two for
/// `t45`), in field order, plus decay fits of the raw deviations.
pub fn check_theorem(theorem: Theorem, fields: &[FieldSpec], params: &TheoremParams, cfg: &VerifyConfig) -> Result<TheoremRun> {
    check_constraints(theorem, params)?;
    let per_field: Vec<Vec<VerificationReport>> =
        fields.par_iter().map(|f| check_theorem_at(theorem, f, params, cfg)).collect::<Result<_>>()?;
    let reports: Vec<VerificationReport> = per_field.into_iter().flatten().collect();
    let mut names: Vec<String> = Vec::new();
    for r in &reports {
        if !names.contains(&r.theorem) {
            names.push(r.theorem.clone());
        }
    }
    let fits = names
        .into_iter()
        .map(|name| {
            let family: Vec<VerificationReport> = reports.iter().filter(|r| r.theorem == name).cloned().collect();
            let fit = fit_decay(&family);
            (name, fit)
        })
        .collect();
    Ok(TheoremRun { theorem, reports, fits })
}

/// Which families of exact identities to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdentityScope {
    /// Table sums and irreducible counts.
    pub sums: bool,
    /// Interval square sums and the monic restriction of shift sums.
    pub intervals: bool,
    /// Variance expansion of interval sums of Λ.
    pub variance: bool,
    /// Expansion of G(n;Q) and its cross term for small moduli.
    pub progressions: bool,
}

impl IdentityScope {
    pub const ALL: IdentityScope = IdentityScope { sums: true, intervals: true, variance: true, progressions: true };
    pub const SUMS: IdentityScope = IdentityScope { sums: true, intervals: false, variance: false, progressions: false };
}

/// Moduli used by the progression identities, as coefficient values.
pub const PROGRESSION_MODULI: [&[u32]; 3] = [&[0, 1], &[1, 1], &[1, 0, 1]];

/// Exact identities for every `n <= n_max` and `h <= h_max` (with `h < n`).
pub fn check_identities(field: &FieldSpec, n_max: u32, h_max: u32) -> Result<Vec<VerificationReport>> {
    check_identities_scoped(field, n_max, h_max, IdentityScope::ALL, Budget::default())
}

pub fn check_identities_scoped(
    field: &FieldSpec,
    n_max: u32,
    h_max: u32,
    scope: IdentityScope,
    budget: Budget,
) -> Result<Vec<VerificationReport>> {
    if n_max == 0 {
        return Err(Error::ConstraintViolation("n-max must be positive".into()));
    }
    let (sieve, set) = tables(field, n_max, budget)?;
    let q = field.q();
    let mut out = Vec::new();
    for n in 1..=n_max {
        let rows = RowBuilder { field, n, h: None, kshift: None, modulus: None, ms: 0 };
        let qn = big_pow(q, n);
        let lam = set.table(n, ArithFn::Lambda);
        let mu = set.table(n, ArithFn::Mu);
        let div = set.table(n, ArithFn::Divisor);
        let lam_sums = table_sums(&lam);
        if scope.sums {
            out.extend(sum_identities(&rows, &sieve, &set, n)?);
        }
        let h_top = h_max.min(n - 1);
        if scope.intervals {
            for h in 0..=h_top {
                let rows = RowBuilder { h: Some(h), ..rows_at(field, n) };
                out.push(rows.exact(
                    "interval-square",
                    interval_square_by_centers(&lam, h),
                    ExactRational::from_int(big_pow(q, h + 1) * lam_sums.sum_sq),
                ));
                for (name, table) in [("lambda", &lam), ("mu", &mu), ("divisor", &div)] {
                    let (all, monic) = class_sums(table, h)?;
                    let rows = RowBuilder { kshift: Some(h), h: None, ..rows_at(field, n) };
                    out.push(rows.exact(
                        &format!("monic-restriction-{name}"),
                        rational_of(all),
                        rational_of(monic * BigInt::from(q - 1)),
                    ));
                }
            }
        }
        if scope.variance {
            let mut cumulative_all = BigInt::zero();
            let mut cumulative_monic = BigInt::zero();
            let mut previous = BigInt::zero();
            for h in 0..=h_top {
                let (all, monic) = class_sums(&lam, h)?;
                cumulative_all += &all;
                cumulative_monic += &monic;
                let rows = RowBuilder { h: Some(h), ..rows_at(field, n) };
                let v = stats::interval_variance(&lam, h)? * ExactRational::from_int(qn.clone());
                let w = big_pow(q, h + 1);
                let base = &w * lam_sums.sum_sq - &w * &w * &qn;
                out.push(rows.exact("variance-expansion", v.clone(), rational_of(&base + &w * &cumulative_all)));
                out.push(rows.exact(
                    "variance-expansion-monic",
                    v,
                    rational_of(&base + &w * BigInt::from(q - 1) * &cumulative_monic),
                ));
                // the degree-h class sum is the difference of consecutive cumulative sums
                let cumulative = stats::cumulative_shift_correlation(&lam, h)?;
                let rows = RowBuilder { h: None, kshift: Some(h), ..rows_at(field, n) };
                out.push(rows.exact("sum-e-telescoping", rational_of(all), rational_of(&cumulative - &previous)));
                previous = cumulative;
            }
        }
        if scope.progressions {
            for coeffs in PROGRESSION_MODULI {
                if coeffs.iter().any(|&c| c >= q) || coeffs.len() as u32 > n {
                    continue;
                }
                out.extend(progression_identities(&lam, coeffs)?);
            }
        }
    }
    Ok(out)
}

fn rows_at(field: &FieldSpec, n: u32) -> RowBuilder<'_> {
    RowBuilder { field, n, h: None, kshift: None, modulus: None, ms: 0 }
}

/// Sum over all nonzero J of degree j, and over monic J of degree j, of
/// `sum_f α(f) α(f + J)`.
fn class_sums(table: &ArithTable, j: u32) -> Result<(BigInt, BigInt)> {
    let q = table.field().q();
    let monic = stats::degree_class_correlation(table, j, crate::gf::FieldElement::ONE)?;
    let mut all = monic.clone();
    for c in 2..q {
        all += stats::degree_class_correlation(table, j, crate::gf::FieldElement(c))?;
    }
    Ok((all, monic))
}

/// `sum_{A in M_n} sum_{f in I(A;h)} Λ(f)^2`, walking every center A.
fn interval_square_by_centers(table: &ArithTable, h: u32) -> ExactRational {
    let size = checked_pow(table.field().q(), h + 1).unwrap() as usize;
    let squares: Vec<i128> = (0..table.len() as u64).map(|i| (table.get(i) as i128).pow(2)).collect();
    let fiber: Vec<i128> = squares.chunks(size).map(|c| c.iter().sum()).collect();
    let total: BigInt = (0..table.len()).map(|a| BigInt::from(fiber[a / size])).sum();
    ExactRational::from_int(total)
}

fn sum_identities(rows: &RowBuilder<'_>, sieve: &Sieve, set: &TableSet, n: u32) -> Result<Vec<VerificationReport>> {
    let q = rows.field.q();
    let qn = big_pow(q, n);
    let qn1 = big_pow(q, n - 1);
    let int = |v: i128| ExactRational::from_int(BigInt::from(v));
    let big = |v: BigInt| ExactRational::from_int(v);
    let lam = table_sums(&set.table(n, ArithFn::Lambda));
    let div = table_sums(&set.table(n, ArithFn::Divisor));
    let mu = table_sums(&set.table(n, ArithFn::Mu));
    let c = |a: u32| BigInt::from(binom3(a as i64));
    let mut out = vec![
        rows.exact("sum-lambda", int(lam.sum), big(qn.clone())),
        rows.exact("sum-divisor", int(div.sum), big(&qn * (n + 1))),
        rows.exact("sum-divisor-sq", int(div.sum_sq), big(&qn * c(n + 3) - &qn1 * c(n + 1))),
    ];
    if n >= 2 {
        out.push(rows.exact("sum-mu", int(mu.sum), ExactRational::zero()));
        out.push(rows.exact("sum-mu-sq", int(mu.sum_sq), big(&qn - &qn1)));
    }
    let lambda_sq: BigInt = (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| BigInt::from(d) * d * irreducible_count_formula(q, d))
        .sum();
    out.push(rows.exact("sum-lambda-sq", int(lam.sum_sq), big(lambda_sq)));
    out.push(rows.exact(
        "irreducible-count",
        ExactRational::from_int(sieve.irreducibles().count(n) as i64),
        ExactRational::from_int(irreducible_count_formula(q, n) as i64),
    ));
    Ok(out)
}

fn progression_identities(lam: &ArithTable, coeffs: &[u32]) -> Result<Vec<VerificationReport>> {
    let field = lam.field();
    let (q, n) = (field.q(), lam.n());
    let modulus = Poly::from_values(field, coeffs)?;
    let dq = coeffs.len() as u32 - 1;
    let data = stats::progression_data(lam, &modulus)?;
    let qn = big_pow(q, n);
    let phi = ExactRational::from_int(data.phi.clone());
    let sq = ExactRational::from_int(data.reduced_square_sum());
    let s = ExactRational::from_int(data.reduced_sum());
    let qn_r = ExactRational::from_int(qn.clone());
    let cross = &(&ExactRational::from_int(2) * &qn_r) * &s;
    let reconstructed = sq - &cross / &phi + &(&qn_r * &qn_r) / &phi;
    let rows = RowBuilder { modulus: Some(coeff_literal(coeffs)), ..rows_at(field, n) };
    let mut out = vec![rows.exact("progression-expansion", data.variance(), reconstructed)];

    let cross = data.reduced_square_sum() - stats::coprime_square_sum(lam, &modulus)?;
    // every nonzero multiple J Q with deg J < n - deg Q, and the monic ones
    let mut all = BigInt::zero();
    let mut monic = BigInt::zero();
    for idx in 1..crate::polyring::pow(q, n - dq) {
        let j = Poly::from_dense_index(field, n - dq, idx);
        let s = stats::shift_correlation(lam, &j.mul(&modulus)?)?;
        if j.is_monic() {
            monic += &s;
        }
        all += s;
    }
    out.push(rows.exact("progression-cross-term", rational_of(cross.clone()), rational_of(all)));
    out.push(rows.exact("progression-cross-term-monic", rational_of(cross), rational_of(monic * BigInt::from(q - 1))));
    Ok(out)
}

/// One sampled Chowla configuration and its sum.
#[derive(Clone, Debug)]
pub struct ChowlaSample {
    pub shifts: [Poly; 2],
    pub epsilons: [u8; 2],
    pub sum: stats::ChowlaSum,
}

/// Default seed of the Chowla preset.
pub const CHOWLA_SEED: u64 = 0x5eed_c0de;

/// Samples `count` pairs of distinct shifts of degree `< n` with exponents not
/// both even, and evaluates each Chowla sum. The stream depends only on
/// `(seed, q, n)`.
pub fn chowla_samples(table: &ArithTable, count: usize, seed: u64) -> Result<Vec<ChowlaSample>> {
    let field = table.field();
    let (q, n) = (field.q(), table.n());
    let size = checked_pow(q, n).ok_or(Error::DegreeTooLarge { deg: n as i64, bound: 64 })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((q as u64) << 32) ^ n as u64);
    let choices = [[1u8, 1], [1, 2], [2, 1]];
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = rng.gen_range(0..size);
        let b = rng.gen_range(0..size);
        if a == b {
            continue;
        }
        let epsilons = choices[rng.gen_range(0..choices.len())];
        let shifts = [Poly::from_dense_index(field, n, a), Poly::from_dense_index(field, n, b)];
        let sum = stats::chowla_sum(table, &shifts, &epsilons)?;
        out.push(ChowlaSample { shifts, epsilons, sum });
    }
    Ok(out)
}

/// One report per field: the largest `|sum|` over the sampled pairs, with
/// `normalized_deviation = max |sum| / bound` and `pass` iff every sample is
/// within the bound.
pub fn check_chowla(field: &FieldSpec, n: u32, count: usize, seed: u64, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let table = crate::sieve::build_table(field, n, ArithFn::Mu, cfg.budget)?;
    let samples = chowla_samples(&table, count, seed)?;
    let worst = samples.iter().map(|s| s.sum.value.abs()).max().unwrap_or_default();
    let bound = stats::chowla_bound(2, n, field.q());
    let ms = if cfg.timings { start.elapsed().as_millis() as u64 } else { 0 };
    let rows = RowBuilder { ms, ..rows_at(field, n) };
    let computed = ExactRational::from_int(worst.clone());
    let mut r = rows.row("chowla", &computed, &ExactRational::zero(), 0, |_| samples.iter().all(|s| s.sum.within_bound));
    r.normalized_deviation = worst.to_f64().unwrap_or(f64::INFINITY) / bound;
    Ok(r)
}

/// Named verification suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Theorem(Theorem),
    Identities,
    Chowla,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let base = s.strip_suffix("-default").unwrap_or(s);
        match base {
            "identities" => Ok(Suite::Identities),
            "chowla" => Ok(Suite::Chowla),
            other => other.parse().map(Suite::Theorem).map_err(|_| Error::ConstraintViolation(format!("unknown suite {s:?}"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Suite::Theorem(t) => write!(f, "{t}"),
            Suite::Identities => f.write_str("identities"),
            Suite::Chowla => f.write_str("chowla"),
        }
    }
}

/// A suite with its grid; unset fields fall back to the suite's preset.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Grid {
    pub q_list: Option<Vec<u64>>,
    pub n: Option<u32>,
    pub h: Option<u32>,
    pub k: Option<u32>,
    pub modulus: Option<Vec<u32>>,
    pub n_max: Option<u32>,
    pub h_max: Option<u32>,
    pub n_list: Option<Vec<u32>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub threshold: Option<ExactRational>,
}

const Q_LIST: [u64; 6] = [3, 5, 7, 9, 11, 13];

/// The preset grid of a suite (`"t12"` is the `t12-default` preset: n=6,
/// h=1, q in 3..13).
pub fn preset(suite: Suite) -> Grid {
    let g = Grid { q_list: Some(Q_LIST.to_vec()), ..Grid::default() };
    match suite {
        Suite::Theorem(t) => match t {
            Theorem::T11 | Theorem::T14 => Grid { n: Some(5), modulus: Some(vec![1, 0, 1]), ..g },
            Theorem::T12 => Grid { n: Some(6), h: Some(1), ..g },
            Theorem::T13 => Grid { n: Some(6), k: Some(0), ..g },
            Theorem::C15 => Grid { n: Some(6), ..g },
            Theorem::T41 | Theorem::T42 => Grid {
                q_list: Some(vec![3, 5, 7]),
                n: Some(8),
                h: Some(1),
                threshold: Some(ExactRational::from_int(5)),
                ..g
            },
            Theorem::T44 => Grid { q_list: Some(vec![3, 5, 7, 9]), n: Some(6), h: Some(1), ..g },
            Theorem::T45 => Grid {
                q_list: Some(vec![3, 5, 7, 9]),
                n: Some(6),
                h: Some(1),
                threshold: Some(ExactRational::from_int(5)),
                ..g
            },
        },
        Suite::Identities => Grid { q_list: Some(vec![3, 5]), n_max: Some(5), ..Grid::default() },
        Suite::Chowla => Grid {
            q_list: Some(vec![3, 5, 7, 9]),
            n_list: Some(vec![3, 4, 5]),
            samples: Some(50),
            seed: Some(CHOWLA_SEED),
            ..Grid::default()
        },
    }
}

impl Grid {
    /// Values set in `self` win over those of `base`.
    pub fn or(self, base: Grid) -> Grid {
        Grid {
            q_list: self.q_list.or(base.q_list),
            n: self.n.or(base.n),
            h: self.h.or(base.h),
            k: self.k.or(base.k),
            modulus: self.modulus.or(base.modulus),
            n_max: self.n_max.or(base.n_max),
            h_max: self.h_max.or(base.h_max),
            n_list: self.n_list.or(base.n_list),
            samples: self.samples.or(base.samples),
            seed: self.seed.or(base.seed),
            threshold: self.threshold.or(base.threshold),
        }
    }
}

/// Result of a suite: reports in deterministic order, fits, and the
/// threshold that decided pass/fail.
#[derive(Clone, Debug)]
pub struct SuiteRun {
    pub suite: Suite,
    pub reports: Vec<VerificationReport>,
    pub fits: Vec<(String, Result<DecayFit>)>,
}

impl SuiteRun {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerificationReport> {
        self.reports.iter().filter(|r| !r.pass)
    }
}

/// Resolves the grid against the preset, validates it, and runs the suite.
pub fn run_suite(suite: Suite, grid: Grid, cfg: &VerifyConfig) -> Result<SuiteRun> {
    let grid = grid.or(preset(suite));
    let cfg = VerifyConfig { threshold: grid.threshold.clone().unwrap_or_else(|| cfg.threshold.clone()), ..cfg.clone() };
    let q_list = grid.q_list.clone().unwrap_or_default();
    if q_list.is_empty() {
        return Err(Error::ConstraintViolation("empty q list".into()));
    }
    let fields = q_list.iter().map(|&q| FieldSpec::from_order(q)).collect::<Result<Vec<_>>>()?;
    match suite {
        Suite::Theorem(t) => {
            let params = TheoremParams { n: grid.n.unwrap_or(0), h: grid.h, k: grid.k, modulus: grid.modulus.clone() };
            check_constraints(t, &params)?;
            if let Some(m) = &params.modulus {
                for f in &fields {
                    if let Some(&c) = m.iter().find(|&&c| c >= f.q()) {
                        return Err(Error::BadCoefficient { value: c as u64, q: f.q() });
                    }
                }
            }
            let run = check_theorem(t, &fields, &params, &cfg)?;
            Ok(SuiteRun { suite, reports: run.reports, fits: run.fits })
        }
        Suite::Identities => {
            let n_max = grid.n_max.or(grid.n).unwrap_or(0);
            let h_max = grid.h_max.or(grid.h).unwrap_or(n_max.saturating_sub(1));
            let per_field: Vec<Vec<VerificationReport>> = fields
                .par_iter()
                .map(|f| check_identities_scoped(f, n_max, h_max, IdentityScope::ALL, cfg.budget))
                .collect::<Result<_>>()?;
            Ok(SuiteRun { suite, reports: per_field.into_iter().flatten().collect(), fits: Vec::new() })
        }
        Suite::Chowla => {
            let n_list = grid.n_list.clone().or(grid.n.map(|n| vec![n])).unwrap_or_default();
            let samples = grid.samples.unwrap_or(50);
            let seed = grid.seed.unwrap_or(CHOWLA_SEED);
            for f in &fields {
                for &n in &n_list {
                    let min_n = if f.is_odd() { 2 } else { 3 };
                    if n < min_n {
                        return Err(Error::ConstraintViolation(format!("chowla requires n >= {min_n} for q={}", f.q())));
                    }
                }
            }
            let cells: Vec<(&FieldSpec, u32)> = fields.iter().flat_map(|f| n_list.iter().map(move |&n| (f, n))).collect();
            let reports =
                cells.par_iter().map(|&(f, n)| check_chowla(f, n, samples, seed, &cfg)).collect::<Result<Vec<_>>>()?;
            Ok(SuiteRun { suite, reports, fits: Vec::new() })
        }
    }
}

pub fn to_json(reports: &[VerificationReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<Vec<VerificationReport>> {
    serde_json::from_str(text).map_err(|e| Error::ConstraintViolation(format!("bad report JSON: {e}")))
}

pub fn to_csv(reports: &[VerificationReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if reports.is_empty() {
        w.write_record(CSV_HEADER).expect("in-memory write");
    }
    for r in reports {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
}

pub fn from_csv(text: &str) -> Result<Vec<VerificationReport>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::ConstraintViolation(format!("bad report CSV: {e}")))
}

pub const CSV_HEADER: [&str; 16] = [
    "theorem",
    "q",
    "p",
    "k",
    "n",
    "h",
    "kshift",
    "Q",
    "computed_num",
    "computed_den",
    "predicted_num",
    "predicted_den",
    "deviation",
    "normalized_deviation",
    "pass",
    "ms",
];
