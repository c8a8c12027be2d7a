//! Exact rationals and wide integer accumulators.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A reduced fraction with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::from_integer(v.into()))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        ExactRational(self.0.abs())
    }

    pub fn pow(&self, e: i32) -> Self {
        ExactRational(num_traits::Pow::pow(&self.0, e))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts a finite float exactly (every f64 is a dyadic rational).
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(ExactRational)
    }

    /// Decimal rendering with `sig` significant digits, rounded half away from zero.
    pub fn to_decimal(&self, sig: u32) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let sig = sig.max(1);
        let a = self.numer().abs();
        let b = self.denom().clone();
        let ten = BigInt::from(10);
        // e = floor(log10(a / b))
        let mut e = a.to_string().len() as i64 - b.to_string().len() as i64;
        let scaled = |e: i64| -> (BigInt, BigInt) {
            if e >= 0 {
                (a.clone(), &b * num_traits::pow(ten.clone(), e as usize))
            } else {
                (&a * num_traits::pow(ten.clone(), (-e) as usize), b.clone())
            }
        };
        loop {
            let (x, y) = scaled(e);
            if x < y {
                e -= 1;
            } else if x >= &y * &ten {
                e += 1;
            } else {
                break;
            }
        }
        let mut s = sig as i64 - 1 - e;
        let round = |s: i64| -> BigInt {
            let (x, y) = if s >= 0 {
                (&a * num_traits::pow(ten.clone(), s as usize), b.clone())
            } else {
                (a.clone(), &b * num_traits::pow(ten.clone(), (-s) as usize))
            };
            let (q, r) = x.div_rem(&y);
            if &r * 2 >= y {
                q + 1
            } else {
                q
            }
        };
        let mut digits = round(s);
        if digits >= num_traits::pow(ten.clone(), sig as usize) {
            s -= 1;
            digits = round(s);
        }
        let mut text = digits.to_string();
        if s <= 0 {
            text.push_str(&"0".repeat((-s) as usize));
        } else {
            let s = s as usize;
            if text.len() <= s {
                text = format!("{}{}", "0".repeat(s - text.len() + 1), text);
            }
            text.insert(text.len() - s, '.');
            while text.ends_with('0') {
                text.pop();
            }
            if text.ends_with('.') {
                text.pop();
            }
        }
        if self.is_negative() {
            text.insert(0, '-');
        }
        text
    }

    /// `|self| * q^(e/2) <= bound`, decided exactly (`e` counts half powers).
    pub fn abs_scaled_le(&self, q: u32, half_powers: u32, bound: &ExactRational) -> bool {
        if bound.is_negative() {
            return false;
        }
        let lhs = &(self * self) * &ExactRational::from_int(BigInt::from(q).pow(half_powers));
        lhs <= bound * bound
    }
}

impl From<i64> for ExactRational {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl From<BigInt> for ExactRational {
    fn from(v: BigInt) -> Self {
        Self::from_int(v)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: ExactRational) -> ExactRational {
                ExactRational((self.0).$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational((&self.0).$m(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

/// Integer accumulator: 128-bit with overflow checks, promoted to a big
/// integer if a check ever trips.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WideSum {
    Small(i128),
    Big(BigInt),
}

impl Default for WideSum {
    fn default() -> Self {
        WideSum::Small(0)
    }
}

impl WideSum {
    pub fn add_i128(self, x: i128) -> Self {
        match self {
            WideSum::Small(s) => match s.checked_add(x) {
                Some(v) => WideSum::Small(v),
                None => WideSum::Big(BigInt::from(s) + x),
            },
            WideSum::Big(b) => WideSum::Big(b + x),
        }
    }

    pub fn merge(self, other: WideSum) -> Self {
        match (self, other) {
            (s, WideSum::Small(x)) => s.add_i128(x),
            (WideSum::Small(x), WideSum::Big(b)) => WideSum::Big(b + x),
            (WideSum::Big(a), WideSum::Big(b)) => WideSum::Big(a + b),
        }
    }

    pub fn into_bigint(self) -> BigInt {
        match self {
            WideSum::Small(v) => BigInt::from(v),
            WideSum::Big(b) => b,
        }
    }
}

/// `q^e` as a big integer.
pub fn big_pow(q: u32, e: u32) -> BigInt {
    BigInt::from(q).pow(e)
}

pub fn sign_of(x: &BigInt) -> Ordering {
    match x.sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_and_displayed() {
        let r = ExactRational::new(6, 9);
        assert_eq!(r.to_string(), "2/3");
        assert_eq!(ExactRational::new(4, -2).to_string(), "-2");
        assert_eq!((ExactRational::new(2, 3) - ExactRational::one()).to_string(), "-1/3");
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(ExactRational::new(-1, 3).to_decimal(12), "-0.333333333333");
        assert_eq!(ExactRational::new(1, 2).to_decimal(12), "0.5");
        assert_eq!(ExactRational::new(2, 3).to_decimal(12), "0.666666666667");
        assert_eq!(ExactRational::from_int(-25).to_decimal(12), "-25");
        assert_eq!(ExactRational::new(999_999_999_999_999i64, 1_000_000_000_000_000i64).to_decimal(12), "1");
        assert_eq!(ExactRational::new(1, 1_000_000).to_decimal(3), "0.000001");
        assert_eq!(ExactRational::from_int(123_456_789_012_345i64).to_decimal(12), "123456789012000");
    }

    #[test]
    fn scaled_comparison_is_exact() {
        // |1/2| * sqrt(4) = 1
        let half = ExactRational::new(1, 2);
        assert!(half.abs_scaled_le(4, 1, &ExactRational::one()));
        assert!(!half.abs_scaled_le(5, 1, &ExactRational::one()));
        // |-1/8| * 4^(3/2) = 1
        assert!(ExactRational::new(-1, 8).abs_scaled_le(4, 3, &ExactRational::one()));
    }

    #[test]
    fn wide_sum_promotes() {
        let s = WideSum::Small(i128::MAX).add_i128(1);
        assert_eq!(s.into_bigint(), BigInt::from(i128::MAX) + 1);
        let t = WideSum::Small(5).merge(WideSum::Big(BigInt::from(7)));
        assert_eq!(t.into_bigint(), BigInt::from(12));
    }
}
