//! Exact rational exponents and truncation bounds.
//!
//! Exponents live in Q and are stored reduced with a positive denominator,
//! so equality and ordering are structural. All arithmetic is exact; there
//! is no overflow at any magnitude.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

/// Exponent of the series variable `t`. Wraps an exact rational.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exp(BigRational);

impl Exp {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "exponent denominator must be nonzero");
        Exp(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(n: i64) -> Self {
        Exp(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Exp(r)
    }

    pub fn zero() -> Self {
        Exp(BigRational::zero())
    }

    pub fn one() -> Self {
        Exp(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    /// Exact division by a nonzero integer.
    pub fn div_int(&self, n: i64) -> Self {
        assert!(n != 0);
        Exp(&self.0 / BigRational::from_integer(BigInt::from(n)))
    }

    pub fn mul_int(&self, n: i64) -> Self {
        Exp(&self.0 * BigRational::from_integer(BigInt::from(n)))
    }

    pub fn min(a: &Exp, b: &Exp) -> Exp {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn max(a: &Exp, b: &Exp) -> Exp {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

impl Add for &Exp {
    type Output = Exp;
    fn add(self, rhs: &Exp) -> Exp {
        Exp(&self.0 + &rhs.0)
    }
}

impl Sub for &Exp {
    type Output = Exp;
    fn sub(self, rhs: &Exp) -> Exp {
        Exp(&self.0 - &rhs.0)
    }
}

impl Neg for &Exp {
    type Output = Exp;
    fn neg(self) -> Exp {
        Exp(-&self.0)
    }
}

impl Mul for &Exp {
    type Output = Exp;
    fn mul(self, rhs: &Exp) -> Exp {
        Exp(&self.0 * &rhs.0)
    }
}

impl fmt::Display for Exp {
    /// Canonical form: `num` when the denominator is 1, else `num/den`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Exp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for Exp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n = BigInt::from_str(num).map_err(|_| format!("bad rational `{s}`"))?;
        let d = BigInt::from_str(den).map_err(|_| format!("bad rational `{s}`"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        Ok(Exp(BigRational::new(n, d)))
    }
}

/// Truncation bound of a series: either a finite exponent (terms at or above
/// it are unknown) or `Exact` (all terms are known).
///
/// Ordered with `Exact` above every finite bound, so `min` composes bounds the
/// way truncation does.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Precision {
    Finite(Exp),
    Exact,
}

impl Precision {
    pub fn finite(num: i64, den: i64) -> Self {
        Precision::Finite(Exp::new(num, den))
    }

    pub fn from_int(n: i64) -> Self {
        Precision::Finite(Exp::from_int(n))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Precision::Exact)
    }

    pub fn min(a: &Precision, b: &Precision) -> Precision {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// Shift a finite bound by an exponent; `Exact` absorbs the shift.
    pub fn shift(&self, by: &Exp) -> Precision {
        match self {
            Precision::Finite(e) => Precision::Finite(e + by),
            Precision::Exact => Precision::Exact,
        }
    }

    /// True when a term at exponent `e` is inside the known range.
    pub fn admits(&self, e: &Exp) -> bool {
        match self {
            Precision::Finite(p) => e < p,
            Precision::Exact => true,
        }
    }
}

/// Sum of bounds, with `Exact` acting as plus infinity. Used by the product
/// precision rule.
impl Add for &Precision {
    type Output = Precision;
    fn add(self, rhs: &Precision) -> Precision {
        match (self, rhs) {
            (Precision::Finite(a), Precision::Finite(b)) => Precision::Finite(a + b),
            _ => Precision::Exact,
        }
    }
}

impl fmt::Debug for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Finite(e) => write!(f, "O(t^{})", e),
            Precision::Exact => write!(f, "exact"),
        }
    }
}
