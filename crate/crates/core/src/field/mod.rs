//! Coefficient fields for series arithmetic.
//!
//! Two concrete fields are provided: exact rationals and F_{p^k} for a small
//! prime power. Neither is algebraically closed; operations that need a root
//! inside the field report failure with the offending polynomial instead of
//! extending the field.

mod finite;
mod rational;

pub use finite::{FiniteField, FqElem};
pub use rational::RationalField;

use num_bigint::BigInt;
use std::cmp::Ordering;
use std::fmt;

/// A field of coefficients. Implementations carry whatever context the
/// element representation needs (e.g. the modulus polynomial for F_{p^k}),
/// so every element operation goes through the field value.
pub trait CoeffField: Clone + PartialEq + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug;

    /// 0 for characteristic zero.
    fn characteristic(&self) -> u64;

    /// Number of elements, `None` when infinite.
    fn cardinality(&self) -> Option<u128>;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn is_one(&self, a: &Self::Elem) -> bool;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn elem_from_int(&self, n: i64) -> Self::Elem;
    fn elem_from_bigint(&self, n: &BigInt) -> Self::Elem;

    /// Total order on elements used wherever a deterministic choice among
    /// field elements is required: numeric order over Q, lexicographic order
    /// on the coefficient vector over F_{p^k}.
    fn elem_cmp(&self, a: &Self::Elem, b: &Self::Elem) -> Ordering;

    /// Canonical text form; `parse_elem` accepts exactly this (plus sign and
    /// whitespace slack).
    fn render(&self, a: &Self::Elem) -> String;
    fn parse_elem(&self, s: &str) -> Result<Self::Elem, String>;

    /// Every root of the dense polynomial `coeffs` (index = degree) that lies
    /// in this field, with exact multiplicity, sorted by `elem_cmp`.
    ///
    /// The polynomial must be nonzero.
    fn roots(&self, coeffs: &[Self::Elem]) -> Vec<(Self::Elem, usize)>;

    /// Injective enumeration of field elements used by seeded sampling;
    /// index 0 is zero. Finite fields wrap at their cardinality.
    fn nth_element(&self, index: u128) -> Self::Elem;

    fn pow(&self, a: &Self::Elem, n: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }
}

/// Problems constructing a field from user parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldError {
    NotPrime(u64),
    BadExtension { p: u64, k: usize },
    TooLarge { p: u64, k: usize },
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::NotPrime(p) => write!(f, "{p} is not prime"),
            FieldError::BadExtension { p, k } => {
                write!(f, "invalid extension degree {k} over F_{p}")
            }
            FieldError::TooLarge { p, k } => {
                write!(f, "field F_{{{p}^{k}}} exceeds the supported size")
            }
        }
    }
}

impl std::error::Error for FieldError {}

/// Divide `num` by the linear factor (x - r), returning the quotient when the
/// remainder is zero. Dense representation, index = degree.
pub(crate) fn deflate<F: CoeffField>(
    field: &F,
    coeffs: &[F::Elem],
    r: &F::Elem,
) -> Option<Vec<F::Elem>> {
    if coeffs.len() < 2 {
        return None;
    }
    let mut quot = vec![field.zero(); coeffs.len() - 1];
    let mut carry = field.zero();
    for i in (0..coeffs.len()).rev() {
        let val = field.add(&coeffs[i], &field.mul(&carry, r));
        if i == 0 {
            if field.is_zero(&val) {
                return Some(quot);
            }
            return None;
        }
        quot[i - 1] = val.clone();
        carry = val;
    }
    unreachable!()
}

/// Root multiplicity by repeated exact deflation.
pub(crate) fn multiplicity_of<F: CoeffField>(
    field: &F,
    coeffs: &[F::Elem],
    r: &F::Elem,
) -> usize {
    let mut m = 0;
    let mut cur = coeffs.to_vec();
    while let Some(q) = deflate(field, &cur, r) {
        m += 1;
        cur = q;
        if cur.iter().all(|c| field.is_zero(c)) {
            break;
        }
    }
    m
}
