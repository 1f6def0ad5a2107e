//! Truncated generalized power series: finitely many terms with rational
//! exponents plus an explicit precision bound.

use crate::exp::{Exp, Precision};
use crate::field::CoeffField;
use std::collections::BTreeMap;
use std::error::Error;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesError {
    /// Operation needs a term but the series is zero to its precision.
    ZeroSeries,
    /// An exact series with two or more terms has no finite exact inverse;
    /// truncate to a working precision first.
    InverseNeedsPrecision,
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::ZeroSeries => write!(f, "series is zero to its precision"),
            SeriesError::InverseNeedsPrecision => {
                write!(f, "exact non-monomial series: truncate before inverting")
            }
        }
    }
}

impl Error for SeriesError {}

/// Invariants: every stored coefficient is nonzero, every stored exponent is
/// admitted by `precision`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<F: CoeffField> {
    terms: BTreeMap<Exp, F::Elem>,
    precision: Precision,
}

impl<F: CoeffField> Series<F> {
    pub fn zero(precision: Precision) -> Self {
        Series {
            terms: BTreeMap::new(),
            precision,
        }
    }

    pub fn exact_zero() -> Self {
        Series::zero(Precision::Exact)
    }

    pub fn monomial(field: &F, coeff: F::Elem, exp: Exp, precision: Precision) -> Self {
        let mut s = Series::zero(precision);
        if !field.is_zero(&coeff) && s.precision.admits(&exp) {
            s.terms.insert(exp, coeff);
        }
        s
    }

    pub fn constant(field: &F, coeff: F::Elem) -> Self {
        Series::monomial(field, coeff, Exp::zero(), Precision::Exact)
    }

    pub fn one(field: &F) -> Self {
        Series::constant(field, field.one())
    }

    pub fn from_terms<I>(field: &F, terms: I, precision: Precision) -> Self
    where
        I: IntoIterator<Item = (Exp, F::Elem)>,
    {
        let mut s = Series::zero(precision);
        for (e, c) in terms {
            s.insert_term(field, e, c);
        }
        s
    }

    fn insert_term(&mut self, field: &F, e: Exp, c: F::Elem) {
        if field.is_zero(&c) || !self.precision.admits(&e) {
            return;
        }
        match self.terms.remove(&e) {
            None => {
                self.terms.insert(e, c);
            }
            Some(old) => {
                let sum = field.add(&old, &c);
                if !field.is_zero(&sum) {
                    self.terms.insert(e, sum);
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &F::Elem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn precision(&self) -> &Precision {
        &self.precision
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.terms.is_empty()
    }

    /// True only for the exact zero: no terms and nothing hidden beyond a
    /// finite bound.
    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.precision.is_exact()
    }

    /// Least exponent of the support; None when zero to precision.
    pub fn valuation(&self) -> Option<&Exp> {
        self.terms.keys().next()
    }

    /// Valuation extended by precision: the valuation if there is a term, else
    /// the precision itself (so the zero series contributes its bound, and the
    /// exact zero acts as plus infinity).
    pub fn ext_valuation(&self) -> Precision {
        match self.valuation() {
            Some(e) => Precision::Finite(e.clone()),
            None => self.precision.clone(),
        }
    }

    pub fn coeff(&self, field: &F, e: &Exp) -> F::Elem {
        self.terms.get(e).cloned().unwrap_or_else(|| field.zero())
    }

    /// Leading coefficient.
    pub fn residue(&self) -> Result<&F::Elem, SeriesError> {
        self.terms
            .values()
            .next()
            .ok_or(SeriesError::ZeroSeries)
    }

    pub fn leading(&self) -> Option<(&Exp, &F::Elem)> {
        self.terms.iter().next()
    }

    pub fn add(&self, field: &F, other: &Self) -> Self {
        let precision = Precision::min(&self.precision, &other.precision);
        let mut out = Series::zero(precision);
        for (e, c) in &self.terms {
            out.insert_term(field, e.clone(), c.clone());
        }
        for (e, c) in &other.terms {
            out.insert_term(field, e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self, field: &F) -> Self {
        Series {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), field.neg(c)))
                .collect(),
            precision: self.precision.clone(),
        }
    }

    pub fn sub(&self, field: &F, other: &Self) -> Self {
        self.add(field, &other.neg(field))
    }

    pub fn mul(&self, field: &F, other: &Self) -> Self {
        let precision = Precision::min(
            &(&self.precision + &other.ext_valuation()),
            &(&other.precision + &self.ext_valuation()),
        );
        let mut out = Series::zero(precision);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.insert_term(field, ea + eb, field.mul(ca, cb));
            }
        }
        out
    }

    /// Multiply by the scalar c.
    pub fn scale(&self, field: &F, c: &F::Elem) -> Self {
        if field.is_zero(c) {
            return Series::zero(self.precision.clone());
        }
        let mut out = Series::zero(self.precision.clone());
        for (e, a) in &self.terms {
            out.insert_term(field, e.clone(), field.mul(a, c));
        }
        out
    }

    /// Multiply by t^e: shifts every exponent and the precision.
    pub fn scale_t(&self, e: &Exp) -> Self {
        Series {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k + e, c.clone()))
                .collect(),
            precision: self.precision.shift(e),
        }
    }

    pub fn truncate(&self, rho: &Exp) -> Self {
        let precision = Precision::min(&self.precision, &Precision::Finite(rho.clone()));
        Series {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| precision.admits(e))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
            precision,
        }
    }

    pub fn pow(&self, field: &F, n: u64) -> Self {
        let mut acc = Series::one(field);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(field, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(field, &base);
            }
        }
        acc
    }

    /// Multiplicative inverse to the precision determined by the input: for a
    /// series of valuation e known to O(t^rho) the inverse is known to
    /// O(t^(rho - 2e)). Exact monomials invert exactly.
    pub fn invert(&self, field: &F) -> Result<Self, SeriesError> {
        let (lead_e, lead_c) = match self.leading() {
            Some((e, c)) => (e.clone(), c.clone()),
            None => return Err(SeriesError::ZeroSeries),
        };
        let inv_c = field
            .inv(&lead_c)
            .expect("nonzero coefficient in a field has an inverse");
        if self.terms.len() == 1 {
            let prec = self.precision.shift(&-(&lead_e)).shift(&-(&lead_e));
            return Ok(Series::monomial(field, inv_c, -(&lead_e), prec));
        }
        let rho = match &self.precision {
            Precision::Exact => return Err(SeriesError::InverseNeedsPrecision),
            Precision::Finite(r) => r.clone(),
        };
        // self = c t^e (1 + w), nu(w) > 0; invert the unit by a geometric sum
        // truncated at rho - e (the unit's own relative precision).
        let unit_prec = &rho - &lead_e;
        let mut w = Series::zero(Precision::Finite(unit_prec.clone()));
        for (e, c) in self.terms.iter().skip(1) {
            w.insert_term(field, e - &lead_e, field.mul(c, &inv_c));
        }
        let w_val = w
            .valuation()
            .cloned()
            .unwrap_or_else(|| unit_prec.clone());
        let mut geo = Series::one(field).truncate(&unit_prec);
        let mut power = Series::one(field).truncate(&unit_prec);
        let mut sign_neg = true;
        let mut covered = Exp::zero();
        while covered < unit_prec && !w.is_zero_to_precision() {
            power = power.mul(field, &w).truncate(&unit_prec);
            if power.is_zero_to_precision() {
                break;
            }
            geo = if sign_neg {
                geo.sub(field, &power)
            } else {
                geo.add(field, &power)
            };
            sign_neg = !sign_neg;
            covered = &covered + &w_val;
        }
        // 1 / (c t^e) times the unit inverse; result precision rho - 2e.
        let shifted = geo.scale(field, &inv_c).scale_t(&-(&lead_e));
        Ok(shifted.truncate(&(&rho - &lead_e.mul_int(2))))
    }
}
