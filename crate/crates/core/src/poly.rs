//! Laurent polynomials over the series field: sparse exponent vectors in Z^n
//! with Series coefficients.

use crate::exp::Exp;
use crate::field::CoeffField;
use crate::series::{Series, SeriesError};
use std::collections::BTreeMap;

/// A coefficient that is zero to finite precision is retained (it is not
/// provably zero and downstream weight computations must see it); only exact
/// zeros are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly<F: CoeffField> {
    nvars: usize,
    monomials: BTreeMap<Vec<i64>, Series<F>>,
}

impl<F: CoeffField> LaurentPoly<F> {
    pub fn new(nvars: usize) -> Self {
        assert!(nvars >= 1, "Laurent polynomial needs at least one variable");
        LaurentPoly {
            nvars,
            monomials: BTreeMap::new(),
        }
    }

    pub fn from_monomials<I>(field: &F, nvars: usize, monomials: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i64>, Series<F>)>,
    {
        let mut p = LaurentPoly::new(nvars);
        for (u, a) in monomials {
            p.add_term(field, u, a);
        }
        p
    }

    pub fn add_term(&mut self, field: &F, u: Vec<i64>, a: Series<F>) {
        assert_eq!(u.len(), self.nvars, "exponent vector arity mismatch");
        if a.is_exact_zero() {
            return;
        }
        match self.monomials.remove(&u) {
            None => {
                self.monomials.insert(u, a);
            }
            Some(old) => {
                let sum = old.add(field, &a);
                if !sum.is_exact_zero() {
                    self.monomials.insert(u, sum);
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&Vec<i64>, &Series<F>)> {
        self.monomials.iter()
    }

    pub fn num_monomials(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn coeff(&self, u: &[i64]) -> Option<&Series<F>> {
        self.monomials.get(u)
    }

    pub fn neg(&self, field: &F) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            monomials: self
                .monomials
                .iter()
                .map(|(u, a)| (u.clone(), a.neg(field)))
                .collect(),
        }
    }

    pub fn add(&self, field: &F, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (u, a) in &other.monomials {
            out.add_term(field, u.clone(), a.clone());
        }
        out
    }

    pub fn sub(&self, field: &F, other: &Self) -> Self {
        self.add(field, &other.neg(field))
    }

    pub fn mul(&self, field: &F, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = LaurentPoly::new(self.nvars);
        for (u1, a1) in &self.monomials {
            for (u2, a2) in &other.monomials {
                let u: Vec<i64> = u1.iter().zip(u2).map(|(a, b)| a + b).collect();
                out.add_term(field, u, a1.mul(field, a2));
            }
        }
        out
    }

    /// Multiply by the single monomial a * x^u.
    pub fn mul_monomial(&self, field: &F, a: &Series<F>, u: &[i64]) -> Self {
        assert_eq!(u.len(), self.nvars);
        let mut out = LaurentPoly::new(self.nvars);
        for (u1, a1) in &self.monomials {
            let shifted: Vec<i64> = u1.iter().zip(u).map(|(x, y)| x + y).collect();
            out.add_term(field, shifted, a1.mul(field, a));
        }
        out
    }

    /// Coefficient twist a_u -> a_u * t^(-<u,v>): the effect on coefficients of
    /// substituting x_i -> t^(-v_i) x_i. With v = [-r] in one variable this is
    /// the z -> t^r z normalization.
    pub fn twist(&self, v: &[Exp]) -> Self {
        assert_eq!(v.len(), self.nvars);
        LaurentPoly {
            nvars: self.nvars,
            monomials: self
                .monomials
                .iter()
                .map(|(u, a)| {
                    let mut dot = Exp::zero();
                    for (ui, vi) in u.iter().zip(v) {
                        dot = &dot + &vi.mul_int(*ui);
                    }
                    (u.clone(), a.scale_t(&-(&dot)))
                })
                .collect(),
        }
    }

    fn var_power(
        field: &F,
        x: &Series<F>,
        e: i64,
        inv_cache: &mut Option<Series<F>>,
    ) -> Result<Series<F>, SeriesError> {
        if e >= 0 {
            Ok(x.pow(field, e as u64))
        } else {
            if inv_cache.is_none() {
                *inv_cache = Some(x.invert(field)?);
            }
            Ok(inv_cache.as_ref().unwrap().pow(field, (-e) as u64))
        }
    }

    /// Evaluate at a tuple of series, one per variable.
    pub fn eval(&self, field: &F, point: &[Series<F>]) -> Result<Series<F>, SeriesError> {
        assert_eq!(point.len(), self.nvars);
        let mut inv_caches: Vec<Option<Series<F>>> = vec![None; self.nvars];
        let mut acc = Series::exact_zero();
        for (u, a) in &self.monomials {
            let mut term = a.clone();
            for (i, &e) in u.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = Self::var_power(field, &point[i], e, &mut inv_caches[i])?;
                term = term.mul(field, &p);
            }
            acc = acc.add(field, &term);
        }
        Ok(acc)
    }

    /// Substitute series for every variable except the first; the result is
    /// univariate in that variable.
    pub fn specialize_tail(
        &self,
        field: &F,
        tail: &[Series<F>],
    ) -> Result<LaurentPoly<F>, SeriesError> {
        assert_eq!(tail.len() + 1, self.nvars);
        let mut inv_caches: Vec<Option<Series<F>>> = vec![None; tail.len()];
        let mut out = LaurentPoly::new(1);
        for (u, a) in &self.monomials {
            let mut coeff = a.clone();
            for (i, &e) in u[1..].iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = Self::var_power(field, &tail[i], e, &mut inv_caches[i])?;
                coeff = coeff.mul(field, &p);
            }
            out.add_term(field, vec![u[0]], coeff);
        }
        Ok(out)
    }

    /// Exponent range in the single variable; None for the zero polynomial.
    pub fn univariate_span(&self) -> Option<(i64, i64)> {
        assert_eq!(self.nvars, 1, "univariate operation on multivariate poly");
        let mut degs = self.monomials.keys().map(|u| u[0]);
        let first = degs.next()?;
        let (mut lo, mut hi) = (first, first);
        for d in degs {
            lo = lo.min(d);
            hi = hi.max(d);
        }
        Some((lo, hi))
    }

    /// Univariate coefficient of z^j.
    pub fn coeff_of(&self, j: i64) -> Option<&Series<F>> {
        assert_eq!(self.nvars, 1);
        self.monomials.get(&vec![j])
    }
}
