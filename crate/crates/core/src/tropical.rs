//! Weights, initial forms, tropical membership, and univariate Newton
//! polygons.
//!
//! Two scales are in play and must not be confused. The weight of a monomial
//! a_u x^u at a point v is nu(a_u) - <u,v> and drives init_form, trop_member,
//! and the curve module. The Newton polygon works at candidate root
//! valuations r, minimizing nu(c_j) + j*r; the renormalized residual of the
//! segment at r coincides with the initial form taken at -r.

use crate::exp::{Exp, Precision};
use crate::field::CoeffField;
use crate::kpoly::KPoly;
use crate::poly::LaurentPoly;
use crate::series::Series;
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::error::Error;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TropError {
    ZeroPoly,
    /// A coefficient that is zero to its precision cannot certify a weight at
    /// or below the candidate minimum.
    PrecisionError { monomial: Vec<i64>, bound: Exp },
    Unsupported(String),
}

impl fmt::Display for TropError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TropError::ZeroPoly => write!(f, "zero polynomial"),
            TropError::PrecisionError { monomial, bound } => write!(
                f,
                "coefficient of x^{monomial:?} is zero to precision; its weight bound {bound} cannot certify the initial form"
            ),
            TropError::Unsupported(what) => write!(f, "unsupported: {what}"),
        }
    }
}

impl Error for TropError {}

/// Weight of the monomial a * x^u at v: nu(a) - <u,v>. The coefficient must
/// have a term.
pub fn weight<F: CoeffField>(u: &[i64], a: &Series<F>, v: &[Exp]) -> Exp {
    let nu = a
        .valuation()
        .expect("weight of a coefficient that is zero to precision");
    let mut dot = Exp::zero();
    for (ui, vi) in u.iter().zip(v) {
        dot = &dot + &vi.mul_int(*ui);
    }
    nu - &dot
}

/// Sum of the lowest-weight monomials of f at v, with coefficients reduced to
/// leading coefficients in k.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialForm<F: CoeffField> {
    nvars: usize,
    monomials: BTreeMap<Vec<i64>, F::Elem>,
    base_weight: Exp,
    point: Vec<Exp>,
}

impl<F: CoeffField> InitialForm<F> {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&Vec<i64>, &F::Elem)> {
        self.monomials.iter()
    }

    pub fn num_monomials(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_monomial(&self) -> bool {
        self.monomials.len() == 1
    }

    pub fn base_weight(&self) -> &Exp {
        &self.base_weight
    }

    pub fn point(&self) -> &[Exp] {
        &self.point
    }

    pub fn coeff(&self, u: &[i64]) -> Option<&F::Elem> {
        self.monomials.get(u)
    }

    /// Evaluate at a tuple of residues; entries paired with negative exponents
    /// must be nonzero.
    pub fn eval(&self, field: &F, xbar: &[F::Elem]) -> F::Elem {
        assert_eq!(xbar.len(), self.nvars);
        let mut acc = field.zero();
        for (u, c) in &self.monomials {
            let mut term = c.clone();
            for (i, &e) in u.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let base = if e > 0 {
                    xbar[i].clone()
                } else {
                    field
                        .inv(&xbar[i])
                        .expect("evaluation at zero with a negative exponent")
                };
                term = field.mul(&term, &field.pow(&base, e.unsigned_abs()));
            }
            acc = field.add(&acc, &term);
        }
        acc
    }

    /// Product of initial forms at the same point; base weights add.
    pub fn mul(&self, field: &F, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        assert_eq!(self.point, other.point, "initial forms at different points");
        let mut monomials: BTreeMap<Vec<i64>, F::Elem> = BTreeMap::new();
        for (u1, c1) in &self.monomials {
            for (u2, c2) in &other.monomials {
                let u: Vec<i64> = u1.iter().zip(u2).map(|(a, b)| a + b).collect();
                let add = field.mul(c1, c2);
                let cur = match monomials.remove(&u) {
                    None => add,
                    Some(old) => field.add(&old, &add),
                };
                if !field.is_zero(&cur) {
                    monomials.insert(u, cur);
                }
            }
        }
        InitialForm {
            nvars: self.nvars,
            monomials,
            base_weight: &self.base_weight + &other.base_weight,
            point: self.point.clone(),
        }
    }

    /// For a univariate initial form: dense coefficients with the degree
    /// shifted to start at zero, plus the shift.
    pub fn univariate_parts(&self, field: &F) -> (KPoly<F>, i64) {
        assert_eq!(self.nvars, 1);
        let lo = self.monomials.keys().map(|u| u[0]).min().unwrap();
        let hi = self.monomials.keys().map(|u| u[0]).max().unwrap();
        let mut coeffs = vec![field.zero(); (hi - lo + 1) as usize];
        for (u, c) in &self.monomials {
            coeffs[(u[0] - lo) as usize] = c.clone();
        }
        (KPoly::new(field, coeffs), lo)
    }
}

/// Weight bookkeeping shared by init_form and the curve module: certified
/// weights per monomial, failing when a zero-to-precision coefficient cannot
/// be ruled out of the minimum.
pub(crate) fn certified_weights<F: CoeffField>(
    f: &LaurentPoly<F>,
    v: &[Exp],
) -> Result<Vec<(Vec<i64>, Exp)>, TropError> {
    let mut certified: Vec<(Vec<i64>, Exp)> = Vec::new();
    let mut uncertain: Vec<(Vec<i64>, Exp)> = Vec::new();
    for (u, a) in f.monomials() {
        let mut dot = Exp::zero();
        for (ui, vi) in u.iter().zip(v) {
            dot = &dot + &vi.mul_int(*ui);
        }
        match a.valuation() {
            Some(nu) => certified.push((u.clone(), nu - &dot)),
            None => {
                let rho = match a.precision() {
                    Precision::Finite(r) => r.clone(),
                    Precision::Exact => unreachable!("exact zero coefficients are not stored"),
                };
                uncertain.push((u.clone(), &rho - &dot));
            }
        }
    }
    let w0 = match certified.iter().map(|(_, w)| w).min() {
        Some(w) => w.clone(),
        None => {
            let (u, bound) = uncertain
                .into_iter()
                .next()
                .expect("nonzero polynomial has monomials");
            return Err(TropError::PrecisionError { monomial: u, bound });
        }
    };
    for (u, bound) in uncertain {
        if bound <= w0 {
            return Err(TropError::PrecisionError { monomial: u, bound });
        }
    }
    Ok(certified)
}

pub fn init_form<F: CoeffField>(
    f: &LaurentPoly<F>,
    v: &[Exp],
) -> Result<InitialForm<F>, TropError> {
    if f.is_zero() {
        return Err(TropError::ZeroPoly);
    }
    assert_eq!(v.len(), f.nvars(), "point arity mismatch");
    let weights = certified_weights(f, v)?;
    let w0 = weights.iter().map(|(_, w)| w).min().unwrap().clone();
    let mut monomials = BTreeMap::new();
    for (u, w) in weights {
        if w == w0 {
            let coeff = f.coeff(&u).unwrap();
            monomials.insert(u, coeff.residue().unwrap().clone());
        }
    }
    Ok(InitialForm {
        nvars: f.nvars(),
        monomials,
        base_weight: w0,
        point: v.to_vec(),
    })
}

/// True iff the initial form at v has at least two monomials.
pub fn trop_member<F: CoeffField>(f: &LaurentPoly<F>, v: &[Exp]) -> Result<bool, TropError> {
    Ok(init_form(f, v)?.num_monomials() >= 2)
}

/// One lower-hull edge of the Newton polygon: candidate root valuation,
/// lattice multiplicity, and the residual polynomial over k (degree equals
/// the multiplicity, nonzero constant term).
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonSegment<F: CoeffField> {
    pub root_valuation: Exp,
    pub multiplicity: usize,
    pub residual: KPoly<F>,
}

/// Lower-hull segments of a univariate Laurent polynomial, sorted by
/// increasing root valuation. Segment multiplicities sum to deg - ord.
pub fn newton_polygon<F: CoeffField>(
    field: &F,
    g: &LaurentPoly<F>,
) -> Result<Vec<NewtonSegment<F>>, TropError> {
    if g.nvars() != 1 {
        return Err(TropError::Unsupported(format!(
            "newton polygon of a {}-variable polynomial",
            g.nvars()
        )));
    }
    if g.is_zero() {
        return Err(TropError::ZeroPoly);
    }
    // Certified support points (j, nu(c_j)); zero-to-precision coefficients
    // must end up strictly above the hull.
    let mut points: Vec<(i64, Exp)> = Vec::new();
    let mut uncertain: Vec<(i64, Exp)> = Vec::new();
    for (u, c) in g.monomials() {
        match c.valuation() {
            Some(nu) => points.push((u[0], nu.clone())),
            None => match c.precision() {
                Precision::Finite(rho) => uncertain.push((u[0], rho.clone())),
                Precision::Exact => unreachable!("exact zero coefficients are not stored"),
            },
        }
    }
    if points.is_empty() {
        let (j, bound) = uncertain.into_iter().next().unwrap();
        return Err(TropError::PrecisionError {
            monomial: vec![j],
            bound,
        });
    }
    points.sort_by_key(|a| a.0);
    let (lo, hi) = (points[0].0, points[points.len() - 1].0);
    // ord and deg must be certified by actual terms.
    for (j, bound) in &uncertain {
        if *j < lo || *j > hi {
            return Err(TropError::PrecisionError {
                monomial: vec![*j],
                bound: bound.clone(),
            });
        }
    }

    // Lower convex hull, strict turns only (collinear points merge into one
    // maximal edge).
    let cross = |a: &(i64, Exp), b: &(i64, Exp), c: &(i64, Exp)| -> BigRational {
        let (ax, ay) = (BigRational::from_integer(a.0.into()), a.1.as_rational());
        let (bx, by) = (BigRational::from_integer(b.0.into()), b.1.as_rational());
        let (cx, cy) = (BigRational::from_integer(c.0.into()), c.1.as_rational());
        (&bx - &ax) * (cy - ay) - (by - ay) * (&cx - &ax)
    };
    let mut hull: Vec<(i64, Exp)> = Vec::new();
    for p in &points {
        while hull.len() >= 2
            && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p)
                <= BigRational::from_integer(0.into())
        {
            hull.pop();
        }
        hull.push(p.clone());
    }

    // A hidden coefficient is harmless only if its precision bound sits
    // strictly above the hull envelope at its index.
    let hull_height = |j: i64| -> BigRational {
        for w in hull.windows(2) {
            let (x1, y1) = (&w[0].0, w[0].1.as_rational());
            let (x2, y2) = (&w[1].0, w[1].1.as_rational());
            if *x1 <= j && j <= *x2 {
                let dx = BigRational::from_integer((x2 - x1).into());
                let off = BigRational::from_integer((j - x1).into());
                return y1 + (y2 - y1) / dx * off;
            }
        }
        unreachable!("index inside [ord, deg] lies under some hull edge")
    };
    for (j, bound) in &uncertain {
        if hull.len() >= 2 && bound.as_rational() <= &hull_height(*j) {
            return Err(TropError::PrecisionError {
                monomial: vec![*j],
                bound: bound.clone(),
            });
        }
        if hull.len() == 1 {
            // Single certified monomial: any hidden coefficient makes the
            // polygon uncertain.
            return Err(TropError::PrecisionError {
                monomial: vec![*j],
                bound: bound.clone(),
            });
        }
    }

    let mut segments = Vec::new();
    for w in hull.windows(2) {
        let (j1, y1) = (&w[0].0, &w[0].1);
        let (j2, y2) = (&w[1].0, &w[1].1);
        // root valuation r = -slope
        let slope = Exp::from_rational(
            (y2.as_rational() - y1.as_rational())
                / BigRational::from_integer((j2 - j1).into()),
        );
        let r = -(&slope);
        // Achieving set of min over certified points of nu(c_j) + j*r.
        let value_at = |j: i64, nu: &Exp| -> Exp { nu + &r.mul_int(j) };
        let min_val = value_at(*j1, y1);
        let achieving: Vec<i64> = points
            .iter()
            .filter(|(j, nu)| value_at(*j, nu) == min_val)
            .map(|(j, _)| *j)
            .collect();
        let jmin = *achieving.iter().min().unwrap();
        let jmax = *achieving.iter().max().unwrap();
        debug_assert_eq!(jmin, *j1);
        debug_assert_eq!(jmax, *j2);
        let mut coeffs = vec![field.zero(); (jmax - jmin + 1) as usize];
        for j in &achieving {
            let c = g.coeff_of(*j).unwrap();
            coeffs[(j - jmin) as usize] = c.residue().unwrap().clone();
        }
        segments.push(NewtonSegment {
            root_valuation: r,
            multiplicity: (jmax - jmin) as usize,
            residual: KPoly::new(field, coeffs),
        });
    }
    segments.sort_by(|a, b| a.root_valuation.cmp(&b.root_valuation));
    Ok(segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FiniteField, RationalField};
    use num_bigint::BigInt;

    fn qi(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    fn f() -> RationalField {
        RationalField
    }

    fn c(n: i64) -> Series<RationalField> {
        Series::constant(&f(), qi(n))
    }

    fn t_pow(num: i64, den: i64) -> Series<RationalField> {
        Series::monomial(&f(), qi(1), Exp::new(num, den), Precision::Exact)
    }

    fn v(entries: &[i64]) -> Vec<Exp> {
        entries.iter().map(|&e| Exp::from_int(e)).collect()
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weight(&[0], &t_pow(3, 1), &v(&[7])), Exp::from_int(3));
        assert_eq!(weight(&[1, 0], &c(1), &v(&[2, 5])), Exp::from_int(-2));
        assert_eq!(weight(&[1, 1], &t_pow(1, 1), &v(&[1, 0])), Exp::zero());
    }

    #[test]
    fn init_form_of_tropical_line() {
        let field = f();
        let p = LaurentPoly::from_monomials(
            &field,
            2,
            [
                (vec![1, 0], c(1)),
                (vec![0, 1], c(1)),
                (vec![0, 0], c(1)),
            ],
        );
        let i = init_form(&p, &v(&[0, 0])).unwrap();
        assert_eq!(i.num_monomials(), 3);
        assert_eq!(i.base_weight(), &Exp::zero());
        assert!(trop_member(&p, &v(&[0, 0])).unwrap());
        // weights -1, -2, 0: unique min at y
        assert!(!trop_member(&p, &v(&[1, 2])).unwrap());
    }

    #[test]
    fn init_form_univariate_monomial_case() {
        let field = f();
        // z^2 - t z - t^3 at v = 1: weights -2, 0, 3; monomial z^2
        let p = LaurentPoly::from_monomials(
            &field,
            1,
            [
                (vec![2], c(1)),
                (vec![1], t_pow(1, 1).neg(&field)),
                (vec![0], t_pow(3, 1).neg(&field)),
            ],
        );
        let i = init_form(&p, &v(&[1])).unwrap();
        assert!(i.is_monomial());
        assert_eq!(i.base_weight(), &Exp::from_int(-2));
        assert_eq!(i.coeff(&[2]), Some(&qi(1)));
    }

    #[test]
    fn init_form_drops_higher_order_tail() {
        let field = f();
        // z - (1+t) at 0 -> z - 1
        let p = LaurentPoly::from_monomials(
            &field,
            1,
            [(vec![1], c(1)), (vec![0], c(1).add(&field, &t_pow(1, 1)).neg(&field))],
        );
        let i = init_form(&p, &v(&[0])).unwrap();
        assert_eq!(i.num_monomials(), 2);
        assert_eq!(i.coeff(&[0]), Some(&qi(-1)));
        assert_eq!(i.coeff(&[1]), Some(&qi(1)));
    }

    #[test]
    fn precision_error_only_when_bound_reaches_minimum() {
        let field = f();
        let mut p = LaurentPoly::new(1);
        p.add_term(&field, vec![1], c(1));
        p.add_term(
            &field,
            vec![0],
            Series::zero(Precision::from_int(2)),
        );
        // At v=0 the hidden coefficient is bounded by weight 2 > 0: safe.
        let i = init_form(&p, &v(&[0])).unwrap();
        assert!(i.is_monomial());
        // At v=-2 the z-weight is 2 and the bound 2 ties: cannot certify.
        let err = init_form(&p, &v(&[-2])).unwrap_err();
        assert!(matches!(err, TropError::PrecisionError { .. }));
    }

    #[test]
    fn initial_forms_multiply() {
        let field = f();
        let a = LaurentPoly::from_monomials(
            &field,
            2,
            [(vec![1, 0], c(1)), (vec![0, 1], c(1))],
        );
        let b = LaurentPoly::from_monomials(
            &field,
            2,
            [(vec![1, 0], c(1)), (vec![0, 0], c(1))],
        );
        let prod = a.mul(&field, &b);
        let at = v(&[0, 0]);
        let lhs = init_form(&prod, &at).unwrap();
        let rhs = init_form(&a, &at)
            .unwrap()
            .mul(&field, &init_form(&b, &at).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn newton_polygon_single_segment() {
        let field = f();
        // z^2 - (1+t): one segment, valuation 0, multiplicity 2, z^2 - 1
        let p = LaurentPoly::from_monomials(
            &field,
            1,
            [(vec![2], c(1)), (vec![0], c(1).add(&field, &t_pow(1, 1)).neg(&field))],
        );
        let segs = newton_polygon(&field, &p).unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].root_valuation, Exp::zero());
        assert_eq!(segs[0].multiplicity, 2);
        assert_eq!(
            segs[0].residual,
            KPoly::new(&field, vec![qi(-1), qi(0), qi(1)])
        );
    }

    #[test]
    fn newton_polygon_artin_schreier() {
        let p = 3u64;
        let field = FiniteField::new(p, 1).unwrap();
        // z^3 - z - t^-1 over F_3
        let one = field.one();
        let poly = LaurentPoly::from_monomials(
            &field,
            1,
            [
                (vec![3], Series::constant(&field, one.clone())),
                (vec![1], Series::constant(&field, field.neg(&one))),
                (
                    vec![0],
                    Series::monomial(
                        &field,
                        field.neg(&one),
                        Exp::from_int(-1),
                        Precision::Exact,
                    ),
                ),
            ],
        );
        let segs = newton_polygon(&field, &poly).unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].root_valuation, Exp::new(-1, 3));
        assert_eq!(segs[0].multiplicity, 3);
        // residual z^3 - 1 = (z-1)^3
        let roots = segs[0].residual.roots(&field);
        assert_eq!(roots.len(), 1);
        assert!(field.is_one(&roots[0].0));
        assert_eq!(roots[0].1, 3);
    }

    #[test]
    fn newton_polygon_two_segments() {
        let field = f();
        // (z-1)(z-t) = z^2 - (1+t)z + t
        let p = LaurentPoly::from_monomials(
            &field,
            1,
            [
                (vec![2], c(1)),
                (vec![1], c(1).add(&field, &t_pow(1, 1)).neg(&field)),
                (vec![0], t_pow(1, 1)),
            ],
        );
        let segs = newton_polygon(&field, &p).unwrap();
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[0].root_valuation, Exp::zero());
        assert_eq!(segs[0].multiplicity, 1);
        assert_eq!(segs[1].root_valuation, Exp::one());
        assert_eq!(segs[1].multiplicity, 1);
        let total: usize = segs.iter().map(|s| s.multiplicity).sum();
        assert_eq!(total, 2);
    }

    #[test]
    fn newton_polygon_collinear_merges() {
        let field = f();
        // z^2 + z + 1: three collinear support points; one segment mult 2
        let p = LaurentPoly::from_monomials(
            &field,
            1,
            [(vec![2], c(1)), (vec![1], c(1)), (vec![0], c(1))],
        );
        let segs = newton_polygon(&field, &p).unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].multiplicity, 2);
        assert_eq!(
            segs[0].residual,
            KPoly::new(&field, vec![qi(1), qi(1), qi(1)])
        );
    }

    #[test]
    fn segment_residual_matches_initial_form_at_minus_r() {
        let field = f();
        let p = LaurentPoly::from_monomials(
            &field,
            1,
            [
                (vec![2], c(1)),
                (vec![1], c(1).add(&field, &t_pow(1, 1)).neg(&field)),
                (vec![0], t_pow(1, 1)),
            ],
        );
        for seg in newton_polygon(&field, &p).unwrap() {
            let at = vec![-(&seg.root_valuation)];
            let init = init_form(&p, &at).unwrap();
            let (kp, _) = init.univariate_parts(&field);
            assert_eq!(kp, seg.residual, "slope {}", seg.root_valuation);
        }
    }
}
