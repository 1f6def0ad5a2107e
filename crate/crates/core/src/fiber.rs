//! Points of a hypersurface with prescribed tropicalization and residues,
//! and seeded sampling of tropical fibers.
//!
//! A prescription (v, xbar) with the initial form nondegenerate at v is
//! realized by scaling each variable to unit valuation, freezing the tail
//! variables at exact series with the prescribed residues, and lifting the
//! first coordinate as a univariate root. When a specialization collapses
//! (the specialized polynomial vanishes or loses its unit-valuation root),
//! the tails are perturbed and the lift retried a bounded number of times.

use crate::exp::{Exp, Precision};
use crate::field::CoeffField;
use crate::kpoly::KPoly;
use crate::lifting::{lift_root, LiftBudget};
use crate::poly::LaurentPoly;
use crate::series::{Series, SeriesError};
use crate::tropical::{init_form, InitialForm, TropError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::collections::BTreeMap;
use std::error::Error;
use std::fmt;

const MAX_POINT_ATTEMPTS: usize = 8;
const SAMPLE_ATTEMPTS_PER_POINT: usize = 64;

#[derive(Clone, Debug)]
pub struct FiberPoint<F: CoeffField> {
    pub coords: Vec<Series<F>>,
    /// Componentwise valuations of the coordinates.
    pub trop: Vec<Exp>,
    pub residues: Vec<F::Elem>,
    /// Certified lower bound on the valuation of f at the point.
    pub achieved_precision: Precision,
}

#[derive(Clone, Debug)]
pub struct FiberSample<F: CoeffField> {
    pub points: Vec<FiberPoint<F>>,
    pub requested: usize,
}

impl<F: CoeffField> FiberSample<F> {
    pub fn is_complete(&self) -> bool {
        self.points.len() >= self.requested
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FiberError {
    /// The initial form at v is a monomial: v does not lie on the tropical
    /// hypersurface, so the fiber is empty.
    NotOnVariety,
    /// The prescription itself is inconsistent: wrong number of entries,
    /// residues outside the torus, or residues that fail the initial form.
    InvalidResidue { detail: String },
    /// Every retry collapsed; carries the last failure.
    DegenerateSpecialization { attempts: usize, last: String },
    Trop(TropError),
    Series(SeriesError),
}

impl fmt::Display for FiberError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberError::NotOnVariety => {
                write!(f, "the initial form is a monomial; v is not on the tropical hypersurface")
            }
            FiberError::InvalidResidue { detail } => write!(f, "invalid residue data: {detail}"),
            FiberError::DegenerateSpecialization { attempts, last } => write!(
                f,
                "specialization stayed degenerate after {attempts} attempts (last: {last})"
            ),
            FiberError::Trop(e) => write!(f, "{e}"),
            FiberError::Series(e) => write!(f, "{e}"),
        }
    }
}

impl Error for FiberError {}

impl From<TropError> for FiberError {
    fn from(e: TropError) -> Self {
        FiberError::Trop(e)
    }
}

fn elem_pow<F: CoeffField>(field: &F, base: &F::Elem, k: i64) -> Option<F::Elem> {
    if k >= 0 {
        Some(field.pow(base, k as u64))
    } else {
        field.inv(base).map(|inv| field.pow(&inv, (-k) as u64))
    }
}

/// Nonzero element drawn from the enumeration; small integers over Q, any
/// element over a finite field.
fn random_unit<F: CoeffField>(field: &F, rng: &mut ChaCha20Rng) -> F::Elem {
    let bound = field.cardinality().map_or(19, |q| q.min(64));
    field.nth_element(rng.random_range(1..bound))
}

/// The initial form specialized at tail residues, as a univariate polynomial
/// in the first variable with its monomial factor removed. None when the
/// specialization vanishes identically.
fn specialized_init<F: CoeffField>(
    field: &F,
    ini: &InitialForm<F>,
    tail: &[F::Elem],
) -> Option<KPoly<F>> {
    let mut acc: BTreeMap<i64, F::Elem> = BTreeMap::new();
    for (u, coeff) in ini.monomials() {
        let mut term = coeff.clone();
        for (i, c) in tail.iter().enumerate() {
            term = field.mul(&term, &elem_pow(field, c, u[i + 1])?);
        }
        let entry = acc.entry(u[0]).or_insert_with(|| field.zero());
        *entry = field.add(entry, &term);
    }
    acc.retain(|_, c| !field.is_zero(c));
    if acc.is_empty() {
        return None;
    }
    let jmin = *acc.keys().next().unwrap();
    let jmax = *acc.keys().last().unwrap();
    let coeffs = (jmin..=jmax)
        .map(|j| acc.remove(&j).unwrap_or_else(|| field.zero()))
        .collect();
    Some(KPoly::new(field, coeffs))
}

/// One lift attempt with fixed tail series; any failure is reported as a
/// retryable reason.
fn lift_with_tails<F: CoeffField>(
    field: &F,
    f: &LaurentPoly<F>,
    v: &[Exp],
    xbar: &[F::Elem],
    tails: &[Series<F>],
    budget: &LiftBudget,
) -> Result<FiberPoint<F>, String> {
    let g = f.twist(v);
    let h = g
        .specialize_tail(field, tails)
        .map_err(|e| e.to_string())?;
    if h.is_zero() {
        return Err("specialized polynomial vanishes identically".to_string());
    }
    let root = lift_root(field, &h, &Exp::zero(), &xbar[0], budget).map_err(|e| e.to_string())?;
    let mut coords = Vec::with_capacity(f.nvars());
    coords.push(root.value.scale_t(&-(&v[0])));
    for (i, tail) in tails.iter().enumerate() {
        coords.push(tail.scale_t(&-(&v[i + 1])));
    }
    let mut trop = Vec::with_capacity(coords.len());
    let mut residues = Vec::with_capacity(coords.len());
    for (i, x) in coords.iter().enumerate() {
        let nu = x.valuation().ok_or("coordinate lost its valuation")?;
        let res = x.residue().map_err(|e| e.to_string())?;
        if res != &xbar[i] {
            return Err("coordinate lost its prescribed residue".to_string());
        }
        trop.push(nu.clone());
        residues.push(res.clone());
    }
    Ok(FiberPoint {
        coords,
        trop,
        residues,
        achieved_precision: root.achieved_precision,
    })
}

fn validate_prescription<F: CoeffField>(
    f: &LaurentPoly<F>,
    v: &[Exp],
) -> Result<InitialForm<F>, FiberError> {
    if f.nvars() < 2 {
        return Err(FiberError::Trop(TropError::Unsupported(
            "hypersurface point lifting needs at least two variables".to_string(),
        )));
    }
    if v.len() != f.nvars() {
        return Err(FiberError::InvalidResidue {
            detail: format!("expected {} tropical coordinates, got {}", f.nvars(), v.len()),
        });
    }
    let ini = init_form(f, v)?;
    if ini.is_monomial() {
        return Err(FiberError::NotOnVariety);
    }
    Ok(ini)
}

/// Lift the tropical point v with prescribed residues xbar to a point of the
/// hypersurface. The coordinates have valuations -v (the sign that pairs with
/// the minus-convention weights of init_form) and leading coefficients xbar.
pub fn lift_hypersurface_point<F: CoeffField>(
    field: &F,
    f: &LaurentPoly<F>,
    v: &[Exp],
    xbar: &[F::Elem],
    budget: &LiftBudget,
    seed: u64,
) -> Result<FiberPoint<F>, FiberError> {
    let ini = validate_prescription(f, v)?;
    if xbar.len() != f.nvars() {
        return Err(FiberError::InvalidResidue {
            detail: format!("expected {} residues, got {}", f.nvars(), xbar.len()),
        });
    }
    for r in xbar {
        if field.is_zero(r) {
            return Err(FiberError::InvalidResidue {
                detail: "residues must be nonzero".to_string(),
            });
        }
    }
    if !field.is_zero(&ini.eval(field, xbar)) {
        return Err(FiberError::InvalidResidue {
            detail: "residues do not annihilate the initial form".to_string(),
        });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut last = String::new();
    for attempt in 0..MAX_POINT_ATTEMPTS {
        let tails: Vec<Series<F>> = xbar[1..]
            .iter()
            .map(|r| {
                let base = Series::constant(field, r.clone());
                if attempt == 0 {
                    base
                } else {
                    let e = Exp::from_int(rng.random_range(1..=3));
                    base.add(
                        field,
                        &Series::monomial(field, random_unit(field, &mut rng), e, Precision::Exact),
                    )
                }
            })
            .collect();
        match lift_with_tails(field, f, v, xbar, &tails, budget) {
            Ok(point) => return Ok(point),
            Err(reason) => last = reason,
        }
    }
    Err(FiberError::DegenerateSpecialization {
        attempts: MAX_POINT_ATTEMPTS,
        last,
    })
}

/// Sample distinct points of the fiber of tropicalization over v,
/// deterministically in the seed. The sample may fall short of the request;
/// the caller decides whether that is fatal.
pub fn sample_fiber<F: CoeffField>(
    field: &F,
    f: &LaurentPoly<F>,
    v: &[Exp],
    count: usize,
    budget: &LiftBudget,
    seed: u64,
) -> Result<FiberSample<F>, FiberError> {
    let ini = validate_prescription(f, v)?;
    let n = f.nvars();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut points: Vec<FiberPoint<F>> = Vec::new();
    let max_attempts = count.max(1) * SAMPLE_ATTEMPTS_PER_POINT;
    for _ in 0..max_attempts {
        if points.len() >= count {
            break;
        }
        let tail_res: Vec<F::Elem> = (1..n).map(|_| random_unit(field, &mut rng)).collect();
        let Some(poly) = specialized_init(field, &ini, &tail_res) else {
            continue;
        };
        let first_roots: Vec<F::Elem> = poly
            .roots(field)
            .into_iter()
            .map(|(r, _)| r)
            .filter(|r| !field.is_zero(r))
            .collect();
        if first_roots.is_empty() {
            continue;
        }
        let pick = rng.random_range(0..first_roots.len());
        let mut xbar = Vec::with_capacity(n);
        xbar.push(first_roots[pick].clone());
        xbar.extend(tail_res.iter().cloned());
        let tails: Vec<Series<F>> = xbar[1..]
            .iter()
            .map(|r| {
                let base = Series::constant(field, r.clone());
                if rng.random_range(0..4u32) == 0 {
                    base
                } else {
                    let e = Exp::from_int(rng.random_range(1..=2));
                    base.add(
                        field,
                        &Series::monomial(field, random_unit(field, &mut rng), e, Precision::Exact),
                    )
                }
            })
            .collect();
        let Ok(point) = lift_with_tails(field, f, v, &xbar, &tails, budget) else {
            continue;
        };
        if points.iter().any(|p| p.coords == point.coords) {
            continue;
        }
        points.push(point);
    }
    Ok(FiberSample {
        points,
        requested: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FiniteField, RationalField};
    use num_rational::BigRational;

    fn qi(n: i64) -> BigRational {
        BigRational::from(num_bigint::BigInt::from(n))
    }

    fn c(n: i64) -> Series<RationalField> {
        Series::constant(&RationalField, qi(n))
    }

    fn line() -> LaurentPoly<RationalField> {
        LaurentPoly::from_monomials(
            &RationalField,
            2,
            [(vec![1, 0], c(1)), (vec![0, 1], c(1)), (vec![0, 0], c(1))],
        )
    }

    fn budget() -> LiftBudget {
        LiftBudget::new(Exp::from_int(8), 32, 64)
    }

    #[test]
    fn lifts_point_on_tropical_line() {
        let f = RationalField;
        let origin = [Exp::zero(), Exp::zero()];
        let point =
            lift_hypersurface_point(&f, &line(), &origin, &[qi(1), qi(-2)], &budget(), 0).unwrap();
        assert_eq!(point.trop, vec![Exp::zero(), Exp::zero()]);
        assert_eq!(point.residues, vec![qi(1), qi(-2)]);
        assert_eq!(point.achieved_precision, Precision::Exact);
        // exact point of the line: coordinates sum to -1
        let sum = point.coords[0].add(&f, &point.coords[1]);
        assert_eq!(sum, c(-1));
    }

    #[test]
    fn rejects_monomial_initial_form() {
        let f = RationalField;
        let v = [Exp::from_int(1), Exp::zero()];
        let err =
            lift_hypersurface_point(&f, &line(), &v, &[qi(1), qi(-1)], &budget(), 0).unwrap_err();
        assert_eq!(err, FiberError::NotOnVariety);
    }

    #[test]
    fn rejects_residues_off_the_initial_form() {
        let f = RationalField;
        let origin = [Exp::zero(), Exp::zero()];
        let err = lift_hypersurface_point(&f, &line(), &origin, &[qi(1), qi(1)], &budget(), 0)
            .unwrap_err();
        assert!(matches!(err, FiberError::InvalidResidue { .. }));
        let err2 = lift_hypersurface_point(&f, &line(), &origin, &[qi(0), qi(-1)], &budget(), 0)
            .unwrap_err();
        assert!(matches!(err2, FiberError::InvalidResidue { .. }));
    }

    #[test]
    fn degenerate_specialization_is_reported() {
        // x*y - x vanishes identically once y is frozen at 1, and loses its
        // unit root under any perturbation of y.
        let f = RationalField;
        let p = LaurentPoly::from_monomials(
            &RationalField,
            2,
            [(vec![1, 1], c(1)), (vec![1, 0], c(-1))],
        );
        let origin = [Exp::zero(), Exp::zero()];
        let err =
            lift_hypersurface_point(&f, &p, &origin, &[qi(5), qi(1)], &budget(), 0).unwrap_err();
        assert!(matches!(err, FiberError::DegenerateSpecialization { .. }));
    }

    #[test]
    fn nonzero_tropical_point_scales_coordinates() {
        // x + y + 1 at v = (0, -1): weights 0, 1, 0; minimum twice. Residues
        // must satisfy xbar_1 + 1 = 0.
        let f = RationalField;
        let v = [Exp::zero(), Exp::from_int(-1)];
        let point =
            lift_hypersurface_point(&f, &line(), &v, &[qi(-1), qi(3)], &budget(), 0).unwrap();
        assert_eq!(point.trop, vec![Exp::zero(), Exp::from_int(1)]);
        assert_eq!(point.coords[1].valuation(), Some(&Exp::from_int(1)));
        // the point satisfies the equation exactly or to certified depth
        assert!(point.achieved_precision >= Precision::from_int(8) || point.achieved_precision.is_exact());
    }

    #[test]
    fn samples_are_distinct_and_deterministic() {
        let f = RationalField;
        let origin = [Exp::zero(), Exp::zero()];
        let s1 = sample_fiber(&f, &line(), &origin, 5, &budget(), 42).unwrap();
        assert!(s1.is_complete(), "found {} of 5", s1.points.len());
        for p in &s1.points {
            assert_eq!(p.trop, vec![Exp::zero(), Exp::zero()]);
            let val = line().eval(&f, &p.coords).unwrap();
            match val.ext_valuation() {
                Precision::Exact => {}
                Precision::Finite(e) => assert!(e >= Exp::from_int(8)),
            }
        }
        for i in 0..s1.points.len() {
            for j in (i + 1)..s1.points.len() {
                assert_ne!(s1.points[i].coords, s1.points[j].coords);
            }
        }
        let s2 = sample_fiber(&f, &line(), &origin, 5, &budget(), 42).unwrap();
        for (a, b) in s1.points.iter().zip(&s2.points) {
            assert_eq!(a.coords, b.coords);
        }
        let s3 = sample_fiber(&f, &line(), &origin, 5, &budget(), 43).unwrap();
        assert!(s1.points.iter().zip(&s3.points).any(|(a, b)| a.coords != b.coords));
    }

    #[test]
    fn samples_over_finite_field() {
        let field = FiniteField::new(3, 1).unwrap();
        let one = field.one();
        let p = LaurentPoly::from_monomials(
            &field,
            2,
            [
                (vec![1, 0], Series::constant(&field, one.clone())),
                (vec![0, 1], Series::constant(&field, one.clone())),
                (vec![0, 0], Series::constant(&field, one)),
            ],
        );
        let origin = [Exp::zero(), Exp::zero()];
        let s = sample_fiber(&field, &p, &origin, 3, &budget(), 7).unwrap();
        assert!(s.is_complete(), "found {} of 3", s.points.len());
        for pt in &s.points {
            let val = p.eval(&field, &pt.coords).unwrap();
            match val.ext_valuation() {
                Precision::Exact => {}
                Precision::Finite(e) => assert!(e >= Exp::from_int(8)),
            }
        }
    }
}
