//! Budgeted Newton lifting: refine a residue root of a Newton-segment
//! residual into a series root with prescribed valuation and leading
//! coefficient, certify what was achieved, and enumerate all roots.
//!
//! The loop works in a normalized scale: z -> t^v z moves the segment to
//! slope zero, powers of z are factored out, and a global t^w0 makes the
//! smallest coefficient valuation zero. Each step solves the piecewise-linear
//! equation Psi(v) = nu(y) for the unique next exponent and a residual
//! equation over k for the next coefficient.

use crate::exp::{Exp, Precision};
use crate::field::{multiplicity_of, CoeffField};
use crate::kpoly::KPoly;
use crate::poly::LaurentPoly;
use crate::series::{Series, SeriesError};
use crate::tropical::{newton_polygon, TropError};
use num_bigint::BigInt;
use num_integer::binomial;
use std::error::Error;
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub struct LiftBudget {
    pub target_precision: Exp,
    pub max_terms: usize,
    pub max_iterations: usize,
}

impl LiftBudget {
    pub fn new(target_precision: Exp, max_terms: usize, max_iterations: usize) -> Self {
        assert!(max_terms >= 1 && max_iterations >= 1, "empty lift budget");
        LiftBudget {
            target_precision,
            max_terms,
            max_iterations,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftStatus {
    CertifiedExact,
    PrecisionReached,
    BudgetExhausted,
}

impl fmt::Display for LiftStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LiftStatus::CertifiedExact => "CERTIFIED_EXACT",
            LiftStatus::PrecisionReached => "PRECISION_REACHED",
            LiftStatus::BudgetExhausted => "BUDGET_EXHAUSTED",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LiftError {
    /// A step equation has no root in the coefficient field; carries the
    /// rendered equation.
    ResidueNotInField { equation: String },
    /// The prescribed residue is not a root of the segment residual at the
    /// prescribed valuation (or there is no segment there).
    InvalidResidue { valuation: Exp },
    Trop(TropError),
    Series(SeriesError),
    /// A loop invariant failed; indicates a bug, surfaced instead of looping.
    Internal(String),
}

impl fmt::Display for LiftError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftError::ResidueNotInField { equation } => {
                write!(f, "step equation `{equation}` has no root in the coefficient field")
            }
            LiftError::InvalidResidue { valuation } => write!(
                f,
                "residue is not a root of the residual polynomial at valuation {valuation}"
            ),
            LiftError::Trop(e) => write!(f, "{e}"),
            LiftError::Series(e) => write!(f, "{e}"),
            LiftError::Internal(msg) => write!(f, "internal invariant violation: {msg}"),
        }
    }
}

impl Error for LiftError {}

impl From<TropError> for LiftError {
    fn from(e: TropError) -> Self {
        LiftError::Trop(e)
    }
}

impl From<SeriesError> for LiftError {
    fn from(e: SeriesError) -> Self {
        LiftError::Series(e)
    }
}

#[derive(Clone, Debug)]
pub struct LiftedRoot<F: CoeffField> {
    pub value: Series<F>,
    pub multiplicity: usize,
    pub achieved_precision: Precision,
    pub status: LiftStatus,
    /// nu(f(x)) per iteration in the original scale; strictly increasing.
    pub error_valuations: Vec<Exp>,
    /// Set when this root was separated from others sharing its finite prefix
    /// by a constant at the recorded exponent (the accumulation point of the
    /// step exponents).
    pub tail_branch: Option<(Exp, F::Elem)>,
}

/// Coefficients c'_1..c'_d of f(x+h) - f(x) as a polynomial in h, by Hasse
/// (binomial) expansion, valid in any characteristic.
pub fn hasse_delta<F: CoeffField>(field: &F, f: &LaurentPoly<F>, x: &Series<F>) -> Vec<Series<F>> {
    assert_eq!(f.nvars(), 1, "hasse delta is univariate");
    let (lo, hi) = f.univariate_span().expect("hasse delta of the zero polynomial");
    assert!(lo >= 0, "factor out powers of z before expanding");
    let d = hi as usize;
    let mut pows: Vec<Series<F>> = Vec::with_capacity(d.max(1));
    let mut cur = Series::one(field);
    for _ in 0..d {
        pows.push(cur.clone());
        cur = cur.mul(field, x);
    }
    let mut out = vec![Series::exact_zero(); d];
    for (u, c) in f.monomials() {
        let j = u[0] as usize;
        for m in 1..=j {
            let b = binomial(BigInt::from(j as u64), BigInt::from(m as u64));
            let coeff = field.elem_from_bigint(&b);
            if field.is_zero(&coeff) {
                continue;
            }
            let term = c.scale(field, &coeff).mul(field, &pows[j - m]);
            out[m - 1] = out[m - 1].add(field, &term);
        }
    }
    out
}

/// One entry per nonvanishing Hasse coefficient: (index j, valuation,
/// leading coefficient).
type DeltaProfile<F> = Vec<(usize, Exp, <F as CoeffField>::Elem)>;

/// Solve Psi(v) = target over the profile; also verify that coefficients that
/// are zero to precision stay strictly above the minimum.
fn solve_psi<F: CoeffField>(
    deltas: &[Series<F>],
    target: &Exp,
) -> Result<(Exp, Vec<usize>, DeltaProfile<F>), LiftError> {
    let mut profile: DeltaProfile<F> = Vec::new();
    let mut uncertain: Vec<(usize, Exp)> = Vec::new();
    for (idx, c) in deltas.iter().enumerate() {
        let j = idx + 1;
        match c.leading() {
            Some((nu, res)) => profile.push((j, nu.clone(), res.clone())),
            None => match c.precision() {
                Precision::Finite(rho) => uncertain.push((j, rho.clone())),
                Precision::Exact => {}
            },
        }
    }
    if profile.is_empty() {
        return Err(LiftError::Internal(
            "no certified delta coefficients; nothing to step with".to_string(),
        ));
    }
    let v = profile
        .iter()
        .map(|(j, nu, _)| (target - nu).div_int(*j as i64))
        .max()
        .unwrap();
    for (j, bound) in &uncertain {
        if &(bound + &v.mul_int(*j as i64)) <= target {
            return Err(LiftError::Trop(TropError::PrecisionError {
                monomial: vec![*j as i64],
                bound: bound.clone(),
            }));
        }
    }
    let achieving: Vec<usize> = profile
        .iter()
        .filter(|(j, nu, _)| &(nu + &v.mul_int(*j as i64)) == target)
        .map(|(j, _, _)| *j)
        .collect();
    Ok((v, achieving, profile))
}

/// Root of the step equation sum_{j in achieving} res(c'_j) a^j = -res(y),
/// smallest in the field's canonical order.
fn solve_step_equation<F: CoeffField>(
    field: &F,
    achieving: &[usize],
    profile: &DeltaProfile<F>,
    y_res: &F::Elem,
) -> Result<F::Elem, LiftError> {
    let top = *achieving.iter().max().unwrap();
    let mut coeffs = vec![field.zero(); top + 1];
    coeffs[0] = y_res.clone();
    for j in achieving {
        let (_, _, res) = profile.iter().find(|(pj, _, _)| pj == j).unwrap();
        coeffs[*j] = res.clone();
    }
    let poly = KPoly::new(field, coeffs);
    let roots = poly.roots(field);
    match roots.into_iter().next() {
        Some((a, _)) => Ok(a),
        None => Err(LiftError::ResidueNotInField {
            equation: poly.render(field, "a"),
        }),
    }
}

#[derive(Clone, Debug)]
pub struct StepInfo<F: CoeffField> {
    pub v_step: Exp,
    pub a_step: F::Elem,
    pub err_valuation: Exp,
    pub achieving: Vec<usize>,
    pub profile: DeltaProfile<F>,
}

/// A single Newton step against a normalized polynomial (ord 0, nonnegative
/// coefficient valuations): where the next term goes and what its coefficient
/// must be.
pub fn newton_step<F: CoeffField>(
    field: &F,
    f: &LaurentPoly<F>,
    x: &Series<F>,
) -> Result<StepInfo<F>, LiftError> {
    let y = f.eval(field, std::slice::from_ref(x))?;
    let (ny, y_res) = match y.leading() {
        Some((e, r)) => (e.clone(), r.clone()),
        None => {
            return Err(LiftError::Internal(
                "newton step needs a nonvanishing error term".to_string(),
            ))
        }
    };
    let deltas = hasse_delta(field, f, x);
    let (v_step, achieving, profile) = solve_psi::<F>(&deltas, &ny)?;
    let a_step = solve_step_equation(field, &achieving, &profile, &y_res)?;
    Ok(StepInfo {
        v_step,
        a_step,
        err_valuation: ny,
        achieving,
        profile,
    })
}

/// Per-iteration record kept for auditing and for the stationary-tail
/// analysis in enumerate_roots.
#[derive(Clone, Debug)]
pub(crate) struct StepRecord<F: CoeffField> {
    pub v_step: Exp,
    pub err_valuation: Exp,
    pub achieving: Vec<usize>,
    pub profile: DeltaProfile<F>,
}

pub(crate) struct LiftTrace<F: CoeffField> {
    pub steps: Vec<StepRecord<F>>,
    /// Final iterate in the normalized scale, as an exact finite sum.
    pub x_norm: Series<F>,
    pub v: Exp,
}

fn normalize<F: CoeffField>(
    field: &F,
    f: &LaurentPoly<F>,
    v: &Exp,
) -> Result<(LaurentPoly<F>, Exp), LiftError> {
    let twisted = f.twist(&[-(v)]);
    let (lo, _) = twisted.univariate_span().ok_or(TropError::ZeroPoly)?;
    let shifted = if lo != 0 {
        twisted.mul_monomial(field, &Series::one(field), &[-lo])
    } else {
        twisted
    };
    let w0 = shifted
        .monomials()
        .filter_map(|(_, c)| c.valuation().cloned())
        .min()
        .ok_or_else(|| LiftError::Internal("no certified coefficient valuations".to_string()))?;
    let scaled = LaurentPoly::from_monomials(
        field,
        1,
        shifted
            .monomials()
            .map(|(u, c)| (u.clone(), c.scale_t(&-(&w0)))),
    );
    Ok((scaled, w0))
}

pub(crate) fn lift_root_traced<F: CoeffField>(
    field: &F,
    f: &LaurentPoly<F>,
    v: &Exp,
    a: &F::Elem,
    budget: &LiftBudget,
) -> Result<(LiftedRoot<F>, LiftTrace<F>), LiftError> {
    if f.nvars() != 1 {
        return Err(LiftError::Trop(TropError::Unsupported(
            "lift_root is univariate".to_string(),
        )));
    }
    let segments = newton_polygon(field, f)?;
    let segment = segments
        .iter()
        .find(|s| &s.root_valuation == v)
        .ok_or_else(|| LiftError::InvalidResidue {
            valuation: v.clone(),
        })?;
    let m_a = multiplicity_of(field, segment.residual.coeffs(), a);
    if m_a == 0 {
        return Err(LiftError::InvalidResidue {
            valuation: v.clone(),
        });
    }

    let (f_norm, w0) = normalize(field, f, v)?;
    let mut x = Series::constant(field, a.clone());
    let mut steps: Vec<StepRecord<F>> = Vec::new();
    let mut error_valuations: Vec<Exp> = Vec::new();
    let mut iterations = 0usize;

    let (status, value_prec_norm) = loop {
        let y = f_norm.eval(field, std::slice::from_ref(&x))?;
        if y.is_exact_zero() {
            break (LiftStatus::CertifiedExact, None);
        }
        let target_nu = match y.ext_valuation() {
            Precision::Finite(e) => e,
            Precision::Exact => unreachable!("handled as exact zero"),
        };
        if !y.is_zero_to_precision() {
            error_valuations.push(&target_nu + &w0);
        }
        let deltas = hasse_delta(field, &f_norm, &x);
        let (v_next, achieving, profile) = solve_psi::<F>(&deltas, &target_nu)?;
        if let Some(last) = steps.last() {
            if v_next <= last.v_step {
                return Err(LiftError::Internal(format!(
                    "step exponent did not increase: {} after {}",
                    v_next, last.v_step
                )));
            }
        }
        // the value is determined modulo t^(v_next + v); stop once that
        // clears the requested precision (for a multiple root the residual
        // valuation runs ahead of the value, so gate on the value)
        if (&v_next + v) >= budget.target_precision {
            break (LiftStatus::PrecisionReached, Some(v_next));
        }
        if y.is_zero_to_precision() {
            // Input precision ran out before the target; report what holds.
            break (LiftStatus::PrecisionReached, Some(v_next));
        }
        if x.num_terms() >= budget.max_terms || iterations >= budget.max_iterations {
            break (LiftStatus::BudgetExhausted, Some(v_next));
        }
        let y_res = y.residue().unwrap().clone();
        let a_step = solve_step_equation(field, &achieving, &profile, &y_res)?;
        steps.push(StepRecord {
            v_step: v_next.clone(),
            err_valuation: target_nu,
            achieving,
            profile,
        });
        x = x.add(
            field,
            &Series::monomial(field, a_step, v_next, Precision::Exact),
        );
        iterations += 1;
    };

    let value_norm = match &value_prec_norm {
        None => x.clone(),
        Some(rho) => x.truncate(rho),
    };
    if value_norm.num_terms() != x.num_terms() {
        return Err(LiftError::Internal(
            "certified precision truncated computed terms".to_string(),
        ));
    }
    let value = value_norm.scale_t(v);
    if value.valuation() != Some(v) || value.residue().ok() != Some(a) {
        return Err(LiftError::Internal(
            "lifted value lost its valuation or residue prescription".to_string(),
        ));
    }
    // Certify by direct evaluation of the original polynomial at the exact
    // finite prefix; never trust the loop.
    let exact_value = x.scale_t(v);
    let residual = f.eval(field, std::slice::from_ref(&exact_value))?;
    let achieved_precision = match status {
        LiftStatus::CertifiedExact => {
            if !residual.is_exact_zero() {
                return Err(LiftError::Internal(
                    "exact status but nonzero residual".to_string(),
                ));
            }
            Precision::Exact
        }
        _ => residual.ext_valuation(),
    };
    let root = LiftedRoot {
        value,
        multiplicity: m_a,
        achieved_precision,
        status,
        error_valuations,
        tail_branch: None,
    };
    let trace = LiftTrace {
        steps,
        x_norm: x,
        v: v.clone(),
    };
    Ok((root, trace))
}

/// Lift the residue root a at valuation v to a series root. The returned
/// multiplicity is that of a in the segment residual; when it exceeds one the
/// value follows a single branch.
pub fn lift_root<F: CoeffField>(
    field: &F,
    f: &LaurentPoly<F>,
    v: &Exp,
    a: &F::Elem,
    budget: &LiftBudget,
) -> Result<LiftedRoot<F>, LiftError> {
    lift_root_traced(field, f, v, a, budget).map(|(root, _)| root)
}

/// A residue datum that could not be lifted to a root over this coefficient
/// field, with the multiplicity it accounts for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unresolved {
    pub segment_valuation: Exp,
    pub missing_multiplicity: usize,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct Enumeration<F: CoeffField> {
    pub roots: Vec<LiftedRoot<F>>,
    pub unresolved: Vec<Unresolved>,
}

impl<F: CoeffField> Enumeration<F> {
    /// Lifted multiplicities plus unresolved multiplicities; equals
    /// deg - ord when the polygon is complete.
    pub fn accounted_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum::<usize>()
            + self
                .unresolved
                .iter()
                .map(|u| u.missing_multiplicity)
                .sum::<usize>()
    }
}

/// Stationary-tail analysis: when the step exponents accumulate below a limit
/// v* with a stable two-term delta profile, the roots sharing the computed
/// prefix differ by constants at v*: the solutions of
/// X * (res(c'_m) X^(m-1) + res(c'_1)) = 0.
struct TailSplit<F: CoeffField> {
    v_star_norm: Exp,
    branch_poly: KPoly<F>,
}

fn detect_stationary_tail<F: CoeffField>(
    field: &F,
    trace: &LiftTrace<F>,
    m: usize,
) -> Option<TailSplit<F>> {
    if m < 2 || trace.steps.len() < 3 {
        return None;
    }
    let last3 = &trace.steps[trace.steps.len() - 3..];
    // Constant singleton achieving set {m}.
    for s in last3 {
        if s.achieving != [m] {
            return None;
        }
    }
    let pick = |rec: &StepRecord<F>, j: usize| -> Option<(Exp, F::Elem)> {
        rec.profile
            .iter()
            .find(|(pj, _, _)| *pj == j)
            .map(|(_, nu, res)| (nu.clone(), res.clone()))
    };
    let (nu1, res1) = pick(&last3[2], 1)?;
    let (num, resm) = pick(&last3[2], m)?;
    for s in &last3[..2] {
        if pick(s, 1) != Some((nu1.clone(), res1.clone()))
            || pick(s, m) != Some((num.clone(), resm.clone()))
        {
            return None;
        }
    }
    // Observed error recursion nu(y_{k+1}) = nu(c'_1) + v_k.
    for w in last3.windows(2) {
        if w[1].err_valuation != &nu1 + &w[0].v_step {
            return None;
        }
    }
    let v_star = (&nu1 - &num).div_int(m as i64 - 1);
    let last_v = &last3[2].v_step;
    if &v_star <= last_v {
        return None;
    }
    // Every other index must sit strictly above the tied pair at v*.
    let tied = &nu1 + &v_star;
    for (j, nu, _) in &last3[2].profile {
        if *j == 1 || *j == m {
            continue;
        }
        if (nu + &v_star.mul_int(*j as i64)) <= tied {
            return None;
        }
    }
    let mut coeffs = vec![field.zero(); m];
    coeffs[0] = res1;
    coeffs[m - 1] = resm;
    Some(TailSplit {
        v_star_norm: v_star,
        branch_poly: KPoly::new(field, coeffs),
    })
}

/// Divide the polynomial part of f by (z - s); None when s is not an exact
/// root.
fn divide_linear<F: CoeffField>(
    field: &F,
    f: &LaurentPoly<F>,
    s: &Series<F>,
) -> Option<LaurentPoly<F>> {
    let (lo, hi) = f.univariate_span()?;
    let width = (hi - lo) as usize;
    if width == 0 {
        return None;
    }
    let zero = Series::exact_zero();
    let coeff = |j: i64| -> Series<F> { f.coeff_of(j).cloned().unwrap_or_else(|| zero.clone()) };
    let mut quot: Vec<Series<F>> = vec![Series::exact_zero(); width];
    let mut carry = Series::exact_zero();
    for k in (1..=width).rev() {
        let b = coeff(lo + k as i64).add(field, &carry.mul(field, s));
        carry = b.clone();
        quot[k - 1] = b;
    }
    let rem = coeff(lo).add(field, &carry.mul(field, s));
    if !rem.is_exact_zero() {
        return None;
    }
    Some(LaurentPoly::from_monomials(
        field,
        1,
        quot.into_iter()
            .enumerate()
            .map(|(k, c)| (vec![lo + k as i64], c)),
    ))
}

/// Peel off (z - s) factors; returns the exact multiplicity (at most cap) and
/// the deflated polynomial.
fn peel_root<F: CoeffField>(
    field: &F,
    f: &LaurentPoly<F>,
    s: &Series<F>,
    cap: usize,
) -> (usize, LaurentPoly<F>) {
    let mut count = 0;
    let mut cur = f.clone();
    while count < cap {
        match divide_linear(field, &cur, s) {
            Some(q) => {
                cur = q;
                count += 1;
            }
            None => break,
        }
    }
    (count, cur)
}

fn lift_group<F: CoeffField>(
    field: &F,
    f: &LaurentPoly<F>,
    seg_valuation: &Exp,
    a: &F::Elem,
    m_a: usize,
    budget: &LiftBudget,
    out: &mut Enumeration<F>,
) {
    let mut remaining = m_a;
    let mut fcur = f.clone();
    while remaining > 0 {
        let (mut root, trace) = match lift_root_traced(field, &fcur, seg_valuation, a, budget) {
            Ok(ok) => ok,
            Err(e) => {
                out.unresolved.push(Unresolved {
                    segment_valuation: seg_valuation.clone(),
                    missing_multiplicity: remaining,
                    reason: e.to_string(),
                });
                return;
            }
        };
        if root.status == LiftStatus::CertifiedExact {
            let (mu, deflated) = peel_root(field, &fcur, &root.value, remaining);
            debug_assert!(mu >= 1, "exact root must divide at least once");
            root.multiplicity = mu.max(1);
            out.roots.push(root);
            if mu >= remaining {
                return;
            }
            remaining -= mu;
            fcur = deflated;
            continue;
        }
        match detect_stationary_tail(field, &trace, root.multiplicity) {
            None => {
                out.roots.push(root);
                return;
            }
            Some(split) => {
                let v_star = &split.v_star_norm + &trace.v;
                let branch_roots = split.branch_poly.roots(field);
                let mut covered = 1usize; // the zero branch
                let zero_branch = LiftedRoot {
                    multiplicity: 1,
                    tail_branch: Some((v_star.clone(), field.zero())),
                    ..root.clone()
                };
                out.roots.push(zero_branch);
                for (c, mu_c) in &branch_roots {
                    // Exact representative carrying the branch constant, used
                    // only to certify the residual error.
                    let rep = trace
                        .x_norm
                        .add(
                            field,
                            &Series::monomial(
                                field,
                                c.clone(),
                                split.v_star_norm.clone(),
                                Precision::Exact,
                            ),
                        )
                        .scale_t(&trace.v);
                    let achieved = match f.eval(field, std::slice::from_ref(&rep)) {
                        Ok(resid) if resid.is_exact_zero() => Precision::Exact,
                        Ok(resid) => resid.ext_valuation(),
                        Err(_) => root.achieved_precision.clone(),
                    };
                    out.roots.push(LiftedRoot {
                        value: root.value.clone(),
                        multiplicity: *mu_c,
                        achieved_precision: achieved,
                        status: root.status,
                        error_valuations: root.error_valuations.clone(),
                        tail_branch: Some((v_star.clone(), c.clone())),
                    });
                    covered += mu_c;
                }
                if covered < root.multiplicity {
                    out.unresolved.push(Unresolved {
                        segment_valuation: seg_valuation.clone(),
                        missing_multiplicity: root.multiplicity - covered,
                        reason: format!(
                            "tail branch equation `{}` does not split in the coefficient field",
                            split.branch_poly.render(field, "X")
                        ),
                    });
                }
                return;
            }
        }
    }
}

/// Lift every residue root of every Newton segment. Failures are itemized,
/// never silently dropped: lifted plus unresolved multiplicities account for
/// deg - ord.
pub fn enumerate_roots<F: CoeffField>(
    field: &F,
    f: &LaurentPoly<F>,
    budget: &LiftBudget,
) -> Result<Enumeration<F>, LiftError> {
    let segments = newton_polygon(field, f)?;
    let mut out = Enumeration {
        roots: Vec::new(),
        unresolved: Vec::new(),
    };
    for seg in &segments {
        let rroots = seg.residual.roots(field);
        let covered: usize = rroots.iter().map(|(_, m)| m).sum();
        if covered < seg.multiplicity {
            let reason = if covered == 0 {
                format!(
                    "residual `{}` has no root in the coefficient field",
                    seg.residual.render(field, "z")
                )
            } else {
                format!(
                    "residual `{}` splits only partially in the coefficient field",
                    seg.residual.render(field, "z")
                )
            };
            out.unresolved.push(Unresolved {
                segment_valuation: seg.root_valuation.clone(),
                missing_multiplicity: seg.multiplicity - covered,
                reason,
            });
        }
        for (a, m_a) in rroots {
            lift_group(field, f, &seg.root_valuation, &a, m_a, budget, &mut out);
        }
    }
    Ok(out)
}
