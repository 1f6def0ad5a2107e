//! Lowering from the expression AST to Laurent polynomials and series.
//!
//! Variable layout is inferred from the names that occur: either the indexed
//! family x1..xn (arity = the largest index used) or the named letters, where
//! z alone means a univariate polynomial in z, and otherwise x < y < z in
//! that order with the arity set by the furthest letter used. Mixing the two
//! styles is rejected.

use crate::ast::{Expr, ExprKind, Span};
use fiberlift_core::field::CoeffField;
use fiberlift_core::{Exp, LaurentPoly, Precision, Series};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub struct LowerError {
    pub message: String,
    pub span: Span,
}

impl LowerError {
    fn new(span: Span, message: impl Into<String>) -> Self {
        LowerError {
            message: message.into(),
            span,
        }
    }
}

impl fmt::Display for LowerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "invalid expression at line {}, column {}: {}",
            self.span.line, self.span.column, self.message
        )
    }
}

impl std::error::Error for LowerError {}

/// Ordered variable names for an expression, empty for a pure series in t.
pub fn variable_layout(expr: &Expr) -> Result<Vec<String>, LowerError> {
    let mut names: BTreeSet<String> = BTreeSet::new();
    let mut sample = expr.span;
    collect_syms(expr, &mut names, &mut sample);
    names.remove("t");
    names.remove("g");
    if names.is_empty() {
        return Ok(Vec::new());
    }
    let indexed: Vec<&String> = names
        .iter()
        .filter(|n| n.len() > 1 && n.starts_with('x'))
        .collect();
    if !indexed.is_empty() {
        if indexed.len() != names.len() {
            return Err(LowerError::new(
                sample,
                "cannot mix indexed variables x1..xn with named variables",
            ));
        }
        let mut n = 0usize;
        for name in &names {
            let idx: usize = name[1..]
                .parse()
                .map_err(|_| LowerError::new(sample, format!("bad variable `{name}`")))?;
            if idx == 0 {
                return Err(LowerError::new(sample, "variable indices start at x1"));
            }
            n = n.max(idx);
        }
        return Ok((1..=n).map(|i| format!("x{i}")).collect());
    }
    for name in &names {
        if !matches!(name.as_str(), "x" | "y" | "z") {
            return Err(LowerError::new(sample, format!("unknown variable `{name}`")));
        }
    }
    if names.contains("z") && names.len() == 1 {
        return Ok(vec!["z".to_string()]);
    }
    let n = if names.contains("z") {
        3
    } else if names.contains("y") {
        2
    } else {
        1
    };
    Ok(["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect())
}

fn collect_syms(expr: &Expr, out: &mut BTreeSet<String>, sample: &mut Span) {
    match &expr.kind {
        ExprKind::Sym(name) => {
            if name != "t" && name != "g" {
                *sample = expr.span;
            }
            out.insert(name.clone());
        }
        ExprKind::Int(_) | ExprKind::Prec(_) => {}
        ExprKind::Neg(a) => collect_syms(a, out, sample),
        ExprKind::Add(a, b)
        | ExprKind::Sub(a, b)
        | ExprKind::Mul(a, b)
        | ExprKind::Div(a, b) => {
            collect_syms(a, out, sample);
            collect_syms(b, out, sample);
        }
        ExprKind::Pow(a, _) => collect_syms(a, out, sample),
    }
}

/// Lower to a polynomial over the given variable layout. `names` must list
/// every variable the expression uses (extra names widen the arity, which is
/// how a 1-variable expression is read into a 2-variable context).
pub fn lower_poly<F: CoeffField>(
    field: &F,
    expr: &Expr,
    names: &[String],
) -> Result<LaurentPoly<F>, LowerError> {
    let nvars = names.len().max(1);
    eval(field, expr, names, nvars)
}

/// Lower an expression with no polynomial variables to a series in t.
pub fn lower_series<F: CoeffField>(field: &F, expr: &Expr) -> Result<Series<F>, LowerError> {
    let layout = variable_layout(expr)?;
    if !layout.is_empty() {
        return Err(LowerError::new(
            expr.span,
            "expected a series in t, found polynomial variables",
        ));
    }
    let poly = eval(field, expr, &[], 1)?;
    let mut out = Series::exact_zero();
    for (u, c) in poly.monomials() {
        debug_assert!(u.iter().all(|&e| e == 0));
        out = out.add(field, c);
    }
    Ok(out)
}

fn eval<F: CoeffField>(
    field: &F,
    expr: &Expr,
    names: &[String],
    nvars: usize,
) -> Result<LaurentPoly<F>, LowerError> {
    match &expr.kind {
        ExprKind::Int(n) => Ok(constant(field, nvars, Series::constant(field, field.elem_from_bigint(n)))),
        ExprKind::Prec(e) => Ok(constant(
            field,
            nvars,
            Series::zero(Precision::Finite(e.clone())),
        )),
        ExprKind::Sym(name) if name == "t" => Ok(constant(
            field,
            nvars,
            Series::monomial(field, field.one(), Exp::one(), Precision::Exact),
        )),
        ExprKind::Sym(name) if name == "g" => {
            let g = field.parse_elem("g").map_err(|_| {
                LowerError::new(expr.span, "generator `g` needs a proper extension field")
            })?;
            Ok(constant(field, nvars, Series::constant(field, g)))
        }
        ExprKind::Sym(name) => {
            let idx = names.iter().position(|n| n == name).ok_or_else(|| {
                LowerError::new(expr.span, format!("variable `{name}` not in scope"))
            })?;
            let mut u = vec![0i64; nvars];
            u[idx] = 1;
            Ok(LaurentPoly::from_monomials(
                field,
                nvars,
                [(u, Series::one(field))],
            ))
        }
        ExprKind::Neg(a) => Ok(eval(field, a, names, nvars)?.neg(field)),
        ExprKind::Add(a, b) => {
            Ok(eval(field, a, names, nvars)?.add(field, &eval(field, b, names, nvars)?))
        }
        ExprKind::Sub(a, b) => {
            Ok(eval(field, a, names, nvars)?.sub(field, &eval(field, b, names, nvars)?))
        }
        ExprKind::Mul(a, b) => {
            Ok(eval(field, a, names, nvars)?.mul(field, &eval(field, b, names, nvars)?))
        }
        ExprKind::Div(a, b) => {
            let num = eval(field, a, names, nvars)?;
            let den = eval(field, b, names, nvars)?;
            let (c, e) = unit_monomial(field, &den)
                .ok_or_else(|| LowerError::new(b.span, "divisor must be a nonzero c*t^e"))?;
            let cinv = field.inv(&c).expect("unit coefficient");
            Ok(num.mul(
                field,
                &constant(
                    field,
                    nvars,
                    Series::monomial(field, cinv, -(&e), Precision::Exact),
                ),
            ))
        }
        ExprKind::Pow(base, exp) => {
            if let ExprKind::Sym(name) = &base.kind {
                if name == "t" {
                    return Ok(constant(
                        field,
                        nvars,
                        Series::monomial(field, field.one(), exp.clone(), Precision::Exact),
                    ));
                }
                if name != "g" && names.iter().any(|n| n == name) {
                    let k = integral(exp).ok_or_else(|| {
                        LowerError::new(base.span, "variables take integer powers")
                    })?;
                    let idx = names.iter().position(|n| n == name).unwrap();
                    let mut u = vec![0i64; nvars];
                    u[idx] = k;
                    return Ok(LaurentPoly::from_monomials(
                        field,
                        nvars,
                        [(u, Series::one(field))],
                    ));
                }
            }
            let v = eval(field, base, names, nvars)?;
            let k = integral(exp)
                .ok_or_else(|| LowerError::new(base.span, "fractional powers apply only to t"))?;
            if k >= 0 {
                Ok(poly_pow(field, &v, k as u64, nvars))
            } else {
                // negative power: only of an invertible monomial
                let (c, e) = unit_monomial(field, &v).ok_or_else(|| {
                    LowerError::new(base.span, "negative powers apply only to c*t^e")
                })?;
                let cinv = field.inv(&c).expect("unit coefficient");
                let m = (-k) as u64;
                let cm = field.pow(&cinv, m);
                Ok(constant(
                    field,
                    nvars,
                    Series::monomial(field, cm, e.mul_int(k), Precision::Exact),
                ))
            }
        }
    }
}

fn constant<F: CoeffField>(field: &F, nvars: usize, s: Series<F>) -> LaurentPoly<F> {
    LaurentPoly::from_monomials(field, nvars, [(vec![0i64; nvars], s)])
}

fn poly_pow<F: CoeffField>(
    field: &F,
    base: &LaurentPoly<F>,
    mut n: u64,
    nvars: usize,
) -> LaurentPoly<F> {
    let mut acc = constant(field, nvars, Series::one(field));
    let mut sq = base.clone();
    while n > 0 {
        if n & 1 == 1 {
            acc = acc.mul(field, &sq);
        }
        sq = sq.mul(field, &sq);
        n >>= 1;
    }
    acc
}

/// The (coefficient, exponent) of a polynomial that is a single constant
/// monomial with a single-term exact coefficient; None otherwise.
fn unit_monomial<F: CoeffField>(field: &F, p: &LaurentPoly<F>) -> Option<(F::Elem, Exp)> {
    let _ = field;
    if p.num_monomials() != 1 {
        return None;
    }
    let (u, c) = p.monomials().next().unwrap();
    if u.iter().any(|&e| e != 0) || c.num_terms() != 1 || !c.precision().is_exact() {
        return None;
    }
    let (e, coeff) = c.leading().unwrap();
    Some((coeff.clone(), e.clone()))
}

fn integral(e: &Exp) -> Option<i64> {
    if e.denom() == &BigInt::from(1) || e.numer().is_zero() {
        if e.numer().is_zero() {
            return Some(0);
        }
        e.numer().to_i64()
    } else {
        None
    }
}
