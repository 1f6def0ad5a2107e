//! Command implementations shared by the binary and its tests: argument
//! parsing helpers, the error-to-exit-code mapping, and one function per
//! subcommand returning a rendered record.

use crate::ast::{parse_expr, ParseError};
use crate::lower::{lower_poly, lower_series, variable_layout, LowerError};
use crate::record::{
    self, CurveRecord, EnumerationRecord, Envelope, ErrorEnvelope, ErrorRecord, FiberPointRecord,
    FunctorialityRecord, InitRecord, NewtonRecord, Render, RootRecord, SampleRecord, TropRecord,
    TropPointRecord,
};
use fiberlift_core::field::CoeffField;
use fiberlift_core::{
    check_exploded_functoriality, check_functoriality, enumerate_roots, init_form,
    lift_hypersurface_point, lift_root, newton_polygon, sample_fiber, trop_curve, trop_point,
    Exp, FiberError, LaurentPoly, LiftBudget, LiftError, MapError, MonomialMap, SeriesError,
    TropError,
};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Debug)]
pub enum CmdError {
    /// Source text rejected by the grammar or the lowering rules.
    Parse {
        message: String,
        line: Option<u32>,
        column: Option<u32>,
    },
    /// Well-formed input that the requested operation rejects.
    Validation(String),
    /// A step equation has no root in the coefficient field.
    Residue(String),
    /// Specialization kept degenerating after the retry budget.
    Degenerate(String),
    /// A library invariant failed; a bug, not a user error.
    Internal(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Parse { .. } | CmdError::Validation(_) => 2,
            CmdError::Residue(_) => 3,
            CmdError::Degenerate(_) => 4,
            CmdError::Internal(_) => 5,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CmdError::Parse { .. } => "parse",
            CmdError::Validation(_) => "validation",
            CmdError::Residue(_) => "residue-not-in-field",
            CmdError::Degenerate(_) => "degenerate-specialization",
            CmdError::Internal(_) => "internal",
        }
    }

    pub fn record(&self) -> ErrorRecord {
        let (line, column) = match self {
            CmdError::Parse { line, column, .. } => (*line, *column),
            _ => (None, None),
        };
        ErrorRecord {
            kind: self.kind().to_string(),
            message: self.to_string(),
            line,
            column,
        }
    }
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Parse { message, .. } => write!(f, "{message}"),
            CmdError::Validation(m)
            | CmdError::Residue(m)
            | CmdError::Degenerate(m)
            | CmdError::Internal(m) => write!(f, "{m}"),
        }
    }
}

impl From<ParseError> for CmdError {
    fn from(e: ParseError) -> Self {
        CmdError::Parse {
            message: e.to_string(),
            line: Some(e.line),
            column: Some(e.column),
        }
    }
}

impl From<LowerError> for CmdError {
    fn from(e: LowerError) -> Self {
        CmdError::Parse {
            message: e.to_string(),
            line: Some(e.span.line),
            column: Some(e.span.column),
        }
    }
}

impl From<TropError> for CmdError {
    fn from(e: TropError) -> Self {
        CmdError::Validation(e.to_string())
    }
}

impl From<SeriesError> for CmdError {
    fn from(e: SeriesError) -> Self {
        CmdError::Validation(e.to_string())
    }
}

impl From<LiftError> for CmdError {
    fn from(e: LiftError) -> Self {
        match e {
            LiftError::ResidueNotInField { .. } => CmdError::Residue(e.to_string()),
            LiftError::Internal(_) => CmdError::Internal(e.to_string()),
            _ => CmdError::Validation(e.to_string()),
        }
    }
}

impl From<FiberError> for CmdError {
    fn from(e: FiberError) -> Self {
        match e {
            FiberError::DegenerateSpecialization { .. } => CmdError::Degenerate(e.to_string()),
            _ => CmdError::Validation(e.to_string()),
        }
    }
}

impl From<MapError> for CmdError {
    fn from(e: MapError) -> Self {
        CmdError::Validation(e.to_string())
    }
}

/// Global knobs every subcommand sees.
#[derive(Clone, Debug)]
pub struct Opts {
    pub precision: Exp,
    pub max_terms: usize,
    pub max_iterations: usize,
    pub seed: u64,
    pub json: bool,
}

impl Opts {
    fn budget(&self) -> LiftBudget {
        LiftBudget::new(self.precision.clone(), self.max_terms, self.max_iterations)
    }
}

fn emit<R: Serialize + Render>(opts: &Opts, command: &'static str, result: R) -> String {
    if opts.json {
        serde_json::to_string_pretty(&Envelope {
            schema: record::SCHEMA,
            command,
            result,
        })
        .expect("record serialization")
    } else {
        result.text()
    }
}

/// Render an error the same way results are rendered; the exit code travels
/// separately.
pub fn emit_error(json: bool, command: &'static str, err: &CmdError) -> String {
    if json {
        serde_json::to_string_pretty(&ErrorEnvelope {
            schema: record::SCHEMA,
            command,
            error: err.record(),
        })
        .expect("record serialization")
    } else {
        format!("error: {err}")
    }
}

/// Widen an inferred variable layout to arity `n`, keeping each variable at
/// its canonical slot. Fails when the expression's variables cannot live in
/// an `n`-dimensional torus.
fn layout_for_arity(inferred: Vec<String>, n: usize) -> Result<Vec<String>, CmdError> {
    if n == 0 {
        return Err(CmdError::Validation(
            "expected at least one coordinate".to_string(),
        ));
    }
    if inferred.len() == n {
        return Ok(inferred);
    }
    if inferred.len() > n {
        return Err(CmdError::Validation(format!(
            "expression uses {} variables but {} coordinates were given",
            inferred.len(),
            n
        )));
    }
    let indexed = inferred
        .first()
        .map(|s| s.len() > 1 && s.starts_with('x'))
        .unwrap_or(false);
    if indexed || n > 3 {
        for v in &inferred {
            let ok = v.strip_prefix('x')
                .and_then(|d| d.parse::<usize>().ok())
                .map(|i| i >= 1 && i <= n)
                .unwrap_or(false);
            if !ok {
                return Err(CmdError::Validation(format!(
                    "variable `{v}` does not fit in x1..x{n}"
                )));
            }
        }
        return Ok((1..=n).map(|i| format!("x{i}")).collect());
    }
    if inferred == ["z"] && n != 3 {
        return Err(CmdError::Validation(format!(
            "univariate expression in z cannot take {n} coordinates"
        )));
    }
    let prefix: Vec<String> = ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect();
    for v in &inferred {
        if !prefix.contains(v) {
            return Err(CmdError::Validation(format!(
                "variable `{v}` does not fit in ({})",
                prefix.join(", ")
            )));
        }
    }
    Ok(prefix)
}

fn parse_poly<F: CoeffField>(
    field: &F,
    src: &str,
    arity: Option<usize>,
) -> Result<(LaurentPoly<F>, Vec<String>), CmdError> {
    let expr = parse_expr(src)?;
    let inferred = variable_layout(&expr)?;
    let layout = match arity {
        Some(n) => layout_for_arity(inferred, n)?,
        None => {
            if inferred.is_empty() {
                return Err(CmdError::Validation(
                    "expression has no polynomial variables".to_string(),
                ));
            }
            inferred
        }
    };
    let poly = lower_poly(field, &expr, &layout)?;
    Ok((poly, layout))
}

fn parse_univariate<F: CoeffField>(
    field: &F,
    src: &str,
) -> Result<LaurentPoly<F>, CmdError> {
    let (poly, layout) = parse_poly(field, src, None)?;
    if layout.len() != 1 {
        return Err(CmdError::Validation(format!(
            "expected a univariate polynomial, found variables ({})",
            layout.join(", ")
        )));
    }
    Ok(poly)
}

pub fn parse_exp_list(src: &str) -> Result<Vec<Exp>, CmdError> {
    src.split(',')
        .map(|s| {
            Exp::from_str(s.trim()).map_err(CmdError::Validation)
        })
        .collect()
}

fn parse_elem_list<F: CoeffField>(field: &F, src: &str) -> Result<Vec<F::Elem>, CmdError> {
    src.split(',')
        .map(|s| field.parse_elem(s.trim()).map_err(CmdError::Validation))
        .collect()
}

/// Split on commas that sit outside parentheses, so series expressions with
/// parenthesized exponents pass through whole.
fn split_top_level(src: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in src.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(&src[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&src[start..]);
    out
}

fn parse_series_list<F: CoeffField>(
    field: &F,
    src: &str,
) -> Result<Vec<fiberlift_core::Series<F>>, CmdError> {
    split_top_level(src)
        .into_iter()
        .map(|s| {
            let expr = parse_expr(s.trim())?;
            Ok(lower_series(field, &expr)?)
        })
        .collect()
}

fn parse_matrix(src: &str) -> Result<Vec<Vec<i64>>, CmdError> {
    src.split(';')
        .map(|row| {
            row.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<i64>()
                        .map_err(|_| CmdError::Validation(format!("bad matrix entry `{s}`")))
                })
                .collect()
        })
        .collect()
}

pub fn cmd_lift<F: CoeffField>(
    field: &F,
    opts: &Opts,
    poly: &str,
    valuation: &str,
    residue: &str,
) -> Result<String, CmdError> {
    let f = parse_univariate(field, poly)?;
    let v = Exp::from_str(valuation).map_err(CmdError::Validation)?;
    let a = field.parse_elem(residue).map_err(CmdError::Validation)?;
    let root = lift_root(field, &f, &v, &a, &opts.budget())?;
    Ok(emit(opts, "lift", RootRecord::build(field, &root)))
}

pub fn cmd_roots<F: CoeffField>(field: &F, opts: &Opts, poly: &str) -> Result<String, CmdError> {
    let f = parse_univariate(field, poly)?;
    let e = enumerate_roots(field, &f, &opts.budget())?;
    Ok(emit(opts, "roots", EnumerationRecord::build(field, &e)))
}

pub fn cmd_trop<F: CoeffField>(
    field: &F,
    opts: &Opts,
    poly: &str,
    point: &str,
) -> Result<String, CmdError> {
    let v = parse_exp_list(point)?;
    let (f, _) = parse_poly(field, poly, Some(v.len()))?;
    let ini = init_form(&f, &v)?;
    Ok(emit(
        opts,
        "trop",
        TropRecord {
            member: ini.num_monomials() >= 2,
            weight: record::exp_str(ini.base_weight()),
            achieving: ini.monomials().map(|(u, _)| u.clone()).collect(),
        },
    ))
}

pub fn cmd_init<F: CoeffField>(
    field: &F,
    opts: &Opts,
    poly: &str,
    point: &str,
) -> Result<String, CmdError> {
    let v = parse_exp_list(point)?;
    let (f, _) = parse_poly(field, poly, Some(v.len()))?;
    let ini = init_form(&f, &v)?;
    Ok(emit(opts, "init", InitRecord::build(field, &ini)))
}

pub fn cmd_newton_polygon<F: CoeffField>(
    field: &F,
    opts: &Opts,
    poly: &str,
) -> Result<String, CmdError> {
    let f = parse_univariate(field, poly)?;
    let segs = newton_polygon(field, &f)?;
    Ok(emit(opts, "newton-polygon", NewtonRecord::build(field, &segs)))
}

pub fn cmd_trop_curve<F: CoeffField>(
    field: &F,
    opts: &Opts,
    poly: &str,
) -> Result<String, CmdError> {
    let (f, _) = parse_poly(field, poly, Some(2))?;
    let curve = trop_curve(&f)?;
    Ok(emit(opts, "trop-curve", CurveRecord::build(&curve)))
}

pub fn cmd_tropicalize_point<F: CoeffField>(
    field: &F,
    opts: &Opts,
    coords: &str,
    exploded: bool,
) -> Result<String, CmdError> {
    let point = parse_series_list(field, coords)?;
    let rec = if exploded {
        let (vals, res) = fiberlift_core::exploded_point(&point)?;
        TropPointRecord {
            trop: vals.iter().map(record::exp_str).collect(),
            residues: Some(res.iter().map(|a| field.render(a)).collect()),
        }
    } else {
        TropPointRecord {
            trop: trop_point(&point)?.iter().map(record::exp_str).collect(),
            residues: None,
        }
    };
    Ok(emit(opts, "tropicalize-point", rec))
}

pub fn cmd_lift_point<F: CoeffField>(
    field: &F,
    opts: &Opts,
    poly: &str,
    point: &str,
    residues: &str,
) -> Result<String, CmdError> {
    let v = parse_exp_list(point)?;
    let xbar = parse_elem_list(field, residues)?;
    let (f, names) = parse_poly(field, poly, Some(v.len()))?;
    let p = lift_hypersurface_point(field, &f, &v, &xbar, &opts.budget(), opts.seed)?;
    Ok(emit(
        opts,
        "lift-point",
        FiberPointRecord::build(field, &p, &names),
    ))
}

pub fn cmd_sample_fiber<F: CoeffField>(
    field: &F,
    opts: &Opts,
    poly: &str,
    point: &str,
    count: usize,
) -> Result<String, CmdError> {
    let v = parse_exp_list(point)?;
    let (f, names) = parse_poly(field, poly, Some(v.len()))?;
    let sample = sample_fiber(field, &f, &v, count, &opts.budget(), opts.seed)?;
    if !sample.is_complete() {
        return Err(CmdError::Degenerate(format!(
            "sampled {} of {} pairwise-distinct points before the retry budget ran out",
            sample.points.len(),
            sample.requested
        )));
    }
    Ok(emit(
        opts,
        "sample-fiber",
        SampleRecord::build(field, &sample, &names),
    ))
}

pub fn cmd_check_functoriality<F: CoeffField>(
    field: &F,
    opts: &Opts,
    matrix: &str,
    coords: &str,
) -> Result<String, CmdError> {
    let rows = parse_matrix(matrix)?;
    let map = MonomialMap::new(rows)?;
    // negative matrix entries invert coordinates, which needs a precision
    // bound; impose the working precision on coordinates given exactly
    let point: Vec<_> = parse_series_list(field, coords)?
        .into_iter()
        .map(|s| s.truncate(&opts.precision))
        .collect();
    let plain = check_functoriality(field, &map, &point)?;
    let expl = check_exploded_functoriality(field, &map, &point)?;
    let image = map.apply(field, &point)?;
    let lhs = trop_point(&image)?;
    let rhs = map.trop(&trop_point(&point)?)?;
    Ok(emit(
        opts,
        "check-functoriality",
        FunctorialityRecord {
            holds: plain && expl,
            plain_holds: plain,
            exploded_holds: expl,
            trop_of_image: lhs.iter().map(record::exp_str).collect(),
            map_of_trop: rhs.iter().map(record::exp_str).collect(),
        },
    ))
}
