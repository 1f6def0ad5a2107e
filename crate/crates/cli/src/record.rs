//! Output records: one struct per command result, each serializable to the
//! versioned JSON schema (docs/output-schema.md) and renderable as plain
//! text. Exponents appear as canonical `num/den` strings and coefficients in
//! the field's canonical text form, so every series here re-parses to itself.

use fiberlift_core::field::CoeffField;
use fiberlift_core::{
    EdgeEnds, Enumeration, Exp, FiberPoint, FiberSample, InitialForm, LaurentPoly, LiftedRoot,
    NewtonSegment, Precision, Series, TropCurve,
};
use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

pub const SCHEMA: &str = "fiberlift.output/1";

/// Wire form of an exponent: `-3`, `1/2`.
pub fn exp_str(e: &Exp) -> String {
    e.to_string()
}

/// Wire form of a precision bound; `None` means exact.
pub fn prec_str(p: &Precision) -> Option<String> {
    match p {
        Precision::Exact => None,
        Precision::Finite(e) => Some(exp_str(e)),
    }
}

/// `t`, `t^3`, `t^(-1/2)`; exponent zero renders as `1`.
fn t_power(e: &Exp) -> String {
    let one = BigInt::from(1);
    if e.is_zero() {
        "1".to_string()
    } else if e.denom() == &one && !e.numer().is_negative() {
        if e.numer() == &one {
            "t".to_string()
        } else {
            format!("t^{e}")
        }
    } else {
        format!("t^({e})")
    }
}

/// Canonical expression text for a series; parses back to the same value.
pub fn render_series<F: CoeffField>(field: &F, s: &Series<F>) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (e, c) in s.terms() {
        let coeff = field.render(c);
        // only rationals render signed; finite fields use canonical
        // nonnegative representatives
        let (sign, mag) = match coeff.strip_prefix('-') {
            Some(rest) => ('-', rest.to_string()),
            None => ('+', coeff),
        };
        let mag = if mag.contains('+') || mag.contains('-') {
            format!("({mag})")
        } else {
            mag
        };
        let body = if e.is_zero() {
            mag
        } else if mag == "1" {
            t_power(e)
        } else {
            format!("{}*{}", mag, t_power(e))
        };
        if parts.is_empty() {
            parts.push(if sign == '-' { format!("-{body}") } else { body });
        } else {
            parts.push(format!(" {} {}", if sign == '-' { '-' } else { '+' }, body));
        }
    }
    if let Precision::Finite(e) = s.precision() {
        let o = format!("O({})", t_power(e));
        if parts.is_empty() {
            parts.push(o);
        } else {
            parts.push(format!(" + {o}"));
        }
    }
    if parts.is_empty() {
        return "0".to_string();
    }
    parts.concat()
}

/// Canonical expression text for a polynomial under a variable layout.
pub fn render_poly<F: CoeffField>(field: &F, p: &LaurentPoly<F>, names: &[String]) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut parts: Vec<String> = Vec::new();
    for (u, c) in p.monomials() {
        let vars: Vec<String> = u
            .iter()
            .zip(names)
            .filter(|(e, _)| **e != 0)
            .map(|(e, n)| match e {
                1 => n.clone(),
                e if *e > 1 => format!("{n}^{e}"),
                e => format!("{n}^({e})"),
            })
            .collect();
        let coeff = render_series(field, c);
        let body = if vars.is_empty() {
            coeff
        } else if coeff == "1" {
            vars.join("*")
        } else {
            let coeff = if c.num_terms() > 1
                || !c.precision().is_exact()
                || coeff.contains(" + ")
                || coeff.contains(" - ")
            {
                format!("({coeff})")
            } else {
                coeff
            };
            format!("{}*{}", coeff, vars.join("*"))
        };
        if parts.is_empty() {
            parts.push(body);
        } else if let Some(rest) = body.strip_prefix('-') {
            parts.push(format!(" - {rest}"));
        } else {
            parts.push(format!(" + {body}"));
        }
    }
    parts.concat()
}

#[derive(Serialize)]
pub struct TermRecord {
    pub exponent: String,
    pub coefficient: String,
}

#[derive(Serialize)]
pub struct SeriesRecord {
    pub text: String,
    pub terms: Vec<TermRecord>,
    /// Exponent bound as `num/den`; absent when the series is exact.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<String>,
}

impl SeriesRecord {
    pub fn build<F: CoeffField>(field: &F, s: &Series<F>) -> Self {
        SeriesRecord {
            text: render_series(field, s),
            terms: s
                .terms()
                .map(|(e, c)| TermRecord {
                    exponent: exp_str(e),
                    coefficient: field.render(c),
                })
                .collect(),
            precision: prec_str(s.precision()),
        }
    }
}

pub trait Render {
    fn text(&self) -> String;
}

#[derive(Serialize)]
pub struct TailRecord {
    pub exponent: String,
    pub residue: String,
}

#[derive(Serialize)]
pub struct RootRecord {
    pub value: SeriesRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valuation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residue: Option<String>,
    pub multiplicity: usize,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub achieved_precision: Option<String>,
    pub error_valuations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_branch: Option<TailRecord>,
}

impl RootRecord {
    pub fn build<F: CoeffField>(field: &F, r: &LiftedRoot<F>) -> Self {
        RootRecord {
            value: SeriesRecord::build(field, &r.value),
            valuation: r.value.valuation().map(exp_str),
            residue: r.value.residue().ok().map(|a| field.render(a)),
            multiplicity: r.multiplicity,
            status: r.status.to_string(),
            achieved_precision: prec_str(&r.achieved_precision),
            error_valuations: r.error_valuations.iter().map(exp_str).collect(),
            tail_branch: r.tail_branch.as_ref().map(|(e, a)| TailRecord {
                exponent: exp_str(e),
                residue: field.render(a),
            }),
        }
    }

    fn lines(&self, out: &mut Vec<String>) {
        out.push(format!("value: {}", self.value.text));
        out.push(format!("multiplicity: {}", self.multiplicity));
        out.push(format!("status: {}", self.status));
        out.push(format!(
            "achieved precision: {}",
            self.achieved_precision.as_deref().unwrap_or("exact")
        ));
        if let Some(tb) = &self.tail_branch {
            out.push(format!(
                "tail branch: residue {} at exponent {}",
                tb.residue, tb.exponent
            ));
        }
    }
}

impl Render for RootRecord {
    fn text(&self) -> String {
        let mut out = Vec::new();
        self.lines(&mut out);
        out.join("\n")
    }
}

#[derive(Serialize)]
pub struct UnresolvedRecord {
    pub segment_valuation: String,
    pub missing_multiplicity: usize,
    pub reason: String,
}

#[derive(Serialize)]
pub struct EnumerationRecord {
    pub roots: Vec<RootRecord>,
    pub unresolved: Vec<UnresolvedRecord>,
    pub accounted_multiplicity: usize,
}

impl EnumerationRecord {
    pub fn build<F: CoeffField>(field: &F, e: &Enumeration<F>) -> Self {
        EnumerationRecord {
            roots: e.roots.iter().map(|r| RootRecord::build(field, r)).collect(),
            unresolved: e
                .unresolved
                .iter()
                .map(|u| UnresolvedRecord {
                    segment_valuation: exp_str(&u.segment_valuation),
                    missing_multiplicity: u.missing_multiplicity,
                    reason: u.reason.clone(),
                })
                .collect(),
            accounted_multiplicity: e.accounted_multiplicity(),
        }
    }
}

impl Render for EnumerationRecord {
    fn text(&self) -> String {
        let mut out = vec![format!("roots: {}", self.roots.len())];
        for (i, r) in self.roots.iter().enumerate() {
            out.push(format!("[{i}]"));
            r.lines(&mut out);
        }
        for u in &self.unresolved {
            out.push(format!(
                "unresolved: multiplicity {} at valuation {} ({})",
                u.missing_multiplicity, u.segment_valuation, u.reason
            ));
        }
        out.push(format!(
            "accounted multiplicity: {}",
            self.accounted_multiplicity
        ));
        out.join("\n")
    }
}

#[derive(Serialize)]
pub struct TropRecord {
    pub member: bool,
    pub weight: String,
    pub achieving: Vec<Vec<i64>>,
}

impl Render for TropRecord {
    fn text(&self) -> String {
        format!("member: {}\nweight: {}", self.member, self.weight)
    }
}

#[derive(Serialize)]
pub struct MonoRecord {
    pub exponents: Vec<i64>,
    pub coefficient: String,
}

#[derive(Serialize)]
pub struct InitRecord {
    pub base_weight: String,
    pub monomials: Vec<MonoRecord>,
}

impl InitRecord {
    pub fn build<F: CoeffField>(field: &F, ini: &InitialForm<F>) -> Self {
        InitRecord {
            base_weight: exp_str(ini.base_weight()),
            monomials: ini
                .monomials()
                .map(|(u, c)| MonoRecord {
                    exponents: u.clone(),
                    coefficient: field.render(c),
                })
                .collect(),
        }
    }
}

impl Render for InitRecord {
    fn text(&self) -> String {
        let mut out = vec![format!("base weight: {}", self.base_weight)];
        for m in &self.monomials {
            out.push(format!(
                "  {} * x^{:?}",
                m.coefficient, m.exponents
            ));
        }
        out.join("\n")
    }
}

#[derive(Serialize)]
pub struct SegmentRecord {
    pub root_valuation: String,
    pub multiplicity: usize,
    /// Dense residual coefficients, constant term first.
    pub residual: Vec<String>,
}

#[derive(Serialize)]
pub struct NewtonRecord {
    pub segments: Vec<SegmentRecord>,
}

impl NewtonRecord {
    pub fn build<F: CoeffField>(field: &F, segs: &[NewtonSegment<F>]) -> Self {
        NewtonRecord {
            segments: segs
                .iter()
                .map(|s| SegmentRecord {
                    root_valuation: exp_str(&s.root_valuation),
                    multiplicity: s.multiplicity,
                    residual: s.residual.coeffs().iter().map(|c| field.render(c)).collect(),
                })
                .collect(),
        }
    }
}

impl Render for NewtonRecord {
    fn text(&self) -> String {
        let mut out = Vec::new();
        for s in &self.segments {
            out.push(format!(
                "valuation {} multiplicity {} residual [{}]",
                s.root_valuation,
                s.multiplicity,
                s.residual.join(", ")
            ));
        }
        if out.is_empty() {
            out.push("no segments".to_string());
        }
        out.join("\n")
    }
}

#[derive(Serialize)]
pub struct EdgeRecord {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertices: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor: Option<[String; 2]>,
    pub direction: [i64; 2],
    pub multiplicity: usize,
}

#[derive(Serialize)]
pub struct CurveRecord {
    pub vertices: Vec<[String; 2]>,
    pub edges: Vec<EdgeRecord>,
}

impl CurveRecord {
    pub fn build(curve: &TropCurve) -> Self {
        CurveRecord {
            vertices: curve
                .vertices
                .iter()
                .map(|v| [exp_str(&v[0]), exp_str(&v[1])])
                .collect(),
            edges: curve
                .edges
                .iter()
                .map(|e| {
                    let (kind, vertices, vertex, anchor) = match &e.ends {
                        EdgeEnds::Segment(a, b) => ("segment", Some([*a, *b]), None, None),
                        EdgeEnds::Ray { vertex } => ("ray", None, Some(*vertex), None),
                        EdgeEnds::Line { anchor } => (
                            "line",
                            None,
                            None,
                            Some([exp_str(&anchor[0]), exp_str(&anchor[1])]),
                        ),
                    };
                    EdgeRecord {
                        kind: kind.to_string(),
                        vertices,
                        vertex,
                        anchor,
                        direction: e.direction,
                        multiplicity: e.multiplicity,
                    }
                })
                .collect(),
        }
    }
}

impl Render for CurveRecord {
    fn text(&self) -> String {
        let mut out = vec![format!("vertices: {}", self.vertices.len())];
        for (i, v) in self.vertices.iter().enumerate() {
            out.push(format!("  [{i}] ({}, {})", v[0], v[1]));
        }
        for e in &self.edges {
            let pos = match (&e.vertices, &e.vertex, &e.anchor) {
                (Some([a, b]), _, _) => format!("segment {a}-{b}"),
                (_, Some(v), _) => format!("ray from {v}"),
                (_, _, Some([x, y])) => format!("line through ({x}, {y})"),
                _ => "edge".to_string(),
            };
            out.push(format!(
                "{pos} direction ({}, {}) multiplicity {}",
                e.direction[0], e.direction[1], e.multiplicity
            ));
        }
        out.join("\n")
    }
}

#[derive(Serialize)]
pub struct TropPointRecord {
    pub trop: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residues: Option<Vec<String>>,
}

impl Render for TropPointRecord {
    fn text(&self) -> String {
        let mut out = vec![format!("trop: ({})", self.trop.join(", "))];
        if let Some(res) = &self.residues {
            out.push(format!("residues: ({})", res.join(", ")));
        }
        out.join("\n")
    }
}

#[derive(Serialize)]
pub struct FiberPointRecord {
    pub coords: Vec<SeriesRecord>,
    pub trop: Vec<String>,
    pub residues: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub achieved_precision: Option<String>,
    /// Text-mode coordinate labels; not part of the JSON contract.
    #[serde(skip)]
    pub names: Vec<String>,
}

impl FiberPointRecord {
    pub fn build<F: CoeffField>(field: &F, p: &FiberPoint<F>, names: &[String]) -> Self {
        FiberPointRecord {
            coords: p
                .coords
                .iter()
                .map(|c| SeriesRecord::build(field, c))
                .collect(),
            trop: p.trop.iter().map(exp_str).collect(),
            residues: p.residues.iter().map(|a| field.render(a)).collect(),
            achieved_precision: prec_str(&p.achieved_precision),
            names: names.to_vec(),
        }
    }

    fn lines(&self, out: &mut Vec<String>) {
        for (i, c) in self.coords.iter().enumerate() {
            match self.names.get(i) {
                Some(name) => out.push(format!("  {name}: {}", c.text)),
                None => out.push(format!("  x{}: {}", i + 1, c.text)),
            }
        }
        out.push(format!("  trop: ({})", self.trop.join(", ")));
        out.push(format!("  residues: ({})", self.residues.join(", ")));
    }
}

impl Render for FiberPointRecord {
    fn text(&self) -> String {
        let mut out = Vec::new();
        self.lines(&mut out);
        out.join("\n")
    }
}

#[derive(Serialize)]
pub struct SampleRecord {
    pub requested: usize,
    pub count: usize,
    pub complete: bool,
    pub points: Vec<FiberPointRecord>,
}

impl SampleRecord {
    pub fn build<F: CoeffField>(field: &F, s: &FiberSample<F>, names: &[String]) -> Self {
        SampleRecord {
            requested: s.requested,
            count: s.points.len(),
            complete: s.is_complete(),
            points: s
                .points
                .iter()
                .map(|p| FiberPointRecord::build(field, p, names))
                .collect(),
        }
    }
}

impl Render for SampleRecord {
    fn text(&self) -> String {
        let mut out = vec![format!(
            "points: {} of {} requested",
            self.count, self.requested
        )];
        for (i, p) in self.points.iter().enumerate() {
            out.push(format!("[{i}]"));
            p.lines(&mut out);
        }
        out.join("\n")
    }
}

#[derive(Serialize)]
pub struct FunctorialityRecord {
    pub holds: bool,
    pub plain_holds: bool,
    pub exploded_holds: bool,
    pub trop_of_image: Vec<String>,
    pub map_of_trop: Vec<String>,
}

impl Render for FunctorialityRecord {
    fn text(&self) -> String {
        format!(
            "holds: {}\nplain: {}\nexploded: {}\ntrop of image: ({})\nmap of trop: ({})",
            self.holds,
            self.plain_holds,
            self.exploded_holds,
            self.trop_of_image.join(", "),
            self.map_of_trop.join(", ")
        )
    }
}

#[derive(Serialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<u32>,
}

#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema: &'static str,
    pub command: &'static str,
    pub result: T,
}

#[derive(Serialize)]
pub struct ErrorEnvelope {
    pub schema: &'static str,
    pub command: &'static str,
    pub error: ErrorRecord,
}
