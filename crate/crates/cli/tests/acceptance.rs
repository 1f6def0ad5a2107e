//! Acceptance checklist. Each test pins one numbered guarantee of the
//! library/binary pair and fails loudly if it drifts. Comparisons are exact
//! (rational arithmetic throughout); the only tolerances are the wall-clock
//! limits named by the consts below, which are part of the contract.

use fiberlift_cli::ast::parse_expr;
use fiberlift_cli::lower::lower_series;
use fiberlift_core::curve::{trop_curve, EdgeEnds};
use fiberlift_core::field::{CoeffField, FiniteField, RationalField};
use fiberlift_core::fiber::sample_fiber;
use fiberlift_core::lifting::{enumerate_roots, lift_root, LiftBudget, LiftStatus, LiftedRoot};
use fiberlift_core::maps::{check_exploded_functoriality, check_functoriality, MonomialMap};
use fiberlift_core::tropical::{init_form, newton_polygon, trop_member};
use fiberlift_core::{Exp, LaurentPoly, Precision, Series};
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::collections::{BTreeMap, HashSet};
use std::process::Command;
use std::time::{Duration, Instant};

/// Per-invocation limit for the wild ramification runs (criterion 1).
const AS_TIME_LIMIT: Duration = Duration::from_secs(1);
/// Whole-batch limit for the 100 factored-polynomial runs (criterion 2).
const FACTORED_TIME_LIMIT: Duration = Duration::from_secs(60);
/// Whole-batch limit for the 1500 functoriality runs (criterion 5).
const FUNCTORIALITY_TIME_LIMIT: Duration = Duration::from_secs(10);

fn default_budget() -> LiftBudget {
    LiftBudget::new(Exp::from_int(8), 64, 256)
}

fn one_series<F: CoeffField>(field: &F) -> Series<F> {
    Series::one(field)
}

fn exact_series<F: CoeffField, I>(field: &F, terms: I) -> Series<F>
where
    I: IntoIterator<Item = (Exp, F::Elem)>,
{
    Series::from_terms(field, terms, Precision::Exact)
}

/// z^p - z - t^(-1) over F_p.
fn artin_schreier(field: &FiniteField, p: u64) -> LaurentPoly<FiniteField> {
    let tinv = Series::monomial(
        field,
        field.one(),
        Exp::new(-1, 1),
        Precision::Exact,
    );
    LaurentPoly::from_monomials(
        field,
        1,
        [
            (vec![p as i64], one_series(field)),
            (vec![1], one_series(field).neg(field)),
            (vec![0], tinv.neg(field)),
        ],
    )
}

fn artin_schreier_enumeration(p: u64) -> (FiniteField, LaurentPoly<FiniteField>, Vec<LiftedRoot<FiniteField>>) {
    let field = FiniteField::new(p, 1).unwrap();
    let f = artin_schreier(&field, p);
    let budget = LiftBudget::new(Exp::from_int(8), 6, 256);
    let en = enumerate_roots(&field, &f, &budget).unwrap();
    assert!(en.unresolved.is_empty(), "p = {p}: unresolved groups");
    (field, f, en.roots)
}

type FactoredCase = (LaurentPoly<RationalField>, Vec<(Series<RationalField>, usize)>);

/// Seeded factored-polynomial cases: monic products of 2..=4 linear factors
/// (z - r_i)^{m_i} whose roots have pairwise distinct (valuation, residue)
/// leading data and short exact tails.
fn factored_cases() -> Vec<FactoredCase> {
    let field = RationalField;
    let mut rng = ChaCha20Rng::seed_from_u64(20_001);
    let mut cases = Vec::with_capacity(100);
    for _ in 0..100 {
        let total = rng.random_range(2..=4usize);
        let mut remaining = total;
        let mut used: Vec<(Exp, BigRational)> = Vec::new();
        let mut groups: Vec<(Series<RationalField>, usize)> = Vec::new();
        while remaining > 0 {
            let mult = rng.random_range(1..=remaining);
            let (v, a) = loop {
                let v = Exp::new(rng.random_range(-3..=3), rng.random_range(1..=2));
                let a = field.nth_element(rng.random_range(1..=12));
                if !used.iter().any(|(uv, ua)| uv == &v && ua == &a) {
                    break (v, a);
                }
            };
            used.push((v.clone(), a.clone()));
            let mut terms: BTreeMap<Exp, BigRational> = BTreeMap::new();
            terms.insert(v.clone(), a);
            for _ in 0..rng.random_range(0..=3usize) {
                let e = &v + &Exp::new(rng.random_range(1..=4), rng.random_range(1..=2));
                terms.insert(e, field.nth_element(rng.random_range(0..9)));
            }
            groups.push((exact_series(&field, terms), mult));
            remaining -= mult;
        }
        let mut f = LaurentPoly::from_monomials(&field, 1, [(vec![0], one_series(&field))]);
        for (r, mult) in &groups {
            let factor = LaurentPoly::from_monomials(
                &field,
                1,
                [(vec![1], one_series(&field)), (vec![0], r.neg(&field))],
            );
            for _ in 0..*mult {
                f = f.mul(&field, &factor);
            }
        }
        cases.push((f, groups));
    }
    cases
}

fn binomial_poly(field: &RationalField) -> LaurentPoly<RationalField> {
    let one_plus_t = exact_series(
        field,
        [
            (Exp::zero(), field.one()),
            (Exp::one(), field.one()),
        ],
    );
    LaurentPoly::from_monomials(
        field,
        1,
        [
            (vec![2], one_series(field)),
            (vec![0], one_plus_t.neg(field)),
        ],
    )
}

fn binomial_lift() -> (LaurentPoly<RationalField>, LiftedRoot<RationalField>) {
    let field = RationalField;
    let f = binomial_poly(&field);
    let root = lift_root(&field, &f, &Exp::zero(), &field.one(), &default_budget()).unwrap();
    (f, root)
}

fn fiber_polys(field: &RationalField) -> [LaurentPoly<RationalField>; 2] {
    let linear = LaurentPoly::from_monomials(
        field,
        2,
        [
            (vec![1, 0], one_series(field)),
            (vec![0, 1], one_series(field)),
            (vec![0, 0], one_series(field)),
        ],
    );
    let one_plus_t = exact_series(
        field,
        [
            (Exp::zero(), field.one()),
            (Exp::one(), field.one()),
        ],
    );
    let product = LaurentPoly::from_monomials(
        field,
        2,
        [
            (vec![1, 1], one_series(field)),
            (vec![0, 0], one_plus_t.neg(field)),
        ],
    );
    [linear, product]
}

#[test]
fn criterion_1_wildly_ramified_root_enumeration() {
    for p in [2u64, 3, 5] {
        let poly_text = format!("z^{p} - z - 1/t");
        let start = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_fiberlift"))
            .args([
                "--json",
                "--field",
                "Fp",
                "--p",
                &p.to_string(),
                "--max-terms",
                "6",
                "roots",
                "--poly",
                &poly_text,
            ])
            .output()
            .expect("binary runs");
        let elapsed = start.elapsed();
        assert!(
            elapsed < AS_TIME_LIMIT,
            "p = {p}: took {elapsed:?}, limit {AS_TIME_LIMIT:?}"
        );
        assert_eq!(out.status.code(), Some(0));
        let v: serde_json::Value =
            serde_json::from_slice(&out.stdout).expect("json output");
        let roots = v["result"]["roots"].as_array().unwrap();
        assert_eq!(roots.len(), p as usize, "p = {p}: expected {p} roots");
        assert!(v["result"]["unresolved"].as_array().unwrap().is_empty());

        let mut constants: Vec<String> = Vec::new();
        for root in roots {
            let terms = root["value"]["terms"].as_array().unwrap();
            assert!(terms.len() >= 4, "p = {p}: fewer than 4 series terms");
            for (j, term) in terms.iter().take(4).enumerate() {
                let expected = Exp::new(-1, p.pow(j as u32 + 1) as i64);
                assert_eq!(
                    term["exponent"].as_str().unwrap(),
                    expected.to_string(),
                    "p = {p}: term {j} exponent"
                );
                assert_eq!(term["coefficient"], "1", "p = {p}: term {j} coefficient");
            }
            let tail = &root["tail_branch"];
            assert_eq!(tail["exponent"], "0", "p = {p}: branch constant exponent");
            constants.push(tail["residue"].as_str().unwrap().to_string());
        }
        constants.sort();
        let expected: Vec<String> = (0..p).map(|c| c.to_string()).collect();
        assert_eq!(constants, expected, "p = {p}: branch constants must exhaust the prime field");
    }
    println!("[PASS] criterion 1: wildly ramified enumeration, exact terms, < 1 s per prime");
}

#[test]
fn criterion_2_factored_polynomials_recover_all_roots() {
    let field = RationalField;
    let cap = Exp::from_int(10);
    let budget = LiftBudget::new(cap.clone(), 64, 256);
    let start = Instant::now();
    for (case, (f, groups)) in factored_cases().into_iter().enumerate() {
        let en = enumerate_roots(&field, &f, &budget)
            .unwrap_or_else(|e| panic!("case {case}: enumeration failed: {e:?}"));
        assert!(en.unresolved.is_empty(), "case {case}: unresolved groups");
        assert_eq!(en.roots.len(), groups.len(), "case {case}: root count");
        for (r, mult) in &groups {
            let (v, a) = r.leading().unwrap();
            let found = en
                .roots
                .iter()
                .find(|root| root.value.leading() == Some((v, a)))
                .unwrap_or_else(|| panic!("case {case}: no root with leading data ({v}, {a})"));
            assert_eq!(found.multiplicity, *mult, "case {case}: multiplicity at ({v}, {a})");
            assert!(
                found.achieved_precision >= Precision::Finite(cap.clone()),
                "case {case}: achieved only {:?}",
                found.achieved_precision
            );
            assert_eq!(
                found.value.truncate(&cap),
                r.truncate(&cap),
                "case {case}: value disagrees below t^10"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed < FACTORED_TIME_LIMIT,
        "took {elapsed:?}, limit {FACTORED_TIME_LIMIT:?}"
    );
    println!("[PASS] criterion 2: 100 factored polynomials recovered exactly, < 60 s");
}

#[test]
fn criterion_3_square_root_matches_binomial_recurrence() {
    let (_, root) = binomial_lift();
    assert_eq!(root.multiplicity, 1);
    assert!(root.achieved_precision >= Precision::Finite(Exp::from_int(8)));

    // c_0 = 1, c_k = c_{k-1} (3/2 - k) / k: the half-integer binomial
    // coefficients of (1+t)^(1/2), derived without any series arithmetic.
    let mut oracle: Vec<BigRational> = vec![BigRational::one()];
    for k in 1..8i64 {
        let prev = oracle.last().unwrap().clone();
        let step = BigRational::new((3 - 2 * k).into(), 2.into())
            / BigRational::from_integer(k.into());
        oracle.push(prev * step);
    }

    let terms: Vec<(&Exp, &BigRational)> = root.value.terms().collect();
    assert_eq!(terms.len(), 8, "one term per exponent 0..=7");
    for (k, (e, c)) in terms.into_iter().enumerate() {
        assert_eq!(*e, Exp::from_int(k as i64), "term {k} exponent");
        assert_eq!(*c, oracle[k], "term {k} coefficient");
    }
    println!("[PASS] criterion 3: (1+t)^(1/2) matches the recurrence term for term");
}

#[test]
fn criterion_4_residues_kill_the_initial_form() {
    // wildly ramified roots
    for p in [2u64, 3, 5] {
        let (field, f, roots) = artin_schreier_enumeration(p);
        for root in &roots {
            let (v, a) = root.value.leading().unwrap();
            let ini = init_form(&f, &[-v]).unwrap();
            assert_eq!(
                ini.eval(&field, std::slice::from_ref(a)),
                field.zero(),
                "p = {p}: residue fails the initial form"
            );
        }
    }
    // factored-polynomial roots
    let field = RationalField;
    let budget = LiftBudget::new(Exp::from_int(10), 64, 256);
    for (case, (f, _)) in factored_cases().into_iter().enumerate() {
        let en = enumerate_roots(&field, &f, &budget).unwrap();
        for root in &en.roots {
            let (v, a) = root.value.leading().unwrap();
            let ini = init_form(&f, &[-v]).unwrap();
            assert_eq!(
                ini.eval(&field, std::slice::from_ref(a)),
                field.zero(),
                "case {case}: residue fails the initial form"
            );
        }
    }
    // square root of 1 + t
    let (f, root) = binomial_lift();
    let (v, a) = root.value.leading().unwrap();
    let ini = init_form(&f, &[-v]).unwrap();
    assert_eq!(ini.eval(&field, std::slice::from_ref(a)), field.zero());
    // fiber points
    let origin = [Exp::zero(), Exp::zero()];
    for f in fiber_polys(&field) {
        let sample = sample_fiber(&field, &f, &origin, 50, &default_budget(), 0).unwrap();
        let ini = init_form(&f, &origin).unwrap();
        for point in &sample.points {
            assert_eq!(
                ini.eval(&field, &point.residues),
                field.zero(),
                "fiber residues fail the initial form"
            );
        }
    }
    println!("[PASS] criterion 4: every lifted residue annihilates its initial form");
}

fn nonzero_elem<F: CoeffField>(field: &F, rng: &mut ChaCha20Rng) -> F::Elem {
    let span = field.cardinality().map_or(11, |q| (q - 1).min(11));
    field.nth_element(rng.random_range(1..=span))
}

fn functoriality_batch<F: CoeffField>(field: &F, seed: u64) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for case in 0..500 {
        let n = rng.random_range(1..=3usize);
        let m = rng.random_range(1..=3usize);
        let rows: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.random_range(-3..=3)).collect())
            .collect();
        let map = MonomialMap::new(rows).unwrap();
        let point: Vec<Series<F>> = (0..n)
            .map(|_| {
                let v = Exp::new(rng.random_range(-4..=4), rng.random_range(1..=2));
                let mut terms: BTreeMap<Exp, F::Elem> = BTreeMap::new();
                terms.insert(v.clone(), nonzero_elem(field, &mut rng));
                for _ in 0..rng.random_range(0..=2usize) {
                    let e = &v + &Exp::new(rng.random_range(1..=3), rng.random_range(1..=2));
                    terms.insert(e, field.nth_element(rng.random_range(0..9)));
                }
                // a bound keeps every coordinate invertible under negative
                // map entries
                let bound = Precision::Finite(&v + &Exp::from_int(6));
                Series::from_terms(field, terms, bound)
            })
            .collect();
        assert!(
            check_functoriality(field, &map, &point).unwrap(),
            "case {case}: plain functoriality fails"
        );
        assert!(
            check_exploded_functoriality(field, &map, &point).unwrap(),
            "case {case}: exploded functoriality fails"
        );
    }
}

#[test]
fn criterion_5_functoriality_of_tropicalization() {
    let start = Instant::now();
    functoriality_batch(&RationalField, 5001);
    functoriality_batch(&FiniteField::new(3, 2).unwrap(), 5002);
    functoriality_batch(&FiniteField::new(7, 1).unwrap(), 5003);
    let elapsed = start.elapsed();
    assert!(
        elapsed < FUNCTORIALITY_TIME_LIMIT,
        "took {elapsed:?}, limit {FUNCTORIALITY_TIME_LIMIT:?}"
    );
    println!("[PASS] criterion 5: 1500 random monomial maps commute with tropicalization, < 10 s");
}

fn sampled_points(poly: &str) -> Vec<(Series<RationalField>, Series<RationalField>, serde_json::Value)> {
    let out = Command::new(env!("CARGO_BIN_EXE_fiberlift"))
        .args([
            "--json",
            "sample-fiber",
            "--poly",
            poly,
            "--point",
            "0,0",
            "--count",
            "50",
        ])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0), "sampling {poly} failed");
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let points = v["result"]["points"].as_array().unwrap();
    assert_eq!(v["result"]["count"], 50);
    assert_eq!(points.len(), 50);

    let field = RationalField;
    let mut seen = HashSet::new();
    let mut parsed = Vec::with_capacity(points.len());
    for point in points {
        let x_text = point["coords"][0]["text"].as_str().unwrap();
        let y_text = point["coords"][1]["text"].as_str().unwrap();
        assert!(
            seen.insert((x_text.to_string(), y_text.to_string())),
            "repeated point in {poly} sample"
        );
        assert_eq!(point["trop"][0], "0");
        assert_eq!(point["trop"][1], "0");
        let x = lower_series(&field, &parse_expr(x_text).unwrap()).unwrap();
        let y = lower_series(&field, &parse_expr(y_text).unwrap()).unwrap();
        for (coord, idx) in [(&x, 0), (&y, 1)] {
            let (v0, lead) = coord.leading().unwrap();
            assert!(v0.is_zero(), "coordinate {idx} valuation");
            assert_eq!(
                field.render(lead),
                point["residues"][idx].as_str().unwrap(),
                "coordinate {idx} residue"
            );
        }
        parsed.push((x, y, point.clone()));
    }
    parsed
}

#[test]
fn criterion_6_fiber_samples_satisfy_closed_forms() {
    let field = RationalField;
    let one_plus_t = exact_series(
        &field,
        [
            (Exp::zero(), field.one()),
            (Exp::one(), field.one()),
        ],
    );

    // x + y + 1 = 0: coordinates are exact and sum with 1 to the exact zero.
    for (x, y, _) in sampled_points("x + y + 1") {
        let sum = x.add(&field, &y).add(&field, &one_series(&field));
        assert!(sum.is_exact_zero(), "linear sample misses the hyperplane");
    }

    // x y = 1 + t: check the residual to its certified precision and the
    // closed form x = (1+t) y^(-1) after matching truncation.
    for (x, y, record) in sampled_points("x*y - (1+t)") {
        let residual = x.mul(&field, &y).sub(&field, &one_plus_t);
        assert!(residual.is_zero_to_precision(), "product residual has a term");
        let achieved = Exp::new(8, 1);
        match residual.ext_valuation() {
            Precision::Exact => {}
            bound => assert!(
                bound >= Precision::Finite(achieved.clone()),
                "residual certified only to {bound:?}"
            ),
        }
        assert!(record["achieved_precision"].is_string() || record["achieved_precision"].is_null());
        let cap = match (x.precision(), y.precision()) {
            (Precision::Finite(a), Precision::Finite(b)) => a.clone().min(b.clone()),
            (Precision::Finite(a), Precision::Exact) => a.clone(),
            (Precision::Exact, Precision::Finite(b)) => b.clone(),
            (Precision::Exact, Precision::Exact) => achieved.clone(),
        };
        let expected = one_plus_t
            .mul(&field, &y.truncate(&cap).invert(&field).unwrap())
            .truncate(&cap);
        assert_eq!(x.truncate(&cap), expected, "closed form disagrees");
    }
    println!("[PASS] criterion 6: 50 + 50 distinct fiber points satisfy their closed forms");
}

#[test]
fn criterion_7_newton_polygon_conserves_multiplicity() {
    let field = RationalField;
    let mut rng = ChaCha20Rng::seed_from_u64(7001);
    for case in 0..200 {
        let lo = rng.random_range(-2..=2i64);
        let hi = lo + rng.random_range(1..=6i64);
        let mut monomials = Vec::new();
        for j in lo..=hi {
            if j != lo && j != hi && rng.random_range(0..3) == 0 {
                continue;
            }
            let mut terms: BTreeMap<Exp, BigRational> = BTreeMap::new();
            let base = Exp::new(rng.random_range(-4..=4), rng.random_range(1..=2));
            terms.insert(base.clone(), field.nth_element(rng.random_range(1..=12)));
            for _ in 0..rng.random_range(0..=2usize) {
                let e = &base + &Exp::new(rng.random_range(1..=3), rng.random_range(1..=2));
                terms.insert(e, field.nth_element(rng.random_range(1..=9)));
            }
            monomials.push((vec![j], exact_series(&field, terms)));
        }
        let g = LaurentPoly::from_monomials(&field, 1, monomials);
        let (span_lo, span_hi) = g.univariate_span().unwrap();
        let segments = newton_polygon(&field, &g).unwrap();
        let total: usize = segments.iter().map(|s| s.multiplicity).sum();
        assert_eq!(
            total as i64,
            span_hi - span_lo,
            "case {case}: multiplicities must sum to deg - ord"
        );
        for seg in &segments {
            let r = &seg.root_valuation;
            let mut best: Option<Exp> = None;
            let mut achieved = 0usize;
            for (u, c) in g.monomials() {
                let w = c.valuation().unwrap() + &r.mul_int(u[0]);
                match &best {
                    Some(b) if &w > b => {}
                    Some(b) if &w == b => achieved += 1,
                    _ => {
                        best = Some(w);
                        achieved = 1;
                    }
                }
            }
            assert!(
                achieved >= 2,
                "case {case}: slope {r} achieves the minimum only once"
            );
        }
    }
    println!("[PASS] criterion 7: 200 Newton polygons conserve multiplicity with doubled minima");
}

#[test]
fn criterion_8_plane_curve_of_a_tropical_line() {
    let field = RationalField;
    let f = LaurentPoly::from_monomials(
        &field,
        2,
        [
            (vec![1, 0], one_series(&field)),
            (vec![0, 1], one_series(&field)),
            (vec![0, 0], one_series(&field)),
        ],
    );
    let curve = trop_curve(&f).unwrap();
    assert_eq!(curve.vertices, vec![[Exp::zero(), Exp::zero()]]);
    assert_eq!(curve.edges.len(), 3);
    let mut dirs = Vec::new();
    for edge in &curve.edges {
        assert!(matches!(edge.ends, EdgeEnds::Ray { vertex: 0 }));
        assert_eq!(edge.multiplicity, 1);
        dirs.push(edge.direction);
    }
    dirs.sort();
    assert_eq!(dirs, vec![[-1, 0], [0, -1], [1, 1]]);
    assert!(curve.balancing_defects().is_empty());

    // 21 x 21 grid over [-5, 5] with step 1/2: the curve and the membership
    // predicate must agree pointwise.
    for i in 0..21 {
        for j in 0..21 {
            let v = [Exp::new(-10 + i, 2), Exp::new(-10 + j, 2)];
            assert_eq!(
                curve.contains(&v),
                trop_member(&f, &v).unwrap(),
                "disagreement at ({}, {})",
                v[0],
                v[1]
            );
        }
    }
    println!("[PASS] criterion 8: the tropical line has rays (1,1), (-1,0), (0,-1) and matches membership on the grid");
}

fn assert_certified<F: CoeffField>(field: &F, f: &LaurentPoly<F>, root: &LiftedRoot<F>, label: &str) {
    for w in root.error_valuations.windows(2) {
        assert!(w[0] < w[1], "{label}: error valuations not strictly increasing");
    }
    // re-evaluate at the exact finite prefix the certificate is about; a
    // branch constant lives below the stored precision bound, so restore it
    // before evaluating.
    let mut terms: Vec<(Exp, F::Elem)> = root
        .value
        .terms()
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect();
    if let Some((e, c)) = &root.tail_branch {
        terms.push((e.clone(), c.clone()));
    }
    let prefix = Series::from_terms(field, terms, Precision::Exact);
    let residual = f.eval(field, std::slice::from_ref(&prefix)).unwrap();
    assert!(
        residual.ext_valuation() >= root.achieved_precision,
        "{label}: re-evaluation {:?} beats the certificate {:?}",
        residual.ext_valuation(),
        root.achieved_precision
    );
    if root.status == LiftStatus::CertifiedExact {
        assert!(residual.is_exact_zero(), "{label}: exact status but nonzero residual");
    }
}

#[test]
fn criterion_9_progress_and_certification() {
    for p in [2u64, 3, 5] {
        let (field, f, roots) = artin_schreier_enumeration(p);
        for root in &roots {
            assert_certified(&field, &f, root, &format!("artin-schreier p = {p}"));
        }
    }
    let field = RationalField;
    let budget = LiftBudget::new(Exp::from_int(10), 64, 256);
    for (case, (f, _)) in factored_cases().into_iter().enumerate() {
        let en = enumerate_roots(&field, &f, &budget).unwrap();
        for root in &en.roots {
            assert_certified(&field, &f, root, &format!("factored case {case}"));
        }
    }
    let (f, root) = binomial_lift();
    assert_certified(&field, &f, &root, "binomial");
    println!("[PASS] criterion 9: every lift makes strict progress and certifies its final precision");
}
