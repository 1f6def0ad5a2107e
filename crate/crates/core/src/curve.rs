//! Tropical plane curves: the locus where the n=2 tropicalization achieves
//! its minimum at least twice, as an exact vertex/edge complex with lattice
//! multiplicities.
//!
//! Each unordered pair of monomials ties along a line with integer normal
//! u_j - u_i; clipping that line by the remaining min-constraints yields a
//! segment, ray, or full line. Edges are keyed by the set of monomials
//! achieving the minimum along them, which dedupes the pairs that share a
//! locus. Multiplicity is the lattice length between the extreme achieving
//! exponents.

use crate::exp::Exp;
use crate::field::CoeffField;
use crate::poly::LaurentPoly;
use crate::tropical::TropError;
use num_integer::Integer;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeEnds {
    /// Bounded edge between two vertices (indices into the vertex list,
    /// first endpoint lexicographically smaller).
    Segment(usize, usize),
    /// Unbounded edge leaving the vertex in the edge direction.
    Ray { vertex: usize },
    /// Entire line; arises when no constraint bounds the tie locus.
    Line { anchor: [Exp; 2] },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropEdge {
    pub ends: EdgeEnds,
    /// Primitive integer direction: along the segment from its first vertex,
    /// outward for a ray, lexicographically positive for a line.
    pub direction: [i64; 2],
    pub multiplicity: usize,
    /// Exponents achieving the minimum along the edge interior, sorted.
    pub achieving: Vec<[i64; 2]>,
}

#[derive(Clone, Debug)]
pub struct TropCurve {
    pub vertices: Vec<[Exp; 2]>,
    pub edges: Vec<TropEdge>,
    weights: Vec<([i64; 2], Exp)>,
}

fn dot_exp(u: &[i64; 2], v: &[Exp; 2]) -> Exp {
    &v[0].mul_int(u[0]) + &v[1].mul_int(u[1])
}

fn primitive(d: [i64; 2]) -> [i64; 2] {
    let g = d[0].gcd(&d[1]);
    debug_assert!(g > 0);
    [d[0] / g, d[1] / g]
}

struct Candidate {
    p0: [Exp; 2],
    dir: [i64; 2],
    lower: Option<Exp>,
    upper: Option<Exp>,
    achieving: Vec<usize>,
}

impl TropCurve {
    /// Exact membership: the minimum weight is achieved by at least two
    /// monomials at v.
    pub fn contains(&self, v: &[Exp]) -> bool {
        assert_eq!(v.len(), 2);
        let at = [v[0].clone(), v[1].clone()];
        let mut best: Option<Exp> = None;
        let mut count = 0usize;
        for (u, nu) in &self.weights {
            let w = nu - &dot_exp(u, &at);
            match &best {
                Some(b) if &w > b => {}
                Some(b) if &w == b => count += 1,
                _ => {
                    best = Some(w);
                    count = 1;
                }
            }
        }
        count >= 2
    }

    /// Sum of multiplicity-weighted outgoing primitive directions at every
    /// vertex; empty when balanced.
    pub fn balancing_defects(&self) -> Vec<(usize, [i64; 2])> {
        let mut sums = vec![[0i64; 2]; self.vertices.len()];
        for e in &self.edges {
            let m = e.multiplicity as i64;
            match &e.ends {
                EdgeEnds::Segment(a, b) => {
                    sums[*a][0] += m * e.direction[0];
                    sums[*a][1] += m * e.direction[1];
                    sums[*b][0] -= m * e.direction[0];
                    sums[*b][1] -= m * e.direction[1];
                }
                EdgeEnds::Ray { vertex } => {
                    sums[*vertex][0] += m * e.direction[0];
                    sums[*vertex][1] += m * e.direction[1];
                }
                EdgeEnds::Line { .. } => {}
            }
        }
        sums.into_iter()
            .enumerate()
            .filter(|(_, s)| *s != [0, 0])
            .collect()
    }
}

/// The tropical curve of a two-variable polynomial. Every coefficient must
/// carry a certified valuation; a coefficient that is zero to finite
/// precision cannot be placed and is an error.
pub fn trop_curve<F: CoeffField>(f: &LaurentPoly<F>) -> Result<TropCurve, TropError> {
    if f.nvars() != 2 {
        return Err(TropError::Unsupported(
            "tropical curves are computed for two variables".to_string(),
        ));
    }
    if f.is_zero() {
        return Err(TropError::ZeroPoly);
    }
    let mut weights: Vec<([i64; 2], Exp)> = Vec::new();
    for (u, c) in f.monomials() {
        match c.valuation() {
            Some(nu) => weights.push(([u[0], u[1]], nu.clone())),
            None => {
                let bound = match c.precision() {
                    crate::exp::Precision::Finite(b) => b.clone(),
                    crate::exp::Precision::Exact => unreachable!("exact zeros are not stored"),
                };
                return Err(TropError::PrecisionError {
                    monomial: u.clone(),
                    bound,
                });
            }
        }
    }

    let n = weights.len();
    let mut candidates: BTreeMap<Vec<usize>, Candidate> = BTreeMap::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (ui, nui) = &weights[i];
            let (uj, nuj) = &weights[j];
            let d = [uj[0] - ui[0], uj[1] - ui[1]];
            let c = nuj - nui;
            let dir = primitive([-d[1], d[0]]);
            let p0 = if d[0] != 0 {
                [c.div_int(d[0]), Exp::zero()]
            } else {
                [Exp::zero(), c.div_int(d[1])]
            };
            let mut lower: Option<Exp> = None;
            let mut upper: Option<Exp> = None;
            let mut achieving = vec![i, j];
            let mut empty = false;
            for (l, (ul, nul)) in weights.iter().enumerate() {
                if l == i || l == j {
                    continue;
                }
                let e = [ui[0] - ul[0], ui[1] - ul[1]];
                let alpha = &(nui - nul) - &dot_exp(&e, &p0);
                let beta = -(e[0] * dir[0] + e[1] * dir[1]);
                if beta == 0 {
                    if alpha.is_positive() {
                        empty = true;
                        break;
                    }
                    if alpha.is_zero() {
                        achieving.push(l);
                    }
                } else {
                    let bound = (-&alpha).div_int(beta);
                    if beta > 0 {
                        upper = Some(match upper {
                            Some(u) => u.min(bound),
                            None => bound,
                        });
                    } else {
                        lower = Some(match lower {
                            Some(l) => l.max(bound),
                            None => bound,
                        });
                    }
                }
            }
            if empty {
                continue;
            }
            if let (Some(lo), Some(hi)) = (&lower, &upper) {
                if lo >= hi {
                    // empty or pinched to a point; covered by other pairs
                    continue;
                }
            }
            achieving.sort_unstable();
            candidates.entry(achieving.clone()).or_insert(Candidate {
                p0,
                dir,
                lower,
                upper,
                achieving,
            });
        }
    }

    let at = |cand: &Candidate, s: &Exp| -> [Exp; 2] {
        [
            &cand.p0[0] + &s.mul_int(cand.dir[0]),
            &cand.p0[1] + &s.mul_int(cand.dir[1]),
        ]
    };

    let mut vertex_set: BTreeSet<[Exp; 2]> = BTreeSet::new();
    for cand in candidates.values() {
        if let Some(s) = &cand.lower {
            vertex_set.insert(at(cand, s));
        }
        if let Some(s) = &cand.upper {
            vertex_set.insert(at(cand, s));
        }
    }
    let vertices: Vec<[Exp; 2]> = vertex_set.into_iter().collect();
    let index_of = |p: &[Exp; 2]| -> usize { vertices.binary_search(p).unwrap() };

    let mut edges = Vec::new();
    for cand in candidates.values() {
        let achieving_exps: Vec<[i64; 2]> = cand
            .achieving
            .iter()
            .map(|&l| weights[l].0)
            .collect();
        let prim = {
            let u0 = achieving_exps[0];
            let u1 = achieving_exps[1];
            primitive([u1[0] - u0[0], u1[1] - u0[1]])
        };
        let proj = |u: &[i64; 2]| -> i64 {
            let r = [u[0] - achieving_exps[0][0], u[1] - achieving_exps[0][1]];
            let m = if prim[0] != 0 { r[0] / prim[0] } else { r[1] / prim[1] };
            debug_assert_eq!([m * prim[0], m * prim[1]], r, "achieving exponents collinear");
            m
        };
        let projections: Vec<i64> = achieving_exps.iter().map(proj).collect();
        let multiplicity =
            (projections.iter().max().unwrap() - projections.iter().min().unwrap()) as usize;

        let (ends, direction) = match (&cand.lower, &cand.upper) {
            (Some(lo), Some(hi)) => {
                let pa = at(cand, lo);
                let pb = at(cand, hi);
                let (first, second, dir) = if pa <= pb {
                    (index_of(&pa), index_of(&pb), cand.dir)
                } else {
                    (index_of(&pb), index_of(&pa), [-cand.dir[0], -cand.dir[1]])
                };
                (EdgeEnds::Segment(first, second), dir)
            }
            (Some(lo), None) => {
                let p = at(cand, lo);
                (EdgeEnds::Ray { vertex: index_of(&p) }, cand.dir)
            }
            (None, Some(hi)) => {
                let p = at(cand, hi);
                (
                    EdgeEnds::Ray { vertex: index_of(&p) },
                    [-cand.dir[0], -cand.dir[1]],
                )
            }
            (None, None) => {
                let dir = if cand.dir[0] > 0 || (cand.dir[0] == 0 && cand.dir[1] > 0) {
                    cand.dir
                } else {
                    [-cand.dir[0], -cand.dir[1]]
                };
                (
                    EdgeEnds::Line {
                        anchor: cand.p0.clone(),
                    },
                    dir,
                )
            }
        };
        let mut sorted_achieving = achieving_exps;
        sorted_achieving.sort_unstable();
        edges.push(TropEdge {
            ends,
            direction,
            multiplicity,
            achieving: sorted_achieving,
        });
    }

    let curve = TropCurve {
        vertices,
        edges,
        weights,
    };
    assert!(
        curve.balancing_defects().is_empty(),
        "unbalanced tropical curve"
    );
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exp::Precision;
    use crate::field::RationalField;
    use crate::series::Series;
    use num_rational::BigRational;

    fn qi(n: i64) -> BigRational {
        BigRational::from(num_bigint::BigInt::from(n))
    }

    fn c(n: i64) -> Series<RationalField> {
        Series::constant(&RationalField, qi(n))
    }

    fn ev(n: i64) -> Exp {
        Exp::from_int(n)
    }

    #[test]
    fn tropical_line_has_three_unit_rays() {
        let f = RationalField;
        let p = LaurentPoly::from_monomials(
            &f,
            2,
            [(vec![1, 0], c(1)), (vec![0, 1], c(1)), (vec![0, 0], c(1))],
        );
        let curve = trop_curve(&p).unwrap();
        assert_eq!(curve.vertices, vec![[ev(0), ev(0)]]);
        assert_eq!(curve.edges.len(), 3);
        let mut dirs: Vec<[i64; 2]> = curve.edges.iter().map(|e| e.direction).collect();
        dirs.sort_unstable();
        assert_eq!(dirs, vec![[-1, 0], [0, -1], [1, 1]]);
        for e in &curve.edges {
            assert_eq!(e.multiplicity, 1);
            assert!(matches!(e.ends, EdgeEnds::Ray { vertex: 0 }));
        }
        assert!(curve.contains(&[ev(0), ev(0)]));
        assert!(curve.contains(&[ev(3), ev(3)]));
        assert!(curve.contains(&[ev(-2), ev(0)]));
        assert!(!curve.contains(&[ev(1), ev(2)]));
    }

    #[test]
    fn binomial_gives_full_line() {
        let f = RationalField;
        let p = LaurentPoly::from_monomials(&f, 2, [(vec![1, 0], c(1)), (vec![0, 1], c(1))]);
        let curve = trop_curve(&p).unwrap();
        assert!(curve.vertices.is_empty());
        assert_eq!(curve.edges.len(), 1);
        let e = &curve.edges[0];
        assert_eq!(e.direction, [1, 1]);
        assert_eq!(e.multiplicity, 1);
        assert!(matches!(e.ends, EdgeEnds::Line { .. }));
        assert!(curve.contains(&[ev(5), ev(5)]));
        assert!(!curve.contains(&[ev(5), ev(4)]));
    }

    #[test]
    fn collinear_support_gives_multiplicity_two_line() {
        // x^2 + x + 1: all weights tie along v1 = 0.
        let f = RationalField;
        let p = LaurentPoly::from_monomials(
            &f,
            2,
            [(vec![2, 0], c(1)), (vec![1, 0], c(1)), (vec![0, 0], c(1))],
        );
        let curve = trop_curve(&p).unwrap();
        assert!(curve.vertices.is_empty());
        assert_eq!(curve.edges.len(), 1);
        let e = &curve.edges[0];
        assert_eq!(e.multiplicity, 2);
        assert_eq!(e.direction, [0, 1]);
        match &e.ends {
            EdgeEnds::Line { anchor } => assert_eq!(anchor, &[ev(0), ev(0)]),
            other => panic!("expected a line, got {other:?}"),
        }
        assert!(curve.contains(&[ev(0), ev(7)]));
        assert!(!curve.contains(&[ev(1), ev(0)]));
    }

    #[test]
    fn conic_with_two_vertices_balances() {
        // xy + x + y + t: a segment from (-1,-1) to (0,0) with two rays at
        // each end.
        let f = RationalField;
        let t = Series::monomial(&f, qi(1), Exp::one(), Precision::Exact);
        let p = LaurentPoly::from_monomials(
            &f,
            2,
            [
                (vec![1, 1], c(1)),
                (vec![1, 0], c(1)),
                (vec![0, 1], c(1)),
                (vec![0, 0], t),
            ],
        );
        let curve = trop_curve(&p).unwrap();
        assert_eq!(curve.vertices, vec![[ev(-1), ev(-1)], [ev(0), ev(0)]]);
        assert_eq!(curve.edges.len(), 5);
        let segments: Vec<_> = curve
            .edges
            .iter()
            .filter(|e| matches!(e.ends, EdgeEnds::Segment(..)))
            .collect();
        assert_eq!(segments.len(), 1);
        assert_eq!(segments[0].ends, EdgeEnds::Segment(0, 1));
        assert_eq!(segments[0].direction, [1, 1]);
        assert_eq!(segments[0].multiplicity, 1);
        let mut ray_dirs: Vec<[i64; 2]> = curve
            .edges
            .iter()
            .filter(|e| matches!(e.ends, EdgeEnds::Ray { .. }))
            .map(|e| e.direction)
            .collect();
        ray_dirs.sort_unstable();
        assert_eq!(ray_dirs, vec![[-1, 0], [0, -1], [0, 1], [1, 0]]);
        assert!(curve.balancing_defects().is_empty());
        assert!(curve.contains(&[Exp::new(-1, 2), Exp::new(-1, 2)]));
        assert!(curve.contains(&[ev(-1), ev(-5)]));
        assert!(curve.contains(&[ev(-2), ev(-1)]));
        assert!(!curve.contains(&[ev(-2), ev(-3)]));
    }

    #[test]
    fn rejects_uncertified_coefficients() {
        let f = RationalField;
        let fuzzy = Series::<RationalField>::zero(Precision::from_int(2));
        let p = LaurentPoly::from_monomials(&f, 2, [(vec![1, 0], c(1)), (vec![0, 0], fuzzy)]);
        let err = trop_curve(&p).unwrap_err();
        assert!(matches!(err, TropError::PrecisionError { .. }));
    }

    #[test]
    fn wrong_arity_rejected() {
        let f = RationalField;
        let p = LaurentPoly::from_monomials(&f, 1, [(vec![1], c(1)), (vec![0], c(1))]);
        assert!(matches!(
            trop_curve(&p),
            Err(TropError::Unsupported(_))
        ));
    }
}
