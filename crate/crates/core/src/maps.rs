//! Monomial maps between algebraic tori, tropicalization of torus points,
//! and functoriality checks: tropicalization commutes with monomial maps,
//! both on valuations alone and in the exploded form that carries residues.

use crate::exp::Exp;
use crate::field::CoeffField;
use crate::series::{Series, SeriesError};
use std::error::Error;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMap {
    rows: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MapError {
    Shape(String),
    /// A coordinate has no certified leading term, so its valuation or
    /// residue cannot be read off.
    Valuation { coordinate: usize },
    Series(SeriesError),
}

impl fmt::Display for MapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapError::Shape(msg) => write!(f, "shape error: {msg}"),
            MapError::Valuation { coordinate } => write!(
                f,
                "coordinate {coordinate} has no certified leading term"
            ),
            MapError::Series(e) => write!(f, "{e}"),
        }
    }
}

impl Error for MapError {}

impl MonomialMap {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self, MapError> {
        if rows.is_empty() {
            return Err(MapError::Shape("a monomial map needs at least one row".to_string()));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(MapError::Shape("a monomial map needs at least one column".to_string()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(MapError::Shape("ragged exponent matrix".to_string()));
        }
        Ok(MonomialMap { rows })
    }

    pub fn source_dim(&self) -> usize {
        self.rows[0].len()
    }

    pub fn target_dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// Matrix composition: (other . self)(x) = other(self(x)).
    pub fn then(&self, other: &MonomialMap) -> Result<MonomialMap, MapError> {
        if other.source_dim() != self.target_dim() {
            return Err(MapError::Shape(format!(
                "composition needs matching dimensions: {} vs {}",
                other.source_dim(),
                self.target_dim()
            )));
        }
        let rows = other
            .rows
            .iter()
            .map(|brow| {
                (0..self.source_dim())
                    .map(|k| {
                        brow.iter()
                            .zip(&self.rows)
                            .map(|(b, arow)| b * arow[k])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        MonomialMap::new(rows)
    }

    /// Image of a torus point: each output coordinate is the monomial
    /// x^row. Inverses of the inputs are taken once and reused.
    pub fn apply<F: CoeffField>(
        &self,
        field: &F,
        point: &[Series<F>],
    ) -> Result<Vec<Series<F>>, MapError> {
        if point.len() != self.source_dim() {
            return Err(MapError::Shape(format!(
                "map expects {} coordinates, got {}",
                self.source_dim(),
                point.len()
            )));
        }
        let mut inverses: Vec<Option<Series<F>>> = vec![None; point.len()];
        let mut out = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut acc = Series::one(field);
            for (i, &a) in row.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let factor = if a > 0 {
                    point[i].pow(field, a as u64)
                } else {
                    let inv = match &inverses[i] {
                        Some(inv) => inv.clone(),
                        None => {
                            let inv = point[i].invert(field).map_err(MapError::Series)?;
                            inverses[i] = Some(inv.clone());
                            inv
                        }
                    };
                    inv.pow(field, (-a) as u64)
                };
                acc = acc.mul(field, &factor);
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Linear action on tropical points: v -> A v.
    pub fn trop(&self, v: &[Exp]) -> Result<Vec<Exp>, MapError> {
        if v.len() != self.source_dim() {
            return Err(MapError::Shape(format!(
                "map expects {} tropical coordinates, got {}",
                self.source_dim(),
                v.len()
            )));
        }
        Ok(self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .map(|(&a, x)| x.mul_int(a))
                    .fold(Exp::zero(), |acc, t| &acc + &t)
            })
            .collect())
    }

    /// Induced map on residues: xbar -> xbar^row componentwise.
    pub fn residues<F: CoeffField>(
        &self,
        field: &F,
        xbar: &[F::Elem],
    ) -> Result<Vec<F::Elem>, MapError> {
        if xbar.len() != self.source_dim() {
            return Err(MapError::Shape(format!(
                "map expects {} residues, got {}",
                self.source_dim(),
                xbar.len()
            )));
        }
        self.rows
            .iter()
            .map(|row| {
                let mut acc = field.one();
                for (i, &a) in row.iter().enumerate() {
                    if a == 0 {
                        continue;
                    }
                    let factor = if a > 0 {
                        field.pow(&xbar[i], a as u64)
                    } else {
                        let inv = field
                            .inv(&xbar[i])
                            .ok_or(MapError::Series(SeriesError::ZeroSeries))?;
                        field.pow(&inv, (-a) as u64)
                    };
                    acc = field.mul(&acc, &factor);
                }
                Ok(acc)
            })
            .collect()
    }
}

/// Componentwise valuations of a torus point.
pub fn trop_point<F: CoeffField>(point: &[Series<F>]) -> Result<Vec<Exp>, MapError> {
    point
        .iter()
        .enumerate()
        .map(|(i, x)| {
            x.valuation()
                .cloned()
                .ok_or(MapError::Valuation { coordinate: i })
        })
        .collect()
}

/// Valuations together with leading coefficients.
pub fn exploded_point<F: CoeffField>(
    point: &[Series<F>],
) -> Result<(Vec<Exp>, Vec<F::Elem>), MapError> {
    let mut vals = Vec::with_capacity(point.len());
    let mut residues = Vec::with_capacity(point.len());
    for (i, x) in point.iter().enumerate() {
        match x.leading() {
            Some((e, r)) => {
                vals.push(e.clone());
                residues.push(r.clone());
            }
            None => return Err(MapError::Valuation { coordinate: i }),
        }
    }
    Ok((vals, residues))
}

/// trop(map(x)) == A trop(x)?
pub fn check_functoriality<F: CoeffField>(
    field: &F,
    map: &MonomialMap,
    point: &[Series<F>],
) -> Result<bool, MapError> {
    let image = map.apply(field, point)?;
    let lhs = trop_point(&image)?;
    let rhs = map.trop(&trop_point(point)?)?;
    Ok(lhs == rhs)
}

/// Exploded functoriality: valuations transform by A and residues by the
/// induced monomial map, simultaneously.
pub fn check_exploded_functoriality<F: CoeffField>(
    field: &F,
    map: &MonomialMap,
    point: &[Series<F>],
) -> Result<bool, MapError> {
    let image = map.apply(field, point)?;
    let (lhs_vals, lhs_res) = exploded_point(&image)?;
    let (vals, res) = exploded_point(point)?;
    let rhs_vals = map.trop(&vals)?;
    let rhs_res = map.residues(field, &res)?;
    Ok(lhs_vals == rhs_vals && lhs_res == rhs_res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exp::Precision;
    use crate::field::RationalField;
    use num_rational::BigRational;

    fn qi(n: i64) -> BigRational {
        BigRational::from(num_bigint::BigInt::from(n))
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(num_bigint::BigInt::from(n), num_bigint::BigInt::from(d))
    }

    fn mono(c: BigRational, e: Exp) -> Series<RationalField> {
        Series::monomial(&RationalField, c, e, Precision::Exact)
    }

    #[test]
    fn laurent_monomial_map_on_monomials() {
        let f = RationalField;
        let map = MonomialMap::new(vec![vec![2, -1]]).unwrap();
        let point = [mono(qi(1), Exp::from_int(1)), mono(qi(1), Exp::from_int(3))];
        let image = map.apply(&f, &point).unwrap();
        assert_eq!(image.len(), 1);
        assert_eq!(image[0], mono(qi(1), Exp::from_int(-1)));
        assert_eq!(
            map.trop(&[Exp::from_int(1), Exp::from_int(3)]).unwrap(),
            vec![Exp::from_int(-1)]
        );
    }

    #[test]
    fn exploded_data_transforms() {
        let f = RationalField;
        let map = MonomialMap::new(vec![vec![2, -1]]).unwrap();
        let point = [mono(qi(2), Exp::from_int(1)), mono(qi(3), Exp::from_int(3))];
        let image = map.apply(&f, &point).unwrap();
        let (vals, res) = exploded_point(&image).unwrap();
        assert_eq!(vals, vec![Exp::from_int(-1)]);
        assert_eq!(res, vec![q(4, 3)]);
        assert!(check_exploded_functoriality(&f, &map, &point).unwrap());
    }

    #[test]
    fn functoriality_on_full_series() {
        let f = RationalField;
        let map = MonomialMap::new(vec![vec![1, 1], vec![0, -2], vec![3, -1]]).unwrap();
        let x = Series::from_terms(
            &f,
            [(Exp::new(-1, 2), qi(2)), (Exp::from_int(0), qi(1))],
            Precision::from_int(4),
        );
        let y = Series::from_terms(
            &f,
            [(Exp::from_int(1), qi(-3)), (Exp::from_int(2), qi(5))],
            Precision::from_int(6),
        );
        let point = [x, y];
        assert!(check_functoriality(&f, &map, &point).unwrap());
        assert!(check_exploded_functoriality(&f, &map, &point).unwrap());
    }

    #[test]
    fn composition_matches_matrix_product() {
        let f = RationalField;
        let a = MonomialMap::new(vec![vec![1, 1], vec![0, 2]]).unwrap();
        let b = MonomialMap::new(vec![vec![1, -1]]).unwrap();
        let ba = a.then(&b).unwrap();
        assert_eq!(ba.rows(), &[vec![1, -1]]);
        let point = [mono(qi(2), Exp::from_int(1)), mono(qi(1), Exp::from_int(-2))];
        let direct = ba.apply(&f, &point).unwrap();
        let staged = b.apply(&f, &a.apply(&f, &point).unwrap()).unwrap();
        assert_eq!(direct, staged);
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            MonomialMap::new(vec![]),
            Err(MapError::Shape(_))
        ));
        assert!(matches!(
            MonomialMap::new(vec![vec![1, 2], vec![3]]),
            Err(MapError::Shape(_))
        ));
        let f = RationalField;
        let map = MonomialMap::new(vec![vec![1, 0]]).unwrap();
        let point = [mono(qi(1), Exp::from_int(1))];
        assert!(matches!(
            map.apply(&f, &point),
            Err(MapError::Shape(_))
        ));
    }

    #[test]
    fn valuation_error_for_uncertified_coordinate() {
        let fuzzy = Series::<RationalField>::zero(Precision::from_int(3));
        let err = trop_point(&[fuzzy]).unwrap_err();
        assert_eq!(err, MapError::Valuation { coordinate: 0 });
    }
}
