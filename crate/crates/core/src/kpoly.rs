//! Dense univariate polynomials over the coefficient field, used for residual
//! equations and univariate restrictions of initial forms.

use crate::field::CoeffField;

/// Coefficients ascending by degree; no trailing zeros; empty vec is the zero
/// polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct KPoly<F: CoeffField> {
    coeffs: Vec<F::Elem>,
}

impl<F: CoeffField> KPoly<F> {
    pub fn new(field: &F, mut coeffs: Vec<F::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        KPoly { coeffs }
    }

    pub fn zero() -> Self {
        KPoly { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, field: &F, i: usize) -> F::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| field.zero())
    }

    pub fn eval(&self, field: &F, x: &F::Elem) -> F::Elem {
        let mut acc = field.zero();
        for c in self.coeffs.iter().rev() {
            acc = field.add(&field.mul(&acc, x), c);
        }
        acc
    }

    pub fn add(&self, field: &F, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(field.add(&self.coeff(field, i), &other.coeff(field, i)));
        }
        KPoly::new(field, out)
    }

    pub fn mul(&self, field: &F, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return KPoly::zero();
        }
        let mut out = vec![field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if field.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(&out[i + j], &field.mul(a, b));
            }
        }
        KPoly::new(field, out)
    }

    /// Every root in k with exact multiplicity, in the field's canonical order.
    pub fn roots(&self, field: &F) -> Vec<(F::Elem, usize)> {
        field.roots(&self.coeffs)
    }

    pub fn render(&self, field: &F, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if field.is_zero(c) {
                continue;
            }
            let cs = field.render(c);
            let wrapped = if cs.contains('+') || cs.contains('-') || cs.contains('/') {
                format!("({cs})")
            } else {
                cs.clone()
            };
            let part = match i {
                0 => wrapped,
                _ => {
                    let pow = if i == 1 {
                        var.to_string()
                    } else {
                        format!("{var}^{i}")
                    };
                    if field.is_one(c) {
                        pow
                    } else {
                        format!("{wrapped}*{pow}")
                    }
                }
            };
            parts.push(part);
        }
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::RationalField;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn qi(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    #[test]
    fn normalization_and_eval() {
        let f = RationalField;
        let p = KPoly::new(&f, vec![qi(1), qi(2), qi(0)]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(p.eval(&f, &qi(3)), qi(7));
        assert!(KPoly::new(&f, vec![qi(0)]).is_zero());
    }

    #[test]
    fn product_degree_adds() {
        let f = RationalField;
        let a = KPoly::new(&f, vec![qi(-1), qi(1)]);
        let b = KPoly::new(&f, vec![qi(1), qi(1)]);
        assert_eq!(a.mul(&f, &b), KPoly::new(&f, vec![qi(-1), qi(0), qi(1)]));
    }

    #[test]
    fn render_skips_zero_terms() {
        let f = RationalField;
        let p = KPoly::new(&f, vec![qi(-1), qi(0), qi(1)]);
        assert_eq!(p.render(&f, "z"), "(-1) + z^2");
    }
}
