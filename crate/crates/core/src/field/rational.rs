//! The field Q with exact arbitrary-precision arithmetic.

use super::{multiplicity_of, CoeffField};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::str::FromStr;

/// Exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalField;

impl CoeffField for RationalField {
    type Elem = BigRational;

    fn characteristic(&self) -> u64 {
        0
    }

    fn cardinality(&self) -> Option<u128> {
        None
    }

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn is_one(&self, a: &BigRational) -> bool {
        a.is_one()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }

    fn elem_from_int(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn elem_from_bigint(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }

    fn nth_element(&self, index: u128) -> BigRational {
        // 0, 1, -1, 2, -2, ...
        let magnitude = BigInt::from(index.div_ceil(2));
        let signed = if index.is_multiple_of(2) { -magnitude } else { magnitude };
        BigRational::from_integer(signed)
    }

    fn elem_cmp(&self, a: &BigRational, b: &BigRational) -> Ordering {
        a.cmp(b)
    }

    fn render(&self, a: &BigRational) -> String {
        a.to_string()
    }

    fn parse_elem(&self, s: &str) -> Result<BigRational, String> {
        BigRational::from_str(s.trim()).map_err(|_| format!("bad rational `{s}`"))
    }

    fn roots(&self, coeffs: &[BigRational]) -> Vec<(BigRational, usize)> {
        let mut c: Vec<BigRational> = coeffs.to_vec();
        while c.last().map(|x| x.is_zero()).unwrap_or(false) {
            c.pop();
        }
        assert!(!c.is_empty(), "roots of the zero polynomial");
        let mut found: Vec<(BigRational, usize)> = Vec::new();

        // x = 0 contributes once per trailing zero coefficient.
        let zeros = c.iter().take_while(|x| x.is_zero()).count();
        if zeros > 0 {
            found.push((BigRational::zero(), zeros));
            c.drain(..zeros);
        }

        match c.len() {
            0 | 1 => {}
            2 => {
                let r = -(&c[0] / &c[1]);
                found.push((r, 1));
            }
            3 => {
                found.extend(quadratic_roots(&c[0], &c[1], &c[2]));
            }
            _ => {
                for r in rational_candidates(&c) {
                    let m = multiplicity_of(self, &c, &r);
                    if m > 0 {
                        found.push((r, m));
                    }
                }
            }
        }

        found.sort_by(|a, b| a.0.cmp(&b.0));
        found
    }
}

/// Roots in Q of c2 x^2 + c1 x + c0 via the discriminant; exact, no search.
fn quadratic_roots(
    c0: &BigRational,
    c1: &BigRational,
    c2: &BigRational,
) -> Vec<(BigRational, usize)> {
    let disc = c1 * c1 - BigRational::from_integer(BigInt::from(4)) * c2 * c0;
    match rational_sqrt(&disc) {
        None => Vec::new(),
        Some(s) => {
            let two_c2 = BigRational::from_integer(BigInt::from(2)) * c2;
            if s.is_zero() {
                vec![((-c1) / &two_c2, 2)]
            } else {
                let r1 = (-c1 + &s) / &two_c2;
                let r2 = (-c1 - &s) / &two_c2;
                vec![(r1, 1), (r2, 1)]
            }
        }
    }
}

/// The nonnegative rational square root, when one exists.
fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().magnitude();
    let d = x.denom().magnitude();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(BigRational::new(
            BigInt::from(sn),
            BigInt::from(sd),
        ))
    } else {
        None
    }
}

/// Candidate rational roots p/q of a polynomial with nonzero constant term:
/// p divides the constant, q divides the leading coefficient, both taken over
/// an integer model of the polynomial.
fn rational_candidates(c: &[BigRational]) -> BTreeSet<BigRational> {
    let mut lcm = BigInt::one();
    for x in c {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = c.iter().map(|x| (x * &lcm).to_integer()).collect();
    let a0 = ints.first().unwrap().magnitude().clone();
    let ad = ints.last().unwrap().magnitude().clone();
    let num_divs = divisors(&a0);
    let den_divs = divisors(&ad);
    let mut out = BTreeSet::new();
    for p in &num_divs {
        for q in &den_divs {
            let r = BigRational::new(BigInt::from(p.clone()), BigInt::from(q.clone()));
            out.insert(-&r);
            out.insert(r);
        }
    }
    out
}

fn divisors(n: &BigUint) -> Vec<BigUint> {
    assert!(!n.is_zero());
    let mut facs: Vec<(BigUint, u32)> = Vec::new();
    factorize(n.clone(), &mut facs);
    facs.sort();
    let mut merged: Vec<(BigUint, u32)> = Vec::new();
    for (p, e) in facs {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    let mut divs = vec![BigUint::one()];
    for (p, e) in merged {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigUint::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk = &pk * &p;
            }
        }
        divs = next;
    }
    divs
}

fn factorize(n: BigUint, out: &mut Vec<(BigUint, u32)>) {
    let mut n = n;
    if n.is_one() {
        return;
    }
    for p in 2u64..=4096 {
        let bp = BigUint::from(p);
        if &bp * &bp > n {
            break;
        }
        let mut e = 0u32;
        while (&n % &bp).is_zero() {
            n = &n / &bp;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
    }
    if n.is_one() {
        return;
    }
    if is_prime(&n) {
        out.push((n, 1));
        return;
    }
    let d = pollard_rho(&n);
    factorize(&n / &d, out);
    factorize(d, out);
}

/// Miller-Rabin with a fixed base set. Deterministic for inputs below 2^64 and
/// overwhelmingly reliable above, which is enough for a root search.
fn is_prime(n: &BigUint) -> bool {
    let small: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if let Some(v) = n.to_u64() {
        if v < 2 {
            return false;
        }
        if small.contains(&v) {
            return true;
        }
    }
    for p in small {
        if (n % BigUint::from(p)).is_zero() {
            return n == &BigUint::from(p);
        }
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'base: for a in small {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

/// Brent-style rho with deterministic polynomial offsets.
fn pollard_rho(n: &BigUint) -> BigUint {
    let two = BigUint::from(2u32);
    if (n % &two).is_zero() {
        return two;
    }
    for c in 1u64..64 {
        let cc = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &cc) % n;
        let mut x = BigUint::from(2u32);
        let mut y = BigUint::from(2u32);
        loop {
            x = f(&x);
            y = f(&f(&y));
            if x == y {
                break;
            }
            let diff = if x > y { &x - &y } else { &y - &x };
            let g = diff.gcd(n);
            if !g.is_one() {
                if &g == n {
                    break;
                }
                return g;
            }
        }
    }
    unreachable!("rho failed on a composite that trial division should have split");
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn qi(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn no_rational_sqrt_of_two() {
        assert_eq!(rational_sqrt(&qi(2)), None);
        assert_eq!(rational_sqrt(&q(9, 4)), Some(q(3, 2)));
        assert_eq!(rational_sqrt(&qi(-1)), None);
    }

    #[test]
    fn quadratic_without_rational_roots() {
        // z^2 - 2
        let f = RationalField;
        assert!(f.roots(&[qi(-2), qi(0), qi(1)]).is_empty());
    }

    #[test]
    fn quadratic_with_roots() {
        let f = RationalField;
        // z^2 - 1 -> -1, 1
        let r = f.roots(&[qi(-1), qi(0), qi(1)]);
        assert_eq!(r, vec![(qi(-1), 1), (qi(1), 1)]);
        // (z - 12/35)(z + 7/4) expanded
        let a = q(12, 35);
        let b = q(-7, 4);
        let r = f.roots(&[&a * &b, -(&a + &b), qi(1)]);
        assert_eq!(r, vec![(b, 1), (a, 1)]);
    }

    #[test]
    fn double_root_detected() {
        let f = RationalField;
        // (z - 3)^2 = z^2 - 6z + 9
        let r = f.roots(&[qi(9), qi(-6), qi(1)]);
        assert_eq!(r, vec![(qi(3), 2)]);
    }

    #[test]
    fn cubic_by_rational_root_search() {
        let f = RationalField;
        // (z - 1)^2 (z + 2) = z^3 - 3z + 2
        let r = f.roots(&[qi(2), qi(-3), qi(0), qi(1)]);
        assert_eq!(r, vec![(qi(-2), 1), (qi(1), 2)]);
        // (2z - 3)(3z + 5)(z - 4) = 6z^3 - 23z^2 - 19z + 60
        let r = f.roots(&[qi(60), qi(-19), qi(-23), qi(6)]);
        assert_eq!(r, vec![(q(-5, 3), 1), (q(3, 2), 1), (qi(4), 1)]);
    }

    #[test]
    fn zero_roots_stripped() {
        let f = RationalField;
        // z^2 (z - 5)
        let r = f.roots(&[qi(0), qi(0), qi(-5), qi(1)]);
        assert_eq!(r, vec![(qi(0), 2), (qi(5), 1)]);
    }

    #[test]
    fn factor_large_semiprime() {
        // 1000003 * 1000033
        let n = BigUint::from(1000003u64) * BigUint::from(1000033u64);
        let d = divisors(&n);
        assert_eq!(d.len(), 4);
    }
}
