//! F_{p^k} for a small prime power, as F_p[g] modulo a fixed irreducible.
//!
//! The modulus is the first irreducible monic polynomial of degree k in the
//! enumeration order of coefficient vectors (c_0, ..., c_{k-1}), so a given
//! (p, k) always names the same field representation. Elements are coefficient
//! vectors of length k; the generator prints as `g`.

use super::{multiplicity_of, CoeffField, FieldError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// Largest supported cardinality p^k; root search enumerates every element.
const MAX_CARDINALITY: u128 = 1 << 20;

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteField {
    p: u64,
    k: usize,
    modulus: Arc<Vec<u64>>,
}

/// Element of F_{p^k}: coefficients of 1, g, ..., g^{k-1}, each reduced mod p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FqElem(Vec<u64>);

impl FqElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }
}

impl FiniteField {
    pub fn new(p: u64, k: usize) -> Result<Self, FieldError> {
        if p < 2 || !is_small_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k == 0 {
            return Err(FieldError::BadExtension { p, k });
        }
        let mut card: u128 = 1;
        for _ in 0..k {
            card = card.saturating_mul(p as u128);
            if card > MAX_CARDINALITY {
                return Err(FieldError::TooLarge { p, k });
            }
        }
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            find_irreducible(p, k)
        };
        Ok(FiniteField {
            p,
            k,
            modulus: Arc::new(modulus),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn extension_degree(&self) -> usize {
        self.k
    }

    /// The class of g, zero in the prime field case only if p divides g... the
    /// generator is only meaningful for k >= 2.
    pub fn generator(&self) -> FqElem {
        let mut v = vec![0; self.k];
        if self.k >= 2 {
            v[1] = 1;
        }
        FqElem(v)
    }

    /// Modulus polynomial coefficients (degree k, monic).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Element with index `i` in the deterministic enumeration; i < p^k.
    pub fn element(&self, i: u128) -> FqElem {
        let mut v = vec![0u64; self.k];
        let mut rest = i;
        for slot in (0..self.k).rev() {
            v[slot] = (rest % self.p as u128) as u64;
            rest /= self.p as u128;
        }
        // Index digits are big-endian over (c_0, ..., c_{k-1}).
        FqElem(v)
    }

    fn reduce_vec(&self, mut poly: Vec<u64>) -> FqElem {
        poly_reduce(&mut poly, &self.modulus, self.p);
        poly.resize(self.k, 0);
        FqElem(poly)
    }
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{{{}^{}}}", self.p, self.k)
        }
    }
}

impl CoeffField for FiniteField {
    type Elem = FqElem;

    fn characteristic(&self) -> u64 {
        self.p
    }

    fn cardinality(&self) -> Option<u128> {
        Some((self.p as u128).pow(self.k as u32))
    }

    fn zero(&self) -> FqElem {
        FqElem(vec![0; self.k])
    }

    fn one(&self) -> FqElem {
        let mut v = vec![0; self.k];
        v[0] = 1;
        FqElem(v)
    }

    fn is_zero(&self, a: &FqElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    fn is_one(&self, a: &FqElem) -> bool {
        a.0[0] == 1 && a.0[1..].iter().all(|&c| c == 0)
    }

    fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        FqElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| (x + y) % self.p)
                .collect(),
        )
    }

    fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        FqElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| (x + self.p - y) % self.p)
                .collect(),
        )
    }

    fn neg(&self, a: &FqElem) -> FqElem {
        FqElem(a.0.iter().map(|&x| (self.p - x) % self.p).collect())
    }

    fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let mut prod = vec![0u64; 2 * self.k];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                // p < 2^20 keeps every partial product far from overflow.
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        self.reduce_vec(prod)
    }

    fn inv(&self, a: &FqElem) -> Option<FqElem> {
        if self.is_zero(a) {
            return None;
        }
        let inv = poly_ext_gcd_inverse(&a.0, &self.modulus, self.p)?;
        Some(self.reduce_vec(inv))
    }

    fn elem_from_int(&self, n: i64) -> FqElem {
        let p = self.p as i64;
        let r = ((n % p) + p) % p;
        let mut v = vec![0; self.k];
        v[0] = r as u64;
        FqElem(v)
    }

    fn elem_from_bigint(&self, n: &BigInt) -> FqElem {
        let p = BigInt::from(self.p);
        let mut r = n.mod_floor(&p);
        if r.is_negative() {
            r += &p;
        }
        let mut v = vec![0; self.k];
        v[0] = r.to_u64().unwrap();
        FqElem(v)
    }

    fn nth_element(&self, index: u128) -> FqElem {
        self.element(index % self.cardinality().unwrap())
    }

    fn elem_cmp(&self, a: &FqElem, b: &FqElem) -> Ordering {
        a.0.cmp(&b.0)
    }

    fn render(&self, a: &FqElem) -> String {
        if self.k == 1 {
            return a.0[0].to_string();
        }
        let mut parts = Vec::new();
        for (i, &c) in a.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let part = match (i, c) {
                (0, _) => c.to_string(),
                (1, 1) => "g".to_string(),
                (1, _) => format!("{c}*g"),
                (_, 1) => format!("g^{i}"),
                (_, _) => format!("{c}*g^{i}"),
            };
            parts.push(part);
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    }

    fn parse_elem(&self, s: &str) -> Result<FqElem, String> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err("empty field element".to_string());
        }
        let mut acc = self.zero();
        let body = compact.strip_prefix('+').unwrap_or(&compact);
        // Split into signed terms.
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = body.starts_with('-');
        let chars = body.strip_prefix('-').unwrap_or(body).chars().peekable();
        for c in chars {
            if c == '+' || c == '-' {
                terms.push((neg, std::mem::take(&mut cur)));
                neg = c == '-';
            } else {
                cur.push(c);
            }
        }
        terms.push((neg, cur));
        for (neg, term) in terms {
            if term.is_empty() {
                return Err(format!("bad field element `{s}`"));
            }
            let (coeff_str, pow) = match term.split_once('g') {
                None => (term.as_str(), None),
                Some((c, rest)) => {
                    let c = c.strip_suffix('*').unwrap_or(c);
                    let pow = if rest.is_empty() {
                        1usize
                    } else {
                        rest.strip_prefix('^')
                            .and_then(|x| x.parse::<usize>().ok())
                            .ok_or_else(|| format!("bad generator power in `{s}`"))?
                    };
                    (c, Some(pow))
                }
            };
            let coeff: i64 = if coeff_str.is_empty() {
                1
            } else {
                coeff_str
                    .parse()
                    .map_err(|_| format!("bad coefficient in `{s}`"))?
            };
            let mut elem = self.elem_from_int(if neg { -coeff } else { coeff });
            if let Some(pow) = pow {
                if self.k == 1 {
                    return Err("generator `g` is not defined over the prime field".to_string());
                }
                let g = self.generator();
                elem = self.mul(&elem, &self.pow(&g, pow as u64));
            }
            acc = self.add(&acc, &elem);
        }
        Ok(acc)
    }

    fn roots(&self, coeffs: &[FqElem]) -> Vec<(FqElem, usize)> {
        assert!(
            coeffs.iter().any(|c| !self.is_zero(c)),
            "roots of the zero polynomial"
        );
        let q = self.cardinality().unwrap();
        let mut out = Vec::new();
        for i in 0..q {
            let x = self.element(i);
            let mut acc = self.zero();
            for c in coeffs.iter().rev() {
                acc = self.add(&self.mul(&acc, &x), c);
            }
            if self.is_zero(&acc) {
                let m = multiplicity_of(self, coeffs, &x);
                out.push((x, m));
            }
        }
        out
    }
}

fn is_small_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Reduce `poly` modulo the monic `modulus` in place (coefficients mod p).
fn poly_reduce(poly: &mut Vec<u64>, modulus: &[u64], p: u64) {
    let k = modulus.len() - 1;
    while poly.len() > k {
        let top = poly.len() - 1;
        let c = poly[top];
        poly.pop();
        if c != 0 {
            for (i, &m) in modulus[..k].iter().enumerate() {
                let idx = top - k + i;
                poly[idx] = (poly[idx] + (p - m % p) % p * c) % p;
            }
        }
    }
    while poly.last() == Some(&0) {
        poly.pop();
    }
}

fn poly_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_mul_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of a by b over F_p, b nonzero.
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    poly_trim(&mut r);
    let mut bb = b.to_vec();
    poly_trim(&mut bb);
    let db = bb.len() - 1;
    let lead_inv = mod_inv(bb[db], p);
    while r.len() > db {
        let dr = r.len() - 1;
        let c = (r[dr] * lead_inv) % p;
        if c != 0 {
            for (i, &m) in bb.iter().enumerate() {
                let idx = dr - db + i;
                r[idx] = (r[idx] + (p - (m * c) % p)) % p;
            }
        }
        r.pop();
        poly_trim(&mut r);
    }
    r
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// Inverse of a modulo m over F_p via extended Euclid; None when gcd != 1.
fn poly_ext_gcd_inverse(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
    let mut r0: Vec<u64> = m.to_vec();
    let mut r1: Vec<u64> = a.to_vec();
    poly_trim(&mut r0);
    poly_trim(&mut r1);
    let mut s0: Vec<u64> = Vec::new();
    let mut s1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        // Divide r0 by r1.
        let d1 = r1.len() - 1;
        let lead_inv = mod_inv(r1[d1], p);
        let mut q = vec![0u64; r0.len().saturating_sub(r1.len()) + 1];
        let mut rem = r0.clone();
        while rem.len() > d1 {
            let dr = rem.len() - 1;
            let c = (rem[dr] * lead_inv) % p;
            q[dr - d1] = c;
            for (i, &m1) in r1.iter().enumerate() {
                let idx = dr - d1 + i;
                rem[idx] = (rem[idx] + (p - (m1 * c) % p)) % p;
            }
            rem.pop();
            poly_trim(&mut rem);
        }
        let qs1 = poly_mul_mod_p(&q, &s1, p);
        let mut s2 = s0.clone();
        s2.resize(s2.len().max(qs1.len()), 0);
        for (i, &c) in qs1.iter().enumerate() {
            s2[i] = (s2[i] + p - c) % p;
        }
        poly_trim(&mut s2);
        s0 = s1;
        s1 = s2;
        r0 = r1;
        r1 = rem;
    }
    // r0 is the gcd; it must be a nonzero constant.
    if r0.len() != 1 {
        return None;
    }
    let scale = mod_inv(r0[0], p);
    let mut out: Vec<u64> = s0.iter().map(|&c| (c * scale) % p).collect();
    poly_trim(&mut out);
    Some(out)
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a nonzero mod p.
    mod_pow(a % p, p - 2, p)
}

fn mod_pow(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// First irreducible monic polynomial of degree k over F_p in coefficient
/// enumeration order.
fn find_irreducible(p: u64, k: usize) -> Vec<u64> {
    let total = (p as u128).pow(k as u32);
    for idx in 0..total {
        let mut coeffs = vec![0u64; k + 1];
        coeffs[k] = 1;
        let mut rest = idx;
        for slot in (0..k).rev() {
            coeffs[slot] = (rest % p as u128) as u64;
            rest /= p as u128;
        }
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

/// Rabin's test: x^(p^k) == x mod f, and gcd(x^(p^(k/q)) - x, f) = 1 for
/// every prime q dividing k.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let k = f.len() - 1;
    if f[0] == 0 {
        // Divisible by x.
        return k == 1;
    }
    let frob = |poly: &[u64]| -> Vec<u64> {
        // poly^p mod f
        let mut acc = vec![1u64];
        let mut base = poly.to_vec();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mul_mod_p(&acc, &base, p);
                acc = poly_rem(&acc, f, p);
            }
            base = poly_mul_mod_p(&base, &base, p);
            base = poly_rem(&base, f, p);
            e >>= 1;
        }
        acc
    };
    let x = vec![0u64, 1];
    // Track x^(p^j) mod f for j = 1..k.
    let mut fr = x.clone();
    let mut powers = Vec::with_capacity(k);
    for _ in 0..k {
        fr = frob(&fr);
        powers.push(fr.clone());
    }
    // x^(p^k) must equal x.
    let mut diff_k = powers[k - 1].clone();
    sub_x(&mut diff_k, p);
    if !diff_k.is_empty() {
        return false;
    }
    for q in prime_divisors(k) {
        let j = k / q;
        let mut diff = powers[j - 1].clone();
        sub_x(&mut diff, p);
        if diff.is_empty() {
            return false;
        }
        let g = poly_gcd(f, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn sub_x(poly: &mut Vec<u64>, p: u64) {
    if poly.len() < 2 {
        poly.resize(2, 0);
    }
    poly[1] = (poly[1] + p - 1) % p;
    poly_trim(poly);
}

fn prime_divisors(k: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = k;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
