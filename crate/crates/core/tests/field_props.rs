//! Field-level properties: text round-trips, root finding against evaluated
//! products of linear factors, and exhaustive axiom checks for the small
//! finite fields.

use fiberlift_core::field::{CoeffField, FiniteField, RationalField};
use proptest::prelude::*;

fn all_elements<F: CoeffField>(field: &F) -> Vec<F::Elem> {
    let q = field.cardinality().expect("finite field");
    (0..q).map(|i| field.nth_element(i)).collect()
}

proptest! {
    #[test]
    fn rational_render_parse_round_trip(num in -10_000i64..10_000, den in 1i64..10_000) {
        let field = RationalField;
        let a = field.mul(&field.elem_from_int(num), &field.inv(&field.elem_from_int(den)).unwrap());
        let back = field.parse_elem(&field.render(&a)).unwrap();
        prop_assert_eq!(a, back);
    }

    #[test]
    fn rational_roots_recover_linear_factors(mut rs in proptest::collection::vec(-6i64..6, 1..5)) {
        let field = RationalField;
        // expand prod (x - r) by repeated deflation in reverse
        let mut coeffs = vec![field.one()];
        for r in &rs {
            let r = field.elem_from_int(*r);
            let mut next = vec![field.zero(); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] = field.add(&next[i + 1], c);
                next[i] = field.sub(&next[i], &field.mul(c, &r));
            }
            coeffs = next;
        }
        let mut found: Vec<(i64, usize)> = field
            .roots(&coeffs)
            .into_iter()
            .map(|(r, m)| {
                let s = field.render(&r);
                (s.parse::<i64>().unwrap(), m)
            })
            .collect();
        found.sort();
        rs.sort();
        let mut want: Vec<(i64, usize)> = Vec::new();
        for r in rs {
            match want.last_mut() {
                Some((prev, m)) if *prev == r => *m += 1,
                _ => want.push((r, 1)),
            }
        }
        prop_assert_eq!(found, want);
    }

    #[test]
    fn finite_roots_match_brute_force(p in prop_oneof![Just(2u64), Just(3), Just(5)],
                                      k in 1usize..=2,
                                      raw in proptest::collection::vec(0u128..25, 2..5)) {
        let field = FiniteField::new(p, k).unwrap();
        let coeffs: Vec<_> = raw.iter().map(|i| field.nth_element(*i)).collect();
        prop_assume!(!field.is_zero(coeffs.last().unwrap()));
        let found = field.roots(&coeffs);
        // every reported root evaluates to zero with the right multiplicity
        for (r, m) in &found {
            prop_assert!(*m >= 1);
            let mut val = field.zero();
            for c in coeffs.iter().rev() {
                val = field.add(&field.mul(&val, r), c);
            }
            prop_assert!(field.is_zero(&val));
        }
        // and no field element outside the list evaluates to zero
        for a in all_elements(&field) {
            let mut val = field.zero();
            for c in coeffs.iter().rev() {
                val = field.add(&field.mul(&val, &a), c);
            }
            let listed = found.iter().any(|(r, _)| *r == a);
            prop_assert_eq!(field.is_zero(&val), listed);
        }
        let total: usize = found.iter().map(|(_, m)| m).sum();
        prop_assert!(total < coeffs.len());
    }
}

fn exhaustive_axioms(field: &FiniteField) {
    let elems = all_elements(field);
    let p = field.characteristic();
    for a in &elems {
        assert_eq!(field.add(a, &field.neg(a)), field.zero());
        assert_eq!(field.mul(a, &field.one()), a.clone());
        match field.inv(a) {
            Some(ai) => assert!(field.is_one(&field.mul(a, &ai))),
            None => assert!(field.is_zero(a)),
        }
        assert_eq!(field.pow(a, p), {
            let mut acc = field.one();
            for _ in 0..p {
                acc = field.mul(&acc, a);
            }
            acc
        });
        for b in &elems {
            assert_eq!(field.add(a, b), field.add(b, a));
            assert_eq!(field.mul(a, b), field.mul(b, a));
            // Frobenius is additive in characteristic p
            assert_eq!(
                field.pow(&field.add(a, b), p),
                field.add(&field.pow(a, p), &field.pow(b, p))
            );
            for c in &elems {
                assert_eq!(
                    field.mul(a, &field.add(b, c)),
                    field.add(&field.mul(a, b), &field.mul(a, c))
                );
                assert_eq!(
                    field.add(&field.add(a, b), c),
                    field.add(a, &field.add(b, c))
                );
                assert_eq!(
                    field.mul(&field.mul(a, b), c),
                    field.mul(a, &field.mul(b, c))
                );
            }
        }
    }
}

#[test]
fn finite_field_axioms_exhaustive_small() {
    for (p, k) in [(2u64, 1usize), (3, 1), (5, 1), (7, 1), (2, 2), (3, 2), (2, 3)] {
        exhaustive_axioms(&FiniteField::new(p, k).unwrap());
    }
}

#[test]
fn finite_render_parse_exhaustive() {
    for (p, k) in [(2u64, 3usize), (3, 2), (7, 1)] {
        let field = FiniteField::new(p, k).unwrap();
        for a in all_elements(&field) {
            let s = field.render(&a);
            assert_eq!(field.parse_elem(&s).unwrap(), a, "round trip of {s}");
        }
    }
}

#[test]
fn nth_element_is_injective_up_to_cardinality() {
    for (p, k) in [(2u64, 2usize), (3, 2), (5, 1)] {
        let field = FiniteField::new(p, k).unwrap();
        let elems = all_elements(&field);
        for i in 0..elems.len() {
            for j in (i + 1)..elems.len() {
                assert_ne!(elems[i], elems[j], "distinct indices give distinct elements");
            }
        }
    }
    let field = RationalField;
    let mut seen = Vec::new();
    for i in 0..40u128 {
        let e = field.nth_element(i);
        assert!(!seen.contains(&e));
        seen.push(e);
    }
}
