//! Invariants checked on random inputs.

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use polarsys::cert::{verify, Certificate, SystemRecord};
use polarsys::fieldred::{build_context, ReductionContext};
use polarsys::fields::{field_of_order, Elem};
use polarsys::polar::{shared_polar, Family, PolarSpace};
use polarsys::projective::Subspace;
use polarsys::regsys::{regular_system_size, regularity_profile, subspace_counts, switch, GeneratorSet};

const ORDERS: [u64; 8] = [2, 3, 4, 5, 7, 8, 9, 16];

fn elliptic_q5_2() -> Arc<PolarSpace> {
    shared_polar(Family::QMinus, 2, 2).unwrap()
}

fn hyperbolic_q5_2() -> Arc<PolarSpace> {
    shared_polar(Family::QPlus, 3, 2).unwrap()
}

fn reduction() -> &'static ReductionContext {
    static CTX: OnceLock<ReductionContext> = OnceLock::new();
    CTX.get_or_init(|| build_context(4, 3).unwrap())
}

fn subset(p: &Arc<PolarSpace>, mask: &[bool]) -> GeneratorSet {
    let ids = (0..p.generator_count() as u32).filter(|&g| mask[g as usize]).collect();
    GeneratorSet::new(p, ids).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(qi in 0..ORDERS.len(), a in any::<u8>(), b in any::<u8>(), c in any::<u8>()) {
        let f = field_of_order(ORDERS[qi]).unwrap();
        let n = f.order();
        let (a, b, c) = ((a as usize % n) as Elem, (b as usize % n) as Elem, (c as usize % n) as Elem);
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        prop_assert_eq!(f.pow(a, n as u64), a);
    }

    #[test]
    fn grassmann_dimension_formula(
        u in prop::collection::vec(prop::collection::vec(0u8..4, 5), 1..4),
        v in prop::collection::vec(prop::collection::vec(0u8..4, 5), 1..4),
    ) {
        let f = field_of_order(4).unwrap();
        let su = Subspace::from_vectors(&f, 5, &u).unwrap();
        let sv = Subspace::from_vectors(&f, 5, &v).unwrap();
        let join = su.span(&f, &sv).unwrap();
        let meet = su.meet(&f, &sv).unwrap();
        prop_assert_eq!(su.dim() + sv.dim(), join.dim() + meet.dim());
        prop_assert!(meet.is_subspace_of(&f, &su) && meet.is_subspace_of(&f, &sv));
        prop_assert!(su.is_subspace_of(&f, &join));
    }

    #[test]
    fn certificate_profile_consistency(mask in prop::collection::vec(any::<bool>(), 45)) {
        let p = elliptic_q5_2();
        let s = subset(&p, &mask);
        let c = regularity_profile(&s, 1).unwrap();
        prop_assert_eq!(c.is_regular, c.min_count == c.max_count);
        prop_assert_eq!(c.m.is_some(), c.is_regular);
        prop_assert_eq!(c.is_hemisystem, c.is_regular && 2 * s.len() == p.generator_count());
        prop_assert_eq!(c.witness.is_some(), !c.is_regular);
        // counts of S and its complement add up to the full row
        let a = subspace_counts(&s, 1).unwrap();
        let b = subspace_counts(&s.complement(), 1).unwrap();
        let row = p.generators_through(1)[0].len() as u64;
        prop_assert!(a.iter().zip(&b).all(|(x, y)| x + y == row));
    }

    #[test]
    fn set_algebra(m1 in prop::collection::vec(any::<bool>(), 45), m2 in prop::collection::vec(any::<bool>(), 45)) {
        let p = elliptic_q5_2();
        let (a, b) = (subset(&p, &m1), subset(&p, &m2));
        let inter = a.intersection_len(&b).unwrap();
        prop_assert_eq!(a.union(&b).unwrap().len(), a.len() + b.len() - inter);
        prop_assert_eq!(a.difference(&b).unwrap().len(), a.len() - inter);
        prop_assert_eq!(a.complement().complement(), a.clone());
        prop_assert!(a.difference(&b).unwrap().is_subset(&a));
    }

    #[test]
    fn switched_classes_obey_the_size_law(sigma in 0usize..35, toggle in 0u32..30) {
        let p = hyperbolic_q5_2();
        let (latin, _) = p.latin_greek_split().unwrap();
        let point = p.level(1).spaces()[sigma].clone();
        let (set, c) = switch(&p, &latin, &point).unwrap();
        let m = c.m.unwrap();
        prop_assert_eq!(set.len() as u64, regular_system_size(&p, m, c.k).unwrap());

        let rec = SystemRecord::new("switched", &set, &c);
        let cert = Certificate::new(vec![], Some(p.descriptor()), serde_json::json!({}), vec![rec]);
        let text = cert.to_canonical_json();
        let back = Certificate::from_json(&text).unwrap();
        prop_assert_eq!(back.to_canonical_json(), text);
        prop_assert!(verify(&back).unwrap().ok());

        // toggling one generator breaks regularity and the hash
        let mut bad = back.clone();
        let ids = &mut bad.systems[0].ids;
        match ids.binary_search(&toggle) {
            Ok(i) => { ids.remove(i); }
            Err(i) => ids.insert(i, toggle),
        }
        let r = verify(&bad).unwrap();
        prop_assert!(!r.hash_ok && !r.systems[0].ok && r.systems[0].witness.is_some());
    }

    #[test]
    fn hermitian_form_is_the_quadric_after_reduction(x in prop::collection::vec(0u8..9, 4)) {
        let ctx = reduction();
        let h = ctx.hermitian.value(ctx.ext(), &x);
        prop_assert!(h < 3, "H(x, x) lies in the base field");
        prop_assert_eq!(h, ctx.quadric.value(ctx.base(), &ctx.phi(&x)));
    }
}
