//! Randomized properties checked against independent oracles: field axioms,
//! path-count recurrences, max-flow versus exhaustive packing, span solving
//! versus enumeration, and the path-rewiring contracts.

mod common;

use std::collections::BTreeSet;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sumnet_core::field::{in_span, rank, solve_combination, CodingVector, FieldSpec};
use sumnet_core::flow::max_flow_unit;
use sumnet_core::graph::EdgeId;
use sumnet_core::rewire::{rewire_shared_prefix, rewire_shared_suffix};

use common::{all_paths, brute_force_max_disjoint, random_dag, span_by_enumeration};

fn elt(field: FieldSpec, bits: u32) -> sumnet_core::field::FieldElement {
    field.element(bits % field.order()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_addition_is_xor_and_self_inverse(m in 1u32..=8, a in any::<u32>(), b in any::<u32>()) {
        let f = FieldSpec::with_default_modulus(m).unwrap();
        let (a, b) = (elt(f, a), elt(f, b));
        prop_assert_eq!((a + b).bits(), a.bits() ^ b.bits());
        prop_assert_eq!(a + b, b + a);
        prop_assert!((a + a).is_zero());
        prop_assert_eq!(a + f.zero(), a);
    }

    #[test]
    fn field_multiplication_satisfies_the_ring_axioms(
        m in 1u32..=8,
        a in any::<u32>(),
        b in any::<u32>(),
        c in any::<u32>(),
    ) {
        let f = FieldSpec::with_default_modulus(m).unwrap();
        let (a, b, c) = (elt(f, a), elt(f, b), elt(f, c));
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!((a * b) * c, a * (b * c));
        prop_assert_eq!((a + b) * c, a * c + b * c);
        prop_assert_eq!(a * f.one(), a);
        prop_assert_eq!((a + b) + c, a + (b + c));
    }

    #[test]
    fn every_nonzero_element_has_a_working_inverse(m in 1u32..=8, a in any::<u32>()) {
        let f = FieldSpec::with_default_modulus(m).unwrap();
        let a = elt(f, a);
        if a.is_zero() {
            prop_assert!(a.inverse().is_err());
        } else {
            prop_assert_eq!(a * a.inverse().unwrap(), f.one());
        }
    }

    #[test]
    fn path_counts_satisfy_the_first_edge_recurrence(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, _, _) = random_dag(&mut rng, 5, 14);
        let nodes: Vec<_> = g.node_ids().collect();
        for &u in &nodes {
            for &v in &nodes {
                if u == v {
                    prop_assert_eq!(g.count_paths(u, u), BigUint::from(1u32));
                    continue;
                }
                let total: BigUint = g
                    .out_edges(u)
                    .iter()
                    .map(|&e| g.count_paths(g.edge(e).head, v))
                    .sum();
                prop_assert_eq!(g.count_paths(u, v), total);
            }
        }
    }

    #[test]
    fn path_counts_agree_with_explicit_enumeration(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, s, t) = random_dag(&mut rng, 4, 12);
        let listed = all_paths(&g, s, t).len();
        prop_assert_eq!(g.count_paths(s, t), BigUint::from(listed));
    }

    #[test]
    fn max_flow_matches_exhaustive_path_packing(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, s, t) = random_dag(&mut rng, 4, 12);
        prop_assert_eq!(max_flow_unit(&g, s, t), brute_force_max_disjoint(&g, s, t));
    }

    #[test]
    fn span_solving_agrees_with_enumeration(
        m in 1u32..=2,
        dim in 1usize..=3,
        n_basis in 0usize..=3,
        seed in any::<u64>(),
    ) {
        let f = FieldSpec::with_default_modulus(m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vec = |rng: &mut ChaCha8Rng| {
            CodingVector::new((0..dim).map(|_| f.random(rng)).collect()).unwrap()
        };
        let basis: Vec<CodingVector> = (0..n_basis).map(|_| vec(&mut rng)).collect();
        let target = vec(&mut rng);

        let expected = span_by_enumeration(f, &basis, &target);
        prop_assert_eq!(in_span(f, &basis, &target).unwrap(), expected);

        match solve_combination(f, &basis, &target).unwrap() {
            Some(coeffs) => {
                prop_assert!(expected);
                prop_assert_eq!(coeffs.len(), basis.len());
                let mut acc = CodingVector::zero(f, dim);
                for (c, b) in coeffs.iter().zip(&basis) {
                    acc = acc.checked_add(&b.scale(*c).unwrap()).unwrap();
                }
                prop_assert_eq!(acc, target);
            }
            None => prop_assert!(!expected),
        }

        let r = rank(f, &basis).unwrap();
        prop_assert!(r <= basis.len() && r <= dim);
    }

    #[test]
    fn suffix_rewiring_keeps_its_contract(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, s, t) = random_dag(&mut rng, 5, 14);
        let paths = all_paths(&g, s, t);
        if paths.len() < 2 {
            return Ok(());
        }
        let p1 = &paths[rng.gen_range(0..paths.len())];
        let p2 = &paths[rng.gen_range(0..paths.len())];

        let (q1, q2, meet) = rewire_shared_suffix(&g, p1, p2).unwrap();
        prop_assert_eq!(&q1, p1);
        prop_assert_eq!(q2.start(), p2.start());
        prop_assert_eq!(q2.end(&g), p1.end(&g));
        q2.validate(&g).unwrap();

        // The meet is the first node of p1 lying on p2.
        prop_assert!(p2.contains_node(&g, meet));
        let on_p2: BTreeSet<_> = p2.nodes(&g).into_iter().collect();
        let first = p1.nodes(&g).into_iter().find(|v| on_p2.contains(v)).unwrap();
        prop_assert_eq!(meet, first);

        // Identical suffix from the meet, edge-disjoint prefixes before it.
        prop_assert_eq!(q2.suffix_from(&g, meet).unwrap(), p1.suffix_from(&g, meet).unwrap());
        let pre1: BTreeSet<EdgeId> = q1.prefix_to(&g, meet).unwrap().edges().iter().copied().collect();
        let pre2: BTreeSet<EdgeId> = q2.prefix_to(&g, meet).unwrap().edges().iter().copied().collect();
        prop_assert!(pre1.is_disjoint(&pre2));

        // No edges invented out of thin air.
        let allowed: BTreeSet<EdgeId> = p1.edges().iter().chain(p2.edges()).copied().collect();
        prop_assert!(q2.edges().iter().all(|e| allowed.contains(e)));
    }

    #[test]
    fn prefix_rewiring_keeps_its_contract(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, s, t) = random_dag(&mut rng, 5, 14);
        let paths = all_paths(&g, s, t);
        if paths.len() < 2 {
            return Ok(());
        }
        let p1 = &paths[rng.gen_range(0..paths.len())];
        let p2 = &paths[rng.gen_range(0..paths.len())];

        let (q1, q2, meet) = rewire_shared_prefix(&g, p1, p2, None).unwrap();
        prop_assert_eq!(&q1, p1);
        prop_assert_eq!(q2.start(), p1.start());
        prop_assert_eq!(q2.end(&g), p2.end(&g));
        q2.validate(&g).unwrap();

        // The meet is the last node of p1 lying on p2.
        let on_p2: BTreeSet<_> = p2.nodes(&g).into_iter().collect();
        let last = p1.nodes(&g).into_iter().rev().find(|v| on_p2.contains(v)).unwrap();
        prop_assert_eq!(meet, last);

        // Identical prefix to the meet, edge-disjoint suffixes after it.
        prop_assert_eq!(q2.prefix_to(&g, meet).unwrap(), p1.prefix_to(&g, meet).unwrap());
        let suf1: BTreeSet<EdgeId> = q1.suffix_from(&g, meet).unwrap().edges().iter().copied().collect();
        let suf2: BTreeSet<EdgeId> = q2.suffix_from(&g, meet).unwrap().edges().iter().copied().collect();
        prop_assert!(suf1.is_disjoint(&suf2));
    }

    #[test]
    fn restricted_prefix_rewiring_respects_the_allowed_set(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, s, t) = random_dag(&mut rng, 5, 14);
        let paths = all_paths(&g, s, t);
        if paths.len() < 2 {
            return Ok(());
        }
        let p1 = &paths[rng.gen_range(0..paths.len())];
        let p2 = &paths[rng.gen_range(0..paths.len())];

        // A random node subset that always contains the common start, so a
        // meet is guaranteed to exist.
        let mut allowed: BTreeSet<_> = g.node_ids().filter(|_| rng.gen_bool(0.5)).collect();
        allowed.insert(s);

        let (_, q2, meet) = rewire_shared_prefix(&g, p1, p2, Some(&allowed)).unwrap();
        prop_assert!(allowed.contains(&meet));
        prop_assert!(p1.contains_node(&g, meet) && p2.contains_node(&g, meet));
        q2.validate(&g).unwrap();
        prop_assert_eq!(q2.prefix_to(&g, meet).unwrap(), p1.prefix_to(&g, meet).unwrap());
        prop_assert_eq!(q2.suffix_from(&g, meet).unwrap(), p2.suffix_from(&g, meet).unwrap());

        // No later node of p1 on p2 is allowed — the meet really is last.
        let on_p2: BTreeSet<_> = p2.nodes(&g).into_iter().collect();
        let mut later = p1.nodes(&g);
        let pos = later.iter().position(|&v| v == meet).unwrap();
        prop_assert!(later
            .split_off(pos + 1)
            .iter()
            .all(|v| !(on_p2.contains(v) && allowed.contains(v))));
    }
}
