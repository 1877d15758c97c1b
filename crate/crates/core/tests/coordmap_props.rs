mod common;

use common::*;
use mapmerge::coordmap::{compose, merge_grids, transform, GridMap, Offset};
use mapmerge::ModelError;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn offsets_form_a_group(a in offset(), b in offset(), c in offset()) {
        prop_assert_eq!(compose(compose(a, b), c), compose(a, compose(b, c)));
        prop_assert_eq!(compose(a, Offset::IDENTITY), a);
        prop_assert_eq!(compose(Offset::IDENTITY, a), a);
        prop_assert_eq!(compose(a, a.invert()), Offset::IDENTITY);
        prop_assert_eq!(compose(a, b), compose(b, a));
        prop_assert_eq!(a + b, compose(a, b));
        prop_assert_eq!(-a, a.invert());
    }

    #[test]
    fn transform_round_trips(p in point(), o in offset()) {
        prop_assert_eq!(transform(transform(p, o), o.invert()), p);
        prop_assert_eq!(transform(p, Offset::IDENTITY), p);
    }

    #[test]
    fn transform_respects_composition(p in point(), a in offset(), b in offset()) {
        prop_assert_eq!(transform(transform(p, a), b), transform(p, compose(a, b)));
    }

    #[test]
    fn merging_views_of_one_world_is_consistent((maps, origins) in shared_world()) {
        let [m1, m2, _] = &maps;
        let o = between(&origins, 1, 0);
        let merged = merge_ok(m1, m2, o);
        prop_assert_eq!(merged.owner_frame, m1.owner_frame);
        for (p, v) in &m1.cells {
            prop_assert_eq!(merged.get(*p), Some(*v));
        }
        for (p, v) in &m2.cells {
            prop_assert_eq!(merged.get(transform(*p, o)), Some(*v));
        }
        let moved: std::collections::BTreeSet<_> = m2.cells.keys().map(|p| transform(*p, o)).collect();
        let expected_len = m1.cells.keys().chain(moved.iter()).collect::<std::collections::BTreeSet<_>>().len();
        prop_assert_eq!(merged.len(), expected_len);
    }

    #[test]
    fn merge_commutes_up_to_frame((maps, origins) in shared_world()) {
        let [m1, m2, _] = &maps;
        let o = between(&origins, 1, 0);
        let here = merge_ok(m1, m2, o);
        let there = merge_ok(m2, m1, o.invert());
        prop_assert_eq!(there.reframe(o, m1.owner_frame), here);
    }

    #[test]
    fn merge_associates_up_to_frame((maps, origins) in shared_world()) {
        let [m1, m2, m3] = &maps;
        let left = merge_ok(&merge_ok(m1, m2, between(&origins, 1, 0)), m3, between(&origins, 2, 0));
        let right = merge_ok(m1, &merge_ok(m2, m3, between(&origins, 2, 1)), between(&origins, 1, 0));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn merging_is_idempotent((maps, _) in shared_world()) {
        let m = &maps[0];
        prop_assert_eq!(&merge_ok(m, m, Offset::IDENTITY), m);
    }

    #[test]
    fn conflicts_are_exact_and_symmetric(a in arbitrary_map(1), b in arbitrary_map(2), o in offset()) {
        let o = Offset::new(o.dx % 5, o.dy % 5);
        let expected = expected_conflicts(&a, &b, o);
        match merge_grids(&a, &b, o) {
            Ok(m) => {
                prop_assert!(expected.is_empty());
                prop_assert!(merge_grids(&b, &a, o.invert()).is_ok());
                prop_assert!(m.len() <= a.len() + b.len());
            }
            Err(ModelError::MergeConflict { coords }) => {
                prop_assert_eq!(&coords, &expected);
                match merge_grids(&b, &a, o.invert()) {
                    Err(ModelError::MergeConflict { coords: back }) => prop_assert_eq!(back.len(), coords.len()),
                    other => prop_assert!(false, "asymmetric conflict: {:?}", other),
                }
            }
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }

    #[test]
    fn json_round_trips(m in arbitrary_map(4)) {
        let json = m.to_json();
        prop_assert_eq!(GridMap::from_json(&json).unwrap(), m.clone());
        prop_assert_eq!(GridMap::from_json(&json).unwrap().to_json(), json);
    }
}
