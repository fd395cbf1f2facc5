mod common;

use proptest::prelude::*;

use homkk_core::ext::ExtElement;
use homkk_core::laurent::Decision;
use homkk_core::map::GradedMap;
use homkk_core::poset::{
    classify_x, ext2_diagram, obstruction_x, relative_obstruction_x, validate_ups, verify_t_condition, UniquePathSpace,
    UpsViolation, XObject,
};
use homkk_core::uct::UctClass;

use common::*;

fn graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1usize..=6)
        .prop_flat_map(|n| (Just(n), proptest::collection::btree_set((0..n, 0..n), 0..=2 * n)))
        .prop_map(|(n, e)| (n, e.into_iter().collect()))
}

fn labelled(n: usize, edges: &[(usize, usize)]) -> (Vec<String>, Vec<(String, String)>) {
    let l: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let e = edges.iter().map(|&(x, y)| (l[x].clone(), l[y].clone())).collect();
    (l, e)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn ups_validation_matches_path_counting((n, edges) in graph()) {
        let (labels, named) = labelled(n, &edges);
        let expected = path_counts(n, &edges).is_some_and(|c| c.iter().flatten().all(|&k| k <= 1));
        prop_assert_eq!(validate_ups(&labels, &named).is_ok(), expected);
        if expected {
            let sp = UniquePathSpace::new(labels, named).unwrap();
            let counts = path_counts(n, sp.edges()).unwrap();
            for (y, row) in counts.iter().enumerate() {
                for (x, &c) in row.iter().enumerate() {
                    prop_assert_eq!(sp.leq(x, y), c == 1);
                    prop_assert_eq!(sp.path(y, x).is_some(), c == 1);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn diagram_resolutions_are_certified(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sp = random_ups(&mut r, 6);
        let d = random_diagram(&mut r, &sp, 2, 6, 0.2);
        prop_assert_eq!(check_diagram_resolution(&d), Ok(()));
    }

    #[test]
    fn ext2_matches_enumeration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sp = random_ups(&mut r, 5);
        let g = random_diagram(&mut r, &sp, 2, 4, 0.0);
        let h = random_diagram(&mut r, &sp, 2, 4, 0.0);
        let ext2 = ext2_diagram(&g, &h).unwrap();
        for part in &ext2.parts {
            if let Some(res) = ext2_brute_force(&g, &h, part, 1 << 16) {
                prop_assert_eq!(res, Ok(()));
            }
        }
    }

    #[test]
    fn conjugate_objects_are_equivalent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sp = random_ups(&mut r, 5);
        let d = random_diagram(&mut r, &sp, 2, 6, 0.0);
        let a = random_x_object(&mut r, d);
        let u: Vec<UctClass> = a.diagram.groups.iter().map(|g| random_invertible_class(&mut r, g)).collect();
        let b = a.conjugate(&u).unwrap();
        let t0: Vec<GradedMap> = u.iter().map(|c| c.even.clone()).collect();
        prop_assert!(relative_obstruction_x(&a, &b, &t0).unwrap().is_zero);
        match classify_x(&a, &b, &t0).unwrap() {
            Decision::Equivalent(w) => prop_assert!(verify_t_condition(&a, &b, &w).unwrap()),
            Decision::Obstructed(c) => prop_assert!(false, "obstructed: {:?}", c.coordinates),
        }
    }

    #[test]
    fn classification_matches_exhaustive_lifting(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sp = random_ups(&mut r, 5);
        let d = random_diagram(&mut r, &sp, 2, 4, 0.0);
        let a = random_x_object(&mut r, d.clone());
        let b = random_x_object(&mut r, d.clone());
        let t0: Vec<GradedMap> = d.groups.iter().map(GradedMap::identity).collect();
        let decision = classify_x(&a, &b, &t0).unwrap();
        prop_assert_eq!(decision.is_equivalent(), relative_obstruction_x(&a, &b, &t0).unwrap().is_zero);
        if let Some(found) = lifts_by_search(&a, &b, &t0, 1 << 16) {
            prop_assert_eq!(decision.is_equivalent(), found);
        }
    }
}

#[test]
fn zero_odd_part_has_zero_obstruction() {
    let mut r = rng(11);
    for _ in 0..20 {
        let sp = random_ups(&mut r, 5);
        let d = random_diagram(&mut r, &sp, 2, 8, 0.2);
        let odd: Vec<ExtElement> = sp
            .edges()
            .iter()
            .map(|&(x, y)| ExtElement::zero(&d.groups[x], &d.groups[y], 1))
            .collect();
        assert!(obstruction_x(&XObject::new(d, odd).unwrap()).unwrap().is_zero);
    }
}

#[test]
fn diamond_is_rejected_with_both_endpoints() {
    let (l, e) = labelled(4, &[(3, 1), (3, 2), (1, 0), (2, 0)]);
    assert_eq!(
        validate_ups(&l, &e),
        Err(UpsViolation::TwoPaths {
            from: "v3".into(),
            to: "v0".into()
        })
    );
    let (l, e) = labelled(2, &[(0, 1), (1, 0)]);
    assert!(matches!(validate_ups(&l, &e), Err(UpsViolation::Cycle(_))));
}
