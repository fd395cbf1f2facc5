mod common;

use common::{check_composition_table, check_listed_triple, check_projective_faithful, check_tau_table, PathModule};
use homkk_core::nt::*;

fn iv(a: usize, b: usize) -> Interval {
    Interval { a, b }
}

#[test]
fn path_module_matches_tau_table() {
    for n in 1..=5 {
        check_tau_table(n).unwrap();
    }
}

#[test]
fn path_module_matches_composition_table() {
    for n in 1..=4 {
        let vanishing = check_composition_table(n).unwrap();
        assert_eq!(vanishing.is_empty(), n < 3);
    }
}

#[test]
fn vanishing_composites_with_nonzero_factors() {
    let mut found = Vec::new();
    for n in 2..=4 {
        for a in Interval::all(n) {
            for b in Interval::all(n) {
                for c in Interval::all(n) {
                    let nonzero = [(a, b), (b, c), (a, c)]
                        .iter()
                        .all(|&(x, y)| !tau(n, x, y).unwrap().is_zero());
                    if nonzero && !tau_compose(n, a, b, c).unwrap() {
                        found.push((n, a, b, c));
                    }
                }
            }
        }
    }
    assert!(found.iter().all(|t| t.0 > 2));
    let small: Vec<_> = found.iter().filter(|t| t.0 == 3).copied().collect();
    assert_eq!(
        small,
        vec![(3, iv(1, 2), iv(2, 3), iv(1, 2)), (3, iv(2, 3), iv(1, 2), iv(2, 3))]
    );
    for (n, a, b, c) in found {
        let pm = PathModule::new(n, a, 3);
        let path = [canonical_path(n, a, b).unwrap(), canonical_path(n, b, c).unwrap()].concat();
        let (node, v) = pm.transport((a, 0), &pm.unit(), &path);
        assert!(pm.is_zero(node, &v));
    }
}

#[test]
fn first_factor_of_the_listed_triple_is_zero() {
    let (a, b, c) = (iv(1, 1), iv(1, 2), iv(2, 3));
    assert!(tau(3, a, b).unwrap().is_zero());
    assert_eq!(tau(3, a, c).unwrap(), Tau::Odd);
    assert!(!tau_compose(3, a, b, c).unwrap());
    check_listed_triple().unwrap();
}

#[test]
fn projective_module_is_faithful_for_tau() {
    for n in 1..=4 {
        check_projective_faithful(n).unwrap();
    }
}

/// Even: `r`-chain then `i`-chain. Odd: `i`-chain to `[1,b]`, `δ`, the
/// `i`-chain to `[c,n]`, then the `r`-chain.
fn alternative_path(n: usize, src: Interval, dst: Interval) -> Vec<Step> {
    let mut path = Vec::new();
    let mut at = src;
    let mut go = |at: &mut Interval, kind: Gen| {
        path.push(Step { kind, src: *at });
        *at = kind.target(n, *at).unwrap();
    };
    match tau(n, src, dst).unwrap() {
        Tau::Even => {
            while at.b > dst.b {
                go(&mut at, Gen::R);
            }
            while at.a > dst.a {
                go(&mut at, Gen::I);
            }
        }
        Tau::Odd => {
            while at.a > 1 {
                go(&mut at, Gen::I);
            }
            go(&mut at, Gen::Delta);
            while at.a > dst.a {
                go(&mut at, Gen::I);
            }
            while at.b > dst.b {
                go(&mut at, Gen::R);
            }
        }
        Tau::Zero => unreachable!(),
    }
    path
}

#[test]
fn evaluation_is_path_independent_on_exact_modules() {
    use homkk_core::gen::{random_exact_module, ModuleShape};
    let mut rng = common::rng(11);
    for n in 2..=4 {
        for _ in 0..15 {
            let Some(m) = random_exact_module(
                &mut rng,
                ModuleShape {
                    n,
                    max_generators: 4,
                    max_order: Some(32),
                },
                50,
            ) else {
                continue;
            };
            for src in Interval::all(n) {
                for dst in Interval::all(n) {
                    if tau(n, src, dst).unwrap().is_zero() {
                        continue;
                    }
                    let a = tau_apply(&m, src, dst).unwrap();
                    let b = evaluate_path(&m, src, &alternative_path(n, src, dst)).unwrap();
                    assert!(a.equals(&b), "{src}->{dst}");
                }
            }
        }
    }
}
