mod common;

use num_traits::Zero;
use proptest::prelude::*;

use homkk_core::hermite::column_hnf;
use homkk_core::matrix::Matrix;
use homkk_core::smith::smith_normal_form;
use homkk_core::solve::{kernel_basis, solve_linear, unimodular_inverse};
use homkk_core::{Int, IntMatrix};

use common::{bareiss_det, determinantal_divisor, is_smith_form, is_unimodular};

fn matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (0..=max_dim, 0..=max_dim).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(-bound..=bound, r * c)
            .prop_map(move |xs| Matrix::from_vec(r, c, xs.into_iter().map(Int::from).collect()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_certificate(m in matrix(6, 9)) {
        let s = smith_normal_form(&m);
        prop_assert_eq!(s.u.mul(&m).mul(&s.v), s.d.clone());
        prop_assert!(is_unimodular(&s.u));
        prop_assert!(is_unimodular(&s.v));
        prop_assert!(is_smith_form(&s.d));
        prop_assert_eq!(s.rank, s.diagonal().iter().filter(|x| !x.is_zero()).count());
    }

    #[test]
    fn smith_diagonal_matches_determinantal_divisors(m in matrix(4, 6)) {
        let diag = smith_normal_form(&m).diagonal();
        let mut prefix = Int::from(1);
        for (k, d) in diag.iter().enumerate() {
            prefix *= d;
            prop_assert_eq!(&prefix, &determinantal_divisor(&m, k + 1));
        }
    }

    #[test]
    fn solutions_satisfy_the_system(m in matrix(5, 5), x in proptest::collection::vec(-5i64..=5, 5)) {
        let x: Vec<Int> = x[..m.cols()].iter().map(|&v| Int::from(v)).collect();
        let b = m.mul_vec(&x);
        let y = solve_linear(&m, &b).unwrap().expect("b lies in the image");
        prop_assert_eq!(m.mul_vec(&y), b);
    }

    #[test]
    fn kernel_basis_is_saturated(m in matrix(5, 4)) {
        let k = kernel_basis(&m);
        prop_assert!(m.mul(&k).is_zero());
        let rank = smith_normal_form(&m).rank;
        prop_assert_eq!(k.cols(), m.cols() - rank);
        // a saturated sublattice has trivial quotient torsion
        let dk = smith_normal_form(&k).diagonal();
        prop_assert!(dk.iter().all(|d| d == &Int::from(1)));
    }

    #[test]
    fn hermite_form_spans_the_same_lattice(m in matrix(4, 6)) {
        let h = column_hnf(&m);
        for c in h.columns() {
            prop_assert!(solve_linear(&m, &c).unwrap().is_some());
        }
        for c in m.columns() {
            prop_assert!(solve_linear(&h, &c).unwrap().is_some());
        }
    }

    #[test]
    fn unimodular_inverse_inverts(m in matrix(5, 9)) {
        let s = smith_normal_form(&m);
        let inv = unimodular_inverse(&s.u).expect("u is unimodular");
        prop_assert_eq!(s.u.mul(&inv), Matrix::identity(s.u.rows()));
    }
}

#[test]
fn determinant_agrees_with_bareiss() {
    let mut r = common::rng(3);
    for n in 0..7 {
        let m = homkk_core::gen::random_matrix(&mut r, n, n, 7);
        assert_eq!(m.determinant(), bareiss_det(&m));
    }
}

#[test]
fn empty_and_zero_shapes() {
    for (r, c) in [(0, 0), (0, 3), (3, 0), (2, 2)] {
        let m = IntMatrix::zeros(r, c);
        let s = smith_normal_form(&m);
        assert_eq!(s.rank, 0);
        assert_eq!(kernel_basis(&m).cols(), c);
    }
}
