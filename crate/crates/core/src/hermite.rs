//! Column Hermite normal form: a canonical basis of a column lattice.
//!
//! For a matrix `A` with column lattice `L`, [`column_hnf`] returns the
//! unique matrix `H` whose columns form a basis of `L` and which is in column
//! echelon form: column `j` has its first nonzero entry (the pivot) in row
//! `p_j` with `p_0 < p_1 < …`, pivots are positive, and every entry to the left
//! of a pivot satisfies `0 ≤ h < pivot`.

use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub fn column_hnf<T: Scalar>(a: &Matrix<T>) -> Matrix<T> {
    let (rows, cols) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut k = 0;
    for i in 0..rows {
        if k == cols {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for c in k..cols {
                if !w[(i, c)].is_zero() && best.is_none_or(|b| w[(i, c)].abs() < w[(i, b)].abs()) {
                    best = Some(c);
                }
            }
            let Some(b) = best else { break };
            w.swap_cols(k, b);
            let mut done = true;
            for c in k + 1..cols {
                if !w[(i, c)].is_zero() {
                    let q = w[(i, c)].clone() / w[(i, k)].clone();
                    w.add_col_multiple(c, k, &-q);
                    if !w[(i, c)].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if w[(i, k)].is_zero() {
            continue;
        }
        if w[(i, k)].is_negative() {
            w.negate_col(k);
        }
        let p = w[(i, k)].clone();
        for l in 0..k {
            let q = w[(i, l)].div_floor(&p);
            w.add_col_multiple(l, k, &-q);
        }
        k += 1;
    }
    w.block(0, rows, 0, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smith::smith_normal_form;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    #[test]
    fn redundant_relators() {
        let a = Matrix::<BigInt>::from_i64_rows(&[&[2, 4], &[0, 0]], 2);
        let h = column_hnf(&a);
        assert_eq!(h, Matrix::from_i64_rows(&[&[2], &[0]], 1));
    }

    #[test]
    fn single_and_empty() {
        let a = Matrix::<i64>::from_i64_rows(&[&[4]], 1);
        assert_eq!(column_hnf(&a), a);
        let z = Matrix::<i64>::zeros(1, 0);
        assert_eq!(column_hnf(&z).cols(), 0);
        let z = Matrix::<i64>::zeros(2, 3);
        assert_eq!(column_hnf(&z).cols(), 0);
    }

    #[test]
    fn reduces_left_of_pivot() {
        let a = Matrix::<i64>::from_i64_rows(&[&[1, 0], &[7, 3]], 2);
        let h = column_hnf(&a);
        assert_eq!(h, Matrix::from_i64_rows(&[&[1, 0], &[1, 3]], 2));
    }

    proptest! {
        // Same lattice: each side's columns solve into the other's, and the
        // rank matches the Smith rank.
        #[test]
        fn spans_same_lattice(rows in 1usize..5, cols in 0usize..6, seed in proptest::collection::vec(-6i64..=6, 30)) {
            let a = Matrix::<BigInt>::from_vec(rows, cols, seed.iter().take(rows*cols).map(|&x| BigInt::from(x)).collect());
            let h = column_hnf(&a);
            prop_assert_eq!(h.cols(), smith_normal_form(&a).rank);
            for c in a.columns() {
                prop_assert!(crate::solve::solve_linear(&h, &c).unwrap().is_some());
            }
            for c in h.columns() {
                prop_assert!(crate::solve::solve_linear(&a, &c).unwrap().is_some());
            }
            prop_assert_eq!(column_hnf(&h), h.clone());
        }
    }
}
