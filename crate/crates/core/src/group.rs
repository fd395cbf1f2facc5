//! Finitely presented abelian groups and their Z/2-graded pairs.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::hermite::column_hnf;
use crate::matrix::Matrix;
use crate::scalar::Int;
use crate::solve::{unimodular_inverse, SmithSolver};
use crate::IntMatrix;

/// `Z^gens / colspan(rels)`.
#[derive(Clone)]
pub struct AbGroup {
    inner: Arc<Inner>,
}

struct Inner {
    gens: usize,
    rels: IntMatrix,
    solver: OnceLock<SmithSolver<Int>>,
    basis: OnceLock<IntMatrix>,
    normal: OnceLock<NormalForm>,
}

/// An isomorphism of a group with `⊕ Z/dᵢ ⊕ Z^f` in Smith form.
#[derive(Clone, Debug)]
pub struct NormalForm {
    /// Invariant factors; torsion first (each > 1), then one 0 per free summand.
    pub factors: Vec<Int>,
    /// Maps generator coordinates to normal coordinates (`factors.len() × gens`).
    pub to_normal: IntMatrix,
    /// Maps normal coordinates back to generators (`gens × factors.len()`).
    pub from_normal: IntMatrix,
}

impl AbGroup {
    /// Panics if `rels` does not have `gens` rows.
    pub fn new(gens: usize, rels: IntMatrix) -> Self {
        assert_eq!(rels.rows(), gens, "relator matrix must have one row per generator");
        AbGroup {
            inner: Arc::new(Inner {
                gens,
                rels,
                solver: OnceLock::new(),
                basis: OnceLock::new(),
                normal: OnceLock::new(),
            }),
        }
    }

    pub fn trivial() -> Self {
        Self::new(0, Matrix::zeros(0, 0))
    }

    pub fn free(rank: usize) -> Self {
        Self::new(rank, Matrix::zeros(rank, 0))
    }

    /// `⊕ Z/dᵢ`, with `dᵢ = 0` giving a copy of `Z`.
    pub fn from_factors(factors: &[Int]) -> Self {
        let n = factors.len();
        let cols: Vec<Vec<Int>> = factors
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero())
            .map(|(i, d)| {
                let mut c = vec![Int::zero(); n];
                c[i] = d.abs();
                c
            })
            .collect();
        Self::new(n, Matrix::from_columns(n, &cols))
    }

    pub fn cyclic(order: i64) -> Self {
        Self::from_factors(&[Int::from(order)])
    }

    pub fn gens(&self) -> usize {
        self.inner.gens
    }

    pub fn rels(&self) -> &IntMatrix {
        &self.inner.rels
    }

    fn solver(&self) -> &SmithSolver<Int> {
        self.inner.solver.get_or_init(|| SmithSolver::new(&self.inner.rels))
    }

    /// Basis of the relator lattice in column Hermite normal form.
    pub fn relation_basis(&self) -> &IntMatrix {
        self.inner.basis.get_or_init(|| column_hnf(&self.inner.rels))
    }

    pub fn normal_form(&self) -> &NormalForm {
        self.inner.normal.get_or_init(|| {
            let snf = self.solver().decomposition();
            let g = self.gens();
            let mut keep = Vec::new();
            let mut factors = Vec::new();
            for i in 0..g {
                if i < snf.rank {
                    let d = &snf.d[(i, i)];
                    if !d.is_one() {
                        keep.push(i);
                        factors.push(d.clone());
                    }
                } else {
                    keep.push(i);
                    factors.push(Int::zero());
                }
            }
            let uinv = unimodular_inverse(&snf.u).expect("Smith transform is unimodular");
            NormalForm {
                factors,
                to_normal: snf.u.select_rows(&keep),
                from_normal: uinv.select_columns(&keep),
            }
        })
    }

    /// Invariant factors `d₁ | d₂ | …` (each > 1), followed by a 0 per free summand.
    pub fn invariant_factors(&self) -> Vec<Int> {
        self.normal_form().factors.clone()
    }

    pub fn is_trivial(&self) -> bool {
        self.normal_form().factors.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.normal_form().factors.iter().all(Zero::is_zero)
    }

    pub fn free_rank(&self) -> usize {
        self.normal_form().factors.iter().filter(|d| d.is_zero()).count()
    }

    /// Group order, or `None` if the group is infinite.
    pub fn order(&self) -> Option<Int> {
        let f = &self.normal_form().factors;
        if f.iter().any(Zero::is_zero) {
            None
        } else {
            Some(f.iter().fold(Int::one(), |a, d| a * d))
        }
    }

    /// Whether `v` (generator coordinates) represents the zero element.
    pub fn is_zero_elem(&self, v: &[Int]) -> bool {
        assert_eq!(v.len(), self.gens());
        self.solver().contains(v)
    }

    pub fn elems_equal(&self, a: &[Int], b: &[Int]) -> bool {
        let d: Vec<Int> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.is_zero_elem(&d)
    }

    /// Writes `v` as a combination of relators, if it is one.
    pub fn relation_coefficients(&self, v: &[Int]) -> Option<Vec<Int>> {
        self.solver().solve(v).ok().flatten()
    }

    /// Every column of `m` represents zero.
    pub fn columns_vanish(&self, m: &IntMatrix) -> bool {
        m.rows() == self.gens() && m.columns().iter().all(|c| self.is_zero_elem(c))
    }

    /// Normal coordinates with torsion entries reduced into `[0, d)`.
    pub fn normal_coordinates(&self, v: &[Int]) -> Vec<Int> {
        let nf = self.normal_form();
        let mut c = nf.to_normal.mul_vec(v);
        for (x, d) in c.iter_mut().zip(&nf.factors) {
            if !d.is_zero() {
                *x = num_integer::Integer::mod_floor(x, d);
            }
        }
        c
    }

    /// A canonical representative of the class of `v`.
    pub fn reduce(&self, v: &[Int]) -> Vec<Int> {
        self.normal_form().from_normal.mul_vec(&self.normal_coordinates(v))
    }

    /// Lists all elements of a finite group of order at most `limit`, as
    /// generator-coordinate vectors; `None` if infinite or too large.
    pub fn elements(&self, limit: u64) -> Option<Vec<Vec<Int>>> {
        let order = self.order()?.to_u64()?;
        if order > limit {
            return None;
        }
        let nf = self.normal_form();
        let mut out = Vec::with_capacity(order as usize);
        let mut digits = vec![Int::zero(); nf.factors.len()];
        loop {
            out.push(nf.from_normal.mul_vec(&digits));
            let mut i = 0;
            loop {
                if i == digits.len() {
                    return Some(out);
                }
                digits[i] += 1;
                if digits[i] == nf.factors[i] {
                    digits[i] = Int::zero();
                    i += 1;
                } else {
                    break;
                }
            }
        }
    }

    /// External direct sum with generators concatenated in order.
    pub fn direct_sum(parts: &[&AbGroup]) -> AbGroup {
        let gens = parts.iter().map(|g| g.gens()).sum();
        let blocks: Vec<&IntMatrix> = parts.iter().map(|g| g.rels()).collect();
        AbGroup::new(gens, Matrix::block_diag(&blocks))
    }

    /// Same group presented with additional relators appended.
    pub fn with_relations(&self, extra: &IntMatrix) -> AbGroup {
        AbGroup::new(self.gens(), self.rels().hstack(extra))
    }

    /// The group in Smith form `⊕ Z/dᵢ ⊕ Z^f` (one generator per factor).
    pub fn normalized(&self) -> AbGroup {
        AbGroup::from_factors(&self.normal_form().factors)
    }
}

impl fmt::Debug for AbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AbGroup({} gens, rels {:?})", self.gens(), self.rels())
    }
}

impl fmt::Display for AbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", describe_factors(&self.invariant_factors()))
    }
}

/// Human-readable `Z/2 ⊕ Z` style description.
pub fn describe_factors(factors: &[Int]) -> String {
    if factors.is_empty() {
        return "0".to_string();
    }
    factors
        .iter()
        .map(|d| if d.is_zero() { "Z".to_string() } else { format!("Z/{d}") })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Z/2 degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub const BOTH: [Parity; 2] = [Parity::Even, Parity::Odd];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_degree(d: u8) -> Parity {
        if d.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Parity {
        self.shift(1)
    }

    pub fn shift(self, degree: u8) -> Parity {
        Parity::from_degree(self as u8 + degree)
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// A Z/2-graded abelian group.
#[derive(Clone, Debug)]
pub struct GradedGroup {
    parts: [AbGroup; 2],
}

impl GradedGroup {
    pub fn new(even: AbGroup, odd: AbGroup) -> Self {
        GradedGroup { parts: [even, odd] }
    }

    pub fn zero() -> Self {
        Self::new(AbGroup::trivial(), AbGroup::trivial())
    }

    pub fn even_only(g: AbGroup) -> Self {
        Self::new(g, AbGroup::trivial())
    }

    pub fn odd_only(g: AbGroup) -> Self {
        Self::new(AbGroup::trivial(), g)
    }

    pub fn part(&self, p: Parity) -> &AbGroup {
        &self.parts[p.index()]
    }

    pub fn even(&self) -> &AbGroup {
        &self.parts[0]
    }

    pub fn odd(&self) -> &AbGroup {
        &self.parts[1]
    }

    /// The suspension: parities swapped.
    pub fn suspend(&self) -> Self {
        Self::new(self.parts[1].clone(), self.parts[0].clone())
    }

    /// Shifts by `degree`: the identity for even degree, the suspension for odd.
    pub fn shift(&self, degree: u8) -> Self {
        if degree.is_multiple_of(2) {
            self.clone()
        } else {
            self.suspend()
        }
    }

    pub fn invariant_factors(&self) -> [Vec<Int>; 2] {
        [self.parts[0].invariant_factors(), self.parts[1].invariant_factors()]
    }

    pub fn is_trivial(&self) -> bool {
        self.parts.iter().all(AbGroup::is_trivial)
    }

    pub fn is_free(&self) -> bool {
        self.parts.iter().all(AbGroup::is_free)
    }

    pub fn order(&self) -> Option<Int> {
        Some(self.parts[0].order()? * self.parts[1].order()?)
    }

    pub fn direct_sum(parts: &[&GradedGroup]) -> GradedGroup {
        let even: Vec<&AbGroup> = parts.iter().map(|g| g.even()).collect();
        let odd: Vec<&AbGroup> = parts.iter().map(|g| g.odd()).collect();
        GradedGroup::new(AbGroup::direct_sum(&even), AbGroup::direct_sum(&odd))
    }

    pub fn normalized(&self) -> Self {
        Self::new(self.parts[0].normalized(), self.parts[1].normalized())
    }

    pub fn gens(&self) -> [usize; 2] {
        [self.parts[0].gens(), self.parts[1].gens()]
    }
}

impl fmt::Display for GradedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} | {})", self.parts[0], self.parts[1])
    }
}

/// Integers from small values.
pub fn ints(xs: &[i64]) -> Vec<Int> {
    xs.iter().map(|&x| Int::from(x)).collect()
}
