//! Random test data: matrices, groups and exact filtrated modules.

use std::collections::BTreeMap;

use rand::Rng;

use num_traits::{ToPrimitive, Zero};

use crate::ext::{extension_from_class, ExtElement, ExtSpace, HomSpace, Space};
use crate::group::{AbGroup, GradedGroup, Parity};
use crate::map::{cokernel_of, kernel_of, GradedMap};
use crate::matrix::Matrix;
use crate::nt::{pattern_map, projective_module, quotient_module, tau, Interval, NTModule};
use crate::scalar::Int;
use crate::IntMatrix;

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let data = (0..rows * cols)
        .map(|_| Int::from(rng.gen_range(-bound..=bound)))
        .collect();
    Matrix::from_vec(rows, cols, data)
}

/// A direct sum of up to `max_summands` cyclic groups of order at most
/// `max_order`, each free with probability `free_prob`.
pub fn random_cyclic_sum<R: Rng>(rng: &mut R, max_summands: usize, max_order: i64, free_prob: f64) -> AbGroup {
    let k = rng.gen_range(0..=max_summands);
    let factors: Vec<Int> = (0..k)
        .map(|_| {
            if rng.gen_bool(free_prob) {
                Int::from(0)
            } else {
                Int::from(rng.gen_range(2..=max_order))
            }
        })
        .collect();
    AbGroup::from_factors(&factors)
}

/// A random presentation of a finite group of order at most `max_order`.
pub fn random_finite_group<R: Rng>(rng: &mut R, max_gens: usize, max_order: u64) -> AbGroup {
    loop {
        let g = rng.gen_range(0..=max_gens);
        let extra = rng.gen_range(0..=2);
        let rels = random_matrix(rng, g, g + extra, 4);
        let a = AbGroup::new(g, rels);
        if let Some(o) = a.order() {
            if o <= Int::from(max_order) {
                return a;
            }
        }
    }
}

/// Parameters for [`random_exact_module`].
#[derive(Clone, Copy, Debug)]
pub struct ModuleShape {
    pub n: usize,
    /// Number of intervals carrying a generator.
    pub max_generators: usize,
    /// Upper bound on every slot order; `None` allows free slots.
    pub max_order: Option<u64>,
}

/// An exact module presented as the cokernel of a slotwise injective map
/// `FK(P₁) → FK(P₀)` between random projective patterns.
///
/// Gives up after `attempts` rejected draws.
pub fn random_exact_module<R: Rng>(rng: &mut R, shape: ModuleShape, attempts: usize) -> Option<NTModule> {
    let n = shape.n;
    let all = Interval::all(n);
    for _ in 0..attempts {
        let mut q0: BTreeMap<Interval, GradedGroup> = all.iter().map(|&s| (s, GradedGroup::zero())).collect();
        let mut q1 = q0.clone();
        let k = rng.gen_range(1..=shape.max_generators.max(1));
        for _ in 0..k {
            let s = all[rng.gen_range(0..all.len())];
            let (e, o) = if rng.gen_bool(0.5) { (1, 0) } else { (0, 1) };
            let old = q0[&s].gens();
            let g = GradedGroup::new(AbGroup::free(old[0] + e), AbGroup::free(old[1] + o));
            q0.insert(s, g.clone());
            let dropped = shape.max_order.is_none() && rng.gen_bool(0.3);
            if !dropped {
                let old1 = q1[&s].gens();
                q1.insert(
                    s,
                    GradedGroup::new(AbGroup::free(old1[0] + e), AbGroup::free(old1[1] + o)),
                );
            }
        }
        let mut phi = BTreeMap::new();
        for &y in &all {
            for &x in &all {
                if let Some(p) = tau(n, x, y).unwrap().parity() {
                    let (src, dst) = (&q1[&y], &q0[&x]);
                    let d = p.index() as u8;
                    let comps = Parity::BOTH.map(|par| {
                        let (r, c) = (dst.part(par.shift(d)).gens(), src.part(par).gens());
                        if x == y {
                            let mut m = random_matrix(rng, r, c, 1);
                            for i in 0..r.min(c) {
                                m[(i, i)] = Int::from(rng.gen_range(1..=4));
                            }
                            m
                        } else {
                            random_matrix(rng, r, c, 2)
                        }
                    });
                    phi.insert((y, x), GradedMap::from_parts(src.clone(), dst.clone(), d, comps).ok()?);
                }
            }
        }
        let p0 = projective_module(n, &q0).ok()?;
        let mut proj = BTreeMap::new();
        let mut ok = true;
        for &z in &all {
            let f = pattern_map(n, &q0, &q1, &phi, z).ok()?;
            if !f.is_injective() {
                ok = false;
                break;
            }
            let (c, p) = cokernel_of(&f);
            if let Some(bound) = shape.max_order {
                match c.order() {
                    Some(o) if o <= Int::from(bound) => {}
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            proj.insert(z, p);
        }
        if ok {
            return quotient_module(&p0, &proj).ok();
        }
    }
    None
}

/// A two-point module assembled from random `K(I)`, `K(A)`, `i_*` and a
/// random class `e ∈ Ext(ker i_*, coker i_*)` of degree 1, with `K(A/I)`
/// the extension of `e`. Returns the module and `e`.
pub fn random_extension_module<R: Rng>(rng: &mut R, max_summands: usize, max_order: i64) -> (NTModule, ExtElement) {
    let graded = |rng: &mut R| {
        GradedGroup::new(
            random_cyclic_sum(rng, max_summands, max_order, 0.15),
            random_cyclic_sum(rng, max_summands, max_order, 0.15),
        )
    };
    let (ki, ka) = (graded(rng), graded(rng));
    let i_star = random_element(rng, &HomSpace::new(&ki, &ka, 0));
    let (_, incl) = kernel_of(&i_star);
    let (_, proj) = cokernel_of(&i_star);
    let e = random_element(rng, &ExtSpace::new(incl.source(), proj.target(), 1));
    let (iota, pi) = extension_from_class(&e);
    let r = iota.compose(&proj).expect("composable");
    let delta = incl.compose(&pi).expect("composable");
    let (i2, i12, i11) = (
        Interval { a: 2, b: 2 },
        Interval { a: 1, b: 2 },
        Interval { a: 1, b: 1 },
    );
    let slots = BTreeMap::from([(i2, ki), (i12, ka), (i11, iota.target().clone())]);
    let m = NTModule::new(
        2,
        slots,
        BTreeMap::from([(i2, i_star)]),
        BTreeMap::from([(i12, r)]),
        BTreeMap::from([(i11, delta)]),
    )
    .expect("assembled module is well formed");
    (m, e)
}

/// A random element of a space: coordinates below the exponent for finite
/// groups, small integers otherwise.
pub fn random_element<R: Rng, S: Space>(rng: &mut R, space: &S) -> S::Elem {
    let g = space.group();
    let factors = g.invariant_factors();
    let range = match factors.last() {
        Some(d) if !d.is_zero() => 0..=d.to_i64().unwrap_or(i64::MAX) - 1,
        Some(_) => -3..=3,
        None => 0..=0,
    };
    let c: Vec<Int> = (0..g.gens()).map(|_| Int::from(rng.gen_range(range.clone()))).collect();
    space.decode(&c)
}
