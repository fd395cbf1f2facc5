//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use homkk_core::ext::{ExtElement, ExtSpace, HomSpace, Space};
use homkk_core::gen::{random_cyclic_sum, random_element};
use homkk_core::group::{AbGroup, GradedGroup, Parity};
use homkk_core::laurent::{gamma_apply, LaurentExt2, LaurentModule, ZObject};
use homkk_core::map::{ab_cokernel, preimage_lattice, GradedMap};
use homkk_core::matrix::Matrix;
use homkk_core::nt::{
    canonical_path, nt_validate, projective_module, slot_resolution, tau, tau_apply, tau_compose, Gen, Interval,
    NTModule, NTResolution, Step,
};
use homkk_core::poset::{
    canonical_diagram_resolution, ext2_map_apply, verify_t_condition, Diagram, DiagramExt2Part, UniquePathSpace,
    XObject,
};
use homkk_core::uct::{uct_compose, uct_invert, UctClass};
use homkk_core::{Int, IntMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn int(x: i64) -> Int {
    Int::from(x)
}

// ---------------------------------------------------------------- matrices

/// Fraction-free Gaussian elimination.
pub fn bareiss_det(m: &IntMatrix) -> Int {
    let n = m.rows();
    assert_eq!(n, m.cols());
    if n == 0 {
        return Int::one();
    }
    let mut a: Vec<Vec<Int>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return Int::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn is_unimodular(m: &IntMatrix) -> bool {
    m.rows() == m.cols() && bareiss_det(m).abs().is_one()
}

/// `D` diagonal, non-negative, `d₁ | d₂ | …` with zeros last.
pub fn is_smith_form(d: &IntMatrix) -> bool {
    for i in 0..d.rows() {
        for j in 0..d.cols() {
            if i != j && !d[(i, j)].is_zero() {
                return false;
            }
        }
    }
    let diag: Vec<Int> = (0..d.rows().min(d.cols())).map(|i| d[(i, i)].clone()).collect();
    if diag.iter().any(|x| x.is_negative()) {
        return false;
    }
    diag.windows(2).all(|w| {
        if w[0].is_zero() {
            w[1].is_zero()
        } else {
            w[1].is_multiple_of(&w[0])
        }
    })
}

/// gcd of all `k × k` minors, by brute force over row and column subsets.
pub fn determinantal_divisor(m: &IntMatrix, k: usize) -> Int {
    let rows: Vec<usize> = (0..m.rows()).collect();
    let cols: Vec<usize> = (0..m.cols()).collect();
    let mut g = Int::zero();
    for rs in subsets(&rows, k) {
        for cs in subsets(&cols, k) {
            let sub = m.select_rows(&rs).select_columns(&cs);
            g = g.gcd(&bareiss_det(&sub));
        }
    }
    g
}

fn subsets(xs: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if xs.len() < k {
        return vec![];
    }
    let mut out = subsets(&xs[1..], k - 1);
    for s in &mut out {
        s.insert(0, xs[0]);
    }
    out.extend(subsets(&xs[1..], k));
    out
}

// ------------------------------------------------------------ cyclic groups

/// Free rank and sorted prime-power orders of a direct sum of cyclic groups
/// (`0` stands for `Z`, `1` for the trivial group).
pub fn elementary_divisors(orders: &[u64]) -> (usize, Vec<u64>) {
    let mut free = 0;
    let mut pp = Vec::new();
    for &o in orders {
        if o == 0 {
            free += 1;
            continue;
        }
        let mut x = o;
        let mut p = 2;
        while x > 1 {
            if x % p == 0 {
                let mut q = 1;
                while x % p == 0 {
                    x /= p;
                    q *= p;
                }
                pp.push(q);
            }
            p += 1;
        }
    }
    pp.sort_unstable();
    (free, pp)
}

pub fn to_u64(xs: &[Int]) -> Vec<u64> {
    xs.iter().map(|x| x.to_u64().expect("small order")).collect()
}

/// `Hom(Z/m, Z/n)` as a list of cyclic orders.
pub fn hom_cyclic(m: u64, n: u64) -> Vec<u64> {
    match (m, n) {
        (0, n) => vec![n],
        (_, 0) => vec![],
        (m, n) => vec![m.gcd(&n)],
    }
}

/// `Ext(Z/m, Z/n)`.
pub fn ext_cyclic(m: u64, n: u64) -> Vec<u64> {
    match (m, n) {
        (0, _) => vec![],
        (m, 0) => vec![m],
        (m, n) => vec![m.gcd(&n)],
    }
}

/// Degree-`d` part of the graded Hom or Ext between sums of cyclics given
/// by their even and odd orders.
pub fn graded_oracle(g: &[Vec<u64>; 2], h: &[Vec<u64>; 2], degree: usize, f: fn(u64, u64) -> Vec<u64>) -> Vec<u64> {
    let mut out = Vec::new();
    for p in 0..2 {
        for &a in &g[p] {
            for &b in &h[(p + degree) % 2] {
                out.extend(f(a, b));
            }
        }
    }
    out
}

pub fn orders_of(g: &AbGroup) -> Vec<u64> {
    to_u64(&g.invariant_factors())
}

pub fn random_orders<R: Rng>(rng: &mut R, max_summands: usize, max_order: u64, free_prob: f64) -> Vec<u64> {
    let k = rng.gen_range(0..=max_summands);
    (0..k)
        .map(|_| {
            if rng.gen_bool(free_prob) {
                0
            } else {
                rng.gen_range(2..=max_order)
            }
        })
        .collect()
}

pub fn cyclic_sum(orders: &[u64]) -> AbGroup {
    let f: Vec<Int> = orders.iter().map(|&o| Int::from(o)).collect();
    AbGroup::from_factors(&f)
}

// ---------------------------------------------------------------- splitting

/// Elements of `⊕ Z/orders[i]` (all orders positive) spanned by `gens`.
pub fn span_in(orders: &[u64], gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let reduce = |v: &[i64]| -> Vec<i64> { v.iter().zip(orders).map(|(&x, &o)| x.rem_euclid(o as i64)).collect() };
    let zero = vec![0i64; orders.len()];
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::from([zero.clone()]);
    let mut frontier = vec![zero];
    while let Some(v) = frontier.pop() {
        for g in gens {
            let w = reduce(&v.iter().zip(g).map(|(a, b)| a + b).collect::<Vec<_>>());
            if seen.insert(w.clone()) {
                frontier.push(w);
            }
        }
    }
    seen.into_iter().collect()
}

/// Whether `K ↣ B ↠ B/K` splits, `B = ⊕ Z/orders[i]` and `K = span(k_gens)`:
/// searches all `s(e_i) = e_i + k_i`, `k_i ∈ K`, respecting the relations of `B/K`.
pub fn splits_by_search(orders: &[u64], k_gens: &[Vec<i64>]) -> bool {
    let m = orders.len();
    let k = span_in(orders, k_gens);
    let zero_in_b = |v: &[i64]| v.iter().zip(orders).all(|(&x, &o)| x.rem_euclid(o as i64) == 0);
    // s(n_i e_i) = n_i k_i must vanish
    let choices: Vec<Vec<&Vec<i64>>> = (0..m)
        .map(|i| {
            k.iter()
                .filter(|x| zero_in_b(&x.iter().map(|&c| c * orders[i] as i64).collect::<Vec<_>>()))
                .collect()
        })
        .collect();
    let mut pick = vec![0usize; m];
    if choices.iter().any(|c| c.is_empty()) {
        return false;
    }
    loop {
        // s(g) = g + Σ g_i k_i must vanish for every generator g of K
        let ok = k_gens.iter().all(|g| {
            let mut v = g.clone();
            for i in 0..m {
                for (t, x) in v.iter_mut().zip(choices[i][pick[i]]) {
                    *t += g[i] * x;
                }
            }
            zero_in_b(&v)
        });
        if ok {
            return true;
        }
        let mut i = 0;
        loop {
            if i == m {
                return false;
            }
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// `K ↣ B ↠ B/K` for `B = ⊕ Z/orders[i]` and `K` generated by `k_gens`,
/// all concentrated in even degree.
pub fn subgroup_ses(orders: &[u64], k_gens: &[Vec<i64>]) -> (GradedMap, GradedMap) {
    let b = cyclic_sum(orders);
    assert_eq!(b.gens(), orders.len());
    let cols: Vec<Vec<Int>> = k_gens.iter().map(|g| g.iter().map(|&x| int(x)).collect()).collect();
    let f = Matrix::from_columns(orders.len(), &cols);
    let k = AbGroup::new(k_gens.len(), preimage_lattice(&f, &b));
    let (c, proj) = ab_cokernel(&f, &b);
    let ev = GradedGroup::even_only;
    let z = IntMatrix::zeros(0, 0);
    let iota = GradedMap::new(ev(k), ev(b.clone()), 0, f, z.clone()).unwrap();
    let pi = GradedMap::new(ev(b), ev(c), 0, proj, z).unwrap();
    (iota, pi)
}

/// Finite orders and one or two random generators of a subgroup.
pub fn random_subgroup<R: Rng>(rng: &mut R, max_summands: usize, max_order: u64) -> (Vec<u64>, Vec<Vec<i64>>) {
    loop {
        let orders = random_orders(rng, max_summands, max_order, 0.0);
        if orders.is_empty() || orders.iter().product::<u64>() > 64 {
            continue;
        }
        let k = rng.gen_range(1..=2);
        let gens = (0..k)
            .map(|_| orders.iter().map(|&o| rng.gen_range(0..o as i64)).collect())
            .collect();
        return (orders, gens);
    }
}

// ------------------------------------------------------- unique path spaces

/// Number of directed paths `x ⇝ z` (the trivial path counts), capped at 3.
pub fn path_counts(n: usize, edges: &[(usize, usize)]) -> Option<Vec<Vec<u32>>> {
    let mut out = vec![vec![0u32; n]; n];
    for (x, row) in out.iter_mut().enumerate() {
        let mut stack = vec![(x, 0usize)];
        while let Some((v, depth)) = stack.pop() {
            if depth > n {
                return None;
            }
            row[v] = (row[v] + 1).min(3);
            for &(a, b) in edges {
                if a == v {
                    stack.push((b, depth + 1));
                }
            }
        }
    }
    Some(out)
}

/// Random unique path space on `1..=max_vertices` vertices, built by
/// inserting random edges that keep at most one path between any two vertices.
pub fn random_ups<R: Rng>(rng: &mut R, max_vertices: usize) -> Arc<UniquePathSpace> {
    let n = rng.gen_range(1..=max_vertices);
    let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for _ in 0..rng.gen_range(0..=2 * n) {
        let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if x == y || edges.contains(&(x, y)) {
            continue;
        }
        let mut trial = edges.clone();
        trial.push((x, y));
        if let Some(c) = path_counts(n, &trial) {
            if c.iter().flatten().all(|&k| k <= 1) {
                edges = trial;
            }
        }
    }
    let named = edges
        .iter()
        .map(|&(x, y)| (labels[x].clone(), labels[y].clone()))
        .collect();
    Arc::new(UniquePathSpace::new(labels, named).expect("oracle-checked unique path space"))
}

pub fn random_graded<R: Rng>(rng: &mut R, max_summands: usize, max_order: i64, free_prob: f64) -> GradedGroup {
    GradedGroup::new(
        random_cyclic_sum(rng, max_summands, max_order, free_prob),
        random_cyclic_sum(rng, max_summands, max_order, free_prob),
    )
}

pub fn random_diagram<R: Rng>(
    rng: &mut R,
    sp: &Arc<UniquePathSpace>,
    max_summands: usize,
    max_order: i64,
    free_prob: f64,
) -> Diagram {
    let groups: Vec<GradedGroup> = (0..sp.len())
        .map(|_| random_graded(rng, max_summands, max_order, free_prob))
        .collect();
    let maps = sp
        .edges()
        .iter()
        .map(|&(x, y)| random_element(rng, &HomSpace::new(&groups[x], &groups[y], 0)))
        .collect();
    Diagram::new(sp.clone(), groups, maps).expect("random diagram is well formed")
}

pub fn random_x_object<R: Rng>(rng: &mut R, d: Diagram) -> XObject {
    let odd = d
        .space
        .edges()
        .iter()
        .map(|&(x, y)| random_element(rng, &ExtSpace::new(&d.groups[x], &d.groups[y], 1)))
        .collect();
    XObject::new(d, odd).expect("random object is well formed")
}

/// A random automorphism, or the identity if none is found quickly.
pub fn random_automorphism<R: Rng>(rng: &mut R, g: &GradedGroup) -> GradedMap {
    let hom = HomSpace::new(g, g, 0);
    for _ in 0..40 {
        let f = random_element(rng, &hom);
        if f.is_iso() {
            return f;
        }
    }
    GradedMap::identity(g)
}

pub fn random_invertible_class<R: Rng>(rng: &mut R, g: &GradedGroup) -> UctClass {
    let t = UctClass::new(
        random_automorphism(rng, g),
        random_element(rng, &ExtSpace::new(g, g, 1)),
    )
    .unwrap();
    assert!(uct_invert(&t).is_some());
    t
}

/// Checks the canonical resolution of `d` against path counts: summand
/// sets, `q∘ψ = 0`, the exactness certificate and, for finite groups,
/// `|F0_z| = |F1_z|·|G_z|`.
pub fn check_diagram_resolution(d: &Diagram) -> Result<(), String> {
    let sp = &d.space;
    let counts = path_counts(sp.len(), sp.edges()).ok_or("space has a cycle")?;
    let res = canonical_diagram_resolution(d).map_err(|e| e.to_string())?;
    for (z, (psi, q)) in res.psi.iter().zip(&res.q).enumerate() {
        let f0: Vec<usize> = (0..sp.len()).filter(|&x| counts[x][z] == 1).collect();
        let f1: Vec<usize> = sp
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| counts[e.1][z] == 1)
            .map(|(i, _)| i)
            .collect();
        if res.f0_summands[z] != f0 || res.f1_summands[z] != f1 {
            return Err(format!("summands at {}", sp.label(z)));
        }
        if !q.compose(psi).map_err(|e| e.to_string())?.is_zero() {
            return Err(format!("q∘ψ ≠ 0 at {}", sp.label(z)));
        }
        if !psi.is_injective() || !q.is_surjective() {
            return Err(format!("ψ not injective or q not surjective at {}", sp.label(z)));
        }
        if let (Some(a), Some(b), Some(c)) = (psi.source().order(), psi.target().order(), q.target().order()) {
            if b != a * c {
                return Err(format!("orders at {}", sp.label(z)));
            }
        }
    }
    if !res.is_exact() {
        return Err("certificate reports homology".into());
    }
    Ok(())
}

/// Enumerates the image of `(t_x) ↦ (η∘t_x − t_y∘γ)` and checks that an edge
/// family has zero class exactly when it is hit. `None` if the domain or
/// codomain exceeds `limit` elements.
pub fn ext2_brute_force(g: &Diagram, h: &Diagram, part: &DiagramExt2Part, limit: u64) -> Option<Result<(), String>> {
    let domain = part.domain().elements(limit)?;
    let codomain = part.codomain().elements(limit)?;
    let cod = part.codomain();
    let mut image = BTreeSet::new();
    for t in &domain {
        let fam = ext2_map_apply(g, h, &part.decode_vertices(t)).unwrap();
        image.insert(cod.normal_coordinates(&part.encode_family(&fam).unwrap()));
    }
    let order = part.group().order().and_then(|o| o.to_u64());
    if order != Some(codomain.len() as u64 / image.len() as u64) {
        return Some(Err(format!(
            "|Ext²| = {order:?}, brute force {}/{}",
            codomain.len(),
            image.len()
        )));
    }
    for c in &codomain {
        let hit = image.contains(&cod.normal_coordinates(c));
        if part.family_is_zero(&part.decode_edges(c)).unwrap() != hit {
            return Some(Err(format!("class of {c:?} disagrees with enumeration")));
        }
    }
    Some(Ok(()))
}

/// Whether some family `t¹` makes `(t⁰_x, t¹_x)` compatible on every edge,
/// by trying all of them; `None` if there are more than `limit`.
pub fn lifts_by_search(a: &XObject, b: &XObject, t0: &[GradedMap], limit: u64) -> Option<bool> {
    let spaces: Vec<ExtSpace> = (0..t0.len())
        .map(|x| ExtSpace::new(&a.diagram.groups[x], &b.diagram.groups[x], 1))
        .collect();
    let domain = AbGroup::direct_sum(&spaces.iter().map(|s| s.group()).collect::<Vec<_>>());
    for c in domain.elements(limit)? {
        let mut off = 0;
        let t: Vec<UctClass> = spaces
            .iter()
            .zip(t0)
            .map(|(s, m)| {
                let k = s.group().gens();
                let e = s.decode(&c[off..off + k]);
                off += k;
                UctClass::new(m.clone(), e).unwrap()
            })
            .collect();
        if verify_t_condition(a, b, &t).unwrap() {
            return Some(true);
        }
    }
    Some(false)
}

// ---------------------------------------------------------------- Z-actions

pub fn random_z_object<R: Rng>(rng: &mut R, max_summands: usize, max_order: i64) -> ZObject {
    let g = random_graded(rng, max_summands, max_order, 0.0);
    let module = LaurentModule::new(g.clone(), random_automorphism(rng, &g), None).unwrap();
    let odd = random_element(rng, &ExtSpace::new(&g, &g, 1));
    ZObject::new(module, odd).unwrap()
}

/// Enumerates the image of `t ↦ t∘α⁰ − β⁰∘t` in each parity and checks the
/// cokernel order and which classes vanish. `None` if a space is too large.
pub fn laurent_ext2_brute_force(
    ext2: &LaurentExt2,
    a: &LaurentModule,
    b: &LaurentModule,
    limit: u64,
) -> Option<Result<(), String>> {
    for p in Parity::BOTH {
        let space = &ext2.gamma.spaces[p.index()];
        let all = space.elements(limit)?;
        let g = space.group();
        let key = |e: &ExtElement| g.normal_coordinates(&space.encode(e).unwrap());
        let image: BTreeSet<Vec<Int>> = all
            .iter()
            .map(|t| key(&gamma_apply(t, &a.action, &b.action).unwrap()))
            .collect();
        let order = ext2.group().part(p).order().and_then(|o| o.to_u64());
        if order != Some(all.len() as u64 / image.len() as u64) {
            return Some(Err(format!(
                "{} part: order {order:?}, brute force {}/{}",
                p.name(),
                all.len(),
                image.len()
            )));
        }
        for e in &all {
            if ext2.class_is_zero(e).unwrap() != image.contains(&key(e)) {
                return Some(Err(format!(
                    "{} part: class of {:?} disagrees",
                    p.name(),
                    space.encode(e).unwrap()
                )));
            }
        }
    }
    Some(Ok(()))
}

/// Whether some invertible `(t⁰, t¹)` satisfies `t∘[α] = [β]∘t`, trying
/// every degree-0 map and every `t¹`. `None` if a space is too large.
pub fn z_equivalent_by_search(a: &ZObject, b: &ZObject, limit: u64) -> Option<bool> {
    let hom = HomSpace::new(a.group(), b.group(), 0);
    let ext = ExtSpace::new(a.group(), b.group(), 1);
    let odd = ext.elements(limit)?;
    for c in hom.group().elements(limit)? {
        let t0 = hom.decode(&c);
        if !t0.is_iso() {
            continue;
        }
        for t1 in &odd {
            let t = UctClass::new(t0.clone(), t1.clone()).unwrap();
            let l = uct_compose(&t, &a.class()).unwrap();
            let r = uct_compose(&b.class(), &t).unwrap();
            if l.equals(&r) {
                return Some(true);
            }
        }
    }
    Some(false)
}

// -------------------------------------------------------- filtrated modules

/// Checks every slot complex `⊕Q₁ → ⊕Q₀ → M[z]` of a finite module: `d₀`
/// onto, `d₀d₁ = 0`, and `coker d₁` with the invariant factors of `M[z]`.
pub fn check_slot_complexes(m: &NTModule, res: &NTResolution) -> Result<(), String> {
    for z in Interval::all(m.n()) {
        let r = slot_resolution(m, res, z).map_err(|e| e.to_string())?;
        for p in Parity::BOTH {
            let g = m.slot(z).part(p);
            let (d0, d1) = (&r.d0[p.index()], &r.d1[p.index()]);
            if !g.with_relations(d0).is_trivial() {
                return Err(format!("{z} {}: d0 not onto", p.name()));
            }
            if !g.columns_vanish(&d0.mul(d1)) {
                return Err(format!("{z} {}: d0 d1 ≠ 0", p.name()));
            }
            let coker = AbGroup::new(d1.rows(), d1.clone());
            if coker.invariant_factors() != g.invariant_factors() {
                return Err(format!("{z} {}: coker d1 = {coker}, M = {g}", p.name()));
            }
            if d1.cols() > 0 && (d1.cols() > d1.rows() || determinantal_divisor(d1, d1.cols()).is_zero()) {
                return Err(format!("{z} {}: d1 not injective", p.name()));
            }
        }
    }
    Ok(())
}

// ------------------------------------------------------------- NT tables

fn is_generator(g: &AbGroup, v: &[Int]) -> bool {
    g.invariant_factors() == vec![Int::zero()] && g.normal_coordinates(v)[0].abs().is_one()
}

/// The path module from each source has `τ` of the right parity in every
/// slot, generated by the canonical path, and nothing with two boundaries.
pub fn check_tau_table(n: usize) -> Result<(), String> {
    for src in Interval::all(n) {
        let pm = PathModule::new(n, src, 3);
        for dst in Interval::all(n) {
            if !pm.groups[&(dst, 2)].is_trivial() {
                return Err(format!("n={n} {src}->{dst}: two boundaries survive"));
            }
            let t = tau(n, src, dst).map_err(|e| e.to_string())?;
            for k in 0..2 {
                let g = &pm.groups[&(dst, k)];
                if g.is_trivial() == (t.parity().map(|p| p.index()) == Some(k)) {
                    return Err(format!("n={n} {src}->{dst} level {k}: {g}"));
                }
            }
            if let Some(p) = t.parity() {
                let path = canonical_path(n, src, dst).map_err(|e| e.to_string())?;
                let (node, v) = pm.transport((src, 0), &pm.unit(), &path);
                if node != (dst, p.index()) || !is_generator(&pm.groups[&node], &v) {
                    return Err(format!("n={n} {src}->{dst}: canonical path is not a generator"));
                }
            }
        }
    }
    Ok(())
}

/// Compares the composition rule with the path module on all triples with
/// nonzero factors; returns the triples whose composite vanishes although
/// the direct transformation is nonzero.
pub fn check_composition_table(n: usize) -> Result<Vec<(Interval, Interval, Interval)>, String> {
    let mut vanishing = Vec::new();
    for src in Interval::all(n) {
        let pm = PathModule::new(n, src, 3);
        let unit = pm.unit();
        for mid in Interval::all(n) {
            for dst in Interval::all(n) {
                let (t1, t2) = (tau(n, src, mid).unwrap(), tau(n, mid, dst).unwrap());
                if t1.is_zero() || t2.is_zero() {
                    continue;
                }
                let path = [
                    canonical_path(n, src, mid).unwrap(),
                    canonical_path(n, mid, dst).unwrap(),
                ]
                .concat();
                let (node, v) = pm.transport((src, 0), &unit, &path);
                let composes = tau_compose(n, src, mid, dst).map_err(|e| e.to_string())?;
                let at = format!("n={n} {src}->{mid}->{dst}");
                if pm.is_zero(node, &v) {
                    if composes {
                        return Err(format!("{at} vanishes"));
                    }
                    if !tau(n, src, dst).unwrap().is_zero() {
                        vanishing.push((src, mid, dst));
                    }
                    continue;
                }
                if !composes {
                    return Err(format!("{at} is nonzero"));
                }
                let (node2, w) = pm.transport((src, 0), &unit, &canonical_path(n, src, dst).unwrap());
                if node != node2 || !pm.groups[&node].elems_equal(&v, &w) {
                    return Err(format!("{at} differs from the direct map"));
                }
            }
        }
    }
    Ok(vanishing)
}

/// `[1,1] → [1,2] → [2,3]` for `n = 3`: the composite vanishes while the
/// direct transformation is nonzero, because nothing maps `[1,1]` to `[1,2]`.
pub fn check_listed_triple() -> Result<(), String> {
    let iv = |a, b| Interval { a, b };
    let (a, b, c) = (iv(1, 1), iv(1, 2), iv(2, 3));
    let ok = tau(3, a, b).unwrap().is_zero() && !tau(3, a, c).unwrap().is_zero() && !tau_compose(3, a, b, c).unwrap();
    if !ok {
        return Err("table entries for [1,1] -> [1,2] -> [2,3]".into());
    }
    let pm = PathModule::new(3, a, 3);
    if (0..3).any(|k| !pm.groups[&(b, k)].is_trivial()) || pm.groups[&(c, 1)].is_trivial() {
        return Err("path module from [1,1]".into());
    }
    Ok(())
}

/// In the projective module on one even generator, `τ_src^dst` is defined
/// and nonzero exactly when the table says so.
pub fn check_projective_faithful(n: usize) -> Result<(), String> {
    for src in Interval::all(n) {
        let q = Interval::all(n)
            .into_iter()
            .map(|s| {
                (
                    s,
                    if s == src {
                        GradedGroup::even_only(AbGroup::free(1))
                    } else {
                        GradedGroup::zero()
                    },
                )
            })
            .collect();
        let p = projective_module(n, &q).map_err(|e| e.to_string())?;
        nt_validate(&p).map_err(|v| v.to_string())?;
        for dst in Interval::all(n) {
            let nonzero = tau_apply(&p, src, dst).is_ok_and(|f| !f.is_zero());
            if nonzero == tau(n, src, dst).unwrap().is_zero() {
                return Err(format!("n={n} {src}->{dst}"));
            }
        }
    }
    Ok(())
}

// ------------------------------------------------------------- path module

/// The free NT-module on one even generator at `src`, built from the quiver
/// of `i`, `r`, `δ` and the listed relations alone. Nodes are `(slot, k)`
/// with `k` the number of `δ` arrows used; each node is the cokernel of the
/// relations ending there inside the sum of the images of its incoming arrows.
pub struct PathModule {
    pub n: usize,
    pub src: Interval,
    pub levels: usize,
    pub groups: BTreeMap<(Interval, usize), AbGroup>,
    /// Arrow matrices keyed by generator, source slot and source level.
    pub arrows: BTreeMap<(Gen, Interval, usize), IntMatrix>,
}

fn iv(a: usize, b: usize) -> Interval {
    Interval { a, b }
}

impl PathModule {
    pub fn new(n: usize, src: Interval, levels: usize) -> Self {
        let mut slots = Interval::all(n);
        slots.sort_by_key(|s| std::cmp::Reverse(s.a + s.b));
        let mut pm = PathModule {
            n,
            src,
            levels,
            groups: BTreeMap::new(),
            arrows: BTreeMap::new(),
        };
        for k in 0..levels {
            for &z in &slots {
                pm.build(z, k);
            }
        }
        pm
    }

    /// Incoming arrows `(kind, source slot, source level)`.
    fn incoming(&self, z: Interval, k: usize) -> Vec<(Gen, Interval, usize)> {
        let n = self.n;
        let mut v = Vec::new();
        if z.a < z.b {
            v.push((Gen::I, iv(z.a + 1, z.b), k));
        }
        if z.b < n {
            v.push((Gen::R, iv(z.a, z.b + 1), k));
        }
        if z.b == n && z.a >= 2 && k >= 1 {
            v.push((Gen::Delta, iv(1, z.a - 1), k - 1));
        }
        v
    }

    /// Relations `Σ ± β∘α` ending at `(z, k)`: the source node and the two
    /// (arrow α, arrow β) terms with signs; absent terms are dropped.
    #[allow(clippy::type_complexity)]
    fn relations(
        &self,
        z: Interval,
        k: usize,
    ) -> Vec<(
        (Interval, usize),
        Vec<(i64, (Gen, Interval, usize), (Gen, Interval, usize))>,
    )> {
        let n = self.n;
        let mut out = Vec::new();
        // r∘i = i∘r out of the corner [a+1, b+1]
        if z.b < n {
            let corner = iv(z.a + 1, z.b + 1);
            let mut terms = vec![(1, (Gen::I, corner, k), (Gen::R, iv(z.a, z.b + 1), k))];
            if z.a < z.b {
                terms.push((-1, (Gen::R, corner, k), (Gen::I, iv(z.a + 1, z.b), k)));
            }
            out.push(((corner, k), terms));
        }
        // i∘δ = δ∘r out of [1, b'] with z = [b', n]
        if z.b == n && k >= 1 {
            let b = z.a;
            let source = iv(1, b);
            let mut terms = Vec::new();
            if b < n {
                terms.push((1, (Gen::Delta, source, k - 1), (Gen::I, iv(b + 1, n), k)));
            }
            if b > 1 {
                terms.push((-1, (Gen::R, source, k - 1), (Gen::Delta, iv(1, b - 1), k - 1)));
            }
            out.push(((source, k - 1), terms));
        }
        out
    }

    fn build(&mut self, z: Interval, k: usize) {
        let blocks = self.incoming(z, k);
        let unit = z == self.src && k == 0;
        let mut parts: Vec<AbGroup> = Vec::new();
        if unit {
            parts.push(AbGroup::free(1));
        }
        for &(_, w, l) in &blocks {
            parts.push(self.groups[&(w, l)].clone());
        }
        let sum = AbGroup::direct_sum(&parts.iter().collect::<Vec<_>>());
        let mut offsets = BTreeMap::new();
        let mut off = usize::from(unit);
        for (b, p) in blocks.iter().zip(parts.iter().skip(usize::from(unit))) {
            offsets.insert(*b, (off, p.gens()));
            off += p.gens();
        }
        let mut rel_cols: Vec<Vec<Int>> = Vec::new();
        for (source, terms) in self.relations(z, k) {
            let g = self.groups[&source].gens();
            for j in 0..g {
                let mut col = vec![Int::zero(); sum.gens()];
                let mut x = vec![Int::zero(); g];
                x[j] = Int::one();
                for (sign, alpha, beta) in &terms {
                    let mid = self.arrows[alpha].mul_vec(&x);
                    let (o, len) = offsets[&(beta.0, beta.1, beta.2)];
                    assert_eq!(len, mid.len());
                    for (t, v) in mid.into_iter().enumerate() {
                        col[o + t] += Int::from(*sign) * v;
                    }
                }
                rel_cols.push(col);
            }
        }
        let rel = Matrix::from_columns(sum.gens(), &rel_cols);
        let (group, proj) = ab_cokernel(&rel, &sum);
        for (b, (o, len)) in offsets {
            self.arrows
                .insert(b, proj.select_columns(&(o..o + len).collect::<Vec<_>>()));
        }
        if unit {
            self.arrows
                .insert((Gen::I, iv(0, 0), usize::MAX), proj.select_columns(&[0]));
        }
        self.groups.insert((z, k), group);
    }

    /// The class of the identity path at `(src, 0)`.
    pub fn unit(&self) -> Vec<Int> {
        self.arrows[&(Gen::I, iv(0, 0), usize::MAX)].column(0)
    }

    /// Transports `v ∈ P(start, k)` along the steps; returns the end node and value.
    pub fn transport(&self, start: (Interval, usize), v: &[Int], path: &[Step]) -> ((Interval, usize), Vec<Int>) {
        let (mut at, mut k) = start;
        let mut v = v.to_vec();
        for s in path {
            assert_eq!(s.src, at);
            if s.kind == Gen::Delta && k + 1 >= self.levels {
                let t = s.kind.target(self.n, at).unwrap();
                return ((t, k + 1), vec![]);
            }
            v = self.arrows[&(s.kind, at, k)].mul_vec(&v);
            at = s.kind.target(self.n, at).unwrap();
            k += usize::from(s.kind == Gen::Delta);
        }
        ((at, k), v)
    }

    pub fn is_zero(&self, node: (Interval, usize), v: &[Int]) -> bool {
        v.is_empty() || self.groups[&node].is_zero_elem(v)
    }
}

pub fn parity_of(k: usize) -> Parity {
    Parity::from_degree((k % 2) as u8)
}
