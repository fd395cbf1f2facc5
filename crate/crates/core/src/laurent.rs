//! Z-actions at the level of K-theory: graded `Z[x, x⁻¹]`-modules, the
//! commutator map γ, its cokernel `Ext²` and the obstruction classes that
//! decide equivalence of two actions with isomorphic K-theory modules.
//!
//! `Ext²(K_A, K_B)` is graded so that its even part receives the degree-1
//! classes of `Ext¹(K_A, K_B)` (equivalently `Ext¹(ΣK_A, K_B)` in degree 0)
//! and its odd part the degree-0 classes.

use crate::error::{Error, Result};
use crate::ext::{pull_ext, push_ext, ExtElement, ExtSpace, HomSpace, Space};
use crate::group::{AbGroup, GradedGroup, Parity};
use crate::map::{ab_cokernel, ab_kernel, GradedMap};
use crate::scalar::Int;
use crate::solve::SmithSolver;
use crate::uct::UctClass;
use crate::IntMatrix;

/// A graded group with an automorphism `α⁰`.
#[derive(Clone, Debug)]
pub struct LaurentModule {
    pub group: GradedGroup,
    pub action: GradedMap,
    pub action_inverse: GradedMap,
}

impl LaurentModule {
    /// Validates the action; the inverse is computed when not supplied.
    pub fn new(group: GradedGroup, action: GradedMap, action_inverse: Option<GradedMap>) -> Result<Self> {
        if action.degree() != 0 {
            return Err(Error::invalid("action", "must have degree 0"));
        }
        if action.source().gens() != group.gens() || action.target().gens() != group.gens() {
            return Err(Error::Dimension("action is not an endomorphism of the group".into()));
        }
        let action_inverse = match action_inverse {
            Some(inv) => {
                let id = GradedMap::identity(&group);
                if !action.compose(&inv)?.equals(&id) || !inv.compose(&action)?.equals(&id) {
                    return Err(Error::invalid("action_inverse", "is not inverse to the action"));
                }
                inv
            }
            None => action
                .inverse()
                .ok_or_else(|| Error::invalid("action", "is not invertible"))?,
        };
        Ok(LaurentModule {
            group,
            action,
            action_inverse,
        })
    }

    /// The trivial action.
    pub fn trivial(group: &GradedGroup) -> Self {
        let id = GradedMap::identity(group);
        LaurentModule {
            group: group.clone(),
            action: id.clone(),
            action_inverse: id,
        }
    }
}

/// A Z-action at the UCT level: a module together with the odd part `α¹`,
/// a degree-1 class of `Ext(K, K)`.
#[derive(Clone, Debug)]
pub struct ZObject {
    pub module: LaurentModule,
    pub odd_part: ExtElement,
}

impl ZObject {
    pub fn new(module: LaurentModule, odd_part: ExtElement) -> Result<Self> {
        let g = module.group.gens();
        if odd_part.source().gens() != g || odd_part.target().gens() != g {
            return Err(Error::Dimension("odd part must be a class in Ext(K, K)".into()));
        }
        if odd_part.degree() != 1 {
            return Err(Error::invalid("odd_part", "must have degree 1"));
        }
        Ok(ZObject { module, odd_part })
    }

    pub fn group(&self) -> &GradedGroup {
        &self.module.group
    }

    /// `[α] = (α⁰, α¹)`.
    pub fn class(&self) -> UctClass {
        UctClass {
            even: self.module.action.clone(),
            odd: self.odd_part.clone(),
        }
    }

    /// The object with class `u ∘ [α] ∘ u⁻¹`, for invertible `u: K → K'`.
    pub fn conjugate(&self, u: &UctClass) -> Result<ZObject> {
        use crate::uct::{uct_compose, uct_invert};
        let inv = uct_invert(u).ok_or_else(|| Error::precondition("conjugating class", "not invertible"))?;
        let c = uct_compose(&uct_compose(u, &self.class())?, &inv)?;
        let module = LaurentModule::new(u.target().clone(), c.even, None)?;
        ZObject::new(module, c.odd)
    }
}

/// `t ↦ t∘α⁰ − β⁰∘t` on one degree of `Ext(K_A, K_B)`.
pub fn gamma_apply(t: &ExtElement, alpha0: &GradedMap, beta0: &GradedMap) -> Result<ExtElement> {
    pull_ext(t, alpha0)?.sub(&push_ext(t, beta0)?)
}

/// `γ` as an integer matrix on the normal coordinates of `space`.
pub fn gamma_matrix(space: &ExtSpace, alpha0: &GradedMap, beta0: &GradedMap) -> Result<IntMatrix> {
    space.matrix_to(space, |t| gamma_apply(t, alpha0, beta0))
}

/// The matrices of γ on the domain of `Ext²(K_A, K_B)`, indexed by the
/// parity of `Ext²` (even ↔ degree-1 classes).
#[derive(Clone, Debug)]
pub struct GammaMap {
    pub spaces: [ExtSpace; 2],
    pub matrices: [IntMatrix; 2],
}

pub fn gamma_map(a: &LaurentModule, b: &LaurentModule) -> Result<GammaMap> {
    let spaces = Parity::BOTH.map(|p| ExtSpace::new(&a.group, &b.group, p.shift(1) as u8));
    let m0 = gamma_matrix(&spaces[0], &a.action, &b.action)?;
    let m1 = gamma_matrix(&spaces[1], &a.action, &b.action)?;
    Ok(GammaMap {
        spaces,
        matrices: [m0, m1],
    })
}

/// `Ext²(K_A, K_B) = coker γ` with an encoder for classes.
#[derive(Clone, Debug)]
pub struct LaurentExt2 {
    pub gamma: GammaMap,
    groups: [AbGroup; 2],
    proj: [IntMatrix; 2],
}

impl LaurentExt2 {
    pub fn group(&self) -> GradedGroup {
        GradedGroup::new(self.groups[0].clone(), self.groups[1].clone())
    }

    /// Parity of `Ext²` receiving classes of the given degree.
    pub fn parity_of_degree(degree: u8) -> Parity {
        Parity::from_degree(degree + 1)
    }

    /// Image of `t` in the cokernel, as normal coordinates of the parity-`p`
    /// part where `p` is [`Self::parity_of_degree`] of `t`.
    pub fn encode(&self, t: &ExtElement) -> Result<(Parity, Vec<Int>)> {
        let p = Self::parity_of_degree(t.degree());
        let c = self.gamma.spaces[p.index()].encode(t)?;
        Ok((
            p,
            self.groups[p.index()].normal_coordinates(&self.proj[p.index()].mul_vec(&c)),
        ))
    }

    pub fn class_is_zero(&self, t: &ExtElement) -> Result<bool> {
        let (p, c) = self.encode(t)?;
        Ok(self.groups[p.index()].is_zero_elem(&c))
    }
}

pub fn ext2_laurent(a: &LaurentModule, b: &LaurentModule) -> Result<LaurentExt2> {
    let gamma = gamma_map(a, b)?;
    let mut groups = Vec::new();
    let mut proj = Vec::new();
    for p in Parity::BOTH {
        let (g, m) = ab_cokernel(&gamma.matrices[p.index()], gamma.spaces[p.index()].group());
        groups.push(g);
        proj.push(m);
    }
    let groups: [AbGroup; 2] = groups.try_into().unwrap();
    let proj: [IntMatrix; 2] = proj.try_into().unwrap();
    Ok(LaurentExt2 { gamma, groups, proj })
}

/// A class in `Ext²` with its representative.
#[derive(Clone, Debug)]
pub struct Ext2Class {
    pub parity: Parity,
    pub coordinates: Vec<Int>,
    pub representative: ExtElement,
    pub is_zero: bool,
}

fn classify(ext2: &LaurentExt2, rep: ExtElement) -> Result<Ext2Class> {
    let (parity, coordinates) = ext2.encode(&rep)?;
    let is_zero = ext2.groups[parity.index()].is_zero_elem(&coordinates);
    Ok(Ext2Class {
        parity,
        coordinates,
        representative: rep,
        is_zero,
    })
}

/// The obstruction class of a Z-action: the image of `−α¹ ∘ (α⁰)⁻¹`.
pub fn obstruction_z(obj: &ZObject) -> Result<Ext2Class> {
    let m = &obj.module;
    let ext2 = ext2_laurent(m, m)?;
    let rep = pull_ext(&obj.odd_part, &m.action_inverse)?.neg();
    classify(&ext2, rep)
}

fn check_module_iso(a: &ZObject, b: &ZObject, t0: &GradedMap) -> Result<()> {
    if t0.degree() != 0 || t0.source().gens() != a.group().gens() || t0.target().gens() != b.group().gens() {
        return Err(Error::invalid("t0", "must be a degree-0 map K_A → K_B"));
    }
    if !t0.is_iso() {
        return Err(Error::precondition("t0", "not an isomorphism"));
    }
    let l = t0.compose(&a.module.action)?;
    let r = b.module.action.compose(t0)?;
    if !l.equals(&r) {
        return Err(Error::precondition("t0", "does not intertwine the actions"));
    }
    Ok(())
}

/// `β¹∘t⁰ − t⁰∘α¹`, the right-hand side of the lifting equation.
fn relative_rhs(a: &ZObject, b: &ZObject, t0: &GradedMap) -> Result<ExtElement> {
    pull_ext(&b.odd_part, t0)?.sub(&push_ext(&a.odd_part, t0)?)
}

/// Relative obstruction of the module isomorphism `t⁰`, in the cokernel
/// of the mixed map `t ↦ t∘α⁰ − β⁰∘t` on degree-1 classes.
pub fn relative_obstruction_z(a: &ZObject, b: &ZObject, t0: &GradedMap) -> Result<Ext2Class> {
    check_module_iso(a, b, t0)?;
    let ext2 = ext2_laurent(&a.module, &b.module)?;
    classify(&ext2, relative_rhs(a, b, t0)?)
}

#[derive(Clone, Debug)]
pub enum Decision<W, C> {
    Equivalent(W),
    Obstructed(C),
}

impl<W, C> Decision<W, C> {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Decision::Equivalent(_))
    }
}

/// Solves `γ(x) = y` modulo the relations of the target space.
pub(crate) fn solve_in_space<S: Space>(m: &IntMatrix, space: &S, rhs: &[Int]) -> Option<Vec<Int>> {
    let n = m.cols();
    let a = m.hstack(space.group().rels());
    let sol = SmithSolver::new(&a).solve(rhs).ok()??;
    Some(sol[..n].to_vec())
}

/// Decides whether `t⁰` lifts to an invertible class `(t⁰, t¹)` intertwining
/// the two actions. The witness is verified by direct evaluation.
pub fn equivalent_z(a: &ZObject, b: &ZObject, t0: &GradedMap) -> Result<Decision<UctClass, ExtElement>> {
    check_module_iso(a, b, t0)?;
    let space = ExtSpace::new(a.group(), b.group(), 1);
    let m = gamma_matrix(&space, &a.module.action, &b.module.action)?;
    let rhs = relative_rhs(a, b, t0)?;
    match solve_in_space(&m, &space, &space.encode(&rhs)?) {
        None => Ok(Decision::Obstructed(rhs)),
        Some(x) => {
            let t1 = space.decode(&x);
            if !gamma_apply(&t1, &a.module.action, &b.module.action)?.equals(&rhs) {
                return Err(Error::precondition("equivalent_z", "witness failed verification"));
            }
            Ok(Decision::Equivalent(UctClass::new(t0.clone(), t1)?))
        }
    }
}

/// Degree-0 isomorphisms `K_A → K_B` intertwining the actions, found by
/// enumerating `Hom(K_A, K_B)`; `None` if the Hom group is infinite or has
/// more than `limit` elements.
pub fn module_isomorphisms(a: &LaurentModule, b: &LaurentModule, limit: u64) -> Option<Vec<GradedMap>> {
    let hom = HomSpace::new(&a.group, &b.group, 0);
    let els = hom.group().elements(limit)?;
    Some(
        els.iter()
            .map(|c| hom.decode(c))
            .filter(|t| {
                t.compose(&a.action)
                    .ok()
                    .zip(b.action.compose(t).ok())
                    .is_some_and(|(l, r)| l.equals(&r))
                    && t.is_iso()
            })
            .collect(),
    )
}

/// Searches all module isomorphisms for one that lifts; requires both
/// groups finite of order at most `2¹⁶`.
pub fn search_equivalence(a: &ZObject, b: &ZObject) -> Result<Option<UctClass>> {
    const LIMIT: u64 = 1 << 16;
    for (name, g) in [("A", a.group()), ("B", b.group())] {
        if g.order().is_none_or(|o| o > Int::from(LIMIT)) {
            return Err(Error::precondition(
                name,
                "exhaustive search needs a finite group of order at most 65536",
            ));
        }
    }
    let isos = module_isomorphisms(&a.module, &b.module, LIMIT)
        .ok_or_else(|| Error::precondition("Hom(K_A, K_B)", "too large for exhaustive search"))?;
    for t0 in isos {
        if let Decision::Equivalent(w) = equivalent_z(a, b, &t0)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Kernel and cokernel of `x ↦ (β⁰)⁻¹∘x∘α⁰ − x` on Hom and on Ext.
#[derive(Clone, Debug)]
pub struct PvTerms {
    pub hom_kernel: GradedGroup,
    pub hom_cokernel: GradedGroup,
    pub ext_kernel: GradedGroup,
    pub ext_cokernel: GradedGroup,
}

fn kernel_cokernel(m: &IntMatrix, g: &AbGroup) -> (AbGroup, AbGroup) {
    (ab_kernel(m, g, g).0, ab_cokernel(m, g).0)
}

pub fn pv_terms(a: &ZObject, b: &ZObject) -> Result<PvTerms> {
    let (alpha, beta_inv) = (&a.module.action, &b.module.action_inverse);
    let mut hk = Vec::new();
    let mut hc = Vec::new();
    let mut ek = Vec::new();
    let mut ec = Vec::new();
    for d in 0..2u8 {
        let hom = HomSpace::new(a.group(), b.group(), d);
        let m = hom.matrix_to(&hom, |x| beta_inv.compose(&x.compose(alpha)?)?.sub(x))?;
        let (k, c) = kernel_cokernel(&m, hom.group());
        hk.push(k);
        hc.push(c);
        let ext = ExtSpace::new(a.group(), b.group(), d);
        let m = ext.matrix_to(&ext, |x| push_ext(&pull_ext(x, alpha)?, beta_inv)?.sub(x))?;
        let (k, c) = kernel_cokernel(&m, ext.group());
        ek.push(k);
        ec.push(c);
    }
    let gg = |v: Vec<AbGroup>| GradedGroup::new(v[0].clone(), v[1].clone());
    Ok(PvTerms {
        hom_kernel: gg(hk),
        hom_cokernel: gg(hc),
        ext_kernel: gg(ek),
        ext_cokernel: gg(ec),
    })
}

/// Matrix helper: a degree-0 endomorphism given by its two components.
pub fn graded_endomorphism(g: &GradedGroup, even: IntMatrix, odd: IntMatrix) -> Result<GradedMap> {
    GradedMap::new(g.clone(), g.clone(), 0, even, odd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::ints;
    use crate::matrix::Matrix;

    fn z2_both() -> GradedGroup {
        GradedGroup::new(AbGroup::cyclic(2), AbGroup::cyclic(2))
    }

    /// `(Z/2)²` even with the swap, `Z/2` odd with the identity.
    fn swap_module() -> LaurentModule {
        let g = GradedGroup::new(AbGroup::from_factors(&ints(&[2, 2])), AbGroup::cyclic(2));
        let a = graded_endomorphism(&g, Matrix::from_i64_rows(&[&[0, 1], &[1, 0]], 2), Matrix::identity(1)).unwrap();
        LaurentModule::new(g, a, None).unwrap()
    }

    #[test]
    fn identity_action_gamma_vanishes() {
        let m = LaurentModule::trivial(&z2_both());
        let g = gamma_map(&m, &m).unwrap();
        assert!(g.matrices.iter().all(|x| x.is_zero()));
        let e2 = ext2_laurent(&m, &m).unwrap().group();
        assert_eq!(e2.even().invariant_factors(), ints(&[2, 2]));
    }

    #[test]
    fn free_group_has_no_ext2() {
        let g = GradedGroup::even_only(AbGroup::free(1));
        let neg = graded_endomorphism(&g, Matrix::from_i64_rows(&[&[-1]], 1), Matrix::zeros(0, 0)).unwrap();
        let m = LaurentModule::new(g, neg, None).unwrap();
        assert!(ext2_laurent(&m, &m).unwrap().group().is_trivial());
    }

    #[test]
    fn swap_gamma_matches_direct_evaluation() {
        let m = swap_module();
        let g = gamma_map(&m, &m).unwrap();
        for p in Parity::BOTH {
            let s = &g.spaces[p.index()];
            for t in s.elements(256).unwrap() {
                let direct = gamma_apply(&t, &m.action, &m.action).unwrap();
                let via = s.decode(&g.matrices[p.index()].mul_vec(&s.encode(&t).unwrap()));
                assert!(direct.equals(&via));
            }
        }
        assert_eq!(g.spaces[1].group().order(), Some(Int::from(16 * 2)));
    }

    #[test]
    fn obstruction_examples() {
        let g = z2_both();
        let m = LaurentModule::trivial(&g);
        let zero = ZObject::new(m.clone(), ExtElement::zero(&g, &g, 1)).unwrap();
        assert!(obstruction_z(&zero).unwrap().is_zero);
        let e = ExtSpace::new(&g, &g, 1).decode(&ints(&[1, 0]));
        let obj = ZObject::new(m, e).unwrap();
        let c = obstruction_z(&obj).unwrap();
        assert!(!c.is_zero);
        assert_eq!(c.parity, Parity::Even);
    }

    #[test]
    fn conjugation_gives_witness() {
        let g = z2_both();
        let s = ExtSpace::new(&g, &g, 1);
        let obj = ZObject::new(LaurentModule::trivial(&g), s.decode(&ints(&[1, 1]))).unwrap();
        let u = UctClass::new(GradedMap::identity(&g), s.decode(&ints(&[0, 1]))).unwrap();
        let conj = obj.conjugate(&u).unwrap();
        assert!(relative_obstruction_z(&obj, &conj, &u.even).unwrap().is_zero);
        match equivalent_z(&obj, &conj, &u.even).unwrap() {
            Decision::Equivalent(w) => {
                use crate::uct::uct_compose;
                let l = uct_compose(&w, &obj.class()).unwrap();
                let r = uct_compose(&conj.class(), &w).unwrap();
                assert!(l.equals(&r));
            }
            Decision::Obstructed(_) => panic!("conjugate must be equivalent"),
        }
    }

    #[test]
    fn swap_action_obstructed() {
        let m = swap_module();
        let g = m.group.clone();
        let s = ExtSpace::new(&g, &g, 1);
        let gm = gamma_map(&m, &m).unwrap();
        let zero = ZObject::new(m.clone(), s.zero()).unwrap();
        let mut found = false;
        for t in s.elements(256).unwrap() {
            let b = ZObject::new(m.clone(), t.clone()).unwrap();
            let rel = relative_obstruction_z(&zero, &b, &GradedMap::identity(&g)).unwrap();
            let dec = equivalent_z(&zero, &b, &GradedMap::identity(&g)).unwrap();
            assert_eq!(rel.is_zero, dec.is_equivalent());
            found |= !rel.is_zero;
        }
        assert!(found);
        assert!(!gm.matrices[0].is_zero());
    }

    #[test]
    fn pv_terms_examples() {
        let zg = GradedGroup::even_only(AbGroup::free(1));
        let obj = ZObject::new(LaurentModule::trivial(&zg), ExtElement::zero(&zg, &zg, 1)).unwrap();
        let pv = pv_terms(&obj, &obj).unwrap();
        assert_eq!(pv.hom_kernel.even().invariant_factors(), ints(&[0]));
        assert_eq!(pv.hom_cokernel.even().invariant_factors(), ints(&[0]));
        assert!(pv.ext_kernel.is_trivial() && pv.ext_cokernel.is_trivial());

        let g3 = GradedGroup::even_only(AbGroup::cyclic(3));
        let two = graded_endomorphism(&g3, Matrix::from_i64_rows(&[&[2]], 1), Matrix::zeros(0, 0)).unwrap();
        let a = ZObject::new(LaurentModule::trivial(&g3), ExtElement::zero(&g3, &g3, 1)).unwrap();
        let b = ZObject::new(
            LaurentModule::new(g3.clone(), two, None).unwrap(),
            ExtElement::zero(&g3, &g3, 1),
        )
        .unwrap();
        let pv = pv_terms(&a, &b).unwrap();
        assert!(pv.hom_kernel.is_trivial() && pv.hom_cokernel.is_trivial());
    }

    #[test]
    fn exhaustive_search_finds_identity() {
        let g = z2_both();
        let obj = ZObject::new(LaurentModule::trivial(&g), ExtElement::zero(&g, &g, 1)).unwrap();
        assert!(search_equivalence(&obj, &obj).unwrap().is_some());
    }
}
