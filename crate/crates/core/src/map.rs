//! Homomorphisms of graded groups, kernels, cokernels and homology.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::group::{AbGroup, GradedGroup, Parity};
use crate::matrix::Matrix;
use crate::scalar::Int;
use crate::solve::{kernel_basis, SmithSolver};
use crate::IntMatrix;

/// A homomorphism `G → H` of degree 0 or 1, given on generators.
///
/// `component(p)` maps generators of `G_p` to elements of `H_{p+degree}`.
#[derive(Clone)]
pub struct GradedMap {
    source: GradedGroup,
    target: GradedGroup,
    degree: u8,
    comps: [IntMatrix; 2],
}

impl GradedMap {
    /// Checks shapes and that relators of the source map to zero.
    pub fn new(source: GradedGroup, target: GradedGroup, degree: u8, even: IntMatrix, odd: IntMatrix) -> Result<Self> {
        let f = GradedMap::new_unchecked(source, target, degree, even, odd)?;
        for p in Parity::BOTH {
            let tgt = f.target.part(p.shift(f.degree));
            let img = f.comps[p.index()].mul(f.source.part(p).rels());
            for (j, c) in img.columns().iter().enumerate() {
                if !tgt.is_zero_elem(c) {
                    return Err(Error::invalid(
                        format!("{} component, relator column {j}", p.name()),
                        "relator does not map into the target relations",
                    ));
                }
            }
        }
        Ok(f)
    }

    /// Checks shapes only.
    pub fn new_unchecked(
        source: GradedGroup,
        target: GradedGroup,
        degree: u8,
        even: IntMatrix,
        odd: IntMatrix,
    ) -> Result<Self> {
        let degree = degree % 2;
        let comps = [even, odd];
        for p in Parity::BOTH {
            let m = &comps[p.index()];
            let (r, c) = (target.part(p.shift(degree)).gens(), source.part(p).gens());
            if m.rows() != r || m.cols() != c {
                return Err(Error::Dimension(format!(
                    "{} component is {}x{}, expected {r}x{c}",
                    p.name(),
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(GradedMap {
            source,
            target,
            degree,
            comps,
        })
    }

    pub fn from_parts(source: GradedGroup, target: GradedGroup, degree: u8, comps: [IntMatrix; 2]) -> Result<Self> {
        let [e, o] = comps;
        Self::new(source, target, degree, e, o)
    }

    pub fn zero(source: &GradedGroup, target: &GradedGroup, degree: u8) -> Self {
        let degree = degree % 2;
        let comps = Parity::BOTH.map(|p| Matrix::zeros(target.part(p.shift(degree)).gens(), source.part(p).gens()));
        GradedMap {
            source: source.clone(),
            target: target.clone(),
            degree,
            comps,
        }
    }

    pub fn identity(g: &GradedGroup) -> Self {
        let comps = Parity::BOTH.map(|p| Matrix::identity(g.part(p).gens()));
        GradedMap {
            source: g.clone(),
            target: g.clone(),
            degree: 0,
            comps,
        }
    }

    pub fn source(&self) -> &GradedGroup {
        &self.source
    }

    pub fn target(&self) -> &GradedGroup {
        &self.target
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn component(&self, p: Parity) -> &IntMatrix {
        &self.comps[p.index()]
    }

    pub fn components(&self) -> &[IntMatrix; 2] {
        &self.comps
    }

    /// Same matrices viewed between other presentations with the same generators.
    pub fn with_groups(&self, source: GradedGroup, target: GradedGroup) -> Result<Self> {
        Self::from_parts(source, target, self.degree, self.comps.clone())
    }

    /// `self ∘ before`.
    pub fn compose(&self, before: &GradedMap) -> Result<GradedMap> {
        if before.target.gens() != self.source.gens() {
            return Err(Error::Dimension("composition of incompatible maps".into()));
        }
        let comps = Parity::BOTH.map(|p| self.comps[p.shift(before.degree).index()].mul(&before.comps[p.index()]));
        Ok(GradedMap {
            source: before.source.clone(),
            target: self.target.clone(),
            degree: (self.degree + before.degree) % 2,
            comps,
        })
    }

    fn combine(&self, other: &GradedMap, f: impl Fn(&IntMatrix, &IntMatrix) -> IntMatrix) -> Result<GradedMap> {
        if self.degree != other.degree
            || self.source.gens() != other.source.gens()
            || self.target.gens() != other.target.gens()
        {
            return Err(Error::Dimension("maps have different shapes".into()));
        }
        let comps = Parity::BOTH.map(|p| f(&self.comps[p.index()], &other.comps[p.index()]));
        Ok(GradedMap {
            source: self.source.clone(),
            target: self.target.clone(),
            degree: self.degree,
            comps,
        })
    }

    pub fn add(&self, other: &GradedMap) -> Result<GradedMap> {
        self.combine(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &GradedMap) -> Result<GradedMap> {
        self.combine(other, |a, b| a.sub(b))
    }

    pub fn neg(&self) -> GradedMap {
        let comps = self.comps.clone().map(|m| m.neg());
        GradedMap { comps, ..self.clone() }
    }

    /// Whether the map vanishes modulo the target relations.
    pub fn is_zero(&self) -> bool {
        Parity::BOTH.iter().all(|&p| {
            self.target
                .part(p.shift(self.degree))
                .columns_vanish(&self.comps[p.index()])
        })
    }

    /// Equality as homomorphisms.
    pub fn equals(&self, other: &GradedMap) -> bool {
        self.sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }

    pub fn is_injective(&self) -> bool {
        kernel_of(self).0.is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        cokernel_of(self).0.is_trivial()
    }

    pub fn is_iso(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// The inverse homomorphism, if this map is bijective.
    pub fn inverse(&self) -> Option<GradedMap> {
        if !self.is_iso() {
            return None;
        }
        let id = GradedMap::identity(&self.target);
        lift_through(&id, self)
    }

    /// Applies the parity-`p` component to generator coordinates.
    pub fn apply(&self, p: Parity, v: &[Int]) -> Vec<Int> {
        self.comps[p.index()].mul_vec(v)
    }
}

impl fmt::Debug for GradedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GradedMap(deg {}, even {:?}, odd {:?})",
            self.degree, self.comps[0], self.comps[1]
        )
    }
}

/// Finds `x` with `along ∘ x = f`; `x` has degree `deg f − deg along`.
///
/// Each generator image of `f` is lifted individually, so the result is a
/// homomorphism whenever the source of `f` is free or `along` is injective.
/// Returns `None` if some generator does not lift or the lift is not
/// relation-compatible.
pub fn lift_through(f: &GradedMap, along: &GradedMap) -> Option<GradedMap> {
    let degree = (f.degree + 2 - along.degree) % 2;
    let mut comps = Vec::with_capacity(2);
    for p in Parity::BOTH {
        let mid = p.shift(degree);
        let tgt = f.target.part(p.shift(f.degree));
        let a = along.comps[mid.index()].hstack(tgt.rels());
        let solver = SmithSolver::new(&a);
        let rhs = &f.comps[p.index()];
        let sol = solver.solve_matrix(rhs).ok()??;
        comps.push(sol.block(0, along.source.part(mid).gens(), 0, rhs.cols()));
    }
    let odd = comps.pop().unwrap();
    let even = comps.pop().unwrap();
    GradedMap::new(f.source.clone(), along.source.clone(), degree, even, odd).ok()
}

/// Lattice of `x ∈ Z^m` with `F·x ∈ colspan(R)`, as a basis in column HNF.
pub fn preimage_lattice(f: &IntMatrix, target: &AbGroup) -> IntMatrix {
    let m = f.cols();
    let k = kernel_basis(&f.hstack(&target.rels().neg()));
    crate::hermite::column_hnf(&k.block(0, m, 0, k.cols()))
}

/// Rewrites `A` in Smith form: returns the normalized group together with
/// the coordinate change `to` (new ← old) and `from` (old ← new).
pub fn simplify(a: &AbGroup) -> (AbGroup, IntMatrix, IntMatrix) {
    let nf = a.normal_form();
    (a.normalized(), nf.to_normal.clone(), nf.from_normal.clone())
}

/// Kernel of `F: A → B` as a normalized group with its inclusion matrix.
pub fn ab_kernel(f: &IntMatrix, a: &AbGroup, b: &AbGroup) -> (AbGroup, IntMatrix) {
    let p = preimage_lattice(f, b);
    let solver = SmithSolver::new(&p);
    let rels = solver
        .solve_matrix(a.rels())
        .ok()
        .flatten()
        .expect("source relators lie in the preimage lattice of a compatible map");
    let raw = AbGroup::new(p.cols(), rels);
    let (g, _, from) = simplify(&raw);
    (g, p.mul(&from))
}

/// Cokernel of `F: A → B` as a normalized group with its projection matrix.
pub fn ab_cokernel(f: &IntMatrix, b: &AbGroup) -> (AbGroup, IntMatrix) {
    let raw = b.with_relations(f);
    let (g, to, _) = simplify(&raw);
    (g, to)
}

/// Kernel of `f` with its inclusion.
pub fn kernel_of(f: &GradedMap) -> (GradedGroup, GradedMap) {
    let mut groups = Vec::new();
    let mut incl = Vec::new();
    for p in Parity::BOTH {
        let (g, m) = ab_kernel(f.component(p), f.source.part(p), f.target.part(p.shift(f.degree)));
        groups.push(g);
        incl.push(m);
    }
    let k = GradedGroup::new(groups[0].clone(), groups[1].clone());
    let [e, o]: [IntMatrix; 2] = incl.try_into().unwrap();
    let i = GradedMap::new_unchecked(k.clone(), f.source.clone(), 0, e, o).expect("kernel inclusion shape");
    (k, i)
}

/// Cokernel of `f` with its projection (of degree 0 from the target of `f`).
pub fn cokernel_of(f: &GradedMap) -> (GradedGroup, GradedMap) {
    let mut groups = Vec::new();
    let mut proj = Vec::new();
    for q in Parity::BOTH {
        let src = q.shift(f.degree);
        let (g, m) = ab_cokernel(f.component(src), f.target.part(q));
        groups.push(g);
        proj.push(m);
    }
    let c = GradedGroup::new(groups[0].clone(), groups[1].clone());
    let [e, o]: [IntMatrix; 2] = proj.try_into().unwrap();
    let p = GradedMap::new_unchecked(f.target.clone(), c.clone(), 0, e, o).expect("cokernel projection shape");
    (c, p)
}

/// Homology `ker g / im f` of `A →f B →g C`, indexed by the parity of `B`.
pub fn homology_at(f: &GradedMap, g: &GradedMap) -> Result<GradedGroup> {
    if f.target.gens() != g.source.gens() {
        return Err(Error::Dimension("homology of non-composable maps".into()));
    }
    if !g.compose(f)?.is_zero() {
        return Err(Error::precondition(
            "homology",
            "composite of consecutive maps is not zero",
        ));
    }
    let (_, incl) = kernel_of(g);
    let into_kernel =
        lift_through(f, &incl).ok_or_else(|| Error::precondition("homology", "image not inside kernel"))?;
    Ok(cokernel_of(&into_kernel).0)
}

/// Whether `A →f B →g C` is exact at `B`.
pub fn is_exact_at(f: &GradedMap, g: &GradedMap) -> bool {
    homology_at(f, g).map(|h| h.is_trivial()).unwrap_or(false)
}

/// Block map `⊕ sources → ⊕ targets` from a grid of maps of a common degree;
/// `None` entries are zero.
pub fn block_map(
    sources: &[GradedGroup],
    targets: &[GradedGroup],
    degree: u8,
    entry: impl Fn(usize, usize) -> Option<GradedMap>,
) -> Result<GradedMap> {
    let src = GradedGroup::direct_sum(&sources.iter().collect::<Vec<_>>());
    let tgt = GradedGroup::direct_sum(&targets.iter().collect::<Vec<_>>());
    let mut comps = Vec::new();
    for p in Parity::BOTH {
        let q = p.shift(degree);
        let mut m = Matrix::zeros(tgt.part(q).gens(), src.part(p).gens());
        let mut r0 = 0;
        for (i, t) in targets.iter().enumerate() {
            let mut c0 = 0;
            for (j, s) in sources.iter().enumerate() {
                if let Some(f) = entry(i, j) {
                    if f.degree != degree % 2 {
                        return Err(Error::Dimension(format!("block ({i},{j}) has the wrong degree")));
                    }
                    m.set_block(r0, c0, f.component(p));
                }
                c0 += s.part(p).gens();
            }
            r0 += t.part(q).gens();
        }
        comps.push(m);
    }
    let [e, o]: [IntMatrix; 2] = comps.try_into().unwrap();
    GradedMap::new_unchecked(src, tgt, degree, e, o)
}

/// The map `C → T` induced by `f: M → T` on a quotient `proj: M ↠ C`.
///
/// Fails if `f` does not vanish on the kernel of `proj`.
pub fn descend(f: &GradedMap, proj: &GradedMap) -> Result<GradedMap> {
    if f.source.gens() != proj.source.gens() || proj.degree != 0 {
        return Err(Error::Dimension("descend needs maps out of the same group".into()));
    }
    let c = &proj.target;
    let mut comps = Vec::with_capacity(2);
    for p in Parity::BOTH {
        let cp = c.part(p);
        let pm = &proj.comps[p.index()];
        let section = SmithSolver::new(&pm.hstack(cp.rels()))
            .solve_matrix(&Matrix::identity(cp.gens()))?
            .ok_or_else(|| Error::precondition(p.name(), "projection is not surjective"))?
            .block(0, pm.cols(), 0, cp.gens());
        comps.push(f.comps[p.index()].mul(&section));
    }
    let [e, o]: [IntMatrix; 2] = comps.try_into().unwrap();
    GradedMap::new(c.clone(), f.target.clone(), f.degree, e, o)
        .map_err(|_| Error::precondition("descend", "map does not vanish on the kernel of the projection"))
}

/// `f: A → B` read as a map `Σ^s A → Σ^t B`; the degree becomes `deg f + s + t`.
pub fn reindex(f: &GradedMap, s: Parity, t: Parity) -> GradedMap {
    let (s, t) = (s.index() as u8, t.index() as u8);
    let comps = Parity::BOTH.map(|p| f.comps[p.shift(s).index()].clone());
    GradedMap {
        source: f.source.shift(s),
        target: f.target.shift(t),
        degree: (f.degree + s + t) % 2,
        comps,
    }
}

/// Whether an integer vector is zero.
pub fn is_zero_vec(v: &[Int]) -> bool {
    v.iter().all(Zero::is_zero)
}
