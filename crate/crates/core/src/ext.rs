//! Hom and Ext of graded groups through canonical length-1 resolutions.
//!
//! The canonical resolution of `G_p = Z^g / L` is `0 → Z^k →B Z^g → G_p → 0`
//! where `B` is the column Hermite basis of `L`. An element of `Ext(G_p, H_q)`
//! is a `k`-tuple of elements of `H_q` (the images of the columns of `B`), and
//! two tuples agree when their difference is `X·B` for some `X: Z^g → H_q`.

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::group::{AbGroup, GradedGroup, Parity};
use crate::map::{ab_kernel, kernel_of, lift_through, preimage_lattice, simplify, GradedMap};
use crate::matrix::Matrix;
use crate::scalar::Int;
use crate::solve::SmithSolver;
use crate::IntMatrix;

/// A class in `Ext¹(G, H)` of degree 0 or 1.
///
/// `vectors(p)` has one column per canonical basis column of `G_p`, each an
/// element of `H_{p+degree}`.
#[derive(Clone, Debug)]
pub struct ExtElement {
    source: GradedGroup,
    target: GradedGroup,
    degree: u8,
    vectors: [IntMatrix; 2],
}

fn basis_rank(g: &GradedGroup, p: Parity) -> usize {
    g.part(p).relation_basis().cols()
}

impl ExtElement {
    pub fn new(source: GradedGroup, target: GradedGroup, degree: u8, vectors: [IntMatrix; 2]) -> Result<Self> {
        let degree = degree % 2;
        for p in Parity::BOTH {
            let v = &vectors[p.index()];
            let (r, c) = (target.part(p.shift(degree)).gens(), basis_rank(&source, p));
            if v.rows() != r || v.cols() != c {
                return Err(Error::Dimension(format!(
                    "{} vectors are {}x{}, expected {r}x{c}",
                    p.name(),
                    v.rows(),
                    v.cols()
                )));
            }
        }
        Ok(ExtElement {
            source,
            target,
            degree,
            vectors,
        })
    }

    pub fn zero(source: &GradedGroup, target: &GradedGroup, degree: u8) -> Self {
        let degree = degree % 2;
        let vectors = Parity::BOTH.map(|p| Matrix::zeros(target.part(p.shift(degree)).gens(), basis_rank(source, p)));
        ExtElement {
            source: source.clone(),
            target: target.clone(),
            degree,
            vectors,
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

    pub fn vectors(&self, p: Parity) -> &IntMatrix {
        &self.vectors[p.index()]
    }

    pub fn all_vectors(&self) -> &[IntMatrix; 2] {
        &self.vectors
    }

    fn check_same_space(&self, other: &ExtElement) -> Result<()> {
        if self.degree != other.degree
            || self.source.gens() != other.source.gens()
            || self.target.gens() != other.target.gens()
        {
            return Err(Error::Dimension("Ext elements live in different spaces".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &ExtElement) -> Result<ExtElement> {
        self.check_same_space(other)?;
        let vectors = Parity::BOTH.map(|p| self.vectors[p.index()].add(&other.vectors[p.index()]));
        Ok(ExtElement {
            vectors,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &ExtElement) -> Result<ExtElement> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ExtElement {
        ExtElement {
            vectors: self.vectors.clone().map(|m| m.neg()),
            ..self.clone()
        }
    }

    pub fn scale(&self, k: &Int) -> ExtElement {
        ExtElement {
            vectors: self.vectors.clone().map(|m| m.scale(k)),
            ..self.clone()
        }
    }

    /// Whether the class vanishes in Ext.
    pub fn is_zero(&self) -> bool {
        Parity::BOTH.iter().all(|&p| {
            let piece = ExtPiece::new(self.source.part(p), self.target.part(p.shift(self.degree)));
            piece.raw.is_zero_elem(&flatten(&self.vectors[p.index()]))
        })
    }

    /// Equality in Ext.
    pub fn equals(&self, other: &ExtElement) -> bool {
        self.sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }

    /// The same class viewed as a degree-`(d+1)` class out of the suspension.
    pub fn desuspend_source(&self) -> ExtElement {
        let [e, o] = self.vectors.clone();
        ExtElement {
            source: self.source.suspend(),
            target: self.target.clone(),
            degree: (self.degree + 1) % 2,
            vectors: [o, e],
        }
    }
}

/// Column-stacks a matrix.
pub fn flatten(m: &IntMatrix) -> Vec<Int> {
    m.columns().concat()
}

/// Inverse of [`flatten`].
pub fn unflatten(v: &[Int], rows: usize, cols: usize) -> IntMatrix {
    assert_eq!(v.len(), rows * cols);
    let columns: Vec<Vec<Int>> = (0..cols).map(|j| v[j * rows..(j + 1) * rows].to_vec()).collect();
    Matrix::from_columns(rows, &columns)
}

/// Matrix of `X ↦ X·B` on column-stacked `h × g` matrices.
fn right_mult_matrix(b: &IntMatrix, h: usize) -> IntMatrix {
    let (g, k) = (b.rows(), b.cols());
    let mut m = Matrix::zeros(h * k, h * g);
    for j in 0..k {
        for i in 0..g {
            let c = &b[(i, j)];
            if !c.is_zero() {
                for r in 0..h {
                    m[(j * h + r, i * h + r)] = c.clone();
                }
            }
        }
    }
    m
}

fn power(h: &AbGroup, n: usize) -> AbGroup {
    AbGroup::direct_sum(&vec![h; n])
}

/// `Ext(G, H)` for ungraded groups: raw presentation and normal form.
#[derive(Clone, Debug)]
struct ExtPiece {
    h: usize,
    k: usize,
    raw: AbGroup,
    group: AbGroup,
    factors: Vec<Int>,
    to: IntMatrix,
    from: IntMatrix,
}

impl ExtPiece {
    fn new(g: &AbGroup, h: &AbGroup) -> Self {
        let b = g.relation_basis();
        let (hg, k) = (h.gens(), b.cols());
        let raw = power(h, k).with_relations(&right_mult_matrix(b, hg));
        let (group, to, from) = simplify(&raw);
        let factors = raw.invariant_factors();
        ExtPiece {
            h: hg,
            k,
            raw,
            group,
            factors,
            to,
            from,
        }
    }

    fn encode(&self, e: &IntMatrix) -> Vec<Int> {
        reduce_coords(&self.factors, self.to.mul_vec(&flatten(e)))
    }

    fn decode(&self, c: &[Int]) -> IntMatrix {
        unflatten(&self.from.mul_vec(c), self.h, self.k)
    }
}

/// `Hom(G, H)` for ungraded groups as a kernel inside `H^g`.
#[derive(Clone, Debug)]
struct HomPiece {
    h: usize,
    g: usize,
    group: AbGroup,
    factors: Vec<Int>,
    incl: IntMatrix,
    encoder: SmithSolver<Int>,
}

impl HomPiece {
    fn new(g: &AbGroup, h: &AbGroup) -> Self {
        let b = g.relation_basis();
        let (hg, gg) = (h.gens(), g.gens());
        let hpow = power(h, gg);
        let (group, incl) = ab_kernel(&right_mult_matrix(b, hg), &hpow, &power(h, b.cols()));
        let encoder = SmithSolver::new(&incl.hstack(hpow.rels()));
        let factors = group.invariant_factors();
        HomPiece {
            h: hg,
            g: gg,
            group,
            factors,
            incl,
            encoder,
        }
    }

    fn encode(&self, x: &IntMatrix) -> Option<Vec<Int>> {
        let sol = self.encoder.solve(&flatten(x)).ok()??;
        Some(reduce_coords(&self.factors, sol[..self.group.gens()].to_vec()))
    }

    fn decode(&self, c: &[Int]) -> IntMatrix {
        unflatten(&self.incl.mul_vec(c), self.h, self.g)
    }
}

fn reduce_coords(factors: &[Int], mut c: Vec<Int>) -> Vec<Int> {
    for (x, d) in c.iter_mut().zip(factors) {
        if !d.is_zero() {
            *x = x.mod_floor(d);
        }
    }
    c
}

/// A finitely generated group whose elements encode some other objects.
pub trait Space {
    type Elem;
    /// The coordinate group, a direct sum of cyclic groups.
    fn group(&self) -> &AbGroup;
    fn encode(&self, x: &Self::Elem) -> Result<Vec<Int>>;
    fn decode(&self, c: &[Int]) -> Self::Elem;

    /// Matrix of a homomorphism between spaces, in normal coordinates.
    fn matrix_to<S: Space>(&self, to: &S, f: impl Fn(&Self::Elem) -> Result<S::Elem>) -> Result<IntMatrix> {
        let n = self.group().gens();
        let mut cols = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![Int::zero(); n];
            e[i] = Int::from(1);
            cols.push(to.encode(&f(&self.decode(&e))?)?);
        }
        Ok(Matrix::from_columns(to.group().gens(), &cols))
    }
}

/// `Ext(G, H)` in a fixed degree.
#[derive(Clone, Debug)]
pub struct ExtSpace {
    source: GradedGroup,
    target: GradedGroup,
    degree: u8,
    pieces: [ExtPiece; 2],
    group: AbGroup,
}

impl ExtSpace {
    pub fn new(source: &GradedGroup, target: &GradedGroup, degree: u8) -> Self {
        let degree = degree % 2;
        let pieces = Parity::BOTH.map(|p| ExtPiece::new(source.part(p), target.part(p.shift(degree))));
        let group = AbGroup::direct_sum(&[&pieces[0].group, &pieces[1].group]);
        ExtSpace {
            source: source.clone(),
            target: target.clone(),
            degree,
            pieces,
            group,
        }
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn source(&self) -> &GradedGroup {
        &self.source
    }

    pub fn target(&self) -> &GradedGroup {
        &self.target
    }

    /// Number of normal coordinates contributed by source parity `p`.
    pub fn piece_len(&self, p: Parity) -> usize {
        self.pieces[p.index()].group.gens()
    }

    pub fn zero(&self) -> ExtElement {
        ExtElement::zero(&self.source, &self.target, self.degree)
    }

    /// All elements of a finite Ext group of order at most `limit`.
    pub fn elements(&self, limit: u64) -> Option<Vec<ExtElement>> {
        Some(self.group.elements(limit)?.iter().map(|c| self.decode(c)).collect())
    }
}

impl Space for ExtSpace {
    type Elem = ExtElement;

    fn group(&self) -> &AbGroup {
        &self.group
    }

    fn encode(&self, e: &ExtElement) -> Result<Vec<Int>> {
        if e.degree != self.degree || e.source.gens() != self.source.gens() || e.target.gens() != self.target.gens() {
            return Err(Error::Dimension("element does not belong to this Ext space".into()));
        }
        Ok(Parity::BOTH
            .iter()
            .flat_map(|&p| self.pieces[p.index()].encode(&e.vectors[p.index()]))
            .collect())
    }

    fn decode(&self, c: &[Int]) -> ExtElement {
        let n0 = self.pieces[0].group.gens();
        let vectors = [self.pieces[0].decode(&c[..n0]), self.pieces[1].decode(&c[n0..])];
        ExtElement {
            source: self.source.clone(),
            target: self.target.clone(),
            degree: self.degree,
            vectors,
        }
    }
}

/// `Hom(G, H)` in a fixed degree.
#[derive(Clone, Debug)]
pub struct HomSpace {
    source: GradedGroup,
    target: GradedGroup,
    degree: u8,
    pieces: [HomPiece; 2],
    group: AbGroup,
}

impl HomSpace {
    pub fn new(source: &GradedGroup, target: &GradedGroup, degree: u8) -> Self {
        let degree = degree % 2;
        let pieces = Parity::BOTH.map(|p| HomPiece::new(source.part(p), target.part(p.shift(degree))));
        let group = AbGroup::direct_sum(&[&pieces[0].group, &pieces[1].group]);
        HomSpace {
            source: source.clone(),
            target: target.clone(),
            degree,
            pieces,
            group,
        }
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }
}

impl Space for HomSpace {
    type Elem = GradedMap;

    fn group(&self) -> &AbGroup {
        &self.group
    }

    fn encode(&self, f: &GradedMap) -> Result<Vec<Int>> {
        if f.degree() != self.degree
            || f.source().gens() != self.source.gens()
            || f.target().gens() != self.target.gens()
        {
            return Err(Error::Dimension("map does not belong to this Hom space".into()));
        }
        let mut out = Vec::new();
        for p in Parity::BOTH {
            let c = self.pieces[p.index()]
                .encode(f.component(p))
                .ok_or_else(|| Error::invalid(p.name(), "map is not relation-compatible"))?;
            out.extend(c);
        }
        Ok(out)
    }

    fn decode(&self, c: &[Int]) -> GradedMap {
        let n0 = self.pieces[0].group.gens();
        let comps = [self.pieces[0].decode(&c[..n0]), self.pieces[1].decode(&c[n0..])];
        GradedMap::from_parts(self.source.clone(), self.target.clone(), self.degree, comps)
            .expect("decoded maps are homomorphisms")
    }
}

/// Graded `Hom(G, H)`: parity `d` collects the degree-`d` maps.
#[derive(Clone, Debug)]
pub struct GradedHom {
    pub spaces: [HomSpace; 2],
}

impl GradedHom {
    pub fn group(&self) -> GradedGroup {
        GradedGroup::new(self.spaces[0].group.clone(), self.spaces[1].group.clone())
    }

    pub fn decode(&self, p: Parity, c: &[Int]) -> GradedMap {
        self.spaces[p.index()].decode(c)
    }
}

/// Graded `Ext(G, H)`: parity `d` collects the degree-`d` classes.
#[derive(Clone, Debug)]
pub struct GradedExt {
    pub spaces: [ExtSpace; 2],
}

impl GradedExt {
    pub fn group(&self) -> GradedGroup {
        GradedGroup::new(self.spaces[0].group.clone(), self.spaces[1].group.clone())
    }

    pub fn decode(&self, p: Parity, c: &[Int]) -> ExtElement {
        self.spaces[p.index()].decode(c)
    }
}

pub fn hom_group(g: &GradedGroup, h: &GradedGroup) -> GradedHom {
    GradedHom {
        spaces: [HomSpace::new(g, h, 0), HomSpace::new(g, h, 1)],
    }
}

pub fn ext_group(g: &GradedGroup, h: &GradedGroup) -> GradedExt {
    GradedExt {
        spaces: [ExtSpace::new(g, h, 0), ExtSpace::new(g, h, 1)],
    }
}

/// `h ∘ e` for `e ∈ Ext(G, H)` and `h: H → H'`.
pub fn push_ext(e: &ExtElement, h: &GradedMap) -> Result<ExtElement> {
    if h.source().gens() != e.target.gens() {
        return Err(Error::Dimension("push along a map with the wrong source".into()));
    }
    let vectors = Parity::BOTH.map(|p| h.component(p.shift(e.degree)).mul(&e.vectors[p.index()]));
    Ok(ExtElement {
        source: e.source.clone(),
        target: h.target().clone(),
        degree: (e.degree + h.degree()) % 2,
        vectors,
    })
}

/// Chain map between canonical resolutions covering `g`: the matrix `g₁`
/// with `B·g₁ = g₀·B'` for source parity `p` of `g`.
pub fn canonical_lift(g: &GradedMap, p: Parity) -> Result<IntMatrix> {
    let q = p.shift(g.degree());
    let b = g.target().part(q).relation_basis();
    let bp = g.source().part(p).relation_basis();
    SmithSolver::new(b)
        .solve_matrix(&g.component(p).mul(bp))?
        .ok_or_else(|| Error::invalid(format!("{} component", p.name()), "map is not relation-compatible"))
}

/// `e ∘ g` for `e ∈ Ext(G, H)` and `g: G' → G`.
pub fn pull_ext(e: &ExtElement, g: &GradedMap) -> Result<ExtElement> {
    if g.target().gens() != e.source.gens() {
        return Err(Error::Dimension("pull along a map with the wrong target".into()));
    }
    let mut vectors = Vec::with_capacity(2);
    for p in Parity::BOTH {
        let g1 = canonical_lift(g, p)?;
        vectors.push(e.vectors[p.shift(g.degree()).index()].mul(&g1));
    }
    let [ve, vo]: [IntMatrix; 2] = vectors.try_into().unwrap();
    Ok(ExtElement {
        source: g.source().clone(),
        target: e.target.clone(),
        degree: (e.degree + g.degree()) % 2,
        vectors: [ve, vo],
    })
}

/// A length-1 free resolution `0 → F₁ →d₁ F₀ →d₀ G → 0`, parity by parity.
#[derive(Clone, Debug)]
pub struct FreeResolution {
    pub group: GradedGroup,
    /// `gens(G_p) × rank(F₀)` for each parity.
    pub d0: [IntMatrix; 2],
    /// `rank(F₀) × rank(F₁)` for each parity.
    pub d1: [IntMatrix; 2],
}

impl FreeResolution {
    pub fn canonical(g: &GradedGroup) -> Self {
        FreeResolution {
            group: g.clone(),
            d0: Parity::BOTH.map(|p| Matrix::identity(g.part(p).gens())),
            d1: Parity::BOTH.map(|p| g.part(p).relation_basis().clone()),
        }
    }

    /// Checks exactness at all three spots.
    pub fn verify(&self) -> Result<()> {
        for p in Parity::BOTH {
            let g = self.group.part(p);
            let (d0, d1) = (&self.d0[p.index()], &self.d1[p.index()]);
            let loc = |what: &str| format!("{} part, {what}", p.name());
            if d0.rows() != g.gens() || d1.rows() != d0.cols() {
                return Err(Error::Dimension(loc("resolution shapes")));
            }
            if !g.with_relations(d0).is_trivial() {
                return Err(Error::precondition(loc("F0 → G"), "not surjective"));
            }
            if !g.columns_vanish(&d0.mul(d1)) {
                return Err(Error::precondition(loc("F1 → F0 → G"), "composite is not zero"));
            }
            if crate::smith::smith_normal_form(d1).rank != d1.cols() {
                return Err(Error::precondition(loc("F1 → F0"), "not injective"));
            }
            let pre = preimage_lattice(d0, g);
            if SmithSolver::new(d1).solve_matrix(&pre)?.is_none() {
                return Err(Error::precondition(
                    loc("F0"),
                    "kernel of F0 → G exceeds the image of F1",
                ));
            }
        }
        Ok(())
    }

    /// Converts a class given by values on `F₁` into canonical coordinates.
    pub fn to_canonical(&self, target: &GradedGroup, degree: u8, values: &[IntMatrix; 2]) -> Result<ExtElement> {
        let mut vectors = Vec::with_capacity(2);
        for p in Parity::BOTH {
            let g = self.group.part(p);
            let (d0, d1) = (&self.d0[p.index()], &self.d1[p.index()]);
            let c0 = SmithSolver::new(&d0.hstack(g.rels()))
                .solve_matrix(&Matrix::identity(g.gens()))?
                .ok_or_else(|| Error::precondition(p.name(), "resolution does not cover the group"))?
                .block(0, d0.cols(), 0, g.gens());
            let c1 = SmithSolver::new(d1)
                .solve_matrix(&c0.mul(g.relation_basis()))?
                .ok_or_else(|| Error::precondition(p.name(), "resolution is not exact"))?;
            vectors.push(values[p.index()].mul(&c1));
        }
        let [e, o]: [IntMatrix; 2] = vectors.try_into().unwrap();
        ExtElement::new(self.group.clone(), target.clone(), degree, [e, o])
    }

    /// Converts a canonical class into values on `F₁`.
    pub fn from_canonical(&self, e: &ExtElement) -> Result<[IntMatrix; 2]> {
        let mut out = Vec::with_capacity(2);
        for p in Parity::BOTH {
            let (d0, d1) = (&self.d0[p.index()], &self.d1[p.index()]);
            let c1 = SmithSolver::new(self.group.part(p).relation_basis())
                .solve_matrix(&d0.mul(d1))?
                .ok_or_else(|| Error::precondition(p.name(), "resolution is not a resolution of this group"))?;
            out.push(e.vectors[p.index()].mul(&c1));
        }
        Ok(out.try_into().unwrap())
    }
}

/// Re-encodes a class given with respect to `res` in canonical coordinates,
/// after checking that `res` is a resolution.
pub fn transport_ext(
    res: &FreeResolution,
    target: &GradedGroup,
    degree: u8,
    values: &[IntMatrix; 2],
) -> Result<ExtElement> {
    res.verify()?;
    res.to_canonical(target, degree, values)
}

/// Checks that `A →ι E →π C` is a short exact sequence.
pub fn check_short_exact(iota: &GradedMap, pi: &GradedMap) -> Result<()> {
    if iota.target().gens() != pi.source().gens() {
        return Err(Error::Dimension("ι and π are not composable".into()));
    }
    if !iota.is_injective() {
        return Err(Error::precondition("ι", "not injective"));
    }
    if !pi.is_surjective() {
        return Err(Error::precondition("π", "not surjective"));
    }
    if !pi.compose(iota)?.is_zero() {
        return Err(Error::precondition("π∘ι", "not zero"));
    }
    let (_, k) = kernel_of(pi);
    if lift_through(&k, iota).is_none() {
        return Err(Error::precondition("ker π", "not contained in the image of ι"));
    }
    Ok(())
}

/// Class of the extension `A ↣ E ↠ C` in `Ext(C, A)`, of degree `deg ι + deg π`.
pub fn extension_class(iota: &GradedMap, pi: &GradedMap) -> Result<ExtElement> {
    check_short_exact(iota, pi)?;
    let c = pi.target();
    let a = iota.source();
    let degree = (iota.degree() + pi.degree()) % 2;
    let mut vectors = Vec::with_capacity(2);
    for p in Parity::BOTH {
        let q = p.shift(pi.degree());
        let s = q.shift(iota.degree());
        let cp = c.part(p);
        let pim = pi.component(q);
        let lift = SmithSolver::new(&pim.hstack(cp.rels()))
            .solve_matrix(&Matrix::identity(cp.gens()))?
            .expect("π is surjective")
            .block(0, pim.cols(), 0, cp.gens());
        let lb = lift.mul(cp.relation_basis());
        let im = iota.component(s);
        let x = SmithSolver::new(&im.hstack(iota.target().part(q).rels()))
            .solve_matrix(&lb)?
            .expect("kernel of π lies in the image of ι")
            .block(0, im.cols(), 0, lb.cols());
        vectors.push(x);
    }
    let [e, o]: [IntMatrix; 2] = vectors.try_into().unwrap();
    ExtElement::new(c.clone(), a.clone(), degree, [e, o])
}

/// The extension `A ↣ E ↠ C` with class `e`, built as a pushout of the
/// canonical resolution of `C`. `ι` has degree 0 and `π` the degree of `e`.
pub fn extension_from_class(e: &ExtElement) -> (GradedMap, GradedMap) {
    let (a, c, d) = (&e.target, &e.source, e.degree);
    let mut parts = Vec::new();
    let mut iota = Vec::new();
    let mut pi = Vec::new();
    for s in Parity::BOTH {
        let p = s.shift(d);
        let (ap, cp) = (a.part(s), c.part(p));
        let x = &e.vectors[p.index()];
        let b = cp.relation_basis();
        let top = ap.rels().hstack(&x.neg());
        let bottom = Matrix::zeros(cp.gens(), ap.rels().cols()).hstack(b);
        parts.push(AbGroup::new(ap.gens() + cp.gens(), top.vstack(&bottom)));
        iota.push(Matrix::identity(ap.gens()).vstack(&Matrix::zeros(cp.gens(), ap.gens())));
        pi.push((
            s,
            Matrix::zeros(cp.gens(), ap.gens()).hstack(&Matrix::identity(cp.gens())),
        ));
    }
    let eg = GradedGroup::new(parts[0].clone(), parts[1].clone());
    let [ie, io]: [IntMatrix; 2] = iota.try_into().unwrap();
    let iota = GradedMap::new(a.clone(), eg.clone(), 0, ie, io).expect("inclusion is compatible");
    let pi_comps = [pi[0].1.clone(), pi[1].1.clone()];
    let pi = GradedMap::from_parts(eg, c.clone(), d, pi_comps).expect("projection is compatible");
    (iota, pi)
}
