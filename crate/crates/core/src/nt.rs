//! Filtrated K-theory over the totally ordered space `1 ← 2 ← ⋯ ← n`.
//!
//! Slots are indexed by intervals `[a,b]`. The ring of natural
//! transformations is generated by
//! `i: [a+1,b] → [a,b]`, `r: [a,b+1] → [a,b]` and the odd `δ: [1,a−1] → [a,n]`.
//! A nonzero transformation `τ_{[a,b]}^{[c,d]}` is unique; it is even when
//! `c ≤ a ≤ d ≤ b` and odd when `a+1 ≤ c ≤ b+1 ≤ d`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ext::{extension_class, pull_ext, push_ext, ExtElement, ExtSpace, FreeResolution, Space};
use crate::group::{AbGroup, GradedGroup, Parity};
use crate::map::{
    ab_kernel, block_map, cokernel_of, descend, homology_at, kernel_of, lift_through, reindex, GradedMap,
};
use crate::matrix::Matrix;
use crate::poset::{obstruction_x, Diagram, DiagramClass, UniquePathSpace, XObject};
use crate::scalar::Int;
use crate::solve::SmithSolver;
use crate::IntMatrix;

/// A nonempty interval `[a,b]` with `1 ≤ a ≤ b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub a: usize,
    pub b: usize,
}

impl Interval {
    pub fn new(n: usize, a: usize, b: usize) -> Result<Interval> {
        if a < 1 || a > b || b > n {
            return Err(Error::invalid(
                format!("[{a},{b}]"),
                format!("not an interval in [1,{n}]"),
            ));
        }
        Ok(Interval { a, b })
    }

    /// `[a,b]`, or `None` for the empty interval `[b+1,b]`.
    pub fn or_empty(n: usize, a: usize, b: usize) -> Result<Option<Interval>> {
        if a == b + 1 && b <= n {
            return Ok(None);
        }
        Interval::new(n, a, b).map(Some)
    }

    /// All intervals in `[1,n]`, ordered by `a` then `b`.
    pub fn all(n: usize) -> Vec<Interval> {
        (1..=n).flat_map(|a| (a..=n).map(move |b| Interval { a, b })).collect()
    }

    pub fn check(&self, n: usize) -> Result<()> {
        Interval::new(n, self.a, self.b).map(|_| ())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.a, self.b)
    }
}

impl FromStr for Interval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Interval> {
        let bad = || Error::invalid(s, "expected an interval written [a,b]");
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let a = a.trim().parse().map_err(|_| bad())?;
        let b = b.trim().parse().map_err(|_| bad())?;
        if a < 1 || a > b {
            return Err(bad());
        }
        Ok(Interval { a, b })
    }
}

/// Parity of `τ_{src}^{dst}`, or `Zero`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tau {
    Even,
    Odd,
    Zero,
}

impl Tau {
    pub fn parity(self) -> Option<Parity> {
        match self {
            Tau::Even => Some(Parity::Even),
            Tau::Odd => Some(Parity::Odd),
            Tau::Zero => None,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Tau::Zero
    }
}

fn tau_of(src: Interval, dst: Interval) -> Tau {
    let (a, b, c, d) = (src.a, src.b, dst.a, dst.b);
    if c <= a && a <= d && d <= b {
        Tau::Even
    } else if a < c && c <= b + 1 && b < d {
        Tau::Odd
    } else {
        Tau::Zero
    }
}

fn composes(src: Interval, mid: Interval, dst: Interval) -> bool {
    let (a, b, e, g, c, d) = (src.a, src.b, mid.a, mid.b, dst.a, dst.b);
    (c <= e && e <= a && a <= d && d <= g && g <= b)
        || (e <= a && a < c && c <= g + 1 && g <= b && b < d)
        || (a < c && c <= e && e <= b + 1 && b < d && d <= g)
}

pub fn tau(n: usize, src: Interval, dst: Interval) -> Result<Tau> {
    src.check(n)?;
    dst.check(n)?;
    Ok(tau_of(src, dst))
}

/// Whether `τ_{mid}^{dst} ∘ τ_{src}^{mid} = τ_{src}^{dst} ≠ 0`.
pub fn tau_compose(n: usize, src: Interval, mid: Interval, dst: Interval) -> Result<bool> {
    src.check(n)?;
    mid.check(n)?;
    dst.check(n)?;
    Ok(composes(src, mid, dst))
}

/// The three kinds of generating transformations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    I,
    R,
    Delta,
}

impl Gen {
    pub const ALL: [Gen; 3] = [Gen::I, Gen::R, Gen::Delta];

    pub fn name(self) -> &'static str {
        match self {
            Gen::I => "i",
            Gen::R => "r",
            Gen::Delta => "delta",
        }
    }

    pub fn degree(self) -> u8 {
        match self {
            Gen::Delta => 1,
            _ => 0,
        }
    }

    /// The target slot of the generator leaving `src`, if there is one.
    pub fn target(self, n: usize, src: Interval) -> Option<Interval> {
        match self {
            Gen::I if src.a >= 2 => Some(Interval { a: src.a - 1, b: src.b }),
            Gen::R if src.b > src.a => Some(Interval { a: src.a, b: src.b - 1 }),
            Gen::Delta if src.a == 1 && src.b < n => Some(Interval { a: src.b + 1, b: n }),
            _ => None,
        }
    }

    /// Slots with an outgoing generator of this kind.
    pub fn sources(self, n: usize) -> Vec<Interval> {
        Interval::all(n)
            .into_iter()
            .filter(|&s| self.target(n, s).is_some())
            .collect()
    }
}

/// One generator applied at a given source slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub kind: Gen,
    pub src: Interval,
}

/// A module over the ring of natural transformations.
#[derive(Clone, Debug)]
pub struct NTModule {
    n: usize,
    slots: BTreeMap<Interval, GradedGroup>,
    maps: [BTreeMap<Interval, GradedMap>; 3],
}

fn gen_index(g: Gen) -> usize {
    match g {
        Gen::I => 0,
        Gen::R => 1,
        Gen::Delta => 2,
    }
}

impl NTModule {
    /// Checks that every slot and generator is present with matching shapes
    /// and that every generator map is well defined. Relations are checked
    /// separately by [`nt_validate`].
    pub fn new(
        n: usize,
        slots: BTreeMap<Interval, GradedGroup>,
        i: BTreeMap<Interval, GradedMap>,
        r: BTreeMap<Interval, GradedMap>,
        delta: BTreeMap<Interval, GradedMap>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "the space needs at least one point"));
        }
        let all = Interval::all(n);
        for s in slots.keys() {
            s.check(n)?;
        }
        if let Some(missing) = all.iter().find(|s| !slots.contains_key(s)) {
            return Err(Error::invalid(missing.to_string(), "slot missing"));
        }
        let mut maps = [i, r, delta];
        for g in Gen::ALL {
            let table = &mut maps[gen_index(g)];
            let sources = g.sources(n);
            if let Some(extra) = table.keys().find(|s| !sources.contains(s)) {
                return Err(Error::invalid(format!("{}{extra}", g.name()), "no such generator"));
            }
            for s in sources {
                let loc = format!("{}{s}", g.name());
                let t = g.target(n, s).unwrap();
                let f = table.get(&s).ok_or_else(|| Error::invalid(&loc, "generator missing"))?;
                if f.degree() != g.degree() {
                    return Err(Error::invalid(
                        &loc,
                        format!("generator must have degree {}", g.degree()),
                    ));
                }
                if f.source().gens() != slots[&s].gens() || f.target().gens() != slots[&t].gens() {
                    return Err(Error::invalid(&loc, format!("shape does not match slots {s} → {t}")));
                }
                let checked = f
                    .with_groups(slots[&s].clone(), slots[&t].clone())
                    .map_err(|e| Error::invalid(&loc, format!("not well defined: {e}")))?;
                table.insert(s, checked);
            }
        }
        Ok(NTModule { n, slots, maps })
    }

    pub fn zero(n: usize) -> Self {
        let slots: BTreeMap<_, _> = Interval::all(n).into_iter().map(|s| (s, GradedGroup::zero())).collect();
        let z = GradedGroup::zero();
        let maps = Gen::ALL.map(|g| {
            g.sources(n)
                .into_iter()
                .map(|s| (s, GradedMap::zero(&z, &z, g.degree())))
                .collect()
        });
        NTModule { n, slots, maps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn slot(&self, s: Interval) -> &GradedGroup {
        &self.slots[&s]
    }

    pub fn slots(&self) -> &BTreeMap<Interval, GradedGroup> {
        &self.slots
    }

    /// The generator of kind `g` leaving `src`.
    pub fn gen(&self, g: Gen, src: Interval) -> Option<&GradedMap> {
        self.maps[gen_index(g)].get(&src)
    }

    pub fn gens(&self, g: Gen) -> &BTreeMap<Interval, GradedMap> {
        &self.maps[gen_index(g)]
    }

    /// The zero-convention aware generator: the zero map when `src` is empty.
    fn gen_or_zero(&self, g: Gen, src: Option<Interval>, dst: Interval) -> GradedMap {
        match src {
            Some(s) => self.gen(g, s).expect("generator present").clone(),
            None => GradedMap::zero(&GradedGroup::zero(), self.slot(dst), g.degree()),
        }
    }
}

/// A relation or exactness failure, with its location.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NtViolation {
    pub invariant: String,
    pub location: String,
}

impl fmt::Display for NtViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated at {}", self.invariant, self.location)
    }
}

fn violation(invariant: impl Into<String>, location: impl Into<String>) -> NtViolation {
    NtViolation {
        invariant: invariant.into(),
        location: location.into(),
    }
}

/// Checks `r∘i = i∘r`, `i∘δ = δ∘r` and `δ∘r = 0`, with the zero convention.
pub fn nt_validate(m: &NTModule) -> std::result::Result<(), NtViolation> {
    let n = m.n;
    for g in Gen::ALL {
        for (s, f) in m.gens(g) {
            let t = g.target(n, *s).unwrap();
            if f.clone().with_groups(m.slot(*s).clone(), m.slot(t).clone()).is_err() {
                return Err(violation("well-defined generator", format!("{}{s}", g.name())));
            }
        }
    }
    // (R1): the square [a+1,b+1] → [a,b+1], [a+1,b] → [a,b].
    for a in 1..n {
        for b in a..n {
            let corner = Interval { a: a + 1, b: b + 1 };
            let left = m
                .gen(Gen::R, Interval { a, b: b + 1 })
                .unwrap()
                .compose(m.gen(Gen::I, corner).unwrap());
            let mid = Interval::or_empty(n, a + 1, b).unwrap();
            let dst = Interval { a, b };
            let right = match mid {
                Some(mid) => m.gen(Gen::I, mid).unwrap().compose(m.gen(Gen::R, corner).unwrap()),
                None => Ok(GradedMap::zero(m.slot(corner), m.slot(dst), 0)),
            };
            if !left.and_then(|l| Ok(l.equals(&right?))).unwrap_or(false) {
                return Err(violation("(R1) r∘i = i∘r", format!("{corner} → {dst}")));
            }
        }
    }
    // (R2), (R3): i∘δ_{[1,b]} = δ_{[1,b−1]}∘r on M[1,b], either side zero when empty.
    for b in 1..=n {
        let src = Interval { a: 1, b };
        let dst = Interval { a: b, b: n };
        let left = if b < n {
            m.gen(Gen::I, Interval { a: b + 1, b: n })
                .unwrap()
                .compose(m.gen(Gen::Delta, src).unwrap())
        } else {
            Ok(GradedMap::zero(m.slot(src), m.slot(dst), 1))
        };
        let right = if b > 1 {
            m.gen(Gen::Delta, Interval { a: 1, b: b - 1 })
                .unwrap()
                .compose(m.gen(Gen::R, src).unwrap())
        } else {
            Ok(GradedMap::zero(m.slot(src), m.slot(dst), 1))
        };
        let name = if b == n {
            "(R3) δ∘r = 0"
        } else {
            "(R2) i∘δ = δ∘r"
        };
        if !left.and_then(|l| Ok(l.equals(&right?))).unwrap_or(false) {
            return Err(violation(name, format!("{src} → {dst}")));
        }
    }
    Ok(())
}

/// The generator path used to evaluate `τ_{src}^{dst}`: the `i`-chain, then
/// `δ` when odd, then the `r`-chain, then (odd case) the remaining `i`-chain.
pub fn canonical_path(n: usize, src: Interval, dst: Interval) -> Result<Vec<Step>> {
    let mut path = Vec::new();
    let mut at = src;
    let push = |path: &mut Vec<Step>, at: &mut Interval, kind: Gen| {
        path.push(Step { kind, src: *at });
        *at = kind.target(n, *at).expect("step stays inside the diagram");
    };
    match tau(n, src, dst)? {
        Tau::Zero => {
            return Err(Error::precondition(
                format!("τ {src} → {dst}"),
                "the transformation is zero",
            ))
        }
        Tau::Even => {
            while at.a > dst.a {
                push(&mut path, &mut at, Gen::I);
            }
            while at.b > dst.b {
                push(&mut path, &mut at, Gen::R);
            }
        }
        Tau::Odd => {
            while at.a > 1 {
                push(&mut path, &mut at, Gen::I);
            }
            push(&mut path, &mut at, Gen::Delta);
            while at.b > dst.b {
                push(&mut path, &mut at, Gen::R);
            }
            while at.a > dst.a {
                push(&mut path, &mut at, Gen::I);
            }
        }
    }
    Ok(path)
}

/// Composite of the generators along `path`, starting at `src`.
pub fn evaluate_path(m: &NTModule, src: Interval, path: &[Step]) -> Result<GradedMap> {
    let mut f = GradedMap::identity(m.slot(src));
    let mut at = src;
    for step in path {
        if step.src != at {
            return Err(Error::invalid(
                format!("{}{}", step.kind.name(), step.src),
                format!("path is at {at}"),
            ));
        }
        let g = m
            .gen(step.kind, at)
            .ok_or_else(|| Error::invalid(format!("{}{at}", step.kind.name()), "no such generator"))?;
        f = g.compose(&f)?;
        at = step.kind.target(m.n, at).unwrap();
    }
    Ok(f)
}

/// The map `M[src] → M[dst]` of `τ_{src}^{dst}`.
pub fn tau_apply(m: &NTModule, src: Interval, dst: Interval) -> Result<GradedMap> {
    evaluate_path(m, src, &canonical_path(m.n, src, dst)?)
}

/// Checks exactness of `M[b,c] → M[a,c] → M[a,b−1] → M[b,c]` for all `a < b ≤ c`.
pub fn check_exact(m: &NTModule) -> std::result::Result<(), NtViolation> {
    nt_validate(m)?;
    let n = m.n;
    for a in 1..=n {
        for b in a + 1..=n {
            for c in b..=n {
                let (x, y, z) = (Interval { a: b, b: c }, Interval { a, b: c }, Interval { a, b: b - 1 });
                let u = tau_apply(m, x, y).expect("even transformation");
                let v = tau_apply(m, y, z).expect("even transformation");
                let w = tau_apply(m, z, x).expect("odd transformation");
                for (f, g, at) in [(&w, &u, x), (&u, &v, y), (&v, &w, z)] {
                    let exact = match homology_at(f, g) {
                        Ok(h) => h.is_trivial(),
                        Err(_) => false,
                    };
                    if !exact {
                        return Err(violation(
                            "six-term exactness",
                            format!("sequence a={a}, b={b}, c={c} at M{at}"),
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Quotient of `target` by the images of `maps`, which may have any degree.
fn cokernel_of_images(target: &GradedGroup, maps: &[GradedMap]) -> (GradedGroup, GradedMap) {
    let mut parts = Vec::new();
    let mut proj = Vec::new();
    for q in Parity::BOTH {
        let mut rel = Matrix::zeros(target.part(q).gens(), 0);
        for f in maps {
            rel = rel.hstack(f.component(q.shift(f.degree())));
        }
        let (g, p) = crate::map::ab_cokernel(&rel, target.part(q));
        parts.push(g);
        proj.push(p);
    }
    let c = GradedGroup::new(parts[0].clone(), parts[1].clone());
    let [e, o]: [IntMatrix; 2] = proj.try_into().unwrap();
    let p = GradedMap::new_unchecked(target.clone(), c.clone(), 0, e, o).expect("projection shape");
    (c, p)
}

/// The two shortest transformations into `s`: `i` and either `r` or `δ`.
fn incoming(m: &NTModule, s: Interval) -> Vec<GradedMap> {
    let n = m.n;
    let mut maps = Vec::new();
    let i_src = Interval::or_empty(n, s.a + 1, s.b).unwrap();
    maps.push(m.gen_or_zero(Gen::I, i_src, s));
    if s.b < n {
        maps.push(m.gen(Gen::R, Interval { a: s.a, b: s.b + 1 }).unwrap().clone());
    } else if s.a > 1 {
        maps.push(m.gen(Gen::Delta, Interval { a: 1, b: s.a - 1 }).unwrap().clone());
    }
    maps
}

/// `M[a,b]_ss`: the quotient by the images of all proper transformations into `[a,b]`.
pub fn ss_quotient(m: &NTModule, s: Interval) -> Result<(GradedGroup, GradedMap)> {
    s.check(m.n)?;
    Ok(cokernel_of_images(m.slot(s), &incoming(m, s)))
}

/// Summands `(X, parity of τ_X^Z)` of a projective slot `⊕_{X→Z} Σ^τ Q[X]`.
pub fn pattern_summands(n: usize, z: Interval) -> Vec<(Interval, Parity)> {
    Interval::all(n)
        .into_iter()
        .filter_map(|x| tau_of(x, z).parity().map(|p| (x, p)))
        .collect()
}

fn pattern_groups(q: &BTreeMap<Interval, GradedGroup>, summands: &[(Interval, Parity)]) -> Vec<GradedGroup> {
    summands.iter().map(|(x, p)| q[x].shift(p.index() as u8)).collect()
}

/// The projective module `⊕_X R_X ⊗ Q[X]`, whose slot `Z` is `⊕_{X→Z} Σ^τ Q[X]`.
pub fn projective_module(n: usize, q: &BTreeMap<Interval, GradedGroup>) -> Result<NTModule> {
    let all = Interval::all(n);
    if let Some(missing) = all.iter().find(|s| !q.contains_key(s)) {
        return Err(Error::invalid(missing.to_string(), "generator group missing"));
    }
    let slots: BTreeMap<_, _> = all
        .iter()
        .map(|&z| {
            (
                z,
                GradedGroup::direct_sum(&pattern_groups(q, &pattern_summands(n, z)).iter().collect::<Vec<_>>()),
            )
        })
        .collect();
    let mut tables: [BTreeMap<Interval, GradedMap>; 3] = Default::default();
    for g in Gen::ALL {
        for s in g.sources(n) {
            let t = g.target(n, s).unwrap();
            let (src, dst) = (pattern_summands(n, s), pattern_summands(n, t));
            let f = block_map(
                &pattern_groups(q, &src),
                &pattern_groups(q, &dst),
                g.degree(),
                |i, j| {
                    let ((xi, pi), (xj, pj)) = (dst[i], src[j]);
                    (xi == xj && composes(xj, s, t)).then(|| reindex(&GradedMap::identity(&q[&xj]), pj, pi))
                },
            )?;
            tables[gen_index(g)].insert(s, f);
        }
    }
    let [i, r, d] = tables;
    NTModule::new(n, slots, i, r, d)
}

/// `FK(P₁) → FK(P₀)` from components `φ_Y^X: Q₁[Y] → Q₀[X]`, evaluated at slot `z`.
pub(crate) fn pattern_map(
    n: usize,
    q0: &BTreeMap<Interval, GradedGroup>,
    q1: &BTreeMap<Interval, GradedGroup>,
    phi: &BTreeMap<(Interval, Interval), GradedMap>,
    z: Interval,
) -> Result<GradedMap> {
    let s = pattern_summands(n, z);
    for &(x, _) in &s {
        for &(y, _) in &s {
            if composes(x, y, z) && !phi.contains_key(&(y, x)) {
                return Err(Error::invalid(format!("φ {y} → {x}"), "component missing"));
            }
        }
    }
    let f = block_map(&pattern_groups(q1, &s), &pattern_groups(q0, &s), 0, |i, j| {
        let ((x, px), (y, py)) = (s[i], s[j]);
        composes(x, y, z).then(|| reindex(&phi[&(y, x)], py, px))
    })?;
    Ok(f)
}

/// A length-one projective resolution of an exact module.
///
/// `phi[(Y, X)]` is the component `Q₁[Y] → Q₀[X]` for `X → Y`, of the parity
/// of `τ_X^Y`.
#[derive(Clone, Debug)]
pub struct NTResolution {
    pub n: usize,
    pub q0: BTreeMap<Interval, GradedGroup>,
    pub q1: BTreeMap<Interval, GradedGroup>,
    pub f: BTreeMap<Interval, GradedMap>,
    pub phi: BTreeMap<(Interval, Interval), GradedMap>,
}

fn free_like(g: &GradedGroup) -> GradedGroup {
    GradedGroup::new(AbGroup::free(g.even().gens()), AbGroup::free(g.odd().gens()))
}

/// Submodule given by slotwise injections into `m`.
fn submodule(m: &NTModule, incl: &BTreeMap<Interval, GradedMap>) -> Result<NTModule> {
    let n = m.n;
    let slots = incl.iter().map(|(s, f)| (*s, f.source().clone())).collect();
    let mut tables: [BTreeMap<Interval, GradedMap>; 3] = Default::default();
    for g in Gen::ALL {
        for s in g.sources(n) {
            let t = g.target(n, s).unwrap();
            let f = m.gen(g, s).unwrap().compose(&incl[&s])?;
            let lifted = lift_through(&f, &incl[&t])
                .ok_or_else(|| Error::precondition(format!("{}{s}", g.name()), "submodule is not closed"))?;
            tables[gen_index(g)].insert(s, lifted);
        }
    }
    let [i, r, d] = tables;
    NTModule::new(n, slots, i, r, d)
}

/// Quotient module given by slotwise surjections out of `m`.
pub(crate) fn quotient_module(m: &NTModule, proj: &BTreeMap<Interval, GradedMap>) -> Result<NTModule> {
    let n = m.n;
    let slots = proj.iter().map(|(s, f)| (*s, f.target().clone())).collect();
    let mut tables: [BTreeMap<Interval, GradedMap>; 3] = Default::default();
    for g in Gen::ALL {
        for s in g.sources(n) {
            let t = g.target(n, s).unwrap();
            let f = proj[&t].compose(m.gen(g, s).unwrap())?;
            tables[gen_index(g)].insert(s, descend(&f, &proj[&s])?);
        }
    }
    let [i, r, d] = tables;
    NTModule::new(n, slots, i, r, d)
}

/// The map `FK(P₀)[z] → M[z]` with blocks `τ_X^z ∘ f[X]`.
fn cover_map(
    m: &NTModule,
    q0: &BTreeMap<Interval, GradedGroup>,
    f: &BTreeMap<Interval, GradedMap>,
    z: Interval,
) -> Result<GradedMap> {
    let s0 = pattern_summands(m.n, z);
    let blocks: Vec<GradedMap> = s0
        .iter()
        .map(|&(x, p)| Ok(reindex(&tau_apply(m, x, z)?.compose(&f[&x])?, p, Parity::Even)))
        .collect::<Result<_>>()?;
    block_map(&pattern_groups(q0, &s0), std::slice::from_ref(m.slot(z)), 0, |_, j| {
        Some(blocks[j].clone())
    })
}

/// Builds `Q₀`, `f`, `Q₁ = N_ss` and the sections `φ` for an exact module.
pub fn build_resolution(m: &NTModule) -> Result<NTResolution> {
    check_exact(m).map_err(|v| Error::precondition(v.location.clone(), v.to_string()))?;
    let n = m.n;
    let all = Interval::all(n);
    let mut q0 = BTreeMap::new();
    let mut f = BTreeMap::new();
    for &s in &all {
        let (ss, proj) = ss_quotient(m, s)?;
        let q = free_like(&ss);
        let d0 = GradedMap::new_unchecked(
            q.clone(),
            ss.clone(),
            0,
            Matrix::identity(q.even().gens()),
            Matrix::identity(q.odd().gens()),
        )?;
        let lift = lift_through(&d0, &proj)
            .ok_or_else(|| Error::precondition(s.to_string(), "cannot lift the semisimple quotient"))?;
        q0.insert(s, q);
        f.insert(s, lift);
    }
    let p0 = projective_module(n, &q0)?;
    let mut incl = BTreeMap::new();
    for &z in &all {
        let cover = cover_map(m, &q0, &f, z)?.with_groups(p0.slot(z).clone(), m.slot(z).clone())?;
        if !cover.is_surjective() {
            return Err(Error::precondition(
                z.to_string(),
                "the projective cover is not surjective",
            ));
        }
        incl.insert(z, kernel_of(&cover).1);
    }
    let kernel = submodule(&p0, &incl)?;
    let mut q1 = BTreeMap::new();
    let mut phi = BTreeMap::new();
    for &y in &all {
        let (ss, proj) = ss_quotient(&kernel, y)?;
        if !ss.is_free() {
            return Err(Error::precondition(
                y.to_string(),
                format!("semisimple part of the kernel is not free: {ss}"),
            ));
        }
        let id = GradedMap::identity(&ss);
        let section =
            lift_through(&id, &proj).ok_or_else(|| Error::precondition(y.to_string(), "section does not lift"))?;
        let into_p0 = incl[&y].compose(&section)?;
        let mut offsets = [0usize; 2];
        for (x, p) in pattern_summands(n, y) {
            let shifted = q0[&x].shift(p.index() as u8);
            let comps = Parity::BOTH.map(|par| {
                into_p0
                    .component(par)
                    .block(offsets[par.index()], shifted.part(par).gens(), 0, ss.part(par).gens())
            });
            for par in Parity::BOTH {
                offsets[par.index()] += shifted.part(par).gens();
            }
            let piece = GradedMap::from_parts(ss.clone(), shifted, 0, comps)?;
            phi.insert(
                (y, x),
                reindex(&piece, Parity::Even, p).with_groups(ss.clone(), q0[&x].clone())?,
            );
        }
        q1.insert(y, ss);
    }
    Ok(NTResolution { n, q0, q1, f, phi })
}

/// The free resolution `⊕ Q₁ → ⊕ Q₀ → M[z]` assembled from `res`.
pub fn slot_resolution(m: &NTModule, res: &NTResolution, z: Interval) -> Result<FreeResolution> {
    let d1 = pattern_map(m.n, &res.q0, &res.q1, &res.phi, z)?;
    let d0 = cover_map(m, &res.q0, &res.f, z)?;
    Ok(FreeResolution {
        group: m.slot(z).clone(),
        d0: d0.components().clone(),
        d1: d1.components().clone(),
    })
}

fn check_resolution_shape(m: &NTModule, res: &NTResolution) -> std::result::Result<(), NtViolation> {
    let n = m.n;
    if res.n != n {
        return Err(violation(
            "resolution size",
            format!("n = {} but module has n = {n}", res.n),
        ));
    }
    for s in Interval::all(n) {
        let (Some(q0), Some(q1), Some(f)) = (res.q0.get(&s), res.q1.get(&s), res.f.get(&s)) else {
            return Err(violation("resolution data present", s.to_string()));
        };
        if !q0.is_free() || !q1.is_free() {
            return Err(violation("free Q0 and Q1", s.to_string()));
        }
        if f.degree() != 0 || f.source().gens() != q0.gens() || f.target().gens() != m.slot(s).gens() {
            return Err(violation("f: Q0 → M of degree 0", s.to_string()));
        }
        if f.with_groups(q0.clone(), m.slot(s).clone()).is_err() {
            return Err(violation("f well defined", s.to_string()));
        }
        for x in Interval::all(n) {
            let t = tau_of(x, s);
            match (t.parity(), res.phi.get(&(s, x))) {
                (None, None) => {}
                (None, Some(_)) => return Err(violation("φ only on composable pairs", format!("{s} → {x}"))),
                (Some(_), None) => return Err(violation("φ component present", format!("{s} → {x}"))),
                (Some(p), Some(phi)) => {
                    if phi.degree() as usize != p.index()
                        || phi.source().gens() != q1.gens()
                        || phi.target().gens() != res.q0[&x].gens()
                    {
                        return Err(violation("φ has the parity of τ", format!("{s} → {x}")));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Checks the relation `Σ τ∘f∘φ = 0` and that every slot complex is a free resolution.
pub fn verify_resolution(m: &NTModule, res: &NTResolution) -> std::result::Result<(), NtViolation> {
    check_resolution_shape(m, res)?;
    let n = m.n;
    for y in Interval::all(n) {
        let mut total = GradedMap::zero(&res.q1[&y], m.slot(y), 0);
        for (x, _) in pattern_summands(n, y) {
            let term = tau_apply(m, x, y)
                .and_then(|t| t.compose(&res.f[&x]))
                .and_then(|t| t.compose(&res.phi[&(y, x)]))
                .and_then(|t| total.add(&t));
            total = term.map_err(|e| violation("τ∘f∘φ composable", format!("{y}: {e}")))?;
        }
        if !total.is_zero() {
            return Err(violation("Σ τ∘f∘φ = 0", y.to_string()));
        }
    }
    for z in Interval::all(n) {
        let r = slot_resolution(m, res, z).map_err(|e| violation("slot complex", format!("{z}: {e}")))?;
        r.verify()
            .map_err(|e| violation("slot resolution exact", format!("{z}: {e}")))?;
    }
    Ok(())
}

/// The obstruction class computed from a resolution.
#[derive(Clone, Debug)]
pub struct FiltratedObstruction {
    /// `δ_e^{[e,b]}: Q₁[e,b] → M[e,n]` for `b < n`, keyed by `(e, [e,b])`.
    pub raw: BTreeMap<(usize, Interval), GradedMap>,
    /// `δ_e` as degree-1 classes in `Ext(M[e+1,n], M[e,n])`, for `e = 1, …, n−1`.
    pub classes: Vec<ExtElement>,
    /// The diagram `e ↦ M[e,n]` with its `i` maps and the classes on its edges.
    pub object: XObject,
    pub class: DiagramClass,
}

/// The chain diagram `e ↦ M[e,n]` with the maps `i`.
pub fn restriction_diagram(m: &NTModule) -> Result<Diagram> {
    let n = m.n;
    let space = Arc::new(UniquePathSpace::chain(n));
    let groups = (1..=n).map(|e| m.slot(Interval { a: e, b: n }).clone()).collect();
    let maps = space
        .edges()
        .iter()
        .map(|&(x, _)| m.gen(Gen::I, Interval { a: x + 1, b: n }).unwrap().clone())
        .collect();
    Diagram::new(space, groups, maps)
}

pub fn obstruction_filtrated(m: &NTModule, res: &NTResolution) -> Result<FiltratedObstruction> {
    verify_resolution(m, res).map_err(|v| Error::precondition(v.location.clone(), v.to_string()))?;
    let n = m.n;
    let mut raw = BTreeMap::new();
    let mut classes = Vec::new();
    for e in 1..n {
        let top = Interval { a: e, b: n };
        let below = Interval { a: e + 1, b: n };
        let target = m.slot(top);
        let summands = pattern_summands(n, below);
        let mut blocks = Vec::new();
        for &(y, p) in &summands {
            if y.a == e && y.b < n {
                let mut d = GradedMap::zero(&res.q1[&y], target, 0);
                for (x, _) in pattern_summands(n, y) {
                    if composes(x, top, y) {
                        let t = tau_apply(m, x, top)?.compose(&res.f[&x])?.compose(&res.phi[&(y, x)])?;
                        d = d.add(&t)?;
                    }
                }
                raw.insert((e, y), d.clone());
                blocks.push(Some(reindex(&d, p, Parity::Even)));
            } else {
                blocks.push(None);
            }
        }
        let sources = pattern_groups(&res.q1, &summands);
        let values = block_map(&sources, std::slice::from_ref(target), 1, |_, j| blocks[j].clone())?;
        let r = slot_resolution(m, res, below)?;
        classes.push(r.to_canonical(target, 1, values.components())?);
    }
    let diagram = restriction_diagram(m)?;
    let odd = diagram.space.edges().iter().map(|&(_, y)| classes[y].clone()).collect();
    let object = XObject::new(diagram, odd)?;
    let class = obstruction_x(&object)?;
    Ok(FiltratedObstruction {
        raw,
        classes,
        object,
        class,
    })
}

/// The identification of `Ext(ΣK(I), K(A)) / (i∘t_I + t_A∘i)` with
/// `Ext(ker i, coker i)` for an extension `I ↣ A ↠ A/I`.
#[derive(Clone, Debug)]
pub struct CokernelIsoN2 {
    pub i_star: GradedMap,
    pub kernel_incl: GradedMap,
    pub cokernel_proj: GradedMap,
    /// `Ext(K(I), K(A))` in degree 1.
    pub source: ExtSpace,
    /// `Ext(ker i, coker i)` in degree 1.
    pub target: ExtSpace,
    /// Images of `(t_I, t_A) ↦ i∘t_I + t_A∘i` in the coordinates of `source`.
    pub relations: IntMatrix,
    /// The forward map in coordinates.
    pub matrix: IntMatrix,
}

impl CokernelIsoN2 {
    /// Builds the forward map and checks that it induces a bijection on the cokernel.
    pub fn new(i_star: &GradedMap) -> Result<Self> {
        if i_star.degree() != 0 {
            return Err(Error::invalid("i", "must have degree 0"));
        }
        let (ki, ka) = (i_star.source(), i_star.target());
        let (_, kernel_incl) = kernel_of(i_star);
        let (_, cokernel_proj) = cokernel_of(i_star);
        let source = ExtSpace::new(ki, ka, 1);
        let target = ExtSpace::new(kernel_incl.source(), cokernel_proj.target(), 1);
        let on_i = ExtSpace::new(ki, ki, 1).matrix_to(&source, |t| push_ext(t, i_star))?;
        let on_a = ExtSpace::new(ka, ka, 1).matrix_to(&source, |t| pull_ext(t, i_star))?;
        let relations = on_i.hstack(&on_a);
        let matrix = source.matrix_to(&target, |e| forward_raw(e, &kernel_incl, &cokernel_proj))?;
        let tg = target.group();
        if !tg.columns_vanish(&matrix.mul(&relations)) {
            return Err(Error::precondition(
                "cokernel iso",
                "forward map does not kill the relations",
            ));
        }
        if !tg.with_relations(&matrix).is_trivial() {
            return Err(Error::precondition("cokernel iso", "forward map is not surjective"));
        }
        let (_, k) = ab_kernel(&matrix, source.group(), tg);
        let span = relations.hstack(source.group().rels());
        if SmithSolver::new(&span).solve_matrix(&k)?.is_none() {
            return Err(Error::precondition(
                "cokernel iso",
                "forward map is not injective on the cokernel",
            ));
        }
        Ok(CokernelIsoN2 {
            i_star: i_star.clone(),
            kernel_incl,
            cokernel_proj,
            source,
            target,
            relations,
            matrix,
        })
    }

    pub fn forward(&self, e: &ExtElement) -> Result<ExtElement> {
        forward_raw(e, &self.kernel_incl, &self.cokernel_proj)
    }
}

fn forward_raw(e: &ExtElement, incl: &GradedMap, proj: &GradedMap) -> Result<ExtElement> {
    push_ext(&pull_ext(e, incl)?, proj)
}

/// The two computations of the obstruction class of an extension.
#[derive(Clone, Debug)]
pub struct BridgeReport {
    pub via_resolution: ExtElement,
    pub via_six_term: ExtElement,
    /// Normal coordinates of both classes in `Ext(ker i, coker i)`.
    pub coordinates: [Vec<Int>; 2],
    pub agree: bool,
    pub agree_up_to_sign: bool,
    pub target: ExtSpace,
}

pub fn extension_bridge_n2(m: &NTModule) -> Result<BridgeReport> {
    if m.n != 2 {
        return Err(Error::invalid("n", "the extension bridge needs n = 2"));
    }
    check_exact(m).map_err(|v| Error::precondition(v.location.clone(), v.to_string()))?;
    let (i2, i12, i11) = (
        Interval { a: 2, b: 2 },
        Interval { a: 1, b: 2 },
        Interval { a: 1, b: 1 },
    );
    let i_star = m.gen(Gen::I, i2).unwrap();
    let r = m.gen(Gen::R, i12).unwrap();
    let delta = m.gen(Gen::Delta, i11).unwrap();
    let res = build_resolution(m)?;
    let obs = obstruction_filtrated(m, &res)?;
    let iso = CokernelIsoN2::new(i_star)?;
    let via_resolution = iso.forward(&obs.classes[0])?;
    let iota = descend(r, &iso.cokernel_proj)?;
    let pi = lift_through(delta, &iso.kernel_incl)
        .ok_or_else(|| Error::precondition("δ", "image of δ is not inside ker i"))?;
    let via_six_term = extension_class(&iota, &pi)?.neg();
    let target = iso.target.clone();
    let agree = via_resolution.equals(&via_six_term);
    let agree_up_to_sign = agree || via_resolution.equals(&via_six_term.neg());
    let coordinates = [target.encode(&via_resolution)?, target.encode(&via_six_term)?];
    Ok(BridgeReport {
        via_resolution,
        via_six_term,
        coordinates,
        agree,
        agree_up_to_sign,
        target,
    })
}

/// Two-point example with `K(I) = Z/2 ⊕ ΣZ/2`, `K(A) = Z/2`, `i = 0` and
/// `K(A/I) = Z/4 ⊕ ΣZ/2`, whose six-term extension is the nonsplit `Z/4`.
pub fn module_e1() -> NTModule {
    let (i2, i12, i11) = (
        Interval { a: 2, b: 2 },
        Interval { a: 1, b: 2 },
        Interval { a: 1, b: 1 },
    );
    let m22 = GradedGroup::new(AbGroup::cyclic(2), AbGroup::cyclic(2));
    let m12 = GradedGroup::even_only(AbGroup::cyclic(2));
    let m11 = GradedGroup::new(AbGroup::cyclic(4), AbGroup::cyclic(2));
    let i = GradedMap::zero(&m22, &m12, 0);
    let r = GradedMap::new(
        m12.clone(),
        m11.clone(),
        0,
        Matrix::from_i64_rows(&[&[2]], 1),
        Matrix::zeros(1, 0),
    )
    .unwrap();
    let d = GradedMap::new(
        m11.clone(),
        m22.clone(),
        1,
        Matrix::from_i64_rows(&[&[1]], 1),
        Matrix::from_i64_rows(&[&[1]], 1),
    )
    .unwrap();
    let slots = BTreeMap::from([(i11, m11), (i12, m12), (i2, m22)]);
    NTModule::new(
        2,
        slots,
        BTreeMap::from([(i2, i)]),
        BTreeMap::from([(i12, r)]),
        BTreeMap::from([(i11, d)]),
    )
    .expect("E1 is well formed")
}
