//! Diagrams of graded groups over unique path spaces.
//!
//! An edge `x → y` means `y ⪯ x`; the open set `U_x` is `{y : x ⪯ y}`. A
//! diagram assigns a group `G_x` to every vertex and a degree-0 map
//! `γ_{y,x}: G_x → G_y` to every edge `x → y`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ext::{pull_ext, push_ext, ExtElement, ExtSpace, HomSpace, Space};
use crate::group::{AbGroup, GradedGroup};
use crate::laurent::{solve_in_space, Decision};
use crate::map::{ab_cokernel, ab_kernel, block_map, homology_at, GradedMap};
use crate::matrix::Matrix;
use crate::scalar::Int;
use crate::uct::{uct_compose, uct_invert, UctClass};
use crate::IntMatrix;

/// Why a directed graph is not a unique path space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UpsViolation {
    DuplicateVertex(String),
    UnknownVertex(String),
    DuplicateEdge(String, String),
    Cycle(Vec<String>),
    TwoPaths { from: String, to: String },
}

impl fmt::Display for UpsViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpsViolation::DuplicateVertex(v) => write!(f, "vertex {v} listed twice"),
            UpsViolation::UnknownVertex(v) => write!(f, "edge uses unknown vertex {v}"),
            UpsViolation::DuplicateEdge(x, y) => write!(f, "edge {x}->{y} listed twice"),
            UpsViolation::Cycle(c) => write!(f, "directed cycle {}", c.join("->")),
            UpsViolation::TwoPaths { from, to } => write!(f, "two distinct paths {from} to {to}"),
        }
    }
}

/// A finite directed graph with at most one directed path between any two
/// vertices. Edges are kept sorted by (source, target) label.
#[derive(Clone, Debug)]
pub struct UniquePathSpace {
    labels: Vec<String>,
    index: BTreeMap<String, usize>,
    edges: Vec<(usize, usize)>,
    /// `paths[x][z]`: edge indices of the path `x ⇝ z`, if any.
    paths: Vec<Vec<Option<Vec<usize>>>>,
}

/// Checks the unique path condition by memoized path counting.
pub fn validate_ups(vertices: &[String], edges: &[(String, String)]) -> std::result::Result<(), UpsViolation> {
    UniquePathSpace::new(vertices.to_vec(), edges.to_vec()).map(|_| ())
}

impl UniquePathSpace {
    pub fn new(vertices: Vec<String>, edges: Vec<(String, String)>) -> std::result::Result<Self, UpsViolation> {
        let mut index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(UpsViolation::DuplicateVertex(v.clone()));
            }
        }
        let mut sorted = edges;
        sorted.sort();
        let mut es = Vec::with_capacity(sorted.len());
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(UpsViolation::DuplicateEdge(w[0].0.clone(), w[0].1.clone()));
            }
        }
        for (x, y) in &sorted {
            let xi = *index.get(x).ok_or_else(|| UpsViolation::UnknownVertex(x.clone()))?;
            let yi = *index.get(y).ok_or_else(|| UpsViolation::UnknownVertex(y.clone()))?;
            es.push((xi, yi));
        }
        let n = vertices.len();
        let order = topological_order(n, &es)
            .map_err(|c| UpsViolation::Cycle(c.iter().map(|&i| vertices[i].clone()).collect()))?;
        // count[x][z] = number of paths x ⇝ z, capped at 2
        let mut count = vec![vec![0u8; n]; n];
        let mut paths: Vec<Vec<Option<Vec<usize>>>> = vec![vec![None; n]; n];
        for &x in order.iter().rev() {
            count[x][x] = 1;
            paths[x][x] = Some(Vec::new());
            for (e, &(a, b)) in es.iter().enumerate() {
                if a != x {
                    continue;
                }
                for z in 0..n {
                    if count[b][z] == 0 {
                        continue;
                    }
                    count[x][z] = (count[x][z] + count[b][z]).min(2);
                    if count[x][z] >= 2 {
                        return Err(UpsViolation::TwoPaths {
                            from: vertices[x].clone(),
                            to: vertices[z].clone(),
                        });
                    }
                    let mut p = vec![e];
                    p.extend(paths[b][z].clone().unwrap());
                    paths[x][z] = Some(p);
                }
            }
        }
        Ok(UniquePathSpace {
            labels: vertices,
            index,
            edges: es,
            paths,
        })
    }

    /// The chain `1 ← 2 ← ⋯ ← n`.
    pub fn chain(n: usize) -> Self {
        let v: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let e = (1..n).map(|i| ((i + 1).to_string(), i.to_string())).collect();
        Self::new(v, e).expect("a chain is a unique path space")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Edges `(x, y)` meaning `x → y`, sorted by label.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_label(&self, e: usize) -> String {
        let (x, y) = self.edges[e];
        format!("{}->{}", self.labels[x], self.labels[y])
    }

    pub fn edge_index(&self, x: usize, y: usize) -> Option<usize> {
        self.edges.iter().position(|&e| e == (x, y))
    }

    /// `x ⪯ y`: there is a directed path `y ⇝ x`.
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.paths[y][x].is_some()
    }

    /// Edge indices along the path `x ⇝ z`.
    pub fn path(&self, x: usize, z: usize) -> Option<&[usize]> {
        self.paths[x][z].as_deref()
    }

    /// All pairs `(x, y)` with `x ⪯ y`.
    pub fn order_relation(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|x| (0..n).filter(move |&y| self.leq(x, y)).map(move |y| (x, y)))
            .collect()
    }

    /// `U_x = {y : x ⪯ y}`.
    pub fn open_star(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.leq(x, y)).collect()
    }
}

fn topological_order(n: usize, edges: &[(usize, usize)]) -> std::result::Result<Vec<usize>, Vec<usize>> {
    // 0 = new, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    let mut order = Vec::with_capacity(n);
    let mut stack: Vec<usize> = Vec::new();
    fn visit(
        v: usize,
        edges: &[(usize, usize)],
        state: &mut [u8],
        order: &mut Vec<usize>,
        stack: &mut Vec<usize>,
    ) -> std::result::Result<(), Vec<usize>> {
        state[v] = 1;
        stack.push(v);
        for &(a, b) in edges {
            if a != v {
                continue;
            }
            match state[b] {
                0 => visit(b, edges, state, order, stack)?,
                1 => {
                    let start = stack.iter().position(|&s| s == b).unwrap();
                    let mut cyc = stack[start..].to_vec();
                    cyc.push(b);
                    return Err(cyc);
                }
                _ => {}
            }
        }
        stack.pop();
        state[v] = 2;
        order.push(v);
        Ok(())
    }
    for v in 0..n {
        if state[v] == 0 {
            visit(v, edges, &mut state, &mut order, &mut stack)?;
        }
    }
    order.reverse();
    Ok(order)
}

/// A diagram of graded groups with degree-0 edge maps.
#[derive(Clone, Debug)]
pub struct Diagram {
    pub space: Arc<UniquePathSpace>,
    pub groups: Vec<GradedGroup>,
    pub edge_maps: Vec<GradedMap>,
}

impl Diagram {
    pub fn new(space: Arc<UniquePathSpace>, groups: Vec<GradedGroup>, edge_maps: Vec<GradedMap>) -> Result<Self> {
        if groups.len() != space.len() || edge_maps.len() != space.edges().len() {
            return Err(Error::Dimension(
                "diagram needs one group per vertex and one map per edge".into(),
            ));
        }
        for (e, &(x, y)) in space.edges().iter().enumerate() {
            let f = &edge_maps[e];
            if f.degree() != 0 || f.source().gens() != groups[x].gens() || f.target().gens() != groups[y].gens() {
                return Err(Error::invalid(
                    space.edge_label(e),
                    "edge map must be a degree-0 map G_x → G_y",
                ));
            }
        }
        Ok(Diagram {
            space,
            groups,
            edge_maps,
        })
    }

    pub fn zero(space: Arc<UniquePathSpace>) -> Self {
        let groups = vec![GradedGroup::zero(); space.len()];
        let edge_maps = space
            .edges()
            .iter()
            .map(|_| GradedMap::identity(&GradedGroup::zero()))
            .collect();
        Diagram {
            space,
            groups,
            edge_maps,
        }
    }

    /// The composite `G_x → G_z` along the path `x ⇝ z`.
    pub fn path_map(&self, x: usize, z: usize) -> Option<GradedMap> {
        let path = self.space.path(x, z)?;
        let mut f = GradedMap::identity(&self.groups[x]);
        for &e in path {
            f = self.edge_maps[e].compose(&f).expect("consecutive edge maps compose");
        }
        Some(f)
    }

    pub fn suspend(&self) -> Diagram {
        let groups: Vec<GradedGroup> = self.groups.iter().map(GradedGroup::suspend).collect();
        let edge_maps = self
            .space
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(x, y))| {
                let [a, b] = self.edge_maps[e].components().clone();
                GradedMap::new_unchecked(groups[x].clone(), groups[y].clone(), 0, b, a)
                    .expect("suspension keeps shapes")
            })
            .collect();
        Diagram {
            space: self.space.clone(),
            groups,
            edge_maps,
        }
    }
}

/// `J_z(B)`: `B` at every `x ⪯ z`, identity maps between them, zero elsewhere.
pub fn j_object(space: &Arc<UniquePathSpace>, z: usize, b: &GradedGroup) -> Result<Diagram> {
    if z >= space.len() {
        return Err(Error::invalid("j_object", format!("unknown vertex index {z}")));
    }
    let groups: Vec<GradedGroup> = (0..space.len())
        .map(|x| {
            if space.leq(x, z) {
                b.clone()
            } else {
                GradedGroup::zero()
            }
        })
        .collect();
    let edge_maps = space
        .edges()
        .iter()
        .map(|&(x, y)| {
            if space.leq(x, z) {
                GradedMap::identity(b)
            } else {
                GradedMap::zero(&groups[x], &groups[y], 0)
            }
        })
        .collect();
    Diagram::new(space.clone(), groups, edge_maps)
}

/// The canonical resolution `⊕_{x→y} J_y(G_x) ↣ ⊕_x J_x(G_x) ↠ G`, vertex by vertex.
#[derive(Clone, Debug)]
pub struct DiagramResolution {
    /// Summands of `F1_z`: edges `x → y` with `z ⪯ y`.
    pub f1_summands: Vec<Vec<usize>>,
    /// Summands of `F0_z`: vertices `x` with `z ⪯ x`.
    pub f0_summands: Vec<Vec<usize>>,
    pub psi: Vec<GradedMap>,
    pub q: Vec<GradedMap>,
    pub certificate: Vec<VertexHomology>,
}

/// Homology of the resolution at one vertex, at `F1`, `F0` and `G`.
#[derive(Clone, Debug)]
pub struct VertexHomology {
    pub vertex: String,
    pub at_f1: GradedGroup,
    pub at_f0: GradedGroup,
    pub at_g: GradedGroup,
}

impl VertexHomology {
    pub fn is_exact(&self) -> bool {
        self.at_f1.is_trivial() && self.at_f0.is_trivial() && self.at_g.is_trivial()
    }
}

impl DiagramResolution {
    pub fn is_exact(&self) -> bool {
        self.certificate.iter().all(VertexHomology::is_exact)
    }
}

pub fn canonical_diagram_resolution(g: &Diagram) -> Result<DiagramResolution> {
    let sp = &g.space;
    let n = sp.len();
    let mut f1_summands = Vec::with_capacity(n);
    let mut f0_summands = Vec::with_capacity(n);
    let mut psi = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    let mut certificate = Vec::with_capacity(n);
    for z in 0..n {
        let f0: Vec<usize> = (0..n).filter(|&x| sp.leq(z, x)).collect();
        let f1: Vec<usize> = (0..sp.edges().len()).filter(|&e| sp.leq(z, sp.edges()[e].1)).collect();
        let f0_groups: Vec<GradedGroup> = f0.iter().map(|&x| g.groups[x].clone()).collect();
        let f1_groups: Vec<GradedGroup> = f1.iter().map(|&e| g.groups[sp.edges()[e].0].clone()).collect();
        let qz = block_map(&f0_groups, &[g.groups[z].clone()], 0, |_, j| g.path_map(f0[j], z))?;
        let psiz = block_map(&f1_groups, &f0_groups, 0, |i, j| {
            let (x, y) = sp.edges()[f1[j]];
            if f0[i] == x {
                Some(GradedMap::identity(&g.groups[x]))
            } else if f0[i] == y {
                Some(g.edge_maps[f1[j]].neg())
            } else {
                None
            }
        })?;
        let into_f1 = GradedMap::zero(&GradedGroup::zero(), psiz.source(), 0);
        let out_of_g = GradedMap::zero(qz.target(), &GradedGroup::zero(), 0);
        certificate.push(VertexHomology {
            vertex: sp.label(z).to_string(),
            at_f1: homology_at(&into_f1, &psiz)?,
            at_f0: homology_at(&psiz, &qz)?,
            at_g: homology_at(&qz, &out_of_g)?,
        });
        f0_summands.push(f0);
        f1_summands.push(f1);
        psi.push(psiz);
        q.push(qz);
    }
    Ok(DiagramResolution {
        f1_summands,
        f0_summands,
        psi,
        q,
        certificate,
    })
}

fn same_space(g: &Diagram, h: &Diagram) -> Result<()> {
    if !Arc::ptr_eq(&g.space, &h.space) && (g.space.labels() != h.space.labels() || g.space.edges() != h.space.edges())
    {
        return Err(Error::invalid("diagrams", "defined over different spaces"));
    }
    Ok(())
}

/// `Ext²(G, H)` over the space in one degree, as the cokernel of
/// `(t_x) ↦ (η_{y,x}∘t_x − t_y∘γ_{y,x})`.
#[derive(Clone, Debug)]
pub struct DiagramExt2Part {
    pub degree: u8,
    pub vertex_spaces: Vec<ExtSpace>,
    pub edge_spaces: Vec<ExtSpace>,
    /// Matrix from the concatenated vertex coordinates to the edge coordinates.
    pub matrix: IntMatrix,
    domain: AbGroup,
    codomain: AbGroup,
    group: AbGroup,
    proj: IntMatrix,
}

impl DiagramExt2Part {
    pub fn group(&self) -> &AbGroup {
        &self.group
    }

    pub fn codomain(&self) -> &AbGroup {
        &self.codomain
    }

    pub fn domain(&self) -> &AbGroup {
        &self.domain
    }

    /// Concatenated coordinates of a family indexed by edges.
    pub fn encode_family(&self, family: &[ExtElement]) -> Result<Vec<Int>> {
        if family.len() != self.edge_spaces.len() {
            return Err(Error::Dimension("family must have one class per edge".into()));
        }
        let mut out = Vec::new();
        for (s, e) in self.edge_spaces.iter().zip(family) {
            out.extend(s.encode(e)?);
        }
        Ok(out)
    }

    pub fn decode_vertices(&self, c: &[Int]) -> Vec<ExtElement> {
        let mut off = 0;
        self.vertex_spaces
            .iter()
            .map(|s| {
                let n = s.group().gens();
                let e = s.decode(&c[off..off + n]);
                off += n;
                e
            })
            .collect()
    }

    pub fn encode_vertices(&self, family: &[ExtElement]) -> Result<Vec<Int>> {
        let mut out = Vec::new();
        for (s, e) in self.vertex_spaces.iter().zip(family) {
            out.extend(s.encode(e)?);
        }
        Ok(out)
    }

    pub fn decode_edges(&self, c: &[Int]) -> Vec<ExtElement> {
        let mut off = 0;
        self.edge_spaces
            .iter()
            .map(|s| {
                let n = s.group().gens();
                let e = s.decode(&c[off..off + n]);
                off += n;
                e
            })
            .collect()
    }

    /// Class of an edge family in the cokernel, in normal coordinates.
    pub fn class_of(&self, family: &[ExtElement]) -> Result<Vec<Int>> {
        let c = self.encode_family(family)?;
        Ok(self.group.normal_coordinates(&self.proj.mul_vec(&c)))
    }

    pub fn family_is_zero(&self, family: &[ExtElement]) -> Result<bool> {
        Ok(self.group.is_zero_elem(&self.class_of(family)?))
    }

    /// Solves `map(s) = family` modulo relations; returns the vertex family `s`.
    pub fn preimage(&self, family: &[ExtElement]) -> Result<Option<Vec<ExtElement>>> {
        let rhs = self.encode_family(family)?;
        let a = self.matrix.hstack(self.codomain.rels());
        let sol = crate::solve::SmithSolver::new(&a).solve(&rhs)?;
        Ok(sol.map(|x| self.decode_vertices(&x[..self.matrix.cols()])))
    }
}

/// Both degrees of `Ext²(G, H)`; the even part comes from degree-0 families.
#[derive(Clone, Debug)]
pub struct DiagramExt2 {
    pub parts: [DiagramExt2Part; 2],
}

impl DiagramExt2 {
    pub fn group(&self) -> GradedGroup {
        GradedGroup::new(self.parts[0].group.clone(), self.parts[1].group.clone())
    }
}

/// `(t_x) ↦ (η_{y,x}∘t_x − t_y∘γ_{y,x})` evaluated directly.
pub fn ext2_map_apply(g: &Diagram, h: &Diagram, t: &[ExtElement]) -> Result<Vec<ExtElement>> {
    g.space
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(x, y))| push_ext(&t[x], &h.edge_maps[e])?.sub(&pull_ext(&t[y], &g.edge_maps[e])?))
        .collect()
}

fn ext2_part(g: &Diagram, h: &Diagram, degree: u8) -> Result<DiagramExt2Part> {
    let sp = &g.space;
    let vertex_spaces: Vec<ExtSpace> = (0..sp.len())
        .map(|x| ExtSpace::new(&g.groups[x], &h.groups[x], degree))
        .collect();
    let edge_spaces: Vec<ExtSpace> = sp
        .edges()
        .iter()
        .map(|&(x, y)| ExtSpace::new(&g.groups[x], &h.groups[y], degree))
        .collect();
    let domain = AbGroup::direct_sum(&vertex_spaces.iter().map(|s| s.group()).collect::<Vec<_>>());
    let codomain = AbGroup::direct_sum(&edge_spaces.iter().map(|s| s.group()).collect::<Vec<_>>());
    let rows = codomain.gens();
    let mut matrix = Matrix::zeros(rows, domain.gens());
    let mut col = 0;
    for (v, vs) in vertex_spaces.iter().enumerate() {
        for i in 0..vs.group().gens() {
            let mut c = vec![Int::from(0); vs.group().gens()];
            c[i] = Int::from(1);
            let t = vs.decode(&c);
            let mut off = 0;
            for (e, &(x, y)) in sp.edges().iter().enumerate() {
                let es = &edge_spaces[e];
                let mut img = es.zero();
                if x == v {
                    img = img.add(&push_ext(&t, &h.edge_maps[e])?)?;
                }
                if y == v {
                    img = img.sub(&pull_ext(&t, &g.edge_maps[e])?)?;
                }
                for (r, val) in es.encode(&img)?.into_iter().enumerate() {
                    matrix[(off + r, col)] = val;
                }
                off += es.group().gens();
            }
            col += 1;
        }
    }
    let (group, proj) = ab_cokernel(&matrix, &codomain);
    Ok(DiagramExt2Part {
        degree,
        vertex_spaces,
        edge_spaces,
        matrix,
        domain,
        codomain,
        group,
        proj,
    })
}

pub fn ext2_diagram(g: &Diagram, h: &Diagram) -> Result<DiagramExt2> {
    same_space(g, h)?;
    Ok(DiagramExt2 {
        parts: [ext2_part(g, h, 0)?, ext2_part(g, h, 1)?],
    })
}

/// `Hom` in the diagram category, one degree at a time.
#[derive(Clone, Debug)]
pub struct DiagramHomPart {
    pub vertex_spaces: Vec<HomSpace>,
    pub group: AbGroup,
    incl: IntMatrix,
}

impl DiagramHomPart {
    pub fn decode(&self, c: &[Int]) -> Vec<GradedMap> {
        let v = self.incl.mul_vec(c);
        let mut off = 0;
        self.vertex_spaces
            .iter()
            .map(|s| {
                let n = s.group().gens();
                let f = s.decode(&v[off..off + n]);
                off += n;
                f
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct DiagramHom {
    pub parts: [DiagramHomPart; 2],
}

impl DiagramHom {
    pub fn group(&self) -> GradedGroup {
        GradedGroup::new(self.parts[0].group.clone(), self.parts[1].group.clone())
    }
}

fn hom_part(g: &Diagram, h: &Diagram, degree: u8) -> Result<DiagramHomPart> {
    let sp = &g.space;
    let vertex_spaces: Vec<HomSpace> = (0..sp.len())
        .map(|x| HomSpace::new(&g.groups[x], &h.groups[x], degree))
        .collect();
    let edge_spaces: Vec<HomSpace> = sp
        .edges()
        .iter()
        .map(|&(x, y)| HomSpace::new(&g.groups[x], &h.groups[y], degree))
        .collect();
    let domain = AbGroup::direct_sum(&vertex_spaces.iter().map(|s| s.group()).collect::<Vec<_>>());
    let codomain = AbGroup::direct_sum(&edge_spaces.iter().map(|s| s.group()).collect::<Vec<_>>());
    let mut cols = Vec::new();
    for (v, vs) in vertex_spaces.iter().enumerate() {
        for i in 0..vs.group().gens() {
            let mut c = vec![Int::from(0); vs.group().gens()];
            c[i] = Int::from(1);
            let f = vs.decode(&c);
            let mut col = Vec::new();
            for (e, &(x, y)) in sp.edges().iter().enumerate() {
                let es = &edge_spaces[e];
                let mut img = GradedMap::zero(&g.groups[x], &h.groups[y], degree);
                if x == v {
                    img = img.add(&h.edge_maps[e].compose(&f)?)?;
                }
                if y == v {
                    img = img.sub(&f.compose(&g.edge_maps[e])?)?;
                }
                col.extend(es.encode(&img)?);
            }
            cols.push(col);
        }
    }
    let m = Matrix::from_columns(codomain.gens(), &cols);
    let (group, incl) = ab_kernel(&m, &domain, &codomain);
    Ok(DiagramHomPart {
        vertex_spaces,
        group,
        incl,
    })
}

/// Families `(f_x)` of maps making all edge squares commute.
pub fn hom_diagram(g: &Diagram, h: &Diagram) -> Result<DiagramHom> {
    same_space(g, h)?;
    Ok(DiagramHom {
        parts: [hom_part(g, h, 0)?, hom_part(g, h, 1)?],
    })
}

/// A diagram together with odd parts `β¹_{y,x}`, degree-1 classes of `Ext(G_x, G_y)`.
#[derive(Clone, Debug)]
pub struct XObject {
    pub diagram: Diagram,
    pub odd_edge: Vec<ExtElement>,
}

impl XObject {
    pub fn new(diagram: Diagram, odd_edge: Vec<ExtElement>) -> Result<Self> {
        let sp = diagram.space.clone();
        if odd_edge.len() != sp.edges().len() {
            return Err(Error::Dimension("one odd class per edge required".into()));
        }
        for (e, &(x, y)) in sp.edges().iter().enumerate() {
            let b = &odd_edge[e];
            if b.degree() != 1
                || b.source().gens() != diagram.groups[x].gens()
                || b.target().gens() != diagram.groups[y].gens()
            {
                return Err(Error::invalid(
                    sp.edge_label(e),
                    "odd part must be a degree-1 class in Ext(G_x, G_y)",
                ));
            }
        }
        Ok(XObject { diagram, odd_edge })
    }

    pub fn edge_class(&self, e: usize) -> UctClass {
        UctClass {
            even: self.diagram.edge_maps[e].clone(),
            odd: self.odd_edge[e].clone(),
        }
    }

    /// Edgewise conjugation `β'_{y,x} = u_y ∘ β_{y,x} ∘ u_x⁻¹`.
    pub fn conjugate(&self, u: &[UctClass]) -> Result<XObject> {
        let sp = self.diagram.space.clone();
        if u.len() != sp.len() {
            return Err(Error::Dimension("one conjugating class per vertex required".into()));
        }
        let inv: Vec<UctClass> = u
            .iter()
            .enumerate()
            .map(|(x, c)| {
                uct_invert(c).ok_or_else(|| Error::precondition(sp.label(x), "conjugating class not invertible"))
            })
            .collect::<Result<_>>()?;
        let groups: Vec<GradedGroup> = u.iter().map(|c| c.target().clone()).collect();
        let mut maps = Vec::new();
        let mut odd = Vec::new();
        for (e, &(x, y)) in sp.edges().iter().enumerate() {
            let c = uct_compose(&uct_compose(&u[y], &self.edge_class(e))?, &inv[x])?;
            maps.push(c.even);
            odd.push(c.odd);
        }
        XObject::new(Diagram::new(sp, groups, maps)?, odd)
    }
}

/// A class in one degree part of a diagram `Ext²`.
#[derive(Clone, Debug)]
pub struct DiagramClass {
    pub degree: u8,
    pub coordinates: Vec<Int>,
    pub is_zero: bool,
    pub representative: Vec<ExtElement>,
}

/// The obstruction class of an object over the space: the image of
/// `(β¹_{y,x})` in `Ext²(ΣG, G)`, realised as the degree-1 part of `Ext²(G, G)`.
pub fn obstruction_x(obj: &XObject) -> Result<DiagramClass> {
    let g = &obj.diagram;
    let part = ext2_part(g, g, 1)?;
    let coordinates = part.class_of(&obj.odd_edge)?;
    let is_zero = part.group.is_zero_elem(&coordinates);
    Ok(DiagramClass {
        degree: 1,
        coordinates,
        is_zero,
        representative: obj.odd_edge.clone(),
    })
}

fn check_vertex_isos(a: &XObject, b: &XObject, t0: &[GradedMap]) -> Result<()> {
    same_space(&a.diagram, &b.diagram)?;
    let sp = &a.diagram.space;
    if t0.len() != sp.len() {
        return Err(Error::Dimension("one map per vertex required".into()));
    }
    for (x, t) in t0.iter().enumerate() {
        if t.degree() != 0
            || t.source().gens() != a.diagram.groups[x].gens()
            || t.target().gens() != b.diagram.groups[x].gens()
        {
            return Err(Error::invalid(sp.label(x), "t0 must be a degree-0 map A_x → B_x"));
        }
        if !t.is_iso() {
            return Err(Error::precondition(sp.label(x), "t0 is not an isomorphism"));
        }
    }
    for (e, &(x, y)) in sp.edges().iter().enumerate() {
        let l = t0[y].compose(&a.diagram.edge_maps[e])?;
        let r = b.diagram.edge_maps[e].compose(&t0[x])?;
        if !l.equals(&r) {
            return Err(Error::precondition(
                sp.edge_label(e),
                "t0 does not commute with the edge maps",
            ));
        }
    }
    Ok(())
}

/// `β¹_{y,x}∘t⁰_x − t⁰_y∘α¹_{y,x}` on every edge.
fn relative_family(a: &XObject, b: &XObject, t0: &[GradedMap]) -> Result<Vec<ExtElement>> {
    a.diagram
        .space
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(x, y))| pull_ext(&b.odd_edge[e], &t0[x])?.sub(&push_ext(&a.odd_edge[e], &t0[y])?))
        .collect()
}

pub fn relative_obstruction_x(a: &XObject, b: &XObject, t0: &[GradedMap]) -> Result<DiagramClass> {
    check_vertex_isos(a, b, t0)?;
    let part = ext2_part(&a.diagram, &b.diagram, 1)?;
    let family = relative_family(a, b, t0)?;
    let coordinates = part.class_of(&family)?;
    let is_zero = part.group.is_zero_elem(&coordinates);
    Ok(DiagramClass {
        degree: 1,
        coordinates,
        is_zero,
        representative: family,
    })
}

/// Checks `t_y ∘ α_{y,x} = β_{y,x} ∘ t_x` in the UCT model on every edge.
pub fn verify_t_condition(a: &XObject, b: &XObject, t: &[UctClass]) -> Result<bool> {
    for (e, &(x, y)) in a.diagram.space.edges().iter().enumerate() {
        let l = uct_compose(&t[y], &a.edge_class(e))?;
        let r = uct_compose(&b.edge_class(e), &t[x])?;
        if !l.equals(&r) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Decides whether the vertex isomorphisms `t⁰` lift to invertible classes
/// `(t⁰_x, t¹_x)` compatible with every edge.
pub fn classify_x(a: &XObject, b: &XObject, t0: &[GradedMap]) -> Result<Decision<Vec<UctClass>, DiagramClass>> {
    check_vertex_isos(a, b, t0)?;
    let part = ext2_part(&a.diagram, &b.diagram, 1)?;
    let family = relative_family(a, b, t0)?;
    let rhs = part.encode_family(&family)?;
    match solve_in_space(&part.matrix, &GroupSpace(&part.codomain), &rhs) {
        None => {
            let coordinates = part.group.normal_coordinates(&part.proj.mul_vec(&rhs));
            Ok(Decision::Obstructed(DiagramClass {
                degree: 1,
                coordinates,
                is_zero: false,
                representative: family,
            }))
        }
        Some(s) => {
            let witness: Vec<UctClass> = part
                .decode_vertices(&s)
                .into_iter()
                .zip(t0)
                .map(|(sx, t)| UctClass::new(t.clone(), sx.neg()))
                .collect::<Result<_>>()?;
            if !verify_t_condition(a, b, &witness)? {
                return Err(Error::precondition("classify_x", "witness failed verification"));
            }
            Ok(Decision::Equivalent(witness))
        }
    }
}

struct GroupSpace<'a>(&'a AbGroup);

impl Space for GroupSpace<'_> {
    type Elem = Vec<Int>;
    fn group(&self) -> &AbGroup {
        self.0
    }
    fn encode(&self, x: &Vec<Int>) -> Result<Vec<Int>> {
        Ok(x.clone())
    }
    fn decode(&self, c: &[Int]) -> Vec<Int> {
        c.to_vec()
    }
}
