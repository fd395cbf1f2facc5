//! JSON encodings.
//!
//! Integers are JSON numbers or decimal strings; matrices are arrays of rows.
//! Decoding walks a [`serde_json::Value`] and reports the JSON path of the
//! first offending item.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::ext::{ExtElement, ExtSpace, Space};
use crate::group::{AbGroup, GradedGroup, Parity};
use crate::laurent::{LaurentModule, ZObject};
use crate::map::GradedMap;
use crate::matrix::Matrix;
use crate::nt::{Gen, Interval, NTModule};
use crate::poset::{Diagram, UniquePathSpace, XObject};
use crate::scalar::Int;
use crate::uct::UctClass;
use crate::IntMatrix;

pub fn int_to_json(x: &Int) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => Value::String(x.to_string()),
    }
}

pub fn ints_to_json(xs: &[Int]) -> Value {
    Value::Array(xs.iter().map(int_to_json).collect())
}

pub fn matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| ints_to_json(m.row(i))).collect())
}

/// Presentation plus its invariant factors; decoders ignore the summary.
pub fn group_to_json(g: &AbGroup) -> Value {
    json!({
        "gens": g.gens(),
        "rels": matrix_to_json(g.rels()),
        "invariant_factors": ints_to_json(&g.invariant_factors()),
        "summary": g.to_string(),
    })
}

pub fn graded_group_to_json(g: &GradedGroup) -> Value {
    json!({ "even": group_to_json(g.even()), "odd": group_to_json(g.odd()) })
}

/// Invariant factors only, for compact reports.
pub fn graded_summary(g: &GradedGroup) -> Value {
    json!({
        "even": ints_to_json(&g.even().invariant_factors()),
        "odd": ints_to_json(&g.odd().invariant_factors()),
        "summary": g.to_string(),
    })
}

pub fn map_to_json(f: &GradedMap) -> Value {
    json!({
        "degree": f.degree(),
        "even": matrix_to_json(f.component(Parity::Even)),
        "odd": matrix_to_json(f.component(Parity::Odd)),
    })
}

pub fn ext_to_json(e: &ExtElement) -> Value {
    let coordinates = ExtSpace::new(e.source(), e.target(), e.degree()).encode(e).ok();
    json!({
        "degree": e.degree(),
        "even_vectors": matrix_to_json(e.vectors(Parity::Even)),
        "odd_vectors": matrix_to_json(e.vectors(Parity::Odd)),
        "coordinates": coordinates.as_deref().map(ints_to_json),
        "is_zero": e.is_zero(),
    })
}

pub fn uct_class_to_json(t: &UctClass) -> Value {
    json!({ "hom": map_to_json(&t.even), "ext": ext_to_json(&t.odd) })
}

pub fn z_object_to_json(z: &ZObject) -> Value {
    json!({
        "group": graded_group_to_json(z.group()),
        "action": map_to_json(&z.module.action),
        "action_inverse": map_to_json(&z.module.action_inverse),
        "odd_part": ext_to_json(&z.odd_part),
    })
}

pub fn x_object_to_json(x: &XObject) -> Value {
    let sp = &x.diagram.space;
    let mut groups = Map::new();
    for v in 0..sp.len() {
        groups.insert(sp.label(v).to_string(), graded_group_to_json(&x.diagram.groups[v]));
    }
    let mut maps = Map::new();
    let mut odd = Map::new();
    for e in 0..sp.edges().len() {
        maps.insert(sp.edge_label(e), map_to_json(&x.diagram.edge_maps[e]));
        odd.insert(sp.edge_label(e), ext_to_json(&x.odd_edge[e]));
    }
    let edges: Vec<Value> = sp
        .edges()
        .iter()
        .map(|&(a, b)| json!([sp.label(a), sp.label(b)]))
        .collect();
    json!({
        "vertices": sp.labels(),
        "edges": edges,
        "groups": groups,
        "edge_maps": maps,
        "odd_edge": odd,
    })
}

pub fn nt_module_to_json(m: &NTModule) -> Value {
    let slots: Map<String, Value> = m
        .slots()
        .iter()
        .map(|(s, g)| (s.to_string(), graded_group_to_json(g)))
        .collect();
    let mut out = Map::new();
    out.insert("n".into(), json!(m.n()));
    out.insert("slots".into(), Value::Object(slots));
    for g in Gen::ALL {
        let maps: Map<String, Value> = m.gens(g).iter().map(|(s, f)| (s.to_string(), map_to_json(f))).collect();
        out.insert(g.name().into(), Value::Object(maps));
    }
    Value::Object(out)
}

fn child(at: &str, key: impl std::fmt::Display) -> String {
    if at.is_empty() {
        key.to_string()
    } else {
        format!("{at}.{key}")
    }
}

fn elem(at: &str, i: usize) -> String {
    format!("{at}[{i}]")
}

fn relocate(e: Error, at: &str) -> Error {
    match e {
        Error::Dimension(m) => Error::invalid(at, m),
        Error::Invalid { location, message } => Error::invalid(child(at, location), message),
        Error::Precondition { location, message } => Error::precondition(child(at, location), message),
    }
}

fn object<'a>(v: &'a Value, at: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::invalid(at, "expected an object"))
}

fn array<'a>(v: &'a Value, at: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::invalid(at, "expected an array"))
}

fn field<'a>(o: &'a Map<String, Value>, key: &str, at: &str) -> Result<&'a Value> {
    o.get(key)
        .ok_or_else(|| Error::invalid(at, format!("missing field \"{key}\"")))
}

fn string(v: &Value, at: &str) -> Result<String> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| Error::invalid(at, "expected a string"))
}

fn count(v: &Value, at: &str) -> Result<usize> {
    v.as_u64()
        .and_then(|x| x.to_usize())
        .ok_or_else(|| Error::invalid(at, "expected a non-negative integer"))
}

pub fn int_from_json(v: &Value, at: &str) -> Result<Int> {
    match v {
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => Ok(Int::from(i)),
            (_, Some(u)) => Ok(Int::from(u)),
            _ => Err(Error::invalid(
                at,
                "expected an integer; write large values as decimal strings",
            )),
        },
        Value::String(s) => s
            .trim()
            .parse::<Int>()
            .map_err(|_| Error::invalid(at, format!("not an integer: {s:?}"))),
        _ => Err(Error::invalid(at, "expected an integer")),
    }
}

pub fn ints_from_json(v: &Value, at: &str) -> Result<Vec<Int>> {
    array(v, at)?
        .iter()
        .enumerate()
        .map(|(i, x)| int_from_json(x, &elem(at, i)))
        .collect()
}

/// Vertex labels and labelled edges.
pub type Graph = (Vec<String>, Vec<(String, String)>);

/// Decoder with an optional bound on matrix dimensions and generator counts.
#[derive(Clone, Copy, Debug)]
pub struct Decoder {
    pub max_dim: usize,
}

impl Default for Decoder {
    fn default() -> Self {
        Decoder { max_dim: usize::MAX }
    }
}

impl Decoder {
    pub fn with_max_dim(max_dim: usize) -> Self {
        Decoder { max_dim }
    }

    fn bound(&self, dim: usize, at: &str) -> Result<()> {
        if dim > self.max_dim {
            return Err(Error::precondition(
                at,
                format!("dimension {dim} exceeds the configured bound {}", self.max_dim),
            ));
        }
        Ok(())
    }

    /// A matrix whose shape is read from the data.
    pub fn matrix_free(&self, v: &Value, at: &str) -> Result<IntMatrix> {
        let rows = array(v, at)?;
        self.bound(rows.len(), at)?;
        let mut data = Vec::new();
        let mut width = None;
        for (i, r) in rows.iter().enumerate() {
            let at_r = elem(at, i);
            let r = ints_from_json(r, &at_r)?;
            match width {
                None => {
                    self.bound(r.len(), &at_r)?;
                    width = Some(r.len())
                }
                Some(w) if w != r.len() => {
                    return Err(Error::invalid(
                        at_r,
                        format!("row has {} entries, expected {w}", r.len()),
                    ))
                }
                _ => {}
            }
            data.extend(r);
        }
        Ok(Matrix::from_vec(rows.len(), width.unwrap_or(0), data))
    }

    /// A matrix of prescribed shape. Any entry-free array (`[]`, `[[]]`, ..)
    /// is accepted when the shape has no entries.
    pub fn matrix(&self, v: &Value, rows: usize, cols: usize, at: &str) -> Result<IntMatrix> {
        let m = self.matrix_free(v, at)?;
        if m.cols() == 0 && rows * cols == 0 {
            return Ok(Matrix::zeros(rows, cols));
        }
        if m.rows() != rows || m.cols() != cols {
            return Err(Error::invalid(
                at,
                format!("matrix is {}x{}, expected {rows}x{cols}", m.rows(), m.cols()),
            ));
        }
        Ok(m)
    }

    fn matrix_or_zero(
        &self,
        o: &Map<String, Value>,
        key: &str,
        rows: usize,
        cols: usize,
        at: &str,
    ) -> Result<IntMatrix> {
        match o.get(key) {
            None | Some(Value::Null) => Ok(Matrix::zeros(rows, cols)),
            Some(v) => self.matrix(v, rows, cols, &child(at, key)),
        }
    }

    /// `{"gens": g, "rels": [[..]]}` with `g` rows of relators, or
    /// `{"factors": [..]}` for a direct sum of cyclic groups.
    pub fn group(&self, v: &Value, at: &str) -> Result<AbGroup> {
        let o = object(v, at)?;
        if let Some(f) = o.get("factors") {
            let factors = ints_from_json(f, &child(at, "factors"))?;
            self.bound(factors.len(), at)?;
            if let Some(i) = factors.iter().position(|x| x.sign() == num_bigint::Sign::Minus) {
                return Err(Error::invalid(
                    elem(&child(at, "factors"), i),
                    "cyclic orders must be non-negative",
                ));
            }
            return Ok(AbGroup::from_factors(&factors));
        }
        let gens = count(field(o, "gens", at)?, &child(at, "gens"))?;
        self.bound(gens, &child(at, "gens"))?;
        let rels = match o.get("rels") {
            None | Some(Value::Null) => Matrix::zeros(gens, 0),
            Some(r) => {
                let at_r = child(at, "rels");
                let m = self.matrix_free(r, &at_r)?;
                if m.rows() == 0 {
                    Matrix::zeros(gens, 0)
                } else if m.rows() != gens {
                    return Err(Error::invalid(
                        at_r,
                        format!("{} rows of relators, expected one per generator ({gens})", m.rows()),
                    ));
                } else {
                    m
                }
            }
        };
        Ok(AbGroup::new(gens, rels))
    }

    /// Missing parts are trivial.
    pub fn graded_group(&self, v: &Value, at: &str) -> Result<GradedGroup> {
        let o = object(v, at)?;
        let part = |key: &str| match o.get(key) {
            None | Some(Value::Null) => Ok(AbGroup::trivial()),
            Some(g) => self.group(g, &child(at, key)),
        };
        Ok(GradedGroup::new(part("even")?, part("odd")?))
    }

    /// `{"degree": d, "even": [[..]], "odd": [[..]]}`; a missing component
    /// is zero and a missing degree is `default_degree`.
    pub fn map(
        &self,
        v: &Value,
        source: &GradedGroup,
        target: &GradedGroup,
        default_degree: u8,
        at: &str,
    ) -> Result<GradedMap> {
        let o = object(v, at)?;
        let degree = match o.get("degree") {
            None => default_degree,
            Some(d) => (count(d, &child(at, "degree"))? % 2) as u8,
        };
        let comp = |p: Parity| {
            let (r, c) = (target.part(p.shift(degree)).gens(), source.part(p).gens());
            self.matrix_or_zero(o, p.name(), r, c, at)
        };
        let (even, odd) = (comp(Parity::Even)?, comp(Parity::Odd)?);
        GradedMap::new(source.clone(), target.clone(), degree, even, odd).map_err(|e| relocate(e, at))
    }

    /// `{"degree": d, "even_vectors": .., "odd_vectors": ..}` on the relation
    /// basis of the source, or `{"degree": d, "coordinates": [..]}` in the
    /// coordinate group of `Ext`. The degree defaults to 1.
    pub fn ext(&self, v: &Value, source: &GradedGroup, target: &GradedGroup, at: &str) -> Result<ExtElement> {
        let o = object(v, at)?;
        let degree = match o.get("degree") {
            None => 1,
            Some(d) => (count(d, &child(at, "degree"))? % 2) as u8,
        };
        if let Some(c) = o.get("coordinates").filter(|c| !c.is_null()) {
            let space = ExtSpace::new(source, target, degree);
            let at_c = child(at, "coordinates");
            let c = ints_from_json(c, &at_c)?;
            if c.len() != space.group().gens() {
                return Err(Error::invalid(
                    at_c,
                    format!("{} coordinates, expected {}", c.len(), space.group().gens()),
                ));
            }
            return Ok(space.decode(&c));
        }
        let vecs = |p: Parity| {
            let (r, c) = (
                target.part(p.shift(degree)).gens(),
                source.part(p).relation_basis().cols(),
            );
            self.matrix_or_zero(o, &format!("{}_vectors", p.name()), r, c, at)
        };
        ExtElement::new(
            source.clone(),
            target.clone(),
            degree,
            [vecs(Parity::Even)?, vecs(Parity::Odd)?],
        )
        .map_err(|e| relocate(e, at))
    }

    /// `{"group", "action", "action_inverse"?, "odd_part"?}`; a missing odd
    /// part is zero.
    pub fn z_object(&self, v: &Value, at: &str) -> Result<ZObject> {
        let o = object(v, at)?;
        let g = self.graded_group(field(o, "group", at)?, &child(at, "group"))?;
        let action = self.map(field(o, "action", at)?, &g, &g, 0, &child(at, "action"))?;
        let inverse = match o.get("action_inverse") {
            None | Some(Value::Null) => None,
            Some(v) => Some(self.map(v, &g, &g, 0, &child(at, "action_inverse"))?),
        };
        let module = LaurentModule::new(g.clone(), action, inverse).map_err(|e| relocate(e, at))?;
        let odd = match o.get("odd_part") {
            None | Some(Value::Null) => ExtElement::zero(&g, &g, 1),
            Some(v) => self.ext(v, &g, &g, &child(at, "odd_part"))?,
        };
        ZObject::new(module, odd).map_err(|e| relocate(e, at))
    }

    /// `{"vertices": [..], "edges": [["x", "y"], ..]}`.
    pub fn graph(&self, v: &Value, at: &str) -> Result<Graph> {
        let o = object(v, at)?;
        let at_v = child(at, "vertices");
        let vertices = array(field(o, "vertices", at)?, &at_v)?
            .iter()
            .enumerate()
            .map(|(i, x)| string(x, &elem(&at_v, i)))
            .collect::<Result<Vec<_>>>()?;
        self.bound(vertices.len(), &at_v)?;
        let at_e = child(at, "edges");
        let edges = match o.get("edges") {
            None => Vec::new(),
            Some(e) => array(e, &at_e)?
                .iter()
                .enumerate()
                .map(|(i, pair)| {
                    let at_i = elem(&at_e, i);
                    match array(pair, &at_i)?.as_slice() {
                        [x, y] => Ok((string(x, &elem(&at_i, 0))?, string(y, &elem(&at_i, 1))?)),
                        _ => Err(Error::invalid(at_i, "an edge is a pair [source, target]")),
                    }
                })
                .collect::<Result<Vec<_>>>()?,
        };
        Ok((vertices, edges))
    }

    pub fn space(&self, v: &Value, at: &str) -> Result<Arc<UniquePathSpace>> {
        let (vertices, edges) = self.graph(v, at)?;
        UniquePathSpace::new(vertices, edges)
            .map(Arc::new)
            .map_err(|e| Error::invalid(child(at, "edges"), format!("not a unique path space: {e}")))
    }

    /// Groups keyed by vertex label, edge maps and odd parts keyed by
    /// `"x->y"`. Missing groups are trivial, missing maps and odd parts zero.
    pub fn x_object(&self, v: &Value, at: &str) -> Result<XObject> {
        let sp = self.space(v, at)?;
        let o = object(v, at)?;
        let empty = Map::new();
        let sub = |key: &str| -> Result<&Map<String, Value>> {
            match o.get(key) {
                None | Some(Value::Null) => Ok(&empty),
                Some(x) => object(x, &child(at, key)),
            }
        };
        let (gs, ms, os) = (sub("groups")?, sub("edge_maps")?, sub("odd_edge")?);
        for (key, m, known) in [
            ("groups", gs, sp.labels().to_vec()),
            (
                "edge_maps",
                ms,
                (0..sp.edges().len()).map(|e| sp.edge_label(e)).collect(),
            ),
            (
                "odd_edge",
                os,
                (0..sp.edges().len()).map(|e| sp.edge_label(e)).collect(),
            ),
        ] {
            if let Some(k) = m.keys().find(|k| !known.contains(k)) {
                return Err(Error::invalid(child(&child(at, key), k), "no such vertex or edge"));
            }
        }
        let groups = (0..sp.len())
            .map(|x| match gs.get(sp.label(x)) {
                None => Ok(GradedGroup::zero()),
                Some(g) => self.graded_group(g, &child(&child(at, "groups"), sp.label(x))),
            })
            .collect::<Result<Vec<_>>>()?;
        let mut maps = Vec::new();
        let mut odd = Vec::new();
        for (e, &(x, y)) in sp.edges().iter().enumerate() {
            let label = sp.edge_label(e);
            maps.push(match ms.get(&label) {
                None => GradedMap::zero(&groups[x], &groups[y], 0),
                Some(f) => self.map(f, &groups[x], &groups[y], 0, &child(&child(at, "edge_maps"), &label))?,
            });
            odd.push(match os.get(&label) {
                None => ExtElement::zero(&groups[x], &groups[y], 1),
                Some(c) => self.ext(c, &groups[x], &groups[y], &child(&child(at, "odd_edge"), &label))?,
            });
        }
        let diagram = Diagram::new(sp, groups, maps).map_err(|e| relocate(e, at))?;
        XObject::new(diagram, odd).map_err(|e| relocate(e, at))
    }

    /// Degree-0 maps `A_x → B_x` keyed by vertex label; every vertex is required.
    pub fn vertex_maps(&self, v: &Value, a: &Diagram, b: &Diagram, at: &str) -> Result<Vec<GradedMap>> {
        let o = object(v, at)?;
        let sp = &a.space;
        if let Some(k) = o.keys().find(|k| sp.vertex(k).is_none()) {
            return Err(Error::invalid(child(at, k), "no such vertex"));
        }
        (0..sp.len())
            .map(|x| {
                let label = sp.label(x);
                self.map(field(o, label, at)?, &a.groups[x], &b.groups[x], 0, &child(at, label))
            })
            .collect()
    }

    /// `{"n", "slots": {"[a,b]": G}, "i": {"[a,b]": map}, "r": {..}, "delta": {..}}`,
    /// generators keyed by source interval. Missing slots are trivial and
    /// missing generator maps zero.
    pub fn nt_module(&self, v: &Value, at: &str) -> Result<NTModule> {
        let o = object(v, at)?;
        let n = count(field(o, "n", at)?, &child(at, "n"))?;
        if n == 0 {
            return Err(Error::invalid(child(at, "n"), "n must be positive"));
        }
        let at_s = child(at, "slots");
        let mut slots: BTreeMap<Interval, GradedGroup> =
            Interval::all(n).into_iter().map(|s| (s, GradedGroup::zero())).collect();
        if let Some(s) = o.get("slots") {
            for (k, g) in object(s, &at_s)? {
                let at_k = child(&at_s, k);
                let iv = interval_key(k, n, &at_k)?;
                slots.insert(iv, self.graded_group(g, &at_k)?);
            }
        }
        let mut maps: [BTreeMap<Interval, GradedMap>; 3] = Default::default();
        for (gi, g) in Gen::ALL.into_iter().enumerate() {
            let at_g = child(at, g.name());
            let given = match o.get(g.name()) {
                None | Some(Value::Null) => Map::new(),
                Some(x) => object(x, &at_g)?.clone(),
            };
            let sources = g.sources(n);
            for (k, f) in &given {
                let at_k = child(&at_g, k);
                let src = interval_key(k, n, &at_k)?;
                if !sources.contains(&src) {
                    return Err(Error::invalid(
                        at_k,
                        format!("{} has no component starting at {src}", g.name()),
                    ));
                }
                let dst = g.target(n, src).expect("generator source has a target");
                maps[gi].insert(src, self.map(f, &slots[&src], &slots[&dst], g.degree(), &at_k)?);
            }
            for src in sources {
                let dst = g.target(n, src).expect("generator source has a target");
                maps[gi]
                    .entry(src)
                    .or_insert_with(|| GradedMap::zero(&slots[&src], &slots[&dst], g.degree()));
            }
        }
        let [i, r, d] = maps;
        NTModule::new(n, slots, i, r, d).map_err(|e| relocate(e, at))
    }
}

fn interval_key(k: &str, n: usize, at: &str) -> Result<Interval> {
    let iv: Interval = k.parse().map_err(|e| relocate(e, at))?;
    iv.check(n).map_err(|e| relocate(e, at))?;
    Ok(iv)
}
