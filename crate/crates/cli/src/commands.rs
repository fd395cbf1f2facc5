use std::collections::BTreeMap;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

use homkk_core::ext::{ext_group, hom_group};
use homkk_core::json::*;
use homkk_core::laurent::{
    equivalent_z, ext2_laurent, obstruction_z, relative_obstruction_z, search_equivalence, Decision, Ext2Class, ZObject,
};
use homkk_core::nt::{
    build_resolution, check_exact, extension_bridge_n2, nt_validate, obstruction_filtrated, ss_quotient, tau,
    verify_resolution, NTModule, NtViolation,
};
use homkk_core::poset::{
    canonical_diagram_resolution, classify_x, ext2_diagram, obstruction_x, relative_obstruction_x, DiagramClass,
    UniquePathSpace, UpsViolation, XObject,
};
use homkk_core::smith::smith_normal_form;
use homkk_core::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Verb {
    Snf,
    Hom,
    Ext,
    Ext2Z,
    ObstructZ,
    ClassifyZ,
    ValidateUps,
    ResolveDiagram,
    Ext2X,
    ObstructX,
    ClassifyX,
    NtValidate,
    NtExact,
    NtResolve,
    NtObstruct,
    NtBridge,
}

impl Verb {
    pub fn name(self) -> String {
        self.to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_string()
    }

    /// Accepted number of input documents.
    fn arity(self) -> (usize, usize) {
        match self {
            Verb::Snf | Verb::ObstructZ | Verb::ValidateUps | Verb::ResolveDiagram | Verb::ObstructX => (1, 1),
            Verb::NtValidate | Verb::NtExact | Verb::NtResolve | Verb::NtObstruct | Verb::NtBridge => (1, 1),
            Verb::Hom | Verb::Ext | Verb::Ext2Z | Verb::Ext2X => (1, 2),
            Verb::ClassifyZ => (2, 3),
            Verb::ClassifyX => (3, 3),
        }
    }
}

/// Why a command did not compute.
#[derive(Debug)]
pub struct Failure {
    pub exit_code: i32,
    pub invariant: Option<String>,
    pub location: String,
    pub message: String,
}

impl Failure {
    pub fn invalid(location: impl Into<String>, message: impl Into<String>) -> Self {
        Failure {
            exit_code: 2,
            invariant: None,
            location: location.into(),
            message: message.into(),
        }
    }

    fn violation(v: NtViolation, exit_code: i32) -> Self {
        Failure {
            exit_code,
            message: v.to_string(),
            invariant: Some(v.invariant),
            location: v.location,
        }
    }

    pub fn kind(&self) -> &'static str {
        if self.exit_code == 3 {
            "precondition_failed"
        } else {
            "invalid"
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind(),
            "invariant": self.invariant,
            "location": self.location,
            "message": self.message,
        })
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit_code = e.exit_code();
        match e {
            Error::Dimension(m) => Failure {
                exit_code,
                invariant: None,
                location: String::new(),
                message: m,
            },
            Error::Invalid { location, message } | Error::Precondition { location, message } => Failure {
                exit_code,
                invariant: None,
                location,
                message,
            },
        }
    }
}

type Outcome = std::result::Result<Value, Failure>;

pub struct Context {
    pub decoder: Decoder,
    pub max_n: usize,
}

fn input(i: usize) -> String {
    format!("input[{i}]")
}

pub fn run(verb: Verb, inputs: &[Value], ctx: &Context) -> Outcome {
    let (lo, hi) = verb.arity();
    if inputs.len() < lo || inputs.len() > hi {
        let want = if lo == hi {
            lo.to_string()
        } else {
            format!("{lo} to {hi}")
        };
        return Err(Failure::invalid(
            "inputs",
            format!("{} takes {want} input documents, got {}", verb.name(), inputs.len()),
        ));
    }
    let d = &ctx.decoder;
    match verb {
        Verb::Snf => snf(d, &inputs[0]),
        Verb::Hom | Verb::Ext => hom_ext(d, inputs, verb == Verb::Hom),
        Verb::Ext2Z => {
            let (a, b) = z_pair(d, inputs)?;
            let ext2 = ext2_laurent(&a.module, &b.module)?;
            Ok(json!({ "ext2": graded_summary(&ext2.group()) }))
        }
        Verb::ObstructZ => {
            let a = d.z_object(&inputs[0], &input(0))?;
            let class = obstruction_z(&a)?;
            let ext2 = ext2_laurent(&a.module, &a.module)?;
            Ok(json!({ "ext2": graded_summary(&ext2.group()), "obstruction": ext2_class(&class) }))
        }
        Verb::ClassifyZ => classify_z(d, inputs),
        Verb::ValidateUps => validate_ups(d, &inputs[0]),
        Verb::ResolveDiagram => resolve_diagram(d, &inputs[0]),
        Verb::Ext2X => {
            let a = d.x_object(&inputs[0], &input(0))?;
            let b = if inputs.len() > 1 {
                d.x_object(&inputs[1], &input(1))?
            } else {
                a.clone()
            };
            let e = ext2_diagram(&a.diagram, &b.diagram)?;
            Ok(json!({ "ext2": graded_summary(&e.group()) }))
        }
        Verb::ObstructX => {
            let a = d.x_object(&inputs[0], &input(0))?;
            let group = ext2_diagram(&a.diagram, &a.diagram)?.parts[1].group().clone();
            let class = obstruction_x(&a)?;
            Ok(json!({
                "ext2_odd": { "invariant_factors": ints_to_json(&group.invariant_factors()), "summary": group.to_string() },
                "obstruction": diagram_class(&a, &class),
            }))
        }
        Verb::ClassifyX => classify_x_cmd(d, inputs),
        Verb::NtValidate => {
            let m = nt_module(ctx, &inputs[0])?;
            nt_validate(&m).map_err(|v| Failure::violation(v, 2))?;
            Ok(json!({ "valid": true, "slots": slot_summary(&m) }))
        }
        Verb::NtExact => {
            let m = exact_module(ctx, &inputs[0])?;
            Ok(json!({ "exact": true, "slots": slot_summary(&m) }))
        }
        Verb::NtResolve => nt_resolve(ctx, &inputs[0]),
        Verb::NtObstruct => nt_obstruct(ctx, &inputs[0]),
        Verb::NtBridge => nt_bridge(ctx, &inputs[0]),
    }
}

fn snf(d: &Decoder, v: &Value) -> Outcome {
    let m = match v {
        Value::Object(o) => d.matrix_free(o.get("matrix").unwrap_or(&Value::Null), &format!("{}.matrix", input(0)))?,
        _ => d.matrix_free(v, &input(0))?,
    };
    let s = smith_normal_form(&m);
    let verified = s.u.mul(&m).mul(&s.v) == s.d;
    let unit = |x: &homkk_core::Int| x.magnitude() == &num_one();
    let unimodular = unit(&s.u.determinant()) && unit(&s.v.determinant());
    let diagonal = s.diagonal();
    Ok(json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "rank": s.rank,
        "diagonal": ints_to_json(&diagonal),
        "u": matrix_to_json(&s.u),
        "d": matrix_to_json(&s.d),
        "v": matrix_to_json(&s.v),
        "check": { "u_m_v_equals_d": verified, "unimodular": unimodular },
    }))
}

fn num_one() -> num_bigint::BigUint {
    num_bigint::BigUint::from(1u8)
}

fn hom_ext(d: &Decoder, inputs: &[Value], hom: bool) -> Outcome {
    let (g, h) = if inputs.len() == 2 {
        (
            d.graded_group(&inputs[0], &input(0))?,
            d.graded_group(&inputs[1], &input(1))?,
        )
    } else {
        let o = inputs[0]
            .as_object()
            .ok_or_else(|| Failure::invalid(input(0), "expected an object"))?;
        let get = |k: &str| {
            o.get(k).ok_or_else(|| {
                Failure::invalid(input(0), format!("missing field \"{k}\" (or pass two group documents)"))
            })
        };
        (
            d.graded_group(get("source")?, &format!("{}.source", input(0)))?,
            d.graded_group(get("target")?, &format!("{}.target", input(0)))?,
        )
    };
    let group = if hom {
        hom_group(&g, &h).group()
    } else {
        ext_group(&g, &h).group()
    };
    Ok(json!({
        "source": graded_summary(&g),
        "target": graded_summary(&h),
        if hom { "hom" } else { "ext" }: graded_summary(&group),
    }))
}

fn z_pair(d: &Decoder, inputs: &[Value]) -> std::result::Result<(ZObject, ZObject), Failure> {
    let a = d.z_object(&inputs[0], &input(0))?;
    let b = if inputs.len() > 1 {
        d.z_object(&inputs[1], &input(1))?
    } else {
        a.clone()
    };
    Ok((a, b))
}

fn ext2_class(c: &Ext2Class) -> Value {
    json!({
        "parity": c.parity.name(),
        "coordinates": ints_to_json(&c.coordinates),
        "is_zero": c.is_zero,
        "representative": ext_to_json(&c.representative),
    })
}

fn classify_z(d: &Decoder, inputs: &[Value]) -> Outcome {
    let (a, b) = z_pair(d, inputs)?;
    let Some(t) = inputs.get(2) else {
        let w = search_equivalence(&a, &b)?;
        return Ok(json!({
            "t0": "searched",
            "equivalent": w.is_some(),
            "witness": w.as_ref().map(uct_class_to_json),
        }));
    };
    let t0 = d.map(t, a.group(), b.group(), 0, &input(2))?;
    let relative = relative_obstruction_z(&a, &b, &t0)?;
    let decision = equivalent_z(&a, &b, &t0)?;
    let witness = match &decision {
        Decision::Equivalent(w) => Some(uct_class_to_json(w)),
        Decision::Obstructed(_) => None,
    };
    Ok(json!({
        "t0": "given",
        "relative_obstruction": ext2_class(&relative),
        "equivalent": decision.is_equivalent(),
        "witness": witness,
    }))
}

fn ups_location(v: &UpsViolation) -> String {
    match v {
        UpsViolation::DuplicateVertex(x) | UpsViolation::UnknownVertex(x) => format!("vertex {x}"),
        UpsViolation::DuplicateEdge(x, y) => format!("edge {x}->{y}"),
        UpsViolation::Cycle(c) => format!("cycle {}", c.join("->")),
        UpsViolation::TwoPaths { from, to } => format!("paths {from}->{to}"),
    }
}

fn validate_ups(d: &Decoder, v: &Value) -> Outcome {
    let (vertices, edges) = d.graph(v, &input(0))?;
    let sp = UniquePathSpace::new(vertices, edges).map_err(|e| Failure {
        exit_code: 2,
        invariant: Some("unique path space".into()),
        location: ups_location(&e),
        message: e.to_string(),
    })?;
    let order: Vec<Value> = sp
        .order_relation()
        .iter()
        .map(|&(x, y)| json!([sp.label(x), sp.label(y)]))
        .collect();
    Ok(json!({ "valid": true, "vertices": sp.len(), "edges": sp.edges().len(), "order": order }))
}

fn resolve_diagram(d: &Decoder, v: &Value) -> Outcome {
    let x = d.x_object(v, &input(0))?;
    let sp = &x.diagram.space;
    let res = canonical_diagram_resolution(&x.diagram)?;
    let vertices: Vec<Value> = (0..sp.len())
        .map(|z| {
            let h = &res.certificate[z];
            json!({
                "vertex": sp.label(z),
                "f0_summands": res.f0_summands[z].iter().map(|&y| sp.label(y)).collect::<Vec<_>>(),
                "f1_summands": res.f1_summands[z].iter().map(|&e| sp.edge_label(e)).collect::<Vec<_>>(),
                "psi": map_to_json(&res.psi[z]),
                "q": map_to_json(&res.q[z]),
                "homology": {
                    "at_f1": h.at_f1.to_string(),
                    "at_f0": h.at_f0.to_string(),
                    "at_g": h.at_g.to_string(),
                },
                "exact": h.is_exact(),
            })
        })
        .collect();
    Ok(json!({ "exact": res.is_exact(), "vertices": vertices }))
}

fn diagram_class(x: &XObject, c: &DiagramClass) -> Value {
    let sp = &x.diagram.space;
    let rep: Map<String, Value> = c
        .representative
        .iter()
        .enumerate()
        .map(|(e, r)| (sp.edge_label(e), ext_to_json(r)))
        .collect();
    json!({
        "degree": c.degree,
        "coordinates": ints_to_json(&c.coordinates),
        "is_zero": c.is_zero,
        "representative": rep,
    })
}

fn classify_x_cmd(d: &Decoder, inputs: &[Value]) -> Outcome {
    let a = d.x_object(&inputs[0], &input(0))?;
    let b = d.x_object(&inputs[1], &input(1))?;
    let t0 = d.vertex_maps(&inputs[2], &a.diagram, &b.diagram, &input(2))?;
    let relative = relative_obstruction_x(&a, &b, &t0)?;
    let decision = classify_x(&a, &b, &t0)?;
    let sp = &a.diagram.space;
    let witness = match &decision {
        Decision::Equivalent(w) => {
            let m: Map<String, Value> = w
                .iter()
                .enumerate()
                .map(|(x, t)| (sp.label(x).to_string(), uct_class_to_json(t)))
                .collect();
            Some(Value::Object(m))
        }
        Decision::Obstructed(_) => None,
    };
    let witness_is_zero = match &decision {
        Decision::Equivalent(w) => Some(w.iter().all(|t| t.odd.is_zero())),
        Decision::Obstructed(_) => None,
    };
    Ok(json!({
        "relative_obstruction": diagram_class(&a, &relative),
        "equivalent": decision.is_equivalent(),
        "witness": witness,
        "witness_ext_parts_zero": witness_is_zero,
    }))
}

fn nt_module(ctx: &Context, v: &Value) -> std::result::Result<NTModule, Failure> {
    if let Some(n) = v.get("n").and_then(Value::as_u64) {
        if n as usize > ctx.max_n {
            return Err(Failure {
                exit_code: 3,
                invariant: Some("n bound".into()),
                location: format!("{}.n", input(0)),
                message: format!("n = {n} exceeds --max-n {}", ctx.max_n),
            });
        }
    }
    Ok(ctx.decoder.nt_module(v, &input(0))?)
}

fn exact_module(ctx: &Context, v: &Value) -> std::result::Result<NTModule, Failure> {
    let m = nt_module(ctx, v)?;
    nt_validate(&m).map_err(|v| Failure::violation(v, 2))?;
    check_exact(&m).map_err(|v| Failure::violation(v, 3))?;
    Ok(m)
}

fn slot_summary(m: &NTModule) -> Value {
    Value::Object(
        m.slots()
            .iter()
            .map(|(s, g)| (s.to_string(), json!(g.to_string())))
            .collect(),
    )
}

fn nt_resolve(ctx: &Context, v: &Value) -> Outcome {
    let m = exact_module(ctx, v)?;
    let res = build_resolution(&m)?;
    verify_resolution(&m, &res).map_err(|v| Failure::violation(v, 3))?;
    let n = m.n();
    let mut slots = Map::new();
    for (s, g) in m.slots() {
        let (ss, _) = ss_quotient(&m, *s)?;
        slots.insert(
            s.to_string(),
            json!({
                "group": g.to_string(),
                "semisimple_quotient": ss.to_string(),
                "q0_rank": res.q0[s].gens(),
                "q1_rank": res.q1[s].gens(),
                "f": map_to_json(&res.f[s]),
            }),
        );
    }
    let mut lifts = BTreeMap::new();
    for ((y, x), f) in &res.phi {
        let parity = tau(n, *x, *y)?.parity().map(|p| p.name());
        lifts.insert(
            format!("{y}->{x}"),
            json!({
                "from": format!("Q1{y}"),
                "to": format!("Q0{x}"),
                "tau_parity": parity,
                "map": map_to_json(f),
            }),
        );
    }
    Ok(json!({ "n": n, "verified": true, "slots": slots, "phi": lifts }))
}

fn nt_obstruct(ctx: &Context, v: &Value) -> Outcome {
    let m = exact_module(ctx, v)?;
    let res = build_resolution(&m)?;
    verify_resolution(&m, &res).map_err(|v| Failure::violation(v, 3))?;
    let obs = obstruction_filtrated(&m, &res)?;
    let raw: Map<String, Value> = obs
        .raw
        .iter()
        .map(|((e, y), f)| (format!("e={e},{y}"), map_to_json(f)))
        .collect();
    let classes: Vec<Value> = obs.classes.iter().map(ext_to_json).collect();
    let group = ext2_diagram(&obs.object.diagram, &obs.object.diagram)?.parts[1]
        .group()
        .clone();
    Ok(json!({
        "raw_boundaries": raw,
        "edge_classes": classes,
        "ext2_odd": { "invariant_factors": ints_to_json(&group.invariant_factors()), "summary": group.to_string() },
        "obstruction": diagram_class(&obs.object, &obs.class),
    }))
}

fn nt_bridge(ctx: &Context, v: &Value) -> Outcome {
    let m = exact_module(ctx, v)?;
    let r = extension_bridge_n2(&m)?;
    let group = homkk_core::ext::Space::group(&r.target).clone();
    let class = if r.via_resolution.is_zero() {
        "zero".to_string()
    } else {
        format!("nonzero in {group}")
    };
    Ok(json!({
        "via_resolution": ext_to_json(&r.via_resolution),
        "via_six_term": ext_to_json(&r.via_six_term),
        "coordinates": { "via_resolution": ints_to_json(&r.coordinates[0]), "via_six_term": ints_to_json(&r.coordinates[1]) },
        "ext_group": group.to_string(),
        "agree": r.agree,
        "agree_up_to_sign": r.agree_up_to_sign,
        "class": class,
    }))
}
