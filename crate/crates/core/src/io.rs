//! JSON forms of algebras, frames, models and reports.
//!
//! Object keys are emitted in sorted order so output is byte-stable.

use serde_json::{json, Map, Value};

use crate::algebra::{OperatorKind, OperatorTable, PsAlgebra};
use crate::boolean::{BooleanAlgebra, Element};
use crate::embedding::AlgebraEmbedding;
use crate::error::{Error, Result};
use crate::frames::{FrameEmbedding, TernaryFrame, TripleSet, WorldSet};
use crate::logic::{Model, SoundnessReport};
use crate::predicates::{PredicateReport, Witness};
use crate::search::{RunManifest, SearchKind};

fn fmt_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn str_array(v: &Value, what: &str) -> Result<Vec<String>> {
    v.as_array()
        .ok_or_else(|| fmt_err(format!("{what} must be an array of strings")))?
        .iter()
        .map(|s| {
            s.as_str()
                .map(str::to_string)
                .ok_or_else(|| fmt_err(format!("{what} must be an array of strings")))
        })
        .collect()
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| fmt_err(format!("invalid JSON: {e}")))
}

pub fn element_json(base: &BooleanAlgebra, x: Element) -> Value {
    json!(base.element_names(x))
}

pub fn algebra_to_json(a: &PsAlgebra) -> Value {
    let names = a.base().atom_names();
    let table = |t: &OperatorTable| {
        let mut m = Map::new();
        for (p, pn) in names.iter().enumerate() {
            for (q, qn) in names.iter().enumerate() {
                m.insert(format!("{pn},{qn}"), element_json(a.base(), t.at(p, q)));
            }
        }
        Value::Object(m)
    };
    json!({
        "atoms": names,
        "f": table(a.f_table()),
        "g": table(a.g_table()),
    })
}

pub fn algebra_from_json(v: &Value) -> Result<PsAlgebra> {
    let names = str_array(
        v.get("atoms").ok_or_else(|| fmt_err("algebra needs \"atoms\""))?,
        "\"atoms\"",
    )?;
    let base = BooleanAlgebra::new(names.clone()).map_err(|e| fmt_err(e.to_string()))?;
    let n = names.len();
    let table = |key: &str, kind| -> Result<OperatorTable> {
        let obj = v
            .get(key)
            .and_then(Value::as_object)
            .ok_or_else(|| fmt_err(format!("algebra needs an object \"{key}\"")))?;
        for k in obj.keys() {
            let ok = k
                .split_once(',')
                .is_some_and(|(p, q)| names.iter().any(|n| n == p) && names.iter().any(|n| n == q));
            if !ok {
                return Err(fmt_err(format!("\"{key}\" has unknown atom pair \"{k}\"")));
            }
        }
        let mut entries = Vec::with_capacity(n * n);
        for p in &names {
            for q in &names {
                let cell = obj
                    .get(&format!("{p},{q}"))
                    .ok_or_else(|| fmt_err(format!("\"{key}\" is missing \"{p},{q}\"")))?;
                let members = str_array(cell, &format!("\"{key}\".\"{p},{q}\""))?;
                entries.push(base.element_from_names(&members).map_err(|e| fmt_err(e.to_string()))?);
            }
        }
        OperatorTable::new(kind, n, entries)
    };
    let f = table("f", OperatorKind::Possibility)?;
    let g = table("g", OperatorKind::Sufficiency)?;
    PsAlgebra::new(base, f, g)
}

fn triples_json(frame: &TernaryFrame, rel: &TripleSet) -> Value {
    let w = frame.worlds();
    Value::Array(rel.iter().map(|[a, b, c]| json!([w[a], w[b], w[c]])).collect())
}

/// Special frames carry one relation; `"S"` is omitted for them.
pub fn frame_to_json(frame: &TernaryFrame) -> Value {
    let mut m = Map::new();
    m.insert("worlds".into(), json!(frame.worlds()));
    m.insert("R".into(), triples_json(frame, frame.r()));
    if frame.is_special() {
        m.insert("special".into(), json!(true));
    } else {
        m.insert("S".into(), triples_json(frame, frame.s()));
    }
    Value::Object(m)
}

fn triples_from_json(v: Option<&Value>, names: &[String], key: &str) -> Result<Vec<[String; 3]>> {
    let Some(v) = v else {
        return Ok(Vec::new());
    };
    let arr = v
        .as_array()
        .ok_or_else(|| fmt_err(format!("\"{key}\" must be an array of triples")))?;
    arr.iter()
        .map(|t| {
            let t = str_array(t, &format!("\"{key}\" entries"))?;
            let [a, b, c]: [String; 3] = t
                .try_into()
                .map_err(|_| fmt_err(format!("\"{key}\" entries must have three worlds")))?;
            for w in [&a, &b, &c] {
                if !names.contains(w) {
                    return Err(fmt_err(format!("\"{key}\" mentions undeclared world `{w}`")));
                }
            }
            Ok([a, b, c])
        })
        .collect()
}

/// A missing `"S"` is empty, unless `"special": true`, in which case it is `R`.
pub fn frame_from_json(v: &Value) -> Result<TernaryFrame> {
    let names = str_array(
        v.get("worlds").ok_or_else(|| fmt_err("frame needs \"worlds\""))?,
        "\"worlds\"",
    )?;
    let special = match v.get("special") {
        None => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err(fmt_err("\"special\" must be a boolean")),
    };
    let r = triples_from_json(v.get("R"), &names, "R")?;
    let s = if special && v.get("S").is_none() {
        r.clone()
    } else {
        triples_from_json(v.get("S"), &names, "S")?
    };
    let frame = TernaryFrame::from_named(&names, &r, &s)?;
    if special {
        if frame.r() != frame.s() {
            return Err(fmt_err("frame is marked special but R ≠ S"));
        }
        return TernaryFrame::new_special(names, frame.r().clone());
    }
    Ok(frame)
}

pub fn world_set_json(frame: &TernaryFrame, set: WorldSet) -> Value {
    json!(frame.world_names(set))
}

pub fn model_to_json(m: &Model) -> Value {
    let mut v = frame_to_json(m.frame());
    let mut val = Map::new();
    for (k, set) in m.valuation().iter().enumerate() {
        val.insert(format!("p{k}"), world_set_json(m.frame(), *set));
    }
    v.as_object_mut()
        .expect("object")
        .insert("valuation".into(), Value::Object(val));
    v
}

/// Valuation keys must be `p<k>`; gaps are empty sets.
pub fn valuation_from_json(frame: &TernaryFrame, v: Option<&Value>) -> Result<Vec<WorldSet>> {
    let Some(v) = v else {
        return Ok(Vec::new());
    };
    let obj = v
        .as_object()
        .ok_or_else(|| fmt_err("\"valuation\" must be an object"))?;
    let mut out = Vec::new();
    for (key, worlds) in obj {
        let k: usize = key
            .strip_prefix('p')
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| fmt_err(format!("valuation key `{key}` is not a variable p<k>")))?;
        let names = str_array(worlds, &format!("valuation of {key}"))?;
        if out.len() <= k {
            out.resize(k + 1, WorldSet::ZERO);
        }
        out[k] = frame.world_set_from_names(&names)?;
    }
    Ok(out)
}

/// Model from JSON. `unchecked` skips the wMIA requirement.
pub fn model_from_json(v: &Value, unchecked: bool) -> Result<Model> {
    let frame = frame_from_json(v)?;
    let val = valuation_from_json(&frame, v.get("valuation"))?;
    if unchecked {
        Model::new_unchecked(frame, val)
    } else {
        Model::new(frame, val)
    }
}

pub fn embedding_to_json(e: &AlgebraEmbedding) -> Value {
    let base = e.source.base();
    let mut map = Map::new();
    for x in base.elements() {
        let key = format!("[{}]", base.element_names(x).join(","));
        map.insert(key, world_set_json(&e.target, e.image(x)));
    }
    json!({
        "injective": e.injective,
        "f_commutes": e.f_commutes,
        "g_commutes": e.g_commutes,
        "worlds": e.target.num_worlds(),
        "map": map,
    })
}

pub fn frame_embedding_to_json(frame: &TernaryFrame, e: &FrameEmbedding) -> Value {
    let mut map = Map::new();
    for (w, &img) in e.map.map.iter().enumerate() {
        map.insert(frame.worlds()[w].clone(), json!(e.canonical.worlds()[img]));
    }
    let mut v = Map::new();
    v.insert("injective".into(), json!(e.injective));
    v.insert("r_preserved".into(), json!(e.r_preserved));
    v.insert("s_preserved".into(), json!(e.s_preserved));
    v.insert("worlds".into(), json!(e.canonical.num_worlds()));
    v.insert("map".into(), Value::Object(map));
    if let Some([a, b, c]) = e.failure {
        let w = frame.worlds();
        v.insert("failure".into(), json!([w[a], w[b], w[c]]));
    }
    Value::Object(v)
}

/// Witness rendering: elements by atom names, worlds by world names.
pub fn report_json(rep: &PredicateReport, base: Option<&BooleanAlgebra>, frame: Option<&TernaryFrame>) -> Value {
    let mut m = Map::new();
    m.insert("id".into(), json!(rep.id));
    m.insert("holds".into(), json!(rep.holds));
    if let Some(w) = &rep.witness {
        m.insert("witness".into(), witness_json(w, base, frame));
    }
    Value::Object(m)
}

pub fn witness_json(w: &Witness, base: Option<&BooleanAlgebra>, frame: Option<&TernaryFrame>) -> Value {
    match w {
        Witness::Elements(es) => Value::Array(
            es.iter()
                .map(|&x| match base {
                    Some(b) => element_json(b, x),
                    None => json!(x.bits()),
                })
                .collect(),
        ),
        Witness::Worlds(ws) => Value::Array(
            ws.iter()
                .map(|&i| match frame {
                    Some(f) => json!(f.worlds()[i]),
                    None => json!(i),
                })
                .collect(),
        ),
        Witness::Countermodel { valuation, world } => {
            let mut val = Map::new();
            for (k, set) in valuation.iter().enumerate() {
                val.insert(
                    format!("p{k}"),
                    match frame {
                        Some(f) => world_set_json(f, *set),
                        None => json!(set.atoms().collect::<Vec<_>>()),
                    },
                );
            }
            json!({
                "valuation": val,
                "world": match frame {
                    Some(f) => json!(f.worlds()[*world]),
                    None => json!(world),
                },
            })
        }
        Witness::Disagreement { formula, true_in_left } => json!({
            "formula": formula,
            "true_in_left": true_in_left,
        }),
    }
}

pub fn soundness_json(frame: &TernaryFrame, rep: &SoundnessReport) -> Value {
    let schemas: Vec<Value> = rep
        .schemas
        .iter()
        .map(|s| {
            let mut m = Map::new();
            m.insert("schema".into(), json!(s.schema.id()));
            m.insert("instances".into(), json!(s.instances.to_string()));
            m.insert("valid".into(), json!(s.valid()));
            if let Some(f) = &s.failure {
                let w = Witness::Countermodel {
                    valuation: f.valuation.clone(),
                    world: f.world,
                };
                let mut fm = witness_json(&w, None, Some(frame));
                fm.as_object_mut()
                    .expect("object")
                    .insert("instance".into(), json!(f.instance.render_sugared()));
                m.insert("failure".into(), fm);
            }
            Value::Object(m)
        })
        .collect();
    json!({
        "depth": rep.depth,
        "vars": rep.vars,
        "pool_size": rep.pool_size,
        "valuations": rep.valuations,
        "all_valid": rep.all_valid(),
        "schemas": schemas,
    })
}

/// The run manifest. `elapsed_ms` is only included when `with_timing` is set.
pub fn manifest_json(m: &RunManifest, with_timing: bool) -> Value {
    let mut v = json!({
        "kind": match m.kind {
            SearchKind::Algebras => "algebras",
            SearchKind::Frames => "frames",
        },
        "size": m.size,
        "mode": m.mode,
        "require": m.require,
        "forbid": m.forbid,
        "space": m.space.to_string(),
        "examined": m.examined.to_string(),
        "matched": m.matched,
        "cursor": m.cursor.to_string(),
        "exhausted": m.exhausted,
    });
    if with_timing {
        v.as_object_mut()
            .expect("object")
            .insert("elapsed_ms".into(), json!(m.elapsed_ms.to_string()));
    }
    v
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}
