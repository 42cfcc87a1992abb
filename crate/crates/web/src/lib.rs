//! WebAssembly bindings for the browser demo.
//!
//! Every export takes plain strings and returns a JSON string so the page
//! needs no generated type glue beyond `wasm-bindgen`'s string passing.
//! Failures come back as `{"error": "..."}`.

use mwo_core::classifier::{classify, explain, format_score, verdict_line};
use mwo_core::discovery::{discover, PreferenceQuery, Target};
use mwo_core::kb::{build_seed_kb, ROOT_CLASS};
use mwo_core::parser::parse_service;
use mwo_core::vocabulary::{parse_assignment, FeatureKey, FeatureKind};
use mwo_core::{Ontology, Score};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn error(msg: impl std::fmt::Display) -> Value {
    json!({ "error": msg.to_string() })
}

fn score_json(s: &Score) -> Value {
    json!({ "num": s.numer(), "den": s.denom(), "text": format_score(s, 2) })
}

/// Classifies an MWO `service { ... }` document against the seed profiles.
pub fn classify_value(text: &str) -> Value {
    let service = match parse_service(text) {
        Ok(s) => s,
        Err(e) => return error(e),
    };
    let kb = build_seed_kb();
    let result = match classify(&kb, &service) {
        Ok(r) => r,
        Err(e) => return error(e),
    };
    let ranking: Vec<Value> = result
        .ranking
        .iter()
        .map(|r| {
            json!({
                "type": r.type_class.as_str(),
                "score": score_json(&r.score),
                "comparable": r.comparable,
            })
        })
        .collect();
    json!({
        "service": result.service.as_str(),
        "verdict": result.verdict.kind(),
        "types": result.verdict.types().iter().map(|c| c.as_str()).collect::<Vec<_>>(),
        "summary": verdict_line(&result),
        "ranking": ranking,
        "explanation": explain(&result),
    })
}

/// Runs a discovery query. `required` and `preferred` hold one `key=value`
/// per line; preferred lines may end in `:weight` (a positive integer).
pub fn discover_value(required: &str, preferred: &str, target: &str) -> Value {
    let Some(target) = Target::from_name(target) else {
        return error(format!("unknown target '{target}'"));
    };
    let mut query = PreferenceQuery::new();
    for line in required.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let (key, value) = match parse_assignment(line) {
            Ok(kv) => kv,
            Err(e) => return error(e),
        };
        if let Err(e) = query.require(key, value) {
            return error(e);
        }
    }
    for line in preferred.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let (assignment, weight) = match line.rsplit_once(':') {
            Some((a, w)) => match w.trim().parse::<u64>() {
                Ok(w) if w > 0 => (a, w),
                _ => return error(format!("invalid weight in '{line}'")),
            },
            None => (line, 1),
        };
        let (key, value) = match parse_assignment(assignment.trim()) {
            Ok(kv) => kv,
            Err(e) => return error(e),
        };
        if let Err(e) = query.prefer(key, value, Score::from_integer(weight)) {
            return error(e);
        }
    }
    match discover(&build_seed_kb(), &query, target) {
        Ok(r) => {
            let matches: Vec<Value> = r
                .matches
                .iter()
                .map(|m| json!({ "entity": m.entity, "score": score_json(&m.score) }))
                .collect();
            json!({ "target": target.as_str(), "matches": matches })
        }
        Err(e) => error(e),
    }
}

fn subtree(o: &Ontology, class: &str) -> Value {
    let children: Vec<Value> = o
        .taxonomy()
        .direct_subclasses(class)
        .into_iter()
        .map(|c| subtree(o, c.as_str()))
        .collect();
    let instances: Vec<&str> = o
        .individuals()
        .filter(|(_, types)| types.iter().any(|t| t.as_str() == class))
        .map(|(i, _)| i.as_str())
        .collect();
    json!({ "name": class, "instances": instances, "children": children })
}

/// The seed class hierarchy below `root` (empty means the top class), with
/// directly typed individuals at each node.
pub fn taxonomy_value(root: &str) -> Value {
    let kb = build_seed_kb();
    let root = if root.trim().is_empty() { ROOT_CLASS } else { root.trim() };
    if !kb.ontology().has_class(root) {
        return error(format!("unknown class '{root}'"));
    }
    subtree(kb.ontology(), root)
}

/// Feature keys with their kinds and allowed values, for building forms.
pub fn vocabulary_value() -> Value {
    let keys: Vec<Value> = FeatureKey::ALL
        .iter()
        .map(|k| {
            let kind = match k.kind() {
                FeatureKind::Categorical => "categorical",
                FeatureKind::Set => "set",
                FeatureKind::Boolean => "boolean",
            };
            json!({ "key": k.as_str(), "kind": kind, "values": k.allowed_values() })
        })
        .collect();
    Value::Array(keys)
}

#[wasm_bindgen(js_name = classifyService)]
pub fn classify_service(text: &str) -> String {
    classify_value(text).to_string()
}

#[wasm_bindgen(js_name = discoverMiddleware)]
pub fn discover_middleware(required: &str, preferred: &str, target: &str) -> String {
    discover_value(required, preferred, target).to_string()
}

#[wasm_bindgen]
pub fn taxonomy(root: &str) -> String {
    taxonomy_value(root).to_string()
}

#[wasm_bindgen]
pub fn vocabulary() -> String {
    vocabulary_value().to_string()
}
