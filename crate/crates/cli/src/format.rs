//! JSON and CSV rendering. Floats are rounded to 12 significant digits so
//! that reports are byte-stable across runs.

use serde_json::{json, Map, Value};
use sumideal::densities::DensityEstimate;
use sumideal::ideals::IdealVerdict;

pub const SCHEMA: u64 = 1;

pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(sig12(x))
    } else {
        Value::Null
    }
}

/// Wraps a report body with the schema version and command name.
pub fn envelope(command: &str, body: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    if let Value::Object(b) = body {
        m.extend(b);
    } else {
        m.insert("result".into(), body);
    }
    Value::Object(m)
}

pub fn render(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

pub fn estimate(e: &DensityEstimate) -> Value {
    json!({
        "value": num(e.value),
        "kind": e.kind.as_str(),
        "tail_window": [e.tail_window.0, e.tail_window.1],
        "stability": num(e.stability),
        "checkpoints": e.checkpoints.len(),
    })
}

pub fn estimate_csv(e: &DensityEstimate) -> String {
    let mut out = String::from("checkpoint_n,ratio,value,stability\n");
    for (n, r) in &e.checkpoints {
        out.push_str(&format!("{n},{},{},{}\n", sig12(*r), sig12(e.value), sig12(e.stability)));
    }
    out
}

pub fn verdict(v: &IdealVerdict) -> Value {
    json!({
        "verdict": v.verdict.as_str(),
        "partial_sum": num(v.partial_sum),
        "milestones_hit": v.milestones_hit,
        "evidence": v.evidence,
    })
}
