use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Map, Value as Json};
use sitcalc_core::engine::{
    format_action, format_signature, format_world, world_entries, QueryValue, RunOptions, Trace,
    TraceEntry,
};
use sitcalc_core::model::{format_rational, NumericMode, Rational, Weight, WorldState};
use sitcalc_core::theory::{ActionTheory, QueryKind};

/// Exact weights as `"num/den"` strings, float weights as numbers.
fn weight(w: &Weight) -> Json {
    match w {
        Weight::Exact(r) => Json::String(format_rational(r)),
        Weight::Float(x) => json!(x),
    }
}

fn world(theory: &ActionTheory, w: &WorldState) -> Json {
    let mut m = Map::new();
    for (k, v) in world_entries(theory, w) {
        m.insert(k, Json::String(v));
    }
    Json::Object(m)
}

fn query_kind(k: QueryKind) -> &'static str {
    match k {
        QueryKind::Bel => "bel",
        QueryKind::Know => "know",
    }
}

fn entry_json(theory: &ActionTheory, e: &TraceEntry) -> Json {
    let mut m = Map::new();
    m.insert("step".into(), json!(e.step));
    m.insert(
        "signature".into(),
        e.signature
            .as_ref()
            .map_or(Json::Null, |s| Json::String(format_signature(theory, s))),
    );
    if let Some(a) = &e.action {
        m.insert("action".into(), Json::String(format_action(theory, a)));
    }
    if let Some(w) = &e.actual {
        m.insert("actual".into(), world(theory, w));
    }
    m.insert("members".into(), json!(e.members));
    m.insert(
        "belief".into(),
        match &e.belief {
            Some(b) => Json::Array(
                b.iter()
                    .map(|(w, p)| json!({"world": world(theory, w), "weight": weight(p)}))
                    .collect(),
            ),
            None => Json::Null,
        },
    );
    let queries: Vec<Json> = e
        .queries
        .iter()
        .map(|q| {
            let result = match &q.value {
                QueryValue::Bel(w) => weight(w),
                QueryValue::Know(k) => Json::Bool(*k),
            };
            json!({"kind": query_kind(q.kind), "formula": q.formula, "result": result})
        })
        .collect();
    m.insert("queries".into(), Json::Array(queries));
    Json::Object(m)
}

pub fn json(theory: &ActionTheory, trace: &Trace, opts: &RunOptions) -> String {
    let doc = json!({
        "mode": if opts.simulate { "simulate" } else { "belief" },
        "numeric": match opts.mode {
            NumericMode::Exact => "exact",
            NumericMode::Float => "float",
        },
        "seed": if opts.simulate { json!(opts.seed) } else { Json::Null },
        "steps": trace.entries.iter().map(|e| entry_json(theory, e)).collect::<Vec<_>>(),
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("trace serializes");
    s.push('\n');
    s
}

/// One row per (step, ground fluent, value): the marginal belief in that
/// value, as a float and, in exact mode, as a fraction.
pub fn csv(theory: &ActionTheory, trace: &Trace) -> anyhow::Result<String> {
    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record(["step", "fluent", "value", "probability", "exact"])?;
    for e in &trace.entries {
        let Some(b) = &e.belief else { continue };
        // fluent index -> value text -> summed weight, in first-seen value order
        let mut marginals: Vec<Vec<(String, Weight)>> = Vec::new();
        let mut names = Vec::new();
        for (w, p) in b {
            let entries = world_entries(theory, w);
            if marginals.is_empty() {
                marginals = vec![Vec::new(); entries.len()];
                names = entries.iter().map(|(k, _)| k.clone()).collect();
            }
            for (i, (_, v)) in entries.into_iter().enumerate() {
                match marginals[i].iter_mut().find(|(x, _)| *x == v) {
                    Some((_, acc)) => *acc = acc.add(p),
                    None => marginals[i].push((v, p.clone())),
                }
            }
        }
        for (name, values) in names.iter().zip(marginals) {
            for (v, p) in values {
                let exact = p.as_rational().map(format_rational).unwrap_or_default();
                out.write_record([
                    &e.step.to_string(),
                    name,
                    &v,
                    &p.to_f64().to_string(),
                    &exact,
                ])?;
            }
        }
    }
    Ok(String::from_utf8(out.into_inner()?)?)
}

/// Human-readable belief tables, worlds with zero belief omitted.
pub fn text(theory: &ActionTheory, trace: &Trace) -> String {
    let mut s = String::new();
    for e in &trace.entries {
        match &e.signature {
            Some(sig) => write!(s, "S{}  after {}", e.step, format_signature(theory, sig)).unwrap(),
            None => write!(s, "S{}  initial", e.step).unwrap(),
        }
        if let Some(a) = &e.action {
            write!(s, " (actual {})", format_action(theory, a)).unwrap();
        }
        writeln!(s, ", {} situations", e.members).unwrap();
        match &e.belief {
            Some(b) => {
                for (w, p) in b.iter().filter(|(_, p)| !p.is_zero()) {
                    writeln!(s, "  {:>12}  {}", fraction(p), format_world(theory, w)).unwrap();
                }
            }
            None => writeln!(s, "  belief undefined: every situation has weight 0").unwrap(),
        }
        for q in &e.queries {
            let v = match &q.value {
                QueryValue::Bel(w) => show_weight(w),
                QueryValue::Know(k) => k.to_string(),
            };
            writeln!(s, "  {} {} = {v}", query_kind(q.kind), q.formula).unwrap();
        }
    }
    s
}

fn fraction(w: &Weight) -> String {
    match w {
        Weight::Exact(r) if r.is_integer() => r.numer().to_string(),
        _ => w.to_string(),
    }
}

fn show_weight(w: &Weight) -> String {
    match w {
        Weight::Exact(r) if !r.is_integer() => {
            format!("{} ({:.6})", format_rational(r), w.to_f64())
        }
        _ => fraction(w),
    }
}

/// Exact normalized weights keyed by world, for comparisons.
pub fn exact_table(b: &[(WorldState, Weight)]) -> BTreeMap<WorldState, Rational> {
    b.iter()
        .filter_map(|(w, p)| p.as_rational().map(|r| (w.clone(), r.clone())))
        .collect()
}
