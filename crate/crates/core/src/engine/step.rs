use alloc::vec;
use alloc::vec::Vec;

use super::{format_action, EngineError};
use crate::model::{
    evaluate, evaluate_formula, GroundAction, GroundFluentId, History, NumericMode,
    ObservationSignature, Value, Weight, WeightError, WorldState,
};
use crate::theory::{ActionPattern, ActionTheory, PatArg};

/// Whether the precondition of `action` holds at the newest state.
pub fn poss<H: History + ?Sized>(
    theory: &ActionTheory,
    action: &GroundAction,
    history: &H,
) -> Result<bool, EngineError> {
    let s = theory.schema(action.schema);
    Ok(evaluate_formula(
        &theory.vocab,
        &s.poss,
        history,
        &action.args,
    )?)
}

/// The likelihood of `action` at the newest state, as a weight.
pub fn likelihood<H: History + ?Sized>(
    theory: &ActionTheory,
    action: &GroundAction,
    history: &H,
    mode: NumericMode,
) -> Result<Weight, EngineError> {
    let s = theory.schema(action.schema);
    let v = evaluate(&theory.vocab, &s.likelihood, history, &action.args)?;
    Weight::from_value(&v, mode).map_err(|e| match e {
        WeightError::Negative(value) => EngineError::NegativeLikelihood {
            action: format_action(theory, action),
            value,
        },
        source => EngineError::Weight {
            context: alloc::format!("likelihood of {}", format_action(theory, action)),
            source,
        },
    })
}

pub fn signature(theory: &ActionTheory, action: &GroundAction) -> ObservationSignature {
    let s = theory.schema(action.schema);
    ObservationSignature {
        group: s.group,
        args: s.observed.iter().map(|i| action.args[*i].clone()).collect(),
    }
}

/// Every ground action with the given signature, schema by schema in
/// group order and then lexicographically in domain order.
pub fn oi_class(theory: &ActionTheory, sig: &ObservationSignature) -> Vec<GroundAction> {
    let mut out = Vec::new();
    'schemas: for &id in &theory.group(sig.group).members {
        let s = theory.schema(id);
        if s.observed.len() != sig.args.len() {
            continue;
        }
        let mut choices: Vec<Vec<Value>> = Vec::with_capacity(s.params.len());
        for (i, p) in s.params.iter().enumerate() {
            let d = theory.vocab.domain(p.domain);
            match s.observed.iter().position(|o| *o == i) {
                Some(k) => {
                    if !d.contains(&sig.args[k]) {
                        continue 'schemas;
                    }
                    choices.push(vec![sig.args[k].clone()]);
                }
                None if d.is_finite() => choices.push(d.values().collect()),
                None => continue 'schemas,
            }
        }
        for args in product(&choices) {
            out.push(GroundAction { schema: id, args });
        }
    }
    out
}

/// Cartesian product, last position varying fastest.
pub(crate) fn product(choices: &[Vec<Value>]) -> Vec<Vec<Value>> {
    let mut out: Vec<Vec<Value>> = vec![Vec::new()];
    for c in choices {
        let mut next = Vec::with_capacity(out.len() * c.len());
        for prefix in &out {
            for v in c {
                let mut row = prefix.clone();
                row.push(v.clone());
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// The successor world of `history`'s newest state under `action`.
pub fn apply_action<H: History + ?Sized>(
    theory: &ActionTheory,
    action: &GroundAction,
    history: &H,
) -> Result<WorldState, EngineError> {
    let vocab = &theory.vocab;
    let old = history.current();
    let mut next = old.clone();
    for i in 0..vocab.ground_count() {
        let g = GroundFluentId(i as u32);
        let (f, fargs) = vocab.ground(g);
        let rule = theory.rule(f);
        for case in &rule.cases {
            let Some(env) = match_pattern(&case.pattern, case.vars.len(), fargs, action) else {
                continue;
            };
            if let Some(guard) = &case.guard {
                if !evaluate_formula(vocab, guard, history, &env)? {
                    continue;
                }
            }
            let v = evaluate(vocab, &case.value, history, &env)?;
            let range = vocab.range_of(g);
            if !range.contains(&v) {
                return Err(EngineError::OutOfRange {
                    action: format_action(theory, action),
                    fluent: vocab.ground_name(g),
                    value: vocab.format_value(&v),
                });
            }
            next.set(g, v);
            break;
        }
    }
    Ok(next)
}

/// Binds the fluent arguments and the pattern's variables, or `None` if the
/// pattern does not match.
fn match_pattern(
    p: &ActionPattern,
    slots: usize,
    fluent_args: &[Value],
    action: &GroundAction,
) -> Option<Vec<Value>> {
    if let Some(s) = p.schema {
        if s != action.schema {
            return None;
        }
    }
    let mut env: Vec<Value> = Vec::with_capacity(slots);
    env.extend_from_slice(fluent_args);
    env.resize(slots, Value::Bool(false));
    for (a, v) in p.args.iter().zip(&action.args) {
        match a {
            PatArg::Wild => {}
            PatArg::Bind(i) => env[*i] = v.clone(),
            PatArg::Match(i) => {
                if env[*i].sem_eq(v) != Ok(true) {
                    return None;
                }
            }
            PatArg::Lit(x) => {
                if x.sem_eq(v) != Ok(true) {
                    return None;
                }
            }
        }
    }
    Some(env)
}
