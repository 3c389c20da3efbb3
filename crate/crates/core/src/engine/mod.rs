//! Belief progression: preconditions, action application, observation
//! classes, likelihoods, the K/p update, queries, program execution and
//! seeded simulation.

mod belief;
mod program;
mod run;
mod step;

pub use belief::{bel, initial_belief, know, progress};
pub use program::{run_program, signature_sequences, simulate_program, simulate_step, StepOutcome};
pub use run::{
    run_scenario, QueryResult, QueryValue, RunOptions, ScenarioError, ScenarioErrorKind, Trace,
    TraceEntry,
};
pub use step::{apply_action, likelihood, oi_class, poss, signature};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::model::{EvalError, GroundAction, ObservationSignature, WeightError, WorldState};
use crate::theory::{pretty_value, ActionTheory};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("{0}")]
    Eval(#[from] EvalError),
    #[error("{context}: {source}")]
    Weight {
        context: String,
        source: WeightError,
    },
    #[error("likelihood of {action} is negative ({value})")]
    NegativeLikelihood { action: String, value: String },
    #[error("{action} sets `{fluent}` to {value}, outside its range (add a range condition to its precondition)")]
    OutOfRange {
        action: String,
        fluent: String,
        value: String,
    },
    #[error("impossible observation: no K-related situation admits {signature}")]
    ImpossibleObservation { signature: String },
    #[error("belief undefined (division by zero): every K-related situation has weight 0")]
    BeliefUndefined,
    #[error("knowledge query on an empty belief state")]
    EmptyBelief,
    #[error("theory has no initial worlds")]
    NoInitialBelief,
    #[error("initial weights must have a positive total")]
    ZeroInitialWeight,
    #[error("command unexecutable in actual world: {command}")]
    Unexecutable { command: String },
    #[error("`{program}` has {count} distinguishable outcomes; run it in simulate mode")]
    Ambiguous { program: String, count: usize },
    #[error("`{0}` has no executions in any K-related situation")]
    NoExecution(String),
}

/// `advance(1, 2)`.
pub fn format_action(theory: &ActionTheory, a: &GroundAction) -> String {
    call_text(&theory.schema(a.schema).name, theory, &a.args)
}

/// `sense-position(11)`.
pub fn format_signature(theory: &ActionTheory, s: &ObservationSignature) -> String {
    call_text(&theory.group(s.group).name, theory, &s.args)
}

/// `{position = 10}`.
pub fn format_world(theory: &ActionTheory, w: &WorldState) -> String {
    let parts: Vec<String> = world_entries(theory, w)
        .into_iter()
        .map(|(k, v)| format!("{k} = {v}"))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

/// `(ground fluent name, value)` pairs in ground-fluent order.
pub fn world_entries(theory: &ActionTheory, w: &WorldState) -> Vec<(String, String)> {
    let v = &theory.vocab;
    (0..v.ground_count())
        .map(|i| {
            let g = crate::model::GroundFluentId(i as u32);
            (v.ground_name(g), pretty_value(v, w.get(g)))
        })
        .collect()
}

fn call_text(name: &str, theory: &ActionTheory, args: &[crate::model::Value]) -> String {
    if args.is_empty() {
        return String::from(name);
    }
    let a: Vec<String> = args
        .iter()
        .map(|x| pretty_value(&theory.vocab, x))
        .collect();
    format!("{name}({})", a.join(", "))
}
