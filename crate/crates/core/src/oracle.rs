//! Brute-force reference semantics.
//!
//! Every situation reachable through the observed signatures is
//! materialized from scratch: all ground actions of all schemas are
//! enumerated and compared against the signature by group name and
//! visible arguments, successor values come straight from the rules (or,
//! for compiled rules, from the original effect clauses), and each leaf
//! carries its initial weight times the product of its step likelihoods.
//! Nothing here calls into [`crate::engine`].

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::model::{
    cartesian, evaluate, evaluate_formula, Domain, EvalError, Formula, GroundAction,
    GroundFluentId, ObservationSignature, Rational, Value, WorldState,
};
use crate::theory::{ActionPattern, ActionTheory, Effect, EffectClause, PatArg, RuleOrigin};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("{0}")]
    Eval(#[from] EvalError),
    #[error("the oracle needs finite domains for every action parameter")]
    Unbounded,
    #[error("the oracle works on exact weights only")]
    NotExact,
    #[error("no situation is consistent with the observations")]
    EmptyTree,
    #[error("all leaves have weight 0")]
    ZeroDenominator,
}

/// A materialized situation: its states from oldest to newest and its
/// weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Leaf {
    pub states: Vec<WorldState>,
    pub actions: Vec<GroundAction>,
    pub weight: Rational,
}

/// All leaves of the situation tree for the given observation sequence.
pub fn situation_tree(
    theory: &ActionTheory,
    signatures: &[ObservationSignature],
) -> Result<Vec<Leaf>, OracleError> {
    let actions = all_actions(theory)?;
    let mut level: Vec<Leaf> = Vec::new();
    for w in &theory.init {
        level.push(Leaf {
            states: alloc::vec![w.world.clone()],
            actions: Vec::new(),
            weight: exact(&w.weight)?,
        });
    }
    for sig in signatures {
        let mut next = Vec::new();
        for leaf in &level {
            for a in &actions {
                if !same_signature(theory, a, sig) {
                    continue;
                }
                let s = theory.schema(a.schema);
                if !evaluate_formula(&theory.vocab, &s.poss, &leaf.states[..], &a.args)? {
                    continue;
                }
                let l = exact(&evaluate(
                    &theory.vocab,
                    &s.likelihood,
                    &leaf.states[..],
                    &a.args,
                )?)?;
                let succ = successor(theory, a, &leaf.states)?;
                let mut states = leaf.states.clone();
                states.push(succ);
                let mut acts = leaf.actions.clone();
                acts.push(a.clone());
                next.push(Leaf {
                    states,
                    actions: acts,
                    weight: &leaf.weight * &l,
                });
            }
        }
        level = next;
    }
    Ok(level)
}

/// Degree of belief in `formula` after the observations.
pub fn oracle_bel(
    theory: &ActionTheory,
    signatures: &[ObservationSignature],
    formula: &Formula,
) -> Result<Rational, OracleError> {
    let leaves = situation_tree(theory, signatures)?;
    let mut num = Rational::zero();
    let mut den = Rational::zero();
    for leaf in &leaves {
        den += &leaf.weight;
        if evaluate_formula(&theory.vocab, formula, &leaf.states[..], &[])? {
            num += &leaf.weight;
        }
    }
    if den.is_zero() {
        return Err(if leaves.is_empty() {
            OracleError::EmptyTree
        } else {
            OracleError::ZeroDenominator
        });
    }
    Ok(num / den)
}

/// Truth of `formula` in every leaf, zero-weight leaves included.
pub fn oracle_know(
    theory: &ActionTheory,
    signatures: &[ObservationSignature],
    formula: &Formula,
) -> Result<bool, OracleError> {
    let leaves = situation_tree(theory, signatures)?;
    if leaves.is_empty() {
        return Err(OracleError::EmptyTree);
    }
    for leaf in &leaves {
        if !evaluate_formula(&theory.vocab, formula, &leaf.states[..], &[])? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Normalized weight of each final world, in world order.
pub fn oracle_distribution(
    theory: &ActionTheory,
    signatures: &[ObservationSignature],
) -> Result<Vec<(WorldState, Rational)>, OracleError> {
    let leaves = situation_tree(theory, signatures)?;
    if leaves.is_empty() {
        return Err(OracleError::EmptyTree);
    }
    let mut table: BTreeMap<WorldState, Rational> = BTreeMap::new();
    let mut total = Rational::zero();
    for leaf in leaves {
        total += &leaf.weight;
        let w = leaf.states.last().expect("nonempty history").clone();
        *table.entry(w).or_insert_with(Rational::zero) += leaf.weight;
    }
    if total.is_zero() {
        return Err(OracleError::ZeroDenominator);
    }
    Ok(table.into_iter().map(|(w, p)| (w, p / &total)).collect())
}

fn exact(v: &Value) -> Result<Rational, OracleError> {
    match v {
        Value::Float(_) => Err(OracleError::NotExact),
        _ => v.to_rational().ok_or(OracleError::NotExact),
    }
}

fn all_actions(theory: &ActionTheory) -> Result<Vec<GroundAction>, OracleError> {
    let mut out = Vec::new();
    for (i, s) in theory.schemas.iter().enumerate() {
        let domains: Vec<&Domain> = s
            .params
            .iter()
            .map(|p| theory.vocab.domain(p.domain))
            .collect();
        if domains.iter().any(|d| !d.is_finite()) {
            return Err(OracleError::Unbounded);
        }
        for args in cartesian(&domains) {
            out.push(GroundAction {
                schema: crate::model::SchemaId(i as u32),
                args,
            });
        }
    }
    Ok(out)
}

fn same_signature(theory: &ActionTheory, a: &GroundAction, sig: &ObservationSignature) -> bool {
    let s = theory.schema(a.schema);
    theory.groups[s.group.0 as usize].name == theory.groups[sig.group.0 as usize].name
        && s.observed.len() == sig.args.len()
        && s.observed
            .iter()
            .zip(&sig.args)
            .all(|(i, v)| a.args[*i].sem_eq(v) == Ok(true))
}

fn successor(
    theory: &ActionTheory,
    a: &GroundAction,
    states: &[WorldState],
) -> Result<WorldState, OracleError> {
    let vocab = &theory.vocab;
    let now = states.last().expect("nonempty history");
    let mut values = Vec::with_capacity(vocab.ground_count());
    for i in 0..vocab.ground_count() {
        let g = GroundFluentId(i as u32);
        let (f, fargs) = vocab.ground(g);
        let old = now.get(g).clone();
        let rule = theory.rule(f);
        let v = match &rule.origin {
            RuleOrigin::Compiled(clauses) => from_clauses(theory, clauses, fargs, a, states, old)?,
            _ => {
                let mut v = old;
                for c in &rule.cases {
                    if let Some(env) = bind(&c.pattern, c.vars.len(), fargs, a) {
                        let guard = match &c.guard {
                            Some(g) => evaluate_formula(vocab, g, states, &env)?,
                            None => true,
                        };
                        if guard {
                            v = evaluate(vocab, &c.value, states, &env)?;
                            break;
                        }
                    }
                }
                v
            }
        };
        values.push(v);
    }
    Ok(WorldState::new(values))
}

/// `γ⁺ ∨ (F ∧ ¬γ⁻)` for relational fluents, the first applicable
/// assignment for functional ones.
fn from_clauses(
    theory: &ActionTheory,
    clauses: &[EffectClause],
    fargs: &[Value],
    a: &GroundAction,
    states: &[WorldState],
    old: Value,
) -> Result<Value, OracleError> {
    let mut pos = false;
    let mut neg = false;
    for c in clauses {
        let Some(env) = bind(&c.pattern, c.vars.len(), fargs, a) else {
            continue;
        };
        let targets = c.target.iter().enumerate().all(|(i, t)| match t {
            PatArg::Lit(v) => fargs[i].sem_eq(v) == Ok(true),
            _ => true,
        });
        if !targets {
            continue;
        }
        let holds = match &c.context {
            Some(g) => evaluate_formula(&theory.vocab, g, states, &env)?,
            None => true,
        };
        if !holds {
            continue;
        }
        match &c.effect {
            Effect::Positive => pos = true,
            Effect::Negative => neg = true,
            Effect::Assign(e) => return Ok(evaluate(&theory.vocab, e, states, &env)?),
        }
    }
    if clauses
        .iter()
        .any(|c| matches!(c.effect, Effect::Assign(_)))
    {
        return Ok(old);
    }
    let was = old.as_bool().unwrap_or(false);
    Ok(Value::Bool(pos || (was && !neg)))
}

fn bind(p: &ActionPattern, slots: usize, fargs: &[Value], a: &GroundAction) -> Option<Vec<Value>> {
    if p.schema.is_some_and(|s| s != a.schema) {
        return None;
    }
    let mut env: Vec<Option<Value>> = fargs.iter().cloned().map(Some).collect();
    env.resize(slots, None);
    for (pa, v) in p.args.iter().zip(&a.args) {
        let ok = match pa {
            PatArg::Wild => true,
            PatArg::Bind(i) => {
                env[*i] = Some(v.clone());
                true
            }
            PatArg::Match(i) => env[*i].as_ref().is_some_and(|x| x.sem_eq(v) == Ok(true)),
            PatArg::Lit(x) => x.sem_eq(v) == Ok(true),
        };
        if !ok {
            return None;
        }
    }
    Some(
        env.into_iter()
            .map(|v| v.unwrap_or(Value::Bool(false)))
            .collect(),
    )
}
