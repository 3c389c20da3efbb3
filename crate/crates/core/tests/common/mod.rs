#![allow(dead_code)]

pub mod gen;

use std::path::PathBuf;

use num_bigint::BigInt;
use sitcalc_core::model::{
    GroundAction, ObservationSignature, Program, Rational, Trajectory, Value, Weight, WorldState,
};
use sitcalc_core::theory::{parse_program, parse_scenario, parse_theory, ActionTheory, Step};

pub fn theory_file(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../theories")
        .join(name);
    std::fs::read_to_string(p).unwrap()
}

pub fn load(name: &str) -> ActionTheory {
    parse_theory(&theory_file(name)).unwrap()
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn exact(n: i64, d: i64) -> Weight {
    Weight::Exact(rat(n, d))
}

/// A world written as the body of an `actual { ... }` block.
pub fn world(t: &ActionTheory, body: &str) -> WorldState {
    let s = parse_scenario(&format!("actual {{{body}}}"), t).unwrap();
    s.actual().unwrap().clone()
}

pub fn start(t: &ActionTheory, body: &str) -> Trajectory {
    Trajectory::initial(0, world(t, body))
}

/// A signature written as in an `observe` statement.
pub fn sig(t: &ActionTheory, text: &str) -> ObservationSignature {
    let s = parse_scenario(&format!("observe {text}"), t).unwrap();
    match &s.steps[0].step {
        Step::Observe(o) => o.clone(),
        _ => unreachable!(),
    }
}

pub fn act(t: &ActionTheory, name: &str, args: &[Value]) -> GroundAction {
    GroundAction {
        schema: t.schema_by_name(name).unwrap(),
        args: args.to_vec(),
    }
}

pub fn sym(t: &ActionTheory, name: &str) -> Value {
    Value::Sym(t.vocab.symbol(name).unwrap())
}

pub fn program(t: &ActionTheory, text: &str) -> Program {
    parse_program(text, t).unwrap()
}

/// Value of the single fluent `name` in `w`.
pub fn fluent(t: &ActionTheory, w: &WorldState, name: &str, args: &[Value]) -> Value {
    let f = t.vocab.fluent_by_name(name).unwrap();
    w.get(t.vocab.ground_id(f, args).unwrap()).clone()
}

/// Runs one random small theory through both the engine and the oracle
/// and returns how many bel/know answers were compared, or a description
/// of the first disagreement.
pub fn crosscheck<R: rand::Rng>(rng: &mut R, max_depth: usize) -> Result<usize, String> {
    use rand::seq::IndexedRandom;
    use sitcalc_core::engine::{bel, initial_belief, know, progress};
    use sitcalc_core::model::NumericMode;
    use sitcalc_core::oracle::{oracle_bel, oracle_know, situation_tree};
    use sitcalc_core::theory::parse_formula;

    let st = gen::small_theory(rng);
    let t = parse_theory(&st.text).map_err(|e| format!("{e}\n{}", st.text))?;
    let depth = rng.random_range(0..=max_depth);
    let obs: Vec<String> = (0..depth)
        .map(|_| st.observations.choose(rng).unwrap().clone())
        .collect();
    let sigs: Vec<ObservationSignature> = obs.iter().map(|o| sig(&t, o)).collect();
    let context = || format!("{}observations: {obs:?}", st.text);

    let mut b = initial_belief(&t, NumericMode::Exact).map_err(|e| e.to_string())?;
    let leaves = situation_tree(&t, &sigs).map_err(|e| e.to_string())?;
    for s in &sigs {
        match progress(&t, &b, s) {
            Ok(next) => b = next,
            Err(_) if leaves.is_empty() => return Ok(1),
            Err(e) => {
                return Err(format!(
                    "engine failed ({e}) but the oracle has leaves\n{}",
                    context()
                ))
            }
        }
    }
    if leaves.len() != b.len() {
        return Err(format!(
            "{} members vs {} leaves\n{}",
            b.len(),
            leaves.len(),
            context()
        ));
    }

    let mut formulas = st.formulas.clone();
    if depth > 0 {
        formulas.extend(st.history_formulas.iter().cloned());
    }
    let mut compared = 0;
    for text in &formulas {
        let f = parse_formula(text, &t).map_err(|e| e.to_string())?;
        let collapsed = b.collapse(f.max_back());
        for belief in [&b, &collapsed] {
            let engine = bel(&t, belief, &f)
                .ok()
                .map(|w| w.as_rational().unwrap().clone());
            let oracle = oracle_bel(&t, &sigs, &f).ok();
            if engine != oracle {
                return Err(format!(
                    "bel({text}): engine {engine:?}, oracle {oracle:?}\n{}",
                    context()
                ));
            }
            let engine = know(&t, belief, &f).map_err(|e| e.to_string())?;
            let oracle = oracle_know(&t, &sigs, &f).map_err(|e| e.to_string())?;
            if engine != oracle {
                return Err(format!(
                    "know({text}): engine {engine}, oracle {oracle}\n{}",
                    context()
                ));
            }
            compared += 2;
        }
    }
    Ok(compared)
}

/// Normalized belief in each value of the integer fluent `name`, with
/// zero entries dropped.
pub fn marginal(
    t: &ActionTheory,
    b: &sitcalc_core::model::BeliefState,
    name: &str,
) -> std::collections::BTreeMap<i64, Rational> {
    let mut out = std::collections::BTreeMap::new();
    for (w, p) in b.world_distribution().unwrap() {
        let Value::Int(x) = fluent(t, &w, name, &[]) else {
            panic!("`{name}` is not an integer fluent")
        };
        *out.entry(x).or_insert_with(|| rat(0, 1)) += p.as_rational().unwrap();
    }
    out.retain(|_, p| *p != rat(0, 1));
    out
}

pub fn table(pairs: &[(i64, Rational)]) -> std::collections::BTreeMap<i64, Rational> {
    pairs.iter().cloned().collect()
}
