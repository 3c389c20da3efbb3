use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::belief::{bel, initial_belief, know, progress};
use super::program::{signature_sequences, simulate_program, StepOutcome};
use super::step::{apply_action, likelihood, oi_class, poss};
use super::{format_signature, EngineError};
use crate::model::{
    BeliefState, BinaryOp, GroundAction, History, NumericMode, ObservationSignature, Trajectory,
    Value, Weight, WorldState,
};
use crate::theory::{pretty_program, ActionTheory, Assertion, QueryKind, Scenario, Step};

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub mode: NumericMode,
    /// Thread an actual history and sample the environment's choices.
    pub simulate: bool,
    pub seed: u64,
    /// Merge members that no formula of the theory or scenario can tell
    /// apart.
    pub collapse: bool,
    /// Float mode only: drop members below this share of the total weight.
    pub prune_epsilon: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            mode: NumericMode::Exact,
            simulate: false,
            seed: 0,
            collapse: true,
            prune_epsilon: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum QueryValue {
    Bel(Weight),
    Know(bool),
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryResult {
    pub kind: QueryKind,
    pub formula: String,
    pub value: QueryValue,
}

/// The belief after one progression (or the initial belief, at step 0).
#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry {
    pub step: usize,
    /// 1-based index of the scenario statement that produced the entry.
    pub statement: Option<usize>,
    pub signature: Option<ObservationSignature>,
    /// Simulation only.
    pub action: Option<GroundAction>,
    /// Simulation only.
    pub actual: Option<WorldState>,
    /// Normalized weight per world; `None` if every member has weight 0.
    pub belief: Option<Vec<(WorldState, Weight)>>,
    pub members: usize,
    pub queries: Vec<QueryResult>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub entries: Vec<TraceEntry>,
    pub final_belief: BeliefState,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioErrorKind {
    Engine(EngineError),
    MissingActual,
    AssertionFailed { expected: String, found: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioError {
    /// 1-based statement index; 0 for setup before the first statement.
    pub step: usize,
    pub kind: ScenarioErrorKind,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.step;
        match &self.kind {
            ScenarioErrorKind::Engine(EngineError::ImpossibleObservation { signature }) => write!(
                f,
                "impossible observation at step {n}: no K-related situation admits {signature}"
            ),
            ScenarioErrorKind::Engine(e) => write!(f, "step {n}: {e}"),
            ScenarioErrorKind::MissingActual => {
                f.write_str("simulation needs an `actual { ... }` world in the scenario")
            }
            ScenarioErrorKind::AssertionFailed { expected, found } => {
                write!(
                    f,
                    "assertion failed at step {n}: expected {expected}, found {found}"
                )
            }
        }
    }
}

impl core::error::Error for ScenarioError {}

struct Runner<'a, R> {
    theory: &'a ActionTheory,
    opts: &'a RunOptions,
    depth: usize,
    belief: BeliefState,
    actual: Option<Trajectory>,
    rng: R,
    entries: Vec<TraceEntry>,
}

/// Runs the scenario's statements in order. Belief mode needs only
/// observations; `exec` then requires the program's observations to be
/// the same from every K-related situation. Simulation mode samples the
/// actual action of every `observe` and `exec` from the actual world.
pub fn run_scenario(
    theory: &ActionTheory,
    scenario: &Scenario,
    opts: &RunOptions,
) -> Result<Trace, ScenarioError> {
    let at = |step| {
        move |e: EngineError| ScenarioError {
            step,
            kind: ScenarioErrorKind::Engine(e),
        }
    };
    let belief = initial_belief(theory, opts.mode).map_err(at(0))?;
    let actual = if opts.simulate {
        let w = scenario.actual().ok_or(ScenarioError {
            step: 0,
            kind: ScenarioErrorKind::MissingActual,
        })?;
        Some(Trajectory::initial(usize::MAX, w.clone()))
    } else {
        None
    };
    let mut r = Runner {
        theory,
        opts,
        depth: theory.max_back().max(scenario.max_back()),
        belief,
        actual,
        rng: ChaCha8Rng::seed_from_u64(opts.seed),
        entries: Vec::new(),
    };
    r.record(None, None, None);
    for (i, s) in scenario.steps.iter().enumerate() {
        let n = i + 1;
        match &s.step {
            Step::Actual(_) => {}
            Step::Observe(sig) => r.observe(sig, n).map_err(at(n))?,
            Step::Exec(p) => r.exec(p, n).map_err(at(n))?,
            Step::Query(q) => {
                let value = match q.kind {
                    QueryKind::Bel => {
                        QueryValue::Bel(bel(theory, &r.belief, &q.formula).map_err(at(n))?)
                    }
                    QueryKind::Know => {
                        QueryValue::Know(know(theory, &r.belief, &q.formula).map_err(at(n))?)
                    }
                };
                let last = r.entries.last_mut().expect("initial entry");
                last.queries.push(QueryResult {
                    kind: q.kind,
                    formula: q.text.clone(),
                    value,
                });
            }
            Step::Assert(a) => {
                let last = r
                    .entries
                    .iter()
                    .rev()
                    .find_map(|e| e.queries.last())
                    .expect("scenario checks that a query precedes every assertion");
                check(a, &last.value).map_err(|(expected, found)| ScenarioError {
                    step: n,
                    kind: ScenarioErrorKind::AssertionFailed { expected, found },
                })?;
            }
        }
    }
    Ok(Trace {
        entries: r.entries,
        final_belief: r.belief,
    })
}

impl<R: rand::RngCore> Runner<'_, R> {
    fn record(
        &mut self,
        statement: Option<usize>,
        sig: Option<ObservationSignature>,
        action: Option<GroundAction>,
    ) {
        self.entries.push(TraceEntry {
            step: self.belief.step(),
            statement,
            signature: sig,
            action,
            actual: self.actual.as_ref().map(|t| t.current().clone()),
            belief: self.belief.world_distribution(),
            members: self.belief.len(),
            queries: Vec::new(),
        });
    }

    fn advance(
        &mut self,
        sig: &ObservationSignature,
        n: usize,
        action: Option<GroundAction>,
    ) -> Result<(), EngineError> {
        let mut b = progress(self.theory, &self.belief, sig)?;
        if self.opts.collapse {
            b = b.collapse(self.depth);
        }
        if let Some(eps) = self.opts.prune_epsilon {
            b = b.prune(eps);
        }
        self.belief = b;
        self.record(Some(n), Some(sig.clone()), action);
        Ok(())
    }

    fn observe(&mut self, sig: &ObservationSignature, n: usize) -> Result<(), EngineError> {
        let Some(actual) = self.actual.clone() else {
            return self.advance(sig, n, None);
        };
        let mut candidates = Vec::new();
        let mut weights = Vec::new();
        for a in oi_class(self.theory, sig) {
            if poss(self.theory, &a, &actual)? {
                weights.push(likelihood(self.theory, &a, &actual, NumericMode::Float)?.to_f64());
                candidates.push(a);
            }
        }
        let dist = rand::distr::weighted::WeightedIndex::new(&weights).map_err(|_| {
            EngineError::Unexecutable {
                command: alloc::format!("observe {}", format_signature(self.theory, sig)),
            }
        })?;
        let a = candidates.swap_remove(rand::distr::Distribution::sample(&dist, &mut self.rng));
        let w = apply_action(self.theory, &a, &actual)?;
        self.actual = Some(actual.extend(a.clone(), w));
        self.advance(sig, n, Some(a))
    }

    fn exec(&mut self, p: &crate::model::Program, n: usize) -> Result<(), EngineError> {
        if let Some(actual) = self.actual.clone() {
            let outcomes: Vec<StepOutcome> =
                simulate_program(self.theory, &actual, p, &mut self.rng)?;
            for o in outcomes {
                let t = self.actual.take().expect("simulating");
                self.actual = Some(t.extend(o.action.clone(), o.world));
                self.advance(&o.signature, n, Some(o.action))?;
            }
            return Ok(());
        }
        let seqs = signature_sequences(
            self.theory,
            p,
            self.belief.members().iter().map(|m| &m.trajectory),
        )?;
        match seqs.len() {
            0 => Err(EngineError::NoExecution(pretty_program(self.theory, p))),
            1 => {
                for sig in &seqs[0] {
                    self.advance(sig, n, None)?;
                }
                Ok(())
            }
            count => Err(EngineError::Ambiguous {
                program: pretty_program(self.theory, p),
                count,
            }),
        }
    }
}

/// Compares a query result with an assertion; on failure returns the
/// expected and found values as text.
fn check(a: &Assertion, found: &QueryValue) -> Result<(), (String, String)> {
    let expected = || alloc::format!("{} {}", a.op.symbol(), show(&a.value));
    match found {
        QueryValue::Know(k) => {
            let want = a.value.as_bool().unwrap_or(false);
            let ok = match a.op {
                BinaryOp::Ne => *k != want,
                _ => *k == want,
            };
            if ok {
                Ok(())
            } else {
                Err((expected(), alloc::format!("{k}")))
            }
        }
        QueryValue::Bel(w) => {
            let ord = match w {
                Weight::Exact(r) => Value::from_rational(r.clone()).num_cmp(&a.value),
                Weight::Float(x) => Value::Float(*x).num_cmp(&a.value),
            }
            .unwrap_or(Ordering::Equal);
            let within = a.tolerance.as_ref().map(|t| {
                let diff = match w {
                    Weight::Exact(r) => Value::from_rational(r.clone()).sub(&a.value),
                    Weight::Float(x) => Value::Float(*x).sub(&a.value),
                };
                diff.and_then(|d| d.abs())
                    .and_then(|d| d.num_cmp(t))
                    .map(|o| o != Ordering::Greater)
                    .unwrap_or(false)
            });
            let ok = match (a.op, within) {
                (BinaryOp::Eq, Some(w)) => w,
                (BinaryOp::Ne, Some(w)) => !w,
                (BinaryOp::Eq, None) => ord == Ordering::Equal,
                (BinaryOp::Ne, None) => ord != Ordering::Equal,
                (BinaryOp::Lt, _) => ord == Ordering::Less,
                (BinaryOp::Le, _) => ord != Ordering::Greater,
                (BinaryOp::Gt, _) => ord == Ordering::Greater,
                (BinaryOp::Ge, _) => ord != Ordering::Less,
                _ => false,
            };
            if ok {
                Ok(())
            } else {
                let mut e = expected();
                if let Some(t) = &a.tolerance {
                    e.push_str(&alloc::format!(" within {}", show(t)));
                }
                Err((e, alloc::format!("{w}")))
            }
        }
    }
}

fn show(v: &Value) -> String {
    alloc::format!("{v}")
}
