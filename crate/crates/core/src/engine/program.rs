use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::RngCore;

use super::step::{apply_action, likelihood, poss, product, signature};
use super::EngineError;
use crate::model::{
    evaluate, GroundAction, History, NumericMode, ObservationSignature, Program, Trajectory, Value,
    WorldState,
};
use crate::theory::{pretty_program, ActionTheory};

/// One executed primitive action in the actual world.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub action: GroundAction,
    pub signature: ObservationSignature,
    pub world: WorldState,
}

#[derive(Clone)]
struct Frame<'a> {
    program: &'a Program,
    env: Vec<Value>,
}

/// What remains to be executed, innermost frame last.
type Stack<'a> = Vec<Frame<'a>>;

/// The possible next primitive actions of `stack` at the newest state of
/// `history`, each with its continuation. Returns whether the stack may
/// also stop here.
fn first_steps<'a, H: History + ?Sized>(
    theory: &'a ActionTheory,
    mut stack: Stack<'a>,
    history: &H,
    out: &mut Vec<(GroundAction, Stack<'a>)>,
) -> Result<bool, EngineError> {
    let Some(Frame { program, env }) = stack.pop() else {
        return Ok(true);
    };
    match program {
        Program::Prim { schema, args } => {
            let s = theory.schema(*schema);
            let mut choices = Vec::with_capacity(args.len());
            for (a, p) in args.iter().zip(&s.params) {
                let d = theory.vocab.domain(p.domain);
                match a {
                    Some(e) => {
                        let v = evaluate(&theory.vocab, e, history, &env)?;
                        if !d.contains(&v) {
                            return Ok(false);
                        }
                        choices.push(vec![v]);
                    }
                    None if d.is_finite() => choices.push(d.values().collect()),
                    None => {
                        return Err(EngineError::Unexecutable {
                            command: alloc::format!(
                                "`{}` leaves unbounded parameter `{}` open",
                                s.name,
                                p.name
                            ),
                        })
                    }
                }
            }
            for args in product(&choices) {
                let a = GroundAction {
                    schema: *schema,
                    args,
                };
                if poss(theory, &a, history)? {
                    out.push((a, stack.clone()));
                }
            }
            Ok(false)
        }
        Program::Ground(a) => {
            if poss(theory, a, history)? {
                out.push((a.clone(), stack));
            }
            Ok(false)
        }
        Program::Seq(a, b) => {
            stack.push(Frame {
                program: b,
                env: env.clone(),
            });
            stack.push(Frame { program: a, env });
            first_steps(theory, stack, history, out)
        }
        Program::Choice(a, b) => {
            let mut left = stack.clone();
            left.push(Frame {
                program: a,
                env: env.clone(),
            });
            stack.push(Frame { program: b, env });
            let l = first_steps(theory, left, history, out)?;
            let r = first_steps(theory, stack, history, out)?;
            Ok(l || r)
        }
        Program::Pi { domain, body, .. } => {
            let mut done = false;
            for v in theory.vocab.domain(*domain).values() {
                let mut s = stack.clone();
                let mut e = env.clone();
                e.push(v);
                s.push(Frame {
                    program: body,
                    env: e,
                });
                done |= first_steps(theory, s, history, out)?;
            }
            Ok(done)
        }
        Program::Call { program, args } => {
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(evaluate(&theory.vocab, a, history, &env)?);
            }
            stack.push(Frame {
                program: &theory.programs[*program].body,
                env: vals,
            });
            first_steps(theory, stack, history, out)
        }
    }
}

/// Every terminal situation of `program` started in `from`, in a fixed
/// order and without duplicates. Primitive steps require their
/// preconditions; an empty result means the program cannot run.
pub fn run_program(
    theory: &ActionTheory,
    program: &Program,
    from: &Trajectory,
) -> Result<Vec<Trajectory>, EngineError> {
    let mut out = Vec::new();
    let stack = vec![Frame {
        program,
        env: Vec::new(),
    }];
    run(theory, from, stack, &mut out)?;
    Ok(out)
}

fn run<'a>(
    theory: &'a ActionTheory,
    traj: &Trajectory,
    stack: Stack<'a>,
    out: &mut Vec<Trajectory>,
) -> Result<(), EngineError> {
    let mut next = Vec::new();
    if first_steps(theory, stack, traj, &mut next)? && !out.contains(traj) {
        out.push(traj.clone());
    }
    for (a, cont) in next {
        let w = apply_action(theory, &a, traj)?;
        run(theory, &traj.extend(a, w), cont, out)?;
    }
    Ok(())
}

/// The distinct observation sequences `program` can produce from any
/// member of `members`, sorted.
pub fn signature_sequences<'t>(
    theory: &ActionTheory,
    program: &Program,
    members: impl IntoIterator<Item = &'t Trajectory>,
) -> Result<Vec<Vec<ObservationSignature>>, EngineError> {
    let mut seqs = BTreeSet::new();
    for t in members {
        for end in run_program(theory, program, t)? {
            let steps = end.steps_vec();
            let seq: Vec<ObservationSignature> = steps[t.len()..]
                .iter()
                .map(|(a, _)| signature(theory, a))
                .collect();
            seqs.insert(seq);
        }
    }
    Ok(seqs.into_iter().collect())
}

/// Executes the first primitive step of `command` in the actual history,
/// choosing among the possible completions with probability proportional
/// to their likelihood.
pub fn simulate_step<R: RngCore + ?Sized>(
    theory: &ActionTheory,
    actual: &Trajectory,
    command: &Program,
    rng: &mut R,
) -> Result<StepOutcome, EngineError> {
    let stack = vec![Frame {
        program: command,
        env: Vec::new(),
    }];
    let (outcome, _) = sample(theory, actual, vec![stack], command, rng)?
        .ok_or_else(|| unexecutable(theory, command))?;
    Ok(outcome)
}

/// Executes `command` to completion in the actual history, one sampled
/// primitive step at a time. Stops as soon as the program may terminate.
pub fn simulate_program<R: RngCore + ?Sized>(
    theory: &ActionTheory,
    actual: &Trajectory,
    command: &Program,
    rng: &mut R,
) -> Result<Vec<StepOutcome>, EngineError> {
    let mut conts = vec![vec![Frame {
        program: command,
        env: Vec::new(),
    }]];
    let mut traj = actual.clone();
    let mut outcomes = Vec::new();
    while let Some((o, next)) = sample(theory, &traj, conts, command, rng)? {
        traj = traj.extend(o.action.clone(), o.world.clone());
        outcomes.push(o);
        conts = next;
    }
    Ok(outcomes)
}

/// Samples the next step; `None` when some continuation is finished.
#[allow(clippy::type_complexity)]
fn sample<'a, R: RngCore + ?Sized>(
    theory: &'a ActionTheory,
    actual: &Trajectory,
    conts: Vec<Stack<'a>>,
    command: &Program,
    rng: &mut R,
) -> Result<Option<(StepOutcome, Vec<Stack<'a>>)>, EngineError> {
    let mut steps = Vec::new();
    for c in conts {
        if first_steps(theory, c, actual, &mut steps)? {
            return Ok(None);
        }
    }
    let mut actions: Vec<(GroundAction, Vec<Stack<'a>>)> = Vec::new();
    for (a, cont) in steps {
        match actions.iter_mut().find(|(b, _)| *b == a) {
            Some((_, cs)) => cs.push(cont),
            None => actions.push((a, vec![cont])),
        }
    }
    let mut weights = Vec::with_capacity(actions.len());
    for (a, _) in &actions {
        weights.push(likelihood(theory, a, actual, NumericMode::Float)?.to_f64());
    }
    let dist = WeightedIndex::new(&weights).map_err(|_| unexecutable(theory, command))?;
    let (action, next) = actions.swap_remove(dist.sample(rng));
    let world = apply_action(theory, &action, actual)?;
    Ok(Some((
        StepOutcome {
            signature: signature(theory, &action),
            action,
            world,
        },
        next,
    )))
}

fn unexecutable(theory: &ActionTheory, command: &Program) -> EngineError {
    EngineError::Unexecutable {
        command: pretty_program(theory, command),
    }
}
