use alloc::vec::Vec;

use super::step::{apply_action, likelihood, oi_class, poss};
use super::{format_signature, EngineError};
use crate::model::{
    evaluate_formula, BeliefState, Formula, Member, NumericMode, ObservationSignature, Trajectory,
    Weight,
};
use crate::theory::ActionTheory;

/// The weighted initial worlds as a step-0 belief state.
pub fn initial_belief(
    theory: &ActionTheory,
    mode: NumericMode,
) -> Result<BeliefState, EngineError> {
    if theory.init.is_empty() {
        return Err(EngineError::NoInitialBelief);
    }
    let mut members = Vec::with_capacity(theory.init.len());
    for (i, w) in theory.init.iter().enumerate() {
        let weight = Weight::from_value(&w.weight, mode).map_err(|source| EngineError::Weight {
            context: alloc::format!("initial world {}", i + 1),
            source,
        })?;
        members.push(Member {
            trajectory: Trajectory::initial(i, w.world.clone()),
            weight,
        });
    }
    let b = BeliefState::new(0, members, mode).expect("initial members are uniform");
    if b.total_weight().is_zero() {
        return Err(EngineError::ZeroInitialWeight);
    }
    Ok(b)
}

/// One K/p update: every member branches into each possible action of the
/// observed class, weighted by the member's weight times the action's
/// likelihood. Zero-weight successors are kept.
pub fn progress(
    theory: &ActionTheory,
    belief: &BeliefState,
    sig: &ObservationSignature,
) -> Result<BeliefState, EngineError> {
    let class = oi_class(theory, sig);
    let mode = belief.mode();
    let mut members = Vec::new();
    for m in belief.members() {
        for a in &class {
            if !poss(theory, a, &m.trajectory)? {
                continue;
            }
            let l = likelihood(theory, a, &m.trajectory, mode)?;
            let next = apply_action(theory, a, &m.trajectory)?;
            members.push(Member {
                trajectory: m.trajectory.extend(a.clone(), next),
                weight: m.weight.mul(&l),
            });
        }
    }
    if members.is_empty() {
        return Err(EngineError::ImpossibleObservation {
            signature: format_signature(theory, sig),
        });
    }
    Ok(BeliefState::new(belief.step() + 1, members, mode).expect("successors are uniform"))
}

/// Normalized weight of the members satisfying `formula`.
pub fn bel(
    theory: &ActionTheory,
    belief: &BeliefState,
    formula: &Formula,
) -> Result<Weight, EngineError> {
    let total = belief.total_weight();
    if total.is_zero() {
        return Err(EngineError::BeliefUndefined);
    }
    let mut sat = Weight::zero(belief.mode());
    for m in belief.members() {
        if evaluate_formula(&theory.vocab, formula, &m.trajectory, &[])? {
            sat = sat.add(&m.weight);
        }
    }
    Ok(sat.checked_div(&total).expect("total is nonzero"))
}

/// Truth of `formula` in every K-related situation, weighted or not.
pub fn know(
    theory: &ActionTheory,
    belief: &BeliefState,
    formula: &Formula,
) -> Result<bool, EngineError> {
    if belief.is_empty() {
        return Err(EngineError::EmptyBelief);
    }
    for m in belief.members() {
        if !evaluate_formula(&theory.vocab, formula, &m.trajectory, &[])? {
            return Ok(false);
        }
    }
    Ok(true)
}
