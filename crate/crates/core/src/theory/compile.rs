//! Effect axioms to successor-state rules under the completeness assumption.

use alloc::string::String;
use alloc::vec::Vec;

use super::defs::{Case, Effect, EffectClause, PatArg, RuleOrigin, SuccessorRule};
use crate::model::{BinaryOp, Expr, FluentId, Vocabulary};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("effect clause targets `{found}` but the rule is for `{expected}`")]
    MixedTargets { expected: String, found: String },
    #[error("effects on `{0}` mix `causes`/`causes not` with `:=`")]
    MixedKinds(String),
}

/// Builds the successor rule for `fluent` from its effect clauses.
///
/// Relational fluents get the positive clauses first (value `true`), then
/// the negative ones (value `false`); with first-match-wins evaluation and
/// the persistence default this is `γ⁺ ∨ (F ∧ ¬γ⁻)`. Functional clauses
/// keep their order. No clauses gives the pure frame rule.
pub fn compile_effect_axioms(
    vocab: &Vocabulary,
    fluent: FluentId,
    clauses: Vec<EffectClause>,
) -> Result<SuccessorRule, CompileError> {
    if let Some(c) = clauses.iter().find(|c| c.fluent != fluent) {
        return Err(CompileError::MixedTargets {
            expected: vocab.fluent(fluent).name.clone(),
            found: vocab.fluent(c.fluent).name.clone(),
        });
    }
    if clauses.is_empty() {
        return Ok(SuccessorRule::frame(fluent));
    }
    let functional = clauses
        .iter()
        .filter(|c| matches!(c.effect, Effect::Assign(_)))
        .count();
    if functional != 0 && functional != clauses.len() {
        return Err(CompileError::MixedKinds(vocab.fluent(fluent).name.clone()));
    }
    let rank = |c: &EffectClause| match c.effect {
        Effect::Positive | Effect::Assign(_) => 0,
        Effect::Negative => 1,
    };
    let mut order: Vec<&EffectClause> = clauses.iter().collect();
    order.sort_by_key(|c| rank(c));
    let cases = order.into_iter().map(clause_case).collect();
    Ok(SuccessorRule {
        fluent,
        cases,
        origin: RuleOrigin::Compiled(clauses),
    })
}

fn clause_case(c: &EffectClause) -> Case {
    let mut guard: Option<Expr> = None;
    for (i, t) in c.target.iter().enumerate() {
        if let PatArg::Lit(v) = t {
            let eq = Expr::binary(BinaryOp::Eq, Expr::var(&c.vars[i], i), Expr::lit(v.clone()));
            guard = Some(conj(guard, eq));
        }
    }
    if let Some(ctx) = &c.context {
        guard = Some(conj(guard, ctx.clone()));
    }
    let value = match &c.effect {
        Effect::Positive => Expr::lit(true),
        Effect::Negative => Expr::lit(false),
        Effect::Assign(e) => e.clone(),
    };
    Case {
        vars: c.vars.clone(),
        pattern: c.pattern.clone(),
        guard,
        value,
    }
}

fn conj(acc: Option<Expr>, e: Expr) -> Expr {
    match acc {
        Some(a) => Expr::binary(BinaryOp::And, a, e),
        None => e,
    }
}
