//! Scenario scripts resolved against a theory.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::defs::ActionTheory;
use super::diag::{Diagnostic, ParseError};
use super::lower::{domain_ty, Ctx, Scope, Ty};
use super::parser::parse_steps;
use super::pretty::pretty_expr;
use super::syntax::{QueryKind, RawStep};
use crate::model::{BinaryOp, Formula, ObservationSignature, Program, Span, Value, WorldState};

#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub kind: QueryKind,
    pub formula: Formula,
    /// Normalized source text, used in traces.
    pub text: String,
}

/// A comparison against the result of the most recent query.
#[derive(Clone, Debug, PartialEq)]
pub struct Assertion {
    pub op: BinaryOp,
    pub value: Value,
    pub tolerance: Option<Value>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    /// The true initial world for simulation.
    Actual(WorldState),
    Observe(ObservationSignature),
    Exec(Program),
    Query(Query),
    Assert(Assertion),
}

impl Step {
    /// Whether the step advances the belief state.
    pub fn progresses(&self) -> bool {
        matches!(self, Step::Observe(_) | Step::Exec(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioStep {
    pub span: Span,
    pub step: Step,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Scenario {
    pub steps: Vec<ScenarioStep>,
}

impl Scenario {
    pub fn actual(&self) -> Option<&WorldState> {
        self.steps.iter().find_map(|s| match &s.step {
            Step::Actual(w) => Some(w),
            _ => None,
        })
    }

    /// Deepest `prev` used by any query.
    pub fn max_back(&self) -> usize {
        self.steps
            .iter()
            .filter_map(|s| match &s.step {
                Step::Query(q) => Some(q.formula.max_back()),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }
}

pub fn parse_scenario(text: &str, theory: &ActionTheory) -> Result<Scenario, ParseError> {
    let raw = parse_steps(text)?;
    let ctx = Ctx::from_theory(theory);
    let mut steps = Vec::new();
    let mut errors = Vec::new();
    let mut last_query: Option<QueryKind> = None;
    let mut progressed = false;
    let mut has_actual = false;
    for (span, r) in &raw {
        match lower_step(&ctx, theory, *span, r, last_query, progressed, has_actual) {
            Ok(step) => {
                match &step {
                    Step::Query(q) => last_query = Some(q.kind),
                    Step::Actual(_) => has_actual = true,
                    s if s.progresses() => progressed = true,
                    _ => {}
                }
                steps.push(ScenarioStep { span: *span, step });
            }
            Err(d) => errors.push(d),
        }
    }
    if errors.is_empty() {
        Ok(Scenario { steps })
    } else {
        Err(ParseError {
            diagnostics: errors,
        })
    }
}

fn lower_step(
    ctx: &Ctx,
    theory: &ActionTheory,
    span: Span,
    raw: &RawStep,
    last_query: Option<QueryKind>,
    progressed: bool,
    has_actual: bool,
) -> Result<Step, Diagnostic> {
    match raw {
        RawStep::Actual(assigns) => {
            if has_actual {
                return Err(Diagnostic::error(span, "`actual` given twice"));
            }
            if progressed {
                return Err(Diagnostic::error(
                    span,
                    "`actual` must come before any observe or exec step",
                ));
            }
            Ok(Step::Actual(ctx.world(assigns, span)?))
        }
        RawStep::Observe { group, args } => {
            let Some(gid) = theory.group_by_name(&group.text) else {
                return Err(Diagnostic::error(
                    group.span,
                    format!(
                        "unknown action schema or observation group `{}`",
                        group.text
                    ),
                ));
            };
            let first = theory.schema(theory.group(gid).members[0]);
            if args.len() != first.observed.len() {
                return Err(Diagnostic::error(
                    group.span,
                    format!(
                        "observation `{}` carries {} argument(s), got {}",
                        group.text,
                        first.observed.len(),
                        args.len()
                    ),
                ));
            }
            let mut values = Vec::new();
            for (a, i) in args.iter().zip(&first.observed) {
                let p = &first.params[*i];
                let domain = theory.vocab.domain(p.domain);
                let v = ctx.constant(a, Some(domain_ty(domain)), "observed argument")?;
                if !domain.contains(&v) {
                    return Err(Diagnostic::error(
                        a.span,
                        format!(
                            "{} is not in domain `{}` of `{}`",
                            theory.vocab.format_value(&v),
                            domain.name,
                            p.name
                        ),
                    ));
                }
                values.push(v);
            }
            Ok(Step::Observe(ObservationSignature {
                group: gid,
                args: values,
            }))
        }
        RawStep::Exec(p) => Ok(Step::Exec(ctx.program(p, &mut Scope::new())?)),
        RawStep::Query { kind, formula } => {
            let f = ctx.expr_of(formula, &mut Scope::new(), Ty::Bool, "query")?;
            Ok(Step::Query(Query {
                kind: *kind,
                text: pretty_expr(&theory.vocab, &f),
                formula: f,
            }))
        }
        RawStep::Assert {
            op,
            value,
            tolerance,
        } => {
            let Some(kind) = last_query else {
                return Err(Diagnostic::error(span, "`assert` needs a preceding query"));
            };
            let want = match kind {
                QueryKind::Bel => Ty::Num,
                QueryKind::Know => Ty::Bool,
            };
            if want == Ty::Bool && !matches!(op, BinaryOp::Eq | BinaryOp::Ne) {
                return Err(Diagnostic::error(
                    span,
                    "knowledge results can only be compared with `=` or `!=`",
                ));
            }
            let v = ctx.constant(value, Some(want), "asserted value")?;
            let tol = match tolerance {
                None => None,
                Some(t) => {
                    if want == Ty::Bool {
                        return Err(Diagnostic::error(
                            t.span,
                            "a tolerance only applies to belief queries",
                        ));
                    }
                    let t = ctx.constant(t, Some(Ty::Num), "tolerance")?;
                    if t.num_cmp(&Value::Int(0)) == Ok(core::cmp::Ordering::Less) {
                        return Err(Diagnostic::error(span, "tolerance must be nonnegative"));
                    }
                    Some(t)
                }
            };
            Ok(Step::Assert(Assertion {
                op: *op,
                value: v,
                tolerance: tol,
            }))
        }
    }
}
