//! The action-theory language: lexing, parsing, name resolution, effect
//! compilation, validation, printing and scenario scripts.

mod compile;
mod defs;
mod diag;
mod lexer;
mod lower;
mod parser;
mod pretty;
mod scenario;
mod syntax;
mod validate;

pub use compile::{compile_effect_axioms, CompileError};
pub use defs::*;
pub use diag::{Diagnostic, ParseError, Severity};
pub use parser::parse_expr_text;
pub use pretty::{pretty_expr, pretty_program, pretty_theory, pretty_value};
pub use scenario::{parse_scenario, Assertion, Query, Scenario, ScenarioStep, Step};
pub use syntax::QueryKind;
pub use validate::{validate_theory, NORMALIZATION_BUDGET};

use alloc::vec::Vec;

use crate::model::{Formula, Span};

/// Parses and resolves a theory without running [`validate_theory`].
/// Warnings from resolution are returned alongside.
pub fn parse_theory_unvalidated(text: &str) -> Result<(ActionTheory, Vec<Diagnostic>), ParseError> {
    let items = parser::parse_items(text)?;
    lower::lower_theory(&items).map_err(|diagnostics| ParseError { diagnostics })
}

/// Parses, resolves and validates a theory. Fails if any diagnostic is an
/// error; warnings are dropped (see [`check_theory`] to keep them).
pub fn parse_theory(text: &str) -> Result<ActionTheory, ParseError> {
    check_theory(text).map(|(t, _)| t)
}

/// Like [`parse_theory`] but also returns warnings and notes.
pub fn check_theory(text: &str) -> Result<(ActionTheory, Vec<Diagnostic>), ParseError> {
    let (t, mut diags) = parse_theory_unvalidated(text)?;
    diags.extend(validate_theory(&t));
    if diags.iter().any(Diagnostic::is_error) {
        return Err(ParseError { diagnostics: diags });
    }
    Ok((t, diags))
}

/// Resolves a closed formula such as a query body against `theory`.
pub fn parse_formula(text: &str, theory: &ActionTheory) -> Result<Formula, ParseError> {
    let raw = parser::parse_expr_text(text)?;
    let ctx = lower::Ctx::from_theory(theory);
    Ok(ctx.expr_of(&raw, &mut Vec::new(), lower::Ty::Bool, "formula")?)
}

/// Resolves a closed program text such as `noisy-advance(1)`.
pub fn parse_program(
    text: &str,
    theory: &ActionTheory,
) -> Result<crate::model::Program, ParseError> {
    let scenario = parse_scenario(&alloc::format!("exec ({text})"), theory)?;
    match scenario.steps.into_iter().next().map(|s| s.step) {
        Some(Step::Exec(p)) => Ok(p),
        _ => Err(ParseError::single(Diagnostic::error(
            Span::new(1, 1),
            "expected a single program",
        ))),
    }
}
