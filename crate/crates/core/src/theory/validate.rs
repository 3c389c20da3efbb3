//! Static checks on a resolved theory.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::One;

use super::defs::*;
use super::diag::Diagnostic;
use crate::model::{
    cartesian, evaluate, evaluate_formula, Domain, GroupId, Rational, Span, Value, Vocabulary,
    WorldState,
};

/// Ground actions evaluated per group before the normalization check gives up.
pub const NORMALIZATION_BUDGET: usize = 2_000_000;

/// Checks nonnegative weights and likelihoods, finite enumeration domains,
/// signature templates, unreachable successor cases and forward
/// normalization. Normalization failures are warnings; the rest are errors.
pub fn validate_theory(t: &ActionTheory) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    check_init(t, &mut out);
    check_schemas(t, &mut out);
    check_groups(t, &mut out);
    check_rules(t, &mut out);
    if !out.iter().any(Diagnostic::is_error) {
        for g in 0..t.groups.len() {
            check_normalization(t, GroupId(g as u32), &mut out);
        }
    }
    out
}

fn zero() -> Value {
    Value::Int(0)
}

fn is_negative(v: &Value) -> bool {
    v.num_cmp(&zero()) == Ok(Ordering::Less)
}

fn check_init(t: &ActionTheory, out: &mut Vec<Diagnostic>) {
    if t.init.is_empty() {
        out.push(Diagnostic::warning(
            Span::new(1, 1),
            "theory declares no initial worlds",
        ));
        return;
    }
    let mut total = zero();
    for w in &t.init {
        if is_negative(&w.weight) {
            out.push(Diagnostic::error(
                w.span,
                format!("initial weight must be nonnegative, got {}", w.weight),
            ));
            continue;
        }
        if let Some(g) = w.world.first_out_of_domain(&t.vocab) {
            out.push(Diagnostic::error(
                w.span,
                format!("`{}` is outside its range", t.vocab.ground_name(g)),
            ));
        }
        total = total.add(&w.weight).unwrap_or(total);
    }
    if total.num_cmp(&zero()) != Ok(Ordering::Greater) {
        out.push(Diagnostic::error(
            t.init[0].span,
            "initial weights must have a positive total",
        ));
    }
}

fn check_schemas(t: &ActionTheory, out: &mut Vec<Diagnostic>) {
    for s in &t.schemas {
        for (i, p) in s.params.iter().enumerate() {
            if t.vocab.domain(p.domain).is_finite() {
                continue;
            }
            if p.mode == ParamMode::Actual {
                out.push(Diagnostic::error(
                    s.span,
                    format!(
                        "actual parameter domain must be finite (`{}` of `{}`)",
                        p.name, s.name
                    ),
                ));
            } else if !s.observed.contains(&i) {
                out.push(Diagnostic::error(
                    s.span,
                    format!(
                        "unobserved parameter `{}` of `{}` must have a finite domain",
                        p.name, s.name
                    ),
                ));
            }
        }
        if s.likelihood.is_closed() {
            let v = evaluate(&t.vocab, &s.likelihood, &WorldState::new(Vec::new()), &[]);
            match v {
                Ok(v) if is_negative(&v) => out.push(Diagnostic::error(
                    s.likelihood.span,
                    format!("likelihood must be nonnegative (`{}` is {v})", s.name),
                )),
                Err(e) => out.push(Diagnostic::error(e.span, e.to_string())),
                _ => {}
            }
        }
    }
}

fn check_groups(t: &ActionTheory, out: &mut Vec<Diagnostic>) {
    for g in &t.groups {
        let first = t.schema(g.members[0]);
        for m in &g.members[1..] {
            let s = t.schema(*m);
            if s.observed.len() != first.observed.len() {
                out.push(Diagnostic::error(
                    s.span,
                    format!(
                        "`{}` observes {} parameter(s) but `{}` in group `{}` observes {}",
                        s.name,
                        s.observed.len(),
                        first.name,
                        g.name,
                        first.observed.len()
                    ),
                ));
                continue;
            }
            for (a, b) in s.observed.iter().zip(&first.observed) {
                let da = t.vocab.domain(s.params[*a].domain);
                let db = t.vocab.domain(first.params[*b].domain);
                if super::lower::domain_ty(da) != super::lower::domain_ty(db) {
                    out.push(Diagnostic::error(
                        s.span,
                        format!(
                            "observed parameter `{}` of `{}` has a different type than `{}` of `{}`",
                            s.params[*a].name, s.name, first.params[*b].name, first.name
                        ),
                    ));
                }
            }
        }
    }
}

fn check_rules(t: &ActionTheory, out: &mut Vec<Diagnostic>) {
    for r in &t.rules {
        let arity = t.vocab.fluent(r.fluent).params.len();
        for (j, later) in r.cases.iter().enumerate() {
            let shadow = r.cases[..j].iter().position(|early| {
                early.guard.is_none()
                    && match (early.pattern.schema, later.pattern.schema) {
                        (None, _) => true,
                        (Some(a), Some(b)) => {
                            a == b
                                && early.pattern.args.iter().all(|p| match p {
                                    PatArg::Wild => true,
                                    PatArg::Bind(s) => *s >= arity,
                                    _ => false,
                                })
                        }
                        (Some(_), None) => false,
                    }
            });
            if let Some(i) = shadow {
                out.push(Diagnostic::warning(
                    later.value.span,
                    format!(
                        "case {} of `{}` is unreachable: case {} always matches first",
                        j + 1,
                        t.vocab.fluent(r.fluent).name,
                        i + 1
                    ),
                ));
            }
        }
    }
}

fn check_normalization(t: &ActionTheory, g: GroupId, out: &mut Vec<Diagnostic>) {
    let group = t.group(g);
    let span = t.schema(group.members[0]).span;
    let mut cost: usize = 0;
    for m in &group.members {
        let s = t.schema(*m);
        let mut n: usize = 1;
        for p in &s.params {
            match t.vocab.domain(p.domain).size() {
                Some(k) => n = n.saturating_mul(k),
                None => {
                    out.push(Diagnostic::note(
                        span,
                        format!(
                            "normalization of group `{}` not checked: `{}` has an unbounded parameter",
                            group.name, s.name
                        ),
                    ));
                    return;
                }
            }
        }
        cost = cost.saturating_add(n.saturating_mul(t.init.len()));
    }
    if cost > NORMALIZATION_BUDGET {
        out.push(Diagnostic::note(
            span,
            format!(
                "normalization of group `{}` not checked: {cost} ground actions exceed the budget",
                group.name
            ),
        ));
        return;
    }

    let mut bad: Option<(usize, String, Value)> = None;
    let mut bad_count = 0usize;
    for (k, w) in t.init.iter().enumerate() {
        let mut sums: BTreeMap<Vec<Value>, Value> = BTreeMap::new();
        for m in &group.members {
            let s = t.schema(*m);
            let domains: Vec<&Domain> = s.params.iter().map(|p| t.vocab.domain(p.domain)).collect();
            for args in cartesian(&domains) {
                match normalization_term(&t.vocab, s, &args, &w.world) {
                    Ok(None) => {}
                    Ok(Some(l)) => {
                        if is_negative(&l) {
                            out.push(Diagnostic::error(
                                s.likelihood.span,
                                format!(
                                    "likelihood must be nonnegative: {} is {l} in initial world {}",
                                    action_text(&t.vocab, s, &args),
                                    k + 1
                                ),
                            ));
                            return;
                        }
                        let key: Vec<Value> = s.observed.iter().map(|i| args[*i].clone()).collect();
                        let acc = sums.entry(key).or_insert_with(zero);
                        *acc = acc.add(&l).unwrap_or_else(|_| acc.clone());
                    }
                    Err(msg) => {
                        out.push(Diagnostic::note(
                            span,
                            format!("normalization of group `{}` not checked: {msg}", group.name),
                        ));
                        return;
                    }
                }
            }
        }
        for (key, sum) in sums {
            if !is_one(&sum) {
                bad_count += 1;
                let larger = bad
                    .as_ref()
                    .is_none_or(|(_, _, s)| sum.num_cmp(s) == Ok(Ordering::Greater));
                if larger {
                    let vals: Vec<String> = key.iter().map(|v| t.vocab.format_value(v)).collect();
                    bad = Some((k + 1, vals.join(", "), sum));
                }
            }
        }
    }
    if let Some((world, key, sum)) = bad {
        let names: Vec<&str> = group
            .members
            .iter()
            .map(|m| t.schema(*m).name.as_str())
            .collect();
        out.push(Diagnostic::warning(
            span,
            format!(
                "likelihoods of `{}` ({}) do not sum to 1 over possible completions: \
                 {sum} for ({key}) in initial world {world}, {bad_count} case(s) in all; \
                 belief renormalizes",
                group.name,
                names.join(", "),
            ),
        ));
    }
}

/// The likelihood of one ground action if it is possible in `world`.
fn normalization_term(
    vocab: &Vocabulary,
    s: &ActionSchema,
    args: &[Value],
    world: &WorldState,
) -> Result<Option<Value>, String> {
    let possible = evaluate_formula(vocab, &s.poss, world, args).map_err(|e| e.to_string())?;
    if !possible {
        return Ok(None);
    }
    let l = evaluate(vocab, &s.likelihood, world, args).map_err(|e| e.to_string())?;
    if l.to_rational().is_none() && !l.is_float() {
        return Err(format!("likelihood of `{}` is not a number", s.name));
    }
    Ok(Some(l))
}

fn is_one(v: &Value) -> bool {
    match v {
        Value::Float(x) => (x - 1.0).abs() <= 1e-9,
        _ => v.to_rational() == Some(Rational::one()),
    }
}

fn action_text(vocab: &Vocabulary, s: &ActionSchema, args: &[Value]) -> String {
    let a: Vec<String> = args.iter().map(|v| vocab.format_value(v)).collect();
    format!("{}({})", s.name, a.join(", "))
}
