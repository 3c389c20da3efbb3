//! Printing resolved theories, expressions and programs back to source.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::defs::*;
use super::lower::BUILTIN_DOMAINS;
use crate::model::{
    format_rational, BinaryOp, DomainKind, Expr, ExprKind, GroundFluentId, Program, Quantifier,
    Rational, UnaryOp, Value, Vocabulary,
};

/// Source text that parses back to an equal theory.
pub fn pretty_theory(t: &ActionTheory) -> String {
    let v = &t.vocab;
    let mut out = String::new();
    for d in &v.domains {
        if BUILTIN_DOMAINS.contains(&d.name.as_str()) {
            continue;
        }
        let def = match &d.kind {
            DomainKind::Range(lo, hi) => format!("{lo}..{hi}"),
            DomainKind::Symbols(s) => {
                let names: Vec<&str> = s.iter().map(|id| v.symbol_name(*id)).collect();
                format!("{{{}}}", names.join(", "))
            }
            DomainKind::Bool | DomainKind::Int => continue,
        };
        let _ = writeln!(out, "domain {} = {def}", d.name);
    }
    out.push('\n');
    for f in &v.fluents {
        let _ = write!(out, "fluent {}", f.name);
        if !f.params.is_empty() {
            let ps: Vec<String> = f
                .params
                .iter()
                .map(|(n, d)| format!("{n}: {}", v.domain(*d).name))
                .collect();
            let _ = write!(out, "({})", ps.join(", "));
        }
        let _ = writeln!(out, " : {}", v.domain(f.range).name);
    }
    for s in &t.schemas {
        out.push('\n');
        let ps: Vec<String> = s
            .params
            .iter()
            .map(|p| {
                let mode = match p.mode {
                    ParamMode::Nominal => "nominal",
                    ParamMode::Actual => "actual",
                };
                format!("{mode} {}: {}", p.name, v.domain(p.domain).name)
            })
            .collect();
        let _ = writeln!(out, "action {}({})", s.name, ps.join(", "));
        let names: Vec<String> = s.params.iter().map(|p| p.name.clone()).collect();
        let _ = writeln!(out, "  poss: {}", pretty_expr(v, &s.poss));
        let mut obs = String::from(&t.group(s.group).name);
        for i in &s.observed {
            obs.push_str(", ");
            obs.push_str(&names[*i]);
        }
        let _ = writeln!(out, "  observe: ({obs})");
        let _ = writeln!(out, "  likelihood: {}", pretty_expr(v, &s.likelihood));
    }
    for r in &t.rules {
        let decl = v.fluent(r.fluent);
        match &r.origin {
            RuleOrigin::Frame => {}
            RuleOrigin::Explicit => {
                out.push('\n');
                let _ = write!(out, "successor {}", decl.name);
                if let Some(c) = r.cases.first() {
                    if !decl.params.is_empty() {
                        let _ = write!(out, "({})", c.vars[..decl.params.len()].join(", "));
                    }
                } else if !decl.params.is_empty() {
                    let ps: Vec<&str> = decl.params.iter().map(|(n, _)| n.as_str()).collect();
                    let _ = write!(out, "({})", ps.join(", "));
                }
                out.push_str(" {\n");
                for c in &r.cases {
                    let _ = write!(out, "  case {}", pretty_pattern(t, &c.pattern, &c.vars));
                    if let Some(g) = &c.guard {
                        let _ = write!(out, " when {}", pretty_expr(v, g));
                    }
                    let _ = writeln!(out, " => {}", pretty_expr(v, &c.value));
                }
                out.push_str("}\n");
            }
            RuleOrigin::Compiled(clauses) => {
                out.push_str("\neffects {\n");
                for c in clauses {
                    let _ = write!(out, "  {} causes ", pretty_pattern(t, &c.pattern, &c.vars));
                    if c.effect == Effect::Negative {
                        out.push_str("not ");
                    }
                    out.push_str(&decl.name);
                    if !c.target.is_empty() {
                        let args: Vec<String> = c
                            .target
                            .iter()
                            .enumerate()
                            .map(|(i, a)| match a {
                                PatArg::Wild => "_".to_string(),
                                PatArg::Lit(x) => pretty_value(v, x),
                                _ => c.vars[i].clone(),
                            })
                            .collect();
                        let _ = write!(out, "({})", args.join(", "));
                    }
                    if let Effect::Assign(e) = &c.effect {
                        let _ = write!(out, " := {}", pretty_expr(v, e));
                    }
                    if let Some(g) = &c.context {
                        let _ = write!(out, " when {}", pretty_expr(v, g));
                    }
                    out.push('\n');
                }
                out.push_str("}\n");
            }
        }
    }
    if !t.init.is_empty() {
        out.push_str("\ninit {\n");
        for w in &t.init {
            let assigns: Vec<String> = (0..v.ground_count())
                .map(|i| {
                    let g = GroundFluentId(i as u32);
                    format!("{} = {}", v.ground_name(g), pretty_value(v, w.world.get(g)))
                })
                .collect();
            let _ = writeln!(
                out,
                "  world {{{}}} weight {}",
                assigns.join(", "),
                pretty_value(v, &w.weight)
            );
        }
        out.push_str("}\n");
    }
    for p in &t.programs {
        out.push('\n');
        let _ = write!(out, "program {}", p.name);
        if !p.params.is_empty() {
            let ps: Vec<String> = p
                .params
                .iter()
                .map(|(n, d)| format!("{n}: {}", v.domain(*d).name))
                .collect();
            let _ = write!(out, "({})", ps.join(", "));
        }
        let _ = writeln!(out, " = {}", pretty_program(t, &p.body));
    }
    out
}

/// A constant as it would be written in a world or pattern.
pub fn pretty_value(v: &Vocabulary, x: &Value) -> String {
    match x {
        Value::Rat(r) => format_rational(r),
        _ => v.format_value(x),
    }
}

fn pretty_pattern(t: &ActionTheory, p: &ActionPattern, vars: &[String]) -> String {
    let Some(s) = p.schema else {
        return "_".to_string();
    };
    let name = &t.schema(s).name;
    if p.args.is_empty() {
        return name.clone();
    }
    let args: Vec<String> = p
        .args
        .iter()
        .map(|a| match a {
            PatArg::Wild => "_".to_string(),
            PatArg::Bind(i) | PatArg::Match(i) => vars[*i].clone(),
            PatArg::Lit(x) => pretty_value(&t.vocab, x),
        })
        .collect();
    format!("{name}({})", args.join(", "))
}

/// Minimal-parenthesis rendering of an expression.
pub fn pretty_expr(v: &Vocabulary, e: &Expr) -> String {
    let mut s = String::new();
    write_expr(v, e, &mut s);
    s
}

/// Precedence of the node itself; `if` and quantifiers extend rightwards
/// and rank lowest.
fn prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary(op, ..) => op.precedence(),
        ExprKind::InRange { .. } => 6,
        ExprKind::Unary(UnaryOp::Not, _) => 5,
        ExprKind::Unary(UnaryOp::Neg, _) => 9,
        ExprKind::If(..) | ExprKind::Quant { .. } => 0,
        _ => 10,
    }
}

fn write_child(v: &Vocabulary, e: &Expr, min: u8, out: &mut String) {
    if prec(e) < min {
        out.push('(');
        write_expr(v, e, out);
        out.push(')');
    } else {
        write_expr(v, e, out);
    }
}

fn write_expr(v: &Vocabulary, e: &Expr, out: &mut String) {
    match &e.kind {
        ExprKind::Lit(x) => out.push_str(&literal(v, x)),
        ExprKind::Var { name, .. } => out.push_str(name),
        ExprKind::Fluent { fluent, args, back } => {
            out.push_str(&v.fluent(*fluent).name);
            if args.is_empty() && *back == 0 {
                return;
            }
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(v, a, out);
            }
            if *back > 0 {
                if !args.is_empty() {
                    out.push_str(", ");
                }
                for _ in 0..*back {
                    out.push_str("prev(");
                }
                out.push_str("now");
                for _ in 0..*back {
                    out.push(')');
                }
            }
            out.push(')');
        }
        ExprKind::Unary(UnaryOp::Not, x) => {
            out.push_str("not ");
            write_child(v, x, 5, out);
        }
        ExprKind::Unary(UnaryOp::Neg, x) => {
            out.push('-');
            write_child(v, x, 9, out);
        }
        ExprKind::Binary(op, l, r) => {
            let p = op.precedence();
            let (lmin, rmin) = match op {
                BinaryOp::Implies => (p + 1, p),
                _ if p == 6 => (7, 7),
                _ => (p, p + 1),
            };
            write_child(v, l, lmin, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_child(v, r, rmin, out);
        }
        ExprKind::If(c, t, f) => {
            out.push_str("if ");
            write_expr(v, c, out);
            out.push_str(" then ");
            write_expr(v, t, out);
            out.push_str(" else ");
            write_expr(v, f, out);
        }
        ExprKind::InRange { value, lo, hi } => {
            write_child(v, value, 7, out);
            out.push_str(" in [");
            write_child(v, lo, 7, out);
            out.push_str(", ");
            write_child(v, hi, 7, out);
            out.push(']');
        }
        ExprKind::Quant {
            quantifier,
            var,
            domain,
            body,
        } => {
            out.push_str(match quantifier {
                Quantifier::Forall => "forall ",
                Quantifier::Exists => "exists ",
            });
            let _ = write!(out, "{var}: {} . ", v.domain(*domain).name);
            write_expr(v, body, out);
        }
        ExprKind::Call(b, args) => {
            out.push_str(b.name());
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(v, a, out);
            }
            out.push(')');
        }
    }
}

/// Literals as the lexer would produce them: exact rationals with a
/// terminating decimal expansion print as decimals, anything else falls
/// back to a parenthesized form.
fn literal(v: &Vocabulary, x: &Value) -> String {
    match x {
        Value::Int(i) if *i < 0 => format!("({i})"),
        Value::Rat(r) => match decimal(r) {
            Some(d) if !r.is_negative() => d,
            Some(d) => format!("({d})"),
            None => format!("({})", format_rational(r)),
        },
        Value::Float(f) => format!("{f:?}"),
        _ => v.format_value(x),
    }
}

/// Terminating decimal expansion of `r`, if it has one.
pub fn decimal(r: &Rational) -> Option<String> {
    let mut den = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0u32, 0u32);
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if den != BigInt::from(1) {
        return None;
    }
    let digits = twos.max(fives);
    let scaled = (r * Rational::from_integer(BigInt::from(10).pow(digits))).to_integer();
    let neg = scaled.is_negative();
    let mut s = scaled.abs().to_string();
    if digits > 0 {
        while s.len() <= digits as usize {
            s.insert(0, '0');
        }
        s.insert(s.len() - digits as usize, '.');
    }
    if neg {
        s.insert(0, '-');
    }
    Some(s)
}

pub fn pretty_program(t: &ActionTheory, p: &Program) -> String {
    let mut s = String::new();
    write_program(t, p, 0, &mut s);
    s
}

/// Levels: 0 anything, 1 choice operand, 2 sequence operand.
fn write_program(t: &ActionTheory, p: &Program, level: u8, out: &mut String) {
    let own = match p {
        Program::Choice(..) => 1,
        Program::Seq(..) => 2,
        Program::Pi { .. } => 0,
        _ => 3,
    };
    if own < level {
        out.push('(');
        write_program(t, p, 0, out);
        out.push(')');
        return;
    }
    let v = &t.vocab;
    match p {
        Program::Choice(a, b) => {
            write_program(t, a, 1, out);
            out.push_str(" | ");
            write_program(t, b, 2, out);
        }
        Program::Seq(a, b) => {
            write_program(t, a, 2, out);
            out.push_str("; ");
            write_program(t, b, 3, out);
        }
        Program::Pi { var, domain, body } => {
            let _ = write!(out, "pi {var}: {} . ", v.domain(*domain).name);
            write_program(t, body, 0, out);
        }
        Program::Prim { schema, args } => {
            out.push_str(&t.schema(*schema).name);
            if args.iter().any(Option::is_some) {
                let a: Vec<String> = args
                    .iter()
                    .map(|a| match a {
                        Some(e) => pretty_expr(v, e),
                        None => "_".to_string(),
                    })
                    .collect();
                let _ = write!(out, "({})", a.join(", "));
            }
        }
        Program::Ground(g) => {
            out.push_str(&t.schema(g.schema).name);
            if !g.args.is_empty() {
                let a: Vec<String> = g.args.iter().map(|x| literal(v, x)).collect();
                let _ = write!(out, "({})", a.join(", "));
            }
        }
        Program::Call { program, args } => {
            out.push_str(&t.programs[*program].name);
            if !args.is_empty() {
                let a: Vec<String> = args.iter().map(|e| pretty_expr(v, e)).collect();
                let _ = write!(out, "({})", a.join(", "));
            }
        }
    }
}
