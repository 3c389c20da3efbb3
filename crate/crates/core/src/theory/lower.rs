//! Name resolution and type checking: raw syntax to resolved theory.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::compile::compile_effect_axioms;
use super::defs::*;
use super::diag::Diagnostic;
use super::syntax::*;
use crate::model::{
    evaluate, BinaryOp, Builtin, Domain, DomainId, DomainKind, Expr, ExprKind, FluentDecl,
    FluentId, GroupId, Program, SchemaId, Span, UnaryOp, Value, Vocabulary, WorldState,
};

type LResult<T> = Result<T, Diagnostic>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ty {
    Bool,
    Num,
    Sym,
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ty::Bool => "bool",
            Ty::Num => "number",
            Ty::Sym => "symbol",
        })
    }
}

pub fn domain_ty(d: &Domain) -> Ty {
    match d.kind {
        DomainKind::Bool => Ty::Bool,
        DomainKind::Range(..) | DomainKind::Int => Ty::Num,
        DomainKind::Symbols(_) => Ty::Sym,
    }
}

pub const BUILTIN_DOMAINS: [&str; 2] = ["bool", "int"];

/// Resolution context over a (possibly partially built) theory.
pub struct Ctx<'a> {
    pub vocab: &'a Vocabulary,
    pub schemas: &'a [ActionSchema],
    pub programs: &'a [ProgramDef],
}

/// Variables in scope; the index is the binding slot.
pub type Scope = Vec<(String, Ty)>;

impl<'a> Ctx<'a> {
    pub fn from_theory(t: &'a ActionTheory) -> Self {
        Ctx {
            vocab: &t.vocab,
            schemas: &t.schemas,
            programs: &t.programs,
        }
    }

    pub fn domain(&self, name: &Ident) -> LResult<DomainId> {
        self.vocab
            .domain_by_name(&name.text)
            .ok_or_else(|| Diagnostic::error(name.span, format!("unknown domain `{}`", name.text)))
    }

    fn finite_domain(&self, name: &Ident) -> LResult<DomainId> {
        let id = self.domain(name)?;
        if self.vocab.domain(id).is_finite() {
            Ok(id)
        } else {
            Err(Diagnostic::error(
                name.span,
                format!("cannot range over unbounded domain `{}`", name.text),
            ))
        }
    }

    fn schema(&self, name: &Ident) -> Option<SchemaId> {
        self.schemas
            .iter()
            .position(|s| s.name == name.text)
            .map(|i| SchemaId(i as u32))
    }

    /// Lowers `raw` and checks that it has type `want`.
    pub fn expr_of(&self, raw: &RawExpr, scope: &mut Scope, want: Ty, what: &str) -> LResult<Expr> {
        let (e, ty) = self.expr(raw, scope)?;
        if ty != want {
            return Err(Diagnostic::error(
                raw.span,
                format!("{what} must be a {want}, found {ty}"),
            ));
        }
        Ok(e)
    }

    pub fn expr(&self, raw: &RawExpr, scope: &mut Scope) -> LResult<(Expr, Ty)> {
        let span = raw.span;
        let mk = |kind| Expr::new(kind, span);
        Ok(match &raw.kind {
            RawExprKind::Num(r) => (mk(ExprKind::Lit(Value::from_rational(r.clone()))), Ty::Num),
            RawExprKind::Bool(b) => (mk(ExprKind::Lit(Value::Bool(*b))), Ty::Bool),
            RawExprKind::Name(name) => self.name(name, span, scope)?,
            RawExprKind::App { name, args } => self.app(name, args, span, scope)?,
            RawExprKind::Now | RawExprKind::Prev(_) => {
                return Err(Diagnostic::error(
                    span,
                    "situation terms may only appear as the last argument of a fluent",
                ))
            }
            RawExprKind::Unary(op, inner) => {
                let want = match op {
                    UnaryOp::Neg => Ty::Num,
                    UnaryOp::Not => Ty::Bool,
                };
                let e = self.expr_of(inner, scope, want, "operand")?;
                (mk(ExprKind::Unary(*op, Box::new(e))), want)
            }
            RawExprKind::Binary(op, l, r) => {
                let (le, lt) = self.expr(l, scope)?;
                let (re, rt) = self.expr(r, scope)?;
                let result = binary_type(*op, lt, rt).ok_or_else(|| {
                    Diagnostic::error(
                        span,
                        format!("type mismatch: `{}` applied to {lt} and {rt}", op.symbol()),
                    )
                })?;
                (
                    mk(ExprKind::Binary(*op, Box::new(le), Box::new(re))),
                    result,
                )
            }
            RawExprKind::If(c, t, e) => {
                let ce = self.expr_of(c, scope, Ty::Bool, "condition")?;
                let (te, tt) = self.expr(t, scope)?;
                let (ee, et) = self.expr(e, scope)?;
                if tt != et {
                    return Err(Diagnostic::error(
                        span,
                        format!("type mismatch: branches are {tt} and {et}"),
                    ));
                }
                (
                    mk(ExprKind::If(Box::new(ce), Box::new(te), Box::new(ee))),
                    tt,
                )
            }
            RawExprKind::InRange { value, lo, hi } => {
                let v = self.expr_of(value, scope, Ty::Num, "interval member")?;
                let l = self.expr_of(lo, scope, Ty::Num, "interval bound")?;
                let h = self.expr_of(hi, scope, Ty::Num, "interval bound")?;
                (
                    mk(ExprKind::InRange {
                        value: Box::new(v),
                        lo: Box::new(l),
                        hi: Box::new(h),
                    }),
                    Ty::Bool,
                )
            }
            RawExprKind::Quant {
                quantifier,
                var,
                domain,
                body,
            } => {
                let d = self.finite_domain(domain)?;
                scope.push((var.text.clone(), domain_ty(self.vocab.domain(d))));
                let b = self.expr_of(body, scope, Ty::Bool, "quantified formula");
                scope.pop();
                (
                    mk(ExprKind::Quant {
                        quantifier: *quantifier,
                        var: var.text.clone(),
                        domain: d,
                        body: Box::new(b?),
                    }),
                    Ty::Bool,
                )
            }
        })
    }

    fn name(&self, name: &str, span: Span, scope: &Scope) -> LResult<(Expr, Ty)> {
        if let Some(slot) = scope.iter().rposition(|(n, _)| n == name) {
            return Ok((
                Expr::new(
                    ExprKind::Var {
                        name: name.to_string(),
                        slot,
                    },
                    span,
                ),
                scope[slot].1,
            ));
        }
        if let Some(f) = self.vocab.fluent_by_name(name) {
            let decl = self.vocab.fluent(f);
            if !decl.params.is_empty() {
                return Err(Diagnostic::error(
                    span,
                    format!("fluent `{name}` takes {} argument(s)", decl.params.len()),
                ));
            }
            return Ok((
                Expr::new(
                    ExprKind::Fluent {
                        fluent: f,
                        args: Vec::new(),
                        back: 0,
                    },
                    span,
                ),
                domain_ty(self.vocab.domain(decl.range)),
            ));
        }
        if let Some(s) = self.vocab.symbol(name) {
            return Ok((Expr::new(ExprKind::Lit(Value::Sym(s)), span), Ty::Sym));
        }
        Err(self.unknown(name, span, scope, "identifier"))
    }

    fn unknown(&self, name: &str, span: Span, scope: &Scope, what: &str) -> Diagnostic {
        let parts: Vec<&str> = name.split('-').collect();
        let known = |p: &str| {
            scope.iter().any(|(n, _)| n == p)
                || self.vocab.fluent_by_name(p).is_some()
                || self.vocab.symbol(p).is_some()
        };
        if parts.len() > 1 && parts.iter().all(|p| known(p)) {
            Diagnostic::error(
                span,
                format!(
                    "unknown {what} `{name}` (for subtraction write `{}`)",
                    parts.join(" - ")
                ),
            )
        } else {
            Diagnostic::error(span, format!("unknown {what} `{name}`"))
        }
    }

    fn app(
        &self,
        name: &Ident,
        args: &[RawExpr],
        span: Span,
        scope: &mut Scope,
    ) -> LResult<(Expr, Ty)> {
        if let Some(b) = Builtin::from_name(&name.text) {
            if !b.arity().contains(&args.len()) {
                return Err(Diagnostic::error(
                    span,
                    format!("`{}` takes {:?} arguments", b.name(), b.arity()),
                ));
            }
            let lowered = args
                .iter()
                .map(|a| self.expr_of(a, scope, Ty::Num, "argument"))
                .collect::<LResult<Vec<_>>>()?;
            return Ok((Expr::new(ExprKind::Call(b, lowered), span), Ty::Num));
        }
        let Some(f) = self.vocab.fluent_by_name(&name.text) else {
            return Err(self.unknown(&name.text, name.span, scope, "fluent or function"));
        };
        let decl = self.vocab.fluent(f);
        let arity = decl.params.len();
        let (obj_args, back) = match args.split_last() {
            Some((last, rest)) if args.len() == arity + 1 => (rest, situation_depth(last)?),
            _ if args.len() == arity => (args, 0),
            _ => {
                return Err(Diagnostic::error(
                    span,
                    format!(
                        "fluent `{}` takes {arity} argument(s) plus an optional situation",
                        name.text
                    ),
                ))
            }
        };
        let mut lowered = Vec::with_capacity(arity);
        for (a, (pname, dom)) in obj_args.iter().zip(&decl.params) {
            let domain = self.vocab.domain(*dom);
            let e = self.expr_of(a, scope, domain_ty(domain), &format!("argument `{pname}`"))?;
            if let ExprKind::Lit(v) = &e.kind {
                if !domain.contains(v) {
                    return Err(Diagnostic::error(
                        a.span,
                        format!(
                            "{} is not in domain `{}`",
                            self.vocab.format_value(v),
                            domain.name
                        ),
                    ));
                }
            }
            lowered.push(e);
        }
        Ok((
            Expr::new(
                ExprKind::Fluent {
                    fluent: f,
                    args: lowered,
                    back,
                },
                span,
            ),
            domain_ty(self.vocab.domain(decl.range)),
        ))
    }

    /// Lowers a closed expression and evaluates it.
    pub fn constant(&self, raw: &RawExpr, want: Option<Ty>, what: &str) -> LResult<Value> {
        let mut scope = Scope::new();
        let (e, ty) = self.expr(raw, &mut scope)?;
        if let Some(w) = want {
            if ty != w {
                return Err(Diagnostic::error(
                    raw.span,
                    format!("{what} must be a {w}, found {ty}"),
                ));
            }
        }
        if !e.is_closed() {
            return Err(Diagnostic::error(
                raw.span,
                format!("{what} must be a constant"),
            ));
        }
        evaluate(self.vocab, &e, &WorldState::new(Vec::new()), &[])
            .map_err(|err| Diagnostic::error(err.span, err.to_string()))
    }

    /// Lowers an action pattern, extending `vars` (and `types`) with the
    /// variables it binds.
    pub fn pattern(&self, raw: &RawPattern, vars: &mut Scope) -> LResult<ActionPattern> {
        let Some(name) = &raw.schema else {
            return Ok(ActionPattern {
                schema: None,
                args: Vec::new(),
            });
        };
        let id = self.schema(name).ok_or_else(|| {
            Diagnostic::error(name.span, format!("unknown action schema `{}`", name.text))
        })?;
        let schema = &self.schemas[id.0 as usize];
        if raw.args.len() != schema.params.len() {
            return Err(Diagnostic::error(
                raw.span,
                format!(
                    "action `{}` takes {} argument(s), pattern has {}",
                    schema.name,
                    schema.params.len(),
                    raw.args.len()
                ),
            ));
        }
        let mut args = Vec::with_capacity(raw.args.len());
        for (a, p) in raw.args.iter().zip(&schema.params) {
            let domain = self.vocab.domain(p.domain);
            let ty = domain_ty(domain);
            args.push(self.pat_arg(a, vars, ty, domain)?);
        }
        Ok(ActionPattern {
            schema: Some(id),
            args,
        })
    }

    fn pat_arg(&self, a: &RawPatArg, vars: &mut Scope, ty: Ty, domain: &Domain) -> LResult<PatArg> {
        match a {
            RawPatArg::Wild(_) => Ok(PatArg::Wild),
            RawPatArg::Name(id) => {
                if let Some(s) = self.vocab.symbol(&id.text) {
                    return self.check_lit(Value::Sym(s), id.span, ty, domain);
                }
                if let Some(slot) = vars.iter().position(|(n, _)| *n == id.text) {
                    if vars[slot].1 != ty {
                        return Err(Diagnostic::error(
                            id.span,
                            format!(
                                "type mismatch: `{}` is a {} but the parameter is a {ty}",
                                id.text, vars[slot].1
                            ),
                        ));
                    }
                    return Ok(PatArg::Match(slot));
                }
                vars.push((id.text.clone(), ty));
                Ok(PatArg::Bind(vars.len() - 1))
            }
            RawPatArg::Lit(e) => {
                let v = self.constant(e, Some(ty), "pattern literal")?;
                self.check_lit(v, e.span, ty, domain)
            }
        }
    }

    fn check_lit(&self, v: Value, span: Span, ty: Ty, domain: &Domain) -> LResult<PatArg> {
        let vt = match v.kind() {
            crate::model::Kind::Bool => Ty::Bool,
            crate::model::Kind::Number => Ty::Num,
            crate::model::Kind::Symbol => Ty::Sym,
        };
        if vt != ty || !domain.contains(&v) {
            return Err(Diagnostic::error(
                span,
                format!(
                    "{} is not in domain `{}`",
                    self.vocab.format_value(&v),
                    domain.name
                ),
            ));
        }
        Ok(PatArg::Lit(v))
    }

    /// Lowers a program; `scope` holds program parameters and enclosing
    /// `pi` variables.
    pub fn program(&self, raw: &RawProgram, scope: &mut Scope) -> LResult<Program> {
        match raw {
            RawProgram::Seq(a, b) => Ok(Program::seq(
                self.program(a, scope)?,
                self.program(b, scope)?,
            )),
            RawProgram::Choice(a, b) => Ok(Program::choice(
                self.program(a, scope)?,
                self.program(b, scope)?,
            )),
            RawProgram::Pi { var, domain, body } => {
                let d = self.finite_domain(domain)?;
                scope.push((var.text.clone(), domain_ty(self.vocab.domain(d))));
                let b = self.program(body, scope);
                scope.pop();
                Ok(Program::Pi {
                    var: var.text.clone(),
                    domain: d,
                    body: Box::new(b?),
                })
            }
            RawProgram::Call { name, args } => self.call(name, args.as_deref(), scope),
        }
    }

    fn call(
        &self,
        name: &Ident,
        args: Option<&[Option<RawExpr>]>,
        scope: &mut Scope,
    ) -> LResult<Program> {
        if let Some(i) = self.programs.iter().position(|p| p.name == name.text) {
            let def = &self.programs[i];
            let given = args.unwrap_or(&[]);
            if given.len() != def.params.len() {
                return Err(Diagnostic::error(
                    name.span,
                    format!(
                        "program `{}` takes {} argument(s), got {}",
                        def.name,
                        def.params.len(),
                        given.len()
                    ),
                ));
            }
            let mut lowered = Vec::new();
            for (a, (pname, dom)) in given.iter().zip(&def.params) {
                let Some(a) = a else {
                    return Err(Diagnostic::error(
                        name.span,
                        format!("program argument `{pname}` cannot be left open"),
                    ));
                };
                let ty = domain_ty(self.vocab.domain(*dom));
                lowered.push(self.expr_of(a, scope, ty, &format!("argument `{pname}`"))?);
            }
            return Ok(Program::Call {
                program: i,
                args: lowered,
            });
        }
        let Some(id) = self.schema(name) else {
            return Err(Diagnostic::error(
                name.span,
                format!("unknown action schema or program `{}`", name.text),
            ));
        };
        let schema = &self.schemas[id.0 as usize];
        let nominal: Vec<usize> = (0..schema.params.len())
            .filter(|i| schema.params[*i].mode == ParamMode::Nominal)
            .collect();
        let targets: Vec<usize> = match args {
            None => Vec::new(),
            Some(a) if a.len() == schema.params.len() => (0..a.len()).collect(),
            Some(a) if a.len() == nominal.len() => nominal,
            Some(a) => {
                return Err(Diagnostic::error(
                    name.span,
                    format!(
                        "action `{}` takes {} argument(s) ({} nominal), got {}",
                        schema.name,
                        schema.params.len(),
                        nominal.len(),
                        a.len()
                    ),
                ))
            }
        };
        let mut out: Vec<Option<Expr>> = vec![None; schema.params.len()];
        for (a, i) in args.unwrap_or(&[]).iter().zip(targets) {
            if let Some(a) = a {
                let p = &schema.params[i];
                let ty = domain_ty(self.vocab.domain(p.domain));
                out[i] = Some(self.expr_of(a, scope, ty, &format!("argument `{}`", p.name))?);
            }
        }
        Ok(Program::Prim {
            schema: id,
            args: out,
        })
    }

    /// Lowers `{fluent(args) = value, ...}` into a total world state.
    pub fn world(&self, assigns: &[RawAssign], span: Span) -> LResult<WorldState> {
        let mut values: Vec<Option<Value>> = vec![None; self.vocab.ground_count()];
        for a in assigns {
            let f = self.vocab.fluent_by_name(&a.fluent.text).ok_or_else(|| {
                Diagnostic::error(a.fluent.span, format!("unknown fluent `{}`", a.fluent.text))
            })?;
            let decl = self.vocab.fluent(f);
            if a.args.len() != decl.params.len() {
                return Err(Diagnostic::error(
                    a.fluent.span,
                    format!(
                        "fluent `{}` takes {} argument(s)",
                        decl.name,
                        decl.params.len()
                    ),
                ));
            }
            let mut args = Vec::new();
            for (e, (_, d)) in a.args.iter().zip(&decl.params) {
                let domain = self.vocab.domain(*d);
                let v = self.constant(e, Some(domain_ty(domain)), "fluent argument")?;
                if !domain.contains(&v) {
                    return Err(Diagnostic::error(
                        e.span,
                        format!(
                            "{} is not in domain `{}`",
                            self.vocab.format_value(&v),
                            domain.name
                        ),
                    ));
                }
                args.push(v);
            }
            let g = self.vocab.ground_id(f, &args).expect("arguments checked");
            let range = self.vocab.range_of(g);
            let v = self.constant(&a.value, Some(domain_ty(range)), "fluent value")?;
            if !range.contains(&v) {
                return Err(Diagnostic::error(
                    a.value.span,
                    format!(
                        "{} is outside the range `{}` of `{}`",
                        self.vocab.format_value(&v),
                        range.name,
                        self.vocab.ground_name(g)
                    ),
                ));
            }
            if values[g.0 as usize].replace(v).is_some() {
                return Err(Diagnostic::error(
                    a.fluent.span,
                    format!("`{}` is assigned twice", self.vocab.ground_name(g)),
                ));
            }
        }
        let mut out = Vec::with_capacity(values.len());
        for (i, v) in values.into_iter().enumerate() {
            match v {
                Some(v) => out.push(v),
                None => {
                    return Err(Diagnostic::error(
                        span,
                        format!(
                            "world leaves `{}` unassigned",
                            self.vocab
                                .ground_name(crate::model::GroundFluentId(i as u32))
                        ),
                    ))
                }
            }
        }
        Ok(WorldState::new(out))
    }
}

fn situation_depth(e: &RawExpr) -> LResult<usize> {
    match &e.kind {
        RawExprKind::Now => Ok(0),
        RawExprKind::Prev(inner) => Ok(1 + situation_depth(inner)?),
        _ => Err(Diagnostic::error(
            e.span,
            "expected a situation term (`now` or `prev(...)`)",
        )),
    }
}

pub fn binary_type(op: BinaryOp, l: Ty, r: Ty) -> Option<Ty> {
    use BinaryOp::*;
    match op {
        Add | Sub | Mul | Div => (l == Ty::Num && r == Ty::Num).then_some(Ty::Num),
        Eq | Ne => (l == r).then_some(Ty::Bool),
        Lt | Le | Gt | Ge => (l == Ty::Num && r == Ty::Num).then_some(Ty::Bool),
        And | Or | Implies | Iff => (l == Ty::Bool && r == Ty::Bool).then_some(Ty::Bool),
    }
}

/// Builds a theory from parsed items, collecting every resolution error.
pub fn lower_theory(items: &[Item]) -> Result<(ActionTheory, Vec<Diagnostic>), Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut vocab = Vocabulary::new();
    vocab.add_domain(Domain {
        name: "bool".into(),
        kind: DomainKind::Bool,
    });
    vocab.add_domain(Domain {
        name: "int".into(),
        kind: DomainKind::Int,
    });

    let reserved = |name: &str| {
        Builtin::from_name(name).is_some() || BUILTIN_DOMAINS.contains(&name) || name == "_"
    };

    // domains and symbols
    for item in items {
        if let Item::Domain { name, def } = item {
            if vocab.domain_by_name(&name.text).is_some() {
                diags.push(Diagnostic::error(
                    name.span,
                    format!("domain `{}` declared twice", name.text),
                ));
                continue;
            }
            let kind = match def {
                DomainDef::Range(lo, hi) => {
                    if lo > hi {
                        diags.push(Diagnostic::error(
                            name.span,
                            format!("empty range {lo}..{hi}"),
                        ));
                    }
                    DomainKind::Range(*lo, *hi)
                }
                DomainDef::Symbols(syms) => {
                    let mut ids = Vec::new();
                    for s in syms {
                        if reserved(&s.text) {
                            diags.push(Diagnostic::error(
                                s.span,
                                format!("`{}` is reserved", s.text),
                            ));
                        }
                        let id = vocab.intern_symbol(&s.text);
                        if ids.contains(&id) {
                            diags.push(Diagnostic::error(
                                s.span,
                                format!("symbol `{}` listed twice", s.text),
                            ));
                        }
                        ids.push(id);
                    }
                    DomainKind::Symbols(ids)
                }
            };
            vocab.add_domain(Domain {
                name: name.text.clone(),
                kind,
            });
        }
    }

    // fluents
    for item in items {
        if let Item::Fluent {
            name,
            params,
            range,
        } = item
        {
            if vocab.fluent_by_name(&name.text).is_some() {
                diags.push(Diagnostic::error(
                    name.span,
                    format!("fluent `{}` declared twice", name.text),
                ));
                continue;
            }
            if reserved(&name.text) || vocab.symbol(&name.text).is_some() {
                diags.push(Diagnostic::error(
                    name.span,
                    format!(
                        "fluent name `{}` clashes with a reserved name or symbol",
                        name.text
                    ),
                ));
                continue;
            }
            let ctx = Ctx {
                vocab: &vocab,
                schemas: &[],
                programs: &[],
            };
            let mut ok = true;
            let mut ps = Vec::new();
            for (p, d) in params {
                match ctx.finite_domain(d) {
                    Ok(id) => ps.push((p.text.clone(), id)),
                    Err(e) => {
                        diags.push(e);
                        ok = false;
                    }
                }
            }
            let r = match ctx.finite_domain(range) {
                Ok(id) => id,
                Err(e) => {
                    diags.push(e);
                    continue;
                }
            };
            if ok {
                vocab.add_fluent(FluentDecl {
                    name: name.text.clone(),
                    params: ps,
                    range: r,
                });
            }
        }
    }

    // schemas and groups
    let mut schemas: Vec<ActionSchema> = Vec::new();
    let mut groups: Vec<Group> = Vec::new();
    for item in items {
        let Item::Action {
            name,
            params,
            poss,
            observe,
            likelihood,
        } = item
        else {
            continue;
        };
        if schemas.iter().any(|s| s.name == name.text) {
            diags.push(Diagnostic::error(
                name.span,
                format!("action `{}` declared twice", name.text),
            ));
            continue;
        }
        match lower_schema(
            &vocab,
            name,
            params,
            poss.as_ref(),
            observe.as_ref(),
            likelihood.as_ref(),
            &mut groups,
            schemas.len(),
        ) {
            Ok(s) => schemas.push(s),
            Err(e) => diags.push(e),
        }
    }

    // successor rules
    let mut rules: Vec<Option<SuccessorRule>> = vec![None; vocab.fluents.len()];
    let mut rule_spans: Vec<Option<Span>> = vec![None; vocab.fluents.len()];
    let mut clauses: Vec<Vec<EffectClause>> = vec![Vec::new(); vocab.fluents.len()];
    {
        let ctx = Ctx {
            vocab: &vocab,
            schemas: &schemas,
            programs: &[],
        };
        for item in items {
            match item {
                Item::Successor {
                    fluent,
                    params,
                    cases,
                } => match lower_successor(&ctx, fluent, params, cases) {
                    Ok(rule) => {
                        let i = rule.fluent.0 as usize;
                        if rules[i].is_some() || !clauses[i].is_empty() {
                            diags.push(Diagnostic::error(
                                fluent.span,
                                format!("duplicate successor rule for `{}`", fluent.text),
                            ));
                        } else {
                            rules[i] = Some(rule);
                            rule_spans[i] = Some(fluent.span);
                        }
                    }
                    Err(e) => diags.push(e),
                },
                Item::Effects(raw) => {
                    for c in raw {
                        match lower_clause(&ctx, c) {
                            Ok(clause) => {
                                let i = clause.fluent.0 as usize;
                                if rules[i].is_some() {
                                    diags.push(Diagnostic::error(
                                        c.fluent.span,
                                        format!("duplicate successor rule for `{}`", c.fluent.text),
                                    ));
                                } else {
                                    clauses[i].push(clause);
                                }
                            }
                            Err(e) => diags.push(e),
                        }
                    }
                }
                _ => {}
            }
        }
    }
    let mut final_rules = Vec::with_capacity(rules.len());
    for (i, (rule, cl)) in rules.into_iter().zip(clauses).enumerate() {
        let f = FluentId(i as u32);
        final_rules.push(match rule {
            Some(r) => r,
            None if cl.is_empty() => SuccessorRule::frame(f),
            None => {
                let span = cl[0].span;
                match compile_effect_axioms(&vocab, f, cl) {
                    Ok(r) => r,
                    Err(e) => {
                        diags.push(Diagnostic::error(span, e.to_string()));
                        SuccessorRule::frame(f)
                    }
                }
            }
        });
    }

    // initial worlds
    let mut init = Vec::new();
    {
        let ctx = Ctx {
            vocab: &vocab,
            schemas: &schemas,
            programs: &[],
        };
        for item in items {
            if let Item::Init(worlds) = item {
                for w in worlds {
                    let world = match ctx.world(&w.assigns, w.span) {
                        Ok(world) => world,
                        Err(e) => {
                            diags.push(e);
                            continue;
                        }
                    };
                    let weight = match &w.weight {
                        None => Value::Int(1),
                        Some(raw) => match ctx.constant(raw, Some(Ty::Num), "weight") {
                            Ok(v) => v,
                            Err(e) => {
                                diags.push(e);
                                continue;
                            }
                        },
                    };
                    init.push(InitialWorld {
                        world,
                        weight,
                        span: w.span,
                    });
                }
            }
        }
    }

    // programs, each visible to the ones after it
    let mut programs: Vec<ProgramDef> = Vec::new();
    for item in items {
        let Item::Program { name, params, body } = item else {
            continue;
        };
        if programs.iter().any(|p| p.name == name.text) {
            diags.push(Diagnostic::error(
                name.span,
                format!("program `{}` declared twice", name.text),
            ));
            continue;
        }
        let ctx = Ctx {
            vocab: &vocab,
            schemas: &schemas,
            programs: &programs,
        };
        let mut scope = Scope::new();
        let mut ps = Vec::new();
        let mut failed = false;
        for (p, d) in params {
            match ctx.domain(d) {
                Ok(id) => {
                    scope.push((p.text.clone(), domain_ty(vocab.domain(id))));
                    ps.push((p.text.clone(), id));
                }
                Err(e) => {
                    diags.push(e);
                    failed = true;
                }
            }
        }
        if failed {
            continue;
        }
        let self_ref = contains_call(body, &name.text);
        match ctx.program(body, &mut scope) {
            Ok(b) => programs.push(ProgramDef {
                name: name.text.clone(),
                params: ps,
                body: b,
            }),
            Err(mut e) => {
                if self_ref {
                    e.message
                        .push_str(" (recursive programs are not supported)");
                }
                diags.push(e);
            }
        }
    }

    if diags.iter().any(|d| d.is_error()) {
        return Err(diags);
    }
    Ok((
        ActionTheory {
            vocab,
            schemas,
            groups,
            rules: final_rules,
            init,
            programs,
        },
        diags,
    ))
}

fn contains_call(p: &RawProgram, name: &str) -> bool {
    match p {
        RawProgram::Call { name: n, .. } => n.text == name,
        RawProgram::Seq(a, b) | RawProgram::Choice(a, b) => {
            contains_call(a, name) || contains_call(b, name)
        }
        RawProgram::Pi { body, .. } => contains_call(body, name),
    }
}

#[allow(clippy::too_many_arguments)]
fn lower_schema(
    vocab: &Vocabulary,
    name: &Ident,
    params: &[RawParam],
    poss: Option<&RawExpr>,
    observe: Option<&(Ident, Vec<Ident>)>,
    likelihood: Option<&RawExpr>,
    groups: &mut Vec<Group>,
    index: usize,
) -> LResult<ActionSchema> {
    let ctx = Ctx {
        vocab,
        schemas: &[],
        programs: &[],
    };
    let mut scope = Scope::new();
    let mut ps = Vec::new();
    for p in params {
        if scope.iter().any(|(n, _)| *n == p.name.text) {
            return Err(Diagnostic::error(
                p.name.span,
                format!("parameter `{}` declared twice", p.name.text),
            ));
        }
        let d = ctx.domain(&p.domain)?;
        scope.push((p.name.text.clone(), domain_ty(vocab.domain(d))));
        ps.push(Param {
            name: p.name.text.clone(),
            domain: d,
            mode: p.mode,
        });
    }
    let (group_name, observed) = match observe {
        Some((g, visible)) => {
            let mut idx = Vec::new();
            for v in visible {
                let i = ps.iter().position(|p| p.name == v.text).ok_or_else(|| {
                    Diagnostic::error(
                        v.span,
                        format!("`{}` is not a parameter of `{}`", v.text, name.text),
                    )
                })?;
                if idx.contains(&i) {
                    return Err(Diagnostic::error(
                        v.span,
                        format!("`{}` is observed twice", v.text),
                    ));
                }
                idx.push(i);
            }
            (g.text.clone(), idx)
        }
        None => (
            name.text.clone(),
            (0..ps.len())
                .filter(|i| ps[*i].mode == ParamMode::Nominal)
                .collect(),
        ),
    };
    let poss = match poss {
        Some(raw) => ctx.expr_of(raw, &mut scope, Ty::Bool, "precondition")?,
        None => Expr::truth(),
    };
    let likelihood = match likelihood {
        Some(raw) => ctx.expr_of(raw, &mut scope, Ty::Num, "likelihood")?,
        None => Expr::lit(1i64),
    };
    let gid = match groups.iter().position(|g| g.name == group_name) {
        Some(i) => i,
        None => {
            groups.push(Group {
                name: group_name,
                members: Vec::new(),
            });
            groups.len() - 1
        }
    };
    groups[gid].members.push(SchemaId(index as u32));
    Ok(ActionSchema {
        name: name.text.clone(),
        params: ps,
        poss,
        group: GroupId(gid as u32),
        observed,
        likelihood,
        span: name.span,
    })
}

fn lower_successor(
    ctx: &Ctx,
    fluent: &Ident,
    params: &[Ident],
    cases: &[RawCase],
) -> LResult<SuccessorRule> {
    let f = ctx.vocab.fluent_by_name(&fluent.text).ok_or_else(|| {
        Diagnostic::error(fluent.span, format!("unknown fluent `{}`", fluent.text))
    })?;
    let decl = ctx.vocab.fluent(f);
    if params.len() != decl.params.len() {
        return Err(Diagnostic::error(
            fluent.span,
            format!(
                "fluent `{}` takes {} parameter(s)",
                decl.name,
                decl.params.len()
            ),
        ));
    }
    let mut header = Scope::new();
    for (p, (_, d)) in params.iter().zip(&decl.params) {
        if header.iter().any(|(n, _)| *n == p.text) {
            return Err(Diagnostic::error(
                p.span,
                format!("parameter `{}` declared twice", p.text),
            ));
        }
        header.push((p.text.clone(), domain_ty(ctx.vocab.domain(*d))));
    }
    let range = ctx.vocab.domain(decl.range);
    let range_ty = domain_ty(range);
    let mut out = Vec::new();
    for c in cases {
        let mut vars = header.clone();
        let pattern = ctx.pattern(&c.pattern, &mut vars)?;
        let guard = match &c.guard {
            Some(g) => Some(ctx.expr_of(g, &mut vars, Ty::Bool, "guard")?),
            None => None,
        };
        let value = ctx.expr_of(&c.value, &mut vars, range_ty, "successor value")?;
        check_lit_in_range(ctx.vocab, &value, range, decl)?;
        out.push(Case {
            vars: vars.into_iter().map(|(n, _)| n).collect(),
            pattern,
            guard,
            value,
        });
    }
    Ok(SuccessorRule {
        fluent: f,
        cases: out,
        origin: RuleOrigin::Explicit,
    })
}

fn check_lit_in_range(
    vocab: &Vocabulary,
    value: &Expr,
    range: &Domain,
    decl: &FluentDecl,
) -> LResult<()> {
    if let ExprKind::Lit(v) = &value.kind {
        if !range.contains(v) {
            return Err(Diagnostic::error(
                value.span,
                format!(
                    "{} is outside the range of `{}`",
                    vocab.format_value(v),
                    decl.name
                ),
            ));
        }
    }
    Ok(())
}

fn lower_clause(ctx: &Ctx, c: &RawClause) -> LResult<EffectClause> {
    let f = ctx.vocab.fluent_by_name(&c.fluent.text).ok_or_else(|| {
        Diagnostic::error(c.fluent.span, format!("unknown fluent `{}`", c.fluent.text))
    })?;
    let decl = ctx.vocab.fluent(f);
    if c.args.len() != decl.params.len() {
        return Err(Diagnostic::error(
            c.fluent.span,
            format!(
                "fluent `{}` takes {} argument(s)",
                decl.name,
                decl.params.len()
            ),
        ));
    }
    let mut vars = Scope::new();
    let mut target = Vec::new();
    for (i, (a, (_, d))) in c.args.iter().zip(&decl.params).enumerate() {
        let domain = ctx.vocab.domain(*d);
        let ty = domain_ty(domain);
        match a {
            RawPatArg::Name(id) if ctx.vocab.symbol(&id.text).is_none() => {
                if vars.iter().any(|(n, _)| *n == id.text) {
                    return Err(Diagnostic::error(
                        id.span,
                        format!("`{}` repeated in effect target", id.text),
                    ));
                }
                vars.push((id.text.clone(), ty));
                target.push(PatArg::Bind(i));
            }
            RawPatArg::Wild(_) => {
                vars.push((format!("_{i}"), ty));
                target.push(PatArg::Wild);
            }
            other => {
                let mut scratch = Scope::new();
                let lit = ctx.pat_arg(other, &mut scratch, ty, domain)?;
                vars.push((format!("_{i}"), ty));
                target.push(lit);
            }
        }
    }
    let pattern = ctx.pattern(&c.pattern, &mut vars)?;
    let context = match &c.guard {
        Some(g) => Some(ctx.expr_of(g, &mut vars, Ty::Bool, "effect context")?),
        None => None,
    };
    let range = ctx.vocab.domain(decl.range);
    let effect = match (&c.assign, c.negated) {
        (Some(v), _) => {
            let e = ctx.expr_of(v, &mut vars, domain_ty(range), "assigned value")?;
            check_lit_in_range(ctx.vocab, &e, range, decl)?;
            Effect::Assign(e)
        }
        (None, negated) => {
            if domain_ty(range) != Ty::Bool {
                return Err(Diagnostic::error(
                    c.fluent.span,
                    format!(
                        "`{}` is functional; write `causes {} := <value>`",
                        decl.name, decl.name
                    ),
                ));
            }
            if negated {
                Effect::Negative
            } else {
                Effect::Positive
            }
        }
    };
    Ok(EffectClause {
        fluent: f,
        target,
        pattern,
        effect,
        context,
        vars: vars.into_iter().map(|(n, _)| n).collect(),
        span: c.fluent.span,
    })
}
