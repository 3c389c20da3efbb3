//! Unresolved syntax trees, as written in the source.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::model::{BinaryOp, Quantifier, Rational, Span, UnaryOp};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    pub text: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawExpr {
    pub kind: RawExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RawExprKind {
    Num(Rational),
    Bool(bool),
    Name(String),
    App {
        name: Ident,
        args: Vec<RawExpr>,
    },
    Now,
    Prev(Box<RawExpr>),
    Unary(UnaryOp, Box<RawExpr>),
    Binary(BinaryOp, Box<RawExpr>, Box<RawExpr>),
    If(Box<RawExpr>, Box<RawExpr>, Box<RawExpr>),
    InRange {
        value: Box<RawExpr>,
        lo: Box<RawExpr>,
        hi: Box<RawExpr>,
    },
    Quant {
        quantifier: Quantifier,
        var: Ident,
        domain: Ident,
        body: Box<RawExpr>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum DomainDef {
    Range(i64, i64),
    Symbols(Vec<Ident>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Nominal,
    Actual,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawParam {
    pub mode: Mode,
    pub name: Ident,
    pub domain: Ident,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RawPatArg {
    Wild(Span),
    Name(Ident),
    Lit(RawExpr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawPattern {
    /// `None` for the catch-all `_`.
    pub schema: Option<Ident>,
    pub args: Vec<RawPatArg>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawCase {
    pub pattern: RawPattern,
    pub guard: Option<RawExpr>,
    pub value: RawExpr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawClause {
    pub pattern: RawPattern,
    pub negated: bool,
    pub fluent: Ident,
    pub args: Vec<RawPatArg>,
    pub assign: Option<RawExpr>,
    pub guard: Option<RawExpr>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawAssign {
    pub fluent: Ident,
    pub args: Vec<RawExpr>,
    pub value: RawExpr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawWorld {
    pub span: Span,
    pub assigns: Vec<RawAssign>,
    pub weight: Option<RawExpr>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RawProgram {
    /// `name`, `name(args)`; `_` leaves an argument to the environment.
    Call {
        name: Ident,
        args: Option<Vec<Option<RawExpr>>>,
    },
    Seq(Box<RawProgram>, Box<RawProgram>),
    Choice(Box<RawProgram>, Box<RawProgram>),
    Pi {
        var: Ident,
        domain: Ident,
        body: Box<RawProgram>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Domain {
        name: Ident,
        def: DomainDef,
    },
    Fluent {
        name: Ident,
        params: Vec<(Ident, Ident)>,
        range: Ident,
    },
    Action {
        name: Ident,
        params: Vec<RawParam>,
        poss: Option<RawExpr>,
        observe: Option<(Ident, Vec<Ident>)>,
        likelihood: Option<RawExpr>,
    },
    Successor {
        fluent: Ident,
        params: Vec<Ident>,
        cases: Vec<RawCase>,
    },
    Effects(Vec<RawClause>),
    Init(Vec<RawWorld>),
    Program {
        name: Ident,
        params: Vec<(Ident, Ident)>,
        body: RawProgram,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryKind {
    Bel,
    Know,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RawStep {
    Actual(Vec<RawAssign>),
    Observe {
        group: Ident,
        args: Vec<RawExpr>,
    },
    Exec(RawProgram),
    Query {
        kind: QueryKind,
        formula: RawExpr,
    },
    Assert {
        op: BinaryOp,
        value: RawExpr,
        tolerance: Option<RawExpr>,
    },
}
