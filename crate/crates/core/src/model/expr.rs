//! Expression and formula syntax trees.
//!
//! Formulas are expressions of boolean type; both share one tree so that
//! `if`-`then`-`else` can mix them freely.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use super::value::Value;
use super::vocab::{DomainId, FluentId};

/// Source position. All spans compare equal, so syntax trees parsed from
/// differently formatted text are equal when their structure is.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

impl core::hash::Hash for Span {
    fn hash<H: core::hash::Hasher>(&self, _: &mut H) {}
}

impl core::fmt::Display for Span {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Implies,
    Iff,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::And => "and",
            BinaryOp::Or => "or",
            BinaryOp::Implies => "implies",
            BinaryOp::Iff => "iff",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Iff => 1,
            BinaryOp::Implies => 2,
            BinaryOp::Or => 3,
            BinaryOp::And => 4,
            BinaryOp::Eq
            | BinaryOp::Ne
            | BinaryOp::Lt
            | BinaryOp::Le
            | BinaryOp::Gt
            | BinaryOp::Ge => 6,
            BinaryOp::Add | BinaryOp::Sub => 7,
            BinaryOp::Mul | BinaryOp::Div => 8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Abs,
    Min,
    Max,
    /// `normal(d, sigma)` or `normal(d, sigma, step)`: mass of N(0, sigma^2)
    /// on the cell of width `step` (default 1) centred on `d`.
    Normal,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Abs => "abs",
            Builtin::Min => "min",
            Builtin::Max => "max",
            Builtin::Normal => "normal",
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        Some(match name {
            "abs" => Builtin::Abs,
            "min" => Builtin::Min,
            "max" => Builtin::Max,
            "normal" => Builtin::Normal,
            _ => return None,
        })
    }

    pub fn arity(self) -> core::ops::RangeInclusive<usize> {
        match self {
            Builtin::Abs => 1..=1,
            Builtin::Min | Builtin::Max => 2..=2,
            Builtin::Normal => 2..=3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

/// Formulas are boolean-typed expressions.
pub type Formula = Expr;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Lit(Value),
    /// A bound variable; `slot` indexes the bindings in scope.
    Var {
        name: String,
        slot: usize,
    },
    /// `f(args)` evaluated `back` steps into the past (`prev^back(now)`).
    Fluent {
        fluent: FluentId,
        args: Vec<Expr>,
        back: usize,
    },
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    /// `value in [lo, hi]`, inclusive on both ends.
    InRange {
        value: Box<Expr>,
        lo: Box<Expr>,
        hi: Box<Expr>,
    },
    /// Binds slot `bindings.len()` to each element of a finite domain.
    Quant {
        quantifier: Quantifier,
        var: String,
        domain: DomainId,
        body: Box<Expr>,
    },
    Call(Builtin, Vec<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn lit(v: impl Into<Value>) -> Self {
        Expr::new(ExprKind::Lit(v.into()), Span::default())
    }

    pub fn truth() -> Self {
        Expr::lit(true)
    }

    pub fn binary(op: BinaryOp, l: Expr, r: Expr) -> Self {
        let span = l.span;
        Expr::new(ExprKind::Binary(op, Box::new(l), Box::new(r)), span)
    }

    pub fn negate(e: Expr) -> Self {
        let span = e.span;
        Expr::new(ExprKind::Unary(UnaryOp::Not, Box::new(e)), span)
    }

    pub fn var(name: &str, slot: usize) -> Self {
        Expr::new(
            ExprKind::Var {
                name: String::from(name),
                slot,
            },
            Span::default(),
        )
    }

    /// Largest `prev` depth referenced anywhere in the tree.
    pub fn max_back(&self) -> usize {
        let mut m = 0;
        self.visit(&mut |e| {
            if let ExprKind::Fluent { back, .. } = &e.kind {
                m = m.max(*back);
            }
        });
        m
    }

    /// True when the tree mentions no fluent and no variable.
    pub fn is_closed(&self) -> bool {
        let mut closed = true;
        self.visit(&mut |e| {
            if matches!(e.kind, ExprKind::Fluent { .. } | ExprKind::Var { .. }) {
                closed = false;
            }
        });
        closed
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Lit(_) | ExprKind::Var { .. } => {}
            ExprKind::Fluent { args, .. } | ExprKind::Call(_, args) => {
                args.iter().for_each(|a| a.visit(f))
            }
            ExprKind::Unary(_, e) => e.visit(f),
            ExprKind::Binary(_, l, r) => {
                l.visit(f);
                r.visit(f);
            }
            ExprKind::If(c, t, e) => {
                c.visit(f);
                t.visit(f);
                e.visit(f);
            }
            ExprKind::InRange { value, lo, hi } => {
                value.visit(f);
                lo.visit(f);
                hi.visit(f);
            }
            ExprKind::Quant { body, .. } => body.visit(f),
        }
    }
}
