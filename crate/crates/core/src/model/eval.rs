//! Evaluation of expressions against a situation history.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use super::expr::{BinaryOp, Builtin, Expr, ExprKind, Quantifier, Span, UnaryOp};
use super::value::{Kind, Value, ValueError};
use super::vocab::Vocabulary;
use super::world::History;
use crate::gaussian;

#[derive(Clone, Debug, PartialEq)]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EvalErrorKind {
    Value(ValueError),
    PrevOverflow { requested: usize, available: usize },
    UnboundVariable(String),
    ArgumentOutsideDomain { fluent: String, value: String },
    InfiniteQuantifier(String),
    InvalidArgument(&'static str),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.span)?;
        match &self.kind {
            EvalErrorKind::Value(e) => write!(f, "{e}"),
            EvalErrorKind::PrevOverflow {
                requested,
                available,
            } => write!(
                f,
                "prev depth {requested} exceeds history length {available}"
            ),
            EvalErrorKind::UnboundVariable(v) => write!(f, "unbound variable `{v}`"),
            EvalErrorKind::ArgumentOutsideDomain { fluent, value } => {
                write!(f, "argument {value} of `{fluent}` is outside its domain")
            }
            EvalErrorKind::InfiniteQuantifier(d) => {
                write!(f, "cannot quantify over unbounded domain `{d}`")
            }
            EvalErrorKind::InvalidArgument(m) => f.write_str(m),
        }
    }
}

impl core::error::Error for EvalError {}

fn err<T>(kind: EvalErrorKind, span: Span) -> Result<T, EvalError> {
    Err(EvalError { kind, span })
}

trait AtSpan<T> {
    fn at(self, span: Span) -> Result<T, EvalError>;
}

impl<T> AtSpan<T> for Result<T, ValueError> {
    fn at(self, span: Span) -> Result<T, EvalError> {
        self.map_err(|e| EvalError {
            kind: EvalErrorKind::Value(e),
            span,
        })
    }
}

/// Evaluates `expr` at the newest state of `history`, with `bindings`
/// supplying the values of variable slots.
pub fn evaluate<H: History + ?Sized>(
    vocab: &Vocabulary,
    expr: &Expr,
    history: &H,
    bindings: &[Value],
) -> Result<Value, EvalError> {
    Evaluator { vocab, history }.eval(expr, bindings)
}

/// Evaluates a formula, insisting on a boolean result.
pub fn evaluate_formula<H: History + ?Sized>(
    vocab: &Vocabulary,
    formula: &Expr,
    history: &H,
    bindings: &[Value],
) -> Result<bool, EvalError> {
    Evaluator { vocab, history }.eval_bool(formula, bindings)
}

struct Evaluator<'a, H: ?Sized> {
    vocab: &'a Vocabulary,
    history: &'a H,
}

impl<H: History + ?Sized> Evaluator<'_, H> {
    fn eval_bool(&self, e: &Expr, env: &[Value]) -> Result<bool, EvalError> {
        let v = self.eval(e, env)?;
        v.as_bool().ok_or(EvalError {
            kind: EvalErrorKind::Value(ValueError::Expected {
                op: "formula",
                expected: Kind::Bool,
                found: v.kind(),
            }),
            span: e.span,
        })
    }

    fn eval(&self, e: &Expr, env: &[Value]) -> Result<Value, EvalError> {
        let span = e.span;
        match &e.kind {
            ExprKind::Lit(v) => Ok(v.clone()),
            ExprKind::Var { name, slot } => match env.get(*slot) {
                Some(v) => Ok(v.clone()),
                None => err(EvalErrorKind::UnboundVariable(name.clone()), span),
            },
            ExprKind::Fluent { fluent, args, back } => {
                let state = match self.history.state_back(*back) {
                    Some(s) => s,
                    None => {
                        return err(
                            EvalErrorKind::PrevOverflow {
                                requested: *back,
                                available: self.history.steps(),
                            },
                            span,
                        )
                    }
                };
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    values.push(self.eval(a, env)?);
                }
                match self.vocab.ground_id(*fluent, &values) {
                    Some(id) => Ok(state.get(id).clone()),
                    None => err(
                        EvalErrorKind::ArgumentOutsideDomain {
                            fluent: self.vocab.fluent(*fluent).name.clone(),
                            value: values
                                .iter()
                                .map(|v| self.vocab.format_value(v))
                                .collect::<Vec<_>>()
                                .join(", "),
                        },
                        span,
                    ),
                }
            }
            ExprKind::Unary(UnaryOp::Neg, inner) => self.eval(inner, env)?.neg().at(span),
            ExprKind::Unary(UnaryOp::Not, inner) => Ok(Value::Bool(!self.eval_bool(inner, env)?)),
            ExprKind::Binary(op, l, r) => self.binary(*op, l, r, env, span),
            ExprKind::If(c, t, f) => {
                if self.eval_bool(c, env)? {
                    self.eval(t, env)
                } else {
                    self.eval(f, env)
                }
            }
            ExprKind::InRange { value, lo, hi } => {
                let v = self.eval(value, env)?;
                let lo = self.eval(lo, env)?;
                let hi = self.eval(hi, env)?;
                Ok(Value::Bool(
                    lo.num_cmp(&v).at(span)? != Ordering::Greater
                        && v.num_cmp(&hi).at(span)? != Ordering::Greater,
                ))
            }
            ExprKind::Quant {
                quantifier,
                var: _,
                domain,
                body,
            } => {
                let dom = self.vocab.domain(*domain);
                if !dom.is_finite() {
                    return err(EvalErrorKind::InfiniteQuantifier(dom.name.clone()), span);
                }
                let mut inner = Vec::with_capacity(env.len() + 1);
                inner.extend_from_slice(env);
                inner.push(Value::Bool(false));
                let want = matches!(quantifier, Quantifier::Exists);
                for v in dom.values() {
                    *inner.last_mut().unwrap() = v;
                    if self.eval_bool(body, &inner)? == want {
                        return Ok(Value::Bool(want));
                    }
                }
                Ok(Value::Bool(!want))
            }
            ExprKind::Call(builtin, args) => self.call(*builtin, args, env, span),
        }
    }

    fn binary(
        &self,
        op: BinaryOp,
        l: &Expr,
        r: &Expr,
        env: &[Value],
        span: Span,
    ) -> Result<Value, EvalError> {
        match op {
            BinaryOp::And => {
                return Ok(Value::Bool(
                    self.eval_bool(l, env)? && self.eval_bool(r, env)?,
                ))
            }
            BinaryOp::Or => {
                return Ok(Value::Bool(
                    self.eval_bool(l, env)? || self.eval_bool(r, env)?,
                ))
            }
            BinaryOp::Implies => {
                return Ok(Value::Bool(
                    !self.eval_bool(l, env)? || self.eval_bool(r, env)?,
                ))
            }
            BinaryOp::Iff => {
                return Ok(Value::Bool(
                    self.eval_bool(l, env)? == self.eval_bool(r, env)?,
                ))
            }
            _ => {}
        }
        let a = self.eval(l, env)?;
        let b = self.eval(r, env)?;
        let v = match op {
            BinaryOp::Add => a.add(&b),
            BinaryOp::Sub => a.sub(&b),
            BinaryOp::Mul => a.mul(&b),
            BinaryOp::Div => a.div(&b),
            BinaryOp::Eq => a.sem_eq(&b).map(Value::Bool),
            BinaryOp::Ne => a.sem_eq(&b).map(|x| Value::Bool(!x)),
            BinaryOp::Lt => a.num_cmp(&b).map(|o| Value::Bool(o == Ordering::Less)),
            BinaryOp::Le => a.num_cmp(&b).map(|o| Value::Bool(o != Ordering::Greater)),
            BinaryOp::Gt => a.num_cmp(&b).map(|o| Value::Bool(o == Ordering::Greater)),
            BinaryOp::Ge => a.num_cmp(&b).map(|o| Value::Bool(o != Ordering::Less)),
            BinaryOp::And | BinaryOp::Or | BinaryOp::Implies | BinaryOp::Iff => unreachable!(),
        };
        v.at(span)
    }

    fn call(
        &self,
        builtin: Builtin,
        args: &[Expr],
        env: &[Value],
        span: Span,
    ) -> Result<Value, EvalError> {
        let mut vals = Vec::with_capacity(args.len());
        for a in args {
            vals.push(self.eval(a, env)?);
        }
        match builtin {
            Builtin::Abs => vals[0].abs().at(span),
            Builtin::Min | Builtin::Max => {
                let o = vals[0].num_cmp(&vals[1]).at(span)?;
                let first = (o != Ordering::Greater) == (builtin == Builtin::Min);
                Ok(vals.swap_remove(if first { 0 } else { 1 }))
            }
            Builtin::Normal => {
                let num = |v: &Value| {
                    v.to_f64().ok_or(EvalError {
                        kind: EvalErrorKind::Value(ValueError::Expected {
                            op: "normal",
                            expected: Kind::Number,
                            found: v.kind(),
                        }),
                        span,
                    })
                };
                let d = num(&vals[0])?;
                let sigma = num(&vals[1])?;
                let step = match vals.get(2) {
                    Some(v) => num(v)?,
                    None => 1.0,
                };
                if !(sigma > 0.0) {
                    return err(
                        EvalErrorKind::InvalidArgument("normal: sigma must be positive"),
                        span,
                    );
                }
                if !(step > 0.0) {
                    return err(
                        EvalErrorKind::InvalidArgument("normal: step must be positive"),
                        span,
                    );
                }
                Ok(Value::Float(gaussian::normal_cell(d, sigma, step)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::vocab::{Domain, DomainKind, FluentDecl};
    use crate::model::world::{GroundAction, SchemaId, Trajectory, WorldState};
    use alloc::boxed::Box;
    use alloc::vec;

    fn robot() -> Vocabulary {
        let mut v = Vocabulary::new();
        let pos = v.add_domain(Domain {
            name: "Pos".into(),
            kind: DomainKind::Range(-50, 50),
        });
        v.add_fluent(FluentDecl {
            name: "position".into(),
            params: vec![],
            range: pos,
        });
        v
    }

    fn position(back: usize) -> Expr {
        Expr::new(
            ExprKind::Fluent {
                fluent: crate::model::FluentId(0),
                args: vec![],
                back,
            },
            Span::new(1, 1),
        )
    }

    fn world(p: i64) -> WorldState {
        WorldState::new(vec![Value::Int(p)])
    }

    #[test]
    fn fluent_lookup_and_arithmetic() {
        let v = robot();
        let e = Expr::binary(BinaryOp::Add, position(0), Expr::lit(2i64));
        assert_eq!(evaluate(&v, &e, &world(10), &[]).unwrap(), Value::Int(12));
    }

    #[test]
    fn bound_parameters() {
        let v = robot();
        let diff = Expr::binary(BinaryOp::Sub, Expr::var("x", 0), Expr::var("y", 1));
        let e = Expr::binary(
            BinaryOp::Le,
            Expr::new(ExprKind::Call(Builtin::Abs, vec![diff]), Span::default()),
            Expr::lit(1i64),
        );
        let r = evaluate_formula(&v, &e, &world(0), &[Value::Int(1), Value::Int(2)]);
        assert_eq!(r, Ok(true));
    }

    #[test]
    fn prev_reads_the_preceding_state() {
        let v = robot();
        let step = GroundAction {
            schema: SchemaId(0),
            args: vec![Value::Int(-2)],
        };
        let t = Trajectory::initial(0, world(12)).extend(step, world(10));
        let e = Expr::binary(
            BinaryOp::Eq,
            position(0),
            Expr::binary(BinaryOp::Sub, position(1), Expr::lit(2i64)),
        );
        assert_eq!(evaluate_formula(&v, &e, &t, &[]), Ok(true));
        let too_deep = position(2);
        let error = evaluate(&v, &too_deep, &t, &[]).unwrap_err();
        assert_eq!(
            error.kind,
            EvalErrorKind::PrevOverflow {
                requested: 2,
                available: 1
            }
        );
        assert_eq!(error.span.line, 1);
    }

    #[test]
    fn errors_carry_locations() {
        let v = robot();
        let e = Expr::new(
            ExprKind::Binary(
                BinaryOp::Div,
                Box::new(Expr::lit(1i64)),
                Box::new(Expr::lit(0i64)),
            ),
            Span::new(3, 7),
        );
        let error = evaluate(&v, &e, &world(0), &[]).unwrap_err();
        assert_eq!(error.kind, EvalErrorKind::Value(ValueError::DivisionByZero));
        assert_eq!(alloc::format!("{error}"), "3:7: division by zero");
        let mismatch = Expr::binary(BinaryOp::Eq, Expr::lit(true), Expr::lit(1i64));
        assert!(evaluate(&v, &mismatch, &world(0), &[]).is_err());
    }

    #[test]
    fn quantifiers_range_over_finite_domains() {
        let v = robot();
        let body = Expr::binary(BinaryOp::Ge, Expr::var("p", 0), Expr::lit(-50i64));
        let all = Expr::new(
            ExprKind::Quant {
                quantifier: Quantifier::Forall,
                var: "p".into(),
                domain: crate::model::DomainId(0),
                body: Box::new(body),
            },
            Span::default(),
        );
        assert_eq!(evaluate_formula(&v, &all, &world(0), &[]), Ok(true));
        let body = Expr::binary(BinaryOp::Eq, Expr::var("p", 0), position(0));
        let some = Expr::new(
            ExprKind::Quant {
                quantifier: Quantifier::Exists,
                var: "p".into(),
                domain: crate::model::DomainId(0),
                body: Box::new(body),
            },
            Span::default(),
        );
        assert_eq!(evaluate_formula(&v, &some, &world(7), &[]), Ok(true));
    }

    #[test]
    fn normal_builtin_yields_cell_mass() {
        let v = robot();
        let e = Expr::new(
            ExprKind::Call(Builtin::Normal, vec![Expr::lit(0i64), Expr::lit(1i64)]),
            Span::default(),
        );
        let got = evaluate(&v, &e, &world(0), &[]).unwrap().to_f64().unwrap();
        assert!((got - 0.382_924_922_548_026).abs() < 1e-9);
    }
}
