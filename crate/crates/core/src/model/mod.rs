//! Values, expressions, world states, histories and belief states.

mod belief;
mod eval;
mod expr;
mod program;
mod value;
mod vocab;
mod world;

pub use belief::{BeliefError, BeliefState, Member, NumericMode, Weight, WeightError};
pub use eval::{evaluate, evaluate_formula, EvalError, EvalErrorKind};
pub use expr::{BinaryOp, Builtin, Expr, ExprKind, Formula, Quantifier, Span, UnaryOp};
pub use program::Program;
pub use value::{
    format_rational, parse_decimal, parse_rational, rational_to_f64, Kind, Rational, SymbolId,
    Value, ValueError,
};
pub use vocab::{
    cartesian, Domain, DomainId, DomainKind, FluentDecl, FluentId, GroundFluentId, Vocabulary,
};
pub use world::{
    GroundAction, GroupId, History, ObservationSignature, SchemaId, Trajectory, WorldState,
};
