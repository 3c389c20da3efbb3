//! Complex actions.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use super::expr::Expr;
use super::vocab::DomainId;
use super::world::{GroundAction, SchemaId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Program {
    /// A primitive action. `None` arguments are left to the environment
    /// and range over the parameter's domain.
    Prim {
        schema: SchemaId,
        args: Vec<Option<Expr>>,
    },
    Ground(GroundAction),
    Seq(Box<Program>, Box<Program>),
    Choice(Box<Program>, Box<Program>),
    /// Nondeterministic choice of a value for `var`, which occupies the
    /// next binding slot inside `body`.
    Pi {
        var: String,
        domain: DomainId,
        body: Box<Program>,
    },
    /// A named program; `args` bind its parameters.
    Call {
        program: usize,
        args: Vec<Expr>,
    },
}

impl Program {
    pub fn seq(a: Program, b: Program) -> Program {
        Program::Seq(Box::new(a), Box::new(b))
    }

    pub fn choice(a: Program, b: Program) -> Program {
        Program::Choice(Box::new(a), Box::new(b))
    }

    /// Largest `prev` depth used by argument expressions.
    pub fn max_back(&self) -> usize {
        match self {
            Program::Prim { args, .. } => {
                args.iter().flatten().map(Expr::max_back).max().unwrap_or(0)
            }
            Program::Ground(_) => 0,
            Program::Seq(a, b) | Program::Choice(a, b) => a.max_back().max(b.max_back()),
            Program::Pi { body, .. } => body.max_back(),
            Program::Call { args, .. } => args.iter().map(Expr::max_back).max().unwrap_or(0),
        }
    }
}
