//! Resolved action theories.

use alloc::string::String;
use alloc::vec::Vec;

use crate::model::{
    DomainId, Expr, FluentId, Formula, GroupId, Program, SchemaId, Span, Value, Vocabulary,
    WorldState,
};

pub use super::syntax::Mode as ParamMode;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub domain: DomainId,
    pub mode: ParamMode,
}

/// An action schema. `poss` and `likelihood` see the parameters as
/// binding slots `0..params.len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<Param>,
    pub poss: Formula,
    pub group: GroupId,
    /// Parameters visible to the agent, in signature order.
    pub observed: Vec<usize>,
    pub likelihood: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    pub name: String,
    pub members: Vec<SchemaId>,
}

/// One argument position of an action pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatArg {
    Wild,
    /// Binds the next slot to the argument.
    Bind(usize),
    /// Requires the argument to equal an already bound slot.
    Match(usize),
    Lit(Value),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionPattern {
    /// `None` matches every action.
    pub schema: Option<SchemaId>,
    pub args: Vec<PatArg>,
}

/// `case <pattern> [when <guard>] => <value>`.
///
/// Slots `0..arity` hold the ground fluent's arguments, followed by the
/// pattern's bound variables; `vars` names every slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Case {
    pub vars: Vec<String>,
    pub pattern: ActionPattern,
    pub guard: Option<Formula>,
    pub value: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Effect {
    Positive,
    Negative,
    Assign(Expr),
}

/// `<pattern> causes [not] F(args) [:= value] [when context]`.
///
/// Slots follow the [`Case`] layout: one per target position, then the
/// pattern's bound variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectClause {
    pub fluent: FluentId,
    pub target: Vec<PatArg>,
    pub pattern: ActionPattern,
    pub effect: Effect,
    pub context: Option<Formula>,
    pub vars: Vec<String>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleOrigin {
    /// No rule was written: the fluent never changes.
    Frame,
    Explicit,
    Compiled(Vec<EffectClause>),
}

/// Cases are tried in order; the first whose pattern and guard match
/// determines the new value, otherwise the value persists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuccessorRule {
    pub fluent: FluentId,
    pub cases: Vec<Case>,
    pub origin: RuleOrigin,
}

impl SuccessorRule {
    pub fn frame(fluent: FluentId) -> Self {
        SuccessorRule {
            fluent,
            cases: Vec::new(),
            origin: RuleOrigin::Frame,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialWorld {
    pub world: WorldState,
    pub weight: Value,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgramDef {
    pub name: String,
    pub params: Vec<(String, DomainId)>,
    pub body: Program,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionTheory {
    pub vocab: Vocabulary,
    pub schemas: Vec<ActionSchema>,
    pub groups: Vec<Group>,
    /// Indexed by [`FluentId`].
    pub rules: Vec<SuccessorRule>,
    pub init: Vec<InitialWorld>,
    pub programs: Vec<ProgramDef>,
}

impl ActionTheory {
    pub fn schema(&self, id: SchemaId) -> &ActionSchema {
        &self.schemas[id.0 as usize]
    }

    pub fn schema_by_name(&self, name: &str) -> Option<SchemaId> {
        self.schemas
            .iter()
            .position(|s| s.name == name)
            .map(|i| SchemaId(i as u32))
    }

    pub fn group(&self, id: GroupId) -> &Group {
        &self.groups[id.0 as usize]
    }

    pub fn group_by_name(&self, name: &str) -> Option<GroupId> {
        self.groups
            .iter()
            .position(|g| g.name == name)
            .map(|i| GroupId(i as u32))
    }

    pub fn rule(&self, fluent: FluentId) -> &SuccessorRule {
        &self.rules[fluent.0 as usize]
    }

    pub fn program_by_name(&self, name: &str) -> Option<usize> {
        self.programs.iter().position(|p| p.name == name)
    }

    /// Deepest `prev` reference in any precondition, likelihood or rule.
    pub fn max_back(&self) -> usize {
        let schemas = self
            .schemas
            .iter()
            .map(|s| s.poss.max_back().max(s.likelihood.max_back()));
        let rules = self.rules.iter().flat_map(|r| r.cases.iter()).map(|c| {
            c.value
                .max_back()
                .max(c.guard.as_ref().map_or(0, Expr::max_back))
        });
        let programs = self.programs.iter().map(|p| p.body.max_back());
        schemas.chain(rules).chain(programs).max().unwrap_or(0)
    }
}
