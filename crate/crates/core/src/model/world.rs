//! World states, ground actions and situation histories.

use alloc::sync::Arc;
use alloc::vec::Vec;

use super::value::Value;
use super::vocab::{GroundFluentId, Vocabulary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SchemaId(pub u32);

/// Key shared by action schemas whose instances the agent cannot tell apart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupId(pub u32);

/// Total assignment of values to ground fluents, indexed by [`GroundFluentId`].
/// Ordering is lexicographic over ground fluents in declaration order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldState(Vec<Value>);

impl WorldState {
    pub fn new(values: Vec<Value>) -> Self {
        WorldState(values)
    }

    pub fn get(&self, id: GroundFluentId) -> &Value {
        &self.0[id.0 as usize]
    }

    pub fn set(&mut self, id: GroundFluentId, v: Value) {
        self.0[id.0 as usize] = v;
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the first ground fluent whose value lies outside its range.
    pub fn first_out_of_domain(&self, vocab: &Vocabulary) -> Option<GroundFluentId> {
        if self.0.len() != vocab.ground_count() {
            return Some(GroundFluentId(self.0.len().min(vocab.ground_count()) as u32));
        }
        (0..self.0.len() as u32)
            .map(GroundFluentId)
            .find(|id| !vocab.range_of(*id).contains(self.get(*id)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAction {
    pub schema: SchemaId,
    pub args: Vec<Value>,
}

/// The agent-visible part of a ground action. Equal signatures realize the
/// observational indistinguishability relation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObservationSignature {
    pub group: GroupId,
    pub args: Vec<Value>,
}

/// Read access to the states of a history, newest first.
pub trait History {
    /// Number of actions in the history.
    fn steps(&self) -> usize;
    /// State `back` steps before the newest one.
    fn state_back(&self, back: usize) -> Option<&WorldState>;

    fn current(&self) -> &WorldState {
        self.state_back(0)
            .expect("histories always have a current state")
    }
}

impl History for WorldState {
    fn steps(&self) -> usize {
        0
    }

    fn state_back(&self, back: usize) -> Option<&WorldState> {
        (back == 0).then_some(self)
    }
}

/// States ordered oldest to newest.
impl History for [WorldState] {
    fn steps(&self) -> usize {
        self.len().saturating_sub(1)
    }

    fn state_back(&self, back: usize) -> Option<&WorldState> {
        self.len().checked_sub(back + 1).map(|i| &self[i])
    }
}

#[derive(Debug)]
struct Node {
    world: WorldState,
    parent: Option<(GroundAction, Arc<Node>)>,
    depth: usize,
}

/// A situation: an initial world followed by a sequence of
/// `(action, resulting world)` pairs. Extension shares the prefix, so
/// branching a belief state is cheap.
#[derive(Clone, Debug)]
pub struct Trajectory {
    origin: usize,
    head: Arc<Node>,
}

impl Trajectory {
    /// `origin` is the index of `world` in the theory's initial belief.
    pub fn initial(origin: usize, world: WorldState) -> Self {
        Trajectory {
            origin,
            head: Arc::new(Node {
                world,
                parent: None,
                depth: 0,
            }),
        }
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.head.depth
    }

    pub fn is_empty(&self) -> bool {
        self.head.depth == 0
    }

    pub fn extend(&self, action: GroundAction, world: WorldState) -> Self {
        Trajectory {
            origin: self.origin,
            head: Arc::new(Node {
                world,
                depth: self.head.depth + 1,
                parent: Some((action, self.head.clone())),
            }),
        }
    }

    pub fn last_action(&self) -> Option<&GroundAction> {
        self.head.parent.as_ref().map(|(a, _)| a)
    }

    /// The history before the last action.
    pub fn parent(&self) -> Option<Trajectory> {
        self.head.parent.as_ref().map(|(_, n)| Trajectory {
            origin: self.origin,
            head: n.clone(),
        })
    }

    pub fn initial_world(&self) -> &WorldState {
        let mut node = &self.head;
        while let Some((_, p)) = &node.parent {
            node = p;
        }
        &node.world
    }

    /// `(action, resulting world)` pairs from oldest to newest.
    pub fn steps_vec(&self) -> Vec<(GroundAction, WorldState)> {
        let mut out = Vec::with_capacity(self.len());
        let mut node = &self.head;
        while let Some((a, p)) = &node.parent {
            out.push((a.clone(), node.world.clone()));
            node = p;
        }
        out.reverse();
        out
    }

    /// All states from the initial world to the current one.
    pub fn states(&self) -> Vec<WorldState> {
        let mut out = Vec::with_capacity(self.len() + 1);
        let mut node = &self.head;
        loop {
            out.push(node.world.clone());
            match &node.parent {
                Some((_, p)) => node = p,
                None => break,
            }
        }
        out.reverse();
        out
    }

    /// The newest `depth + 1` states (fewer near the start), newest first.
    pub fn recent_states(&self, depth: usize) -> Vec<&WorldState> {
        (0..=depth).map_while(|k| self.state_back(k)).collect()
    }
}

impl History for Trajectory {
    fn steps(&self) -> usize {
        self.head.depth
    }

    fn state_back(&self, back: usize) -> Option<&WorldState> {
        let mut node = &self.head;
        for _ in 0..back {
            node = &node.parent.as_ref()?.1;
        }
        Some(&node.world)
    }
}

/// Trajectories are equal when they describe the same situation.
impl PartialEq for Trajectory {
    fn eq(&self, other: &Self) -> bool {
        if self.origin != other.origin || self.len() != other.len() {
            return false;
        }
        Arc::ptr_eq(&self.head, &other.head)
            || (self.initial_world() == other.initial_world()
                && self.steps_vec() == other.steps_vec())
    }
}

impl Eq for Trajectory {}
