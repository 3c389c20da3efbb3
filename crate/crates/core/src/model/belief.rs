//! Weighted sets of K-related situations.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use super::value::{format_rational, rational_to_f64, Rational, Value};
use super::world::{History, Trajectory, WorldState};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NumericMode {
    /// Exact rationals throughout; the default.
    #[default]
    Exact,
    /// `f64` weights, for theories with discretized Gaussian likelihoods.
    Float,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum WeightError {
    #[error("weight must be a number")]
    NotNumeric,
    #[error("float weight {0} in exact mode (run in float mode)")]
    FloatInExactMode(f64),
    #[error("weight must be nonnegative, got {0}")]
    Negative(alloc::string::String),
    #[error("weight is not finite")]
    NotFinite,
}

/// A nonnegative situation weight (the value of `p`).
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Exact(Rational),
    Float(f64),
}

impl Weight {
    pub fn zero(mode: NumericMode) -> Weight {
        match mode {
            NumericMode::Exact => Weight::Exact(Rational::zero()),
            NumericMode::Float => Weight::Float(0.0),
        }
    }

    pub fn one(mode: NumericMode) -> Weight {
        match mode {
            NumericMode::Exact => Weight::Exact(Rational::from_integer(1.into())),
            NumericMode::Float => Weight::Float(1.0),
        }
    }

    /// Converts an evaluated likelihood or initial weight.
    pub fn from_value(v: &Value, mode: NumericMode) -> Result<Weight, WeightError> {
        let w = match (mode, v) {
            (NumericMode::Exact, Value::Float(x)) => return Err(WeightError::FloatInExactMode(*x)),
            (NumericMode::Exact, _) => {
                Weight::Exact(v.to_rational().ok_or(WeightError::NotNumeric)?)
            }
            (NumericMode::Float, _) => {
                let x = v.to_f64().ok_or(WeightError::NotNumeric)?;
                if !x.is_finite() {
                    return Err(WeightError::NotFinite);
                }
                Weight::Float(x)
            }
        };
        if w.is_negative() {
            return Err(WeightError::Negative(alloc::format!("{w}")));
        }
        Ok(w)
    }

    pub fn mode(&self) -> NumericMode {
        match self {
            Weight::Exact(_) => NumericMode::Exact,
            Weight::Float(_) => NumericMode::Float,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Weight::Exact(r) => r.is_zero(),
            Weight::Float(x) => *x == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Weight::Exact(r) => r.is_negative(),
            Weight::Float(x) => *x < 0.0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Weight::Exact(r) => rational_to_f64(r),
            Weight::Float(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Weight::Exact(r) => Some(r),
            Weight::Float(_) => None,
        }
    }

    pub fn add(&self, other: &Weight) -> Weight {
        match (self, other) {
            (Weight::Exact(a), Weight::Exact(b)) => Weight::Exact(a + b),
            _ => Weight::Float(self.to_f64() + other.to_f64()),
        }
    }

    pub fn mul(&self, other: &Weight) -> Weight {
        match (self, other) {
            (Weight::Exact(a), Weight::Exact(b)) => Weight::Exact(a * b),
            _ => Weight::Float(self.to_f64() * other.to_f64()),
        }
    }

    /// `None` when `other` is zero.
    pub fn checked_div(&self, other: &Weight) -> Option<Weight> {
        if other.is_zero() {
            return None;
        }
        Some(match (self, other) {
            (Weight::Exact(a), Weight::Exact(b)) => Weight::Exact(a / b),
            _ => Weight::Float(self.to_f64() / other.to_f64()),
        })
    }

    pub fn sum<'a>(mode: NumericMode, items: impl IntoIterator<Item = &'a Weight>) -> Weight {
        items
            .into_iter()
            .fold(Weight::zero(mode), |acc, w| acc.add(w))
    }
}

/// `num/den` in exact mode, shortest round-trip decimal in float mode.
impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Exact(r) => f.write_str(&format_rational(r)),
            Weight::Float(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Member {
    pub trajectory: Trajectory,
    pub weight: Weight,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum BeliefError {
    #[error("member {index} has {found} steps, expected {expected}")]
    Ragged {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("member {index} has weight in the wrong numeric mode")]
    ModeMismatch { index: usize },
    #[error("member {index} has a negative weight")]
    Negative { index: usize },
}

/// The agent's epistemic state: every K-related situation with its weight.
/// Zero-weight members stay; they matter to knowledge but not to belief.
#[derive(Clone, Debug, PartialEq)]
pub struct BeliefState {
    step: usize,
    members: Vec<Member>,
    mode: NumericMode,
}

impl BeliefState {
    pub fn new(step: usize, members: Vec<Member>, mode: NumericMode) -> Result<Self, BeliefError> {
        for (index, m) in members.iter().enumerate() {
            if m.trajectory.len() != step {
                return Err(BeliefError::Ragged {
                    index,
                    found: m.trajectory.len(),
                    expected: step,
                });
            }
            if m.weight.mode() != mode {
                return Err(BeliefError::ModeMismatch { index });
            }
            if m.weight.is_negative() {
                return Err(BeliefError::Negative { index });
            }
        }
        Ok(BeliefState {
            step,
            members,
            mode,
        })
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn mode(&self) -> NumericMode {
        self.mode
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn total_weight(&self) -> Weight {
        Weight::sum(self.mode, self.members.iter().map(|m| &m.weight))
    }

    /// Unnormalized weight per current world, in world order.
    pub fn world_weights(&self) -> Vec<(WorldState, Weight)> {
        let mut table: BTreeMap<&WorldState, Weight> = BTreeMap::new();
        for m in &self.members {
            let w = m.trajectory.current();
            match table.get_mut(w) {
                Some(acc) => *acc = acc.add(&m.weight),
                None => {
                    table.insert(w, m.weight.clone());
                }
            }
        }
        table.into_iter().map(|(w, x)| (w.clone(), x)).collect()
    }

    /// Normalized degree of belief per current world; `None` when the total
    /// weight is zero.
    pub fn world_distribution(&self) -> Option<Vec<(WorldState, Weight)>> {
        let total = self.total_weight();
        self.world_weights()
            .into_iter()
            .map(|(w, x)| x.checked_div(&total).map(|p| (w, p)))
            .collect()
    }

    /// Merges members whose newest `depth + 1` states coincide, summing
    /// their weights and keeping the first member's history.
    ///
    /// Poss, likelihoods, successor rules and queries that look at most
    /// `depth` steps back cannot tell merged members apart, so belief and
    /// knowledge for such formulas are unchanged.
    pub fn collapse(&self, depth: usize) -> BeliefState {
        let mut index: BTreeMap<Vec<&WorldState>, usize> = BTreeMap::new();
        let mut members: Vec<Member> = Vec::new();
        for m in &self.members {
            let key = m.trajectory.recent_states(depth);
            match index.get(&key) {
                Some(&i) => {
                    let merged = members[i].weight.add(&m.weight);
                    members[i].weight = merged;
                }
                None => {
                    index.insert(key, members.len());
                    members.push(m.clone());
                }
            }
        }
        BeliefState {
            step: self.step,
            members,
            mode: self.mode,
        }
    }

    /// Drops members whose share of the total weight is below `epsilon`.
    /// Only meaningful in float mode; exact beliefs are returned unchanged.
    pub fn prune(&self, epsilon: f64) -> BeliefState {
        if self.mode == NumericMode::Exact {
            return self.clone();
        }
        let total = self.total_weight().to_f64();
        let members = self
            .members
            .iter()
            .filter(|m| total > 0.0 && m.weight.to_f64() / total >= epsilon)
            .cloned()
            .collect();
        BeliefState {
            step: self.step,
            members,
            mode: self.mode,
        }
    }
}
