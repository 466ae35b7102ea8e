//! Truth of formulas at states.
//!
//! `C_G φ` holds at `s` iff `φ` holds at every state of the model that is
//! reachable from `s` through the indistinguishability relations of members
//! of `G`. The quantification ranges over the states of the model's effective
//! hypergraph, so unknown-hypergraph models get the complete-hypergraph
//! semantics with no extra machinery.

mod bounded;
mod exact;
mod fast;
mod space;

use serde::Serialize;
use thiserror::Error;

use crate::formula::Formula;
use crate::model::{InteractionModel, PlayerId};
use crate::state::EpistemicState;

pub use bounded::BoundedSession;
pub use exact::Session;
pub use fast::PositiveEvaluator;
pub use space::StateSpace;

/// Default limit on enumerated candidates and states.
pub const DEFAULT_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemanticsError {
    #[error(
        "state space too large: {universe} messages in the universe, about {estimated:.0} states (cap {cap})"
    )]
    CapExceeded {
        universe: usize,
        estimated: f64,
        cap: usize,
    },
    #[error("not a valid state of the model")]
    InvalidState,
    #[error("state index out of range")]
    StateNotInSpace,
    #[error("state has {messages} messages, more than the bound {bound}")]
    BoundTooSmall { messages: usize, bound: usize },
    #[error("the positive evaluator requires telling semantics")]
    NotTelling,
    #[error("the positive evaluator requires a negation-free formula")]
    NotPositive,
    #[error("formula mentions an atom or player outside the model")]
    FormulaOutOfModel,
    #[error("empty group")]
    EmptyGroup,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict3 {
    True,
    False,
    Unknown,
}

impl From<bool> for Verdict3 {
    fn from(b: bool) -> Self {
        if b {
            Verdict3::True
        } else {
            Verdict3::False
        }
    }
}

impl std::fmt::Display for Verdict3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict3::True => "true",
            Verdict3::False => "false",
            Verdict3::Unknown => "unknown",
        })
    }
}

pub fn enumerate_states(
    model: &InteractionModel,
    cap: usize,
) -> Result<StateSpace, SemanticsError> {
    StateSpace::enumerate(model, cap)
}

pub fn indist(
    model: &InteractionModel,
    s: &EpistemicState,
    t: &EpistemicState,
    i: PlayerId,
) -> bool {
    crate::state::indist(model, s, t, i)
}

/// Exact truth of `f` at `s`, enumerating with [`DEFAULT_CAP`].
pub fn holds(
    model: &InteractionModel,
    s: &EpistemicState,
    f: &Formula,
) -> Result<bool, SemanticsError> {
    Session::new(model, DEFAULT_CAP)?.holds(s, f)
}

/// Sound three-valued truth over the states with at most `bound` messages.
pub fn holds_bounded(
    model: &InteractionModel,
    s: &EpistemicState,
    f: &Formula,
    bound: usize,
) -> Result<Verdict3, SemanticsError> {
    if s.messages.len() > bound {
        return Err(SemanticsError::BoundTooSmall {
            messages: s.messages.len(),
            bound,
        });
    }
    BoundedSession::new(model, bound, DEFAULT_CAP)?.verdict(s, f)
}

/// Positive-fragment fast path; telling only.
pub fn holds_positive_fast(
    model: &InteractionModel,
    s: &EpistemicState,
    f: &Formula,
) -> Result<bool, SemanticsError> {
    if !crate::state::is_valid_state(model, s) {
        return Err(SemanticsError::InvalidState);
    }
    PositiveEvaluator::new(model)?.holds(s, f)
}
