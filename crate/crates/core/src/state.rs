//! States `(V, M)`, restrictions to players and words, and legality checks.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::explain::known_set_unchecked;
use crate::model::{AtomId, InteractionModel, Message, Mode, PlayerId};

/// A valuation (the true atoms) together with the set of broadcast messages.
///
/// Both components are ordered sets, so the derived ordering is the canonical
/// state order used throughout.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EpistemicState {
    pub valuation: BTreeSet<AtomId>,
    pub messages: BTreeSet<Message>,
}

impl EpistemicState {
    pub fn new(
        valuation: impl IntoIterator<Item = AtomId>,
        messages: impl IntoIterator<Item = Message>,
    ) -> Self {
        EpistemicState {
            valuation: valuation.into_iter().collect(),
            messages: messages.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Atoms mentioned by some message.
    pub fn facts(&self) -> BTreeSet<AtomId> {
        facts_of_messages(&self.messages)
    }

    /// Componentwise inclusion.
    pub fn is_subset(&self, other: &EpistemicState) -> bool {
        self.valuation.is_subset(&other.valuation) && self.messages.is_subset(&other.messages)
    }

    pub fn render(&self, model: &InteractionModel) -> String {
        let v: Vec<&str> = self.valuation.iter().map(|&a| model.atom_name(a)).collect();
        let m: Vec<String> = self
            .messages
            .iter()
            .map(|m| format!("({})", model.render_message(m)))
            .collect();
        format!("V={{{}}} M={{{}}}", v.join(","), m.join(", "))
    }
}

pub fn facts_of_messages<'a>(messages: impl IntoIterator<Item = &'a Message>) -> BTreeSet<AtomId> {
    messages.into_iter().map(|m| m.atom).collect()
}

/// Player `i`'s view `(V ∩ At_i, {m ∈ M | i ∈ arc(m)})`.
pub fn restrict(
    model: &InteractionModel,
    state: &EpistemicState,
    player: PlayerId,
) -> EpistemicState {
    EpistemicState {
        valuation: state
            .valuation
            .iter()
            .copied()
            .filter(|&a| model.owns(player, a))
            .collect(),
        messages: state
            .messages
            .iter()
            .filter(|m| m.arc.contains(player))
            .cloned()
            .collect(),
    }
}

/// Messages whose arc contains every player occurring in `word`.
pub fn messages_to_word(state: &EpistemicState, word: &[PlayerId]) -> BTreeSet<Message> {
    state
        .messages
        .iter()
        .filter(|m| m.arc.covers(word))
        .cloned()
        .collect()
}

/// Indistinguishability for one player.
pub fn indist(
    model: &InteractionModel,
    s: &EpistemicState,
    t: &EpistemicState,
    player: PlayerId,
) -> bool {
    restrict(model, s, player) == restrict(model, t, player)
}

/// Why a message is outside the message universe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum UniverseRule {
    SenderNotInArc,
    SenderNotOwner,
    ArcNotInHypergraph,
    UnknownSymbol,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The message is not one the model allows at all.
    IllegalMessage {
        message: Message,
        rule: UniverseRule,
    },
    /// A message mentions an atom that is not true.
    FactNotTrue {
        message: Message,
    },
    /// Forwarding: no explanation chain reaches the sender.
    Unexplained {
        message: Message,
    },
    UnknownAtom {
        atom: AtomId,
    },
}

impl Violation {
    pub fn render(&self, model: &InteractionModel) -> String {
        let msg = |m: &Message| {
            if m.sender.index() < model.player_count()
                && m.atom.index() < model.atom_count()
                && m.arc
                    .members()
                    .iter()
                    .all(|p| p.index() < model.player_count())
            {
                model.render_message(m)
            } else {
                format!("{m:?}")
            }
        };
        match self {
            Violation::IllegalMessage { message, rule } => {
                let why = match rule {
                    UniverseRule::SenderNotInArc => "sender is not a member of the hyperarc",
                    UniverseRule::SenderNotOwner => {
                        "ownership: telling allows only the owner to send an atom"
                    }
                    UniverseRule::ArcNotInHypergraph => "hyperarc is not in the hypergraph",
                    UniverseRule::UnknownSymbol => "message refers to an undeclared symbol",
                };
                format!("illegal message ({}): {why}", msg(message))
            }
            Violation::FactNotTrue { message } => format!(
                "message ({}) carries a fact that is not in the valuation",
                msg(message)
            ),
            Violation::Unexplained { message } => {
                format!("message ({}) has no explanation", msg(message))
            }
            Violation::UnknownAtom { atom } => format!("unknown atom #{}", atom.0),
        }
    }
}

impl fmt::Display for UniverseRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn universe_rule(model: &InteractionModel, m: &Message) -> UniverseRule {
    let n = model.player_count();
    if m.sender.index() >= n
        || m.atom.index() >= model.atom_count()
        || m.arc.members().iter().any(|p| p.index() >= n)
    {
        UniverseRule::UnknownSymbol
    } else if !m.arc.contains(m.sender) {
        UniverseRule::SenderNotInArc
    } else if model.mode() == Mode::Telling && !model.owns(m.sender, m.atom) {
        UniverseRule::SenderNotOwner
    } else {
        UniverseRule::ArcNotInHypergraph
    }
}

/// Returns every reason `(V, M)` is not a state of `model`; empty means valid.
pub fn validate_state(model: &InteractionModel, state: &EpistemicState) -> Vec<Violation> {
    let mut out = Vec::new();
    for &a in &state.valuation {
        if a.index() >= model.atom_count() {
            out.push(Violation::UnknownAtom { atom: a });
        }
    }
    for m in &state.messages {
        if model.message_index(m).is_none() {
            out.push(Violation::IllegalMessage {
                message: m.clone(),
                rule: universe_rule(model, m),
            });
        }
    }
    for m in &state.messages {
        if !state.valuation.contains(&m.atom) {
            out.push(Violation::FactNotTrue { message: m.clone() });
        }
    }
    if model.mode() == Mode::Forwarding {
        for m in &state.messages {
            if m.atom.index() >= model.atom_count() || !state.valuation.contains(&m.atom) {
                continue;
            }
            let known = known_set_unchecked(model, state, m.atom);
            if !known.contains(&m.sender) {
                out.push(Violation::Unexplained { message: m.clone() });
            }
        }
    }
    out
}

pub fn is_valid_state(model: &InteractionModel, state: &EpistemicState) -> bool {
    validate_state(model, state).is_empty()
}
