//! Explanations of forwarded messages and the completion of partial states.
//!
//! Explainability is decided by a least fixed point: the owner of a true atom
//! knows it, and whoever knows it and broadcasts it to an arc teaches every
//! member of that arc. A message is explainable iff its sender is in that set.
//! Any derivation reaching a player can be shortened to one whose senders are
//! pairwise distinct, so this coincides with the existence of an acyclic
//! explanation chain.

use std::collections::{BTreeSet, HashMap, VecDeque};

use itertools::Itertools;
use thiserror::Error;

use crate::model::{AtomId, InteractionModel, Message, Mode, PlayerId};
use crate::state::{is_valid_state, EpistemicState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExplainError {
    #[error("unknown atom #{0}")]
    UnknownAtom(u32),
    #[error("partial pair is not contained in the enclosing state")]
    NotASubpair,
    #[error("enclosing state is not valid for the model")]
    WithinInvalid,
    #[error("message is not in the state")]
    MessageNotInState,
}

/// Players who can know `atom` in `state` by the least fixed point.
pub fn known_set(
    model: &InteractionModel,
    state: &EpistemicState,
    atom: AtomId,
) -> Result<BTreeSet<PlayerId>, ExplainError> {
    if atom.index() >= model.atom_count() {
        return Err(ExplainError::UnknownAtom(atom.0));
    }
    Ok(known_set_unchecked(model, state, atom))
}

pub(crate) fn known_set_unchecked(
    model: &InteractionModel,
    state: &EpistemicState,
    atom: AtomId,
) -> BTreeSet<PlayerId> {
    let relevant: Vec<&Message> = state.messages.iter().filter(|m| m.atom == atom).collect();
    known_from(
        model.owner(atom),
        state.valuation.contains(&atom),
        &relevant,
    )
}

fn known_from(owner: PlayerId, atom_true: bool, messages: &[&Message]) -> BTreeSet<PlayerId> {
    let mut known = BTreeSet::new();
    if !atom_true {
        return known;
    }
    known.insert(owner);
    loop {
        let before = known.len();
        for m in messages {
            if known.contains(&m.sender) {
                known.extend(m.arc.members().iter().copied());
            }
        }
        if known.len() == before {
            return known;
        }
    }
}

/// `m1 ⇝ m2`: same atom, the second sender does not own it, and heard the first.
pub fn leads_to(model: &InteractionModel, m1: &Message, m2: &Message) -> bool {
    m1.atom == m2.atom && !model.owns(m2.sender, m2.atom) && m1.arc.contains(m2.sender)
}

/// Messages of `messages` reachable from `start` under the reflexive-transitive
/// closure of [`leads_to`].
pub fn closure(
    model: &InteractionModel,
    messages: &BTreeSet<Message>,
    start: &Message,
) -> BTreeSet<Message> {
    let mut out = BTreeSet::new();
    if messages.contains(start) {
        out.insert(start.clone());
    }
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(cur) = queue.pop_front() {
        for m in messages {
            if !out.contains(m) && leads_to(model, &cur, m) {
                out.insert(m.clone());
                queue.push_back(m.clone());
            }
        }
    }
    out
}

/// Checks the chain conditions: consecutive links, distinct senders, an owner
/// with a true atom at the head, and `target` at the tail.
pub fn is_explanation(
    model: &InteractionModel,
    state: &EpistemicState,
    chain: &[Message],
    target: &Message,
) -> bool {
    let (Some(first), Some(last)) = (chain.first(), chain.last()) else {
        return false;
    };
    last == target
        && chain
            .iter()
            .all(|m| state.messages.contains(m) && m.atom == target.atom)
        && chain.iter().map(|m| m.sender).all_unique()
        && model.owns(first.sender, first.atom)
        && state.valuation.contains(&first.atom)
        && chain.windows(2).all(|w| leads_to(model, &w[0], &w[1]))
}

/// Shortest explanation chain for `target` in `state`, ties broken by the
/// global message order. `None` when no chain exists.
pub fn explanation(
    model: &InteractionModel,
    state: &EpistemicState,
    target: &Message,
) -> Result<Option<Vec<Message>>, ExplainError> {
    if !state.messages.contains(target) {
        return Err(ExplainError::MessageNotInState);
    }
    if !state.valuation.contains(&target.atom) {
        return Ok(None);
    }
    let candidates: Vec<&Message> = state
        .messages
        .iter()
        .filter(|m| m.atom == target.atom)
        .collect();
    // Breadth-first from the owner's messages, visiting candidates in message
    // order. A shortest path never repeats a sender.
    let mut parent: HashMap<&Message, Option<&Message>> = HashMap::new();
    let mut queue = VecDeque::new();
    for &m in &candidates {
        if model.owns(m.sender, m.atom) {
            parent.insert(m, None);
            queue.push_back(m);
        }
    }
    while let Some(cur) = queue.pop_front() {
        if cur == target {
            let mut chain = vec![cur.clone()];
            let mut at = cur;
            while let Some(Some(prev)) = parent.get(at) {
                chain.push((*prev).clone());
                at = prev;
            }
            chain.reverse();
            return Ok(Some(chain));
        }
        for &m in &candidates {
            if !parent.contains_key(m) && leads_to(model, cur, m) {
                parent.insert(m, Some(cur));
                queue.push_back(m);
            }
        }
    }
    Ok(None)
}

/// The canonical completion `L(V, M)` of `partial` inside `within`.
///
/// Adds the fewest messages of `within` needed to make every message of
/// `partial` explainable, together with the facts they carry. Atoms are
/// independent, so the search runs per atom; within an atom, among the
/// smallest additions the lexicographically least (in message order) wins.
pub fn completion(
    model: &InteractionModel,
    partial: &EpistemicState,
    within: &EpistemicState,
) -> Result<EpistemicState, ExplainError> {
    if !partial.is_subset(within) {
        return Err(ExplainError::NotASubpair);
    }
    if !is_valid_state(model, within) {
        return Err(ExplainError::WithinInvalid);
    }
    let mut result = partial.clone();
    result.valuation.extend(partial.facts());
    if model.mode() == Mode::Telling {
        return Ok(result);
    }
    for atom in model.atoms() {
        let have: Vec<&Message> = partial.messages.iter().filter(|m| m.atom == atom).collect();
        if have.is_empty() {
            continue;
        }
        let owner = model.owner(atom);
        let explained = |extra: &[&Message]| {
            let all: Vec<&Message> = have.iter().chain(extra.iter()).copied().collect();
            let known = known_from(owner, true, &all);
            all.iter().all(|m| known.contains(&m.sender))
        };
        let pool: Vec<&Message> = within
            .messages
            .iter()
            .filter(|m| m.atom == atom && !partial.messages.contains(*m))
            .collect();
        let mut chosen = None;
        'size: for k in 0..=pool.len() {
            for combo in pool.iter().copied().combinations(k) {
                if explained(&combo) {
                    chosen = Some(combo);
                    break 'size;
                }
            }
        }
        // `within` is valid, so adding its whole pool always succeeds.
        let chosen = chosen.expect("enclosing state explains its own messages");
        result.messages.extend(chosen.into_iter().cloned());
    }
    Ok(result)
}
