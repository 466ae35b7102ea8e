//! Independent reference implementations used as test oracles.
//!
//! Everything here is deliberately naive: explicit chain search instead of
//! fixed points, full subset enumeration instead of per-atom products, and
//! pairwise indistinguishability instead of signature buckets.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use hyperknow::formula::Formula;
use hyperknow::{
    build_model, AtomId, EpistemicState, InteractionModel, Knowledge, Message, Mode, PlayerId,
};

/// Message universe straight from the definition.
pub fn universe(model: &InteractionModel) -> Vec<Message> {
    let mut out = Vec::new();
    for arc in model.effective_hypergraph() {
        for &sender in arc.members() {
            for atom in model.atoms() {
                if model.mode() == Mode::Forwarding || model.owner(atom) == sender {
                    out.push(Message::new(sender, arc.clone(), atom));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Does `target` have an explanation in `state`: a chain of messages about
/// its atom with pairwise distinct senders, starting at the owner (with the
/// atom true), each sender a non-owner who heard the previous message?
pub fn has_chain(model: &InteractionModel, state: &EpistemicState, target: &Message) -> bool {
    let atom = target.atom;
    let owner = model.owner(atom);
    if !state.valuation.contains(&atom) {
        return false;
    }
    let msgs: Vec<&Message> = state.messages.iter().filter(|m| m.atom == atom).collect();
    fn dfs(
        model: &InteractionModel,
        msgs: &[&Message],
        last: &Message,
        used: &mut Vec<PlayerId>,
        target: &Message,
    ) -> bool {
        if last == target {
            return true;
        }
        for m in msgs {
            if !used.contains(&m.sender)
                && !model.owns(m.sender, m.atom)
                && last.arc.contains(m.sender)
            {
                used.push(m.sender);
                let found = dfs(model, msgs, m, used, target);
                used.pop();
                if found {
                    return true;
                }
            }
        }
        false
    }
    msgs.iter()
        .filter(|m| m.sender == owner)
        .any(|first| dfs(model, &msgs, first, &mut vec![first.sender], target))
}

/// Length of the shortest explanation of `target`, by breadth-first search
/// over chains.
pub fn shortest_chain(
    model: &InteractionModel,
    state: &EpistemicState,
    target: &Message,
) -> Option<usize> {
    (1..=model.player_count()).find(|&len| {
        let msgs: Vec<&Message> = state
            .messages
            .iter()
            .filter(|m| m.atom == target.atom)
            .collect();
        chains_of_length(model, state, &msgs, len)
            .iter()
            .any(|c| c.last() == Some(&target))
    })
}

fn chains_of_length<'a>(
    model: &InteractionModel,
    state: &EpistemicState,
    msgs: &[&'a Message],
    len: usize,
) -> Vec<Vec<&'a Message>> {
    let Some(&first) = msgs.first() else {
        return vec![];
    };
    let atom = first.atom;
    if !state.valuation.contains(&atom) {
        return vec![];
    }
    let mut layer: Vec<Vec<&Message>> = msgs
        .iter()
        .filter(|m| m.sender == model.owner(atom))
        .map(|m| vec![*m])
        .collect();
    for _ in 1..len {
        let mut next = Vec::new();
        for c in &layer {
            let last = c.last().unwrap();
            for m in msgs {
                if !c.iter().any(|x| x.sender == m.sender)
                    && !model.owns(m.sender, atom)
                    && last.arc.contains(m.sender)
                {
                    let mut d = c.clone();
                    d.push(m);
                    next.push(d);
                }
            }
        }
        layer = next;
    }
    layer
}

pub fn valid_by_definition(model: &InteractionModel, state: &EpistemicState) -> bool {
    let uni = universe(model);
    state
        .messages
        .iter()
        .all(|m| uni.contains(m) && state.valuation.contains(&m.atom) && has_chain(model, state, m))
}

/// Every state of the model by exhaustive subset enumeration.
pub fn brute_states(model: &InteractionModel) -> Vec<EpistemicState> {
    let uni = universe(model);
    assert!(uni.len() <= 14, "universe too large for brute force");
    let atoms: Vec<AtomId> = model.atoms().collect();
    let mut out = Vec::new();
    for vmask in 0u32..(1 << atoms.len()) {
        let valuation: BTreeSet<AtomId> = atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| vmask & (1 << i) != 0)
            .map(|(_, &a)| a)
            .collect();
        for mmask in 0u32..(1 << uni.len()) {
            let messages: BTreeSet<Message> = uni
                .iter()
                .enumerate()
                .filter(|(i, _)| mmask & (1 << i) != 0)
                .map(|(_, m)| m.clone())
                .collect();
            let s = EpistemicState {
                valuation: valuation.clone(),
                messages,
            };
            if valid_by_definition(model, &s) {
                out.push(s);
            }
        }
    }
    out.sort();
    out
}

fn view(model: &InteractionModel, s: &EpistemicState, i: PlayerId) -> (Vec<AtomId>, Vec<Message>) {
    (
        s.valuation
            .iter()
            .copied()
            .filter(|&a| model.owner(a) == i)
            .collect(),
        s.messages
            .iter()
            .filter(|m| m.arc.members().contains(&i))
            .cloned()
            .collect(),
    )
}

/// Textbook evaluator over an explicit list of states.
pub struct Naive<'a> {
    pub model: &'a InteractionModel,
    pub states: Vec<EpistemicState>,
    memo: HashMap<(Formula, usize), bool>,
}

impl<'a> Naive<'a> {
    pub fn new(model: &'a InteractionModel) -> Self {
        Naive {
            model,
            states: brute_states(model),
            memo: HashMap::new(),
        }
    }

    pub fn index(&self, s: &EpistemicState) -> usize {
        self.states
            .iter()
            .position(|t| t == s)
            .expect("state in space")
    }

    /// States reachable from `idx` by steps of `∼_i` for `i` in `group`.
    pub fn reach(&self, idx: usize, group: &[PlayerId]) -> Vec<usize> {
        let mut seen = HashSet::from([idx]);
        let mut queue = VecDeque::from([idx]);
        while let Some(x) = queue.pop_front() {
            for (y, t) in self.states.iter().enumerate() {
                if !seen.contains(&y)
                    && group
                        .iter()
                        .any(|&i| view(self.model, &self.states[x], i) == view(self.model, t, i))
                {
                    seen.insert(y);
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    pub fn holds(&mut self, idx: usize, f: &Formula) -> bool {
        if let Some(&v) = self.memo.get(&(f.clone(), idx)) {
            return v;
        }
        let v = match f {
            Formula::Atom(a) => self.states[idx].valuation.contains(a),
            Formula::Not(g) => !self.holds(idx, g),
            Formula::And(l, r) => self.holds(idx, l) && self.holds(idx, r),
            Formula::Or(l, r) => self.holds(idx, l) || self.holds(idx, r),
            Formula::Ck(group, g) => self.reach(idx, group).into_iter().all(|t| self.holds(t, g)),
        };
        self.memo.insert((f.clone(), idx), v);
        v
    }
}

/// Small model from compact parameters: `owners[a]` is the owner index of
/// atom `a`, each arc is a bitmask over players (0 is skipped).
pub fn small_model(
    players: usize,
    owners: &[usize],
    arcs: &[u8],
    mode: Mode,
    knowledge: Knowledge,
) -> InteractionModel {
    const P: [&str; 4] = ["i", "j", "k", "l"];
    const A: [&str; 3] = ["p", "q", "r"];
    let names = &P[..players];
    let atoms: Vec<(&str, &str)> = owners
        .iter()
        .enumerate()
        .map(|(a, &o)| (A[a], P[o % players]))
        .collect();
    let hyper: Vec<Vec<&str>> = arcs
        .iter()
        .map(|&mask| {
            let mask = match mask as usize % (1 << players) {
                0 => 1,
                m => m,
            };
            (0..players)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| P[b])
                .collect()
        })
        .collect();
    build_model(names, &atoms, &hyper, mode, knowledge).unwrap()
}

/// Forwarding models on at most three arcs whose universe has at most eight
/// messages: the forwarding built-ins that fit, and every one-atom model on
/// two or three players built from multi-player arcs.
pub fn chain_test_models() -> Vec<InteractionModel> {
    let mut models: Vec<InteractionModel> = hyperknow::builtin::NAMES
        .iter()
        .map(|n| {
            hyperknow::builtin::load(n)
                .unwrap()
                .model
                .with_mode(Mode::Forwarding)
        })
        .filter(|m| m.effective_hypergraph().len() <= 3)
        .collect();
    for n in 2..=3usize {
        let masks: Vec<u8> = (1..(1u8 << n)).filter(|m| m.count_ones() >= 2).collect();
        for a in 0..masks.len() {
            for b in a..masks.len() {
                for c in b..masks.len() {
                    for arcs in [
                        vec![masks[a]],
                        vec![masks[a], masks[b]],
                        vec![masks[a], masks[b], masks[c]],
                    ] {
                        for owner in 0..n {
                            models.push(small_model(
                                n,
                                &[owner],
                                &arcs,
                                Mode::Forwarding,
                                Knowledge::Common,
                            ));
                        }
                    }
                }
            }
        }
    }
    models.retain(|m| universe(m).len() <= 8);
    let key = |m: &InteractionModel| {
        let owners: Vec<PlayerId> = m.atoms().map(|a| m.owner(a)).collect();
        (m.player_count(), owners, m.hypergraph().to_vec())
    };
    models.sort_by_key(key);
    models.dedup_by_key(|m| key(m));
    models
}

/// Compares `known_set` and `explanation` with chain search for every
/// message set over the universe and both values of each atom. Returns the
/// number of states examined.
pub fn check_known_sets(m: &InteractionModel) -> Result<usize, String> {
    use hyperknow::explain::{explanation, is_explanation, known_set};
    let uni = universe(m);
    let mut checked = 0;
    for p in m.atoms() {
        for vp in [false, true] {
            for mask in 0u32..(1 << uni.len()) {
                let s = EpistemicState {
                    valuation: if vp {
                        BTreeSet::from([p])
                    } else {
                        BTreeSet::new()
                    },
                    messages: uni
                        .iter()
                        .enumerate()
                        .filter(|(i, x)| mask & (1 << i) != 0 && x.atom == p)
                        .map(|(_, x)| x.clone())
                        .collect(),
                };
                let ks = known_set(m, &s, p).map_err(|e| e.to_string())?;
                for x in &s.messages {
                    let chain = has_chain(m, &s, x);
                    if ks.contains(&x.sender) != chain {
                        return Err(format!("known_set disagrees on {x:?} in {s:?}"));
                    }
                    let e = explanation(m, &s, x).map_err(|e| e.to_string())?;
                    if e.is_some() != chain {
                        return Err(format!("explanation disagrees on {x:?} in {s:?}"));
                    }
                    if let Some(e) = e {
                        if !is_explanation(m, &s, &e, x)
                            || Some(e.len()) != shortest_chain(m, &s, x)
                        {
                            return Err(format!("bad explanation {e:?} for {x:?}"));
                        }
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}
