use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use petgraph::unionfind::UnionFind;

use super::SemanticsError;
use crate::model::{AtomId, InteractionModel, Message, Mode, PlayerId};
use crate::state::EpistemicState;

/// Compact state: atom mask plus a bitset over the message universe.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Compact {
    pub(crate) atoms: u64,
    pub(crate) messages: FixedBitSet,
}

/// Every valid state of a model (optionally only those with at most `bound`
/// messages), in canonical order, with per-player indistinguishability
/// buckets.
#[derive(Clone, Debug)]
pub struct StateSpace {
    model: InteractionModel,
    states: Vec<EpistemicState>,
    compact: Vec<Compact>,
    index: HashMap<Compact, usize>,
    /// `bucket_of[i][s]`: the `∼_i` class id of state `s`.
    bucket_of: Vec<Vec<u32>>,
    /// `buckets[i][b]`: states in class `b` of player `i`.
    buckets: Vec<Vec<Vec<u32>>>,
    bound: Option<usize>,
}

fn binomial_prefix_sum(n: usize, k: usize) -> f64 {
    let mut total = 0.0;
    let mut c = 1.0;
    for j in 0..=k.min(n) {
        total += c;
        c = c * (n - j) as f64 / (j + 1) as f64;
    }
    total
}

impl StateSpace {
    /// Enumerates all valid states; `cap` bounds both the candidate message
    /// subsets examined and the number of states produced.
    pub fn enumerate(model: &InteractionModel, cap: usize) -> Result<StateSpace, SemanticsError> {
        Self::build(model, None, cap)
    }

    /// Enumerates the valid states with at most `bound` messages.
    pub fn enumerate_bounded(
        model: &InteractionModel,
        bound: usize,
        cap: usize,
    ) -> Result<StateSpace, SemanticsError> {
        Self::build(model, Some(bound), cap)
    }

    fn build(
        model: &InteractionModel,
        bound: Option<usize>,
        cap: usize,
    ) -> Result<StateSpace, SemanticsError> {
        let universe = model.message_universe();
        let u = universe.len();
        let by_atom: Vec<Vec<usize>> = model
            .atoms()
            .map(|a| (0..u).filter(|&m| universe[m].atom == a).collect())
            .collect();

        let candidates: f64 = by_atom
            .iter()
            .map(|idx| binomial_prefix_sum(idx.len(), bound.unwrap_or(idx.len())))
            .sum();
        let estimate: f64 = by_atom
            .iter()
            .map(|idx| 1.0 + binomial_prefix_sum(idx.len(), bound.unwrap_or(idx.len())))
            .product();
        if candidates > cap as f64 {
            return Err(SemanticsError::CapExceeded {
                universe: u,
                estimated: estimate,
                cap,
            });
        }

        // Per atom: the legal message subsets when the atom is true.
        let mut options: Vec<Vec<Vec<usize>>> = Vec::with_capacity(by_atom.len());
        for (a, idx) in by_atom.iter().enumerate() {
            let owner = model.owner(AtomId(a as u32));
            let limit = bound.unwrap_or(idx.len()).min(idx.len());
            let mut legal = Vec::new();
            for k in 0..=limit {
                for combo in idx.iter().copied().combinations(k) {
                    if model.mode() == Mode::Telling || explainable(universe, owner, &combo) {
                        legal.push(combo);
                    }
                }
            }
            options.push(legal);
        }
        let exact: f64 = options.iter().map(|o| 1.0 + o.len() as f64).product();
        if exact > cap as f64 {
            return Err(SemanticsError::CapExceeded {
                universe: u,
                estimated: exact,
                cap,
            });
        }

        let mut compact = Vec::new();
        let mut chosen: Vec<Option<&Vec<usize>>> = vec![None; options.len()];
        product(
            &options,
            0,
            bound.unwrap_or(usize::MAX),
            &mut chosen,
            &mut |chosen| {
                let mut atoms = 0u64;
                let mut messages = FixedBitSet::with_capacity(u);
                for (a, c) in chosen.iter().enumerate() {
                    if let Some(subset) = c {
                        atoms |= 1 << a;
                        for &m in subset.iter() {
                            messages.insert(m);
                        }
                    }
                }
                compact.push(Compact { atoms, messages });
            },
        );

        let mut states: Vec<(EpistemicState, Compact)> = compact
            .into_iter()
            .map(|c| (decode(model, &c), c))
            .collect();
        states.sort_by(|a, b| a.0.cmp(&b.0));
        let (states, compact): (Vec<_>, Vec<_>) = states.into_iter().unzip();
        Ok(Self::from_states(model, states, compact, bound))
    }

    fn from_states(
        model: &InteractionModel,
        states: Vec<EpistemicState>,
        compact: Vec<Compact>,
        bound: Option<usize>,
    ) -> StateSpace {
        let universe = model.message_universe();
        let index = compact
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        let mut bucket_of = Vec::with_capacity(model.player_count());
        let mut buckets = Vec::with_capacity(model.player_count());
        for player in model.players() {
            let atom_mask: u64 = model
                .atoms_of(player)
                .fold(0, |acc, a| acc | (1 << a.index()));
            let mut recv = FixedBitSet::with_capacity(universe.len());
            for (m, msg) in universe.iter().enumerate() {
                if msg.arc.contains(player) {
                    recv.insert(m);
                }
            }
            let mut ids: HashMap<(u64, FixedBitSet), u32> = HashMap::new();
            let mut of = Vec::with_capacity(compact.len());
            let mut members: Vec<Vec<u32>> = Vec::new();
            for (s, c) in compact.iter().enumerate() {
                let mut seen = c.messages.clone();
                seen.intersect_with(&recv);
                let key = (c.atoms & atom_mask, seen);
                let next = ids.len() as u32;
                let id = *ids.entry(key).or_insert(next);
                if id == next {
                    members.push(Vec::new());
                }
                members[id as usize].push(s as u32);
                of.push(id);
            }
            bucket_of.push(of);
            buckets.push(members);
        }
        StateSpace {
            model: model.clone(),
            states,
            compact,
            index,
            bucket_of,
            buckets,
            bound,
        }
    }

    pub fn model(&self) -> &InteractionModel {
        &self.model
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[EpistemicState] {
        &self.states
    }

    pub fn state(&self, idx: usize) -> &EpistemicState {
        &self.states[idx]
    }

    /// The message bound this space was truncated to, if any.
    pub fn bound(&self) -> Option<usize> {
        self.bound
    }

    /// `true` when no valid state was left out by the bound.
    pub fn is_complete(&self) -> bool {
        self.bound
            .is_none_or(|b| b >= self.model.message_universe().len())
    }

    pub fn index_of(&self, state: &EpistemicState) -> Option<usize> {
        let c = encode(&self.model, state)?;
        self.index.get(&c).copied()
    }

    pub(crate) fn compact(&self, idx: usize) -> &Compact {
        &self.compact[idx]
    }

    /// The `∼_i` class id of state `idx`.
    pub fn bucket(&self, player: PlayerId, idx: usize) -> u32 {
        self.bucket_of[player.index()][idx]
    }

    /// States `∼_i`-indistinguishable from `idx`, including itself.
    pub fn bucket_members(&self, player: PlayerId, idx: usize) -> &[u32] {
        let b = self.bucket_of[player.index()][idx];
        &self.buckets[player.index()][b as usize]
    }

    /// Component label of every state under the closure of `∼_i`, `i ∈ group`.
    /// Two states share a label iff they are `∼_G`-related.
    pub fn components(&self, group: &[PlayerId]) -> Vec<u32> {
        let n = self.states.len();
        let mut uf = UnionFind::<u32>::new(n);
        for &player in group {
            for members in &self.buckets[player.index()] {
                for w in members.windows(2) {
                    uf.union(w[0], w[1]);
                }
            }
        }
        (0..n as u32).map(|s| uf.find(s)).collect()
    }

    /// The `∼_G` class of state `idx`, ascending.
    pub fn reachable(&self, idx: usize, group: &[PlayerId]) -> Result<Vec<usize>, SemanticsError> {
        if idx >= self.states.len() {
            return Err(SemanticsError::StateNotInSpace);
        }
        check_group(&self.model, group)?;
        let labels = self.components(group);
        let me = labels[idx];
        Ok((0..labels.len()).filter(|&s| labels[s] == me).collect())
    }

    /// Shortest `∼_G` path from `from` to a state satisfying `target`, as
    /// `(player, state)` steps. Empty when `from` itself satisfies it.
    pub fn path_to(
        &self,
        from: usize,
        group: &[PlayerId],
        target: impl Fn(usize) -> bool,
    ) -> Option<Vec<(PlayerId, usize)>> {
        let mut prev: HashMap<usize, (PlayerId, usize)> = HashMap::new();
        let mut queue = std::collections::VecDeque::from([from]);
        let mut seen = FixedBitSet::with_capacity(self.len());
        seen.insert(from);
        while let Some(cur) = queue.pop_front() {
            if target(cur) {
                let mut path = Vec::new();
                let mut at = cur;
                while at != from {
                    let (player, before) = prev[&at];
                    path.push((player, at));
                    at = before;
                }
                path.reverse();
                return Some(path);
            }
            for &player in group {
                for &next in self.bucket_members(player, cur) {
                    let next = next as usize;
                    if !seen.contains(next) {
                        seen.insert(next);
                        prev.insert(next, (player, cur));
                        queue.push_back(next);
                    }
                }
            }
        }
        None
    }
}

pub(crate) fn check_group(
    model: &InteractionModel,
    group: &[PlayerId],
) -> Result<(), SemanticsError> {
    if group.is_empty() {
        return Err(SemanticsError::EmptyGroup);
    }
    if group.iter().any(|p| p.index() >= model.player_count()) {
        return Err(SemanticsError::FormulaOutOfModel);
    }
    Ok(())
}

fn explainable(universe: &[Message], owner: PlayerId, subset: &[usize]) -> bool {
    let mut known: u64 = 1 << owner.index();
    loop {
        let before = known;
        for &m in subset {
            let msg = &universe[m];
            if known & (1 << msg.sender.index()) != 0 {
                for p in msg.arc.members() {
                    known |= 1 << p.index();
                }
            }
        }
        if known == before {
            break;
        }
    }
    subset
        .iter()
        .all(|&m| known & (1 << universe[m].sender.index()) != 0)
}

fn product<'a>(
    options: &'a [Vec<Vec<usize>>],
    at: usize,
    budget: usize,
    chosen: &mut Vec<Option<&'a Vec<usize>>>,
    emit: &mut impl FnMut(&[Option<&'a Vec<usize>>]),
) {
    if at == options.len() {
        emit(chosen);
        return;
    }
    chosen[at] = None;
    product(options, at + 1, budget, chosen, emit);
    for subset in &options[at] {
        if subset.len() <= budget {
            chosen[at] = Some(subset);
            product(options, at + 1, budget - subset.len(), chosen, emit);
        }
    }
    chosen[at] = None;
}

fn decode(model: &InteractionModel, c: &Compact) -> EpistemicState {
    let universe = model.message_universe();
    EpistemicState {
        valuation: model
            .atoms()
            .filter(|a| c.atoms & (1 << a.index()) != 0)
            .collect(),
        messages: c.messages.ones().map(|m| universe[m].clone()).collect(),
    }
}

/// `None` when the state mentions something outside the model's universe.
pub(crate) fn encode(model: &InteractionModel, s: &EpistemicState) -> Option<Compact> {
    let mut atoms = 0u64;
    for a in &s.valuation {
        if a.index() >= model.atom_count() {
            return None;
        }
        atoms |= 1 << a.index();
    }
    let mut messages = FixedBitSet::with_capacity(model.message_universe().len());
    for m in &s.messages {
        messages.insert(model.message_index(m)?);
    }
    Some(Compact { atoms, messages })
}
