//! Individual law checks, evaluated over all states of a model at once.
//!
//! Each [`Check`] yields the set of states at which it is violated. Batch
//! checking and witness replay both go through [`violations`] (or
//! [`mono_violated`] for the two-state monotonicity check), so a replayed
//! witness is re-decided by the same code that found it.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::LawError;
use crate::explain::completion;
use crate::formula::{expand_word, parse, render, Formula, Group};
use crate::model::{AtomId, InteractionModel, Knowledge, Mode, PlayerId};
use crate::modelfile::parse_message;
use crate::semantics::{BoundedSession, Session, Verdict3};
use crate::state::{indist, restrict, EpistemicState};

/// The complete-hypergraph counterpart of a model, exact or bounded.
pub(crate) enum Twin {
    Exact(Session),
    Bounded(BoundedSession),
}

/// Evaluation context for one model.
pub(crate) struct Ctx {
    pub(crate) session: Session,
    pub(crate) twin: Option<Twin>,
    pub(crate) other_mode: Option<Session>,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Check {
    /// `φ` at `lo` and not at `hi ⊇ lo`.
    Mono { f: Formula },
    /// Definite verdicts under `⊨_H` and `⊨` differ.
    SameUnderTwin { f: Formula },
    /// `C_G(φ1 ∨ φ2)` differs from `C_G φ1 ∨ C_G φ2`.
    Distributes {
        group: Group,
        left: Formula,
        right: Formula,
    },
    /// `K_w p`, a `p`-message in `M_w`, and `C_⟨w⟩ p` do not all agree.
    ChainEquiv { word: Vec<PlayerId>, atom: AtomId },
    /// `K_w φ` with `⟨w⟩ = G` but not `C_G φ`.
    PermBackward { word: Vec<PlayerId>, f: Formula },
    /// `C_G φ` but not `K_w φ` for `w` the members of `G` in order.
    PermForward { group: Group, f: Formula },
    /// `C_G φ` without a message to a superset of `G` about a fact of `φ`.
    BroadcastNeeded { group: Group, f: Formula },
    /// `φ` holds although none of its facts is true.
    FactsNonEmpty { f: Formula },
    /// `C_G p` differs from "some `p`-message reached a superset of `G`".
    CkFactIff { group: Group, atom: AtomId },
    /// `K_i p` differs from `p ∈ V_i ∪ Facts(M_i)`.
    KiFactIff { player: PlayerId, atom: AtomId },
    /// The canonical completion of `i`'s view is not `∼_i` the state.
    CompletionIndist { player: PlayerId },
    /// `C_G(p1 ∨ ... ∨ pk)` differs from `C_G p1 ∨ ... ∨ C_G pk`.
    CkFactDisj { group: Group, atoms: Vec<AtomId> },
    /// Telling and forwarding semantics disagree.
    ModeDiffers { f: Formula },
}

fn xor(a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
    let mut out = a.clone();
    out.symmetric_difference_with(b);
    out
}

fn minus(a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
    let mut out = a.clone();
    out.difference_with(b);
    out
}

fn from_predicate(n: usize, mut pred: impl FnMut(usize) -> bool) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(n);
    for s in 0..n {
        if pred(s) {
            out.insert(s);
        }
    }
    out
}

/// States of `ctx.session` at which `check` is violated. Not defined for
/// [`Check::Mono`].
pub(crate) fn violations(ctx: &mut Ctx, check: &Check) -> Result<FixedBitSet, LawError> {
    let n = ctx.session.space().len();
    let s = &mut ctx.session;
    Ok(match check {
        Check::Mono { .. } => unreachable!("monotonicity is checked on pairs"),
        Check::SameUnderTwin { f } => {
            let here = s.truth(f)?;
            let twin = ctx.twin.as_mut().ok_or(LawError::MissingContext("twin"))?;
            let space = s.space();
            let mut out = FixedBitSet::with_capacity(n);
            match twin {
                Twin::Exact(t) => {
                    let there = t.truth(f)?;
                    for i in 0..n {
                        let j = t.index_of(space.state(i))?;
                        if here.contains(i) != there.contains(j) {
                            out.insert(i);
                        }
                    }
                }
                Twin::Bounded(t) => {
                    for i in 0..n {
                        let Some(j) = t.space().index_of(space.state(i)) else {
                            continue;
                        };
                        let v = t.verdict_at(j, f)?;
                        if v != Verdict3::Unknown && v != Verdict3::from(here.contains(i)) {
                            out.insert(i);
                        }
                    }
                }
            }
            out
        }
        Check::Distributes { group, left, right } => {
            let whole = s.truth(&Formula::Ck(
                group.clone(),
                Box::new(Formula::or(left.clone(), right.clone())),
            ))?;
            let mut parts =
                (*s.truth(&Formula::Ck(group.clone(), Box::new(left.clone())))?).clone();
            parts.union_with(&*s.truth(&Formula::Ck(group.clone(), Box::new(right.clone())))?);
            xor(&whole, &parts)
        }
        Check::ChainEquiv { word, atom } => {
            let knows = s.truth(&expand_word(word, Formula::Atom(*atom))?)?;
            let mut group = word.clone();
            group.sort();
            group.dedup();
            let ck = s.truth(&Formula::Ck(group.clone(), Box::new(Formula::Atom(*atom))))?;
            let space = s.space();
            from_predicate(n, |i| {
                let msg = space
                    .state(i)
                    .messages
                    .iter()
                    .any(|m| m.atom == *atom && m.arc.covers(&group));
                knows.contains(i) != msg || ck.contains(i) != msg
            })
        }
        Check::PermBackward { word, f } => {
            let mut group = word.clone();
            group.sort();
            group.dedup();
            let kw = s.truth(&expand_word(word, f.clone())?)?;
            let ck = s.truth(&Formula::Ck(group, Box::new(f.clone())))?;
            minus(&kw, &ck)
        }
        Check::PermForward { group, f } => {
            let ck = s.truth(&Formula::Ck(group.clone(), Box::new(f.clone())))?;
            let kw = s.truth(&expand_word(group, f.clone())?)?;
            minus(&ck, &kw)
        }
        Check::BroadcastNeeded { group, f } => {
            let ck = s.truth(&Formula::Ck(group.clone(), Box::new(f.clone())))?;
            let facts = f.facts();
            let space = s.space();
            from_predicate(n, |i| {
                ck.contains(i)
                    && !space
                        .state(i)
                        .messages
                        .iter()
                        .any(|m| m.arc.covers(group) && facts.contains(&m.atom))
            })
        }
        Check::FactsNonEmpty { f } => {
            let t = s.truth(f)?;
            let facts = f.facts();
            let space = s.space();
            from_predicate(n, |i| {
                t.contains(i) && space.state(i).valuation.is_disjoint(&facts)
            })
        }
        Check::CkFactIff { group, atom } => {
            let ck = s.truth(&Formula::Ck(group.clone(), Box::new(Formula::Atom(*atom))))?;
            let space = s.space();
            from_predicate(n, |i| {
                let msg = space
                    .state(i)
                    .messages
                    .iter()
                    .any(|m| m.atom == *atom && m.arc.covers(group));
                ck.contains(i) != msg
            })
        }
        Check::KiFactIff { player, atom } => {
            let k = s.truth(&Formula::knows(*player, Formula::Atom(*atom)))?;
            let space = s.space();
            let model = space.model();
            from_predicate(n, |i| {
                let view = restrict(model, space.state(i), *player);
                let expected = view.valuation.contains(atom) || view.facts().contains(atom);
                k.contains(i) != expected
            })
        }
        Check::CompletionIndist { player } => {
            let space = s.space();
            let model = space.model();
            let mut out = FixedBitSet::with_capacity(n);
            for i in 0..n {
                let st = space.state(i);
                let c = completion(model, &restrict(model, st, *player), st)?;
                if !indist(model, st, &c, *player)
                    || !c.is_subset(st)
                    || space.index_of(&c).is_none()
                {
                    out.insert(i);
                }
            }
            out
        }
        Check::CkFactDisj { group, atoms } => {
            let disj = Formula::disjunction(atoms.iter().map(|&a| Formula::Atom(a)))
                .ok_or(LawError::MissingContext("atoms"))?;
            let whole = s.truth(&Formula::Ck(group.clone(), Box::new(disj)))?;
            let mut parts = FixedBitSet::with_capacity(n);
            for &a in atoms {
                parts.union_with(
                    &*s.truth(&Formula::Ck(group.clone(), Box::new(Formula::Atom(a))))?,
                );
            }
            xor(&whole, &parts)
        }
        Check::ModeDiffers { f } => {
            let here = s.truth(f)?;
            let other = ctx
                .other_mode
                .as_mut()
                .ok_or(LawError::MissingContext("other mode"))?;
            let there = other.truth(f)?;
            let space = s.space();
            let mut out = FixedBitSet::with_capacity(n);
            for i in 0..n {
                if let Some(j) = other.space().index_of(space.state(i)) {
                    if here.contains(i) != there.contains(j) {
                        out.insert(i);
                    }
                }
            }
            out
        }
    })
}

/// `f` at `lo` but not at `hi`.
pub(crate) fn mono_violated(
    ctx: &mut Ctx,
    f: &Formula,
    lo: usize,
    hi: usize,
) -> Result<bool, LawError> {
    Ok(ctx.session.holds_at(lo, f)? && !ctx.session.holds_at(hi, f)?)
}

/// A state as names: `valuation` atoms and messages in model-file syntax.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateRecord {
    pub valuation: Vec<String>,
    pub messages: Vec<String>,
}

impl StateRecord {
    pub fn from_state(model: &InteractionModel, s: &EpistemicState) -> Self {
        StateRecord {
            valuation: s
                .valuation
                .iter()
                .map(|&a| model.atom_name(a).to_string())
                .collect(),
            messages: s.messages.iter().map(|m| model.render_message(m)).collect(),
        }
    }

    pub fn to_state(&self, model: &InteractionModel) -> Result<EpistemicState, LawError> {
        let mut s = EpistemicState::empty();
        for a in &self.valuation {
            s.valuation.insert(
                model
                    .atom_by_name(a)
                    .ok_or_else(|| LawError::Replay(format!("unknown atom `{a}`")))?,
            );
        }
        for m in &self.messages {
            s.messages
                .insert(parse_message(model, m).map_err(|e| LawError::Replay(e.to_string()))?);
        }
        Ok(s)
    }
}

/// A violated check in names, replayable against the witness model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub kind: String,
    pub states: Vec<StateRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub formulas: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub players: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<String>,
}

fn names(model: &InteractionModel, players: &[PlayerId]) -> Vec<String> {
    players
        .iter()
        .map(|&p| model.player_name(p).to_string())
        .collect()
}

impl ProbeRecord {
    pub(crate) fn new(model: &InteractionModel, check: &Check, states: &[&EpistemicState]) -> Self {
        let fm = |f: &Formula| render(f, model);
        let an = |a: &AtomId| model.atom_name(*a).to_string();
        let (kind, formulas, players, atoms) = match check {
            Check::Mono { f } => ("mono", vec![fm(f)], vec![], vec![]),
            Check::SameUnderTwin { f } => ("same_under_twin", vec![fm(f)], vec![], vec![]),
            Check::Distributes { group, left, right } => (
                "distributes",
                vec![fm(left), fm(right)],
                names(model, group),
                vec![],
            ),
            Check::ChainEquiv { word, atom } => {
                ("chain_equiv", vec![], names(model, word), vec![an(atom)])
            }
            Check::PermBackward { word, f } => {
                ("perm_backward", vec![fm(f)], names(model, word), vec![])
            }
            Check::PermForward { group, f } => {
                ("perm_forward", vec![fm(f)], names(model, group), vec![])
            }
            Check::BroadcastNeeded { group, f } => {
                ("broadcast_needed", vec![fm(f)], names(model, group), vec![])
            }
            Check::FactsNonEmpty { f } => ("facts_nonempty", vec![fm(f)], vec![], vec![]),
            Check::CkFactIff { group, atom } => {
                ("ck_fact_iff", vec![], names(model, group), vec![an(atom)])
            }
            Check::KiFactIff { player, atom } => (
                "ki_fact_iff",
                vec![],
                names(model, &[*player]),
                vec![an(atom)],
            ),
            Check::CompletionIndist { player } => (
                "completion_indist",
                vec![],
                names(model, &[*player]),
                vec![],
            ),
            Check::CkFactDisj { group, atoms } => (
                "ck_fact_disj",
                vec![],
                names(model, group),
                atoms.iter().map(an).collect(),
            ),
            Check::ModeDiffers { f } => ("mode_differs", vec![fm(f)], vec![], vec![]),
        };
        ProbeRecord {
            kind: kind.to_string(),
            states: states
                .iter()
                .map(|s| StateRecord::from_state(model, s))
                .collect(),
            formulas,
            players,
            atoms,
        }
    }

    pub(crate) fn to_check(
        &self,
        model: &InteractionModel,
    ) -> Result<(Check, Vec<EpistemicState>), LawError> {
        let bad =
            |what: &str| LawError::Replay(format!("malformed {what} in `{}` probe", self.kind));
        let formulas = self
            .formulas
            .iter()
            .map(|t| parse(t, model))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| LawError::Replay(e.to_string()))?;
        let players = self
            .players
            .iter()
            .map(|p| {
                model
                    .player_by_name(p)
                    .ok_or_else(|| LawError::Replay(format!("unknown player `{p}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                model
                    .atom_by_name(a)
                    .ok_or_else(|| LawError::Replay(format!("unknown atom `{a}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut group = players.clone();
        group.sort();
        group.dedup();
        let f0 = || formulas.first().cloned().ok_or_else(|| bad("formula"));
        let a0 = || atoms.first().copied().ok_or_else(|| bad("atom"));
        let p0 = || players.first().copied().ok_or_else(|| bad("player"));
        let check = match self.kind.as_str() {
            "mono" => Check::Mono { f: f0()? },
            "same_under_twin" => Check::SameUnderTwin { f: f0()? },
            "distributes" => Check::Distributes {
                group,
                left: f0()?,
                right: formulas.get(1).cloned().ok_or_else(|| bad("formula"))?,
            },
            "chain_equiv" => Check::ChainEquiv {
                word: players.clone(),
                atom: a0()?,
            },
            "perm_backward" => Check::PermBackward {
                word: players.clone(),
                f: f0()?,
            },
            "perm_forward" => Check::PermForward { group, f: f0()? },
            "broadcast_needed" => Check::BroadcastNeeded { group, f: f0()? },
            "facts_nonempty" => Check::FactsNonEmpty { f: f0()? },
            "ck_fact_iff" => Check::CkFactIff { group, atom: a0()? },
            "ki_fact_iff" => Check::KiFactIff {
                player: p0()?,
                atom: a0()?,
            },
            "completion_indist" => Check::CompletionIndist { player: p0()? },
            "ck_fact_disj" => Check::CkFactDisj {
                group,
                atoms: atoms.clone(),
            },
            "mode_differs" => Check::ModeDiffers { f: f0()? },
            other => return Err(LawError::Replay(format!("unknown probe kind `{other}`"))),
        };
        let states = self
            .states
            .iter()
            .map(|s| s.to_state(model))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((check, states))
    }
}

/// Which auxiliary sessions a check needs.
pub(crate) fn needs(check: &Check) -> (bool, bool) {
    (
        matches!(check, Check::SameUnderTwin { .. }),
        matches!(check, Check::ModeDiffers { .. }),
    )
}

pub(crate) fn build_ctx(
    model: &InteractionModel,
    cap: usize,
    twin: Option<Option<usize>>,
    other_mode: bool,
) -> Result<Ctx, LawError> {
    let session = Session::new(model, cap)?;
    let twin = match twin {
        None => None,
        Some(bound) => {
            let complete = model.with_knowledge(Knowledge::Unknown);
            Some(match bound {
                None => Twin::Exact(Session::new(&complete, cap)?),
                Some(b) => Twin::Bounded(BoundedSession::new(&complete, b, cap)?),
            })
        }
    };
    let other_mode = if other_mode {
        let flipped = match model.mode() {
            Mode::Telling => Mode::Forwarding,
            Mode::Forwarding => Mode::Telling,
        };
        Some(Session::new(&model.with_mode(flipped), cap)?)
    } else {
        None
    };
    Ok(Ctx {
        session,
        twin,
        other_mode,
    })
}
