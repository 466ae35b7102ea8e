use std::collections::{BTreeSet, HashMap, VecDeque};

use super::exact::check_formula;
use super::SemanticsError;
use crate::formula::Formula;
use crate::model::{InteractionModel, Mode, PlayerId};
use crate::state::{restrict, EpistemicState};

/// Evaluator for negation-free formulas under telling, without enumerating
/// the state space.
///
/// Positive formulas are preserved upward along `⊆`, and under telling the
/// states `i` cannot tell apart from `s` all contain the least one,
/// `(V_i ∪ Facts(M_i), M_i)`. So `K_i φ` holds iff `φ` holds there, and
/// `C_G φ` iff `φ` holds at every state reachable by repeatedly taking least
/// states for members of `G`.
pub struct PositiveEvaluator<'a> {
    model: &'a InteractionModel,
    memo: HashMap<(EpistemicState, Formula), bool>,
}

impl<'a> PositiveEvaluator<'a> {
    pub fn new(model: &'a InteractionModel) -> Result<Self, SemanticsError> {
        if model.mode() != Mode::Telling {
            return Err(SemanticsError::NotTelling);
        }
        Ok(PositiveEvaluator {
            model,
            memo: HashMap::new(),
        })
    }

    /// The `⊆`-least state `player` cannot distinguish from `s`.
    pub fn least_state(&self, s: &EpistemicState, player: PlayerId) -> EpistemicState {
        let mut view = restrict(self.model, s, player);
        let facts = view.facts();
        view.valuation.extend(facts);
        view
    }

    pub fn holds(&mut self, s: &EpistemicState, f: &Formula) -> Result<bool, SemanticsError> {
        if f.has_negation() {
            return Err(SemanticsError::NotPositive);
        }
        check_formula(self.model, f)?;
        Ok(self.eval(s, f))
    }

    fn eval(&mut self, s: &EpistemicState, f: &Formula) -> bool {
        match f {
            Formula::Atom(a) => return s.valuation.contains(a),
            Formula::And(l, r) => return self.eval(s, l) && self.eval(s, r),
            Formula::Or(l, r) => return self.eval(s, l) || self.eval(s, r),
            Formula::Not(_) => unreachable!("checked positive"),
            Formula::Ck(..) => {}
        }
        let key = (s.clone(), f.clone());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let Formula::Ck(group, inner) = f else {
            unreachable!()
        };
        let mut seen: BTreeSet<EpistemicState> = BTreeSet::new();
        let mut queue: VecDeque<EpistemicState> = VecDeque::new();
        for &p in group {
            let t = self.least_state(s, p);
            if seen.insert(t.clone()) {
                queue.push_back(t);
            }
        }
        while let Some(t) = queue.pop_front() {
            for &p in group {
                let u = self.least_state(&t, p);
                if seen.insert(u.clone()) {
                    queue.push_back(u);
                }
            }
        }
        let value = seen.iter().all(|t| self.eval(t, inner));
        self.memo.insert(key, value);
        value
    }
}
