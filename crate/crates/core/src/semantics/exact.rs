use std::collections::HashMap;
use std::rc::Rc;

use fixedbitset::FixedBitSet;

use super::space::{check_group, StateSpace};
use super::SemanticsError;
use crate::formula::{Formula, Group};
use crate::model::{InteractionModel, PlayerId};
use crate::state::EpistemicState;

/// One evaluation session over an enumerated state space.
///
/// Truth sets are computed for all states at once and memoised per
/// subformula; `∼_G` components are memoised per group. A session is not
/// shared between threads; build one per worker.
pub struct Session {
    space: StateSpace,
    truth: HashMap<Formula, Rc<FixedBitSet>>,
    components: HashMap<Group, Rc<Vec<u32>>>,
}

impl Session {
    pub fn new(model: &InteractionModel, cap: usize) -> Result<Session, SemanticsError> {
        Ok(Session::from_space(StateSpace::enumerate(model, cap)?))
    }

    pub fn from_space(space: StateSpace) -> Session {
        Session {
            space,
            truth: HashMap::new(),
            components: HashMap::new(),
        }
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn model(&self) -> &InteractionModel {
        self.space.model()
    }

    pub fn index_of(&self, s: &EpistemicState) -> Result<usize, SemanticsError> {
        self.space.index_of(s).ok_or(SemanticsError::InvalidState)
    }

    pub fn components(&mut self, group: &[PlayerId]) -> Rc<Vec<u32>> {
        if let Some(c) = self.components.get(group) {
            return c.clone();
        }
        let c = Rc::new(self.space.components(group));
        self.components.insert(group.to_vec(), c.clone());
        c
    }

    /// The set of states satisfying `f`.
    pub fn truth(&mut self, f: &Formula) -> Result<Rc<FixedBitSet>, SemanticsError> {
        check_formula(self.model(), f)?;
        Ok(self.truth_unchecked(f))
    }

    fn truth_unchecked(&mut self, f: &Formula) -> Rc<FixedBitSet> {
        if let Some(t) = self.truth.get(f) {
            return t.clone();
        }
        let n = self.space.len();
        let set = match f {
            Formula::Atom(a) => {
                let bit = 1u64 << a.index();
                let mut set = FixedBitSet::with_capacity(n);
                for s in 0..n {
                    if self.space.compact(s).atoms & bit != 0 {
                        set.insert(s);
                    }
                }
                set
            }
            Formula::Not(g) => {
                let mut set = (*self.truth_unchecked(g)).clone();
                set.toggle_range(..);
                set
            }
            Formula::And(l, r) => {
                let mut set = (*self.truth_unchecked(l)).clone();
                set.intersect_with(&self.truth_unchecked(r));
                set
            }
            Formula::Or(l, r) => {
                let mut set = (*self.truth_unchecked(l)).clone();
                set.union_with(&self.truth_unchecked(r));
                set
            }
            Formula::Ck(group, g) => {
                let inner = self.truth_unchecked(g);
                let labels = self.components(group);
                let mut ok = vec![true; n];
                for s in 0..n {
                    if !inner.contains(s) {
                        ok[labels[s] as usize] = false;
                    }
                }
                let mut set = FixedBitSet::with_capacity(n);
                for s in 0..n {
                    if ok[labels[s] as usize] {
                        set.insert(s);
                    }
                }
                set
            }
        };
        let set = Rc::new(set);
        self.truth.insert(f.clone(), set.clone());
        set
    }

    pub fn holds_at(&mut self, idx: usize, f: &Formula) -> Result<bool, SemanticsError> {
        if idx >= self.space.len() {
            return Err(SemanticsError::StateNotInSpace);
        }
        Ok(self.truth(f)?.contains(idx))
    }

    /// Exact truth of `f` at `s`. Fails if `s` is not a state of the model.
    pub fn holds(&mut self, s: &EpistemicState, f: &Formula) -> Result<bool, SemanticsError> {
        let idx = self.index_of(s)?;
        self.holds_at(idx, f)
    }

    /// For a refuted `C_G φ` at `idx`: a `∼_G` path to a state refuting `φ`.
    pub fn refutation_path(
        &mut self,
        idx: usize,
        group: &[PlayerId],
        inner: &Formula,
    ) -> Result<Option<Vec<(PlayerId, usize)>>, SemanticsError> {
        check_group(self.model(), group)?;
        let truth = self.truth(inner)?;
        Ok(self.space.path_to(idx, group, |s| !truth.contains(s)))
    }
}

pub(crate) fn check_formula(model: &InteractionModel, f: &Formula) -> Result<(), SemanticsError> {
    match f {
        Formula::Atom(a) => {
            if a.index() >= model.atom_count() {
                return Err(SemanticsError::FormulaOutOfModel);
            }
        }
        Formula::Not(g) => check_formula(model, g)?,
        Formula::And(l, r) | Formula::Or(l, r) => {
            check_formula(model, l)?;
            check_formula(model, r)?;
        }
        Formula::Ck(group, g) => {
            check_group(model, group)?;
            check_formula(model, g)?;
        }
    }
    Ok(())
}
