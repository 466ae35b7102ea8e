use std::collections::HashMap;
use std::rc::Rc;

use fixedbitset::FixedBitSet;

use super::exact::check_formula;
use super::space::StateSpace;
use super::{SemanticsError, Verdict3};
use crate::formula::{Formula, Group};
use crate::model::{InteractionModel, PlayerId};
use crate::state::EpistemicState;

/// Definite-true and definite-false sets; states in neither are unknown.
#[derive(Clone, Debug)]
struct Kleene {
    yes: FixedBitSet,
    no: FixedBitSet,
}

/// Three-valued evaluation over the states with at most `bound` messages.
///
/// A refuting state reached inside the subspace is a genuine witness, so
/// `False` is always sound. `True` for a knowledge operator is only claimed
/// when the subspace is the whole space.
pub struct BoundedSession {
    space: StateSpace,
    memo: HashMap<Formula, Rc<Kleene>>,
    components: HashMap<Group, Rc<Vec<u32>>>,
}

impl BoundedSession {
    pub fn new(
        model: &InteractionModel,
        bound: usize,
        cap: usize,
    ) -> Result<BoundedSession, SemanticsError> {
        Ok(BoundedSession {
            space: StateSpace::enumerate_bounded(model, bound, cap)?,
            memo: HashMap::new(),
            components: HashMap::new(),
        })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    fn components(&mut self, group: &[PlayerId]) -> Rc<Vec<u32>> {
        if let Some(c) = self.components.get(group) {
            return c.clone();
        }
        let c = Rc::new(self.space.components(group));
        self.components.insert(group.to_vec(), c.clone());
        c
    }

    fn eval(&mut self, f: &Formula) -> Rc<Kleene> {
        if let Some(k) = self.memo.get(f) {
            return k.clone();
        }
        let n = self.space.len();
        let complete = self.space.is_complete();
        let k = match f {
            Formula::Atom(a) => {
                let mut yes = FixedBitSet::with_capacity(n);
                for s in 0..n {
                    if self.space.compact(s).atoms & (1 << a.index()) != 0 {
                        yes.insert(s);
                    }
                }
                let mut no = yes.clone();
                no.toggle_range(..);
                Kleene { yes, no }
            }
            Formula::Not(g) => {
                let g = self.eval(g);
                Kleene {
                    yes: g.no.clone(),
                    no: g.yes.clone(),
                }
            }
            Formula::And(l, r) => {
                let (l, r) = (self.eval(l), self.eval(r));
                let mut yes = l.yes.clone();
                yes.intersect_with(&r.yes);
                let mut no = l.no.clone();
                no.union_with(&r.no);
                Kleene { yes, no }
            }
            Formula::Or(l, r) => {
                let (l, r) = (self.eval(l), self.eval(r));
                let mut yes = l.yes.clone();
                yes.union_with(&r.yes);
                let mut no = l.no.clone();
                no.intersect_with(&r.no);
                Kleene { yes, no }
            }
            Formula::Ck(group, g) => {
                let inner = self.eval(g);
                let labels = self.components(group);
                let mut refuted = vec![false; n];
                let mut all_true = vec![true; n];
                for s in 0..n {
                    let c = labels[s] as usize;
                    if inner.no.contains(s) {
                        refuted[c] = true;
                    }
                    if !inner.yes.contains(s) {
                        all_true[c] = false;
                    }
                }
                let mut yes = FixedBitSet::with_capacity(n);
                let mut no = FixedBitSet::with_capacity(n);
                for s in 0..n {
                    let c = labels[s] as usize;
                    if refuted[c] {
                        no.insert(s);
                    } else if complete && all_true[c] {
                        yes.insert(s);
                    }
                }
                Kleene { yes, no }
            }
        };
        let k = Rc::new(k);
        self.memo.insert(f.clone(), k.clone());
        k
    }

    pub fn verdict_at(&mut self, idx: usize, f: &Formula) -> Result<Verdict3, SemanticsError> {
        check_formula(self.space.model(), f)?;
        let k = self.eval(f);
        Ok(if k.yes.contains(idx) {
            Verdict3::True
        } else if k.no.contains(idx) {
            Verdict3::False
        } else {
            Verdict3::Unknown
        })
    }

    pub fn verdict(&mut self, s: &EpistemicState, f: &Formula) -> Result<Verdict3, SemanticsError> {
        if let Some(bound) = self.space.bound() {
            if s.messages.len() > bound {
                return Err(SemanticsError::BoundTooSmall {
                    messages: s.messages.len(),
                    bound,
                });
            }
        }
        let idx = self.space.index_of(s).ok_or(SemanticsError::InvalidState)?;
        self.verdict_at(idx, f)
    }

    /// A `∼_G` path inside the subspace to a state where `inner` is
    /// definitely false.
    pub fn refutation_path(
        &mut self,
        idx: usize,
        group: &[PlayerId],
        inner: &Formula,
    ) -> Result<Option<Vec<(PlayerId, usize)>>, SemanticsError> {
        check_formula(self.space.model(), inner)?;
        let k = self.eval(inner);
        Ok(self.space.path_to(idx, group, |s| k.no.contains(s)))
    }
}
