//! Epistemic formulas with common-knowledge operators.

mod parse;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{AtomId, PlayerId};

pub use parse::{parse, render};

/// A non-empty, sorted group of players.
pub type Group = Vec<PlayerId>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(AtomId),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// Common knowledge among the group; `K_i` is the singleton case.
    Ck(Group, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at {pos}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        pos: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("unknown symbol `{name}` at {pos}")]
    UnknownSymbol { name: String, pos: usize },
    #[error("empty group at {pos}")]
    EmptyGroup { pos: usize },
    #[error("formula is not propositional")]
    NotPropositional,
    #[error("formula contains negation")]
    ContainsNegation,
    #[error("empty word")]
    EmptyWord,
}

/// Membership in the syntactic fragments the laws quantify over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FragmentFlags {
    /// No negation anywhere.
    pub positive: bool,
    /// Positive, and no knowledge operator inside another.
    pub nonnested_positive: bool,
    /// Positive and propositional: only atoms, conjunction and disjunction.
    pub prop_monotone: bool,
    /// No knowledge operator.
    pub propositional: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fragment {
    /// Everything, negation included.
    Full,
    Positive,
    NonNestedPositive,
    PropMonotone,
}

impl Fragment {
    pub fn admits(self, flags: FragmentFlags) -> bool {
        match self {
            Fragment::Full => true,
            Fragment::Positive => flags.positive,
            Fragment::NonNestedPositive => flags.nonnested_positive,
            Fragment::PropMonotone => flags.prop_monotone,
        }
    }
}

impl Formula {
    pub fn atom(a: AtomId) -> Self {
        Formula::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    /// `C_G φ`. The group is sorted and deduplicated.
    ///
    /// # Panics
    /// If `group` is empty.
    pub fn ck(group: impl IntoIterator<Item = PlayerId>, f: Formula) -> Self {
        let group: BTreeSet<PlayerId> = group.into_iter().collect();
        assert!(!group.is_empty(), "knowledge groups are non-empty");
        Formula::Ck(group.into_iter().collect(), Box::new(f))
    }

    pub fn knows(player: PlayerId, f: Formula) -> Self {
        Formula::Ck(vec![player], Box::new(f))
    }

    /// Left-nested disjunction of the given formulas; `None` when empty.
    pub fn disjunction(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        items.into_iter().reduce(Formula::or)
    }

    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        items.into_iter().reduce(Formula::and)
    }

    /// Height of the syntax tree; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(f) | Formula::Ck(_, f) => 1 + f.depth(),
            Formula::And(l, r) | Formula::Or(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Atoms occurring in the formula.
    pub fn facts(&self) -> BTreeSet<AtomId> {
        let mut out = BTreeSet::new();
        self.collect_facts(&mut out);
        out
    }

    fn collect_facts(&self, out: &mut BTreeSet<AtomId>) {
        match self {
            Formula::Atom(a) => {
                out.insert(*a);
            }
            Formula::Not(f) | Formula::Ck(_, f) => f.collect_facts(out),
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.collect_facts(out);
                r.collect_facts(out);
            }
        }
    }

    /// Largest number of knowledge operators on one root-to-leaf path.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(f) => f.modal_depth(),
            Formula::Ck(_, f) => 1 + f.modal_depth(),
            Formula::And(l, r) | Formula::Or(l, r) => l.modal_depth().max(r.modal_depth()),
        }
    }

    pub fn has_negation(&self) -> bool {
        match self {
            Formula::Atom(_) => false,
            Formula::Not(_) => true,
            Formula::Ck(_, f) => f.has_negation(),
            Formula::And(l, r) | Formula::Or(l, r) => l.has_negation() || r.has_negation(),
        }
    }

    pub fn classify(&self) -> FragmentFlags {
        let positive = !self.has_negation();
        let modal = self.modal_depth();
        FragmentFlags {
            positive,
            nonnested_positive: positive && modal <= 1,
            prop_monotone: positive && modal == 0,
            propositional: modal == 0,
        }
    }

    /// Truth under a plain valuation; knowledge operators are not allowed.
    pub fn eval_propositional(&self, valuation: &BTreeSet<AtomId>) -> Result<bool, FormulaError> {
        Ok(match self {
            Formula::Atom(a) => valuation.contains(a),
            Formula::Not(f) => !f.eval_propositional(valuation)?,
            Formula::And(l, r) => {
                l.eval_propositional(valuation)? && r.eval_propositional(valuation)?
            }
            Formula::Or(l, r) => {
                l.eval_propositional(valuation)? || r.eval_propositional(valuation)?
            }
            Formula::Ck(..) => return Err(FormulaError::NotPropositional),
        })
    }
}

pub fn facts_of(f: &Formula) -> BTreeSet<AtomId> {
    f.facts()
}

pub fn classify(f: &Formula) -> FragmentFlags {
    f.classify()
}

/// A conjunction of clauses, each a non-empty disjunction of atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub clauses: Vec<BTreeSet<AtomId>>,
}

impl Cnf {
    pub fn to_formula(&self) -> Formula {
        Formula::conjunction(self.clauses.iter().map(|c| {
            Formula::disjunction(c.iter().map(|&a| Formula::Atom(a)))
                .expect("clauses are non-empty")
        }))
        .expect("a negation-free formula has at least one clause")
    }

    pub fn eval(&self, valuation: &BTreeSet<AtomId>) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|a| valuation.contains(a)))
    }
}

/// Conjunctive normal form of a negation-free propositional formula, by
/// distribution. Duplicate clauses are dropped; clause order follows the
/// distribution order.
pub fn cnf(f: &Formula) -> Result<Cnf, FormulaError> {
    fn go(f: &Formula) -> Result<Vec<BTreeSet<AtomId>>, FormulaError> {
        Ok(match f {
            Formula::Atom(a) => vec![BTreeSet::from([*a])],
            Formula::Not(_) => return Err(FormulaError::ContainsNegation),
            Formula::Ck(..) => return Err(FormulaError::NotPropositional),
            Formula::And(l, r) => {
                let mut out = go(l)?;
                for c in go(r)? {
                    if !out.contains(&c) {
                        out.push(c);
                    }
                }
                out
            }
            Formula::Or(l, r) => {
                let (l, r) = (go(l)?, go(r)?);
                let mut out: Vec<BTreeSet<AtomId>> = Vec::new();
                for a in &l {
                    for b in &r {
                        let c: BTreeSet<AtomId> = a.union(b).copied().collect();
                        if !out.contains(&c) {
                            out.push(c);
                        }
                    }
                }
                out
            }
        })
    }
    if f.modal_depth() > 0 {
        return Err(FormulaError::NotPropositional);
    }
    Ok(Cnf { clauses: go(f)? })
}

/// `K_{w1} K_{w2} ... K_{wk} φ`.
pub fn expand_word(word: &[PlayerId], f: Formula) -> Result<Formula, FormulaError> {
    if word.is_empty() {
        return Err(FormulaError::EmptyWord);
    }
    Ok(word
        .iter()
        .rev()
        .fold(f, |acc, &player| Formula::knows(player, acc)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: AtomId = AtomId(0);
    const Q: AtomId = AtomId(1);
    const R: AtomId = AtomId(2);
    const I: PlayerId = PlayerId(0);
    const J: PlayerId = PlayerId(1);
    const K: PlayerId = PlayerId(2);

    fn p() -> Formula {
        Formula::Atom(P)
    }

    #[test]
    fn facts() {
        let f = Formula::knows(
            I,
            Formula::or(Formula::knows(K, p()), Formula::knows(J, p())),
        );
        assert_eq!(f.facts(), BTreeSet::from([P]));
        let g = Formula::and(p(), Formula::not(Formula::Atom(Q)));
        assert_eq!(facts_of(&g), BTreeSet::from([P, Q]));
    }

    #[test]
    fn classification() {
        let kjp = Formula::knows(J, p());
        let ex2 = Formula::knows(
            I,
            Formula::or(
                kjp.clone(),
                Formula::not(Formula::or(
                    kjp.clone(),
                    Formula::knows(J, Formula::not(p())),
                )),
            ),
        );
        assert!(!ex2.classify().positive);

        let c = Formula::ck([I, J], Formula::or(p(), Formula::Atom(Q))).classify();
        assert!(c.positive && c.nonnested_positive && !c.propositional);

        let nested = Formula::knows(I, Formula::knows(K, p())).classify();
        assert!(nested.positive && !nested.nonnested_positive);

        let prop = Formula::and(p(), Formula::Atom(Q)).classify();
        assert!(prop.prop_monotone && prop.nonnested_positive && prop.propositional);
    }

    #[test]
    fn cnf_distribution() {
        let f = Formula::or(p(), Formula::and(Formula::Atom(Q), Formula::Atom(R)));
        let c = cnf(&f).unwrap();
        assert_eq!(
            c.clauses,
            vec![BTreeSet::from([P, Q]), BTreeSet::from([P, R])]
        );
        assert_eq!(cnf(&p()).unwrap().to_formula(), p());
        assert_eq!(cnf(&Formula::not(p())), Err(FormulaError::ContainsNegation));
        assert_eq!(
            cnf(&Formula::knows(I, p())),
            Err(FormulaError::NotPropositional)
        );
    }

    #[test]
    fn word_expansion() {
        assert_eq!(
            expand_word(&[I, K], p()).unwrap(),
            Formula::knows(I, Formula::knows(K, p()))
        );
        assert_eq!(expand_word(&[I], p()).unwrap(), Formula::knows(I, p()));
        assert_eq!(
            expand_word(&[I, J, I], p()).unwrap(),
            Formula::knows(I, Formula::knows(J, Formula::knows(I, p())))
        );
        assert_eq!(expand_word(&[], p()), Err(FormulaError::EmptyWord));
    }
}
