//! Engine outputs checked against independently computed values.

mod common;

use std::collections::BTreeSet;

use common::{brute_states, small_model, universe, Naive};
use hyperknow::formula::{cnf, parse, render, Formula, Fragment};
use hyperknow::laws::gen::{all_groups, generate_formulas, sample_formulas};
use hyperknow::state::is_valid_state;
use hyperknow::{
    build_model, builtin, AtomId, EpistemicState, InteractionModel, Knowledge, Message, Mode,
    ModelFile, PlayerId, Session, StateSpace,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CAP: usize = 1 << 20;

fn msg(model: &InteractionModel, text: &str) -> Message {
    hyperknow::modelfile::parse_message(model, text).unwrap()
}

fn state(model: &InteractionModel, atoms: &[&str], msgs: &[&str]) -> EpistemicState {
    EpistemicState {
        valuation: atoms
            .iter()
            .map(|a| model.atom_by_name(a).unwrap())
            .collect(),
        messages: msgs.iter().map(|m| msg(model, m)).collect(),
    }
}

fn sorted(space: &StateSpace) -> Vec<EpistemicState> {
    let mut v = space.states().to_vec();
    v.sort();
    v
}

#[test]
fn universe_sizes_of_the_examples() {
    // Hand counts: ex1 has one arc containing k; the complete hypergraph on
    // three players has four arcs containing k; ex4 has three two-player arcs
    // with two possible senders each.
    let (m1, _) = builtin::ex1();
    assert_eq!(universe(&m1).len(), 1);
    assert_eq!(m1.message_universe().len(), 1);
    let m1u = m1.with_knowledge(Knowledge::Unknown);
    assert_eq!(universe(&m1u).len(), 4);
    assert_eq!(m1u.message_universe().len(), 4);
    let (m4, _) = builtin::ex4();
    assert_eq!(universe(&m4).len(), 6);
    assert_eq!(m4.message_universe().len(), 6);
    for name in builtin::NAMES {
        let m = builtin::load(name).unwrap().model;
        assert_eq!(m.message_universe(), universe(&m).as_slice(), "{name}");
    }
}

#[test]
fn example_state_counts() {
    // ex1: {}, {p}, {p} with the one message.
    let (m1, _) = builtin::ex1();
    assert_eq!(StateSpace::enumerate(&m1, CAP).unwrap().len(), 3);
    // Unknown hypergraph: 1 + 2^4 states.
    let m1u = m1.with_knowledge(Knowledge::Unknown);
    assert_eq!(StateSpace::enumerate(&m1u, CAP).unwrap().len(), 17);
}

#[test]
fn builtin_spaces_match_brute_force() {
    for name in builtin::NAMES {
        for mode in [Mode::Telling, Mode::Forwarding] {
            let m = builtin::load(name).unwrap().model.with_mode(mode);
            if universe(&m).len() > 12 {
                continue;
            }
            let space = StateSpace::enumerate(&m, CAP).unwrap();
            assert_eq!(sorted(&space), brute_states(&m), "{name} {mode:?}");
        }
    }
}

fn small_models() -> impl Strategy<Value = InteractionModel> {
    (
        1usize..=3,
        prop::collection::vec(0usize..3, 1..=2),
        prop::collection::vec(1u8..8, 1..=3),
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(n, owners, arcs, fwd, unknown)| {
            small_model(
                n,
                &owners,
                &arcs,
                if fwd { Mode::Forwarding } else { Mode::Telling },
                if unknown {
                    Knowledge::Unknown
                } else {
                    Knowledge::Common
                },
            )
        })
        .prop_filter("brute-force sized universe", |m| universe(m).len() <= 10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_spaces_match_brute_force(m in small_models()) {
        let space = StateSpace::enumerate(&m, CAP).unwrap();
        prop_assert_eq!(sorted(&space), brute_states(&m));
    }

    #[test]
    fn validity_matches_definition_on_all_subsets(m in small_models()) {
        let uni = universe(&m);
        prop_assume!(uni.len() <= 8);
        let atoms: Vec<AtomId> = m.atoms().collect();
        for vmask in 0u32..(1 << atoms.len()) {
            for mmask in 0u32..(1 << uni.len()) {
                let s = EpistemicState {
                    valuation: atoms.iter().enumerate().filter(|(i, _)| vmask & (1 << i) != 0).map(|(_, &a)| a).collect(),
                    messages: uni.iter().enumerate().filter(|(i, _)| mmask & (1 << i) != 0).map(|(_, x)| x.clone()).collect(),
                };
                prop_assert_eq!(is_valid_state(&m, &s), common::valid_by_definition(&m, &s));
            }
        }
    }

    #[test]
    fn render_parse_round_trip(m in small_models(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atoms: Vec<AtomId> = m.atoms().collect();
        let players: Vec<PlayerId> = m.players().collect();
        for f in sample_formulas(&mut rng, Fragment::Full, &atoms, &players, 4, 16) {
            let text = render(&f, &m);
            prop_assert_eq!(parse(&text, &m).unwrap(), f, "{}", text);
        }
    }

    #[test]
    fn model_file_round_trip(m in small_models(), pick in any::<prop::sample::Index>()) {
        let space = StateSpace::enumerate(&m, CAP).unwrap();
        let state = space.state(pick.index(space.len())).clone();
        let file = ModelFile { model: m, state };
        let text = file.write();
        prop_assert_eq!(ModelFile::parse(&text).unwrap(), file);
    }
}

#[test]
fn known_set_matches_chain_search() {
    let models = common::chain_test_models();
    assert!(models.len() >= 10);
    let checked: usize = models
        .iter()
        .map(|m| common::check_known_sets(m).unwrap())
        .sum();
    assert!(checked > 1000);
}

#[test]
fn cnf_matches_truth_table() {
    let atoms = [AtomId(0), AtomId(1), AtomId(2)];
    let formulas = generate_formulas(Fragment::PropMonotone, &atoms, &[], 2);
    assert_eq!(formulas.len(), 3 + 2 * 21 * 21);
    for f in &formulas {
        let c = cnf(f).unwrap();
        let back = c.to_formula();
        for mask in 0..8u32 {
            let v: BTreeSet<AtomId> = atoms
                .iter()
                .copied()
                .filter(|a| mask & (1 << a.0) != 0)
                .collect();
            let expect = f.eval_propositional(&v).unwrap();
            assert_eq!(c.eval(&v), expect, "{f:?}");
            assert_eq!(back.eval_propositional(&v).unwrap(), expect);
            for clause in &c.clauses {
                assert!(!clause.is_empty());
            }
        }
    }
}

/// Fragment membership by a direct recursive definition.
fn reference_flags(f: &Formula) -> (bool, bool, bool, bool) {
    fn negation(f: &Formula) -> bool {
        match f {
            Formula::Atom(_) => false,
            Formula::Not(_) => true,
            Formula::And(l, r) | Formula::Or(l, r) => negation(l) || negation(r),
            Formula::Ck(_, g) => negation(g),
        }
    }
    fn modal(f: &Formula) -> bool {
        match f {
            Formula::Atom(_) => false,
            Formula::Not(g) => modal(g),
            Formula::And(l, r) | Formula::Or(l, r) => modal(l) || modal(r),
            Formula::Ck(..) => true,
        }
    }
    fn nested(f: &Formula) -> bool {
        match f {
            Formula::Atom(_) => false,
            Formula::Not(g) => nested(g),
            Formula::And(l, r) | Formula::Or(l, r) => nested(l) || nested(r),
            Formula::Ck(_, g) => modal(g),
        }
    }
    let positive = !negation(f);
    (
        positive,
        positive && !nested(f),
        positive && !modal(f),
        !modal(f),
    )
}

#[test]
fn classify_matches_reference() {
    let atoms = [AtomId(0), AtomId(1)];
    let players = [PlayerId(0), PlayerId(1)];
    let check = |f: &Formula| {
        let c = f.classify();
        assert_eq!(
            (
                c.positive,
                c.nonnested_positive,
                c.prop_monotone,
                c.propositional
            ),
            reference_flags(f),
            "{f:?}"
        );
    };
    let exhaustive = generate_formulas(Fragment::Full, &atoms[..1], &players, 2);
    assert!(exhaustive.len() > 100);
    exhaustive.iter().for_each(check);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for f in sample_formulas(&mut rng, Fragment::Full, &atoms, &players, 3, 2000) {
        check(&f);
    }
}

#[test]
fn formula_counts_follow_the_recurrence() {
    // Structurally distinct formulas of depth <= d: atoms, one modality per
    // group over depth <= d-1, and ordered pairs for each binary connective.
    fn count(atoms: u64, groups: u64, d: u32) -> u64 {
        (0..d).fold(atoms, |f, _| atoms + groups * f + 2 * f * f)
    }
    let p = [AtomId(0)];
    let pq = [AtomId(0), AtomId(1)];
    let ij = [PlayerId(0), PlayerId(1)];
    let ijk = [PlayerId(0), PlayerId(1), PlayerId(2)];
    assert_eq!(count(1, 3, 2), 91);
    assert_eq!(
        generate_formulas(Fragment::Positive, &p, &ij, 1).len() as u64,
        count(1, 3, 1)
    );
    assert_eq!(
        generate_formulas(Fragment::Positive, &p, &ij, 2).len() as u64,
        count(1, 3, 2)
    );
    assert_eq!(
        generate_formulas(Fragment::Positive, &pq, &ij, 2).len() as u64,
        count(2, 3, 2)
    );
    assert_eq!(
        generate_formulas(Fragment::Positive, &p, &ijk, 2).len() as u64,
        count(1, 7, 2)
    );
    assert_eq!(all_groups(&ijk).len(), 7);
}

/// Monotonicity under forwarding fails once a knowledge operator sits inside
/// another: after j has forwarded p to i, j can no longer rule out that i
/// learned p only from j, so j loses `C{i,k} p` about i.
#[test]
fn forwarding_monotonicity_fails_for_nested_knowledge() {
    let m = build_model(
        &["i", "j", "k"],
        &[("p", "k")],
        &[vec!["i", "j", "k"]],
        Mode::Forwarding,
        Knowledge::Unknown,
    )
    .unwrap();
    let lo = state(&m, &["p"], &["k->{i,k}:p", "i->{i,j}:p"]);
    let hi = state(
        &m,
        &["p"],
        &["k->{i,k}:p", "i->{i,j}:p", "k->{j,k}:p", "j->{i,j}:p"],
    );
    assert!(lo.is_subset(&hi));
    let f = parse("K{j} C{i,k} p", &m).unwrap();
    assert!(f.classify().positive && !f.classify().nonnested_positive);

    let mut naive = Naive::new(&m);
    assert_eq!(naive.states.len(), 3347);
    let (a, b) = (naive.index(&lo), naive.index(&hi));
    assert!(naive.holds(a, &f));
    assert!(!naive.holds(b, &f));

    let mut session = Session::new(&m, CAP).unwrap();
    assert!(session.holds(&lo, &f).unwrap());
    assert!(!session.holds(&hi, &f).unwrap());
}
