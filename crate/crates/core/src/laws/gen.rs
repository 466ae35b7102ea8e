//! Formula and model generators for the law checker.

use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::builtin;
use crate::formula::{Formula, Fragment, Group};
use crate::model::{build_model, AtomId, InteractionModel, Knowledge, Mode, PlayerId};

/// All non-empty subsets of `players`, smallest first.
pub fn all_groups(players: &[PlayerId]) -> Vec<Group> {
    let n = players.len();
    let mut out: Vec<Group> = (1u32..(1 << n))
        .map(|mask| {
            (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| players[i])
                .collect()
        })
        .collect();
    out.sort_by(|a: &Group, b: &Group| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Every formula of `fragment` over `atoms` and all groups of `players` with
/// depth at most `max_depth` (atoms have depth 0), in a fixed order:
/// by depth, then atoms, unary and binary constructions.
///
/// Sizes grow doubly exponentially; depth 2 is already in the thousands for
/// three players.
pub fn generate_formulas(
    fragment: Fragment,
    atoms: &[AtomId],
    players: &[PlayerId],
    max_depth: usize,
) -> Vec<Formula> {
    assert!(max_depth <= 4, "depth is capped at 4");
    let groups = all_groups(players);
    // Layers of the positive/full grammar; fragment filtering happens at the
    // end except for the propositional fragment, which never builds modalities.
    let with_ck = fragment != Fragment::PropMonotone;
    let with_not = fragment == Fragment::Full;
    let mut all: Vec<Formula> = atoms.iter().map(|&a| Formula::Atom(a)).collect();
    let mut seen: HashSet<Formula> = all.iter().cloned().collect();
    for _ in 0..max_depth {
        let prev = all.clone();
        let mut next = Vec::new();
        if with_not {
            next.extend(prev.iter().map(|f| Formula::not(f.clone())));
        }
        if with_ck {
            for g in &groups {
                next.extend(
                    prev.iter()
                        .map(|f| Formula::Ck(g.clone(), Box::new(f.clone()))),
                );
            }
        }
        for l in &prev {
            for r in &prev {
                next.push(Formula::and(l.clone(), r.clone()));
            }
        }
        for l in &prev {
            for r in &prev {
                next.push(Formula::or(l.clone(), r.clone()));
            }
        }
        for f in next {
            if seen.insert(f.clone()) {
                all.push(f);
            }
        }
    }
    all.retain(|f| fragment.admits(f.classify()));
    all.sort_by_key(|f| f.depth());
    all
}

/// Random formula of `fragment` with depth at most `max_depth`.
pub fn random_formula(
    rng: &mut impl Rng,
    fragment: Fragment,
    atoms: &[AtomId],
    groups: &[Group],
    max_depth: usize,
) -> Formula {
    match fragment {
        Fragment::NonNestedPositive => {
            if max_depth == 0 {
                return Formula::Atom(*atoms.choose(rng).unwrap());
            }
            match rng.gen_range(0..4) {
                0 => Formula::Atom(*atoms.choose(rng).unwrap()),
                1 => Formula::Ck(
                    groups.choose(rng).unwrap().clone(),
                    Box::new(random_formula(
                        rng,
                        Fragment::PropMonotone,
                        atoms,
                        groups,
                        max_depth - 1,
                    )),
                ),
                k => {
                    let l = random_formula(rng, fragment, atoms, groups, max_depth - 1);
                    let r = random_formula(rng, fragment, atoms, groups, max_depth - 1);
                    if k == 2 {
                        Formula::and(l, r)
                    } else {
                        Formula::or(l, r)
                    }
                }
            }
        }
        _ => {
            if max_depth == 0 || rng.gen_bool(0.2) {
                return Formula::Atom(*atoms.choose(rng).unwrap());
            }
            let kinds: &[u8] = match fragment {
                Fragment::Full => &[0, 1, 2, 2, 3],
                Fragment::Positive => &[0, 1, 2, 2],
                _ => &[0, 1],
            };
            let sub = |rng: &mut _| random_formula(rng, fragment, atoms, groups, max_depth - 1);
            match kinds.choose(rng).unwrap() {
                0 => {
                    let (l, r) = (sub(rng), sub(rng));
                    Formula::and(l, r)
                }
                1 => {
                    let (l, r) = (sub(rng), sub(rng));
                    Formula::or(l, r)
                }
                2 => Formula::Ck(groups.choose(rng).unwrap().clone(), Box::new(sub(rng))),
                _ => Formula::not(sub(rng)),
            }
        }
    }
}

/// `count` distinct random formulas (fewer if the fragment is too small).
pub fn sample_formulas(
    rng: &mut impl Rng,
    fragment: Fragment,
    atoms: &[AtomId],
    players: &[PlayerId],
    max_depth: usize,
    count: usize,
) -> Vec<Formula> {
    let groups = all_groups(players);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for _ in 0..count * 8 {
        if out.len() == count {
            break;
        }
        let f = random_formula(rng, fragment, atoms, &groups, max_depth);
        if seen.insert(f.clone()) {
            out.push(f);
        }
    }
    out
}

const PLAYER_NAMES: [&str; 4] = ["i", "j", "k", "l"];
const ATOM_NAMES: [&str; 3] = ["p", "q", "r"];

/// Reproducible stream of models: the built-in instances (converted to
/// `mode`) followed by random interaction structures.
pub struct ModelStream {
    rng: ChaCha8Rng,
    builtins: VecDeque<InteractionModel>,
    max_players: usize,
    max_atoms: usize,
    mode: Mode,
}

/// See [`ModelStream`]. `max_players` ≤ 4 and `max_atoms` ≤ 3.
pub fn generate_models(seed: u64, max_players: usize, max_atoms: usize, mode: Mode) -> ModelStream {
    assert!((1..=4).contains(&max_players) && (1..=3).contains(&max_atoms));
    ModelStream {
        rng: ChaCha8Rng::seed_from_u64(seed),
        builtins: builtin::NAMES
            .iter()
            .map(|n| builtin::load(n).unwrap().model.with_mode(mode))
            .collect(),
        max_players,
        max_atoms,
        mode,
    }
}

pub const BUILTIN_COUNT: usize = builtin::NAMES.len();

impl ModelStream {
    fn random_model(&mut self) -> InteractionModel {
        let rng = &mut self.rng;
        let n = if self.max_players == 1 || rng.gen_bool(0.1) {
            1
        } else {
            rng.gen_range(2..=self.max_players)
        };
        let a = rng.gen_range(1..=self.max_atoms);
        let players: Vec<&str> = PLAYER_NAMES[..n].to_vec();
        let atoms: Vec<(&str, &str)> = (0..a)
            .map(|x| (ATOM_NAMES[x], PLAYER_NAMES[rng.gen_range(0..n)]))
            .collect();
        let arc_count = rng.gen_range(1..=3);
        let mut arcs: Vec<Vec<&str>> = Vec::new();
        for _ in 0..arc_count {
            let mut members: Vec<&str> = players
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(0.5))
                .collect();
            if members.is_empty() {
                members.push(players[rng.gen_range(0..n)]);
            }
            arcs.push(members);
        }
        let knowledge = if rng.gen_bool(0.25) {
            Knowledge::Unknown
        } else {
            Knowledge::Common
        };
        build_model(&players, &atoms, &arcs, self.mode, knowledge)
            .expect("generated names are valid")
    }
}

impl Iterator for ModelStream {
    type Item = InteractionModel;

    fn next(&mut self) -> Option<InteractionModel> {
        Some(match self.builtins.pop_front() {
            Some(m) => m,
            None => self.random_model(),
        })
    }
}
