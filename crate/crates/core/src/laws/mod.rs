//! Executable versions of the structural laws of the logic.
//!
//! Positive laws are quantified over the built-in instances followed by a
//! seeded stream of random models; each reports `AllPass` or the first
//! counterexample in stream order. Negative laws are pinned to the instances
//! where the law is known to fail and pass when the documented violation is
//! reproduced.

pub mod gen;
mod probe;

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::builtin;
use crate::explain::ExplainError;
use crate::formula::{Formula, FormulaError, Fragment, Group};
use crate::model::{InteractionModel, Knowledge, Mode, PlayerId};
use crate::modelfile::ModelFile;
use crate::semantics::SemanticsError;
use crate::state::EpistemicState;

use gen::{all_groups, generate_formulas, generate_models, sample_formulas, BUILTIN_COUNT};
use probe::{build_ctx, mono_violated, needs, violations, Check, Ctx};
pub use probe::{ProbeRecord, StateRecord};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LawError {
    #[error("unknown law `{0}`")]
    UnknownLaw(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Explain(#[from] ExplainError),
    #[error("missing evaluation context: {0}")]
    MissingContext(&'static str),
    #[error("cannot replay witness: {0}")]
    Replay(String),
}

macro_rules! laws {
    ($($id:ident),* $(,)?) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        #[allow(non_camel_case_types)]
        pub enum LawId { $($id),* }

        impl LawId {
            pub const ALL: &'static [LawId] = &[$(LawId::$id),*];

            pub fn name(self) -> &'static str {
                match self { $(LawId::$id => stringify!($id)),* }
            }
        }
    };
}

laws!(
    T_MONO_TELLING,
    T_H_IRRELEVANT,
    T_K_DISJ,
    T_CK_DISJ,
    T_CHAIN_EQUIV,
    T_PERM,
    T_BCAST_NEED,
    F_FACTS_NONEMPTY,
    F_BCAST_NEED,
    F_CK_FACT_IFF,
    F_KI_FACT_IFF,
    F_KI_FACT_H_IRRELEVANT,
    F_COMPLETION_INDIST,
    F_CK_FACT_DISJ,
    F_MONO,
    F_NONNESTED_H_IRRELEVANT,
    F_DISJ_PROP,
    NEG_EX1,
    NEG_EX2,
    NEG_EX3,
    NEG_EX4,
    NEG_EX5,
);

impl LawId {
    pub fn is_negative(self) -> bool {
        self.name().starts_with("NEG_")
    }

    /// Semantics the law is stated for; `None` for pinned laws.
    pub fn mode(self) -> Option<Mode> {
        match self.name().as_bytes()[0] {
            b'T' => Some(Mode::Telling),
            b'F' => Some(Mode::Forwarding),
            _ => None,
        }
    }

    /// One-line statement of the law.
    pub fn statement(self) -> &'static str {
        use LawId::*;
        match self {
            T_MONO_TELLING => "positive formulas stay true in larger states (telling)",
            T_H_IRRELEVANT => "knowing H does not change positive formulas (telling)",
            T_K_DISJ => "K_i distributes over disjunctions of positive formulas (telling)",
            T_CK_DISJ => "C_G distributes over disjunctions of positive formulas (telling)",
            T_CHAIN_EQUIV => "K_w p, a p-message in M_w and C_<w> p coincide (telling)",
            T_PERM => "C_G phi iff K_w phi for some w covering G (telling)",
            T_BCAST_NEED => {
                "C_G phi needs a message to a superset of G about a fact of phi (telling)"
            }
            F_FACTS_NONEMPTY => "a true positive formula has a true fact (forwarding)",
            F_BCAST_NEED => {
                "C_G phi needs a message to a superset of G about a fact of phi (forwarding)"
            }
            F_CK_FACT_IFF => "C_G p iff some p-message reached a superset of G (forwarding)",
            F_KI_FACT_IFF => "K_i p iff p is in V_i or Facts(M_i) (forwarding)",
            F_KI_FACT_H_IRRELEVANT => "knowing H does not change K_i p (forwarding)",
            F_COMPLETION_INDIST => {
                "the canonical completion of i's view is indistinguishable for i"
            }
            F_CK_FACT_DISJ => "C_G distributes over disjunctions of facts (forwarding)",
            F_MONO => "non-nested positive formulas stay true in larger states (forwarding)",
            F_NONNESTED_H_IRRELEVANT => {
                "knowing H does not change non-nested positive formulas (forwarding)"
            }
            F_DISJ_PROP => {
                "C_G distributes over disjunctions of propositional formulas (forwarding)"
            }
            NEG_EX1 => "knowing H matters for negative formulas",
            NEG_EX2 => "K_i does not distribute over disjunctions with negation",
            NEG_EX3 => "telling and forwarding semantics differ",
            NEG_EX4 => "knowing H matters for positive formulas under forwarding",
            NEG_EX5 => "K_i does not distribute over disjunctions of knowledge under forwarding",
        }
    }
}

impl LawId {
    /// The formulas the law is quantified over.
    pub fn domain(self) -> &'static str {
        use LawId::*;
        match self {
            T_MONO_TELLING | T_H_IRRELEVANT | T_PERM | F_FACTS_NONEMPTY => {
                "positive formulas of depth <= 3"
            }
            T_K_DISJ | T_CK_DISJ | T_BCAST_NEED | F_BCAST_NEED => {
                "positive formulas of depth <= 2 under one modality"
            }
            // Nested knowledge is not monotone under forwarding: with `p` owned
            // by k, `K{j} C{i,k} p` holds at {k->{i,k}, i->{i,j}} but not after
            // adding k->{j,k} and j->{i,j}, since j then cannot rule out
            // that i learned `p` from j alone.
            F_MONO | F_NONNESTED_H_IRRELEVANT => "non-nested positive formulas of depth <= 3",
            F_DISJ_PROP => "monotone propositional formulas of depth <= 2",
            T_CHAIN_EQUIV
            | F_CK_FACT_IFF
            | F_KI_FACT_IFF
            | F_KI_FACT_H_IRRELEVANT
            | F_CK_FACT_DISJ => "facts",
            F_COMPLETION_INDIST => "player views",
            NEG_EX1 | NEG_EX2 | NEG_EX3 | NEG_EX4 | NEG_EX5 => "pinned instance",
        }
    }
}

impl fmt::Display for LawId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LawId {
    type Err = LawError;

    fn from_str(s: &str) -> Result<Self, LawError> {
        LawId::ALL
            .iter()
            .copied()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| LawError::UnknownLaw(s.to_string()))
    }
}

impl Serialize for LawId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    AllPass,
    Counterexample,
}

/// A violation, self-contained enough to be replayed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Model file of the instance; its state is the first probe state.
    pub model: String,
    /// Message bound of the unknown-hypergraph twin, if it is bounded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twin_bound: Option<usize>,
    pub probes: Vec<ProbeRecord>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawReport {
    pub law: LawId,
    pub statement: &'static str,
    pub verdict: Outcome,
    pub expected: Outcome,
    pub passed: bool,
    /// Quantification domain of the formulas.
    pub domain: &'static str,
    pub instances_checked: usize,
    pub builtin_instances: usize,
    pub random_instances: usize,
    /// Instances skipped because their state space exceeded the cap.
    pub skipped: usize,
    pub checks: u64,
    /// Longest quantified word, relative to the group it covers.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word_bound: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// Knobs for [`check_law_with`].
#[derive(Clone, Debug)]
pub struct LawConfig {
    pub instance_budget: usize,
    pub seed: u64,
    pub max_players: usize,
    pub max_atoms: usize,
    pub max_depth: usize,
    /// State-space cap per instance; larger instances are skipped.
    pub cap: usize,
    /// Random formulas drawn per instance, on top of all depth-1 formulas.
    pub formulas: usize,
    /// States sampled per instance as the smaller side of monotonicity pairs.
    pub mono_states: usize,
}

pub const DEFAULT_INSTANCES: usize = 200;
pub const LAW_CAP: usize = 1 << 16;

impl Default for LawConfig {
    fn default() -> Self {
        LawConfig {
            instance_budget: DEFAULT_INSTANCES,
            seed: 0,
            max_players: 4,
            max_atoms: 3,
            max_depth: 3,
            cap: LAW_CAP,
            formulas: 32,
            mono_states: 64,
        }
    }
}

/// [`check_law_with`] under default settings.
pub fn check_law(law: LawId, instance_budget: usize, seed: u64) -> Result<LawReport, LawError> {
    check_law_with(
        law,
        &LawConfig {
            instance_budget,
            seed,
            ..LawConfig::default()
        },
    )
}

/// Models are generated this many at a time and checked in parallel.
const CHUNK: usize = 16;

pub fn check_law_with(law: LawId, config: &LawConfig) -> Result<LawReport, LawError> {
    if law.is_negative() {
        return check_pinned(law);
    }
    let mode = law.mode().expect("positive laws have a mode");
    let mut report = LawReport {
        law,
        statement: law.statement(),
        verdict: Outcome::AllPass,
        expected: Outcome::AllPass,
        passed: true,
        domain: law.domain(),
        instances_checked: 0,
        builtin_instances: 0,
        random_instances: 0,
        skipped: 0,
        checks: 0,
        word_bound: matches!(law, LawId::T_PERM | LawId::T_CHAIN_EQUIV).then_some("|G|+1"),
        witness: None,
    };
    let max_attempts = BUILTIN_COUNT + 20 * config.instance_budget.max(1);
    let mut stream = generate_models(config.seed, config.max_players, config.max_atoms, mode)
        .enumerate()
        .take(max_attempts);
    'outer: loop {
        let chunk: Vec<(usize, InteractionModel)> = stream.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let results: Vec<Result<Instance, LawError>> = chunk
            .par_iter()
            .map(|(idx, model)| run_instance(law, config, *idx, model))
            .collect();
        for ((idx, _), result) in chunk.iter().zip(results) {
            let builtin = *idx < BUILTIN_COUNT;
            if !builtin && report.random_instances >= config.instance_budget {
                break 'outer;
            }
            match result {
                Err(LawError::Semantics(SemanticsError::CapExceeded { .. })) => {
                    report.skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
                Ok(inst) => {
                    report.instances_checked += 1;
                    if builtin {
                        report.builtin_instances += 1;
                    } else {
                        report.random_instances += 1;
                    }
                    report.checks += inst.checks;
                    if let Some(w) = inst.witness {
                        report.witness = Some(w);
                        report.verdict = Outcome::Counterexample;
                        report.passed = false;
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(report)
}

struct Instance {
    checks: u64,
    witness: Option<Witness>,
}

fn uses_twin(law: LawId) -> bool {
    matches!(
        law,
        LawId::T_H_IRRELEVANT | LawId::F_KI_FACT_H_IRRELEVANT | LawId::F_NONNESTED_H_IRRELEVANT
    )
}

fn run_instance(
    law: LawId,
    config: &LawConfig,
    idx: usize,
    model: &InteractionModel,
) -> Result<Instance, LawError> {
    // Twin laws compare the declared hypergraph with the complete one.
    let model = if uses_twin(law) {
        model.with_knowledge(Knowledge::Common)
    } else {
        model.clone()
    };
    let mut ctx = build_ctx(&model, config.cap, uses_twin(law).then_some(None), false)?;
    let mut rng = ChaCha8Rng::seed_from_u64(
        config
            .seed
            .wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(idx as u64),
    );
    let checks = plan(law, config, &model, &mut rng);
    let n = ctx.session.space().len();
    let mut count = 0u64;

    if matches!(law, LawId::T_MONO_TELLING | LawId::F_MONO) {
        let space = ctx.session.space();
        let los: Vec<usize> = sample(&mut rng, n, config.mono_states.min(n)).into_vec();
        let mut pairs = Vec::new();
        for &lo in los.iter().sorted() {
            for hi in 0..n {
                if hi != lo && space.state(lo).is_subset(space.state(hi)) {
                    pairs.push((lo, hi));
                }
            }
        }
        for check in &checks {
            let Check::Mono { f } = check else {
                unreachable!()
            };
            let truth = ctx.session.truth(f)?;
            count += pairs.len() as u64;
            if let Some(&(lo, hi)) = pairs
                .iter()
                .find(|(lo, hi)| truth.contains(*lo) && !truth.contains(*hi))
            {
                debug_assert!(mono_violated(&mut ctx, f, lo, hi)?);
                return Ok(Instance {
                    checks: count,
                    witness: Some(witness(&ctx, None, &[(check.clone(), vec![lo, hi])])),
                });
            }
        }
        return Ok(Instance {
            checks: count,
            witness: None,
        });
    }

    for check in &checks {
        let bad = violations(&mut ctx, check)?;
        count += n as u64;
        if let Some(s) = bad.ones().next() {
            return Ok(Instance {
                checks: count,
                witness: Some(witness(&ctx, None, &[(check.clone(), vec![s])])),
            });
        }
    }
    Ok(Instance {
        checks: count,
        witness: None,
    })
}

/// Formulas for an instance: every depth-1 formula plus random deeper ones.
fn formulas(
    config: &LawConfig,
    rng: &mut ChaCha8Rng,
    fragment: Fragment,
    model: &InteractionModel,
    depth: usize,
) -> Vec<Formula> {
    let atoms: Vec<_> = model.atoms().collect();
    let players: Vec<_> = model.players().collect();
    let mut out = generate_formulas(fragment, &atoms, &players, depth.min(1));
    for f in sample_formulas(rng, fragment, &atoms, &players, depth, config.formulas) {
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out
}

/// Random pairs of operands for distributivity checks.
fn operand_pairs(
    config: &LawConfig,
    rng: &mut ChaCha8Rng,
    fragment: Fragment,
    model: &InteractionModel,
) -> Vec<(Formula, Formula)> {
    let pool = formulas(config, rng, fragment, model, config.max_depth - 1);
    let pairs = config.formulas;
    (0..pairs)
        .map(|_| {
            let picks = sample(rng, pool.len(), 2.min(pool.len())).into_vec();
            let l = pool[picks[0]].clone();
            let r = pool[*picks.last().unwrap()].clone();
            (l, r)
        })
        .collect()
}

/// All words over `group` of length `|group|` or `|group| + 1` that use
/// every member.
fn covering_words(group: &[PlayerId]) -> Vec<Vec<PlayerId>> {
    let mut out = Vec::new();
    for len in group.len()..=group.len() + 1 {
        for w in std::iter::repeat_n(group.iter().copied(), len).multi_cartesian_product() {
            if group.iter().all(|p| w.contains(p)) {
                out.push(w);
            }
        }
    }
    out
}

fn plan(
    law: LawId,
    config: &LawConfig,
    model: &InteractionModel,
    rng: &mut ChaCha8Rng,
) -> Vec<Check> {
    use LawId::*;
    let players: Vec<_> = model.players().collect();
    let atoms: Vec<_> = model.atoms().collect();
    let groups = all_groups(&players);
    let big: Vec<Group> = groups.iter().filter(|g| g.len() >= 2).cloned().collect();
    let depth = config.max_depth;
    let mut out = Vec::new();
    match law {
        T_MONO_TELLING | F_MONO => {
            let fragment = if law == F_MONO {
                Fragment::NonNestedPositive
            } else {
                Fragment::Positive
            };
            for f in formulas(config, rng, fragment, model, depth) {
                out.push(Check::Mono { f });
            }
        }
        T_H_IRRELEVANT => {
            for f in formulas(config, rng, Fragment::Positive, model, depth) {
                out.push(Check::SameUnderTwin { f });
            }
        }
        F_NONNESTED_H_IRRELEVANT => {
            for f in formulas(config, rng, Fragment::NonNestedPositive, model, depth) {
                out.push(Check::SameUnderTwin { f });
            }
        }
        F_KI_FACT_H_IRRELEVANT => {
            for &p in &players {
                for &a in &atoms {
                    out.push(Check::SameUnderTwin {
                        f: Formula::knows(p, Formula::Atom(a)),
                    });
                }
            }
        }
        T_K_DISJ | T_CK_DISJ | F_DISJ_PROP => {
            let fragment = if law == F_DISJ_PROP {
                Fragment::PropMonotone
            } else {
                Fragment::Positive
            };
            let pairs = operand_pairs(config, rng, fragment, model);
            let gs: Vec<Group> = if law == T_K_DISJ {
                players.iter().map(|&p| vec![p]).collect()
            } else {
                groups.clone()
            };
            for g in &gs {
                for (l, r) in &pairs {
                    out.push(Check::Distributes {
                        group: g.clone(),
                        left: l.clone(),
                        right: r.clone(),
                    });
                }
            }
        }
        T_CHAIN_EQUIV => {
            for g in &big {
                for word in covering_words(g) {
                    for &atom in &atoms {
                        out.push(Check::ChainEquiv {
                            word: word.clone(),
                            atom,
                        });
                    }
                }
            }
        }
        T_PERM => {
            let fs = formulas(
                &LawConfig {
                    formulas: config.formulas / 4,
                    ..config.clone()
                },
                rng,
                Fragment::Positive,
                model,
                depth - 1,
            );
            for g in &groups {
                for f in &fs {
                    out.push(Check::PermForward {
                        group: g.clone(),
                        f: f.clone(),
                    });
                    for word in covering_words(g) {
                        out.push(Check::PermBackward { word, f: f.clone() });
                    }
                }
            }
        }
        T_BCAST_NEED | F_BCAST_NEED => {
            let fs = formulas(config, rng, Fragment::Positive, model, depth - 1);
            for g in &big {
                for f in &fs {
                    out.push(Check::BroadcastNeeded {
                        group: g.clone(),
                        f: f.clone(),
                    });
                }
            }
        }
        F_FACTS_NONEMPTY => {
            for f in formulas(config, rng, Fragment::Positive, model, depth) {
                out.push(Check::FactsNonEmpty { f });
            }
        }
        F_CK_FACT_IFF => {
            for g in &big {
                for &atom in &atoms {
                    out.push(Check::CkFactIff {
                        group: g.clone(),
                        atom,
                    });
                }
            }
        }
        F_KI_FACT_IFF => {
            for &player in &players {
                for &atom in &atoms {
                    out.push(Check::KiFactIff { player, atom });
                }
            }
        }
        F_COMPLETION_INDIST => {
            for &player in &players {
                out.push(Check::CompletionIndist { player });
            }
        }
        F_CK_FACT_DISJ => {
            let subsets: Vec<Vec<_>> = (1..=atoms.len())
                .flat_map(|k| atoms.iter().copied().combinations(k))
                .collect();
            for g in &groups {
                for s in &subsets {
                    out.push(Check::CkFactDisj {
                        group: g.clone(),
                        atoms: s.clone(),
                    });
                }
            }
        }
        NEG_EX1 | NEG_EX2 | NEG_EX3 | NEG_EX4 | NEG_EX5 => unreachable!("pinned laws"),
    }
    out
}

fn witness(ctx: &Ctx, twin_bound: Option<usize>, probes: &[(Check, Vec<usize>)]) -> Witness {
    let space = ctx.session.space();
    let model = space.model();
    let records: Vec<ProbeRecord> = probes
        .iter()
        .map(|(c, states)| {
            let states: Vec<&EpistemicState> = states.iter().map(|&s| space.state(s)).collect();
            ProbeRecord::new(model, c, &states)
        })
        .collect();
    let first = space.state(probes[0].1[0]).clone();
    let detail = probes
        .iter()
        .zip(&records)
        .map(|((c, _), r)| describe(c, r))
        .join("; ");
    Witness {
        model: ModelFile {
            model: model.clone(),
            state: first,
        }
        .write(),
        twin_bound,
        probes: records,
        detail,
    }
}

fn describe(check: &Check, r: &ProbeRecord) -> String {
    let f = |i: usize| r.formulas.get(i).cloned().unwrap_or_default();
    let g = r.players.join(",");
    let a = r.atoms.join(",");
    match check {
        Check::Mono { .. } => format!("{} holds in a state but not in a larger one", f(0)),
        Check::SameUnderTwin { .. } => format!(
            "{} differs between the declared and the complete hypergraph",
            f(0)
        ),
        Check::Distributes { group, .. } => {
            let op = if group.len() == 1 {
                format!("K{{{g}}}")
            } else {
                format!("C{{{g}}}")
            };
            format!(
                "{op} ({} | {}) differs from {op} {} | {op} {}",
                f(0),
                f(1),
                f(0),
                f(1)
            )
        }
        Check::ChainEquiv { .. } => format!("word {g}: K_w {a}, message, and CK disagree"),
        Check::PermBackward { .. } => {
            format!("K along {g} of {} holds but C of its players fails", f(0))
        }
        Check::PermForward { .. } => format!("C{{{g}}} {} holds but K along {g} fails", f(0)),
        Check::BroadcastNeeded { .. } => {
            format!("C{{{g}}} {} holds without a covering message", f(0))
        }
        Check::FactsNonEmpty { .. } => format!("{} holds although none of its facts is true", f(0)),
        Check::CkFactIff { .. } => format!("C{{{g}}} {a} disagrees with the covering-message test"),
        Check::KiFactIff { .. } => format!("K{{{g}}} {a} disagrees with the local-facts test"),
        Check::CompletionIndist { .. } => format!("completion of {g}'s view is distinguishable"),
        Check::CkFactDisj { .. } => {
            format!("C{{{g}}} over the disjunction of {a} does not distribute")
        }
        Check::ModeDiffers { .. } => format!("{} differs between telling and forwarding", f(0)),
    }
}

/// Probe kind, formulas and player names of a pinned check.
type PinnedProbe = (&'static str, Vec<&'static str>, Vec<&'static str>);

/// The documented violation of a negative law: instance, twin bound, probes.
fn pinned(law: LawId) -> (ModelFile, Option<usize>, Vec<PinnedProbe>) {
    // Probes as (kind, formulas, players).
    match law {
        LawId::NEG_EX1 => (
            builtin::load("ex1").unwrap(),
            None,
            vec![("same_under_twin", vec!["K{i} !K{j} p"], vec![])],
        ),
        LawId::NEG_EX2 => (
            builtin::load("ex2").unwrap(),
            None,
            vec![(
                "distributes",
                vec!["K{j} p", "!(K{j} p | K{j} !p)"],
                vec!["i"],
            )],
        ),
        LawId::NEG_EX3 => (
            builtin::load("ex3").unwrap(),
            None,
            vec![("mode_differs", vec!["K{i} !K{k} p"], vec![])],
        ),
        LawId::NEG_EX4 => (
            builtin::load("ex4").unwrap(),
            Some(4),
            vec![
                ("same_under_twin", vec!["K{i} K{k} p"], vec![]),
                ("perm_backward", vec!["p"], vec!["i", "k"]),
            ],
        ),
        LawId::NEG_EX5 => (
            builtin::load("ex5").unwrap(),
            None,
            vec![("distributes", vec!["K{k} p", "K{l} p"], vec!["i"])],
        ),
        _ => unreachable!("positive law"),
    }
}

fn check_pinned(law: LawId) -> Result<LawReport, LawError> {
    let (file, twin_bound, specs) = pinned(law);
    let model = &file.model;
    let probes: Vec<ProbeRecord> = specs
        .into_iter()
        .map(|(kind, formulas, players)| ProbeRecord {
            kind: kind.to_string(),
            states: vec![StateRecord::from_state(model, &file.state)],
            formulas: formulas.into_iter().map(String::from).collect(),
            players: players.into_iter().map(String::from).collect(),
            atoms: vec![],
        })
        .collect();
    let draft = Witness {
        model: file.write(),
        twin_bound,
        probes,
        detail: String::new(),
    };
    let (mut ctx, checks) = replay_parts(&draft)?;
    let mut found = true;
    let mut located = Vec::new();
    for (check, states) in &checks {
        found &= probe_violated(&mut ctx, check, states)?;
        located.push((check.clone(), states.clone()));
    }
    let witness = found.then(|| witness(&ctx, twin_bound, &located));
    Ok(LawReport {
        law,
        statement: law.statement(),
        verdict: if found {
            Outcome::Counterexample
        } else {
            Outcome::AllPass
        },
        expected: Outcome::Counterexample,
        passed: found,
        domain: law.domain(),
        instances_checked: 1,
        builtin_instances: 1,
        random_instances: 0,
        skipped: 0,
        checks: checks.len() as u64,
        word_bound: None,
        witness,
    })
}

/// A check with the indices of its probe states.
type LocatedCheck = (Check, Vec<usize>);

/// Context and located checks for a witness.
fn replay_parts(w: &Witness) -> Result<(Ctx, Vec<LocatedCheck>), LawError> {
    let file = ModelFile::parse(&w.model).map_err(|e| LawError::Replay(e.to_string()))?;
    let model = &file.model;
    let mut checks = Vec::new();
    let (mut twin, mut other) = (false, false);
    for r in &w.probes {
        let (check, states) = r.to_check(model)?;
        let (t, o) = needs(&check);
        twin |= t;
        other |= o;
        checks.push((check, states));
    }
    let ctx = build_ctx(
        model,
        LAW_CAP.max(crate::semantics::DEFAULT_CAP),
        twin.then_some(w.twin_bound),
        other,
    )?;
    let located = checks
        .into_iter()
        .map(|(c, states)| {
            let idx = states
                .iter()
                .map(|s| ctx.session.index_of(s))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((c, idx))
        })
        .collect::<Result<Vec<_>, LawError>>()?;
    Ok((ctx, located))
}

fn probe_violated(ctx: &mut Ctx, check: &Check, states: &[usize]) -> Result<bool, LawError> {
    match check {
        Check::Mono { f } => {
            match states {
                [lo, hi] => {
                    let space = ctx.session.space();
                    Ok(space.state(*lo).is_subset(space.state(*hi))
                        && mono_violated(ctx, f, *lo, *hi)?)
                }
                _ => Err(LawError::Replay("monotonicity needs two states".into())),
            }
        }
        _ => {
            let &[s] = states else {
                return Err(LawError::Replay("expected one state".into()));
            };
            let bad: FixedBitSet = violations(ctx, check)?;
            Ok(bad.contains(s))
        }
    }
}

/// Re-decides every probe of `witness`; true iff all are still violated.
pub fn replay(witness: &Witness) -> Result<bool, LawError> {
    let (mut ctx, checks) = replay_parts(witness)?;
    for (check, states) in &checks {
        if !probe_violated(&mut ctx, check, states)? {
            return Ok(false);
        }
    }
    Ok(!checks.is_empty())
}
