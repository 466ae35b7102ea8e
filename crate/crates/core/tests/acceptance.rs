//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use hyperknow::formula::{parse, Fragment};
use hyperknow::laws::gen::{generate_formulas, generate_models, sample_formulas};
use hyperknow::laws::{replay, LawId, Witness};
use hyperknow::semantics::{BoundedSession, PositiveEvaluator};
use hyperknow::{builtin, Knowledge, Mode, ModelFile, Session, Verdict3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const CAP: usize = 1 << 20;

type Outcome = Result<String, String>;

fn ensure(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn load(name: &str) -> ModelFile {
    builtin::load(name).expect("built-in example")
}

/// Exact truth at the file's state.
fn exact(file: &ModelFile, formula: &str) -> Result<bool, String> {
    let f = parse(formula, &file.model).map_err(|e| e.to_string())?;
    Session::new(&file.model, CAP)
        .and_then(|mut s| s.holds(&file.state, &f))
        .map_err(|e| e.to_string())
}

fn expect(file: &ModelFile, formula: &str, want: bool, label: &str) -> Result<(), String> {
    let got = exact(file, formula)?;
    ensure(
        got == want,
        format!("{label}: `{formula}` is {got}, expected {want}"),
    )
}

fn with_knowledge(file: &ModelFile, k: Knowledge) -> ModelFile {
    ModelFile {
        model: file.model.with_knowledge(k),
        state: file.state.clone(),
    }
}

fn with_mode(file: &ModelFile, mode: Mode) -> ModelFile {
    ModelFile {
        model: file.model.with_mode(mode),
        state: file.state.clone(),
    }
}

fn example_one() -> Outcome {
    let ex1 = load("ex1");
    let common = with_knowledge(&ex1, Knowledge::Common);
    let unknown = with_knowledge(&ex1, Knowledge::Unknown);
    expect(&common, "K{i} !K{j} p", true, "common hypergraph")?;
    expect(&unknown, "K{i} !K{j} p", false, "unknown hypergraph")?;
    expect(&common, "C{i,j,k} !K{j} p", true, "common hypergraph")?;
    Ok("K{i}!K{j}p true/false; C{i,j,k}!K{j}p true".into())
}

fn example_two() -> Outcome {
    let ex2 = load("ex2");
    expect(
        &ex2,
        "K{i} (K{j} p | !(K{j} p | K{j} !p))",
        true,
        "disjunction",
    )?;
    expect(&ex2, "K{i} K{j} p", false, "left disjunct")?;
    expect(&ex2, "K{i} !(K{j} p | K{j} !p)", false, "right disjunct")?;
    Ok("disjunction known, neither disjunct".into())
}

fn example_three() -> Outcome {
    let ex3 = load("ex3");
    expect(
        &with_mode(&ex3, Mode::Telling),
        "K{i} !K{k} p",
        true,
        "telling",
    )?;
    expect(
        &with_mode(&ex3, Mode::Forwarding),
        "K{i} !K{k} p",
        false,
        "forwarding",
    )?;
    Ok("K{i}!K{k}p flips from true to false".into())
}

fn example_four() -> Outcome {
    let ex4 = load("ex4");
    expect(&ex4, "K{i} K{k} p", true, "common hypergraph")?;
    expect(&ex4, "C{i,k} p", false, "common hypergraph")?;
    expect(&ex4, "K{k} K{i} p", false, "common hypergraph")?;
    let unknown = ex4.model.with_knowledge(Knowledge::Unknown);
    let f = parse("K{i} K{k} p", &unknown).map_err(|e| e.to_string())?;
    let verdict = BoundedSession::new(&unknown, 4, CAP)
        .and_then(|mut s| s.verdict(&ex4.state, &f))
        .map_err(|e| e.to_string())?;
    ensure(
        verdict == Verdict3::False,
        format!("bounded unknown-hypergraph verdict {verdict:?}"),
    )?;
    Ok("K{i}K{k}p true, refuted at bound 4 without H; C{i,k}p, K{k}K{i}p false".into())
}

fn example_five() -> Outcome {
    let ex5 = load("ex5");
    expect(&ex5, "K{i} (K{k} p | K{l} p)", true, "disjunction")?;
    expect(&ex5, "K{i} K{k} p", false, "left disjunct")?;
    expect(&ex5, "K{i} K{l} p", false, "right disjunct")?;
    Ok("K{i}(K{k}p|K{l}p) true, neither disjunct".into())
}

fn laws_json(threads: Option<&str>) -> Result<(Vec<u8>, Duration), String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hyperknow"));
    cmd.args(["laws", "all", "--seed", "7", "--format", "json"]);
    if let Some(n) = threads {
        cmd.env("RAYON_NUM_THREADS", n);
    }
    let start = Instant::now();
    let out = cmd.output().map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(
        out.status.code() == Some(0),
        format!("laws exited with {:?}", out.status.code()),
    )?;
    Ok((out.stdout, elapsed))
}

fn law_suite(report: &[u8], elapsed: Duration) -> Outcome {
    ensure(
        elapsed <= Duration::from_secs(600),
        format!("single-thread run took {elapsed:?}"),
    )?;
    let v: Value = serde_json::from_slice(report).map_err(|e| e.to_string())?;
    ensure(v["passed"] == true, "suite not passed")?;
    ensure(
        v["instances"].as_u64() >= Some(200),
        "fewer than 200 instances requested",
    )?;
    let laws = v["laws"].as_array().ok_or("no law list")?;
    ensure(
        laws.len() == LawId::ALL.len(),
        format!("{} laws reported", laws.len()),
    )?;
    let (mut positive, mut negative) = (0, 0);
    for (law, id) in laws.iter().zip(LawId::ALL) {
        let name = law["law"].as_str().unwrap_or_default();
        ensure(name == id.name(), format!("law order: {name}"))?;
        ensure(law["passed"] == true, format!("{name} failed"))?;
        if id.is_negative() {
            negative += 1;
            ensure(
                law["verdict"] == "counterexample",
                format!("{name}: no counterexample"),
            )?;
            let witness: Witness = serde_json::from_value(law["witness"].clone())
                .map_err(|e| format!("{name}: witness: {e}"))?;
            ensure(
                replay(&witness).map_err(|e| e.to_string())?,
                format!("{name}: witness does not replay"),
            )?;
        } else {
            positive += 1;
            ensure(
                law["verdict"] == "all_pass",
                format!("{name}: {}", law["witness"]["detail"]),
            )?;
            let random = law["random_instances"].as_u64().unwrap_or(0);
            ensure(
                random >= 200,
                format!("{name}: only {random} random instances"),
            )?;
            ensure(
                law["builtin_instances"].as_u64() >= Some(1),
                format!("{name}: no built-ins"),
            )?;
        }
    }
    ensure(
        positive == 17 && negative == 5,
        format!("{positive} positive, {negative} negative"),
    )?;
    Ok(format!(
        "17 AllPass, 5 pinned counterexamples replayed, {:.1}s on one thread",
        elapsed.as_secs_f64()
    ))
}

fn oracle_equivalences() -> Outcome {
    // known_set against chain enumeration.
    let models = common::chain_test_models();
    let mut states = 0;
    for m in &models {
        states += common::check_known_sets(m)?;
    }

    // Positive fast path against the exact engine: every positive formula of
    // depth <= 3 at every state of the telling examples.
    let mut fast_checks = 0u64;
    for name in builtin::NAMES {
        let file = load(name);
        if file.model.mode() != Mode::Telling {
            continue;
        }
        let m = &file.model;
        let atoms: Vec<_> = m.atoms().collect();
        let players: Vec<_> = m.players().collect();
        let mut exact = Session::new(m, CAP).map_err(|e| e.to_string())?;
        let mut fast = PositiveEvaluator::new(m).map_err(|e| e.to_string())?;
        let space = exact.space().states().to_vec();
        for f in generate_formulas(Fragment::Positive, &atoms, &players, 3) {
            let truth = exact.truth(&f).map_err(|e| e.to_string())?;
            for (idx, s) in space.iter().enumerate() {
                let got = fast.holds(s, &f).map_err(|e| e.to_string())?;
                ensure(
                    got == truth.contains(idx),
                    format!("{name}: fast path differs on {f:?}"),
                )?;
                fast_checks += 1;
            }
        }
    }

    // Bounded verdicts against exact truth wherever both engines run.
    let mut bounded_checks = 0u64;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for mode in [Mode::Telling, Mode::Forwarding] {
        for m in generate_models(7, 4, 3, mode).take(40) {
            for m in [m.clone(), m.with_knowledge(Knowledge::Unknown)] {
                let Ok(mut exact) = Session::new(&m, 1 << 14) else {
                    continue;
                };
                let atoms: Vec<_> = m.atoms().collect();
                let players: Vec<_> = m.players().collect();
                let formulas = sample_formulas(&mut rng, Fragment::Full, &atoms, &players, 3, 16);
                for bound in 0..=4 {
                    let mut bounded =
                        BoundedSession::new(&m, bound, CAP).map_err(|e| e.to_string())?;
                    let states = bounded.space().states().to_vec();
                    for f in &formulas {
                        for s in &states {
                            let truth = exact.holds(s, f).map_err(|e| e.to_string())?;
                            let verdict = bounded.verdict(s, f).map_err(|e| e.to_string())?;
                            let wrong = matches!(
                                (verdict, truth),
                                (Verdict3::True, false) | (Verdict3::False, true)
                            );
                            ensure(
                                !wrong,
                                format!("bounded {verdict:?} vs exact {truth} for {f:?}"),
                            )?;
                            bounded_checks += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "known_set on {} models/{states} states, fast path {fast_checks} checks, bounded {bounded_checks} checks",
        models.len()
    ))
}

fn determinism(first: &[u8], second: &[u8]) -> Outcome {
    ensure(first == second, "reports differ")?;
    Ok(format!(
        "{} identical bytes (1 thread vs default pool)",
        first.len()
    ))
}

fn main() {
    let mut failed = false;
    let mut report =
        |n: usize, title: &str, limit: Option<Duration>, f: &mut dyn FnMut() -> Outcome| {
            let start = Instant::now();
            let mut result = f();
            let elapsed = start.elapsed();
            if let (Ok(_), Some(limit)) = (&result, limit) {
                if elapsed > limit {
                    result = Err(format!("took {elapsed:?}, limit {limit:?}"));
                }
            }
            match result {
                Ok(note) => println!(
                    "PASS criterion {n}: {title} ({:.2}s) - {note}",
                    elapsed.as_secs_f64()
                ),
                Err(why) => {
                    failed = true;
                    println!(
                        "FAIL criterion {n}: {title} ({:.2}s) - {why}",
                        elapsed.as_secs_f64()
                    );
                }
            }
        };
    let one = Some(Duration::from_secs(1));
    let five = Some(Duration::from_secs(5));
    report(1, "example 1", one, &mut example_one);
    report(2, "example 2", one, &mut example_two);
    report(3, "example 3", one, &mut example_three);
    report(4, "example 4", five, &mut example_four);
    report(5, "example 5", five, &mut example_five);
    let first = laws_json(Some("1"));
    report(6, "law suite", None, &mut || {
        let (bytes, elapsed) = first.clone()?;
        law_suite(&bytes, elapsed)
    });
    report(7, "oracle equivalences", None, &mut oracle_equivalences);
    report(8, "determinism", None, &mut || {
        let (a, _) = first.clone()?;
        let (b, _) = laws_json(None)?;
        determinism(&a, &b)
    });
    if failed {
        std::process::exit(1);
    }
}
