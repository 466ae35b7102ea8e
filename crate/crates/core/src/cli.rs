//! Command-line front end.
//!
//! Exit codes: 0 true / ok, 1 false, 2 input error, 3 state space over the
//! cap, 4 unknown verdict under a message bound.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::builtin;
use crate::explain::explanation;
use crate::formula::{parse, Formula};
use crate::laws::{check_law, LawId, LawReport, DEFAULT_INSTANCES};
use crate::model::{InteractionModel, Knowledge, Mode, PlayerId};
use crate::modelfile::{parse_message, ModelFile};
use crate::semantics::{
    BoundedSession, PositiveEvaluator, SemanticsError, Session, Verdict3, DEFAULT_CAP,
};
use crate::state::{validate_state, EpistemicState};

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_UNKNOWN: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "hyperknow",
    version,
    about = "Model checker for knowledge over communication hypergraphs"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Cap on enumerated candidates and states.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    max_states: usize,
    /// Only consider states with at most this many messages (three-valued).
    #[arg(long, global = true)]
    bound: Option<usize>,
    /// Override the file's knowledge of the hypergraph.
    #[arg(long, global = true, value_enum)]
    knowledge: Option<KnowledgeArg>,
    /// Override the file's message semantics.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Seed for the law checker.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print a path to a refuting state when a C/K formula is false.
    #[arg(long, global = true)]
    witness: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KnowledgeArg {
    Common,
    Unknown,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Telling,
    Forwarding,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide a formula at the file's state.
    Check {
        /// Model file, or the name of a built-in example.
        model: String,
        /// Formula, e.g. "K{i} !K{j} p".
        #[arg(short, long)]
        formula: String,
    },
    /// List the states of the model.
    States {
        model: String,
        /// Print only the number of states.
        #[arg(long)]
        count: bool,
    },
    /// Check that the file's state is legal.
    Validate { model: String },
    /// Print an explanation chain for a message of the file's state.
    Explain {
        model: String,
        /// Message, e.g. "j->{j,i}:p".
        #[arg(short, long)]
        message: String,
    },
    /// Check laws of the logic on generated instances.
    Laws {
        /// Law identifiers, or `all`.
        #[arg(required = true)]
        laws: Vec<String>,
        /// Random instances per law, on top of the built-ins.
        #[arg(long, default_value_t = DEFAULT_INSTANCES)]
        instances: usize,
    },
    /// Print or write the built-in example models.
    Examples {
        name: Option<String>,
        /// Write `<name>.model` files into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// An error with its exit code, printed on the diagnostic stream.
struct Failure {
    code: i32,
    message: String,
}

fn input(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

impl From<SemanticsError> for Failure {
    fn from(e: SemanticsError) -> Self {
        let code = match e {
            SemanticsError::CapExceeded { .. } => EXIT_CAP,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Runs the command line `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_TRUE
            };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Check { model, formula } => cmd_check(g, model, formula, out),
        Command::States { model, count } => cmd_states(g, model, *count, out),
        Command::Validate { model } => cmd_validate(g, model, out),
        Command::Explain { model, message } => cmd_explain(g, model, message, out),
        Command::Laws { laws, instances } => cmd_laws(g, laws, *instances, out),
        Command::Examples { name, out: dir } => cmd_examples(name.as_deref(), dir.as_deref(), out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| input(format!("cannot write output: {e}")))
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("report types serialize");
    emit(out, &format!("{text}\n"))
}

/// Reads a model file, falling back to a built-in example of that name.
fn load(g: &Global, path: &str) -> Result<ModelFile, Failure> {
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            let stem = path.strip_suffix(".model").unwrap_or(path);
            match builtin::source(stem) {
                Some(text) if !Path::new(path).exists() => text.to_string(),
                _ => return Err(input(format!("{path}: {e}"))),
            }
        }
    };
    let mut file =
        ModelFile::parse(&text).map_err(|e| input(format!("{path}:{}: {}", e.line, e.kind)))?;
    if let Some(k) = g.knowledge {
        file.model = file.model.with_knowledge(match k {
            KnowledgeArg::Common => Knowledge::Common,
            KnowledgeArg::Unknown => Knowledge::Unknown,
        });
    }
    if let Some(m) = g.mode {
        file.model = file.model.with_mode(match m {
            ModeArg::Telling => Mode::Telling,
            ModeArg::Forwarding => Mode::Forwarding,
        });
    }
    Ok(file)
}

fn require_valid(path: &str, file: &ModelFile) -> Result<(), Failure> {
    let violations = validate_state(&file.model, &file.state);
    if violations.is_empty() {
        return Ok(());
    }
    let list: Vec<String> = violations.iter().map(|v| v.render(&file.model)).collect();
    Err(input(format!(
        "{path}: the state is not legal for this model:\n  {}",
        list.join("\n  ")
    )))
}

#[derive(Serialize)]
struct Step {
    player: String,
    state: String,
}

#[derive(Serialize)]
struct Timings {
    parse_ms: f64,
    enumerate_ms: f64,
    evaluate_ms: f64,
}

#[derive(Serialize)]
struct CheckReport {
    verdict: Verdict3,
    engine: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<Step>>,
    timings: Timings,
}

fn ms(t: Instant) -> f64 {
    (t.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

/// The modality at the top of `f`, if any.
fn top_modality(f: &Formula) -> Option<(&[PlayerId], &Formula)> {
    match f {
        Formula::Ck(g, inner) => Some((g, inner)),
        _ => None,
    }
}

fn render_path(
    model: &InteractionModel,
    path: Vec<(PlayerId, usize)>,
    state: impl Fn(usize) -> EpistemicState,
) -> Vec<Step> {
    path.into_iter()
        .map(|(p, s)| Step {
            player: model.player_name(p).to_string(),
            state: state(s).render(model),
        })
        .collect()
}

fn cmd_check(g: &Global, path: &str, text: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let t0 = Instant::now();
    let file = load(g, path)?;
    require_valid(path, &file)?;
    let model = &file.model;
    let f = parse(text, model).map_err(|e| input(format!("formula: {e}")))?;
    let parse_ms = ms(t0);

    let t1 = Instant::now();
    let (verdict, engine, witness, enumerate_ms);
    if let Some(bound) = g.bound {
        let mut session = BoundedSession::new(model, bound, g.max_states)?;
        enumerate_ms = ms(t1);
        verdict = session.verdict(&file.state, &f)?;
        engine = "bounded";
        witness = match (g.witness, verdict, top_modality(&f)) {
            (true, Verdict3::False, Some((group, inner))) => {
                let idx = session
                    .space()
                    .index_of(&file.state)
                    .expect("state is in range");
                session
                    .refutation_path(idx, group, inner)?
                    .map(|p| render_path(model, p, |s| session.space().state(s).clone()))
            }
            _ => None,
        };
    } else {
        match Session::new(model, g.max_states) {
            Ok(mut session) => {
                enumerate_ms = ms(t1);
                let idx = session.index_of(&file.state)?;
                verdict = Verdict3::from(session.holds_at(idx, &f)?);
                engine = "exact";
                witness = match (g.witness, verdict, top_modality(&f)) {
                    (true, Verdict3::False, Some((group, inner))) => session
                        .refutation_path(idx, group, inner)?
                        .map(|p| render_path(model, p, |s| session.space().state(s).clone())),
                    _ => None,
                };
            }
            // Positive formulas under telling do not need the state space.
            Err(SemanticsError::CapExceeded { .. })
                if model.mode() == Mode::Telling && !f.has_negation() =>
            {
                enumerate_ms = 0.0;
                verdict = Verdict3::from(PositiveEvaluator::new(model)?.holds(&file.state, &f)?);
                engine = "positive";
                witness = None;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let report = CheckReport {
        verdict,
        engine,
        bound: g.bound,
        witness,
        timings: Timings {
            parse_ms,
            enumerate_ms,
            evaluate_ms: ((ms(t1) - enumerate_ms) * 1e3).round() / 1e3,
        },
    };
    match g.format {
        Format::Json => emit_json(out, &report)?,
        Format::Text => {
            let mut text = format!("{}\n", report.verdict);
            if let Some(steps) = &report.witness {
                text.push_str("refuted along:\n");
                for s in steps {
                    text.push_str(&format!("  ~{}  {}\n", s.player, s.state));
                }
            }
            emit(out, &text)?;
        }
    }
    Ok(match verdict {
        Verdict3::True => EXIT_TRUE,
        Verdict3::False => EXIT_FALSE,
        Verdict3::Unknown => EXIT_UNKNOWN,
    })
}

#[derive(Serialize)]
struct StateJson {
    valuation: Vec<String>,
    messages: Vec<String>,
}

#[derive(Serialize)]
struct StatesReport {
    count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    states: Option<Vec<StateJson>>,
}

fn cmd_states(g: &Global, path: &str, count: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    let file = load(g, path)?;
    let model = &file.model;
    let space = match g.bound {
        Some(b) => crate::semantics::StateSpace::enumerate_bounded(model, b, g.max_states)?,
        None => crate::semantics::StateSpace::enumerate(model, g.max_states)?,
    };
    match g.format {
        Format::Json => emit_json(
            out,
            &StatesReport {
                count: space.len(),
                bound: g.bound,
                states: (!count).then(|| {
                    space
                        .states()
                        .iter()
                        .map(|s| StateJson {
                            valuation: s
                                .valuation
                                .iter()
                                .map(|&a| model.atom_name(a).to_string())
                                .collect(),
                            messages: s.messages.iter().map(|m| model.render_message(m)).collect(),
                        })
                        .collect()
                }),
            },
        )?,
        Format::Text if count => emit(out, &format!("{}\n", space.len()))?,
        Format::Text => {
            let mut text = String::new();
            for s in space.states() {
                text.push_str(&s.render(model));
                text.push('\n');
            }
            emit(out, &text)?;
        }
    }
    Ok(EXIT_TRUE)
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    violations: Vec<String>,
}

fn cmd_validate(g: &Global, path: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let file = load(g, path)?;
    let violations: Vec<String> = validate_state(&file.model, &file.state)
        .iter()
        .map(|v| v.render(&file.model))
        .collect();
    let valid = violations.is_empty();
    match g.format {
        Format::Json => emit_json(out, &ValidateReport { valid, violations })?,
        Format::Text if valid => emit(out, "ok\n")?,
        Format::Text => emit(out, &(violations.join("\n") + "\n"))?,
    }
    Ok(if valid { EXIT_TRUE } else { EXIT_INPUT })
}

#[derive(Serialize)]
struct ExplainReport {
    chain: Option<Vec<String>>,
}

fn cmd_explain(g: &Global, path: &str, text: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let file = load(g, path)?;
    let model = &file.model;
    let target = parse_message(model, text).map_err(|e| input(format!("message: {}", e.kind)))?;
    let chain = explanation(model, &file.state, &target).map_err(|e| input(e.to_string()))?;
    let chain: Option<Vec<String>> =
        chain.map(|c| c.iter().map(|m| model.render_message(m)).collect());
    match g.format {
        Format::Json => emit_json(out, &ExplainReport { chain })?,
        Format::Text => match chain {
            None => emit(out, "none\n")?,
            Some(c) => emit(out, &(c.join("\n") + "\n"))?,
        },
    }
    Ok(EXIT_TRUE)
}

#[derive(Serialize)]
struct SuiteReport {
    seed: u64,
    instances: usize,
    passed: bool,
    laws: Vec<LawReport>,
}

fn cmd_laws(
    g: &Global,
    names: &[String],
    instances: usize,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let mut laws = Vec::new();
    for n in names {
        if n.eq_ignore_ascii_case("all") {
            laws.extend_from_slice(LawId::ALL);
        } else {
            laws.push(n.parse::<LawId>().map_err(|e| input(e.to_string()))?);
        }
    }
    let mut reports = Vec::new();
    for law in laws {
        reports.push(check_law(law, instances, g.seed).map_err(|e| Failure {
            code: match e {
                crate::laws::LawError::Semantics(SemanticsError::CapExceeded { .. }) => EXIT_CAP,
                _ => EXIT_INPUT,
            },
            message: format!("{law}: {e}"),
        })?);
    }
    let passed = reports.iter().all(|r| r.passed);
    match g.format {
        Format::Json => emit_json(
            out,
            &SuiteReport {
                seed: g.seed,
                instances,
                passed,
                laws: reports,
            },
        )?,
        Format::Text => {
            let mut text = format!(
                "{:<26} {:<15} {:>9} {:>7} {:>12}  result\n",
                "law", "verdict", "instances", "skipped", "checks"
            );
            for r in &reports {
                let verdict = match r.verdict {
                    crate::laws::Outcome::AllPass => "all-pass",
                    crate::laws::Outcome::Counterexample => "counterexample",
                };
                text.push_str(&format!(
                    "{:<26} {:<15} {:>9} {:>7} {:>12}  {}\n",
                    r.law.name(),
                    verdict,
                    r.instances_checked,
                    r.skipped,
                    r.checks,
                    if r.passed { "PASS" } else { "FAIL" }
                ));
                if let (Some(w), false) = (&r.witness, r.passed) {
                    text.push_str(&format!("  {}\n", w.detail));
                    for line in w.model.lines() {
                        text.push_str(&format!("    {line}\n"));
                    }
                }
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            text.push_str(&format!(
                "{} laws, {} passed, {} failed\n",
                reports.len(),
                reports.len() - failed,
                failed
            ));
            emit(out, &text)?;
        }
    }
    Ok(if passed { EXIT_TRUE } else { EXIT_FALSE })
}

fn cmd_examples(
    name: Option<&str>,
    dir: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let names: Vec<&str> = match name {
        Some(n) => {
            let n = n.strip_suffix(".model").unwrap_or(n);
            let known = builtin::NAMES
                .iter()
                .copied()
                .find(|k| *k == n)
                .ok_or_else(|| {
                    input(format!(
                        "unknown example `{n}`; try one of {}",
                        builtin::NAMES.join(", ")
                    ))
                })?;
            vec![known]
        }
        None => builtin::NAMES.to_vec(),
    };
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
            for n in names {
                let path = dir.join(format!("{n}.model"));
                std::fs::write(&path, builtin::source(n).expect("known example"))
                    .map_err(|e| input(format!("{}: {e}", path.display())))?;
                emit(out, &format!("{}\n", path.display()))?;
            }
        }
        None if name.is_some() => emit(out, builtin::source(names[0]).expect("known example"))?,
        None => {
            for n in names {
                let summary = builtin::summary(n).expect("known example");
                emit(out, &format!("{n:<6} {summary}\n"))?;
            }
        }
    }
    Ok(EXIT_TRUE)
}
