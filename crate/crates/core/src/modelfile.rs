//! Line-oriented model files.
//!
//! ```text
//! players: i j k l
//! atoms: p@l q@k
//! hypergraph: {l,k} {k,j} {j,i}
//! mode: forwarding            # telling | forwarding
//! knowledge: common           # common | unknown
//! valuation: p
//! message: l -> {l,k} : p
//! ```
//!
//! Every section but `message` appears at most once. `players` and `atoms`
//! are required; the rest default to an empty hypergraph, telling, common
//! knowledge and the empty state.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{build_model, InteractionModel, Knowledge, Message, Mode, ModelError};
use crate::state::EpistemicState;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ModelFileError {
    pub line: usize,
    pub kind: ModelFileErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelFileErrorKind {
    #[error("unknown section `{0}`")]
    UnknownSection(String),
    #[error("section `{0}` appears more than once")]
    DuplicateSection(String),
    #[error("missing section `{0}`")]
    MissingSection(&'static str),
    #[error("malformed {what}: `{text}`")]
    Malformed { what: &'static str, text: String },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A model together with the state it describes. The state is not checked
/// for legality here; see [`crate::state::validate_state`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelFile {
    pub model: InteractionModel,
    pub state: EpistemicState,
}

fn err(line: usize, kind: ModelFileErrorKind) -> ModelFileError {
    ModelFileError { line, kind }
}

fn malformed(line: usize, what: &'static str, text: &str) -> ModelFileError {
    err(
        line,
        ModelFileErrorKind::Malformed {
            what,
            text: text.trim().to_string(),
        },
    )
}

/// Splits `{a,b} {c}` into member lists.
fn parse_arcs(line: usize, text: &str) -> Result<Vec<Vec<String>>, ModelFileError> {
    let mut arcs = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let inner = rest
            .strip_prefix('{')
            .and_then(|r| r.split_once('}'))
            .ok_or_else(|| malformed(line, "hyperarc", rest))?;
        let members: Vec<String> = inner
            .0
            .split(',')
            .map(|m| m.trim())
            .filter(|m| !m.is_empty())
            .map(String::from)
            .collect();
        arcs.push(members);
        rest = inner.1.trim_start();
    }
    Ok(arcs)
}

/// Parses `sender -> {a,b} : atom` against `model`.
pub fn parse_message(model: &InteractionModel, text: &str) -> Result<Message, ModelFileError> {
    parse_message_at(model, 0, text)
}

fn parse_message_at(
    model: &InteractionModel,
    line: usize,
    text: &str,
) -> Result<Message, ModelFileError> {
    let (sender, rest) = text
        .split_once("->")
        .ok_or_else(|| malformed(line, "message", text))?;
    let (arc, atom) = rest
        .rsplit_once(':')
        .ok_or_else(|| malformed(line, "message", text))?;
    let sender = sender.trim();
    let sender = model.player_by_name(sender).ok_or_else(|| {
        err(
            line,
            ModelFileErrorKind::Model(ModelError::UnknownPlayer(sender.to_string())),
        )
    })?;
    let arcs = parse_arcs(line, arc)?;
    let [members] = arcs.as_slice() else {
        return Err(malformed(line, "message", text));
    };
    let arc = model
        .arc_from_names(members)
        .map_err(|e| err(line, e.into()))?;
    let atom = atom.trim();
    let atom = model
        .atom_by_name(atom)
        .ok_or_else(|| err(line, ModelFileErrorKind::UnknownAtom(atom.to_string())))?;
    Ok(Message::new(sender, arc, atom))
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<ModelFile, ModelFileError> {
        let mut players: Option<(usize, Vec<String>)> = None;
        let mut atoms: Option<(usize, Vec<(String, String)>)> = None;
        let mut arcs: Option<(usize, Vec<Vec<String>>)> = None;
        let mut mode: Option<Mode> = None;
        let mut knowledge: Option<Knowledge> = None;
        let mut valuation: Option<(usize, Vec<String>)> = None;
        let mut messages: Vec<(usize, String)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once(':')
                .ok_or_else(|| malformed(line, "line", content))?;
            let key = key.trim();
            let value = value.trim();
            let dup = || err(line, ModelFileErrorKind::DuplicateSection(key.to_string()));
            match key {
                "players" => {
                    if players.is_some() {
                        return Err(dup());
                    }
                    players = Some((line, value.split_whitespace().map(String::from).collect()));
                }
                "atoms" => {
                    if atoms.is_some() {
                        return Err(dup());
                    }
                    let list = value
                        .split_whitespace()
                        .map(|tok| {
                            tok.split_once('@')
                                .map(|(a, o)| (a.to_string(), o.to_string()))
                                .ok_or_else(|| malformed(line, "atom declaration", tok))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    atoms = Some((line, list));
                }
                "hypergraph" => {
                    if arcs.is_some() {
                        return Err(dup());
                    }
                    arcs = Some((line, parse_arcs(line, value)?));
                }
                "mode" => {
                    if mode.is_some() {
                        return Err(dup());
                    }
                    mode = Some(match value {
                        "telling" => Mode::Telling,
                        "forwarding" => Mode::Forwarding,
                        _ => return Err(malformed(line, "mode", value)),
                    });
                }
                "knowledge" => {
                    if knowledge.is_some() {
                        return Err(dup());
                    }
                    knowledge = Some(match value {
                        "common" => Knowledge::Common,
                        "unknown" => Knowledge::Unknown,
                        _ => return Err(malformed(line, "knowledge", value)),
                    });
                }
                "valuation" => {
                    if valuation.is_some() {
                        return Err(dup());
                    }
                    valuation = Some((line, value.split_whitespace().map(String::from).collect()));
                }
                "message" => messages.push((line, value.to_string())),
                other => {
                    return Err(err(
                        line,
                        ModelFileErrorKind::UnknownSection(other.to_string()),
                    ))
                }
            }
        }

        let (players_line, players) =
            players.ok_or_else(|| err(0, ModelFileErrorKind::MissingSection("players")))?;
        let (atoms_line, atoms) =
            atoms.ok_or_else(|| err(0, ModelFileErrorKind::MissingSection("atoms")))?;
        let (arcs_line, arcs) = arcs.unwrap_or((0, Vec::new()));
        // Attribute model errors to the most specific section we can.
        let model = build_model(
            &players,
            &atoms,
            &arcs,
            mode.unwrap_or(Mode::Telling),
            knowledge.unwrap_or(Knowledge::Common),
        )
        .map_err(|e| {
            let line = match &e {
                ModelError::EmptyHyperarc => arcs_line,
                ModelError::UnknownPlayer(name) => {
                    if atoms.iter().any(|(_, o)| o == name) {
                        atoms_line
                    } else {
                        arcs_line
                    }
                }
                ModelError::DuplicateName(name) if !players.contains(name) => atoms_line,
                _ => players_line,
            };
            err(line, e.into())
        })?;

        let mut state = EpistemicState::empty();
        if let Some((line, names)) = valuation {
            for name in names {
                let atom = model
                    .atom_by_name(&name)
                    .ok_or_else(|| err(line, ModelFileErrorKind::UnknownAtom(name.clone())))?;
                state.valuation.insert(atom);
            }
        }
        for (line, text) in messages {
            state
                .messages
                .insert(parse_message_at(&model, line, &text)?);
        }
        Ok(ModelFile { model, state })
    }

    /// Canonical text form; `parse(write(f)) == f`.
    pub fn write(&self) -> String {
        let m = &self.model;
        let mut out = String::new();
        let _ = writeln!(out, "players: {}", m.player_names().join(" "));
        let atoms: Vec<String> = m
            .atoms()
            .map(|a| format!("{}@{}", m.atom_name(a), m.player_name(m.owner(a))))
            .collect();
        let _ = writeln!(out, "atoms: {}", atoms.join(" "));
        let arcs: Vec<String> = m.hypergraph().iter().map(|a| m.render_arc(a)).collect();
        let _ = writeln!(out, "hypergraph: {}", arcs.join(" "));
        let _ = writeln!(out, "mode: {}", m.mode());
        let _ = writeln!(out, "knowledge: {}", m.knowledge());
        let v: Vec<&str> = self
            .state
            .valuation
            .iter()
            .map(|&a| m.atom_name(a))
            .collect();
        let _ = writeln!(out, "valuation: {}", v.join(" "));
        for msg in &self.state.messages {
            let _ = writeln!(out, "message: {}", m.render_message(msg));
        }
        out
    }
}
