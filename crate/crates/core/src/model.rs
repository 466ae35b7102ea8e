//! Interaction structures: players, privately owned atoms and the hypergraph
//! of broadcast audiences.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense player index into [`InteractionModel::players`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlayerId(pub u32);

impl PlayerId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Dense atom index into [`InteractionModel::atoms`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AtomId(pub u32);

impl AtomId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A non-empty audience. Members are kept sorted and deduplicated, so the
/// derived ordering compares sorted member lists lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Hyperarc(Vec<PlayerId>);

impl Hyperarc {
    pub fn new(members: impl IntoIterator<Item = PlayerId>) -> Result<Self, ModelError> {
        let members: BTreeSet<PlayerId> = members.into_iter().collect();
        if members.is_empty() {
            return Err(ModelError::EmptyHyperarc);
        }
        Ok(Hyperarc(members.into_iter().collect()))
    }

    pub fn members(&self) -> &[PlayerId] {
        &self.0
    }

    pub fn contains(&self, player: PlayerId) -> bool {
        self.0.binary_search(&player).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `true` iff every player of `group` is a member.
    pub fn covers(&self, group: &[PlayerId]) -> bool {
        group.iter().all(|&p| self.contains(p))
    }
}

/// A broadcast `(sender, arc, atom)`. Field order gives the global message order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Message {
    pub sender: PlayerId,
    pub arc: Hyperarc,
    pub atom: AtomId,
}

impl Message {
    pub fn new(sender: PlayerId, arc: Hyperarc, atom: AtomId) -> Self {
        Message { sender, arc, atom }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// Players broadcast only the atoms they own.
    Telling,
    /// Players may also pass on atoms they learned, given an explanation.
    Forwarding,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Knowledge {
    /// The hypergraph is common knowledge.
    Common,
    /// Players only know their own hyperarcs; evaluated over the complete hypergraph.
    Unknown,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Telling => "telling",
            Mode::Forwarding => "forwarding",
        })
    }
}

impl fmt::Display for Knowledge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Knowledge::Common => "common",
            Knowledge::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("unknown player `{0}`")]
    UnknownPlayer(String),
    #[error("empty hyperarc")]
    EmptyHyperarc,
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("model too large: {0}")]
    TooLarge(String),
}

/// Largest player count for which the complete hypergraph is materialised.
pub const MAX_PLAYERS: usize = 16;
/// Atom sets are stored as 64-bit masks.
pub const MAX_ATOMS: usize = 64;

/// A validated interaction structure together with its semantics flags.
///
/// The message universe is computed once at construction, in the global
/// message order, and indexed for O(1) lookup.
#[derive(Clone, Debug)]
pub struct InteractionModel {
    players: Vec<String>,
    atoms: Vec<String>,
    owners: Vec<PlayerId>,
    hypergraph: Vec<Hyperarc>,
    effective: Vec<Hyperarc>,
    mode: Mode,
    knowledge: Knowledge,
    universe: Vec<Message>,
    universe_index: HashMap<Message, usize>,
}

impl PartialEq for InteractionModel {
    fn eq(&self, other: &Self) -> bool {
        self.players == other.players
            && self.atoms == other.atoms
            && self.owners == other.owners
            && self.hypergraph == other.hypergraph
            && self.mode == other.mode
            && self.knowledge == other.knowledge
    }
}

impl Eq for InteractionModel {}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Builds and validates a model from symbolic names.
///
/// `atom_owners` pairs each atom name with its owner's name, in declaration
/// order; `hyperarcs` lists member names per arc.
pub fn build_model<S: AsRef<str>>(
    players: &[S],
    atom_owners: &[(S, S)],
    hyperarcs: &[Vec<S>],
    mode: Mode,
    knowledge: Knowledge,
) -> Result<InteractionModel, ModelError> {
    let mut seen: HashMap<&str, ()> = HashMap::new();
    let mut lookup: HashMap<&str, PlayerId> = HashMap::new();
    for (idx, name) in players.iter().enumerate() {
        let name = name.as_ref();
        if !is_identifier(name) {
            return Err(ModelError::InvalidName(name.to_string()));
        }
        if seen.insert(name, ()).is_some() {
            return Err(ModelError::DuplicateName(name.to_string()));
        }
        lookup.insert(name, PlayerId(idx as u32));
    }
    let player_of = |name: &str| {
        lookup
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownPlayer(name.to_string()))
    };

    let mut atoms = Vec::with_capacity(atom_owners.len());
    let mut owners = Vec::with_capacity(atom_owners.len());
    for (atom, owner) in atom_owners {
        let atom = atom.as_ref();
        if !is_identifier(atom) {
            return Err(ModelError::InvalidName(atom.to_string()));
        }
        if seen.insert(atom, ()).is_some() {
            return Err(ModelError::DuplicateName(atom.to_string()));
        }
        owners.push(player_of(owner.as_ref())?);
        atoms.push(atom.to_string());
    }

    let mut arcs = Vec::with_capacity(hyperarcs.len());
    for arc in hyperarcs {
        let members = arc
            .iter()
            .map(|m| player_of(m.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        arcs.push(Hyperarc::new(members)?);
    }

    InteractionModel::from_parts(
        players.iter().map(|p| p.as_ref().to_string()).collect(),
        atoms,
        owners,
        arcs,
        mode,
        knowledge,
    )
}

impl InteractionModel {
    /// Constructor over already-resolved ids.
    pub fn from_parts(
        players: Vec<String>,
        atoms: Vec<String>,
        owners: Vec<PlayerId>,
        hypergraph: Vec<Hyperarc>,
        mode: Mode,
        knowledge: Knowledge,
    ) -> Result<Self, ModelError> {
        let n = players.len();
        if atoms.len() > MAX_ATOMS {
            return Err(ModelError::TooLarge(format!(
                "{} atoms (at most {MAX_ATOMS})",
                atoms.len()
            )));
        }
        if knowledge == Knowledge::Unknown && n > MAX_PLAYERS {
            return Err(ModelError::TooLarge(format!(
                "complete hypergraph over {n} players"
            )));
        }
        if n > 64 {
            return Err(ModelError::TooLarge(format!("{n} players (at most 64)")));
        }
        for owner in &owners {
            if owner.index() >= n {
                return Err(ModelError::UnknownPlayer(format!("#{}", owner.0)));
            }
        }
        for arc in &hypergraph {
            if arc.is_empty() {
                return Err(ModelError::EmptyHyperarc);
            }
            if let Some(bad) = arc.members().iter().find(|p| p.index() >= n) {
                return Err(ModelError::UnknownPlayer(format!("#{}", bad.0)));
            }
        }
        let hypergraph: Vec<Hyperarc> = hypergraph
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let effective = match knowledge {
            Knowledge::Common => hypergraph.clone(),
            Knowledge::Unknown => complete_hypergraph(n),
        };
        let mut model = InteractionModel {
            players,
            atoms,
            owners,
            hypergraph,
            effective,
            mode,
            knowledge,
            universe: Vec::new(),
            universe_index: HashMap::new(),
        };
        model.universe = model.compute_universe();
        model.universe_index = model
            .universe
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        Ok(model)
    }

    fn compute_universe(&self) -> Vec<Message> {
        let mut out = Vec::new();
        for arc in &self.effective {
            for &sender in arc.members() {
                for (a, &owner) in self.owners.iter().enumerate() {
                    if self.mode == Mode::Telling && owner != sender {
                        continue;
                    }
                    out.push(Message::new(sender, arc.clone(), AtomId(a as u32)));
                }
            }
        }
        out.sort();
        out
    }

    /// Same structure under a different knowledge assumption.
    pub fn with_knowledge(&self, knowledge: Knowledge) -> InteractionModel {
        if knowledge == self.knowledge {
            return self.clone();
        }
        InteractionModel::from_parts(
            self.players.clone(),
            self.atoms.clone(),
            self.owners.clone(),
            self.hypergraph.clone(),
            self.mode,
            knowledge,
        )
        .expect("re-validating a valid model")
    }

    /// Same structure under a different message semantics.
    pub fn with_mode(&self, mode: Mode) -> InteractionModel {
        if mode == self.mode {
            return self.clone();
        }
        InteractionModel::from_parts(
            self.players.clone(),
            self.atoms.clone(),
            self.owners.clone(),
            self.hypergraph.clone(),
            mode,
            self.knowledge,
        )
        .expect("re-validating a valid model")
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn players(&self) -> impl Iterator<Item = PlayerId> + '_ {
        (0..self.players.len() as u32).map(PlayerId)
    }

    pub fn atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        (0..self.atoms.len() as u32).map(AtomId)
    }

    pub fn player_name(&self, p: PlayerId) -> &str {
        &self.players[p.index()]
    }

    pub fn atom_name(&self, a: AtomId) -> &str {
        &self.atoms[a.index()]
    }

    pub fn player_by_name(&self, name: &str) -> Option<PlayerId> {
        self.players
            .iter()
            .position(|p| p == name)
            .map(|i| PlayerId(i as u32))
    }

    pub fn atom_by_name(&self, name: &str) -> Option<AtomId> {
        self.atoms
            .iter()
            .position(|a| a == name)
            .map(|i| AtomId(i as u32))
    }

    pub fn owner(&self, atom: AtomId) -> PlayerId {
        self.owners[atom.index()]
    }

    pub fn owns(&self, player: PlayerId, atom: AtomId) -> bool {
        self.owner(atom) == player
    }

    /// Atoms of `player`, in declaration order.
    pub fn atoms_of(&self, player: PlayerId) -> impl Iterator<Item = AtomId> + '_ {
        self.atoms().filter(move |&a| self.owner(a) == player)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn knowledge(&self) -> Knowledge {
        self.knowledge
    }

    /// The declared hypergraph, canonically ordered.
    pub fn hypergraph(&self) -> &[Hyperarc] {
        &self.hypergraph
    }

    /// The hypergraph used for evaluation: the declared one, or the complete
    /// hypergraph when the structure is unknown to the players.
    pub fn effective_hypergraph(&self) -> &[Hyperarc] {
        &self.effective
    }

    /// Every legal message, in the global message order.
    pub fn message_universe(&self) -> &[Message] {
        &self.universe
    }

    pub fn message_index(&self, m: &Message) -> Option<usize> {
        self.universe_index.get(m).copied()
    }

    pub fn player_names(&self) -> &[String] {
        &self.players
    }

    pub fn atom_names(&self) -> &[String] {
        &self.atoms
    }

    pub fn render_arc(&self, arc: &Hyperarc) -> String {
        let names: Vec<&str> = arc.members().iter().map(|&p| self.player_name(p)).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn render_message(&self, m: &Message) -> String {
        format!(
            "{} -> {} : {}",
            self.player_name(m.sender),
            self.render_arc(&m.arc),
            self.atom_name(m.atom)
        )
    }

    /// Resolves `[a, b, ...]` player names into a hyperarc.
    pub fn arc_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Hyperarc, ModelError> {
        let ids = names
            .iter()
            .map(|n| {
                self.player_by_name(n.as_ref())
                    .ok_or_else(|| ModelError::UnknownPlayer(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Hyperarc::new(ids)
    }
}

/// All non-empty subsets of `n` players, in canonical order.
pub fn complete_hypergraph(n: usize) -> Vec<Hyperarc> {
    let mut arcs: Vec<Hyperarc> = (1u64..(1u64 << n))
        .map(|mask| {
            Hyperarc(
                (0..n as u32)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(PlayerId)
                    .collect(),
            )
        })
        .collect();
    arcs.sort();
    arcs
}
