//! Built-in instances: the five worked examples and the two kite structures.

use crate::model::InteractionModel;
use crate::modelfile::ModelFile;
use crate::state::EpistemicState;

/// Three players sharing one hyperarc; nobody has spoken yet.
pub const EX1: &str = "\
# k owns p; the only hyperarc contains everyone
players: i j k
atoms: p@k
hypergraph: {i,j,k}
mode: telling
knowledge: common
valuation:
";

/// k privately told i that p holds; the hypergraph is unknown.
pub const EX2: &str = "\
players: i j k
atoms: p@k
hypergraph: {i,k}
mode: telling
knowledge: unknown
valuation: p
message: k -> {i,k} : p
";

/// i told j; j could pass p on to k only when forwarding.
pub const EX3: &str = "\
players: i j k
atoms: p@i
hypergraph: {i,j} {j,k}
mode: telling
knowledge: common
valuation: p
message: i -> {i,j} : p
";

/// The line graph l - k - j - i with p relayed from l to i.
pub const EX4: &str = "\
players: i j k l
atoms: p@l
hypergraph: {l,k} {k,j} {j,i}
mode: forwarding
knowledge: common
valuation: p
message: l -> {l,k} : p
message: k -> {k,j} : p
message: j -> {j,i} : p
";

/// Kite with two relays between n and j; p reached i through k.
pub const EX5: &str = "\
players: i j k l n
atoms: p@n
hypergraph: {n,k} {n,l} {k,j} {l,j} {j,i}
mode: forwarding
knowledge: common
valuation: p
message: n -> {n,k} : p
message: k -> {k,j} : p
message: j -> {j,i} : p
";

/// Kite where n reaches k and l with a single broadcast.
pub const FIG1A: &str = "\
players: i j k l n
atoms: p@n
hypergraph: {n,l,k} {l,j} {k,j} {j,i}
mode: forwarding
knowledge: common
valuation: p
message: n -> {n,l,k} : p
message: l -> {l,j} : p
message: j -> {j,i} : p
";

/// Names in the order the examples command and the law generator emit them.
pub const NAMES: [&str; 6] = ["ex1", "ex2", "ex3", "ex4", "ex5", "fig1a"];

/// One-line description of a built-in example.
pub fn summary(name: &str) -> Option<&'static str> {
    Some(match name {
        "ex1" => "three players sharing one hyperarc; nobody has spoken yet",
        "ex2" => "k privately told i that p holds; the hypergraph is unknown",
        "ex3" => "i told j; j could pass p on to k only when forwarding",
        "ex4" => "the line graph l - k - j - i with p relayed from l to i",
        "ex5" => "kite with two relays between n and j; p reached i through k",
        "fig1a" => "kite where n reaches k and l with a single broadcast",
        _ => return None,
    })
}

pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "ex1" => EX1,
        "ex2" => EX2,
        "ex3" => EX3,
        "ex4" => EX4,
        "ex5" => EX5,
        "fig1a" => FIG1A,
        _ => return None,
    })
}

pub fn load(name: &str) -> Option<ModelFile> {
    source(name).map(|text| ModelFile::parse(text).expect("built-in model parses"))
}

fn pair(text: &str) -> (InteractionModel, EpistemicState) {
    let f = ModelFile::parse(text).expect("built-in model parses");
    (f.model, f.state)
}

pub fn ex1() -> (InteractionModel, EpistemicState) {
    pair(EX1)
}

pub fn ex2() -> (InteractionModel, EpistemicState) {
    pair(EX2)
}

pub fn ex3() -> (InteractionModel, EpistemicState) {
    pair(EX3)
}

pub fn ex4() -> (InteractionModel, EpistemicState) {
    pair(EX4)
}

pub fn ex5() -> (InteractionModel, EpistemicState) {
    pair(EX5)
}

pub fn fig1a() -> (InteractionModel, EpistemicState) {
    pair(FIG1A)
}
