//! Knowledge and common knowledge among players who broadcast facts over a
//! communication hypergraph.
//!
//! Two message semantics are supported: *telling*, where players broadcast
//! only the atoms they own, and *forwarding*, where they may pass on atoms they
//! learned provided each message has an explanation. The hypergraph is either
//! common knowledge or unknown, the latter evaluated over the complete
//! hypergraph.
//!
//! * [`model`] and [`state`] hold the domain types and legality checks.
//! * [`explain`] decides explainability and builds canonical completions.
//! * [`formula`] parses, renders and classifies formulas.
//! * [`semantics`] enumerates state spaces and evaluates formulas exactly,
//!   under a message bound, or through the positive-fragment fast path.
//! * [`laws`] checks the structural laws of the logic on generated
//!   instances.

pub mod builtin;
pub mod cli;
pub mod explain;
pub mod formula;
pub mod laws;
pub mod model;
pub mod modelfile;
pub mod semantics;
pub mod state;

pub use formula::{Formula, FormulaError, Fragment, FragmentFlags};
pub use model::{
    build_model, AtomId, Hyperarc, InteractionModel, Knowledge, Message, Mode, ModelError, PlayerId,
};
pub use modelfile::ModelFile;
pub use semantics::{SemanticsError, Session, StateSpace, Verdict3};
pub use state::EpistemicState;
