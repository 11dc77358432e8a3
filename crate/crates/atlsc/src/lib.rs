//! Model checking for alternating-time temporal logic with strategy contexts
//! (ATLsc), interpreted over concurrent game structures with partial
//! observation.
//!
//! The crate ships two independent decision routes for the memoryless
//! fragment and a bounded-memory route for the full logic:
//!
//! * [`strategy`] enumerates strategy tables directly on the game and checks
//!   the resulting pruned systems, producing witness strategies.
//! * [`reduce`] compiles a game and formula into a plain Kripke structure and
//!   a quantified CTL* formula, which [`qctl`] decides by propositional
//!   labeling enumeration over an automaton-based CTL* core.
//!
//! Agreement between the two routes is the main correctness argument, and the
//! integration tests exercise it on randomized inputs.
//!
//! Games are described in a small text format (see [`game::Cgso::parse`]),
//! formulas in a one-line grammar (see [`logic`]). The `atlsc` binary exposes
//! the same operations as subcommands; the `examples/` directory shows each
//! capability as a runnable program.

pub mod atoms;
mod automata;
mod bitset;
pub mod game;
pub mod gen;
pub mod kripke;
pub mod logic;
pub mod qctl;
pub mod reduce;
pub mod report;
pub mod strategy;

pub use game::{AgentId, Cgso, MoveId, StateId};
pub use kripke::KripkeStructure;
