//! Model checking for CTL whose until/release operators carry
//! formal-language constraints on the action word.
//!
//! The crate is organized around one pipeline: labeled transition systems
//! ([`lts`]), the automaton kinds annotations may use ([`automata`]),
//! pushdown systems with pre* saturation ([`pds`]), and the bottom-up
//! checker tying them together.

pub mod automata;
pub mod checker;
pub mod env;
pub mod logic;
pub mod lts;
pub mod pds;
pub mod text;

pub use automata::{Automaton, AutomatonError};
pub use checker::{check, check_with, witness, CheckError, CheckOptions, CheckResult, Witness};
pub use env::{Env, EnvError};
pub use logic::{Formula, LanguageRef, LogicError};
pub use lts::{Lts, LtsError};
