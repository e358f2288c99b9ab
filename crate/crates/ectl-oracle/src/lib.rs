//! Reference implementations and instance generators used only for
//! differential testing of the main crate. Everything here is deliberately
//! naive — explicit configuration sets, plain fixpoints, brute-force
//! searches — and shares no automaton-run or saturation code with the
//! engines it cross-checks.

use thiserror::Error;

pub mod bounded;
pub mod corpus;
pub mod ctl_fix;
pub mod families;
pub mod gen;
pub mod pds_brute;
pub mod product;
pub mod run;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("automaton `{name}` is missing its initial state or bottom marker")]
    BadAutomaton { name: String },
    #[error("automaton `{name}` has a kind this reference check does not cover")]
    UnsupportedKind { name: String },
    #[error("`{formula}` carries an annotated operator; this reference check only covers the plain fragment")]
    AnnotatedOperator { formula: String },
    #[error("unknown proposition `{name}`")]
    UnknownProposition { name: String },
    #[error("`{formula}` is not in the desugared core")]
    NotCore { formula: String },
    #[error("tiling instance (width {n}, {tiles} tiles) is beyond the micro scale this generator covers")]
    AboveMicroScale { n: usize, tiles: usize },
}
