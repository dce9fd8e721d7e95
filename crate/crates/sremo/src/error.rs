// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    #[error("register `{0}` is read but never stored")]
    UnstoredRegister(String),

    #[error("negation is only allowed inside a windowed pattern")]
    NegationOutsideWindow,

    #[error("unsupported negation: `next` over a non-terminal part requires a window")]
    UnsupportedNegation,

    #[error("window required for determinization")]
    WindowRequired,

    #[error("minterm explosion at state {state}: {size} base conditions exceed the cap of {cap}")]
    MintermExplosion {
        state: String,
        size: usize,
        cap: usize,
    },

    #[error("automaton too large: {states} states, {transitions} transitions (caps {max_states}/{max_transitions})")]
    SizeExplosion {
        states: usize,
        transitions: usize,
        max_states: usize,
        max_transitions: usize,
    },

    #[error("oracle scale exceeded: stream length {len} above cap {cap}")]
    OracleCap { len: usize, cap: usize },

    #[error("automaton is not deterministic")]
    NotDeterministic,

    #[error("automaton is output-agnostic and cannot enumerate matches")]
    OutputAgnostic,

    #[error("automaton has epsilon transitions; eliminate them first")]
    EpsilonTransitions,

    #[error("out-of-order event: expected index {expected}, got {got}")]
    OutOfOrder { expected: u64, got: u64 },

    #[error("logic error: {0}")]
    Logic(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("stream error at row {row}: {msg}")]
    Stream { row: u64, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
