// SPDX-License-Identifier: MIT OR Apache-2.0

//! Expressions: tree, DSL parser, selection-strategy rewrites and the
//! reference oracle.

mod ast;
pub mod oracle;
mod parser;
pub mod strategy;

pub use ast::{registers_of, Output, Pattern, Sremo};
pub use oracle::{oracle_matches, oracle_streaming_matches, MatchSet};
pub use parser::parse_pattern;
pub use strategy::{rewrite_any, rewrite_next, Strategy};
