// SPDX-License-Identifier: MIT OR Apache-2.0

//! Complex event recognition with streaming regular expressions with output
//! and their register-transducer compilation.
//!
//! A [`expr::Pattern`] is parsed against a [`event::Schema`], compiled into an
//! [`srt::Srt`] and executed over a stream by [`engine::Engine`]. The
//! [`expr::oracle`] module gives a reference semantics used for testing.

pub mod compiler;
pub mod condition;
pub mod engine;
pub mod error;
pub mod event;
pub mod expr;
pub mod srt;
pub mod windowing;

pub use compiler::{compile, compile_with_epsilon, make_streaming, Compiled};
pub use engine::{Counters, Engine, MatchSink, Stats};
pub use error::{Error, Result};
pub use event::{read_stream, Event, Schema, Value};
pub use expr::{parse_pattern, Pattern, Strategy};
pub use srt::Srt;
