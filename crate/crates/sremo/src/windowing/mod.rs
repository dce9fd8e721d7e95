// SPDX-License-Identifier: MIT OR Apache-2.0

//! Window unrolling, output-agnostic determinization and complement.

mod complement;
mod determinize;
mod unroll;

pub use complement::complement;
pub use determinize::{
    determinize, determinize_srt, determinize_with, is_deterministic, is_deterministic_on,
    DeterminizeOptions,
};
pub use unroll::{unroll, unroll_capped, Caps, Unrolled};
