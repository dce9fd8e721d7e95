// SPDX-License-Identifier: MIT OR Apache-2.0

//! Selection strategies as expression rewrites.

use super::ast::{Output, Pattern, Sremo};
use crate::error::{Error, Result};

/// Contiguity regime applied to a top-level sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Strict,
    Any,
    Next,
}

/// Skip-till-any-match: `e1 · (⊤↑⊗)* · e2 · … · en`.
pub fn rewrite_any(parts: Vec<Sremo>) -> Sremo {
    let mut it = parts.into_iter();
    let mut out = it.next().expect("strategy needs at least one part");
    for p in it {
        out = Sremo::concat(Sremo::concat(out, Sremo::skip_any()), p);
    }
    out
}

/// Skip-till-next-match: `e1 · (!e2)* · e2 · … · (!en)* · en`.
///
/// A terminal part `{φ}` negates logically to `{¬φ}:skip`. Any other part
/// needs the complement construction and therefore a window.
pub fn rewrite_next(parts: Vec<Sremo>, windowed: bool) -> Result<Sremo> {
    let mut it = parts.into_iter();
    let mut out = it.next().expect("strategy needs at least one part");
    for p in it {
        let gap = match &p {
            Sremo::Terminal { cond, .. } => {
                Sremo::terminal(cond.clone().negated(), Output::Skip, None)
            }
            _ if windowed => Sremo::negation(p.skipping()),
            _ => return Err(Error::UnsupportedNegation),
        };
        out = Sremo::concat(Sremo::concat(out, Sremo::star(gap)), p);
    }
    Ok(out)
}

/// Replaces every strategy node by its rewrite.
pub fn desugar(e: &Sremo, windowed: bool) -> Result<Sremo> {
    Ok(match e {
        Sremo::Any(parts) => rewrite_any(desugar_all(parts, windowed)?),
        Sremo::Next(parts) => rewrite_next(desugar_all(parts, windowed)?, windowed)?,
        Sremo::Concat(a, b) => Sremo::concat(desugar(a, windowed)?, desugar(b, windowed)?),
        Sremo::Or(a, b) => Sremo::or(desugar(a, windowed)?, desugar(b, windowed)?),
        Sremo::Star(a) => Sremo::star(desugar(a, windowed)?),
        Sremo::Windowed(a, w) => Sremo::windowed(desugar(a, true)?, *w),
        Sremo::Negation(a) => Sremo::negation(desugar(a, windowed)?),
        other => other.clone(),
    })
}

fn desugar_all(parts: &[Sremo], windowed: bool) -> Result<Vec<Sremo>> {
    parts.iter().map(|p| desugar(p, windowed)).collect()
}

fn flatten_seq(e: &Sremo, out: &mut Vec<Sremo>) {
    match e {
        Sremo::Concat(a, b) => {
            flatten_seq(a, out);
            flatten_seq(b, out);
        }
        other => out.push(other.clone()),
    }
}

impl Pattern {
    /// Pattern with all strategy nodes rewritten.
    pub fn desugared(&self) -> Result<Pattern> {
        Ok(Pattern {
            expr: desugar(&self.expr, false)?,
            ..self.clone()
        })
    }

    /// Applies `strategy` to the top-level sequence when the pattern names none.
    /// A top-level disjunction is left alone.
    pub fn with_strategy(&self, strategy: Strategy) -> Pattern {
        if strategy == Strategy::Strict || self.expr.has_strategy() {
            return self.clone();
        }
        let mut parts = Vec::new();
        flatten_seq(self.body(), &mut parts);
        if parts.len() < 2 {
            return self.clone();
        }
        let body = match strategy {
            Strategy::Any => Sremo::Any(parts),
            _ => Sremo::Next(parts),
        };
        Pattern {
            expr: match self.window() {
                Some(w) => Sremo::windowed(body, w),
                None => body,
            },
            ..self.clone()
        }
    }
}
