// SPDX-License-Identifier: MIT OR Apache-2.0

use std::fmt;
use std::sync::Arc;

use crate::condition::{Condition, Names};
use crate::error::{Error, Result};
use crate::event::{RegId, RegisterSet, Schema};

/// Transition output: include the event in the match or not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Output {
    Mark,
    Skip,
}

impl Output {
    pub fn symbol(self) -> &'static str {
        match self {
            Output::Mark => "•",
            Output::Skip => "⊗",
        }
    }
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sremo {
    Empty,
    Epsilon,
    Terminal {
        cond: Condition,
        output: Output,
        store: Option<RegId>,
    },
    Concat(Box<Sremo>, Box<Sremo>),
    Or(Box<Sremo>, Box<Sremo>),
    Star(Box<Sremo>),
    Windowed(Box<Sremo>, u64),
    /// Skip-till-any-match over the parts.
    Any(Vec<Sremo>),
    /// Skip-till-next-match over the parts.
    Next(Vec<Sremo>),
    Negation(Box<Sremo>),
}

impl Sremo {
    pub fn terminal(cond: Condition, output: Output, store: Option<RegId>) -> Sremo {
        Sremo::Terminal {
            cond,
            output,
            store,
        }
    }

    pub fn concat(a: Sremo, b: Sremo) -> Sremo {
        Sremo::Concat(Box::new(a), Box::new(b))
    }

    pub fn or(a: Sremo, b: Sremo) -> Sremo {
        Sremo::Or(Box::new(a), Box::new(b))
    }

    pub fn star(a: Sremo) -> Sremo {
        Sremo::Star(Box::new(a))
    }

    /// `e+` as `e · e*`.
    pub fn plus(a: Sremo) -> Sremo {
        Sremo::concat(a.clone(), Sremo::star(a))
    }

    pub fn windowed(a: Sremo, w: u64) -> Sremo {
        Sremo::Windowed(Box::new(a), w)
    }

    pub fn negation(a: Sremo) -> Sremo {
        Sremo::Negation(Box::new(a))
    }

    /// `(true ↑ ⊗)*`.
    pub fn skip_any() -> Sremo {
        Sremo::star(Sremo::terminal(Condition::True, Output::Skip, None))
    }

    /// Left-nested concatenation of a non-empty list.
    pub fn seq(parts: impl IntoIterator<Item = Sremo>) -> Sremo {
        parts
            .into_iter()
            .reduce(Sremo::concat)
            .unwrap_or(Sremo::Epsilon)
    }

    /// Registers read or written, in order of first appearance.
    pub fn registers(&self) -> Vec<RegId> {
        let mut out = Vec::new();
        self.collect_registers(&mut out);
        out
    }

    fn collect_registers(&self, out: &mut Vec<RegId>) {
        match self {
            Sremo::Empty | Sremo::Epsilon => {}
            Sremo::Terminal { cond, store, .. } => {
                cond.registers(out);
                if let Some(r) = store {
                    if !out.contains(r) {
                        out.push(*r);
                    }
                }
            }
            Sremo::Concat(a, b) | Sremo::Or(a, b) => {
                a.collect_registers(out);
                b.collect_registers(out);
            }
            Sremo::Star(a) | Sremo::Windowed(a, _) | Sremo::Negation(a) => a.collect_registers(out),
            Sremo::Any(parts) | Sremo::Next(parts) => {
                parts.iter().for_each(|p| p.collect_registers(out))
            }
        }
    }

    fn stored(&self, out: &mut Vec<RegId>) {
        match self {
            Sremo::Terminal { store: Some(r), .. } => out.push(*r),
            Sremo::Concat(a, b) | Sremo::Or(a, b) => {
                a.stored(out);
                b.stored(out);
            }
            Sremo::Star(a) | Sremo::Windowed(a, _) | Sremo::Negation(a) => a.stored(out),
            Sremo::Any(parts) | Sremo::Next(parts) => parts.iter().for_each(|p| p.stored(out)),
            _ => {}
        }
    }

    /// Sets every terminal output to skip.
    pub fn skipping(&self) -> Sremo {
        self.map_terminals(&|cond, _, store| Sremo::terminal(cond.clone(), Output::Skip, store))
    }

    pub fn map_registers(&self, f: &impl Fn(RegId) -> RegId) -> Sremo {
        self.map_terminals(&|cond, output, store| {
            Sremo::terminal(cond.map_registers(f), output, store.map(f))
        })
    }

    fn map_terminals(&self, f: &impl Fn(&Condition, Output, Option<RegId>) -> Sremo) -> Sremo {
        match self {
            Sremo::Empty => Sremo::Empty,
            Sremo::Epsilon => Sremo::Epsilon,
            Sremo::Terminal {
                cond,
                output,
                store,
            } => f(cond, *output, *store),
            Sremo::Concat(a, b) => Sremo::concat(a.map_terminals(f), b.map_terminals(f)),
            Sremo::Or(a, b) => Sremo::or(a.map_terminals(f), b.map_terminals(f)),
            Sremo::Star(a) => Sremo::star(a.map_terminals(f)),
            Sremo::Windowed(a, w) => Sremo::windowed(a.map_terminals(f), *w),
            Sremo::Negation(a) => Sremo::negation(a.map_terminals(f)),
            Sremo::Any(parts) => Sremo::Any(parts.iter().map(|p| p.map_terminals(f)).collect()),
            Sremo::Next(parts) => Sremo::Next(parts.iter().map(|p| p.map_terminals(f)).collect()),
        }
    }

    pub fn has_strategy(&self) -> bool {
        match self {
            Sremo::Any(_) | Sremo::Next(_) => true,
            Sremo::Concat(a, b) | Sremo::Or(a, b) => a.has_strategy() || b.has_strategy(),
            Sremo::Star(a) | Sremo::Windowed(a, _) | Sremo::Negation(a) => a.has_strategy(),
            _ => false,
        }
    }

    pub fn has_negation(&self) -> bool {
        match self {
            Sremo::Negation(_) => true,
            Sremo::Concat(a, b) | Sremo::Or(a, b) => a.has_negation() || b.has_negation(),
            Sremo::Star(a) | Sremo::Windowed(a, _) => a.has_negation(),
            Sremo::Any(parts) | Sremo::Next(parts) => parts.iter().any(Sremo::has_negation),
            _ => false,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + match self {
            Sremo::Concat(a, b) | Sremo::Or(a, b) => a.size() + b.size(),
            Sremo::Star(a) | Sremo::Windowed(a, _) | Sremo::Negation(a) => a.size(),
            Sremo::Any(parts) | Sremo::Next(parts) => parts.iter().map(Sremo::size).sum(),
            _ => 0,
        }
    }

    fn conditions<'a>(&'a self, out: &mut Vec<&'a Condition>) {
        match self {
            Sremo::Terminal { cond, .. } => out.push(cond),
            Sremo::Concat(a, b) | Sremo::Or(a, b) => {
                a.conditions(out);
                b.conditions(out);
            }
            Sremo::Star(a) | Sremo::Windowed(a, _) | Sremo::Negation(a) => a.conditions(out),
            Sremo::Any(parts) | Sremo::Next(parts) => parts.iter().for_each(|p| p.conditions(out)),
            _ => {}
        }
    }
}

/// Registers of `e` in order of first appearance.
pub fn registers_of(e: &Sremo) -> Vec<RegId> {
    e.registers()
}

/// An expression together with the name tables it refers to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub expr: Sremo,
    pub registers: RegisterSet,
    pub schema: Arc<Schema>,
}

impl Pattern {
    pub fn new(expr: Sremo, registers: RegisterSet, schema: Arc<Schema>) -> Pattern {
        Pattern {
            expr,
            registers,
            schema,
        }
    }

    /// Window of a top-level `within`.
    pub fn window(&self) -> Option<u64> {
        match &self.expr {
            Sremo::Windowed(_, w) => Some(*w),
            _ => None,
        }
    }

    /// Expression below a top-level window.
    pub fn body(&self) -> &Sremo {
        match &self.expr {
            Sremo::Windowed(e, _) => e,
            e => e,
        }
    }

    /// Same body under window `w`, replacing any existing one.
    pub fn with_window(&self, w: Option<u64>) -> Pattern {
        let body = self.body().clone();
        Pattern {
            expr: match w {
                Some(w) => Sremo::windowed(body, w),
                None => body,
            },
            ..self.clone()
        }
    }

    pub fn names(&self) -> Names<'_> {
        Names {
            schema: &self.schema,
            regs: &self.registers,
        }
    }

    /// Type checks conditions and rejects registers that are read but never stored,
    /// negation without a window, and windows below the top level.
    pub fn validate(&self) -> Result<()> {
        let mut conds = Vec::new();
        self.expr.conditions(&mut conds);
        for c in &conds {
            c.type_check(&self.schema)?;
        }
        let mut stored = Vec::new();
        self.expr.stored(&mut stored);
        for r in self.expr.registers() {
            if r.idx() >= self.registers.len() {
                return Err(Error::Config(format!("unknown register id {}", r.0)));
            }
            if !stored.contains(&r) {
                return Err(Error::UnstoredRegister(self.registers.name(r).to_string()));
            }
        }
        if self.body().has_window() {
            return Err(Error::Config("nested windows are not supported".into()));
        }
        if self.window().is_none() && self.expr.has_negation() {
            return Err(Error::NegationOutsideWindow);
        }
        if self.window() == Some(0) {
            return Err(Error::Config("window must be at least 1".into()));
        }
        Ok(())
    }
}

impl Sremo {
    fn has_window(&self) -> bool {
        match self {
            Sremo::Windowed(..) => true,
            Sremo::Concat(a, b) | Sremo::Or(a, b) => a.has_window() || b.has_window(),
            Sremo::Star(a) | Sremo::Negation(a) => a.has_window(),
            Sremo::Any(parts) | Sremo::Next(parts) => parts.iter().any(Sremo::has_window),
            _ => false,
        }
    }
}

/// Prints pattern DSL text that parses back to the same tree.
impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = Printer {
            names: self.names(),
        };
        match &self.expr {
            Sremo::Windowed(e, w) => {
                p.expr(e, f)?;
                write!(f, " within {w}")
            }
            e => p.expr(e, f),
        }
    }
}

struct Printer<'a> {
    names: Names<'a>,
}

impl Printer<'_> {
    fn expr(&self, e: &Sremo, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match e {
            Sremo::Or(a, b) => {
                self.expr(a, f)?;
                f.write_str(" | ")?;
                self.wrapped(b, matches!(**b, Sremo::Or(..)), f)
            }
            Sremo::Concat(a, b) => {
                self.wrapped(a, matches!(**a, Sremo::Or(..)), f)?;
                f.write_str(" ; ")?;
                self.wrapped(b, matches!(**b, Sremo::Or(..) | Sremo::Concat(..)), f)
            }
            Sremo::Star(a) => {
                self.wrapped(a, matches!(**a, Sremo::Or(..) | Sremo::Concat(..)), f)?;
                f.write_str("*")
            }
            Sremo::Negation(a) => {
                f.write_str("!")?;
                self.wrapped(
                    a,
                    matches!(**a, Sremo::Or(..) | Sremo::Concat(..) | Sremo::Star(..)),
                    f,
                )
            }
            Sremo::Empty => f.write_str("none"),
            Sremo::Epsilon => f.write_str("eps"),
            Sremo::Terminal {
                cond,
                output,
                store,
            } => {
                write!(f, "{{{}}}", cond.display(self.names))?;
                f.write_str(match output {
                    Output::Mark => ":mark",
                    Output::Skip => ":skip",
                })?;
                if let Some(r) = store {
                    write!(f, "->{}", self.names.regs.name(*r))?;
                }
                Ok(())
            }
            Sremo::Any(parts) | Sremo::Next(parts) => {
                f.write_str(if matches!(e, Sremo::Any(_)) {
                    "any("
                } else {
                    "next("
                })?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    self.expr(p, f)?;
                }
                f.write_str(")")
            }
            Sremo::Windowed(a, w) => {
                f.write_str("(")?;
                self.expr(a, f)?;
                write!(f, " within {w})")
            }
        }
    }

    fn wrapped(&self, e: &Sremo, paren: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if paren {
            f.write_str("(")?;
            self.expr(e, f)?;
            f.write_str(")")
        } else {
            self.expr(e, f)
        }
    }
}
