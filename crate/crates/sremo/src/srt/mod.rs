// SPDX-License-Identifier: MIT OR Apache-2.0

//! Symbolic register transducers.

mod epsilon;
mod matcher;

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::condition::{Guard, Names};
use crate::error::{Error, Result};
use crate::event::{Event, RegId, RegisterSet, Schema, Valuation};
use crate::expr::Output;

pub use epsilon::eliminate_epsilon;
pub use matcher::{
    accepts, count_runs, derivations, exhaustive_matches, exhaustive_matches_from, Acceptance,
};

pub type StateId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub source: StateId,
    pub target: StateId,
    pub guard: Guard,
    pub output: Output,
    /// Sorted, duplicate-free.
    pub writes: Vec<RegId>,
}

/// Automaton with states `0..num_states`.
#[derive(Debug, Clone)]
pub struct Srt {
    pub schema: Arc<Schema>,
    pub registers: RegisterSet,
    pub start: StateId,
    finals: Vec<bool>,
    transitions: Vec<Transition>,
    out: Vec<Vec<usize>>,
    output_agnostic: bool,
}

/// Cursor (next index to read), state and register contents.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub cursor: u64,
    pub state: StateId,
    pub valuation: Valuation,
}

/// A successor chain: `configs[i] --transitions[i]--> configs[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub configs: Vec<Configuration>,
    pub transitions: Vec<usize>,
}

impl Srt {
    /// Automaton with a single, non-final start state.
    pub fn new(schema: Arc<Schema>, registers: RegisterSet) -> Srt {
        Srt {
            schema,
            registers,
            start: 0,
            finals: vec![false],
            transitions: Vec::new(),
            out: vec![Vec::new()],
            output_agnostic: false,
        }
    }

    pub fn add_state(&mut self) -> StateId {
        self.finals.push(false);
        self.out.push(Vec::new());
        (self.finals.len() - 1) as StateId
    }

    pub fn set_final(&mut self, q: StateId, is_final: bool) {
        self.finals[q as usize] = is_final;
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.finals[q as usize]
    }

    pub fn finals(&self) -> impl Iterator<Item = StateId> + '_ {
        self.finals
            .iter()
            .enumerate()
            .filter(|(_, f)| **f)
            .map(|(q, _)| q as StateId)
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        0..self.finals.len() as StateId
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, i: usize) -> &Transition {
        &self.transitions[i]
    }

    /// Indices of the transitions leaving `q`, in declaration order.
    pub fn outgoing_ids(&self, q: StateId) -> &[usize] {
        &self.out[q as usize]
    }

    pub fn outgoing(&self, q: StateId) -> impl Iterator<Item = &Transition> {
        self.out[q as usize].iter().map(|&i| &self.transitions[i])
    }

    /// Adds a transition. Writes are sorted and deduplicated.
    pub fn add_transition(
        &mut self,
        source: StateId,
        target: StateId,
        guard: Guard,
        output: Output,
        mut writes: Vec<RegId>,
    ) {
        writes.sort();
        writes.dedup();
        debug_assert!(!guard.is_epsilon() || (writes.is_empty() && output == Output::Skip));
        debug_assert!(writes.iter().all(|r| r.idx() < self.registers.len()));
        debug_assert!(
            (source as usize) < self.num_states() && (target as usize) < self.num_states()
        );
        self.out[source as usize].push(self.transitions.len());
        self.transitions.push(Transition {
            source,
            target,
            guard,
            output,
            writes,
        });
    }

    pub fn add_epsilon(&mut self, source: StateId, target: StateId) {
        self.add_transition(source, target, Guard::Epsilon, Output::Skip, Vec::new());
    }

    pub fn has_epsilon(&self) -> bool {
        self.transitions.iter().any(|t| t.guard.is_epsilon())
    }

    /// Output-agnostic automata decide acceptance only; their outputs carry no marks.
    pub fn is_output_agnostic(&self) -> bool {
        self.output_agnostic
    }

    pub fn set_output_agnostic(&mut self, flag: bool) {
        self.output_agnostic = flag;
    }

    pub fn names(&self) -> Names<'_> {
        Names {
            schema: &self.schema,
            regs: &self.registers,
        }
    }

    /// Initial configuration with empty registers.
    pub fn initial(&self) -> Configuration {
        Configuration {
            cursor: 1,
            state: self.start,
            valuation: Valuation::empty(self.registers.len()),
        }
    }

    /// All successors of `c`: epsilon moves, plus moves consuming `t` when present.
    pub fn successors<'a>(
        &'a self,
        c: &Configuration,
        t: Option<&Arc<Event>>,
    ) -> Vec<(Configuration, &'a Transition)> {
        let mut out = Vec::new();
        for tr in self.outgoing(c.state) {
            if tr.guard.is_epsilon() {
                out.push((
                    Configuration {
                        cursor: c.cursor,
                        state: tr.target,
                        valuation: c.valuation.clone(),
                    },
                    tr,
                ));
            } else if let Some(t) = t {
                if tr.guard.eval(t, &c.valuation) {
                    let valuation = if tr.writes.is_empty() {
                        c.valuation.clone()
                    } else {
                        c.valuation
                            .update(&tr.writes, t)
                            .expect("writes checked on insertion")
                    };
                    out.push((
                        Configuration {
                            cursor: c.cursor + 1,
                            state: tr.target,
                            valuation,
                        },
                        tr,
                    ));
                }
            }
        }
        out
    }

    /// Whether a run ends in a final state. Under [`Acceptance::MarkedFinal`] the
    /// last consuming transition must also mark.
    pub fn run_is_accepting(&self, run: &Run, mode: Acceptance) -> bool {
        let Some(last) = run.configs.last() else {
            return false;
        };
        if run.transitions.is_empty() || !self.is_final(last.state) {
            return false;
        }
        match mode {
            Acceptance::Final => true,
            Acceptance::MarkedFinal => run
                .transitions
                .iter()
                .rev()
                .map(|&i| &self.transitions[i])
                .find(|t| !t.guard.is_epsilon())
                .is_some_and(|t| t.output == Output::Mark),
        }
    }

    /// Keeps the states flagged in `keep` (the start state always), renumbered in order.
    pub fn retain_states(&self, keep: &[bool]) -> Srt {
        let mut map = vec![None; self.num_states()];
        let mut next = Srt::new(self.schema.clone(), self.registers.clone());
        next.output_agnostic = self.output_agnostic;
        map[self.start as usize] = Some(0);
        next.set_final(0, self.is_final(self.start));
        for q in self.states() {
            if q != self.start && keep[q as usize] {
                let n = next.add_state();
                next.set_final(n, self.is_final(q));
                map[q as usize] = Some(n);
            }
        }
        for t in &self.transitions {
            if let (Some(s), Some(d)) = (map[t.source as usize], map[t.target as usize]) {
                next.add_transition(s, d, t.guard.clone(), t.output, t.writes.clone());
            }
        }
        next
    }

    /// States reachable from the start.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.start];
        seen[self.start as usize] = true;
        while let Some(q) = stack.pop() {
            for t in self.outgoing(q) {
                if !seen[t.target as usize] {
                    seen[t.target as usize] = true;
                    stack.push(t.target);
                }
            }
        }
        seen
    }

    /// States from which a final state is reachable.
    pub fn coreachable(&self) -> Vec<bool> {
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); self.num_states()];
        for t in &self.transitions {
            rev[t.target as usize].push(t.source);
        }
        let mut seen = self.finals.clone();
        let mut stack: Vec<StateId> = self.finals().collect();
        while let Some(q) = stack.pop() {
            for &p in &rev[q as usize] {
                if !seen[p as usize] {
                    seen[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Drops states that are unreachable or cannot reach a final state.
    pub fn trim(&self) -> Srt {
        let (r, c) = (self.reachable(), self.coreachable());
        let keep: Vec<bool> = r.iter().zip(&c).map(|(a, b)| *a && *b).collect();
        self.retain_states(&keep)
    }

    /// Same automaton with register ids mapped through `f` into `registers`.
    pub fn with_registers(&self, registers: RegisterSet, f: &impl Fn(RegId) -> RegId) -> Srt {
        let mut next = self.clone();
        next.registers = registers;
        for t in next.transitions.iter_mut() {
            t.guard = t.guard.map_registers(f);
            t.writes = t.writes.iter().map(|r| f(*r)).collect();
            t.writes.sort();
        }
        next
    }

    /// Structure up to state renaming: states numbered in breadth-first order
    /// from the start, exploring transitions sorted by label.
    pub fn canonical_form(&self) -> CanonicalForm {
        let names = self.names();
        let label = |t: &Transition| {
            format!(
                "{}|{}|{:?}",
                t.guard.display(names),
                t.output.symbol(),
                t.writes
            )
        };
        let mut id = vec![None; self.num_states()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.start]);
        id[self.start as usize] = Some(0u32);
        let mut discovered = 1u32;
        while let Some(q) = queue.pop_front() {
            order.push(q);
            let mut outs: Vec<&Transition> = self.outgoing(q).collect();
            outs.sort_by_key(|t| label(t));
            for t in outs {
                if id[t.target as usize].is_none() {
                    id[t.target as usize] = Some(discovered);
                    discovered += 1;
                    queue.push_back(t.target);
                }
            }
        }
        let mut edges: Vec<(u32, String, u32)> = self
            .transitions
            .iter()
            .filter_map(|t| Some((id[t.source as usize]?, label(t), id[t.target as usize]?)))
            .collect();
        edges.sort();
        CanonicalForm {
            finals: order.iter().map(|&q| self.is_final(q)).collect(),
            edges,
        }
    }

    pub fn is_isomorphic(&self, other: &Srt) -> bool {
        self.canonical_form() == other.canonical_form()
    }

    /// Graphviz rendering. Final states are drawn as double circles.
    pub fn to_dot(&self) -> String {
        let names = self.names();
        let mut s = String::from("digraph srt {\n  rankdir=LR;\n  __start [shape=point];\n");
        let _ = writeln!(s, "  __start -> q{};", self.start);
        for q in self.states() {
            let shape = if self.is_final(q) {
                "doublecircle"
            } else {
                "circle"
            };
            let _ = writeln!(s, "  q{q} [shape={shape}];");
        }
        for t in &self.transitions {
            let writes: Vec<&str> = t.writes.iter().map(|r| self.registers.name(*r)).collect();
            let label = format!(
                "{} ↑ {} ↓ {{{}}}",
                t.guard.display(names),
                t.output.symbol(),
                writes.join(",")
            );
            let _ = writeln!(
                s,
                "  q{} -> q{} [label=\"{}\"];",
                t.source,
                t.target,
                label.replace('\\', "\\\\").replace('"', "\\\"")
            );
        }
        s.push_str("}\n");
        s
    }

    pub(crate) fn require_epsilon_free(&self) -> Result<()> {
        if self.has_epsilon() {
            Err(Error::EpsilonTransitions)
        } else {
            Ok(())
        }
    }
}

/// Comparable shape produced by [`Srt::canonical_form`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub finals: Vec<bool>,
    pub edges: Vec<(u32, String, u32)>,
}
