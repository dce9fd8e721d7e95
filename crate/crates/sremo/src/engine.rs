// SPDX-License-Identifier: MIT OR Apache-2.0

//! Streaming run management over an epsilon-free streaming automaton.
//!
//! Each active run holds a state, a valuation and the indices it marked. For
//! every event, runs are visited in creation order; a run with no successor is
//! discarded, the first successor updates it in place and every further
//! successor updates a clone appended after all existing runs. A run that reaches a final state through
//! a marking transition reports its marks and is removed.
//!
//! Before running, every marking transition into a final state is duplicated
//! into a fresh accepting sink and the original final states stop being final.
//! A run can then be killed on acceptance while its twin keeps extending.

use std::collections::hash_map::Entry;
use std::hash::{Hash, Hasher};

use rustc_hash::{FxHashMap, FxHashSet, FxHasher};
use std::sync::Arc;

use crate::compiler::Compiled;
use crate::error::{Error, Result};
use crate::event::{Event, Valuation};
use crate::expr::Output;
use crate::srt::{Srt, StateId, Transition};

/// A candidate match in progress.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub state: StateId,
    pub valuation: Valuation,
    pub marked: Vec<u64>,
    pub created_at: u64,
}

/// Cost-model instrumentation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub predicate_evaluations: u64,
    pub run_clones: u64,
    pub run_updates: u64,
    /// Includes the initial run.
    pub runs_created: u64,
    /// Runs dropped for lack of successors, by the window, or as duplicates.
    pub runs_discarded: u64,
    /// Runs removed after reporting a match.
    pub runs_completed: u64,
    pub matches_emitted: u64,
}

/// Read-out of [`Engine::stats`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stats {
    pub counters: Counters,
    pub active_runs: usize,
}

/// Receives `(detection index, sorted marked indices)` per match.
pub trait MatchSink {
    fn emit(&mut self, detection: u64, indices: &[u64]);
}

impl<F: FnMut(u64, &[u64])> MatchSink for F {
    fn emit(&mut self, detection: u64, indices: &[u64]) {
        self(detection, indices)
    }
}

/// Engine state for one stream.
#[derive(Debug, Clone)]
pub struct Engine {
    srt: Srt,
    accept: StateId,
    window: Option<u64>,
    active: Vec<Run>,
    counters: Counters,
    cursor: u64,
    seen: FxHashMap<u64, usize>,
    emitted: FxHashSet<Vec<u64>>,
    fired: Vec<usize>,
}

impl Engine {
    pub fn new(compiled: &Compiled) -> Result<Engine> {
        Engine::with_window(&compiled.srt, compiled.window)
    }

    /// Initial state: one run at the start state with empty registers.
    pub fn with_window(srt: &Srt, window: Option<u64>) -> Result<Engine> {
        if srt.has_epsilon() {
            return Err(Error::EpsilonTransitions);
        }
        if srt.is_output_agnostic() {
            return Err(Error::OutputAgnostic);
        }
        let (srt, accept) = split_accepting(srt);
        Ok(Engine {
            active: vec![Run {
                state: srt.start,
                valuation: Valuation::empty(srt.registers.len()),
                marked: Vec::new(),
                created_at: 0,
            }],
            srt,
            accept,
            window,
            counters: Counters {
                runs_created: 1,
                ..Counters::default()
            },
            cursor: 0,
            seen: FxHashMap::default(),
            emitted: FxHashSet::default(),
            fired: Vec::new(),
        })
    }

    pub fn window(&self) -> Option<u64> {
        self.window
    }

    pub fn cursor(&self) -> u64 {
        self.cursor
    }

    pub fn active(&self) -> &[Run] {
        &self.active
    }

    /// The automaton actually executed, with the accepting sink.
    pub fn automaton(&self) -> &Srt {
        &self.srt
    }

    pub fn stats(&self) -> Stats {
        Stats {
            counters: self.counters,
            active_runs: self.active.len(),
        }
    }

    /// Consumes the next event and returns the matches it completes.
    pub fn advance(&mut self, t: &Arc<Event>) -> Result<Vec<(u64, Vec<u64>)>> {
        let mut out = Vec::new();
        self.advance_into(t, &mut |d: u64, m: &[u64]| out.push((d, m.to_vec())))?;
        Ok(out)
    }

    /// As [`Engine::advance`], handing matches to `sink`.
    pub fn advance_into(&mut self, t: &Arc<Event>, sink: &mut dyn MatchSink) -> Result<()> {
        let expected = self.cursor + 1;
        if t.index != expected {
            return Err(Error::OutOfOrder {
                expected,
                got: t.index,
            });
        }
        self.cursor = t.index;
        let c = &mut self.counters;
        let mut updated: Vec<Run> = Vec::with_capacity(self.active.len() + 4);
        let mut clones: Vec<Run> = Vec::new();
        self.emitted.clear();

        for run in std::mem::take(&mut self.active) {
            if let (Some(w), Some(&first)) = (self.window, run.marked.first()) {
                if t.index - first + 1 > w {
                    c.runs_discarded += 1;
                    continue;
                }
            }
            self.fired.clear();
            for &id in self.srt.outgoing_ids(run.state) {
                c.predicate_evaluations += 1;
                if self.srt.transition(id).guard.eval(t, &run.valuation) {
                    self.fired.push(id);
                }
            }
            let Some((&first, rest)) = self.fired.split_first() else {
                c.runs_discarded += 1;
                continue;
            };
            c.run_updates += self.fired.len() as u64;
            c.run_clones += rest.len() as u64;
            c.runs_created += rest.len() as u64;
            let extra: Vec<Run> = rest
                .iter()
                .map(|_| Run {
                    created_at: t.index,
                    ..run.clone()
                })
                .collect();
            let mut step = |succ: Run, id: usize| {
                let tr = self.srt.transition(id);
                let succ = apply(succ, tr, t);
                if tr.target == self.accept {
                    c.runs_completed += 1;
                    if self.emitted.insert(succ.marked.clone()) {
                        c.matches_emitted += 1;
                        sink.emit(t.index, &succ.marked);
                    }
                    None
                } else {
                    Some(succ)
                }
            };
            updated.extend(step(run, first));
            for (succ, &id) in extra.into_iter().zip(rest) {
                clones.extend(step(succ, id));
            }
        }

        self.seen.clear();
        let mut next = Vec::with_capacity(updated.len() + clones.len());
        for succ in updated.into_iter().chain(clones) {
            let duplicate = match self.seen.entry(run_key(&succ)) {
                Entry::Vacant(slot) => {
                    slot.insert(next.len());
                    false
                }
                Entry::Occupied(slot) => {
                    same_run(&next[*slot.get()], &succ) || next.iter().any(|r| same_run(r, &succ))
                }
            };
            if duplicate {
                c.runs_discarded += 1;
            } else {
                next.push(succ);
            }
        }
        self.active = next;
        Ok(())
    }

    /// Feeds a whole stream.
    pub fn run_stream(&mut self, events: &[Arc<Event>], sink: &mut dyn MatchSink) -> Result<()> {
        for e in events {
            self.advance_into(e, sink)?;
        }
        Ok(())
    }
}

/// Successor of `run` along `tr` on `t`.
fn apply(mut run: Run, tr: &Transition, t: &Arc<Event>) -> Run {
    if tr.output == Output::Mark {
        run.marked.push(t.index);
    }
    run.state = tr.target;
    run.valuation
        .write(&tr.writes, t)
        .expect("writes checked on insertion");
    run
}

fn run_key(r: &Run) -> u64 {
    let mut h = FxHasher::default();
    r.state.hash(&mut h);
    r.marked.hash(&mut h);
    for i in r.valuation.fingerprint_iter() {
        i.hash(&mut h);
    }
    h.finish()
}

/// Duplicate runs agree on state, stored events and marks.
fn same_run(a: &Run, b: &Run) -> bool {
    a.state == b.state
        && a.marked == b.marked
        && a.valuation
            .fingerprint_iter()
            .eq(b.valuation.fingerprint_iter())
}

/// Adds an accepting sink reached by a copy of every marking transition into a
/// final state, makes the old finals non-final and prunes dead states.
fn split_accepting(srt: &Srt) -> (Srt, StateId) {
    let mut t = srt.clone();
    let accept = t.add_state();
    let into_final: Vec<_> = srt
        .transitions()
        .iter()
        .filter(|tr| tr.output == Output::Mark && srt.is_final(tr.target))
        .cloned()
        .collect();
    for tr in into_final {
        t.add_transition(tr.source, accept, tr.guard, tr.output, tr.writes);
    }
    for q in srt.finals() {
        t.set_final(q, false);
    }
    t.set_final(accept, true);
    let t = t.trim();
    // `trim` renumbers in order; the sink was added last and survives iff reachable.
    let accept = if t.is_final((t.num_states() - 1) as StateId) {
        (t.num_states() - 1) as StateId
    } else {
        StateId::MAX
    };
    (t, accept)
}

/// Collects every match of a compiled pattern over a stream.
pub fn run_to_vec(compiled: &Compiled, events: &[Arc<Event>]) -> Result<Vec<(u64, Vec<u64>)>> {
    let mut engine = Engine::new(compiled)?;
    let mut out = Vec::new();
    engine.run_stream(events, &mut |d: u64, m: &[u64]| out.push((d, m.to_vec())))?;
    Ok(out)
}
