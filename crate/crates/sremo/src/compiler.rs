// SPDX-License-Identifier: MIT OR Apache-2.0

//! Expression to automaton construction and closure combinators.

use std::sync::Arc;

use crate::condition::{Condition, Guard};
use crate::error::{Error, Result};
use crate::event::{RegId, RegisterSet, Schema};
use crate::expr::{Output, Pattern, Sremo};
use crate::srt::{eliminate_epsilon, Srt, StateId};
use crate::windowing;

/// A compiled pattern: epsilon-free automaton plus the window the engine enforces.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub srt: Srt,
    pub window: Option<u64>,
}

/// Compiles the pattern body. A top-level window is not part of the automaton;
/// it only scopes negations. The result is epsilon-free.
pub fn compile(pattern: &Pattern) -> Result<Srt> {
    let p = pattern.desugared()?;
    compile_expr(p.body(), &p.registers, &p.schema, p.window())
}

/// As [`compile`], before epsilon elimination.
pub fn compile_with_epsilon(pattern: &Pattern) -> Result<Srt> {
    let p = pattern.desugared()?;
    thompson(p.body(), &p.registers, &p.schema, p.window())
}

/// Compiles an expression over a fixed register set.
pub fn compile_expr(
    e: &Sremo,
    registers: &RegisterSet,
    schema: &Arc<Schema>,
    window: Option<u64>,
) -> Result<Srt> {
    Ok(eliminate_epsilon(&thompson(e, registers, schema, window)?))
}

fn thompson(
    e: &Sremo,
    registers: &RegisterSet,
    schema: &Arc<Schema>,
    window: Option<u64>,
) -> Result<Srt> {
    let mut b = Builder {
        srt: Srt::new(schema.clone(), registers.clone()),
        base_regs: registers.len(),
        window,
    };
    let (s, f) = b.build(e)?;
    let mut t = b.srt;
    let start = t.add_state();
    t.add_epsilon(start, s);
    t.set_final(f, true);
    t.start = start;
    Ok(t)
}

/// Streaming automaton for `(true ↑ ⊗)* · e`, with the pattern window carried alongside.
pub fn make_streaming(pattern: &Pattern) -> Result<Compiled> {
    let p = pattern.desugared()?;
    let body = Sremo::concat(Sremo::skip_any(), p.body().clone());
    Ok(Compiled {
        srt: compile_expr(&body, &p.registers, &p.schema, p.window())?,
        window: p.window(),
    })
}

struct Builder {
    srt: Srt,
    base_regs: usize,
    window: Option<u64>,
}

impl Builder {
    fn build(&mut self, e: &Sremo) -> Result<(StateId, StateId)> {
        let t = &mut self.srt;
        Ok(match e {
            Sremo::Empty => (t.add_state(), t.add_state()),
            Sremo::Epsilon => {
                let (s, f) = (t.add_state(), t.add_state());
                t.add_epsilon(s, f);
                (s, f)
            }
            Sremo::Terminal {
                cond,
                output,
                store,
            } => {
                let (s, f) = (t.add_state(), t.add_state());
                t.add_transition(
                    s,
                    f,
                    Guard::Cond(cond.clone()),
                    *output,
                    store.iter().copied().collect(),
                );
                (s, f)
            }
            Sremo::Concat(a, b) => {
                let (sa, fa) = self.build(a)?;
                let (sb, fb) = self.build(b)?;
                self.srt.add_epsilon(fa, sb);
                (sa, fb)
            }
            Sremo::Or(a, b) => {
                let (sa, fa) = self.build(a)?;
                let (sb, fb) = self.build(b)?;
                let t = &mut self.srt;
                let (s, f) = (t.add_state(), t.add_state());
                t.add_epsilon(s, sa);
                t.add_epsilon(s, sb);
                t.add_epsilon(fa, f);
                t.add_epsilon(fb, f);
                (s, f)
            }
            Sremo::Star(a) => {
                let (sa, fa) = self.build(a)?;
                let t = &mut self.srt;
                let (s, f) = (t.add_state(), t.add_state());
                t.add_epsilon(s, sa);
                t.add_epsilon(s, f);
                t.add_epsilon(fa, f);
                t.add_epsilon(fa, sa);
                (s, f)
            }
            Sremo::Negation(a) => {
                let w = self.window.ok_or(Error::NegationOutsideWindow)?;
                let regs = self.srt.registers.clone();
                let inner = compile_expr(&a.skipping(), &regs, &self.srt.schema, Some(w))?;
                let unrolled = windowing::unroll(&inner, w)?.srt;
                let det = windowing::determinize_srt(&unrolled, &Default::default())?;
                let comp = windowing::complement(&det)?;
                self.embed(&comp)
            }
            Sremo::Windowed(..) => {
                return Err(Error::Config(
                    "windows are only supported at the top level".into(),
                ))
            }
            Sremo::Any(_) | Sremo::Next(_) => {
                unreachable!("strategies are rewritten before compilation")
            }
        })
    }

    /// Copies an automaton in as a fragment. Registers beyond the pattern's own
    /// are private to the copy and get fresh names.
    fn embed(&mut self, sub: &Srt) -> (StateId, StateId) {
        let mut map_reg = Vec::with_capacity(sub.registers.len());
        for r in sub.registers.ids() {
            if r.idx() < self.base_regs {
                map_reg.push(r);
            } else {
                map_reg.push(self.srt.registers.push_fresh(sub.registers.name(r)));
            }
        }
        let t = &mut self.srt;
        let states: Vec<StateId> = sub.states().map(|_| t.add_state()).collect();
        let f = t.add_state();
        for tr in sub.transitions() {
            t.add_transition(
                states[tr.source as usize],
                states[tr.target as usize],
                tr.guard.map_registers(&|r| map_reg[r.idx()]),
                Output::Skip,
                tr.writes.iter().map(|r| map_reg[r.idx()]).collect(),
            );
        }
        for q in sub.finals() {
            t.add_epsilon(states[q as usize], f);
        }
        (states[sub.start as usize], f)
    }
}

/// Register set of `a` followed by those of `b` with clashing names primed,
/// and the id shift applied to `b`.
fn rename_apart(a: &Srt, b: &Srt) -> (RegisterSet, u32) {
    let mut regs = a.registers.clone();
    let shift = regs.len() as u32;
    for r in b.registers.ids() {
        regs.push_fresh(b.registers.name(r));
    }
    (regs, shift)
}

/// Copies the states and transitions of `src` into `dst`, shifting register ids.
fn copy_into(dst: &mut Srt, src: &Srt, shift: u32) -> Vec<StateId> {
    let states: Vec<StateId> = src.states().map(|_| dst.add_state()).collect();
    let f = |r: RegId| RegId(r.0 + shift);
    for tr in src.transitions() {
        dst.add_transition(
            states[tr.source as usize],
            states[tr.target as usize],
            tr.guard.map_registers(&f),
            tr.output,
            tr.writes.iter().map(|r| f(*r)).collect(),
        );
    }
    states
}

fn combined(a: &Srt, b: &Srt) -> (Srt, Vec<StateId>, Vec<StateId>) {
    let (regs, shift) = rename_apart(a, b);
    let mut t = Srt::new(a.schema.clone(), regs);
    t.set_output_agnostic(a.is_output_agnostic() || b.is_output_agnostic());
    let sa = copy_into(&mut t, a, 0);
    let sb = copy_into(&mut t, b, shift);
    (t, sa, sb)
}

/// Automaton whose matches are the union of both inputs' matches.
pub fn union(a: &Srt, b: &Srt) -> Srt {
    let (mut t, sa, sb) = combined(a, b);
    let f = t.add_state();
    t.set_final(f, true);
    t.add_epsilon(t.start, sa[a.start as usize]);
    t.add_epsilon(t.start, sb[b.start as usize]);
    for q in a.finals() {
        t.add_epsilon(sa[q as usize], f);
    }
    for q in b.finals() {
        t.add_epsilon(sb[q as usize], f);
    }
    eliminate_epsilon(&t)
}

/// Automaton matching `S1 · S2` with `M1 ∪ (M2 shifted by |S1|)`.
pub fn concat(a: &Srt, b: &Srt) -> Srt {
    let (mut t, sa, sb) = combined(a, b);
    t.add_epsilon(t.start, sa[a.start as usize]);
    for q in a.finals() {
        t.add_epsilon(sa[q as usize], sb[b.start as usize]);
    }
    for q in b.finals() {
        t.set_final(sb[q as usize], true);
    }
    eliminate_epsilon(&t)
}

/// Kleene closure with a fresh start and final state.
pub fn star(a: &Srt) -> Srt {
    let mut t = Srt::new(a.schema.clone(), a.registers.clone());
    t.set_output_agnostic(a.is_output_agnostic());
    let sa = copy_into(&mut t, a, 0);
    let f = t.add_state();
    t.set_final(f, true);
    t.add_epsilon(t.start, sa[a.start as usize]);
    t.add_epsilon(t.start, f);
    for q in a.finals() {
        t.add_epsilon(sa[q as usize], f);
        t.add_epsilon(sa[q as usize], sa[a.start as usize]);
    }
    eliminate_epsilon(&t)
}

/// Product automaton whose matches are exactly the common matches.
/// Transitions pair only when their outputs agree.
pub fn intersect(a: &Srt, b: &Srt) -> Srt {
    product(a, b, true)
}

/// Product automaton for language intersection: every pair of transitions is
/// combined, marking only when both mark.
pub fn intersect_language(a: &Srt, b: &Srt) -> Srt {
    product(a, b, false)
}

fn product(a: &Srt, b: &Srt, same_output: bool) -> Srt {
    let a = eliminate_epsilon(a);
    let b = eliminate_epsilon(b);
    let (regs, shift) = rename_apart(&a, &b);
    let mut t = Srt::new(a.schema.clone(), regs);
    t.set_output_agnostic(a.is_output_agnostic() || b.is_output_agnostic());
    let nb = b.num_states();
    let mut ids: Vec<Option<StateId>> = vec![None; a.num_states() * nb];
    let pair = |p: StateId, q: StateId| p as usize * nb + q as usize;
    ids[pair(a.start, b.start)] = Some(t.start);
    let mut stack = vec![(a.start, b.start)];
    let f = |r: RegId| RegId(r.0 + shift);
    while let Some((p, q)) = stack.pop() {
        let src = ids[pair(p, q)].expect("visited");
        t.set_final(src, a.is_final(p) && b.is_final(q));
        for ta in a.outgoing(p) {
            for tb in b.outgoing(q) {
                if same_output && ta.output != tb.output {
                    continue;
                }
                let dst = match ids[pair(ta.target, tb.target)] {
                    Some(d) => d,
                    None => {
                        let d = t.add_state();
                        ids[pair(ta.target, tb.target)] = Some(d);
                        stack.push((ta.target, tb.target));
                        d
                    }
                };
                let ga = ta.guard.condition().expect("epsilon-free");
                let gb = tb
                    .guard
                    .map_registers(&f)
                    .condition()
                    .expect("epsilon-free");
                let output = if ta.output == Output::Mark && tb.output == Output::Mark {
                    Output::Mark
                } else {
                    Output::Skip
                };
                let mut writes = ta.writes.clone();
                writes.extend(tb.writes.iter().map(|r| f(*r)));
                t.add_transition(src, dst, Guard::Cond(conj(ga, gb)), output, writes);
            }
        }
    }
    t.trim()
}

fn conj(a: Condition, b: Condition) -> Condition {
    match (a, b) {
        (Condition::True, c) | (c, Condition::True) => c,
        (a, b) => a.and(b),
    }
}
