// SPDX-License-Identifier: MIT OR Apache-2.0

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use super::unroll::{unroll_capped, Caps};
use crate::compiler::compile;
use crate::condition::{
    minterms, mutually_exclusive, syntactically_unsat, Condition, Guard, DEFAULT_MINTERM_CAP,
};
use crate::error::{Error, Result};
use crate::event::{Event, RegId, Valuation};
use crate::expr::{Output, Pattern};
use crate::srt::{Srt, StateId};

/// Tuning for [`determinize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeterminizeOptions {
    pub caps: Caps,
    pub minterm_cap: usize,
    /// Drop minterms with contradictory constant bounds on one attribute.
    pub prune_contradictory: bool,
}

impl Default for DeterminizeOptions {
    fn default() -> Self {
        DeterminizeOptions {
            caps: Caps::default(),
            minterm_cap: DEFAULT_MINTERM_CAP,
            prune_contradictory: false,
        }
    }
}

/// Output-agnostic deterministic automaton for a windowed pattern.
pub fn determinize(pattern: &Pattern) -> Result<Srt> {
    determinize_with(pattern, &DeterminizeOptions::default())
}

pub fn determinize_with(pattern: &Pattern, opts: &DeterminizeOptions) -> Result<Srt> {
    let w = pattern.window().ok_or(Error::WindowRequired)?;
    let t = compile(pattern)?;
    let unrolled = unroll_capped(&t, w, &opts.caps)?;
    determinize_srt(&unrolled.srt, opts)
}

/// Subset construction over minterms of the outgoing guards of each subset.
/// All outputs become skips and the result is flagged output-agnostic.
pub fn determinize_srt(t: &Srt, opts: &DeterminizeOptions) -> Result<Srt> {
    t.require_epsilon_free()?;
    let mut out = Srt::new(t.schema.clone(), t.registers.clone());
    out.set_output_agnostic(true);
    let mut ids: HashMap<Vec<StateId>, StateId> = HashMap::new();
    let start = vec![t.start];
    ids.insert(start.clone(), out.start);
    let mut queue = VecDeque::from([start]);
    while let Some(set) = queue.pop_front() {
        let src = ids[&set];
        out.set_final(src, set.iter().any(|q| t.is_final(*q)));
        let outs: Vec<(Condition, StateId, &[RegId])> = set
            .iter()
            .flat_map(|q| t.outgoing(*q))
            .map(|tr| {
                (
                    tr.guard.condition().expect("epsilon-free"),
                    tr.target,
                    tr.writes.as_slice(),
                )
            })
            .collect();
        let base: Vec<Condition> = outs.iter().map(|(c, _, _)| c.clone()).collect();
        let label = format!("{set:?}");
        for m in minterms(&base, opts.minterm_cap, &label)? {
            let guard = Guard::Minterm(m);
            if opts.prune_contradictory && syntactically_unsat(&guard) {
                continue;
            }
            let Guard::Minterm(m) = &guard else {
                unreachable!()
            };
            let mut targets = Vec::new();
            let mut writes = Vec::new();
            for (c, target, w) in &outs {
                if m.entails(c)? {
                    targets.push(*target);
                    writes.extend_from_slice(w);
                }
            }
            if targets.is_empty() {
                continue;
            }
            targets.sort_unstable();
            targets.dedup();
            let dst = match ids.get(&targets) {
                Some(&d) => d,
                None => {
                    let d = out.add_state();
                    ids.insert(targets.clone(), d);
                    queue.push_back(targets);
                    d
                }
            };
            out.add_transition(src, dst, guard, Output::Skip, writes);
            opts.caps.check(out.num_states(), out.transitions().len())?;
        }
    }
    Ok(out)
}

/// Syntactic determinism: no epsilon moves and, from every state, each pair of
/// outgoing guards is provably exclusive.
pub fn is_deterministic(t: &Srt) -> bool {
    if t.has_epsilon() {
        return false;
    }
    t.states().all(|q| {
        let outs: Vec<&Guard> = t.outgoing(q).map(|tr| &tr.guard).collect();
        outs.iter()
            .enumerate()
            .all(|(i, a)| outs[i + 1..].iter().all(|b| mutually_exclusive(a, b)))
    })
}

/// Semantic determinism on samples: for every state, event and valuation, at
/// most one outgoing transition fires.
pub fn is_deterministic_on(t: &Srt, events: &[Arc<Event>], valuations: &[Valuation]) -> bool {
    if t.has_epsilon() {
        return false;
    }
    let empty = [Valuation::empty(t.registers.len())];
    let vals = if valuations.is_empty() {
        &empty[..]
    } else {
        valuations
    };
    t.states().all(|q| {
        events.iter().all(|e| {
            vals.iter()
                .all(|v| t.outgoing(q).filter(|tr| tr.guard.eval(e, v)).count() <= 1)
        })
    })
}
