// SPDX-License-Identifier: MIT OR Apache-2.0

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::event::RegId;
use crate::srt::{Srt, StateId};

/// Size limits for unrolling and determinization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub max_states: usize,
    pub max_transitions: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_states: 50_000,
            max_transitions: 100_000,
        }
    }
}

impl Caps {
    pub(crate) fn check(&self, states: usize, transitions: usize) -> Result<()> {
        if states > self.max_states || transitions > self.max_transitions {
            return Err(Error::SizeExplosion {
                states,
                transitions,
                max_states: self.max_states,
                max_transitions: self.max_transitions,
            });
        }
        Ok(())
    }
}

/// Result of [`unroll`] with its bookkeeping.
#[derive(Debug, Clone)]
pub struct Unrolled {
    pub srt: Srt,
    /// Original state of every new state.
    pub copy_of_state: Vec<StateId>,
    /// Original register of every register of the unrolled automaton.
    pub copy_of_register: Vec<RegId>,
    /// New states at the deepest level reached.
    pub frontier: Vec<StateId>,
}

/// Acyclic automaton accepting exactly the strings of length at most `w`
/// accepted by `t`, one tree path per walk.
///
/// Every write goes to a fresh copy of its register. Guards read the copy
/// written last on the path, or the original register when there is none.
/// Walks that cannot reach a final state within the window are not built.
pub fn unroll(t: &Srt, w: u64) -> Result<Unrolled> {
    unroll_capped(t, w, &Caps::default())
}

pub fn unroll_capped(t: &Srt, w: u64, caps: &Caps) -> Result<Unrolled> {
    t.require_epsilon_free()?;
    let dist = distance_to_final(t);
    let mut out = Srt::new(t.schema.clone(), t.registers.clone());
    let mut copy_of_register: Vec<RegId> = t.registers.ids().collect();
    let mut copy_of_state = vec![t.start];
    out.set_final(out.start, t.is_final(t.start));

    let identity: Vec<RegId> = t.registers.ids().collect();
    let mut queue = VecDeque::from([(out.start, t.start, 0u64, identity)]);
    let mut frontier = vec![out.start];
    let mut depth_seen = 0;
    let mut copies = 0usize;
    while let Some((node, orig, depth, binding)) = queue.pop_front() {
        if depth > depth_seen {
            depth_seen = depth;
            frontier.clear();
        }
        frontier.push(node);
        if depth == w {
            continue;
        }
        for tr in t.outgoing(orig) {
            match dist[tr.target as usize] {
                Some(d) if depth + 1 + d <= w => {}
                _ => continue,
            }
            let guard = tr.guard.map_registers(&|r| binding[r.idx()]);
            let mut child_binding = binding.clone();
            let mut writes = Vec::with_capacity(tr.writes.len());
            for r in &tr.writes {
                copies += 1;
                let name = format!("{}#{}", t.registers.name(*r), copies);
                let copy = out.registers.push_fresh(&name);
                copy_of_register.push(*r);
                child_binding[r.idx()] = copy;
                writes.push(copy);
            }
            let child = out.add_state();
            copy_of_state.push(tr.target);
            out.set_final(child, t.is_final(tr.target));
            out.add_transition(node, child, guard, tr.output, writes);
            caps.check(out.num_states(), out.transitions().len())?;
            queue.push_back((child, tr.target, depth + 1, child_binding));
        }
    }
    Ok(Unrolled {
        srt: out,
        copy_of_state,
        copy_of_register,
        frontier,
    })
}

/// Length of the shortest walk from each state to a final state.
fn distance_to_final(t: &Srt) -> Vec<Option<u64>> {
    let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); t.num_states()];
    for tr in t.transitions() {
        rev[tr.target as usize].push(tr.source);
    }
    let mut dist = vec![None; t.num_states()];
    let mut queue = VecDeque::new();
    for q in t.finals() {
        dist[q as usize] = Some(0);
        queue.push_back(q);
    }
    while let Some(q) = queue.pop_front() {
        let d = dist[q as usize].expect("queued states have a distance");
        for &p in &rev[q as usize] {
            if dist[p as usize].is_none() {
                dist[p as usize] = Some(d + 1);
                queue.push_back(p);
            }
        }
    }
    dist
}
