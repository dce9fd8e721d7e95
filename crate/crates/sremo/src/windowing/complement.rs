// SPDX-License-Identifier: MIT OR Apache-2.0

use std::collections::HashSet;

use super::determinize::is_deterministic;
use crate::condition::{minterms, Condition, Guard};
use crate::error::{Error, Result};
use crate::expr::Output;
use crate::srt::Srt;

/// Above this many missing minterms the dead-state guard is a single negated conjunction.
const MAX_SPLIT_DEAD: usize = 4096;

/// Completion with a dead sink followed by flipping final states.
///
/// From each state, the conjunction of its negated guards leads to the sink,
/// which loops on `true`. When the guards are minterms of one base, the missing
/// minterms are used instead so the result stays syntactically deterministic.
pub fn complement(d: &Srt) -> Result<Srt> {
    if !is_deterministic(d) {
        return Err(Error::NotDeterministic);
    }
    let mut out = Srt::new(d.schema.clone(), d.registers.clone());
    out.set_output_agnostic(true);
    for _ in 1..d.num_states() {
        out.add_state();
    }
    out.start = d.start;
    for tr in d.transitions() {
        out.add_transition(
            tr.source,
            tr.target,
            tr.guard.clone(),
            Output::Skip,
            tr.writes.clone(),
        );
    }
    let dead = out.add_state();
    for q in d.states() {
        out.set_final(q, !d.is_final(q));
        for guard in dead_guards(d, q) {
            out.add_transition(q, dead, guard, Output::Skip, vec![]);
        }
    }
    out.set_final(dead, true);
    out.add_transition(
        dead,
        dead,
        Guard::Cond(Condition::True),
        Output::Skip,
        vec![],
    );
    Ok(out)
}

fn dead_guards(d: &Srt, q: u32) -> Vec<Guard> {
    let guards: Vec<&Guard> = d.outgoing(q).map(|t| &t.guard).collect();
    if guards.is_empty() {
        return vec![Guard::Cond(Condition::True)];
    }
    if let Some(split) = missing_minterms(&guards) {
        return split;
    }
    vec![Guard::Cond(Condition::all(guards.iter().map(|g| {
        g.condition()
            .expect("deterministic automata have no epsilon")
            .negated()
    })))]
}

fn missing_minterms(guards: &[&Guard]) -> Option<Vec<Guard>> {
    let Guard::Minterm(first) = guards[0] else {
        return None;
    };
    let mut present = HashSet::new();
    for g in guards {
        match g {
            Guard::Minterm(m) if m.base() == first.base() => {
                present.insert(m.signs());
            }
            _ => return None,
        }
    }
    let total = 1usize << first.base().len();
    if total - present.len() > MAX_SPLIT_DEAD {
        return None;
    }
    let all = minterms(first.base(), first.base().len(), "dead").ok()?;
    Some(
        all.into_iter()
            .filter(|m| !present.contains(&m.signs()))
            .map(Guard::Minterm)
            .collect(),
    )
}
