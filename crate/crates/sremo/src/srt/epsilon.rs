// SPDX-License-Identifier: MIT OR Apache-2.0

//! Epsilon elimination by forward closure over subsets of states.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{Srt, StateId};
use crate::condition::Guard;
use crate::event::RegId;
use crate::expr::Output;

/// Transitions sharing guard, output and writes, grouped by target closure.
type Label = (Guard, Output, Vec<RegId>);

/// Equivalent automaton without epsilon transitions.
///
/// New states are epsilon closures, restricted to states that either are final
/// or have a consuming transition. Outgoing transitions of a closure are grouped
/// by (guard, output, writes) and lead to the union of the target closures.
/// Dead states are pruned at the end.
pub fn eliminate_epsilon(t: &Srt) -> Srt {
    let essential: Vec<bool> = t
        .states()
        .map(|q| t.is_final(q) || t.outgoing(q).any(|tr| !tr.guard.is_epsilon()))
        .collect();

    let closure = |seeds: &mut dyn Iterator<Item = StateId>| -> Vec<StateId> {
        let mut seen = vec![false; t.num_states()];
        let mut stack: Vec<StateId> = Vec::new();
        for q in seeds {
            if !seen[q as usize] {
                seen[q as usize] = true;
                stack.push(q);
            }
        }
        while let Some(q) = stack.pop() {
            for tr in t.outgoing(q) {
                if tr.guard.is_epsilon() && !seen[tr.target as usize] {
                    seen[tr.target as usize] = true;
                    stack.push(tr.target);
                }
            }
        }
        t.states()
            .filter(|q| seen[*q as usize] && essential[*q as usize])
            .collect()
    };

    let mut out = Srt::new(t.schema.clone(), t.registers.clone());
    out.set_output_agnostic(t.is_output_agnostic());
    let start = closure(&mut std::iter::once(t.start));
    let mut ids: HashMap<Vec<StateId>, StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    ids.insert(start.clone(), out.start);
    queue.push_back(start);

    while let Some(set) = queue.pop_front() {
        let src = ids[&set];
        out.set_final(src, set.iter().any(|q| t.is_final(*q)));
        let mut groups: Vec<(Label, BTreeSet<StateId>)> = Vec::new();
        for &q in &set {
            for tr in t.outgoing(q) {
                if tr.guard.is_epsilon() {
                    continue;
                }
                let key = (tr.guard.clone(), tr.output, tr.writes.clone());
                match groups.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, targets)) => {
                        targets.insert(tr.target);
                    }
                    None => groups.push((key, BTreeSet::from([tr.target]))),
                }
            }
        }
        for ((guard, output, writes), targets) in groups {
            let target = closure(&mut targets.into_iter());
            if target.is_empty() {
                continue;
            }
            let dst = match ids.get(&target) {
                Some(&d) => d,
                None => {
                    let d = out.add_state();
                    ids.insert(target.clone(), d);
                    queue.push_back(target);
                    d
                }
            };
            out.add_transition(src, dst, guard, output, writes);
        }
    }
    out.trim()
}
