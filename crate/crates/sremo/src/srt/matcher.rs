// SPDX-License-Identifier: MIT OR Apache-2.0

//! Exhaustive run enumeration for small inputs.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::{Srt, StateId};
use crate::error::{Error, Result};
use crate::event::{Event, Valuation};
use crate::expr::oracle::{MatchSet, DEFAULT_ORACLE_CAP};
use crate::expr::Output;

/// When a run counts as accepting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Acceptance {
    /// A final state is reached after the whole input.
    Final,
    /// As `Final`, and the last consuming transition marks. Never accepts the empty input.
    MarkedFinal,
}

#[derive(Clone)]
struct Cfg {
    state: StateId,
    val: Valuation,
    marks: u64,
    last_marked: bool,
}

type Key = (StateId, Vec<u64>, u64, bool);

fn key(c: &Cfg) -> Key {
    (c.state, c.val.fingerprint(), c.marks, c.last_marked)
}

fn close(t: &Srt, layer: Vec<Cfg>) -> Vec<Cfg> {
    let mut seen: HashSet<Key> = layer.iter().map(key).collect();
    let mut out = layer.clone();
    let mut stack = layer;
    while let Some(c) = stack.pop() {
        for tr in t.outgoing(c.state) {
            if tr.guard.is_epsilon() {
                let n = Cfg {
                    state: tr.target,
                    ..c.clone()
                };
                if seen.insert(key(&n)) {
                    out.push(n.clone());
                    stack.push(n);
                }
            }
        }
    }
    out
}

/// End configurations of all runs over `events` from valuation `v0`, epsilon moves included.
fn run_all(t: &Srt, events: &[Arc<Event>], v0: &Valuation) -> Vec<Cfg> {
    let mut layer = close(
        t,
        vec![Cfg {
            state: t.start,
            val: v0.clone(),
            marks: 0,
            last_marked: false,
        }],
    );
    for (pos, e) in events.iter().enumerate() {
        let mut next = Vec::new();
        let mut seen = HashSet::new();
        for c in &layer {
            for tr in t.outgoing(c.state) {
                if tr.guard.is_epsilon() || !tr.guard.eval(e, &c.val) {
                    continue;
                }
                let marked = tr.output == Output::Mark;
                let mut val = c.val.clone();
                val.write(&tr.writes, e)
                    .expect("writes checked on insertion");
                let n = Cfg {
                    state: tr.target,
                    val,
                    marks: if marked { c.marks | 1 << pos } else { c.marks },
                    last_marked: marked,
                };
                if seen.insert(key(&n)) {
                    next.push(n);
                }
            }
        }
        layer = close(t, next);
        if layer.is_empty() {
            break;
        }
    }
    layer
}

fn check_len(events: &[Arc<Event>]) -> Result<()> {
    if events.len() > 63 {
        return Err(Error::OracleCap {
            len: events.len(),
            cap: 63,
        });
    }
    Ok(())
}

fn positions(mask: u64) -> Vec<u64> {
    (0..64)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| b + 1)
        .collect()
}

/// `Match(T, S)`: marked positions (1-based) of every accepting run.
pub fn exhaustive_matches(t: &Srt, events: &[Arc<Event>], mode: Acceptance) -> Result<MatchSet> {
    exhaustive_matches_from(t, events, &Valuation::empty(t.registers.len()), mode)
}

/// As [`exhaustive_matches`] starting from a given valuation.
pub fn exhaustive_matches_from(
    t: &Srt,
    events: &[Arc<Event>],
    v0: &Valuation,
    mode: Acceptance,
) -> Result<MatchSet> {
    if t.is_output_agnostic() {
        return Err(Error::OutputAgnostic);
    }
    if events.len() > DEFAULT_ORACLE_CAP {
        return Err(Error::OracleCap {
            len: events.len(),
            cap: DEFAULT_ORACLE_CAP,
        });
    }
    let ends = run_all(t, events, v0);
    Ok(ends
        .iter()
        .filter(|c| t.is_final(c.state))
        .filter(|c| mode == Acceptance::Final || (!events.is_empty() && c.last_marked))
        .map(|c| positions(c.marks))
        .collect())
}

/// Marked positions and final valuations of accepting runs under [`Acceptance::Final`].
pub fn derivations(
    t: &Srt,
    events: &[Arc<Event>],
    v0: &Valuation,
) -> Result<Vec<(u64, Valuation)>> {
    check_len(events)?;
    let mut seen = HashSet::new();
    Ok(run_all(t, events, v0)
        .into_iter()
        .filter(|c| t.is_final(c.state))
        .filter(|c| seen.insert((c.marks, c.val.fingerprint())))
        .map(|c| (c.marks, c.val))
        .collect())
}

/// Whether some run over `events` ends in a final state. Outputs are ignored.
pub fn accepts(t: &Srt, events: &[Arc<Event>]) -> bool {
    let v0 = Valuation::empty(t.registers.len());
    let mut layer = close(
        t,
        vec![Cfg {
            state: t.start,
            val: v0,
            marks: 0,
            last_marked: false,
        }],
    );
    for e in events {
        let mut next = Vec::new();
        let mut seen = HashSet::new();
        for c in &layer {
            for tr in t.outgoing(c.state) {
                if tr.guard.is_epsilon() || !tr.guard.eval(e, &c.val) {
                    continue;
                }
                let mut val = c.val.clone();
                val.write(&tr.writes, e)
                    .expect("writes checked on insertion");
                let n = Cfg {
                    state: tr.target,
                    val,
                    marks: 0,
                    last_marked: false,
                };
                if seen.insert(key(&n)) {
                    next.push(n);
                }
            }
        }
        layer = close(t, next);
        if layer.is_empty() {
            return false;
        }
    }
    layer.iter().any(|c| t.is_final(c.state))
}

/// Number of distinct runs consuming all of `events`, accepting or not.
/// The automaton must be epsilon-free.
pub fn count_runs(t: &Srt, events: &[Arc<Event>]) -> Result<u128> {
    t.require_epsilon_free()?;
    let mut layer: HashMap<(StateId, Vec<u64>), (Valuation, u128)> = HashMap::new();
    let v0 = Valuation::empty(t.registers.len());
    layer.insert((t.start, v0.fingerprint()), (v0, 1));
    for e in events {
        let mut next: HashMap<(StateId, Vec<u64>), (Valuation, u128)> = HashMap::new();
        for ((state, _), (val, n)) in &layer {
            for tr in t.outgoing(*state) {
                if !tr.guard.eval(e, val) {
                    continue;
                }
                let mut v = val.clone();
                v.write(&tr.writes, e).expect("writes checked on insertion");
                let entry = next
                    .entry((tr.target, v.fingerprint()))
                    .or_insert_with(|| (v, 0));
                entry.1 += n;
            }
        }
        layer = next;
    }
    Ok(layer.values().map(|(_, n)| n).sum())
}
