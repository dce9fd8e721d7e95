// SPDX-License-Identifier: MIT OR Apache-2.0

//! Brute-force semantics of expressions, used as the reference in tests.
//!
//! Every split of the input is explored, with valuations threaded left to
//! right. Results are memoized per (node, span, valuation).

use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;
use std::sync::Arc;

use super::ast::{Output, Pattern, Sremo};
use crate::condition::Condition;
use crate::error::{Error, Result};
use crate::event::{Event, RegId, Valuation};

/// Default maximum stream length accepted by the oracle.
pub const DEFAULT_ORACLE_CAP: usize = 14;

/// Set of matches, each a sorted list of 1-based positions.
pub type MatchSet = BTreeSet<Vec<u64>>;

enum Node {
    Empty,
    Eps,
    Term {
        cond: Condition,
        mark: bool,
        store: Option<RegId>,
    },
    Concat(usize, usize),
    Or(usize, usize),
    Star(usize),
    Window(usize, u64),
    Neg(usize, u64),
}

/// A derivation result: marked positions as a bitmask and the final valuation.
pub type Derivation = (u64, Valuation);

type Memo = HashMap<(usize, usize, usize, Vec<u64>), Rc<Vec<Derivation>>>;

/// Oracle over one input string.
pub struct Oracle<'a> {
    nodes: Vec<Node>,
    root: usize,
    events: &'a [Arc<Event>],
    memo: Memo,
}

impl<'a> Oracle<'a> {
    /// Prepares `e` (strategies are rewritten here) for input `events`.
    /// Event indices must be pairwise distinct.
    pub fn new(e: &Sremo, events: &'a [Arc<Event>], cap: usize) -> Result<Self> {
        if events.len() > cap || events.len() > 63 {
            return Err(Error::OracleCap {
                len: events.len(),
                cap,
            });
        }
        let e = super::strategy::desugar(e, false)?;
        let mut nodes = Vec::new();
        let root = flatten(&e, None, &mut nodes)?;
        Ok(Oracle {
            nodes,
            root,
            events,
            memo: HashMap::new(),
        })
    }

    /// All derivations of the whole input starting from `v`.
    pub fn derive_from(&mut self, v: &Valuation) -> Vec<Derivation> {
        let n = self.events.len();
        self.derive(self.root, 0, n, v).as_ref().clone()
    }

    fn derive(&mut self, node: usize, i: usize, j: usize, v: &Valuation) -> Rc<Vec<Derivation>> {
        let key = (node, i, j, v.fingerprint());
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let mut out: Vec<Derivation> = Vec::new();
        let mut seen: HashSet<(u64, Vec<u64>)> = HashSet::new();
        let mut push = |out: &mut Vec<Derivation>, d: Derivation| {
            if seen.insert((d.0, d.1.fingerprint())) {
                out.push(d);
            }
        };
        match self.nodes[node] {
            Node::Empty => {}
            Node::Eps => {
                if i == j {
                    push(&mut out, (0, v.clone()));
                }
            }
            Node::Term {
                ref cond,
                mark,
                store,
            } => {
                if j == i + 1 && cond.eval(&self.events[i], v) {
                    let mut next = v.clone();
                    if let Some(r) = store {
                        next.write(&[r], &self.events[i])
                            .expect("register within valuation");
                    }
                    push(&mut out, (if mark { 1 << i } else { 0 }, next));
                }
            }
            Node::Concat(a, b) => {
                for k in i..=j {
                    let left = self.derive(a, i, k, v);
                    for (m1, v1) in left.iter() {
                        let right = self.derive(b, k, j, v1);
                        for (m2, v2) in right.iter() {
                            push(&mut out, (m1 | m2, v2.clone()));
                        }
                    }
                }
            }
            Node::Or(a, b) => {
                for d in self.derive(a, i, j, v).iter() {
                    push(&mut out, d.clone());
                }
                for d in self.derive(b, i, j, v).iter() {
                    push(&mut out, d.clone());
                }
            }
            Node::Star(a) => {
                if i == j {
                    push(&mut out, (0, v.clone()));
                } else {
                    // An empty first iteration leaves the valuation unchanged, so
                    // only non-empty first pieces contribute.
                    for k in i + 1..=j {
                        let first = self.derive(a, i, k, v);
                        for (m1, v1) in first.iter() {
                            let rest = self.derive(node, k, j, v1);
                            for (m2, v2) in rest.iter() {
                                push(&mut out, (m1 | m2, v2.clone()));
                            }
                        }
                    }
                }
            }
            Node::Window(a, w) => {
                for d in self.derive(a, i, j, v).iter() {
                    if span(d.0) <= w {
                        push(&mut out, d.clone());
                    }
                }
            }
            Node::Neg(a, w) => {
                if (j - i) as u64 > w || self.derive(a, i, j, v).is_empty() {
                    push(&mut out, (0, v.clone()));
                }
            }
        }
        let rc = Rc::new(out);
        self.memo.insert(key, rc.clone());
        rc
    }
}

/// `max(M) - min(M) + 1` over a position bitmask; 0 for the empty set.
pub fn span(mask: u64) -> u64 {
    if mask == 0 {
        0
    } else {
        (63 - mask.leading_zeros() as u64) - mask.trailing_zeros() as u64 + 1
    }
}

fn flatten(e: &Sremo, window: Option<u64>, nodes: &mut Vec<Node>) -> Result<usize> {
    let node = match e {
        Sremo::Empty => Node::Empty,
        Sremo::Epsilon => Node::Eps,
        Sremo::Terminal {
            cond,
            output,
            store,
        } => Node::Term {
            cond: cond.clone(),
            mark: *output == Output::Mark,
            store: *store,
        },
        Sremo::Concat(a, b) => Node::Concat(flatten(a, window, nodes)?, flatten(b, window, nodes)?),
        Sremo::Or(a, b) => Node::Or(flatten(a, window, nodes)?, flatten(b, window, nodes)?),
        Sremo::Star(a) => Node::Star(flatten(a, window, nodes)?),
        Sremo::Windowed(a, w) => Node::Window(flatten(a, Some(*w), nodes)?, *w),
        Sremo::Negation(a) => {
            let w = window.ok_or(Error::NegationOutsideWindow)?;
            Node::Neg(flatten(a, window, nodes)?, w)
        }
        Sremo::Any(_) | Sremo::Next(_) => unreachable!("strategies are rewritten first"),
    };
    nodes.push(node);
    Ok(nodes.len() - 1)
}

fn to_positions(mask: u64) -> Vec<u64> {
    (0..64)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| b + 1)
        .collect()
}

/// Exact match set of `e` over `events`, starting from the empty valuation.
pub fn oracle_matches(pattern: &Pattern, events: &[Arc<Event>]) -> Result<MatchSet> {
    oracle_matches_capped(pattern, events, DEFAULT_ORACLE_CAP)
}

pub fn oracle_matches_capped(
    pattern: &Pattern,
    events: &[Arc<Event>],
    cap: usize,
) -> Result<MatchSet> {
    let mut o = Oracle::new(&pattern.expr, events, cap)?;
    let v = Valuation::empty(pattern.registers.len());
    Ok(o.derive_from(&v)
        .into_iter()
        .map(|(m, _)| to_positions(m))
        .collect())
}

/// Streaming matches detected at `k` (1-based): the union over suffixes
/// `S[m..=k]` with positions shifted to absolute indices.
///
/// With `marked_only`, only matches containing `k` are kept, which is the
/// acceptance condition of the streaming engine.
pub fn oracle_streaming_matches(
    pattern: &Pattern,
    stream: &[Arc<Event>],
    k: usize,
    marked_only: bool,
) -> Result<MatchSet> {
    let mut out = MatchSet::new();
    for m in 1..=k {
        let suffix = &stream[m - 1..k];
        for mut positions in oracle_matches(pattern, suffix)? {
            for p in positions.iter_mut() {
                *p += m as u64 - 1;
            }
            if !marked_only || positions.last() == Some(&(k as u64)) {
                out.insert(positions);
            }
        }
    }
    Ok(out)
}
