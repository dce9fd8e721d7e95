// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seeded generators shared by the integration tests.

#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sremo::condition::{CmpOp, Condition, Operand};
use sremo::event::{RegId, RegisterSet};
use sremo::expr::{Output, Sremo};
use sremo::{Event, Pattern, Schema, Value};

pub const TYPE: usize = 0;
pub const ID: usize = 1;
pub const PRICE: usize = 2;

pub fn schema() -> Arc<Schema> {
    Arc::new(Schema::parse("type:string\nid:int\nprice:real").unwrap())
}

fn row(t: &str, id: i64, price: f64) -> Vec<Value> {
    vec![Value::str(t), Value::Int(id), Value::Real(price)]
}

/// Five distinct events.
pub fn universe5() -> Vec<Vec<Value>> {
    vec![
        row("B", 1, 10.0),
        row("S", 1, 20.0),
        row("B", 2, 20.0),
        row("S", 2, 10.0),
        row("C", 1, 30.0),
    ]
}

/// Three distinct events.
pub fn universe3() -> Vec<Vec<Value>> {
    vec![row("B", 1, 10.0), row("S", 1, 20.0), row("S", 2, 10.0)]
}

pub fn stream(s: &Schema, rows: &[Vec<Value>]) -> Vec<Arc<Event>> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| Arc::new(s.event(i as u64 + 1, r.clone()).unwrap()))
        .collect()
}

pub fn random_stream(
    rng: &mut ChaCha8Rng,
    s: &Schema,
    universe: &[Vec<Value>],
    max_len: usize,
) -> Vec<Arc<Event>> {
    let n = rng.gen_range(0..=max_len);
    let rows: Vec<Vec<Value>> = (0..n)
        .map(|_| universe.choose(rng).unwrap().clone())
        .collect();
    stream(s, &rows)
}

/// Every string over `universe` of length at most `max_len`, shortest first.
pub fn all_strings(s: &Schema, universe: &[Vec<Value>], max_len: usize) -> Vec<Vec<Arc<Event>>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_len {
        let next: Vec<Vec<usize>> = layer
            .iter()
            .flat_map(|w| {
                (0..universe.len()).map(move |i| {
                    let mut w = w.clone();
                    w.push(i);
                    w
                })
            })
            .collect();
        for w in &next {
            let rows: Vec<Vec<Value>> = w.iter().map(|&i| universe[i].clone()).collect();
            out.push(stream(s, &rows));
        }
        layer = next;
    }
    out
}

/// Shape limits for [`Gen::pattern`].
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub depth: u32,
    pub registers: u32,
    pub strategies: bool,
    pub negation: bool,
    pub window: Option<(u64, u64)>,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            depth: 4,
            registers: 2,
            strategies: true,
            negation: true,
            window: Some((2, 5)),
        }
    }
}

pub struct Gen<'a> {
    pub rng: &'a mut ChaCha8Rng,
    pub schema: Arc<Schema>,
    pub shape: Shape,
}

impl Gen<'_> {
    fn lit(&mut self, attr: usize) -> Value {
        match attr {
            TYPE => Value::str(["B", "S", "C"].choose(self.rng).unwrap()),
            ID => Value::Int(self.rng.gen_range(1..=2)),
            _ => Value::Real([10.0, 15.0, 20.0, 30.0].choose(self.rng).copied().unwrap()),
        }
    }

    fn op(&mut self, attr: usize) -> CmpOp {
        if attr == TYPE {
            *[CmpOp::Eq, CmpOp::Ne].choose(self.rng).unwrap()
        } else {
            *[
                CmpOp::Eq,
                CmpOp::Ne,
                CmpOp::Lt,
                CmpOp::Le,
                CmpOp::Gt,
                CmpOp::Ge,
            ]
            .choose(self.rng)
            .unwrap()
        }
    }

    pub fn atom(&mut self) -> Condition {
        if self.rng.gen_bool(0.1) {
            return Condition::True;
        }
        let attr = self.rng.gen_range(0..3);
        let op = self.op(attr);
        let rhs = if self.shape.registers > 0 && self.rng.gen_bool(0.3) {
            let r = RegId(self.rng.gen_range(0..self.shape.registers));
            Operand::Reg(r, attr)
        } else {
            Operand::Lit(self.lit(attr))
        };
        Condition::atom(Operand::Head(attr), op, rhs).unwrap()
    }

    pub fn condition(&mut self) -> Condition {
        match self.rng.gen_range(0..10) {
            0 => self.atom().negated(),
            1 => self.atom().and(self.atom()),
            2 => self.atom().or(self.atom()),
            _ => self.atom(),
        }
    }

    pub fn terminal(&mut self) -> Sremo {
        let output = if self.rng.gen_bool(0.6) {
            Output::Mark
        } else {
            Output::Skip
        };
        let store = if self.shape.registers > 0 && self.rng.gen_bool(0.35) {
            Some(RegId(self.rng.gen_range(0..self.shape.registers)))
        } else {
            None
        };
        Sremo::terminal(self.condition(), output, store)
    }

    pub fn expr(&mut self, depth: u32, windowed: bool) -> Sremo {
        if depth <= 1 || self.rng.gen_bool(0.25) {
            return match self.rng.gen_range(0..20) {
                0 => Sremo::Epsilon,
                _ => self.terminal(),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..14) {
            0..=3 => Sremo::concat(self.expr(d, windowed), self.expr(d, windowed)),
            4..=6 => Sremo::or(self.expr(d, windowed), self.expr(d, windowed)),
            7..=8 => Sremo::star(self.expr(d, windowed)),
            9..=10 if self.shape.strategies => {
                let n = self.rng.gen_range(2..=3);
                Sremo::Any((0..n).map(|_| self.expr(d.min(2), windowed)).collect())
            }
            11 if self.shape.strategies => {
                let n = self.rng.gen_range(2..=3);
                let parts = (0..n)
                    .map(|_| {
                        if windowed && self.rng.gen_bool(0.3) {
                            self.expr(2, windowed)
                        } else {
                            self.terminal()
                        }
                    })
                    .collect();
                Sremo::Next(parts)
            }
            12 if self.shape.negation && windowed => Sremo::negation(self.expr(d.min(2), windowed)),
            _ => Sremo::concat(self.expr(d, windowed), self.terminal()),
        }
    }

    fn registers(&self) -> RegisterSet {
        RegisterSet::from_names((1..=self.shape.registers).map(|i| format!("r{i}"))).unwrap()
    }

    /// A random pattern that passes validation.
    pub fn pattern(&mut self) -> Pattern {
        loop {
            let window = self
                .shape
                .window
                .filter(|_| self.rng.gen_bool(0.3))
                .map(|(lo, hi)| self.rng.gen_range(lo..=hi));
            let body = self.expr(self.shape.depth, window.is_some());
            let expr = match window {
                Some(w) => Sremo::windowed(body, w),
                None => body,
            };
            let p = Pattern::new(expr, self.registers(), self.schema.clone());
            if p.validate().is_ok() {
                return p;
            }
        }
    }

    /// A random pattern with a top-level window in `lo..=hi`.
    pub fn windowed_pattern(&mut self, lo: u64, hi: u64) -> Pattern {
        loop {
            let w = self.rng.gen_range(lo..=hi);
            let body = self.expr(self.shape.depth, true);
            let p = Pattern::new(
                Sremo::windowed(body, w),
                self.registers(),
                self.schema.clone(),
            );
            if p.validate().is_ok() {
                return p;
            }
        }
    }
}
