// SPDX-License-Identifier: MIT OR Apache-2.0

//! Transition guards: boolean formulas over the head event and registers,
//! plus the minterm machinery used by determinization.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::event::{AttrId, AttrType, Event, RegId, RegisterSet, Schema, Valuation, Value};

/// Default cap on the number of base conditions fed to [`minterms`].
pub const DEFAULT_MINTERM_CAP: usize = 16;

/// Comparison operator of an atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    /// Operator obtained by swapping the operands.
    pub fn flip(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
            op => op,
        }
    }

    /// Logical complement.
    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
        }
    }

    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// One side of a comparison.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Operand {
    /// Attribute of the current event.
    Head(AttrId),
    /// Attribute of the event stored in a register.
    Reg(RegId, AttrId),
    Lit(Value),
}

impl Operand {
    fn resolve<'a>(&'a self, head: &'a Event, v: &'a Valuation) -> Option<&'a Value> {
        match self {
            Operand::Head(a) => Some(head.get(*a)),
            Operand::Reg(r, a) => v.get(*r).map(|e| e.get(*a)),
            Operand::Lit(x) => Some(x),
        }
    }

    fn ty(&self, schema: &Schema) -> AttrType {
        match self {
            Operand::Head(a) | Operand::Reg(_, a) => schema.ty(*a),
            Operand::Lit(v) => v.ty(),
        }
    }
}

/// Binary comparison. A literal, if present, is always on the right.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub lhs: Operand,
    pub op: CmpOp,
    pub rhs: Operand,
}

impl Atom {
    /// Builds a normalized atom. Two literals are rejected.
    pub fn new(lhs: Operand, op: CmpOp, rhs: Operand) -> Result<Atom> {
        match (&lhs, &rhs) {
            (Operand::Lit(_), Operand::Lit(_)) => Err(Error::TypeMismatch(
                "a comparison needs the head or a register on one side".into(),
            )),
            (Operand::Lit(_), _) => Ok(Atom {
                lhs: rhs,
                op: op.flip(),
                rhs: lhs,
            }),
            _ => Ok(Atom { lhs, op, rhs }),
        }
    }

    pub fn eval(&self, head: &Event, v: &Valuation) -> bool {
        match (self.lhs.resolve(head, v), self.rhs.resolve(head, v)) {
            (Some(a), Some(b)) => a.compare(b).is_some_and(|o| self.op.holds(o)),
            _ => false,
        }
    }
}

/// Boolean condition tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Condition {
    True,
    Atom(Atom),
    Not(Box<Condition>),
    And(Box<Condition>, Box<Condition>),
    Or(Box<Condition>, Box<Condition>),
}

impl Condition {
    pub fn atom(lhs: Operand, op: CmpOp, rhs: Operand) -> Result<Condition> {
        Atom::new(lhs, op, rhs).map(Condition::Atom)
    }

    pub fn negated(self) -> Condition {
        Condition::Not(Box::new(self))
    }

    pub fn and(self, other: Condition) -> Condition {
        Condition::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Condition) -> Condition {
        Condition::Or(Box::new(self), Box::new(other))
    }

    /// Conjunction of all items; `True` when empty.
    pub fn all(items: impl IntoIterator<Item = Condition>) -> Condition {
        items
            .into_iter()
            .reduce(Condition::and)
            .unwrap_or(Condition::True)
    }

    /// Satisfaction by head `u` under valuation `v`. Atoms reading ♯ are false.
    pub fn eval(&self, u: &Event, v: &Valuation) -> bool {
        match self {
            Condition::True => true,
            Condition::Atom(a) => a.eval(u, v),
            Condition::Not(c) => !c.eval(u, v),
            Condition::And(a, b) => a.eval(u, v) && b.eval(u, v),
            Condition::Or(a, b) => a.eval(u, v) || b.eval(u, v),
        }
    }

    /// Registers read, in order of first appearance.
    pub fn registers(&self, out: &mut Vec<RegId>) {
        match self {
            Condition::True => {}
            Condition::Atom(a) => {
                for side in [&a.lhs, &a.rhs] {
                    if let Operand::Reg(r, _) = side {
                        if !out.contains(r) {
                            out.push(*r);
                        }
                    }
                }
            }
            Condition::Not(c) => c.registers(out),
            Condition::And(a, b) | Condition::Or(a, b) => {
                a.registers(out);
                b.registers(out);
            }
        }
    }

    pub fn map_registers(&self, f: &impl Fn(RegId) -> RegId) -> Condition {
        let side = |o: &Operand| match o {
            Operand::Reg(r, a) => Operand::Reg(f(*r), *a),
            other => other.clone(),
        };
        match self {
            Condition::True => Condition::True,
            Condition::Atom(a) => Condition::Atom(Atom {
                lhs: side(&a.lhs),
                op: a.op,
                rhs: side(&a.rhs),
            }),
            Condition::Not(c) => c.map_registers(f).negated(),
            Condition::And(a, b) => a.map_registers(f).and(b.map_registers(f)),
            Condition::Or(a, b) => a.map_registers(f).or(b.map_registers(f)),
        }
    }

    /// Checks operand types against the schema.
    pub fn type_check(&self, schema: &Schema) -> Result<()> {
        match self {
            Condition::True => Ok(()),
            Condition::Atom(a) => {
                let (l, r) = (a.lhs.ty(schema), a.rhs.ty(schema));
                if l.comparable(r) {
                    Ok(())
                } else {
                    Err(Error::TypeMismatch(format!("cannot compare {l} with {r}")))
                }
            }
            Condition::Not(c) => c.type_check(schema),
            Condition::And(a, b) | Condition::Or(a, b) => {
                a.type_check(schema)?;
                b.type_check(schema)
            }
        }
    }

    pub fn display<'a>(&'a self, names: Names<'a>) -> impl fmt::Display + 'a {
        CondDisplay { cond: self, names }
    }
}

/// Name tables needed to print conditions.
#[derive(Debug, Clone, Copy)]
pub struct Names<'a> {
    pub schema: &'a Schema,
    pub regs: &'a RegisterSet,
}

struct CondDisplay<'a> {
    cond: &'a Condition,
    names: Names<'a>,
}

impl CondDisplay<'_> {
    fn operand(&self, o: &Operand, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match o {
            Operand::Head(a) => f.write_str(self.names.schema.name(*a)),
            Operand::Reg(r, a) => write!(
                f,
                "{}.{}",
                self.names.regs.name(*r),
                self.names.schema.name(*a)
            ),
            Operand::Lit(v) => write!(f, "{v}"),
        }
    }

    fn write(&self, c: &Condition, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match c {
            Condition::True => f.write_str("true"),
            Condition::Atom(a) => {
                self.operand(&a.lhs, f)?;
                write!(f, " {} ", a.op.symbol())?;
                self.operand(&a.rhs, f)
            }
            Condition::Not(inner) => {
                f.write_str("!(")?;
                self.write(inner, f)?;
                f.write_str(")")
            }
            Condition::And(a, b) | Condition::Or(a, b) => {
                let op = if matches!(c, Condition::And(..)) {
                    "&&"
                } else {
                    "||"
                };
                f.write_str("(")?;
                self.write(a, f)?;
                write!(f, " {op} ")?;
                self.write(b, f)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for CondDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.cond, f)
    }
}

/// Signed conjunction over a shared base of conditions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Minterm {
    base: Arc<[Condition]>,
    /// Bit `i` set means base condition `i` appears positively.
    signs: u64,
}

impl Minterm {
    pub fn base(&self) -> &[Condition] {
        &self.base
    }

    pub fn signs(&self) -> u64 {
        self.signs
    }

    pub fn is_positive(&self, i: usize) -> bool {
        self.signs >> i & 1 == 1
    }

    pub fn eval(&self, u: &Event, v: &Valuation) -> bool {
        self.base
            .iter()
            .enumerate()
            .all(|(i, c)| c.eval(u, v) == self.is_positive(i))
    }

    /// Whether the minterm entails `phi`, which must be a base member.
    pub fn entails(&self, phi: &Condition) -> Result<bool> {
        let i = self
            .base
            .iter()
            .position(|c| c == phi)
            .ok_or_else(|| Error::Logic("condition is not in the minterm base".into()))?;
        Ok(self.is_positive(i))
    }

    /// Signed literals `(condition, positive)`.
    pub fn literals(&self) -> impl Iterator<Item = (&Condition, bool)> {
        self.base
            .iter()
            .enumerate()
            .map(|(i, c)| (c, self.is_positive(i)))
    }

    pub fn to_condition(&self) -> Condition {
        Condition::all(self.literals().map(
            |(c, pos)| {
                if pos {
                    c.clone()
                } else {
                    c.clone().negated()
                }
            },
        ))
    }

    pub fn map_registers(&self, f: &impl Fn(RegId) -> RegId) -> Minterm {
        Minterm {
            base: self.base.iter().map(|c| c.map_registers(f)).collect(),
            signs: self.signs,
        }
    }

    /// Same base, different sign vector.
    pub fn excludes(&self, other: &Minterm) -> bool {
        (Arc::ptr_eq(&self.base, &other.base) || self.base == other.base)
            && self.signs != other.signs
    }
}

/// All signed combinations of the deduplicated base.
///
/// Ordered so that the first base condition flips fastest, starting from
/// the all-positive minterm. `state` names the origin in explosion errors.
pub fn minterms(base: &[Condition], cap: usize, state: &str) -> Result<Vec<Minterm>> {
    let mut uniq: Vec<Condition> = Vec::with_capacity(base.len());
    for c in base {
        if !uniq.contains(c) {
            uniq.push(c.clone());
        }
    }
    let n = uniq.len();
    if n > cap || n > 63 {
        return Err(Error::MintermExplosion {
            state: state.to_string(),
            size: n,
            cap,
        });
    }
    let base: Arc<[Condition]> = uniq.into();
    let mask = (1u64 << n) - 1;
    Ok((0..1u64 << n)
        .map(|k| Minterm {
            base: base.clone(),
            signs: !k & mask,
        })
        .collect())
}

/// Transition label.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Guard {
    Epsilon,
    Cond(Condition),
    Minterm(Minterm),
}

impl Guard {
    pub fn is_epsilon(&self) -> bool {
        matches!(self, Guard::Epsilon)
    }

    /// Evaluates a consuming guard. Epsilon never consumes.
    pub fn eval(&self, u: &Event, v: &Valuation) -> bool {
        match self {
            Guard::Epsilon => false,
            Guard::Cond(c) => c.eval(u, v),
            Guard::Minterm(m) => m.eval(u, v),
        }
    }

    /// Condition form; `None` for epsilon.
    pub fn condition(&self) -> Option<Condition> {
        match self {
            Guard::Epsilon => None,
            Guard::Cond(c) => Some(c.clone()),
            Guard::Minterm(m) => Some(m.to_condition()),
        }
    }

    pub fn map_registers(&self, f: &impl Fn(RegId) -> RegId) -> Guard {
        match self {
            Guard::Epsilon => Guard::Epsilon,
            Guard::Cond(c) => Guard::Cond(c.map_registers(f)),
            Guard::Minterm(m) => Guard::Minterm(m.map_registers(f)),
        }
    }

    pub fn registers(&self, out: &mut Vec<RegId>) {
        match self {
            Guard::Epsilon => {}
            Guard::Cond(c) => c.registers(out),
            Guard::Minterm(m) => m.base().iter().for_each(|c| c.registers(out)),
        }
    }

    pub fn display<'a>(&'a self, names: Names<'a>) -> String {
        match self {
            Guard::Epsilon => "ε".to_string(),
            Guard::Cond(c) => c.display(names).to_string(),
            Guard::Minterm(m) => {
                if m.base().is_empty() {
                    return "true".to_string();
                }
                m.literals()
                    .map(|(c, pos)| {
                        let s = c.display(names).to_string();
                        if pos {
                            s
                        } else {
                            format!("!({s})")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" && ")
            }
        }
    }
}

/// Conjunctive literals of a condition: `And` is flattened, `Not` strips to a negative sign.
fn literals_of(c: &Condition, positive: bool, out: &mut Vec<(Condition, bool)>) {
    match c {
        Condition::And(a, b) if positive => {
            literals_of(a, true, out);
            literals_of(b, true, out);
        }
        Condition::Not(inner) => literals_of(inner, !positive, out),
        other => out.push((other.clone(), positive)),
    }
}

fn guard_literals(g: &Guard) -> Vec<(Condition, bool)> {
    let mut out = Vec::new();
    match g {
        Guard::Epsilon => {}
        Guard::Cond(c) => literals_of(c, true, &mut out),
        Guard::Minterm(m) => {
            for (c, pos) in m.literals() {
                literals_of(c, pos, &mut out);
            }
        }
    }
    out
}

/// Constant bound `head.attr op literal` with the sign folded into the operator.
fn bound(lit: &(Condition, bool)) -> Option<(AttrId, CmpOp, &Value)> {
    match &lit.0 {
        Condition::Atom(Atom {
            lhs: Operand::Head(a),
            op,
            rhs: Operand::Lit(v),
        }) => Some((*a, if lit.1 { *op } else { op.negate() }, v)),
        _ => None,
    }
}

/// Whether two constant bounds on one attribute admit no common value.
/// Conservative: `false` when unsure.
fn bounds_conflict(op1: CmpOp, c1: &Value, op2: CmpOp, c2: &Value) -> bool {
    use CmpOp::*;
    let Some(ord) = c1.compare(c2) else {
        return false;
    };
    match (op1, op2) {
        (Eq, Eq) => ord != Ordering::Equal,
        (Eq, op) => !op.holds(ord),
        (op, Eq) => !op.holds(ord.reverse()),
        (Ne, _) | (_, Ne) => false,
        (Lt | Le, Gt | Ge) => upper_below_lower(op1, ord, op2),
        (Gt | Ge, Lt | Le) => upper_below_lower(op2, ord.reverse(), op1),
        _ => false,
    }
}

/// `x op_u c_u` and `x op_l c_l` with `ord = c_u cmp c_l`.
fn upper_below_lower(op_u: CmpOp, ord: Ordering, op_l: CmpOp) -> bool {
    match ord {
        Ordering::Less => true,
        Ordering::Equal => op_u == CmpOp::Lt || op_l == CmpOp::Gt,
        Ordering::Greater => false,
    }
}

fn literals_conflict(a: &(Condition, bool), b: &(Condition, bool)) -> bool {
    if a.0 == b.0 {
        return a.1 != b.1;
    }
    match (bound(a), bound(b)) {
        (Some((x, op1, c1)), Some((y, op2, c2))) if x == y => bounds_conflict(op1, c1, op2, c2),
        _ => false,
    }
}

/// Syntactic proof that two guards can never hold together.
pub fn mutually_exclusive(g1: &Guard, g2: &Guard) -> bool {
    if let (Guard::Minterm(a), Guard::Minterm(b)) = (g1, g2) {
        if a.excludes(b) {
            return true;
        }
    }
    let (l1, l2) = (guard_literals(g1), guard_literals(g2));
    if l1
        .iter()
        .any(|a| l2.iter().any(|b| literals_conflict(a, b)))
    {
        return true;
    }
    let whole = |g: &Guard, lits: &[(Condition, bool)]| {
        g.condition()
            .is_some_and(|c| lits.iter().any(|(x, pos)| !pos && *x == c))
    };
    whole(g2, &l1) || whole(g1, &l2)
}

/// Syntactic proof that a guard is unsatisfiable (contradictory literals or bounds).
pub fn syntactically_unsat(g: &Guard) -> bool {
    let lits = guard_literals(g);
    lits.iter()
        .enumerate()
        .any(|(i, a)| lits[i + 1..].iter().any(|b| literals_conflict(a, b)))
}
