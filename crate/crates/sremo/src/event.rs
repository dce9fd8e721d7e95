// SPDX-License-Identifier: MIT OR Apache-2.0

//! Event schemas, typed values, streams, registers and valuations.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::io::Read;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Declared type of an event attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttrType {
    Str,
    Int,
    Real,
}

impl AttrType {
    pub fn is_numeric(self) -> bool {
        matches!(self, AttrType::Int | AttrType::Real)
    }

    /// Whether values of the two types may be compared.
    pub fn comparable(self, other: AttrType) -> bool {
        self == other || (self.is_numeric() && other.is_numeric())
    }

    fn keyword(self) -> &'static str {
        match self {
            AttrType::Str => "string",
            AttrType::Int => "int",
            AttrType::Real => "real",
        }
    }
}

impl fmt::Display for AttrType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Position of an attribute inside a [`Schema`].
pub type AttrId = usize;

/// Ordered list of typed attributes. Column order of stream files follows it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    attrs: Vec<(String, AttrType)>,
}

impl Schema {
    pub fn new<S: Into<String>>(attrs: impl IntoIterator<Item = (S, AttrType)>) -> Result<Self> {
        let attrs: Vec<(String, AttrType)> =
            attrs.into_iter().map(|(n, t)| (n.into(), t)).collect();
        if attrs.is_empty() {
            return Err(Error::Schema("schema needs at least one attribute".into()));
        }
        for (i, (name, _)) in attrs.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::Schema("empty attribute name".into()));
            }
            if attrs[..i].iter().any(|(n, _)| n == name) {
                return Err(Error::Schema(format!("duplicate attribute `{name}`")));
            }
        }
        Ok(Schema { attrs })
    }

    /// Parses the `name:type` per line format. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut attrs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, ty) = line.split_once(':').ok_or_else(|| {
                Error::Schema(format!("line {}: expected `name:type`", lineno + 1))
            })?;
            let ty = match ty.trim() {
                "string" => AttrType::Str,
                "int" => AttrType::Int,
                "real" => AttrType::Real,
                other => {
                    return Err(Error::Schema(format!(
                        "line {}: unknown type `{other}`",
                        lineno + 1
                    )))
                }
            };
            attrs.push((name.trim().to_string(), ty));
        }
        Schema::new(attrs)
    }

    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    pub fn attr(&self, name: &str) -> Option<AttrId> {
        self.attrs.iter().position(|(n, _)| n == name)
    }

    pub fn name(&self, id: AttrId) -> &str {
        &self.attrs[id].0
    }

    pub fn ty(&self, id: AttrId) -> AttrType {
        self.attrs[id].1
    }

    pub fn attrs(&self) -> impl Iterator<Item = (&str, AttrType)> {
        self.attrs.iter().map(|(n, t)| (n.as_str(), *t))
    }

    /// Parses one textual field into a value of the attribute's type.
    pub fn parse_value(&self, id: AttrId, field: &str) -> Result<Value> {
        let field = field.trim();
        let bad = || {
            Error::Schema(format!(
                "attribute `{}` expects {}, got `{field}`",
                self.name(id),
                self.ty(id)
            ))
        };
        Ok(match self.ty(id) {
            AttrType::Str => Value::Str(Arc::from(field)),
            AttrType::Int => Value::Int(field.parse().map_err(|_| bad())?),
            AttrType::Real => Value::Real(field.parse().map_err(|_| bad())?),
        })
    }

    /// Builds an event from already typed values, checking conformance.
    pub fn event(&self, index: u64, values: Vec<Value>) -> Result<Event> {
        if index == 0 {
            return Err(Error::Schema("event index must be at least 1".into()));
        }
        if values.len() != self.len() {
            return Err(Error::Schema(format!(
                "expected {} values, got {}",
                self.len(),
                values.len()
            )));
        }
        for (id, v) in values.iter().enumerate() {
            if v.ty() != self.ty(id) {
                return Err(Error::Schema(format!(
                    "attribute `{}` expects {}, got {}",
                    self.name(id),
                    self.ty(id),
                    v.ty()
                )));
            }
        }
        Ok(Event {
            index,
            values: values.into(),
        })
    }
}

/// Typed attribute value.
#[derive(Debug, Clone)]
pub enum Value {
    Str(Arc<str>),
    Int(i64),
    Real(f64),
}

impl Value {
    pub fn ty(&self) -> AttrType {
        match self {
            Value::Str(_) => AttrType::Str,
            Value::Int(_) => AttrType::Int,
            Value::Real(_) => AttrType::Real,
        }
    }

    pub fn str(s: &str) -> Value {
        Value::Str(Arc::from(s))
    }

    /// Orders two values, widening int to real. `None` for strings vs numbers and NaN.
    pub fn compare(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Str(a), Value::Str(b)) => Some(a.cmp(b)),
            (Value::Int(a), Value::Int(b)) => Some(a.cmp(b)),
            (Value::Int(a), Value::Real(b)) => (*a as f64).partial_cmp(b),
            (Value::Real(a), Value::Int(b)) => a.partial_cmp(&(*b as f64)),
            (Value::Real(a), Value::Real(b)) => a.partial_cmp(b),
            _ => None,
        }
    }
}

// Structural identity: reals compare by bit pattern so that conditions can be hashed.
impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Real(a), Value::Real(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Value::Str(s) => s.hash(state),
            Value::Int(i) => i.hash(state),
            Value::Real(r) => r.to_bits().hash(state),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Str(s) => write!(f, "\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"")),
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(r) => {
                if r.is_finite() && r.fract() == 0.0 {
                    write!(f, "{r:.1}")
                } else {
                    write!(f, "{r}")
                }
            }
        }
    }
}

/// An immutable event with its 1-based stream position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    pub index: u64,
    pub values: Arc<[Value]>,
}

impl Event {
    pub fn get(&self, attr: AttrId) -> &Value {
        &self.values[attr]
    }

    /// Same payload at another stream position.
    pub fn reindexed(&self, index: u64) -> Event {
        Event {
            index,
            values: self.values.clone(),
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}(", self.index)?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            match v {
                Value::Str(s) => f.write_str(s)?,
                other => write!(f, "{other}")?,
            }
        }
        f.write_str(")")
    }
}

/// Reads a header-less CSV stream. Row `n` becomes event index `n`.
pub fn read_stream<R: Read>(schema: &Schema, reader: R) -> Result<Vec<Arc<Event>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i as u64 + 1;
        let rec = rec.map_err(|e| Error::Stream {
            row,
            msg: e.to_string(),
        })?;
        if rec.len() != schema.len() {
            return Err(Error::Stream {
                row,
                msg: format!("expected {} columns, got {}", schema.len(), rec.len()),
            });
        }
        let values = rec
            .iter()
            .enumerate()
            .map(|(id, field)| schema.parse_value(id, field))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Stream {
                row,
                msg: e.to_string(),
            })?;
        out.push(Arc::new(Event {
            index: row,
            values: values.into(),
        }));
    }
    Ok(out)
}

/// Index of a register inside a [`RegisterSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegId(pub u32);

impl RegId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// Ordered, duplicate-free register names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegisterSet {
    names: Vec<String>,
}

impl RegisterSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut set = RegisterSet::new();
        for n in names {
            let n = n.into();
            if set.get(&n).is_some() {
                return Err(Error::Config(format!("duplicate register `{n}`")));
            }
            set.names.push(n);
        }
        Ok(set)
    }

    /// Returns the id of `name`, adding it if new.
    pub fn intern(&mut self, name: &str) -> RegId {
        match self.get(name) {
            Some(id) => id,
            None => {
                self.names.push(name.to_string());
                RegId(self.names.len() as u32 - 1)
            }
        }
    }

    /// Adds a name that is guaranteed fresh by appending `'` until unique.
    pub fn push_fresh(&mut self, name: &str) -> RegId {
        let mut n = name.to_string();
        while self.get(&n).is_some() {
            n.push('\'');
        }
        self.names.push(n);
        RegId(self.names.len() as u32 - 1)
    }

    pub fn get(&self, name: &str) -> Option<RegId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| RegId(i as u32))
    }

    pub fn name(&self, id: RegId) -> &str {
        &self.names[id.idx()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = RegId> {
        (0..self.names.len() as u32).map(RegId)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Target of a lookup: the current head event or a register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Head,
    Reg(RegId),
}

/// Partial map from registers to events. Absent entries are the empty register ♯.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Valuation {
    slots: Vec<Option<Arc<Event>>>,
}

impl Valuation {
    /// All registers empty.
    pub fn empty(n: usize) -> Self {
        Valuation {
            slots: vec![None; n],
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn get(&self, r: RegId) -> Option<&Arc<Event>> {
        self.slots.get(r.idx()).and_then(|s| s.as_ref())
    }

    /// `v[W <- u]` as a new valuation.
    pub fn update(&self, writes: &[RegId], u: &Arc<Event>) -> Result<Valuation> {
        let mut next = self.clone();
        next.write(writes, u)?;
        Ok(next)
    }

    /// In-place form of [`Valuation::update`].
    pub fn write(&mut self, writes: &[RegId], u: &Arc<Event>) -> Result<()> {
        for r in writes {
            let slot = self
                .slots
                .get_mut(r.idx())
                .ok_or_else(|| Error::Config(format!("unknown register id {}", r.0)))?;
            *slot = Some(u.clone());
        }
        Ok(())
    }

    pub fn lookup<'a>(
        &'a self,
        slot: Slot,
        head: Option<&'a Arc<Event>>,
    ) -> Result<Option<&'a Arc<Event>>> {
        match slot {
            Slot::Head => Ok(head),
            Slot::Reg(r) => {
                if r.idx() >= self.slots.len() {
                    return Err(Error::Config(format!("unknown register id {}", r.0)));
                }
                Ok(self.get(r))
            }
        }
    }

    /// Extends with empty registers up to `n`.
    pub fn widened(&self, n: usize) -> Valuation {
        let mut v = self.clone();
        if v.slots.len() < n {
            v.slots.resize(n, None);
        }
        v
    }

    /// Stored stream indices, 0 for ♯. Identifies a valuation within one stream.
    pub fn fingerprint(&self) -> Vec<u64> {
        self.fingerprint_iter().collect()
    }

    /// Allocation-free form of [`Valuation::fingerprint`].
    pub fn fingerprint_iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.slots.iter().map(|s| s.as_ref().map_or(0, |e| e.index))
    }
}

/// A reported complex event.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Match {
    pub detection: u64,
    pub indices: Vec<u64>,
}
