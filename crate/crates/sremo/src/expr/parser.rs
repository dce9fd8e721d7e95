// SPDX-License-Identifier: MIT OR Apache-2.0

//! Pattern DSL.
//!
//! ```text
//! pattern  := expr ["within" INT]
//! expr     := seq {"|" seq}
//! seq      := unary {";" unary}
//! unary    := atom {"*" | "+"}
//! atom     := "(" expr ")" | "any(" expr {"," expr} ")" | "next(" expr {"," expr} ")"
//!           | "!" atom | "eps" | "none" | terminal
//! terminal := "{" cond "}" [":mark" | ":skip"] ["->" REG]
//! cond     := conj {"||" conj}
//! conj     := neg {"&&" neg}
//! neg      := "!" neg | "(" cond ")" | "true" | operand OP operand
//! operand  := ATTR | REG "." ATTR | INT | REAL | STRING
//! ```

use std::sync::Arc;

use super::ast::{Output, Pattern, Sremo};
use crate::condition::{Atom, CmpOp, Condition, Operand};
use crate::error::{Error, Result};
use crate::event::{RegisterSet, Schema, Value};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Real(f64),
    Str(String),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 22] = [
    "->", "==", "!=", "<=", ">=", "&&", "||", "(", ")", "{", "}", ",", ";", "|", "*", "+", "!",
    ":", ".", "<", ">", "=",
];

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, msg: String| Error::Syntax { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit()
            || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let mut real = false;
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                real = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '-' || chars[j] == '+') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    real = true;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            if real {
                Tok::Real(
                    s.parse()
                        .map_err(|_| err(line, col, format!("bad number `{s}`")))?,
                )
            } else {
                Tok::Int(
                    s.parse()
                        .map_err(|_| err(line, col, format!("bad integer `{s}`")))?,
                )
            }
        } else if c == '"' {
            i += 1;
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(err(start_line, start_col, "unterminated string".into()))
                    }
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => {
                        match chars.get(i + 1) {
                            Some(&e @ ('"' | '\\')) => s.push(e),
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            _ => return Err(err(line, col + i - start, "bad escape".into())),
                        }
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            Tok::Str(s)
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let sym = SYMBOLS
                .iter()
                .find(|s| rest.starts_with(*s))
                .ok_or_else(|| err(line, col, format!("unexpected character `{c}`")))?;
            i += sym.len();
            Tok::Sym(sym)
        };
        col += i - start;
        out.push(Token {
            tok,
            line: start_line,
            col: start_col,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    schema: &'a Schema,
    regs: RegisterSet,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        let t = &self.toks[self.pos];
        Err(Error::Syntax {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        })
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Real(r) => format!("`{r}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(s) if *s == sym) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<()> {
        if self.eat(sym) {
            Ok(())
        } else {
            self.error(format!("expected `{sym}`, found {}", self.describe()))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn pattern(&mut self) -> Result<Sremo> {
        let e = self.expr()?;
        let e = if self.is_keyword("within") {
            self.next();
            match self.peek().clone() {
                Tok::Int(w) if w >= 1 => {
                    self.next();
                    Sremo::windowed(e, w as u64)
                }
                _ => return self.error("window must be a positive integer"),
            }
        } else {
            e
        };
        if *self.peek() != Tok::Eof {
            return self.error(format!("unexpected {}", self.describe()));
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Sremo> {
        let mut e = self.seq()?;
        while self.eat("|") {
            e = Sremo::or(e, self.seq()?);
        }
        Ok(e)
    }

    fn seq(&mut self) -> Result<Sremo> {
        let mut e = self.unary()?;
        while self.eat(";") {
            e = Sremo::concat(e, self.unary()?);
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Sremo> {
        let mut e = self.atom()?;
        loop {
            if self.eat("*") {
                e = Sremo::star(e);
            } else if self.eat("+") {
                e = Sremo::plus(e);
            } else {
                return Ok(e);
            }
        }
    }

    fn atom(&mut self) -> Result<Sremo> {
        if self.eat("(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(e);
        }
        if self.eat("!") {
            return Ok(Sremo::negation(self.atom()?));
        }
        if self.eat("{") {
            return self.terminal();
        }
        if let Tok::Ident(kw) = self.peek().clone() {
            match kw.as_str() {
                "eps" => {
                    self.next();
                    return Ok(Sremo::Epsilon);
                }
                "none" => {
                    self.next();
                    return Ok(Sremo::Empty);
                }
                "any" | "next" => {
                    self.next();
                    self.expect("(")?;
                    let mut parts = vec![self.expr()?];
                    while self.eat(",") {
                        parts.push(self.expr()?);
                    }
                    self.expect(")")?;
                    return Ok(if kw == "any" {
                        Sremo::Any(parts)
                    } else {
                        Sremo::Next(parts)
                    });
                }
                _ => {}
            }
        }
        self.error(format!("expected an expression, found {}", self.describe()))
    }

    fn terminal(&mut self) -> Result<Sremo> {
        let cond = self.cond()?;
        self.expect("}")?;
        let mut output = Output::Skip;
        if self.eat(":") {
            match self.peek() {
                Tok::Ident(s) if s == "mark" => output = Output::Mark,
                Tok::Ident(s) if s == "skip" => output = Output::Skip,
                _ => return self.error("expected `mark` or `skip` after `:`"),
            }
            self.next();
        }
        let mut store = None;
        if self.eat("->") {
            match self.peek().clone() {
                Tok::Ident(name) => {
                    self.next();
                    store = Some(self.regs.intern(&name));
                }
                _ => return self.error("expected a register name after `->`"),
            }
        }
        Ok(Sremo::terminal(cond, output, store))
    }

    fn cond(&mut self) -> Result<Condition> {
        let mut c = self.conj()?;
        while self.eat("||") {
            c = c.or(self.conj()?);
        }
        Ok(c)
    }

    fn conj(&mut self) -> Result<Condition> {
        let mut c = self.neg()?;
        while self.eat("&&") {
            c = c.and(self.neg()?);
        }
        Ok(c)
    }

    fn neg(&mut self) -> Result<Condition> {
        if self.eat("!") {
            return Ok(self.neg()?.negated());
        }
        if self.eat("(") {
            let c = self.cond()?;
            self.expect(")")?;
            return Ok(c);
        }
        if self.is_keyword("true") {
            self.next();
            return Ok(Condition::True);
        }
        let at = (self.toks[self.pos].line, self.toks[self.pos].col);
        let lhs = self.operand()?;
        let op = match self.peek() {
            Tok::Sym("==") | Tok::Sym("=") => CmpOp::Eq,
            Tok::Sym("!=") => CmpOp::Ne,
            Tok::Sym("<") => CmpOp::Lt,
            Tok::Sym("<=") => CmpOp::Le,
            Tok::Sym(">") => CmpOp::Gt,
            Tok::Sym(">=") => CmpOp::Ge,
            _ => return self.error(format!("expected a comparison, found {}", self.describe())),
        };
        self.next();
        let rhs = self.operand()?;
        let atom = Atom::new(lhs, op, rhs).map_err(|e| Error::Syntax {
            line: at.0,
            col: at.1,
            msg: e.to_string(),
        })?;
        let cond = Condition::Atom(atom);
        cond.type_check(self.schema)?;
        Ok(cond)
    }

    fn attr(&mut self, name: &str) -> Result<usize> {
        self.schema
            .attr(name)
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    fn operand(&mut self) -> Result<Operand> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.next();
                Ok(Operand::Lit(Value::Int(i)))
            }
            Tok::Real(r) => {
                self.next();
                Ok(Operand::Lit(Value::Real(r)))
            }
            Tok::Str(s) => {
                self.next();
                Ok(Operand::Lit(Value::str(&s)))
            }
            Tok::Ident(name) => {
                self.next();
                if self.eat(".") {
                    match self.peek().clone() {
                        Tok::Ident(attr) => {
                            self.next();
                            let a = self.attr(&attr)?;
                            Ok(Operand::Reg(self.regs.intern(&name), a))
                        }
                        _ => self.error("expected an attribute name after `.`"),
                    }
                } else {
                    Ok(Operand::Head(self.attr(&name)?))
                }
            }
            _ => self.error(format!("expected an operand, found {}", self.describe())),
        }
    }
}

/// Parses and validates pattern text against a schema.
pub fn parse_pattern(text: &str, schema: &Arc<Schema>) -> Result<Pattern> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        schema,
        regs: RegisterSet::new(),
    };
    let expr = p.pattern()?;
    let pattern = Pattern::new(expr, p.regs, schema.clone());
    pattern.validate()?;
    Ok(pattern)
}
