//! Text format for systems.
//!
//! ```text
//! functor Ds Id
//! state x  = dist { x1: 0.5, x2: 0.5 }
//! state x1 = dist { }
//! state x2 = dist { x2: 1 }
//! ```
//!
//! Values are parsed against the declared functor, so a bare identifier is a
//! state at `Id` positions and an atom at constant positions. Decimal
//! weights are read as exact rationals.

mod lexer;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::coalgebra::Coalgebra;
use crate::error::Error;
use crate::functor::{BValue, FunctorExpr};
use crate::state::{is_identifier, StateId, SymbolSet};
use crate::weight::{parse_fraction, Weight};
use lexer::{tokenize, Tok, Token};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError { line, col, message: message.into() }
    }
}

/// Unresolved functor syntax; set names are looked up after all declarations.
enum FSyntax {
    Id,
    Set(String, usize, usize),
    Product(Box<FSyntax>, Box<FSyntax>),
    Coproduct(Box<FSyntax>, Box<FSyntax>),
    Exponent(Box<FSyntax>, String, usize, usize),
    Powerset(Box<FSyntax>),
    SubDist(Box<FSyntax>),
}

/// Values whose state references are still names.
enum Raw<W> {
    State(String, usize, usize),
    Ready(BValue<W>),
    Pair(Box<Raw<W>>, Box<Raw<W>>),
    Inl(Box<Raw<W>>),
    Inr(Box<Raw<W>>),
    Table(Vec<(crate::state::Symbol, Raw<W>)>),
    Set(Vec<Raw<W>>),
    Dist(Vec<(Raw<W>, W)>),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, t: &Token, msg: impl Into<String>) -> ParseError {
        ParseError::new(t.line, t.col, msg)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(&self.peek().tok, Tok::Word(x) if x == w)
    }

    fn is_punct(&self, c: char) -> bool {
        self.peek().tok == Tok::Punct(c)
    }

    fn expect_punct(&mut self, c: char) -> PResult<Token> {
        let t = self.next();
        if t.tok == Tok::Punct(c) {
            Ok(t)
        } else {
            Err(self.error_at(&t, format!("expected `{c}`, found {}", t.describe())))
        }
    }

    fn expect_keyword(&mut self, k: &str) -> PResult<Token> {
        let t = self.next();
        match &t.tok {
            Tok::Word(w) if w == k => Ok(t),
            _ => Err(self.error_at(&t, format!("expected `{k}`, found {}", t.describe()))),
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Word(w) if is_identifier(w) => Ok((w.clone(), t.clone())),
            _ => Err(self.error_at(&t, format!("expected {what}, found {}", t.describe()))),
        }
    }

    fn skip_comma(&mut self) {
        if self.is_punct(',') {
            self.next();
        }
    }

    // sum := product ("+" product)*
    fn functor_sum(&mut self) -> PResult<FSyntax> {
        let mut f = self.functor_product()?;
        while self.is_punct('+') {
            self.next();
            f = FSyntax::Coproduct(Box::new(f), Box::new(self.functor_product()?));
        }
        Ok(f)
    }

    // product := unary ("*" unary)*
    fn functor_product(&mut self) -> PResult<FSyntax> {
        let mut f = self.functor_unary()?;
        while self.is_punct('*') {
            self.next();
            f = FSyntax::Product(Box::new(f), Box::new(self.functor_unary()?));
        }
        Ok(f)
    }

    // unary := ("P" | "Ds") unary | postfix
    fn functor_unary(&mut self) -> PResult<FSyntax> {
        if self.is_word("P") {
            self.next();
            return Ok(FSyntax::Powerset(Box::new(self.functor_unary()?)));
        }
        if self.is_word("Ds") {
            self.next();
            return Ok(FSyntax::SubDist(Box::new(self.functor_unary()?)));
        }
        let mut f = self.functor_primary()?;
        while self.is_punct('^') {
            self.next();
            let (name, t) = self.ident("a label set name")?;
            f = FSyntax::Exponent(Box::new(f), name, t.line, t.col);
        }
        Ok(f)
    }

    fn functor_primary(&mut self) -> PResult<FSyntax> {
        if self.is_punct('(') {
            self.next();
            let f = self.functor_sum()?;
            self.expect_punct(')')?;
            return Ok(f);
        }
        if self.is_word("Id") {
            self.next();
            return Ok(FSyntax::Id);
        }
        let (name, t) = self.ident("a functor")?;
        Ok(FSyntax::Set(name, t.line, t.col))
    }

    fn value<W: Weight>(&mut self, f: &FunctorExpr) -> PResult<Raw<W>> {
        match f {
            FunctorExpr::Identity => {
                let (name, t) = self.ident("a state")?;
                Ok(Raw::State(name, t.line, t.col))
            }
            FunctorExpr::Constant(set) => {
                let (name, t) = self.ident(&format!("a member of `{}`", set.name()))?;
                match set.get(&name) {
                    Some(a) => Ok(Raw::Ready(BValue::Atom(a.clone()))),
                    None => Err(self.error_at(&t, format!("`{name}` is not a member of `{}`", set.name()))),
                }
            }
            FunctorExpr::Product(..) => {
                self.expect_punct('(')?;
                let v = if self.is_punct('(') {
                    let FunctorExpr::Product(l, r) = f else { unreachable!() };
                    let lv = self.value(l)?;
                    self.expect_punct(',')?;
                    let rv = self.value(r)?;
                    Raw::Pair(Box::new(lv), Box::new(rv))
                } else {
                    let spine = left_spine(f);
                    let mut acc = self.value(spine[0])?;
                    for g in &spine[1..] {
                        self.expect_punct(',')?;
                        acc = Raw::Pair(Box::new(acc), Box::new(self.value(g)?));
                    }
                    acc
                };
                self.expect_punct(')')?;
                Ok(v)
            }
            FunctorExpr::Coproduct(l, r) => {
                let t = self.next();
                match &t.tok {
                    Tok::Word(w) if w == "inl" => Ok(Raw::Inl(Box::new(self.value(l)?))),
                    Tok::Word(w) if w == "inr" => Ok(Raw::Inr(Box::new(self.value(r)?))),
                    _ => Err(self.error_at(&t, format!("expected `inl` or `inr`, found {}", t.describe()))),
                }
            }
            FunctorExpr::Exponent(body, labels) => {
                let open = self.expect_punct('{')?;
                let mut entries: Vec<(crate::state::Symbol, Raw<W>)> = Vec::new();
                while !self.is_punct('}') {
                    let (name, t) = self.ident("a label")?;
                    let label = labels
                        .get(&name)
                        .ok_or_else(|| self.error_at(&t, format!("`{name}` is not a member of `{}`", labels.name())))?
                        .clone();
                    if entries.iter().any(|(l, _)| *l == label) {
                        return Err(self.error_at(&t, format!("label `{name}` appears twice")));
                    }
                    let arrow = self.next();
                    if arrow.tok != Tok::Arrow {
                        return Err(self.error_at(&arrow, format!("expected `->`, found {}", arrow.describe())));
                    }
                    entries.push((label, self.value(body)?));
                    self.skip_comma();
                }
                self.next();
                if let Some(missing) = labels.members().iter().find(|l| !entries.iter().any(|(e, _)| e == *l)) {
                    return Err(self.error_at(
                        &open,
                        format!("table is not total: no entry for label `{}`", missing.name()),
                    ));
                }
                entries.sort_by(|a, b| a.0.cmp(&b.0));
                Ok(Raw::Table(entries))
            }
            FunctorExpr::FinPowerset(body) => {
                self.expect_keyword("set")?;
                self.expect_punct('{')?;
                let mut items = Vec::new();
                while !self.is_punct('}') {
                    items.push(self.value(body)?);
                    self.skip_comma();
                }
                self.next();
                Ok(Raw::Set(items))
            }
            FunctorExpr::SubDist(body) => {
                self.expect_keyword("dist")?;
                self.expect_punct('{')?;
                let mut entries = Vec::new();
                while !self.is_punct('}') {
                    let v = self.value(body)?;
                    self.expect_punct(':')?;
                    let w = self.rational()?;
                    entries.push((v, w));
                    self.skip_comma();
                }
                self.next();
                Ok(Raw::Dist(entries))
            }
        }
    }

    fn rational<W: Weight>(&mut self) -> PResult<W> {
        let t = self.next();
        let Tok::Word(mut text) = t.tok.clone() else {
            return Err(self.error_at(&t, format!("expected a weight, found {}", t.describe())));
        };
        if self.is_punct('/') {
            self.next();
            let d = self.next();
            let Tok::Word(den) = &d.tok else {
                return Err(self.error_at(&d, format!("expected a denominator, found {}", d.describe())));
            };
            text = format!("{text}/{den}");
        }
        parse_fraction(&text).ok_or_else(|| self.error_at(&t, format!("`{text}` is not a valid weight")))
    }
}

/// Flattened components of a left-nested product, `((A * B) * C)` → `[A, B, C]`.
fn left_spine(f: &FunctorExpr) -> Vec<&FunctorExpr> {
    match f {
        FunctorExpr::Product(l, r) => {
            let mut out = left_spine(l);
            out.push(r);
            out
        }
        other => vec![other],
    }
}

fn resolve(f: &FSyntax, sets: &[Arc<SymbolSet>]) -> PResult<FunctorExpr> {
    let find = |name: &str, line, col| {
        sets.iter()
            .find(|s| s.name() == name)
            .cloned()
            .ok_or_else(|| ParseError::new(line, col, format!("undeclared set `{name}`")))
    };
    Ok(match f {
        FSyntax::Id => FunctorExpr::Identity,
        FSyntax::Set(n, l, c) => FunctorExpr::Constant(find(n, *l, *c)?),
        FSyntax::Product(a, b) => FunctorExpr::product(resolve(a, sets)?, resolve(b, sets)?),
        FSyntax::Coproduct(a, b) => FunctorExpr::coproduct(resolve(a, sets)?, resolve(b, sets)?),
        FSyntax::Exponent(a, n, l, c) => FunctorExpr::exponent(resolve(a, sets)?, find(n, *l, *c)?),
        FSyntax::Powerset(a) => FunctorExpr::powerset(resolve(a, sets)?),
        FSyntax::SubDist(a) => FunctorExpr::subdist(resolve(a, sets)?),
    })
}

fn bind<W: Weight>(raw: Raw<W>, states: &HashMap<String, StateId>) -> PResult<BValue<W>> {
    Ok(match raw {
        Raw::State(name, line, col) => match states.get(&name) {
            Some(s) => BValue::State(s.clone()),
            None => return Err(ParseError::new(line, col, format!("unknown state `{name}`"))),
        },
        Raw::Ready(v) => v,
        Raw::Pair(l, r) => BValue::pair(bind(*l, states)?, bind(*r, states)?),
        Raw::Inl(v) => BValue::inl(bind(*v, states)?),
        Raw::Inr(v) => BValue::inr(bind(*v, states)?),
        Raw::Table(entries) => BValue::Table(
            entries.into_iter().map(|(l, v)| Ok((l, bind(v, states)?))).collect::<PResult<_>>()?,
        ),
        Raw::Set(items) => BValue::Set(items.into_iter().map(|v| bind(v, states)).collect::<PResult<_>>()?),
        Raw::Dist(entries) => BValue::Dist(
            entries.into_iter().map(|(v, w)| Ok((bind(v, states)?, w))).collect::<PResult<_>>()?,
        ),
    })
}

/// Parses a system description.
pub fn parse_system<W: Weight>(text: &str) -> Result<Coalgebra<W>, Error> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };

    p.expect_keyword("functor")?;
    let syntax = p.functor_sum()?;

    let mut sets: Vec<Arc<SymbolSet>> = Vec::new();
    while p.is_word("set") {
        let kw = p.next();
        let (name, t) = p.ident("a set name")?;
        if sets.iter().any(|s| s.name() == name) {
            return Err(p.error_at(&t, format!("set `{name}` is declared twice")).into());
        }
        p.expect_punct('=')?;
        p.expect_punct('{')?;
        let mut members = Vec::new();
        loop {
            let (m, mt) = p.ident("a set member")?;
            if members.contains(&m) {
                return Err(p.error_at(&mt, format!("set `{name}` lists `{m}` twice")).into());
            }
            members.push(m);
            if p.is_punct(',') {
                p.next();
                continue;
            }
            break;
        }
        p.expect_punct('}')?;
        sets.push(SymbolSet::new(&name, &members).map_err(|e| p.error_at(&kw, e.to_string()))?);
    }
    let functor = resolve(&syntax, &sets)?;

    let mut decls: Vec<(String, Token, Raw<W>)> = Vec::new();
    while p.is_word("state") {
        p.next();
        let (name, t) = p.ident("a state name")?;
        if decls.iter().any(|(n, _, _)| *n == name) {
            return Err(p.error_at(&t, format!("state `{name}` is declared twice")).into());
        }
        p.expect_punct('=')?;
        let v = p.value(&functor)?;
        decls.push((name, t, v));
    }
    if decls.is_empty() {
        let t = p.peek().clone();
        return Err(p.error_at(&t, format!("expected `state`, found {}", t.describe())).into());
    }
    let mut boundary: Vec<(String, Token)> = Vec::new();
    if p.is_word("boundary") {
        p.next();
        loop {
            let (name, t) = p.ident("a boundary state")?;
            if decls.iter().any(|(n, _, _)| *n == name) || boundary.iter().any(|(n, _)| *n == name) {
                return Err(p.error_at(&t, format!("state `{name}` is declared twice")).into());
            }
            boundary.push((name, t));
            if !matches!(p.peek().tok, Tok::Word(_)) {
                break;
            }
        }
    }
    let t = p.peek().clone();
    if t.tok != Tok::Eof {
        return Err(p.error_at(&t, format!("unexpected {}", t.describe())).into());
    }

    let mut ids: HashMap<String, StateId> = HashMap::new();
    for (rank, name) in decls.iter().map(|(n, _, _)| n).chain(boundary.iter().map(|(n, _)| n)).enumerate() {
        ids.insert(name.clone(), StateId::new(rank as u32, name)?);
    }
    let universe = crate::state::Universe::new(ids.values().cloned())?;
    let mut states = Vec::with_capacity(decls.len());
    for (name, t, raw) in decls {
        let v = bind(raw, &ids)?;
        if let Err(e) = v.validate(&functor, &universe) {
            return Err(ParseError::new(t.line, t.col, e.within(&format!("gamma({name})")).to_string()).into());
        }
        states.push((ids[&name].clone(), v));
    }
    let boundary = boundary.iter().map(|(n, _)| ids[n].clone()).collect();
    Coalgebra::new(functor, sets, states, boundary)
}

/// Parses a single value of shape `functor` over the states of `c`.
pub fn parse_value<W: Weight>(text: &str, functor: &FunctorExpr, c: &Coalgebra<W>) -> Result<BValue<W>, Error> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0 };
    let raw = p.value(functor)?;
    let t = p.peek().clone();
    if t.tok != Tok::Eof {
        return Err(p.error_at(&t, format!("unexpected {}", t.describe())).into());
    }
    let ids: HashMap<String, StateId> = c.states().iter().map(|s| (s.name().to_string(), s.clone())).collect();
    let v = bind(raw, &ids)?;
    v.validate(functor, c.universe())?;
    Ok(v)
}

/// Canonical text of a value: set elements and distribution entries sorted.
pub fn print_value<W: Weight>(v: &BValue<W>) -> String {
    let mut out = String::new();
    write_value(&mut out, v, false);
    out
}

fn write_value<W: Weight>(out: &mut String, v: &BValue<W>, in_tuple: bool) {
    match v {
        BValue::State(s) => out.push_str(s.name()),
        BValue::Atom(a) => out.push_str(a.name()),
        BValue::Pair(l, r) => {
            if !in_tuple {
                out.push('(');
            }
            // left-nested pairs print flat, matching the parser's spine rule
            write_value(out, l, matches!(**l, BValue::Pair(..)));
            out.push_str(", ");
            write_value(out, r, false);
            if !in_tuple {
                out.push(')');
            }
        }
        BValue::Inl(v) => {
            out.push_str("inl ");
            write_value(out, v, false);
        }
        BValue::Inr(v) => {
            out.push_str("inr ");
            write_value(out, v, false);
        }
        BValue::Table(entries) => {
            out.push_str("{ ");
            for (k, (l, v)) in entries.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{} -> ", l.name());
                write_value(out, v, false);
            }
            out.push_str(" }");
        }
        BValue::Set(items) => {
            let mut items: Vec<&BValue<W>> = items.iter().collect();
            items.sort();
            out.push_str("set {");
            for (k, v) in items.iter().enumerate() {
                out.push_str(if k > 0 { ", " } else { " " });
                write_value(out, v, false);
            }
            out.push_str(if items.is_empty() { "}" } else { " }" });
        }
        BValue::Dist(entries) => {
            let mut entries: Vec<&(BValue<W>, W)> = entries.iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            out.push_str("dist {");
            for (k, (v, w)) in entries.iter().enumerate() {
                out.push_str(if k > 0 { ", " } else { " " });
                write_value(out, v, false);
                let _ = write!(out, ": {w}");
            }
            out.push_str(if entries.is_empty() { "}" } else { " }" });
        }
    }
}

/// Canonical text of a system. `parse_system` of the output reproduces the
/// system, and printing is idempotent.
pub fn print_system<W: Weight>(c: &Coalgebra<W>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "functor {}", c.functor());
    for set in c.sets() {
        let members: Vec<&str> = set.members().iter().map(|m| m.name()).collect();
        let _ = writeln!(out, "set {} = {{{}}}", set.name(), members.join(", "));
    }
    let width = c.states().iter().map(|s| s.name().len()).max().unwrap_or(0);
    for s in c.states() {
        if let Ok(v) = c.gamma(s) {
            let _ = writeln!(out, "state {:width$} = {}", s.name(), print_value(v));
        }
    }
    let boundary: Vec<&str> = c.boundary().map(|s| s.name()).collect();
    if !boundary.is_empty() {
        let _ = writeln!(out, "boundary {}", boundary.join(" "));
    }
    out
}

/// Hex SHA-256 of the canonical system text.
pub fn system_hash<W: Weight>(c: &Coalgebra<W>) -> String {
    hex::encode(Sha256::digest(print_system(c).as_bytes()))
}
