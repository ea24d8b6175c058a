//! Tokenizer and recursive-descent parser for the model language.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use super::model::{Model, Object};
use crate::error::{Error, Result};
use crate::geometry::{
    Chart, LinearConnection, Metric, Multivector, NonlinearConnection, OneForm, SymCovariant,
    VolumeForm,
};
use crate::ring::{RatFunc, Scalar, Vars};

#[derive(Clone, PartialEq, Debug)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Punct(char),
    Newline,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (l, raw) in text.lines().enumerate() {
        let line = l + 1;
        let content = raw.split('#').next().unwrap_or("");
        let chars: Vec<char> = content.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Token {
                    tok: Tok::Ident(s),
                    line,
                    column,
                });
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse::<BigInt>().expect("digits");
                out.push(Token {
                    tok: Tok::Int(n),
                    line,
                    column,
                });
            } else if "{}[](),;=+-*/^".contains(c) {
                out.push(Token {
                    tok: Tok::Punct(c),
                    line,
                    column,
                });
                i += 1;
            } else {
                return Err(Error::Syntax {
                    line,
                    column,
                    message: format!("unexpected character `{c}`"),
                });
            }
        }
        out.push(Token {
            tok: Tok::Newline,
            line,
            column: chars.len() + 1,
        });
    }
    let line = out.last().map_or(1, |t| t.line);
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: 1,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Newlines are significant only while reading a coordinate list.
    skip_newlines: bool,
}

impl Parser {
    fn peek(&mut self) -> &Token {
        if self.skip_newlines {
            while self.toks[self.pos].tok == Tok::Newline {
                self.pos += 1;
            }
        }
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.peek().clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, t: &Token, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Punct(c) => format!("`{c}`"),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<Token> {
        let t = self.next();
        if t.tok == Tok::Punct(c) {
            Ok(t)
        } else {
            self.error(
                &t,
                format!("expected `{c}`, found {}", Self::describe(&t.tok)),
            )
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Punct(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.clone())),
            other => self.error(
                &t,
                format!("expected {what}, found {}", Self::describe(other)),
            ),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let (s, t) = self.ident(&format!("`{kw}`"))?;
        if s == kw {
            Ok(())
        } else {
            self.error(&t, format!("expected `{kw}`, found `{s}`"))
        }
    }

    fn small_int(&mut self, what: &str) -> Result<(usize, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Int(n) => match usize::try_from(n) {
                Ok(v) => Ok((v, t.clone())),
                Err(_) => self.error(&t, format!("{what} is too large")),
            },
            other => self.error(
                &t,
                format!("expected {what}, found {}", Self::describe(other)),
            ),
        }
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self, vars: &Vars) -> Result<RatFunc> {
        let mut acc = self.term(vars)?;
        loop {
            if self.eat_punct('+') {
                acc = &acc + &self.term(vars)?;
            } else if self.eat_punct('-') {
                acc = &acc - &self.term(vars)?;
            } else {
                return Ok(acc);
            }
        }
    }

    // term := unary (('*' | '/') unary)*
    fn term(&mut self, vars: &Vars) -> Result<RatFunc> {
        let mut acc = self.unary(vars)?;
        loop {
            if self.eat_punct('*') {
                acc = &acc * &self.unary(vars)?;
            } else if self.peek().tok == Tok::Punct('/') {
                let t = self.next();
                let d = self.unary(vars)?;
                if d.is_zero() {
                    return self.error(&t, "division by zero");
                }
                acc = &acc / &d;
            } else {
                return Ok(acc);
            }
        }
    }

    // unary := ('-' | '+') unary | power
    fn unary(&mut self, vars: &Vars) -> Result<RatFunc> {
        if self.eat_punct('-') {
            return Ok(-&self.unary(vars)?);
        }
        if self.eat_punct('+') {
            return self.unary(vars);
        }
        self.power(vars)
    }

    // power := atom ('^' ['-'] int)?
    fn power(&mut self, vars: &Vars) -> Result<RatFunc> {
        let base = self.atom(vars)?;
        if !self.eat_punct('^') {
            return Ok(base);
        }
        let paren = self.eat_punct('(');
        let neg = self.eat_punct('-');
        let (e, t) = self.small_int("an integer exponent")?;
        if paren {
            self.expect_punct(')')?;
        }
        let e = i32::try_from(e).or_else(|_| self.error(&t, "exponent is too large"))?;
        match base.pow(if neg { -e } else { e }) {
            Ok(r) => Ok(r),
            Err(_) => self.error(&t, "zero raised to a negative power"),
        }
    }

    fn atom(&mut self, vars: &Vars) -> Result<RatFunc> {
        let t = self.next();
        match &t.tok {
            Tok::Int(n) => Ok(RatFunc::constant(vars, Scalar::from_integer(n.clone()))),
            Tok::Ident(name) => match vars.names().iter().position(|v| v == name) {
                Some(i) => Ok(RatFunc::var(vars, i)),
                None => Err(Error::UnknownIdentifier {
                    line: t.line,
                    name: name.clone(),
                }),
            },
            Tok::Punct('(') => {
                let e = self.expr(vars)?;
                self.expect_punct(')')?;
                Ok(e)
            }
            other => self.error(
                &t,
                format!("expected an expression, found {}", Self::describe(other)),
            ),
        }
    }
}

/// Declaration kinds and the number of indices of their entries.
#[derive(Clone, Copy, PartialEq, Debug)]
enum Kind {
    Multivector(usize),
    OneForm,
    SymTensor(usize),
    LinConn,
    NonlinConn,
    Metric,
    Volume,
}

impl Kind {
    fn from_keyword(p: &mut Parser, kw: &str) -> Result<Option<Kind>> {
        let simple = match kw {
            "function" => Some(Kind::Multivector(0)),
            "vector" => Some(Kind::Multivector(1)),
            "bivector" => Some(Kind::Multivector(2)),
            "oneform" => Some(Kind::OneForm),
            "linconn" => Some(Kind::LinConn),
            "nonlinconn" => Some(Kind::NonlinConn),
            "metric" => Some(Kind::Metric),
            "volume" => Some(Kind::Volume),
            _ => None,
        };
        if simple.is_some() {
            return Ok(simple);
        }
        if kw != "symtensor" && kw != "multivector" {
            return Ok(None);
        }
        p.expect_punct('(')?;
        let (k, _) = p.small_int("a degree")?;
        p.expect_punct(')')?;
        Ok(Some(if kw == "symtensor" {
            Kind::SymTensor(k)
        } else {
            Kind::Multivector(k)
        }))
    }

    fn arity(self) -> usize {
        match self {
            Kind::Multivector(k) | Kind::SymTensor(k) => k,
            Kind::OneForm => 1,
            Kind::LinConn => 3,
            Kind::NonlinConn | Kind::Metric => 2,
            Kind::Volume => 0,
        }
    }
}

struct Entry {
    idx: Vec<usize>,
    value: RatFunc,
    line: usize,
}

fn invalid<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::InvalidEntry {
        line,
        message: message.into(),
    })
}

fn one_based(idx: &[usize]) -> String {
    let v: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
    format!("[{}]", v.join(","))
}

/// Rejects a second entry for the same independent slot.
fn check_slots(entries: &[Entry], canonical: impl Fn(&[usize]) -> Vec<usize>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for e in entries {
        if !seen.insert(canonical(&e.idx)) {
            return invalid(
                e.line,
                format!("entry {} repeats an already given slot", one_based(&e.idx)),
            );
        }
    }
    Ok(())
}

fn build(kind: Kind, chart: &Chart, entries: Vec<Entry>, line: usize) -> Result<Object> {
    let sorted = |idx: &[usize]| {
        let mut v = idx.to_vec();
        v.sort_unstable();
        v
    };
    let wrap = |r: Result<Object>| r.or_else(|e| invalid(line, e.to_string()));
    let base_only = |what: &str| {
        if chart.is_tangent() {
            invalid(line, format!("a {what} must live on a base manifold"))
        } else {
            Ok(())
        }
    };
    match kind {
        Kind::Multivector(_) => {
            for e in &entries {
                if sorted(&e.idx).windows(2).any(|w| w[0] == w[1]) {
                    return invalid(
                        e.line,
                        format!(
                            "entry {} has a repeated index in a skew tensor",
                            one_based(&e.idx)
                        ),
                    );
                }
            }
            check_slots(&entries, sorted)?;
            let k = kind.arity();
            wrap(
                Multivector::from_entries(chart, k, entries.into_iter().map(|e| (e.idx, e.value)))
                    .map(Object::Multivector),
            )
        }
        Kind::OneForm => {
            check_slots(&entries, <[usize]>::to_vec)?;
            let mut comps = vec![chart.zero(); chart.arity()];
            for e in entries {
                comps[e.idx[0]] = e.value;
            }
            wrap(OneForm::new(chart, comps).map(Object::OneForm))
        }
        Kind::SymTensor(k) => {
            base_only("symmetric tensor")?;
            check_slots(&entries, sorted)?;
            wrap(
                SymCovariant::from_entries(chart, k, entries.into_iter().map(|e| (e.idx, e.value)))
                    .map(Object::SymTensor),
            )
        }
        Kind::LinConn => {
            base_only("linear connection")?;
            check_slots(&entries, <[usize]>::to_vec)?;
            wrap(
                LinearConnection::from_entries(
                    chart,
                    entries
                        .into_iter()
                        .map(|e| ((e.idx[0], e.idx[1], e.idx[2]), e.value)),
                )
                .map(Object::LinearConnection),
            )
        }
        Kind::NonlinConn => {
            if !chart.is_tangent() {
                return invalid(
                    line,
                    "a nonlinear connection lives on a tangent chart `T M`",
                );
            }
            check_slots(&entries, <[usize]>::to_vec)?;
            let n = chart.dim();
            let mut gamma = vec![vec![chart.zero(); n]; n];
            for e in entries {
                gamma[e.idx[0]][e.idx[1]] = e.value;
            }
            wrap(NonlinearConnection::new(chart, gamma).map(Object::NonlinearConnection))
        }
        Kind::Metric => {
            base_only("metric")?;
            check_slots(&entries, sorted)?;
            let n = chart.dim();
            let mut g = vec![vec![chart.zero(); n]; n];
            for e in entries {
                let (i, j) = (e.idx[0], e.idx[1]);
                g[i][j] = e.value.clone();
                g[j][i] = e.value;
            }
            wrap(Metric::new(chart, g).map(Object::Metric))
        }
        Kind::Volume => {
            let density = match entries.len() {
                0 => return invalid(line, "a volume needs a density entry `[] = expr`"),
                1 => entries
                    .into_iter()
                    .next()
                    .map(|e| e.value)
                    .expect("one entry"),
                _ => return invalid(entries[1].line, "a volume has a single density entry"),
            };
            wrap(VolumeForm::new(chart, density).map(Object::Volume))
        }
    }
}

impl Parser {
    fn manifold(&mut self, model: &mut Model) -> Result<()> {
        let (name, name_tok) = self.ident("a manifold name")?;
        self.keyword("dim")?;
        let (dim, dim_tok) = self.small_int("a dimension")?;
        self.keyword("coords")?;
        self.skip_newlines = false;
        let mut coords = Vec::new();
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::Ident(s) => {
                    if coords.contains(s) {
                        return Err(Error::Duplicate {
                            line: t.line,
                            name: s.clone(),
                        });
                    }
                    coords.push(s.clone());
                    self.next();
                }
                Tok::Newline | Tok::Eof => break,
                other => {
                    let msg = format!(
                        "expected a coordinate name, found {}",
                        Self::describe(other)
                    );
                    self.skip_newlines = true;
                    return self.error(&t, msg);
                }
            }
        }
        self.skip_newlines = true;
        if coords.len() != dim {
            return self.error(
                &dim_tok,
                format!("dimension {dim} but {} coordinates", coords.len()),
            );
        }
        if name == "T" {
            return self.error(&name_tok, "`T` is reserved for tangent charts");
        }
        let chart = Chart::new(&name, &coords).or_else(|e| self.error(&name_tok, e.to_string()))?;
        model.add_chart(chart).map_err(|_| Error::Duplicate {
            line: name_tok.line,
            name,
        })
    }

    fn chart_ref(&mut self, model: &Model) -> Result<Chart> {
        let (first, t) = self.ident("a manifold name")?;
        let tangent = first == "T" && matches!(self.peek().tok, Tok::Ident(_));
        let (name, t) = if tangent {
            self.ident("a manifold name")?
        } else {
            (first, t)
        };
        let Some(chart) = model.chart(&name) else {
            return Err(Error::UnknownIdentifier { line: t.line, name });
        };
        if tangent {
            chart.tangent()
        } else {
            Ok(chart.clone())
        }
    }

    fn entries(&mut self, kind: Kind, chart: &Chart) -> Result<Vec<Entry>> {
        self.expect_punct('{')?;
        let range = match kind {
            Kind::NonlinConn => chart.dim(),
            _ => chart.arity(),
        };
        let mut out = Vec::new();
        loop {
            if self.eat_punct('}') {
                return Ok(out);
            }
            let open = self.expect_punct('[')?;
            let mut idx = Vec::new();
            if !self.eat_punct(']') {
                loop {
                    let (i, t) = self.small_int("an index")?;
                    if i == 0 || i > range {
                        return Err(Error::IndexOutOfRange {
                            line: t.line,
                            index: i,
                            max: range,
                        });
                    }
                    idx.push(i - 1);
                    if self.eat_punct(']') {
                        break;
                    }
                    self.expect_punct(',')?;
                }
            }
            if idx.len() != kind.arity() {
                return invalid(
                    open.line,
                    format!("expected {} indices, found {}", kind.arity(), idx.len()),
                );
            }
            self.expect_punct('=')?;
            let value = self.expr(chart.vars())?;
            out.push(Entry {
                idx,
                value,
                line: open.line,
            });
            if !self.eat_punct(';') {
                let t = self.peek().clone();
                if t.tok != Tok::Punct('}') {
                    return self.error(
                        &t,
                        format!("expected `;` or `}}`, found {}", Self::describe(&t.tok)),
                    );
                }
            }
        }
    }

    fn declaration(&mut self, model: &mut Model, kind: Kind, line: usize) -> Result<()> {
        let (name, name_tok) = self.ident("an object name")?;
        self.keyword("on")?;
        let chart = self.chart_ref(model)?;
        let entries = self.entries(kind, &chart)?;
        if model.get(&name).is_some() || model.chart(&name).is_some() {
            return Err(Error::Duplicate {
                line: name_tok.line,
                name,
            });
        }
        let object = build(kind, &chart, entries, line)?;
        model.insert(&name, object)
    }
}

/// Parses a model file.
pub fn parse_model(text: &str) -> Result<Model> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        skip_newlines: true,
    };
    let mut model = Model::new();
    loop {
        let t = p.next();
        let kw = match &t.tok {
            Tok::Eof => return Ok(model),
            Tok::Punct(';') => continue,
            Tok::Ident(s) => s.clone(),
            other => {
                return p.error(
                    &t,
                    format!("expected a declaration, found {}", Parser::describe(other)),
                )
            }
        };
        if kw == "manifold" {
            p.manifold(&mut model)?;
            continue;
        }
        match Kind::from_keyword(&mut p, &kw)? {
            Some(kind) => p.declaration(&mut model, kind, t.line)?,
            None => return p.error(&t, format!("unknown declaration `{kw}`")),
        }
    }
}

/// Parses a single expression over the given coordinates.
pub fn parse_expression(text: &str, vars: &Vars) -> Result<RatFunc> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        skip_newlines: true,
    };
    let e = p.expr(vars)?;
    let t = p.next();
    if t.tok != Tok::Eof {
        return p.error(&t, format!("unexpected {}", Parser::describe(&t.tok)));
    }
    Ok(e)
}
