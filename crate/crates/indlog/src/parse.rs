//! Text grammar for formulas, sentences, and structure literals.
//!
//! One lexer serves both languages. Operators: `~` not, `&` and, `|` or,
//! `->` implies (right-associative), `<->` iff (right-associative), the
//! constants `TRUE`/`FALSE`, and parentheses. Propositional formulas add
//! the indexed family `AND i in a..b : body` (inclusive range, `{i}`
//! placeholders in variable names). Sentences add `forall x y. body`,
//! `exists x y. body`, `exactly n`, `=`, `!=`, and prefix relation
//! application `R(t, …)`. Structure literals look like
//! `structure { domain 2; c = 0; S = {1}; }`.

use crate::fol::{FinSignature, Sentence, SymKind, Term};
use crate::formula::{Formula, PropVar, PvDecls};
use crate::fostruct::FinStructure;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}, col {col}: {msg}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Dot,
    DotDot,
    Colon,
    Semi,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    Eq,
    NotEq,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Int(n) => format!("number {n}"),
            Tok::End => "end of input".into(),
            t => format!(
                "'{}'",
                match t {
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::LBrace => "{",
                    Tok::RBrace => "}",
                    Tok::LBracket => "[",
                    Tok::RBracket => "]",
                    Tok::Comma => ",",
                    Tok::Dot => ".",
                    Tok::DotDot => "..",
                    Tok::Colon => ":",
                    Tok::Semi => ";",
                    Tok::Tilde => "~",
                    Tok::Amp => "&",
                    Tok::Pipe => "|",
                    Tok::Arrow => "->",
                    Tok::DArrow => "<->",
                    Tok::Eq => "=",
                    Tok::NotEq => "!=",
                    _ => unreachable!(),
                }
            ),
        }
    }
}

const KEYWORDS: &[&str] =
    &["TRUE", "FALSE", "AND", "in", "forall", "exists", "exactly", "structure", "domain"];

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: u32,
    col: u32,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '^')
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let (mut line, mut col) = (1u32, 1u32);
    macro_rules! err {
        ($($arg:tt)*) => {
            return Err(ParseError { line, col, msg: format!($($arg)*) })
        };
    }
    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut u32| {
            *i += n;
            *col += n as u32;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                advance(1, &mut i, &mut col);
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' => {
                toks.push(Token { tok: Tok::LParen, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            ')' => {
                toks.push(Token { tok: Tok::RParen, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '{' => {
                toks.push(Token { tok: Tok::LBrace, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '}' => {
                toks.push(Token { tok: Tok::RBrace, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '[' => {
                toks.push(Token { tok: Tok::LBracket, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            ']' => {
                toks.push(Token { tok: Tok::RBracket, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            ',' => {
                toks.push(Token { tok: Tok::Comma, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            ':' => {
                toks.push(Token { tok: Tok::Colon, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            ';' => {
                toks.push(Token { tok: Tok::Semi, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '~' => {
                toks.push(Token { tok: Tok::Tilde, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '&' => {
                toks.push(Token { tok: Tok::Amp, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '|' => {
                toks.push(Token { tok: Tok::Pipe, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '=' => {
                toks.push(Token { tok: Tok::Eq, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '.' => {
                if chars.get(i + 1) == Some(&'.') {
                    toks.push(Token { tok: Tok::DotDot, line: tline, col: tcol });
                    advance(2, &mut i, &mut col);
                } else {
                    toks.push(Token { tok: Tok::Dot, line: tline, col: tcol });
                    advance(1, &mut i, &mut col);
                }
            }
            '!' => {
                if chars.get(i + 1) == Some(&'=') {
                    toks.push(Token { tok: Tok::NotEq, line: tline, col: tcol });
                    advance(2, &mut i, &mut col);
                } else {
                    err!("expected '=' after '!'");
                }
            }
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    toks.push(Token { tok: Tok::Arrow, line: tline, col: tcol });
                    advance(2, &mut i, &mut col);
                } else {
                    err!("expected '>' after '-'");
                }
            }
            '<' => {
                if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') {
                    toks.push(Token { tok: Tok::DArrow, line: tline, col: tcol });
                    advance(3, &mut i, &mut col);
                } else {
                    err!("expected '<->'");
                }
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                col += (i - start) as u32;
                let n = text.parse().map_err(|_| ParseError {
                    line: tline,
                    col: tcol,
                    msg: format!("number {text} out of range"),
                })?;
                toks.push(Token { tok: Tok::Int(n), line: tline, col: tcol });
            }
            c if is_ident_start(c) => {
                let mut name = String::new();
                while i < chars.len() {
                    if is_ident_continue(chars[i]) {
                        name.push(chars[i]);
                        advance(1, &mut i, &mut col);
                    } else if chars[i] == '{' && !KEYWORDS.contains(&name.as_str()) {
                        // an attached `{idx}` group is an index placeholder,
                        // part of the identifier
                        let mut j = i + 1;
                        let mut group = String::from("{");
                        while j < chars.len() && chars[j] != '}' {
                            if !is_ident_continue(chars[j]) {
                                break;
                            }
                            group.push(chars[j]);
                            j += 1;
                        }
                        if j < chars.len() && chars[j] == '}' && group.len() > 1 {
                            group.push('}');
                            name.push_str(&group);
                            advance(j + 1 - i, &mut i, &mut col);
                        } else {
                            break;
                        }
                    } else {
                        break;
                    }
                }
                toks.push(Token { tok: Tok::Ident(name), line: tline, col: tcol });
            }
            c => err!("unexpected character {c:?}"),
        }
    }
    toks.push(Token { tok: Tok::End, line, col });
    Ok(toks)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (u32, u32) {
        (self.toks[self.pos].line, self.toks[self.pos].col)
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError { line, col, msg: msg.into() }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {}, found {}", t.describe(), self.peek().describe())))
        }
    }

    fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            t => Err(self.error(format!("expected identifier, found {}", t.describe()))),
        }
    }

    fn expect_int(&mut self) -> Result<u64, ParseError> {
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            ref t => Err(self.error(format!("expected number, found {}", t.describe()))),
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if matches!(self.peek(), Tok::End) {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {}", self.peek().describe())))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }
}

// ---------------------------------------------------------------- formulas

/// Parses a propositional formula over the declared variables.
pub fn parse_formula(src: &str, pv: &PvDecls) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src)?;
    let f = formula(&mut p, pv, 0)?;
    p.expect_end()?;
    Ok(f)
}

fn formula(p: &mut Parser, pv: &PvDecls, depth: u32) -> Result<Formula, ParseError> {
    if p.is_keyword("AND") {
        return family(p, pv, depth);
    }
    iff(p, pv, depth)
}

fn family(p: &mut Parser, pv: &PvDecls, depth: u32) -> Result<Formula, ParseError> {
    let (line, col) = p.here();
    p.bump(); // AND
    let idx = p.expect_ident()?;
    if !p.is_keyword("in") {
        return Err(p.error("expected 'in' after family index"));
    }
    p.bump();
    let lo = p.expect_int()?;
    p.expect(&Tok::DotDot)?;
    let hi = p.expect_int()?;
    p.expect(&Tok::Colon)?;
    if lo > hi {
        return Err(ParseError { line, col, msg: format!("empty family range {lo}..{hi}") });
    }
    let template = formula(p, pv, depth + 1)?;
    let needle = format!("{{{idx}}}");
    let mut instances = Vec::with_capacity((hi - lo + 1) as usize);
    for n in lo..=hi {
        let inst = template.rename(&|v: &PropVar| {
            PropVar::new(v.as_str().replace(&needle, &n.to_string()))
        });
        instances.push(inst);
    }
    let out = Formula::and(instances);
    if depth == 0 {
        for v in out.vars() {
            if v.as_str().contains('{') {
                return Err(ParseError {
                    line,
                    col,
                    msg: format!("unexpanded index placeholder in variable {v}"),
                });
            }
            if !pv.contains(&v) {
                return Err(ParseError { line, col, msg: format!("undeclared variable {v}") });
            }
        }
    }
    Ok(out)
}

fn iff(p: &mut Parser, pv: &PvDecls, depth: u32) -> Result<Formula, ParseError> {
    let lhs = implies(p, pv, depth)?;
    if p.eat(&Tok::DArrow) {
        let rhs = iff(p, pv, depth)?;
        return Ok(Formula::iff(lhs, rhs));
    }
    Ok(lhs)
}

fn implies(p: &mut Parser, pv: &PvDecls, depth: u32) -> Result<Formula, ParseError> {
    let lhs = disj(p, pv, depth)?;
    if p.eat(&Tok::Arrow) {
        let rhs = implies(p, pv, depth)?;
        return Ok(Formula::implies(lhs, rhs));
    }
    Ok(lhs)
}

fn disj(p: &mut Parser, pv: &PvDecls, depth: u32) -> Result<Formula, ParseError> {
    let first = conj(p, pv, depth)?;
    if !matches!(p.peek(), Tok::Pipe) {
        return Ok(first);
    }
    let mut parts = vec![first];
    while p.eat(&Tok::Pipe) {
        parts.push(conj(p, pv, depth)?);
    }
    Ok(Formula::or(parts))
}

fn conj(p: &mut Parser, pv: &PvDecls, depth: u32) -> Result<Formula, ParseError> {
    let first = unary(p, pv, depth)?;
    if !matches!(p.peek(), Tok::Amp) {
        return Ok(first);
    }
    let mut parts = vec![first];
    while p.eat(&Tok::Amp) {
        parts.push(unary(p, pv, depth)?);
    }
    Ok(Formula::and(parts))
}

fn unary(p: &mut Parser, pv: &PvDecls, depth: u32) -> Result<Formula, ParseError> {
    if p.eat(&Tok::Tilde) {
        return Ok(Formula::not(unary(p, pv, depth)?));
    }
    atom(p, pv, depth)
}

fn atom(p: &mut Parser, pv: &PvDecls, depth: u32) -> Result<Formula, ParseError> {
    if p.eat(&Tok::LParen) {
        let f = formula(p, pv, depth)?;
        p.expect(&Tok::RParen)?;
        return Ok(f);
    }
    match p.peek().clone() {
        Tok::Ident(name) => {
            if name == "TRUE" {
                p.bump();
                return Ok(Formula::Top);
            }
            if name == "FALSE" {
                p.bump();
                return Ok(Formula::Bottom);
            }
            if KEYWORDS.contains(&name.as_str()) {
                return Err(p.error(format!("unexpected keyword {name:?}")));
            }
            let var = PropVar::new(name.clone());
            if depth == 0 && !pv.contains(&var) {
                return Err(p.error(format!("undeclared variable {name}")));
            }
            p.bump();
            Ok(Formula::Var(var))
        }
        t => Err(p.error(format!("expected a formula, found {}", t.describe()))),
    }
}

// --------------------------------------------------------------- sentences

/// Parses a closed first-order sentence over the signature.
pub fn parse_sentence(src: &str, sig: &FinSignature) -> Result<Sentence, ParseError> {
    let mut p = Parser::new(src)?;
    let mut bound = Vec::new();
    let s = sentence(&mut p, sig, &mut bound)?;
    p.expect_end()?;
    if !s.is_closed() {
        return Err(ParseError {
            line: 1,
            col: 1,
            msg: format!("sentence has free variables: {:?}", s.free_vars()),
        })
    }
    Ok(s)
}

fn sentence(p: &mut Parser, sig: &FinSignature, bound: &mut Vec<String>) -> Result<Sentence, ParseError> {
    if p.is_keyword("forall") || p.is_keyword("exists") {
        let univ = p.is_keyword("forall");
        p.bump();
        let mut vars = vec![p.expect_ident()?];
        while let Tok::Ident(name) = p.peek() {
            if KEYWORDS.contains(&name.as_str()) {
                break;
            }
            vars.push(name.clone());
            p.bump();
        }
        p.expect(&Tok::Dot)?;
        let depth = bound.len();
        bound.extend(vars.iter().cloned());
        let body = sentence(p, sig, bound)?;
        bound.truncate(depth);
        let mut out = body;
        for v in vars.into_iter().rev() {
            out = if univ { Sentence::forall(v, out) } else { Sentence::exists(v, out) };
        }
        return Ok(out);
    }
    s_iff(p, sig, bound)
}

fn s_iff(p: &mut Parser, sig: &FinSignature, bound: &mut Vec<String>) -> Result<Sentence, ParseError> {
    let lhs = s_implies(p, sig, bound)?;
    if p.eat(&Tok::DArrow) {
        let rhs = s_iff(p, sig, bound)?;
        return Ok(Sentence::iff(lhs, rhs));
    }
    Ok(lhs)
}

fn s_implies(p: &mut Parser, sig: &FinSignature, bound: &mut Vec<String>) -> Result<Sentence, ParseError> {
    let lhs = s_disj(p, sig, bound)?;
    if p.eat(&Tok::Arrow) {
        let rhs = s_implies(p, sig, bound)?;
        return Ok(Sentence::implies(lhs, rhs));
    }
    Ok(lhs)
}

fn s_disj(p: &mut Parser, sig: &FinSignature, bound: &mut Vec<String>) -> Result<Sentence, ParseError> {
    let first = s_conj(p, sig, bound)?;
    if !matches!(p.peek(), Tok::Pipe) {
        return Ok(first);
    }
    let mut parts = vec![first];
    while p.eat(&Tok::Pipe) {
        parts.push(s_conj(p, sig, bound)?);
    }
    Ok(Sentence::or(parts))
}

fn s_conj(p: &mut Parser, sig: &FinSignature, bound: &mut Vec<String>) -> Result<Sentence, ParseError> {
    let first = s_unary(p, sig, bound)?;
    if !matches!(p.peek(), Tok::Amp) {
        return Ok(first);
    }
    let mut parts = vec![first];
    while p.eat(&Tok::Amp) {
        parts.push(s_unary(p, sig, bound)?);
    }
    Ok(Sentence::and(parts))
}

fn s_unary(p: &mut Parser, sig: &FinSignature, bound: &mut Vec<String>) -> Result<Sentence, ParseError> {
    if p.eat(&Tok::Tilde) {
        return Ok(Sentence::not(s_unary(p, sig, bound)?));
    }
    s_atom(p, sig, bound)
}

fn s_atom(p: &mut Parser, sig: &FinSignature, bound: &mut Vec<String>) -> Result<Sentence, ParseError> {
    if p.eat(&Tok::LParen) {
        let s = sentence(p, sig, bound)?;
        p.expect(&Tok::RParen)?;
        return Ok(s);
    }
    if p.is_keyword("exactly") {
        p.bump();
        let n = p.expect_int()?;
        return Ok(Sentence::ExistsExactly(n as usize));
    }
    // relation application, or a term followed by = / !=
    if let Tok::Ident(name) = p.peek().clone() {
        if !bound.iter().any(|b| *b == name) {
            if let Some(decl) = sig.get(&name) {
                if decl.kind == SymKind::Relation {
                    p.bump();
                    p.expect(&Tok::LParen)?;
                    let args = term_list(p, sig, bound, decl.arity)?;
                    p.expect(&Tok::RParen)?;
                    return Ok(Sentence::rel(name, args));
                }
            }
        }
    }
    let lhs = term(p, sig, bound)?;
    match p.bump() {
        Tok::Eq => Ok(Sentence::eq(lhs, term(p, sig, bound)?)),
        Tok::NotEq => Ok(Sentence::neq(lhs, term(p, sig, bound)?)),
        t => {
            p.pos -= 1;
            Err(p.error(format!("expected '=' or '!=' after term, found {}", t.describe())))
        }
    }
}

fn term(p: &mut Parser, sig: &FinSignature, bound: &mut Vec<String>) -> Result<Term, ParseError> {
    let name = match p.peek().clone() {
        Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
            p.bump();
            s
        }
        t => return Err(p.error(format!("expected a term, found {}", t.describe()))),
    };
    if bound.iter().any(|b| *b == name) {
        return Ok(Term::Var(name));
    }
    match sig.get(&name) {
        Some(d) if d.kind == SymKind::Constant => Ok(Term::Const(name)),
        Some(d) if d.kind == SymKind::Function => {
            p.expect(&Tok::LParen)?;
            let args = term_list(p, sig, bound, d.arity)?;
            p.expect(&Tok::RParen)?;
            Ok(Term::App(name, args))
        }
        Some(d) => Err(p.error(format!("{name} is a {:?}, not usable as a term", d.kind))),
        None => Err(p.error(format!("unknown symbol or unbound variable {name}"))),
    }
}

fn term_list(
    p: &mut Parser,
    sig: &FinSignature,
    bound: &mut Vec<String>,
    arity: usize,
) -> Result<Vec<Term>, ParseError> {
    let mut args = vec![term(p, sig, bound)?];
    while p.eat(&Tok::Comma) {
        args.push(term(p, sig, bound)?);
    }
    if args.len() != arity {
        return Err(p.error(format!("expected {arity} arguments, found {}", args.len())));
    }
    Ok(args)
}

// ------------------------------------------------------- structure literals

/// Parses `structure { domain n; sym = value; … }` against the signature.
pub fn parse_structure(src: &str, sig: &FinSignature) -> Result<FinStructure, ParseError> {
    let mut p = Parser::new(src)?;
    let s = structure_body(&mut p, sig)?;
    p.expect_end()?;
    Ok(s)
}

fn structure_body(p: &mut Parser, sig: &FinSignature) -> Result<FinStructure, ParseError> {
    if !p.is_keyword("structure") {
        return Err(p.error("expected 'structure'"));
    }
    p.bump();
    p.expect(&Tok::LBrace)?;
    if !p.is_keyword("domain") {
        return Err(p.error("expected 'domain n;' first"));
    }
    p.bump();
    let n = p.expect_int()? as usize;
    p.expect(&Tok::Semi)?;
    let mut st = FinStructure::new(sig.clone(), n).map_err(|msg| p.error(msg))?;
    while !p.eat(&Tok::RBrace) {
        let name = p.expect_ident()?;
        p.expect(&Tok::Eq)?;
        let decl = sig
            .get(&name)
            .ok_or_else(|| p.error(format!("undeclared symbol {name}")))?
            .clone();
        match decl.kind {
            SymKind::Constant => {
                let v = p.expect_int()? as usize;
                st.set_constant(&name, v).map_err(|msg| p.error(msg))?;
            }
            SymKind::Relation => {
                p.expect(&Tok::LBrace)?;
                let mut tuples = Vec::new();
                if !matches!(p.peek(), Tok::RBrace) {
                    loop {
                        tuples.push(rel_tuple(p, decl.arity)?);
                        if !p.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                p.expect(&Tok::RBrace)?;
                st.set_relation(&name, tuples).map_err(|msg| p.error(msg))?;
            }
            SymKind::Function => {
                if decl.arity != 1 {
                    return Err(p.error(format!(
                        "function {name} has arity {}; only unary function tables are supported",
                        decl.arity
                    )));
                }
                p.expect(&Tok::LBracket)?;
                let mut table = Vec::new();
                loop {
                    table.push(p.expect_int()? as usize);
                    if !p.eat(&Tok::Comma) {
                        break;
                    }
                }
                p.expect(&Tok::RBracket)?;
                st.set_function(&name, table).map_err(|msg| p.error(msg))?;
            }
        }
        p.expect(&Tok::Semi)?;
    }
    st.validate().map_err(|msg| p.error(msg))?;
    Ok(st)
}

fn rel_tuple(p: &mut Parser, arity: usize) -> Result<Vec<usize>, ParseError> {
    if arity == 1 {
        return Ok(vec![p.expect_int()? as usize]);
    }
    p.expect(&Tok::LParen)?;
    let mut tup = vec![p.expect_int()? as usize];
    while p.eat(&Tok::Comma) {
        tup.push(p.expect_int()? as usize);
    }
    p.expect(&Tok::RParen)?;
    if tup.len() != arity {
        return Err(p.error(format!("expected a {arity}-tuple, found {} entries", tup.len())));
    }
    Ok(tup)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(names: &[&str]) -> PvDecls {
        PvDecls::new(names.iter().copied()).unwrap()
    }

    #[test]
    fn conjunction_is_flat() {
        let decls = pv(&["r1", "r2", "r3"]);
        assert_eq!(
            parse_formula("r1 & r2", &decls).unwrap(),
            Formula::and(vec![Formula::var("r1"), Formula::var("r2")])
        );
        assert_eq!(
            parse_formula("r1 & r2 & r3", &decls).unwrap(),
            Formula::and(vec![Formula::var("r1"), Formula::var("r2"), Formula::var("r3")])
        );
    }

    #[test]
    fn negated_iff_keeps_sugar_nodes() {
        let decls = pv(&["r1", "r2"]);
        let f = parse_formula("~(r1 <-> r2)", &decls).unwrap();
        assert_eq!(f, Formula::not(Formula::iff(Formula::var("r1"), Formula::var("r2"))));
    }

    #[test]
    fn undeclared_variable_is_an_error_with_position() {
        let decls = pv(&["r1"]);
        let err = parse_formula("r1 & r9", &decls).unwrap_err();
        assert!(err.msg.contains("undeclared variable r9"));
        assert_eq!((err.line, err.col), (1, 6));
    }

    #[test]
    fn precedence_and_associativity() {
        let decls = pv(&["a", "b", "c"]);
        let f = parse_formula("a & b | c -> a <-> b", &decls).unwrap();
        // ((a & b) | c) -> a, then <-> b
        let want = Formula::iff(
            Formula::implies(
                Formula::or(vec![
                    Formula::and(vec![Formula::var("a"), Formula::var("b")]),
                    Formula::var("c"),
                ]),
                Formula::var("a"),
            ),
            Formula::var("b"),
        );
        assert_eq!(f, want);
        // right-assoc arrows
        assert_eq!(
            parse_formula("a -> b -> c", &decls).unwrap(),
            Formula::implies(Formula::var("a"), Formula::implies(Formula::var("b"), Formula::var("c")))
        );
    }

    #[test]
    fn print_parse_round_trip() {
        let decls = pv(&["a", "b", "c"]);
        for src in [
            "a & (b | ~c) -> FALSE",
            "~~a <-> b & c & a",
            "(a -> b) -> c",
            "TRUE | a",
            "(a & b) & c",
        ] {
            let ast = parse_formula(src, &decls).unwrap();
            let reparsed = parse_formula(&ast.to_string(), &decls).unwrap();
            assert_eq!(ast, reparsed, "round trip failed for {src}");
        }
    }

    #[test]
    fn indexed_family_expands_inclusively() {
        let decls = pv(&["r0", "r1", "r2"]);
        let f = parse_formula("AND i in 0..2 : r{i}", &decls).unwrap();
        assert_eq!(
            f,
            Formula::and(vec![Formula::var("r0"), Formula::var("r1"), Formula::var("r2")])
        );
        assert!(parse_formula("AND i in 2..0 : r{i}", &decls).is_err());
    }

    #[test]
    fn indexed_family_with_structured_body() {
        let decls = pv(&["r1^0", "r1^1", "r2^0", "r2^1"]);
        let f = parse_formula("AND i in 1..2 : (r{i}^0 | r{i}^1)", &decls).unwrap();
        let coin = |n: u32, side: u32| Formula::var(format!("r{n}^{side}"));
        assert_eq!(
            f,
            Formula::and(vec![
                Formula::or(vec![coin(1, 0), coin(1, 1)]),
                Formula::or(vec![coin(2, 0), coin(2, 1)]),
            ])
        );
    }

    #[test]
    fn family_catches_bad_placeholders() {
        let decls = pv(&["r0", "r1"]);
        let err = parse_formula("AND i in 0..1 : r{j}", &decls).unwrap_err();
        assert!(err.msg.contains("unexpanded index placeholder"), "{}", err.msg);
    }

    fn trial_sig() -> FinSignature {
        let mut sig = FinSignature::new();
        sig.constant("t").unwrap();
        sig.relation("S", 1).unwrap();
        sig.relation("F", 1).unwrap();
        sig
    }

    #[test]
    fn sentences_parse() {
        let sig = trial_sig();
        let s = parse_sentence("forall x. (S(x) | F(x)) & ~(S(x) & F(x))", &sig).unwrap();
        assert_eq!(s.to_string(), "forall x. (S(x) | F(x)) & ~(S(x) & F(x))");
        let q = parse_sentence("S(t)", &sig).unwrap();
        assert_eq!(q, Sentence::rel("S", vec![Term::cst("t")]));
        assert_eq!(parse_sentence("exactly 3", &sig).unwrap(), Sentence::ExistsExactly(3));
        let multi = parse_sentence("exists x y. x != y & S(x) & S(y)", &sig).unwrap();
        assert!(multi.is_closed());
    }

    #[test]
    fn sentence_errors() {
        let sig = trial_sig();
        assert!(parse_sentence("S(x)", &sig).is_err()); // unbound
        assert!(parse_sentence("forall x. G(x)", &sig).is_err()); // undeclared
        assert!(parse_sentence("t = S", &sig).is_err()); // relation as term
        let err = parse_sentence("forall x. S(x, x)", &sig).unwrap_err();
        assert!(err.msg.contains("expected 1 arguments"));
    }

    #[test]
    fn structure_literals() {
        let sig = trial_sig();
        let st = parse_structure("structure { domain 2; t = 0; S = {1}; F = {0}; }", &sig).unwrap();
        assert_eq!(st.domain(), 2);
        assert_eq!(st.constant("t"), 0);
        assert!(st.relation_holds("S", &[1]) && !st.relation_holds("S", &[0]));
        // missing interpretation
        assert!(parse_structure("structure { domain 2; t = 0; S = {}; }", &sig).is_err());
        // index out of range
        assert!(parse_structure("structure { domain 2; t = 5; S = {}; F = {}; }", &sig).is_err());
    }
}
