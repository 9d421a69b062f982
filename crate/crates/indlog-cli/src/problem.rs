//! The `.prob` problem-file format.
//!
//! One file describes one problem over one root theory. A file is a
//! sequence of sections, each ending in `;` (except the brace-delimited
//! ones), with `#` comments running to end of line:
//!
//! ```text
//! vars r1 r2;                    # propositional problem, or
//! signature { const c s0 s1; rel S 1; fn f 2; }
//!
//! axiom <expr>;                  # contributes to the root theory
//! assume P(<expr> | e1, e2) = 1/2;
//! condition independence;                # propositional files
//! condition independence(<s>, <s>);      # first-order files
//! condition indifference { bound 4; }
//! query <expr>;
//! query P(<expr> | e1, e2);
//! ```
//!
//! Expressions use the formula grammar (`~ & | -> <->`, `TRUE`, `FALSE`)
//! in propositional files and the sentence grammar (`forall`, `exists`,
//! `exactly n`, `=`, `!=`, relations) in first-order files. Inside
//! `P(...)` the first `|` at parenthesis depth 0 is the conditioning
//! bar; parenthesize a disjunction in target position. The full grammar
//! lives in `docs/grammar.ebnf`.

use indlog::fol::{FinSignature, Sentence};
use indlog::formula::{Formula, PvDecls};
use indlog::indifference::{PoIProblem, DEFAULT_DOMAIN_BOUND};
use indlog::inductive::{Antecedent, InductiveStatement, Problem};
use indlog::parse::{parse_formula, parse_sentence, ParseError};
use indlog::Rat;

#[derive(Debug, Clone)]
pub enum ProblemKind {
    Prop {
        decls: PvDecls,
        root: Vec<Formula>,
        assumes: Vec<(Vec<Formula>, Formula, Rat)>,
        /// `condition independence;` — the assumed marginals are jointly
        /// independent rather than merely constraining.
        independence: bool,
        queries: Vec<(Vec<Formula>, Formula)>,
    },
    Fo {
        sig: FinSignature,
        axioms: Vec<Sentence>,
        assumes: Vec<(Vec<Sentence>, Sentence, Rat)>,
        independence: Vec<(Sentence, Sentence)>,
        bound: Option<usize>,
        queries: Vec<(Vec<Sentence>, Sentence)>,
    },
}

#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub kind: ProblemKind,
}

impl ProblemFile {
    /// The propositional problem: root theory plus assumed statements.
    pub fn inductive(&self) -> Result<Problem, String> {
        match &self.kind {
            ProblemKind::Prop { decls, root, assumes, .. } => {
                let mut statements = Vec::new();
                for (extras, target, p) in assumes {
                    let x = Antecedent::new(root.clone(), extras.clone());
                    let st = InductiveStatement::new(x, target.clone(), p.clone())
                        .map_err(|e| e.to_string())?;
                    statements.push(st);
                }
                Problem::new(decls.clone(), root.clone(), statements).map_err(|e| e.to_string())
            }
            ProblemKind::Fo { .. } => {
                Err("this file declares a signature; use the `poi` command".to_string())
            }
        }
    }

    /// The first-order indifference problem, with an optional domain-bound
    /// override from the command line.
    pub fn poi(&self, bound_override: Option<usize>) -> Result<PoIProblem, String> {
        match &self.kind {
            ProblemKind::Fo { sig, axioms, assumes, independence, bound, queries } => {
                let b = bound_override.or(*bound).unwrap_or(DEFAULT_DOMAIN_BOUND);
                let mut p = PoIProblem::new(sig.clone(), axioms.clone(), b)?;
                for (extras, target, prob) in assumes {
                    p.assume(extras.clone(), target.clone(), prob.clone())?;
                }
                for (a, bb) in independence {
                    p.assume_independent(a.clone(), bb.clone())?;
                }
                for (extras, q) in queries {
                    p.query_given(extras.clone(), q.clone())?;
                }
                Ok(p)
            }
            ProblemKind::Prop { .. } => Err(
                "this file declares propositional variables; use `check`, `consistency`, or `derive`"
                    .to_string(),
            ),
        }
    }
}

/// A captured stretch of source text together with the file position of
/// its first character, so sub-parser errors can be mapped back.
struct Fragment {
    text: String,
    start: (u32, u32),
}

fn remap(e: ParseError, start: (u32, u32)) -> ParseError {
    if e.line <= 1 {
        ParseError { line: start.0, col: start.1 + e.col.saturating_sub(1), msg: e.msg }
    } else {
        ParseError { line: start.0 + e.line - 1, col: e.col, msg: e.msg }
    }
}

struct Scan {
    chars: Vec<char>,
    pos: Vec<(u32, u32)>,
    i: usize,
}

impl Scan {
    fn new(src: &str) -> Scan {
        let mut chars = Vec::new();
        let mut pos = Vec::new();
        let (mut line, mut col) = (1u32, 1u32);
        for c in src.chars() {
            chars.push(c);
            pos.push((line, col));
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        pos.push((line, col));
        Scan { chars, pos, i: 0 }
    }

    fn at(&self) -> (u32, u32) {
        self.pos[self.i.min(self.pos.len() - 1)]
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.at();
        ParseError { line, col, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.i < self.chars.len() {
            let c = self.chars[self.i];
            if c.is_whitespace() {
                self.i += 1;
            } else if c == '#' {
                while self.i < self.chars.len() && self.chars[self.i] != '\n' {
                    self.i += 1;
                }
            } else {
                break;
            }
        }
    }

    fn eof(&mut self) -> bool {
        self.skip_ws();
        self.i >= self.chars.len()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.i).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn word(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.i;
        if let Some(&c) = self.chars.get(self.i) {
            if c.is_ascii_alphabetic() || c == '_' {
                self.i += 1;
                while let Some(&c) = self.chars.get(self.i) {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        self.i += 1;
                    } else {
                        break;
                    }
                }
                return Some(self.chars[start..self.i].iter().collect());
            }
        }
        None
    }

    fn expect_word(&mut self, w: &str) -> Result<(), ParseError> {
        self.skip_ws();
        let pos = self.at();
        match self.word() {
            Some(got) if got == w => Ok(()),
            Some(got) => {
                Err(ParseError { line: pos.0, col: pos.1, msg: format!("expected `{w}`, found `{got}`") })
            }
            None => Err(self.err(format!("expected `{w}`"))),
        }
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.i;
        while let Some(&c) = self.chars.get(self.i) {
            if c.is_ascii_digit() {
                self.i += 1;
            } else {
                break;
            }
        }
        if start == self.i {
            return Err(self.err("expected a number"));
        }
        let text: String = self.chars[start..self.i].iter().collect();
        text.parse().map_err(|_| {
            let (line, col) = self.pos[start];
            ParseError { line, col, msg: format!("number `{text}` is out of range") }
        })
    }

    fn rational(&mut self) -> Result<Rat, ParseError> {
        self.skip_ws();
        let pos = self.at();
        let numer = self.nat()?;
        let mut denom = 1u64;
        if self.peek() == Some('/') {
            self.i += 1;
            denom = self.nat()?;
        }
        let too_big = |_| ParseError {
            line: pos.0,
            col: pos.1,
            msg: "rational out of range".to_string(),
        };
        let n = i64::try_from(numer).map_err(too_big)?;
        let d = i64::try_from(denom).map_err(too_big)?;
        if d == 0 {
            return Err(ParseError { line: pos.0, col: pos.1, msg: "zero denominator".to_string() });
        }
        Ok(Rat::new(n, d))
    }

    /// Capture raw text up to a `;` at parenthesis depth 0, consuming it.
    fn fragment_to_semi(&mut self) -> Result<Fragment, ParseError> {
        self.skip_ws();
        let start = self.at();
        let mut text = String::new();
        let mut depth = 0usize;
        loop {
            let Some(&c) = self.chars.get(self.i) else {
                return Err(self.err("unterminated statement: missing `;`"));
            };
            match c {
                ';' if depth == 0 => {
                    self.i += 1;
                    return Ok(Fragment { text, start });
                }
                '#' => {
                    while self.i < self.chars.len() && self.chars[self.i] != '\n' {
                        self.i += 1;
                    }
                    continue;
                }
                '(' => depth += 1,
                ')' => depth = depth.saturating_sub(1),
                _ => {}
            }
            text.push(c);
            self.i += 1;
        }
    }

    /// Expect `(` and capture raw text up to the matching `)`, consuming it.
    fn fragment_parens(&mut self) -> Result<Fragment, ParseError> {
        self.expect('(')?;
        self.skip_ws();
        let start = self.at();
        let mut text = String::new();
        let mut depth = 0usize;
        loop {
            let Some(&c) = self.chars.get(self.i) else {
                return Err(self.err("missing `)`"));
            };
            match c {
                ')' if depth == 0 => {
                    self.i += 1;
                    return Ok(Fragment { text, start });
                }
                '#' => {
                    while self.i < self.chars.len() && self.chars[self.i] != '\n' {
                        self.i += 1;
                    }
                    continue;
                }
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            text.push(c);
            self.i += 1;
        }
    }
}

/// Split a fragment at depth-0 occurrences of `sep`, keeping positions.
/// With `first_only`, split at most once (used for the conditioning bar,
/// so extras keep their own top-level `|`s).
fn split_fragment(frag: &Fragment, sep: char, first_only: bool) -> Vec<Fragment> {
    let mut pieces = Vec::new();
    let mut depth = 0usize;
    let (mut line, mut col) = (1u32, 1u32);
    let mut cur = String::new();
    let mut cur_start: Option<(u32, u32)> = None;
    let mut split_done = false;
    for c in frag.text.chars() {
        let here = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ => {}
        }
        if c == sep && depth == 0 && !(first_only && split_done) {
            pieces.push((std::mem::take(&mut cur), cur_start.take()));
            split_done = true;
            continue;
        }
        if cur_start.is_none() && !c.is_whitespace() {
            cur_start = Some(here);
        }
        if cur_start.is_some() {
            cur.push(c);
        }
    }
    pieces.push((cur, cur_start));
    pieces
        .into_iter()
        .map(|(text, rel)| {
            let rel = rel.unwrap_or((1, 1));
            let start = if rel.0 <= 1 {
                (frag.start.0, frag.start.1 + rel.1 - 1)
            } else {
                (frag.start.0 + rel.0 - 1, rel.1)
            };
            Fragment { text: text.trim_end().to_string(), start }
        })
        .collect()
}

enum Expr {
    Prop(Formula),
    Fo(Sentence),
}

fn parse_expr(frag: &Fragment, kind: &ProblemKind) -> Result<Expr, ParseError> {
    match kind {
        ProblemKind::Prop { decls, .. } => parse_formula(&frag.text, decls)
            .map(Expr::Prop)
            .map_err(|e| remap(e, frag.start)),
        ProblemKind::Fo { sig, .. } => parse_sentence(&frag.text, sig)
            .map(Expr::Fo)
            .map_err(|e| remap(e, frag.start)),
    }
}

/// Parse the `P( target [| extra, extra, ...] )` body.
fn parse_prob_body(
    frag: &Fragment,
    kind: &ProblemKind,
) -> Result<(Vec<Expr>, Expr), ParseError> {
    let halves = split_fragment(frag, '|', true);
    let target = parse_expr(&halves[0], kind)?;
    let mut extras = Vec::new();
    if halves.len() > 1 {
        for piece in split_fragment(&halves[1], ',', false) {
            extras.push(parse_expr(&piece, kind)?);
        }
    }
    Ok((extras, target))
}

fn unwrap_prop(exprs: Vec<Expr>) -> Vec<Formula> {
    exprs
        .into_iter()
        .map(|e| match e {
            Expr::Prop(f) => f,
            Expr::Fo(_) => unreachable!("mode is fixed before expressions parse"),
        })
        .collect()
}

fn unwrap_fo(exprs: Vec<Expr>) -> Vec<Sentence> {
    exprs
        .into_iter()
        .map(|e| match e {
            Expr::Fo(s) => s,
            Expr::Prop(_) => unreachable!("mode is fixed before expressions parse"),
        })
        .collect()
}

pub fn parse_problem(src: &str) -> Result<ProblemFile, ParseError> {
    let mut s = Scan::new(src);
    let mut kind: Option<ProblemKind> = None;

    while !s.eof() {
        let kw_pos = s.at();
        let kw = s
            .word()
            .ok_or_else(|| s.err("expected a keyword (vars, signature, axiom, assume, condition, query)"))?;
        let kw_err = |msg: String| ParseError { line: kw_pos.0, col: kw_pos.1, msg };
        match kw.as_str() {
            "vars" => {
                if kind.is_some() {
                    return Err(kw_err("a problem has exactly one declaration section".into()));
                }
                let mut names = Vec::new();
                while let Some(w) = s.word() {
                    names.push(w);
                }
                s.expect(';')?;
                let decls = PvDecls::new(names).map_err(kw_err)?;
                kind = Some(ProblemKind::Prop {
                    decls,
                    root: Vec::new(),
                    assumes: Vec::new(),
                    independence: false,
                    queries: Vec::new(),
                });
            }
            "signature" => {
                if kind.is_some() {
                    return Err(kw_err("a problem has exactly one declaration section".into()));
                }
                s.expect('{')?;
                let mut sig = FinSignature::new();
                loop {
                    if s.peek() == Some('}') {
                        s.i += 1;
                        break;
                    }
                    let d_pos = s.at();
                    let d_err = |msg: String| ParseError { line: d_pos.0, col: d_pos.1, msg };
                    let Some(d) = s.word() else {
                        return Err(s.err("expected `const`, `rel`, `fn`, or `}`"));
                    };
                    match d.as_str() {
                        "const" => {
                            let mut any = false;
                            while let Some(w) = s.word() {
                                sig.constant(&w).map_err(d_err)?;
                                any = true;
                            }
                            if !any {
                                return Err(s.err("expected a constant name"));
                            }
                            s.expect(';')?;
                        }
                        "rel" | "fn" => {
                            let Some(name) = s.word() else {
                                return Err(s.err("expected a symbol name"));
                            };
                            let arity = s.nat()?;
                            let arity = usize::try_from(arity)
                                .map_err(|_| s.err("arity out of range"))?;
                            if d == "rel" {
                                sig.relation(&name, arity).map_err(d_err)?;
                            } else {
                                sig.function(&name, arity).map_err(d_err)?;
                            }
                            s.expect(';')?;
                        }
                        other => {
                            return Err(d_err(format!(
                                "unknown declaration `{other}` (expected const, rel, or fn)"
                            )))
                        }
                    }
                }
                kind = Some(ProblemKind::Fo {
                    sig,
                    axioms: Vec::new(),
                    assumes: Vec::new(),
                    independence: Vec::new(),
                    bound: None,
                    queries: Vec::new(),
                });
            }
            "axiom" => {
                let Some(k) = kind.as_mut() else {
                    return Err(kw_err("declare `vars` or a `signature` before `axiom`".into()));
                };
                let frag = s.fragment_to_semi()?;
                match parse_expr(&frag, k)? {
                    Expr::Prop(f) => match k {
                        ProblemKind::Prop { root, .. } => root.push(f),
                        _ => unreachable!(),
                    },
                    Expr::Fo(sentence) => match k {
                        ProblemKind::Fo { axioms, .. } => axioms.push(sentence),
                        _ => unreachable!(),
                    },
                }
            }
            "assume" => {
                let Some(k) = kind.as_ref() else {
                    return Err(kw_err("declare `vars` or a `signature` before `assume`".into()));
                };
                s.expect_word("P")?;
                let frag = s.fragment_parens()?;
                let (extras, target) = parse_prob_body(&frag, k)?;
                s.expect('=')?;
                let p = s.rational()?;
                s.expect(';')?;
                match kind.as_mut().unwrap() {
                    ProblemKind::Prop { assumes, .. } => {
                        let Expr::Prop(t) = target else { unreachable!() };
                        assumes.push((unwrap_prop(extras), t, p));
                    }
                    ProblemKind::Fo { assumes, .. } => {
                        let Expr::Fo(t) = target else { unreachable!() };
                        assumes.push((unwrap_fo(extras), t, p));
                    }
                }
            }
            "condition" => {
                let Some(c) = s.word() else {
                    return Err(s.err("expected `independence` or `indifference`"));
                };
                match c.as_str() {
                    "independence" => {
                        let first_order = match &kind {
                            Some(k) => matches!(k, ProblemKind::Fo { .. }),
                            None => {
                                return Err(kw_err(
                                    "declare `vars` or a `signature` before `condition`".into(),
                                ))
                            }
                        };
                        if !first_order {
                            if s.peek() == Some('(') {
                                return Err(s.err(
                                    "propositional independence takes no arguments; write `condition independence;`",
                                ));
                            }
                            s.expect(';')?;
                            if let Some(ProblemKind::Prop { independence, .. }) = kind.as_mut() {
                                *independence = true;
                            }
                        } else {
                            let frag = s.fragment_parens()?;
                            let pieces = split_fragment(&frag, ',', false);
                            if pieces.len() != 2 {
                                return Err(kw_err(
                                    "independence takes exactly two sentences".into(),
                                ));
                            }
                            let (a, b) = {
                                let k = kind.as_ref().unwrap();
                                (parse_expr(&pieces[0], k)?, parse_expr(&pieces[1], k)?)
                            };
                            s.expect(';')?;
                            let (Expr::Fo(a), Expr::Fo(b)) = (a, b) else { unreachable!() };
                            if let Some(ProblemKind::Fo { independence, .. }) = kind.as_mut() {
                                independence.push((a, b));
                            }
                        }
                    }
                    "indifference" => {
                        s.expect('{')?;
                        s.expect_word("bound")?;
                        let n = s.nat()?;
                        s.expect(';')?;
                        s.expect('}')?;
                        if s.peek() == Some(';') {
                            s.i += 1;
                        }
                        match kind.as_mut() {
                            Some(ProblemKind::Fo { bound, .. }) => {
                                if bound.is_some() {
                                    return Err(kw_err("domain bound already set".into()));
                                }
                                *bound = Some(usize::try_from(n).unwrap_or(usize::MAX));
                            }
                            _ => {
                                return Err(kw_err(
                                    "`condition indifference` applies to signature problems only"
                                        .into(),
                                ))
                            }
                        }
                    }
                    other => {
                        return Err(kw_err(format!(
                            "unknown condition `{other}` (expected independence or indifference)"
                        )))
                    }
                }
            }
            "query" => {
                let Some(k) = kind.as_ref() else {
                    return Err(kw_err("declare `vars` or a `signature` before `query`".into()));
                };
                s.skip_ws();
                let save = s.i;
                let p_form = matches!(s.word().as_deref(), Some("P")) && s.peek() == Some('(');
                let (extras, target) = if p_form {
                    let frag = s.fragment_parens()?;
                    let parsed = parse_prob_body(&frag, k)?;
                    s.expect(';')?;
                    parsed
                } else {
                    s.i = save;
                    let frag = s.fragment_to_semi()?;
                    (Vec::new(), parse_expr(&frag, k)?)
                };
                match kind.as_mut().unwrap() {
                    ProblemKind::Prop { queries, .. } => {
                        let Expr::Prop(t) = target else { unreachable!() };
                        queries.push((unwrap_prop(extras), t));
                    }
                    ProblemKind::Fo { queries, .. } => {
                        let Expr::Fo(t) = target else { unreachable!() };
                        queries.push((unwrap_fo(extras), t));
                    }
                }
            }
            other => {
                return Err(kw_err(format!(
                    "unknown keyword `{other}` (expected vars, signature, axiom, assume, condition, or query)"
                )))
            }
        }
    }

    match kind {
        Some(kind) => Ok(ProblemFile { kind }),
        None => Err(ParseError {
            line: 1,
            col: 1,
            msg: "empty problem: declare `vars` or a `signature`".to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_propositional_file() {
        let src = "\
# two linked propositions
vars r1 r2;
assume P(r1) = 1/2;
assume P(r2) = 1/2;
assume P(r1 <-> r2) = 1/2;
query P(r1 & r2);
";
        let pf = parse_problem(src).unwrap();
        let ProblemKind::Prop { decls, assumes, queries, .. } = &pf.kind else {
            panic!("expected a propositional problem");
        };
        assert_eq!(decls.len(), 2);
        assert_eq!(assumes.len(), 3);
        assert_eq!(queries.len(), 1);
        assert!(pf.inductive().is_ok());
    }

    #[test]
    fn parses_a_signature_file_with_conditions() {
        let src = "\
signature { const c s0 s1; }
axiom ~(s0 = s1);
axiom c = s0 | c = s1;
condition indifference { bound 4; }
query c = s1;
";
        let pf = parse_problem(src).unwrap();
        let ProblemKind::Fo { axioms, bound, queries, .. } = &pf.kind else {
            panic!("expected a first-order problem");
        };
        assert_eq!(axioms.len(), 2);
        assert_eq!(*bound, Some(4));
        assert_eq!(queries.len(), 1);
        assert!(pf.poi(None).is_ok());
    }

    #[test]
    fn conditional_bodies_split_on_the_first_top_level_bar() {
        let src = "\
vars a b;
assume P((a | b) | b) = 1;
query P(a | b, a -> b);
";
        let pf = parse_problem(src).unwrap();
        let ProblemKind::Prop { assumes, queries, .. } = &pf.kind else { panic!() };
        assert_eq!(assumes[0].0.len(), 1, "one conditioning formula");
        assert_eq!(queries[0].0.len(), 2, "two conditioning formulas");
    }

    #[test]
    fn reports_positions_in_file_coordinates() {
        let src = "vars a b;\nassume P(a &&& b) = 1/2;\n";
        let e = parse_problem(src).unwrap_err();
        assert_eq!(e.line, 2, "{e}");
        assert!(e.col > 10, "column should point into the fragment: {e}");

        let e = parse_problem("vars a b;\nquery a &\n  ;\n").unwrap_err();
        assert_eq!((e.line, e.col), (3, 3), "continuation lines keep file coordinates: {e}");
    }

    #[test]
    fn rejects_structural_mistakes() {
        assert!(parse_problem("").is_err());
        assert!(parse_problem("axiom x;").is_err());
        assert!(parse_problem("vars a; vars b;").is_err());
        assert!(parse_problem("vars a; assume P(a) = 2/0;").is_err());
        assert!(parse_problem("vars a; condition independence(a, a);").is_err());
        assert!(parse_problem("vars a; condition indifference { bound 3; }").is_err());
        assert!(parse_problem("vars a; query a").is_err(), "missing semicolon");
    }

    #[test]
    fn comments_inside_fragments_are_skipped() {
        let src = "\
vars a b;
query a &  # conjunction continues
      b;
";
        let pf = parse_problem(src).unwrap();
        let ProblemKind::Prop { queries, .. } = &pf.kind else { panic!() };
        assert_eq!(queries.len(), 1);
    }
}
