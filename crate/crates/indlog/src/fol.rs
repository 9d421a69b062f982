//! First-order syntax over a finite signature, and the signature
//! permutations that act on it.
//!
//! Terms and sentences store symbol names; [`FinSignature`] owns the
//! declarations and validates kind and arity. As in the propositional
//! layer, negation, conjunction, equality, relation application and the
//! universal quantifier are the core; everything else desugars.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SymKind {
    Constant,
    Relation,
    Function,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SymDecl {
    pub name: String,
    pub kind: SymKind,
    pub arity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct FinSignature {
    symbols: Vec<SymDecl>,
}

impl FinSignature {
    pub fn new() -> Self {
        FinSignature::default()
    }

    fn declare(&mut self, name: &str, kind: SymKind, arity: usize) -> Result<(), String> {
        if self.get(name).is_some() {
            return Err(format!("symbol {name} declared twice"));
        }
        if kind == SymKind::Relation && arity == 0 {
            return Err(format!("relation {name} must have arity >= 1"));
        }
        if kind == SymKind::Function && arity == 0 {
            return Err(format!("0-ary function {name} should be declared as a constant"));
        }
        self.symbols.push(SymDecl { name: name.to_owned(), kind, arity });
        Ok(())
    }

    pub fn constant(&mut self, name: &str) -> Result<(), String> {
        self.declare(name, SymKind::Constant, 0)
    }

    pub fn relation(&mut self, name: &str, arity: usize) -> Result<(), String> {
        self.declare(name, SymKind::Relation, arity)
    }

    pub fn function(&mut self, name: &str, arity: usize) -> Result<(), String> {
        self.declare(name, SymKind::Function, arity)
    }

    pub fn get(&self, name: &str) -> Option<&SymDecl> {
        self.symbols.iter().find(|s| s.name == name)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &SymDecl> {
        self.symbols.iter()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Symbols grouped by (kind, arity); permutations act within groups.
    pub fn classes(&self) -> Vec<Vec<&SymDecl>> {
        let mut by_class: BTreeMap<(SymKind, usize), Vec<&SymDecl>> = BTreeMap::new();
        for s in &self.symbols {
            by_class.entry((s.kind, s.arity)).or_default().push(s);
        }
        by_class.into_values().collect()
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn cst(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Const(_) => {}
            Term::App(_, ts) => ts.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    fn collect_syms(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(_) => {}
            Term::Const(c) => {
                out.insert(c.clone());
            }
            Term::App(f, ts) => {
                out.insert(f.clone());
                ts.iter().for_each(|t| t.collect_syms(out));
            }
        }
    }

    pub fn permute(&self, pi: &SignaturePermutation) -> Term {
        match self {
            Term::Var(x) => Term::Var(x.clone()),
            Term::Const(c) => Term::Const(pi.apply(c).to_owned()),
            Term::App(f, ts) => {
                Term::App(pi.apply(f).to_owned(), ts.iter().map(|t| t.permute(pi)).collect())
            }
        }
    }

    /// Checks symbol use against the signature.
    pub fn validate(&self, sig: &FinSignature, bound: &BTreeSet<String>) -> Result<(), String> {
        match self {
            Term::Var(x) => {
                if bound.contains(x) {
                    Ok(())
                } else {
                    Err(format!("unbound variable {x}"))
                }
            }
            Term::Const(c) => match sig.get(c) {
                Some(d) if d.kind == SymKind::Constant => Ok(()),
                Some(d) => Err(format!("{c} is a {:?}, used as a constant", d.kind)),
                None => Err(format!("undeclared symbol {c}")),
            },
            Term::App(f, ts) => {
                match sig.get(f) {
                    Some(d) if d.kind == SymKind::Function && d.arity == ts.len() => {}
                    Some(d) => {
                        return Err(format!(
                            "{f} is a {:?}/{}, applied to {} arguments as a function",
                            d.kind,
                            d.arity,
                            ts.len()
                        ))
                    }
                    None => return Err(format!("undeclared symbol {f}")),
                }
                ts.iter().try_for_each(|t| t.validate(sig, bound))
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => f.write_str(x),
            Term::Const(c) => f.write_str(c),
            Term::App(g, ts) => {
                write!(f, "{g}(")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sentence {
    Eq(Term, Term),
    Rel(String, Vec<Term>),
    Not(Box<Sentence>),
    AndAll(Vec<Sentence>),
    Forall(String, Box<Sentence>),
    // sugar
    OrAll(Vec<Sentence>),
    Implies(Box<Sentence>, Box<Sentence>),
    Iff(Box<Sentence>, Box<Sentence>),
    Exists(String, Box<Sentence>),
    /// "the domain has exactly n elements"
    ExistsExactly(usize),
    NotEq(Term, Term),
}

use Sentence::*;

impl Sentence {
    pub fn not(s: Sentence) -> Sentence {
        Not(Box::new(s))
    }

    pub fn and(ss: Vec<Sentence>) -> Sentence {
        AndAll(ss)
    }

    pub fn or(ss: Vec<Sentence>) -> Sentence {
        OrAll(ss)
    }

    pub fn implies(a: Sentence, b: Sentence) -> Sentence {
        Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Sentence, b: Sentence) -> Sentence {
        Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(x: impl Into<String>, body: Sentence) -> Sentence {
        Forall(x.into(), Box::new(body))
    }

    pub fn exists(x: impl Into<String>, body: Sentence) -> Sentence {
        Exists(x.into(), Box::new(body))
    }

    pub fn rel(name: impl Into<String>, args: Vec<Term>) -> Sentence {
        Rel(name.into(), args)
    }

    pub fn eq(a: Term, b: Term) -> Sentence {
        Eq(a, b)
    }

    pub fn neq(a: Term, b: Term) -> Sentence {
        NotEq(a, b)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut BTreeSet<String>, out: &mut BTreeSet<String>) {
        match self {
            Eq(a, b) | NotEq(a, b) => {
                let mut vs = BTreeSet::new();
                a.collect_vars(&mut vs);
                b.collect_vars(&mut vs);
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
            Rel(_, ts) => {
                let mut vs = BTreeSet::new();
                ts.iter().for_each(|t| t.collect_vars(&mut vs));
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
            Not(s) => s.collect_free(bound, out),
            AndAll(ss) | OrAll(ss) => ss.iter().for_each(|s| s.collect_free(bound, out)),
            Implies(a, b) | Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Forall(x, s) | Exists(x, s) => {
                let fresh = bound.insert(x.clone());
                s.collect_free(bound, out);
                if fresh {
                    bound.remove(x);
                }
            }
            ExistsExactly(_) => {}
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Extralogical symbols occurring in the sentence.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_syms(&mut out);
        out
    }

    fn collect_syms(&self, out: &mut BTreeSet<String>) {
        match self {
            Eq(a, b) | NotEq(a, b) => {
                a.collect_syms(out);
                b.collect_syms(out);
            }
            Rel(r, ts) => {
                out.insert(r.clone());
                ts.iter().for_each(|t| t.collect_syms(out));
            }
            Not(s) => s.collect_syms(out),
            AndAll(ss) | OrAll(ss) => ss.iter().for_each(|s| s.collect_syms(out)),
            Implies(a, b) | Iff(a, b) => {
                a.collect_syms(out);
                b.collect_syms(out);
            }
            Forall(_, s) | Exists(_, s) => s.collect_syms(out),
            ExistsExactly(_) => {}
        }
    }

    pub fn validate(&self, sig: &FinSignature) -> Result<(), String> {
        self.validate_in(sig, &mut BTreeSet::new())
    }

    fn validate_in(&self, sig: &FinSignature, bound: &mut BTreeSet<String>) -> Result<(), String> {
        match self {
            Eq(a, b) | NotEq(a, b) => {
                a.validate(sig, bound)?;
                b.validate(sig, bound)
            }
            Rel(r, ts) => {
                match sig.get(r) {
                    Some(d) if d.kind == SymKind::Relation && d.arity == ts.len() => {}
                    Some(d) => {
                        return Err(format!(
                            "{r} is a {:?}/{}, applied to {} arguments as a relation",
                            d.kind,
                            d.arity,
                            ts.len()
                        ))
                    }
                    None => return Err(format!("undeclared symbol {r}")),
                }
                ts.iter().try_for_each(|t| t.validate(sig, bound))
            }
            Not(s) => s.validate_in(sig, bound),
            AndAll(ss) | OrAll(ss) => ss.iter().try_for_each(|s| s.validate_in(sig, bound)),
            Implies(a, b) | Iff(a, b) => {
                a.validate_in(sig, bound)?;
                b.validate_in(sig, bound)
            }
            Forall(x, s) | Exists(x, s) => {
                let fresh = bound.insert(x.clone());
                let r = s.validate_in(sig, bound);
                if fresh {
                    bound.remove(x);
                }
                r
            }
            ExistsExactly(_) => Ok(()),
        }
    }

    /// Rewrites to the Eq/Rel/Not/AndAll/Forall core; idempotent.
    pub fn desugar(&self) -> Sentence {
        match self {
            Eq(..) | Rel(..) => self.clone(),
            NotEq(a, b) => Sentence::not(Eq(a.clone(), b.clone())),
            Not(s) => Sentence::not(s.desugar()),
            AndAll(ss) => AndAll(ss.iter().map(|s| s.desugar()).collect()),
            OrAll(ss) => Sentence::not(AndAll(
                ss.iter().map(|s| Sentence::not(s.desugar())).collect(),
            )),
            Implies(a, b) => {
                Sentence::or(vec![Sentence::not((**a).clone()), (**b).clone()]).desugar()
            }
            Iff(a, b) => AndAll(vec![
                Sentence::implies((**a).clone(), (**b).clone()).desugar(),
                Sentence::implies((**b).clone(), (**a).clone()).desugar(),
            ]),
            Forall(x, s) => Sentence::forall(x.clone(), s.desugar()),
            Exists(x, s) => {
                Sentence::not(Sentence::forall(x.clone(), Sentence::not(s.desugar())))
            }
            ExistsExactly(n) => self.expand_cardinality(*n).desugar(),
        }
    }

    /// `exactly n` unfolds to "n pairwise distinct elements exist and every
    /// element is one of them".
    fn expand_cardinality(&self, n: usize) -> Sentence {
        let y = Term::var("__y");
        if n == 0 {
            return Sentence::not(Sentence::exists("__y", Eq(y.clone(), y)));
        }
        let names: Vec<String> = (1..=n).map(|i| format!("__e{i}")).collect();
        let mut parts = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                parts.push(NotEq(Term::var(&names[i]), Term::var(&names[j])));
            }
        }
        parts.push(Sentence::forall(
            "__y",
            Sentence::or(names.iter().map(|x| Eq(y.clone(), Term::var(x))).collect()),
        ));
        let mut body = Sentence::and(parts);
        for x in names.iter().rev() {
            body = Sentence::exists(x, body);
        }
        body
    }

    pub fn is_core(&self) -> bool {
        match self {
            Eq(..) | Rel(..) => true,
            Not(s) | Forall(_, s) => s.is_core(),
            AndAll(ss) => ss.iter().all(|s| s.is_core()),
            _ => false,
        }
    }

    pub fn permute(&self, pi: &SignaturePermutation) -> Sentence {
        match self {
            Eq(a, b) => Eq(a.permute(pi), b.permute(pi)),
            NotEq(a, b) => NotEq(a.permute(pi), b.permute(pi)),
            Rel(r, ts) => {
                Rel(pi.apply(r).to_owned(), ts.iter().map(|t| t.permute(pi)).collect())
            }
            Not(s) => Sentence::not(s.permute(pi)),
            AndAll(ss) => AndAll(ss.iter().map(|s| s.permute(pi)).collect()),
            OrAll(ss) => OrAll(ss.iter().map(|s| s.permute(pi)).collect()),
            Implies(a, b) => Sentence::implies(a.permute(pi), b.permute(pi)),
            Iff(a, b) => Sentence::iff(a.permute(pi), b.permute(pi)),
            Forall(x, s) => Sentence::forall(x.clone(), s.permute(pi)),
            Exists(x, s) => Sentence::exists(x.clone(), s.permute(pi)),
            ExistsExactly(n) => ExistsExactly(*n),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Forall(..) | Exists(..) => 0,
            Iff(..) => 1,
            Implies(..) => 2,
            OrAll(ss) if ss.len() != 1 => 3,
            AndAll(ss) if ss.len() != 1 => 4,
            Not(_) => 5,
            _ => 6,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.prec();
        let parens = prec < min;
        if parens {
            f.write_str("(")?;
        }
        match self {
            Eq(a, b) => write!(f, "{a} = {b}")?,
            NotEq(a, b) => write!(f, "{a} != {b}")?,
            Rel(r, ts) => {
                write!(f, "{r}(")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")?;
            }
            ExistsExactly(n) => write!(f, "exactly {n}")?,
            Not(s) => {
                f.write_str("~")?;
                s.fmt_prec(f, 5)?;
            }
            // Empty lists have no written form; print tautological spellings.
            AndAll(ss) if ss.is_empty() => f.write_str("forall __x. __x = __x")?,
            OrAll(ss) if ss.is_empty() => f.write_str("~(forall __x. __x = __x)")?,
            AndAll(ss) | OrAll(ss) if ss.len() == 1 => ss[0].fmt_prec(f, min)?,
            AndAll(ss) => {
                for (i, s) in ss.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" & ")?;
                    }
                    s.fmt_prec(f, 5)?;
                }
            }
            OrAll(ss) => {
                for (i, s) in ss.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    s.fmt_prec(f, 4)?;
                }
            }
            Implies(a, b) => {
                a.fmt_prec(f, 3)?;
                f.write_str(" -> ")?;
                b.fmt_prec(f, 2)?;
            }
            Iff(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str(" <-> ")?;
                b.fmt_prec(f, 1)?;
            }
            Forall(x, s) => {
                write!(f, "forall {x}. ")?;
                s.fmt_prec(f, 0)?;
            }
            Exists(x, s) => {
                write!(f, "exists {x}. ")?;
                s.fmt_prec(f, 0)?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl fmt::Debug for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A kind- and arity-preserving bijection on the symbols of a signature.
#[derive(Clone, PartialEq, Eq)]
pub struct SignaturePermutation {
    map: BTreeMap<String, String>,
}

impl SignaturePermutation {
    pub fn identity(sig: &FinSignature) -> Self {
        let map = sig.symbols().map(|s| (s.name.clone(), s.name.clone())).collect();
        SignaturePermutation { map }
    }

    /// Builds from an explicit total map; must be a bijection preserving
    /// kind and arity.
    pub fn new(sig: &FinSignature, map: BTreeMap<String, String>) -> Result<Self, String> {
        if map.len() != sig.len() {
            return Err("permutation must cover every declared symbol".into());
        }
        let mut seen = BTreeSet::new();
        for (from, to) in &map {
            let (Some(a), Some(b)) = (sig.get(from), sig.get(to)) else {
                return Err(format!("permutation mentions undeclared symbol {from} or {to}"));
            };
            if (a.kind, a.arity) != (b.kind, b.arity) {
                return Err(format!("{from} -> {to} does not preserve kind/arity"));
            }
            if !seen.insert(to.clone()) {
                return Err(format!("{to} is the image of two symbols"));
            }
        }
        Ok(SignaturePermutation { map })
    }

    /// Builds from cycles, e.g. `[["s0", "s1"]]` for the transposition
    /// (s0 s1); unmentioned symbols stay fixed.
    pub fn from_cycles(sig: &FinSignature, cycles: &[&[&str]]) -> Result<Self, String> {
        let mut map: BTreeMap<String, String> =
            sig.symbols().map(|s| (s.name.clone(), s.name.clone())).collect();
        for cycle in cycles {
            for i in 0..cycle.len() {
                let from = cycle[i];
                let to = cycle[(i + 1) % cycle.len()];
                if !map.contains_key(from) {
                    return Err(format!("cycle mentions undeclared symbol {from}"));
                }
                map.insert(from.to_owned(), to.to_owned());
            }
        }
        SignaturePermutation::new(sig, map)
    }

    pub fn apply<'a>(&'a self, name: &'a str) -> &'a str {
        self.map.get(name).map(String::as_str).unwrap_or(name)
    }

    pub fn inverse(&self) -> SignaturePermutation {
        let map = self.map.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
        SignaturePermutation { map }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &SignaturePermutation) -> SignaturePermutation {
        let map = other
            .map
            .iter()
            .map(|(a, b)| (a.clone(), self.apply(b).to_owned()))
            .collect();
        SignaturePermutation { map }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().all(|(a, b)| a == b)
    }
}

/// Cycle notation over moved symbols, `id` if nothing moves.
impl fmt::Display for SignaturePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut done: BTreeSet<&str> = BTreeSet::new();
        let mut any = false;
        for start in self.map.keys() {
            if done.contains(start.as_str()) || self.apply(start) == start {
                continue;
            }
            f.write_str("(")?;
            let mut cur = start.as_str();
            let mut first = true;
            loop {
                if !first {
                    f.write_str(" ")?;
                }
                f.write_str(cur)?;
                done.insert(cur);
                first = false;
                cur = self.apply(cur);
                if cur == start {
                    break;
                }
            }
            f.write_str(")")?;
            any = true;
        }
        if !any {
            f.write_str("id")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SignaturePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
