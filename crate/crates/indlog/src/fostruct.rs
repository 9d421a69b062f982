//! Finite first-order structures and finite probability models over them.
//!
//! Domains are `{0, …, n−1}` with a default cap of n ≤ 8 — large enough
//! for every example this crate ships, small enough that isomorphism
//! search by fingerprint-pruned backtracking is instant. Structures print
//! in (and parse from) the literal syntax
//! `structure { domain 2; c = 0; S = {1}; }`.

use crate::event::Event;
use crate::fol::{FinSignature, Sentence, SignaturePermutation, SymKind, Term};
use crate::measure::FiniteProbSpace;
use crate::rat::Rat;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

/// Default cap on domain size.
pub const MAX_DOMAIN: usize = 8;

/// A finite structure: a domain size plus an interpretation of every
/// signature symbol. Relation tuples are kept sorted; function tables are
/// flat row-major arrays over domain^k.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinStructure {
    sig: FinSignature,
    n: usize,
    constants: BTreeMap<String, usize>,
    relations: BTreeMap<String, Vec<Vec<usize>>>,
    functions: BTreeMap<String, Vec<usize>>,
}

impl FinStructure {
    pub fn new(sig: FinSignature, n: usize) -> Result<Self, String> {
        if n > MAX_DOMAIN {
            return Err(format!("domain size {n} exceeds the cap of {MAX_DOMAIN}"));
        }
        Ok(FinStructure {
            sig,
            n,
            constants: BTreeMap::new(),
            relations: BTreeMap::new(),
            functions: BTreeMap::new(),
        })
    }

    pub fn signature(&self) -> &FinSignature {
        &self.sig
    }

    pub fn domain(&self) -> usize {
        self.n
    }

    fn expect_kind(&self, name: &str, kind: SymKind) -> Result<usize, String> {
        match self.sig.get(name) {
            None => Err(format!("undeclared symbol {name}")),
            Some(d) if d.kind != kind => Err(format!("{name} is a {:?}, not a {kind:?}", d.kind)),
            Some(d) => Ok(d.arity),
        }
    }

    pub fn set_constant(&mut self, name: &str, value: usize) -> Result<(), String> {
        self.expect_kind(name, SymKind::Constant)?;
        if value >= self.n {
            return Err(format!("{name} = {value} outside the domain of size {}", self.n));
        }
        self.constants.insert(name.to_owned(), value);
        Ok(())
    }

    pub fn set_relation(&mut self, name: &str, tuples: Vec<Vec<usize>>) -> Result<(), String> {
        let arity = self.expect_kind(name, SymKind::Relation)?;
        let mut tuples = tuples;
        for t in &tuples {
            if t.len() != arity {
                return Err(format!("{name} expects {arity}-tuples"));
            }
            if t.iter().any(|&v| v >= self.n) {
                return Err(format!("tuple {t:?} outside the domain of size {}", self.n));
            }
        }
        tuples.sort();
        tuples.dedup();
        self.relations.insert(name.to_owned(), tuples);
        Ok(())
    }

    /// Row-major table over domain^arity: entry for args (a_0, …, a_{k−1})
    /// sits at index Σ a_i · n^i.
    pub fn set_function(&mut self, name: &str, table: Vec<usize>) -> Result<(), String> {
        let arity = self.expect_kind(name, SymKind::Function)?;
        let want = self.n.pow(arity as u32);
        if table.len() != want {
            return Err(format!("{name} needs {want} table entries, got {}", table.len()));
        }
        if table.iter().any(|&v| v >= self.n) {
            return Err(format!("{name} table has a value outside the domain"));
        }
        self.functions.insert(name.to_owned(), table);
        Ok(())
    }

    /// Every signature symbol must be interpreted (relations explicitly,
    /// even when empty).
    pub fn validate(&self) -> Result<(), String> {
        for d in self.sig.symbols() {
            let present = match d.kind {
                SymKind::Constant => self.constants.contains_key(&d.name),
                SymKind::Relation => self.relations.contains_key(&d.name),
                SymKind::Function => self.functions.contains_key(&d.name),
            };
            if !present {
                return Err(format!("missing interpretation for {}", d.name));
            }
        }
        Ok(())
    }

    pub fn constant(&self, name: &str) -> usize {
        *self.constants.get(name).unwrap_or_else(|| panic!("constant {name} not interpreted"))
    }

    pub fn relation_holds(&self, name: &str, tuple: &[usize]) -> bool {
        self.relations
            .get(name)
            .map(|ts| ts.binary_search_by(|t| t.as_slice().cmp(tuple)).is_ok())
            .unwrap_or_else(|| panic!("relation {name} not interpreted"))
    }

    pub fn relation_tuples(&self, name: &str) -> &[Vec<usize>] {
        self.relations.get(name).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn func_value(&self, name: &str, args: &[usize]) -> usize {
        let table = self.functions.get(name).unwrap_or_else(|| panic!("function {name} not interpreted"));
        let idx = args.iter().rev().fold(0, |acc, &a| acc * self.n + a);
        table[idx]
    }

    fn term_value(&self, t: &Term, env: &[(String, usize)]) -> Result<usize, String> {
        match t {
            Term::Var(x) => env
                .iter()
                .rev()
                .find(|(v, _)| v == x)
                .map(|(_, a)| *a)
                .ok_or_else(|| format!("unbound variable {x}")),
            Term::Const(c) => self
                .constants
                .get(c)
                .copied()
                .ok_or_else(|| format!("constant {c} not interpreted")),
            Term::App(f, args) => {
                let vals: Vec<usize> = args
                    .iter()
                    .map(|a| self.term_value(a, env))
                    .collect::<Result<_, _>>()?;
                if !self.functions.contains_key(f) {
                    return Err(format!("function {f} not interpreted"));
                }
                Ok(self.func_value(f, &vals))
            }
        }
    }

    /// Evaluates a closed sentence; quantifiers range over the finite
    /// domain, and `exactly k` holds iff the domain has exactly k elements
    /// (agreeing with its first-order expansion).
    pub fn eval(&self, s: &Sentence) -> Result<bool, String> {
        let mut env = Vec::new();
        self.eval_with(s, &mut env)
    }

    fn eval_with(&self, s: &Sentence, env: &mut Vec<(String, usize)>) -> Result<bool, String> {
        Ok(match s {
            Sentence::Eq(t1, t2) => self.term_value(t1, env)? == self.term_value(t2, env)?,
            Sentence::NotEq(t1, t2) => self.term_value(t1, env)? != self.term_value(t2, env)?,
            Sentence::Rel(name, args) => {
                let vals: Vec<usize> = args
                    .iter()
                    .map(|a| self.term_value(a, env))
                    .collect::<Result<_, _>>()?;
                if !self.relations.contains_key(name) {
                    return Err(format!("relation {name} not interpreted"));
                }
                self.relation_holds(name, &vals)
            }
            Sentence::Not(a) => !self.eval_with(a, env)?,
            Sentence::AndAll(parts) => {
                let mut acc = true;
                for p in parts {
                    acc &= self.eval_with(p, env)?;
                }
                acc
            }
            Sentence::OrAll(parts) => {
                let mut acc = false;
                for p in parts {
                    acc |= self.eval_with(p, env)?;
                }
                acc
            }
            Sentence::Implies(a, b) => !self.eval_with(a, env)? | self.eval_with(b, env)?,
            Sentence::Iff(a, b) => self.eval_with(a, env)? == self.eval_with(b, env)?,
            Sentence::Forall(x, body) => {
                let mut acc = true;
                for a in 0..self.n {
                    env.push((x.clone(), a));
                    let v = self.eval_with(body, env);
                    env.pop();
                    acc &= v?;
                }
                acc
            }
            Sentence::Exists(x, body) => {
                let mut acc = false;
                for a in 0..self.n {
                    env.push((x.clone(), a));
                    let v = self.eval_with(body, env);
                    env.pop();
                    acc |= v?;
                }
                acc
            }
            Sentence::ExistsExactly(k) => self.n == *k,
        })
    }

    /// The image structure ω^π = ω ∘ π⁻¹: the interpretation of π(σ) in
    /// the image is the interpretation of σ in ω, so that
    /// (σ^π)^{ω^π} = σ^ω.
    pub fn pi_image(&self, pi: &SignaturePermutation) -> FinStructure {
        let mut out = FinStructure::new(self.sig.clone(), self.n).expect("same domain size");
        for (name, v) in &self.constants {
            out.constants.insert(pi.apply(name).to_owned(), *v);
        }
        for (name, ts) in &self.relations {
            out.relations.insert(pi.apply(name).to_owned(), ts.clone());
        }
        for (name, table) in &self.functions {
            out.functions.insert(pi.apply(name).to_owned(), table.clone());
        }
        out
    }

    /// Per-element invariant used to prune isomorphism search: which
    /// constants name it, and its incidence counts per relation/function
    /// argument position.
    fn fingerprint(&self, e: usize) -> Vec<usize> {
        let mut fp = Vec::new();
        for d in self.sig.symbols() {
            match d.kind {
                SymKind::Constant => fp.push((self.constants.get(&d.name) == Some(&e)) as usize),
                SymKind::Relation => {
                    for pos in 0..d.arity {
                        let count = self
                            .relation_tuples(&d.name)
                            .iter()
                            .filter(|t| t[pos] == e)
                            .count();
                        fp.push(count);
                    }
                }
                SymKind::Function => {
                    let table = &self.functions[&d.name];
                    fp.push(table.iter().filter(|&&v| v == e).count());
                }
            }
        }
        fp
    }

    fn iso_respects(&self, other: &FinStructure, g: &[usize]) -> bool {
        for (name, v) in &self.constants {
            if other.constants.get(name) != Some(&g[*v]) {
                return false;
            }
        }
        for (name, ts) in &self.relations {
            let them = other.relation_tuples(name);
            if them.len() != ts.len() {
                return false;
            }
            for t in ts {
                let image: Vec<usize> = t.iter().map(|&a| g[a]).collect();
                if !other.relation_holds(name, &image) {
                    return false;
                }
            }
        }
        for (name, table) in &self.functions {
            let arity = self.sig.get(name).expect("validated").arity;
            let mut args = vec![0usize; arity];
            for (idx, &val) in table.iter().enumerate() {
                let mut rem = idx;
                for a in args.iter_mut() {
                    *a = rem % self.n;
                    rem /= self.n;
                }
                let image: Vec<usize> = args.iter().map(|&a| g[a]).collect();
                if other.func_value(name, &image) != g[val] {
                    return false;
                }
            }
        }
        true
    }

    /// Searches for a domain bijection that is a strong homomorphism in
    /// both directions. Backtracking over fingerprint-compatible
    /// candidates; `None` if the structures are not isomorphic.
    pub fn iso(&self, other: &FinStructure) -> Option<Vec<usize>> {
        if self.sig != other.sig || self.n != other.n {
            return None;
        }
        let mine: Vec<Vec<usize>> = (0..self.n).map(|e| self.fingerprint(e)).collect();
        let theirs: Vec<Vec<usize>> = (0..self.n).map(|e| other.fingerprint(e)).collect();
        {
            let mut a = mine.clone();
            let mut b = theirs.clone();
            a.sort();
            b.sort();
            if a != b {
                return None;
            }
        }
        let mut g = vec![usize::MAX; self.n];
        let mut used = vec![false; self.n];
        self.iso_search(other, &mine, &theirs, &mut g, &mut used, 0)
    }

    fn iso_search(
        &self,
        other: &FinStructure,
        mine: &[Vec<usize>],
        theirs: &[Vec<usize>],
        g: &mut Vec<usize>,
        used: &mut Vec<bool>,
        at: usize,
    ) -> Option<Vec<usize>> {
        if at == self.n {
            return self.iso_respects(other, g).then(|| g.clone());
        }
        for cand in 0..self.n {
            if used[cand] || mine[at] != theirs[cand] {
                continue;
            }
            g[at] = cand;
            used[cand] = true;
            if let Some(found) = self.iso_search(other, mine, theirs, g, used, at + 1) {
                return Some(found);
            }
            used[cand] = false;
            g[at] = usize::MAX;
        }
        None
    }
}

/// Prints (and reparses, see the grammar module) as a structure literal.
impl fmt::Display for FinStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "structure {{ domain {};", self.n)?;
        for d in self.sig.symbols() {
            match d.kind {
                SymKind::Constant => {
                    if let Some(v) = self.constants.get(&d.name) {
                        write!(f, " {} = {v};", d.name)?;
                    }
                }
                SymKind::Relation => {
                    if let Some(ts) = self.relations.get(&d.name) {
                        write!(f, " {} = {{", d.name)?;
                        for (i, t) in ts.iter().enumerate() {
                            if i > 0 {
                                write!(f, ", ")?;
                            }
                            if d.arity == 1 {
                                write!(f, "{}", t[0])?;
                            } else {
                                write!(f, "(")?;
                                for (j, a) in t.iter().enumerate() {
                                    if j > 0 {
                                        write!(f, ", ")?;
                                    }
                                    write!(f, "{a}")?;
                                }
                                write!(f, ")")?;
                            }
                        }
                        write!(f, "}};")?;
                    }
                }
                SymKind::Function => {
                    if let Some(table) = self.functions.get(&d.name) {
                        write!(f, " {} = [", d.name)?;
                        for (i, v) in table.iter().enumerate() {
                            if i > 0 {
                                write!(f, ", ")?;
                            }
                            write!(f, "{v}")?;
                        }
                        write!(f, "];")?;
                    }
                }
            }
        }
        write!(f, " }}")
    }
}

impl Serialize for FinStructure {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

// ------------------------------------------------------------------ models

/// A finite probability model: structures as outcomes with a probability
/// space over their indices (full power set unless constructed otherwise).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinModel {
    structures: Vec<FinStructure>,
    space: FiniteProbSpace,
}

impl Serialize for FinModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Outcome<'a> {
            structure: &'a FinStructure,
            mass: Option<Rat>,
        }
        let mut seq = serializer.serialize_seq(Some(self.structures.len()))?;
        for (i, st) in self.structures.iter().enumerate() {
            let mass = self
                .space
                .measure(&Event::singleton(self.structures.len(), i));
            seq.serialize_element(&Outcome { structure: st, mass })?;
        }
        seq.end()
    }
}

impl FinModel {
    /// Full-power-set model from (structure, mass) outcomes. Zero-mass
    /// outcomes are legitimate and retained.
    pub fn new(outcomes: Vec<(FinStructure, Rat)>) -> Result<Self, String> {
        let (structures, masses): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
        for w in structures.windows(2) {
            if w[0].signature() != w[1].signature() {
                return Err("all outcomes must share one signature".into());
            }
        }
        let space = FiniteProbSpace::from_atom_masses(masses).map_err(|e| e.to_string())?;
        Ok(FinModel { structures, space })
    }

    /// Model with an explicit measured σ-algebra over the outcome indices.
    pub fn with_space(structures: Vec<FinStructure>, space: FiniteProbSpace) -> Result<Self, String> {
        if space.outcome_count() != structures.len() {
            return Err("probability space size must match the outcome count".into());
        }
        Ok(FinModel { structures, space })
    }

    pub fn structures(&self) -> &[FinStructure] {
        &self.structures
    }

    pub fn space(&self) -> &FiniteProbSpace {
        &self.space
    }

    pub fn outcome_count(&self) -> usize {
        self.structures.len()
    }

    pub fn mass(&self, i: usize) -> Option<Rat> {
        self.space.measure(&Event::singleton(self.structures.len(), i))
    }

    /// The outcomes satisfying a closed sentence.
    pub fn event_of(&self, s: &Sentence) -> Result<Event, String> {
        let mut idx = Vec::new();
        for (i, st) in self.structures.iter().enumerate() {
            if st.eval(s)? {
                idx.push(i);
            }
        }
        Ok(Event::from_indices(self.structures.len(), &idx))
    }

    /// Probability of a sentence, measured in the completion; `None` when
    /// the sentence event is not measurable there.
    pub fn prob(&self, s: &Sentence) -> Result<Option<Rat>, String> {
        Ok(self.space.completion().measure(&self.event_of(s)?))
    }

    /// Conditional probability of φ given the conjunction of `cond`,
    /// over the completion; `None` when either event is unmeasurable or
    /// the condition has mass zero.
    pub fn conditional_prob(&self, cond: &[Sentence], phi: &Sentence) -> Result<Option<Rat>, String> {
        let mut cond_event = Event::full(self.structures.len());
        for s in cond {
            cond_event = cond_event.intersect(&self.event_of(s)?);
        }
        let completion = self.space.completion();
        let Some(den) = completion.measure(&cond_event) else {
            return Ok(None);
        };
        if den.is_zero() {
            return Ok(None);
        }
        let Some(num) = completion.measure(&cond_event.intersect(&self.event_of(phi)?)) else {
            return Ok(None);
        };
        Ok(Some(&num / &den))
    }

    /// Image model under a signature permutation: outcomes mapped
    /// pointwise, the measure untouched.
    pub fn pi_image(&self, pi: &SignaturePermutation) -> FinModel {
        let structures = self.structures.iter().map(|st| st.pi_image(pi)).collect();
        FinModel { structures, space: self.space.clone() }
    }

    /// Model isomorphism (sufficient finite condition): a mass-preserving
    /// bijection between positive-mass outcomes matching isomorphic
    /// structures. Zero-mass outcomes are ignored.
    ///
    /// Only full-power-set models are supported here.
    pub fn iso(&self, other: &FinModel) -> bool {
        assert!(
            self.space.is_full() && other.space.is_full(),
            "model isomorphism requires full power-set models"
        );
        let positives = |m: &FinModel| -> Vec<(usize, Rat)> {
            (0..m.outcome_count())
                .filter_map(|i| {
                    let mass = m.mass(i).expect("full space");
                    (!mass.is_zero()).then_some((i, mass))
                })
                .collect()
        };
        let mine = positives(self);
        let mut theirs = positives(other);
        if mine.len() != theirs.len() {
            return false;
        }
        // equal mass + isomorphic structure is an equivalence relation, so
        // greedy matching is exact
        for (i, mass) in mine {
            let Some(at) = theirs.iter().position(|(j, other_mass)| {
                *other_mass == mass && self.structures[i].iso(&other.structures[*j]).is_some()
            }) else {
                return false;
            };
            theirs.swap_remove(at);
        }
        true
    }
}
