//! Truth-table semantics for the propositional language.
//!
//! A strict model assigns a truth value to every declared variable. The
//! outcome space over n variables has 2^n strict models, indexed so that
//! variable k is true at outcome i exactly when the k-th binary digit of i
//! is 1. Events are bit-vectors over that space, and all semantic notions
//! (tautology, equivalence, entailment) reduce to bit-vector comparisons.
//! Entailment is decided exhaustively — never by proof search — which is
//! exact and fast up to the variable cap.

use crate::event::Event;
use crate::formula::{Formula, PropVar, PvDecls};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Default ceiling on the number of variables in one outcome space
/// (2^24 outcomes ≈ 2 MiB per event).
pub const DEFAULT_MAX_VARS: usize = 24;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("{count} variables exceed the outcome-space cap of {cap}")]
    TooManyVars { count: usize, cap: usize },
    #[error("undeclared variable {0}")]
    Undeclared(String),
}

/// A total assignment of truth values to some set of variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrictModel {
    map: BTreeMap<PropVar, bool>,
}

impl StrictModel {
    pub fn new<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (PropVar, bool)>,
    {
        StrictModel { map: pairs.into_iter().collect() }
    }

    /// The model at index `i` of the outcome space over `decls`:
    /// variable k is true iff the k-th binary digit of `i` is 1.
    pub fn from_index(decls: &PvDecls, i: usize) -> Self {
        StrictModel {
            map: decls
                .iter()
                .enumerate()
                .map(|(k, v)| (v.clone(), (i >> k) & 1 == 1))
                .collect(),
        }
    }

    pub fn get(&self, v: &PropVar) -> Option<bool> {
        self.map.get(v).copied()
    }

    pub fn vars(&self) -> impl Iterator<Item = &PropVar> {
        self.map.keys()
    }

    /// Evaluates a formula under this assignment. Sugar connectives are
    /// evaluated directly; the result agrees with evaluating the
    /// desugared formula.
    pub fn eval(&self, f: &Formula) -> Result<bool, SemanticsError> {
        Ok(match f {
            Formula::Var(v) => self
                .get(v)
                .ok_or_else(|| SemanticsError::Undeclared(v.as_str().to_owned()))?,
            Formula::Not(a) => !self.eval(a)?,
            Formula::AndAll(fs) => {
                let mut acc = true;
                for g in fs {
                    acc &= self.eval(g)?;
                }
                acc
            }
            Formula::OrAll(fs) => {
                let mut acc = false;
                for g in fs {
                    acc |= self.eval(g)?;
                }
                acc
            }
            Formula::Implies(a, b) => !self.eval(a)? | self.eval(b)?,
            Formula::Iff(a, b) => self.eval(a)? == self.eval(b)?,
            Formula::Top => true,
            Formula::Bottom => false,
        })
    }
}

/// The space of all strict models over a fixed variable list.
///
/// Outcomes are materialized lazily; events are built word-by-word from
/// the periodic bit pattern of each variable rather than by per-outcome
/// evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomSpace {
    decls: PvDecls,
}

impl AtomSpace {
    pub fn new(decls: PvDecls) -> Result<Self, SemanticsError> {
        Self::with_cap(decls, DEFAULT_MAX_VARS)
    }

    pub fn with_cap(decls: PvDecls, cap: usize) -> Result<Self, SemanticsError> {
        if decls.len() > cap {
            return Err(SemanticsError::TooManyVars { count: decls.len(), cap });
        }
        Ok(AtomSpace { decls })
    }

    pub fn decls(&self) -> &PvDecls {
        &self.decls
    }

    pub fn num_vars(&self) -> usize {
        self.decls.len()
    }

    /// Number of outcomes, 2^n.
    pub fn outcome_count(&self) -> usize {
        1usize << self.decls.len()
    }

    pub fn outcome(&self, i: usize) -> StrictModel {
        assert!(i < self.outcome_count(), "outcome index {i} out of range");
        StrictModel::from_index(&self.decls, i)
    }

    pub fn outcomes(&self) -> impl Iterator<Item = StrictModel> + '_ {
        (0..self.outcome_count()).map(move |i| self.outcome(i))
    }

    /// The event of the k-th variable. Within a 64-outcome word the
    /// pattern of bit k < 6 is periodic; for k ≥ 6 whole words are all
    /// ones or all zeros depending on bit k−6 of the word index.
    pub fn var_event(&self, k: usize) -> Event {
        const PAT: [u64; 6] = [
            0xAAAA_AAAA_AAAA_AAAA,
            0xCCCC_CCCC_CCCC_CCCC,
            0xF0F0_F0F0_F0F0_F0F0,
            0xFF00_FF00_FF00_FF00,
            0xFFFF_0000_FFFF_0000,
            0xFFFF_FFFF_0000_0000,
        ];
        assert!(k < self.decls.len(), "variable index {k} out of range");
        let len = self.outcome_count();
        let nwords = len.div_ceil(64);
        let words = (0..nwords)
            .map(|w| if k < 6 { PAT[k] } else if (w >> (k - 6)) & 1 == 1 { !0 } else { 0 })
            .collect();
        Event::from_words(len, words)
    }

    /// The set of outcomes satisfying `f`, computed structurally:
    /// complement for negation, intersection for conjunction, and the
    /// matching operations for the sugar connectives.
    pub fn event_of(&self, f: &Formula) -> Result<Event, SemanticsError> {
        Ok(match f {
            Formula::Var(v) => {
                let k = self
                    .decls
                    .index_of(v)
                    .ok_or_else(|| SemanticsError::Undeclared(v.as_str().to_owned()))?;
                self.var_event(k)
            }
            Formula::Not(a) => self.event_of(a)?.complement(),
            Formula::AndAll(fs) => {
                let mut acc = Event::full(self.outcome_count());
                for g in fs {
                    acc = acc.intersect(&self.event_of(g)?);
                }
                acc
            }
            Formula::OrAll(fs) => {
                let mut acc = Event::empty(self.outcome_count());
                for g in fs {
                    acc = acc.union(&self.event_of(g)?);
                }
                acc
            }
            Formula::Implies(a, b) => {
                self.event_of(a)?.complement().union(&self.event_of(b)?)
            }
            Formula::Iff(a, b) => {
                self.event_of(a)?.sym_diff(&self.event_of(b)?).complement()
            }
            Formula::Top => Event::full(self.outcome_count()),
            Formula::Bottom => Event::empty(self.outcome_count()),
        })
    }

    /// Event of the conjunction of `fs` (the full space when empty).
    pub fn event_of_all(&self, fs: &[Formula]) -> Result<Event, SemanticsError> {
        let mut acc = Event::full(self.outcome_count());
        for f in fs {
            acc = acc.intersect(&self.event_of(f)?);
        }
        Ok(acc)
    }
}

/// The outcome space over exactly the variables mentioned in `fs`,
/// or `None` when no variable occurs.
fn mentioned_space(fs: &[&Formula]) -> Result<Option<AtomSpace>, SemanticsError> {
    let mut vars: BTreeSet<PropVar> = BTreeSet::new();
    for f in fs {
        f.collect_vars(&mut vars);
    }
    if vars.is_empty() {
        return Ok(None);
    }
    let decls = PvDecls::new(vars.into_iter().map(|v| v.as_str().to_owned()))
        .expect("nonempty, deduplicated");
    AtomSpace::new(decls).map(Some)
}

/// Logical equivalence, decided over the union of mentioned variables.
pub fn equivalent(f: &Formula, g: &Formula) -> Result<bool, SemanticsError> {
    match mentioned_space(&[f, g])? {
        Some(space) => Ok(space.event_of(f)? == space.event_of(g)?),
        None => {
            let empty = StrictModel::new([]);
            Ok(empty.eval(f)? == empty.eval(g)?)
        }
    }
}

/// Deductive derivability X ⊢ φ, decided semantically: every strict model
/// of all of `xs` satisfies `f`. Evaluates over the union of variables
/// mentioned in `xs` and `f` only, which is sound because adding unused
/// variables splits each outcome without changing satisfaction.
pub fn entails(xs: &[Formula], f: &Formula) -> Result<bool, SemanticsError> {
    let mut refs: Vec<&Formula> = xs.iter().collect();
    refs.push(f);
    match mentioned_space(&refs)? {
        Some(space) => Ok(space.event_of_all(xs)?.is_subset(&space.event_of(f)?)),
        None => {
            let empty = StrictModel::new([]);
            let mut premises = true;
            for x in xs {
                premises &= empty.eval(x)?;
            }
            Ok(!premises | empty.eval(f)?)
        }
    }
}

/// ⊢ φ, i.e. entailment from no premises.
pub fn tautology(f: &Formula) -> Result<bool, SemanticsError> {
    entails(&[], f)
}
