//! Exact-arithmetic workbench for probability treated as a logic.
//!
//! The crate answers questions of the form "given these axioms and these
//! partially specified probabilities, what values are forced?". Everything
//! is computed over exact rationals: truth-table events for propositional
//! formulas, finite measure structures, a small exact-pivoting linear
//! programming core, rule checking and closure for partial probability
//! assignments, bounded symmetry (indifference) arguments over first-order
//! signatures, and an exact-plus-Monte-Carlo treatment of the classic
//! chord-length paradox.
//!
//! Modules are layered bottom-up:
//!
//! * [`rat`] — canonical arbitrary-precision rationals.
//! * [`event`] — dense bit-sets over a finite outcome space.
//! * [`formula`] / [`fol`] — propositional and first-order syntax, with
//!   the text grammar in [`parse`].
//! * [`semantics`] — truth-table models, formula events, entailment.
//! * [`ratlp`] — exact simplex: feasibility, optimization, ratio bounds.
//! * [`measure`] — finite probability spaces, generated algebras, Dynkin
//!   systems, completions, and single-set extensions.
//! * [`inductive`] — partial probability assignments: rule checks,
//!   closure, consistency, and derivation of forced values or intervals.
//! * [`fostruct`] — finite first-order structures and measures on them.
//! * [`indifference`] — symmetry arguments: when axioms force a value.
//! * [`bertrand`] — the chord-length paradox, exact and sampled.

pub mod bertrand;
pub mod event;
pub mod fol;
pub mod formula;
pub mod fostruct;
pub mod indifference;
pub mod inductive;
pub mod measure;
pub mod parse;
pub mod rat;
pub mod ratlp;
pub mod semantics;

pub use event::Event;
pub use fol::{FinSignature, Sentence, SignaturePermutation, SymKind, Term};
pub use formula::{Formula, PropVar, PvDecls};
pub use rat::Rat;
pub use semantics::AtomSpace;
