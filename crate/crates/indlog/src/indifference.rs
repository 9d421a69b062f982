//! Indifference engine over finite first-order structures.
//!
//! Given a root theory, the engine enumerates signature permutations,
//! decides which of them leave the root semantically unchanged up to a
//! domain-size bound, and turns each such symmetry into a linear orbit
//! constraint: the probability of a sentence equals the probability of its
//! permuted image. Together with additivity over the bounded model classes
//! this either pins a queried conditional probability to a unique value
//! (with a replayable certificate) or exhibits two admissible models that
//! disagree on the query.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::event::Event;
use crate::fol::{FinSignature, Sentence, SignaturePermutation, SymKind, Term};
use crate::fostruct::{FinModel, FinStructure, MAX_DOMAIN};
use crate::inductive::{admissible_point, indicator};
use crate::rat::Rat;
use crate::ratlp::{ratio_bounds, AffineFn, LinearConstraint, LinearSystem};

/// Default domain-size horizon for semantic checks. Complete for
/// signatures of constants and unary relations; a caveat is attached to
/// outcomes whenever richer symbols are present.
pub const DEFAULT_DOMAIN_BOUND: usize = 4;

/// Cap on the number of signature permutations (10!).
pub const DEFAULT_PERM_CAP: u128 = 3_628_800;

/// Cap on the number of structures enumerated for one problem.
const STRUCTURE_CAP: u128 = 5_000_000;

/// A conditional-probability query: the probability of `sentence` given
/// the root theory plus `extras`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoIQuery {
    extras: Vec<Sentence>,
    sentence: Sentence,
}

impl PoIQuery {
    pub fn extras(&self) -> &[Sentence] {
        &self.extras
    }

    pub fn sentence(&self) -> &Sentence {
        &self.sentence
    }
}

impl fmt::Display for PoIQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P({} | {})", self.sentence, fmt_ante(&self.extras))
    }
}

fn fmt_ante(extras: &[Sentence]) -> String {
    let mut s = String::from("T0");
    for e in extras {
        let _ = write!(s, ", {e}");
    }
    s
}

/// A symmetry-analysis problem: a root theory, optional assumed
/// conditional probabilities and independence facts, and the queries to
/// settle.
#[derive(Debug, Clone)]
pub struct PoIProblem {
    sig: FinSignature,
    axioms: Vec<Sentence>,
    assumed: Vec<(Vec<Sentence>, Sentence, Rat)>,
    independence: Vec<(Sentence, Sentence)>,
    queries: Vec<PoIQuery>,
    domain_bound: usize,
}

impl PoIProblem {
    pub fn new(
        sig: FinSignature,
        axioms: Vec<Sentence>,
        domain_bound: usize,
    ) -> Result<Self, String> {
        if domain_bound == 0 || domain_bound > MAX_DOMAIN {
            return Err(format!("domain bound must be in 1..={MAX_DOMAIN}"));
        }
        for a in &axioms {
            check_closed(&sig, a)?;
        }
        Ok(PoIProblem {
            sig,
            axioms,
            assumed: Vec::new(),
            independence: Vec::new(),
            queries: Vec::new(),
            domain_bound,
        })
    }

    /// Assume P(target | T0, extras) = p.
    pub fn assume(
        &mut self,
        extras: Vec<Sentence>,
        target: Sentence,
        p: Rat,
    ) -> Result<(), String> {
        if !p.in_unit() {
            return Err(format!("assumed probability {p} is outside [0, 1]"));
        }
        for s in extras.iter().chain([&target]) {
            check_closed(&self.sig, s)?;
        }
        self.assumed.push((extras, target, p));
        Ok(())
    }

    /// Assume the two sentences are independent given the root theory.
    pub fn assume_independent(&mut self, a: Sentence, b: Sentence) -> Result<(), String> {
        check_closed(&self.sig, &a)?;
        check_closed(&self.sig, &b)?;
        self.independence.push((a, b));
        Ok(())
    }

    /// Query P(sentence | T0).
    pub fn query(&mut self, sentence: Sentence) -> Result<(), String> {
        self.query_given(Vec::new(), sentence)
    }

    /// Query P(sentence | T0, extras).
    pub fn query_given(&mut self, extras: Vec<Sentence>, sentence: Sentence) -> Result<(), String> {
        for s in extras.iter().chain([&sentence]) {
            check_closed(&self.sig, s)?;
        }
        self.queries.push(PoIQuery { extras, sentence });
        Ok(())
    }

    pub fn signature(&self) -> &FinSignature {
        &self.sig
    }

    pub fn axioms(&self) -> &[Sentence] {
        &self.axioms
    }

    pub fn assumed(&self) -> &[(Vec<Sentence>, Sentence, Rat)] {
        &self.assumed
    }

    pub fn independence(&self) -> &[(Sentence, Sentence)] {
        &self.independence
    }

    pub fn queries(&self) -> &[PoIQuery] {
        &self.queries
    }

    pub fn domain_bound(&self) -> usize {
        self.domain_bound
    }

    /// The completeness caveat, when one applies: with relation symbols of
    /// arity ≥ 2 or function symbols, bounded semantic checks are sound
    /// but not known to be complete.
    pub fn bounded_caveat(&self) -> Option<String> {
        let monadic = self.sig.symbols().all(|d| match d.kind {
            SymKind::Constant => true,
            SymKind::Relation => d.arity <= 1,
            SymKind::Function => false,
        });
        (!monadic).then(|| {
            format!(
                "bounded-check: the signature has non-monadic symbols, so invariance and \
                 entailment are verified only over domains of size <= {}",
                self.domain_bound
            )
        })
    }
}

fn check_closed(sig: &FinSignature, s: &Sentence) -> Result<(), String> {
    s.validate(sig)?;
    if !s.is_closed() {
        return Err(format!("{s} has free variables"));
    }
    Ok(())
}

/// Outcome of verifying a concrete model against a problem's symmetry and
/// independence requirements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoIReport {
    /// Failed equalities and independence facts, human-readable.
    pub violations: Vec<String>,
    /// Whether the model is isomorphic to its image under every
    /// permutation — a sufficient condition for passing.
    pub iso_symmetric: bool,
    /// Number of equality checks that were actually comparable.
    pub comparisons: usize,
}

impl PoIReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verdict for one query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PoIVerdict {
    /// The constraints pin the query to a single value; the certificate
    /// lists the assumptions, orbit equalities, and additivity fact that
    /// already force it.
    Forced { value: Rat, certificate: Vec<String> },
    /// The query is undetermined: two admissible models realize different
    /// values.
    NotForced {
        lower: Rat,
        upper: Rat,
        lower_witness: FinModel,
        upper_witness: FinModel,
    },
    /// No admissible model gives the query a value.
    Inconsistent,
}

impl PoIVerdict {
    pub fn forced_value(&self) -> Option<&Rat> {
        match self {
            PoIVerdict::Forced { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Verdicts for every query of a problem, in query order.
#[derive(Debug, Clone)]
pub struct PoIOutcome {
    pub verdicts: Vec<PoIVerdict>,
    /// Present when bounded checks are not known complete for the
    /// signature.
    pub caveat: Option<String>,
}

// ---------------------------------------------------------------------------
// permutations

fn factorial(k: usize) -> u128 {
    (1..=k as u128).fold(1u128, |a, b| a.saturating_mul(b))
}

/// All kind- and arity-preserving bijections of the signature, identity
/// first, in a deterministic order. Errors out above `cap` permutations.
pub fn enumerate_permutations_capped(
    sig: &FinSignature,
    cap: u128,
) -> Result<Vec<SignaturePermutation>, String> {
    let classes = sig.classes();
    let total: u128 = classes
        .iter()
        .fold(1u128, |acc, c| acc.saturating_mul(factorial(c.len())));
    if total > cap {
        return Err(format!(
            "the signature admits {total} permutations, above the cap of {cap}"
        ));
    }
    let mut maps: Vec<BTreeMap<String, String>> = vec![BTreeMap::new()];
    for class in &classes {
        let perms = permutations(class.len());
        let mut next = Vec::with_capacity(maps.len() * perms.len());
        for map in &maps {
            for p in &perms {
                let mut m = map.clone();
                for (i, &j) in p.iter().enumerate() {
                    m.insert(class[i].name.clone(), class[j].name.clone());
                }
                next.push(m);
            }
        }
        maps = next;
    }
    maps.into_iter()
        .map(|m| SignaturePermutation::new(sig, m))
        .collect()
}

/// [`enumerate_permutations_capped`] with the default cap.
pub fn enumerate_permutations(sig: &FinSignature) -> Result<Vec<SignaturePermutation>, String> {
    enumerate_permutations_capped(sig, DEFAULT_PERM_CAP)
}

/// Permutations of 0..k in lexicographic order (identity first).
fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(k, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(k, &mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

// ---------------------------------------------------------------------------
// structure enumeration

fn tuple_lists(n: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |v| {
                    let mut t2 = t.clone();
                    t2.push(v);
                    t2
                })
            })
            .collect();
    }
    out
}

fn count_structures(sig: &FinSignature, n: usize) -> u128 {
    let mut total: u128 = 1;
    for d in sig.symbols() {
        let cells = (n as u128).saturating_pow(d.arity.max(1) as u32);
        let factor = match d.kind {
            SymKind::Constant => n as u128,
            SymKind::Relation => {
                if cells >= 64 {
                    return u128::MAX;
                }
                1u128 << cells
            }
            SymKind::Function => {
                if cells >= 32 {
                    return u128::MAX;
                }
                (n as u128).saturating_pow(cells as u32)
            }
        };
        total = total.saturating_mul(factor);
    }
    total
}

fn structures_sized(sig: &FinSignature, n: usize) -> Result<Vec<FinStructure>, String> {
    let mut out = vec![FinStructure::new(sig.clone(), n)?];
    for d in sig.symbols() {
        let mut next = Vec::new();
        match d.kind {
            SymKind::Constant => {
                for st in &out {
                    for v in 0..n {
                        let mut s = st.clone();
                        s.set_constant(&d.name, v)?;
                        next.push(s);
                    }
                }
            }
            SymKind::Relation => {
                let cells = tuple_lists(n, d.arity);
                for st in &out {
                    for mask in 0u64..(1u64 << cells.len()) {
                        let chosen: Vec<Vec<usize>> = cells
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask >> i & 1 == 1)
                            .map(|(_, t)| t.clone())
                            .collect();
                        let mut s = st.clone();
                        s.set_relation(&d.name, chosen)?;
                        next.push(s);
                    }
                }
            }
            SymKind::Function => {
                let cells = n.pow(d.arity as u32);
                for st in &out {
                    let mut table = vec![0usize; cells];
                    loop {
                        let mut s = st.clone();
                        s.set_function(&d.name, table.clone())?;
                        next.push(s);
                        let mut i = 0;
                        while i < cells {
                            table[i] += 1;
                            if table[i] < n {
                                break;
                            }
                            table[i] = 0;
                            i += 1;
                        }
                        if i == cells {
                            break;
                        }
                    }
                }
            }
        }
        out = next;
    }
    Ok(out)
}

/// Every structure over the signature with domain size 1..=bound, in a
/// deterministic order.
fn all_structures(sig: &FinSignature, bound: usize) -> Result<Vec<FinStructure>, String> {
    if bound == 0 || bound > MAX_DOMAIN {
        return Err(format!("domain bound must be in 1..={MAX_DOMAIN}"));
    }
    let total = (1..=bound).fold(0u128, |acc, n| acc.saturating_add(count_structures(sig, n)));
    if total > STRUCTURE_CAP {
        return Err(format!(
            "enumerating domains up to size {bound} over this signature needs {total} \
             structures, above the cap of {STRUCTURE_CAP}; lower the domain bound"
        ));
    }
    let mut out = Vec::new();
    for n in 1..=bound {
        out.extend(structures_sized(sig, n)?);
    }
    Ok(out)
}

fn sat_all(st: &FinStructure, sentences: &[Sentence]) -> Result<bool, String> {
    for s in sentences {
        if !st.eval(s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Bounded entailment: every structure of domain size ≤ bound satisfying
/// all premises satisfies the goal.
pub fn bounded_entails(
    sig: &FinSignature,
    premises: &[Sentence],
    goal: &Sentence,
    bound: usize,
) -> Result<bool, String> {
    let structs = all_structures(sig, bound)?;
    bounded_entails_over(&structs, premises, goal)
}

fn bounded_entails_over(
    structs: &[FinStructure],
    premises: &[Sentence],
    goal: &Sentence,
) -> Result<bool, String> {
    for st in structs {
        if sat_all(st, premises)? && !st.eval(goal)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether the axiom set is semantically unchanged by the permutation,
/// over all structures of domain size ≤ bound.
pub fn invariant(
    sig: &FinSignature,
    axioms: &[Sentence],
    pi: &SignaturePermutation,
    bound: usize,
) -> Result<bool, String> {
    let structs = all_structures(sig, bound)?;
    invariant_over(&structs, axioms, pi)
}

fn invariant_over(
    structs: &[FinStructure],
    axioms: &[Sentence],
    pi: &SignaturePermutation,
) -> Result<bool, String> {
    if pi.is_identity() {
        return Ok(true);
    }
    let permuted: Vec<Sentence> = axioms.iter().map(|a| a.permute(pi)).collect();
    for st in structs {
        if sat_all(st, axioms)? != sat_all(st, &permuted)? {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// isomorphism classes

/// Cheap isomorphism invariant used to bucket candidates before running
/// the full bijection search.
fn iso_key(st: &FinStructure) -> String {
    let mut key = format!("n{}", st.domain());
    let consts: Vec<&str> = st
        .signature()
        .symbols()
        .filter(|d| d.kind == SymKind::Constant)
        .map(|d| d.name.as_str())
        .collect();
    // constants: equality pattern by first occurrence
    let mut seen: Vec<usize> = Vec::new();
    for c in &consts {
        let v = st.constant(c);
        let id = seen.iter().position(|&u| u == v).unwrap_or_else(|| {
            seen.push(v);
            seen.len() - 1
        });
        let _ = write!(key, ",{id}");
    }
    for d in st.signature().symbols() {
        if d.kind != SymKind::Relation {
            continue;
        }
        let _ = write!(key, ";{}", st.relation_tuples(&d.name).len());
        // membership profile of constant points, invariant under renaming
        if d.arity <= 2 {
            for t in tuple_lists(consts.len(), d.arity) {
                let tuple: Vec<usize> = t.iter().map(|&i| st.constant(consts[i])).collect();
                let _ = write!(key, "{}", st.relation_holds(&d.name, &tuple) as u8);
            }
        }
    }
    key
}

/// One representative per isomorphism class, keeping first occurrences in
/// enumeration order.
fn dedup_iso(structs: &[FinStructure]) -> Vec<FinStructure> {
    let mut reps: Vec<FinStructure> = Vec::new();
    let mut buckets: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for st in structs {
        let ids = buckets.entry(iso_key(st)).or_default();
        if !ids.iter().any(|&i| reps[i].iso(st).is_some()) {
            reps.push(st.clone());
            ids.push(reps.len() - 1);
        }
    }
    reps
}

// ---------------------------------------------------------------------------
// the forcing engine

struct EqRow {
    row: LinearConstraint,
    note: String,
    pi: SignaturePermutation,
}

struct Engine<'a> {
    problem: &'a PoIProblem,
    /// Every bounded structure, for semantic re-verification.
    raw: Vec<FinStructure>,
    /// Isomorphism-class representatives of the bounded models of T0.
    universe: Vec<FinStructure>,
    base_rows: Vec<LinearConstraint>,
    base_strict: Vec<Event>,
    assumed_notes: Vec<String>,
    eqs: Vec<EqRow>,
}

/// `phi ∧ extras` as one sentence (just `phi` when there are no extras).
fn with_extras(phi: &Sentence, extras: &[Sentence]) -> Sentence {
    if extras.is_empty() {
        phi.clone()
    } else {
        let mut parts = vec![phi.clone()];
        parts.extend(extras.iter().cloned());
        Sentence::and(parts)
    }
}

fn ante_sentence(extras: &[Sentence]) -> Option<Sentence> {
    match extras.len() {
        0 => None,
        1 => Some(extras[0].clone()),
        _ => Some(Sentence::and(extras.to_vec())),
    }
}

impl<'a> Engine<'a> {
    fn build(problem: &'a PoIProblem) -> Result<Self, String> {
        let raw = all_structures(&problem.sig, problem.domain_bound)?;
        let perms = enumerate_permutations(&problem.sig)?;
        let flags: Vec<bool> = perms
            .par_iter()
            .map(|pi| invariant_over(&raw, &problem.axioms, pi))
            .collect::<Result<_, _>>()?;
        let symmetries: Vec<&SignaturePermutation> = perms
            .iter()
            .zip(&flags)
            .filter(|(pi, &ok)| ok && !pi.is_identity())
            .map(|(pi, _)| pi)
            .collect();

        let mut kept = Vec::new();
        for st in &raw {
            if sat_all(st, &problem.axioms)? {
                kept.push(st.clone());
            }
        }
        let universe = dedup_iso(&kept);
        let n = universe.len();

        let mut engine = Engine {
            problem,
            raw,
            universe,
            base_rows: Vec::new(),
            base_strict: Vec::new(),
            assumed_notes: Vec::new(),
            eqs: Vec::new(),
        };
        if n == 0 {
            return Ok(engine);
        }

        engine
            .base_rows
            .push(LinearConstraint::eq(vec![Rat::one(); n], Rat::one()));

        // sentences whose orbits feed the equality rows
        let mut theta: Vec<Sentence> = Vec::new();
        let push_theta = |theta: &mut Vec<Sentence>, s: Sentence| {
            if !theta.contains(&s) {
                theta.push(s);
            }
        };

        for (extras, target, p) in &problem.assumed {
            let (eff, mut notes, mut strict) = engine.apply_independence(extras, target)?;
            let den = match ante_sentence(&eff) {
                Some(psi) => {
                    push_theta(&mut theta, psi.clone());
                    engine.event_of(&psi)?
                }
                None => Event::full(n),
            };
            let num = engine.event_of(target)?.intersect(&den);
            push_theta(&mut theta, with_extras(target, &eff));
            let mut coeffs = indicator(n, &num);
            for i in den.iter() {
                coeffs[i] = &coeffs[i] - p;
            }
            engine.base_rows.push(LinearConstraint::eq(coeffs, Rat::zero()));
            if !eff.is_empty() {
                engine.base_strict.push(den);
            }
            engine.base_strict.append(&mut strict);
            engine.assumed_notes.append(&mut notes);
            engine
                .assumed_notes
                .push(format!("P({target} | {}) = {p}  [assumed]", fmt_ante(extras)));
        }

        for q in &problem.queries {
            let (eff, _, _) = engine.apply_independence(&q.extras, &q.sentence)?;
            if let Some(psi) = ante_sentence(&eff) {
                push_theta(&mut theta, psi);
            }
            push_theta(&mut theta, with_extras(&q.sentence, &eff));
        }

        let mut seen: BTreeSet<(Event, Event)> = BTreeSet::new();
        for pi in &symmetries {
            for th in &theta {
                let th_pi = th.permute(pi);
                if th_pi == *th {
                    continue;
                }
                let l = engine.event_of(th)?;
                let r = engine.event_of(&th_pi)?;
                if l == r {
                    continue;
                }
                let key = if l <= r {
                    (l.clone(), r.clone())
                } else {
                    (r.clone(), l.clone())
                };
                if !seen.insert(key) {
                    continue;
                }
                let mut coeffs = indicator(n, &l);
                for i in r.iter() {
                    coeffs[i] = &coeffs[i] - &Rat::one();
                }
                engine.eqs.push(EqRow {
                    row: LinearConstraint::eq(coeffs, Rat::zero()),
                    note: format!("P({th} | T0) = P({th_pi} | T0)  [root invariant under {pi}]"),
                    pi: (*pi).clone(),
                });
            }
        }
        Ok(engine)
    }

    fn event_of(&self, s: &Sentence) -> Result<Event, String> {
        let mut idx = Vec::new();
        for (i, st) in self.universe.iter().enumerate() {
            if st.eval(s)? {
                idx.push(i);
            }
        }
        Ok(Event::from_indices(self.universe.len(), &idx))
    }

    fn affine(&self, e: &Event) -> AffineFn {
        AffineFn::new(indicator(self.universe.len(), e), Rat::zero())
    }

    /// Rewrites a conditional statement using the declared independence
    /// facts: a lone antecedent that is independent of the target drops
    /// out of the condition, leaving a strict-positivity requirement.
    fn apply_independence(
        &self,
        extras: &[Sentence],
        target: &Sentence,
    ) -> Result<(Vec<Sentence>, Vec<String>, Vec<Event>), String> {
        if extras.len() != 1 {
            return Ok((extras.to_vec(), Vec::new(), Vec::new()));
        }
        let psi = &extras[0];
        let declared = self
            .problem
            .independence
            .iter()
            .any(|(a, b)| (a == target && b == psi) || (a == psi && b == target));
        if !declared {
            return Ok((extras.to_vec(), Vec::new(), Vec::new()));
        }
        let note = format!("P({target} | T0, {psi}) = P({target} | T0)  [assumed independent]");
        let strict = if self.universe.is_empty() {
            Vec::new()
        } else {
            vec![self.event_of(psi)?]
        };
        Ok((Vec::new(), vec![note], strict))
    }

    fn system_of(&self, eq_idx: &[usize]) -> LinearSystem {
        let mut sys = LinearSystem::new(self.universe.len());
        for row in &self.base_rows {
            sys.push(row.clone());
        }
        for &i in eq_idx {
            sys.push(self.eqs[i].row.clone());
        }
        sys
    }

    fn additivity_note(&self) -> String {
        format!(
            "the {} admissible structure classes (domain <= {}) carry total mass 1  [additivity]",
            self.universe.len(),
            self.problem.domain_bound
        )
    }

    fn solve_query(&self, q: &PoIQuery) -> Result<PoIVerdict, String> {
        let n = self.universe.len();
        if n == 0 {
            return Ok(PoIVerdict::Inconsistent);
        }
        let (eff, rewrite_notes, mut strict) = self.apply_independence(&q.extras, &q.sentence)?;
        let den_event = match ante_sentence(&eff) {
            Some(psi) => self.event_of(&psi)?,
            None => Event::full(n),
        };
        let num_event = self.event_of(&q.sentence)?.intersect(&den_event);
        strict.extend(self.base_strict.iter().cloned());
        let strict_affines: Vec<AffineFn> = strict.iter().map(|e| self.affine(e)).collect();
        let num = self.affine(&num_event);
        let den = self.affine(&den_event);

        let all_idx: Vec<usize> = (0..self.eqs.len()).collect();
        let sys = self.system_of(&all_idx);
        let Some(rb) = ratio_bounds(&sys, &strict_affines, &num, &den).map_err(|e| e.to_string())?
        else {
            return Ok(PoIVerdict::Inconsistent);
        };

        if rb.lower == rb.upper {
            let value = rb.lower;
            // greedy pruning: drop every orbit row the forcing survives without
            let mut kept = all_idx;
            for i in 0..self.eqs.len() {
                let trial: Vec<usize> = kept.iter().copied().filter(|&j| j != i).collect();
                if trial.len() == kept.len() {
                    continue;
                }
                let sys_t = self.system_of(&trial);
                if let Some(b) =
                    ratio_bounds(&sys_t, &strict_affines, &num, &den).map_err(|e| e.to_string())?
                {
                    if b.lower == b.upper && b.lower == value {
                        kept = trial;
                    }
                }
            }
            // replay the pruned certificate and re-verify its symmetries
            let sys_f = self.system_of(&kept);
            let replay =
                ratio_bounds(&sys_f, &strict_affines, &num, &den).map_err(|e| e.to_string())?;
            let replay_ok =
                matches!(replay, Some(ref b) if b.lower == b.upper && b.lower == value);
            if !replay_ok {
                return Err("internal error: a forced-value certificate failed to replay".into());
            }
            let mut verified: BTreeSet<String> = BTreeSet::new();
            for &i in &kept {
                let pi = &self.eqs[i].pi;
                if verified.insert(pi.to_string())
                    && !invariant_over(&self.raw, &self.problem.axioms, pi)?
                {
                    return Err(
                        "internal error: a certificate symmetry failed re-verification".into(),
                    );
                }
            }
            let mut certificate = rewrite_notes;
            certificate.extend(self.assumed_notes.iter().cloned());
            certificate.extend(kept.iter().map(|&i| self.eqs[i].note.clone()));
            certificate.push(self.additivity_note());
            return Ok(PoIVerdict::Forced { value, certificate });
        }

        let span = &rb.upper - &rb.lower;
        let quarter = &span / &Rat::int(4);
        let lower_masses = self.side_masses(
            rb.lower_witness.filter(|_| rb.lower_attained),
            &rb.lower + &quarter,
            &sys,
            &strict,
            &num_event,
            &den_event,
        )?;
        let upper_masses = self.side_masses(
            rb.upper_witness.filter(|_| rb.upper_attained),
            &rb.upper - &quarter,
            &sys,
            &strict,
            &num_event,
            &den_event,
        )?;
        let to_model = |masses: Vec<Rat>| -> Result<FinModel, String> {
            FinModel::new(self.universe.iter().cloned().zip(masses).collect())
        };
        Ok(PoIVerdict::NotForced {
            lower: rb.lower,
            upper: rb.upper,
            lower_witness: to_model(lower_masses)?,
            upper_witness: to_model(upper_masses)?,
        })
    }

    /// Masses realizing one side of an open interval: the solver's witness
    /// when the bound is attained, otherwise an admissible point pinned to
    /// an interior value.
    fn side_masses(
        &self,
        attained: Option<Vec<Rat>>,
        interior: Rat,
        sys: &LinearSystem,
        strict: &[Event],
        num_event: &Event,
        den_event: &Event,
    ) -> Result<Vec<Rat>, String> {
        if let Some(masses) = attained {
            return Ok(masses);
        }
        let n = self.universe.len();
        let mut pinned = sys.clone();
        let mut coeffs = indicator(n, num_event);
        for i in den_event.iter() {
            coeffs[i] = &coeffs[i] - &interior;
        }
        pinned.push(LinearConstraint::eq(coeffs, Rat::zero()));
        let mut conds = strict.to_vec();
        conds.push(den_event.clone());
        admissible_point(&pinned, &conds, n)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| "internal error: interior witness construction failed".into())
    }

    fn admissible_model(&self) -> Result<Option<FinModel>, String> {
        let n = self.universe.len();
        if n == 0 {
            return Ok(None);
        }
        let all_idx: Vec<usize> = (0..self.eqs.len()).collect();
        let sys = self.system_of(&all_idx);
        let Some(masses) =
            admissible_point(&sys, &self.base_strict, n).map_err(|e| e.to_string())?
        else {
            return Ok(None);
        };
        Ok(Some(FinModel::new(
            self.universe.iter().cloned().zip(masses).collect(),
        )?))
    }
}

/// Settles every query of the problem: forced value with certificate,
/// undetermined with a disagreeing witness pair, or inconsistent.
///
/// Witness pairs are guaranteed to satisfy assumed conditional
/// probabilities; declared independence facts are used to simplify
/// conditions but are not themselves imposed on witnesses (they are
/// nonlinear), so a problem that is undetermined *because* of an
/// independence assumption may produce witnesses violating it.
pub fn poi_forced(problem: &PoIProblem) -> Result<PoIOutcome, String> {
    let engine = Engine::build(problem)?;
    let verdicts = problem
        .queries
        .par_iter()
        .map(|q| engine.solve_query(q))
        .collect::<Result<Vec<_>, String>>()?;
    Ok(PoIOutcome {
        verdicts,
        caveat: problem.bounded_caveat(),
    })
}

/// A model of the axioms satisfying the assumed statements and the orbit
/// equalities of every bounded symmetry, or `None` when there is none.
pub fn poi_admissible_model(problem: &PoIProblem) -> Result<Option<FinModel>, String> {
    Engine::build(problem)?.admissible_model()
}

/// Checks a concrete model against the problem: every permuted instance
/// of an assumed or queried conditional probability must agree with the
/// original whenever both sides are defined and the permuted antecedent
/// still entails the root theory; declared independence facts must hold.
/// Also reports whether the model is isomorphic to all of its permuted
/// images, which is sufficient for the equalities to hold.
pub fn poi_verify(
    problem: &PoIProblem,
    model: &FinModel,
    perms: &[SignaturePermutation],
) -> Result<PoIReport, String> {
    if let Some(st) = model.structures().first() {
        if st.signature() != &problem.sig {
            return Err("the model's signature differs from the problem's".into());
        }
    }
    let raw = all_structures(&problem.sig, problem.domain_bound)?;
    let statements: Vec<(&[Sentence], &Sentence)> = problem
        .assumed
        .iter()
        .map(|(extras, target, _)| (extras.as_slice(), target))
        .chain(
            problem
                .queries
                .iter()
                .map(|q| (q.extras.as_slice(), &q.sentence)),
        )
        .collect();

    let mut violations = Vec::new();
    let mut comparisons = 0usize;
    for pi in perms {
        if pi.is_identity() {
            continue;
        }
        for (extras, phi) in &statements {
            let mut cond: Vec<Sentence> = problem.axioms.clone();
            cond.extend(extras.iter().cloned());
            let Some(lhs) = model.conditional_prob(&cond, phi)? else {
                continue;
            };
            let cond_pi: Vec<Sentence> = cond.iter().map(|s| s.permute(pi)).collect();
            // the permuted antecedent must still count as one: it has to
            // entail the root theory at the bounded scale
            let mut ante = true;
            for z in &problem.axioms {
                if !bounded_entails_over(&raw, &cond_pi, z)? {
                    ante = false;
                    break;
                }
            }
            if !ante {
                continue;
            }
            let phi_pi = phi.permute(pi);
            let Some(rhs) = model.conditional_prob(&cond_pi, &phi_pi)? else {
                continue;
            };
            comparisons += 1;
            if lhs != rhs {
                violations.push(format!(
                    "P({phi} | {}) = {lhs}, but P({phi_pi} | permuted antecedent) = {rhs} \
                     under {pi}",
                    fmt_ante(extras)
                ));
            }
        }
    }

    for (a, b) in &problem.independence {
        let pa = model.conditional_prob(&problem.axioms, a)?;
        let pb = model.conditional_prob(&problem.axioms, b)?;
        let pab = model.conditional_prob(&problem.axioms, &Sentence::and(vec![a.clone(), b.clone()]))?;
        match (pa, pb, pab) {
            (Some(pa), Some(pb), Some(pab)) => {
                if pab != &pa * &pb {
                    violations.push(format!(
                        "{a} and {b} are declared independent, but P(both) = {pab} while \
                         P({a})*P({b}) = {}",
                        &pa * &pb
                    ));
                }
            }
            _ => violations.push(format!(
                "{a} and {b} are declared independent, but the model does not define \
                 their probabilities"
            )),
        }
    }

    let iso_symmetric = model.space().is_full()
        && perms
            .par_iter()
            .all(|pi| pi.is_identity() || model.iso(&model.pi_image(pi)));
    Ok(PoIReport {
        violations,
        iso_symmetric,
        comparisons,
    })
}

// ---------------------------------------------------------------------------
// canned examples

/// Expected outcome of a canned example, per query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpectedPoI {
    Forced(Rat),
    NotForced,
    Inconsistent,
}

/// A named, ready-to-run problem with its known verdicts.
#[derive(Debug, Clone)]
pub struct PoIExample {
    pub name: &'static str,
    pub summary: &'static str,
    pub problem: PoIProblem,
    pub expected: Vec<ExpectedPoI>,
}

const EXAMPLE_NAMES: [&str; 10] = [
    "either-true",
    "one-coin",
    "single-trial",
    "success-good",
    "goodness-independent",
    "lowered-root",
    "three-balls",
    "two-balls",
    "random-number",
    "random-number-defined",
];

/// Names accepted by [`poi_example`].
pub fn poi_example_names() -> &'static [&'static str] {
    &EXAMPLE_NAMES
}

fn cst(name: &str) -> Term {
    Term::cst(name)
}

fn vx() -> Term {
    Term::var("x")
}

/// ∀x((r0 x ∨ r1 x) ∧ ¬(r0 x ∧ r1 x))
fn partition_axiom(r0: &str, r1: &str) -> Sentence {
    Sentence::forall(
        "x",
        Sentence::and(vec![
            Sentence::or(vec![
                Sentence::rel(r0, vec![vx()]),
                Sentence::rel(r1, vec![vx()]),
            ]),
            Sentence::not(Sentence::and(vec![
                Sentence::rel(r0, vec![vx()]),
                Sentence::rel(r1, vec![vx()]),
            ])),
        ]),
    )
}

/// ∀x(r0 x → r1 x)
fn subset_axiom(r0: &str, r1: &str) -> Sentence {
    Sentence::forall(
        "x",
        Sentence::implies(Sentence::rel(r0, vec![vx()]), Sentence::rel(r1, vec![vx()])),
    )
}

fn trial_signature(with_good: bool) -> FinSignature {
    let mut sig = FinSignature::new();
    sig.constant("t").unwrap();
    sig.relation("S", 1).unwrap();
    sig.relation("F", 1).unwrap();
    if with_good {
        sig.relation("G", 1).unwrap();
    }
    sig
}

fn balls_signature(k: usize) -> FinSignature {
    let mut sig = FinSignature::new();
    for i in 1..=k {
        sig.constant(&format!("b{i}")).unwrap();
    }
    sig.relation("C0", 1).unwrap();
    sig.relation("C1", 1).unwrap();
    sig
}

/// C_{d_1(n)} b1 ∧ … ∧ C_{d_k(n)} bk, digits read from the right.
fn coloring_sentence(k: usize, n: usize) -> Sentence {
    Sentence::and(
        (1..=k)
            .map(|i| {
                let digit = n >> (i - 1) & 1;
                Sentence::rel(format!("C{digit}"), vec![cst(&format!("b{i}"))])
            })
            .collect(),
    )
}

fn number_signature(with_defined: bool) -> FinSignature {
    let mut sig = FinSignature::new();
    sig.constant("c").unwrap();
    if with_defined {
        sig.constant("d").unwrap();
    }
    sig.constant("n0").unwrap();
    sig.constant("n1").unwrap();
    sig.relation("lt", 2).unwrap();
    sig
}

fn number_axioms() -> Vec<Sentence> {
    vec![
        Sentence::neq(cst("n0"), cst("n1")),
        Sentence::rel("lt", vec![cst("n0"), cst("n1")]),
        Sentence::or(vec![
            Sentence::eq(cst("c"), cst("n0")),
            Sentence::eq(cst("c"), cst("n1")),
        ]),
    ]
}

/// Builds the named example.
pub fn poi_example(name: &str) -> Result<PoIExample, String> {
    let half = Rat::new(1, 2);
    let sixth = Rat::new(1, 6);
    match name {
        "either-true" => {
            let mut sig = FinSignature::new();
            sig.constant("b").unwrap();
            sig.relation("R", 1).unwrap();
            let mut problem = PoIProblem::new(sig, Vec::new(), DEFAULT_DOMAIN_BOUND)?;
            problem.query(Sentence::rel("R", vec![cst("b")]))?;
            Ok(PoIExample {
                name: "either-true",
                summary: "a lone predicate of a lone object: no symmetry, nothing forced",
                problem,
                expected: vec![ExpectedPoI::NotForced],
            })
        }
        "one-coin" => {
            let mut sig = FinSignature::new();
            sig.constant("c").unwrap();
            sig.constant("s0").unwrap();
            sig.constant("s1").unwrap();
            let axioms = vec![
                Sentence::neq(cst("s0"), cst("s1")),
                Sentence::or(vec![
                    Sentence::eq(cst("c"), cst("s0")),
                    Sentence::eq(cst("c"), cst("s1")),
                ]),
            ];
            let mut problem = PoIProblem::new(sig, axioms, DEFAULT_DOMAIN_BOUND)?;
            problem.query(Sentence::eq(cst("c"), cst("s1")))?;
            Ok(PoIExample {
                name: "one-coin",
                summary: "a flip lands on one of two interchangeable sides: forced 1/2",
                problem,
                expected: vec![ExpectedPoI::Forced(half)],
            })
        }
        "single-trial" => {
            let axioms = vec![partition_axiom("S", "F")];
            let mut problem = PoIProblem::new(trial_signature(false), axioms, DEFAULT_DOMAIN_BOUND)?;
            problem.query(Sentence::rel("S", vec![cst("t")]))?;
            Ok(PoIExample {
                name: "single-trial",
                summary: "success and failure as interchangeable predicates: forced 1/2",
                problem,
                expected: vec![ExpectedPoI::Forced(half)],
            })
        }
        "success-good" => {
            let axioms = vec![partition_axiom("S", "F"), subset_axiom("S", "G")];
            let mut problem = PoIProblem::new(trial_signature(true), axioms, DEFAULT_DOMAIN_BOUND)?;
            problem.query(Sentence::rel("S", vec![cst("t")]))?;
            Ok(PoIExample {
                name: "success-good",
                summary: "an asymmetric gloss on success breaks the symmetry: nothing forced",
                problem,
                expected: vec![ExpectedPoI::NotForced],
            })
        }
        "goodness-independent" => {
            let axioms = vec![partition_axiom("S", "F")];
            let mut problem = PoIProblem::new(trial_signature(true), axioms, DEFAULT_DOMAIN_BOUND)?;
            let success = Sentence::rel("S", vec![cst("t")]);
            let gloss = subset_axiom("S", "G");
            problem.assume_independent(success.clone(), gloss.clone())?;
            problem.query_given(vec![gloss], success)?;
            Ok(PoIExample {
                name: "goodness-independent",
                summary: "the gloss is assumed independent of success, so it drops out: 1/2",
                problem,
                expected: vec![ExpectedPoI::Forced(half)],
            })
        }
        "lowered-root" => {
            let axioms = vec![partition_axiom("S", "F")];
            let mut problem = PoIProblem::new(trial_signature(true), axioms, DEFAULT_DOMAIN_BOUND)?;
            problem.assume(Vec::new(), subset_axiom("S", "G"), Rat::one())?;
            problem.query(Sentence::rel("S", vec![cst("t")]))?;
            Ok(PoIExample {
                name: "lowered-root",
                summary: "the gloss held with probability one instead of axiomatically: 1/2",
                problem,
                expected: vec![ExpectedPoI::Forced(half)],
            })
        }
        "three-balls" => {
            let b = |i: usize| cst(&format!("b{i}"));
            let axioms = vec![
                Sentence::and(vec![
                    Sentence::neq(b(1), b(2)),
                    Sentence::neq(b(1), b(3)),
                    Sentence::neq(b(2), b(3)),
                ]),
                partition_axiom("C0", "C1"),
                Sentence::or((1..=3).map(|i| Sentence::rel("C0", vec![b(i)])).collect()),
                Sentence::or((1..=3).map(|i| Sentence::rel("C1", vec![b(i)])).collect()),
            ];
            let mut problem = PoIProblem::new(balls_signature(3), axioms, DEFAULT_DOMAIN_BOUND)?;
            let mut expected = Vec::new();
            for n in 0..8 {
                problem.query(coloring_sentence(3, n))?;
                expected.push(if n == 0 || n == 7 {
                    ExpectedPoI::Forced(Rat::zero())
                } else {
                    ExpectedPoI::Forced(sixth.clone())
                });
            }
            Ok(PoIExample {
                name: "three-balls",
                summary: "three distinct balls, both colors present: each mix forced to 1/6",
                problem,
                expected,
            })
        }
        "two-balls" => {
            let axioms = vec![
                Sentence::neq(cst("b1"), cst("b2")),
                partition_axiom("C0", "C1"),
            ];
            let mut problem = PoIProblem::new(balls_signature(2), axioms, DEFAULT_DOMAIN_BOUND)?;
            let mut expected = Vec::new();
            for n in 0..4 {
                problem.query(coloring_sentence(2, n))?;
                expected.push(ExpectedPoI::NotForced);
            }
            Ok(PoIExample {
                name: "two-balls",
                summary: "two balls without the both-colors guarantee: only same-color \
                          probabilities are linked, nothing forced",
                problem,
                expected,
            })
        }
        "random-number" => {
            // bound 3 keeps the binary-relation universe tractable
            let mut problem = PoIProblem::new(number_signature(false), number_axioms(), 3)?;
            problem.query(Sentence::eq(cst("c"), cst("n0")))?;
            Ok(PoIExample {
                name: "random-number",
                summary: "c is one of two ordered numbers; the order breaks the symmetry: \
                          nothing forced",
                problem,
                expected: vec![ExpectedPoI::NotForced],
            })
        }
        "random-number-defined" => {
            let mut axioms = number_axioms();
            // d is c's mirror: ∀y(y = d ↔ (c = n0 ∧ y = n1 ∨ c = n1 ∧ y = n0))
            let y = || Term::var("y");
            axioms.push(Sentence::forall(
                "y",
                Sentence::iff(
                    Sentence::eq(y(), cst("d")),
                    Sentence::or(vec![
                        Sentence::and(vec![
                            Sentence::eq(cst("c"), cst("n0")),
                            Sentence::eq(y(), cst("n1")),
                        ]),
                        Sentence::and(vec![
                            Sentence::eq(cst("c"), cst("n1")),
                            Sentence::eq(y(), cst("n0")),
                        ]),
                    ]),
                ),
            ));
            let mut problem = PoIProblem::new(number_signature(true), axioms, 3)?;
            problem.query(Sentence::eq(cst("c"), cst("n0")))?;
            Ok(PoIExample {
                name: "random-number-defined",
                summary: "adding the defined mirror d restores the symmetry: forced 1/2",
                problem,
                expected: vec![ExpectedPoI::Forced(half)],
            })
        }
        other => Err(format!(
            "unknown example {other:?}; known names: {}",
            EXAMPLE_NAMES.join(", ")
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names<'a>(perms: &'a [SignaturePermutation]) -> Vec<String> {
        perms.iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn permutation_count_matches_class_factorials() {
        let coin = poi_example("one-coin").unwrap().problem;
        let perms = enumerate_permutations(coin.signature()).unwrap();
        assert_eq!(perms.len(), 6);
        assert!(perms[0].is_identity());

        let good = poi_example("success-good").unwrap().problem;
        assert_eq!(enumerate_permutations(good.signature()).unwrap().len(), 6);

        let mut single = FinSignature::new();
        single.relation("R", 3).unwrap();
        let only = enumerate_permutations(&single).unwrap();
        assert_eq!(only.len(), 1);
        assert!(only[0].is_identity());
    }

    #[test]
    fn permutation_enumeration_caps_out() {
        let mut sig = FinSignature::new();
        for i in 0..11 {
            sig.constant(&format!("k{i}")).unwrap();
        }
        let err = enumerate_permutations(&sig).unwrap_err();
        assert!(err.contains("cap"), "unexpected message: {err}");
        // a raised cap lets a smaller class through
        let mut small = FinSignature::new();
        for i in 0..4 {
            small.constant(&format!("k{i}")).unwrap();
        }
        assert_eq!(enumerate_permutations_capped(&small, 24).unwrap().len(), 24);
        assert!(enumerate_permutations_capped(&small, 23).is_err());
    }

    #[test]
    fn invariance_is_bounded_semantic_equivalence() {
        let coin = poi_example("one-coin").unwrap().problem;
        let swap = SignaturePermutation::from_cycles(coin.signature(), &[&["s0", "s1"]]).unwrap();
        assert!(invariant(coin.signature(), coin.axioms(), &swap, 4).unwrap());
        let id = SignaturePermutation::identity(coin.signature());
        assert!(invariant(coin.signature(), coin.axioms(), &id, 4).unwrap());

        let good = poi_example("success-good").unwrap().problem;
        let sf = SignaturePermutation::from_cycles(good.signature(), &[&["S", "F"]]).unwrap();
        assert!(!invariant(good.signature(), good.axioms(), &sf, 4).unwrap());

        let trial = poi_example("single-trial").unwrap().problem;
        let sf = SignaturePermutation::from_cycles(trial.signature(), &[&["S", "F"]]).unwrap();
        assert!(invariant(trial.signature(), trial.axioms(), &sf, 4).unwrap());
    }

    #[test]
    fn structure_enumeration_counts_and_iso_classes() {
        let either = poi_example("either-true").unwrap().problem;
        let structs = all_structures(either.signature(), 2).unwrap();
        // size 1: one constant value, two subsets; size 2: two values, four subsets
        assert_eq!(structs.len(), 2 + 8);
        assert_eq!(dedup_iso(&structs).len(), 6);
        for st in &structs {
            st.validate().unwrap();
        }
    }

    #[test]
    fn bounded_entailment_basics() {
        let trial = poi_example("single-trial").unwrap().problem;
        let s_t = Sentence::rel("S", vec![cst("t")]);
        let f_t = Sentence::rel("F", vec![cst("t")]);
        let not_both = Sentence::not(Sentence::and(vec![s_t.clone(), f_t.clone()]));
        assert!(bounded_entails(trial.signature(), trial.axioms(), &not_both, 4).unwrap());
        assert!(!bounded_entails(trial.signature(), trial.axioms(), &s_t, 4).unwrap());
        // or-elimination over the partition
        let either = Sentence::or(vec![s_t.clone(), f_t.clone()]);
        assert!(bounded_entails(trial.signature(), trial.axioms(), &either, 4).unwrap());
    }

    fn coin_model(mass0: Rat, mass1: Rat) -> FinModel {
        let coin = poi_example("one-coin").unwrap().problem;
        let mut outcomes = Vec::new();
        for (c_val, mass) in [(0usize, mass0), (1usize, mass1)] {
            let mut st = FinStructure::new(coin.signature().clone(), 2).unwrap();
            st.set_constant("s0", 0).unwrap();
            st.set_constant("s1", 1).unwrap();
            st.set_constant("c", c_val).unwrap();
            outcomes.push((st, mass));
        }
        FinModel::new(outcomes).unwrap()
    }

    #[test]
    fn poi_verify_accepts_the_uniform_coin_model() {
        let coin = poi_example("one-coin").unwrap().problem;
        let perms = enumerate_permutations(coin.signature()).unwrap();
        let model = coin_model(Rat::new(1, 2), Rat::new(1, 2));
        let report = poi_verify(&coin, &model, &perms).unwrap();
        assert!(report.passed(), "violations: {:?}", report.violations);
        assert!(report.comparisons > 0);

        // the model is isomorphic to its image under every theory-fixing
        // permutation (here: the side swap), though not under arbitrary ones
        let fixing: Vec<SignaturePermutation> = perms
            .iter()
            .filter(|pi| invariant(coin.signature(), coin.axioms(), pi, 4).unwrap())
            .cloned()
            .collect();
        assert_eq!(fixing.len(), 2);
        let report = poi_verify(&coin, &model, &fixing).unwrap();
        assert!(report.iso_symmetric);
    }

    #[test]
    fn poi_verify_flags_the_biased_coin() {
        let coin = poi_example("one-coin").unwrap().problem;
        let perms = enumerate_permutations(coin.signature()).unwrap();
        let model = coin_model(Rat::new(1, 3), Rat::new(2, 3));
        let report = poi_verify(&coin, &model, &perms).unwrap();
        assert!(!report.passed());
        assert!(!report.iso_symmetric);
        assert!(
            report.violations.iter().any(|v| v.contains("(s0 s1)")),
            "violations: {:?}",
            report.violations
        );
    }

    fn three_balls_paper_model() -> FinModel {
        let balls = poi_example("three-balls").unwrap().problem;
        let mut outcomes = Vec::new();
        for n in 0..8usize {
            let mut st = FinStructure::new(balls.signature().clone(), 3).unwrap();
            let mut white = Vec::new();
            let mut black = Vec::new();
            for k in 1..=3usize {
                st.set_constant(&format!("b{k}"), k - 1).unwrap();
                if n >> (k - 1) & 1 == 1 {
                    white.push(vec![k - 1]);
                } else {
                    black.push(vec![k - 1]);
                }
            }
            st.set_relation("C0", black).unwrap();
            st.set_relation("C1", white).unwrap();
            let mass = if n == 0 || n == 7 {
                Rat::zero()
            } else {
                Rat::new(1, 6)
            };
            outcomes.push((st, mass));
        }
        FinModel::new(outcomes).unwrap()
    }

    #[test]
    fn poi_verify_accepts_the_three_balls_sixth_model() {
        let balls = poi_example("three-balls").unwrap().problem;
        let perms = enumerate_permutations(balls.signature()).unwrap();
        assert_eq!(perms.len(), 12);
        let model = three_balls_paper_model();
        let report = poi_verify(&balls, &model, &perms).unwrap();
        assert!(report.passed(), "violations: {:?}", report.violations);
        assert!(report.iso_symmetric);
    }

    #[test]
    fn poi_verify_checks_declared_independence() {
        let prob = poi_example("goodness-independent").unwrap().problem;
        let perms = enumerate_permutations(prob.signature()).unwrap();

        // goodness everywhere: independent because the gloss is certain
        let mut outcomes = Vec::new();
        for t_val in 0..2usize {
            let mut st = FinStructure::new(prob.signature().clone(), 2).unwrap();
            st.set_constant("t", t_val).unwrap();
            st.set_relation("S", vec![vec![1]]).unwrap();
            st.set_relation("F", vec![vec![0]]).unwrap();
            st.set_relation("G", vec![vec![0], vec![1]]).unwrap();
            outcomes.push((st, Rat::new(1, 2)));
        }
        let good = FinModel::new(outcomes).unwrap();
        let report = poi_verify(&prob, &good, &perms).unwrap();
        assert!(report.passed(), "violations: {:?}", report.violations);

        // success and the gloss coincide: maximally dependent
        let mut outcomes = Vec::new();
        for (t_val, g) in [(1usize, vec![vec![1usize]]), (0usize, vec![])] {
            let mut st = FinStructure::new(prob.signature().clone(), 2).unwrap();
            st.set_constant("t", t_val).unwrap();
            st.set_relation("S", vec![vec![1]]).unwrap();
            st.set_relation("F", vec![vec![0]]).unwrap();
            st.set_relation("G", g).unwrap();
            outcomes.push((st, Rat::new(1, 2)));
        }
        let bad = FinModel::new(outcomes).unwrap();
        let report = poi_verify(&prob, &bad, &perms).unwrap();
        assert!(
            report.violations.iter().any(|v| v.contains("independent")),
            "violations: {:?}",
            report.violations
        );
    }

    #[test]
    fn one_coin_is_forced_to_a_half_with_a_symmetry_certificate() {
        let coin = poi_example("one-coin").unwrap().problem;
        let outcome = poi_forced(&coin).unwrap();
        assert!(outcome.caveat.is_none());
        let PoIVerdict::Forced { value, certificate } = &outcome.verdicts[0] else {
            panic!("expected a forced verdict, got {:?}", outcome.verdicts[0]);
        };
        assert_eq!(value, &Rat::new(1, 2));
        assert!(
            certificate.iter().any(|line| line.contains("(s0 s1)")),
            "certificate: {certificate:?}"
        );
        assert!(certificate.iter().any(|line| line.contains("additivity")));
    }

    #[test]
    fn the_coin_certificate_replays_from_its_stated_facts() {
        // rebuild the linear system from nothing but the certificate's
        // content: additivity over the admissible classes plus the single
        // orbit equality — the value must already be pinned
        let coin = poi_example("one-coin").unwrap().problem;
        let engine = Engine::build(&coin).unwrap();
        let n = engine.universe.len();
        let heads = engine
            .event_of(&Sentence::eq(cst("c"), cst("s1")))
            .unwrap();
        let tails = engine
            .event_of(&Sentence::eq(cst("c"), cst("s0")))
            .unwrap();
        let mut sys = LinearSystem::new(n);
        sys.push(LinearConstraint::eq(vec![Rat::one(); n], Rat::one()));
        let mut coeffs = indicator(n, &heads);
        for i in tails.iter() {
            coeffs[i] = &coeffs[i] - &Rat::one();
        }
        sys.push(LinearConstraint::eq(coeffs, Rat::zero()));
        let num = AffineFn::new(indicator(n, &heads), Rat::zero());
        let den = AffineFn::new(vec![Rat::one(); n], Rat::zero());
        let rb = ratio_bounds(&sys, &[], &num, &den).unwrap().unwrap();
        assert_eq!(rb.lower, Rat::new(1, 2));
        assert_eq!(rb.upper, Rat::new(1, 2));
    }

    #[test]
    fn success_good_is_not_forced_across_the_full_interval() {
        let good = poi_example("success-good").unwrap().problem;
        let outcome = poi_forced(&good).unwrap();
        let PoIVerdict::NotForced { lower, upper, lower_witness, upper_witness } =
            &outcome.verdicts[0]
        else {
            panic!("expected not-forced, got {:?}", outcome.verdicts[0]);
        };
        assert_eq!(lower, &Rat::zero());
        assert_eq!(upper, &Rat::one());
        let s_t = Sentence::rel("S", vec![cst("t")]);
        let lo = lower_witness.conditional_prob(good.axioms(), &s_t).unwrap().unwrap();
        let hi = upper_witness.conditional_prob(good.axioms(), &s_t).unwrap().unwrap();
        assert_ne!(lo, hi);
    }

    #[test]
    fn two_balls_links_same_color_masses_but_forces_nothing() {
        let balls = poi_example("two-balls").unwrap().problem;
        let outcome = poi_forced(&balls).unwrap();
        assert_eq!(outcome.verdicts.len(), 4);
        for (n, v) in outcome.verdicts.iter().enumerate() {
            let PoIVerdict::NotForced { lower, upper, lower_witness, upper_witness } = v else {
                panic!("query {n}: expected not-forced, got {v:?}");
            };
            assert_eq!(lower, &Rat::zero());
            assert_eq!(upper, &Rat::new(1, 2));
            // the orbit equalities hold at both witnesses
            for w in [lower_witness, upper_witness] {
                let p = |m: usize| {
                    w.conditional_prob(balls.axioms(), &coloring_sentence(2, m))
                        .unwrap()
                        .unwrap()
                };
                assert_eq!(p(0), p(3));
                assert_eq!(p(1), p(2));
            }
        }
    }

    #[test]
    fn goodness_independent_forces_a_half_via_the_declared_independence() {
        let prob = poi_example("goodness-independent").unwrap().problem;
        let outcome = poi_forced(&prob).unwrap();
        let PoIVerdict::Forced { value, certificate } = &outcome.verdicts[0] else {
            panic!("expected forced, got {:?}", outcome.verdicts[0]);
        };
        assert_eq!(value, &Rat::new(1, 2));
        assert!(
            certificate.iter().any(|line| line.contains("independent")),
            "certificate: {certificate:?}"
        );
    }

    #[test]
    fn lowered_root_forces_a_half() {
        let prob = poi_example("lowered-root").unwrap().problem;
        let outcome = poi_forced(&prob).unwrap();
        let PoIVerdict::Forced { value, certificate } = &outcome.verdicts[0] else {
            panic!("expected forced, got {:?}", outcome.verdicts[0]);
        };
        assert_eq!(value, &Rat::new(1, 2));
        assert!(
            certificate.iter().any(|line| line.contains("[assumed]")),
            "certificate: {certificate:?}"
        );
    }

    #[test]
    fn the_ordered_pair_is_open_until_the_mirror_constant_is_defined() {
        let plain = poi_example("random-number").unwrap();
        let outcome = poi_forced(&plain.problem).unwrap();
        assert!(
            outcome.caveat.is_some(),
            "a binary relation should carry the bounded-check caveat"
        );
        assert!(matches!(outcome.verdicts[0], PoIVerdict::NotForced { .. }));

        let defined = poi_example("random-number-defined").unwrap();
        let outcome = poi_forced(&defined.problem).unwrap();
        let PoIVerdict::Forced { value, certificate } = &outcome.verdicts[0] else {
            panic!("expected forced, got {:?}", outcome.verdicts[0]);
        };
        assert_eq!(value, &Rat::new(1, 2));
        assert!(
            certificate.iter().any(|line| line.contains("(c d)")),
            "certificate: {certificate:?}"
        );
    }

    #[test]
    fn contradictory_assumptions_come_back_inconsistent() {
        let coin = poi_example("one-coin").unwrap().problem;
        let mut problem = PoIProblem::new(
            coin.signature().clone(),
            coin.axioms().to_vec(),
            coin.domain_bound(),
        )
        .unwrap();
        problem
            .assume(Vec::new(), Sentence::eq(cst("c"), cst("s0")), Rat::new(1, 4))
            .unwrap();
        problem
            .assume(Vec::new(), Sentence::eq(cst("c"), cst("s1")), Rat::new(1, 4))
            .unwrap();
        problem.query(Sentence::eq(cst("c"), cst("s1"))).unwrap();
        let outcome = poi_forced(&problem).unwrap();
        assert_eq!(outcome.verdicts[0], PoIVerdict::Inconsistent);
    }

    #[test]
    fn every_canned_example_matches_its_expected_verdicts() {
        for name in poi_example_names() {
            let example = poi_example(name).unwrap();
            let problem = &example.problem;
            let outcome = poi_forced(problem).unwrap();
            assert_eq!(
                outcome.verdicts.len(),
                example.expected.len(),
                "{name}: verdict count"
            );
            let perms = enumerate_permutations(problem.signature()).unwrap();
            for (i, (verdict, expected)) in
                outcome.verdicts.iter().zip(&example.expected).enumerate()
            {
                match (verdict, expected) {
                    (PoIVerdict::Forced { value, .. }, ExpectedPoI::Forced(want)) => {
                        assert_eq!(value, want, "{name} query {i}");
                    }
                    (
                        PoIVerdict::NotForced { lower_witness, upper_witness, .. },
                        ExpectedPoI::NotForced,
                    ) => {
                        let q = &problem.queries()[i];
                        let mut cond = problem.axioms().to_vec();
                        cond.extend(q.extras().iter().cloned());
                        let mut values = Vec::new();
                        for w in [lower_witness, upper_witness] {
                            // witnesses satisfy the axioms almost surely …
                            for a in problem.axioms() {
                                assert_eq!(
                                    w.prob(a).unwrap(),
                                    Some(Rat::one()),
                                    "{name} query {i}: axiom {a} on a witness"
                                );
                            }
                            // … and the assumed conditional probabilities …
                            for (extras, target, p) in problem.assumed() {
                                let mut c = problem.axioms().to_vec();
                                c.extend(extras.iter().cloned());
                                assert_eq!(
                                    w.conditional_prob(&c, target).unwrap().as_ref(),
                                    Some(p),
                                    "{name} query {i}: assumption on a witness"
                                );
                            }
                            // … and the symmetry checks
                            let report = poi_verify(problem, w, &perms).unwrap();
                            assert!(
                                report.passed(),
                                "{name} query {i}: witness violations {:?}",
                                report.violations
                            );
                            values.push(w.conditional_prob(&cond, q.sentence()).unwrap().unwrap());
                        }
                        assert_ne!(values[0], values[1], "{name} query {i}: witness values");
                    }
                    (PoIVerdict::Inconsistent, ExpectedPoI::Inconsistent) => {}
                    (got, want) => panic!("{name} query {i}: expected {want:?}, got {got:?}"),
                }
            }
            // sufficiency: a model isomorphic to all its permuted images
            // passes verification
            if let Some(model) = poi_admissible_model(problem).unwrap() {
                let report = poi_verify(problem, &model, &perms).unwrap();
                assert!(
                    !report.iso_symmetric || report.passed(),
                    "{name}: iso-symmetric model with violations {:?}",
                    report.violations
                );
            }
        }
    }

    #[test]
    fn unknown_example_names_are_rejected() {
        assert!(poi_example("no-such-example").is_err());
    }

    #[test]
    fn the_without_loss_of_generality_pattern_holds_on_colored_objects() {
        // three distinct objects, each red or blue exclusively; some two
        // share a color; fixing the first case by symmetry settles all
        let mut sig = FinSignature::new();
        sig.constant("c").unwrap();
        sig.relation("r", 1).unwrap();
        sig.relation("b", 1).unwrap();
        let axioms = vec![Sentence::ExistsExactly(3), partition_axiom("r", "b")];
        let share = Sentence::exists(
            "x",
            Sentence::exists(
                "y",
                Sentence::and(vec![
                    Sentence::neq(Term::var("x"), Term::var("y")),
                    Sentence::or(vec![
                        Sentence::and(vec![
                            Sentence::rel("r", vec![Term::var("x")]),
                            Sentence::rel("r", vec![Term::var("y")]),
                        ]),
                        Sentence::and(vec![
                            Sentence::rel("b", vec![Term::var("x")]),
                            Sentence::rel("b", vec![Term::var("y")]),
                        ]),
                    ]),
                ]),
            ),
        );
        let theta0 = Sentence::rel("r", vec![cst("c")]);
        let theta1 = Sentence::rel("b", vec![cst("c")]);
        let swap = SignaturePermutation::from_cycles(&sig, &[&["r", "b"]]).unwrap();

        // the case split is exhaustive and driven by a symmetry that fixes
        // both the axioms and the goal
        let split = Sentence::or(vec![theta0.clone(), theta1.clone()]);
        assert!(bounded_entails(&sig, &axioms, &split, 4).unwrap());
        assert!(invariant(&sig, &axioms, &swap, 4).unwrap());
        assert!(invariant(&sig, &[share.clone()], &swap, 4).unwrap());
        assert_eq!(theta0.permute(&swap), theta1);

        // settling the distinguished case settles the general claim
        let mut with_theta0 = axioms.clone();
        with_theta0.push(theta0);
        assert!(bounded_entails(&sig, &with_theta0, &share, 4).unwrap());
        assert!(bounded_entails(&sig, &axioms, &share, 4).unwrap());
    }

    #[test]
    fn bounded_entailment_commutes_with_permutation() {
        let sig = trial_signature(true);
        let structs = all_structures(&sig, 3).unwrap();
        let perms = enumerate_permutations(&sig).unwrap();
        let s_t = Sentence::rel("S", vec![cst("t")]);
        let f_t = Sentence::rel("F", vec![cst("t")]);
        let g_t = Sentence::rel("G", vec![cst("t")]);
        let pool: Vec<Sentence> = vec![
            s_t.clone(),
            f_t.clone(),
            g_t.clone(),
            partition_axiom("S", "F"),
            subset_axiom("S", "G"),
            subset_axiom("F", "G"),
            subset_axiom("G", "S"),
            Sentence::exists(
                "x",
                Sentence::and(vec![
                    Sentence::rel("S", vec![Term::var("x")]),
                    Sentence::rel("G", vec![Term::var("x")]),
                ]),
            ),
            Sentence::or(vec![s_t, g_t.clone()]),
            Sentence::not(g_t),
        ];

        let mut state: u64 = 0x9e3779b97f4a7c15;
        let mut next = |m: usize| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 33) as usize) % m
        };
        for _ in 0..200 {
            let premises = vec![
                pool[next(pool.len())].clone(),
                pool[next(pool.len())].clone(),
            ];
            let goal = pool[next(pool.len())].clone();
            let pi = &perms[next(perms.len())];
            let before = bounded_entails_over(&structs, &premises, &goal).unwrap();
            let permuted: Vec<Sentence> = premises.iter().map(|s| s.permute(pi)).collect();
            let after = bounded_entails_over(&structs, &permuted, &goal.permute(pi)).unwrap();
            assert_eq!(before, after, "premises {premises:?}, goal {goal}, pi {pi}");
        }
    }
}
