//! Conditional probability assignments over propositional antecedents.
//!
//! A [`Problem`] is a finite set of statements "P(φ | T0, ψ…) = p" sharing
//! one root theory T0. Statements collapse to an [`EventTable`] keyed by
//! (condition event, target event); tables can be checked for coherence,
//! closed under the derived consequence rules, and queried. [`Problem::derive`]
//! computes the exact range a target probability can take over all measures
//! satisfying the statements (with every antecedent kept strictly positive),
//! reporting a forced value, an interval with witnesses, inconsistency, or
//! undefinedness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::event::Event;
use crate::formula::{Formula, PropVar, PvDecls};
use crate::measure::{
    generate_sigma, partition_blocks, FiniteProbSpace, MeasureError, SetFamily, MAX_SIGMA_BLOCKS,
};
use crate::rat::Rat;
use crate::ratlp::{
    ratio_bounds, AffineFn, LinearConstraint, LinearSystem, LpError, LpOutcome,
};
use crate::semantics::{AtomSpace, SemanticsError, StrictModel};

/// Growth cap for [`EventTable::closure`]; the fixpoint is finite but can be
/// exponential in pathological inputs.
const CLOSURE_CAP: usize = 100_000;

/// Cap on the number of support tuples enumerated by
/// [`derive_under_independence`].
const PRODUCT_SUPPORT_CAP: u64 = 1 << 20;

#[derive(Debug, Error)]
pub enum InductiveError {
    #[error("probability {0} lies outside [0, 1]")]
    BadProb(Rat),
    #[error("statements assign two values to one equivalence class: {first} vs {second}")]
    Conflict { first: String, second: String },
    #[error("closure reaches a contradiction: {0}")]
    Contradiction(String),
    #[error("probability undefined: {0}")]
    Undefined(String),
    #[error("marginals share the variable {0}")]
    Overlap(String),
    #[error("not determined by the given constraints: {0}")]
    Underdetermined(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

fn invalid(msg: impl Into<String>) -> InductiveError {
    InductiveError::Invalid(msg.into())
}

// -------------------------------------------------------------- statements

/// The conditioning side of a statement: the problem-wide root theory plus
/// finitely many extra formulas. Every antecedent of one problem carries the
/// same root, so problems stay connected by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Antecedent {
    root: Vec<Formula>,
    extras: Vec<Formula>,
}

impl Antecedent {
    pub fn new(root: Vec<Formula>, extras: Vec<Formula>) -> Self {
        Antecedent { root, extras }
    }

    pub fn root_only(root: Vec<Formula>) -> Self {
        Antecedent { root, extras: Vec::new() }
    }

    pub fn root(&self) -> &[Formula] {
        &self.root
    }

    pub fn extras(&self) -> &[Formula] {
        &self.extras
    }

    pub fn with_extra(&self, f: Formula) -> Self {
        let mut extras = self.extras.clone();
        extras.push(f);
        Antecedent { root: self.root.clone(), extras }
    }

    /// Event of the whole antecedent: root event ∩ extras' events.
    pub fn event(&self, atoms: &AtomSpace) -> Result<Event, SemanticsError> {
        Ok(atoms.event_of_all(&self.root)?.intersect(&atoms.event_of_all(&self.extras)?))
    }
}

impl fmt::Display for Antecedent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T0")?;
        for e in &self.extras {
            write!(f, ", {e}")?;
        }
        Ok(())
    }
}

/// One assignment "P(consequent | antecedent) = prob".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InductiveStatement {
    antecedent: Antecedent,
    consequent: Formula,
    prob: Rat,
}

impl InductiveStatement {
    pub fn new(
        antecedent: Antecedent,
        consequent: Formula,
        prob: Rat,
    ) -> Result<Self, InductiveError> {
        if !prob.in_unit() {
            return Err(InductiveError::BadProb(prob));
        }
        Ok(InductiveStatement { antecedent, consequent, prob })
    }

    pub fn antecedent(&self) -> &Antecedent {
        &self.antecedent
    }

    pub fn consequent(&self) -> &Formula {
        &self.consequent
    }

    pub fn prob(&self) -> &Rat {
        &self.prob
    }
}

impl fmt::Display for InductiveStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P({} | {}) = {}", self.consequent, self.antecedent, self.prob)
    }
}

// ----------------------------------------------------------------- problem

/// A finite statement set over declared variables, all conditioned on one
/// shared root theory.
#[derive(Debug, Clone)]
pub struct Problem {
    decls: PvDecls,
    root: Vec<Formula>,
    statements: Vec<InductiveStatement>,
}

impl Problem {
    pub fn new(
        decls: PvDecls,
        root: Vec<Formula>,
        statements: Vec<InductiveStatement>,
    ) -> Result<Self, InductiveError> {
        for st in &statements {
            if st.antecedent.root != root {
                return Err(invalid(format!(
                    "statement {st} does not share the problem root"
                )));
            }
        }
        Ok(Problem { decls, root, statements })
    }

    pub fn decls(&self) -> &PvDecls {
        &self.decls
    }

    pub fn root(&self) -> &[Formula] {
        &self.root
    }

    pub fn statements(&self) -> &[InductiveStatement] {
        &self.statements
    }

    /// An antecedent of this problem with the given extras.
    pub fn antecedent(&self, extras: Vec<Formula>) -> Antecedent {
        Antecedent::new(self.root.clone(), extras)
    }

    pub fn atom_space(&self) -> Result<AtomSpace, InductiveError> {
        Ok(AtomSpace::new(self.decls.clone())?)
    }

    /// Collapse statements to event level. Statements whose consequents are
    /// equivalent given their shared antecedent must agree on the
    /// probability; two clashing statements are reported by name.
    pub fn collapse(&self) -> Result<EventTable, InductiveError> {
        let atoms = self.atom_space()?;
        let root_event = atoms.event_of_all(&self.root)?;
        let mut entries: BTreeMap<(Event, Event), Rat> = BTreeMap::new();
        let mut keyed: Vec<(Event, Event, &InductiveStatement)> = Vec::new();
        for st in &self.statements {
            let cond = st.antecedent.event(&atoms)?;
            let target = atoms.event_of(&st.consequent)?;
            // same condition + targets that agree inside it = one class
            for (c, e, prev) in &keyed {
                if *c == cond
                    && e.intersect(&cond) == target.intersect(&cond)
                    && prev.prob != st.prob
                {
                    return Err(InductiveError::Conflict {
                        first: prev.to_string(),
                        second: st.to_string(),
                    });
                }
            }
            keyed.push((cond.clone(), target.clone(), st));
            entries.insert((cond, target), st.prob.clone());
        }
        Ok(EventTable { space: atoms, root_event, entries })
    }

    fn lp_parts(&self) -> Result<LpParts, InductiveError> {
        let atoms = self.atom_space()?;
        let n = atoms.outcome_count();
        let root_event = atoms.event_of_all(&self.root)?;
        let mut sys = LinearSystem::new(n);
        sys.push(LinearConstraint::eq(vec![Rat::one(); n], Rat::one()));
        sys.push(LinearConstraint::eq(indicator(n, &root_event), Rat::one()));
        let mut conds: BTreeSet<Event> = BTreeSet::new();
        conds.insert(root_event.clone());
        for st in &self.statements {
            let cond = st.antecedent.event(&atoms)?;
            let target = atoms.event_of(&st.consequent)?.intersect(&cond);
            // μ(target) − p·μ(cond) = 0
            let mut coeffs = vec![Rat::zero(); n];
            for i in target.iter() {
                coeffs[i] = &coeffs[i] + &Rat::one();
            }
            for i in cond.iter() {
                coeffs[i] = &coeffs[i] - &st.prob;
            }
            sys.push(LinearConstraint::eq(coeffs, Rat::zero()));
            conds.insert(cond);
        }
        let conds: Vec<Event> = conds.into_iter().collect();
        Ok(LpParts { atoms, sys, conds, root_event })
    }

    /// A measure satisfying every statement, with every antecedent strictly
    /// positive — or `None` when no such measure exists.
    pub fn consistency(&self) -> Result<Option<FiniteProbSpace>, InductiveError> {
        let parts = self.lp_parts()?;
        let n = parts.atoms.outcome_count();
        match admissible_point(&parts.sys, &parts.conds, n)? {
            Some(masses) => Ok(Some(FiniteProbSpace::from_atom_masses(masses)?)),
            None => Ok(None),
        }
    }

    /// Exact range of P(φ | x) over all full-power-set measures satisfying
    /// the statements with positive antecedents.
    ///
    /// The result quantifies over completions carried by the whole atom
    /// algebra; whether the value is additionally pinned on every coarser
    /// completion is reported separately by [`Problem::measurability_forced`].
    pub fn derive(&self, x: &Antecedent, phi: &Formula) -> Result<DeriveResult, InductiveError> {
        if x.root != self.root {
            return Err(invalid("the query antecedent does not share the problem root"));
        }
        let parts = self.lp_parts()?;
        let n = parts.atoms.outcome_count();
        if admissible_point(&parts.sys, &parts.conds, n)?.is_none() {
            return Ok(DeriveResult::Inconsistent);
        }
        let ex = x.event(&parts.atoms)?;
        let target = parts.atoms.event_of(phi)?.intersect(&ex);
        let strict: Vec<AffineFn> = parts
            .conds
            .iter()
            .map(|c| AffineFn::new(indicator(n, c), Rat::zero()))
            .collect();
        let num = AffineFn::new(indicator(n, &target), Rat::zero());
        let den = AffineFn::new(indicator(n, &ex), Rat::zero());
        let Some(b) = ratio_bounds(&parts.sys, &strict, &num, &den)? else {
            return Ok(DeriveResult::Undefined);
        };
        if b.lower == b.upper {
            return Ok(DeriveResult::Forced(b.lower));
        }
        let span = &b.upper - &b.lower;
        // one solver task per bound; an unattained bound is replaced by an
        // interior value so both witnesses are honest admissible measures
        let (wl, wu) = rayon::join(
            || {
                let v = &b.lower + &(&span * &Rat::new(1, 4));
                side_masses(&parts, &target, &ex, b.lower_attained, b.lower_witness.as_ref(), &v)
            },
            || {
                let v = &b.lower + &(&span * &Rat::new(3, 4));
                side_masses(&parts, &target, &ex, b.upper_attained, b.upper_witness.as_ref(), &v)
            },
        );
        Ok(DeriveResult::Interval {
            lower: b.lower,
            upper: b.upper,
            lower_attained: b.lower_attained,
            upper_attained: b.upper_attained,
            lower_witness: FiniteProbSpace::from_atom_masses(wl?)?,
            upper_witness: FiniteProbSpace::from_atom_masses(wu?)?,
        })
    }

    /// Advisory companion to [`Problem::derive`]: does the target event lie
    /// in the σ-algebra generated by the constraint events, modulo null sets,
    /// at a witness for each bound? When this fails, a coarser completion
    /// exists on which the queried probability is not even defined, so a
    /// forced value should be read with care. `None` when the query is
    /// inconsistent or undefined, or the generated algebra is too fine to
    /// materialize.
    pub fn measurability_forced(
        &self,
        x: &Antecedent,
        phi: &Formula,
    ) -> Result<Option<bool>, InductiveError> {
        let parts = self.lp_parts()?;
        let n = parts.atoms.outcome_count();
        let ex = x.event(&parts.atoms)?;
        let target = parts.atoms.event_of(phi)?.intersect(&ex);
        let points: Vec<Vec<Rat>> = match self.derive(x, phi)? {
            DeriveResult::Inconsistent | DeriveResult::Undefined => return Ok(None),
            DeriveResult::Forced(v) => {
                vec![side_masses(&parts, &target, &ex, false, None, &v)?]
            }
            DeriveResult::Interval { lower_witness, upper_witness, .. } => {
                let take = |w: FiniteProbSpace| {
                    w.atom_masses().expect("derive builds full-power-set witnesses")
                };
                vec![take(lower_witness), take(upper_witness)]
            }
        };
        // events the statements talk about, plus the query's own
        let mut gen = SetFamily::empty(n);
        gen.insert(parts.root_event.clone())?;
        gen.insert(ex.clone())?;
        gen.insert(target.clone())?;
        for st in &self.statements {
            let cond = st.antecedent.event(&parts.atoms)?;
            gen.insert(parts.atoms.event_of(&st.consequent)?.intersect(&cond))?;
            gen.insert(cond)?;
        }
        if partition_blocks(n, &gen).len() > MAX_SIGMA_BLOCKS {
            return Ok(None);
        }
        let sigma = generate_sigma(n, &gen);
        let labels: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
        let mut flag = true;
        for pt in &points {
            let members: Vec<(Event, Rat)> = sigma
                .members()
                .iter()
                .map(|e| (e.clone(), e.iter().map(|i| &pt[i]).sum::<Rat>()))
                .collect();
            let space = FiniteProbSpace::new(labels.clone(), members)?;
            flag &= space.completion().is_measurable(&target);
        }
        Ok(Some(flag))
    }
}

struct LpParts {
    atoms: AtomSpace,
    sys: LinearSystem,
    conds: Vec<Event>,
    root_event: Event,
}

pub(crate) fn indicator(n: usize, e: &Event) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); n];
    for i in e.iter() {
        v[i] = Rat::one();
    }
    v
}

/// A feasible point with every listed event strictly positive, or `None`.
/// By convexity it suffices to maximize each indicator separately (one
/// solver task each) and average the maximizers.
pub(crate) fn admissible_point(
    sys: &LinearSystem,
    conds: &[Event],
    n: usize,
) -> Result<Option<Vec<Rat>>, InductiveError> {
    if conds.is_empty() {
        return Ok(sys.feasible_point()?);
    }
    let maxima: Vec<Option<Vec<Rat>>> = conds
        .par_iter()
        .map(|c| -> Result<Option<Vec<Rat>>, InductiveError> {
            match sys.maximize(&indicator(n, c))? {
                LpOutcome::Infeasible => Ok(None),
                // probability systems are bounded
                LpOutcome::Unbounded => Err(InductiveError::Lp(LpError::Internal)),
                LpOutcome::Optimal { value, point } => {
                    Ok(value.is_positive().then_some(point))
                }
            }
        })
        .collect::<Result<_, _>>()?;
    let mut pts = Vec::with_capacity(maxima.len());
    for m in maxima {
        match m {
            Some(p) => pts.push(p),
            None => return Ok(None),
        }
    }
    let k = Rat::int(pts.len() as i64);
    let avg = (0..n)
        .map(|i| pts.iter().map(|p| &p[i]).sum::<Rat>() / &k)
        .collect();
    Ok(Some(avg))
}

/// Witness masses for one side of an interval: the solver's maximizer when
/// the bound is attained, otherwise an admissible point pinned at an
/// interior ratio value.
fn side_masses(
    parts: &LpParts,
    target: &Event,
    ex: &Event,
    attained: bool,
    bound_witness: Option<&Vec<Rat>>,
    value: &Rat,
) -> Result<Vec<Rat>, InductiveError> {
    if attained {
        if let Some(w) = bound_witness {
            return Ok(w.clone());
        }
    }
    let n = ex.space_len();
    let mut sys = parts.sys.clone();
    let mut coeffs = vec![Rat::zero(); n];
    for i in target.iter() {
        coeffs[i] = &coeffs[i] + &Rat::one();
    }
    for i in ex.iter() {
        coeffs[i] = &coeffs[i] - value;
    }
    sys.push(LinearConstraint::eq(coeffs, Rat::zero()));
    let mut conds = parts.conds.clone();
    conds.push(ex.clone());
    admissible_point(&sys, &conds, n)?
        .ok_or_else(|| invalid("no admissible witness at the requested ratio value"))
}

// ------------------------------------------------------------ derive result

/// Outcome of [`Problem::derive`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeriveResult {
    /// No measure satisfies the statements with positive antecedents.
    Inconsistent,
    /// The statements are satisfiable but the query antecedent has measure
    /// zero in every admissible measure, so the conditional never exists.
    Undefined,
    /// Every admissible measure gives the target this value.
    Forced(Rat),
    /// The value ranges over a nondegenerate interval; each side carries an
    /// admissible witness, and the two witnesses realize distinct values.
    Interval {
        lower: Rat,
        upper: Rat,
        lower_attained: bool,
        upper_attained: bool,
        lower_witness: FiniteProbSpace,
        upper_witness: FiniteProbSpace,
    },
}

impl DeriveResult {
    pub fn forced_value(&self) -> Option<&Rat> {
        match self {
            DeriveResult::Forced(v) => Some(v),
            _ => None,
        }
    }

    pub fn bounds(&self) -> Option<(&Rat, &Rat)> {
        match self {
            DeriveResult::Forced(v) => Some((v, v)),
            DeriveResult::Interval { lower, upper, .. } => Some((lower, upper)),
            _ => None,
        }
    }
}

// -------------------------------------------------------------- event table

/// Statements at event level: (condition event, target event) → probability.
/// Conditions always include the root event; every condition is the root
/// event intersected with the extras' events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventTable {
    space: AtomSpace,
    root_event: Event,
    entries: BTreeMap<(Event, Event), Rat>,
}

/// Coherence rules checked by [`EventTable::check_rules`]. The equivalence
/// rule is enforced structurally at collapse time, and continuity is vacuous
/// at finite scale (chains of events stabilize), so neither can be violated
/// here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherenceRule {
    /// Entailed targets are certain, refuted targets impossible.
    Entailment,
    /// Certainty under an extended antecedent makes the implication certain.
    Implication,
    /// Certainty propagates along entailment and down to stronger antecedents.
    Transitivity,
    /// Probabilities of incompatible targets add.
    Additivity,
    /// The chain rule through an intermediate antecedent.
    Multiplicativity,
}

impl fmt::Display for CoherenceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CoherenceRule::Entailment => "entailment",
            CoherenceRule::Implication => "implication",
            CoherenceRule::Transitivity => "transitivity",
            CoherenceRule::Additivity => "additivity",
            CoherenceRule::Multiplicativity => "multiplicativity",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleViolation {
    pub rule: CoherenceRule,
    pub message: String,
}

impl fmt::Display for RuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.message)
    }
}

impl EventTable {
    pub fn space(&self) -> &AtomSpace {
        &self.space
    }

    pub fn root_event(&self) -> &Event {
        &self.root_event
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Event, &Event, &Rat)> {
        self.entries.iter().map(|((c, e), v)| (c, e, v))
    }

    pub fn get(&self, cond: &Event, target: &Event) -> Option<&Rat> {
        self.entries.get(&(cond.clone(), target.clone()))
    }

    /// All condition events, root included.
    pub fn conditions(&self) -> BTreeSet<Event> {
        let mut out: BTreeSet<Event> =
            self.entries.keys().map(|(c, _)| c.clone()).collect();
        out.insert(self.root_event.clone());
        out
    }

    pub fn targets_at(&self, cond: &Event) -> Vec<(&Event, &Rat)> {
        self.entries
            .iter()
            .filter(|((c, _), _)| c == cond)
            .map(|((_, e), v)| (e, v))
            .collect()
    }

    /// Insert an entry by hand, with the same conflict discipline as
    /// collapse.
    pub fn assert_entry(
        &mut self,
        cond: Event,
        target: Event,
        prob: Rat,
    ) -> Result<(), InductiveError> {
        if !prob.in_unit() {
            return Err(InductiveError::BadProb(prob));
        }
        let n = self.space.outcome_count();
        if cond.space_len() != n || target.space_len() != n {
            return Err(invalid("entry events must live on the table's outcome space"));
        }
        match self.entries.get(&(cond.clone(), target.clone())) {
            Some(old) if *old != prob => Err(InductiveError::Conflict {
                first: format!("P({target} | {cond}) = {old}"),
                second: format!("P({target} | {cond}) = {prob}"),
            }),
            _ => {
                self.entries.insert((cond, target), prob);
                Ok(())
            }
        }
    }

    /// The conditional-probability table of a measure: every measurable
    /// target against every positively measured condition of the completion.
    pub fn from_space(
        atoms: &AtomSpace,
        space: &FiniteProbSpace,
    ) -> Result<EventTable, InductiveError> {
        let n = atoms.outcome_count();
        if space.outcome_count() != n {
            return Err(invalid("space and atom space disagree on outcome count"));
        }
        let bar = space.completion();
        // the table is quadratic in the σ-algebra, so keep it materializable
        if bar.blocks().len() > 8 {
            return Err(invalid("the space's σ-algebra is too fine to tabulate"));
        }
        let measured: Vec<(Event, Rat)> = bar
            .sigma()
            .members()
            .iter()
            .map(|e| {
                let m = bar.measure(e).expect("σ-members are measurable");
                (e.clone(), m)
            })
            .collect();
        let mut entries = BTreeMap::new();
        for (cond, mc) in &measured {
            if !mc.is_positive() {
                continue;
            }
            for (target, _) in &measured {
                let m = bar
                    .measure(&target.intersect(cond))
                    .expect("σ-algebras are intersection-closed");
                entries.insert((cond.clone(), target.clone()), m / mc);
            }
        }
        Ok(EventTable { space: atoms.clone(), root_event: Event::full(n), entries })
    }

    /// Check every instantiation of the coherence rules over the present
    /// keys. This audits the numeric values only; entries the rules would
    /// force into existence are the business of [`EventTable::closure`].
    /// Continuity needs no check: at finite scale every increasing chain of
    /// events stabilizes, so it follows from additivity.
    pub fn check_rules(&self) -> Vec<RuleViolation> {
        let mut seen: BTreeSet<String> = BTreeSet::new();
        let mut out: Vec<RuleViolation> = Vec::new();
        let mut report = |rule: CoherenceRule, message: String| {
            if seen.insert(message.clone()) {
                out.push(RuleViolation { rule, message });
            }
        };
        let conds: Vec<Event> = self.conditions().into_iter().collect();
        let by_cond: BTreeMap<&Event, Vec<(&Event, &Rat)>> = conds
            .iter()
            .map(|c| (c, self.targets_at(c)))
            .collect();

        for (c, items) in &by_cond {
            for (e, v) in items {
                if c.is_subset(e) && !v.is_one() {
                    report(
                        CoherenceRule::Entailment,
                        format!("the antecedent {c} entails {e}, yet P = {v}"),
                    );
                }
                if c.is_disjoint(e) && !v.is_zero() {
                    report(
                        CoherenceRule::Entailment,
                        format!("the antecedent {c} refutes {e}, yet P = {v}"),
                    );
                }
            }
            // additivity over relatively incompatible pairs
            for (e1, p1) in items {
                for (e2, p2) in items {
                    if !c.intersect(e1).is_disjoint(e2) {
                        continue;
                    }
                    let uni = e1.union(e2);
                    for (u, pu) in items {
                        if u.intersect(c) == uni.intersect(c) && **pu != (*p1 + *p2) {
                            report(
                                CoherenceRule::Additivity,
                                format!(
                                    "under {c}: P({e1}) = {p1} and P({e2}) = {p2} are \
                                     incompatible, but their union carries {pu}"
                                ),
                            );
                        }
                    }
                }
            }
            // certainty propagates along relative entailment
            for (e1, p1) in items {
                if !p1.is_one() {
                    continue;
                }
                for (e2, p2) in items {
                    if c.intersect(e1).is_subset(e2) && !p2.is_one() {
                        report(
                            CoherenceRule::Transitivity,
                            format!(
                                "under {c}: {e1} is certain and entails {e2}, yet P({e2}) = {p2}"
                            ),
                        );
                    }
                }
            }
        }

        // rules relating nested conditions
        for c1 in &conds {
            for c2 in &conds {
                if c2 == c1 || !c2.is_subset(c1) {
                    continue;
                }
                let rows1 = &by_cond[c1];
                let rows2 = &by_cond[c2];
                // certainty transports down to the stronger antecedent
                for (e, v) in rows1 {
                    if !v.is_one() {
                        continue;
                    }
                    for (f, w) in rows2 {
                        if f.intersect(c1) == e.intersect(c1) && !w.is_one() {
                            report(
                                CoherenceRule::Transitivity,
                                format!(
                                    "{e} is certain under {c1} but carries {w} under \
                                     the stronger antecedent {c2}"
                                ),
                            );
                        }
                    }
                }
                // certain targets of the extension make implications certain
                for (e, v) in rows2 {
                    if !v.is_one() {
                        continue;
                    }
                    let imp = c2.complement().union(e);
                    for (f, w) in rows1 {
                        if f.intersect(c1) == imp.intersect(c1) && !w.is_one() {
                            report(
                                CoherenceRule::Implication,
                                format!(
                                    "{e} is certain under {c2}, so {f} should be \
                                     certain under {c1}, yet P = {w}"
                                ),
                            );
                        }
                    }
                }
                // chain rule: P(e ∧ f | c1) = P(e | c1) · P(f | c2) when c2
                // is c1 restricted by e
                for (e, p) in rows1 {
                    if &c1.intersect(e) != c2 {
                        continue;
                    }
                    for (f, q) in rows2 {
                        let meet = e.intersect(f);
                        for (g, r) in rows1 {
                            if g.intersect(c1) == meet.intersect(c1) && **r != (*p * *q) {
                                report(
                                    CoherenceRule::Multiplicativity,
                                    format!(
                                        "P({e} | {c1}) = {p} and P({f} | {c2}) = {q}, \
                                         but their conjunction carries {r}"
                                    ),
                                );
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Least fixpoint of the derived consequence rules: complements,
    /// relative differences, additivity of incompatible targets,
    /// inclusion–exclusion, certainty propagation in all directions, the
    /// chain rule forwards and backwards (which spawns the extended
    /// antecedents it conditions on), and the merge of antecedents extended
    /// by sure targets. A key receiving two distinct values, or a value
    /// outside [0, 1], is a contradiction.
    pub fn closure(&self) -> Result<EventTable, InductiveError> {
        let n = self.space.outcome_count();
        let full = Event::full(n);
        let nothing = Event::empty(n);
        let mut entries = self.entries.clone();
        let mut conds: BTreeSet<Event> = self.conditions();

        fn put(
            entries: &mut BTreeMap<(Event, Event), Rat>,
            cond: &Event,
            target: &Event,
            value: Rat,
        ) -> Result<bool, InductiveError> {
            if !value.in_unit() {
                return Err(InductiveError::Contradiction(format!(
                    "P({target} | {cond}) would be {value}, outside [0, 1]"
                )));
            }
            match entries.get(&(cond.clone(), target.clone())) {
                Some(old) if *old != value => Err(InductiveError::Contradiction(format!(
                    "P({target} | {cond}) would need both {old} and {value}"
                ))),
                Some(_) => Ok(false),
                None => {
                    entries.insert((cond.clone(), target.clone()), value);
                    Ok(true)
                }
            }
        }

        loop {
            let mut changed = false;
            for c in conds.clone() {
                changed |= put(&mut entries, &c, &full, Rat::one())?;
                changed |= put(&mut entries, &c, &nothing, Rat::zero())?;
                changed |= put(&mut entries, &c, &c, Rat::one())?;
                changed |= put(&mut entries, &c, &self.root_event, Rat::one())?;
            }

            let snapshot: Vec<((Event, Event), Rat)> =
                entries.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
            let mut by_cond: BTreeMap<Event, Vec<(Event, Rat)>> = BTreeMap::new();
            for ((c, e), v) in &snapshot {
                by_cond.entry(c.clone()).or_default().push((e.clone(), v.clone()));
            }

            for (c, items) in &by_cond {
                let present: BTreeSet<&Event> = items.iter().map(|(e, _)| e).collect();
                for (e1, p1) in items {
                    changed |= put(&mut entries, c, &e1.complement(), &Rat::one() - p1)?;
                    for (e2, p2) in items {
                        let meet = e1.intersect(e2);
                        let join = e1.union(e2);
                        // difference along relative entailment
                        if c.intersect(e1).is_subset(e2) {
                            changed |=
                                put(&mut entries, c, &e2.intersect(&e1.complement()), p2 - p1)?;
                        }
                        // incompatible targets: probabilities add
                        if c.intersect(&meet).is_empty() {
                            changed |= put(&mut entries, c, &join, p1 + p2)?;
                            changed |= put(&mut entries, c, &meet, Rat::zero())?;
                        }
                        // a certain or impossible side settles join and meet
                        if p1.is_zero() || p1.is_one() {
                            changed |=
                                put(&mut entries, c, &join, p1.clone().max(p2.clone()))?;
                            changed |=
                                put(&mut entries, c, &meet, p1.clone().min(p2.clone()))?;
                        }
                        // conjoining a sure event is invisible, in both the
                        // conjunction and the event it came from
                        if p1.is_one() {
                            changed |= put(
                                &mut entries,
                                c,
                                &meet.union(&e1.complement()),
                                p2.clone(),
                            )?;
                        }
                        // inclusion–exclusion, filling the missing corner
                        let pm = items.iter().find(|(e, _)| e == &meet).map(|(_, v)| v);
                        let pj = items.iter().find(|(e, _)| e == &join).map(|(_, v)| v);
                        match (pm, pj) {
                            (Some(pm), None) => {
                                changed |=
                                    put(&mut entries, c, &join, &(p1 + p2) - pm)?;
                            }
                            (None, Some(pj)) => {
                                changed |=
                                    put(&mut entries, c, &meet, &(p1 + p2) - pj)?;
                            }
                            _ => {}
                        }
                        let _ = &present;
                    }
                }
                // inclusion–exclusion solved for a missing operand: if
                // meet ⊆ mid ⊆ join relatively, the fourth event is
                // meet ∪ (join ∖ mid)
                for (i, pi) in items {
                    for (b, pb) in items {
                        if !c.intersect(i).is_subset(b) {
                            continue;
                        }
                        for (u, pu) in items {
                            if !c.intersect(b).is_subset(u) {
                                continue;
                            }
                            let x = i.union(&u.intersect(&b.complement()));
                            changed |= put(&mut entries, c, &x, &(pi + pu) - pb)?;
                        }
                    }
                }
            }

            // rules across nested conditions
            let cond_list: Vec<Event> = conds.iter().cloned().collect();
            for c1 in &cond_list {
                let Some(rows1) = by_cond.get(c1) else { continue };
                for c2 in &cond_list {
                    if c2 == c1 || !c2.is_subset(c1) {
                        continue;
                    }
                    // certainty survives strengthening the antecedent
                    for (e, v) in rows1 {
                        if v.is_one() {
                            changed |= put(&mut entries, c2, e, Rat::one())?;
                        }
                    }
                    // a certain target of the extension becomes a certain
                    // implication at the base
                    if let Some(rows2) = by_cond.get(c2) {
                        for (e, v) in rows2 {
                            if !v.is_one() {
                                continue;
                            }
                            changed |=
                                put(&mut entries, c1, &c2.complement().union(e), Rat::one())?;
                            let rel = c2.complement().intersect(c1).union(e);
                            changed |= put(&mut entries, c1, &rel, Rat::one())?;
                        }
                    }
                }
            }

            // the chain rule, forwards and backwards; positive targets open
            // extended antecedents, sure targets merge with the base
            for ((c, e), p) in &snapshot {
                if !p.is_positive() {
                    continue;
                }
                let c2 = c.intersect(e);
                if conds.insert(c2.clone()) {
                    changed = true;
                }
                let rows_c = &by_cond[c];
                if p.is_one() && c2 != *c {
                    // conditioning on a sure event changes nothing: the two
                    // antecedents share one row
                    for (f, v) in rows_c {
                        changed |= put(&mut entries, &c2, f, v.clone())?;
                    }
                    if let Some(rows2) = by_cond.get(&c2) {
                        for (f, v) in rows2 {
                            changed |= put(&mut entries, c, f, v.clone())?;
                        }
                    }
                }
                // multiply through the extension
                if let Some(rows2) = by_cond.get(&c2) {
                    for (f, q) in rows2 {
                        changed |= put(&mut entries, c, &e.intersect(f), p * q)?;
                    }
                }
                // divide a conjunction by its first factor
                for (g, r) in rows_c {
                    if c.intersect(g).is_subset(e) {
                        let q = r / p;
                        changed |= put(&mut entries, &c2, g, q.clone())?;
                        changed |= put(&mut entries, &c2, &g.union(&e.complement()), q)?;
                    }
                }
            }

            if entries.len() > CLOSURE_CAP {
                return Err(invalid("closure exceeded its growth cap"));
            }
            if !changed {
                break;
            }
        }
        Ok(EventTable {
            space: self.space.clone(),
            root_event: self.root_event.clone(),
            entries,
        })
    }

    /// Completeness: (i) each condition's defined targets are closed under
    /// intersection; (ii) whenever one condition properly refines another,
    /// the coarser condition defines some target carving out the finer one.
    pub fn is_complete(&self) -> bool {
        self.completeness_gap().is_none()
    }

    /// The first completeness failure, or `None` when complete.
    pub fn completeness_gap(&self) -> Option<String> {
        let conds: Vec<Event> = self.conditions().into_iter().collect();
        for c in &conds {
            let items = self.targets_at(c);
            for (e1, _) in &items {
                for (e2, _) in &items {
                    let meet = e1.intersect(e2);
                    if self.get(c, &meet).is_none() {
                        return Some(format!(
                            "under {c}: both {e1} and {e2} are defined but their \
                             conjunction {meet} is not"
                        ));
                    }
                }
            }
        }
        for c1 in &conds {
            for c2 in &conds {
                if c2 == c1 || !c2.is_subset(c1) {
                    continue;
                }
                let defined = self
                    .targets_at(c1)
                    .iter()
                    .any(|(e, _)| &e.intersect(c1) == c2);
                if !defined {
                    return Some(format!(
                        "conditions {c1} and {c2} are nested, but no target defined \
                         under {c1} carves out {c2}"
                    ));
                }
            }
        }
        None
    }

    /// The family of target events defined under the given antecedent. The
    /// closure rules guarantee a Dynkin system: the full event is present,
    /// and the family is closed under complements within the condition's
    /// class and under disjoint unions.
    pub fn dynkin_domain(&self, x: &Antecedent) -> Result<SetFamily, InductiveError> {
        let ex = x.event(&self.space)?;
        if !self.conditions().contains(&ex) {
            return Err(invalid(format!("{ex} is not among the table's conditions")));
        }
        let n = self.space.outcome_count();
        let targets: Vec<Event> =
            self.targets_at(&ex).into_iter().map(|(e, _)| e.clone()).collect();
        Ok(SetFamily::new(n, targets)?)
    }
}

impl fmt::Display for EventTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((c, e), v) in &self.entries {
            writeln!(f, "P({e} | {c}) = {v}")?;
        }
        Ok(())
    }
}

// ------------------------------------------------------------- satisfaction

/// Does the measure satisfy the statement? The antecedent splits into an
/// almost-sure theory part and a remainder formula; dropping almost-sure
/// conjuncts moves the remainder's event by a null set only, so checking the
/// whole conjunction (and, when the root is almost sure, the extras alone)
/// decides every admissible split.
pub fn satisfies(
    atoms: &AtomSpace,
    space: &FiniteProbSpace,
    stmt: &InductiveStatement,
) -> Result<bool, InductiveError> {
    if space.outcome_count() != atoms.outcome_count() {
        return Err(invalid("space and atom space disagree on outcome count"));
    }
    let bar = space.completion();
    let phi = atoms.event_of(&stmt.consequent)?;
    let mut candidates: Vec<Event> = Vec::with_capacity(2);
    let mut root_sure = true;
    for th in &stmt.antecedent.root {
        root_sure &= bar.measure(&atoms.event_of(th)?) == Some(Rat::one());
    }
    if root_sure {
        candidates.push(atoms.event_of_all(&stmt.antecedent.extras)?);
    }
    candidates.push(stmt.antecedent.event(atoms)?);
    for psi in candidates {
        let den = bar.measure(&psi);
        let num = bar.measure(&phi.intersect(&psi));
        if let (Some(d), Some(m)) = (den, num) {
            if d.is_positive() && m / &d == stmt.prob {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

// ------------------------------------------------------------- independence

/// Are the formulas jointly independent given the antecedent in this
/// measure — does the conditional probability of every conjunction factor
/// into the product of its members'? Errors when any of those conditionals
/// is undefined.
pub fn independent_in(
    atoms: &AtomSpace,
    space: &FiniteProbSpace,
    x: &Antecedent,
    phis: &[Formula],
) -> Result<bool, InductiveError> {
    if space.outcome_count() != atoms.outcome_count() {
        return Err(invalid("space and atom space disagree on outcome count"));
    }
    if phis.len() > 16 {
        return Err(invalid("too many formulas for subset enumeration"));
    }
    let bar = space.completion();
    let ex = x.event(atoms)?;
    let mx = bar.measure(&ex).ok_or_else(|| {
        InductiveError::Undefined("the antecedent event is not measurable".into())
    })?;
    if !mx.is_positive() {
        return Err(InductiveError::Undefined(
            "the antecedent event has measure zero".into(),
        ));
    }
    let evs: Vec<Event> = phis
        .iter()
        .map(|f| atoms.event_of(f))
        .collect::<Result<_, _>>()?;
    let m = phis.len();
    let mut cond = vec![Rat::one(); 1 << m];
    for (mask, slot) in cond.iter_mut().enumerate().skip(1) {
        let mut inter = ex.clone();
        for (i, ev) in evs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                inter = inter.intersect(ev);
            }
        }
        let mi = bar.measure(&inter).ok_or_else(|| {
            InductiveError::Undefined(format!(
                "the conjunction event {inter} is not measurable"
            ))
        })?;
        *slot = mi / &mx;
    }
    for mask in 1usize..1 << m {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut prod = Rat::one();
        for i in 0..m {
            if mask & (1 << i) != 0 {
                prod = &prod * &cond[1 << i];
            }
        }
        if cond[mask] != prod {
            return Ok(false);
        }
    }
    Ok(true)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn unite(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

/// Evaluate a query under the unique measure that gives each marginal
/// formula its stated probability and makes variable-disjoint marginals
/// independent. Independence is a nonlinear constraint, so instead of a
/// solver the product measure is built directly: root axioms and marginals
/// partition the variables into blocks, each block's distribution must be
/// pinned uniquely by its own constraints, and the blocks multiply.
pub fn derive_under_independence(
    decls: &PvDecls,
    root: &[Formula],
    marginals: &[(Formula, Rat)],
    query: &Formula,
) -> Result<DeriveResult, InductiveError> {
    for (_, p) in marginals {
        if !p.in_unit() {
            return Err(InductiveError::BadProb(p.clone()));
        }
    }
    // marginal formulas own their variables
    let var_sets: Vec<BTreeSet<PropVar>> = marginals.iter().map(|(f, _)| f.vars()).collect();
    for (i, a) in var_sets.iter().enumerate() {
        for b in var_sets.iter().skip(i + 1) {
            if let Some(v) = a.intersection(b).next() {
                return Err(InductiveError::Overlap(v.as_str().to_string()));
            }
        }
    }
    let closed_truth = |f: &Formula| -> Result<bool, InductiveError> {
        let empty: [(PropVar, bool); 0] = [];
        Ok(StrictModel::new(empty).eval(f)?)
    };
    // variable-free constraints are settled outright
    for (f, p) in marginals {
        if f.vars().is_empty() {
            let want = if closed_truth(f)? { Rat::one() } else { Rat::zero() };
            if *p != want {
                return Ok(DeriveResult::Inconsistent);
            }
        }
    }
    for ax in root {
        if ax.vars().is_empty() && !closed_truth(ax)? {
            return Ok(DeriveResult::Inconsistent);
        }
    }

    // glue variables into blocks: marginals and root axioms bind their own
    let k = decls.len();
    let mut uf = UnionFind::new(k);
    let mut constrained: BTreeSet<usize> = BTreeSet::new();
    let formula_vars = |f: &Formula| -> Result<Vec<usize>, InductiveError> {
        f.vars()
            .iter()
            .map(|v| {
                decls
                    .index_of(v)
                    .ok_or_else(|| invalid(format!("undeclared variable {}", v.as_str())))
            })
            .collect()
    };
    let mut bind = Vec::new();
    for (f, _) in marginals {
        bind.push(formula_vars(f)?);
    }
    for ax in root {
        bind.push(formula_vars(ax)?);
    }
    for idxs in &bind {
        for w in idxs.windows(2) {
            uf.unite(w[0], w[1]);
        }
        constrained.extend(idxs.iter().copied());
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &i in &constrained {
        blocks.entry(uf.find(i)).or_default().push(i);
    }

    struct BlockDist {
        vars: Vec<usize>,
        support: Vec<(usize, Rat)>,
    }
    let mut dists: Vec<BlockDist> = Vec::with_capacity(blocks.len());
    let mut tuples: u64 = 1;
    for (root_id, vars) in &blocks {
        let keep: BTreeSet<PropVar> =
            vars.iter().map(|&i| decls.name(i).clone()).collect();
        let sub = decls.restrict(&keep);
        let atoms = AtomSpace::new(sub)?;
        let ln = atoms.outcome_count();
        let mut sys = LinearSystem::new(ln);
        sys.push(LinearConstraint::eq(vec![Rat::one(); ln], Rat::one()));
        for ((f, p), idxs) in marginals.iter().zip(&bind) {
            if idxs.first().map(|&i| uf.find(i)) == Some(*root_id) {
                sys.push(LinearConstraint::eq(
                    indicator(ln, &atoms.event_of(f)?),
                    p.clone(),
                ));
            }
        }
        for (ax, idxs) in root.iter().zip(bind.iter().skip(marginals.len())) {
            if idxs.first().map(|&i| uf.find(i)) == Some(*root_id) {
                sys.push(LinearConstraint::eq(
                    indicator(ln, &atoms.event_of(ax)?),
                    Rat::one(),
                ));
            }
        }
        if sys.feasible_point()?.is_none() {
            return Ok(DeriveResult::Inconsistent);
        }
        // the block law must be pinned uniquely, outcome by outcome
        let mut masses = Vec::with_capacity(ln);
        for i in 0..ln {
            let mut obj = vec![Rat::zero(); ln];
            obj[i] = Rat::one();
            let hi = match sys.maximize(&obj)? {
                LpOutcome::Optimal { value, .. } => value,
                _ => return Err(InductiveError::Lp(LpError::Internal)),
            };
            let lo = match sys.minimize(&obj)? {
                LpOutcome::Optimal { value, .. } => value,
                _ => return Err(InductiveError::Lp(LpError::Internal)),
            };
            if hi != lo {
                return Err(InductiveError::Underdetermined(format!(
                    "the marginals leave the joint law of block {{{}}} open",
                    vars.iter()
                        .map(|&i| decls.name(i).as_str().to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                )));
            }
            masses.push(hi);
        }
        let support: Vec<(usize, Rat)> = masses
            .into_iter()
            .enumerate()
            .filter(|(_, m)| m.is_positive())
            .collect();
        tuples = tuples.saturating_mul(support.len() as u64);
        dists.push(BlockDist { vars: vars.clone(), support });
    }
    if tuples > PRODUCT_SUPPORT_CAP {
        return Err(invalid("product support too large to enumerate"));
    }

    let atoms = AtomSpace::new(decls.clone())?;
    let qev = atoms.event_of(query)?;
    // the query may not lean on variables the constraints never mention
    for v in query.vars() {
        let i = decls
            .index_of(&v)
            .ok_or_else(|| invalid(format!("undeclared variable {}", v.as_str())))?;
        if constrained.contains(&i) {
            continue;
        }
        let bit = 1usize << i;
        let depends =
            (0..atoms.outcome_count()).any(|w| qev.contains(w) != qev.contains(w ^ bit));
        if depends {
            return Err(InductiveError::Underdetermined(format!(
                "the query depends on the unconstrained variable {}",
                v.as_str()
            )));
        }
    }

    // walk the product of block supports
    fn walk(dists: &[BlockDist], bi: usize, idx: usize, mass: Rat, qev: &Event, acc: &mut Rat) {
        if bi == dists.len() {
            if qev.contains(idx) {
                *acc = &*acc + &mass;
            }
            return;
        }
        for (a, m) in &dists[bi].support {
            let mut nidx = idx;
            for (j, &g) in dists[bi].vars.iter().enumerate() {
                if a & (1 << j) != 0 {
                    nidx |= 1 << g;
                }
            }
            walk(dists, bi + 1, nidx, &mass * m, qev, acc);
        }
    }
    let mut total = Rat::zero();
    walk(&dists, 0, 0, Rat::one(), &qev, &mut total);
    Ok(DeriveResult::Forced(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn v(name: &str) -> Formula {
        Formula::var(name)
    }

    fn decls(names: &[&str]) -> PvDecls {
        PvDecls::new(names.iter().copied()).unwrap()
    }

    fn stmt(root: &[Formula], extras: &[Formula], phi: Formula, p: Rat) -> InductiveStatement {
        InductiveStatement::new(
            Antecedent::new(root.to_vec(), extras.to_vec()),
            phi,
            p,
        )
        .unwrap()
    }

    /// Two propositions and their biconditional, all at probability q, over
    /// an empty root.
    fn linked_pair_problem(q: Rat) -> Problem {
        let d = decls(&["r1", "r2"]);
        let root: Vec<Formula> = vec![];
        let sts = vec![
            stmt(&root, &[], v("r1"), q.clone()),
            stmt(&root, &[], v("r2"), q.clone()),
            stmt(&root, &[], Formula::iff(v("r1"), v("r2")), q),
        ];
        Problem::new(d, root, sts).unwrap()
    }

    /// Three variables; r1 pinned at 1/2 outright, r2 certain given r3, and
    /// r3 itself unconstrained.
    fn partially_constrained_problem() -> Problem {
        let d = decls(&["r1", "r2", "r3"]);
        let root: Vec<Formula> = vec![];
        let sts = vec![
            stmt(&root, &[], v("r1"), rat(1, 2)),
            stmt(&root, &[v("r3")], v("r2"), Rat::one()),
        ];
        Problem::new(d, root, sts).unwrap()
    }

    #[test]
    fn collapse_merges_equivalent_consequents() {
        let d = decls(&["r1", "r2"]);
        let root: Vec<Formula> = vec![];
        let sts = vec![
            stmt(&root, &[], v("r1"), rat(1, 2)),
            stmt(&root, &[], Formula::not(Formula::not(v("r1"))), rat(1, 2)),
        ];
        let p = Problem::new(d, root, sts).unwrap();
        let table = p.collapse().unwrap();
        assert_eq!(table.len(), 1);
    }

    #[test]
    fn collapse_rejects_conflicting_values() {
        let d = decls(&["r1", "r2"]);
        let root: Vec<Formula> = vec![];
        let sts = vec![
            stmt(&root, &[], v("r1"), rat(1, 2)),
            stmt(&root, &[], Formula::not(Formula::not(v("r1"))), rat(1, 3)),
        ];
        let p = Problem::new(d, root, sts).unwrap();
        match p.collapse() {
            Err(InductiveError::Conflict { first, second }) => {
                assert!(first.contains("1/2"), "{first}");
                assert!(second.contains("1/3"), "{second}");
            }
            other => panic!("expected a conflict, got {other:?}"),
        }
    }

    #[test]
    fn collapse_keeps_three_linked_entries() {
        let table = linked_pair_problem(rat(1, 2)).collapse().unwrap();
        assert_eq!(table.len(), 3);
        let full = Event::full(4);
        let a1 = Event::from_indices(4, &[1, 3]);
        assert_eq!(table.get(&full, &a1), Some(&rat(1, 2)));
    }

    #[test]
    fn statement_probability_must_be_in_unit_interval() {
        let a = Antecedent::root_only(vec![]);
        assert!(matches!(
            InductiveStatement::new(a, v("r1"), rat(3, 2)),
            Err(InductiveError::BadProb(_))
        ));
    }

    #[test]
    fn satisfies_unconditional_half() {
        let d = decls(&["r1"]);
        let atoms = AtomSpace::new(d).unwrap();
        let space =
            FiniteProbSpace::from_atom_masses(vec![rat(1, 2), rat(1, 2)]).unwrap();
        let st = stmt(&[], &[], v("r1"), rat(1, 2));
        assert!(satisfies(&atoms, &space, &st).unwrap());
        let st = stmt(&[], &[], v("r1"), rat(1, 3));
        assert!(!satisfies(&atoms, &space, &st).unwrap());
    }

    #[test]
    fn satisfies_fails_on_unmeasurable_target() {
        // σ-algebra generated by r1 alone: the conjunction r1 ∧ r2 splits a
        // positive block, so its probability does not exist at any value
        let d = decls(&["r1", "r2"]);
        let atoms = AtomSpace::new(d).unwrap();
        let a1 = Event::from_indices(4, &[1, 3]);
        let labels: Vec<String> = (0..4).map(|i| format!("w{i}")).collect();
        let space = FiniteProbSpace::new(
            labels,
            vec![
                (Event::empty(4), Rat::zero()),
                (a1.clone(), rat(1, 2)),
                (a1.complement(), rat(1, 2)),
                (Event::full(4), Rat::one()),
            ],
        )
        .unwrap();
        for p in [Rat::zero(), rat(1, 4), rat(1, 2), Rat::one()] {
            let st = stmt(&[], &[], Formula::and(vec![v("r1"), v("r2")]), p);
            assert!(!satisfies(&atoms, &space, &st).unwrap());
        }
        // while r1 itself is satisfied at 1/2
        let st = stmt(&[], &[], v("r1"), rat(1, 2));
        assert!(satisfies(&atoms, &space, &st).unwrap());
    }

    #[test]
    fn satisfies_three_balls_arrangement() {
        // three balls, each white or black, at least one of each color;
        // uniform over the six admissible arrangements
        let d = decls(&["c1", "c2", "c3"]);
        let atoms = AtomSpace::new(d).unwrap();
        let root = vec![
            Formula::or(vec![v("c1"), v("c2"), v("c3")]),
            Formula::not(Formula::and(vec![v("c1"), v("c2"), v("c3")])),
        ];
        let sixth = rat(1, 6);
        let mut masses = vec![sixth.clone(); 8];
        masses[0] = Rat::zero();
        masses[7] = Rat::zero();
        let space = FiniteProbSpace::from_atom_masses(masses).unwrap();
        let arrangement = Formula::and(vec![
            v("c1"),
            Formula::not(v("c2")),
            Formula::not(v("c3")),
        ]);
        let st = stmt(&root, &[], arrangement.clone(), sixth);
        assert!(satisfies(&atoms, &space, &st).unwrap());
        let st = stmt(&root, &[], arrangement, rat(1, 8));
        assert!(!satisfies(&atoms, &space, &st).unwrap());
    }

    #[test]
    fn model_tables_pass_every_rule() {
        let d = decls(&["a", "b"]);
        let atoms = AtomSpace::new(d).unwrap();
        for masses in [
            vec![rat(1, 4); 4],
            vec![rat(1, 2), rat(1, 3), rat(1, 12), rat(1, 12)],
            vec![rat(1, 2), Rat::zero(), Rat::zero(), rat(1, 2)],
        ] {
            let space = FiniteProbSpace::from_atom_masses(masses).unwrap();
            let table = EventTable::from_space(&atoms, &space).unwrap();
            let report = table.check_rules();
            assert!(report.is_empty(), "unexpected violations: {report:?}");
        }
    }

    #[test]
    fn check_rules_flags_uncertain_tautology() {
        let d = decls(&["a", "b"]);
        let root: Vec<Formula> = vec![];
        let sts = vec![stmt(&root, &[], Formula::implies(v("a"), v("a")), rat(1, 2))];
        let table = Problem::new(d, root, sts).unwrap().collapse().unwrap();
        let report = table.check_rules();
        assert!(report.iter().any(|r| r.rule == CoherenceRule::Entailment), "{report:?}");
    }

    #[test]
    fn check_rules_flags_broken_additivity() {
        // root rules out a ∧ b, so the union must carry 1/2 + 1/2
        let d = decls(&["a", "b"]);
        let root = vec![Formula::not(Formula::and(vec![v("a"), v("b")]))];
        let sts = vec![
            stmt(&root, &[], v("a"), rat(1, 2)),
            stmt(&root, &[], v("b"), rat(1, 2)),
            stmt(&root, &[], Formula::or(vec![v("a"), v("b")]), rat(3, 4)),
        ];
        let table = Problem::new(d, root, sts).unwrap().collapse().unwrap();
        let report = table.check_rules();
        assert!(report.iter().any(|r| r.rule == CoherenceRule::Additivity), "{report:?}");
    }

    #[test]
    fn closure_fills_negation() {
        let d = decls(&["a", "b"]);
        let root: Vec<Formula> = vec![];
        let sts = vec![stmt(&root, &[], v("a"), rat(1, 3))];
        let p = Problem::new(d, root, sts).unwrap();
        let closed = p.collapse().unwrap().closure().unwrap();
        let full = Event::full(4);
        let ea = Event::from_indices(4, &[1, 3]);
        assert_eq!(closed.get(&full, &ea.complement()), Some(&rat(2, 3)));
    }

    #[test]
    fn closure_pins_all_atoms_of_the_linked_pair() {
        // adding the conjunction at 1/4 pins every atom at 1/4
        let p = linked_pair_problem(rat(1, 2));
        let mut table = p.collapse().unwrap();
        let full = Event::full(4);
        let conj = Event::from_indices(4, &[3]);
        table.assert_entry(full.clone(), conj, rat(1, 4)).unwrap();
        let closed = table.closure().unwrap();
        for i in 0..4 {
            assert_eq!(
                closed.get(&full, &Event::singleton(4, i)),
                Some(&rat(1, 4)),
                "atom {i}"
            );
        }
    }

    #[test]
    fn closure_conditions_on_a_sure_event() {
        // P(b | T0) = 1 and P(a | T0, b) = p force P(a | T0) = p
        let d = decls(&["a", "b"]);
        let root: Vec<Formula> = vec![];
        let sts = vec![
            stmt(&root, &[], v("b"), Rat::one()),
            stmt(&root, &[v("b")], v("a"), rat(2, 5)),
        ];
        let p = Problem::new(d, root, sts).unwrap();
        let closed = p.collapse().unwrap().closure().unwrap();
        let full = Event::full(4);
        let ea = Event::from_indices(4, &[1, 3]);
        assert_eq!(closed.get(&full, &ea), Some(&rat(2, 5)));
    }

    #[test]
    fn closure_detects_contradictions() {
        let d = decls(&["a", "b"]);
        let root: Vec<Formula> = vec![];
        let sts = vec![
            stmt(&root, &[], v("a"), rat(1, 2)),
            stmt(&root, &[], Formula::not(v("a")), rat(1, 3)),
        ];
        let p = Problem::new(d, root, sts).unwrap();
        assert!(matches!(
            p.collapse().unwrap().closure(),
            Err(InductiveError::Contradiction(_))
        ));
    }

    #[test]
    fn closure_is_sound_on_sampled_vertices() {
        // every closure entry must hold at every vertex of the constraint
        // polytope whose condition has positive mass
        for p in [
            linked_pair_problem(rat(1, 2)),
            partially_constrained_problem(),
        ] {
            let closed = p.collapse().unwrap().closure().unwrap();
            let parts = p.lp_parts().unwrap();
            let n = parts.atoms.outcome_count();
            let mut state: u64 = 0x9e3779b97f4a7c15;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) % 11) as i64 - 5
            };
            for _ in 0..20 {
                let obj: Vec<Rat> = (0..n).map(|_| Rat::int(next())).collect();
                let point = match parts.sys.maximize(&obj).unwrap() {
                    LpOutcome::Optimal { point, .. } => point,
                    other => panic!("expected a vertex, got {other:?}"),
                };
                let mass = |e: &Event| e.iter().map(|i| &point[i]).sum::<Rat>();
                for (c, e, val) in closed.entries() {
                    let mc = mass(c);
                    if mc.is_positive() {
                        assert_eq!(
                            mass(&e.intersect(c)),
                            val * &mc,
                            "entry P({e} | {c}) = {val} fails at a vertex"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn model_table_is_complete_and_obeys_bayes() {
        let d = decls(&["a", "b"]);
        let atoms = AtomSpace::new(d).unwrap();
        let space = FiniteProbSpace::from_atom_masses(vec![
            rat(1, 2),
            rat(1, 3),
            rat(1, 12),
            rat(1, 12),
        ])
        .unwrap();
        let table = EventTable::from_space(&atoms, &space).unwrap();
        assert!(table.is_complete(), "{:?}", table.completeness_gap());
        // P(e | c) P(f | c∩e) = P(f | c) P(e | c∩f) whenever all four exist
        let conds = table.conditions();
        for c in &conds {
            for (e, pe) in table.targets_at(c) {
                for (f, pf) in table.targets_at(c) {
                    let ce = c.intersect(e);
                    let cf = c.intersect(f);
                    if let (Some(q1), Some(q2)) = (table.get(&ce, f), table.get(&cf, e)) {
                        assert_eq!(pe * q1, pf * q2);
                    }
                }
            }
        }
        // monotone along relative entailment
        for c in &conds {
            for (e1, p1) in table.targets_at(c) {
                for (e2, p2) in table.targets_at(c) {
                    if c.intersect(e1).is_subset(e2) {
                        assert!(p1 <= p2);
                    }
                }
            }
        }
    }

    #[test]
    fn linked_pair_table_is_not_complete() {
        let table = linked_pair_problem(rat(1, 2)).collapse().unwrap();
        let gap = table.completeness_gap().expect("conjunctions are missing");
        assert!(gap.contains("conjunction"), "{gap}");
        let closed = table.closure().unwrap();
        assert!(!closed.is_complete());
    }

    #[test]
    fn nested_antecedent_without_defined_target_is_incomplete() {
        let table = partially_constrained_problem().collapse().unwrap();
        let gap = table.completeness_gap().expect("the finer condition is never carved out");
        assert!(gap.contains("nested"), "{gap}");
    }

    #[test]
    fn consistency_of_the_linked_pair() {
        // q = 1/2 has the uniform witness; q = 1/4 forces a negative mass
        let w = linked_pair_problem(rat(1, 2)).consistency().unwrap().unwrap();
        assert_eq!(w.atom_masses().unwrap(), vec![rat(1, 4); 4]);
        assert!(linked_pair_problem(rat(1, 4)).consistency().unwrap().is_none());
    }

    #[test]
    fn consistency_with_certain_and_uncertain_statements() {
        // r1 at 1/2, r2 and r3 certain: half the mass where everything
        // holds, half where only r1 fails
        let d = decls(&["r1", "r2", "r3"]);
        let root: Vec<Formula> = vec![];
        let sts = vec![
            stmt(&root, &[], v("r1"), rat(1, 2)),
            stmt(&root, &[], v("r2"), Rat::one()),
            stmt(&root, &[], v("r3"), Rat::one()),
        ];
        let p = Problem::new(d.clone(), root, sts).unwrap();
        let w = p.consistency().unwrap().expect("satisfiable");
        let atoms = AtomSpace::new(d).unwrap();
        for st in p.statements() {
            assert!(satisfies(&atoms, &w, st).unwrap(), "witness misses {st}");
        }
    }

    #[test]
    fn derive_forces_the_linked_conjunction() {
        let p = linked_pair_problem(rat(1, 2));
        let x = p.antecedent(vec![]);
        let phi = Formula::and(vec![v("r1"), v("r2")]);
        assert_eq!(p.derive(&x, &phi).unwrap(), DeriveResult::Forced(rat(1, 4)));
        assert_eq!(p.measurability_forced(&x, &phi).unwrap(), Some(true));
        // and the inconsistent variant reports so
        let p = linked_pair_problem(rat(1, 4));
        assert_eq!(p.derive(&x, &phi).unwrap(), DeriveResult::Inconsistent);
    }

    #[test]
    fn derive_leaves_the_free_variable_open() {
        let p = partially_constrained_problem();
        let x = p.antecedent(vec![]);
        let atoms = p.atom_space().unwrap();
        match p.derive(&x, &v("r3")).unwrap() {
            DeriveResult::Interval {
                lower,
                upper,
                lower_attained,
                upper_attained,
                lower_witness,
                upper_witness,
            } => {
                assert_eq!((lower, upper), (Rat::zero(), Rat::one()));
                // μ(r3) > 0 is required by the conditional statement, so the
                // lower bound is approached but never reached
                assert!(!lower_attained);
                assert!(upper_attained);
                for st in p.statements() {
                    assert!(satisfies(&atoms, &lower_witness, st).unwrap());
                    assert!(satisfies(&atoms, &upper_witness, st).unwrap());
                }
                let ev = atoms.event_of(&v("r3")).unwrap();
                let lo = lower_witness.completion().measure(&ev).unwrap();
                let hi = upper_witness.completion().measure(&ev).unwrap();
                assert!(lo < hi, "witnesses must realize distinct values");
            }
            other => panic!("expected an interval, got {other:?}"),
        }
    }

    #[test]
    fn derive_with_no_statements_is_certain_on_tautologies() {
        let d = decls(&["a"]);
        let p = Problem::new(d, vec![], vec![]).unwrap();
        let x = p.antecedent(vec![]);
        let top = Formula::or(vec![v("a"), Formula::not(v("a"))]);
        assert_eq!(p.derive(&x, &top).unwrap(), DeriveResult::Forced(Rat::one()));
    }

    #[test]
    fn derive_undefined_on_a_refuted_antecedent() {
        let d = decls(&["a", "b"]);
        let root: Vec<Formula> = vec![];
        let sts = vec![stmt(&root, &[], Formula::not(v("a")), Rat::one())];
        let p = Problem::new(d, root, sts).unwrap();
        let x = p.antecedent(vec![v("a")]);
        assert_eq!(p.derive(&x, &v("b")).unwrap(), DeriveResult::Undefined);
    }

    #[test]
    fn forced_values_satisfy_at_the_witness() {
        let p = linked_pair_problem(rat(1, 2));
        let atoms = p.atom_space().unwrap();
        let w = p.consistency().unwrap().unwrap();
        let phi = Formula::and(vec![v("r1"), v("r2")]);
        let x = p.antecedent(vec![]);
        if let DeriveResult::Forced(val) = p.derive(&x, &phi).unwrap() {
            let st = InductiveStatement::new(x, phi, val).unwrap();
            assert!(satisfies(&atoms, &w, &st).unwrap());
        } else {
            panic!("expected a forced value");
        }
    }

    #[test]
    fn dynkin_domain_of_the_linked_pair_closure() {
        let p = linked_pair_problem(rat(1, 2));
        let closed = p.collapse().unwrap().closure().unwrap();
        let fam = closed.dynkin_domain(&p.antecedent(vec![])).unwrap();
        // Ω, ∅, the three statement events, and their complements
        assert_eq!(fam.len(), 8);
        assert!(fam.is_dynkin());
        assert!(!fam.is_sigma_algebra());
        let a1 = Event::from_indices(4, &[1, 3]);
        let a2 = Event::from_indices(4, &[2, 3]);
        assert!(fam.contains(&a1) && fam.contains(&a2));
        assert!(!fam.contains(&a1.intersect(&a2)));
    }

    #[test]
    fn dynkin_domain_of_a_model_table_is_the_power_set() {
        let d = decls(&["a", "b"]);
        let atoms = AtomSpace::new(d).unwrap();
        let space = FiniteProbSpace::from_atom_masses(vec![
            rat(1, 2),
            rat(1, 4),
            rat(1, 8),
            rat(1, 8),
        ])
        .unwrap();
        let table = EventTable::from_space(&atoms, &space).unwrap();
        let fam = table.dynkin_domain(&Antecedent::root_only(vec![])).unwrap();
        assert_eq!(fam.len(), 16);
        assert!(fam.is_sigma_algebra());
    }

    #[test]
    fn dynkin_domain_of_a_single_statement_closure() {
        let d = decls(&["a", "b"]);
        let root: Vec<Formula> = vec![];
        let sts = vec![stmt(&root, &[], v("a"), rat(1, 3))];
        let p = Problem::new(d, root, sts).unwrap();
        let closed = p.collapse().unwrap().closure().unwrap();
        let fam = closed.dynkin_domain(&p.antecedent(vec![])).unwrap();
        let ea = Event::from_indices(4, &[1, 3]);
        assert_eq!(fam.len(), 4);
        assert!(fam.is_dynkin());
        assert!(fam.contains(&ea) && fam.contains(&ea.complement()));
    }

    #[test]
    fn independence_of_fair_flips() {
        let d = decls(&["h1", "h2", "h3"]);
        let atoms = AtomSpace::new(d).unwrap();
        let space = FiniteProbSpace::from_atom_masses(vec![rat(1, 8); 8]).unwrap();
        let x = Antecedent::root_only(vec![]);
        assert!(independent_in(&atoms, &space, &x, &[v("h1"), v("h2"), v("h3")]).unwrap());
        // a nondegenerate event is never independent of itself
        assert!(!independent_in(&atoms, &space, &x, &[v("h1"), v("h1")]).unwrap());
        // degenerate probabilities are independent of everything
        let top = Formula::or(vec![v("h2"), Formula::not(v("h2"))]);
        assert!(independent_in(&atoms, &space, &x, &[v("h1"), top]).unwrap());
    }

    #[test]
    fn independence_errors_on_measure_zero_antecedents() {
        let d = decls(&["h1", "h2"]);
        let atoms = AtomSpace::new(d).unwrap();
        let space = FiniteProbSpace::from_atom_masses(vec![
            rat(1, 2),
            rat(1, 2),
            Rat::zero(),
            Rat::zero(),
        ])
        .unwrap();
        let x = Antecedent::root_only(vec![v("h2")]);
        assert!(matches!(
            independent_in(&atoms, &space, &x, &[v("h1")]),
            Err(InductiveError::Undefined(_))
        ));
    }

    /// Ten two-sided coin flips: variables fi^0/fi^1 for tails/heads, each
    /// marginal 1/2, and per-flip root axioms tying the pair together.
    fn ten_flips() -> (PvDecls, Vec<Formula>, Vec<(Formula, Rat)>) {
        let names: Vec<String> = (1..=10)
            .flat_map(|i| [format!("f{i}^0"), format!("f{i}^1")])
            .collect();
        let d = PvDecls::new(names).unwrap();
        let mut root = Vec::new();
        let mut marginals = Vec::new();
        for i in 1..=10 {
            let t = v(&format!("f{i}^0"));
            let h = v(&format!("f{i}^1"));
            root.push(Formula::or(vec![t.clone(), h.clone()]));
            marginals.push((t, rat(1, 2)));
            marginals.push((h, rat(1, 2)));
        }
        (d, root, marginals)
    }

    #[test]
    fn product_measure_of_four_flips() {
        let (d, root, marginals) = ten_flips();
        let query = Formula::and(vec![
            v("f1^0"),
            v("f3^1"),
            v("f5^0"),
            v("f7^1"),
        ]);
        let r = derive_under_independence(&d, &root, &marginals, &query).unwrap();
        assert_eq!(r, DeriveResult::Forced(rat(1, 16)));
    }

    #[test]
    fn product_measure_of_a_full_miss() {
        // the negation of one full outcome sequence
        let (d, root, marginals) = ten_flips();
        let all: Vec<Formula> = (1..=10).map(|i| v(&format!("f{i}^1"))).collect();
        let query = Formula::not(Formula::and(all));
        let r = derive_under_independence(&d, &root, &marginals, &query).unwrap();
        assert_eq!(r, DeriveResult::Forced(rat(1023, 1024)));
    }

    #[test]
    fn product_measure_trivial_query() {
        let d = decls(&["a"]);
        let top = Formula::or(vec![v("a"), Formula::not(v("a"))]);
        let r = derive_under_independence(&d, &[], &[], &top).unwrap();
        assert_eq!(r, DeriveResult::Forced(Rat::one()));
    }

    #[test]
    fn product_measure_rejects_overlapping_marginals() {
        let d = decls(&["a", "b"]);
        let marginals = vec![
            (v("a"), rat(1, 2)),
            (Formula::and(vec![v("a"), v("b")]), rat(1, 4)),
        ];
        assert!(matches!(
            derive_under_independence(&d, &[], &marginals, &v("b")),
            Err(InductiveError::Overlap(name)) if name == "a"
        ));
    }

    #[test]
    fn product_measure_flags_unconstrained_queries() {
        let d = decls(&["a", "b"]);
        let marginals = vec![(v("a"), rat(1, 2))];
        assert!(matches!(
            derive_under_independence(&d, &[], &marginals, &v("b")),
            Err(InductiveError::Underdetermined(_))
        ));
    }

    // ---------------------------------------------------------- the oracle

    /// All probability values of `query` given `x` over rational measures
    /// with the given denominators, restricted to measures satisfying the
    /// problem exactly (positive conditions included). Also reports whether
    /// any satisfying measure was seen at all, query aside.
    fn enumerate_values(
        p: &Problem,
        x: &Antecedent,
        query: &Formula,
        denoms: &[u64],
    ) -> (bool, BTreeSet<Rat>) {
        let atoms = p.atom_space().unwrap();
        let n = atoms.outcome_count();
        let root_event = atoms.event_of_all(p.root()).unwrap();
        let constraints: Vec<(Vec<usize>, Vec<usize>, u64, u64)> = p
            .statements()
            .iter()
            .map(|st| {
                let cond = st.antecedent().event(&atoms).unwrap();
                let num = atoms.event_of(st.consequent()).unwrap().intersect(&cond);
                let (a, b) = (st.prob().numer(), st.prob().denom());
                (
                    num.iter().collect(),
                    cond.iter().collect(),
                    u64::try_from(a).unwrap(),
                    u64::try_from(b).unwrap(),
                )
            })
            .collect();
        let ex: Vec<usize> = x.event(&atoms).unwrap().iter().collect();
        let tgt: Vec<usize> = atoms
            .event_of(query)
            .unwrap()
            .intersect(&x.event(&atoms).unwrap())
            .iter()
            .collect();
        let rootset: Vec<usize> = root_event.iter().collect();

        let mut any = false;
        let mut values = BTreeSet::new();
        let mut masses = vec![0u64; n];
        fn rec(
            masses: &mut Vec<u64>,
            i: usize,
            left: u64,
            d: u64,
            ctx: &mut dyn FnMut(&[u64]),
        ) {
            if i + 1 == masses.len() {
                masses[i] = left;
                ctx(masses);
                return;
            }
            for m in 0..=left {
                masses[i] = m;
                rec(masses, i + 1, left - m, d, ctx);
            }
        }
        for &d in denoms {
            let sum = |set: &[usize], ms: &[u64]| set.iter().map(|&i| ms[i]).sum::<u64>();
            let mut visit = |ms: &[u64]| {
                if sum(&rootset, ms) != d {
                    return;
                }
                for (num, cond, a, b) in &constraints {
                    let cs = sum(cond, ms);
                    if cs == 0 || b * sum(num, ms) != a * cs {
                        return;
                    }
                }
                any = true;
                let den = sum(&ex, ms);
                if den > 0 {
                    values.insert(Rat::new(
                        i64::try_from(sum(&tgt, ms)).unwrap(),
                        i64::try_from(den).unwrap(),
                    ));
                }
            };
            rec(&mut masses, 0, d, d, &mut visit);
        }
        (any, values)
    }

    #[test]
    fn derive_matches_enumeration_on_fixed_cases() {
        let denoms = [1, 2, 3, 4, 6, 8, 12, 16];
        // forced, inconsistent, and interval cases side by side
        let cases: Vec<(Problem, Vec<Formula>, Formula)> = vec![
            (linked_pair_problem(rat(1, 2)), vec![], Formula::and(vec![v("r1"), v("r2")])),
            (linked_pair_problem(rat(1, 4)), vec![], Formula::and(vec![v("r1"), v("r2")])),
            (
                Problem::new(
                    decls(&["a", "b"]),
                    vec![],
                    vec![stmt(&[], &[], v("a"), rat(3, 4))],
                )
                .unwrap(),
                vec![],
                v("a"),
            ),
            (
                Problem::new(
                    decls(&["a", "b"]),
                    vec![],
                    vec![stmt(&[], &[], v("a"), rat(1, 2))],
                )
                .unwrap(),
                vec![],
                Formula::and(vec![v("a"), v("b")]),
            ),
            (
                Problem::new(decls(&["a", "b"]), vec![], vec![]).unwrap(),
                vec![v("a")],
                v("b"),
            ),
        ];
        for (p, extras, query) in cases {
            let x = p.antecedent(extras);
            let (any, values) = enumerate_values(&p, &x, &query, &denoms);
            match p.derive(&x, &query).unwrap() {
                DeriveResult::Inconsistent => {
                    assert!(!any, "enumeration found a measure for {query}");
                }
                DeriveResult::Undefined => {
                    assert!(any && values.is_empty());
                }
                DeriveResult::Forced(val) => {
                    assert!(values.contains(&val), "grid misses the forced {val}");
                    assert!(values.iter().all(|w| *w == val), "{values:?}");
                }
                DeriveResult::Interval { lower, upper, .. } => {
                    assert!(values.iter().all(|w| &lower <= w && w <= &upper));
                    assert!(values.len() > 1, "interval should show spread: {values:?}");
                }
            }
        }
    }

    fn pick_formula(sel: usize) -> Formula {
        match sel % 6 {
            0 => v("a"),
            1 => v("b"),
            2 => Formula::and(vec![v("a"), v("b")]),
            3 => Formula::or(vec![v("a"), v("b")]),
            4 => Formula::not(v("a")),
            _ => Formula::iff(v("a"), v("b")),
        }
    }

    fn pick_prob(sel: usize) -> Rat {
        match sel % 5 {
            0 => Rat::zero(),
            1 => rat(1, 4),
            2 => rat(1, 2),
            3 => rat(3, 4),
            _ => Rat::one(),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn derive_agrees_with_enumeration(
            specs in proptest::collection::vec((0usize..3, 0usize..6, 0usize..5), 0..3),
            qsel in 0usize..6,
            xsel in 0usize..3,
        ) {
            let d = decls(&["a", "b"]);
            let root: Vec<Formula> = vec![];
            let sts: Vec<InductiveStatement> = specs
                .iter()
                .map(|&(ext, csel, psel)| {
                    let extras: Vec<Formula> = match ext {
                        0 => vec![],
                        1 => vec![v("a")],
                        _ => vec![v("b")],
                    };
                    stmt(&root, &extras, pick_formula(csel), pick_prob(psel))
                })
                .collect();
            let p = Problem::new(d, root, sts).unwrap();
            let extras: Vec<Formula> = match xsel {
                0 => vec![],
                1 => vec![v("a")],
                _ => vec![v("b")],
            };
            let x = p.antecedent(extras);
            let query = pick_formula(qsel);
            let denoms = [1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64];
            let (any, values) = enumerate_values(&p, &x, &query, &denoms);
            match p.derive(&x, &query).unwrap() {
                DeriveResult::Inconsistent => prop_assert!(!any),
                DeriveResult::Undefined => prop_assert!(values.is_empty()),
                DeriveResult::Forced(val) => {
                    prop_assert!(values.iter().all(|w| *w == val),
                        "forced {val} vs grid {values:?}");
                }
                DeriveResult::Interval { lower, upper, lower_witness, upper_witness, .. } => {
                    prop_assert!(values.iter().all(|w| &lower <= w && w <= &upper),
                        "[{lower}, {upper}] vs grid {values:?}");
                    // both witnesses satisfy every statement
                    let atoms = p.atom_space().unwrap();
                    for st in p.statements() {
                        prop_assert!(satisfies(&atoms, &lower_witness, st).unwrap());
                        prop_assert!(satisfies(&atoms, &upper_witness, st).unwrap());
                    }
                }
            }
        }
    }
}
