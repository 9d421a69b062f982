//! Exact finite measure theory: probability spaces over a finite outcome
//! set, σ-algebra and Dynkin-system generation, completion, inner/outer
//! measure, and single-set measure extension.
//!
//! A σ-algebra on a finite Ω is the algebra of unions of a partition, so a
//! [`FiniteProbSpace`] stores that partition (its *blocks*) with one mass
//! per block; every other measurable set is resolved by additivity.
//! Families that are not algebras — Dynkin systems, whose failure to be
//! closed under conjunction is the whole point of the counterexamples this
//! module supports — carry explicit per-member values instead
//! ([`DynkinSpace`], [`extend_family_with_set`]). All arithmetic is exact
//! rational; there is no floating point in this module.

use crate::event::Event;
use crate::rat::Rat;
use crate::ratlp::{LinearConstraint, LinearSystem, LpOutcome};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Materialized σ-algebras are capped at 2^16 members.
pub const MAX_SIGMA_BLOCKS: usize = 16;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MeasureError {
    #[error("value {alpha} outside the feasible interval [{inner}, {outer}]")]
    OutOfRange { alpha: Rat, inner: Rat, outer: Rat },
    #[error("the measured family admits no additive extension")]
    NoExtension,
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> MeasureError {
    MeasureError::Invalid(msg.into())
}

// --------------------------------------------------------------- SetFamily

/// A deduplicated collection of events over a fixed finite Ω.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetFamily {
    space_len: usize,
    sets: Vec<Event>, // sorted, deduplicated
}

impl SetFamily {
    pub fn new<I>(space_len: usize, sets: I) -> Result<Self, MeasureError>
    where
        I: IntoIterator<Item = Event>,
    {
        let mut dedup = BTreeSet::new();
        for e in sets {
            if e.space_len() != space_len {
                return Err(invalid(format!(
                    "event over {} outcomes in a family over {space_len}",
                    e.space_len()
                )));
            }
            dedup.insert(e);
        }
        Ok(SetFamily { space_len, sets: dedup.into_iter().collect() })
    }

    pub fn empty(space_len: usize) -> Self {
        SetFamily { space_len, sets: Vec::new() }
    }

    pub fn space_len(&self) -> usize {
        self.space_len
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, e: &Event) -> bool {
        self.sets.binary_search(e).is_ok()
    }

    /// Returns true if the member was new.
    pub fn insert(&mut self, e: Event) -> Result<bool, MeasureError> {
        if e.space_len() != self.space_len {
            return Err(invalid("event length mismatch"));
        }
        match self.sets.binary_search(&e) {
            Ok(_) => Ok(false),
            Err(at) => {
                self.sets.insert(at, e);
                Ok(true)
            }
        }
    }

    pub fn members(&self) -> &[Event] {
        &self.sets
    }

    pub fn iter(&self) -> impl Iterator<Item = &Event> {
        self.sets.iter()
    }

    /// Containing Ω and closed under complement and pairwise union (hence
    /// intersection); on a finite Ω that is exactly being a σ-algebra.
    pub fn is_sigma_algebra(&self) -> bool {
        if !self.contains(&Event::full(self.space_len)) {
            return false;
        }
        for a in &self.sets {
            if !self.contains(&a.complement()) {
                return false;
            }
            for b in &self.sets {
                if !self.contains(&a.union(b)) {
                    return false;
                }
            }
        }
        true
    }

    /// Dynkin system: contains Ω and is closed under proper differences.
    /// The increasing-union clause is vacuous on a finite Ω — every
    /// increasing chain stabilizes at a member already present.
    pub fn is_dynkin(&self) -> bool {
        if !self.contains(&Event::full(self.space_len)) {
            return false;
        }
        for a in &self.sets {
            for b in &self.sets {
                if a.is_subset(b) && !self.contains(&b.minus(a)) {
                    return false;
                }
            }
        }
        true
    }
}

/// The partition of Ω generated by a family: outcomes are merged when no
/// member separates them.
pub fn partition_blocks(space_len: usize, family: &SetFamily) -> Vec<Event> {
    let mut by_signature: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for i in 0..space_len {
        let sig: Vec<bool> = family.iter().map(|e| e.contains(i)).collect();
        by_signature.entry(sig).or_default().push(i);
    }
    by_signature
        .into_values()
        .map(|idx| Event::from_indices(space_len, &idx))
        .collect()
}

/// Smallest σ-algebra containing the family: all unions of the generated
/// partition's blocks.
pub fn generate_sigma(space_len: usize, family: &SetFamily) -> SetFamily {
    let blocks = partition_blocks(space_len, family);
    assert!(
        blocks.len() <= MAX_SIGMA_BLOCKS,
        "σ-algebra with {} blocks is too large to materialize",
        blocks.len()
    );
    let mut sets = Vec::with_capacity(1 << blocks.len());
    for mask in 0u32..(1 << blocks.len()) {
        let mut e = Event::empty(space_len);
        for (k, b) in blocks.iter().enumerate() {
            if (mask >> k) & 1 == 1 {
                e = e.union(b);
            }
        }
        sets.push(e);
    }
    SetFamily::new(space_len, sets).expect("events constructed over space_len")
}

/// Smallest Dynkin system containing the family: worklist closure of
/// {Ω} ∪ family under proper differences.
pub fn generate_dynkin(space_len: usize, family: &SetFamily) -> SetFamily {
    let mut sets: BTreeSet<Event> = family.iter().cloned().collect();
    sets.insert(Event::full(space_len));
    loop {
        let snapshot: Vec<Event> = sets.iter().cloned().collect();
        let mut grew = false;
        for a in &snapshot {
            for b in &snapshot {
                if a.is_subset(b) {
                    grew |= sets.insert(b.minus(a));
                }
            }
        }
        if !grew {
            break;
        }
    }
    SetFamily::new(space_len, sets).expect("events constructed over space_len")
}

// -------------------------------------------------------- FiniteProbSpace

/// An exact probability space over a finite labeled Ω. The σ-algebra is
/// represented by its partition into minimal nonempty measurable sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteProbSpace {
    outcomes: Vec<String>,
    blocks: Vec<Event>,
    masses: Vec<Rat>,
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("w{i}")).collect()
}

impl FiniteProbSpace {
    /// Full-power-set space from per-outcome masses.
    pub fn from_atom_masses(masses: Vec<Rat>) -> Result<Self, MeasureError> {
        let labels = default_labels(masses.len());
        Self::from_labeled_atoms(labels, masses)
    }

    pub fn from_labeled_atoms(labels: Vec<String>, masses: Vec<Rat>) -> Result<Self, MeasureError> {
        if labels.len() != masses.len() {
            return Err(invalid("labels and masses must have equal length"));
        }
        let n = labels.len();
        let blocks = (0..n).map(|i| Event::singleton(n, i)).collect();
        Self::from_blocks(labels, blocks, masses)
    }

    /// Space from an explicit measured σ-algebra: `members` must list every
    /// set of the algebra with its measure.
    pub fn new(labels: Vec<String>, members: Vec<(Event, Rat)>) -> Result<Self, MeasureError> {
        let n = labels.len();
        let family = SetFamily::new(n, members.iter().map(|(e, _)| e.clone()))?;
        if family.len() != members.len() {
            return Err(invalid("duplicate events in the measured family"));
        }
        if !family.is_sigma_algebra() {
            return Err(invalid("family is not a σ-algebra (missing Ω, a complement, or a union)"));
        }
        let mu: BTreeMap<&Event, &Rat> = members.iter().map(|(e, m)| (e, m)).collect();
        let blocks = partition_blocks(n, &family);
        let masses: Vec<Rat> = blocks
            .iter()
            .map(|b| {
                mu.get(b)
                    .copied()
                    .cloned()
                    .ok_or_else(|| invalid("family member list is not the whole algebra"))
            })
            .collect::<Result<_, _>>()?;
        let space = Self::from_blocks(labels, blocks, masses)?;
        // the provided values must themselves be additive
        for (e, m) in &members {
            if space.measure(e).as_ref() != Some(m) {
                return Err(invalid(format!("measure of {e} is not additive over the blocks")));
            }
        }
        Ok(space)
    }

    fn from_blocks(
        outcomes: Vec<String>,
        blocks: Vec<Event>,
        masses: Vec<Rat>,
    ) -> Result<Self, MeasureError> {
        let n = outcomes.len();
        if blocks.len() != masses.len() {
            return Err(invalid("blocks and masses must have equal length"));
        }
        let mut seen = Event::empty(n);
        for b in &blocks {
            if b.space_len() != n || b.is_empty() {
                return Err(invalid("blocks must be nonempty events over the outcome set"));
            }
            if !seen.is_disjoint(b) {
                return Err(invalid("blocks must be pairwise disjoint"));
            }
            seen = seen.union(b);
        }
        if !seen.is_full() {
            return Err(invalid("blocks must cover the outcome set"));
        }
        for m in &masses {
            if m.is_negative() {
                return Err(invalid("masses must be nonnegative"));
            }
        }
        if masses.iter().sum::<Rat>() != Rat::one() {
            return Err(invalid("masses must sum to 1"));
        }
        let mut paired: Vec<(Event, Rat)> = blocks.into_iter().zip(masses).collect();
        paired.sort_by(|a, b| a.0.cmp(&b.0));
        let (blocks, masses) = paired.into_iter().unzip();
        Ok(FiniteProbSpace { outcomes, blocks, masses })
    }

    pub fn outcome_count(&self) -> usize {
        self.outcomes.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.outcomes
    }

    pub fn blocks(&self) -> &[Event] {
        &self.blocks
    }

    pub fn block_masses(&self) -> impl Iterator<Item = (&Event, &Rat)> {
        self.blocks.iter().zip(self.masses.iter())
    }

    /// True when the σ-algebra is the full power set.
    pub fn is_full(&self) -> bool {
        self.blocks.len() == self.outcome_count()
    }

    pub fn atom_masses(&self) -> Option<Vec<Rat>> {
        if !self.is_full() {
            return None;
        }
        let mut out = vec![Rat::zero(); self.outcome_count()];
        for (b, m) in self.block_masses() {
            out[b.iter().next().expect("blocks are nonempty")] = m.clone();
        }
        Some(out)
    }

    /// Measure of `a`, or `None` when `a` is not measurable.
    pub fn measure(&self, a: &Event) -> Option<Rat> {
        let mut acc = Rat::zero();
        for (b, m) in self.block_masses() {
            if b.is_subset(a) {
                acc = &acc + m;
            } else if !b.is_disjoint(a) {
                return None;
            }
        }
        Some(acc)
    }

    pub fn is_measurable(&self, a: &Event) -> bool {
        self.measure(a).is_some()
    }

    /// Inner and outer measure: the largest measurable subset and the
    /// smallest measurable superset.
    pub fn inner_outer(&self, a: &Event) -> (Rat, Rat) {
        let mut inner = Rat::zero();
        let mut outer = Rat::zero();
        for (b, m) in self.block_masses() {
            if b.is_subset(a) {
                inner = &inner + m;
            }
            if !b.is_disjoint(a) {
                outer = &outer + m;
            }
        }
        (inner, outer)
    }

    /// Complete ⟺ every null block is a single outcome, so that all
    /// subsets of null sets are measurable.
    pub fn is_complete(&self) -> bool {
        self.block_masses().all(|(b, m)| !m.is_zero() || b.count() == 1)
    }

    /// Completion: adjoins all subsets of null sets by splitting null
    /// blocks into singletons. Idempotent; measure unchanged on the old
    /// σ-algebra.
    pub fn completion(&self) -> FiniteProbSpace {
        let mut blocks = Vec::new();
        let mut masses = Vec::new();
        for (b, m) in self.block_masses() {
            if m.is_zero() && b.count() > 1 {
                for i in b.iter() {
                    blocks.push(Event::singleton(self.outcome_count(), i));
                    masses.push(Rat::zero());
                }
            } else {
                blocks.push(b.clone());
                masses.push(m.clone());
            }
        }
        Self::from_blocks(self.outcomes.clone(), blocks, masses)
            .expect("splitting null blocks preserves validity")
    }

    /// The σ-algebra, materialized.
    pub fn sigma(&self) -> SetFamily {
        let family = SetFamily::new(self.outcome_count(), self.blocks.iter().cloned())
            .expect("blocks are valid events");
        generate_sigma(self.outcome_count(), &family)
    }

    pub fn measured_members(&self) -> Vec<(Event, Rat)> {
        self.block_masses().map(|(b, m)| (b.clone(), m.clone())).collect()
    }

    /// Extends the measure to σ(Σ ∪ {a}) with ν(a) = α. Feasible exactly
    /// when α lies in the inner/outer interval.
    pub fn extend_with_set(&self, a: &Event, alpha: &Rat) -> Result<FiniteProbSpace, MeasureError> {
        extend_family_with_set(self.outcomes.clone(), &self.measured_members(), a, alpha)
    }
}

/// Quotient Boolean-measure-space isomorphism: for finite spaces, the
/// multisets of nonzero block masses must coincide.
pub fn boolean_measure_iso(s1: &FiniteProbSpace, s2: &FiniteProbSpace) -> bool {
    let multiset = |s: &FiniteProbSpace| {
        let mut m: BTreeMap<Rat, usize> = BTreeMap::new();
        for (_, mass) in s.block_masses() {
            if !mass.is_zero() {
                *m.entry(mass.clone()).or_default() += 1;
            }
        }
        m
    };
    multiset(s1) == multiset(s2)
}

// ------------------------------------------------- measured-family queries

fn family_system(space_len: usize, members: &[(Event, Rat)]) -> Result<LinearSystem, MeasureError> {
    let mut sys = LinearSystem::new(space_len);
    sys.push(LinearConstraint::eq(vec![Rat::one(); space_len], Rat::one()));
    for (e, m) in members {
        if e.space_len() != space_len {
            return Err(invalid("event length mismatch"));
        }
        if m.is_negative() || m > &Rat::one() {
            return Err(invalid(format!("measure value {m} outside [0, 1]")));
        }
        let coeffs = (0..space_len)
            .map(|i| if e.contains(i) { Rat::one() } else { Rat::zero() })
            .collect();
        sys.push(LinearConstraint::eq(coeffs, m.clone()));
    }
    Ok(sys)
}

fn indicator(space_len: usize, e: &Event) -> Vec<Rat> {
    (0..space_len).map(|i| if e.contains(i) { Rat::one() } else { Rat::zero() }).collect()
}

/// The exact interval of values an additive extension of the measured
/// family can assign to `a`. `NoExtension` when the family itself admits
/// no additive extension to the power set (and hence to any σ-algebra
/// refining it).
pub fn extension_range(
    space_len: usize,
    members: &[(Event, Rat)],
    a: &Event,
) -> Result<(Rat, Rat), MeasureError> {
    let sys = family_system(space_len, members)?;
    let obj = indicator(space_len, a);
    let lo = match sys.minimize(&obj).map_err(|e| invalid(e.to_string()))? {
        LpOutcome::Infeasible => return Err(MeasureError::NoExtension),
        LpOutcome::Unbounded => unreachable!("simplex-bounded system"),
        LpOutcome::Optimal { value, .. } => value,
    };
    let hi = match sys.maximize(&obj).map_err(|e| invalid(e.to_string()))? {
        LpOutcome::Optimal { value, .. } => value,
        _ => unreachable!("feasibility established above"),
    };
    Ok((lo, hi))
}

/// Extends a measured family (probability values on arbitrary events, e.g.
/// a Dynkin system) by one more set with value α, producing a probability
/// space over σ(family ∪ {a}). The underlying atom solution is found by
/// exact LP; when the family is already a measured σ-algebra this
/// coincides with [`FiniteProbSpace::extend_with_set`] and the feasible
/// interval is the inner/outer-measure interval.
pub fn extend_family_with_set(
    labels: Vec<String>,
    members: &[(Event, Rat)],
    a: &Event,
    alpha: &Rat,
) -> Result<FiniteProbSpace, MeasureError> {
    let space_len = labels.len();
    let (lo, hi) = extension_range(space_len, members, a)?;
    if alpha < &lo || alpha > &hi {
        return Err(MeasureError::OutOfRange { alpha: alpha.clone(), inner: lo, outer: hi });
    }
    let mut sys = family_system(space_len, members)?;
    sys.push(LinearConstraint::eq(indicator(space_len, a), alpha.clone()));
    let x = sys
        .feasible_point()
        .map_err(|e| invalid(e.to_string()))?
        .expect("alpha inside the feasible interval");
    let family = SetFamily::new(
        space_len,
        members.iter().map(|(e, _)| e.clone()).chain([a.clone()]),
    )?;
    let blocks = partition_blocks(space_len, &family);
    let masses = blocks
        .iter()
        .map(|b| b.iter().map(|i| x[i].clone()).sum())
        .collect();
    FiniteProbSpace::from_blocks(labels, blocks, masses)
}

// -------------------------------------------------------------- DynkinSpace

/// A measured Dynkin system (Ω, Δ, ρ). Construction checks only shape;
/// [`DynkinSpace::check`] reports violations of the space axioms, so
/// deliberately broken instances can be examined.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DynkinSpace {
    outcomes: Vec<String>,
    members: Vec<(Event, Rat)>,
}

impl DynkinSpace {
    pub fn new(outcomes: Vec<String>, members: Vec<(Event, Rat)>) -> Result<Self, MeasureError> {
        let family = SetFamily::new(outcomes.len(), members.iter().map(|(e, _)| e.clone()))?;
        if family.len() != members.len() {
            return Err(invalid("duplicate events in the family"));
        }
        let mut members = members;
        members.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(DynkinSpace { outcomes, members })
    }

    pub fn space_len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn members(&self) -> &[(Event, Rat)] {
        &self.members
    }

    pub fn family(&self) -> SetFamily {
        SetFamily::new(self.space_len(), self.members.iter().map(|(e, _)| e.clone()))
            .expect("validated at construction")
    }

    pub fn rho(&self, e: &Event) -> Option<Rat> {
        self.members
            .binary_search_by(|(m, _)| m.cmp(e))
            .ok()
            .map(|i| self.members[i].1.clone())
    }

    /// Checks the Dynkin-space axioms, returning every violation:
    /// (i) ρΩ = 1; (ii) A ⊆ B implies B∖A ∈ Δ with ρ(B∖A) = ρB − ρA;
    /// (iii) increasing unions converge — vacuous here, since a chain in a
    /// finite family stabilizes at its largest member, which clause (ii)
    /// already covers. Values must lie in [0, 1].
    pub fn check(&self) -> Vec<String> {
        let mut violations = Vec::new();
        let full = Event::full(self.space_len());
        match self.rho(&full) {
            None => violations.push("Ω is not a member".to_owned()),
            Some(r) if !r.is_one() => violations.push(format!("ρΩ = {r} ≠ 1")),
            _ => {}
        }
        for (e, r) in &self.members {
            if r.is_negative() || r > &Rat::one() {
                violations.push(format!("ρ{e} = {r} outside [0, 1]"));
            }
        }
        for (a, ra) in &self.members {
            for (b, rb) in &self.members {
                if !a.is_subset(b) {
                    continue;
                }
                let diff = b.minus(a);
                match self.rho(&diff) {
                    None => violations.push(format!("{b} ∖ {a} = {diff} is not a member")),
                    Some(rd) => {
                        if rd != rb - ra {
                            violations.push(format!(
                                "ρ({b} ∖ {a}) = {rd} but ρB − ρA = {}",
                                rb - ra
                            ));
                        }
                    }
                }
            }
        }
        violations
    }

    pub fn is_valid(&self) -> bool {
        self.check().is_empty()
    }
}
