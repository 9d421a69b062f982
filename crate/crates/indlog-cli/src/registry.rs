//! Canned problems with known verdicts.
//!
//! Every entry embeds the same `.prob` source that ships under
//! `problems/`, so `indlog example NAME` works from any directory and
//! `self-test` doubles as a check that the shipped files still parse to
//! the problems they claim to be.

use indlog::bertrand::{bertrand_exact, rotation_invariance_check, ChordScheme};
use indlog::indifference::{poi_example, poi_forced, ExpectedPoI, PoIVerdict};
use indlog::inductive::{derive_under_independence, DeriveResult};
use indlog::Rat;

use crate::problem::{parse_problem, ProblemFile, ProblemKind};
use crate::report::ExampleLine;

pub struct Entry {
    pub name: &'static str,
    pub summary: &'static str,
    /// Short human rendering of the expected verdicts, for listings.
    pub expected: &'static str,
    /// Embedded problem source, when the entry is file-backed.
    pub source: Option<&'static str>,
}

pub const ENTRIES: &[Entry] = &[
    Entry {
        name: "mathse-half",
        summary: "two propositions and their biconditional, all at degree 1/2",
        expected: "P(r1 & r2 | T0) forced to 1/4",
        source: Some(include_str!("../../../problems/mathse_half.prob")),
    },
    Entry {
        name: "mathse-quarter",
        summary: "the same constraints lowered to degree 1/4",
        expected: "inconsistent",
        source: Some(include_str!("../../../problems/mathse_quarter.prob")),
    },
    Entry {
        name: "incompleteness",
        summary: "constraints that leave a query completely open",
        expected: "P(r3 | T0) not forced, bounds 0 and 1",
        source: Some(include_str!("../../../problems/incompleteness.prob")),
    },
    Entry {
        name: "fair-coins-n10",
        summary: "ten independent fair coins",
        expected: "all-heads forced to 1/1024, its negation to 1023/1024",
        source: Some(include_str!("../../../problems/fair_coins_n10.prob")),
    },
    Entry {
        name: "either-true",
        summary: "a lone predicate of a lone object: no symmetry, nothing forced",
        expected: "not forced",
        source: Some(include_str!("../../../problems/either_true.prob")),
    },
    Entry {
        name: "one-coin",
        summary: "a flip lands on one of two interchangeable sides",
        expected: "forced to 1/2",
        source: Some(include_str!("../../../problems/one_coin.prob")),
    },
    Entry {
        name: "single-trial",
        summary: "success and failure as interchangeable predicates",
        expected: "forced to 1/2",
        source: Some(include_str!("../../../problems/single_trial.prob")),
    },
    Entry {
        name: "success-good",
        summary: "an asymmetric gloss on success breaks the symmetry",
        expected: "not forced",
        source: Some(include_str!("../../../problems/success_good.prob")),
    },
    Entry {
        name: "goodness-independent",
        summary: "the gloss assumed independent of success drops out",
        expected: "forced to 1/2",
        source: Some(include_str!("../../../problems/goodness_independent.prob")),
    },
    Entry {
        name: "lowered-root",
        summary: "the gloss held with probability one instead of axiomatically",
        expected: "forced to 1/2",
        source: Some(include_str!("../../../problems/lowered_root.prob")),
    },
    Entry {
        name: "three-balls",
        summary: "three distinct balls, both colors present",
        expected: "monochrome colorings forced to 0, the six mixed ones to 1/6",
        source: Some(include_str!("../../../problems/three_balls.prob")),
    },
    Entry {
        name: "two-balls",
        summary: "two balls without the both-colors guarantee",
        expected: "nothing forced (paired colorings share bounds)",
        source: Some(include_str!("../../../problems/two_balls.prob")),
    },
    Entry {
        name: "random-number",
        summary: "c is one of two ordered numbers; the order breaks the symmetry",
        expected: "not forced",
        source: Some(include_str!("../../../problems/random_number.prob")),
    },
    Entry {
        name: "random-number-defined",
        summary: "naming the unchosen number restores the symmetry",
        expected: "forced to 1/2",
        source: Some(include_str!("../../../problems/random_number_defined.prob")),
    },
    Entry {
        name: "bertrand",
        summary: "chord longer than the inscribed-triangle side, three schemes",
        expected: "endpoints 1/3, radius 1/2, midpoint 1/4; all rotation-invariant",
        source: None,
    },
];

pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.name).collect()
}

pub fn entry(name: &str) -> Option<&'static Entry> {
    ENTRIES.iter().find(|e| e.name == name)
}

pub fn source(name: &str) -> Option<&'static str> {
    entry(name).and_then(|e| e.source)
}

/// Run one canned example and compare against its known verdicts.
pub fn run(name: &str) -> ExampleLine {
    let status = |r: Result<String, String>| match r {
        Ok(detail) => ExampleLine { name: name.to_string(), status: "ok".into(), detail },
        Err(detail) => ExampleLine { name: name.to_string(), status: "fail".into(), detail },
    };
    status(run_inner(name))
}

pub fn run_all() -> Vec<ExampleLine> {
    names().into_iter().map(run).collect()
}

fn parse_embedded(name: &str) -> Result<ProblemFile, String> {
    let src = source(name).ok_or_else(|| format!("`{name}` is not file-backed"))?;
    parse_problem(src).map_err(|e| format!("embedded problem failed to parse: {e}"))
}

fn run_inner(name: &str) -> Result<String, String> {
    match name {
        "mathse-half" => {
            let p = parse_embedded(name)?.inductive()?;
            let q = first_query(name)?;
            match p.derive(&p.antecedent(q.0), &q.1).map_err(|e| e.to_string())? {
                DeriveResult::Forced(v) if v == Rat::new(1, 4) => {
                    Ok("P(r1 & r2 | T0) = 1/4, as expected".into())
                }
                other => Err(format!("expected forced 1/4, got {other:?}")),
            }
        }
        "mathse-quarter" => {
            let pf = parse_embedded(name)?;
            let p = pf.inductive()?;
            if p.consistency().map_err(|e| e.to_string())?.is_some() {
                return Err("expected no admissible measure, but one exists".into());
            }
            let q = first_query(name)?;
            match p.derive(&p.antecedent(q.0), &q.1).map_err(|e| e.to_string())? {
                DeriveResult::Inconsistent => Ok("inconsistent, as expected".into()),
                other => Err(format!("expected inconsistency, got {other:?}")),
            }
        }
        "incompleteness" => {
            let p = parse_embedded(name)?.inductive()?;
            let q = first_query(name)?;
            match p.derive(&p.antecedent(q.0), &q.1).map_err(|e| e.to_string())? {
                DeriveResult::Interval { lower, upper, .. }
                    if lower == Rat::zero() && upper == Rat::one() =>
                {
                    Ok("P(r3 | T0) has bounds 0 and 1, as expected".into())
                }
                other => Err(format!("expected the open interval with bounds 0 and 1, got {other:?}")),
            }
        }
        "fair-coins-n10" => {
            let pf = parse_embedded(name)?;
            let ProblemKind::Prop { decls, root, assumes, queries, .. } = &pf.kind else {
                return Err("expected a propositional problem".into());
            };
            let marginals: Vec<_> =
                assumes.iter().map(|(_, f, p)| (f.clone(), p.clone())).collect();
            let expected = [Rat::new(1, 1024), Rat::new(1023, 1024)];
            for ((_, q), want) in queries.iter().zip(&expected) {
                match derive_under_independence(decls, root, &marginals, q)
                    .map_err(|e| e.to_string())?
                {
                    DeriveResult::Forced(v) if v == *want => {}
                    other => return Err(format!("expected forced {want}, got {other:?}")),
                }
            }
            Ok("1/1024 for all heads, 1023/1024 for its negation".into())
        }
        "bertrand" => {
            let want = [
                (ChordScheme::Endpoints, Rat::new(1, 3)),
                (ChordScheme::Radius, Rat::new(1, 2)),
                (ChordScheme::Midpoint, Rat::new(1, 4)),
            ];
            for (scheme, p) in &want {
                let got = bertrand_exact(*scheme);
                if got != *p {
                    return Err(format!("{scheme}: expected {p}, got {got}"));
                }
                let rep = rotation_invariance_check(*scheme, 12)?;
                if !rep.invariant {
                    return Err(format!("{scheme}: induced law not rotation-invariant"));
                }
            }
            Ok("endpoints 1/3, radius 1/2, midpoint 1/4; rotation-invariant at k = 12".into())
        }
        poi_name => {
            let pf = parse_embedded(poi_name)?;
            let prob = pf.poi(None)?;
            let expected = poi_example(poi_name)?.expected;
            let out = poi_forced(&prob)?;
            if out.verdicts.len() != expected.len() {
                return Err(format!(
                    "expected {} verdicts, got {}",
                    expected.len(),
                    out.verdicts.len()
                ));
            }
            for (i, (v, e)) in out.verdicts.iter().zip(&expected).enumerate() {
                let ok = matches!(
                    (v, e),
                    (PoIVerdict::Forced { .. }, ExpectedPoI::Forced(_))
                        | (PoIVerdict::NotForced { .. }, ExpectedPoI::NotForced)
                        | (PoIVerdict::Inconsistent, ExpectedPoI::Inconsistent)
                );
                let value_ok = match (v, e) {
                    (PoIVerdict::Forced { value, .. }, ExpectedPoI::Forced(want)) => value == want,
                    _ => true,
                };
                if !ok || !value_ok {
                    return Err(format!("query {i}: expected {e:?}, got a different verdict"));
                }
            }
            let n = expected.len();
            let noun = if n == 1 { "verdict" } else { "verdicts" };
            Ok(format!("{n} {noun} as expected"))
        }
    }
}

/// First query of a file-backed propositional entry.
fn first_query(
    name: &str,
) -> Result<(Vec<indlog::Formula>, indlog::Formula), String> {
    let pf = parse_embedded(name)?;
    match pf.kind {
        ProblemKind::Prop { mut queries, .. } => {
            if queries.is_empty() {
                return Err("entry has no query".into());
            }
            Ok(queries.remove(0))
        }
        ProblemKind::Fo { .. } => Err("entry is not propositional".into()),
    }
}
