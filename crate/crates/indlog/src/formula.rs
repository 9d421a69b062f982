//! Propositional syntax over a declared set of variables.
//!
//! The core connectives are negation and finite conjunction; disjunction,
//! implication, biconditional and the two constants are definable sugar
//! that [`Formula::desugar`] rewrites away. Conjunctions keep their
//! conjuncts as an ordered list — flattening or sorting would change how a
//! formula prints, so nesting is preserved exactly as written.

use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct PropVar(String);

impl PropVar {
    pub fn new(name: impl Into<String>) -> Self {
        PropVar(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PropVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for PropVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PropVar {
    fn from(s: &str) -> Self {
        PropVar(s.to_owned())
    }
}

/// The declared variable set, in declaration order. The first variable is
/// the designated one used to spell `FALSE` as a contradiction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PvDecls {
    names: Vec<PropVar>,
}

impl PvDecls {
    pub fn new<I, S>(names: I) -> Result<Self, String>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<PropVar> = names.into_iter().map(|s| PropVar(s.into())).collect();
        if names.is_empty() {
            return Err("at least one propositional variable must be declared".into());
        }
        let mut seen = BTreeSet::new();
        for v in &names {
            if !seen.insert(v.clone()) {
                return Err(format!("duplicate variable {v}"));
            }
        }
        Ok(PvDecls { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, v: &PropVar) -> Option<usize> {
        self.names.iter().position(|n| n == v)
    }

    pub fn contains(&self, v: &PropVar) -> bool {
        self.index_of(v).is_some()
    }

    pub fn name(&self, i: usize) -> &PropVar {
        &self.names[i]
    }

    pub fn first(&self) -> &PropVar {
        &self.names[0]
    }

    pub fn iter(&self) -> impl Iterator<Item = &PropVar> {
        self.names.iter()
    }

    /// The sub-declaration keeping only `keep`, in this declaration's order.
    pub fn restrict(&self, keep: &BTreeSet<PropVar>) -> PvDecls {
        PvDecls { names: self.names.iter().filter(|v| keep.contains(v)).cloned().collect() }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Var(PropVar),
    Not(Box<Formula>),
    /// Finite conjunction, ordered as written.
    AndAll(Vec<Formula>),
    /// Finite disjunction; sugar for `¬⋀¬`.
    OrAll(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Top,
    Bottom,
}

use Formula::*;

impl Formula {
    pub fn var(name: impl Into<String>) -> Formula {
        Var(PropVar(name.into()))
    }

    pub fn not(f: Formula) -> Formula {
        Not(Box::new(f))
    }

    pub fn and(fs: Vec<Formula>) -> Formula {
        AndAll(fs)
    }

    pub fn or(fs: Vec<Formula>) -> Formula {
        OrAll(fs)
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Iff(Box::new(a), Box::new(b))
    }

    /// Rewrites to the Var/Not/AndAll core. `anchor` is the designated
    /// variable used to spell the constants (`FALSE` becomes
    /// `anchor ∧ ¬anchor`); it only matters when the formula mentions
    /// `TRUE` or `FALSE`. Idempotent.
    pub fn desugar(&self, anchor: &PropVar) -> Formula {
        match self {
            Var(v) => Var(v.clone()),
            Not(f) => Formula::not(f.desugar(anchor)),
            AndAll(fs) => AndAll(fs.iter().map(|f| f.desugar(anchor)).collect()),
            // ⋁Φ = ¬⋀¬Φ
            OrAll(fs) => Formula::not(AndAll(
                fs.iter().map(|f| Formula::not(f.desugar(anchor))).collect(),
            )),
            // φ → ψ = ¬φ ∨ ψ
            Implies(a, b) => {
                Formula::or(vec![Formula::not((**a).clone()), (**b).clone()]).desugar(anchor)
            }
            // φ ↔ ψ = (φ → ψ) ∧ (ψ → φ)
            Iff(a, b) => AndAll(vec![
                Formula::implies((**a).clone(), (**b).clone()).desugar(anchor),
                Formula::implies((**b).clone(), (**a).clone()).desugar(anchor),
            ]),
            Bottom => AndAll(vec![Var(anchor.clone()), Formula::not(Var(anchor.clone()))]),
            Top => Formula::not(Bottom.desugar(anchor)),
        }
    }

    pub fn is_core(&self) -> bool {
        match self {
            Var(_) => true,
            Not(f) => f.is_core(),
            AndAll(fs) => fs.iter().all(|f| f.is_core()),
            _ => false,
        }
    }

    pub fn vars(&self) -> BTreeSet<PropVar> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<PropVar>) {
        match self {
            Var(v) => {
                out.insert(v.clone());
            }
            Not(f) => f.collect_vars(out),
            AndAll(fs) | OrAll(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
            Implies(a, b) | Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Top | Bottom => {}
        }
    }

    /// The subformula set, deduplicated, in first-visit preorder.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.collect_sub(&mut seen, &mut out);
        out
    }

    fn collect_sub(&self, seen: &mut BTreeSet<Formula>, out: &mut Vec<Formula>) {
        if seen.insert(self.clone()) {
            out.push(self.clone());
        }
        match self {
            Var(_) | Top | Bottom => {}
            Not(f) => f.collect_sub(seen, out),
            AndAll(fs) | OrAll(fs) => fs.iter().for_each(|f| f.collect_sub(seen, out)),
            Implies(a, b) | Iff(a, b) => {
                a.collect_sub(seen, out);
                b.collect_sub(seen, out);
            }
        }
    }

    pub fn node_count(&self) -> usize {
        1 + match self {
            Var(_) | Top | Bottom => 0,
            Not(f) => f.node_count(),
            AndAll(fs) | OrAll(fs) => fs.iter().map(|f| f.node_count()).sum(),
            Implies(a, b) | Iff(a, b) => a.node_count() + b.node_count(),
        }
    }

    /// Renames variables through a total map; names missing from the map
    /// are kept. With a bijective map this is the permutation action.
    pub fn rename(&self, map: &dyn Fn(&PropVar) -> PropVar) -> Formula {
        match self {
            Var(v) => Var(map(v)),
            Not(f) => Formula::not(f.rename(map)),
            AndAll(fs) => AndAll(fs.iter().map(|f| f.rename(map)).collect()),
            OrAll(fs) => OrAll(fs.iter().map(|f| f.rename(map)).collect()),
            Implies(a, b) => Formula::implies(a.rename(map), b.rename(map)),
            Iff(a, b) => Formula::iff(a.rename(map), b.rename(map)),
            Top => Top,
            Bottom => Bottom,
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Iff(..) => 1,
            Implies(..) => 2,
            OrAll(fs) if fs.len() != 1 => 3,
            AndAll(fs) if fs.len() != 1 => 4,
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
            Var(v) => write!(f, "{v}")?,
            Top => f.write_str("TRUE")?,
            Bottom => f.write_str("FALSE")?,
            Not(g) => {
                f.write_str("~")?;
                g.fmt_prec(f, 5)?;
            }
            // Empty and singleton connective lists have no written form;
            // they print as semantic equivalents (no structural round-trip).
            AndAll(fs) if fs.is_empty() => f.write_str("TRUE")?,
            OrAll(fs) if fs.is_empty() => f.write_str("FALSE")?,
            AndAll(fs) | OrAll(fs) if fs.len() == 1 => fs[0].fmt_prec(f, min)?,
            AndAll(fs) => {
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" & ")?;
                    }
                    g.fmt_prec(f, 5)?;
                }
            }
            OrAll(fs) => {
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    g.fmt_prec(f, 4)?;
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
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> Formula {
        Formula::var(name)
    }

    #[test]
    fn desugar_or_is_negated_conjunction() {
        let anchor = PropVar::new("a");
        let got = Formula::or(vec![v("a"), v("b")]).desugar(&anchor);
        let want = Formula::not(Formula::and(vec![
            Formula::not(v("a")),
            Formula::not(v("b")),
        ]));
        assert_eq!(got, want);
    }

    #[test]
    fn desugar_constants_use_anchor() {
        let anchor = PropVar::new("r0");
        let bot = Bottom.desugar(&anchor);
        assert_eq!(bot, Formula::and(vec![v("r0"), Formula::not(v("r0"))]));
        assert_eq!(Top.desugar(&anchor), Formula::not(bot));
    }

    #[test]
    fn desugar_implication_chain() {
        let anchor = PropVar::new("a");
        // a -> b  =  ~a | b  =  ~(~~a & ~b)
        let got = Formula::implies(v("a"), v("b")).desugar(&anchor);
        let want = Formula::not(Formula::and(vec![
            Formula::not(Formula::not(v("a"))),
            Formula::not(v("b")),
        ]));
        assert_eq!(got, want);
        assert!(got.is_core());
    }

    #[test]
    fn desugar_is_idempotent() {
        let anchor = PropVar::new("a");
        let cases = [
            Formula::iff(v("a"), Formula::or(vec![v("b"), Top])),
            Formula::implies(Bottom, Formula::and(vec![v("a"), v("b"), v("c")])),
            Formula::not(Formula::or(vec![v("a"), v("b"), v("c")])),
        ];
        for f in cases {
            let once = f.desugar(&anchor);
            assert!(once.is_core());
            assert_eq!(once.desugar(&anchor), once);
        }
    }

    #[test]
    fn subformula_sets() {
        assert_eq!(v("r").subformulas(), vec![v("r")]);
        let nr = Formula::not(v("r"));
        assert_eq!(nr.subformulas(), vec![nr.clone(), v("r")]);
        let conj = Formula::and(vec![v("r1"), Formula::not(v("r1"))]);
        assert_eq!(
            conj.subformulas(),
            vec![conj.clone(), v("r1"), Formula::not(v("r1"))]
        );
        // Repeats dedupe, so the set is at most the node count.
        let rep = Formula::and(vec![v("a"), v("a"), v("a")]);
        assert_eq!(rep.subformulas().len(), 2);
        assert!(rep.subformulas().len() <= rep.node_count());
    }

    #[test]
    fn rename_is_a_group_action() {
        let f = Formula::iff(
            Formula::and(vec![v("a"), v("b")]),
            Formula::or(vec![v("b"), v("c")]),
        );
        let swap_ab = |v: &PropVar| -> PropVar {
            match v.as_str() {
                "a" => "b".into(),
                "b" => "a".into(),
                other => other.into(),
            }
        };
        let cyc = |v: &PropVar| -> PropVar {
            match v.as_str() {
                "a" => "b".into(),
                "b" => "c".into(),
                "c" => "a".into(),
                other => other.into(),
            }
        };
        let composed = |v: &PropVar| -> PropVar { swap_ab(&cyc(v)) };
        assert_eq!(f.rename(&cyc).rename(&swap_ab), f.rename(&composed));
        assert_eq!(f.rename(&swap_ab).rename(&swap_ab), f);
    }

    #[test]
    fn pv_decls_reject_duplicates() {
        assert!(PvDecls::new(["r1", "r2", "r1"]).is_err());
        assert!(PvDecls::new(Vec::<String>::new()).is_err());
        let pv = PvDecls::new(["r1", "r2"]).unwrap();
        assert_eq!(pv.first().as_str(), "r1");
        assert_eq!(pv.index_of(&"r2".into()), Some(1));
    }

    #[test]
    fn display_uses_grammar_tokens() {
        let f = Formula::implies(
            Formula::and(vec![v("a"), Formula::not(v("b"))]),
            Formula::or(vec![v("c"), Bottom]),
        );
        assert_eq!(f.to_string(), "a & ~b -> c | FALSE");
        let nested = Formula::and(vec![Formula::and(vec![v("a"), v("b")]), v("c")]);
        assert_eq!(nested.to_string(), "(a & b) & c");
        // <-> is right-associative, so the right nesting needs no parens
        // while the left one does.
        let iff = Formula::iff(v("a"), Formula::iff(v("b"), v("c")));
        assert_eq!(iff.to_string(), "a <-> b <-> c");
        let iff_l = Formula::iff(Formula::iff(v("a"), v("b")), v("c"));
        assert_eq!(iff_l.to_string(), "(a <-> b) <-> c");
    }
}
