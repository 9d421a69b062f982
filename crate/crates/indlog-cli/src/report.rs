//! Machine-readable reports and their one human rendering.
//!
//! Every subcommand produces a [`Report`]; `--json` prints it as
//! canonical pretty JSON, otherwise `render_human` formats the same
//! data as text. The human text is a pure function of the report, so
//! anything visible in text mode is recoverable from the JSON.

use indlog::Rat;
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "indlog-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub file: Option<String>,
    /// Outcome of a consistency check, when one was run.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub consistent: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub violations: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    /// An admissible probability assignment, one line per outcome.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub caveat: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub verdicts: Vec<QueryVerdict>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub bertrand: Vec<BertrandLine>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub examples: Vec<ExampleLine>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryVerdict {
    pub query: String,
    /// `forced` | `interval` | `not-forced` | `inconsistent` | `undefined`
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lower: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub upper: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lower_attained: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub upper_attained: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub certificate: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub witnesses: Vec<String>,
}

impl QueryVerdict {
    pub fn new(query: String, verdict: &str) -> Self {
        QueryVerdict {
            query,
            verdict: verdict.to_string(),
            value: None,
            lower: None,
            upper: None,
            lower_attained: None,
            upper_attained: None,
            certificate: Vec::new(),
            witnesses: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BertrandLine {
    pub scheme: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mc: Option<McLine>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub invariance: Option<InvarianceLine>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McLine {
    pub samples: u64,
    pub hits: u64,
    pub estimate: Rat,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceLine {
    pub sectors: usize,
    pub rotations_checked: usize,
    pub invariant: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_below_half: Option<Rat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleLine {
    pub name: String,
    /// `ok` | `fail`
    pub status: String,
    pub detail: String,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            schema: SCHEMA.to_string(),
            command: command.to_string(),
            file: None,
            consistent: None,
            violations: Vec::new(),
            notes: Vec::new(),
            witness: None,
            caveat: None,
            verdicts: Vec::new(),
            bertrand: Vec::new(),
            examples: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Exit status the report calls for: 2 when any computed verdict is
    /// an inconsistency (or a rule violation), 0 otherwise. Usage and
    /// parse errors never reach a report; they exit 1 from `main`.
    pub fn exit_code(&self) -> i32 {
        let bad_verdict = self.verdicts.iter().any(|v| v.verdict == "inconsistent");
        let failed_example = self.examples.iter().any(|e| e.status != "ok");
        if self.consistent == Some(false)
            || bad_verdict
            || failed_example
            || !self.violations.is_empty()
        {
            2
        } else {
            0
        }
    }

    pub fn render_human(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        if let Some(f) = &self.file {
            line(format!("{}: {}", self.command, f));
        }
        match self.consistent {
            Some(true) => line("consistent: an admissible probability assignment exists".into()),
            Some(false) => line("inconsistent: no admissible probability assignment".into()),
            None => {}
        }
        if self.violations.is_empty() && self.command == "check" {
            line("all rules hold".into());
        }
        for v in &self.violations {
            line(format!("violation: {v}"));
        }
        for n in &self.notes {
            line(n.clone());
        }
        if let Some(w) = &self.witness {
            line("witness assignment:".into());
            for row in w {
                line(format!("  {row}"));
            }
        }
        for v in &self.verdicts {
            match v.verdict.as_str() {
                "forced" => {
                    let val = v.value.as_ref().expect("forced verdicts carry a value");
                    line(format!("{} = {}  [forced]", v.query, val));
                }
                "interval" | "not-forced" => {
                    let lo = v.lower.as_ref().expect("interval verdicts carry bounds");
                    let hi = v.upper.as_ref().expect("interval verdicts carry bounds");
                    let mut ends = String::new();
                    if let (Some(a), Some(b)) = (v.lower_attained, v.upper_attained) {
                        let word = |x: bool| if x { "attained" } else { "open" };
                        ends = format!("  (lower {}, upper {})", word(a), word(b));
                    }
                    line(format!("{} in [{}, {}]  [not forced]{}", v.query, lo, hi, ends));
                }
                "inconsistent" => line(format!("{}: inconsistent", v.query)),
                "undefined" => {
                    line(format!("{}: undefined (the condition is forced to probability 0)", v.query))
                }
                other => line(format!("{}: {}", v.query, other)),
            }
            if !v.certificate.is_empty() {
                line("  certificate:".into());
                for c in &v.certificate {
                    line(format!("    {c}"));
                }
            }
            if !v.witnesses.is_empty() {
                line("  witnesses:".into());
                for w in &v.witnesses {
                    line(format!("    {w}"));
                }
            }
        }
        for b in &self.bertrand {
            if let Some(e) = &b.exact {
                line(format!("{}: exact probability {}", b.scheme, e));
            }
            if let Some(mc) = &b.mc {
                line(format!(
                    "{}: monte carlo {}/{} = {} (seed {})",
                    b.scheme, mc.hits, mc.samples, mc.estimate, mc.seed
                ));
            }
            if let Some(inv) = &b.invariance {
                let p = match &inv.p_below_half {
                    Some(p) => format!("p = {p}"),
                    None => "p not readable from this grid".to_string(),
                };
                line(format!(
                    "{}: {} sectors, {} rotations checked, invariant: {}, {}",
                    b.scheme, inv.sectors, inv.rotations_checked, inv.invariant, p
                ));
            }
        }
        for e in &self.examples {
            line(format!("{}: {} — {}", e.name, e.status, e.detail));
        }
        if let Some(c) = &self.caveat {
            line(format!("note: {c}"));
        }
        out
    }
}
