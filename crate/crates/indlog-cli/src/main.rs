use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use indlog::bertrand::{bertrand_exact, bertrand_mc, rotation_invariance_check, ChordScheme};
use indlog::fostruct::FinModel;
use indlog::indifference::{enumerate_permutations, invariant, poi_admissible_model, poi_forced, PoIVerdict};
use indlog::inductive::{derive_under_independence, DeriveResult};
use indlog::measure::FiniteProbSpace;
use indlog::Formula;

use indlog_cli::problem::{parse_problem, ProblemFile, ProblemKind};
use indlog_cli::registry;
use indlog_cli::report::{BertrandLine, InvarianceLine, McLine, QueryVerdict, Report};

/// Exact probability bounds from constraints, symmetry, and indifference.
#[derive(Parser)]
#[command(name = "indlog", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Emit the report as JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Include certificates and witness models in the report
    #[arg(long, global = true)]
    explain: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a problem file and check table coherence / symmetry structure
    Check { file: PathBuf },
    /// Decide whether the constraints admit any probability assignment
    Consistency { file: PathBuf },
    /// Compute exact probability bounds for each query (vars files)
    Derive {
        file: PathBuf,
        /// Refuse problems with more propositional variables than this
        #[arg(long)]
        max_pv: Option<usize>,
    },
    /// Answer queries by symmetry over bounded domains (signature files)
    Poi {
        file: PathBuf,
        /// Override the file's domain bound
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Chord-vs-inscribed-triangle probabilities on the unit circle
    Bertrand {
        /// endpoints, radius, or midpoint (default: all three)
        #[arg(long)]
        scheme: Option<String>,
        /// Print the exact probability (the default mode)
        #[arg(long)]
        exact: bool,
        /// Monte Carlo estimate with this many samples
        #[arg(long)]
        mc: Option<u64>,
        /// Seed for --mc
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Check rotation invariance on a grid with this many sectors
        #[arg(long)]
        invariance: Option<usize>,
    },
    /// Run a canned example by name, or list all of them
    Example { name: Option<String> },
    /// Run every canned example and compare against its known verdicts
    SelfTest,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version are successful exits; real usage errors are not
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.render_human());
            }
            ExitCode::from(u8::try_from(report.exit_code()).unwrap_or(1))
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<Report, String> {
    match &cli.command {
        Cmd::Check { file } => check(&load(file)?, file),
        Cmd::Consistency { file } => consistency(&load(file)?, file),
        Cmd::Derive { file, max_pv } => derive(&load(file)?, file, *max_pv, cli.explain),
        Cmd::Poi { file, bound } => poi(&load(file)?, file, *bound, cli.explain),
        Cmd::Bertrand { scheme, exact, mc, seed, invariance } => {
            bertrand(scheme.as_deref(), *exact, *mc, *seed, *invariance)
        }
        Cmd::Example { name } => example(name.as_deref()),
        Cmd::SelfTest => {
            let mut rep = Report::new("self-test");
            rep.examples = registry::run_all();
            Ok(rep)
        }
    }
}

fn load(path: &Path) -> Result<ProblemFile, String> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    parse_problem(&src).map_err(|e| format!("{}: {e}", path.display()))
}

fn file_report(command: &str, path: &Path) -> Report {
    let mut rep = Report::new(command);
    rep.file = Some(path.display().to_string());
    rep
}

fn check(pf: &ProblemFile, path: &Path) -> Result<Report, String> {
    let mut rep = file_report("check", path);
    match &pf.kind {
        ProblemKind::Prop { .. } => {
            let p = pf.inductive()?;
            match p.consistency().map_err(|e| e.to_string())? {
                None => {
                    rep.consistent = Some(false);
                    return Ok(rep);
                }
                Some(_) => rep.consistent = Some(true),
            }
            let table = p.collapse().map_err(|e| e.to_string())?;
            rep.violations = table.check_rules().iter().map(|v| v.to_string()).collect();
            match table.completeness_gap() {
                None => rep.notes.push("the collapsed event table is complete".into()),
                Some(gap) => rep.notes.push(format!("completeness gap: {gap}")),
            }
        }
        ProblemKind::Fo { sig, axioms, .. } => {
            let prob = pf.poi(None)?;
            let perms = enumerate_permutations(sig)?;
            let fixing = perms
                .iter()
                .filter(|pi| {
                    invariant(sig, axioms, pi, prob.domain_bound()).unwrap_or(false)
                })
                .count();
            rep.notes.push(format!(
                "{} signature permutations, {} fix the root theory up to domain bound {}",
                perms.len(),
                fixing,
                prob.domain_bound()
            ));
            rep.caveat = prob.bounded_caveat();
        }
    }
    Ok(rep)
}

fn consistency(pf: &ProblemFile, path: &Path) -> Result<Report, String> {
    let mut rep = file_report("consistency", path);
    match &pf.kind {
        ProblemKind::Prop { .. } => {
            let p = pf.inductive()?;
            match p.consistency().map_err(|e| e.to_string())? {
                Some(space) => {
                    rep.consistent = Some(true);
                    rep.witness = Some(render_space(&space));
                }
                None => rep.consistent = Some(false),
            }
        }
        ProblemKind::Fo { .. } => {
            let prob = pf.poi(None)?;
            rep.caveat = prob.bounded_caveat();
            match poi_admissible_model(&prob)? {
                Some(model) => {
                    rep.consistent = Some(true);
                    rep.witness = Some(render_model(&model));
                }
                None => rep.consistent = Some(false),
            }
        }
    }
    Ok(rep)
}

fn derive(
    pf: &ProblemFile,
    path: &Path,
    max_pv: Option<usize>,
    explain: bool,
) -> Result<Report, String> {
    let ProblemKind::Prop { decls, root, assumes, independence, queries } = &pf.kind else {
        return Err("this file declares a signature; use the `poi` command".to_string());
    };
    if let Some(cap) = max_pv {
        if decls.len() > cap {
            return Err(format!(
                "problem has {} propositional variables, more than --max-pv {cap}",
                decls.len()
            ));
        }
    }
    let mut rep = file_report("derive", path);
    if queries.is_empty() {
        return Err("the file has no `query`".to_string());
    }
    if *independence {
        let mut marginals = Vec::new();
        for (extras, f, p) in assumes {
            if !extras.is_empty() {
                return Err(
                    "under `condition independence` every assumption must be unconditional"
                        .to_string(),
                );
            }
            marginals.push((f.clone(), p.clone()));
        }
        for (extras, q) in queries {
            if !extras.is_empty() {
                return Err(
                    "conditional queries are not supported with `condition independence`"
                        .to_string(),
                );
            }
            let r = derive_under_independence(decls, root, &marginals, q)
                .map_err(|e| e.to_string())?;
            rep.verdicts.push(verdict_from(&fmt_query(&[], q), r, explain));
        }
    } else {
        let p = pf.inductive()?;
        for (extras, q) in queries {
            let x = p.antecedent(extras.clone());
            let r = p.derive(&x, q).map_err(|e| e.to_string())?;
            rep.verdicts.push(verdict_from(&fmt_query(extras, q), r, explain));
        }
    }
    Ok(rep)
}

fn poi(
    pf: &ProblemFile,
    path: &Path,
    bound: Option<usize>,
    explain: bool,
) -> Result<Report, String> {
    let prob = pf.poi(bound)?;
    if prob.queries().is_empty() {
        return Err("the file has no `query`".to_string());
    }
    let mut rep = file_report("poi", path);
    let out = poi_forced(&prob)?;
    for (q, v) in prob.queries().iter().zip(out.verdicts) {
        let mut qv;
        match v {
            PoIVerdict::Forced { value, certificate } => {
                qv = QueryVerdict::new(q.to_string(), "forced");
                qv.value = Some(value);
                if explain {
                    qv.certificate = certificate;
                }
            }
            PoIVerdict::NotForced { lower, upper, lower_witness, upper_witness } => {
                qv = QueryVerdict::new(q.to_string(), "not-forced");
                qv.lower = Some(lower);
                qv.upper = Some(upper);
                if explain {
                    qv.witnesses = render_model(&lower_witness);
                    qv.witnesses.push("--".into());
                    qv.witnesses.extend(render_model(&upper_witness));
                }
            }
            PoIVerdict::Inconsistent => {
                qv = QueryVerdict::new(q.to_string(), "inconsistent");
            }
        }
        rep.verdicts.push(qv);
    }
    rep.caveat = out.caveat;
    Ok(rep)
}

fn bertrand(
    scheme: Option<&str>,
    exact: bool,
    mc: Option<u64>,
    seed: u64,
    invariance: Option<usize>,
) -> Result<Report, String> {
    let schemes: Vec<ChordScheme> = match scheme {
        Some(s) => vec![s.parse()?],
        None => ChordScheme::ALL.to_vec(),
    };
    let exact = exact || (mc.is_none() && invariance.is_none());
    let mut rep = Report::new("bertrand");
    for s in schemes {
        let mut line = BertrandLine {
            scheme: s.name().to_string(),
            exact: None,
            mc: None,
            invariance: None,
        };
        if exact {
            line.exact = Some(bertrand_exact(s));
        }
        if let Some(n) = mc {
            let est = bertrand_mc(s, n, seed)?;
            line.mc = Some(McLine {
                samples: est.samples,
                hits: est.hits,
                estimate: est.estimate,
                seed: est.seed,
            });
        }
        if let Some(k) = invariance {
            let r = rotation_invariance_check(s, k)?;
            line.invariance = Some(InvarianceLine {
                sectors: r.k,
                rotations_checked: r.rotations_checked,
                invariant: r.invariant,
                p_below_half: r.p_below_half,
            });
        }
        rep.bertrand.push(line);
    }
    Ok(rep)
}

fn example(name: Option<&str>) -> Result<Report, String> {
    let mut rep = Report::new("example");
    match name {
        None => {
            for e in registry::ENTRIES {
                rep.notes.push(format!("{} — {} (expected: {})", e.name, e.summary, e.expected));
            }
        }
        Some(n) => {
            if registry::entry(n).is_none() {
                return Err(format!(
                    "unknown example `{n}`; known names: {}",
                    registry::names().join(", ")
                ));
            }
            rep.examples.push(registry::run(n));
        }
    }
    Ok(rep)
}

fn verdict_from(query: &str, r: DeriveResult, explain: bool) -> QueryVerdict {
    match r {
        DeriveResult::Forced(v) => {
            let mut qv = QueryVerdict::new(query.to_string(), "forced");
            qv.value = Some(v);
            qv
        }
        DeriveResult::Interval {
            lower,
            upper,
            lower_attained,
            upper_attained,
            lower_witness,
            upper_witness,
        } => {
            let mut qv = QueryVerdict::new(query.to_string(), "interval");
            qv.lower = Some(lower);
            qv.upper = Some(upper);
            qv.lower_attained = Some(lower_attained);
            qv.upper_attained = Some(upper_attained);
            if explain {
                qv.witnesses = render_space(&lower_witness);
                qv.witnesses.push("--".into());
                qv.witnesses.extend(render_space(&upper_witness));
            }
            qv
        }
        DeriveResult::Inconsistent => QueryVerdict::new(query.to_string(), "inconsistent"),
        DeriveResult::Undefined => QueryVerdict::new(query.to_string(), "undefined"),
    }
}

fn fmt_query(extras: &[Formula], q: &Formula) -> String {
    if extras.is_empty() {
        format!("P({q} | T0)")
    } else {
        let tail: Vec<String> = extras.iter().map(|e| e.to_string()).collect();
        format!("P({q} | T0, {})", tail.join(", "))
    }
}

fn render_space(space: &FiniteProbSpace) -> Vec<String> {
    let labels = space.labels();
    match space.atom_masses() {
        Some(masses) => labels
            .iter()
            .zip(masses)
            .map(|(l, m)| format!("{l}: {m}"))
            .collect(),
        None => space
            .block_masses()
            .map(|(ev, m)| {
                let names: Vec<&str> = ev.iter().map(|i| labels[i].as_str()).collect();
                format!("{{{}}}: {m}", names.join(", "))
            })
            .collect(),
    }
}

fn render_model(model: &FinModel) -> Vec<String> {
    model
        .structures()
        .iter()
        .enumerate()
        .filter_map(|(i, st)| {
            let mass = model.mass(i)?;
            if mass == indlog::Rat::zero() {
                None
            } else {
                Some(format!("mass {mass}: {st}"))
            }
        })
        .collect()
}
