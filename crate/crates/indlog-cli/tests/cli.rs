//! End-to-end tests of the `indlog` binary: exit codes, parse-error
//! positions, JSON round-tripping, and the shipped problem files.

use std::path::PathBuf;
use std::process::{Command, Output};

use indlog_cli::report::Report;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_indlog"))
}

fn prob(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems").join(name)
}

fn run(args: &[&str]) -> Output {
    let mut cmd = bin();
    for a in args {
        if let Some(name) = a.strip_prefix("@") {
            cmd.arg(prob(name));
        } else {
            cmd.arg(a);
        }
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn derive_forces_the_linked_pair_to_a_quarter() {
    let out = run(&["derive", "@mathse_half.prob"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("= 1/4  [forced]"), "{}", stdout(&out));
}

#[test]
fn derive_exits_two_on_inconsistency() {
    let out = run(&["derive", "@mathse_quarter.prob"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("inconsistent"));
}

#[test]
fn consistency_splits_the_mathse_pair() {
    let ok = run(&["consistency", "@mathse_half.prob"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("consistent"));

    let bad = run(&["consistency", "@mathse_quarter.prob"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stdout(&bad).contains("inconsistent"));
}

#[test]
fn poi_answers_the_three_balls_queries() {
    let out = run(&["poi", "@three_balls.prob"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.matches("= 1/6  [forced]").count(), 6, "{text}");
    assert_eq!(text.matches("= 0  [forced]").count(), 2, "{text}");
}

#[test]
fn poi_rejects_propositional_files_as_usage_error() {
    let out = run(&["poi", "@mathse_half.prob"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("derive"), "{}", stderr(&out));
}

#[test]
fn derive_rejects_signature_files_as_usage_error() {
    let out = run(&["derive", "@one_coin.prob"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("poi"), "{}", stderr(&out));
}

#[test]
fn parse_errors_carry_file_line_and_column() {
    let dir = std::env::temp_dir();
    let path = dir.join(format!("indlog_cli_bad_{}.prob", std::process::id()));
    std::fs::write(&path, "vars a b;\nassume P(a &&& b) = 1/2;\n").unwrap();
    let out = bin().arg("derive").arg(&path).output().unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("line 2"), "{err}");
    assert!(err.contains("col 1"), "{err}");
}

#[test]
fn unknown_flags_and_subcommands_exit_one() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["bertrand", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["example", "no-such-example"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("known names"), "{}", stderr(&out));
}

#[test]
fn json_reports_round_trip_and_are_deterministic() {
    let a = run(&["poi", "@two_balls.prob", "--json", "--explain"]);
    let b = run(&["poi", "@two_balls.prob", "--json", "--explain"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b), "identical inputs give identical bytes");

    let text = stdout(&a);
    let report: Report = serde_json::from_str(&text).expect("report parses back");
    assert_eq!(format!("{}\n", report.to_json()), text, "re-render is identical");
    assert_eq!(report.schema, "indlog-report/1");
}

#[test]
fn human_text_is_a_function_of_the_json_report() {
    let json = run(&["bertrand", "--invariance", "12", "--json"]);
    let human = run(&["bertrand", "--invariance", "12"]);
    let report: Report = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(report.render_human(), stdout(&human));
}

#[test]
fn bertrand_exact_values_in_json() {
    let out = run(&["bertrand", "--json"]);
    let report: Report = serde_json::from_str(&stdout(&out)).unwrap();
    let exact: Vec<String> = report
        .bertrand
        .iter()
        .map(|l| format!("{}={}", l.scheme, l.exact.as_ref().unwrap()))
        .collect();
    assert_eq!(exact, ["endpoints=1/3", "radius=1/2", "midpoint=1/4"]);
}

#[test]
fn bertrand_mc_is_seed_reproducible() {
    let a = run(&["bertrand", "--scheme", "midpoint", "--mc", "20000", "--seed", "9"]);
    let b = run(&["bertrand", "--scheme", "midpoint", "--mc", "20000", "--seed", "9"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("(seed 9)"));
}

#[test]
fn poi_bound_override_is_accepted() {
    let out = run(&["poi", "@one_coin.prob", "--bound", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("= 1/2  [forced]"));
}

#[test]
fn derive_max_pv_refuses_oversized_problems() {
    let out = run(&["derive", "@fair_coins_n10.prob", "--max-pv", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--max-pv"), "{}", stderr(&out));
}

#[test]
fn explain_includes_certificates() {
    let out = run(&["poi", "@one_coin.prob", "--explain"]);
    let text = stdout(&out);
    assert!(text.contains("certificate:"), "{text}");
    assert!(text.contains("additivity"), "{text}");

    let bare = run(&["poi", "@one_coin.prob"]);
    assert!(!stdout(&bare).contains("certificate:"));
}

#[test]
fn example_lists_the_mandated_names() {
    let out = run(&["example"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for name in ["one-coin", "three-balls", "two-balls", "fair-coins-n10", "bertrand"] {
        assert!(text.contains(name), "listing should mention {name}: {text}");
    }
}

#[test]
fn self_test_passes_every_canned_example() {
    let out = run(&["self-test"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.matches(": ok — ").count(), indlog_cli::registry::ENTRIES.len(), "{text}");
    assert!(!text.contains(": fail"));
}

#[test]
fn shipped_problem_files_match_their_embedded_copies() {
    for entry in indlog_cli::registry::ENTRIES {
        let Some(embedded) = entry.source else { continue };
        let file = entry.name.replace('-', "_") + ".prob";
        let on_disk = std::fs::read_to_string(prob(&file))
            .unwrap_or_else(|e| panic!("{file}: {e}"));
        assert_eq!(on_disk, embedded, "{file} drifted from the registry copy");
    }
}
