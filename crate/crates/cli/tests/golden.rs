//! Runs the binary on the fixtures and compares stdout, stderr and the exit
//! code with the files in `tests/golden`. Set `UPDATE_GOLDEN=1` to rewrite them.

use std::path::{Path, PathBuf};
use std::process::Command;

const CASES: &[(&str, &[&str])] = &[
    ("lattice_leq", &["lattice", "leq", "D(x)", "D(x,y)", "--ring", "QQ[x,y]"]),
    ("lattice_leq_false", &["lattice", "leq", "D(1)", "D(x,y)", "--ring", "QQ[x,y]"]),
    ("lattice_meet", &["lattice", "meet", "D(x,y)", "D(x,y)", "--ring", "QQ[x,y]"]),
    ("lattice_eq_json", &["lattice", "eq", "D(x^2)", "D(x)", "--ring", "QQ[x,y]", "--format", "json"]),
    ("ring", &["ring", "GF(5)[x,y]/(x^2+y^2-1, x*y)", "x^3", "y^4"]),
    ("ring_malformed", &["ring", "QQ[x,y]/(x^2 +* y)"]),
    ("ideal_member", &["ideal", "member", "x^2*y - y", "x - 1", "--ring", "QQ[x,y]"]),
    ("ideal_radical", &["ideal", "radical", "x", "x^3", "--ring", "QQ[x]"]),
    ("ideal_groebner", &["ideal", "groebner", "x^2", "x*y - 1", "--ring", "QQ[x,y]"]),
    ("glue", &["glue", "family_line.json"]),
    ("glue_conflict", &["glue", "family_conflict.json"]),
    ("validate_p1", &["scheme", "validate", "p1.json"]),
    ("validate_broken", &["scheme", "validate", "broken_p1.json"]),
    ("sections_constant", &["scheme", "sections", "p1.json", "3", "3"]),
    ("sections_conflict", &["scheme", "sections", "p1.json", "t", "s"]),
    ("eta_punctured", &["scheme", "eta", "punctured_plane.json", "x; x", "y; y"]),
    ("restrict_p1", &["scheme", "restrict", "p1.json", "D(t)", "D(s)"]),
    ("points_circle", &["points", "circle.json", "--over", "GF(3);GF(5)"]),
    ("cover_check", &["cover-check", "x", "y", "1 - x - y", "--ring", "QQ[x,y]"]),
    ("cover_check_fails", &["cover-check", "x", "y", "--ring", "QQ[x,y]"]),
    ("locality_p1", &["locality-check", "p1.json", "--over", "GF(3)xGF(3)"]),
    ("compare_p1", &["compare", "p1.json", "--over", "GF(3)"]),
    ("compare_punctured_json", &["compare", "punctured_plane.json", "--over", "GF(2)", "--format", "json"]),
    ("bad_version", &["scheme", "validate", "../tests/inputs/bad_version.json"]),
    ("unknown_field", &["scheme", "validate", "../tests/inputs/unknown_field.json"]),
    ("bad_relation", &["scheme", "validate", "../tests/inputs/bad_relation.json"]),
];

fn run(args: &[&str]) -> String {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let out = Command::new(env!("CARGO_BIN_EXE_qcqs"))
        .args(args)
        .current_dir(fixtures)
        .output()
        .expect("binary runs");
    format!(
        "exit: {}\n--- stdout\n{}--- stderr\n{}",
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    )
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.txt"))
}

#[test]
fn outputs_match_golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut failures = Vec::new();
    for (name, args) in CASES {
        let got = run(args);
        let path = golden_path(name);
        if update {
            std::fs::write(&path, &got).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).unwrap_or_default();
        if got != want {
            failures.push(format!("{name}:\n{got}"));
        }
    }
    assert!(failures.is_empty(), "golden mismatches:\n{}", failures.join("\n"));
}

#[test]
fn output_is_deterministic() {
    for args in [&["compare", "p1.json", "--over", "GF(2);GF(2)xGF(2)"][..], &["points", "punctured_plane.json", "--over", "GF(3)"]] {
        assert_eq!(run(args), run(args));
    }
}

#[test]
fn exit_codes() {
    let code = |s: String| s.lines().next().unwrap().to_string();
    assert_eq!(code(run(&["compare", "p1.json", "--over", "GF(3)"])), "exit: 0");
    assert_eq!(code(run(&["lattice", "eq", "D(1)", "D(x)", "--ring", "QQ[x]"])), "exit: 1");
    assert_eq!(code(run(&["lattice", "leq", "D(x", "D(x)", "--ring", "QQ[x]"])), "exit: 2");
    assert_eq!(code(run(&["points", "missing.json", "--over", "GF(2)"])), "exit: 2");
    assert_eq!(code(run(&["points", "p1.json"])), "exit: 2");
}

#[test]
fn compare_report_embeds_bijection() {
    let out = run(&["compare", "p1.json", "--over", "GF(3)", "--format", "json"]);
    let json = out.split("--- stdout\n").nth(1).unwrap().split("--- stderr").next().unwrap();
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    let test = &v["report"]["tests"][0];
    assert_eq!(test["lattice_count"], 4);
    assert_eq!(test["functorial_count"], 4);
    assert_eq!(test["bijection"].as_array().unwrap().len(), 4);
    assert_eq!(v["report"]["passed"], true);
}
