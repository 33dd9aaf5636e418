//! End-to-end tests of the `qli` binary: output formats, exit codes,
//! and agreement with the library-level reference computations.

use qli_core::category::{builtin, save_category};
use qli_core::diagram::parse_pd;
use qli_core::engine::framing_normalize;
use qli_core::oracle::kauffman_closed;
use qli_core::planner::ContractionPlan;
use qli_core::ring::text;
use std::io::Write;
use std::process::{Command, Output, Stdio};

const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";
const HOPF: &str = "X[1,3,2,4] X[3,1,4,2]";
const TWO_KINKS: &str = "X[1,1,2,2] X[3,3,4,4]";

fn qli(args: &[&str], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qli"));
    cmd.args(args).stdout(Stdio::piped()).stderr(Stdio::piped());
    match stdin {
        Some(text) => {
            cmd.stdin(Stdio::piped());
            let mut child = cmd.spawn().expect("spawn qli");
            child
                .stdin
                .take()
                .expect("stdin handle")
                .write_all(text.as_bytes())
                .expect("write stdin");
            child.wait_with_output().expect("qli output")
        }
        None => {
            cmd.stdin(Stdio::null());
            cmd.output().expect("qli output")
        }
    }
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn pd_file(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).expect("write pd");
    path.to_str().expect("utf8 path").to_string()
}

#[test]
fn normalized_trefoil_matches_the_state_sum_reference() {
    let dir = tempfile::tempdir().unwrap();
    let path = pd_file(&dir, "trefoil.pd", TREFOIL);
    let out = qli(&["compute", &path, "--normalize-framing"], None);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let first = stdout_of(&out).lines().next().expect("first line").to_string();

    let d = parse_pd(TREFOIL).unwrap();
    let cat = builtin("sl2").unwrap();
    let expected = framing_normalize(&kauffman_closed(&d), d.writhe(), &cat);
    assert_eq!(first, text::render(&expected, &cat.variable));
}

#[test]
fn trivial_category_gives_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = pd_file(&dir, "trefoil.pd", TREFOIL);
    let out = qli(&["compute", &path, "--category", "trivial"], None);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert_eq!(stdout_of(&out).lines().next(), Some("1"));
}

#[test]
fn stdin_dash_reads_the_diagram() {
    let out = qli(&["compute", "-"], Some(HOPF));
    assert!(out.status.success(), "{}", stderr_of(&out));
    let d = parse_pd(HOPF).unwrap();
    let cat = builtin("sl2").unwrap();
    let expected = text::render(&kauffman_closed(&d), &cat.variable);
    assert_eq!(stdout_of(&out).lines().next(), Some(expected.as_str()));
}

#[test]
fn split_diagram_reports_components_and_product_value() {
    let out = qli(&["compute", "-"], Some(TWO_KINKS));
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text_out = stdout_of(&out);
    assert!(text_out.contains("components: 2"), "{text_out}");
    let d = parse_pd(TWO_KINKS).unwrap();
    let cat = builtin("sl2").unwrap();
    let expected = text::render(&kauffman_closed(&d), &cat.variable);
    assert_eq!(text_out.lines().next(), Some(expected.as_str()));
}

#[test]
fn json_document_is_versioned_and_round_trips() {
    let out = qli(&["compute", "-", "--json", "--normalize-framing"], Some(TREFOIL));
    assert!(out.status.success(), "{}", stderr_of(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("json stdout");
    assert_eq!(doc["version"], 1);
    assert_eq!(doc["normalized"], true);
    assert_eq!(doc["writhe"], -3);
    assert_eq!(doc["components"], 1);
    let stats = doc["stats"].as_object().expect("stats object");
    let mut keys: Vec<&str> = stats.keys().map(|k| k.as_str()).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        ["congestion", "merges_large", "merges_small", "peak_len", "scalar_ops", "slides"]
    );

    // The invariant text parses back to the library-computed polynomial.
    let d = parse_pd(TREFOIL).unwrap();
    let cat = builtin("sl2").unwrap();
    let expected = framing_normalize(&kauffman_closed(&d), d.writhe(), &cat);
    let parsed = text::parse(doc["invariant"].as_str().expect("invariant string")).unwrap();
    assert_eq!(parsed, expected);
}

#[test]
fn emit_plan_includes_a_deserializable_plan_and_cost() {
    let out = qli(&["compute", "-", "--emit-plan"], Some(HOPF));
    assert!(out.status.success(), "{}", stderr_of(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("json stdout");
    let plans = doc["plans"].as_array().expect("plans array");
    assert_eq!(plans.len(), 1);
    let plan_value = plans[0]["plan"].clone();
    let plan: ContractionPlan = serde_json::from_value(plan_value.clone()).expect("plan decodes");
    assert_eq!(serde_json::to_value(&plan).expect("re-encode"), plan_value, "plan round trip");
    assert!(!plan.steps.is_empty());
    let cost = &plans[0]["cost"];
    assert!(cost["scalar_ops"].as_u64().expect("ops") > 0);
    assert!(cost["degree_present"].as_bool().expect("present"));
}

#[test]
fn modular_backend_reports_points_primes_and_agrees_with_the_oracle() {
    let out =
        qli(&["compute", "-", "--backend", "modular", "--oracle-check", "--json"], Some(HOPF));
    assert!(out.status.success(), "{}", stderr_of(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("json stdout");
    assert_eq!(doc["oracle"], "agree");
    let modular = doc["modular"].as_array().expect("modular array");
    assert_eq!(modular.len(), 1);
    assert!(modular[0]["points"].as_u64().expect("points") >= 1);
    assert!(!modular[0]["primes"].as_array().expect("primes").is_empty());
    assert!(modular[0]["max_point_bits"].as_u64().is_some());

    let d = parse_pd(HOPF).unwrap();
    let cat = builtin("sl2").unwrap();
    let parsed = text::parse(doc["invariant"].as_str().expect("invariant")).unwrap();
    assert_eq!(parsed, kauffman_closed(&d));
}

#[test]
fn decompose_reports_congestion_weights_and_strategy() {
    let out = qli(&["decompose", "-", "--decomposition", "exact"], Some(TREFOIL));
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text_out = stdout_of(&out);
    assert!(text_out.contains("leaf vertex"), "tree text missing:\n{text_out}");
    let json_start = text_out.find("\n{").expect("json document") + 1;
    let doc: serde_json::Value = serde_json::from_str(&text_out[json_start..]).expect("json");
    assert_eq!(doc["version"], 1);
    assert_eq!(doc["congestion"], 4);
    assert_eq!(doc["realizable"], true);
    assert_eq!(doc["strategy"], "exact");
    assert!(!doc["weights"].as_array().expect("weights").is_empty());
}

#[test]
fn check_category_accepts_the_shipped_file_and_names_violations() {
    // Shipped sl2 file passes.
    let shipped = concat!(env!("CARGO_MANIFEST_DIR"), "/../../categories/sl2.json");
    let out = qli(&["check-category", shipped], None);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(stdout_of(&out).contains("axiom checks passed"));

    // A perturbed braiding entry is rejected naming the broken identity.
    let mut file: serde_json::Value =
        serde_json::from_str(&save_category(&builtin("sl2").unwrap())).unwrap();
    let cell = &mut file["braiding"]["V,V"][2][2];
    let bumped = format!("{} + 1", cell.as_str().unwrap());
    *cell = serde_json::Value::String(bumped);
    let dir = tempfile::tempdir().unwrap();
    let path = pd_file(&dir, "perturbed.json", &serde_json::to_string(&file).unwrap());
    let out = qli(&["check-category", &path], None);
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
    let err = stderr_of(&out);
    assert!(err.contains("Yang-Baxter") || err.contains("inverse"), "{err}");
}

#[test]
fn exit_codes_distinguish_parse_category_and_realization_errors() {
    // 1: malformed PD.
    let out = qli(&["compute", "-"], Some("X[1,2,3]"));
    assert_eq!(out.status.code(), Some(1), "{}", stderr_of(&out));

    // 1: --color index out of range.
    let out = qli(&["compute", "-", "--color", "9=V"], Some(HOPF));
    assert_eq!(out.status.code(), Some(1), "{}", stderr_of(&out));

    // 2: unknown category and unknown colour name.
    let out = qli(&["compute", "-", "--category", "no-such-file.json"], Some(HOPF));
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
    let out = qli(&["compute", "-", "--color", "1=W"], Some(HOPF));
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));

    // 3: root edge out of range (no fallback).
    let out = qli(&["compute", "-", "--root-edge", "999"], Some(HOPF));
    assert_eq!(out.status.code(), Some(3), "{}", stderr_of(&out));
}

#[test]
fn color_flags_match_the_header_syntax() {
    let with_flags = qli(&["compute", "-", "--color", "1=V", "--color", "2=V"], Some(HOPF));
    assert!(with_flags.status.success(), "{}", stderr_of(&with_flags));
    let with_header = qli(
        &["compute", "-"],
        Some(&format!("component 1 color V\ncomponent 2 color V\n{HOPF}")),
    );
    assert!(with_header.status.success(), "{}", stderr_of(&with_header));
    assert_eq!(
        stdout_of(&with_flags).lines().next(),
        stdout_of(&with_header).lines().next()
    );
}

#[test]
fn oracle_subcommand_prints_both_values_and_agreement() {
    let out = qli(&["oracle", "-"], Some(HOPF));
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text_out = stdout_of(&out);
    assert!(text_out.contains("dense sweep oracle:"), "{text_out}");
    assert!(text_out.contains("state sum oracle:"), "{text_out}");
    assert!(text_out.contains("oracle: agree"), "{text_out}");

    // With a non-sl2 category the state-sum comparison is skipped.
    let out = qli(&["oracle", "-", "--category", "trivial"], Some(HOPF));
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(stdout_of(&out).contains("skipped"), "{}", stdout_of(&out));
}

#[test]
fn bench_sweeps_the_torus_family_with_bounded_ratio() {
    let out = qli(&["bench", "--max", "7"], None);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text_out = stdout_of(&out);
    assert!(text_out.contains("ratio spread max/min:"), "{text_out}");
    for k in 3..=7 {
        assert!(
            text_out.lines().any(|l| l.trim_start().starts_with(&format!("{k} "))),
            "missing row for k={k}:\n{text_out}"
        );
    }
    let spread: f64 = text_out
        .lines()
        .find_map(|l| l.strip_prefix("ratio spread max/min: "))
        .expect("spread line")
        .parse()
        .expect("spread number");
    assert!(spread < 4.0, "spread {spread}");
}

#[test]
fn jobs_flag_is_accepted_by_the_modular_backend() {
    let out = qli(&["compute", "-", "--backend", "modular", "--jobs", "2"], Some(TREFOIL));
    assert!(out.status.success(), "{}", stderr_of(&out));
    let d = parse_pd(TREFOIL).unwrap();
    let cat = builtin("sl2").unwrap();
    let expected = text::render(&kauffman_closed(&d), &cat.variable);
    assert_eq!(stdout_of(&out).lines().next(), Some(expected.as_str()));
}
