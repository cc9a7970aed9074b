use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bisimkit")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn bisimilar_roots_exit_zero_with_relation() {
    let out = run(&["bisim", &data("a.lts.json"), &data("b.lts.json"), "--witness"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["bisimilar"], true);
    let rel = v["relation"].as_array().unwrap();
    assert!(rel.contains(&serde_json::json!(["p", "r"])));
    assert_eq!(rel.len(), 3);
}

#[test]
fn non_bisimilar_exit_one() {
    let out = run(&["--format", "text", "bisim", &data("a.lts.json"), &data("c.lts.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "p !~ r\n");
}

#[test]
fn relation_only_on_request() {
    let out = run(&["bisim", &data("a.lts.json"), &data("b.lts.json")]);
    assert!(json(&out).get("relation").is_none());
}

#[test]
fn undeclared_target_names_the_edge() {
    let out = run(&["bisim", &data("dangling.lts.json"), &data("b.lts.json")]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("edges[0]"), "{err}");
    assert!(err.contains("\"t\""), "{err}");
}

#[test]
fn zero_denominator_is_an_input_error() {
    let out = run(&["nlmp-bisim", &data("bad_rational.nlmp.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("denominator"), "{}", stderr(&out));
}

#[test]
fn malformed_json_reports_position() {
    let out = run(&["rank", &data("malformed.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn missing_file_is_an_input_error() {
    let out = run(&["rank", &data("nope.json")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nlmp_state_bisimilarity() {
    let f = data("three.nlmp.json");
    let out = run(&["nlmp-bisim", &f, "--left-state", "s", "--right-state", "t"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["nlmp-bisim", &f, "--left-state", "s", "--right-state", "u"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["nlmp-bisim", &f]);
    assert_eq!(json(&out)["relation"].as_array().unwrap().len(), 5);
}

#[test]
fn nlmp_external_between_files() {
    let f = data("three.nlmp.json");
    let out = run(&["nlmp-bisim", &f, &f, "--left-state", "s", "--right-state", "t"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn ranks() {
    let out = run(&["rank", &data("c.lts.json")]);
    assert_eq!(json(&out)["display"], "2");
    let out = run(&["rank", &data("cyclic.lts.json")]);
    assert_eq!(json(&out)["rank"], "infinite");
    let out = run(&["rank", &data("a_evens.tree.json")]);
    let v = json(&out);
    assert_eq!(v["root_rank"]["display"], "ω");
    assert_eq!(v["tree_rank"]["display"], "ω+1");
    let out = run(&["rank", &data("small.tree.json")]);
    assert_eq!(json(&out)["root_rank"]["display"], "2");
}

#[test]
fn expansion_canonical_form() {
    let out = run(&["expand", &data("a.lts.json")]);
    assert_eq!(json(&out)["canonical"], "(1:a[()^w,])");
    // Both copies of the a-successor collapse into one ω-class, as for b.
    let other = run(&["expand", &data("b.lts.json")]);
    assert_eq!(json(&out)["canonical"], json(&other)["canonical"]);
}

#[test]
fn ill_founded_expansion_needs_a_depth() {
    assert_eq!(run(&["expand", &data("cyclic.lts.json")]).status.code(), Some(2));
    let out = run(&["expand", &data("cyclic.lts.json"), "--depth", "2"]);
    assert_eq!(json(&out)["canonical"], "(1:a[(1:a[()^w,])^w,])");
}

#[test]
fn isomorphic_explicit_trees() {
    let out = run(&["iso", &data("small.tree.json"), &data("small_swapped.tree.json")]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["iso", &data("small.tree.json"), &data("chain.tree.json")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn e0_verbs() {
    let (ev, sh, od) = (data("evens.ep.json"), data("evens_shift.ep.json"), data("odds.ep.json"));
    assert_eq!(run(&["e0", "check", &ev, &sh]).status.code(), Some(0));
    assert_eq!(run(&["e0", "check", &ev, &od]).status.code(), Some(1));

    let out = run(&["e0", "witness", &ev, &sh, "--bound", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["matching"].as_array().unwrap().len(), 4);
    let out = run(&["e0", "witness", &ev, &od]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["distinguisher"].is_object());

    let out = run(&["e0", "reduce", &od]);
    assert_eq!(json(&out)["tree_rank"]["display"], "ω+2");
    let out = run(&["e0", "reduce", &data("finite.ep.json")]);
    assert_eq!(json(&out)["tree_rank"]["display"], "ω+1");
}

#[test]
fn substructure_verbs() {
    let f = data("three.nlmp.json");
    let out = run(&["substructure", &f, "--state", "s"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["carrier"], serde_json::json!(["s", "u"]));

    let out = run(&["substructure", &f, "--carrier", &data("carrier.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["thick"], false);

    let out = run(&["substructure", &f, "--sum", &f]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["sum"]["states"].as_array().unwrap().len(), 6);
}

#[test]
fn eval_on_lts_and_trees() {
    let phi = data("dia.formula.json");
    assert_eq!(run(&["eval", &data("c.lts.json"), &phi]).status.code(), Some(0));
    assert_eq!(run(&["eval", &data("b.lts.json"), &phi]).status.code(), Some(1));
    // Explicit trees are read as processes over the single label "*".
    let star = data("dia_star.formula.json");
    assert_eq!(run(&["eval", &data("small.tree.json"), &star]).status.code(), Some(0));
    assert_eq!(run(&["eval", &data("a_evens.tree.json"), &star]).status.code(), Some(0));
}

#[test]
fn uniform_search_agrees_with_direct_check() {
    let f = data("three.nlmp.json");
    let u = data("three.uniform.json");
    let out = run(&["--witness", "nlmp-bisim", &f, "--uniform", &u, "--left-state", "s", "--right-state", "t"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json(&out)["z_closed"], true);
    let out = run(&["nlmp-bisim", &f, "--uniform", &u, "--left-state", "s", "--right-state", "u"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["nlmp-bisim", &f, "--uniform", &u, "--bound", "1", "--left-state", "s", "--right-state", "t"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dot_export_is_stable() {
    let out = run(&["export-dot", &data("c.lts.json")]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, std::fs::read_to_string(data("c.dot")).unwrap());

    let out = run(&["export-dot", &data("a_evens.tree.json"), "--depth", "5", "--width", "5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    // Branches of lengths 1, 3 and 5 below the root.
    assert_eq!(text.matches("->").count(), 1 + 3 + 5);
    let again = run(&["export-dot", &data("a_evens.tree.json"), "--depth", "5", "--width", "5"]);
    assert_eq!(text.as_bytes(), again.stdout.as_slice());
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let a = run(&["verify", "--suite", "e0,rank", "--seed", "3"]);
    let b = run(&["verify", "--suite", "e0,rank", "--seed", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["suites"].as_array().unwrap().len(), 2);
}

#[test]
fn seed_from_environment() {
    let env = Command::new(env!("CARGO_BIN_EXE_bisimkit"))
        .args(["verify", "--suite", "treeiso"])
        .env("BISIMKIT_SEED", "11")
        .output()
        .unwrap();
    let flag = run(&["verify", "--suite", "treeiso", "--seed", "11"]);
    assert_eq!(env.stdout, flag.stdout);
    assert_eq!(json(&env)["seed"], 11);
}

#[test]
fn unknown_suite_is_an_input_error() {
    assert_eq!(run(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
}
