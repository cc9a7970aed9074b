use bisimkit_core::dot::{lts_dot, multitree_dot, nlmp_dot};
use bisimkit_core::io::{nlmp_to_json, parse_lts, parse_nlmp, parse_tree, IoError, TreeInput};
use bisimkit_core::{Count, MultiTree};

#[test]
fn lts_dot_golden() {
    let lts = parse_lts("x", r#"{"labels":["a","b"],"states":["s","t"],"root":"s","edges":[["s","a","t"],["t","b","s"]]}"#).unwrap();
    let expected = "digraph lts {\n  s0 [label=\"s\", shape=doublecircle];\n  s1 [label=\"t\", shape=circle];\n  s0 -> s1 [label=\"a\"];\n  s1 -> s0 [label=\"b\"];\n}\n";
    assert_eq!(lts_dot(&lts), expected);
}

#[test]
fn multitree_dot_marks_counts() {
    let t = MultiTree::leaf().with_child("a", MultiTree::leaf(), Count::Omega);
    assert!(multitree_dot(&t).contains("a ×w"));
}

#[test]
fn nlmp_dot_has_weights() {
    let n = parse_nlmp("n", r#"{"labels":["a"],"states":["s","t"],"trans":{"s":{"a":[{"t":"1/3"}]}}}"#).unwrap();
    assert!(nlmp_dot(&n).contains("label=\"1/3\""));
    assert_eq!(parse_nlmp("n", &nlmp_to_json(&n).to_string()).unwrap(), n);
}

#[test]
fn schema_errors() {
    assert!(matches!(parse_lts("x", r#"{"labels":[],"states":["s"],"root":"s"}"#), Err(IoError::Schema { .. })));
    assert!(matches!(parse_lts("x", r#"{"labels":[],"states":["s"],"root":"t","edges":[]}"#), Err(IoError::Lts { .. })));
    assert!(parse_nlmp("n", r#"{"labels":["a"],"states":["s"],"trans":{"s":{"a":[{"s":"3/2"}]}}}"#).is_err());
    assert!(parse_nlmp("n", r#"{"labels":["a"],"states":["s"],"trans":{"q":{}}}"#).unwrap_err().to_string().contains("\"q\""));
    assert!(matches!(parse_tree("t", r#"{"kind":"glue","children":[{"kind":"chain","k":1}]}"#), Ok(TreeInput::Symbolic(_))));
}
