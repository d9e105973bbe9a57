use std::path::{Path, PathBuf};
use std::process::Command;

use proptest::prelude::*;
use serde_json::Value;

use rlab_cli::expr::parse_expr;
use rlab_core::FieldDesc;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn rlab(args: &[&str], field: &Path) -> (i32, String, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_rlab"))
        .args(&args[..1])
        .arg("--field")
        .arg(field)
        .args(&args[1..])
        .output()
        .expect("rlab runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let json = serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {stdout}"));
    (out.status.code().unwrap(), stdout, json)
}

#[test]
fn symbol_examples() {
    let f0 = fixture("f0.field");
    let (code, _, r) = rlab(&["symbol", "--alpha", "1+p", "--beta", "zeta"], &f0);
    assert_eq!(code, 0);
    assert_eq!(r["outputs"]["c"], 2);
    assert_eq!(r["outputs"]["modulus"], 3);
    assert_eq!(r["precision"]["recheck_agrees"], true);

    let (code, _, r) = rlab(&["symbol", "--alpha", "1+p", "--beta", "pi"], &f0);
    assert_eq!((code, r["outputs"]["c"].as_u64()), (0, Some(1)));

    let (code, _, r) = rlab(&["symbol", "--alpha", "zeta", "--beta", "pi"], &f0);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["kind"], "domain");
    assert!(r["error"]["message"].as_str().unwrap().contains("ord_p = 1/2"));
}

#[test]
fn syntax_errors_are_usage_errors() {
    let (code, _, r) = rlab(&["symbol", "--alpha", "1+*p", "--beta", "pi"], &fixture("f0.field"));
    assert_eq!(code, 2);
    assert_eq!(r["error"]["message"], "syntax error at column 3: unexpected operator '*'");
}

#[test]
fn bad_field_file() {
    let (code, _, r) = rlab(&["symbol", "--alpha", "4", "--beta", "pi"], &fixture("bad.field"));
    assert_eq!(code, 2);
    assert_eq!(r["status"], "error");
}

#[test]
fn oracle_examples() {
    let f0 = fixture("f0.field");
    let (code, _, r) = rlab(&["oracle", "--alpha", "4", "--beta", "zeta"], &f0);
    assert_eq!(code, 0);
    assert_eq!(r["outputs"]["is_norm"], false);
    assert_eq!(r["outputs"]["concordance"]["c"], 2);
    assert_eq!(r["outputs"]["concordance"]["concordant"], true);

    let (code, _, r) = rlab(&["oracle", "--alpha", "4", "--beta", "-1"], &f0);
    assert_eq!(code, 0);
    assert_eq!(r["outputs"]["is_norm"], true);
    assert_eq!(r["outputs"]["concordance"]["c"], 0);

    let dir = std::env::temp_dir().join(format!("rlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let q7 = dir.join("q7.field");
    std::fs::write(&q7, FieldDesc::cyclotomic(7, 2).to_config()).unwrap();
    let (code, _, r) = rlab(&["oracle", "--alpha", "4", "--beta", "zeta"], &q7);
    assert_eq!(code, 2);
    assert!(r["error"]["message"].as_str().unwrap().contains("p = 7, n = 2"));
}

#[test]
fn oracle_outside_the_domain_reports_no_concordance() {
    let (code, _, r) = rlab(&["oracle", "--alpha", "zeta", "--beta", "2"], &fixture("f0.field"));
    assert_eq!(code, 0);
    assert_eq!(r["outputs"]["concordance"]["applicable"], false);
}

#[test]
fn selftest_kernel_passes() {
    let (code, _, r) = rlab(&["selftest", "--suite", "kernel", "--samples", "50"], &fixture("f0.field"));
    assert_eq!(code, 0);
    let props = &r["outputs"]["suites"][0]["properties"];
    assert_eq!(props[0]["checked"], 50);
    assert_eq!(props[0]["passed"], 50);
}

#[test]
fn selftest_is_deterministic() {
    let f0 = fixture("f0.field");
    let args = ["selftest", "--suite", "bilinearity", "--seed", "1"];
    let (_, a, _) = rlab(&args, &f0);
    let (_, b, _) = rlab(&args, &f0);
    assert_eq!(a, b);
}

#[test]
fn selftest_all_on_f0() {
    let (code, _, r) = rlab(&["selftest", "--suite", "all"], &fixture("f0.field"));
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["outputs"]["suites"].as_array().unwrap().len(), 8);
}

#[test]
fn selftest_on_q5() {
    let (code, _, r) = rlab(&["selftest", "--suite", "oracle-concordance", "--samples", "10"], &fixture("q5.field"));
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["outputs"]["suites"][0]["status"], "pass");
}

#[test]
fn unknown_suite() {
    let (code, _, r) = rlab(&["selftest", "--suite", "everything"], &fixture("f0.field"));
    assert_eq!(code, 2);
    assert_eq!(r["error"]["kind"], "usage");
}

#[test]
fn expmap_report() {
    let (code, _, r) = rlab(&["expmap", "--term", "1, zeta", "--term", "pi, 2"], &fixture("f0.field"));
    assert_eq!(code, 0);
    assert_eq!(r["outputs"]["symbol"]["c"], 2);
    assert_eq!(r["outputs"]["per_term"], serde_json::json!([2, 0]));
    assert_eq!(r["outputs"]["zeta_form"]["b"], "zeta");

    let (code, _, _) = rlab(&["expmap"], &fixture("f0.field"));
    assert_eq!(code, 2);
}

#[test]
fn echoed_elements_reparse() {
    let (_, _, r) = rlab(&["symbol", "--alpha", "1 + p^2*pi", "--beta", "-zeta^2"], &fixture("f0.field"));
    for key in ["alpha", "beta"] {
        let shown = r["inputs"][key].as_str().unwrap();
        assert!(parse_expr(shown).is_ok(), "{shown}");
    }
}

fn arb_expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0u32..100).prop_map(|v| v.to_string()),
        Just("p".to_string()),
        Just("pi".to_string()),
        Just("zeta".to_string()),
        Just("u".to_string()),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), prop::sample::select(vec!["+", "-", "*", "/"]), inner.clone())
                .prop_map(|(a, op, b)| format!("({a}){op}({b})")),
            inner.clone().prop_map(|a| format!("-({a})")),
            (inner, -3i64..4).prop_map(|(a, k)| format!("({a})^{k}")),
        ]
    })
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(src in arb_expr()) {
        let e = parse_expr(&src).unwrap();
        let printed = e.to_string();
        prop_assert_eq!(parse_expr(&printed).unwrap(), e);
    }
}
