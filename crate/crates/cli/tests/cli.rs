//! End-to-end tests of the binary: exit codes, formats, determinism.

use std::io::Write;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trifree"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn write_temp(name: &str, content: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("trifree-test-{}-{name}", std::process::id()));
    let mut file = std::fs::File::create(&path).unwrap();
    file.write_all(content.as_bytes()).unwrap();
    path
}

const CIRCULAR_SPEC: &str = r#"{"families":[{"id":"c","kind":"circular"}]}"#;
const UNION_SPEC: &str = r#"{"families":[
    {"id":"c","kind":"circular"},
    {"id":"a","kind":"generic","kappa1":{"a":"1/2","a a":"2"},"kappa2":{"a ; a":"-1/3"}}
]}"#;

#[test]
fn enumerate_count_only() {
    let output = run(&["enumerate", "--shape", "3", "--count-only"]);
    assert!(output.status.success());
    assert_eq!(stdout(&output).trim(), "5");
}

#[test]
fn enumerate_json_items() {
    let output = run(&["enumerate", "--shape", "1,1", "--json"]);
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(value["count"], 1);
    assert_eq!(value["items"][0]["perm"], "(1,2)");
    assert_eq!(value["items"][0]["cycles"], 1);
    assert_eq!(value["config"]["structural_cap"], 12);
}

#[test]
fn enumerate_csv() {
    let output = run(&["enumerate", "--shape", "1,1", "--format", "csv"]);
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("perm,cycles"), "{text}");
    assert!(text.contains("\"(1,2)\",1"), "{text}");
}

#[test]
fn psnc_class_counts() {
    let output = run(&["psnc", "--shape", "1,1,1", "--count-by-class", "--json"]);
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(value["count"], 6);
    assert_eq!(value["class_counts"]["Connected"], 2);
    assert_eq!(value["class_counts"]["OneMarked"], 3);
    assert_eq!(value["class_counts"]["OneMarked3"], 1);
}

#[test]
fn psnc_brute_cap_exit_two() {
    let output = run(&["psnc", "--shape", "4,4", "--mode", "brute"]);
    assert_eq!(output.status.code(), Some(2));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("cap 7"), "{err}");
}

#[test]
fn kprod_circular_pair() {
    let spec = write_temp("circ.json", CIRCULAR_SPEC);
    let output = run(&[
        "kprod",
        "--dist",
        spec.to_str().unwrap(),
        "--letters",
        "c,c*",
        "--sizes",
        "2",
        "--grouping",
        "1",
        "--oracle",
        "--json",
    ]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let value: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(value["value"], "1");
    std::fs::remove_file(spec).ok();
}

#[test]
fn kprod_cap_exceeded_exits_two() {
    let spec = write_temp("circ2.json", CIRCULAR_SPEC);
    let letters: Vec<String> =
        (0..26).map(|i| if i % 2 == 0 { "c".into() } else { "c*".to_string() }).collect();
    let output = run(&[
        "kprod",
        "--dist",
        spec.to_str().unwrap(),
        "--letters",
        &letters.join(","),
        "--sizes",
        "26",
        "--grouping",
        "1",
        "--structural-cap",
        "12",
    ]);
    assert_eq!(output.status.code(), Some(2));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("cap 12"), "{err}");
    std::fs::remove_file(spec).ok();
}

#[test]
fn kprod_expect_mismatch_exits_one() {
    let spec = write_temp("circ3.json", CIRCULAR_SPEC);
    let args = |expect: &str| {
        vec![
            "kprod".to_string(),
            "--dist".into(),
            spec.to_str().unwrap().to_string(),
            "--letters".into(),
            "c,c*".into(),
            "--sizes".into(),
            "2".into(),
            "--grouping".into(),
            "1".into(),
            "--expect".into(),
            expect.to_string(),
        ]
    };
    let good = bin().args(args("1")).output().unwrap();
    assert!(good.status.success());
    let bad = bin().args(args("2/3")).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    std::fs::remove_file(spec).ok();
}

#[test]
fn kprod_free_union_spec() {
    // kappa_{1,1,1}(cac*, cac*, cac*) for the generic table equals
    // phi_3(a;a;a): both via the CLI
    let spec = write_temp("union.json", UNION_SPEC);
    let kprod = run(&[
        "kprod",
        "--dist",
        spec.to_str().unwrap(),
        "--letters",
        "c,a,c*,c,a,c*,c,a,c*",
        "--sizes",
        "3,3,3",
        "--grouping",
        "1,1,1",
        "--json",
    ]);
    assert!(kprod.status.success(), "{}", String::from_utf8_lossy(&kprod.stderr));
    let kprod_value: serde_json::Value = serde_json::from_str(&stdout(&kprod)).unwrap();
    let phi = run(&["phi", "--dist", spec.to_str().unwrap(), "--word", "a ; a ; a", "--json"]);
    assert!(phi.status.success());
    let phi_value: serde_json::Value = serde_json::from_str(&stdout(&phi)).unwrap();
    assert_eq!(kprod_value["value"], phi_value["value"]);
    std::fs::remove_file(spec).ok();
}

#[test]
fn verify_subcommands_pass() {
    for args in [
        vec!["verify", "s2", "--p", "1", "--q", "1", "--r", "1"],
        vec!["verify", "ccstar", "--p", "2", "--q", "1", "--r", "1"],
        vec!["verify", "cac", "--seed", "7"],
        vec!["verify", "rdiag", "--grouping", "1,1,1", "--seed", "3"],
        vec!["verify", "aastar", "--r", "2", "--s", "1", "--t", "1", "--seed", "5"],
        vec!["verify", "cahalve", "--seed", "11"],
        vec!["verify", "ginibre", "--k", "2"],
        vec!["verify", "appendix", "--grouping", "1,1,1", "--sizes", "2,1,1"],
        vec!["verify", "halfmap", "--shape", "2,2,2"],
    ] {
        let output = run(&args);
        assert!(
            output.status.success(),
            "{args:?}: {}{}",
            stdout(&output),
            String::from_utf8_lossy(&output.stderr)
        );
        assert!(stdout(&output).contains("PASS"), "{args:?}");
    }
}

#[test]
fn verify_seed_determinism() {
    let a = run(&["verify", "aastar", "--seed", "42", "--json"]);
    let b = run(&["verify", "aastar", "--seed", "42", "--json"]);
    assert!(a.status.success() && b.status.success());
    // timing fields differ; the check rows must not
    let parse = |o: &Output| -> serde_json::Value {
        let mut v: serde_json::Value = serde_json::from_str(&stdout(o)).unwrap();
        v["checks"].as_array_mut().unwrap().iter_mut().for_each(|c| {
            c.as_object_mut().unwrap().remove("elapsed_ms");
        });
        v["checks"].clone()
    };
    assert_eq!(parse(&a), parse(&b));
    let c = run(&["verify", "aastar", "--seed", "43", "--json"]);
    assert!(c.status.success());
    assert_ne!(parse(&a), parse(&c), "different seeds give different tables");
}

#[test]
fn halfmap_bijection_command() {
    let output = run(&["halfmap", "--shape", "4,2,2", "--check-bijection"]);
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("halfmap-count") && text.contains("24"), "{text}");
}

#[test]
fn diagram_deterministic() {
    let args = [
        "diagram",
        "--shape",
        "8,4,3",
        "--perm",
        "(1,2,12,9,8)(3,4)(5,10,11)(6)(7)(13,15)(14)",
        "--part",
        "{1,2,8,9,12}{3,4}{5,10,11,13,15}{6}{7}{14}",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "byte-identical SVG");
    let text = stdout(&first);
    assert!(text.starts_with("<svg"));
    assert!(text.contains("stroke-dasharray"), "partition drawn dashed");
    // identity permutation renders self-loops only
    let id = run(&["diagram", "--shape", "1,1,1", "--perm", "(1)(2)(3)"]);
    assert!(id.status.success());
    assert!(!stdout(&id).contains("marker-end"), "no arcs for the identity");
}

#[test]
fn config_file_via_env() {
    let config = write_temp(
        "config.json",
        r#"{"brute_cap":7,"structural_cap":12,"oracle_cap":8,"seed":9,"format":"json","workers":1}"#,
    );
    let output = bin()
        .env("TRIFREE_CONFIG", &config)
        .args(["enumerate", "--shape", "2", "--count-only"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(value["count"], 2);
    assert_eq!(value["config"]["seed"], 9);
    std::fs::remove_file(config).ok();
}

#[test]
fn unknown_flag_exits_two() {
    let output = run(&["enumerate", "--shape", "3", "--no-such-flag"]);
    assert_eq!(output.status.code(), Some(2));
}
