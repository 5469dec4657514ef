use std::path::PathBuf;
use std::process::Command;

use jsonschema::{Registry, Validator};
use serde_json::Value;

const BASE: &str = "https://critval.local/schemas/v1/";

fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas/v1")
}

fn load(name: &str) -> Value {
    let path = schema_dir().join(format!("{name}.json"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    serde_json::from_str(&text).unwrap()
}

fn validate(schema: &str, instance: &Value) {
    let common = load("common");
    let registry = Registry::new()
        .add(format!("{BASE}common.json"), common)
        .unwrap()
        .prepare()
        .unwrap();
    let validator: Validator = jsonschema::options()
        .with_registry(&registry)
        .build(&load(schema))
        .unwrap_or_else(|e| panic!("schema {schema} does not compile: {e}"));
    let errors: Vec<String> = validator
        .iter_errors(instance)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect();
    assert!(errors.is_empty(), "{schema}: {errors:#?}\n{instance}");
}

fn run(args: &str) -> (i32, Value) {
    let argv = std::iter::once("critval").chain(args.split_whitespace());
    let (code, out) = critval::cli::run(argv);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{args}: not JSON ({e}): {out}"));
    (code, v)
}

fn ok(schema: &str, args: &str) -> Value {
    let (code, v) = run(args);
    assert_eq!(code, 0, "{args}: {v}");
    validate(schema, &v);
    v
}

fn err(args: &str, code: i32) -> Value {
    let (c, v) = run(args);
    assert_eq!(c, code, "{args}: {v}");
    validate("error", &v);
    v["error"].clone()
}

#[test]
fn cvd_of_depressed_cubic_is_sixteen() {
    let v = ok("cvd", "cvd --coeffs 0,-3,0");
    assert_eq!(v["cvd"], "16/1");
    assert_eq!(v["is_zero"], false);
}

#[test]
fn cvd_accepts_complex_exact_tokens() {
    let v = ok("cvd", "cvd --coeffs 1/2+3/4i,-3,0");
    assert_eq!(v["cvd"], "16/1");
    assert_eq!(v["poly"][0], "1/2+3/4i");
}

#[test]
fn variety_membership() {
    assert_eq!(ok("variety", "variety --coeffs 0,0,0")["member"], true);
    assert_eq!(ok("variety", "variety --coeffs 0,-3,0")["member"], false);
}

#[test]
fn monodromy_of_cubic_is_s3() {
    let v = ok("monodromy", "monodromy --coeffs 0,-3,0");
    assert_eq!(v["order"], 6);
    assert_eq!(v["verdict"], "SymmetricGroup");
    assert_eq!(v["solvable"], true);
}

#[test]
fn radicals_on_generic_quintic() {
    let v = ok("radicals", "radicals --coeffs 1,-1,0,0,0 --cross-check");
    assert_eq!(v["verdict"], "not_expressed_by_radicals");
    assert_eq!(v["verdict_text"], "not expressed by radicals");
    assert_eq!(v["cross_check_agrees"], true);
    assert_eq!(v["monodromy"]["order"], 120);
    assert_eq!(v["monodromy"]["solvable"], false);
}

#[test]
fn radicals_below_five_is_inconclusive() {
    let v = ok("radicals", "radicals --coeffs 0,-3,0");
    assert_eq!(v["verdict"], "no_conclusion_degree_below_five");
    assert!(v.get("monodromy").is_none());
}

#[test]
fn tcvd_exp_minus_z() {
    let v = ok("tcvd", "tcvd --expr exp(z)-z --radius 7");
    let expected = -256.0 * std::f64::consts::PI.powi(6);
    let re = v["cvd_value"][0].as_f64().unwrap();
    let im = v["cvd_value"][1].as_f64().unwrap();
    assert!(
        ((re - expected).powi(2) + im * im).sqrt() < 1e-6 * expected.abs(),
        "{re} {im}"
    );
    assert_eq!(v["m"], 3);
    assert_eq!(v["diagnostics"]["nudges"], 0);
}

#[test]
fn tcvd_nudges_off_a_critical_point_on_the_circle() {
    let r = 2.0 * std::f64::consts::PI;
    let v = ok("tcvd", &format!("tcvd --expr exp(z)-z --radius {r}"));
    assert!(v["diagnostics"]["nudges"].as_u64().unwrap() > 0);
    assert_ne!(
        v["diagnostics"]["radius_used"],
        v["diagnostics"]["radius_requested"]
    );
}

#[test]
fn tcvd_strict_radius_is_a_numerical_failure() {
    let r = 2.0 * std::f64::consts::PI;
    let e = err(
        &format!("tcvd --expr exp(z)-z --radius {r} --strict-radius"),
        2,
    );
    assert_eq!(e["kind"], "numerical");
    assert_eq!(e["stage"], "count_zeros");
}

#[test]
fn typical_exp_minus_z() {
    let v = ok("typical", "typical --expr exp(z)-z --radius 10");
    assert_eq!(v["verdict"]["kind"], "typical_evidence");
    assert_eq!(v["surjectivity"]["kind"], "surjective");
    assert_eq!(v["critical_cardinality"]["kind"], "infinite");
    assert_eq!(v["critical_points_in_disk"].as_array().unwrap().len(), 3);
}

#[test]
fn typical_polynomial_is_finite_cardinality() {
    let v = ok("typical", "typical --expr z^3-3*z");
    assert_eq!(
        v["critical_cardinality"],
        serde_json::json!({"kind": "finite", "m": 2})
    );
}

#[test]
fn typical_reports_non_surjective_shape() {
    let v = ok("typical", "typical --expr 2+z*exp(z)-z*exp(z)+exp(z)");
    assert_eq!(v["surjectivity"]["kind"], "non_surjective");
    assert_eq!(v["verdict"]["kind"], "not_typical");
}

#[test]
fn theta_and_interp_and_split() {
    let t = ok("theta", "theta --epsilon 1 --m 2 --samples 500");
    assert_eq!(t["holds"], true);
    let p = ok("interp", "interp --points 0,1,2i --values 1,2,-1");
    assert!(p["max_value_residual"].as_f64().unwrap() < 1e-10);
    assert!(p["max_derivative_residual"].as_f64().unwrap() < 1e-10);
    let s = ok("split", "split --coeffs 2,-3,0,1 --delta 0.01");
    assert_eq!(s["split"], true);
    assert!(s.get("flag").is_none());
    let n = ok("split", "split --coeffs 1,0,1 --delta 0.1");
    assert_eq!(n["flag"], "no_multiple_roots");
}

#[test]
fn selftest_single_criterion() {
    let v = ok("selftest", "selftest --criterion 1");
    assert_eq!(v["all_passed"], true);
    assert_eq!(v["results"][0]["status"], "pass");
}

#[test]
fn input_errors_exit_one() {
    let e = err("cvd --coeffs 0.5,1", 1);
    assert_eq!(
        (e["field"].as_str(), e["index"].as_u64()),
        (Some("coeffs"), Some(0))
    );
    let e = err("monodromy --coeffs 1,1/2", 1);
    assert_eq!(e["index"], 1);
    err("tcvd --expr exp(z", 1);
    err("cvd --coeffs", 1);
    err("frobnicate", 1);
    err("selftest --criterion 42", 1);
    err("interp --points 0,1 --values 1", 1);
    err("interp --points 1,1 --values 1,2", 1);
    assert_eq!(
        err("tcvd --expr exp(z) --quad-nodes 10", 1)["field"],
        "config"
    );
}

#[test]
fn help_exits_zero() {
    let (code, out) = critval::cli::run(["critval", "--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("selftest"));
}

fn binary(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_critval"))
        .args(args)
        .output()
        .unwrap();
    (out.status.code(), out.stdout)
}

#[test]
fn binary_exit_codes() {
    assert_eq!(binary(&["cvd", "--coeffs", "0,-3,0"]).0, Some(0));
    assert_eq!(binary(&["cvd", "--coeffs", "x"]).0, Some(1));
    let r = (2.0 * std::f64::consts::PI).to_string();
    assert_eq!(
        binary(&[
            "tcvd",
            "--expr",
            "exp(z)-z",
            "--radius",
            &r,
            "--strict-radius"
        ])
        .0,
        Some(2)
    );
}

#[test]
fn binary_output_is_byte_identical_across_runs() {
    let cases: [&[&str]; 4] = [
        &["monodromy", "--coeffs", "0.3,-1,0.5i,0,0", "--pretty"],
        &["tcvd", "--expr", "exp(z)-z", "--radius", "7"],
        &["typical", "--expr", "z*exp(z)+z^2"],
        &["selftest", "--criterion", "1", "--seed", "7"],
    ];
    for args in cases {
        let (c1, a) = binary(args);
        let (c2, b) = binary(args);
        assert_eq!(c1, Some(0), "{args:?}");
        assert_eq!(c1, c2);
        let strip = |s: &[u8]| -> Value {
            let mut v: Value = serde_json::from_slice(s).unwrap();
            if let Some(rs) = v.get_mut("results").and_then(Value::as_array_mut) {
                for r in rs {
                    r["elapsed_s"] = Value::Null;
                }
                v["lines"] = Value::Null;
            }
            v
        };
        if args[0] == "selftest" {
            assert_eq!(strip(&a), strip(&b));
        } else {
            assert_eq!(a, b, "{args:?}");
        }
    }
}
