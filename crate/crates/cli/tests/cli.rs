use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn qboson(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qboson"))
        .args(args)
        .env("QBOSON_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let cache = tempfile::tempdir().unwrap();
    let out = qboson(args, cache.path());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let json = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), json, String::from_utf8(out.stderr).unwrap())
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

fn dim_of(report: &Value, alpha: &[u64]) -> u64 {
    report["results"]["dims"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["multidegree"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).eq(alpha.iter().copied()))
        .map(|r| r["dim"].as_u64().unwrap())
        .unwrap()
}

#[test]
fn dims_a2() {
    let (code, r, _) = run(&["dims", &path("a2.json"), "--max-degree", "6"]);
    assert_eq!(code, 0);
    assert_eq!(dim_of(&r, &[1, 1]), 2);
    assert_eq!(dim_of(&r, &[2, 1]), 2);
    assert_eq!(dim_of(&r, &[2, 2]), 3);
    assert_eq!(dim_of(&r, &[3, 0]), 1);
}

#[test]
fn dims_sl2_and_empty() {
    let (code, r, _) = run(&["dims", &path("sl2.json"), "--max-degree", "8"]);
    assert_eq!(code, 0);
    let totals: Vec<u64> = r["results"]["total_by_degree"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    assert_eq!(totals, vec![1; 9]);

    let (code, r, _) = run(&["dims", &path("empty.json")]);
    assert_eq!(code, 0);
    let rows = r["results"]["dims"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["dim"], 1);
}

#[test]
fn gram_serre_block() {
    let (code, r, _) = run(&["gram", &path("a2.json"), "--alpha", "2,1"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["rank"], 2);
    assert_eq!(r["results"]["kernel"].as_array().unwrap().len(), 1);
    assert_eq!(r["results"]["dual_basis"]["certified"], true);
    let (code, r, _) = run(&["gram", &path("a2.json"), "--alpha", "1,1"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["entries"], serde_json::json!([["q", "1"], ["1", "q"]]));
}

fn term(r: &Value, f: &[&str], e: &[&str]) -> Option<String> {
    r["results"]["element"].as_array().unwrap().iter().find_map(|t| {
        let fw: Vec<&str> = t["r"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
        let ew: Vec<&str> = t["s"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
        (fw == f && ew == e).then(|| t["coeff"].as_str().unwrap().to_string())
    })
}

#[test]
fn projector_sl2_degree_two() {
    let (code, r, _) = run(&["projector", &path("sl2.json"), "--degree", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["element"].as_array().unwrap().len(), 3);
    assert_eq!(term(&r, &[], &[]).as_deref(), Some("1"));
    assert_eq!(term(&r, &["1.1"], &["1.1"]).as_deref(), Some("-1"));
    // q^{-2}/(1+q^{-2}) = 1/(q^2+1)
    assert_eq!(term(&r, &["1.1", "1.1"], &["1.1", "1.1"]).as_deref(), Some("(1)/(q^2 + 1)"));
    let c = &r["results"]["certificates"];
    for key in ["idempotent", "left_annihilation", "partition_of_unity"] {
        assert_eq!(c[key]["holds"], true);
        assert_eq!(c[key]["modulus"], 3);
    }
    assert_eq!(c["right_annihilation"]["holds"], true);
    assert_eq!(c["right_annihilation"]["modulus"], 2);
}

#[test]
fn projector_degree_zero_is_one() {
    let (code, r, _) = run(&["projector", &path("sl2.json"), "--degree", "0"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["element"].as_array().unwrap().len(), 1);
    assert_eq!(term(&r, &[], &[]).as_deref(), Some("1"));
    let c = &r["results"]["certificates"];
    assert_eq!(c["left_annihilation"]["modulus"], 1);
    assert_eq!(c["right_annihilation"]["vacuous"], true);
}

#[test]
fn projector_a2_and_support() {
    let (code, r, _) = run(&["projector", &path("a2.json"), "--degree", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["all_hold"], true);
    let (code, r, _) = run(&["projector", &path("a2.json"), "--degree", "2", "--support", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["parameters"]["support"], serde_json::json!(["2"]));
    assert!(term(&r, &["1.1"], &["1.1"]).is_none());
    assert_eq!(term(&r, &["2.1"], &["2.1"]).as_deref(), Some("-1"));
}

#[test]
fn projector_cap_exit_code() {
    let (code, _, err) = run(&["projector", &path("sl2.json"), "--degree", "3", "--max-degree", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("cap"));
}

#[test]
fn decompose_verma_squared() {
    let (code, r, _) = run(&["decompose", &path("sl2.json"), &path("sl2_verma_squared.json")]);
    assert_eq!(code, 0);
    let res = &r["results"];
    assert_eq!(res["m0_dimension"], 2);
    assert_eq!(res["bijective"], true);
    assert_eq!(res["truncation"]["n"], 5);
    assert_eq!(res["components"].as_array().unwrap().len(), 10);
}

#[test]
fn decompose_regular_root_of_unity() {
    let (code, r, _) = run(&["decompose", &path("sl2_root5.json"), &path("sl2_root5_regular.json")]);
    assert_eq!(code, 0);
    let res = &r["results"];
    assert_eq!(res["dimension"], 25);
    assert_eq!(res["m0_dimension"], 5);
    assert_eq!(res["bijective"], true);
}

#[test]
fn decompose_not_integrable() {
    let (code, _, err) = run(&["decompose", &path("sl2.json"), &path("sl2_not_integrable.json"), "--truncation", "3"]);
    assert_eq!(code, 1);
    assert!(err.contains("e[1.1]e[1.1]e[1.1]"), "{err}");
}

#[test]
fn flk_roots_of_unity() {
    for (file, order) in [("sl2_root5.json", 5), ("sl2_root3.json", 3)] {
        let (code, r, _) = run(&["flk", &path(file)]);
        assert_eq!(code, 0);
        let res = &r["results"];
        assert_eq!(res["dim_r"], order);
        assert_eq!(res["dim_b"], order * order);
        assert_eq!(res["bijective"], true);
        assert_eq!(res["scalar_identity"], true);
    }
    let (code, _, err) = run(&["flk", &path("sl2.json")]);
    assert_eq!(code, 1);
    assert!(err.contains("not finite dimensional"));
}

#[test]
fn invalid_input_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"labels":["1"],"cartan":[[1]],"symmetrizers":[1],"multiplicities":[1],"field":{"mode":"transcendental"}}"#).unwrap();
    let (code, _, err) = run(&["dims", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("error"));
    let (code, _, _) = run(&["dims", "/nonexistent.json"]);
    assert_eq!(code, 1);
}

fn without_timings(text: &[u8]) -> Value {
    let mut v: Value = serde_json::from_slice(text).unwrap();
    v.as_object_mut().unwrap().remove("timings_ms");
    v
}

#[test]
fn reports_are_deterministic_across_cache_states() {
    let cache = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec!["dims".into(), path("borcherds.json"), "--max-degree".into(), "4".into()],
        vec!["gram".into(), path("borcherds.json"), "--alpha".into(), "0,2".into()],
        vec!["projector".into(), path("a2.json"), "--degree".into(), "2".into()],
        vec!["decompose".into(), path("sl2.json"), path("sl2_verma_squared.json")],
        vec!["flk".into(), path("sl2_root3.json")],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let cold = qboson(&args, cache.path());
        let warm = qboson(&args, cache.path());
        std::fs::remove_dir_all(cache.path()).unwrap();
        let fresh = qboson(&args, cache.path());
        let a = without_timings(&cold.stdout);
        assert_eq!(a, without_timings(&warm.stdout), "{args:?}");
        assert_eq!(a, without_timings(&fresh.stdout), "{args:?}");
        let strip = |o: &Output| {
            let s = String::from_utf8(o.stdout.clone()).unwrap();
            s.lines().filter(|l| !l.contains("\"total\"")).collect::<Vec<_>>().join("\n")
        };
        assert_eq!(strip(&cold), strip(&fresh), "{args:?}");
    }
}

#[test]
fn verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<(&str, Vec<String>)> = vec![
        ("dims", vec!["dims".into(), path("a2.json"), "--max-degree".into(), "4".into()]),
        ("gram", vec!["gram".into(), path("a2.json"), "--alpha".into(), "2,1".into()]),
        ("projector", vec!["projector".into(), path("sl2.json"), "--degree".into(), "3".into()]),
        ("decompose", vec!["decompose".into(), path("sl2.json"), path("sl2_verma_squared.json")]),
        ("flk", vec!["flk".into(), path("sl2_root5.json")]),
    ];
    for (name, args) in cases {
        let file = dir.path().join(format!("{name}.json"));
        let mut full: Vec<&str> = args.iter().map(String::as_str).collect();
        full.extend(["--output", file.to_str().unwrap()]);
        assert_eq!(run(&full).0, 0, "{name}");
        let (code, v, err) = run(&["--verify", file.to_str().unwrap()]);
        assert_eq!(code, 0, "{name}: {err}");
        assert_eq!(v["match"], true);
    }
}

#[test]
fn verify_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.json");
    let (code, _, _) = run(&["projector", &path("sl2.json"), "--degree", "2", "--output", file.to_str().unwrap()]);
    assert_eq!(code, 0);
    let mut report: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    let terms = report["results"]["element"].as_array_mut().unwrap();
    terms[2]["coeff"] = Value::String("(1)/(q^2 + 2)".into());
    std::fs::write(&file, serde_json::to_string(&report).unwrap()).unwrap();
    let (code, v, _) = run(&["--verify", file.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert_eq!(v["match"], false);
    let certs = v["checks"].as_array().unwrap().iter().find(|c| c["check"] == "certificates").unwrap();
    assert_eq!(certs["replayed"]["idempotent"]["holds"], false);
}
