use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use sheafcode::duality::local_codes_of;
use sheafcode::fixtures;
use sheafcode::gf::Field;
use sheafcode::localcode::LinCode;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sheafcode"))
}

fn write_config(dir: &Path, name: &str, cfg: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    p
}

fn run(args: &[&str], config: &Path) -> Output {
    bin().args(args).arg("--config").arg(config).output().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn sheaf_cfg(complex: Value, codes: Value) -> Value {
    json!({
        "schema": 1,
        "source": { "sheaf": { "complex": complex, "codes": codes } },
        "seed": 11,
        "trials": 100,
    })
}

fn toric() -> Value {
    sheaf_cfg(json!({ "builtin": "toric" }), json!({ "uniform": "rep" }))
}

fn cube() -> Value {
    sheaf_cfg(json!({ "builtin": "single_cube:3" }), json!({ "uniform": "rep" }))
}

/// The toric negative control written out as explicit per-cell generators.
fn negative_control() -> Value {
    let (s, bad, _) = fixtures::ccz_negative_control(0, 200).unwrap();
    assert!(!bad.is_empty());
    let codes: Vec<Value> = local_codes_of(&s)
        .unwrap()
        .codes()
        .iter()
        .map(|c| {
            let f = c.to_file();
            json!({ "generator": f.generator, "length": f.delta })
        })
        .collect();
    sheaf_cfg(json!({ "builtin": "toric" }), json!({ "per_cell": codes }))
}

#[test]
fn build_single_cube_summary() {
    let dir = TempDir::new().unwrap();
    let o = run(&["build"], &write_config(dir.path(), "c.json", &cube()));
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["cells"], json!([8, 12, 6, 1]));
    assert_eq!(v["k"], 0);
}

#[test]
fn build_toric_writes_artifacts() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), "t.json", &toric());
    let o = bin().args(["build", "--out"]).arg(&out).arg("--config").arg(&cfg).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["n"], 72);
    assert_eq!(v["k"], 3);
    for f in ["complex.json", "sheaf.json", "code.json", "hx.alist", "hz.alist", "gates.txt", "summary.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    // alist header: columns then rows
    let hz = fs::read_to_string(out.join("hz.alist")).unwrap();
    assert_eq!(hz.lines().next().unwrap(), "72 72");
    let gates = fs::read_to_string(out.join("gates.txt")).unwrap();
    assert_eq!(gates.lines().count(), 144);
    assert!(gates.lines().all(|l| l.starts_with("CCZ ") && l.split(' ').count() == 5));
}

#[test]
fn malformed_permutations_exit_two() {
    let dir = TempDir::new().unwrap();
    let spec = json!({ "N": 3, "t": 2, "permutations": [[[1, 0, 2], [0, 1, 2]], [[0, 2, 1], [0, 1, 2]]] });
    let cfg = sheaf_cfg(json!({ "cubical": spec }), json!({ "uniform": "rep" }));
    let o = run(&["build"], &write_config(dir.path(), "bad.json", &cfg));
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("A_1[0] and A_2[0] do not commute"), "{err}");
}

#[test]
fn config_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let mut no_seed = toric();
    no_seed.as_object_mut().unwrap().remove("seed");
    let o = run(&["params"], &write_config(dir.path(), "a.json", &no_seed));
    assert_eq!(o.status.code(), Some(2));
    // an explicit flag supplies the seed
    let o = bin()
        .args(["params", "--seed", "3", "--config"])
        .arg(dir.path().join("a.json"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let mut bad_schema = toric();
    bad_schema["schema"] = json!(2);
    assert_eq!(run(&["build"], &write_config(dir.path(), "b.json", &bad_schema)).status.code(), Some(2));
    assert_eq!(run(&["build"], &dir.path().join("missing.json")).status.code(), Some(2));
    let o = bin().args(["verify", "--suite", "nope", "--config"]).arg(dir.path().join("a.json")).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_all_on_toric_passes() {
    let dir = TempDir::new().unwrap();
    let o = run(&["verify", "--suite", "all"], &write_config(dir.path(), "t.json", &toric()));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v = stdout_json(&o);
    assert_eq!(v["pass"], true);
    let statuses: Vec<_> = v["checks"].as_array().unwrap().iter().map(|c| c["status"].clone()).collect();
    assert_eq!(statuses, vec!["pass", "pass", "pass", "pass", "skipped", "pass"]);
}

#[test]
fn verify_poincare_on_cube_passes() {
    let dir = TempDir::new().unwrap();
    let o = run(&["verify", "--suite", "poincare"], &write_config(dir.path(), "c.json", &cube()));
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_ccz_negative_control_fails_with_witness() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), "n.json", &negative_control());
    let o = bin()
        .args(["verify", "--suite", "ccz", "--out"])
        .arg(&out)
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("report.json"), "{err}");
    let v: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let cert = &v["checks"][0]["report"]["certification"];
    assert!(cert["failed"].as_u64().unwrap() > 0);
    let w = &cert["failures"][0];
    assert_ne!(w["unshifted"], w["shifted"]);
    assert_eq!(w["zeta"].as_array().unwrap().len(), 3);
}

#[test]
fn params_on_negative_control_are_uncertified() {
    let dir = TempDir::new().unwrap();
    let o = run(&["params"], &write_config(dir.path(), "n.json", &negative_control()));
    assert!(o.status.success());
    let v = stdout_json(&o);
    for key in ["n_ccz", "w_ccz", "k_ccz_lb", "gamma_estimate"] {
        assert_eq!(v[key]["provenance"], "uncertified", "{key}");
    }
    assert!(v["n_ccz"]["value"].is_null());
}

#[test]
fn verify_poincare_on_non_acyclic_sheaf_is_not_applicable() {
    let dir = TempDir::new().unwrap();
    let s = fixtures::non_acyclic_sheaf(0).unwrap();
    let codes: Vec<Value> = local_codes_of(&s)
        .unwrap()
        .codes()
        .iter()
        .map(|c| json!({ "generator": c.to_file().generator, "length": 2 }))
        .collect();
    let cfg = sheaf_cfg(json!({ "builtin": "doubled_cube:3" }), json!({ "per_cell": codes }));
    let o = run(&["verify", "--suite", "poincare"], &write_config(dir.path(), "x.json", &cfg));
    assert_eq!(o.status.code(), Some(1));
    let v = stdout_json(&o);
    assert_eq!(v["checks"][0]["status"], "not applicable");
    assert!(!v["checks"][0]["report"]["duality"]["mismatches"].as_array().unwrap().is_empty());
}

#[test]
fn params_for_zero_k() {
    let dir = TempDir::new().unwrap();
    let v = stdout_json(&run(&["params"], &write_config(dir.path(), "c.json", &cube())));
    assert_eq!(v["k"]["value"], 0);
    assert_eq!(v["d_exact"]["value"], "∞");
    assert_eq!(v["d_upper"]["value"], "∞");
    for key in ["n_ccz", "w_ccz", "k_ccz_lb"] {
        assert_eq!(v[key]["value"], 0, "{key}");
    }
}

#[test]
fn params_for_toric() {
    let dir = TempDir::new().unwrap();
    let v = stdout_json(&run(&["params"], &write_config(dir.path(), "t.json", &toric())));
    assert_eq!(v["n"]["value"], 72);
    assert_eq!(v["k"]["value"], 3);
    assert!(v["k_ccz_lb"]["value"].as_u64().unwrap() >= 1);
    assert_eq!(v["k_ccz_lb"]["seed"], 11);
    assert_eq!(v["d_upper"]["seed"], 11);
    assert_eq!(v["d_upper"]["trials"], 200);
    assert_eq!(v["certification"]["trials"], 100);
    assert_eq!(v["n_ccz"]["value"], 144);
}

#[test]
fn params_for_diagonal_triorthogonal_form() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({ "schema": 1, "source": "reed_muller15", "seed": 0 });
    let v = stdout_json(&run(&["params"], &write_config(dir.path(), "r.json", &cfg)));
    assert_eq!(v["n"]["value"], 15);
    assert_eq!(v["n_ccz"]["value"], 15);
    assert_eq!(v["k"]["value"], 1);
    assert_eq!(v["d_exact"]["value"], 3);
    // an explicit matrix: a failing triorthogonality check exits 1
    let cfg = json!({
        "schema": 1,
        "source": { "triorthogonal": { "stabilizers": [[1, 1, 0]], "logicals": [[1, 0, 1]] } },
        "seed": 0,
    });
    let o = run(&["verify", "--suite", "ccz"], &write_config(dir.path(), "m.json", &cfg));
    assert_eq!(o.status.code(), Some(1));
    let v = stdout_json(&o);
    assert!(!v["checks"][0]["report"]["triorthogonal"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn leibniz_suite_on_simplicial_input() {
    let dir = TempDir::new().unwrap();
    let cfg = sheaf_cfg(json!({ "builtin": "torus7" }), json!("constant"));
    let o = run(&["verify", "--suite", "leibniz", "--trials", "20"], &write_config(dir.path(), "s.json", &cfg));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["trials"], 20);
    // explicitly selecting a suite that does not apply is a usage error
    let o = run(&["verify", "--suite", "leibniz"], &write_config(dir.path(), "t.json", &toric()));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simplicial_cup_form_params() {
    let dir = TempDir::new().unwrap();
    let mut cfg = sheaf_cfg(json!({ "builtin": "torus3" }), json!("constant"));
    cfg["ccz"] = json!({ "levels": [1, 1, 1] });
    let o = run(&["verify", "--suite", "all"], &write_config(dir.path(), "s.json", &cfg));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v = stdout_json(&run(&["params"], &dir.path().join("s.json")));
    assert_eq!(v["k"]["value"], 3);
    assert_eq!(v["n_ccz"]["provenance"], "exact");
}

#[test]
fn code_files_and_per_direction_codes() {
    let dir = TempDir::new().unwrap();
    let f = Field::with_degree(3).unwrap();
    let rs = LinCode::reed_solomon(&f, 2).unwrap();
    fs::write(dir.path().join("rs.json"), serde_json::to_string(&rs.to_file()).unwrap()).unwrap();
    let mut cfg = sheaf_cfg(
        json!({ "shifts": { "n": 9, "t": 2, "shifts": [1, 2, 3, 4, 5, 6, 7, 8] } }),
        json!({ "per_direction": [{ "file": "rs.json" }, "rs:2"] }),
    );
    cfg["field"] = json!({ "r": 3 });
    let p = write_config(dir.path(), "rs2.json", &cfg);
    let o = run(&["build"], &p);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["field"]["r"], 3);
    let o = run(&["verify", "--suite", "axioms"], &p);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let p = write_config(dir.path(), "t.json", &toric());
    for args in [&["params"][..], &["verify", "--suite", "all"][..], &["build"][..]] {
        let a = run(args, &p);
        let b = run(args, &p);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let a = bin().args(["params", "--seed", "5", "--config"]).arg(&p).output().unwrap();
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["d_upper"]["seed"], 5);
}
