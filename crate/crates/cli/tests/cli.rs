//! End-to-end tests of the `mts` binary: exit-code partition, JSON
//! stability, and the construct/certify/search/roundtrip/bound flows.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mts_core::{choi, constructions, Tolerances};

fn mts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mts"))
        .args(args)
        .env_remove("MTS_TOL")
        .output()
        .expect("binary runs")
}

fn mts_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mts"))
        .args(args)
        .env_remove("MTS_TOL")
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn workdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mts-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("create temp dir");
    dir
}

fn construct(family_args: &[&str], path: &Path) {
    let path_str = path.to_str().unwrap().to_string();
    let mut args: Vec<&str> = vec!["construct"];
    args.extend_from_slice(family_args);
    args.push("--out");
    args.push(&path_str);
    let out = mts(&args);
    assert_eq!(code(&out), 0, "construct failed: {:?}", out);
}

#[test]
fn construct_families_have_expected_shapes() {
    let dir = workdir();
    let n3 = dir.join("n3.json");
    construct(&["n3"], &n3);
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&n3).unwrap()).unwrap();
    assert_eq!(value["version"], "mts/1");
    assert_eq!(value["n"], 3);
    assert_eq!(value["operators"].as_array().unwrap().len(), 4);

    let diag = dir.join("diag24.json");
    construct(&["diagonal", "--a", "2", "--n", "4"], &diag);
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&diag).unwrap()).unwrap();
    assert_eq!(value["operators"].as_array().unwrap().len(), 2);
    assert_eq!(value["operators"][0].as_array().unwrap().len(), 4);

    let general = dir.join("gen5.json");
    construct(&["general", "--n", "5"], &general);
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&general).unwrap()).unwrap();
    assert_eq!(value["operators"].as_array().unwrap().len(), 5);

    // invalid parameters exit with 2
    let out = mts(&["construct", "diagonal", "--a", "3", "--n", "4"]);
    assert_eq!(code(&out), 2);
    let out = mts(&["construct", "general"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn certify_extremal_fixture_exits_zero() {
    let dir = workdir();
    let path = dir.join("n3-cert.json");
    construct(&["n3"], &path);
    let out = mts(&["certify", path.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let cert: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(cert["verdict"], "extremal");
    assert_eq!(cert["ls_certificate"]["achieved_rank"], 16);
    assert_eq!(cert["ls_certificate"]["stacked_rows"], 18);
    assert_eq!(cert["ps_certificate"]["achieved_rank"], 80);
    assert_eq!(cert["state_rank"], 4);
    assert_eq!(cert["rank_bound"], 4);
    assert!(cert["input_digest"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn certify_output_is_byte_stable() {
    let dir = workdir();
    let path = dir.join("n3-stable.json");
    construct(&["n3"], &path);
    let first = mts(&["certify", path.to_str().unwrap(), "--json"]);
    let second = mts(&["certify", path.to_str().unwrap(), "--json"]);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);

    // reformatting the input must not change the digest
    let reformatted: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let compact = dir.join("n3-compact.json");
    std::fs::write(&compact, serde_json::to_string(&reformatted).unwrap()).unwrap();
    let third = mts(&["certify", compact.to_str().unwrap(), "--json"]);
    assert_eq!(first.stdout, third.stdout);
}

#[test]
fn certify_mixture_exits_one() {
    let dir = workdir();
    let path = dir.join("mix.json");
    construct(&["mixture", "--n", "3", "--count", "2", "--seed", "5"], &path);
    let out = mts(&["certify", path.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 1);
    let cert: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(cert["verdict"], "not_extremal");
    assert_eq!(cert["ucpt_report"]["is_ucpt"], true);
}

#[test]
fn certify_non_ucpt_exits_two() {
    let dir = workdir();
    let path = dir.join("bad.json");
    construct(&["n3"], &path);
    let mut value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    // break trace preservation by scaling one entry
    value["operators"][0][0][0][0] = serde_json::json!(0.9);
    std::fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();
    let out = mts(&["certify", path.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 2);
    let cert: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(cert["verdict"], "not_ucpt");
    assert_eq!(cert["ucpt_report"]["is_ucpt"], false);
}

#[test]
fn certify_parse_and_io_errors() {
    let dir = workdir();
    let garbage = dir.join("garbage.json");
    std::fs::write(&garbage, "{not json").unwrap();
    assert_eq!(code(&mts(&["certify", garbage.to_str().unwrap()])), 4);

    let wrong = dir.join("wrong-keys.json");
    std::fs::write(&wrong, "{\"version\": \"mts/1\"}").unwrap();
    assert_eq!(code(&mts(&["certify", wrong.to_str().unwrap()])), 4);

    let missing = dir.join("does-not-exist.json");
    assert_eq!(code(&mts(&["certify", missing.to_str().unwrap()])), 3);

    let bad_version = dir.join("bad-version.json");
    construct(&["n3"], &bad_version);
    let mut value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&bad_version).unwrap()).unwrap();
    value["version"] = serde_json::json!("mts/999");
    std::fs::write(&bad_version, serde_json::to_string(&value).unwrap()).unwrap();
    assert_eq!(code(&mts(&["certify", bad_version.to_str().unwrap()])), 4);
}

#[test]
fn certify_ps_gating_flags() {
    let dir = workdir();
    let path = dir.join("n3-ps.json");
    construct(&["n3"], &path);
    let on = mts(&["certify", path.to_str().unwrap(), "--json"]);
    let cert: serde_json::Value = serde_json::from_str(&stdout(&on)).unwrap();
    assert!(cert["ps_certificate"].is_object());

    let off = mts(&["certify", path.to_str().unwrap(), "--no-ps", "--json"]);
    assert_eq!(code(&off), 0);
    let cert: serde_json::Value = serde_json::from_str(&stdout(&off)).unwrap();
    assert!(cert["ps_certificate"].is_null());
}

#[test]
fn certify_tolerance_overrides() {
    let dir = workdir();
    let path = dir.join("n3-tol.json");
    construct(&["n3"], &path);

    let out = mts_with_env(&["certify", path.to_str().unwrap(), "--json"], "MTS_TOL", "1e-7");
    let cert: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(cert["tolerances"]["rank_rel_tol"], 1e-7);

    // the flag wins over the environment
    let out = mts_with_env(
        &["certify", path.to_str().unwrap(), "--tol", "1e-8", "--json"],
        "MTS_TOL",
        "1e-7",
    );
    let cert: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(cert["tolerances"]["rank_rel_tol"], 1e-8);

    let out = mts_with_env(&["certify", path.to_str().unwrap()], "MTS_TOL", "spam");
    assert_eq!(code(&out), 2);
}

#[test]
fn certify_density_input() {
    let dir = workdir();
    let tol = Tolerances::default();

    // marginal tracial density: the Choi state of the diagonal family
    let ks = constructions::diagonal_vandermonde(2, 4).unwrap();
    let density = choi(&ks);
    let rows: Vec<Vec<[f64; 2]>> = (0..density.rows())
        .map(|i| {
            (0..density.cols())
                .map(|j| {
                    let z = density.get(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect();
    let path = dir.join("vand-density.json");
    std::fs::write(
        &path,
        serde_json::to_string(&serde_json::json!({
            "version": "mts/1",
            "n": 4,
            "density": rows,
        }))
        .unwrap(),
    )
    .unwrap();
    let out = mts(&["certify", path.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let cert: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(cert["verdict"], "extremal");
    assert_eq!(cert["state_rank"], 2);
    assert_eq!(cert["marginal_report"]["is_marginal_tracial"], true);

    // a product state is not marginal tracial
    let d = 9;
    let mut product = vec![vec![[0.0, 0.0]; d]; d];
    product[0][0] = [1.0, 0.0];
    let bad = dir.join("product-density.json");
    std::fs::write(
        &bad,
        serde_json::to_string(&serde_json::json!({
            "version": "mts/1",
            "n": 3,
            "density": product,
        }))
        .unwrap(),
    )
    .unwrap();
    let out = mts(&["certify", bad.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 2);
    let cert: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(cert["verdict"], "not_marginal_tracial");
    let _ = tol;
}

#[test]
fn roundtrip_flows() {
    let dir = workdir();
    let path = dir.join("n3-round.json");
    construct(&["n3"], &path);
    let out = mts(&["roundtrip", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("roundtrip residual:"));

    // density-side roundtrip
    let ks = constructions::construct_n4();
    let density = choi(&ks);
    let rows: Vec<Vec<[f64; 2]>> = (0..density.rows())
        .map(|i| {
            (0..density.cols())
                .map(|j| {
                    let z = density.get(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect();
    let dpath = dir.join("n4-density-round.json");
    std::fs::write(
        &dpath,
        serde_json::to_string(&serde_json::json!({
            "version": "mts/1",
            "n": 4,
            "density": rows,
        }))
        .unwrap(),
    )
    .unwrap();
    let out = mts(&["roundtrip", dpath.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    // random diagonal channel file, through the construct command
    let rpath = dir.join("rand-diag.json");
    construct(&["mixture", "--n", "2", "--count", "3", "--seed", "9"], &rpath);
    let out = mts(&["roundtrip", rpath.to_str().unwrap()]);
    assert_eq!(code(&out), 0);

    let garbage = dir.join("round-garbage.json");
    std::fs::write(&garbage, "[]").unwrap();
    assert_eq!(code(&mts(&["roundtrip", garbage.to_str().unwrap()])), 4);
}

#[test]
fn bound_command() {
    let out = mts(&["bound", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "4");
    let out = mts(&["bound", "4"]);
    assert_eq!(stdout(&out).trim(), "5");
    let out = mts(&["bound", "2"]);
    assert_eq!(stdout(&out).trim(), "2");
    let out = mts(&["bound", "0"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn search_diagonal_on_m2_finds_rank_one_only() {
    let out = mts(&[
        "search", "--n", "2", "--trials", "40", "--seed", "11", "--strategy", "diagonal",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["max_extremal_rank"], 1);
    assert!(report["extremal_hits"].as_u64().unwrap() > 0);
    assert_eq!(report["best_certificate"]["method"], "LS");

    // deterministic per seed
    let again = mts(&[
        "search", "--n", "2", "--trials", "40", "--seed", "11", "--strategy", "diagonal",
        "--json",
    ]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn search_perturbation_on_m5_reaches_rank_five() {
    let out = mts(&[
        "search", "--n", "5", "--trials", "10", "--seed", "3", "--strategy", "perturbation",
        "--target-rank", "5", "--json",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report["max_extremal_rank"].as_u64().unwrap() >= 5);
    assert_eq!(report["target_reached"], true);
    let best_n = report["best_channel"]["n"].as_u64().unwrap();
    assert_eq!(best_n, 5);
}

#[test]
fn search_rejects_bad_parameters() {
    let out = mts(&["search", "--n", "1", "--trials", "10", "--strategy", "diagonal"]);
    assert_eq!(code(&out), 2);
    let out = mts(&["search", "--n", "3", "--trials", "0", "--strategy", "diagonal"]);
    assert_eq!(code(&out), 2);
}
