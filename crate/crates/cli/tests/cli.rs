use std::path::{Path, PathBuf};
use std::process::Command;

use qcluster::{load_seed, IntMatrix, QuantumSeed};
use serde_json::Value;

fn seeds_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../seeds")
}

fn seed_path(name: &str) -> String {
    seeds_dir().join(name).display().to_string()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn qcl_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qcl"));
    cmd.args(args).env_remove("QCL_BUDGET");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("qcl runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn qcl(args: &[&str]) -> Run {
    qcl_env(args, &[])
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn check_compat_prints_d() {
    let r = qcl(&["check-compat", &seed_path("rank_one.json")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.trim(), "D = diag(1)");
    let r = qcl(&["check-compat", &seed_path("g2_principal.json")]);
    assert_eq!(r.stdout.trim(), "D = diag(3, 1)");
}

#[test]
fn check_compat_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.json", "{\"m\": 2,");
    assert_eq!(qcl(&["check-compat", &bad]).code, 2);
    let not_skew = write(&dir, "ns.json", r#"{"m": 2, "n": 1, "B": [[0], [1]], "Lambda": [[0, 1], [1, 0]]}"#);
    let r = qcl(&["check-compat", &not_skew]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("skew"), "{}", r.stderr);
    let not_block = write(&dir, "nb.json", r#"{"m": 2, "n": 1, "B": [[1], [1]], "Lambda": [[0, -1], [1, 0]]}"#);
    assert_eq!(qcl(&["check-compat", &not_block]).code, 2);
    assert_eq!(qcl(&["check-compat", "/nonexistent/seed.json"]).code, 2);
}

#[test]
fn mutate_rank_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mu.json").display().to_string();
    let r = qcl(&["mutate", &seed_path("rank_one.json"), "--word", "1", "--out", &out]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.lines().next().unwrap(), "X1 = q^(-1/2)*X1^(-1)*X2 + X1^(-1)");
    assert_eq!(r.stdout.lines().nth(1).unwrap(), "X2 = X2");

    let root = load_seed(&seeds_dir().join("rank_one.json")).unwrap();
    let saved = load_seed(Path::new(&out)).unwrap();
    assert_eq!(saved, root.mutate(0).unwrap());

    // mutating the saved file back gives the original seed
    let back = dir.path().join("back.json").display().to_string();
    assert_eq!(qcl(&["mutate", &out, "--word", "1", "--out", &back]).code, 0);
    assert_eq!(load_seed(Path::new(&back)).unwrap(), root);
}

#[test]
fn mutate_involution_and_empty_word() {
    let dir = tempfile::tempdir().unwrap();
    let src = seed_path("b2_principal.json");
    let root = load_seed(Path::new(&src)).unwrap();
    for word in ["2,2", ""] {
        let out = dir.path().join("o.json").display().to_string();
        assert_eq!(qcl(&["mutate", &src, "--word", word, "--out", &out]).code, 0);
        assert_eq!(load_seed(Path::new(&out)).unwrap(), root);
    }
}

#[test]
fn mutate_rejects_bad_words() {
    let src = seed_path("rank_one.json");
    assert_eq!(qcl(&["mutate", &src, "--word", "2"]).code, 2);
    assert_eq!(qcl(&["mutate", &src, "--word", "0"]).code, 2);
    assert_eq!(qcl(&["mutate", &src, "--word", "a"]).code, 2);
}

#[test]
fn failed_division_is_an_integrity_error() {
    // X1 is replaced by X1 + X1 X2^2, which still q-commutes with X2 but is
    // not a cluster variable: (1 + X2) / (X1 (1 + X2^2)) has no Laurent quotient.
    let dir = tempfile::tempdir().unwrap();
    let bogus = write(
        &dir,
        "bogus.json",
        r#"{"m": 2, "n": 1, "B": [[0], [1]], "Lambda": [[0, -1], [1, 0]],
            "vars": [
              [{"exponents": [1, 2], "coeff": [[0, "1"]]}, {"exponents": [1, 0], "coeff": [[0, "1"]]}],
              [{"exponents": [0, 1], "coeff": [[0, "1"]]}]
            ]}"#,
    );
    assert_eq!(qcl(&["check-compat", &bogus]).code, 0);
    let r = qcl(&["mutate", &bogus, "--word", "1"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert!(r.stderr.contains("integrity"));
}

#[test]
fn explore_principal_a2() {
    let r = qcl(&["explore", &seed_path("a2_principal.json"), "--depth", "8"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["allIntegrable"], true);
    assert_eq!(v["allSignCoherent"], true);
    assert_eq!(v["distinctSeeds"], 10);
    assert_eq!(v["closed"], true);
    assert_eq!(v["mode"], "seed");
}

#[test]
fn explore_corrupted_root() {
    let src = seed_path("mixed_sign_frozen.json");
    for extra in [&["--matrix-only"][..], &[][..]] {
        let mut args = vec!["explore", src.as_str(), "--depth", "3"];
        args.extend_from_slice(extra);
        let r = qcl(&args);
        assert_eq!(r.code, 1, "{}", r.stderr);
        let v: Value = serde_json::from_str(&r.stdout).unwrap();
        let found = v["counterexamples"]
            .as_array()
            .unwrap()
            .iter()
            .any(|c| c["word"] == "" && c["violation"] == "notSignCoherent");
        assert!(found, "{}", r.stdout);
        assert_eq!(v["allSignCoherent"], false);
    }
}

fn big_rank_four(dir: &tempfile::TempDir) -> String {
    write(
        dir,
        "big.json",
        r#"{"m": 4, "n": 4,
            "B": [[0, 7, -5, 3], [-7, 0, 6, -9], [5, -6, 0, 4], [-3, 9, -4, 0]],
            "Lambda": [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]}"#,
    )
}

#[test]
fn budget_exhaustion_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let big = big_rank_four(&dir);
    let r = qcl(&["explore", &big, "--matrix-only", "--depth", "10", "--budget", "10"]);
    assert_eq!(r.code, 4, "{}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["complete"], false);
    assert_eq!(v["nodesVisited"], 10);
}

#[test]
fn budget_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let big = big_rank_four(&dir);
    let args = ["explore", big.as_str(), "--matrix-only", "--depth", "10"];
    let r = qcl_env(&args, &[("QCL_BUDGET", "25")]);
    assert_eq!(r.code, 4);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["budget"], 25);
    let mut with_flag = args.to_vec();
    with_flag.extend(["--budget", "12"]);
    let v: Value = serde_json::from_str(&qcl_env(&with_flag, &[("QCL_BUDGET", "25")]).stdout).unwrap();
    assert_eq!(v["budget"], 12);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let src = seed_path("g2_principal.json");
    let mut texts = Vec::new();
    for jobs in ["1", "4"] {
        let out = dir.path().join(format!("r{jobs}.json")).display().to_string();
        let r = qcl(&["explore", &src, "--depth", "8", "--jobs", jobs, "--report", &out]);
        assert_eq!(r.code, 0);
        assert!(r.stdout.contains("8 distinct seeds"));
        texts.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn duplicate_rank_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dup.json").display().to_string();
    let r = qcl(&["duplicate", &seed_path("rank_one.json"), "--out", &out]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let dup = load_seed(Path::new(&out)).unwrap();
    assert_eq!(*dup.b(), IntMatrix::from_rows(&[[0], [1]]).unwrap());
    assert_eq!(dup.initial_torus().rank(), 4);
    assert!(dup.is_integrable());
    assert_eq!(qcl(&["check-compat", &out]).code, 0);

    // load and save again: same bytes
    let again = dir.path().join("again.json").display().to_string();
    assert_eq!(qcl(&["mutate", &out, "--out", &again]).code, 0);
    let a = std::fs::read_to_string(&out).unwrap().replace(" (duplicated)", "");
    let b = std::fs::read_to_string(&again).unwrap().replace(" (duplicated)", "");
    assert_eq!(a, b);
}

fn lambda_output(r: &Run) -> Vec<Vec<String>> {
    assert_eq!(r.code, 0, "{}", r.stderr);
    serde_json::from_str(&r.stdout).unwrap()
}

fn strings(rows: &[&[&str]]) -> Vec<Vec<String>> {
    rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect()
}

#[test]
fn lambda_from_bcd() {
    let dir = tempfile::tempdir().unwrap();
    let a2 = write(&dir, "a2.json", r#"{"B": [[0, 1], [-1, 0]], "C": [[1, 0], [0, 1]], "D": [1, 1]}"#);
    assert_eq!(
        lambda_output(&qcl(&["lambda-from-bcd", &a2])),
        strings(&[&["0", "0", "-1", "0"], &["0", "0", "0", "-1"], &["1", "0", "0", "-1"], &["0", "1", "1", "0"]])
    );
    let scalar = write(&dir, "s.json", r#"{"B": [[0]], "C": [[1]], "D": [2]}"#);
    assert_eq!(lambda_output(&qcl(&["lambda-from-bcd", &scalar])), strings(&[&["0", "-2"], &["2", "0"]]));
    let rational = write(&dir, "r.json", r#"{"B": [[0]], "C": [["2"]], "D": ["1/3"]}"#);
    assert_eq!(lambda_output(&qcl(&["lambda-from-bcd", &rational])), strings(&[&["0", "-1/6"], &["1/6", "0"]]));
    let singular = write(&dir, "sing.json", r#"{"B": [[0, 1], [-1, 0]], "C": [[1, 2], [2, 4]], "D": [1, 1]}"#);
    assert_eq!(qcl(&["lambda-from-bcd", &singular]).code, 2);
    let not_sym = write(&dir, "ns.json", r#"{"B": [[0, 1], [1, 0]], "C": [[1, 0], [0, 1]], "D": [1, 1]}"#);
    assert_eq!(qcl(&["lambda-from-bcd", &not_sym]).code, 2);
}

#[test]
fn centralizer_command() {
    let r = qcl(&["centralizer", &seed_path("a2_principal.json")]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["maximal"], true);
    assert_eq!(v["basis"], serde_json::json!([[1, 0, 0, 0], [0, 1, 0, 0]]));
}

#[test]
fn periodicity_command() {
    let r = qcl(&["periodicity", &seed_path("a2_coefficient_free.json"), "--word", "1,2,1,2,1"]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["returnsToStart"], false);
    assert_eq!(v["upToPermutation"], true);
    assert_eq!(v["permutation"], serde_json::json!([2, 1]));
}

#[test]
fn corpus_round_trips() {
    for entry in std::fs::read_dir(seeds_dir()).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        if name.ends_with("_bcd.json") {
            continue;
        }
        let seed: QuantumSeed = load_seed(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
        let file = qcluster::SeedFile::from_seed(&seed);
        assert_eq!(file.to_seed().unwrap(), seed, "{name}");
    }
}
