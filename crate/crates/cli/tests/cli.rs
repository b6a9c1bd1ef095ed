use std::path::PathBuf;
use std::process::Command;

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn run(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_stringtop")).args(args).output().expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap_or(-1),
    )
}

fn dims(tsv: &str) -> Vec<(i32, usize)> {
    tsv.lines()
        .take_while(|l| !l.starts_with("# ring") && !l.starts_with("# intersection"))
        .filter(|l| !l.starts_with('#') && !l.starts_with("degree") && !l.starts_with("k\t"))
        .map(|l| {
            let mut it = l.split('\t');
            (it.next().unwrap().parse().unwrap(), it.next().unwrap().parse().unwrap())
        })
        .collect()
}

#[test]
fn hochschild_of_s3() {
    let (out, _, code) = run(&["hochschild", "--model", "sphere:3", "--window", "-8..4"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("# hochschild s3 coefficients=A window=-8..4\ndegree\tdim\n"));
    for (d, n) in dims(&out) {
        assert_eq!(n, usize::from(d == 3 || d <= 1), "degree {d}");
    }
}

#[test]
fn loops_ring_reports_nu_squared() {
    let (out, _, code) = run(&["loops", "--model", "sphere:3", "--top-degree", "3", "--window", "-6..4", "--ring"]);
    assert_eq!(code, 0);
    assert!(out.contains("nu\tnu\t6\t0\n"), "{out}");
    let (json, _, _) = run(&["loops", "--model", "sphere:3", "--top-degree", "3", "--window", "-6..4", "--ring", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in ["model", "n", "convention", "betti", "ring"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["n"], 3);
    assert!(v["ring"].as_array().unwrap().iter().any(|p| p["a"] == "nu" && p["b"] == "nu"));
}

#[test]
fn based_point() {
    let (out, _, code) = run(&["based", "--model", "point", "--window", "0..0"]);
    assert_eq!(code, 0);
    assert_eq!(dims(&out), vec![(0, 1)]);
}

#[test]
fn brane_with_intersection() {
    let map = models().join("linear.dgmap");
    let (out, err, code) = run(&[
        "brane", "--model", "cpn:2", "--sub", "cpn:1", "--map", map.to_str().unwrap(), "--top-degree", "2", "--window",
        "-8..4", "--intersection",
    ]);
    assert_eq!(code, 0, "{err}");
    let rows: Vec<&str> = out.lines().skip_while(|l| *l != "# intersection").skip(2).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("h\t2\t"));
    assert!(rows[1].starts_with("mu\t1\t"));
    assert!(rows[2].starts_with("nu\t-4\t"));
}

#[test]
fn reps_file_and_model_file() {
    let model = models().join("cp2.dgm");
    let reps = models().join("cp2.reps");
    let (out, err, code) =
        run(&["hochschild", "--model", model.to_str().unwrap(), "--window", "-4..4", "--ring", "--reps", reps.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("mu\tmu\t2\t0\n"));
}

#[test]
fn dual_module_table() {
    let (out, _, code) = run(&["hochschild", "--model", "sphere:2", "--window", "-6..0", "--module", "dual"]);
    assert_eq!(code, 0);
    assert!(out.contains("coefficients=A*"));
    assert!(dims(&out).iter().all(|(_, n)| *n == 1));
}

#[test]
fn connection_output() {
    let (out, _, code) = run(&["connection", "--model", "cpn:2", "--max-len", "4", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["generators"].as_array().unwrap().len(), 2);
    assert!(v["eth"]["x2"].as_array().is_some_and(|t| !t.is_empty()));
    let (tsv, _, _) = run(&["connection", "--model", "sphere:2"]);
    assert!(tsv.contains("omega_1\tv⊗x1"), "{tsv}");
}

#[test]
fn verify_passes_and_fails() {
    let (out, _, code) = run(&["verify", "--model", "cpn:2", "--window", "-6..4", "--oracle", "--poincare", "--top-degree", "4"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().skip(1).all(|l| l.contains("\tpass\t")));
    let fat = models().join("fat_s2.dgm");
    let (_, err, code) = run(&["verify", "--model", fat.to_str().unwrap(), "--window", "-4..2", "--poincare", "--top-degree", "2"]);
    assert_eq!(code, 1);
    assert!(err.contains("degenerate pairing"));
}

#[test]
fn input_errors_exit_2() {
    let (_, err, code) = run(&["hochschild", "--model", "torus", "--window", "0..1"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown preset"));
    let (_, _, code) = run(&["hochschild", "--model", "sphere:2", "--window", "4..1"]);
    assert_eq!(code, 2);
    let (_, err, code) = run(&["hochschild", "--model", "sphere:1", "--window", "0..1"]);
    assert_eq!(code, 2);
    assert!(err.contains("not simply connected"));
    let dir = std::env::temp_dir().join(format!("stringtop-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.dgm");
    std::fs::write(&bad, "model bad {\n  basis: 1:0, a:2\n  unit: 1;\n}\n").unwrap();
    let (_, err, code) = run(&["hochschild", "--model", bad.to_str().unwrap(), "--window", "0..1"]);
    assert_eq!(code, 2);
    assert!(err.contains("parse error at 3:"), "{err}");
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["hochschild", "--model", "product(sphere:2,sphere:3)", "--window", "-6..5", "--format", "json"];
    let (a, _, _) = run(&args);
    let mut one = vec!["--threads", "1"];
    one.extend_from_slice(&args);
    let (b, _, _) = run(&one);
    assert_eq!(a, b);
}
