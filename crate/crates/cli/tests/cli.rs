use std::path::Path;
use std::process::{Command, Output};

fn forge(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forge")).current_dir(dir).args(args).output().expect("run forge")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn build_and_check_b5() {
    let dir = tempfile::tempdir().unwrap();
    let o = forge(dir.path(), &["build-bn", "--n", "5", "--out", "b5.json"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("(15, 60, 50)"));
    let o = forge(dir.path(), &["type", "check", "b5.json"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = forge(dir.path(), &["type", "check", "b5.json", "--type", "metric-a"]);
    assert_eq!(code(&o), 1);
    for cmd in [&["frame", "b5.json"][..], &["cover", "--target", "b5.json", "--radius", "2"], &["decompose", "b5.json"]] {
        let o = forge(dir.path(), cmd);
        assert_eq!(code(&o), 0, "{cmd:?}: {}", stdout(&o));
    }
}

#[test]
fn json_verdicts_go_to_stdout_or_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = forge(dir.path(), &["build-torus", "--n", "2", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["counts"]["vertices"], 12);
    let o = forge(dir.path(), &["verify", "jumps", "--n", "1..4", "--json", "j.json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("j.json")).unwrap()).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 4);
    assert_eq!(v["pass"], true);
}

#[test]
fn pinch_then_fill() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&forge(d, &["build-torus", "--n", "5", "--out", "t5.json"])), 0);
    let torus = std::fs::read_to_string(d.join("t5.json")).unwrap();
    std::fs::write(d.join("tori.json"), format!("[{torus}]")).unwrap();
    // Even x ↦ (x+1, y−2) on T_5.
    let mut pairs = Vec::new();
    for y in 0..5i64 {
        for x in (0..6i64).step_by(2) {
            let (a, b) = ((6 * y + x) as usize, (6 * (y - 2).rem_euclid(5) + x + 1) as usize);
            pairs.push(format!("[{},{}]", a.min(b), a.max(b)));
        }
    }
    std::fs::write(d.join("sigma.json"), format!("[{}]", pairs.join(","))).unwrap();
    let o = forge(d, &["pinch", "--tori", "tori.json", "--sigma", "sigma.json", "--out", "tp.json"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = forge(d, &["fill", "tp.json", "--out", "filled.json"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("20 systoles"));
    assert_eq!(code(&forge(d, &["type", "check", "filled.json"])), 0);
}

#[test]
fn collar_nerve_and_powers() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&forge(d, &["collar", "--y", "-2", "--out", "c.json"])), 0);
    let o = forge(d, &["nerve", "c.json", "--dot", "h.dot"]);
    assert_eq!(code(&o), 0);
    let dot = std::fs::read_to_string(d.join("h.dot")).unwrap();
    assert_eq!(dot.matches(" -- ").count(), 18);
    let o = forge(d, &["cobordism", "power", "--n", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("3 closed triangles"));
}

#[test]
fn xprime_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&forge(d, &["xprime", "build", "--out", "xp.json"])), 0);
    let o = forge(d, &["xprime", "verify", "xp.json"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("shape hexagon not in type"));
    assert_eq!(code(&forge(d, &["type", "check", "xp.json"])), 1);
    assert_eq!(code(&forge(d, &["type", "check", "xp.json", "--type", "metric-a"])), 0);
}

#[test]
fn verify_all_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = forge(d, &["verify-paper", "--n", "1..0"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("0 checks"));
    let o = forge(d, &["verify-paper", "--n", "1..2", "--radius", "2", "--json", "r.json"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    let o = forge(d, &["verify-paper", "--n", "2", "--radius", "1", "--mutate", "relabeled-edge"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL toric.labels"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&forge(d, &["frame", "missing.json"])), 2);
    assert_eq!(code(&forge(d, &["verify-paper", "--n", "x..3"])), 2);
    assert_eq!(code(&forge(d, &["verify-paper", "--mutate", "nope"])), 2);
    assert_eq!(code(&forge(d, &["no-such-command"])), 2);
    std::fs::write(d.join("bad.json"), "{").unwrap();
    assert_eq!(code(&forge(d, &["type", "check", "bad.json"])), 2);
}
