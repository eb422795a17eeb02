use std::process::{Command, Output};

fn poma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poma"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = args.to_vec();
    all.push("--json");
    let o = poma(&all);
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}: {}", stdout(&o)))
}

#[test]
fn validate_d4() {
    let o = poma(&["validate", "--name", "D4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PS4: true"));
    assert_eq!(json(&["validate", "--name", "d4"])["is_ps4"], true);
}

#[test]
fn battery_prints_bound_and_members() {
    let o = poma(&["battery", "thm610", "--max-size", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(
        s.contains("pass") && s.contains("{C2, D4}") && s.contains("bound 8"),
        "{s}"
    );
}

#[test]
fn figure4_dot() {
    let o = poma(&["variety", "figure4", "--dot"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("digraph varieties"));
    assert_eq!(s.matches(" -> ").count(), 21);
    // stable across runs
    assert_eq!(s, stdout(&poma(&["variety", "figure4", "--dot"])));
}

#[test]
fn exit_codes() {
    assert_eq!(
        poma(&["si", "--name", "no-such-algebra"]).status.code(),
        Some(2)
    );
    assert_eq!(poma(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        poma(&["free", "--name", "D4", "--free-rank", "9"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(poma(&["simple", "--name", "D3"]).status.code(), Some(0));
    assert_eq!(poma(&["simple", "--name", "C4a"]).status.code(), Some(1));
    assert_eq!(
        poma(&["complete", "sc", "--name", "D3"]).status.code(),
        Some(1)
    );
}

#[test]
fn parameterized_names() {
    let v = json(&["complete", "psc", "--name", "AN_MINUS:2"]);
    assert_eq!(v["status"], "Yes");
    let v = json(&["complete", "psc", "--name", "an_simple(2)"]);
    assert_eq!(v["status"], "No");
}

#[test]
fn algebra_files_round_trip() {
    let dir = std::env::temp_dir().join(format!("poma-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c4a.json");
    let o = poma(&["show", "--name", "C4a", "--json"]);
    std::fs::write(&path, &o.stdout).unwrap();
    let p = path.to_str().unwrap();
    let hs = json(&["hs", "--file", p]);
    assert_eq!(hs["si"], serde_json::json!(["C2", "C3a", "C4a"]));
    assert_eq!(poma(&["validate", "--file", p]).status.code(), Some(0));

    let frame = dir.join("frame.json");
    std::fs::write(&frame, "[[0], [0, 1]]").unwrap();
    let c = json(&["complex", "--file", frame.to_str().unwrap()]);
    assert_eq!(c["size"], 4);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn enumerate_and_cache() {
    let dir = std::env::temp_dir().join(format!("poma-cli-cache-{}", std::process::id()));
    let d = dir.to_str().unwrap();
    let v = json(&[
        "enumerate",
        "--kind",
        "PS4",
        "--max-size",
        "5",
        "--cache",
        d,
    ]);
    assert_eq!(v["counts"], serde_json::json!([1, 1, 4, 19, 90]));
    let again = json(&[
        "enumerate",
        "--kind",
        "PS4",
        "--max-size",
        "5",
        "--cache",
        d,
        "--resume",
    ]);
    assert_eq!(v, again);
    let si = json(&[
        "enumerate",
        "--max-size",
        "4",
        "--si",
        "--equation",
        "box dia x ~ box x",
        "--equation",
        "dia box x ~ dia x",
    ]);
    assert_eq!(si["counts"], serde_json::json!([0, 1, 0, 1]));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn quasi_and_translation() {
    let o = poma(&["quasi", "classify", "--name", "B2", "x ~ dia x => x ~ 0"]);
    assert!(stdout(&o).contains("active"));
    let v = json(&["quasi", "admissible", "--name", "D3", "=> box x ~ x"]);
    assert_eq!(v["verdict"]["RefutedAdmissibilityAt"]["rank"], 1);
    let o = poma(&["translate", "rho", "x ~ box x"]);
    assert_eq!(stdout(&o).lines().count(), 2);
    let o = poma(&["eval", "--name", "D3", "box x", "x=1"]);
    assert_eq!(stdout(&o).trim(), "0");
    let o = poma(&["eval", "--name", "D3", "dia box dia x ~ dia x"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn structure_commands() {
    assert_eq!(
        json(&["conlat", "--name", "D4"]).as_array().unwrap().len(),
        5
    );
    assert_eq!(json(&["si", "--name", "D4"])["si"], true);
    assert_eq!(
        json(&["cg", "--name", "D4", "0,1"])
            .as_array()
            .map(|a| a.len()),
        Some(2)
    );
    assert!(json(&["dual", "--name", "D4"])["R"].is_array());
    assert_eq!(
        json(&["envelope", "--name", "EX44III"])["algebra"]["size"],
        4
    );
    assert_eq!(json(&["freezero", "--name", "D4"])["size"], 2);
    assert_eq!(json(&["free", "--name", "D4"])["size"], 5);
    assert!(stdout(&poma(&["show", "--name", "D4", "--dot"])).starts_with("digraph A"));
    let o = poma(&["figure1-verify", "--max-size", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(poma(&["split", "--name", "C4a"]).status.code(), Some(0));
    assert_eq!(
        poma(&["complete", "thm93", "--name", "D4"]).status.code(),
        Some(0)
    );
    assert_eq!(
        poma(&["variety", "include", "--outer", "D3,D4", "--inner", "C2"])
            .status
            .code(),
        Some(0)
    );
    let o = poma(&["variety", "covers", "C2", "D3", "D3,D4"]);
    assert_eq!(stdout(&o).lines().count(), 2);
}
