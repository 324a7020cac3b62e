use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn knots(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_knots"))
        .args(args)
        .env_remove("KNOT_THREADS")
        .output()
        .expect("binary runs")
}

fn knots_with_input(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_knots"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn zoo_piped_into_energy() {
    let curve = knots(&["zoo", "circle:r=1,n=256"]);
    assert!(curve.status.success());
    let e = json(&knots_with_input(&["energy", "--which", "e"], &curve.stdout));
    assert!((e["value"].as_f64().unwrap() - 4.0).abs() < 1e-2);
    assert!(e["error"].as_f64().unwrap() >= 0.0);
    assert_eq!(e["config"]["energy"], "e");
}

#[test]
fn diagram_stats_of_x3() {
    let out = knots(&["diagram", "stats", "--code", "O1+ U2+ O3+ U1+ O2+ U3+"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "{\"pairs\":3,\"x3\":1}\n");
    let a2 = json(&knots(&["diagram", "a2-skein", "--code", "O1+ U2+ O3- U4- O2+ U1+ O4- U3-"]));
    assert_eq!(a2["a2"], -1);
    let parsed = json(&knots(&["diagram", "parse", "--chords", "1-4,2-5,3-6"]));
    assert_eq!(parsed["chord_diagram"]["n"], 3);
}

#[test]
fn exit_codes() {
    assert_eq!(knots(&["energy", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(knots(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(knots(&["verify", "--suite", "42"]).status.code(), Some(2));
    assert_eq!(knots(&["energy", "--zoo", "circle:r=-1"]).status.code(), Some(1));
    assert_eq!(knots(&["diagram", "parse", "--code", "O1+ U7+"]).status.code(), Some(1));
    let bad = knots_with_input(&["writhe"], b"{\"points\": []}");
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn verify_single_criterion() {
    let out = knots(&["verify", "--suite", "combinatorics", "--seed", "7"]);
    let rows = json(&out);
    assert_eq!(rows[0]["id"], 7);
    assert_eq!(rows[0]["passed"], true);
}

#[test]
fn seeded_commands_are_byte_identical_across_thread_counts() {
    let commands: [&[&str]; 5] = [
        &["iy", "--zoo", "trefoil:n=96", "--samples", "50000", "--seed", "3"],
        &["average", "cx", "--zoo", "trefoil:n=96", "--samples", "100", "--seed", "3"],
        &["project", "--zoo", "figure-eight:n=128", "--seed", "3"],
        &["gauss", "--zoo", "trefoil:n=64", "--diagram", "X4", "--samples", "5000", "--seed", "3"],
        &["relax", "--zoo", "perturbed_circle:amp=0.1,mode=4,seed=2,n=48", "--steps", "3"],
    ];
    for args in commands {
        let mut one = vec!["--threads", "1"];
        one.extend_from_slice(args);
        let mut four = vec!["--threads", "4"];
        four.extend_from_slice(args);
        let a = knots(&one);
        let b = knots(&four);
        let c = knots(&four);
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(b.stdout, c.stdout, "{args:?}");
    }
}

#[test]
fn thread_count_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_knots"))
        .args(["writhe", "--zoo", "trefoil:n=64"])
        .env("KNOT_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let bad = Command::new(env!("CARGO_BIN_EXE_knots"))
        .args(["writhe", "--zoo", "trefoil:n=64"])
        .env("KNOT_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn csv_output() {
    let out = knots(&["--format", "csv", "writhe", "--zoo", "trefoil:n=64"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("config,error,method,n,value"));
    assert!(lines.next().unwrap().contains("writhe:"));
    let out = knots(&["zoo", "circle:n=32", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 33);
}

#[test]
fn relax_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("flow.jsonl");
    let last = dir.path().join("final.json");
    let snaps = dir.path().join("snaps");
    let out = knots(&[
        "relax",
        "--zoo",
        "perturbed_circle:amp=0.1,mode=5,seed=1,n=64",
        "--steps",
        "4",
        "--snapshot-every",
        "2",
        "--trajectory",
        traj.to_str().unwrap(),
        "--out",
        last.to_str().unwrap(),
        "--snapshots",
        snaps.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&traj).unwrap();
    let energies: Vec<f64> = text
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["energy"].as_f64().unwrap())
        .collect();
    assert!(energies.len() >= 2);
    assert!(energies.windows(2).all(|w| w[1] <= w[0]));
    let again = json(&knots(&["energy", "--input", last.to_str().unwrap(), "--no-richardson"]));
    assert!(again["value"].as_f64().unwrap() < energies[0]);
    assert!(snaps.join("snapshot-0.json").exists());
}

#[test]
fn gauss_modes() {
    let signed = json(&knots(&["gauss", "--zoo", "trefoil:n=64", "--diagram", "X"]));
    let unsigned = json(&knots(&["gauss", "--zoo", "trefoil:n=64", "--diagram", "X", "--unsigned"]));
    let reduced = json(&knots(&["gauss", "--zoo", "trefoil:n=64", "--diagram", "X", "--reduced"]));
    let s = signed["value"].as_f64().unwrap();
    assert!(unsigned["value"].as_f64().unwrap() >= s.abs());
    assert!((reduced["value"].as_f64().unwrap() - s).abs() < 1e-9);
}

#[test]
fn project_along_a_direction() {
    let cs = json(&knots(&["project", "--zoo", "trefoil:n=256", "--direction", "0.01,0.02,1"]));
    assert_eq!(cs["count"], 3);
    assert_eq!(cs["signed_count"], 3);
    assert_eq!(cs["regular"], true);
    assert_eq!(knots(&["project", "--zoo", "trefoil", "--direction", "0,0,0"]).status.code(), Some(2));
    assert_eq!(knots(&["project", "--zoo", "trefoil", "--direction", "1,2"]).status.code(), Some(2));
}
