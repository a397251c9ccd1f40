//! End-to-end checks of the binary: output contracts, exit codes, and
//! byte-level reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pwrec"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary should run")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pwrec-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn kadec_sweep_contract() {
    let dir = temp_dir("sweep");
    let out = run_in(&dir, &["kadec", "--sweep", "10", "--out", "k"]);
    assert!(out.status.success(), "{:?}", out);
    let csv = std::fs::read_to_string(dir.join("k/kadec.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "d,ln2_bound,x_d,ratio");
    assert_eq!(lines.len(), 11, "header plus ten rows");
    for (i, line) in lines[1..].iter().enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        assert_eq!(fields[0], (i + 1).to_string());
        for f in &fields[1..] {
            f.parse::<f64>().expect("numeric field");
        }
    }
    assert!(dir.join("k/run.manifest").exists());
}

#[test]
fn reconstruct_lattice_exactness_through_the_binary() {
    let dir = temp_dir("recon");
    let gen = run_in(
        &dir,
        &[
            "nodes", "--d", "1", "--w", "10", "--mode", "lattice", "--out", "n",
        ],
    );
    assert!(gen.status.success());
    std::fs::write(dir.join("f.csv"), "c,s_1\n1,0\n-0.5,2\n0.25,-3\n").unwrap();
    let out = run_in(
        &dir,
        &[
            "reconstruct",
            "--nodes",
            "n/nodes.csv",
            "--f",
            "f.csv",
            "--lambda",
            "1",
            "--grid=-3:3:0.25",
            "--out",
            "r",
        ],
    );
    assert!(out.status.success(), "{:?}", out);
    let csv = std::fs::read_to_string(dir.join("r/recon.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t_1,f_true,f_rec,abs_err");
    for line in lines {
        let err: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(err <= 1e-12, "row {line}");
    }
}

#[test]
fn missing_node_file_exits_3() {
    let dir = temp_dir("missing");
    let out = run_in(
        &dir,
        &["gram", "--nodes", "does-not-exist.csv", "--out", "g"],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_flag_exits_2() {
    let dir = temp_dir("usage");
    let out = run_in(&dir, &["kadec", "--sweep", "3", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_domain_violation_exits_3() {
    let dir = temp_dir("domain");
    let out = run_in(
        &dir,
        &[
            "nodes", "--d", "1", "--w", "4", "--mode", "decaying", "--delta", "0.1", "--rho", "1.5",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn duplicate_nodes_fail_the_solver_with_exit_4() {
    let dir = temp_dir("solver");
    std::fs::write(dir.join("dup.csv"), "k,n_1,t_1\n1,0,0.5\n2,-1,0.5\n3,1,1\n").unwrap();
    let out = run_in(&dir, &["gram", "--nodes", "dup.csv", "--out", "g"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = temp_dir("repro");
    std::fs::write(dir.join("f.csv"), "c,s_1\n0.8,1\n-0.3,-2\n").unwrap();
    let args = [
        "reconstruct",
        "--nodes",
        "n/nodes.csv",
        "--f",
        "f.csv",
        "--lambda",
        "2",
        "--grid=-2:2:0.5",
        "--perturb",
        "1e-3,uniform",
        "--seed",
        "11",
        "--out",
        "r",
    ];
    let gen = run_in(
        &dir,
        &[
            "nodes", "--d", "1", "--w", "12", "--mode", "random", "--delta", "0.1", "--seed", "5",
            "--out", "n",
        ],
    );
    assert!(gen.status.success());
    assert!(run_in(&dir, &args).status.success());
    let first_csv = std::fs::read(dir.join("r/recon.csv")).unwrap();
    let first_manifest = std::fs::read(dir.join("r/run.manifest")).unwrap();
    assert!(run_in(&dir, &args).status.success());
    assert_eq!(first_csv, std::fs::read(dir.join("r/recon.csv")).unwrap());
    assert_eq!(
        first_manifest,
        std::fs::read(dir.join("r/run.manifest")).unwrap()
    );
}

#[test]
fn stability_bound_dominates_measured_deviation() {
    let dir = temp_dir("stab");
    std::fs::write(dir.join("f.csv"), "c,s_1\n1,0\n0.5,1\n").unwrap();
    let gen = run_in(
        &dir,
        &[
            "nodes", "--d", "1", "--w", "15", "--mode", "random", "--delta", "0.1", "--seed", "2",
            "--out", "n",
        ],
    );
    assert!(gen.status.success());
    let out = run_in(
        &dir,
        &[
            "stability",
            "--nodes",
            "n/nodes.csv",
            "--f",
            "f.csv",
            "--eps",
            "1e-3",
            "--trials",
            "5",
            "--grid=-2:2:0.5",
            "--out",
            "s",
        ],
    );
    assert!(out.status.success(), "{:?}", out);
    let csv = std::fs::read_to_string(dir.join("s/stability.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let fields: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!(fields[1] >= fields[2], "bound must dominate: {line}");
    }
}

#[test]
fn biorth_residual_output() {
    let dir = temp_dir("biorth");
    let gen = run_in(
        &dir,
        &[
            "nodes",
            "--d",
            "1",
            "--w",
            "30",
            "--mode",
            "single",
            "--displacement",
            "0.3",
            "--out",
            "n",
        ],
    );
    assert!(gen.status.success());
    let out = run_in(
        &dir,
        &[
            "biorth",
            "--nodes",
            "n/nodes.csv",
            "--l",
            "30",
            "--residual",
            "3",
            "--out",
            "b",
        ],
    );
    assert!(out.status.success(), "{:?}", out);
    let csv = std::fs::read_to_string(dir.join("b/residual.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "m,n,residual");
    assert_eq!(lines.len(), 1 + 7 * 7);
    for line in &lines[1..] {
        let residual: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(residual.abs() <= 1e-8, "row {line}");
    }
}

#[test]
fn svg_output_is_deterministic_and_has_a_polyline() {
    let dir = temp_dir("svg");
    let args = ["kadec", "--sweep", "6", "--svg", "curve.svg", "--out", "k"];
    assert!(run_in(&dir, &args).status.success());
    let first = std::fs::read(dir.join("curve.svg")).unwrap();
    assert!(run_in(&dir, &args).status.success());
    assert_eq!(first, std::fs::read(dir.join("curve.svg")).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert_eq!(text.matches("<polyline").count(), 1);
}
