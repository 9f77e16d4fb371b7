use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn reqmine(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reqmine"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

const TRACE: &str = "time,speed,RPM\n0,10,1000\n0.5,20,2000\n1,35,3000\n1.5,30,2500\n";

#[test]
fn robustness_of_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "t.csv", TRACE);
    let out = reqmine(
        dir.path(),
        &[
            "robustness",
            "--trace",
            "t.csv",
            "--formula",
            "G[0,1)(speed < 40)",
            "--out",
            "r.csv",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("robustness 20 (satisfied)"));
    let csv = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert!(csv.starts_with("# reqmine robustness v1\nformula,robustness,satisfied\n"));
    assert!(csv.contains(",20,true"));

    let out = reqmine(
        dir.path(),
        &[
            "robustness",
            "--trace",
            "t.csv",
            "--formula",
            "F[0,1)(speed >= 40)",
        ],
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("robustness -20 (violated)"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "t.csv", TRACE);
    let unbound = reqmine(
        dir.path(),
        &[
            "robustness",
            "--trace",
            "t.csv",
            "--formula",
            "G[0,1)(speed < $p)",
        ],
    );
    assert_eq!(unbound.status.code(), Some(2));
    let channel = reqmine(
        dir.path(),
        &[
            "robustness",
            "--trace",
            "t.csv",
            "--formula",
            "G[0,1)(gear < 2)",
        ],
    );
    assert_eq!(channel.status.code(), Some(2));

    write(
        dir.path(),
        "bad.json",
        r#"{"template": "sp_rpm", "sead": 4}"#,
    );
    assert_eq!(
        reqmine(dir.path(), &["mine", "--config", "bad.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        reqmine(dir.path(), &["mine", "--template", "nope"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        reqmine(dir.path(), &["mine", "--template", "stay", "--xi", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        reqmine(dir.path(), &["bench-ackley", "--trials", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn mining_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "cfg.json",
        r#"{"template": "sp_rpm", "trials": 2, "falsification_budget": 30, "candidates": 200,
            "validate_samples": 20, "seed": 5}"#,
    );
    let a = reqmine(
        dir.path(),
        &["mine", "--config", "cfg.json", "--out", "a.csv"],
    );
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = reqmine(
        dir.path(),
        &["mine", "--config", "cfg.json", "--out", "b.csv"],
    );
    assert!(b.status.success());
    let text = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(text, fs::read_to_string(dir.path().join("b.csv")).unwrap());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# reqmine mine v1"));
    assert!(lines
        .next()
        .unwrap()
        .starts_with("trial,seed,status,pi1,pi2,"));
    assert_eq!(lines.filter(|l| l.contains(",mined,")).count(), 2);

    let other = reqmine(
        dir.path(),
        &[
            "mine", "--config", "cfg.json", "--seed", "6", "--out", "c.csv",
        ],
    );
    assert!(other.status.success());
    assert_ne!(text, fs::read_to_string(dir.path().join("c.csv")).unwrap());
}

#[test]
fn infeasible_mining_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "cfg.json",
        r#"{"formula": "G[0,30)(speed < $p)",
            "params": [{"name": "p", "kind": "scale", "lower": 0, "upper": 1, "monotonicity": "increasing"}],
            "falsification_budget": 5, "candidates": 50}"#,
    );
    let out = reqmine(
        dir.path(),
        &["mine", "--config", "cfg.json", "--out", "m.csv"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(fs::read_to_string(dir.path().join("m.csv"))
        .unwrap()
        .contains(",infeasible,"));
}

#[test]
fn falsify_writes_iterations_and_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "cfg.json",
        r#"{"trace_out": "cex.csv", "candidates": 100}"#,
    );
    let out = reqmine(
        dir.path(),
        &[
            "falsify",
            "--config",
            "cfg.json",
            "--formula",
            "G[0,30)(speed < 50)",
            "--budget",
            "50",
            "--out",
            "f.csv",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("falsified after"));
    let f = fs::read_to_string(dir.path().join("f.csv")).unwrap();
    assert!(f.starts_with("# reqmine falsify v1\niteration,x1,x2,x3,x4,robustness\n"));
    let cex = fs::read_to_string(dir.path().join("cex.csv")).unwrap();
    assert!(cex.starts_with("time,speed,RPM,gear\n"));

    let out = reqmine(
        dir.path(),
        &[
            "falsify",
            "--template",
            "sp_rpm",
            "--budget",
            "5",
            "--candidates",
            "50",
        ],
    );
    assert_eq!(out.status.code(), Some(2), "--candidates is not a flag");
}

#[test]
fn bench_and_sweep_write_companion_files() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "b.json",
        r#"{"budget": 6, "candidates": 80, "strategies": ["gp_acb", "nelder_mead"]}"#,
    );
    for name in ["b1.csv", "b2.csv"] {
        let out = reqmine(
            dir.path(),
            &[
                "bench-ackley",
                "--config",
                "b.json",
                "--trials",
                "3",
                "--out",
                name,
            ],
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let main = fs::read_to_string(dir.path().join("b1.csv")).unwrap();
    assert_eq!(main, fs::read_to_string(dir.path().join("b2.csv")).unwrap());
    // gp_acb with two kernels plus nelder_mead, six iterations each
    assert_eq!(main.lines().count(), 2 + 3 * 6);
    let trials = fs::read_to_string(dir.path().join("b1_trials.csv")).unwrap();
    assert_eq!(
        trials,
        fs::read_to_string(dir.path().join("b2_trials.csv")).unwrap()
    );
    assert_eq!(trials.lines().count(), 2 + 3 * 3);

    write(
        dir.path(),
        "s.json",
        r#"{"xis": [0.5, 1.0], "trials": 2, "falsification_budget": 10, "candidates": 60}"#,
    );
    let out = reqmine(
        dir.path(),
        &["scaling-sweep", "--config", "s.json", "--out", "s.csv"],
    );
    assert!(
        out.status.code().is_some_and(|c| c <= 1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert!(summary.starts_with(
        "# reqmine scaling-sweep v1\nxi,trials,mined,mean_simulations,mean_rounds\n0.5,2,"
    ));
    let per_trial = fs::read_to_string(dir.path().join("s_trials.csv")).unwrap();
    assert_eq!(per_trial.lines().count(), 2 + 4);
    assert!(per_trial.lines().nth(3).unwrap().starts_with("0.5,1,"));
    assert!(per_trial.lines().nth(4).unwrap().starts_with("1,0,"));
}
