use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_besov-haar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn probe_reports_divergence() {
    let out = run(&[
        "probe-chi",
        "--params",
        "1,2,inf,0,1",
        "--jmin",
        "4",
        "--jmax",
        "10",
        "--check",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("J,norm,log2_norm"));
    assert_eq!(lines.count(), 7);
    assert!(String::from_utf8_lossy(&out.stderr).contains("classification=divergent"));
}

#[test]
fn probe_is_deterministic() {
    let args = ["probe-chi", "--params", "0.5,2,2,0.25,2", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn check_failure_exits_with_three() {
    // A huge threshold hides the divergence, so the probe disagrees with the predicate.
    let out = run(&[
        "probe-chi",
        "--params",
        "1,2,inf,0,1",
        "--slope-threshold",
        "10",
        "--check",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn rejected_inputs_exit_with_two() {
    assert_eq!(run(&["probe-chi", "--params", "1,0,1,0,1"]).status.code(), Some(2));
    assert_eq!(
        run(&["probe-chi", "--params", "1,2,1,0,1", "--shift", "0.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["family", "--substep", "substep21", "--params=0,2,2,0,2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["aj-verify", "--dim", "1", "--alpha", "1.0", "--level", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["regions"]).status.code(), Some(2));
}

#[test]
fn family_table() {
    let out = run(&[
        "family",
        "--substep",
        "substep22",
        "--params=-2,2,1,1,2",
        "--nmin",
        "8",
        "--jmax",
        "12",
        "--check",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("N,norm,pairing,ratio\n8,"));
    assert_eq!(text.lines().count(), 6);

    let zero = run(&[
        "family",
        "--substep",
        "2.5",
        "--params",
        "2,0.5,2,0,2",
        "--zero-lambda",
        "--jmax",
        "10",
    ]);
    assert_eq!(zero.status.code(), Some(0));
    for line in stdout(&zero).lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(&cols[1..], ["0", "0", "0"]);
    }
}

#[test]
fn region_sweep_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    std::fs::write(
        &config,
        r#"{"sweep": {"s": [1.5], "p": [0.5], "q": [0.8, 2, "inf"], "tau": [0.5], "n": [2]}}"#,
    )
    .unwrap();
    let out_path = dir.path().join("regions.csv");
    let out = run(&[
        "regions",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "s,p,q,tau,n,membership,functional,active_condition");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("1.5,0.5,0.8,0.5,2,member,Open,"));
    assert!(lines[2].contains(",DoesNotExtend,"));
    assert!(lines[3].starts_with("1.5,0.5,inf,"));
}

#[test]
fn coefficients_round_trip_through_norm() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coeffs.csv");
    let out = run(&[
        "haar-analyze",
        "--dim",
        "2",
        "--random-resolution",
        "3",
        "--seed",
        "11",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# seed=11\nkind,i,j,m1,m2,value\n"));
    let norm = run(&[
        "norm",
        "--coefficients",
        path.to_str().unwrap(),
        "--params",
        "0.5,2,2,0.25,2",
        "--check",
    ]);
    assert_eq!(norm.status.code(), Some(0));
    assert!(stdout(&norm).starts_with("norm,brute_force\n"));
}

#[test]
fn diffnorm_witness() {
    let out = run(&["diffnorm", "--params", "0.5,2,2,0,1", "--octaves", "6", "--check"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("t,witness_integral,shell_sup,lower_bound_holds,term,partial\n0.5,0.25,"));
    assert_eq!(text.lines().count(), 7);
    assert_eq!(run(&["diffnorm", "--params", "1,2,2,0,1"]).status.code(), Some(2));
}

#[test]
fn aj_verify_json() {
    let out = run(&[
        "aj-verify",
        "--dim",
        "2",
        "--alpha",
        "1.5",
        "--level",
        "5",
        "--format",
        "json",
        "--check",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["report"]["passed"], serde_json::Value::Bool(true));
    assert_eq!(value["members"].as_array().unwrap().len(), 181);
}
