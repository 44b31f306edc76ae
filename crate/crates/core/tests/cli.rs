use std::path::Path;
use std::process::{Command, Output};

fn schrolab(args: &[&str], out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_schrolab"));
    cmd.args(args);
    if let Some(dir) = out {
        cmd.arg("--out").arg(dir);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn lists_presets() {
    let o = schrolab(&["list-presets"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for name in ["example-point", "example-twin", "example-obstacle", "oned-sweep", "verify-all"] {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
}

#[test]
fn point_preset_writes_outputs_and_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = schrolab(&["run", "example-point", "--alpha", "3", "--n", "65"], Some(tmp.path()));
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("CHECK absorption PASS margin=")));
    assert!(text.lines().all(|l| !l.starts_with("CHECK") || l.contains(" PASS margin=")));
    for file in ["summary.txt", "torsion.csv", "ladder.csv", "solution.csv", "masks.csv", "zeroset.csv", "verdicts.csv"] {
        assert!(tmp.path().join(file).is_file(), "{file}");
    }
    let summary = std::fs::read_to_string(tmp.path().join("summary.txt")).unwrap();
    assert_eq!(summary, text);
}

#[test]
fn output_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let first = schrolab(&["run", "example-twin", "--n", "33"], Some(&a));
    let second = schrolab(&["run", "example-twin", "--n", "33"], Some(&b));
    assert_eq!(first.stdout, second.stdout);
    for file in ["masks.csv", "solution_off_z.csv", "zeroset.csv"] {
        assert_eq!(std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn malformed_input_exits_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    std::fs::write(&cfg, "name = bad\ndomain = disk 0 0 r=1\npotential = point 0 0 alpha=oops\n").unwrap();
    let o = schrolab(&["run", cfg.to_str().unwrap()], Some(tmp.path()));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    assert_eq!(schrolab(&["run", "example-point", "--n", "2"], None).status.code(), Some(2));
    assert_eq!(schrolab(&["run", "example-point", "--ladder", "1,2"], None).status.code(), Some(2));
    assert_eq!(schrolab(&["run", "example-point", "--frobnicate"], None).status.code(), Some(2));
    assert_eq!(schrolab(&["run", "no-such-preset"], None).status.code(), Some(2));
}

#[test]
fn failed_check_exits_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let o = schrolab(&["run", "example-obstacle", "--n", "33", "--tol-z", "0.5"], Some(tmp.path()));
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("CHECK in-z FAIL margin=-"));
    assert!(text.ends_with("RESULT FAIL\n"));
}

#[test]
fn unreachable_solver_tolerance_exits_with_three() {
    let tmp = tempfile::tempdir().unwrap();
    let o = schrolab(&["run", "example-point", "--n", "17", "--tol-cg", "1e-300"], Some(tmp.path()));
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn config_file_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("point.cfg");
    std::fs::write(
        &cfg,
        "# off-centre point, data away from it\nname = point\ndomain = disk 0 0 r=1\n\
         potential = point 0.2 0 alpha=2.5\n\
         data = indicator disk -0.4 0 r=0.3\nresolutions = 33, 49\n",
    )
    .unwrap();
    let out = tmp.path().join("out");
    let o = schrolab(&["run", cfg.to_str().unwrap()], Some(&out));
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("CHECK comparison@n49 PASS"));
    assert!(out.join("n33/masks.csv").is_file());
    assert!(out.join("n49/solution.csv").is_file());
}
