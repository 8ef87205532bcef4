use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gnls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gnls")).args(args).output().expect("gnls runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const QUICK_RUN: &str = "grid_n = 1024\nbox_l = 240\nt_max = 6\nblowup_gradient_factor = 10\n";

#[test]
fn star_condition_from_files_and_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("quarter.txt");
    fs::write(&g, "# order four\n0 1 0 0 1\n1 0 -1 1 0\n1 0 1 -1 0\n0 -1 0 0 -1\n").unwrap();
    let g = g.to_str().unwrap();

    let o = gnls(&["group", "verify", "--group-file", g]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("group: quarter\norder: 4\ndim: 2\nfixed_dim: 0\n"), "{text}");

    let o = gnls(&["group", "star", "--group-file", g, "--sub", "quarter_turn_g1"]);
    assert_eq!(stdout(&o).trim(), "false");
    let o = gnls(&["group", "star", "--group-file", g]);
    assert_eq!(stdout(&o).trim(), "true");

    let o = gnls(&["group", "subgroups", "--group", "quarter_turn"]);
    let text = stdout(&o);
    assert!(text.contains("quarter_turn_g1,2,0,false"), "{text}");
    assert!(text.contains("trivial2,1,2,true"), "{text}");
}

#[test]
fn bad_group_file_is_a_run_failure() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("broken.txt");
    fs::write(&g, "0 1 0 0 1\n0 0 1 1\n").unwrap();
    let o = gnls(&["group", "verify", "--group-file", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("run");
    fs::write(&cfg, format!("{QUICK_RUN}a = 0.8\nout = {}\n", out.display())).unwrap();
    let cfg = cfg.to_str().unwrap();

    let o = gnls(&["experiment", "--config", cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("prediction: SCATTER"));
    assert!(text.contains("agreement: CONFIRMED"));
    assert!(out.join("results.csv").exists() && out.join("manifest.txt").exists());

    let failed = dir.path().join("zero");
    let o = gnls(&["experiment", "--config", cfg, "--a", "0", "--out", failed.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let manifest = fs::read_to_string(failed.join("manifest.txt")).unwrap();
    assert!(manifest.contains("status = FAILED"), "{manifest}");
}

#[test]
fn classify_reads_a_saved_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, format!("{QUICK_RUN}a = 1.1\nt_max = 0.01\n")).unwrap();
    let o = gnls(&["experiment", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let snap = out.join("initial.nlsf");
    let o = gnls(&["classify", "--snapshot", snap.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "no l-value is known without --compute or a ledger");
    let o = gnls(&["classify", "--compute", "--snapshot", snap.to_str().unwrap()]);
    assert!(stdout(&o).contains("prediction: BLOWUP_OR_GROWUP"));
}

#[test]
fn threshold_ledger_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ledger = dir.path().join("thresholds.csv");
    let o = gnls(&["threshold", "--compute", "--dim", "1", "--out", ledger.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&ledger).unwrap();
    assert!(text.starts_with("group_id,omega,l,m,s,chain,flags"));
    let o = gnls(&["threshold", "--dim", "1", "--ledger", ledger.to_str().unwrap()]);
    assert!(stdout(&o).contains("threshold: 1.33549520"), "{}", stdout(&o));
}

#[test]
fn sweep_writes_a_phase_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    fs::write(&cfg, QUICK_RUN).unwrap();
    let out = dir.path().join("phase");
    let o = gnls(&["sweep", "--config", cfg.to_str().unwrap(), "--vary", "a=0.7,0.8", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(out.join("phase.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(table.lines().skip(1).all(|l| l.ends_with("CONFIRMED")), "{table}");
    assert!(Path::new(&out.join("run_0001")).is_dir());
}
