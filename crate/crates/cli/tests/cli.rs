use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sizephase"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let o = run(args);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout).unwrap()
}

#[test]
fn reproduce_tables_passes() {
    let out = stdout(&["reproduce-tables"]);
    assert!(out.contains("# overall pass"), "{out}");
}

#[test]
fn thermal_single_size() {
    let out = stdout(&["thermal", "--N", "15"]);
    let row = out.lines().find(|l| l.starts_with("15\t")).unwrap();
    let t: f64 = row.split('\t').nth(3).unwrap().parse().unwrap();
    assert!((t - 0.0502).abs() < 1e-3);
}

#[test]
fn thermal_table() {
    let out = stdout(&["thermal", "table1"]);
    assert_eq!(
        out.lines().filter(|l| l.ends_with("Pass")).count(),
        5,
        "{out}"
    );
}

#[test]
fn toric_two_by_two() {
    let out = stdout(&["toric", "--size", "2x2"]);
    assert!(out.contains("12\t13\t12\t-13\t1\t2\ttrue"), "{out}");
}

#[test]
fn sweep_finds_sixteen() {
    let out = stdout(&["sweep", "--construction", "prime:q=3", "--sizes", "14..17"]);
    assert!(out.contains("# transition_at 16"), "{out}");
}

#[test]
fn render_ascii_pattern() {
    let out = stdout(&["render", "--construction", "prime:q=3", "--size", "6"]);
    assert!(out.lines().count() >= 6);
}

#[test]
fn json_output_parses() {
    let out = stdout(&["--format", "json", "toric", "--size", "2x2"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["gap"], "2");
}

#[test]
fn out_dir_receives_report() {
    let dir = tempfile::tempdir().unwrap();
    run(&[
        "--out",
        dir.path().to_str().unwrap(),
        "toric",
        "--size",
        "1x1",
    ]);
    assert!(std::fs::read_dir(dir.path()).unwrap().count() >= 1);
}

#[test]
fn bad_input_exits_with_two() {
    for args in [
        &["toric", "--size", "zz"][..],
        &["sweep", "--construction", "prime:q=1", "--sizes", "1..2"],
        &["sweep", "--construction", "nope", "--sizes", "1..2"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}
