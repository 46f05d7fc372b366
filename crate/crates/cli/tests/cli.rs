use std::process::{Command, Output};

fn depthzero(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_depthzero"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_nonregular_exits_zero() {
    let o = depthzero(&[
        "verify",
        "--primes",
        "3,5,7",
        "--packet",
        "nonregular",
        "--s",
        "s1",
        "--samples",
        "100",
        "--seed",
        "42",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 600);
    assert!(text.lines().all(|l| l.ends_with("\"verdict\":\"equal\"}")));
}

#[test]
fn falsify_exits_zero_with_all_unequal() {
    let o = depthzero(&["falsify", "--primes", "3", "--samples", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 100);
    assert!(text.lines().all(|l| l.contains("\"verdict\":\"unequal\"")));
}

#[test]
fn undetermined_checks_warn_but_pass() {
    let o = depthzero(&[
        "verify",
        "--packet",
        "nonregular",
        "--s",
        "s2",
        "--class",
        "near",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o)
        .lines()
        .all(|l| l.contains("\"verdict\":\"skipped: ")));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("warning: 100 checks skipped"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify", "--primes", "4"][..],
        &["verify", "--samples", "0"],
        &["verify", "--format", "xml"],
        &["verify", "--packet", "regular:2", "--primes", "3"],
        &["verify", "--max-valuation", "6"],
        &["verify", "--unknown-flag"],
        &["frobnicate"],
    ] {
        let o = depthzero(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn identical_seeds_give_identical_bytes() {
    let args = [
        "verify",
        "--packet",
        "regular",
        "--s",
        "all",
        "--samples",
        "15",
        "--seed",
        "7",
    ];
    let a = depthzero(&args);
    let b = depthzero(&args);
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    let c = depthzero(&[
        "verify",
        "--packet",
        "regular",
        "--s",
        "all",
        "--samples",
        "15",
        "--seed",
        "8",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn out_file_and_csv() {
    let dir = std::env::temp_dir().join(format!("depthzero-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("reports.csv");
    let o = depthzero(&[
        "properties",
        "--primes",
        "5",
        "--samples",
        "4",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("p,N,eps,packet,level,s,a,b,valuation_b,classification,lhs,rhs,verdict")
    );
    assert!(lines.all(|l| l.ends_with(",equal")));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn table_lists_character_tables_and_values() {
    let o = depthzero(&["table", "--primes", "3,5", "--samples", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("Klein4 character table"));
    assert!(text.contains("Q8 character table"));
    assert!(text.contains("p = 3, N = 8, eps = 2"));
    assert!(text.contains("p = 5, N = 8, eps = 2"));
}
