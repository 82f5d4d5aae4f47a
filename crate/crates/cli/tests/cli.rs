use std::path::Path;
use std::process::{Command, Output};

fn stdmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stdmap")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn deterministic_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = stdmap(&["--deterministic", "--out", d.path().to_str().unwrap(), "lyapunov", "--lambda", "4", "--grid", "3", "--steps", "3000", "--portrait", "20"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["lyapunov.csv", "orbit.csv", "lyapunov.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{}", f);
    }
}

#[test]
fn parallel_and_sequential_agree_on_values() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["lyapunov", "--lambda", "6", "--grid", "3", "--steps", "2000"];
    assert_eq!(code(&stdmap(&[&["--out", a.path().to_str().unwrap()][..], &args].concat())), 0);
    assert_eq!(code(&stdmap(&[&["--deterministic", "--out", b.path().to_str().unwrap()][..], &args].concat())), 0);
    // headers differ through the hash; the rows must not
    let body = |p: &Path| read(&p.join("lyapunov.csv")).lines().skip(1).map(String::from).collect::<Vec<_>>();
    assert_eq!(body(a.path()), body(b.path()));
}

#[test]
fn csv_carries_the_config_hash() {
    let d = tempfile::tempdir().unwrap();
    let o = stdmap(&["--out", d.path().to_str().unwrap(), "bounds", "--lambda-grid", "3:3.3:0.1"]);
    assert_eq!(code(&o), 0);
    let csv = read(&d.path().join("bounds.csv"));
    let mut lines = csv.lines();
    let head = lines.next().unwrap();
    assert!(head.starts_with("# stdmap "));
    assert!(lines.next().unwrap().starts_with("lambda,"));
    assert_eq!(lines.count(), 4);
    let json: serde_json::Value = serde_json::from_str(&read(&d.path().join("bounds.json"))).unwrap();
    let hash = json["config_sha256"].as_str().unwrap();
    assert!(head.ends_with(&format!("config-sha256={}", hash)));
    assert!((json["report"]["lambda0"].as_f64().unwrap() - 3.1547005).abs() < 1e-6);
}

#[test]
fn config_file_matches_flags() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let printed = stdmap(&["--deterministic", "bounds", "--lambda-grid", "2:4:0.5", "--print-config"]);
    assert_eq!(code(&printed), 0);
    let cfg = a.path().join("cfg.json");
    std::fs::write(&cfg, &printed.stdout).unwrap();
    assert_eq!(code(&stdmap(&["--out", b.path().to_str().unwrap(), "run", cfg.to_str().unwrap()])), 0);
    assert_eq!(code(&stdmap(&["--deterministic", "--out", a.path().to_str().unwrap(), "bounds", "--lambda-grid", "2:4:0.5"])), 0);
    assert_eq!(read(&a.path().join("bounds.csv")), read(&b.path().join("bounds.csv")));
    assert_eq!(read(&a.path().join("bounds.json")), read(&b.path().join("bounds.json")));
}

#[test]
fn config_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = d.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.to_str().unwrap().to_string()
    };
    for body in [
        r#"{"version":1,"subcommand":"lyapunov","params":{"lamda":3}}"#,
        r#"{"version":1,"subcommand":"lyapunov","extra":true}"#,
        r#"{"version":9,"subcommand":"bounds"}"#,
        r#"{"version":1,"subcommand":"nonsense"}"#,
        "not json",
    ] {
        let o = stdmap(&["run", &write("c.json", body)]);
        assert_eq!(code(&o), 2, "{}", body);
    }
    assert_eq!(code(&stdmap(&["run", "/no/such/file.json"])), 2);
    assert_eq!(code(&stdmap(&["wspectrum", "--base", "golden", "--wgrid", "4"])), 2);
    assert_eq!(code(&stdmap(&["bounds", "--lambda-grid", "1:0:1"])), 2);
}

#[test]
fn numerical_failure_exits_3() {
    // a zero on the inner circle of the sector
    let o = stdmap(&["jensen", "--root", "0.5,0", "--r", "0.5", "--sectors", "1"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn suite_names() {
    assert_eq!(code(&stdmap(&["suite", "bogus"])), 2);
    assert_eq!(code(&stdmap(&["suite", "acceptance", "--only", "bogus"])), 2);
    let o = stdmap(&["suite", "invariants", "--quick"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let d = tempfile::tempdir().unwrap();
    let o = stdmap(&["--out", d.path().to_str().unwrap(), "suite", "acceptance", "--only", "mu_n_anchor"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("PASS mu_n_anchor"));
    let v: serde_json::Value = serde_json::from_str(&read(&d.path().join("suite_acceptance.json"))).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn measures_are_re_im_weight() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&stdmap(&["--out", d.path().to_str().unwrap(), "dos", "--lambda", "0", "--n", "50", "--m", "2"])), 0);
    let csv = read(&d.path().join("dos.csv"));
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows[0], "re,im,weight");
    let mass: f64 = rows[1..].iter().map(|r| r.split(',').nth(2).unwrap().parse::<f64>().unwrap()).sum();
    assert_eq!(rows.len() - 1, 100);
    assert!((mass - 1.0).abs() < 1e-12);
}
