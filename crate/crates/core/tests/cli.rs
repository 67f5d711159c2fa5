use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hornopt(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hornopt"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_poly(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simplify_formats() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_poly(dir.path(), "eq1.txt", "x^2*z + x^3*y + x^3*y*z\n");

    let o = hornopt(&["simplify", &f, "--strategy", "exhaustive"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    for key in ["strategy=", "original_total=", "final_total=", "delta=", "scheme=", "direction=", "evaluations="] {
        assert!(text.lines().any(|l| l.starts_with(key)), "missing {key} in {text}");
    }

    let o = hornopt(&["simplify", &f, "--strategy", "mcts-uct", "--iterations", "20", "--format", "json"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["strategy"], "mcts-uct");
    assert_eq!(v["iterations"], 20);
    assert_eq!(v["evaluations"], 20);

    let o = hornopt(&["simplify", &f, "--format", "csv"], dir.path());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("strategy,variables,terms,"));
}

#[test]
fn count_and_emit() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_poly(dir.path(), "p.txt", "x^2*z + x^3*y + x^3*y*z");
    let o = hornopt(&["count", &f], dir.path());
    assert_eq!(stdout(&o).lines().take(5).collect::<Vec<_>>(), ["variables=3", "terms=3", "muls=9", "adds=2", "total=11"]);

    let o = hornopt(&["emit", &f, "--scheme", "x,y,z", "--target", "out"], dir.path());
    assert!(o.status.success());
    let code = stdout(&o);
    assert_eq!(code.lines().count(), 7);
    assert!(code.ends_with("out = Z6;"), "{code}");
}

#[test]
fn gen_res_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = hornopt(&["gen-res", "3", "2"], dir.path());
    assert!(o.status.success());
    let report = stdout(&o);
    assert!(report.contains("variables=7\n"), "{report}");
    let text = fs::read_to_string(dir.path().join("res_3_2.txt")).unwrap();
    let f = dir.path().join("res_3_2.txt");
    let o = hornopt(&["count", f.to_str().unwrap()], dir.path());
    assert!(stdout(&o).contains("variables=7"));
    assert!(text.ends_with('\n'));

    let o = hornopt(&["gen-res", "2", "1", "-o", "-"], dir.path());
    assert_eq!(stdout(&o), "a0*b1^2 - a1*b0*b1 + a2*b0^2\n");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_poly(dir.path(), "bad.txt", "x^0 + y");
    assert_eq!(hornopt(&["count", &f], dir.path()).status.code(), Some(2));
    assert_eq!(hornopt(&["count", "missing.txt"], dir.path()).status.code(), Some(2));
    assert_eq!(hornopt(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(hornopt(&["simplify", &f, "--cp", "abc"], dir.path()).status.code(), Some(1));
    let g = write_poly(dir.path(), "good.txt", "a*b + c");
    assert_eq!(
        hornopt(&["simplify", &g, "--strategy", "mcts-uct", "--cp", "-1"], dir.path()).status.code(),
        Some(1)
    );
    assert_eq!(hornopt(&["gen-res", "9", "9"], dir.path()).status.code(), Some(2));
    let o = hornopt(&["count", &f], dir.path());
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:3"));
}

#[test]
fn sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_poly(dir.path(), "p.txt", "a*b*c + a^2*d + b*d*e - 3*c*e + a*e^2 + 7 + b^3*c*d + a*c*d*e");
    let args = |out: &str, jobs: &str| {
        vec![
            "sweep".to_string(),
            f.clone(),
            "--strategy".into(),
            "mcts-sa-uct".into(),
            "--cp-min".into(),
            "0.05".into(),
            "--cp-max".into(),
            "5".into(),
            "--points".into(),
            "4".into(),
            "--dots".into(),
            "3".into(),
            "--iterations".into(),
            "40".into(),
            "--repetitions".into(),
            "2".into(),
            "--direction".into(),
            "both".into(),
            "--seed".into(),
            "9".into(),
            "--jobs".into(),
            jobs.into(),
            "--output".into(),
            out.into(),
        ]
    };
    let run = |a: Vec<String>| {
        let refs: Vec<&str> = a.iter().map(String::as_str).collect();
        assert!(hornopt(&refs, dir.path()).status.success());
    };
    run(args("a.csv", "1"));
    run(args("b.csv", "1"));
    run(args("c.csv", "3"));
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.csv")).unwrap());
    assert_eq!(a, fs::read(dir.path().join("c.csv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "strategy,C_p,N,R,direction,seed,ops_total,ops_muls,ops_adds,best_scheme,wall_seconds"
    );
    assert_eq!(text.lines().count(), 1 + 4 * 2 * 3);

    let o = hornopt(&["region", "a.csv"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("region_points="));
}
