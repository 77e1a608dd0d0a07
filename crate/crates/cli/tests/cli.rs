use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn twogroup(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twogroup"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn workdir() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.txt"), "0.9\n1.2\n0.8\n\n1.1\n1.0\n0.95\n").unwrap();
    fs::write(
        dir.path().join("b.txt"),
        "# test group\n2.1\n1.9\n2.3\n2.0\n2.2\n",
    )
    .unwrap();
    dir
}

#[test]
fn infer_prints_one_row() {
    let dir = workdir();
    let o = twogroup(
        &[
            "infer", "--group0", "a.txt", "--group1", "b.txt", "--alpha", "0.05",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("id,delta_hat,rmse"));
    assert!(lines[1].starts_with("sample,") && lines[1].ends_with(",ok"));
}

#[test]
fn bad_token_is_a_data_error_with_location() {
    let dir = workdir();
    fs::write(dir.path().join("bad.txt"), "1.0\n2.0\nabc\n").unwrap();
    let o = twogroup(&["infer", "--group0", "a.txt", "--group1", "bad.txt"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 3") && err.contains("\"abc\""), "{err}");
    assert!(stdout(&o).is_empty());
}

#[test]
fn missing_file_and_constant_group_are_data_errors() {
    let dir = workdir();
    let o = twogroup(
        &["infer", "--group0", "a.txt", "--group1", "nope.txt"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nope.txt"));

    fs::write(dir.path().join("flat.txt"), "3\n3\n3\n").unwrap();
    let o = twogroup(
        &["infer", "--group0", "a.txt", "--group1", "flat.txt"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("zero within-group spread"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = workdir();
    for args in [
        &[
            "infer", "--group0", "a.txt", "--group1", "b.txt", "--alpha", "1.5",
        ][..],
        &["infer", "--group0", "a.txt", "--frobnicate"][..],
        &["simulate", "--preset", "fig9"][..],
        &["simulate", "--preset", "fig1", "--n0", "10"][..],
        &["simulate", "--sweep", "n0:21", "--replications", "10"][..],
        &["simulate", "--sweep", "mu:1,2"][..],
        &["simulate", "--gnuplot-script", "x.gp"][..],
    ] {
        let o = twogroup(args, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn help_lists_presets() {
    let o = twogroup(&["simulate", "--help"], Path::new("."));
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for p in ["fig1", "fig2a", "fig2b", "fig3a", "fig3b"] {
        assert!(text.contains(p), "{p}");
    }
}

#[test]
fn preset_sweep_is_deterministic_and_thread_independent() {
    let dir = workdir();
    let run = |threads: &str, out: &str| {
        let o = twogroup(
            &[
                "--threads",
                threads,
                "simulate",
                "--preset",
                "fig1",
                "--replications",
                "100",
                "--seed",
                "7",
                "--out",
                out,
            ],
            dir.path(),
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        fs::read_to_string(dir.path().join(out)).unwrap()
    };
    let a = run("1", "a.csv");
    let b = run("0", "b.csv");
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 22);
    assert!(a.starts_with("sweep_value,fp_rate_proposed,fp_rate_welch"));
}

#[test]
fn histogram_preset_and_gnuplot_script() {
    let dir = workdir();
    let o = twogroup(
        &[
            "simulate",
            "--preset",
            "fig2b",
            "--replications",
            "200",
            "--out",
            "h.csv",
            "--gnuplot-script",
            "h.gp",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = fs::read_to_string(dir.path().join("h.csv")).unwrap();
    assert_eq!(
        table.lines().next(),
        Some("bin_lo,bin_hi,count_proposed,count_welch")
    );
    let counts: usize = table
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(counts, 200);
    let script = fs::read_to_string(dir.path().join("h.gp")).unwrap();
    assert!(script.contains("'h.csv'") && script.contains("with boxes"));
}

#[test]
fn explicit_n0_sweep() {
    let dir = workdir();
    let o = twogroup(
        &["simulate", "--sweep", "n0:8,16", "--replications", "50"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    // both error kinds are filled for every row
    for line in text.lines().skip(1) {
        assert!(line.split(',').all(|c| !c.is_empty()), "{line}");
    }
}

#[test]
fn batch_writes_file_and_summary() {
    let dir = workdir();
    fs::write(
        dir.path().join("m.csv"),
        "id,0,0,0,1,1,1\r\nm1,1,2,3,4,5,6.5\r\nflat,1,2,3,5,5,5\r\nm3,1,2,3,1.5,2.5,2\r\n",
    )
    .unwrap();
    let o = twogroup(
        &["batch", "--input", "m.csv", "--alpha", "0.05", "--out", "r.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary = stdout(&o);
    assert!(summary.starts_with("significant_proposed="), "{summary}");
    assert!(summary.contains("markers=3 failed=1"));
    assert!(stderr(&o).contains("\"flat\""));
    let table = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let ids: Vec<&str> = table
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(ids, ["m1", "flat", "m3"]);
}

#[test]
fn batch_parse_errors_report_line_and_token() {
    let dir = workdir();
    fs::write(dir.path().join("m.csv"), "id,0,0,1,1\nm1,1,2,3,4\nm2,1,2,3e,4\n").unwrap();
    let o = twogroup(&["batch", "--input", "m.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 3") && err.contains("\"3e\""), "{err}");

    fs::write(dir.path().join("h.csv"), "id,0,1,1\nm1,1,2,3\n").unwrap();
    let o = twogroup(&["batch", "--input", "h.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("header"));
}
