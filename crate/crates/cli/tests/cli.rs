use std::path::Path;
use std::process::{Command, Output};

fn toruswalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toruswalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn dist_exact_and_simulated() {
    let o = toruswalk(&["dist", "--builtin", "rational:3", "--k", "2", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "0.0000000000000000e0,5.0000000000000000e-1");

    let o = toruswalk(&[
        "dist",
        "--builtin",
        "diagonal:0.5",
        "--k",
        "1",
        "--trials",
        "1000",
        "--seed",
        "1",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["point"][0], 0.5);
    assert_eq!(v[0]["weight"], 1.0);
}

#[test]
fn disc_reads_a_point_set_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.csv");
    std::fs::write(&file, "0.0,0.25\n0.25,0.25\n0.5,0.25\n0.75,0.25\n").unwrap();
    let o = toruswalk(&["disc", file.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(v["exactness"], "exact");

    let o = toruswalk(&["disc", file.to_str().unwrap(), "--resolution", "8", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("D,direction,lower,upper\n"));

    let o = toruswalk(&["disc", dir.path().join("missing.csv").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn bounds_exit_codes() {
    let o = toruswalk(&["bounds", "--builtin", "golden", "--k", "10000", "--ca", "0.38"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["M"], 6);
    assert_eq!(v["lemma_ok"], true);
    assert_eq!(v["upper"]["certified_up_to"], 1000);
    assert!(v["etk_bound"].as_f64().unwrap() > 0.0);

    // Too few steps for any admissible M.
    assert_eq!(
        code(&toruswalk(&[
            "bounds",
            "--builtin",
            "golden",
            "--k",
            "10",
            "--ca",
            "0.38"
        ])),
        3
    );
    // Not certified on the searched range.
    assert_eq!(
        code(&toruswalk(&[
            "bounds",
            "--builtin",
            "golden",
            "--k",
            "10",
            "--ca",
            "0.437"
        ])),
        2
    );
    // No matrix at all.
    assert_eq!(code(&toruswalk(&["bounds", "--k", "10"])), 2);
}

#[test]
fn dirichlet_and_badapprox() {
    let o = toruswalk(&["dirichlet", "--builtin", "golden", "--q", "3"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["h"][0], 2);

    let o = toruswalk(&["badapprox", "--builtin", "golden", "--hmax", "100"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["c_est"].as_f64().unwrap() - 0.381966011250105).abs() < 1e-12);

    assert_eq!(
        code(&toruswalk(&["badapprox", "--builtin", "golden", "--ca", "0.4"])),
        2
    );
    assert_eq!(
        code(&toruswalk(&["badapprox", "--builtin", "golden", "--ca", "0.3"])),
        0
    );
}

#[test]
fn matrix_file_source() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.txt");
    std::fs::write(&m, "# two generators on the circle\n0.5\n0.25\n").unwrap();
    let o = toruswalk(&["dist", "--matrix", m.to_str().unwrap(), "--k", "1", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 3);
    assert_eq!(code(&toruswalk(&["dist", "--matrix", "nope.txt", "--k", "1"])), 2);
}

fn read(dir: &Path, file: &str) -> String {
    std::fs::read_to_string(dir.join(file)).unwrap()
}

#[test]
fn scan_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("golden");
    let o = toruswalk(&[
        "scan",
        "--builtin",
        "golden",
        "--k-schedule",
        "2^4..2^10",
        "--ca",
        "0.38",
        "--svg",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&read(&out, "scan.json")).unwrap();
    let slope = v["fitted_exponent"].as_f64().unwrap();
    assert!((-0.6..=-0.4).contains(&slope), "{slope}");
    assert_eq!(v["rows"].as_array().unwrap().len(), 7);
    assert_eq!(v["certification"]["certified_up_to"], 1000);
    assert_eq!(read(&out, "scan.csv").lines().count(), 8);
    assert!(read(&out, "scan.svg").starts_with("<svg"));
}

#[test]
fn scan_rational_support() {
    let dir = tempfile::tempdir().unwrap();
    let o = toruswalk(&[
        "scan",
        "--builtin",
        "rational:3",
        "--k-schedule",
        "1..50",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&read(dir.path(), "scan.json")).unwrap();
    for row in v["rows"].as_array().unwrap() {
        assert!(row["D"].as_f64().unwrap() >= 0.3);
    }
}

#[test]
fn scan_config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.conf");
    std::fs::write(&cfg, "builtin = golden\nk_schedule = 1..3\nseed = 4\n").unwrap();
    let o = toruswalk(&[
        "scan",
        "--config",
        cfg.to_str().unwrap(),
        "--k",
        "7",
        "--out",
        dir.path().to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(code(&o), 0);
    let csv = stdout(&o);
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("7,exact,exact,"));
}

#[test]
fn scan_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        code(&toruswalk(&[
            "scan",
            "--builtin",
            "golden",
            "--k-schedule",
            "",
            "--out",
            out
        ])),
        2
    );
    assert_eq!(code(&toruswalk(&["scan", "--k-schedule", "1..3", "--out", out])), 2);
    assert_eq!(
        code(&toruswalk(&[
            "scan",
            "--builtin",
            "golden",
            "--k",
            "3",
            "--method",
            "fast",
            "--out",
            out
        ])),
        2
    );
    assert_eq!(
        code(&toruswalk(&[
            "scan",
            "--builtin",
            "golden",
            "--k",
            "3",
            "--ca",
            "0.437",
            "--out",
            out
        ])),
        2
    );
    // Exact discrepancy in d = 3 is capped at 60 atoms.
    assert_eq!(
        code(&toruswalk(&[
            "scan",
            "--builtin",
            "sqrt_primes:1x3",
            "--k",
            "100",
            "--method",
            "exact",
            "--out",
            out
        ])),
        2
    );
}
