use std::collections::HashMap;
use std::fs;
use std::process::{Command, Output};

use lambda3_cli::config::load_config;

fn lambda3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lambda3"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn summary(out: &Output) -> HashMap<String, String> {
    stdout(out)
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn value(map: &HashMap<String, String>, key: &str) -> f64 {
    map[key]
        .parse()
        .unwrap_or_else(|_| panic!("{key} = {}", map[key]))
}

#[test]
fn steady_at_crossover_drive() {
    let out = lambda3(&["steady", "--omega", "4.5"]);
    assert!(out.status.success());
    let m = summary(&out);
    for (key, expected) in [
        ("rho00_inf", 0.4725),
        ("rhoB_inf", 0.1261),
        ("rho11_inf", 0.04796),
        ("rho22_inf", 0.4796),
    ] {
        assert!((value(&m, key) - expected).abs() / expected < 5e-4, "{key}");
    }
}

#[test]
fn spectrum_row() {
    let m = summary(&lambda3(&["spectrum", "--omega", "1.0"]));
    for (key, expected) in [
        ("gamma1_re", -11.5922),
        ("gamma2_re", -7.80826),
        ("gamma3_re", -0.105644),
    ] {
        assert!((value(&m, key) - expected).abs() < 5e-4, "{key}");
    }
    assert_eq!(value(&m, "gamma4_re"), 0.0);
    assert_eq!(m["complex_pair"], "false");
}

#[test]
fn config_file_defaults_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.cfg");
    fs::write(&path, "# drive only\nomega = 4.5\n").unwrap();
    let cfg = load_config(&path).unwrap();
    assert_eq!(cfg.params.omega(), 4.5);
    assert_eq!(cfg.params.k02(), 0.1);

    let from_file = lambda3(&["steady", "--config", path.to_str().unwrap()]);
    assert_eq!(
        from_file.stdout,
        lambda3(&["steady", "--omega", "4.5"]).stdout
    );
    let overridden = lambda3(&[
        "steady",
        "--config",
        path.to_str().unwrap(),
        "--omega",
        "10",
    ]);
    assert!((value(&summary(&overridden), "rho22_inf") - 0.7250).abs() < 1e-4);
}

#[test]
fn validation_failure_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    fs::write(&path, "t1 = -1\n").unwrap();
    let err = load_config(&path).unwrap_err().to_string();
    assert!(err.contains("t1"), "{err}");

    let out = lambda3(&["steady", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t1"));
    let out = lambda3(&["evolve", "--t1", "-1"]);
    assert_eq!(out.status.code(), Some(1));

    fs::write(&path, "omega = 1\ncolour = blue\n").unwrap();
    let out = lambda3(&["steady", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("line 2") && stderr.contains("colour"),
        "{stderr}"
    );

    let out = lambda3(&[
        "steady",
        "--config",
        dir.path().join("missing.cfg").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn crossover_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k02.cfg");
    fs::write(&path, "k02 = 0.2\n").unwrap();
    let m = summary(&lambda3(&["crossover", "--config", path.to_str().unwrap()]));
    assert!((value(&m, "omega_star") - 6.6).abs() / 6.6 < 0.02);
    assert!((value(&m, "omega_star") - value(&m, "omega_star_bisection")).abs() < 1e-9);
    let none = summary(&lambda3(&["crossover", "--k02", "1.0"]));
    assert_eq!(none["omega_star"], "none");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(lambda3(&["steady", "--bogus"]).status.code(), Some(2));
    assert_eq!(lambda3(&["teleport"]).status.code(), Some(2));
    assert_eq!(lambda3(&[]).status.code(), Some(2));
    assert_eq!(
        lambda3(&["steady", "--format", "xml"]).status.code(),
        Some(2)
    );
}

#[test]
fn outputs_are_byte_identical() {
    for args in [
        &["evolve", "--omega", "4.5", "--t-end", "1", "--stride", "50"][..],
        &["sweep", "--range", "0:10:41"][..],
        &["decay-fit", "--omega", "10"][..],
    ] {
        let a = lambda3(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, lambda3(args).stdout, "{args:?}");
    }
}

#[test]
fn trajectory_csv_contract() {
    let out = lambda3(&[
        "evolve", "--omega", "10", "--t-end", "0.5", "--stride", "100",
    ]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,rho00,rhoB,rho11,rho22,pop_sum"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows.last().unwrap()[0], 0.5);
    for r in &rows {
        assert_eq!(r.len(), 6);
        assert!((r[5] - 1.0).abs() < 1e-12);
        assert!((r[1] + r[3] + r[4] - r[5]).abs() < 1e-15);
    }

    let exact = stdout(&lambda3(&[
        "exact", "--omega", "10", "--t-end", "0.5", "--stride", "100",
    ]));
    for (a, b) in text.lines().zip(exact.lines()).skip(1) {
        let a: Vec<f64> = a.split(',').map(|x| x.parse().unwrap()).collect();
        let b: Vec<f64> = b.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(a[0], b[0]);
        for k in 1..5 {
            assert!((a[k] - b[k]).abs() < 1e-9);
        }
    }
}

#[test]
fn sweep_csv_contract_and_round_trip() {
    let out = lambda3(&["sweep", "--omega", "0.1,4.5,10"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("omega,rho00_inf,rhoB_inf,rho11_inf,rho22_inf,gamma1_re,gamma1_im,gamma2_re,gamma2_im,gamma3,tau3")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    for (row, w) in rows.iter().zip([0.1, 4.5, 10.0]) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 11);
        assert_eq!(fields[0].parse::<f64>().unwrap(), w);
        for f in fields {
            // Re-emitting the parsed double reproduces the text exactly.
            let x: f64 = f.parse().unwrap();
            assert_eq!(format!("{x:.16e}"), f);
        }
    }
    let tau3: f64 = rows[2].split(',').next_back().unwrap().parse().unwrap();
    assert!((tau3 - 2.674).abs() < 0.01);
}

#[test]
fn verify_full_passes_for_reference_drive() {
    let out = lambda3(&[
        "verify-full",
        "--omega",
        "4.5",
        "--t-end",
        "2",
        "--stride",
        "100",
    ]);
    assert!(out.status.success());
    let m = summary(&out);
    for key in [
        "agreement_pass",
        "decoupling_pass",
        "hermiticity_pass",
        "trace_drift_pass",
    ] {
        assert_eq!(m[key], "true", "{key}");
    }
}

#[test]
fn repro_writes_every_data_set() {
    let dir = tempfile::tempdir().unwrap();
    let out = lambda3(&["repro", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    let mut expected: Vec<String> = (2..=13).map(|i| format!("fig{i:02}.csv")).collect();
    expected.extend(
        [
            "figB1.csv",
            "figB2.csv",
            "figB3.csv",
            "summary.txt",
            "table1.csv",
        ]
        .map(String::from),
    );
    expected.sort();
    assert_eq!(names, expected);

    let table = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert_eq!(stdout(&out), table);
    assert!(table.contains("C11"));
    let first = fs::read(dir.path().join("fig08.csv")).unwrap();
    let again = tempfile::tempdir().unwrap();
    lambda3(&["repro", "--out-dir", again.path().to_str().unwrap()]);
    assert_eq!(first, fs::read(again.path().join("fig08.csv")).unwrap());
    assert_eq!(
        table,
        fs::read_to_string(again.path().join("summary.txt")).unwrap()
    );
}
