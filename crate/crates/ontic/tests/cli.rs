use std::process::{Command, Output};

fn ontic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ontic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn verify_quantum_default_passes() {
    let out = ontic(&["verify-quantum"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["passed"], true);
    let value = report["mermin"][0]["achieved"].as_f64().unwrap();
    assert!((value - 4.0).abs() <= 1e-12);
}

#[test]
fn all_x_settings_exit_two() {
    let out = ontic(&["verify-quantum", "--settings", "X,X,X,X,X,X"]);
    assert_eq!(out.status.code(), Some(2));
    let value = json(&out)["mermin"][0]["achieved"].as_f64().unwrap();
    assert!((value - 2.0).abs() <= 1e-12);
}

#[test]
fn malformed_flags_exit_one_with_diagnostic() {
    for args in [
        &["verify-quantum", "--bogus"][..],
        &["ks-model", "--grid", "4", "4"],
        &["nogo", "--w", "0.9"],
        &["nogo", "--sweep-step", "0"],
        &["frobnicate"],
    ] {
        let out = ontic(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn reports_are_byte_stable() {
    let a = ontic(&["nogo"]);
    let b = ontic(&["nogo"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.contains(&b'\r'));
}

#[test]
fn nogo_quarter_does_not_reproduce() {
    let out = ontic(&["nogo", "--w", "0.25"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let entry = &report["mermin"][0];
    assert_eq!(entry["verdict"], "does not reproduce");
    assert!((entry["achieved"].as_f64().unwrap() - 3.5).abs() <= 1e-12);
    assert_eq!(report["omega"][0]["value"].as_f64(), Some(0.0));
}

#[test]
fn every_verdict_is_auditable() {
    let report = json(&ontic(&["nogo"]));
    let mut all_required_pass = true;
    for v in report["verdicts"].as_array().unwrap() {
        let value = v["value"].as_f64().unwrap();
        let expected = v["expected"].as_f64().unwrap();
        let tol = v["tolerance"].as_f64().unwrap();
        let pass = match v["relation"].as_str().unwrap() {
            "eq" => (value - expected).abs() <= tol,
            "le" => value <= expected + tol,
            "ge" => value >= expected - tol,
            other => panic!("relation {other}"),
        };
        assert_eq!(v["pass"].as_bool(), Some(pass), "{v}");
        if v["required"] == true {
            all_required_pass &= pass;
        }
    }
    assert_eq!(report["passed"].as_bool(), Some(all_required_pass));
}

#[test]
fn nogo_csv_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = ontic(&["nogo", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("target_mermin,lp_overlap_mass,closed_form_mass")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 41);
    assert!(rows.contains(&"3.8,0.1,0.1"));
    assert_eq!(rows[0], "2,1,1");
    assert_eq!(rows[40], "4,0,0");
}

#[test]
fn ks_model_coarse_grid_reports_ratio() {
    let out = ontic(&["ks-model", "--grid", "8", "16", "--pairs", "2"]);
    // The coarse grid misses the default tolerance.
    assert_eq!(out.status.code(), Some(2));
    let report = json(&out);
    let ratio = report["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["name"] == "convergence_ratio")
        .unwrap();
    assert!(ratio["value"].as_f64().unwrap() > 1.0);
}

#[test]
fn ks_model_default_grid_passes() {
    let out = ontic(&["ks-model", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("name,value,expected,tolerance,relation,required,pass\n"));
    assert!(text
        .lines()
        .any(|l| l.starts_with("max_born_residual,") && l.ends_with(",true")));
}

#[test]
fn export_model_writes_table() {
    let out = ontic(&["export-model", "--grid", "8", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 1 + 128);
    let weights: f64 = rows[1..]
        .iter()
        .map(|r| r.split('\t').nth(4).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((weights - 4.0 * std::f64::consts::PI).abs() < 1e-9);
}

#[test]
fn acceptance_prints_eight_lines() {
    let out = ontic(&["acceptance"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8, "{text}");
    for (i, line) in lines.iter().enumerate() {
        assert!(
            line.starts_with(&format!("PASS criterion {}:", i + 1)),
            "{line}"
        );
    }
    assert_eq!(out.status.code(), Some(0));
}
