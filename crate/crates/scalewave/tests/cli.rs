use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_scalewave"));
    c.env_remove("SCALEWAVE_LOG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(format!("{name}.schema.json"))
}

fn assert_valid(schema: &str, doc: &Value) {
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path(schema)).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).unwrap();
    let msgs: Vec<String> = match compiled.validate(doc) {
        Ok(()) => return,
        Err(errors) => errors
            .map(|e| format!("{} at {}", e, e.instance_path))
            .collect(),
    };
    panic!("{schema:?} rejects document: {msgs:?}");
}

fn json_out(args: &[&str]) -> Value {
    let o = run(args);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn info_reports_regime() {
    let o = run(&[
        "info", "--set", "n=1", "--set", "mu1=4", "--set", "mu2sq=0", "--set", "p=2",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    for line in [
        "delta=9",
        "p_crit=3",
        "thm23_applicable=true",
        "thm22_applicable=false",
        "l2_exponent=-0.5",
    ] {
        assert!(text.lines().any(|l| l == line), "missing {line} in\n{text}");
    }
}

#[test]
fn decay_fit_recovers_planted_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("series.csv");
    let mut text = String::from("t,l2,grad_l2\n");
    for i in 0..=100 {
        let t = i as f64 * 2.0;
        text.push_str(&format!(
            "{t},{},{}\n",
            2.5 * (1.0 + t).powf(-1.25),
            (1.0 + t).powf(-2.0)
        ));
    }
    std::fs::write(&csv, text).unwrap();
    let doc = json_out(&["decay-fit", "--input", csv.to_str().unwrap()]);
    assert_valid("fit_report", &doc);
    assert!((doc["fit"]["exponent"].as_f64().unwrap() + 1.25).abs() < 1e-9);
    assert_eq!(doc["fit"]["window"], serde_json::json!([20.0, 200.0]));
    let doc = json_out(&[
        "decay-fit",
        "--input",
        csv.to_str().unwrap(),
        "--column",
        "grad_l2",
        "--correction",
        "ell",
    ]);
    assert_valid("fit_report", &doc);
    assert_eq!(doc["correction"]["kind"], "ell");
    assert!(doc["fit"]["exponent"].as_f64().unwrap() < -2.0);
}

#[test]
fn simulate_zero_data_gives_zero_norms() {
    let o = run(&[
        "simulate",
        "--set",
        "u0_kind=zero",
        "--set",
        "u1_kind=zero",
        "--set",
        "t_max=2",
        "--set",
        "r_max=10",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,sup,l2,grad_l2,ut_l2,wl2,wgrad_l2,wenergy,F"
    );
    let mut rows = 0;
    for line in lines {
        let vals: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(vals.len(), 9);
        assert!(vals[1..].iter().all(|v| *v == 0.0), "{line}");
        rows += 1;
    }
    assert!(rows > 2);
}

#[test]
fn simulate_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"n": 2, "mu1": 2.0, "mu2sq": 0.5, "p": 3.0, "t_max": 5.0, "r_max": 15.0, "dr": 0.05,
            "u1_kind": "gaussian", "u1_amplitude": 0.3, "u1_scale": 1.0}"#,
    )
    .unwrap();
    let outs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let path = dir.path().join(format!("out{i}.csv"));
            let o = run(&[
                "simulate",
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                path.to_str().unwrap(),
            ]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            std::fs::read(path).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    assert!(!outs[0].contains(&b'\r'));
    let text = String::from_utf8(outs[0].clone()).unwrap();
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("5.0000000000000000e0,"), "{last}");
}

#[test]
fn sweep_csv_rows_in_case_order() {
    let args = [
        "sweep",
        "--set",
        "r_max=40",
        "--set",
        "t_max=10",
        "--set",
        "p_values=2,4",
        "--set",
        "amplitudes=1,0.01",
    ];
    let one = run(&args);
    let mut more = args.to_vec();
    more.extend(["--jobs", "3"]);
    let three = run(&more);
    assert!(one.status.success() && three.status.success());
    assert_eq!(one.stdout, three.stdout);
    let text = stdout(&one);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("n,mu1,mu2sq,p,amplitude,outcome"));
    assert!(lines[1].contains(",blow_up,"), "{}", lines[1]);
    assert!(lines[4].contains(",completed,"), "{}", lines[4]);
}

#[test]
fn verify_reports_validate() {
    let doc = json_out(&[
        "verify",
        "--suite",
        "identities",
        "--seed",
        "3",
        "--set",
        "psi_points=50",
        "--set",
        "energy_points=10",
    ]);
    assert_valid("verify_report", &doc);
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["seed"], 3);
    assert!(doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["seed"] == 3));

    let doc = json_out(&["verify", "--suite", "bihari"]);
    assert_valid("verify_report", &doc);
    assert_eq!(doc["pass"], true);

    let doc = json_out(&[
        "verify",
        "--suite",
        "inequalities",
        "--set",
        "mu1=1",
        "--set",
        "sigmas=0.5",
        "--set",
        "times=0,1",
    ]);
    assert_valid("verify_report", &doc);
    assert_eq!(doc["pass"], true, "{doc:#}");
    assert_eq!(doc["params"]["mu1"], 1.0);
}

#[test]
fn odi_report_validates() {
    let doc = json_out(&["odi", "--set", "p=3"]);
    assert_valid("odi_report", &doc);
    assert!((doc["nu"].as_f64().unwrap() - 0.25270).abs() < 1e-4);
    assert_eq!(doc["comparison"]["pass"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["info", "--set", "p"]).status.code(), Some(1));
    assert_eq!(run(&["info", "--set", "mu3=1"]).status.code(), Some(2));
    assert_eq!(run(&["info", "--set", "p=1"]).status.code(), Some(2));
    assert_eq!(
        run(&["simulate", "--set", "cfl_safety=2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["decay-fit", "--input", "/nonexistent/x.csv"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let diverged = run(&[
        "simulate",
        "--set",
        "blowup_threshold=1.7e308",
        "--set",
        "r_max=30",
        "--set",
        "t_max=20",
        "--out",
        "/dev/null",
    ]);
    assert_eq!(
        diverged.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&diverged.stderr)
    );
}
