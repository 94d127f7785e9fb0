use std::path::Path;
use std::process::{Command, Output};

fn svpn(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_svpn"))
        .args(args)
        .current_dir(cwd)
        .env_remove("SVPN_OUT_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_string()
}

fn triple(s: &str) -> [f64; 3] {
    let v: Vec<f64> = s.trim_matches(['[', ']']).split(", ").map(|x| x.parse().unwrap()).collect();
    [v[0], v[1], v[2]]
}

#[test]
fn validate_reports_full_rank() {
    let dir = tempfile::tempdir().unwrap();
    let o = svpn(&["validate"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(value(&text, "rank(A)"), "6");
    assert!(text.contains("scenarios: hover, circle"));
}

#[test]
fn kin_roundtrips_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let o = svpn(&["kin", "--arc", "30", "45", "--nozzle", "2"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let [m1, m2, m3] = triple(&value(&stdout(&o), "cables_m"));
    let args = [m1, m2, m3].map(|v| format!("{v:.17e}"));
    let back = svpn(&["kin", "--nozzle", "2", "--cables", &args[0], &args[1], &args[2]], dir.path());
    assert!(back.status.success(), "{}", stderr(&back));
    let alpha: f64 = value(&stdout(&back), "alpha_deg").parse().unwrap();
    let beta: f64 = value(&stdout(&back), "beta_deg").parse().unwrap();
    // printed cables carry 9 significant digits
    assert!((alpha - 30.0).abs() < 1e-4 && (beta - 45.0).abs() < 1e-4, "{alpha} {beta}");
}

#[test]
fn straight_nozzle_tip() {
    let dir = tempfile::tempdir().unwrap();
    let o = svpn(&["kin", "--cables", "0.12", "0.12", "0.12"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(value(&text, "alpha_deg"), "0.00000000e0");
    assert_eq!(triple(&value(&text, "tip_m")), [0.0, 0.0, 0.12]);
}

#[test]
fn exit_codes_by_category() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], i32); 6] = [
        (&["kin"], 2),
        (&["kin", "--cables", "0.10", "0.14", "0.12"], 11),
        (&["kin", "--cables", "0.10", "0.2", "0.12"], 10),
        (&["run", "no_such_scenario"], 2),
        (&["run", "hover", "--dt", "0"], 19),
        (&["kin", "--arc", "10", "0", "--nozzle", "7"], 2),
    ];
    for (args, code) in cases {
        let o = svpn(args, dir.path());
        assert_eq!(o.status.code(), Some(code), "{args:?}: {}", stderr(&o));
    }
    let o = svpn(&["run", "no_such_scenario"], dir.path());
    assert!(stderr(&o).starts_with("svpn: error[usage]: unknown scenario"), "{}", stderr(&o));
}

#[test]
fn bad_config_points_at_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[vehicle]\nmass = 1.2\nwingspan = 3\n").unwrap();
    let o = svpn(&["--config", cfg.to_str().unwrap(), "validate"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let e = stderr(&o);
    assert!(e.contains("line 3") && e.contains("wingspan"), "{e}");

    let missing = svpn(&["--config", "nope.toml", "validate"], dir.path());
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn partial_config_emits_notices() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "[vehicle]\nmass = 1.3\n").unwrap();
    let o = svpn(&["--config", cfg.to_str().unwrap(), "validate"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let e = stderr(&o);
    assert!(e.contains("notice: vehicle.gravity not given"), "{e}");
    assert!(e.contains("notice: [controller] not given"), "{e}");
}

#[test]
fn run_writes_log_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let o = svpn(&["run", "step", "--out", "res"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("res/step.csv")).unwrap();
    assert!(csv.starts_with("# svpn-log v1 scenario=step"));
    assert_eq!(csv.lines().count(), 2 + 8001);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("res/step.metrics.json")).unwrap()).unwrap();
    assert_eq!(json["format"], "svpn-metrics v1");
    assert_eq!(json["scenario"], "step");
    assert!(json["metrics"]["settling_time"].as_f64().unwrap() > 0.0);
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_svpn"))
        .args(["run", "free_fall"])
        .current_dir(dir.path())
        .env("SVPN_OUT_DIR", "envout")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("envout/free_fall.csv").exists());
    assert!(!dir.path().join("out").exists());
}

#[test]
fn dt_and_seed_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let o = svpn(&["run", "free_fall", "--dt", "0.002", "--seed", "9"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("out/free_fall.csv")).unwrap();
    assert!(csv.lines().next().unwrap().contains("dt=2.00000000e-3"));
    assert_eq!(csv.lines().count(), 2 + 501);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/free_fall.metrics.json")).unwrap()).unwrap();
    assert_eq!(json["seed"], 9);
}

#[test]
fn config_scenario_and_decimation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        r#"
[output]
decimation = 100

[[scenario]]
name = "short_circle"
duration = 2.0
reference = { type = "circle", center = [0.0, 0.0], radius = 0.5, period = 12.0, altitude = 1.0 }
"#,
    )
    .unwrap();
    let o = svpn(&["--config", cfg.to_str().unwrap(), "run", "short_circle"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("out/short_circle.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 21);
}

#[test]
fn sweep_runs_each_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let o = svpn(&["sweep", "hover", "free_fall", "step"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let names: Vec<_> = text.lines().filter_map(|l| l.strip_prefix("ok   ")).map(|l| l.split(':').next().unwrap()).collect();
    assert_eq!(names, ["hover", "free_fall", "step"]);
    for n in names {
        assert!(dir.path().join(format!("out/{n}.metrics.json")).exists());
    }
}
