use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use regsir_core::analysis::{endemic_state, Stability, SteadyStateInfo};
use regsir_core::{EpidemicParams, MonodLaw};
use serde_json::Value;
use tempfile::TempDir;

const NOMINAL: &str =
    r#"{"gamma":0.091,"alpha":0.0679,"k":0.0229,"u":0.0008,"c_s":17.5392,"population":8e7}"#;
const NY: &str =
    r#"{"gamma":0.071,"alpha":0.0575,"k":0.0104,"u":0.8e-4,"s_tilde":19.45,"i0":5,"beta0":0.02}"#;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn regsir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regsir"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = regsir(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv_text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = csv_text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn fast_model_settles_on_the_endemic_state() {
    let dir = TempDir::new().unwrap();
    let params = write(dir.path(), "p.json", NOMINAL);
    let text = ok(&[
        "--params",
        params.to_str().unwrap(),
        "--horizon",
        "600",
        "simulate",
        "--model",
        "fast",
    ]);
    let (header, rows) = rows(&text);
    assert_eq!(header, ["t", "I", "beta", "incidence"]);
    assert_eq!(rows.len(), 601);
    let p = EpidemicParams::new(17.5392 / 8e7, 0.091, 0.0679, 0.0008, 1e-6).unwrap();
    let i_e = endemic_state(&MonodLaw::new(0.0229).unwrap(), &p, 17.5392)
        .unwrap()
        .i;
    let last = rows.last().unwrap();
    assert!(
        ((last[1] - i_e) / i_e).abs() < 1e-3,
        "I(600) = {}, I_e = {i_e}",
        last[1]
    );
}

#[test]
fn zero_horizon_gives_the_initial_state() {
    let dir = TempDir::new().unwrap();
    let params = write(dir.path(), "p.json", NOMINAL);
    let text = ok(&[
        "--params",
        params.to_str().unwrap(),
        "--horizon",
        "0",
        "simulate",
        "--model",
        "full",
    ]);
    let (_, rows) = rows(&text);
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][..5], &[0.0, 8e7 - 1.0, 1.0, 0.0, 0.0229]);
}

#[test]
fn full_model_conserves_the_population() {
    let dir = TempDir::new().unwrap();
    let params = write(dir.path(), "p.json", NOMINAL);
    let text = ok(&[
        "--params",
        params.to_str().unwrap(),
        "simulate",
        "--model",
        "full",
    ]);
    let (header, rows) = rows(&text);
    let k = header.iter().position(|c| c == "total").unwrap();
    for r in &rows {
        assert!(((r[1] + r[2] + r[3]) - r[k]).abs() <= 1e-8 * r[k]);
        assert!(
            (r[k] - 8e7).abs() <= 1e-8 * 8e7,
            "total drifted to {}",
            r[k]
        );
    }
}

fn analyze(params: &str) -> Value {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "p.json", params);
    serde_json::from_str(&ok(&["--params", path.to_str().unwrap(), "analyze"])).unwrap()
}

#[test]
fn analyze_below_threshold_reports_only_the_disease_free_state() {
    // S̃ = 2 is below S* = γ/(c̃K) with c̃ = 1
    let report =
        analyze(r#"{"gamma":0.091,"alpha":0.0679,"k":0.0229,"u":0.0008,"c_s":2,"s_tilde":2}"#);
    let states: Vec<SteadyStateInfo> =
        serde_json::from_value(report["steady_states"].clone()).unwrap();
    assert_eq!(states.len(), 1);
    assert_eq!(states[0].i, 0.0);
    assert_eq!(states[0].classification, Stability::ExpStable);
    assert!(report["lyapunov"].is_null());
    assert_eq!(report["assumptions"]["a4"], false);
}

#[test]
fn analyze_above_threshold_exchanges_stability() {
    let report = analyze(NOMINAL);
    let states: Vec<SteadyStateInfo> =
        serde_json::from_value(report["steady_states"].clone()).unwrap();
    assert_eq!(states.len(), 2);
    assert_eq!(states[0].classification, Stability::ExpUnstable);
    assert_eq!(states[1].classification, Stability::ExpStable);
    for s in &states {
        // classification re-derived from the emitted eigenvalues
        assert_eq!(
            Stability::from_eigenvalues(&s.eigenvalues),
            s.classification
        );
    }
    assert_eq!(report["lyapunov"]["nonincreasing"], true);
    assert!(
        report["nullclines"]["contact_rate"]
            .as_array()
            .unwrap()
            .len()
            > 10
    );
    assert_eq!(report["vector_field"].as_array().unwrap().len(), 21 * 21);
}

#[test]
fn fit_recovers_parameters_from_simulated_data() {
    let dir = TempDir::new().unwrap();
    let params = write(dir.path(), "truth.json", NY);
    let text = ok(&[
        "--params",
        params.to_str().unwrap(),
        "--horizon",
        "149",
        "simulate",
        "--model",
        "normalized",
    ]);
    let (_, sim) = rows(&text);
    let start = chrono::NaiveDate::from_ymd_opt(2020, 3, 1).unwrap();
    let mut data = String::from("date,cases\n");
    for r in &sim {
        data += &format!("{},{:e}\n", start + chrono::Days::new(r[0] as u64), r[3]);
    }
    let data_path = write(dir.path(), "sim.csv", &data);
    let fit_cfg = write(
        dir.path(),
        "fit.json",
        r#"{"s_tilde":19.45,"fit":{"target":"raw","seeds":2}}"#,
    );
    let out = dir.path().join("out").join("ny.json");
    ok(&[
        "--params",
        fit_cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "fit",
        "--data",
        data_path.to_str().unwrap(),
    ]);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let r = &report["result"];
    let got = [
        r["params"]["gamma"].as_f64().unwrap(),
        r["params"]["alpha"].as_f64().unwrap(),
        r["params"]["k"].as_f64().unwrap(),
        r["params"]["u"].as_f64().unwrap(),
        r["init"]["i0"].as_f64().unwrap(),
        r["init"]["beta_hat0"].as_f64().unwrap(),
    ];
    let truth = [0.071, 0.0575, 0.0104, 0.8e-4, 5.0, 0.02];
    for (g, t) in got.iter().zip(truth) {
        assert!(((g - t) / t).abs() < 0.01, "fitted {got:?}");
    }
    let curve = std::fs::read_to_string(dir.path().join("out").join("ny_curve.csv")).unwrap();
    let lines: Vec<&str> = curve.lines().collect();
    assert_eq!(lines[0], "date,raw,smoothed,fitted");
    assert_eq!(lines.len(), sim.len() + 1);
    assert!(lines[1].starts_with("2020-03-01,"));
}

#[test]
fn missing_data_file_fails_without_output() {
    let dir = TempDir::new().unwrap();
    let params = write(dir.path(), "p.json", NY);
    let out = dir.path().join("result.json");
    let res = regsir(&[
        "--params",
        params.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "fit",
        "--data",
        dir.path().join("absent.csv").to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("absent.csv"));
    assert!(!out.exists());
    assert!(!dir.path().join("result_curve.csv").exists());
}

#[test]
fn invalid_input_exits_with_code_two() {
    let dir = TempDir::new().unwrap();
    let params = write(dir.path(), "p.json", r#"{"gama":0.1}"#);
    assert_eq!(
        regsir(&["--params", params.to_str().unwrap(), "analyze"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        regsir(&["simulate", "--model", "nope"]).status.code(),
        Some(2)
    );
    let negative = write(
        dir.path(),
        "n.json",
        r#"{"gamma":-0.1,"alpha":0.0679,"k":0.0229,"u":0.0008,"c_s":17.5}"#,
    );
    assert_eq!(
        regsir(&["--params", negative.to_str().unwrap(), "analyze"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let params = write(dir.path(), "p.json", NY);
    let p = params.to_str().unwrap();
    let noisy = [
        "--params",
        p,
        "--seed",
        "9",
        "simulate",
        "--model",
        "normalized",
        "--noise",
        "0.05",
    ];
    assert_eq!(regsir(&noisy).stdout, regsir(&noisy).stdout);
    let other_seed = [
        "--params",
        p,
        "--seed",
        "10",
        "simulate",
        "--model",
        "normalized",
        "--noise",
        "0.05",
    ];
    assert_ne!(regsir(&noisy).stdout, regsir(&other_seed).stdout);
    let base = write(dir.path(), "f.json", NOMINAL);
    let a = ["--params", base.to_str().unwrap(), "--seed", "3", "analyze"];
    assert_eq!(regsir(&a).stdout, regsir(&a).stdout);
}

#[test]
fn assign_inverts_the_endemic_level() {
    let dir = TempDir::new().unwrap();
    let params = write(dir.path(), "p.json", NOMINAL);
    let p = params.to_str().unwrap();
    let run = |istar: &str| -> Value {
        serde_json::from_str(&ok(&["--params", p, "assign", "--istar", istar])).unwrap()
    };
    let a = run("4267.138461538462");
    assert!((a["u"].as_f64().unwrap() - 0.0008).abs() < 1e-15);
    assert!((a["endemic"]["i"].as_f64().unwrap() - 4267.138461538462).abs() < 1e-9);
    let half = run("2133.569230769231");
    assert!((half["u"].as_f64().unwrap() - 0.0016).abs() < 1e-15);

    let low = write(
        dir.path(),
        "low.json",
        r#"{"gamma":0.091,"alpha":0.0679,"k":0.0229,"c_s":2}"#,
    );
    let res = regsir(&[
        "--params",
        low.to_str().unwrap(),
        "assign",
        "--istar",
        "100",
    ]);
    assert_eq!(res.status.code(), Some(4));
}

#[test]
fn closed_form_below_threshold_is_an_assumption_failure() {
    let dir = TempDir::new().unwrap();
    let params = write(
        dir.path(),
        "p.json",
        r#"{"gamma":0.091,"alpha":0.0679,"k":0.0229,"u":0.0008,"c_s":2,"s_tilde":2}"#,
    );
    let res = regsir(&[
        "--params",
        params.to_str().unwrap(),
        "simulate",
        "--model",
        "closed-form-monod",
    ]);
    assert_eq!(res.status.code(), Some(4));
    assert!(res.stdout.is_empty());
}

#[test]
fn sweep_writes_a_file_per_population_and_a_summary() {
    let dir = TempDir::new().unwrap();
    let params = write(dir.path(), "p.json", NOMINAL);
    let out = dir.path().join("sweep");
    ok(&[
        "--params",
        params.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "sweep",
        "--populations",
        "5e5,8e7",
    ]);
    let (header, summary) = rows(&std::fs::read_to_string(out.join("summary.csv")).unwrap());
    assert_eq!(header[0], "population");
    assert_eq!(summary.len(), 2);
    let k = header.iter().position(|c| c == "deviation").unwrap();
    assert!(summary[0][k] < 0.0);
    assert!(summary[1][k].abs() < 2e-3);
    assert!(out.join("population_500000.csv").exists());
    assert!(out.join("population_80000000.csv").exists());
}
