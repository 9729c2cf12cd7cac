use std::f64::consts::PI;
use std::process::{Command, Output};

use casimir::asymptotics::tm_coefficients;
use casimir::special::bernoulli;
use casimir::units::{C, HBAR, K_B};
use casimir_cli::{cmd_rdiag, cmd_verify_constants, Cli, Settings, EXIT_CONFIG, TE_RDIAG_WARNING};
use clap::Parser;
use num_rational::BigRational;
use serde_json::Value;

const ZETA3: f64 = 1.2020569031595942;

fn casimir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casimir")).args(args).env_remove("CASIMIR_PRECISION").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (header, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

fn settings(args: &[&str]) -> Settings {
    let mut full = vec!["casimir"];
    full.extend_from_slice(args);
    Settings::from_cli(&Cli::parse_from(full)).unwrap()
}

#[test]
fn energy_reports_both_polarizations() {
    let o = casimir(&["energy", "--precision", "15", "--temperatures", "1", "--format", "json", "--no-timestamp"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let row = &json(&o)["rows"][0];
    let (tm, te, total) = (row["F_TM"].as_f64().unwrap(), row["F_TE"].as_f64().unwrap(), row["F"].as_f64().unwrap());
    assert!(tm < 0.0 && te < 0.0);
    assert!(((tm + te - total) / total).abs() < 1e-15);
    // Independent scipy value for this preset.
    assert!(((tm + 1.0761631734125857e-10) / 1.0761631734125857e-10).abs() < 1e-9);
}

#[test]
fn zero_conductivity_asymptotics_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.ini");
    std::fs::write(&cfg, "[material]\nsigma_over_eps0 = 0\n").unwrap();
    let o = casimir(&["energy", "--asymptotics", "--precision", "15", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
    assert!(stderr(&o).contains("TM asymptotics require sigma>0"), "{}", stderr(&o));
}

#[test]
fn ideal_metal_preset_matches_closed_form() {
    let o = casimir(&["energy", "--preset", "ideal-metal-check", "--precision", "15", "--temperatures", "0.1", "--no-timestamp"]);
    assert!(o.status.success());
    let (h, rows) = csv_rows(&stdout(&o));
    assert_eq!(h[1], "F");
    let f: f64 = rows[0][1].parse().unwrap();
    let exact = -PI * PI * HBAR * C / (720.0 * 1e-18);
    assert!(((f - exact) / exact).abs() < 1e-6);
}

#[test]
fn verify_constants_rows() {
    let o = casimir(&["verify-constants", "--format", "json", "--no-timestamp"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["passed"], true);
    for row in v["rows"].as_array().unwrap() {
        let x = row["value"].as_f64().unwrap();
        let want = if row["constant"] == "Psi" { 0.03044845705840 } else { -0.0254852018898 };
        assert!((x - want).abs() < 1e-9, "{row}");
    }
}

#[test]
fn tampered_bernoulli_table_fails_verification() {
    let bad = bernoulli().with_override(6, BigRational::new(1.into(), 41.into()));
    let out = cmd_verify_constants(&bad).unwrap();
    assert!(out.assertion_failed);
    assert!(!cmd_verify_constants(bernoulli()).unwrap().assertion_failed);
}

#[test]
fn empty_grid_is_a_config_error() {
    let o = casimir(&["sweep", "--temperatures", "", "--precision", "15"]);
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
    let o = casimir(&["sweep", "--temperatures", "0.2,0.1", "--precision", "15"]);
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn sweep_header_and_figure_modes() {
    let args = ["sweep", "--pol", "tm", "--precision", "15", "--temperatures", "0.02,0.05,0.2,0.5", "--no-timestamp"];
    let o = casimir(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = csv_rows(&stdout(&o));
    assert_eq!(h.join(","), "T_K,F_num,F_asym,dF_num,dF_th,R,pol");
    // The asymptote follows the numerics below 0.1 K.
    for r in rows.iter().filter(|r| r[0].parse::<f64>().unwrap() < 0.1) {
        assert!(r[5].parse::<f64>().unwrap().abs() < 0.05, "{r:?}");
    }

    let mut fig = args.to_vec();
    fig.push("--figure");
    let a = csv_rows(&stdout(&casimir(&fig)));
    assert_eq!(a.0.join(","), "T_K,F_num,F_asym,pol");
    let mut fig2 = fig.clone();
    fig2.extend(["--preset", "si-fig2"]);
    let b = csv_rows(&stdout(&casimir(&fig2)));
    // eps_bar = 1: thermal part no longer shifted by the same constant.
    let shape = |rows: &Vec<Vec<String>>| {
        let f = |i: usize| rows[i][1].parse::<f64>().unwrap();
        (f(3) - f(0)) / f(0)
    };
    assert!((shape(&a.1) / shape(&b.1) - 1.0).abs() > 1e-2);
}

#[test]
fn anomaly_limits() {
    let ideal = csv_rows(&stdout(&casimir(&["anomaly", "--preset", "ideal-metal-check", "--no-timestamp"])));
    assert_eq!(ideal.1[0][3].parse::<f64>().unwrap(), 0.0);
    assert_eq!(ideal.1[0][4], "no");

    let o = casimir(&["anomaly", "--preset", "si-fig2", "--no-timestamp"]);
    assert!(stderr(&o).contains("Nernst"));
    let s: f64 = csv_rows(&stdout(&o)).1[0][3].parse().unwrap();
    let exact = ZETA3 * K_B / (16.0 * PI * 1e-12);
    assert!(((s - exact) / exact).abs() < 1e-14);

    // eps_bar = 11.67: zeta(3) - Li3(A0) from the plain series.
    let s: f64 = csv_rows(&stdout(&casimir(&["anomaly", "--no-timestamp"]))).1[0][3].parse().unwrap();
    let a0 = ((11.67f64 - 1.0) / 12.67).powi(2);
    let li3: f64 = (1..20000).map(|k| a0.powi(k) / (k as f64).powi(3)).sum();
    let want = K_B / (16.0 * PI * 1e-12) * (ZETA3 - li3);
    assert!(((s - want) / want).abs() < 1e-12);
}

#[test]
fn rdiag_assert_passes_for_silicon_tm() {
    let o = casimir(&["rdiag", "--pol", "tm", "--precision", "15", "--grid", "0.02:0.3:10", "--assert", "--no-timestamp"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("fit on"));
}

#[test]
fn rdiag_detects_wrong_next_order_coefficient() {
    let s = settings(&["rdiag", "--pol", "tm", "--precision", "15", "--grid", "0.02:0.3:10", "--assert"]);
    let good = tm_coefficients(1e12, 1e-6).unwrap();
    let wrong = casimir::asymptotics::TmCoefficients { d1: 2.0 * good.d1, ..good };
    let ok = cmd_rdiag(&s, Some(good)).unwrap();
    let bad = cmd_rdiag(&s, Some(wrong)).unwrap();
    assert!(!ok.assertion_failed);
    assert!(bad.assertion_failed);
    let slope = |o: &casimir_cli::Outcome| o.doc.meta["slope_at_Tmin"].as_f64().unwrap();
    // R = (C - D)/C - (D/C)(C1 - D1) T + ...: the slope moves by about -D1.
    assert!((slope(&bad) - slope(&ok) + good.d1).abs() < 0.1 * good.d1);
    assert_eq!(
        casimir_cli::run([
            "casimir",
            "rdiag",
            "--pol",
            "tm",
            "--precision",
            "15",
            "--temperatures",
            "0.02,0.03,0.04",
            "--assert",
            "--no-timestamp"
        ]),
        0
    );
}

#[test]
fn te_rdiag_warns_and_still_emits() {
    let o = casimir(&["rdiag", "--pol", "te", "--precision", "15", "--temperatures", "0.1,0.2,0.4", "--no-timestamp"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains(TE_RDIAG_WARNING));
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[6] == "TE"));
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = casimir(&[
            "sweep",
            "--precision",
            "15",
            "--temperatures",
            "0.1,0.3",
            "--format",
            "json",
            "--no-timestamp",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
    let stamped = stdout(&casimir(&["anomaly"]));
    assert!(stamped.starts_with("# generated"));
}

#[test]
fn precision_sources() {
    let o = Command::new(env!("CARGO_BIN_EXE_casimir"))
        .args(["energy", "--temperatures", "1", "--format", "json", "--no-timestamp"])
        .env("CASIMIR_PRECISION", "12")
        .output()
        .unwrap();
    assert_eq!(json(&o)["precision_digits"], 12);
    let o = casimir(&["energy", "--precision", "99"]);
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn usage_errors() {
    assert_eq!(casimir(&["frobnicate"]).status.code(), Some(EXIT_CONFIG));
    assert_eq!(casimir(&["energy", "--preset", "nope"]).status.code(), Some(EXIT_CONFIG));
    assert_eq!(casimir(&["energy", "--temperatures", "0", "--precision", "15"]).status.code(), Some(EXIT_CONFIG));
    assert_eq!(casimir(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_round_trip_drives_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = casimir_cli::config::RunConfig::preset(casimir_cli::config::Preset::SiPaper);
    c.temperatures = Some(casimir_cli::config::Temperatures::List(vec![0.5]));
    c.precision = Some(15);
    c.polarization = casimir::lifshitz::Polarization::TE;
    let path = dir.path().join("run.ini");
    std::fs::write(&path, c.to_ini_string()).unwrap();
    let o = casimir(&["sweep", "--config", path.to_str().unwrap(), "--no-timestamp"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][6], "TE");
    assert!(rows[0][3].parse::<f64>().unwrap() > 0.0);
}
