//! Command-line front end: argument handling, configuration and the
//! subcommands, kept in a library so tests can drive them directly.

pub mod config;
pub mod output;

use std::path::PathBuf;

use casimir::asymptotics::{
    linear_anomaly, te_asymptotics, tm_asymptotics, tm_coefficients, AsymptoticResult, TmCoefficients, SMALL_PARAMETER_LIMIT,
};
use casimir::diagnostics::{
    default_grid, fit_expansion, r_curve_with, r_slope_at_start, sigma_si_over_eps0, theory_delta_f, FitResult, SweepRecord,
};
use casimir::dielectric::{Mode, PermittivityModel};
use casimir::lifshitz::{free_energy, zero_temperature_energy, Numerics, PlateSystem, Polarization};
use casimir::special::{bernoulli, verify_constants, BernoulliTable};
use casimir::units::alpha_param;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use config::{ConfigError, Format, Preset, RunConfig};
use output::{Cell, Document};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Acceptance thresholds checked by `rdiag --assert` (TM).
pub const RDIAG_MAX_R_AT_TMIN: f64 = 0.05;
pub const RDIAG_D_TOL: f64 = 0.01;
pub const RDIAG_D1_TOL: f64 = 0.10;
/// Upper end of the window used for the coefficient fit.
pub const RDIAG_FIT_TMAX: f64 = 0.3;

pub const TE_RDIAG_WARNING: &str = "TE R-diagnostic unfeasible at small α";

#[derive(Debug, Parser)]
#[command(name = "casimir", version, about = "Casimir free energy of weakly conducting dielectric plates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// INI-style configuration file ([material], [geometry], [run]).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// si-paper, si-fig2 or ideal-metal-check.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// tm, te or both.
    #[arg(long, global = true)]
    pub pol: Option<String>,
    /// Exit 1 when acceptance thresholds are violated.
    #[arg(long = "assert", global = true)]
    pub assert_thresholds: bool,
    /// Working precision in decimal digits (1-62).
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Omit the timestamp line or field.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    /// Comma-separated temperatures in K.
    #[arg(long, global = true)]
    pub temperatures: Option<String>,
    /// Logarithmic grid min:max:points_per_decade, in K.
    #[arg(long, global = true)]
    pub grid: Option<String>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Free energy F(T) at each temperature.
    Energy {
        /// Also report the asymptotic form F(0) + Delta F_asym.
        #[arg(long)]
        asymptotics: bool,
    },
    /// Numerical and asymptotic Delta F over a temperature grid.
    Sweep {
        /// Only T, F_num and the asymptote shifted to agree at T = 0.
        #[arg(long)]
        figure: bool,
    },
    /// Coefficients of the low-temperature expansions.
    Asymptotics,
    /// Cross-check the Psi and Phi constants by independent methods.
    VerifyConstants,
    /// Linear-in-T free energy and T = 0 entropy of a pure dielectric.
    Anomaly,
    /// R diagnostic comparing numerics with the two-term TM form.
    Rdiag,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Config(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<casimir::Error> for Failure {
    fn from(e: casimir::Error) -> Self {
        match e {
            casimir::Error::Domain(_) | casimir::Error::Pole(_) => Failure::Config(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

/// A command's output, warnings and whether an assertion failed.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub doc: Document,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
    pub assertion_failed: bool,
}

/// Effective settings after presets, config file and flags.
#[derive(Debug, Clone)]
pub struct Settings {
    pub config: RunConfig,
    pub numerics: Numerics,
    pub timestamp: bool,
    pub assert_thresholds: bool,
}

impl Settings {
    pub fn from_cli(cli: &Cli) -> Result<Settings, Failure> {
        let base = match &cli.preset {
            Some(p) => RunConfig::preset(p.parse::<Preset>()?),
            None => RunConfig::default(),
        };
        let mut c = match &cli.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
                RunConfig::parse_onto(&text, base)?
            }
            None => base,
        };
        if let Some(p) = &cli.pol {
            c.polarization = p.parse::<Polarization>()?;
        }
        if let Some(f) = &cli.format {
            c.format = f.parse::<Format>()?;
        }
        if let Some(o) = &cli.out {
            c.output = Some(o.clone());
        }
        if let Some(p) = cli.precision {
            c.precision = Some(p);
        }
        if let Some(list) = &cli.temperatures {
            let tmp = RunConfig::parse_onto(&format!("[run]\ntemperatures = {list}\n"), c.clone())?;
            c.temperatures = tmp.temperatures;
        }
        if let Some(g) = &cli.grid {
            let tmp = RunConfig::parse_onto(&format!("[run]\ngrid = {g}\n"), c.clone())?;
            c.temperatures = tmp.temperatures;
        }
        let numerics = Numerics::new(c.resolved_precision()?)?;
        Ok(Settings { config: c, numerics, timestamp: !cli.no_timestamp, assert_thresholds: cli.assert_thresholds })
    }

    fn temperatures_or(&self, default: Vec<f64>) -> Result<Vec<f64>, Failure> {
        match &self.config.temperatures {
            Some(t) => Ok(t.values()?),
            None => Ok(default),
        }
    }

    fn default_mode(&self) -> Mode {
        match self.config.polarization {
            Polarization::TE => Mode::TE,
            _ => Mode::TM,
        }
    }
}

/// Parses arguments, runs the command and writes its output. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = Settings::from_cli(&cli).and_then(|s| {
        let outcome = dispatch(cli.command, &s)?;
        emit(&s, &outcome)?;
        Ok(outcome)
    });
    match result {
        Ok(o) => {
            if o.assertion_failed {
                EXIT_ASSERTION
            } else {
                EXIT_OK
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
    }
}

pub fn dispatch(command: Command, s: &Settings) -> Result<Outcome, Failure> {
    match command {
        Command::Energy { asymptotics } => cmd_energy(s, asymptotics),
        Command::Sweep { figure } => cmd_sweep(s, figure),
        Command::Asymptotics => cmd_asymptotics(s),
        Command::VerifyConstants => cmd_verify_constants(bernoulli()),
        Command::Anomaly => cmd_anomaly(s),
        Command::Rdiag => cmd_rdiag(s, None),
    }
}

/// Writes warnings and notes to standard error and the document to its destination.
pub fn emit(s: &Settings, o: &Outcome) -> Result<(), Failure> {
    for w in &o.warnings {
        eprintln!("warning: {w}");
    }
    for n in &o.notes {
        eprintln!("{n}");
    }
    let text = o.doc.render(s.config.format, s.timestamp);
    match &s.config.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn asymptotic_result(system: &PlateSystem, mode: Mode) -> Result<AsymptoticResult, Failure> {
    let s = sigma_si_over_eps0(system);
    Ok(match mode {
        Mode::TM => tm_asymptotics(s, system.separation_a)?,
        Mode::TE => te_asymptotics(s, system.separation_a)?,
    })
}

fn validity_warnings(results: &[(Mode, AsymptoticResult)], t_max: f64) -> Vec<String> {
    let mut w: Vec<String> = Vec::new();
    for (_, r) in results {
        for msg in r.warnings(t_max) {
            if !w.contains(&msg) {
                w.push(msg);
            }
        }
    }
    w
}

pub fn cmd_energy(s: &Settings, with_asymptotics: bool) -> Result<Outcome, Failure> {
    let temps = s.temperatures_or(vec![1.0])?;
    if temps.is_empty() || temps.iter().any(|t| !(*t > 0.0)) {
        return Err(Failure::Config("energy needs temperatures > 0".into()));
    }
    let system = s.config.system()?;
    let modes = system.polarization.modes();
    let asym = if with_asymptotics {
        let r = modes.iter().map(|&m| asymptotic_result(&system, m).map(|a| (m, a))).collect::<Result<Vec<_>, _>>()?;
        Some(r)
    } else {
        None
    };
    let mut columns = vec!["T_K", "F", "F_TM", "F_TE", "est_error", "m_truncation"];
    if asym.is_some() {
        columns.extend(["F0", "dF_asym", "F_asym"]);
    }
    let mut doc = Document::new(&columns);
    let f0 = match asym {
        Some(_) => Some(zero_temperature_energy(&system, s.numerics)?.total),
        None => None,
    };
    for &t in &temps {
        let r = free_energy(&system.at_temperature(t), s.numerics)?;
        let mut row: Vec<Cell> = vec![t.into(), r.total.into(), r.tm.into(), r.te.into(), r.est_error.into(), r.m_truncation.into()];
        if let (Some(a), Some(f0)) = (&asym, f0) {
            let df: f64 = a.iter().map(|(_, x)| x.evaluate(t)).sum();
            row.extend([f0.into(), df.into(), (f0 + df).into()]);
        }
        doc.push(row);
    }
    let warnings = asym.as_ref().map(|a| validity_warnings(a, temps.iter().cloned().fold(0.0, f64::max))).unwrap_or_default();
    doc.meta.insert("polarization".into(), Value::from(system.polarization.to_string()));
    doc.meta.insert("precision_digits".into(), Value::from(s.numerics.digits()));
    Ok(Outcome { doc, warnings, ..Default::default() })
}

fn record_row(r: &SweepRecord, figure: bool) -> Vec<Cell> {
    if figure {
        vec![r.t_k.into(), r.f_num.into(), r.f_asym.into(), r.pol.name().into()]
    } else {
        vec![r.t_k.into(), r.f_num.into(), r.f_asym.into(), r.df_num.into(), r.df_th.into(), r.r.into(), r.pol.name().into()]
    }
}

const SWEEP_COLUMNS: [&str; 7] = ["T_K", "F_num", "F_asym", "dF_num", "dF_th", "R", "pol"];
const FIGURE_COLUMNS: [&str; 4] = ["T_K", "F_num", "F_asym", "pol"];

fn sweep_records(s: &Settings, theory_tm: Option<TmCoefficients>) -> Result<(PlateSystem, Vec<f64>, Vec<SweepRecord>), Failure> {
    let temps = s.temperatures_or(default_grid(s.default_mode()))?;
    let system = s.config.system()?;
    let records = r_curve_with(&system, &temps, s.numerics, |mode, t| match (mode, theory_tm) {
        (Mode::TM, Some(c)) => Ok(-c.d * t * t * (1.0 - c.d1 * t)),
        _ => theory_delta_f(&system, mode, t),
    })?;
    Ok((system, temps, records))
}

pub fn cmd_sweep(s: &Settings, figure: bool) -> Result<Outcome, Failure> {
    let (system, temps, records) = sweep_records(s, None)?;
    let mut doc = Document::new(if figure { &FIGURE_COLUMNS } else { &SWEEP_COLUMNS });
    for r in &records {
        doc.push(record_row(r, figure));
    }
    let asym = system.polarization.modes().iter().map(|&m| asymptotic_result(&system, m).map(|a| (m, a))).collect::<Result<Vec<_>, _>>()?;
    let warnings = validity_warnings(&asym, *temps.last().expect("non-empty grid"));
    Ok(Outcome { doc, warnings, ..Default::default() })
}

pub fn cmd_asymptotics(s: &Settings) -> Result<Outcome, Failure> {
    let system = s.config.system()?;
    let results =
        system.polarization.modes().iter().map(|&m| asymptotic_result(&system, m).map(|a| (m, a))).collect::<Result<Vec<_>, _>>()?;
    let mut meta = serde_json::Map::new();
    for (m, r) in &results {
        meta.insert(m.name().into(), serde_json::to_value(r).expect("serializable"));
    }
    let mut warnings = Vec::new();
    let doc = match &s.config.temperatures {
        None => {
            let mut doc = Document::new(&["pol", "source", "power_of_T", "coefficient"]);
            for (m, r) in &results {
                for term in &r.terms {
                    let source = serde_json::to_value(term.source).expect("serializable");
                    doc.push(vec![
                        m.name().into(),
                        source.as_str().unwrap_or_default().into(),
                        term.power_of_t.to_string().into(),
                        term.coefficient.into(),
                    ]);
                }
            }
            doc
        }
        Some(t) => {
            let temps = t.values()?;
            let mut doc = Document::new(&["T_K", "pol", "dF_asym"]);
            for &t in &temps {
                if !(t >= 0.0) {
                    return Err(Failure::Config(format!("temperature must be >= 0, got {t}")));
                }
                for (m, r) in &results {
                    doc.push(vec![t.into(), m.name().into(), r.evaluate(t).into()]);
                }
            }
            warnings = validity_warnings(&results, temps.iter().cloned().fold(0.0, f64::max));
            doc
        }
    };
    let mut doc = doc;
    doc.meta = meta;
    Ok(Outcome { doc, warnings, ..Default::default() })
}

/// Constants report against the given Bernoulli table; asserts agreement.
pub fn cmd_verify_constants(table: &BernoulliTable) -> Result<Outcome, Failure> {
    let report = verify_constants(table)?;
    let mut doc = Document::new(&["constant", "method", "value", "digits"]);
    for r in &report.rows {
        doc.push(vec![r.constant.into(), r.method.into(), r.value.into(), r.digits.clone().into()]);
    }
    doc.meta.insert("psi_spread".into(), json!(report.psi_spread));
    doc.meta.insert("phi_spread".into(), json!(report.phi_spread));
    doc.meta.insert("tolerance".into(), json!(report.tolerance));
    doc.meta.insert("passed".into(), json!(report.passed()));
    let notes = vec![format!(
        "Psi spread {:.3e}, Phi spread {:.3e}, tolerance {:.0e}: {}",
        report.psi_spread,
        report.phi_spread,
        report.tolerance,
        if report.passed() { "ok" } else { "FAILED" }
    )];
    Ok(Outcome { doc, notes, assertion_failed: !report.passed(), ..Default::default() })
}

pub fn cmd_anomaly(s: &Settings) -> Result<Outcome, Failure> {
    let m = &s.config.material;
    let eps_bar = if m.model == PermittivityModel::IdealConductor { f64::INFINITY } else { m.eps_bar };
    let a = s.config.a_um * 1e-6;
    let r = linear_anomaly(eps_bar, a, 1.0)?;
    let mut doc = Document::new(&["eps_bar", "a_m", "linear_coefficient", "entropy_T0", "anomaly"]);
    let anomalous = r.entropy != 0.0;
    doc.push(vec![eps_bar.into(), a.into(), r.free_energy.into(), r.entropy.into(), (if anomalous { "yes" } else { "no" }).into()]);
    let mut warnings = Vec::new();
    if anomalous {
        warnings.push(format!("entropy at T = 0 is {:.6e} J/(K m^2), not zero: Nernst heat theorem violated", r.entropy));
    }
    Ok(Outcome { doc, warnings, ..Default::default() })
}

fn fit_json(f: &FitResult) -> Value {
    serde_json::to_value(f).expect("serializable")
}

/// R diagnostic. `theory_tm` replaces the TM coefficients (C, C1) used on
/// the theory side, for fault-injection tests.
pub fn cmd_rdiag(s: &Settings, theory_tm: Option<TmCoefficients>) -> Result<Outcome, Failure> {
    let (system, _, records) = sweep_records(s, theory_tm)?;
    let mut doc = Document::new(&SWEEP_COLUMNS);
    for r in &records {
        doc.push(record_row(r, false));
    }
    let mut out = Outcome::default();
    let mut failed = Vec::new();
    if system.polarization != Polarization::TM {
        let alpha = alpha_param(system.separation_a, system.material.four_pi_sigma).unwrap_or(f64::INFINITY);
        if alpha < SMALL_PARAMETER_LIMIT {
            out.warnings.push(TE_RDIAG_WARNING.to_string());
        }
    }
    let tm: Vec<SweepRecord> = records.iter().filter(|r| r.pol == Mode::TM).cloned().collect();
    if !tm.is_empty() {
        let theory = match theory_tm {
            Some(c) => c,
            None => tm_coefficients(sigma_si_over_eps0(&system), system.separation_a)?,
        };
        let r0 = tm[0].r;
        out.notes.push(format!("R({} K) = {}", tm[0].t_k, r0.map_or("undefined".into(), |v| format!("{v:.6e}"))));
        doc.meta.insert("R_at_Tmin".into(), r0.map_or(Value::Null, |v| json!(v)));
        if !r0.is_some_and(|v| v.abs() <= RDIAG_MAX_R_AT_TMIN) {
            failed.push(format!("|R(T_min)| > {RDIAG_MAX_R_AT_TMIN}"));
        }
        if let Ok(slope) = r_slope_at_start(&tm) {
            out.notes.push(format!("dR/dT at T_min (3-point) = {slope:.6e} 1/K"));
            doc.meta.insert("slope_at_Tmin".into(), json!(slope));
        }
        let window: Vec<SweepRecord> = tm.iter().filter(|r| r.t_k <= RDIAG_FIT_TMAX * (1.0 + 1e-12)).cloned().collect();
        match fit_expansion(&window) {
            Ok(f) => {
                let rd = ((f.d - theory.d) / theory.d).abs();
                let rd1 = ((f.d1 - theory.d1) / theory.d1).abs();
                out.notes.push(format!(
                    "fit on [{}, {}] K: D = {:.6e} (theory {:.6e}, rel {rd:.2e}), D1 = {:.6} (theory {:.6}, rel {rd1:.2e}), D2 = {:.4}",
                    f.t_range[0], f.t_range[1], f.d, theory.d, f.d1, theory.d1, f.d2
                ));
                if rd > RDIAG_D_TOL {
                    failed.push(format!("fitted D off by {rd:.2e} > {RDIAG_D_TOL}"));
                }
                if rd1 > RDIAG_D1_TOL {
                    failed.push(format!("fitted D1 off by {rd1:.2e} > {RDIAG_D1_TOL}"));
                }
                doc.meta.insert("fit".into(), fit_json(&f));
            }
            Err(e) => out.notes.push(format!("coefficient fit skipped: {e}")),
        }
        doc.meta.insert("theory".into(), json!({ "C": theory.d, "C1": theory.d1 }));
    }
    if s.assert_thresholds && !failed.is_empty() {
        out.notes.push(format!("assertion failed: {}", failed.join("; ")));
        out.assertion_failed = true;
    }
    out.doc = doc;
    Ok(out)
}
