//! Run configuration: INI-style `[material]`, `[geometry]` and `[run]`
//! sections, plus built-in presets.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use casimir::diagnostics::log_grid;
use casimir::dielectric::{DielectricModel, PermittivityModel};
use casimir::lifshitz::{PlateSystem, Polarization};
use ini::Ini;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => err(format!("unknown format '{other}' (csv, json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Temperatures {
    List(Vec<f64>),
    Grid { min: f64, max: f64, per_decade: usize },
}

impl Temperatures {
    pub fn values(&self) -> Result<Vec<f64>, ConfigError> {
        match self {
            Temperatures::List(v) => Ok(v.clone()),
            Temperatures::Grid { min, max, per_decade } => log_grid(*min, *max, *per_decade).map_err(|e| ConfigError(e.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub material: DielectricModel,
    /// Separation in micrometres.
    pub a_um: f64,
    pub temperatures: Option<Temperatures>,
    pub polarization: Polarization,
    /// Decimal digits; `None` falls back to the environment or 33.
    pub precision: Option<u32>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

pub const DEFAULT_PRECISION: u32 = 33;
pub const PRECISION_ENV: &str = "CASIMIR_PRECISION";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    SiPaper,
    SiFig2,
    IdealMetalCheck,
}

impl FromStr for Preset {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "si-paper" => Ok(Preset::SiPaper),
            "si-fig2" => Ok(Preset::SiFig2),
            "ideal-metal-check" => Ok(Preset::IdealMetalCheck),
            other => err(format!("unknown preset '{other}' (si-paper, si-fig2, ideal-metal-check)")),
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::preset(Preset::SiPaper)
    }
}

impl RunConfig {
    pub fn preset(p: Preset) -> Self {
        let material = match p {
            Preset::SiPaper => DielectricModel::silicon(),
            Preset::SiFig2 => DielectricModel { eps_bar: 1.0, ..DielectricModel::silicon() },
            Preset::IdealMetalCheck => DielectricModel::ideal_conductor(),
        };
        RunConfig {
            material,
            a_um: 1.0,
            temperatures: None,
            polarization: Polarization::Both,
            precision: None,
            output: None,
            format: Format::Csv,
        }
    }

    /// Parses config text, starting from `base` for absent keys.
    pub fn parse_onto(text: &str, base: RunConfig) -> Result<Self, ConfigError> {
        let ini = Ini::load_from_str(text).map_err(|e| ConfigError(format!("config parse error: {e}")))?;
        let mut c = base;
        for (section, props) in ini.iter() {
            let section = section.unwrap_or("");
            for (key, value) in props.iter() {
                c.set(section, key, value)?;
            }
        }
        Ok(c)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        RunConfig::parse_onto(text, RunConfig::default())
    }

    fn set(&mut self, section: &str, key: &str, value: &str) -> Result<(), ConfigError> {
        let num = |v: &str| -> Result<f64, ConfigError> {
            v.trim().parse::<f64>().map_err(|_| ConfigError(format!("[{section}] {key}: '{v}' is not a number")))
        };
        match (section, key) {
            ("material", "eps_bar") => self.material.eps_bar = num(value)?,
            ("material", "omega0") => self.material.omega0 = num(value)?,
            ("material", "sigma_over_eps0") => self.material.four_pi_sigma = num(value)?,
            ("material", "model") => self.material.model = value.parse::<PermittivityModel>().map_err(|e| ConfigError(e.to_string()))?,
            ("geometry", "a_um") => self.a_um = num(value)?,
            ("run", "temperatures") => {
                let list = value.split(',').filter(|s| !s.trim().is_empty()).map(num).collect::<Result<Vec<_>, _>>()?;
                self.temperatures = Some(Temperatures::List(list));
            }
            ("run", "grid") => {
                let parts: Vec<&str> = value.split(':').collect();
                if parts.len() != 3 {
                    return err(format!("[run] grid: expected min:max:points_per_decade, got '{value}'"));
                }
                let per_decade = parts[2]
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| ConfigError(format!("[run] grid: bad points per decade '{}'", parts[2])))?;
                self.temperatures = Some(Temperatures::Grid { min: num(parts[0])?, max: num(parts[1])?, per_decade });
            }
            ("run", "polarization") => self.polarization = value.parse().map_err(|e: casimir::Error| ConfigError(e.to_string()))?,
            ("run", "precision") => {
                self.precision =
                    Some(value.trim().parse().map_err(|_| ConfigError(format!("[run] precision: '{value}' is not an integer")))?)
            }
            ("run", "output") => self.output = Some(PathBuf::from(value.trim())),
            ("run", "format") => self.format = value.parse()?,
            _ => return err(format!("unknown config key [{section}] {key}")),
        }
        Ok(())
    }

    /// Config text that parses back to `self`.
    pub fn to_ini_string(&self) -> String {
        let mut ini = Ini::new();
        let m = &self.material;
        ini.with_section(Some("material"))
            .set("model", m.model.to_string())
            .set("eps_bar", fmt_f64(m.eps_bar))
            .set("omega0", fmt_f64(m.omega0))
            .set("sigma_over_eps0", fmt_f64(m.four_pi_sigma));
        ini.with_section(Some("geometry")).set("a_um", fmt_f64(self.a_um));
        let mut run = ini.with_section(Some("run"));
        run.set("polarization", self.polarization.to_string().to_ascii_lowercase()).set("format", self.format.to_string());
        match &self.temperatures {
            Some(Temperatures::List(v)) => {
                run.set("temperatures", v.iter().map(|t| fmt_f64(*t)).collect::<Vec<_>>().join(", "));
            }
            Some(Temperatures::Grid { min, max, per_decade }) => {
                run.set("grid", format!("{}:{}:{per_decade}", fmt_f64(*min), fmt_f64(*max)));
            }
            None => {}
        }
        if let Some(p) = self.precision {
            run.set("precision", p.to_string());
        }
        if let Some(o) = &self.output {
            run.set("output", o.display().to_string());
        }
        let mut buf = Vec::new();
        ini.write_to(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("utf-8")
    }

    /// Precision in digits: explicit setting, else the environment, else 33.
    pub fn resolved_precision(&self) -> Result<u32, ConfigError> {
        if let Some(p) = self.precision {
            return Ok(p);
        }
        match std::env::var(PRECISION_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| ConfigError(format!("{PRECISION_ENV}: '{v}' is not an integer"))),
            Err(_) => Ok(DEFAULT_PRECISION),
        }
    }

    /// Plate system at T = 0 for this configuration.
    pub fn system(&self) -> Result<PlateSystem, ConfigError> {
        PlateSystem::new(self.a_um * 1e-6, 0.0, self.material, self.polarization).map_err(|e| ConfigError(e.to_string()))
    }
}

/// Shortest representation that parses back to the same value.
fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}
