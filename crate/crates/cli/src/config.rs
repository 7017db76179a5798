//! Scenario configuration: flat `key = value` files overlaid by command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use lambda3_core::integrator::DEFAULT_DT;
use lambda3_core::{default_params, DensityVector, InitialCondition, SystemParams};

/// Keys accepted in a config file.
pub const KEYS: [&str; 11] = [
    "t1", "t2", "k21", "k02", "omega", "t_end", "dt", "stride", "init", "output", "format",
];

pub const DEFAULT_T_END: f64 = 14.0;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("invalid {key}: {msg}")]
    Invalid { key: String, msg: String },
}

impl ConfigError {
    fn invalid(key: &str, msg: impl Into<String>) -> Self {
        Self::Invalid {
            key: key.to_string(),
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            other => Err(format!("expected csv or text, got `{other}`")),
        }
    }
}

/// Initial state selector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum InitSpec {
    /// All population in level 1.
    #[default]
    Excited,
    Ground,
    Explicit([f64; 4]),
}

impl FromStr for InitSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "excited" => Ok(InitSpec::Excited),
            "ground" => Ok(InitSpec::Ground),
            other => {
                let v = parse_list(other)?;
                let arr: [f64; 4] = v.try_into().map_err(|v: Vec<f64>| {
                    format!("expected excited, ground or four numbers rho00,rhoB,rho11,rho22; got {} numbers", v.len())
                })?;
                Ok(InitSpec::Explicit(arr))
            }
        }
    }
}

impl fmt::Display for InitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitSpec::Excited => f.write_str("excited"),
            InitSpec::Ground => f.write_str("ground"),
            InitSpec::Explicit(v) => write!(f, "{},{},{},{}", v[0], v[1], v[2], v[3]),
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|e| format!("`{}`: {e}", x.trim()))
        })
        .collect()
}

/// Unvalidated settings. Each field is `None` until some layer sets it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub k21: Option<f64>,
    pub k02: Option<f64>,
    pub omega: Option<Vec<f64>>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub stride: Option<usize>,
    pub init: Option<InitSpec>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RawConfig {
    /// Parse the flat text format.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
                line: line_no,
                msg: format!("expected `key = value`, got `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |msg: String| ConfigError::Parse {
                line: line_no,
                msg: format!("{key}: {msg}"),
            };
            let num = |v: &str| v.parse::<f64>().map_err(|e| bad(format!("`{v}`: {e}")));
            match key {
                "t1" => raw.t1 = Some(num(value)?),
                "t2" => raw.t2 = Some(num(value)?),
                "k21" => raw.k21 = Some(num(value)?),
                "k02" => raw.k02 = Some(num(value)?),
                "t_end" => raw.t_end = Some(num(value)?),
                "dt" => raw.dt = Some(num(value)?),
                "omega" => raw.omega = Some(parse_list(value).map_err(bad)?),
                "stride" => {
                    raw.stride = Some(value.parse().map_err(|e| bad(format!("`{value}`: {e}")))?)
                }
                "init" => raw.init = Some(value.parse().map_err(bad)?),
                "output" => raw.output = Some(PathBuf::from(value)),
                "format" => raw.format = Some(value.parse().map_err(bad)?),
                _ => {
                    return Err(ConfigError::UnknownKey {
                        line: line_no,
                        key: key.to_string(),
                    })
                }
            }
        }
        Ok(raw)
    }

    /// Fields set in `top` win.
    pub fn overlay(self, top: RawConfig) -> RawConfig {
        RawConfig {
            t1: top.t1.or(self.t1),
            t2: top.t2.or(self.t2),
            k21: top.k21.or(self.k21),
            k02: top.k02.or(self.k02),
            omega: top.omega.or(self.omega),
            t_end: top.t_end.or(self.t_end),
            dt: top.dt.or(self.dt),
            stride: top.stride.or(self.stride),
            init: top.init.or(self.init),
            output: top.output.or(self.output),
            format: top.format.or(self.format),
        }
    }

    /// Fill defaults and validate every field.
    pub fn finish(self) -> Result<ScenarioConfig, ConfigError> {
        let d = default_params();
        let t1 = self.t1.unwrap_or(d.t1());
        let t2 = self.t2.unwrap_or(d.t2());
        let k21 = self.k21.unwrap_or(d.k21());
        let k02 = self.k02.unwrap_or(d.k02());
        let omegas = self.omega.clone();
        let first = omegas
            .as_ref()
            .and_then(|w| w.first().copied())
            .unwrap_or(0.0);
        let params = SystemParams::new(t1, t2, k21, k02, first).map_err(|e| match e {
            lambda3_core::Error::InvalidParameter {
                name,
                value,
                reason,
            } => ConfigError::invalid(name, format!("{value} {reason}")),
            other => ConfigError::invalid("params", other.to_string()),
        })?;
        if let Some(ws) = &omegas {
            if ws.is_empty() {
                return Err(ConfigError::invalid("omega", "empty list"));
            }
            if let Some(w) = ws.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
                return Err(ConfigError::invalid(
                    "omega",
                    format!("{w} must be finite and non-negative"),
                ));
            }
        }
        let t_end = self.t_end.unwrap_or(DEFAULT_T_END);
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(ConfigError::invalid(
                "t_end",
                format!("{t_end} must be positive"),
            ));
        }
        let dt = self.dt.unwrap_or(DEFAULT_DT);
        if !(dt.is_finite() && dt > 0.0) {
            return Err(ConfigError::invalid("dt", format!("{dt} must be positive")));
        }
        if dt > t_end {
            return Err(ConfigError::invalid(
                "dt",
                format!("{dt} exceeds t_end = {t_end}"),
            ));
        }
        let steps = (t_end / dt).round();
        if (steps * dt - t_end).abs() > 1e-9 * t_end {
            return Err(ConfigError::invalid(
                "dt",
                format!("t_end = {t_end} is not a whole number of steps of {dt}"),
            ));
        }
        let stride = self.stride.unwrap_or(1);
        if stride == 0 {
            return Err(ConfigError::invalid("stride", "must be at least 1"));
        }
        let init = self.init.unwrap_or_default();
        let initial = match init {
            InitSpec::Excited => InitialCondition::excited(),
            InitSpec::Ground => InitialCondition::new(DensityVector::ground())
                .map_err(|e| ConfigError::invalid("init", e.to_string()))?,
            InitSpec::Explicit(v) => InitialCondition::new(DensityVector::from(v))
                .map_err(|e| ConfigError::invalid("init", e.to_string()))?,
        };
        Ok(ScenarioConfig {
            params,
            omegas,
            t_end,
            dt,
            stride,
            init,
            initial,
            output: self.output,
            format: self.format.unwrap_or_default(),
        })
    }
}

/// Fully validated scenario.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    /// Relaxation constants; `omega` holds the first requested drive or 0.
    pub params: SystemParams,
    /// Drive strengths as given, if any.
    pub omegas: Option<Vec<f64>>,
    pub t_end: f64,
    pub dt: f64,
    pub stride: usize,
    pub init: InitSpec,
    pub initial: InitialCondition,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl ScenarioConfig {
    /// Single drive strength; lists are rejected.
    pub fn single_omega(&self) -> Result<f64, ConfigError> {
        match self.omegas.as_deref() {
            None => Ok(0.0),
            Some([w]) => Ok(*w),
            Some(_) => Err(ConfigError::invalid(
                "omega",
                "this command takes a single drive strength",
            )),
        }
    }
}

/// Read, parse and validate a config file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    read_raw(path)?.finish()
}

pub fn read_raw(path: &Path) -> Result<RawConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    RawConfig::parse(&text)
}
