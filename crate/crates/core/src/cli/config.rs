//! Flat `key = value` scenario files.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Unknown keys are rejected and missing keys keep their defaults.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::analytics::OracleMode;
use crate::channel::SystemParams;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid `{field}`: {constraint}")]
    Invalid { field: String, constraint: String },
}

/// Quantity swept along a result's rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Epsilon,
    Eta,
    /// Mean channel SINR; sweep values are in dB.
    GammaBar,
    Attackers,
    Modes,
}

impl FromStr for SweepVariable {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "epsilon" => Ok(Self::Epsilon),
            "eta" => Ok(Self::Eta),
            "gamma_bar" | "gamma-bar" => Ok(Self::GammaBar),
            "attackers" => Ok(Self::Attackers),
            "modes" => Ok(Self::Modes),
            _ => Err(format!(
                "unknown sweep variable `{s}` (expected epsilon, eta, gamma_bar, attackers or modes)"
            )),
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Epsilon => "epsilon",
            Self::Eta => "eta",
            Self::GammaBar => "gamma_bar",
            Self::Attackers => "attackers",
            Self::Modes => "modes",
        })
    }
}

/// Which analytic route feeds the reported values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OracleChoice {
    ClosedForm,
    Numeric,
    /// Report both where a report is produced; values come from the oracle.
    #[default]
    Both,
}

impl OracleChoice {
    pub fn mode(self) -> OracleMode {
        match self {
            Self::ClosedForm => OracleMode::ClosedForm,
            Self::Numeric | Self::Both => OracleMode::Numeric,
        }
    }
}

impl FromStr for OracleChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "closed-form" | "closed_form" => Ok(Self::ClosedForm),
            "numeric" => Ok(Self::Numeric),
            "both" => Ok(Self::Both),
            _ => Err(format!(
                "unknown oracle mode `{s}` (expected closed-form, numeric or both)"
            )),
        }
    }
}

/// Primary-user occupancy used by the simulated columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PuModel {
    /// Every licensed frequency is always occupied, matching the analytic
    /// false-alarm average.
    #[default]
    AlwaysOn,
    /// ON-OFF chain with ρ and ϱ, started from its stationary law.
    Markov,
}

impl FromStr for PuModel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "always_on" | "always-on" => Ok(Self::AlwaysOn),
            "markov" => Ok(Self::Markov),
            _ => Err(format!(
                "unknown pu model `{s}` (expected always_on or markov)"
            )),
        }
    }
}

/// Default mean channel SINR grid: 0–30 dB in 1 dB steps.
pub fn default_gamma_bar_db_grid() -> Vec<f64> {
    (0..=30).map(f64::from).collect()
}

/// Default sensing-threshold grid: 0.05–2.0 in steps of 0.05.
pub fn default_epsilon_grid() -> Vec<f64> {
    (1..=40).map(|i| i as f64 * 0.05).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub params: SystemParams,
    pub sweep_variable: SweepVariable,
    pub sweep_values: Vec<f64>,
    /// Whether `sweep_values` came from the file rather than the default.
    pub sweep_explicit: bool,
    /// Curve family override for `figure`.
    pub curve_values: Option<Vec<f64>>,
    /// Mean channel SINR in dB when it is not the swept variable.
    pub gamma_bar_db: f64,
    pub trials: u64,
    pub seed: u64,
    pub oracle: OracleChoice,
    pub pu_model: PuModel,
    /// Number of primary users; accepted for completeness, no formula uses it.
    pub primary_users: Option<u32>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            params: SystemParams::default(),
            sweep_variable: SweepVariable::GammaBar,
            sweep_values: default_gamma_bar_db_grid(),
            sweep_explicit: false,
            curve_values: None,
            gamma_bar_db: 10.0,
            trials: 1_000_000,
            seed: 42,
            oracle: OracleChoice::Both,
            pu_model: PuModel::AlwaysOn,
            primary_users: None,
        }
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>().map_err(|_| ConfigError::Parse {
        line,
        message: format!("`{key}` expects a number, got `{v}`"),
    })
}

fn parse_int(line: usize, key: &str, v: &str) -> Result<u64, ConfigError> {
    let x = parse_f64(line, key, v)?;
    if x.fract() != 0.0 || x < 0.0 || x > u64::MAX as f64 {
        return Err(ConfigError::Parse {
            line,
            message: format!("`{key}` expects a non-negative integer, got `{v}`"),
        });
    }
    Ok(x as u64)
}

fn parse_u32(line: usize, key: &str, v: &str) -> Result<u32, ConfigError> {
    let x = parse_int(line, key, v)?;
    u32::try_from(x).map_err(|_| ConfigError::Parse {
        line,
        message: format!("`{key}` is out of range: {v}"),
    })
}

fn parse_list(line: usize, key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(line, key, s))
        .collect()
}

fn parse_enum<T: FromStr<Err = String>>(line: usize, v: &str) -> Result<T, ConfigError> {
    v.parse::<T>()
        .map_err(|message| ConfigError::Parse { line, message })
}

fn invalid(field: &str, constraint: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        constraint: constraint.into(),
    }
}

/// Parse a scenario document; see the module docs for the syntax.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = ScenarioConfig::default();
    let mut sweep_values: Option<Vec<f64>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        let p = &mut cfg.params;
        match key {
            "N" | "frequencies" => p.n_frequencies = parse_u32(line, key, value)?,
            "L" | "modes" => p.l_modes = parse_u32(line, key, value)?,
            "M" | "sus" => p.m_sus = parse_u32(line, key, value)?,
            "K" | "attackers" => p.k_attackers = parse_u32(line, key, value)?,
            "Q" | "pus" => cfg.primary_users = Some(parse_u32(line, key, value)?),
            "m" | "fading_m" => p.fading_m = parse_u32(line, key, value)?,
            "alpha" | "fading_mean" => p.fading_mean = parse_f64(line, key, value)?,
            "sigma2" | "noise_power" => p.noise_power = parse_f64(line, key, value)?,
            "P_J" | "attacker_power" => p.attacker_power = parse_f64(line, key, value)?,
            "P_p" | "pu_power" => p.pu_power = parse_f64(line, key, value)?,
            "P_c" | "su_power" => p.su_power = parse_f64(line, key, value)?,
            "B" | "bandwidth" => p.bandwidth = parse_f64(line, key, value)?,
            "epsilon" => p.sensing_threshold = parse_f64(line, key, value)?,
            "eta" => p.outage_threshold = parse_f64(line, key, value)?,
            "rho" => p.on_to_off = parse_f64(line, key, value)?,
            "varrho" => p.off_to_on = parse_f64(line, key, value)?,
            "gamma_bar_db" => cfg.gamma_bar_db = parse_f64(line, key, value)?,
            "seed" => cfg.seed = parse_int(line, key, value)?,
            "trials" => cfg.trials = parse_int(line, key, value)?,
            "sweep_variable" => cfg.sweep_variable = parse_enum(line, value)?,
            "sweep_values" => sweep_values = Some(parse_list(line, key, value)?),
            "curve_values" => cfg.curve_values = Some(parse_list(line, key, value)?),
            "oracle" => cfg.oracle = parse_enum(line, value)?,
            "pu_model" => cfg.pu_model = parse_enum(line, value)?,
            _ => {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("unknown key `{key}`"),
                })
            }
        }
    }

    match sweep_values {
        Some(v) => {
            cfg.sweep_values = v;
            cfg.sweep_explicit = true;
        }
        None => {
            cfg.sweep_values = match cfg.sweep_variable {
                SweepVariable::GammaBar => default_gamma_bar_db_grid(),
                SweepVariable::Epsilon => default_epsilon_grid(),
                SweepVariable::Eta => vec![0.2, 0.25, 0.3, 0.35],
                SweepVariable::Attackers => vec![0.0, 2.0, 4.0, 8.0, 16.0],
                SweepVariable::Modes => vec![1.0, 2.0, 4.0, 8.0],
            };
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn named_field(field: &str) -> &str {
    match field {
        "N" => "N (frequencies)",
        "L" => "L (modes)",
        "m" => "m (fading_m)",
        other => other,
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params.validate().map_err(|e| match e {
            crate::Error::InvalidParameter { field, constraint } => {
                invalid(named_field(field), constraint)
            }
            other => invalid("params", other.to_string()),
        })?;
        if self.trials < 1 {
            return Err(invalid("trials", "must be >= 1"));
        }
        if !self.gamma_bar_db.is_finite() {
            return Err(invalid("gamma_bar_db", "must be finite"));
        }
        if self.sweep_values.is_empty() {
            return Err(invalid("sweep_values", "must not be empty"));
        }
        if self.sweep_values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("sweep_values", "must be strictly increasing"));
        }
        check_axis_values("sweep_values", self.sweep_variable, &self.sweep_values)?;
        if let Some(c) = &self.curve_values {
            if c.is_empty() {
                return Err(invalid("curve_values", "must not be empty"));
            }
        }
        Ok(())
    }
}

/// Values admissible for a given swept quantity.
pub(crate) fn check_axis_values(
    field: &str,
    var: SweepVariable,
    values: &[f64],
) -> Result<(), ConfigError> {
    for &v in values {
        let ok = match var {
            SweepVariable::Epsilon | SweepVariable::Eta => v > 0.0 && v.is_finite(),
            SweepVariable::GammaBar => v.is_finite(),
            SweepVariable::Attackers => v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64,
            SweepVariable::Modes => v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64,
        };
        if !ok {
            let rule = match var {
                SweepVariable::Epsilon | SweepVariable::Eta => "values must be > 0",
                SweepVariable::GammaBar => "values (dB) must be finite",
                SweepVariable::Attackers => "values must be integers >= 0",
                SweepVariable::Modes => "values must be integers >= 1",
            };
            return Err(invalid(field, format!("{rule} for {var}, got {v}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_all_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        assert_eq!(cfg.params.n_frequencies, 2);
        assert_eq!(cfg.params.m_sus, 4);
        assert_eq!(cfg.params.attacker_power, 0.1);
        assert_eq!(cfg.params.bandwidth, 1e7);
        assert_eq!(cfg.trials, 1_000_000);
        assert_eq!(cfg.seed, 42);
    }

    #[test]
    fn zero_modes_rejected_by_name() {
        let err = parse_config("L = 0").unwrap_err();
        match err {
            ConfigError::Invalid { field, constraint } => {
                assert!(field.starts_with('L'));
                assert!(constraint.contains(">= 1"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn overrides() {
        let cfg = parse_config("epsilon = 0.2\nmodes = 4").unwrap();
        assert_eq!(cfg.params.sensing_threshold, 0.2);
        assert_eq!(cfg.params.l_modes, 4);
        let rest = ScenarioConfig {
            params: SystemParams {
                sensing_threshold: 0.2,
                l_modes: 4,
                ..SystemParams::default()
            },
            ..ScenarioConfig::default()
        };
        assert_eq!(cfg, rest);
    }

    #[test]
    fn comments_and_blank_lines() {
        let cfg = parse_config("# scenario\n\nK = 4   # four attackers\ntrials = 1e5\n").unwrap();
        assert_eq!(cfg.params.k_attackers, 4);
        assert_eq!(cfg.trials, 100_000);
    }

    #[test]
    fn unknown_key_has_line_number() {
        let err = parse_config("K = 2\nbogus = 3").unwrap_err();
        assert_eq!(
            err,
            ConfigError::Parse {
                line: 2,
                message: "unknown key `bogus`".into()
            }
        );
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(
            parse_config("K 2"),
            Err(ConfigError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("\nK = two"),
            Err(ConfigError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("K = 1.5"),
            Err(ConfigError::Parse { .. })
        ));
    }

    #[test]
    fn sweep_rules() {
        let cfg = parse_config("sweep_variable = epsilon\nsweep_values = 0.1, 0.2, 0.4").unwrap();
        assert_eq!(cfg.sweep_values, vec![0.1, 0.2, 0.4]);
        assert!(cfg.sweep_explicit);
        assert!(parse_config("sweep_values = 3, 2").is_err());
        assert!(parse_config("sweep_values =").is_err());
        assert!(parse_config("sweep_variable = modes\nsweep_values = 0, 1").is_err());
        let cfg = parse_config("sweep_variable = modes").unwrap();
        assert_eq!(cfg.sweep_values, vec![1.0, 2.0, 4.0, 8.0]);
    }

    #[test]
    fn probability_fields_checked() {
        let err = parse_config("rho = 1.2").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { ref field, .. } if field == "rho"));
    }
}
