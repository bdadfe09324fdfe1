//! Parameter sweeps and the three capacity figure families.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::config::{
    check_axis_values, default_epsilon_grid, default_gamma_bar_db_grid, PuModel, ScenarioConfig,
    SweepVariable,
};
use crate::analytics::{capacity_breakdown, OracleMode};
use crate::channel::SystemParams;
use crate::montecarlo::{run_full_protocol, ProtocolSetup, PuInit, RateSinr};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub analytic_capacity: f64,
    pub mc_capacity: Option<f64>,
    pub mc_half_width: Option<f64>,
    pub false_alarm: f64,
    pub outage: f64,
    pub success_prob: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Simulation settings for the Monte Carlo columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub trials: u64,
    pub seed: u64,
    pub pu_model: PuModel,
}

impl McSettings {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Self {
            trials: cfg.trials,
            seed: cfg.seed,
            pu_model: cfg.pu_model,
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Single-mode hopping: the conventional frequency-hopping baseline.
pub fn conventional_fh(params: &SystemParams) -> SystemParams {
    with_modes(params, 1)
}

pub fn with_modes(params: &SystemParams, modes: u32) -> SystemParams {
    SystemParams {
        l_modes: modes,
        ..params.clone()
    }
}

/// Apply one sweep value; returns the point's parameters and mean SINR (linear).
pub fn apply(
    var: SweepVariable,
    value: f64,
    params: &SystemParams,
    gamma_bar_db: f64,
) -> (SystemParams, f64) {
    let mut p = params.clone();
    let mut gb = db_to_linear(gamma_bar_db);
    match var {
        SweepVariable::Epsilon => p.sensing_threshold = value,
        SweepVariable::Eta => p.outage_threshold = value,
        SweepVariable::GammaBar => gb = db_to_linear(value),
        SweepVariable::Attackers => p.k_attackers = value as u32,
        SweepVariable::Modes => p = with_modes(&p, value as u32),
    }
    (p, gb)
}

/// Analytic columns, plus simulated capacity when `mc` is given.
pub fn evaluate_point(
    params: &SystemParams,
    gamma_bar: f64,
    sweep_value: f64,
    mode: OracleMode,
    mc: Option<&McSettings>,
) -> Result<SweepRow> {
    let b = capacity_breakdown(params, gamma_bar, mode)?;
    let (mc_capacity, mc_half_width) = match mc {
        None => (None, None),
        Some(s) => {
            let rate = RateSinr::Nakagami { mean: gamma_bar };
            let (sim_params, setup) = match s.pu_model {
                PuModel::AlwaysOn => (
                    SystemParams {
                        on_to_off: 0.0,
                        ..params.clone()
                    },
                    ProtocolSetup {
                        pu_init: PuInit::AllOn,
                        rate,
                    },
                ),
                PuModel::Markov => (
                    params.clone(),
                    ProtocolSetup {
                        pu_init: PuInit::Stationary,
                        rate,
                    },
                ),
            };
            let summary = run_full_protocol(&sim_params, s.trials, s.seed, &setup)?;
            (
                Some(summary.capacity.value),
                Some(summary.capacity.half_width),
            )
        }
    };
    Ok(SweepRow {
        sweep_value,
        analytic_capacity: b.capacity,
        mc_capacity,
        mc_half_width,
        false_alarm: b.false_alarm,
        outage: b.outage,
        success_prob: b.success,
    })
}

/// Evaluate every sweep value; rows come back in sweep order.
pub fn run_sweep(
    params: &SystemParams,
    var: SweepVariable,
    values: &[f64],
    gamma_bar_db: f64,
    mode: OracleMode,
    mc: Option<&McSettings>,
) -> Result<SweepResult> {
    let rows = values
        .par_iter()
        .map(|&v| {
            let (p, gb) = apply(var, v, params, gamma_bar_db);
            evaluate_point(&p, gb, v, mode, mc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { rows })
}

/// Analytic sweep of the configured variable.
pub fn cmd_analyze(cfg: &ScenarioConfig) -> Result<SweepResult> {
    run_sweep(
        &cfg.params,
        cfg.sweep_variable,
        &cfg.sweep_values,
        cfg.gamma_bar_db,
        cfg.oracle.mode(),
        None,
    )
}

/// Analytic sweep with simulated capacity columns.
pub fn cmd_simulate(cfg: &ScenarioConfig) -> Result<SweepResult> {
    run_sweep(
        &cfg.params,
        cfg.sweep_variable,
        &cfg.sweep_values,
        cfg.gamma_bar_db,
        cfg.oracle.mode(),
        Some(&McSettings::from_config(cfg)),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Capacity vs ε, one curve per η (K = 2, L = 8).
    Fig2,
    /// Capacity vs mean SINR, one curve per K (ε = 0.1, η = 0.3, L = 2).
    Fig3,
    /// Capacity vs mean SINR, one curve per L (K = 2, ε = 0.1, η = 0.3).
    Fig4,
}

impl FromStr for Figure {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "fig2" => Ok(Self::Fig2),
            "fig3" => Ok(Self::Fig3),
            "fig4" => Ok(Self::Fig4),
            _ => Err(format!(
                "unknown figure `{s}` (expected fig2, fig3 or fig4)"
            )),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
        })
    }
}

impl Figure {
    pub fn axis(self) -> SweepVariable {
        match self {
            Self::Fig2 => SweepVariable::Epsilon,
            Self::Fig3 | Self::Fig4 => SweepVariable::GammaBar,
        }
    }

    pub fn family(self) -> SweepVariable {
        match self {
            Self::Fig2 => SweepVariable::Eta,
            Self::Fig3 => SweepVariable::Attackers,
            Self::Fig4 => SweepVariable::Modes,
        }
    }

    pub fn default_curves(self) -> Vec<f64> {
        match self {
            Self::Fig2 => vec![0.2, 0.25, 0.3, 0.35],
            Self::Fig3 => vec![0.0, 2.0, 4.0, 8.0, 16.0],
            Self::Fig4 => vec![1.0, 2.0, 4.0, 8.0],
        }
    }

    fn default_axis(self) -> Vec<f64> {
        match self {
            Self::Fig2 => default_epsilon_grid(),
            Self::Fig3 | Self::Fig4 => default_gamma_bar_db_grid(),
        }
    }

    /// Fixed operating point of the family, on top of the scenario params.
    pub fn base_params(self, params: &SystemParams) -> SystemParams {
        let mut p = params.clone();
        match self {
            Self::Fig2 => {
                p.k_attackers = 2;
                p.l_modes = 8;
            }
            Self::Fig3 => {
                p.sensing_threshold = 0.1;
                p.outage_threshold = 0.3;
                p.l_modes = 2;
            }
            Self::Fig4 => {
                p.k_attackers = 2;
                p.sensing_threshold = 0.1;
                p.outage_threshold = 0.3;
            }
        }
        p
    }
}

/// One curve of a figure family.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub family: SweepVariable,
    pub value: f64,
    pub result: SweepResult,
}

impl Curve {
    /// File-name friendly label such as `eta_0.25`.
    pub fn label(&self) -> String {
        format!("{}_{}", self.family, self.value)
    }
}

fn figure_axis(fig: Figure, cfg: &ScenarioConfig) -> Vec<f64> {
    if cfg.sweep_explicit && cfg.sweep_variable == fig.axis() {
        cfg.sweep_values.clone()
    } else {
        fig.default_axis()
    }
}

/// Evaluate every curve of a figure family, analytic and simulated.
pub fn cmd_figure(fig: Figure, cfg: &ScenarioConfig) -> Result<Vec<Curve>> {
    let curves = cfg
        .curve_values
        .clone()
        .unwrap_or_else(|| fig.default_curves());
    check_axis_values("curve_values", fig.family(), &curves).map_err(|e| {
        crate::Error::InvalidParameter {
            field: "curve_values",
            constraint: e.to_string(),
        }
    })?;
    let axis = figure_axis(fig, cfg);
    let base = fig.base_params(&cfg.params);
    let mc = McSettings::from_config(cfg);
    curves
        .iter()
        .map(|&value| {
            let (params, _) = apply(fig.family(), value, &base, cfg.gamma_bar_db);
            let result = run_sweep(
                &params,
                fig.axis(),
                &axis,
                cfg.gamma_bar_db,
                cfg.oracle.mode(),
                Some(&mc),
            )?;
            Ok(Curve {
                family: fig.family(),
                value,
                result,
            })
        })
        .collect()
}

/// The single-mode baseline over the Fig. 4 axis.
pub fn cmd_conventional_fh(cfg: &ScenarioConfig) -> Result<SweepResult> {
    let base = conventional_fh(&Figure::Fig4.base_params(&cfg.params));
    run_sweep(
        &base,
        Figure::Fig4.axis(),
        &figure_axis(Figure::Fig4, cfg),
        cfg.gamma_bar_db,
        cfg.oracle.mode(),
        Some(&McSettings::from_config(cfg)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_conversion() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        assert!((db_to_linear(30.0) - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn figure_names() {
        assert_eq!("fig3".parse::<Figure>().unwrap(), Figure::Fig3);
        assert!("fig5".parse::<Figure>().is_err());
    }

    #[test]
    fn analyze_rows_follow_sweep_order() {
        let cfg = super::super::config::parse_config(
            "sweep_variable = eta\nsweep_values = 0.1, 0.2, 0.5",
        )
        .unwrap();
        let r = cmd_analyze(&cfg).unwrap();
        let xs: Vec<f64> = r.rows.iter().map(|r| r.sweep_value).collect();
        assert_eq!(xs, vec![0.1, 0.2, 0.5]);
        assert!(r.rows.iter().all(|r| r.mc_capacity.is_none()));
        assert!(r.rows.windows(2).all(|w| w[0].outage < w[1].outage));
    }
}
