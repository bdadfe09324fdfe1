//! CSV output for sweep results.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use super::sweep::SweepResult;

pub const HEADER: &str =
    "sweep_value,analytic_capacity_bps,mc_capacity_bps,mc_half_width_bps,false_alarm,outage,success_prob";

const SIGNIFICANT: i32 = 15;

/// Plain decimal notation with at least 15 significant digits.
pub fn format_decimal(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (SIGNIFICANT - 1 - magnitude).clamp(0, 340) as usize;
    format!("{v:.decimals$}")
}

fn optional(v: Option<f64>) -> String {
    v.map(format_decimal).unwrap_or_default()
}

/// Header plus one LF-terminated row per sweep value.
pub fn write_csv<W: Write>(result: &SweepResult, mut out: W) -> io::Result<()> {
    writeln!(out, "{HEADER}")?;
    for r in &result.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            format_decimal(r.sweep_value),
            format_decimal(r.analytic_capacity),
            optional(r.mc_capacity),
            optional(r.mc_half_width),
            format_decimal(r.false_alarm),
            format_decimal(r.outage),
            format_decimal(r.success_prob),
        )?;
    }
    out.flush()
}

#[derive(Debug, thiserror::Error)]
#[error("cannot write {path}: {source}")]
pub struct WriteError {
    pub path: String,
    #[source]
    pub source: io::Error,
}

pub fn emit_csv(result: &SweepResult, destination: &Path) -> Result<(), WriteError> {
    let wrap = |source| WriteError {
        path: destination.display().to_string(),
        source,
    };
    let file = File::create(destination).map_err(wrap)?;
    write_csv(result, BufWriter::new(file)).map_err(wrap)
}
