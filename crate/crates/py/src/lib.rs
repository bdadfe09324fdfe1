//! Python bindings for the `mfh` library.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mfh::analytics::{self, OracleMode};
use mfh::channel;
use mfh::cli::{self, Figure, SweepResult};
use mfh::montecarlo::{self, Estimate, ProtocolSetup, PuInit, RateSinr, SimulationSummary};
use mfh::specfun;

fn to_py(e: mfh::Error) -> PyErr {
    match e {
        mfh::Error::InvalidParameter { .. } | mfh::Error::Domain(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn oracle_mode(mode: &str) -> PyResult<OracleMode> {
    match mode {
        "numeric" => Ok(OracleMode::Numeric),
        "closed-form" | "closed_form" => Ok(OracleMode::ClosedForm),
        _ => Err(PyValueError::new_err(format!(
            "unknown mode `{mode}` (expected numeric or closed-form)"
        ))),
    }
}

#[pyclass(name = "SystemParams", get_all, set_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PySystemParams {
    n_frequencies: u32,
    l_modes: u32,
    m_sus: u32,
    k_attackers: u32,
    fading_m: u32,
    fading_mean: f64,
    noise_power: f64,
    attacker_power: f64,
    pu_power: f64,
    su_power: f64,
    bandwidth: f64,
    sensing_threshold: f64,
    outage_threshold: f64,
    on_to_off: f64,
    off_to_on: f64,
}

impl From<&channel::SystemParams> for PySystemParams {
    fn from(p: &channel::SystemParams) -> Self {
        Self {
            n_frequencies: p.n_frequencies,
            l_modes: p.l_modes,
            m_sus: p.m_sus,
            k_attackers: p.k_attackers,
            fading_m: p.fading_m,
            fading_mean: p.fading_mean,
            noise_power: p.noise_power,
            attacker_power: p.attacker_power,
            pu_power: p.pu_power,
            su_power: p.su_power,
            bandwidth: p.bandwidth,
            sensing_threshold: p.sensing_threshold,
            outage_threshold: p.outage_threshold,
            on_to_off: p.on_to_off,
            off_to_on: p.off_to_on,
        }
    }
}

impl PySystemParams {
    fn core(&self) -> PyResult<channel::SystemParams> {
        let p = channel::SystemParams {
            n_frequencies: self.n_frequencies,
            l_modes: self.l_modes,
            m_sus: self.m_sus,
            k_attackers: self.k_attackers,
            fading_m: self.fading_m,
            fading_mean: self.fading_mean,
            noise_power: self.noise_power,
            attacker_power: self.attacker_power,
            pu_power: self.pu_power,
            su_power: self.su_power,
            bandwidth: self.bandwidth,
            sensing_threshold: self.sensing_threshold,
            outage_threshold: self.outage_threshold,
            on_to_off: self.on_to_off,
            off_to_on: self.off_to_on,
        };
        p.validate().map_err(to_py)?;
        Ok(p)
    }
}

#[pymethods]
impl PySystemParams {
    /// Defaults match the library; override any field by keyword.
    #[new]
    #[pyo3(signature = (**kwargs))]
    fn new(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut p = Self::from(&channel::SystemParams::default());
        if let Some(kw) = kwargs {
            for (key, value) in kw.iter() {
                let key: String = key.extract()?;
                match key.as_str() {
                    "n_frequencies" => p.n_frequencies = value.extract()?,
                    "l_modes" => p.l_modes = value.extract()?,
                    "m_sus" => p.m_sus = value.extract()?,
                    "k_attackers" => p.k_attackers = value.extract()?,
                    "fading_m" => p.fading_m = value.extract()?,
                    "fading_mean" => p.fading_mean = value.extract()?,
                    "noise_power" => p.noise_power = value.extract()?,
                    "attacker_power" => p.attacker_power = value.extract()?,
                    "pu_power" => p.pu_power = value.extract()?,
                    "su_power" => p.su_power = value.extract()?,
                    "bandwidth" => p.bandwidth = value.extract()?,
                    "sensing_threshold" => p.sensing_threshold = value.extract()?,
                    "outage_threshold" => p.outage_threshold = value.extract()?,
                    "on_to_off" => p.on_to_off = value.extract()?,
                    "off_to_on" => p.off_to_on = value.extract()?,
                    other => return Err(PyValueError::new_err(format!("unknown field `{other}`"))),
                }
            }
        }
        p.core()?;
        Ok(p)
    }

    fn validate(&self) -> PyResult<()> {
        self.core().map(|_| ())
    }

    fn collision_probability(&self) -> PyResult<f64> {
        Ok(self.core()?.collision_probability())
    }

    fn __repr__(&self) -> String {
        format!(
            "SystemParams(N={}, L={}, M={}, K={}, m={}, alpha={}, P_J={}, epsilon={}, eta={})",
            self.n_frequencies,
            self.l_modes,
            self.m_sus,
            self.k_attackers,
            self.fading_m,
            self.fading_mean,
            self.attacker_power,
            self.sensing_threshold,
            self.outage_threshold
        )
    }
}

#[pyfunction]
fn log_gamma(a: f64) -> PyResult<f64> {
    specfun::log_gamma(a).map_err(to_py)
}

#[pyfunction]
fn regularized_lower_gamma(a: f64, b: f64) -> PyResult<f64> {
    specfun::regularized_lower_gamma(a, b).map_err(to_py)
}

#[pyfunction]
fn regularized_upper_gamma(a: f64, b: f64) -> PyResult<f64> {
    specfun::regularized_upper_gamma(a, b).map_err(to_py)
}

#[pyfunction]
fn collision_pmf(k: u32, params: PyRef<'_, PySystemParams>) -> PyResult<f64> {
    analytics::collision_pmf(k, &params.core()?).map_err(to_py)
}

#[pyfunction]
fn false_alarm_no_pu(eps: f64, ks: u32, params: PyRef<'_, PySystemParams>) -> PyResult<f64> {
    analytics::false_alarm_no_pu(eps, ks, &params.core()?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (eps, ks, params, mode = "numeric"))]
fn false_alarm_with_pu(
    eps: f64,
    ks: u32,
    params: PyRef<'_, PySystemParams>,
    mode: &str,
) -> PyResult<f64> {
    let p = params.core()?;
    match oracle_mode(mode)? {
        OracleMode::Numeric => analytics::false_alarm_with_pu_numeric(eps, ks, &p),
        OracleMode::ClosedForm => analytics::false_alarm_with_pu_closed(eps, ks, &p),
    }
    .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (eps, params, mode = "numeric"))]
fn avg_false_alarm(eps: f64, params: PyRef<'_, PySystemParams>, mode: &str) -> PyResult<f64> {
    analytics::avg_false_alarm(eps, &params.core()?, oracle_mode(mode)?).map_err(to_py)
}

#[pyfunction]
fn outage_closed(eta: f64, kd: u32, params: PyRef<'_, PySystemParams>) -> PyResult<f64> {
    analytics::outage_closed(eta, kd, &params.core()?).map_err(to_py)
}

#[pyfunction]
fn outage_numeric(eta: f64, kd: u32, params: PyRef<'_, PySystemParams>) -> PyResult<f64> {
    analytics::outage_numeric(eta, kd, &params.core()?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (kd, params, mode = "numeric"))]
fn success_prob(kd: u32, params: PyRef<'_, PySystemParams>, mode: &str) -> PyResult<f64> {
    analytics::success_prob(kd, &params.core()?, oracle_mode(mode)?).map_err(to_py)
}

#[pyfunction]
fn ergodic_log_capacity(gamma_bar: f64, m: u32) -> PyResult<f64> {
    analytics::ergodic_log_capacity(gamma_bar, m).map_err(to_py)
}

/// Returns `false_alarm`, `outage`, `success`, `spectral_efficiency` and
/// `capacity` (bits/s).
#[pyfunction]
#[pyo3(signature = (params, gamma_bar, mode = "numeric"))]
fn capacity_breakdown<'py>(
    py: Python<'py>,
    params: PyRef<'_, PySystemParams>,
    gamma_bar: f64,
    mode: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let b = analytics::capacity_breakdown(&params.core()?, gamma_bar, oracle_mode(mode)?)
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("false_alarm", b.false_alarm)?;
    d.set_item("outage", b.outage)?;
    d.set_item("success", b.success)?;
    d.set_item("spectral_efficiency", b.spectral_efficiency)?;
    d.set_item("capacity", b.capacity)?;
    Ok(d)
}

fn estimate<'py>(py: Python<'py>, e: &Estimate) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("value", e.value)?;
    d.set_item("half_width", e.half_width)?;
    d.set_item("samples", e.samples)?;
    Ok(d)
}

fn summary<'py>(py: Python<'py>, s: &SimulationSummary) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("slots", s.slots)?;
    d.set_item("su_samples", s.su_samples)?;
    d.set_item("false_alarm", estimate(py, &s.false_alarm)?)?;
    d.set_item("outage", estimate(py, &s.outage)?)?;
    d.set_item("success", estimate(py, &s.success)?)?;
    d.set_item("capacity", estimate(py, &s.capacity)?)?;
    d.set_item("pu_visible", s.pu_visible)?;
    let by_k = PyDict::new(py);
    for (k, e) in &s.outage_by_collisions {
        by_k.set_item(k, estimate(py, e)?)?;
    }
    d.set_item("outage_by_collisions", by_k)?;
    for (name, pmf) in [
        ("sensing_collision_pmf", &s.sensing_collision_pmf),
        ("transmission_collision_pmf", &s.transmission_collision_pmf),
    ] {
        let m = PyDict::new(py);
        for (k, e) in pmf {
            m.set_item(k, e.value)?;
        }
        d.set_item(name, m)?;
    }
    Ok(d)
}

/// Full slotted protocol. `gamma_bar` switches the rate SINR to Gamma(m, γ̄)
/// draws; `pu_init` is `stationary`, `on` or `off`.
#[pyfunction]
#[pyo3(signature = (params, slots, seed, gamma_bar = None, pu_init = "stationary"))]
fn simulate<'py>(
    py: Python<'py>,
    params: PyRef<'_, PySystemParams>,
    slots: u64,
    seed: u64,
    gamma_bar: Option<f64>,
    pu_init: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let pu_init = match pu_init {
        "stationary" => PuInit::Stationary,
        "on" => PuInit::AllOn,
        "off" => PuInit::AllOff,
        other => return Err(PyValueError::new_err(format!("unknown pu_init `{other}`"))),
    };
    let rate = gamma_bar.map_or(RateSinr::Received, |mean| RateSinr::Nakagami { mean });
    let p = params.core()?;
    let s = py
        .detach(|| montecarlo::run_full_protocol(&p, slots, seed, &ProtocolSetup { pu_init, rate }))
        .map_err(to_py)?;
    summary(py, &s)
}

fn rows<'py>(py: Python<'py>, r: &SweepResult) -> PyResult<Vec<Bound<'py, PyDict>>> {
    r.rows
        .iter()
        .map(|row| {
            let d = PyDict::new(py);
            d.set_item("sweep_value", row.sweep_value)?;
            d.set_item("analytic_capacity", row.analytic_capacity)?;
            d.set_item("mc_capacity", row.mc_capacity)?;
            d.set_item("mc_half_width", row.mc_half_width)?;
            d.set_item("false_alarm", row.false_alarm)?;
            d.set_item("outage", row.outage)?;
            d.set_item("success_prob", row.success_prob)?;
            Ok(d)
        })
        .collect()
}

fn config(text: &str) -> PyResult<cli::ScenarioConfig> {
    cli::parse_config(text).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Parse a scenario document and return its base parameters.
#[pyfunction]
fn parse_config(text: &str) -> PyResult<PySystemParams> {
    Ok(PySystemParams::from(&config(text)?.params))
}

/// Analytic sweep of a scenario document, one dict per row.
#[pyfunction]
fn analyze<'py>(py: Python<'py>, text: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = config(text)?;
    let r = py.detach(|| cli::cmd_analyze(&cfg)).map_err(to_py)?;
    rows(py, &r)
}

/// One figure family: curve label → rows.
#[pyfunction]
fn figure<'py>(py: Python<'py>, name: &str, text: &str) -> PyResult<Bound<'py, PyDict>> {
    let fig: Figure = name.parse().map_err(PyValueError::new_err)?;
    let cfg = config(text)?;
    let curves = py.detach(|| cli::cmd_figure(fig, &cfg)).map_err(to_py)?;
    let d = PyDict::new(py);
    for c in &curves {
        d.set_item(c.label(), rows(py, &c.result)?)?;
    }
    Ok(d)
}

#[pymodule]
fn mfh_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemParams>()?;
    m.add_function(wrap_pyfunction!(log_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(regularized_lower_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(regularized_upper_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(collision_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(false_alarm_no_pu, m)?)?;
    m.add_function(wrap_pyfunction!(false_alarm_with_pu, m)?)?;
    m.add_function(wrap_pyfunction!(avg_false_alarm, m)?)?;
    m.add_function(wrap_pyfunction!(outage_closed, m)?)?;
    m.add_function(wrap_pyfunction!(outage_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(success_prob, m)?)?;
    m.add_function(wrap_pyfunction!(ergodic_log_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(capacity_breakdown, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(parse_config, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(figure, m)?)?;
    Ok(())
}
