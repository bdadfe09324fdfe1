//! Closed-form false-alarm, outage and capacity expressions, each paired
//! with a numeric-integration oracle.
//!
//! The oracles integrate the defining probability directly and are the
//! authoritative values. The printed closed forms are evaluated as written
//! and audited against them through [`ProbabilityReport`]:
//!
//! * `1/Γ(n)` at a non-positive integer `n` is taken as 0, which removes the
//!   corresponding summand.
//! * The sensing-phase closed form carries an exponent written in terms of
//!   the transmission-phase collision count; it is evaluated with the
//!   sensing count substituted, the only count available in that phase.

use crate::channel::{power_gain_pdf, power_sum_pdf, SystemParams};
use crate::error::{Error, Result};
use crate::specfun::{
    log_gamma, lower_incomplete_gamma, reciprocal_gamma, regularized_lower_gamma,
    regularized_upper_gamma, try_integrate_finite, try_integrate_semi_infinite, QuadratureSpec,
};

/// Which route supplies the per-collision probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OracleMode {
    ClosedForm,
    #[default]
    Numeric,
}

/// Closed form next to its numeric oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityReport {
    /// `Err` carries the reason the closed form could not be evaluated.
    pub closed_form: std::result::Result<f64, String>,
    pub numeric_oracle: f64,
}

impl ProbabilityReport {
    pub fn discrepancy(&self) -> Option<f64> {
        self.closed_form
            .as_ref()
            .ok()
            .map(|c| (c - self.numeric_oracle).abs())
    }

    pub fn is_available(&self) -> bool {
        self.closed_form.is_ok()
    }
}

fn report(closed: Result<f64>, numeric: f64) -> Result<ProbabilityReport> {
    let closed_form = match closed {
        Ok(v) => Ok(v),
        Err(Error::ClosedFormUnavailable(why)) => Err(why),
        Err(e) => return Err(e),
    };
    Ok(ProbabilityReport {
        closed_form,
        numeric_oracle: numeric,
    })
}

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn check_threshold(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && !v.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be > 0, got {v}")))
    }
}

/// Probability that exactly `k` of the K attackers land on the SU's cell:
/// Binomial(K, 1/(NL)).
pub fn collision_pmf(k: u32, params: &SystemParams) -> Result<f64> {
    let total = params.k_attackers;
    if k > total {
        return Err(Error::Domain(format!(
            "collision count {k} exceeds the number of attackers {total}"
        )));
    }
    let p = params.collision_probability();
    if p >= 1.0 {
        return Ok(if k == total { 1.0 } else { 0.0 });
    }
    let ln_choose = log_gamma(total as f64 + 1.0)?
        - log_gamma(k as f64 + 1.0)?
        - log_gamma((total - k) as f64 + 1.0)?;
    let ln = ln_choose + k as f64 * p.ln() + (total - k) as f64 * (-p).ln_1p();
    Ok(ln.exp())
}

/// CDF of a single squared gain by quadrature of its density.
fn gain_cdf_numeric(x: f64, params: &SystemParams) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let m = params.fading_m;
    let alpha = params.fading_mean;
    let v = try_integrate_finite(|z| power_gain_pdf(z, m, alpha), 0.0, x, &quad())?;
    Ok(v.clamp(0.0, 1.0))
}

/// False alarm on a non-zero mode, where the PU is filtered out and only
/// the `ks` colliding attackers can push the sensing SINR over ε.
pub fn false_alarm_no_pu(eps: f64, ks: u32, params: &SystemParams) -> Result<f64> {
    check_threshold("epsilon", eps)?;
    if ks == 0 || params.attacker_power == 0.0 {
        return Ok(0.0);
    }
    let m = params.fading_m as f64;
    let arg = m * eps * params.noise_power / (params.fading_mean * params.attacker_power);
    regularized_upper_gamma(m * ks as f64, arg)
}

/// Quadrature oracle for [`false_alarm_no_pu`]: 1 − ∫₀^{εσ²/P_J} p_h(h) dh.
pub fn false_alarm_no_pu_numeric(eps: f64, ks: u32, params: &SystemParams) -> Result<f64> {
    check_threshold("epsilon", eps)?;
    if ks == 0 || params.attacker_power == 0.0 {
        return Ok(0.0);
    }
    let (m, alpha) = (params.fading_m, params.fading_mean);
    let upper = eps * params.noise_power / params.attacker_power;
    let below = try_integrate_finite(|h| power_sum_pdf(h, ks, m, alpha), 0.0, upper, &quad())?;
    Ok((1.0 - below).clamp(0.0, 1.0))
}

/// Pr(P_J Σ h_k² + P_p h_p² ≥ εσ²) by nested quadrature.
pub fn false_alarm_with_pu_numeric(eps: f64, ks: u32, params: &SystemParams) -> Result<f64> {
    check_threshold("epsilon", eps)?;
    let level = eps * params.noise_power;
    if ks == 0 || params.attacker_power == 0.0 {
        let below = gain_cdf_numeric(level / params.pu_power, params)?;
        return Ok((1.0 - below).clamp(0.0, 1.0));
    }
    let (m, alpha) = (params.fading_m, params.fading_mean);
    let upper = level / params.attacker_power;
    let below = try_integrate_finite(
        |h| {
            let density = power_sum_pdf(h, ks, m, alpha)?;
            if density == 0.0 {
                return Ok(0.0);
            }
            let residual = (level - params.attacker_power * h) / params.pu_power;
            Ok(density * gain_cdf_numeric(residual, params)?)
        },
        0.0,
        upper,
        &quad(),
    )?;
    Ok((1.0 - below).clamp(0.0, 1.0))
}

/// The sensing-phase closed form with the PU present, evaluated as printed.
///
/// Unavailable when P_J ≥ P_p: at equality the factor (m/α − mP_J/(αP_p))
/// vanishes and above it the incomplete-gamma limit turns negative. The
/// value is not clamped to [0, 1].
pub fn false_alarm_with_pu_closed(eps: f64, ks: u32, params: &SystemParams) -> Result<f64> {
    check_threshold("epsilon", eps)?;
    if ks == 0 {
        return Err(Error::Domain(
            "the closed form requires at least one colliding attacker".into(),
        ));
    }
    let (pj, pp) = (params.attacker_power, params.pu_power);
    if pj == 0.0 {
        return Err(Error::ClosedFormUnavailable(
            "P_J = 0 divides the threshold".into(),
        ));
    }
    if pj == pp {
        return Err(Error::ClosedFormUnavailable("singular at P_J = P_p".into()));
    }
    if pj > pp {
        return Err(Error::ClosedFormUnavailable(
            "incomplete-gamma limit is negative for P_J > P_p".into(),
        ));
    }
    let m = params.fading_m as f64;
    let mi = params.fading_m as i32;
    let alpha = params.fading_mean;
    let es2 = eps * params.noise_power;
    let shape = m * ks as f64;
    // printed exponent uses K_d; the sensing count is substituted
    let kd = ks as f64;

    let head = 1.0 - regularized_lower_gamma(shape, m * es2 / (alpha * pj))?;
    let ratio = pj / pp;
    let limit = es2 / (pj * (m / alpha - m * pj / (alpha * pp)));
    let pu_arg = m * es2 / (alpha * pp);

    let mut acc = 0.0;
    for u in 0..mi {
        for v in 0..(mi - u) {
            let rg = reciprocal_gamma((v - 1) as f64) * reciprocal_gamma((mi - u - v) as f64);
            if rg == 0.0 {
                continue;
            }
            let sign_term = (-ratio).powi(mi - u - v - 1);
            let g = lower_incomplete_gamma(shape + m - (u + v) as f64 - 1.0, limit)?;
            let tail = (1.0 - ratio).powf(-m * kd - m + (u + v) as f64 + 1.0);
            acc += sign_term * rg * pu_arg.powi(v) * g * tail;
        }
    }
    let prefactor = (-pu_arg).exp() * (-log_gamma(shape)?).exp();
    Ok(head + prefactor * acc)
}

/// Oracle and printed closed form side by side for the with-PU branch.
pub fn false_alarm_with_pu_report(
    eps: f64,
    ks: u32,
    params: &SystemParams,
) -> Result<ProbabilityReport> {
    let numeric = false_alarm_with_pu_numeric(eps, ks, params)?;
    let closed = if ks == 0 {
        false_alarm_pu_only_closed(eps, params)
    } else {
        false_alarm_with_pu_closed(eps, ks, params)
    };
    report(closed, numeric)
}

/// No colliding attacker: only the PU can exceed the threshold.
fn false_alarm_pu_only_closed(eps: f64, params: &SystemParams) -> Result<f64> {
    let m = params.fading_m as f64;
    regularized_upper_gamma(
        m,
        m * eps * params.noise_power / (params.fading_mean * params.pu_power),
    )
}

fn false_alarm_with_pu(eps: f64, ks: u32, params: &SystemParams, mode: OracleMode) -> Result<f64> {
    match mode {
        OracleMode::Numeric => false_alarm_with_pu_numeric(eps, ks, params),
        OracleMode::ClosedForm if ks == 0 => false_alarm_pu_only_closed(eps, params),
        OracleMode::ClosedForm => false_alarm_with_pu_closed(eps, ks, params),
    }
}

/// Average false-alarm probability P_s over the collision count, mixing the
/// zero-mode (PU visible, weight 1/L) and non-zero-mode branches.
pub fn avg_false_alarm(eps: f64, params: &SystemParams, mode: OracleMode) -> Result<f64> {
    check_threshold("epsilon", eps)?;
    let l = params.l_modes as f64;
    let mut total = 0.0;
    for ks in 0..=params.k_attackers {
        let w = collision_pmf(ks, params)?;
        if w == 0.0 {
            continue;
        }
        let with_pu = false_alarm_with_pu(eps, ks, params, mode)?;
        let without = false_alarm_no_pu(eps, ks, params)?;
        total += w * (with_pu / l + (l - 1.0) / l * without);
    }
    Ok(total.clamp(0.0, 1.0))
}

/// P_s when no licensed channel is ever occupied: only attackers can cause
/// a false alarm, whatever the mode.
pub fn avg_false_alarm_pu_absent(eps: f64, params: &SystemParams) -> Result<f64> {
    check_threshold("epsilon", eps)?;
    let mut total = 0.0;
    for ks in 0..=params.k_attackers {
        let w = collision_pmf(ks, params)?;
        if w > 0.0 {
            total += w * false_alarm_no_pu(eps, ks, params)?;
        }
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Pr(P_c h_s² ≤ η(P_J H + σ²)) with H the aggregate gain of `kd` colliding
/// attackers, by nested quadrature.
pub fn outage_numeric(eta: f64, kd: u32, params: &SystemParams) -> Result<f64> {
    check_threshold("eta", eta)?;
    let base = eta * params.noise_power / params.su_power;
    if kd == 0 || params.attacker_power == 0.0 {
        return gain_cdf_numeric(base, params);
    }
    let (m, alpha) = (params.fading_m, params.fading_mean);
    let slope = eta * params.attacker_power / params.su_power;
    // integrate over H / E[H] so the mass sits near 1 whatever the scale
    let scale = kd as f64 * alpha;
    let v = try_integrate_semi_infinite(
        |x| {
            let h = scale * x;
            let density = power_sum_pdf(h, kd, m, alpha)?;
            if density == 0.0 {
                return Ok(0.0);
            }
            Ok(scale * density * gain_cdf_numeric(base + slope * h, params)?)
        },
        0.0,
        &quad(),
    )?;
    Ok(v.clamp(0.0, 1.0))
}

/// Zero-attacker outage G(m, mησ²/(αP_c)) / Γ(m).
pub fn outage_zero_attackers(eta: f64, params: &SystemParams) -> Result<f64> {
    check_threshold("eta", eta)?;
    let m = params.fading_m as f64;
    regularized_lower_gamma(
        m,
        m * eta * params.noise_power / (params.fading_mean * params.su_power),
    )
}

/// Rayleigh (m = 1) outage 1 − e^{−ησ²/(αP_c)} (1 + ηαP_J/P_c)^{−K_d}, as printed.
pub fn outage_rayleigh(eta: f64, kd: u32, params: &SystemParams) -> Result<f64> {
    check_threshold("eta", eta)?;
    let alpha = params.fading_mean;
    let pc = params.su_power;
    let survive = (-eta * params.noise_power / (alpha * pc)).exp()
        * (1.0 + eta * alpha * params.attacker_power / pc).powi(-(kd as i32));
    Ok(1.0 - survive)
}

/// The general Nakagami-m double sum, as printed.
fn outage_double_sum(eta: f64, kd: u32, params: &SystemParams) -> Result<f64> {
    let m = params.fading_m as f64;
    let mi = params.fading_m as i32;
    let alpha = params.fading_mean;
    let pc = params.su_power;
    let shape = m * kd as f64;
    let ln_norm = log_gamma(shape)?;
    let interference = eta * params.attacker_power / pc;
    let noise_arg = m * eta * params.noise_power / (alpha * pc);

    let mut acc = 0.0;
    for u in 0..mi {
        for v in 0..(mi - u) {
            let rg = reciprocal_gamma((v - 1) as f64) * reciprocal_gamma((mi - u - v) as f64);
            if rg == 0.0 {
                continue;
            }
            let a = shape + m - (u + v) as f64 - 1.0;
            let gamma_ratio = (log_gamma(a)? - ln_norm).exp();
            acc += gamma_ratio
                * rg
                * interference.powi(mi - u - v - 1)
                * noise_arg.powi(v)
                * (1.0 + interference).powf(-shape - m + (u + v) as f64 + 1.0);
        }
    }
    Ok(1.0 - (-noise_arg).exp() * acc)
}

/// Closed-form outage: the zero-attacker form for K_d = 0, the Rayleigh form
/// for m = 1, otherwise the general double sum as printed (not clamped).
pub fn outage_closed(eta: f64, kd: u32, params: &SystemParams) -> Result<f64> {
    check_threshold("eta", eta)?;
    if kd == 0 {
        outage_zero_attackers(eta, params)
    } else if params.fading_m == 1 {
        outage_rayleigh(eta, kd, params)
    } else {
        outage_double_sum(eta, kd, params)
    }
}

pub fn outage_report(eta: f64, kd: u32, params: &SystemParams) -> Result<ProbabilityReport> {
    let numeric = outage_numeric(eta, kd, params)?;
    report(outage_closed(eta, kd, params), numeric)
}

fn outage(eta: f64, kd: u32, params: &SystemParams, mode: OracleMode) -> Result<f64> {
    match mode {
        OracleMode::Numeric => outage_numeric(eta, kd, params),
        OracleMode::ClosedForm => outage_closed(eta, kd, params),
    }
}

/// (1 − P_s)(1 − p_d(η, K_d, m)) P_{K_d} for a given average false alarm.
pub fn success_prob_given(
    p_s: f64,
    kd: u32,
    params: &SystemParams,
    mode: OracleMode,
) -> Result<f64> {
    let w = collision_pmf(kd, params)?;
    if w == 0.0 {
        return Ok(0.0);
    }
    let p_d = outage(params.outage_threshold, kd, params, mode)?;
    Ok(((1.0 - p_s) * (1.0 - p_d) * w).clamp(0.0, 1.0))
}

/// Probability that a SU passes sensing and then transmits without outage
/// while exactly `kd` attackers collide with it.
pub fn success_prob(kd: u32, params: &SystemParams, mode: OracleMode) -> Result<f64> {
    let p_s = avg_false_alarm(params.sensing_threshold, params, mode)?;
    success_prob_given(p_s, kd, params, mode)
}

/// 𝔼[log₂(1 + γ)] for γ ~ Gamma(shape m, mean γ̄), in bits/s/Hz.
pub fn ergodic_log_capacity(gamma_bar: f64, m: u32) -> Result<f64> {
    check_threshold("mean SINR", gamma_bar)?;
    if m < 1 {
        return Err(Error::Domain("fading shape m must be >= 1".into()));
    }
    // γ = γ̄ x with x ~ Gamma(m, mean 1)
    let v = try_integrate_semi_infinite(
        |x| Ok((gamma_bar * x).ln_1p() * power_gain_pdf(x, m, 1.0)?),
        0.0,
        &quad(),
    )?;
    Ok(v / std::f64::consts::LN_2)
}

/// Sensing, outage and capacity figures for one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityBreakdown {
    /// P_s.
    pub false_alarm: f64,
    /// Σ P_{K_d} p_d(η, K_d, m).
    pub outage: f64,
    /// Σ p_suc(K_d).
    pub success: f64,
    /// 𝔼[log₂(1+γ)] in bits/s/Hz.
    pub spectral_efficiency: f64,
    /// Total SU capacity in bits/s.
    pub capacity: f64,
}

pub fn capacity_breakdown(
    params: &SystemParams,
    gamma_bar: f64,
    mode: OracleMode,
) -> Result<CapacityBreakdown> {
    params.validate()?;
    let p_s = avg_false_alarm(params.sensing_threshold, params, mode)?;
    let mut outage_total = 0.0;
    let mut success = 0.0;
    for kd in 0..=params.k_attackers {
        let w = collision_pmf(kd, params)?;
        if w == 0.0 {
            continue;
        }
        let p_d = outage(params.outage_threshold, kd, params, mode)?;
        outage_total += w * p_d;
        success += success_prob_given(p_s, kd, params, mode)?;
    }
    let spectral_efficiency = ergodic_log_capacity(gamma_bar, params.fading_m)?;
    let capacity = capacity_from_success(params, success, spectral_efficiency);
    Ok(CapacityBreakdown {
        false_alarm: p_s,
        outage: outage_total.clamp(0.0, 1.0),
        success: success.clamp(0.0, 1.0),
        spectral_efficiency,
        capacity,
    })
}

/// M·B·(Σ p_suc)·𝔼[log₂(1+γ)].
pub fn capacity_from_success(params: &SystemParams, success: f64, spectral_efficiency: f64) -> f64 {
    params.m_sus as f64 * params.bandwidth * success * spectral_efficiency
}

/// Total capacity of all SUs in bits/s.
pub fn total_capacity(params: &SystemParams, gamma_bar: f64, mode: OracleMode) -> Result<f64> {
    capacity_breakdown(params, gamma_bar, mode).map(|b| b.capacity)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn base() -> SystemParams {
        SystemParams::default()
    }

    /// Independent closed form for m = 1, α = 1, one colliding attacker:
    /// Pr(P_J X + P_p Y ≥ T) with X, Y ~ Exp(1).
    fn exp_pair_survival(t: f64, pj: f64, pp: f64) -> f64 {
        let a = t / pj;
        let r = pj / pp;
        let inner = (1.0 - (-a * (1.0 - r)).exp()) / (1.0 - r);
        1.0 - ((1.0 - (-a).exp()) - (-t / pp).exp() * inner)
    }

    #[test]
    fn collision_examples() {
        let p = SystemParams {
            k_attackers: 2,
            n_frequencies: 2,
            l_modes: 8,
            ..base()
        };
        assert!(close(collision_pmf(2, &p).unwrap(), 0.00390625, 1e-15));
        assert!(close(collision_pmf(0, &p).unwrap(), 0.87890625, 1e-15));
        let s: f64 = (0..=2).map(|k| collision_pmf(k, &p).unwrap()).sum();
        assert!(close(s, 1.0, 1e-15));
        assert!(collision_pmf(3, &p).is_err());
    }

    #[test]
    fn collision_single_channel() {
        let p = SystemParams {
            n_frequencies: 1,
            l_modes: 1,
            k_attackers: 3,
            ..base()
        };
        assert_eq!(collision_pmf(3, &p).unwrap(), 1.0);
        assert_eq!(collision_pmf(1, &p).unwrap(), 0.0);
    }

    #[test]
    fn collision_normalization_grid() {
        for k in [0u32, 1, 5, 17, 64] {
            for (n, l) in [(1u32, 1u32), (2, 1), (2, 8), (8, 8)] {
                let p = SystemParams {
                    n_frequencies: n,
                    l_modes: l,
                    k_attackers: k,
                    ..base()
                };
                let s: f64 = (0..=k).map(|j| collision_pmf(j, &p).unwrap()).sum();
                assert!(close(s, 1.0, 1e-12), "K={k} NL={}", n * l);
            }
        }
    }

    #[test]
    fn no_pu_examples() {
        let p = base();
        assert!(close(
            false_alarm_no_pu(0.1, 1, &p).unwrap(),
            (-1.0f64).exp(),
            1e-14
        ));
        assert_eq!(false_alarm_no_pu(0.1, 0, &p).unwrap(), 0.0);
        let mut prev = 1.0;
        for eps in [0.1, 0.5, 1.0, 5.0, 20.0, 100.0] {
            let v = false_alarm_no_pu(eps, 1, &p).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 1e-40);
    }

    #[test]
    fn no_pu_matches_quadrature() {
        for m in [1, 2, 3] {
            for ks in [1, 2, 5] {
                for eps in [0.05, 0.1, 0.7] {
                    let p = SystemParams {
                        fading_m: m,
                        ..base()
                    };
                    let a = false_alarm_no_pu(eps, ks, &p).unwrap();
                    let b = false_alarm_no_pu_numeric(eps, ks, &p).unwrap();
                    assert!(close(a, b, 1e-8), "m={m} ks={ks} eps={eps}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn with_pu_numeric_examples() {
        let p = base();
        let oracle = exp_pair_survival(0.1, 0.1, 1.0);
        assert!(close(oracle, 0.96450, 5e-6));
        let v = false_alarm_with_pu_numeric(0.1, 1, &p).unwrap();
        assert!(close(v, oracle, 1e-8));
        assert!(close(
            false_alarm_with_pu_numeric(0.1, 0, &p).unwrap(),
            (-0.1f64).exp(),
            1e-9
        ));
        assert!(false_alarm_with_pu_numeric(1e-9, 2, &p).unwrap() > 1.0 - 1e-8);
    }

    #[test]
    fn with_pu_numeric_other_powers() {
        for (pj, pp) in [(0.1, 2.0), (0.5, 1.0), (0.3, 0.7)] {
            let p = SystemParams {
                attacker_power: pj,
                pu_power: pp,
                ..base()
            };
            for eps in [0.05, 0.2, 1.0] {
                let v = false_alarm_with_pu_numeric(eps, 1, &p).unwrap();
                assert!(close(v, exp_pair_survival(eps, pj, pp), 1e-8));
            }
        }
    }

    #[test]
    fn with_pu_closed_audit() {
        let p = base();
        // for m = 1 every correction summand carries 1/Γ(−1) = 0
        let c = false_alarm_with_pu_closed(0.1, 1, &p).unwrap();
        assert!(close(c, false_alarm_no_pu(0.1, 1, &p).unwrap(), 1e-14));
        let r = false_alarm_with_pu_report(0.1, 1, &p).unwrap();
        assert!(r.discrepancy().unwrap() > 0.5);

        let eq = SystemParams {
            attacker_power: 1.0,
            pu_power: 1.0,
            ..base()
        };
        assert!(matches!(
            false_alarm_with_pu_closed(0.1, 1, &eq),
            Err(Error::ClosedFormUnavailable(_))
        ));
        let r = false_alarm_with_pu_report(0.1, 1, &eq).unwrap();
        assert!(!r.is_available());
        assert!(r.discrepancy().is_none());
    }

    #[test]
    fn with_pu_closed_large_pu_power_limit() {
        for m in [1, 2, 3] {
            let p = SystemParams {
                fading_m: m,
                pu_power: 1e12,
                ..base()
            };
            let c = false_alarm_with_pu_closed(0.1, 2, &p).unwrap();
            let no_pu = false_alarm_no_pu(0.1, 2, &p).unwrap();
            assert!(close(c, no_pu, 1e-6), "m={m}: {c} vs {no_pu}");
        }
    }

    #[test]
    fn avg_false_alarm_corners() {
        let p = SystemParams {
            k_attackers: 0,
            ..base()
        };
        let v = avg_false_alarm(0.1, &p, OracleMode::Numeric).unwrap();
        let pu = false_alarm_with_pu_numeric(0.1, 0, &p).unwrap();
        assert!(close(v, pu / 8.0, 1e-14));

        let p = SystemParams {
            l_modes: 1,
            ..base()
        };
        let v = avg_false_alarm(0.1, &p, OracleMode::Numeric).unwrap();
        let direct: f64 = (0..=2)
            .map(|k| {
                collision_pmf(k, &p).unwrap() * false_alarm_with_pu_numeric(0.1, k, &p).unwrap()
            })
            .sum();
        assert!(close(v, direct, 1e-14));
    }

    #[test]
    fn avg_false_alarm_closed_mode_rejects_singular() {
        let p = SystemParams {
            attacker_power: 1.0,
            pu_power: 1.0,
            ..base()
        };
        assert!(matches!(
            avg_false_alarm(0.1, &p, OracleMode::ClosedForm),
            Err(Error::ClosedFormUnavailable(_))
        ));
        assert!(avg_false_alarm(0.1, &p, OracleMode::Numeric).is_ok());
    }

    #[test]
    fn outage_examples() {
        let p = base();
        assert!(close(
            outage_numeric(0.3, 0, &p).unwrap(),
            1.0 - (-0.3f64).exp(),
            1e-9
        ));
        let direct = 1.0 - (-0.3f64).exp() * 1.03f64.powi(-2);
        assert!(close(direct, 0.3017082, 1e-6));
        assert!(close(outage_numeric(0.3, 2, &p).unwrap(), direct, 1e-8));
        assert!(close(outage_closed(0.3, 2, &p).unwrap(), direct, 1e-14));
        assert!(close(outage_closed(0.3, 0, &p).unwrap(), 0.2591818, 1e-7));
        assert!(outage_numeric(1e-9, 2, &p).unwrap() < 1e-8);
        assert!(outage_closed(1e6, 0, &p).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn outage_rayleigh_consistency() {
        let p = base();
        for kd in [0, 1, 2, 8] {
            for eta in [0.1, 0.3, 2.0] {
                let closed = outage_closed(eta, kd, &p).unwrap();
                assert!(close(closed, outage_rayleigh(eta, kd, &p).unwrap(), 1e-9));
                assert!(close(closed, outage_numeric(eta, kd, &p).unwrap(), 1e-6));
            }
        }
        for eta in [0.1, 0.3, 2.0] {
            let r = outage_rayleigh(eta, 0, &p).unwrap();
            let z = outage_zero_attackers(eta, &p).unwrap();
            assert!(close(r, z, 1e-12));
        }
    }

    #[test]
    fn outage_zero_attackers_nakagami() {
        for m in [1, 2, 4] {
            let p = SystemParams {
                fading_m: m,
                ..base()
            };
            let c = outage_closed(0.3, 0, &p).unwrap();
            let n = outage_numeric(0.3, 0, &p).unwrap();
            assert!(close(c, n, 1e-6), "m={m}");
        }
    }

    #[test]
    fn outage_double_sum_is_audited() {
        let p = SystemParams {
            fading_m: 2,
            ..base()
        };
        let r = outage_report(0.3, 2, &p).unwrap();
        assert!(r.is_available());
        assert!(r.numeric_oracle > 0.0 && r.numeric_oracle < 1.0);
        assert!(r.discrepancy().is_some());
    }

    #[test]
    fn outage_monotone() {
        let p = SystemParams {
            fading_m: 2,
            ..base()
        };
        let mut prev = 0.0;
        for eta in [0.05, 0.1, 0.3, 1.0, 3.0] {
            let v = outage_numeric(eta, 2, &p).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        let mut prev = 0.0;
        for kd in 0..6 {
            let v = outage_numeric(0.3, kd, &p).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        let mut prev = 1.0;
        for pc in [0.5, 1.0, 2.0, 10.0] {
            let q = SystemParams {
                su_power: pc,
                ..p.clone()
            };
            let v = outage_numeric(0.3, 2, &q).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn success_examples() {
        let p = SystemParams {
            k_attackers: 0,
            ..base()
        };
        let p_s = avg_false_alarm(0.1, &p, OracleMode::Numeric).unwrap();
        let p_d = outage_numeric(0.3, 0, &p).unwrap();
        let v = success_prob(0, &p, OracleMode::Numeric).unwrap();
        assert!(close(v, (1.0 - p_s) * (1.0 - p_d), 1e-14));

        let p = base();
        let s: f64 = (0..=2)
            .map(|k| success_prob(k, &p, OracleMode::Numeric).unwrap())
            .sum();
        assert!(s <= 1.0);
        assert!(success_prob(3, &p, OracleMode::Numeric).is_err());
    }

    /// E₁(x) by its convergent power series; independent of the quadrature.
    fn exp_integral_e1(x: f64) -> f64 {
        const EULER: f64 = 0.577_215_664_901_532_9;
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..200 {
            term *= -x / k as f64;
            sum += term / k as f64;
        }
        -EULER - x.ln() - sum
    }

    #[test]
    fn ergodic_examples() {
        let oracle = std::f64::consts::E * exp_integral_e1(1.0) / std::f64::consts::LN_2;
        assert!(close(ergodic_log_capacity(1.0, 1).unwrap(), oracle, 1e-9));
        for gb in [0.2, 3.0, 10.0] {
            let o = (1.0f64 / gb).exp() * exp_integral_e1(1.0 / gb) / std::f64::consts::LN_2;
            assert!(close(ergodic_log_capacity(gb, 1).unwrap(), o, 1e-8));
        }
        assert!(ergodic_log_capacity(1e-9, 1).unwrap() < 1e-8);
        let v = ergodic_log_capacity(10.0, 4).unwrap();
        let bound = 11f64.log2();
        assert!(v > 0.5 * bound && v < bound);
    }

    #[test]
    fn ergodic_jensen() {
        for gb in [0.5, 1.0, 10.0, 100.0] {
            let bound = (1.0f64 + gb).log2();
            for m in [1, 2, 8] {
                assert!(ergodic_log_capacity(gb, m).unwrap() <= bound);
            }
            let tight = ergodic_log_capacity(gb, 64).unwrap();
            assert!((bound - tight) / bound < 0.02);
        }
    }

    #[test]
    fn capacity_examples() {
        let p = SystemParams {
            k_attackers: 0,
            m_sus: 4,
            bandwidth: 1e7,
            ..base()
        };
        let se = ergodic_log_capacity(1.0, 1).unwrap();
        let ideal = capacity_from_success(&p, 1.0, se);
        assert!(close(ideal / 1e7, 4.0 * 0.8603474, 1e-6));
        let none = SystemParams {
            m_sus: 0,
            ..p.clone()
        };
        assert_eq!(
            total_capacity(&none, 1.0, OracleMode::Numeric).unwrap(),
            0.0
        );
    }

    #[test]
    fn more_modes_more_capacity() {
        for gb in [0.5, 1.0, 10.0, 100.0] {
            let c1 = total_capacity(
                &SystemParams {
                    l_modes: 1,
                    ..base()
                },
                gb,
                OracleMode::Numeric,
            )
            .unwrap();
            let c8 = total_capacity(
                &SystemParams {
                    l_modes: 8,
                    ..base()
                },
                gb,
                OracleMode::Numeric,
            )
            .unwrap();
            assert!(c8 >= c1);
        }
    }

    #[test]
    fn avg_false_alarm_nonincreasing_in_modes() {
        let mut prev = 1.0;
        for l in [1, 2, 4, 8, 16] {
            let p = SystemParams {
                l_modes: l,
                ..base()
            };
            let v = avg_false_alarm(0.1, &p, OracleMode::Numeric).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }
}
