//! Nakagami-m fading model: power-gain densities, samplers, and the
//! instantaneous SINR of the sensing and transmission phases.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{invalid, Error, Result};
use crate::specfun::log_gamma;

/// Scalar parameters of the hopping system.
///
/// The number of primary users is not part of the model: no probability
/// depends on it.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// N, licensed carrier frequencies.
    pub n_frequencies: u32,
    /// L, OAM modes per frequency. L = 1 is conventional frequency hopping.
    pub l_modes: u32,
    /// M, cooperating secondary users.
    pub m_sus: u32,
    /// Total malicious attackers.
    pub k_attackers: u32,
    /// Nakagami shape m (integer).
    pub fading_m: u32,
    /// α, mean of every squared channel gain.
    pub fading_mean: f64,
    /// σ² in W.
    pub noise_power: f64,
    /// P_J, per-attacker transmit power in W.
    pub attacker_power: f64,
    /// P_p, primary-user transmit power in W.
    pub pu_power: f64,
    /// P_c, secondary-user transmit power in W.
    pub su_power: f64,
    /// B in Hz.
    pub bandwidth: f64,
    /// ε, sensing SINR threshold.
    pub sensing_threshold: f64,
    /// η, transmission outage SINR threshold.
    pub outage_threshold: f64,
    /// ρ, ON→OFF transition probability of a licensed channel.
    pub on_to_off: f64,
    /// ϱ, OFF→ON transition probability.
    pub off_to_on: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            n_frequencies: 2,
            l_modes: 8,
            m_sus: 4,
            k_attackers: 2,
            fading_m: 1,
            fading_mean: 1.0,
            noise_power: 1.0,
            attacker_power: 0.1,
            pu_power: 1.0,
            su_power: 1.0,
            bandwidth: 1e7,
            sensing_threshold: 0.1,
            outage_threshold: 0.3,
            on_to_off: 0.1,
            off_to_on: 0.1,
        }
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be finite and > 0, got {v}")))
    }
}

fn probability(field: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(field, format!("must lie in [0, 1], got {v}")))
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_frequencies < 1 {
            return Err(invalid("N", "must be >= 1"));
        }
        if self.l_modes < 1 {
            return Err(invalid("L", "must be >= 1"));
        }
        if self.fading_m < 1 {
            return Err(invalid("m", "must be an integer >= 1"));
        }
        positive("alpha", self.fading_mean)?;
        positive("sigma2", self.noise_power)?;
        // P_J = 0 is the interference-free limit and stays admissible.
        if !(self.attacker_power >= 0.0 && self.attacker_power.is_finite()) {
            return Err(invalid(
                "P_J",
                format!("must be finite and >= 0, got {}", self.attacker_power),
            ));
        }
        positive("P_p", self.pu_power)?;
        positive("P_c", self.su_power)?;
        positive("B", self.bandwidth)?;
        positive("epsilon", self.sensing_threshold)?;
        positive("eta", self.outage_threshold)?;
        probability("rho", self.on_to_off)?;
        probability("varrho", self.off_to_on)?;
        Ok(())
    }

    /// N·L logical channels.
    pub fn channels(&self) -> u64 {
        self.n_frequencies as u64 * self.l_modes as u64
    }

    /// Per-attacker probability of landing on a given SU's channel, 1/(NL).
    pub fn collision_probability(&self) -> f64 {
        1.0 / self.channels() as f64
    }
}

/// Squared channel gains realized for one phase of one slot.
///
/// `attacker_gains` holds only attackers that survive mode and frequency
/// filtering, i.e. those on the SU's exact (frequency, mode) cell.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FadingDraw {
    pub attacker_gains: Vec<f64>,
    pub pu_gain: f64,
    pub su_gain: f64,
}

impl FadingDraw {
    pub fn attacker_sum(&self) -> f64 {
        self.attacker_gains.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v >= 0.0 && v.is_finite();
        if self.attacker_gains.iter().all(|&g| ok(g)) && ok(self.pu_gain) && ok(self.su_gain) {
            Ok(())
        } else {
            Err(Error::Domain("fading gains must be finite and >= 0".into()))
        }
    }
}

fn gamma_density(x: f64, shape: f64, mean: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!(
            "density argument must be >= 0, got {x}"
        )));
    }
    if !(mean > 0.0) {
        return Err(Error::Domain(format!("mean must be > 0, got {mean}")));
    }
    let rate = shape / mean;
    if x == 0.0 {
        return Ok(match shape.partial_cmp(&1.0) {
            Some(std::cmp::Ordering::Equal) => rate,
            Some(std::cmp::Ordering::Greater) => 0.0,
            _ => f64::INFINITY,
        });
    }
    let ln = shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - log_gamma(shape)?;
    Ok(ln.exp())
}

/// Density of one squared Nakagami-m gain: Gamma(shape m, mean α).
pub fn power_gain_pdf(x: f64, m: u32, alpha: f64) -> Result<f64> {
    if m < 1 {
        return Err(Error::Domain("fading shape m must be >= 1".into()));
    }
    gamma_density(x, m as f64, alpha)
}

/// Density of the sum of `count` i.i.d. squared gains: Gamma(shape m·count, mean count·α).
pub fn power_sum_pdf(h: f64, count: u32, m: u32, alpha: f64) -> Result<f64> {
    if count < 1 || m < 1 {
        return Err(Error::Domain("count and m must both be >= 1".into()));
    }
    let shape = m as f64 * count as f64;
    gamma_density(h, shape, count as f64 * alpha)
}

/// Draw one squared gain as the sum of m exponentials of mean α/m.
pub fn sample_power_gain<R: Rng + ?Sized>(rng: &mut R, m: u32, alpha: f64) -> f64 {
    let scale = alpha / m as f64;
    let mut acc = 0.0;
    for _ in 0..m {
        let e: f64 = Exp1.sample(rng);
        acc += e;
    }
    acc * scale
}

/// γ_s = (P_J Σ h_k² + [PU present] h_p² P_p) / σ².
pub fn sensing_sinr(draw: &FadingDraw, pu_present: bool, params: &SystemParams) -> f64 {
    let pu = if pu_present {
        draw.pu_gain * params.pu_power
    } else {
        0.0
    };
    (params.attacker_power * draw.attacker_sum() + pu) / params.noise_power
}

/// γ_d = P_c h_s² / (P_J Σ h_k² + σ²).
pub fn transmission_sinr(draw: &FadingDraw, params: &SystemParams) -> f64 {
    params.su_power * draw.su_gain
        / (params.attacker_power * draw.attacker_sum() + params.noise_power)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate_finite, integrate_semi_infinite, QuadratureSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn gain_pdf_examples() {
        assert!(close(
            power_gain_pdf(0.5, 1, 1.0).unwrap(),
            (-0.5f64).exp(),
            1e-14
        ));
        assert_eq!(power_gain_pdf(0.0, 2, 1.0).unwrap(), 0.0);
        assert!(close(
            power_gain_pdf(1.0, 2, 2.0).unwrap(),
            (-1.0f64).exp(),
            1e-14
        ));
        assert!(power_gain_pdf(-0.1, 1, 1.0).is_err());
    }

    #[test]
    fn sum_pdf_examples() {
        for &h in &[0.0, 0.2, 1.0, 3.7] {
            for m in 1..4 {
                let a = power_sum_pdf(h, 1, m, 1.5).unwrap();
                let b = power_gain_pdf(h, m, 1.5).unwrap();
                assert!(close(a, b, 1e-14));
            }
        }
        assert!(close(
            power_sum_pdf(1.0, 2, 1, 1.0).unwrap(),
            (-1.0f64).exp(),
            1e-14
        ));
        let spec = QuadratureSpec::default();
        for (count, m, alpha) in [(1, 1, 1.0), (2, 3, 0.5), (5, 2, 2.0)] {
            let total =
                integrate_semi_infinite(|h| power_sum_pdf(h, count, m, alpha).unwrap(), 0.0, &spec)
                    .unwrap();
            assert!(close(total, 1.0, 1e-8));
        }
        assert!(power_sum_pdf(-1.0, 2, 1, 1.0).is_err());
    }

    #[test]
    fn sum_pdf_is_convolution() {
        let spec = QuadratureSpec::default();
        for x in [0.5, 1.0, 2.0] {
            let conv = integrate_finite(
                |y| power_gain_pdf(y, 1, 1.0).unwrap() * power_gain_pdf(x - y, 1, 1.0).unwrap(),
                0.0,
                x,
                &spec,
            )
            .unwrap();
            assert!(close(conv, power_sum_pdf(x, 2, 1, 1.0).unwrap(), 2e-4));
        }
    }

    #[test]
    fn sampler_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| sample_power_gain(&mut rng, 1, 1.0))
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        assert!(close(mean, 1.0, 0.004));
        let below = draws.iter().filter(|&&x| x <= 1.0).count() as f64 / n as f64;
        assert!(close(below, 1.0 - (-1.0f64).exp(), 0.002));

        let draws: Vec<f64> = (0..n)
            .map(|_| sample_power_gain(&mut rng, 2, 1.0))
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(close(var, 0.5, 0.01));
    }

    #[test]
    fn sensing_sinr_examples() {
        let p = SystemParams {
            attacker_power: 0.1,
            pu_power: 1.0,
            noise_power: 1.0,
            ..SystemParams::default()
        };
        let d = FadingDraw {
            attacker_gains: vec![0.5, 0.3],
            pu_gain: 0.2,
            su_gain: 0.0,
        };
        assert!(close(sensing_sinr(&d, true, &p), 0.28, 1e-15));
        let empty = FadingDraw::default();
        assert_eq!(sensing_sinr(&empty, false, &p), 0.0);
        let p2 = SystemParams {
            noise_power: 0.5,
            ..p.clone()
        };
        let d2 = FadingDraw {
            attacker_gains: vec![1.0],
            pu_gain: 0.0,
            su_gain: 0.0,
        };
        assert!(close(sensing_sinr(&d2, true, &p2), 0.2, 1e-15));
    }

    #[test]
    fn transmission_sinr_examples() {
        let p = SystemParams::default();
        let d = FadingDraw {
            attacker_gains: vec![0.5, 0.3],
            pu_gain: 0.0,
            su_gain: 0.4,
        };
        assert!(close(transmission_sinr(&d, &p), 0.4 / 1.08, 1e-15));
        let d0 = FadingDraw {
            su_gain: 0.0,
            ..d.clone()
        };
        assert_eq!(transmission_sinr(&d0, &p), 0.0);
        let d1 = FadingDraw {
            attacker_gains: vec![],
            pu_gain: 0.0,
            su_gain: 1.0,
        };
        assert!(close(transmission_sinr(&d1, &p), 1.0, 1e-15));
    }

    #[test]
    fn params_validation() {
        assert!(SystemParams::default().validate().is_ok());
        let bad = SystemParams {
            l_modes: 0,
            ..SystemParams::default()
        };
        assert!(matches!(
            bad.validate(),
            Err(Error::InvalidParameter { field: "L", .. })
        ));
        let bad = SystemParams {
            on_to_off: 1.5,
            ..SystemParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = SystemParams {
            noise_power: 0.0,
            ..SystemParams::default()
        };
        assert!(bad.validate().is_err());
    }
}
