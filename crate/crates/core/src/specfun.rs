//! Special functions and adaptive quadrature.
//!
//! Everything here is pure and allocation-light; the closed-form
//! probabilities and their numeric oracles in [`crate::analytics`] are built
//! on these primitives.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{invalid, Error, Result};

const MAX_ITER: usize = 100_000;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Tolerances and subdivision budget for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(invalid("abs_tol", "must be > 0"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(invalid("rel_tol", "must be > 0"));
        }
        if self.max_subdivisions < 1 {
            return Err(invalid("max_subdivisions", "must be >= 1"));
        }
        Ok(())
    }
}

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn ln_gamma_unchecked(a: f64) -> f64 {
    if a < 0.5 {
        // reflection: Γ(a)Γ(1−a) = π / sin(πa)
        (std::f64::consts::PI / (std::f64::consts::PI * a).sin()).ln() - ln_gamma_unchecked(1.0 - a)
    } else {
        let x = a - 1.0;
        let mut acc = LANCZOS[0];
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
    }
}

/// Natural logarithm of Γ(a) for a > 0.
pub fn log_gamma(a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires a > 0, got {a}")));
    }
    Ok(ln_gamma_unchecked(a))
}

/// Γ(a) for a > 0.
pub fn gamma(a: f64) -> Result<f64> {
    log_gamma(a).map(f64::exp)
}

/// 1/Γ(x) on the whole real line, with 1/Γ(x) = 0 at the poles
/// x ∈ {0, −1, −2, …}.
pub fn reciprocal_gamma(x: f64) -> f64 {
    if x <= 0.0 && x.fract() == 0.0 {
        return 0.0;
    }
    if x > 0.0 {
        return (-ln_gamma_unchecked(x)).exp();
    }
    // Γ(x) = π / (sin(πx) Γ(1−x))
    (std::f64::consts::PI * x).sin() * (ln_gamma_unchecked(1.0 - x)).exp() / std::f64::consts::PI
}

fn check_incgamma_args(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!(
            "incomplete gamma requires a > 0, got {a}"
        )));
    }
    if !(b >= 0.0) {
        return Err(Error::Domain(format!(
            "incomplete gamma requires b >= 0, got {b}"
        )));
    }
    Ok(())
}

/// Lower series for P(a, b); converges quickly for b < a + 1.
fn lower_series(a: f64, b: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= b / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    (sum.ln() - b + a * b.ln() - ln_gamma_unchecked(a)).exp()
}

/// Modified Lentz continued fraction for Q(a, b); used for b >= a + 1.
fn upper_fraction(a: f64, b: f64) -> f64 {
    let mut bb = b + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / bb;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        bb += 2.0;
        d = an * d + bb;
        if d.abs() < TINY {
            d = TINY;
        }
        c = bb + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    (-b + a * b.ln() - ln_gamma_unchecked(a)).exp() * h
}

/// Regularized pair (P(a,b), Q(a,b)).
fn regularized_pair(a: f64, b: f64) -> Result<(f64, f64)> {
    check_incgamma_args(a, b)?;
    if b == 0.0 {
        return Ok((0.0, 1.0));
    }
    if b.is_infinite() {
        return Ok((1.0, 0.0));
    }
    if b < a + 1.0 {
        let p = lower_series(a, b).clamp(0.0, 1.0);
        Ok((p, 1.0 - p))
    } else {
        let q = upper_fraction(a, b).clamp(0.0, 1.0);
        Ok((1.0 - q, q))
    }
}

/// Regularized lower incomplete gamma P(a, b) = G(a, b) / Γ(a).
pub fn regularized_lower_gamma(a: f64, b: f64) -> Result<f64> {
    regularized_pair(a, b).map(|(p, _)| p)
}

/// Regularized upper incomplete gamma Q(a, b) = 1 − P(a, b).
///
/// Computed directly on the continued-fraction side so that small tails
/// keep their relative precision.
pub fn regularized_upper_gamma(a: f64, b: f64) -> Result<f64> {
    regularized_pair(a, b).map(|(_, q)| q)
}

/// Unregularized lower incomplete gamma G(a, b) = ∫₀ᵇ z^{a−1} e^{−z} dz.
pub fn lower_incomplete_gamma(a: f64, b: f64) -> Result<f64> {
    let p = regularized_lower_gamma(a, b)?;
    if p == 0.0 {
        return Ok(0.0);
    }
    Ok((p.ln() + ln_gamma_unchecked(a)).exp())
}

// Gauss–Kronrod 21-point rule (10-point Gauss embedded).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_600_451_450,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];
// Weights of the 10-point Gauss rule on the odd Kronrod nodes XGK[1], XGK[3], ...
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F>(f: &mut F, lo: f64, hi: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center)?;
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx)? + f(center + dx)?;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    if !value.is_finite() {
        return Err(Error::Domain(format!(
            "integrand is not finite on [{lo}, {hi}]"
        )));
    }
    Ok(Segment {
        lo,
        hi,
        value,
        error,
    })
}

/// Globally adaptive Gauss–Kronrod on a finite interval with a fallible
/// integrand.
pub fn try_integrate_finite<F>(mut f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    spec.validate()?;
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!(
            "integration bounds must be finite with lo <= hi, got [{lo}, {hi}]"
        )));
    }
    if lo == hi {
        return Ok(0.0);
    }

    let first = kronrod21(&mut f, lo, hi)?;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);

    loop {
        if total_err <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok(total);
        }
        if heap.len() >= spec.max_subdivisions {
            return Err(Error::Convergence {
                subdivisions: heap.len(),
                estimate: total,
                error: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // interval can no longer be split in floating point
            return Err(Error::Convergence {
                subdivisions: heap.len() + 1,
                estimate: total,
                error: total_err,
            });
        }
        let left = kronrod21(&mut f, worst.lo, mid)?;
        let right = kronrod21(&mut f, mid, worst.hi)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // refresh the running sums to avoid drift from repeated updates
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
}

/// ∫_lo^hi f(z) dz by adaptive Gauss–Kronrod.
///
/// Nodes never touch the endpoints, so an integrable endpoint singularity
/// does not produce a non-finite evaluation, but convergence is slow there;
/// prefer [`integrate_finite_singular`] when the singular power is known.
pub fn integrate_finite<F>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    try_integrate_finite(|z| Ok(f(z)), lo, hi, spec)
}

/// Fallible form of [`integrate_finite_singular`].
pub fn try_integrate_finite_singular<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    power: f64,
    spec: &QuadratureSpec,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(power > 0.0) {
        return Err(Error::Domain(format!(
            "endpoint power must be > 0, got {power}"
        )));
    }
    if power >= 1.0 {
        return try_integrate_finite(f, lo, hi, spec);
    }
    if !(lo <= hi) {
        return Err(Error::Domain(format!(
            "integration bounds must satisfy lo <= hi, got [{lo}, {hi}]"
        )));
    }
    // z = lo + w t^{1/p}; the Jacobian cancels the (z − lo)^{p−1} factor.
    let width = hi - lo;
    let q = 1.0 / power;
    try_integrate_finite(
        |t| {
            if t <= 0.0 {
                return Ok(0.0);
            }
            let z = lo + width * t.powf(q);
            Ok(f(z)? * width * q * t.powf(q - 1.0))
        },
        0.0,
        1.0,
        spec,
    )
}

/// ∫_lo^hi f(z) dz where f(z) behaves like (z − lo)^{power−1} near `lo`.
pub fn integrate_finite_singular<F>(
    f: F,
    lo: f64,
    hi: f64,
    power: f64,
    spec: &QuadratureSpec,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    try_integrate_finite_singular(|z| Ok(f(z)), lo, hi, power, spec)
}

/// Fallible form of [`integrate_semi_infinite`].
pub fn try_integrate_semi_infinite<F>(mut f: F, lo: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !lo.is_finite() {
        return Err(Error::Domain(format!(
            "lower bound must be finite, got {lo}"
        )));
    }
    // z = lo + t / (1 − t), t ∈ [0, 1)
    try_integrate_finite(
        |t| {
            let s = 1.0 - t;
            if s <= 0.0 {
                return Ok(0.0);
            }
            let z = lo + t / s;
            let v = f(z)?;
            if v == 0.0 {
                return Ok(0.0);
            }
            Ok(v / (s * s))
        },
        0.0,
        1.0,
        spec,
    )
}

/// ∫_lo^∞ f(z) dz for integrands with an exponentially decaying tail.
pub fn integrate_semi_infinite<F>(f: F, lo: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    try_integrate_semi_infinite(|z| Ok(f(z)), lo, spec)
}
