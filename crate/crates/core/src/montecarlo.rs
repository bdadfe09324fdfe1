//! Seeded slot-level simulation of the hopping system.
//!
//! Each slot has a sensing phase and a transmission phase. In each phase
//! every attacker independently picks one of the N·L cells, and it jams a
//! secondary user only when it picks that user's exact (frequency, mode)
//! cell. Primary users transmit on mode 0 only, so they are visible to a
//! SU sensing a zero-mode cell on an occupied frequency.
//!
//! Trials are split into fixed blocks of [`BLOCK_SIZE`]. Block `b` draws
//! from ChaCha8 stream `b` of the user seed, and block tallies are merged
//! in block order. Results are therefore bit-identical for any thread
//! count. The primary-user ON-OFF chain is sequential across slots. It uses
//! its own stream, consumed at fixed word offsets per slot, so each block
//! can replay its section of the chain independently.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{
    sample_power_gain, sensing_sinr, transmission_sinr, FadingDraw, SystemParams,
};
use crate::error::{invalid, Result};

/// Trials per independently seeded block.
pub const BLOCK_SIZE: u64 = 1 << 14;

const PU_STREAM: u64 = u64::MAX;
/// z-score of the reported confidence half-widths.
pub const CONFIDENCE_Z: f64 = 3.0;

/// One entity's cell on the N × L grid.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HopAssignment {
    pub frequency: u32,
    pub mode: u32,
}

impl HopAssignment {
    fn from_cell(cell: u64, l_modes: u32) -> Self {
        Self {
            frequency: (cell / l_modes as u64) as u32,
            mode: (cell % l_modes as u64) as u32,
        }
    }
}

/// Uniform hop over the N·L cells.
pub fn generate_hop<R: Rng + ?Sized>(rng: &mut R, n: u32, l: u32) -> HopAssignment {
    let cell = rng.random_range(0..n as u64 * l as u64);
    HopAssignment::from_cell(cell, l)
}

/// Initial occupancy of the licensed frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PuInit {
    AllOn,
    AllOff,
    /// Each frequency ON with the chain's stationary probability ϱ/(ρ+ϱ).
    #[default]
    Stationary,
}

fn unit_f64(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Two-state Markov occupancy of each licensed frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct PuChannelState {
    pub occupied: Vec<bool>,
    pub on_to_off: f64,
    pub off_to_on: f64,
}

impl PuChannelState {
    pub fn new<R: RngCore + ?Sized>(
        rng: &mut R,
        n: u32,
        init: PuInit,
        on_to_off: f64,
        off_to_on: f64,
    ) -> Self {
        let stationary_on = if on_to_off + off_to_on > 0.0 {
            off_to_on / (on_to_off + off_to_on)
        } else {
            0.5
        };
        // always consume one word per frequency so the slot layout is fixed
        let occupied = (0..n)
            .map(|_| {
                let u = unit_f64(rng.next_u64());
                match init {
                    PuInit::AllOn => true,
                    PuInit::AllOff => false,
                    PuInit::Stationary => u < stationary_on,
                }
            })
            .collect();
        Self {
            occupied,
            on_to_off,
            off_to_on,
        }
    }

    /// Advance one slot: ON→OFF with probability ρ, OFF→ON with probability ϱ.
    pub fn step<R: RngCore + ?Sized>(&mut self, rng: &mut R) {
        for busy in self.occupied.iter_mut() {
            let u = unit_f64(rng.next_u64());
            *busy = if *busy {
                u >= self.on_to_off
            } else {
                u < self.off_to_on
            };
        }
    }

    pub fn is_on(&self, frequency: u32) -> bool {
        self.occupied[frequency as usize]
    }
}

/// Everything that happened to one SU in one slot.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SlotTrace {
    pub slot: u64,
    pub su_index: u32,
    pub su_assignment: HopAssignment,
    pub sensing_attackers: Vec<HopAssignment>,
    pub transmission_attackers: Vec<HopAssignment>,
    pub pu_present: bool,
    /// K_s.
    pub sensing_collisions: u32,
    /// K_d.
    pub transmission_collisions: u32,
    pub sensing_sinr: f64,
    /// NaN when the SU deferred.
    pub transmission_sinr: f64,
    pub sensed_busy: bool,
    pub outage: bool,
    pub success: bool,
    /// Bits/s delivered in this slot (0 unless `success`).
    pub throughput: f64,
}

/// Point estimate with a 3σ half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub half_width: f64,
    /// Events in the denominator of `value`.
    pub samples: u64,
}

impl Estimate {
    fn binomial(hits: u64, events: u64, effective: u64) -> Self {
        if events == 0 {
            return Self {
                value: f64::NAN,
                half_width: f64::NAN,
                samples: 0,
            };
        }
        let p = hits as f64 / events as f64;
        let n = effective.min(events).max(1) as f64;
        Self {
            value: p,
            half_width: CONFIDENCE_Z * (p * (1.0 - p) / n).sqrt(),
            samples: events,
        }
    }

    fn mean(sum: f64, sum_sq: f64, n: u64) -> Self {
        if n == 0 {
            return Self {
                value: f64::NAN,
                half_width: f64::NAN,
                samples: 0,
            };
        }
        let nf = n as f64;
        let mean = sum / nf;
        let var = if n > 1 {
            ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        Self {
            value: mean,
            half_width: CONFIDENCE_Z * (var / nf).sqrt(),
            samples: n,
        }
    }
}

/// Empirical results of a simulation run.
///
/// Half-widths use the number of slots (or trials) as the sample size even
/// when several SUs share a slot; SUs in the same slot see correlated
/// attacker hops, and one draw per slot keeps the interval conservative.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSummary {
    /// Slots (protocol) or trials (single-phase runs).
    pub slots: u64,
    /// SU-slot samples, `slots × SUs per slot`.
    pub su_samples: u64,
    /// Fraction of sensing attempts that declared the channel busy.
    pub false_alarm: Estimate,
    /// Outage among transmissions, unconditional on K_d.
    pub outage: Estimate,
    pub outage_by_collisions: BTreeMap<u32, Estimate>,
    /// Empirical K_s distribution.
    pub sensing_collision_pmf: BTreeMap<u32, Estimate>,
    /// Empirical K_d distribution.
    pub transmission_collision_pmf: BTreeMap<u32, Estimate>,
    /// Fraction of SU-slots that sensed idle and transmitted without outage.
    pub success: Estimate,
    /// Mean delivered throughput per slot summed over SUs, in bits/s.
    pub capacity: Estimate,
    /// Fraction of sensing attempts on a cell where the PU was visible.
    pub pu_visible: f64,
}

#[derive(Debug, Clone, Default)]
struct Tally {
    slots: u64,
    su_samples: u64,
    sensed: u64,
    busy: u64,
    transmitted: u64,
    outage: u64,
    success: u64,
    pu_visible: u64,
    ks_hist: Vec<u64>,
    kd_hist: Vec<u64>,
    kd_tx: Vec<u64>,
    kd_outage: Vec<u64>,
    capacity_sum: f64,
    capacity_sq: f64,
}

fn bump(hist: &mut Vec<u64>, k: u32) {
    let k = k as usize;
    if hist.len() <= k {
        hist.resize(k + 1, 0);
    }
    hist[k] += 1;
}

fn add_into(dst: &mut Vec<u64>, src: &[u64]) {
    if dst.len() < src.len() {
        dst.resize(src.len(), 0);
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

impl Tally {
    fn record_sensing(&mut self, t: &SlotTrace) {
        self.sensed += 1;
        self.busy += t.sensed_busy as u64;
        self.pu_visible += t.pu_present as u64;
        bump(&mut self.ks_hist, t.sensing_collisions);
    }

    fn record_transmission(&mut self, t: &SlotTrace) {
        self.transmitted += 1;
        self.outage += t.outage as u64;
        bump(&mut self.kd_tx, t.transmission_collisions);
        if t.outage {
            bump(&mut self.kd_outage, t.transmission_collisions);
        }
    }

    fn close_slot(&mut self, throughput: f64) {
        self.slots += 1;
        self.capacity_sum += throughput;
        self.capacity_sq += throughput * throughput;
    }

    fn merge(&mut self, other: &Tally) {
        self.slots += other.slots;
        self.su_samples += other.su_samples;
        self.sensed += other.sensed;
        self.busy += other.busy;
        self.transmitted += other.transmitted;
        self.outage += other.outage;
        self.success += other.success;
        self.pu_visible += other.pu_visible;
        add_into(&mut self.ks_hist, &other.ks_hist);
        add_into(&mut self.kd_hist, &other.kd_hist);
        add_into(&mut self.kd_tx, &other.kd_tx);
        add_into(&mut self.kd_outage, &other.kd_outage);
        self.capacity_sum += other.capacity_sum;
        self.capacity_sq += other.capacity_sq;
    }

    fn into_summary(self, max_collisions: u32) -> SimulationSummary {
        let eff = self.slots;
        let pmf = |hist: &[u64], total: u64| -> BTreeMap<u32, Estimate> {
            (0..=max_collisions)
                .map(|k| {
                    let hits = hist.get(k as usize).copied().unwrap_or(0);
                    (k, Estimate::binomial(hits, total, eff))
                })
                .collect()
        };
        let kd_total: u64 = self.kd_hist.iter().sum();
        let outage_by_collisions = self
            .kd_tx
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(k, &n)| {
                let hits = self.kd_outage.get(k).copied().unwrap_or(0);
                (k as u32, Estimate::binomial(hits, n, n))
            })
            .collect();
        SimulationSummary {
            slots: self.slots,
            su_samples: self.su_samples,
            false_alarm: Estimate::binomial(self.busy, self.sensed, eff),
            outage: Estimate::binomial(self.outage, self.transmitted, eff),
            outage_by_collisions,
            sensing_collision_pmf: pmf(&self.ks_hist, self.sensed),
            transmission_collision_pmf: pmf(&self.kd_hist, kd_total),
            success: Estimate::binomial(self.success, self.su_samples, eff),
            capacity: Estimate::mean(self.capacity_sum, self.capacity_sq, self.slots),
            pu_visible: if self.sensed > 0 {
                self.pu_visible as f64 / self.sensed as f64
            } else {
                0.0
            },
        }
    }
}

/// How many attackers collide with the SU in a phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Collisions {
    /// Attackers hop uniformly; collisions follow from the hops.
    #[default]
    Hopping,
    /// Exactly this many attackers sit on the SU's cell.
    Forced(u32),
}

/// Which OAM mode the SU senses on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModeBranch {
    /// Mode 0, where a present PU is visible.
    Zero,
    /// A uniformly chosen mode in 1..L; requires L ≥ 2.
    NonZero,
    /// Uniform over all L modes.
    #[default]
    Uniform,
}

/// SINR that sets the rate B·log₂(1+γ) of a successful transmission.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RateSinr {
    /// The simulated γ_d.
    #[default]
    Received,
    /// An independent Gamma(m, mean γ̄) channel SINR, the ergodic model used
    /// by the analytic capacity.
    Nakagami { mean: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SensingSetup {
    pub pu_present: bool,
    pub branch: ModeBranch,
    pub collisions: Collisions,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransmissionSetup {
    pub collisions: Collisions,
    pub rate: RateSinr,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProtocolSetup {
    pub pu_init: PuInit,
    pub rate: RateSinr,
}

fn check_run(params: &SystemParams, trials: u64) -> Result<()> {
    params.validate()?;
    if trials < 1 {
        return Err(invalid("trials", "must be >= 1"));
    }
    Ok(())
}

fn check_rate(rate: RateSinr) -> Result<()> {
    if let RateSinr::Nakagami { mean } = rate {
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(invalid("gamma_bar", "must be finite and > 0"));
        }
    }
    Ok(())
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Run `trials` in fixed blocks, in parallel, merging in block order.
fn run_blocks<F>(trials: u64, seed: u64, body: F) -> Tally
where
    F: Fn(u64, u64, u64, &mut ChaCha8Rng, &mut Tally) + Sync,
{
    let blocks = trials.div_ceil(BLOCK_SIZE);
    let tallies: Vec<Tally> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK_SIZE;
            let count = BLOCK_SIZE.min(trials - start);
            let mut rng = block_rng(seed, b);
            let mut tally = Tally::default();
            body(b, start, count, &mut rng, &mut tally);
            tally
        })
        .collect();
    let mut total = Tally::default();
    for t in &tallies {
        total.merge(t);
    }
    total
}

fn hop_attackers<R: Rng + ?Sized>(
    rng: &mut R,
    params: &SystemParams,
    out: &mut Vec<HopAssignment>,
) {
    out.clear();
    for _ in 0..params.k_attackers {
        out.push(generate_hop(rng, params.n_frequencies, params.l_modes));
    }
}

fn count_hits(attackers: &[HopAssignment], su: HopAssignment) -> u32 {
    attackers.iter().filter(|&&a| a == su).count() as u32
}

fn fill_gains<R: Rng + ?Sized>(rng: &mut R, params: &SystemParams, count: u32, out: &mut Vec<f64>) {
    out.clear();
    for _ in 0..count {
        out.push(sample_power_gain(rng, params.fading_m, params.fading_mean));
    }
}

fn rate_bits<R: Rng + ?Sized>(
    rng: &mut R,
    params: &SystemParams,
    rate: RateSinr,
    received: f64,
) -> f64 {
    let sinr = match rate {
        RateSinr::Received => received,
        RateSinr::Nakagami { mean } => sample_power_gain(rng, params.fading_m, mean),
    };
    params.bandwidth * sinr.ln_1p() / std::f64::consts::LN_2
}

fn sensing_phase<R: Rng + ?Sized>(
    rng: &mut R,
    params: &SystemParams,
    ks: u32,
    pu_visible: bool,
    draw: &mut FadingDraw,
    trace: &mut SlotTrace,
) {
    fill_gains(rng, params, ks, &mut draw.attacker_gains);
    draw.pu_gain = if pu_visible {
        sample_power_gain(rng, params.fading_m, params.fading_mean)
    } else {
        0.0
    };
    trace.sensing_collisions = ks;
    trace.pu_present = pu_visible;
    trace.sensing_sinr = sensing_sinr(draw, pu_visible, params);
    trace.sensed_busy = trace.sensing_sinr >= params.sensing_threshold;
}

fn transmission_phase<R: Rng + ?Sized>(
    rng: &mut R,
    params: &SystemParams,
    kd: u32,
    rate: RateSinr,
    draw: &mut FadingDraw,
    trace: &mut SlotTrace,
) {
    fill_gains(rng, params, kd, &mut draw.attacker_gains);
    draw.su_gain = sample_power_gain(rng, params.fading_m, params.fading_mean);
    trace.transmission_collisions = kd;
    trace.transmission_sinr = transmission_sinr(draw, params);
    trace.outage = trace.transmission_sinr <= params.outage_threshold;
    trace.success = !trace.outage;
    trace.throughput = if trace.success {
        rate_bits(rng, params, rate, trace.transmission_sinr)
    } else {
        0.0
    };
}

/// Sensing-phase trials: estimates the false-alarm probability and the
/// empirical K_s distribution.
pub fn run_sensing_trials(
    params: &SystemParams,
    trials: u64,
    seed: u64,
    setup: &SensingSetup,
) -> Result<SimulationSummary> {
    check_run(params, trials)?;
    if setup.branch == ModeBranch::NonZero && params.l_modes < 2 {
        return Err(invalid("L", "the non-zero mode branch needs L >= 2"));
    }
    if let Collisions::Forced(k) = setup.collisions {
        if k > params.k_attackers {
            return Err(invalid("K", format!("forced collisions {k} exceed K")));
        }
    }
    let tally = run_blocks(trials, seed, |_, start, count, rng, tally| {
        let mut draw = FadingDraw::default();
        let mut trace = SlotTrace::default();
        for i in 0..count {
            trace.slot = start + i;
            let frequency = rng.random_range(0..params.n_frequencies);
            let mode = match setup.branch {
                ModeBranch::Zero => 0,
                ModeBranch::NonZero => rng.random_range(1..params.l_modes),
                ModeBranch::Uniform => rng.random_range(0..params.l_modes),
            };
            trace.su_assignment = HopAssignment { frequency, mode };
            let ks = match setup.collisions {
                Collisions::Forced(k) => k,
                Collisions::Hopping => {
                    hop_attackers(rng, params, &mut trace.sensing_attackers);
                    count_hits(&trace.sensing_attackers, trace.su_assignment)
                }
            };
            let visible = setup.pu_present && mode == 0;
            sensing_phase(rng, params, ks, visible, &mut draw, &mut trace);
            tally.su_samples += 1;
            tally.record_sensing(&trace);
            tally.close_slot(0.0);
        }
    });
    let max = match setup.collisions {
        Collisions::Forced(k) => k,
        Collisions::Hopping => params.k_attackers,
    };
    Ok(tally.into_summary(max))
}

/// Transmission-phase trials: outage overall and per K_d, the empirical K_d
/// distribution, and the per-link throughput.
pub fn run_transmission_trials(
    params: &SystemParams,
    trials: u64,
    seed: u64,
    setup: &TransmissionSetup,
) -> Result<SimulationSummary> {
    check_run(params, trials)?;
    check_rate(setup.rate)?;
    if let Collisions::Forced(k) = setup.collisions {
        if k > params.k_attackers {
            return Err(invalid("K", format!("forced collisions {k} exceed K")));
        }
    }
    let tally = run_blocks(trials, seed, |_, start, count, rng, tally| {
        let mut draw = FadingDraw::default();
        let mut trace = SlotTrace::default();
        for i in 0..count {
            trace.slot = start + i;
            trace.su_assignment = generate_hop(rng, params.n_frequencies, params.l_modes);
            let kd = match setup.collisions {
                Collisions::Forced(k) => k,
                Collisions::Hopping => {
                    hop_attackers(rng, params, &mut trace.transmission_attackers);
                    count_hits(&trace.transmission_attackers, trace.su_assignment)
                }
            };
            bump(&mut tally.kd_hist, kd);
            transmission_phase(rng, params, kd, setup.rate, &mut draw, &mut trace);
            tally.su_samples += 1;
            tally.success += trace.success as u64;
            tally.record_transmission(&trace);
            tally.close_slot(trace.throughput);
        }
    });
    let max = match setup.collisions {
        Collisions::Forced(k) => k,
        Collisions::Hopping => params.k_attackers,
    };
    Ok(tally.into_summary(max))
}

/// ON-OFF occupancy at the first slot of every block, walked sequentially.
fn pu_block_starts(
    params: &SystemParams,
    slots: u64,
    seed: u64,
    init: PuInit,
) -> Vec<PuChannelState> {
    let mut rng = block_rng(seed, PU_STREAM);
    let mut state = PuChannelState::new(
        &mut rng,
        params.n_frequencies,
        init,
        params.on_to_off,
        params.off_to_on,
    );
    let mut starts = Vec::with_capacity(slots.div_ceil(BLOCK_SIZE) as usize);
    for slot in 0..slots {
        if slot > 0 {
            state.step(&mut rng);
        }
        if slot % BLOCK_SIZE == 0 {
            starts.push(state.clone());
        }
    }
    starts
}

/// Word offset of slot `slot` in the PU stream: two 32-bit words per
/// frequency per slot.
fn pu_word_pos(params: &SystemParams, slot: u64) -> u128 {
    2 * params.n_frequencies as u128 * slot as u128
}

fn simulate_protocol<O>(
    params: &SystemParams,
    slots: u64,
    seed: u64,
    setup: &ProtocolSetup,
    observe: O,
) -> Result<Tally>
where
    O: Fn(&SlotTrace) + Sync,
{
    check_run(params, slots)?;
    check_rate(setup.rate)?;
    let starts = pu_block_starts(params, slots, seed, setup.pu_init);
    let cells = params.channels();
    let users = params.m_sus;
    let distinct = users as u64 <= cells;

    let tally = run_blocks(slots, seed, |b, start, count, rng, tally| {
        let mut pu = starts[b as usize].clone();
        let mut pu_rng = block_rng(seed, PU_STREAM);
        pu_rng.set_word_pos(pu_word_pos(params, start + 1));

        let mut draw = FadingDraw::default();
        let mut trace = SlotTrace::default();
        let mut sensing_attackers = Vec::with_capacity(params.k_attackers as usize);
        let mut transmission_attackers = Vec::with_capacity(params.k_attackers as usize);
        let mut su_cells: Vec<HopAssignment> = Vec::with_capacity(users as usize);

        for i in 0..count {
            if i > 0 {
                pu.step(&mut pu_rng);
            }
            let slot = start + i;

            su_cells.clear();
            if distinct {
                let picks = index::sample(rng, cells as usize, users as usize);
                su_cells.extend(
                    picks
                        .iter()
                        .map(|c| HopAssignment::from_cell(c as u64, params.l_modes)),
                );
            } else {
                // more SUs than cells: exclusive access is impossible
                for _ in 0..users {
                    su_cells.push(generate_hop(rng, params.n_frequencies, params.l_modes));
                }
            }
            hop_attackers(rng, params, &mut sensing_attackers);
            hop_attackers(rng, params, &mut transmission_attackers);
            let kd_all: Vec<u32> = su_cells
                .iter()
                .map(|&c| count_hits(&transmission_attackers, c))
                .collect();

            let mut delivered = 0.0;
            for (idx, &cell) in su_cells.iter().enumerate() {
                trace.slot = slot;
                trace.su_index = idx as u32;
                trace.su_assignment = cell;
                trace.sensing_attackers.clone_from(&sensing_attackers);
                trace
                    .transmission_attackers
                    .clone_from(&transmission_attackers);
                let ks = count_hits(&sensing_attackers, cell);
                let visible = cell.mode == 0 && pu.is_on(cell.frequency);
                sensing_phase(rng, params, ks, visible, &mut draw, &mut trace);
                tally.su_samples += 1;
                tally.record_sensing(&trace);
                let kd = kd_all[idx];
                bump(&mut tally.kd_hist, kd);
                if trace.sensed_busy {
                    // defer until the channel is idle again
                    trace.transmission_collisions = kd;
                    trace.transmission_sinr = f64::NAN;
                    trace.outage = false;
                    trace.success = false;
                    trace.throughput = 0.0;
                } else {
                    transmission_phase(rng, params, kd, setup.rate, &mut draw, &mut trace);
                    tally.record_transmission(&trace);
                    tally.success += trace.success as u64;
                    delivered += trace.throughput;
                }
                observe(&trace);
            }
            tally.close_slot(delivered);
        }
    });
    Ok(tally)
}

/// Full slotted protocol: the PU chain evolves, every SU hops, senses,
/// defers when busy, otherwise transmits.
pub fn run_full_protocol(
    params: &SystemParams,
    slots: u64,
    seed: u64,
    setup: &ProtocolSetup,
) -> Result<SimulationSummary> {
    let tally = simulate_protocol(params, slots, seed, setup, |_| {})?;
    Ok(tally.into_summary(params.k_attackers))
}

/// Per-SU slot traces of [`run_full_protocol`] for the same inputs, in
/// slot order.
pub fn trace_full_protocol(
    params: &SystemParams,
    slots: u64,
    seed: u64,
    setup: &ProtocolSetup,
) -> Result<Vec<SlotTrace>> {
    let sink = std::sync::Mutex::new(Vec::new());
    simulate_protocol(params, slots, seed, setup, |t| {
        sink.lock().expect("trace sink poisoned").push(t.clone());
    })?;
    let mut traces = sink.into_inner().expect("trace sink poisoned");
    traces.sort_by_key(|t| (t.slot, t.su_index));
    Ok(traces)
}
