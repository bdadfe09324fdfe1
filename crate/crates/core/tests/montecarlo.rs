use mfh::analytics::{collision_pmf, outage_numeric};
use mfh::channel::SystemParams;
use mfh::montecarlo::{
    run_full_protocol, run_transmission_trials, trace_full_protocol, Collisions, ProtocolSetup,
    PuInit, RateSinr, TransmissionSetup,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn runs_are_pure_functions_of_the_seed(seed in any::<u64>(), slots in 1u64..40_000) {
        let p = SystemParams::default();
        let setup = ProtocolSetup::default();
        let a = run_full_protocol(&p, slots, seed, &setup).unwrap();
        let b = run_full_protocol(&p, slots, seed, &setup).unwrap();
        prop_assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}

#[test]
fn different_seeds_differ() {
    let p = SystemParams::default();
    let a = run_full_protocol(&p, 5_000, 1, &ProtocolSetup::default()).unwrap();
    let b = run_full_protocol(&p, 5_000, 2, &ProtocolSetup::default()).unwrap();
    assert_ne!(a.false_alarm.value, b.false_alarm.value);
}

#[test]
fn without_jamming_power_outage_ignores_collisions() {
    let p = SystemParams {
        attacker_power: 0.0,
        k_attackers: 4,
        ..SystemParams::default()
    };
    let reference = outage_numeric(0.3, 0, &p).unwrap();
    for k in [0, 2, 4] {
        let setup = TransmissionSetup {
            collisions: Collisions::Forced(k),
            ..TransmissionSetup::default()
        };
        let s = run_transmission_trials(&p, 200_000, 3, &setup).unwrap();
        assert!(
            (s.outage.value - reference).abs() <= s.outage.half_width,
            "K_d = {k}"
        );
        assert!((outage_numeric(0.3, k, &p).unwrap() - reference).abs() < 1e-12);
    }
}

#[test]
fn collision_histogram_matches_binomial() {
    let p = SystemParams {
        n_frequencies: 1,
        l_modes: 2,
        k_attackers: 3,
        ..SystemParams::default()
    };
    let s = run_transmission_trials(&p, 200_000, 9, &TransmissionSetup::default()).unwrap();
    for (&k, e) in &s.transmission_collision_pmf {
        let expect = collision_pmf(k, &p).unwrap();
        assert!(
            (e.value - expect).abs() <= e.half_width + 1e-12,
            "k = {k}: {} vs {expect}",
            e.value
        );
    }
}

#[test]
fn pu_always_on_is_visible_only_in_mode_zero() {
    let p = SystemParams {
        on_to_off: 0.0,
        ..SystemParams::default()
    };
    let setup = ProtocolSetup {
        pu_init: PuInit::AllOn,
        rate: RateSinr::Received,
    };
    let s = run_full_protocol(&p, 100_000, 4, &setup).unwrap();
    let expect = 1.0 / p.l_modes as f64;
    assert!((s.pu_visible - expect).abs() < 0.01, "{}", s.pu_visible);
}

#[test]
fn traces_are_consistent() {
    let p = SystemParams::default();
    let traces = trace_full_protocol(&p, 300, 8, &ProtocolSetup::default()).unwrap();
    assert_eq!(traces.len(), 300 * p.m_sus as usize);
    for t in &traces {
        if t.sensed_busy {
            assert!(!t.success && t.transmission_sinr.is_nan());
        }
        if t.success {
            assert!(!t.outage && t.throughput > 0.0);
        }
    }
}
