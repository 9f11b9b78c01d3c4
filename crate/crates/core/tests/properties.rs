use std::f64::consts::PI;

use proptest::prelude::*;
use tma_core::beamformer::{array_factor, beam_direction, beampattern_sweep, AfMode, SweepOptions};
use tma_core::delayctl::{delay_phase, num_delays};
use tma_core::modseq::{
    harmonic_alpha, schedule_coefficient, sequence_coefficient, SlotState, SwitchSchedule,
};
use tma_core::oracle::analyze_schedule;
use tma_core::taper::tapered_coefficient;
use tma_core::{ArrayConfig, TmaConfig};

fn tma_config() -> impl Strategy<Value = TmaConfig> {
    (2usize..=10, 1usize..=5, 1usize..=5, 0.1f64..1e6)
        .prop_map(|(n, o_f, o_tau, fs)| TmaConfig::new(n, o_f, o_tau, fs).unwrap())
}

proptest! {
    #[test]
    fn derived_timing_is_consistent(cfg in tma_config()) {
        let tol = 4.0 * f64::EPSILON;
        prop_assert!((cfg.pulse_duration() * cfg.pulse_freq() - 1.0).abs() <= tol);
        prop_assert!((cfg.switch_rate() / (cfg.pulse_freq() * cfg.o_tau() as f64) - 1.0).abs() <= tol);
        prop_assert!((cfg.mod_freq() * cfg.n_phases() as f64 / cfg.pulse_freq() - 1.0).abs() <= tol);
        prop_assert!((cfg.pulse_duration() / (cfg.o_tau() as f64 * cfg.slot_duration()) - 1.0).abs() <= tol);
    }

    #[test]
    fn schedule_structure(cfg in tma_config(), d_frac in 0.0f64..1.0, l_frac in 0.0f64..=1.0) {
        let d = ((d_frac * cfg.period_slots() as f64) as usize).min(cfg.period_slots() - 1);
        let l = (l_frac * cfg.o_tau() as f64).round() as usize;
        let s = SwitchSchedule::build(&cfg, d, l).unwrap();
        prop_assert_eq!(s.period_slots(), cfg.n_phases() * cfg.o_tau());
        // undo the delay and check pulse layout
        let mut base = s.slots().to_vec();
        base.rotate_left(d);
        for (n, pulse) in base.chunks(cfg.o_tau()).enumerate() {
            let active = pulse.iter().take_while(|x| **x == SlotState::Phase(n)).count();
            prop_assert_eq!(active, cfg.o_tau() - l);
            prop_assert!(pulse[active..].iter().all(|x| *x == SlotState::Off));
        }
        prop_assert!((s.duty_cycle() - (cfg.o_tau() - l) as f64 / cfg.o_tau() as f64).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_oracle(
        n in 2usize..=9,
        o_tau in 1usize..=5,
        d_frac in 0.0f64..1.0,
        l_frac in 0.0f64..=1.0,
        k_samples in 1usize..=4,
    ) {
        let cfg = TmaConfig::new(n, 1, o_tau, 1.0).unwrap();
        let d = ((d_frac * cfg.period_slots() as f64) as usize).min(cfg.period_slots() - 1);
        let l = (l_frac * o_tau as f64).round() as usize;
        let oracle = analyze_schedule(&SwitchSchedule::build(&cfg, d, l).unwrap(), k_samples);
        let span = 3 * cfg.period_slots() as i64;
        for k in -span..=span {
            let a = schedule_coefficient(&cfg, k, d, l).unwrap();
            prop_assert!((a - oracle.coefficient(k)).norm() < 1e-9, "k={}", k);
        }
    }

    #[test]
    fn coefficient_magnitudes_bounded(n in 2usize..=16, i in -200i64..=200) {
        prop_assert!(harmonic_alpha(n, i).norm() <= 1.0);
        prop_assert!((harmonic_alpha(n, i) - sequence_coefficient(n, 1 + i * n as i64)).norm() < 1e-13);
    }

    #[test]
    fn taper_reduces_to_untapered(n in 2usize..=16, k in -500i64..=500, o_tau in 1usize..=8) {
        prop_assert_eq!(tapered_coefficient(n, k, o_tau, 0).unwrap(), sequence_coefficient(n, k));
    }

    #[test]
    fn af_bounded_by_coherent_sum(
        cfg in tma_config(),
        m in 1usize..=16,
        spacing in 0.1f64..2.0,
        i in -3i64..=3,
        d_frac in 0.0f64..1.0,
        theta in -90.0f64..=90.0,
    ) {
        let acfg = ArrayConfig::new(m, spacing, 1e9).unwrap();
        let d = ((d_frac * num_delays(&cfg) as f64) as usize).min(num_delays(&cfg) - 1);
        for mode in [AfMode::Simplified, AfMode::Exact] {
            let af = array_factor(&acfg, &cfg, theta, i, d, mode).unwrap();
            prop_assert!(af.norm() <= harmonic_alpha(cfg.n_phases(), i).norm() * (m as f64).sqrt() * (1.0 + 1e-12));
        }
    }
}

#[test]
fn delay_phases_are_uniform() {
    for n in [2usize, 3, 4, 8] {
        for o_tau in [1usize, 2, 4, 8] {
            let cfg = TmaConfig::new(n, 1, o_tau, 1.0).unwrap();
            let count = num_delays(&cfg);
            let mut phases: Vec<f64> = (0..count)
                .map(|d| delay_phase(&cfg, 0, d).unwrap().rem_euclid(2.0 * PI))
                .collect();
            phases.sort_by(f64::total_cmp);
            for (j, p) in phases.iter().enumerate() {
                assert!((p - 2.0 * PI * j as f64 / count as f64).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn peak_within_one_step_of_beam_direction() {
    let step = 0.1;
    for o_tau in [1usize, 2, 4] {
        let cfg = TmaConfig::new(4, 1, o_tau, 1.0).unwrap();
        for spacing in [0.5, 0.4] {
            let acfg = ArrayConfig::new(8, spacing, 1e9).unwrap();
            for d in 0..num_delays(&cfg) {
                let Some(dir) = beam_direction(&cfg, &acfg, 0, d) else {
                    continue;
                };
                if dir.abs() >= 90.0 - step {
                    continue;
                }
                let p = beampattern_sweep(&acfg, &cfg, d, &[0], &SweepOptions::default()).unwrap();
                let peak = p.peak_angle(0).unwrap();
                assert!(
                    (peak - dir).abs() <= step + 1e-9,
                    "o_tau={o_tau} d={d}: {peak} vs {dir}"
                );
            }
        }
    }
}
