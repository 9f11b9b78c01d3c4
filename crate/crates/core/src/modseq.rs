//! Switch schedules and their closed-form harmonic spectra.
//!
//! Harmonic index `k` refers to the schedule period `N T_p`, so component `k`
//! sits at `k f_mod`. Only `k = 1 + iN` survives, which gives replica `i` at
//! `f_p/N + i f_p`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::config::TmaConfig;
use crate::error::{Result, TmaError};
use crate::math::{power_db, sinc};
use crate::taper;

/// Phase of switch state `n`, `2 pi n / N`.
pub fn state_phase(n_phases: usize, n: usize) -> Result<f64> {
    if n >= n_phases {
        return Err(TmaError::IndexOutOfRange {
            what: "state",
            index: n,
            bound: n_phases,
        });
    }
    Ok(2.0 * PI * n as f64 / n_phases as f64)
}

fn state_value(n_phases: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * n as f64 / n_phases as f64)
}

/// State of a single switch slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotState {
    Phase(usize),
    Off,
}

impl SlotState {
    /// `-1` for OFF, otherwise the state index.
    pub fn index(self) -> i64 {
        match self {
            SlotState::Phase(n) => n as i64,
            SlotState::Off => -1,
        }
    }
}

/// One period of the per-slot switch sequence, with delay and taper applied.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchSchedule {
    slots: Vec<SlotState>,
    slot_duration: f64,
    n_phases: usize,
    o_tau: usize,
    delay: usize,
    taper: usize,
}

impl SwitchSchedule {
    /// Builds the schedule: states `0..N` each held for `o_tau` slots, the last
    /// `taper` slots of every pulse switched off, then the whole period
    /// cyclically delayed (right-shifted) by `delay` slots.
    pub fn build(cfg: &TmaConfig, delay: usize, taper: usize) -> Result<Self> {
        let n_phases = cfg.n_phases();
        let o_tau = cfg.o_tau();
        let period = cfg.period_slots();
        if delay >= period {
            return Err(TmaError::DelayOutOfRange {
                delay,
                count: period,
            });
        }
        if taper > o_tau {
            return Err(TmaError::TaperOutOfRange {
                level: taper,
                o_tau,
            });
        }
        let base = (0..n_phases).flat_map(|n| {
            (0..o_tau).map(move |j| {
                if j < o_tau - taper {
                    SlotState::Phase(n)
                } else {
                    SlotState::Off
                }
            })
        });
        let mut slots: Vec<SlotState> = base.collect();
        slots.rotate_right(delay);
        Ok(Self {
            slots,
            slot_duration: cfg.slot_duration(),
            n_phases,
            o_tau,
            delay,
            taper,
        })
    }

    pub fn slots(&self) -> &[SlotState] {
        &self.slots
    }

    pub fn period_slots(&self) -> usize {
        self.slots.len()
    }

    pub fn slot_duration(&self) -> f64 {
        self.slot_duration
    }

    pub fn n_phases(&self) -> usize {
        self.n_phases
    }

    pub fn o_tau(&self) -> usize {
        self.o_tau
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    pub fn taper(&self) -> usize {
        self.taper
    }

    /// Complex switch output for slot `slot` (taken modulo the period).
    pub fn value(&self, slot: usize) -> Complex64 {
        match self.slots[slot % self.slots.len()] {
            SlotState::Phase(n) => state_value(self.n_phases, n),
            SlotState::Off => Complex64::new(0.0, 0.0),
        }
    }

    /// Fraction of slots that radiate.
    pub fn duty_cycle(&self) -> f64 {
        let on = self.slots.iter().filter(|s| **s != SlotState::Off).count();
        on as f64 / self.slots.len() as f64
    }

    /// Rows for the schedule CSV with `samples_per_slot` rows per slot.
    pub fn rows(&self, samples_per_slot: usize) -> Vec<ScheduleRow> {
        let k = samples_per_slot.max(1);
        let dt = self.slot_duration / k as f64;
        (0..self.slots.len() * k)
            .map(|j| {
                let slot = j / k;
                let state = self.slots[slot];
                let value = self.value(slot);
                ScheduleRow {
                    slot_index: slot,
                    time_s: j as f64 * dt,
                    state_index: state.index(),
                    phase_rad: match state {
                        SlotState::Phase(n) => 2.0 * PI * n as f64 / self.n_phases as f64,
                        SlotState::Off => 0.0,
                    },
                    re: value.re,
                    im: value.im,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScheduleRow {
    pub slot_index: usize,
    pub time_s: f64,
    pub state_index: i64,
    pub phase_rad: f64,
    pub re: f64,
    pub im: f64,
}

/// Fourier coefficient of the single pulse of state `n` at harmonic `k`,
/// `e^{j phi(n)} sinc(pi k/N) e^{-j pi k/N}`.
pub fn pulse_coefficient(n_phases: usize, n: usize, k: i64) -> Result<Complex64> {
    let phase = state_phase(n_phases, n)?;
    let x = PI * k as f64 / n_phases as f64;
    Ok(Complex64::from_polar(sinc(x), phase - x))
}

/// Existence indicator: only harmonics `k = 1 + iN` are present.
pub fn harmonic_exists(n_phases: usize, k: i64) -> bool {
    k.rem_euclid(n_phases as i64) == 1 % n_phases as i64
}

/// Coefficient of harmonic `k` of the untapered, undelayed schedule.
pub fn sequence_coefficient(n_phases: usize, k: i64) -> Complex64 {
    if !harmonic_exists(n_phases, k) {
        return Complex64::new(0.0, 0.0);
    }
    let x = PI * k as f64 / n_phases as f64;
    Complex64::from_polar(sinc(x), -x)
}

/// Coefficient of replica `i`, `sinc(pi(i + 1/N)) e^{-j pi (i + 1/N)}`.
pub fn harmonic_alpha(n_phases: usize, i: i64) -> Complex64 {
    let x = PI * (i as f64 + 1.0 / n_phases as f64);
    Complex64::from_polar(sinc(x), -x)
}

/// Power of replica `i` in dB.
pub fn harmonic_power_db(n_phases: usize, i: i64) -> f64 {
    let x = PI * (1.0 / n_phases as f64 + i as f64);
    power_db(sinc(x).powi(2))
}

/// Coefficient of harmonic `k` of the schedule delayed by `delay` slots and
/// tapered with `taper` zero slots per pulse.
pub fn schedule_coefficient(
    cfg: &TmaConfig,
    k: i64,
    delay: usize,
    taper: usize,
) -> Result<Complex64> {
    let d_count = cfg.period_slots();
    if delay >= d_count {
        return Err(TmaError::DelayOutOfRange {
            delay,
            count: d_count,
        });
    }
    let c = taper::tapered_coefficient(cfg.n_phases(), k, cfg.o_tau(), taper)?;
    let r = (k as i128 * delay as i128).rem_euclid(d_count as i128);
    Ok(c * Complex64::from_polar(1.0, -2.0 * PI * r as f64 / d_count as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicEntry {
    pub freq: f64,
    pub coeff: Complex64,
}

/// Replica coefficients `alpha(i)` for `|i| <= i_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpectrum {
    pub entries: BTreeMap<i64, HarmonicEntry>,
    pub i_max: usize,
}

impl HarmonicSpectrum {
    pub fn total_power(&self) -> f64 {
        self.entries.values().map(|e| e.coeff.norm_sqr()).sum()
    }

    /// Coefficients keyed by harmonic index `k = 1 + iN` of the schedule period.
    pub fn by_harmonic(&self, n_phases: usize) -> BTreeMap<i64, Complex64> {
        self.entries
            .iter()
            .map(|(&i, e)| (1 + i * n_phases as i64, e.coeff))
            .collect()
    }
}

pub const DEFAULT_I_MAX: usize = 8;

pub fn spectrum(cfg: &TmaConfig, i_max: usize) -> HarmonicSpectrum {
    let n = cfg.n_phases();
    let bound = i_max as i64;
    let entries = (-bound..=bound)
        .map(|i| {
            (
                i,
                HarmonicEntry {
                    freq: cfg.replica_freq(i),
                    coeff: harmonic_alpha(n, i),
                },
            )
        })
        .collect();
    HarmonicSpectrum { entries, i_max }
}
