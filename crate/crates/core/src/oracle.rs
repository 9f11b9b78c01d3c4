//! Brute-force Fourier ground truth.
//!
//! A schedule is sampled as a piecewise-constant waveform and transformed
//! with a direct DFT. None of the closed-form coefficient expressions are used
//! here. Because the waveform is constant over each sample, the continuous
//! Fourier-series coefficient at any harmonic `k` follows exactly from the DFT
//! bin `k mod L` times the zero-order-hold response `sinc(pi k/L) e^{-j pi k/L}`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::math::hold_response;
use crate::modseq::SwitchSchedule;
use crate::modulator::SampledWaveform;

/// Samples `schedule` with `samples_per_slot` samples per slot over one period.
pub fn sample_schedule(schedule: &SwitchSchedule, samples_per_slot: usize) -> SampledWaveform {
    let k = samples_per_slot.max(1);
    let samples = (0..schedule.period_slots() * k)
        .map(|j| schedule.value(j / k))
        .collect();
    let rate = k as f64 / schedule.slot_duration();
    SampledWaveform::new(samples, rate)
}

/// Direct DFT normalized by the length: a constant `c` maps to `c` at bin 0.
pub fn dft(samples: &[Complex64]) -> Vec<Complex64> {
    let len = samples.len();
    let twiddles: Vec<Complex64> = (0..len)
        .map(|j| Complex64::from_polar(1.0, -2.0 * PI * j as f64 / len as f64))
        .collect();
    (0..len)
        .map(|k| {
            let acc: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(n, x)| x * twiddles[(k * n) % len])
                .sum();
            acc / len as f64
        })
        .collect()
}

/// Single normalized DFT bin `k` (any integer, taken modulo the length).
pub fn dft_bin(samples: &[Complex64], k: i64) -> Complex64 {
    let len = samples.len();
    let k = k.rem_euclid(len as i64) as usize;
    let acc: Complex64 = samples
        .iter()
        .enumerate()
        .map(|(n, x)| {
            x * Complex64::from_polar(1.0, -2.0 * PI * ((k * n) % len) as f64 / len as f64)
        })
        .sum();
    acc / len as f64
}

fn idft(bins: &[Complex64]) -> Vec<Complex64> {
    let len = bins.len();
    (0..len)
        .map(|n| {
            bins.iter()
                .enumerate()
                .map(|(k, x)| {
                    x * Complex64::from_polar(1.0, 2.0 * PI * ((k * n) % len) as f64 / len as f64)
                })
                .sum()
        })
        .collect()
}

/// DFT of one period of a sampled waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Normalized DFT bins, index `0..len`.
    pub bins: Vec<Complex64>,
    /// Frequency spacing of the bins, the reciprocal of the period (`f_mod`
    /// for a schedule).
    pub resolution: f64,
    pub samples_per_slot: Option<usize>,
}

impl OracleResult {
    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// Raw DFT bin for harmonic `k` (periodic in `k`). Converges to the
    /// continuous coefficient as the sampling gets finer.
    pub fn bin(&self, k: i64) -> Complex64 {
        self.bins[k.rem_euclid(self.bins.len() as i64) as usize]
    }

    /// Exact continuous Fourier-series coefficient of harmonic `k` of the
    /// piecewise-constant waveform.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        self.bin(k) * hold_response(k as f64, self.bins.len() as f64)
    }

    pub fn frequency(&self, k: i64) -> f64 {
        k as f64 * self.resolution
    }

    /// Sum of `|bin|^2`, equal to the mean power of the sampled waveform.
    pub fn total_power(&self) -> f64 {
        self.bins.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Inverse DFT back to the sampled waveform.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        idft(&self.bins)
    }
}

pub fn dft_coefficients(waveform: &SampledWaveform) -> OracleResult {
    OracleResult {
        bins: dft(waveform.samples()),
        resolution: 1.0 / waveform.duration(),
        samples_per_slot: None,
    }
}

/// Samples `schedule` and takes its DFT.
pub fn analyze_schedule(schedule: &SwitchSchedule, samples_per_slot: usize) -> OracleResult {
    let mut result = dft_coefficients(&sample_schedule(schedule, samples_per_slot));
    result.samples_per_slot = Some(samples_per_slot.max(1));
    result
}

/// Largest `|analytic(k) - oracle(k)|` over the keys of `analytic`.
pub fn compare(analytic: &BTreeMap<i64, Complex64>, oracle: &OracleResult) -> f64 {
    analytic
        .iter()
        .map(|(&k, a)| (a - oracle.coefficient(k)).norm())
        .fold(0.0, f64::max)
}
