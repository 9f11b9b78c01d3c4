//! Time-domain modulation of a baseband signal by the switch schedule, and the
//! replica spectrum it produces.
//!
//! Modulating `s(t)` by the delayed schedule shifts the baseband up by
//! `f_p/N` and adds replicas every `f_p`, replica `i` weighted by
//! `alpha(i) e^{j phi(i, d)}`.

use std::collections::{BTreeMap, HashSet};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::config::TmaConfig;
use crate::delayctl::{check_delay, delay_phase, num_delays};
use crate::error::{Result, TmaError};
use crate::math::{gcd, hold_response};
use crate::modseq::SwitchSchedule;
use crate::taper::tapered_coefficient;

/// Uniformly sampled complex waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWaveform {
    samples: Vec<Complex64>,
    rate: f64,
}

impl SampledWaveform {
    pub fn new(samples: Vec<Complex64>, rate: f64) -> Self {
        Self { samples, rate }
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.rate
    }

    pub fn mean_power(&self) -> f64 {
        self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    /// DFT normalized by the length.
    pub fn spectrum(&self) -> Vec<Complex64> {
        fft(&self.samples)
    }

    /// Power per DFT bin in dB, ordered by ascending frequency.
    pub fn psd_db(&self) -> Vec<(f64, f64)> {
        let bins = self.spectrum();
        let len = bins.len() as i64;
        let lo = -(len / 2);
        (lo..lo + len)
            .map(|b| {
                let p = bins[b.rem_euclid(len) as usize].norm_sqr();
                let db = if p > 0.0 {
                    (10.0 * p.log10()).max(-300.0)
                } else {
                    -300.0
                };
                (b as f64 * self.rate / len as f64, db)
            })
            .collect()
    }
}

fn fft(samples: &[Complex64]) -> Vec<Complex64> {
    let mut buf = samples.to_vec();
    if buf.is_empty() {
        return buf;
    }
    FftPlanner::new()
        .plan_fft_forward(buf.len())
        .process(&mut buf);
    let scale = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

fn samples_per_slot(rate: f64, cfg: &TmaConfig) -> Result<usize> {
    let ratio = rate / cfg.switch_rate();
    let k = ratio.round();
    if k < 1.0 || (ratio - k).abs() > 1e-9 * ratio {
        return Err(TmaError::RateMismatch(format!(
            "sample rate {rate} Hz is not an integer multiple of the switch rate {} Hz",
            cfg.switch_rate()
        )));
    }
    Ok(k as usize)
}

/// Periodic band-limited interpolation of symbols at `f_s` up to
/// `samples_per_slot * f_sw`. The interpolated waveform passes through the
/// symbols and has no energy outside `[-f_s/2, f_s/2]`.
pub fn interpolate_symbols(
    symbols: &[Complex64],
    cfg: &TmaConfig,
    samples_per_slot: usize,
) -> Result<SampledWaveform> {
    if symbols.is_empty() {
        return Err(TmaError::InvalidArgument(
            "at least one symbol is required".into(),
        ));
    }
    if samples_per_slot == 0 {
        return Err(TmaError::InvalidArgument(
            "samples_per_slot must be positive".into(),
        ));
    }
    let ns = symbols.len();
    let up = samples_per_slot * cfg.oversampling();
    let len = ns * up;
    let coarse = fft(symbols);
    let mut fine = vec![Complex64::new(0.0, 0.0); len];
    for (b, c) in coarse.iter().enumerate() {
        if ns.is_multiple_of(2) && b == ns / 2 && up > 1 {
            // Nyquist bin: split evenly between +f_s/2 and -f_s/2
            fine[b] += c * 0.5;
            fine[len - b] += c * 0.5;
        } else {
            let signed = if b <= ns / 2 {
                b as i64
            } else {
                b as i64 - ns as i64
            };
            fine[signed.rem_euclid(len as i64) as usize] += c;
        }
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(len).process(&mut fine);
    Ok(SampledWaveform::new(
        fine,
        samples_per_slot as f64 * cfg.switch_rate(),
    ))
}

/// Symbol count actually used for `n_symbols`: the smallest multiple of
/// `N / gcd(N, O_f)` not below it, so the window holds whole schedule periods.
pub fn window_symbols(cfg: &TmaConfig, n_symbols: usize) -> usize {
    let step = cfg.n_phases() / gcd(cfg.n_phases(), cfg.o_f());
    n_symbols.div_ceil(step) * step
}

/// Seeded QPSK symbols, band-limited and normalized to unit mean power.
pub fn make_test_baseband(
    cfg: &TmaConfig,
    n_symbols: usize,
    seed: u64,
    samples_per_slot: usize,
) -> Result<SampledWaveform> {
    if n_symbols == 0 {
        return Err(TmaError::InvalidArgument(
            "n_symbols must be at least 1".into(),
        ));
    }
    if samples_per_slot < 2 {
        return Err(TmaError::InvalidArgument(
            "samples_per_slot must be at least 2".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let symbols: Vec<Complex64> = (0..window_symbols(cfg, n_symbols))
        .map(|_| {
            let re = if rng.gen::<bool>() { amp } else { -amp };
            let im = if rng.gen::<bool>() { amp } else { -amp };
            Complex64::new(re, im)
        })
        .collect();
    let w = interpolate_symbols(&symbols, cfg, samples_per_slot)?;
    let scale = 1.0 / w.mean_power().sqrt();
    let rate = w.rate();
    Ok(SampledWaveform::new(
        w.into_samples().into_iter().map(|c| c * scale).collect(),
        rate,
    ))
}

/// `y[j] = s[j] c(t_j - d T_sw)`, the schedule repeating over the whole signal.
pub fn modulate(
    s: &SampledWaveform,
    cfg: &TmaConfig,
    delay: usize,
    taper: usize,
) -> Result<SampledWaveform> {
    let k = samples_per_slot(s.rate(), cfg)?;
    let schedule = SwitchSchedule::build(cfg, delay, taper)?;
    let samples = s
        .samples()
        .iter()
        .enumerate()
        .map(|(j, x)| x * schedule.value(j / k))
        .collect();
    Ok(SampledWaveform::new(samples, s.rate()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Replica {
    pub center_freq: f64,
    pub weight: Complex64,
}

/// Predicted replicas of the modulated signal, keyed by replica index `i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicaSpectrum {
    pub entries: BTreeMap<i64, Replica>,
    /// Baseband bandwidth `B = f_s`.
    pub band: f64,
}

pub fn predict_replicas(cfg: &TmaConfig, delay: usize, i_max: usize) -> Result<ReplicaSpectrum> {
    predict_tapered_replicas(cfg, delay, 0, i_max)
}

/// Replica weights `C_l(1 + iN) e^{j phi(i, d)}` for a tapered schedule.
pub fn predict_tapered_replicas(
    cfg: &TmaConfig,
    delay: usize,
    taper: usize,
    i_max: usize,
) -> Result<ReplicaSpectrum> {
    check_delay(delay, num_delays(cfg))?;
    let n = cfg.n_phases() as i64;
    let bound = i_max as i64;
    let mut entries = BTreeMap::new();
    for i in -bound..=bound {
        let coeff = tapered_coefficient(cfg.n_phases(), 1 + i * n, cfg.o_tau(), taper)?;
        let phase = delay_phase(cfg, i, delay)?;
        entries.insert(
            i,
            Replica {
                center_freq: cfg.replica_freq(i),
                weight: coeff * Complex64::from_polar(1.0, phase),
            },
        );
    }
    Ok(ReplicaSpectrum {
        entries,
        band: cfg.sample_rate(),
    })
}

/// Relative L2 error between the DFT of `y` and the sum of frequency-shifted
/// copies of the DFT of `s` weighted by the predicted replicas.
///
/// The simulated switch output is held constant over each sample, so each
/// predicted weight is divided by the hold response at its center frequency
/// before comparison. Replicas that alias onto a bin offset already used by a
/// lower `|i|` are skipped.
pub fn verify_replicas(
    y: &SampledWaveform,
    predicted: &ReplicaSpectrum,
    s: &SampledWaveform,
) -> Result<f64> {
    if y.len() != s.len() || (y.rate() - s.rate()).abs() > 1e-12 * s.rate() {
        return Err(TmaError::RateMismatch(format!(
            "output ({} samples at {} Hz) and input ({} samples at {} Hz) differ",
            y.len(),
            y.rate(),
            s.len(),
            s.rate()
        )));
    }
    let len = y.len();
    let measured = y.spectrum();
    let source = s.spectrum();
    let mut model = vec![Complex64::new(0.0, 0.0); len];
    let mut used = HashSet::new();
    let mut order: Vec<(&i64, &Replica)> = predicted.entries.iter().collect();
    order.sort_by_key(|(i, _)| (i.abs(), **i));
    for (_, replica) in order {
        let exact_shift = replica.center_freq * y.duration();
        let shift = exact_shift.round();
        if (exact_shift - shift).abs() > 1e-6 {
            return Err(TmaError::RateMismatch(format!(
                "replica at {} Hz does not fall on a DFT bin of the {} s window",
                replica.center_freq,
                y.duration()
            )));
        }
        let offset = (shift as i64).rem_euclid(len as i64) as usize;
        if !used.insert(offset) {
            continue;
        }
        let weight = replica.weight / hold_response(replica.center_freq, y.rate());
        for (b, m) in model.iter_mut().enumerate() {
            *m += weight * source[(b + len - offset) % len];
        }
    }
    let err: f64 = measured
        .iter()
        .zip(&model)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    let norm: f64 = measured.iter().map(|a| a.norm_sqr()).sum();
    if norm == 0.0 {
        return Ok(if err == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok((err / norm).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg(n: usize, o_f: usize, o_tau: usize) -> TmaConfig {
        TmaConfig::new(n, o_f, o_tau, 1.0).unwrap()
    }

    #[test]
    fn baseband_is_deterministic_and_normalized() {
        let c = cfg(4, 2, 2);
        let a = make_test_baseband(&c, 16, 7, 4).unwrap();
        let b = make_test_baseband(&c, 16, 7, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, make_test_baseband(&c, 16, 8, 4).unwrap());
        for seed in 0..5 {
            let w = make_test_baseband(&c, 16, seed, 4).unwrap();
            assert!((w.mean_power() - 1.0).abs() < 1e-12);
        }
        assert_eq!(a.rate(), 16.0);
        assert_eq!(a.len(), 16 * 16);
    }

    #[test]
    fn baseband_window_spans_schedule_periods() {
        let c = cfg(4, 1, 2);
        assert_eq!(window_symbols(&c, 5), 8);
        let c = cfg(4, 2, 1);
        assert_eq!(window_symbols(&c, 5), 6);
        let w = make_test_baseband(&cfg(3, 1, 1), 4, 1, 2).unwrap();
        assert_eq!(w.len() % (3 * 2), 0);
    }

    #[test]
    fn baseband_is_band_limited() {
        let c = cfg(4, 2, 2);
        let w = make_test_baseband(&c, 17, 3, 3).unwrap();
        for (f, db) in w.psd_db() {
            if f.abs() > 0.5 + 1e-9 {
                assert!(db < -250.0, "leak at {f}: {db}");
            }
        }
    }

    #[test]
    fn interpolation_passes_through_symbols() {
        let c = cfg(2, 1, 2);
        let symbols: Vec<Complex64> = (0..6)
            .map(|j| Complex64::new(j as f64, -(j as f64) * 0.5))
            .collect();
        let w = interpolate_symbols(&symbols, &c, 3).unwrap();
        for (j, s) in symbols.iter().enumerate() {
            assert!((w.samples()[j * 6] - s).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_symbols_give_dc_line() {
        let c = cfg(4, 2, 2);
        let w = interpolate_symbols(&[Complex64::new(1.0, 0.0); 8], &c, 2).unwrap();
        let spec = w.spectrum();
        assert_abs_diff_eq!(spec[0].re, 1.0, epsilon = 1e-12);
        assert!(spec[1..].iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn modulating_ones_reproduces_schedule() {
        let c = cfg(4, 1, 2);
        let ones = SampledWaveform::new(
            vec![Complex64::new(1.0, 0.0); 8 * 3 * 2],
            3.0 * c.switch_rate(),
        );
        let y = modulate(&ones, &c, 3, 1).unwrap();
        let sched = crate::oracle::sample_schedule(&SwitchSchedule::build(&c, 3, 1).unwrap(), 3);
        assert_eq!(&y.samples()[..24], sched.samples());
        assert_eq!(&y.samples()[24..], sched.samples());
    }

    #[test]
    fn rate_mismatch() {
        let c = cfg(4, 2, 2);
        let s = SampledWaveform::new(vec![Complex64::new(1.0, 0.0); 10], 5.0);
        assert!(matches!(
            modulate(&s, &c, 0, 0),
            Err(TmaError::RateMismatch(_))
        ));
        let a = SampledWaveform::new(vec![Complex64::new(1.0, 0.0); 10], 8.0);
        let b = SampledWaveform::new(vec![Complex64::new(1.0, 0.0); 12], 8.0);
        let p = predict_replicas(&c, 0, 1).unwrap();
        assert!(matches!(
            verify_replicas(&a, &p, &b),
            Err(TmaError::RateMismatch(_))
        ));
    }

    #[test]
    fn replica_predictions() {
        let c = cfg(4, 1, 2);
        let p = predict_replicas(&c, 0, 3).unwrap();
        for (i, r) in &p.entries {
            assert_eq!(r.weight, crate::modseq::harmonic_alpha(4, *i));
        }
        let p = predict_replicas(&c, 1, 3).unwrap();
        let w = p.entries[&0].weight;
        assert_abs_diff_eq!(w.norm(), 0.900_316_316_157_106, epsilon = 1e-12);
        assert_abs_diff_eq!(w.arg(), -std::f64::consts::FRAC_PI_2, epsilon = 1e-14);
        for d in 0..8 {
            let q = predict_replicas(&c, d, 3).unwrap();
            for i in -3..=3 {
                assert_abs_diff_eq!(
                    q.entries[&i].weight.norm(),
                    p.entries[&i].weight.norm(),
                    epsilon = 1e-15
                );
            }
        }
        assert!(predict_replicas(&c, 8, 1).is_err());
    }

    #[test]
    fn zero_prediction_has_unit_residual() {
        let c = cfg(4, 2, 1);
        let s = make_test_baseband(&c, 8, 1, 2).unwrap();
        let y = modulate(&s, &c, 1, 0).unwrap();
        let mut p = predict_replicas(&c, 1, 4).unwrap();
        p.entries
            .values_mut()
            .for_each(|r| r.weight = Complex64::new(0.0, 0.0));
        assert_eq!(verify_replicas(&y, &p, &s).unwrap(), 1.0);
    }

    #[test]
    fn main_replica_only_residual() {
        let c = cfg(4, 2, 2);
        let s = make_test_baseband(&c, 32, 11, 8).unwrap();
        let y = modulate(&s, &c, 0, 0).unwrap();
        let p = predict_replicas(&c, 0, 0).unwrap();
        let r = verify_replicas(&y, &p, &s).unwrap();
        let alpha = crate::modseq::harmonic_alpha(4, 0);
        let held = alpha / hold_response(c.mod_freq(), y.rate());
        assert_abs_diff_eq!(r * r, 1.0 - held.norm_sqr(), epsilon = 1e-9);
        assert!((r * r - 0.189).abs() < 0.01);
    }

    #[test]
    fn full_replica_set_matches() {
        for (n, o_f, o_tau, d, l) in [
            (4, 2, 2, 3, 0),
            (3, 1, 2, 5, 1),
            (4, 1, 1, 1, 0),
            (8, 3, 2, 9, 1),
        ] {
            let c = cfg(n, o_f, o_tau);
            let k = 4;
            let s = make_test_baseband(&c, 12, 5, k).unwrap();
            let y = modulate(&s, &c, d, l).unwrap();
            let p = predict_tapered_replicas(&c, d, l, o_tau * k).unwrap();
            let r = verify_replicas(&y, &p, &s).unwrap();
            assert!(r < 1e-9, "n={n} o_f={o_f} o_tau={o_tau}: {r}");
        }
    }

    #[test]
    fn energy_clusters_at_replica_centers() {
        let c = cfg(4, 2, 1);
        let s = make_test_baseband(&c, 64, 2, 4).unwrap();
        let y = modulate(&s, &c, 0, 0).unwrap();
        let centroid = |psd: &[(f64, f64)], center: f64| {
            let (mut e, mut m) = (0.0, 0.0);
            for (f, db) in psd {
                if (f - center).abs() <= 0.5 {
                    let p = 10f64.powf(db / 10.0);
                    e += p;
                    m += p * f;
                }
            }
            (m / e, e)
        };
        let (base, _) = centroid(&s.psd_db(), 0.0);
        let psd = y.psd_db();
        for (i, center) in [(0, 0.5), (1, 2.5), (-1, -1.5)] {
            let (at, energy) = centroid(&psd, center);
            assert!(
                (at - base - center).abs() < 1e-3,
                "centroid {at} vs {center}"
            );
            // sample-and-hold of the switch output scales each replica by 1/H(f)
            let alpha =
                (crate::modseq::harmonic_alpha(4, i) / hold_response(center, y.rate())).norm_sqr();
            assert!(
                (energy - alpha).abs() < 0.01 * alpha,
                "i={i}: {energy} vs {alpha}"
            );
        }
    }

    #[test]
    fn tapered_energy_scales_with_duty() {
        for (o_f, o_tau, l) in [(2, 2, 1), (3, 4, 1), (2, 4, 3)] {
            let c = cfg(4, o_f, o_tau);
            let s = make_test_baseband(&c, 16, 9, 2).unwrap();
            let y = modulate(&s, &c, 1, l).unwrap();
            let eta = crate::taper::eta(o_tau, l).unwrap();
            assert!((y.mean_power() - eta * s.mean_power()).abs() < 1e-9);
        }
    }
}
