//! Per-harmonic array factor of a uniform linear TMA.
//!
//! Antenna `m` runs the schedule delayed by `m d` slots, so replica `i` sees a
//! progressive phase of `-2 pi m d (1 + N i) / D` across the array. Because
//! that progression depends on `i`, harmonic beams generally point elsewhere
//! than the main (`i = 0`) beam.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{ArrayConfig, TmaConfig};
use crate::delayctl::{check_delay, num_delays};
use crate::error::{Result, TmaError};
use crate::math::rational_phase;
use crate::modseq::harmonic_alpha;
use crate::taper::tapered_coefficient;

pub const DEFAULT_GRID_STEP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AfMode {
    /// Propagation phase evaluated at the carrier only.
    #[default]
    Simplified,
    /// Propagation phase evaluated at the replica's own frequency
    /// `f_c + f_p/N + i f_p`.
    Exact,
}

fn check_antenna(acfg: &ArrayConfig, m: usize) -> Result<()> {
    if m >= acfg.n_antennas() {
        return Err(TmaError::IndexOutOfRange {
            what: "antenna",
            index: m,
            bound: acfg.n_antennas(),
        });
    }
    Ok(())
}

/// Phase of replica `i` at antenna `m` under progressive delay `d`,
/// `-2 pi m d (1/D + i/O_tau)`, wrapped to `(-pi, pi]`.
pub fn antenna_phase(
    cfg: &TmaConfig,
    acfg: &ArrayConfig,
    m: usize,
    i: i64,
    d: usize,
) -> Result<f64> {
    check_antenna(acfg, m)?;
    let count = num_delays(cfg);
    check_delay(d, count)?;
    Ok(progressive_phase(cfg, m as i128 * d as i128, i))
}

// -2 pi * shift * (1 + N i) / D for an absolute per-antenna delay `shift`
fn progressive_phase(cfg: &TmaConfig, shift: i128, i: i64) -> f64 {
    let k = 1 + cfg.n_phases() as i128 * i as i128;
    rational_phase(shift * k, num_delays(cfg))
}

fn propagation_scale(cfg: &TmaConfig, acfg: &ArrayConfig, i: i64, mode: AfMode) -> f64 {
    match mode {
        AfMode::Simplified => 1.0,
        AfMode::Exact => 1.0 + cfg.replica_freq(i) / acfg.carrier_freq(),
    }
}

// sum_m w_m e^{j phase_m} e^{-j 2 pi m d_lambda scale sin(theta)} / sqrt(M)
fn array_sum(weights: &[Complex64], spacing: f64, theta_deg: f64) -> Complex64 {
    let u = theta_deg.to_radians().sin();
    let sum: Complex64 = weights
        .iter()
        .enumerate()
        .map(|(m, w)| w * Complex64::from_polar(1.0, -2.0 * PI * m as f64 * spacing * u))
        .sum();
    sum / (weights.len() as f64).sqrt()
}

/// Array factor of replica `i` at angle `theta_deg` with progressive delay `d`.
pub fn array_factor(
    acfg: &ArrayConfig,
    cfg: &TmaConfig,
    theta_deg: f64,
    i: i64,
    d: usize,
    mode: AfMode,
) -> Result<Complex64> {
    check_delay(d, num_delays(cfg))?;
    let alpha = harmonic_alpha(cfg.n_phases(), i);
    let weights: Vec<Complex64> = (0..acfg.n_antennas())
        .map(|m| {
            alpha * Complex64::from_polar(1.0, progressive_phase(cfg, m as i128 * d as i128, i))
        })
        .collect();
    let spacing = acfg.spacing_wl() * propagation_scale(cfg, acfg, i, mode);
    Ok(array_sum(&weights, spacing, theta_deg))
}

fn steering_argument(cfg: &TmaConfig, acfg: &ArrayConfig, i: i64, d: usize) -> f64 {
    let k = 1 + cfg.n_phases() as i64 * i;
    d as f64 * k as f64 / (num_delays(cfg) as f64 * acfg.spacing_wl())
}

/// Beam direction `-asin(d (1 + iN) / (D d_lambda))` in degrees, or `None`
/// when the argument falls outside `[-1, 1]`.
pub fn beam_direction(cfg: &TmaConfig, acfg: &ArrayConfig, i: i64, d: usize) -> Option<f64> {
    let x = steering_argument(cfg, acfg, i, d);
    if (-1.0..=1.0).contains(&x) {
        Some(-x.asin().to_degrees())
    } else {
        None
    }
}

/// Every visible lobe of replica `i`: the steering argument is only defined
/// modulo `1/d_lambda`, so each shifted copy inside `[-1, 1]` is a beam
/// (including grating lobes). Ascending in angle.
pub fn visible_beam_directions(cfg: &TmaConfig, acfg: &ArrayConfig, i: i64, d: usize) -> Vec<f64> {
    let x = steering_argument(cfg, acfg, i, d);
    let period = 1.0 / acfg.spacing_wl();
    let lo = ((-1.0 - x) / period).ceil() as i64;
    let hi = ((1.0 - x) / period).floor() as i64;
    let mut dirs: Vec<f64> = (lo..=hi)
        .map(|n| x + n as f64 * period)
        .filter(|v| (-1.0 - 1e-12..=1.0 + 1e-12).contains(v))
        .map(|v| -v.clamp(-1.0, 1.0).asin().to_degrees())
        .collect();
    dirs.sort_by(f64::total_cmp);
    dirs
}

/// Angle grid from -90 to 90 degrees.
pub fn angle_grid(step_deg: f64) -> Result<Vec<f64>> {
    if !(step_deg > 0.0 && step_deg.is_finite()) || step_deg > 180.0 {
        return Err(TmaError::InvalidGrid(format!(
            "step {step_deg} must be in (0, 180]"
        )));
    }
    let n_exact = 180.0 / step_deg;
    let n = n_exact.round();
    if (n_exact - n).abs() < 1e-9 * n_exact {
        let n = n as usize;
        Ok((0..=n)
            .map(|j| -90.0 + 180.0 * j as f64 / n as f64)
            .collect())
    } else {
        let n = n_exact.floor() as usize;
        Ok((0..=n).map(|j| -90.0 + j as f64 * step_deg).collect())
    }
}

/// Options for [`beampattern_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub grid_step: f64,
    /// Per-antenna taper levels (zero slots per pulse).
    pub tapers: Option<Vec<usize>>,
    /// Per-antenna delays replacing the progressive `m d`.
    pub delays: Option<Vec<usize>>,
    pub mode: AfMode,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            grid_step: DEFAULT_GRID_STEP,
            tapers: None,
            delays: None,
            mode: AfMode::Simplified,
        }
    }
}

/// Array factor over an angle grid for a set of harmonics.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamPattern {
    pub angles: Vec<f64>,
    pub harmonics: Vec<i64>,
    /// `values[h][a]` is the AF of `harmonics[h]` at `angles[a]`.
    pub values: Vec<Vec<Complex64>>,
    pub delay: usize,
}

impl BeamPattern {
    fn row(&self, harmonic: i64) -> Option<&[Complex64]> {
        let h = self.harmonics.iter().position(|&x| x == harmonic)?;
        Some(&self.values[h])
    }

    /// `20 log10 |AF|` for one harmonic, floored at -300 dB.
    pub fn magnitude_db(&self, harmonic: i64) -> Option<Vec<f64>> {
        Some(
            self.row(harmonic)?
                .iter()
                .map(|v| magnitude_db(*v))
                .collect(),
        )
    }

    /// Angle of the largest `|AF|` (first one on ties).
    pub fn peak_angle(&self, harmonic: i64) -> Option<f64> {
        let row = self.row(harmonic)?;
        let mut best = 0;
        for (a, v) in row.iter().enumerate() {
            if v.norm() > row[best].norm() {
                best = a;
            }
        }
        Some(self.angles[best])
    }

    /// Every grid angle whose `|AF|` is within relative `rel_tol` of the peak.
    pub fn peak_angles(&self, harmonic: i64, rel_tol: f64) -> Option<Vec<f64>> {
        let row = self.row(harmonic)?;
        let peak = row.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Some(
            self.angles
                .iter()
                .zip(row)
                .filter(|(_, v)| v.norm() >= peak * (1.0 - rel_tol))
                .map(|(a, _)| *a)
                .collect(),
        )
    }

    /// Level of the first sidelobe relative to the peak, in dB. Walks from the
    /// peak to the first local minimum on each side and takes the largest
    /// local maximum right after it.
    pub fn first_sidelobe_db(&self, harmonic: i64) -> Option<f64> {
        let mag: Vec<f64> = self.row(harmonic)?.iter().map(|v| v.norm()).collect();
        let peak_idx = (0..mag.len()).max_by(|&a, &b| mag[a].total_cmp(&mag[b]))?;
        let peak = mag[peak_idx];
        let mut lobes = Vec::new();
        // right side
        let mut j = peak_idx;
        while j + 1 < mag.len() && mag[j + 1] <= mag[j] {
            j += 1;
        }
        while j + 1 < mag.len() && mag[j + 1] >= mag[j] {
            j += 1;
        }
        if j > peak_idx && j < mag.len() {
            lobes.push(mag[j]);
        }
        // left side
        let mut j = peak_idx;
        while j > 0 && mag[j - 1] <= mag[j] {
            j -= 1;
        }
        while j > 0 && mag[j - 1] >= mag[j] {
            j -= 1;
        }
        if j < peak_idx {
            lobes.push(mag[j]);
        }
        let lobe = lobes.into_iter().fold(f64::NEG_INFINITY, f64::max);
        if lobe.is_finite() {
            Some(20.0 * (lobe / peak).log10())
        } else {
            None
        }
    }
}

pub fn magnitude_db(v: Complex64) -> f64 {
    let m = v.norm();
    if m > 0.0 {
        (20.0 * m.log10()).max(-300.0)
    } else {
        -300.0
    }
}

/// Evaluates the array factor of each harmonic over the angle grid.
///
/// With per-antenna tapers, antenna `m` is weighted by its tapered
/// coefficient at harmonic `1 + iN` (amplitude and phase) instead of the
/// uniform `alpha(i)`.
pub fn beampattern_sweep(
    acfg: &ArrayConfig,
    cfg: &TmaConfig,
    d: usize,
    harmonics: &[i64],
    opts: &SweepOptions,
) -> Result<BeamPattern> {
    let count = num_delays(cfg);
    check_delay(d, count)?;
    let m_count = acfg.n_antennas();
    if let Some(t) = &opts.tapers {
        if t.len() != m_count {
            return Err(TmaError::InvalidArgument(format!(
                "{} taper levels given for {m_count} antennas",
                t.len()
            )));
        }
        if let Some(&level) = t.iter().find(|&&l| l > cfg.o_tau()) {
            return Err(TmaError::TaperOutOfRange {
                level,
                o_tau: cfg.o_tau(),
            });
        }
    }
    if let Some(ds) = &opts.delays {
        if ds.len() != m_count {
            return Err(TmaError::InvalidArgument(format!(
                "{} delays given for {m_count} antennas",
                ds.len()
            )));
        }
        for &x in ds {
            check_delay(x, count)?;
        }
    }
    let angles = angle_grid(opts.grid_step)?;
    let mut values = Vec::with_capacity(harmonics.len());
    for &i in harmonics {
        let k = 1 + cfg.n_phases() as i64 * i;
        let weights = (0..m_count)
            .map(|m| {
                let amp = match &opts.tapers {
                    Some(t) => tapered_coefficient(cfg.n_phases(), k, cfg.o_tau(), t[m])?,
                    None => harmonic_alpha(cfg.n_phases(), i),
                };
                let shift = match &opts.delays {
                    Some(ds) => ds[m] as i128,
                    None => m as i128 * d as i128,
                };
                Ok(amp * Complex64::from_polar(1.0, progressive_phase(cfg, shift, i)))
            })
            .collect::<Result<Vec<_>>>()?;
        let spacing = acfg.spacing_wl() * propagation_scale(cfg, acfg, i, opts.mode);
        values.push(
            angles
                .iter()
                .map(|&a| array_sum(&weights, spacing, a))
                .collect(),
        );
    }
    Ok(BeamPattern {
        angles,
        harmonics: harmonics.to_vec(),
        values,
        delay: d,
    })
}
