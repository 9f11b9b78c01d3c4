//! Zero-insertion tapering.
//!
//! Switching off the last `l` of the `O_tau` slots in every pulse shortens the
//! active pulse to `eta T_p` with `eta = (O_tau - l)/O_tau`. This gives
//! `O_tau + 1` uniformly spaced amplitude levels, but it also changes the
//! phase of every harmonic and can raise the power of the unwanted replicas.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, TmaError};
use crate::math::{power_db, rational_phase, sinc, wrap_phase};
use crate::modseq::{harmonic_exists, sequence_coefficient};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaperSetting {
    level: usize,
    eta: f64,
}

impl TaperSetting {
    pub fn new(o_tau: usize, level: usize) -> Result<Self> {
        Ok(Self {
            level,
            eta: eta(o_tau, level)?,
        })
    }

    /// Zero slots per pulse.
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

fn check_level(o_tau: usize, level: usize) -> Result<()> {
    if level > o_tau {
        Err(TmaError::TaperOutOfRange { level, o_tau })
    } else {
        Ok(())
    }
}

/// Duty factor `(O_tau - l)/O_tau`.
pub fn eta(o_tau: usize, level: usize) -> Result<f64> {
    check_level(o_tau, level)?;
    Ok((o_tau - level) as f64 / o_tau as f64)
}

/// `{0, 1/O_tau, ..., 1}` in ascending order.
pub fn amplitude_levels(o_tau: usize) -> Vec<f64> {
    (0..=o_tau).map(|j| j as f64 / o_tau as f64).collect()
}

/// Coefficient of harmonic `k` of the tapered schedule,
/// `eta sinc(pi k eta / N) e^{-j pi k eta / N} I(k)`.
pub fn tapered_coefficient(
    n_phases: usize,
    k: i64,
    o_tau: usize,
    level: usize,
) -> Result<Complex64> {
    let eta = eta(o_tau, level)?;
    if !harmonic_exists(n_phases, k) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if level == 0 {
        return Ok(sequence_coefficient(n_phases, k));
    }
    let x = PI * k as f64 * eta / n_phases as f64;
    Ok(Complex64::from_polar(eta * sinc(x), -x))
}

/// Extra phase of the tapered coefficient relative to the untapered one,
/// `-pi (k/N)(eta - 1)`. Sign flips of the sinc factors are not folded in,
/// so the offset stays linear in `1 - eta`.
pub fn taper_phase_offset(n_phases: usize, k: i64, o_tau: usize, level: usize) -> Result<f64> {
    let eta = eta(o_tau, level)?;
    Ok(-PI * (k as f64 / n_phases as f64) * (eta - 1.0))
}

/// Nearest delay correction for a taper phase offset and what is left over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaperCompensation {
    /// Extra slots of delay to add (modulo `D`).
    pub delay_steps: usize,
    /// Offset remaining after the correction, in `(-pi, pi]`.
    pub residual_rad: f64,
}

/// Best quantized delay correction of the taper offset on harmonic `k`.
///
/// A delay of `s` slots rotates harmonic `k` by `-2 pi k s / D`. Offsets are
/// generally not multiples of that grid, so a residual remains.
pub fn taper_compensation(
    n_phases: usize,
    k: i64,
    o_tau: usize,
    level: usize,
) -> Result<TaperCompensation> {
    let offset = taper_phase_offset(n_phases, k, o_tau, level)?;
    let count = n_phases * o_tau;
    let mut best = TaperCompensation {
        delay_steps: 0,
        residual_rad: wrap_phase(offset),
    };
    for s in 1..count {
        let residual = wrap_phase(offset + rational_phase(k as i128 * s as i128, count));
        if residual.abs() < best.residual_rad.abs() - 1e-15 {
            best = TaperCompensation {
                delay_steps: s,
                residual_rad: residual,
            };
        }
    }
    Ok(best)
}

/// Location of the largest undesired-harmonic power increase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstCase {
    pub gain_db: f64,
    pub harmonic: i64,
    pub level: usize,
}

/// Largest power increase of any replica `i != 0`, `|i| <= i_max`, over the
/// intermediate taper levels `1..O_tau`, relative to the untapered schedule.
pub fn worst_case_harmonic_gain(n_phases: usize, o_tau: usize, i_max: usize) -> Result<WorstCase> {
    if o_tau < 2 {
        return Err(TmaError::NoTaperLevels(o_tau));
    }
    if i_max == 0 {
        return Err(TmaError::InvalidArgument("i_max must be at least 1".into()));
    }
    let bound = i_max as i64;
    let mut worst: Option<WorstCase> = None;
    for level in 1..o_tau {
        for i in (-bound..=bound).filter(|&i| i != 0) {
            let k = 1 + i * n_phases as i64;
            let tapered = tapered_coefficient(n_phases, k, o_tau, level)?.norm_sqr();
            let base = sequence_coefficient(n_phases, k).norm_sqr();
            let gain_db = power_db(tapered / base);
            if worst.is_none_or(|w| gain_db > w.gain_db) {
                worst = Some(WorstCase {
                    gain_db,
                    harmonic: i,
                    level,
                });
            }
        }
    }
    Ok(worst.expect("at least one level and harmonic"))
}

pub fn worst_case_harmonic_gain_db(n_phases: usize, o_tau: usize, i_max: usize) -> Result<f64> {
    worst_case_harmonic_gain(n_phases, o_tau, i_max).map(|w| w.gain_db)
}
