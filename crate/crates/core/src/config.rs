//! TMA parameterization and derived timing quantities.
//!
//! All frequencies are in Hz. Setting `sample_rate = 1` works in units
//! normalized to the baseband sample rate.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TmaError};

/// Raw, unvalidated switch parameters as they appear in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TmaParams {
    pub n_phases: usize,
    pub o_f: usize,
    pub o_tau: usize,
    pub sample_rate: f64,
}

impl TmaParams {
    pub fn validate(self) -> Result<TmaConfig> {
        TmaConfig::new(self.n_phases, self.o_f, self.o_tau, self.sample_rate)
    }
}

/// Validated switch parameterization.
///
/// The oversampling factor `O = o_f * o_tau` sets the switch rate
/// `f_sw = O f_s`. A pulse lasts `o_tau` switch slots, so the pulse frequency
/// is `f_p = o_f f_s` and the schedule period of `N` pulses repeats at
/// `f_mod = f_p / N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TmaParams", into = "TmaParams")]
pub struct TmaConfig {
    n_phases: usize,
    o_f: usize,
    o_tau: usize,
    sample_rate: f64,
    switch_rate: f64,
    slot_duration: f64,
    pulse_duration: f64,
    pulse_freq: f64,
    mod_freq: f64,
}

impl TmaConfig {
    pub fn new(n_phases: usize, o_f: usize, o_tau: usize, sample_rate: f64) -> Result<Self> {
        if n_phases < 2 {
            return Err(TmaError::PhaseCountTooSmall(n_phases));
        }
        if o_f == 0 {
            return Err(TmaError::NonPositiveParameter("o_f"));
        }
        if o_tau == 0 {
            return Err(TmaError::NonPositiveParameter("o_tau"));
        }
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(TmaError::NonPositiveParameter("sample_rate"));
        }
        let oversampling = (o_f * o_tau) as f64;
        let switch_rate = oversampling * sample_rate;
        let pulse_freq = o_f as f64 * sample_rate;
        Ok(Self {
            n_phases,
            o_f,
            o_tau,
            sample_rate,
            switch_rate,
            slot_duration: 1.0 / switch_rate,
            pulse_duration: 1.0 / pulse_freq,
            pulse_freq,
            mod_freq: pulse_freq / n_phases as f64,
        })
    }

    pub fn params(&self) -> TmaParams {
        TmaParams {
            n_phases: self.n_phases,
            o_f: self.o_f,
            o_tau: self.o_tau,
            sample_rate: self.sample_rate,
        }
    }

    /// Number of switch states `N`.
    pub fn n_phases(&self) -> usize {
        self.n_phases
    }

    /// Pulse-frequency scaling factor `O_f`.
    pub fn o_f(&self) -> usize {
        self.o_f
    }

    /// Pulse-duration scaling factor `O_tau`.
    pub fn o_tau(&self) -> usize {
        self.o_tau
    }

    /// Total oversampling factor `O = O_f O_tau`.
    pub fn oversampling(&self) -> usize {
        self.o_f * self.o_tau
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    /// Switch rate `f_sw = O f_s`.
    pub fn switch_rate(&self) -> f64 {
        self.switch_rate
    }

    /// Slot duration `T_sw = 1/f_sw`.
    pub fn slot_duration(&self) -> f64 {
        self.slot_duration
    }

    /// Pulse duration `T_p = O_tau T_sw`.
    pub fn pulse_duration(&self) -> f64 {
        self.pulse_duration
    }

    /// Pulse frequency `f_p = O_f f_s`, the spacing of harmonic replicas.
    pub fn pulse_freq(&self) -> f64 {
        self.pulse_freq
    }

    /// Modulating frequency `f_mod = f_p / N`, offset of the main harmonic.
    pub fn mod_freq(&self) -> f64 {
        self.mod_freq
    }

    /// Slots in one schedule period, `N O_tau`. Also the number of distinct
    /// cyclic delays.
    pub fn period_slots(&self) -> usize {
        self.n_phases * self.o_tau
    }

    /// Absolute frequency of harmonic index `k` of the schedule period.
    pub fn harmonic_freq(&self, k: i64) -> f64 {
        k as f64 * self.mod_freq
    }

    /// Center frequency of replica `i`, `f_p/N + i f_p`.
    pub fn replica_freq(&self, i: i64) -> f64 {
        self.mod_freq + i as f64 * self.pulse_freq
    }
}

impl TryFrom<TmaParams> for TmaConfig {
    type Error = TmaError;

    fn try_from(p: TmaParams) -> Result<Self> {
        p.validate()
    }
}

impl From<TmaConfig> for TmaParams {
    fn from(c: TmaConfig) -> Self {
        c.params()
    }
}

/// Validated config with the derived quantities filled in.
pub fn validate(params: TmaParams) -> Result<TmaConfig> {
    params.validate()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct ArrayParams {
    n_antennas: usize,
    spacing_wl: f64,
    carrier_freq: f64,
}

/// Uniform linear array geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ArrayParams", into = "ArrayParams")]
pub struct ArrayConfig {
    n_antennas: usize,
    spacing_wl: f64,
    carrier_freq: f64,
}

impl ArrayConfig {
    pub fn new(n_antennas: usize, spacing_wl: f64, carrier_freq: f64) -> Result<Self> {
        if n_antennas == 0 {
            return Err(TmaError::NonPositiveParameter("n_antennas"));
        }
        if !(spacing_wl > 0.0 && spacing_wl.is_finite()) {
            return Err(TmaError::NonPositiveParameter("spacing_wl"));
        }
        if !(carrier_freq > 0.0 && carrier_freq.is_finite()) {
            return Err(TmaError::NonPositiveParameter("carrier_freq"));
        }
        Ok(Self {
            n_antennas,
            spacing_wl,
            carrier_freq,
        })
    }

    /// Number of antennas `M`.
    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    /// Element spacing in wavelengths at the carrier.
    pub fn spacing_wl(&self) -> f64 {
        self.spacing_wl
    }

    pub fn carrier_freq(&self) -> f64 {
        self.carrier_freq
    }
}

impl TryFrom<ArrayParams> for ArrayConfig {
    type Error = TmaError;

    fn try_from(p: ArrayParams) -> Result<Self> {
        ArrayConfig::new(p.n_antennas, p.spacing_wl, p.carrier_freq)
    }
}

impl From<ArrayConfig> for ArrayParams {
    fn from(c: ArrayConfig) -> Self {
        ArrayParams {
            n_antennas: c.n_antennas,
            spacing_wl: c.spacing_wl,
            carrier_freq: c.carrier_freq,
        }
    }
}

/// Contents of a JSON config file: switch parameters plus array geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    #[serde(flatten)]
    pub tma: TmaConfig,
    pub array: ArrayConfig,
}
