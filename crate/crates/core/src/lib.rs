//! Signal model of oversampled time-modulated arrays (TMA).
//!
//! Every antenna of a TMA sits behind an `N`-throw switch whose states map to
//! phases uniformly spread on the unit circle. The switch runs at `O` times the
//! baseband sample rate, and the oversampling is split between shortening the
//! pulses (`o_f`, wider harmonic spacing) and repeating states (`o_tau`, finer
//! delay resolution). A cyclic delay of the periodic schedule rotates the
//! phase of every harmonic replica, which is how the array steers.
//!
//! Modules:
//!
//! * [`config`] - parameterization and derived timing quantities
//! * [`modseq`] - switch schedules and their closed-form harmonic spectra
//! * [`delayctl`] - cyclic delays, per-harmonic phase and resolution
//! * [`modulator`] - time-domain modulation of a baseband signal and replica prediction
//! * [`beamformer`] - per-harmonic array factors of a uniform linear array
//! * [`taper`] - zero-insertion amplitude tapering
//! * [`oracle`] - brute-force DFT ground truth for every closed-form result
//! * [`verify`] - grid checks tying the closed forms to the oracle

pub mod beamformer;
pub mod config;
pub mod delayctl;
mod error;
pub mod math;
pub mod modseq;
pub mod modulator;
pub mod oracle;
pub mod taper;
pub mod verify;

pub use config::{ArrayConfig, SimConfig, TmaConfig};
pub use error::{Result, TmaError};
pub use num_complex::Complex64;
