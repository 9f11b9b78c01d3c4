//! Cyclic delays and the phase shifts they produce on each harmonic.
//!
//! Phases returned here are wrapped to `(-pi, pi]`. They are computed from the
//! integer product `d (1 + N i)` reduced modulo `D` first, so large harmonic
//! indices lose no precision.

use std::f64::consts::PI;

use serde::Serialize;

use crate::config::TmaConfig;
use crate::error::{Result, TmaError};
use crate::math::rational_phase;

/// A cyclic delay of `delay` slots out of `count = N O_tau` possible values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DelaySetting {
    delay: usize,
    count: usize,
}

impl DelaySetting {
    pub fn new(cfg: &TmaConfig, delay: usize) -> Result<Self> {
        let count = num_delays(cfg);
        check_delay(delay, count)?;
        Ok(Self { delay, count })
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

pub(crate) fn check_delay(delay: usize, count: usize) -> Result<()> {
    if delay >= count {
        Err(TmaError::DelayOutOfRange { delay, count })
    } else {
        Ok(())
    }
}

/// Number of distinct cyclic delays, `D = N O_tau`.
pub fn num_delays(cfg: &TmaConfig) -> usize {
    cfg.n_phases() * cfg.o_tau()
}

/// Phase of replica `i` under delay `d`: `-2 pi (d/D)(1 + N i)`.
pub fn delay_phase(cfg: &TmaConfig, i: i64, d: usize) -> Result<f64> {
    let count = num_delays(cfg);
    check_delay(d, count)?;
    let k = 1 + cfg.n_phases() as i128 * i as i128;
    Ok(rational_phase(d as i128 * k, count))
}

/// Smallest realizable phase step, `2 pi / (N O_tau)`.
pub fn phase_resolution(cfg: &TmaConfig) -> f64 {
    2.0 * PI / num_delays(cfg) as f64
}

/// `log2` of the number of distinct phases. Non-integer when `N O_tau` is not
/// a power of two.
pub fn effective_bits(cfg: &TmaConfig) -> f64 {
    (num_delays(cfg) as f64).log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolutionRow {
    pub o_tau: usize,
    pub n_phases: usize,
    pub effective_bits: f64,
}

/// Effective bits for every `(N, O_tau)` pair, `N`-major.
pub fn resolution_table(n_phases: &[usize], o_taus: &[usize]) -> Result<Vec<ResolutionRow>> {
    let mut rows = Vec::with_capacity(n_phases.len() * o_taus.len());
    for &n in n_phases {
        for &o_tau in o_taus {
            let cfg = TmaConfig::new(n, 1, o_tau, 1.0)?;
            rows.push(ResolutionRow {
                o_tau,
                n_phases: n,
                effective_bits: effective_bits(&cfg),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg(n: usize, o_tau: usize) -> TmaConfig {
        TmaConfig::new(n, 1, o_tau, 1.0).unwrap()
    }

    #[test]
    fn delay_counts() {
        assert_eq!(num_delays(&cfg(4, 1)), 4);
        assert_eq!(num_delays(&cfg(4, 2)), 8);
        assert_eq!(num_delays(&cfg(8, 4)), 32);
    }

    #[test]
    fn delay_phases() {
        assert_eq!(delay_phase(&cfg(4, 2), 0, 0).unwrap(), 0.0);
        assert_eq!(delay_phase(&cfg(3, 5), 7, 0).unwrap(), 0.0);
        assert_abs_diff_eq!(delay_phase(&cfg(4, 2), 0, 1).unwrap(), -PI / 4.0);
        assert_abs_diff_eq!(delay_phase(&cfg(4, 2), -1, 1).unwrap(), 3.0 * PI / 4.0);
        assert_eq!(
            delay_phase(&cfg(4, 2), 0, 8),
            Err(TmaError::DelayOutOfRange { delay: 8, count: 8 })
        );
        assert!(DelaySetting::new(&cfg(4, 2), 8).is_err());
        assert_eq!(DelaySetting::new(&cfg(4, 2), 7).unwrap().count(), 8);
    }

    #[test]
    fn phases_match_continuous_delay() {
        // -2 pi d T_sw f for f = f_p/N + i f_p
        for (n, o_f, o_tau) in [(4, 2, 2), (3, 1, 4), (8, 3, 1)] {
            let c = TmaConfig::new(n, o_f, o_tau, 1.7).unwrap();
            for d in 0..num_delays(&c) {
                for i in -3..=3 {
                    let f = c.replica_freq(i);
                    let cont = -2.0 * PI * d as f64 * c.slot_duration() * f;
                    let diff = crate::math::wrap_phase(cont - delay_phase(&c, i, d).unwrap());
                    assert!(diff.abs() < 1e-9, "n={n} d={d} i={i} diff={diff}");
                }
            }
        }
    }

    #[test]
    fn resolution_and_bits() {
        assert_abs_diff_eq!(phase_resolution(&cfg(4, 1)), PI / 2.0);
        assert_abs_diff_eq!(phase_resolution(&cfg(4, 2)), PI / 4.0);
        assert_abs_diff_eq!(phase_resolution(&cfg(2, 8)), PI / 8.0);
        assert_eq!(effective_bits(&cfg(4, 1)), 2.0);
        assert_eq!(effective_bits(&cfg(4, 4)), 4.0);
        assert_abs_diff_eq!(effective_bits(&cfg(3, 2)), 6f64.log2());
    }

    #[test]
    fn resolution_rows() {
        let rows = resolution_table(&[4], &[1, 2, 4]).unwrap();
        let bits: Vec<f64> = rows.iter().map(|r| r.effective_bits).collect();
        assert_eq!(bits, vec![2.0, 3.0, 4.0]);
        assert!(resolution_table(&[1], &[1]).is_err());
    }
}
