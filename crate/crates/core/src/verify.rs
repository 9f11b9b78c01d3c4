//! Grid checks tying the closed-form model to the brute-force oracle.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::config::TmaConfig;
use crate::error::Result;
use crate::modseq::{harmonic_exists, schedule_coefficient, spectrum, SwitchSchedule};
use crate::modulator::{make_test_baseband, modulate, predict_tapered_replicas, verify_replicas};
use crate::oracle::{analyze_schedule, compare, dft_bin, sample_schedule};
use crate::taper::{eta, tapered_coefficient};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(name: &str, cases: usize, max_error: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            cases,
            max_error,
            tolerance,
            passed: max_error < tolerance,
        }
    }
}

/// Parameter grid for the checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyGrid {
    pub n_phases: Vec<usize>,
    pub o_taus: Vec<usize>,
    /// Harmonics compared per schedule, in multiples of the period length.
    pub harmonic_periods: i64,
    /// Perturb one analytic coefficient by this amount (self-test).
    pub inject_fault: Option<f64>,
}

impl Default for VerifyGrid {
    fn default() -> Self {
        Self {
            n_phases: vec![2, 3, 4, 8],
            o_taus: vec![1, 2, 4],
            harmonic_periods: 2,
            inject_fault: None,
        }
    }
}

impl VerifyGrid {
    fn configs(&self) -> Result<Vec<TmaConfig>> {
        let mut out = Vec::new();
        for &n in &self.n_phases {
            for &o_tau in &self.o_taus {
                out.push(TmaConfig::new(n, 1, o_tau, 1.0)?);
            }
        }
        Ok(out)
    }
}

/// Closed-form coefficients against the oracle for every `(N, O_tau, d, l)`.
pub fn oracle_equivalence(grid: &VerifyGrid) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    let mut fault = grid.inject_fault;
    for cfg in grid.configs()? {
        let period = cfg.period_slots() as i64;
        let span = grid.harmonic_periods * period;
        for d in 0..cfg.period_slots() {
            for l in 0..=cfg.o_tau() {
                let oracle = analyze_schedule(&SwitchSchedule::build(&cfg, d, l)?, 1);
                let mut analytic = (-span..=span)
                    .map(|k| Ok((k, schedule_coefficient(&cfg, k, d, l)?)))
                    .collect::<Result<BTreeMap<i64, Complex64>>>()?;
                if let Some(delta) = fault.take() {
                    *analytic.get_mut(&1).expect("k = 1 present") += delta;
                }
                worst = worst.max(compare(&analytic, &oracle));
                cases += 1;
            }
        }
    }
    Ok(CheckResult::new("oracle_equivalence", cases, worst, 1e-9))
}

/// Off-pattern oracle bins (`k mod N != 1`) of untapered schedules.
pub fn sparsity(grid: &VerifyGrid) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for cfg in grid.configs()? {
        for d in 0..cfg.period_slots() {
            for samples_per_slot in [1, 3] {
                let oracle =
                    analyze_schedule(&SwitchSchedule::build(&cfg, d, 0)?, samples_per_slot);
                for k in 0..oracle.len() as i64 {
                    if !harmonic_exists(cfg.n_phases(), k) {
                        worst = worst.max(oracle.bin(k).norm());
                    }
                }
                cases += 1;
            }
        }
    }
    Ok(CheckResult::new("sparsity", cases, worst, 1e-12))
}

/// Truncated closed-form power sum (`|i| <= 1000`) against the duty cycle.
pub fn parseval_truncated(grid: &VerifyGrid) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for cfg in grid.configs()? {
        let n = cfg.n_phases() as i64;
        for l in 0..=cfg.o_tau() {
            let total: f64 = if l == 0 {
                spectrum(&cfg, 1000).total_power()
            } else {
                (-1000..=1000i64)
                    .map(|i| {
                        tapered_coefficient(cfg.n_phases(), 1 + i * n, cfg.o_tau(), l)
                            .map(|c| c.norm_sqr())
                    })
                    .sum::<Result<f64>>()?
            };
            worst = worst.max((total - eta(cfg.o_tau(), l)?).abs());
            cases += 1;
        }
    }
    Ok(CheckResult::new("parseval_truncated", cases, worst, 1e-3))
}

/// Complete oracle DFT power against the duty cycle.
pub fn parseval_dft(grid: &VerifyGrid) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for cfg in grid.configs()? {
        for d in 0..cfg.period_slots() {
            for l in 0..=cfg.o_tau() {
                let oracle = analyze_schedule(&SwitchSchedule::build(&cfg, d, l)?, 2);
                worst = worst.max((oracle.total_power() - eta(cfg.o_tau(), l)?).abs());
                cases += 1;
            }
        }
    }
    Ok(CheckResult::new("parseval_dft", cases, worst, 1e-12))
}

/// Plain (uncorrected) DFT bins at fine sampling converge to the exact
/// hold-corrected coefficients.
pub fn plain_dft_convergence(grid: &VerifyGrid) -> Result<CheckResult> {
    const SAMPLES_PER_SLOT: usize = 4096;
    let mut worst = 0.0f64;
    let mut cases = 0;
    for cfg in grid.configs()? {
        let schedule = SwitchSchedule::build(&cfg, 1 % cfg.period_slots(), 0)?;
        let exact = analyze_schedule(&schedule, 1);
        let fine = sample_schedule(&schedule, SAMPLES_PER_SLOT);
        let n = cfg.n_phases() as i64;
        for i in -1..=1 {
            let k = 1 + i * n;
            worst = worst.max((dft_bin(fine.samples(), k) - exact.coefficient(k)).norm());
            cases += 1;
        }
    }
    Ok(CheckResult::new(
        "plain_dft_convergence",
        cases,
        worst,
        1e-3,
    ))
}

/// Modulated test signal against the predicted replica sum.
pub fn replica_residual() -> Result<CheckResult> {
    const SAMPLES_PER_SLOT: usize = 4;
    let cases = [
        (4, 2, 2, 3, 0),
        (4, 1, 1, 1, 0),
        (3, 2, 2, 5, 1),
        (8, 2, 1, 6, 0),
    ];
    let mut worst = 0.0f64;
    for (n, o_f, o_tau, d, l) in cases {
        let cfg = TmaConfig::new(n, o_f, o_tau, 1.0)?;
        let s = make_test_baseband(&cfg, 32, 1, SAMPLES_PER_SLOT)?;
        let y = modulate(&s, &cfg, d, l)?;
        let predicted = predict_tapered_replicas(&cfg, d, l, o_tau * SAMPLES_PER_SLOT)?;
        worst = worst.max(verify_replicas(&y, &predicted, &s)?);
    }
    Ok(CheckResult::new(
        "replica_residual",
        cases.len(),
        worst,
        1e-6,
    ))
}

pub fn run_all(grid: &VerifyGrid) -> Result<Vec<CheckResult>> {
    Ok(vec![
        oracle_equivalence(grid)?,
        sparsity(grid)?,
        parseval_truncated(grid)?,
        parseval_dft(grid)?,
        plain_dft_convergence(grid)?,
        replica_residual()?,
    ])
}
