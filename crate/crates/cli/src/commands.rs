use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use tma_core::beamformer::{beampattern_sweep, AfMode, SweepOptions};
use tma_core::delayctl::{num_delays, resolution_table};
use tma_core::modseq::{harmonic_power_db, SwitchSchedule};
use tma_core::modulator::{
    make_test_baseband, modulate, predict_tapered_replicas, verify_replicas,
};
use tma_core::taper::worst_case_harmonic_gain;
use tma_core::verify::{run_all, VerifyGrid};
use tma_core::{ArrayConfig, SimConfig, TmaConfig};

use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::svg::line_plot;
use crate::table::{Cell, Table};
use crate::{
    BeampatternArgs, Cli, Command, HarmonicsArgs, ModsigArgs, ReplicasArgs, ResolutionArgs,
    TaperingArgs, VerifyArgs,
};

const DEFAULT_SPACING_WL: f64 = 0.5;
const DEFAULT_CARRIER_HZ: f64 = 1e9;

/// Output directory, SVG flag and the manifest being filled in.
struct Session {
    out: PathBuf,
    svg: bool,
    manifest: RunManifest,
}

impl Session {
    fn new(cli: &Cli, command: &str, config: serde_json::Value) -> Result<Self, CliError> {
        fs::create_dir_all(&cli.out).map_err(|e| CliError::io(&cli.out, e))?;
        Ok(Self {
            out: cli.out.clone(),
            svg: cli.svg,
            manifest: RunManifest::new(command, config),
        })
    }

    fn write_file(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.out.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.manifest.outputs.push(name.to_string());
        Ok(())
    }

    fn write_table(&mut self, stem: &str, table: &Table, title: &str) -> Result<(), CliError> {
        self.write_file(&format!("{stem}.csv"), &table.to_csv())?;
        if self.svg {
            self.write_file(
                &format!("{stem}.svg"),
                &line_plot(title, table, Some(-60.0)),
            )?;
        }
        Ok(())
    }

    fn assume(&mut self, text: impl Into<String>) {
        self.manifest.assumptions.push(text.into());
    }

    fn finish(self) -> Result<(), CliError> {
        self.manifest.write(&self.out)?;
        Ok(())
    }
}

fn load_config(path: Option<&Path>) -> Result<Option<SimConfig>, CliError> {
    let Some(path) = path else { return Ok(None) };
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|source| CliError::Config {
            path: path.to_path_buf(),
            source,
        })
}

fn to_value<T: Serialize>(x: &T) -> serde_json::Value {
    serde_json::to_value(x).expect("config serializes")
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let sim = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Modsig(a) => modsig(cli, sim, a),
        Command::Harmonics(a) => harmonics(cli, a),
        Command::Resolution(a) => resolution(cli, a),
        Command::Beampattern(a) => beampattern(cli, sim, a),
        Command::Tapering(a) => tapering(cli, a),
        Command::Replicas(a) => replicas(cli, sim, a),
        Command::Verify(a) => verify(cli, a),
    }
}

fn modsig(cli: &Cli, sim: Option<SimConfig>, a: &ModsigArgs) -> Result<(), CliError> {
    let base = sim.map(|s| s.tma);
    let n = a.n_phases.or(base.map(|c| c.n_phases())).unwrap_or(4);
    let fs = base.map_or(1.0, |c| c.sample_rate());
    let panels: Vec<(usize, usize)> = match (a.o_f, a.o_tau, base) {
        (Some(o_f), Some(o_tau), _) => vec![(o_f, o_tau)],
        (_, _, Some(c)) => vec![(c.o_f(), c.o_tau())],
        _ => vec![(1, 1), (4, 1), (2, 2), (1, 4)],
    };
    let configs = panels
        .iter()
        .map(|&(o_f, o_tau)| TmaConfig::new(n, o_f, o_tau, fs))
        .collect::<Result<Vec<_>, _>>()?;
    let mut session = Session::new(
        cli,
        "modsig",
        json!({
            "panels": configs,
            "delay": a.delay,
            "taper": a.taper,
            "samples_per_slot": a.samples_per_slot,
        }),
    )?;
    if panels.len() > 1 {
        session.assume("panel (o_f, o_tau) = (1, 1) is the reference at the baseband rate; the others factor O = 4");
    }
    for cfg in &configs {
        let schedule = SwitchSchedule::build(cfg, a.delay, a.taper)?;
        let mut table = Table::new([
            "slot_index",
            "time_s",
            "state_index",
            "phase_rad",
            "re",
            "im",
        ]);
        for r in schedule.rows(a.samples_per_slot) {
            table.push(vec![
                Cell::Int(r.slot_index as i64),
                r.time_s.into(),
                Cell::Int(r.state_index),
                r.phase_rad.into(),
                r.re.into(),
                r.im.into(),
            ]);
        }
        let stem = format!("modsig_of{}_otau{}", cfg.o_f(), cfg.o_tau());
        session.write_table(&stem, &table, &stem)?;
    }
    session.finish()
}

fn harmonics(cli: &Cli, a: &HarmonicsArgs) -> Result<(), CliError> {
    if let Some(&bad) = a.n_phases.iter().find(|&&n| n < 2) {
        return Err(tma_core::TmaError::PhaseCountTooSmall(bad).into());
    }
    if a.n_max < 2 {
        return Err(CliError::Usage("--n-max must be at least 2".into()));
    }
    let mut session = Session::new(
        cli,
        "harmonics",
        json!({"n_phases": a.n_phases, "i_max": a.i_max, "n_max": a.n_max}),
    )?;
    session.assume("freq_norm is the replica center frequency over the pulse rate, 1/N + i");

    let mut per_n = Table::new(["n_phases", "harmonic_index", "freq_norm", "power_db"]);
    let bound = a.i_max as i64;
    for &n in &a.n_phases {
        for i in -bound..=bound {
            per_n.push(vec![
                Cell::Int(n as i64),
                Cell::Int(i),
                (1.0 / n as f64 + i as f64).into(),
                harmonic_power_db(n, i).into(),
            ]);
        }
    }
    session.write_file("harmonics_power.csv", &per_n.to_csv())?;
    if session.svg {
        for &n in &a.n_phases {
            let mut t = Table::new(["freq_norm", "power_db"]);
            for i in -bound..=bound {
                t.push(vec![
                    (1.0 / n as f64 + i as f64).into(),
                    harmonic_power_db(n, i).into(),
                ]);
            }
            session.write_file(
                &format!("harmonics_power_n{n}.svg"),
                &line_plot(&format!("harmonic power, N = {n}"), &t, Some(-60.0)),
            )?;
        }
    }

    let mut vs_n = Table::new(["n_phases", "main_power_db", "adjacent_power_db"]);
    for n in 2..=a.n_max {
        vs_n.push(vec![
            Cell::Int(n as i64),
            harmonic_power_db(n, 0).into(),
            harmonic_power_db(n, -1).into(),
        ]);
    }
    session.write_table("harmonics_vs_n", &vs_n, "harmonic power versus N")?;
    session.finish()
}

fn resolution(cli: &Cli, a: &ResolutionArgs) -> Result<(), CliError> {
    if a.n_phases.is_empty() || a.o_tau_max == 0 {
        return Err(CliError::Usage("empty N list or O_tau range".into()));
    }
    let o_taus: Vec<usize> = (1..=a.o_tau_max).collect();
    let rows = resolution_table(&a.n_phases, &o_taus)?;
    let mut session = Session::new(
        cli,
        "resolution",
        json!({"n_phases": a.n_phases, "o_tau": o_taus}),
    )?;
    let mut table = Table::new(["o_tau", "n_phases", "effective_bits"]);
    for r in &rows {
        table.push(vec![
            Cell::Int(r.o_tau as i64),
            Cell::Int(r.n_phases as i64),
            r.effective_bits.into(),
        ]);
    }
    session.write_file("resolution.csv", &table.to_csv())?;
    if session.svg {
        let mut header = vec!["o_tau".to_string()];
        header.extend(a.n_phases.iter().map(|n| format!("n{n}")));
        let mut wide = Table::new(header);
        for (j, &o_tau) in o_taus.iter().enumerate() {
            let mut row = vec![Cell::Int(o_tau as i64)];
            for b in 0..a.n_phases.len() {
                row.push(rows[b * o_taus.len() + j].effective_bits.into());
            }
            wide.push(row);
        }
        session.write_file("resolution.svg", &line_plot("effective bits", &wide, None))?;
    }
    session.finish()
}

fn beampattern(cli: &Cli, sim: Option<SimConfig>, a: &BeampatternArgs) -> Result<(), CliError> {
    let base_array = sim.map(|s| s.array);
    let base_tma = sim.map(|s| s.tma);
    let acfg = ArrayConfig::new(
        a.n_antennas
            .or(base_array.map(|c| c.n_antennas()))
            .unwrap_or(8),
        a.spacing
            .or(base_array.map(|c| c.spacing_wl()))
            .unwrap_or(DEFAULT_SPACING_WL),
        base_array.map_or(DEFAULT_CARRIER_HZ, |c| c.carrier_freq()),
    )?;
    let n = a.n_phases.or(base_tma.map(|c| c.n_phases())).unwrap_or(4);
    let o_f = base_tma.map_or(1, |c| c.o_f());
    let fs = base_tma.map_or(1.0, |c| c.sample_rate());
    let o_taus = match (&a.o_tau, base_tma) {
        (Some(v), _) => v.clone(),
        (None, Some(c)) => vec![c.o_tau()],
        (None, None) => vec![1, 2],
    };
    let configs = o_taus
        .iter()
        .map(|&o_tau| TmaConfig::new(n, o_f, o_tau, fs))
        .collect::<Result<Vec<_>, _>>()?;
    let mode = if a.exact {
        AfMode::Exact
    } else {
        AfMode::Simplified
    };
    let opts = SweepOptions {
        grid_step: a.step,
        mode,
        ..SweepOptions::default()
    };
    let mut session = Session::new(
        cli,
        "beampattern",
        json!({
            "array": acfg,
            "tma": configs,
            "harmonics": a.harmonic,
            "delays": a.delay,
            "grid_step_deg": a.step,
            "mode": mode,
        }),
    )?;
    if a.spacing.is_none() && base_array.is_none() {
        session.assume(format!("element spacing d_lambda = {DEFAULT_SPACING_WL}"));
    }
    session.assume("values are 20 log10 |AF| with the 1/sqrt(M) normalization, floored at -300 dB");

    for cfg in &configs {
        let delays: Vec<usize> = a
            .delay
            .clone()
            .unwrap_or_else(|| (0..num_delays(cfg)).collect());
        let mut header = vec!["theta_deg".to_string()];
        let mut columns = Vec::new();
        for &d in &delays {
            let pattern = beampattern_sweep(&acfg, cfg, d, &a.harmonic, &opts)?;
            if columns.is_empty() {
                columns.push(pattern.angles.clone());
            }
            for &i in &a.harmonic {
                header.push(format!("i{i}_d{d}"));
                columns.push(pattern.magnitude_db(i).expect("harmonic was swept"));
            }
        }
        let mut table = Table::new(header);
        for r in 0..columns[0].len() {
            table.push(columns.iter().map(|c| Cell::Num(c[r])).collect());
        }
        let stem = format!("beampattern_otau{}", cfg.o_tau());
        session.write_table(
            &stem,
            &table,
            &format!("beam pattern, O_tau = {}", cfg.o_tau()),
        )?;
    }
    session.finish()
}

fn tapering(cli: &Cli, a: &TaperingArgs) -> Result<(), CliError> {
    if a.n_min < 2 || a.n_max < a.n_min {
        return Err(CliError::Usage("need 2 <= --n-min <= --n-max".into()));
    }
    let mut session = Session::new(
        cli,
        "tapering",
        json!({"o_tau": a.o_tau, "n_min": a.n_min, "n_max": a.n_max, "i_max": a.i_max}),
    )?;
    session.assume(format!(
        "worst case over every taper level l in 1..={} and every replica 0 < |i| <= {}",
        a.o_tau, a.i_max
    ));
    let mut table = Table::new(["n_phases", "worst_case_gain_db"]);
    for n in a.n_min..=a.n_max {
        let w = worst_case_harmonic_gain(n, a.o_tau, a.i_max)?;
        table.push(vec![Cell::Int(n as i64), w.gain_db.into()]);
    }
    session.write_table("tapering", &table, "worst-case undesired harmonic gain")?;
    session.finish()
}

fn replicas(cli: &Cli, sim: Option<SimConfig>, a: &ReplicasArgs) -> Result<(), CliError> {
    let cfg = match sim {
        Some(s) => s.tma,
        None => TmaConfig::new(4, 1, 2, 1.0)?,
    };
    let i_max = a.i_max.unwrap_or(cfg.o_tau() * a.samples_per_slot);
    let s = make_test_baseband(&cfg, a.n_symbols, a.seed, a.samples_per_slot)?;
    let y = modulate(&s, &cfg, a.delay, a.taper)?;
    let predicted = predict_tapered_replicas(&cfg, a.delay, a.taper, i_max)?;
    let residual = verify_replicas(&y, &predicted, &s)?;
    let mut session = Session::new(
        cli,
        "replicas",
        json!({
            "tma": cfg,
            "delay": a.delay,
            "taper": a.taper,
            "n_symbols": s.len() / (a.samples_per_slot * cfg.oversampling()),
            "seed": a.seed,
            "samples_per_slot": a.samples_per_slot,
            "i_max": i_max,
        }),
    )?;
    session.assume(
        "test signal: seeded QPSK symbols, periodic band-limited interpolation, unit mean power",
    );
    let mut table = Table::new(["freq_hz", "psd_db"]);
    for (f, p) in y.psd_db() {
        table.push(vec![f.into(), p.into()]);
    }
    session.write_table("replicas_spectrum", &table, "modulated spectrum")?;
    let report = json!({
        "relative_residual": residual,
        "replicas": predicted.entries.iter().map(|(i, r)| json!({
            "index": i,
            "center_freq_hz": r.center_freq,
            "weight_re": r.weight.re,
            "weight_im": r.weight.im,
            "power_db": 10.0 * r.weight.norm_sqr().log10(),
        })).collect::<Vec<_>>(),
    });
    session.write_file(
        "replicas.json",
        &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"),
    )?;
    println!("relative residual {residual:.3e}");
    session.finish()
}

fn verify(cli: &Cli, a: &VerifyArgs) -> Result<(), CliError> {
    let grid = VerifyGrid {
        inject_fault: a.inject_fault,
        ..VerifyGrid::default()
    };
    let results = run_all(&grid)?;
    let mut session = Session::new(cli, "verify", to_value(&grid))?;
    println!(
        "{:<24} {:>6} {:>12} {:>10}  result",
        "check", "cases", "max_error", "tolerance"
    );
    for r in &results {
        println!(
            "{:<24} {:>6} {:>12.3e} {:>10.0e}  {}",
            r.name,
            r.cases,
            r.max_error,
            r.tolerance,
            if r.passed { "PASS" } else { "FAIL" }
        );
    }
    session.write_file(
        "verify_report.json",
        &(serde_json::to_string_pretty(&results).expect("report serializes") + "\n"),
    )?;
    session.finish()?;
    let failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join(", ")))
    }
}
