//! Config-driven experiment pipelines and their on-disk result bundles.
//!
//! Every experiment writes into its own directory:
//!
//! - `resolved_config.toml`: the experiment with every default materialized
//! - `*.csv`: data series
//! - `summary.json`: fits and statistics, the config hash, crate version and seeds
//! - `timing.json`: wall time and worker count (kept apart so the other files
//!   are bit-identical across reruns)
//! - `*.svg`: renderings of the CSV files when `output.plots` is set

pub mod config;
pub mod plot;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};

pub use config::{
    eta_to_cc_af, load_config, parse_config, parse_initial, CircuitBlock, ConfigFile, ExperimentConfig, ExperimentKind,
    NoiseBlock, OutputBlock, ParamsBlock, RunBlock,
};

use crate::analysis::{ensemble_stats, fit_t1, fit_t2, steady_summary, EnsembleStats, SteadyStateConfig};
use crate::circuit::CircuitParams;
use crate::dynamics::{run_ensemble, run_ramsey, EnsembleSpec, Observables, PropagationConfig, ProtocolSpec, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::mbl::{hamming_distance_run, level_spacing_ratios, MblMode};
use crate::meanfield::{ground_state_map, CircuitFamily};
use crate::noise::{decade_ratios, synthesize_noise, validate_psd, WelchConfig};
use crate::seeds::{derive_seed, Stream};
use crate::units::af_to_farad;

/// Frequency band of the PSD per-decade comparison.
pub const PSD_CHECK_BAND_HZ: (f64, f64) = (1e7, 1e11);
/// Samples of the first noise series exported by noise-validate.
pub const NOISE_SERIES_EXPORT: usize = 8192;

/// Where one experiment's bundle went.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub name: String,
    pub directory: PathBuf,
    pub config_hash: String,
    pub summary: Value,
}

/// Run every experiment of a config file. Relative output directories are
/// resolved against the directory holding the file.
pub fn run_config_file(path: &Path) -> Result<Vec<ExperimentOutcome>> {
    let cfg = load_config(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let root = if cfg.output.directory.is_absolute() {
        cfg.output.directory.clone()
    } else {
        base.join(&cfg.output.directory)
    };
    run_config(&cfg, &root)
}

/// Run every experiment of a parsed config under `root`. An empty list writes
/// `nothing_to_do.json` and returns no outcomes.
pub fn run_config(cfg: &ConfigFile, root: &Path) -> Result<Vec<ExperimentOutcome>> {
    fs::create_dir_all(root)?;
    if cfg.experiment.is_empty() {
        write_json(
            &root.join("nothing_to_do.json"),
            &json!({ "status": "nothing to do", "experiments": 0 }),
        )?;
        return Ok(Vec::new());
    }
    cfg.experiment
        .iter()
        .enumerate()
        .map(|(i, e)| run_experiment(&cfg.output, e, i, root))
        .collect()
}

/// Run one experiment and write its bundle to `root/<name>`.
pub fn run_experiment(output: &OutputBlock, exp: &ExperimentConfig, index: usize, root: &Path) -> Result<ExperimentOutcome> {
    let issues = exp.issues();
    if !issues.is_empty() {
        return Err(Error::Config(issues));
    }
    let name = exp.name.clone().unwrap_or_else(|| format!("{index:02}-{}", exp.kind.as_str()));
    let dir = root.join(&name);
    fs::create_dir_all(&dir)?;
    let (echo, hash) = config::resolved_echo(output, exp)?;
    fs::write(dir.join("resolved_config.toml"), &echo)?;
    fs::write(dir.join("config.sha256"), format!("{hash}\n"))?;

    let start = Instant::now();
    let (results, seeds) = match exp.kind {
        ExperimentKind::GroundStateMap => run_ground_state_map(exp, &dir)?,
        ExperimentKind::Rabi => run_rabi(exp, &dir, output.trajectories)?,
        ExperimentKind::Ramsey => run_ramsey_kind(exp, &dir)?,
        ExperimentKind::EtaSweep => run_eta_sweep(exp, &dir)?,
        ExperimentKind::Histogram => run_histogram(exp, &dir)?,
        ExperimentKind::MblClean | ExperimentKind::MblDissipative => run_mbl(exp, &dir)?,
        ExperimentKind::LevelStats => run_level_stats(exp, &dir)?,
        ExperimentKind::NoiseValidate => run_noise_validate(exp, &dir)?,
    };
    let wall = start.elapsed().as_secs_f64();

    let summary = json!({
        "kind": exp.kind.as_str(),
        "name": name,
        "config_hash": hash,
        "crate": { "name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION") },
        "resolved_config": echo,
        "seeds": seeds,
        "derived": derived(exp)?,
        "results": results,
    });
    write_json(&dir.join("summary.json"), &summary)?;
    write_json(
        &dir.join("timing.json"),
        &json!({ "wall_time_s": wall, "workers": rayon::current_num_threads() }),
    )?;
    if output.plots {
        plot::render_dir(&dir)?;
    }
    Ok(ExperimentOutcome {
        name,
        directory: dir,
        config_hash: hash,
        summary,
    })
}

/// Circuit quantities implied by the config (absent for eta-sweeps, which
/// build one circuit per η).
fn derived(exp: &ExperimentConfig) -> Result<Value> {
    if exp.kind == ExperimentKind::EtaSweep {
        return Ok(Value::Null);
    }
    let c = exp.base_circuit()?;
    Ok(json!({
        "coupling_capacitance_af": exp.coupling_capacitance_af()?,
        "eta": c.eta(),
        "charging_energy_ghz": c.mean_charging_energy(),
        "charging_to_josephson": c.mean_charging_energy() / c.mean_josephson_energy(),
        "warnings": c.warnings(),
    }))
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Numeric CSV with a header row.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::Io(format!("row of {} values for {} columns in {}", row.len(), header.len(), path.display())));
        }
        w.write_record(row.iter().map(|x| x.to_string())).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

fn ensemble_for(exp: &ExperimentConfig) -> EnsembleSpec {
    EnsembleSpec::new(exp.run.n_traj, exp.run.master_seed)
        .with_disorder(exp.circuit.disorder_lambda)
        .with_disorder_seed(exp.circuit.disorder_seed.unwrap_or(exp.run.master_seed))
}

fn seed_record(ensemble: &EnsembleSpec, noise: bool) -> Value {
    let n = ensemble.n_traj;
    json!({
        "master_seed": ensemble.master_seed,
        "disorder_root_seed": ensemble.disorder_seed,
        "noise": if noise { (0..n).map(|i| ensemble.noise_seed(i)).collect::<Vec<_>>() } else { Vec::new() },
        "disorder": if ensemble.disorder_lambda > 0.0 { (0..n).map(|i| ensemble.disorder_seed(i)).collect::<Vec<_>>() } else { Vec::new() },
    })
}

fn record_interval(cfg: &PropagationConfig) -> f64 {
    cfg.dt_ns * cfg.record_stride as f64
}

fn steady_config(exp: &ExperimentConfig, prop: &PropagationConfig) -> SteadyStateConfig {
    let window = (exp.params.steady_window_ns / record_interval(prop)).round().max(1.0) as usize;
    SteadyStateConfig {
        n_traj: Some(exp.run.n_traj),
        ..SteadyStateConfig::new(window)
    }
}

/// Rabi ensemble with σ_z and σ_zσ_z recorded.
fn rabi_records(exp: &ExperimentConfig, circuit: &CircuitParams) -> Result<(Vec<TrajectoryRecord>, PropagationConfig)> {
    let prop = exp.propagation(circuit).with_observables(Observables::correlations());
    let protocol = ProtocolSpec::Rabi {
        ng0: exp.run.ng0,
        initial: parse_initial(&exp.params.initial_state, circuit.n_qubits())?,
    };
    let records = run_ensemble(circuit, &exp.noise_model(circuit), &protocol, &prop, &ensemble_for(exp))?;
    Ok((records, prop))
}

fn timeseries_rows(stats: &EnsembleStats) -> impl Iterator<Item = Vec<f64>> + '_ {
    (0..stats.times.len()).map(move |i| {
        vec![
            stats.times[i],
            stats.mean_jz[i],
            stats.var_jz[i],
            stats.sem_jz(i),
            stats.czz.as_ref().map_or(f64::NAN, |c| c[i]),
        ]
    })
}

const TIMESERIES_HEADER: [&str; 5] = ["t_ns", "mean_jz", "var_jz", "sem_jz", "czz"];

/// T1 fit, steady-state statistics and the envelope left at t_end.
fn rabi_analysis(exp: &ExperimentConfig, records: &[TrajectoryRecord], stats: &EnsembleStats, prop: &PropagationConfig) -> Result<Value> {
    let t1 = fit_t1(&stats.times, &stats.mean_jz);
    let steady = steady_summary(records, stats, &steady_config(exp, prop), exp.params.histogram_bins)?;
    let envelope = t1.as_ref().ok().map(|f| {
        let t_end = *stats.times.last().expect("non-empty");
        (-(t_end - f.window_ns.0) / f.tau_ns).exp()
    });
    Ok(json!({
        "t1": match &t1 { Ok(f) => serde_json::to_value(f).unwrap_or(Value::Null), Err(_) => Value::Null },
        "t1_error": t1.as_ref().err().map(|e| e.to_string()),
        "envelope_fraction_at_t_end": envelope,
        "envelope_below_5_percent": envelope.map(|e| e < 0.05),
        "steady_state": steady,
        "max_norm_drift": records.iter().map(|r| r.max_norm_drift).fold(0.0, f64::max),
        "n_traj": records.len(),
    }))
}

fn write_trajectories(dir: &Path, records: &[TrajectoryRecord]) -> Result<()> {
    let tdir = dir.join("trajectories");
    fs::create_dir_all(&tdir)?;
    for (i, r) in records.iter().enumerate() {
        let n = r.sigma_z.as_ref().map_or(0, |z| z.first().map_or(0, Vec::len));
        let names: Vec<String> = (0..n).map(|k| format!("sigma_z_{k}")).collect();
        let mut header = vec!["t_ns", "jz"];
        header.extend(names.iter().map(String::as_str));
        let rows = (0..r.len()).map(|j| {
            let mut row = vec![r.times[j], r.jz[j]];
            if let Some(z) = &r.sigma_z {
                row.extend(&z[j]);
            }
            row
        });
        write_csv(&tdir.join(format!("traj_{i:05}.csv")), &header, rows)?;
    }
    Ok(())
}

type Outcome = Result<(Value, Value)>;

fn run_ground_state_map(exp: &ExperimentConfig, dir: &Path) -> Outcome {
    let c = &exp.circuit;
    let family = CircuitFamily {
        gate_capacitance: af_to_farad(c.gate_capacitance_af),
        junction_capacitance: af_to_farad(c.junction_capacitance_af),
        josephson_energy: c.josephson_energy_ghz,
    };
    let m = exp.params.ng_points;
    let ng: Vec<f64> = (0..m).map(|i| i as f64 / (m - 1) as f64).collect();
    let map = ground_state_map(&family, &exp.params.etas, &ng)?;
    let rows = map.eta.iter().enumerate().flat_map(|(i, &eta)| {
        let map = &map;
        map.ng.iter().enumerate().map(move |(j, &g)| vec![eta, g, map.jz[i][j], map.jx[i][j], map.xi[i][j]])
    });
    write_csv(&dir.join("ground_state_map.csv"), &["eta", "ng", "jz", "jx", "xi"], rows)?;
    write_csv(
        &dir.join("xi_contours.csv"),
        &["eta", "ng_xi_plus_one", "ng_xi_minus_one"],
        map.contours.iter().map(|c| vec![c.eta, c.ng_xi_plus_one, c.ng_xi_minus_one]),
    )?;
    Ok((
        json!({ "n_eta": map.eta.len(), "n_ng": map.ng.len(), "contours": map.contours }),
        json!({}),
    ))
}

fn run_rabi(exp: &ExperimentConfig, dir: &Path, dump: bool) -> Outcome {
    let circuit = exp.base_circuit()?;
    let (records, prop) = rabi_records(exp, &circuit)?;
    let stats = ensemble_stats(&records, &[], exp.params.histogram_bins)?;
    write_csv(&dir.join("rabi_timeseries.csv"), &TIMESERIES_HEADER, timeseries_rows(&stats))?;
    if dump {
        write_trajectories(dir, &records)?;
    }
    let results = rabi_analysis(exp, &records, &stats, &prop)?;
    Ok((results, seed_record(&ensemble_for(exp), !exp.noise_model(&circuit).is_silent())))
}

fn run_ramsey_kind(exp: &ExperimentConfig, dir: &Path) -> Outcome {
    let circuit = exp.base_circuit()?;
    let p = &exp.params;
    let n = (p.free_time_max_ns / p.free_time_step_ns).floor() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 * p.free_time_step_ns).collect();
    let prop = exp.propagation(&circuit);
    let ensemble = ensemble_for(exp);
    let noise = exp.noise_model(&circuit);
    let signal = run_ramsey(&circuit, &noise, &prop, &grid, p.pulse_duration_ns, &ensemble)?;
    write_csv(
        &dir.join("ramsey.csv"),
        &["tau_ns", "mean_jz"],
        signal.free_times_ns.iter().zip(&signal.mean_jz).map(|(t, j)| vec![*t, *j]),
    )?;
    let t2 = fit_t2(&signal.free_times_ns, &signal.mean_jz);
    let ec = circuit.mean_charging_energy();
    let ej = circuit.mean_josephson_energy();
    Ok((
        json!({
            "t2": t2.as_ref().ok(),
            "t2_error": t2.as_ref().err().map(|e| e.to_string()),
            "pulse_duration_ns": signal.pulse_duration_ns,
            "single_qubit_frequency_ghz": (ec * ec + ej * ej).sqrt(),
            "n_traj": signal.n_traj,
        }),
        seed_record(&ensemble, !noise.is_silent()),
    ))
}

fn run_eta_sweep(exp: &ExperimentConfig, dir: &Path) -> Outcome {
    let c = &exp.circuit;
    let mut ts_rows = Vec::new();
    let mut t1_rows = Vec::new();
    let mut czz_rows = Vec::new();
    let mut per_eta = Vec::new();
    for &eta in &exp.params.etas {
        let cc = eta_to_cc_af(c.gate_capacitance_af, c.junction_capacitance_af, c.josephson_energy_ghz, eta)?;
        let circuit = exp.circuit_with_cc(cc)?;
        let (records, prop) = rabi_records(exp, &circuit)?;
        let stats = ensemble_stats(&records, &[], exp.params.histogram_bins)?;
        ts_rows.extend(timeseries_rows(&stats).map(|r| [vec![eta], r].concat()));
        let a = rabi_analysis(exp, &records, &stats, &prop)?;
        let (tau, se) = a["t1"]
            .as_object()
            .map_or((f64::NAN, f64::NAN), |f| (f["tau_ns"].as_f64().unwrap_or(f64::NAN), f["tau_se_ns"].as_f64().unwrap_or(f64::NAN)));
        t1_rows.push(vec![eta, tau, se]);
        let s = &a["steady_state"];
        let g = |k: &str| s[k].as_f64().unwrap_or(f64::NAN);
        czz_rows.push(vec![eta, g("czz"), g("czz_se"), g("mean_jz"), g("mean_jz_se"), g("delta_jz"), g("delta_jz_se")]);
        per_eta.push(json!({ "eta": eta, "coupling_capacitance_af": cc, "analysis": a }));
    }
    write_csv(&dir.join("eta_sweep_timeseries.csv"), &["eta", "t_ns", "mean_jz", "var_jz", "sem_jz", "czz"], ts_rows)?;
    write_csv(&dir.join("t1_table.csv"), &["eta", "t1_ns", "t1_se_ns"], t1_rows)?;
    write_csv(
        &dir.join("steady_table.csv"),
        &["eta", "czz", "czz_se", "mean_jz", "mean_jz_se", "delta_jz", "delta_jz_se"],
        czz_rows,
    )?;
    let ensemble = ensemble_for(exp);
    let noisy = exp.noise.enabled && (exp.noise.ohmic || exp.noise.flicker);
    Ok((json!({ "per_eta": per_eta }), seed_record(&ensemble, noisy)))
}

fn run_histogram(exp: &ExperimentConfig, dir: &Path) -> Outcome {
    let circuit = exp.base_circuit()?;
    let (records, prop) = rabi_records(exp, &circuit)?;
    let times = &records[0].times;
    let wanted = if exp.params.snapshot_times_ns.is_empty() {
        vec![*times.last().expect("non-empty")]
    } else {
        exp.params.snapshot_times_ns.clone()
    };
    let idx: Vec<usize> = wanted
        .iter()
        .map(|&t| {
            (0..times.len())
                .min_by(|&a, &b| (times[a] - t).abs().total_cmp(&(times[b] - t).abs()))
                .expect("non-empty")
        })
        .collect();
    let stats = ensemble_stats(&records, &idx, exp.params.histogram_bins)?;
    write_csv(&dir.join("rabi_timeseries.csv"), &TIMESERIES_HEADER, timeseries_rows(&stats))?;
    let rows = stats.snapshots.iter().flat_map(|h| {
        h.counts
            .iter()
            .enumerate()
            .map(move |(b, &n)| vec![h.time_ns, h.bin_edges[b], h.bin_edges[b + 1], n as f64])
    });
    write_csv(&dir.join("histograms.csv"), &["t_ns", "bin_lo", "bin_hi", "count"], rows)?;
    let snaps: Vec<Value> = stats
        .snapshots
        .iter()
        .map(|h| json!({ "t_ns": h.time_ns, "mean_jz": h.mean, "delta_jz": h.std }))
        .collect();
    let mut results = rabi_analysis(exp, &records, &stats, &prop)?;
    results["snapshots"] = json!(snaps);
    Ok((results, seed_record(&ensemble_for(exp), !exp.noise_model(&circuit).is_silent())))
}

fn run_mbl(exp: &ExperimentConfig, dir: &Path) -> Outcome {
    let circuit = exp.base_circuit()?;
    let prop = exp.propagation(&circuit);
    let ensemble = ensemble_for(exp);
    let noise = exp.noise_model(&circuit);
    let mode = match exp.kind {
        ExperimentKind::MblClean => MblMode::Clean,
        _ => MblMode::Dissipative(noise.clone()),
    };
    let initial = crate::mbl::neel_state(circuit.n_qubits())?;
    let res = hamming_distance_run(&circuit, exp.run.ng0, &initial, &mode, &prop, &ensemble)?;
    let r = &res.run;
    write_csv(
        &dir.join("hamming.csv"),
        &["t_ns", "hamming", "hamming_sem"],
        (0..r.times.len()).map(|i| vec![r.times[i], r.hamming[i], r.hamming_sem[i]]),
    )?;
    let last = r.hamming.len() - r.hamming.len().div_ceil(4);
    let tail = &r.hamming[last..];
    Ok((
        json!({
            "fit": res.fit,
            "d_at_three_over_gamma": res.d_at_three_over_gamma,
            "diagonal_ensemble": r.diagonal_ensemble,
            "tail_mean_hamming": tail.iter().sum::<f64>() / tail.len() as f64,
            "n_members": r.n_members,
            "eta": circuit.eta(),
        }),
        seed_record(&ensemble, matches!(mode, MblMode::Dissipative(_)) && !noise.is_silent()),
    ))
}

fn run_level_stats(exp: &ExperimentConfig, dir: &Path) -> Outcome {
    let circuit = exp.base_circuit()?;
    let ensemble = ensemble_for(exp);
    let s = level_spacing_ratios(&circuit, exp.run.ng0, &ensemble, exp.params.level_bins)?;
    write_csv(
        &dir.join("r_histogram.csv"),
        &["bin_lo", "bin_hi", "count", "poisson_expected"],
        (0..s.counts.len()).map(|b| vec![s.bin_edges[b], s.bin_edges[b + 1], s.counts[b] as f64, s.poisson_expected[b]]),
    )?;
    Ok((
        json!({
            "r_mean": s.r_mean,
            "r_sem": s.r_sem,
            "poisson_mean_r": crate::mbl::POISSON_MEAN_R,
            "deviation_sigmas": (s.r_mean - crate::mbl::POISSON_MEAN_R) / s.r_sem,
            "chi_square": s.chi_square,
            "p_value": s.p_value,
            "n_ratios": s.r_values.len(),
            "excluded_degenerate": s.excluded_degenerate,
            "eta": circuit.eta(),
        }),
        seed_record(&ensemble, false),
    ))
}

fn run_noise_validate(exp: &ExperimentConfig, dir: &Path) -> Outcome {
    let circuit = exp.base_circuit()?;
    let model = exp.noise_model(&circuit);
    let p = &exp.params;
    let seeds: Vec<u64> = (0..p.n_seeds).map(|i| derive_seed(exp.run.master_seed, Stream::Noise, i as u64)).collect();
    let welch = WelchConfig {
        segment_len: p.welch_segment,
        overlap: 0.5,
    };
    let rows = validate_psd(&model, p.noise_duration_ns, p.noise_dt_ns, &seeds, &welch)?;
    write_csv(
        &dir.join("psd.csv"),
        &["f_hz", "s_target", "s_estimated"],
        rows.iter().map(|r| vec![r.f_hz, r.s_target, r.s_estimated]),
    )?;
    let series = synthesize_noise(&model, p.noise_duration_ns, p.noise_dt_ns, seeds[0])?;
    write_csv(
        &dir.join("noise_series.csv"),
        &["t_ns", "delta_ng"],
        series.samples.iter().take(NOISE_SERIES_EXPORT).enumerate().map(|(i, x)| vec![i as f64 * p.noise_dt_ns, *x]),
    )?;
    let decades = decade_ratios(&rows, PSD_CHECK_BAND_HZ.0, PSD_CHECK_BAND_HZ.1)?;
    let worst = decades.iter().map(|d| (d.ratio - 1.0).abs()).fold(0.0, f64::max);
    Ok((
        json!({
            "decades": decades,
            "max_relative_deviation": worst,
            "band_hz": PSD_CHECK_BAND_HZ,
            "crossover_hz": crate::noise::crossover_frequency(&model),
        }),
        json!({ "master_seed": exp.run.master_seed, "noise": seeds }),
    ))
}
