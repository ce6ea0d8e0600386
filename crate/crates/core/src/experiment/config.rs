//! TOML experiment files. Physical quantities carry their unit in the key.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circuit::{build_circuit, coupling_capacitance_for_eta, CircuitParams, MAX_DENSE_QUBITS};
use crate::dynamics::{PropagationConfig, Scheme, DEFAULT_NORM_TOLERANCE, DEFAULT_STEPS_PER_PERIOD};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::units::{af_to_farad, farad_to_af};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    GroundStateMap,
    Rabi,
    Ramsey,
    EtaSweep,
    Histogram,
    MblClean,
    MblDissipative,
    LevelStats,
    NoiseValidate,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::GroundStateMap => "ground-state-map",
            ExperimentKind::Rabi => "rabi",
            ExperimentKind::Ramsey => "ramsey",
            ExperimentKind::EtaSweep => "eta-sweep",
            ExperimentKind::Histogram => "histogram",
            ExperimentKind::MblClean => "mbl-clean",
            ExperimentKind::MblDissipative => "mbl-dissipative",
            ExperimentKind::LevelStats => "level-stats",
            ExperimentKind::NoiseValidate => "noise-validate",
        }
    }

    fn is_mbl(self) -> bool {
        matches!(self, ExperimentKind::MblClean | ExperimentKind::MblDissipative)
    }
}

/// Whole configuration file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default)]
    pub experiment: Vec<ExperimentConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub directory: PathBuf,
    pub plots: bool,
    /// Also dump every trajectory's j_z(t).
    pub trajectories: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("results"),
            plots: true,
            trajectories: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Output subdirectory; defaults to `<index>-<kind>`.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub circuit: CircuitBlock,
    #[serde(default)]
    pub noise: NoiseBlock,
    #[serde(default)]
    pub run: RunBlock,
    #[serde(default)]
    pub params: ParamsBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CircuitBlock {
    pub n_qubits: usize,
    pub gate_capacitance_af: f64,
    /// Exclusive with `eta`; zero when neither is given.
    pub coupling_capacitance_af: Option<f64>,
    pub eta: Option<f64>,
    pub junction_capacitance_af: f64,
    pub josephson_energy_ghz: f64,
    pub disorder_lambda: f64,
    /// Root seed of the junction draws; defaults to the run's master seed.
    pub disorder_seed: Option<u64>,
}

impl Default for CircuitBlock {
    fn default() -> Self {
        Self {
            n_qubits: 10,
            gate_capacitance_af: 300.0,
            coupling_capacitance_af: None,
            eta: None,
            junction_capacitance_af: 30.0,
            josephson_energy_ghz: 3.0,
            disorder_lambda: 0.0,
            disorder_seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseBlock {
    pub enabled: bool,
    pub impedance_ohm: f64,
    pub flicker_alpha: f64,
    pub ohmic: bool,
    pub flicker: bool,
    pub f_min_hz: Option<f64>,
    /// Defaults to 10 max E_C.
    pub f_max_hz: Option<f64>,
}

impl Default for NoiseBlock {
    fn default() -> Self {
        Self {
            enabled: true,
            impedance_ohm: 50.0,
            flicker_alpha: 5e-7,
            ohmic: true,
            flicker: true,
            f_min_hz: None,
            f_max_hz: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunBlock {
    /// Defaults to 1/(20 max E_C).
    pub dt_ns: Option<f64>,
    pub t_end_ns: f64,
    pub n_traj: usize,
    pub master_seed: u64,
    /// Defaults to a record every 0.01 ns.
    pub record_stride: Option<usize>,
    pub scheme: Scheme,
    pub norm_tolerance: f64,
    /// Constant bias; defaults to 1/2.
    pub ng0: f64,
}

impl Default for RunBlock {
    fn default() -> Self {
        Self {
            dt_ns: None,
            t_end_ns: 20.0,
            n_traj: 100,
            master_seed: 1,
            record_stride: None,
            scheme: Scheme::default(),
            norm_tolerance: DEFAULT_NORM_TOLERANCE,
            ng0: 0.5,
        }
    }
}

/// Kind-specific settings. Unused entries are ignored by other kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsBlock {
    /// η values of an eta-sweep or the rows of a ground-state map.
    pub etas: Vec<f64>,
    pub ng_points: usize,
    /// all-excited, neel, or a bit string with qubit 0 first.
    pub initial_state: String,
    pub free_time_max_ns: f64,
    pub free_time_step_ns: f64,
    /// Defaults to 1/(4 E_J).
    pub pulse_duration_ns: Option<f64>,
    pub snapshot_times_ns: Vec<f64>,
    pub histogram_bins: usize,
    pub level_bins: usize,
    /// Window of the steady-state detector.
    pub steady_window_ns: f64,
    pub n_seeds: usize,
    pub noise_duration_ns: f64,
    pub noise_dt_ns: f64,
    pub welch_segment: usize,
}

impl Default for ParamsBlock {
    fn default() -> Self {
        Self {
            etas: vec![0.08, 0.77, 7.0],
            ng_points: 101,
            initial_state: "all-excited".into(),
            free_time_max_ns: 0.2,
            free_time_step_ns: 0.0005,
            pulse_duration_ns: None,
            snapshot_times_ns: Vec::new(),
            histogram_bins: 50,
            level_bins: 20,
            steady_window_ns: 1.0,
            n_seeds: 200,
            noise_duration_ns: 524.288,
            noise_dt_ns: 0.004,
            welch_segment: 1 << 15,
        }
    }
}

/// Parse a configuration file and validate every experiment in it.
pub fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(vec![format!("{}: {e}", path.display())]))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let cfg: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))?;
    let issues: Vec<String> = cfg
        .experiment
        .iter()
        .enumerate()
        .flat_map(|(i, e)| e.issues().into_iter().map(move |m| format!("experiment[{i}].{m}")))
        .collect();
    if issues.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(issues))
    }
}

fn positive(issues: &mut Vec<String>, field: &str, v: f64) {
    if !(v.is_finite() && v > 0.0) {
        issues.push(format!("{field}: must be positive, got {v}"));
    }
}

fn non_negative(issues: &mut Vec<String>, field: &str, v: f64) {
    if !(v.is_finite() && v >= 0.0) {
        issues.push(format!("{field}: must be non-negative, got {v}"));
    }
}

impl ExperimentConfig {
    /// Every violated constraint, as `block.field: message`.
    pub fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        let c = &self.circuit;
        let min_qubits = if self.kind.is_mbl() { 2 } else { 1 };
        if c.n_qubits < min_qubits || c.n_qubits > MAX_DENSE_QUBITS {
            out.push(format!(
                "circuit.n_qubits: must be in [{min_qubits}, {MAX_DENSE_QUBITS}], got {}",
                c.n_qubits
            ));
        }
        positive(&mut out, "circuit.gate_capacitance_af", c.gate_capacitance_af);
        positive(&mut out, "circuit.junction_capacitance_af", c.junction_capacitance_af);
        positive(&mut out, "circuit.josephson_energy_ghz", c.josephson_energy_ghz);
        non_negative(&mut out, "circuit.disorder_lambda", c.disorder_lambda);
        if let Some(cc) = c.coupling_capacitance_af {
            non_negative(&mut out, "circuit.coupling_capacitance_af", cc);
        }
        match (c.coupling_capacitance_af, c.eta) {
            (Some(_), Some(_)) => out.push("circuit.eta: give either eta or coupling_capacitance_af, not both".into()),
            (None, Some(eta)) => {
                if !(eta.is_finite() && eta >= 0.0) {
                    out.push(format!("circuit.eta: must be non-negative, got {eta}"));
                } else if c.gate_capacitance_af > 0.0 && c.junction_capacitance_af > 0.0 && c.josephson_energy_ghz > 0.0 {
                    if let Err(e) = coupling_capacitance_for_eta(
                        af_to_farad(c.gate_capacitance_af),
                        af_to_farad(c.junction_capacitance_af),
                        c.josephson_energy_ghz,
                        eta,
                    ) {
                        out.push(format!("circuit.eta: {e}"));
                    }
                }
            }
            _ => {}
        }

        let n = &self.noise;
        non_negative(&mut out, "noise.impedance_ohm", n.impedance_ohm);
        non_negative(&mut out, "noise.flicker_alpha", n.flicker_alpha);
        if let Some(f) = n.f_min_hz {
            positive(&mut out, "noise.f_min_hz", f);
        }
        if let Some(f) = n.f_max_hz {
            positive(&mut out, "noise.f_max_hz", f);
        }
        if let (Some(lo), Some(hi)) = (n.f_min_hz, n.f_max_hz) {
            if lo >= hi {
                out.push(format!("noise.f_max_hz: must exceed f_min_hz ({lo})"));
            }
        }
        if self.kind == ExperimentKind::NoiseValidate && (!n.enabled || (!n.ohmic && !n.flicker)) {
            out.push("noise.enabled: noise-validate needs at least one noise component".into());
        }

        let r = &self.run;
        if let Some(dt) = r.dt_ns {
            positive(&mut out, "run.dt_ns", dt);
        }
        positive(&mut out, "run.t_end_ns", r.t_end_ns);
        positive(&mut out, "run.norm_tolerance", r.norm_tolerance);
        if r.n_traj == 0 {
            out.push("run.n_traj: must be at least 1".into());
        }
        if r.record_stride == Some(0) {
            out.push("run.record_stride: must be at least 1".into());
        }
        if !r.ng0.is_finite() {
            out.push(format!("run.ng0: must be finite, got {}", r.ng0));
        }
        if out.is_empty() {
            if let Ok(circuit) = self.base_circuit() {
                let limit = crate::dynamics::MAX_DT_FRACTION / circuit.max_charging_energy();
                if let Some(dt) = r.dt_ns.filter(|dt| *dt > limit) {
                    out.push(format!("run.dt_ns: {dt} exceeds the resolution limit {limit:.3e} ns"));
                }
            }
        }

        let p = &self.params;
        match self.kind {
            ExperimentKind::GroundStateMap | ExperimentKind::EtaSweep => {
                if p.etas.is_empty() || p.etas.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
                    out.push("params.etas: must be a non-empty list of positive values".into());
                }
                if self.kind == ExperimentKind::GroundStateMap && p.etas.windows(2).any(|w| w[1] <= w[0]) {
                    out.push("params.etas: must be strictly increasing".into());
                }
                if self.kind == ExperimentKind::GroundStateMap && p.ng_points < 2 {
                    out.push("params.ng_points: must be at least 2".into());
                }
                if self.kind == ExperimentKind::EtaSweep && (c.eta.is_some() || c.coupling_capacitance_af.is_some()) {
                    out.push("circuit.eta: an eta-sweep sets the coupling from params.etas".into());
                }
            }
            ExperimentKind::Ramsey => {
                positive(&mut out, "params.free_time_max_ns", p.free_time_max_ns);
                positive(&mut out, "params.free_time_step_ns", p.free_time_step_ns);
                if let Some(d) = p.pulse_duration_ns {
                    positive(&mut out, "params.pulse_duration_ns", d);
                }
            }
            ExperimentKind::Histogram => {
                if p.snapshot_times_ns.iter().any(|t| !(*t >= 0.0 && *t <= r.t_end_ns)) {
                    out.push("params.snapshot_times_ns: every time must lie in [0, run.t_end_ns]".into());
                }
            }
            ExperimentKind::NoiseValidate => {
                if p.n_seeds == 0 {
                    out.push("params.n_seeds: must be at least 1".into());
                }
                positive(&mut out, "params.noise_duration_ns", p.noise_duration_ns);
                positive(&mut out, "params.noise_dt_ns", p.noise_dt_ns);
                let samples = (p.noise_duration_ns / p.noise_dt_ns).round();
                if p.welch_segment < 4 || p.welch_segment as f64 > samples {
                    out.push(format!("params.welch_segment: must be in [4, {samples}]"));
                }
            }
            _ => {}
        }
        if matches!(self.kind, ExperimentKind::Rabi | ExperimentKind::Histogram | ExperimentKind::EtaSweep) {
            if let Err(e) = parse_initial(&p.initial_state, c.n_qubits) {
                out.push(format!("params.initial_state: {e}"));
            }
        }
        if p.histogram_bins == 0 {
            out.push("params.histogram_bins: must be at least 1".into());
        }
        if p.level_bins < 2 {
            out.push("params.level_bins: must be at least 2".into());
        }
        positive(&mut out, "params.steady_window_ns", p.steady_window_ns);
        out
    }

    /// Coupling capacitance in aF after resolving `eta`.
    pub fn coupling_capacitance_af(&self) -> Result<f64> {
        let c = &self.circuit;
        match (c.coupling_capacitance_af, c.eta) {
            (Some(cc), _) => Ok(cc),
            (None, Some(eta)) => eta_to_cc_af(c.gate_capacitance_af, c.junction_capacitance_af, c.josephson_energy_ghz, eta),
            (None, None) => Ok(0.0),
        }
    }

    /// Circuit with mean junction parameters (no disorder applied).
    pub fn base_circuit(&self) -> Result<CircuitParams> {
        self.circuit_with_cc(self.coupling_capacitance_af()?)
    }

    pub fn circuit_with_cc(&self, cc_af: f64) -> Result<CircuitParams> {
        let c = &self.circuit;
        build_circuit(
            c.n_qubits,
            af_to_farad(c.gate_capacitance_af),
            af_to_farad(cc_af),
            &vec![af_to_farad(c.junction_capacitance_af); c.n_qubits],
            &vec![c.josephson_energy_ghz; c.n_qubits],
        )
    }

    pub fn noise_model(&self, circuit: &CircuitParams) -> NoiseModel {
        let n = &self.noise;
        let mut m = NoiseModel::for_circuit(circuit);
        m.impedance_ohm = n.impedance_ohm;
        m.flicker_alpha = n.flicker_alpha;
        m.ohmic_on = n.enabled && n.ohmic;
        m.flicker_on = n.enabled && n.flicker;
        if n.f_min_hz.is_some() {
            m.f_min_hz = n.f_min_hz;
        }
        if n.f_max_hz.is_some() {
            m.f_max_hz = n.f_max_hz;
        }
        m
    }

    pub fn propagation(&self, circuit: &CircuitParams) -> PropagationConfig {
        let r = &self.run;
        let mut cfg = PropagationConfig::for_circuit(circuit, r.t_end_ns);
        if let Some(dt) = r.dt_ns {
            cfg.dt_ns = dt;
        }
        cfg.scheme = r.scheme;
        cfg.norm_tolerance = r.norm_tolerance;
        match r.record_stride {
            Some(s) => cfg.record_stride = s,
            None => cfg = cfg.with_record_interval(DEFAULT_RECORD_INTERVAL_NS),
        }
        cfg
    }

    /// Copy with every default made explicit, so the echo fully determines
    /// the run and validates again. A coupling given as η stays as η.
    pub fn resolved(&self) -> Result<ExperimentConfig> {
        let mut out = self.clone();
        let cc = self.coupling_capacitance_af()?;
        if self.kind != ExperimentKind::EtaSweep {
            let circuit = self.circuit_with_cc(cc)?;
            if self.circuit.eta.is_none() {
                out.circuit.coupling_capacitance_af = Some(cc);
            }
            let prop = self.propagation(&circuit);
            out.run.dt_ns = Some(prop.dt_ns);
            out.run.record_stride = Some(prop.record_stride);
            let noise = self.noise_model(&circuit);
            out.noise.f_max_hz = noise.f_max_hz;
        }
        out.circuit.disorder_seed = Some(self.circuit.disorder_seed.unwrap_or(self.run.master_seed));
        if self.params.pulse_duration_ns.is_none() && self.kind == ExperimentKind::Ramsey {
            out.params.pulse_duration_ns = Some(crate::dynamics::half_pi_duration(self.circuit.josephson_energy_ghz));
        }
        Ok(out)
    }
}

pub const DEFAULT_RECORD_INTERVAL_NS: f64 = 0.01;

/// Default dt for reference: one twentieth of the fastest charging period.
pub fn default_dt_ns(circuit: &CircuitParams) -> f64 {
    1.0 / (DEFAULT_STEPS_PER_PERIOD * circuit.max_charging_energy())
}

/// Initial state named in a config.
pub fn parse_initial(spec: &str, n_qubits: usize) -> Result<crate::dynamics::InitialState> {
    use crate::dynamics::InitialState;
    match spec {
        "all-excited" => Ok(InitialState::AllExcited),
        "neel" => {
            if n_qubits < 2 {
                Err(Error::Domain("the Néel state needs at least 2 qubits".into()))
            } else {
                Ok(InitialState::Neel)
            }
        }
        bits if !bits.is_empty() && bits.chars().all(|ch| ch == '0' || ch == '1') => {
            if bits.len() != n_qubits {
                return Err(Error::Domain(format!("bit string has {} entries for {n_qubits} qubits", bits.len())));
            }
            Ok(InitialState::Basis(
                bits.chars().enumerate().filter(|(_, ch)| *ch == '1').map(|(k, _)| 1usize << k).sum(),
            ))
        }
        other => Err(Error::Domain(format!("unknown initial state '{other}'"))),
    }
}

/// Coupling capacitance in aF that realises `eta` for the given means.
pub fn eta_to_cc_af(gate_capacitance_af: f64, junction_capacitance_af: f64, josephson_energy_ghz: f64, eta: f64) -> Result<f64> {
    coupling_capacitance_for_eta(
        af_to_farad(gate_capacitance_af),
        af_to_farad(junction_capacitance_af),
        josephson_energy_ghz,
        eta,
    )
    .map(farad_to_af)
}

/// Resolved config as TOML and its SHA-256.
pub fn resolved_echo(output: &OutputBlock, experiment: &ExperimentConfig) -> Result<(String, String)> {
    #[derive(Serialize)]
    struct Echo<'a> {
        output: &'a OutputBlock,
        experiment: [&'a ExperimentConfig; 1],
    }
    let resolved = experiment.resolved()?;
    let text = toml::to_string(&Echo {
        output,
        experiment: [&resolved],
    })
    .map_err(|e| Error::Io(e.to_string()))?;
    let hash = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    Ok((text, hash))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_reference_device() {
        let cfg = parse_config("[[experiment]]\nkind = \"rabi\"\n").unwrap();
        let e = &cfg.experiment[0];
        assert_eq!(e.circuit.n_qubits, 10);
        assert_eq!(e.circuit.gate_capacitance_af, 300.0);
        assert_eq!(e.circuit.junction_capacitance_af, 30.0);
        assert_eq!(e.circuit.josephson_energy_ghz, 3.0);
        assert_eq!(e.noise.impedance_ohm, 50.0);
        assert_eq!(e.noise.flicker_alpha, 5e-7);
    }

    #[test]
    fn every_bad_field_is_listed() {
        let text = r#"
[[experiment]]
kind = "rabi"
[experiment.circuit]
n_qubits = 0
gate_capacitance_af = -1.0
[experiment.run]
n_traj = 0
t_end_ns = -5.0
"#;
        let Err(Error::Config(issues)) = parse_config(text) else {
            panic!("expected validation failure")
        };
        for f in ["circuit.n_qubits", "circuit.gate_capacitance_af", "run.n_traj", "run.t_end_ns"] {
            assert!(issues.iter().any(|i| i.contains(f)), "{f} missing from {issues:?}");
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse_config("[[experiment]]\nkind = \"rabi\"\n[experiment.circuit]\nC_g = 3\n").is_err());
        assert!(parse_config("[[experiment]]\nkind = \"teleport\"\n").is_err());
    }

    #[test]
    fn eta_inversion_in_af() {
        assert_eq!(eta_to_cc_af(300.0, 30.0, 3.0, 0.0).unwrap(), 0.0);
        assert!((eta_to_cc_af(300.0, 30.0, 3.0, 7.0).unwrap() - 32.4).abs() < 0.1);
        assert!((eta_to_cc_af(300.0, 30.0, 3.0, 71.0).unwrap() - 3220.0).abs() < 10.0);
        assert!(matches!(eta_to_cc_af(300.0, 30.0, 3.0, 100.0), Err(Error::ChargingLimit(_))));
    }

    #[test]
    fn resolved_hash_is_stable() {
        let cfg = parse_config("[[experiment]]\nkind = \"rabi\"\n[experiment.circuit]\neta = 0.77\n").unwrap();
        let (a, ha) = resolved_echo(&cfg.output, &cfg.experiment[0]).unwrap();
        let (b, hb) = resolved_echo(&cfg.output, &cfg.experiment[0]).unwrap();
        assert_eq!(a, b);
        assert_eq!(ha, hb);
        assert_eq!(ha.len(), 64);
        assert!(a.contains("dt_ns"));
        let again = parse_config(&a).unwrap();
        assert_eq!(resolved_echo(&again.output, &again.experiment[0]).unwrap().1, ha);
    }

    #[test]
    fn initial_state_strings() {
        use crate::dynamics::InitialState;
        assert_eq!(parse_initial("101", 3).unwrap(), InitialState::Basis(0b101));
        assert_eq!(parse_initial("011", 3).unwrap(), InitialState::Basis(0b110));
        assert!(parse_initial("01", 3).is_err());
        assert!(parse_initial("neel", 1).is_err());
    }
}
