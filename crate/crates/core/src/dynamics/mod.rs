//! Noisy Schrödinger trajectories of the full 2^N register.
//!
//! Each trajectory integrates iħ dψ/dt = H(N_g0 + δN_g(t)) ψ with its own
//! δN_g realization (shared by all islands) and, for disordered circuits, its
//! own junction draw.

mod propagator;

pub use propagator::{
    Observables, PropagationConfig, Propagator, Scheme, StepScratch, DEFAULT_NORM_TOLERANCE,
    DEFAULT_STEPS_PER_PERIOD, MAX_DT_FRACTION,
};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{sample_disorder, CircuitParams, DisorderSpec, StateVector};
use crate::error::{Error, Result};
use crate::noise::{synthesize_noise, NoiseModel, NoiseSeries, MIN_SAMPLES};
use crate::seeds::{derive_seed, Stream};

/// Starting state of a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialState {
    /// |1⟩⊗…⊗|1⟩.
    #[default]
    AllExcited,
    /// Charge basis state with the given occupation bits.
    Basis(usize),
    /// Alternating |↑⟩|↓⟩… with |↑⟩ = (|0⟩+|1⟩)/√2 on qubit 0.
    Neel,
    Custom(StateVector),
}

impl InitialState {
    pub fn build(&self, n_qubits: usize) -> Result<StateVector> {
        let s = match self {
            InitialState::AllExcited => StateVector::all_excited(n_qubits),
            InitialState::Basis(j) => {
                if *j >= 1 << n_qubits {
                    return Err(Error::Domain(format!("basis index {j} out of range for {n_qubits} qubits")));
                }
                StateVector::basis(n_qubits, *j)
            }
            InitialState::Neel => crate::mbl::neel_state(n_qubits)?,
            InitialState::Custom(s) => {
                if s.n_qubits() != n_qubits {
                    return Err(Error::Domain("custom initial state has the wrong dimension".into()));
                }
                s.clone()
            }
        };
        if (s.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("initial state norm {} is not 1", s.norm())));
        }
        Ok(s)
    }
}

/// Driving protocol.
#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolSpec {
    /// Constant bias N_g0, recorded on the propagation grid.
    Rabi { ng0: f64, initial: InitialState },
    /// π/2 pulse at `pulse_bias`, free flight τ at `free_bias`, π/2 pulse;
    /// j_z recorded after the second pulse for every τ in the grid.
    Ramsey {
        pulse_bias: f64,
        free_bias: f64,
        pulse_duration_ns: f64,
        free_time_grid_ns: Vec<f64>,
        initial: InitialState,
    },
}

impl ProtocolSpec {
    /// N_g0 = 1/2 starting from all islands occupied.
    pub fn rabi() -> Self {
        ProtocolSpec::Rabi {
            ng0: 0.5,
            initial: InitialState::AllExcited,
        }
    }

    /// Pulses at 1/2, free flight at 0, π/2 time 1/(4 E_J).
    pub fn ramsey(circuit: &CircuitParams, free_time_grid_ns: Vec<f64>) -> Self {
        ProtocolSpec::Ramsey {
            pulse_bias: 0.5,
            free_bias: 0.0,
            pulse_duration_ns: half_pi_duration(circuit.mean_josephson_energy()),
            free_time_grid_ns,
            initial: InitialState::AllExcited,
        }
    }
}

/// Quarter of the Josephson Rabi period, 1/(4 E_J) ns for E_J in GHz.
pub fn half_pi_duration(josephson_energy_ghz: f64) -> f64 {
    0.25 / josephson_energy_ghz
}

/// Observables of one run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub seed: u64,
    pub times: Vec<f64>,
    pub jz: Vec<f64>,
    /// Per record: ⟨σ_z^k⟩ for each qubit.
    pub sigma_z: Option<Vec<Vec<f64>>>,
    /// Per record: ⟨σ_z^k σ_z^k'⟩ for k < k'.
    pub sigma_zz: Option<Vec<Vec<f64>>>,
    /// Per record: ⟨σ_x^k⟩ for each qubit.
    pub sigma_x: Option<Vec<Vec<f64>>>,
    /// max |‖ψ‖ − 1| over the recorded states.
    pub max_norm_drift: f64,
}

impl TrajectoryRecord {
    fn with_capacity(seed: u64, cap: usize, obs: Observables) -> Self {
        Self {
            seed,
            times: Vec::with_capacity(cap),
            jz: Vec::with_capacity(cap),
            sigma_z: obs.sigma_z.then(|| Vec::with_capacity(cap)),
            sigma_zz: obs.sigma_zz.then(|| Vec::with_capacity(cap)),
            sigma_x: obs.sigma_x.then(|| Vec::with_capacity(cap)),
            max_norm_drift: 0.0,
        }
    }

    fn push(&mut self, t: f64, psi: &StateVector) {
        let probs = psi.probabilities();
        let n = psi.n_qubits();
        let jz = probs
            .iter()
            .enumerate()
            .map(|(j, p)| p * (2.0 * j.count_ones() as f64 - n as f64))
            .sum::<f64>()
            / n as f64;
        self.times.push(t);
        self.jz.push(jz);
        if let Some(v) = self.sigma_z.as_mut() {
            v.push(crate::circuit::sigma_z_from_probs(&probs, n));
        }
        if let Some(v) = self.sigma_zz.as_mut() {
            v.push(crate::circuit::sigma_zz_from_probs(&probs, n));
        }
        if let Some(v) = self.sigma_x.as_mut() {
            v.push(psi.sigma_x());
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn noise_for(model: &NoiseModel, n_steps: usize, dt_ns: f64, seed: u64) -> Result<NoiseSeries> {
    let len = n_steps.max(MIN_SAMPLES);
    if model.is_silent() {
        return Ok(NoiseSeries {
            seed,
            ..NoiseSeries::zeros(len, dt_ns)
        });
    }
    synthesize_noise(model, len as f64 * dt_ns, dt_ns, seed)
}

fn check_norm(psi: &StateVector, step: usize, tolerance: f64) -> Result<f64> {
    let drift = (psi.norm() - 1.0).abs();
    if drift > tolerance {
        return Err(Error::Integration { step, drift, tolerance });
    }
    Ok(drift)
}

/// Evolve under constant bias `ng0` plus held noise `noise`, recording every
/// `config.record_stride` steps.
pub fn evolve_with_noise(
    circuit: &CircuitParams,
    initial: &StateVector,
    ng0: f64,
    noise: &NoiseSeries,
    config: &PropagationConfig,
    seed: u64,
) -> Result<TrajectoryRecord> {
    config.validate(circuit)?;
    if initial.n_qubits() != circuit.n_qubits() {
        return Err(Error::Domain(format!(
            "initial state has {} qubits, circuit has {}",
            initial.n_qubits(),
            circuit.n_qubits()
        )));
    }
    let n_steps = config.n_steps();
    if noise.len() < n_steps {
        return Err(Error::Domain(format!("noise series has {} samples, {n_steps} steps requested", noise.len())));
    }
    let prop = Propagator::new(circuit, config.dt_ns, config.scheme);
    let mut psi = initial.clone();
    let mut scratch = StepScratch::default();
    let mut rec = TrajectoryRecord::with_capacity(seed, n_steps / config.record_stride + 2, config.observables);
    rec.push(0.0, &psi);
    for step in 0..n_steps {
        prop.step(psi.amplitudes_mut(), ng0 + noise.samples[step], &mut scratch);
        let done = step + 1;
        if done % config.record_stride == 0 || done == n_steps {
            rec.max_norm_drift = rec.max_norm_drift.max(check_norm(&psi, done, config.norm_tolerance)?);
            rec.push(done as f64 * config.dt_ns, &psi);
        }
    }
    Ok(rec)
}

/// One trajectory of `protocol` with noise seeded by `seed`.
pub fn evolve_trajectory(
    circuit: &CircuitParams,
    noise_model: &NoiseModel,
    protocol: &ProtocolSpec,
    config: &PropagationConfig,
    seed: u64,
) -> Result<TrajectoryRecord> {
    match protocol {
        ProtocolSpec::Rabi { ng0, initial } => {
            let psi0 = initial.build(circuit.n_qubits())?;
            config.validate(circuit)?;
            let noise = noise_for(noise_model, config.n_steps(), config.dt_ns, seed)?;
            evolve_with_noise(circuit, &psi0, *ng0, &noise, config, seed)
        }
        ProtocolSpec::Ramsey {
            pulse_bias,
            free_bias,
            pulse_duration_ns,
            free_time_grid_ns,
            initial,
        } => ramsey_trajectory(
            circuit,
            noise_model,
            &RamseyPlan::new(*pulse_bias, *free_bias, *pulse_duration_ns, free_time_grid_ns, config)?,
            initial,
            config,
            seed,
        ),
    }
}

/// Step counts of a Ramsey sequence. dt is shrunk so the pulse is an integer
/// number of steps; free times are rounded to that grid.
#[derive(Debug, Clone)]
struct RamseyPlan {
    pulse_bias: f64,
    free_bias: f64,
    dt_ns: f64,
    pulse_steps: usize,
    free_steps: Vec<usize>,
}

impl RamseyPlan {
    fn new(pulse_bias: f64, free_bias: f64, pulse_ns: f64, grid_ns: &[f64], config: &PropagationConfig) -> Result<Self> {
        if !(pulse_ns > 0.0) {
            return Err(Error::Domain("pulse duration must be positive".into()));
        }
        if grid_ns.is_empty() || grid_ns.iter().any(|t| !(*t >= 0.0)) || grid_ns.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("free-time grid must be non-empty, non-negative and increasing".into()));
        }
        let pulse_steps = (pulse_ns / config.dt_ns).ceil().max(1.0) as usize;
        let dt_ns = pulse_ns / pulse_steps as f64;
        let free_steps: Vec<usize> = grid_ns.iter().map(|t| (t / dt_ns).round() as usize).collect();
        if free_steps.windows(2).any(|w| w[1] == w[0]) {
            return Err(Error::Domain("free-time grid is finer than the time step".into()));
        }
        Ok(Self {
            pulse_bias,
            free_bias,
            dt_ns,
            pulse_steps,
            free_steps,
        })
    }

    fn total_steps(&self) -> usize {
        2 * self.pulse_steps + self.free_steps.last().copied().unwrap_or(0)
    }
}

fn ramsey_trajectory(
    circuit: &CircuitParams,
    noise_model: &NoiseModel,
    plan: &RamseyPlan,
    initial: &InitialState,
    config: &PropagationConfig,
    seed: u64,
) -> Result<TrajectoryRecord> {
    let cfg = PropagationConfig {
        dt_ns: plan.dt_ns,
        ..config.clone()
    };
    cfg.validate(circuit)?;
    let total = plan.total_steps();
    let noise = noise_for(noise_model, total, plan.dt_ns, seed)?;
    let prop = Propagator::new(circuit, plan.dt_ns, cfg.scheme);
    let mut scratch = StepScratch::default();
    let mut psi = initial.build(circuit.n_qubits())?;
    let p = plan.pulse_steps;
    for step in 0..p {
        prop.step(psi.amplitudes_mut(), plan.pulse_bias + noise.samples[step], &mut scratch);
    }
    let mut rec = TrajectoryRecord::with_capacity(seed, plan.free_steps.len(), cfg.observables);
    let mut free_done = 0;
    for &target in &plan.free_steps {
        while free_done < target {
            prop.step(psi.amplitudes_mut(), plan.free_bias + noise.samples[p + free_done], &mut scratch);
            free_done += 1;
        }
        let mut probe = psi.clone();
        for m in 0..p {
            prop.step(probe.amplitudes_mut(), plan.pulse_bias + noise.samples[p + target + m], &mut scratch);
        }
        rec.max_norm_drift = rec.max_norm_drift.max(check_norm(&probe, p + target + p, cfg.norm_tolerance)?);
        rec.push(target as f64 * plan.dt_ns, &probe);
    }
    Ok(rec)
}

/// Ensemble size, master seed and junction spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub n_traj: usize,
    pub master_seed: u64,
    /// Standard deviation of the normalized junction area; 0 keeps the
    /// circuit as given.
    pub disorder_lambda: f64,
    /// Root of the junction draws; defaults to `master_seed`.
    pub disorder_seed: u64,
}

impl EnsembleSpec {
    pub fn new(n_traj: usize, master_seed: u64) -> Self {
        Self {
            n_traj,
            master_seed,
            disorder_lambda: 0.0,
            disorder_seed: master_seed,
        }
    }

    pub fn with_disorder(mut self, lambda: f64) -> Self {
        self.disorder_lambda = lambda;
        self
    }

    pub fn with_disorder_seed(mut self, seed: u64) -> Self {
        self.disorder_seed = seed;
        self
    }

    pub fn noise_seed(&self, i: usize) -> u64 {
        derive_seed(self.master_seed, Stream::Noise, i as u64)
    }

    pub fn disorder_seed(&self, i: usize) -> u64 {
        derive_seed(self.disorder_seed, Stream::Disorder, i as u64)
    }

    /// Circuit for member `i`: the base circuit, or a fresh junction draw
    /// around its mean junction parameters.
    pub fn member_circuit(&self, base: &CircuitParams, i: usize) -> Result<CircuitParams> {
        if self.disorder_lambda == 0.0 {
            return Ok(base.clone());
        }
        let mean_cj = crate::circuit::mean(base.junction_capacitances());
        let (caps, ej) = sample_disorder(
            base.n_qubits(),
            mean_cj,
            base.mean_josephson_energy(),
            &DisorderSpec::new(self.disorder_lambda, self.disorder_seed(i))?,
        )?;
        base.with_junctions(&caps, &ej)
    }

    fn validate(&self) -> Result<()> {
        if self.n_traj == 0 {
            return Err(Error::Domain("ensemble needs at least one trajectory".into()));
        }
        DisorderSpec::new(self.disorder_lambda, 0).map(|_| ())
    }
}

/// Run `protocol` over an ensemble. Member `i` always gets the same seeds, so
/// the output is independent of scheduling and of the ensemble size.
pub fn run_ensemble(
    circuit: &CircuitParams,
    noise_model: &NoiseModel,
    protocol: &ProtocolSpec,
    config: &PropagationConfig,
    ensemble: &EnsembleSpec,
) -> Result<Vec<TrajectoryRecord>> {
    ensemble.validate()?;
    (0..ensemble.n_traj)
        .into_par_iter()
        .map(|i| {
            let member = ensemble.member_circuit(circuit, i)?;
            evolve_trajectory(&member, noise_model, protocol, config, ensemble.noise_seed(i))
        })
        .collect()
}

/// Rabi protocol (N_g0 = 1/2, all islands occupied) over an ensemble.
pub fn run_rabi_ensemble(
    circuit: &CircuitParams,
    noise_model: &NoiseModel,
    config: &PropagationConfig,
    ensemble: &EnsembleSpec,
) -> Result<Vec<TrajectoryRecord>> {
    run_ensemble(circuit, noise_model, &ProtocolSpec::rabi(), config, ensemble)
}

/// Ensemble-averaged Ramsey fringe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamseySignal {
    pub free_times_ns: Vec<f64>,
    pub mean_jz: Vec<f64>,
    pub pulse_duration_ns: f64,
    pub n_traj: usize,
}

/// Ramsey sequence with π/2 pulses of `pulse_duration_ns` (default 1/(4E_J)).
pub fn run_ramsey(
    circuit: &CircuitParams,
    noise_model: &NoiseModel,
    config: &PropagationConfig,
    free_time_grid_ns: &[f64],
    pulse_duration_ns: Option<f64>,
    ensemble: &EnsembleSpec,
) -> Result<RamseySignal> {
    let pulse = pulse_duration_ns.unwrap_or_else(|| half_pi_duration(circuit.mean_josephson_energy()));
    let protocol = ProtocolSpec::Ramsey {
        pulse_bias: 0.5,
        free_bias: 0.0,
        pulse_duration_ns: pulse,
        free_time_grid_ns: free_time_grid_ns.to_vec(),
        initial: InitialState::AllExcited,
    };
    let records = run_ensemble(circuit, noise_model, &protocol, config, ensemble)?;
    let n = records.len() as f64;
    let mut mean = vec![0.0; records[0].jz.len()];
    for r in &records {
        for (m, x) in mean.iter_mut().zip(&r.jz) {
            *m += x;
        }
    }
    Ok(RamseySignal {
        free_times_ns: records[0].times.clone(),
        mean_jz: mean.into_iter().map(|m| m / n).collect(),
        pulse_duration_ns: pulse,
        n_traj: records.len(),
    })
}

/// ψ(t) at the end of a noiseless constant-bias run; used by tests and by
/// the clean-evolution cross-checks.
pub fn propagate_state(
    circuit: &CircuitParams,
    initial: &StateVector,
    ng: f64,
    dt_ns: f64,
    n_steps: usize,
    scheme: Scheme,
) -> StateVector {
    let prop = Propagator::new(circuit, dt_ns, scheme);
    let mut psi: Vec<Complex64> = initial.amplitudes().to_vec();
    let mut scratch = StepScratch::default();
    for _ in 0..n_steps {
        prop.step(&mut psi, ng, &mut scratch);
    }
    StateVector::from_amplitudes(circuit.n_qubits(), psi).expect("dimension preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::homogeneous_circuit;
    use std::f64::consts::TAU;

    fn single() -> CircuitParams {
        homogeneous_circuit(1, 300e-18, 0.0, 30e-18, 3.0).unwrap()
    }

    #[test]
    fn noiseless_rabi_is_cosine() {
        let c = single();
        let cfg = PropagationConfig::for_circuit(&c, 2.0).with_record_interval(0.01);
        let rec = evolve_trajectory(&c, &NoiseModel::silent(3e-16), &ProtocolSpec::rabi(), &cfg, 1).unwrap();
        for (t, jz) in rec.times.iter().zip(&rec.jz) {
            assert!((jz - (TAU * 3.0 * t).cos()).abs() < 1e-9, "t={t}");
        }
        assert!(rec.max_norm_drift < 1e-12);
    }

    #[test]
    fn detuned_rabi_amplitude() {
        let c = single();
        let ec = c.charging_energies()[0];
        let cfg = PropagationConfig::for_circuit(&c, 1.0).with_record_interval(0.001);
        let p = ProtocolSpec::Rabi {
            ng0: 0.0,
            initial: InitialState::AllExcited,
        };
        let rec = evolve_trajectory(&c, &NoiseModel::silent(3e-16), &p, &cfg, 1).unwrap();
        let min_jz = rec.jz.iter().cloned().fold(1.0, f64::min);
        // population moved out of |1⟩ is (1 - jz)/2, peaking at E_J²/(E_C²+E_J²)
        let transfer = (1.0 - min_jz) / 2.0;
        let expected = 9.0 / (ec * ec + 9.0);
        assert!((transfer - expected).abs() < 0.05 * expected, "{transfer} vs {expected}");
        assert!((expected - 1.6e-4).abs() < 0.1e-4);
    }

    #[test]
    fn ramsey_zero_delay_is_a_pi_pulse() {
        let c = single();
        let cfg = PropagationConfig::for_circuit(&c, 1.0);
        let sig = run_ramsey(&c, &NoiseModel::silent(3e-16), &cfg, &[0.0, 0.001], None, &EnsembleSpec::new(1, 0)).unwrap();
        assert!((sig.mean_jz[0] + 1.0).abs() < 1e-12, "{}", sig.mean_jz[0]);
        assert!((sig.pulse_duration_ns - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn single_member_ensemble_matches_direct_run() {
        let c = homogeneous_circuit(2, 300e-18, 5e-18, 30e-18, 3.0).unwrap();
        let cfg = PropagationConfig::for_circuit(&c, 0.1).with_record_interval(0.01);
        let noise = NoiseModel::for_circuit(&c);
        let ens = EnsembleSpec::new(1, 77);
        let a = run_rabi_ensemble(&c, &noise, &cfg, &ens).unwrap();
        let b = evolve_trajectory(&c, &noise, &ProtocolSpec::rabi(), &cfg, ens.noise_seed(0)).unwrap();
        assert_eq!(a[0], b);
        assert_eq!(a[0].jz[0], 1.0);
    }

    #[test]
    fn norm_failure_is_reported() {
        let c = single();
        let mut cfg = PropagationConfig::for_circuit(&c, 0.05);
        cfg.norm_tolerance = 1e-300;
        let mut s = StateVector::all_excited(1);
        s.amplitudes_mut()[1] = Complex64::new(1.0 + 1e-6, 0.0);
        let err = evolve_with_noise(&c, &s, 0.5, &NoiseSeries::zeros(cfg.n_steps(), cfg.dt_ns), &cfg, 0).unwrap_err();
        assert!(matches!(err, Error::Integration { step: 1, .. }), "{err:?}");
    }
}
