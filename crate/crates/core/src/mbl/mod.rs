//! Disordered long-range Ising picture of the inhomogeneous circuit and its
//! many-body-localization diagnostics.
//!
//! In the rotated basis |↑⟩ = (|0⟩+|1⟩)/√2, |↓⟩ = (|0⟩−|1⟩)/√2 with
//! σ̃_x = σ_z and σ̃_z = σ_x the circuit Hamiltonian reads
//!
//! ```text
//! H = Σ_{k≠k'} J_kk' σ̃_x^k σ̃_x^k' − Σ_k (B + D_k)/2 σ̃_z^k + Σ_k Δ_k σ̃_x^k + const
//! J_kk' = E_C,k E_C,k' / (4NV),  B = mean E_J,  D_k = E_J,k − B
//! Δ_k  = E_C,k/2 (1 − 2N_g) (1 + Σ_k' E_C,k' / (NV))
//! ```
//!
//! The pair sum runs over ordered pairs, i.e. each unordered pair carries 2J.

mod levels;

pub use levels::{level_spacing_ratios, spacing_ratios, LevelStats, POISSON_MEAN_R};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::fit::minimize_scalar;
use crate::circuit::{coupling_weights, dense_hamiltonian, CircuitParams, StateVector, MAX_DENSE_QUBITS};
use crate::dynamics::{evolve_with_noise, EnsembleSpec, Observables, PropagationConfig};
use crate::error::{Error, Result};
use crate::noise::{synthesize_noise, NoiseModel, NoiseSeries, MIN_SAMPLES};

/// Ising parameters of one circuit at one bias.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    pub n_qubits: usize,
    /// J_kk', symmetric with zero diagonal.
    pub couplings: DMatrix<f64>,
    pub field: f64,
    pub disorder: Vec<f64>,
    pub residual: Vec<f64>,
    /// Identity part dropped from the Ising form.
    pub constant: f64,
}

pub fn ising_map(circuit: &CircuitParams, ng: f64) -> IsingModel {
    let n = circuit.n_qubits();
    let w = coupling_weights(circuit);
    let w_sum: f64 = w.iter().sum();
    let bias = 1.0 - 2.0 * ng;
    let ec = circuit.charging_energies();
    let field = circuit.mean_josephson_energy();
    let couplings = DMatrix::from_fn(n, n, |a, b| if a == b { 0.0 } else { w[a] * w[b] });
    // 2 w_k W = E_C,k Σ E_C,k' / (2NV)
    let residual = (0..n).map(|k| 0.5 * ec[k] * bias + 2.0 * bias * w[k] * w_sum).collect();
    let constant = w.iter().map(|x| x * x).sum::<f64>() + bias * bias * w_sum * w_sum;
    IsingModel {
        n_qubits: n,
        couplings,
        field,
        disorder: circuit.josephson_energies().iter().map(|e| e - field).collect(),
        residual,
        constant,
    }
}

impl IsingModel {
    /// Dense H_Ising (without the constant) in the σ̃_z product basis; bit k
    /// clear means qubit k is |↑⟩.
    pub fn dense(&self) -> Result<DMatrix<f64>> {
        let n = self.n_qubits;
        if n > MAX_DENSE_QUBITS {
            return Err(Error::Capacity(format!("dense Ising form limited to {MAX_DENSE_QUBITS} qubits, got {n}")));
        }
        let dim = 1usize << n;
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        for j in 0..dim {
            for k in 0..n {
                let z = if (j >> k) & 1 == 0 { 1.0 } else { -1.0 };
                h[(j, j)] -= 0.5 * (self.field + self.disorder[k]) * z;
                h[(j ^ (1 << k), j)] += self.residual[k];
                for k2 in k + 1..n {
                    h[(j ^ (1 << k) ^ (1 << k2), j)] += 2.0 * self.couplings[(k, k2)];
                }
            }
        }
        Ok(h)
    }
}

/// Alternating |↑⟩|↓⟩|↑⟩… in the charge basis, qubit 0 up.
pub fn neel_state(n_qubits: usize) -> Result<StateVector> {
    if n_qubits < 2 {
        return Err(Error::Domain(format!("Néel state needs at least 2 qubits, got {n_qubits}")));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let up = [Complex64::new(r, 0.0), Complex64::new(r, 0.0)];
    let down = [Complex64::new(r, 0.0), Complex64::new(-r, 0.0)];
    let factors: Vec<_> = (0..n_qubits).map(|k| if k % 2 == 0 { up } else { down }).collect();
    Ok(StateVector::product(&factors))
}

/// σ̃_z eigenvalues s_k of a σ̃_z product eigenstate; anything else is
/// rejected because D(t) would need the full two-time correlator.
pub fn pattern_signs(state: &StateVector) -> Result<Vec<f64>> {
    let sx = state.sigma_x();
    if sx.iter().any(|x| (x.abs() - 1.0).abs() > 1e-10) {
        return Err(Error::Unsupported(
            "Hamming distance needs an initial σ̃_z product eigenstate such as the Néel state".into(),
        ));
    }
    Ok(sx.into_iter().map(f64::signum).collect())
}

/// D = ½ − (1/2N) Σ_k s_k ⟨σ̃_z^k⟩.
pub fn hamming_from_sigma_x(signs: &[f64], sigma_x: &[f64]) -> f64 {
    let n = signs.len() as f64;
    0.5 - signs.iter().zip(sigma_x).map(|(s, x)| s * x).sum::<f64>() / (2.0 * n)
}

/// Clean (δN_g ≡ 0) or noisy evolution.
#[derive(Debug, Clone, PartialEq)]
pub enum MblMode {
    Clean,
    Dissipative(NoiseModel),
}

/// Ensemble-averaged Hamming distance.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HammingRun {
    pub times: Vec<f64>,
    pub hamming: Vec<f64>,
    /// Standard error of the ensemble mean at each time.
    pub hamming_sem: Vec<f64>,
    pub n_members: usize,
    /// Infinite-time average from the diagonal ensemble (clean mode only).
    pub diagonal_ensemble: Option<f64>,
}

/// Fit of D∞ (1 − e^{−γt}).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationFit {
    /// Rate in 1/ns (angular GHz); None when the signal carries no growth.
    pub gamma_per_ns: Option<f64>,
    pub d_infinity: f64,
    pub residual_norm: f64,
}

impl LocalizationFit {
    pub fn gamma_undefined(&self) -> bool {
        self.gamma_per_ns.is_none()
    }
}

/// Hamming run plus its localization fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MblResult {
    pub run: HammingRun,
    pub fit: LocalizationFit,
    /// D at t = 3/γ, the short-time plateau.
    pub d_at_three_over_gamma: Option<f64>,
}

/// D(t) averaged over the ensemble. Member i uses disorder draw i and, in the
/// dissipative mode, noise realization i. Clean runs are evaluated from the
/// eigendecomposition of each member and additionally report the diagonal
/// ensemble average.
pub fn hamming_distance_run(
    circuit: &CircuitParams,
    ng0: f64,
    initial: &StateVector,
    mode: &MblMode,
    config: &PropagationConfig,
    ensemble: &EnsembleSpec,
) -> Result<MblResult> {
    let signs = pattern_signs(initial)?;
    if initial.n_qubits() != circuit.n_qubits() {
        return Err(Error::Domain("initial state does not match the circuit".into()));
    }
    if ensemble.n_traj == 0 {
        return Err(Error::Domain("ensemble needs at least one member".into()));
    }
    config.validate(circuit)?;
    let stride = config.record_stride;
    let n_steps = config.n_steps();
    let times: Vec<f64> = (0..=n_steps)
        .filter(|s| s % stride == 0 || *s == n_steps)
        .map(|s| s as f64 * config.dt_ns)
        .collect();

    let members: Vec<(Vec<f64>, Option<f64>)> = (0..ensemble.n_traj)
        .into_par_iter()
        .map(|i| {
            let member = ensemble.member_circuit(circuit, i)?;
            match mode {
                MblMode::Clean => clean_hamming(&member, ng0, initial, &signs, &times),
                MblMode::Dissipative(model) => {
                    let cfg = config.clone().with_observables(Observables {
                        sigma_x: true,
                        ..Observables::default()
                    });
                    let seed = ensemble.noise_seed(i);
                    let len = n_steps.max(MIN_SAMPLES);
                    let noise = if model.is_silent() {
                        NoiseSeries::zeros(len, cfg.dt_ns)
                    } else {
                        synthesize_noise(model, len as f64 * cfg.dt_ns, cfg.dt_ns, seed)?
                    };
                    let rec = evolve_with_noise(&member, initial, ng0, &noise, &cfg, seed)?;
                    let d = rec
                        .sigma_x
                        .expect("σ_x recorded")
                        .iter()
                        .map(|sx| hamming_from_sigma_x(&signs, sx))
                        .collect();
                    Ok((d, None))
                }
            }
        })
        .collect::<Result<_>>()?;

    let m = members.len() as f64;
    let mut hamming = vec![0.0; times.len()];
    let mut second = vec![0.0; times.len()];
    for (d, _) in &members {
        for ((h, s), x) in hamming.iter_mut().zip(second.iter_mut()).zip(d) {
            *h += x;
            *s += x * x;
        }
    }
    let hamming: Vec<f64> = hamming.into_iter().map(|h| h / m).collect();
    let hamming_sem = hamming
        .iter()
        .zip(&second)
        .map(|(mu, s)| if m > 1.0 { ((s / m - mu * mu).max(0.0) / (m - 1.0)).sqrt() } else { 0.0 })
        .collect();
    let diagonal_ensemble = match mode {
        MblMode::Clean => Some(members.iter().map(|(_, d)| d.unwrap_or(0.0)).sum::<f64>() / m),
        MblMode::Dissipative(_) => None,
    };
    let run = HammingRun {
        times,
        hamming,
        hamming_sem,
        n_members: members.len(),
        diagonal_ensemble,
    };
    let fit = fit_localization_rate(&run.times, &run.hamming)?;
    let d_at_three_over_gamma = fit.gamma_per_ns.map(|g| interpolate(&run.times, &run.hamming, 3.0 / g));
    Ok(MblResult {
        run,
        fit,
        d_at_three_over_gamma,
    })
}

fn interpolate(t: &[f64], y: &[f64], at: f64) -> f64 {
    match t.iter().position(|&x| x >= at) {
        None => *y.last().expect("non-empty"),
        Some(0) => y[0],
        Some(i) => {
            let f = (at - t[i - 1]) / (t[i] - t[i - 1]);
            y[i - 1] + f * (y[i] - y[i - 1])
        }
    }
}

/// Relative width under which eigenvalues are treated as one level when
/// forming the diagonal ensemble.
const DEGENERATE_LEVEL_TOL: f64 = 1e-10;

/// D(t) on `times` and the infinite-time average for one noiseless member.
fn clean_hamming(
    circuit: &CircuitParams,
    ng: f64,
    initial: &StateVector,
    signs: &[f64],
    times: &[f64],
) -> Result<(Vec<f64>, Option<f64>)> {
    let eig = dense_hamiltonian(circuit, ng)?.symmetric_eigen();
    let dim = initial.dim();
    let v = &eig.eigenvectors;
    let psi0 = initial.amplitudes();
    let coeffs: Vec<Complex64> = (0..dim)
        .map(|n| v.column(n).iter().zip(psi0).map(|(a, p)| p * a).sum())
        .collect();

    let mut psi = StateVector::basis(circuit.n_qubits(), 0);
    let mut d = Vec::with_capacity(times.len());
    for &t in times {
        let amps = psi.amplitudes_mut();
        amps.fill(Complex64::new(0.0, 0.0));
        for (n, c) in coeffs.iter().enumerate() {
            let a = c * Complex64::from_polar(1.0, -std::f64::consts::TAU * eig.eigenvalues[n] * t);
            for (x, &vj) in amps.iter_mut().zip(v.column(n).iter()) {
                *x += a * vj;
            }
        }
        d.push(hamming_from_sigma_x(signs, &psi.sigma_x()));
    }

    // Diagonal ensemble: project ψ(0) onto each (possibly degenerate) level.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let width = eig.eigenvalues.amax().max(1.0);
    let mut overlap = 0.0;
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim
            && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] < DEGENERATE_LEVEL_TOL * width
        {
            end += 1;
        }
        let amps = psi.amplitudes_mut();
        amps.fill(Complex64::new(0.0, 0.0));
        for &n in &order[start..end] {
            for (x, &vj) in amps.iter_mut().zip(v.column(n).iter()) {
                *x += coeffs[n] * vj;
            }
        }
        let sx = psi.sigma_x();
        overlap += signs.iter().zip(&sx).map(|(s, x)| s * x).sum::<f64>();
        start = end;
    }
    let d_inf = 0.5 - overlap / (2.0 * signs.len() as f64);
    Ok((d, Some(d_inf)))
}

/// Least-squares fit of D∞(1 − e^{−γt}). For fixed γ the amplitude is linear,
/// so only γ is searched (log-spaced scan, then golden section).
pub fn fit_localization_rate(times: &[f64], d: &[f64]) -> Result<LocalizationFit> {
    if times.len() != d.len() || times.len() < 3 {
        return Err(Error::Fit("localization fit needs at least three matching samples".into()));
    }
    let span = times.last().unwrap() - times[0];
    if d.iter().all(|x| x.abs() < 1e-12) || !(span > 0.0) {
        return Ok(LocalizationFit {
            gamma_per_ns: None,
            d_infinity: 0.0,
            residual_norm: d.iter().map(|x| x * x).sum::<f64>().sqrt(),
        });
    }
    let profile = |gamma: f64| -> (f64, f64) {
        let (mut fy, mut ff) = (0.0, 0.0);
        for (t, y) in times.iter().zip(d) {
            let f = 1.0 - (-gamma * t).exp();
            fy += f * y;
            ff += f * f;
        }
        let a = if ff > 0.0 { fy / ff } else { 0.0 };
        let r2 = times
            .iter()
            .zip(d)
            .map(|(t, y)| (y - a * (1.0 - (-gamma * t).exp())).powi(2))
            .sum::<f64>();
        (a, r2)
    };
    let dt_min = times.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let lo = 0.01 / span;
    let hi = 10.0 / dt_min;
    let log_gamma = minimize_scalar(|lg| profile(lg.exp()).1, lo.ln(), hi.ln(), 200)?;
    let gamma = log_gamma.exp();
    let (a, r2) = profile(gamma);
    Ok(LocalizationFit {
        gamma_per_ns: Some(gamma),
        d_infinity: a,
        residual_norm: r2.sqrt(),
    })
}
