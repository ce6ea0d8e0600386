//! Device description of N capacitively coupled Cooper-pair boxes.
//!
//! All qubits share one gate capacitance `C_g` and one coupling capacitance
//! `C_c`; the junctions carry the only inhomogeneity. Derived quantities follow
//!
//! ```text
//! C_Σ,k = C_g + C_j,k + C_c
//! E_C,k = (2e)^2 / (2 C_Σ,k)
//! V     = (2e)^2 / (2 C_c) − mean_k E_C,k
//! η     = mean(E_C)^2 / (mean(E_J) V)
//! ```

mod disorder;
mod hamiltonian;
mod state;

pub use disorder::{sample_areas, sample_disorder, DisorderSpec, MIN_AREA};
pub(crate) use hamiltonian::coupling_weights;
pub use hamiltonian::{apply_hamiltonian, dense_hamiltonian, DiagonalTerms, Hamiltonian, MAX_DENSE_QUBITS};
pub use state::StateVector;
pub(crate) use state::{sigma_z_from_probs, sigma_zz_from_probs};

use crate::error::{Error, Result};
use crate::units::pair_charging_energy_ghz;

/// Below this E_C/E_J ratio the two-state truncation is no longer trusted.
pub const CHARGING_LIMIT_RATIO: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitParams {
    n_qubits: usize,
    gate_capacitance: f64,
    coupling_capacitance: f64,
    junction_capacitances: Vec<f64>,
    josephson_energies: Vec<f64>,
    total_capacitances: Vec<f64>,
    charging_energies: Vec<f64>,
    interaction_scale: f64,
    eta: f64,
    warnings: Vec<String>,
}

/// Build and validate a circuit. Capacitances in farads, Josephson energies as
/// E_J/h in GHz.
pub fn build_circuit(
    n_qubits: usize,
    gate_capacitance: f64,
    coupling_capacitance: f64,
    junction_capacitances: &[f64],
    josephson_energies: &[f64],
) -> Result<CircuitParams> {
    if n_qubits == 0 {
        return Err(Error::Domain("n_qubits must be positive".into()));
    }
    if junction_capacitances.len() != n_qubits || josephson_energies.len() != n_qubits {
        return Err(Error::Domain(format!(
            "expected {n_qubits} junction capacitances and Josephson energies, got {} and {}",
            junction_capacitances.len(),
            josephson_energies.len()
        )));
    }
    if !(gate_capacitance.is_finite() && gate_capacitance > 0.0) {
        return Err(Error::Domain(format!("gate capacitance must be positive, got {gate_capacitance}")));
    }
    if !(coupling_capacitance.is_finite() && coupling_capacitance >= 0.0) {
        return Err(Error::Domain(format!(
            "coupling capacitance must be non-negative, got {coupling_capacitance}"
        )));
    }
    for (k, &c) in junction_capacitances.iter().enumerate() {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Domain(format!("junction capacitance {k} must be positive, got {c}")));
        }
    }
    for (k, &e) in josephson_energies.iter().enumerate() {
        if !(e.is_finite() && e >= 0.0) {
            return Err(Error::Domain(format!("Josephson energy {k} must be non-negative, got {e}")));
        }
    }

    let total_capacitances: Vec<f64> = junction_capacitances
        .iter()
        .map(|cj| gate_capacitance + cj + coupling_capacitance)
        .collect();
    let charging_energies: Vec<f64> = total_capacitances.iter().map(|&c| pair_charging_energy_ghz(c)).collect();
    let mean_ec = mean(&charging_energies);
    let mean_ej = mean(josephson_energies);

    let interaction_scale = if coupling_capacitance == 0.0 {
        f64::INFINITY
    } else {
        pair_charging_energy_ghz(coupling_capacitance) - mean_ec
    };
    if !(interaction_scale > 0.0) {
        return Err(Error::InvalidParameters(format!(
            "interaction scale V must be positive, got {interaction_scale} GHz"
        )));
    }
    let eta = if interaction_scale.is_infinite() {
        0.0
    } else {
        mean_ec * mean_ec / (mean_ej * interaction_scale)
    };

    let warnings = charging_limit_warnings(&charging_energies, josephson_energies);

    Ok(CircuitParams {
        n_qubits,
        gate_capacitance,
        coupling_capacitance,
        junction_capacitances: junction_capacitances.to_vec(),
        josephson_energies: josephson_energies.to_vec(),
        total_capacitances,
        charging_energies,
        interaction_scale,
        eta,
        warnings,
    })
}

/// Identical junctions on every island.
pub fn homogeneous_circuit(
    n_qubits: usize,
    gate_capacitance: f64,
    coupling_capacitance: f64,
    junction_capacitance: f64,
    josephson_energy: f64,
) -> Result<CircuitParams> {
    build_circuit(
        n_qubits,
        gate_capacitance,
        coupling_capacitance,
        &vec![junction_capacitance; n_qubits],
        &vec![josephson_energy; n_qubits],
    )
}

fn charging_limit_warnings(ec: &[f64], ej: &[f64]) -> Vec<String> {
    ec.iter()
        .zip(ej)
        .enumerate()
        .filter(|(_, (&c, &j))| j > 0.0 && c / j < CHARGING_LIMIT_RATIO)
        .map(|(k, (&c, &j))| {
            format!("qubit {k}: E_C/E_J = {:.2} is below the charging-limit ratio {CHARGING_LIMIT_RATIO}", c / j)
        })
        .collect()
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

impl CircuitParams {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Hilbert-space dimension 2^N.
    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn gate_capacitance(&self) -> f64 {
        self.gate_capacitance
    }

    pub fn coupling_capacitance(&self) -> f64 {
        self.coupling_capacitance
    }

    pub fn junction_capacitances(&self) -> &[f64] {
        &self.junction_capacitances
    }

    pub fn josephson_energies(&self) -> &[f64] {
        &self.josephson_energies
    }

    pub fn total_capacitances(&self) -> &[f64] {
        &self.total_capacitances
    }

    pub fn charging_energies(&self) -> &[f64] {
        &self.charging_energies
    }

    /// V in GHz; +inf when the islands are uncoupled.
    pub fn interaction_scale(&self) -> f64 {
        self.interaction_scale
    }

    /// Dimensionless coupling η = E_C^2 / (E_J V) built from the mean energies.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn mean_charging_energy(&self) -> f64 {
        mean(&self.charging_energies)
    }

    pub fn mean_josephson_energy(&self) -> f64 {
        mean(&self.josephson_energies)
    }

    pub fn max_charging_energy(&self) -> f64 {
        self.charging_energies.iter().cloned().fold(0.0, f64::max)
    }

    /// Charging-limit advisories; empty when every qubit has E_C/E_J ≥ 10.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn is_homogeneous(&self) -> bool {
        let same = |xs: &[f64]| xs.iter().all(|&x| x == xs[0]);
        same(&self.junction_capacitances) && same(&self.josephson_energies)
    }

    /// Same capacitive network with a different set of junctions.
    pub fn with_junctions(&self, junction_capacitances: &[f64], josephson_energies: &[f64]) -> Result<Self> {
        build_circuit(
            self.n_qubits,
            self.gate_capacitance,
            self.coupling_capacitance,
            junction_capacitances,
            josephson_energies,
        )
    }
}

/// Coupling capacitance (farads) that realises a target η for a homogeneous
/// circuit with the given gate/junction capacitances and Josephson energy.
///
/// With S = C_g + C_j and K = (2e)^2/2 the relation η = (E_C/E_J)·C_c/S and
/// E_C = K/(S + C_c) invert in closed form to
/// `C_c = η E_J S^2 / (K − η E_J S)`. The largest reachable η is E_C(C_c=0)/E_J.
pub fn coupling_capacitance_for_eta(
    gate_capacitance: f64,
    junction_capacitance: f64,
    josephson_energy: f64,
    eta: f64,
) -> Result<f64> {
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::Domain(format!("eta must be finite and non-negative, got {eta}")));
    }
    if !(josephson_energy > 0.0) {
        return Err(Error::Domain("Josephson energy must be positive to define eta".into()));
    }
    if eta == 0.0 {
        return Ok(0.0);
    }
    let s = gate_capacitance + junction_capacitance;
    // K in GHz·F so that E_C = K / C.
    let k = pair_charging_energy_ghz(1.0);
    let denom = k - eta * josephson_energy * s;
    if !(denom > 0.0) {
        let eta_max = k / (s * josephson_energy);
        return Err(Error::ChargingLimit(format!(
            "eta = {eta} is unreachable; the coupling saturates at eta = {eta_max:.3}"
        )));
    }
    Ok(eta * josephson_energy * s * s / denom)
}
