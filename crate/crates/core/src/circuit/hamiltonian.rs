//! Two-state Hamiltonian of the coupled boxes, H/h in GHz:
//!
//! ```text
//! H0 = Σ_k [ E_C,k/2 (1 − 2N_g) σ_z^k − E_J,k/2 σ_x^k ]
//! H1 = [ Σ_k E_C,k / (2√(NV)) (σ_z^k + 1 − 2N_g) ]^2
//! ```
//!
//! H1 and the charging part of H0 are diagonal in the charge basis and exactly
//! quadratic in N_g, so the diagonal is cached as `A + B·N_g + C·N_g^2`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{CircuitParams, StateVector};
use crate::error::{Error, Result};

/// Largest register the dense routines will build (2^14 × 2^14 doubles).
pub const MAX_DENSE_QUBITS: usize = 14;

/// Diagonal of H as a quadratic polynomial in the gate charge.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalTerms {
    pub constant: Vec<f64>,
    pub linear: Vec<f64>,
    /// The N_g^2 coefficient, 4(Σ_k w_k)^2, is the same for every basis state.
    pub quadratic: f64,
}

impl DiagonalTerms {
    fn new(circuit: &CircuitParams) -> Self {
        let n = circuit.n_qubits();
        let half_ec: Vec<f64> = circuit.charging_energies().iter().map(|e| 0.5 * e).collect();
        let w = coupling_weights(circuit);
        let w_sum: f64 = w.iter().sum();
        let dim = 1usize << n;
        let mut constant = Vec::with_capacity(dim);
        let mut linear = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut u = 0.0;
            let mut m = 0.0;
            for k in 0..n {
                if (j >> k) & 1 == 1 {
                    u += half_ec[k];
                    m += 2.0 * w[k];
                } else {
                    u -= half_ec[k];
                }
            }
            // D = (1 − 2g) u + (m − 2g W)^2 with m = Σ w_k (s_k + 1)
            constant.push(u + m * m);
            linear.push(-2.0 * u - 4.0 * w_sum * m);
        }
        Self {
            constant,
            linear,
            quadratic: 4.0 * w_sum * w_sum,
        }
    }

    #[inline]
    pub fn value(&self, index: usize, ng: f64) -> f64 {
        self.constant[index] + ng * (self.linear[index] + ng * self.quadratic)
    }

    /// The linear coefficient is affine in the occupation bits:
    /// `linear[j] = offset + Σ_k weights[k] n_k(j)`.
    pub fn linear_bit_weights(&self, n_qubits: usize) -> (f64, Vec<f64>) {
        let offset = self.linear[0];
        let weights = (0..n_qubits).map(|k| self.linear[1 << k] - offset).collect();
        (offset, weights)
    }
}

/// w_k = E_C,k / (2√(N V)); zero for uncoupled islands.
pub(crate) fn coupling_weights(circuit: &CircuitParams) -> Vec<f64> {
    let v = circuit.interaction_scale();
    let n = circuit.n_qubits() as f64;
    circuit
        .charging_energies()
        .iter()
        .map(|ec| if v.is_infinite() { 0.0 } else { ec / (2.0 * (n * v).sqrt()) })
        .collect()
}

/// Matrix-free Hamiltonian with its diagonal cached for any N_g.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    n_qubits: usize,
    diagonal: DiagonalTerms,
    half_ej: Vec<f64>,
}

impl Hamiltonian {
    pub fn new(circuit: &CircuitParams) -> Self {
        Self {
            n_qubits: circuit.n_qubits(),
            diagonal: DiagonalTerms::new(circuit),
            half_ej: circuit.josephson_energies().iter().map(|e| 0.5 * e).collect(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn diagonal(&self) -> &DiagonalTerms {
        &self.diagonal
    }

    /// E_J,k / 2 for each island.
    pub fn half_josephson(&self) -> &[f64] {
        &self.half_ej
    }

    /// `out = H(ng) psi`, both slices of length 2^N.
    pub fn apply_into(&self, ng: f64, psi: &[Complex64], out: &mut [Complex64]) {
        for (j, (o, p)) in out.iter_mut().zip(psi).enumerate() {
            *o = p * self.diagonal.value(j, ng);
        }
        for (k, &t) in self.half_ej.iter().enumerate() {
            if t == 0.0 {
                continue;
            }
            let bit = 1usize << k;
            for j in 0..psi.len() {
                out[j] -= psi[j ^ bit] * t;
            }
        }
    }

    pub fn apply(&self, ng: f64, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(Error::Domain(format!(
                "state dimension {} does not match Hamiltonian dimension {}",
                psi.dim(),
                self.dim()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); psi.dim()];
        self.apply_into(ng, psi.amplitudes(), &mut out);
        StateVector::from_amplitudes(self.n_qubits, out)
    }

    /// ⟨psi|H(ng)|psi⟩ in GHz.
    pub fn expectation(&self, ng: f64, psi: &[Complex64]) -> f64 {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.apply_into(ng, psi, &mut out);
        psi.iter().zip(&out).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

/// H(ng)·psi in GHz.
pub fn apply_hamiltonian(circuit: &CircuitParams, ng: f64, psi: &StateVector) -> Result<StateVector> {
    Hamiltonian::new(circuit).apply(ng, psi)
}

/// Dense real-symmetric H(ng). The diagonal is evaluated term by term from the
/// Pauli form rather than through the cached polynomial.
pub fn dense_hamiltonian(circuit: &CircuitParams, ng: f64) -> Result<DMatrix<f64>> {
    let n = circuit.n_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Capacity(format!(
            "dense Hamiltonian limited to {MAX_DENSE_QUBITS} qubits, got {n}"
        )));
    }
    let dim = 1usize << n;
    let w = coupling_weights(circuit);
    let ec = circuit.charging_energies();
    let ej = circuit.josephson_energies();
    let bias = 1.0 - 2.0 * ng;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..dim {
        let mut free = 0.0;
        let mut coupled = 0.0;
        for k in 0..n {
            let s = if (j >> k) & 1 == 1 { 1.0 } else { -1.0 };
            free += 0.5 * ec[k] * bias * s;
            coupled += w[k] * (s + bias);
        }
        h[(j, j)] = free + coupled * coupled;
        for (k, &e) in ej.iter().enumerate() {
            h[(j, j ^ (1 << k))] -= 0.5 * e;
        }
    }
    Ok(h)
}
