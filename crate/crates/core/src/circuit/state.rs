use num_complex::Complex64;

use crate::error::{Error, Result};

/// Pure state over the 2^N charge basis.
///
/// Basis index `j` encodes the occupations: bit `k` of `j` set means island
/// `k` holds one excess Cooper pair (|1⟩, σ_z = +1). Qubit 0 is the least
/// significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1usize << n_qubits {
            return Err(Error::Domain(format!(
                "state of {} amplitudes does not match 2^{n_qubits}",
                amps.len()
            )));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Computational basis state with occupation bitstring `index`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    /// |1⟩⊗…⊗|1⟩.
    pub fn all_excited(n_qubits: usize) -> Self {
        Self::basis(n_qubits, (1 << n_qubits) - 1)
    }

    /// Tensor product of single-qubit states given as (⟨0|ψ_k⟩, ⟨1|ψ_k⟩).
    pub fn product(factors: &[[Complex64; 2]]) -> Self {
        let n = factors.len();
        let amps = (0..1usize << n)
            .map(|j| {
                factors
                    .iter()
                    .enumerate()
                    .fold(Complex64::new(1.0, 0.0), |acc, (k, f)| acc * f[(j >> k) & 1])
            })
            .collect();
        Self { n_qubits: n, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// ⟨σ_z^(k)⟩ for every qubit.
    pub fn sigma_z(&self) -> Vec<f64> {
        sigma_z_from_probs(&self.probabilities(), self.n_qubits)
    }

    /// ⟨σ_z^(k) σ_z^(k')⟩ for k < k', in lexicographic pair order.
    pub fn sigma_zz(&self) -> Vec<f64> {
        sigma_zz_from_probs(&self.probabilities(), self.n_qubits)
    }

    /// j_z = ⟨J_z⟩ / N.
    pub fn jz(&self) -> f64 {
        let n = self.n_qubits as f64;
        self.amps
            .iter()
            .enumerate()
            .map(|(j, a)| a.norm_sqr() * (2.0 * j.count_ones() as f64 - n))
            .sum::<f64>()
            / n
    }

    /// ⟨σ_x^(k)⟩ for every qubit.
    pub fn sigma_x(&self) -> Vec<f64> {
        (0..self.n_qubits)
            .map(|k| {
                let bit = 1usize << k;
                2.0 * (0..self.amps.len())
                    .filter(|j| j & bit == 0)
                    .map(|j| (self.amps[j].conj() * self.amps[j | bit]).re)
                    .sum::<f64>()
            })
            .collect()
    }
}

pub(crate) fn sigma_z_from_probs(p: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (j, &pj) in p.iter().enumerate() {
        for (k, o) in out.iter_mut().enumerate() {
            if (j >> k) & 1 == 1 {
                *o += pj;
            } else {
                *o -= pj;
            }
        }
    }
    out
}

pub(crate) fn sigma_zz_from_probs(p: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n.saturating_sub(1) / 2];
    for (j, &pj) in p.iter().enumerate() {
        let mut idx = 0;
        for k1 in 0..n {
            let s1 = ((j >> k1) & 1) as i32 * 2 - 1;
            for k2 in k1 + 1..n {
                let s2 = ((j >> k2) & 1) as i32 * 2 - 1;
                out[idx] += pj * (s1 * s2) as f64;
                idx += 1;
            }
        }
    }
    out
}
