//! Independent reference constructions shared by the integration tests.
#![allow(dead_code)]

use cpbsim::circuit::{build_circuit, homogeneous_circuit, CircuitParams};
use cpbsim::seeds::rng_from_seed;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub const AF: f64 = 1e-18;

/// Pauli matrices in the (|0⟩, |1⟩) charge basis; σ_z|1⟩ = +|1⟩.
pub fn pauli_z() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0])
}

pub fn pauli_x() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

/// `op` acting on qubit k of n (bit k of the basis index).
pub fn embed(op: &DMatrix<f64>, k: usize, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::identity(1, 1);
    for q in (0..n).rev() {
        let f = if q == k { op.clone() } else { DMatrix::identity(2, 2) };
        m = m.kronecker(&f);
    }
    m
}

/// H0 + H1 assembled from Kronecker products.
pub fn kron_hamiltonian(c: &CircuitParams, ng: f64) -> DMatrix<f64> {
    let n = c.n_qubits();
    let dim = 1 << n;
    let ec = c.charging_energies();
    let ej = c.josephson_energies();
    let v = c.interaction_scale();
    let bias = 1.0 - 2.0 * ng;
    let id = DMatrix::<f64>::identity(dim, dim);
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let mut s = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..n {
        let z = embed(&pauli_z(), k, n);
        h += &z * (0.5 * ec[k] * bias) - embed(&pauli_x(), k, n) * (0.5 * ej[k]);
        if v.is_finite() {
            let w = ec[k] / (2.0 * (n as f64 * v).sqrt());
            s += (&z + &id * bias) * w;
        }
    }
    h + &s * &s
}

/// Collective operators J_z = Σσ_z and J_x = Σσ_x.
pub fn collective(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let dim = 1 << n;
    let mut jz = DMatrix::zeros(dim, dim);
    let mut jx = DMatrix::zeros(dim, dim);
    for k in 0..n {
        jz += embed(&pauli_z(), k, n);
        jx += embed(&pauli_x(), k, n);
    }
    (jz, jx)
}

/// Homogeneous collective form K_N (J_z + NΞ)^2 − (E_J/2) J_x with
/// K_N = E_C^2/(4NV).
pub fn collective_hamiltonian(c: &CircuitParams, ng: f64) -> DMatrix<f64> {
    let n = c.n_qubits();
    let ec = c.charging_energies()[0];
    let ej = c.josephson_energies()[0];
    let v = c.interaction_scale();
    let xi = (1.0 + v / ec) * (1.0 - 2.0 * ng);
    let (jz, jx) = collective(n);
    let shifted = jz + DMatrix::identity(1 << n, 1 << n) * (n as f64 * xi);
    &shifted * &shifted * (ec * ec / (4.0 * n as f64 * v)) - jx * (0.5 * ej)
}

/// Ground-state ⟨J_z⟩/N of the collective form in the symmetric (Dicke)
/// sector, S = N/2, J_z = 2m, J_x = S₊ + S₋.
pub fn dicke_ground_jz(n: usize, ec: f64, ej: f64, v: f64, xi: f64) -> f64 {
    let s = n as f64 / 2.0;
    let dim = n + 1;
    let k = ec * ec / (4.0 * n as f64 * v);
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        let m = i as f64 - s;
        h[(i, i)] = k * (2.0 * m + n as f64 * xi).powi(2);
        if i + 1 < dim {
            let off = -0.5 * ej * (s * (s + 1.0) - m * (m + 1.0)).sqrt();
            h[(i, i + 1)] = off;
            h[(i + 1, i)] = off;
        }
    }
    let eig = h.symmetric_eigen();
    let g = eig.eigenvalues.imin();
    let vec: DVector<f64> = eig.eigenvectors.column(g).into();
    (0..dim).map(|i| vec[i] * vec[i] * 2.0 * (i as f64 - s)).sum::<f64>() / n as f64
}

/// Random physical circuit with 1..=max_n qubits; `homogeneous` forces
/// identical junctions.
pub fn random_circuit(seed: u64, max_n: usize, homogeneous: bool) -> CircuitParams {
    let mut rng = rng_from_seed(seed);
    let n = rng.random_range(1..=max_n);
    let cg = rng.random_range(200.0..400.0) * AF;
    let cc = if rng.random_bool(0.15) { 0.0 } else { rng.random_range(1.0..200.0) * AF };
    if homogeneous {
        let cj = rng.random_range(20.0..40.0) * AF;
        let ej = rng.random_range(1.0..5.0);
        return homogeneous_circuit(n, cg, cc, cj, ej).expect("valid circuit");
    }
    let cj: Vec<f64> = (0..n).map(|_| rng.random_range(10.0..50.0) * AF).collect();
    let ej: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..6.0)).collect();
    build_circuit(n, cg, cc, &cj, &ej).expect("valid circuit")
}

/// Reference circuit: C_g = 300 aF, C_j = 30 aF, E_J = 3 GHz.
pub fn reference_circuit(n: usize, eta: f64) -> CircuitParams {
    let cc = cpbsim::circuit::coupling_capacitance_for_eta(300.0 * AF, 30.0 * AF, 3.0, eta).expect("η in range");
    homogeneous_circuit(n, 300.0 * AF, cc, 30.0 * AF, 3.0).expect("valid circuit")
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

pub fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}
