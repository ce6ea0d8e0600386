mod common;

use common::*;
use cpbsim::circuit::{apply_hamiltonian, build_circuit, dense_hamiltonian, homogeneous_circuit, StateVector};
use cpbsim::mbl::ising_map;
use cpbsim::seeds::rng_from_seed;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

const DRAWS: u64 = 20;

fn random_state(n: usize, seed: u64) -> StateVector {
    let mut rng = rng_from_seed(seed);
    let amps: Vec<Complex64> = (0..1 << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(n, amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

#[test]
fn dense_matches_kronecker_oracle() {
    for d in 0..DRAWS {
        let c = random_circuit(100 + d, 6, false);
        let ng = rng_from_seed(d).random_range(-0.5..1.5);
        let h = dense_hamiltonian(&c, ng).unwrap();
        let oracle = kron_hamiltonian(&c, ng);
        let scale = oracle.amax();
        assert!(max_abs_diff(&h, &oracle) <= 1e-12 * scale, "draw {d}: {}", max_abs_diff(&h, &oracle));
    }
}

#[test]
fn matrix_free_matches_dense() {
    for d in 0..DRAWS {
        let c = random_circuit(200 + d, 6, false);
        let ng = 0.5 + 0.1 * d as f64 / DRAWS as f64;
        let psi = random_state(c.n_qubits(), 300 + d);
        let out = apply_hamiltonian(&c, ng, &psi).unwrap();
        let h = kron_hamiltonian(&c, ng);
        let scale = h.amax();
        for (i, got) in out.amplitudes().iter().enumerate() {
            let want: Complex64 = (0..c.dim()).map(|j| psi.amplitudes()[j] * h[(i, j)]).sum();
            assert!((got - want).norm() <= 1e-10 * scale, "draw {d} row {i}");
        }
    }
}

#[test]
fn homogeneous_collective_form_differs_by_constant() {
    for d in 0..DRAWS {
        let mut c = random_circuit(400 + d, 6, true);
        if !c.interaction_scale().is_finite() {
            c = homogeneous_circuit(c.n_qubits(), 300.0 * AF, 20.0 * AF, 30.0 * AF, 3.0).unwrap();
        }
        let ng = 0.05 * d as f64;
        let diff = dense_hamiltonian(&c, ng).unwrap() - collective_hamiltonian(&c, ng);
        let shift = diff[(0, 0)];
        let residual = diff - DMatrix::identity(c.dim(), c.dim()) * shift;
        assert!(residual.amax() <= 1e-10 * (1.0 + shift.abs()), "draw {d}: {}", residual.amax());
    }
}

#[test]
fn ising_map_is_a_constant_shift() {
    for d in 0..DRAWS {
        let mut c = random_circuit(500 + d, 6, false);
        if c.n_qubits() < 2 {
            c = random_circuit(900 + d, 6, false);
        }
        let ng = rng_from_seed(600 + d).random_range(0.0..1.0);
        let ising = ising_map(&c, ng);
        let spec_ising = sorted_eigenvalues(&ising.dense().unwrap());
        let spec = sorted_eigenvalues(&dense_hamiltonian(&c, ng).unwrap());
        let shift = spec_ising[0] - spec[0];
        let worst = spec.iter().zip(&spec_ising).map(|(a, b)| (b - a - shift).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-10 * spec.last().unwrap().abs().max(1.0), "draw {d}: {worst}");
    }
}

#[test]
fn uncoupled_spectrum_is_tensor_sum() {
    let ej = [1.0, 2.5, 3.0, 4.2];
    let cj = [25.0 * AF, 30.0 * AF, 33.0 * AF, 40.0 * AF];
    let c = build_circuit(4, 300.0 * AF, 0.0, &cj, &ej).unwrap();
    let ng: f64 = 0.37;
    let levels: Vec<f64> = (0..4)
        .map(|k| 0.5 * (c.charging_energies()[k].powi(2) * (1.0 - 2.0 * ng).powi(2) + ej[k] * ej[k]).sqrt())
        .collect();
    let mut sums: Vec<f64> = (0..16)
        .map(|j: usize| (0..4).map(|k| if (j >> k) & 1 == 1 { levels[k] } else { -levels[k] }).sum())
        .collect();
    sums.sort_by(f64::total_cmp);
    let spec = sorted_eigenvalues(&dense_hamiltonian(&c, ng).unwrap());
    for (a, b) in spec.iter().zip(&sums) {
        assert!((a - b).abs() < 1e-10 * 200.0, "{a} vs {b}");
    }
}

#[test]
fn hermitian_and_symmetric_inner_product() {
    for d in 0..5 {
        let c = random_circuit(700 + d, 5, false);
        let h = dense_hamiltonian(&c, 0.3).unwrap();
        assert!(max_abs_diff(&h, &h.transpose()) < 1e-12 * h.amax());
        let phi = random_state(c.n_qubits(), 800 + d);
        let psi = random_state(c.n_qubits(), 850 + d);
        let hpsi = apply_hamiltonian(&c, 0.3, &psi).unwrap();
        let hphi = apply_hamiltonian(&c, 0.3, &phi).unwrap();
        assert!((phi.inner(&hpsi) - hphi.inner(&psi)).norm() < 1e-12 * h.amax());
    }
}

#[test]
fn relabelling_qubits_leaves_spectrum_invariant() {
    let cj = [30.0 * AF; 5];
    let ej = [1.0, 2.0, 3.0, 4.0, 5.0];
    let perm = [3.0, 5.0, 1.0, 4.0, 2.0];
    let a = build_circuit(5, 300.0 * AF, 50.0 * AF, &cj, &ej).unwrap();
    let b = build_circuit(5, 300.0 * AF, 50.0 * AF, &cj, &perm).unwrap();
    let sa = sorted_eigenvalues(&dense_hamiltonian(&a, 0.42).unwrap());
    let sb = sorted_eigenvalues(&dense_hamiltonian(&b, 0.42).unwrap());
    for (x, y) in sa.iter().zip(&sb) {
        assert!((x - y).abs() < 1e-9, "{x} vs {y}");
    }
}

#[test]
fn single_qubit_gap_at_zero_bias() {
    let c = reference_circuit(1, 0.0);
    let spec = sorted_eigenvalues(&dense_hamiltonian(&c, 0.0).unwrap());
    let ec = c.charging_energies()[0];
    assert!(((spec[1] - spec[0]) - (ec * ec + 9.0).sqrt()).abs() < 1e-9);
}
