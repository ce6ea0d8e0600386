//! Drive one trajectory with a hand-made bias trace and check it against the
//! dense matrix exponential.

use std::f64::consts::TAU;

use cpbsim::circuit::{build_circuit, dense_hamiltonian, StateVector};
use cpbsim::dynamics::{evolve_with_noise, Observables, PropagationConfig};
use cpbsim::noise::NoiseSeries;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn main() -> cpbsim::Result<()> {
    let c = build_circuit(2, 300e-18, 40e-18, &[28e-18, 33e-18], &[2.7, 3.4])?;
    let mut cfg = PropagationConfig::for_circuit(&c, 0.2).with_observables(Observables {
        sigma_z: true,
        ..Observables::default()
    });
    cfg.dt_ns /= 4.0;
    let n = cfg.n_steps();
    // a slow 5 GHz wobble of the gate charge
    let mut noise = NoiseSeries::zeros(n, cfg.dt_ns);
    for (i, x) in noise.samples.iter_mut().enumerate() {
        *x = 0.02 * (TAU * 5.0 * i as f64 * cfg.dt_ns).sin();
    }
    let psi0 = StateVector::all_excited(2);
    let rec = evolve_with_noise(&c, &psi0, 0.5, &noise, &cfg, 0)?;

    let mut psi = DVector::from_column_slice(psi0.amplitudes());
    for step in 0..n {
        let eig = dense_hamiltonian(&c, 0.5 + noise.samples[step])?.symmetric_eigen();
        let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let phase = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -TAU * e * cfg.dt_ns)));
        psi = &v * phase * v.transpose() * psi;
    }
    let exact = StateVector::from_amplitudes(2, psi.iter().copied().collect())?;
    println!("j_z(t_end): split-operator {:+.12}, dense {:+.12}", rec.jz.last().unwrap(), exact.jz());
    println!("max norm drift {:.1e}", rec.max_norm_drift);
    Ok(())
}
