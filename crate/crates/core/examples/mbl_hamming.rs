//! Memory of a Néel pattern in the disordered circuit: Hamming distance D(t)
//! for clean and noisy evolution, with the localization-rate fit.

use cpbsim::circuit::{coupling_capacitance_for_eta, homogeneous_circuit};
use cpbsim::dynamics::{EnsembleSpec, PropagationConfig};
use cpbsim::mbl::{hamming_distance_run, neel_state, MblMode};
use cpbsim::noise::NoiseModel;

fn main() -> cpbsim::Result<()> {
    let n = 6;
    let ens = EnsembleSpec::new(12, 8).with_disorder(0.5);
    for eta in [0.77, 71.0] {
        let cc = coupling_capacitance_for_eta(300e-18, 30e-18, 3.0, eta)?;
        let c = homogeneous_circuit(n, 300e-18, cc, 30e-18, 3.0)?;
        let cfg = PropagationConfig::for_circuit(&c, 5.0).with_record_interval(0.01);
        for (label, mode) in [("clean", MblMode::Clean), ("noisy", MblMode::Dissipative(NoiseModel::for_circuit(&c)))] {
            let res = hamming_distance_run(&c, 0.5, &neel_state(n)?, &mode, &cfg, &ens)?;
            let d_end = res.run.hamming.last().copied().unwrap_or(f64::NAN);
            println!(
                "η = {eta:>5} {label}: D(t_end) = {d_end:.3}, fitted D∞ = {:.3}, γ = {:?} /ns, diagonal ensemble = {:?}",
                res.fit.d_infinity, res.fit.gamma_per_ns, res.run.diagonal_ensemble
            );
        }
    }
    Ok(())
}
