//! Ramsey fringe of a single charge qubit: π/2 pulses at the sweet spot, free
//! precession at N_g = 0, T2 from the decaying fringe.

use cpbsim::analysis::fit_t2;
use cpbsim::circuit::homogeneous_circuit;
use cpbsim::dynamics::{run_ramsey, EnsembleSpec, PropagationConfig};
use cpbsim::noise::NoiseModel;

fn main() -> cpbsim::Result<()> {
    let c = homogeneous_circuit(1, 300e-18, 0.0, 30e-18, 3.0)?;
    let cfg = PropagationConfig::for_circuit(&c, 1.0);
    let grid: Vec<f64> = (0..=300).map(|i| i as f64 * 5e-4).collect();
    let ens = EnsembleSpec::new(30, 3);

    for (label, model) in [("noiseless", NoiseModel::silent(c.gate_capacitance())), ("noisy", NoiseModel::for_circuit(&c))] {
        let signal = run_ramsey(&c, &model, &cfg, &grid, None, &ens)?;
        let fit = fit_t2(&signal.free_times_ns, &signal.mean_jz)?;
        println!(
            "{label:>9}: f = {:.3} GHz, T2 = {:.4} ns, decay detected: {}",
            fit.frequency_ghz.unwrap_or(f64::NAN),
            fit.tau_ns,
            fit.decay_detected
        );
    }
    let ec = c.charging_energies()[0];
    println!("expected precession frequency √(E_C² + E_J²) = {:.3} GHz", (ec * ec + 9.0).sqrt());
    Ok(())
}
