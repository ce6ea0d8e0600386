//! Noisy Rabi ensemble at the sweet spot: T1 of the ensemble envelope and the
//! steady-state j_z statistics.

use cpbsim::analysis::{ensemble_stats, fit_t1, steady_summary, SteadyStateConfig};
use cpbsim::circuit::{coupling_capacitance_for_eta, homogeneous_circuit};
use cpbsim::dynamics::{run_rabi_ensemble, EnsembleSpec, Observables, PropagationConfig};
use cpbsim::noise::NoiseModel;

fn main() -> cpbsim::Result<()> {
    let n = 4;
    let cc = coupling_capacitance_for_eta(300e-18, 30e-18, 3.0, 0.77)?;
    let c = homogeneous_circuit(n, 300e-18, cc, 30e-18, 3.0)?;
    let cfg = PropagationConfig::for_circuit(&c, 5.0)
        .with_record_interval(0.01)
        .with_observables(Observables::correlations());

    let records = run_rabi_ensemble(&c, &NoiseModel::for_circuit(&c), &cfg, &EnsembleSpec::new(40, 1))?;
    let stats = ensemble_stats(&records, &[], 40)?;
    for i in (0..stats.times.len()).step_by(50) {
        println!("t = {:5.2} ns  ⟨j_z⟩ = {:+.3} ± {:.3}", stats.times[i], stats.mean_jz[i], stats.sem_jz(i));
    }

    let t1 = fit_t1(&stats.times, &stats.mean_jz)?;
    println!("T1 = {:.3} ± {:.3} ns ({:?} fit)", t1.tau_ns, t1.tau_se_ns, t1.branch);

    let steady = steady_summary(&records, &stats, &SteadyStateConfig::new(100), 40)?;
    println!(
        "steady state from {:.2} ns: ⟨j_z⟩ = {:+.3}, Δj_z = {:.3}, C_zz = {:.4}",
        steady.from_ns,
        steady.mean_jz,
        steady.delta_jz,
        steady.czz.unwrap_or(f64::NAN)
    );
    Ok(())
}
