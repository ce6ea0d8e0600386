//! T1 and steady-state C_zz versus coupling strength η on a small circuit.
//! Every η uses the same noise seeds.

use cpbsim::analysis::{ensemble_stats, fit_t1, steady_summary, SteadyStateConfig};
use cpbsim::circuit::{coupling_capacitance_for_eta, homogeneous_circuit};
use cpbsim::dynamics::{run_rabi_ensemble, EnsembleSpec, Observables, PropagationConfig};
use cpbsim::noise::NoiseModel;

fn main() -> cpbsim::Result<()> {
    println!("{:>6} {:>14} {:>16}", "η", "T1 (ns)", "C_zz(∞)");
    for eta in [0.08, 0.77, 7.0] {
        let cc = coupling_capacitance_for_eta(300e-18, 30e-18, 3.0, eta)?;
        let c = homogeneous_circuit(4, 300e-18, cc, 30e-18, 3.0)?;
        let cfg = PropagationConfig::for_circuit(&c, 10.0)
            .with_record_interval(0.01)
            .with_observables(Observables::correlations());
        let records = run_rabi_ensemble(&c, &NoiseModel::for_circuit(&c), &cfg, &EnsembleSpec::new(30, 11))?;
        let stats = ensemble_stats(&records, &[], 40)?;
        let t1 = fit_t1(&stats.times, &stats.mean_jz)?;
        let steady = steady_summary(&records, &stats, &SteadyStateConfig::new(100), 40)?;
        println!(
            "{eta:>6} {:>7.3} ± {:<5.3} {:>8.4} ± {:.4}",
            t1.tau_ns,
            t1.tau_se_ns,
            steady.czz.unwrap_or(f64::NAN),
            steady.czz_se.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
