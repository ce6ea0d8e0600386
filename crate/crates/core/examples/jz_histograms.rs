//! Distribution of single-trajectory j_z at a few times of a noisy Rabi run.

use cpbsim::analysis::ensemble_stats;
use cpbsim::circuit::homogeneous_circuit;
use cpbsim::dynamics::{run_rabi_ensemble, EnsembleSpec, PropagationConfig};
use cpbsim::noise::NoiseModel;

fn main() -> cpbsim::Result<()> {
    let c = homogeneous_circuit(4, 300e-18, 20e-18, 30e-18, 3.0)?;
    let cfg = PropagationConfig::for_circuit(&c, 4.0).with_record_interval(0.1);
    let records = run_rabi_ensemble(&c, &NoiseModel::for_circuit(&c), &cfg, &EnsembleSpec::new(60, 5))?;
    let last = records[0].len() - 1;
    let stats = ensemble_stats(&records, &[0, last / 4, last], 10)?;
    for h in &stats.snapshots {
        println!("t = {:.2} ns: mean {:+.3}, Δj_z {:.3}", h.time_ns, h.mean, h.std);
        for (b, n) in h.counts.iter().enumerate() {
            println!("  [{:+.1}, {:+.1}) {}", h.bin_edges[b], h.bin_edges[b + 1], "#".repeat(*n));
        }
    }
    Ok(())
}
