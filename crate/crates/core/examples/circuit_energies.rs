//! Energy scales of the reference circuit, the coupling that realises a
//! target η, and a disordered junction draw.

use cpbsim::circuit::{build_circuit, coupling_capacitance_for_eta, sample_disorder, DisorderSpec};
use cpbsim::units::{af_to_farad, farad_to_af};

fn main() -> cpbsim::Result<()> {
    let (cg, cj, ej) = (af_to_farad(300.0), af_to_farad(30.0), 3.0);

    let bare = build_circuit(10, cg, 0.0, &[cj; 10], &[ej; 10])?;
    println!("uncoupled: E_C = {:.2} GHz, E_C/E_J = {:.1}", bare.charging_energies()[0], bare.charging_energies()[0] / ej);

    for eta in [0.08, 0.77, 7.0, 71.0] {
        let cc = coupling_capacitance_for_eta(cg, cj, ej, eta)?;
        let c = build_circuit(10, cg, cc, &[cj; 10], &[ej; 10])?;
        println!(
            "η = {eta:>5}: C_c = {:>8.2} aF, E_C = {:>7.2} GHz, V = {:>9.2} GHz, η back = {:.6}",
            farad_to_af(cc),
            c.charging_energies()[0],
            c.interaction_scale(),
            c.eta()
        );
        for w in c.warnings() {
            println!("    warning: {w}");
        }
    }

    let (caps, ejs) = sample_disorder(10, cj, ej, &DisorderSpec::new(0.5, 42)?)?;
    println!("λ = 0.5 draw:");
    for (k, (c, e)) in caps.iter().zip(&ejs).enumerate() {
        println!("  qubit {k}: C_j = {:6.2} aF, E_J = {e:.3} GHz", farad_to_af(*c));
    }
    Ok(())
}
