//! Mean-field ground state j_z over (η, N_g) with the Ξ = ±1 regime boundaries.

use cpbsim::meanfield::{ground_state_map, CircuitFamily};

fn main() -> cpbsim::Result<()> {
    let family = CircuitFamily {
        gate_capacitance: 300e-18,
        junction_capacitance: 30e-18,
        josephson_energy: 3.0,
    };
    let etas = [0.1, 0.5, 1.0, 2.0, 5.0, 20.0];
    let ng: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let map = ground_state_map(&family, &etas, &ng)?;

    print!("   η \\ N_g");
    for g in &ng {
        print!("{g:>7.1}");
    }
    println!();
    for (i, eta) in map.eta.iter().enumerate() {
        print!("{eta:>10.1}");
        for jz in &map.jz[i] {
            print!("{jz:>7.3}");
        }
        println!();
    }
    for c in &map.contours {
        println!("η = {:>5}: Ξ = +1 at N_g = {:.4}, Ξ = −1 at N_g = {:.4}", c.eta, c.ng_xi_plus_one, c.ng_xi_minus_one);
    }
    Ok(())
}
