//! Spin-coherent (Holstein–Primakoff) ground state of the homogeneous,
//! noiseless circuit.
//!
//! With K = E_C^2/(4V) and Ξ = (1 + V/E_C)(1 − 2N_g) the energy per qubit of
//! the displaced state is
//!
//! ```text
//! E/N = K (2β^2 − 1 + Ξ)^2 − E_J β √(1 − β^2)
//! ```
//!
//! so that j_z = 2β^2 − 1 and j_x = 2β√(1 − β^2).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{coupling_capacitance_for_eta, homogeneous_circuit, CircuitParams};
use crate::error::{Error, Result};

/// Grid used to bracket the stationary points.
pub const BRACKET_POINTS: usize = 2048;
const BISECTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldSolution {
    pub beta: f64,
    pub xi: f64,
    pub energy_per_qubit: f64,
    pub jz_per_qubit: f64,
    pub jx_per_qubit: f64,
}

/// Ξ(V, N_g) = (1 + V/E_C)(1 − 2N_g).
pub fn xi(circuit: &CircuitParams, ng: f64) -> Result<f64> {
    if !circuit.is_homogeneous() {
        return Err(Error::Unsupported("mean-field treatment needs identical qubits".into()));
    }
    let v = circuit.interaction_scale();
    if !v.is_finite() {
        return Err(Error::Domain("Ξ is undefined for uncoupled islands".into()));
    }
    Ok((1.0 + v / circuit.charging_energies()[0]) * (1.0 - 2.0 * ng))
}

/// Energy-minimizing β for the given (K, E_J, Ξ).
fn solve(k: f64, ej: f64, xi: f64) -> MeanFieldSolution {
    let energy = |b: f64| k * (2.0 * b * b - 1.0 + xi).powi(2) - ej * b * (1.0 - b * b).max(0.0).sqrt();
    let solution = |b: f64| MeanFieldSolution {
        beta: b,
        xi,
        energy_per_qubit: energy(b),
        jz_per_qubit: 2.0 * b * b - 1.0,
        jx_per_qubit: 2.0 * b * (1.0 - b * b).max(0.0).sqrt(),
    };
    if ej == 0.0 {
        let jz = (-xi).clamp(-1.0, 1.0);
        return solution(((jz + 1.0) / 2.0).sqrt());
    }
    let slope = |b: f64| 8.0 * k * b * (2.0 * b * b - 1.0 + xi) - ej * (1.0 - 2.0 * b * b) / (1.0 - b * b).sqrt();
    let mut candidates = vec![0.0, 1.0];
    let h = 1.0 / BRACKET_POINTS as f64;
    let mut prev = (h, slope(h));
    for i in 2..BRACKET_POINTS {
        let b = i as f64 * h;
        let s = slope(b);
        if s == 0.0 {
            candidates.push(b);
        } else if prev.1 * s < 0.0 {
            let (mut lo, mut hi) = (prev.0, b);
            let s_lo = prev.1;
            while hi - lo > BISECTION_TOL {
                let mid = 0.5 * (lo + hi);
                if slope(mid) * s_lo > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            candidates.push(0.5 * (lo + hi));
        }
        prev = (b, s);
    }
    // roots inside the first or last grid cell
    for (a, b) in [(1e-15, h), ((BRACKET_POINTS - 1) as f64 * h, 1.0 - 1e-15)] {
        if slope(a) * slope(b) < 0.0 {
            let (mut lo, mut hi) = (a, b);
            let s_lo = slope(a);
            while hi - lo > BISECTION_TOL {
                let mid = 0.5 * (lo + hi);
                if slope(mid) * s_lo > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            candidates.push(0.5 * (lo + hi));
        }
    }
    let best = candidates
        .into_iter()
        .min_by(|a, b| energy(*a).total_cmp(&energy(*b)))
        .expect("endpoints are always candidates");
    solution(best)
}

/// Global energy minimum over the stationary points and the endpoints β ∈ {0, 1}.
pub fn solve_ground_state(circuit: &CircuitParams, ng: f64) -> Result<MeanFieldSolution> {
    let x = xi(circuit, ng)?;
    let ec = circuit.charging_energies()[0];
    let k = ec * ec / (4.0 * circuit.interaction_scale());
    Ok(solve(k, circuit.josephson_energies()[0], x))
}

/// Capacitive family over which η is swept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitFamily {
    pub gate_capacitance: f64,
    pub junction_capacitance: f64,
    pub josephson_energy: f64,
}

impl CircuitFamily {
    /// Homogeneous single-island circuit whose coupling realises `eta`. The
    /// mean-field solution does not depend on N.
    pub fn circuit(&self, eta: f64) -> Result<CircuitParams> {
        let cc = coupling_capacitance_for_eta(self.gate_capacitance, self.junction_capacitance, self.josephson_energy, eta)?;
        homogeneous_circuit(1, self.gate_capacitance, cc, self.junction_capacitance, self.josephson_energy)
    }
}

/// j_z and j_x on an (η, N_g) grid; row i is eta[i].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateMap {
    pub eta: Vec<f64>,
    pub ng: Vec<f64>,
    pub jz: Vec<Vec<f64>>,
    pub jx: Vec<Vec<f64>>,
    pub xi: Vec<Vec<f64>>,
    /// Per η, the N_g values where Ξ = +1 and Ξ = −1.
    pub contours: Vec<XiContour>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiContour {
    pub eta: f64,
    pub ng_xi_plus_one: f64,
    pub ng_xi_minus_one: f64,
}

fn strictly_increasing(xs: &[f64]) -> bool {
    !xs.is_empty() && xs.windows(2).all(|w| w[1] > w[0])
}

pub fn ground_state_map(family: &CircuitFamily, eta_grid: &[f64], ng_grid: &[f64]) -> Result<GroundStateMap> {
    if !strictly_increasing(eta_grid) || !strictly_increasing(ng_grid) {
        return Err(Error::Domain("η and N_g grids must be non-empty and strictly increasing".into()));
    }
    if eta_grid[0] <= 0.0 {
        return Err(Error::Domain("η must be positive for the ground-state map".into()));
    }
    let rows: Vec<(Vec<MeanFieldSolution>, XiContour)> = eta_grid
        .par_iter()
        .map(|&eta| {
            let c = family.circuit(eta)?;
            let sols = ng_grid.iter().map(|&g| solve_ground_state(&c, g)).collect::<Result<Vec<_>>>()?;
            let r = 1.0 + c.interaction_scale() / c.charging_energies()[0];
            let contour = XiContour {
                eta,
                ng_xi_plus_one: 0.5 - 0.5 / r,
                ng_xi_minus_one: 0.5 + 0.5 / r,
            };
            Ok((sols, contour))
        })
        .collect::<Result<_>>()?;
    let pick = |f: fn(&MeanFieldSolution) -> f64| rows.iter().map(|(s, _)| s.iter().map(f).collect()).collect();
    Ok(GroundStateMap {
        eta: eta_grid.to_vec(),
        ng: ng_grid.to_vec(),
        jz: pick(|s| s.jz_per_qubit),
        jx: pick(|s| s.jx_per_qubit),
        xi: pick(|s| s.xi),
        contours: rows.iter().map(|r| r.1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family() -> CircuitFamily {
        CircuitFamily {
            gate_capacitance: 300e-18,
            junction_capacitance: 30e-18,
            josephson_energy: 3.0,
        }
    }

    #[test]
    fn xi_values() {
        let c = family().circuit(1.0).unwrap();
        assert_eq!(xi(&c, 0.5).unwrap(), 0.0);
        // V/E_C = 1 needs C_c = C_g + C_j
        let c = homogeneous_circuit(2, 300e-18, 330e-18, 30e-18, 0.1).unwrap();
        assert!((xi(&c, 0.0).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_josephson_closed_form() {
        for x in [-2.0, -0.4, 0.0, 0.7, 3.0] {
            let s = solve(1.0, 0.0, x);
            assert!((s.jz_per_qubit - (-x).clamp(-1.0, 1.0)).abs() < 1e-12);
            if x.abs() < 1.0 {
                assert!(s.energy_per_qubit.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn local_minimum_certificate() {
        for (eta, g) in [(0.3, 0.5), (2.0, 0.3), (10.0, 0.45), (0.05, 0.1)] {
            let c = family().circuit(eta).unwrap();
            let s = solve_ground_state(&c, g).unwrap();
            let ec = c.charging_energies()[0];
            let k = ec * ec / (4.0 * c.interaction_scale());
            let e = |b: f64| k * (2.0 * b * b - 1.0 + s.xi).powi(2) - 3.0 * b * (1.0 - b * b).max(0.0).sqrt();
            for d in [-1e-6, 1e-6] {
                let b = s.beta + d;
                if (0.0..=1.0).contains(&b) {
                    assert!(e(b) >= s.energy_per_qubit - 1e-15);
                }
            }
        }
    }

    #[test]
    fn map_symmetry_and_sweet_spot() {
        let ng: Vec<f64> = (0..21).map(|i| i as f64 / 20.0).collect();
        let m = ground_state_map(&family(), &[0.1, 1.0, 10.0], &ng).unwrap();
        for (row_z, row_x) in m.jz.iter().zip(&m.jx) {
            for i in 0..ng.len() {
                assert!((row_z[i] + row_z[ng.len() - 1 - i]).abs() < 1e-9);
            }
            let imax = (0..ng.len()).max_by(|&a, &b| row_x[a].total_cmp(&row_x[b])).unwrap();
            assert_eq!(imax, 10);
        }
    }
}
