use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::circuit::{dense_hamiltonian, CircuitParams};
use crate::dynamics::EnsembleSpec;
use crate::error::{Error, Result};

/// ⟨r⟩ = 2 ln 2 − 1 for P(r) = 2/(1+r)^2.
pub const POISSON_MEAN_R: f64 = 2.0 * std::f64::consts::LN_2 - 1.0;

/// Gaps below this fraction of the spectral width count as degenerate.
pub const DEGENERATE_GAP_TOL: f64 = 1e-12;

/// Pooled adjacent-gap ratio statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub r_values: Vec<f64>,
    pub r_mean: f64,
    pub r_sem: f64,
    /// Ratios dropped because one of their gaps was degenerate.
    pub excluded_degenerate: usize,
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Expected counts under P(r) = 2/(1+r)^2.
    pub poisson_expected: Vec<f64>,
    pub chi_square: f64,
    pub p_value: f64,
}

/// r_n = min(δ_n, δ_{n+1}) / max(δ_n, δ_{n+1}) for an unsorted spectrum.
/// Returns the ratios and the number dropped for degenerate gaps.
pub fn spacing_ratios(eigenvalues: &[f64]) -> (Vec<f64>, usize) {
    let mut e = eigenvalues.to_vec();
    e.sort_by(f64::total_cmp);
    if e.len() < 3 {
        return (Vec::new(), 0);
    }
    let width = (e[e.len() - 1] - e[0]).abs().max(1.0);
    let gaps: Vec<f64> = e.windows(2).map(|w| w[1] - w[0]).collect();
    let mut excluded = 0;
    let mut r = Vec::with_capacity(gaps.len() - 1);
    for g in gaps.windows(2) {
        if g[0] < DEGENERATE_GAP_TOL * width || g[1] < DEGENERATE_GAP_TOL * width {
            excluded += 1;
        } else {
            r.push(g[0].min(g[1]) / g[0].max(g[1]));
        }
    }
    (r, excluded)
}

/// Diagonalize every disorder member of `ensemble` at bias `ng`, pool the gap
/// ratios and compare them with the Poisson density over `n_bins` bins.
pub fn level_spacing_ratios(
    circuit: &CircuitParams,
    ng: f64,
    ensemble: &EnsembleSpec,
    n_bins: usize,
) -> Result<LevelStats> {
    if ensemble.n_traj == 0 || n_bins < 2 {
        return Err(Error::Domain("need at least one disorder draw and two bins".into()));
    }
    let per_draw: Vec<(Vec<f64>, usize)> = (0..ensemble.n_traj)
        .into_par_iter()
        .map(|i| {
            let member = ensemble.member_circuit(circuit, i)?;
            let eig = dense_hamiltonian(&member, ng)?.symmetric_eigenvalues();
            Ok(spacing_ratios(eig.as_slice()))
        })
        .collect::<Result<_>>()?;
    let excluded = per_draw.iter().map(|(_, x)| x).sum();
    let r_values: Vec<f64> = per_draw.into_iter().flat_map(|(r, _)| r).collect();
    pool(r_values, excluded, n_bins)
}

fn pool(r_values: Vec<f64>, excluded_degenerate: usize, n_bins: usize) -> Result<LevelStats> {
    let n = r_values.len();
    if n < 2 {
        return Err(Error::Domain("fewer than two usable gap ratios".into()));
    }
    let r_mean = r_values.iter().sum::<f64>() / n as f64;
    let var = r_values.iter().map(|r| (r - r_mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let bin_edges: Vec<f64> = (0..=n_bins).map(|i| i as f64 / n_bins as f64).collect();
    let mut counts = vec![0usize; n_bins];
    for r in &r_values {
        counts[((r * n_bins as f64) as usize).min(n_bins - 1)] += 1;
    }
    let poisson_expected: Vec<f64> = bin_edges
        .windows(2)
        .map(|w| n as f64 * 2.0 * (1.0 / (1.0 + w[0]) - 1.0 / (1.0 + w[1])))
        .collect();
    let chi_square = counts
        .iter()
        .zip(&poisson_expected)
        .map(|(&o, e)| (o as f64 - e).powi(2) / e)
        .sum::<f64>();
    let dist = ChiSquared::new((n_bins - 1) as f64).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(LevelStats {
        r_values,
        r_mean,
        r_sem: (var / n as f64).sqrt(),
        excluded_degenerate,
        bin_edges,
        counts,
        poisson_expected,
        chi_square,
        p_value: dist.sf(chi_square),
    })
}
