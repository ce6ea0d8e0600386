use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::seeds::rng_from_seed;

/// Normalized junction areas below this value are redrawn.
pub const MIN_AREA: f64 = 0.05;

/// Fabrication spread of the junction areas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisorderSpec {
    /// Standard deviation of the normalized junction area.
    pub lambda: f64,
    pub seed: u64,
}

impl DisorderSpec {
    pub fn new(lambda: f64, seed: u64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::Domain(format!("disorder lambda must be non-negative, got {lambda}")));
        }
        Ok(Self { lambda, seed })
    }

    pub fn clean() -> Self {
        Self { lambda: 0.0, seed: 0 }
    }
}

/// Draw `n` normalized junction areas a_k ~ Normal(1, λ), redrawing any value
/// below [`MIN_AREA`].
pub fn sample_areas(n: usize, spec: &DisorderSpec) -> Result<Vec<f64>> {
    if !(spec.lambda.is_finite() && spec.lambda >= 0.0) {
        return Err(Error::Domain(format!("disorder lambda must be non-negative, got {}", spec.lambda)));
    }
    if spec.lambda == 0.0 {
        return Ok(vec![1.0; n]);
    }
    let normal = Normal::new(1.0, spec.lambda).map_err(|e| Error::Domain(e.to_string()))?;
    let mut rng = rng_from_seed(spec.seed);
    Ok((0..n)
        .map(|_| loop {
            let a = normal.sample(&mut rng);
            if a >= MIN_AREA {
                break a;
            }
        })
        .collect())
}

/// Junction capacitances and Josephson energies of `n` islands. Both scale
/// with the same area draw, so they are fully correlated.
pub fn sample_disorder(
    n: usize,
    mean_junction_capacitance: f64,
    mean_josephson_energy: f64,
    spec: &DisorderSpec,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let areas = sample_areas(n, spec)?;
    let caps = areas.iter().map(|a| a * mean_junction_capacitance).collect();
    let ej = areas.iter().map(|a| a * mean_josephson_energy).collect();
    Ok((caps, ej))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_lambda_is_homogeneous() {
        let (c, e) = sample_disorder(6, 3e-17, 3.0, &DisorderSpec::new(0.0, 99).unwrap()).unwrap();
        assert!(c.iter().all(|&x| x == 3e-17));
        assert!(e.iter().all(|&x| x == 3.0));
    }

    /// Moments of Normal(1, λ) truncated below at MIN_AREA.
    fn truncated_moments(lambda: f64) -> (f64, f64) {
        use statrs::distribution::{Continuous, ContinuousCDF, Normal as StdNormal};
        let z = StdNormal::new(0.0, 1.0).unwrap();
        let alpha = (MIN_AREA - 1.0) / lambda;
        let hazard = z.pdf(alpha) / (1.0 - z.cdf(alpha));
        let mean = 1.0 + lambda * hazard;
        let var = lambda * lambda * (1.0 + alpha * hazard - hazard * hazard);
        (mean, var.sqrt())
    }

    #[test]
    fn moments_at_lambda_half() {
        let a = sample_areas(10_000, &DisorderSpec::new(0.5, 2024).unwrap()).unwrap();
        let m = a.iter().sum::<f64>() / a.len() as f64;
        let s = (a.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (a.len() - 1) as f64).sqrt();
        let (tm, ts) = truncated_moments(0.5);
        assert!((m - tm).abs() < 0.01 * tm, "mean {m} vs {tm}");
        assert!((s - ts).abs() < 0.02 * ts, "std {s} vs {ts}");
        assert!(a.iter().all(|&x| x >= MIN_AREA));
    }

    #[test]
    fn reproducible_and_correlated() {
        let spec = DisorderSpec::new(0.3, 5).unwrap();
        let (c1, e1) = sample_disorder(8, 3e-17, 3.0, &spec).unwrap();
        let (c2, e2) = sample_disorder(8, 3e-17, 3.0, &spec).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(e1, e2);
        for (c, e) in c1.iter().zip(&e1) {
            assert!((c / 3e-17 - e / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_lambda_rejected() {
        assert!(DisorderSpec::new(-0.1, 0).is_err());
    }
}
