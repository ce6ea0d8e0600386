//! Small least-squares helpers shared by the decay and localization fits.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Minimize a one-dimensional function on [lo, hi]: scan `n_scan` points,
/// then golden-section search between the neighbours of the best point.
pub fn minimize_scalar<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n_scan: usize) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite() && hi > lo) || n_scan < 3 {
        return Err(Error::Fit(format!("invalid search interval [{lo}, {hi}]")));
    }
    let step = (hi - lo) / (n_scan - 1) as f64;
    let mut best = (0, f64::INFINITY);
    for i in 0..n_scan {
        let v = f(lo + i as f64 * step);
        if v < best.1 {
            best = (i, v);
        }
    }
    if !best.1.is_finite() {
        return Err(Error::Fit("objective is not finite anywhere on the scan".into()));
    }
    let mut a = lo + best.0.saturating_sub(1) as f64 * step;
    let mut b = lo + (best.0 + 1).min(n_scan - 1) as f64 * step;
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (a + b);
    Ok(if f(x) <= best.1 { x } else { lo + best.0 as f64 * step })
}

/// Linear least squares y ≈ X β via SVD. Returns β and the residual sum of squares.
pub fn linear_lsq(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let beta = x
        .clone()
        .svd(true, true)
        .solve(y, 1e-12)
        .map_err(|e| Error::Fit(e.to_string()))?;
    let rss = (y - x * &beta).norm_squared();
    Ok((beta, rss))
}

/// Covariance s^2 (JᵀJ)^{-1} with s^2 = rss/(n − p); None when singular.
pub fn covariance(jac: &DMatrix<f64>, rss: f64) -> Option<DMatrix<f64>> {
    let (n, p) = jac.shape();
    if n <= p {
        return None;
    }
    let s2 = rss / (n - p) as f64;
    (jac.transpose() * jac).try_inverse().map(|m| m * s2)
}

/// Levenberg–Marquardt on residuals r(θ) with Jacobian J(θ).
pub fn levenberg_marquardt<R, J>(residual: R, jacobian: J, start: DVector<f64>, max_iter: usize) -> Result<(DVector<f64>, f64)>
where
    R: Fn(&DVector<f64>) -> DVector<f64>,
    J: Fn(&DVector<f64>) -> DMatrix<f64>,
{
    let mut theta = start;
    let mut r = residual(&theta);
    let mut cost = r.norm_squared();
    if !cost.is_finite() {
        return Err(Error::Fit("non-finite residual at the starting point".into()));
    }
    let mut lambda = 1e-3;
    for _ in 0..max_iter {
        let j = jacobian(&theta);
        let jtj = j.transpose() * &j;
        let g = j.transpose() * &r;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                a[(i, i)] += lambda * jtj[(i, i)].max(1e-12);
            }
            let Some(delta) = a.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let cand = &theta + &delta;
            let rc = residual(&cand);
            let cc = rc.norm_squared();
            if cc.is_finite() && cc < cost {
                let rel = (cost - cc) / cost.max(1e-300);
                theta = cand;
                r = rc;
                cost = cc;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                if rel < 1e-15 {
                    return Ok((theta, cost));
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    Ok((theta, cost))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let x = minimize_scalar(|x| (x - 1.234).powi(2), -5.0, 5.0, 21).unwrap();
        assert!((x - 1.234).abs() < 1e-7);
    }

    #[test]
    fn lm_fits_exponential() {
        let t: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|t| 2.0 * (-0.7 * t).exp()).collect();
        let res = |p: &DVector<f64>| DVector::from_iterator(t.len(), t.iter().zip(&y).map(|(t, y)| p[0] * (-p[1] * t).exp() - y));
        let jac = |p: &DVector<f64>| {
            DMatrix::from_fn(t.len(), 2, |i, c| {
                let e = (-p[1] * t[i]).exp();
                if c == 0 { e } else { -p[0] * t[i] * e }
            })
        };
        let (p, cost) = levenberg_marquardt(res, jac, DVector::from_vec(vec![1.0, 0.3]), 200).unwrap();
        assert!(cost < 1e-20);
        assert!((p[1] - 0.7).abs() < 1e-9);
    }
}
