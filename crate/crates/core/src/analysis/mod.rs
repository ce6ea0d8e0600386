//! Ensemble statistics, decay fits and steady-state detection.
//!
//! Every reduction over trajectories sorts its summands first, so the result
//! does not depend on the order in which trajectories arrive.

pub mod fit;

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dynamics::TrajectoryRecord;
use crate::error::{Error, Result};
use fit::{covariance, levenberg_marquardt, linear_lsq, minimize_scalar};

/// Bins over [−1, 1] for j_z histograms.
pub const DEFAULT_HISTOGRAM_BINS: usize = 50;

/// Order-independent sum.
fn stable_sum(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum()
}

/// Fixed-edge histogram of j_z values with the ensemble spread.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub time_ns: f64,
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub mean: f64,
    /// Population standard deviation Δj_z.
    pub std: f64,
}

/// Histogram of `values` over [−1, 1] with `n_bins` equal bins.
pub fn histogram_jz(values: &[f64], time_ns: f64, n_bins: usize) -> Result<Histogram> {
    if values.is_empty() || n_bins == 0 {
        return Err(Error::Domain("histogram needs values and at least one bin".into()));
    }
    let bin_edges: Vec<f64> = (0..=n_bins).map(|i| -1.0 + 2.0 * i as f64 / n_bins as f64).collect();
    let mut counts = vec![0usize; n_bins];
    for v in values {
        let idx = (((v + 1.0) / 2.0 * n_bins as f64).floor().max(0.0) as usize).min(n_bins - 1);
        counts[idx] += 1;
    }
    let n = values.len() as f64;
    let mut v = values.to_vec();
    let mean = stable_sum(&mut v) / n;
    let mut sq: Vec<f64> = values.iter().map(|x| (x - mean).powi(2)).collect();
    let std = (stable_sum(&mut sq) / n).sqrt();
    Ok(Histogram {
        time_ns,
        bin_edges,
        counts,
        mean,
        std,
    })
}

/// Connected σ_zσ_z correlation of one state,
/// (1/(N(N−1))) Σ_{k≠k'} [⟨σ_z^k σ_z^k'⟩ − ⟨σ_z^k⟩⟨σ_z^k'⟩].
pub fn czz_single(sigma_z: &[f64], sigma_zz: &[f64]) -> Result<f64> {
    let n = sigma_z.len();
    if n < 2 || sigma_zz.len() != n * (n - 1) / 2 {
        return Err(Error::Domain(format!(
            "C_zz needs N ≥ 2 and N(N−1)/2 pair values, got N = {n} and {} pairs",
            sigma_zz.len()
        )));
    }
    let mut idx = 0;
    let mut acc = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            acc += sigma_zz[idx] - sigma_z[a] * sigma_z[b];
            idx += 1;
        }
    }
    Ok(2.0 * acc / (n * (n - 1)) as f64)
}

/// Ensemble-averaged C_zz at record `index`.
pub fn compute_czz(records: &[TrajectoryRecord], index: usize) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::Domain("empty ensemble".into()));
    }
    let mut vals = records
        .iter()
        .map(|r| {
            let (Some(z), Some(zz)) = (r.sigma_z.as_ref(), r.sigma_zz.as_ref()) else {
                return Err(Error::Domain("trajectory lacks recorded σ_z / σ_zσ_z expectations".into()));
            };
            let (Some(z), Some(zz)) = (z.get(index), zz.get(index)) else {
                return Err(Error::Domain(format!("record index {index} out of range")));
            };
            czz_single(z, zz)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(stable_sum(&mut vals) / records.len() as f64)
}

/// Ensemble moments of j_z on the common record grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub times: Vec<f64>,
    pub mean_jz: Vec<f64>,
    pub var_jz: Vec<f64>,
    /// Present when every trajectory recorded σ_z and σ_zσ_z.
    pub czz: Option<Vec<f64>>,
    pub snapshots: Vec<Histogram>,
    pub n_traj: usize,
}

impl EnsembleStats {
    /// Standard error of ⟨j_z⟩_E at record `i`.
    pub fn sem_jz(&self, i: usize) -> f64 {
        (self.var_jz[i] / self.n_traj as f64).sqrt()
    }
}

/// Reduce an ensemble; histograms are taken at the record indices in `snapshots`.
pub fn ensemble_stats(records: &[TrajectoryRecord], snapshots: &[usize], n_bins: usize) -> Result<EnsembleStats> {
    let first = records.first().ok_or_else(|| Error::Domain("empty ensemble".into()))?;
    let len = first.len();
    if records.iter().any(|r| r.len() != len || r.times != first.times) {
        return Err(Error::Domain("trajectories are recorded on different time grids".into()));
    }
    let n = records.len() as f64;
    let mut mean_jz = Vec::with_capacity(len);
    let mut var_jz = Vec::with_capacity(len);
    let mut column = vec![0.0; records.len()];
    for i in 0..len {
        for (c, r) in column.iter_mut().zip(records) {
            *c = r.jz[i];
        }
        let m = stable_sum(&mut column) / n;
        for c in column.iter_mut() {
            *c = (*c - m).powi(2);
        }
        mean_jz.push(m);
        var_jz.push(stable_sum(&mut column) / n);
    }
    let has_corr = records.iter().all(|r| r.sigma_z.is_some() && r.sigma_zz.is_some());
    let czz = if has_corr && first.sigma_z.as_ref().is_some_and(|z| z.first().is_some_and(|v| v.len() >= 2)) {
        Some((0..len).map(|i| compute_czz(records, i)).collect::<Result<Vec<_>>>()?)
    } else {
        None
    };
    let snapshots = snapshots
        .iter()
        .map(|&i| {
            if i >= len {
                return Err(Error::Domain(format!("snapshot index {i} out of range")));
            }
            let vals: Vec<f64> = records.iter().map(|r| r.jz[i]).collect();
            histogram_jz(&vals, first.times[i], n_bins)
        })
        .collect::<Result<_>>()?;
    Ok(EnsembleStats {
        times: first.times.clone(),
        mean_jz,
        var_jz,
        czz,
        snapshots,
        n_traj: records.len(),
    })
}

/// Which model produced a [`DecayFit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitBranch {
    /// A e^{−t/T} + c through the extrema magnitudes.
    Extrema,
    /// A e^{−t/T} + c through the signal itself.
    Direct,
    /// A e^{−t/T} cos(2πft + φ) + c.
    Oscillatory,
}

/// Result of an exponential-envelope fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Decay time in ns; infinite when no decay is detected.
    pub tau_ns: f64,
    pub tau_se_ns: f64,
    pub frequency_ghz: Option<f64>,
    pub frequency_se_ghz: Option<f64>,
    pub amplitude: f64,
    pub offset: f64,
    pub phase: Option<f64>,
    pub residual_norm: f64,
    pub window_ns: (f64, f64),
    pub n_points: usize,
    pub branch: FitBranch,
    pub decay_detected: bool,
}

/// Extrema found by hysteresis peak detection: a turning point is accepted
/// once the signal has moved away from it by more than `delta`. Interior
/// extrema are refined by a parabola through the neighbouring samples.
pub fn find_extrema(times: &[f64], y: &[f64], delta: f64) -> Vec<(f64, f64)> {
    let refine = |i: usize| -> (f64, f64) {
        if i == 0 || i + 1 >= y.len() {
            return (times[i], y[i]);
        }
        let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
        let denom = a - 2.0 * b + c;
        let h = 0.5 * (times[i + 1] - times[i - 1]);
        if denom == 0.0 {
            return (times[i], b);
        }
        let p = 0.5 * (a - c) / denom;
        (times[i] + p * h, b - 0.25 * (a - c) * p)
    };
    let mut out = Vec::new();
    if y.is_empty() {
        return out;
    }
    let (mut imax, mut imin) = (0, 0);
    // 0: undecided, 1: looking for a maximum, -1: looking for a minimum
    let mut mode = 0i8;
    for i in 1..y.len() {
        if y[i] > y[imax] {
            imax = i;
        }
        if y[i] < y[imin] {
            imin = i;
        }
        match mode {
            0 => {
                if y[imax] - y[i] > delta {
                    out.push(refine(imax));
                    mode = -1;
                    imin = i;
                } else if y[i] - y[imin] > delta {
                    out.push(refine(imin));
                    mode = 1;
                    imax = i;
                }
            }
            1 => {
                if y[imax] - y[i] > delta {
                    out.push(refine(imax));
                    mode = -1;
                    imin = i;
                }
            }
            _ => {
                if y[i] - y[imin] > delta {
                    out.push(refine(imin));
                    mode = 1;
                    imax = i;
                }
            }
        }
    }
    out
}

/// Extrema count below which [`fit_t1`] falls back to the direct fit.
pub const MIN_EXTREMA: usize = 4;
/// Hysteresis of the extremum detector relative to the signal's peak magnitude.
pub const EXTREMUM_THRESHOLD: f64 = 0.02;

/// A e^{−t/T} + c by variable projection over log T. Errors when the best T
/// exceeds fifty times the data span (no decay).
fn fit_exp_offset(t: &[f64], y: &[f64]) -> Result<(f64, f64, f64, f64, f64)> {
    let n = t.len();
    if n < 4 {
        return Err(Error::Fit(format!("exponential fit needs at least 4 points, got {n}")));
    }
    let span = t[n - 1] - t[0];
    if !(span > 0.0) {
        return Err(Error::Fit("fit window has zero length".into()));
    }
    let ys = DVector::from_column_slice(y);
    let mean = ys.mean();
    let spread = y.iter().fold(0.0f64, |m, v| m.max((v - mean).abs()));
    if spread <= 1e-12 * mean.abs().max(1e-300) {
        return Err(Error::Fit("no decay detected: signal is constant".into()));
    }
    let design = |tau: f64| DMatrix::from_fn(n, 2, |i, c| if c == 0 { (-(t[i] - t[0]) / tau).exp() } else { 1.0 });
    let profile = |lt: f64| linear_lsq(&design(lt.exp()), &ys).map(|(_, r)| r).unwrap_or(f64::INFINITY);
    let min_step = t.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min).max(span * 1e-9);
    let upper = 100.0 * span;
    let lt = minimize_scalar(profile, (0.1 * min_step).ln(), upper.ln(), 400)?;
    let tau = lt.exp();
    if tau > 50.0 * span {
        return Err(Error::Fit(format!(
            "no decay detected: best time constant {tau:.3e} ns exceeds 50× the {span:.3e} ns window"
        )));
    }
    let (beta, rss) = linear_lsq(&design(tau), &ys)?;
    // amplitude referred to t = 0
    let a = beta[0] * (t[0] / tau).exp();
    let c = beta[1];
    let jac = DMatrix::from_fn(n, 3, |i, col| {
        let e = (-t[i] / tau).exp();
        match col {
            0 => e,
            1 => a * t[i] / (tau * tau) * e,
            _ => 1.0,
        }
    });
    let se = covariance(&jac, rss).map(|m| m[(1, 1)].max(0.0).sqrt()).unwrap_or(f64::NAN);
    Ok((a, tau, c, rss, se))
}

/// T1 from an ensemble-mean Rabi signal. Uses the extrema magnitudes when at
/// least [`MIN_EXTREMA`] oscillation extrema are present, otherwise the
/// signal itself.
pub fn fit_t1(times: &[f64], signal: &[f64]) -> Result<DecayFit> {
    if times.len() != signal.len() || times.len() < 4 {
        return Err(Error::Fit("T1 fit needs at least 4 matching samples".into()));
    }
    let peak = signal.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    if peak == 0.0 {
        return Err(Error::Fit("signal is identically zero".into()));
    }
    let extrema = find_extrema(times, signal, EXTREMUM_THRESHOLD * peak);
    let (t, y, branch): (Vec<f64>, Vec<f64>, FitBranch) = if extrema.len() >= MIN_EXTREMA {
        (
            extrema.iter().map(|e| e.0).collect(),
            extrema.iter().map(|e| e.1.abs()).collect(),
            FitBranch::Extrema,
        )
    } else {
        (times.to_vec(), signal.to_vec(), FitBranch::Direct)
    };
    let (a, tau, c, rss, se) = fit_exp_offset(&t, &y)?;
    Ok(DecayFit {
        tau_ns: tau,
        tau_se_ns: se,
        frequency_ghz: None,
        frequency_se_ghz: None,
        amplitude: a,
        offset: c,
        phase: None,
        residual_norm: rss.sqrt(),
        window_ns: (times[0], times[times.len() - 1]),
        n_points: t.len(),
        branch,
        decay_detected: true,
    })
}

/// Dominant frequency of a signal (mean removed), refined by a parabola
/// through the log-magnitude peak of a zero-padded FFT. Irregular samples
/// are linearly resampled onto a uniform grid first.
pub fn dominant_frequency(times: &[f64], y: &[f64]) -> Result<f64> {
    let n = y.len();
    if n < 4 || times.len() != n {
        return Err(Error::Fit("frequency estimate needs at least 4 matching samples".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Fit("frequency estimate needs increasing sample times".into()));
    }
    let h = (times[n - 1] - times[0]) / (n - 1) as f64;
    let resampled;
    let y = if times.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-6 * h) {
        resampled = resample_uniform(times, y, h);
        &resampled[..]
    } else {
        y
    };
    let mean = y.iter().sum::<f64>() / n as f64;
    let m = (4 * n).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (b, v) in buf.iter_mut().zip(y) {
        *b = Complex64::new(v - mean, 0.0);
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let mag: Vec<f64> = buf[..m / 2].iter().map(|z| z.norm()).collect();
    let k = (1..m / 2).max_by(|&a, &b| mag[a].total_cmp(&mag[b])).unwrap_or(1);
    let shift = if k + 1 < m / 2 {
        let (a, b, c) = (mag[k - 1].max(1e-300).ln(), mag[k].max(1e-300).ln(), mag[k + 1].max(1e-300).ln());
        let d = a - 2.0 * b + c;
        if d != 0.0 { 0.5 * (a - c) / d } else { 0.0 }
    } else {
        0.0
    };
    Ok((k as f64 + shift) / (m as f64 * h))
}

fn resample_uniform(times: &[f64], y: &[f64], h: f64) -> Vec<f64> {
    let mut j = 0;
    (0..y.len())
        .map(|i| {
            let t = times[0] + i as f64 * h;
            while j + 2 < times.len() && times[j + 1] < t {
                j += 1;
            }
            let w = ((t - times[j]) / (times[j + 1] - times[j])).clamp(0.0, 1.0);
            y[j] + w * (y[j + 1] - y[j])
        })
        .collect()
}

/// A e^{−t/T2} cos(2πft + φ) + c by Levenberg–Marquardt, seeded from the
/// FFT peak and the extrema envelope. A decay rate indistinguishable from
/// zero gives `decay_detected = false` and an infinite T2.
pub fn fit_t2(times: &[f64], signal: &[f64]) -> Result<DecayFit> {
    let n = times.len();
    if n != signal.len() || n < 8 {
        return Err(Error::Fit("T2 fit needs at least 8 matching samples".into()));
    }
    let span = times[n - 1] - times[0];
    let f0 = dominant_frequency(times, signal)?;
    let t0 = times[0];
    let peak = signal.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let rate0 = {
        let mean = signal.iter().sum::<f64>() / n as f64;
        let centered: Vec<f64> = signal.iter().map(|y| y - mean).collect();
        let ext = find_extrema(times, &centered, EXTREMUM_THRESHOLD * peak);
        if ext.len() >= MIN_EXTREMA {
            let t: Vec<f64> = ext.iter().map(|e| e.0).collect();
            let y: Vec<f64> = ext.iter().map(|e| e.1.abs()).collect();
            fit_exp_offset(&t, &y).map(|r| 1.0 / r.1).unwrap_or(1.0 / span)
        } else {
            1.0 / span
        }
    };
    // θ = (a, b, γ, f, c); model e^{−γτ}(a cos 2πfτ + b sin 2πfτ) + c with τ = t − t0
    let model = |p: &DVector<f64>, t: f64| {
        let tau = t - t0;
        let ph = TAU * p[3] * tau;
        (-p[2] * tau).exp() * (p[0] * ph.cos() + p[1] * ph.sin()) + p[4]
    };
    let residual = |p: &DVector<f64>| DVector::from_iterator(n, times.iter().zip(signal).map(|(&t, y)| model(p, t) - y));
    let jacobian = |p: &DVector<f64>| {
        let mut j = DMatrix::zeros(n, 5);
        for (i, &t) in times.iter().enumerate() {
            let tau = t - t0;
            let ph = TAU * p[3] * tau;
            let (s, c) = ph.sin_cos();
            let e = (-p[2] * tau).exp();
            let osc = p[0] * c + p[1] * s;
            j[(i, 0)] = e * c;
            j[(i, 1)] = e * s;
            j[(i, 2)] = -tau * e * osc;
            j[(i, 3)] = e * TAU * tau * (-p[0] * s + p[1] * c);
            j[(i, 4)] = 1.0;
        }
        j
    };
    // linear amplitudes for the seed
    let seed_design = DMatrix::from_fn(n, 3, |i, col| {
        let tau = times[i] - t0;
        let e = (-rate0 * tau).exp();
        match col {
            0 => e * (TAU * f0 * tau).cos(),
            1 => e * (TAU * f0 * tau).sin(),
            _ => 1.0,
        }
    });
    let (lin, _) = linear_lsq(&seed_design, &DVector::from_column_slice(signal))?;
    let start = DVector::from_vec(vec![lin[0], lin[1], rate0, f0, lin[2]]);
    let (p, rss) = levenberg_marquardt(residual, jacobian, start, 500)?;
    let cov = covariance(&jacobian(&p), rss);
    let se = |i: usize| cov.as_ref().map(|m| m[(i, i)].max(0.0).sqrt()).unwrap_or(f64::NAN);
    let (rate, rate_se) = (p[2], se(2));
    let decay_detected = rate > 0.0 && rate * span > 1e-4 && rate > 2.0 * rate_se;
    let amplitude = p[0].hypot(p[1]);
    let phase = (-p[1]).atan2(p[0]) - TAU * p[3] * t0;
    Ok(DecayFit {
        tau_ns: if decay_detected { 1.0 / rate } else { f64::INFINITY },
        tau_se_ns: if decay_detected { rate_se / (rate * rate) } else { f64::NAN },
        frequency_ghz: Some(p[3]),
        frequency_se_ghz: Some(se(3)),
        amplitude,
        offset: p[4],
        phase: Some(phase),
        residual_norm: rss.sqrt(),
        window_ns: (t0, times[n - 1]),
        n_points: n,
        branch: FitBranch::Oscillatory,
        decay_detected,
    })
}

/// Window-based stationarity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateConfig {
    /// Samples per window.
    pub window: usize,
    /// Allowed change relative to the signal scale.
    pub rel_tol: f64,
    /// Consecutive stable windows required.
    pub consecutive: usize,
    /// Ensemble size; when given, tolerances are widened to three standard
    /// errors of the window means.
    pub n_traj: Option<usize>,
}

impl SteadyStateConfig {
    pub fn new(window: usize) -> Self {
        Self {
            window,
            rel_tol: 0.02,
            consecutive: 3,
            n_traj: None,
        }
    }
}

/// Outcome of [`steady_state_detect`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    /// Start of the first stable window; None when not converged.
    pub t_star_ns: Option<f64>,
    /// Index of the first sample of that window.
    pub start_index: Option<usize>,
    pub converged: bool,
}

/// Earliest time after which the window means of ⟨j_z⟩_E and Δj_z² change by
/// less than `rel_tol` of their scales between neighbouring windows, and stay
/// within that distance of the final window, for `consecutive` windows.
pub fn steady_state_detect(times: &[f64], mean_jz: &[f64], var_jz: &[f64], cfg: &SteadyStateConfig) -> Result<SteadyState> {
    if times.len() != mean_jz.len() || times.len() != var_jz.len() {
        return Err(Error::Domain("steady-state inputs differ in length".into()));
    }
    if cfg.window == 0 || cfg.consecutive == 0 {
        return Err(Error::Domain("window and consecutive count must be positive".into()));
    }
    let n_win = times.len() / cfg.window;
    let not_converged = SteadyState {
        t_star_ns: None,
        start_index: None,
        converged: false,
    };
    if n_win < cfg.consecutive {
        return Ok(not_converged);
    }
    let win_mean = |x: &[f64], w: usize| x[w * cfg.window..(w + 1) * cfg.window].iter().sum::<f64>() / cfg.window as f64;
    let m: Vec<f64> = (0..n_win).map(|w| win_mean(mean_jz, w)).collect();
    let v: Vec<f64> = (0..n_win).map(|w| win_mean(var_jz, w)).collect();
    let scale_m = mean_jz.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1e-12);
    let scale_v = var_jz.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1e-12);
    let tol = |w: usize| -> (f64, f64) {
        let (mut tm, mut tv) = (cfg.rel_tol * scale_m, cfg.rel_tol * scale_v);
        if let Some(nt) = cfg.n_traj.filter(|&n| n > 1) {
            let nt = nt as f64;
            tm = tm.max(3.0 * (2.0 * v[w].max(0.0) / nt).sqrt());
            tv = tv.max(3.0 * v[w].max(0.0) * (4.0 / (nt - 1.0)).sqrt());
        }
        (tm, tv)
    };
    let last = n_win - 1;
    let stable = |w: usize| {
        let (tm, tv) = tol(w);
        let step_ok = w == last || ((m[w + 1] - m[w]).abs() < tm && (v[w + 1] - v[w]).abs() < tv);
        step_ok && (m[w] - m[last]).abs() < tm && (v[w] - v[last]).abs() < tv
    };
    // first w such that every window from w to the end is stable, with at least `consecutive` of them
    let mut start = None;
    for w in (0..n_win).rev() {
        if stable(w) {
            start = Some(w);
        } else {
            break;
        }
    }
    match start {
        Some(w) if n_win - w >= cfg.consecutive => Ok(SteadyState {
            t_star_ns: Some(times[w * cfg.window]),
            start_index: Some(w * cfg.window),
            converged: true,
        }),
        _ => Ok(not_converged),
    }
}

/// Ensemble statistics averaged over the stationary tail of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadySummary {
    pub detection: SteadyState,
    /// Start of the averaging window: t_star when converged, otherwise the
    /// start of the last quarter of the run.
    pub from_ns: f64,
    pub mean_jz: f64,
    pub mean_jz_se: f64,
    /// √ of the tail-averaged Δj_z².
    pub delta_jz: f64,
    pub delta_jz_se: f64,
    pub czz: Option<f64>,
    pub czz_se: Option<f64>,
    /// j_z histogram at the final record.
    pub histogram: Histogram,
}

fn mean_and_se(values: &mut [f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let m = stable_sum(values) / n;
    if values.len() < 2 {
        return (m, f64::NAN);
    }
    let mut sq: Vec<f64> = values.iter().map(|x| (x - m).powi(2)).collect();
    (m, (stable_sum(&mut sq) / (n - 1.0) / n).sqrt())
}

/// Detect the stationary window and average j_z statistics and C_zz over it.
/// Standard errors use per-trajectory tail averages; the error of Δj_z uses
/// the Gaussian estimate Δ/√(2(n−1)).
pub fn steady_summary(records: &[TrajectoryRecord], stats: &EnsembleStats, cfg: &SteadyStateConfig, n_bins: usize) -> Result<SteadySummary> {
    let len = stats.times.len();
    if len == 0 || records.len() != stats.n_traj {
        return Err(Error::Domain("statistics do not match the ensemble".into()));
    }
    let detection = steady_state_detect(&stats.times, &stats.mean_jz, &stats.var_jz, cfg)?;
    let start = detection.start_index.unwrap_or(len - len.div_ceil(4)).min(len - 1);
    let tail = len - start;
    let mut per_traj: Vec<f64> = records.iter().map(|r| r.jz[start..].iter().sum::<f64>() / tail as f64).collect();
    let (mean_jz, mean_jz_se) = mean_and_se(&mut per_traj);
    let mut var_tail = stats.var_jz[start..].to_vec();
    let delta_jz = (stable_sum(&mut var_tail) / tail as f64).max(0.0).sqrt();
    let n = records.len() as f64;
    let delta_jz_se = if n > 1.0 { delta_jz / (2.0 * (n - 1.0)).sqrt() } else { f64::NAN };
    let (czz, czz_se) = if stats.czz.is_some() {
        let mut per: Vec<f64> = records
            .iter()
            .map(|r| {
                let z = r.sigma_z.as_ref().expect("checked by ensemble_stats");
                let zz = r.sigma_zz.as_ref().expect("checked by ensemble_stats");
                (start..len).map(|i| czz_single(&z[i], &zz[i])).sum::<Result<f64>>().map(|s| s / tail as f64)
            })
            .collect::<Result<_>>()?;
        let (m, se) = mean_and_se(&mut per);
        (Some(m), Some(se))
    } else {
        (None, None)
    };
    let last: Vec<f64> = records.iter().map(|r| r.jz[len - 1]).collect();
    Ok(SteadySummary {
        detection,
        from_ns: stats.times[start],
        mean_jz,
        mean_jz_se,
        delta_jz,
        delta_jz_se,
        czz,
        czz_se,
        histogram: histogram_jz(&last, stats.times[len - 1], n_bins)?,
    })
}
