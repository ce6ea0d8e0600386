use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{synthesize_noise, target_psd, NoiseModel};
use crate::error::{Error, Result};
use crate::units::NS;

/// Hann-windowed, overlapped segment averaging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchConfig {
    pub segment_len: usize,
    /// Fractional overlap between consecutive segments, in [0, 1).
    pub overlap: f64,
}

impl Default for WelchConfig {
    fn default() -> Self {
        Self {
            segment_len: 1 << 12,
            overlap: 0.5,
        }
    }
}

/// Two-sided PSD estimate (1/Hz) at the positive bin frequencies below Nyquist.
pub fn estimate_psd_welch(samples: &[f64], dt_ns: f64, cfg: &WelchConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let l = cfg.segment_len;
    if l < 4 || l > samples.len() {
        return Err(Error::Domain(format!(
            "segment length {l} must be in [4, {}]",
            samples.len()
        )));
    }
    if !(0.0..1.0).contains(&cfg.overlap) {
        return Err(Error::Domain(format!("overlap {} must be in [0, 1)", cfg.overlap)));
    }
    let hop = ((l as f64) * (1.0 - cfg.overlap)).round().max(1.0) as usize;
    let window: Vec<f64> = (0..l).map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / l as f64).cos()).collect();
    let wss: f64 = window.iter().map(|w| w * w).sum();
    let fs = 1.0 / (dt_ns * NS);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(l);

    let n_bins = l.div_ceil(2) - 1;
    let mut acc = vec![0.0; n_bins];
    let mut buf = vec![Complex64::new(0.0, 0.0); l];
    let mut segments = 0usize;
    let mut start = 0;
    while start + l <= samples.len() {
        for (b, (x, w)) in buf.iter_mut().zip(samples[start..start + l].iter().zip(&window)) {
            *b = Complex64::new(x * w, 0.0);
        }
        fft.process(&mut buf);
        for (a, z) in acc.iter_mut().zip(&buf[1..=n_bins]) {
            *a += z.norm_sqr();
        }
        segments += 1;
        start += hop;
    }
    let scale = 1.0 / (fs * wss * segments as f64);
    let freqs = (1..=n_bins).map(|k| k as f64 * fs / l as f64).collect();
    Ok((freqs, acc.into_iter().map(|a| a * scale).collect()))
}

/// One row of a PSD validation table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdRow {
    pub f_hz: f64,
    pub s_target: f64,
    pub s_estimated: f64,
}

/// Welch estimate averaged over independently seeded series, paired with the
/// target density at each bin.
pub fn validate_psd(
    model: &NoiseModel,
    duration_ns: f64,
    dt_ns: f64,
    seeds: &[u64],
    welch: &WelchConfig,
) -> Result<Vec<PsdRow>> {
    if seeds.is_empty() {
        return Err(Error::Domain("at least one seed required".into()));
    }
    let estimates: Vec<(Vec<f64>, Vec<f64>)> = seeds
        .par_iter()
        .map(|&seed| {
            let s = synthesize_noise(model, duration_ns, dt_ns, seed)?;
            estimate_psd_welch(&s.samples, dt_ns, welch)
        })
        .collect::<Result<_>>()?;
    let freqs = estimates[0].0.clone();
    let mut mean = vec![0.0; freqs.len()];
    for (_, p) in &estimates {
        for (m, x) in mean.iter_mut().zip(p) {
            *m += x;
        }
    }
    freqs
        .iter()
        .zip(mean)
        .map(|(&f, m)| {
            Ok(PsdRow {
                f_hz: f,
                s_target: target_psd(model, f)?,
                s_estimated: m / seeds.len() as f64,
            })
        })
        .collect()
}

/// Band-averaged agreement over one frequency decade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecadeRatio {
    pub f_lo_hz: f64,
    pub f_hi_hz: f64,
    /// Σ S_estimated / Σ S_target over the bins in the decade.
    pub ratio: f64,
    pub n_bins: usize,
}

/// Ratios of estimated to target power per decade of [f_lo, f_hi]. The last
/// decade is truncated at f_hi; decades without bins are skipped.
pub fn decade_ratios(rows: &[PsdRow], f_lo_hz: f64, f_hi_hz: f64) -> Result<Vec<DecadeRatio>> {
    if !(f_lo_hz > 0.0 && f_hi_hz > f_lo_hz) {
        return Err(Error::Domain(format!("invalid band [{f_lo_hz}, {f_hi_hz}] Hz")));
    }
    let mut out = Vec::new();
    let mut lo = f_lo_hz;
    while lo < f_hi_hz * (1.0 - 1e-12) {
        let hi = (lo * 10.0).min(f_hi_hz);
        let (mut est, mut tgt, mut n) = (0.0, 0.0, 0usize);
        for r in rows.iter().filter(|r| r.f_hz >= lo && r.f_hz < hi) {
            est += r.s_estimated;
            tgt += r.s_target;
            n += 1;
        }
        if n > 0 {
            out.push(DecadeRatio {
                f_lo_hz: lo,
                f_hi_hz: hi,
                ratio: est / tgt,
                n_bins: n,
            });
        }
        lo = hi;
    }
    Ok(out)
}
