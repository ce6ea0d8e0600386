//! Classical gate-charge noise δN_g(t) shared by every island.
//!
//! The target two-sided spectral density is
//!
//! ```text
//! S(f) = π R ħ C_g^2 f / e^2  +  α / (2π f)
//! ```
//!
//! (Ohmic voltage-source term plus background-charge 1/f term). Series are
//! synthesized in the frequency domain: every positive bin in band gets
//! amplitude √(S(f_m) Δf) and an independent uniform phase, the negative bins
//! are conjugates, and an inverse DFT returns a real series whose variance is
//! the two-sided band integral of S.

mod psd;

pub use psd::{decade_ratios, estimate_psd_welch, DecadeRatio, validate_psd, PsdRow, WelchConfig};

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;

use crate::circuit::CircuitParams;
use crate::error::{Error, Result};
use crate::seeds::rng_from_seed;
use crate::units::{ELEMENTARY_CHARGE, GHZ, HBAR, NS};

pub const MIN_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub impedance_ohm: f64,
    pub flicker_alpha: f64,
    /// Farads.
    pub gate_capacitance: f64,
    /// Low cutoff in Hz; `None` means 1/duration.
    pub f_min_hz: Option<f64>,
    /// High cutoff in Hz; `None` means Nyquist. Always clipped to Nyquist.
    pub f_max_hz: Option<f64>,
    pub ohmic_on: bool,
    pub flicker_on: bool,
}

impl NoiseModel {
    /// R = 50 Ω, α = 5e-7.
    pub fn typical(gate_capacitance: f64) -> Self {
        Self {
            impedance_ohm: 50.0,
            flicker_alpha: 5.0e-7,
            gate_capacitance,
            f_min_hz: None,
            f_max_hz: None,
            ohmic_on: true,
            flicker_on: true,
        }
    }

    /// Noise switched off entirely.
    pub fn silent(gate_capacitance: f64) -> Self {
        Self {
            ohmic_on: false,
            flicker_on: false,
            ..Self::typical(gate_capacitance)
        }
    }

    /// Typical noise with the high cutoff at ten times the largest charging
    /// energy of `circuit`.
    pub fn for_circuit(circuit: &CircuitParams) -> Self {
        Self {
            f_max_hz: Some(10.0 * circuit.max_charging_energy() * GHZ),
            ..Self::typical(circuit.gate_capacitance())
        }
    }

    pub fn is_silent(&self) -> bool {
        !(self.ohmic_on && self.impedance_ohm > 0.0) && !(self.flicker_on && self.flicker_alpha > 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.impedance_ohm.is_finite() && self.impedance_ohm >= 0.0) {
            return Err(Error::Domain(format!("impedance must be non-negative, got {}", self.impedance_ohm)));
        }
        if !(self.flicker_alpha.is_finite() && self.flicker_alpha >= 0.0) {
            return Err(Error::Domain(format!("1/f amplitude must be non-negative, got {}", self.flicker_alpha)));
        }
        if !(self.gate_capacitance.is_finite() && self.gate_capacitance > 0.0) {
            return Err(Error::Domain("gate capacitance must be positive".into()));
        }
        for f in [self.f_min_hz, self.f_max_hz].into_iter().flatten() {
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::Domain(format!("cutoff frequencies must be positive, got {f}")));
            }
        }
        if let (Some(lo), Some(hi)) = (self.f_min_hz, self.f_max_hz) {
            if lo >= hi {
                return Err(Error::Domain(format!("f_min {lo} Hz must be below f_max {hi} Hz")));
            }
        }
        Ok(())
    }

    /// Coefficient of the Ohmic term, π R ħ C_g^2 / e^2 (1/Hz^2).
    pub fn ohmic_coefficient(&self) -> f64 {
        if self.ohmic_on {
            PI * self.impedance_ohm * HBAR * self.gate_capacitance.powi(2) / ELEMENTARY_CHARGE.powi(2)
        } else {
            0.0
        }
    }

    /// Coefficient of the 1/f term, α / (2π).
    pub fn flicker_coefficient(&self) -> f64 {
        if self.flicker_on {
            self.flicker_alpha / (2.0 * PI)
        } else {
            0.0
        }
    }

    /// Synthesis band in Hz for a series of `duration_ns` sampled at `dt_ns`.
    pub fn band(&self, duration_ns: f64, dt_ns: f64) -> (f64, f64) {
        let nyquist = 0.5 / (dt_ns * NS);
        let lo = self.f_min_hz.unwrap_or(1.0 / (duration_ns * NS));
        let hi = self.f_max_hz.map_or(nyquist, |f| f.min(nyquist));
        (lo, hi)
    }
}

/// Two-sided PSD of δN_g at `f_hz` in 1/Hz.
pub fn target_psd(model: &NoiseModel, f_hz: f64) -> Result<f64> {
    if !(f_hz > 0.0) {
        return Err(Error::Domain(format!("PSD frequency must be positive, got {f_hz}")));
    }
    Ok(model.ohmic_coefficient() * f_hz + model.flicker_coefficient() / f_hz)
}

/// Frequency where the Ohmic and 1/f terms are equal.
pub fn crossover_frequency(model: &NoiseModel) -> f64 {
    (model.flicker_coefficient() / model.ohmic_coefficient()).sqrt()
}

/// Two-sided band power ∫ S(f) df over ±[lo, hi].
pub fn band_variance(model: &NoiseModel, lo_hz: f64, hi_hz: f64) -> f64 {
    2.0 * (0.5 * model.ohmic_coefficient() * (hi_hz * hi_hz - lo_hz * lo_hz)
        + model.flicker_coefficient() * (hi_hz / lo_hz).ln())
}

/// One realization of δN_g(t), sampled every `dt_ns`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSeries {
    pub dt_ns: f64,
    pub samples: Vec<f64>,
    pub seed: u64,
}

impl NoiseSeries {
    pub fn zeros(len: usize, dt_ns: f64) -> Self {
        Self {
            dt_ns,
            samples: vec![0.0; len],
            seed: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_ns(&self) -> f64 {
        self.samples.len() as f64 * self.dt_ns
    }

    /// Zero-order hold: the sample whose interval [n dt, (n+1) dt) contains `t_ns`.
    /// The end point `t = duration` maps to the last sample.
    pub fn resample_hold(&self, t_ns: f64) -> Result<f64> {
        let dur = self.duration_ns();
        if !(t_ns >= 0.0 && t_ns <= dur) {
            return Err(Error::Domain(format!("time {t_ns} ns outside [0, {dur}] ns")));
        }
        let pos = t_ns / self.dt_ns;
        // absorb rounding so that t = n·dt lands on sample n
        let idx = (pos + 1e-9 * pos.max(1.0)).floor() as usize;
        Ok(self.samples[idx.min(self.samples.len() - 1)])
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / self.samples.len() as f64
    }
}

/// Synthesize δN_g over `duration_ns` at spacing `dt_ns`.
pub fn synthesize_noise(model: &NoiseModel, duration_ns: f64, dt_ns: f64, seed: u64) -> Result<NoiseSeries> {
    model.validate()?;
    if !(dt_ns > 0.0 && duration_ns > 0.0) {
        return Err(Error::Domain("duration and dt must be positive".into()));
    }
    let m = (duration_ns / dt_ns).round() as usize;
    if m < MIN_SAMPLES {
        return Err(Error::Domain(format!("{m} samples requested, at least {MIN_SAMPLES} required")));
    }
    if model.is_silent() {
        return Ok(NoiseSeries {
            seed,
            ..NoiseSeries::zeros(m, dt_ns)
        });
    }
    let dt_s = dt_ns * NS;
    let df = 1.0 / (m as f64 * dt_s);
    let (lo, hi) = model.band(m as f64 * dt_ns, dt_ns);

    let mut rng = rng_from_seed(seed);
    let mut spec = vec![Complex64::new(0.0, 0.0); m];
    // Bins 1..ceil(m/2) are the strictly positive frequencies below Nyquist;
    // one phase is drawn per bin whether or not it is in band, so the stream
    // does not depend on the cutoffs.
    for k in 1..m.div_ceil(2) {
        let phase: f64 = rng.random::<f64>() * 2.0 * PI;
        let f = k as f64 * df;
        if f < lo * (1.0 - 1e-12) || f > hi * (1.0 + 1e-12) {
            continue;
        }
        let amp = (target_psd(model, f)? * df).sqrt();
        let z = Complex64::from_polar(amp, phase);
        spec[k] = z;
        spec[m - k] = z.conj();
    }
    FftPlanner::<f64>::new().plan_fft_inverse(m).process(&mut spec);
    Ok(NoiseSeries {
        dt_ns,
        samples: spec.into_iter().map(|z| z.re).collect(),
        seed,
    })
}
