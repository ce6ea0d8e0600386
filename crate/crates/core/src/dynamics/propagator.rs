//! Split-operator propagation of ψ under H(N_g) = D(N_g) + X.
//!
//! D is diagonal in the charge basis and X = −Σ_k E_J,k/2 σ_x^k is a sum of
//! commuting single-qubit terms, so both exponentials are exact: e^{−iDτ} is a
//! phase per basis state and e^{−iXτ} a product of 2×2 rotations. Every step is
//! therefore unitary to rounding error. Strang splitting is second order; the
//! Yoshida triple-jump composition of Strang steps is fourth order.
//!
//! The gate charge is held constant across a step.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::circuit::{CircuitParams, Hamiltonian};
use crate::error::{Error, Result};

/// Time-stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// e^{−iDτ/2} e^{−iXτ} e^{−iDτ/2}.
    Strang,
    /// Three Strang steps with weights w1, w0, w1.
    #[default]
    Yoshida4,
}

impl Scheme {
    /// (diagonal fractions, off-diagonal fractions), interleaved D X D X … D.
    fn fractions(self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Scheme::Strang => (vec![0.5, 0.5], vec![1.0]),
            Scheme::Yoshida4 => {
                let cbrt2 = 2f64.powf(1.0 / 3.0);
                let w1 = 1.0 / (2.0 - cbrt2);
                let w0 = -cbrt2 / (2.0 - cbrt2);
                (
                    vec![0.5 * w1, 0.5 * (w1 + w0), 0.5 * (w0 + w1), 0.5 * w1],
                    vec![w1, w0, w1],
                )
            }
        }
    }
}

/// Diagonal stage: fixed phases exp(−iθA) and the scale θ for the N_g terms.
#[derive(Debug, Clone)]
struct DiagonalStage {
    theta: f64,
    fixed: Vec<Complex64>,
}

/// Off-diagonal stage: per-qubit (cos φ_k, sin φ_k) with φ_k = θ E_J,k/2.
#[derive(Debug, Clone)]
struct RotationStage {
    cos_sin: Vec<(f64, f64)>,
}

/// Precomputed step operator for one circuit and one dt. Immutable and
/// shareable; per-trajectory scratch lives in [`StepScratch`].
#[derive(Debug, Clone)]
pub struct Propagator {
    n_qubits: usize,
    dt_ns: f64,
    scheme: Scheme,
    diag_stages: Vec<DiagonalStage>,
    rot_stages: Vec<RotationStage>,
    linear_offset: f64,
    linear_weights: Vec<f64>,
    quadratic: f64,
}

/// Scratch buffer for the gate-charge phase table.
#[derive(Debug, Clone, Default)]
pub struct StepScratch {
    phases: Vec<Complex64>,
}

impl Propagator {
    pub fn new(circuit: &CircuitParams, dt_ns: f64, scheme: Scheme) -> Self {
        Self::from_hamiltonian(&Hamiltonian::new(circuit), dt_ns, scheme)
    }

    pub fn from_hamiltonian(ham: &Hamiltonian, dt_ns: f64, scheme: Scheme) -> Self {
        let n = ham.n_qubits();
        let (dfrac, xfrac) = scheme.fractions();
        let diag = ham.diagonal();
        let diag_stages = dfrac
            .iter()
            .map(|f| {
                let theta = TAU * f * dt_ns;
                DiagonalStage {
                    theta,
                    fixed: diag.constant.iter().map(|a| Complex64::from_polar(1.0, -theta * a)).collect(),
                }
            })
            .collect();
        let rot_stages = xfrac
            .iter()
            .map(|f| RotationStage {
                cos_sin: ham
                    .half_josephson()
                    .iter()
                    .map(|t| {
                        let phi = TAU * f * dt_ns * t;
                        (phi.cos(), phi.sin())
                    })
                    .collect(),
            })
            .collect();
        let (linear_offset, linear_weights) = diag.linear_bit_weights(n);
        Self {
            n_qubits: n,
            dt_ns,
            scheme,
            diag_stages,
            rot_stages,
            linear_offset,
            linear_weights,
            quadratic: diag.quadratic,
        }
    }

    pub fn dt_ns(&self) -> f64 {
        self.dt_ns
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Advance `psi` by one dt at gate charge `ng`.
    pub fn step(&self, psi: &mut [Complex64], ng: f64, scratch: &mut StepScratch) {
        debug_assert_eq!(psi.len(), 1 << self.n_qubits);
        let (last, rest) = self.diag_stages.split_last().expect("at least one diagonal stage");
        for (d, r) in rest.iter().zip(&self.rot_stages) {
            self.apply_diagonal(d, psi, ng, scratch);
            apply_rotations(r, psi);
        }
        self.apply_diagonal(last, psi, ng, scratch);
    }

    fn apply_diagonal(&self, stage: &DiagonalStage, psi: &mut [Complex64], ng: f64, scratch: &mut StepScratch) {
        let dim = psi.len();
        let table = &mut scratch.phases;
        table.resize(dim, Complex64::new(0.0, 0.0));
        let th = stage.theta;
        table[0] = Complex64::from_polar(1.0, -th * ng * (self.linear_offset + ng * self.quadratic));
        for (k, w) in self.linear_weights.iter().enumerate() {
            let z = Complex64::from_polar(1.0, -th * ng * w);
            let half = 1usize << k;
            let (lo, hi) = table.split_at_mut(half);
            for (h, l) in hi[..half].iter_mut().zip(lo.iter()) {
                *h = l * z;
            }
        }
        for ((p, f), t) in psi.iter_mut().zip(&stage.fixed).zip(table.iter()) {
            *p *= f * t;
        }
    }
}

/// e^{+iφσ_x} on every qubit: a' = c a + i s b, b' = i s a + c b.
fn apply_rotations(stage: &RotationStage, psi: &mut [Complex64]) {
    let dim = psi.len();
    for (k, &(c, s)) in stage.cos_sin.iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        let bit = 1usize << k;
        let mut base = 0;
        while base < dim {
            for j in base..base + bit {
                let a = psi[j];
                let b = psi[j | bit];
                psi[j] = Complex64::new(c * a.re - s * b.im, c * a.im + s * b.re);
                psi[j | bit] = Complex64::new(c * b.re - s * a.im, c * b.im + s * a.re);
            }
            base += bit << 1;
        }
    }
}

/// Step size, horizon and bookkeeping for one propagation.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PropagationConfig {
    pub dt_ns: f64,
    pub t_end_ns: f64,
    /// Record every `record_stride`-th step (step 0 is always recorded).
    pub record_stride: usize,
    pub norm_tolerance: f64,
    pub scheme: Scheme,
    pub observables: Observables,
}

/// Which expectation values a trajectory keeps besides j_z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub struct Observables {
    pub sigma_z: bool,
    pub sigma_zz: bool,
    pub sigma_x: bool,
}

impl Observables {
    pub fn correlations() -> Self {
        Self {
            sigma_z: true,
            sigma_zz: true,
            sigma_x: false,
        }
    }
}

pub const DEFAULT_NORM_TOLERANCE: f64 = 1e-9;
/// Default steps per period of the fastest charging energy.
pub const DEFAULT_STEPS_PER_PERIOD: f64 = 20.0;
/// dt must resolve at least ten steps per fastest period.
pub const MAX_DT_FRACTION: f64 = 0.1;

impl PropagationConfig {
    /// dt = 0.05 / max E_C,k, i.e. twenty steps per fastest period.
    pub fn for_circuit(circuit: &CircuitParams, t_end_ns: f64) -> Self {
        Self {
            dt_ns: 1.0 / (DEFAULT_STEPS_PER_PERIOD * circuit.max_charging_energy()),
            t_end_ns,
            record_stride: 1,
            norm_tolerance: DEFAULT_NORM_TOLERANCE,
            scheme: Scheme::default(),
            observables: Observables::default(),
        }
    }

    /// Stride giving a record roughly every `interval_ns`.
    pub fn with_record_interval(mut self, interval_ns: f64) -> Self {
        self.record_stride = ((interval_ns / self.dt_ns).round() as usize).max(1);
        self
    }

    pub fn with_observables(mut self, observables: Observables) -> Self {
        self.observables = observables;
        self
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end_ns / self.dt_ns).round() as usize
    }

    pub fn validate(&self, circuit: &CircuitParams) -> Result<()> {
        if !(self.dt_ns.is_finite() && self.dt_ns > 0.0) {
            return Err(Error::Domain(format!("dt must be positive, got {}", self.dt_ns)));
        }
        if !(self.t_end_ns.is_finite() && self.t_end_ns > 0.0) {
            return Err(Error::Domain(format!("t_end must be positive, got {}", self.t_end_ns)));
        }
        if self.record_stride == 0 {
            return Err(Error::Domain("record stride must be at least 1".into()));
        }
        if !(self.norm_tolerance > 0.0) {
            return Err(Error::Domain("norm tolerance must be positive".into()));
        }
        let limit = MAX_DT_FRACTION / circuit.max_charging_energy();
        if self.dt_ns > limit * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "dt = {} ns does not resolve the charging energy (limit {limit:.3e} ns)",
                self.dt_ns
            )));
        }
        Ok(())
    }
}
