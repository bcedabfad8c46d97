//! Thermal inhomogeneous dephasing: Boltzmann energies → DLS distribution →
//! Ramsey envelope → coherence time T₂′.
//!
//! Energies and temperatures are in μK (k_B = 1), DLS values in Hz and
//! times in seconds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::magic::MagicSolution;
use crate::quad::{integrate, QuadError};

#[derive(Debug, Error, PartialEq)]
pub enum CoherenceError {
    #[error("temperature must be positive, got {0} μK")]
    Temperature(f64),
    #[error("k_E must be positive, got {0} Hz/μK²")]
    NonPositiveKe(f64),
    #[error("zero trap depth")]
    ZeroDepth,
    #[error("DLS {x} Hz below the minimum δ₀ = {delta0} Hz")]
    BelowMinimum { x: f64, delta0: f64 },
    #[error("negative time {0} s")]
    NegativeTime(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("envelope stays above 1/e for t ≤ {0:.3e} s")]
    NoCrossing(f64),
    #[error("envelope is not monotone before its 1/e crossing (rises at t = {0:.3e} s)")]
    NonMonotone(f64),
}

/// Which DLS density the Ramsey integrals average over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum DensityModel {
    /// (A⁴/12)·y·e^{−A√y}, as printed.
    #[default]
    Printed,
    /// 2A³√y·e^{−2A√y}: the Boltzmann energy law pushed through y = k_E E²/4.
    Boltzmann,
}

/// How a DLS value x (Hz) and a time t (s) combine into a phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum PhaseConvention {
    /// x·t
    #[default]
    Radians,
    /// 2π·x·t
    Cycles,
}

impl PhaseConvention {
    pub fn factor(self) -> f64 {
        match self {
            PhaseConvention::Radians => 1.0,
            PhaseConvention::Cycles => std::f64::consts::TAU,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PhaseConvention::Radians => "x*t",
            PhaseConvention::Cycles => "2*pi*x*t",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThermalEnsemble {
    /// μK
    pub temperature: f64,
    /// Hz/μK²
    pub k_e: f64,
    /// Hz
    pub delta0: f64,
    /// 1/(√k_E·T), s^½
    pub a_const: f64,
    pub density: DensityModel,
    pub phase: PhaseConvention,
}

/// E²/(2T³)·e^{−E/T}, energies in the temperature's units.
pub fn boltzmann_pdf(e: f64, t: f64) -> f64 {
    if e < 0.0 {
        return 0.0;
    }
    e * e / (2.0 * t * t * t) * (-e / t).exp()
}

/// k_E = (I₀/U_T)²·k_I, Hz/μK².
pub fn k_e_from_k_i(k_i: f64, i0: f64, u_t: f64) -> Result<f64, CoherenceError> {
    if u_t == 0.0 {
        return Err(CoherenceError::ZeroDepth);
    }
    Ok(i0 * i0 / (u_t * u_t) * k_i)
}

const TRUNCATION: f64 = 1e-12;
const ABS_TOL: f64 = 1e-8;
const MAX_INTERVALS: usize = 200_000;

impl ThermalEnsemble {
    pub fn new(temperature: f64, k_e: f64, delta0: f64) -> Result<Self, CoherenceError> {
        if !(temperature > 0.0) {
            return Err(CoherenceError::Temperature(temperature));
        }
        if !(k_e > 0.0) {
            return Err(CoherenceError::NonPositiveKe(k_e));
        }
        Ok(ThermalEnsemble {
            temperature,
            k_e,
            delta0,
            a_const: 1.0 / (k_e.sqrt() * temperature),
            density: DensityModel::default(),
            phase: PhaseConvention::default(),
        })
    }

    pub fn with_density(self, density: DensityModel) -> Self {
        ThermalEnsemble { density, ..self }
    }

    pub fn with_phase(self, phase: PhaseConvention) -> Self {
        ThermalEnsemble { phase, ..self }
    }

    /// Density of the DLS at x (Hz).
    pub fn dls_pdf(&self, x: f64) -> Result<f64, CoherenceError> {
        let y = x - self.delta0;
        if y < 0.0 {
            return Err(CoherenceError::BelowMinimum {
                x,
                delta0: self.delta0,
            });
        }
        let a = self.a_const;
        Ok(match self.density {
            DensityModel::Printed => a.powi(4) / 12.0 * y * (-a * y.sqrt()).exp(),
            DensityModel::Boltzmann => 2.0 * a.powi(3) * y.sqrt() * (-2.0 * a * y.sqrt()).exp(),
        })
    }

    /// Density in u = √(x − δ₀), and the decay rate of its exponential.
    fn u_density(&self) -> (impl Fn(f64) -> f64, f64) {
        let a = self.a_const;
        let (c, p, rate) = match self.density {
            DensityModel::Printed => (a.powi(4) / 6.0, 3, a),
            DensityModel::Boltzmann => (4.0 * a.powi(3), 2, 2.0 * a),
        };
        (move |u: f64| c * u.powi(p) * (-rate * u).exp(), rate)
    }

    /// (α(t), β(t)): the density-weighted mean of cos and sin of the phase
    /// accumulated by the spread x − δ₀.
    pub fn alpha_beta(&self, t: f64) -> Result<(f64, f64), CoherenceError> {
        if t < 0.0 {
            return Err(CoherenceError::NegativeTime(t));
        }
        let (rho, rate) = self.u_density();
        // the neglected tail is ~ e^{-z}·z³/6 ≈ 4·10⁻⁹ at z = −ln 10⁻¹²
        let u_max = -TRUNCATION.ln() / rate;
        let w = self.phase.factor() * t;
        let alpha = integrate(
            |u| rho(u) * (w * u * u).cos(),
            0.0,
            u_max,
            ABS_TOL,
            0.0,
            MAX_INTERVALS,
        )?;
        let beta = integrate(
            |u| rho(u) * (w * u * u).sin(),
            0.0,
            u_max,
            ABS_TOL,
            0.0,
            MAX_INTERVALS,
        )?;
        Ok((alpha, beta))
    }

    /// α(t)cos(δ″t) + β(t)sin(δ″t).
    pub fn ramsey_signal(&self, t: f64, delta_pp: f64) -> Result<f64, CoherenceError> {
        let (a, b) = self.alpha_beta(t)?;
        let ph = self.phase.factor() * delta_pp * t;
        Ok(a * ph.cos() + b * ph.sin())
    }

    pub fn amplitude(&self, t: f64) -> Result<f64, CoherenceError> {
        let (a, b) = self.alpha_beta(t)?;
        Ok(a.hypot(b))
    }

    pub fn envelope(&self, times: &[f64]) -> Result<RamseyEnvelope, CoherenceError> {
        let ab: Vec<(f64, f64)> = times
            .iter()
            .map(|&t| self.alpha_beta(t))
            .collect::<Result<_, _>>()?;
        Ok(RamseyEnvelope {
            times: times.to_vec(),
            alpha: ab.iter().map(|p| p.0).collect(),
            beta: ab.iter().map(|p| p.1).collect(),
            amplitude: ab.iter().map(|p| p.0.hypot(p.1)).collect(),
            t2: self.coherence_time().ok(),
            phase_convention: self.phase.label(),
        })
    }

    /// Natural time scale 1/(phase factor·⟨x − δ₀⟩-ish) = A²/factor, s.
    fn time_scale(&self) -> f64 {
        self.a_const * self.a_const / self.phase.factor()
    }

    /// T₂′: first time the envelope falls to 1/e.
    pub fn coherence_time(&self) -> Result<f64, CoherenceError> {
        let target = (-1.0f64).exp();
        let s = self.time_scale();
        let (lo_t, hi_t) = (1e-4 * s, 1e4 * s);
        let n = 161;
        let mut prev = (0.0, 1.0);
        let mut bracket = None;
        for k in 0..n {
            let t = lo_t * (hi_t / lo_t).powf(k as f64 / (n - 1) as f64);
            let a = self.amplitude(t)?;
            if a > prev.1 + 1e-7 {
                return Err(CoherenceError::NonMonotone(t));
            }
            if a <= target {
                bracket = Some((prev.0, t));
                break;
            }
            prev = (t, a);
        }
        let (mut lo, mut hi) = bracket.ok_or(CoherenceError::NoCrossing(hi_t))?;
        while hi - lo > 1e-5 * hi {
            let mid = 0.5 * (lo + hi);
            if self.amplitude(mid)? > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RamseyEnvelope {
    pub times: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub t2: Option<f64>,
    pub phase_convention: &'static str,
}

/// Monte-Carlo estimate of (α, β) with standard errors at each time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloRamsey {
    pub times: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub alpha_err: Vec<f64>,
    pub beta_err: Vec<f64>,
    pub samples: usize,
}

const MC_CHUNK: usize = 1 << 14;

/// Sample total energies from the Boltzmann law, map each to a DLS spread
/// k_E·E²/4 and average the Ramsey phasors. Chunk k uses ChaCha stream k of
/// `seed`, so results do not depend on the thread count.
pub fn monte_carlo_ramsey(
    ens: &ThermalEnsemble,
    times: &[f64],
    samples: usize,
    seed: u64,
) -> MonteCarloRamsey {
    let gamma = Gamma::new(3.0, ens.temperature).expect("validated temperature");
    let w = ens.phase.factor();
    let chunks = samples.div_ceil(MC_CHUNK);
    let nt = times.len();
    let sums = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut acc = vec![[0.0f64; 4]; nt];
            for _ in 0..n {
                let e: f64 = gamma.sample(&mut rng);
                let x = ens.k_e * e * e / 4.0;
                for (a, &t) in acc.iter_mut().zip(times) {
                    let (s, co) = (w * x * t).sin_cos();
                    a[0] += co;
                    a[1] += co * co;
                    a[2] += s;
                    a[3] += s * s;
                }
            }
            acc
        })
        .reduce(
            || vec![[0.0f64; 4]; nt],
            |mut l, r| {
                for (a, b) in l.iter_mut().zip(&r) {
                    for k in 0..4 {
                        a[k] += b[k];
                    }
                }
                l
            },
        );
    let n = samples as f64;
    let stat = |sum: f64, sq: f64| {
        let mean = sum / n;
        (mean, ((sq / n - mean * mean).max(0.0) / n).sqrt())
    };
    let mut out = MonteCarloRamsey {
        times: times.to_vec(),
        alpha: vec![],
        beta: vec![],
        alpha_err: vec![],
        beta_err: vec![],
        samples,
    };
    for s in &sums {
        let (a, ae) = stat(s[0], s[1]);
        let (b, be) = stat(s[2], s[3]);
        out.alpha.push(a);
        out.alpha_err.push(ae);
        out.beta.push(b);
        out.beta_err.push(be);
    }
    out
}

/// Quasi-static DLS offsets (Hz) from frequency, intensity and field errors
/// around a triply magic point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SensitivityBudget {
    pub frequency: f64,
    pub intensity: f64,
    pub magnetic: f64,
}

impl SensitivityBudget {
    pub fn total(&self) -> f64 {
        self.frequency + self.intensity + self.magnetic
    }
}

/// k_ν·Δν², k_I·(ΔI/I₀·I₀)², k_M·ΔB².
pub fn sensitivity_budget(
    sol: &MagicSolution,
    k_m: f64,
    d_nu: f64,
    d_i_rel: f64,
    d_b: f64,
) -> SensitivityBudget {
    SensitivityBudget {
        frequency: sol.k_nu * d_nu * d_nu,
        intensity: sol.k_i * (d_i_rel * sol.i0).powi(2),
        magnetic: k_m * d_b * d_b,
    }
}
