//! Doubly magic frequency–intensity point: the stationary point of the total
//! DLS in (ν, I), found by Newton iteration on a finite-difference gradient.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::stark::{
    crossed_spectrum_at, sideband_spectrum_at, ShiftEngine, StarkError, TrapSpectrum,
};
use crate::units::{C, EA0, EPS0, HBAR};

#[derive(Debug, Error)]
pub enum MagicError {
    #[error(transparent)]
    Stark(#[from] StarkError),
    #[error("stationary point is not a minimum (∂²/∂ν² = {k_nu:.3e}, ∂²/∂I² = {k_i:.3e})")]
    Saddle { k_nu: f64, k_i: f64 },
    #[error("no degenerate two-photon lines to start from; pass an explicit initial point")]
    NoStart,
}

/// How a (ν, I) evaluation point becomes a trap spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SpectrumTemplate {
    Monochromatic,
    Sideband {
        modulation_hz: f64,
        depth: f64,
        max_order: u32,
    },
    Crossed {
        split_hz: f64,
    },
}

impl SpectrumTemplate {
    pub fn build(&self, nu: f64, intensity: f64) -> Result<TrapSpectrum, StarkError> {
        self.build_at(nu, 0.0, intensity)
    }

    /// Spectrum whose carrier sits `offset_hz` above `reference_hz`.
    pub fn build_at(
        &self,
        reference_hz: f64,
        offset_hz: f64,
        intensity: f64,
    ) -> Result<TrapSpectrum, StarkError> {
        match *self {
            SpectrumTemplate::Monochromatic => {
                TrapSpectrum::relative(reference_hz, &[(offset_hz, 1.0)], intensity)
            }
            SpectrumTemplate::Sideband {
                modulation_hz,
                depth,
                max_order,
            } => sideband_spectrum_at(
                reference_hz,
                offset_hz,
                modulation_hz,
                depth,
                intensity,
                max_order,
            ),
            SpectrumTemplate::Crossed { split_hz } => {
                crossed_spectrum_at(reference_hz, offset_hz, split_hz, intensity)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MagicSolution {
    /// ν₀, Hz
    pub nu0_abs: f64,
    /// ν₀ − ν_fine/2, Hz
    pub delta_nu0: f64,
    /// W/m²
    pub i0: f64,
    /// μK, negative = attractive
    pub trap_depth: f64,
    /// Hz⁻¹
    pub k_nu: f64,
    /// Hz·m⁴/W²
    pub k_i: f64,
    /// DLS at the stationary point, Hz
    pub dls_offset: f64,
    /// (∂DLS/∂ν, ∂DLS/∂I) at the solution, (Hz/Hz, Hz·m²/W)
    pub gradient_residual: (f64, f64),
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LandscapeGrid {
    pub nu: Vec<f64>,
    pub intensity: Vec<f64>,
    /// `dls[k][l]` at (nu[k], intensity[l])
    pub dls: Vec<Vec<f64>>,
}

impl LandscapeGrid {
    /// Grid indices of the smallest value.
    pub fn argmin(&self) -> (usize, usize) {
        let mut best = (0, 0, f64::INFINITY);
        for (k, row) in self.dls.iter().enumerate() {
            for (l, &v) in row.iter().enumerate() {
                if v < best.2 {
                    best = (k, l, v);
                }
            }
        }
        (best.0, best.1)
    }
}

/// Second derivative by a central difference with one Richardson step.
pub fn second_derivative<E>(f: impl Fn(f64) -> Result<f64, E>, x: f64, h: f64) -> Result<f64, E> {
    let f0 = f(x)?;
    let d2 = |h: f64| -> Result<f64, E> { Ok((f(x + h)? - 2.0 * f0 + f(x - h)?) / (h * h)) };
    let coarse = d2(h)?;
    let fine = d2(h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Simple-model intensity scale δ²ħ²cε₀/(16|d|²) for a ground splitting δ
/// (rad/s) and an upper-leg dipole d (e·a₀): the stationary intensity of the
/// four-level model with Ω = d·√(2I/cε₀)/ħ.
pub fn simple_model_intensity(delta: f64, d_ea0: f64) -> f64 {
    let d = d_ea0 * EA0;
    delta * delta * HBAR * HBAR * C * EPS0 / (16.0 * d * d)
}

pub struct MagicProblem {
    pub engine: ShiftEngine,
    pub template: SpectrumTemplate,
    /// Frequency (Hz) the carrier is measured from internally; the line
    /// midpoint when one exists.
    pub reference_hz: f64,
}

const H_NU_GRAD: f64 = 1e6;
const H_I_GRAD: f64 = 1e-3;
const H_NU_CURV: f64 = 1e7;
const H_I_CURV: f64 = 1e-2;
const MAX_ITER: usize = 100;
const NU_SCALE: f64 = 1e9;
/// Gradient tolerance in Hz/Hz and Hz·m²/W; a few hundred ulps of the
/// underlying shift sums divided by the difference step.
const GRAD_TOL: f64 = 1e-12;

impl MagicProblem {
    pub fn new(engine: ShiftEngine, template: SpectrumTemplate) -> Self {
        let reference_hz = engine.line_midpoint().unwrap_or(0.0);
        MagicProblem {
            engine,
            template,
            reference_hz,
        }
    }

    pub fn dls(&self, nu: f64, intensity: f64) -> Result<f64, StarkError> {
        self.dls_at(nu - self.reference_hz, intensity)
    }

    fn dls_at(&self, x: f64, intensity: f64) -> Result<f64, StarkError> {
        self.engine
            .dls(&self.template.build_at(self.reference_hz, x, intensity)?)
    }

    pub fn spectrum(&self, nu: f64, intensity: f64) -> Result<TrapSpectrum, StarkError> {
        self.template
            .build_at(self.reference_hz, nu - self.reference_hz, intensity)
    }

    /// Central-difference gradient (∂/∂ν, ∂/∂I) with h_ν = 1 MHz, h_I = 10⁻³I.
    pub fn gradient(&self, nu: f64, intensity: f64) -> Result<(f64, f64), StarkError> {
        self.gradient_at(nu - self.reference_hz, intensity)
    }

    fn gradient_at(&self, x: f64, intensity: f64) -> Result<(f64, f64), StarkError> {
        let hi = H_I_GRAD * intensity;
        let gn = (self.dls_at(x + H_NU_GRAD, intensity)?
            - self.dls_at(x - H_NU_GRAD, intensity)?)
            / (2.0 * H_NU_GRAD);
        let gi = (self.dls_at(x, intensity + hi)? - self.dls_at(x, intensity - hi)?) / (2.0 * hi);
        Ok((gn, gi))
    }

    /// (k_ν, k_I) at any (ν, I): h_ν = 10 MHz, h_I = 10⁻²I, one Richardson step.
    pub fn residual_coefficients(&self, nu: f64, intensity: f64) -> Result<(f64, f64), StarkError> {
        self.residual_coefficients_at(nu - self.reference_hz, intensity)
    }

    fn residual_coefficients_at(&self, x: f64, intensity: f64) -> Result<(f64, f64), StarkError> {
        let k_nu = second_derivative(|v| self.dls_at(v, intensity), x, H_NU_CURV)?;
        let k_i = second_derivative(|y| self.dls_at(x, y), intensity, H_I_CURV * intensity)?;
        Ok((k_nu, k_i))
    }

    fn hessian_at(&self, x: f64, intensity: f64) -> Result<[[f64; 2]; 2], StarkError> {
        let (hn, hi) = (H_NU_CURV, H_I_CURV * intensity);
        let f = |a: f64, b: f64| self.dls_at(x + a, intensity + b);
        let d0 = f(0.0, 0.0)?;
        let nn = (f(hn, 0.0)? - 2.0 * d0 + f(-hn, 0.0)?) / (hn * hn);
        let ii = (f(0.0, hi)? - 2.0 * d0 + f(0.0, -hi)?) / (hi * hi);
        let ni = (f(hn, hi)? - f(hn, -hi)? - f(-hn, hi)? + f(-hn, -hi)?) / (4.0 * hn * hi);
        Ok([[nn, ni], [ni, ii]])
    }

    /// Default start (ν, I, I_scale): midpoint of the clock-relevant degenerate
    /// lines and the vertex of a two-point quadratic fit in I there.
    pub fn initial_point(&self) -> Result<(f64, f64, f64), MagicError> {
        let nu = self.engine.line_midpoint().ok_or(MagicError::NoStart)?;
        let d = self.engine.dominant_upper_dipole();
        if d == 0.0 {
            return Err(MagicError::NoStart);
        }
        let scale = simple_model_intensity(self.engine.ground_splitting(), d);
        let d1 = self.dls(nu, scale)?;
        let d2 = self.dls(nu, 2.0 * scale)?;
        let b = (d2 - 2.0 * d1) / (2.0 * scale * scale);
        let a = (d1 - b * scale * scale) / scale;
        let vertex = -a / (2.0 * b);
        let i = if vertex.is_finite() && vertex > 0.0 {
            vertex
        } else {
            scale
        };
        Ok((nu, i, scale))
    }

    pub fn find_magic(&self, init: Option<(f64, f64)>) -> Result<MagicSolution, MagicError> {
        let (nu, mut intensity, i_scale) = match init {
            Some((nu, i)) => (nu, i, i),
            None => self.initial_point()?,
        };
        if !(intensity > 0.0) {
            return Err(StarkError::NegativeIntensity(intensity).into());
        }
        let mut x = nu - self.reference_hz;
        let mut converged = false;
        let mut iterations = 0;
        let mut grad = self.gradient_at(x, intensity)?;
        while iterations < MAX_ITER {
            iterations += 1;
            let h = self.hessian_at(x, intensity)?;
            // scaled variables: ν in GHz, I in units of I_scale
            let g = [grad.0 * NU_SCALE, grad.1 * i_scale];
            let a = [
                [h[0][0] * NU_SCALE * NU_SCALE, h[0][1] * NU_SCALE * i_scale],
                [h[0][1] * NU_SCALE * i_scale, h[1][1] * i_scale * i_scale],
            ];
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            let (mut dx, mut dy) = if det > 0.0 && a[0][0] > 0.0 {
                (
                    (-g[0] * a[1][1] + g[1] * a[0][1]) / det,
                    (-g[1] * a[0][0] + g[0] * a[1][0]) / det,
                )
            } else {
                // not locally convex: fall back to a diagonal step
                (
                    -g[0] / a[0][0].abs().max(f64::MIN_POSITIVE),
                    -g[1] / a[1][1].abs().max(f64::MIN_POSITIVE),
                )
            };
            // trust region: 50 MHz in ν, half the current intensity in I
            let f = (0.05 / dx.abs())
                .min(0.5 * intensity / i_scale / dy.abs())
                .min(1.0);
            dx *= f;
            dy *= f;
            let (step_nu, step_i) = (dx * NU_SCALE, dy * i_scale);
            x += step_nu;
            intensity += step_i;
            grad = self.gradient_at(x, intensity)?;
            let small_step = step_nu.abs() < 1e3 && step_i.abs() < 1e-6 * intensity;
            let flat = grad.0.abs() < GRAD_TOL && grad.1.abs() < GRAD_TOL;
            if small_step && flat {
                converged = true;
                break;
            }
        }
        let (k_nu, k_i) = self.residual_coefficients_at(x, intensity)?;
        if converged && (k_nu < 0.0 || k_i < 0.0) {
            return Err(MagicError::Saddle { k_nu, k_i });
        }
        let spec = self.template.build_at(self.reference_hz, x, intensity)?;
        let b = self.engine.breakdown(&spec)?;
        let half_fine = self
            .engine
            .excited_centroid_hz
            .map(|e| e / 2.0)
            .unwrap_or(self.reference_hz);
        Ok(MagicSolution {
            nu0_abs: self.reference_hz + x,
            delta_nu0: (self.reference_hz - half_fine) + x,
            i0: intensity,
            trap_depth: b.trap_depth_uk(),
            k_nu,
            k_i,
            dls_offset: b.dls_total,
            gradient_residual: grad,
            iterations,
            converged,
        })
    }

    /// Row-major DLS grid (outer index ν, inner index I), evaluated in parallel.
    pub fn landscape(&self, nu: &[f64], intensity: &[f64]) -> Result<LandscapeGrid, StarkError> {
        let rows: Result<Vec<Vec<f64>>, StarkError> = nu
            .par_iter()
            .map(|&n| intensity.iter().map(|&i| self.dls(n, i)).collect())
            .collect();
        Ok(LandscapeGrid {
            nu: nu.to_vec(),
            intensity: intensity.to_vec(),
            dls: rows?,
        })
    }

    /// Laser frequencies of the degenerate lines relative to ν_fine/2, Hz.
    pub fn relative_lines(&self) -> Vec<f64> {
        let half = self.engine.excited_centroid_hz.unwrap_or(0.0) / 2.0;
        self.engine
            .degenerate_lines()
            .iter()
            .map(|l| l.2 - half)
            .collect()
    }
}

/// `n` points spanning [lo, hi] inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}
