//! Breit–Rabi energies of the J = 1/2 ground manifold, differential Zeeman
//! shifts of clock pairs and the magic magnetic field.

use serde::Serialize;
use thiserror::Error;

use crate::angular::Half;
use crate::atomdata::AtomDataset;
use crate::stark::GroundStatePair;
use crate::units::{GAUSS, G_S, MU_B_OVER_H};

#[derive(Debug, Error, PartialEq)]
pub enum ZeemanError {
    #[error("invalid ground state F = {f}, m_F = {m} for I = {i}")]
    InvalidState { f: Half, m: Half, i: Half },
    #[error("negative field {0} G")]
    NegativeField(f64),
    #[error("no stationary point of the differential Zeeman shift in [0, {0}] G")]
    NoStationaryPoint(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeemanContext {
    pub species: String,
    pub nuclear_spin: Half,
    pub g_j: f64,
    pub g_i: f64,
    /// Hz
    pub delta_hpf: f64,
}

/// Landé g_J with g_L = 1.
pub fn lande_gj(l: u8, s: Half, j: Half, g_s: f64) -> f64 {
    let jj = j.casimir();
    if jj == 0.0 {
        return 0.0;
    }
    let ss = s.casimir();
    let ll = f64::from(l) * (f64::from(l) + 1.0);
    (jj - ss + ll) / (2.0 * jj) + g_s * (jj + ss - ll) / (2.0 * jj)
}

impl ZeemanContext {
    pub fn from_dataset(ds: &AtomDataset) -> Self {
        let g = ds.species.ground;
        ZeemanContext {
            species: ds.species.name.clone(),
            nuclear_spin: ds.nuclear_spin(),
            g_j: lande_gj(g.l, Half::HALF, g.j, G_S),
            g_i: ds.species.g_i,
            delta_hpf: ds.species.delta_hpf_hz,
        }
    }

    /// Breit–Rabi energy E(F, m_F)/h in Hz at `b_gauss`, measured from the
    /// hyperfine centroid.
    pub fn breit_rabi_energy(&self, f: Half, m: Half, b_gauss: f64) -> Result<f64, ZeemanError> {
        let i = self.nuclear_spin;
        let upper = f == i + Half::HALF;
        if !(upper || (f == i - Half::HALF && i > Half::ZERO))
            || m.abs() > f
            || !(m - f).is_integer()
        {
            return Err(ZeemanError::InvalidState { f, m, i });
        }
        if b_gauss < 0.0 {
            return Err(ZeemanError::NegativeField(b_gauss));
        }
        Ok(self.energy(upper, m.value(), b_gauss))
    }

    fn energy(&self, upper: bool, m: f64, b_gauss: f64) -> f64 {
        let two_i1 = 2.0 * self.nuclear_spin.value() + 1.0;
        let mub = MU_B_OVER_H * b_gauss * GAUSS;
        let x = (self.g_j - self.g_i) * mub / self.delta_hpf;
        let root = if upper && (2.0 * m.abs() - two_i1).abs() < 1e-9 {
            // stretched state: √((1 ± x)²) continued analytically
            1.0 + m.signum() * x
        } else {
            (1.0 + 4.0 * m * x / two_i1 + x * x).sqrt()
        };
        let sign = if upper { 1.0 } else { -1.0 };
        -self.delta_hpf / (2.0 * two_i1) + self.g_i * mub * m + sign * self.delta_hpf / 2.0 * root
    }

    /// E(g2) − E(g1) − δ_hpf, Hz.
    pub fn differential_zeeman(
        &self,
        pair: &GroundStatePair,
        b_gauss: f64,
    ) -> Result<f64, ZeemanError> {
        let e2 = self.breit_rabi_energy(pair.g2.f, pair.g2.m, b_gauss)?;
        let e1 = self.breit_rabi_energy(pair.g1.f, pair.g1.m, b_gauss)?;
        Ok(e2 - e1 - self.delta_hpf)
    }

    /// Same as `differential_zeeman` but valid for B < 0 too, for stencils.
    fn differential_unchecked(&self, pair: &GroundStatePair, b_gauss: f64) -> f64 {
        let i = self.nuclear_spin;
        let up = |f: Half| f == i + Half::HALF;
        self.energy(up(pair.g2.f), pair.g2.m.value(), b_gauss)
            - self.energy(up(pair.g1.f), pair.g1.m.value(), b_gauss)
            - self.delta_hpf
    }

    /// Magic field B₀ (G) and k_M = ∂²Δ/∂B² there (Hz/G²).
    pub fn find_magic_b(&self, pair: &GroundStatePair) -> Result<(f64, f64), ZeemanError> {
        const BRACKET: f64 = 50.0;
        self.differential_zeeman(pair, 0.0)?;
        let d = |b: f64| self.differential_unchecked(pair, b);
        let slope = |b: f64| (d(b + 1e-3) - d(b - 1e-3)) / 2e-3;
        let b0 = if pair.g1.m == Half::ZERO && pair.g2.m == Half::ZERO {
            0.0
        } else {
            let (mut lo, mut hi) = (0.0, BRACKET);
            let (s_lo, s_hi) = (slope(lo), slope(hi));
            if s_lo == 0.0 {
                hi = lo;
            } else if s_lo.signum() == s_hi.signum() {
                return Err(ZeemanError::NoStationaryPoint(BRACKET));
            }
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                if slope(mid).signum() == s_lo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let h = 1e-2;
        let k_m = (d(b0 + h) - 2.0 * d(b0) + d(b0 - h)) / (h * h);
        Ok((b0, k_m))
    }
}
