//! Photon-scattering decoherence: natural linewidths, one-photon Raman
//! scattering, two-photon scattering and the resulting T₁ bound.

use thiserror::Error;

use crate::angular::{dipole_element, Half};
use crate::atomdata::{AtomDataset, DataError, HyperfineState, LevelKey};
use crate::stark::{GroundStatePair, ShiftEngine, ShiftOptions, StarkError, TrapSpectrum};
use crate::units::{cm1_to_hz, hz_to_rad, rad_to_hz, C, EA0, EPS0, HBAR};

#[derive(Debug, Error)]
pub enum ScatterError {
    #[error(transparent)]
    Stark(#[from] StarkError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("{0} has no downward dipole channel in the dataset")]
    NoDecay(LevelKey),
    #[error("negative rate {0} Hz")]
    NegativeRate(f64),
}

/// ω³/(3πε₀ħc³): spontaneous emission rate per unit |dipole|², s⁻¹/(C·m)².
fn emission_prefactor(omega: f64) -> f64 {
    omega.powi(3) / (3.0 * std::f64::consts::PI * EPS0 * HBAR * C.powi(3))
}

/// Γ_e/2π in Hz, summed over every lower level the dataset connects to.
pub fn natural_linewidth(ds: &AtomDataset, level: LevelKey) -> Result<f64, ScatterError> {
    let upper = ds.level(level)?;
    let mut gamma = 0.0;
    let mut any = false;
    for d in ds.dipoles.iter().filter(|d| d.upper == level) {
        let lower = ds.level(d.lower)?;
        let omega = hz_to_rad(cm1_to_hz(upper.energy_cm1 - lower.energy_cm1));
        let dd = d.d_ea0 * EA0;
        gamma += emission_prefactor(omega) * dd * dd / f64::from(upper.key.j.multiplicity());
        any = true;
    }
    if !any {
        return Err(ScatterError::NoDecay(level));
    }
    Ok(rad_to_hz(gamma))
}

fn guard(opts: &ShiftOptions, detuning: f64, state: &HyperfineState) -> Result<(), StarkError> {
    let d = rad_to_hz(detuning).abs();
    if d < opts.guard_hz {
        return Err(StarkError::Resonance {
            what: format!("{state} Raman intermediate"),
            detuning_hz: d,
            guard_hz: opts.guard_hz,
        });
    }
    Ok(())
}

/// Spontaneous Raman rate (Hz) out of `g` into every other ground sublevel
/// reachable by one emitted photon, summed over trap components.
pub fn raman_rate_state(
    ds: &AtomDataset,
    g: &HyperfineState,
    spec: &TrapSpectrum,
    opts: &ShiftOptions,
) -> Result<f64, ScatterError> {
    let i = ds.nuclear_spin();
    let ground = ds.ground();
    let wg = ds.state_angular_frequency(g.level, g.f)?;
    let mut inter = Vec::new();
    for &k in &ds.one_photon_levels {
        if !ds.has_dipole(g.level, k) {
            continue;
        }
        for f in ds.level(k)?.f_values(i) {
            if g.m.abs() > f {
                continue;
            }
            let mid = HyperfineState::new(k, f, g.m);
            let up = dipole_element(ds, g, &mid, 0)?;
            if up != 0.0 {
                inter.push((mid, up, ds.state_angular_frequency(k, f)? - wg));
            }
        }
    }
    let field = spec.field();
    let mut rate = 0.0;
    for comp in &spec.components {
        for ff in ground.f_values(i) {
            for mf in ff.projections() {
                let q = (mf - g.m).twice() / 2;
                if (ff == g.f && mf == g.m) || q.abs() > 1 || !(mf - g.m).is_integer() {
                    continue;
                }
                let fin = HyperfineState::new(g.level, ff, mf);
                let mut amp = 0.0;
                for (mid, up, w) in &inter {
                    if mid.m.abs() > mid.f || (mf - mid.m).abs() > Half::ONE {
                        continue;
                    }
                    let down = dipole_element(ds, mid, &fin, q)?;
                    guard(opts, w - comp.omega, g)?;
                    amp += down * up * (1.0 / (w - comp.omega) + 1.0 / (w + comp.omega));
                }
                let p = amp * EA0 * EA0 * comp.amplitude * field / (2.0 * HBAR);
                rate += emission_prefactor(comp.omega) * p * p;
            }
        }
    }
    Ok(rad_to_hz(rate))
}

/// Γ⁽¹ᵖ⁾_RS: the larger Raman rate of the two clock states, Hz.
pub fn raman_rate_1p(
    ds: &AtomDataset,
    pair: &GroundStatePair,
    spec: &TrapSpectrum,
    opts: &ShiftOptions,
) -> Result<f64, ScatterError> {
    let r1 = raman_rate_state(ds, &pair.g1, spec, opts)?;
    let r2 = raman_rate_state(ds, &pair.g2, spec, opts)?;
    Ok(r1.max(r2))
}

/// Γ⁽²ᵖ⁾_S = (Γ_e/2π)·max over clock states of Σ (Ω_TPP/(2Δ_e))², Hz.
pub fn scatter_rate_2p(
    ds: &AtomDataset,
    engine: &ShiftEngine,
    manifold: LevelKey,
    spec: &TrapSpectrum,
) -> Result<f64, ScatterError> {
    let gamma = natural_linewidth(ds, manifold)?;
    let p1 = engine.t1.excited_population(spec, &engine.opts)?;
    let p2 = engine.t2.excited_population(spec, &engine.opts)?;
    Ok(gamma * p1.max(p2))
}

/// T₁ = 1/Σ rates in seconds; `None` when every rate is zero (unbounded).
pub fn t1_bound(rates: &[f64]) -> Result<Option<f64>, ScatterError> {
    if let Some(&r) = rates.iter().find(|r| !(**r >= 0.0)) {
        return Err(ScatterError::NegativeRate(r));
    }
    let total: f64 = rates.iter().sum();
    Ok((total > 0.0).then(|| 1.0 / total))
}
