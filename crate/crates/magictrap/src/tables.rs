//! Preset result tables: one magic-point evaluation per (species, pair,
//! manifold, sideband) row, with scattering rates.

use serde::Serialize;
use thiserror::Error;

use crate::atomdata::{AtomDataset, DataError, LevelKey};
use crate::magic::{MagicError, MagicProblem, MagicSolution, SpectrumTemplate};
use crate::scatter::{raman_rate_1p, scatter_rate_2p, ScatterError};
use crate::stark::{GroundStatePair, ShiftEngine, ShiftOptions, StarkError};
use crate::units::{wavelength_nm, GHZ};

/// Phase-modulation depth of the polychromatic presets.
pub const PRESET_DEPTH: f64 = 1.44;
/// Sideband orders kept for the polychromatic presets.
pub const PRESET_ORDERS: u32 = 2;

#[derive(Debug, Error)]
pub enum TableError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Stark(#[from] StarkError),
    #[error(transparent)]
    Magic(#[from] MagicError),
    #[error(transparent)]
    Scatter(#[from] ScatterError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowSpec {
    pub species: &'static str,
    pub pair: (i32, i32),
    pub excited: &'static str,
    /// Phase-modulation frequency in GHz; `None` for a monochromatic trap.
    pub sideband_ghz: Option<f64>,
}

const fn row(
    species: &'static str,
    pair: (i32, i32),
    excited: &'static str,
    sb: Option<f64>,
) -> RowSpec {
    RowSpec {
        species,
        pair,
        excited,
        sideband_ghz: sb,
    }
}

pub const PRESETS: [&str; 4] = ["table1", "tableS5", "tableS6", "tableS7"];

pub fn preset(name: &str) -> Option<Vec<RowSpec>> {
    let rows = match name {
        "table1" => vec![
            row("cs", (0, 0), "5D3_2", None),
            row("cs", (0, 0), "5D5_2", None),
            row("cs", (0, 0), "7S1_2", None),
            row("cs", (-1, 1), "7S1_2", None),
            row("cs", (3, 4), "7S1_2", None),
            row("cs", (0, 0), "7D3_2", None),
            row("cs", (0, 0), "7D5_2", None),
        ],
        "tableS5" => vec![
            row("rb87", (0, 0), "4D5_2", None),
            row("rb87", (0, 0), "4D3_2", None),
            row("rb87", (0, 0), "6S1_2", None),
            row("rb87", (-1, 1), "6S1_2", None),
            row("rb87", (1, 2), "6S1_2", None),
            row("rb87", (0, 0), "6D5_2", None),
            row("rb87", (0, 0), "6D3_2", None),
            row("rb85", (0, 0), "4D5_2", None),
            row("rb85", (0, 0), "4D3_2", None),
            row("rb85", (0, 0), "6S1_2", None),
            row("rb85", (0, 0), "6D5_2", None),
            row("rb85", (0, 0), "6D3_2", None),
        ],
        "tableS6" => vec![
            row("cs", (0, 0), "5D3_2", Some(9.4)),
            row("cs", (0, 0), "5D5_2", Some(9.4)),
            row("cs", (0, 0), "7S1_2", Some(7.0)),
        ],
        "tableS7" => vec![
            row("rb87", (0, 0), "4D5_2", Some(6.9)),
            row("rb87", (0, 0), "4D3_2", Some(6.9)),
            row("rb87", (0, 0), "6S1_2", Some(5.3)),
            row("rb85", (0, 0), "4D5_2", Some(3.0)),
            row("rb85", (0, 0), "4D3_2", Some(3.0)),
            row("rb85", (0, 0), "6S1_2", Some(2.3)),
        ],
        _ => return None,
    };
    Some(rows)
}

/// One evaluated row in display units.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowResult {
    pub species: String,
    pub pair: String,
    pub excited: String,
    pub lambda_nm: f64,
    pub delta_nu0_ghz: f64,
    pub i0_gw_m2: f64,
    pub u_t_uk: f64,
    pub k_nu_hz_inv: f64,
    pub k_i_fhz_m4_w2: f64,
    pub gamma_1p_hz: f64,
    pub gamma_2p_hz: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub fn template_for(sideband_ghz: Option<f64>, depth: f64) -> SpectrumTemplate {
    match sideband_ghz {
        Some(sb) if depth > 0.0 => SpectrumTemplate::Sideband {
            modulation_hz: sb * GHZ,
            depth,
            max_order: PRESET_ORDERS,
        },
        _ => SpectrumTemplate::Monochromatic,
    }
}

/// Solve the magic point for one configuration and attach scattering rates.
pub fn evaluate(
    ds: &AtomDataset,
    pair: GroundStatePair,
    excited: LevelKey,
    template: SpectrumTemplate,
    opts: ShiftOptions,
) -> Result<(MagicSolution, RowResult), TableError> {
    let engine = ShiftEngine::new(ds, pair, Some(excited), opts)?;
    let problem = MagicProblem::new(engine, template);
    let sol = problem.find_magic(None)?;
    let spec = problem.spectrum(sol.nu0_abs, sol.i0)?;
    let g1 = raman_rate_1p(ds, &pair, &spec, &opts)?;
    let g2 = scatter_rate_2p(ds, &problem.engine, excited, &spec)?;
    let row = RowResult {
        species: ds.species.name.clone(),
        pair: pair.label(),
        excited: excited.to_string(),
        lambda_nm: wavelength_nm(sol.nu0_abs),
        delta_nu0_ghz: sol.delta_nu0 / GHZ,
        i0_gw_m2: sol.i0 / 1e9,
        u_t_uk: sol.trap_depth,
        k_nu_hz_inv: sol.k_nu,
        k_i_fhz_m4_w2: sol.k_i * 1e15,
        gamma_1p_hz: g1,
        gamma_2p_hz: g2,
        converged: sol.converged,
        iterations: sol.iterations,
    };
    Ok((sol, row))
}

/// Evaluate a preset row against a dataset of the matching species.
pub fn evaluate_row(
    ds: &AtomDataset,
    spec: &RowSpec,
    opts: ShiftOptions,
) -> Result<RowResult, TableError> {
    let pair = GroundStatePair::new(ds, spec.pair.0, spec.pair.1)?;
    let excited: LevelKey = spec.excited.parse()?;
    Ok(evaluate(
        ds,
        pair,
        excited,
        template_for(spec.sideband_ghz, PRESET_DEPTH),
        opts,
    )?
    .1)
}

/// Row placeholder for a configuration whose solve failed.
pub fn failed_row(spec: &RowSpec) -> RowResult {
    RowResult {
        species: spec.species.to_string(),
        pair: format!("({},{})", spec.pair.0, spec.pair.1),
        excited: spec.excited.to_string(),
        lambda_nm: f64::NAN,
        delta_nu0_ghz: f64::NAN,
        i0_gw_m2: f64::NAN,
        u_t_uk: f64::NAN,
        k_nu_hz_inv: f64::NAN,
        k_i_fhz_m4_w2: f64::NAN,
        gamma_1p_hz: f64::NAN,
        gamma_2p_hz: f64::NAN,
        converged: false,
        iterations: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_sizes() {
        assert_eq!(preset("table1").unwrap().len(), 7);
        assert_eq!(preset("tableS5").unwrap().len(), 12);
        assert_eq!(preset("tableS6").unwrap().len(), 3);
        assert_eq!(preset("tableS7").unwrap().len(), 6);
        assert!(preset("table2").is_none());
    }
}
