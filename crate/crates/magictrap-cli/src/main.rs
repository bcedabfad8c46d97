//! `magictrap`: reproducible CSV/JSON tables of differential light shifts,
//! magic operating points and coherence estimates.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use magictrap::atomdata::{default_data_dir, load_dataset, AtomDataset, DataError, LevelKey};
use magictrap::coherence::{
    k_e_from_k_i, sensitivity_budget, DensityModel, PhaseConvention, ThermalEnsemble,
};
use magictrap::magic::{linspace, MagicError, MagicProblem, SpectrumTemplate};
use magictrap::stark::{
    CounterRotating, GroundStatePair, ShiftEngine, ShiftOptions, StarkError, TppMode,
};
use magictrap::tables::{
    evaluate, evaluate_row, failed_row, preset, RowResult, TableError, PRESETS, PRESET_ORDERS,
};
use magictrap::units::{GHZ, GW_M2, MHZ};
use magictrap::zeeman::ZeemanContext;

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(
    name = "magictrap",
    version,
    about = "Magic operating points of alkali clock states in optical traps"
)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CrMode {
    Reversed,
    Standard,
    Omitted,
}

#[derive(Args)]
struct RunConfig {
    /// Data directory (default: $MAGICTRAP_DATA or the bundled tables)
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    #[arg(long, global = true, default_value = "cs")]
    species: String,
    /// Clock pair m,m′ (lower F, upper F)
    #[arg(long, global = true, default_value = "0,0", allow_hyphen_values = true)]
    pair: String,
    /// Two-photon excited manifold, e.g. 7S1_2
    #[arg(long, global = true, default_value = "7S1_2")]
    excited: String,
    /// Phase-modulation frequency of a polychromatic trap, GHz
    #[arg(long, global = true, conflicts_with = "crossed_split_ghz")]
    sideband_ghz: Option<f64>,
    #[arg(long, global = true, default_value_t = magictrap::tables::PRESET_DEPTH)]
    mod_depth: f64,
    /// Frequency split of two crossed beams, GHz
    #[arg(long, global = true)]
    crossed_split_ghz: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Closed-form two-level TPP shift (default)
    #[arg(long, global = true, conflicts_with = "approx_tpp")]
    exact_tpp: bool,
    /// Perturbative −Ω²/4Δ TPP shift
    #[arg(long, global = true)]
    approx_tpp: bool,
    #[arg(long, global = true, value_enum, default_value = "reversed")]
    counter_rotating: CrMode,
    /// Minimum allowed |detuning| on every denominator, MHz
    #[arg(long, global = true, default_value_t = 1.0)]
    guard_mhz: f64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Total DLS on a (ν, I) grid
    Landscape {
        /// Δν range lo,hi in GHz relative to half the excited-level frequency
        #[arg(long, allow_hyphen_values = true, default_value = "-0.5,1.0")]
        nu_ghz: String,
        /// Intensity range lo,hi in GW/m²
        #[arg(long, default_value = "0.01,0.3")]
        i_gw: String,
        #[arg(long, default_value_t = 31)]
        steps: usize,
    },
    /// Doubly magic (ν₀, I₀) with curvatures and scattering rates
    Magic,
    /// A full preset table
    Table {
        #[arg(long)]
        preset: String,
    },
    /// Magic magnetic field of the clock pair
    Zeeman,
    /// Thermal coherence time at the magic point
    Coherence {
        /// Temperatures in μK, comma separated
        #[arg(long, allow_hyphen_values = true)]
        temperatures: String,
        #[arg(long, value_enum, default_value = "printed")]
        density: Density,
        #[arg(long, value_enum, default_value = "radians")]
        phase: Phase,
        /// Frequency error for the sensitivity block, MHz
        #[arg(long)]
        d_nu_mhz: Option<f64>,
        /// Relative intensity error for the sensitivity block
        #[arg(long)]
        d_i_rel: Option<f64>,
        /// Magnetic-field error for the sensitivity block, mG
        #[arg(long)]
        d_b_mg: Option<f64>,
    },
    /// Degenerate TPP line frequencies and separations
    Lines,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Density {
    Printed,
    Boltzmann,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Phase {
    Radians,
    Cycles,
}

/// Failure with its exit code.
struct Fail {
    code: u8,
    msg: String,
}

fn usage(msg: impl Display) -> Fail {
    Fail {
        code: 2,
        msg: msg.to_string(),
    }
}

fn numeric(msg: impl Display) -> Fail {
    Fail {
        code: 3,
        msg: msg.to_string(),
    }
}

impl From<DataError> for Fail {
    fn from(e: DataError) -> Self {
        match e {
            DataError::UnknownLevel(_) => usage(e),
            _ => Fail {
                code: 4,
                msg: e.to_string(),
            },
        }
    }
}

impl From<StarkError> for Fail {
    fn from(e: StarkError) -> Self {
        match e {
            StarkError::Data(d) => d.into(),
            StarkError::Resonance { .. } => numeric(e),
            _ => usage(e),
        }
    }
}

impl From<MagicError> for Fail {
    fn from(e: MagicError) -> Self {
        match e {
            MagicError::Stark(s) => s.into(),
            _ => numeric(e),
        }
    }
}

impl From<TableError> for Fail {
    fn from(e: TableError) -> Self {
        match e {
            TableError::Data(d) => d.into(),
            TableError::Stark(s) => s.into(),
            TableError::Magic(m) => m.into(),
            TableError::Scatter(s) => numeric(s),
        }
    }
}

/// Shortest decimal with 9 significant digits.
fn sig9(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.8e}")
    } else {
        "nan".into()
    }
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        sig9(x)
            .parse::<f64>()
            .map(Value::from)
            .unwrap_or(Value::Null)
    } else {
        Value::Null
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, Fail> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("not a number: {t:?}")))
        })
        .collect()
}

fn parse_range(s: &str, what: &str) -> Result<(f64, f64), Fail> {
    match parse_list(s)?[..] {
        [lo, hi] if lo <= hi => Ok((lo, hi)),
        _ => Err(usage(format!("{what} must be lo,hi with lo ≤ hi"))),
    }
}

impl RunConfig {
    fn dataset(&self, species: &str) -> Result<AtomDataset, Fail> {
        let dir = self.data_dir.clone().unwrap_or_else(default_data_dir);
        if !dir.join(species).is_dir() {
            return Err(usage(format!(
                "unknown species {species:?} in {}",
                dir.display()
            )));
        }
        Ok(load_dataset(&dir, species)?)
    }

    fn pair(&self, ds: &AtomDataset) -> Result<GroundStatePair, Fail> {
        let v: Vec<i32> = self
            .pair
            .split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| usage(format!("bad --pair {:?}", self.pair)))
            })
            .collect::<Result<_, _>>()?;
        match v[..] {
            [a, b] => Ok(GroundStatePair::new(ds, a, b)?),
            _ => Err(usage(format!("--pair expects m,m′, got {:?}", self.pair))),
        }
    }

    fn excited(&self, ds: &AtomDataset) -> Result<LevelKey, Fail> {
        let key: LevelKey = self.excited.parse().map_err(usage)?;
        ds.level(key).map_err(usage)?;
        if !ds.one_photon_levels.iter().any(|&k| ds.has_dipole(k, key)) {
            return Err(usage(format!(
                "{key} is not a two-photon manifold of {}",
                ds.species.name
            )));
        }
        Ok(key)
    }

    fn options(&self) -> Result<ShiftOptions, Fail> {
        if !(self.guard_mhz >= 0.0) {
            return Err(usage("--guard-mhz must be non-negative"));
        }
        Ok(ShiftOptions {
            tpp: if self.approx_tpp {
                TppMode::Perturbative
            } else {
                TppMode::Exact
            },
            counter_rotating: match self.counter_rotating {
                CrMode::Reversed => CounterRotating::Reversed,
                CrMode::Standard => CounterRotating::Standard,
                CrMode::Omitted => CounterRotating::Omitted,
            },
            guard_hz: self.guard_mhz * MHZ,
            ..ShiftOptions::default()
        })
    }

    fn template(&self) -> Result<SpectrumTemplate, Fail> {
        if let Some(s) = self.crossed_split_ghz {
            if !(s > 0.0) {
                return Err(usage("--crossed-split-ghz must be positive"));
            }
            return Ok(SpectrumTemplate::Crossed { split_hz: s * GHZ });
        }
        match self.sideband_ghz {
            Some(sb) if !(sb > 0.0) => Err(usage("--sideband-ghz must be positive")),
            Some(_) if !(self.mod_depth >= 0.0) => Err(usage("--mod-depth must be non-negative")),
            Some(sb) if self.mod_depth > 0.0 => Ok(SpectrumTemplate::Sideband {
                modulation_hz: sb * GHZ,
                depth: self.mod_depth,
                max_order: PRESET_ORDERS,
            }),
            _ => Ok(SpectrumTemplate::Monochromatic),
        }
    }

    fn problem(&self) -> Result<(AtomDataset, GroundStatePair, LevelKey, MagicProblem), Fail> {
        let ds = self.dataset(&self.species)?;
        let pair = self.pair(&ds)?;
        let excited = self.excited(&ds)?;
        let template = self.template()?;
        let engine = ShiftEngine::new(&ds, pair, Some(excited), self.options()?)?;
        Ok((ds, pair, excited, MagicProblem::new(engine, template)))
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

const ROW_COLUMNS: [&str; 13] = [
    "species",
    "pair",
    "excited",
    "lambda_nm",
    "delta_nu0_ghz",
    "i0_gw_m2",
    "u_t_uk",
    "k_nu_hz_inv",
    "k_i_fhz_m4_w2",
    "gamma_1p_hz",
    "gamma_2p_hz",
    "converged",
    "iterations",
];

fn row_fields(r: &RowResult) -> Vec<String> {
    let mut v = vec![r.species.clone(), r.pair.clone(), r.excited.clone()];
    for x in [
        r.lambda_nm,
        r.delta_nu0_ghz,
        r.i0_gw_m2,
        r.u_t_uk,
        r.k_nu_hz_inv,
        r.k_i_fhz_m4_w2,
        r.gamma_1p_hz,
        r.gamma_2p_hz,
    ] {
        v.push(sig9(x));
    }
    v.push(r.converged.to_string());
    v.push(r.iterations.to_string());
    v
}

fn row_json(r: &RowResult) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA));
    m.insert("species".into(), json!(r.species));
    m.insert("pair".into(), json!(r.pair));
    m.insert("excited".into(), json!(r.excited));
    for (k, x) in [
        ("lambda_nm", r.lambda_nm),
        ("delta_nu0_ghz", r.delta_nu0_ghz),
        ("i0_gw_m2", r.i0_gw_m2),
        ("u_t_uk", r.u_t_uk),
        ("k_nu_hz_inv", r.k_nu_hz_inv),
        ("k_i_fhz_m4_w2", r.k_i_fhz_m4_w2),
        ("gamma_1p_hz", r.gamma_1p_hz),
        ("gamma_2p_hz", r.gamma_2p_hz),
    ] {
        m.insert(k.into(), num(x));
    }
    m.insert("converged".into(), json!(r.converged));
    m.insert("iterations".into(), json!(r.iterations));
    m
}

/// CSV text with the schema comment line and any extra `# key=value` lines.
fn csv_text(
    meta: &[(&str, String)],
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<String, Fail> {
    let mut out = format!("# schema={SCHEMA}\n");
    for (k, v) in meta {
        out.push_str(&format!("# {k}={v}\n"));
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| Fail {
        code: 1,
        msg: e.to_string(),
    };
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Fail {
        code: 1,
        msg: e.to_string(),
    })?;
    out.push_str(&String::from_utf8(bytes).expect("csv output is UTF-8"));
    Ok(out)
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Command output plus the exit code it should end with.
struct Output {
    text: String,
    code: u8,
}

fn ok(text: String) -> Result<Output, Fail> {
    Ok(Output { text, code: 0 })
}

fn cmd_landscape(cfg: &RunConfig, nu_ghz: &str, i_gw: &str, steps: usize) -> Result<Output, Fail> {
    let (nu_lo, nu_hi) = parse_range(nu_ghz, "--nu-ghz")?;
    let (i_lo, i_hi) = parse_range(i_gw, "--i-gw")?;
    if steps == 0 {
        return Err(usage("--steps must be at least 1"));
    }
    if !(i_lo >= 0.0) {
        return Err(usage("intensities must be non-negative"));
    }
    let (_, _, _, problem) = cfg.problem()?;
    let half = problem.engine.excited_centroid_hz.unwrap_or(0.0) / 2.0;
    let nu: Vec<f64> = linspace(nu_lo, nu_hi, steps)
        .iter()
        .map(|d| half + d * GHZ)
        .collect();
    let intensity: Vec<f64> = linspace(i_lo, i_hi, steps)
        .iter()
        .map(|i| i * GW_M2)
        .collect();
    let grid = problem.landscape(&nu, &intensity).map_err(|e| {
        let bad = nu
            .iter()
            .flat_map(|&n| intensity.iter().map(move |&i| (n, i)))
            .find(|&(n, i)| problem.dls(n, i).is_err());
        match bad {
            Some((n, i)) => numeric(format!("{e} at nu_hz={}, i_w_m2={}", sig9(n), sig9(i))),
            None => Fail::from(e),
        }
    })?;
    let mut rows = Vec::with_capacity(steps * steps);
    for (k, row) in grid.dls.iter().enumerate() {
        for (l, v) in row.iter().enumerate() {
            rows.push(vec![sig9(grid.nu[k]), sig9(grid.intensity[l]), sig9(*v)]);
        }
    }
    match cfg.format(Format::Csv) {
        Format::Csv => ok(csv_text(&[], &["nu_hz", "i_w_m2", "dls_hz"], &rows)?),
        Format::Json => {
            let cells: Vec<Value> = rows
                .iter()
                .map(|r| json!({"nu_hz": num(r[0].parse().unwrap()), "i_w_m2": num(r[1].parse().unwrap()), "dls_hz": num(r[2].parse().unwrap())}))
                .collect();
            ok(json_text(
                &json!({"schema_version": SCHEMA, "cells": cells}),
            ))
        }
    }
}

fn cmd_magic(cfg: &RunConfig) -> Result<Output, Fail> {
    let ds = cfg.dataset(&cfg.species)?;
    let pair = cfg.pair(&ds)?;
    let excited = cfg.excited(&ds)?;
    let template = cfg.template()?;
    let (row, code) = match evaluate(&ds, pair, excited, template, cfg.options()?) {
        Ok((_, row)) => {
            let code = if row.converged { 0 } else { 3 };
            (row, code)
        }
        Err(TableError::Magic(e @ (MagicError::Saddle { .. } | MagicError::NoStart))) => {
            eprintln!("magictrap: {e}");
            let mut row = failed_row(&magictrap::tables::RowSpec {
                species: "",
                pair: (0, 0),
                excited: "",
                sideband_ghz: None,
            });
            row.species = ds.species.name.clone();
            row.pair = pair.label();
            row.excited = excited.to_string();
            (row, 3)
        }
        Err(e) => return Err(e.into()),
    };
    let text = match cfg.format(Format::Json) {
        Format::Json => json_text(&Value::Object(row_json(&row))),
        Format::Csv => csv_text(&[], &ROW_COLUMNS, &[row_fields(&row)])?,
    };
    Ok(Output { text, code })
}

fn cmd_table(cfg: &RunConfig, name: &str) -> Result<Output, Fail> {
    let specs = preset(name).ok_or_else(|| {
        usage(format!(
            "unknown preset {name:?}; expected one of {PRESETS:?}"
        ))
    })?;
    let opts = cfg.options()?;
    let mut datasets: BTreeMap<&str, AtomDataset> = BTreeMap::new();
    let mut rows = Vec::with_capacity(specs.len());
    for spec in &specs {
        if !datasets.contains_key(spec.species) {
            datasets.insert(spec.species, cfg.dataset(spec.species)?);
        }
        let row = match evaluate_row(&datasets[spec.species], spec, opts) {
            Ok(r) => r,
            Err(
                e @ (TableError::Magic(_)
                | TableError::Scatter(_)
                | TableError::Stark(StarkError::Resonance { .. })),
            ) => {
                eprintln!(
                    "magictrap: {} {} {}: {e}",
                    spec.species, spec.excited, spec.pair.0
                );
                failed_row(spec)
            }
            Err(e) => return Err(e.into()),
        };
        rows.push(row);
    }
    let code = if rows.iter().any(|r| r.converged) {
        0
    } else {
        3
    };
    let text = match cfg.format(Format::Csv) {
        Format::Csv => {
            let meta = [("preset", name.to_string())];
            csv_text(
                &meta,
                &ROW_COLUMNS,
                &rows.iter().map(row_fields).collect::<Vec<_>>(),
            )?
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let mut m = row_json(r);
                    m.remove("schema_version");
                    Value::Object(m)
                })
                .collect();
            json_text(&json!({"schema_version": SCHEMA, "preset": name, "rows": rows}))
        }
    };
    Ok(Output { text, code })
}

fn cmd_zeeman(cfg: &RunConfig) -> Result<Output, Fail> {
    let ds = cfg.dataset(&cfg.species)?;
    let pair = cfg.pair(&ds)?;
    let (b0, k_m) = ZeemanContext::from_dataset(&ds)
        .find_magic_b(&pair)
        .map_err(numeric)?;
    match cfg.format(Format::Json) {
        Format::Json => ok(json_text(&json!({
            "schema_version": SCHEMA,
            "species": ds.species.name,
            "pair": pair.label(),
            "b0_gauss": num(b0),
            "k_m_hz_gauss2": num(k_m),
        }))),
        Format::Csv => ok(csv_text(
            &[],
            &["species", "pair", "b0_gauss", "k_m_hz_gauss2"],
            &[vec![
                ds.species.name.clone(),
                pair.label(),
                sig9(b0),
                sig9(k_m),
            ]],
        )?),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_coherence(
    cfg: &RunConfig,
    temperatures: &str,
    density: Density,
    phase: Phase,
    d_nu_mhz: Option<f64>,
    d_i_rel: Option<f64>,
    d_b_mg: Option<f64>,
) -> Result<Output, Fail> {
    let temps = parse_list(temperatures)?;
    if temps.is_empty() {
        return Err(usage("--temperatures must list at least one value"));
    }
    if let Some(t) = temps.iter().find(|t| !(**t > 0.0)) {
        return Err(usage(format!("temperature {t} μK is not positive")));
    }
    let (ds, pair, _, problem) = cfg.problem()?;
    let sol = problem.find_magic(None)?;
    if !sol.converged {
        return Err(numeric("magic-point solver did not converge"));
    }
    let k_e = k_e_from_k_i(sol.k_i, sol.i0, sol.trap_depth).map_err(numeric)?;
    let density = match density {
        Density::Printed => DensityModel::Printed,
        Density::Boltzmann => DensityModel::Boltzmann,
    };
    let phase = match phase {
        Phase::Radians => PhaseConvention::Radians,
        Phase::Cycles => PhaseConvention::Cycles,
    };
    let mut rows = Vec::with_capacity(temps.len());
    for &t in &temps {
        let ens = ThermalEnsemble::new(t, k_e, 0.0)
            .map_err(usage)?
            .with_density(density)
            .with_phase(phase);
        rows.push((t, ens.coherence_time().map_err(numeric)?));
    }
    let budget = match (d_nu_mhz, d_i_rel, d_b_mg) {
        (None, None, None) => None,
        (dn, di, db) => {
            let (_, k_m) = ZeemanContext::from_dataset(&ds)
                .find_magic_b(&pair)
                .map_err(numeric)?;
            let (dn, di, db) = (
                dn.unwrap_or(0.0) * MHZ,
                di.unwrap_or(0.0),
                db.unwrap_or(0.0) * 1e-3,
            );
            Some(sensitivity_budget(&sol, k_m, dn, di, db))
        }
    };
    let meta = [
        ("phase_convention", phase.label().to_string()),
        ("density", format!("{density:?}").to_lowercase()),
    ];
    match cfg.format(Format::Csv) {
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|&(t, t2)| vec![sig9(t), sig9(k_e), sig9(t2)])
                .collect();
            let mut text = csv_text(&meta, &["temperature_uk", "k_e_hz_uk2", "t2_s"], &body)?;
            if let Some(b) = budget {
                text.push_str("\nterm,dls_hz\n");
                for (k, v) in [
                    ("frequency", b.frequency),
                    ("intensity", b.intensity),
                    ("magnetic", b.magnetic),
                    ("total", b.total()),
                ] {
                    text.push_str(&format!("{k},{}\n", sig9(v)));
                }
            }
            ok(text)
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|&(t, t2)| json!({"temperature_uk": num(t), "k_e_hz_uk2": num(k_e), "t2_s": num(t2)}))
                .collect();
            let mut doc = json!({
                "schema_version": SCHEMA,
                "phase_convention": meta[0].1,
                "density": meta[1].1,
                "rows": rows,
            });
            if let Some(b) = budget {
                doc["sensitivity_hz"] = json!({
                    "frequency": num(b.frequency),
                    "intensity": num(b.intensity),
                    "magnetic": num(b.magnetic),
                    "total": num(b.total()),
                });
            }
            ok(json_text(&doc))
        }
    }
}

fn cmd_lines(cfg: &RunConfig) -> Result<Output, Fail> {
    let (ds, pair, excited, problem) = cfg.problem()?;
    let half = problem.engine.excited_centroid_hz.unwrap_or(0.0) / 2.0;
    let mut lines: Vec<(String, String, f64)> = problem
        .engine
        .degenerate_lines()
        .iter()
        .map(|&(n, f_e, nu)| {
            let g = if n == 0 { pair.g1 } else { pair.g2 };
            (g.f.to_string(), f_e.to_string(), nu - half)
        })
        .collect();
    lines.sort_by(|a, b| a.2.total_cmp(&b.2));
    let mut seps = Vec::new();
    for a in 0..lines.len() {
        for b in a + 1..lines.len() {
            seps.push((a, b, lines[b].2 - lines[a].2));
        }
    }
    let midpoint = problem.engine.line_midpoint().map(|m| m - half);
    match cfg.format(Format::Json) {
        Format::Json => {
            let ls: Vec<Value> = lines
                .iter()
                .map(|(fg, fe, d)| json!({"f_g": fg, "f_e": fe, "nu_rel_ghz": num(d / GHZ)}))
                .collect();
            let ss: Vec<Value> = seps
                .iter()
                .map(|&(a, b, d)| json!({"lines": [a, b], "separation_ghz": num(d / GHZ)}))
                .collect();
            ok(json_text(&json!({
                "schema_version": SCHEMA,
                "species": ds.species.name,
                "pair": pair.label(),
                "excited": excited.to_string(),
                "lines": ls,
                "separations": ss,
                "midpoint_rel_ghz": midpoint.map_or(Value::Null, |m| num(m / GHZ)),
            })))
        }
        Format::Csv => {
            let body: Vec<Vec<String>> = lines
                .iter()
                .map(|(fg, fe, d)| vec![fg.clone(), fe.clone(), sig9(d / GHZ)])
                .collect();
            ok(csv_text(&[], &["f_g", "f_e", "nu_rel_ghz"], &body)?)
        }
    }
}

fn run(cli: &Cli) -> Result<Output, Fail> {
    let cfg = &cli.run;
    match &cli.cmd {
        Cmd::Landscape {
            nu_ghz,
            i_gw,
            steps,
        } => cmd_landscape(cfg, nu_ghz, i_gw, *steps),
        Cmd::Magic => cmd_magic(cfg),
        Cmd::Table { preset } => cmd_table(cfg, preset),
        Cmd::Zeeman => cmd_zeeman(cfg),
        Cmd::Coherence {
            temperatures,
            density,
            phase,
            d_nu_mhz,
            d_i_rel,
            d_b_mg,
        } => cmd_coherence(
            cfg,
            temperatures,
            *density,
            *phase,
            *d_nu_mhz,
            *d_i_rel,
            *d_b_mg,
        ),
        Cmd::Lines => cmd_lines(cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("magictrap: {}", f.msg);
            return ExitCode::from(f.code);
        }
    };
    let written = match &cli.run.out {
        Some(path) => {
            std::fs::write(path, &out.text).map_err(|e| format!("{}: {e}", path.display()))
        }
        None => std::io::stdout()
            .write_all(out.text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("magictrap: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(out.code)
}
