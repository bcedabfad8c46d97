//! Atomic-structure database: species metadata, fine levels with hyperfine
//! constants, and reduced dipole matrix elements, loaded from the plain-text
//! tables under `data/<species>/`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angular::Half;
use crate::units::{cm1_to_hz, hz_to_rad, MHZ};

pub const SCHEMA: u32 = 1;
pub const DATA_ENV: &str = "MAGICTRAP_DATA";

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: schema version {found}, expected {SCHEMA}")]
    Schema { path: PathBuf, found: String },
    #[error("{path}:{line}: {msg}")]
    Malformed {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("unknown level {0}")]
    UnknownLevel(String),
    #[error("F = {f} not allowed for J = {j}, I = {i}")]
    BadF { f: Half, j: Half, i: Half },
    #[error("no reduced dipole between {0} and {1}")]
    NoDipole(LevelKey, LevelKey),
}

/// Directory holding the shipped tables: `$MAGICTRAP_DATA` if set, else the
/// `data/` directory of this source tree.
pub fn default_data_dir() -> PathBuf {
    std::env::var_os(DATA_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

/// Identifies a fine-structure level, printed like `6P3_2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct LevelKey {
    pub n: u8,
    pub l: u8,
    pub j: Half,
}

const ORBITALS: [char; 4] = ['S', 'P', 'D', 'F'];

impl LevelKey {
    pub fn new(n: u8, l: u8, j: Half) -> Self {
        LevelKey { n, l, j }
    }
}

impl fmt::Display for LevelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}{}_2",
            self.n,
            ORBITALS[self.l as usize],
            self.j.twice()
        )
    }
}

fn orbital(c: char) -> Option<u8> {
    ORBITALS
        .iter()
        .position(|&o| o == c.to_ascii_uppercase())
        .map(|p| p as u8)
}

impl FromStr for LevelKey {
    type Err = DataError;
    fn from_str(s: &str) -> Result<Self, DataError> {
        let bad = || DataError::UnknownLevel(s.to_string());
        let pos = s.find(|c: char| c.is_ascii_alphabetic()).ok_or_else(bad)?;
        let n = s[..pos].parse().map_err(|_| bad())?;
        let mut rest = s[pos..].chars();
        let l = rest.next().and_then(orbital).ok_or_else(bad)?;
        let j: Half = rest.as_str().parse().map_err(|_| bad())?;
        if j.is_integer() {
            return Err(bad());
        }
        Ok(LevelKey { n, l, j })
    }
}

impl From<LevelKey> for String {
    fn from(k: LevelKey) -> String {
        k.to_string()
    }
}

impl TryFrom<String> for LevelKey {
    type Error = DataError;
    fn try_from(s: String) -> Result<Self, DataError> {
        s.parse()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomSpecies {
    pub name: String,
    pub nuclear_spin: Half,
    pub delta_hpf_hz: f64,
    pub g_i: f64,
    pub mass_kg: f64,
    pub ground: LevelKey,
    /// Provenance tags for values not taken from the level/dipole tables.
    pub sources: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FineLevel {
    pub key: LevelKey,
    pub energy_cm1: f64,
    pub a_mhz: f64,
    pub b_mhz: f64,
}

impl FineLevel {
    pub fn energy_hz(&self) -> f64 {
        cm1_to_hz(self.energy_cm1)
    }

    /// Allowed hyperfine F values for nuclear spin `i`.
    pub fn f_values(&self, i: Half) -> impl Iterator<Item = Half> {
        Half::couple(self.key.j, i)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedDipole {
    pub lower: LevelKey,
    pub upper: LevelKey,
    pub d_ea0: f64,
    pub source: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HyperfineState {
    pub level: LevelKey,
    pub f: Half,
    pub m: Half,
}

impl HyperfineState {
    pub fn new(level: LevelKey, f: Half, m: Half) -> Self {
        HyperfineState { level, f, m }
    }
}

impl fmt::Display for HyperfineState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} F={} m={}", self.level, self.f, self.m)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawDataset")]
pub struct AtomDataset {
    pub species: AtomSpecies,
    pub levels: Vec<FineLevel>,
    pub dipoles: Vec<ReducedDipole>,
    pub one_photon_levels: Vec<LevelKey>,
    #[serde(skip)]
    index: HashMap<LevelKey, usize>,
    #[serde(skip)]
    dipole_index: HashMap<(LevelKey, LevelKey), usize>,
}

#[derive(Deserialize)]
struct RawDataset {
    species: AtomSpecies,
    levels: Vec<FineLevel>,
    dipoles: Vec<ReducedDipole>,
    one_photon_levels: Vec<LevelKey>,
}

impl TryFrom<RawDataset> for AtomDataset {
    type Error = DataError;
    fn try_from(r: RawDataset) -> Result<Self, DataError> {
        AtomDataset::with_one_photon_levels(r.species, r.levels, r.dipoles, r.one_photon_levels)
    }
}

impl PartialEq for AtomDataset {
    fn eq(&self, o: &Self) -> bool {
        self.species == o.species
            && self.levels == o.levels
            && self.dipoles == o.dipoles
            && self.one_photon_levels == o.one_photon_levels
    }
}

fn hf_energy(a: f64, b: f64, j: Half, i: Half, f: Half) -> f64 {
    let (jj, ii, ff) = (j.casimir(), i.casimir(), f.casimir());
    let k = ff - ii - jj;
    let mut e = a * k / 2.0;
    if j.twice() > 1 && i.twice() > 1 {
        let (jv, iv) = (j.value(), i.value());
        e += b * (1.5 * k * (k + 1.0) - 2.0 * ii * jj)
            / (4.0 * iv * (2.0 * iv - 1.0) * jv * (2.0 * jv - 1.0));
    }
    e
}

impl AtomDataset {
    /// Assemble and validate a dataset from its parts.
    pub fn new(
        species: AtomSpecies,
        levels: Vec<FineLevel>,
        dipoles: Vec<ReducedDipole>,
    ) -> Result<Self, DataError> {
        let first_n = if species.name.starts_with("cs") { 6 } else { 5 };
        let one_photon_levels = levels
            .iter()
            .filter(|l| l.key.l == 1 && (first_n..first_n + 9).contains(&l.key.n))
            .map(|l| l.key)
            .collect();
        Self::with_one_photon_levels(species, levels, dipoles, one_photon_levels)
    }

    pub fn with_one_photon_levels(
        species: AtomSpecies,
        levels: Vec<FineLevel>,
        dipoles: Vec<ReducedDipole>,
        one_photon_levels: Vec<LevelKey>,
    ) -> Result<Self, DataError> {
        let mut ds = AtomDataset {
            species,
            levels,
            dipoles,
            one_photon_levels,
            index: HashMap::new(),
            dipole_index: HashMap::new(),
        };
        ds.reindex();
        ds.validate()?;
        Ok(ds)
    }

    fn reindex(&mut self) {
        self.index = self
            .levels
            .iter()
            .enumerate()
            .map(|(n, l)| (l.key, n))
            .collect();
        self.dipole_index.clear();
        for (n, d) in self.dipoles.iter().enumerate() {
            self.dipole_index.insert((d.lower, d.upper), n);
            self.dipole_index.insert((d.upper, d.lower), n);
        }
    }

    fn validate(&self) -> Result<(), DataError> {
        let inv = |m: String| Err(DataError::Invariant(m));
        let i = self.species.nuclear_spin;
        if i.twice() <= 0 || i.is_integer() {
            return inv(format!(
                "nuclear spin {i} must be a positive half-odd integer"
            ));
        }
        if !(self.species.delta_hpf_hz > 0.0) {
            return inv("delta_hpf_hz must be positive".into());
        }
        if self.index.len() != self.levels.len() {
            return inv("duplicate level key".into());
        }
        for l in &self.levels {
            let (lv, j) = (2 * l.key.l as i32, l.key.j.twice());
            if (lv - j).abs() != 1 {
                return inv(format!("{}: |L−J| ≠ 1/2", l.key));
            }
            if !(l.energy_cm1 >= 0.0) {
                return inv(format!("{}: negative energy", l.key));
            }
            if (l.key.j.twice() == 1 || i.twice() == 1) && l.b_mhz != 0.0 {
                return inv(format!(
                    "{}: quadrupole constant must vanish for J = 1/2",
                    l.key
                ));
            }
        }
        let ground = self.level(self.species.ground)?;
        if ground.energy_cm1 != 0.0 {
            return inv(format!("ground level {} has nonzero energy", ground.key));
        }
        let mut seen = HashSet::new();
        for d in &self.dipoles {
            for end in [d.lower, d.upper] {
                if !self.index.contains_key(&end) {
                    return inv(format!(
                        "dipole {} – {} has orphan endpoint {end}",
                        d.lower, d.upper
                    ));
                }
            }
            if !(d.d_ea0 > 0.0) {
                return inv(format!("dipole {} – {} must be positive", d.lower, d.upper));
            }
            if self.level(d.lower)?.energy_cm1 >= self.level(d.upper)?.energy_cm1 {
                return inv(format!(
                    "dipole {} – {} is not ordered lower → upper",
                    d.lower, d.upper
                ));
            }
            if (d.lower.l as i32 - d.upper.l as i32).abs() != 1 {
                return inv(format!(
                    "dipole {} – {} violates |ΔL| = 1",
                    d.lower, d.upper
                ));
            }
            let key = if d.lower < d.upper {
                (d.lower, d.upper)
            } else {
                (d.upper, d.lower)
            };
            if !seen.insert(key) {
                return inv(format!("dipole {} – {} listed twice", d.lower, d.upper));
            }
        }
        for k in &self.one_photon_levels {
            self.level(*k)?;
        }
        // ground splitting = (I + 1/2)·A for a J = 1/2 ground level
        let split = ground.a_mhz * MHZ * (i.value() + 0.5);
        if ((split - self.species.delta_hpf_hz) / self.species.delta_hpf_hz).abs() > 1e-6 {
            return inv(format!(
                "ground hyperfine splitting {split} Hz from A disagrees with delta_hpf {} Hz",
                self.species.delta_hpf_hz
            ));
        }
        Ok(())
    }

    pub fn nuclear_spin(&self) -> Half {
        self.species.nuclear_spin
    }

    pub fn ground(&self) -> &FineLevel {
        &self.levels[self.index[&self.species.ground]]
    }

    pub fn level(&self, key: LevelKey) -> Result<&FineLevel, DataError> {
        self.index
            .get(&key)
            .map(|&n| &self.levels[n])
            .ok_or_else(|| DataError::UnknownLevel(key.to_string()))
    }

    pub fn level_by_name(&self, name: &str) -> Result<&FineLevel, DataError> {
        self.level(name.parse()?)
    }

    /// Signed fine-structure reduced element ⟨a‖d‖b⟩ (e·a₀). The table stores
    /// ⟨lower‖d‖upper⟩; the reverse order picks up (−1)^{J_a−J_b}.
    pub fn reduced(&self, a: LevelKey, b: LevelKey) -> Option<f64> {
        let d = &self.dipoles[*self.dipole_index.get(&(a, b))?];
        let even = ((a.j.twice() - b.j.twice()) / 2).rem_euclid(2) == 0;
        Some(if d.lower == a || even {
            d.d_ea0
        } else {
            -d.d_ea0
        })
    }

    pub fn has_dipole(&self, a: LevelKey, b: LevelKey) -> bool {
        self.dipole_index.contains_key(&(a, b))
    }

    /// Levels with a dipole to `key`.
    pub fn neighbours(&self, key: LevelKey) -> impl Iterator<Item = LevelKey> + '_ {
        self.levels
            .iter()
            .map(|l| l.key)
            .filter(move |&k| self.has_dipole(key, k))
    }

    /// Hyperfine energy offset from the level centroid, Hz.
    pub fn hyperfine_shift(&self, key: LevelKey, f: Half) -> Result<f64, DataError> {
        let l = self.level(key)?;
        hyperfine_shift(l, f, self.nuclear_spin())
    }

    /// Angular frequency of a hyperfine state above the ground centroid.
    pub fn state_angular_frequency(&self, key: LevelKey, f: Half) -> Result<f64, DataError> {
        let l = self.level(key)?;
        Ok(hz_to_rad(
            l.energy_hz() + hyperfine_shift(l, f, self.nuclear_spin())?,
        ))
    }

    pub fn transition_angular_frequency(
        &self,
        lower: &HyperfineState,
        upper: &HyperfineState,
    ) -> Result<f64, DataError> {
        let a = self.state_angular_frequency(lower.level, lower.f)?;
        let b = self.state_angular_frequency(upper.level, upper.f)?;
        Ok(b - a)
    }

    /// Write the three tables into `dir` so that [`load_dataset`] reproduces
    /// this dataset bit for bit.
    pub fn write_tables(&self, dir: &Path) -> Result<(), DataError> {
        let io = |path: PathBuf| {
            move |source| DataError::Io {
                path: path.clone(),
                source,
            }
        };
        fs::create_dir_all(dir).map_err(io(dir.to_path_buf()))?;
        let s = &self.species;
        let mut out = format!(
            "schema={SCHEMA}\nname={}\nnuclear_spin={}\ndelta_hpf_hz={:?}\ng_i={:?}\nmass_kg={:?}\nground={}\n",
            s.name, s.nuclear_spin, s.delta_hpf_hz, s.g_i, s.mass_kg, s.ground
        );
        for (k, v) in &s.sources {
            out += &format!("{k}_source={v}\n");
        }
        let p = dir.join("species.tbl");
        fs::write(&p, out).map_err(io(p.clone()))?;
        let mut out = String::from("n L J energy_cm1 A_mhz B_mhz\n");
        for l in &self.levels {
            out += &format!(
                "{} {} {} {:?} {:?} {:?}\n",
                l.key.n, ORBITALS[l.key.l as usize], l.key.j, l.energy_cm1, l.a_mhz, l.b_mhz
            );
        }
        let p = dir.join("levels.tbl");
        fs::write(&p, out).map_err(io(p.clone()))?;
        let mut out = String::from("lower upper d_ea0 source\n");
        for d in &self.dipoles {
            out += &format!("{} {} {:?} {}\n", d.lower, d.upper, d.d_ea0, d.source);
        }
        let p = dir.join("dipoles.tbl");
        fs::write(&p, out).map_err(io(p.clone()))
    }
}

/// Standard magnetic-dipole + electric-quadrupole hyperfine energy (Hz).
pub fn hyperfine_shift(level: &FineLevel, f: Half, i: Half) -> Result<f64, DataError> {
    let j = level.key.j;
    if !level.f_values(i).any(|x| x == f) {
        return Err(DataError::BadF { f, j, i });
    }
    Ok(hf_energy(level.a_mhz, level.b_mhz, j, i, f) * MHZ)
}

struct Table {
    path: PathBuf,
    rows: Vec<(usize, Vec<String>)>,
}

fn read(path: &Path) -> Result<String, DataError> {
    fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn read_table(path: &Path, header: &[&str]) -> Result<Table, DataError> {
    let text = read(path)?;
    let mut lines = content_lines(&text);
    let malformed = |line, msg: String| DataError::Malformed {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let (hl, h) = lines
        .next()
        .ok_or_else(|| malformed(0, "missing header".into()))?;
    let cols: Vec<&str> = h.split_whitespace().collect();
    if cols != header {
        return Err(malformed(
            hl,
            format!("header {cols:?}, expected {header:?}"),
        ));
    }
    let mut rows = Vec::new();
    for (n, l) in lines {
        let f: Vec<String> = l.split_whitespace().map(str::to_string).collect();
        if f.len() != header.len() {
            return Err(malformed(
                n,
                format!("{} fields, expected {}", f.len(), header.len()),
            ));
        }
        rows.push((n, f));
    }
    Ok(Table {
        path: path.to_path_buf(),
        rows,
    })
}

impl Table {
    fn err(&self, line: usize, msg: impl Into<String>) -> DataError {
        DataError::Malformed {
            path: self.path.clone(),
            line,
            msg: msg.into(),
        }
    }

    fn num(&self, line: usize, s: &str) -> Result<f64, DataError> {
        s.parse::<f64>()
            .map_err(|_| self.err(line, format!("bad number {s:?}")))
    }
}

fn load_species(path: &Path) -> Result<AtomSpecies, DataError> {
    let text = read(path)?;
    let mut kv = BTreeMap::new();
    for (n, l) in content_lines(&text) {
        let (k, v) = l.split_once('=').ok_or_else(|| DataError::Malformed {
            path: path.to_path_buf(),
            line: n,
            msg: "expected key=value".into(),
        })?;
        kv.insert(k.trim().to_string(), (n, v.trim().to_string()));
    }
    let get = |k: &str| {
        kv.get(k).cloned().ok_or_else(|| DataError::Malformed {
            path: path.to_path_buf(),
            line: 0,
            msg: format!("missing key {k}"),
        })
    };
    let num = |k: &str| -> Result<f64, DataError> {
        let (n, v) = get(k)?;
        v.parse().map_err(|_| DataError::Malformed {
            path: path.to_path_buf(),
            line: n,
            msg: format!("bad number for {k}"),
        })
    };
    let (_, schema) = get("schema")?;
    if schema != SCHEMA.to_string() {
        return Err(DataError::Schema {
            path: path.to_path_buf(),
            found: schema,
        });
    }
    let (sn, spin) = get("nuclear_spin")?;
    let nuclear_spin = spin.parse().map_err(|_| DataError::Malformed {
        path: path.to_path_buf(),
        line: sn,
        msg: "bad nuclear_spin".into(),
    })?;
    let sources = kv
        .iter()
        .filter_map(|(k, (_, v))| {
            k.strip_suffix("_source")
                .map(|k| (k.to_string(), v.clone()))
        })
        .collect();
    Ok(AtomSpecies {
        name: get("name")?.1,
        nuclear_spin,
        delta_hpf_hz: num("delta_hpf_hz")?,
        g_i: num("g_i")?,
        mass_kg: num("mass_kg")?,
        ground: get("ground")?.1.parse()?,
        sources,
    })
}

/// Load and validate `<dir>/<species>/{species,levels,dipoles}.tbl`.
pub fn load_dataset(dir: impl AsRef<Path>, species: &str) -> Result<AtomDataset, DataError> {
    let root = dir.as_ref().join(species);
    let sp = load_species(&root.join("species.tbl"))?;

    let t = read_table(
        &root.join("levels.tbl"),
        &["n", "L", "J", "energy_cm1", "A_mhz", "B_mhz"],
    )?;
    let mut levels = Vec::with_capacity(t.rows.len());
    for (n, f) in &t.rows {
        let pn = f[0]
            .parse()
            .map_err(|_| t.err(*n, "bad principal quantum number"))?;
        let l = f[1]
            .chars()
            .next()
            .and_then(orbital)
            .filter(|_| f[1].len() == 1);
        let l = l.ok_or_else(|| t.err(*n, format!("bad orbital {:?}", f[1])))?;
        let j: Half = f[2]
            .parse()
            .map_err(|_| t.err(*n, format!("bad J {:?}", f[2])))?;
        levels.push(FineLevel {
            key: LevelKey::new(pn, l, j),
            energy_cm1: t.num(*n, &f[3])?,
            a_mhz: t.num(*n, &f[4])?,
            b_mhz: t.num(*n, &f[5])?,
        });
    }

    let t = read_table(
        &root.join("dipoles.tbl"),
        &["lower", "upper", "d_ea0", "source"],
    )?;
    let mut dipoles = Vec::with_capacity(t.rows.len());
    for (n, f) in &t.rows {
        let key = |s: &str| {
            s.parse::<LevelKey>()
                .map_err(|_| t.err(*n, format!("bad level key {s:?}")))
        };
        dipoles.push(ReducedDipole {
            lower: key(&f[0])?,
            upper: key(&f[1])?,
            d_ea0: t.num(*n, &f[2])?,
            source: f[3].clone(),
        });
    }
    AtomDataset::new(sp, levels, dipoles)
}
