//! One- and two-photon AC Stark shifts of ground hyperfine states in a
//! π-polarized trap of arbitrary spectral content.
//!
//! All hyperfine angular factors are resolved once into term tables
//! ([`StateTerms`]); evaluating a shift is then a cheap sum over those tables,
//! which is what the magic-point solver needs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angular::{dipole_element, Half};
use crate::atomdata::{AtomDataset, DataError, HyperfineState, LevelKey};
use crate::special::bessel_j;
use crate::units::{hz_to_microkelvin, hz_to_rad, rad_to_hz, C, EA0, EPS0, HBAR};

#[derive(Debug, Error)]
pub enum StarkError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("negative intensity {0} W/m²")]
    NegativeIntensity(f64),
    #[error("{what} detuned by only {detuning_hz:.3e} Hz (guard {guard_hz:.1e} Hz)")]
    Resonance {
        what: String,
        detuning_hz: f64,
        guard_hz: f64,
    },
    #[error("invalid spectrum: {0}")]
    Spectrum(String),
    #[error("invalid pair: {0}")]
    Pair(String),
}

/// E = a·√(2I/(cε₀)).
pub fn field_amplitude(intensity: f64, fraction: f64) -> Result<f64, StarkError> {
    if intensity < 0.0 {
        return Err(StarkError::NegativeIntensity(intensity));
    }
    Ok(fraction * (2.0 * intensity / (C * EPS0)).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapComponent {
    /// rad/s
    pub omega: f64,
    /// Field amplitude relative to the total; Σa² = 1 over a spectrum.
    pub amplitude: f64,
    /// ω − ω_ref, rad/s. Detunings are formed from this so that nearby
    /// evaluation points do not pick up rounding noise from the optical carrier.
    pub offset: f64,
}

impl TrapComponent {
    pub fn new(omega: f64, amplitude: f64) -> Self {
        TrapComponent {
            omega,
            amplitude,
            offset: omega,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapSpectrum {
    pub components: Vec<TrapComponent>,
    /// W/m²
    pub intensity: f64,
    /// ω_ref, rad/s
    pub reference: f64,
}

impl TrapSpectrum {
    pub fn new(components: Vec<TrapComponent>, intensity: f64) -> Result<Self, StarkError> {
        if components.is_empty() {
            return Err(StarkError::Spectrum("no components".into()));
        }
        if intensity < 0.0 {
            return Err(StarkError::NegativeIntensity(intensity));
        }
        let norm: f64 = components.iter().map(|c| c.amplitude * c.amplitude).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(StarkError::Spectrum(format!("Σa² = {norm}, expected 1")));
        }
        for (n, c) in components.iter().enumerate() {
            if !(c.amplitude > 0.0 && c.amplitude <= 1.0) || !(c.omega > 0.0) {
                return Err(StarkError::Spectrum(format!("component {n} out of range")));
            }
            if components[..n].iter().any(|o| o.offset == c.offset) {
                return Err(StarkError::Spectrum(
                    "component frequencies must be distinct".into(),
                ));
            }
        }
        Ok(TrapSpectrum {
            components,
            intensity,
            reference: 0.0,
        })
    }

    /// Components at `reference_hz` + offset (Hz) with the given amplitudes.
    pub fn relative(
        reference_hz: f64,
        parts: &[(f64, f64)],
        intensity: f64,
    ) -> Result<Self, StarkError> {
        let comps = parts
            .iter()
            .map(|&(off, amplitude)| TrapComponent {
                omega: hz_to_rad(reference_hz + off),
                amplitude,
                offset: hz_to_rad(off),
            })
            .collect();
        let mut s = Self::new(comps, intensity)?;
        s.reference = hz_to_rad(reference_hz);
        Ok(s)
    }

    pub fn monochromatic(nu_hz: f64, intensity: f64) -> Result<Self, StarkError> {
        Self::relative(nu_hz, &[(0.0, 1.0)], intensity)
    }

    /// Total field amplitude √(2I/(cε₀)).
    pub fn field(&self) -> f64 {
        (2.0 * self.intensity / (C * EPS0)).sqrt()
    }

    /// Fraction of power carried by each component.
    pub fn power_fractions(&self) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| c.amplitude * c.amplitude)
            .collect()
    }
}

/// Phase-modulated carrier: components at ν + nν_sb, |n| ≤ `max_order`, with
/// amplitudes Jₙ(depth) renormalized over the retained orders.
pub fn sideband_spectrum(
    carrier_hz: f64,
    modulation_hz: f64,
    depth: f64,
    intensity: f64,
    max_order: u32,
) -> Result<TrapSpectrum, StarkError> {
    sideband_spectrum_at(carrier_hz, 0.0, modulation_hz, depth, intensity, max_order)
}

/// [`sideband_spectrum`] with the carrier given as an offset from `reference_hz`.
pub fn sideband_spectrum_at(
    reference_hz: f64,
    carrier_offset_hz: f64,
    modulation_hz: f64,
    depth: f64,
    intensity: f64,
    max_order: u32,
) -> Result<TrapSpectrum, StarkError> {
    if depth < 0.0 {
        return Err(StarkError::Spectrum("negative modulation depth".into()));
    }
    if depth == 0.0 {
        return TrapSpectrum::relative(reference_hz, &[(carrier_offset_hz, 1.0)], intensity);
    }
    if !(modulation_hz > 0.0) {
        return Err(StarkError::Spectrum(
            "modulation frequency must be positive".into(),
        ));
    }
    let n = max_order as i32;
    let amps: Vec<(i32, f64)> = (-n..=n).map(|k| (k, bessel_j(k, depth))).collect();
    let kept: f64 = amps.iter().map(|(_, a)| a * a).sum();
    if 1.0 - kept > 0.01 {
        return Err(StarkError::Spectrum(format!(
            "orders beyond ±{max_order} carry {:.2}% of the power",
            100.0 * (1.0 - kept)
        )));
    }
    let parts: Vec<(f64, f64)> = amps
        .into_iter()
        .filter(|(_, a)| *a != 0.0)
        .map(|(k, a)| {
            (
                carrier_offset_hz + k as f64 * modulation_hz,
                a.abs() / kept.sqrt(),
            )
        })
        .collect();
    TrapSpectrum::relative(reference_hz, &parts, intensity)
}

/// Unrenormalized sideband power fractions Jₙ(β)² for n = 0…max_order.
pub fn sideband_powers(depth: f64, max_order: u32) -> Vec<f64> {
    (0..=max_order as i32)
        .map(|n| bessel_j(n, depth).powi(2))
        .collect()
}

/// Two beams at ν₀ ± Δν/2 sharing the intensity equally.
pub fn crossed_spectrum(
    center_hz: f64,
    split_hz: f64,
    intensity: f64,
) -> Result<TrapSpectrum, StarkError> {
    crossed_spectrum_at(center_hz, 0.0, split_hz, intensity)
}

/// [`crossed_spectrum`] with the centre given as an offset from `reference_hz`.
pub fn crossed_spectrum_at(
    reference_hz: f64,
    center_offset_hz: f64,
    split_hz: f64,
    intensity: f64,
) -> Result<TrapSpectrum, StarkError> {
    if !(split_hz > 0.0) {
        return Err(StarkError::Spectrum(
            "beam splitting must be positive".into(),
        ));
    }
    let a = 0.5f64.sqrt();
    let parts = [
        (center_offset_hz - split_hz / 2.0, a),
        (center_offset_hz + split_hz / 2.0, a),
    ];
    TrapSpectrum::relative(reference_hz, &parts, intensity)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum TppMode {
    /// ½(Δ − sgn Δ·√(Ω²+Δ²))
    #[default]
    Exact,
    /// −Ω²/(4Δ)
    Perturbative,
}

/// How the counter-rotating term enters the one-photon shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum CounterRotating {
    /// 1/(ω_ig−ω) − 1/(ω_ig+ω): the convention that reproduces the published tables.
    #[default]
    Reversed,
    /// 1/(ω_ig−ω) + 1/(ω_ig+ω): textbook second-order perturbation theory.
    Standard,
    /// Rotating-wave approximation only.
    Omitted,
}

impl CounterRotating {
    fn sign(self) -> f64 {
        match self {
            CounterRotating::Reversed => -1.0,
            CounterRotating::Standard => 1.0,
            CounterRotating::Omitted => 0.0,
        }
    }
}

/// Which excited hyperfine levels a degenerate (same-component) TPP may reach.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum DegenerateRule {
    /// Every F_e allowed by the dipole algebra.
    #[default]
    FullSum,
    /// Only F_e = F_g.
    SelectionGate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftOptions {
    pub tpp: TppMode,
    pub counter_rotating: CounterRotating,
    pub degenerate: DegenerateRule,
    /// Minimum |detuning| in Hz on every denominator.
    pub guard_hz: f64,
}

impl Default for ShiftOptions {
    fn default() -> Self {
        ShiftOptions {
            tpp: TppMode::Exact,
            counter_rotating: CounterRotating::Reversed,
            degenerate: DegenerateRule::FullSum,
            guard_hz: 1e6,
        }
    }
}

impl ShiftOptions {
    pub fn perturbative() -> Self {
        ShiftOptions {
            tpp: TppMode::Perturbative,
            ..Self::default()
        }
    }

    fn guard(&self, detuning: f64, what: impl FnOnce() -> String) -> Result<(), StarkError> {
        let d = rad_to_hz(detuning).abs();
        if d < self.guard_hz {
            return Err(StarkError::Resonance {
                what: what(),
                detuning_hz: d,
                guard_hz: self.guard_hz,
            });
        }
        Ok(())
    }
}

/// One intermediate hyperfine sublevel seen from a ground state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coupling {
    /// ω_i − ω_g, rad/s
    pub omega: f64,
    /// ⟨i|d₀|g⟩ in e·a₀
    pub d_lower: f64,
    /// ⟨e|d₀|i⟩ in e·a₀ (1 for one-photon terms)
    pub d_upper: f64,
}

/// All two-photon paths from one ground state to one excited hyperfine level.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    pub f_e: Half,
    /// ω_e − ω_g, rad/s
    pub omega: f64,
    pub paths: Vec<Coupling>,
}

/// Resolved term tables of one ground state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateTerms {
    pub state: HyperfineState,
    /// ω_g above the ground centroid, rad/s
    pub omega: f64,
    pub one_photon: Vec<Coupling>,
    pub channels: Vec<Channel>,
}

fn rabi_sq(field: f64, a: f64, d: f64) -> f64 {
    let o = a * field * d * EA0 / HBAR;
    o * o
}

impl StateTerms {
    /// Resolve the couplings of `state` to the one-photon level set and, if
    /// given, to every hyperfine level of `manifold` via shared intermediates.
    pub fn build(
        ds: &AtomDataset,
        state: HyperfineState,
        manifold: Option<LevelKey>,
    ) -> Result<Self, DataError> {
        let i = ds.nuclear_spin();
        let omega = ds.state_angular_frequency(state.level, state.f)?;
        let mut one_photon = Vec::new();
        for &k in &ds.one_photon_levels {
            if !ds.has_dipole(state.level, k) {
                continue;
            }
            for f in ds.level(k)?.f_values(i) {
                if state.m.abs() > f {
                    continue;
                }
                let mid = HyperfineState::new(k, f, state.m);
                let d = dipole_element(ds, &state, &mid, 0)?;
                if d != 0.0 {
                    let w = ds.state_angular_frequency(k, f)? - omega;
                    one_photon.push(Coupling {
                        omega: w,
                        d_lower: d,
                        d_upper: 1.0,
                    });
                }
            }
        }
        let mut channels = Vec::new();
        if let Some(e) = manifold {
            let ex = ds.level(e)?;
            let inter: Vec<LevelKey> = ds
                .neighbours(state.level)
                .filter(|&k| ds.has_dipole(k, e))
                .collect();
            for fe in ex.f_values(i) {
                if state.m.abs() > fe {
                    continue;
                }
                let top = HyperfineState::new(e, fe, state.m);
                let mut paths = Vec::new();
                for &k in &inter {
                    for f in ds.level(k)?.f_values(i) {
                        if state.m.abs() > f {
                            continue;
                        }
                        let mid = HyperfineState::new(k, f, state.m);
                        let d1 = dipole_element(ds, &state, &mid, 0)?;
                        let d2 = dipole_element(ds, &mid, &top, 0)?;
                        if d1 != 0.0 && d2 != 0.0 {
                            let w = ds.state_angular_frequency(k, f)? - omega;
                            paths.push(Coupling {
                                omega: w,
                                d_lower: d1,
                                d_upper: d2,
                            });
                        }
                    }
                }
                let w = ds.state_angular_frequency(e, fe)? - omega;
                channels.push(Channel {
                    f_e: fe,
                    omega: w,
                    paths,
                });
            }
        }
        Ok(StateTerms {
            state,
            omega,
            one_photon,
            channels,
        })
    }

    /// One-photon shift in Hz (physical sign: red detuning lowers the state).
    pub fn one_photon(&self, spec: &TrapSpectrum, opts: &ShiftOptions) -> Result<f64, StarkError> {
        let field = spec.field();
        let cr = opts.counter_rotating.sign();
        let mut total = 0.0;
        for c in &self.one_photon {
            let rel = c.omega - spec.reference;
            for comp in &spec.components {
                let det = rel - comp.offset;
                opts.guard(det, || {
                    format!(
                        "{} one-photon line at {:.6e} Hz",
                        self.state,
                        rad_to_hz(c.omega)
                    )
                })?;
                let o2 = rabi_sq(field, comp.amplitude, c.d_lower);
                total -= o2 / 4.0 * (1.0 / det + cr / (c.omega + comp.omega));
            }
        }
        Ok(rad_to_hz(total))
    }

    /// Effective two-photon Rabi frequency (rad/s) into `channel` for photons
    /// from components `a` and `b`, both time orderings, each with its own
    /// one-photon detuning. For a = b this is Σ Ω₁Ω₂/δ_i.
    pub fn tpp_rabi(
        &self,
        channel: &Channel,
        a: &TrapComponent,
        b: &TrapComponent,
        reference: f64,
        field: f64,
        opts: &ShiftOptions,
    ) -> Result<f64, StarkError> {
        let scale = a.amplitude * b.amplitude * (field * EA0 / HBAR).powi(2);
        let mut s = 0.0;
        for p in &channel.paths {
            let rel = p.omega - reference;
            let (da, db) = (rel - a.offset, rel - b.offset);
            opts.guard(da, || {
                format!(
                    "{} intermediate at {:.6e} Hz",
                    self.state,
                    rad_to_hz(p.omega)
                )
            })?;
            opts.guard(db, || {
                format!(
                    "{} intermediate at {:.6e} Hz",
                    self.state,
                    rad_to_hz(p.omega)
                )
            })?;
            s += p.d_lower * p.d_upper * (1.0 / (2.0 * da) + 1.0 / (2.0 * db));
        }
        Ok(scale * s)
    }

    fn gated(&self, channel: &Channel, same: bool, opts: &ShiftOptions) -> bool {
        same && opts.degenerate == DegenerateRule::SelectionGate && channel.f_e != self.state.f
    }

    /// Two-photon shift in Hz plus per-term diagnostics.
    pub fn two_photon(
        &self,
        spec: &TrapSpectrum,
        opts: &ShiftOptions,
    ) -> Result<(f64, Vec<TwoPhotonTerm>), StarkError> {
        let field = spec.field();
        let n = spec.components.len();
        let mut total = 0.0;
        let mut terms = Vec::new();
        for a in 0..n {
            for b in a..n {
                let (ca, cb) = (&spec.components[a], &spec.components[b]);
                for ch in &self.channels {
                    if self.gated(ch, a == b, opts) {
                        continue;
                    }
                    let rabi = self.tpp_rabi(ch, ca, cb, spec.reference, field, opts)?;
                    let det = (ch.omega - 2.0 * spec.reference) - (ca.offset + cb.offset);
                    opts.guard(det, || {
                        format!(
                            "{} two-photon line to F_e={} at {:.6e} Hz",
                            self.state,
                            ch.f_e,
                            rad_to_hz(ch.omega)
                        )
                    })?;
                    let shift = match opts.tpp {
                        // ½(Δ − sgn Δ·√(Ω²+Δ²)) without the cancellation for Ω ≪ |Δ|
                        TppMode::Exact => {
                            -det.signum() * rabi * rabi
                                / (2.0 * (det.abs() + (rabi * rabi + det * det).sqrt()))
                        }
                        TppMode::Perturbative => -rabi * rabi / (4.0 * det),
                    };
                    total += shift;
                    terms.push(TwoPhotonTerm {
                        f_e: ch.f_e,
                        components: (a, b),
                        rabi,
                        detuning: det,
                        shift_hz: rad_to_hz(shift),
                    });
                }
            }
        }
        Ok((rad_to_hz(total), terms))
    }

    /// Σ over channels and component pairs of (Ω_TPP/(2Δ_e))², the far-detuned
    /// steady-state excited population.
    pub fn excited_population(
        &self,
        spec: &TrapSpectrum,
        opts: &ShiftOptions,
    ) -> Result<f64, StarkError> {
        let (_, terms) = self.two_photon(spec, opts)?;
        Ok(terms
            .iter()
            .map(|t| (t.rabi / (2.0 * t.detuning)).powi(2))
            .sum())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoPhotonTerm {
    pub f_e: Half,
    pub components: (usize, usize),
    /// rad/s
    pub rabi: f64,
    /// rad/s
    pub detuning: f64,
    pub shift_hz: f64,
}

/// Lower/upper clock states (F_low, m) and (F_high, m′) of the ground level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundStatePair {
    pub g1: HyperfineState,
    pub g2: HyperfineState,
}

impl GroundStatePair {
    pub fn new(ds: &AtomDataset, m1: i32, m2: i32) -> Result<Self, StarkError> {
        let i = ds.nuclear_spin();
        let g = ds.species.ground;
        let (f1, f2) = (i - Half::HALF, i + Half::HALF);
        let (m1, m2) = (Half::int(m1), Half::int(m2));
        if m1.abs() > f1 || m2.abs() > f2 {
            return Err(StarkError::Pair(format!(
                "({m1},{m2}) not allowed for F = {f1}, {f2}"
            )));
        }
        Ok(GroundStatePair {
            g1: HyperfineState::new(g, f1, m1),
            g2: HyperfineState::new(g, f2, m2),
        })
    }

    pub fn clock(ds: &AtomDataset) -> Self {
        Self::new(ds, 0, 0).expect("m = 0 always allowed")
    }

    pub fn label(&self) -> String {
        format!("({},{})", self.g1.m, self.g2.m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftBreakdown {
    pub one_photon_g1: f64,
    pub one_photon_g2: f64,
    pub two_photon_g1: f64,
    pub two_photon_g2: f64,
    pub dls_total: f64,
    /// Some two-photon term has |Δ_e| < 10·Ω_TPP.
    pub near_resonance: bool,
    pub terms_g1: Vec<TwoPhotonTerm>,
    pub terms_g2: Vec<TwoPhotonTerm>,
}

impl ShiftBreakdown {
    pub fn total_g1(&self) -> f64 {
        self.one_photon_g1 + self.two_photon_g1
    }

    pub fn total_g2(&self) -> f64 {
        self.one_photon_g2 + self.two_photon_g2
    }

    /// Mean clock-state shift as a temperature (μK); negative = attractive.
    pub fn trap_depth_uk(&self) -> f64 {
        hz_to_microkelvin(0.5 * (self.total_g1() + self.total_g2()))
    }
}

/// Prepared shift evaluator for one ground-state pair and excited manifold.
#[derive(Clone, Debug)]
pub struct ShiftEngine {
    pub t1: StateTerms,
    pub t2: StateTerms,
    pub opts: ShiftOptions,
    /// Excited fine-level centroid above the ground centroid, Hz.
    pub excited_centroid_hz: Option<f64>,
}

impl ShiftEngine {
    pub fn new(
        ds: &AtomDataset,
        pair: GroundStatePair,
        manifold: Option<LevelKey>,
        opts: ShiftOptions,
    ) -> Result<Self, StarkError> {
        let excited_centroid_hz = match manifold {
            Some(e) => Some(ds.level(e)?.energy_hz()),
            None => None,
        };
        Ok(ShiftEngine {
            t1: StateTerms::build(ds, pair.g1, manifold)?,
            t2: StateTerms::build(ds, pair.g2, manifold)?,
            opts,
            excited_centroid_hz,
        })
    }

    pub fn from_terms(t1: StateTerms, t2: StateTerms, opts: ShiftOptions) -> Self {
        ShiftEngine {
            t1,
            t2,
            opts,
            excited_centroid_hz: None,
        }
    }

    pub fn with_options(&self, opts: ShiftOptions) -> Self {
        ShiftEngine {
            opts,
            ..self.clone()
        }
    }

    pub fn breakdown(&self, spec: &TrapSpectrum) -> Result<ShiftBreakdown, StarkError> {
        let o = &self.opts;
        let one_photon_g1 = self.t1.one_photon(spec, o)?;
        let one_photon_g2 = self.t2.one_photon(spec, o)?;
        let (two_photon_g1, terms_g1) = self.t1.two_photon(spec, o)?;
        let (two_photon_g2, terms_g2) = self.t2.two_photon(spec, o)?;
        let near_resonance = terms_g1
            .iter()
            .chain(&terms_g2)
            .any(|t| t.rabi != 0.0 && t.detuning.abs() < 10.0 * t.rabi.abs());
        Ok(ShiftBreakdown {
            one_photon_g1,
            one_photon_g2,
            two_photon_g1,
            two_photon_g2,
            dls_total: (one_photon_g2 + two_photon_g2) - (one_photon_g1 + two_photon_g1),
            near_resonance,
            terms_g1,
            terms_g2,
        })
    }

    /// Total differential light shift Δ⁽ᵀ⁾_DLS, Hz.
    pub fn dls(&self, spec: &TrapSpectrum) -> Result<f64, StarkError> {
        let o = &self.opts;
        let s1 = self.t1.one_photon(spec, o)? + self.t1.two_photon(spec, o)?.0;
        let s2 = self.t2.one_photon(spec, o)? + self.t2.two_photon(spec, o)?.0;
        Ok(s2 - s1)
    }

    pub fn trap_depth_uk(&self, spec: &TrapSpectrum) -> Result<f64, StarkError> {
        Ok(self.breakdown(spec)?.trap_depth_uk())
    }

    /// Laser frequencies (Hz) of the degenerate two-photon lines with a
    /// non-vanishing amplitude, tagged (state index, F_e).
    pub fn degenerate_lines(&self) -> Vec<(usize, Half, f64)> {
        let mut out = Vec::new();
        for (n, t) in [&self.t1, &self.t2].into_iter().enumerate() {
            for ch in &t.channels {
                if t.gated(ch, true, &self.opts) {
                    continue;
                }
                let w = ch.omega / 2.0;
                let terms = ch
                    .paths
                    .iter()
                    .map(|p| p.d_lower * p.d_upper / (p.omega - w));
                let (sum, size) = terms.fold((0.0, 0.0f64), |(s, m), x| (s + x, m.max(x.abs())));
                if size > 0.0 && sum.abs() > 1e-9 * size {
                    out.push((n, ch.f_e, rad_to_hz(w)));
                }
            }
        }
        out
    }

    /// Midpoint of the F_low↔F_low and F_high↔F_high degenerate lines, Hz.
    pub fn line_midpoint(&self) -> Option<f64> {
        let line = |t: &StateTerms| {
            t.channels
                .iter()
                .find(|c| c.f_e == t.state.f)
                .map(|c| rad_to_hz(c.omega) / 2.0)
        };
        Some(0.5 * (line(&self.t1)? + line(&self.t2)?))
    }

    /// Largest |⟨e|d|i⟩| over all two-photon paths, e·a₀.
    pub fn dominant_upper_dipole(&self) -> f64 {
        [&self.t1, &self.t2]
            .iter()
            .flat_map(|t| t.channels.iter().flat_map(|c| c.paths.iter()))
            .map(|p| p.d_upper.abs())
            .fold(0.0, f64::max)
    }

    /// Ground-state splitting seen by the pair, rad/s.
    pub fn ground_splitting(&self) -> f64 {
        self.t2.omega - self.t1.omega
    }
}

/// One-photon shift of a single state in Hz.
pub fn one_photon_shift(
    ds: &AtomDataset,
    state: HyperfineState,
    spec: &TrapSpectrum,
    opts: &ShiftOptions,
) -> Result<f64, StarkError> {
    StateTerms::build(ds, state, None)?.one_photon(spec, opts)
}

/// Two-photon shift of a single state into `manifold`, Hz.
pub fn two_photon_shift(
    ds: &AtomDataset,
    state: HyperfineState,
    spec: &TrapSpectrum,
    manifold: LevelKey,
    opts: &ShiftOptions,
) -> Result<f64, StarkError> {
    Ok(StateTerms::build(ds, state, Some(manifold))?
        .two_photon(spec, opts)?
        .0)
}

/// Effective two-photon Rabi frequency (rad/s) from `ground` to `excited`.
/// Identical components take the degenerate form, subject to `opts.degenerate`.
/// Component offsets are taken relative to zero (as built by [`TrapComponent::new`]).
pub fn tpp_rabi(
    ds: &AtomDataset,
    ground: HyperfineState,
    excited: HyperfineState,
    a: &TrapComponent,
    b: &TrapComponent,
    intensity: f64,
    opts: &ShiftOptions,
) -> Result<f64, StarkError> {
    if excited.m != ground.m {
        return Ok(0.0);
    }
    let t = StateTerms::build(ds, ground, Some(excited.level))?;
    let Some(ch) = t.channels.iter().find(|c| c.f_e == excited.f) else {
        return Ok(0.0);
    };
    if t.gated(ch, a == b, opts) {
        return Ok(0.0);
    }
    t.tpp_rabi(ch, a, b, 0.0, field_amplitude(intensity, 1.0)?, opts)
}

pub fn total_dls(
    ds: &AtomDataset,
    pair: GroundStatePair,
    spec: &TrapSpectrum,
    manifold: LevelKey,
    opts: ShiftOptions,
) -> Result<ShiftBreakdown, StarkError> {
    ShiftEngine::new(ds, pair, Some(manifold), opts)?.breakdown(spec)
}

pub fn trap_depth(
    ds: &AtomDataset,
    pair: GroundStatePair,
    spec: &TrapSpectrum,
    manifold: LevelKey,
    opts: ShiftOptions,
) -> Result<f64, StarkError> {
    Ok(total_dls(ds, pair, spec, manifold, opts)?.trap_depth_uk())
}
