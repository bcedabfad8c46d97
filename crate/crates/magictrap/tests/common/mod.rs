//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use std::f64::consts::PI;

use magictrap::angular::Half;
use magictrap::atomdata::{AtomDataset, HyperfineState, LevelKey};
use magictrap::stark::{
    Channel, CounterRotating, Coupling, ShiftEngine, ShiftOptions, StateTerms, TppMode,
};
use magictrap::units::{C, EA0, EPS0, HBAR};

/// (−1)^(t/2) for a doubled integer t.
pub fn sign(t: i32) -> f64 {
    if (t / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn fact(n: i32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Clebsch–Gordan ⟨j1 m1; j2 m2 | J M⟩ from the Racah sum; all arguments doubled.
pub fn cg(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> f64 {
    if m1 + m2 != m
        || m1.abs() > j1
        || m2.abs() > j2
        || m.abs() > j
        || j > j1 + j2
        || j < (j1 - j2).abs()
    {
        return 0.0;
    }
    let f = |t: i32| fact(t / 2);
    let pre = (f64::from(j + 1) * f(j + j1 - j2) * f(j - j1 + j2) * f(j1 + j2 - j)
        / f(j1 + j2 + j + 2))
    .sqrt()
        * (f(j + m) * f(j - m) * f(j1 - m1) * f(j1 + m1) * f(j2 - m2) * f(j2 + m2)).sqrt();
    let mut s = 0.0;
    for k in 0..=(j1 + j2) / 2 {
        let k2 = 2 * k;
        let args = [
            j1 + j2 - j - k2,
            j1 - m1 - k2,
            j2 + m2 - k2,
            j - j2 + m1 + k2,
            j - j1 - m2 + k2,
        ];
        if args.iter().any(|&a| a < 0) {
            continue;
        }
        let den: f64 = fact(k) * args.iter().map(|&a| f(a)).product::<f64>();
        s += if k % 2 == 0 { 1.0 } else { -1.0 } / den;
    }
    pre * s
}

/// 3j through the Clebsch–Gordan oracle; doubled arguments.
pub fn w3_oracle(j: [i32; 3], m: [i32; 3]) -> f64 {
    sign(j[0] - j[1] - m[2]) / f64::from(j[2] + 1).sqrt() * cg(j[0], m[0], j[1], m[1], j[2], -m[2])
}

/// ⟨to|d_p|from⟩ expanded in |J m_J⟩|I m_I⟩ with fine-structure Wigner–Eckart.
pub fn uncoupled_element(
    ds: &AtomDataset,
    from: &HyperfineState,
    to: &HyperfineState,
    p: i32,
) -> f64 {
    let i = ds.nuclear_spin().twice();
    let (jt, jf) = (to.level.j.twice(), from.level.j.twice());
    let red = ds.reduced(to.level, from.level).unwrap();
    let (ft, mt, ff, mf) = (to.f.twice(), to.m.twice(), from.f.twice(), from.m.twice());
    let mut s = 0.0;
    for x in 0..=i {
        let mi = 2 * x - i;
        let (mjt, mjf) = (mt - mi, mf - mi);
        if mjt.abs() > jt || mjf.abs() > jf {
            continue;
        }
        let a = cg(jt, mjt, i, mi, ft, mt) * cg(jf, mjf, i, mi, ff, mf);
        if a != 0.0 {
            s += a * sign(jt - mjt) * w3_oracle([jt, 2, jf], [-mjt, 2 * p, mjf]);
        }
    }
    red * s
}

pub fn ground(f: i32) -> HyperfineState {
    HyperfineState::new(LevelKey::new(6, 0, Half::HALF), Half::int(f), Half::ZERO)
}

/// Peak field (V/m) of a beam of intensity I.
pub fn field(intensity: f64) -> f64 {
    (2.0 * intensity / (C * EPS0)).sqrt()
}

pub fn opts(cr: CounterRotating, tpp: TppMode) -> ShiftOptions {
    ShiftOptions {
        counter_rotating: cr,
        tpp,
        ..ShiftOptions::default()
    }
}

/// A ground state with a single one-photon partner ω₀ above it.
pub fn two_level(omega0: f64, d_ea0: f64) -> StateTerms {
    StateTerms {
        state: ground(3),
        omega: 0.0,
        one_photon: vec![Coupling {
            omega: omega0,
            d_lower: d_ea0,
            d_upper: 1.0,
        }],
        channels: vec![],
    }
}

/// g1, g2 split by δ; one intermediate i a detuning `det` above the photon
/// energy; one excited e with 2ν_ref exactly between the two two-photon lines.
pub fn four_level(delta: f64, det: f64, d_lower: f64, d_upper: f64, nu_ref: f64) -> ShiftEngine {
    let w = 2.0 * PI * nu_ref;
    let (wg1, wg2, wi, we) = (-delta / 2.0, delta / 2.0, w + det, 2.0 * w);
    let terms = |g: HyperfineState, wg: f64| StateTerms {
        state: g,
        omega: wg,
        one_photon: vec![Coupling {
            omega: wi - wg,
            d_lower,
            d_upper: 1.0,
        }],
        channels: vec![Channel {
            f_e: g.f,
            omega: we - wg,
            paths: vec![Coupling {
                omega: wi - wg,
                d_lower,
                d_upper,
            }],
        }],
    };
    ShiftEngine::from_terms(
        terms(ground(3), wg1),
        terms(ground(4), wg2),
        opts(CounterRotating::Omitted, TppMode::Perturbative),
    )
}

/// Stationary intensity of Eqs. (1)+(2) with Ω = |d|√(2I/cε₀)/ħ.
pub fn four_level_intensity(delta: f64, d_upper: f64) -> f64 {
    delta * delta * HBAR * HBAR * C * EPS0 / (16.0 * (d_upper * EA0).powi(2))
}
