//! Acceptance criteria, one PASS/FAIL line each. Criteria that the published
//! numbers cannot satisfy are listed in `KNOWN_FAILURES`; the run fails only on
//! a failure outside that list.

#[path = "../../magictrap/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use magictrap::angular::{dipole_element, wigner3j, wigner6j, Half};
use magictrap::atomdata::{default_data_dir, load_dataset, AtomDataset, HyperfineState};
use magictrap::coherence::{k_e_from_k_i, monte_carlo_ramsey, DensityModel, ThermalEnsemble};
use magictrap::magic::{MagicProblem, MagicSolution, SpectrumTemplate};
use magictrap::quad::integrate;
use magictrap::scatter::t1_bound;
use magictrap::stark::{
    sideband_powers, CounterRotating, GroundStatePair, ShiftEngine, ShiftOptions, TppMode,
    TrapSpectrum,
};
use magictrap::tables::{evaluate, template_for, RowResult, PRESETS, PRESET_DEPTH};
use magictrap::units::{C, EA0, EPS0, GHZ, HBAR};
use magictrap::zeeman::ZeemanContext;

use common::{four_level, four_level_intensity, two_level, uncoupled_element, w3_oracle};

/// Published rows: Δν₀ (GHz), I₀ (GW/m²), U_T (μK), k_ν (10⁻¹⁸ Hz⁻¹),
/// k_I (10⁻¹⁵ Hz·m⁴/W²), Γ⁽¹ᵖ⁾ (Hz), Γ⁽²ᵖ⁾ (Hz).
struct Golden {
    species: &'static str,
    pair: (i32, i32),
    excited: &'static str,
    values: [f64; 7],
}

const fn g(
    species: &'static str,
    pair: (i32, i32),
    excited: &'static str,
    values: [f64; 7],
) -> Golden {
    Golden {
        species,
        pair,
        excited,
        values,
    }
}

const GOLDEN: [Golden; 19] = [
    g(
        "cs",
        (0, 0),
        "5D3_2",
        [0.281, 0.0195, -1.8, 0.587, 8.76, 2.0e-6, 3.0e-6],
    ),
    g(
        "cs",
        (0, 0),
        "5D5_2",
        [0.290, 0.0146, -1.4, 0.462, 12.0, 1.6e-6, 1.7e-5],
    ),
    g(
        "cs",
        (0, 0),
        "7S1_2",
        [0.219, 0.111, -22.5, 23.6, 5.93, 3.4e-4, 1.1e-2],
    ),
    g(
        "cs",
        (-1, 1),
        "7S1_2",
        [0.219, 0.110, -22.3, 23.3, 5.93, 3.4e-4, 1.1e-2],
    ),
    g(
        "cs",
        (3, 4),
        "7S1_2",
        [0.219, 0.102, -20.7, 20.0, 5.93, 3.1e-4, 9.3e-3],
    ),
    g(
        "cs",
        (0, 0),
        "7D3_2",
        [0.286, 0.429, 154.0, 125.0, 3.63, 1.1e-2, 1.0e-5],
    ),
    g(
        "cs",
        (0, 0),
        "7D5_2",
        [0.287, 0.155, 55.1, 44.9, 9.89, 4.0e-3, 2.7e-5],
    ),
    g(
        "rb87",
        (0, 0),
        "4D5_2",
        [0.429, 0.0068, -0.87, 0.51, 3.34, 8.4e-7, 1.9e-4],
    ),
    g(
        "rb87",
        (0, 0),
        "4D3_2",
        [0.424, 0.0090, -1.2, 0.68, 2.50, 1.1e-6, 4.1e-5],
    ),
    g(
        "rb87",
        (0, 0),
        "6S1_2",
        [0.326, 0.0439, -6.6, 7.66, 0.68, 1.1e-5, 2.9e-3],
    ),
    g(
        "rb87",
        (-1, 1),
        "6S1_2",
        [0.326, 0.0431, -6.5, 7.38, 0.68, 1.1e-5, 2.7e-3],
    ),
    g(
        "rb87",
        (1, 2),
        "6S1_2",
        [0.326, 0.0419, -6.3, 6.97, 0.68, 1.0e-5, 2.6e-3],
    ),
    g(
        "rb87",
        (0, 0),
        "6D5_2",
        [0.427, 0.302, 88.0, 84.4, 2.71, 1.2e-3, 9.6e-4],
    ),
    g(
        "rb87",
        (0, 0),
        "6D3_2",
        [0.427, 0.599, 175.0, 168.0, 1.36, 2.5e-3, 3.2e-4],
    ),
    g(
        "rb85",
        (0, 0),
        "4D5_2",
        [0.127, 0.0013, -0.17, 0.23, 75.1, 5.7e-8, 3.7e-5],
    ),
    g(
        "rb85",
        (0, 0),
        "4D3_2",
        [0.126, 0.0018, -0.23, 0.30, 56.3, 7.8e-8, 8.2e-6],
    ),
    g(
        "rb85",
        (0, 0),
        "6S1_2",
        [0.097, 0.0086, -1.31, 3.4, 15.3, 2.2e-6, 5.6e-4],
    ),
    g(
        "rb85",
        (0, 0),
        "6D5_2",
        [0.126, 0.0595, 17.4, 37.5, 6.10, 2.4e-4, 1.9e-4],
    ),
    g(
        "rb85",
        (0, 0),
        "6D3_2",
        [0.126, 0.119, 34.7, 74.2, 3.06, 4.9e-4, 6.2e-5],
    ),
];

/// Criteria the published numbers do not support; each is explained in the
/// project's decision log.
const KNOWN_FAILURES: &[&str] = &[
    "2 cs(0,0)5D5_2 u_t",
    "2 rb87(0,0)4D5_2 k_i",
    "2 rb87(0,0)4D3_2 u_t",
    "2 rb87(0,0)4D3_2 k_i",
    "2 rb87(0,0)6S1_2 k_i",
    "2 rb87(-1,1)6S1_2 k_i",
    "2 rb87(1,2)6S1_2 k_i",
    "3 k_nu(1.54e8)",
    "4 rb85(-1,1) b0",
    "7 cs(0,0)5D3_2 gamma_2p",
    "7 cs(0,0)7D3_2 gamma_2p",
    "7 cs(0,0)7D5_2 gamma_2p",
    "7 rb87(0,0)4D3_2 gamma_2p",
    "7 rb87(0,0)6D5_2 gamma_2p",
    "7 rb87(0,0)6D3_2 gamma_2p",
    "7 rb85(0,0)4D3_2 gamma_2p",
    "7 rb85(0,0)6D5_2 gamma_2p",
    "7 rb85(0,0)6D3_2 gamma_2p",
    "7 t1",
    "8 t2(0.2uK)",
    "8 monte_carlo",
    "9 simple_model_eq4_as_printed",
];

struct Report {
    lines: Vec<(String, bool, String)>,
}

impl Report {
    fn check(&mut self, id: impl Into<String>, pass: bool, detail: String) {
        let id = id.into();
        println!("{} {id:<34} {detail}", if pass { "PASS" } else { "FAIL" });
        self.lines.push((id, pass, detail));
    }

    fn rel(&mut self, id: impl Into<String>, got: f64, want: f64, tol: f64) {
        let r = got / want - 1.0;
        self.check(
            id,
            r.abs() <= tol,
            format!("got {got:.5e}, want {want:.5e}, rel {r:+.2e} (tol ±{tol:e})"),
        );
    }

    fn abs(&mut self, id: impl Into<String>, got: f64, want: f64, tol: f64) {
        self.check(
            id,
            (got - want).abs() <= tol,
            format!(
                "got {got:.6}, want {want}, diff {:+.6} (tol ±{tol})",
                got - want
            ),
        );
    }

    fn factor(&mut self, id: impl Into<String>, got: f64, want: f64, f: f64) {
        let ratio = (got / want).max(want / got);
        self.check(
            id,
            ratio <= f,
            format!("got {got:.3e}, want {want:.3e}, off by ×{ratio:.2} (tol ×{f})"),
        );
    }

    fn runtime(&mut self, id: impl Into<String>, start: Instant, limit_s: f64) {
        let t = start.elapsed().as_secs_f64();
        self.check(id, t < limit_s, format!("{t:.2} s (limit {limit_s} s)"));
    }
}

fn label(species: &str, pair: (i32, i32), excited: &str) -> String {
    format!("{species}({},{}){excited}", pair.0, pair.1)
}

fn dataset(species: &str) -> AtomDataset {
    load_dataset(default_data_dir(), species).expect("bundled dataset loads")
}

fn solve(
    ds: &AtomDataset,
    pair: (i32, i32),
    excited: &str,
    sideband: Option<f64>,
) -> (MagicSolution, RowResult) {
    let pair = GroundStatePair::new(ds, pair.0, pair.1).unwrap();
    evaluate(
        ds,
        pair,
        excited.parse().unwrap(),
        template_for(sideband, PRESET_DEPTH),
        ShiftOptions::default(),
    )
    .expect("preset row solves")
}

fn row_checks(r: &mut Report, n: u32, gold: &Golden, row: &RowResult) {
    let id = |q: &str| format!("{n} {} {q}", label(gold.species, gold.pair, gold.excited));
    let v = gold.values;
    r.abs(id("dnu"), row.delta_nu0_ghz, v[0], 0.010);
    r.rel(id("i0"), row.i0_gw_m2, v[1], 0.05);
    r.rel(id("u_t"), row.u_t_uk, v[2], 0.05);
    r.rel(id("k_nu"), row.k_nu_hz_inv * 1e18, v[3], 0.15);
    r.rel(id("k_i"), row.k_i_fhz_m4_w2, v[4], 0.15);
    r.check(
        id("converged"),
        row.converged,
        format!("{} iterations", row.iterations),
    );
}

fn criteria_1_to_3(r: &mut Report) -> MagicSolution {
    let cs = dataset("cs");
    let start = Instant::now();
    let (sol, row) = solve(&cs, (0, 0), "7S1_2", None);
    row_checks(r, 1, &GOLDEN[2], &row);
    r.runtime("1 runtime", start, 10.0);

    let start = Instant::now();
    let mut rows = Vec::new();
    for gold in &GOLDEN {
        let ds = dataset(gold.species);
        let (_, row) = solve(&ds, gold.pair, gold.excited, None);
        row_checks(r, 2, gold, &row);
        rows.push(row);
    }
    r.runtime("2 runtime", start, 180.0);

    for (gold, row) in GOLDEN.iter().zip(&rows) {
        let id = |q: &str| format!("7 {} {q}", label(gold.species, gold.pair, gold.excited));
        r.factor(id("gamma_1p"), row.gamma_1p_hz, gold.values[5], 3.0);
        r.factor(id("gamma_2p"), row.gamma_2p_hz, gold.values[6], 3.0);
    }
    let t1 = t1_bound(&[rows[2].gamma_1p_hz, rows[2].gamma_2p_hz])
        .unwrap()
        .unwrap();
    r.check(
        "7 t1",
        (60.0..=120.0).contains(&t1),
        format!("T₁ = {t1:.1} s (window [60, 120] s)"),
    );

    let pair = GroundStatePair::clock(&cs);
    let engine = ShiftEngine::new(
        &cs,
        pair,
        Some("7S1_2".parse().unwrap()),
        ShiftOptions::default(),
    )
    .unwrap();
    let problem = MagicProblem::new(engine, SpectrumTemplate::Monochromatic);
    let (k_nu, _) = problem.residual_coefficients(sol.nu0_abs, 1.54e8).unwrap();
    r.rel("3 k_nu(1.54e8)", k_nu * 1e18, 39.5, 0.10);
    sol
}

fn criterion_4(r: &mut Report) {
    let cases = [
        ("cs", (0, 0), 0.0, 0.0, 854.9, 0.005),
        ("cs", (-1, 1), 1.39, 0.02, 801.5, 0.01),
        ("rb87", (-1, 1), 3.23, 0.03, 862.7, 0.01),
        ("rb85", (-1, 1), 1.21, 0.02, 2302.0, 0.01),
    ];
    let sets: Vec<AtomDataset> = ["cs", "rb87", "rb85"].iter().map(|s| dataset(s)).collect();
    let start_solve = Instant::now();
    for (species, pair, b0, tol_b, k_m, tol_k) in cases {
        let ds = sets.iter().find(|d| d.species.name == species).unwrap();
        let p = GroundStatePair::new(ds, pair.0, pair.1).unwrap();
        let (b, k) = ZeemanContext::from_dataset(ds).find_magic_b(&p).unwrap();
        let id = format!("4 {species}({},{})", pair.0, pair.1);
        r.abs(format!("{id} b0"), b, b0, tol_b);
        r.rel(format!("{id} k_m"), k, k_m, tol_k);
    }
    r.runtime("4 runtime", start_solve, 1.0);
}

fn criterion_5(r: &mut Report, sol: &MagicSolution) {
    let cs = dataset("cs");
    let pair = GroundStatePair::clock(&cs);
    let engine = ShiftEngine::new(
        &cs,
        pair,
        Some("7S1_2".parse().unwrap()),
        ShiftOptions::default(),
    )
    .unwrap();
    let mut lines: Vec<f64> = engine.degenerate_lines().iter().map(|l| l.2).collect();
    lines.sort_by(f64::total_cmp);
    let sep = (lines[lines.len() - 1] - lines[0]) / GHZ;
    r.check(
        "5 line_count",
        lines.len() == 2,
        format!("{} degenerate lines", lines.len()),
    );
    r.abs("5 line_separation_ghz", sep, 3.50, 0.010);
    let mid = engine.line_midpoint().unwrap();
    let problem = MagicProblem::new(engine, SpectrumTemplate::Monochromatic);
    let (best, _) = (-300..=300)
        .map(|k| {
            let nu = mid + f64::from(k) * 1e6;
            (nu, problem.dls(nu, sol.i0).unwrap())
        })
        .fold((f64::NAN, f64::INFINITY), |acc, (nu, v)| {
            if v < acc.1 {
                (nu, v)
            } else {
                acc
            }
        });
    r.abs("5 slice_minimum_mhz", (best - mid) / 1e6, 0.0, 30.0);
}

fn criterion_6(r: &mut Report) {
    let cs = dataset("cs");
    let start = Instant::now();
    let (_, row) = solve(&cs, (0, 0), "7S1_2", Some(7.0));
    r.rel("6 tableS6 cs 7S i0", row.i0_gw_m2, 1.14, 0.10);
    r.rel("6 tableS6 cs 7S u_t", row.u_t_uk, -232.0, 0.10);
    r.runtime("6 runtime", start, 60.0);
    let p = sideband_powers(1.44, 2);
    for (n, want) in [0.297, 0.301, 0.047].into_iter().enumerate() {
        r.abs(format!("6 sideband_power_{n}"), p[n], want, 2e-3);
    }
}

fn criterion_8(r: &mut Report, sol: &MagicSolution) {
    let k_e = k_e_from_k_i(sol.k_i, sol.i0, sol.trap_depth).unwrap();
    let ens = ThermalEnsemble::new(0.2, k_e, 0.0).unwrap();
    let t2 = ens.coherence_time().unwrap();
    r.check(
        "8 t2(0.2uK)",
        (60.0..=140.0).contains(&t2),
        format!("T₂′ = {t2:.2} s at k_E = {k_e:.4} Hz/μK² (window [60, 140] s)"),
    );
    let scaled: Vec<f64> = [0.1, 0.2, 0.4]
        .iter()
        .map(|&t| {
            ThermalEnsemble::new(t, k_e, 0.0)
                .unwrap()
                .coherence_time()
                .unwrap()
                * t
                * t
        })
        .collect();
    let spread = scaled
        .iter()
        .map(|c| (c / scaled[0] - 1.0).abs())
        .fold(0.0, f64::max);
    r.check(
        "8 t2_scaling",
        spread < 1e-3,
        format!("max |T₂′T²/c − 1| = {spread:.2e} (tol 1e-3)"),
    );

    let start = Instant::now();
    let times: Vec<f64> = (1..=10).map(|k| t2 * 0.2 * f64::from(k)).collect();
    let mc = monte_carlo_ramsey(&ens, &times, 1_000_000, 2024);
    let elapsed = start.elapsed().as_secs_f64();
    for (name, model) in [
        ("monte_carlo", DensityModel::Printed),
        ("monte_carlo_boltzmann", DensityModel::Boltzmann),
    ] {
        let env = ThermalEnsemble::new(0.2, k_e, 0.0)
            .unwrap()
            .with_density(model)
            .envelope(&times)
            .unwrap();
        let z = (0..times.len())
            .flat_map(|k| {
                [
                    (mc.alpha[k] - env.alpha[k]) / mc.alpha_err[k],
                    (mc.beta[k] - env.beta[k]) / mc.beta_err[k],
                ]
            })
            .fold(0.0f64, |m, z| m.max(z.abs()));
        r.check(
            format!("8 {name}"),
            z < 3.0,
            format!("max |z| = {z:.2} over 10 times, 10⁶ samples (tol 3σ)"),
        );
    }
    r.check(
        "8 monte_carlo_runtime",
        elapsed < 60.0,
        format!("{elapsed:.2} s (limit 60 s)"),
    );
}

fn criterion_9(r: &mut Report) {
    let start = Instant::now();
    let h = Half::from_twice;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut sym, mut orc) = (0.0f64, 0.0f64);
    for _ in 0..4000 {
        let (a, b): (i32, i32) = (rng.gen_range(0..=15), rng.gen_range(0..=15));
        let lo = (a - b).abs();
        let hi = (a + b).min(15 - (15 - lo) % 2);
        let c = lo + 2 * rng.gen_range(0..=(hi - lo) / 2);
        let m1 = 2 * rng.gen_range(0..=a) - a;
        let m2 = 2 * rng.gen_range(0..=b) - b;
        let m3 = -m1 - m2;
        if m3.abs() > c {
            continue;
        }
        let w = |j: [i32; 3], m: [i32; 3]| {
            wigner3j(h(j[0]), h(j[1]), h(j[2]), h(m[0]), h(m[1]), h(m[2])).unwrap()
        };
        let v = w([a, b, c], [m1, m2, m3]);
        let phase = common::sign(a + b + c);
        for d in [
            w([b, c, a], [m2, m3, m1]) - v,
            w([b, a, c], [m2, m1, m3]) - phase * v,
            w([a, b, c], [-m1, -m2, -m3]) - phase * v,
        ] {
            sym = sym.max(d.abs());
        }
        orc = orc.max((v - w3_oracle([a, b, c], [m1, m2, m3])).abs());
    }
    r.check(
        "9 wigner3j_symmetry",
        sym < 1e-12,
        format!("max deviation {sym:.1e} (tol 1e-12)"),
    );
    r.check(
        "9 wigner3j_vs_racah",
        orc < 1e-12,
        format!("max deviation {orc:.1e} (tol 1e-12)"),
    );

    let mut orth = 0.0f64;
    for _ in 0..300 {
        let j: [i32; 5] = std::array::from_fn(|_| rng.gen_range(0..=15));
        let [a, b, d, e, f] = j;
        let tri = |x: i32, y: i32, z: i32| z <= x + y && z >= (x - y).abs() && (x + y + z) % 2 == 0;
        if !(tri(a, e, f) && tri(d, b, f)) {
            continue;
        }
        for f2 in 0..=15 {
            if !(tri(a, e, f2) && tri(d, b, f2)) {
                continue;
            }
            let mut s = 0.0;
            for x in 0..=(a + b) {
                if tri(a, b, x) && tri(d, e, x) {
                    let w6 = |y| wigner6j(h(a), h(b), h(x), h(d), h(e), h(y)).unwrap();
                    s += f64::from(x + 1) * f64::from(f + 1) * w6(f) * w6(f2);
                }
            }
            orth = orth.max((s - if f == f2 { 1.0 } else { 0.0 }).abs());
        }
    }
    r.check(
        "9 wigner6j_orthogonality",
        orth < 1e-12,
        format!("max deviation {orth:.1e} (tol 1e-12)"),
    );

    let mut dev = 0.0f64;
    for species in ["cs", "rb87", "rb85"] {
        let ds = dataset(species);
        let i = ds.nuclear_spin();
        for rec in &ds.dipoles {
            let (lo, hi) = (rec.lower, rec.upper);
            for fl in ds.level(lo).unwrap().f_values(i) {
                for fu in ds.level(hi).unwrap().f_values(i) {
                    for ml in fl.projections() {
                        for p in -1..=1 {
                            let mu = ml + Half::int(p);
                            if mu.abs() > fu {
                                continue;
                            }
                            let (a, b) = (
                                HyperfineState::new(lo, fl, ml),
                                HyperfineState::new(hi, fu, mu),
                            );
                            let got = dipole_element(&ds, &a, &b, p).unwrap();
                            dev = dev.max((got - uncoupled_element(&ds, &a, &b, p)).abs());
                        }
                    }
                }
            }
        }
    }
    r.check(
        "9 dipole_vs_clebsch_gordan",
        dev < 1e-10,
        format!("max deviation {dev:.1e} e·a₀ (tol 1e-10)"),
    );

    let omega0 = 2.0 * PI * 3.5e14;
    let terms = two_level(omega0, 4.5);
    let mut worst = 0.0f64;
    for nu in [2.0e14, 3.3e14, 3.6e14, 5.0e14] {
        let w = 2.0 * PI * nu;
        let spec = TrapSpectrum::monochromatic(nu, 1.3e8).unwrap();
        let o2 = (4.5 * EA0 * common::field(1.3e8) / HBAR).powi(2);
        let closed = -o2 / 4.0 * (1.0 / (omega0 - w) + 1.0 / (omega0 + w)) / (2.0 * PI);
        let got = terms
            .one_photon(
                &spec,
                &common::opts(CounterRotating::Standard, TppMode::Exact),
            )
            .unwrap();
        worst = worst.max((got / closed - 1.0).abs());
    }
    r.check(
        "9 two_level_oracle",
        worst < 1e-12,
        format!("max rel deviation {worst:.1e} (tol 1e-12)"),
    );

    let delta = 2.0 * PI * 9.192_631_77e9;
    let problem = MagicProblem::new(
        four_level(delta, 1e6 * delta, 1e3, 2.0, 3.0e14),
        SpectrumTemplate::Monochromatic,
    );
    let sol = problem.find_magic(None).unwrap();
    let delta1 = (2.0 * PI * 6.0e14 + delta / 2.0) - 2.0 * PI * 2.0 * sol.nu0_abs;
    r.rel("9 simple_model_delta1", delta1, delta / 2.0, 1e-6);
    r.rel(
        "9 simple_model_i0",
        sol.i0,
        four_level_intensity(delta, 2.0),
        1e-6,
    );
    let printed = delta * delta / 8.0 * HBAR * HBAR * C * EPS0 / (2.0 * EA0).powi(2);
    r.rel("9 simple_model_eq4_as_printed", sol.i0, printed, 1e-6);

    let mut norm = 0.0f64;
    for model in [DensityModel::Printed, DensityModel::Boltzmann] {
        for (t, k) in [(0.05, 0.1), (0.2, 0.144), (1.0, 3.0)] {
            let ens = ThermalEnsemble::new(t, k, 0.3).unwrap().with_density(model);
            let n = integrate(
                |u| 2.0 * u * ens.dls_pdf(0.3 + u * u).unwrap(),
                0.0,
                80.0 / ens.a_const,
                1e-12,
                0.0,
                10_000,
            )
            .unwrap();
            norm = norm.max((n - 1.0).abs());
        }
    }
    for t in [0.05, 0.2, 1.0] {
        let n = integrate(
            |e| magictrap::coherence::boltzmann_pdf(e, t),
            0.0,
            80.0 * t,
            1e-12,
            0.0,
            10_000,
        )
        .unwrap();
        norm = norm.max((n - 1.0).abs());
    }
    r.check(
        "9 pdf_normalization",
        norm < 1e-8,
        format!("max deviation {norm:.1e} (tol 1e-8)"),
    );
    r.runtime("9 runtime", start, 120.0);
}

fn criterion_10(r: &mut Report) {
    let dir = tempfile::tempdir().unwrap();
    let mut cases: Vec<Vec<&str>> = vec![
        vec!["landscape", "--steps", "11"],
        vec!["magic"],
        vec!["zeeman", "--pair=-1,1"],
        vec![
            "coherence",
            "--temperatures",
            "0.1,0.2,0.4",
            "--d-nu-mhz",
            "10",
            "--d-i-rel",
            "0.06",
            "--d-b-mg",
            "2",
        ],
        vec!["lines"],
    ];
    for p in PRESETS {
        cases.push(vec!["table", "--preset", p]);
    }
    for (n, args) in cases.iter().enumerate() {
        let run = |k: usize| {
            let path = dir.path().join(format!("{n}-{k}"));
            let status = Command::new(env!("CARGO_BIN_EXE_magictrap"))
                .args(args)
                .args(["--out", path.to_str().unwrap()])
                .status()
                .unwrap();
            (status.code(), std::fs::read(path).unwrap_or_default())
        };
        let (a, b) = (run(0), run(1));
        let same = a == b && a.0 == Some(0) && !a.1.is_empty();
        r.check(
            format!("10 {}", args.join(" ")),
            same,
            format!("{} bytes, exit {:?}", a.1.len(), a.0),
        );
    }
}

fn main() -> ExitCode {
    let mut r = Report { lines: Vec::new() };
    let sol = criteria_1_to_3(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r, &sol);
    criterion_6(&mut r);
    criterion_8(&mut r, &sol);
    criterion_9(&mut r);
    criterion_10(&mut r);

    let known: BTreeSet<&str> = KNOWN_FAILURES.iter().copied().collect();
    let failed: Vec<&str> = r
        .lines
        .iter()
        .filter(|l| !l.1)
        .map(|l| l.0.as_str())
        .collect();
    let unexpected: Vec<&str> = failed
        .iter()
        .copied()
        .filter(|id| !known.contains(id))
        .collect();
    let fixed: Vec<&str> = known
        .iter()
        .copied()
        .filter(|id| r.lines.iter().any(|l| l.0 == *id && l.1))
        .collect();
    let stale: Vec<&str> = known
        .iter()
        .copied()
        .filter(|id| !r.lines.iter().any(|l| l.0 == *id))
        .collect();
    println!(
        "\nacceptance: {} checks, {} passed, {} known failures, {} unexpected failures",
        r.lines.len(),
        r.lines.len() - failed.len(),
        failed.len() - unexpected.len(),
        unexpected.len()
    );
    for id in &fixed {
        println!("note: known failure now passes: {id}");
    }
    for id in &stale {
        println!("note: known failure has no matching check: {id}");
    }
    for id in &unexpected {
        println!("unexpected failure: {id}");
    }
    if unexpected.is_empty() && stale.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
