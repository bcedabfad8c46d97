//! Exact Wigner 3j/6j symbols and hyperfine dipole matrix elements.
//!
//! Quantum numbers are carried as doubled integers ([`Half`]) so that no
//! fractional rounding ever enters the selection rules. The Racah sums are
//! evaluated in exact rational arithmetic and converted to `f64` once.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atomdata::{AtomDataset, DataError, HyperfineState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AngularError {
    #[error("negative angular momentum {0}")]
    Negative(Half),
    #[error("projection {m} incompatible with j = {j}")]
    Projection { j: Half, m: Half },
    #[error("cannot parse quantum number {0:?}")]
    Parse(String),
}

/// A non-negative or negative half-integer, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Half(i32);

impl Half {
    pub const ZERO: Half = Half(0);
    pub const HALF: Half = Half(1);
    pub const ONE: Half = Half(2);

    pub const fn from_twice(t: i32) -> Self {
        Half(t)
    }

    pub const fn int(n: i32) -> Self {
        Half(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn abs(self) -> Self {
        Half(self.0.abs())
    }

    /// j(j+1) as a float.
    pub fn casimir(self) -> f64 {
        let j = self.value();
        j * (j + 1.0)
    }

    /// 2j+1.
    pub fn multiplicity(self) -> i32 {
        self.0 + 1
    }

    /// All projections −j, −j+1, …, j.
    pub fn projections(self) -> impl Iterator<Item = Half> {
        (-self.0..=self.0).step_by(2).map(Half)
    }

    /// |a−b|, …, a+b.
    pub fn couple(a: Half, b: Half) -> impl Iterator<Item = Half> {
        ((a.0 - b.0).abs()..=a.0 + b.0).step_by(2).map(Half)
    }
}

impl Add for Half {
    type Output = Half;
    fn add(self, o: Half) -> Half {
        Half(self.0 + o.0)
    }
}

impl Sub for Half {
    type Output = Half;
    fn sub(self, o: Half) -> Half {
        Half(self.0 - o.0)
    }
}

impl Neg for Half {
    type Output = Half;
    fn neg(self) -> Half {
        Half(-self.0)
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for Half {
    type Err = AngularError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || AngularError::Parse(s.to_string());
        match s.split_once(['/', '_']) {
            Some((num, "2")) => num.parse::<i32>().map(Half).map_err(|_| bad()),
            Some(_) => Err(bad()),
            None => s.parse::<i32>().map(Half::int).map_err(|_| bad()),
        }
    }
}

impl From<Half> for String {
    fn from(h: Half) -> String {
        h.to_string()
    }
}

impl TryFrom<String> for Half {
    type Error = AngularError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

fn check_pair(j: Half, m: Half) -> Result<(), AngularError> {
    if j.0 < 0 {
        return Err(AngularError::Negative(j));
    }
    if (j.0 - m.0) % 2 != 0 {
        return Err(AngularError::Projection { j, m });
    }
    Ok(())
}

fn check_j(j: Half) -> Result<(), AngularError> {
    if j.0 < 0 {
        Err(AngularError::Negative(j))
    } else {
        Ok(())
    }
}

fn fact(n: i32) -> BigInt {
    (2..=n as u64).fold(BigInt::one(), |acc, k| acc * k)
}

/// Doubled-integer triangle test: |a−b| ≤ c ≤ a+b with a+b+c integral.
fn triangle(a: i32, b: i32, c: i32) -> bool {
    c >= (a - b).abs() && c <= a + b && (a + b + c) % 2 == 0
}

/// Δ(abc)² = (a+b−c)!(a−b+c)!(−a+b+c)!/(a+b+c+1)! on doubled arguments.
fn delta_sq(a: i32, b: i32, c: i32) -> BigRational {
    BigRational::new(
        fact((a + b - c) / 2) * fact((a - b + c) / 2) * fact((-a + b + c) / 2),
        fact((a + b + c) / 2 + 1),
    )
}

/// sign(s)·√(s²·p) with s, p exact rationals.
fn signed_sqrt(s: &BigRational, p: &BigRational) -> f64 {
    if s.is_zero() {
        return 0.0;
    }
    let mag = (s * s * p).to_f64().unwrap_or(f64::NAN).sqrt();
    if s.is_negative() {
        -mag
    } else {
        mag
    }
}

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3).
pub fn wigner3j(
    j1: Half,
    j2: Half,
    j3: Half,
    m1: Half,
    m2: Half,
    m3: Half,
) -> Result<f64, AngularError> {
    check_pair(j1, m1)?;
    check_pair(j2, m2)?;
    check_pair(j3, m3)?;
    if m1.0 + m2.0 + m3.0 != 0 || !triangle(j1.0, j2.0, j3.0) {
        return Ok(0.0);
    }
    if m1.0.abs() > j1.0 || m2.0.abs() > j2.0 || m3.0.abs() > j3.0 {
        return Ok(0.0);
    }
    let (j1, j2, j3, m1, m2, m3) = (j1.0, j2.0, j3.0, m1.0, m2.0, m3.0);
    // all quantities below are integers once halved
    let a = [(j1 + j2 - j3) / 2, (j1 - m1) / 2, (j2 + m2) / 2];
    let b = [(j3 - j2 + m1) / 2, (j3 - j1 - m2) / 2];
    let kmin = 0.max(-b[0]).max(-b[1]);
    let kmax = a[0].min(a[1]).min(a[2]);
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let den = fact(k)
            * fact(a[0] - k)
            * fact(a[1] - k)
            * fact(a[2] - k)
            * fact(b[0] + k)
            * fact(b[1] + k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let p = delta_sq(j1, j2, j3)
        * BigRational::from_integer(
            fact((j1 + m1) / 2)
                * fact((j1 - m1) / 2)
                * fact((j2 + m2) / 2)
                * fact((j2 - m2) / 2)
                * fact((j3 + m3) / 2)
                * fact((j3 - m3) / 2),
        );
    let phase = (j1 - j2 - m3) / 2;
    let v = signed_sqrt(&sum, &p);
    Ok(if phase.rem_euclid(2) == 1 { -v } else { v })
}

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}.
pub fn wigner6j(
    j1: Half,
    j2: Half,
    j3: Half,
    j4: Half,
    j5: Half,
    j6: Half,
) -> Result<f64, AngularError> {
    for j in [j1, j2, j3, j4, j5, j6] {
        check_j(j)?;
    }
    let (j1, j2, j3, j4, j5, j6) = (j1.0, j2.0, j3.0, j4.0, j5.0, j6.0);
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    if !triads.iter().all(|&(a, b, c)| triangle(a, b, c)) {
        return Ok(0.0);
    }
    let t_lo = triads
        .iter()
        .map(|&(a, b, c)| (a + b + c) / 2)
        .max()
        .unwrap();
    let sums = [
        (j1 + j2 + j4 + j5) / 2,
        (j2 + j3 + j5 + j6) / 2,
        (j3 + j1 + j6 + j4) / 2,
    ];
    let t_hi = *sums.iter().min().unwrap();
    let mut sum = BigRational::zero();
    for t in t_lo..=t_hi {
        let mut den = BigInt::one();
        for &(a, b, c) in &triads {
            den *= fact(t - (a + b + c) / 2);
        }
        for &s in &sums {
            den *= fact(s - t);
        }
        let term = BigRational::new(fact(t + 1), den);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let p = triads.iter().fold(BigRational::one(), |acc, &(a, b, c)| {
        acc * delta_sq(a, b, c)
    });
    Ok(signed_sqrt(&sum, &p))
}

/// (−1)^n for an integer given in doubled form.
fn parity(twice: i32) -> f64 {
    debug_assert!(twice % 2 == 0, "non-integer phase exponent");
    if (twice / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Hyperfine-resolved angular factor of ⟨J_j F_j m_j | d_p | J_l F_l m_l⟩ in
/// units of the fine-structure reduced element ⟨J_j‖d‖J_l⟩.
#[allow(clippy::too_many_arguments)]
pub fn hyperfine_factor(
    jj: Half,
    fj: Half,
    mj: Half,
    jl: Half,
    fl: Half,
    ml: Half,
    i: Half,
    p: i32,
) -> f64 {
    let three = wigner3j(fj, Half::ONE, fl, -mj, Half::int(p), ml).unwrap_or(0.0);
    if three == 0.0 {
        return 0.0;
    }
    let six = wigner6j(jj, fj, i, fl, jl, Half::ONE).unwrap_or(0.0);
    if six == 0.0 {
        return 0.0;
    }
    let phase = parity(fj.0 - mj.0 + jj.0 + i.0 + fl.0 + 2);
    phase * ((fj.multiplicity() * fl.multiplicity()) as f64).sqrt() * three * six
}

/// Fine-structure Wigner–Eckart factor of ⟨J m_J | d_p | J′ m_J′⟩.
pub fn fine_factor(j: Half, mj: Half, jp: Half, mjp: Half, p: i32) -> f64 {
    parity(j.0 - mj.0) * wigner3j(j, Half::ONE, jp, -mj, Half::int(p), mjp).unwrap_or(0.0)
}

/// Clebsch–Gordan coefficient ⟨j1 m1; j2 m2 | J M⟩.
pub fn clebsch_gordan(j1: Half, m1: Half, j2: Half, m2: Half, j: Half, m: Half) -> f64 {
    let w = wigner3j(j1, j2, j, m1, m2, -m).unwrap_or(0.0);
    parity(j1.0 - j2.0 + m.0) * (j.multiplicity() as f64).sqrt() * w
}

/// Signed hyperfine dipole matrix element ⟨to|d_p|from⟩ in e·a₀.
///
/// Built from the stored reduced element by the Wigner–Eckart theorem; see
/// the guide's chapter on angular algebra for the phase convention.
pub fn dipole_element(
    ds: &AtomDataset,
    from: &HyperfineState,
    to: &HyperfineState,
    p: i32,
) -> Result<f64, DataError> {
    let red = ds
        .reduced(to.level, from.level)
        .ok_or(DataError::NoDipole(from.level, to.level))?;
    let i = ds.nuclear_spin();
    Ok(red * hyperfine_factor(to.level.j, to.f, to.m, from.level.j, from.f, from.m, i, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(t: i32) -> Half {
        Half::from_twice(t)
    }

    #[test]
    fn parse_and_print() {
        assert_eq!("7/2".parse::<Half>().unwrap(), h(7));
        assert_eq!("3_2".parse::<Half>().unwrap(), h(3));
        assert_eq!("-2".parse::<Half>().unwrap(), h(-4));
        assert_eq!(h(5).to_string(), "5/2");
        assert_eq!(h(-4).to_string(), "-2");
        assert!("1/3".parse::<Half>().is_err());
    }

    #[test]
    fn three_j_examples() {
        let o = Half::ONE;
        let z = Half::ZERO;
        let v = wigner3j(o, o, z, z, z, z).unwrap();
        assert!((v + 1.0 / 3f64.sqrt()).abs() < 1e-14);
        let v = wigner3j(o, o, Half::int(2), z, z, z).unwrap();
        assert!((v - (2.0f64 / 15.0).sqrt()).abs() < 1e-14);
        assert_eq!(wigner3j(o, o, Half::int(3), z, z, z).unwrap(), 0.0);
    }

    #[test]
    fn six_j_examples() {
        let o = Half::ONE;
        let v = wigner6j(o, o, o, o, o, o).unwrap();
        assert!((v - 1.0 / 6.0).abs() < 1e-14);
        let v = wigner6j(o, o, o, Half::ZERO, o, o).unwrap();
        assert!((v + 1.0 / 3.0).abs() < 1e-14);
        assert_eq!(
            wigner6j(o, Half::int(2), Half::int(5), o, o, o).unwrap(),
            0.0
        );
    }

    #[test]
    fn malformed_inputs() {
        assert!(wigner3j(h(-2), h(2), h(0), h(0), h(0), h(0)).is_err());
        assert!(wigner3j(h(2), h(2), h(0), h(1), h(-1), h(0)).is_err());
        assert!(wigner6j(h(2), h(-2), h(2), h(2), h(2), h(2)).is_err());
    }

    #[test]
    fn closed_form_j_j_0() {
        // (j j 0; m −m 0) = (−1)^{j−m}/√(2j+1)
        for tj in 0..12 {
            let j = h(tj);
            for m in j.projections() {
                let v = wigner3j(j, j, Half::ZERO, m, -m, Half::ZERO).unwrap();
                let s = if ((tj - m.twice()) / 2) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                assert!((v - s / ((tj + 1) as f64).sqrt()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn large_j_stays_finite() {
        let v = wigner3j(h(15), h(15), h(30), h(15), h(-15), h(0)).unwrap();
        assert!(v.is_finite() && v != 0.0);
    }
}
