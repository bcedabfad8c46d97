//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not reach tolerance {tol:.1e} (estimate {err:.3e}) within {intervals} intervals")]
    NotConverged {
        tol: f64,
        err: f64,
        intervals: usize,
    },
    #[error("integrand is not finite at {0}")]
    NonFinite(f64),
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

fn kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Result<Piece, QuadError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let eval = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::NonFinite(x))
        }
    };
    let fc = eval(c)?;
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let s = eval(c - h * XGK[j])? + eval(c + h * XGK[j])?;
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Ok(Piece {
        a,
        b,
        value: k * h,
        err: ((k - g) * h).abs(),
    })
}

/// ∫ₐᵇ f with total error estimate ≤ max(abs_tol, rel_tol·|∫|).
pub fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<f64, QuadError> {
    let mut heap = BinaryHeap::new();
    let first = kronrod(&f, a, b)?;
    let (mut value, mut err) = (first.value, first.err);
    heap.push(first);
    while err > abs_tol.max(rel_tol * value.abs()) {
        if heap.len() >= max_intervals {
            return Err(QuadError::NotConverged {
                tol: abs_tol.max(rel_tol * value.abs()),
                err,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        let (l, r) = (kronrod(&f, worst.a, m)?, kronrod(&f, m, worst.b)?);
        value += l.value + r.value - worst.value;
        err += l.err + r.err - worst.err;
        heap.push(l);
        heap.push(r);
    }
    // re-sum to shed the drift of the running updates
    Ok(heap.iter().map(|p| p.value).sum())
}
