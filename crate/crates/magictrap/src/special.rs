//! Bessel functions of the first kind for the modest arguments (|x| ≲ 10)
//! that phase-modulation depths produce.

/// Jₙ(x) for integer n by its power series.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    if n < 0 {
        let v = bessel_j(-n, x);
        return if n % 2 == 0 { v } else { -v };
    }
    let half = x / 2.0;
    let mut term = (1..=n).fold(1.0, |acc, k| acc * half / k as f64);
    let mut sum = term;
    let q = -half * half;
    for k in 1..200 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}
