//! Independent reference values for the integration tests.

#![allow(dead_code)]

/// `J_k(x)` from its power series; accurate to ~1e-15 for `x < 12`.
pub fn bessel_j(k: i32, x: f64) -> f64 {
    if k < 0 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        return sign * bessel_j(-k, x);
    }
    let half = 0.5 * x;
    let mut term = half.powi(k) / (1..=k).map(f64::from).product::<f64>();
    let mut sum = term;
    for m in 1..80 {
        term *= -half * half / (f64::from(m) * f64::from(m + k));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// First positive zero of `J_k` by Newton from a linear guess (good for small k).
pub fn bessel_first_zero(k: i32) -> f64 {
    let mut x = 2.4048 + 1.4 * f64::from(k);
    for _ in 0..50 {
        let slope = 0.5 * (bessel_j(k - 1, x) - bessel_j(k + 1, x));
        let step = bessel_j(k, x) / slope;
        x -= step;
        if step.abs() < 1e-15 * x {
            break;
        }
    }
    x
}

/// Max of `|a_i - b_i|`.
pub fn sup_difference(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
