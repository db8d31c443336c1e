//! Radial quadrature for `∫_Ω h(|x|) |x|^β dx = 2π ∫ h(r) r^{β+1} dr`.
//!
//! On ball grids the segment `[0, r₀]` below the first node is closed with
//! `h(r₀) r₀^{β+2} / (β+2)` under the trapezoid rule. Simpson instead
//! integrates the quadratic through the first three samples against
//! `r^{β+1}` exactly; this matters on mapped grids `r = s^κ`, where `r₀` is
//! far from the origin.

use std::f64::consts::PI;

use crate::config::Quadrature;
use crate::domain::{check_len, RadialGrid};
use crate::{Error, Result};

/// `2π ∫ h(r) r^{β+1} dr` with the composite trapezoid rule.
pub fn integrate_radial(values: &[f64], grid: &RadialGrid, weight_exponent: f64) -> Result<f64> {
    integrate_radial_with(Quadrature::Trapezoid, values, grid, weight_exponent)
}

/// `2π ∫ h(r) r^{β+1} dr` with the chosen rule.
pub fn integrate_radial_with(
    rule: Quadrature,
    values: &[f64],
    grid: &RadialGrid,
    weight_exponent: f64,
) -> Result<f64> {
    Ok(2.0 * PI * radial_moment(rule, values, grid, weight_exponent + 1.0)?)
}

/// `∫ h(r) r^{power} dr` over the grid's domain, without the `2π` factor.
pub fn radial_moment(
    rule: Quadrature,
    values: &[f64],
    grid: &RadialGrid,
    power: f64,
) -> Result<f64> {
    check_len(grid.len(), values.len())?;
    let r = grid.nodes();
    let integrand: Vec<f64> = r
        .iter()
        .zip(values)
        .map(|(&r, &h)| h * r.powf(power))
        .collect();
    let mut total = integrate_samples(rule, r, &integrand)?;
    if grid.domain().is_ball() {
        if !(power > -1.0) {
            return Err(Error::param(
                "weight_exponent",
                "integrand r^(β+1) is not integrable at the origin",
            ));
        }
        total += match rule {
            Quadrature::Simpson if r.len() >= 3 => origin_quadratic(&r[..3], &values[..3], power),
            _ => values[0] * r[0].powf(power + 1.0) / (power + 1.0),
        };
    }
    Ok(total)
}

/// `∫₀^{x₀} P(r) r^power dr` for the quadratic `P` through three samples.
fn origin_quadratic(x: &[f64], y: &[f64], power: f64) -> f64 {
    let moment = |q: f64| x[0].powf(power + 1.0 + q) / (power + 1.0 + q);
    let (m0, m1, m2) = (moment(0.0), moment(1.0), moment(2.0));
    (0..3)
        .map(|j| {
            let (a, b) = match j {
                0 => (x[1], x[2]),
                1 => (x[0], x[2]),
                _ => (x[0], x[1]),
            };
            let denominator = (x[j] - a) * (x[j] - b);
            y[j] * (m2 - (a + b) * m1 + a * b * m0) / denominator
        })
        .sum()
}

/// `∫ y dx` over the sample nodes.
pub fn integrate_samples(rule: Quadrature, x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x.len(), y.len())?;
    if x.len() < 2 {
        return Ok(0.0);
    }
    Ok(match rule {
        Quadrature::Trapezoid => trapezoid(x, y),
        Quadrature::Simpson => simpson(x, y),
    })
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
        .sum()
}

/// Composite Simpson for irregularly spaced nodes; an odd trailing interval
/// is integrated with the quadratic through the last three nodes.
fn simpson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    if n == 2 {
        return trapezoid(x, y);
    }
    let intervals = n - 1;
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 <= intervals {
        let h0 = x[i + 1] - x[i];
        let h1 = x[i + 2] - x[i + 1];
        let hs = h0 + h1;
        total += hs / 6.0
            * ((2.0 - h1 / h0) * y[i] + hs * hs / (h0 * h1) * y[i + 1] + (2.0 - h0 / h1) * y[i + 2]);
        i += 2;
    }
    if intervals % 2 == 1 {
        let k = n - 3;
        let h0 = x[k + 1] - x[k];
        let h1 = x[k + 2] - x[k + 1];
        let a = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        let b = (h1 * h1 + 3.0 * h1 * h0) / (6.0 * h0);
        let c = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        total += a * y[k + 2] + b * y[k + 1] - c * y[k];
    }
    total
}
