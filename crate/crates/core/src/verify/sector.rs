//! Negative directions for even weights `α = 2(m-1)`.
//!
//! With `κ = 1/m`, a mode-1 eigenfunction `b(s)·trig(σ)` of the reduced
//! problem on `Ω_κ` maps to `b(r^m)·trig(mθ)`, an eigenfunction of the
//! weighted problem with eigenvalue multiplied by `m²`. Its nodal sets are
//! `2m` angular sectors. Modes `1..m` of the weighted problem each carry a
//! negative eigenvalue; together with the radial ones this gives
//! `n(u) + 2m = n(u) + α + 2` directions on which `Q_u` is negative
//! definite.

use serde::{Deserialize, Serialize};

use super::quadform::{bilinear_q, weighted_inner};
use crate::config::{Quadrature, ShootingConfig, SpectralConfig};
use crate::domain::{
    sign_changes, AngularFourierFunction, FourierTerm, Nonlinearity, Parity, RadialFunction,
    RadialGrid, RadialProfile,
};
use crate::radial::reduced_profile;
use crate::spectral::{even_weight, mode_eigenpair, ModeProblem};
use crate::transform::{map_domain, push_forward_fourier, SectorTransform};
use crate::{Error, Result};

/// Settings for [`build_sector_directions`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorOptions {
    pub spectral: SpectralConfig,
    pub shooting: ShootingConfig,
    pub rule: Quadrature,
    /// Grid size of the reduced problem; `None` reuses the profile's size.
    pub reduced_points: Option<usize>,
    /// Relative size of same-mode Gram off-diagonals still counted as zero.
    pub orthogonality_tolerance: f64,
}

impl Default for SectorOptions {
    fn default() -> Self {
        Self {
            spectral: SpectralConfig::default(),
            shooting: ShootingConfig::default(),
            rule: Quadrature::Simpson,
            reduced_points: None,
            orthogonality_tolerance: 1e-6,
        }
    }
}

/// One negative direction `a(r)·trig(kθ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativeDirection {
    pub label: String,
    pub mode: u32,
    pub parity: Parity,
    /// Eigenvalue of the weighted problem the direction comes from.
    pub eigenvalue: f64,
}

/// Mutually orthogonal directions on which `Q_u` is negative.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NegativeDirectionSet {
    pub m: u32,
    /// Lowest mode-1 eigenvalue of the reduced problem.
    pub reduced_eigenvalue: f64,
    /// Lowest weighted mode-`m` eigenvalue, solved directly.
    pub weighted_mode_m_eigenvalue: f64,
    /// `|weighted_mode_m_eigenvalue - m² reduced_eigenvalue| / |m² reduced_eigenvalue|`.
    pub scaling_rel_error: f64,
    /// Sign changes of the pushed-forward eigenfunction around one circle.
    pub sector_sign_changes: usize,
    /// Lowest weighted eigenvalue of each mode `1..=m`.
    pub mode_eigenvalues: Vec<(u32, f64)>,
    pub directions: Vec<NegativeDirection>,
    #[serde(skip)]
    pub functions: Vec<AngularFourierFunction>,
    pub gram_q: Vec<Vec<f64>>,
    pub gram_weight: Vec<Vec<f64>>,
    /// Largest `|G_ij| / √(G_ii G_jj)` over `i ≠ j`, for both matrices.
    pub max_offdiag_q: f64,
    pub max_offdiag_weight: f64,
    pub orthogonal: bool,
    pub all_negative: bool,
}

impl NegativeDirectionSet {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn non_radial_count(&self) -> usize {
        self.directions.iter().filter(|d| d.mode > 0).count()
    }
}

pub fn build_sector_directions(
    profile: &RadialProfile,
    nonlinearity: &Nonlinearity,
    options: &SectorOptions,
) -> Result<NegativeDirectionSet> {
    let alpha = even_weight(profile.alpha)
        .ok_or_else(|| Error::param("alpha", "the sector construction needs an even integer α"))?;
    let sector = SectorTransform::for_even_weight(alpha)?;
    let m = sector.m();
    let kappa = sector.kappa();
    let tolerance = options.spectral.eigen_tolerance;
    let domain = profile.grid.domain();

    // (a) reduced mode-1 eigenpair
    let points = options.reduced_points.unwrap_or(profile.grid.len());
    let s_grid = RadialGrid::midpoint(map_domain(domain, kappa)?, points)?;
    let reduced = reduced_profile(profile, nonlinearity, &s_grid, &options.shooting)?;
    let potential = reduced
        .values
        .iter()
        .map(|&v| kappa * kappa * nonlinearity.fprime(v))
        .collect();
    let reduced_problem = ModeProblem::new(s_grid.clone(), potential, 1, false, 0.0)?;
    let reduced_pair = mode_eigenpair(&reduced_problem, 0, tolerance)?;
    if reduced_pair.eigenvalue >= 0.0 {
        return Err(Error::DiscretizationAlarm(format!(
            "reduced mode-1 eigenvalue {} is not negative",
            reduced_pair.eigenvalue
        )));
    }
    let b = RadialFunction::new(s_grid.clone(), reduced_pair.values, reduced_pair.derivatives)?;

    // (b) push forward; count angular sign changes on the circle where |a| peaks
    let psi = AngularFourierFunction::single(b.clone(), 1, Parity::Cosine)?;
    let pushed = push_forward_fourier(&psi, &sector, &domain)?;
    let peak = (0..b.values.len())
        .max_by(|&i, &j| b.values[i].abs().total_cmp(&b.values[j].abs()))
        .unwrap_or(0);
    let samples = 720 * m as usize;
    let around: Vec<f64> = (0..samples)
        .map(|j| {
            let theta = (j as f64 + 0.5) * std::f64::consts::TAU / samples as f64;
            pushed.value_at(peak, theta)
        })
        .collect();
    let mut closed = around.clone();
    closed.push(around[0]);
    let sector_sign_changes = sign_changes(&closed, 0.0);

    let base = ModeProblem::linearization(profile, nonlinearity, 0, true)?;
    let mut mode_eigenvalues = Vec::new();
    let mut directions = Vec::new();
    let mut functions = Vec::new();
    let mut push = |label: String, mode: u32, parity: Parity, eigenvalue: f64, a: &RadialFunction| -> Result<()> {
        functions.push(AngularFourierFunction::new(
            profile.grid.clone(),
            vec![FourierTerm {
                mode,
                parity,
                values: a.values.clone(),
                derivatives: a.derivatives.clone(),
            }],
        )?);
        directions.push(NegativeDirection {
            label,
            mode,
            parity,
            eigenvalue,
        });
        Ok(())
    };

    // radial directions: negative weighted mode-0 eigenpairs
    for j in 0.. {
        let pair = mode_eigenpair(&base, j, tolerance)?;
        if pair.eigenvalue >= -tolerance {
            break;
        }
        let a = RadialFunction::new(profile.grid.clone(), pair.values, pair.derivatives)?;
        push(format!("radial-{}", j + 1), 0, Parity::Cosine, pair.eigenvalue, &a)?;
    }

    // sub-sector modes 1..m-1 by direct weighted eigensolves
    for k in 1..m {
        let pair = mode_eigenpair(&base.with_mode(k), 0, tolerance)?;
        mode_eigenvalues.push((k, pair.eigenvalue));
        if pair.eigenvalue >= 0.0 {
            return Err(Error::DiscretizationAlarm(format!(
                "weighted mode-{k} lowest eigenvalue {} is not negative",
                pair.eigenvalue
            )));
        }
        let a = RadialFunction::new(profile.grid.clone(), pair.values, pair.derivatives)?;
        for parity in [Parity::Cosine, Parity::Sine] {
            push(format!("mode-{k}-{parity:?}").to_lowercase(), k, parity, pair.eigenvalue, &a)?;
        }
    }

    // mode m from the pushed-forward reduced eigenfunction
    let direct_m = mode_eigenpair(&base.with_mode(m), 0, tolerance)?.eigenvalue;
    mode_eigenvalues.push((m, direct_m));
    let predicted = reduced_pair.eigenvalue * (m * m) as f64;
    if direct_m >= 0.0 {
        return Err(Error::DiscretizationAlarm(format!(
            "weighted mode-{m} lowest eigenvalue {direct_m} is not negative"
        )));
    }
    let resampled = resample_power(&b, 1, &profile.grid, m as f64)?;
    for parity in [Parity::Cosine, Parity::Sine] {
        push(format!("sector-{m}-{parity:?}").to_lowercase(), m, parity, predicted, &resampled)?;
    }

    let count = functions.len();
    let mut gram_q = vec![vec![0.0; count]; count];
    let mut gram_weight = vec![vec![0.0; count]; count];
    for i in 0..count {
        for j in i..count {
            let q = bilinear_q(profile, nonlinearity, &functions[i], &functions[j], options.rule)?;
            let w = weighted_inner(&functions[i], &functions[j], profile.alpha, options.rule)?;
            gram_q[i][j] = q;
            gram_q[j][i] = q;
            gram_weight[i][j] = w;
            gram_weight[j][i] = w;
        }
    }
    let max_offdiag_q = max_offdiagonal(&gram_q);
    let max_offdiag_weight = max_offdiagonal(&gram_weight);
    let orthogonal = max_offdiag_q <= options.orthogonality_tolerance
        && max_offdiag_weight <= options.orthogonality_tolerance;
    let all_negative = (0..count).all(|i| gram_q[i][i] < 0.0);
    Ok(NegativeDirectionSet {
        m,
        reduced_eigenvalue: reduced_pair.eigenvalue,
        weighted_mode_m_eigenvalue: direct_m,
        scaling_rel_error: (direct_m - predicted).abs() / predicted.abs(),
        sector_sign_changes,
        mode_eigenvalues,
        directions,
        functions,
        gram_q,
        gram_weight,
        max_offdiag_q,
        max_offdiag_weight,
        orthogonal,
        all_negative,
    })
}

fn max_offdiagonal(gram: &[Vec<f64>]) -> f64 {
    let n = gram.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let scale = (gram[i][i] * gram[j][j]).abs().sqrt();
                worst = worst.max(gram[i][j].abs() / scale);
            }
        }
    }
    worst
}

/// `a(r) = b(r^power)` on `grid`, with `a′(r) = power · r^{power-1} b′(r^power)`.
/// `b` is evaluated by cubic Hermite interpolation; below the first node of a
/// ball grid it is continued as `b(s₀)(s/s₀)^mode`.
pub fn resample_power(
    b: &RadialFunction,
    mode: u32,
    grid: &RadialGrid,
    power: f64,
) -> Result<RadialFunction> {
    let s = b.grid.nodes();
    let n = s.len();
    let last = s[n - 1];
    let mut values = Vec::with_capacity(grid.len());
    let mut derivatives = Vec::with_capacity(grid.len());
    for &r in grid.nodes() {
        let x = r.powf(power);
        if x > last * (1.0 + 1e-12) || (!b.grid.domain().is_ball() && x < s[0] * (1.0 - 1e-12)) {
            return Err(Error::param(
                "grid",
                format!("r^{power} = {x} lies outside the coefficient grid"),
            ));
        }
        let (v, d) = if x <= s[0] {
            let k = mode as f64;
            let v0 = b.values[0];
            if mode == 0 {
                (v0, 0.0)
            } else {
                (v0 * (x / s[0]).powf(k), k * v0 * x.powf(k - 1.0) / s[0].powf(k))
            }
        } else {
            let j = s.partition_point(|&t| t <= x).clamp(1, n - 1) - 1;
            hermite(s[j], s[j + 1], b.values[j], b.values[j + 1], b.derivatives[j], b.derivatives[j + 1], x)
        };
        values.push(v);
        derivatives.push(d * power * r.powf(power - 1.0));
    }
    RadialFunction::new(grid.clone(), values, derivatives)
}

fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let value = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * d1;
    let slope = ((6.0 * t2 - 6.0 * t) * y0 + (-6.0 * t2 + 6.0 * t) * y1) / h
        + (3.0 * t2 - 4.0 * t + 1.0) * d0
        + (3.0 * t2 - 2.0 * t) * d1;
    (value, slope)
}
