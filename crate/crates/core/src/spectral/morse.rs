use serde::{Deserialize, Serialize};

use super::mode::{
    assemble_mode_operator, eigenfunction_derivative, spectrum_of, ModeProblem, ModeSpectrum,
};
use crate::config::SpectralConfig;
use crate::domain::{Nonlinearity, RadialFunction, RadialProfile};
use crate::{Error, Result};

/// An eigenvalue flagged as numerically zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegenerateFlag {
    pub mode: u32,
    pub eigenvalue: f64,
}

/// Per-mode negative counts assembled into the Morse index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorseReport {
    pub per_mode: Vec<ModeSpectrum>,
    pub radial_count: usize,
    /// `radial_count + 2 Σ_{k≥1} negative_count(k)`.
    pub total: usize,
    /// First mode without negative eigenvalues.
    pub k_max: u32,
    pub bound: usize,
    pub verdict: bool,
    pub degenerate_flags: Vec<DegenerateFlag>,
    pub nodal_sets: usize,
    pub alpha: f64,
    pub superlinear: bool,
}

/// Lower bound on the Morse index of a radial solution with `nodal_sets`
/// nodal sets.
///
/// Nodal solutions have index at least 3, or `n + 2` for superlinear `f`;
/// for an even integer weight exponent `α > 0` this sharpens to `α + 3`, or
/// `α + n + 2` for superlinear `f`. A positive solution (`n = 1`) of a
/// superlinear problem has index at least 1.
pub fn theoretical_bound(alpha: f64, nodal_sets: usize, superlinear: bool) -> usize {
    if nodal_sets <= 1 {
        return usize::from(superlinear && nodal_sets == 1);
    }
    let base = if superlinear { nodal_sets + 2 } else { 3 };
    match even_weight(alpha) {
        Some(a) if a > 0 => a as usize + if superlinear { nodal_sets + 2 } else { 3 },
        _ => base,
    }
}

/// `α` as an even integer, when it is one.
pub fn even_weight(alpha: f64) -> Option<u32> {
    let rounded = alpha.round();
    (alpha >= 0.0 && (alpha - rounded).abs() < 1e-12 && rounded as u64 % 2 == 0)
        .then_some(rounded as u32)
}

/// Morse index of the unweighted linearization `-Δ - |x|^α f′(u)`.
pub fn morse_index(
    profile: &RadialProfile,
    nonlinearity: &Nonlinearity,
    config: &SpectralConfig,
) -> Result<MorseReport> {
    let q = config.eigen_count.max(profile.nodal_sets + 2);
    let base = ModeProblem::linearization(profile, nonlinearity, 0, false)?;
    let mut per_mode = Vec::new();
    let mut k = 0u32;
    loop {
        let problem = base.with_mode(k);
        let system = assemble_mode_operator(&problem)?;
        let spectrum = spectrum_of(&system, &problem, q, config.eigen_tolerance)?;
        let done = spectrum.negative_count == 0;
        per_mode.push(spectrum);
        if done {
            break;
        }
        k += 1;
        if k > config.max_modes {
            return Err(Error::DiscretizationAlarm(format!(
                "negative eigenvalues persist beyond mode {}",
                config.max_modes
            )));
        }
    }
    let radial_count = per_mode[0].negative_count;
    let total = radial_count + 2 * per_mode[1..].iter().map(|s| s.negative_count).sum::<usize>();
    let degenerate_flags = per_mode
        .iter()
        .flat_map(|s| {
            s.degenerate.iter().map(move |&eigenvalue| DegenerateFlag {
                mode: s.mode,
                eigenvalue,
            })
        })
        .collect();
    let superlinear = nonlinearity.is_superlinear();
    let bound = theoretical_bound(profile.alpha, profile.nodal_sets, superlinear);
    Ok(MorseReport {
        per_mode,
        radial_count,
        total,
        k_max: k,
        bound,
        verdict: total >= bound,
        degenerate_flags,
        nodal_sets: profile.nodal_sets,
        alpha: profile.alpha,
        superlinear,
    })
}

/// Spectra of modes `0..=max_mode` for either eigenvalue measure.
pub fn mode_spectra(
    profile: &RadialProfile,
    nonlinearity: &Nonlinearity,
    max_mode: u32,
    weighted: bool,
    config: &SpectralConfig,
) -> Result<Vec<ModeSpectrum>> {
    let q = config.eigen_count.max(profile.nodal_sets + 2);
    let base = ModeProblem::linearization(profile, nonlinearity, 0, weighted)?;
    (0..=max_mode)
        .map(|k| super::mode::mode_spectrum(&base.with_mode(k), q, config.eigen_tolerance))
        .collect()
}

/// Distance of the weighted radial spectrum from zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NondegeneracyReport {
    /// `min |λ|` over the computed weighted mode-0 eigenvalues.
    pub margin: f64,
    /// The eigenvalue attaining the margin.
    pub closest: f64,
    pub eigenvalues: Vec<f64>,
    /// `10 ×` eigenvalue tolerance.
    pub threshold: f64,
    pub degenerate: bool,
    pub pass: bool,
}

pub fn radial_nondegeneracy(
    profile: &RadialProfile,
    nonlinearity: &Nonlinearity,
    config: &SpectralConfig,
) -> Result<NondegeneracyReport> {
    let problem = ModeProblem::linearization(profile, nonlinearity, 0, true)?;
    nondegeneracy_of(&problem, profile.nodal_sets + 2, config)
}

/// Same check for an arbitrary mode problem.
pub fn nondegeneracy_of(
    problem: &ModeProblem,
    q: usize,
    config: &SpectralConfig,
) -> Result<NondegeneracyReport> {
    let spectrum = super::mode::mode_spectrum(problem, q.max(2), config.eigen_tolerance)?;
    let closest = spectrum
        .eigenvalues
        .iter()
        .copied()
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        .expect("at least one eigenvalue");
    let margin = closest.abs();
    let threshold = 10.0 * config.eigen_tolerance;
    Ok(NondegeneracyReport {
        margin,
        closest,
        eigenvalues: spectrum.eigenvalues.clone(),
        threshold,
        degenerate: spectrum.is_degenerate(),
        pass: margin > threshold,
    })
}

/// A reduced radial eigenpair carried back to the weighted problem.
#[derive(Debug, Clone)]
pub struct TransportedEigenpair {
    /// `Λ = λ ((α+2)/2)²`.
    pub eigenvalue: f64,
    /// `φ(r) = ψ(r^{(α+2)/2})`.
    pub function: RadialFunction,
    /// Max of `|-φ″ - φ′/r - r^α f′(u)φ - Λ r^α φ|` over interior nodes,
    /// relative to `max |Λ r^α φ|`.
    pub residual: f64,
}

/// Carries a mode-0 eigenpair `(λ, ψ)` of `-Δψ - κ² f′(v)ψ = λψ` on the
/// mapped domain to `-Δφ - |x|^α f′(u)φ = Λ|x|^α φ`, where
/// `u(r) = v(r^{1/κ})` and `κ = 2/(α+2)`. `reduced` is the profile `v`
/// whose grid `psi` shares.
pub fn transport_radial_eigenpair(
    eigenvalue: f64,
    psi: &RadialFunction,
    reduced: &RadialProfile,
    nonlinearity: &Nonlinearity,
    alpha: f64,
) -> Result<TransportedEigenpair> {
    if !psi.grid.same_nodes(&reduced.grid) {
        return Err(Error::GridMismatch);
    }
    let kappa = 2.0 / (alpha + 2.0);
    let grid = psi.grid.map_power(kappa);
    let s = psi.grid.nodes();
    let r = grid.nodes();
    let values = psi.values.clone();
    let derivatives = psi
        .derivatives
        .iter()
        .zip(s.iter().zip(r))
        .map(|(d, (&s, &r))| d * s / (kappa * r))
        .collect();
    let transported = eigenvalue / (kappa * kappa);
    let function = RadialFunction::new(grid.clone(), values, derivatives)?;

    // Derivatives are taken in s, where the grid is uniform:
    // Δφ(r) = s (ψ′(s) + s ψ″(s)) / (κ² r²). On a ball ψ is even in s, so
    // mirrored nodes keep the stencil centred near the origin.
    let ghosts = if psi.grid.domain().is_ball() { STENCIL / 2 } else { 0 };
    let nodes: Vec<f64> = s[..ghosts].iter().rev().map(|x| -x).chain(s.iter().copied()).collect();
    let values: Vec<f64> = psi.values[..ghosts]
        .iter()
        .rev()
        .chain(&psi.values)
        .copied()
        .collect();
    let n = nodes.len();
    let mut residual = 0.0f64;
    let mut scale = 0.0f64;
    for i in ghosts..n {
        let node = i - ghosts;
        if grid.is_boundary_node(node) || n < STENCIL {
            continue;
        }
        let start = i.saturating_sub(STENCIL / 2).min(n - STENCIL);
        // f′(u) may have a kink where u changes sign (p < 3); the stencil
        // assumes smoothness, so windows across a zero are skipped.
        let profile_window = (start.saturating_sub(ghosts)..(start + STENCIL).saturating_sub(ghosts))
            .map(|j| reduced.values[j]);
        if crosses_zero(profile_window) {
            continue;
        }
        let [d1, d2] = fornberg_weights(nodes[i], &nodes[start..start + STENCIL]);
        let window = &values[start..start + STENCIL];
        let first: f64 = d1.iter().zip(window).map(|(w, v)| w * v).sum();
        let second: f64 = d2.iter().zip(window).map(|(w, v)| w * v).sum();
        let (sv, rv) = (s[node], r[node]);
        let laplacian = sv * (first + sv * second) / (kappa * kappa * rv * rv);
        let weight = rv.powf(alpha);
        let phi = values[i];
        let eigen = transported * weight * phi;
        let potential = weight * nonlinearity.fprime(reduced.values[node]) * phi;
        let res = -laplacian - potential - eigen;
        residual = residual.max(res.abs());
        scale = scale.max(laplacian.abs()).max(potential.abs()).max(eigen.abs());
    }
    Ok(TransportedEigenpair {
        eigenvalue: transported,
        function,
        residual: if scale > 0.0 { residual / scale } else { residual },
    })
}

const STENCIL: usize = 7;

fn crosses_zero(mut values: impl Iterator<Item = f64>) -> bool {
    let Some(first) = values.next() else {
        return false;
    };
    values.any(|v| v * first <= 0.0)
}

/// Weights of the first and second derivative at `x0` from values at
/// arbitrary nodes (Fornberg's recursion).
fn fornberg_weights(x0: f64, nodes: &[f64]) -> [Vec<f64>; 2] {
    let len = nodes.len();
    let mut c = vec![vec![0.0f64; len]; 3];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..len {
        let mn = i.min(2);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    let mut c = c.into_iter().skip(1);
    [c.next().unwrap_or_default(), c.next().unwrap_or_default()]
}

/// Mode-0 eigenpairs of the reduced problem `-Δψ - κ² f′(v)ψ = λψ`.
pub fn reduced_radial_eigenpair(
    reduced: &RadialProfile,
    nonlinearity: &Nonlinearity,
    alpha: f64,
    index: usize,
    tolerance: f64,
) -> Result<(f64, RadialFunction)> {
    let kappa = 2.0 / (alpha + 2.0);
    let potential = reduced
        .values
        .iter()
        .map(|&v| kappa * kappa * nonlinearity.fprime(v))
        .collect();
    let problem = ModeProblem::new(reduced.grid.clone(), potential, 0, false, 0.0)?;
    let pair = super::mode::mode_eigenpair(&problem, index, tolerance)?;
    let derivatives = eigenfunction_derivative(&reduced.grid, &pair.values, 0);
    Ok((
        pair.eigenvalue,
        RadialFunction::new(reduced.grid.clone(), pair.values, derivatives)?,
    ))
}
