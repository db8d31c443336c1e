//! Full pipeline per parameter triple: solve, decompose, count, compare.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sector::{build_sector_directions, NegativeDirectionSet, SectorOptions};
use crate::config::{Quadrature, ShootingConfig, SpectralConfig, DEFAULT_GRID_POINTS};
use crate::domain::{Domain, Nonlinearity, RadialGrid, RadialProfile};
use crate::radial::{auxiliary_z, henon_scaling_solve, reduced_profile, shoot_nodal_solution};
use crate::spectral::{
    even_weight, mode_spectra, morse_index, radial_nondegeneracy, reduced_radial_eigenpair,
    transport_radial_eigenpair, ModeSpectrum, MorseReport,
};
use crate::transform::map_domain;
use crate::Result;

/// Thresholds and resolutions of [`verify_theorems`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub points: usize,
    pub shooting: ShootingConfig,
    pub spectral: SpectralConfig,
    pub rule: Quadrature,
    /// Sup-norm agreement of direct shooting and the rescaled Lane–Emden profile.
    pub correspondence_tolerance: f64,
    /// Relative agreement of the mode-`m` eigenvalue with `m²` times the reduced one.
    pub scaling_tolerance: f64,
    /// Relative residual of the auxiliary function `z`.
    pub auxiliary_tolerance: f64,
    /// Minimal `|z(R)| / max|u′|` accepted as a nonzero boundary trace.
    pub boundary_trace_ratio: f64,
    /// Relative residual of a transported radial eigenpair.
    pub transport_tolerance: f64,
    /// Grid size of the reduced problem in the transport check.
    pub transport_points: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            points: DEFAULT_GRID_POINTS,
            // the correspondence bound is absolute while amplitudes reach ~10³
            shooting: ShootingConfig::with_tolerance(1e-12),
            spectral: SpectralConfig::default(),
            rule: Quadrature::Simpson,
            correspondence_tolerance: 1e-6,
            scaling_tolerance: 1e-4,
            auxiliary_tolerance: 1e-6,
            boundary_trace_ratio: 1e-3,
            transport_tolerance: 1e-5,
            transport_points: 3 * DEFAULT_GRID_POINTS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// One verdict with the number it was judged on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub value: Option<f64>,
    pub threshold: Option<f64>,
    pub detail: String,
    /// Diagnostics are reported but do not decide [`VerdictBundle::pass`].
    pub gating: bool,
}

impl Check {
    fn judged(name: &str, pass: bool, value: f64, threshold: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            value: Some(value),
            threshold: Some(threshold),
            detail,
            gating: true,
        }
    }

    fn diagnostic(mut self) -> Self {
        self.gating = false;
        self
    }

    fn skipped(name: &str, detail: &str) -> Self {
        Self {
            name: name.into(),
            status: Status::Skipped,
            value: None,
            threshold: None,
            detail: detail.into(),
            gating: true,
        }
    }
}

/// Summary of the computed radial solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub amplitude: f64,
    pub inner_slope: f64,
    pub nodal_sets: usize,
    pub zeros: Vec<f64>,
    pub residual: Option<f64>,
    pub boundary_defect: f64,
}

/// Negative counts of both eigenvalue measures per mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCounts {
    pub mode: u32,
    pub unweighted: usize,
    pub weighted: usize,
    pub unweighted_inertia: usize,
    pub weighted_inertia: usize,
    pub lowest_unweighted: f64,
    pub lowest_weighted: f64,
}

/// Everything [`verify_theorems`] computed for one parameter triple.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictBundle {
    pub alpha: f64,
    pub p: f64,
    pub nodal: usize,
    pub domain: Domain,
    pub profile: ProfileSummary,
    pub morse: MorseReport,
    pub general_bound: usize,
    pub modes: Vec<ModeCounts>,
    pub sector: Option<NegativeDirectionSet>,
    pub checks: Vec<Check>,
    /// Consequence of the computed index for least-energy nodal solutions.
    pub implication: String,
    pub pass: bool,
}

impl VerdictBundle {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Unweighted spectra, mode by mode.
    pub fn spectra(&self) -> &[ModeSpectrum] {
        &self.morse.per_mode
    }
}

/// Bound from nodal structure alone: 3, or `n + 2` when `f` is superlinear.
pub fn general_bound(nodal_sets: usize, superlinear: bool) -> usize {
    match nodal_sets {
        0 => 0,
        1 => usize::from(superlinear),
        n if superlinear => n + 2,
        _ => 3,
    }
}

/// Solves the Hénon problem `-Δu = |x|^α |u|^{p-1}u` for the radial solution
/// with `n` nodal sets and runs every check that applies to it.
pub fn verify_theorems(
    alpha: f64,
    p: f64,
    n: usize,
    domain: Domain,
    options: &VerifyOptions,
) -> Result<VerdictBundle> {
    let nonlinearity = Nonlinearity::henon(p)?;
    let grid = RadialGrid::midpoint(domain, options.points)?;
    let u = shoot_nodal_solution(&nonlinearity, alpha, &grid, n, &options.shooting)?;
    let mut checks = Vec::new();

    let morse = morse_index(&u, &nonlinearity, &options.spectral)?;
    let superlinear = nonlinearity.is_superlinear();
    let general = general_bound(u.nodal_sets, superlinear);
    checks.push(Check::judged(
        "index_lower_bound",
        morse.total >= general,
        morse.total as f64,
        general as f64,
        format!("Morse index {} against the nodal bound {general}", morse.total),
    ));
    checks.push(Check::judged(
        "radial_count",
        morse.radial_count == u.nodal_sets,
        morse.radial_count as f64,
        u.nodal_sets as f64,
        "radial negative eigenvalues against the number of nodal sets".into(),
    ));

    // Weighted spectra on the same modes, for inertia and monotonicity.
    let unweighted = &morse.per_mode;
    let weighted = mode_spectra(&u, &nonlinearity, morse.k_max, true, &options.spectral)?;
    let modes: Vec<ModeCounts> = unweighted
        .iter()
        .zip(&weighted)
        .map(|(a, b)| ModeCounts {
            mode: a.mode,
            unweighted: a.negative_count,
            weighted: b.negative_count,
            unweighted_inertia: a.inertia,
            weighted_inertia: b.inertia,
            lowest_unweighted: a.lowest(),
            lowest_weighted: b.lowest(),
        })
        .collect();
    let mismatched = modes
        .iter()
        .filter(|c| c.unweighted_inertia != c.weighted_inertia || c.unweighted != c.weighted)
        .count();
    checks.push(Check::judged(
        "inertia_equality",
        mismatched == 0,
        mismatched as f64,
        0.0,
        "modes whose weighted and unweighted negative counts differ".into(),
    ));
    let monotone_gap = unweighted
        .windows(2)
        .chain(weighted.windows(2))
        .map(|w| w[1].lowest() - w[0].lowest())
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::judged(
        "mode_monotonicity",
        monotone_gap > 0.0,
        monotone_gap,
        0.0,
        "smallest increase of the lowest eigenvalue from one mode to the next".into(),
    ));

    let sector = match even_weight(alpha) {
        Some(a) if a > 0 && u.nodal_sets >= 2 => {
            let sector_options = SectorOptions {
                spectral: options.spectral,
                shooting: options.shooting,
                rule: options.rule,
                reduced_points: Some(options.points),
                ..SectorOptions::default()
            };
            let set = build_sector_directions(&u, &nonlinearity, &sector_options)?;
            let sharp = morse.bound;
            checks.push(Check::judged(
                "even_weight_bound",
                morse.total >= sharp && set.len() >= sharp && set.all_negative && set.orthogonal,
                morse.total as f64,
                sharp as f64,
                format!(
                    "{} orthogonal negative directions ({} non-radial); Morse index {}",
                    set.len(),
                    set.non_radial_count(),
                    morse.total
                ),
            ));
            checks.push(Check::judged(
                "sector_eigenvalue_scaling",
                set.scaling_rel_error < options.scaling_tolerance,
                set.scaling_rel_error,
                options.scaling_tolerance,
                format!(
                    "weighted mode-{m} eigenvalue {} against m² × reduced mode-1 eigenvalue {}",
                    set.weighted_mode_m_eigenvalue,
                    set.reduced_eigenvalue,
                    m = set.m
                ),
            ));
            Some(set)
        }
        _ => {
            checks.push(Check::skipped(
                "even_weight_bound",
                "needs an even integer α > 0 and a nodal solution",
            ));
            None
        }
    };

    let rescaled = henon_scaling_solve(alpha, p, &grid, n, &options.shooting)?;
    let sup_difference = u
        .values
        .iter()
        .zip(&rescaled.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    checks.push(Check::judged(
        "scaling_correspondence",
        sup_difference < options.correspondence_tolerance,
        sup_difference,
        options.correspondence_tolerance,
        "sup |u - A·U(r^((α+2)/2))| between direct shooting and the rescaled Lane–Emden solution"
            .into(),
    ));

    let nondegeneracy = radial_nondegeneracy(&u, &nonlinearity, &options.spectral)?;
    checks.push(Check::judged(
        "radial_nondegeneracy",
        nondegeneracy.pass,
        nondegeneracy.margin,
        nondegeneracy.threshold,
        format!("closest weighted radial eigenvalue {}", nondegeneracy.closest),
    ));

    let z = auxiliary_z(&u, p)?;
    let trace_ok = z.boundary_ratio > options.boundary_trace_ratio;
    checks.push(Check::judged(
        "auxiliary_function",
        z.residual < options.auxiliary_tolerance && trace_ok,
        z.residual,
        options.auxiliary_tolerance,
        format!("boundary trace |z(R)| / max|u′| = {}", z.boundary_ratio),
    ));

    checks.push(radial_transport_check(&u, &nonlinearity, &weighted[0], options)?.diagnostic());

    let implication = if morse.total >= 3 {
        format!(
            "computed index {} ≥ 3 > 2: least-energy nodal solutions have index 2, so they are not radial",
            morse.total
        )
    } else {
        format!("computed index {} < 3: no conclusion about least-energy nodal solutions", morse.total)
    };
    let pass = checks.iter().all(|c| !c.gating || c.status != Status::Fail);
    Ok(VerdictBundle {
        alpha,
        p,
        nodal: n,
        domain,
        profile: summarize(&u),
        morse,
        general_bound: general,
        modes,
        sector,
        checks,
        implication,
        pass,
    })
}

fn summarize(u: &RadialProfile) -> ProfileSummary {
    let start = u.initial.unwrap_or(crate::domain::InitialData {
        radius: 0.0,
        value: u.values[0],
        slope: 0.0,
    });
    ProfileSummary {
        amplitude: if start.radius == 0.0 { start.value } else { 0.0 },
        inner_slope: start.slope,
        nodal_sets: u.nodal_sets,
        zeros: u.zeros.clone(),
        residual: u.residual,
        boundary_defect: u.boundary_defect(),
    }
}

/// Lowest reduced radial eigenvalue carried to the weighted problem, checked
/// against the weighted spectrum and by the plug-in residual.
fn radial_transport_check(
    u: &RadialProfile,
    nonlinearity: &Nonlinearity,
    weighted_radial: &ModeSpectrum,
    options: &VerifyOptions,
) -> Result<Check> {
    let kappa = 2.0 / (u.alpha + 2.0);
    let s_grid = RadialGrid::midpoint(map_domain(u.grid.domain(), kappa)?, options.transport_points)?;
    let reduced = reduced_profile(u, nonlinearity, &s_grid, &options.shooting)?;
    let (lambda, psi) = reduced_radial_eigenpair(
        &reduced,
        nonlinearity,
        u.alpha,
        0,
        options.spectral.eigen_tolerance,
    )?;
    let pair = transport_radial_eigenpair(lambda, &psi, &reduced, nonlinearity, u.alpha)?;
    let direct = weighted_radial.lowest();
    let rel = (pair.eigenvalue - direct).abs() / direct.abs();
    Ok(Check::judged(
        "radial_transport",
        pair.residual < options.transport_tolerance && rel < options.scaling_tolerance,
        pair.residual,
        options.transport_tolerance,
        format!(
            "transported eigenvalue {} against weighted radial eigenvalue {direct} (relative gap {rel:e})",
            pair.eigenvalue
        ),
    ))
}

/// One entry of a verification sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteCase {
    pub alpha: f64,
    pub p: f64,
    pub nodal: usize,
    pub bundle: Option<VerdictBundle>,
    pub error: Option<String>,
}

impl SuiteCase {
    pub fn passed(&self) -> bool {
        self.bundle.as_ref().is_some_and(|b| b.pass)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub domain: Domain,
    pub cases: Vec<SuiteCase>,
    pub passed: usize,
    pub failed: usize,
    pub pass: bool,
}

/// `α ∈ {0..4} × p ∈ {2, 3, 5} × n ∈ {1, 2, 3}` followed by
/// `α ∈ {6} × p = 3 × n = 2` for the even-weight sweep.
pub fn default_matrix() -> Vec<(f64, f64, usize)> {
    let mut cases = Vec::new();
    for alpha in 0..=4 {
        for p in [2.0, 3.0, 5.0] {
            for n in 1..=3 {
                cases.push((alpha as f64, p, n));
            }
        }
    }
    cases.push((6.0, 3.0, 2));
    cases
}

/// Runs [`verify_theorems`] over `cases` in parallel; results keep the
/// input order.
pub fn run_suite(
    cases: &[(f64, f64, usize)],
    domain: Domain,
    options: &VerifyOptions,
) -> SuiteReport {
    let results: Vec<SuiteCase> = cases
        .par_iter()
        .map(|&(alpha, p, nodal)| match verify_theorems(alpha, p, nodal, domain, options) {
            Ok(bundle) => SuiteCase {
                alpha,
                p,
                nodal,
                bundle: Some(bundle),
                error: None,
            },
            Err(e) => SuiteCase {
                alpha,
                p,
                nodal,
                bundle: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let passed = results.iter().filter(|c| c.passed()).count();
    let failed = results.len() - passed;
    SuiteReport {
        domain,
        cases: results,
        passed,
        failed,
        pass: failed == 0,
    }
}
