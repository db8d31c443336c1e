//! Tolerances and solver settings shared by every pipeline.
//!
//! All thresholds that decide a pass/fail verdict live here so a report can
//! embed the exact values it was produced with.

use serde::{Deserialize, Serialize};

/// The three tolerances every verification report is judged against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative/absolute local error target of the radial integrator.
    pub ode: f64,
    /// Absolute bracket width for eigenvalues; also the band around zero
    /// inside which an eigenvalue is flagged degenerate.
    pub eigen: f64,
    /// Relative discrepancy allowed for integral identities.
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ode: 1e-10,
            eigen: 1e-8,
            identity: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> crate::Result<()> {
        for (name, value) in [
            ("ode tolerance", self.ode),
            ("eigen tolerance", self.eigen),
            ("identity tolerance", self.identity),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(crate::Error::param(
                    "tolerance",
                    format!("{name} must be positive, got {value}"),
                ));
            }
        }
        Ok(())
    }
}

/// Composite quadrature rule used for radial integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    /// Composite trapezoid, second order.
    #[default]
    Trapezoid,
    /// Composite Simpson for (possibly irregularly) spaced nodes, fourth order.
    Simpson,
}

/// Settings for the shooting solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingConfig {
    pub ode_tolerance: f64,
    pub max_bisections: usize,
    /// Radius below which the analytic origin series replaces integration.
    pub series_cutoff: f64,
    /// |u| beyond this value is reported as divergence.
    pub blowup_bound: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            ode_tolerance: Tolerances::default().ode,
            max_bisections: 200,
            series_cutoff: 1e-4,
            blowup_bound: 1e8,
        }
    }
}

impl ShootingConfig {
    pub fn with_tolerance(ode_tolerance: f64) -> Self {
        Self {
            ode_tolerance,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.ode_tolerance > 0.0) {
            return Err(crate::Error::param("ode_tolerance", "must be positive"));
        }
        if !(self.series_cutoff > 0.0) {
            return Err(crate::Error::param("series_cutoff", "must be positive"));
        }
        if self.max_bisections == 0 {
            return Err(crate::Error::param("max_bisections", "must be at least 1"));
        }
        if !(self.blowup_bound > 0.0) {
            return Err(crate::Error::param("blowup_bound", "must be positive"));
        }
        Ok(())
    }
}

/// Default number of grid points for profiles and mode problems.
pub const DEFAULT_GRID_POINTS: usize = 4000;

/// Settings for per-mode eigenvalue computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    /// Minimum number of eigenvalues computed per mode; the Morse pipeline
    /// raises this to `n(u) + 2` when larger.
    pub eigen_count: usize,
    pub eigen_tolerance: f64,
    /// Hard cap on the angular modes the Morse index may scan.
    pub max_modes: u32,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            eigen_count: 8,
            eigen_tolerance: Tolerances::default().eigen,
            max_modes: 4096,
        }
    }
}
