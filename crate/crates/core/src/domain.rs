//! Geometry, radial grids and the function types shared by all modules.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A ball (`inner_radius == 0`) or an annulus centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    inner_radius: f64,
    outer_radius: f64,
}

impl Domain {
    pub fn new(inner_radius: f64, outer_radius: f64) -> Result<Self> {
        if !(inner_radius.is_finite() && outer_radius.is_finite()) {
            return Err(Error::InvalidDomain("radii must be finite".into()));
        }
        if inner_radius < 0.0 {
            return Err(Error::InvalidDomain("inner radius must be ≥ 0".into()));
        }
        if !(inner_radius < outer_radius) {
            return Err(Error::InvalidDomain("inner < outer required".into()));
        }
        Ok(Self {
            inner_radius,
            outer_radius,
        })
    }

    pub fn ball(radius: f64) -> Result<Self> {
        Self::new(0.0, radius)
    }

    pub fn annulus(inner_radius: f64, outer_radius: f64) -> Result<Self> {
        if inner_radius <= 0.0 {
            return Err(Error::InvalidDomain(
                "annulus inner radius must be positive".into(),
            ));
        }
        Self::new(inner_radius, outer_radius)
    }

    pub fn unit_ball() -> Self {
        Self {
            inner_radius: 0.0,
            outer_radius: 1.0,
        }
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn is_ball(&self) -> bool {
        self.inner_radius == 0.0
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ball() {
            write!(f, "ball(R={})", self.outer_radius)
        } else {
            write!(f, "annulus({}, {})", self.inner_radius, self.outer_radius)
        }
    }
}

/// Strictly increasing radii covering a [`Domain`].
///
/// Ball grids never contain `r = 0`; the last node is always the outer
/// radius. Annulus grids start at the inner radius.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    domain: Domain,
    nodes: Arc<[f64]>,
}

/// Builds a uniform grid of `points` nodes on
/// `[max(inner_radius, origin_offset), outer_radius]`.
///
/// For a ball the offset must satisfy `0 < origin_offset < outer_radius / points`.
pub fn make_grid(domain: Domain, points: usize, origin_offset: f64) -> Result<RadialGrid> {
    if points < 2 {
        return Err(Error::InvalidGrid(format!(
            "at least 2 points required, got {points}"
        )));
    }
    let outer = domain.outer_radius();
    let start = if domain.is_ball() {
        if !(origin_offset > 0.0 && origin_offset < outer / points as f64) {
            return Err(Error::InvalidGrid(format!(
                "origin offset {origin_offset} must lie in (0, {})",
                outer / points as f64
            )));
        }
        origin_offset
    } else {
        if !(origin_offset >= 0.0) {
            return Err(Error::InvalidGrid("origin offset must be ≥ 0".into()));
        }
        domain.inner_radius().max(origin_offset)
    };
    if start >= outer {
        return Err(Error::InvalidGrid("offset beyond the outer radius".into()));
    }
    let h = (outer - start) / (points - 1) as f64;
    let mut nodes: Vec<f64> = (0..points).map(|i| start + h * i as f64).collect();
    nodes[points - 1] = outer;
    Ok(RadialGrid {
        domain,
        nodes: nodes.into(),
    })
}

impl RadialGrid {
    /// Uniform grid whose ball offset is half a cell, so the first cell face
    /// sits exactly at the origin. This is the grid every mode discretization
    /// expects.
    pub fn midpoint(domain: Domain, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidGrid(format!(
                "at least 2 points required, got {points}"
            )));
        }
        if domain.is_ball() {
            let h = domain.outer_radius() / (points as f64 - 0.5);
            make_grid(domain, points, 0.5 * h)
        } else {
            make_grid(domain, points, 0.0)
        }
    }

    /// Wraps explicit nodes after validating them against `domain`.
    pub fn from_nodes(domain: Domain, nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidGrid("at least 2 nodes required".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("nodes must be strictly increasing".into()));
        }
        let first = nodes[0];
        let last = *nodes.last().unwrap();
        let scale = domain.outer_radius();
        if (last - domain.outer_radius()).abs() > 1e-12 * scale {
            return Err(Error::InvalidGrid(format!(
                "last node {last} differs from the outer radius {}",
                domain.outer_radius()
            )));
        }
        if domain.is_ball() {
            if !(first > 0.0) {
                return Err(Error::InvalidGrid("ball grids must exclude r = 0".into()));
            }
        } else if first < domain.inner_radius() * (1.0 - 1e-12) {
            return Err(Error::InvalidGrid(
                "nodes extend below the inner radius".into(),
            ));
        }
        let mut nodes = nodes;
        let n = nodes.len();
        nodes[n - 1] = domain.outer_radius();
        Ok(Self {
            domain,
            nodes: nodes.into(),
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.nodes[0]
    }

    pub fn last(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Common spacing when the grid is uniform to 1e-9 relative.
    pub fn uniform_spacing(&self) -> Option<f64> {
        let n = self.nodes.len();
        let h = (self.last() - self.first()) / (n - 1) as f64;
        let uniform = self
            .nodes
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
        uniform.then_some(h)
    }

    /// Whether node `i` carries a Dirichlet condition.
    pub fn is_boundary_node(&self, i: usize) -> bool {
        i + 1 == self.nodes.len() || (i == 0 && !self.domain.is_ball())
    }

    /// True when both grids share the same nodes (and hence the same domain).
    pub fn same_nodes(&self, other: &RadialGrid) -> bool {
        Arc::ptr_eq(&self.nodes, &other.nodes) || self.nodes == other.nodes
    }

    /// Image of the grid under `r ↦ r^power`, on the correspondingly mapped domain.
    pub(crate) fn map_power(&self, power: f64) -> RadialGrid {
        let domain = Domain {
            inner_radius: self.domain.inner_radius.powf(power),
            outer_radius: self.domain.outer_radius.powf(power),
        };
        let mut nodes: Vec<f64> = self.nodes.iter().map(|r| r.powf(power)).collect();
        let n = nodes.len();
        nodes[n - 1] = domain.outer_radius;
        if !domain.is_ball() {
            nodes[0] = nodes[0].max(domain.inner_radius);
        }
        RadialGrid {
            domain,
            nodes: nodes.into(),
        }
    }
}

/// Samples of a radial function and its derivative on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
}

impl RadialFunction {
    pub fn new(grid: RadialGrid, values: Vec<f64>, derivatives: Vec<f64>) -> Result<Self> {
        check_len(grid.len(), values.len())?;
        check_len(grid.len(), derivatives.len())?;
        Ok(Self {
            grid,
            values,
            derivatives,
        })
    }

    /// Samples a closed-form function returning `(value, derivative)`.
    pub fn from_fn(grid: &RadialGrid, mut f: impl FnMut(f64) -> (f64, f64)) -> Self {
        let (values, derivatives) = grid.nodes().iter().map(|&r| f(r)).unzip();
        Self {
            grid: grid.clone(),
            values,
            derivatives,
        }
    }

    /// Derivatives by second-order finite differences (one-sided at the ends).
    pub fn from_values(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        check_len(grid.len(), values.len())?;
        let derivatives = finite_difference_derivative(grid.nodes(), &values);
        Ok(Self {
            grid,
            values,
            derivatives,
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
            derivatives: self.derivatives.iter().map(|v| v * factor).collect(),
        }
    }
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(())
}

/// Second-order derivative estimate on an arbitrary strictly increasing grid.
pub(crate) fn finite_difference_derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut d = vec![0.0; n];
    if n < 3 {
        let slope = (y[n - 1] - y[0]) / (x[n - 1] - x[0]);
        d.iter_mut().for_each(|v| *v = slope);
        return d;
    }
    // Three-point Lagrange derivative at node `at` using nodes i0 < i1 < i2.
    let three_point = |i0: usize, at: usize| {
        let (x0, x1, x2) = (x[i0], x[i0 + 1], x[i0 + 2]);
        let t = x[at];
        let l0 = (2.0 * t - x1 - x2) / ((x0 - x1) * (x0 - x2));
        let l1 = (2.0 * t - x0 - x2) / ((x1 - x0) * (x1 - x2));
        let l2 = (2.0 * t - x0 - x1) / ((x2 - x0) * (x2 - x1));
        l0 * y[i0] + l1 * y[i0 + 1] + l2 * y[i0 + 2]
    };
    d[0] = three_point(0, 0);
    for i in 1..n - 1 {
        d[i] = three_point(i - 1, i);
    }
    d[n - 1] = three_point(n - 3, n - 1);
    d
}

/// Number of sign changes of `values`, ignoring entries with
/// `|v| <= threshold`.
pub fn sign_changes(values: &[f64], threshold: f64) -> usize {
    let mut last = 0.0f64;
    let mut changes = 0;
    for &v in values {
        if v.abs() <= threshold {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            changes += 1;
        }
        last = v;
    }
    changes
}

/// Relative magnitude below which profile samples count as zero when
/// counting nodal sets.
pub const NODAL_ZERO_THRESHOLD: f64 = 1e-8;

/// Initial data `(r₀, u(r₀), u′(r₀))` of a radial initial value problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub radius: f64,
    pub value: f64,
    pub slope: f64,
}

/// A computed radial solution `u(r)` of `-Δu = |x|^α f(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
    /// Weight exponent of the equation the profile solves.
    pub alpha: f64,
    /// Number of connected components of `{u ≠ 0}`.
    pub nodal_sets: usize,
    /// Interior zeros located by event detection, when known.
    pub zeros: Vec<f64>,
    /// Maximal one-interval defect of the stored samples against an
    /// independent re-integration, relative to `max |u|`. `None` for profiles
    /// that were transported or read from disk.
    pub residual: Option<f64>,
    /// Initial data that regenerates the profile by integration.
    pub initial: Option<InitialData>,
}

impl RadialProfile {
    pub fn new(
        grid: RadialGrid,
        values: Vec<f64>,
        derivatives: Vec<f64>,
        alpha: f64,
    ) -> Result<Self> {
        check_len(grid.len(), values.len())?;
        check_len(grid.len(), derivatives.len())?;
        let nodal_sets = count_nodal_sets(&values);
        Ok(Self {
            grid,
            values,
            derivatives,
            alpha,
            nodal_sets,
            zeros: Vec::new(),
            residual: None,
            initial: None,
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn function(&self) -> RadialFunction {
        RadialFunction {
            grid: self.grid.clone(),
            values: self.values.clone(),
            derivatives: self.derivatives.clone(),
        }
    }

    /// Largest |u| over the Dirichlet boundary nodes.
    pub fn boundary_defect(&self) -> f64 {
        (0..self.grid.len())
            .filter(|&i| self.grid.is_boundary_node(i))
            .map(|i| self.values[i].abs())
            .fold(0.0, f64::max)
    }
}

/// `(sign changes) + 1`, with samples below [`NODAL_ZERO_THRESHOLD`]
/// relative to the sup norm treated as zeros.
pub fn count_nodal_sets(values: &[f64]) -> usize {
    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sup == 0.0 {
        return 0;
    }
    sign_changes(values, NODAL_ZERO_THRESHOLD * sup) + 1
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The nonlinearity `f` together with `f′`.
#[derive(Clone)]
pub struct Nonlinearity {
    f: ScalarFn,
    fprime: ScalarFn,
    henon_power: Option<f64>,
    scale: f64,
    superlinear: bool,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("henon_power", &self.henon_power)
            .field("scale", &self.scale)
            .field("superlinear", &self.superlinear)
            .finish_non_exhaustive()
    }
}

impl Nonlinearity {
    /// `f(u) = |u|^{p-1} u`, `f′(u) = p |u|^{p-1}`.
    pub fn henon(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::param("p", format!("must be > 1, got {p}")));
        }
        Ok(Self {
            f: Arc::new(move |u: f64| u.abs().powf(p - 1.0) * u),
            fprime: Arc::new(move |u: f64| p * u.abs().powf(p - 1.0)),
            henon_power: Some(p),
            scale: 1.0,
            superlinear: true,
        })
    }

    /// A user-supplied pair `(f, f′)`. When `superlinear` is claimed it is
    /// checked on a sampling lattice and rejected if violated.
    pub fn custom<F, G>(f: F, fprime: G, superlinear: bool) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let nl = Self {
            f: Arc::new(f),
            fprime: Arc::new(fprime),
            henon_power: None,
            scale: 1.0,
            superlinear,
        };
        if superlinear && !nl.sampled_superlinear() {
            return Err(Error::param(
                "nonlinearity",
                "f'(u) > f(u)/u fails on the sampling lattice",
            ));
        }
        Ok(nl)
    }

    /// `c·f`, used for the reduced problem `-Δv = κ² f(v)`.
    pub fn scaled(&self, factor: f64) -> Self {
        let (f, fp) = (self.f.clone(), self.fprime.clone());
        Self {
            f: Arc::new(move |u| factor * f(u)),
            fprime: Arc::new(move |u| factor * fp(u)),
            henon_power: self.henon_power,
            scale: self.scale * factor,
            superlinear: self.superlinear && factor > 0.0,
        }
    }

    #[inline]
    pub fn f(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    #[inline]
    pub fn fprime(&self, u: f64) -> f64 {
        (self.fprime)(u)
    }

    /// Exponent `p` when `f` is a multiple of `|u|^{p-1}u`.
    pub fn henon_power(&self) -> Option<f64> {
        self.henon_power
    }

    /// Constant multiplying the base nonlinearity (1 unless [`Self::scaled`]).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// True for the unscaled Hénon power nonlinearity.
    pub fn is_pure_henon(&self) -> bool {
        self.henon_power.is_some() && self.scale == 1.0
    }

    pub fn is_superlinear(&self) -> bool {
        self.superlinear
    }

    /// Lattice of nonzero sample points used by the sampling checks.
    pub fn sample_lattice() -> Vec<f64> {
        let mut lattice = Vec::with_capacity(122);
        for i in 0..61 {
            let magnitude = 10f64.powf(-3.0 + 6.0 * i as f64 / 60.0);
            lattice.push(magnitude);
            lattice.push(-magnitude);
        }
        lattice
    }

    /// Checks `f′(u) > f(u)/u` on [`Self::sample_lattice`].
    pub fn sampled_superlinear(&self) -> bool {
        Self::sample_lattice()
            .into_iter()
            .all(|u| self.fprime(u) > self.f(u) / u)
    }

    /// For Hénon nonlinearities, checks the closed forms of `f` and `f′`
    /// on the sampling lattice. Returns the largest relative deviation.
    pub fn henon_form_deviation(&self) -> Option<f64> {
        let p = self.henon_power?;
        let dev = Self::sample_lattice()
            .into_iter()
            .map(|u| {
                let f = self.scale * u.abs().powf(p - 1.0) * u;
                let fp = self.scale * p * u.abs().powf(p - 1.0);
                let df = (self.f(u) - f).abs() / f.abs().max(f64::MIN_POSITIVE);
                let dfp = (self.fprime(u) - fp).abs() / fp.abs().max(f64::MIN_POSITIVE);
                df.max(dfp)
            })
            .fold(0.0, f64::max);
        Some(dev)
    }
}

/// Angular parity of a Fourier term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Cosine,
    Sine,
}

impl Parity {
    pub fn trig(self, angle: f64) -> f64 {
        match self {
            Parity::Cosine => angle.cos(),
            Parity::Sine => angle.sin(),
        }
    }
}

/// One term `b_k(r)·cos(kθ)` or `b_k(r)·sin(kθ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierTerm {
    pub mode: u32,
    pub parity: Parity,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
}

impl FourierTerm {
    /// `∫₀^{2π} trig(kθ)² dθ / π`: 2 for the constant mode, 1 otherwise.
    pub fn angular_factor(&self) -> f64 {
        if self.mode == 0 {
            2.0
        } else {
            1.0
        }
    }
}

/// A function on a radially symmetric planar domain written as a finite sum
/// of angular Fourier modes with radial coefficients on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularFourierFunction {
    grid: RadialGrid,
    terms: Vec<FourierTerm>,
}

/// Relative size of a coefficient at a Dirichlet node that still counts as zero.
const DIRICHLET_TOLERANCE: f64 = 1e-9;

impl AngularFourierFunction {
    pub fn new(grid: RadialGrid, terms: Vec<FourierTerm>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for term in &terms {
            check_len(grid.len(), term.values.len())?;
            check_len(grid.len(), term.derivatives.len())?;
            if term.mode == 0 && term.parity == Parity::Sine {
                return Err(Error::param("mode", "mode 0 carries only the cosine parity"));
            }
            if !seen.insert((term.mode, term.parity)) {
                return Err(Error::param(
                    "terms",
                    format!("duplicate term (k = {}, {:?})", term.mode, term.parity),
                ));
            }
            let scale = term.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for i in 0..grid.len() {
                if grid.is_boundary_node(i) && term.values[i].abs() > DIRICHLET_TOLERANCE * scale {
                    return Err(Error::param(
                        "terms",
                        format!(
                            "mode {} coefficient does not vanish at the boundary r = {}",
                            term.mode,
                            grid.nodes()[i]
                        ),
                    ));
                }
            }
        }
        Ok(Self { grid, terms })
    }

    /// Single-term function.
    pub fn single(radial: RadialFunction, mode: u32, parity: Parity) -> Result<Self> {
        let RadialFunction {
            grid,
            values,
            derivatives,
        } = radial;
        Self::new(
            grid,
            vec![FourierTerm {
                mode,
                parity,
                values,
                derivatives,
            }],
        )
    }

    /// Radial (mode-0) function.
    pub fn radial(radial: RadialFunction) -> Result<Self> {
        Self::single(radial, 0, Parity::Cosine)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn terms(&self) -> &[FourierTerm] {
        &self.terms
    }

    pub fn is_radial(&self) -> bool {
        self.terms.iter().all(|t| t.mode == 0)
    }

    pub fn max_mode(&self) -> u32 {
        self.terms.iter().map(|t| t.mode).max().unwrap_or(0)
    }

    /// Value at grid node `i` and angle `theta`.
    pub fn value_at(&self, i: usize, theta: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.values[i] * t.parity.trig(t.mode as f64 * theta))
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| FourierTerm {
                mode: t.mode,
                parity: t.parity,
                values: t.values.iter().map(|v| v * factor).collect(),
                derivatives: t.derivatives.iter().map(|v| v * factor).collect(),
            })
            .collect();
        Self {
            grid: self.grid.clone(),
            terms,
        }
    }

    pub(crate) fn from_parts(grid: RadialGrid, terms: Vec<FourierTerm>) -> Self {
        Self { grid, terms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_examples() {
        let grid = make_grid(Domain::unit_ball(), 4, 0.125).unwrap();
        let expected = [0.125, 0.416_666_666_666_666_7, 0.708_333_333_333_333_4, 1.0];
        for (a, b) in grid.nodes().iter().zip(expected) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        let grid = make_grid(Domain::annulus(1.0, 2.0).unwrap(), 2, 0.0).unwrap();
        assert_eq!(grid.nodes(), &[1.0, 2.0]);
        assert!(make_grid(Domain::unit_ball(), 0, 0.1).is_err());
    }

    #[test]
    fn grid_rejects_bad_offsets() {
        assert!(make_grid(Domain::unit_ball(), 4, 0.0).is_err());
        assert!(make_grid(Domain::unit_ball(), 4, 0.25).is_err());
        assert!(make_grid(Domain::unit_ball(), 4, -0.1).is_err());
    }

    #[test]
    fn midpoint_grid_places_first_face_at_origin() {
        let grid = RadialGrid::midpoint(Domain::unit_ball(), 100).unwrap();
        let h = grid.uniform_spacing().unwrap();
        assert_relative_eq!(grid.first(), 0.5 * h, epsilon = 1e-15);
        assert_eq!(grid.last(), 1.0);
    }

    #[test]
    fn domain_invariants() {
        assert!(Domain::new(2.0, 1.0).is_err());
        assert!(Domain::new(-1.0, 1.0).is_err());
        assert!(Domain::unit_ball().is_ball());
        assert!(!Domain::annulus(1.0, 2.0).unwrap().is_ball());
        let err = Domain::new(2.0, 1.0).unwrap_err().to_string();
        assert!(err.contains("inner < outer required"), "{err}");
    }

    #[test]
    fn nodal_sets_ignore_boundary_noise() {
        let values = [1.0, 0.5, -0.3, -0.1, -1e-14];
        assert_eq!(count_nodal_sets(&values), 2);
        let values = [1.0, 0.5, -0.3, -0.1, 1e-14];
        assert_eq!(count_nodal_sets(&values), 2);
        assert_eq!(count_nodal_sets(&[0.0, 0.0]), 0);
    }

    #[test]
    fn henon_nonlinearity_closed_form() {
        let f = Nonlinearity::henon(3.0).unwrap();
        assert_eq!(f.f(-2.0), -8.0);
        assert_eq!(f.fprime(-2.0), 12.0);
        assert!(f.sampled_superlinear());
        assert!(f.henon_form_deviation().unwrap() < 1e-14);
        assert!(Nonlinearity::henon(1.0).is_err());
    }

    #[test]
    fn custom_superlinear_claim_is_checked() {
        // f(u) = u is linear: f'(u) = f(u)/u, never strictly larger.
        assert!(Nonlinearity::custom(|u| u, |_| 1.0, true).is_err());
        let cubic_plus = Nonlinearity::custom(|u| u + u * u * u, |u| 1.0 + 3.0 * u * u, true);
        assert!(cubic_plus.is_ok());
    }

    #[test]
    fn fourier_function_invariants() {
        let grid = RadialGrid::midpoint(Domain::unit_ball(), 32).unwrap();
        let bump = RadialFunction::from_fn(&grid, |r| (1.0 - r * r, -2.0 * r));
        assert!(AngularFourierFunction::single(bump.clone(), 0, Parity::Sine).is_err());
        let not_dirichlet = RadialFunction::from_fn(&grid, |r| (2.0 - r, -1.0));
        assert!(AngularFourierFunction::radial(not_dirichlet).is_err());
        let f = AngularFourierFunction::single(bump, 2, Parity::Sine).unwrap();
        assert!(!f.is_radial());
        assert_eq!(f.max_mode(), 2);
    }
}
