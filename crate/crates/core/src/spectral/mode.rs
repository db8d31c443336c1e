//! One angular mode of the linearized operator.
//!
//! For `φ = a(r)·trig(kθ)` the problem `-Δφ - Vφ = λ w φ` becomes
//! `-(r a′)′ + (k²/r) a - r V a = λ r w a`. Each grid node owns the cell
//! between the midpoints of its neighbours; integrating over the cell gives
//! a symmetric tridiagonal stiffness `A` and a positive diagonal mass `B`.
//! On a ball the innermost cell face sits at the origin, where the flux
//! `r a′` vanishes, so no condition at `r = 0` is needed for any mode.
//! The symmetric matrix `B^{-1/2} A B^{-1/2}` has the same eigenvalues.

use serde::{Deserialize, Serialize};

use super::tridiag::SymTridiagonal;
use crate::domain::{Nonlinearity, RadialGrid, RadialProfile};
use crate::{Error, Result};

/// Angular mode problem for a radial potential.
#[derive(Debug, Clone)]
pub struct ModeProblem {
    pub mode: u32,
    /// Whether the eigenvalue measure is `|x|^α dx` rather than `dx`.
    pub weighted: bool,
    /// Exponent of the eigenvalue weight when `weighted`.
    pub alpha: f64,
    /// `V(r_i)`.
    pub potential: Vec<f64>,
    pub grid: RadialGrid,
}

impl ModeProblem {
    pub fn new(
        grid: RadialGrid,
        potential: Vec<f64>,
        mode: u32,
        weighted: bool,
        alpha: f64,
    ) -> Result<Self> {
        crate::domain::check_len(grid.len(), potential.len())?;
        Ok(Self {
            mode,
            weighted,
            alpha,
            potential,
            grid,
        })
    }

    /// Linearization about `profile`: `V = r^α f′(u)`.
    pub fn linearization(
        profile: &RadialProfile,
        nonlinearity: &Nonlinearity,
        mode: u32,
        weighted: bool,
    ) -> Result<Self> {
        Self::new(
            profile.grid.clone(),
            linearized_potential(profile, nonlinearity),
            mode,
            weighted,
            profile.alpha,
        )
    }

    /// Same potential and grid, different mode or weight.
    pub fn with_mode(&self, mode: u32) -> Self {
        Self {
            mode,
            ..self.clone()
        }
    }

    pub fn with_weight(&self, weighted: bool) -> Self {
        Self {
            weighted,
            ..self.clone()
        }
    }

    fn weight(&self, r: f64) -> f64 {
        if self.weighted && self.alpha != 0.0 {
            r.powf(self.alpha)
        } else {
            1.0
        }
    }
}

/// `r^α f′(u(r))` on the profile grid.
pub fn linearized_potential(profile: &RadialProfile, nonlinearity: &Nonlinearity) -> Vec<f64> {
    profile
        .grid
        .nodes()
        .iter()
        .zip(&profile.values)
        .map(|(&r, &u)| {
            let w = if profile.alpha == 0.0 { 1.0 } else { r.powf(profile.alpha) };
            w * nonlinearity.fprime(u)
        })
        .collect()
}

/// Discretized mode problem.
#[derive(Debug, Clone)]
pub struct ModeSystem {
    /// `B^{-1/2} A B^{-1/2}` on the unknown nodes.
    pub matrix: SymTridiagonal,
    /// Unweighted stiffness `A` on the unknown nodes.
    pub stiffness: SymTridiagonal,
    /// Diagonal of `B`.
    pub mass: Vec<f64>,
    /// Grid index of every unknown.
    pub unknowns: Vec<usize>,
    pub grid_len: usize,
}

impl ModeSystem {
    /// Grid function `a = B^{-1/2} y` for an eigenvector `y` of the
    /// symmetric matrix, zero at Dirichlet nodes.
    pub fn to_grid(&self, y: &[f64]) -> Vec<f64> {
        let mut a = vec![0.0; self.grid_len];
        for ((&i, &m), &v) in self.unknowns.iter().zip(&self.mass).zip(y) {
            a[i] = v / m.sqrt();
        }
        a
    }
}

/// Builds the symmetric tridiagonal system of a mode problem.
pub fn assemble_mode_operator(problem: &ModeProblem) -> Result<ModeSystem> {
    let grid = &problem.grid;
    let h = grid.uniform_spacing().ok_or(Error::NonUniformGrid)?;
    let r = grid.nodes();
    let n = r.len();
    let k2 = (problem.mode as f64).powi(2);
    let ball = grid.domain().is_ball();
    let unknowns: Vec<usize> = (0..n).filter(|&i| !grid.is_boundary_node(i)).collect();
    if unknowns.is_empty() {
        return Err(Error::InvalidGrid("no interior unknowns".into()));
    }

    let face = |i: usize| 0.5 * (r[i] + r[i + 1]);
    let mut diag = Vec::with_capacity(unknowns.len());
    let mut off = Vec::with_capacity(unknowns.len() - 1);
    let mut mass = Vec::with_capacity(unknowns.len());
    for &i in &unknowns {
        let (left_face, left_flux) = if i == 0 {
            // Only reachable on a ball: the first cell extends to the origin.
            debug_assert!(ball);
            (0.0, 0.0)
        } else {
            (face(i - 1), face(i - 1) / h)
        };
        let right_face = face(i);
        let right_flux = right_face / h;
        let width = right_face - left_face;
        diag.push(left_flux + right_flux + (k2 / r[i] - r[i] * problem.potential[i]) * width);
        mass.push(r[i] * problem.weight(r[i]) * width);
        if i + 1 < n && !grid.is_boundary_node(i + 1) {
            off.push(-right_flux);
        }
    }
    let stiffness = SymTridiagonal::new(diag.clone(), off.clone())?;
    let scale: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let sym_diag = diag.iter().zip(&scale).map(|(d, s)| d * s * s).collect();
    let sym_off = off
        .iter()
        .enumerate()
        .map(|(j, e)| e * scale[j] * scale[j + 1])
        .collect();
    Ok(ModeSystem {
        matrix: SymTridiagonal::new(sym_diag, sym_off)?,
        stiffness,
        mass,
        unknowns,
        grid_len: n,
    })
}

/// Lowest eigenvalues of one mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpectrum {
    pub mode: u32,
    pub weighted: bool,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues below `-tolerance`.
    pub negative_count: usize,
    /// Exact count of negative eigenvalues of the discrete operator.
    pub inertia: usize,
    /// Eigenvalues within `±tolerance` of zero.
    pub degenerate: Vec<f64>,
    pub size: usize,
    pub tolerance: f64,
}

impl ModeSpectrum {
    pub fn lowest(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn is_degenerate(&self) -> bool {
        !self.degenerate.is_empty()
    }
}

pub fn mode_spectrum(problem: &ModeProblem, q: usize, tolerance: f64) -> Result<ModeSpectrum> {
    let system = assemble_mode_operator(problem)?;
    spectrum_of(&system, problem, q, tolerance)
}

pub(crate) fn spectrum_of(
    system: &ModeSystem,
    problem: &ModeProblem,
    q: usize,
    tolerance: f64,
) -> Result<ModeSpectrum> {
    let m = &system.matrix;
    let negative_count = m.count_below(-tolerance);
    let near_zero = m.count_below(tolerance);
    // Always resolve every eigenvalue up to the degenerate band.
    let wanted = q.max(near_zero + 1).min(m.len());
    let eigenvalues = m.lowest_eigenvalues(wanted, tolerance)?;
    let degenerate = (negative_count..near_zero)
        .map(|j| m.eigenvalue(j, tolerance))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModeSpectrum {
        mode: problem.mode,
        weighted: problem.weighted,
        eigenvalues,
        negative_count,
        inertia: m.negative_count(),
        degenerate,
        size: m.len(),
        tolerance,
    })
}

/// An eigenpair of a mode problem with the eigenfunction on the full grid.
#[derive(Debug, Clone)]
pub struct ModeEigenpair {
    pub eigenvalue: f64,
    /// `a(r_i)`, normalized so `Σ B_ii a_i² = 1` and positive near the origin.
    pub values: Vec<f64>,
    /// Finite-difference derivative of `values`.
    pub derivatives: Vec<f64>,
}

/// The `index`-th eigenpair (0-based) of a mode problem.
pub fn mode_eigenpair(problem: &ModeProblem, index: usize, tolerance: f64) -> Result<ModeEigenpair> {
    let system = assemble_mode_operator(problem)?;
    let eigenvalue = system.matrix.eigenvalue(index, tolerance.min(1e-12))?;
    let y = system.matrix.eigenvector(eigenvalue);
    let mut values = system.to_grid(&y);
    let first = values
        .iter()
        .find(|v| v.abs() > 1e-8)
        .copied()
        .unwrap_or(1.0);
    if first < 0.0 {
        values.iter_mut().for_each(|v| *v = -*v);
    }
    let derivatives = eigenfunction_derivative(&problem.grid, &values, problem.mode);
    Ok(ModeEigenpair {
        eigenvalue,
        values,
        derivatives,
    })
}

/// Second-order derivative of a mode coefficient; on a ball the value at the
/// origin (`a(0)` free for `k = 0`, zero otherwise) closes the first stencil.
pub(crate) fn eigenfunction_derivative(grid: &RadialGrid, values: &[f64], mode: u32) -> Vec<f64> {
    let r = grid.nodes();
    let n = r.len();
    let mut d = crate::domain::finite_difference_derivative(r, values);
    if grid.domain().is_ball() && n >= 2 {
        d[0] = match mode {
            // a is even in r: a′(r₀) ≈ r₀ (a₁ - a₀)/(r₁² - r₀²)·2
            0 => 2.0 * r[0] * (values[1] - values[0]) / (r[1] * r[1] - r[0] * r[0]),
            // a ≈ c r^k near 0
            k => k as f64 * values[0] / r[0],
        };
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use approx::assert_relative_eq;

    fn free(points: usize, mode: u32) -> ModeProblem {
        let grid = RadialGrid::midpoint(Domain::unit_ball(), points).unwrap();
        ModeProblem::new(grid, vec![0.0; points], mode, false, 0.0).unwrap()
    }

    #[test]
    fn matrix_is_symmetric_tridiagonal() {
        let system = assemble_mode_operator(&free(64, 2)).unwrap();
        assert_eq!(system.matrix.len(), 63);
        assert_eq!(system.matrix.off().len(), 62);
        assert!(system.matrix.off().iter().all(|e| *e < 0.0));
    }

    #[test]
    fn unit_weight_matches_unweighted() {
        let p = free(200, 1);
        let mut q = p.clone();
        q.weighted = true;
        let a = mode_spectrum(&p, 3, 1e-12).unwrap();
        let b = mode_spectrum(&q, 3, 1e-12).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
    }

    #[test]
    fn constant_potential_shifts_spectrum() {
        let p = free(300, 0);
        let mut q = p.clone();
        q.potential = vec![3.5; 300];
        let a = mode_spectrum(&p, 4, 1e-12).unwrap();
        let b = mode_spectrum(&q, 4, 1e-12).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert_relative_eq!(x - 3.5, *y, epsilon = 1e-9);
        }
    }

    #[test]
    fn non_uniform_grid_is_rejected() {
        let grid = RadialGrid::from_nodes(Domain::unit_ball(), vec![0.1, 0.3, 0.35, 1.0]).unwrap();
        let p = ModeProblem::new(grid, vec![0.0; 4], 0, false, 0.0).unwrap();
        assert!(matches!(assemble_mode_operator(&p), Err(Error::NonUniformGrid)));
    }

    #[test]
    fn annulus_first_eigenvalue() {
        // Mode 0 on [1, 2]: λ ≈ π² + O(1) correction; check against a fine grid.
        let grid = RadialGrid::midpoint(Domain::annulus(1.0, 2.0).unwrap(), 4000).unwrap();
        let p = ModeProblem::new(grid, vec![0.0; 4000], 0, false, 0.0).unwrap();
        let lambda = mode_spectrum(&p, 1, 1e-12).unwrap().lowest();
        // Cross-product of Bessel functions J0(x)Y0(2x) - J0(2x)Y0(x) vanishes at √λ ≈ 3.1230.
        assert_relative_eq!(lambda.sqrt(), 3.12303, max_relative = 1e-4);
    }

    #[test]
    fn eigenpair_is_consistent() {
        let p = free(400, 1);
        let pair = mode_eigenpair(&p, 0, 1e-12).unwrap();
        assert!(pair.values.iter().all(|v| *v >= 0.0));
        assert_relative_eq!(pair.eigenvalue, 3.831_705_970_2f64.powi(2), max_relative = 1e-4);
    }
}
