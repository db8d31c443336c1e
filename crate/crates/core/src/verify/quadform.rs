//! The quadratic form `Q_u(w) = ∫|∇w|² - ∫|x|^α f′(u) w²` mode by mode,
//! and its comparison with the reduced form on the mapped domain.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::Quadrature;
use crate::domain::{
    AngularFourierFunction, Domain, FourierTerm, Nonlinearity, Parity, RadialGrid, RadialProfile,
};
use crate::quadrature::radial_moment;
use crate::spectral::linearized_potential;
use crate::transform::{energy_parts, map_domain, push_forward_fourier, IdentityReport, SectorTransform};
use crate::{Error, Result};

/// `Σ_k π c_k [∫(a_k′b_k′ + k² a_k b_k/r²) r dr - ∫ V a_k b_k r dr]` over
/// terms of equal mode and parity; `c₀ = 2`, `c_k = 1` otherwise.
pub fn quadratic_form(
    potential: &[f64],
    w1: &AngularFourierFunction,
    w2: &AngularFourierFunction,
    rule: Quadrature,
) -> Result<f64> {
    form_on(potential, w1, w2, rule, None)
}

/// [`quadratic_form`] with the `r`-integrals taken over a parametrization
/// `r = s^κ` by the nodes of `parameter`, where composite rules keep their
/// order even though the `r`-nodes are graded singularly at the origin.
fn form_on(
    potential: &[f64],
    w1: &AngularFourierFunction,
    w2: &AngularFourierFunction,
    rule: Quadrature,
    parameter: Option<(&RadialGrid, f64)>,
) -> Result<f64> {
    let grid = w1.grid();
    if !grid.same_nodes(w2.grid()) {
        return Err(Error::GridMismatch);
    }
    crate::domain::check_len(grid.len(), potential.len())?;
    let r = grid.nodes();
    let mut total = 0.0;
    for (a, b) in matching_terms(w1, w2) {
        let k2 = (a.mode as f64).powi(2);
        let integrand: Vec<f64> = (0..r.len())
            .map(|i| {
                a.derivatives[i] * b.derivatives[i]
                    + (k2 / (r[i] * r[i]) - potential[i]) * a.values[i] * b.values[i]
            })
            .collect();
        let moment = match parameter {
            None => radial_moment(rule, &integrand, grid, 1.0)?,
            // r dr = κ s^{2κ-1} ds
            Some((s_grid, kappa)) => {
                let pulled: Vec<f64> = integrand
                    .iter()
                    .zip(s_grid.nodes())
                    .map(|(h, s)| kappa * h * s.powf(2.0 * kappa - 2.0))
                    .collect();
                radial_moment(rule, &pulled, s_grid, 1.0)?
            }
        };
        total += PI * a.angular_factor() * moment;
    }
    Ok(total)
}

fn matching_terms<'a>(
    w1: &'a AngularFourierFunction,
    w2: &'a AngularFourierFunction,
) -> impl Iterator<Item = (&'a FourierTerm, &'a FourierTerm)> {
    w1.terms().iter().flat_map(move |a| {
        w2.terms()
            .iter()
            .filter(move |b| b.mode == a.mode && b.parity == a.parity)
            .map(move |b| (a, b))
    })
}

fn on_profile_grid(profile: &RadialProfile, w: &AngularFourierFunction) -> Result<()> {
    if !profile.grid.same_nodes(w.grid()) {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `Q_u(w1, w2)` for the linearization about `profile`.
pub fn bilinear_q(
    profile: &RadialProfile,
    nonlinearity: &Nonlinearity,
    w1: &AngularFourierFunction,
    w2: &AngularFourierFunction,
    rule: Quadrature,
) -> Result<f64> {
    on_profile_grid(profile, w1)?;
    on_profile_grid(profile, w2)?;
    quadratic_form(&linearized_potential(profile, nonlinearity), w1, w2, rule)
}

/// `Q_u(w, w)`.
pub fn eval_q(
    profile: &RadialProfile,
    nonlinearity: &Nonlinearity,
    w: &AngularFourierFunction,
    rule: Quadrature,
) -> Result<f64> {
    bilinear_q(profile, nonlinearity, w, w, rule)
}

/// `∫ |x|^α w1 w2 dx`.
pub fn weighted_inner(
    w1: &AngularFourierFunction,
    w2: &AngularFourierFunction,
    alpha: f64,
    rule: Quadrature,
) -> Result<f64> {
    let grid = w1.grid();
    if !grid.same_nodes(w2.grid()) {
        return Err(Error::GridMismatch);
    }
    let mut total = 0.0;
    for (a, b) in matching_terms(w1, w2) {
        let product: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect();
        total += PI * a.angular_factor() * radial_moment(rule, &product, grid, alpha + 1.0)?;
    }
    Ok(total)
}

/// Outcome of comparing `𝒬_v(ψ)` with `κ Q_u(φ)`, `κ = 2/(α+2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadFormReport {
    /// `∫|∇ψ|² - κ² ∫ f′(v) ψ²` on the mapped domain.
    pub q_value_reduced: f64,
    /// `∫|∇φ|² - ∫ |x|^α f′(u) φ²` on the original domain.
    pub q_value_weighted: f64,
    pub ratio_bound: f64,
    /// `q_value_reduced - ratio_bound · q_value_weighted`.
    pub difference: f64,
    /// Closed-form value of the difference, `(1 - κ²)` times the angular
    /// part of `∫|∇ψ|²`.
    pub predicted_difference: f64,
    pub slack: f64,
    pub pass: bool,
    /// Equality check for radial `ψ`.
    pub radial_equality: Option<IdentityReport>,
}

/// Settings for [`compare_quadratic_forms`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormComparisonOptions {
    pub rule: Quadrature,
    /// Absolute slack of the inequality on unit-energy test functions.
    pub slack: f64,
    /// Relative tolerance of the equality for radial test functions.
    pub radial_tolerance: f64,
}

impl Default for FormComparisonOptions {
    fn default() -> Self {
        Self {
            rule: Quadrature::Simpson,
            slack: 1e-10,
            radial_tolerance: 1e-8,
        }
    }
}

/// Compares the reduced form about `reduced` (the profile `v` on the mapped
/// domain) with the weighted-equation form about `u = v ∘ T_κ⁻¹`.
pub fn compare_quadratic_forms(
    reduced: &RadialProfile,
    psi: &AngularFourierFunction,
    alpha: f64,
    nonlinearity: &Nonlinearity,
    options: &FormComparisonOptions,
) -> Result<QuadFormReport> {
    if !(alpha >= 0.0) {
        return Err(Error::param("alpha", "must be ≥ 0"));
    }
    if !reduced.grid.same_nodes(psi.grid()) {
        return Err(Error::GridMismatch);
    }
    let kappa = 2.0 / (alpha + 2.0);
    let reduced_potential: Vec<f64> = reduced
        .values
        .iter()
        .map(|&v| kappa * kappa * nonlinearity.fprime(v))
        .collect();
    let q_value_reduced = quadratic_form(&reduced_potential, psi, psi, options.rule)?;

    let original = map_domain(reduced.grid.domain(), 1.0 / kappa)?;
    let phi = push_forward_fourier(psi, &SectorTransform::new(kappa, 1)?, &original)?;
    let weighted_potential: Vec<f64> = phi
        .grid()
        .nodes()
        .iter()
        .zip(&reduced.values)
        .map(|(&r, &u)| r.powf(alpha) * nonlinearity.fprime(u))
        .collect();
    let q_value_weighted = form_on(
        &weighted_potential,
        &phi,
        &phi,
        options.rule,
        Some((psi.grid(), kappa)),
    )?;

    let difference = q_value_reduced - kappa * q_value_weighted;
    let (_, angular) = energy_parts(psi, options.rule)?;
    let radial_equality = psi.is_radial().then(|| {
        IdentityReport::new(
            q_value_reduced,
            kappa * q_value_weighted,
            options.radial_tolerance,
        )
    });
    let pass = difference >= -options.slack && radial_equality.map_or(true, |r| r.pass);
    Ok(QuadFormReport {
        q_value_reduced,
        q_value_weighted,
        ratio_bound: kappa,
        difference,
        predicted_difference: (1.0 - kappa * kappa) * angular,
        slack: options.slack,
        pass,
        radial_equality,
    })
}

/// Seed of the documented random test-function family.
pub const TEST_FUNCTION_SEED: u64 = 0x5EED_1729;

/// Random smooth Dirichlet test function on `grid`: two to four terms with
/// modes `≤ max_mode`, at least one of them non-radial. Each coefficient is
/// `s^k P(s²) c(s)` with a cubic `P` whose coefficients are uniform in
/// `[-1, 1]` and the boundary cutoff `c(s) = R² - s²` (ball) or
/// `(s - R_in)(R_out - s)` (annulus). The result has unit Dirichlet energy.
pub fn random_test_function(
    grid: &RadialGrid,
    max_mode: u32,
    rng: &mut impl Rng,
) -> Result<AngularFourierFunction> {
    if max_mode == 0 {
        return Err(Error::param("max_mode", "must be ≥ 1"));
    }
    let domain = grid.domain();
    let count = rng.gen_range(2..=4usize);
    let mut keys = std::collections::BTreeSet::new();
    keys.insert((rng.gen_range(1..=max_mode), random_parity(rng)));
    while keys.len() < count {
        let mode = rng.gen_range(0..=max_mode);
        let parity = if mode == 0 { Parity::Cosine } else { random_parity(rng) };
        keys.insert((mode, parity));
    }
    let terms = keys
        .into_iter()
        .map(|(mode, parity)| {
            let coeffs: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
            let (values, derivatives) = grid
                .nodes()
                .iter()
                .map(|&s| envelope(s, mode, &coeffs, &domain))
                .unzip();
            FourierTerm {
                mode,
                parity,
                values,
                derivatives,
            }
        })
        .collect();
    let w = AngularFourierFunction::new(grid.clone(), terms)?;
    let energy = crate::transform::dirichlet_energy(&w, Quadrature::Simpson)?;
    Ok(w.scaled(1.0 / energy.sqrt()))
}

fn random_parity(rng: &mut impl Rng) -> Parity {
    if rng.gen_bool(0.5) {
        Parity::Cosine
    } else {
        Parity::Sine
    }
}

/// `(b, b′)` for `b(s) = s^k P(s²) c(s)`.
fn envelope(s: f64, mode: u32, coeffs: &[f64; 4], domain: &Domain) -> (f64, f64) {
    let t = s * s;
    let p = coeffs[0] + t * (coeffs[1] + t * (coeffs[2] + t * coeffs[3]));
    let dp = 2.0 * s * (coeffs[1] + t * (2.0 * coeffs[2] + 3.0 * t * coeffs[3]));
    let (c, dc) = if domain.is_ball() {
        let r = domain.outer_radius();
        (r * r - t, -2.0 * s)
    } else {
        let (a, b) = (domain.inner_radius(), domain.outer_radius());
        ((s - a) * (b - s), (b - s) - (s - a))
    };
    let k = mode as i32;
    let sk = s.powi(k);
    let dsk = if k == 0 { 0.0 } else { k as f64 * s.powi(k - 1) };
    (sk * p * c, dsk * p * c + sk * dp * c + sk * p * dc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::RadialFunction;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_potential_form_is_dirichlet_energy() {
        let grid = RadialGrid::midpoint(Domain::unit_ball(), 500).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = random_test_function(&grid, 4, &mut rng).unwrap();
        let q = quadratic_form(&vec![0.0; 500], &w, &w, Quadrature::Simpson).unwrap();
        assert!(q > 0.0);
        assert_relative_eq!(q, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn different_modes_are_orthogonal() {
        let grid = RadialGrid::midpoint(Domain::unit_ball(), 100).unwrap();
        let b = RadialFunction::from_fn(&grid, |r| (r * (1.0 - r * r), 1.0 - 3.0 * r * r));
        let a = AngularFourierFunction::single(b.clone(), 1, Parity::Cosine).unwrap();
        let c = AngularFourierFunction::single(b, 1, Parity::Sine).unwrap();
        let potential = vec![5.0; 100];
        assert_eq!(quadratic_form(&potential, &a, &c, Quadrature::Trapezoid).unwrap(), 0.0);
        assert_eq!(weighted_inner(&a, &c, 2.0, Quadrature::Trapezoid).unwrap(), 0.0);
    }

    #[test]
    fn test_functions_have_a_nonradial_term() {
        let grid = RadialGrid::midpoint(Domain::annulus(1.0, 2.0).unwrap(), 200).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(TEST_FUNCTION_SEED);
        for _ in 0..20 {
            let w = random_test_function(&grid, 5, &mut rng).unwrap();
            assert!(!w.is_radial());
            assert!(w.terms().len() >= 2 && w.terms().len() <= 4);
            assert!(w.max_mode() <= 5);
        }
    }
}
