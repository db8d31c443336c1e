//! Transform identities on seeded random inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::quadform::random_test_function;
use crate::domain::{AngularFourierFunction, Domain, RadialFunction, RadialGrid};
use crate::transform::{
    verify_composition_identity, verify_h1_identities, verify_lr_identity, H1Report,
    IdentityOptions, IdentityReport, KappaTransform,
};
use crate::Result;

/// Settings of [`check_transform`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformCheckOptions {
    pub points: usize,
    pub seed: u64,
    /// Random points for the Jacobian comparison.
    pub jacobian_samples: usize,
    pub jacobian_tolerance: f64,
    /// Random multi-mode test functions per identity.
    pub test_functions: usize,
    pub identity: IdentityOptions,
    /// Tolerance of the radial energy equality `∫|∇ψ|² = κ ∫|∇φ|²`.
    pub radial_energy_tolerance: f64,
}

impl Default for TransformCheckOptions {
    fn default() -> Self {
        Self {
            points: 1000,
            seed: super::TEST_FUNCTION_SEED,
            jacobian_samples: 1000,
            jacobian_tolerance: 1e-6,
            test_functions: 8,
            identity: IdentityOptions::default(),
            radial_energy_tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobianCheck {
    pub samples: usize,
    pub max_rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransformCheckReport {
    pub kappa: f64,
    pub jacobian: JacobianCheck,
    /// `F(t) = t²`, `|t|³` and `sin²t` compositions.
    pub composition: Vec<IdentityReport>,
    /// `L^r` identities for `r = 1, 2, 4`.
    pub lr: Vec<IdentityReport>,
    /// Gradient comparison on random functions followed by one radial one.
    pub h1: Vec<H1Report>,
    pub pass: bool,
}

/// Determinant of the cartesian map against central finite differences at
/// `samples` random points with radius in `[0.05, 3]`.
pub fn jacobian_check(
    transform: &KappaTransform,
    samples: usize,
    tolerance: f64,
    rng: &mut impl Rng,
) -> Result<JacobianCheck> {
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let radius = rng.gen_range(0.05..3.0);
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let y = [radius * angle.cos(), radius * angle.sin()];
        let exact = transform.jacobian_det(y)?;
        let h = 1e-5 * radius;
        let column = |axis: usize| {
            let (mut plus, mut minus) = (y, y);
            plus[axis] += h;
            minus[axis] -= h;
            let (a, b) = (transform.apply_cartesian(plus), transform.apply_cartesian(minus));
            [(a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h)]
        };
        let (dx, dy) = (column(0), column(1));
        let approx = dx[0] * dy[1] - dx[1] * dy[0];
        worst = worst.max((approx - exact).abs() / exact.abs());
    }
    Ok(JacobianCheck {
        samples,
        max_rel_error: worst,
        tolerance,
        pass: worst <= tolerance,
    })
}

/// Runs every transform identity for one `κ` on the unit ball.
pub fn check_transform(kappa: f64, options: &TransformCheckOptions) -> Result<TransformCheckReport> {
    let transform = KappaTransform::new(kappa)?;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let jacobian = jacobian_check(
        &transform,
        options.jacobian_samples,
        options.jacobian_tolerance,
        &mut rng,
    )?;

    // ψ lives on Ω_κ and φ(r) = ψ(r^κ) on Ω. For κ > 1 a uniform s-grid
    // would put φ on nodes s^{1/κ}, coarse exactly where the weight
    // |x|^{(2-2κ)/κ} is singular, so ψ is sampled at κ-th powers instead.
    let uniform = RadialGrid::midpoint(Domain::unit_ball(), options.points)?;
    let grid = if kappa > 1.0 {
        let nodes = uniform.nodes().iter().map(|r| r.powf(kappa)).collect();
        RadialGrid::from_nodes(Domain::unit_ball(), nodes)?
    } else {
        uniform
    };
    let functions: Vec<AngularFourierFunction> = (0..options.test_functions)
        .map(|_| random_test_function(&grid, 5, &mut rng))
        .collect::<Result<_>>()?;

    let mut composition = Vec::new();
    let mut lr = Vec::new();
    let mut h1 = Vec::new();
    for psi in &functions {
        composition.push(verify_composition_identity(psi, kappa, |t| t * t, &options.identity)?);
        composition.push(verify_composition_identity(
            psi,
            kappa,
            |t| t.abs().powi(3),
            &options.identity,
        )?);
        composition.push(verify_composition_identity(
            psi,
            kappa,
            |t| t.sin().powi(2),
            &options.identity,
        )?);
        for exponent in [1.0, 2.0, 4.0] {
            lr.push(verify_lr_identity(psi, kappa, exponent, &options.identity)?);
        }
        h1.push(verify_h1_identities(psi, kappa, &options.identity)?);
    }
    // a radial bump, for the energy equality with factor κ
    let bump = RadialFunction::from_fn(&grid, |r| {
        let c = 1.0 - r * r;
        (c * c, -4.0 * r * c)
    });
    let radial_options = IdentityOptions {
        tolerance: options.radial_energy_tolerance,
        ..options.identity
    };
    h1.push(verify_h1_identities(
        &AngularFourierFunction::radial(bump)?,
        kappa,
        &radial_options,
    )?);

    let pass = jacobian.pass
        && composition.iter().all(|r| r.pass)
        && lr.iter().all(|r| r.pass)
        && h1.iter().all(|r| r.pass);
    Ok(TransformCheckReport {
        kappa,
        jacobian,
        composition,
        lr,
        h1,
        pass,
    })
}
