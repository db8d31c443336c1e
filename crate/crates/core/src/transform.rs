//! The planar power maps `y ↦ y|y|^{κ-1}` and their sector variants.
//!
//! Everything is stored in polar form: the radial power map sends
//! `(s, σ) ↦ (s^κ, σ)` and the sector map sends `(s, σ) ↦ (s^κ, σ/m)`.
//! A function `ψ` on the mapped domain `Ω_κ` (radii `R^{1/κ}`) corresponds to
//! `φ = ψ ∘ T⁻¹` on `Ω`, and the integrals of the two are related by the
//! Jacobian `κ|y|^{2κ-2}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::config::Quadrature;
use crate::domain::{AngularFourierFunction, Domain, FourierTerm, InitialData, RadialProfile};
use crate::quadrature::radial_moment;
use crate::{Error, Result};

/// A point in polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Polar {
    pub radius: f64,
    pub angle: f64,
}

impl Polar {
    pub fn new(radius: f64, angle: f64) -> Self {
        Self { radius, angle }
    }

    pub fn from_cartesian(point: [f64; 2]) -> Self {
        Self {
            radius: point[0].hypot(point[1]),
            angle: point[1].atan2(point[0]),
        }
    }

    pub fn to_cartesian(self) -> [f64; 2] {
        let (sin, cos) = self.angle.sin_cos();
        [self.radius * cos, self.radius * sin]
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::param("kappa", "must be a positive finite number"));
    }
    Ok(())
}

/// `T_κ(y) = y|y|^{κ-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaTransform {
    kappa: f64,
}

impl KappaTransform {
    pub fn new(kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        Ok(Self { kappa })
    }

    /// The exponent `2/(α+2)` that removes the weight `|x|^α`.
    pub fn for_weight(alpha: f64) -> Result<Self> {
        if !(alpha > -2.0) {
            return Err(Error::param("alpha", "must be > -2"));
        }
        Self::new(2.0 / (alpha + 2.0))
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn inverse(&self) -> Self {
        Self {
            kappa: 1.0 / self.kappa,
        }
    }

    /// `T_κ ∘ T_λ = T_{κλ}`.
    pub fn compose(&self, other: &KappaTransform) -> Self {
        Self {
            kappa: self.kappa * other.kappa,
        }
    }

    pub fn apply(&self, point: Polar) -> Result<Polar> {
        if !(point.radius >= 0.0) {
            return Err(Error::param("point", "polar radius must be ≥ 0"));
        }
        Ok(Polar {
            radius: point.radius.powf(self.kappa),
            angle: point.angle,
        })
    }

    pub fn apply_cartesian(&self, y: [f64; 2]) -> [f64; 2] {
        let norm = y[0].hypot(y[1]);
        if norm == 0.0 {
            return [0.0, 0.0];
        }
        let factor = norm.powf(self.kappa - 1.0);
        [y[0] * factor, y[1] * factor]
    }

    /// `κ|y|^{2κ-2}`.
    pub fn jacobian_det(&self, y: [f64; 2]) -> Result<f64> {
        let norm = nonzero_norm(y)?;
        Ok(self.kappa * norm.powf(2.0 * self.kappa - 2.0))
    }

    /// `∂(y_i|y|^{κ-1})/∂y_j = |y|^{κ-1} δ_ij + (κ-1)|y|^{κ-3} y_i y_j`.
    pub fn jacobian_matrix(&self, y: [f64; 2]) -> Result<[[f64; 2]; 2]> {
        let norm = nonzero_norm(y)?;
        let diag = norm.powf(self.kappa - 1.0);
        let outer = (self.kappa - 1.0) * norm.powf(self.kappa - 3.0);
        Ok([
            [diag + outer * y[0] * y[0], outer * y[0] * y[1]],
            [outer * y[1] * y[0], diag + outer * y[1] * y[1]],
        ])
    }
}

fn nonzero_norm(y: [f64; 2]) -> Result<f64> {
    let norm = y[0].hypot(y[1]);
    if norm == 0.0 {
        return Err(Error::param("y", "the Jacobian is not defined at the origin"));
    }
    Ok(norm)
}

/// Polar map `(s, σ) ↦ (s^κ, σ/m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorTransform {
    kappa: f64,
    m: u32,
}

impl SectorTransform {
    pub fn new(kappa: f64, m: u32) -> Result<Self> {
        check_kappa(kappa)?;
        if m == 0 {
            return Err(Error::param("m", "must be ≥ 1"));
        }
        Ok(Self { kappa, m })
    }

    /// `κ = 1/m` for the even weight `α = 2(m-1)`.
    pub fn for_even_weight(alpha: u32) -> Result<Self> {
        if alpha % 2 != 0 {
            return Err(Error::param("alpha", "must be even"));
        }
        let m = alpha / 2 + 1;
        Self::new(1.0 / m as f64, m)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn apply(&self, point: Polar) -> Result<Polar> {
        let radial = KappaTransform::new(self.kappa)?.apply(point)?;
        Ok(Polar {
            radius: radial.radius,
            angle: point.angle / self.m as f64,
        })
    }

    pub fn inverse_apply(&self, point: Polar) -> Result<Polar> {
        let radial = KappaTransform::new(self.kappa)?.inverse().apply(point)?;
        Ok(Polar {
            radius: radial.radius,
            angle: point.angle * self.m as f64,
        })
    }

    /// The plain radial map when `m = 1`.
    pub fn as_kappa(&self) -> Option<KappaTransform> {
        (self.m == 1).then_some(KappaTransform { kappa: self.kappa })
    }
}

/// `Ω_κ = T_κ⁻¹(Ω)`: radii `R ↦ R^{1/κ}`.
pub fn map_domain(domain: Domain, kappa: f64) -> Result<Domain> {
    check_kappa(kappa)?;
    let power = 1.0 / kappa;
    Domain::new(
        domain.inner_radius().powf(power),
        domain.outer_radius().powf(power),
    )
}

/// `v(s) = u(s^κ)` on the mapped domain, with `v′(s) = κ s^{κ-1} u′(s^κ)`.
///
/// The returned profile solves the equation with weight exponent
/// `κ(α+2) - 2` and nonlinearity `κ² f`; for `κ = 2/(α+2)` the weight
/// disappears.
pub fn pull_back_radial(profile: &RadialProfile, kappa: f64) -> Result<RadialProfile> {
    check_kappa(kappa)?;
    let stretch = 1.0 / kappa;
    let grid = profile.grid.map_power(stretch);
    let derivatives = profile
        .derivatives
        .iter()
        .zip(grid.nodes())
        .map(|(du, &s)| du * kappa * s.powf(kappa - 1.0))
        .collect();
    let mut pulled = RadialProfile::new(
        grid,
        profile.values.clone(),
        derivatives,
        kappa * (profile.alpha + 2.0) - 2.0,
    )?;
    pulled.zeros = profile.zeros.iter().map(|r| r.powf(stretch)).collect();
    pulled.initial = profile.initial.map(|start| {
        if start.radius == 0.0 {
            start
        } else {
            let s0 = start.radius.powf(stretch);
            InitialData {
                radius: s0,
                value: start.value,
                slope: start.slope * kappa * s0.powf(kappa - 1.0),
            }
        }
    });
    Ok(pulled)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// `φ = ψ ∘ T_{κ,m}⁻¹` on `target`, whose mapped domain must be the domain
/// of `psi`. Mode `k` becomes mode `m·k` with coefficient `b_k(r^{1/κ})`.
pub fn push_forward_fourier(
    psi: &AngularFourierFunction,
    sector: &SectorTransform,
    target: &Domain,
) -> Result<AngularFourierFunction> {
    let kappa = sector.kappa();
    let expected = map_domain(*target, kappa)?;
    let actual = psi.grid().domain();
    if !close(expected.inner_radius(), actual.inner_radius())
        || !close(expected.outer_radius(), actual.outer_radius())
    {
        return Err(Error::param(
            "psi",
            format!("coefficients live on {actual}, the mapped domain is {expected}"),
        ));
    }
    let grid = psi.grid().map_power(kappa);
    let s = psi.grid().nodes();
    let r = grid.nodes();
    let terms = psi
        .terms()
        .iter()
        .map(|t| FourierTerm {
            mode: t.mode * sector.m(),
            parity: t.parity,
            values: t.values.clone(),
            derivatives: t
                .derivatives
                .iter()
                .zip(s.iter().zip(r))
                .map(|(db, (&s, &r))| db * s / (kappa * r))
                .collect(),
        })
        .collect();
    Ok(AngularFourierFunction::from_parts(grid, terms))
}

/// Both sides of an integral identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityReport {
    pub fn new(lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs());
        let rel_error = if scale == 0.0 {
            0.0
        } else {
            (lhs - rhs).abs() / scale
        };
        Self {
            lhs,
            rhs,
            rel_error,
            tolerance,
            pass: rel_error <= tolerance,
        }
    }
}

/// Numerical settings of the integral identity checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityOptions {
    pub rule: Quadrature,
    /// Uniform angular samples for the periodic trapezoid rule.
    pub angular_points: usize,
    pub tolerance: f64,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        Self {
            rule: Quadrature::Simpson,
            angular_points: 256,
            tolerance: crate::config::Tolerances::default().identity,
        }
    }
}

/// `∫ F(w(x)) |x|^β dx` by periodic trapezoid in θ and the radial rule in r.
pub fn polar_integral(
    w: &AngularFourierFunction,
    weight_exponent: f64,
    f: impl Fn(f64) -> f64,
    options: &IdentityOptions,
) -> Result<f64> {
    if options.angular_points < 2 {
        return Err(Error::param("angular_points", "must be ≥ 2"));
    }
    let grid = w.grid();
    let dtheta = 2.0 * PI / options.angular_points as f64;
    let angular: Vec<f64> = (0..grid.len())
        .map(|i| {
            (0..options.angular_points)
                .map(|j| f(w.value_at(i, j as f64 * dtheta)))
                .sum::<f64>()
                * dtheta
        })
        .collect();
    radial_moment(options.rule, &angular, grid, weight_exponent + 1.0)
}

/// `∫_{Ω_κ} F(ψ) dy` against `κ⁻¹ ∫_Ω F(φ) |x|^{(2-2κ)/κ} dx`.
pub fn verify_composition_identity(
    psi: &AngularFourierFunction,
    kappa: f64,
    f: impl Fn(f64) -> f64 + Copy,
    options: &IdentityOptions,
) -> Result<IdentityReport> {
    let sector = SectorTransform::new(kappa, 1)?;
    let domain = map_domain(psi.grid().domain(), 1.0 / kappa)?;
    let phi = push_forward_fourier(psi, &sector, &domain)?;
    let lhs = polar_integral(psi, 0.0, f, options)?;
    let rhs = polar_integral(&phi, (2.0 - 2.0 * kappa) / kappa, f, options)? / kappa;
    Ok(IdentityReport::new(lhs, rhs, options.tolerance))
}

/// The `L^r` case `F(t) = |t|^r` of [`verify_composition_identity`].
pub fn verify_lr_identity(
    psi: &AngularFourierFunction,
    kappa: f64,
    exponent: f64,
    options: &IdentityOptions,
) -> Result<IdentityReport> {
    if !(exponent >= 1.0) {
        return Err(Error::param("exponent", "must be ≥ 1"));
    }
    verify_composition_identity(psi, kappa, move |t: f64| t.abs().powf(exponent), options)
}

/// Dirichlet energy `Σ_k π c_k ∫ (b_k′² + k² b_k²/r²) r dr`, with `c₀ = 2`.
pub fn dirichlet_energy(w: &AngularFourierFunction, rule: Quadrature) -> Result<f64> {
    let (radial, angular) = energy_parts(w, rule)?;
    Ok(radial + angular)
}

/// Radial `∫|∂_r w|²` and angular `∫|r⁻¹∂_θ w|²` parts of the energy.
pub fn energy_parts(w: &AngularFourierFunction, rule: Quadrature) -> Result<(f64, f64)> {
    let grid = w.grid();
    let mut radial = 0.0;
    let mut angular = 0.0;
    for t in w.terms() {
        let c = PI * t.angular_factor();
        let d2: Vec<f64> = t.derivatives.iter().map(|d| d * d).collect();
        radial += c * radial_moment(rule, &d2, grid, 1.0)?;
        if t.mode > 0 {
            let k2 = (t.mode as f64).powi(2);
            let b2: Vec<f64> = t
                .values
                .iter()
                .zip(grid.nodes())
                .map(|(b, r)| k2 * b * b / (r * r))
                .collect();
            angular += c * radial_moment(rule, &b2, grid, 1.0)?;
        }
    }
    Ok((radial, angular))
}

/// Gradient-norm comparison between `ψ` on `Ω_κ` and `φ = ψ ∘ T_κ⁻¹` on `Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H1Report {
    pub kappa: f64,
    /// `∫_{Ω_κ} |∇ψ|²`.
    pub reduced_energy: f64,
    /// `∫_Ω |∇φ|²`.
    pub original_energy: f64,
    /// `min{κ, 1/κ} ∫|∇φ|²`.
    pub lower_bound: f64,
    /// `max{κ, 1/κ} ∫|∇φ|²`.
    pub upper_bound: f64,
    pub sandwich_pass: bool,
    /// `∫|∇ψ|²` against `κ∫|∇φ|²`; present for radial `ψ`.
    pub radial_equality: Option<IdentityReport>,
    pub pass: bool,
}

pub fn verify_h1_identities(
    psi: &AngularFourierFunction,
    kappa: f64,
    options: &IdentityOptions,
) -> Result<H1Report> {
    let sector = SectorTransform::new(kappa, 1)?;
    let domain = map_domain(psi.grid().domain(), 1.0 / kappa)?;
    let phi = push_forward_fourier(psi, &sector, &domain)?;
    let reduced_energy = dirichlet_energy(psi, options.rule)?;
    let original_energy = dirichlet_energy(&phi, options.rule)?;
    let lower_bound = kappa.min(1.0 / kappa) * original_energy;
    let upper_bound = kappa.max(1.0 / kappa) * original_energy;
    // Relative headroom for the quadrature error of the two sides.
    let slack = options.tolerance * reduced_energy.abs();
    let sandwich_pass =
        lower_bound <= reduced_energy + slack && reduced_energy <= upper_bound + slack;
    let radial_equality = psi
        .is_radial()
        .then(|| IdentityReport::new(reduced_energy, kappa * original_energy, options.tolerance));
    let pass = sandwich_pass && radial_equality.map_or(true, |r| r.pass);
    Ok(H1Report {
        kappa,
        reduced_energy,
        original_energy,
        lower_bound,
        upper_bound,
        sandwich_pass,
        radial_equality,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Parity, RadialFunction, RadialGrid};
    use approx::assert_relative_eq;

    #[test]
    fn polar_examples() {
        let p = KappaTransform::new(2.0).unwrap().apply(Polar::new(1.0, PI / 3.0)).unwrap();
        assert_eq!(p, Polar::new(1.0, PI / 3.0));
        let p = KappaTransform::new(0.5).unwrap().apply(Polar::new(4.0, PI / 3.0)).unwrap();
        assert_relative_eq!(p.radius, 2.0, max_relative = 1e-15);
    }

    #[test]
    fn jacobian_examples() {
        let t = KappaTransform::new(1.0).unwrap();
        assert_relative_eq!(t.jacobian_det([0.3, -2.0]).unwrap(), 1.0, max_relative = 1e-15);
        let t = KappaTransform::new(2.0).unwrap();
        assert_relative_eq!(t.jacobian_det([0.6, 0.8]).unwrap(), 2.0, max_relative = 1e-14);
        assert!(t.jacobian_det([0.0, 0.0]).is_err());
    }

    #[test]
    fn jacobian_matrix_determinant_agrees() {
        let t = KappaTransform::new(0.5).unwrap();
        let j = t.jacobian_matrix([3.0, 4.0]).unwrap();
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        assert_relative_eq!(det, t.jacobian_det([3.0, 4.0]).unwrap(), max_relative = 1e-14);
    }

    #[test]
    fn domain_mapping() {
        let a = map_domain(Domain::annulus(1.0, 4.0).unwrap(), 0.5).unwrap();
        assert_relative_eq!(a.outer_radius(), 16.0);
        let b = map_domain(Domain::annulus(1.0, 16.0).unwrap(), 2.0).unwrap();
        assert_relative_eq!(b.outer_radius(), 4.0);
        assert_eq!(map_domain(Domain::unit_ball(), 0.3).unwrap(), Domain::unit_ball());
    }

    #[test]
    fn sector_with_unit_m_is_radial_map() {
        let s = SectorTransform::new(0.7, 1).unwrap();
        let k = s.as_kappa().unwrap();
        let p = Polar::new(0.4, 1.1);
        assert_eq!(s.apply(p).unwrap(), k.apply(p).unwrap());
        assert!(SectorTransform::new(0.7, 2).unwrap().as_kappa().is_none());
    }

    #[test]
    fn pull_back_of_square() {
        let grid = RadialGrid::midpoint(Domain::unit_ball(), 64).unwrap();
        let u = RadialFunction::from_fn(&grid, |r| (r * r, 2.0 * r));
        let profile = RadialProfile::new(grid, u.values, u.derivatives, 0.0).unwrap();
        let v = pull_back_radial(&profile, 0.5).unwrap();
        for (i, &s) in v.grid.nodes().iter().enumerate() {
            assert_relative_eq!(v.values[i], s, max_relative = 1e-12);
            assert_relative_eq!(v.derivatives[i], 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn push_forward_multiplies_modes() {
        let grid = RadialGrid::midpoint(Domain::unit_ball(), 64).unwrap();
        let b = RadialFunction::from_fn(&grid, |s| (s * (1.0 - s * s), 1.0 - 3.0 * s * s));
        let psi = AngularFourierFunction::single(b, 1, Parity::Cosine).unwrap();
        let sector = SectorTransform::new(0.5, 2).unwrap();
        let phi = push_forward_fourier(&psi, &sector, &Domain::unit_ball()).unwrap();
        assert_eq!(phi.terms()[0].mode, 2);
        // φ(r, θ) = b(r²) cos 2θ
        for (i, &r) in phi.grid().nodes().iter().enumerate() {
            let s = r * r;
            assert_relative_eq!(phi.terms()[0].values[i], s * (1.0 - s * s), epsilon = 1e-12);
            let expected = (1.0 - 3.0 * s * s) * 2.0 * r;
            assert_relative_eq!(phi.terms()[0].derivatives[i], expected, epsilon = 1e-10);
        }
    }

    #[test]
    fn constant_lr_identity() {
        let grid = RadialGrid::midpoint(Domain::unit_ball(), 2000).unwrap();
        let ones = RadialFunction::from_fn(&grid, |_| (1.0, 0.0));
        let psi = AngularFourierFunction::from_parts(
            grid,
            vec![FourierTerm {
                mode: 0,
                parity: Parity::Cosine,
                values: ones.values,
                derivatives: ones.derivatives,
            }],
        );
        let report = verify_lr_identity(&psi, 0.5, 1.0, &IdentityOptions::default()).unwrap();
        assert_relative_eq!(report.lhs, PI, max_relative = 1e-10);
        assert_relative_eq!(report.rhs, PI, max_relative = 1e-6);
        assert!(report.pass);
    }
}
