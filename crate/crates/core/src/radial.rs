//! Radial solutions of `-Δu = |x|^α f(u)` by shooting.
//!
//! In polar form the equation reads `u″ + u′/r + r^α f(u) = 0`. Ball problems
//! shoot on the central amplitude `u(0) = a` (with `u′(0) = 0`) and start the
//! integrator from a two-term origin series; annulus problems shoot on the
//! inner slope `u′(R_in)` with `u(R_in) = 0`. In both cases the number of
//! zeros inside the domain grows monotonically with the shooting parameter
//! for superlinear `f`, so a deterministic bisection on
//! "at least `n` zeros before the outer radius" converges to the parameter
//! whose `n`-th zero sits on the boundary.

use crate::config::ShootingConfig;
use crate::domain::{
    count_nodal_sets, Domain, InitialData, Nonlinearity, RadialFunction, RadialGrid,
    RadialProfile,
};
use crate::ode::{self, Dopri5, State, Status};
use crate::transform::map_domain;
use crate::{Error, Result};

/// Right-hand side of the first-order system for `(u, u′)`.
pub fn radial_rhs(nonlinearity: &Nonlinearity, alpha: f64) -> impl Fn(f64, &State) -> State + '_ {
    move |r: f64, y: &State| {
        let weight = if alpha == 0.0 { 1.0 } else { r.powf(alpha) };
        [y[1], -y[1] / r - weight * nonlinearity.f(y[0])]
    }
}

/// `u(r) = a + c₁ r^{α+2} + c₂ r^{2(α+2)}` with `c₁ = -f(a)/(α+2)²` and
/// `c₂ = -f′(a) c₁ / (4(α+2)²)`.
#[derive(Debug, Clone, Copy)]
pub struct OriginSeries {
    pub amplitude: f64,
    pub c1: f64,
    pub c2: f64,
    pub exponent: f64,
}

impl OriginSeries {
    pub fn new(nonlinearity: &Nonlinearity, alpha: f64, amplitude: f64) -> Self {
        let m = alpha + 2.0;
        let c1 = -nonlinearity.f(amplitude) / (m * m);
        let c2 = -nonlinearity.fprime(amplitude) * c1 / (4.0 * m * m);
        Self {
            amplitude,
            c1,
            c2,
            exponent: m,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        let t = r.powf(self.exponent);
        self.amplitude + self.c1 * t + self.c2 * t * t
    }

    pub fn slope(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        let m = self.exponent;
        let t = r.powf(m);
        (m * self.c1 * t + 2.0 * m * self.c2 * t * t) / r
    }

    /// Largest radius `≤ cutoff` at which the neglected third term is below
    /// round-off relative to the amplitude.
    fn start_radius(&self, cutoff: f64) -> f64 {
        let scale = self.amplitude.abs().max(f64::MIN_POSITIVE);
        let mut r = cutoff;
        for _ in 0..200 {
            let t = r.powf(self.exponent);
            // The third coefficient is of order |c₂ c₁| / |a| · O(1).
            let third = (self.c2 * self.c1).abs() / scale * t * t * t;
            if third <= 1e-17 * scale && (self.c2 * t * t).abs() <= 1e-6 * scale {
                break;
            }
            r *= 0.5;
        }
        r
    }
}

/// Result of an initial value problem solve.
#[derive(Debug, Clone)]
pub enum IvpOutcome {
    Solved(RadialProfile),
    /// `|u|` exceeded the blow-up bound before the end of the grid.
    Diverged { radius: f64, zeros: Vec<f64> },
}

impl IvpOutcome {
    pub fn into_profile(self, bound: f64) -> Result<RadialProfile> {
        match self {
            IvpOutcome::Solved(p) => Ok(p),
            IvpOutcome::Diverged { radius, .. } => Err(Error::Diverged { radius, bound }),
        }
    }
}

fn validate_start(start: &InitialData) -> Result<()> {
    if !(start.radius >= 0.0) {
        return Err(Error::param("start", "r₀ must be ≥ 0"));
    }
    if start.radius == 0.0 && start.slope != 0.0 {
        return Err(Error::param("start", "u′(0) = 0 is required when r₀ = 0"));
    }
    Ok(())
}

/// Integrates `u″ + u′/r + r^α f(u) = 0` from `start` to the last grid node,
/// sampling `(u, u′)` at every node and locating the zeros of `u`.
pub fn integrate_ivp(
    nonlinearity: &Nonlinearity,
    alpha: f64,
    start: InitialData,
    grid: &RadialGrid,
    config: &ShootingConfig,
) -> Result<IvpOutcome> {
    config.validate()?;
    validate_start(&start)?;
    let nodes = grid.nodes();
    let rhs = radial_rhs(nonlinearity, alpha);
    let solver = Dopri5::new(config.ode_tolerance, config.blowup_bound);

    let mut values = Vec::with_capacity(nodes.len());
    let mut derivatives = Vec::with_capacity(nodes.len());
    let (t0, y0) = if start.radius == 0.0 {
        let series = OriginSeries::new(nonlinearity, alpha, start.value);
        let r_s = series.start_radius(config.series_cutoff.min(nodes[0]));
        for &r in nodes.iter().take_while(|&&r| r < r_s) {
            values.push(series.value(r));
            derivatives.push(series.slope(r));
        }
        (r_s, [series.value(r_s), series.slope(r_s)])
    } else {
        if nodes[0] < start.radius * (1.0 - 1e-14) {
            return Err(Error::param(
                "grid",
                "grid nodes lie below the initial radius",
            ));
        }
        (start.radius, [start.value, start.slope])
    };
    let remaining = &nodes[values.len()..];
    let run = solver.integrate(&rhs, t0, y0, grid.last(), remaining, None);
    let zeros: Vec<f64> = run.zeros.clone();
    if let Status::Diverged { at } = run.status {
        return Ok(IvpOutcome::Diverged { radius: at, zeros });
    }
    for y in &run.outputs {
        values.push(y[0]);
        derivatives.push(y[1]);
    }
    let outer = grid.last();
    let mut profile = RadialProfile::new(grid.clone(), values, derivatives, alpha)?;
    profile.zeros = zeros
        .into_iter()
        .filter(|&z| z < outer * (1.0 - 1e-9))
        .collect();
    profile.initial = Some(start);
    profile.residual = Some(profile_defect(nonlinearity, &profile));
    Ok(IvpOutcome::Solved(profile))
}

/// Largest discrepancy between consecutive stored samples and an independent
/// RK4 re-integration across each grid interval, relative to the sup norms
/// of `u` and `u′`.
pub fn profile_defect(nonlinearity: &Nonlinearity, profile: &RadialProfile) -> f64 {
    let rhs = radial_rhs(nonlinearity, profile.alpha);
    let r = profile.grid.nodes();
    let sup_u = profile.sup_norm().max(f64::MIN_POSITIVE);
    let sup_du = profile
        .derivatives
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    (0..r.len() - 1)
        .map(|i| {
            let y = ode::rk4(
                &rhs,
                r[i],
                [profile.values[i], profile.derivatives[i]],
                r[i + 1],
                8,
            );
            let du = (y[0] - profile.values[i + 1]).abs() / sup_u;
            let ddu = (y[1] - profile.derivatives[i + 1]).abs() / sup_du;
            du.max(ddu)
        })
        .fold(0.0, f64::max)
}

/// Zeros of the IVP solution in `(r₀, end]`, and whether it diverged.
fn scan_zeros(
    nonlinearity: &Nonlinearity,
    alpha: f64,
    start: InitialData,
    end: f64,
    stop_after: Option<usize>,
    config: &ShootingConfig,
) -> (Vec<f64>, bool) {
    let rhs = radial_rhs(nonlinearity, alpha);
    let solver = Dopri5::new(config.ode_tolerance, config.blowup_bound);
    let (t0, y0) = if start.radius == 0.0 {
        let series = OriginSeries::new(nonlinearity, alpha, start.value);
        let r_s = series.start_radius(config.series_cutoff.min(end * 1e-3));
        (r_s, [series.value(r_s), series.slope(r_s)])
    } else {
        (start.radius, [start.value, start.slope])
    };
    let run = solver.integrate(&rhs, t0, y0, end, &[], stop_after);
    let diverged = matches!(run.status, Status::Diverged { .. });
    (run.zeros, diverged)
}

fn initial_for(domain: &Domain, parameter: f64) -> InitialData {
    if domain.is_ball() {
        InitialData {
            radius: 0.0,
            value: parameter,
            slope: 0.0,
        }
    } else {
        InitialData {
            radius: domain.inner_radius(),
            value: 0.0,
            slope: parameter,
        }
    }
}

/// Finds the initial data of the radial solution with `n` nodal sets,
/// positive on its innermost nodal set.
///
/// Balls bisect on `u(0)`, annuli on `u′(R_in)`. The bracket is the interval
/// where the zero count inside the domain jumps from `< n` to `≥ n`; the
/// lower end of the final bracket is returned.
pub fn find_shooting_parameter(
    nonlinearity: &Nonlinearity,
    alpha: f64,
    domain: &Domain,
    n: usize,
    config: &ShootingConfig,
) -> Result<InitialData> {
    config.validate()?;
    if n == 0 {
        return Err(Error::param("nodal", "must be ≥ 1"));
    }
    let end = domain.outer_radius();
    // (reached n zeros, diverged first)
    let classify = |parameter: f64| {
        let (zeros, diverged) =
            scan_zeros(nonlinearity, alpha, initial_for(domain, parameter), end, Some(n), config);
        (zeros.len() >= n, diverged && zeros.len() < n)
    };
    let too_big = |parameter: f64| {
        let (enough, diverged) = classify(parameter);
        enough || diverged
    };

    let (mut lo, mut hi);
    if too_big(1.0) {
        hi = 1.0;
        lo = 0.5;
        let mut found = false;
        for _ in 0..1000 {
            if !too_big(lo) {
                found = true;
                break;
            }
            hi = lo;
            lo *= 0.5;
            if lo < 1e-300 {
                break;
            }
        }
        if !found {
            return Err(Error::NoBracket(format!(
                "at least {n} zeros for every parameter down to {lo:e}"
            )));
        }
    } else {
        lo = 1.0;
        hi = 2.0;
        let mut found = false;
        for _ in 0..1000 {
            let (enough, diverged) = classify(hi);
            if enough {
                found = true;
                break;
            }
            if diverged {
                return Err(Error::NoBracket(format!(
                    "the solution diverges at parameter {hi:e} before reaching {n} zeros"
                )));
            }
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                break;
            }
        }
        if !found {
            return Err(Error::NoBracket(format!(
                "fewer than {n} zeros for every parameter up to {hi:e}"
            )));
        }
    }

    let mut converged = false;
    for _ in 0..config.max_bisections {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * hi {
            converged = true;
            break;
        }
        if too_big(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if !converged {
        return Err(Error::SearchFailed {
            iterations: config.max_bisections,
            reason: format!("bracket [{lo:e}, {hi:e}] not resolved"),
        });
    }
    Ok(initial_for(domain, lo))
}

/// Radial solution with exactly `n` nodal sets on `grid`'s domain, positive
/// on the innermost nodal set.
pub fn shoot_nodal_solution(
    nonlinearity: &Nonlinearity,
    alpha: f64,
    grid: &RadialGrid,
    n: usize,
    config: &ShootingConfig,
) -> Result<RadialProfile> {
    if !(alpha >= 0.0) {
        return Err(Error::param("alpha", "must be ≥ 0"));
    }
    let domain = grid.domain();
    let start = find_shooting_parameter(nonlinearity, alpha, &domain, n, config)?;
    let profile = integrate_ivp(nonlinearity, alpha, start, grid, config)?
        .into_profile(config.blowup_bound)?;
    if profile.nodal_sets != n {
        return Err(Error::SearchFailed {
            iterations: config.max_bisections,
            reason: format!(
                "profile has {} nodal sets on the grid, {n} requested",
                profile.nodal_sets
            ),
        });
    }
    Ok(profile)
}

/// `((α+2)/2)^{2/(p-1)}`, the amplitude factor between the Hénon and the
/// Lane–Emden radial solutions.
pub fn henon_amplitude_factor(alpha: f64, p: f64) -> f64 {
    ((alpha + 2.0) / 2.0).powf(2.0 / (p - 1.0))
}

/// Hénon radial solution built from the Lane–Emden one:
/// `u(r) = ((α+2)/2)^{2/(p-1)} U(r^{(α+2)/2})`, where `U` is the `n`-nodal
/// radial solution of `-ΔU = |U|^{p-1}U` on the domain with radii raised to
/// the power `(α+2)/2`.
pub fn henon_scaling_solve(
    alpha: f64,
    p: f64,
    grid: &RadialGrid,
    n: usize,
    config: &ShootingConfig,
) -> Result<RadialProfile> {
    if !(alpha >= 0.0) {
        return Err(Error::param("alpha", "must be ≥ 0"));
    }
    let nonlinearity = Nonlinearity::henon(p)?;
    let kappa = 2.0 / (alpha + 2.0);
    let stretch = 1.0 / kappa;
    let reduced_domain = map_domain(grid.domain(), kappa)?;
    let start = find_shooting_parameter(&nonlinearity, 0.0, &reduced_domain, n, config)?;
    let s_grid = grid.map_power(stretch);
    let lane_emden = integrate_ivp(&nonlinearity, 0.0, start, &s_grid, config)?
        .into_profile(config.blowup_bound)?;

    let amplitude = henon_amplitude_factor(alpha, p);
    let r = grid.nodes();
    let values: Vec<f64> = lane_emden.values.iter().map(|v| amplitude * v).collect();
    let derivatives: Vec<f64> = lane_emden
        .derivatives
        .iter()
        .zip(r)
        .map(|(dv, &r)| amplitude * dv * stretch * r.powf(stretch - 1.0))
        .collect();
    let mut profile = RadialProfile::new(grid.clone(), values, derivatives, alpha)?;
    profile.zeros = lane_emden.zeros.iter().map(|s| s.powf(kappa)).collect();
    profile.initial = Some(if grid.domain().is_ball() {
        InitialData {
            radius: 0.0,
            value: amplitude * start.value,
            slope: 0.0,
        }
    } else {
        let r0 = grid.domain().inner_radius();
        InitialData {
            radius: r0,
            value: 0.0,
            slope: amplitude * start.slope * stretch * r0.powf(stretch - 1.0),
        }
    });
    profile.residual = Some(profile_defect(&nonlinearity, &profile));
    if profile.nodal_sets != n {
        return Err(Error::SearchFailed {
            iterations: config.max_bisections,
            reason: format!(
                "transformed profile has {} nodal sets, {n} requested",
                profile.nodal_sets
            ),
        });
    }
    Ok(profile)
}

/// Output of [`henon_rescale_trick`].
#[derive(Debug, Clone)]
pub struct RescaledSolution {
    pub profile: RadialProfile,
    /// Central amplitude `a = ρ_n^{(α+2)/(p-1)}` (unit ball).
    pub amplitude: f64,
    /// Zeros of the `u(0) = 1` solution, up to and including the `n`-th.
    pub unit_zeros: Vec<f64>,
}

/// Hénon ball solution from the scaling `u_a(r) = a·u₁(a^{(p-1)/(α+2)} r)`:
/// the `n`-th zero `ρ_n` of the `u(0) = 1` solution is moved to the boundary
/// without any bisection.
pub fn henon_rescale_trick(
    nonlinearity: &Nonlinearity,
    alpha: f64,
    grid: &RadialGrid,
    n: usize,
    config: &ShootingConfig,
) -> Result<RescaledSolution> {
    let p = match nonlinearity.henon_power() {
        Some(p) if nonlinearity.is_pure_henon() => p,
        _ => {
            return Err(Error::param(
                "nonlinearity",
                "the rescaling shortcut needs f(u) = |u|^(p-1) u",
            ))
        }
    };
    if !grid.domain().is_ball() {
        return Err(Error::param("domain", "the rescaling shortcut needs a ball"));
    }
    if n == 0 {
        return Err(Error::param("nodal", "must be ≥ 1"));
    }
    let unit = InitialData {
        radius: 0.0,
        value: 1.0,
        slope: 0.0,
    };
    let mut end = 16.0;
    let mut zeros = Vec::new();
    for _ in 0..40 {
        let (found, diverged) = scan_zeros(nonlinearity, alpha, unit, end, Some(n), config);
        if diverged {
            return Err(Error::Diverged {
                radius: end,
                bound: config.blowup_bound,
            });
        }
        zeros = found;
        if zeros.len() >= n {
            break;
        }
        end *= 2.0;
    }
    if zeros.len() < n {
        return Err(Error::InsufficientZeros {
            found: zeros.len(),
            required: n,
        });
    }
    zeros.truncate(n);
    let rho = zeros[n - 1];
    let radius = grid.domain().outer_radius();
    let stretch = rho / radius;
    let amplitude = stretch.powf((alpha + 2.0) / (p - 1.0));

    let stretched = RadialGrid::from_nodes(
        Domain::ball(rho)?,
        grid.nodes().iter().map(|r| r * stretch).collect(),
    )?;
    let unit_profile =
        integrate_ivp(nonlinearity, alpha, unit, &stretched, config)?.into_profile(config.blowup_bound)?;
    let values = unit_profile.values.iter().map(|v| amplitude * v).collect();
    let derivatives = unit_profile
        .derivatives
        .iter()
        .map(|v| amplitude * stretch * v)
        .collect();
    let mut profile = RadialProfile::new(grid.clone(), values, derivatives, alpha)?;
    profile.zeros = zeros[..n - 1].iter().map(|z| z / stretch).collect();
    profile.initial = Some(InitialData {
        radius: 0.0,
        value: amplitude,
        slope: 0.0,
    });
    profile.residual = Some(profile_defect(nonlinearity, &profile));
    Ok(RescaledSolution {
        profile,
        amplitude,
        unit_zeros: zeros,
    })
}

/// Re-integrates a profile that carries its initial data onto another grid
/// of the same domain.
pub fn resample(
    profile: &RadialProfile,
    nonlinearity: &Nonlinearity,
    grid: &RadialGrid,
    config: &ShootingConfig,
) -> Result<RadialProfile> {
    let start = profile
        .initial
        .ok_or_else(|| Error::param("profile", "no initial data to re-integrate from"))?;
    integrate_ivp(nonlinearity, profile.alpha, start, grid, config)?
        .into_profile(config.blowup_bound)
}

/// The reduced profile `v(s) = u(s^κ)`, `κ = 2/(α+2)`, sampled on a grid of
/// the mapped domain. `v` solves `-Δv = κ² f(v)` without weight, so it is
/// produced by integrating that equation from the mapped initial data.
pub fn reduced_profile(
    profile: &RadialProfile,
    nonlinearity: &Nonlinearity,
    s_grid: &RadialGrid,
    config: &ShootingConfig,
) -> Result<RadialProfile> {
    let alpha = profile.alpha;
    let kappa = 2.0 / (alpha + 2.0);
    let expected = map_domain(profile.grid.domain(), kappa)?;
    let actual = s_grid.domain();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
    if !close(expected.inner_radius(), actual.inner_radius())
        || !close(expected.outer_radius(), actual.outer_radius())
    {
        return Err(Error::param(
            "grid",
            format!("reduced grid must cover {expected}, got {actual}"),
        ));
    }
    let start = profile
        .initial
        .ok_or_else(|| Error::param("profile", "no initial data to re-integrate from"))?;
    let reduced_start = if start.radius == 0.0 {
        start
    } else {
        let s0 = start.radius.powf(1.0 / kappa);
        InitialData {
            radius: s0,
            value: start.value,
            slope: start.slope * kappa * s0.powf(kappa - 1.0),
        }
    };
    let reduced = nonlinearity.scaled(kappa * kappa);
    integrate_ivp(&reduced, 0.0, reduced_start, s_grid, config)?.into_profile(config.blowup_bound)
}

/// `z = r u′ + ((α+2)/(p-1)) u`, the generator of the Hénon scaling, with
/// the residual of `-z″ - z′/r - p r^α |u|^{p-1} z` on the grid.
#[derive(Debug, Clone)]
pub struct AuxiliaryZ {
    pub z: RadialFunction,
    /// Max residual relative to `max |p r^α |u|^{p-1} z|`.
    pub residual: f64,
    /// `z` at the Dirichlet boundary radii, where it equals `r u′(r)`.
    pub boundary_values: Vec<f64>,
    /// `min |z(R)| / max |u′|` over the boundary radii.
    pub boundary_ratio: f64,
}

pub fn auxiliary_z(profile: &RadialProfile, p: f64) -> Result<AuxiliaryZ> {
    if !(p > 1.0) {
        return Err(Error::param("p", "must be > 1"));
    }
    let alpha = profile.alpha;
    let c = (alpha + 2.0) / (p - 1.0);
    let r = profile.grid.nodes();
    let u = &profile.values;
    let du = &profile.derivatives;
    let n = r.len();
    let weight = |r: f64| if alpha == 0.0 { 1.0 } else { r.powf(alpha) };

    let mut z = Vec::with_capacity(n);
    let mut dz = Vec::with_capacity(n);
    for i in 0..n {
        let f = u[i].abs().powf(p - 1.0) * u[i];
        let d2u = -du[i] / r[i] - weight(r[i]) * f;
        z.push(r[i] * du[i] + c * u[i]);
        dz.push((1.0 + c) * du[i] + r[i] * d2u);
    }

    let mut residual = 0.0f64;
    let mut scale = 0.0f64;
    if n >= 5 {
        let uniform = profile.grid.uniform_spacing();
        for i in 2..n - 2 {
            // |u|^{p-1} is not smooth where u changes sign; the stencil would
            // straddle the kink.
            if u[i - 2..=i + 2].windows(2).any(|w| w[0] * w[1] <= 0.0) {
                continue;
            }
            let d2z = match uniform {
                Some(h) => (-dz[i + 2] + 8.0 * dz[i + 1] - 8.0 * dz[i - 1] + dz[i - 2]) / (12.0 * h),
                None => {
                    let (hl, hr) = (r[i] - r[i - 1], r[i + 1] - r[i]);
                    (dz[i + 1] * hl * hl - dz[i - 1] * hr * hr + dz[i] * (hr * hr - hl * hl))
                        / (hl * hr * (hl + hr))
                }
            };
            let linear = p * weight(r[i]) * u[i].abs().powf(p - 1.0) * z[i];
            residual = residual.max((-d2z - dz[i] / r[i] - linear).abs());
            scale = scale.max(linear.abs());
        }
    }
    let residual = if scale > 0.0 { residual / scale } else { residual };

    let boundary: Vec<usize> = (0..n).filter(|&i| profile.grid.is_boundary_node(i)).collect();
    let boundary_values: Vec<f64> = boundary.iter().map(|&i| z[i]).collect();
    let max_du = du.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let boundary_ratio = if max_du > 0.0 {
        boundary_values
            .iter()
            .map(|v| v.abs() / max_du)
            .fold(f64::INFINITY, f64::min)
    } else {
        0.0
    };
    Ok(AuxiliaryZ {
        z: RadialFunction::new(profile.grid.clone(), z, dz)?,
        residual,
        boundary_values,
        boundary_ratio,
    })
}

/// Nodal sets of a freshly computed profile (re-exported for callers that
/// build profiles by hand).
pub fn nodal_sets_of(values: &[f64]) -> usize {
    count_nodal_sets(values)
}
