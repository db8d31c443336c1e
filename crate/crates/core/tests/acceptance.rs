//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the verdict lines always appear in the test log.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use henon_morse::radial::{henon_scaling_solve, reduced_profile, shoot_nodal_solution};
use henon_morse::spectral::{
    mode_spectra, mode_spectrum, radial_nondegeneracy, ModeProblem,
};
use henon_morse::radial::auxiliary_z;
use henon_morse::transform::map_domain;
use henon_morse::verify::{
    check_transform, compare_quadratic_forms, default_matrix, random_test_function, run_suite,
    FormComparisonOptions, SuiteReport, TransformCheckOptions, VerifyOptions, TEST_FUNCTION_SEED,
};
use henon_morse::{
    AngularFourierFunction, Domain, Nonlinearity, RadialFunction, RadialGrid, ShootingConfig,
    SpectralConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{bessel_first_zero, sup_difference};

const M: usize = 4000;

struct Outcome {
    pass: bool,
    summary: String,
}

fn outcome(pass: bool, summary: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        summary: summary.into(),
    }
}

fn henon(p: f64) -> Nonlinearity {
    Nonlinearity::henon(p).unwrap()
}

fn ball_grid(points: usize) -> RadialGrid {
    RadialGrid::midpoint(Domain::unit_ball(), points).unwrap()
}

fn shooting() -> ShootingConfig {
    ShootingConfig::with_tolerance(1e-12)
}

/// The 45 cases α ∈ 0..=4, p ∈ {2, 3, 5}, n ∈ 1..=3.
fn base_matrix() -> Vec<(f64, f64, usize)> {
    let mut cases = Vec::new();
    for alpha in 0..=4 {
        for p in [2.0, 3.0, 5.0] {
            for n in 1..=3 {
                cases.push((f64::from(alpha), p, n));
            }
        }
    }
    cases
}

fn bessel() -> Outcome {
    let lowest = |k: u32, points: usize| {
        let problem = ModeProblem::new(ball_grid(points), vec![0.0; points], k, false, 0.0).unwrap();
        mode_spectrum(&problem, 1, 1e-12).unwrap().lowest()
    };
    let pinned = [5.78319, 14.68197, 26.37462];
    let mut worst_error = 0.0f64;
    let mut worst_order = f64::INFINITY;
    let mut oracle_ok = true;
    for k in 0..3u32 {
        let zero = bessel_first_zero(k as i32);
        let exact = zero * zero;
        oracle_ok &= (exact - pinned[k as usize]).abs() < 1e-5;
        let errors: Vec<f64> = [1000, 2000, 4000]
            .iter()
            .map(|&m| (lowest(k, m) - exact).abs() / exact)
            .collect();
        worst_error = worst_error.max(errors[2]);
        for pair in errors.windows(2) {
            worst_order = worst_order.min((pair[0] / pair[1]).log2());
        }
    }
    outcome(
        oracle_ok && worst_error < 5e-4 && worst_order >= 1.8,
        format!("max rel error {worst_error:.2e} (< 5e-4), min order {worst_order:.2} (≥ 1.8)"),
    )
}

fn correspondence() -> Outcome {
    let mut worst = (0.0f64, (0.0, 0.0, 0));
    for (alpha, p, n) in base_matrix() {
        let grid = ball_grid(M);
        let direct = shoot_nodal_solution(&henon(p), alpha, &grid, n, &shooting()).unwrap();
        let rescaled = henon_scaling_solve(alpha, p, &grid, n, &shooting()).unwrap();
        let d = sup_difference(&direct.values, &rescaled.values);
        if d > worst.0 {
            worst = (d, (alpha, p, n));
        }
    }
    let (a, p, n) = worst.1;
    outcome(
        worst.0 < 1e-6,
        format!("45 cases, max sup difference {:.2e} at (α, p, n) = ({a}, {p}, {n}) (< 1e-6)", worst.0),
    )
}

fn index_bounds(suite: &SuiteReport) -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for case in &suite.cases {
        if case.alpha == 0.0 || case.nodal < 2 || case.alpha > 4.0 {
            continue;
        }
        let bundle = case.bundle.as_ref().expect("case solved");
        let morse = &bundle.morse;
        let bound = 3.max(case.nodal + 2);
        checked += 1;
        if morse.total < bound || morse.radial_count != case.nodal {
            failures.push(format!(
                "({}, {}, {}): index {} radial {}",
                case.alpha, case.p, case.nodal, morse.total, morse.radial_count
            ));
        }
    }
    outcome(
        failures.is_empty() && checked == 24,
        format!("{checked} cases with α > 0, n ≥ 2: index ≥ max(3, n+2) and radial count = n; failures {failures:?}"),
    )
}

fn even_weights() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for alpha in [2u32, 4, 6] {
        let a = f64::from(alpha);
        let nonlinearity = henon(3.0);
        let grid = ball_grid(M);
        let u = shoot_nodal_solution(&nonlinearity, a, &grid, 2, &shooting()).unwrap();
        let morse = henon_morse::spectral::morse_index(&u, &nonlinearity, &SpectralConfig::default()).unwrap();

        let m = alpha / 2 + 1;
        let weighted = mode_spectra(&u, &nonlinearity, m, true, &SpectralConfig::default()).unwrap();
        let every_mode_negative = weighted[1..].iter().all(|s| s.lowest() < 0.0);

        let kappa = 2.0 / (a + 2.0);
        let s_grid = RadialGrid::midpoint(map_domain(grid.domain(), kappa).unwrap(), M).unwrap();
        let v = reduced_profile(&u, &nonlinearity, &s_grid, &shooting()).unwrap();
        let potential = v.values.iter().map(|&v| kappa * kappa * nonlinearity.fprime(v)).collect();
        let reduced = ModeProblem::new(s_grid, potential, 1, false, 0.0).unwrap();
        let mu = mode_spectrum(&reduced, 1, 1e-12).unwrap().lowest();
        let target = f64::from(m * m) * mu;
        let rel = (weighted[m as usize].lowest() - target).abs() / target.abs();

        let ok = morse.total >= alpha as usize + 4 && every_mode_negative && rel < 1e-4;
        pass &= ok;
        lines.push(format!("α={alpha}: index {} (≥ {}), m² scaling {rel:.1e}", morse.total, alpha + 4));
    }
    outcome(pass, lines.join("; "))
}

fn quadratic_forms() -> Outcome {
    let mut worst_gap = f64::INFINITY;
    let mut worst_radial = 0.0f64;
    let mut pass = true;
    let mut rng = ChaCha8Rng::seed_from_u64(TEST_FUNCTION_SEED);
    for alpha in [1.0, 2.0, 3.0] {
        let nonlinearity = henon(3.0);
        let grid = ball_grid(2000);
        let u = shoot_nodal_solution(&nonlinearity, alpha, &grid, 2, &shooting()).unwrap();
        let kappa = 2.0 / (alpha + 2.0);
        let s_grid = RadialGrid::midpoint(map_domain(grid.domain(), kappa).unwrap(), 2000).unwrap();
        let v = reduced_profile(&u, &nonlinearity, &s_grid, &shooting()).unwrap();
        let options = FormComparisonOptions::default();
        for _ in 0..100 {
            let psi = random_test_function(&s_grid, 5, &mut rng).unwrap();
            let report = compare_quadratic_forms(&v, &psi, alpha, &nonlinearity, &options).unwrap();
            worst_gap = worst_gap.min(report.difference);
            pass &= report.difference >= -1e-10;
        }
        for _ in 0..10 {
            let c: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let bump = RadialFunction::from_fn(&s_grid, |s| {
                let t = s * s;
                let poly = 1.0 + c[0] * t + c[1] * t * t + c[2] * t * t * t;
                let dpoly = 2.0 * s * (c[0] + 2.0 * c[1] * t + 3.0 * c[2] * t * t);
                ((1.0 - t) * poly, -2.0 * s * poly + (1.0 - t) * dpoly)
            });
            let psi = AngularFourierFunction::radial(bump).unwrap();
            let report = compare_quadratic_forms(&v, &psi, alpha, &nonlinearity, &options).unwrap();
            let radial = report.radial_equality.expect("radial test function");
            worst_radial = worst_radial.max(radial.rel_error);
            pass &= radial.rel_error < 1e-8;
        }
    }
    outcome(
        pass,
        format!("300 random ψ: min difference {worst_gap:.3e} (≥ -1e-10); 30 radial ψ: max rel gap {worst_radial:.1e} (< 1e-8)"),
    )
}

fn transforms() -> Outcome {
    let options = TransformCheckOptions::default();
    let mut pass = true;
    let mut jac = 0.0f64;
    let mut identities = 0.0f64;
    let mut radial = 0.0f64;
    for kappa in [1.0 / 3.0, 0.5, 2.0, 3.0] {
        let report = check_transform(kappa, &options).unwrap();
        jac = jac.max(report.jacobian.max_rel_error);
        for r in report.composition.iter().chain(&report.lr) {
            identities = identities.max(r.rel_error);
            pass &= r.rel_error < 1e-6;
        }
        let energy = report.h1.last().and_then(|h| h.radial_equality).expect("radial bump last");
        radial = radial.max(energy.rel_error);
        pass &= report.jacobian.samples == 1000 && report.jacobian.max_rel_error < 1e-6;
        pass &= energy.rel_error < 1e-8 && report.pass;
    }
    outcome(
        pass,
        format!("κ ∈ {{1/3, 1/2, 2, 3}}: Jacobian {jac:.1e} (< 1e-6), integral identities {identities:.1e} (< 1e-6), radial energy factor {radial:.1e} (< 1e-8)"),
    )
}

fn nondegeneracy() -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    let spectral = SpectralConfig::default();
    for alpha in [0.0, 1.0, 2.0, 4.0] {
        let nonlinearity = henon(3.0);
        let u = shoot_nodal_solution(&nonlinearity, alpha, &ball_grid(M), 2, &shooting()).unwrap();
        let radial = radial_nondegeneracy(&u, &nonlinearity, &spectral).unwrap();
        let z = auxiliary_z(&u, 3.0).unwrap();
        let margin_ok = radial.margin > 10.0 * spectral.eigen_tolerance;
        let ok = margin_ok && z.residual < 1e-6 && z.boundary_ratio > 1e-3;
        pass &= ok;
        lines.push(format!(
            "α={alpha}: margin {:.2e}, z residual {:.1e}, trace {:.2}",
            radial.margin, z.residual, z.boundary_ratio
        ));
    }
    outcome(pass, lines.join("; "))
}

fn inertia(suite: &SuiteReport) -> Outcome {
    let mut modes = 0;
    let mut failures = Vec::new();
    let mut min_gap = f64::INFINITY;
    for case in &suite.cases {
        let bundle = case.bundle.as_ref().expect("case solved");
        for counts in &bundle.modes {
            modes += 1;
            if counts.weighted != counts.unweighted || counts.weighted_inertia != counts.unweighted_inertia {
                failures.push(format!("({}, {}, {}) mode {}", case.alpha, case.p, case.nodal, counts.mode));
            }
        }
        for pair in bundle.modes.windows(2) {
            let gap = (pair[1].lowest_unweighted - pair[0].lowest_unweighted)
                .min(pair[1].lowest_weighted - pair[0].lowest_weighted);
            min_gap = min_gap.min(gap);
        }
    }
    outcome(
        failures.is_empty() && min_gap > 0.0,
        format!("{} cases, {modes} modes: count mismatches {failures:?}; min μ₁(k+1) − μ₁(k) = {min_gap:.3e} (> 0)", suite.cases.len()),
    )
}

fn main() -> ExitCode {
    let started = Instant::now();
    let suite = run_suite(&default_matrix(), Domain::unit_ball(), &VerifyOptions::default());
    assert!(suite.cases.iter().all(|c| c.bundle.is_some()), "every suite case solves");

    let criteria: [(&str, Box<dyn Fn() -> Outcome + '_>); 8] = [
        ("1 Bessel oracle", Box::new(bessel)),
        ("2 scaling correspondence", Box::new(correspondence)),
        ("3 nodal index bound", Box::new(|| index_bounds(&suite))),
        ("4 even-weight index bound", Box::new(even_weights)),
        ("5 quadratic form comparison", Box::new(quadratic_forms)),
        ("6 transform identities", Box::new(transforms)),
        ("7 radial non-degeneracy", Box::new(nondegeneracy)),
        ("8 inertia and monotonicity", Box::new(|| inertia(&suite))),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let result = run();
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!("acceptance {name:<30} {verdict}  {}", result.summary);
        failed += usize::from(!result.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        criteria.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
