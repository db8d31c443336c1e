use proptest::prelude::*;

use henon_morse::domain::count_nodal_sets;
use henon_morse::radial::shoot_nodal_solution;
use henon_morse::quadrature::integrate_radial_with;
use henon_morse::report::{format_domain, format_real, parse_domain};
use henon_morse::spectral::{mode_spectrum, ModeProblem, SymTridiagonal};
use henon_morse::transform::{map_domain, KappaTransform, Polar, SectorTransform};
use henon_morse::{Domain, Nonlinearity, Quadrature, RadialGrid, ShootingConfig};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn domains_order_their_radii(inner in 0.0f64..3.0, width in -1.0f64..3.0) {
        let outer = inner + width;
        match Domain::new(inner, outer) {
            Ok(d) => {
                prop_assert!(0.0 <= d.inner_radius() && d.inner_radius() < d.outer_radius());
                prop_assert_eq!(d.is_ball(), inner == 0.0);
            }
            Err(_) => prop_assert!(width <= 0.0),
        }
    }

    #[test]
    fn grids_increase_and_end_on_the_boundary(
        inner in prop_oneof![Just(0.0), 0.1f64..1.0],
        width in 0.5f64..3.0,
        points in 16usize..400,
    ) {
        let domain = Domain::new(inner, inner + width).unwrap();
        let grid = RadialGrid::midpoint(domain, points).unwrap();
        let r = grid.nodes();
        prop_assert_eq!(r.len(), points);
        prop_assert!(r.windows(2).all(|w| w[1] > w[0]));
        prop_assert_eq!(grid.last(), domain.outer_radius());
        if domain.is_ball() {
            prop_assert!(grid.first() > 0.0);
        } else {
            prop_assert_eq!(grid.first(), domain.inner_radius());
        }
    }

    #[test]
    fn kappa_transforms_form_a_group(
        kappa in 0.1f64..4.0,
        lambda in 0.1f64..4.0,
        radius in 0.01f64..3.0,
        angle in -3.1f64..3.1,
    ) {
        let t = KappaTransform::new(kappa).unwrap();
        let u = KappaTransform::new(lambda).unwrap();
        let point = Polar::new(radius, angle);

        let back = t.inverse().apply(t.apply(point).unwrap()).unwrap();
        prop_assert!(rel(back.radius, radius) < 1e-12);
        prop_assert_eq!(back.angle, angle);

        let two_steps = t.apply(u.apply(point).unwrap()).unwrap();
        let one_step = t.compose(&u).apply(point).unwrap();
        prop_assert!(rel(two_steps.radius, one_step.radius) < 1e-12);

        let cartesian = t.apply_cartesian(point.to_cartesian());
        let polar = Polar::from_cartesian(cartesian);
        prop_assert!(rel(polar.radius, radius.powf(kappa)) < 1e-12);
        prop_assert!((polar.angle - angle).abs() < 1e-12);
    }

    #[test]
    fn sector_maps_divide_angles(kappa in 0.1f64..3.0, m in 1u32..6, radius in 0.01f64..2.0, angle in -3.0f64..3.0) {
        let sector = SectorTransform::new(kappa, m).unwrap();
        let image = sector.apply(Polar::new(radius, angle)).unwrap();
        prop_assert!(rel(image.angle, angle / f64::from(m)) < 1e-15 || angle == 0.0);
        let back = sector.inverse_apply(image).unwrap();
        prop_assert!(rel(back.radius, radius) < 1e-12);
        if m == 1 {
            let plain = sector.as_kappa().unwrap().apply(Polar::new(radius, angle)).unwrap();
            prop_assert_eq!(plain, image);
        } else {
            prop_assert!(sector.as_kappa().is_none());
        }
    }

    #[test]
    fn weight_removing_exponent(alpha in 0.0f64..10.0) {
        let kappa = KappaTransform::for_weight(alpha).unwrap().kappa();
        prop_assert!(((2.0 - 2.0 * kappa) / kappa - alpha).abs() < 1e-12 * alpha.max(1.0));
        let d = Domain::new(0.3, 1.7).unwrap();
        let round = map_domain(map_domain(d, kappa).unwrap(), 1.0 / kappa).unwrap();
        prop_assert!(rel(round.inner_radius(), 0.3) < 1e-12);
        prop_assert!(rel(round.outer_radius(), 1.7) < 1e-12);
    }

    #[test]
    fn henon_nonlinearity_is_a_power(p in 1.05f64..8.0, u in -5.0f64..5.0) {
        let f = Nonlinearity::henon(p).unwrap();
        prop_assert!(rel(f.f(u), u.abs().powf(p - 1.0) * u) < 1e-14 || u == 0.0);
        prop_assert!(rel(f.fprime(u), p * u.abs().powf(p - 1.0)) < 1e-14 || u == 0.0);
        if u != 0.0 {
            prop_assert!(f.fprime(u) > f.f(u) / u);
        }
        prop_assert!(f.is_superlinear());
    }

    #[test]
    fn nodal_sets_count_sign_changes(signs in prop::collection::vec(any::<bool>(), 2..200), scale in 0.1f64..10.0) {
        let values: Vec<f64> = signs.iter().map(|&s| if s { scale } else { -scale }).collect();
        let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
        prop_assert_eq!(count_nodal_sets(&values), changes + 1);
    }

    #[test]
    fn sturm_counts_agree_with_bisection(
        diag in prop::collection::vec(-5.0f64..5.0, 3..40),
        seed in 0.5f64..2.0,
    ) {
        let n = diag.len();
        let off: Vec<f64> = (0..n - 1).map(|i| seed + 0.1 * (i % 3) as f64).collect();
        let t = SymTridiagonal::new(diag, off).unwrap();
        let eig = t.lowest_eigenvalues(n, 1e-12).unwrap();
        // unreduced tridiagonal matrices have simple eigenvalues
        prop_assert!(eig.windows(2).all(|w| w[1] > w[0]));
        for (j, lambda) in eig.iter().enumerate() {
            prop_assert_eq!(t.count_below(lambda + 1e-9), j + 1);
            let x = t.eigenvector(*lambda);
            let residual = t
                .matvec(&x)
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - lambda * b).abs())
                .fold(0.0, f64::max);
            prop_assert!(residual < 1e-8, "residual {}", residual);
        }
        let trace: f64 = t.diag().iter().sum();
        prop_assert!((eig.iter().sum::<f64>() - trace).abs() < 1e-8 * n as f64);
    }

    #[test]
    fn domain_specs_round_trip(inner in prop_oneof![Just(0.0), 0.01f64..5.0], width in 0.01f64..5.0) {
        let d = Domain::new(inner, inner + width).unwrap();
        prop_assert_eq!(parse_domain(&format_domain(&d)).unwrap(), d);
    }

    #[test]
    fn reals_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn quadrature_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, beta in 0.0f64..4.0) {
        let grid = RadialGrid::midpoint(Domain::unit_ball(), 200).unwrap();
        let f: Vec<f64> = grid.nodes().iter().map(|r| r.cos()).collect();
        let g: Vec<f64> = grid.nodes().iter().map(|r| r * r).collect();
        let combo: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
        let q = |v: &[f64]| integrate_radial_with(Quadrature::Simpson, v, &grid, beta).unwrap();
        prop_assert!((q(&combo) - (a * q(&f) + b * q(&g))).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Mode monotonicity and inertia equality hold for any smooth potential.
    #[test]
    fn mode_spectra_are_monotone_with_equal_inertia(
        c0 in 0.0f64..120.0,
        c1 in -60.0f64..60.0,
        c2 in -60.0f64..60.0,
        alpha in 0.0f64..5.0,
    ) {
        let grid = RadialGrid::midpoint(Domain::unit_ball(), 300).unwrap();
        let potential: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|r| r.powf(alpha) * (c0 + c1 * r + c2 * r * r))
            .collect();
        let base = ModeProblem::new(grid, potential, 0, false, alpha).unwrap();
        let mut previous: Option<(f64, f64)> = None;
        for k in 0..5 {
            let plain = mode_spectrum(&base.with_mode(k), 2, 1e-10).unwrap();
            let weighted = mode_spectrum(&base.with_mode(k).with_weight(true), 2, 1e-10).unwrap();
            prop_assert_eq!(plain.inertia, weighted.inertia);
            if let Some((p, w)) = previous {
                prop_assert!(plain.lowest() > p);
                prop_assert!(weighted.lowest() > w);
            }
            previous = Some((plain.lowest(), weighted.lowest()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Shooting returns a positive-first profile with the requested nodal
    /// count, vanishing at the boundary, reproducibly and stably under a
    /// halved tolerance.
    #[test]
    fn shot_profiles_satisfy_their_invariants(
        alpha in 0.0f64..4.0,
        p in 1.5f64..5.0,
        n in 1usize..4,
        annulus in any::<bool>(),
    ) {
        let nonlinearity = Nonlinearity::henon(p).unwrap();
        let domain = if annulus { Domain::annulus(0.5, 1.0).unwrap() } else { Domain::unit_ball() };
        let grid = RadialGrid::midpoint(domain, 600).unwrap();
        let config = ShootingConfig::with_tolerance(1e-10);
        let u = shoot_nodal_solution(&nonlinearity, alpha, &grid, n, &config).unwrap();
        prop_assert_eq!(u.nodal_sets, n);
        prop_assert_eq!(count_nodal_sets(&u.values), n);
        let first = u.values.iter().find(|v| v.abs() > 1e-12).unwrap();
        prop_assert!(*first > 0.0);
        let scale = u.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(u.values.last().unwrap().abs() < 1e-8 * scale);

        let again = shoot_nodal_solution(&nonlinearity, alpha, &grid, n, &config).unwrap();
        prop_assert_eq!(&again.values, &u.values);

        let tighter = shoot_nodal_solution(&nonlinearity, alpha, &grid, n, &ShootingConfig::with_tolerance(5e-11)).unwrap();
        let change = u.values.iter().zip(&tighter.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(change < 10.0 * 1e-10 * scale.max(1.0), "change {}", change);
    }
}
