use proptest::prelude::*;
use transversal_core::cone::{direction_feasible, OrderedQuery};
use transversal_core::flexprobe::{lifted_hessian_decomposition, CanonicalCoords, LiftedConfig};
use transversal_core::geom::{disks_common_point, Ball, Direction, MinimaxOptions, ProjectedDisk, Scene};
use transversal_core::sextic::{eval_sigma, Triple};

fn disks() -> impl Strategy<Value = Vec<ProjectedDisk>> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64, 0.1..3.0f64), 1..7).prop_map(|v| {
        v.into_iter()
            .map(|(x, y, r)| ProjectedDisk {
                center: vec![x, y],
                radius: r,
            })
            .collect()
    })
}

fn unit3() -> impl Strategy<Value = [f64; 3]> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(a, b, c)| a * a + b * b + c * c > 1e-2)
        .prop_map(|(a, b, c)| {
            let n = (a * a + b * b + c * c).sqrt();
            [a / n, b / n, c / n]
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minimax_slack_is_a_lower_bound_at_its_point(ds in disks()) {
        let cp = disks_common_point(&ds, &MinimaxOptions::default()).unwrap();
        let at = ds
            .iter()
            .map(|d| ((cp.point[0] - d.center[0]).hypot(cp.point[1] - d.center[1])) - d.radius)
            .fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((at - cp.slack).abs() < 1e-9);
        // no disk center does better
        for d in &ds {
            let f = ds
                .iter()
                .map(|e| (d.center[0] - e.center[0]).hypot(d.center[1] - e.center[1]) - e.radius)
                .fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(f >= cp.slack - 1e-9);
        }
    }

    #[test]
    fn minimax_slack_shifts_with_translation_and_scales(ds in disks(), dx in -10.0..10.0f64, s in 0.2..5.0f64) {
        let base = disks_common_point(&ds, &MinimaxOptions::default()).unwrap().slack;
        let moved: Vec<ProjectedDisk> = ds
            .iter()
            .map(|d| ProjectedDisk { center: vec![s * (d.center[0] + dx), s * d.center[1]], radius: s * d.radius })
            .collect();
        let other = disks_common_point(&moved, &MinimaxOptions::default()).unwrap().slack;
        prop_assert!((other - s * base).abs() < 1e-8 * s.max(1.0));
    }

    #[test]
    fn decomposition_signs(
        a in 0.5..5.0f64, b in -3.0..5.0f64, c in 0.5..5.0f64,
        p in (0.01..1.0f64, 0.01..1.0f64, 0.01..1.0f64),
        x in (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64),
    ) {
        let cfg = LiftedConfig::new(a, b, c, [p.0, p.1, p.2], [x.0, x.1, x.2]).unwrap();
        let dec = lifted_hessian_decomposition(&cfg);
        prop_assert!(dec.h2 <= 0.0);
        prop_assert!(dec.h4 >= 0.0);
        prop_assert!((cfg.p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let k = CanonicalCoords::from_config(&cfg).unwrap();
        prop_assert!(k.big_q > 0.0 && k.beta_pair_sum > 0.0);
    }

    #[test]
    fn sigma_is_even_and_sextic(u in unit3(), lambda in 0.1..3.0f64) {
        let t = Triple::new([[0.0, 0.0, 0.0], [4.0, 1.0, 0.5], [1.0, 5.0, -2.0]], [1.0, 1.2, 0.8]).unwrap();
        let s = eval_sigma(&t, &u);
        let neg = eval_sigma(&t, &u.map(|x| -x));
        let scaled = eval_sigma(&t, &u.map(|x| lambda * x));
        let tol = 1e-10 * t.sigma_scale();
        prop_assert!((s - neg).abs() <= tol);
        prop_assert!((scaled - lambda.powi(6) * s).abs() <= tol * lambda.powi(6).max(1.0));
    }

    #[test]
    fn reversal_flips_orientation(u in unit3()) {
        let balls = vec![
            Ball::new(vec![0.0, 0.0, 0.0], 1.0).unwrap(),
            Ball::new(vec![4.0, 0.5, 0.0], 1.0).unwrap(),
            Ball::new(vec![8.0, -0.5, 0.5], 1.2).unwrap(),
        ];
        let q = OrderedQuery::identity(Scene::new(3, balls).unwrap());
        let d = Direction::new(u.to_vec()).unwrap();
        let a = direction_feasible(&q, &d, &MinimaxOptions::default()).unwrap();
        let b = direction_feasible(&q.reversed(), &d.antipode(), &MinimaxOptions::default()).unwrap();
        prop_assert_eq!(a.feasible, b.feasible);
    }
}
