use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transversal_core::cone::{
    classify_boundary_direction, cone_convexity_check, count_components, direction_feasible,
    enumerate_geometric_permutations, helly_consistency, is_pinned_planar, sample_cone, ConvexityOptions,
    OrderedQuery,
};
use transversal_core::geom::sphere::{great_circle_point, random_direction, random_in_cap};
use transversal_core::geom::{
    disks_common_point, project_to_orthogonal_plane, random_disjoint_scene, vec, Ball, Direction, MinimaxOptions,
    Scene, SceneRequest,
};
use transversal_core::scenes::{pinned_triple, transition_scene};
use transversal_core::sextic::{sigma_gradient, trace_curves, Chart, Triple};

fn mm() -> MinimaxOptions {
    MinimaxOptions::default()
}

fn collinear_scene() -> Scene {
    let balls = (0..3).map(|k| Ball::new(vec![3.0 * k as f64, 0.0, 0.0], 1.0).unwrap()).collect();
    Scene::new(3, balls).unwrap()
}

fn stabbed(n: usize, d: usize, seed: u64) -> (Scene, Direction, Vec<usize>) {
    let gen = random_disjoint_scene(&SceneRequest::new(n, d, 0.5, 1.5, seed).with_transversal()).unwrap();
    (gen.scene, gen.construction_direction.unwrap(), gen.construction_order.unwrap())
}

fn slack(scene: &Scene, u: &Direction) -> f64 {
    disks_common_point(&project_to_orthogonal_plane(scene, u).unwrap(), &mm()).unwrap().slack
}

#[test]
fn collinear_scene_examples() {
    let scene = collinear_scene();
    let u = Direction::new(vec![1.0, 0.0, 0.0]).unwrap();
    let q = OrderedQuery::new(scene.clone(), vec![0, 1, 2]).unwrap();
    assert!(direction_feasible(&q, &u, &mm()).unwrap().feasible);
    let wrong = OrderedQuery::new(scene.clone(), vec![0, 2, 1]).unwrap();
    assert!(!direction_feasible(&wrong, &u, &mm()).unwrap().feasible);

    let catalog = enumerate_geometric_permutations(&scene, 20_000, 1, &mm()).unwrap();
    assert_eq!(catalog.len(), 1);
    assert!(catalog.contains(&[2, 1, 0]));
    let comps = count_components(&scene, 20_000, 1, &mm()).unwrap();
    assert_eq!(comps.components, 1);
    assert!(comps.matches_permutations());
}

#[test]
fn invalid_orders_are_rejected() {
    assert!(OrderedQuery::new(collinear_scene(), vec![0, 1]).is_err());
    assert!(OrderedQuery::new(collinear_scene(), vec![0, 1, 1]).is_err());
    assert!(OrderedQuery::new(collinear_scene(), vec![0, 1, 3]).is_err());
}

#[test]
fn ties_are_indeterminate() {
    let scene = collinear_scene();
    let q = OrderedQuery::identity(scene);
    let f = direction_feasible(&q, &Direction::new(vec![0.0, 1.0, 0.0]).unwrap(), &mm()).unwrap();
    assert!(f.indeterminate() && !f.feasible);
}

#[test]
fn reversal_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for seed in 0..5 {
        let (scene, u0, order) = stabbed(4, 3, seed);
        let q = OrderedQuery::new(scene, order).unwrap();
        let r = q.reversed();
        for _ in 0..200 {
            let u = random_in_cap(&mut rng, &u0, 0.4);
            let a = direction_feasible(&q, &u, &mm()).unwrap();
            let b = direction_feasible(&r, &u.antipode(), &mm()).unwrap();
            assert_eq!(a.feasible, b.feasible);
            assert!((a.slack - b.slack).abs() < 1e-10);
        }
    }
}

#[test]
fn sample_sets_are_reproducible() {
    let (scene, _, order) = stabbed(3, 3, 2);
    let q = OrderedQuery::new(scene, order).unwrap();
    let a = sample_cone(&q, 500, 9, &mm()).unwrap();
    let b = sample_cone(&q, 500, 9, &mm()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());
    assert!(a.feasible().all(|s| s.feasible));
}

/// Directions on the sextic where the scene slack vanishes: cone boundary.
fn boundary_sigma_points(t: &Triple) -> (Vec<[f64; 3]>, Vec<[f64; 3]>) {
    let scene = t.to_scene();
    let mut on = Vec::new();
    let mut inside = Vec::new();
    for k in 0..3 {
        let chart = Chart::coordinate(k, 1.0);
        let set = trace_curves(t, &chart, 80);
        for p in set.curve("sigma").unwrap().vertices() {
            let u = chart.lift(p[0], p[1]);
            let n = vec::dot3(&u, &u).sqrt();
            let u = u.map(|x| x / n);
            let s = slack(&scene, &Direction::new(u.to_vec()).unwrap());
            if s.abs() < 1e-7 {
                on.push(u);
            } else if s < -1e-3 {
                inside.push(u);
            }
        }
    }
    (on, inside)
}

#[test]
fn gradient_nudge_crosses_the_boundary() {
    let mut crossings = 0;
    for seed in 0..4 {
        let (scene, _, _) = stabbed(3, 3, seed);
        let t = Triple::from_scene(&scene).unwrap();
        let (on, _) = boundary_sigma_points(&t);
        for u in on.iter().take(10) {
            let g = sigma_gradient(&t, u);
            let along = vec::dot3(&g, u);
            let tangent = [0, 1, 2].map(|k| g[k] - along * u[k]);
            let tn = vec::dot3(&tangent, &tangent).sqrt();
            if tn == 0.0 {
                continue;
            }
            let step = |s: f64| Direction::new((0..3).map(|k| u[k] + s * 1e-5 * tangent[k] / tn).collect()).unwrap();
            let (plus, minus) = (slack(&scene, &step(1.0)), slack(&scene, &step(-1.0)));
            // one side inside the cone, the other outside
            assert!(plus * minus < 0.0, "seed {seed}: {plus} {minus}");
            crossings += 1;
        }
    }
    assert!(crossings >= 10);
}

/// Seeded search for a triple with two geometric permutations.
fn two_permutation_triple() -> Scene {
    for seed in 0..500 {
        let gen = random_disjoint_scene(&SceneRequest::new(3, 3, 1.0, 3.0, seed).extent(4.0)).unwrap();
        let catalog = enumerate_geometric_permutations(&gen.scene, 4000, 1, &mm()).unwrap();
        if catalog.len() == 2 && catalog.permutations.iter().all(|p| p.samples >= 20) {
            return gen.scene;
        }
    }
    panic!("no two-permutation triple found");
}

#[test]
fn two_permutations_found_with_witnesses() {
    let scene = two_permutation_triple();
    let catalog = enumerate_geometric_permutations(&scene, 20_000, 1, &mm()).unwrap();
    assert_eq!(catalog.len(), 2);
    for p in &catalog.permutations {
        let q = OrderedQuery::new(scene.clone(), p.order.clone()).unwrap();
        assert!(direction_feasible(&q, &p.witness, &mm()).unwrap().feasible);
    }
    // every great circle joining the two cones (either orientation) leaves
    // the feasible set somewhere
    let (a, b) = (&catalog.permutations[0].witness, &catalog.permutations[1].witness);
    for target in [b.clone(), b.antipode()] {
        let blocked = (1..100).any(|k| {
            let m = great_circle_point(a, &target, k as f64 / 100.0).unwrap();
            slack(&scene, &m) > 0.0
        });
        assert!(blocked);
    }
    let comps = count_components(&scene, 20_000, 1, &mm()).unwrap();
    assert_eq!(comps.components, 2);
    assert!(comps.matches_permutations());
}

#[test]
fn pinned_predicate() {
    assert!(is_pinned_planar(&pinned_triple()));
    let (scene, _, _) = stabbed(3, 3, 4);
    assert!(!is_pinned_planar(&Triple::from_scene(&scene).unwrap()));
    let c = Triple::from_scene(&collinear_scene()).unwrap();
    assert!(!is_pinned_planar(&c));
}

#[test]
fn boundary_classification_cases() {
    let mut boundary_checked = 0;
    let mut interior_checked = 0;
    for seed in 0..8 {
        let (scene, _, _) = stabbed(3, 3, seed);
        let t = Triple::from_scene(&scene).unwrap();
        let (on, inside) = boundary_sigma_points(&t);
        for u in on.iter().take(5) {
            let c = classify_boundary_direction(&t, u).unwrap();
            if c.skipped.is_some() {
                continue;
            }
            assert!(c.empirical_boundary && c.predicted_boundary, "{c:?}");
            boundary_checked += 1;
        }
        for u in inside.iter().take(5) {
            let c = classify_boundary_direction(&t, u).unwrap();
            assert!(!c.predicted_boundary && c.consistent, "{c:?}");
            assert!(c.tritangents.iter().any(|tt| !tt.crosses_triangle));
            let line = c.stabbing_line.expect("interior direction has a stabbing line");
            for k in 0..3 {
                assert!(line.distance_to(&t.centers()[k]) < t.radii()[k]);
            }
            interior_checked += 1;
        }
    }
    assert!(boundary_checked >= 5, "{boundary_checked}");
    assert!(interior_checked >= 1, "{interior_checked}");

    let c = classify_boundary_direction(&Triple::from_scene(&collinear_scene()).unwrap(), &[0.0, 1.0, 0.0]).unwrap();
    assert!(c.skipped.is_some());
}

#[test]
fn helly_agrees_on_a_cap() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (scene, u0, order) = stabbed(5, 3, 11);
    let q = OrderedQuery::new(scene, order).unwrap();
    let dirs: Vec<Direction> = (0..200).map(|_| random_in_cap(&mut rng, &u0, 0.3)).collect();
    let report = helly_consistency(&q, &dirs, &mm()).unwrap();
    assert!(report.discrepancies.is_empty(), "{report:?}");
    assert!(report.feasible_directions > 0 && report.feasible_directions < 200);
}

#[test]
fn convexity_on_disjoint_and_overlapping_scenes() {
    let opts = ConvexityOptions {
        pairs: 1000,
        lattice: 5000,
        ..ConvexityOptions::default()
    };
    let (scene, _, order) = stabbed(3, 3, 5);
    let report = cone_convexity_check(&OrderedQuery::new(scene, order).unwrap(), &opts).unwrap();
    assert!(report.passed(), "{report:?}");

    let (scene, _, order) = stabbed(5, 4, 6);
    let report = cone_convexity_check(&OrderedQuery::new(scene, order).unwrap(), &opts).unwrap();
    assert!(report.violations.is_empty());

    let overlapping = OrderedQuery::identity(transition_scene(-0.055));
    let report = cone_convexity_check(&overlapping, &ConvexityOptions { pairs: 4000, ..opts }).unwrap();
    assert!(!report.violations.is_empty());
}

#[test]
fn no_transversal_is_inconclusive() {
    let balls = vec![
        Ball::new(vec![0.0, 0.0, 0.0], 0.1).unwrap(),
        Ball::new(vec![10.0, 0.0, 0.0], 0.1).unwrap(),
        Ball::new(vec![0.0, 10.0, 0.0], 0.1).unwrap(),
    ];
    let q = OrderedQuery::identity(Scene::new(3, balls).unwrap());
    let opts = ConvexityOptions {
        pairs: 100,
        lattice: 2000,
        ..ConvexityOptions::default()
    };
    let report = cone_convexity_check(&q, &opts).unwrap();
    assert!(report.inconclusive && !report.passed());
}

#[test]
fn feasible_witnesses_lie_in_every_projected_disk() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (scene, _, order) = stabbed(4, 3, 7);
    let q = OrderedQuery::new(scene.clone(), order).unwrap();
    for _ in 0..100 {
        let u = random_direction(&mut rng, 3);
        let f = direction_feasible(&q, &u, &mm()).unwrap();
        if f.feasible {
            assert!(f.slack <= mm().tol);
            // the witness lies on u-perp and within every projected disk
            let w = &f.witness_point;
            assert!(vec::dot(w, u.components()).abs() < 1e-9);
            for b in scene.balls() {
                let d = vec::sub(&b.center, w);
                let along = vec::dot(&d, u.components());
                let perp2 = vec::dot(&d, &d) - along * along;
                assert!(perp2.sqrt() <= b.radius + 1e-9);
            }
        }
    }
}
