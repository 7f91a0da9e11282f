use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transversal_core::geom::sphere::{apply, random_direction, random_orthogonal};
use transversal_core::geom::{random_disjoint_scene, vec, Ball, SceneRequest};
use transversal_core::scenes::{transition_triple, TRANSITION_GAPS};
use transversal_core::sextic::{
    eval_hessian_sigma, eval_sigma, eval_sigma_expanded, hessian_matrix, pair_cone_quadratic, sigma_gradient,
    tangent_lines_for_direction, trace_curves, Chart, TangentSolution, Triple,
};

fn random_triple(rng: &mut ChaCha8Rng) -> Triple {
    loop {
        let c: [[f64; 3]; 3] = [0, 1, 2].map(|_| [0, 1, 2].map(|_| rng.random_range(-5.0..5.0)));
        let r = [0, 1, 2].map(|_| rng.random_range(0.3..1.5));
        if let Ok(t) = Triple::new(c, r) {
            return t;
        }
    }
}

/// Triples strung along a random line, so that σ has real zeros.
fn stabbed_triple(seed: u64) -> Triple {
    let gen = random_disjoint_scene(&SceneRequest::new(3, 3, 0.5, 1.5, seed).with_transversal()).unwrap();
    Triple::from_scene(&gen.scene).unwrap()
}

fn unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let u = random_direction(rng, 3);
    [u.components()[0], u.components()[1], u.components()[2]]
}

/// Relative closeness with a floor tied to the size of the polynomial.
fn close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(scale)
}

#[test]
fn sigma_is_invariant_under_relabeling() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for _ in 0..20 {
        let t = random_triple(&mut rng);
        let u = unit(&mut rng);
        let base = eval_sigma(&t, &u);
        for p in perms {
            assert!(close(eval_sigma(&t.permuted(p), &u), base, t.sigma_scale(), 1e-10));
        }
    }
}

#[test]
fn sigma_is_rotation_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let t = random_triple(&mut rng);
        let rot = random_orthogonal(&mut rng, 3);
        let rc = t.centers().map(|c| {
            let v = apply(&rot, &c);
            [v[0], v[1], v[2]]
        });
        let rt = Triple::new(rc, *t.radii()).unwrap();
        let u = unit(&mut rng);
        let ru = apply(&rot, &u);
        let ru = [ru[0], ru[1], ru[2]];
        assert!(close(eval_sigma(&rt, &ru), eval_sigma(&t, &u), t.sigma_scale(), 1e-10));
        // translations do nothing either
        let shifted = Triple::new(t.centers().map(|c| [c[0] + 3.0, c[1] - 1.0, c[2] + 0.5]), *t.radii()).unwrap();
        assert!(close(eval_sigma(&shifted, &u), eval_sigma(&t, &u), t.sigma_scale(), 1e-10));
    }
}

#[test]
fn forms_are_homogeneous_of_degree_6_and_12() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let t = random_triple(&mut rng);
    let sigma = t.sigma_poly();
    let hess = t.hessian_poly();
    assert_eq!(sigma.poly.total_degree(), Some(6));
    assert!(sigma.poly.is_homogeneous(6));
    assert!(hess.poly.is_homogeneous(12));
    for _ in 0..10 {
        let u = unit(&mut rng);
        let u2 = u.map(|x| 2.0 * x);
        assert!(close(eval_sigma(&t, &u2), 64.0 * eval_sigma(&t, &u), 64.0 * t.sigma_scale(), 1e-10));
        assert!(sigma.check_homogeneity(&u, 2.0, 1e-10));
        assert!(hess.check_homogeneity(&u, 1.7, 1e-9));
        let h = eval_hessian_sigma(&t, &u);
        assert!(close(hess.eval(&u), h, h.abs(), 1e-8));
    }
}

#[test]
fn numeric_and_expanded_sigma_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let t = random_triple(&mut rng);
        let u = unit(&mut rng);
        let a = eval_sigma(&t, &u);
        let b = eval_sigma_expanded(&t, &u);
        assert!((a - b).abs() <= 1e-10 * t.sigma_scale(), "{a} vs {b}");
    }
}

#[test]
fn hessian_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = 1e-4;
    for _ in 0..10 {
        let t = random_triple(&mut rng);
        let u = unit(&mut rng);
        let grad = sigma_gradient(&t, &u);
        let m = hessian_matrix(&t, &u);
        let f = |v: [f64; 3]| eval_sigma(&t, &v);
        for i in 0..3 {
            let mut up = u;
            let mut dn = u;
            up[i] += h;
            dn[i] -= h;
            let fd = (f(up) - f(dn)) / (2.0 * h);
            assert!((fd - grad[i]).abs() <= 1e-5 * t.sigma_scale());
            for j in 0..3 {
                let e = |a: f64, b: f64| {
                    let mut v = u;
                    v[i] += a;
                    v[j] += b;
                    f(v)
                };
                let fd = (e(h, h) - e(h, -h) - e(-h, h) + e(-h, -h)) / (4.0 * h * h);
                assert!((fd - m[i][j]).abs() <= 1e-5 * t.sigma_scale(), "{fd} vs {}", m[i][j]);
            }
        }
        // Euler: u . grad = 6 sigma
        let euler = vec::dot3(&u, &grad);
        assert!((euler - 6.0 * f(u)).abs() <= 1e-9 * t.sigma_scale());
    }
}

fn sigma_vertices(t: &Triple, grid: usize) -> Vec<[f64; 3]> {
    let mut out = Vec::new();
    for k in 0..3 {
        let chart = Chart::coordinate(k, 1.0);
        let set = trace_curves(t, &chart, grid);
        for p in set.curve("sigma").unwrap().vertices() {
            let u = chart.lift(p[0], p[1]);
            let n = vec::dot3(&u, &u).sqrt();
            out.push(u.map(|x| x / n));
        }
    }
    out
}

#[test]
fn traced_sigma_directions_carry_tritangents() {
    let mut checked = 0;
    for seed in 0..5 {
        let t = stabbed_triple(seed);
        assert!(!t.collinear());
        let verts = sigma_vertices(&t, 80);
        let step = (verts.len() / 20).max(1);
        for u in verts.iter().step_by(step).take(20) {
            match tangent_lines_for_direction(&t, u).unwrap() {
                TangentSolution::Lines(lines) => {
                    assert!(!lines.is_empty());
                    for l in lines {
                        for k in 0..3 {
                            let err = (l.distance_to(&t.centers()[k]) - t.radii()[k]).abs();
                            assert!(err <= 1e-8, "tangency error {err}");
                        }
                        checked += 1;
                    }
                }
                TangentSolution::Circle { .. } => panic!("generic triple"),
            }
        }
    }
    assert!(checked >= 100, "{checked}");
}

#[test]
fn off_sextic_directions_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let t = random_triple(&mut rng);
    let u = loop {
        let u = unit(&mut rng);
        if eval_sigma(&t, &u).abs() > 1e-3 * t.sigma_scale() {
            break u;
        }
    };
    assert!(tangent_lines_for_direction(&t, &u).is_err());
}

#[test]
fn pair_cone_along_center_edge() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let t = random_triple(&mut rng);
        let b = |k: usize| Ball::new(t.centers()[k].to_vec(), t.radii()[k]).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let form = pair_cone_quadratic(&b(i), &b(j)).unwrap();
            let e = t.edge(i, j);
            let n = vec::dot3(&e, &e).sqrt();
            let u = e.map(|x| x / n);
            let rs = t.radii()[i] + t.radii()[j];
            assert!((form.eval(&u) + rs * rs).abs() < 1e-10);
            // perpendicular to the edge: squared distance minus squared radius sum
            let p = vec::cross3(&u, &[u[1], u[2], u[0]]);
            let pn = vec::dot3(&p, &p).sqrt();
            let p = p.map(|x| x / pn);
            assert!((form.eval(&p) - (n * n - rs * rs)).abs() < 1e-9);
            assert!(!form.degenerate);
        }
    }
}

#[test]
fn collinear_triples_trace_concentric_circles() {
    let t = Triple::new([[0.0, 0.0, 0.0], [0.0, 0.0, 4.0], [0.0, 0.0, 9.0]], [1.0, 1.5, 0.7]).unwrap();
    assert!(t.collinear());
    let set = trace_curves(&t, &Chart::coordinate(2, 2.0), 200);
    let sigma = set.curve("sigma").unwrap();
    assert!(!sigma.polylines.is_empty());
    for line in &sigma.polylines {
        let radii: Vec<f64> = line.iter().map(|p| p[0].hypot(p[1])).collect();
        let (lo, hi) = radii.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
        assert!(hi - lo < 1e-6, "polyline is not a circle about the axis: {lo}..{hi}");
    }
    // along the axis there is a whole circle of tangents
    assert!(matches!(
        tangent_lines_for_direction(&t, &[0.0, 0.0, 1.0]),
        Ok(TangentSolution::Circle { .. }) | Err(_)
    ));
}

#[test]
fn transition_family_has_sigma_and_hessian_curves() {
    for gap in TRANSITION_GAPS {
        let t = transition_triple(gap);
        let set = trace_curves(&t, &Chart::coordinate(0, 2.0), 160);
        let sigma = set.curve("sigma").unwrap();
        let hess = set.curve("hessian").unwrap();
        assert!(sigma.vertices().count() > 0 && hess.vertices().count() > 0, "gap {gap}");
        // the Hessian changes sign somewhere along the sextic: the curves meet
        let signs: Vec<f64> = sigma
            .vertices()
            .map(|p| eval_hessian_sigma(&t, &set.chart.lift(p[0], p[1])).signum())
            .collect();
        assert!(signs.iter().any(|&s| s > 0.0) && signs.iter().any(|&s| s < 0.0), "gap {gap}");
    }
}
