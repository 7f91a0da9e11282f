use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transversal_core::flexprobe::{
    big_q, certify_flex_free, certify_octant_separation, gram_from_barycentrics, hessian_cross_check,
    lifted_hessian_decomposition, others, q_invariant, star_h_canonical, CanonicalCoords, FlexProbeOptions,
    LiftedConfig,
};
use transversal_core::geom::{random_disjoint_scene, vec, SceneRequest};
use transversal_core::scenes::transition_triple;
use transversal_core::sextic::{eval_hessian_sigma, Triple};

fn random_config(rng: &mut ChaCha8Rng) -> LiftedConfig {
    let a = rng.random_range(1.0..5.0);
    let b = rng.random_range(-3.0..6.0);
    let c = rng.random_range(1.0..5.0);
    let p = [0, 1, 2].map(|_| rng.random_range(0.05..1.0));
    let x = [0, 1, 2].map(|_| rng.random_range(-6.0..6.0));
    LiftedConfig::new(a, b, c, p, x).unwrap()
}

fn dot2(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[0] + u[1] * v[1]
}

#[test]
fn gram_matches_coordinates() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let cfg = random_config(&mut rng);
        let g = gram_from_barycentrics(&cfg);
        let scale = cfg.s().iter().copied().fold(0.0, f64::max);
        for i in 0..3 {
            for j in 0..3 {
                let direct = dot2(cfg.v(i), cfg.v(j));
                assert!((g[i][j] - direct).abs() <= 1e-12 * scale.max(1.0) * 10.0, "{i}{j}: {} vs {direct}", g[i][j]);
            }
            // the weights span the kernel: Σ p_j v_j = 0
            let row: f64 = (0..3).map(|j| g[i][j] * cfg.p[j]).sum();
            assert!(row.abs() <= 1e-10 * scale.max(1.0));
        }
    }
}

#[test]
fn equilateral_centroid_gram() {
    let h = 3f64.sqrt() / 2.0;
    let cfg = LiftedConfig::new(1.0, 0.5, h, [1.0, 1.0, 1.0], [0.0; 3]).unwrap();
    let q = cfg.q();
    assert!((q[0] - q[1]).abs() < 1e-15 && (q[1] - q[2]).abs() < 1e-15);
    let g = gram_from_barycentrics(&cfg);
    let expected = -4.5 * q[0] * q[0];
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        assert!((g[i][j] - expected).abs() < 1e-14);
    }
}

#[test]
fn delta_equals_squared_double_area() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let cfg = random_config(&mut rng);
        let inv = q_invariant(&cfg);
        assert!(inv.nondegenerate);
        assert!((inv.delta - inv.delta_direct).abs() <= 1e-10 * inv.delta_direct);
    }
    assert_eq!(big_q(&[1.0, 1.0, 1.0]), 3.0);
}

#[test]
fn degenerate_q_is_flagged() {
    assert!(big_q(&[1.0, 1.0, 3.0]) < 0.0);
    assert_eq!(big_q(&[1.0, 2.0, 3.0]), 0.0);
    // a flat triangle bypasses the constructor checks
    let flat = LiftedConfig::new_unchecked(2.0, 1.0, 0.0, [1.0, 1.0, 1.0], [0.0, 1.0, 2.0]);
    let inv = q_invariant(&flat);
    assert!(!inv.nondegenerate, "{inv:?}");
    let cert = certify_octant_separation(&CanonicalCoords::from_q([1.0, 1.0, 3.0]).unwrap());
    assert!(cert.boundary_case && !cert.pass);
}

#[test]
fn decomposition_signs_and_master_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let cfg = random_config(&mut rng);
        let dec = lifted_hessian_decomposition(&cfg);
        assert!(dec.h2 <= 0.0 && dec.h4 >= 0.0);
        let gap = hessian_cross_check(&cfg).unwrap();
        assert!(gap <= 1e-8, "relative gap {gap}");
        let direct = eval_hessian_sigma(&cfg.lifted_triple().unwrap(), &[0.0, 0.0, 1.0]);
        assert!((direct - dec.hessian).abs() <= 1e-8 * direct.abs().max(dec.hessian.abs()));
    }
}

#[test]
fn equal_heights_give_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let base = random_config(&mut rng);
        let h = rng.random_range(-3.0..3.0);
        let cfg = LiftedConfig::new(base.a, base.b, base.c, base.p, [h; 3]).unwrap();
        let dec = lifted_hessian_decomposition(&cfg);
        assert_eq!((dec.h2, dec.h4, dec.hessian), (0.0, 0.0, 0.0));
    }
}

#[test]
fn disjointness_matches_ball_coordinates() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut disjoint, mut overlapping) = (0, 0);
    for _ in 0..500 {
        let cfg = random_config(&mut rng);
        let t = cfg.lifted_triple().unwrap();
        let coords = CanonicalCoords::from_config(&cfg).unwrap();
        let w = coords.w_of(&cfg);
        let q = cfg.q();
        let z = cfg.z();
        for k in 0..3 {
            let (i, j) = others(k);
            let gap = vec::dot3(&t.edge(i, j), &t.edge(i, j)).sqrt() - t.radii()[i] - t.radii()[j];
            if gap.abs() < 1e-9 {
                continue;
            }
            assert_eq!(gap > 0.0, w[k] > coords.vertex[k], "pair {i}{j}");
            let bound = (q[k] * q[k] - (q[i] - q[j]).powi(2)) / (cfg.p[i] * cfg.p[j]);
            assert_eq!(gap > 0.0, z[k] > bound);
            if gap > 0.0 {
                disjoint += 1;
            } else {
                overlapping += 1;
            }
        }
    }
    assert!(disjoint > 50 && overlapping > 50);
}

#[test]
fn star_h_has_the_sign_of_the_decomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut compared = 0;
    for _ in 0..300 {
        let cfg = random_config(&mut rng);
        let dec = lifted_hessian_decomposition(&cfg);
        let scale = dec.h2.abs().max(dec.h4);
        if dec.total.abs() < 1e-9 * scale {
            continue;
        }
        let coords = CanonicalCoords::from_config(&cfg).unwrap();
        let s = star_h_canonical(&coords, &coords.w_of(&cfg));
        assert_eq!(s.value > 0.0, dec.total > 0.0);
        assert!((s.value - s.asymptotic - s.constant).abs() <= 1e-9 * s.value.abs().max(s.constant.abs()));
        compared += 1;
    }
    assert!(compared > 250);
}

#[test]
fn symmetric_canonical_values() {
    let k = CanonicalCoords::from_q([1.0, 1.0, 1.0]).unwrap();
    assert_eq!(k.canonical_a, [0.75; 3]);
    assert_eq!(k.beta, [0.375; 3]);
    assert!((k.beta_pair_sum - 27.0 / 64.0).abs() < 1e-15);
    let at_center = star_h_canonical(&k, &k.beta);
    assert!((at_center.value + 27.0 / 64.0).abs() < 1e-15);
    let cert = certify_octant_separation(&k);
    assert_eq!(cert.vertex, [1.0; 3]);
    assert!((cert.star_h_at_vertex - 0.75).abs() < 1e-15);
    assert!(cert.pass);

    let tight = certify_octant_separation(&CanonicalCoords::from_q([1.0, 1.0, 2.0]).unwrap());
    assert!(tight.star_h_at_vertex.abs() < 1e-14 && tight.closed_form == 0.0);
    assert!(tight.boundary_case && !tight.pass);
}

fn random_triangle_q(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let q = [0, 1, 2].map(|_| rng.random_range(0.1..3.0));
        if big_q(&q) > 1e-6 {
            return q;
        }
    }
}

#[test]
fn vertex_factorization_and_plane() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let k = CanonicalCoords::from_q(random_triangle_q(&mut rng)).unwrap();
        let cert = certify_octant_separation(&k);
        assert!((cert.star_h_at_vertex - cert.closed_form).abs() <= 1e-12 * cert.closed_form.max(1.0) * 10.0);
        assert!(cert.pass, "{cert:?}");
        // β pairs against the closed form
        let q4: f64 = k.q.iter().map(|x| x.powi(4)).product();
        let expected = k.big_q.powi(3) / (64.0 * q4);
        assert!((k.beta_pair_sum - expected).abs() <= 1e-10 * expected);
    }
}

#[test]
fn octant_lies_on_the_positive_sheet() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let k = CanonicalCoords::from_q(random_triangle_q(&mut rng)).unwrap();
        for _ in 0..50 {
            let w = [0, 1, 2].map(|i| k.vertex[i] + 10f64.powf(rng.random_range(-8.0..4.0)));
            let s = star_h_canonical(&k, &w);
            assert!(s.value > 0.0, "q={:?} w={w:?} value={}", k.q, s.value);
            assert!(s.t.iter().sum::<f64>() > 0.0);
        }
    }
}

fn stabbed_triple(seed: u64) -> Triple {
    let gen = random_disjoint_scene(&SceneRequest::new(3, 3, 0.5, 1.5, seed).with_transversal()).unwrap();
    Triple::from_scene(&gen.scene).unwrap()
}

#[test]
fn disjoint_triple_is_flex_free() {
    let opts = FlexProbeOptions {
        samples: 60,
        lattice: 2000,
        ..FlexProbeOptions::default()
    };
    let mut probed = 0;
    for seed in 0..6 {
        let report = certify_flex_free(&stabbed_triple(seed), &opts).unwrap();
        if report.samples.is_empty() {
            continue;
        }
        probed += 1;
        assert!(report.pass, "seed {seed}: min margin {}", report.min_margin);
        assert!(report.samples.iter().all(|s| s.margin > 0.0 && s.disjointness_slack > 0.0));
        assert!(report.max_hessian_gap < 1e-6);
    }
    assert!(probed >= 2);
}

#[test]
fn overlapping_pair_loses_the_certificate() {
    let opts = FlexProbeOptions {
        samples: 200,
        lattice: 4000,
        ..FlexProbeOptions::default()
    };
    let report = certify_flex_free(&transition_triple(-0.055), &opts).unwrap();
    assert!(!report.samples.is_empty());
    assert!(!report.pass);
    assert!(report.min_margin <= 0.0 || report.min_disjointness_slack <= 0.0);
}
