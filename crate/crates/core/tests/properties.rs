mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use simmap::fixtures::{self, Fixture};
use simmap::forms::{build_basis, integrate, integrate_with, psi_from_xi, validate_closed, xi_from_psi, Traversal};
use simmap::mesh::{build_cut_graph, cut_graph_from_dual_tree, cut_mesh, homology_loops, tree_cotree};
use simmap::metric::{conformal_lengths, corner_mu, curvatures, triangle_angles, CornerMetric};

use common::*;

fn all_fixtures() -> Vec<Fixture> {
    vec![
        fixtures::tetrahedron(),
        fixtures::torus_grid(5, 4),
        fixtures::flat_torus(6, 6, Some((7, [0.2, 0.1]))),
        fixtures::genus_two(),
        fixtures::pillow(0.1),
        fixtures::icosphere(1),
    ]
}

#[test]
fn corner_sets_partition_the_corners() {
    for f in all_fixtures() {
        let total: usize = (0..f.mesh.vertex_count()).map(|r| f.mesh.vertex_corner_set(r).len()).sum();
        assert_eq!(total, 3 * f.mesh.face_count());
    }
}

#[test]
fn tree_cotree_partitions_edges() {
    for f in all_fixtures() {
        let g = f.mesh.genus().unwrap();
        for root in [0, f.mesh.vertex_count() - 1] {
            let t = tree_cotree(&f.mesh, root).unwrap();
            assert_eq!(t.primal.len() + t.dual.len() + t.leftover.len(), f.mesh.edge_count());
            assert_eq!(t.leftover.len(), 2 * g);
            assert_eq!(t.primal.len(), f.mesh.vertex_count() - 1);
            assert_eq!(t.dual.len(), f.mesh.face_count() - 1);
        }
    }
}

#[test]
fn dual_loop_reversal_flips_signs() {
    for f in [fixtures::torus_grid(4, 5), fixtures::genus_two()] {
        let loops = homology_loops(&f.mesh, &tree_cotree(&f.mesh, 0).unwrap()).unwrap();
        for l in loops {
            let r = l.reversed(&f.mesh).unwrap();
            let mut forward: Vec<(usize, i8)> = l.steps().iter().map(|s| (s.pivot_halfedge, s.sign)).collect();
            let mut backward: Vec<(usize, i8)> = r.steps().iter().map(|s| (s.pivot_halfedge, -s.sign)).collect();
            forward.sort();
            backward.sort();
            assert_eq!(forward, backward);
        }
    }
}

#[test]
fn gauss_bonnet_holds_at_every_sampled_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for i in 0..12 {
        let state = sample_state(i);
        let y = random_feasible_y(&state, &mut rng, 0.4);
        let m = state.metric_at(&y).unwrap();
        let c = curvatures(&m.angles().unwrap(), &m.mesh, &[]);
        let chi = m.mesh.euler_characteristic() as f64;
        assert!((c.total_curvature() - 2.0 * PI * chi).abs() <= 1e-10);
    }
}

fn triangle_lengths() -> impl Strategy<Value = [f64; 3]> {
    (0.1f64..10.0, 0.1f64..10.0, 0.01f64..0.99).prop_map(|(a, b, t)| {
        // Third side strictly between |a − b| and a + b.
        let lo = (a - b).abs();
        [a, b, lo + t * (a + b - lo)]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triangle_angles_sum_to_pi(l in triangle_lengths()) {
        let a = triangle_angles(l.map(|x| 2.0 * x.ln())).unwrap();
        prop_assert!((a.iter().sum::<f64>() - PI).abs() <= 1e-12);
    }

    #[test]
    fn angles_ignore_per_triangle_scale(l in triangle_lengths(), c in -20.0f64..20.0) {
        let mu = l.map(|x| 2.0 * x.ln());
        let a = triangle_angles(mu).unwrap();
        let b = triangle_angles(mu.map(|m| m + c)).unwrap();
        for k in 0..3 {
            prop_assert!((a[k] - b[k]).abs() <= 1e-12);
        }
    }

    #[test]
    fn cut_mesh_is_a_disk(seed in any::<u64>(), cones in proptest::collection::vec(0usize..36, 0..6)) {
        let f = fixtures::torus_grid(6, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree = random_dual_tree(&f.mesh, &mut rng);
        for graph in [
            build_cut_graph(&f.mesh, &cones).unwrap(),
            cut_graph_from_dual_tree(&f.mesh, &cones, &tree).unwrap(),
        ] {
            let c = cut_mesh(&f.mesh, &graph).unwrap();
            prop_assert_eq!(c.mesh.euler_characteristic(), 1);
            prop_assert_eq!(c.mesh.boundary_loops().len(), 1);
            for &v in &cones {
                prop_assert!(graph.vertices().contains(&v));
            }
        }
    }

    #[test]
    fn expanded_coefficients_are_closed_and_recoverable(seed in any::<u64>(), scale in 0.01f64..2.0) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = fixtures::torus_grid(4, 5);
        let loops = homology_loops(&f.mesh, &tree_cotree(&f.mesh, 0).unwrap()).unwrap();
        let basis = build_basis(&f.mesh, &loops, 19).unwrap();
        let y: Vec<f64> = (0..basis.len()).map(|_| rng.random_range(-scale..scale)).collect();
        let xi = basis.expand(&y).unwrap();
        prop_assert!(validate_closed(&f.mesh, xi.values().to_vec()).is_ok());
        let back = basis.pinv_apply(&basis.corner_increment(&y).unwrap()).unwrap();
        for (a, b) in y.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
        let coeffs = basis.coefficients_of(&xi).unwrap();
        for (a, b) in y.iter().zip(&coeffs) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn psi_round_trip(seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = fixtures::icosphere(1);
        let basis = build_basis(&f.mesh, &[], 0).unwrap();
        let y: Vec<f64> = (0..basis.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let xi = basis.expand(&y).unwrap();
        let psi = psi_from_xi(&f.mesh, &xi);
        let again = psi_from_xi(&f.mesh, &xi_from_psi(&f.mesh, &psi).unwrap());
        for (a, b) in psi.values().iter().zip(again.values()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn integration_ignores_traversal_order(seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = fixtures::torus_grid(5, 5);
        let loops = homology_loops(&f.mesh, &tree_cotree(&f.mesh, 0).unwrap()).unwrap();
        let basis = build_basis(&f.mesh, &loops, 0).unwrap();
        let y: Vec<f64> = (0..basis.len()).map(|_| rng.random_range(-0.5..0.5)).collect();
        let xi = basis.expand(&y).unwrap();
        let tree = random_dual_tree(&f.mesh, &mut rng);
        let cut = cut_mesh(&f.mesh, &cut_graph_from_dual_tree(&f.mesh, &[], &tree).unwrap()).unwrap();
        let root = rng.random_range(0..cut.mesh.vertex_count());
        let bfs = integrate_with(&xi, &cut, root, Traversal::BreadthFirst).unwrap();
        let dfs = integrate_with(&xi, &cut, root, Traversal::DepthFirst).unwrap();
        for (a, b) in bfs.values.iter().zip(&dfs.values) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn conformal_rescaling_keeps_cross_ratios(seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = fixtures::icosphere(1);
        let g = f.metric();
        let basis = build_basis(&f.mesh, &[], 0).unwrap();
        let y: Vec<f64> = (0..basis.len()).map(|_| rng.random_range(-0.5..0.5)).collect();
        let xi = basis.expand(&y).unwrap();
        let cut = cut_mesh(&f.mesh, &build_cut_graph(&f.mesh, &[3, 17]).unwrap()).unwrap();
        let phi = integrate(&xi, &cut, 0).unwrap();
        let after = conformal_lengths(&f.mesh, &g, &phi, &cut);
        let before: Vec<f64> = (0..cut.mesh.halfedge_count()).map(|h| g.length(f.mesh.edge(h))).collect();
        let m = &cut.mesh;
        for h in (0..m.halfedge_count()).filter(|&h| m.sibling(h).is_some()) {
            let s = m.sibling(h).unwrap();
            let ratio = |l: &[f64]| (l[m.next(h)] * l[m.next(s)]) / (l[m.prev(h)] * l[m.prev(s)]);
            let (a, b) = (ratio(&before), ratio(&after));
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }
    }
}

#[test]
fn corner_mu_matches_edge_lengths_for_zero_form() {
    let f = fixtures::torus_grid(4, 4);
    let g = f.metric();
    let zero = simmap::ClosedOneForm::zero(f.mesh.halfedge_count());
    let m = corner_mu(&f.mesh, &g, &zero);
    assert_eq!(m, CornerMetric::from_edge_metric(&f.mesh, &g));
}
