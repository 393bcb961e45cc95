mod common;

use cffa_core::generators::{gen_random, Structure};
use cffa_core::graph::Graph;
use cffa_core::sbmwis::{mwis_unbounded_bruteforce, sbmwis_bruteforce, sbmwis_ifc, GraphClassDecl, WeightedGraph};
use cffa_core::{Budget, Completeness};
use proptest::prelude::*;

fn class_graph(structure: Structure, v: usize, seed: u64) -> Graph {
    let p = common::profile(v, 1, Completeness::Partial, None, structure);
    gen_random(&p, seed).unwrap().graph().clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn brute_force_matches_subset_scan(seed in any::<u64>(), v in 1usize..11, k in 0usize..5, rho in 0u64..25) {
        let mut rng = common::rng(seed);
        let g = common::random_graph(&mut rng, v, 0.4);
        let w: Vec<u64> = (0..v).map(|x| seed >> (x * 3) & 7).collect();
        let wg = WeightedGraph::new(g.clone(), w.clone()).unwrap();
        let got = sbmwis_bruteforce(&wg, k, rho, &Budget::default()).unwrap();
        prop_assert_eq!(got.is_some(), common::sbmwis_exists(&g, &w, k, rho));
        if let Some(s) = got {
            prop_assert!(wg.is_solution(&s, k, rho));
        }
        let unbounded = mwis_unbounded_bruteforce(&wg, rho, &Budget::default()).unwrap();
        prop_assert_eq!(unbounded.is_some(), common::sbmwis_exists(&g, &w, v, rho));
    }

    #[test]
    fn branching_is_exact_on_declared_classes(seed in any::<u64>(), v in 1usize..15, k in 1usize..6, rho in 0u64..30, which in 0usize..3) {
        let (structure, decl) = [
            (Structure::Bipartite, GraphClassDecl::Bipartite),
            (Structure::Degenerate(2), GraphClassDecl::Degenerate(2)),
            (Structure::TriangleFree, GraphClassDecl::TriangleFree),
        ][which];
        let g = class_graph(structure, v, seed);
        let w: Vec<u64> = (0..v).map(|x| seed.rotate_left(x as u32 * 4) & 15).collect();
        let wg = WeightedGraph::new(g, w).unwrap();
        let b = Budget::default();
        let fast = sbmwis_ifc(&wg, decl, k, rho, &b).unwrap();
        let slow = sbmwis_bruteforce(&wg, k, rho, &b).unwrap();
        prop_assert_eq!(fast.is_some(), slow.is_some());
        if let Some(s) = fast {
            prop_assert!(wg.is_solution(&s, k, rho));
        }
    }

    #[test]
    fn misdeclared_classes_never_return_invalid_sets(seed in any::<u64>(), v in 1usize..12, k in 1usize..5, rho in 0u64..20) {
        let mut rng = common::rng(seed);
        let g = common::random_graph(&mut rng, v, 0.7);
        let w: Vec<u64> = (0..v).map(|x| seed >> x & 7).collect();
        let wg = WeightedGraph::new(g, w).unwrap();
        for decl in [GraphClassDecl::Bipartite, GraphClassDecl::Planar, GraphClassDecl::CliqueFree(3)] {
            if let Some(s) = sbmwis_ifc(&wg, decl, k, rho, &Budget::default()).unwrap() {
                prop_assert!(wg.is_solution(&s, k, rho));
            }
        }
    }
}

#[test]
fn high_weight_test_is_division_free() {
    // k·w(v) < ρ for every vertex: no k vertices reach ρ.
    let wg = WeightedGraph::new(Graph::new(6), vec![3; 6]).unwrap();
    assert_eq!(sbmwis_ifc(&wg, GraphClassDecl::Bipartite, 3, 10, &Budget::default()).unwrap(), None);
    assert!(sbmwis_ifc(&wg, GraphClassDecl::Bipartite, 3, 9, &Budget::default()).unwrap().is_some());
}
