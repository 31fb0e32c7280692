mod common;

use common::{gnp, groups_instance, kpath_instance, layered};
use frugal_core::dependency::{build_dependency, build_dependency_enumerated};
use frugal_core::flows::{
    articulation_decomposition, cheapest_kplus1_subgraph, decompose_paths, delta_kplus1,
    enumerate_flows, flow_cost_curve, has_flow, longest_path_dag, min_cost_flow,
};
use frugal_core::spectral::{complete_multipartite, lift, principal_eigen, solve_lozenge};
use frugal_core::system::enumerate_minimal;
use frugal_core::{DiGraph, SetSystem, Subsystem, UGraph};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

const CAP: usize = 100_000;

fn small_systems() -> impl Strategy<Value = SetSystem> {
    prop_oneof![
        kpath_instance(2).prop_map(|(g, k, _)| SetSystem::k_path(g, k).unwrap()),
        (3..=7usize, proptest::collection::vec(any::<bool>(), 21)).prop_filter_map(
            "needs an edge",
            |(n, bits)| {
                let g = gnp(n, &bits);
                (g.n_edges() > 0).then(|| SetSystem::vertex_cover(g).unwrap())
            }
        ),
        groups_instance(5).prop_map(|(groups, r, _)| SetSystem::r_out_of_k(groups, r).unwrap()),
        (
            3..=6usize,
            proptest::collection::vec(proptest::collection::vec(0..6usize, 1..4), 1..5)
        )
            .prop_map(|(n, sets)| {
                let sets = sets
                    .into_iter()
                    .map(|s| s.into_iter().map(|a| a % n).collect())
                    .collect();
                SetSystem::explicit(n, sets).unwrap()
            }),
    ]
}

/// Random DAG on up to ten vertices with at most 25 forward edges.
fn random_network() -> impl Strategy<Value = (DiGraph, Vec<f64>)> {
    (
        4..=10usize,
        proptest::collection::vec(prop::bool::weighted(0.5), 45),
    )
        .prop_flat_map(|(n, bits)| {
            let mut edges = Vec::new();
            let mut b = bits.iter().copied().cycle();
            for u in 0..n {
                for v in u + 1..n {
                    if b.next().unwrap() && edges.len() < 25 {
                        edges.push((u, v));
                    }
                }
            }
            let g = DiGraph::new(n, edges, 0, n - 1).unwrap();
            let m = g.n_edges();
            (
                Just(g),
                proptest::collection::vec((0u8..10).prop_map(f64::from), m),
            )
        })
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << n).map(move |bits| (0..n).map(|i| bits >> i & 1 == 1).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn feasibility_is_upward_closed(system in small_systems()) {
        let n = system.n_agents();
        prop_assume!(n <= 12);
        for mask in subsets(n) {
            if system.is_feasible_mask(&mask) {
                for i in (0..n).filter(|&i| !mask[i]) {
                    let mut bigger = mask.clone();
                    bigger[i] = true;
                    prop_assert!(system.is_feasible_mask(&bigger));
                }
            }
        }
    }

    #[test]
    fn minimal_sets_are_minimal_and_dominate(system in small_systems()) {
        let n = system.n_agents();
        prop_assume!(n <= 12);
        let minimal = system.minimal_feasible_sets(CAP).unwrap();
        for set in &minimal {
            prop_assert!(system.is_feasible(set).unwrap());
            for &e in set {
                let rest: Vec<_> = set.iter().copied().filter(|&a| a != e).collect();
                prop_assert!(!system.is_feasible(&rest).unwrap());
            }
        }
        for mask in subsets(n) {
            if system.is_feasible_mask(&mask) {
                prop_assert!(minimal.iter().any(|m| m.iter().all(|&a| mask[a])));
            }
        }
    }

    #[test]
    fn flow_cost_curve_is_convex((g, costs) in random_network()) {
        let curve = flow_cost_curve(&g, &costs).unwrap();
        prop_assert_eq!(curve.at(0), Some(0.0));
        prop_assert!(curve.is_convex(1e-9));
    }

    #[test]
    fn min_cost_flow_matches_brute_force((g, costs) in random_network(), k in 1..=3usize) {
        let m = g.n_edges();
        prop_assume!(m <= 12);
        let brute = subsets(m)
            .filter(|mask| has_flow(&g, mask, k))
            .map(|mask| (0..m).filter(|&e| mask[e]).map(|e| costs[e]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        match min_cost_flow(&g, &costs, k) {
            Ok(flow) => prop_assert!((flow.cost - brute).abs() < 1e-9),
            Err(_) => prop_assert!(brute.is_infinite()),
        }
    }

    #[test]
    fn flow_enumeration_matches_subset_search((g, _) in random_network(), k in 1..=3usize) {
        let m = g.n_edges();
        prop_assume!(m <= 16);
        let generic = enumerate_minimal(m, |mask| has_flow(&g, mask, k), CAP).unwrap();
        prop_assert_eq!(enumerate_flows(&g, k, CAP).unwrap(), generic);
    }

    #[test]
    fn pruned_subgraph_costs_c_of_k_plus_one((g, k, costs) in kpath_instance(3)) {
        let pruned = cheapest_kplus1_subgraph(&g, &costs, k).unwrap();
        let curve = flow_cost_curve(&g, &costs).unwrap();
        prop_assert!((pruned.cost - curve.at(k + 1).unwrap()).abs() < 1e-9);
        prop_assert_eq!(pruned.size, k + 1);
    }

    #[test]
    fn longest_pruned_path_is_within_delta((g, k, costs) in kpath_instance(3)) {
        let pruned = cheapest_kplus1_subgraph(&g, &costs, k).unwrap();
        let longest = longest_path_dag(&g, &pruned.edges, &costs).unwrap();
        let delta = delta_kplus1(&g, &costs, k, CAP).unwrap();
        prop_assert!(longest <= (k + 1) as f64 * delta + 1e-9);
    }

    #[test]
    fn longest_path_splits_over_parts((g, k, costs) in kpath_instance(3)) {
        let pruned = cheapest_kplus1_subgraph(&g, &costs, k).unwrap();
        let decomposition = articulation_decomposition(&g, &pruned.edges).unwrap();
        let mut total = 0.0;
        for (i, part) in decomposition.parts.iter().enumerate() {
            let (from, to) = (decomposition.points[i], decomposition.points[i + 1]);
            let edges = part.iter().map(|&e| g.edge(e)).collect();
            let sub = DiGraph::new(g.n_vertices(), edges, from, to).unwrap();
            let local: Vec<f64> = part.iter().map(|&e| costs[e]).collect();
            total += longest_path_dag(&sub, &(0..part.len()).collect::<Vec<_>>(), &local).unwrap();
        }
        prop_assert!((total - longest_path_dag(&g, &pruned.edges, &costs).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn dependency_graph_is_symmetric_and_covered(system in small_systems()) {
        prop_assume!(system.n_agents() <= 12);
        let all: Vec<_> = (0..system.n_agents()).collect();
        prop_assume!(system.is_monopoly_free(&all));
        let view = Subsystem::whole(&system).unwrap();
        let h = build_dependency(&view);
        prop_assert_eq!(&h, &build_dependency_enumerated(&view, CAP).unwrap());
        let adj = h.adjacency();
        for i in 0..h.n_nodes() {
            prop_assert!(!adj[i][i]);
            for j in 0..h.n_nodes() {
                prop_assert_eq!(adj[i][j], adj[j][i]);
            }
        }
        for set in system.minimal_feasible_sets(CAP).unwrap() {
            for i in 0..h.n_nodes() {
                for j in i + 1..h.n_nodes() {
                    if adj[i][j] {
                        let (a, b) = (h.nodes()[i], h.nodes()[j]);
                        prop_assert!(set.contains(&a) || set.contains(&b));
                    }
                }
            }
        }
    }

    #[test]
    fn dependency_components_match_articulation_parts((g, k, costs) in kpath_instance(3)) {
        let system = SetSystem::k_path(g.clone(), k).unwrap();
        let pruned = cheapest_kplus1_subgraph(&g, &costs, k).unwrap();
        let h = build_dependency(&Subsystem::new(&system, &pruned.edges).unwrap());
        let decomposition = articulation_decomposition(&g, &pruned.edges).unwrap();
        prop_assert_eq!(h.components().len(), decomposition.n_parts());
        prop_assert_eq!(h.components().len() == 1, decomposition.points.len() == 2);
        let mut parts = decomposition.parts.clone();
        parts.sort();
        let mut components = h.components().to_vec();
        components.sort();
        prop_assert_eq!(parts, components);
    }

    #[test]
    fn path_neighbourhoods_are_intervals((g, k, costs) in kpath_instance(3)) {
        let system = SetSystem::k_path(g.clone(), k).unwrap();
        let pruned = cheapest_kplus1_subgraph(&g, &costs, k).unwrap();
        let h = build_dependency(&Subsystem::new(&system, &pruned.edges).unwrap());
        for path in decompose_paths(&g, &pruned.edges).unwrap() {
            for &v in h.nodes().iter().filter(|v| !path.contains(v)) {
                let hits: Vec<usize> = (0..path.len()).filter(|&r| h.is_adjacent(v, path[r])).collect();
                if let (Some(first), Some(last)) = (hits.first(), hits.last()) {
                    prop_assert_eq!(hits.len(), last - first + 1);
                }
            }
        }
    }

    #[test]
    fn eigenvalue_within_degree_bounds(n in 2..=9usize, bits in proptest::collection::vec(any::<bool>(), 36)) {
        let g = gnp(n, &bits);
        prop_assume!(g.n_edges() > 0);
        let adj: Vec<Vec<bool>> = (0..n).map(|u| (0..n).map(|v| g.has_edge(u, v)).collect()).collect();
        let nodes: Vec<usize> = (0..n).collect();
        let h = frugal_core::dependency::DependencyGraph::from_adjacency(nodes, adj.clone());
        let spectral = lift(&h).unwrap();
        prop_assert!(spectral.residual <= 1e-9 * spectral.alpha.max(1.0));
        prop_assert!(spectral.weights.iter().all(|&w| w > 0.0 && w <= 1.0 + 1e-12));
        for (component, &alpha) in spectral.components.iter().zip(&spectral.component_alphas) {
            let degrees: Vec<usize> = component
                .iter()
                .map(|&u| component.iter().filter(|&&v| g.has_edge(u, v)).count())
                .collect();
            let avg = degrees.iter().sum::<usize>() as f64 / degrees.len() as f64;
            let max = *degrees.iter().max().unwrap() as f64;
            prop_assert!(avg - 1e-9 <= alpha && alpha <= max + 1e-9);
            let top = spectral.weights.iter().zip(&spectral.nodes)
                .filter(|(_, v)| component.contains(v))
                .map(|(w, _)| *w)
                .fold(0.0, f64::max);
            prop_assert!((top - 1.0).abs() < 1e-12);
        }
        let matrix: DMatrix<f64> = DMatrix::from_fn(n, n, |i, j| if adj[i][j] { 1.0 } else { 0.0 });
        let largest: f64 = SymmetricEigen::new(matrix).eigenvalues.max();
        prop_assert!((spectral.alpha - largest).abs() < 1e-8);
    }

    #[test]
    fn lozenge_matches_eigenvalue(r in 1..=4usize, sizes in proptest::collection::vec(1..=6usize, 5)) {
        let sizes = &sizes[..r + 1];
        let (beta, x) = solve_lozenge(sizes, r).unwrap();
        let (alpha, _) = principal_eigen(&complete_multipartite(sizes)).unwrap();
        prop_assert!((beta * r as f64 - alpha).abs() <= 1e-8);
        prop_assert!(x.iter().all(|&v| v > 0.0));
    }
}

#[test]
fn layered_network_has_requested_width() {
    for width in 2..=4 {
        for layers in 1..=3 {
            let g = layered(layers, width, &[false]);
            assert_eq!(
                frugal_core::flows::max_flow_value(&g, &g.full_mask()),
                width
            );
        }
    }
}

#[test]
fn star_dependency_is_a_star() {
    let g = UGraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
    let system = SetSystem::vertex_cover(g).unwrap();
    let h = build_dependency(&Subsystem::whole(&system).unwrap());
    assert_eq!(h.n_edges(), 3);
    assert_eq!(h.neighbors(0), vec![1, 2, 3]);
}
