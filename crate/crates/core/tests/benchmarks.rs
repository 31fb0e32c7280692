mod common;

use common::{cover_instance, gnp, kpath_instance};
use frugal_core::benchmarks::{
    alpha_kplus1, compute_benchmarks, compute_nu, mu_lower_flow, nu_lower_kpath, rho_v,
    witness_violation,
};
use frugal_core::flows::{flow_cost_curve, verify_shortest_path_flow};
use frugal_core::mechanisms::kpath_mechanism;
use frugal_core::SetSystem;
use proptest::prelude::*;

const CAP: usize = 100_000;
const TOL: f64 = 1e-7;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kpath_benchmarks_and_bounds((g, k, costs) in kpath_instance(3)) {
        let system = SetSystem::k_path(g.clone(), k).unwrap();
        let bench = compute_benchmarks(&system, &costs, CAP).unwrap();
        prop_assert!(bench.nu <= bench.mu + TOL);
        prop_assert!(bench.nu >= nu_lower_kpath(&g, &costs, k, CAP).unwrap() - TOL);
        prop_assert!(bench.mu >= mu_lower_flow(&g, &costs, k).unwrap() - TOL);
        prop_assert!(flow_cost_curve(&g, &costs).unwrap().is_convex(1e-9));

        let payment = kpath_mechanism(&g, &costs, k).unwrap().total;
        let (alpha, _) = alpha_kplus1(&g, k, CAP).unwrap();
        let k = k as f64;
        prop_assert!(payment <= alpha * (k + 1.0) / k * bench.nu + TOL);
        prop_assert!(payment <= alpha / k * bench.mu + TOL);

        let nu_violation = witness_violation(&system, &costs, &bench.reference, &bench.nu_witness, &bench.tight_sets, CAP).unwrap();
        let mu_violation = witness_violation(&system, &costs, &bench.reference, &bench.mu_witness, &[], CAP).unwrap();
        prop_assert!(nu_violation <= TOL && mu_violation <= TOL);
        let covered = bench.reference.iter().all(|e| bench.tight_sets.iter().any(|t| !t.contains(e)));
        prop_assert!(covered);
    }

    #[test]
    fn nu_witness_carries_equal_shortest_paths((g, k, costs) in kpath_instance(3)) {
        let system = SetSystem::k_path(g.clone(), k).unwrap();
        let (nu, _) = compute_nu(&system, &costs, CAP).unwrap();
        let flow = verify_shortest_path_flow(&g, &nu.witness, k);
        prop_assert!(flow.is_some());
        let flow = flow.unwrap();
        prop_assert_eq!(flow.size, k + 1);
        prop_assert!((flow.cost - (k + 1) as f64 * nu.value / k as f64).abs() <= 1e-6);
    }

    #[test]
    fn cover_benchmarks_are_ordered((g, costs) in cover_instance(7)) {
        let system = SetSystem::vertex_cover(g.clone()).unwrap();
        let bench = compute_benchmarks(&system, &costs, CAP).unwrap();
        prop_assert!(bench.nu <= bench.mu + TOL);
        let outside: f64 = (0..costs.len())
            .filter(|&u| !bench.reference.contains(&u) && !g.neighbors(u).is_empty())
            .map(|u| costs[u])
            .sum();
        prop_assert!(bench.nu >= outside - TOL);
    }

    #[test]
    fn scaled_single_vertex_nu_within_clique_bound(n in 2..=7usize, bits in proptest::collection::vec(any::<bool>(), 21)) {
        let g = gnp(n, &bits);
        prop_assume!(g.n_edges() > 0);
        let system = SetSystem::vertex_cover(g.clone()).unwrap();
        for v in 0..n {
            let rho = rho_v(&g, v).unwrap() as f64;
            for x in [0.5, 1.0, 2.0] {
                let mut costs = vec![0.0; n];
                costs[v] = x;
                let (nu, _) = compute_nu(&system, &costs, CAP).unwrap();
                prop_assert!(nu.value <= x * (rho - 1.0) + TOL, "v {v} x {x} nu {} rho {rho}", nu.value);
            }
        }
    }
}
