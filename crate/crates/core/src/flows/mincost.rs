use crate::error::{Error, Result};
use crate::flows::maxflow::{Arc, Residual};
use crate::flows::{FlowCostCurve, IntegralFlow};
use crate::graph::{DiGraph, EdgeId};
use crate::EPS;

pub(crate) fn check_costs(g: &DiGraph, costs: &[f64]) -> Result<()> {
    if costs.len() != g.n_edges() {
        return Err(Error::InvalidBids(format!(
            "{} costs for {} edges",
            costs.len(),
            g.n_edges()
        )));
    }
    if let Some((e, c)) = costs
        .iter()
        .enumerate()
        .find(|(_, c)| !c.is_finite() || **c < 0.0)
    {
        return Err(Error::InvalidBids(format!(
            "edge {e} has cost {c}; costs must be finite and >= 0"
        )));
    }
    Ok(())
}

/// Successive shortest augmenting paths with vertex potentials (Dijkstra on
/// reduced costs). Returns the cost after each unit, `C(0..=value)`, together
/// with the final flow.
fn successive_shortest_paths(
    g: &DiGraph,
    costs: &[f64],
    allowed: &[bool],
    limit: usize,
) -> (Vec<f64>, Vec<bool>) {
    let n = g.n_vertices();
    let (s, t) = (g.source(), g.sink());
    let mut residual = Residual::new(g, allowed);
    let mut potential = vec![0.0_f64; n];
    let mut curve = vec![0.0];

    while curve.len() <= limit {
        // Dense Dijkstra: ties resolved by lowest vertex id, so runs are reproducible.
        let mut dist = vec![f64::INFINITY; n];
        let mut pred: Vec<Option<(Arc, usize)>> = vec![None; n];
        let mut done = vec![false; n];
        dist[s] = 0.0;
        loop {
            let mut u = usize::MAX;
            for v in 0..n {
                if !done[v] && dist[v].is_finite() && (u == usize::MAX || dist[v] < dist[u]) {
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            for (arc, v) in residual.arcs(u) {
                if done[v] {
                    continue;
                }
                let cost = if arc.forward {
                    costs[arc.edge]
                } else {
                    -costs[arc.edge]
                };
                // Reduced costs are non-negative up to rounding.
                let reduced = (cost + potential[u] - potential[v]).max(0.0);
                let candidate = dist[u] + reduced;
                if candidate < dist[v] {
                    dist[v] = candidate;
                    pred[v] = Some((arc, u));
                }
            }
        }
        if !dist[t].is_finite() {
            break;
        }
        let reach = dist
            .iter()
            .copied()
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max);
        for v in 0..n {
            potential[v] += if dist[v].is_finite() { dist[v] } else { reach };
        }
        let mut path = Vec::new();
        let mut v = t;
        while v != s {
            let (arc, u) = pred[v].expect("reached vertex has a predecessor");
            path.push(arc);
            v = u;
        }
        residual.apply(&path);
        let cost: f64 = (0..g.n_edges())
            .filter(|&e| residual.flow[e])
            .map(|e| costs[e])
            .sum();
        curve.push(cost);
    }
    (curve, residual.flow)
}

/// Minimum cost of an integral flow of size exactly `k` within `allowed`, or
/// `None` when the allowed edges carry less than `k` units.
pub fn flow_cost_within(g: &DiGraph, costs: &[f64], allowed: &[bool], k: usize) -> Option<f64> {
    let (curve, _) = successive_shortest_paths(g, costs, allowed, k);
    curve.get(k).copied()
}

/// Minimum-cost integral flow of size `k` using only `allowed` edges.
///
/// Among all optimal flows the result is the one that avoids the
/// highest-numbered edge on which two optima differ: edges are tentatively
/// dropped in decreasing id order and stay dropped if the optimum cost is
/// still reachable. The order depends on edge ids only, never on costs, so a
/// single agent changing its bid cannot reshuffle ties among flows that all
/// contain (or all avoid) it. The returned edge set is minimal, hence free of
/// surplus edges and directed cycles.
pub fn min_cost_flow_within(
    g: &DiGraph,
    costs: &[f64],
    allowed: &[bool],
    k: usize,
) -> Result<IntegralFlow> {
    check_costs(g, costs)?;
    let optimum = match flow_cost_within(g, costs, allowed, k) {
        Some(c) => c,
        None => {
            return Err(Error::InsufficientFlow {
                required: k,
                available: super::max_flow_value(g, allowed),
            })
        }
    };
    let mut keep = allowed.to_vec();
    for e in (0..g.n_edges()).rev() {
        if !keep[e] {
            continue;
        }
        keep[e] = false;
        match flow_cost_within(g, costs, &keep, k) {
            Some(c) if c <= optimum + EPS => {}
            _ => keep[e] = true,
        }
    }
    let edges: Vec<EdgeId> = (0..g.n_edges()).filter(|&e| keep[e]).collect();
    let cost = edges.iter().map(|&e| costs[e]).sum();
    Ok(IntegralFlow {
        edges,
        size: k,
        cost,
    })
}

/// Minimum-cost integral flow of size `k` in the whole graph.
pub fn min_cost_flow(g: &DiGraph, costs: &[f64], k: usize) -> Result<IntegralFlow> {
    min_cost_flow_within(g, costs, &g.full_mask(), k)
}

/// The cheapest union of `k + 1` edge-disjoint s-t paths under `bids`: the
/// pruning stage of the k-path mechanism. Fails exactly when the k-path
/// system has a monopoly.
pub fn cheapest_kplus1_subgraph(g: &DiGraph, bids: &[f64], k: usize) -> Result<IntegralFlow> {
    min_cost_flow(g, bids, k + 1)
}

/// `C(i)` for every flow size `i` from 0 to the maximum flow.
pub fn flow_cost_curve(g: &DiGraph, costs: &[f64]) -> Result<FlowCostCurve> {
    check_costs(g, costs)?;
    let (values, _) = successive_shortest_paths(g, costs, &g.full_mask(), usize::MAX);
    Ok(FlowCostCurve { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::tests::{diamond, para, parallel};

    #[test]
    fn forced_two_parallel() {
        let g = parallel(2);
        let f = min_cost_flow(&g, &[1.0, 2.0], 2).unwrap();
        assert_eq!(f.edges, vec![0, 1]);
        assert_eq!(f.cost, 3.0);
    }

    #[test]
    fn diamond_flows() {
        let g = diamond();
        let c = [1.0, 2.0, 3.0, 4.0];
        let f1 = min_cost_flow(&g, &c, 1).unwrap();
        assert_eq!(f1.edges, vec![0, 2]);
        assert_eq!(f1.cost, 4.0);
        let f2 = min_cost_flow(&g, &c, 2).unwrap();
        assert_eq!(f2.edges, vec![0, 1, 2, 3]);
        assert_eq!(f2.cost, 10.0);
        assert!(matches!(
            min_cost_flow(&g, &c, 3),
            Err(Error::InsufficientFlow {
                required: 3,
                available: 2
            })
        ));
    }

    #[test]
    fn pruning_examples() {
        let g = diamond();
        assert_eq!(
            cheapest_kplus1_subgraph(&g, &[7.0, 0.5, 2.0, 9.0], 1)
                .unwrap()
                .edges,
            vec![0, 1, 2, 3]
        );

        let g = para(5);
        let mut bids = vec![0.0; 6];
        bids[0] = 1.0;
        let f = cheapest_kplus1_subgraph(&g, &bids, 1).unwrap();
        assert_eq!(f.edges.len(), 6);
        assert_eq!(f.cost, 1.0);

        let g = parallel(3);
        let f = cheapest_kplus1_subgraph(&g, &[5.0, 1.0, 3.0], 1).unwrap();
        assert_eq!(f.edges, vec![1, 2]);
        assert_eq!(f.cost, 4.0);
    }

    #[test]
    fn ties_prefer_low_ids() {
        let g = parallel(4);
        let f = min_cost_flow(&g, &[1.0, 1.0, 1.0, 1.0], 2).unwrap();
        assert_eq!(f.edges, vec![0, 1]);
    }

    #[test]
    fn zero_cost_cycle_is_dropped() {
        // s->a->t plus a zero-cost cycle a->b->a
        let g = DiGraph::new(4, vec![(0, 1), (1, 3), (1, 2), (2, 1)], 0, 3).unwrap();
        let f = min_cost_flow(&g, &[1.0, 1.0, 0.0, 0.0], 1).unwrap();
        assert_eq!(f.edges, vec![0, 1]);
    }

    #[test]
    fn curves() {
        assert_eq!(
            flow_cost_curve(&parallel(3), &[1.0, 2.0, 3.0])
                .unwrap()
                .values,
            vec![0.0, 1.0, 3.0, 6.0]
        );
        assert_eq!(
            flow_cost_curve(&diamond(), &[1.0, 2.0, 3.0, 4.0])
                .unwrap()
                .values,
            vec![0.0, 4.0, 10.0]
        );
    }

    #[test]
    fn rejects_negative_costs() {
        assert!(matches!(
            min_cost_flow(&parallel(2), &[-1.0, 0.0], 1),
            Err(Error::InvalidBids(_))
        ));
    }
}
