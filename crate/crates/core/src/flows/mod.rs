//! Unit-capacity s-t network algorithms: max-flow, canonical min-cost flow,
//! the flow cost curve `C(x)`, longest paths in flow subgraphs, articulation
//! structure, the minimum-longest-path oracle and the shortest-path-flow
//! verifier.

mod maxflow;
mod mincost;
mod structure;

pub use maxflow::{has_flow, max_flow_value};
pub use mincost::{
    cheapest_kplus1_subgraph, flow_cost_curve, flow_cost_within, min_cost_flow,
    min_cost_flow_within,
};
pub use structure::{
    articulation_decomposition, decompose_paths, longest_path_dag, validate_flow_subgraph,
    verify_shortest_path_flow,
};

pub(crate) use mincost::check_costs;

use crate::error::{Error, Result};
use crate::graph::{DiGraph, EdgeId, VertexId};
use std::collections::BTreeSet;

use crate::system::enumerate_minimal_over;

/// Edge set of an integral flow: the union of `size` edge-disjoint s-t paths.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralFlow {
    /// Sorted edge ids.
    pub edges: Vec<EdgeId>,
    pub size: usize,
    pub cost: f64,
}

impl IntegralFlow {
    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.binary_search(&e).is_ok()
    }
}

/// Minimum flow cost `C(i)` for `i = 0..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowCostCurve {
    pub values: Vec<f64>,
}

impl FlowCostCurve {
    /// Maximum flow value `M`.
    pub fn max_flow(&self) -> usize {
        self.values.len() - 1
    }

    pub fn at(&self, i: usize) -> Option<f64> {
        self.values.get(i).copied()
    }

    /// Marginal costs `C(i+1) - C(i)` never decrease (within `tol`).
    pub fn is_convex(&self, tol: f64) -> bool {
        self.values
            .windows(3)
            .all(|w| (w[2] - w[1]) + tol >= w[1] - w[0])
    }
}

/// Vertices lying on every s-t path of a flow subgraph, in path order, and
/// the edge sets between consecutive ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArticulationDecomposition {
    /// `s = points[0]`, ..., `points[a] = t`.
    pub points: Vec<VertexId>,
    pub parts: Vec<Vec<EdgeId>>,
}

impl ArticulationDecomposition {
    pub fn n_parts(&self) -> usize {
        self.parts.len()
    }
}

/// Every minimal union of `size` edge-disjoint s-t paths, sorted
/// lexicographically by edge ids.
pub fn enumerate_flows(g: &DiGraph, size: usize, cap: usize) -> Result<Vec<Vec<EdgeId>>> {
    enumerate_flows_within(g, &g.full_mask(), size, cap)
}

/// Simple s-t paths considered before [`enumerate_flows_within`] falls back
/// to generic subset search.
const MAX_SIMPLE_PATHS: usize = 20_000;

/// As [`enumerate_flows`], using only edges marked in `allowed`.
///
/// Every minimal union of edge-disjoint paths is a union of vertex-simple
/// paths, so combinations of simple paths are tried first.
pub fn enumerate_flows_within(
    g: &DiGraph,
    allowed: &[bool],
    size: usize,
    cap: usize,
) -> Result<Vec<Vec<EdgeId>>> {
    let universe: Vec<EdgeId> = (0..g.n_edges()).filter(|&e| allowed[e]).collect();
    let Some(paths) = simple_paths(g, allowed, MAX_SIMPLE_PATHS) else {
        return enumerate_minimal_over(g.n_edges(), &universe, |mask| has_flow(g, mask, size), cap);
    };
    if size == 0 {
        return Ok(vec![Vec::new()]);
    }
    let mut found = BTreeSet::new();
    let mut used = vec![false; g.n_edges()];
    combine_paths(g, &paths, size, size, 0, &mut used, &mut found, cap)?;
    Ok(found.into_iter().collect())
}

#[allow(clippy::too_many_arguments)]
fn combine_paths(
    g: &DiGraph,
    paths: &[Vec<EdgeId>],
    size: usize,
    remaining: usize,
    start: usize,
    used: &mut Vec<bool>,
    found: &mut BTreeSet<Vec<EdgeId>>,
    cap: usize,
) -> Result<()> {
    if remaining == 0 {
        let set: Vec<EdgeId> = (0..used.len()).filter(|&e| used[e]).collect();
        let minimal = set.iter().all(|&e| {
            used[e] = false;
            let smaller = has_flow(g, used, size);
            used[e] = true;
            !smaller
        });
        if minimal {
            found.insert(set);
            if found.len() > cap {
                return Err(Error::CapExceeded {
                    what: "feasible sets",
                    cap,
                });
            }
        }
        return Ok(());
    }
    for i in start..paths.len() {
        if paths[i].iter().any(|&e| used[e]) {
            continue;
        }
        for &e in &paths[i] {
            used[e] = true;
        }
        combine_paths(g, paths, size, remaining - 1, i + 1, used, found, cap)?;
        for &e in &paths[i] {
            used[e] = false;
        }
    }
    Ok(())
}

/// Vertex-simple s-t paths over allowed edges, or `None` past `limit`.
fn simple_paths(g: &DiGraph, allowed: &[bool], limit: usize) -> Option<Vec<Vec<EdgeId>>> {
    let mut out_edges = vec![Vec::new(); g.n_vertices()];
    for (e, &(u, _)) in g.edges().iter().enumerate() {
        if allowed[e] {
            out_edges[u].push(e);
        }
    }
    fn walk(
        g: &DiGraph,
        out_edges: &[Vec<EdgeId>],
        v: VertexId,
        visited: &mut Vec<bool>,
        path: &mut Vec<EdgeId>,
        paths: &mut Vec<Vec<EdgeId>>,
        limit: usize,
    ) -> bool {
        if v == g.sink() {
            paths.push(path.clone());
            return paths.len() <= limit;
        }
        for &e in &out_edges[v] {
            let w = g.edge(e).1;
            if visited[w] {
                continue;
            }
            visited[w] = true;
            path.push(e);
            let ok = walk(g, out_edges, w, visited, path, paths, limit);
            path.pop();
            visited[w] = false;
            if !ok {
                return false;
            }
        }
        true
    }
    let mut visited = vec![false; g.n_vertices()];
    visited[g.source()] = true;
    let mut paths = Vec::new();
    walk(
        g,
        &out_edges,
        g.source(),
        &mut visited,
        &mut Vec::new(),
        &mut paths,
        limit,
    )
    .then_some(paths)
}

/// Smallest possible longest s-t path over all unions of `k + 1`
/// edge-disjoint s-t paths, by exhaustive enumeration.
///
/// Only minimal unions are enumerated: any other union contains a minimal
/// one whose longest path is no longer, and minimal unions are acyclic, so
/// the infinite value for cyclic subgraphs never arises.
pub fn delta_kplus1(g: &DiGraph, costs: &[f64], k: usize, cap: usize) -> Result<f64> {
    check_costs(g, costs)?;
    let available = max_flow_value(g, &g.full_mask());
    if available < k + 1 {
        return Err(Error::InsufficientFlow {
            required: k + 1,
            available,
        });
    }
    let mut best = f64::INFINITY;
    for flow in enumerate_flows(g, k + 1, cap)? {
        best = best.min(longest_path_dag(g, &flow, costs)?);
    }
    Ok(best)
}
