use crate::error::{Error, Result};
use crate::flows::{
    has_flow, max_flow_value, min_cost_flow_within, ArticulationDecomposition, IntegralFlow,
};
use crate::graph::{DiGraph, EdgeId, VertexId};
use crate::EPS;

/// Topological order of the vertices touched by `edges`, or a cycle error.
fn topological_order(g: &DiGraph, edges: &[EdgeId]) -> Result<Vec<VertexId>> {
    let n = g.n_vertices();
    let mut indegree = vec![0usize; n];
    let mut out = vec![Vec::new(); n];
    let mut touched = vec![false; n];
    for &e in edges {
        let (u, v) = g.edge(e);
        indegree[v] += 1;
        out[u].push(v);
        touched[u] = true;
        touched[v] = true;
    }
    let mut stack: Vec<VertexId> = (0..n)
        .rev()
        .filter(|&v| touched[v] && indegree[v] == 0)
        .collect();
    let mut order = Vec::new();
    while let Some(u) = stack.pop() {
        order.push(u);
        for &v in out[u].iter().rev() {
            indegree[v] -= 1;
            if indegree[v] == 0 {
                stack.push(v);
            }
        }
    }
    if order.len() != touched.iter().filter(|&&t| t).count() {
        return Err(Error::Cycle);
    }
    Ok(order)
}

/// Maximum total cost of an s-t path inside the acyclic subgraph `edges`.
pub fn longest_path_dag(g: &DiGraph, edges: &[EdgeId], costs: &[f64]) -> Result<f64> {
    let order = topological_order(g, edges)?;
    let mut best = vec![f64::NEG_INFINITY; g.n_vertices()];
    best[g.source()] = 0.0;
    let mut out = vec![Vec::new(); g.n_vertices()];
    for &e in edges {
        out[g.edge(e).0].push(e);
    }
    for u in order {
        if best[u] == f64::NEG_INFINITY {
            continue;
        }
        for &e in &out[u] {
            let v = g.edge(e).1;
            best[v] = best[v].max(best[u] + costs[e]);
        }
    }
    let value = best[g.sink()];
    if value == f64::NEG_INFINITY {
        return Err(Error::InvalidFlowStructure(
            "sink unreachable from source".into(),
        ));
    }
    Ok(value)
}

/// Vertices reachable from `from` along `mask`, optionally skipping one vertex.
fn reachable(
    g: &DiGraph,
    out: &[Vec<EdgeId>],
    from: VertexId,
    skip: Option<VertexId>,
) -> Vec<bool> {
    let mut seen = vec![false; g.n_vertices()];
    if Some(from) == skip {
        return seen;
    }
    seen[from] = true;
    let mut stack = vec![from];
    while let Some(u) = stack.pop() {
        for &e in &out[u] {
            let v = g.edge(e).1;
            if !seen[v] && Some(v) != skip {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// Checks that `edges` is an acyclic union of edge-disjoint s-t paths with
/// no surplus edges and returns the number of paths.
pub fn validate_flow_subgraph(g: &DiGraph, edges: &[EdgeId]) -> Result<usize> {
    let n = g.n_vertices();
    let (s, t) = (g.source(), g.sink());
    let mut balance = vec![0i64; n];
    for &e in edges {
        let (u, v) = g.edge(e);
        balance[u] += 1;
        balance[v] -= 1;
    }
    let size = balance[s];
    if size <= 0 || balance[t] != -size {
        return Err(Error::InvalidFlowStructure(format!(
            "source excess {} and sink excess {} do not describe a positive flow",
            balance[s], balance[t]
        )));
    }
    if let Some(v) = (0..n).find(|&v| v != s && v != t && balance[v] != 0) {
        return Err(Error::InvalidFlowStructure(format!(
            "flow conservation fails at vertex {v}"
        )));
    }
    topological_order(g, edges)?;
    let mask = g.mask_of(edges);
    if max_flow_value(g, &mask) != size as usize {
        return Err(Error::InvalidFlowStructure(
            "edge set does not route its own excess".into(),
        ));
    }
    Ok(size as usize)
}

/// Splits an acyclic flow subgraph at the vertices lying on every s-t path.
pub fn articulation_decomposition(
    g: &DiGraph,
    edges: &[EdgeId],
) -> Result<ArticulationDecomposition> {
    validate_flow_subgraph(g, edges)?;
    let (s, t) = (g.source(), g.sink());
    let mut out = vec![Vec::new(); g.n_vertices()];
    let mut touched = vec![false; g.n_vertices()];
    for &e in edges {
        let (u, v) = g.edge(e);
        out[u].push(e);
        touched[u] = true;
        touched[v] = true;
    }
    let order = topological_order(g, edges)?;
    let mut points = vec![s];
    for &v in &order {
        if v != s && v != t && touched[v] && !reachable(g, &out, s, Some(v))[t] {
            points.push(v);
        }
    }
    points.push(t);

    // Every edge lies on an s-t path, so its part is the last articulation
    // point that reaches its tail.
    let reach: Vec<Vec<bool>> = points
        .iter()
        .map(|&p| reachable(g, &out, p, None))
        .collect();
    let mut parts = vec![Vec::new(); points.len() - 1];
    for &e in edges {
        let tail = g.edge(e).0;
        let j = (0..points.len() - 1)
            .rev()
            .find(|&j| reach[j][tail])
            .ok_or_else(|| {
                Error::InvalidFlowStructure(format!("edge {e} unreachable from source"))
            })?;
        parts[j].push(e);
    }
    for part in &mut parts {
        part.sort_unstable();
    }
    Ok(ArticulationDecomposition { points, parts })
}

/// If the subgraph of shortest-path edges under `weights` carries `k + 1`
/// edge-disjoint s-t paths, returns such a flow (each path then has length
/// `dist(s, t)`).
pub fn verify_shortest_path_flow(g: &DiGraph, weights: &[f64], k: usize) -> Option<IntegralFlow> {
    if weights.len() != g.n_edges() || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return None;
    }
    let n = g.n_vertices();
    let (out, _) = g.incidence();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[g.source()] = 0.0;
    loop {
        let u = (0..n)
            .filter(|&v| !done[v] && dist[v].is_finite())
            .min_by(|&a, &b| dist[a].total_cmp(&dist[b]));
        let Some(u) = u else { break };
        done[u] = true;
        for &e in &out[u] {
            let v = g.edge(e).1;
            dist[v] = dist[v].min(dist[u] + weights[e]);
        }
    }
    let tight: Vec<bool> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| dist[u].is_finite() && (dist[u] + weights[e] - dist[v]).abs() <= EPS)
        .collect();
    if !has_flow(g, &tight, k + 1) {
        return None;
    }
    min_cost_flow_within(g, weights, &tight, k + 1).ok()
}

/// Splits an acyclic flow subgraph into its s-t paths, following the
/// lowest-id unused outgoing edge at each vertex.
pub fn decompose_paths(g: &DiGraph, edges: &[EdgeId]) -> Result<Vec<Vec<EdgeId>>> {
    let size = validate_flow_subgraph(g, edges)?;
    let mut out = vec![Vec::new(); g.n_vertices()];
    for &e in edges {
        out[g.edge(e).0].push(e);
    }
    for list in &mut out {
        list.sort_unstable();
        list.reverse();
    }
    let mut paths = Vec::with_capacity(size);
    for _ in 0..size {
        let mut path = Vec::new();
        let mut u = g.source();
        while u != g.sink() {
            let e = out[u]
                .pop()
                .ok_or_else(|| Error::InvalidFlowStructure(format!("dead end at vertex {u}")))?;
            path.push(e);
            u = g.edge(e).1;
        }
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::tests::{diamond, para, two_diamonds};

    #[test]
    fn longest_paths() {
        let g = diamond();
        assert_eq!(
            longest_path_dag(&g, &[0, 1, 2, 3], &[1.0, 2.0, 3.0, 4.0]).unwrap(),
            6.0
        );
        let g = para(4);
        let mut c = vec![0.0; 5];
        c[0] = 1.0;
        assert_eq!(longest_path_dag(&g, &[0, 1, 2, 3, 4], &c).unwrap(), 1.0);
        let g = DiGraph::new(3, vec![(0, 1), (1, 2)], 0, 2).unwrap();
        assert_eq!(longest_path_dag(&g, &[0, 1], &[2.0, 3.0]).unwrap(), 5.0);
    }

    #[test]
    fn cycle_detected() {
        let g = DiGraph::new(3, vec![(0, 1), (1, 0), (1, 2)], 0, 2).unwrap();
        assert_eq!(
            longest_path_dag(&g, &[0, 1, 2], &[1.0, 1.0, 1.0]),
            Err(Error::Cycle)
        );
    }

    #[test]
    fn decompositions() {
        let d = articulation_decomposition(&diamond(), &[0, 1, 2, 3]).unwrap();
        assert_eq!(d.points, vec![0, 3]);
        assert_eq!(d.parts, vec![vec![0, 1, 2, 3]]);

        let g = two_diamonds();
        let all: Vec<usize> = (0..8).collect();
        let d = articulation_decomposition(&g, &all).unwrap();
        assert_eq!(d.points.len(), 3);
        assert_eq!(d.points[1], 3);
        assert_eq!(d.parts, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);

        // s->u->t with a parallel s->t edge
        let g = DiGraph::new(3, vec![(0, 1), (1, 2), (0, 2)], 0, 2).unwrap();
        let d = articulation_decomposition(&g, &[0, 1, 2]).unwrap();
        assert_eq!(d.points, vec![0, 2]);
        assert_eq!(d.parts.len(), 1);
    }

    #[test]
    fn rejects_non_flow() {
        let g = diamond();
        assert!(matches!(
            articulation_decomposition(&g, &[0, 1, 2]),
            Err(Error::InvalidFlowStructure(_))
        ));
    }

    #[test]
    fn shortest_path_verifier() {
        let g = diamond();
        let f = verify_shortest_path_flow(&g, &[3.0; 4], 1).unwrap();
        assert_eq!(f.edges, vec![0, 1, 2, 3]);
        assert!(verify_shortest_path_flow(&g, &[1.0, 2.0, 3.0, 4.0], 1).is_none());
        let f = verify_shortest_path_flow(&g, &[1.0, 2.0, 5.0, 4.0], 1).unwrap();
        assert_eq!(f.cost, 12.0);
    }

    #[test]
    fn path_split() {
        let paths = decompose_paths(&two_diamonds(), &(0..8).collect::<Vec<_>>()).unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(paths.iter().map(Vec::len).sum::<usize>(), 8);
    }
}
