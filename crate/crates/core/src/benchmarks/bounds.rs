use crate::dependency::build_dependency;
use crate::error::{Error, Result};
use crate::flows::{check_costs, delta_kplus1, enumerate_flows, flow_cost_curve};
use crate::graph::{DiGraph, EdgeId, UGraph, VertexId};
use crate::spectral::lift;
use crate::system::{SetSystem, Subsystem};

/// Largest graph accepted by [`rho_v`].
pub const MAX_CLIQUE_VERTICES: usize = 30;

/// `k * delta_{k+1}(G, c)`, a lower bound on `nu(c)` for k-path systems.
pub fn nu_lower_kpath(g: &DiGraph, costs: &[f64], k: usize, cap: usize) -> Result<f64> {
    Ok(k as f64 * delta_kplus1(g, costs, k, cap)?)
}

/// `k * (C(k+1) - C(k))`, a lower bound on `mu(c)` for k-path systems.
pub fn mu_lower_flow(g: &DiGraph, costs: &[f64], k: usize) -> Result<f64> {
    check_costs(g, costs)?;
    let curve = flow_cost_curve(g, costs)?;
    match (curve.at(k), curve.at(k + 1)) {
        (Some(a), Some(b)) => Ok(k as f64 * (b - a)),
        _ => Err(Error::InsufficientFlow {
            required: k + 1,
            available: curve.max_flow(),
        }),
    }
}

/// `alpha_{k+1}`: the largest lift eigenvalue over all minimal unions of
/// `k + 1` edge-disjoint s-t paths, with the first union attaining it.
pub fn alpha_kplus1(g: &DiGraph, k: usize, cap: usize) -> Result<(f64, Vec<EdgeId>)> {
    let system = SetSystem::k_path(g.clone(), k)?;
    let flows = enumerate_flows(g, k + 1, cap)?;
    let mut best: Option<(f64, Vec<EdgeId>)> = None;
    for flow in flows {
        let view = Subsystem::new(&system, &flow)?;
        let alpha = lift(&build_dependency(&view))?.alpha;
        if best.as_ref().is_none_or(|(a, _)| alpha > *a + 1e-9) {
            best = Some((alpha, flow));
        }
    }
    best.ok_or(Error::InsufficientFlow {
        required: k + 1,
        available: 0,
    })
}

/// Size of the smallest maximal clique containing `v`.
pub fn rho_v(g: &UGraph, v: VertexId) -> Result<usize> {
    if g.n_vertices() > MAX_CLIQUE_VERTICES {
        return Err(Error::TooLarge(format!(
            "clique enumeration supports at most {MAX_CLIQUE_VERTICES} vertices, got {}",
            g.n_vertices()
        )));
    }
    if v >= g.n_vertices() {
        return Err(Error::AgentOutOfRange {
            agent: v,
            n_agents: g.n_vertices(),
        });
    }
    fn expand(g: &UGraph, size: usize, p: Vec<VertexId>, x: Vec<VertexId>, best: &mut usize) {
        if p.is_empty() && x.is_empty() {
            *best = (*best).min(size);
            return;
        }
        let mut p = p;
        let mut x = x;
        while let Some(u) = p.pop() {
            let np = p.iter().copied().filter(|&w| g.has_edge(u, w)).collect();
            let nx = x.iter().copied().filter(|&w| g.has_edge(u, w)).collect();
            expand(g, size + 1, np, nx, best);
            x.push(u);
        }
    }
    let mut best = usize::MAX;
    expand(g, 1, g.neighbors(v).to_vec(), Vec::new(), &mut best);
    Ok(best)
}
