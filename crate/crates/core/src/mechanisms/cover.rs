use std::collections::VecDeque;

use crate::dependency::build_dependency;
use crate::error::{Error, Result};
use crate::graph::{UGraph, VertexId};
use crate::mechanisms::{
    check_bids, run_pruning_lifting, Approx2CoverSelector, MechanismOutcome, NoPruning, Threshold,
};
use crate::spectral::lift;
use crate::system::{SetSystem, Subsystem};
use crate::EPS;

/// Largest graph accepted by the exact cover solver.
pub const MAX_EXACT_COVER_VERTICES: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverMode {
    /// Minimum-weight cover by branch and bound.
    Exact,
    /// Rounded covering relaxation followed by local-optimality repair.
    Approx2,
}

struct Search<'a> {
    g: &'a UGraph,
    costs: &'a [f64],
    order: Vec<VertexId>,
    state: Vec<Option<bool>>,
    best: f64,
}

impl Search<'_> {
    /// Local-ratio bound over edges with both endpoints undecided.
    fn lower_bound(&self) -> f64 {
        let mut residual: Vec<f64> = self.costs.to_vec();
        let mut bound = 0.0;
        for &(u, v) in self.g.edges() {
            if self.state[u].is_none() && self.state[v].is_none() {
                let eps = residual[u].min(residual[v]);
                bound += eps;
                residual[u] -= eps;
                residual[v] -= eps;
            }
        }
        bound
    }

    fn run(&mut self, depth: usize, cost: f64) {
        if cost + self.lower_bound() >= self.best {
            return;
        }
        let Some(pos) = (depth..self.order.len()).find(|&i| self.state[self.order[i]].is_none())
        else {
            self.best = self.best.min(cost);
            return;
        };
        let v = self.order[pos];
        let g = self.g;
        if g.neighbors(v).iter().all(|&u| self.state[u] != Some(false)) {
            self.state[v] = Some(false);
            let forced: Vec<VertexId> = g
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&u| self.state[u].is_none())
                .collect();
            let extra: f64 = forced.iter().map(|&u| self.costs[u]).sum();
            forced.iter().for_each(|&u| self.state[u] = Some(true));
            self.run(pos + 1, cost + extra);
            forced.iter().for_each(|&u| self.state[u] = None);
        }
        self.state[v] = Some(true);
        self.run(pos + 1, cost + self.costs[v]);
        self.state[v] = None;
    }
}

/// Minimum total cost of a vertex cover respecting `fixed` (`Some(true)`:
/// must be in, `Some(false)`: must be out), or `None` if none exists.
pub fn min_cover_cost(g: &UGraph, costs: &[f64], fixed: &[Option<bool>]) -> Option<f64> {
    let mut state = fixed.to_vec();
    for &(u, v) in g.edges() {
        match (state[u], state[v]) {
            (Some(false), Some(false)) => return None,
            (Some(false), None) => state[v] = Some(true),
            (None, Some(false)) => state[u] = Some(true),
            _ => {}
        }
    }
    let base: f64 = (0..g.n_vertices())
        .filter(|&v| state[v] == Some(true))
        .map(|v| costs[v])
        .sum();
    let upper: f64 = base
        + (0..g.n_vertices())
            .filter(|&v| state[v].is_none())
            .map(|v| costs[v])
            .sum::<f64>();
    let mut search = Search {
        g,
        costs,
        order: (0..g.n_vertices()).rev().collect(),
        state,
        best: upper + 1.0,
    };
    search.run(0, base);
    Some(search.best)
}

/// Canonical minimum cover respecting `fixed`: vertices are forced out in
/// decreasing id order whenever the optimum survives it.
pub(crate) fn canonical_cover(
    g: &UGraph,
    costs: &[f64],
    mut fixed: Vec<Option<bool>>,
) -> Result<Vec<VertexId>> {
    if g.n_vertices() > MAX_EXACT_COVER_VERTICES {
        return Err(Error::TooLarge(format!(
            "exact vertex cover supports at most {MAX_EXACT_COVER_VERTICES} vertices, got {}",
            g.n_vertices()
        )));
    }
    let optimum = min_cover_cost(g, costs, &fixed).ok_or(Error::NoFeasibleSet)?;
    for v in (0..g.n_vertices()).rev() {
        if fixed[v].is_some() {
            continue;
        }
        fixed[v] = Some(false);
        match min_cover_cost(g, costs, &fixed) {
            Some(c) if c <= optimum + EPS => {}
            _ => fixed[v] = Some(true),
        }
    }
    Ok((0..g.n_vertices())
        .filter(|&v| fixed[v] == Some(true))
        .collect())
}

/// Minimum-weight vertex cover; among optimal covers the one avoiding the
/// highest vertex on which two optima differ.
pub fn exact_cover(g: &UGraph, costs: &[f64]) -> Result<Vec<VertexId>> {
    check_bids(g.n_vertices(), costs)?;
    canonical_cover(g, costs, vec![None; g.n_vertices()])
}

/// Optimal half-integral solution of the covering relaxation, from a
/// minimum cut of the bipartite double cover (source side minimal). Entries
/// are 0, 0.5 or 1.
pub fn half_integral_relaxation(g: &UGraph, costs: &[f64]) -> Vec<f64> {
    let n = g.n_vertices();
    let (s, t) = (2 * n, 2 * n + 1);
    let size = 2 * n + 2;
    let tol = EPS * (1.0 + costs.iter().sum::<f64>());
    let mut cap = vec![vec![0.0f64; size]; size];
    for v in 0..n {
        cap[s][v] = costs[v];
        cap[n + v][t] = costs[v];
    }
    for &(u, v) in g.edges() {
        cap[u][n + v] = f64::INFINITY;
        cap[v][n + u] = f64::INFINITY;
    }
    loop {
        let mut prev = vec![usize::MAX; size];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for w in 0..size {
                if prev[w] == usize::MAX && cap[u][w] > tol {
                    prev[w] = u;
                    queue.push_back(w);
                }
            }
        }
        if prev[t] == usize::MAX {
            let left = |v: usize| prev[v] == usize::MAX;
            let right = |v: usize| prev[n + v] != usize::MAX;
            return (0..n)
                .map(|v| 0.5 * (left(v) as u8 + right(v) as u8) as f64)
                .collect();
        }
        let mut push = f64::INFINITY;
        let mut w = t;
        while w != s {
            push = push.min(cap[prev[w]][w]);
            w = prev[w];
        }
        let mut w = t;
        while w != s {
            let p = prev[w];
            cap[p][w] -= push;
            cap[w][p] += push;
            w = p;
        }
    }
}

/// 2-approximate locally optimal cover: every vertex at 1 in
/// [`half_integral_relaxation`], plus the half vertices left after deleting,
/// in decreasing cost order (higher id first on ties), each half vertex
/// whose neighbours are all still in the cover.
pub fn rounded_cover(g: &UGraph, costs: &[f64]) -> Vec<VertexId> {
    let x = half_integral_relaxation(g, costs);
    let mut inside: Vec<bool> = x.iter().map(|&xv| xv > 0.0).collect();
    let mut half: Vec<VertexId> = (0..g.n_vertices()).filter(|&v| x[v] == 0.5).collect();
    half.sort_by(|&a, &b| costs[b].total_cmp(&costs[a]).then(b.cmp(&a)));
    for v in half {
        if g.neighbors(v).iter().all(|&u| inside[u]) {
            inside[v] = false;
        }
    }
    (0..g.n_vertices()).filter(|&v| inside[v]).collect()
}

/// Whether every member `v` of `cover` satisfies
/// `b'(v) <= sum of b'(u) over neighbours u outside the cover`.
pub fn is_locally_optimal(g: &UGraph, scaled: &[f64], cover: &[VertexId]) -> bool {
    let mut inside = vec![false; g.n_vertices()];
    cover.iter().for_each(|&v| inside[v] = true);
    cover
        .iter()
        .all(|&v| scaled[v] <= outside_sum(g, scaled, &inside, v) + EPS)
}

fn outside_sum(g: &UGraph, scaled: &[f64], inside: &[bool], v: VertexId) -> f64 {
    g.neighbors(v)
        .iter()
        .filter(|&&u| !inside[u])
        .map(|&u| scaled[u])
        .sum()
}

/// Repeatedly replaces the lowest-id member violating local optimality by
/// its neighbours outside the cover. Each swap lowers the scaled cost, so
/// the loop ends; the result is a locally optimal cover.
pub fn local_optimality_repair(g: &UGraph, scaled: &[f64], cover: &[VertexId]) -> Vec<VertexId> {
    let mut inside = vec![false; g.n_vertices()];
    cover.iter().for_each(|&v| inside[v] = true);
    while let Some(v) = (0..g.n_vertices())
        .find(|&v| inside[v] && scaled[v] > outside_sum(g, scaled, &inside, v) + EPS)
    {
        inside[v] = false;
        for &u in g.neighbors(v) {
            inside[u] = true;
        }
    }
    (0..g.n_vertices()).filter(|&v| inside[v]).collect()
}

/// The vertex-cover mechanism: no pruning, lifting by the Perron vectors of
/// the graph itself, then an exact or 2-approximate cover under lifted bids.
pub fn vertex_cover_mechanism(
    g: &UGraph,
    bids: &[f64],
    mode: CoverMode,
) -> Result<MechanismOutcome> {
    check_bids(g.n_vertices(), bids)?;
    if g.n_edges() == 0 {
        return Err(Error::InvalidInstance(
            "vertex-cover instance needs at least one edge".into(),
        ));
    }
    let system = SetSystem::vertex_cover(g.clone())?;
    match mode {
        CoverMode::Approx2 => {
            let mut out = run_pruning_lifting(&system, bids, &NoPruning, &Approx2CoverSelector)?;
            out.mechanism = "vertex-cover-approx";
            Ok(out)
        }
        CoverMode::Exact => {
            if g.n_vertices() > MAX_EXACT_COVER_VERTICES {
                return Err(Error::TooLarge(format!(
                    "exact vertex cover supports at most {MAX_EXACT_COVER_VERTICES} vertices, got {}",
                    g.n_vertices()
                )));
            }
            let view = Subsystem::whole(&system)?;
            let spectral = lift(&build_dependency(&view))?;
            let scaled = spectral.scaled_bids(bids);
            let winners = exact_cover(g, &scaled)?;
            let mut fixed = vec![None; g.n_vertices()];
            let thresholds = winners
                .iter()
                .map(|&v| {
                    fixed[v] = Some(false);
                    let out =
                        min_cover_cost(g, &scaled, &fixed).ok_or(Error::Monopoly { agent: v })?;
                    fixed[v] = Some(true);
                    let with = min_cover_cost(g, &scaled, &fixed).ok_or(Error::NoFeasibleSet)?;
                    fixed[v] = None;
                    let w = spectral.weight(v).expect("every vertex survives");
                    Ok((
                        Threshold::Unbounded,
                        Threshold::Finite(w * (out - (with - scaled[v]))),
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            MechanismOutcome::assemble(
                "vertex-cover",
                g.n_vertices(),
                (0..g.n_vertices()).collect(),
                Some(spectral),
                winners,
                thresholds,
            )
        }
    }
}
