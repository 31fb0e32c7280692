use crate::dependency::build_dependency;
use crate::error::{Error, Result};
use crate::flows::{
    articulation_decomposition, cheapest_kplus1_subgraph, decompose_paths, flow_cost_within,
    min_cost_flow_within, IntegralFlow,
};
use crate::graph::{DiGraph, EdgeId};
use crate::mechanisms::{check_bids, MechanismOutcome, Threshold};
use crate::spectral::{complete_multipartite, eigen_residual, lift, SpectralLift};
use crate::system::{SetSystem, Subsystem};
use crate::EPS;

struct KPathRun {
    gstar: IntegralFlow,
    gstar_mask: Vec<bool>,
    lift: SpectralLift,
    scaled: Vec<f64>,
}

fn prepare(g: &DiGraph, bids: &[f64], k: usize) -> Result<KPathRun> {
    check_bids(g.n_edges(), bids)?;
    let gstar = cheapest_kplus1_subgraph(g, bids, k)?;
    let system = SetSystem::k_path(g.clone(), k)?;
    let view = Subsystem::new(&system, &gstar.edges)?;
    let lift = lift(&build_dependency(&view))?;
    let scaled = lift.scaled_bids(bids);
    let gstar_mask = g.mask_of(&gstar.edges);
    Ok(KPathRun {
        gstar,
        gstar_mask,
        lift,
        scaled,
    })
}

/// `t1`: cost of the cheapest `(k+1)`-flow avoiding `e`, minus the cheapest
/// overall, plus `b(e)`; unbounded when no `(k+1)`-flow avoids `e`.
fn pruning_threshold(g: &DiGraph, bids: &[f64], k: usize, best: f64, e: EdgeId) -> Threshold {
    let mut without = g.full_mask();
    without[e] = false;
    match flow_cost_within(g, bids, &without, k + 1) {
        Some(c) => Threshold::Finite(c - best + bids[e]),
        None => Threshold::Unbounded,
    }
}

fn selection_threshold(g: &DiGraph, k: usize, run: &KPathRun, e: EdgeId) -> Result<Threshold> {
    let w = run.lift.weight(e).ok_or(Error::AgentOutOfRange {
        agent: e,
        n_agents: g.n_edges(),
    })?;
    let inside =
        flow_cost_within(g, &run.scaled, &run.gstar_mask, k).ok_or(Error::NoFeasibleSet)?;
    let mut without = run.gstar_mask.clone();
    without[e] = false;
    Ok(match flow_cost_within(g, &run.scaled, &without, k) {
        Some(c) => Threshold::Finite(w * (c - inside + run.scaled[e])),
        None => Threshold::Unbounded,
    })
}

/// Analytic thresholds `(t1, t2)` of edge `agent` in the k-path mechanism.
pub fn analytic_thresholds_kpath(
    g: &DiGraph,
    bids: &[f64],
    k: usize,
    agent: EdgeId,
) -> Result<(Threshold, Threshold)> {
    let run = prepare(g, bids, k)?;
    if agent >= g.n_edges() {
        return Err(Error::AgentOutOfRange {
            agent,
            n_agents: g.n_edges(),
        });
    }
    let t1 = pruning_threshold(g, bids, k, run.gstar.cost, agent);
    let t2 = if run.gstar.contains(agent) {
        selection_threshold(g, k, &run, agent)?
    } else {
        Threshold::Finite(0.0)
    };
    Ok((t1, t2))
}

/// The k-path mechanism: prune to the cheapest `(k+1)`-flow `G*`, lift by
/// the Perron vectors of its dependency graph and buy the cheapest `k`-flow
/// inside `G*` under lifted bids.
pub fn kpath_mechanism(g: &DiGraph, bids: &[f64], k: usize) -> Result<MechanismOutcome> {
    let run = prepare(g, bids, k)?;
    let winners = min_cost_flow_within(g, &run.scaled, &run.gstar_mask, k)?.edges;
    let thresholds = winners
        .iter()
        .map(|&e| {
            Ok((
                pruning_threshold(g, bids, k, run.gstar.cost, e),
                selection_threshold(g, k, &run, e)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    MechanismOutcome::assemble(
        "kpath",
        g.n_edges(),
        run.gstar.edges,
        Some(run.lift),
        winners,
        thresholds,
    )
}

/// Independent single-path mechanism: splits `G*` at its articulation
/// points into pairs of internally disjoint subpaths `(P_i, P'_i)` and, in
/// every part, buys the subpath with smaller `sum b(e) * sqrt(|P_i|)`.
pub fn sqrt_mechanism(g: &DiGraph, bids: &[f64]) -> Result<MechanismOutcome> {
    check_bids(g.n_edges(), bids)?;
    let gstar = cheapest_kplus1_subgraph(g, bids, 1)?;
    let decomposition = articulation_decomposition(g, &gstar.edges)?;
    let paths = decompose_paths(g, &gstar.edges)?;
    let on_first: Vec<bool> = {
        let mut m = vec![false; g.n_edges()];
        paths[0].iter().for_each(|&e| m[e] = true);
        m
    };

    let mut nodes_weights: Vec<(EdgeId, f64)> = Vec::new();
    let mut components = Vec::new();
    let mut component_alphas = Vec::new();
    let mut residual: f64 = 0.0;
    let mut winners = Vec::new();
    let mut scaled = bids.to_vec();
    for part in &decomposition.parts {
        let (p, q): (Vec<EdgeId>, Vec<EdgeId>) = part.iter().partition(|&&e| on_first[e]);
        if p.is_empty() || q.is_empty() {
            return Err(Error::InvalidFlowStructure(
                "part without two disjoint subpaths".into(),
            ));
        }
        let (wp, wq) = (1.0 / (p.len() as f64).sqrt(), 1.0 / (q.len() as f64).sqrt());
        let top = wp.max(wq);
        let (wp, wq) = (wp / top, wq / top);
        for &e in &p {
            nodes_weights.push((e, wp));
            scaled[e] = bids[e] / wp;
        }
        for &e in &q {
            nodes_weights.push((e, wq));
            scaled[e] = bids[e] / wq;
        }

        let alpha = ((p.len() * q.len()) as f64).sqrt();
        let order: Vec<EdgeId> = p.iter().chain(&q).copied().collect();
        let w: Vec<f64> = order
            .iter()
            .map(|&e| if on_first[e] { wp } else { wq })
            .collect();
        residual = residual.max(eigen_residual(
            &complete_multipartite(&[p.len(), q.len()]),
            &w,
            alpha,
        ));
        component_alphas.push(alpha);
        components.push(part.clone());

        let cost_p: f64 = p.iter().map(|&e| scaled[e]).sum();
        let cost_q: f64 = q.iter().map(|&e| scaled[e]).sum();
        let highest = *part.iter().max().expect("non-empty part");
        let take_p = if (cost_p - cost_q).abs() <= EPS {
            !p.contains(&highest)
        } else {
            cost_p < cost_q
        };
        let (chosen, other_cost, chosen_cost) = if take_p {
            (p, cost_q, cost_p)
        } else {
            (q, cost_p, cost_q)
        };
        for e in chosen {
            winners.push((e, other_cost - chosen_cost + scaled[e]));
        }
    }

    nodes_weights.sort_unstable_by_key(|&(e, _)| e);
    let weight_of =
        |e: EdgeId| nodes_weights[nodes_weights.binary_search_by_key(&e, |&(a, _)| a).unwrap()].1;
    winners.sort_unstable_by_key(|&(e, _)| e);
    let thresholds = winners
        .iter()
        .map(|&(e, scaled_threshold)| {
            (
                pruning_threshold(g, bids, 1, gstar.cost, e),
                Threshold::Finite(weight_of(e) * scaled_threshold),
            )
        })
        .collect();
    let mut order: Vec<usize> = (0..components.len()).collect();
    order.sort_by_key(|&i| components[i][0]);
    let lift = SpectralLift {
        alpha: component_alphas.iter().copied().fold(0.0, f64::max),
        nodes: nodes_weights.iter().map(|&(e, _)| e).collect(),
        weights: nodes_weights.iter().map(|&(_, w)| w).collect(),
        components: order.iter().map(|&i| components[i].clone()).collect(),
        component_alphas: order.iter().map(|&i| component_alphas[i]).collect(),
        residual,
    };
    let winner_ids = winners.iter().map(|&(e, _)| e).collect();
    MechanismOutcome::assemble(
        "sqrt",
        g.n_edges(),
        gstar.edges,
        Some(lift),
        winner_ids,
        thresholds,
    )
}
