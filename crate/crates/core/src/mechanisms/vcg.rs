use crate::error::{Error, Result};
use crate::flows::{flow_cost_within, min_cost_flow};
use crate::mechanisms::cover::{canonical_cover, min_cover_cost};
use crate::mechanisms::groups::cheapest_groups;
use crate::mechanisms::{cheapest_set, check_bids, MechanismOutcome, Threshold};
use crate::system::{AgentId, SetSystem, SystemKind};
use crate::DEFAULT_ENUMERATION_CAP;

/// VCG: the feasible set of smallest total bid wins and every winner is
/// paid the cost of the best alternative avoiding it minus the cost of the
/// rest of the winning set.
pub fn vcg(system: &SetSystem, bids: &[f64]) -> Result<MechanismOutcome> {
    let n = system.n_agents();
    check_bids(n, bids)?;
    system.check_monopoly_free_mask(&vec![true; n])?;
    let (winners, alternatives): (Vec<AgentId>, Vec<f64>) = match system.kind() {
        SystemKind::KPath { graph, k } => {
            let flow = min_cost_flow(graph, bids, *k)?;
            let alt = flow
                .edges
                .iter()
                .map(|&e| {
                    let mut without = graph.full_mask();
                    without[e] = false;
                    flow_cost_within(graph, bids, &without, *k).ok_or(Error::Monopoly { agent: e })
                })
                .collect::<Result<_>>()?;
            (flow.edges, alt)
        }
        SystemKind::VertexCover { graph } => {
            let cover = canonical_cover(graph, bids, vec![None; n])?;
            let alt = cover
                .iter()
                .map(|&v| {
                    let mut fixed = vec![None; n];
                    fixed[v] = Some(false);
                    min_cover_cost(graph, bids, &fixed).ok_or(Error::Monopoly { agent: v })
                })
                .collect::<Result<_>>()?;
            (cover, alt)
        }
        SystemKind::ROutOfK { groups, r } => {
            let chosen = cheapest_groups(groups, bids, *r)?;
            let totals: Vec<f64> = groups
                .iter()
                .map(|g| g.iter().map(|&a| bids[a]).sum())
                .collect();
            let best: f64 = chosen.iter().map(|&i| totals[i]).sum();
            let mut winners = Vec::new();
            for &i in &chosen {
                let mut others: Vec<usize> = (0..groups.len()).filter(|&j| j != i).collect();
                others.sort_by(|&a, &b| totals[a].total_cmp(&totals[b]).then(a.cmp(&b)));
                let alt: f64 = others[..*r].iter().map(|&j| totals[j]).sum();
                winners.extend(groups[i].iter().map(|&a| (a, alt - best)));
            }
            winners.sort_unstable_by_key(|&(a, _)| a);
            let best_total = best;
            (
                winners.iter().map(|&(a, _)| a).collect(),
                winners.iter().map(|&(_, gap)| gap + best_total).collect(),
            )
        }
        SystemKind::Explicit { .. } => {
            let sets = system.minimal_feasible_sets(DEFAULT_ENUMERATION_CAP)?;
            let chosen = cheapest_set(&sets, bids).ok_or(Error::NoFeasibleSet)?;
            let cost = |s: &[AgentId]| s.iter().map(|&a| bids[a]).sum::<f64>();
            let alt = chosen
                .iter()
                .map(|&e| {
                    sets.iter()
                        .filter(|s| s.binary_search(&e).is_err())
                        .map(|s| cost(s))
                        .fold(None, |acc: Option<f64>, c| {
                            Some(acc.map_or(c, |a| a.min(c)))
                        })
                        .ok_or(Error::Monopoly { agent: e })
                })
                .collect::<Result<_>>()?;
            (chosen, alt)
        }
    };
    let best: f64 = winners.iter().map(|&a| bids[a]).sum();
    let thresholds = winners
        .iter()
        .zip(&alternatives)
        .map(|(&a, &alt)| {
            (
                Threshold::Unbounded,
                Threshold::Finite(alt - (best - bids[a])),
            )
        })
        .collect();
    MechanismOutcome::assemble("vcg", n, (0..n).collect(), None, winners, thresholds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::tests::{diamond, para};
    use crate::graph::UGraph;

    #[test]
    fn para_pays_n() {
        for n in [2, 4, 7] {
            let mut bids = vec![0.0; n + 1];
            bids[0] = 1.0;
            let out = vcg(&SetSystem::k_path(para(n), 1).unwrap(), &bids).unwrap();
            assert_eq!(out.winners, (1..=n).collect::<Vec<_>>());
            assert_eq!(out.total, n as f64);
        }
    }

    #[test]
    fn diamond_and_edge() {
        let out = vcg(
            &SetSystem::k_path(diamond(), 1).unwrap(),
            &[1.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        assert_eq!(out.winners, vec![0, 2]);
        assert_eq!(out.payments, vec![3.0, 0.0, 5.0, 0.0]);
        let sys = SetSystem::vertex_cover(UGraph::new(2, vec![(0, 1)]).unwrap()).unwrap();
        let out = vcg(&sys, &[0.0, 1.0]).unwrap();
        assert_eq!(out.winners, vec![0]);
        assert_eq!(out.total, 1.0);
    }

    #[test]
    fn groups_and_explicit() {
        let sys = SetSystem::r_out_of_k(vec![vec![0], vec![1], vec![2]], 2).unwrap();
        let out = vcg(&sys, &[1.0, 2.0, 4.0]).unwrap();
        assert_eq!(out.winners, vec![0, 1]);
        assert_eq!(out.payments, vec![4.0, 4.0, 0.0]);
        let sys = SetSystem::explicit(3, vec![vec![0, 1], vec![2]]).unwrap();
        let out = vcg(&sys, &[1.0, 1.0, 5.0]).unwrap();
        assert_eq!(out.winners, vec![0, 1]);
        assert_eq!(out.payments, vec![4.0, 4.0, 0.0]);
    }

    #[test]
    fn monopoly_rejected() {
        let sys = SetSystem::explicit(2, vec![vec![0, 1]]).unwrap();
        assert!(matches!(
            vcg(&sys, &[1.0, 1.0]),
            Err(Error::Monopoly { .. })
        ));
    }
}
