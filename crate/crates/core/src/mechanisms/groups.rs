use crate::error::{Error, Result};
use crate::mechanisms::{check_bids, MechanismOutcome, Threshold};
use crate::spectral::{eigen_residual, solve_lozenge, SpectralLift};
use crate::system::{AgentId, SetSystem};

fn group_total(group: &[AgentId], bids: &[f64]) -> f64 {
    group.iter().map(|&a| bids[a]).sum()
}

/// Indices of the `count` groups with smallest total bid, ties to the lower
/// index, in increasing index order.
pub fn cheapest_groups(groups: &[Vec<AgentId>], bids: &[f64], count: usize) -> Result<Vec<usize>> {
    if groups.len() < count {
        return Err(Error::InvalidInstance(format!(
            "need {count} groups, only {} available",
            groups.len()
        )));
    }
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by(|&a, &b| {
        group_total(&groups[a], bids)
            .total_cmp(&group_total(&groups[b], bids))
            .then(a.cmp(&b))
    });
    let mut kept = order[..count].to_vec();
    kept.sort_unstable();
    Ok(kept)
}

/// The r-out-of-k mechanism: keep the `r + 1` cheapest groups, weight each
/// by its entry of the group-scaling solution and drop the group with the
/// highest scaled total (the higher index on ties).
///
/// Every member is paid its own threshold: the smaller of the bid at which
/// its group leaves the `r + 1` cheapest and the bid at which it becomes the
/// group with the highest scaled total.
pub fn r_out_of_k_mechanism(
    groups: &[Vec<AgentId>],
    bids: &[f64],
    r: usize,
) -> Result<MechanismOutcome> {
    let system = SetSystem::r_out_of_k(groups.to_vec(), r)?;
    check_bids(system.n_agents(), bids)?;
    if groups.len() < r + 1 {
        return Err(Error::InvalidInstance(format!(
            "r-out-of-k mechanism needs at least r + 1 = {} groups, got {}",
            r + 1,
            groups.len()
        )));
    }
    let totals: Vec<f64> = groups.iter().map(|g| group_total(g, bids)).collect();
    let kept = cheapest_groups(groups, bids, r + 1)?;
    let sizes: Vec<usize> = kept.iter().map(|&i| groups[i].len()).collect();
    let (beta, x) = solve_lozenge(&sizes, r)?;
    let scaled: Vec<f64> = kept
        .iter()
        .zip(&x)
        .map(|(&i, &xi)| totals[i] / xi)
        .collect();
    let dropped = (0..kept.len())
        .max_by(|&a, &b| scaled[a].total_cmp(&scaled[b]).then(a.cmp(&b)))
        .expect("r + 1 >= 2 groups kept");

    // Threshold for staying among the r + 1 cheapest: the (r+1)-th cheapest
    // other group, by (total, index).
    let survival_threshold = |i: usize| -> Threshold {
        let mut others: Vec<usize> = (0..groups.len()).filter(|&j| j != i).collect();
        if others.len() < r + 1 {
            return Threshold::Unbounded;
        }
        others.sort_by(|&a, &b| totals[a].total_cmp(&totals[b]).then(a.cmp(&b)));
        Threshold::Finite(totals[others[r]] - totals[i])
    };

    let mut winners = Vec::new();
    for (pos, &i) in kept.iter().enumerate() {
        if pos == dropped {
            continue;
        }
        let highest_other = (0..kept.len())
            .filter(|&p| p != pos)
            .map(|p| scaled[p])
            .fold(f64::NEG_INFINITY, f64::max);
        let slack1 = survival_threshold(i);
        let slack2 = highest_other * x[pos] - totals[i];
        for &a in &groups[i] {
            let t1 = match slack1 {
                Threshold::Finite(s) => Threshold::Finite(bids[a] + s),
                Threshold::Unbounded => Threshold::Unbounded,
            };
            winners.push((a, t1, Threshold::Finite(bids[a] + slack2)));
        }
    }
    winners.sort_unstable_by_key(|&(a, _, _)| a);

    let mut member_weight: Vec<(AgentId, f64, usize)> = kept
        .iter()
        .zip(&x)
        .enumerate()
        .flat_map(|(pos, (&i, &xi))| groups[i].iter().map(move |&a| (a, xi, pos)))
        .collect();
    member_weight.sort_unstable_by_key(|&(a, _, _)| a);
    let adjacency: Vec<Vec<bool>> = member_weight
        .iter()
        .map(|&(_, _, p)| member_weight.iter().map(|&(_, _, q)| p != q).collect())
        .collect();
    let weights: Vec<f64> = member_weight.iter().map(|&(_, w, _)| w).collect();
    let alpha = beta * r as f64;
    let nodes: Vec<AgentId> = member_weight.iter().map(|&(a, _, _)| a).collect();
    let lift = SpectralLift {
        alpha,
        residual: eigen_residual(&adjacency, &weights, alpha),
        components: vec![nodes.clone()],
        component_alphas: vec![alpha],
        nodes: nodes.clone(),
        weights,
    };
    MechanismOutcome::assemble(
        "r-out-of-k",
        system.n_agents(),
        nodes,
        Some(lift),
        winners.iter().map(|&(a, _, _)| a).collect(),
        winners.iter().map(|&(_, t1, t2)| (t1, t2)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::tests::parallel;
    use crate::mechanisms::{kpath_mechanism, run_pruning_lifting, GroupPruner, GroupSelector};
    use crate::DiGraph;
    use approx::assert_abs_diff_eq;

    #[test]
    fn second_price_shape() {
        let out = r_out_of_k_mechanism(&[vec![0], vec![1]], &[3.0, 5.0], 1).unwrap();
        assert_eq!(out.winners, vec![0]);
        assert_abs_diff_eq!(out.total, 5.0, epsilon = 1e-9);
    }

    #[test]
    fn two_of_three() {
        let out = r_out_of_k_mechanism(&[vec![0], vec![1], vec![2]], &[1.0, 2.0, 4.0], 2).unwrap();
        assert_eq!(out.winners, vec![0, 1]);
        assert_abs_diff_eq!(out.payments[0], 4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(out.payments[1], 4.0, epsilon = 1e-9);
    }

    #[test]
    fn star_shape_matches_para() {
        let out = r_out_of_k_mechanism(&[vec![0], vec![1, 2, 3, 4]], &[1.0, 0.0, 0.0, 0.0, 0.0], 1)
            .unwrap();
        assert_eq!(out.winners, vec![1, 2, 3, 4]);
        assert_abs_diff_eq!(out.total, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn pruning_uses_group_totals() {
        let groups = vec![vec![0], vec![1, 2], vec![3], vec![4]];
        let bids = [5.0, 1.0, 1.0, 1.0, 3.0];
        let out = r_out_of_k_mechanism(&groups, &bids, 2).unwrap();
        assert_eq!(out.surviving, vec![1, 2, 3, 4]);
        let sys = SetSystem::r_out_of_k(groups, 2).unwrap();
        let bisected = run_pruning_lifting(&sys, &bids, &GroupPruner, &GroupSelector).unwrap();
        assert_eq!(out.winners, bisected.winners);
        for (a, b) in out.payments.iter().zip(&bisected.payments) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-7);
        }
    }

    #[test]
    fn parallel_edges_agree_with_kpath() {
        let bids = [4.0, 1.0, 3.0, 2.0];
        let a = r_out_of_k_mechanism(&[vec![0], vec![1], vec![2], vec![3]], &bids, 2).unwrap();
        let b = kpath_mechanism(&parallel(4), &bids, 2).unwrap();
        assert_eq!(a.winners, b.winners);
        for (x, y) in a.payments.iter().zip(&b.payments) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-7);
        }
        // Groups as paths of different lengths.
        let g = DiGraph::new(4, vec![(0, 1), (0, 2), (2, 1), (0, 3), (3, 1)], 0, 1).unwrap();
        let bids = [2.0, 0.5, 0.5, 1.0, 2.0];
        let a = r_out_of_k_mechanism(&[vec![0], vec![1, 2], vec![3, 4]], &bids, 1).unwrap();
        let b = kpath_mechanism(&g, &bids, 1).unwrap();
        assert_eq!(a.winners, b.winners);
        for (x, y) in a.payments.iter().zip(&b.payments) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-7);
        }
    }

    #[test]
    fn too_few_groups() {
        assert!(r_out_of_k_mechanism(&[vec![0], vec![1]], &[1.0, 1.0], 2).is_err());
    }
}
