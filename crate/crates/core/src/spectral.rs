//! Perron pairs of dependency-graph components: the lifting weights.

use crate::dependency::DependencyGraph;
use crate::error::{Error, Result};
use crate::system::AgentId;

/// Iteration cap for power iteration.
pub const MAX_ITERATIONS: usize = 1_000_000;
/// Public residual contract, relative to `max(1, alpha)`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
const TARGET_RESIDUAL: f64 = 1e-12;
const STALL_WINDOW: usize = 20_000;

/// Lifting weights over the surviving agents.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLift {
    /// Largest principal eigenvalue over the components.
    pub alpha: f64,
    /// Surviving agents, sorted.
    pub nodes: Vec<AgentId>,
    /// Positive weight per entry of `nodes`; each component has maximum weight 1.
    pub weights: Vec<f64>,
    pub components: Vec<Vec<AgentId>>,
    /// Principal eigenvalue per entry of `components`.
    pub component_alphas: Vec<f64>,
    /// Largest `||A_j w - alpha_j w||_inf` over the components.
    pub residual: f64,
}

impl SpectralLift {
    pub fn weight(&self, agent: AgentId) -> Option<f64> {
        self.nodes
            .binary_search(&agent)
            .ok()
            .map(|i| self.weights[i])
    }

    /// `b(e) / w(e)` for surviving agents; other entries keep their raw bid.
    pub fn scaled_bids(&self, bids: &[f64]) -> Vec<f64> {
        let mut scaled = bids.to_vec();
        for (&a, &w) in self.nodes.iter().zip(&self.weights) {
            scaled[a] = bids[a] / w;
        }
        scaled
    }
}

/// `||A x - alpha x||_inf` for a 0/1 adjacency matrix `A`.
pub fn eigen_residual(adj: &[Vec<bool>], x: &[f64], alpha: f64) -> f64 {
    adj.iter()
        .zip(x)
        .map(|(row, &xi)| {
            let ax: f64 = row
                .iter()
                .zip(x)
                .filter(|(&a, _)| a)
                .map(|(_, &xj)| xj)
                .sum();
            (ax - alpha * xi).abs()
        })
        .fold(0.0, f64::max)
}

/// Largest eigenvalue and its positive eigenvector (maximum entry 1) for the
/// adjacency matrix of a connected graph.
///
/// Power iteration on `A + I` from the all-ones vector; the shift removes
/// the sign oscillation that bipartite components would otherwise cause.
pub fn principal_eigen(adj: &[Vec<bool>]) -> Result<(f64, Vec<f64>)> {
    let n = adj.len();
    if n == 0 {
        return Err(Error::InvalidInstance("empty component".into()));
    }
    if n == 1 {
        return Ok((0.0, vec![1.0]));
    }
    let mut x = vec![1.0; n];
    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    let mut since_best = 0;
    for _ in 0..MAX_ITERATIONS {
        let mut y: Vec<f64> = adj
            .iter()
            .zip(&x)
            .map(|(row, &xi)| {
                xi + row
                    .iter()
                    .zip(&x)
                    .filter(|(&a, _)| a)
                    .map(|(_, &xj)| xj)
                    .sum::<f64>()
            })
            .collect();
        let top = y.iter().copied().fold(0.0, f64::max);
        y.iter_mut().for_each(|v| *v /= top);
        x = y;

        let ax_dot_x: f64 = adj
            .iter()
            .zip(&x)
            .map(|(row, &xi)| {
                xi * row
                    .iter()
                    .zip(&x)
                    .filter(|(&a, _)| a)
                    .map(|(_, &xj)| xj)
                    .sum::<f64>()
            })
            .sum();
        let alpha = ax_dot_x / x.iter().map(|v| v * v).sum::<f64>();
        let residual = eigen_residual(adj, &x, alpha);
        let scale = alpha.max(1.0);
        if residual <= TARGET_RESIDUAL * scale {
            return Ok((alpha, x));
        }
        if best.as_ref().is_none_or(|(_, r, _)| residual < *r) {
            best = Some((alpha, residual, x.clone()));
            since_best = 0;
        } else {
            since_best += 1;
            if since_best > STALL_WINDOW {
                break;
            }
        }
    }
    match best {
        Some((alpha, residual, x)) if residual <= RESIDUAL_TOLERANCE * alpha.max(1.0) => {
            Ok((alpha, x))
        }
        Some((_, residual, _)) => Err(Error::NoConvergence {
            iterations: MAX_ITERATIONS,
            residual,
        }),
        None => unreachable!("n >= 2 runs at least one iteration"),
    }
}

/// Perron lift of every component of `h`.
pub fn lift(h: &DependencyGraph) -> Result<SpectralLift> {
    let nodes = h.nodes().to_vec();
    let mut weights = vec![0.0; nodes.len()];
    let mut component_alphas = Vec::with_capacity(h.components().len());
    let mut residual: f64 = 0.0;
    for component in h.components() {
        let positions: Vec<usize> = component
            .iter()
            .map(|&a| h.position(a).expect("component node"))
            .collect();
        let sub: Vec<Vec<bool>> = positions
            .iter()
            .map(|&i| positions.iter().map(|&j| h.adjacency()[i][j]).collect())
            .collect();
        let (alpha, w) = principal_eigen(&sub)?;
        residual = residual.max(eigen_residual(&sub, &w, alpha));
        for (&i, wi) in positions.iter().zip(w) {
            weights[i] = wi;
        }
        component_alphas.push(alpha);
    }
    let alpha = component_alphas.iter().copied().fold(0.0, f64::max);
    Ok(SpectralLift {
        alpha,
        nodes,
        weights,
        components: h.components().to_vec(),
        component_alphas,
        residual,
    })
}

/// Adjacency matrix of the complete multipartite graph with the given part
/// sizes; vertices are numbered part by part.
pub fn complete_multipartite(sizes: &[usize]) -> Vec<Vec<bool>> {
    let part: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(i, &s)| std::iter::repeat_n(i, s))
        .collect();
    part.iter()
        .map(|&p| part.iter().map(|&q| p != q).collect())
        .collect()
}

/// Positive solution `(beta, x)` of the group-scaling system for `r + 1`
/// groups of the given sizes: `beta * r * x_i = sum_{j != i} x_j |S_j|`.
///
/// Solved through the Perron pair of the complete `(r+1)`-partite graph:
/// `beta = alpha / r` and `x_i` is the common eigenvector entry of group `i`
/// (largest `x_i` equal to 1).
pub fn solve_lozenge(sizes: &[usize], r: usize) -> Result<(f64, Vec<f64>)> {
    if r == 0 || sizes.len() != r + 1 || sizes.contains(&0) {
        return Err(Error::InvalidInstance(format!(
            "need r >= 1 and r + 1 non-empty groups, got r = {r} and sizes {sizes:?}"
        )));
    }
    let (alpha, w) = principal_eigen(&complete_multipartite(sizes))?;
    let mut offset = 0;
    let x = sizes
        .iter()
        .map(|&s| {
            let xi = w[offset];
            offset += s;
            xi
        })
        .collect();
    Ok((alpha / r as f64, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn path(n: usize) -> Vec<Vec<bool>> {
        (0..n)
            .map(|i| (0..n).map(|j| i.abs_diff(j) == 1).collect())
            .collect()
    }

    #[test]
    fn complete_bipartite_two_three() {
        let (alpha, w) = principal_eigen(&complete_multipartite(&[2, 3])).unwrap();
        assert_abs_diff_eq!(alpha, 6f64.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(w[0], w[1], epsilon = 1e-10);
        assert_abs_diff_eq!(w[2], w[4], epsilon = 1e-10);
        // Larger entries sit on the smaller side: w_small / w_large = sqrt(3/2).
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(w[2], (2.0f64 / 3.0).sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn singleton_and_path() {
        assert_eq!(principal_eigen(&[vec![false]]).unwrap(), (0.0, vec![1.0]));
        let (alpha, w) = principal_eigen(&path(3)).unwrap();
        assert_abs_diff_eq!(alpha, 2f64.sqrt(), epsilon = 1e-10);
        let half_root2 = 2f64.sqrt() / 2.0;
        for (got, want) in w.iter().zip([half_root2, 1.0, half_root2]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-10);
        }
    }

    #[test]
    fn star_lift() {
        let adj = complete_multipartite(&[1, 4]);
        let h = DependencyGraph::from_adjacency((0..5).collect(), adj);
        let l = lift(&h).unwrap();
        assert_abs_diff_eq!(l.alpha, 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(l.weight(0).unwrap(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(l.weight(3).unwrap(), 0.5, epsilon = 1e-10);
        assert!(l.residual <= 1e-9);
    }

    #[test]
    fn two_components_take_max() {
        let mut adj = vec![vec![false; 6]; 6];
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3), (4, 5)] {
            adj[i][j] = true;
            adj[j][i] = true;
        }
        let l = lift(&DependencyGraph::from_adjacency((0..6).collect(), adj)).unwrap();
        assert_abs_diff_eq!(l.alpha, 2.0, epsilon = 1e-10);
        assert_eq!(l.component_alphas.len(), 2);
        assert_abs_diff_eq!(l.component_alphas[1], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(l.weight(5).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn lozenge_examples() {
        let (beta, x) = solve_lozenge(&[1, 9], 1).unwrap();
        assert_abs_diff_eq!(beta, 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(x[1], 1.0 / 3.0, epsilon = 1e-10);
        let (beta, _) = solve_lozenge(&[1, 1, 1], 2).unwrap();
        assert_abs_diff_eq!(beta, 1.0, epsilon = 1e-10);
        let (beta, _) = solve_lozenge(&[2, 5], 1).unwrap();
        assert_abs_diff_eq!(beta, 10f64.sqrt(), epsilon = 1e-10);
        assert!(solve_lozenge(&[1, 1], 2).is_err());
    }

    #[test]
    fn lozenge_satisfies_its_equations() {
        let sizes = [1, 2, 4, 3];
        let r = 3;
        let (beta, x) = solve_lozenge(&sizes, r).unwrap();
        for i in 0..sizes.len() {
            let rhs: f64 = (0..sizes.len())
                .filter(|&j| j != i)
                .map(|j| x[j] * sizes[j] as f64)
                .sum();
            assert_abs_diff_eq!(beta * r as f64 * x[i], rhs, epsilon = 1e-9);
        }
    }
}
