//! The pruning-lifting engine, its k-path, vertex-cover, r-out-of-k and
//! single-path instantiations, the VCG baseline and threshold payments.

mod cover;
mod groups;
mod kpath;
mod vcg;

pub use cover::{
    exact_cover, half_integral_relaxation, is_locally_optimal, local_optimality_repair,
    min_cover_cost, rounded_cover, vertex_cover_mechanism, CoverMode, MAX_EXACT_COVER_VERTICES,
};
pub use groups::{cheapest_groups, r_out_of_k_mechanism};
pub use kpath::{analytic_thresholds_kpath, kpath_mechanism, sqrt_mechanism};
pub use vcg::vcg;

use crate::dependency::build_dependency;
use crate::error::{Error, Result};
use crate::flows::{cheapest_kplus1_subgraph, min_cost_flow_within};
use crate::spectral::{lift, SpectralLift};
use crate::system::{prefers_low_ids, AgentId, SetSystem, Subsystem, SystemKind};
use crate::{DEFAULT_ENUMERATION_CAP, EPS};

/// A threshold bid: the supremum of the bids at which an agent still wins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Finite(f64),
    /// The agent wins at every bid.
    Unbounded,
}

impl Threshold {
    pub fn min(self, other: Threshold) -> Threshold {
        match (self, other) {
            (Threshold::Finite(a), Threshold::Finite(b)) => Threshold::Finite(a.min(b)),
            (Threshold::Finite(a), Threshold::Unbounded)
            | (Threshold::Unbounded, Threshold::Finite(a)) => Threshold::Finite(a),
            (Threshold::Unbounded, Threshold::Unbounded) => Threshold::Unbounded,
        }
    }

    /// The value as a float, with `Unbounded` mapped to infinity.
    pub fn value(self) -> f64 {
        match self {
            Threshold::Finite(v) => v,
            Threshold::Unbounded => f64::INFINITY,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Threshold::Unbounded)
    }
}

/// Thresholds and payment of one winner.
#[derive(Debug, Clone, PartialEq)]
pub struct WinnerPayment {
    pub agent: AgentId,
    /// Threshold for surviving the pruning stage.
    pub t1: Threshold,
    /// Threshold for being selected within the pruned system.
    pub t2: Threshold,
    pub payment: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MechanismOutcome {
    pub mechanism: &'static str,
    /// Agents that survived pruning, sorted.
    pub surviving: Vec<AgentId>,
    /// Absent for mechanisms that do not lift bids (VCG).
    pub lift: Option<SpectralLift>,
    /// Winning feasible set, sorted.
    pub winners: Vec<AgentId>,
    /// One entry per winner, in winner order.
    pub details: Vec<WinnerPayment>,
    /// Payment per agent; zero for losers.
    pub payments: Vec<f64>,
    pub total: f64,
}

impl MechanismOutcome {
    pub fn alpha(&self) -> Option<f64> {
        self.lift.as_ref().map(|l| l.alpha)
    }

    pub fn is_winner(&self, agent: AgentId) -> bool {
        self.winners.binary_search(&agent).is_ok()
    }

    /// Payment minus cost if `agent` wins, zero otherwise.
    pub fn utility(&self, agent: AgentId, cost: f64) -> f64 {
        if self.is_winner(agent) {
            self.payments[agent] - cost
        } else {
            0.0
        }
    }

    pub(crate) fn assemble(
        mechanism: &'static str,
        n_agents: usize,
        surviving: Vec<AgentId>,
        lift: Option<SpectralLift>,
        winners: Vec<AgentId>,
        thresholds: Vec<(Threshold, Threshold)>,
    ) -> Result<Self> {
        let mut payments = vec![0.0; n_agents];
        let mut details = Vec::with_capacity(winners.len());
        for (&agent, &(t1, t2)) in winners.iter().zip(&thresholds) {
            let payment = match t1.min(t2) {
                Threshold::Finite(v) => v,
                Threshold::Unbounded => return Err(Error::Monopoly { agent }),
            };
            payments[agent] = payment;
            details.push(WinnerPayment {
                agent,
                t1,
                t2,
                payment,
            });
        }
        let total = details.iter().map(|d| d.payment).sum();
        Ok(Self {
            mechanism,
            surviving,
            lift,
            winners,
            details,
            payments,
            total,
        })
    }
}

pub(crate) fn check_bids(n_agents: usize, bids: &[f64]) -> Result<()> {
    if bids.len() != n_agents {
        return Err(Error::InvalidBids(format!(
            "expected {n_agents} bids, got {}",
            bids.len()
        )));
    }
    if let Some((agent, b)) = bids
        .iter()
        .enumerate()
        .find(|(_, b)| !b.is_finite() || **b < 0.0)
    {
        return Err(Error::InvalidBids(format!(
            "bid {b} of agent {agent} is not a finite non-negative number"
        )));
    }
    Ok(())
}

/// Number of evenly spaced bids on which [`threshold_bid`] checks monotonicity.
pub const PROBE_POINTS: usize = 32;
/// Absolute accuracy of [`threshold_bid`].
pub const BISECTION_TOLERANCE: f64 = 1e-9;

/// Supremum of the bids in `[0, upper]` at which `wins` holds, by bisection.
///
/// Returns `upper` when the agent wins at `upper` and 0 when it loses at 0.
/// The predicate is first sampled at [`PROBE_POINTS`] evenly spaced bids and
/// rejected if a win follows a loss.
pub fn threshold_bid(mut wins: impl FnMut(f64) -> Result<bool>, upper: f64) -> Result<f64> {
    if !(upper.is_finite() && upper > 0.0) {
        return Err(Error::InvalidBids(format!(
            "bisection upper bound {upper} must be positive and finite"
        )));
    }
    let probes: Vec<f64> = (0..PROBE_POINTS)
        .map(|i| upper * i as f64 / (PROBE_POINTS - 1) as f64)
        .collect();
    let mut first_loss: Option<usize> = None;
    for (i, &x) in probes.iter().enumerate() {
        let w = wins(x)?;
        match (w, first_loss) {
            (false, None) => first_loss = Some(i),
            (true, Some(j)) => {
                return Err(Error::NonMonotone {
                    wins_at: x,
                    loses_at: probes[j],
                })
            }
            _ => {}
        }
    }
    let Some(j) = first_loss else {
        return Ok(upper);
    };
    if j == 0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (probes[j - 1], probes[j]);
    for _ in 0..200 {
        if hi - lo <= BISECTION_TOLERANCE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if wins(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// [`threshold_bid`] with a win at `upper` reported as unbounded.
fn bisect(mut wins: impl FnMut(f64) -> Result<bool>, upper: f64) -> Result<Threshold> {
    if wins(upper)? {
        return Ok(Threshold::Unbounded);
    }
    threshold_bid(wins, upper).map(Threshold::Finite)
}

/// The pruning stage: surviving agents as a function of the bids. Must be
/// monotone (a surviving agent survives any lower bid) and bid-independent
/// (`E*` does not change while an agent keeps surviving).
pub trait Pruner {
    fn prune(&self, system: &SetSystem, bids: &[f64]) -> Result<Vec<AgentId>>;
}

/// The winner-selection stage on the pruned system under lifted bids.
pub trait WinnerSelector {
    fn select(&self, view: &Subsystem, scaled: &[f64]) -> Result<Vec<AgentId>>;
}

/// Keeps every agent.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoPruning;

impl Pruner for NoPruning {
    fn prune(&self, system: &SetSystem, _bids: &[f64]) -> Result<Vec<AgentId>> {
        Ok((0..system.n_agents()).collect())
    }
}

/// Keeps the cheapest union of `k + 1` edge-disjoint paths of a k-path system.
#[derive(Debug, Clone, Copy, Default)]
pub struct KPathPruner;

impl Pruner for KPathPruner {
    fn prune(&self, system: &SetSystem, bids: &[f64]) -> Result<Vec<AgentId>> {
        match system.kind() {
            SystemKind::KPath { graph, k } => Ok(cheapest_kplus1_subgraph(graph, bids, *k)?.edges),
            _ => Err(Error::Unsupported {
                op: "k-path pruning",
                kind: system.kind_name(),
            }),
        }
    }
}

/// Keeps the `r + 1` groups of an r-out-of-k system with the smallest total
/// bid, ties broken by group index.
#[derive(Debug, Clone, Copy, Default)]
pub struct GroupPruner;

impl Pruner for GroupPruner {
    fn prune(&self, system: &SetSystem, bids: &[f64]) -> Result<Vec<AgentId>> {
        match system.kind() {
            SystemKind::ROutOfK { groups, r } => {
                let kept = cheapest_groups(groups, bids, r + 1)?;
                let mut agents: Vec<AgentId> = kept
                    .iter()
                    .flat_map(|&i| groups[i].iter().copied())
                    .collect();
                agents.sort_unstable();
                Ok(agents)
            }
            _ => Err(Error::Unsupported {
                op: "group pruning",
                kind: system.kind_name(),
            }),
        }
    }
}

/// Cheapest `k`-flow inside the surviving edges, canonical under ties.
#[derive(Debug, Clone, Copy, Default)]
pub struct FlowSelector;

impl WinnerSelector for FlowSelector {
    fn select(&self, view: &Subsystem, scaled: &[f64]) -> Result<Vec<AgentId>> {
        match view.system.kind() {
            SystemKind::KPath { graph, k } => {
                Ok(min_cost_flow_within(graph, scaled, &view.surviving, *k)?.edges)
            }
            _ => Err(Error::Unsupported {
                op: "flow selection",
                kind: view.system.kind_name(),
            }),
        }
    }
}

/// Minimum-weight vertex cover among surviving vertices, canonical under ties.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactCoverSelector;

impl WinnerSelector for ExactCoverSelector {
    fn select(&self, view: &Subsystem, scaled: &[f64]) -> Result<Vec<AgentId>> {
        match view.system.kind() {
            SystemKind::VertexCover { graph } => {
                let fixed: Vec<Option<bool>> = view
                    .surviving
                    .iter()
                    .map(|&s| if s { None } else { Some(false) })
                    .collect();
                cover::canonical_cover(graph, scaled, fixed)
            }
            _ => Err(Error::Unsupported {
                op: "exact cover selection",
                kind: view.system.kind_name(),
            }),
        }
    }
}

/// Rounded covering relaxation followed by local-optimality repair.
#[derive(Debug, Clone, Copy, Default)]
pub struct Approx2CoverSelector;

impl WinnerSelector for Approx2CoverSelector {
    fn select(&self, view: &Subsystem, scaled: &[f64]) -> Result<Vec<AgentId>> {
        match view.system.kind() {
            SystemKind::VertexCover { graph } if view.surviving.iter().all(|&s| s) => Ok(
                local_optimality_repair(graph, scaled, &rounded_cover(graph, scaled)),
            ),
            _ => Err(Error::Unsupported {
                op: "approximate cover selection",
                kind: view.system.kind_name(),
            }),
        }
    }
}

/// `r` whole surviving groups of smallest total scaled bid; among equal
/// totals the higher-indexed group is dropped.
#[derive(Debug, Clone, Copy, Default)]
pub struct GroupSelector;

impl WinnerSelector for GroupSelector {
    fn select(&self, view: &Subsystem, scaled: &[f64]) -> Result<Vec<AgentId>> {
        match view.system.kind() {
            SystemKind::ROutOfK { groups, r } => {
                let whole: Vec<usize> = (0..groups.len())
                    .filter(|&i| groups[i].iter().all(|&a| view.contains(a)))
                    .collect();
                let inside: Vec<Vec<AgentId>> = whole.iter().map(|&i| groups[i].clone()).collect();
                let chosen = cheapest_groups(&inside, scaled, *r)?;
                let mut agents: Vec<AgentId> = chosen
                    .iter()
                    .flat_map(|&i| inside[i].iter().copied())
                    .collect();
                agents.sort_unstable();
                Ok(agents)
            }
            _ => Err(Error::Unsupported {
                op: "group selection",
                kind: view.system.kind_name(),
            }),
        }
    }
}

/// Minimal feasible set of smallest total scaled bid, by enumeration; among
/// equal totals the set avoiding the highest differing agent id wins.
#[derive(Debug, Clone, Copy)]
pub struct EnumerationSelector {
    pub cap: usize,
}

impl Default for EnumerationSelector {
    fn default() -> Self {
        Self {
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

impl WinnerSelector for EnumerationSelector {
    fn select(&self, view: &Subsystem, scaled: &[f64]) -> Result<Vec<AgentId>> {
        cheapest_set(&view.minimal_feasible_sets(self.cap)?, scaled).ok_or(Error::NoFeasibleSet)
    }
}

/// Cheapest of `sets` under `costs`; ties within tolerance go to the set
/// preferred by [`prefers_low_ids`].
pub(crate) fn cheapest_set(sets: &[Vec<AgentId>], costs: &[f64]) -> Option<Vec<AgentId>> {
    let cost = |s: &[AgentId]| s.iter().map(|&a| costs[a]).sum::<f64>();
    let best = sets.iter().map(|s| cost(s)).fold(f64::INFINITY, f64::min);
    sets.iter()
        .filter(|s| cost(s) <= best + EPS)
        .fold(None::<&Vec<AgentId>>, |acc, s| match acc {
            Some(a) if prefers_low_ids(a, s) => Some(a),
            _ => Some(s),
        })
        .cloned()
}

/// Runs prune, dependency graph, lift, selection and threshold payments.
///
/// Both thresholds are found by bisection: `t1` on the pruner with the
/// other bids fixed, `t2` on the selector within the fixed pruned system
/// and lift, in lifted units.
pub fn run_pruning_lifting(
    system: &SetSystem,
    bids: &[f64],
    pruner: &dyn Pruner,
    selector: &dyn WinnerSelector,
) -> Result<MechanismOutcome> {
    check_bids(system.n_agents(), bids)?;
    let surviving = pruner.prune(system, bids)?;
    let view = Subsystem::new(system, &surviving)?;
    let spectral = lift(&build_dependency(&view))?;
    let scaled = spectral.scaled_bids(bids);
    let winners = selector.select(&view, &scaled)?;

    let mut thresholds = Vec::with_capacity(winners.len());
    for &e in &winners {
        let others: f64 = bids
            .iter()
            .enumerate()
            .filter(|&(a, _)| a != e)
            .map(|(_, b)| b)
            .sum();
        let mut probe = bids.to_vec();
        let t1 = bisect(
            |x| {
                probe[e] = x;
                Ok(pruner.prune(system, &probe)?.binary_search(&e).is_ok())
            },
            1.0 + others,
        )?;

        let w = spectral.weight(e).expect("winner survives pruning");
        let others_scaled: f64 = surviving
            .iter()
            .filter(|&&a| a != e)
            .map(|&a| scaled[a])
            .sum();
        let mut probe = scaled.clone();
        let t2 = bisect(
            |y| {
                probe[e] = y;
                Ok(selector.select(&view, &probe)?.binary_search(&e).is_ok())
            },
            1.0 + others_scaled,
        )?;
        let t2 = match t2 {
            Threshold::Finite(y) => Threshold::Finite(w * y),
            Threshold::Unbounded => Threshold::Unbounded,
        };
        thresholds.push((t1, t2));
    }
    MechanismOutcome::assemble(
        "pruning-lifting",
        system.n_agents(),
        surviving,
        Some(spectral),
        winners,
        thresholds,
    )
}

/// Mechanisms selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MechanismKind {
    KPath,
    VertexCover,
    VertexCoverApprox,
    ROutOfK,
    Sqrt,
    Vcg,
}

impl MechanismKind {
    pub const ALL: [MechanismKind; 6] = [
        MechanismKind::KPath,
        MechanismKind::VertexCover,
        MechanismKind::VertexCoverApprox,
        MechanismKind::ROutOfK,
        MechanismKind::Sqrt,
        MechanismKind::Vcg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MechanismKind::KPath => "kpath",
            MechanismKind::VertexCover => "vertex-cover",
            MechanismKind::VertexCoverApprox => "vertex-cover-approx",
            MechanismKind::ROutOfK => "r-out-of-k",
            MechanismKind::Sqrt => "sqrt",
            MechanismKind::Vcg => "vcg",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }
}

/// Runs `kind` on `system`, rejecting combinations that do not apply.
pub fn run_mechanism(
    system: &SetSystem,
    bids: &[f64],
    kind: MechanismKind,
) -> Result<MechanismOutcome> {
    let unsupported = || Error::Unsupported {
        op: kind.name(),
        kind: system.kind_name(),
    };
    match (kind, system.kind()) {
        (MechanismKind::Vcg, _) => vcg(system, bids),
        (MechanismKind::KPath, SystemKind::KPath { graph, k }) => kpath_mechanism(graph, bids, *k),
        (MechanismKind::Sqrt, SystemKind::KPath { graph, k: 1 }) => sqrt_mechanism(graph, bids),
        (MechanismKind::VertexCover, SystemKind::VertexCover { graph }) => {
            vertex_cover_mechanism(graph, bids, CoverMode::Exact)
        }
        (MechanismKind::VertexCoverApprox, SystemKind::VertexCover { graph }) => {
            vertex_cover_mechanism(graph, bids, CoverMode::Approx2)
        }
        (MechanismKind::ROutOfK, SystemKind::ROutOfK { groups, r }) => {
            r_out_of_k_mechanism(groups, bids, *r)
        }
        _ => Err(unsupported()),
    }
}
