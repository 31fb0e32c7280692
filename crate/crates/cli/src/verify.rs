//! The invariant suite behind `frugal verify`.
//!
//! Every instance goes through named checks grouped by area (`io`, `system`,
//! `flows`, `dependency`, `spectral`, `mechanism`, `coherence`,
//! `benchmarks`, `lp`). A check passes, fails, or is skipped when the
//! instance is too large for the exhaustive oracle it needs.

use frugal_core::benchmarks::{
    alpha_kplus1, compute_benchmarks, compute_mu, mu_lower_flow, nu_lower_kpath, rho_v,
    witness_violation, BenchmarkValue,
};
use frugal_core::dependency::{build_dependency, build_dependency_enumerated, DependencyGraph};
use frugal_core::flows::{
    articulation_decomposition, cheapest_kplus1_subgraph, decompose_paths, delta_kplus1,
    flow_cost_curve, has_flow, longest_path_dag, min_cost_flow, validate_flow_subgraph,
    verify_shortest_path_flow,
};
use frugal_core::mechanisms::{
    exact_cover, is_locally_optimal, kpath_mechanism, r_out_of_k_mechanism, run_mechanism,
    run_pruning_lifting, sqrt_mechanism, vertex_cover_mechanism, Approx2CoverSelector, CoverMode,
    EnumerationSelector, ExactCoverSelector, FlowSelector, GroupPruner, GroupSelector, KPathPruner,
    MechanismKind, MechanismOutcome, NoPruning, Pruner, WinnerSelector,
};
use frugal_core::spectral::{lift, solve_lozenge, SpectralLift, RESIDUAL_TOLERANCE};
use frugal_core::{AgentId, DiGraph, Error as CoreError, SetSystem, Subsystem, SystemKind, UGraph};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::instance::{parse_instance, to_text, Instance, InstanceFile};
use crate::report::default_mechanisms;

/// Tolerance on payments, bounds and witnesses.
pub const TOL: f64 = 1e-7;
/// Tolerance on utility comparisons.
pub const UTILITY_TOL: f64 = 1e-6;
/// Largest agent count for checks that enumerate every subset.
pub const EXHAUSTIVE_AGENTS: usize = 12;
/// Largest vertex count for the per-vertex clique check.
pub const CLIQUE_CHECK_VERTICES: usize = 9;

/// The shipped fixture pack: name and file text.
pub const FIXTURES: [(&str, &str); 6] = [
    ("diamond", include_str!("../fixtures/diamond.json")),
    ("para4", include_str!("../fixtures/para4.json")),
    ("star4", include_str!("../fixtures/star4.json")),
    ("triangle", include_str!("../fixtures/triangle.json")),
    ("r-out-of-k", include_str!("../fixtures/r-out-of-k.json")),
    (
        "two-diamonds",
        include_str!("../fixtures/two-diamonds.json"),
    ),
];

pub fn fixture_pack() -> Result<Vec<(String, Instance)>> {
    FIXTURES
        .iter()
        .map(|(name, text)| Ok((name.to_string(), parse_instance(text)?)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceVerification {
    pub name: String,
    pub digest: String,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub version: u32,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub instances: Vec<InstanceVerification>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &CheckResult)> {
        self.instances
            .iter()
            .flat_map(|i| i.checks.iter().map(move |c| (i.name.as_str(), c)))
            .filter(|(_, c)| c.status == Status::Fail)
    }
}

/// Runs every check on every instance.
pub fn verify_suite(instances: &[(String, Instance)], cap: usize) -> VerifyReport {
    let instances: Vec<InstanceVerification> = instances
        .iter()
        .map(|(name, inst)| verify_instance(name, inst, cap))
        .collect();
    let count = |s: Status| {
        instances
            .iter()
            .flat_map(|i| &i.checks)
            .filter(|c| c.status == s)
            .count()
    };
    VerifyReport {
        version: crate::report::REPORT_VERSION,
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        skipped: count(Status::Skip),
        instances,
    }
}

enum Failure {
    Fail(String),
    Skip(String),
}

type Outcome = std::result::Result<(), Failure>;

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::CapExceeded { .. } | CoreError::TooLarge(_) => Failure::Skip(e.to_string()),
            other => Failure::Fail(other.to_string()),
        }
    }
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        match e {
            CliError::Core(core) => core.into(),
            other => Failure::Fail(other.to_string()),
        }
    }
}

fn ensure(condition: bool, detail: impl FnOnce() -> String) -> Outcome {
    if condition {
        Ok(())
    } else {
        Err(Failure::Fail(detail()))
    }
}

fn skip_unless(condition: bool, detail: impl FnOnce() -> String) -> Outcome {
    if condition {
        Ok(())
    } else {
        Err(Failure::Skip(detail()))
    }
}

#[derive(Default)]
struct Checks(Vec<CheckResult>);

impl Checks {
    fn run(&mut self, name: impl Into<String>, f: impl FnOnce() -> Outcome) {
        let (status, detail) = match f() {
            Ok(()) => (Status::Pass, None),
            Err(Failure::Fail(d)) => (Status::Fail, Some(d)),
            Err(Failure::Skip(d)) => (Status::Skip, Some(d)),
        };
        self.0.push(CheckResult {
            check: name.into(),
            status,
            detail,
        });
    }
}

pub fn verify_instance(name: &str, instance: &Instance, cap: usize) -> InstanceVerification {
    let mut c = Checks::default();
    io_checks(&mut c, &instance.file);
    system_checks(&mut c, &instance.system, cap);
    if let SystemKind::KPath { graph, k } = instance.system.kind() {
        flow_checks(&mut c, graph, instance.costs(), *k, cap);
    }
    structure_checks(&mut c, &instance.system, instance.costs(), cap);
    for kind in default_mechanisms(&instance.system) {
        mechanism_checks(&mut c, &instance.system, instance.costs(), kind);
    }
    coherence_checks(&mut c, &instance.system, instance.costs());
    benchmark_checks(&mut c, &instance.system, instance.costs(), cap);
    lp_checks(&mut c, &instance.system, instance.costs(), cap);
    InstanceVerification {
        name: name.to_string(),
        digest: instance.digest(),
        checks: c.0,
    }
}

fn io_checks(c: &mut Checks, file: &InstanceFile) {
    c.run("io.round-trip", || {
        let text = to_text(file)?;
        let back = parse_instance(&text)?;
        ensure(back.file == *file, || {
            "parsed file differs from the original".into()
        })?;
        let bits = |f: &InstanceFile| f.costs.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        ensure(bits(&back.file) == bits(file), || {
            "costs changed bits".into()
        })?;
        ensure(to_text(&back.file)? == text, || {
            "second serialization differs".into()
        })
    });
}

fn masks(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << n).map(move |bits| (0..n).map(|i| bits >> i & 1 == 1).collect())
}

fn system_checks(c: &mut Checks, system: &SetSystem, cap: usize) {
    let n = system.n_agents();
    let small = || skip_unless(n <= EXHAUSTIVE_AGENTS, || format!("{n} agents"));
    c.run("system.upward-closure", || {
        small()?;
        for mask in masks(n).filter(|m| system.is_feasible_mask(m)) {
            for i in (0..n).filter(|&i| !mask[i]) {
                let mut bigger = mask.clone();
                bigger[i] = true;
                ensure(system.is_feasible_mask(&bigger), || {
                    format!("adding agent {i} to {mask:?} loses feasibility")
                })?;
            }
        }
        Ok(())
    });
    c.run("system.minimality", || {
        for set in system.minimal_feasible_sets(cap)? {
            ensure(system.is_feasible(&set)?, || {
                format!("{set:?} is infeasible")
            })?;
            for &e in &set {
                let rest: Vec<AgentId> = set.iter().copied().filter(|&a| a != e).collect();
                ensure(!system.is_feasible(&rest)?, || {
                    format!("{set:?} stays feasible without {e}")
                })?;
            }
        }
        Ok(())
    });
    c.run("system.domination", || {
        small()?;
        let minimal = system.minimal_feasible_sets(cap)?;
        for mask in masks(n).filter(|m| system.is_feasible_mask(m)) {
            ensure(minimal.iter().any(|m| m.iter().all(|&a| mask[a])), || {
                format!("feasible {mask:?} contains no minimal set")
            })?;
        }
        Ok(())
    });
}

fn flow_checks(c: &mut Checks, g: &DiGraph, costs: &[f64], k: usize, cap: usize) {
    c.run("flows.convexity", || {
        let curve = flow_cost_curve(g, costs)?;
        ensure(curve.at(0) == Some(0.0) && curve.is_convex(1e-9), || {
            format!("curve {curve:?}")
        })
    });
    c.run("flows.min-cost-vs-brute-force", || {
        let m = g.n_edges();
        skip_unless(m <= EXHAUSTIVE_AGENTS, || format!("{m} edges"))?;
        let curve = flow_cost_curve(g, costs)?;
        for size in 1..=curve.max_flow() {
            let brute = masks(m)
                .filter(|mask| has_flow(g, mask, size))
                .map(|mask| (0..m).filter(|&e| mask[e]).map(|e| costs[e]).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            let flow = min_cost_flow(g, costs, size)?;
            ensure((flow.cost - brute).abs() <= 1e-9, || {
                format!("size {size}: {} vs {brute}", flow.cost)
            })?;
        }
        Ok(())
    });
    c.run("flows.pruning-optimality", || {
        let pruned = cheapest_kplus1_subgraph(g, costs, k)?;
        let target = flow_cost_curve(g, costs)?.at(k + 1);
        ensure(
            pruned.size == k + 1 && target.is_some_and(|t| (pruned.cost - t).abs() <= 1e-9),
            || format!("pruned cost {} vs C(k+1) {target:?}", pruned.cost),
        )?;
        let paths = validate_flow_subgraph(g, &pruned.edges)?;
        ensure(paths == k + 1, || {
            format!("pruned subgraph carries {paths} paths")
        })
    });
    c.run("flows.delta-bound", || {
        let pruned = cheapest_kplus1_subgraph(g, costs, k)?;
        let longest = longest_path_dag(g, &pruned.edges, costs)?;
        let delta = delta_kplus1(g, costs, k, cap)?;
        ensure(longest <= (k + 1) as f64 * delta + 1e-9, || {
            format!("longest {longest}, delta {delta}")
        })
    });
    c.run("flows.decomposition", || {
        let pruned = cheapest_kplus1_subgraph(g, costs, k)?;
        let d = articulation_decomposition(g, &pruned.edges)?;
        let mut total = 0.0;
        for (i, part) in d.parts.iter().enumerate() {
            let edges = part.iter().map(|&e| g.edge(e)).collect();
            let sub = DiGraph::new(g.n_vertices(), edges, d.points[i], d.points[i + 1])?;
            let local: Vec<f64> = part.iter().map(|&e| costs[e]).collect();
            total += longest_path_dag(&sub, &(0..part.len()).collect::<Vec<_>>(), &local)?;
        }
        let whole = longest_path_dag(g, &pruned.edges, costs)?;
        ensure((total - whole).abs() <= 1e-9, || {
            format!("parts sum to {total}, whole is {whole}")
        })
    });
}

/// The agents surviving the pruning stage that the primary mechanism of the
/// system uses.
fn primary_survivors(system: &SetSystem, costs: &[f64]) -> frugal_core::Result<Vec<AgentId>> {
    match system.kind() {
        SystemKind::KPath { .. } => KPathPruner.prune(system, costs),
        SystemKind::ROutOfK { .. } => GroupPruner.prune(system, costs),
        _ => NoPruning.prune(system, costs),
    }
}

fn primary_selector(system: &SetSystem) -> Box<dyn WinnerSelector> {
    match system.kind() {
        SystemKind::KPath { .. } => Box::new(FlowSelector),
        SystemKind::VertexCover { .. } => Box::new(ExactCoverSelector),
        SystemKind::ROutOfK { .. } => Box::new(GroupSelector),
        _ => Box::new(EnumerationSelector::default()),
    }
}

fn structure_checks(c: &mut Checks, system: &SetSystem, costs: &[f64], cap: usize) {
    let surviving = match primary_survivors(system, costs) {
        Ok(s) => s,
        Err(e) => {
            c.run("dependency.pruning", || Err(e.into()));
            return;
        }
    };
    let view = match Subsystem::new(system, &surviving) {
        Ok(v) => v,
        Err(e) => {
            c.run("dependency.pruning", || Err(e.into()));
            return;
        }
    };
    let h = build_dependency(&view);
    c.run("dependency.symmetric", || {
        let adj = h.adjacency();
        for i in 0..h.n_nodes() {
            ensure(!adj[i][i], || format!("self-loop at {}", h.nodes()[i]))?;
            for j in 0..h.n_nodes() {
                ensure(adj[i][j] == adj[j][i], || {
                    format!("asymmetric pair {} {}", h.nodes()[i], h.nodes()[j])
                })?;
            }
        }
        Ok(())
    });
    c.run("dependency.cover-property", || {
        for set in view.minimal_feasible_sets(cap)? {
            for (a, b) in dependency_edges(&h) {
                ensure(set.contains(&a) || set.contains(&b), || {
                    format!("{set:?} misses edge {a}-{b}")
                })?;
            }
        }
        Ok(())
    });
    c.run("dependency.matches-enumeration", || {
        let enumerated = build_dependency_enumerated(&view, cap)?;
        ensure(enumerated == h, || {
            "pairwise and enumerated constructions differ".into()
        })
    });
    if let SystemKind::KPath { graph, .. } = system.kind() {
        c.run("dependency.articulation", || {
            let d = articulation_decomposition(graph, &surviving)?;
            let mut parts = d.parts.clone();
            parts.sort();
            let mut components = h.components().to_vec();
            components.sort();
            ensure((components.len() == 1) == (d.points.len() == 2), || {
                "connectivity disagrees".into()
            })?;
            ensure(parts == components, || {
                format!("parts {parts:?} vs components {components:?}")
            })
        });
        c.run("dependency.intervals", || {
            for path in decompose_paths(graph, &surviving)? {
                for &v in h.nodes().iter().filter(|v| !path.contains(v)) {
                    let hits: Vec<usize> = (0..path.len())
                        .filter(|&r| h.is_adjacent(v, path[r]))
                        .collect();
                    if let (Some(first), Some(last)) = (hits.first(), hits.last()) {
                        ensure(hits.len() == last - first + 1, || {
                            format!("agent {v} hits {hits:?} on {path:?}")
                        })?;
                    }
                }
            }
            Ok(())
        });
    }
    let spectral = match lift(&h) {
        Ok(s) => s,
        Err(e) => {
            c.run("spectral.lift", || Err(e.into()));
            return;
        }
    };
    c.run("spectral.residual", || {
        ensure(
            spectral.residual <= RESIDUAL_TOLERANCE * spectral.alpha.max(1.0),
            || format!("residual {:e}", spectral.residual),
        )
    });
    c.run("spectral.degree-bounds", || degree_bounds(&h, &spectral));
    c.run("spectral.rescaling", || {
        let selector = primary_selector(system);
        let scaled = spectral.scaled_bids(costs);
        let winners = selector.select(&view, &scaled)?;
        for component in &spectral.components {
            for factor in [0.5, 3.0] {
                let mut rescaled = scaled.clone();
                for &a in component {
                    rescaled[a] /= factor;
                }
                let again = selector.select(&view, &rescaled)?;
                ensure(again == winners, || {
                    format!("factor {factor} on {component:?}: {again:?} vs {winners:?}")
                })?;
            }
        }
        Ok(())
    });
    if let SystemKind::ROutOfK { groups, r } = system.kind() {
        c.run("spectral.lozenge", || {
            let sizes: Vec<usize> = groups
                .iter()
                .filter(|g| g.iter().all(|a| surviving.contains(a)))
                .map(|g| g.len())
                .collect();
            let (beta, x) = solve_lozenge(&sizes, *r)?;
            ensure((beta * *r as f64 - spectral.alpha).abs() <= 1e-8, || {
                format!("beta r = {}, alpha = {}", beta * *r as f64, spectral.alpha)
            })?;
            ensure(x.iter().all(|&v| v > 0.0), || {
                format!("non-positive solution {x:?}")
            })
        });
    }
}

fn dependency_edges(h: &DependencyGraph) -> Vec<(AgentId, AgentId)> {
    let adj = h.adjacency();
    let nodes = h.nodes();
    let mut edges = Vec::new();
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if adj[i][j] {
                edges.push((nodes[i], nodes[j]));
            }
        }
    }
    edges
}

fn degree_bounds(h: &DependencyGraph, spectral: &SpectralLift) -> Outcome {
    for (component, &alpha) in spectral.components.iter().zip(&spectral.component_alphas) {
        let degrees: Vec<usize> = component
            .iter()
            .map(|&u| component.iter().filter(|&&v| h.is_adjacent(u, v)).count())
            .collect();
        let avg = degrees.iter().sum::<usize>() as f64 / degrees.len() as f64;
        let max = degrees.iter().copied().max().unwrap_or(0) as f64;
        ensure(avg - 1e-9 <= alpha && alpha <= max + 1e-9, || {
            format!("component {component:?}: alpha {alpha} outside [{avg}, {max}]")
        })?;
        let top = spectral
            .nodes
            .iter()
            .zip(&spectral.weights)
            .filter(|(v, _)| component.contains(v))
            .map(|(_, &w)| w)
            .fold(0.0, f64::max);
        ensure((top - 1.0).abs() < 1e-12, || {
            format!("component {component:?}: top weight {top}")
        })?;
    }
    ensure(spectral.weights.iter().all(|&w| w > 0.0), || {
        "non-positive weight".into()
    })
}

/// Unilateral deviations tried for `agent`: scalings of its cost, extreme
/// bids, and bids just around its payment and thresholds.
fn deviations(costs: &[f64], agent: AgentId, honest: &MechanismOutcome) -> Vec<f64> {
    let c = costs[agent];
    let top = costs.iter().sum::<f64>() + 1.0;
    let mut out = vec![0.0, 0.5 * c, 1.5 * c + 0.5, 2.0 * c + 1.0, top];
    if let Some(d) = honest.details.iter().find(|d| d.agent == agent) {
        for t in [d.payment, d.t1.value(), d.t2.value()]
            .into_iter()
            .filter(|t| t.is_finite())
        {
            out.extend([t - 1e-3, t + 1e-3]);
        }
    }
    out.retain(|&b| b >= 0.0);
    out
}

fn mechanism_checks(c: &mut Checks, system: &SetSystem, costs: &[f64], kind: MechanismKind) {
    let name = kind.name();
    let run = |bids: &[f64]| run_mechanism(system, bids, kind);
    let honest = match run(costs) {
        Ok(o) => o,
        Err(e) => {
            c.run(format!("mechanism.{name}.runs"), || Err(e.into()));
            return;
        }
    };
    c.run(format!("mechanism.{name}.feasible-winners"), || {
        ensure(system.is_feasible(&honest.winners)?, || {
            format!("{:?} is infeasible", honest.winners)
        })
    });
    c.run(format!("mechanism.{name}.participation"), || {
        for d in &honest.details {
            let b = costs[d.agent];
            ensure(
                d.payment >= b - TOL && d.t1.value() >= b - TOL && d.t2.value() >= b - TOL,
                || format!("agent {} bids {b} but is paid {}", d.agent, d.payment),
            )?;
        }
        let stray = (0..costs.len()).find(|&a| !honest.is_winner(a) && honest.payments[a] != 0.0);
        ensure(stray.is_none(), || format!("loser {stray:?} is paid"))
    });
    c.run(format!("mechanism.{name}.truthfulness"), || {
        for agent in 0..costs.len() {
            let truthful = honest.utility(agent, costs[agent]);
            for bid in deviations(costs, agent, &honest) {
                let mut bids = costs.to_vec();
                bids[agent] = bid;
                let lying = run(&bids)?.utility(agent, costs[agent]);
                ensure(truthful >= lying - UTILITY_TOL, || {
                    format!("agent {agent}: bidding {bid} yields {lying} > {truthful}")
                })?;
            }
        }
        Ok(())
    });
    c.run(format!("mechanism.{name}.monotonicity"), || {
        for agent in (0..costs.len()).filter(|&a| !honest.is_winner(a)) {
            for bid in [
                1.5 * costs[agent] + 0.5,
                2.0 * costs[agent] + 1.0,
                4.0 * costs[agent] + 10.0,
            ] {
                let mut bids = costs.to_vec();
                bids[agent] = bid;
                ensure(!run(&bids)?.is_winner(agent), || {
                    format!("agent {agent} wins at the higher bid {bid}")
                })?;
            }
        }
        Ok(())
    });
    match (kind, system.kind()) {
        (MechanismKind::KPath, SystemKind::KPath { graph, k }) => {
            c.run("mechanism.kpath.bid-independence", || {
                let before = KPathPruner.prune(system, costs)?;
                for &agent in &before {
                    for bid in [0.0, 0.5 * costs[agent], 2.0 * costs[agent] + 1.0] {
                        let mut bids = costs.to_vec();
                        bids[agent] = bid;
                        let after = KPathPruner.prune(system, &bids)?;
                        if after.contains(&agent) {
                            ensure(after == before, || {
                                format!("agent {agent} at {bid}: {after:?} vs {before:?}")
                            })?;
                        }
                    }
                }
                Ok(())
            });
            c.run("mechanism.kpath.longest-path-bound", || {
                let pruned = cheapest_kplus1_subgraph(graph, costs, *k)?;
                let longest = longest_path_dag(graph, &pruned.edges, costs)?;
                let alpha = honest.alpha().unwrap_or(0.0);
                ensure(honest.total <= alpha * longest + TOL, || {
                    format!(
                        "payment {} > alpha {alpha} x longest {longest}",
                        honest.total
                    )
                })
            });
        }
        (
            MechanismKind::VertexCover | MechanismKind::VertexCoverApprox,
            SystemKind::VertexCover { graph },
        ) => {
            c.run(format!("mechanism.{name}.payment-bound"), || {
                let outside: f64 = (0..costs.len())
                    .filter(|&u| !honest.is_winner(u))
                    .map(|u| costs[u])
                    .sum();
                let alpha = honest.alpha().unwrap_or(0.0);
                ensure(honest.total <= alpha * outside + TOL, || {
                    format!("payment {} > alpha {alpha} x {outside}", honest.total)
                })
            });
            if kind == MechanismKind::VertexCoverApprox {
                c.run("mechanism.vertex-cover-approx.local-optimality", || {
                    let scaled = lifted(&honest, costs);
                    ensure(is_locally_optimal(graph, &scaled, &honest.winners), || {
                        format!("{:?} is not locally optimal", honest.winners)
                    })
                });
                c.run("mechanism.vertex-cover-approx.factor-two", || {
                    let scaled = lifted(&honest, costs);
                    let cost = |s: &[AgentId]| s.iter().map(|&v| scaled[v]).sum::<f64>();
                    let best = cost(&exact_cover(graph, &scaled)?);
                    ensure(cost(&honest.winners) <= 2.0 * best + 1e-9, || {
                        format!("cover cost {} > 2 x {best}", cost(&honest.winners))
                    })
                });
            }
        }
        _ => {}
    }
}

fn lifted(outcome: &MechanismOutcome, costs: &[f64]) -> Vec<f64> {
    match &outcome.lift {
        Some(l) => l.scaled_bids(costs),
        None => costs.to_vec(),
    }
}

fn same_outcome(a: &MechanismOutcome, b: &MechanismOutcome) -> Outcome {
    ensure(a.winners == b.winners, || {
        format!("winners {:?} vs {:?}", a.winners, b.winners)
    })?;
    let close = a
        .payments
        .iter()
        .zip(&b.payments)
        .all(|(x, y)| (x - y).abs() <= TOL);
    ensure(close, || {
        format!("payments {:?} vs {:?}", a.payments, b.payments)
    })
}

/// Groups as series paths between `s = 0` and `t = 1`, edges listed group by
/// group, with the agent behind each edge.
fn series_network(groups: &[Vec<AgentId>]) -> frugal_core::Result<(DiGraph, Vec<AgentId>)> {
    let mut edges = Vec::new();
    let mut agents = Vec::new();
    let mut next = 2;
    for g in groups {
        let mut u = 0;
        for (i, &a) in g.iter().enumerate() {
            let v = if i + 1 == g.len() {
                1
            } else {
                next += 1;
                next - 1
            };
            edges.push((u, v));
            agents.push(a);
            u = v;
        }
    }
    Ok((DiGraph::new(next, edges, 0, 1)?, agents))
}

fn coherence_checks(c: &mut Checks, system: &SetSystem, costs: &[f64]) {
    match system.kind() {
        SystemKind::KPath { graph, k } => {
            if *k == 1 {
                c.run("coherence.sqrt-equals-kpath", || {
                    same_outcome(
                        &kpath_mechanism(graph, costs, 1)?,
                        &sqrt_mechanism(graph, costs)?,
                    )
                });
            }
            c.run("coherence.kpath-thresholds", || {
                same_outcome(
                    &kpath_mechanism(graph, costs, *k)?,
                    &run_pruning_lifting(system, costs, &KPathPruner, &FlowSelector)?,
                )
            });
        }
        SystemKind::VertexCover { graph } => {
            c.run("coherence.vertex-cover-thresholds", || {
                same_outcome(
                    &vertex_cover_mechanism(graph, costs, CoverMode::Exact)?,
                    &run_pruning_lifting(system, costs, &NoPruning, &ExactCoverSelector)?,
                )?;
                same_outcome(
                    &vertex_cover_mechanism(graph, costs, CoverMode::Approx2)?,
                    &run_pruning_lifting(system, costs, &NoPruning, &Approx2CoverSelector)?,
                )
            });
        }
        SystemKind::ROutOfK { groups, r } => {
            c.run("coherence.r-out-of-k-thresholds", || {
                same_outcome(
                    &r_out_of_k_mechanism(groups, costs, *r)?,
                    &run_pruning_lifting(system, costs, &GroupPruner, &GroupSelector)?,
                )
            });
            c.run("coherence.r-out-of-k-equals-kpath", || {
                let (g, agents) = series_network(groups)?;
                let edge_costs: Vec<f64> = agents.iter().map(|&a| costs[a]).collect();
                let paths = kpath_mechanism(&g, &edge_costs, *r)?;
                let direct = r_out_of_k_mechanism(groups, costs, *r)?;
                let mut winners: Vec<AgentId> = paths.winners.iter().map(|&e| agents[e]).collect();
                winners.sort_unstable();
                ensure(winners == direct.winners, || {
                    format!("winners {winners:?} vs {:?}", direct.winners)
                })?;
                for (e, &a) in agents.iter().enumerate() {
                    ensure(
                        (paths.payments[e] - direct.payments[a]).abs() <= TOL,
                        || format!("agent {a}: {} vs {}", paths.payments[e], direct.payments[a]),
                    )?;
                }
                Ok(())
            });
        }
        _ => {}
    }
}

fn benchmark_checks(c: &mut Checks, system: &SetSystem, costs: &[f64], cap: usize) {
    let mut bench: Option<BenchmarkValue> = None;
    c.run("benchmarks.oracles", || {
        bench = Some(compute_benchmarks(system, costs, cap)?);
        Ok(())
    });
    let Some(bench) = bench else { return };
    c.run("benchmarks.nu-le-mu", || {
        ensure(bench.nu <= bench.mu + TOL, || {
            format!("nu {} > mu {}", bench.nu, bench.mu)
        })
    });
    c.run("benchmarks.witness-validity", || {
        let nu = witness_violation(
            system,
            costs,
            &bench.reference,
            &bench.nu_witness,
            &bench.tight_sets,
            cap,
        )?;
        let mu = witness_violation(system, costs, &bench.reference, &bench.mu_witness, &[], cap)?;
        ensure(nu <= TOL && mu <= TOL, || {
            format!("violations nu {nu:e}, mu {mu:e}")
        })?;
        let covered = bench
            .reference
            .iter()
            .all(|e| bench.tight_sets.iter().any(|t| !t.contains(e)));
        ensure(covered, || {
            "tight sets do not cover the reference set".into()
        })
    });
    match system.kind() {
        SystemKind::KPath { graph, k } => {
            let kf = *k as f64;
            c.run("benchmarks.nu-lower-bound", || {
                let lower = nu_lower_kpath(graph, costs, *k, cap)?;
                ensure(bench.nu >= lower - TOL, || {
                    format!("nu {} < k delta {lower}", bench.nu)
                })
            });
            c.run("benchmarks.mu-lower-bound", || {
                let lower = mu_lower_flow(graph, costs, *k)?;
                ensure(bench.mu >= lower - TOL, || {
                    format!("mu {} < {lower}", bench.mu)
                })
            });
            c.run("benchmarks.kpath-ratio-bounds", || {
                let payment = kpath_mechanism(graph, costs, *k)?.total;
                let (alpha, _) = alpha_kplus1(graph, *k, cap)?;
                ensure(payment <= alpha * (kf + 1.0) / kf * bench.nu + TOL, || {
                    format!(
                        "payment {payment} above the nu bound (alpha {alpha}, nu {})",
                        bench.nu
                    )
                })?;
                ensure(payment <= alpha / kf * bench.mu + TOL, || {
                    format!(
                        "payment {payment} above the mu bound (alpha {alpha}, mu {})",
                        bench.mu
                    )
                })
            });
            c.run("benchmarks.shortest-path-witness", || {
                let flow = verify_shortest_path_flow(graph, &bench.nu_witness, *k);
                ensure(flow.as_ref().is_some_and(|f| f.size == k + 1), || {
                    "nu witness has no (k+1)-flow of equal shortest paths".into()
                })
            });
        }
        SystemKind::VertexCover { graph } => {
            c.run("benchmarks.cover-payment-vs-nu", || {
                for mode in [CoverMode::Exact, CoverMode::Approx2] {
                    let out = vertex_cover_mechanism(graph, costs, mode)?;
                    let alpha = out.alpha().unwrap_or(0.0);
                    ensure(out.total <= alpha * bench.nu + TOL, || {
                        format!(
                            "{mode:?}: payment {} > alpha {alpha} x nu {}",
                            out.total, bench.nu
                        )
                    })?;
                }
                Ok(())
            });
            c.run("benchmarks.single-agent-clique-bound", || {
                clique_bound(graph, cap)
            });
        }
        _ => {}
    }
}

/// `nu(x c_v) <= x (rho_v - 1)` where `c_v` is 1 on `v` and 0 elsewhere.
fn clique_bound(graph: &UGraph, cap: usize) -> Outcome {
    let n = graph.n_vertices();
    skip_unless(n <= CLIQUE_CHECK_VERTICES, || format!("{n} vertices"))?;
    let system = SetSystem::vertex_cover(graph.clone())?;
    for v in (0..n).filter(|&v| graph.degree(v) > 0) {
        let rho = rho_v(graph, v)? as f64;
        for x in [0.5, 1.0, 2.0] {
            let mut costs = vec![0.0; n];
            costs[v] = x;
            let nu = frugal_core::benchmarks::compute_nu(&system, &costs, cap)?
                .0
                .value;
            ensure(nu <= x * (rho - 1.0) + TOL, || {
                format!("v {v}, x {x}: nu {nu} > {}", x * (rho - 1.0))
            })?;
        }
    }
    Ok(())
}

fn lp_checks(c: &mut Checks, system: &SetSystem, costs: &[f64], cap: usize) {
    c.run("lp.determinism", || {
        let a = compute_mu(system, costs, cap)?;
        let b = compute_mu(system, costs, cap)?;
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        ensure(
            a.value.to_bits() == b.value.to_bits() && bits(&a.witness) == bits(&b.witness),
            || "repeated solves differ".into(),
        )
    });
    c.run("lp.weak-duality", || {
        let mu = compute_mu(system, costs, cap)?.value;
        let sets = system.minimal_feasible_sets(cap)?;
        let reference = frugal_core::benchmarks::reference_set(system, costs, cap)?;
        let mut bound = 0.0;
        for &e in &reference {
            let cheapest = sets
                .iter()
                .filter(|t| !t.contains(&e))
                .map(|t| {
                    t.iter()
                        .filter(|a| !reference.contains(a))
                        .map(|&a| costs[a])
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min);
            bound += cheapest;
        }
        ensure(mu <= bound + TOL, || {
            format!("mu {mu} exceeds the dual bound {bound}")
        })
    });
}
