use crate::benchmarks::{alpha_kplus1, compute_benchmarks, compute_nu, rho_v};
use crate::error::{Error, Result};
use crate::mechanisms::{run_mechanism, MechanismKind};
use crate::system::{AgentId, SetSystem, SystemKind};
use crate::EPS;

/// Payment of one mechanism against both benchmarks, with the applicable
/// upper bounds on the ratios and a lower reference line for the best
/// achievable ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct FrugalityReport {
    pub mechanism: &'static str,
    pub payment: f64,
    pub nu: f64,
    pub mu: f64,
    /// `payment / nu`; infinite when `nu` is zero.
    pub ratio_nu: f64,
    /// `payment / mu`; infinite when `mu` is zero.
    pub ratio_mu: f64,
    /// Eigenvalue the bounds are stated in (`alpha_{k+1}` for k-path
    /// mechanisms, the lift eigenvalue otherwise).
    pub alpha: Option<f64>,
    pub bound_nu: Option<f64>,
    pub bound_mu: Option<f64>,
    /// No truthful mechanism has a smaller worst-case `nu` ratio on this
    /// system family (`alpha / rho` for vertex cover, `alpha_{k+1} / k` for
    /// k-path).
    pub lower_reference: Option<f64>,
    pub violation: bool,
    pub note: Option<String>,
}

fn ratio(payment: f64, benchmark: f64) -> f64 {
    if benchmark <= EPS {
        f64::INFINITY
    } else {
        payment / benchmark
    }
}

fn exceeds(ratio: f64, bound: Option<f64>) -> bool {
    match bound {
        Some(b) if ratio.is_finite() => ratio > b * (1.0 + 1e-9) + 1e-7,
        _ => false,
    }
}

/// Runs every mechanism in `kinds` on `costs` and compares its payment with
/// the benchmarks.
pub fn frugality_report(
    system: &SetSystem,
    costs: &[f64],
    kinds: &[MechanismKind],
    cap: usize,
) -> Result<Vec<FrugalityReport>> {
    let bench = compute_benchmarks(system, costs, cap)?;
    let alpha_k1 = match system.kind() {
        SystemKind::KPath { graph, k } => Some((alpha_kplus1(graph, *k, cap)?.0, *k as f64)),
        _ => None,
    };
    let mut reports = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let outcome = run_mechanism(system, costs, kind)?;
        let lift_alpha = outcome.alpha();
        let (alpha, bound_nu, bound_mu, lower_reference) = match (kind, system.kind()) {
            (MechanismKind::KPath | MechanismKind::Sqrt, _) => {
                let (a, k) = alpha_k1.expect("k-path system");
                (Some(a), Some(a * (k + 1.0) / k), Some(a / k), Some(a / k))
            }
            (
                MechanismKind::VertexCover | MechanismKind::VertexCoverApprox,
                SystemKind::VertexCover { graph },
            ) => {
                let a = lift_alpha.expect("lifted mechanism");
                let rho = (0..graph.n_vertices())
                    .map(|v| rho_v(graph, v))
                    .collect::<Result<Vec<_>>>()?;
                let rho = rho.into_iter().max().unwrap_or(1) as f64;
                (Some(a), Some(a), None, Some(a / rho))
            }
            (MechanismKind::ROutOfK, SystemKind::ROutOfK { r, .. }) => {
                let beta = lift_alpha.expect("lifted mechanism") / *r as f64;
                (lift_alpha, Some(beta), None, Some(beta))
            }
            _ => (lift_alpha, None, None, None),
        };
        let ratio_nu = ratio(outcome.total, bench.nu);
        let ratio_mu = ratio(outcome.total, bench.mu);
        let note = (bench.nu <= EPS).then(|| "nu is zero; ratios reported as infinite".to_string());
        reports.push(FrugalityReport {
            mechanism: kind.name(),
            payment: outcome.total,
            nu: bench.nu,
            mu: bench.mu,
            ratio_nu,
            ratio_mu,
            alpha,
            bound_nu,
            bound_mu,
            lower_reference,
            violation: exceeds(ratio_nu, bound_nu) || exceeds(ratio_mu, bound_mu),
            note,
        });
    }
    Ok(reports)
}

/// The probe cost vector: `x` on `agent`, zero on the rest of `reference`,
/// and `n + 1` on every other agent.
pub fn probe_costs(n_agents: usize, reference: &[AgentId], agent: AgentId, x: f64) -> Vec<f64> {
    let mut costs = vec![(n_agents + 1) as f64; n_agents];
    for &e in reference {
        costs[e] = 0.0;
    }
    costs[agent] = x;
    costs
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub agent: AgentId,
    pub x: f64,
    pub payment: f64,
    /// Lift eigenvalue of the run times `x`; absent for VCG.
    pub alpha_x: Option<f64>,
    /// Oracle value of `nu` on the probe costs, when requested.
    pub nu: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeTable {
    pub mechanism: &'static str,
    pub rows: Vec<ProbeRow>,
    /// Largest `payment / x` over all rows.
    pub max_ratio: f64,
}

/// Runs `kind` on the probe costs for every agent of `reference` and every
/// `x = i / grid`, `i = 1..=grid`. With `nu_cap` set, `nu` is computed by
/// the oracle for every row.
pub fn probe_payments(
    system: &SetSystem,
    reference: &[AgentId],
    kind: MechanismKind,
    grid: usize,
    nu_cap: Option<usize>,
) -> Result<ProbeTable> {
    if grid == 0 {
        return Err(Error::InvalidInstance(
            "probe grid needs at least one point".into(),
        ));
    }
    let n = system.n_agents();
    let mut rows = Vec::new();
    for &agent in reference {
        for i in 1..=grid {
            let x = i as f64 / grid as f64;
            let costs = probe_costs(n, reference, agent, x);
            let outcome = run_mechanism(system, &costs, kind)?;
            let nu = match nu_cap {
                Some(cap) => Some(compute_nu(system, &costs, cap)?.0.value),
                None => None,
            };
            rows.push(ProbeRow {
                agent,
                x,
                payment: outcome.total,
                alpha_x: outcome.alpha().map(|a| a * x),
                nu,
            });
        }
    }
    let max_ratio = rows.iter().map(|r| r.payment / r.x).fold(0.0, f64::max);
    Ok(ProbeTable {
        mechanism: kind.name(),
        rows,
        max_ratio,
    })
}
