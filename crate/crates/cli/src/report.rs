//! Report files written by `run` and `benchmark`.

use frugal_core::benchmarks::{
    compute_benchmarks, frugality_report, mu_lower_flow, nu_lower_kpath, probe_payments,
    FrugalityReport,
};
use frugal_core::mechanisms::{run_mechanism, MechanismKind, MechanismOutcome, Threshold};
use frugal_core::{AgentId, SetSystem, SystemKind};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::instance::Instance;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub version: u32,
    pub records: Vec<RunRecord>,
}

/// One mechanism run on one instance. Ratios sit next to the benchmark
/// values they divide; all benchmark fields are absent when the oracles did
/// not run (see `note`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_digest: String,
    pub mechanism: String,
    /// `k` for k-path systems, `r` for r-out-of-k systems.
    pub k: Option<usize>,
    pub winners: Vec<AgentId>,
    pub payments: Vec<PaymentRecord>,
    pub total: f64,
    /// Eigenvalue of the lift used by the run.
    pub lift_alpha: Option<f64>,
    /// Eigenvalue the bound lines are stated in.
    pub alpha: Option<f64>,
    pub nu: Option<f64>,
    pub mu: Option<f64>,
    /// `total / nu`; absent when `nu` is zero.
    pub ratio_nu: Option<f64>,
    /// `total / mu`; absent when `mu` is zero.
    pub ratio_mu: Option<f64>,
    pub bound_nu: Option<f64>,
    pub bound_mu: Option<f64>,
    pub lower_reference: Option<f64>,
    pub violation: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaymentRecord {
    pub agent: AgentId,
    pub bid: f64,
    /// Pruning threshold; absent when unbounded.
    pub t1: Option<f64>,
    /// Selection threshold; absent when unbounded.
    pub t2: Option<f64>,
    pub payment: f64,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn threshold(t: Threshold) -> Option<f64> {
    match t {
        Threshold::Finite(v) => Some(v),
        Threshold::Unbounded => None,
    }
}

/// `k` for k-path systems and `r` for r-out-of-k systems.
pub fn size_parameter(system: &SetSystem) -> Option<usize> {
    match system.kind() {
        SystemKind::KPath { k, .. } => Some(*k),
        SystemKind::ROutOfK { r, .. } => Some(*r),
        _ => None,
    }
}

/// Mechanisms that apply to the system, the baseline last.
pub fn default_mechanisms(system: &SetSystem) -> Vec<MechanismKind> {
    match system.kind() {
        SystemKind::KPath { k: 1, .. } => vec![
            MechanismKind::KPath,
            MechanismKind::Sqrt,
            MechanismKind::Vcg,
        ],
        SystemKind::KPath { .. } => vec![MechanismKind::KPath, MechanismKind::Vcg],
        SystemKind::VertexCover { .. } => vec![
            MechanismKind::VertexCover,
            MechanismKind::VertexCoverApprox,
            MechanismKind::Vcg,
        ],
        SystemKind::ROutOfK { .. } => vec![MechanismKind::ROutOfK, MechanismKind::Vcg],
        _ => vec![MechanismKind::Vcg],
    }
}

fn record(
    instance: &Instance,
    outcome: &MechanismOutcome,
    report: Option<&FrugalityReport>,
    note: Option<String>,
) -> RunRecord {
    let bids = instance.costs();
    RunRecord {
        instance_digest: instance.digest(),
        mechanism: outcome.mechanism.to_string(),
        k: size_parameter(&instance.system),
        winners: outcome.winners.clone(),
        payments: outcome
            .details
            .iter()
            .map(|d| PaymentRecord {
                agent: d.agent,
                bid: bids[d.agent],
                t1: threshold(d.t1),
                t2: threshold(d.t2),
                payment: d.payment,
            })
            .collect(),
        total: outcome.total,
        lift_alpha: outcome.alpha(),
        alpha: report.and_then(|r| r.alpha),
        nu: report.map(|r| r.nu),
        mu: report.map(|r| r.mu),
        ratio_nu: report.and_then(|r| finite(r.ratio_nu)),
        ratio_mu: report.and_then(|r| finite(r.ratio_mu)),
        bound_nu: report.and_then(|r| r.bound_nu),
        bound_mu: report.and_then(|r| r.bound_mu),
        lower_reference: report.and_then(|r| r.lower_reference),
        violation: report.is_some_and(|r| r.violation),
        note: note.or_else(|| report.and_then(|r| r.note.clone())),
    }
}

/// Runs every mechanism in `kinds` on the instance's costs. With
/// `benchmarks` set the oracles run once and every record carries ratios;
/// an oracle failure is recorded in `note` instead of failing the run.
pub fn run_records(
    instance: &Instance,
    kinds: &[MechanismKind],
    benchmarks: bool,
    cap: usize,
) -> Result<Vec<RunRecord>> {
    let outcomes = kinds
        .iter()
        .map(|&kind| run_mechanism(&instance.system, instance.costs(), kind))
        .collect::<frugal_core::Result<Vec<_>>>()?;
    let (reports, note) = if benchmarks {
        match frugality_report(&instance.system, instance.costs(), kinds, cap) {
            Ok(reports) => (Some(reports), None),
            Err(e) => (None, Some(format!("benchmarks unavailable: {e}"))),
        }
    } else {
        (None, None)
    };
    Ok(outcomes
        .iter()
        .enumerate()
        .map(|(i, outcome)| {
            record(
                instance,
                outcome,
                reports.as_ref().map(|r| &r[i]),
                note.clone(),
            )
        })
        .collect())
}

/// Output of the `benchmark` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkFile {
    pub version: u32,
    pub instance_digest: String,
    pub reference: Vec<AgentId>,
    pub nu: f64,
    pub mu: f64,
    pub nu_witness: Vec<f64>,
    pub mu_witness: Vec<f64>,
    pub tight_sets: Vec<Vec<AgentId>>,
    /// `k * delta_{k+1}`, a lower bound on `nu`; k-path systems only.
    pub nu_lower: Option<f64>,
    /// `k * (C(k+1) - C(k))`, a lower bound on `mu`; k-path systems only.
    pub mu_lower: Option<f64>,
    pub probe: Option<ProbeRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub mechanism: String,
    pub grid: usize,
    pub rows: Vec<ProbeRowRecord>,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRowRecord {
    pub agent: AgentId,
    pub x: f64,
    pub payment: f64,
    pub alpha_x: Option<f64>,
    pub nu: Option<f64>,
}

/// Computes both benchmarks and, with `probe` set, the probe table of the
/// given mechanism on a grid of that resolution.
pub fn benchmark_file(
    instance: &Instance,
    probe: Option<(MechanismKind, usize)>,
    cap: usize,
) -> Result<BenchmarkFile> {
    let system = &instance.system;
    let costs = instance.costs();
    let bench = compute_benchmarks(system, costs, cap)?;
    let (nu_lower, mu_lower) = match system.kind() {
        SystemKind::KPath { graph, k } => (
            Some(nu_lower_kpath(graph, costs, *k, cap)?),
            Some(mu_lower_flow(graph, costs, *k)?),
        ),
        _ => (None, None),
    };
    let probe = match probe {
        Some((kind, grid)) => {
            let table = probe_payments(system, &bench.reference, kind, grid, Some(cap))?;
            Some(ProbeRecord {
                mechanism: table.mechanism.to_string(),
                grid,
                rows: table
                    .rows
                    .iter()
                    .map(|r| ProbeRowRecord {
                        agent: r.agent,
                        x: r.x,
                        payment: r.payment,
                        alpha_x: r.alpha_x,
                        nu: r.nu,
                    })
                    .collect(),
                max_ratio: table.max_ratio,
            })
        }
        None => None,
    };
    Ok(BenchmarkFile {
        version: REPORT_VERSION,
        instance_digest: instance.digest(),
        reference: bench.reference,
        nu: bench.nu,
        mu: bench.mu,
        nu_witness: bench.nu_witness,
        mu_witness: bench.mu_witness,
        tight_sets: bench.tight_sets,
        nu_lower,
        mu_lower,
        probe,
    })
}
