//! Experiment sweeps: generate instances, run mechanisms, compare payments
//! with the benchmarks and aggregate ratio tables.

use std::io::Write;

use frugal_core::mechanisms::MechanismKind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::generate::{generate, instance_seeds, Generator};
use crate::report::{default_mechanisms, run_records, RunRecord, REPORT_VERSION};

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 11] = [
    "instance_digest",
    "mechanism",
    "k",
    "alpha",
    "payment",
    "nu",
    "mu",
    "ratio_nu",
    "ratio_mu",
    "bound_nu",
    "bound_mu",
];

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub generator: Generator,
    pub count: usize,
    pub seed: u64,
    /// Mechanisms to run; the primary mechanism of the generated system
    /// when absent.
    pub mechanisms: Option<Vec<MechanismKind>>,
    pub cap: usize,
}

/// One CSV row. Empty cells mark values that do not apply or are
/// undefined (a ratio over a zero benchmark).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub instance_digest: String,
    pub mechanism: String,
    pub k: Option<usize>,
    pub alpha: Option<f64>,
    pub payment: f64,
    pub nu: Option<f64>,
    pub mu: Option<f64>,
    pub ratio_nu: Option<f64>,
    pub ratio_mu: Option<f64>,
    pub bound_nu: Option<f64>,
    pub bound_mu: Option<f64>,
}

impl From<&RunRecord> for ExperimentRow {
    fn from(r: &RunRecord) -> Self {
        ExperimentRow {
            instance_digest: r.instance_digest.clone(),
            mechanism: r.mechanism.clone(),
            k: r.k,
            alpha: r.alpha,
            payment: r.total,
            nu: r.nu,
            mu: r.mu,
            ratio_nu: r.ratio_nu,
            ratio_mu: r.ratio_mu,
            bound_nu: r.bound_nu,
            bound_mu: r.bound_mu,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanismSummary {
    pub mechanism: String,
    pub runs: usize,
    pub max_ratio_nu: Option<f64>,
    pub max_ratio_mu: Option<f64>,
    pub violations: usize,
}

/// Structured report of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub version: u32,
    pub generator: String,
    pub seed: u64,
    pub count: usize,
    pub violations: usize,
    pub summary: Vec<MechanismSummary>,
    pub records: Vec<RunRecord>,
}

impl ExperimentReport {
    pub fn rows(&self) -> Vec<ExperimentRow> {
        self.records.iter().map(ExperimentRow::from).collect()
    }
}

/// Runs the sweep. Instances run in parallel; records come back in
/// instance order, so the output depends only on the configuration.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let seeds = instance_seeds(config.seed, config.count);
    let per_instance = seeds
        .par_iter()
        .map(|&seed| {
            let instance = generate(&config.generator, seed)?.validate()?;
            let kinds = config
                .mechanisms
                .clone()
                .unwrap_or_else(|| vec![default_mechanisms(&instance.system)[0]]);
            log::debug!("instance {} (seed {seed})", instance.digest());
            run_records(&instance, &kinds, true, config.cap)
        })
        .collect::<Result<Vec<_>>>()?;
    let records: Vec<RunRecord> = per_instance.into_iter().flatten().collect();

    let mut summary: Vec<MechanismSummary> = Vec::new();
    for r in &records {
        let entry = match summary.iter_mut().position(|s| s.mechanism == r.mechanism) {
            Some(i) => &mut summary[i],
            None => {
                summary.push(MechanismSummary {
                    mechanism: r.mechanism.clone(),
                    runs: 0,
                    max_ratio_nu: None,
                    max_ratio_mu: None,
                    violations: 0,
                });
                summary.last_mut().expect("just pushed")
            }
        };
        entry.runs += 1;
        entry.max_ratio_nu = max_opt(entry.max_ratio_nu, r.ratio_nu);
        entry.max_ratio_mu = max_opt(entry.max_ratio_mu, r.ratio_mu);
        entry.violations += usize::from(r.violation);
    }
    Ok(ExperimentReport {
        version: REPORT_VERSION,
        generator: config.generator.describe(),
        seed: config.seed,
        count: config.count,
        violations: records.iter().filter(|r| r.violation).count(),
        summary,
        records,
    })
}

fn max_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

pub fn write_csv(rows: &[ExperimentRow], out: impl Write) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    let fail = |e: csv::Error| CliError::Serialize(e.to_string());
    writer.write_record(CSV_COLUMNS).map_err(fail)?;
    for row in rows {
        writer.serialize(row).map_err(fail)?;
    }
    writer
        .flush()
        .map_err(|e| CliError::Serialize(e.to_string()))
}
