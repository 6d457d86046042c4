//! Per-seed reports, aggregate rows, and their JSON/CSV emission.

use crate::graph_io::atomic_write;
use crate::{CliError, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Flat record of one regression fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitRecord {
    pub method: String,
    pub beta: Vec<f64>,
    pub intercept: f64,
    pub bounds: Option<Vec<f64>>,
    pub l1_radius: Option<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub warnings: Vec<String>,
}

impl FitRecord {
    pub fn from_fit(fit: &lggnn_core::regress::RegressionFit) -> Self {
        let (bounds, l1_radius) = match fit.space.as_ref().map(|s| s.mode()) {
            Some(lggnn_core::regress::SpaceMode::Box { half_widths }) => {
                (Some(half_widths.clone()), None)
            }
            Some(lggnn_core::regress::SpaceMode::L1Ball { radius }) => (None, Some(*radius)),
            None => (None, None),
        };
        FitRecord {
            method: match fit.method {
                lggnn_core::regress::FitMethod::BoxProjectedGradient => "box_pg".to_string(),
                lggnn_core::regress::FitMethod::Pls { components } => {
                    format!("pls({components})")
                }
            },
            beta: fit.beta.clone(),
            intercept: fit.intercept,
            bounds,
            l1_radius,
            objective: fit.objective,
            iterations: fit.iterations,
            converged: fit.converged,
            warnings: fit.warnings.clone(),
        }
    }
}

/// Metrics of one seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedMetrics {
    /// `None` when the test universe held one class only.
    pub auc_roc: Option<f64>,
    pub cross_entropy: f64,
    pub hits: Vec<(usize, f64)>,
    pub hits_shortfall: bool,
    pub prob_ratio: Vec<(usize, f64)>,
    pub e_rank: Option<bool>,
}

/// Everything recorded for one seed of one experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedReport {
    pub seed: u64,
    pub n: usize,
    pub rho: f64,
    pub dim: usize,
    pub layers: usize,
    pub method: String,
    pub protocol: String,
    pub model: String,
    pub test_positives: usize,
    pub test_negatives: usize,
    /// Set when the test universe was subsampled (value = kept pairs).
    pub subsampled_to: Option<usize>,
    pub metrics: Option<SeedMetrics>,
    pub fit: Option<FitRecord>,
    /// Stage failure, recorded instead of metrics when a stage errored.
    pub failure: Option<String>,
}

/// Mean and sample standard deviation of one metric across seeds.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    pub sd: f64,
}

pub fn aggregate(values: &[f64]) -> Aggregate {
    let n = values.len();
    if n == 0 {
        return Aggregate { mean: f64::NAN, sd: f64::NAN };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let sd = if n < 2 {
        0.0
    } else {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (n - 1) as f64).sqrt()
    };
    Aggregate { mean, sd }
}

/// Aggregate row across seeds; mean +- sample sd per metric, recomputable
/// from the retained per-seed values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRow {
    pub name: String,
    pub model: String,
    pub method: String,
    pub protocol: String,
    pub n: usize,
    pub rho: f64,
    pub layers: usize,
    pub dim: usize,
    pub holdout_p: f64,
    pub seeds: Vec<u64>,
    pub auc: Option<Aggregate>,
    pub cross_entropy: Aggregate,
    pub hits: Vec<(usize, Aggregate)>,
    pub prob_ratio: Vec<(usize, Aggregate)>,
    /// Fraction of seeds where the perfect-ranking event held.
    pub e_rank_fraction: Option<f64>,
    pub per_seed: Vec<SeedReport>,
    pub failures: usize,
}

impl ResultRow {
    pub fn from_seed_reports(name: &str, reports: Vec<SeedReport>) -> Result<ResultRow> {
        let ok: Vec<&SeedReport> = reports.iter().filter(|r| r.metrics.is_some()).collect();
        if ok.is_empty() {
            return Err(CliError::runtime(format!(
                "experiment `{name}`: every seed failed: {}",
                reports
                    .iter()
                    .filter_map(|r| r.failure.clone())
                    .collect::<Vec<_>>()
                    .join("; ")
            )));
        }
        let first = ok[0];
        let metric = |f: &dyn Fn(&SeedMetrics) -> f64| -> Vec<f64> {
            ok.iter().map(|r| f(r.metrics.as_ref().unwrap())).collect()
        };
        let auc_values: Vec<f64> = ok
            .iter()
            .filter_map(|r| r.metrics.as_ref().unwrap().auc_roc)
            .collect();
        let auc = if auc_values.is_empty() { None } else { Some(aggregate(&auc_values)) };
        let cross_entropy = aggregate(&metric(&|m| m.cross_entropy));
        let first_metrics = first.metrics.as_ref().unwrap();
        let mut hits = Vec::new();
        for (idx, &(k, _)) in first_metrics.hits.iter().enumerate() {
            hits.push((k, aggregate(&metric(&|m| m.hits[idx].1))));
        }
        let mut prob_ratio = Vec::new();
        for (idx, &(k, _)) in first_metrics.prob_ratio.iter().enumerate() {
            prob_ratio.push((k, aggregate(&metric(&|m| m.prob_ratio[idx].1))));
        }
        let e_rank_fraction = if first_metrics.e_rank.is_some() {
            let hits = ok
                .iter()
                .filter(|r| r.metrics.as_ref().unwrap().e_rank == Some(true))
                .count();
            Some(hits as f64 / ok.len() as f64)
        } else {
            None
        };
        Ok(ResultRow {
            name: name.to_string(),
            model: first.model.clone(),
            method: first.method.clone(),
            protocol: first.protocol.clone(),
            n: first.n,
            rho: first.rho,
            layers: first.layers,
            dim: first.dim,
            holdout_p: 0.0,
            seeds: reports.iter().map(|r| r.seed).collect(),
            auc,
            cross_entropy,
            hits,
            prob_ratio,
            e_rank_fraction,
            failures: reports.len() - ok.len(),
            per_seed: reports,
        })
    }

    /// Fixed-order CSV header for this row's metric set.
    pub fn csv_header(&self) -> String {
        let mut cols = vec![
            "name", "model", "method", "protocol", "n", "rho", "layers", "dim", "holdout_p",
            "seeds",
        ]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
        cols.push("auc_mean".into());
        cols.push("auc_sd".into());
        cols.push("cross_entropy_mean".into());
        cols.push("cross_entropy_sd".into());
        for (k, _) in &self.hits {
            cols.push(format!("hits@{k}_mean"));
            cols.push(format!("hits@{k}_sd"));
        }
        for (k, _) in &self.prob_ratio {
            cols.push(format!("pratio@{k}_mean"));
            cols.push(format!("pratio@{k}_sd"));
        }
        cols.push("e_rank_fraction".into());
        cols.push("failures".into());
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols = vec![
            self.name.clone(),
            self.model.clone(),
            self.method.clone(),
            self.protocol.clone(),
            self.n.to_string(),
            format!("{}", self.rho),
            self.layers.to_string(),
            self.dim.to_string(),
            format!("{}", self.holdout_p),
            format!(
                "{}",
                self.seeds.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("|")
            ),
        ];
        let push_agg = |cols: &mut Vec<String>, a: &Aggregate| {
            cols.push(format!("{}", a.mean));
            cols.push(format!("{}", a.sd));
        };
        match &self.auc {
            Some(a) => push_agg(&mut cols, a),
            None => {
                cols.push(String::new());
                cols.push(String::new());
            }
        }
        push_agg(&mut cols, &self.cross_entropy);
        for (_, a) in &self.hits {
            push_agg(&mut cols, a);
        }
        for (_, a) in &self.prob_ratio {
            push_agg(&mut cols, a);
        }
        cols.push(match self.e_rank_fraction {
            Some(f) => format!("{f}"),
            None => String::new(),
        });
        cols.push(self.failures.to_string());
        cols.join(",")
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::runtime(format!("serialize result row: {e}")))?;
        atomic_write(path, text.as_bytes())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let text = format!("{}\n{}\n", self.csv_header(), self.csv_row());
        atomic_write(path, text.as_bytes())
    }
}

pub fn write_seed_report(report: &SeedReport, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::runtime(format!("serialize seed report: {e}")))?;
    atomic_write(path, text.as_bytes())
}
