//! Plain-text plot-data tables consumable by generic plotting tools.

use crate::graph_io::atomic_write;
use crate::report::ResultRow;
use crate::runner::SpreadReport;
use crate::{CliError, Result};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    MetricVsN,
    SpreadVsN,
    Histogram,
}

impl PlotKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "metric_vs_n" => Ok(PlotKind::MetricVsN),
            "spread_vs_n" => Ok(PlotKind::SpreadVsN),
            "histogram" => Ok(PlotKind::Histogram),
            other => Err(CliError::config(format!(
                "unknown plot kind `{other}` (metric_vs_n | spread_vs_n | histogram)"
            ))),
        }
    }
}

/// Emit the requested table from input files to `out`.
pub fn emit_plot_data(kind: PlotKind, inputs: &[std::path::PathBuf], out: &Path) -> Result<()> {
    let table = match kind {
        PlotKind::MetricVsN => metric_vs_n(inputs)?,
        PlotKind::SpreadVsN => spread_vs_n(inputs)?,
        PlotKind::Histogram => histogram(inputs)?,
    };
    atomic_write(out, table.as_bytes())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("cannot parse {}: {e}", path.display())))
}

/// One row per report, x = n, columns = metric means. All reports must share
/// model/method/protocol/layers and differ in n.
pub fn metric_vs_n(inputs: &[std::path::PathBuf]) -> Result<String> {
    if inputs.is_empty() {
        return Err(CliError::config("metric_vs_n needs at least one result row"));
    }
    let mut rows: Vec<ResultRow> = inputs.iter().map(|p| read_json(p)).collect::<Result<_>>()?;
    let first = &rows[0];
    for row in &rows[1..] {
        if row.model != first.model
            || row.method != first.method
            || row.protocol != first.protocol
            || row.layers != first.layers
        {
            return Err(CliError::config(
                "inconsistent sweep axis: reports differ in more than n",
            ));
        }
    }
    rows.sort_by_key(|r| r.n);
    for pair in rows.windows(2) {
        if pair[0].n == pair[1].n {
            return Err(CliError::config("inconsistent sweep axis: duplicate n"));
        }
    }
    let mut header = vec!["n".to_string(), "auc".into(), "cross_entropy".into()];
    for (k, _) in &rows[0].hits {
        header.push(format!("hits@{k}"));
    }
    for (k, _) in &rows[0].prob_ratio {
        header.push(format!("pratio@{k}"));
    }
    let mut out = format!("# {}\n", header.join(" "));
    for row in &rows {
        let auc = row.auc.map_or(f64::NAN, |a| a.mean);
        let mut cols = vec![row.n.to_string(), fmt(auc), fmt(row.cross_entropy.mean)];
        for (_, a) in &row.hits {
            cols.push(fmt(a.mean));
        }
        for (_, a) in &row.prob_ratio {
            cols.push(fmt(a.mean));
        }
        out.push_str(&cols.join(" "));
        out.push('\n');
    }
    Ok(out)
}

/// One row per report, x = n, columns = per-layer aggregation spreads.
pub fn spread_vs_n(inputs: &[std::path::PathBuf]) -> Result<String> {
    if inputs.is_empty() {
        return Err(CliError::config("spread_vs_n needs at least one spread report"));
    }
    let mut rows: Vec<SpreadReport> = inputs.iter().map(|p| read_json(p)).collect::<Result<_>>()?;
    let layers = rows[0].layers;
    if rows.iter().any(|r| r.layers != layers) {
        return Err(CliError::config("inconsistent sweep axis: differing layer counts"));
    }
    rows.sort_by_key(|r| r.n);
    for pair in rows.windows(2) {
        if pair[0].n == pair[1].n {
            return Err(CliError::config("inconsistent sweep axis: duplicate n"));
        }
    }
    let mut header = vec!["n".to_string()];
    for k in 1..=layers {
        header.push(format!("agg_spread_layer{k}"));
    }
    let mut out = format!("# {}\n", header.join(" "));
    for row in &rows {
        let mut cols = vec![row.n.to_string()];
        for v in &row.aggregation_spread {
            cols.push(fmt(*v));
        }
        out.push_str(&cols.join(" "));
        out.push('\n');
    }
    Ok(out)
}

/// 50 uniform bins over the observed score range, pooled over all inputs.
/// Score files carry `i j score` per line.
pub fn histogram(inputs: &[std::path::PathBuf]) -> Result<String> {
    let mut scores = Vec::new();
    for path in inputs {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        for (lineno, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let value = trimmed.split_whitespace().last().unwrap();
            let score: f64 = value.parse().map_err(|_| {
                CliError::config(format!(
                    "{} line {}: `{value}` is not a score",
                    path.display(),
                    lineno + 1
                ))
            })?;
            scores.push(score);
        }
    }
    if scores.is_empty() {
        return Err(CliError::config("histogram needs at least one score"));
    }
    let min = scores.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    const BINS: usize = 50;
    let width = (max - min) / BINS as f64;
    let mut counts = [0usize; BINS];
    for &s in &scores {
        let bin = if width == 0.0 {
            0
        } else {
            (((s - min) / width) as usize).min(BINS - 1)
        };
        counts[bin] += 1;
    }
    let mut out = String::from("# bin_center count\n");
    for (b, &c) in counts.iter().enumerate() {
        let center = if width == 0.0 { min } else { min + (b as f64 + 0.5) * width };
        out.push_str(&format!("{} {}\n", fmt(center), c));
    }
    Ok(out)
}

fn fmt(v: f64) -> String {
    format!("{v}")
}
