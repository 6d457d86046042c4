//! Edge-list ingestion and graph/embedding file emission.

use crate::{CliError, Result};
use lggnn_core::embed::EmbeddingTable;
use lggnn_core::graphon::{Latents, SampledGraph};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

/// Ingestion summary alongside the graph.
#[derive(Debug, Clone)]
pub struct LoadReport {
    pub vertices: usize,
    pub edges: usize,
    pub self_loops_dropped: usize,
    pub duplicates_merged: usize,
    pub density: f64,
}

/// Load a whitespace-separated edge list (one `u v` pair per line, `#`
/// comments allowed). Vertex ids are arbitrary nonnegative integers and are
/// relabeled contiguously in sorted order; duplicate edges merge, self loops
/// drop with a count. The resulting graph has `rho` set to its empirical
/// density and no latent features.
pub fn load_edge_list(path: &Path) -> Result<(SampledGraph, LoadReport)> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::config(format!("cannot read edge list {}: {e}", path.display()))
    })?;
    parse_edge_list(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Parse an edge list from text (see [`load_edge_list`]).
pub fn parse_edge_list(text: &str) -> Result<(SampledGraph, LoadReport)> {
    let mut raw_edges: Vec<(u64, u64)> = Vec::new();
    let mut self_loops = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut fields = content.split_whitespace();
        let a = fields.next();
        let b = fields.next();
        let extra = fields.next();
        let (Some(a), Some(b), None) = (a, b, extra) else {
            return Err(CliError::config(format!(
                "line {}: expected exactly two vertex ids, got `{content}`",
                lineno + 1
            )));
        };
        let parse = |s: &str| -> Result<u64> {
            s.parse::<u64>().map_err(|_| {
                CliError::config(format!(
                    "line {}: `{s}` is not a nonnegative integer vertex id",
                    lineno + 1
                ))
            })
        };
        let (u, v) = (parse(a)?, parse(b)?);
        if u == v {
            self_loops += 1;
            continue;
        }
        raw_edges.push((u.min(v), u.max(v)));
    }
    if raw_edges.is_empty() {
        return Err(CliError::config("edge list holds no valid edges"));
    }

    // Contiguous relabeling in ascending raw-id order.
    let mut ids: BTreeMap<u64, u32> = BTreeMap::new();
    for &(u, v) in &raw_edges {
        let next = ids.len() as u32;
        ids.entry(u).or_insert(next);
        let next = ids.len() as u32;
        ids.entry(v).or_insert(next);
    }
    let n = ids.len();
    let mut edges: Vec<(u32, u32)> = raw_edges
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (ids[&u], ids[&v]);
            (a.min(b), a.max(b))
        })
        .collect();
    let before = edges.len();
    edges.sort_unstable();
    edges.dedup();
    let duplicates = before - edges.len();

    let edge_count = edges.len();
    let density = 2.0 * edge_count as f64 / (n as f64 * (n as f64 - 1.0));
    let graph = SampledGraph::from_edges(n, edges, density)
        .map_err(|e| CliError::runtime(e.to_string()))?;
    Ok((
        graph,
        LoadReport {
            vertices: n,
            edges: edge_count,
            self_loops_dropped: self_loops,
            duplicates_merged: duplicates,
            density,
        },
    ))
}

/// Write a graph as an edge list with a short comment header.
pub fn write_edge_list(graph: &SampledGraph, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!(
        "# vertices {} edges {} rho {}\n",
        graph.n(),
        graph.edge_count(),
        graph.rho()
    ));
    for &(i, j) in graph.edges() {
        out.push_str(&format!("{i} {j}\n"));
    }
    atomic_write(path, out.as_bytes())
}

/// Write latent features as JSON (unit interval or sphere coordinates).
pub fn write_latents(graph: &SampledGraph, path: &Path) -> Result<()> {
    let json = match graph.latents() {
        Latents::Unit(xs) => serde_json::json!({"kind": "unit", "values": xs}),
        Latents::Sphere { dim, coords } => {
            serde_json::json!({"kind": "sphere", "dim": dim, "coords": coords})
        }
        Latents::Absent => serde_json::json!({"kind": "absent"}),
    };
    atomic_write(path, serde_json::to_string(&json).unwrap().as_bytes())
}

/// CSV dump of an embedding table: one row per vertex, layer blocks side by
/// side (`layer0_c0, ..., layer0_cD, layer1_c0, ...`).
pub fn write_embedding_csv(table: &EmbeddingTable, path: &Path) -> Result<()> {
    let mut out = String::new();
    let mut header: Vec<String> = vec!["vertex".into()];
    for k in 0..=table.layer_count() {
        for c in 0..table.dim() {
            header.push(format!("l{k}_c{c}"));
        }
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..table.n() {
        let mut row = vec![i.to_string()];
        for k in 0..=table.layer_count() {
            for v in table.vector(k, i) {
                row.push(format!("{v}"));
            }
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())
}

/// Write through a temp file and rename so readers never see partial output.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| {
                CliError::runtime(format!("cannot create {}: {e}", parent.display()))
            })?;
        }
    }
    let tmp = path.with_extension("tmp-write");
    {
        let mut file = std::fs::File::create(&tmp)
            .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", tmp.display())))?;
        file.write_all(bytes)
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", tmp.display())))?;
    }
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::runtime(format!("cannot rename into {}: {e}", path.display())))?;
    Ok(())
}
