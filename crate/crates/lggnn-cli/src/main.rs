//! Command-line front end for graphon sampling, moment embeddings, edge
//! regression, evaluation, and table reproduction.

use clap::{Parser, Subcommand};
use lggnn_cli::config::{ExperimentConfig, ModelRef, RhoMode};
use lggnn_cli::cora::{default_cora_path, run_cora, CoraConfig};
use lggnn_cli::graph_io::{
    load_edge_list, write_edge_list, write_embedding_csv, write_latents,
};
use lggnn_cli::plot::{emit_plot_data, PlotKind};
use lggnn_cli::report::FitRecord;
use lggnn_cli::runner::run_experiment;
use lggnn_cli::{CliError, Result};
use lggnn_core::embed::{embed, moment_estimates, moment_estimates_for_pairs};
use lggnn_core::eval::EvalReport;
use lggnn_core::graphon::{sample_graph, GraphonModel};
use lggnn_core::regress::{accumulate_stats, fit_pls, fit_box_constrained, SearchSpace};
use lggnn_core::rng::PairIndexer;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "lggnn", about = "Graphon link prediction via linear-GNN moment estimators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph from a graphon model and write its edge list.
    Generate {
        /// Preset name or path to a graphon spec JSON file.
        #[arg(long)]
        model: String,
        #[arg(long)]
        n: usize,
        /// Sparsity schedule: one | inv_sqrt_n | log_n_over_n.
        #[arg(long, default_value = "one")]
        rho_mode: String,
        /// Explicit sparsity override in (0, 1].
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the latent features as JSON.
        #[arg(long)]
        latents_out: Option<PathBuf>,
    },
    /// Embed an edge-list graph and dump the layer matrices as CSV.
    Embed {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long, default_value_t = 2)]
        layers: usize,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit edge-probability coefficients on all pairs of a graph.
    Fit {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long, default_value_t = 2)]
        layers: usize,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// box | pls
        #[arg(long, default_value = "box")]
        method: String,
        /// Comma-separated box bounds b_i (scaled by 1/rho^i internally).
        #[arg(long)]
        bounds: Option<String>,
        /// l1-ball radius (overrides --bounds).
        #[arg(long)]
        l1_radius: Option<f64>,
        /// PLS component count.
        #[arg(long)]
        components: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Optional per-pair score dump (`i j score` lines).
        #[arg(long)]
        scores_out: Option<PathBuf>,
    },
    /// Compute metrics from a scored-pair file (`i j score label [true_prob]`).
    Eval {
        #[arg(long)]
        scores: PathBuf,
        /// Comma-separated k values for hits@k / probability-ratio@k.
        #[arg(long, default_value = "50,100")]
        ks: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a config-driven experiment (JSON config).
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run the real-data topology experiment on a local Cora edge list.
    Cora {
        /// Edge-list path (default: data/cora.edges or $CORA_EDGES).
        #[arg(long)]
        edges: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        layers: usize,
        #[arg(long, default_value = "1,2,3")]
        seeds: String,
        #[arg(long, default_value_t = 0.2)]
        p: f64,
        #[arg(long, default_value = "out/cora")]
        out_dir: PathBuf,
    },
    /// Tabulate results for external plotting.
    PlotData {
        /// metric_vs_n | spread_vs_n | histogram
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: PathBuf,
        /// Input report/score files.
        inputs: Vec<PathBuf>,
    },
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| CliError::config(format!("bad {what} entry `{s}`")))
        })
        .collect()
}

fn resolve_model(name: &str) -> Result<(GraphonModel, String)> {
    if lggnn_cli::presets::preset(name).is_some() {
        ModelRef::Preset(name.to_string()).resolve()
    } else if std::path::Path::new(name).exists() {
        ModelRef::SpecFile(name.to_string()).resolve()
    } else {
        Err(CliError::config(format!(
            "`{name}` is neither a preset ({}) nor a spec file",
            lggnn_cli::presets::preset_names().join(", ")
        )))
    }
}

fn default_dim(rho: f64) -> usize {
    64usize.max((4.0 / rho).ceil() as usize)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { model, n, rho_mode, rho, seed, out, latents_out } => {
            let (model, _) = resolve_model(&model)?;
            let mode: RhoMode = serde_json::from_value(serde_json::Value::String(rho_mode))
                .map_err(|_| CliError::config("rho_mode must be one|inv_sqrt_n|log_n_over_n"))?;
            let rho = rho.unwrap_or_else(|| mode.resolve(n));
            let graph = sample_graph(&model, n, rho, seed).map_err(CliError::from)?;
            write_edge_list(&graph, &out)?;
            if let Some(path) = latents_out {
                write_latents(&graph, &path)?;
            }
            println!("wrote {} edges over {} vertices to {}", graph.edge_count(), n, out.display());
        }
        Command::Embed { edges, layers, dim, seed, out } => {
            let (graph, _) = load_edge_list(&edges)?;
            let d = dim.unwrap_or_else(|| default_dim(graph.rho()));
            let table = embed(&graph, layers, d, seed).map_err(CliError::from)?;
            write_embedding_csv(&table, &out)?;
            println!("wrote {}x{} embeddings ({} layers) to {}", graph.n(), d, layers + 1, out.display());
        }
        Command::Fit { edges, layers, dim, seed, method, bounds, l1_radius, components, out, scores_out } => {
            let (graph, _) = load_edge_list(&edges)?;
            let d = dim.unwrap_or_else(|| default_dim(graph.rho()));
            let table = embed(&graph, layers, d, seed).map_err(CliError::from)?;
            let estimates = moment_estimates(&table);
            let fit = match method.as_str() {
                "box" => {
                    let stats =
                        accumulate_stats(&estimates, &graph, |_, _| true).map_err(CliError::from)?;
                    let space = if let Some(radius) = l1_radius {
                        SearchSpace::l1_ball(layers + 1, radius).map_err(CliError::from)?
                    } else {
                        let b = match bounds {
                            Some(text) => parse_list::<f64>(&text, "bound")?,
                            None => vec![2.0; layers + 1],
                        };
                        SearchSpace::box_bounds(&b, graph.rho()).map_err(CliError::from)?
                    };
                    fit_box_constrained(&stats, &space, 1e-10, 50_000).map_err(CliError::from)?
                }
                "pls" => {
                    let c = components.unwrap_or_else(|| 3.min(layers + 1));
                    fit_pls(&estimates, &graph, c, |_, _| true).map_err(CliError::from)?
                }
                other => return Err(CliError::config(format!("unknown method `{other}`"))),
            };
            let record = FitRecord::from_fit(&fit);
            lggnn_cli::graph_io::atomic_write(
                &out,
                serde_json::to_string_pretty(&record).unwrap().as_bytes(),
            )?;
            if let Some(path) = scores_out {
                let pairs: Vec<(u32, u32)> = PairIndexer::new(graph.n())
                    .iter()
                    .map(|(i, j)| (i as u32, j as u32))
                    .collect();
                let pm = moment_estimates_for_pairs(&table, &pairs, true);
                let scores =
                    lggnn_core::regress::predict_pairs(&fit, &pm).map_err(CliError::from)?;
                let mut text = String::new();
                for (pair, score) in pairs.iter().zip(&scores) {
                    text.push_str(&format!("{} {} {}\n", pair.0, pair.1, score));
                }
                lggnn_cli::graph_io::atomic_write(&path, text.as_bytes())?;
            }
            println!("wrote fit to {}", out.display());
        }
        Command::Eval { scores, ks, out } => {
            let ks: Vec<usize> = parse_list(&ks, "k")?;
            let text = std::fs::read_to_string(&scores).map_err(|e| {
                CliError::config(format!("cannot read {}: {e}", scores.display()))
            })?;
            let mut score_values = Vec::new();
            let mut labels = Vec::new();
            let mut probs: Vec<f64> = Vec::new();
            let mut has_probs = true;
            for (lineno, line) in text.lines().enumerate() {
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('#') {
                    continue;
                }
                let fields: Vec<&str> = trimmed.split_whitespace().collect();
                if fields.len() < 4 {
                    return Err(CliError::config(format!(
                        "{} line {}: need `i j score label [true_prob]`",
                        scores.display(),
                        lineno + 1
                    )));
                }
                let parse_f = |s: &str| -> Result<f64> {
                    s.parse().map_err(|_| {
                        CliError::config(format!(
                            "{} line {}: bad number `{s}`",
                            scores.display(),
                            lineno + 1
                        ))
                    })
                };
                score_values.push(parse_f(fields[2])?);
                labels.push(parse_f(fields[3])? != 0.0);
                match fields.get(4) {
                    Some(p) => probs.push(parse_f(p)?),
                    None => has_probs = false,
                }
            }
            let report = EvalReport::compute(
                &score_values,
                &labels,
                &ks,
                if has_probs && !probs.is_empty() { Some(&probs) } else { None },
                None,
                format!("eval {}", scores.display()),
            )
            .map_err(CliError::from)?;
            let json = serde_json::json!({
                "auc_roc": report.auc_roc,
                "cross_entropy": report.cross_entropy,
                "hits_at_k": report.hits_at_k.iter().map(|&(k, h)| {
                    serde_json::json!({"k": k, "value": h.value, "negative_shortfall": h.negative_shortfall})
                }).collect::<Vec<_>>(),
                "prob_ratio_at_k": report.prob_ratio_at_k,
                "positives": report.positives,
                "negatives": report.negatives,
                "config": report.config_echo,
            });
            lggnn_cli::graph_io::atomic_write(
                &out,
                serde_json::to_string_pretty(&json).unwrap().as_bytes(),
            )?;
            println!("wrote metrics to {}", out.display());
        }
        Command::Experiment { config, out_dir } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(dir) = out_dir {
                cfg.output_dir = dir.display().to_string();
            }
            let row = run_experiment(&cfg)?;
            let auc = row
                .auc
                .map_or("n/a".to_string(), |a| format!("{:.4} +- {:.4}", a.mean, a.sd));
            println!(
                "{}: auc {} (n={}, {} seeds, {} failures)",
                row.name,
                auc,
                row.n,
                row.seeds.len(),
                row.failures
            );
        }
        Command::Cora { edges, layers, seeds, p, out_dir } => {
            let mut cfg = CoraConfig::new(
                edges.unwrap_or_else(default_cora_path),
                out_dir,
            );
            cfg.layers = layers;
            cfg.holdout_p = p;
            cfg.seeds = parse_list(&seeds, "seed")?;
            let rows = run_cora(&cfg)?;
            for row in rows {
                let hits50 = row.hits.iter().find(|(k, _)| *k == 50);
                match hits50 {
                    Some((_, agg)) => println!(
                        "{}: hits@50 {:.4} +- {:.4}",
                        row.name, agg.mean, agg.sd
                    ),
                    None => println!(
                        "{}: auc {:?}",
                        row.name,
                        row.auc.map(|a| a.mean)
                    ),
                }
            }
        }
        Command::PlotData { kind, out, inputs } => {
            if inputs.is_empty() {
                return Err(CliError::config("plot-data needs at least one input file"));
            }
            emit_plot_data(PlotKind::parse(&kind)?, &inputs, &out)?;
            println!("wrote table to {}", out.display());
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("{err}");
        std::process::exit(err.exit_code());
    }
}
