use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hopembed::clan::clan_embed;
use hopembed::cover::sparse_cover;
use hopembed::datastructures::{build_hop_labeling, build_hop_oracle, build_routing_scheme};
use hopembed::generate::{gen_graph, GraphSpec};
use hopembed::graph_core::all_pairs_hop;
use hopembed::preserve::{build_path_tree_embedding, image_of_general_subgraph};
use hopembed::ramsey::{ramsey_distribution_with, ramsey_embed, RamseyMode};
use hopembed::report::{
    report_clan, report_cover, report_general_image, report_graph_core, report_labeling,
    report_oracle, report_preserve, report_ramsey, report_routing, InvariantReport,
};
use hopembed::rng::{stream, Component, SEED_ENV};
use hopembed::{Measure, Variant, WeightedGraph};
use rand::Rng;
use serde_json::{json, Value};

/// Hop-constrained embeddings and distance structures.
///
/// Every command prints one JSON document with the construction and its
/// invariant report, and exits with status 1 when an invariant fails.
#[derive(Parser)]
#[command(name = "hopembed", version)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    /// Print compact instead of indented JSON.
    #[arg(long, global = true)]
    compact: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Graph file: {"n": int, "edges": [[u, v, w], ...]}.
    #[arg(long, conflicts_with = "gen")]
    graph: Option<PathBuf>,
    /// Generator spec instead of a file, e.g. '{"family":"gnp","n":32,"p":0.3}'.
    #[arg(long)]
    gen: Option<String>,
}

impl Input {
    fn load(&self, seed: u64) -> Result<WeightedGraph> {
        match (&self.graph, &self.gen) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                Ok(WeightedGraph::from_json_str(&text)?)
            }
            (None, Some(spec)) => Ok(gen_graph(&parse_spec(spec)?, seed)?),
            (None, None) => bail!("pass --graph FILE or --gen SPEC"),
        }
    }
}

#[derive(Args)]
struct Embed {
    #[arg(long, default_value_t = 2)]
    h: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Use the alternative cluster rule.
    #[arg(long)]
    alt: bool,
}

impl Embed {
    fn variant(&self) -> Variant {
        if self.alt {
            Variant::Alt
        } else {
            Variant::Standard
        }
    }
}

#[derive(Args)]
struct Structure {
    #[arg(long, default_value_t = 2)]
    h: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Ramsey-type ultrametric embedding, or a distribution of them with --rounds.
    Ramsey {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        embed: Embed,
        /// Build the multiplicative-weights distribution with this many rounds.
        #[arg(long)]
        rounds: Option<usize>,
        /// Target inclusion probability 1 - eps instead of n^(-1/k) (with --rounds).
        #[arg(long)]
        inclusion: Option<f64>,
    },
    /// Clan embedding with the uniform measure.
    Clan {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        embed: Embed,
        /// Number of respecting test paths for the path-distortion check.
        #[arg(long, default_value_t = 100)]
        paths: usize,
    },
    /// Sparse cover at scale delta; edge weights are the costs.
    Cover {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
    },
    /// Path-tree embedding, plus the image of a subgraph with --subgraph.
    Preserve {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        embed: Embed,
        #[arg(long, default_value_t = 0)]
        root: usize,
        /// JSON list of [u, v] edges whose image to build.
        #[arg(long)]
        subgraph: Option<PathBuf>,
    },
    /// Hop-constrained distance oracle.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        params: Structure,
    },
    /// Hop-constrained distance labeling.
    Labels {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        params: Structure,
    },
    /// Compact routing scheme, replayed over sampled pairs.
    Route {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        params: Structure,
        /// Number of random pairs; every pair when omitted.
        #[arg(long)]
        pairs: Option<usize>,
    },
    /// Generate a graph from a spec.
    Gen {
        /// e.g. '{"family":"random-weighted","n":40,"p":0.1,"max_weight":100}'.
        spec: String,
    },
    /// Run every invariant report on one graph.
    Check {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        params: Structure,
    },
}

fn parse_spec(s: &str) -> Result<GraphSpec> {
    serde_json::from_str(s).with_context(|| format!("bad generator spec {s}"))
}

/// A document holding the construction plus its report.
struct Output {
    body: Value,
    reports: Vec<InvariantReport>,
}

impl Output {
    fn passed(&self) -> bool {
        self.reports.iter().all(InvariantReport::passed)
    }

    fn into_json(self) -> Value {
        let passed = self.passed();
        let mut body = self.body;
        if let Value::Object(map) = &mut body {
            if !self.reports.is_empty() {
                map.insert(
                    "reports".into(),
                    serde_json::to_value(&self.reports).expect("reports serialize"),
                );
                map.insert("passed".into(), Value::Bool(passed));
            }
        }
        body
    }
}

fn run(cli: &Cli) -> Result<Output> {
    let seed = cli.seed;
    Ok(match &cli.command {
        Command::Gen { .. } => unreachable!("handled before dispatch"),
        Command::Ramsey {
            input,
            embed,
            rounds,
            inclusion,
        } => {
            let g = input.load(seed)?;
            let all: Vec<usize> = (0..g.n()).collect();
            let mu = Measure::uniform(g.n());
            match rounds {
                None => {
                    let e = ramsey_embed(&g, &mu, &all, embed.h, embed.k, embed.variant())?;
                    let r = report_ramsey(&g, &mu, &all, &e);
                    Output {
                        body: json!({ "embedding": e }),
                        reports: vec![r],
                    }
                }
                Some(rounds) => {
                    let mode = match inclusion {
                        Some(eps) => RamseyMode::Inclusion(*eps),
                        None => RamseyMode::FixedK(embed.k),
                    };
                    let d = ramsey_distribution_with(&g, embed.h, mode, *rounds, embed.variant())?;
                    let reports = d
                        .embeddings
                        .iter()
                        .map(|e| report_ramsey(&g, &mu, &all, e))
                        .collect();
                    Output {
                        body: json!({
                            "mode": mode,
                            "rounds": rounds,
                            "k_embed": d.k_embed,
                            "eta": d.eta,
                            "inclusion_frequency": d.inclusion_frequency(g.n()),
                            "marked": d.embeddings.iter().map(|e| &e.marked).collect::<Vec<_>>(),
                        }),
                        reports,
                    }
                }
            }
        }
        Command::Clan {
            input,
            embed,
            paths,
        } => {
            let g = input.load(seed)?;
            let mu = Measure::uniform(g.n());
            let e = clan_embed(&g, &mu, embed.h, embed.k, embed.variant())?;
            let r = report_clan(&g, &mu, &e, *paths, seed);
            Output {
                body: json!({ "embedding": e }),
                reports: vec![r],
            }
        }
        Command::Cover { input, delta } => {
            let g = input.load(seed)?;
            let cost: Vec<f64> = g.edges().iter().map(|e| e.w).collect();
            let c = sparse_cover(&g, &cost, *delta, seed)?;
            let r = report_cover(&g, &c, &cost);
            Output {
                body: json!({ "cover": c }),
                reports: vec![r],
            }
        }
        Command::Preserve {
            input,
            embed,
            root,
            subgraph,
        } => {
            let g = input.load(seed)?;
            match subgraph {
                None => {
                    let p = build_path_tree_embedding(&g, *root, embed.h, embed.variant())?;
                    let r = report_preserve(&g, &p);
                    Output {
                        body: json!({ "embedding": p }),
                        reports: vec![r],
                    }
                }
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    let sub: Vec<(usize, usize)> =
                        serde_json::from_str(&text).context("subgraph must be [[u, v], ...]")?;
                    let img = image_of_general_subgraph(&g, &sub, embed.h, embed.variant(), seed)?;
                    let r = report_general_image(&g, &sub, embed.h, &img);
                    Output {
                        body: json!({
                            "edges": img.edges,
                            "component": img.component,
                            "weight": img.weight,
                            "subgraph_weight": img.subgraph_weight,
                            "tree_h": img.tree_h,
                            "clusters": img.cover.clusters.len(),
                        }),
                        reports: vec![r],
                    }
                }
            }
        }
        Command::Oracle { input, params: p } => {
            let g = input.load(seed)?;
            let o = build_hop_oracle(&g, p.h, p.k, p.eps, seed)?;
            let r = report_oracle(&g, &o);
            Output {
                body: json!({ "params": o.params, "words": o.words() }),
                reports: vec![r],
            }
        }
        Command::Labels { input, params: p } => {
            let g = input.load(seed)?;
            let l = build_hop_labeling(&g, p.h, p.k, p.eps, seed)?;
            let r = report_labeling(&g, &l);
            Output {
                body: json!({ "params": l.params, "max_label_words": l.max_words() }),
                reports: vec![r],
            }
        }
        Command::Route {
            input,
            params: p,
            pairs,
        } => {
            let g = input.load(seed)?;
            let s = build_routing_scheme(&g, p.h, p.k, p.eps, seed)?;
            let pairs = workload(&g, p.h, *pairs, seed);
            let r = report_routing(&g, &s, &pairs);
            Output {
                body: json!({
                    "params": s.params,
                    "hop_bound": s.hop_bound,
                    "pairs": pairs.len(),
                    "max_table_words": s.max_table_words(),
                    "max_label_words": s.max_label_words(),
                }),
                reports: vec![r],
            }
        }
        Command::Check { input, params: p } => {
            let g = input.load(seed)?;
            check_all(&g, p, seed)?
        }
    })
}

/// `h`-hop connected pairs: all of them, or `count` drawn uniformly.
fn workload(g: &WeightedGraph, h: usize, count: Option<usize>, seed: u64) -> Vec<(usize, usize)> {
    let d = all_pairs_hop(g, h);
    let n = g.n();
    let connected: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| d[u][v].is_finite())
        .collect();
    match count {
        None => connected,
        Some(c) => {
            let mut rng = stream(seed, Component::Workload, 0);
            (0..c)
                .map(|_| connected[rng.gen_range(0..connected.len())])
                .collect()
        }
    }
}

fn check_all(g: &WeightedGraph, p: &Structure, seed: u64) -> Result<Output> {
    let n = g.n();
    let mu = Measure::uniform(n);
    let all: Vec<usize> = (0..n).collect();
    let cost: Vec<f64> = g.edges().iter().map(|e| e.w).collect();
    let mut reports = vec![report_graph_core(g, p.h)];
    for variant in [Variant::Standard, Variant::Alt] {
        let e = ramsey_embed(g, &mu, &all, p.h, p.k, variant)?;
        reports.push(report_ramsey(g, &mu, &all, &e));
        let c = clan_embed(g, &mu, p.h, p.k, variant)?;
        reports.push(report_clan(g, &mu, &c, 50, seed));
        reports.push(report_preserve(
            g,
            &build_path_tree_embedding(g, 0, p.h, variant)?,
        ));
    }
    let delta = g.total_weight() / g.edge_count().max(1) as f64;
    reports.push(report_cover(
        g,
        &sparse_cover(g, &cost, delta, seed)?,
        &cost,
    ));
    reports.push(report_oracle(
        g,
        &build_hop_oracle(g, p.h, p.k, p.eps, seed)?,
    ));
    reports.push(report_labeling(
        g,
        &build_hop_labeling(g, p.h, p.k, p.eps, seed)?,
    ));
    let s = build_routing_scheme(g, p.h, p.k, p.eps, seed)?;
    reports.push(report_routing(g, &s, &workload(g, p.h, None, seed)));
    let summary: Vec<Value> = reports
        .iter()
        .map(|r| json!({ "module": r.module, "passed": r.passed() }))
        .collect();
    Ok(Output {
        body: json!({ "n": n, "edges": g.edge_count(), "summary": summary }),
        reports,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Gen { spec } = &cli.command {
        // Printed as-is so the output keeps the graph file layout.
        return match parse_spec(spec).and_then(|s| Ok(gen_graph(&s, cli.seed)?)) {
            Ok(g) => {
                println!("{}", g.to_json_string());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        };
    }
    match run(&cli) {
        Ok(out) => {
            let passed = out.passed();
            let doc = out.into_json();
            let text = if cli.compact {
                serde_json::to_string(&doc)
            } else {
                serde_json::to_string_pretty(&doc)
            };
            println!("{}", text.expect("JSON values serialize"));
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cli_shapes() {
        let cli = Cli::try_parse_from([
            "hopembed", "ramsey", "--gen", "{}", "--h", "3", "--alt", "--seed", "4",
        ])
        .unwrap();
        assert_eq!(cli.seed, 4);
        let Command::Ramsey { embed, rounds, .. } = cli.command else {
            panic!("wrong command")
        };
        assert_eq!(
            (embed.h, embed.k, embed.variant(), rounds),
            (3, 2, Variant::Alt, None)
        );
        assert!(Cli::try_parse_from(["hopembed", "oracle", "--graph", "a", "--gen", "b"]).is_err());
    }

    #[test]
    fn generator_errors_name_the_input() {
        let e = parse_spec(r#"{"family":"star"}"#).unwrap_err();
        assert!(format!("{e:#}").contains("star"));
    }

    #[test]
    fn reports_are_attached_to_the_body() {
        let out = Output {
            body: json!({ "x": 1 }),
            reports: vec![InvariantReport::new("m", Value::Null)],
        };
        let v = out.into_json();
        assert_eq!(v["passed"], true);
        assert_eq!(v["reports"][0]["module"], "m");
    }
}
