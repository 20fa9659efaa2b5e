//! `wembed` command-line front end.
//!
//! Results go to stdout, progress and diagnostics to stderr. Exit codes:
//! 0 success, 1 usage or configuration error, 2 I/O or parse error,
//! 3 numeric failure.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::eval::{best_f1_exact, best_f1_sampled, DEFAULT_SAMPLE_FACTOR};
use crate::girg::{sample_girg, GirgConfig};
use crate::graph::{parse_edge_list, Graph};
use crate::optimizer::{embed_with, OptimizerConfig};
use crate::space::{EmbeddingFile, WeightedEmbedding};

/// Pair count above which exact evaluation is refused and the default
/// switches to sampling.
pub const EXACT_PAIR_LIMIT: usize = 10_000_000;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "wembed", version, about = "Weighted graph embeddings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Embed the nodes of an edge list.
    Embed(EmbedArgs),
    /// Score an embedding by graph reconstruction.
    Eval(EvalArgs),
    /// Generate a random graph.
    #[command(subcommand)]
    Generate(GenerateCommand),
    /// Print degree statistics.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Latent dimension d' in the weights deg^(d/d').
    #[arg(long, default_value_t = 8.0)]
    pub dprime: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1.0)]
    pub lr0: f64,
    #[arg(long, default_value_t = 0.995)]
    pub lr_decay: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub stop_eps: f64,
    /// Give every node weight 1 (plain Euclidean embedding).
    #[arg(long)]
    pub uniform_weights: bool,
    /// Embed the whole graph instead of its largest connected component.
    #[arg(long)]
    pub no_lcc: bool,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub embedding: PathBuf,
    /// Enumerate every node pair.
    #[arg(long, conflicts_with = "sample_factor")]
    pub exact: bool,
    /// Sample this many non-edges per edge.
    #[arg(long)]
    pub sample_factor: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Evaluate on the whole graph instead of its largest connected component.
    #[arg(long)]
    pub no_lcc: bool,
}

#[derive(Debug, Subcommand)]
pub enum GenerateCommand {
    /// Geometric inhomogeneous random graph on the unit torus.
    Girg(GirgArgs),
}

#[derive(Debug, Args)]
pub struct GirgArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub avg_deg: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 0.1)]
    pub temperature: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Embed(args) => cmd_embed(&args),
        Command::Eval(args) => cmd_eval(&args),
        Command::Generate(GenerateCommand::Girg(args)) => cmd_generate(&args),
        Command::Stats(args) => cmd_stats(&args),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::ZeroDegree { .. } | Error::Calibration(_) => EXIT_USAGE,
        Error::Parse { .. } | Error::EmptyGraph | Error::LabelMismatch { .. } | Error::Io(_) => EXIT_IO,
        Error::NonFinite { .. } | Error::Singular { .. } => EXIT_NUMERIC,
    }
}

fn with_path(path: &Path, err: io::Error) -> Error {
    Error::Io(io::Error::new(err.kind(), format!("{}: {err}", path.display())))
}

fn read_graph(path: &Path) -> Result<Graph, Error> {
    let file = File::open(path).map_err(|e| with_path(path, e))?;
    parse_edge_list(BufReader::new(file))
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    File::create(path).map(BufWriter::new).map_err(|e| with_path(path, e))
}

pub fn cmd_embed(args: &EmbedArgs) -> Result<(), Error> {
    let mut cfg = OptimizerConfig::new(args.dim);
    cfg.latent_dim = args.dprime;
    cfg.max_iters = args.max_iters;
    cfg.lr0 = args.lr0;
    cfg.lr_decay = args.lr_decay;
    cfg.stop_eps = args.stop_eps;
    cfg.uniform_weights = args.uniform_weights;
    cfg.seed = args.seed;
    cfg.threads = args.threads;
    cfg.validate()?;

    let mut graph = read_graph(&args.input)?;
    if !args.no_lcc {
        graph = graph.largest_connected_component();
    }
    eprintln!(
        "embedding {} nodes, {} edges in {} dimensions",
        graph.node_count(),
        graph.edge_count(),
        cfg.dim
    );
    let outcome = embed_with(&graph, &cfg, |report, _| {
        if (report.iteration + 1) % 100 == 0 {
            eprintln!(
                "iteration {:>5}  lr {:.3e}  step {:.3e}  repulsive pairs {}",
                report.iteration + 1,
                report.learning_rate,
                report.mean_displacement,
                report.stats.repulsive_terms
            );
        }
    })?;

    let file = EmbeddingFile {
        labels: graph.labels().to_vec(),
        threshold: cfg.threshold,
        embedding: outcome.embedding,
    };
    let mut out = create(&args.out)?;
    file.write(&mut out).and_then(|_| out.flush()).map_err(|e| with_path(&args.out, e))?;

    println!(
        "iterations={} converged={} final_loss={} wall_time_s={:.3}",
        outcome.iterations, outcome.converged, outcome.final_loss, outcome.elapsed_secs
    );
    Ok(())
}

/// Reorders the rows of `file` to follow the node ids of `graph`.
pub fn align_embedding(graph: &Graph, file: &EmbeddingFile) -> Result<WeightedEmbedding, Error> {
    let rows: HashMap<&str, usize> = file.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let e = &file.embedding;
    let mut positions = Vec::with_capacity(graph.node_count() * e.dim());
    let mut weights = Vec::with_capacity(graph.node_count());
    for label in graph.labels() {
        let Some(&row) = rows.get(label.as_str()) else {
            return Err(Error::LabelMismatch {
                label: label.clone(),
                present_in: "graph",
                missing_from: "embedding",
            });
        };
        positions.extend_from_slice(e.position(row));
        weights.push(e.weight(row));
    }
    let known: HashSet<&str> = graph.labels().iter().map(String::as_str).collect();
    if let Some(label) = file.labels.iter().find(|l| !known.contains(l.as_str())) {
        return Err(Error::LabelMismatch {
            label: label.clone(),
            present_in: "embedding",
            missing_from: "graph",
        });
    }
    WeightedEmbedding::new(e.dim(), positions, weights)
}

fn pair_count(graph: &Graph) -> usize {
    let n = graph.node_count();
    n * n.saturating_sub(1) / 2
}

pub fn cmd_eval(args: &EvalArgs) -> Result<(), Error> {
    let mut graph = read_graph(&args.graph)?;
    if !args.no_lcc {
        graph = graph.largest_connected_component();
    }
    let pairs = pair_count(&graph);
    if args.exact && pairs > EXACT_PAIR_LIMIT {
        return Err(Error::Config(format!(
            "exact evaluation of {pairs} node pairs exceeds the limit of {EXACT_PAIR_LIMIT}; use --sample-factor"
        )));
    }
    let file = {
        let handle = File::open(&args.embedding).map_err(|e| with_path(&args.embedding, e))?;
        EmbeddingFile::read(BufReader::new(handle))?
    };
    let embedding = align_embedding(&graph, &file)?;
    let sample_factor = match (args.exact, args.sample_factor) {
        (true, _) => None,
        (false, Some(k)) => Some(k),
        (false, None) if pairs > EXACT_PAIR_LIMIT => Some(DEFAULT_SAMPLE_FACTOR),
        (false, None) => None,
    };
    let report = match sample_factor {
        Some(k) => best_f1_sampled(&graph, &embedding, k, args.seed)?,
        None => best_f1_exact(&graph, &embedding)?,
    };
    println!("{report}");
    eprintln!("{}", report.describe());
    Ok(())
}

pub fn cmd_generate(args: &GirgArgs) -> Result<(), Error> {
    let cfg = GirgConfig {
        n: args.n,
        target_avg_deg: args.avg_deg,
        beta: args.beta,
        dim: args.dim,
        temperature: args.temperature,
        seed: args.seed,
    };
    cfg.validate()?;
    let graph = sample_girg(&cfg)?;
    let mut out = create(&args.out)?;
    graph
        .write_edge_list(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| with_path(&args.out, e))?;
    let isolated = graph.degrees().iter().filter(|&&k| k == 0).count();
    println!(
        "n={} m={} avg_deg={} isolated={}",
        graph.node_count(),
        graph.edge_count(),
        2.0 * graph.edge_count() as f64 / graph.node_count() as f64,
        isolated
    );
    Ok(())
}

pub fn cmd_stats(args: &StatsArgs) -> Result<(), Error> {
    let graph = read_graph(&args.input)?;
    let degrees = graph.degree_summary();
    let lcc = graph.largest_connected_component();
    let heterogeneity = graph
        .heterogeneity()
        .map_or_else(|| "undefined".to_owned(), |h| h.to_string());
    println!(
        "n={} m={} min_deg={} mean_deg={} max_deg={} heterogeneity={} lcc_n={} lcc_m={}",
        graph.node_count(),
        graph.edge_count(),
        degrees.min,
        degrees.mean,
        degrees.max,
        heterogeneity,
        lcc.node_count(),
        lcc.edge_count()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from(["wembed", "embed", "--input", "g.txt", "--dim", "4", "--out", "e.txt", "--uniform-weights"]).unwrap();
        match cli.command {
            Command::Embed(args) => {
                assert_eq!(args.dim, 4);
                assert!(args.uniform_weights);
                assert_eq!(args.dprime, 8.0);
                assert_eq!(args.threads, 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_and_unknown_flags_are_usage_errors() {
        assert_eq!(run(["wembed", "embed", "--input", "g.txt", "--out", "e.txt"]), EXIT_USAGE);
        assert_eq!(run(["wembed", "stats", "--input", "g.txt", "--bogus"]), EXIT_USAGE);
        assert_eq!(run(["wembed", "eval", "--graph", "g", "--embedding", "e", "--exact", "--sample-factor", "3"]), EXIT_USAGE);
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_USAGE);
        assert_eq!(exit_code(&Error::EmptyGraph), EXIT_IO);
        assert_eq!(exit_code(&Error::NonFinite { node: 0 }), EXIT_NUMERIC);
    }

    #[test]
    fn alignment_follows_graph_order() {
        let graph = crate::graph::parse_edge_list_str("b a\na c\n").unwrap();
        let file = EmbeddingFile {
            labels: vec!["a".into(), "b".into(), "c".into()],
            threshold: 1.0,
            embedding: WeightedEmbedding::new(1, vec![10.0, 20.0, 30.0], vec![1.0, 2.0, 3.0]).unwrap(),
        };
        let aligned = align_embedding(&graph, &file).unwrap();
        assert_eq!(aligned.positions(), &[20.0, 10.0, 30.0]);
        assert_eq!(aligned.weights(), &[2.0, 1.0, 3.0]);

        let short = EmbeddingFile {
            labels: vec!["a".into(), "b".into(), "x".into()],
            ..file.clone()
        };
        assert!(matches!(
            align_embedding(&graph, &short),
            Err(Error::LabelMismatch { label, .. }) if label == "c"
        ));
    }
}
