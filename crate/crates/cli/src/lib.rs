//! `hsbm`: sample tree block models, inspect their population spectrum,
//! cluster graphs by recursive sign splits and run seeded experiments.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

pub mod fetch;
pub mod gml;

use std::collections::HashSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use hsbm_core::clustering::{
    parse_rule, recursive_bipartition_with, RecursionOptions, SplitOptions,
};
use hsbm_core::datasets::default_data_dir;
use hsbm_core::experiment::{run_experiment, ExperimentSpec};
use hsbm_core::graph::{format_edge_list, format_labels, read_edge_list, read_labels, LoadWarning};
use hsbm_core::metrics::completeness_score;
use hsbm_core::population::analytic_spectrum;
use hsbm_core::{
    sample_graph, Assortativity, EigenOptions, SampleSpec, SolverChoice, TreeModel, Variant,
};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<hsbm_core::Error> for CliError {
    fn from(e: hsbm_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Data(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "hsbm",
    version,
    about = "Hierarchical block models and recursive spectral bi-partitioning"
)]
pub struct Cli {
    /// Random seed (sampling, experiment master seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Eigensolver: auto, dense or iterative.
    #[arg(long, global = true)]
    pub solver: Option<SolverChoice>,
    /// Output file, or output directory for `experiment`. Defaults to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a graph from a tree model; writes an edge list.
    Sample(SampleArgs),
    /// Closed-form population Laplacian spectrum of a tree model, as CSV.
    Spectrum(SpectrumArgs),
    /// Recursive sign bi-partitioning of an edge list; writes a dendrogram as JSON.
    Cluster(ClusterArgs),
    /// Completeness of an estimated labelling against the truth, as JSON.
    Metrics(MetricsArgs),
    /// Run an experiment spec and write its CSV/JSON outputs.
    Experiment(ExperimentArgs),
    /// Download a benchmark network into the data directory.
    Fetch(FetchArgs),
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Tree model JSON file.
    #[arg(long)]
    pub model: PathBuf,
    /// Also write the planted leaf code of every vertex.
    #[arg(long)]
    pub labels_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Edge list (`i j` per line, optional `# n=` header).
    #[arg(long)]
    pub input: PathBuf,
    /// Vertex ids in the input start at 1.
    #[arg(long)]
    pub one_based: bool,
    #[arg(long, default_value_t = 1)]
    pub max_depth: usize,
    /// Stopping rule: fixed, minsize:<k> or eigengap[:<tau>].
    #[arg(long, default_value = "fixed")]
    pub rule: String,
    /// Matrix variant: L (Laplacian), A (adjacency) or N (normalized Laplacian).
    #[arg(long, default_value = "L")]
    pub variant: Variant,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Ground-truth label file (`vertex label` per line).
    #[arg(long)]
    pub truth: PathBuf,
    /// Estimated label file, same format.
    #[arg(long)]
    pub est: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment spec JSON; relative paths inside resolve against its directory.
    #[arg(long)]
    pub spec: PathBuf,
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    /// Dataset name, e.g. dolphins, football, polbooks, polblogs, ukfaculty.
    pub name: String,
    /// Download from this URL instead of the default mirror.
    #[arg(long)]
    pub url: Option<String>,
    /// Convert a local .gml or .zip instead of downloading.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Target directory; defaults to $HSBM_DATA_DIR or ./data.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Expected SHA-256 of the raw file.
    #[arg(long)]
    pub sha256: Option<String>,
    /// Label file overriding labels stored in the GML.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Node attribute holding the community label.
    #[arg(long)]
    pub label_key: Option<String>,
}

/// Result of one command: text for `--out`/stdout plus notes for stderr.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub stderr: Vec<String>,
}

fn emit(out: Option<&Path>, text: String) -> Result<Output, CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(Output::default())
        }
        None => Ok(Output {
            stdout: text,
            stderr: Vec::new(),
        }),
    }
}

fn load_model(path: &Path) -> Result<TreeModel, CliError> {
    Ok(TreeModel::from_json_file(path, Assortativity::Strict)?)
}

fn cmd_sample(cli: &Cli, args: &SampleArgs) -> Result<Output, CliError> {
    let model = load_model(&args.model)?;
    let g = sample_graph(&SampleSpec::new(&model, cli.seed.unwrap_or(0)));
    if let Some(path) = &args.labels_out {
        let codes: Vec<String> = model
            .assignment()
            .labels
            .iter()
            .map(|c| c.to_string())
            .collect();
        std::fs::write(path, format_labels(&codes))?;
    }
    emit(cli.out.as_deref(), format_edge_list(&g))
}

/// CSV `node_code,eigenvalue,multiplicity`. The first row is the trivial
/// pair; nodes sharing an eigenvalue are space-separated and the root is
/// the empty code.
pub fn spectrum_csv(model: &TreeModel) -> Result<String, CliError> {
    let spectrum = analytic_spectrum(model)?;
    let mut out = String::from("node_code,eigenvalue,multiplicity\nones,0,1\n");
    for entry in &spectrum.entries {
        let codes: Vec<String> = entry.nodes.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(
            out,
            "{},{},{}",
            codes.join(" "),
            entry.eigenvalue,
            entry.multiplicity
        );
    }
    Ok(out)
}

fn cmd_spectrum(cli: &Cli, args: &SpectrumArgs) -> Result<Output, CliError> {
    let model = load_model(&args.model)?;
    emit(cli.out.as_deref(), spectrum_csv(&model)?)
}

fn cmd_cluster(cli: &Cli, args: &ClusterArgs) -> Result<Output, CliError> {
    let rule = parse_rule(&args.rule).map_err(|e| CliError::Usage(e.to_string()))?;
    let loaded = read_edge_list(&args.input, args.one_based)?;
    let opts = RecursionOptions {
        rule: rule.as_ref(),
        max_depth: args.max_depth,
        split: SplitOptions {
            variant: args.variant,
            eigen: EigenOptions::with_solver(cli.solver.unwrap_or_default()),
        },
    };
    let dendrogram = recursive_bipartition_with(&loaded.graph, &opts)?;
    let mut output = emit(cli.out.as_deref(), dendrogram.to_json() + "\n")?;
    output.stderr = loaded
        .warnings
        .iter()
        .map(|w| match w {
            LoadWarning::DuplicateEdge { line, i, j } => {
                format!("warning: line {line}: duplicate edge ({i}, {j})")
            }
            LoadWarning::SelfLoop { line, vertex } => {
                format!("warning: line {line}: self-loop at {vertex} dropped")
            }
        })
        .collect();
    Ok(output)
}

#[derive(Debug, Serialize)]
struct MetricsReport {
    completeness: f64,
    n: usize,
    #[serde(rename = "K_true")]
    k_true: usize,
    #[serde(rename = "K_est")]
    k_est: usize,
}

fn cmd_metrics(cli: &Cli, args: &MetricsArgs) -> Result<Output, CliError> {
    let truth = read_labels(&args.truth)?;
    let est = read_labels(&args.est)?;
    let report = MetricsReport {
        completeness: completeness_score(&truth, &est)?,
        n: truth.len(),
        k_true: truth.iter().collect::<HashSet<_>>().len(),
        k_est: est.iter().collect::<HashSet<_>>().len(),
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    emit(cli.out.as_deref(), json + "\n")
}

fn cmd_experiment(cli: &Cli, args: &ExperimentArgs) -> Result<Output, CliError> {
    let text = std::fs::read_to_string(&args.spec)?;
    let mut spec = ExperimentSpec::from_json_str(&text)?;
    let base = args.spec.parent().unwrap_or(Path::new("")).to_path_buf();
    match &mut spec {
        ExperimentSpec::Synthetic(s) => {
            if let Some(seed) = cli.seed {
                s.master_seed = seed;
            }
            if let Some(solver) = cli.solver {
                s.solver = solver;
            }
        }
        ExperimentSpec::Real(r) => {
            if let Some(solver) = cli.solver {
                r.solver = solver;
            }
        }
    }
    let out_dir = match (&cli.out, spec.out_dir()) {
        (Some(dir), _) => dir.clone(),
        (None, Some(dir)) => base.join(dir),
        (None, None) => {
            return Err(CliError::Usage(
                "no output directory: pass --out or set out_dir".into(),
            ))
        }
    };
    let files = run_experiment(&spec, &base)?;
    files.write_to(&out_dir)?;
    Ok(Output {
        stdout: String::new(),
        stderr: files
            .files
            .iter()
            .map(|(name, _)| format!("wrote {}", out_dir.join(name).display()))
            .collect(),
    })
}

fn cmd_fetch(args: &FetchArgs) -> Result<Output, CliError> {
    let report = fetch::fetch(&fetch::FetchRequest {
        name: args.name.clone(),
        url: args.url.clone(),
        file: args.file.clone(),
        data_dir: args.data_dir.clone().unwrap_or_else(default_data_dir),
        sha256: args.sha256.clone(),
        labels: args.labels.clone(),
        label_key: args.label_key.clone(),
    })?;
    let mut notes = vec![format!(
        "{}: n={} edges={} sha256={} from {}",
        report.name, report.n, report.edges, report.sha256, report.origin
    )];
    if report.dropped_self_loops > 0 {
        notes.push(format!("dropped {} self-loops", report.dropped_self_loops));
    }
    if report.dropped_vertices > 0 {
        notes.push(format!(
            "kept the largest component; dropped {} vertices",
            report.dropped_vertices
        ));
    }
    Ok(Output {
        stdout: String::new(),
        stderr: notes,
    })
}

pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Sample(a) => cmd_sample(cli, a),
        Command::Spectrum(a) => cmd_spectrum(cli, a),
        Command::Cluster(a) => cmd_cluster(cli, a),
        Command::Metrics(a) => cmd_metrics(cli, a),
        Command::Experiment(a) => cmd_experiment(cli, a),
        Command::Fetch(a) => cmd_fetch(a),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(output) => {
            print!("{}", output.stdout);
            for line in output.stderr {
                eprintln!("{line}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
