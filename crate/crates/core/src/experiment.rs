//! Seeded experiment runner for synthetic sweeps and labelled networks.
//!
//! Every output is rendered to a string first so that reruns can be compared
//! byte for byte; wall-clock timings are kept on the records but never
//! written to the output files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{
    bipartition_with, flat_clustering, recursive_bipartition_with, Dendrogram, FixedDepth,
    Provenance, RecursionOptions, SplitOptions, Variant,
};
use crate::datasets::{default_data_dir, load_files, load_named, Dataset};
use crate::error::{Error, Result};
use crate::linalg::{EigenOptions, SolverChoice};
use crate::metrics::{
    completeness_score, condition_report, hierarchy_recovered, misclassification_error,
    perturbation_report, ConditionReport,
};
use crate::population::{density_summary, population_fiedler, DensitySummary};
use crate::rng::trial_seed;
use crate::sampling::{sample_graph, SampleSpec};
use crate::tree::{Assortativity, NodeCode, TreeModel};

/// A model given either as a path to a model file or inline.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSource {
    Path(PathBuf),
    Inline(serde_json::Value),
}

impl ModelSource {
    pub fn load(&self, base_dir: &Path) -> Result<TreeModel> {
        match self {
            ModelSource::Path(p) => {
                TreeModel::from_json_file(base_dir.join(p), Assortativity::Strict)
            }
            ModelSource::Inline(v) => {
                TreeModel::from_json_str(&v.to_string(), Assortativity::Strict)
            }
        }
    }
}

fn default_true() -> bool {
    true
}

fn default_depth() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub model: ModelSource,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub solver: SolverChoice,
    #[serde(default)]
    pub variant: Variant,
    /// Also recurse to the tree height and check every planted split.
    #[serde(default = "default_true")]
    pub hierarchy: bool,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealSpec {
    /// Dataset name looked up in the data directory.
    #[serde(default)]
    pub dataset: Option<String>,
    /// Explicit edge list, used instead of `dataset`.
    #[serde(default)]
    pub edges: Option<PathBuf>,
    #[serde(default)]
    pub labels: Option<PathBuf>,
    #[serde(default)]
    pub one_based: bool,
    #[serde(default)]
    pub variant: Variant,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default)]
    pub solver: SolverChoice,
    #[serde(default)]
    pub data_dir: Option<PathBuf>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExperimentSpec {
    Synthetic(SyntheticSpec),
    Real(RealSpec),
}

impl ExperimentSpec {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(text)?;
        if let ExperimentSpec::Synthetic(s) = &spec {
            if s.trials == 0 {
                return Err(Error::InvalidArgument("trials must be at least 1".into()));
            }
        }
        Ok(spec)
    }

    pub fn out_dir(&self) -> Option<&Path> {
        match self {
            ExperimentSpec::Synthetic(s) => s.out_dir.as_deref(),
            ExperimentSpec::Real(r) => r.out_dir.as_deref(),
        }
    }
}

/// One sampled graph of a synthetic sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    /// First-split completeness against the planted top-level split.
    pub completeness: f64,
    pub misclassification: f64,
    pub sqrt_n_linf: Option<f64>,
    pub l2_aligned: Option<f64>,
    pub sign_agreement: Option<f64>,
    pub threshold: Option<f64>,
    pub exact_recovery: bool,
    pub hierarchy_recovered: Option<bool>,
    pub fiedler_value: f64,
    pub provenance: Provenance,
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSummary {
    pub mean: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl FieldSummary {
    /// Linear-interpolation quantiles; `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let pos = p * (v.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Some(Self {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            min: v[0],
            q25: q(0.25),
            median: q(0.5),
            q75: q(0.75),
            max: v[v.len() - 1],
        })
    }
}

/// Derived from the trial records only; see [`summarize`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub trials: usize,
    pub exact_recovery_count: usize,
    pub exact_recovery_rate: f64,
    pub hierarchy_recovered_count: Option<usize>,
    /// Trials with `sqrt_n_linf < threshold`.
    pub linf_eligible: usize,
    /// Eligible trials whose sign agreement is below 1.
    pub linf_violations: usize,
    pub completeness: Option<FieldSummary>,
    pub misclassification: Option<FieldSummary>,
    pub sqrt_n_linf: Option<FieldSummary>,
    pub fiedler_value: Option<FieldSummary>,
}

pub fn summarize(records: &[TrialRecord]) -> Summary {
    let exact = records.iter().filter(|r| r.exact_recovery).count();
    let hierarchy =
        if records.iter().all(|r| r.hierarchy_recovered.is_some()) && !records.is_empty() {
            Some(
                records
                    .iter()
                    .filter(|r| r.hierarchy_recovered == Some(true))
                    .count(),
            )
        } else {
            None
        };
    let eligible: Vec<&TrialRecord> = records
        .iter()
        .filter(|r| matches!((r.sqrt_n_linf, r.threshold), (Some(x), Some(t)) if x < t))
        .collect();
    let violations = eligible
        .iter()
        .filter(|r| r.sign_agreement != Some(1.0))
        .count();
    let field = |f: &dyn Fn(&TrialRecord) -> Option<f64>| {
        FieldSummary::of(&records.iter().filter_map(f).collect::<Vec<_>>())
    };
    Summary {
        trials: records.len(),
        exact_recovery_count: exact,
        exact_recovery_rate: if records.is_empty() {
            0.0
        } else {
            exact as f64 / records.len() as f64
        },
        hierarchy_recovered_count: hierarchy,
        linf_eligible: eligible.len(),
        linf_violations: violations,
        completeness: field(&|r| Some(r.completeness)),
        misclassification: field(&|r| Some(r.misclassification)),
        sqrt_n_linf: field(&|r| r.sqrt_n_linf),
        fiedler_value: field(&|r| Some(r.fiedler_value)),
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticOutcome {
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
    pub condition: ConditionReport,
    pub density: DensitySummary,
    /// Sample Fiedler vector of trial 0 (aligned to the population vector)
    /// next to the planted labels.
    pub fiedler_csv: String,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl SyntheticOutcome {
    pub fn trials_csv(&self) -> String {
        let mut out = String::from(
            "trial,seed,completeness,misclassification,sqrt_n_linf,l2_aligned,sign_agreement,threshold,exact_recovery,hierarchy_recovered,fiedler_value,provenance\n",
        );
        for r in &self.records {
            let provenance = match r.provenance {
                Provenance::Spectral => "spectral",
                Provenance::Components => "components",
            };
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.trial,
                r.seed,
                r.completeness,
                r.misclassification,
                fmt_opt(r.sqrt_n_linf),
                fmt_opt(r.l2_aligned),
                fmt_opt(r.sign_agreement),
                fmt_opt(r.threshold),
                r.exact_recovery,
                r.hierarchy_recovered
                    .map(|b| b.to_string())
                    .unwrap_or_default(),
                r.fiedler_value,
                provenance
            )
            .expect("writing to a String cannot fail");
        }
        out
    }

    pub fn summary_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            summary: &'a Summary,
            condition: &'a ConditionReport,
            density: &'a DensitySummary,
        }
        let mut s = serde_json::to_string_pretty(&Out {
            summary: &self.summary,
            condition: &self.condition,
            density: &self.density,
        })
        .expect("summary serializes");
        s.push('\n');
        s
    }
}

struct TrialOutput {
    record: TrialRecord,
    vector: Vec<f64>,
}

fn run_trial(
    model: &TreeModel,
    spec: &SyntheticSpec,
    t: usize,
    u_star: &[f64],
) -> Result<TrialOutput> {
    let start = Instant::now();
    let seed = trial_seed(spec.master_seed, t as u64);
    let g = sample_graph(&SampleSpec::new(model, seed));
    let split_opts = SplitOptions {
        variant: spec.variant,
        eigen: EigenOptions::with_solver(spec.solver),
    };
    let split = bipartition_with(&g, &split_opts)?;
    let planted: Vec<u8> = u_star
        .iter()
        .map(|&x| if x >= 0.0 { 0 } else { 1 })
        .collect();
    let completeness = completeness_score(&planted, &split.assignment)?;
    let misclassification = if split.fiedler_vector.is_empty() {
        let wrong = planted
            .iter()
            .zip(&split.assignment)
            .filter(|(a, b)| a != b)
            .count();
        wrong.min(g.n() - wrong) as f64 / g.n() as f64
    } else {
        misclassification_error(&split.fiedler_vector, u_star)?
    };
    let root = NodeCode::root();
    let n0 = model.size(&root.left())?;
    let n1 = model.size(&root.right())?;
    let report = if spec.variant == Variant::Laplacian && !split.fiedler_vector.is_empty() {
        Some(perturbation_report(&split.fiedler_vector, u_star, n0, n1)?)
    } else {
        None
    };
    let hierarchy = if spec.hierarchy {
        let d = recursive_bipartition_with(
            &g,
            &RecursionOptions {
                rule: &FixedDepth,
                max_depth: model.height(),
                split: split_opts,
            },
        )?;
        Some(hierarchy_recovered(&d, model))
    } else {
        None
    };
    let vector = if split.fiedler_vector.is_empty() {
        Vec::new()
    } else {
        let dot: f64 = split
            .fiedler_vector
            .iter()
            .zip(u_star)
            .map(|(a, b)| a * b)
            .sum();
        let s = if dot < 0.0 { -1.0 } else { 1.0 };
        split.fiedler_vector.iter().map(|x| s * x).collect()
    };
    Ok(TrialOutput {
        record: TrialRecord {
            trial: t,
            seed,
            completeness,
            misclassification,
            sqrt_n_linf: report.map(|r| r.sqrt_n_linf),
            l2_aligned: report.map(|r| r.l2_aligned),
            sign_agreement: report.map(|r| r.sign_agreement),
            threshold: report.map(|r| r.threshold),
            exact_recovery: misclassification == 0.0,
            hierarchy_recovered: hierarchy,
            fiedler_value: split.fiedler_value,
            provenance: split.provenance,
            wall_time: start.elapsed(),
        },
        vector,
    })
}

/// Runs every trial (in parallel, assembled in trial order).
pub fn run_synthetic(spec: &SyntheticSpec, base_dir: &Path) -> Result<SyntheticOutcome> {
    if spec.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let model = spec.model.load(base_dir)?;
    run_synthetic_model(&model, spec)
}

pub fn run_synthetic_model(model: &TreeModel, spec: &SyntheticSpec) -> Result<SyntheticOutcome> {
    let (_, u_star) = population_fiedler(model)?;
    let outputs: Vec<TrialOutput> = (0..spec.trials)
        .into_par_iter()
        .map(|t| run_trial(model, spec, t, &u_star))
        .collect::<Result<_>>()?;
    let mut fiedler_csv = String::from("vertex,value,true_label,population_value\n");
    let labels = model.assignment().labels;
    for (v, label) in labels.iter().enumerate() {
        let value = outputs[0]
            .vector
            .get(v)
            .map(|x| x.to_string())
            .unwrap_or_default();
        writeln!(fiedler_csv, "{v},{value},{label},{}", u_star[v])
            .expect("writing to a String cannot fail");
    }
    let records: Vec<TrialRecord> = outputs.into_iter().map(|o| o.record).collect();
    Ok(SyntheticOutcome {
        summary: summarize(&records),
        records,
        condition: condition_report(model)?,
        density: density_summary(model),
        fiedler_csv,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRow {
    pub depth: usize,
    pub clusters: usize,
    pub completeness: f64,
}

#[derive(Debug, Clone)]
pub struct RealOutcome {
    pub dataset: String,
    pub levels: Vec<LevelRow>,
    pub dendrogram: Dendrogram,
}

impl RealOutcome {
    pub fn completeness_csv(&self) -> String {
        let mut out = String::from("depth,clusters,completeness\n");
        for row in &self.levels {
            writeln!(out, "{},{},{}", row.depth, row.clusters, row.completeness)
                .expect("writing to a String cannot fail");
        }
        out
    }
}

/// Recursive split of a labelled network to `depth` levels, scoring the
/// flat clustering at each level against the labels.
pub fn run_real_dataset(
    data: &Dataset,
    variant: Variant,
    depth: usize,
    solver: SolverChoice,
) -> Result<RealOutcome> {
    if variant == Variant::Normalized {
        if let Some(v) = data.graph.degrees().iter().position(|&d| d == 0) {
            return Err(Error::ZeroDegree(v));
        }
    }
    let d = recursive_bipartition_with(
        &data.graph,
        &RecursionOptions {
            rule: &FixedDepth,
            max_depth: depth,
            split: SplitOptions {
                variant,
                eigen: EigenOptions::with_solver(solver),
            },
        },
    )?;
    let mut levels = Vec::with_capacity(depth);
    for level in 1..=depth {
        let flat = flat_clustering(&d, level);
        let mut distinct = flat.clone();
        distinct.sort_by_key(|c| c.to_string());
        distinct.dedup();
        levels.push(LevelRow {
            depth: level,
            clusters: distinct.len(),
            completeness: completeness_score(&data.labels, &flat)?,
        });
    }
    Ok(RealOutcome {
        dataset: data.name.clone(),
        levels,
        dendrogram: d,
    })
}

pub fn run_real(spec: &RealSpec, base_dir: &Path) -> Result<RealOutcome> {
    let data = match (&spec.dataset, &spec.edges, &spec.labels) {
        (_, Some(edges), Some(labels)) => {
            let name = spec.dataset.clone().unwrap_or_else(|| "custom".into());
            if spec.one_based {
                let loaded = crate::graph::read_edge_list(base_dir.join(edges), true)?;
                let labels = crate::graph::read_labels(base_dir.join(labels))?;
                Dataset {
                    name,
                    graph: loaded.graph,
                    labels,
                }
            } else {
                load_files(&name, &base_dir.join(edges), &base_dir.join(labels))?
            }
        }
        (Some(name), None, None) => {
            let dir = spec
                .data_dir
                .as_ref()
                .map(|d| base_dir.join(d))
                .unwrap_or_else(default_data_dir);
            load_named(name, &dir)?
        }
        _ => {
            return Err(Error::InvalidArgument(
                "a real experiment needs `dataset` or both `edges` and `labels`".into(),
            ))
        }
    };
    run_real_dataset(&data, spec.variant, spec.depth, spec.solver)
}

/// Rendered output files of one experiment, in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentFiles {
    pub files: Vec<(String, String)>,
}

impl ExperimentFiles {
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, content) in &self.files {
            std::fs::write(dir.join(name), content)?;
        }
        Ok(())
    }
}

/// Runs an experiment and renders its outputs. Relative paths in the spec
/// are resolved against `base_dir`.
pub fn run_experiment(spec: &ExperimentSpec, base_dir: &Path) -> Result<ExperimentFiles> {
    let files = match spec {
        ExperimentSpec::Synthetic(s) => {
            let out = run_synthetic(s, base_dir)?;
            vec![
                ("trials.csv".to_string(), out.trials_csv()),
                ("summary.json".to_string(), out.summary_json()),
                ("fiedler_trial0.csv".to_string(), out.fiedler_csv),
            ]
        }
        ExperimentSpec::Real(r) => {
            let out = run_real(r, base_dir)?;
            let mut dendrogram = out.dendrogram.to_json();
            dendrogram.push('\n');
            vec![
                ("completeness.csv".to_string(), out.completeness_csv()),
                ("dendrogram.json".to_string(), dendrogram),
            ]
        }
    };
    Ok(ExperimentFiles { files })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::TreeNode;

    fn two_block_spec(trials: usize) -> SyntheticSpec {
        let model = TreeModel::new(TreeNode::internal(
            0.02,
            TreeNode::leaf(0.5, 30),
            TreeNode::leaf(0.5, 30),
        ))
        .unwrap();
        SyntheticSpec {
            model: ModelSource::Inline(serde_json::from_str(&model.to_json_string()).unwrap()),
            trials,
            master_seed: 42,
            solver: SolverChoice::Auto,
            variant: Variant::Laplacian,
            hierarchy: true,
            out_dir: None,
        }
    }

    #[test]
    fn quantiles_interpolate() {
        let s = FieldSummary::of(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(s.min, 1.0);
        assert_eq!(s.max, 4.0);
        assert_eq!(s.median, 2.5);
        assert_eq!(s.q25, 1.75);
        assert_eq!(s.mean, 2.5);
        assert!(FieldSummary::of(&[]).is_none());
    }

    #[test]
    fn synthetic_runs_are_deterministic() {
        let spec = ExperimentSpec::Synthetic(two_block_spec(3));
        let a = run_experiment(&spec, Path::new(".")).unwrap();
        let b = run_experiment(&spec, Path::new(".")).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.files[2].1.lines().count(), 61);
    }

    #[test]
    fn summary_recomputes_from_records() {
        let out = run_synthetic(&two_block_spec(4), Path::new(".")).unwrap();
        assert_eq!(summarize(&out.records), out.summary);
        assert_eq!(out.summary.trials, 4);
    }

    #[test]
    fn spec_parsing() {
        let text = r#"{"kind": "real", "dataset": "karate", "depth": 2}"#;
        let ExperimentSpec::Real(r) = ExperimentSpec::from_json_str(text).unwrap() else {
            panic!("expected a real spec");
        };
        assert_eq!(r.depth, 2);
        assert_eq!(r.variant, Variant::Laplacian);
        assert!(ExperimentSpec::from_json_str(r#"{"kind": "real", "bogus": 1}"#).is_err());
        let zero = r#"{"kind": "synthetic", "model": "m.json", "trials": 0, "master_seed": 1}"#;
        assert!(ExperimentSpec::from_json_str(zero).is_err());
    }

    #[test]
    fn karate_first_level() {
        let out = run_real_dataset(
            &crate::datasets::karate(),
            Variant::Laplacian,
            1,
            SolverChoice::Auto,
        )
        .unwrap();
        assert_eq!(out.levels[0].clusters, 2);
        assert!(out.levels[0].completeness > 0.5);
    }
}
