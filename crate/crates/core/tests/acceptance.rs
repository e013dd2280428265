//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the report is always shown.
//! The process fails if any criterion fails for a reason other than a
//! benchmark dataset missing from the data directory.

use std::collections::HashMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use hsbm_core::clustering::{sign_split, Variant};
use hsbm_core::datasets::{load_named, DATA_DIR_ENV};
use hsbm_core::experiment::{
    run_experiment, run_real_dataset, run_synthetic_model, ExperimentSpec, ModelSource,
    SyntheticSpec,
};
use hsbm_core::generate::random_tree_model;
use hsbm_core::linalg::{
    fiedler_vector, laplacian, smallest_eigenpairs, subspace_sin_theta, symmetric_eigen,
    EigenOptions, FiedlerOutcome, SolverChoice,
};
use hsbm_core::metrics::{
    completeness_score, condition_report, laplacian_decomposition, same_partition,
};
use hsbm_core::population::{analytic_spectrum, density_summary, population_laplacian};
use hsbm_core::rng::SplitMix64;
use hsbm_core::tree::{NodeCode, TreeModel, TreeNode};
use hsbm_core::{sample_graph, Error, SampleSpec};
use nalgebra::DMatrix;

const EIGEN_TOL: f64 = 1e-9;
const SIN_THETA_TOL: f64 = 1e-8;
/// Analytic eigenvalues closer than this are compared as one subspace:
/// individual eigenvectors of nearly equal eigenvalues are not determined.
const CLUSTER_GAP: f64 = 1e-6;
const SOLVER_TOL: f64 = 1e-8;
const COMPLETENESS_TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    /// The failure is only due to missing benchmark files.
    data_missing: bool,
    detail: String,
}

impl Outcome {
    fn check(pass: bool, detail: String) -> Self {
        Self {
            pass,
            data_missing: false,
            detail,
        }
    }
}

/// The 50 random models shared by the first two criteria.
fn random_models() -> Vec<TreeModel> {
    let mut rng = SplitMix64::new(0x5eed_0001);
    (0..50)
        .map(|_| {
            let k = rng.range_inclusive(2, 6);
            let n = rng.range_inclusive(20, 120);
            random_tree_model(&mut rng, k, n, 2, 0.01, 0.9)
        })
        .collect()
}

/// Full dense eigendecomposition, ascending, with its worst residual
/// `max_i ||M v_i - lambda_i v_i||` so the reference is itself checked.
fn reference_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>, f64) {
    let (values, vectors) = symmetric_eigen(m).expect("dense solver converges");
    let residual = (0..m.nrows())
        .map(|c| (m * vectors.column(c) - vectors.column(c) * values[c]).norm())
        .fold(0.0, f64::max);
    (values, vectors, residual)
}

fn analytic_spectrum_oracle() -> Outcome {
    let (mut max_dev, mut max_sin, mut max_res, mut grouped) = (0.0f64, 0.0f64, 0.0f64, 0usize);
    for model in random_models() {
        let n = model.n();
        let spectrum = analytic_spectrum(&model).expect("small model");
        let (values, vectors, residual) =
            reference_eigen(&population_laplacian(&model).expect("small model"));
        max_res = max_res.max(residual);
        let analytic = spectrum.eigenvalues_with_multiplicity();
        assert_eq!(analytic.len(), n);
        for (a, d) in analytic.iter().zip(&values) {
            max_dev = max_dev.max((a - d).abs());
        }

        let ones = DMatrix::from_column_slice(n, 1, &spectrum.trivial_vector());
        max_sin =
            max_sin.max(subspace_sin_theta(&ones, &vectors.columns(0, 1).into_owned()).unwrap());
        let mut offset = 1;
        let entries = &spectrum.entries;
        let mut i = 0;
        while i < entries.len() {
            let mut j = i + 1;
            while j < entries.len()
                && entries[j].eigenvalue - entries[j - 1].eigenvalue < CLUSTER_GAP
            {
                j += 1;
            }
            grouped += j - i - 1;
            let m: usize = entries[i..j].iter().map(|e| e.multiplicity).sum();
            let cols: Vec<_> = entries[i..j]
                .iter()
                .flat_map(|e| e.basis.column_iter())
                .collect();
            let basis = DMatrix::from_columns(&cols);
            let dense = vectors.columns(offset, m).into_owned();
            max_sin = max_sin.max(subspace_sin_theta(&basis, &dense).unwrap());
            offset += m;
            i = j;
        }
    }
    Outcome::check(
        max_dev < EIGEN_TOL && max_sin < SIN_THETA_TOL && max_res < EIGEN_TOL,
        format!(
            "50 trees: max |eigenvalue diff| {max_dev:.2e} (tol {EIGEN_TOL:.0e}), max sin theta {max_sin:.2e} \
             (tol {SIN_THETA_TOL:.0e}), dense residual {max_res:.2e}, {grouped} near-degenerate merges"
        ),
    )
}

fn top_level_identities() -> Outcome {
    let (mut dev_root, mut dev_next, mut count_bad, mut not_simple) =
        (0.0f64, 0.0f64, 0usize, 0usize);
    for model in random_models() {
        let n = model.n() as f64;
        let root = NodeCode::root();
        let p = |c: &NodeCode| model.p(c).unwrap();
        let size = |c: &NodeCode| model.size(c).unwrap() as f64;
        let (values, _, _) = reference_eigen(&population_laplacian(&model).unwrap());
        let (n0, n1) = (size(&root.left()), size(&root.right()));
        let expected_next =
            (n1 * p(&root.right()) + n0 * p(&root)).min(n0 * p(&root.left()) + n1 * p(&root));
        dev_root = dev_root.max((values[1] - n * p(&root)).abs());
        dev_next = dev_next.max((values[2] - expected_next).abs());
        if (values[2] - values[1]).abs() <= EIGEN_TOL || (values[1] - values[0]).abs() <= EIGEN_TOL
        {
            not_simple += 1;
        }
        let threshold = n * density_summary(&model).p_lower_star;
        if values.iter().filter(|&&v| v < threshold).count() > model.k() {
            count_bad += 1;
        }
    }
    Outcome::check(
        dev_root < EIGEN_TOL && dev_next < EIGEN_TOL && count_bad == 0 && not_simple == 0,
        format!(
            "50 trees: second eigenvalue dev {dev_root:.2e}, third eigenvalue dev {dev_next:.2e}, \
             {not_simple} non-simple, {count_bad} trees with more than K eigenvalues below n*p_lower"
        ),
    )
}

fn decomposition() -> Outcome {
    let mut rng = SplitMix64::new(0x5eed_0003);
    let n = 200;
    let (mut sums_ok, mut max_u, mut max_l3) = (0usize, 0.0f64, 0.0f64);
    for t in 0..20u64 {
        let n0 = rng.range_inclusive(40, 160);
        let p_root = rng.uniform(0.01, 0.1);
        let p0 = rng.uniform(p_root + 0.05, 0.9);
        let p1 = rng.uniform(p_root + 0.05, 0.9);
        let model = TreeModel::new(TreeNode::internal(
            p_root,
            TreeNode::leaf(p0, n0),
            TreeNode::leaf(p1, n - n0),
        ))
        .unwrap();
        let g = sample_graph(&SampleSpec::new(&model, 1000 + t));
        let report = laplacian_decomposition(&g, &model).unwrap();
        sums_ok += report.exact_sum as usize;
        max_u = max_u.max(report.u_star_residual);
        max_l3 = max_l3.max((report.l3_lambda3 - report.l3_lambda3_expected).abs());
    }
    let u_tol = 1e-9 * n as f64;
    Outcome::check(
        sums_ok == 20 && max_u <= u_tol && max_l3 < EIGEN_TOL,
        format!(
            "20 graphs: exact sums {sums_ok}/20, max ||L1 u* - n p u*|| {max_u:.2e} (tol {u_tol:.0e}), \
             L3 third eigenvalue dev {max_l3:.2e}"
        ),
    )
}

fn five_community_model() -> TreeModel {
    TreeModel::new(TreeNode::internal(
        0.02,
        TreeNode::internal(
            0.15,
            TreeNode::leaf(0.5, 200),
            TreeNode::internal(0.2, TreeNode::leaf(0.5, 200), TreeNode::leaf(0.5, 200)),
        ),
        TreeNode::internal(0.2, TreeNode::leaf(0.5, 200), TreeNode::leaf(0.5, 200)),
    ))
    .unwrap()
}

fn sweep_spec(trials: usize, master_seed: u64, hierarchy: bool) -> SyntheticSpec {
    SyntheticSpec {
        model: ModelSource::Path(PathBuf::new()),
        trials,
        master_seed,
        solver: SolverChoice::Dense,
        variant: Variant::Laplacian,
        hierarchy,
        out_dir: None,
    }
}

fn exact_recovery(elapsed: &mut Duration) -> (Outcome, Outcome) {
    let start = Instant::now();
    let out = run_synthetic_model(&five_community_model(), &sweep_spec(100, 4, true)).unwrap();
    *elapsed = start.elapsed();
    let s = &out.summary;
    let hierarchy = s.hierarchy_recovered_count.unwrap_or(0);
    let fast = elapsed.as_secs_f64() < 300.0;
    let recovery = Outcome::check(
        s.exact_recovery_count >= 95 && hierarchy >= 90 && fast,
        format!(
            "n=1000, 5 communities, 100 seeds: first split exact {}/100 (need 95), hierarchy {hierarchy}/100 \
             (need 90), {:.1} s (limit 300 s)",
            s.exact_recovery_count,
            elapsed.as_secs_f64()
        ),
    );
    let implication = Outcome::check(
        s.linf_violations == 0,
        format!(
            "{} of 100 trials below the sup-norm threshold, {} with sign disagreement",
            s.linf_eligible, s.linf_violations
        ),
    );
    (recovery, implication)
}

fn multi_scale() -> Outcome {
    let pair = || TreeNode::internal(0.06, TreeNode::leaf(0.4, 250), TreeNode::leaf(0.4, 250));
    let model = TreeModel::new(TreeNode::internal(0.02, pair(), pair())).unwrap();
    let out = run_synthetic_model(&model, &sweep_spec(100, 6, false)).unwrap();
    let c = condition_report(&model).unwrap();
    let exact = out.summary.exact_recovery_count;
    let ordered = c.eigen_gap_ratio_old < c.c3_ratio && c.eigen_gap_ratio_old < c.c2_ratio;
    Outcome::check(
        exact >= 90 && ordered,
        format!(
            "4 x 250: first split exact {exact}/100 (need 90); ratios old gap {:.3}, c3 {:.3}, c2 {:.3}",
            c.eigen_gap_ratio_old, c.c3_ratio, c.c2_ratio
        ),
    )
}

fn data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

fn real_networks() -> Outcome {
    let start = Instant::now();
    let targets = [
        ("dolphins", 1.0, 1e-9),
        ("karate", 0.840, 0.02),
        ("football", 0.802, 0.02),
        ("ukfaculty", 0.908, 0.02),
        ("polblogs", 0.007, 0.02),
    ];
    let dir = data_dir();
    let (mut parts, mut missing, mut wrong) = (Vec::new(), Vec::new(), 0);
    for (name, expected, tol) in targets {
        let data = match load_named(name, &dir) {
            Ok(d) => d,
            Err(Error::DatasetUnavailable { .. }) => {
                missing.push(name);
                parts.push(format!("{name} unavailable"));
                continue;
            }
            Err(e) => {
                wrong += 1;
                parts.push(format!("{name} error: {e}"));
                continue;
            }
        };
        match run_real_dataset(&data, Variant::Laplacian, 1, SolverChoice::Auto) {
            Ok(out) => {
                let score = out.levels[0].completeness;
                let ok = (score - expected).abs() <= tol;
                wrong += usize::from(!ok);
                parts.push(format!(
                    "{name} {score:.3} (target {expected:.3} +/- {tol})"
                ));
            }
            Err(e) => {
                wrong += 1;
                parts.push(format!("{name} error: {e}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    wrong += usize::from(secs >= 60.0);
    Outcome {
        pass: wrong == 0 && missing.is_empty(),
        data_missing: wrong == 0 && !missing.is_empty(),
        detail: format!(
            "{}; {secs:.1} s; data dir {}",
            parts.join(", "),
            dir.display()
        ),
    }
}

/// Completeness straight from the definition: `1 - H(K|C) / H(K)` with
/// entropies summed over an explicit contingency table.
fn completeness_brute_force(truth: &[usize], est: &[usize]) -> f64 {
    let n = truth.len() as f64;
    let kc = truth.iter().max().unwrap() + 1;
    let kk = est.iter().max().unwrap() + 1;
    let mut table = vec![vec![0.0f64; kk]; kc];
    for (&c, &k) in truth.iter().zip(est) {
        table[c][k] += 1.0;
    }
    let mut cluster_sizes = vec![0.0f64; kk];
    for row in &table {
        for (size, count) in cluster_sizes.iter_mut().zip(row) {
            *size += count;
        }
    }
    let mut h_k = 0.0;
    for &count in &cluster_sizes {
        if count > 0.0 {
            h_k -= count / n * (count / n).ln();
        }
    }
    if h_k == 0.0 {
        return 1.0;
    }
    let mut h_k_given_c = 0.0;
    for row in &table {
        let class: f64 = row.iter().sum();
        for &count in row {
            if count > 0.0 {
                h_k_given_c -= count / n * (count / class).ln();
            }
        }
    }
    1.0 - h_k_given_c / h_k
}

fn completeness_oracle() -> Outcome {
    let mut rng = SplitMix64::new(0x5eed_0008);
    let (mut max_dev, mut max_perm) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let n = rng.range_inclusive(1, 30);
        let kc = rng.range_inclusive(1, 6);
        let kk = rng.range_inclusive(1, 6);
        let truth: Vec<usize> = (0..n).map(|_| rng.range_inclusive(0, kc - 1)).collect();
        let est: Vec<usize> = (0..n).map(|_| rng.range_inclusive(0, kk - 1)).collect();
        let score = completeness_score(&truth, &est).unwrap();
        max_dev = max_dev.max((score - completeness_brute_force(&truth, &est)).abs());

        let mut order: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut order);
        let mut rename: Vec<usize> = (0..kk).collect();
        rng.shuffle(&mut rename);
        let truth_p: Vec<String> = order.iter().map(|&i| format!("c{}", truth[i])).collect();
        let est_p: Vec<usize> = order.iter().map(|&i| rename[est[i]] + 100).collect();
        max_perm = max_perm.max((completeness_score(&truth_p, &est_p).unwrap() - score).abs());
    }
    Outcome::check(
        max_dev < COMPLETENESS_TOL && max_perm < COMPLETENESS_TOL,
        format!("200 pairs: max oracle diff {max_dev:.2e}, max permutation diff {max_perm:.2e}"),
    )
}

fn solver_cross_check() -> Outcome {
    let model = TreeModel::new(TreeNode::internal(
        0.005,
        TreeNode::leaf(0.02, 1500),
        TreeNode::leaf(0.02, 1500),
    ))
    .unwrap();
    let (mut max_dev, mut partitions_equal, mut slowest, mut graphs) = (0.0f64, true, 0.0f64, 0);
    for seed in [11u64, 12] {
        let l = laplacian(&sample_graph(&SampleSpec::new(&model, seed)));
        let dense_opts = EigenOptions::with_solver(SolverChoice::Dense);
        let iter_opts = EigenOptions::with_solver(SolverChoice::Iterative);
        let dense = smallest_eigenpairs(&l, 5, &dense_opts).unwrap();
        let start = Instant::now();
        let lanczos = smallest_eigenpairs(&l, 5, &iter_opts).unwrap();
        slowest = slowest.max(start.elapsed().as_secs_f64());
        for (a, b) in dense.eigenvalues.iter().zip(&lanczos.eigenvalues) {
            max_dev = max_dev.max((a - b).abs());
        }
        let split = |opts: &EigenOptions| match fiedler_vector(&l, opts).unwrap() {
            FiedlerOutcome::Connected(f) => sign_split(&f.vector),
            FiedlerOutcome::Disconnected(_) => panic!("sampled graph is disconnected"),
        };
        partitions_equal &= same_partition(&split(&dense_opts), &split(&iter_opts));
        graphs += 1;
    }
    Outcome::check(
        max_dev < SOLVER_TOL && partitions_equal && slowest < 60.0,
        format!(
            "{graphs} graphs at n=3000: max eigenvalue diff {max_dev:.2e} (tol {SOLVER_TOL:.0e}), \
             partitions equal {partitions_equal}, slowest Lanczos {slowest:.2} s"
        ),
    )
}

fn reproducibility() -> Outcome {
    let dir = tempfile_dir();
    let model = r#"{"tree": {"p": 0.03, "children": [
        {"p": 0.1, "children": [{"p": 0.5, "size": 40}, {"p": 0.45, "size": 30}]},
        {"p": 0.4, "size": 50}]}}"#;
    std::fs::write(dir.join("model.json"), model).unwrap();
    let specs = [
        r#"{"kind": "synthetic", "model": "model.json", "trials": 8, "master_seed": 10}"#,
        r#"{"kind": "synthetic", "model": "model.json", "trials": 4, "master_seed": 10, "solver": "iterative"}"#,
        r#"{"kind": "real", "dataset": "karate", "depth": 3}"#,
        r#"{"kind": "real", "dataset": "karate", "depth": 2, "variant": "N"}"#,
    ];
    let mut differing = Vec::new();
    let mut files = 0;
    for (i, text) in specs.iter().enumerate() {
        let spec = ExperimentSpec::from_json_str(text).unwrap();
        let first = run_experiment(&spec, &dir).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let second = pool.install(|| run_experiment(&spec, &dir)).unwrap();
        files += first.files.len();
        let second: HashMap<_, _> = second.files.into_iter().collect();
        for (name, content) in &first.files {
            if second.get(name) != Some(content) {
                differing.push(format!("spec {i} {name}"));
            }
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Outcome::check(
        differing.is_empty(),
        format!(
            "{} specs, {files} files, 1 vs 4 threads: {} differing {:?}",
            specs.len(),
            differing.len(),
            differing
        ),
    )
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hsbm-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(id: usize, f: impl FnOnce() -> Outcome, results: &mut Vec<(usize, Outcome)>) {
    let start = Instant::now();
    let outcome = f();
    report(id, &outcome, start.elapsed().as_secs_f64());
    results.push((id, outcome));
}

fn main() {
    let mut results = Vec::new();
    run(1, analytic_spectrum_oracle, &mut results);
    run(2, top_level_identities, &mut results);
    run(3, decomposition, &mut results);
    let mut elapsed = Duration::ZERO;
    let (recovery, implication) = exact_recovery(&mut elapsed);
    report(4, &recovery, elapsed.as_secs_f64());
    report(5, &implication, 0.0);
    results.push((4, recovery));
    results.push((5, implication));
    run(6, multi_scale, &mut results);
    run(7, real_networks, &mut results);
    run(8, completeness_oracle, &mut results);
    run(9, solver_cross_check, &mut results);
    run(10, reproducibility, &mut results);

    let passed = results.iter().filter(|(_, o)| o.pass).count();
    let blocking: Vec<usize> = results
        .iter()
        .filter(|(_, o)| !o.pass && !o.data_missing)
        .map(|(id, _)| *id)
        .collect();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if !blocking.is_empty() {
        println!("failing criteria: {blocking:?}");
        std::process::exit(1);
    }
}

fn report(id: usize, o: &Outcome, secs: f64) {
    let status = if o.pass { "PASS" } else { "FAIL" };
    let note = if o.data_missing {
        " [dataset missing]"
    } else {
        ""
    };
    println!(
        "criterion {id:>2} {status}{note} ({secs:.1} s): {}",
        o.detail
    );
}
