use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::dense::{full_eigen_rows, lowest_selective};
use super::lanczos;
use super::sparse::SparseSym;
use crate::error::{Error, Result};

/// Which eigensolver backend to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    /// Dense below [`EigenOptions::dense_threshold`] vertices, iterative above.
    #[default]
    Auto,
    Dense,
    Iterative,
}

impl FromStr for SolverChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "dense" => Ok(Self::Dense),
            "iterative" | "lanczos" => Ok(Self::Iterative),
            other => Err(Error::InvalidArgument(format!(
                "unknown solver `{other}` (expected auto, dense or iterative)"
            ))),
        }
    }
}

/// Backend that actually produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Dense,
    Iterative,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Dense => "dense",
            Backend::Iterative => "iterative",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub solver: SolverChoice,
    pub dense_threshold: usize,
    /// Relative residual target: `||M v - lambda v|| <= tol * max(1, ||M||)`.
    pub tol: f64,
    pub max_restarts: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            solver: SolverChoice::Auto,
            dense_threshold: 2048,
            tol: 1e-10,
            max_restarts: 4000,
        }
    }
}

impl EigenOptions {
    pub fn with_solver(solver: SolverChoice) -> Self {
        Self {
            solver,
            ..Self::default()
        }
    }
}

/// The smallest eigenpairs of a symmetric matrix, ascending.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub backend: Backend,
    /// Largest `||M v - lambda v|| / max(1, ||M||)` over the returned pairs.
    pub max_residual: f64,
    /// Number of returned eigenvalues below `1e-8 * max|M_ii|`.
    pub zero_multiplicity: usize,
    /// Matrix-vector products used by the iterative backend (0 for dense).
    pub matvecs: usize,
}

/// Flips `v` so its largest-magnitude entry (lowest index on ties) is positive.
pub fn normalize_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Tolerance below which an eigenvalue counts as zero.
pub fn zero_tolerance(m: &SparseSym) -> f64 {
    1e-8 * m.max_abs_diagonal().max(1.0)
}

fn residual(m: &SparseSym, lambda: f64, v: &[f64]) -> f64 {
    let mv = m.matvec(v);
    mv.iter()
        .zip(v)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// The `k` smallest eigenpairs of `m`.
pub fn smallest_eigenpairs(m: &SparseSym, k: usize, opts: &EigenOptions) -> Result<SpectralResult> {
    let n = m.n();
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "requested {k} eigenpairs of a {n}x{n} matrix"
        )));
    }
    let scale = m.norm_bound().max(1.0);
    let backend = match opts.solver {
        SolverChoice::Dense => Backend::Dense,
        SolverChoice::Iterative => Backend::Iterative,
        SolverChoice::Auto if n <= opts.dense_threshold => Backend::Dense,
        SolverChoice::Auto => Backend::Iterative,
    };
    let (values, mut vectors, matvecs) = match backend {
        Backend::Dense => {
            let (v, w) = dense_pairs(m, k, opts.tol * scale)?;
            (v, w, 0)
        }
        Backend::Iterative => iterative_pairs(m, k, opts)?,
    };
    for v in vectors.iter_mut() {
        normalize_sign(v);
    }
    let max_residual = values
        .iter()
        .zip(&vectors)
        .map(|(&l, v)| residual(m, l, v) / scale)
        .fold(0.0, f64::max);
    let zero = zero_tolerance(m);
    let zero_multiplicity = values.iter().filter(|v| v.abs() <= zero).count();
    Ok(SpectralResult {
        eigenvalues: values,
        eigenvectors: vectors,
        backend,
        max_residual,
        zero_multiplicity,
        matvecs,
    })
}

fn dense_pairs(m: &SparseSym, k: usize, abs_tol: f64) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = m.n();
    if k == 0 {
        return Ok((vec![], vec![]));
    }
    if n > 64 && 4 * k <= n {
        let (values, vectors) = lowest_selective(m.to_dense_rows(), n, k)?;
        let worst = values
            .iter()
            .zip(&vectors)
            .map(|(&l, v)| residual(m, l, v))
            .fold(0.0, f64::max);
        if worst <= abs_tol {
            return Ok((values, vectors));
        }
    }
    let (mut values, mut vectors) = full_eigen_rows(m.to_dense_rows(), n)?;
    values.truncate(k);
    vectors.truncate(k);
    Ok((values, vectors))
}

fn iterative_pairs(
    m: &SparseSym,
    k: usize,
    opts: &EigenOptions,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, usize)> {
    let n = m.n();
    if k == 0 {
        return Ok((vec![], vec![], 0));
    }
    let scale = m.norm_bound().max(1.0);
    let abs_tol = opts.tol * scale;
    if m.is_laplacian_like() {
        let ones = vec![1.0 / (n as f64).sqrt(); n];
        let rest = lanczos::smallest(
            m,
            k - 1,
            std::slice::from_ref(&ones),
            abs_tol,
            opts.max_restarts,
        )?;
        let mut values = vec![0.0];
        values.extend(rest.values);
        let mut vectors = vec![ones];
        vectors.extend(rest.vectors);
        Ok((values, vectors, rest.matvecs))
    } else {
        let out = lanczos::smallest(m, k, &[], abs_tol, opts.max_restarts)?;
        Ok((out.values, out.vectors, out.matvecs))
    }
}

/// Vertex sets of the connected components of the off-diagonal pattern,
/// reported when a Fiedler vector is requested on a disconnected graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub components: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct Fiedler {
    pub value: f64,
    pub vector: Vec<f64>,
    pub backend: Backend,
    pub max_residual: f64,
}

#[derive(Debug, Clone)]
pub enum FiedlerOutcome {
    Connected(Fiedler),
    Disconnected(ConnectivityReport),
}

/// Second-smallest eigenpair of a Laplacian-type matrix. Connectivity is
/// decided from the sparsity pattern before any eigensolve.
pub fn fiedler_vector(m: &SparseSym, opts: &EigenOptions) -> Result<FiedlerOutcome> {
    if m.n() < 2 {
        return Err(Error::InvalidArgument(
            "a Fiedler vector needs at least two vertices".into(),
        ));
    }
    let components = m.pattern_graph().connected_components();
    if components.len() > 1 {
        return Ok(FiedlerOutcome::Disconnected(ConnectivityReport {
            components,
        }));
    }
    let res = smallest_eigenpairs(m, 2, opts)?;
    Ok(FiedlerOutcome::Connected(Fiedler {
        value: res.eigenvalues[1],
        vector: res.eigenvectors[1].clone(),
        backend: res.backend,
        max_residual: res.max_residual,
    }))
}
