//! Population-level objects of a [`TreeModel`]: the expected adjacency `P`,
//! the population Laplacian `L* = diag(P 1) - P` and its closed-form
//! eigenstructure.
//!
//! Every node `s` contributes the eigenvalue
//! `lambda(s) = n_s p_s + sum_{i=1}^{|s|} (n_{s(i)} - n_{s(i-1)}) p_{s(i)}`,
//! where `s(i)` is the ancestor `i` levels up. An internal node contributes
//! one eigenvector separating its two children; a leaf contributes the
//! `n_s - 1` dimensional mean-zero subspace on its community.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tree::{NodeCode, NodeInfo, TreeModel};

/// Default cap on `n` for the dense population matrices.
pub const DEFAULT_POPULATION_LIMIT: usize = 5000;

/// Relative tolerance under which two analytic eigenvalues are merged.
pub const MERGE_TOLERANCE: f64 = 1e-12;

fn check_size(model: &TreeModel, limit: usize) -> Result<()> {
    if model.n() > limit {
        return Err(Error::TooLarge {
            n: model.n(),
            limit,
        });
    }
    Ok(())
}

/// Expected adjacency `P_ij = p_{LCA(c(i), c(j))}` with zero diagonal.
pub fn expected_adjacency(model: &TreeModel) -> Result<DMatrix<f64>> {
    expected_adjacency_limited(model, DEFAULT_POPULATION_LIMIT)
}

pub fn expected_adjacency_limited(model: &TreeModel, limit: usize) -> Result<DMatrix<f64>> {
    check_size(model, limit)?;
    let blocks = model.block_matrix();
    let leaf = model.leaf_index_per_vertex();
    let n = model.n();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            blocks[(leaf[i], leaf[j])]
        }
    }))
}

/// Population Laplacian `L* = diag(P 1) - P`.
pub fn population_laplacian(model: &TreeModel) -> Result<DMatrix<f64>> {
    population_laplacian_limited(model, DEFAULT_POPULATION_LIMIT)
}

pub fn population_laplacian_limited(model: &TreeModel, limit: usize) -> Result<DMatrix<f64>> {
    let p = expected_adjacency_limited(model, limit)?;
    let mut l = -p;
    for i in 0..l.nrows() {
        let s: f64 = -l.row(i).sum();
        l[(i, i)] = s;
    }
    Ok(l)
}

/// Closed-form `lambda*(s; T)` for any node `s`.
pub fn analytic_eigenvalue(model: &TreeModel, s: &NodeCode) -> Result<f64> {
    let node = model.node(s)?;
    let mut value = node.size as f64 * node.p;
    let mut below = s.clone();
    while let Some(up) = below.parent() {
        let anc = model.node(&up)?;
        let child = model.node(&below)?;
        value += (anc.size - child.size) as f64 * anc.p;
        below = up;
    }
    Ok(value)
}

/// Unit vector of an internal node: `+sqrt(n_R / (n_L n_s))` on the left
/// child's vertices, `-sqrt(n_L / (n_R n_s))` on the right child's.
pub fn internal_node_vector(model: &TreeModel, s: &NodeCode) -> Result<Vec<f64>> {
    let node = model.node(s)?;
    if node.is_leaf {
        return Err(Error::InvalidArgument(format!(
            "node `{s}` is a leaf and has no splitting vector"
        )));
    }
    let left = model.node(&s.left())?;
    let right = model.node(&s.right())?;
    let (nl, nr, ns) = (left.size as f64, right.size as f64, node.size as f64);
    let mut v = vec![0.0; model.n()];
    let a = (nr / (nl * ns)).sqrt();
    let b = -(nl / (nr * ns)).sqrt();
    v[left.vertices.clone()].iter_mut().for_each(|x| *x = a);
    v[right.vertices.clone()].iter_mut().for_each(|x| *x = b);
    Ok(v)
}

/// Helmert-type orthonormal basis of the mean-zero vectors supported on a
/// leaf: column `k` (1-based) has `k` entries `1/sqrt(k(k+1))` followed by
/// one entry `-k/sqrt(k(k+1))`.
fn leaf_basis(leaf: &NodeInfo, n: usize) -> Vec<Vec<f64>> {
    let start = leaf.vertices.start;
    (1..leaf.size)
        .map(|k| {
            let kf = k as f64;
            let norm = (kf * (kf + 1.0)).sqrt();
            let mut v = vec![0.0; n];
            for x in &mut v[start..start + k] {
                *x = 1.0 / norm;
            }
            v[start + k] = -kf / norm;
            v
        })
        .collect()
}

/// One eigenvalue of `L*` with its eigenspace.
#[derive(Debug, Clone)]
pub struct SpectrumEntry {
    /// Tree nodes contributing to this eigenvalue, in depth-first order.
    pub nodes: Vec<NodeCode>,
    pub eigenvalue: f64,
    pub multiplicity: usize,
    /// `n x multiplicity` block with orthonormal columns.
    pub basis: DMatrix<f64>,
}

/// Closed-form spectrum of `L*`, ascending by eigenvalue, excluding the
/// trivial pair `(0, 1/sqrt(n))`.
#[derive(Debug, Clone)]
pub struct PopulationSpectrum {
    pub n: usize,
    pub entries: Vec<SpectrumEntry>,
}

impl PopulationSpectrum {
    pub fn trivial_vector(&self) -> Vec<f64> {
        vec![1.0 / (self.n as f64).sqrt(); self.n]
    }

    /// All `n` eigenvalues with multiplicity, ascending, including the zero.
    pub fn eigenvalues_with_multiplicity(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        for e in &self.entries {
            out.extend(std::iter::repeat(e.eigenvalue).take(e.multiplicity));
        }
        out
    }

    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }
}

pub fn analytic_spectrum(model: &TreeModel) -> Result<PopulationSpectrum> {
    analytic_spectrum_limited(model, DEFAULT_POPULATION_LIMIT)
}

pub fn analytic_spectrum_limited(model: &TreeModel, limit: usize) -> Result<PopulationSpectrum> {
    check_size(model, limit)?;
    let n = model.n();
    let mut raw: Vec<(f64, NodeCode, Vec<Vec<f64>>)> = Vec::new();
    for node in model.nodes() {
        let columns = if node.is_leaf {
            leaf_basis(node, n)
        } else {
            vec![internal_node_vector(model, &node.code)?]
        };
        if columns.is_empty() {
            continue;
        }
        raw.push((
            analytic_eigenvalue(model, &node.code)?,
            node.code.clone(),
            columns,
        ));
    }
    // Stable sort keeps depth-first order among equal eigenvalues.
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut entries: Vec<SpectrumEntry> = Vec::new();
    let mut pending: Option<(f64, Vec<NodeCode>, Vec<Vec<f64>>)> = None;
    for (value, code, columns) in raw {
        match pending.as_mut() {
            Some((v, codes, cols))
                if (value - *v).abs() <= MERGE_TOLERANCE * value.abs().max(v.abs()) =>
            {
                codes.push(code);
                cols.extend(columns);
            }
            _ => {
                if let Some(done) = pending.take() {
                    entries.push(finish_entry(done, n));
                }
                pending = Some((value, vec![code], columns));
            }
        }
    }
    if let Some(done) = pending {
        entries.push(finish_entry(done, n));
    }
    Ok(PopulationSpectrum { n, entries })
}

fn finish_entry(
    (eigenvalue, nodes, cols): (f64, Vec<NodeCode>, Vec<Vec<f64>>),
    n: usize,
) -> SpectrumEntry {
    let basis = DMatrix::from_fn(n, cols.len(), |r, c| cols[c][r]);
    SpectrumEntry {
        nodes,
        eigenvalue,
        multiplicity: cols.len(),
        basis,
    }
}

/// Fiedler pair of `L*`: `(n p_root, root splitting vector)`. The vector is
/// positive on the left subtree's vertices.
pub fn population_fiedler(model: &TreeModel) -> Result<(f64, Vec<f64>)> {
    if model.k() < 2 {
        return Err(Error::SingleCommunity);
    }
    let root = NodeCode::root();
    Ok((
        analytic_eigenvalue(model, &root)?,
        internal_node_vector(model, &root)?,
    ))
}

/// Extremes of the expected adjacency (zero diagonal).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DensitySummary {
    /// `max_{i != j} p_ij`.
    pub p_star: f64,
    /// `max_i (1/n) sum_j p_ij`.
    pub p_bar_star: f64,
    /// `min_i (1/n) sum_j p_ij`.
    pub p_lower_star: f64,
    /// `max_i sqrt((1/n) sum_j p_ij^2)`.
    pub p_bar2_star: f64,
}

/// Computed per leaf from the block matrix, without forming `P`.
pub fn density_summary(model: &TreeModel) -> DensitySummary {
    let blocks = model.block_matrix();
    let sizes: Vec<usize> = model.leaves().map(|l| l.size).collect();
    let n = model.n() as f64;
    let k = sizes.len();
    let mut out = DensitySummary {
        p_star: 0.0,
        p_bar_star: f64::NEG_INFINITY,
        p_lower_star: f64::INFINITY,
        p_bar2_star: 0.0,
    };
    for a in 0..k {
        let (mut sum, mut sq) = (0.0, 0.0);
        for b in 0..k {
            let count = if a == b { sizes[b] - 1 } else { sizes[b] } as f64;
            let p = blocks[(a, b)];
            sum += count * p;
            sq += count * p * p;
            if count > 0.0 {
                out.p_star = out.p_star.max(p);
            }
        }
        out.p_bar_star = out.p_bar_star.max(sum / n);
        out.p_lower_star = out.p_lower_star.min(sum / n);
        out.p_bar2_star = out.p_bar2_star.max((sq / n).sqrt());
    }
    out
}
