use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Symmetric sparse matrix holding the lower triangle (diagonal included)
/// in compressed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSym {
    /// Builds from `(i, j, value)` triplets of either triangle; duplicate
    /// positions are summed and `(i, j)` / `(j, i)` are treated as the same entry.
    pub fn from_triplets(
        n: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for (i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({i}, {j}) outside a {n}x{n} matrix"
                )));
            }
            let (r, c) = (i.max(j), i.min(j));
            *rows[r].entry(c).or_insert(0.0) += v;
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if v != 0.0 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(Self {
            n,
            row_ptr,
            cols,
            vals,
        })
    }

    /// Lower-triangle entries `(i, j, value)` with `j <= i`.
    pub fn lower_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (i, self.cols[k], self.vals[k]))
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz_lower(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = (i.max(j), i.min(j));
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `y = M x` for the full symmetric matrix.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let xi = x[i];
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k];
                let a = self.vals[k];
                if j == i {
                    acc += a * xi;
                } else {
                    acc += a * x[j];
                    y[j] += a * xi;
                }
            }
            y[i] += acc;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    /// Row sums of the full matrix.
    pub fn row_sums(&self) -> Vec<f64> {
        self.matvec(&vec![1.0; self.n])
    }

    /// Gershgorin bound on the spectral radius: the largest absolute row sum.
    pub fn norm_bound(&self) -> f64 {
        let mut sums = vec![0.0; self.n];
        for (i, j, v) in self.lower_entries() {
            sums[i] += v.abs();
            if i != j {
                sums[j] += v.abs();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn max_abs_diagonal(&self) -> f64 {
        self.diagonal().into_iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// True when the matrix has graph-Laplacian sign structure and zero row
    /// sums, so `1/sqrt(n)` is a null vector of a positive semidefinite matrix.
    pub fn is_laplacian_like(&self) -> bool {
        let scale = self.norm_bound().max(1.0);
        let signs_ok = self
            .lower_entries()
            .all(|(i, j, v)| if i == j { v >= 0.0 } else { v <= 0.0 });
        signs_ok && self.row_sums().iter().all(|s| s.abs() <= 1e-12 * scale)
    }

    /// Off-diagonal sparsity pattern as a graph.
    pub fn pattern_graph(&self) -> Graph {
        let mut edges: Vec<(usize, usize)> = self
            .lower_entries()
            .filter(|&(i, j, _)| i != j)
            .map(|(i, j, _)| (j, i))
            .collect();
        edges.sort_unstable();
        Graph::from_sorted_unchecked(self.n, edges)
    }

    pub fn scaled(&self, factor: f64) -> SparseSym {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= factor);
        out
    }

    /// Dense row-major copy of the full matrix.
    pub fn to_dense_rows(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for (i, j, v) in self.lower_entries() {
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
        a
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.to_dense_rows())
    }
}

/// Unnormalized graph Laplacian `L = D - A`.
pub fn laplacian(g: &Graph) -> SparseSym {
    let degrees = g.degrees();
    let diag = degrees.iter().enumerate().map(|(i, &d)| (i, i, d as f64));
    let off = g.edges().iter().map(|&(i, j)| (j, i, -1.0));
    SparseSym::from_triplets(g.n(), diag.chain(off)).expect("graph indices are in range")
}

/// Adjacency matrix `A`.
pub fn adjacency(g: &Graph) -> SparseSym {
    SparseSym::from_triplets(g.n(), g.edges().iter().map(|&(i, j)| (j, i, 1.0)))
        .expect("graph indices are in range")
}

/// Symmetric normalized Laplacian `I - D^{-1/2} A D^{-1/2}`.
pub fn normalized_laplacian(g: &Graph) -> Result<SparseSym> {
    let degrees = g.degrees();
    if let Some(v) = degrees.iter().position(|&d| d == 0) {
        return Err(Error::ZeroDegree(v));
    }
    let inv_sqrt: Vec<f64> = degrees.iter().map(|&d| 1.0 / (d as f64).sqrt()).collect();
    let diag = (0..g.n()).map(|i| (i, i, 1.0));
    let off = g
        .edges()
        .iter()
        .map(|&(i, j)| (j, i, -inv_sqrt[i] * inv_sqrt[j]));
    SparseSym::from_triplets(g.n(), diag.chain(off))
}
