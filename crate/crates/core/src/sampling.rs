//! Reproducible graph sampling from a [`TreeModel`].
//!
//! Pair `(i, j)`, `i < j`, has linear index
//! `i*n - i*(i+1)/2 + (j - i - 1)` and is kept iff
//! `counter_uniform(seed, index) < P_ij`. Because each variate depends only on
//! `(seed, index)`, the output is independent of evaluation order.

use crate::graph::Graph;
use crate::rng::counter_uniform;
use crate::tree::TreeModel;

/// A model together with the seed that fixes one draw from it.
#[derive(Debug, Clone)]
pub struct SampleSpec<'a> {
    pub model: &'a TreeModel,
    pub seed: u64,
}

impl<'a> SampleSpec<'a> {
    pub fn new(model: &'a TreeModel, seed: u64) -> Self {
        Self { model, seed }
    }
}

#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> u64 {
    debug_assert!(i < j && j < n);
    (i * n - i * (i + 1) / 2 + (j - i - 1)) as u64
}

/// Draws one graph: vertices `i < j` are joined independently with
/// probability `p` at the lowest common ancestor of their communities.
pub fn sample_graph(spec: &SampleSpec<'_>) -> Graph {
    let model = spec.model;
    let blocks = model.block_matrix();
    let leaf_of = model.leaf_index_per_vertex();
    sample_with(model.n(), spec.seed, |i, j| {
        blocks[(leaf_of[i], leaf_of[j])]
    })
}

/// Samples with an arbitrary pair-probability function. Shares the exact
/// variate stream of [`sample_graph`], which makes degenerate probabilities
/// (0 or 1) available to tests.
pub fn sample_with(n: usize, seed: u64, prob: impl Fn(usize, usize) -> f64) -> Graph {
    let mut edges = Vec::new();
    let mut index = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            debug_assert_eq!(index, pair_index(n, i, j));
            if counter_uniform(seed, index) < prob(i, j) {
                edges.push((i, j));
            }
            index += 1;
        }
    }
    Graph::from_sorted_unchecked(n, edges)
}
