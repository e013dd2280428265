//! Shared fixtures for the benchmarks.

use hsbm_core::{sample_graph, Graph, SampleSpec, TreeModel, TreeNode};

/// Two equal blocks with within/between probabilities `p_in`/`p_out`.
pub fn two_block(n: usize, p_in: f64, p_out: f64) -> TreeModel {
    let half = n / 2;
    TreeModel::new(TreeNode::internal(
        p_out,
        TreeNode::leaf(p_in, half),
        TreeNode::leaf(p_in, n - half),
    ))
    .expect("two-block model is assortative")
}

/// Balanced depth-2 tree with four leaves of `size` vertices.
pub fn four_leaf(size: usize) -> TreeModel {
    let pair = || TreeNode::internal(0.06, TreeNode::leaf(0.4, size), TreeNode::leaf(0.4, size));
    TreeModel::new(TreeNode::internal(0.02, pair(), pair()))
        .expect("four-leaf model is assortative")
}

/// Sparse two-block graph whose average degree stays near 37.5 as `n` grows.
pub fn sparse_graph(n: usize, seed: u64) -> Graph {
    let scale = 3000.0 / n as f64;
    sample_graph(&SampleSpec::new(
        &two_block(n, 0.02 * scale, 0.005 * scale),
        seed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_expected_sizes() {
        assert_eq!(two_block(101, 0.5, 0.1).n(), 101);
        assert_eq!(four_leaf(10).k(), 4);
        assert_eq!(sparse_graph(300, 1).n(), 300);
    }
}
