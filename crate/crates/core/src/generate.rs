//! Random tree models for property tests and sweeps.

use crate::rng::SplitMix64;
use crate::tree::{TreeModel, TreeNode};

/// Draws a strictly weakly-assortative model with `k` leaves and `n`
/// vertices. Each leaf gets at least `min_leaf` vertices; the root
/// probability lies in `[p_lo, p_lo + 0.25 (p_hi - p_lo)]` and every child
/// probability is drawn strictly between its parent's and `p_hi`.
pub fn random_tree_model(
    rng: &mut SplitMix64,
    k: usize,
    n: usize,
    min_leaf: usize,
    p_lo: f64,
    p_hi: f64,
) -> TreeModel {
    assert!(
        k >= 1 && min_leaf >= 1 && n >= k * min_leaf,
        "cannot place {n} vertices in {k} leaves of size {min_leaf}"
    );
    assert!(0.0 < p_lo && p_lo < p_hi && p_hi <= 1.0);
    let mut sizes = vec![min_leaf; k];
    for _ in 0..n - k * min_leaf {
        let i = rng.range_inclusive(0, k - 1);
        sizes[i] += 1;
    }
    let root_p = rng.uniform(p_lo, p_lo + 0.25 * (p_hi - p_lo));
    let node = build(rng, &sizes, root_p, p_hi);
    TreeModel::new(node).expect("generator respects assortativity")
}

fn build(rng: &mut SplitMix64, sizes: &[usize], p: f64, p_hi: f64) -> TreeNode {
    if sizes.len() == 1 {
        return TreeNode::leaf(p, sizes[0]);
    }
    let cut = rng.range_inclusive(1, sizes.len() - 1);
    let mut child_p = || p + (p_hi - p) * rng.uniform(0.05, 0.6);
    let (pl, pr) = (child_p(), child_p());
    TreeNode::internal(
        p,
        build(rng, &sizes[..cut], pl, p_hi),
        build(rng, &sizes[cut..], pr, p_hi),
    )
}
