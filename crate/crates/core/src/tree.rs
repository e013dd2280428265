//! Binary-tree block models: node codes, tree validation, community
//! assignment and the community-wise connection probability matrix.
//!
//! Every node of the tree is addressed by a [`NodeCode`], the string of
//! left (`0`) / right (`1`) turns taken from the root. Vertices are laid out
//! in contiguous index blocks following the left-to-right depth-first order
//! of the leaves, so the vertex set of any subtree is a half-open range.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Address of a tree node as a sequence of bits; the root is the empty code.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeCode {
    bits: Vec<bool>,
}

impl NodeCode {
    pub fn root() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Depth of the node. The empty code is the root; see [`NodeCode::is_root`].
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_root(&self) -> bool {
        self.bits.is_empty()
    }

    /// Child code obtained by appending `bit` (`false` = left).
    pub fn child(&self, bit: bool) -> Self {
        let mut bits = self.bits.clone();
        bits.push(bit);
        Self { bits }
    }

    pub fn left(&self) -> Self {
        self.child(false)
    }

    pub fn right(&self) -> Self {
        self.child(true)
    }

    /// The code with its last bit flipped.
    pub fn sibling(&self) -> Result<Self> {
        let mut bits = self.bits.clone();
        match bits.last_mut() {
            Some(last) => {
                *last = !*last;
                Ok(Self { bits })
            }
            None => Err(Error::RootHasNoSibling),
        }
    }

    /// The `i`-th ancestor: the first `len - i` bits. `ancestor(len)` is the root.
    pub fn ancestor(&self, i: usize) -> Result<Self> {
        if i > self.len() {
            return Err(Error::AncestorOutOfRange {
                index: i,
                len: self.len(),
            });
        }
        Ok(Self {
            bits: self.bits[..self.len() - i].to_vec(),
        })
    }

    pub fn parent(&self) -> Option<Self> {
        self.ancestor(1).ok()
    }

    /// Longest common prefix of two codes.
    pub fn lowest_common_ancestor(&self, other: &NodeCode) -> NodeCode {
        let shared = self
            .bits
            .iter()
            .zip(&other.bits)
            .take_while(|(a, b)| a == b)
            .count();
        Self {
            bits: self.bits[..shared].to_vec(),
        }
    }

    pub fn is_prefix_of(&self, other: &NodeCode) -> bool {
        other.bits.starts_with(&self.bits)
    }

    /// The code cut down to at most `depth` bits.
    pub fn truncated(&self, depth: usize) -> Self {
        Self {
            bits: self.bits[..depth.min(self.len())].to_vec(),
        }
    }
}

impl fmt::Display for NodeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for NodeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for NodeCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidCode(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::from_bits)
    }
}

impl Serialize for NodeCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodeCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A node of the probability-labelled binary tree.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Internal {
        p: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        p: f64,
        size: usize,
    },
}

impl TreeNode {
    pub fn leaf(p: f64, size: usize) -> Self {
        TreeNode::Leaf { p, size }
    }

    pub fn internal(p: f64, left: TreeNode, right: TreeNode) -> Self {
        TreeNode::Internal {
            p,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn p(&self) -> f64 {
        match self {
            TreeNode::Internal { p, .. } | TreeNode::Leaf { p, .. } => *p,
        }
    }
}

/// Flattened per-node data, stored in depth-first preorder.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeInfo {
    pub code: NodeCode,
    pub p: f64,
    /// Number of vertices below this node (`n_s`).
    pub size: usize,
    /// Contiguous vertex range covered by the subtree.
    pub vertices: Range<usize>,
    pub is_leaf: bool,
}

/// How strictly weak assortativity is enforced at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Assortativity {
    /// `p_s < min(p_L, p_R)` at every internal node.
    #[default]
    Strict,
    /// Equality with a child is tolerated; strict violations are still rejected.
    AllowEqual,
    /// Only structural validation; used to inspect arbitrary trees.
    Unchecked,
}

/// A generalized binary-tree stochastic block model.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    root: TreeNode,
    nodes: Vec<NodeInfo>,
    index: HashMap<NodeCode, usize>,
    leaves: Vec<usize>,
    relaxed: bool,
}

impl TreeModel {
    /// Builds a model and enforces strict weak assortativity.
    pub fn new(root: TreeNode) -> Result<Self> {
        Self::with_assortativity(root, Assortativity::Strict)
    }

    pub fn with_assortativity(root: TreeNode, mode: Assortativity) -> Result<Self> {
        let mut model = Self {
            root,
            nodes: Vec::new(),
            index: HashMap::new(),
            leaves: Vec::new(),
            relaxed: false,
        };
        let root = model.root.clone();
        let mut offset = 0;
        model.flatten(&root, NodeCode::root(), &mut offset)?;

        match mode {
            Assortativity::Unchecked => {}
            Assortativity::Strict => {
                let bad = model.validate_weak_assortativity();
                if !bad.is_empty() {
                    return Err(Error::NotAssortative(
                        bad.iter().map(ToString::to_string).collect(),
                    ));
                }
            }
            Assortativity::AllowEqual => {
                let strict_bad: Vec<String> = model
                    .internal_nodes()
                    .filter(|s| {
                        let p = s.p;
                        p > model.node(&s.code.left()).map_or(f64::NAN, |c| c.p)
                            || p > model.node(&s.code.right()).map_or(f64::NAN, |c| c.p)
                    })
                    .map(|s| s.code.to_string())
                    .collect();
                if !strict_bad.is_empty() {
                    return Err(Error::NotAssortative(strict_bad));
                }
            }
        }
        model.relaxed = !model.validate_weak_assortativity().is_empty();
        Ok(model)
    }

    fn flatten(&mut self, node: &TreeNode, code: NodeCode, offset: &mut usize) -> Result<usize> {
        let p = node.p();
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidModel(format!(
                "probability at node {code:?} must lie in (0, 1), got {p}"
            )));
        }
        let slot = self.nodes.len();
        let start = *offset;
        self.nodes.push(NodeInfo {
            code: code.clone(),
            p,
            size: 0,
            vertices: start..start,
            is_leaf: false,
        });
        self.index.insert(code.clone(), slot);
        match node {
            TreeNode::Leaf { size, .. } => {
                if *size == 0 {
                    return Err(Error::InvalidModel(format!(
                        "leaf {code:?} must contain at least one vertex"
                    )));
                }
                *offset += size;
                self.nodes[slot].is_leaf = true;
                self.leaves.push(slot);
            }
            TreeNode::Internal { left, right, .. } => {
                self.flatten(left, code.left(), offset)?;
                self.flatten(right, code.right(), offset)?;
            }
        }
        self.nodes[slot].size = *offset - start;
        self.nodes[slot].vertices = start..*offset;
        Ok(slot)
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    /// Total number of vertices `n`.
    pub fn n(&self) -> usize {
        self.nodes[0].size
    }

    /// Number of leaf communities `K`.
    pub fn k(&self) -> usize {
        self.leaves.len()
    }

    /// True if the model was admitted with equal parent/child probabilities,
    /// in which case the analytic spectral guarantees no longer apply.
    pub fn is_relaxed(&self) -> bool {
        self.relaxed
    }

    /// All nodes in depth-first preorder.
    pub fn nodes(&self) -> &[NodeInfo] {
        &self.nodes
    }

    pub fn node(&self, code: &NodeCode) -> Result<&NodeInfo> {
        self.index
            .get(code)
            .map(|&i| &self.nodes[i])
            .ok_or_else(|| Error::UnknownNode(code.to_string()))
    }

    pub fn contains(&self, code: &NodeCode) -> bool {
        self.index.contains_key(code)
    }

    pub fn p(&self, code: &NodeCode) -> Result<f64> {
        self.node(code).map(|n| n.p)
    }

    pub fn size(&self, code: &NodeCode) -> Result<usize> {
        self.node(code).map(|n| n.size)
    }

    /// Leaves in left-to-right depth-first order.
    pub fn leaves(&self) -> impl Iterator<Item = &NodeInfo> + '_ {
        self.leaves.iter().map(|&i| &self.nodes[i])
    }

    pub fn internal_nodes(&self) -> impl Iterator<Item = &NodeInfo> + '_ {
        self.nodes.iter().filter(|n| !n.is_leaf)
    }

    /// Height of the tree (longest code among the leaves).
    pub fn height(&self) -> usize {
        self.leaves().map(|l| l.code.len()).max().unwrap_or(0)
    }

    /// Internal nodes `s` with `p_s >= p_L(s)` or `p_s >= p_R(s)`.
    pub fn validate_weak_assortativity(&self) -> Vec<NodeCode> {
        self.internal_nodes()
            .filter(|s| {
                let left = self.nodes[self.index[&s.code.left()]].p;
                let right = self.nodes[self.index[&s.code.right()]].p;
                s.p >= left || s.p >= right
            })
            .map(|s| s.code.clone())
            .collect()
    }

    /// Index (in DFS leaf order) of the leaf that owns each vertex.
    pub fn leaf_index_per_vertex(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n());
        for (k, leaf) in self.leaves().enumerate() {
            out.extend(std::iter::repeat(k).take(leaf.size));
        }
        out
    }

    /// Community assignment `c(i)` for every vertex.
    pub fn assignment(&self) -> Assignment {
        let mut labels = Vec::with_capacity(self.n());
        for leaf in self.leaves() {
            labels.extend(std::iter::repeat(leaf.code.clone()).take(leaf.size));
        }
        Assignment { labels }
    }

    /// The K x K community-wise probability matrix, leaves in DFS order.
    pub fn block_matrix(&self) -> DMatrix<f64> {
        let leaves: Vec<&NodeInfo> = self.leaves().collect();
        let k = leaves.len();
        DMatrix::from_fn(k, k, |a, b| {
            if a == b {
                leaves[a].p
            } else {
                let lca = leaves[a].code.lowest_common_ancestor(&leaves[b].code);
                self.nodes[self.index[&lca]].p
            }
        })
    }

    /// Model induced by the subtree rooted at `code`, with codes re-rooted.
    pub fn subtree(&self, code: &NodeCode) -> Result<TreeModel> {
        fn descend<'a>(node: &'a TreeNode, bits: &[bool]) -> Option<&'a TreeNode> {
            match (bits.split_first(), node) {
                (None, _) => Some(node),
                (Some((&b, rest)), TreeNode::Internal { left, right, .. }) => {
                    descend(if b { right } else { left }, rest)
                }
                (Some(_), TreeNode::Leaf { .. }) => None,
            }
        }
        let node =
            descend(&self.root, code.bits()).ok_or_else(|| Error::UnknownNode(code.to_string()))?;
        TreeModel::with_assortativity(node.clone(), Assortativity::Unchecked)
    }

    /// Reads a model from its JSON configuration file.
    pub fn from_json_file(path: impl AsRef<Path>, mode: Assortativity) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text, mode)
    }

    pub fn from_json_str(text: &str, mode: Assortativity) -> Result<Self> {
        let config: ModelConfig = serde_json::from_str(text)?;
        Self::with_assortativity(config.tree.into_node()?, mode)
    }

    pub fn to_json_string(&self) -> String {
        let config = ModelConfig {
            tree: RawNode::from_node(&self.root),
        };
        serde_json::to_string_pretty(&config).expect("model config serializes")
    }
}

/// Leaf label of every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub labels: Vec<NodeCode>,
}

impl Assignment {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Labels cut down to `depth` bits: the planted clustering at that level.
    pub fn at_depth(&self, depth: usize) -> Vec<NodeCode> {
        self.labels.iter().map(|c| c.truncated(depth)).collect()
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelConfig {
    tree: RawNode,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    children: Option<Vec<RawNode>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    size: Option<usize>,
}

impl RawNode {
    fn into_node(self) -> Result<TreeNode> {
        match (self.children, self.size) {
            (Some(children), None) => {
                let [left, right]: [RawNode; 2] = children.try_into().map_err(|c: Vec<_>| {
                    Error::InvalidModel(format!(
                        "internal nodes need exactly two children, found {}",
                        c.len()
                    ))
                })?;
                Ok(TreeNode::internal(
                    self.p,
                    left.into_node()?,
                    right.into_node()?,
                ))
            }
            (None, Some(size)) => Ok(TreeNode::leaf(self.p, size)),
            (Some(_), Some(_)) => Err(Error::InvalidModel(
                "a node may not have both \"children\" and \"size\"".into(),
            )),
            (None, None) => Err(Error::InvalidModel(
                "a node needs either \"children\" or \"size\"".into(),
            )),
        }
    }

    fn from_node(node: &TreeNode) -> Self {
        match node {
            TreeNode::Leaf { p, size } => RawNode {
                p: *p,
                children: None,
                size: Some(*size),
            },
            TreeNode::Internal { p, left, right } => RawNode {
                p: *p,
                children: Some(vec![Self::from_node(left), Self::from_node(right)]),
                size: None,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(s: &str) -> NodeCode {
        s.parse().unwrap()
    }

    /// The five-leaf shape with leaves 00, 010, 011, 10, 11.
    fn five_leaf(sizes: [usize; 5]) -> TreeNode {
        TreeNode::internal(
            0.01,
            TreeNode::internal(
                0.1,
                TreeNode::leaf(0.5, sizes[0]),
                TreeNode::internal(
                    0.2,
                    TreeNode::leaf(0.6, sizes[1]),
                    TreeNode::leaf(0.7, sizes[2]),
                ),
            ),
            TreeNode::internal(
                0.15,
                TreeNode::leaf(0.4, sizes[3]),
                TreeNode::leaf(0.45, sizes[4]),
            ),
        )
    }

    #[test]
    fn sibling_flips_last_bit() {
        assert_eq!(code("01").sibling().unwrap(), code("00"));
        assert_eq!(code("0").sibling().unwrap(), code("1"));
        assert_eq!(code("110").sibling().unwrap(), code("111"));
        assert!(matches!(
            NodeCode::root().sibling(),
            Err(Error::RootHasNoSibling)
        ));
    }

    #[test]
    fn ancestor_drops_trailing_bits() {
        assert_eq!(code("011").ancestor(1).unwrap(), code("01"));
        assert_eq!(code("011").ancestor(3).unwrap(), NodeCode::root());
        assert_eq!(code("0").ancestor(0).unwrap(), code("0"));
        assert!(matches!(
            code("01").ancestor(3),
            Err(Error::AncestorOutOfRange { index: 3, len: 2 })
        ));
    }

    #[test]
    fn lca_is_longest_common_prefix() {
        assert_eq!(code("011").lowest_common_ancestor(&code("010")), code("01"));
        assert_eq!(code("011").lowest_common_ancestor(&code("00")), code("0"));
        assert_eq!(
            code("011").lowest_common_ancestor(&code("10")),
            NodeCode::root()
        );
        assert_eq!(code("00").lowest_common_ancestor(&code("00")), code("00"));
    }

    #[test]
    fn rejects_bad_code_chars() {
        assert!("0a1".parse::<NodeCode>().is_err());
        assert_eq!("".parse::<NodeCode>().unwrap(), NodeCode::root());
    }

    #[test]
    fn weak_assortativity_checks() {
        let ok = TreeNode::internal(0.01, TreeNode::leaf(0.3, 2), TreeNode::leaf(0.3, 2));
        let m = TreeModel::new(ok).unwrap();
        assert!(m.validate_weak_assortativity().is_empty());

        let eq = TreeNode::internal(0.3, TreeNode::leaf(0.3, 2), TreeNode::leaf(0.5, 2));
        let m = TreeModel::with_assortativity(eq.clone(), Assortativity::Unchecked).unwrap();
        assert_eq!(m.validate_weak_assortativity(), vec![NodeCode::root()]);
        assert!(matches!(
            TreeModel::new(eq.clone()),
            Err(Error::NotAssortative(_))
        ));
        let relaxed = TreeModel::with_assortativity(eq, Assortativity::AllowEqual).unwrap();
        assert!(relaxed.is_relaxed());

        let single = TreeModel::new(TreeNode::leaf(0.4, 5)).unwrap();
        assert!(single.validate_weak_assortativity().is_empty());
        assert_eq!(single.k(), 1);
    }

    #[test]
    fn strict_violation_rejected_even_when_equal_allowed() {
        let bad = TreeNode::internal(0.6, TreeNode::leaf(0.3, 2), TreeNode::leaf(0.7, 2));
        assert!(TreeModel::with_assortativity(bad, Assortativity::AllowEqual).is_err());
    }

    #[test]
    fn rejects_degenerate_probabilities_and_sizes() {
        assert!(TreeModel::new(TreeNode::leaf(0.0, 3)).is_err());
        assert!(TreeModel::new(TreeNode::leaf(1.0, 3)).is_err());
        assert!(TreeModel::new(TreeNode::leaf(f64::NAN, 3)).is_err());
        assert!(TreeModel::new(TreeNode::leaf(0.5, 0)).is_err());
    }

    #[test]
    fn block_matrix_two_leaves() {
        let m = TreeModel::new(TreeNode::internal(
            0.05,
            TreeNode::leaf(0.3, 2),
            TreeNode::leaf(0.4, 3),
        ))
        .unwrap();
        let b = m.block_matrix();
        assert_eq!(b, DMatrix::from_row_slice(2, 2, &[0.3, 0.05, 0.05, 0.4]));
    }

    #[test]
    fn block_matrix_five_leaves_matches_lca_layout() {
        let m = TreeModel::new(five_leaf([2, 1, 2, 1, 2])).unwrap();
        let (pe, p0, p01, p1) = (0.01, 0.1, 0.2, 0.15);
        let (p00, p010, p011, p10, p11) = (0.5, 0.6, 0.7, 0.4, 0.45);
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(5, 5, &[
            p00, p0,   p0,   pe,  pe,
            p0,  p010, p01,  pe,  pe,
            p0,  p01,  p011, pe,  pe,
            pe,  pe,   pe,   p10, p1,
            pe,  pe,   pe,   p1,  p11,
        ]);
        assert_eq!(m.block_matrix(), expected);
    }

    #[test]
    fn block_matrix_balanced_four_leaves() {
        let (ps, p0, p1, pe) = (0.4, 0.06, 0.07, 0.02);
        let m = TreeModel::new(TreeNode::internal(
            pe,
            TreeNode::internal(p0, TreeNode::leaf(ps, 3), TreeNode::leaf(ps, 3)),
            TreeNode::internal(p1, TreeNode::leaf(ps, 3), TreeNode::leaf(ps, 3)),
        ))
        .unwrap();
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(4, 4, &[
            ps, p0, pe, pe,
            p0, ps, pe, pe,
            pe, pe, ps, p1,
            pe, pe, p1, ps,
        ]);
        assert_eq!(m.block_matrix(), expected);
    }

    #[test]
    fn assignment_uses_dfs_leaf_blocks() {
        let m = TreeModel::new(TreeNode::leaf(0.3, 5)).unwrap();
        assert!(m.assignment().labels.iter().all(NodeCode::is_root));

        let m = TreeModel::new(TreeNode::internal(
            0.1,
            TreeNode::leaf(0.3, 2),
            TreeNode::leaf(0.3, 3),
        ))
        .unwrap();
        let labels: Vec<String> = m
            .assignment()
            .labels
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(labels, ["0", "0", "1", "1", "1"]);

        let m = TreeModel::new(five_leaf([2, 1, 2, 1, 2])).unwrap();
        let labels: Vec<String> = m
            .assignment()
            .labels
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(labels, ["00", "00", "010", "011", "011", "10", "11", "11"]);
        assert_eq!(m.node(&code("01")).unwrap().vertices, 2..5);
        assert_eq!(m.node(&code("1")).unwrap().vertices, 5..8);
        assert_eq!(m.n(), 8);
        assert_eq!(m.k(), 5);
        assert_eq!(m.height(), 3);
    }

    #[test]
    fn json_config_round_trip_and_errors() {
        let text =
            r#"{"tree": {"p": 0.02, "children": [{"p": 0.3, "size": 4}, {"p": 0.4, "size": 5}]}}"#;
        let m = TreeModel::from_json_str(text, Assortativity::Strict).unwrap();
        assert_eq!(m.n(), 9);
        let again = TreeModel::from_json_str(&m.to_json_string(), Assortativity::Strict).unwrap();
        assert_eq!(again, m);

        let both = r#"{"tree": {"p": 0.2, "size": 3, "children": [{"p": 0.3, "size": 1}, {"p": 0.3, "size": 1}]}}"#;
        assert!(TreeModel::from_json_str(both, Assortativity::Strict).is_err());
        let neither = r#"{"tree": {"p": 0.2}}"#;
        assert!(TreeModel::from_json_str(neither, Assortativity::Strict).is_err());
        let three = r#"{"tree": {"p": 0.1, "children": [{"p": 0.3, "size": 1}, {"p": 0.3, "size": 1}, {"p": 0.3, "size": 1}]}}"#;
        assert!(TreeModel::from_json_str(three, Assortativity::Strict).is_err());
    }

    #[test]
    fn subtree_reroots_codes() {
        let m = TreeModel::new(five_leaf([2, 1, 2, 1, 2])).unwrap();
        let sub = m.subtree(&code("0")).unwrap();
        assert_eq!(sub.n(), 5);
        assert_eq!(sub.p(&code("1")).unwrap(), 0.2);
        assert_eq!(sub.block_matrix()[(0, 1)], 0.1);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_code() -> impl Strategy<Value = NodeCode> {
            proptest::collection::vec(any::<bool>(), 0..12).prop_map(NodeCode::from_bits)
        }

        proptest! {
            #[test]
            fn ancestor_is_prefix(c in arb_code(), frac in 0.0f64..=1.0) {
                let i = ((c.len() as f64) * frac).floor() as usize;
                let a = c.ancestor(i).unwrap();
                prop_assert_eq!(a.len(), c.len() - i);
                prop_assert!(a.is_prefix_of(&c));
            }

            #[test]
            fn lca_symmetric_and_idempotent(a in arb_code(), b in arb_code()) {
                prop_assert_eq!(a.lowest_common_ancestor(&b), b.lowest_common_ancestor(&a));
                prop_assert_eq!(a.lowest_common_ancestor(&a), a.clone());
                if !a.is_root() {
                    prop_assert_eq!(a.lowest_common_ancestor(&a.sibling().unwrap()), a.ancestor(1).unwrap());
                }
            }
        }
    }
}
