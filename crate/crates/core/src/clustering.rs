//! Spectral sign bi-partitioning and its recursive application.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{
    adjacency, laplacian, normalized_laplacian, smallest_eigenpairs, Backend, EigenOptions,
    SparseSym,
};
use crate::tree::NodeCode;

/// Label 0 for `u_i >= 0`, 1 otherwise.
pub fn sign_split(u: &[f64]) -> Vec<u8> {
    u.iter().map(|&x| if x >= 0.0 { 0 } else { 1 }).collect()
}

/// Matrix whose second-smallest eigenvector drives the split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Variant {
    /// Unnormalized Laplacian `D - A`.
    #[default]
    #[serde(rename = "L")]
    Laplacian,
    /// Negated adjacency `-A` (second largest eigenvector of `A`).
    #[serde(rename = "A")]
    Adjacency,
    /// `I - D^{-1/2} A D^{-1/2}`.
    #[serde(rename = "N")]
    Normalized,
}

impl Variant {
    pub fn matrix(&self, g: &Graph) -> Result<SparseSym> {
        match self {
            Variant::Laplacian => Ok(laplacian(g)),
            Variant::Adjacency => Ok(adjacency(g).scaled(-1.0)),
            Variant::Normalized => normalized_laplacian(g),
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Variant::Laplacian => "L",
            Variant::Adjacency => "A",
            Variant::Normalized => "N",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" | "laplacian" => Ok(Variant::Laplacian),
            "A" | "adjacency" => Ok(Variant::Adjacency),
            "N" | "normalized" => Ok(Variant::Normalized),
            other => Err(Error::InvalidArgument(format!(
                "unknown variant `{other}` (expected L, A or N)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Spectral,
    /// The graph was disconnected: largest component vs the rest.
    Components,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    pub assignment: Vec<u8>,
    /// Second-smallest eigenvalue; 0 for a component split.
    pub fiedler_value: f64,
    /// Eigenvector behind the split (sign-normalized); empty for a component split.
    pub fiedler_vector: Vec<f64>,
    pub provenance: Provenance,
    /// All labels equal (only possible for a constant-sign vector).
    pub degenerate: bool,
    /// Smallest eigenvalues computed for the split, ascending; empty for a
    /// component split.
    pub eigenvalues: Vec<f64>,
    pub backend: Option<Backend>,
}

impl SplitResult {
    pub fn side_sizes(&self) -> (usize, usize) {
        let ones = self.assignment.iter().filter(|&&c| c == 1).count();
        (self.assignment.len() - ones, ones)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SplitOptions {
    pub variant: Variant,
    pub eigen: EigenOptions,
}

/// Sign split of the Laplacian Fiedler vector with default options.
pub fn bipartition(g: &Graph) -> Result<SplitResult> {
    bipartition_with(g, &SplitOptions::default())
}

pub fn bipartition_with(g: &Graph, opts: &SplitOptions) -> Result<SplitResult> {
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "bipartition needs at least two vertices, got {n}"
        )));
    }
    let components = g.connected_components();
    if components.len() > 1 {
        let largest = components
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .expect("at least two components");
        let mut assignment = vec![1u8; n];
        for &v in &components[largest] {
            assignment[v] = 0;
        }
        return Ok(SplitResult {
            assignment,
            fiedler_value: 0.0,
            fiedler_vector: Vec::new(),
            provenance: Provenance::Components,
            degenerate: false,
            eigenvalues: Vec::new(),
            backend: None,
        });
    }
    let m = opts.variant.matrix(g)?;
    let k = n.min(3);
    let mut res = smallest_eigenpairs(&m, k, &opts.eigen)?;
    let fiedler_vector = res.eigenvectors.swap_remove(1);
    let assignment = sign_split(&fiedler_vector);
    let degenerate = assignment.iter().all(|&c| c == assignment[0]);
    Ok(SplitResult {
        assignment,
        fiedler_value: res.eigenvalues[1],
        fiedler_vector,
        provenance: Provenance::Spectral,
        degenerate,
        eigenvalues: res.eigenvalues,
        backend: Some(res.backend),
    })
}

/// What a stopping rule sees before a cluster is split.
#[derive(Debug)]
pub struct SplitContext<'a> {
    /// Subgraph induced by the cluster, vertices relabelled `0..m`.
    pub graph: &'a Graph,
    /// Original vertex ids of the cluster.
    pub vertices: &'a [usize],
    pub depth: usize,
    /// The split that would be applied.
    pub split: &'a SplitResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Continue,
    Stop,
}

pub trait StoppingRule: Send + Sync {
    fn decide(&self, ctx: &SplitContext<'_>) -> Decision;
    fn describe(&self) -> String;
}

/// Never stops; recursion ends only at `max_depth`, singletons or degenerate splits.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedDepth;

impl StoppingRule for FixedDepth {
    fn decide(&self, _: &SplitContext<'_>) -> Decision {
        Decision::Continue
    }

    fn describe(&self) -> String {
        "fixed".into()
    }
}

/// Stops when the proposed split would leave a side with fewer than
/// `min_size` vertices.
#[derive(Debug, Clone, Copy)]
pub struct MinClusterSize(pub usize);

impl StoppingRule for MinClusterSize {
    fn decide(&self, ctx: &SplitContext<'_>) -> Decision {
        let (a, b) = ctx.split.side_sizes();
        if a.min(b) < self.0 {
            Decision::Stop
        } else {
            Decision::Continue
        }
    }

    fn describe(&self) -> String {
        format!("minsize:{}", self.0)
    }
}

/// Heuristic: stop when `(lambda_3 - lambda_2) / |lambda_2| < tau`.
/// Component splits and clusters with fewer than three vertices always continue.
#[derive(Debug, Clone, Copy)]
pub struct EigenGap(pub f64);

impl Default for EigenGap {
    fn default() -> Self {
        EigenGap(0.2)
    }
}

impl StoppingRule for EigenGap {
    fn decide(&self, ctx: &SplitContext<'_>) -> Decision {
        let ev = &ctx.split.eigenvalues;
        if ev.len() < 3 || ev[1] == 0.0 {
            return Decision::Continue;
        }
        if (ev[2] - ev[1]) / ev[1].abs() < self.0 {
            Decision::Stop
        } else {
            Decision::Continue
        }
    }

    fn describe(&self) -> String {
        format!("eigengap:{}", self.0)
    }
}

/// Stops immediately at every node.
#[derive(Debug, Clone, Copy, Default)]
pub struct StopImmediately;

impl StoppingRule for StopImmediately {
    fn decide(&self, _: &SplitContext<'_>) -> Decision {
        Decision::Stop
    }

    fn describe(&self) -> String {
        "stop".into()
    }
}

/// Parses `fixed`, `minsize:<k>` or `eigengap:<tau>`.
pub fn parse_rule(spec: &str) -> Result<Box<dyn StoppingRule>> {
    let bad = || Error::InvalidArgument(format!("invalid stopping rule `{spec}`"));
    match spec.split_once(':') {
        None if spec == "fixed" => Ok(Box::new(FixedDepth)),
        None if spec == "eigengap" => Ok(Box::new(EigenGap::default())),
        Some(("minsize", k)) => Ok(Box::new(MinClusterSize(k.parse().map_err(|_| bad())?))),
        Some(("eigengap", t)) => {
            let tau: f64 = t.parse().map_err(|_| bad())?;
            if !(tau.is_finite() && tau >= 0.0) {
                return Err(bad());
            }
            Ok(Box::new(EigenGap(tau)))
        }
        _ => Err(bad()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxDepth,
    Rule,
    Degenerate,
    Singleton,
}

#[derive(Debug, Clone)]
pub struct DendrogramNode {
    pub code: NodeCode,
    /// Original vertex ids, ascending.
    pub vertices: Vec<usize>,
    /// Present on internal nodes and on degenerate leaves.
    pub split: Option<SplitResult>,
    /// Present exactly on leaves.
    pub stop_reason: Option<StopReason>,
    pub children: Option<Box<(DendrogramNode, DendrogramNode)>>,
}

impl DendrogramNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    /// Nodes in depth-first preorder.
    pub fn walk(&self) -> Vec<&DendrogramNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            out.push(node);
            if let Some(children) = &node.children {
                stack.push(&children.1);
                stack.push(&children.0);
            }
        }
        out
    }
}

impl Serialize for DendrogramNode {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Json<'a> {
            code: String,
            vertices: &'a [usize],
            #[serde(skip_serializing_if = "Option::is_none")]
            fiedler_value: Option<f64>,
            #[serde(skip_serializing_if = "Option::is_none")]
            provenance: Option<Provenance>,
            #[serde(skip_serializing_if = "Option::is_none")]
            stop_reason: Option<StopReason>,
            #[serde(skip_serializing_if = "Option::is_none")]
            children: Option<[&'a DendrogramNode; 2]>,
        }
        Json {
            code: self.code.to_string(),
            vertices: &self.vertices,
            fiedler_value: self.split.as_ref().map(|s| s.fiedler_value),
            provenance: self.split.as_ref().map(|s| s.provenance),
            stop_reason: self.stop_reason,
            children: self.children.as_ref().map(|c| [&c.0, &c.1]),
        }
        .serialize(serializer)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Dendrogram {
    pub n: usize,
    pub root: DendrogramNode,
}

impl Dendrogram {
    /// Length of the longest leaf code.
    pub fn height(&self) -> usize {
        self.root
            .walk()
            .into_iter()
            .filter(|n| n.is_leaf())
            .map(|n| n.code.len())
            .max()
            .unwrap_or(0)
    }

    pub fn leaves(&self) -> Vec<&DendrogramNode> {
        self.root
            .walk()
            .into_iter()
            .filter(|n| n.is_leaf())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.root).expect("dendrogram serializes")
    }
}

/// Label of every vertex: the code of the deepest dendrogram node at depth
/// at most `depth` that contains it.
pub fn flat_clustering(d: &Dendrogram, depth: usize) -> Vec<NodeCode> {
    let mut labels = vec![NodeCode::root(); d.n];
    let mut stack = vec![&d.root];
    while let Some(node) = stack.pop() {
        match &node.children {
            Some(children) if node.code.len() < depth => {
                stack.push(&children.0);
                stack.push(&children.1);
            }
            _ => {
                for &v in &node.vertices {
                    labels[v] = node.code.clone();
                }
            }
        }
    }
    labels
}

#[derive(Clone, Copy)]
pub struct RecursionOptions<'a> {
    pub rule: &'a dyn StoppingRule,
    pub max_depth: usize,
    pub split: SplitOptions,
}

/// Depth-first recursive bipartition. Sibling subtrees run in parallel; the
/// result does not depend on scheduling.
pub fn recursive_bipartition(
    g: &Graph,
    rule: &dyn StoppingRule,
    max_depth: usize,
) -> Result<Dendrogram> {
    recursive_bipartition_with(
        g,
        &RecursionOptions {
            rule,
            max_depth,
            split: SplitOptions::default(),
        },
    )
}

pub fn recursive_bipartition_with(g: &Graph, opts: &RecursionOptions<'_>) -> Result<Dendrogram> {
    let all: Vec<usize> = (0..g.n()).collect();
    let root = grow(g, NodeCode::root(), all, opts)?;
    Ok(Dendrogram { n: g.n(), root })
}

fn leaf(
    code: NodeCode,
    vertices: Vec<usize>,
    split: Option<SplitResult>,
    reason: StopReason,
) -> DendrogramNode {
    DendrogramNode {
        code,
        vertices,
        split,
        stop_reason: Some(reason),
        children: None,
    }
}

fn grow(
    g: &Graph,
    code: NodeCode,
    vertices: Vec<usize>,
    opts: &RecursionOptions<'_>,
) -> Result<DendrogramNode> {
    if vertices.len() <= 1 {
        return Ok(leaf(code, vertices, None, StopReason::Singleton));
    }
    if code.len() >= opts.max_depth {
        return Ok(leaf(code, vertices, None, StopReason::MaxDepth));
    }
    let owned;
    let sub = if vertices.len() == g.n() {
        g
    } else {
        owned = g.induced_subgraph(&vertices);
        &owned
    };
    let split = bipartition_with(sub, &opts.split)?;
    if split.degenerate {
        return Ok(leaf(code, vertices, Some(split), StopReason::Degenerate));
    }
    let ctx = SplitContext {
        graph: sub,
        vertices: &vertices,
        depth: code.len(),
        split: &split,
    };
    if opts.rule.decide(&ctx) == Decision::Stop {
        return Ok(leaf(code, vertices, None, StopReason::Rule));
    }
    let (left, right): (Vec<usize>, Vec<usize>) = {
        let mut l = Vec::new();
        let mut r = Vec::new();
        for (&v, &c) in vertices.iter().zip(&split.assignment) {
            if c == 0 {
                l.push(v)
            } else {
                r.push(v)
            }
        }
        (l, r)
    };
    let (a, b) = rayon::join(
        || grow(g, code.left(), left, opts),
        || grow(g, code.right(), right, opts),
    );
    Ok(DendrogramNode {
        code,
        vertices,
        split: Some(split),
        stop_reason: None,
        children: Some(Box::new((a?, b?))),
    })
}
