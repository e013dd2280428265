//! Hierarchical stochastic block models on binary trees and recursive
//! spectral sign bi-partitioning.
//!
//! * [`tree`]: the probability-labelled tree model and node codes.
//! * [`population`]: expected adjacency, population Laplacian and its
//!   closed-form spectrum.
//! * [`sampling`]: reproducible graph draws.
//! * [`linalg`]: sparse symmetric matrices, dense and Lanczos eigensolvers.
//! * [`clustering`]: sign splits, recursion and stopping rules.
//! * [`metrics`]: completeness, misclassification and perturbation diagnostics.
//! * [`experiment`]: seeded sweeps and labelled-network runs.

pub mod clustering;
pub mod datasets;
pub mod error;
pub mod experiment;
pub mod generate;
pub mod graph;
pub mod linalg;
pub mod metrics;
pub mod population;
pub mod rng;
pub mod sampling;
pub mod tree;

pub use clustering::{
    bipartition, flat_clustering, recursive_bipartition, sign_split, Dendrogram, SplitResult,
    StoppingRule, Variant,
};
pub use error::{Error, Result};
pub use graph::Graph;
pub use linalg::{EigenOptions, SolverChoice, SparseSym};
pub use sampling::{sample_graph, SampleSpec};
pub use tree::{Assortativity, NodeCode, TreeModel, TreeNode};
