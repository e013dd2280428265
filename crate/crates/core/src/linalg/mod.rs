//! Sparse symmetric matrices and the eigensolvers built on them.

mod dense;
mod lanczos;
mod sparse;
mod spectral;
mod subspace;

pub use dense::{symmetric_eigen, symmetric_eigenvalues};
pub use sparse::{adjacency, laplacian, normalized_laplacian, SparseSym};
pub use spectral::{
    fiedler_vector, normalize_sign, smallest_eigenpairs, zero_tolerance, Backend,
    ConnectivityReport, EigenOptions, Fiedler, FiedlerOutcome, SolverChoice, SpectralResult,
};
pub use subspace::{align_to, columns_to_matrix, matrix_sign, subspace_sin_theta};
