use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Polar factor `W Z^T` of `H = W Sigma Z^T`.
pub fn matrix_sign(h: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = h.clone().svd(true, true);
    let w = svd.u.expect("requested U");
    let zt = svd.v_t.expect("requested V^T");
    w * zt
}

/// Largest principal-angle sine between the column spans of `u` and `v`,
/// both with orthonormal columns: `||(I - U U^T) V||_2`.
pub fn subspace_sin_theta(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<f64> {
    if u.nrows() != v.nrows() || u.ncols() != v.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "subspace bases of shape {}x{} and {}x{}",
            u.nrows(),
            u.ncols(),
            v.nrows(),
            v.ncols()
        )));
    }
    if u.ncols() == 0 {
        return Ok(0.0);
    }
    let resid = v - u * (u.transpose() * v);
    Ok(resid.singular_values().max().min(1.0))
}

/// Rotates the estimate `u_hat` onto the reference `u` by `sgn(u_hat^T u)`.
pub fn align_to(u_hat: &DMatrix<f64>, u: &DMatrix<f64>) -> DMatrix<f64> {
    u_hat * matrix_sign(&(u_hat.transpose() * u))
}

/// Columns as an `n x k` matrix.
pub fn columns_to_matrix(cols: &[Vec<f64>]) -> DMatrix<f64> {
    let n = cols.first().map_or(0, |c| c.len());
    DMatrix::from_fn(n, cols.len(), |r, c| cols[c][r])
}
