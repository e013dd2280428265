//! Thick-restart Lanczos with full reorthogonalization for the smallest
//! eigenpairs of a sparse symmetric matrix.
//!
//! The basis `V` is kept orthonormal by two passes of classical Gram-Schmidt.
//! Rayleigh-Ritz is done on the full projection `V^T A V`, so restarting by
//! keeping a block of Ritz vectors plus the current residual direction keeps
//! the projection exact.

use super::dense::full_eigen_rows;
use super::sparse::SparseSym;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

#[derive(Debug, Clone)]
pub(crate) struct LanczosOutput {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub matvecs: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Removes the components along `basis` and `locked` (both orthonormal),
/// twice. Returns the remaining norm.
fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>], locked: &[Vec<f64>]) -> f64 {
    for _ in 0..2 {
        for b in locked.iter().chain(basis) {
            let c = dot(x, b);
            axpy(-c, b, x);
        }
    }
    norm(x)
}

/// The `k` smallest eigenpairs of `a` restricted to the orthogonal
/// complement of `locked`. `tol` bounds `||A y - theta y||` in absolute terms.
pub(crate) fn smallest(
    a: &SparseSym,
    k: usize,
    locked: &[Vec<f64>],
    tol: f64,
    max_restarts: usize,
) -> Result<LanczosOutput> {
    let n = a.n();
    let dim = n - locked.len();
    assert!(
        k <= dim,
        "requested {k} eigenpairs from a {dim}-dimensional space"
    );
    if k == 0 {
        return Ok(LanczosOutput {
            values: vec![],
            vectors: vec![],
            matvecs: 0,
        });
    }
    let m_max = dim.min((2 * k + 40).max(80));
    let keep = (k + (m_max - k) / 2).min(m_max - 1).max(k);

    let mut rng = SplitMix64::new(0x1a2c_205e_ed00_0001);
    let mut random_direction = |basis: &[Vec<f64>]| -> Option<Vec<f64>> {
        for _ in 0..8 {
            let mut x: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let nx = norm(&x);
            let left = orthogonalize(&mut x, basis, locked);
            if left > 1e-8 * nx {
                x.iter_mut().for_each(|v| *v /= left);
                return Some(x);
            }
        }
        None
    };

    let mut v: Vec<Vec<f64>> = Vec::with_capacity(m_max);
    let mut av: Vec<Vec<f64>> = Vec::with_capacity(m_max);
    // Projection H = V^T A V, row-major with stride m_max.
    let mut h = vec![0.0; m_max * m_max];
    let mut candidate = random_direction(&v).expect("space has positive dimension");
    let mut matvecs = 0usize;
    let mut best_residual = f64::INFINITY;

    for restart in 0..=max_restarts {
        while v.len() < m_max {
            let x = candidate;
            let mut w = a.matvec(&x);
            matvecs += 1;
            for l in locked {
                let c = dot(&w, l);
                axpy(-c, l, &mut w);
            }
            let j = v.len();
            for (i, vi) in v.iter().enumerate() {
                let hij = dot(vi, &w);
                h[i * m_max + j] = hij;
                h[j * m_max + i] = hij;
            }
            h[j * m_max + j] = dot(&x, &w);
            v.push(x);
            av.push(w.clone());
            if v.len() == dim {
                candidate = Vec::new();
                break;
            }
            let scale = norm(&w);
            let left = orthogonalize(&mut w, &v, locked);
            candidate = if left > 1e-10 * scale.max(f64::MIN_POSITIVE) {
                w.iter_mut().for_each(|x| *x /= left);
                w
            } else {
                match random_direction(&v) {
                    Some(x) => x,
                    None => {
                        candidate = Vec::new();
                        break;
                    }
                }
            };
        }

        let m = v.len();
        let mut proj = vec![0.0; m * m];
        for i in 0..m {
            proj[i * m..(i + 1) * m].copy_from_slice(&h[i * m_max..i * m_max + m]);
        }
        let (theta, s) = full_eigen_rows(proj, m)?;
        let wanted = if candidate.is_empty() { m } else { keep.min(m) };

        let mut ritz = Vec::with_capacity(wanted);
        let mut aritz = Vec::with_capacity(wanted);
        let mut worst: f64 = 0.0;
        for (c, sc) in s.iter().enumerate().take(wanted) {
            let mut y = vec![0.0; n];
            let mut ay = vec![0.0; n];
            for (i, &coef) in sc.iter().enumerate() {
                axpy(coef, &v[i], &mut y);
                axpy(coef, &av[i], &mut ay);
            }
            if c < k {
                let mut r = ay.clone();
                axpy(-theta[c], &y, &mut r);
                worst = worst.max(norm(&r));
            }
            ritz.push(y);
            aritz.push(ay);
        }
        best_residual = best_residual.min(worst);
        if worst <= tol || candidate.is_empty() {
            ritz.truncate(k);
            return Ok(LanczosOutput {
                values: theta[..k].to_vec(),
                vectors: ritz,
                matvecs,
            });
        }
        if restart == max_restarts {
            break;
        }
        // Thick restart: the kept Ritz vectors span a subspace of V, so the
        // pending candidate stays orthogonal to them.
        v = ritz;
        av = aritz;
        h.iter_mut().for_each(|x| *x = 0.0);
        for (i, t) in theta.iter().enumerate().take(v.len()) {
            h[i * m_max + i] = *t;
        }
    }
    Err(Error::NoConvergence {
        iterations: matvecs,
        best_residual,
    })
}
