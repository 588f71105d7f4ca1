//! Thin wrappers over the dense eigensolvers plus a Lanczos ground-state solver.

use faer::{c64, Mat, MatRef, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

fn evd_err(e: impl std::fmt::Debug) -> Error {
    Error::Linalg(format!("eigendecomposition failed: {e:?}"))
}

/// Eigenvalues (ascending) and eigenvectors of a real symmetric matrix.
pub fn sym_eigh(a: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let evd = a.self_adjoint_eigen(Side::Lower).map_err(evd_err)?;
    let s = evd.S().column_vector().iter().copied().collect();
    Ok((s, evd.U().to_owned()))
}

pub fn sym_eigenvalues(a: MatRef<'_, f64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower).map_err(evd_err)
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn herm_eigh(a: MatRef<'_, c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    let evd = a.self_adjoint_eigen(Side::Lower).map_err(evd_err)?;
    let s = evd.S().column_vector().iter().map(|z| z.re).collect();
    Ok((s, evd.U().to_owned()))
}

pub fn herm_eigenvalues(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower).map_err(evd_err)
}

pub fn spectral_norm_c(a: MatRef<'_, c64>) -> Result<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(0.0);
    }
    let s = a.singular_values().map_err(|e| Error::Linalg(format!("svd failed: {e:?}")))?;
    Ok(s.first().copied().unwrap_or(0.0))
}

pub fn spectral_norm_r(a: MatRef<'_, f64>) -> Result<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(0.0);
    }
    let s = a.singular_values().map_err(|e| Error::Linalg(format!("svd failed: {e:?}")))?;
    Ok(s.first().copied().unwrap_or(0.0))
}

fn dot(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[c64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Lowest eigenvalue of a Hermitian operator given only through `apply`.
///
/// Lanczos with full reorthogonalization, started from a seeded random
/// vector. Stops when the Ritz residual falls below `tol` (absolute).
pub fn lanczos_lowest<F>(dim: usize, apply: F, tol: f64, max_iter: usize, seed: u64) -> Result<f64>
where
    F: Fn(&[c64], &mut [c64]),
{
    if dim == 0 {
        return Err(Error::invalid("empty operator"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<c64> = (0..dim).map(|_| c64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let max_iter = max_iter.min(dim);
    let mut basis: Vec<Vec<c64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![c64::new(0.0, 0.0); dim];
    let mut last = f64::INFINITY;

    for k in 0..max_iter {
        apply(&basis[k], &mut w);
        let a = dot(&basis[k], &w).re;
        alphas.push(a);
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = norm(&w);

        let m = alphas.len();
        let t = Mat::from_fn(m, m, |i, j| {
            if i == j {
                alphas[i]
            } else if i == j + 1 || j == i + 1 {
                betas[i.min(j)]
            } else {
                0.0
            }
        });
        let (vals, vecs) = sym_eigh(t.as_ref())?;
        let theta = vals[0];
        let resid = b * vecs[(m - 1, 0)].abs();
        if resid < tol || b < 1e-14 || m == dim {
            return Ok(theta);
        }
        if k + 1 == max_iter {
            if (theta - last).abs() < tol {
                return Ok(theta);
            }
            return Err(Error::Linalg(format!("Lanczos did not converge in {max_iter} steps (residual {resid:e})")));
        }
        last = theta;
        betas.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    unreachable!("loop returns on its last iteration")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lanczos_matches_dense() {
        let n = 60;
        let a = Mat::from_fn(n, n, |i, j| {
            let (i, j) = (i as f64, j as f64);
            c64::new((i * 0.3 + j * 0.7).sin() + (i * 0.7 + j * 0.3).sin(), (i - j) * 0.01)
        });
        let h = Mat::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
        let exact = herm_eigenvalues(h.as_ref()).unwrap()[0];
        let apply = |x: &[c64], y: &mut [c64]| {
            for i in 0..n {
                y[i] = (0..n).map(|j| h[(i, j)] * x[j]).sum();
            }
        };
        let approx = lanczos_lowest(n, apply, 1e-10, 200, 1).unwrap();
        assert!((exact - approx).abs() < 1e-8, "{exact} vs {approx}");
    }
}
