//! Real symmetric SDP in standard form with disjointly supported constraints.
//!
//! minimize `c·Tr X` subject to `⟨A_i, X⟩ = b_i`, `X ⪰ 0`.
//!
//! Every matrix entry belongs to at most one constraint, so `A A*` is
//! diagonal and the affine projection is closed form.

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::sym_eigh;

/// Which algorithm solves the SDP.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum SolverKind {
    /// First-order method, interior-point fallback for small problems.
    #[default]
    Auto,
    Admm,
    InteriorPoint,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverOptions {
    pub kind: SolverKind,
    /// Absolute ∞-norm bound on the constraint residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Largest Gram dimension for which the interior-point method is used.
    pub ipm_max_dim: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { kind: SolverKind::Auto, tol: 1e-7, max_iter: 20_000, ipm_max_dim: 200 }
    }
}

/// Upper-triangle entries `(r, c, a)` with `r ≤ c`; off-diagonal entries stand for both `A_rc` and `A_cr`.
pub type SparseSym = Vec<(usize, usize, f64)>;

#[derive(Clone, Debug)]
pub struct RealSdp {
    pub n: usize,
    pub cons: Vec<SparseSym>,
    pub b: Vec<f64>,
    /// Objective is `c_scale · Tr X`.
    pub c_scale: f64,
}

#[derive(Clone, Debug)]
pub struct RealSolution {
    pub x: Mat<f64>,
    pub y: Vec<f64>,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub method: &'static str,
}

impl RealSdp {
    pub fn apply_a(&self, x: &Mat<f64>) -> Vec<f64> {
        self.cons
            .iter()
            .map(|e| {
                e.iter()
                    .map(|&(r, c, a)| if r == c { a * x[(r, c)] } else { 2.0 * a * x[(r, c)] })
                    .sum()
            })
            .collect()
    }

    /// Adds `s · A*(y)` to `m`.
    pub fn add_adjoint(&self, y: &[f64], s: f64, m: &mut Mat<f64>) {
        for (e, &yi) in self.cons.iter().zip(y) {
            for &(r, c, a) in e {
                m[(r, c)] += s * a * yi;
                if r != c {
                    m[(c, r)] += s * a * yi;
                }
            }
        }
    }

    fn row_norms_sq(&self) -> Vec<f64> {
        self.cons
            .iter()
            .map(|e| e.iter().map(|&(r, c, a)| if r == c { a * a } else { 2.0 * a * a }).sum())
            .collect()
    }

    fn check(&self) -> Result<()> {
        let mut seen = vec![false; self.n * self.n];
        for e in &self.cons {
            for &(r, c, _) in e {
                if r > c || c >= self.n {
                    return Err(Error::invalid("constraint entry outside upper triangle"));
                }
                if std::mem::replace(&mut seen[r * self.n + c], true) {
                    return Err(Error::invalid("constraints share a matrix entry"));
                }
            }
        }
        Ok(())
    }

    fn residuals(&self, x: &Mat<f64>) -> f64 {
        self.apply_a(x).iter().zip(&self.b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Splits a symmetric matrix into its PSD part and the PSD part of its negation.
fn psd_split(v: &Mat<f64>) -> Result<(Mat<f64>, Mat<f64>)> {
    let n = v.nrows();
    let (w, u) = sym_eigh(v.as_ref())?;
    let pos = Mat::from_fn(n, w.len(), |i, k| u[(i, k)] * w[k].max(0.0).sqrt());
    let neg = Mat::from_fn(n, w.len(), |i, k| u[(i, k)] * (-w[k]).max(0.0).sqrt());
    Ok((&pos * pos.transpose(), &neg * neg.transpose()))
}

pub fn solve(p: &RealSdp, opts: &SolverOptions) -> Result<RealSolution> {
    p.check()?;
    if p.n == 0 {
        return Ok(RealSolution {
            x: Mat::zeros(0, 0),
            y: vec![0.0; p.cons.len()],
            primal_residual: 0.0,
            dual_residual: 0.0,
            gap: 0.0,
            iterations: 0,
            converged: true,
            method: "trivial",
        });
    }
    match opts.kind {
        SolverKind::Admm => admm(p, opts),
        SolverKind::InteriorPoint => ipm(p, opts),
        SolverKind::Auto => {
            let sol = admm(p, opts)?;
            if sol.converged || p.n > opts.ipm_max_dim {
                return Ok(sol);
            }
            let alt = ipm(p, opts)?;
            Ok(if alt.converged || alt.primal_residual < sol.primal_residual { alt } else { sol })
        }
    }
}

/// Dual alternating-direction augmented Lagrangian method with adaptive penalty.
pub fn admm(p: &RealSdp, opts: &SolverOptions) -> Result<RealSolution> {
    let n = p.n;
    let m = p.cons.len();
    let norms = p.row_norms_sq();
    let bnorm = p.b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let cnorm = p.c_scale.abs() * (n as f64).sqrt();

    // Scale rows of A to unit norm, b to unit norm, and C to unit norm.
    let row_scale: Vec<f64> = norms.iter().map(|&s| if s > 0.0 { 1.0 / s.sqrt() } else { 0.0 }).collect();
    let bs = if bnorm > 0.0 { bnorm } else { 1.0 };
    let cs = if cnorm > 0.0 { cnorm } else { 1.0 };
    let sp = RealSdp {
        n,
        cons: p
            .cons
            .iter()
            .zip(&row_scale)
            .map(|(e, &s)| e.iter().map(|&(r, c, a)| (r, c, a * s)).collect())
            .collect(),
        b: p.b.iter().zip(&row_scale).map(|(b, s)| b * s / bs).collect(),
        c_scale: p.c_scale / cs,
    };
    let active: Vec<bool> = norms.iter().map(|&s| s > 0.0).collect();
    for (i, &a) in active.iter().enumerate() {
        if !a && p.b[i].abs() > opts.tol {
            return Err(Error::invalid("constraint with empty support and nonzero target"));
        }
    }

    let mut x = Mat::<f64>::zeros(n, n);
    let mut s = Mat::<f64>::zeros(n, n);
    let mut y = vec![0.0; m];
    let mut mu = 1.0f64;
    let mut ratio_acc = 0.0f64;
    let mut ratio_cnt = 0usize;
    let mut best: Option<RealSolution> = None;

    for it in 1..=opts.max_iter {
        // y = (AA*)^{-1} (mu (b - A X) - A(S - C)), AA* = I on active rows
        let ax = sp.apply_a(&x);
        let mut sc = s.clone();
        for i in 0..n {
            sc[(i, i)] -= sp.c_scale;
        }
        let asc = sp.apply_a(&sc);
        for i in 0..m {
            y[i] = if active[i] { mu * (sp.b[i] - ax[i]) - asc[i] } else { 0.0 };
        }
        // V = C - A*y - mu X
        let mut v = Mat::<f64>::from_fn(n, n, |i, j| -mu * x[(i, j)] + if i == j { sp.c_scale } else { 0.0 });
        sp.add_adjoint(&y, -1.0, &mut v);
        let (vp, vn) = psd_split(&v)?;
        s = vp;
        x = Mat::from_fn(n, n, |i, j| vn[(i, j)] / mu);

        if it % 10 == 0 || it == opts.max_iter {
            let ax = sp.apply_a(&x);
            let pinf = ax.iter().zip(&sp.b).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() / (1.0 + 1.0);
            let mut rd = Mat::<f64>::from_fn(n, n, |i, j| if i == j { sp.c_scale } else { 0.0 } - s[(i, j)]);
            sp.add_adjoint(&y, -1.0, &mut rd);
            let dinf = rd.norm_l2() / (1.0 + 1.0);
            let pobj = sp.c_scale * (0..n).map(|i| x[(i, i)]).sum::<f64>();
            let dobj: f64 = sp.b.iter().zip(&y).map(|(b, y)| b * y).sum();
            let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());

            // residual in the caller's units
            let x_orig = Mat::from_fn(n, n, |i, j| x[(i, j)] * bs);
            let pres = p.residuals(&x_orig);
            let done = pres <= opts.tol && dinf <= opts.tol && gap <= opts.tol;
            let sol_better = best.as_ref().map_or(true, |b| pres < b.primal_residual);
            if done || sol_better || it == opts.max_iter {
                let y_orig: Vec<f64> = y.iter().zip(&row_scale).map(|(v, s)| v * s * cs).collect();
                let cand = RealSolution {
                    x: x_orig,
                    y: y_orig,
                    primal_residual: pres,
                    dual_residual: dinf,
                    gap,
                    iterations: it,
                    converged: done,
                    method: "admm",
                };
                if done {
                    return Ok(cand);
                }
                if sol_better {
                    best = Some(cand);
                }
            }

            ratio_acc += (pinf.max(1e-300) / dinf.max(1e-300)).ln();
            ratio_cnt += 1;
            if ratio_cnt == 5 {
                let r = (ratio_acc / ratio_cnt as f64).exp();
                if r > 3.0 {
                    mu = (mu * 1.6).min(1e6);
                } else if r < 1.0 / 3.0 {
                    mu = (mu / 1.6).max(1e-6);
                }
                ratio_acc = 0.0;
                ratio_cnt = 0;
            }
        }
    }
    let mut out = best.expect("at least one residual check ran");
    out.iterations = opts.max_iter;
    out.converged = false;
    Ok(out)
}

fn chol_ok(a: &Mat<f64>) -> bool {
    a.llt(Side::Lower).is_ok()
}

fn sym(a: &Mat<f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| 0.5 * (a[(i, j)] + a[(j, i)]))
}

/// Largest step in (0, 1] keeping `x + t dx` positive definite, times 0.95.
fn max_step(x: &Mat<f64>, dx: &Mat<f64>) -> Result<f64> {
    let n = x.nrows();
    let l = x.llt(Side::Lower).map_err(|e| Error::Linalg(format!("cholesky failed: {e:?}")))?;
    let mut linv = Mat::<f64>::identity(n, n);
    faer::linalg::triangular_solve::solve_lower_triangular_in_place(l.L(), linv.as_mut(), faer::Par::Seq);
    let m = &linv * dx * linv.transpose();
    let m = sym(&m);
    let w = crate::linalg::sym_eigenvalues(m.as_ref())?;
    let lo = w.first().copied().unwrap_or(0.0);
    Ok(if lo >= 0.0 { 1.0 } else { (0.95 * (-1.0 / lo)).min(1.0) })
}

/// Infeasible primal-dual path-following method with the HKM search direction.
pub fn ipm(p: &RealSdp, opts: &SolverOptions) -> Result<RealSolution> {
    let n = p.n;
    let m = p.cons.len();
    let norms = p.row_norms_sq();
    let active: Vec<usize> = (0..m).filter(|&i| norms[i] > 0.0).collect();
    let bscale = 1.0 + p.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut x = Mat::<f64>::identity(n, n) * faer::Scale(bscale);
    let mut s = Mat::<f64>::identity(n, n) * faer::Scale(1.0f64.max(p.c_scale.abs()));
    let mut y = vec![0.0; m];
    let max_iter = opts.max_iter.min(200);

    for it in 1..=max_iter {
        let ax = p.apply_a(&x);
        let rp: Vec<f64> = (0..m).map(|i| p.b[i] - ax[i]).collect();
        let mut rd = Mat::<f64>::from_fn(n, n, |i, j| if i == j { p.c_scale } else { 0.0 } - s[(i, j)]);
        p.add_adjoint(&y, -1.0, &mut rd);
        let xs: f64 = (0..n).map(|i| (0..n).map(|j| x[(i, j)] * s[(j, i)]).sum::<f64>()).sum();
        let mu = xs / n as f64;
        let pres = rp.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let dres = rd.norm_l2() / (1.0 + p.c_scale.abs() * (n as f64).sqrt());
        let pobj = p.c_scale * (0..n).map(|i| x[(i, i)]).sum::<f64>();
        let dobj: f64 = p.b.iter().zip(&y).map(|(b, y)| b * y).sum();
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        if pres <= opts.tol && dres <= opts.tol && gap <= opts.tol {
            return Ok(RealSolution {
                x,
                y,
                primal_residual: pres,
                dual_residual: dres,
                gap,
                iterations: it,
                converged: true,
                method: "interior-point",
            });
        }
        if it == max_iter {
            return Ok(RealSolution {
                x,
                y,
                primal_residual: pres,
                dual_residual: dres,
                gap,
                iterations: it,
                converged: false,
                method: "interior-point",
            });
        }

        let sl = s.llt(Side::Lower).map_err(|e| Error::Linalg(format!("cholesky failed: {e:?}")))?;
        let sinv = sl.inverse();

        // Schur complement M_ij = <A_i, X A_j S^{-1}> on the active rows.
        let full = |e: &SparseSym| -> Vec<(usize, usize, f64)> {
            let mut v = Vec::with_capacity(2 * e.len());
            for &(r, c, a) in e {
                v.push((r, c, a));
                if r != c {
                    v.push((c, r, a));
                }
            }
            v
        };
        let entries: Vec<Vec<(usize, usize, f64)>> = active.iter().map(|&i| full(&p.cons[i])).collect();
        let k = active.len();
        let mut schur = Mat::<f64>::zeros(k, k);
        for jj in 0..k {
            for ii in 0..=jj {
                let mut acc = 0.0;
                for &(pp, q, a) in &entries[ii] {
                    for &(r, ss, c) in &entries[jj] {
                        acc += a * c * x[(q, r)] * sinv[(ss, pp)];
                    }
                }
                schur[(ii, jj)] = acc;
                schur[(jj, ii)] = acc;
            }
        }
        let schur_llt = schur.llt(Side::Lower).map_err(|e| Error::Linalg(format!("Schur complement not positive definite: {e:?}")))?;

        let direction = |sigma: f64| -> Result<(Mat<f64>, Vec<f64>, Mat<f64>)> {
            // rhs = rp - A(sigma mu S^{-1} - X - X Rd S^{-1})
            let xrs = &x * &rd * &sinv;
            let t = Mat::from_fn(n, n, |i, j| sigma * mu * sinv[(i, j)] - x[(i, j)] - xrs[(i, j)]);
            let at = p.apply_a(&sym(&t));
            let mut rhs = Mat::<f64>::from_fn(k, 1, |ii, _| rp[active[ii]] - at[active[ii]]);
            schur_llt.solve_in_place(rhs.as_mut());
            let mut dy = vec![0.0; m];
            for (ii, &i) in active.iter().enumerate() {
                dy[i] = rhs[(ii, 0)];
            }
            let mut ds = rd.clone();
            p.add_adjoint(&dy, -1.0, &mut ds);
            let xds = &x * &ds * &sinv;
            let dx = sym(&Mat::from_fn(n, n, |i, j| sigma * mu * sinv[(i, j)] - x[(i, j)] - xds[(i, j)]));
            Ok((dx, dy, ds))
        };

        // Mehrotra-style predictor to pick the centering parameter.
        let (dx0, _, ds0) = direction(0.0)?;
        let ap = max_step(&x, &dx0)?;
        let ad = max_step(&s, &ds0)?;
        let xa = &x + &dx0 * faer::Scale(ap);
        let sa = &s + &ds0 * faer::Scale(ad);
        let mua: f64 = (0..n).map(|i| (0..n).map(|j| xa[(i, j)] * sa[(j, i)]).sum::<f64>()).sum::<f64>() / n as f64;
        let sigma = ((mua / mu).max(0.0)).powi(3).clamp(1e-3, 0.9);
        let (dx, dy, ds) = direction(sigma)?;
        let ap = max_step(&x, &dx)?;
        let ad = max_step(&s, &ds)?;
        let xn = &x + &dx * faer::Scale(ap);
        let sn = &s + &ds * faer::Scale(ad);
        if !chol_ok(&xn) || !chol_ok(&sn) {
            return Err(Error::Linalg("interior-point iterate left the cone".into()));
        }
        x = xn;
        s = sn;
        for i in 0..m {
            y[i] += ad * dy[i];
        }
    }
    unreachable!("loop returns on its last iteration")
}

#[cfg(test)]
mod tests {
    use super::*;

    // min Tr X s.t. X_01 = 1 (2 X_01 · 1/2): optimum X = [[1,1],[1,1]], value 2.
    fn toy() -> RealSdp {
        RealSdp { n: 2, cons: vec![vec![(0, 1, 0.5)]], b: vec![1.0], c_scale: 1.0 }
    }

    #[test]
    fn admm_toy() {
        let sol = admm(&toy(), &SolverOptions::default()).unwrap();
        assert!(sol.converged);
        let tr = sol.x[(0, 0)] + sol.x[(1, 1)];
        assert!((tr - 2.0).abs() < 1e-6, "{tr}");
    }

    #[test]
    fn ipm_toy() {
        let sol = ipm(&toy(), &SolverOptions::default()).unwrap();
        assert!(sol.converged, "{sol:?}");
        let tr = sol.x[(0, 0)] + sol.x[(1, 1)];
        assert!((tr - 2.0).abs() < 1e-6, "{tr}");
    }

    #[test]
    fn overlapping_constraints_rejected() {
        let p = RealSdp { n: 2, cons: vec![vec![(0, 1, 1.0)], vec![(0, 1, 1.0)]], b: vec![0.0, 0.0], c_scale: 1.0 };
        assert!(solve(&p, &SolverOptions::default()).is_err());
    }
}
