//! Double factorization of quadratic Majorana generators.
//!
//! A generator over `{1, γ_a, iγ_aγ_b}` is `B = e + Σ f_a γ_a + Σ_{a<b} g_ab γ_aγ_b`
//! with complex `g_ab = i b_ab`. Splitting `g = g^R + i g^I` gives two real
//! antisymmetric matrices, each rotated to `Σ_k g̃_k γ'_{2k−1}γ'_{2k}` by an
//! orthogonal change of Majorana basis `γ' = Oγ`. Matrices hold the pair
//! coefficients in the upper triangle and their negatives below, so every
//! 2×2 block is one unitary term of weight `|g̃_k|`.

use std::cmp::Ordering;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::sym_eigh;
use crate::operators::MajoranaPoly;
use crate::sosopt::{Algebra, SosBasis, SosGenerators};

/// `g = Oᵀ·blockdiag((0, g_k; −g_k, 0))·O`, with a trailing zero row for odd dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntisymCanonicalForm {
    pub dim: usize,
    /// Row-major `O`; rows `2k` and `2k+1` span block `k`.
    pub orthogonal: Vec<f64>,
    /// Nonnegative, descending.
    pub block_values: Vec<f64>,
    /// max-abs reconstruction error.
    pub residual: f64,
}

impl AntisymCanonicalForm {
    pub fn orthogonal_mat(&self) -> Mat<f64> {
        let n = self.dim;
        Mat::from_fn(n, n, |i, j| self.orthogonal[i * n + j])
    }

    pub fn block_matrix(&self) -> Mat<f64> {
        let mut d = Mat::<f64>::zeros(self.dim, self.dim);
        for (k, &g) in self.block_values.iter().enumerate() {
            d[(2 * k, 2 * k + 1)] = g;
            d[(2 * k + 1, 2 * k)] = -g;
        }
        d
    }

    pub fn reconstruct(&self) -> Mat<f64> {
        let o = self.orthogonal_mat();
        o.transpose() * self.block_matrix() * &o
    }

    /// max |O·Oᵀ − 1|.
    pub fn orthogonality_error(&self) -> f64 {
        let o = self.orthogonal_mat();
        let p = &o * o.transpose();
        let n = self.dim;
        let mut e = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let t = if i == j { 1.0 } else { 0.0 };
                e = e.max((p[(i, j)] - t).abs());
            }
        }
        e
    }

    /// `Σ_k |g̃_k|`.
    pub fn l1(&self) -> f64 {
        self.block_values.iter().map(|g| g.abs()).sum()
    }

    /// `Σ_k g̃_k γ'_{2k−1}γ'_{2k}` with `γ' = Oγ`.
    pub fn to_majorana(&self, n_modes: usize) -> Result<MajoranaPoly> {
        if n_modes < self.dim {
            return Err(Error::invalid(format!("{} modes cannot hold a {}-dimensional form", n_modes, self.dim)));
        }
        let n = self.dim;
        let rotated = |row: usize| -> Result<MajoranaPoly> {
            let mut p = MajoranaPoly::zero(n_modes);
            for a in 0..n {
                let c = self.orthogonal[row * n + a];
                if c != 0.0 {
                    p.add_term(1u64 << a, Complex64::new(c, 0.0))?;
                }
            }
            Ok(p)
        };
        let mut out = MajoranaPoly::zero(n_modes);
        for (k, &g) in self.block_values.iter().enumerate() {
            if g == 0.0 {
                continue;
            }
            let mut prod = rotated(2 * k)?.mul(&rotated(2 * k + 1)?);
            let mut scaled = MajoranaPoly::zero(n_modes);
            for (m, c) in prod.terms() {
                scaled.add_term(m, c * g)?;
            }
            prod = scaled;
            out = out.add(&prod);
        }
        Ok(out)
    }
}

fn max_antisym_deviation(g: &Mat<f64>) -> f64 {
    let n = g.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((g[(i, j)] + g[(j, i)]).abs());
        }
    }
    dev
}

fn sign_fixed(mut v: Vec<f64>) -> Vec<f64> {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(&first) = v.iter().find(|x| x.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE)) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    v
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > 1e-12 {
            return x.partial_cmp(y).unwrap_or(Ordering::Equal);
        }
    }
    Ordering::Equal
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Two passes of modified Gram–Schmidt against `basis`.
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
}

fn matvec_t(g: &Mat<f64>, x: &[f64]) -> Vec<f64> {
    let n = g.nrows();
    (0..n).map(|j| (0..n).map(|i| g[(i, j)] * x[i]).sum()).collect()
}

/// Orthogonal block diagonalization via the eigendecomposition of `−g² = gᵀg`.
///
/// Within a cluster of equal `g_k²` the candidate with the largest residual
/// after orthogonalization is taken (ties go to the lexicographically largest
/// sign-fixed vector), and its partner is `gᵀx/‖gᵀx‖`.
pub fn antisymmetric_canonical_form(g: &Mat<f64>) -> Result<AntisymCanonicalForm> {
    let n = g.nrows();
    if g.ncols() != n {
        return Err(Error::invalid(format!("matrix is {}x{}", n, g.ncols())));
    }
    let dev = max_antisym_deviation(g);
    if dev > 1e-12 {
        return Err(Error::NotAntisymmetric(dev));
    }
    if n == 0 {
        return Ok(AntisymCanonicalForm { dim: 0, orthogonal: vec![], block_values: vec![], residual: 0.0 });
    }
    let s = g.transpose() * g;
    let (vals, vecs) = sym_eigh(s.as_ref())?;
    let s_max = vals.last().copied().unwrap_or(0.0).max(0.0);
    let gmax = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).fold(0.0f64, |m, (i, j)| m.max(g[(i, j)].abs()));
    let cluster_tol = 1e-11 * s_max;
    let zero_tol = 1e-13 * gmax * (n as f64);

    // Candidates in descending eigenvalue order, grouped into clusters.
    let order: Vec<usize> = (0..n).rev().collect();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &k in &order {
        match clusters.last_mut() {
            Some(c) if (vals[c[0]] - vals[k]).abs() <= cluster_tol => c.push(k),
            _ => clusters.push(vec![k]),
        }
    }
    let cand: Vec<Vec<f64>> = (0..n).map(|k| (0..n).map(|i| vecs[(i, k)]).collect()).collect();

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut pairs: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::new();
    let mut pending: Option<Vec<f64>> = None;

    let best_in = |pool: &[usize], rows: &[Vec<f64>]| -> Option<Vec<f64>> {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for &k in pool {
            let mut v = cand[k].clone();
            orthogonalize(&mut v, rows);
            let r = norm(&v);
            if r < 1e-3 {
                continue;
            }
            let v = sign_fixed(v.iter().map(|x| x / r).collect());
            best = match best {
                None => Some((r, v)),
                Some((br, bv)) => {
                    if r > br + 1e-9 || ((r - br).abs() <= 1e-9 && lex_cmp(&v, &bv) == Ordering::Greater) {
                        Some((r, v))
                    } else {
                        Some((br, bv))
                    }
                }
            };
        }
        best.map(|(_, v)| v)
    };

    let all: Vec<usize> = order.clone();
    for cluster in &clusters {
        while let Some(x) = best_in(cluster, &rows) {
            let mut y = matvec_t(g, &x);
            let mut basis = rows.clone();
            basis.push(x.clone());
            orthogonalize(&mut y, &basis);
            let sigma = norm(&y);
            if sigma > zero_tol {
                y.iter_mut().for_each(|v| *v /= sigma);
                rows.push(x.clone());
                rows.push(y.clone());
                pairs.push((0.0, x, y));
            } else if let Some(p) = pending.take() {
                rows.push(x.clone());
                pairs.push((0.0, p, x));
            } else {
                rows.push(x.clone());
                pending = Some(x);
            }
            if rows.len() >= n {
                break;
            }
        }
    }
    // Numerical leftovers: fill from any remaining direction.
    while rows.len() < n {
        let Some(x) = best_in(&all, &rows).or_else(|| {
            (0..n).find_map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                orthogonalize(&mut e, &rows);
                let r = norm(&e);
                (r > 1e-3).then(|| e.iter().map(|v| v / r).collect())
            })
        }) else {
            return Err(Error::Linalg("could not complete the orthogonal basis".into()));
        };
        rows.push(x.clone());
        match pending.take() {
            Some(p) => pairs.push((0.0, p, x)),
            None => pending = Some(x),
        }
    }

    // Orient each block so its value is nonnegative.
    for (val, x, y) in pairs.iter_mut() {
        let gy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| g[(i, j)] * y[j]).sum()).collect();
        let v = dot(x, &gy);
        if v < 0.0 {
            y.iter_mut().for_each(|t| *t = -*t);
        }
        *val = v.abs();
    }
    let tie = 1e-12 * gmax.max(1.0);
    pairs.sort_by(|a, b| {
        if (a.0 - b.0).abs() > tie {
            b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal)
        } else {
            lex_cmp(&b.1, &a.1)
        }
    });

    let mut orthogonal = Vec::with_capacity(n * n);
    let mut block_values = Vec::with_capacity(n / 2);
    for (v, x, y) in &pairs {
        block_values.push(*v);
        orthogonal.extend_from_slice(x);
        orthogonal.extend_from_slice(y);
    }
    if let Some(z) = pending {
        orthogonal.extend_from_slice(&z);
    }
    let mut form = AntisymCanonicalForm { dim: n, orthogonal, block_values, residual: 0.0 };
    let rec = form.reconstruct();
    let mut residual = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            residual = residual.max((rec[(i, j)] - g[(i, j)]).abs());
        }
    }
    form.residual = residual;
    Ok(form)
}

/// `B = e + Σ f_a γ_a + U_R†(Σ g̃^R_k γ_{2k−1}γ_{2k})U_R + i·U_I†(Σ g̃^I_k γ_{2k−1}γ_{2k})U_I`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DfGenerator {
    pub e: Complex64,
    pub f: Vec<Complex64>,
    pub real_part: AntisymCanonicalForm,
    pub imag_part: AntisymCanonicalForm,
}

impl DfGenerator {
    pub fn n_modes(&self) -> usize {
        self.f.len()
    }

    /// `|e| + ‖f‖₁ + ‖g̃^R‖₁ + ‖g̃^I‖₁`.
    pub fn l1(&self) -> f64 {
        self.e.norm() + self.f.iter().map(|c| c.norm()).sum::<f64>() + self.real_part.l1() + self.imag_part.l1()
    }

    /// Operator in the original Majorana basis.
    pub fn to_majorana(&self) -> Result<MajoranaPoly> {
        let n = self.n_modes();
        let mut p = MajoranaPoly::zero(n);
        p.add_term(0, self.e)?;
        for (a, &c) in self.f.iter().enumerate() {
            p.add_term(1u64 << a, c)?;
        }
        let re = self.real_part.to_majorana(n)?;
        let mut im = MajoranaPoly::zero(n);
        for (m, c) in self.imag_part.to_majorana(n)?.terms() {
            im.add_term(m, c * Complex64::new(0.0, 1.0))?;
        }
        let mut out = p.add(&re).add(&im);
        out.prune();
        Ok(out)
    }
}

fn majorana2_modes(basis: &SosBasis) -> Result<usize> {
    let Algebra::Majorana { n_modes } = basis.algebra else {
        return Err(Error::BasisMismatch("generators are not over a Majorana basis".into()));
    };
    let expected = SosBasis::majorana_degree2(n_modes)?;
    if basis.monomials != expected.monomials {
        return Err(Error::BasisMismatch("basis is not {1, γ_a, iγ_aγ_b} in canonical order".into()));
    }
    let ok = basis.phases.iter().zip(&expected.phases).all(|(p, q)| (p - q).norm() <= 1e-12);
    if !ok {
        return Err(Error::BasisMismatch("basis phases differ from {1, γ_a, iγ_aγ_b}".into()));
    }
    Ok(n_modes)
}

/// Splits one coefficient vector over `{1, γ_a, iγ_aγ_b}` into `(e, f, g^R, g^I)`.
fn split_vector(b: &[Complex64], n: usize) -> (Complex64, Vec<Complex64>, Mat<f64>, Mat<f64>) {
    let e = b[0];
    let f = b[1..=n].to_vec();
    let mut gr = Mat::<f64>::zeros(n, n);
    let mut gi = Mat::<f64>::zeros(n, n);
    let mut k = n + 1;
    for a in 0..n {
        for c in a + 1..n {
            let g = Complex64::new(0.0, 1.0) * b[k];
            gr[(a, c)] = g.re;
            gr[(c, a)] = -g.re;
            gi[(a, c)] = g.im;
            gi[(c, a)] = -g.im;
            k += 1;
        }
    }
    (e, f, gr, gi)
}

pub fn double_factorize(gens: &SosGenerators) -> Result<Vec<DfGenerator>> {
    let n = majorana2_modes(&gens.basis)?;
    let l = gens.basis.len();
    gens.vectors
        .par_iter()
        .map(|b| {
            if b.len() != l {
                return Err(Error::BasisMismatch(format!("generator has {} entries, basis has {l}", b.len())));
            }
            let (e, f, gr, gi) = split_vector(b, n);
            Ok(DfGenerator {
                e,
                f,
                real_part: antisymmetric_canonical_form(&gr)?,
                imag_part: antisymmetric_canonical_form(&gi)?,
            })
        })
        .collect()
}

/// `Σ_j (|e_j| + ‖f_j‖₁ + ‖g̃^R_j‖₁ + ‖g̃^I_j‖₁)²`.
pub fn df_lambda(dfgens: &[DfGenerator]) -> f64 {
    dfgens.iter().map(|d| d.l1().powi(2)).sum()
}

/// Entrywise accounting `Σ_j (|e_j| + ‖f_j‖₁ + Σ_{a<b} |g_{j,ab}|)²`.
pub fn direct_lambda(gens: &SosGenerators) -> Result<f64> {
    majorana2_modes(&gens.basis)?;
    Ok(gens.vectors.iter().map(|b| b.iter().map(|c| c.norm()).sum::<f64>().powi(2)).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaBoundReport {
    pub lambda_df: f64,
    /// `4Nβ`.
    pub bound: f64,
    /// `4Nβ − λ_DF`.
    pub slack: f64,
}

/// Checks `λ_DF ≤ 4Nβ` up to a relative `1e−6`.
pub fn lambda_4n_beta_check(dfgens: &[DfGenerator], beta: f64, n_modes: usize) -> Result<BetaBoundReport> {
    let lambda_df = df_lambda(dfgens);
    let bound = 4.0 * n_modes as f64 * beta;
    if lambda_df > bound + 1e-6 * bound.abs() {
        return Err(Error::LambdaBound { lambda: lambda_df, bound });
    }
    Ok(BetaBoundReport { lambda_df, bound, slack: bound - lambda_df })
}

/// Per-generator block values and both λ accountings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DfReport {
    pub real_blocks: Vec<Vec<f64>>,
    pub imag_blocks: Vec<Vec<f64>>,
    pub lambda_df: f64,
    pub lambda_direct: f64,
}

pub fn df_report(gens: &SosGenerators) -> Result<(Vec<DfGenerator>, DfReport)> {
    let dfgens = double_factorize(gens)?;
    let report = DfReport {
        real_blocks: dfgens.iter().map(|d| d.real_part.block_values.clone()).collect(),
        imag_blocks: dfgens.iter().map(|d| d.imag_part.block_values.clone()).collect(),
        lambda_df: df_lambda(&dfgens),
        lambda_direct: direct_lambda(gens)?,
    };
    Ok((dfgens, report))
}

/// Monomial key of `iγ_aγ_b` (0-based `a < b`) in the degree-2 basis.
pub fn pair_index(a: usize, b: usize, n_modes: usize) -> usize {
    debug_assert!(a < b && b < n_modes);
    1 + n_modes + a * (2 * n_modes - a - 1) / 2 + (b - a - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sosopt::Mono;

    #[test]
    fn two_by_two() {
        let g = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => 3.0,
            (1, 0) => -3.0,
            _ => 0.0,
        });
        let f = antisymmetric_canonical_form(&g).unwrap();
        assert_eq!(f.block_values, vec![3.0]);
        assert_eq!(f.orthogonal, vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn pair_index_matches_basis() {
        let n = 6;
        let b = SosBasis::majorana_degree2(n).unwrap();
        for a in 0..n {
            for c in a + 1..n {
                assert_eq!(b.monomials[pair_index(a, c, n)], Mono::majorana((1 << a) | (1 << c)));
            }
        }
    }

    #[test]
    fn rejects_symmetric() {
        let g = Mat::from_fn(3, 3, |_, _| 1.0);
        assert!(matches!(antisymmetric_canonical_form(&g), Err(Error::NotAntisymmetric(_))));
    }
}
