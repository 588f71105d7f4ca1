//! SYK instances, exact ground energies, the pair-coupling matrix `J`, and the
//! normalization scaling experiment.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::doublefact::{df_lambda, direct_lambda, double_factorize, lambda_4n_beta_check};
use crate::error::{Error, Result};
use crate::linalg::{herm_eigenvalues, herm_eigh, lanczos_lowest, spectral_norm_r};
use crate::operators::{MajoranaPoly, PauliSum};
use crate::sosopt::{
    algebraic_residual, build_sos_sdp, extract_generators, solve_sdp, SolverOptions, SosBasis, SosTarget,
    DEFAULT_RANK_TOL,
};

/// Largest mode count accepted by [`ground_energy`].
pub const MAX_GROUND_MODES: usize = 28;
/// Above this Hilbert-space dimension the ground energy comes from Lanczos.
pub const DENSE_GROUND_DIM: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    /// Mode indices `a < b < c < d`, 1-based.
    pub indices: [usize; 4],
    pub g: f64,
}

/// `H = C(N,4)^{-1/2} Σ_{a<b<c<d} g_abcd γ_aγ_bγ_cγ_d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SykInstance {
    pub n_modes: usize,
    pub seed: u64,
    pub couplings: Vec<Coupling>,
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

/// Standard normal for one index tuple: ChaCha8 keyed by `seed`, stream = packed tuple, Box–Muller.
pub fn coupling_normal(seed: u64, indices: [usize; 4]) -> f64 {
    let stream = indices.iter().fold(0u64, |s, &i| (s << 16) | i as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

pub fn generate_syk(n_modes: usize, seed: u64) -> Result<SykInstance> {
    if n_modes < 4 || n_modes % 2 != 0 || n_modes > crate::operators::MAX_MODES {
        return Err(Error::invalid(format!("SYK needs an even mode count in [4, 64], got {n_modes}")));
    }
    let mut couplings = Vec::with_capacity(binomial(n_modes, 4) as usize);
    for a in 1..=n_modes {
        for b in a + 1..=n_modes {
            for c in b + 1..=n_modes {
                for d in c + 1..=n_modes {
                    let idx = [a, b, c, d];
                    couplings.push(Coupling { indices: idx, g: coupling_normal(seed, idx) });
                }
            }
        }
    }
    Ok(SykInstance { n_modes, seed, couplings })
}

impl SykInstance {
    /// Instance with explicitly given couplings; unlisted tuples are zero.
    pub fn from_couplings(n_modes: usize, couplings: Vec<Coupling>) -> Result<Self> {
        if n_modes < 4 || n_modes % 2 != 0 {
            return Err(Error::invalid(format!("SYK needs an even mode count >= 4, got {n_modes}")));
        }
        for c in &couplings {
            let [a, b, cc, d] = c.indices;
            if !(1 <= a && a < b && b < cc && cc < d && d <= n_modes) {
                return Err(Error::invalid(format!("coupling indices {:?} not increasing within 1..={n_modes}", c.indices)));
            }
        }
        Ok(SykInstance { n_modes, seed: 0, couplings })
    }

    /// `1/√C(N,4)`.
    pub fn normalization(&self) -> f64 {
        1.0 / (binomial(self.n_modes, 4) as f64).sqrt()
    }

    pub fn hamiltonian(&self) -> Result<MajoranaPoly> {
        let s = self.normalization();
        let mut h = MajoranaPoly::zero(self.n_modes);
        for c in &self.couplings {
            let mask = c.indices.iter().fold(0u64, |m, &i| m | 1u64 << (i - 1));
            h.add_term(mask, Complex64::new(s * c.g, 0.0))?;
        }
        h.prune();
        Ok(h)
    }

    pub fn pauli(&self) -> Result<PauliSum> {
        self.hamiltonian()?.to_pauli()
    }
}

/// `C(N,4)^{-1/2} Σ |g_abcd|`.
pub fn syk_lambda_lcu(inst: &SykInstance) -> f64 {
    inst.normalization() * inst.couplings.iter().map(|c| c.g.abs()).sum::<f64>()
}

/// Lowest eigenvalue of the Jordan–Wigner image.
pub fn ground_energy(inst: &SykInstance) -> Result<f64> {
    if inst.n_modes > MAX_GROUND_MODES {
        return Err(Error::DenseCapExceeded { qubits: inst.n_modes / 2, cap: MAX_GROUND_MODES / 2 });
    }
    let h = inst.pauli()?;
    pauli_ground_energy(&h, inst.seed)
}

/// Ground energy and a ground state, from the dense eigensolver.
pub fn ground_state(inst: &SykInstance) -> Result<(f64, Vec<Complex64>)> {
    let h = inst.pauli()?;
    if 1usize << h.n_qubits() > DENSE_GROUND_DIM {
        return Err(Error::DenseCapExceeded { qubits: h.n_qubits(), cap: DENSE_GROUND_DIM.trailing_zeros() as usize });
    }
    let d = h.to_dense_capped(h.n_qubits())?;
    let (vals, vecs) = herm_eigh(d.mat().as_ref())?;
    let psi = (0..vecs.nrows()).map(|i| vecs[(i, 0)]).collect();
    Ok((vals[0], psi))
}

/// Dense eigensolver up to [`DENSE_GROUND_DIM`], Lanczos above.
pub fn pauli_ground_energy(h: &PauliSum, seed: u64) -> Result<f64> {
    let dim = 1usize << h.n_qubits();
    if dim <= DENSE_GROUND_DIM {
        let d = h.to_dense_capped(h.n_qubits())?;
        return Ok(herm_eigenvalues(d.mat().as_ref())?[0]);
    }
    let scale = h.lcu_l1_norm().max(1.0);
    lanczos_lowest(dim, |x, y| h.apply(x, y), 1e-10 * scale, 600, seed)
}

/// Index of the pair `(a, b)`, 0-based `a < b`, in lexicographic order.
fn pair_position(a: usize, b: usize, n: usize) -> usize {
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// `J(ab, cd) = J(cd, ab) = C(N,4)^{-1/2} g_abcd` over lexicographically ordered pairs.
pub fn j_matrix(inst: &SykInstance) -> Mat<f64> {
    let n = inst.n_modes;
    let p = binomial(n, 2) as usize;
    let s = inst.normalization();
    let mut j = Mat::<f64>::zeros(p, p);
    for c in &inst.couplings {
        let [a, b, cc, d] = c.indices.map(|i| i - 1);
        let (r, q) = (pair_position(a, b, n), pair_position(cc, d, n));
        j[(r, q)] = s * c.g;
        j[(q, r)] = s * c.g;
    }
    j
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JNorm {
    pub norm: f64,
    /// `C(N,2)·‖J‖`.
    pub dual_bound: f64,
}

pub fn j_matrix_norm(inst: &SykInstance) -> Result<JNorm> {
    let j = j_matrix(inst);
    let norm = spectral_norm_r(j.as_ref())?;
    Ok(JNorm { norm, dual_bound: j.nrows() as f64 * norm })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub solver: SolverOptions,
    pub rank_tol: f64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig { solver: SolverOptions::default(), rank_tol: DEFAULT_RANK_TOL }
    }
}

/// One `(N, seed)` cell of the experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n_modes: usize,
    pub seed: u64,
    pub lambda_lcu: f64,
    pub beta: f64,
    /// `E₀ + β`.
    pub delta_sos: f64,
    /// Double-factorized accounting.
    pub lambda_sos: f64,
    /// Entrywise accounting of the same generators.
    pub lambda_direct: f64,
    pub sqrt_delta_lambda: f64,
    pub e0: f64,
    /// `N·‖J‖`.
    pub j_norm_n: f64,
    /// `C(N,2)·‖J‖`.
    pub dual_bound: f64,
    /// `E₀ + λ_LCU`.
    pub delta_lcu: f64,
    pub rank: usize,
    pub residual: f64,
    pub relative_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub quantity: String,
    pub slope: f64,
    pub intercept: f64,
    /// 95% interval on the slope.
    pub ci: [f64; 2],
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    pub excluded: usize,
    pub slopes: Vec<SlopeFit>,
}

impl ScalingReport {
    pub fn slope(&self, quantity: &str) -> Option<&SlopeFit> {
        self.slopes.iter().find(|s| s.quantity == quantity)
    }
}

/// Least-squares fit of `ln y` on `ln x` with a Student-t interval on the slope.
pub fn fit_log_log(quantity: &str, xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len();
    if n < 2 {
        return Err(Error::invalid(format!("{quantity}: need two positive points for a fit, got {n}")));
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid(format!("{quantity}: all points share one abscissa")));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ci = if n > 2 {
        let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        let se = (sse / (n - 2) as f64 / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, (n - 2) as f64).map_err(|e| Error::invalid(e.to_string()))?.inverse_cdf(0.975);
        [slope - t * se, slope + t * se]
    } else {
        [f64::NEG_INFINITY, f64::INFINITY]
    };
    Ok(SlopeFit { quantity: quantity.to_string(), slope, intercept, ci, points: n })
}

/// SDP, generators, double factorization and dense ground energy for one instance.
pub fn scaling_cell(inst: &SykInstance, cfg: &ScalingConfig) -> Result<ScalingRow> {
    let n = inst.n_modes;
    let h = inst.hamiltonian()?;
    let target = SosTarget::Majorana(h);
    let sdp = build_sos_sdp(&target, &SosBasis::majorana_degree2(n)?)?;
    let cert = solve_sdp(&sdp, &cfg.solver)?;
    let gens = extract_generators(&cert, cfg.rank_tol)?;
    let dfgens = double_factorize(&gens)?;
    let lambda_sos = df_lambda(&dfgens);
    let lambda_direct = direct_lambda(&gens)?;
    if cert.converged {
        lambda_4n_beta_check(&dfgens, cert.beta, n)?;
    }
    let e0 = ground_energy(inst)?;
    let jn = j_matrix_norm(inst)?;
    let lambda_lcu = syk_lambda_lcu(inst);
    let delta_sos = e0 + cert.beta;
    Ok(ScalingRow {
        n_modes: n,
        seed: inst.seed,
        lambda_lcu,
        beta: cert.beta,
        delta_sos,
        lambda_sos,
        lambda_direct,
        sqrt_delta_lambda: (delta_sos.max(0.0) * lambda_sos).sqrt(),
        e0,
        j_norm_n: n as f64 * jn.norm,
        dual_bound: jn.dual_bound,
        delta_lcu: e0 + lambda_lcu,
        rank: gens.rank,
        residual: cert.residual,
        relative_residual: algebraic_residual(&target, &gens, cert.beta),
        iterations: cert.iterations,
        converged: cert.converged,
    })
}

/// Quantities fitted against `N`, in report order.
pub const SCALING_QUANTITIES: [&str; 5] = ["lambda_lcu", "beta", "delta_sos", "lambda_sos", "sqrt_delta_lambda"];

fn quantity(row: &ScalingRow, name: &str) -> f64 {
    match name {
        "lambda_lcu" => row.lambda_lcu,
        "beta" => row.beta,
        "delta_sos" => row.delta_sos,
        "lambda_sos" => row.lambda_sos,
        "sqrt_delta_lambda" => row.sqrt_delta_lambda,
        _ => f64::NAN,
    }
}

/// Runs every `(N, seed)` cell, seeds `0..seeds_per_n`, and fits log-log slopes on converged rows.
///
/// Rows come back sorted by `(N, seed)` whatever order the cells finish in.
pub fn run_scaling_experiment(n_list: &[usize], seeds_per_n: usize, cfg: &ScalingConfig) -> Result<ScalingReport> {
    for &n in n_list {
        if n < 4 || n % 2 != 0 || n > MAX_GROUND_MODES {
            return Err(Error::invalid(format!("mode count {n} outside the supported grid")));
        }
    }
    let cells: Vec<(usize, u64)> =
        n_list.iter().flat_map(|&n| (0..seeds_per_n as u64).map(move |s| (n, s))).collect();
    let mut rows: Vec<ScalingRow> = cells
        .par_iter()
        .map(|&(n, seed)| scaling_cell(&generate_syk(n, seed)?, cfg))
        .collect::<Result<_>>()?;
    rows.sort_by_key(|r| (r.n_modes, r.seed));
    let excluded = rows.iter().filter(|r| !r.converged).count();
    let used: Vec<&ScalingRow> = rows.iter().filter(|r| r.converged).collect();
    let xs: Vec<f64> = used.iter().map(|r| r.n_modes as f64).collect();
    let mut slopes = Vec::new();
    let distinct = {
        let mut v: Vec<usize> = used.iter().map(|r| r.n_modes).collect();
        v.dedup();
        v.len()
    };
    if distinct >= 2 {
        for q in SCALING_QUANTITIES {
            let ys: Vec<f64> = used.iter().map(|r| quantity(r, q)).collect();
            slopes.push(fit_log_log(q, &xs, &ys)?);
        }
    }
    Ok(ScalingReport { rows, excluded, slopes })
}
