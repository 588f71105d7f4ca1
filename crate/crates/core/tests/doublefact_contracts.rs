use faer::{c64, Mat};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sossa_core::doublefact::*;
use sossa_core::linalg::herm_eigenvalues;
use sossa_core::operators::DenseOperator;
use sossa_core::sosopt::{
    build_sos_sdp, extract_generators, solve_sdp, SolverOptions, SosBasis, SosGenerators, SosTarget, DEFAULT_RANK_TOL,
};
use sossa_core::syk::generate_syk;
use sossa_core::Error;

fn antisym(n: usize, f: impl Fn(usize, usize) -> f64) -> Mat<f64> {
    let mut g = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = f(i, j);
            g[(i, j)] = v;
            g[(j, i)] = -v;
        }
    }
    g
}

fn random_antisym(n: usize, rng: &mut ChaCha8Rng) -> Mat<f64> {
    let vals: Vec<f64> = (0..n * n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    antisym(n, |i, j| vals[i * n + j])
}

fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Mat<f64> {
    let mut cols: Vec<Vec<f64>> = Vec::new();
    while cols.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        for _ in 0..2 {
            for c in &cols {
                let d: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(c).for_each(|(a, b)| *a -= d * b);
            }
        }
        let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if nv > 1e-3 {
            cols.push(v.iter().map(|a| a / nv).collect());
        }
    }
    Mat::from_fn(n, n, |i, j| cols[j][i])
}

fn max_abs_diff(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    let mut m = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            m = m.max((a[(i, j)] - b[(i, j)]).abs());
        }
    }
    m
}

fn check_form(g: &Mat<f64>) -> AntisymCanonicalForm {
    let f = antisymmetric_canonical_form(g).unwrap();
    let n = g.nrows();
    assert_eq!(f.block_values.len(), n / 2);
    assert!(f.orthogonality_error() <= 1e-12, "orthogonality {:e} at n = {n}", f.orthogonality_error());
    assert!(f.residual <= 1e-10, "residual {:e} at n = {n}", f.residual);
    assert!(max_abs_diff(&f.reconstruct(), g) <= 1e-10);
    assert!(f.block_values.iter().all(|&v| v >= 0.0));
    // descending, with ties (equal up to rounding) in either order
    let top = f.block_values.first().copied().unwrap_or(0.0).max(1.0);
    assert!(f.block_values.windows(2).all(|w| w[0] >= w[1] - 1e-12 * top));
    f
}

#[test]
fn canonical_two_by_two() {
    let g = antisym(2, |_, _| 3.0);
    let f = check_form(&g);
    assert_eq!(f.block_values, vec![3.0]);
    assert!(max_abs_diff(&f.orthogonal_mat(), &Mat::identity(2, 2)) == 0.0);
}

#[test]
fn canonical_block_diagonal_is_permutation() {
    let g = antisym(4, |i, j| match (i, j) {
        (0, 1) => 1.0,
        (2, 3) => 2.0,
        _ => 0.0,
    });
    let f = check_form(&g);
    assert!((f.block_values[0] - 2.0).abs() < 1e-14 && (f.block_values[1] - 1.0).abs() < 1e-14);
    let o = f.orthogonal_mat();
    for i in 0..4 {
        let ones = (0..4).filter(|&j| (o[(i, j)].abs() - 1.0).abs() < 1e-12).count();
        let zeros = (0..4).filter(|&j| o[(i, j)].abs() < 1e-12).count();
        assert_eq!((ones, zeros), (1, 3), "row {i} of O is not a signed unit vector");
    }
}

#[test]
fn canonical_random_eight_matches_complex_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let g = random_antisym(8, &mut rng);
    let f = check_form(&g);
    // i·g is Hermitian with eigenvalues ±g_k.
    let ig = Mat::from_fn(8, 8, |i, j| c64::new(0.0, g[(i, j)]));
    let ev = herm_eigenvalues(ig.as_ref()).unwrap();
    let mut pos: Vec<f64> = ev.iter().copied().filter(|&v| v > 0.0).collect();
    pos.sort_by(|a, b| b.partial_cmp(a).unwrap());
    assert_eq!(pos.len(), 4);
    for (a, b) in pos.iter().zip(&f.block_values) {
        assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }
}

#[test]
fn canonical_two_hundred_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    for t in 0..200 {
        let n = 1 + t % 24;
        let g = match t % 4 {
            // degenerate spectrum: repeated blocks in a random frame
            1 if n >= 4 => {
                let o = random_orthogonal(n, &mut rng);
                let d = antisym(n, |i, j| if j == i + 1 && i % 2 == 0 { 1.5 } else { 0.0 });
                let m = o.transpose() * d * &o;
                antisym(n, |i, j| m[(i, j)])
            }
            // rank deficient
            2 if n >= 3 => {
                let k = n / 3;
                let o = random_orthogonal(n, &mut rng);
                let d = antisym(n, |i, j| if j == i + 1 && i % 2 == 0 && i / 2 < k { (i + 1) as f64 } else { 0.0 });
                let m = o.transpose() * d * &o;
                antisym(n, |i, j| m[(i, j)])
            }
            _ => random_antisym(n, &mut rng),
        };
        check_form(&g);
    }
}

#[test]
fn canonical_zero_and_rejects_symmetric() {
    let f = check_form(&Mat::zeros(5, 5));
    assert_eq!(f.block_values, vec![0.0, 0.0]);
    let mut g = antisym(3, |_, _| 1.0);
    g[(0, 1)] += 1e-9;
    assert!(matches!(antisymmetric_canonical_form(&g), Err(Error::NotAntisymmetric(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn canonical_form_invariants(n in 1usize..=16, seed in any::<u64>(), scale in 1e-3f64..1e3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_antisym(n, &mut rng);
        let g = antisym(n, |i, j| g[(i, j)] * scale);
        let f = antisymmetric_canonical_form(&g).unwrap();
        prop_assert!(f.orthogonality_error() <= 1e-12);
        prop_assert!(f.residual <= 1e-10 * scale.max(1.0));
    }
}

fn single_generator(n: usize, entries: &[(usize, Complex64)]) -> SosGenerators {
    let basis = SosBasis::majorana_degree2(n).unwrap();
    let mut v = vec![Complex64::default(); basis.len()];
    for &(k, c) in entries {
        v[k] = c;
    }
    SosGenerators { basis, vectors: vec![v], eigenvalues: vec![1.0], rank: 1 }
}

fn dense(p: &sossa_core::operators::MajoranaPoly) -> DenseOperator {
    p.to_pauli().unwrap().to_dense().unwrap()
}

#[test]
fn df_single_pair_operator() {
    let n = 4;
    let gens = single_generator(n, &[(pair_index(0, 1, n), Complex64::new(1.0, 0.0))]);
    let df = double_factorize(&gens).unwrap();
    assert_eq!(df.len(), 1);
    assert_eq!(df[0].e, Complex64::default());
    assert!(df[0].f.iter().all(|c| c.norm() == 0.0));
    let blocks: Vec<f64> =
        df[0].real_part.block_values.iter().chain(&df[0].imag_part.block_values).copied().filter(|v| *v > 0.0).collect();
    assert_eq!(blocks.len(), 1);
    assert!((blocks[0] - 1.0).abs() < 1e-14);
    assert!((df_lambda(&df) - 1.0).abs() < 1e-14);
}

#[test]
fn df_linear_operator() {
    let n = 4;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let gens = single_generator(n, &[(0, Complex64::new(s, 0.0)), (1, Complex64::new(s, 0.0))]);
    let df = double_factorize(&gens).unwrap();
    assert_eq!(df[0].e, Complex64::new(s, 0.0));
    assert_eq!(df[0].f, vec![Complex64::new(s, 0.0), Complex64::default(), Complex64::default(), Complex64::default()]);
    assert!(df[0].real_part.block_values.iter().chain(&df[0].imag_part.block_values).all(|&v| v == 0.0));
}

#[test]
fn df_beats_entrywise_on_overlapping_pairs() {
    let n = 4;
    // i(γ1γ2 + γ1γ3): entrywise weight 2, one rotated block of weight √2.
    let one = Complex64::new(1.0, 0.0);
    let gens = single_generator(n, &[(pair_index(0, 1, n), one), (pair_index(0, 2, n), one)]);
    let df = double_factorize(&gens).unwrap();
    assert!((direct_lambda(&gens).unwrap() - 4.0).abs() < 1e-14);
    assert!((df_lambda(&df) - 2.0).abs() < 1e-12);
    // disjoint pairs gain nothing
    let gens = single_generator(n, &[(pair_index(0, 1, n), one), (pair_index(2, 3, n), one)]);
    let df = double_factorize(&gens).unwrap();
    assert!((df_lambda(&df) - direct_lambda(&gens).unwrap()).abs() < 1e-12);
}

#[test]
fn df_rejects_other_bases() {
    let basis = SosBasis::pauli_up_to_degree(2, 1).unwrap();
    let gens = SosGenerators { vectors: vec![vec![Complex64::default(); basis.len()]], basis, eigenvalues: vec![1.0], rank: 1 };
    assert!(matches!(double_factorize(&gens), Err(Error::BasisMismatch(_))));
}

fn syk_generators(n: usize, seed: u64) -> (SosGenerators, f64) {
    let inst = generate_syk(n, seed).unwrap();
    let sdp = build_sos_sdp(&SosTarget::Majorana(inst.hamiltonian().unwrap()), &SosBasis::majorana_degree2(n).unwrap()).unwrap();
    let cert = solve_sdp(&sdp, &SolverOptions::default()).unwrap();
    assert!(cert.converged, "SDP at N = {n}, seed {seed} did not converge");
    (extract_generators(&cert, DEFAULT_RANK_TOL).unwrap(), cert.beta)
}

#[test]
fn df_rewriting_preserves_generators_densely() {
    let (gens, _) = syk_generators(8, 3);
    let df = double_factorize(&gens).unwrap();
    let dim = 16;
    let mut sum_before = DenseOperator::zeros(dim);
    let mut sum_after = DenseOperator::zeros(dim);
    for (b, d) in gens.vectors.iter().zip(&df) {
        let before = gens.basis.operator(b).unwrap().to_dense().unwrap();
        let after = dense(&d.to_majorana().unwrap());
        assert!(before.sub(&after).max_abs() <= 1e-9, "generator mismatch {:e}", before.sub(&after).max_abs());
        sum_before = sum_before.add(&before.adjoint().matmul(&before));
        sum_after = sum_after.add(&after.adjoint().matmul(&after));
    }
    assert!(sum_before.sub(&sum_after).max_abs() <= 1e-8);
}

#[test]
fn df_lambda_bounds_over_seeds() {
    let n = 8;
    for seed in 0..20 {
        let (gens, beta) = syk_generators(n, seed);
        let df = double_factorize(&gens).unwrap();
        let l_df = df_lambda(&df);
        let l_direct = direct_lambda(&gens).unwrap();
        assert!(l_df <= l_direct, "seed {seed}: {l_df} > {l_direct}");
        let r = lambda_4n_beta_check(&df, beta, n).unwrap();
        assert!(r.lambda_df <= 4.0 * n as f64 * beta * (1.0 + 1e-6));
    }
}

#[test]
fn beta_check_trivial_and_single_coupling() {
    let r = lambda_4n_beta_check(&[], 0.0, 4).unwrap();
    assert_eq!((r.lambda_df, r.bound, r.slack), (0.0, 0.0, 0.0));

    let (gens, beta) = syk_generators(4, 11);
    let df = double_factorize(&gens).unwrap();
    let r = lambda_4n_beta_check(&df, beta, 4).unwrap();
    assert!(r.slack >= 0.0);
    // γ1γ2γ3γ4 has spectrum ±|g|, and the degree-2 relaxation is tight here.
    let inst = generate_syk(4, 11).unwrap();
    assert!((beta - inst.couplings[0].g.abs()).abs() < 1e-6, "beta {beta}");
}

#[test]
fn beta_check_flags_violation() {
    let n = 4;
    let gens = single_generator(n, &[(pair_index(0, 1, n), Complex64::new(1.0, 0.0))]);
    let df = double_factorize(&gens).unwrap();
    assert!(matches!(lambda_4n_beta_check(&df, 0.01, n), Err(Error::LambdaBound { .. })));
}
