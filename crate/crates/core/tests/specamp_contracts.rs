mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::*;
use faer::{c64, Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sossa_core::operators::{lcu_l1_norm, termwise_sa, DenseOperator, PauliSum, PauliTerm, PauliWord};
use sossa_core::sosopt::*;
use sossa_core::specamp::*;
use sossa_core::syk::{generate_syk, ground_energy, scaling_cell, ScalingConfig};
use sossa_core::{Complex64, Error};

fn w(s: &str) -> PauliWord {
    PauliWord::parse(s).unwrap()
}

fn solved(h: &SosTarget, basis: &SosBasis) -> (SosCertificate, SosGenerators) {
    let cert = solve_sdp(&build_sos_sdp(h, basis).unwrap(), &SolverOptions::default()).unwrap();
    assert!(cert.converged);
    let gens = extract_generators(&cert, DEFAULT_RANK_TOL).unwrap();
    (cert, gens)
}

fn minus_z() -> (SosCertificate, SosGenerators) {
    let basis = SosBasis::new(
        Algebra::Pauli { n_qubits: 1 },
        vec![Mono::IDENTITY, Mono::pauli(w("Z"))],
        vec![Complex64::new(1.0, 0.0); 2],
        1,
    )
    .unwrap();
    solved(&SosTarget::Pauli(PauliSum::new(1, [PauliTerm::real(-1.0, w("Z"))]).unwrap()), &basis)
}

fn single_row(op: PauliSum, norm: f64) -> SaOperator {
    SaOperator::new(vec![SaRow { norm, op }])
}

fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> Mat<c64> {
    let a = Mat::from_fn(d, d, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let h = &a + a.adjoint();
    Mat::from_fn(d, d, |i, j| h[(i, j)])
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn normalization_examples() {
    let (cert, gens) = minus_z();
    let sa = build_sa_from_generators(&gens, RowNorm::L1).unwrap();
    assert_eq!(sa.rows.len(), 1);
    assert!((sa.lambda - 2.0).abs() <= 1e-9, "λ = {}", sa.lambda);
    assert!((lambda_sos(&gens) - 2.0).abs() <= 1e-9);
    let sossa = build_sossa(&gens, cert.beta).unwrap();
    assert!((sossa.lambda_sos - sa.lambda).abs() <= 1e-15);

    let h = PauliSum::new(2, [PauliTerm::real(0.7, w("XZ")), PauliTerm::real(-0.2, w("YI")), PauliTerm::real(1.1, w("ZZ"))]).unwrap();
    let t = termwise_sa(&h).unwrap();
    let direct: f64 = t.rows.iter().map(|r| r.norm * r.norm).sum();
    assert!((t.lambda - direct).abs() <= 1e-15);
    assert!((t.lambda - 2.0 * lcu_l1_norm(&h)).abs() <= 1e-14);

    let mut zero = gens.clone();
    zero.vectors.push(vec![Complex64::new(0.0, 0.0); 2]);
    assert!(matches!(build_sa_from_generators(&zero, RowNorm::L1), Err(Error::ZeroRow(1))));
}

#[test]
fn syk8_sossa_square_reconstructs_shifted_hamiltonian() {
    for seed in 0..5 {
        let inst = generate_syk(8, seed).unwrap();
        let h = SosTarget::Majorana(inst.hamiltonian().unwrap());
        let (cert, default_gens) = solved(&h, &SosBasis::majorana_degree2(8).unwrap());
        let shifted = add_identity(&syk_matrix(&inst), cert.beta);

        // every positive Gram eigenvalue kept
        let gens = extract_generators(&cert, 1e-12).unwrap();
        let sossa = build_sossa(&gens, cert.beta).unwrap();
        let rows: Vec<Mat<c64>> = sossa.sa.rows.iter().map(|r| pauli_sum_matrix(&r.op)).collect();
        let err = fro(&(sum_of_squares(&rows) - &shifted));
        assert!(err <= 1e-8, "seed {seed}: {err}");
        assert!(fro(&(sossa.sa.square_dense().unwrap().mat() - &shifted)) <= 1e-8);

        // default cutoff: the SA square equals the truncated SOS exactly
        let sa = build_sa_from_generators(&default_gens, RowNorm::L1).unwrap();
        let truncated = sum_of_squares(&generator_matrices(&default_gens));
        assert!(fro(&(sa.square_dense().unwrap().mat() - &truncated)) <= 1e-12);
        assert!(fro(&(&truncated - &shifted)) / fro(&shifted) <= 1e-6);

        let direct: f64 = gens.vectors.iter().map(|b| b.iter().map(|x| x.norm()).sum::<f64>().powi(2)).sum();
        assert_eq!(sossa.lambda_sos, direct);
        assert!(sossa.sa.max_norm_excess().unwrap() <= 1e-9);
        let spectral = build_sa_from_generators(&gens, RowNorm::Spectral).unwrap();
        assert!(spectral.lambda <= sossa.lambda_sos + 1e-9);
    }
}

#[test]
fn lambda_sos_cauchy_schwarz_window() {
    let mut certs = Vec::new();
    for seed in 0..5 {
        let h = SosTarget::Majorana(generate_syk(8, seed).unwrap().hamiltonian().unwrap());
        let (cert, gens) = solved(&h, &SosBasis::majorana_degree2(8).unwrap());
        certs.push((h, cert, gens));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5 {
        let words = ["XI", "ZZ", "YX", "IZ", "II"];
        let h = PauliSum::new(2, words.iter().map(|s| PauliTerm::real(rng.random::<f64>() * 2.0 - 1.0, w(s)))).unwrap();
        let h = SosTarget::Pauli(h);
        let (cert, gens) = solved(&h, &SosBasis::pauli_up_to_degree(2, 2).unwrap());
        certs.push((h, cert, gens));
    }
    for (h, cert, gens) in &certs {
        let hd = pauli_sum_matrix(&h.to_pauli().unwrap());
        let d = hd.nrows();
        let normalized_trace = (0..d).map(|i| hd[(i, i)].re).sum::<f64>() / d as f64;
        let floor = normalized_trace + cert.beta;
        let lam = lambda_sos(gens);
        let l = cert.basis.len() as f64;
        assert!(lam >= floor - 1e-7, "λ_SOS {lam} below {floor}");
        assert!(lam <= l * floor + 1e-7, "λ_SOS {lam} above {}", l * floor);
    }
}

#[test]
fn shifted_square_examples() {
    let zero = single_row(PauliSum::zero(2), 1.0);
    assert!(shifted_square_spectrum(&zero).unwrap().iter().all(|&e| (e + 1.0).abs() <= 1e-15));
    let full = single_row(PauliSum::identity(2, 1.0), 1.0);
    assert!(shifted_square_spectrum(&full).unwrap().iter().all(|&e| (e - 1.0).abs() <= 1e-15));

    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10 {
        // random PSD Gram over the degree-1 Pauli basis on 3 qubits
        let basis = SosBasis::pauli_up_to_degree(3, 1).unwrap();
        let l = basis.len();
        let a = Mat::from_fn(l, 4, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let g = &a * a.adjoint();
        let cert = SosCertificate {
            basis,
            gram: HermitianMatrix::from_mat(&g),
            beta: 0.0,
            residual: 0.0,
            solver_tol: 1e-7,
            dual_residual: 0.0,
            duality_gap: 0.0,
            iterations: 0,
            converged: true,
            method: "manual".into(),
            dual_objective: 0.0,
            raw_residual: 0.0,
            psd_shift: 0.0,
        };
        let gens = extract_generators(&cert, DEFAULT_RANK_TOL).unwrap();
        let sa = build_sa_from_generators(&gens, RowNorm::L1).unwrap();
        let sq = sum_of_squares(&generator_matrices(&gens));
        let shifted = add_identity(&(sq * faer::Scale(c(2.0 / sa.lambda, 0.0))), -1.0);
        let oracle = herm_eigs(&shifted);
        let lib = shifted_square_spectrum(&sa).unwrap();
        assert!(max_diff(&lib, &oracle) <= 1e-10);
        assert!(lib.iter().all(|&e| (-1.0 - 1e-12..=1.0 + 1e-12).contains(&e)));
    }
}

#[test]
fn walk_phase_examples() {
    let m = walk_phases(&[0.0], 1.0).unwrap();
    assert!((m.phases[0].0 - FRAC_PI_2).abs() <= 1e-15 && (m.phases[0].1 + FRAC_PI_2).abs() <= 1e-15);
    let m = walk_phases(&[2.5], 2.5).unwrap();
    assert_eq!(m.phases[0], (0.0, -0.0));
    let m = walk_phases(&[-0.999, -0.5, 0.3], 1.0).unwrap();
    assert!(PI - m.phases[0].0 < 0.05 && m.phases[0].0 > m.phases[1].0 && m.phases[1].0 > m.phases[2].0);
    assert!(matches!(walk_phases(&[1.5], 1.0), Err(Error::OutsideNormalization { .. })));
}

/// Eigenphases of `R·U`, `R = diag(1, −1) ⊗ 1`, `U` the block dilation of `H/λ`.
fn dilation_oracle_phases(h: &Mat<c64>, lambda: f64) -> Vec<f64> {
    let d = h.nrows();
    let eig = h.self_adjoint_eigen(Side::Lower).unwrap();
    let (v, s) = (eig.U(), eig.S());
    let root = Mat::from_fn(d, d, |i, j| {
        (0..d).map(|k| v[(i, k)] * (1.0 - (s[k].re / lambda).powi(2)).max(0.0).sqrt() * v[(j, k)].conj()).sum::<c64>()
    });
    let u = Mat::from_fn(2 * d, 2 * d, |i, j| match (i < d, j < d) {
        (true, true) => h[(i, j)] / lambda,
        (false, false) => -h[(i - d, j - d)] / lambda,
        (true, false) => root[(i, j - d)],
        (false, true) => root[(i - d, j)],
    });
    let walk = Mat::from_fn(2 * d, 2 * d, |i, j| if i < d { u[(i, j)] } else { -u[(i, j)] });
    sorted(walk.eigenvalues().unwrap().iter().map(|z| z.im.atan2(z.re)).collect())
}

#[test]
fn walk_phases_match_explicit_dilation() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..25 {
        let h = random_hermitian(&mut rng, 4);
        let ev = herm_eigs(&h);
        let lambda = 1.3 * ev[0].abs().max(ev[3].abs());
        let model = walk_phases(&ev, lambda).unwrap();
        let expected = sorted(model.phases.iter().flat_map(|&(p, m)| [p, m]).collect());
        let oracle = dilation_oracle_phases(&h, lambda);
        assert!(max_diff(&expected, &oracle) <= 1e-8, "{expected:?} vs {oracle:?}");

        let lib = dilation_walk(&DenseOperator::from_mat(h.clone()), lambda).unwrap();
        let lib_phases = sorted(lib.eigenvalues().unwrap().iter().map(|z| z.im.atan2(z.re)).collect());
        assert!(max_diff(&lib_phases, &oracle) <= 1e-8);
    }
}

#[test]
fn doubled_hermitian_examples() {
    let zero = single_row(PauliSum::zero(1), 1.0);
    assert!(doubled_hermitian_spectrum(&zero).unwrap().iter().all(|e| e.abs() <= 1e-15));
    let id = single_row(PauliSum::identity(1, 1.0), 1.0);
    let s = doubled_hermitian_spectrum(&id).unwrap();
    assert!(max_diff(&s, &[-1.0, -1.0, 1.0, 1.0]) <= 1e-14);

    let h = PauliSum::new(1, [PauliTerm::real(1.0, w("X")), PauliTerm::real(1.0, w("Z"))]).unwrap();
    let sa = termwise_sa(&h).unwrap();
    let roots: Vec<f64> = herm_eigs(&add_identity(&pauli_sum_matrix(&h), 2.0)).iter().map(|e| e.max(0.0).sqrt()).collect();
    let total = 2 + 2 * sa.rows.len();
    let mut expected: Vec<f64> = roots.iter().flat_map(|&r| [r, -r]).collect();
    expected.resize(total, 0.0);
    let lib = doubled_hermitian_spectrum(&sa).unwrap();
    assert!(max_diff(&lib, &sorted(expected)) <= 1e-10, "{lib:?}");
}

/// `H_{K,N}` from its definition, register 0 most significant.
fn gadget_oracle(k: usize, n: usize, marked: &[usize]) -> (Mat<c64>, Vec<c64>) {
    let s = Mat::from_fn(n, 1, |i, _| c(if i < n / 2 { (2.0 / n as f64).sqrt() } else { 0.0 }, 0.0));
    let mut total: Option<Mat<c64>> = None;
    for (r, &x) in marked.iter().enumerate() {
        let mut a = identity(n) - &s * s.adjoint();
        a[(x, x)] -= c(1.0, 0.0);
        let hx = &a * &a;
        let mut term = Mat::from_fn(1, 1, |_, _| c(1.0, 0.0));
        for q in 0..k {
            term = kron(&term, &if q == r { hx.clone() } else { identity(n) });
        }
        total = Some(match total {
            None => term,
            Some(t) => t + term,
        });
    }
    let mut psi = Mat::from_fn(1, 1, |_, _| c(1.0, 0.0));
    for _ in 0..k {
        psi = kron(&psi, &s);
    }
    (total.unwrap(), (0..psi.nrows()).map(|i| psi[(i, 0)]).collect())
}

#[test]
fn gadget_examples() {
    for (k, n, marked, expected) in [(1, 4, vec![0], 0.5), (1, 4, vec![3], 0.0), (3, 8, vec![1, 6, 2], 0.5)] {
        let g = build_parity_or_gadget(&GadgetSpec::new(k, n, marked.clone()).unwrap()).unwrap();
        assert!((g.expected_eigenvalue - expected).abs() <= 1e-15);
        let (h, psi) = gadget_oracle(k, n, &marked);
        assert!(max_abs(&(g.hamiltonian.mat() - &h)) <= 1e-14);
        let d = psi.len();
        let resid: f64 = (0..d)
            .map(|i| ((0..d).map(|j| h[(i, j)] * psi[j]).sum::<c64>() - psi[i] * expected).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(resid <= 1e-12, "K={k} N={n}: {resid}");
        assert!(g.eigen_residual() <= 1e-12);
        assert!(g.row_square_error <= 1e-12);
        let sq = sum_of_squares(&g.sa_rows.iter().map(|r| r.mat().to_owned()).collect::<Vec<_>>());
        assert!(max_abs(&(sq - &h)) <= 1e-12);
    }
    assert!(GadgetSpec::new(2, 4, vec![0, 4]).is_err());
    assert!(GadgetSpec::new(1, 6, vec![0]).is_err());
    assert!(matches!(build_parity_or_gadget(&GadgetSpec::new(5, 8, vec![0; 5]).unwrap()), Err(Error::DenseCapExceeded { .. })));
}

#[test]
fn cost_table_examples() {
    let t = query_cost_table(1.0, 1.0, 1.0, 1.0, 1.0, 0.1, 1.0).unwrap();
    for r in &t.rows {
        assert!((r.lcu_cost - 10.0).abs() <= 1e-12 && (r.sa_cost - 10.0).abs() <= 1e-12);
    }
    let t = query_cost_table(100.0, 100.0, 100.0, 1.0, 1.0, 1.0, 1.0).unwrap();
    assert!((t.rows[0].lcu_cost - 100.0).abs() <= 1e-12 && (t.rows[0].sa_cost - 10.0).abs() <= 1e-12);
    let t = query_cost_table(4.0, 8.0, 2.0, 3.0, 0.5, 0.01, 2.0).unwrap();
    let te = (3.0f64 * 4.0).sqrt() * 2.0 + (4.0f64 / 3.0).sqrt() * 100f64.ln();
    assert!((t.rows[0].time_evolution - te).abs() <= 1e-12);
    assert!(query_cost_table(1.0, 1.0, 1.0, 1.0, -1.0, 0.1, 1.0).is_err());

    let inst = generate_syk(8, 0).unwrap();
    let row = scaling_cell(&inst, &ScalingConfig::default()).unwrap();
    let e0 = ground_energy(&inst).unwrap();
    assert!((row.delta_sos - (e0 + row.beta)).abs() <= 1e-9);
    let lam_sa = termwise_sa(&inst.pauli().unwrap()).unwrap().lambda;
    let t = query_cost_table(row.lambda_lcu, lam_sa, row.lambda_sos, row.lambda_lcu + e0, row.delta_sos, 0.01, 1.0).unwrap();
    let ratio = (row.delta_sos * row.lambda_sos).sqrt() / row.lambda_lcu;
    assert!((t.sossa_over_lcu - ratio).abs() <= 1e-12 * ratio);
    assert!((t.rows[2].sa_cost * 0.01 / row.lambda_lcu - ratio).abs() <= 1e-12 * ratio);
}
