mod common;

use common::*;
use faer::{c64, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sossa_core::operators::*;
use sossa_core::syk::{binomial, generate_syk};
use sossa_core::{Complex64, Error};

fn w(s: &str) -> PauliWord {
    PauliWord::parse(s).unwrap()
}

fn random_word(rng: &mut ChaCha8Rng, n: usize) -> String {
    (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)]).collect()
}

fn random_lcu(rng: &mut ChaCha8Rng, n: usize, terms: usize) -> PauliSum {
    let ts: Vec<PauliTerm> =
        (0..terms).map(|_| PauliTerm::real(rng.random::<f64>() * 2.0 - 1.0, w(&random_word(rng, n)))).collect();
    PauliSum::new(n, ts).unwrap()
}

fn dense(h: &PauliSum) -> Mat<c64> {
    h.to_dense().unwrap().into_mat()
}

#[test]
fn jordan_wigner_examples() {
    let one = Complex64::new(1.0, 0.0);
    let t = jordan_wigner(&MajoranaMonomial::new(&[1], one).unwrap(), 2).unwrap();
    assert_eq!(t.word, PauliWord::single(0, Letter::X));
    assert_eq!(t.coeff, one);
    let t = jordan_wigner(&MajoranaMonomial::new(&[3], one).unwrap(), 4).unwrap();
    assert_eq!(t.word, w("ZX"));
    assert_eq!(t.coeff, one);

    assert!(matches!(jordan_wigner(&MajoranaMonomial::new(&[5], one).unwrap(), 4), Err(Error::ModeOutOfRange { .. })));
    assert!(matches!(jordan_wigner(&MajoranaMonomial::new(&[1], one).unwrap(), 3), Err(Error::OddModeCount(3))));

    let m = MajoranaMonomial::new(&[3, 1], one).unwrap();
    assert_eq!((m.indices(), m.coeff), (&[1usize, 3][..], -one));
    let m = MajoranaMonomial::new(&[2, 4, 2], one).unwrap();
    assert_eq!((m.indices(), m.coeff), (&[4usize][..], -one));
    assert_eq!(MajoranaMonomial::new(&[2, 2], one).unwrap().degree(), 0);
}

#[test]
fn jordan_wigner_matches_oracle_and_anticommutes() {
    for n in [8usize, 10] {
        let jw = JordanWigner::new(n).unwrap();
        let gs: Vec<Mat<c64>> = (1..=n)
            .map(|a| {
                let t = jw.map_monomial(&MajoranaMonomial::new(&[a], Complex64::new(1.0, 0.0)).unwrap()).unwrap();
                let lib = dense(&PauliSum::new(n / 2, [t]).unwrap());
                assert!(max_abs(&(&lib - majorana_matrix(a, n))) == 0.0, "γ_{a} differs from oracle");
                lib
            })
            .collect();
        let d = 1 << (n / 2);
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let anti = &gs[a] * &gs[b] + &gs[b] * &gs[a];
                let target = if a == b { identity(d) * faer::Scale(c(2.0, 0.0)) } else { zeros(d) };
                worst = worst.max(fro(&(anti - target)));
            }
        }
        assert!(worst <= 1e-12, "N = {n}: anticommutator error {worst}");
    }
}

#[test]
fn multi_index_monomials_follow_operator_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 8;
    for _ in 0..50 {
        let mut idx: Vec<usize> = (1..=n).filter(|_| rng.random::<f64>() < 0.4).collect();
        if idx.is_empty() {
            idx.push(1);
        }
        let coeff = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        let t = jordan_wigner(&MajoranaMonomial::new(&idx, coeff).unwrap(), n).unwrap();
        let mut oracle = identity(1 << (n / 2)) * faer::Scale(coeff);
        for &a in &idx {
            oracle = oracle * majorana_matrix(a, n);
        }
        let lib = dense(&PauliSum::new(n / 2, [t]).unwrap());
        assert!(max_abs(&(lib - oracle)) <= 1e-14, "indices {idx:?}");
    }
}

#[test]
fn l1_norm_examples() {
    let h = PauliSum::new(2, [PauliTerm::real(0.5, w("XI")), PauliTerm::real(-0.25, w("ZZ"))]).unwrap();
    assert_eq!(lcu_l1_norm(&h), 0.75);
    assert_eq!(lcu_l1_norm(&PauliSum::zero(2)), 0.0);

    let inst = generate_syk(8, 3).unwrap();
    let direct = inst.couplings.iter().map(|c| c.g.abs()).sum::<f64>() / (binomial(8, 4) as f64).sqrt();
    let lam = lcu_l1_norm(&inst.pauli().unwrap());
    assert!((lam - direct).abs() <= 1e-12 * direct, "{lam} vs {direct}");
}

#[test]
fn l1_norm_invariant_under_reordering_and_merging() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let words: Vec<String> = (0..8).map(|_| random_word(&mut rng, 3)).collect();
        let coeffs: Vec<f64> = (0..8).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let terms: Vec<PauliTerm> = words.iter().zip(&coeffs).map(|(s, &g)| PauliTerm::real(g, w(s))).collect();
        let h = PauliSum::new(3, terms.clone()).unwrap();
        let mut rev = terms.clone();
        rev.reverse();
        assert!((lcu_l1_norm(&PauliSum::new(3, rev).unwrap()) - lcu_l1_norm(&h)).abs() <= 1e-15);

        let split: Vec<PauliTerm> =
            terms.iter().flat_map(|t| [PauliTerm::new(t.coeff * 0.25, t.word), PauliTerm::new(t.coeff * 0.75, t.word)]).collect();
        let hs = PauliSum::new(3, split).unwrap();
        assert!((lcu_l1_norm(&hs) - lcu_l1_norm(&h)).abs() <= 1e-14);

        // merged oracle: group by word then sum magnitudes
        let mut map = std::collections::BTreeMap::<String, f64>::new();
        for (s, g) in words.iter().zip(&coeffs) {
            *map.entry(s.clone()).or_default() += g;
        }
        let oracle: f64 = map.values().map(|g| g.abs()).filter(|g| *g >= MERGE_TOL).sum();
        assert!((lcu_l1_norm(&h) - oracle).abs() <= 1e-14);
        let distinct: std::collections::HashSet<_> = h.terms().iter().map(|t| t.word).collect();
        assert_eq!(distinct.len(), h.len());
    }
}

#[test]
fn to_dense_examples() {
    let z = dense(&PauliSum::new(1, [PauliTerm::real(1.0, w("Z"))]).unwrap());
    assert_eq!(max_abs(&(z - pauli_matrix("Z"))), 0.0);
    let x = dense(&PauliSum::new(1, [PauliTerm::real(1.0, w("X"))]).unwrap());
    assert_eq!(max_abs(&(x - pauli_matrix("X"))), 0.0);

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let h = random_lcu(&mut rng, 3, 6);
        let d = h.to_dense().unwrap();
        assert!(d.is_hermitian_flagged());
        assert!(max_abs(&(d.mat() - pauli_sum_matrix(&h))) <= 1e-14);
        let ev = herm_eigs(d.mat());
        let lam = lcu_l1_norm(&h);
        assert!(ev[0] >= -lam - 1e-12 && ev[ev.len() - 1] <= lam + 1e-12);
    }
    assert!(matches!(PauliSum::zero(15).to_dense(), Err(Error::DenseCapExceeded { .. })));
}

#[test]
fn pauli_products_match_dense_and_associate() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let n = rng.random_range(1..=4);
        let s: Vec<String> = (0..3).map(|_| random_word(&mut rng, n)).collect();
        let t: Vec<PauliTerm> = s.iter().map(|x| PauliTerm::real(1.0, w(x))).collect();
        let m: Vec<Mat<c64>> = s.iter().map(|x| pauli_matrix(x)).collect();

        let ab = t[0].mul(&t[1]);
        let ph = ab.coeff;
        assert!(
            [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)].iter().any(|p| (ph - p).norm() == 0.0),
            "phase {ph}"
        );
        let lib_ab = dense(&PauliSum::new(n, [ab]).unwrap());
        assert!(max_abs(&(lib_ab - &m[0] * &m[1])) <= 1e-15);

        let left = ab.mul(&t[2]);
        let right = t[0].mul(&t[1].mul(&t[2]));
        assert_eq!(left, right);
        let lib = dense(&PauliSum::new(n, [left]).unwrap());
        assert!(max_abs(&(lib - &m[0] * &m[1] * &m[2])) <= 1e-15);
    }
}

#[test]
fn termwise_sa_examples() {
    let h = PauliSum::new(1, [PauliTerm::real(-1.0, w("Z"))]).unwrap();
    let sa = termwise_sa(&h).unwrap();
    assert_eq!(sa.rows.len(), 1);
    assert!((sa.rows[0].norm - 2f64.sqrt()).abs() <= 1e-15);
    let proj = dense(&sa.rows[0].op) * faer::Scale(c(1.0 / sa.rows[0].norm, 0.0));
    let ket1 = Mat::from_fn(2, 2, |i, j| if i == 1 && j == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) });
    assert!(max_abs(&(&proj - &ket1)) <= 1e-15);
    let shifted = add_identity(&pauli_sum_matrix(&h), 1.0);
    assert!(max_abs(&(shifted - &proj * faer::Scale(c(2.0, 0.0)))) <= 1e-15);

    let h = PauliSum::new(1, [PauliTerm::real(1.0, w("X"))]).unwrap();
    let sa = termwise_sa(&h).unwrap();
    let proj = dense(&sa.rows[0].op) * faer::Scale(c(1.0 / sa.rows[0].norm, 0.0));
    let ev = herm_eigs(&proj);
    assert!(ev[0].abs() <= 1e-15 && (ev[1] - 1.0).abs() <= 1e-15);

    let h = PauliSum::new(1, [PauliTerm::real(1.0, w("X")), PauliTerm::real(1.0, w("Z"))]).unwrap();
    let sa = termwise_sa(&h).unwrap();
    assert!((sa.lambda - 2.0 * lcu_l1_norm(&h)).abs() <= 1e-15);
    let rows: Vec<Mat<c64>> = sa.rows.iter().map(|r| pauli_sum_matrix(&r.op)).collect();
    let err = max_abs(&(sum_of_squares(&rows) - add_identity(&pauli_sum_matrix(&h), 2.0)));
    assert!(err <= 1e-12, "{err}");

    let hc = PauliSum::new(1, [PauliTerm::new(Complex64::new(0.0, 1.0), w("X"))]).unwrap();
    assert!(matches!(termwise_sa(&hc), Err(Error::ComplexCoefficient(_))));
}

#[test]
fn termwise_sa_projectors_and_reconstruction() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..30 {
        let h = random_lcu(&mut rng, 3, 7);
        let sa = termwise_sa(&h).unwrap();
        let lam = lcu_l1_norm(&h);
        assert!((sa.lambda - 2.0 * lam).abs() <= 1e-12 * lam.max(1.0));
        let mut rows = Vec::new();
        for r in &sa.rows {
            let a = pauli_sum_matrix(&r.op);
            let p = &a * faer::Scale(c(1.0 / r.norm, 0.0));
            assert!(max_abs(&(&p * &p - &p)) <= 1e-12, "projector not idempotent");
            rows.push(a);
        }
        let resid = fro(&(sum_of_squares(&rows) - add_identity(&pauli_sum_matrix(&h), lam)));
        assert!(resid <= 1e-10, "{resid}");
        assert!(sa.max_norm_excess().unwrap() <= 1e-9);
    }
}
