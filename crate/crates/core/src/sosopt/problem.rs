use std::collections::{BTreeMap, HashMap};

use faer::{c64, Mat};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::{Algebra, Mono, SosBasis};
use super::solver::RealSdp;
use crate::error::{Error, Result};
use crate::operators::{MajoranaMonomial, MajoranaPoly, PauliSum, PauliWord};

/// Hamiltonian handed to the SOS relaxation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SosTarget {
    Pauli(PauliSum),
    Majorana(MajoranaPoly),
}

impl SosTarget {
    pub fn algebra(&self) -> Algebra {
        match self {
            SosTarget::Pauli(h) => Algebra::Pauli { n_qubits: h.n_qubits() },
            SosTarget::Majorana(h) => Algebra::Majorana { n_modes: h.n_modes() },
        }
    }

    pub fn coefficients(&self) -> Vec<(Mono, Complex64)> {
        match self {
            SosTarget::Pauli(h) => h.terms().iter().map(|t| (Mono::pauli(t.word), t.coeff)).collect(),
            SosTarget::Majorana(h) => h.terms().map(|(m, c)| (Mono::majorana(m), c)).collect(),
        }
    }

    pub fn to_pauli(&self) -> Result<PauliSum> {
        match self {
            SosTarget::Pauli(h) => Ok(h.clone()),
            SosTarget::Majorana(h) => h.to_pauli(),
        }
    }

    /// Coefficient of the identity.
    pub fn identity_coefficient(&self) -> f64 {
        match self {
            SosTarget::Pauli(h) => h.coefficient(&PauliWord::IDENTITY).re,
            SosTarget::Majorana(h) => h.coefficient(0).re,
        }
    }
}

impl From<PauliSum> for SosTarget {
    fn from(h: PauliSum) -> Self {
        SosTarget::Pauli(h)
    }
}

impl From<MajoranaPoly> for SosTarget {
    fn from(h: MajoranaPoly) -> Self {
        SosTarget::Majorana(h)
    }
}

/// One real equality per non-identity monomial `M` reachable as `X_k† X_l`.
///
/// With `X_k† X_l = c_kl η_M^{-1}·(η_M M)` the constraint reads
/// `Σ_{k<l} 2 Re(conj(η_M) c_kl G_kl) = h̃_M` where `H = Σ h̃_M η_M M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub monomial: Mono,
    pub eta: Complex64,
    pub target: f64,
    /// `(k, l, c_kl)` with `k < l` and `c_kl` the coefficient of `M` in `X_k† X_l` for the bare monomials.
    pub entries: Vec<(usize, usize, Complex64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpProblem {
    pub basis: SosBasis,
    pub constraints: Vec<Constraint>,
    pub identity_coeff: f64,
    pub hamiltonian: SosTarget,
}

/// Coefficient-matching SDP for `H + β·1 = X⃗† G X⃗`, with `β = Tr G − h_1`.
pub fn build_sos_sdp(h: &SosTarget, basis: &SosBasis) -> Result<SdpProblem> {
    if h.algebra() != basis.algebra {
        let compatible = match (h.algebra(), basis.algebra) {
            (Algebra::Pauli { n_qubits: a }, Algebra::Pauli { n_qubits: b }) => a <= b,
            (Algebra::Majorana { n_modes: a }, Algebra::Majorana { n_modes: b }) => a <= b,
            _ => false,
        };
        if !compatible {
            return Err(Error::invalid("Hamiltonian and basis live in different algebras"));
        }
    }
    let alg = basis.algebra;
    let l = basis.len();
    let mut groups: BTreeMap<Mono, Vec<(usize, usize, Complex64)>> = BTreeMap::new();
    for k in 0..l {
        for j in k + 1..l {
            let (c, m) = alg.adj_mul(basis.monomials[k], basis.monomials[j]);
            debug_assert!(m != Mono::IDENTITY);
            groups.entry(m).or_default().push((k, j, c));
        }
    }
    let mut targets: HashMap<Mono, f64> = HashMap::new();
    for (m, c) in h.coefficients() {
        if m == Mono::IDENTITY {
            continue;
        }
        let eta = alg.hermitian_phase(m);
        let w = eta.conj() * c;
        if w.im.abs() > 1e-12 * (1.0 + c.norm()) {
            return Err(Error::invalid(format!("Hamiltonian is not Hermitian at monomial {}", alg.label(m))));
        }
        if !groups.contains_key(&m) {
            return Err(Error::MonomialNotCovered(alg.label(m)));
        }
        targets.insert(m, w.re);
    }
    let constraints = groups
        .into_iter()
        .map(|(m, entries)| Constraint {
            monomial: m,
            eta: alg.hermitian_phase(m),
            target: targets.get(&m).copied().unwrap_or(0.0),
            entries,
        })
        .collect();
    Ok(SdpProblem {
        basis: basis.clone(),
        constraints,
        identity_coeff: h.identity_coefficient(),
        hamiltonian: h.clone(),
    })
}

/// `H = i Σ_ab K_ab γ_aγ_b − Σ_abcd J_abcd γ_aγ_bγ_cγ_d` over full index ranges.
///
/// `j` is row-major with index `((a·N + b)·N + c)·N + d`; an empty slice means zero.
pub fn majorana2_hamiltonian(k: &Mat<f64>, j: &[f64], n_modes: usize) -> Result<MajoranaPoly> {
    let n = n_modes;
    if k.nrows() != n || k.ncols() != n {
        return Err(Error::invalid("K must be N x N"));
    }
    let mut dev = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            dev = dev.max((k[(a, b)] + k[(b, a)]).abs());
        }
    }
    if dev > 1e-12 {
        return Err(Error::NotAntisymmetric(dev));
    }
    if !j.is_empty() && j.len() != n * n * n * n {
        return Err(Error::invalid("J must have N^4 entries"));
    }
    let mut h = MajoranaPoly::zero(n);
    for a in 0..n {
        for b in 0..n {
            if k[(a, b)] != 0.0 {
                let m = MajoranaMonomial::new(&[a + 1, b + 1], Complex64::new(0.0, k[(a, b)]))?;
                h.add_monomial(&m)?;
            }
        }
    }
    for (idx, &v) in j.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let (a, b, c, d) = (idx / (n * n * n), (idx / (n * n)) % n, (idx / n) % n, idx % n);
        let m = MajoranaMonomial::new(&[a + 1, b + 1, c + 1, d + 1], Complex64::new(-v, 0.0))?;
        h.add_monomial(&m)?;
    }
    h.prune();
    Ok(h)
}

/// Degree-2 Majorana SOS over `{1, γ_a, iγ_aγ_b}`.
pub fn build_majorana2_sdp(k: &Mat<f64>, j: &[f64], n_modes: usize) -> Result<SdpProblem> {
    let h = majorana2_hamiltonian(k, j, n_modes)?;
    build_sos_sdp(&SosTarget::Majorana(h), &SosBasis::majorana_degree2(n_modes)?)
}

/// How the Hermitian Gram matrix maps onto a real symmetric variable.
#[derive(Clone, Debug)]
pub(crate) struct Realification {
    pub sdp: RealSdp,
    /// Phases `d_k` of the basis the real variable refers to.
    pub phases: Vec<Complex64>,
    pub complex: bool,
}

impl SdpProblem {
    pub fn gram_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    fn user_weight(&self, k: usize, l: usize, c: Complex64, eta: Complex64, d: &[Complex64]) -> Complex64 {
        eta.conj() * d[k].conj() * d[l] * c
    }

    /// Constraint values minus targets for a Gram matrix in the basis's own phases.
    pub fn residuals(&self, g: &Mat<c64>) -> Vec<f64> {
        let p = &self.basis.phases;
        self.constraints
            .iter()
            .map(|con| {
                let v: f64 = con
                    .entries
                    .iter()
                    .map(|&(k, l, c)| 2.0 * (self.user_weight(k, l, c, con.eta, p) * g[(k, l)]).re)
                    .sum();
                v - con.target
            })
            .collect()
    }

    /// Orthogonal projection of `g` onto the affine constraint set.
    ///
    /// Every off-diagonal pair `(k, l)` belongs to exactly one constraint, so the
    /// constraint matrices have disjoint supports and one sweep is exact.
    pub fn project_affine(&self, g: &mut Mat<c64>) {
        let p = &self.basis.phases;
        for (con, r) in self.constraints.iter().zip(self.residuals(g)) {
            let norm2: f64 = con.entries.iter().map(|&(k, l, c)| 2.0 * self.user_weight(k, l, c, con.eta, p).norm_sqr()).sum();
            if norm2 == 0.0 {
                continue;
            }
            let s = r / norm2;
            for &(k, l, c) in &con.entries {
                let w = self.user_weight(k, l, c, con.eta, p);
                g[(k, l)] -= w.conj() * s;
                g[(l, k)] -= w * s;
            }
        }
    }

    /// Hermitian `A_i` with constraint value `Re Tr(A_i G)`.
    pub fn constraint_matrix(&self, i: usize) -> Mat<c64> {
        let l = self.gram_dim();
        let con = &self.constraints[i];
        let mut a = Mat::<c64>::zeros(l, l);
        for &(k, j, c) in &con.entries {
            let w = self.user_weight(k, j, c, con.eta, &self.basis.phases);
            a[(j, k)] += w;
            a[(k, j)] += w.conj();
        }
        a
    }

    fn realify(&self, d: &[Complex64], complex: bool) -> Option<Realification> {
        let l = self.gram_dim();
        let mut cons = Vec::new();
        let mut b = Vec::new();
        for con in &self.constraints {
            let w: Vec<Complex64> =
                con.entries.iter().map(|&(k, j, c)| self.user_weight(k, j, c, con.eta, d)).collect();
            if complex {
                let mut e = Vec::with_capacity(4 * w.len());
                for (&(k, j, _), w) in con.entries.iter().zip(&w) {
                    if w.re != 0.0 {
                        e.push((k, j, 0.5 * w.re));
                        e.push((l + k, l + j, 0.5 * w.re));
                    }
                    if w.im != 0.0 {
                        e.push((j, l + k, -0.5 * w.im));
                        e.push((k, l + j, 0.5 * w.im));
                    }
                }
                cons.push(e);
                b.push(con.target);
            } else {
                let scale = w.iter().fold(0.0f64, |a, v| a.max(v.norm()));
                let has_im = w.iter().any(|v| v.im.abs() > 1e-14 * scale);
                let has_re = w.iter().any(|v| v.re.abs() > 1e-14 * scale);
                if has_im && (has_re || con.target != 0.0) {
                    return None;
                }
                if has_im {
                    continue;
                }
                cons.push(con.entries.iter().zip(&w).map(|(&(k, j, _), w)| (k, j, w.re)).collect());
                b.push(con.target);
            }
        }
        let (n, c_scale) = if complex { (2 * l, 0.5) } else { (l, 1.0) };
        Some(Realification { sdp: RealSdp { n, cons, b, c_scale }, phases: d.to_vec(), complex })
    }

    /// Real symmetric form of the problem, preferring an `L × L` real variable.
    ///
    /// Tries the bare monomials, then the basis phases, before falling back to
    /// the `2L × 2L` embedding of the Hermitian Gram matrix.
    pub(crate) fn realification(&self) -> Realification {
        let one = vec![Complex64::new(1.0, 0.0); self.gram_dim()];
        self.realify(&one, false)
            .or_else(|| self.realify(&self.basis.phases, false))
            .unwrap_or_else(|| self.realify(&self.basis.phases, true).expect("complex embedding always exists"))
    }

    /// Gram matrix in the basis phases from the real variable of [`Self::realification`].
    pub(crate) fn gram_from_real(&self, r: &Realification, z: &Mat<f64>) -> Mat<c64> {
        let l = self.gram_dim();
        let t: Vec<Complex64> = r.phases.iter().zip(&self.basis.phases).map(|(d, p)| d / p).collect();
        Mat::from_fn(l, l, |k, j| {
            let g = if r.complex {
                c64::new(0.5 * (z[(k, j)] + z[(l + k, l + j)]), 0.5 * (z[(l + k, j)] - z[(k, l + j)]))
            } else {
                c64::new(z[(k, j)], 0.0)
            };
            t[k].conj() * g * t[j]
        })
    }
}
