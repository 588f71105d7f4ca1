use faer::c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::DenseOperator;

/// Largest gadget Hilbert-space dimension built densely.
const GADGET_DIM_CAP: usize = 1 << 12;

/// K copies of the marked-element Hamiltonian on N-dimensional registers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GadgetSpec {
    pub k: usize,
    pub n: usize,
    pub marked: Vec<usize>,
}

impl GadgetSpec {
    pub fn new(k: usize, n: usize, marked: Vec<usize>) -> Result<Self> {
        if k == 0 || n < 2 || !n.is_power_of_two() {
            return Err(Error::invalid(format!("gadget needs K >= 1 and N a power of two >= 2 (K={k}, N={n})")));
        }
        if marked.len() != k {
            return Err(Error::invalid(format!("expected {k} marked elements, got {}", marked.len())));
        }
        if let Some(&x) = marked.iter().find(|&&x| x >= n) {
            return Err(Error::invalid(format!("marked element {x} outside 0..{n}")));
        }
        Ok(GadgetSpec { k, n, marked })
    }

    /// `Δ = 2K/N`.
    pub fn delta(&self) -> f64 {
        2.0 * self.k as f64 / self.n as f64
    }

    /// Number of registers whose marked element lies in the first half.
    pub fn first_half_marks(&self) -> usize {
        self.marked.iter().filter(|&&x| x < self.n / 2).count()
    }

    /// PARITY of the per-register OR answers.
    pub fn parity(&self) -> bool {
        self.first_half_marks() % 2 == 1
    }
}

#[derive(Clone, Debug)]
pub struct GadgetInstance {
    pub spec: GadgetSpec,
    pub hamiltonian: DenseOperator,
    /// Row `k` is `1 − |x_k⟩⟨x_k| − |s⟩⟨s|` on register `k`.
    pub sa_rows: Vec<DenseOperator>,
    /// `|s⟩^⊗K`.
    pub state: Vec<c64>,
    /// `(2/N)·|{k : x_k < N/2}|`.
    pub expected_eigenvalue: f64,
    /// `max_k ‖H_{x_k} − A_k²‖` over single registers.
    pub row_square_error: f64,
}

impl GadgetInstance {
    /// `λ = Σ a_k²` with `a_k = 1`.
    pub fn lambda(&self) -> f64 {
        self.spec.k as f64
    }

    /// `‖H |s⟩ − E |s⟩‖`.
    pub fn eigen_residual(&self) -> f64 {
        let h = self.hamiltonian.mat();
        let d = self.state.len();
        let mut r = 0.0;
        for i in 0..d {
            let hv: c64 = (0..d).map(|j| h[(i, j)] * self.state[j]).sum();
            r += (hv - self.state[i] * self.expected_eigenvalue).norm_sqr();
        }
        r.sqrt()
    }
}

fn single_register(n: usize, x: usize) -> DenseOperator {
    let s = 1.0 / ((n / 2) as f64);
    DenseOperator::from_fn(n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        let px = if i == x && j == x { 1.0 } else { 0.0 };
        let ps = if i < n / 2 && j < n / 2 { s } else { 0.0 };
        c64::new(id - px - ps, 0.0)
    })
}

fn embed(op: &DenseOperator, k: usize, total: usize, n: usize) -> DenseOperator {
    let mut acc = DenseOperator::identity(1);
    for r in 0..total {
        let f = if r == k { op.clone() } else { DenseOperator::identity(n) };
        acc = acc.kron(&f);
    }
    acc
}

pub fn build_parity_or_gadget(spec: &GadgetSpec) -> Result<GadgetInstance> {
    let dim = spec.n.checked_pow(spec.k as u32).filter(|&d| d <= GADGET_DIM_CAP).ok_or_else(|| {
        Error::DenseCapExceeded { qubits: spec.k * spec.n.trailing_zeros() as usize, cap: GADGET_DIM_CAP.trailing_zeros() as usize }
    })?;
    let n = spec.n;
    let mut h = DenseOperator::zeros(dim);
    let mut rows = Vec::with_capacity(spec.k);
    let mut row_square_error = 0.0f64;
    for (k, &x) in spec.marked.iter().enumerate() {
        let a = single_register(n, x);
        let hx = a.matmul(&a);
        row_square_error = row_square_error.max(hx.sub(&a.adjoint().matmul(&a)).max_abs());
        h = h.add(&embed(&hx, k, spec.k, n));
        rows.push(embed(&a, k, spec.k, n));
    }
    h.assert_hermitian(1e-12);
    let amp = (2.0 / n as f64).powf(spec.k as f64 / 2.0);
    let state = (0..dim)
        .map(|idx| {
            let mut rest = idx;
            let mut inside = true;
            for _ in 0..spec.k {
                inside &= rest % n < n / 2;
                rest /= n;
            }
            c64::new(if inside { amp } else { 0.0 }, 0.0)
        })
        .collect();
    Ok(GadgetInstance {
        spec: spec.clone(),
        hamiltonian: h,
        sa_rows: rows,
        state,
        expected_eigenvalue: 2.0 / n as f64 * spec.first_half_marks() as f64,
        row_square_error,
    })
}
