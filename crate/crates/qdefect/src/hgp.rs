//! Hypergraph product of a classical code with itself.
//!
//! Qubits are `V×V ∪ C×C`, X stabilizers `V×C`, Z stabilizers `C×V`:
//!
//! ```text
//! hx = (1_V ⊗ h | hᵗ ⊗ 1_C)      hz = (h ⊗ 1_V | 1_C ⊗ hᵗ)
//! ```
//!
//! Index maps: VV qubit `(u,v) ↦ u·n + v`, CC qubit `(c,d) ↦ n² + c·m + d`,
//! X stabilizer `(v,c) ↦ v·m + c`, Z stabilizer `(c,v) ↦ c·n + v`.

use serde::{Deserialize, Serialize};

use crate::error::CodeError;
use crate::f2::{BitMatrix, BitVec};
use crate::fgraph::FactorGraph;
use crate::par::Execution;
use crate::search::{min_weight_search, Choice, SearchOutcome};
use crate::symplectic::css_gram;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QubitLabel {
    /// Variable-variable qubit `(u, v)`.
    VV(usize, usize),
    /// Check-check qubit `(c, d)`.
    CC(usize, usize),
}

/// Minimum distance, or what the bounded search could establish.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Distance {
    Exact(usize),
    /// No logical operator of weight `<=` the stored budget exists.
    AboveBudget(usize),
    /// The code encodes no logical qubits.
    Undefined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParameters {
    pub n_qubits: usize,
    pub k: usize,
    pub distance: Distance,
}

pub const DEFAULT_DISTANCE_BUDGET: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HgpCode {
    h: BitMatrix,
    graph: FactorGraph,
    hx: BitMatrix,
    hz: BitMatrix,
}

impl HgpCode {
    /// Builds the product code of `h` (an `m × n` parity-check matrix).
    pub fn build(h: &BitMatrix) -> Result<Self, CodeError> {
        if h.rows() == 0 || h.cols() == 0 || h.is_zero() {
            return Err(CodeError::ZeroCheckMatrix);
        }
        let (m, n) = h.shape();
        let ht = h.transpose();
        let hx = BitMatrix::identity(n)
            .kron(h)
            .hstack(&ht.kron(&BitMatrix::identity(m)))?;
        let hz = h
            .kron(&BitMatrix::identity(n))
            .hstack(&BitMatrix::identity(m).kron(&ht))?;
        if !hx.matmul(&hz.transpose())?.is_zero() {
            return Err(CodeError::Invariant("hx * hz^t != 0".into()));
        }
        Ok(Self {
            h: h.clone(),
            graph: FactorGraph::from_matrix(h),
            hx,
            hz,
        })
    }

    pub fn h(&self) -> &BitMatrix {
        &self.h
    }

    pub fn graph(&self) -> &FactorGraph {
        &self.graph
    }

    pub fn hx(&self) -> &BitMatrix {
        &self.hx
    }

    pub fn hz(&self) -> &BitMatrix {
        &self.hz
    }

    /// Number of classical variables `n`.
    pub fn n(&self) -> usize {
        self.h.cols()
    }

    /// Number of classical checks `m`.
    pub fn m(&self) -> usize {
        self.h.rows()
    }

    pub fn n_qubits(&self) -> usize {
        self.n() * self.n() + self.m() * self.m()
    }

    pub fn vv(&self, u: usize, v: usize) -> usize {
        debug_assert!(u < self.n() && v < self.n());
        u * self.n() + v
    }

    pub fn cc(&self, c: usize, d: usize) -> usize {
        debug_assert!(c < self.m() && d < self.m());
        self.n() * self.n() + c * self.m() + d
    }

    pub fn x_stab(&self, v: usize, c: usize) -> usize {
        v * self.m() + c
    }

    pub fn z_stab(&self, c: usize, v: usize) -> usize {
        c * self.n() + v
    }

    pub fn qubit_label(&self, q: usize) -> QubitLabel {
        let nn = self.n() * self.n();
        if q < nn {
            QubitLabel::VV(q / self.n(), q % self.n())
        } else {
            let r = q - nn;
            QubitLabel::CC(r / self.m(), r % self.m())
        }
    }

    /// `(v, c)` of an X stabilizer index.
    pub fn x_stab_label(&self, i: usize) -> (usize, usize) {
        (i / self.m(), i % self.m())
    }

    /// `(c, v)` of a Z stabilizer index.
    pub fn z_stab_label(&self, i: usize) -> (usize, usize) {
        (i / self.n(), i % self.n())
    }

    /// The qubit transpose τ: `(u,v) ↦ (v,u)`, `(c,d) ↦ (d,c)`.
    pub fn transpose_qubit(&self, q: usize) -> usize {
        match self.qubit_label(q) {
            QubitLabel::VV(u, v) => self.vv(v, u),
            QubitLabel::CC(c, d) => self.cc(d, c),
        }
    }

    pub fn transpose_permutation(&self) -> Vec<usize> {
        (0..self.n_qubits()).map(|q| self.transpose_qubit(q)).collect()
    }

    /// `k² + k̃²` from the kernel dimensions of `h` and `hᵗ`.
    pub fn k(&self) -> usize {
        let k = self.n() - self.h.rank();
        let kt = self.m() - self.h.rank();
        k * k + kt * kt
    }

    /// `n_qubits - rank(hx) - rank(hz)`, an independent count of `k`.
    pub fn k_by_rank(&self) -> usize {
        self.n_qubits() - self.hx.rank() - self.hz.rank()
    }

    pub fn max_stabilizer_weight(&self) -> usize {
        self.hx.max_row_weight().max(self.hz.max_row_weight())
    }

    /// `ker h ⊗ (Fⁿ/rs h)` on VV and `(Fᵐ/rs hᵗ) ⊗ ker hᵗ` on CC.
    pub fn embedded_logical_x_basis(&self) -> BitMatrix {
        let ht = self.h.transpose();
        let vv = self.h.kernel_basis().kron(&self.h.quotient_basis());
        let cc = ht.quotient_basis().kron(&ht.kernel_basis());
        self.place_blocks(&vv, &cc)
    }

    /// `(Fⁿ/rs h) ⊗ ker h` on VV and `ker hᵗ ⊗ (Fᵐ/rs hᵗ)` on CC.
    pub fn embedded_logical_z_basis(&self) -> BitMatrix {
        let ht = self.h.transpose();
        let vv = self.h.quotient_basis().kron(&self.h.kernel_basis());
        let cc = ht.kernel_basis().kron(&ht.quotient_basis());
        self.place_blocks(&vv, &cc)
    }

    fn place_blocks(&self, vv: &BitMatrix, cc: &BitMatrix) -> BitMatrix {
        let nn = self.n() * self.n();
        let mm = self.m() * self.m();
        let top = vv
            .hstack(&BitMatrix::zeros(vv.rows(), mm))
            .expect("row counts agree");
        let bottom = BitMatrix::zeros(cc.rows(), nn)
            .hstack(cc)
            .expect("row counts agree");
        top.vstack(&bottom).expect("column counts agree")
    }

    /// Minimum distance by bounded-weight search (X and Z sides separately).
    pub fn distance(&self, budget: usize, exec: Execution) -> Distance {
        let lx = self.embedded_logical_x_basis();
        let lz = self.embedded_logical_z_basis();
        css_distance(&self.hx, &self.hz, &lx, &lz, budget, exec)
    }

    pub fn parameters(&self, budget: usize, exec: Execution) -> CodeParameters {
        CodeParameters {
            n_qubits: self.n_qubits(),
            k: self.k(),
            distance: self.distance(budget, exec),
        }
    }
}

/// Lowest-weight vector `x` with `detect · x = 0` and `pair_with · x ≠ 0`.
///
/// With `detect` the opposite-type stabilizers and `pair_with` a complete
/// opposite-type logical basis, this is a minimum-weight nontrivial logical.
pub fn min_weight_logical(
    detect: &BitMatrix,
    pair_with: &BitMatrix,
    budget: usize,
    exec: Execution,
) -> SearchOutcome {
    let n = detect.cols();
    let stack = detect.vstack(pair_with).expect("same qubit count");
    let split = detect.rows();
    let sig_len = stack.rows();
    let cols = stack.transpose();
    let choices: Vec<Vec<Choice>> = (0..n)
        .map(|q| {
            vec![Choice {
                qubit: q,
                label: 0,
                signature: cols.row(q).clone(),
            }]
        })
        .collect();
    let syndrome = BitVec::from_support(sig_len, &(0..split).collect::<Vec<_>>());
    let logical = BitVec::from_support(sig_len, &(split..sig_len).collect::<Vec<_>>());
    min_weight_search(
        &choices,
        sig_len,
        budget,
        |s: &BitVec| s.overlap(&syndrome) == 0 && s.overlap(&logical) != 0,
        exec,
    )
}

/// Distance of a CSS code from its stabilizers and complete logical bases.
pub fn css_distance(
    sx: &BitMatrix,
    sz: &BitMatrix,
    lx: &BitMatrix,
    lz: &BitMatrix,
    budget: usize,
    exec: Execution,
) -> Distance {
    if lx.rows() == 0 {
        return Distance::Undefined;
    }
    debug_assert_eq!(css_gram(lx, lz).rank(), lx.rows());
    let dx = min_weight_logical(sz, lz, budget, exec);
    let bound = match &dx {
        SearchOutcome::Found(h) => h.len() - 1,
        SearchOutcome::Exhausted { .. } => budget,
    };
    let dz = min_weight_logical(sx, lx, bound, exec);
    match (dx, dz) {
        (_, SearchOutcome::Found(h)) => Distance::Exact(h.len()),
        (SearchOutcome::Found(h), _) => Distance::Exact(h.len()),
        _ => Distance::AboveBudget(budget),
    }
}

/// Repetition-code check matrix `[n, 1, n]` with `n - 1` checks.
pub fn repetition_code(n: usize) -> BitMatrix {
    assert!(n >= 2, "repetition code needs at least two bits");
    BitMatrix::from_supports(n, &(0..n - 1).map(|c| vec![c, c + 1]).collect::<Vec<_>>())
}

/// Cyclic repetition code: `n` checks on `n` bits with wraparound.
pub fn cyclic_repetition_code(n: usize) -> BitMatrix {
    assert!(n >= 3, "cyclic repetition code needs at least three bits");
    BitMatrix::from_supports(n, &(0..n).map(|c| vec![c, (c + 1) % n]).collect::<Vec<_>>())
}
