//! Pauli operators in symplectic form and generator-level utilities.

use serde::{Deserialize, Serialize};

use crate::f2::{BitMatrix, BitVec, RowReducer};
use crate::par::{self, Execution};

/// A Pauli operator up to phase: `X^x Z^z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymplecticOp {
    pub x: BitVec,
    pub z: BitVec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl SymplecticOp {
    pub fn identity(n: usize) -> Self {
        Self {
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
        }
    }

    pub fn new(x: BitVec, z: BitVec) -> Self {
        assert_eq!(x.len(), z.len(), "x and z parts differ in length");
        Self { x, z }
    }

    pub fn x_type(x: BitVec) -> Self {
        let n = x.len();
        Self::new(x, BitVec::zeros(n))
    }

    pub fn z_type(z: BitVec) -> Self {
        let n = z.len();
        Self::new(BitVec::zeros(n), z)
    }

    pub fn single(n: usize, qubit: usize, pauli: Pauli) -> Self {
        let mut op = Self::identity(n);
        match pauli {
            Pauli::X => op.x.set(qubit, true),
            Pauli::Z => op.z.set(qubit, true),
            Pauli::Y => {
                op.x.set(qubit, true);
                op.z.set(qubit, true);
            }
        }
        op
    }

    /// Builds an operator from a concatenated `(x | z)` row.
    pub fn from_row(row: &BitVec) -> Self {
        assert!(row.len().is_multiple_of(2), "symplectic row must have even length");
        let n = row.len() / 2;
        let idx: Vec<usize> = (0..n).collect();
        let zidx: Vec<usize> = (n..2 * n).collect();
        Self::new(row.select(&idx), row.select(&zidx))
    }

    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    /// Symplectic form `<x1,z2> + <z1,x2>`; true means the operators anticommute.
    #[inline]
    pub fn anticommutes(&self, other: &SymplecticOp) -> bool {
        self.x.dot(&other.z) ^ self.z.dot(&other.x)
    }

    #[inline]
    pub fn commutes(&self, other: &SymplecticOp) -> bool {
        !self.anticommutes(other)
    }

    /// Product of Paulis, ignoring phase.
    pub fn mul_assign(&mut self, other: &SymplecticOp) {
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    pub fn mul(&self, other: &SymplecticOp) -> SymplecticOp {
        let mut out = self.clone();
        out.mul_assign(other);
        out
    }

    pub fn support(&self) -> Vec<usize> {
        let mut s = self.x.clone();
        for i in self.z.iter_ones() {
            s.set(i, true);
        }
        s.support()
    }

    pub fn weight(&self) -> usize {
        self.x.weight() + self.z.weight() - self.x.overlap(&self.z)
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn is_x_type(&self) -> bool {
        self.z.is_zero()
    }

    pub fn is_z_type(&self) -> bool {
        self.x.is_zero()
    }

    /// Concatenated `(x | z)` row of length `2n`.
    pub fn to_row(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    /// Removes all support on the qubits set in `mask`.
    pub fn clear_qubits(&mut self, mask: &BitVec) {
        self.x.clear_mask(mask);
        self.z.clear_mask(mask);
    }

    /// Restriction to `qubits`, renumbered in order.
    pub fn select(&self, qubits: &[usize]) -> SymplecticOp {
        SymplecticOp::new(self.x.select(qubits), self.z.select(qubits))
    }

    /// Relabels qubits: qubit `q` moves to `perm[q]`.
    pub fn permute(&self, perm: &[usize]) -> SymplecticOp {
        let n = self.n_qubits();
        let mut out = SymplecticOp::identity(n);
        for q in self.x.iter_ones() {
            out.x.set(perm[q], true);
        }
        for q in self.z.iter_ones() {
            out.z.set(perm[q], true);
        }
        out
    }

    /// Swaps the roles of X and Z.
    pub fn hadamard_dual(&self) -> SymplecticOp {
        SymplecticOp::new(self.z.clone(), self.x.clone())
    }
}

/// Stacks operators into a `(x | z)` generator matrix.
pub fn generator_matrix(n_qubits: usize, ops: &[SymplecticOp]) -> BitMatrix {
    BitMatrix::from_rows(2 * n_qubits, ops.iter().map(SymplecticOp::to_row).collect())
}

pub fn x_ops(m: &BitMatrix) -> Vec<SymplecticOp> {
    m.iter_rows().map(|r| SymplecticOp::x_type(r.clone())).collect()
}

pub fn z_ops(m: &BitMatrix) -> Vec<SymplecticOp> {
    m.iter_rows().map(|r| SymplecticOp::z_type(r.clone())).collect()
}

pub fn symplectic_rank(n_qubits: usize, ops: &[SymplecticOp]) -> usize {
    generator_matrix(n_qubits, ops).rank()
}

/// Row-space membership for operators.
pub fn op_span(n_qubits: usize, ops: &[SymplecticOp]) -> RowReducer {
    let mut r = RowReducer::new(2 * n_qubits);
    for op in ops {
        r.insert(&op.to_row());
    }
    r
}

/// `G[i][j] = 1` iff `a[i]` anticommutes with `b[j]`.
pub fn gram(a: &[SymplecticOp], b: &[SymplecticOp]) -> BitMatrix {
    let cols = b.len();
    BitMatrix::from_rows(
        cols,
        a.iter()
            .map(|p| {
                let bits: Vec<bool> = b.iter().map(|q| p.anticommutes(q)).collect();
                BitVec::from_bools(&bits)
            })
            .collect(),
    )
}

/// Gram matrix between X-type rows `xs` and Z-type rows `zs`: `xs * zs^t`.
pub fn css_gram(xs: &BitMatrix, zs: &BitMatrix) -> BitMatrix {
    BitMatrix::from_rows(
        zs.rows(),
        xs.iter_rows()
            .map(|x| {
                let bits: Vec<bool> = zs.iter_rows().map(|z| x.dot(z)).collect();
                BitVec::from_bools(&bits)
            })
            .collect(),
    )
}

/// All anticommuting pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn anticommuting_pairs(ops: &[SymplecticOp], exec: Execution) -> Vec<(usize, usize)> {
    par::flat_map_collect(exec, ops.len(), |i| {
        ((i + 1)..ops.len())
            .filter(|&j| ops[i].anticommutes(&ops[j]))
            .map(|j| (i, j))
            .collect()
    })
}

/// All pairs `(i, j)` with `a[i]` anticommuting with `b[j]`.
pub fn cross_anticommuting_pairs(
    a: &[SymplecticOp],
    b: &[SymplecticOp],
    exec: Execution,
) -> Vec<(usize, usize)> {
    par::flat_map_collect(exec, a.len(), |i| {
        (0..b.len())
            .filter(|&j| a[i].anticommutes(&b[j]))
            .map(|j| (i, j))
            .collect()
    })
}

/// Symplectic Gram-Schmidt: a pair basis for `span(ops)` modulo its radical.
///
/// Returns `(pairs, isotropic)` where `pairs` are `(a, b)` with
/// `<a,b> = 1` and all cross products zero, and `isotropic` spans the part of
/// the input that commutes with everything in the span.
pub fn symplectic_gram_schmidt(
    ops: &[SymplecticOp],
) -> (Vec<(SymplecticOp, SymplecticOp)>, Vec<SymplecticOp>) {
    let mut pool: Vec<SymplecticOp> = ops.to_vec();
    let mut pairs = Vec::new();
    let mut isotropic = Vec::new();
    while let Some(a) = pool.first().cloned() {
        pool.remove(0);
        let Some(pos) = pool.iter().position(|b| a.anticommutes(b)) else {
            isotropic.push(a);
            continue;
        };
        let b = pool.remove(pos);
        for op in pool.iter_mut() {
            let ca = op.anticommutes(&a);
            let cb = op.anticommutes(&b);
            if cb {
                op.mul_assign(&a);
            }
            if ca {
                op.mul_assign(&b);
            }
        }
        pairs.push((a, b));
    }
    (pairs, isotropic)
}

/// A symplectic basis of the logical operators of the stabilizer group
/// generated by `stabilizers`: pairs `(a, b)` commuting with every stabilizer,
/// anticommuting within a pair and commuting across pairs, independent modulo
/// the stabilizer group.
pub fn logical_pairs(
    n_qubits: usize,
    stabilizers: &[SymplecticOp],
) -> Vec<(SymplecticOp, SymplecticOp)> {
    // Normalizer: v with <v, s> = 0 for all s, i.e. kernel of [S_z | S_x].
    let swapped = BitMatrix::from_rows(
        2 * n_qubits,
        stabilizers.iter().map(|s| s.z.concat(&s.x)).collect(),
    );
    let normalizer = swapped.kernel_basis();
    let mut span = op_span(n_qubits, stabilizers);
    let mut reps = Vec::new();
    for row in normalizer.iter_rows() {
        if span.insert(row) {
            reps.push(SymplecticOp::from_row(row));
        }
    }
    let (pairs, isotropic) = symplectic_gram_schmidt(&reps);
    debug_assert!(isotropic.is_empty(), "normalizer quotient must be symplectic");
    pairs
}
