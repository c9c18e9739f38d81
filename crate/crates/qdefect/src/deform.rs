//! Code deformation by rounds of commuting measurements, with logical
//! tracking through transformation matrices `Q^(t)`.
//!
//! Logical operators are stored as symplectic pairs and flattened as
//! `x_0, z_0, x_1, z_1, ...` wherever a row index is needed. Products formed
//! while resolving a measurement stay in the stabilizer list, so the list
//! always generates the current group.

use serde::{Deserialize, Serialize};

use crate::defect::PunctureSpec;
use crate::defect::{Basis, PunctureKind};
use crate::error::DeformError;
use crate::f2::{BitMatrix, BitVec, RowReducer};
use crate::hgp::HgpCode;
use crate::par::Execution;
use crate::search::{min_weight_search, Choice, SearchOutcome};
use crate::symplectic::{generator_matrix, op_span, symplectic_rank, Pauli, SymplecticOp};

pub const DEFAULT_CONJUGATE_BUDGET: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairLabel {
    Good,
    Bad,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalPair {
    pub x: SymplecticOp,
    pub z: SymplecticOp,
    pub label: PairLabel,
}

impl LogicalPair {
    pub fn min_weight(&self) -> usize {
        self.x.weight().min(self.z.weight())
    }
}

/// Stabilizer generators and paired logical operators at one time step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerState {
    pub n_qubits: usize,
    pub stabilizers: Vec<SymplecticOp>,
    pub logicals: Vec<LogicalPair>,
    /// Pairs entering with a member lighter than this are labelled bad.
    pub threshold: usize,
}

fn label_for(x: &SymplecticOp, z: &SymplecticOp, threshold: usize) -> PairLabel {
    if x.weight().min(z.weight()) < threshold {
        PairLabel::Bad
    } else {
        PairLabel::Good
    }
}

impl StabilizerState {
    /// Labels each pair by the threshold and validates.
    pub fn new(
        n_qubits: usize,
        stabilizers: Vec<SymplecticOp>,
        pairs: Vec<(SymplecticOp, SymplecticOp)>,
        threshold: usize,
    ) -> Result<Self, DeformError> {
        let logicals = pairs
            .into_iter()
            .map(|(x, z)| LogicalPair { label: label_for(&x, &z, threshold), x, z })
            .collect();
        Self::with_labels(n_qubits, stabilizers, logicals, threshold)
    }

    pub fn with_labels(
        n_qubits: usize,
        stabilizers: Vec<SymplecticOp>,
        logicals: Vec<LogicalPair>,
        threshold: usize,
    ) -> Result<Self, DeformError> {
        for op in stabilizers.iter().chain(logicals.iter().flat_map(|p| [&p.x, &p.z])) {
            if op.n_qubits() != n_qubits {
                return Err(DeformError::Length { expected: n_qubits, found: op.n_qubits() });
            }
        }
        let state = Self { n_qubits, stabilizers, logicals, threshold };
        state.validate()?;
        Ok(state)
    }

    /// Stabilizers of `code` with its embedded logical pairs, all labelled good.
    pub fn from_code(code: &HgpCode, threshold: usize) -> Result<Self, DeformError> {
        let n = code.n_qubits();
        let mut stabs = crate::symplectic::x_ops(code.hx());
        stabs.extend(crate::symplectic::z_ops(code.hz()));
        let pairs = css_pairs(&code.embedded_logical_x_basis(), &code.embedded_logical_z_basis())
            .ok_or_else(|| DeformError::InvalidState("embedded bases do not pair".into()))?;
        let logicals = pairs
            .into_iter()
            .map(|(x, z)| LogicalPair { x, z, label: PairLabel::Good })
            .collect();
        Self::with_labels(n, stabs, logicals, threshold)
    }

    /// Generators of a deformed code plus its single-qubit measurements.
    pub fn from_deformed(
        d: &crate::defect::DeformedCode,
        pairs: Vec<(SymplecticOp, SymplecticOp)>,
        threshold: usize,
    ) -> Result<Self, DeformError> {
        let n = d.n_qubits();
        let mut stabs = d.generators();
        stabs.extend(d.measured_out.iter().map(|m| single(n, m.qubit, m.basis)));
        Self::new(n, stabs, pairs, threshold)
    }

    /// Logical pairs built from `preferred` where it suffices, otherwise a
    /// normalizer basis. Candidates that anticommute with a stabilizer or lie
    /// in the stabilizer span are skipped.
    pub fn from_candidates(
        n_qubits: usize,
        stabilizers: Vec<SymplecticOp>,
        preferred: &[SymplecticOp],
        threshold: usize,
    ) -> Result<Self, DeformError> {
        check_lengths(n_qubits, &stabilizers)?;
        check_lengths(n_qubits, preferred)?;
        let expected = n_qubits - symplectic_rank(n_qubits, &stabilizers);
        let mut span = op_span(n_qubits, &stabilizers);
        let reps: Vec<SymplecticOp> = preferred
            .iter()
            .filter(|p| stabilizers.iter().all(|s| s.commutes(p)))
            .filter(|p| span.insert(&p.to_row()))
            .cloned()
            .collect();
        let (pairs, _) = crate::symplectic::symplectic_gram_schmidt(&reps);
        let pairs = if pairs.len() == expected {
            pairs
        } else {
            crate::symplectic::logical_pairs(n_qubits, &stabilizers)
        };
        Self::new(n_qubits, stabilizers, pairs, threshold)
    }

    pub fn logical_ops(&self) -> Vec<SymplecticOp> {
        self.logicals.iter().flat_map(|p| [p.x.clone(), p.z.clone()]).collect()
    }

    pub fn labels(&self) -> Vec<PairLabel> {
        self.logicals.iter().map(|p| p.label).collect()
    }

    /// Per flattened logical row: true if its pair is good.
    pub fn row_partition(&self) -> Vec<bool> {
        self.logicals
            .iter()
            .flat_map(|p| [p.label == PairLabel::Good; 2])
            .collect()
    }

    pub fn stabilizer_rank(&self) -> usize {
        symplectic_rank(self.n_qubits, &self.stabilizers)
    }

    /// Commutation, pairing and counting invariants.
    pub fn validate(&self) -> Result<(), DeformError> {
        let stabs = &self.stabilizers;
        for (i, a) in stabs.iter().enumerate() {
            if let Some(j) = stabs[i + 1..].iter().position(|b| a.anticommutes(b)) {
                return Err(DeformError::InvalidState(format!("stabilizers {i} and {} anticommute", i + 1 + j)));
            }
        }
        let ops = self.logical_ops();
        for (li, l) in ops.iter().enumerate() {
            if let Some(si) = stabs.iter().position(|s| s.anticommutes(l)) {
                return Err(DeformError::InvalidState(format!("logical row {li} anticommutes with stabilizer {si}")));
            }
            for (lj, r) in ops.iter().enumerate().skip(li + 1) {
                let partner = li % 2 == 0 && lj == li + 1;
                if l.anticommutes(r) != partner {
                    return Err(DeformError::InvalidState(format!("logical rows {li} and {lj} are not in standard form")));
                }
            }
        }
        let expected = self.n_qubits - self.stabilizer_rank();
        if expected != self.logicals.len() {
            return Err(DeformError::InvalidState(format!(
                "{} logical pairs but n - rank(stabilizers) = {expected}",
                self.logicals.len()
            )));
        }
        Ok(())
    }
}

/// Pairs CSS logical bases into `(X, Z)` symplectic pairs via the dual basis.
pub fn css_pairs(xs: &BitMatrix, zs: &BitMatrix) -> Option<Vec<(SymplecticOp, SymplecticOp)>> {
    let paired_x = crate::defect::dual_pairing(zs, xs)?;
    Some(
        paired_x
            .iter_rows()
            .zip(zs.iter_rows())
            .map(|(x, z)| (SymplecticOp::x_type(x.clone()), SymplecticOp::z_type(z.clone())))
            .collect(),
    )
}

/// What happened to one measured operator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasurementAction {
    /// Already in the group.
    Redundant,
    /// Anticommuted with stabilizers: `removed` (index at that moment) left,
    /// the others listed were multiplied by it.
    Replaced {
        removed: usize,
        multiplied_stabilizers: Vec<usize>,
        multiplied_logicals: Vec<usize>,
    },
    /// Was a logical: the pair containing `demoted` (original logical row) was
    /// dropped and the listed rows were multiplied by it.
    Logical {
        demoted: usize,
        multiplied_logicals: Vec<usize>,
    },
}

/// Fate of a logical row across one round, by original flattened index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogicalFate {
    Kept,
    Multiplied,
    /// Moved to the space of errors.
    Demoted,
    /// Its pair was dropped because its partner was demoted.
    Measured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ConjugateMethod {
    MinWeight { weight: usize },
    /// Bounded search exhausted; solved linearly.
    Linear { budget: usize },
}

/// A generator released from the group that became a logical operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PromotedPair {
    pub generator: SymplecticOp,
    pub conjugate: SymplecticOp,
    pub method: ConjugateMethod,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformStep {
    pub measured: Vec<SymplecticOp>,
    pub actions: Vec<MeasurementAction>,
    pub fates: Vec<LogicalFate>,
    pub promoted: Vec<PromotedPair>,
    /// Released generators already in the target span: no new logical qubit.
    pub non_qubit: Vec<SymplecticOp>,
    /// New logical rows over `(old logical rows ‖ old stabilizers)`.
    pub q_matrix: BitMatrix,
    /// Rows of `q_matrix` with no expression in the old basis.
    pub fresh_rows: Vec<usize>,
    pub old_logical_rows: usize,
    pub new_logical_rows: usize,
}

impl DeformStep {
    /// The block of `q_matrix` acting on old logical rows.
    pub fn logical_block(&self) -> BitMatrix {
        let cols: Vec<usize> = (0..self.old_logical_rows).collect();
        self.q_matrix.select_cols(&cols)
    }
}

#[derive(Clone, Debug, Default)]
pub struct RoundOptions<'a> {
    /// Generators the new group should be presented with.
    pub target: Option<&'a [SymplecticOp]>,
    pub conjugate_budget: Option<usize>,
    pub exec: Execution,
}

fn check_lengths(n: usize, ops: &[SymplecticOp]) -> Result<(), DeformError> {
    match ops.iter().find(|o| o.n_qubits() != n) {
        Some(o) => Err(DeformError::Length { expected: n, found: o.n_qubits() }),
        None => Ok(()),
    }
}

/// Applies one round of measurements in list order.
pub fn measure_round(
    state: &StabilizerState,
    measured: &[SymplecticOp],
    opts: &RoundOptions<'_>,
) -> Result<(StabilizerState, DeformStep), DeformError> {
    let n = state.n_qubits;
    check_lengths(n, measured)?;
    for (i, a) in measured.iter().enumerate() {
        if let Some(j) = measured[i + 1..].iter().position(|b| a.anticommutes(b)) {
            return Err(DeformError::AnticommutingMeasurements(i, i + 1 + j));
        }
    }
    let old_ops = state.logical_ops();
    let mut stabs = state.stabilizers.clone();
    // Current logical pairs with the original flattened index of each member.
    let mut pairs: Vec<(SymplecticOp, SymplecticOp, PairLabel, [usize; 2])> = state
        .logicals
        .iter()
        .enumerate()
        .map(|(i, p)| (p.x.clone(), p.z.clone(), p.label, [2 * i, 2 * i + 1]))
        .collect();
    let mut fates = vec![LogicalFate::Kept; old_ops.len()];
    let mut actions = Vec::with_capacity(measured.len());

    for m in measured {
        let anti: Vec<usize> = (0..stabs.len()).filter(|&j| stabs[j].anticommutes(m)).collect();
        if let Some(&s0) = anti.first() {
            let pivot = stabs[s0].clone();
            for &j in &anti[1..] {
                stabs[j].mul_assign(&pivot);
            }
            let mut touched = Vec::new();
            for p in pairs.iter_mut() {
                for (k, op) in [&mut p.0, &mut p.1].into_iter().enumerate() {
                    if op.anticommutes(m) {
                        op.mul_assign(&pivot);
                        fates[p.3[k]] = LogicalFate::Multiplied;
                        touched.push(p.3[k]);
                    }
                }
            }
            stabs.remove(s0);
            stabs.push(m.clone());
            actions.push(MeasurementAction::Replaced {
                removed: s0,
                multiplied_stabilizers: anti[1..].to_vec(),
                multiplied_logicals: touched,
            });
            continue;
        }
        if op_span(n, &stabs).contains(&m.to_row()) {
            actions.push(MeasurementAction::Redundant);
            continue;
        }
        // A logical: demote the first anticommuting logical row.
        let flat: Vec<(usize, usize)> = (0..pairs.len()).flat_map(|i| [(i, 0), (i, 1)]).collect();
        let member = |p: &(SymplecticOp, SymplecticOp, PairLabel, [usize; 2]), k: usize| {
            if k == 0 { p.0.clone() } else { p.1.clone() }
        };
        let Some(&(pi, k)) = flat.iter().find(|&&(i, k)| member(&pairs[i], k).anticommutes(m)) else {
            return Err(DeformError::InvalidState(
                "measured operator commutes with every stabilizer and logical but is not in the group".into(),
            ));
        };
        let e = member(&pairs[pi], k);
        let demoted = pairs[pi].3[k];
        let mut touched = Vec::new();
        for (i, p) in pairs.iter_mut().enumerate() {
            if i == pi {
                continue;
            }
            for (kk, op) in [&mut p.0, &mut p.1].into_iter().enumerate() {
                if op.anticommutes(m) {
                    op.mul_assign(&e);
                    fates[p.3[kk]] = LogicalFate::Multiplied;
                    touched.push(p.3[kk]);
                }
            }
        }
        fates[demoted] = LogicalFate::Demoted;
        fates[pairs[pi].3[1 - k]] = LogicalFate::Measured;
        pairs.remove(pi);
        stabs.push(m.clone());
        actions.push(MeasurementAction::Logical { demoted, multiplied_logicals: touched });
    }

    let mut logicals: Vec<LogicalPair> = pairs
        .into_iter()
        .map(|(x, z, label, _)| LogicalPair { x, z, label })
        .collect();
    let mut promoted = Vec::new();
    let mut non_qubit = Vec::new();
    if let Some(target) = opts.target {
        check_lengths(n, target)?;
        let current = op_span(n, &stabs);
        if let Some(i) = target.iter().position(|t| !current.contains(&t.to_row())) {
            return Err(DeformError::TargetUnreachable(i));
        }
        let target_span = op_span(n, target);
        let mut grown = target_span.clone();
        let mut reps = Vec::new();
        for s in &stabs {
            if target_span.contains(&s.to_row()) {
                if !target.contains(s) {
                    non_qubit.push(s.clone());
                }
            } else if grown.insert(&s.to_row()) {
                reps.push(s.clone());
            }
        }
        let budget = opts.conjugate_budget.unwrap_or(DEFAULT_CONJUGATE_BUDGET);
        let logical_ops: Vec<SymplecticOp> = logicals.iter().flat_map(|p| [p.x.clone(), p.z.clone()]).collect();
        let mut conjugates = Vec::with_capacity(reps.len());
        for (i, r) in reps.iter().enumerate() {
            let mut constraints = vec![r.clone()];
            constraints.extend(target.iter().cloned());
            constraints.extend(reps.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, o)| o.clone()));
            constraints.extend(logical_ops.iter().cloned());
            let (op, method) = conjugate_error(n, r, &constraints, budget, opts.exec).ok_or(DeformError::NoConjugate(i))?;
            conjugates.push((op, method));
        }
        // Make the conjugates mutually commute using the promoted generators.
        for i in 0..conjugates.len() {
            for j in 0..i {
                if conjugates[i].0.anticommutes(&conjugates[j].0) {
                    conjugates[i].0.mul_assign(&reps[j]);
                }
            }
        }
        for (r, (c, method)) in reps.into_iter().zip(conjugates) {
            let (x, z) = (c.clone(), r.clone());
            logicals.push(LogicalPair { label: label_for(&x, &z, state.threshold), x, z });
            promoted.push(PromotedPair { generator: r, conjugate: c, method });
        }
        stabs = target.to_vec();
    }

    let next = StabilizerState {
        n_qubits: n,
        stabilizers: stabs,
        logicals,
        threshold: state.threshold,
    };
    next.validate()?;

    let mut basis = old_ops.clone();
    basis.extend(state.stabilizers.iter().cloned());
    let solver = generator_matrix(n, &basis).solver();
    let new_ops = next.logical_ops();
    let mut fresh_rows = Vec::new();
    let rows = new_ops
        .iter()
        .enumerate()
        .map(|(i, op)| match solver.solve(&op.to_row()).expect("width 2n") {
            Some(c) => c,
            None => {
                fresh_rows.push(i);
                BitVec::zeros(basis.len())
            }
        })
        .collect();
    let step = DeformStep {
        measured: measured.to_vec(),
        actions,
        fates,
        promoted,
        non_qubit,
        q_matrix: BitMatrix::from_rows(basis.len(), rows),
        fresh_rows,
        old_logical_rows: old_ops.len(),
        new_logical_rows: new_ops.len(),
    };
    Ok((next, step))
}

/// An operator anticommuting with `constraints[0]` and commuting with the rest.
fn conjugate_error(
    n: usize,
    generator: &SymplecticOp,
    constraints: &[SymplecticOp],
    budget: usize,
    exec: Execution,
) -> Option<(SymplecticOp, ConjugateMethod)> {
    let paulis: &[Pauli] = if generator.is_z_type() {
        &[Pauli::X]
    } else if generator.is_x_type() {
        &[Pauli::Z]
    } else {
        &[Pauli::X, Pauli::Y, Pauli::Z]
    };
    let k = constraints.len();
    let choices: Vec<Vec<Choice>> = (0..n)
        .map(|q| {
            paulis
                .iter()
                .enumerate()
                .map(|(label, &p)| {
                    let single = SymplecticOp::single(n, q, p);
                    let bits: Vec<bool> = constraints.iter().map(|c| c.anticommutes(&single)).collect();
                    Choice { qubit: q, label, signature: BitVec::from_bools(&bits) }
                })
                .filter(|c| !c.signature.is_zero())
                .collect()
        })
        .collect();
    let goal = BitVec::unit(k, 0);
    if let SearchOutcome::Found(picks) = min_weight_search(&choices, k, budget, |s| *s == goal, exec) {
        let mut op = SymplecticOp::identity(n);
        for &(q, label) in &picks {
            op.mul_assign(&SymplecticOp::single(n, q, paulis[label]));
        }
        return Some((op, ConjugateMethod::MinWeight { weight: picks.len() }));
    }
    // Rows (z | x) so that row · (ex | ez) is the symplectic product.
    let swapped = BitMatrix::from_rows(2 * n, constraints.iter().map(|c| c.z.concat(&c.x)).collect());
    let e = swapped.transpose().solve_left(&goal).expect("shapes agree")?;
    Some((SymplecticOp::from_row(&e), ConjugateMethod::Linear { budget }))
}

/// Product of the logical blocks in application order, `Q^(T)…Q^(1)`.
pub fn compose(steps: &[DeformStep]) -> Result<BitMatrix, DeformError> {
    let Some(first) = steps.first() else {
        return Ok(BitMatrix::identity(0));
    };
    let mut acc = first.logical_block();
    for (i, step) in steps.iter().enumerate().skip(1) {
        if step.old_logical_rows != acc.rows() {
            return Err(DeformError::DimensionMismatch {
                index: i,
                expected: acc.rows(),
                found: step.old_logical_rows,
            });
        }
        acc = step.logical_block().matmul(&acc).expect("checked above");
    }
    Ok(acc)
}

/// Good/bad labels for the rows and logical columns of a `Q` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub row_good: Vec<bool>,
    pub col_good: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonmixingVerdict {
    pub nonmixing: bool,
    pub small: bool,
    /// Off-diagonal nonzero entries `(row, col)`.
    pub offending: Vec<(usize, usize)>,
}

/// Block-diagonality of `q` over the partition. Columns past
/// `col_good.len()` are stabilizer columns and are ignored.
pub fn check_nonmixing(q: &BitMatrix, partition: &Partition) -> Result<NonmixingVerdict, DeformError> {
    if partition.row_good.len() != q.rows() {
        return Err(DeformError::Partition { expected: q.rows(), found: partition.row_good.len() });
    }
    if partition.col_good.len() > q.cols() {
        return Err(DeformError::Partition { expected: q.cols(), found: partition.col_good.len() });
    }
    let mut offending = Vec::new();
    for (i, &rg) in partition.row_good.iter().enumerate() {
        for (j, &cg) in partition.col_good.iter().enumerate() {
            if rg != cg && q.get(i, j) {
                offending.push((i, j));
            }
        }
    }
    let good_rows: Vec<usize> = (0..q.rows()).filter(|&i| partition.row_good[i]).collect();
    let good_cols: Vec<usize> = (0..partition.col_good.len()).filter(|&j| partition.col_good[j]).collect();
    let small = q.submatrix(&good_rows, &good_cols).rank() == good_rows.len();
    Ok(NonmixingVerdict { nonmixing: offending.is_empty(), small, offending })
}

/// The partition of a step from the labels before and after it.
pub fn step_partition(before: &StabilizerState, after: &StabilizerState) -> Partition {
    Partition { row_good: after.row_partition(), col_good: before.row_partition() }
}

fn removed_stabilizer_op(code: &HgpCode, spec: &PunctureSpec, id: usize) -> SymplecticOp {
    match spec.kind {
        PunctureKind::Smooth => SymplecticOp::z_type(code.hz().row(id).clone()),
        PunctureKind::Rough => SymplecticOp::x_type(code.hx().row(id).clone()),
    }
}

fn single(n: usize, q: usize, basis: Basis) -> SymplecticOp {
    SymplecticOp::single(n, q, match basis {
        Basis::X => Pauli::X,
        Basis::Z => Pauli::Z,
    })
}

/// Measurements taking the puncture `from` to the puncture `to` (same kind):
/// single-qubit measurements on newly interior qubits, then the stabilizers
/// `from` removed that `to` keeps.
pub fn puncture_transition(
    code: &HgpCode,
    from: Option<&PunctureSpec>,
    to: Option<&PunctureSpec>,
) -> Result<Vec<SymplecticOp>, DeformError> {
    let n = code.n_qubits();
    let empty: Vec<usize> = Vec::new();
    let interior = |s: Option<&PunctureSpec>| s.map_or(&empty, |p| &p.interior_qubits).clone();
    let removed = |s: Option<&PunctureSpec>| s.map_or(&empty, |p| &p.removed_stabs).clone();
    let (from_int, to_int) = (interior(from), interior(to));
    let (from_rem, to_rem) = (removed(from), removed(to));
    if let (Some(a), Some(b)) = (from, to) {
        if a.kind != b.kind {
            return Err(DeformError::InvalidState("transition between different puncture kinds".into()));
        }
    }
    let mut ops = Vec::new();
    if let Some(b) = to {
        let fresh: Vec<usize> = to_int.iter().copied().filter(|q| !from_int.contains(q)).collect();
        let fresh_ops: Vec<SymplecticOp> = fresh.iter().map(|&q| single(n, q, b.measurement_basis)).collect();
        for &id in to_rem.iter().filter(|id| !from_rem.contains(id)) {
            let stab = removed_stabilizer_op(code, b, id);
            if !fresh_ops.iter().any(|o| o.anticommutes(&stab)) {
                return Err(DeformError::ReleaseRequired(id));
            }
        }
        ops.extend(fresh_ops);
    }
    if let Some(a) = from {
        for &id in from_rem.iter().filter(|id| !to_rem.contains(id)) {
            ops.push(removed_stabilizer_op(code, a, id));
        }
    }
    Ok(ops)
}

/// Span equality of two generator lists.
pub fn same_group(n: usize, a: &[SymplecticOp], b: &[SymplecticOp]) -> bool {
    let ra = op_span(n, a);
    let rb = op_span(n, b);
    ra.rank() == rb.rank() && b.iter().all(|o| ra.contains(&o.to_row()))
}

/// `true` if `op` lies in the span of `ops`.
pub fn in_span(n: usize, ops: &[SymplecticOp], op: &SymplecticOp) -> bool {
    let mut r = RowReducer::new(2 * n);
    for o in ops {
        r.insert(&o.to_row());
    }
    r.contains(&op.to_row())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defect::{apply_puncture, make_puncture};
    use crate::fgraph::NodeSet;
    use crate::hgp::{cyclic_repetition_code, repetition_code};

    fn rep3_state() -> (HgpCode, StabilizerState) {
        let code = HgpCode::build(&repetition_code(3)).unwrap();
        let st = StabilizerState::from_code(&code, 0).unwrap();
        (code, st)
    }

    #[test]
    fn measuring_a_stabilizer_is_the_identity() {
        let (_, st) = rep3_state();
        let m = st.stabilizers[0].clone();
        let (next, step) = measure_round(&st, &[m], &RoundOptions::default()).unwrap();
        assert_eq!(step.actions, vec![MeasurementAction::Redundant]);
        assert_eq!(step.logical_block(), BitMatrix::identity(2));
        assert_eq!(next.logicals, st.logicals);
    }

    #[test]
    fn single_qubit_measurement_matches_a_unit_puncture() {
        let (code, st) = rep3_state();
        let spec = make_puncture(&code, PunctureKind::Smooth, &NodeSet::vars([1]), &NodeSet::checks([0])).unwrap();
        let d = apply_puncture(&code, &spec, true).unwrap();
        let ops = puncture_transition(&code, None, Some(&spec)).unwrap();
        let (next, _) = measure_round(&st, &ops, &RoundOptions::default()).unwrap();
        let mut expected = d.generators();
        expected.extend(ops.iter().cloned());
        let loops = crate::symplectic::z_ops(&d.new_logical_z);
        expected.extend(loops);
        assert!(same_group(code.n_qubits(), &next.stabilizers, &expected));
    }

    #[test]
    fn anticommuting_measurements_are_rejected() {
        let (_, st) = rep3_state();
        let n = st.n_qubits;
        let ops = [SymplecticOp::single(n, 0, Pauli::X), SymplecticOp::single(n, 0, Pauli::Z)];
        assert_eq!(
            measure_round(&st, &ops, &RoundOptions::default()).unwrap_err(),
            DeformError::AnticommutingMeasurements(0, 1)
        );
    }

    #[test]
    fn measuring_a_logical_demotes_its_partner() {
        let (_, st) = rep3_state();
        let z = st.logicals[0].z.clone();
        let (next, step) = measure_round(&st, &[z], &RoundOptions::default()).unwrap();
        assert!(next.logicals.is_empty());
        assert_eq!(step.fates, vec![LogicalFate::Demoted, LogicalFate::Measured]);
        assert_eq!(step.q_matrix.rows(), 0);
    }

    #[test]
    fn redundant_release_is_not_a_qubit() {
        // Toric code: removing one Z stabilizer releases a redundant generator.
        let code = HgpCode::build(&cyclic_repetition_code(3)).unwrap();
        let st = StabilizerState::from_code(&code, 0).unwrap();
        let mut target = st.stabilizers.clone();
        let z0 = code.hx().rows();
        let released = target.remove(z0);
        let (next, step) = measure_round(&st, &[], &RoundOptions { target: Some(&target), ..Default::default() }).unwrap();
        assert!(step.promoted.is_empty());
        assert_eq!(step.non_qubit, vec![released]);
        assert_eq!(next.logicals.len(), st.logicals.len());
    }

    #[test]
    fn releasing_an_independent_generator_promotes_it() {
        let (code, st) = rep3_state();
        let mut target = st.stabilizers.clone();
        let released = target.remove(code.hx().rows());
        let (next, step) = measure_round(&st, &[], &RoundOptions { target: Some(&target), ..Default::default() }).unwrap();
        assert_eq!(step.promoted.len(), 1);
        assert_eq!(step.promoted[0].generator, released);
        assert!(matches!(step.promoted[0].method, ConjugateMethod::MinWeight { .. }));
        assert_eq!(next.logicals.len(), 2);
        assert_eq!(step.fresh_rows, vec![2]);
    }

    #[test]
    fn unreachable_target_is_rejected() {
        let (_, st) = rep3_state();
        let n = st.n_qubits;
        let target = vec![SymplecticOp::single(n, 0, Pauli::X)];
        assert_eq!(
            measure_round(&st, &[], &RoundOptions { target: Some(&target), ..Default::default() }).unwrap_err(),
            DeformError::TargetUnreachable(0)
        );
    }

    #[test]
    fn compose_checks_dimensions_and_multiplies() {
        let (_, st) = rep3_state();
        let m = st.stabilizers[1].clone();
        let (s1, a) = measure_round(&st, std::slice::from_ref(&m), &RoundOptions::default()).unwrap();
        let (_, b) = measure_round(&s1, &[m], &RoundOptions::default()).unwrap();
        assert_eq!(compose(&[a.clone(), b]).unwrap(), BitMatrix::identity(2));
        let z = st.logicals[0].z.clone();
        let (_, c) = measure_round(&st, &[z], &RoundOptions::default()).unwrap();
        assert!(matches!(compose(&[c, a]), Err(DeformError::DimensionMismatch { index: 1, .. })));
    }

    #[test]
    fn nonmixing_verdicts() {
        let q = BitMatrix::from_dense(4, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 1], vec![0, 0, 0, 1]]);
        let p = Partition { row_good: vec![true, true, false, false], col_good: vec![true, true, false, false] };
        let v = check_nonmixing(&q, &p).unwrap();
        assert!(v.nonmixing && v.small);
        let mut q2 = q.clone();
        q2.set(0, 2, true);
        assert!(!check_nonmixing(&q2, &p).unwrap().nonmixing);
        let bad = Partition { row_good: vec![true], col_good: vec![true] };
        assert!(matches!(check_nonmixing(&q, &bad), Err(DeformError::Partition { .. })));
    }
}
