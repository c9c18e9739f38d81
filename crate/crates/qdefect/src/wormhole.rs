//! Wormholes: a smooth puncture on `(S, T)` joined to its transposed rough
//! puncture through two-qubit boundary measurements and hybrid stabilizers.

use serde::{Deserialize, Serialize};

use crate::defect::{
    self, correctability, make_puncture, Basis, CorrectabilityReport, DefectKind, DeformedCode,
    MeasuredQubit, PunctureKind, PunctureSpec,
};
use crate::error::DefectError;
use crate::f2::{BitMatrix, BitVec};
use crate::fgraph::{InducedSets, NodeSet};
use crate::hgp::HgpCode;
use crate::symplectic::{generator_matrix, gram, SymplecticOp};

/// Sets and schedule of a wormhole. Requires `N ∩ T = ∅` and `M ∩ S = ∅`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WormholeSpec {
    pub s: NodeSet,
    pub t: NodeSet,
    pub induced: InducedSets,
    pub smooth: PunctureSpec,
    pub rough: PunctureSpec,
    /// `(x_qubit, z_qubit)` for each two-qubit measurement `X ⊗ Z`.
    pub measurements: Vec<(usize, usize)>,
    /// `(v, c)` with `v ∈ M`, `c ∈ N`, `(v, c) ∉ B×A`, one per hybrid.
    pub hybrid_pairs: Vec<(usize, usize)>,
    pub retained_x: Vec<usize>,
    pub retained_z: Vec<usize>,
}

impl WormholeSpec {
    /// Interior qubits of both punctures, sorted.
    pub fn interior_qubits(&self) -> Vec<usize> {
        let mut q: Vec<usize> = self
            .smooth
            .interior_qubits
            .iter()
            .chain(&self.rough.interior_qubits)
            .copied()
            .collect();
        q.sort_unstable();
        q
    }

    pub fn hybrid_count(&self) -> usize {
        self.hybrid_pairs.len()
    }
}

fn overlap_message(induced: &InducedSets, s: &NodeSet, t: &NodeSet) -> Option<String> {
    let nt = induced.n.intersection(t);
    let ms = induced.m.intersection(s);
    if nt.is_empty() && ms.is_empty() {
        return None;
    }
    Some(format!("N∩T = {:?}, M∩S = {:?}", nt.members(), ms.members()))
}

pub fn make_wormhole(code: &HgpCode, s: &NodeSet, t: &NodeSet) -> Result<WormholeSpec, DefectError> {
    let smooth = make_puncture(code, PunctureKind::Smooth, s, t)?;
    let rough = make_puncture(code, PunctureKind::Rough, s, t)?;
    let induced = smooth.induced.clone();
    if let Some(msg) = overlap_message(&induced, s, t) {
        return Err(DefectError::Overlap(msg));
    }
    let InducedSets { n, a, m, b } = &induced;
    let (nv, nc) = (code.n(), code.m());

    let mut measurements = Vec::new();
    for c in n.difference(a).iter() {
        for cp in t.iter() {
            measurements.push((code.cc(c, cp), code.cc(cp, c)));
        }
    }
    for u in s.iter() {
        for up in m.difference(b).iter() {
            measurements.push((code.vv(u, up), code.vv(up, u)));
        }
    }
    let mut hybrid_pairs = Vec::new();
    for v in m.iter() {
        for c in n.iter() {
            if !(b.contains(v) && a.contains(c)) {
                hybrid_pairs.push((v, c));
            }
        }
    }
    let removed = |v: usize, c: usize| (s.contains(v) && t.contains(c)) || (m.contains(v) && n.contains(c));
    let mut retained_x = Vec::new();
    for v in 0..nv {
        for c in 0..nc {
            if !removed(v, c) {
                retained_x.push(code.x_stab(v, c));
            }
        }
    }
    let mut retained_z = Vec::new();
    for c in 0..nc {
        for v in 0..nv {
            if !removed(v, c) {
                retained_z.push(code.z_stab(c, v));
            }
        }
    }
    Ok(WormholeSpec {
        s: s.clone(),
        t: t.clone(),
        induced,
        smooth,
        rough,
        measurements,
        hybrid_pairs,
        retained_x,
        retained_z,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendedCorrectabilityReport {
    pub disjoint: bool,
    pub overlap: Option<String>,
    /// Conditions for `(S, T)`; absent when disjointness fails.
    pub base: Option<CorrectabilityReport>,
    /// Conditions for `(M, N)` read as a puncture.
    pub extended: Option<CorrectabilityReport>,
    pub correctable: bool,
}

pub fn check_extended_correctable(
    code: &HgpCode,
    s: &NodeSet,
    t: &NodeSet,
) -> Result<ExtendedCorrectabilityReport, DefectError> {
    let g = code.graph();
    let induced = g.induced_sets(s, t)?;
    if let Some(msg) = overlap_message(&induced, s, t) {
        return Ok(ExtendedCorrectabilityReport {
            disjoint: false,
            overlap: Some(msg),
            base: None,
            extended: None,
            correctable: false,
        });
    }
    let base = correctability(code, s, t, &induced);
    let s_ext = induced.m.clone();
    let t_ext = induced.n.clone();
    let ext_induced = g.induced_sets(&s_ext, &t_ext)?;
    let extended = correctability(code, &s_ext, &t_ext, &ext_induced);
    Ok(ExtendedCorrectabilityReport {
        disjoint: true,
        overlap: None,
        correctable: base.correctable && extended.correctable,
        base: Some(base),
        extended: Some(extended),
    })
}

pub fn two_qubit_measurements(code: &HgpCode, spec: &WormholeSpec) -> Vec<SymplecticOp> {
    let nq = code.n_qubits();
    spec.measurements
        .iter()
        .map(|&(xq, zq)| SymplecticOp::new(BitVec::unit(nq, xq), BitVec::unit(nq, zq)))
        .collect()
}

/// `X` on the X stabilizer `(v, c)` and `Z` on the Z stabilizer `(c, v)`,
/// both with interior support removed.
pub fn hybrid_stabilizers(code: &HgpCode, spec: &WormholeSpec) -> Vec<SymplecticOp> {
    let interior = BitVec::from_support(code.n_qubits(), &spec.interior_qubits());
    spec.hybrid_pairs
        .iter()
        .map(|&(v, c)| {
            let mut op = SymplecticOp::new(
                code.hx().row(code.x_stab(v, c)).clone(),
                code.hz().row(code.z_stab(c, v)).clone(),
            );
            op.clear_qubits(&interior);
            op
        })
        .collect()
}

fn complement_ids(ids: &[usize], total: usize) -> Vec<usize> {
    (0..total).filter(|i| ids.binary_search(i).is_err()).collect()
}

/// Builds the wormhole code. Empty `S` and `T` give the base code.
pub fn apply_wormhole(
    code: &HgpCode,
    s: &NodeSet,
    t: &NodeSet,
    force: bool,
) -> Result<(Option<WormholeSpec>, DeformedCode), DefectError> {
    if s.is_empty() && t.is_empty() {
        return Ok((None, DeformedCode::undeformed(code)));
    }
    let report = check_extended_correctable(code, s, t)?;
    if let Some(msg) = &report.overlap {
        return Err(DefectError::Overlap(msg.clone()));
    }
    if !force && !report.correctable {
        let mut failures = Vec::new();
        for (label, r) in [("(S,T)", &report.base), ("(M,N)", &report.extended)] {
            if let Some(r) = r {
                failures.extend(r.failures().into_iter().map(|f| format!("{label}: {f}")));
            }
        }
        return Err(DefectError::NotCorrectable(failures.join("; ")));
    }
    let spec = make_wormhole(code, s, t)?;
    let logicals = wormhole_logical_operators(code, &spec);
    let mut measured_out: Vec<MeasuredQubit> = spec
        .smooth
        .interior_qubits
        .iter()
        .map(|&qubit| MeasuredQubit { qubit, basis: Basis::X })
        .chain(spec.rough.interior_qubits.iter().map(|&qubit| MeasuredQubit { qubit, basis: Basis::Z }))
        .collect();
    measured_out.sort_by_key(|m| m.qubit);
    let z_loops: Vec<BitVec> = logicals.type1.iter().chain(&logicals.type2).map(|l| l.z.clone()).collect();
    let deformed = DeformedCode {
        base: code.clone(),
        kind: DefectKind::Wormhole,
        sx: code.hx().select_rows(&spec.retained_x),
        sz: code.hz().select_rows(&spec.retained_z),
        dropped_x: complement_ids(&spec.retained_x, code.hx().rows()),
        dropped_z: complement_ids(&spec.retained_z, code.hz().rows()),
        sx_ids: spec.retained_x.clone(),
        sz_ids: spec.retained_z.clone(),
        measured_out,
        hybrids: hybrid_stabilizers(code, &spec),
        two_qubit: two_qubit_measurements(code, &spec),
        new_logical_x: BitMatrix::zeros(0, code.n_qubits()),
        new_logical_z: BitMatrix::from_rows(code.n_qubits(), z_loops),
    };
    let violations = deformed.commutation_violations(crate::par::Execution::default());
    if !violations.is_empty() {
        return Err(DefectError::Invalid(format!(
            "{} anticommuting generator pairs, first {:?}",
            violations.len(),
            violations[0]
        )));
    }
    let bad = deformed.measured_support_violations();
    if !bad.is_empty() {
        return Err(DefectError::Invalid(format!(
            "generators {bad:?} anticommute with an interior measurement"
        )));
    }
    Ok((Some(spec), deformed))
}

/// A Z loop with its equivalent X loop around the other puncture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopPair {
    pub z: BitVec,
    pub x: BitVec,
    /// Coefficients over the wormhole generators (layout order) whose product
    /// is `Z(z)·X(x)`. `None` if no combination exists.
    pub witness: Option<BitVec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WormholeLogicals {
    pub type1: Vec<LoopPair>,
    pub type2: Vec<LoopPair>,
    /// `chain_conjugates[i]` anticommutes with `type1[i]` only.
    pub chain_conjugates: Vec<SymplecticOp>,
    pub pairing_rule: &'static str,
}

pub const PAIRING_RULE: &str = "dual basis of the type-1 loops under the symplectic Gram matrix";

fn coefficient_row(code: &HgpCode, rows: &NodeSet, cols: &NodeSet, left: &BitVec, right: &BitVec, z: bool) -> BitVec {
    // Coefficients on stabilizer (r, c) for r in rows, c in cols: left_r right_c.
    let len = code.n() * code.m();
    let mut a = BitVec::zeros(len);
    for (i, r) in rows.iter().enumerate() {
        if !left.get(i) {
            continue;
        }
        for (j, c) in cols.iter().enumerate() {
            if right.get(j) {
                a.set(if z { code.z_stab(r, c) } else { code.x_stab(r, c) }, true);
            }
        }
    }
    a
}

/// Type-1 and type-2 loops, their X partners and witnesses, and the chain
/// conjugates of the type-1 loops.
pub fn wormhole_logical_operators(code: &HgpCode, spec: &WormholeSpec) -> WormholeLogicals {
    let nq = code.n_qubits();
    let h = code.h();
    let interior = BitVec::from_support(nq, &spec.interior_qubits());
    let perm = code.transpose_permutation();
    let InducedSets { n, m, .. } = &spec.induced;

    let mut gens: Vec<SymplecticOp> = crate::symplectic::x_ops(&code.hx().select_rows(&spec.retained_x));
    gens.extend(crate::symplectic::z_ops(&code.hz().select_rows(&spec.retained_z)));
    gens.extend(hybrid_stabilizers(code, spec));
    gens.extend(two_qubit_measurements(code, spec));
    let solver = generator_matrix(nq, &gens).solver();
    let witness = |z: &BitVec, x: &BitVec| {
        solver
            .solve(&x.concat(z))
            .expect("width matches")
    };

    let type1: Vec<LoopPair> = defect::puncture_loops(code, &spec.smooth)
        .iter_rows()
        .map(|z| {
            let mut x = BitVec::zeros(nq);
            for q in z.iter_ones() {
                x.set(perm[q], true);
            }
            LoopPair { witness: witness(z, &x), z: z.clone(), x }
        })
        .collect();

    let g_basis = h.submatrix(n.members(), spec.s.members()).transpose().kernel_basis();
    let f_basis = h.submatrix(spec.t.members(), m.members()).kernel_basis();
    let mut type2 = Vec::new();
    for g in g_basis.iter_rows() {
        for f in f_basis.iter_rows() {
            let az = coefficient_row(code, n, m, g, f, true);
            let ax = coefficient_row(code, m, n, f, g, false);
            let mut z = code.hz().left_mul_vec(&az).expect("length m*n");
            let mut x = code.hx().left_mul_vec(&ax).expect("length n*m");
            z.clear_mask(&interior);
            x.clear_mask(&interior);
            type2.push(LoopPair { witness: witness(&z, &x), z, x });
        }
    }

    let chains = defect::puncture_chains(code, &spec.smooth).basis();
    let raw: Vec<SymplecticOp> = chains
        .iter_rows()
        .map(|c| {
            let mut z = BitVec::zeros(nq);
            for q in c.iter_ones() {
                z.set(perm[q], true);
            }
            let mut op = SymplecticOp::new(c.clone(), z);
            op.clear_qubits(&interior);
            op
        })
        .collect();
    let loops: Vec<SymplecticOp> = type1.iter().map(|l| SymplecticOp::z_type(l.z.clone())).collect();
    let chain_conjugates = pair_with_loops(&loops, &raw);
    WormholeLogicals {
        type1,
        type2,
        chain_conjugates,
        pairing_rule: PAIRING_RULE,
    }
}

/// Recombines `ops` so that result `i` anticommutes with `loops[i]` only.
/// Returns `ops` unchanged if the Gram matrix is not invertible.
fn pair_with_loops(loops: &[SymplecticOp], ops: &[SymplecticOp]) -> Vec<SymplecticOp> {
    let g = gram(loops, ops);
    let Some(inv) = defect::invert(&g) else {
        return ops.to_vec();
    };
    // Row i of (G⁻¹)ᵗ gives the combination dual to loop i.
    inv.transpose()
        .iter_rows()
        .map(|coeffs| {
            let mut acc = SymplecticOp::identity(ops[0].n_qubits());
            for j in coeffs.iter_ones() {
                acc.mul_assign(&ops[j]);
            }
            acc
        })
        .collect()
}

/// Number of wormhole logicals predicted by the loop bases.
pub fn predicted_logical_count(logicals: &WormholeLogicals) -> usize {
    logicals.type1.len() + logicals.type2.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hgp::repetition_code;
    use crate::par::Execution;
    use crate::symplectic::anticommuting_pairs;

    fn rep(n: usize) -> HgpCode {
        HgpCode::build(&repetition_code(n)).unwrap()
    }

    fn fixtures() -> Vec<(HgpCode, NodeSet, NodeSet)> {
        vec![
            (rep(9), NodeSet::vars([1, 2]), NodeSet::checks([5, 6])),
            (rep(9), NodeSet::vars([1, 2, 3]), NodeSet::checks([6])),
            (rep(7), NodeSet::vars([1]), NodeSet::checks([4])),
        ]
    }

    #[test]
    fn wormhole_generators_commute_and_count_matches() {
        for (code, s, t) in fixtures() {
            let (spec, d) = apply_wormhole(&code, &s, &t, false).unwrap();
            let spec = spec.unwrap();
            let InducedSets { n, a, m, b } = &spec.induced;
            assert_eq!(spec.hybrid_count(), m.len() * n.len() - b.len() * a.len());
            assert!(d.commutation_violations(Execution::Sequential).is_empty());
            assert!(d.max_generator_weight() <= 2 * code.max_stabilizer_weight());
            let logicals = wormhole_logical_operators(&code, &spec);
            assert_eq!(d.logical_count_by_rank(), code.k() + predicted_logical_count(&logicals));
        }
    }

    #[test]
    fn loops_have_witnesses_and_conjugates_pair() {
        for (code, s, t) in fixtures() {
            let spec = make_wormhole(&code, &s, &t).unwrap();
            let (_, d) = apply_wormhole(&code, &s, &t, false).unwrap();
            let gens = d.generators();
            let l = wormhole_logical_operators(&code, &spec);
            assert!(!l.type1.is_empty());
            for pair in l.type1.iter().chain(&l.type2) {
                assert!(pair.witness.is_some());
                let z = SymplecticOp::z_type(pair.z.clone());
                assert!(gens.iter().all(|g| g.commutes(&z)));
            }
            let loops: Vec<SymplecticOp> = l.type1.iter().map(|p| SymplecticOp::z_type(p.z.clone())).collect();
            assert_eq!(gram(&loops, &l.chain_conjugates), BitMatrix::identity(loops.len()));
            for c in &l.chain_conjugates {
                assert!(gens.iter().all(|g| g.commutes(c)));
            }
        }
    }

    #[test]
    fn hybrids_need_their_partner_half() {
        let (code, s, t) = fixtures().remove(0);
        let spec = make_wormhole(&code, &s, &t).unwrap();
        let meas = two_qubit_measurements(&code, &spec);
        let hybrids = hybrid_stabilizers(&code, &spec);
        assert!(anticommuting_pairs(&hybrids, Execution::Sequential).is_empty());
        let frustrated = hybrids.iter().any(|hy| {
            let x_only = SymplecticOp::x_type(hy.x.clone());
            meas.iter().any(|mq| mq.anticommutes(&x_only))
        });
        assert!(frustrated);
    }

    #[test]
    fn measurement_cardinality() {
        let (code, s, t) = fixtures().remove(0);
        let spec = make_wormhole(&code, &s, &t).unwrap();
        let InducedSets { n, a, m, b } = &spec.induced;
        let expected = n.difference(a).len() * t.len() + s.len() * m.difference(b).len();
        assert_eq!(spec.measurements.len(), expected);
        for &(xq, zq) in &spec.measurements {
            assert_ne!(xq, zq);
            assert_eq!(code.transpose_qubit(xq), zq);
            assert!(spec.rough.boundary_qubits.contains(&xq) || spec.smooth.boundary_qubits.contains(&xq));
        }
    }

    #[test]
    fn adjacent_sets_fail_disjointness() {
        let code = rep(7);
        let r = check_extended_correctable(&code, &NodeSet::vars([2]), &NodeSet::checks([2])).unwrap();
        assert!(!r.disjoint && r.base.is_none());
        assert!(matches!(
            apply_wormhole(&code, &NodeSet::vars([2]), &NodeSet::checks([2]), false),
            Err(DefectError::Overlap(_))
        ));
    }

    #[test]
    fn empty_sets_leave_the_code() {
        let code = rep(5);
        let (spec, d) = apply_wormhole(&code, &NodeSet::vars([]), &NodeSet::checks([]), false).unwrap();
        assert!(spec.is_none());
        assert_eq!(d, DeformedCode::undeformed(&code));
    }
}
