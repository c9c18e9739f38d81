//! Smooth and rough punctures: carving, correctability, the deformed code and
//! its closed-form logical operators.
//!
//! A rough puncture on `(S, T)` is the image of the smooth puncture on
//! `(S, T)` under the qubit transpose τ with X and Z exchanged, so only the
//! smooth case is constructed directly.

use serde::{Deserialize, Serialize};

use crate::error::DefectError;
use crate::f2::{greedy_extension, BitMatrix, BitVec};
use crate::fgraph::{InducedSets, NodeSet, Side};
use crate::hgp::HgpCode;
use crate::par::Execution;
use crate::symplectic::{self, css_gram, generator_matrix, SymplecticOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PunctureKind {
    Smooth,
    Rough,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    X,
    Z,
}

impl PunctureKind {
    /// Single-qubit basis measured on the interior. It must anticommute with
    /// the stabilizer type the puncture removes.
    pub fn measurement_basis(self) -> Basis {
        match self {
            PunctureKind::Smooth => Basis::X,
            PunctureKind::Rough => Basis::Z,
        }
    }

    /// Stabilizer type removed on `T×S` (smooth) or `S×T` (rough).
    pub fn removed_type(self) -> Basis {
        match self {
            PunctureKind::Smooth => Basis::Z,
            PunctureKind::Rough => Basis::X,
        }
    }
}

/// A puncture on variables `S` and checks `T` with its Table-1 bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PunctureSpec {
    pub kind: PunctureKind,
    pub s: NodeSet,
    pub t: NodeSet,
    pub induced: InducedSets,
    /// Measured-out qubits: `B×S ∪ T×A` (smooth) or `S×B ∪ A×T` (rough).
    pub interior_qubits: Vec<usize>,
    /// `(M\B)×S ∪ T×(N\A)` (smooth) or its transpose (rough).
    pub boundary_qubits: Vec<usize>,
    /// Boundary stabilizers of the truncated type: X stabilizers
    /// `M×N \ B×A` (smooth) or Z stabilizers `N×M \ A×B` (rough).
    pub boundary_stabs: Vec<usize>,
    /// Stabilizers of the removed type: Z on `T×S` (smooth) or X on `S×T` (rough).
    pub removed_stabs: Vec<usize>,
    pub measurement_basis: Basis,
    pub warnings: Vec<String>,
}

impl PunctureSpec {
    pub fn interior_mask(&self, n_qubits: usize) -> BitVec {
        BitVec::from_support(n_qubits, &self.interior_qubits)
    }

    /// The same sets with the other kind.
    fn smooth_twin(&self, code: &HgpCode) -> PunctureSpec {
        make_puncture(code, PunctureKind::Smooth, &self.s, &self.t)
            .expect("sets were already validated")
    }
}

/// Induced sets and Table-1 classification for a puncture.
pub fn make_puncture(
    code: &HgpCode,
    kind: PunctureKind,
    s: &NodeSet,
    t: &NodeSet,
) -> Result<PunctureSpec, DefectError> {
    if s.is_empty() {
        return Err(DefectError::EmptySet("S"));
    }
    if t.is_empty() {
        return Err(DefectError::EmptySet("T"));
    }
    let g = code.graph();
    let induced = g.induced_sets(s, t)?;
    let mut warnings = Vec::new();
    if !g.is_connected(s)? {
        warnings.push("variable set S is not connected".to_string());
    }
    if !g.is_connected(t)? {
        warnings.push("check set T is not connected".to_string());
    }
    let InducedSets { n, a, m, b } = &induced;
    let m_minus_b = m.difference(b);
    let n_minus_a = n.difference(a);

    // Smooth labels; rough is the transpose.
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    let mut boundary_stabs = Vec::new();
    let mut removed = Vec::new();
    let smooth = kind == PunctureKind::Smooth;
    let vv = |u: usize, v: usize| if smooth { code.vv(u, v) } else { code.vv(v, u) };
    let cc = |c: usize, d: usize| if smooth { code.cc(c, d) } else { code.cc(d, c) };
    for u in b.iter() {
        for v in s.iter() {
            interior.push(vv(u, v));
        }
    }
    for c in t.iter() {
        for d in a.iter() {
            interior.push(cc(c, d));
        }
    }
    for u in m_minus_b.iter() {
        for v in s.iter() {
            boundary.push(vv(u, v));
        }
    }
    for c in t.iter() {
        for d in n_minus_a.iter() {
            boundary.push(cc(c, d));
        }
    }
    for v in m.iter() {
        for c in n.iter() {
            if !(b.contains(v) && a.contains(c)) {
                boundary_stabs.push(if smooth {
                    code.x_stab(v, c)
                } else {
                    code.z_stab(c, v)
                });
            }
        }
    }
    for c in t.iter() {
        for v in s.iter() {
            removed.push(if smooth {
                code.z_stab(c, v)
            } else {
                code.x_stab(v, c)
            });
        }
    }
    interior.sort_unstable();
    boundary.sort_unstable();
    boundary_stabs.sort_unstable();
    removed.sort_unstable();
    Ok(PunctureSpec {
        kind,
        s: s.clone(),
        t: t.clone(),
        induced,
        interior_qubits: interior,
        boundary_qubits: boundary,
        boundary_stabs,
        removed_stabs: removed,
        measurement_basis: kind.measurement_basis(),
        warnings,
    })
}

/// One kernel-emptiness condition, evaluated over an explicit domain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelCondition {
    pub name: String,
    pub domain: String,
    pub dimension: usize,
    pub pass: bool,
}

impl KernelCondition {
    fn new(name: &str, domain: &str, dimension: usize) -> Self {
        Self {
            name: name.to_string(),
            domain: domain.to_string(),
            dimension,
            pass: dimension == 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectabilityReport {
    /// The four kernel conditions plus the codeword-overlap condition.
    pub primary: Vec<KernelCondition>,
    /// The four consequences, computed independently from submatrices.
    pub implied: Vec<KernelCondition>,
    pub correctable: bool,
    /// False only if the primary conditions pass and an implied one fails.
    pub implication_holds: bool,
}

impl CorrectabilityReport {
    pub fn failures(&self) -> Vec<String> {
        self.primary
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{} over {} has dimension {}", c.name, c.domain, c.dimension))
            .collect()
    }
}

/// Dimension of `{x : mat x = 0, supp x ⊆ domain}`.
fn restricted_kernel_dim(mat: &BitMatrix, domain: &NodeSet) -> usize {
    let width = mat.cols();
    let selectors = BitMatrix::from_rows(
        width,
        (0..width)
            .filter(|&j| !domain.contains(j))
            .map(|j| BitVec::unit(width, j))
            .collect(),
    );
    let stacked = mat.vstack(&selectors).expect("same width");
    width - stacked.rank()
}

fn kernel_dim(mat: &BitMatrix) -> usize {
    mat.cols() - mat.rank()
}

/// Evaluates correctability of the sets `(S, T)`.
pub fn correctability(code: &HgpCode, s: &NodeSet, t: &NodeSet, induced: &InducedSets) -> CorrectabilityReport {
    let h = code.h();
    let InducedSets { n, a, m, b } = induced;

    let h_n = h.mask_rows(n.members());
    let h_m_t = h.mask_cols(m.members()).transpose();
    let h_t = h.mask_rows(t.members());
    let h_s_t = h.mask_cols(s.members()).transpose();
    let ker_h = h.kernel_basis();
    let ker_ht = h.left_kernel_basis();
    let codeword_meets_s = !ker_h.select_cols(s.members()).is_zero();
    let codeword_meets_t = !ker_ht.select_cols(t.members()).is_zero();
    let overlap = KernelCondition {
        name: "codeword overlap".to_string(),
        domain: "proj_S(ker h) or proj_T(ker h^t)".to_string(),
        dimension: usize::from(codeword_meets_s && codeword_meets_t),
        pass: !(codeword_meets_s && codeword_meets_t),
    };
    let primary = vec![
        KernelCondition::new("ker h_N", "F^S", restricted_kernel_dim(&h_n, s)),
        KernelCondition::new("ker h_M^t", "F^T", restricted_kernel_dim(&h_m_t, t)),
        KernelCondition::new("ker h_T", "F^B", restricted_kernel_dim(&h_t, b)),
        KernelCondition::new("ker h_S^t", "F^A", restricted_kernel_dim(&h_s_t, a)),
        overlap,
    ];
    let implied = vec![
        KernelCondition::new("ker h_S", "F^S", kernel_dim(&h.select_cols(s.members()))),
        KernelCondition::new(
            "ker h_T^t",
            "F^T",
            kernel_dim(&h.select_rows(t.members()).transpose()),
        ),
        KernelCondition::new("ker h_B", "F^B", kernel_dim(&h.select_cols(b.members()))),
        KernelCondition::new(
            "ker h_A^t",
            "F^A",
            kernel_dim(&h.select_rows(a.members()).transpose()),
        ),
    ];
    let kernels_pass = primary[..4].iter().all(|c| c.pass);
    let correctable = primary.iter().all(|c| c.pass);
    let implied_pass = implied.iter().all(|c| c.pass);
    CorrectabilityReport {
        primary,
        implied,
        correctable,
        implication_holds: !kernels_pass || implied_pass,
    }
}

pub fn check_correctable(code: &HgpCode, spec: &PunctureSpec) -> CorrectabilityReport {
    correctability(code, &spec.s, &spec.t, &spec.induced)
}

fn diag(size: usize, set: &NodeSet) -> BitMatrix {
    let mut d = BitMatrix::zeros(size, size);
    for i in set.iter() {
        d.set(i, i, true);
    }
    d
}

/// `(hx', hz')` for the smooth puncture on the given sets, at full width.
fn smooth_primes(code: &HgpCode, s: &NodeSet, t: &NodeSet, induced: &InducedSets) -> (BitMatrix, BitMatrix) {
    let h = code.h();
    let (m, n) = h.shape();
    let h_s = h.mask_cols(s.members());
    let h_t = h.mask_rows(t.members());
    let hx_p = diag(n, &induced.b)
        .kron(&h_s)
        .hstack(&h_t.transpose().kron(&diag(m, &induced.a)))
        .expect("block shapes agree");
    let hz_p = h_t
        .kron(&diag(n, s))
        .hstack(&diag(m, t).kron(&h_s.transpose()))
        .expect("block shapes agree");
    (hx_p, hz_p)
}

/// Image of X-stabilizer-indexed rows as Z-stabilizer-indexed rows under τ.
fn tau_x_rows_to_z(code: &HgpCode, rows: &BitMatrix) -> BitMatrix {
    let perm = code.transpose_permutation();
    let out = (0..code.m() * code.n())
        .map(|zi| {
            let (c, v) = code.z_stab_label(zi);
            permute_bits(rows.row(code.x_stab(v, c)), &perm)
        })
        .collect();
    BitMatrix::from_rows(code.n_qubits(), out)
}

fn tau_z_rows_to_x(code: &HgpCode, rows: &BitMatrix) -> BitMatrix {
    let perm = code.transpose_permutation();
    let out = (0..code.n() * code.m())
        .map(|xi| {
            let (v, c) = code.x_stab_label(xi);
            permute_bits(rows.row(code.z_stab(c, v)), &perm)
        })
        .collect();
    BitMatrix::from_rows(code.n_qubits(), out)
}

fn permute_bits(v: &BitVec, perm: &[usize]) -> BitVec {
    let mut out = BitVec::zeros(v.len());
    for q in v.iter_ones() {
        out.set(perm[q], true);
    }
    out
}

fn permute_rows(m: &BitMatrix, perm: &[usize]) -> BitMatrix {
    BitMatrix::from_rows(m.cols(), m.iter_rows().map(|r| permute_bits(r, perm)).collect())
}

/// `(hx', hz')` embedded at full stabilizer and qubit width.
pub fn puncture_stabilizers(code: &HgpCode, spec: &PunctureSpec) -> (BitMatrix, BitMatrix) {
    let (hx_p, hz_p) = smooth_primes(code, &spec.s, &spec.t, &spec.induced);
    match spec.kind {
        PunctureKind::Smooth => (hx_p, hz_p),
        PunctureKind::Rough => (tau_z_rows_to_x(code, &hz_p), tau_x_rows_to_z(code, &hx_p)),
    }
}

/// A qubit removed from the code by a single-qubit measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasuredQubit {
    pub qubit: usize,
    pub basis: Basis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefectKind {
    None,
    Smooth,
    Rough,
    Wormhole,
}

/// A base code after a defect: surviving stabilizers, measured-out qubits,
/// mixed generators (wormholes only) and the defect's logical operators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformedCode {
    pub base: HgpCode,
    pub kind: DefectKind,
    /// Pure X generators with their base X-stabilizer ids.
    pub sx: BitMatrix,
    pub sx_ids: Vec<usize>,
    /// Pure Z generators with their base Z-stabilizer ids.
    pub sz: BitMatrix,
    pub sz_ids: Vec<usize>,
    /// Base X rows that vanished or were removed, in index order.
    pub dropped_x: Vec<usize>,
    pub dropped_z: Vec<usize>,
    pub measured_out: Vec<MeasuredQubit>,
    /// Mixed generators (hybrids, then two-qubit measurements).
    pub hybrids: Vec<SymplecticOp>,
    pub two_qubit: Vec<SymplecticOp>,
    /// Defect logical operators, full width, zero on measured-out qubits.
    pub new_logical_x: BitMatrix,
    pub new_logical_z: BitMatrix,
}

impl DeformedCode {
    /// The base code with no defect.
    pub fn undeformed(code: &HgpCode) -> Self {
        let nq = code.n_qubits();
        Self {
            base: code.clone(),
            kind: DefectKind::None,
            sx: code.hx().clone(),
            sx_ids: (0..code.hx().rows()).collect(),
            sz: code.hz().clone(),
            sz_ids: (0..code.hz().rows()).collect(),
            dropped_x: Vec::new(),
            dropped_z: Vec::new(),
            measured_out: Vec::new(),
            hybrids: Vec::new(),
            two_qubit: Vec::new(),
            new_logical_x: BitMatrix::zeros(0, nq),
            new_logical_z: BitMatrix::zeros(0, nq),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.base.n_qubits()
    }

    pub fn measured_mask(&self) -> BitVec {
        let qs: Vec<usize> = self.measured_out.iter().map(|m| m.qubit).collect();
        BitVec::from_support(self.n_qubits(), &qs)
    }

    pub fn live_qubits(&self) -> Vec<usize> {
        let mask = self.measured_mask();
        (0..self.n_qubits()).filter(|&q| !mask.get(q)).collect()
    }

    /// Generators at full width: pure X, pure Z, hybrids, two-qubit measurements.
    pub fn generators(&self) -> Vec<SymplecticOp> {
        let mut out = symplectic::x_ops(&self.sx);
        out.extend(symplectic::z_ops(&self.sz));
        out.extend(self.hybrids.iter().cloned());
        out.extend(self.two_qubit.iter().cloned());
        out
    }

    /// Generator matrix restricted to live qubits, as `(x | z)` rows.
    pub fn live_generator_matrix(&self) -> BitMatrix {
        let live = self.live_qubits();
        let ops: Vec<SymplecticOp> = self.generators().iter().map(|g| g.select(&live)).collect();
        generator_matrix(live.len(), &ops)
    }

    /// `n_live - rank(generators)`.
    pub fn logical_count_by_rank(&self) -> usize {
        self.live_qubits().len() - self.live_generator_matrix().rank()
    }

    pub fn defect_logical_count(&self) -> usize {
        self.new_logical_x.rows().max(self.new_logical_z.rows())
    }

    pub fn max_generator_weight(&self) -> usize {
        self.generators().iter().map(SymplecticOp::weight).max().unwrap_or(0)
    }

    /// Anticommuting generator pairs (empty for a valid code).
    pub fn commutation_violations(&self, exec: Execution) -> Vec<(usize, usize)> {
        symplectic::anticommuting_pairs(&self.generators(), exec)
    }

    /// Generators touching a measured-out qubit with the anticommuting type.
    pub fn measured_support_violations(&self) -> Vec<usize> {
        let gens = self.generators();
        let n = self.n_qubits();
        let probes: Vec<SymplecticOp> = self
            .measured_out
            .iter()
            .map(|m| match m.basis {
                Basis::X => SymplecticOp::single(n, m.qubit, crate::symplectic::Pauli::X),
                Basis::Z => SymplecticOp::single(n, m.qubit, crate::symplectic::Pauli::Z),
            })
            .collect();
        (0..gens.len())
            .filter(|&i| probes.iter().any(|p| p.anticommutes(&gens[i])))
            .collect()
    }
}

/// Applies a puncture. Fails unless the sets are correctable or `force` is set.
pub fn apply_puncture(code: &HgpCode, spec: &PunctureSpec, force: bool) -> Result<DeformedCode, DefectError> {
    let report = check_correctable(code, spec);
    if !force && !report.correctable {
        return Err(DefectError::NotCorrectable(report.failures().join("; ")));
    }
    let (hx_p, hz_p) = puncture_stabilizers(code, spec);
    let sx_full = code.hx().add(&hx_p).expect("same shape");
    let sz_full = code.hz().add(&hz_p).expect("same shape");
    let (sx, sx_ids) = sx_full.drop_zero_rows();
    let (sz, sz_ids) = sz_full.drop_zero_rows();
    let dropped = |ids: &[usize], total: usize| -> Vec<usize> {
        (0..total).filter(|i| ids.binary_search(i).is_err()).collect()
    };
    let basis = spec.measurement_basis;
    let (lx, lz) = puncture_logical_bases(code, spec);
    let deformed = DeformedCode {
        base: code.clone(),
        kind: match spec.kind {
            PunctureKind::Smooth => DefectKind::Smooth,
            PunctureKind::Rough => DefectKind::Rough,
        },
        dropped_x: dropped(&sx_ids, sx_full.rows()),
        dropped_z: dropped(&sz_ids, sz_full.rows()),
        sx,
        sx_ids,
        sz,
        sz_ids,
        measured_out: spec
            .interior_qubits
            .iter()
            .map(|&qubit| MeasuredQubit { qubit, basis })
            .collect(),
        hybrids: Vec::new(),
        two_qubit: Vec::new(),
        new_logical_x: lx,
        new_logical_z: lz,
    };
    if !deformed.sx.matmul(&deformed.sz.transpose())?.is_zero() {
        return Err(DefectError::Invalid("sx * sz^t != 0".into()));
    }
    let bad = deformed.measured_support_violations();
    if !bad.is_empty() {
        return Err(DefectError::Invalid(format!(
            "generators {bad:?} anticommute with an interior measurement"
        )));
    }
    Ok(deformed)
}

/// Z loops of a smooth puncture: `(G ⊗ g)·hz'` with `G ∈ ker h[T,B]ᵗ` on `T`
/// and `g ∈ ker h[A,S]` on `S`.
fn smooth_loops(code: &HgpCode, spec: &PunctureSpec) -> BitMatrix {
    let h = code.h();
    let (m, n) = h.shape();
    let InducedSets { a, b, .. } = &spec.induced;
    let big_g = h.submatrix(spec.t.members(), b.members()).transpose().kernel_basis();
    let small_g = h.submatrix(a.members(), spec.s.members()).kernel_basis();
    let (_, hz_p) = smooth_primes(code, &spec.s, &spec.t, &spec.induced);
    let mut rows = Vec::with_capacity(big_g.rows() * small_g.rows());
    for gt in big_g.iter_rows() {
        let gt = gt.embed(m, spec.t.members());
        for gs in small_g.iter_rows() {
            let gs = gs.embed(n, spec.s.members());
            let coeff = BitMatrix::from_rows(m, vec![gt.clone()])
                .kron(&BitMatrix::from_rows(n, vec![gs]));
            rows.push(hz_p.left_mul_vec(coeff.row(0)).expect("coefficient length m*n"));
        }
    }
    BitMatrix::from_rows(code.n_qubits(), rows)
}

/// Chain candidates and the greedy reduction that selects chain logicals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainReduction {
    /// Candidate rows restricted to live qubits, in lexicographic support order.
    pub candidates: BitMatrix,
    /// Number of candidates from the VV block and from the CC block.
    pub vv_candidates: usize,
    pub cc_candidates: usize,
    /// Indices into `candidates` kept by greedy rank extension.
    pub selected: Vec<usize>,
    /// Rank of the seed `rs(sx) + embedded X logicals + Ω_X`, on live qubits.
    pub seed_rank: usize,
    pub rule: &'static str,
}

impl ChainReduction {
    pub fn basis(&self) -> BitMatrix {
        self.candidates.select_rows(&self.selected)
    }
}

pub const REDUCTION_RULE: &str =
    "greedy rank extension over lexicographically sorted candidates, seeded with rs(sx), embedded X logicals and Omega_X";

fn smooth_chains(code: &HgpCode, spec: &PunctureSpec) -> ChainReduction {
    let h = code.h();
    let (m, n) = h.shape();
    let nq = code.n_qubits();
    let InducedSets { n: big_n, a, m: big_m, b } = &spec.induced;
    let t_c = spec.t.complement(m);
    let s_c = spec.s.complement(n);
    let interior = spec.interior_mask(nq);
    let nn = n * n;

    let ker_t_c = h.select_rows(t_c.members()).kernel_basis();
    let q_a = h.submatrix(a.members(), spec.s.members()).quotient_basis();
    let q_b = h.submatrix(spec.t.members(), b.members()).transpose().quotient_basis();
    let ker_s_c = h.select_cols(s_c.members()).transpose().kernel_basis();

    let mut vv = Vec::new();
    for x in ker_t_c.iter_rows() {
        for q in q_a.iter_rows() {
            let q = q.embed(n, spec.s.members());
            let blk = BitMatrix::from_rows(n, vec![x.clone()]).kron(&BitMatrix::from_rows(n, vec![q]));
            let mut row = blk.row(0).embed(nq, &(0..nn).collect::<Vec<_>>());
            row.clear_mask(&interior);
            vv.push(row);
        }
    }
    let mut cc = Vec::new();
    for q in q_b.iter_rows() {
        let q = q.embed(m, spec.t.members());
        for y in ker_s_c.iter_rows() {
            let blk = BitMatrix::from_rows(m, vec![q.clone()]).kron(&BitMatrix::from_rows(m, vec![y.clone()]));
            let mut row = blk.row(0).embed(nq, &(nn..nq).collect::<Vec<_>>());
            row.clear_mask(&interior);
            cc.push(row);
        }
    }
    let (vv_count, cc_count) = (vv.len(), cc.len());
    let mut all: Vec<BitVec> = vv.into_iter().chain(cc).collect();
    all.sort_by_key(|r| r.support());
    let candidates = BitMatrix::from_rows(nq, all);

    // Seed: rs(sx), embedded X logicals, Ω_X = ker(hz ; O_Z), all on live qubits.
    let (hx_p, _) = smooth_primes(code, &spec.s, &spec.t, &spec.induced);
    let sx = code.hx().add(&hx_p).expect("same shape");
    let o_z = h
        .mask_cols(big_m.members())
        .kron(&diag(n, &spec.s))
        .hstack(&diag(m, &spec.t).kron(&h.mask_rows(big_n.members()).transpose()))
        .expect("block shapes agree");
    let omega = code.hz().vstack(&o_z).expect("same width").kernel_basis();
    let mut seed_rows: Vec<BitVec> = sx.into_rows();
    for r in code.embedded_logical_x_basis().iter_rows().chain(omega.iter_rows()) {
        let mut r = r.clone();
        r.clear_mask(&interior);
        seed_rows.push(r);
    }
    let seed = BitMatrix::from_rows(nq, seed_rows);
    let selected = greedy_extension(&seed, &candidates);
    ChainReduction {
        seed_rank: seed.rank(),
        candidates,
        vv_candidates: vv_count,
        cc_candidates: cc_count,
        selected,
        rule: REDUCTION_RULE,
    }
}

/// Loop-type defect logicals: Z loops (smooth) or X loops (rough).
pub fn puncture_loops(code: &HgpCode, spec: &PunctureSpec) -> BitMatrix {
    match spec.kind {
        PunctureKind::Smooth => smooth_loops(code, spec),
        PunctureKind::Rough => {
            permute_rows(&smooth_loops(code, &spec.smooth_twin(code)), &code.transpose_permutation())
        }
    }
}

/// Chain-type defect logicals with the reduction record.
pub fn puncture_chains(code: &HgpCode, spec: &PunctureSpec) -> ChainReduction {
    match spec.kind {
        PunctureKind::Smooth => smooth_chains(code, spec),
        PunctureKind::Rough => {
            let perm = code.transpose_permutation();
            let mut red = smooth_chains(code, &spec.smooth_twin(code));
            // τ preserves the chosen span; re-sort to keep the candidate order rule.
            let basis = permute_rows(&red.basis(), &perm);
            let mut rows: Vec<BitVec> = permute_rows(&red.candidates, &perm).into_rows();
            rows.sort_by_key(|r| r.support());
            let cands = BitMatrix::from_rows(code.n_qubits(), rows);
            red.selected = basis
                .iter_rows()
                .map(|r| cands.iter_rows().position(|c| c == r).expect("image is a candidate"))
                .collect();
            red.selected.sort_unstable();
            red.candidates = cands;
            std::mem::swap(&mut red.vv_candidates, &mut red.cc_candidates);
            red
        }
    }
}

/// `(X basis, Z basis)` of the defect logicals.
pub fn puncture_logical_bases(code: &HgpCode, spec: &PunctureSpec) -> (BitMatrix, BitMatrix) {
    let loops = puncture_loops(code, spec);
    let chains = puncture_chains(code, spec).basis();
    match spec.kind {
        PunctureKind::Smooth => (chains, loops),
        PunctureKind::Rough => (loops, chains),
    }
}

pub fn puncture_logical_z_basis(code: &HgpCode, spec: &PunctureSpec) -> BitMatrix {
    puncture_logical_bases(code, spec).1
}

pub fn puncture_logical_x_basis(code: &HgpCode, spec: &PunctureSpec) -> BitMatrix {
    puncture_logical_bases(code, spec).0
}

/// Re-expresses `xs` as the dual basis of `zs`: row `i` of the result
/// anticommutes with `zs[i]` only. `None` if the Gram matrix is singular.
pub fn dual_pairing(zs: &BitMatrix, xs: &BitMatrix) -> Option<BitMatrix> {
    if zs.rows() != xs.rows() {
        return None;
    }
    let g = css_gram(zs, xs);
    let inv = invert(&g)?;
    // (G⁻¹)ᵗ · xs pairs row i with zs[i].
    inv.transpose().matmul(xs).ok()
}

/// Inverse of a square GF(2) matrix.
pub fn invert(g: &BitMatrix) -> Option<BitMatrix> {
    let k = g.rows();
    if g.cols() != k {
        return None;
    }
    let ech = g.echelon();
    (ech.rank() == k).then_some(ech.transform)
}

/// Checks the Table-1 sets of a spec against a direct recomputation.
pub fn table_sets_consistent(code: &HgpCode, spec: &PunctureSpec) -> bool {
    let interior: std::collections::BTreeSet<usize> = spec.interior_qubits.iter().copied().collect();
    let boundary: std::collections::BTreeSet<usize> = spec.boundary_qubits.iter().copied().collect();
    interior.is_disjoint(&boundary)
        && interior.len() == spec.induced.b.len() * spec.s.len() + spec.t.len() * spec.induced.a.len()
        && spec.s.side == Side::Variable
        && spec.t.side == Side::Check
        && spec.removed_stabs.len() == spec.s.len() * spec.t.len()
        && code.n_qubits() > 0
}
