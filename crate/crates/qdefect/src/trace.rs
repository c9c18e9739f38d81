//! Traceability of logical operators by point-like punctures.
//!
//! For a pure X or Z operator `Q`, the graph `G_Q` has a vertex per
//! opposite-type stabilizer touching `supp Q` and an edge per qubit of
//! `supp Q` joining the stabilizers that touch it. A qubit touched by a single
//! stabilizer is joined to a virtual boundary vertex.

use serde::{Deserialize, Serialize};

use crate::defect::Basis;
use crate::deform::{measure_round, RoundOptions, StabilizerState};
use crate::error::TraceError;
use crate::f2::{BitMatrix, BitVec};
use crate::hgp::HgpCode;
use crate::par::Execution;
use crate::symplectic::{op_span, Pauli, SymplecticOp};

/// An undirected multigraph. Self-loops count twice toward degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multigraph {
    pub n_vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Multigraph {
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>) -> Self {
        assert!(edges.iter().all(|&(a, b)| a < n_vertices && b < n_vertices), "edge endpoint out of range");
        Self { n_vertices, edges }
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n_vertices];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    /// Incident edge ids per vertex, ascending; a self-loop appears twice.
    fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n_vertices];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            inc[a].push(e);
            inc[b].push(e);
        }
        inc
    }

    /// True if all edges lie in one connected component.
    pub fn edges_connected(&self) -> bool {
        let Some(&(start, _)) = self.edges.first() else {
            return true;
        };
        let inc = self.incidence();
        let mut seen = vec![false; self.n_vertices];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &e in &inc[v] {
                let (a, b) = self.edges[e];
                let w = if a == v { b } else { a };
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        self.edges.iter().all(|&(a, _)| seen[a])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "lowercase")]
pub enum Vertex {
    Stabilizer(usize),
    Boundary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalGraph {
    /// Pauli type of the operator; vertices are stabilizers of the other type.
    pub basis: Basis,
    pub vertices: Vec<Vertex>,
    /// `(qubit, endpoint, endpoint)` with endpoints indexing `vertices`.
    pub edges: Vec<(usize, usize, usize)>,
}

impl LogicalGraph {
    pub fn multigraph(&self) -> Multigraph {
        Multigraph::new(self.vertices.len(), self.edges.iter().map(|&(_, a, b)| (a, b)).collect())
    }

    pub fn qubits(&self) -> Vec<usize> {
        self.edges.iter().map(|e| e.0).collect()
    }
}

/// `G_Q` for a pure X or Z operator against the code's opposite stabilizers.
pub fn build_logical_graph(code: &HgpCode, q: &SymplecticOp) -> Result<LogicalGraph, TraceError> {
    if let Some(y) = q.x.iter_ones().find(|&i| q.z.get(i)) {
        return Err(TraceError::YSupport(y));
    }
    let (basis, support, stabs) = match (q.x.is_zero(), q.z.is_zero()) {
        (true, true) => {
            return Ok(LogicalGraph { basis: Basis::Z, vertices: Vec::new(), edges: Vec::new() });
        }
        (false, false) => return Err(TraceError::MixedType),
        (true, false) => (Basis::Z, &q.z, code.hx()),
        (false, true) => (Basis::X, &q.x, code.hz()),
    };
    build_from_stabilizers(basis, support, stabs)
}

/// `G_Q` over an explicit opposite-type stabilizer matrix.
pub fn build_from_stabilizers(basis: Basis, support: &BitVec, stabs: &BitMatrix) -> Result<LogicalGraph, TraceError> {
    let mut touching = Vec::new();
    for q in support.iter_ones() {
        let adj: Vec<usize> = (0..stabs.rows()).filter(|&s| stabs.get(s, q)).collect();
        match adj.len() {
            0 => return Err(TraceError::IsolatedQubit(q)),
            1 | 2 => touching.push((q, adj)),
            d => return Err(TraceError::Hyperedge { qubit: q, degree: d }),
        }
    }
    let mut ids: Vec<usize> = touching.iter().flat_map(|(_, a)| a.iter().copied()).collect();
    ids.sort_unstable();
    ids.dedup();
    let mut vertices: Vec<Vertex> = ids.iter().map(|&s| Vertex::Stabilizer(s)).collect();
    let needs_boundary = touching.iter().any(|(_, a)| a.len() == 1);
    let boundary = vertices.len();
    if needs_boundary {
        vertices.push(Vertex::Boundary);
    }
    let index = |s: usize| ids.binary_search(&s).expect("collected above");
    let edges = touching
        .iter()
        .map(|(q, a)| match a.as_slice() {
            [s] => (*q, index(*s), boundary),
            [s, t] => (*q, index(*s), index(*t)),
            _ => unreachable!("degree checked"),
        })
        .collect();
    Ok(LogicalGraph { basis, vertices, edges })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerVerdict {
    /// All degrees even and edges connected.
    pub traceable: bool,
    /// Closed trail over every edge, as edge ids.
    pub cycle: Option<Vec<usize>>,
    /// Open trail over every edge when exactly two vertices have odd degree.
    pub open_trail: Option<Vec<usize>>,
}

/// Eulerian cycle (or open trail) by Hierholzer's method, starting at the
/// lowest-index eligible vertex and always taking the lowest-index unused edge.
pub fn eulerian_traceable(g: &Multigraph) -> EulerVerdict {
    let degrees = g.degrees();
    let odd: Vec<usize> = (0..g.n_vertices).filter(|&v| degrees[v] % 2 == 1).collect();
    let connected = g.edges_connected();
    let traceable = connected && odd.is_empty();
    if g.edges.is_empty() {
        return EulerVerdict { traceable: true, cycle: Some(Vec::new()), open_trail: None };
    }
    let start = if traceable {
        (0..g.n_vertices).find(|&v| degrees[v] > 0)
    } else if connected && odd.len() == 2 {
        Some(odd[0])
    } else {
        None
    };
    let trail = start.map(|s| hierholzer(g, s));
    if traceable {
        EulerVerdict { traceable, cycle: trail, open_trail: None }
    } else {
        EulerVerdict { traceable, cycle: None, open_trail: trail }
    }
}

fn hierholzer(g: &Multigraph, start: usize) -> Vec<usize> {
    let inc = g.incidence();
    let mut used = vec![false; g.edges.len()];
    let mut next = vec![0usize; g.n_vertices];
    // Stack of (vertex, edge used to arrive).
    let mut stack: Vec<(usize, Option<usize>)> = vec![(start, None)];
    let mut out = Vec::with_capacity(g.edges.len());
    while let Some(&(v, via)) = stack.last() {
        while next[v] < inc[v].len() && used[inc[v][next[v]]] {
            next[v] += 1;
        }
        if next[v] == inc[v].len() {
            stack.pop();
            if let Some(e) = via {
                out.push(e);
            }
            continue;
        }
        let e = inc[v][next[v]];
        used[e] = true;
        let (a, b) = g.edges[e];
        stack.push((if a == v { b } else { a }, Some(e)));
    }
    out.reverse();
    out
}

/// True if `trail` walks every edge once, consecutively adjacent, and is
/// closed when `closed` is set.
pub fn is_euler_trail(g: &Multigraph, trail: &[usize], closed: bool) -> bool {
    if trail.len() != g.edges.len() {
        return false;
    }
    let mut seen = vec![false; g.edges.len()];
    if trail.iter().any(|&e| std::mem::replace(&mut seen[e], true)) {
        return false;
    }
    if trail.is_empty() {
        return true;
    }
    // Try both orientations of the first edge.
    let (a0, b0) = g.edges[trail[0]];
    [(a0, b0), (b0, a0)].into_iter().any(|(start, mut at)| {
        for &e in &trail[1..] {
            let (a, b) = g.edges[e];
            at = if a == at {
                b
            } else if b == at {
                a
            } else {
                return false;
            };
        }
        !closed || at == start
    })
}

/// One step of a point-puncture move.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveStep {
    pub from: (usize, usize),
    pub to: (usize, usize),
    /// Qubit measured in the growth phase.
    pub qubit: usize,
    /// `supp(β_{j+1} ⊕ β_j)`.
    pub beta_increment: Vec<usize>,
    pub beta_weight: usize,
    /// `|β_{j+1} ⊕ β_0|`.
    pub trail_weight: usize,
    /// Base Z stabilizers other than the puncture anticommuting with β.
    pub frustrated: Vec<usize>,
    /// Heaviest generator in the state after the step.
    pub max_generator_weight: usize,
    /// State group equals the directly derived group.
    pub matches_direct: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveTranscript {
    pub start: Option<(usize, usize)>,
    pub beta_initial: Vec<usize>,
    pub steps: Vec<MoveStep>,
    /// `(max qubit degree in hz) - 1`.
    pub frustration_bound: usize,
    pub closed: bool,
    /// No frustrated stabilizers after the last step.
    pub restored: bool,
    pub beta_final: Vec<usize>,
}

/// Lowest qubit shared by two Z stabilizers.
pub fn connecting_qubit(code: &HgpCode, a: (usize, usize), b: (usize, usize)) -> Option<usize> {
    let ra = code.hz().row(code.z_stab(a.0, a.1));
    let rb = code.hz().row(code.z_stab(b.0, b.1));
    ra.iter_ones().find(|&q| rb.get(q))
}

fn z_stab_checked(code: &HgpCode, index: usize, (c, v): (usize, usize)) -> Result<usize, TraceError> {
    if c >= code.m() || v >= code.n() {
        return Err(TraceError::OutOfRange { index, check: c, var: v });
    }
    Ok(code.z_stab(c, v))
}

/// Drags a point puncture (one removed Z stabilizer) along `path`, recording
/// the growth of its conjugate X logical `β`.
pub fn move_point_puncture(code: &HgpCode, path: &[(usize, usize)], exec: Execution) -> Result<MoveTranscript, TraceError> {
    let n = code.n_qubits();
    let hz = code.hz();
    let frustration_bound = hz.max_col_weight().saturating_sub(1);
    let Some(&p0) = path.first() else {
        return Ok(MoveTranscript {
            start: None,
            beta_initial: Vec::new(),
            steps: Vec::new(),
            frustration_bound,
            closed: false,
            restored: true,
            beta_final: Vec::new(),
        });
    };
    let ids = path
        .iter()
        .enumerate()
        .map(|(i, &p)| z_stab_checked(code, i, p))
        .collect::<Result<Vec<_>, _>>()?;
    let qubits = path
        .windows(2)
        .enumerate()
        .map(|(i, w)| connecting_qubit(code, w[0], w[1]).ok_or(TraceError::NotAdjacent(i, i + 1)))
        .collect::<Result<Vec<_>, _>>()?;

    let base = StabilizerState::from_code(code, 0)?;
    let x_rows = code.hx().rows();
    let mut target = base.stabilizers.clone();
    target.remove(x_rows + ids[0]);
    let opts = RoundOptions { target: Some(&target), conjugate_budget: None, exec };
    let (mut state, first) = measure_round(&base, &[], &opts)?;
    let beta0 = first.promoted[0].conjugate.x.clone();
    let mut beta = beta0.clone();
    let x_stabs = crate::symplectic::x_ops(code.hx());
    let z_all = crate::symplectic::z_ops(hz);

    let frustrated_of = |beta: &BitVec, current: usize| -> Vec<usize> {
        (0..hz.rows()).filter(|&z| z != current && hz.row(z).dot(beta)).collect()
    };
    let mut steps = Vec::with_capacity(qubits.len());
    for (j, &q) in qubits.iter().enumerate() {
        let grow = [SymplecticOp::single(n, q, Pauli::X)];
        let (s1, _) = measure_round(&state, &grow, &RoundOptions { exec, ..Default::default() })?;
        let shrink = [z_all[ids[j]].clone()];
        let (s2, _) = measure_round(&s1, &shrink, &RoundOptions { exec, ..Default::default() })?;
        state = s2;
        // β is the X member of the pair whose Z member is the puncture.
        let pair = state.logicals.last().expect("puncture pair persists");
        let next_beta = pair.x.x.clone();
        let increment = next_beta.xor(&beta).support();
        beta = next_beta;
        let frustrated = frustrated_of(&beta, ids[j + 1]);
        let direct = direct_group(n, &x_stabs, &z_all, &beta);
        steps.push(MoveStep {
            from: path[j],
            to: path[j + 1],
            qubit: q,
            beta_increment: increment,
            beta_weight: beta.weight(),
            trail_weight: beta.xor(&beta0).weight(),
            frustrated,
            max_generator_weight: state.stabilizers.iter().map(SymplecticOp::weight).max().unwrap_or(0),
            matches_direct: crate::deform::same_group(n, &state.stabilizers, &direct),
        });
    }
    let closed = path.len() > 1 && path.first() == path.last();
    Ok(MoveTranscript {
        start: Some(p0),
        beta_initial: beta0.support(),
        restored: steps.last().is_none_or(|s| s.frustrated.is_empty()),
        steps,
        frustration_bound,
        closed,
        beta_final: beta.support(),
    })
}

/// `⟨X stabilizers⟩ ⊕ (span(Z stabilizers) ∩ β^⊥)`.
pub fn direct_group(n: usize, x_stabs: &[SymplecticOp], z_stabs: &[SymplecticOp], beta: &BitVec) -> Vec<SymplecticOp> {
    let mut out = x_stabs.to_vec();
    let pivot = z_stabs.iter().position(|z| z.z.dot(beta));
    for (i, z) in z_stabs.iter().enumerate() {
        match pivot {
            Some(p) if z.z.dot(beta) && i != p => out.push(z.mul(&z_stabs[p])),
            Some(p) if i == p => {}
            _ => out.push(z.clone()),
        }
    }
    debug_assert!(op_span(n, &out).rank() <= 2 * n);
    out
}
