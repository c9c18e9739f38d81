//! Bipartite factor graphs, neighbourhoods, ancestors and the induced sets
//! `(N, A, M, B)` of a puncture.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{AlistError, GraphError};
use crate::f2::BitMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Variable,
    Check,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Variable => Side::Check,
            Side::Check => Side::Variable,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Side::Variable => "variable",
            Side::Check => "check",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A sorted, duplicate-free set of nodes on one side of a factor graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeSet {
    pub side: Side,
    members: Vec<usize>,
}

impl NodeSet {
    pub fn new(side: Side, members: impl IntoIterator<Item = usize>) -> Self {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Self { side, members }
    }

    pub fn vars(members: impl IntoIterator<Item = usize>) -> Self {
        Self::new(Side::Variable, members)
    }

    pub fn checks(members: impl IntoIterator<Item = usize>) -> Self {
        Self::new(Side::Check, members)
    }

    pub fn empty(side: Side) -> Self {
        Self::new(side, [])
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn is_subset_of(&self, other: &NodeSet) -> bool {
        self.side == other.side && self.members.iter().all(|&i| other.contains(i))
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        assert_eq!(self.side, other.side, "union across sides");
        NodeSet::new(self.side, self.members.iter().chain(&other.members).copied())
    }

    pub fn intersection(&self, other: &NodeSet) -> NodeSet {
        assert_eq!(self.side, other.side, "intersection across sides");
        NodeSet::new(
            self.side,
            self.members.iter().copied().filter(|&i| other.contains(i)),
        )
    }

    pub fn difference(&self, other: &NodeSet) -> NodeSet {
        assert_eq!(self.side, other.side, "difference across sides");
        NodeSet::new(
            self.side,
            self.members.iter().copied().filter(|&i| !other.contains(i)),
        )
    }

    /// Complement within `0..size`.
    pub fn complement(&self, size: usize) -> NodeSet {
        NodeSet::new(self.side, (0..size).filter(|&i| !self.contains(i)))
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }
}

/// The four sets induced by a puncture `(S, T)`.
///
/// `N = Γ(S)`, `A = Γ⁻¹(S)`, `M = Γ(T)`, `B = Γ⁻¹(T)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedSets {
    pub n: NodeSet,
    pub a: NodeSet,
    pub m: NodeSet,
    pub b: NodeSet,
}

/// Bipartite graph between variables `V = 0..n_vars` and checks `C = 0..n_checks`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorGraph {
    n_vars: usize,
    n_checks: usize,
    check_adj: Vec<Vec<usize>>,
    var_adj: Vec<Vec<usize>>,
}

impl FactorGraph {
    /// Graph of the parity-check matrix `h` (checks are rows, variables columns).
    pub fn from_matrix(h: &BitMatrix) -> Self {
        let check_adj: Vec<Vec<usize>> = h.iter_rows().map(|r| r.support()).collect();
        Self::from_check_adjacency(h.cols(), check_adj)
    }

    /// # Panics
    /// If an adjacency entry is out of range.
    pub fn from_check_adjacency(n_vars: usize, mut check_adj: Vec<Vec<usize>>) -> Self {
        let mut var_adj = vec![Vec::new(); n_vars];
        for (c, vars) in check_adj.iter_mut().enumerate() {
            vars.sort_unstable();
            vars.dedup();
            for &v in vars.iter() {
                assert!(v < n_vars, "variable {v} out of range {n_vars}");
                var_adj[v].push(c);
            }
        }
        Self {
            n_vars,
            n_checks: check_adj.len(),
            check_adj,
            var_adj,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    pub fn check_neighbors(&self, c: usize) -> &[usize] {
        &self.check_adj[c]
    }

    pub fn var_neighbors(&self, v: usize) -> &[usize] {
        &self.var_adj[v]
    }

    fn neighbors(&self, side: Side, i: usize) -> &[usize] {
        match side {
            Side::Variable => &self.var_adj[i],
            Side::Check => &self.check_adj[i],
        }
    }

    pub fn side_size(&self, side: Side) -> usize {
        match side {
            Side::Variable => self.n_vars,
            Side::Check => self.n_checks,
        }
    }

    pub fn to_matrix(&self) -> BitMatrix {
        BitMatrix::from_supports(self.n_vars, &self.check_adj)
    }

    fn validate(&self, s: &NodeSet) -> Result<(), GraphError> {
        let size = self.side_size(s.side);
        match s.members.last() {
            Some(&i) if i >= size => Err(GraphError::OutOfRange {
                side: s.side.name(),
                index: i,
                size,
            }),
            _ => Ok(()),
        }
    }

    /// `Γ(s)`: nodes on the opposite side adjacent to at least one member.
    pub fn neighborhood(&self, s: &NodeSet) -> Result<NodeSet, GraphError> {
        self.validate(s)?;
        Ok(NodeSet::new(
            s.side.opposite(),
            s.iter().flat_map(|i| self.neighbors(s.side, i).iter().copied()),
        ))
    }

    /// `Γ⁻¹(s)`: opposite-side nodes with a nonempty neighbourhood contained in `s`.
    pub fn ancestor(&self, s: &NodeSet) -> Result<NodeSet, GraphError> {
        self.validate(s)?;
        let other = s.side.opposite();
        Ok(NodeSet::new(
            other,
            (0..self.side_size(other)).filter(|&j| {
                let nb = self.neighbors(other, j);
                !nb.is_empty() && nb.iter().all(|&i| s.contains(i))
            }),
        ))
    }

    pub fn induced_sets(&self, s: &NodeSet, t: &NodeSet) -> Result<InducedSets, GraphError> {
        expect_side(s, Side::Variable)?;
        expect_side(t, Side::Check)?;
        let sets = InducedSets {
            n: self.neighborhood(s)?,
            a: self.ancestor(s)?,
            m: self.neighborhood(t)?,
            b: self.ancestor(t)?,
        };
        debug_assert!(self.neighborhood(&sets.a)?.is_subset_of(s));
        debug_assert!(self.neighborhood(&sets.b)?.is_subset_of(t));
        Ok(sets)
    }

    /// Members are adjacent when they share a neighbour; true iff that relation
    /// connects all of `s`.
    pub fn is_connected(&self, s: &NodeSet) -> Result<bool, GraphError> {
        self.validate(s)?;
        let Some(&start) = s.members.first() else {
            return Ok(true);
        };
        let mut seen = vec![false; self.side_size(s.side)];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut reached = 1;
        while let Some(i) = queue.pop_front() {
            for &j in self.neighbors(s.side, i) {
                for &k in self.neighbors(s.side.opposite(), j) {
                    if !seen[k] && s.contains(k) {
                        seen[k] = true;
                        reached += 1;
                        queue.push_back(k);
                    }
                }
            }
        }
        Ok(reached == s.len())
    }

    /// MacKay alist text. Neighbour lists are 1-indexed and zero-padded to the
    /// maximum degree, and never empty so that isolated nodes keep their line.
    pub fn to_alist(&self) -> String {
        let max_col = self.var_adj.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = self.check_adj.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = format!("{} {}\n{} {}\n", self.n_vars, self.n_checks, max_col, max_row);
        let join = |xs: Vec<String>| xs.join(" ");
        out.push_str(&join(self.var_adj.iter().map(|a| a.len().to_string()).collect()));
        out.push('\n');
        out.push_str(&join(self.check_adj.iter().map(|a| a.len().to_string()).collect()));
        out.push('\n');
        let padded = |adj: &[usize], width: usize| {
            let mut xs: Vec<String> = adj.iter().map(|i| (i + 1).to_string()).collect();
            xs.resize(width.max(1), "0".to_string());
            join(xs)
        };
        for adj in &self.var_adj {
            out.push_str(&padded(adj, max_col));
            out.push('\n');
        }
        for adj in &self.check_adj {
            out.push_str(&padded(adj, max_row));
            out.push('\n');
        }
        out
    }

    pub fn from_alist(text: &str) -> Result<Self, AlistError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or(AlistError::MissingSection("header"))?;
        let dims = parse_numbers(header, "header")
            .map_err(|_| AlistError::MalformedHeader(header.to_string()))?;
        let [n, m] = dims[..] else {
            return Err(AlistError::MalformedHeader(header.to_string()));
        };
        let maxes = next_numbers(&mut lines, "max degrees")?;
        if maxes.len() != 2 {
            return Err(AlistError::MalformedHeader(format!(
                "expected two maximum degrees, found {}",
                maxes.len()
            )));
        }
        let col_deg = next_numbers(&mut lines, "column degrees")?;
        if col_deg.len() != n {
            return Err(AlistError::DegreeMismatch {
                section: "column degrees",
                entry: 0,
                declared: n,
                found: col_deg.len(),
            });
        }
        let row_deg = next_numbers(&mut lines, "row degrees")?;
        if row_deg.len() != m {
            return Err(AlistError::DegreeMismatch {
                section: "row degrees",
                entry: 0,
                declared: m,
                found: row_deg.len(),
            });
        }
        let mut var_adj = Vec::with_capacity(n);
        for (v, &deg) in col_deg.iter().enumerate() {
            let adj = neighbor_list(&mut lines, "column neighbor lists", m, v, deg)?;
            var_adj.push(adj);
        }
        let mut check_adj = Vec::with_capacity(m);
        for (c, &deg) in row_deg.iter().enumerate() {
            let adj = neighbor_list(&mut lines, "row neighbor lists", n, c, deg)?;
            check_adj.push(adj);
        }
        let graph = FactorGraph::from_check_adjacency(n, check_adj);
        for (v, adj) in var_adj.iter_mut().enumerate() {
            adj.sort_unstable();
            if *adj != graph.var_adj[v] {
                return Err(AlistError::DegreeMismatch {
                    section: "column neighbor lists",
                    entry: v + 1,
                    declared: adj.len(),
                    found: graph.var_adj[v].len(),
                });
            }
        }
        Ok(graph)
    }
}

fn expect_side(s: &NodeSet, side: Side) -> Result<(), GraphError> {
    if s.side == side {
        Ok(())
    } else {
        Err(GraphError::SideMismatch {
            expected: side.name(),
            found: s.side.name(),
        })
    }
}

fn parse_numbers(line: &str, section: &'static str) -> Result<Vec<usize>, AlistError> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|_| AlistError::InvalidToken {
                section,
                token: tok.to_string(),
            })
        })
        .collect()
}

fn next_numbers<'a>(
    lines: &mut impl Iterator<Item = &'a str>,
    section: &'static str,
) -> Result<Vec<usize>, AlistError> {
    let line = lines.next().ok_or(AlistError::MissingSection(section))?;
    parse_numbers(line, section)
}

fn neighbor_list<'a>(
    lines: &mut impl Iterator<Item = &'a str>,
    section: &'static str,
    bound: usize,
    entry: usize,
    declared: usize,
) -> Result<Vec<usize>, AlistError> {
    let raw = next_numbers(lines, section)?;
    let mut adj = Vec::with_capacity(declared);
    for idx in raw.into_iter().filter(|&i| i != 0) {
        if idx > bound {
            return Err(AlistError::IndexOutOfRange {
                section,
                index: idx,
                bound,
            });
        }
        adj.push(idx - 1);
    }
    if adj.len() != declared {
        return Err(AlistError::DegreeMismatch {
            section,
            entry: entry + 1,
            declared,
            found: adj.len(),
        });
    }
    Ok(adj)
}
