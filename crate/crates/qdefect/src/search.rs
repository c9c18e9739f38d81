//! Bounded-weight exhaustive search over sums of per-qubit signatures.
//!
//! Each qubit offers a few elementary choices (for example X, Y, Z), each with
//! a signature vector. A weight-`w` candidate picks `w` distinct qubits and one
//! choice per qubit; its signature is the XOR of the picked signatures.
//! Candidates are visited by increasing weight, then lexicographically by
//! `(qubit, choice)` sequence, so the first hit is the same under every
//! [`Execution`].

use crate::f2::BitVec;
use crate::par::{self, Execution};

/// One elementary choice on a qubit.
#[derive(Clone, Debug)]
pub struct Choice {
    pub qubit: usize,
    pub label: usize,
    pub signature: BitVec,
}

/// Outcome of a bounded search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// The lexicographically first minimum-weight hit, as `(qubit, label)` pairs.
    Found(Vec<(usize, usize)>),
    /// Nothing of weight `<= budget` satisfies the predicate.
    Exhausted { budget: usize },
}

/// Searches for the lowest-weight combination whose signature satisfies `accept`.
///
/// `choices[q]` lists the elementary choices on qubit `q`.
pub fn min_weight_search<F>(
    choices: &[Vec<Choice>],
    sig_len: usize,
    budget: usize,
    accept: F,
    exec: Execution,
) -> SearchOutcome
where
    F: Fn(&BitVec) -> bool + Sync,
{
    let qubits: Vec<usize> = (0..choices.len()).filter(|&q| !choices[q].is_empty()).collect();
    for w in 1..=budget.min(qubits.len()) {
        let hit = par::find_map_first(exec, qubits.len(), |first| {
            let mut picks = Vec::with_capacity(w);
            let mut acc = BitVec::zeros(sig_len);
            dfs(choices, &qubits, first, w, &mut picks, &mut acc, &accept)
        });
        if let Some(h) = hit {
            return SearchOutcome::Found(h);
        }
    }
    SearchOutcome::Exhausted { budget }
}

fn dfs<F>(
    choices: &[Vec<Choice>],
    qubits: &[usize],
    pos: usize,
    remaining: usize,
    picks: &mut Vec<(usize, usize)>,
    acc: &mut BitVec,
    accept: &F,
) -> Option<Vec<(usize, usize)>>
where
    F: Fn(&BitVec) -> bool,
{
    if qubits.len() - pos < remaining {
        return None;
    }
    let q = qubits[pos];
    for choice in &choices[q] {
        acc.xor_assign(&choice.signature);
        picks.push((choice.qubit, choice.label));
        let found = if remaining == 1 {
            accept(acc).then(|| picks.clone())
        } else {
            ((pos + 1)..qubits.len())
                .find_map(|next| dfs(choices, qubits, next, remaining - 1, picks, acc, accept))
        };
        picks.pop();
        acc.xor_assign(&choice.signature);
        if found.is_some() {
            return found;
        }
    }
    None
}
