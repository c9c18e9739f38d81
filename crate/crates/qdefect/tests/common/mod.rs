#![allow(dead_code)]

use qdefect::f2::BitMatrix;
use qdefect::fgraph::NodeSet;
use qdefect::hgp::HgpCode;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random check matrix with every row of weight `1..=max_row_weight`.
pub fn random_sparse(rng: &mut ChaCha8Rng, m: usize, n: usize, max_row_weight: usize) -> BitMatrix {
    let mut h = BitMatrix::zeros(m, n);
    for r in 0..m {
        let w = rng.gen_range(1..=max_row_weight.min(n));
        for c in sample(rng, n, w) {
            h.set(r, c, true);
        }
    }
    h
}

pub fn random_code(rng: &mut ChaCha8Rng, m_range: (usize, usize), n_range: (usize, usize), max_row_weight: usize) -> HgpCode {
    let m = rng.gen_range(m_range.0..=m_range.1);
    let n = rng.gen_range(n_range.0..=n_range.1);
    HgpCode::build(&random_sparse(rng, m, n, max_row_weight)).expect("rows are nonzero")
}

pub fn random_sets(rng: &mut ChaCha8Rng, code: &HgpCode, max_s: usize, max_t: usize) -> (NodeSet, NodeSet) {
    let ks = rng.gen_range(1..=max_s.min(code.n()));
    let kt = rng.gen_range(1..=max_t.min(code.m()));
    let s = NodeSet::vars(sample(rng, code.n(), ks));
    let t = NodeSet::checks(sample(rng, code.m(), kt));
    (s, t)
}
