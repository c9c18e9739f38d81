use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qdefect::fgraph::NodeSet;
use qdefect::hgp::{min_weight_logical, repetition_code, HgpCode};
use qdefect::par::Execution;
use qdefect::symplectic::anticommuting_pairs;
use qdefect::wormhole::apply_wormhole;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn distance_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("distance_search");
    group.sample_size(10);
    for n in [4, 5] {
        let code = HgpCode::build(&repetition_code(n)).unwrap();
        let lz = code.embedded_logical_z_basis();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, code.n_qubits()), &n, |b, &n| {
                b.iter(|| min_weight_logical(black_box(code.hz()), black_box(&lz), n, exec))
            });
        }
    }
    group.finish();
}

fn commutation_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("commutation_scan");
    for n in [9, 13] {
        let code = HgpCode::build(&repetition_code(n)).unwrap();
        let (_, d) = apply_wormhole(&code, &NodeSet::vars([1, 2]), &NodeSet::checks([n - 4, n - 3]), false).unwrap();
        let ops = d.generators();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, ops.len()), &ops, |b, ops| {
                b.iter(|| anticommuting_pairs(black_box(ops), exec))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, distance_search, commutation_scan);
criterion_main!(benches);
