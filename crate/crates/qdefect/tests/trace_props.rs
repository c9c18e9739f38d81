use proptest::prelude::*;
use qdefect::hgp::{repetition_code, HgpCode};
use qdefect::par::Execution;
use qdefect::trace::{connecting_qubit, eulerian_traceable, is_euler_trail, move_point_puncture, Multigraph};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn multigraph() -> impl Strategy<Value = Multigraph> {
    (1..=7usize).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..=10).prop_map(move |edges| Multigraph::new(n, edges))
    })
}

/// Even degrees and all edges in one component.
fn criterion(g: &Multigraph) -> bool {
    g.degrees().iter().all(|d| d % 2 == 0) && g.edges_connected()
}

/// Independent connectivity check by union-find over edge endpoints.
fn edges_connected(g: &Multigraph) -> bool {
    let mut parent: Vec<usize> = (0..g.n_vertices).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for &(a, b) in &g.edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let mut roots: Vec<usize> = g.edges.iter().map(|&(a, _)| find(&mut parent, a)).collect();
    roots.dedup();
    roots.sort_unstable();
    roots.dedup();
    roots.len() <= 1
}

/// A random walk over Z stabilizers that never reuses a connecting qubit.
fn random_path(code: &HgpCode, rng: &mut ChaCha8Rng, len: usize) -> Vec<(usize, usize)> {
    let mut path: Vec<(usize, usize)> = vec![(0, 0)];
    let mut used = Vec::new();
    while path.len() <= len {
        let (c, v) = *path.last().unwrap();
        let mut options: Vec<((usize, usize), usize)> = [(c.wrapping_sub(1), v), (c + 1, v), (c, v.wrapping_sub(1)), (c, v + 1)]
            .into_iter()
            .filter(|&(a, b)| a < code.m() && b < code.n())
            .filter_map(|next| connecting_qubit(code, (c, v), next).map(|q| (next, q)))
            .filter(|(_, q)| !used.contains(q))
            .collect();
        options.shuffle(rng);
        let Some(&(next, q)) = options.first() else { break };
        used.push(q);
        path.push(next);
    }
    path
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eulerian_matches_degree_criterion(g in multigraph()) {
        let v = eulerian_traceable(&g);
        prop_assert_eq!(g.edges_connected(), edges_connected(&g));
        prop_assert_eq!(v.traceable, criterion(&g));
        match &v.cycle {
            Some(c) => prop_assert!(is_euler_trail(&g, c, true)),
            None => prop_assert!(!v.traceable),
        }
        if let Some(t) = &v.open_trail {
            prop_assert!(is_euler_trail(&g, t, false));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn point_puncture_moves_follow_the_step_law(seed in any::<u64>(), n in 3usize..=5) {
        let code = HgpCode::build(&repetition_code(n)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let path = random_path(&code, &mut rng, 8);
        prop_assume!(path.len() >= 2);
        let t = move_point_puncture(&code, &path, Execution::Sequential).unwrap();
        prop_assert_eq!(t.steps.len(), path.len() - 1);
        for s in &t.steps {
            prop_assert_eq!(s.beta_increment.clone(), vec![s.qubit]);
            prop_assert!(s.frustrated.len() <= t.frustration_bound);
            prop_assert!(s.matches_direct);
        }
    }
}
