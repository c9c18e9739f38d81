use proptest::prelude::*;
use qdefect::f2::{BitMatrix, BitVec};
use qdefect::fgraph::{FactorGraph, NodeSet};

fn graph() -> impl Strategy<Value = FactorGraph> {
    (1..=8usize, 1..=10usize).prop_flat_map(|(m, n)| {
        prop::collection::vec(prop::collection::vec(prop::bool::weighted(0.3), n), m).prop_map(move |rows| {
            FactorGraph::from_matrix(&BitMatrix::from_rows(n, rows.iter().map(|b| BitVec::from_bools(b)).collect()))
        })
    })
}

fn subset(size: usize, bits: &[bool]) -> Vec<usize> {
    (0..size).filter(|&i| bits[i]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn ancestor_neighbourhood_stays_inside(g in graph(), bits in prop::collection::vec(any::<bool>(), 10)) {
        let s = NodeSet::vars(subset(g.n_vars(), &bits));
        let a = g.ancestor(&s).unwrap();
        prop_assert!(g.neighborhood(&a).unwrap().is_subset_of(&s));
        prop_assert!(a.is_subset_of(&g.neighborhood(&s).unwrap()));
        let t = NodeSet::checks(subset(g.n_checks(), &bits));
        let b = g.ancestor(&t).unwrap();
        prop_assert!(g.neighborhood(&b).unwrap().is_subset_of(&t));
    }

    #[test]
    fn monotone(g in graph(), small in prop::collection::vec(any::<bool>(), 10), extra in prop::collection::vec(any::<bool>(), 10)) {
        let s = NodeSet::vars(subset(g.n_vars(), &small));
        let big = s.union(&NodeSet::vars(subset(g.n_vars(), &extra)));
        prop_assert!(g.neighborhood(&s).unwrap().is_subset_of(&g.neighborhood(&big).unwrap()));
        prop_assert!(g.ancestor(&s).unwrap().is_subset_of(&g.ancestor(&big).unwrap()));
    }

    #[test]
    fn complement_identities(g in graph(), sb in prop::collection::vec(any::<bool>(), 10), tb in prop::collection::vec(any::<bool>(), 10)) {
        let s = NodeSet::vars(subset(g.n_vars(), &sb));
        let t = NodeSet::checks(subset(g.n_checks(), &tb));
        let ind = g.induced_sets(&s, &t).unwrap();
        // Nodes outside an ancestor set either touch the complement or touch nothing.
        let isolated_checks = NodeSet::checks((0..g.n_checks()).filter(|&c| g.check_neighbors(c).is_empty()));
        let outside_a = ind.a.complement(g.n_checks());
        let via_complement = g.neighborhood(&s.complement(g.n_vars())).unwrap().union(&isolated_checks);
        prop_assert_eq!(outside_a, via_complement);
        let isolated_vars = NodeSet::vars((0..g.n_vars()).filter(|&v| g.var_neighbors(v).is_empty()));
        let outside_b = ind.b.complement(g.n_vars());
        let via_complement = g.neighborhood(&t.complement(g.n_checks())).unwrap().union(&isolated_vars);
        prop_assert_eq!(outside_b, via_complement);
        // M \ B touches both T and its complement.
        for v in ind.m.difference(&ind.b).iter() {
            let nb = NodeSet::checks(g.var_neighbors(v).iter().copied());
            prop_assert!(!nb.intersection(&t).is_empty());
            prop_assert!(!nb.difference(&t).is_empty());
        }
    }

    #[test]
    fn alist_round_trip(g in graph()) {
        let back = FactorGraph::from_alist(&g.to_alist()).unwrap();
        prop_assert_eq!(back.to_matrix(), g.to_matrix());
    }
}
