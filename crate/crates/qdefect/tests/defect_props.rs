mod common;

use proptest::prelude::*;
use qdefect::defect::{apply_puncture, check_correctable, make_puncture, puncture_stabilizers, PunctureKind, PunctureSpec};
use qdefect::f2::BitMatrix;
use qdefect::hgp::HgpCode;
use qdefect::par::Execution;
use qdefect::symplectic::css_gram;
use rand::Rng;

/// First correctable puncture among a few random draws.
fn correctable(seed: u64) -> Option<(HgpCode, PunctureSpec)> {
    let mut rng = common::rng(seed);
    for _ in 0..20 {
        let code = common::random_code(&mut rng, (2, 8), (3, 10), 3);
        let kind = if rng.gen_bool(0.5) { PunctureKind::Smooth } else { PunctureKind::Rough };
        let (s, t) = common::random_sets(&mut rng, &code, 3, 3);
        let spec = make_puncture(&code, kind, &s, &t).ok()?;
        if check_correctable(&code, &spec).correctable {
            return Some((code, spec));
        }
    }
    None
}

fn independent(a: &BitMatrix, b: &BitMatrix) -> bool {
    a.vstack(b).unwrap().rank() == a.rank() + b.rank()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn punctured_code_is_valid(seed in any::<u64>()) {
        let Some((code, spec)) = correctable(seed) else { return Ok(()) };
        let d = apply_puncture(&code, &spec, false).unwrap();
        prop_assert!(d.sx.matmul(&d.sz.transpose()).unwrap().is_zero());
        prop_assert!(d.commutation_violations(Execution::Sequential).is_empty());
        prop_assert!(d.measured_support_violations().is_empty());
        for (row, &id) in d.sx.iter_rows().zip(&d.sx_ids) {
            prop_assert!(row.is_subset_of(code.hx().row(id)));
        }
        for (row, &id) in d.sz.iter_rows().zip(&d.sz_ids) {
            prop_assert!(row.is_subset_of(code.hz().row(id)));
        }
        let (hx_p, hz_p) = puncture_stabilizers(&code, &spec);
        for (p, full) in hx_p.iter_rows().zip(code.hx().iter_rows()) {
            prop_assert!(p.is_subset_of(full));
        }
        for (p, full) in hz_p.iter_rows().zip(code.hz().iter_rows()) {
            prop_assert!(p.is_subset_of(full));
        }
    }

    #[test]
    fn embedded_logicals_leave_the_interior(seed in any::<u64>()) {
        let Some((code, spec)) = correctable(seed) else { return Ok(()) };
        let interior = spec.interior_mask(code.n_qubits());
        for row in code.embedded_logical_x_basis().iter_rows().chain(code.embedded_logical_z_basis().iter_rows()) {
            prop_assert!(!row.is_subset_of(&interior));
        }
    }

    #[test]
    fn removed_stabilizers_are_independent(seed in any::<u64>()) {
        let Some((code, spec)) = correctable(seed) else { return Ok(()) };
        let d = apply_puncture(&code, &spec, false).unwrap();
        let (hx_p, hz_p) = puncture_stabilizers(&code, &spec);
        match spec.kind {
            PunctureKind::Smooth => prop_assert!(independent(&d.sz, &hz_p)),
            PunctureKind::Rough => prop_assert!(independent(&d.sx, &hx_p)),
        }
    }

    #[test]
    fn defect_logicals_are_nontrivial_and_counted(seed in any::<u64>()) {
        let Some((code, spec)) = correctable(seed) else { return Ok(()) };
        let d = apply_puncture(&code, &spec, false).unwrap();
        let (lx, lz) = (&d.new_logical_x, &d.new_logical_z);
        prop_assert_eq!(lx.rows(), lz.rows());
        prop_assert!(independent(&d.sx, lx));
        prop_assert!(independent(&d.sz, lz));
        prop_assert!(lx.matmul(&d.sz.transpose()).unwrap().is_zero());
        prop_assert!(lz.matmul(&d.sx.transpose()).unwrap().is_zero());
        prop_assert_eq!(css_gram(lx, lz).rank(), lx.rows());
        prop_assert_eq!(d.logical_count_by_rank(), code.k() + d.defect_logical_count());
    }
}

#[test]
fn random_draws_reach_correctable_punctures() {
    let hits = (0..200u64).filter(|&s| correctable(s).is_some()).count();
    assert!(hits >= 50, "only {hits} of 200 seeds gave a correctable puncture");
}
