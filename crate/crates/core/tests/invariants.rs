use proptest::prelude::*;
use transport_nbc::boundary::BoundarySpec;
use transport_nbc::field::FieldState;
use transport_nbc::scheme::{Builtin, SchemeStencil};
use transport_nbc::solver::{
    run_halfline_outflow, run_interval, step, GridSpec, HalfLineConfig, HalfLineData, InitialDatum, RunOptions,
};
use transport_nbc::spectral::{assemble_transition_matrix, operator_norm_l2, spectral_radius};

fn builtin(kind: usize, courant: f64) -> SchemeStencil {
    SchemeStencil::builtin(Builtin::ALL[kind], 1.0, courant).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_column_action_equals_step(
        kind in 0usize..3,
        courant in 0.05f64..1.0,
        kb in 0usize..=3,
        u in proptest::collection::vec(-1.0f64..1.0, 6..30),
    ) {
        let s = builtin(kind, courant);
        let m = assemble_transition_matrix(u.len(), &s, kb).unwrap();
        let via_matrix = m.dense.matvec(&u);
        let next = step(&FieldState::from_interior(&u, s.r(), s.p()), &s, &BoundarySpec::extrapolation(kb)).unwrap();
        for (a, b) in via_matrix.iter().zip(next.interior()) {
            prop_assert!((a - b).abs() <= 1e-14);
        }
    }

    #[test]
    fn halfline_mass_is_conserved_up_to_outflow(
        kind in 0usize..3,
        courant in 0.05f64..1.0,
        kb in 0usize..=2,
        values in proptest::collection::vec(-1.0f64..1.0, 1..20),
        steps in 1usize..40,
    ) {
        let s = builtin(kind, courant);
        let grid = GridSpec::new(1.0, 20, s.lambda()).unwrap();
        let cfg = HalfLineConfig { grid, kb, steps, window: None, keep_history: false };
        let run = run_halfline_outflow(&HalfLineData::Values { first: 1, values }, &s, &cfg, None).unwrap();
        let scale = run.mass.iter().fold(1.0f64, |a, m| a.max(m.abs()));
        prop_assert!(run.mass_ledger_residual() <= 1e-12 * scale);
    }

    #[test]
    fn radius_never_exceeds_norm(kind in 0usize..3, courant in 0.05f64..1.0, kb in 0usize..=2, cells in 4usize..40) {
        let s = builtin(kind, courant);
        let m = assemble_transition_matrix(cells, &s, kb).unwrap();
        let rho = spectral_radius(&m.dense).unwrap();
        let norm = operator_norm_l2(&m.banded);
        prop_assert!(rho <= norm.value * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn constants_are_preserved_by_extrapolation(courant in 0.05f64..1.0, kb in 1usize..=3, c in -2.0f64..2.0) {
        let s = builtin(2, courant);
        let u = vec![c; 12];
        let next = step(&FieldState::from_interior(&u, 1, 1), &s, &BoundarySpec::extrapolation(kb)).unwrap();
        // only the inflow side sees the zero ghost
        for v in &next.interior()[1..] {
            prop_assert!((v - c).abs() <= 1e-14);
        }
    }
}

#[test]
fn zero_time_run_returns_initial_samples() {
    let s = builtin(2, 0.7);
    let grid = GridSpec::new(1.0, 10, 0.7).unwrap();
    let d: InitialDatum = "u01".parse().unwrap();
    let run = run_interval(&d, &grid, &s, &BoundarySpec::extrapolation(2), 0.0, RunOptions::default()).unwrap();
    assert_eq!(run.steps, 0);
    assert_eq!(run.final_time, 0.0);
}
