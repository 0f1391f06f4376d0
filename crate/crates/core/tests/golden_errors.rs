mod common;

use common::*;
use transport_nbc::scheme::{Builtin, SchemeStencil};
use transport_nbc::solver::{convergence_study, ConvergenceOptions, ErrorConvention, InitialDatum, InitialProjection};

fn study(datum: &str, kb: usize, options: ConvergenceOptions) -> Vec<f64> {
    let s = SchemeStencil::builtin(Builtin::LaxWendroff, 1.0, 0.7).unwrap();
    let d: InitialDatum = datum.parse().unwrap();
    convergence_study(&d, &s, kb, &CELLS, 0.5, options).unwrap().rows.iter().map(|r| r.error_sup).collect()
}

#[test]
fn interval_errors_match_every_reference_value() {
    for datum in ["u01", "u02", "u03"] {
        for kb in [1, 2] {
            let got = study(datum, kb, ConvergenceOptions::default());
            for ((cells, g), want) in CELLS.iter().zip(&got).zip(column(datum, kb)) {
                assert!(rel(*g, want) <= 1e-6, "{datum} kb={kb} J={cells}: {g} vs {want}");
            }
        }
    }
}

#[test]
fn cell_average_initialisation_does_not_reproduce_the_tables() {
    let options = ConvergenceOptions {
        projection: InitialProjection::CellAverage,
        convention: ErrorConvention::CellAverage,
        ..ConvergenceOptions::default()
    };
    let got = study("u02", 2, options);
    let want = column("u02", 2);
    assert!(got.iter().zip(&want).any(|(g, w)| rel(*g, *w) > 1e-2));
}

#[test]
fn final_level_error_is_bounded_by_sup() {
    let s = SchemeStencil::builtin(Builtin::LaxWendroff, 1.0, 0.7).unwrap();
    let d: InitialDatum = "u03".parse().unwrap();
    let t = convergence_study(&d, &s, 2, &[10, 20, 40], 0.5, ConvergenceOptions::default()).unwrap();
    for r in &t.rows {
        assert!(r.error_final <= r.error_sup);
    }
}
