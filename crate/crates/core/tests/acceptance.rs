//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test -p transport-nbc --test acceptance`. FAIL lines are reported;
//! set `ACCEPTANCE_STRICT=1` to also exit nonzero on any FAIL.

mod common;

use std::time::{Duration, Instant};

use common::*;
use transport_nbc::boundary::BoundarySpec;
use transport_nbc::energy::{
    decompose_zero_sum_form, dissipation_and_boundary_form, reconstruct, verify_energy_balance, SymmetricForm,
};
use transport_nbc::field::FieldState;
use transport_nbc::rng::Xoshiro256StarStar;
use transport_nbc::scheme::{Builtin, SchemeStencil};
use transport_nbc::solver::{
    convergence_study, halfline_convergence, run_halfline_outflow, stability_functional_ratio, step, BoundarySources,
    ConvergenceOptions, GridSpec, HalfLineConfig, HalfLineData, InitialDatum, InitialProjection,
};
use transport_nbc::spectral::{assemble_transition_matrix, spectral_report, SpectralOptions};

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn lw() -> SchemeStencil {
    SchemeStencil::builtin(Builtin::LaxWendroff, 1.0, 0.7).unwrap()
}

fn stable_builtins() -> Vec<SchemeStencil> {
    let mut out = Vec::new();
    for kind in Builtin::ALL {
        for courant in [0.25, 0.7, 1.0] {
            out.push(SchemeStencil::builtin(kind, 1.0, courant).unwrap());
        }
    }
    out
}

fn within_time(t: Duration, limit: Duration) -> bool {
    t <= limit
}

fn interval_errors() -> Verdict {
    let start = Instant::now();
    let datum: InitialDatum = "u01".parse().unwrap();
    let mut worst = 0.0f64;
    for kb in [2, 1] {
        let t = convergence_study(&datum, &lw(), kb, &CELLS, 0.5, ConvergenceOptions::default()).unwrap();
        for (row, want) in t.rows.iter().zip(column("u01", kb)) {
            worst = worst.max(rel(row.error_sup, want));
        }
    }
    let elapsed = start.elapsed();
    Verdict {
        pass: worst <= 1e-3 && within_time(elapsed, Duration::from_secs(10)),
        detail: format!("max rel err {worst:.2e} over 16 values, {:.2} s", elapsed.as_secs_f64()),
    }
}

fn orders() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, lo, hi) in [("u02", 1.7, 1.75), ("u03", 1.65, 1.7)] {
        let datum: InitialDatum = name.parse().unwrap();
        for kb in [2, 1] {
            let t = convergence_study(&datum, &lw(), kb, &CELLS, 0.5, ConvergenceOptions::default()).unwrap();
            let o = t.orders_sup();
            let last = &o[o.len() - 3..];
            let ok = if kb == 2 {
                last.iter().all(|&x| x > lo && x < hi)
            } else {
                last.iter().all(|&x| (x - 1.0).abs() <= 0.1)
            };
            pass &= ok;
            parts.push(format!(
                "{name} kb={kb} [{}]",
                last.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ")
            ));
        }
    }
    Verdict { pass, detail: parts.join("; ") }
}

fn spectral_values() -> Verdict {
    let start = Instant::now();
    let s = lw();
    let mut misses = Vec::new();
    let mut worst = 0.0f64;
    for (cells, rho1, n1, rho2, n2) in TABLE_SPECTRAL {
        for (kb, rho, norm) in [(1, rho1, n1), (2, rho2, n2)] {
            let r = spectral_report(cells, &s, kb, SpectralOptions::default()).unwrap();
            for (what, got, want) in [("rho", r.spectral_radius, rho), ("norm", r.l2_norm, norm)] {
                let d = (got - want).abs();
                worst = worst.max(d);
                if d > 1e-3 {
                    misses.push(format!("J={cells} kb={kb} {what} {got:.5} vs {want}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let timed = within_time(elapsed, Duration::from_secs(120));
    let detail = if misses.is_empty() {
        format!("16/16 within 1e-3 (max {worst:.1e}), {:.1} s", elapsed.as_secs_f64())
    } else {
        format!("{}/16 within 1e-3, {:.1} s; off: {}", 16 - misses.len(), elapsed.as_secs_f64(), misses.join("; "))
    };
    Verdict { pass: misses.is_empty() && timed, detail }
}

fn energy_identity() -> Verdict {
    let mut rng = Xoshiro256StarStar::seed_from_u64(4);
    let (mut worst_res, mut worst_diss) = (0.0f64, f64::NEG_INFINITY);
    let stencils = stable_builtins();
    for s in &stencils {
        let cert = dissipation_and_boundary_form(s).unwrap();
        for _ in 0..1000 {
            let len = rng.range_usize(1, 40);
            let v: Vec<f64> = (0..len).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let b = verify_energy_balance(s, &cert, &v, 1.0 / len as f64);
            worst_res = worst_res.max(b.residual / b.scale);
            worst_diss = worst_diss.max(b.rhs);
        }
    }
    Verdict {
        pass: worst_res <= 1e-12 && worst_diss <= 1e-12,
        detail: format!(
            "{} stencils x 1000: max rel residual {worst_res:.1e}, max dissipation sum {worst_diss:.1e}",
            stencils.len()
        ),
    }
}

fn random_zero_sum(rng: &mut Xoshiro256StarStar, m: usize) -> SymmetricForm {
    let mut s = SymmetricForm::zeros(m);
    for i in 0..m {
        for j in i..m {
            s.set(i, j, rng.uniform(-5.0, 5.0));
        }
    }
    let sum = s.entry_sum();
    s.set(m - 1, m - 1, s.get(m - 1, m - 1) - sum);
    s
}

fn decomposition() -> Verdict {
    let mut rng = Xoshiro256StarStar::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut deterministic = true;
    for _ in 0..1000 {
        let m = rng.range_usize(2, 12);
        let s = random_zero_sum(&mut rng, m);
        let scale = s.max_abs().max(1.0);
        let dec = decompose_zero_sum_form(&s).unwrap();
        worst = worst.max(reconstruct(&dec).max_diff(&s) / scale);
        let again = decompose_zero_sum_form(&s).unwrap();
        deterministic &= again == dec;
        let round = decompose_zero_sum_form(&reconstruct(&dec)).unwrap();
        worst = worst.max(round.reduced.max_diff(&dec.reduced) / scale);
        for (a, b) in round.d.iter().zip(&dec.d) {
            worst = worst.max((a - b).abs() / scale);
        }
    }
    Verdict {
        pass: worst <= 1e-12 && deterministic,
        detail: format!("1000 forms, m in 2..=12: max scaled deviation {worst:.1e}, repeat identical: {deterministic}"),
    }
}

fn certificate() -> Verdict {
    let mut worst = 0.0f64;
    let stencils = stable_builtins();
    for s in &stencils {
        let cert = dissipation_and_boundary_form(s).unwrap();
        worst = worst.max((cert.boundary.value_at_center() + s.courant()).abs());
    }
    Verdict { pass: worst <= 1e-12, detail: format!("{} stencils: max |Q(e_r) + lambda a| = {worst:.1e}", stencils.len()) }
}

fn matrix_coherence() -> Verdict {
    let s = lw();
    let mut rng = Xoshiro256StarStar::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut bitwise = 0usize;
    let mut total = 0usize;
    for cells in [5, 13, 40] {
        for kb in 0..=2 {
            let m = assemble_transition_matrix(cells, &s, kb).unwrap();
            for _ in 0..100 {
                let u: Vec<f64> = (0..cells).map(|_| rng.uniform(-1.0, 1.0)).collect();
                let via_matrix = m.dense.matvec(&u);
                let state = FieldState::from_interior(&u, s.r(), s.p());
                let next = step(&state, &s, &BoundarySpec::extrapolation(kb)).unwrap();
                let scale = via_matrix.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
                let diff = via_matrix.iter().zip(next.interior()).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
                worst = worst.max(diff / scale);
                bitwise += usize::from(diff == 0.0);
                total += 1;
            }
        }
    }
    Verdict {
        pass: worst <= 1e-15,
        detail: format!("{total} states: max rel diff {worst:.1e}, {bitwise} bit-identical"),
    }
}

/// Smooth seeded initial datum: three compact bumps with random sign and centre.
fn random_datum(rng: &mut Xoshiro256StarStar) -> InitialDatum {
    let amp: Vec<f64> = (0..3).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let centre: Vec<f64> = (0..3).map(|_| rng.uniform(0.3, 0.7)).collect();
    InitialDatum::custom("seeded", Some((0.1, 0.9)), move |x| {
        amp.iter()
            .zip(&centre)
            .map(|(a, c)| {
                let z = (x - c) / 0.2;
                if z.abs() < 1.0 { a * (1.0 - z * z).powi(4) } else { 0.0 }
            })
            .sum()
    })
}

fn stability_functional() -> Verdict {
    let s = lw();
    let mut rng = Xoshiro256StarStar::seed_from_u64(8);
    let mut worst = 1.0f64;
    let mut finite = true;
    for _trial in 0..3 {
        let datum = random_datum(&mut rng);
        let (ga, gw, gp) = (rng.uniform(-1.0, 1.0), rng.uniform(0.5, 3.0), rng.uniform(0.0, std::f64::consts::TAU));
        for kb in 0..=2 {
            let mut ratios = Vec::new();
            for cells in [20, 40, 80, 160] {
                let grid = GridSpec::new(1.0, cells, s.lambda()).unwrap();
                // e^{-2 gamma T} with T = 10 makes the truncated tail negligible
                let steps = grid.steps_to_reach(10.0);
                let g: BoundarySources = (0..steps).map(|n| vec![ga * (gw * grid.time(n) + gp).sin()]).collect();
                let cfg = HalfLineConfig { grid, kb, steps, window: None, keep_history: false };
                let data = HalfLineData::Datum(datum.clone(), InitialProjection::CellAverage);
                let run = run_halfline_outflow(&data, &s, &cfg, Some(&g)).unwrap();
                ratios.push(stability_functional_ratio(&run, Some(&g), 1.0).unwrap().ratio);
            }
            finite &= ratios.iter().all(|r| r.is_finite() && *r > 0.0);
            let max = ratios.iter().copied().fold(0.0, f64::max);
            let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            worst = worst.max(max / min);
        }
    }
    Verdict { pass: finite && worst <= 1.5, detail: format!("3 seeds x kb 0..=2: max spread over J {worst:.4}") }
}

/// Least-squares slope of `log err` against `log dx`.
fn fitted_order(rows: &[(usize, f64, Option<f64>)]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().map(|&(j, e, _)| ((1.0 / j as f64).ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn halfline_rate() -> Verdict {
    let s = lw();
    let bump = InitialDatum::custom("bump", Some((0.2, 0.9)), |x| ((x - 0.2) * (0.9 - x) * 8.0).powi(4));
    let mut pass = true;
    let mut parts = Vec::new();
    for kb in [1, 2] {
        let rows = halfline_convergence(&bump, &s, 1.0, kb, &[160, 320, 640, 1280, 2560], 0.5).unwrap();
        let k0 = kb.min(2) as f64;
        let fit = fitted_order(&rows);
        pass &= fit >= k0;
        parts.push(format!("kb={kb} fitted order {fit:.4} (need >= {k0})"));
    }
    Verdict { pass, detail: parts.join("; ") }
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("interval errors, u01", interval_errors),
        ("observed orders, u02/u03", orders),
        ("spectral radius and norm", spectral_values),
        ("whole-line energy identity", energy_identity),
        ("zero-sum form decomposition", decomposition),
        ("boundary form at centre", certificate),
        ("matrix vs solver step", matrix_coherence),
        ("weighted stability functional", stability_functional),
        ("half-line l2 rate", halfline_rate),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        failed += usize::from(!v.pass);
        println!("{} {}: {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 && std::env::var_os("ACCEPTANCE_STRICT").is_some_and(|v| v != "0") {
        std::process::exit(1);
    }
}
