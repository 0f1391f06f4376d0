//! Diagnostics built on top of the runners: interior consistency errors, the
//! weighted stability functional, and half-line error norms.

use std::ops::RangeInclusive;

use super::datum::InitialDatum;
use super::grid::GridSpec;
use super::halfline::{run_halfline_outflow, BoundarySources, HalfLineConfig, HalfLineData, HalfLineRun};
use super::interval::{InitialProjection, observed_order};
use crate::error::{Error, Result};
use crate::scheme::SchemeStencil;

/// Whole-line cell average of the exact solution at level `n`.
fn exact_average(datum: &InitialDatum, grid: &GridSpec, a: f64, n: usize, j: i64) -> f64 {
    let shift = a * grid.time(n);
    datum.average(grid.node(j - 1) - shift, grid.node(j) - shift)
}

/// `e_j^n = -(w_j^n - sum_l a_l w_{j+l}^{n-1}) / dt` for `j` in `cells`,
/// with `w` the exact cell averages of the transported datum on the whole line.
pub fn consistency_error_field(
    datum: &InitialDatum,
    grid: &GridSpec,
    stencil: &SchemeStencil,
    n: usize,
    cells: RangeInclusive<i64>,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidParameter { name: "n", reason: "consistency error starts at n = 1".into() });
    }
    let a = stencil.velocity();
    Ok(cells
        .map(|j| {
            let mut prev = 0.0;
            for (l, c) in stencil.terms() {
                prev += c * exact_average(datum, grid, a, n - 1, j + l);
            }
            -(exact_average(datum, grid, a, n, j) - prev) / grid.dt
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityFunctional {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; 0 when both vanish, infinite when only `rhs` does.
    pub ratio: f64,
}

/// Both sides of the weighted estimate over the computed horizon:
///
/// lhs = sup_n e^{-2 gamma n dt} sum dx (u_j^n)^2
///       + sum_n dt e^{-2 gamma n dt} sum_{l=1-r-kb}^{p} (u_{J+l}^n)^2
///
/// rhs = sum dx f_j^2 + sum_n dt e^{-2 gamma n dt} sum_{l=1}^{p} (g_{J+l}^n)^2
pub fn stability_functional_ratio(
    run: &HalfLineRun,
    sources: Option<&BoundarySources>,
    gamma: f64,
) -> Result<StabilityFunctional> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter { name: "gamma", reason: format!("must be positive, got {gamma}") });
    }
    let dt = run.grid.dt;
    let weight = |n: usize| (-2.0 * gamma * n as f64 * dt).exp();
    let sup = run.energy.iter().enumerate().map(|(n, e)| weight(n) * e).fold(0.0f64, f64::max);
    let trace: f64 = run.trace.iter().enumerate().map(|(n, t)| dt * weight(n) * t).sum();
    let lhs = sup + trace;
    let boundary: f64 = sources.map_or(0.0, |g| {
        g.iter().take(run.steps).enumerate().map(|(n, gn)| dt * weight(n) * gn.iter().map(|v| v * v).sum::<f64>()).sum()
    });
    let rhs = run.energy[0] + boundary;
    let ratio = if rhs == 0.0 {
        if lhs == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        lhs / rhs
    };
    Ok(StabilityFunctional { lhs, rhs, ratio })
}

/// Sup over `n = 0..=N` of `sqrt(sum_{j <= J} dx (u_j^n - w_j^n)^2)` for the
/// half-line problem started from exact cell averages, `N` the first level
/// with `N dt >= T`.
pub fn halfline_error_sup_l2(
    datum: &InitialDatum,
    stencil: &SchemeStencil,
    grid: &GridSpec,
    kb: usize,
    final_time: f64,
) -> Result<f64> {
    let steps = grid.steps_to_reach(final_time);
    let config = HalfLineConfig { grid: *grid, kb, steps, window: None, keep_history: true };
    let data = HalfLineData::Datum(datum.clone(), InitialProjection::CellAverage);
    let run = run_halfline_outflow(&data, stencil, &config, None)?;
    let a = stencil.velocity();
    let history = run.history.as_ref().expect("history kept");
    let mut worst = 0.0f64;
    for (n, state) in history.iter().enumerate() {
        let mut sum = 0.0;
        for (i, u) in state.interior().iter().enumerate() {
            let j = state.first_index() + i as i64;
            let e = u - exact_average(datum, grid, a, n, j);
            sum += e * e;
        }
        worst = worst.max((grid.dx * sum).sqrt());
    }
    Ok(worst)
}

/// Half-line errors and successive orders for each `J` in `cells_list`.
pub fn halfline_convergence(
    datum: &InitialDatum,
    stencil: &SchemeStencil,
    length: f64,
    kb: usize,
    cells_list: &[usize],
    final_time: f64,
) -> Result<Vec<(usize, f64, Option<f64>)>> {
    use rayon::prelude::*;
    let errors = cells_list
        .par_iter()
        .map(|&cells| {
            let grid = GridSpec::new(length, cells, stencil.lambda())?;
            halfline_error_sup_l2(datum, stencil, &grid, kb, final_time).map(|e| (cells, e))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(errors
        .iter()
        .enumerate()
        .map(|(i, &(cells, e))| (cells, e, (i > 0).then(|| observed_order(errors[i - 1], (cells, e)))))
        .collect())
}
