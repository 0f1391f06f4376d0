//! The outflow problem on `(-inf, L)`, realised on a finite window whose left
//! edge is far enough away that it is never seen within the run.

use super::datum::InitialDatum;
use super::grid::GridSpec;
use super::interval::InitialProjection;
use super::stepping::apply_interior;
use crate::boundary::{fill_ghosts, BoundarySpec};
use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::scheme::SchemeStencil;

/// Initial data on the half-line.
#[derive(Debug, Clone)]
pub enum HalfLineData {
    /// Projected onto the cells of `(-inf, L)`; the support must be known.
    Datum(InitialDatum, InitialProjection),
    /// Explicit values for cells `first, first+1, ...`; everything else is 0.
    Values { first: i64, values: Vec<f64> },
}

/// Boundary data `g_{J+l}^n`, indexed `[n][l-1]`.
pub type BoundarySources = Vec<Vec<f64>>;

#[derive(Debug, Clone)]
pub struct HalfLineConfig {
    pub grid: GridSpec,
    pub kb: usize,
    pub steps: usize,
    /// Number of window cells; `None` picks the minimum admissible size.
    pub window: Option<usize>,
    pub keep_history: bool,
}

#[derive(Debug, Clone)]
pub struct HalfLineRun {
    pub grid: GridSpec,
    pub kb: usize,
    pub steps: usize,
    pub final_state: FieldState,
    pub history: Option<Vec<FieldState>>,
    /// `sum dx u_j^n` over the window, `n = 0..=steps`.
    pub mass: Vec<f64>,
    /// Mass leaving through `x = L` during step `n -> n+1`, `n < steps`.
    pub outflow: Vec<f64>,
    /// `sum dx (u_j^n)^2`, `n = 0..=steps`.
    pub energy: Vec<f64>,
    /// `sum_{l=1-r-kb}^{p} (u_{J+l}^n)^2` with ghosts filled, `n < steps`.
    pub trace: Vec<f64>,
}

impl HalfLineRun {
    /// Largest `|mass[n] - mass[0] + sum_{m<n} outflow[m]|`.
    pub fn mass_ledger_residual(&self) -> f64 {
        let mut leaving = 0.0;
        let mut worst = 0.0f64;
        for n in 0..=self.steps {
            worst = worst.max((self.mass[n] - self.mass[0] + leaving).abs());
            if n < self.steps {
                leaving += self.outflow[n];
            }
        }
        worst
    }
}

/// First cell whose value may be nonzero.
fn support_start(data: &HalfLineData, grid: &GridSpec) -> Result<Option<i64>> {
    match data {
        HalfLineData::Datum(d, _) => {
            let s = d.support_left().ok_or_else(|| Error::InvalidParameter {
                name: "datum",
                reason: "half-line runs need a datum with known left support edge".into(),
            })?;
            Ok(Some((s / grid.dx).floor() as i64 + 1))
        }
        HalfLineData::Values { first, values } => {
            Ok(values.iter().position(|v| *v != 0.0).map(|i| first + i as i64))
        }
    }
}

/// Smallest window that keeps the artificial left edge at least `r` cells
/// away from everything the run can reach.
pub fn required_window(
    data: &HalfLineData,
    grid: &GridSpec,
    stencil: &SchemeStencil,
    kb: usize,
    steps: usize,
) -> Result<usize> {
    let j = grid.cells as i64;
    let mut reach = j + 1;
    if let Some(s) = support_start(data, grid)? {
        reach = reach.min(s);
    }
    let need = j + 1 + stencil.r() as i64 + (steps * stencil.p()) as i64 - reach;
    // the trace sum reads r + kb interior cells
    let floor = (stencil.r() + kb).max(1) as i64;
    Ok(need.max(floor) as usize)
}

fn initial_window(data: &HalfLineData, grid: &GridSpec, first: i64, cells: usize, r: usize, p: usize) -> FieldState {
    let mut s = FieldState::zeros(first, cells, r, p);
    for (i, v) in s.interior_mut().iter_mut().enumerate() {
        let j = first + i as i64;
        *v = match data {
            HalfLineData::Datum(d, InitialProjection::CellAverage) => d.average(grid.node(j - 1), grid.node(j)),
            HalfLineData::Datum(d, InitialProjection::Midpoint) => d.value(grid.midpoint(j)),
            HalfLineData::Values { first: f0, values } => {
                let k = j - f0;
                if k >= 0 && (k as usize) < values.len() { values[k as usize] } else { 0.0 }
            }
        };
    }
    s
}

/// `c_k = sum_{l >= k-J} a_l` for the cells `J-r+1 ..= J+p` feeding the
/// boundary flux, paired with `1` for interior cells and `0` for ghosts.
fn flux_weights(stencil: &SchemeStencil, last: i64) -> Vec<(i64, f64)> {
    let (r, p) = (stencil.r() as i64, stencil.p() as i64);
    ((last - r + 1)..=(last + p))
        .map(|k| {
            let c: f64 = stencil.terms().filter(|(l, _)| *l >= k - last).map(|(_, a)| a).sum();
            let own = if k <= last { 1.0 } else { 0.0 };
            (k, own - c)
        })
        .collect()
}

/// Evolves the half-line problem for `config.steps` steps.
pub fn run_halfline_outflow(
    data: &HalfLineData,
    stencil: &SchemeStencil,
    config: &HalfLineConfig,
    sources: Option<&BoundarySources>,
) -> Result<HalfLineRun> {
    let grid = config.grid;
    if let Some(g) = sources {
        if g.len() < config.steps {
            return Err(Error::InvalidParameter {
                name: "sources",
                reason: format!("need {} time levels, got {}", config.steps, g.len()),
            });
        }
    }
    let required = required_window(data, &grid, stencil, config.kb, config.steps)?;
    let cells = config.window.unwrap_or(required);
    if cells < required {
        return Err(Error::WindowTooSmall { cells, required });
    }
    let last = grid.cells as i64;
    let first = last - cells as i64 + 1;
    let (r, p) = (stencil.r(), stencil.p());
    let bc = BoundarySpec::extrapolation(config.kb);
    let flux_w = flux_weights(stencil, last);
    let trace_lo = last + 1 - (r + config.kb) as i64;

    let mut state = initial_window(data, &grid, first, cells, r, p);
    let mut history = config.keep_history.then(Vec::new);
    let mut mass = vec![state.mass(grid.dx)];
    let mut energy = vec![state.energy(grid.dx)];
    let mut outflow = Vec::with_capacity(config.steps);
    let mut trace = Vec::with_capacity(config.steps);

    for n in 0..config.steps {
        let g = sources.map(|s| s[n].as_slice());
        let mut filled = state.clone();
        fill_ghosts(&mut filled, &bc, g)?;
        outflow.push(grid.dx * flux_w.iter().map(|(k, w)| w * filled.get(*k)).sum::<f64>());
        trace.push((trace_lo..=last + p as i64).map(|k| filled.get(k).powi(2)).sum());
        let next = apply_interior(&filled, stencil)?;
        if let Some(h) = history.as_mut() {
            h.push(filled);
        }
        state = next;
        mass.push(state.mass(grid.dx));
        energy.push(state.energy(grid.dx));
    }
    if let Some(h) = history.as_mut() {
        h.push(state.clone());
    }
    Ok(HalfLineRun {
        grid,
        kb: config.kb,
        steps: config.steps,
        final_state: state,
        history,
        mass,
        outflow,
        energy,
        trace,
    })
}
