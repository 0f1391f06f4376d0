//! The interval problem on `(0, L)`: projection, time marching, error
//! measurement and refinement studies.

use rayon::prelude::*;

use super::datum::InitialDatum;
use super::grid::GridSpec;
use super::stepping::step;
use crate::boundary::BoundarySpec;
use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::scheme::SchemeStencil;

/// How the exact solution is sampled when measuring errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorConvention {
    /// `u_j^n - u_0(x_{j-1/2} - a t^n)`.
    #[default]
    Midpoint,
    /// `u_j^n - (1/dx) int_{x_{j-1}}^{x_j} u_0(y - a t^n) dy`.
    CellAverage,
}

/// How the initial level is built from `u_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialProjection {
    /// Exact cell averages.
    #[default]
    CellAverage,
    /// Point values at cell midpoints.
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Record {
    #[default]
    Final,
    SupError,
    FullHistory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Norm {
    #[default]
    Linf,
    L2,
}

/// Interior cell averages of `u_0` (zero-extended); ghosts left at zero.
pub fn project_initial(datum: &InitialDatum, grid: &GridSpec, r: usize, p: usize) -> FieldState {
    let mut s = FieldState::zeros(1, grid.cells, r, p);
    for (i, v) in s.interior_mut().iter_mut().enumerate() {
        let j = i as i64 + 1;
        *v = datum.average_zero_extended(grid.node(j - 1), grid.node(j));
    }
    s
}

/// Interior point values at cell midpoints.
pub fn sample_midpoints(datum: &InitialDatum, grid: &GridSpec, r: usize, p: usize) -> FieldState {
    let mut s = FieldState::zeros(1, grid.cells, r, p);
    for (i, v) in s.interior_mut().iter_mut().enumerate() {
        *v = datum.value_zero_extended(grid.midpoint(i as i64 + 1));
    }
    s
}

pub fn initial_state(
    datum: &InitialDatum,
    grid: &GridSpec,
    stencil: &SchemeStencil,
    projection: InitialProjection,
) -> FieldState {
    match projection {
        InitialProjection::CellAverage => project_initial(datum, grid, stencil.r(), stencil.p()),
        InitialProjection::Midpoint => sample_midpoints(datum, grid, stencil.r(), stencil.p()),
    }
}

/// Pointwise interior errors of `state` at time `t`.
pub fn error_vector(
    state: &FieldState,
    grid: &GridSpec,
    datum: &InitialDatum,
    a: f64,
    t: f64,
    convention: ErrorConvention,
) -> Vec<f64> {
    let shift = a * t;
    state
        .interior()
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let j = state.first_index() + i as i64;
            let exact = match convention {
                ErrorConvention::Midpoint => datum.value_zero_extended(grid.midpoint(j) - shift),
                ErrorConvention::CellAverage => {
                    datum.average_zero_extended(grid.node(j - 1) - shift, grid.node(j) - shift)
                }
            };
            u - exact
        })
        .collect()
}

/// `(l_inf, discrete l2)` norms of an error vector.
pub fn norms(errors: &[f64], dx: f64) -> (f64, f64) {
    let linf = errors.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let l2 = (dx * errors.iter().map(|e| e * e).sum::<f64>()).sqrt();
    (linf, l2)
}

/// Running suprema over time of the error norms, per convention.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SupErrors {
    pub midpoint_linf: f64,
    pub midpoint_l2: f64,
    pub cell_average_linf: f64,
    pub cell_average_l2: f64,
}

impl SupErrors {
    fn absorb(&mut self, state: &FieldState, grid: &GridSpec, datum: &InitialDatum, a: f64, t: f64) {
        let (li, l2) = norms(&error_vector(state, grid, datum, a, t, ErrorConvention::Midpoint), grid.dx);
        self.midpoint_linf = self.midpoint_linf.max(li);
        self.midpoint_l2 = self.midpoint_l2.max(l2);
        let (li, l2) = norms(&error_vector(state, grid, datum, a, t, ErrorConvention::CellAverage), grid.dx);
        self.cell_average_linf = self.cell_average_linf.max(li);
        self.cell_average_l2 = self.cell_average_l2.max(l2);
    }

    pub fn get(&self, convention: ErrorConvention, norm: Norm) -> f64 {
        match (convention, norm) {
            (ErrorConvention::Midpoint, Norm::Linf) => self.midpoint_linf,
            (ErrorConvention::Midpoint, Norm::L2) => self.midpoint_l2,
            (ErrorConvention::CellAverage, Norm::Linf) => self.cell_average_linf,
            (ErrorConvention::CellAverage, Norm::L2) => self.cell_average_l2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    pub record: Record,
    pub projection: InitialProjection,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub grid: GridSpec,
    pub velocity: f64,
    pub steps: usize,
    pub final_time: f64,
    pub final_state: FieldState,
    /// Levels `0..=steps` when recorded with [`Record::FullHistory`].
    pub history: Option<Vec<FieldState>>,
    /// Suprema over `n = 0..=steps`, for [`Record::SupError`] and [`Record::FullHistory`].
    pub sup_errors: Option<SupErrors>,
}

/// Marches the interval scheme from `n = 0` to the first `N` with `N dt >= T`.
pub fn run_interval(
    datum: &InitialDatum,
    grid: &GridSpec,
    stencil: &SchemeStencil,
    bc: &BoundarySpec,
    final_time: f64,
    options: RunOptions,
) -> Result<RunResult> {
    if !(final_time >= 0.0) || !final_time.is_finite() {
        return Err(Error::InvalidParameter { name: "T", reason: format!("must be nonnegative, got {final_time}") });
    }
    if (grid.lambda - stencil.lambda()).abs() > 1e-14 * stencil.lambda() {
        return Err(Error::InvalidParameter {
            name: "lambda",
            reason: format!("grid ratio {} differs from stencil ratio {}", grid.lambda, stencil.lambda()),
        });
    }
    let a = stencil.velocity();
    let steps = grid.steps_to_reach(final_time);
    let mut state = initial_state(datum, grid, stencil, options.projection);
    let track = options.record != Record::Final;
    let mut sup = SupErrors::default();
    let mut history = (options.record == Record::FullHistory).then(Vec::new);
    if track {
        sup.absorb(&state, grid, datum, a, 0.0);
    }
    for n in 0..steps {
        let next = step(&state, stencil, bc)?;
        if let Some(h) = history.as_mut() {
            h.push(state);
        }
        state = next;
        if track {
            sup.absorb(&state, grid, datum, a, grid.time(n + 1));
        }
    }
    if let Some(h) = history.as_mut() {
        h.push(state.clone());
    }
    Ok(RunResult {
        grid: *grid,
        velocity: a,
        steps,
        final_time: grid.time(steps),
        final_state: state,
        history,
        sup_errors: track.then_some(sup),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub linf_final: f64,
    pub l2_final: f64,
    pub linf_sup: Option<f64>,
    pub l2_sup: Option<f64>,
}

/// Error norms of a run against `u_0(x - a t)`.
pub fn error_metrics(run: &RunResult, datum: &InitialDatum, a: f64, convention: ErrorConvention) -> ErrorReport {
    let e = error_vector(&run.final_state, &run.grid, datum, a, run.final_time, convention);
    let (linf_final, l2_final) = norms(&e, run.grid.dx);
    let (linf_sup, l2_sup) = if let Some(h) = &run.history {
        let mut sup = (0.0f64, 0.0f64);
        for (n, s) in h.iter().enumerate() {
            let e = error_vector(s, &run.grid, datum, a, run.grid.time(n), convention);
            let (li, l2) = norms(&e, run.grid.dx);
            sup = (sup.0.max(li), sup.1.max(l2));
        }
        (Some(sup.0), Some(sup.1))
    } else if let (Some(s), true) = (&run.sup_errors, (a - run.velocity).abs() <= 1e-15 * a) {
        (Some(s.get(convention, Norm::Linf)), Some(s.get(convention, Norm::L2)))
    } else {
        (None, None)
    };
    ErrorReport { linf_final, l2_final, linf_sup, l2_sup }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceOptions {
    pub length: f64,
    pub convention: ErrorConvention,
    pub projection: InitialProjection,
    pub norm: Norm,
}

impl Default for ConvergenceOptions {
    /// `L = 1`, midpoint sampling for both the initial level and the error,
    /// l-inf in space.
    fn default() -> Self {
        Self {
            length: 1.0,
            convention: ErrorConvention::Midpoint,
            projection: InitialProjection::Midpoint,
            norm: Norm::Linf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub cells: usize,
    pub dx: f64,
    pub error_final: f64,
    pub error_sup: f64,
    /// `log(e_prev / e) / log(J / J_prev)` on the sup-in-time errors.
    pub order_sup: Option<f64>,
    pub order_final: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn orders_sup(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order_sup).collect()
    }
}

pub fn observed_order(coarse: (usize, f64), fine: (usize, f64)) -> f64 {
    (coarse.1 / fine.1).ln() / (fine.0 as f64 / coarse.0 as f64).ln()
}

/// Runs one interval problem per entry of `cells_list` and tabulates errors
/// and successive observed orders.
pub fn convergence_study(
    datum: &InitialDatum,
    stencil: &SchemeStencil,
    kb: usize,
    cells_list: &[usize],
    final_time: f64,
    options: ConvergenceOptions,
) -> Result<ConvergenceTable> {
    if cells_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter { name: "J-list", reason: "must be strictly increasing".into() });
    }
    let bc = BoundarySpec::extrapolation(kb);
    let errors = cells_list
        .par_iter()
        .map(|&cells| {
            let grid = GridSpec::new(options.length, cells, stencil.lambda())?;
            let run = run_interval(
                datum,
                &grid,
                stencil,
                &bc,
                final_time,
                RunOptions { record: Record::SupError, projection: options.projection },
            )?;
            let e = error_vector(&run.final_state, &grid, datum, stencil.velocity(), run.final_time, options.convention);
            let (li, l2) = norms(&e, grid.dx);
            let final_err = match options.norm {
                Norm::Linf => li,
                Norm::L2 => l2,
            };
            let sup = run.sup_errors.expect("sup errors tracked").get(options.convention, options.norm);
            Ok((cells, grid.dx, final_err, sup))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(errors.len());
    for (i, &(cells, dx, error_final, error_sup)) in errors.iter().enumerate() {
        let (order_sup, order_final) = if i == 0 {
            (None, None)
        } else {
            let prev = errors[i - 1];
            (
                Some(observed_order((prev.0, prev.3), (cells, error_sup))),
                Some(observed_order((prev.0, prev.2), (cells, error_final))),
            )
        };
        rows.push(ConvergenceRow { cells, dx, error_final, error_sup, order_sup, order_final });
    }
    Ok(ConvergenceTable { rows })
}
