//! Grids, initial data, time stepping and error measurement.

pub mod analysis;
pub mod datum;
pub mod grid;
pub mod halfline;
pub mod interval;
pub mod stepping;

pub use analysis::{
    consistency_error_field, halfline_convergence, halfline_error_sup_l2, stability_functional_ratio,
    StabilityFunctional,
};
pub use datum::InitialDatum;
pub use grid::GridSpec;
pub use halfline::{run_halfline_outflow, BoundarySources, HalfLineConfig, HalfLineData, HalfLineRun};
pub use interval::{
    convergence_study, error_metrics, error_vector, initial_state, norms, observed_order, project_initial, run_interval, sample_midpoints, ConvergenceOptions,
    ConvergenceRow, ConvergenceTable, ErrorConvention, ErrorReport, InitialProjection, Norm, Record, RunOptions,
    RunResult, SupErrors,
};
pub use stepping::{apply_interior, step, step_whole_line, step_with_sources};
