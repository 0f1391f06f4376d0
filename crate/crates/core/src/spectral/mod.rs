//! The one-step matrix of the interval scheme and its spectral data.

mod eigen;
mod matrix;
mod norm;
mod pseudo;

pub use eigen::{eigenvalues, spectral_radius, EigenMethod, Eigenvalues};
pub use matrix::{assemble_transition_matrix, BandedMatrix, DenseMatrix, TransitionMatrix};
pub use norm::{
    dense_norm_l2, operator_norm_l2, operator_norm_l2_with, power_norm_envelope, NormEstimate, ENVELOPE_BUDGET,
    NORM_MAX_ITER, NORM_TOL,
};
pub use pseudo::{pseudospectrum_grid, sigma_min, PseudospectrumGrid, MAX_RESOLUTION};

use crate::error::Result;
use crate::scheme::SchemeStencil;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub cells: usize,
    pub kb: usize,
    pub spectral_radius: f64,
    pub eigen_method: EigenMethod,
    pub l2_norm: f64,
    pub norm_converged: bool,
    pub power_norms: Option<Vec<f64>>,
    pub pseudospectrum: Option<PseudospectrumGrid>,
}

/// `(re_range, im_range, resolution)`.
pub type PseudoWindow = ((f64, f64), (f64, f64), usize);

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpectralOptions {
    /// Largest power for the norm envelope.
    pub powers: Option<usize>,
    pub pseudospectrum: Option<PseudoWindow>,
}

/// Radius, norm and the optional extras for one `(J, kb)`.
pub fn spectral_report(
    cells: usize,
    stencil: &SchemeStencil,
    kb: usize,
    options: SpectralOptions,
) -> Result<SpectralReport> {
    let m = assemble_transition_matrix(cells, stencil, kb)?;
    let eig = eigenvalues(&m.dense)?;
    let norm = operator_norm_l2(&m.banded);
    let power_norms = match options.powers {
        Some(n) => Some(power_norm_envelope(&m.banded, n, ENVELOPE_BUDGET)?.iter().map(|e| e.value).collect()),
        None => None,
    };
    let pseudospectrum = match options.pseudospectrum {
        Some((re, im, res)) => Some(pseudospectrum_grid(&m.banded, re, im, res)?),
        None => None,
    };
    Ok(SpectralReport {
        cells,
        kb,
        spectral_radius: eig.spectral_radius(),
        eigen_method: eig.method,
        l2_norm: norm.value,
        norm_converged: norm.converged,
        power_norms,
        pseudospectrum,
    })
}
