//! Ghost-cell closures: homogeneous Dirichlet inflow and order-`kb`
//! extrapolation at the outflow.

use crate::error::{Error, Result};
use crate::field::FieldState;

/// Largest extrapolation order with exact integer binomials.
pub const MAX_EXTRAPOLATION_ORDER: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inflow {
    DirichletZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundarySpec {
    pub inflow: Inflow,
    /// Extrapolation order at the outflow; `0` is homogeneous Dirichlet.
    pub outflow_order: usize,
}

impl BoundarySpec {
    pub fn extrapolation(kb: usize) -> Self {
        Self { inflow: Inflow::DirichletZero, outflow_order: kb }
    }
}

/// `C(n, k)` as an exact integer, `n <= 20`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Weights `w_m = C(kb, m) (-1)^{m+1}`, `m = 1..=kb`, so that the ghost value is
/// `g + sum_m w_m u_{J+l-m}`.
pub fn extrapolation_weights(kb: usize) -> Result<Vec<f64>> {
    if kb > MAX_EXTRAPOLATION_ORDER {
        return Err(Error::InvalidParameter {
            name: "kb",
            reason: format!("extrapolation order above {MAX_EXTRAPOLATION_ORDER} is not supported"),
        });
    }
    Ok((1..=kb)
        .map(|m| {
            let c = binomial(kb, m) as f64;
            if m % 2 == 1 { c } else { -c }
        })
        .collect())
}

/// `(D_-^m v)_index = sum_{m'} C(m, m') (-1)^{m-m'} v[index - m + m']`.
pub fn backward_difference(values: &[f64], m: usize, index: i64) -> Result<f64> {
    let hi = values.len() as i64 - 1;
    if index > hi || index - (m as i64) < 0 {
        return Err(Error::OutOfRange { index, lo: m as i64, hi });
    }
    if m > MAX_EXTRAPOLATION_ORDER {
        return Err(Error::InvalidParameter { name: "m", reason: "difference order too large".into() });
    }
    let base = (index - m as i64) as usize;
    Ok((0..=m)
        .map(|mp| {
            let c = binomial(m, mp) as f64;
            let sign = if (m - mp).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * c * values[base + mp]
        })
        .sum())
}

/// Sets the left ghosts `1-r..=0` to zero.
pub fn fill_inflow_ghosts(state: &mut FieldState) {
    for g in state.left_ghosts_mut() {
        *g = 0.0;
    }
}

/// Fills `u_{J+1}, ..., u_{J+p}` left to right so that
/// `(D_-^kb u)_{J+l} = g_{J+l}` (with `g = 0` when `sources` is `None`).
pub fn fill_outflow_ghosts(state: &mut FieldState, kb: usize, sources: Option<&[f64]>) -> Result<()> {
    let p = state.p();
    if p == 0 {
        return Ok(());
    }
    if state.cells() < kb {
        return Err(Error::TooFewCells { cells: state.cells(), kb });
    }
    if let Some(g) = sources {
        if g.len() != p {
            return Err(Error::InvalidParameter {
                name: "sources",
                reason: format!("expected {p} boundary values, got {}", g.len()),
            });
        }
    }
    let weights = extrapolation_weights(kb)?;
    let last = state.last_index();
    for l in 1..=p as i64 {
        let idx = last + l;
        let mut v = sources.map_or(0.0, |g| g[(l - 1) as usize]);
        for (m, w) in weights.iter().enumerate() {
            v += w * state.get(idx - 1 - m as i64);
        }
        state.set(idx, v);
    }
    Ok(())
}

/// Applies both closures.
pub fn fill_ghosts(state: &mut FieldState, bc: &BoundarySpec, sources: Option<&[f64]>) -> Result<()> {
    match bc.inflow {
        Inflow::DirichletZero => fill_inflow_ghosts(state),
    }
    fill_outflow_ghosts(state, bc.outflow_order, sources)
}
