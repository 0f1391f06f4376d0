use crate::boundary::{fill_ghosts, BoundarySpec};
use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::scheme::SchemeStencil;

fn check_layout(state: &FieldState, stencil: &SchemeStencil) -> Result<()> {
    if state.r() != stencil.r() || state.p() != stencil.p() {
        return Err(Error::InvalidParameter {
            name: "state",
            reason: format!(
                "ghost layout (r={}, p={}) does not match stencil (r={}, p={})",
                state.r(),
                state.p(),
                stencil.r(),
                stencil.p()
            ),
        });
    }
    Ok(())
}

/// Interior update on a state whose ghosts are already filled.
pub fn apply_interior(filled: &FieldState, stencil: &SchemeStencil) -> Result<FieldState> {
    check_layout(filled, stencil)?;
    let mut next = FieldState::zeros(filled.first_index(), filled.cells(), filled.r(), filled.p());
    next.set_time_index(filled.time_index() + 1);
    let src = filled.as_slice();
    let coeffs = stencil.coeffs();
    let width = coeffs.len();
    for (k, out) in next.interior_mut().iter_mut().enumerate() {
        // storage index of u_{j-r} is exactly k
        let window = &src[k..k + width];
        let mut acc = 0.0;
        for (c, v) in coeffs.iter().zip(window) {
            acc += c * v;
        }
        *out = acc;
    }
    Ok(next)
}

/// One step of the interval scheme: ghosts from `bc`, then the interior
/// stencil. The returned state has zero ghosts.
pub fn step(state: &FieldState, stencil: &SchemeStencil, bc: &BoundarySpec) -> Result<FieldState> {
    step_with_sources(state, stencil, bc, None)
}

/// Same as [`step`] with inhomogeneous outflow data `(D_-^kb u)_{J+l} = g_l`.
pub fn step_with_sources(
    state: &FieldState,
    stencil: &SchemeStencil,
    bc: &BoundarySpec,
    sources: Option<&[f64]>,
) -> Result<FieldState> {
    check_layout(state, stencil)?;
    let mut work = state.clone();
    fill_ghosts(&mut work, bc, sources)?;
    apply_interior(&work, stencil)
}

/// Boundary-free step on the whole line for a compactly supported sequence.
///
/// Entry `i` of the input is cell `i`; the output covers cells `-p..n+r`, so
/// entry `i` of the output is cell `i - p`.
pub fn step_whole_line(values: &[f64], stencil: &SchemeStencil) -> Vec<f64> {
    let p = stencil.p() as i64;
    let n = values.len() as i64;
    let out_len = values.len() + stencil.r() + stencil.p();
    (0..out_len as i64)
        .map(|i| {
            let j = i - p;
            let mut acc = 0.0;
            for (l, c) in stencil.terms() {
                let k = j + l;
                if (0..n).contains(&k) {
                    acc += c * values[k as usize];
                }
            }
            acc
        })
        .collect()
}
