use super::matrix::{BandedMatrix, DenseMatrix};
use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-12;
pub const NORM_MAX_ITER: usize = 100_000;
/// Default cap on `n_max * J^3` for power envelopes.
pub const ENVELOPE_BUDGET: f64 = 5e10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Power iteration on `A^T A` from the all-ones vector, given the products
/// `x -> A x` and `y -> A^T y`.
fn power_iteration(
    n: usize,
    mut apply: impl FnMut(&[f64], &mut [f64]),
    mut apply_t: impl FnMut(&[f64], &mut [f64]),
    tol: f64,
    max_iter: usize,
) -> NormEstimate {
    if n == 0 {
        return NormEstimate { value: 0.0, iterations: 0, converged: true };
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut ax = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut sigma = 0.0;
    for it in 1..=max_iter {
        apply(&x, &mut ax);
        let est = ax.iter().map(|v| v * v).sum::<f64>().sqrt();
        apply_t(&ax, &mut z);
        let zn = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if zn == 0.0 {
            return NormEstimate { value: est, iterations: it, converged: true };
        }
        for (xi, zi) in x.iter_mut().zip(&z) {
            *xi = zi / zn;
        }
        if it > 1 && (est - sigma).abs() <= tol * est {
            return NormEstimate { value: est, iterations: it, converged: true };
        }
        sigma = est;
    }
    NormEstimate { value: sigma, iterations: max_iter, converged: false }
}

/// Largest singular value of a banded square matrix.
pub fn operator_norm_l2(m: &BandedMatrix) -> NormEstimate {
    operator_norm_l2_with(m, NORM_TOL, NORM_MAX_ITER)
}

pub fn operator_norm_l2_with(m: &BandedMatrix, tol: f64, max_iter: usize) -> NormEstimate {
    power_iteration(m.dim(), |x, y| m.matvec_into(x, y), |x, y| m.matvec_t_into(x, y), tol, max_iter)
}

/// Largest singular value of a dense square matrix.
pub fn dense_norm_l2(m: &DenseMatrix, tol: f64, max_iter: usize) -> NormEstimate {
    assert_eq!(m.rows(), m.cols(), "square matrix expected");
    power_iteration(
        m.rows(),
        |x, y| y.copy_from_slice(&m.matvec(x)),
        |x, y| y.copy_from_slice(&m.matvec_t(x)),
        tol,
        max_iter,
    )
}

/// `||A^n||_2` for `n = 0..=n_max`, powers formed by successive banded
/// products.
pub fn power_norm_envelope(m: &BandedMatrix, n_max: usize, budget: f64) -> Result<Vec<NormEstimate>> {
    let j = m.dim() as f64;
    let cost = n_max as f64 * j * j * j;
    if cost > budget {
        return Err(Error::Budget(format!("n_max * J^3 = {cost:e} exceeds {budget:e}")));
    }
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(NormEstimate { value: if m.dim() == 0 { 0.0 } else { 1.0 }, iterations: 0, converged: true });
    let mut power = DenseMatrix::identity(m.dim());
    for _ in 0..n_max {
        power = m.matmul_dense(&power);
        out.push(dense_norm_l2(&power, 1e-10, 20_000));
    }
    Ok(out)
}
