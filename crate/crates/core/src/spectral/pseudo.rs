//! `sigma_min(zI - A)` on a grid of complex shifts.

use num_complex::Complex64;
use rayon::prelude::*;

use super::matrix::BandedMatrix;
use crate::error::{Error, Result};

pub const MAX_RESOLUTION: usize = 512;

/// LU with partial pivoting of a complex band matrix, LAPACK `gbtrf` layout:
/// entry `(i, j)` lives at `ab[(kl + ku + i - j) + j * ldab]`.
struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<Complex64>,
    ipiv: Vec<usize>,
    singular: bool,
}

impl BandLu {
    fn idx(&self, i: usize, j: usize) -> usize {
        self.kl + self.ku + i - j + j * self.ldab
    }

    /// Factors `z I - A`.
    fn shifted(a: &BandedMatrix, z: Complex64) -> Self {
        let n = a.dim();
        let (kl, ku) = a.bandwidths();
        let ldab = 2 * kl + ku + 1;
        let mut lu = Self { n, kl, ku, ldab, ab: vec![Complex64::new(0.0, 0.0); ldab * n], ipiv: vec![0; n], singular: false };
        for j in 0..n {
            for i in j.saturating_sub(ku)..(j + kl + 1).min(n) {
                let v = if i == j { z - a.get(i, j) } else { Complex64::new(-a.get(i, j), 0.0) };
                let k = lu.idx(i, j);
                lu.ab[k] = v;
            }
        }
        lu.factor();
        lu
    }

    fn factor(&mut self) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        for j in 0..n {
            let last = (j + kl).min(n - 1);
            let mut p = j;
            let mut best = self.ab[self.idx(j, j)].norm();
            for i in (j + 1)..=last {
                let v = self.ab[self.idx(i, j)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            self.ipiv[j] = p;
            if best == 0.0 {
                self.singular = true;
                continue;
            }
            let cmax = (j + kl + ku).min(n - 1);
            if p != j {
                for c in j..=cmax {
                    let (a, b) = (self.idx(j, c), self.idx(p, c));
                    self.ab.swap(a, b);
                }
            }
            let pivot = self.ab[self.idx(j, j)];
            for i in (j + 1)..=last {
                let k = self.idx(i, j);
                let l = self.ab[k] / pivot;
                self.ab[k] = l;
                if l == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in (j + 1)..=cmax {
                    let u = self.ab[self.idx(j, c)];
                    let t = self.idx(i, c);
                    self.ab[t] -= l * u;
                }
            }
        }
    }

    /// `x <- (zI - A)^{-1} x`.
    fn solve(&self, x: &mut [Complex64]) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        for j in 0..n {
            x.swap(j, self.ipiv[j]);
            let xj = x[j];
            for i in (j + 1)..=(j + kl).min(n - 1) {
                x[i] -= self.ab[self.idx(i, j)] * xj;
            }
        }
        for j in (0..n).rev() {
            x[j] /= self.ab[self.idx(j, j)];
            let xj = x[j];
            for i in j.saturating_sub(kl + ku)..j {
                x[i] -= self.ab[self.idx(i, j)] * xj;
            }
        }
    }

    /// `x <- (zI - A)^{-H} x`.
    fn solve_adjoint(&self, x: &mut [Complex64]) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        for j in 0..n {
            let mut s = x[j];
            for i in j.saturating_sub(kl + ku)..j {
                s -= self.ab[self.idx(i, j)].conj() * x[i];
            }
            x[j] = s / self.ab[self.idx(j, j)].conj();
        }
        for j in (0..n).rev() {
            let mut s = x[j];
            for i in (j + 1)..=(j + kl).min(n - 1) {
                s -= self.ab[self.idx(i, j)].conj() * x[i];
            }
            x[j] = s;
            x.swap(j, self.ipiv[j]);
        }
    }
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Smallest singular value of `zI - A` by inverse iteration on
/// `(zI - A)^H (zI - A)`.
pub fn sigma_min(a: &BandedMatrix, z: Complex64) -> f64 {
    let n = a.dim();
    if n == 0 {
        return 0.0;
    }
    let lu = BandLu::shifted(a, z);
    if lu.singular {
        return 0.0;
    }
    // deterministic start with no special symmetry
    let mut x: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + (i as f64 * 0.618).sin() * 0.5, 0.0)).collect();
    let nx = norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut prev = f64::INFINITY;
    let mut sigma = f64::INFINITY;
    for _ in 0..300 {
        lu.solve(&mut x);
        lu.solve_adjoint(&mut x);
        let w = norm(&x);
        if !w.is_finite() || w == 0.0 {
            return 0.0;
        }
        x.iter_mut().for_each(|v| *v /= w);
        // |(B^H B)^{-1} x| for unit x converges to 1 / sigma_min^2
        sigma = 1.0 / w.sqrt();
        if (sigma - prev).abs() <= 1e-10 * sigma {
            break;
        }
        prev = sigma;
    }
    sigma
}

#[derive(Debug, Clone, PartialEq)]
pub struct PseudospectrumGrid {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    /// `sigma[row][col]` at `re[col] + i im[row]`.
    pub sigma: Vec<Vec<f64>>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// Rows of the grid are computed in parallel.
pub fn pseudospectrum_grid(
    a: &BandedMatrix,
    re_range: (f64, f64),
    im_range: (f64, f64),
    resolution: usize,
) -> Result<PseudospectrumGrid> {
    if resolution == 0 || resolution > MAX_RESOLUTION {
        return Err(Error::InvalidParameter {
            name: "res",
            reason: format!("resolution must be in 1..={MAX_RESOLUTION}, got {resolution}"),
        });
    }
    let re = linspace(re_range.0, re_range.1, resolution);
    let im = linspace(im_range.0, im_range.1, resolution);
    let sigma = im
        .par_iter()
        .map(|y| re.iter().map(|x| sigma_min(a, Complex64::new(*x, *y))).collect())
        .collect();
    Ok(PseudospectrumGrid { re, im, sigma })
}
