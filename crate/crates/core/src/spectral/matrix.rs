use crate::boundary::extrapolation_weights;
use crate::error::{Error, Result};
use crate::scheme::SchemeStencil;

/// Dense row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter { name: "matrix", reason: "ragged rows".into() });
        }
        Ok(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// `A^T x`.
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.cols];
        for (i, xi) in x.iter().enumerate() {
            for (yj, a) in y.iter_mut().zip(self.row(i)) {
                *yj += a * xi;
            }
        }
        y
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for (k, a) in self.row(i).iter().enumerate() {
                if *a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    /// `(lower, upper)` bandwidths of the nonzero pattern.
    pub fn bandwidths(&self) -> (usize, usize) {
        let (mut lo, mut up) = (0, 0);
        for i in 0..self.rows {
            for (j, v) in self.row(i).iter().enumerate() {
                if *v != 0.0 {
                    if i > j {
                        lo = lo.max(i - j);
                    } else {
                        up = up.max(j - i);
                    }
                }
            }
        }
        (lo, up)
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Square matrix with its band stored row by row for fast products.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    /// Row `i` holds columns `i - lower ..= i + upper` (out-of-range slots are 0).
    band: Vec<f64>,
}

impl BandedMatrix {
    pub fn from_dense(m: &DenseMatrix) -> Self {
        assert_eq!(m.rows(), m.cols(), "banded storage needs a square matrix");
        let n = m.rows();
        let (lower, upper) = m.bandwidths();
        let w = lower + upper + 1;
        let mut band = vec![0.0; n * w];
        for i in 0..n {
            for k in 0..w {
                let j = i as i64 + k as i64 - lower as i64;
                if (0..n as i64).contains(&j) {
                    band[i * w + k] = m[(i, j as usize)];
                }
            }
        }
        Self { n, lower, upper, band }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.lower, self.upper)
    }

    /// Entry `(i, j)`, zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let k = j as i64 - i as i64 + self.lower as i64;
        if k < 0 || k > (self.lower + self.upper) as i64 {
            0.0
        } else {
            self.band[i * (self.lower + self.upper + 1) + k as usize]
        }
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        let w = self.lower + self.upper + 1;
        for (i, yi) in y.iter_mut().enumerate() {
            let j0 = i as i64 - self.lower as i64;
            let row = &self.band[i * w..(i + 1) * w];
            let mut acc = 0.0;
            for (k, a) in row.iter().enumerate() {
                let j = j0 + k as i64;
                if j >= 0 && (j as usize) < self.n {
                    acc += a * x[j as usize];
                }
            }
            *yi = acc;
        }
    }

    /// `y = A^T x`.
    pub fn matvec_t_into(&self, x: &[f64], y: &mut [f64]) {
        let w = self.lower + self.upper + 1;
        y.iter_mut().for_each(|v| *v = 0.0);
        for (i, xi) in x.iter().enumerate() {
            let j0 = i as i64 - self.lower as i64;
            for (k, a) in self.band[i * w..(i + 1) * w].iter().enumerate() {
                let j = j0 + k as i64;
                if j >= 0 && (j as usize) < self.n {
                    y[j as usize] += a * xi;
                }
            }
        }
    }

    /// `A * P` for a dense `P`.
    pub fn matmul_dense(&self, p: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, p.rows());
        let mut out = DenseMatrix::zeros(self.n, p.cols());
        for i in 0..self.n {
            let lo = i.saturating_sub(self.lower);
            let hi = (i + self.upper).min(self.n - 1);
            for k in lo..=hi {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..p.cols() {
                    out[(i, j)] += a * p[(k, j)];
                }
            }
        }
        out
    }
}

/// One step of the interval scheme as a `J x J` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    pub cells: usize,
    pub kb: usize,
    pub dense: DenseMatrix,
    pub banded: BandedMatrix,
}

/// Assembles the step matrix: left ghosts vanish, each right ghost is the
/// order-`kb` extrapolation of earlier cells (ghosts included, in order),
/// then the stencil is applied row by row.
pub fn assemble_transition_matrix(cells: usize, stencil: &SchemeStencil, kb: usize) -> Result<TransitionMatrix> {
    let (r, p) = (stencil.r(), stencil.p());
    let min = r.max(p).max(kb) + 1;
    if cells < min {
        return Err(Error::InvalidParameter {
            name: "J",
            reason: format!("need at least {min} cells for r={r}, p={p}, kb={kb}, got {cells}"),
        });
    }
    let weights = extrapolation_weights(kb)?;
    // ghost J+l as a combination of interior cells
    let mut ghosts: Vec<Vec<f64>> = Vec::with_capacity(p);
    let cell_vec = |k: i64, ghosts: &Vec<Vec<f64>>| -> Vec<f64> {
        let mut v = vec![0.0; cells];
        if k >= 1 && k <= cells as i64 {
            v[(k - 1) as usize] = 1.0;
        } else if k > cells as i64 {
            v.clone_from(&ghosts[(k - cells as i64 - 1) as usize]);
        }
        v
    };
    for l in 1..=p as i64 {
        let idx = cells as i64 + l;
        let mut g = vec![0.0; cells];
        for (m, w) in weights.iter().enumerate() {
            let src = cell_vec(idx - 1 - m as i64, &ghosts);
            for (gi, s) in g.iter_mut().zip(&src) {
                *gi += w * s;
            }
        }
        ghosts.push(g);
    }
    let mut dense = DenseMatrix::zeros(cells, cells);
    for j in 1..=cells as i64 {
        let row = (j - 1) as usize;
        for (l, a) in stencil.terms() {
            let k = j + l;
            if k < 1 {
                continue;
            }
            if k <= cells as i64 {
                dense[(row, (k - 1) as usize)] += a;
            } else {
                let g = &ghosts[(k - cells as i64 - 1) as usize];
                for (c, gv) in g.iter().enumerate() {
                    if *gv != 0.0 {
                        dense[(row, c)] += a * gv;
                    }
                }
            }
        }
    }
    let banded = BandedMatrix::from_dense(&dense);
    Ok(TransitionMatrix { cells, kb, dense, banded })
}
