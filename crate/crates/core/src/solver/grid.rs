use crate::error::{Error, Result};

/// Uniform grid `x_j = j dx`, `dx = L/J`, `dt = lambda dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub length: f64,
    pub cells: usize,
    pub lambda: f64,
    pub dx: f64,
    pub dt: f64,
}

impl GridSpec {
    pub fn new(length: f64, cells: usize, lambda: f64) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidParameter { name: "L", reason: format!("must be positive, got {length}") });
        }
        if cells == 0 {
            return Err(Error::InvalidParameter { name: "J", reason: "need at least one cell".into() });
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter { name: "lambda", reason: format!("must be positive, got {lambda}") });
        }
        let dx = length / cells as f64;
        Ok(Self { length, cells, lambda, dx, dt: lambda * dx })
    }

    /// `x_j = j dx`.
    pub fn node(&self, j: i64) -> f64 {
        j as f64 * self.dx
    }

    /// Midpoint of cell `(x_{j-1}, x_j)`.
    pub fn midpoint(&self, j: i64) -> f64 {
        (j as f64 - 0.5) * self.dx
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    /// Smallest `n` with `n dt >= T` (up to a relative slack of 1e-9 steps).
    pub fn steps_to_reach(&self, final_time: f64) -> usize {
        if final_time <= 0.0 {
            return 0;
        }
        (final_time / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}
