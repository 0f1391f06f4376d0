/// One time level of cell values, interior cells plus `r` left and `p` right
/// ghosts.
///
/// Cells are addressed by their global index `j`. On the interval the
/// interior is `1..=J`; on a truncated half-line window it is
/// `J-cells+1..=J`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    time_index: usize,
    first: i64,
    cells: usize,
    r: usize,
    p: usize,
    values: Vec<f64>,
}

impl FieldState {
    pub fn zeros(first: i64, cells: usize, r: usize, p: usize) -> Self {
        Self { time_index: 0, first, cells, r, p, values: vec![0.0; cells + r + p] }
    }

    /// Interval state with interior `1..=values.len()` and zero ghosts.
    pub fn from_interior(values: &[f64], r: usize, p: usize) -> Self {
        let mut s = Self::zeros(1, values.len(), r, p);
        s.interior_mut().copy_from_slice(values);
        s
    }

    pub fn time_index(&self) -> usize {
        self.time_index
    }

    pub fn set_time_index(&mut self, n: usize) {
        self.time_index = n;
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Global index of the first interior cell.
    pub fn first_index(&self) -> i64 {
        self.first
    }

    /// Global index of the last interior cell (`J`).
    pub fn last_index(&self) -> i64 {
        self.first + self.cells as i64 - 1
    }

    pub fn storage_index(&self, j: i64) -> usize {
        let k = j - self.first + self.r as i64;
        assert!(
            k >= 0 && (k as usize) < self.values.len(),
            "cell {j} outside {}..={}",
            self.first - self.r as i64,
            self.last_index() + self.p as i64
        );
        k as usize
    }

    pub fn get(&self, j: i64) -> f64 {
        self.values[self.storage_index(j)]
    }

    pub fn set(&mut self, j: i64, v: f64) {
        let k = self.storage_index(j);
        self.values[k] = v;
    }

    /// All values including ghosts, ordered by cell index.
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn interior(&self) -> &[f64] {
        &self.values[self.r..self.r + self.cells]
    }

    pub fn interior_mut(&mut self) -> &mut [f64] {
        &mut self.values[self.r..self.r + self.cells]
    }

    pub fn left_ghosts_mut(&mut self) -> &mut [f64] {
        &mut self.values[..self.r]
    }

    pub fn right_ghosts(&self) -> &[f64] {
        &self.values[self.r + self.cells..]
    }

    pub fn clear_ghosts(&mut self) {
        let (r, c) = (self.r, self.cells);
        self.values[..r].fill(0.0);
        self.values[r + c..].fill(0.0);
    }

    /// `sum_j dx u_j^2` over the interior.
    pub fn energy(&self, dx: f64) -> f64 {
        dx * self.interior().iter().map(|v| v * v).sum::<f64>()
    }

    /// `sum_j dx u_j` over the interior.
    pub fn mass(&self, dx: f64) -> f64 {
        dx * self.interior().iter().sum::<f64>()
    }
}
