//! CSV tables with `#` comment headers.

use std::io::Write;

use crate::energy::format_significant;
use crate::error::{Error, Result};
use crate::solver::{error_vector, ConvergenceTable, ErrorConvention, InitialDatum, RunResult};
use crate::spectral::{PseudospectrumGrid, SpectralReport};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    pub header: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        Self { header: Vec::new(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.header.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_to(&self, out: &mut impl Write) -> Result<()> {
        let io = |e: std::io::Error| Error::Parse(format!("write failed: {e}"));
        for (k, v) in &self.header {
            writeln!(out, "# {k} = {v}").map_err(io)?;
        }
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Parse(format!("write failed: {e}"));
        w.write_record(&self.columns).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush().map_err(io)?;
        Ok(())
    }

    pub fn to_string_lossy(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 output")
    }
}

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// `kb, n, t, x_mid, numeric, exact, error` for every recorded level.
pub fn solution_rows(
    table: &mut CsvTable,
    kb: usize,
    run: &RunResult,
    datum: &InitialDatum,
    convention: ErrorConvention,
) {
    let levels: Vec<(usize, &crate::field::FieldState)> = match &run.history {
        Some(h) => h.iter().enumerate().collect(),
        None => vec![(run.steps, &run.final_state)],
    };
    for (n, state) in levels {
        let t = run.grid.time(n);
        let err = error_vector(state, &run.grid, datum, run.velocity, t, convention);
        for (i, (u, e)) in state.interior().iter().zip(&err).enumerate() {
            let j = state.first_index() + i as i64;
            table.push(vec![
                kb.to_string(),
                n.to_string(),
                num(t),
                num(run.grid.midpoint(j)),
                num(*u),
                num(u - e),
                num(*e),
            ]);
        }
    }
}

pub fn solution_table() -> CsvTable {
    CsvTable::new(&["kb", "n", "t", "x_mid", "numeric", "exact", "error"])
}

pub fn convergence_table(t: &ConvergenceTable, use_sup: bool) -> CsvTable {
    let mut table = CsvTable::new(&["J", "dx", "error_final", "error_sup", "observed_order"]);
    for r in &t.rows {
        let order = if use_sup { r.order_sup } else { r.order_final };
        table.push(vec![
            r.cells.to_string(),
            num(r.dx),
            num(r.error_final),
            num(r.error_sup),
            order.map(num).unwrap_or_default(),
        ]);
    }
    table
}

pub fn spectral_table(reports: &[SpectralReport]) -> CsvTable {
    let mut table = CsvTable::new(&["J", "kb", "rho", "norm", "norm_converged"]);
    for r in reports {
        table.push(vec![
            r.cells.to_string(),
            r.kb.to_string(),
            num(r.spectral_radius),
            num(r.l2_norm),
            r.norm_converged.to_string(),
        ]);
    }
    table
}

pub fn power_table(reports: &[SpectralReport]) -> CsvTable {
    let mut table = CsvTable::new(&["J", "kb", "n", "norm"]);
    for r in reports {
        if let Some(p) = &r.power_norms {
            for (n, v) in p.iter().enumerate() {
                table.push(vec![r.cells.to_string(), r.kb.to_string(), n.to_string(), num(*v)]);
            }
        }
    }
    table
}

pub fn pseudospectrum_table(g: &PseudospectrumGrid) -> CsvTable {
    let mut table = CsvTable::new(&["re", "im", "sigma_min"]);
    for (row, y) in g.sigma.iter().zip(&g.im) {
        for (s, x) in row.iter().zip(&g.re) {
            table.push(vec![num(*x), num(*y), num(*s)]);
        }
    }
    table
}

/// Fixed-width rendering used in terminal summaries.
pub fn sig15(x: f64) -> String {
    format_significant(x, 15)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_then_rows() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.meta("scheme", "lax_wendroff");
        t.push(vec!["1".into(), num(0.5)]);
        assert_eq!(t.to_string_lossy(), "# scheme = lax_wendroff\na,b\n1,0.5\n");
    }
}
