//! Discrete integration by parts for the one-step energy change.
//!
//! The quadratic form `2 v_0 (sum a_l v_l - v_0) + (sum a_l v_l - v_0)^2` on
//! `(v_{-r}, ..., v_p)` is split into dissipation terms `d_l (v_{l-r} - v_{-r})^2`
//! and a telescoping boundary form, which gives the energy balance of the scheme.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scheme::SchemeStencil;
use crate::solver::step_whole_line;

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricForm {
    m: usize,
    entries: Vec<f64>,
}

impl SymmetricForm {
    pub fn zeros(m: usize) -> Self {
        Self { m, entries: vec![0.0; m * m] }
    }

    /// Builds from the upper triangle of `entries` (row-major `m x m`); the
    /// lower triangle is ignored and mirrored.
    pub fn from_upper(m: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != m * m {
            return Err(Error::InvalidParameter {
                name: "entries",
                reason: format!("expected {} entries for m = {m}, got {}", m * m, entries.len()),
            });
        }
        let mut s = Self::zeros(m);
        for i in 0..m {
            for j in i..m {
                s.set(i, j, entries[i * m + j]);
            }
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.m + j]
    }

    /// Sets `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.m + j] = v;
        self.entries[j * self.m + i] = v;
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn entry_sum(&self) -> f64 {
        self.entries.iter().sum()
    }

    /// `v^T S v`.
    pub fn eval(&self, v: &[f64]) -> f64 {
        assert_eq!(v.len(), self.m, "vector length must match form size");
        let mut acc = 0.0;
        for i in 0..self.m {
            let mut row = 0.0;
            for j in 0..self.m {
                row += self.get(i, j) * v[j];
            }
            acc += v[i] * row;
        }
        acc
    }

    /// Largest entrywise difference.
    pub fn max_diff(&self, other: &SymmetricForm) -> f64 {
        assert_eq!(self.m, other.m);
        self.entries.iter().zip(&other.entries).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// `S = [0 (+) T] - [T (+) 0] + sum_l d_l (e_1 - e_{l+1})(e_1 - e_{l+1})^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadDecomposition {
    pub reduced: SymmetricForm,
    pub d: Vec<f64>,
}

fn zero_sum_tol(s: &SymmetricForm) -> f64 {
    1e-12 * s.max_abs().max(1.0)
}

/// Peels `S` column by column from the right: the first row gives `d_{j-1}`,
/// the rest of column `j` gives column `j-1` of the reduced form.
pub fn decompose_zero_sum_form(s: &SymmetricForm) -> Result<QuadDecomposition> {
    let m = s.dim();
    if m < 2 {
        return Err(Error::InvalidParameter { name: "m", reason: format!("form size must be at least 2, got {m}") });
    }
    let sum = s.entry_sum();
    let tol = zero_sum_tol(s);
    if sum.abs() > tol {
        return Err(Error::NotZeroSum { sum, tol });
    }
    let mut t = SymmetricForm::zeros(m - 1);
    let mut d = vec![0.0; m - 1];
    // 0-based storage of 1-based indices.
    for j in (1..m).rev() {
        let inner = j < m - 1;
        let t_0j = if inner { t.get(0, j) } else { 0.0 };
        d[j - 1] = -s.get(0, j) - t_0j;
        for i in 1..=j {
            let t_ij = if inner { t.get(i, j) } else { 0.0 };
            let diag = if i == j { d[i - 1] } else { 0.0 };
            t.set(i - 1, j - 1, s.get(i, j) + t_ij - diag);
        }
    }
    Ok(QuadDecomposition { reduced: t, d })
}

/// Inverse of [`decompose_zero_sum_form`].
pub fn reconstruct(dec: &QuadDecomposition) -> SymmetricForm {
    let n = dec.reduced.dim();
    let m = n + 1;
    let mut s = SymmetricForm::zeros(m);
    for i in 0..m {
        for j in i..m {
            let mut v = 0.0;
            if i >= 1 {
                v += dec.reduced.get(i - 1, j - 1);
            }
            if j < n {
                v -= dec.reduced.get(i, j);
            }
            if i == 0 && j == 0 {
                v += dec.d.iter().sum::<f64>();
            } else if i == 0 {
                v -= dec.d[j - 1];
            } else if i == j {
                v += dec.d[i - 1];
            }
            s.set(i, j, v);
        }
    }
    s
}

/// Matrix of `(w.v)^2 - v_0^2` on `(v_{-r}, ..., v_p)`, which equals
/// `2 v_0 (w.v - v_0) + (w.v - v_0)^2`.
pub fn build_amplification_form(stencil: &SchemeStencil) -> Result<SymmetricForm> {
    let sum: f64 = stencil.coeffs().iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::Inconsistent(format!("coefficients sum to {sum}, not 1")));
    }
    let w = stencil.coeffs();
    let m = w.len();
    let zero = stencil.r();
    let mut s = SymmetricForm::zeros(m);
    for i in 0..m {
        for j in i..m {
            let e = if i == zero && j == zero { 1.0 } else { 0.0 };
            s.set(i, j, w[i] * w[j] - e);
        }
    }
    Ok(s)
}

/// `Q` on the coordinates
/// `(v_{2-r}-v_{1-r}, ..., v_0-v_{-1}, v_0, v_1-v_0, ..., v_p-v_{p-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryForm {
    pub r: usize,
    pub p: usize,
    pub q: SymmetricForm,
}

impl BoundaryForm {
    /// Difference coordinates of `(v_{1-r}, ..., v_p)`.
    pub fn coordinates(r: usize, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let c = r - 1;
        (0..n)
            .map(|k| match k.cmp(&c) {
                std::cmp::Ordering::Less => x[k + 1] - x[k],
                std::cmp::Ordering::Equal => x[k],
                std::cmp::Ordering::Greater => x[k] - x[k - 1],
            })
            .collect()
    }

    /// `(v_{1-r}, ..., v_p)` from difference coordinates, by back-substitution
    /// outward from the `v_0` slot.
    pub fn values_from_coordinates(r: usize, y: &[f64]) -> Vec<f64> {
        let n = y.len();
        let c = r - 1;
        let mut x = vec![0.0; n];
        x[c] = y[c];
        for k in (c + 1)..n {
            x[k] = x[k - 1] + y[k];
        }
        for k in (0..c).rev() {
            x[k] = x[k + 1] - y[k];
        }
        x
    }

    /// `Q` at the `r`-th basis direction.
    pub fn value_at_center(&self) -> f64 {
        self.q.get(self.r - 1, self.r - 1)
    }

    /// `Q(coordinates(x))` for `x = (v_{1-r}, ..., v_p)`.
    pub fn eval_values(&self, x: &[f64]) -> f64 {
        self.q.eval(&Self::coordinates(self.r, x))
    }
}

/// Dissipation coefficients and boundary form for one stencil.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyCertificate {
    pub d: Vec<f64>,
    pub boundary: BoundaryForm,
    pub decomposition: QuadDecomposition,
    /// `Q(e_r) + lambda a`; zero up to rounding.
    pub center_defect: f64,
}

/// Splits the amplification form and changes `Q~` to difference coordinates:
/// `Q = M^{-T} Q~ M^{-1}`.
pub fn dissipation_and_boundary_form(stencil: &SchemeStencil) -> Result<EnergyCertificate> {
    let report = stencil.order();
    if report.order < 1 {
        return Err(Error::Inconsistent(format!(
            "the energy splitting needs consistency order >= 1, got {}",
            report.order
        )));
    }
    let r = stencil.r();
    if r == 0 {
        return Err(Error::Inconsistent("the energy splitting needs r >= 1".into()));
    }
    let s = build_amplification_form(stencil)?;
    let dec = decompose_zero_sum_form(&s)?;
    let n = dec.reduced.dim();
    let minv: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            BoundaryForm::values_from_coordinates(r, &e)
        })
        .collect();
    let mut q = SymmetricForm::zeros(n);
    for i in 0..n {
        for j in i..n {
            let (ci, cj) = (&minv[i], &minv[j]);
            let mut acc = 0.0;
            for k in 0..n {
                let mut row = 0.0;
                for l in 0..n {
                    row += dec.reduced.get(k, l) * cj[l];
                }
                acc += ci[k] * row;
            }
            q.set(i, j, acc);
        }
    }
    let boundary = BoundaryForm { r, p: stencil.p(), q };
    let center_defect = boundary.value_at_center() + stencil.courant();
    if center_defect.abs() > 1e-12 * stencil.courant().max(1.0) {
        return Err(Error::Inconsistent(format!("Q(e_r) misses -lambda a by {center_defect:e}")));
    }
    Ok(EnergyCertificate { d: dec.d.clone(), boundary, decomposition: dec, center_defect })
}

/// Both sides of the pointwise identity on one window `(v_{-r}, ..., v_p)`.
pub fn local_identity_sides(stencil: &SchemeStencil, cert: &EnergyCertificate, v: &[f64]) -> (f64, f64) {
    let r = stencil.r();
    let w = stencil.coeffs();
    assert_eq!(v.len(), w.len(), "window length must be r + p + 1");
    let av: f64 = w.iter().zip(v).map(|(a, x)| a * x).sum();
    let lhs = 2.0 * v[r] * (av - v[r]) + (av - v[r]).powi(2);
    let mut rhs = 0.0;
    for (l, d) in cert.d.iter().enumerate() {
        rhs += d * (v[l + 1] - v[0]).powi(2);
    }
    let n = v.len() - 1;
    rhs += cert.boundary.eval_values(&v[1..]) - cert.boundary.eval_values(&v[..n]);
    (lhs, rhs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBalance {
    /// `sum dx [(A v)_j^2 - v_j^2]` on the whole line.
    pub lhs: f64,
    /// `sum_l d_l sum_j dx (v_{j+l-r} - v_{j-r})^2`.
    pub rhs: f64,
    pub residual: f64,
    /// `sum dx v_j^2`, the natural scale for `residual`.
    pub scale: f64,
}

/// Whole-line energy balance for a compactly supported sequence.
pub fn verify_energy_balance(stencil: &SchemeStencil, cert: &EnergyCertificate, v: &[f64], dx: f64) -> EnergyBalance {
    let next = step_whole_line(v, stencil);
    let before: f64 = v.iter().map(|x| x * x).sum();
    let after: f64 = next.iter().map(|x| x * x).sum();
    let lhs = dx * (after - before);
    let n = v.len() as i64;
    let at = |k: i64| if (0..n).contains(&k) { v[k as usize] } else { 0.0 };
    let mut rhs = 0.0;
    for (idx, d) in cert.d.iter().enumerate() {
        let l = idx as i64 + 1;
        // differences v_{k+l} - v_k vanish unless one end is in the support
        let mut s = 0.0;
        for k in -l..n {
            s += (at(k + l) - at(k)).powi(2);
        }
        rhs += d * dx * s;
    }
    EnergyBalance { lhs, rhs, residual: (lhs - rhs).abs(), scale: dx * before }
}

/// Fixed-point rendering with `digits` significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Human-readable `d` and `Q` with 15 significant digits.
pub fn render_certificate(cert: &EnergyCertificate) -> String {
    let mut out = String::new();
    for (l, d) in cert.d.iter().enumerate() {
        let _ = writeln!(out, "d_{} = {}", l + 1, format_significant(*d, 15));
    }
    let q = &cert.boundary.q;
    let _ = writeln!(out, "Q =");
    for i in 0..q.dim() {
        let row: Vec<String> = (0..q.dim()).map(|j| format!("{:>22}", format_significant(q.get(i, j), 15))).collect();
        let _ = writeln!(out, "  [{}]", row.join(" "));
    }
    let _ = writeln!(out, "Q(e_r) = {}", format_significant(cert.boundary.value_at_center(), 15));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Xoshiro256StarStar;
    use crate::scheme::Builtin;
    use proptest::prelude::*;

    fn lw(lambda: f64) -> SchemeStencil {
        SchemeStencil::builtin(Builtin::LaxWendroff, 1.0, lambda).unwrap()
    }

    #[test]
    fn two_by_two() {
        let s = SymmetricForm::from_upper(2, &[3.0, -3.0, 0.0, 3.0]).unwrap();
        let dec = decompose_zero_sum_form(&s).unwrap();
        assert_eq!(dec.d, vec![3.0]);
        assert_eq!(dec.reduced.get(0, 0), 0.0);
    }

    #[test]
    fn zero_form() {
        let dec = decompose_zero_sum_form(&SymmetricForm::zeros(5)).unwrap();
        assert!(dec.d.iter().all(|d| *d == 0.0));
        assert_eq!(dec.reduced.max_abs(), 0.0);
    }

    #[test]
    fn rejects_nonzero_sum() {
        let s = SymmetricForm::from_upper(2, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(decompose_zero_sum_form(&s), Err(Error::NotZeroSum { .. })));
    }

    #[test]
    fn upwind_form_entry() {
        let up = SchemeStencil::builtin(Builtin::Upwind, 1.0, 0.5).unwrap();
        let s = build_amplification_form(&up).unwrap();
        assert_eq!(s.dim(), 2);
        assert!((s.eval(&[1.0, 0.0]) - 0.25).abs() < 1e-15);
        assert!(s.eval(&[1.0, 1.0]).abs() < 1e-15);
    }

    #[test]
    fn identity_form_vanishes() {
        let id = SchemeStencil::identity(1.0, 0.5).unwrap();
        assert_eq!(build_amplification_form(&id).unwrap().max_abs(), 0.0);
        assert!(dissipation_and_boundary_form(&id).is_err());
    }

    #[test]
    fn center_value_is_minus_courant() {
        for kind in Builtin::ALL {
            for lambda in [0.3, 0.7, 1.0] {
                let s = SchemeStencil::builtin(kind, 1.0, lambda).unwrap();
                let c = dissipation_and_boundary_form(&s).unwrap();
                assert!((c.boundary.value_at_center() + lambda).abs() < 1e-12, "{kind} {lambda}");
            }
        }
    }

    #[test]
    fn coordinates_round_trip() {
        let x = [0.3, -1.2, 2.5, 0.7, 4.0];
        for r in 1..=5 {
            let y = BoundaryForm::coordinates(r, &x);
            assert_eq!(y[r - 1], x[r - 1]);
            let back = BoundaryForm::values_from_coordinates(r, &y);
            for (a, b) in back.iter().zip(&x) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn lax_wendroff_local_identity() {
        let s = lw(0.7);
        let cert = dissipation_and_boundary_form(&s).unwrap();
        let mut rng = Xoshiro256StarStar::seed_from_u64(7);
        for _ in 0..1000 {
            let v: Vec<f64> = (0..3).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let (lhs, rhs) = local_identity_sides(&s, &cert, &v);
            let scale: f64 = v.iter().map(|x| x * x).sum();
            assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1e-300), "{lhs} {rhs}");
        }
    }

    #[test]
    fn energy_balance_trivial_cases() {
        let s = lw(0.7);
        let cert = dissipation_and_boundary_form(&s).unwrap();
        let b = verify_energy_balance(&s, &cert, &[0.0; 8], 0.1);
        assert_eq!((b.lhs, b.rhs, b.residual), (0.0, 0.0, 0.0));
        let shift = lw(1.0);
        let cert = dissipation_and_boundary_form(&shift).unwrap();
        let b = verify_energy_balance(&shift, &cert, &[1.0, -2.0, 0.5], 0.1);
        assert_eq!(b.lhs, 0.0);
        assert!(b.rhs.abs() < 1e-15);
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(-0.7, 15), "-0.700000000000000");
        assert_eq!(format_significant(123.456, 5), "123.46");
        assert_eq!(format_significant(0.0, 15), "0");
    }

    fn zero_sum_form(m: usize, raw: &[f64]) -> SymmetricForm {
        let mut s = SymmetricForm::zeros(m);
        let mut k = 0;
        for i in 0..m {
            for j in i..m {
                s.set(i, j, raw[k]);
                k += 1;
            }
        }
        // fix the total through the last diagonal entry
        let sum = s.entry_sum();
        let last = s.get(m - 1, m - 1);
        s.set(m - 1, m - 1, last - sum);
        s
    }

    proptest! {
        #[test]
        fn reconstruction_and_uniqueness(m in 2usize..=12, raw in proptest::collection::vec(-5.0f64..5.0, 78)) {
            let s = zero_sum_form(m, &raw);
            let dec = decompose_zero_sum_form(&s).unwrap();
            let back = reconstruct(&dec);
            let tol = 1e-12 * s.max_abs().max(1.0);
            prop_assert!(back.max_diff(&s) <= tol);
            let again = decompose_zero_sum_form(&back).unwrap();
            prop_assert!(again.reduced.max_diff(&dec.reduced) <= tol);
            for (a, b) in again.d.iter().zip(&dec.d) {
                prop_assert!((a - b).abs() <= tol);
            }
        }

        #[test]
        fn dissipation_is_nonpositive(lambda in 0.05f64..1.0, v in proptest::collection::vec(-1.0f64..1.0, 1..30)) {
            for kind in Builtin::ALL {
                let s = SchemeStencil::builtin(kind, 1.0, lambda).unwrap();
                let cert = dissipation_and_boundary_form(&s).unwrap();
                let b = verify_energy_balance(&s, &cert, &v, 0.01);
                prop_assert!(b.rhs <= 1e-12);
                prop_assert!(b.residual <= 1e-12 * b.scale.max(1e-300) + 1e-300);
            }
        }
    }
}
