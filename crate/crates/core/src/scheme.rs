//! Explicit two-level stencils `u_j^{n+1} = sum_{l=-r}^{p} a_l u_{j+l}^n`.
//!
//! A [`SchemeStencil`] carries its coefficients together with the transport
//! velocity and the ratio `lambda = dt/dx` they were built for, since the
//! consistency conditions are stated in terms of the Courant number
//! `lambda * a`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Highest moment examined by [`SchemeStencil::consistency_order`] by default.
pub const DEFAULT_MAX_MOMENT: usize = 10;
/// Base tolerance for the moment conditions.
pub const DEFAULT_CONSISTENCY_TOL: f64 = 1e-12;
/// Smallest admissible number of samples for the symbol sweep.
pub const MIN_STABILITY_SAMPLES: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Upwind,
    LaxFriedrichs,
    LaxWendroff,
}

impl Builtin {
    pub const ALL: [Builtin; 3] = [Builtin::Upwind, Builtin::LaxFriedrichs, Builtin::LaxWendroff];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Upwind => "upwind",
            Builtin::LaxFriedrichs => "lax_friedrichs",
            Builtin::LaxWendroff => "lax_wendroff",
        }
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "upwind" => Ok(Builtin::Upwind),
            "lax_friedrichs" | "lf" => Ok(Builtin::LaxFriedrichs),
            "lax_wendroff" | "lw" => Ok(Builtin::LaxWendroff),
            other => Err(Error::Parse(format!("unknown scheme `{other}`"))),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Coefficients `a_{-r}, ..., a_p` of an explicit two-level scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeStencil {
    r: usize,
    p: usize,
    coeffs: Vec<f64>,
    velocity: f64,
    lambda: f64,
}

impl SchemeStencil {
    /// Builds a stencil from `r + p + 1` coefficients ordered `a_{-r}..a_p`.
    ///
    /// The end coefficients are allowed to vanish (Lax-Wendroff at `lambda*a = 1`
    /// degenerates to a pure shift); use [`SchemeStencil::is_normalized`] to test
    /// `a_{-r} a_p != 0`.
    pub fn new(r: usize, p: usize, coeffs: Vec<f64>, velocity: f64, lambda: f64) -> Result<Self> {
        if coeffs.len() != r + p + 1 {
            return Err(Error::InvalidStencil(format!(
                "expected {} coefficients for r={r}, p={p}, got {}",
                r + p + 1,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidStencil("non-finite coefficient".into()));
        }
        if !(velocity > 0.0) || !velocity.is_finite() {
            return Err(Error::InvalidParameter {
                name: "a",
                reason: format!("velocity must be positive, got {velocity}"),
            });
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: format!("must be positive, got {lambda}"),
            });
        }
        Ok(Self { r, p, coeffs, velocity, lambda })
    }

    /// The identity stencil `a_0 = 1`.
    pub fn identity(velocity: f64, lambda: f64) -> Result<Self> {
        Self::new(0, 0, vec![1.0], velocity, lambda)
    }

    pub fn builtin(kind: Builtin, velocity: f64, lambda: f64) -> Result<Self> {
        if !(velocity > 0.0) {
            return Err(Error::InvalidParameter {
                name: "a",
                reason: format!("velocity must be positive, got {velocity}"),
            });
        }
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: format!("must be positive, got {lambda}"),
            });
        }
        let c = lambda * velocity;
        if c > 1.0 {
            return Err(Error::Cfl { courant: c });
        }
        Self::builtin_unchecked(kind, velocity, lambda)
    }

    /// Built-in coefficients without the CFL guard, for probing unstable regimes.
    pub fn builtin_unchecked(kind: Builtin, velocity: f64, lambda: f64) -> Result<Self> {
        let c = lambda * velocity;
        let (r, p, coeffs) = match kind {
            Builtin::Upwind => (1, 0, vec![c, 1.0 - c]),
            Builtin::LaxFriedrichs => (1, 1, vec![(1.0 + c) / 2.0, 0.0, (1.0 - c) / 2.0]),
            Builtin::LaxWendroff => {
                let c2 = c * c;
                (1, 1, vec![(c2 + c) / 2.0, 1.0 - c2, (c2 - c) / 2.0])
            }
        };
        Self::new(r, p, coeffs, velocity, lambda)
    }

    pub fn lax_wendroff_unchecked(velocity: f64, lambda: f64) -> Result<Self> {
        Self::builtin_unchecked(Builtin::LaxWendroff, velocity, lambda)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn velocity(&self) -> f64 {
        self.velocity
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Courant number `lambda * a`.
    pub fn courant(&self) -> f64 {
        self.lambda * self.velocity
    }

    /// Coefficients ordered `a_{-r}..a_p`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `a_l` for `l` in `-r..=p`, zero outside.
    pub fn coeff(&self, l: i64) -> f64 {
        let idx = l + self.r as i64;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            0.0
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// Iterator over `(l, a_l)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let r = self.r as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - r, c))
    }

    pub fn is_normalized(&self) -> bool {
        self.coeffs[0] != 0.0 && self.coeffs[self.coeffs.len() - 1] != 0.0
    }

    /// Amplification symbol `sum_l a_l exp(i l theta)`.
    pub fn symbol(&self, theta: f64) -> Complex64 {
        self.terms()
            .map(|(l, c)| Complex64::from_polar(c, l as f64 * theta))
            .sum()
    }

    /// Moment `sum_l l^m a_l`, accumulated from the largest term down.
    pub fn moment(&self, m: usize) -> f64 {
        let mut terms: Vec<f64> = self
            .terms()
            .map(|(l, c)| int_pow(l, m) * c)
            .collect();
        terms.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
        terms.into_iter().sum()
    }

    /// Largest `k <= max_moment` with `|sum l^m a_l - (-lambda a)^m| <= tol * max(1, (lambda a)^m)`
    /// for all `m = 0..=k`.
    pub fn consistency_order(&self, tol: f64, max_moment: usize) -> ConsistencyReport {
        let c = self.courant();
        let mut residuals = Vec::with_capacity(max_moment + 1);
        let mut failed_at = None;
        for m in 0..=max_moment {
            let target = int_pow_f(-c, m);
            let res = (self.moment(m) - target).abs();
            residuals.push(res);
            if res > tol * target.abs().max(1.0) {
                failed_at = Some(m);
                break;
            }
        }
        match failed_at {
            Some(0) => ConsistencyReport { order: 0, flag: Some(ConsistencyFlag::SumToOneFailed), residuals },
            Some(1) => ConsistencyReport { order: 0, flag: Some(ConsistencyFlag::FirstMomentFailed), residuals },
            Some(m) => ConsistencyReport { order: m - 1, flag: None, residuals },
            None => ConsistencyReport { order: max_moment, flag: Some(ConsistencyFlag::Capped), residuals },
        }
    }

    /// Consistency order with the default tolerance and moment cap.
    pub fn order(&self) -> ConsistencyReport {
        self.consistency_order(DEFAULT_CONSISTENCY_TOL, DEFAULT_MAX_MOMENT)
    }

    /// Samples `|symbol|` on a uniform grid of `[0, 2pi)` and refines the
    /// largest sample by golden-section search.
    pub fn check_l2_stability(&self, samples: usize, tol: f64) -> Result<StabilityReport> {
        if samples < MIN_STABILITY_SAMPLES {
            return Err(Error::InvalidParameter {
                name: "samples",
                reason: format!("need at least {MIN_STABILITY_SAMPLES}, got {samples}"),
            });
        }
        let h = 2.0 * PI / samples as f64;
        let modulus = |t: f64| self.symbol(t).norm();
        let (mut best_theta, mut best) = (0.0, modulus(0.0));
        for i in 1..samples {
            let t = i as f64 * h;
            let v = modulus(t);
            if v > best {
                best = v;
                best_theta = t;
            }
        }
        let (t, v) = golden_max(modulus, best_theta - h, best_theta + h, 1e-12);
        if v > best {
            best = v;
            best_theta = t.rem_euclid(2.0 * PI);
        }
        Ok(StabilityReport {
            is_stable: best <= 1.0 + tol,
            max_modulus: best,
            argmax_theta: best_theta,
        })
    }

    /// The compact text form `r=1,p=1,a=-1:0.595,0:0.51,1:-0.105;vel=1;lambda=0.7`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SchemeStencil {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r={},p={},a=", self.r, self.p)?;
        for (i, (l, c)) in self.terms().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}:{c:?}")?;
        }
        write!(f, ";vel={:?};lambda={:?}", self.velocity, self.lambda)
    }
}

impl FromStr for SchemeStencil {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut r = None;
        let mut p = None;
        let mut vel = None;
        let mut lambda = None;
        let mut pairs: Vec<(i64, f64)> = Vec::new();

        let parse_f = |key: &str, v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad value for `{key}`: `{v}`")))
        };

        for section in compact.split(';').filter(|s| !s.is_empty()) {
            let mut in_coeffs = false;
            for item in section.split(',').filter(|s| !s.is_empty()) {
                if let Some((key, value)) = item.split_once('=') {
                    in_coeffs = false;
                    match key {
                        "r" => r = Some(parse_usize("r", value)?),
                        "p" => p = Some(parse_usize("p", value)?),
                        "vel" | "a_vel" | "velocity" => vel = Some(parse_f(key, value)?),
                        "lambda" => lambda = Some(parse_f(key, value)?),
                        "a" => {
                            in_coeffs = true;
                            pairs.push(parse_pair(value)?);
                        }
                        other => return Err(Error::Parse(format!("unknown key `{other}`"))),
                    }
                } else if in_coeffs {
                    pairs.push(parse_pair(item)?);
                } else {
                    return Err(Error::Parse(format!("unexpected token `{item}`")));
                }
            }
        }

        let r = r.ok_or_else(|| Error::Parse("missing `r`".into()))?;
        let p = p.ok_or_else(|| Error::Parse("missing `p`".into()))?;
        let vel = vel.ok_or_else(|| Error::Parse("missing `vel`".into()))?;
        let lambda = lambda.ok_or_else(|| Error::Parse("missing `lambda`".into()))?;

        let mut coeffs = vec![None; r + p + 1];
        for (l, c) in pairs {
            if l < -(r as i64) || l > p as i64 {
                return Err(Error::Parse(format!("coefficient index {l} outside -{r}..{p}")));
            }
            let slot = &mut coeffs[(l + r as i64) as usize];
            if slot.is_some() {
                return Err(Error::Parse(format!("coefficient index {l} given twice")));
            }
            *slot = Some(c);
        }
        let coeffs = coeffs
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| Error::Parse(format!("missing coefficient a_{}", i as i64 - r as i64))))
            .collect::<Result<Vec<_>>>()?;
        SchemeStencil::new(r, p, coeffs, vel, lambda)
    }
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>()
        .map_err(|_| Error::Parse(format!("bad value for `{key}`: `{v}`")))
}

fn parse_pair(item: &str) -> Result<(i64, f64)> {
    let (l, c) = item
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("expected `index:value`, got `{item}`")))?;
    let l = l
        .parse::<i64>()
        .map_err(|_| Error::Parse(format!("bad coefficient index `{l}`")))?;
    let c = c
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("bad coefficient value `{c}`")))?;
    Ok((l, c))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConsistencyFlag {
    /// `sum a_l != 1`.
    SumToOneFailed,
    /// `sum l a_l != -lambda a`.
    FirstMomentFailed,
    /// Every examined moment matched; the stencil is a degenerate shift.
    Capped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub order: usize,
    pub flag: Option<ConsistencyFlag>,
    /// `|sum l^m a_l - (-lambda a)^m|` for each examined `m`.
    pub residuals: Vec<f64>,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        !matches!(
            self.flag,
            Some(ConsistencyFlag::SumToOneFailed) | Some(ConsistencyFlag::FirstMomentFailed)
        )
    }

    pub fn conserves(&self) -> bool {
        self.flag != Some(ConsistencyFlag::SumToOneFailed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub is_stable: bool,
    pub max_modulus: f64,
    pub argmax_theta: f64,
}

fn int_pow(base: i64, m: usize) -> f64 {
    (base as f64).powi(m as i32)
}

fn int_pow_f(base: f64, m: usize) -> f64 {
    base.powi(m as i32)
}

/// Golden-section maximisation of a unimodal-ish function on `[lo, hi]`.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, rel_width: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let scale = hi.abs().max(lo.abs()).max(1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > rel_width * scale {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lw(lambda: f64) -> SchemeStencil {
        SchemeStencil::builtin(Builtin::LaxWendroff, 1.0, lambda).unwrap()
    }

    #[test]
    fn lax_wendroff_coefficients() {
        let s = lw(0.7);
        let expect = [0.595, 0.51, -0.105];
        for (c, e) in s.coeffs().iter().zip(expect) {
            assert!((c - e).abs() < 1e-15, "{c} vs {e}");
        }
        let s = lw(1.0);
        assert_eq!(s.coeffs(), &[1.0, 0.0, 0.0]);
        assert!(!s.is_normalized());
    }

    #[test]
    fn upwind_coefficients() {
        let s = SchemeStencil::builtin(Builtin::Upwind, 1.0, 0.5).unwrap();
        assert_eq!((s.r(), s.p()), (1, 0));
        assert_eq!(s.coeffs(), &[0.5, 0.5]);
    }

    #[test]
    fn builtin_rejects_cfl_and_bad_velocity() {
        assert!(matches!(
            SchemeStencil::builtin(Builtin::LaxWendroff, 1.0, 1.1),
            Err(Error::Cfl { .. })
        ));
        assert!(SchemeStencil::builtin(Builtin::Upwind, 0.0, 0.5).is_err());
        assert!(SchemeStencil::builtin(Builtin::Upwind, -1.0, 0.5).is_err());
    }

    #[test]
    fn symbol_values() {
        let s = lw(0.7);
        assert!((s.symbol(0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        // a0 - a_{-1} - a_1 = 0.51 - 0.595 + 0.105
        assert!((s.symbol(PI) - Complex64::new(0.02, 0.0)).norm() < 1e-14);
        let id = SchemeStencil::identity(1.0, 1.0).unwrap();
        assert_eq!(id.symbol(1.234), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn consistency_orders() {
        assert_eq!(lw(0.7).order().order, 2);
        let up = SchemeStencil::builtin(Builtin::Upwind, 1.0, 0.5).unwrap();
        // sum l^2 a_l = 0.5 != 0.25
        assert!((up.moment(2) - 0.5).abs() < 1e-15);
        let rep = up.order();
        assert_eq!((rep.order, rep.flag), (1, None));
        let id = SchemeStencil::identity(1.0, 1.0).unwrap();
        let rep = id.order();
        assert_eq!((rep.order, rep.flag), (0, Some(ConsistencyFlag::FirstMomentFailed)));
        let bad = SchemeStencil::new(1, 0, vec![0.5, 0.4], 1.0, 0.5).unwrap();
        assert_eq!(bad.order().flag, Some(ConsistencyFlag::SumToOneFailed));
        // lambda a = 1 is a shift; every moment matches.
        assert_eq!(lw(1.0).order().flag, Some(ConsistencyFlag::Capped));
    }

    #[test]
    fn stability_sweep() {
        let rep = lw(0.7).check_l2_stability(4096, 1e-12).unwrap();
        assert!(rep.is_stable);
        assert!((rep.max_modulus - 1.0).abs() < 1e-12);
        assert!(rep.argmax_theta.min(2.0 * PI - rep.argmax_theta) < 1e-5);

        let unstable = SchemeStencil::lax_wendroff_unchecked(1.0, 1.1).unwrap();
        let rep = unstable.check_l2_stability(4096, 1e-12).unwrap();
        assert!(!rep.is_stable);
        // dense sweep oracle
        let dense = (0..200_000)
            .map(|i| unstable.symbol(i as f64 * 2.0 * PI / 200_000.0).norm())
            .fold(0.0, f64::max);
        assert!(rep.max_modulus >= dense - 1e-12);
        assert!((rep.max_modulus - 1.42).abs() < 1e-9);

        let id = SchemeStencil::identity(1.0, 1.0).unwrap();
        let rep = id.check_l2_stability(1024, 1e-12).unwrap();
        assert!(rep.is_stable && (rep.max_modulus - 1.0).abs() < 1e-15);

        assert!(lw(0.7).check_l2_stability(100, 1e-12).is_err());
    }

    #[test]
    fn shift_limit_is_unit_modulus() {
        let rep = lw(1.0).check_l2_stability(1024, 1e-12).unwrap();
        assert!((rep.max_modulus - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parse_text_form() {
        let s: SchemeStencil = " r = 1 , p=1, a=-1:0.595, 0:0.51 ,1:-0.105 ; vel=1; lambda = 0.7"
            .parse()
            .unwrap();
        assert_eq!((s.r(), s.p()), (1, 1));
        assert_eq!(s.coeffs(), &[0.595, 0.51, -0.105]);
        assert_eq!((s.velocity(), s.lambda()), (1.0, 0.7));
        assert!("r=1,p=1,a=-1:0.5,0:0.5;vel=1;lambda=0.5".parse::<SchemeStencil>().is_err());
        assert!("r=1,p=0,a=-1:0.5,0:0.5,3:1;vel=1;lambda=0.5".parse::<SchemeStencil>().is_err());
        assert!("r=1,p=0,a=-1:0.5,0:0.5;lambda=0.5".parse::<SchemeStencil>().is_err());
    }

    proptest! {
        #[test]
        fn builtin_moments_exact(c in 1e-3f64..=1.0, kind in 0usize..3) {
            let s = SchemeStencil::builtin(Builtin::ALL[kind], 1.0, c).unwrap();
            prop_assert!((s.moment(0) - 1.0).abs() <= 1e-14);
            prop_assert!((s.moment(1) + c).abs() <= 1e-14);
        }

        #[test]
        fn symbol_is_periodic(theta in -50.0f64..50.0, c in 0.01f64..1.0) {
            let s = lw(c);
            prop_assert!((s.symbol(theta) - s.symbol(theta + 2.0 * PI)).norm() <= 1e-14);
        }

        #[test]
        fn order_monotone_in_tolerance(
            coeffs in proptest::collection::vec(-1.0f64..1.0, 2..6),
            t1 in 1e-14f64..1e-2,
            factor in 1.0f64..1e6,
        ) {
            let r = 1;
            let p = coeffs.len() - 2;
            let s = SchemeStencil::new(r, p, coeffs, 1.0, 0.5).unwrap();
            let lo = s.consistency_order(t1, 10).order;
            let hi = s.consistency_order(t1 * factor, 10).order;
            prop_assert!(hi >= lo);
        }

        #[test]
        fn text_form_round_trips(
            coeffs in proptest::collection::vec(-2.0f64..2.0, 1..7),
            r_frac in 0.0f64..1.0,
            vel in 0.1f64..3.0,
            lambda in 0.1f64..3.0,
        ) {
            let width = coeffs.len() - 1;
            let r = (r_frac * width as f64).round() as usize;
            let s = SchemeStencil::new(r, width - r, coeffs, vel, lambda).unwrap();
            let back: SchemeStencil = s.to_text().parse().unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
