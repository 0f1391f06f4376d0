use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

type DatumFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Initial profile `u_0`.
#[derive(Clone)]
pub enum InitialDatum {
    /// `((x - c)^+)^alpha`.
    PowerPlus { c: f64, alpha: f64 },
    /// Arbitrary callable; averages use 16-point Gauss-Legendre per cell.
    Custom {
        f: DatumFn,
        /// Interval outside of which the function vanishes, if known. Used
        /// to split quadrature at the support edges and to size half-line
        /// windows.
        support: Option<(f64, f64)>,
        label: String,
    },
}

impl InitialDatum {
    pub fn power_plus(c: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() || !c.is_finite() {
            return Err(Error::InvalidParameter {
                name: "datum",
                reason: format!("power datum needs finite c and alpha > 0 (c={c}, alpha={alpha})"),
            });
        }
        Ok(InitialDatum::PowerPlus { c, alpha })
    }

    pub fn custom<F>(label: impl Into<String>, support: Option<(f64, f64)>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        InitialDatum::Custom { f: Arc::new(f), support, label: label.into() }
    }

    pub fn zero() -> Self {
        Self::custom("zero", Some((0.0, 0.0)), |_| 0.0)
    }

    /// `u^{0,1}`, `u^{0,2}`, `u^{0,3}`.
    pub fn named(name: &str) -> Option<Self> {
        let alpha = match name {
            "u01" => 3.0,
            "u02" => 2.6,
            "u03" => 2.5,
            _ => return None,
        };
        Some(InitialDatum::PowerPlus { c: 0.5, alpha })
    }

    /// Value on the whole line, without any extension.
    pub fn value(&self, x: f64) -> f64 {
        match self {
            InitialDatum::PowerPlus { c, alpha } => {
                let s = x - c;
                if s > 0.0 { s.powf(*alpha) } else { 0.0 }
            }
            InitialDatum::Custom { f, support, .. } => match support {
                Some((lo, hi)) if x < *lo || x > *hi => 0.0,
                _ => f(x),
            },
        }
    }

    /// Value with `u_0` extended by zero to `x <= 0`.
    pub fn value_zero_extended(&self, x: f64) -> f64 {
        if x <= 0.0 { 0.0 } else { self.value(x) }
    }

    /// `int_lo^hi u_0(y) dy` on the whole line.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        match self {
            InitialDatum::PowerPlus { c, alpha } => {
                let prim = |x: f64| {
                    let s = x - c;
                    if s > 0.0 { s.powf(alpha + 1.0) / (alpha + 1.0) } else { 0.0 }
                };
                prim(hi) - prim(lo)
            }
            InitialDatum::Custom { f, support, .. } => {
                let (a, b) = match support {
                    Some((s0, s1)) => (lo.max(*s0), hi.min(*s1)),
                    None => (lo, hi),
                };
                if b <= a { 0.0 } else { gauss_legendre_16(|x| f(x), a, b) }
            }
        }
    }

    /// Cell average over `(lo, hi)` on the whole line.
    pub fn average(&self, lo: f64, hi: f64) -> f64 {
        self.integral(lo, hi) / (hi - lo)
    }

    /// Cell average with `u_0` extended by zero to the negative half-line.
    pub fn average_zero_extended(&self, lo: f64, hi: f64) -> f64 {
        if hi <= 0.0 {
            return 0.0;
        }
        self.integral(lo.max(0.0), hi) / (hi - lo)
    }

    /// Left edge of the support, when known.
    pub fn support_left(&self) -> Option<f64> {
        match self {
            InitialDatum::PowerPlus { c, .. } => Some(*c),
            InitialDatum::Custom { support, .. } => support.map(|s| s.0),
        }
    }

    /// Exact interval solution `u_0(x - a t)` with the zero extension.
    pub fn exact_solution(&self, x: f64, t: f64, a: f64) -> f64 {
        self.value_zero_extended(x - a * t)
    }
}

impl fmt::Debug for InitialDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for InitialDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialDatum::PowerPlus { c, alpha } => write!(f, "power:{c}:{alpha}"),
            InitialDatum::Custom { label, .. } => write!(f, "custom:{label}"),
        }
    }
}

impl FromStr for InitialDatum {
    type Err = Error;

    /// `u01 | u02 | u03 | power:c:alpha`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(d) = InitialDatum::named(s) {
            return Ok(d);
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["power", c, alpha] => {
                let c = c.parse::<f64>().map_err(|_| Error::Parse(format!("bad c in `{s}`")))?;
                let alpha = alpha
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad alpha in `{s}`")))?;
                InitialDatum::power_plus(c, alpha)
            }
            _ => Err(Error::Parse(format!("unknown datum `{s}` (expected u01|u02|u03|power:c:alpha)"))),
        }
    }
}

/// Nodes and weights of the 16-point Gauss-Legendre rule on `[-1, 1]`.
fn gauss_legendre_nodes() -> &'static [(f64, f64); 16] {
    static NODES: OnceLock<[(f64, f64); 16]> = OnceLock::new();
    NODES.get_or_init(|| {
        const N: usize = 16;
        let mut out = [(0.0, 0.0); N];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (N as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=N {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        out
    })
}

pub fn gauss_legendre_16(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    half * gauss_legendre_nodes()
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
}
