//! Tracy-Widom distributions for real (beta = 1) and complex (beta = 2)
//! data, and the finite-(n, p) centering and scaling of the largest
//! white-Wishart eigenvalue.
//!
//! The CDFs are embedded as tables on a 0.01 grid (`data/tw_beta{1,2}.csv`)
//! and interpolated with a shape-preserving piecewise cubic, so the
//! interpolant is monotone and the quantile is well defined. The tables are
//! produced by `scripts/tw_table.py`, which evaluates the Fredholm
//! determinant representation and cross-checks it against Painleve II.

use std::fmt;
use std::str::FromStr;

use once_cell::sync::Lazy;

use crate::error::{invalid, Result};

/// Dyson index of the noise: 1 for real data, 2 for complex data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Beta {
    #[default]
    Real,
    Complex,
}

impl Beta {
    pub fn value(self) -> f64 {
        match self {
            Beta::Real => 1.0,
            Beta::Complex => 2.0,
        }
    }

    pub fn from_index(beta: u32) -> Result<Self> {
        match beta {
            1 => Ok(Beta::Real),
            2 => Ok(Beta::Complex),
            other => Err(invalid(format!("unsupported beta {other}; expected 1 or 2"))),
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value() as u32)
    }
}

impl FromStr for Beta {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let idx: u32 = s
            .trim()
            .parse()
            .map_err(|_| invalid(format!("beta must be 1 or 2, got `{s}`")))?;
        Beta::from_index(idx)
    }
}

/// Tabulated Tracy-Widom CDF with its monotone cubic interpolant.
#[derive(Debug, Clone)]
pub struct TwTable {
    beta: Beta,
    grid: Vec<f64>,
    cdf: Vec<f64>,
    slopes: Vec<f64>,
}

static BETA1: Lazy<TwTable> = Lazy::new(|| {
    TwTable::from_csv(Beta::Real, include_str!("../data/tw_beta1.csv")).expect("embedded beta=1 table is valid")
});
static BETA2: Lazy<TwTable> = Lazy::new(|| {
    TwTable::from_csv(Beta::Complex, include_str!("../data/tw_beta2.csv"))
        .expect("embedded beta=2 table is valid")
});

impl TwTable {
    /// The embedded table for `beta`.
    pub fn builtin(beta: Beta) -> &'static TwTable {
        match beta {
            Beta::Real => &BETA1,
            Beta::Complex => &BETA2,
        }
    }

    /// Parses an `x,cdf` table (one header line) and checks the invariants:
    /// strictly increasing abscissae and values, values inside (0, 1), and
    /// tails below `1e-9` / above `1 - 1e-9` at the ends.
    pub fn from_csv(beta: Beta, text: &str) -> Result<Self> {
        let mut grid = Vec::new();
        let mut cdf = Vec::new();
        for (idx, line) in text.lines().enumerate().skip(1) {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|v| v.trim().parse().ok())
                    .ok_or_else(|| invalid(format!("bad table row {}: `{line}`", idx + 1)))
            };
            let mut parts = line.split(',');
            grid.push(parse(parts.next())?);
            cdf.push(parse(parts.next())?);
        }
        Self::new(beta, grid, cdf)
    }

    pub fn new(beta: Beta, grid: Vec<f64>, cdf: Vec<f64>) -> Result<Self> {
        if grid.len() < 3 || grid.len() != cdf.len() {
            return Err(invalid("table needs at least three (x, F) pairs"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("table grid must be strictly increasing"));
        }
        if cdf.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("table values must be strictly increasing"));
        }
        if !(cdf[0] > 0.0 && cdf[0] < 1e-9 && *cdf.last().unwrap() < 1.0 && *cdf.last().unwrap() > 1.0 - 1e-9) {
            return Err(invalid("table does not reach both tails"));
        }
        let slopes = pchip_slopes(&grid, &cdf);
        Ok(Self { beta, grid, cdf, slopes })
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.cdf
    }

    /// `F_beta(x)`; 0 below the grid and 1 above it.
    pub fn cdf(&self, x: f64) -> f64 {
        let last = self.grid.len() - 1;
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= self.grid[0] {
            return if x == self.grid[0] { self.cdf[0] } else { 0.0 };
        }
        if x >= self.grid[last] {
            return if x == self.grid[last] { self.cdf[last] } else { 1.0 };
        }
        let k = self.grid.partition_point(|g| *g <= x) - 1;
        let h = self.grid[k + 1] - self.grid[k];
        let t = (x - self.grid[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let y = (2.0 * t3 - 3.0 * t2 + 1.0) * self.cdf[k]
            + (t3 - 2.0 * t2 + t) * h * self.slopes[k]
            + (-2.0 * t3 + 3.0 * t2) * self.cdf[k + 1]
            + (t3 - t2) * h * self.slopes[k + 1];
        y.clamp(0.0, 1.0)
    }

    /// Upper-tail quantile: `s` with `F_beta(s) = 1 - alpha`, by bisection on
    /// the interpolant to `1e-8` in `x`. Targets beyond the tabulated range
    /// return the corresponding grid endpoint.
    pub fn quantile(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        let target = 1.0 - alpha;
        let (mut lo, mut hi) = (self.grid[0], *self.grid.last().unwrap());
        if target <= self.cdf[0] {
            return Ok(lo);
        }
        if target >= *self.cdf.last().unwrap() {
            return Ok(hi);
        }
        while hi - lo > 1e-8 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

// Fritsch-Butland weighted harmonic mean slopes with the one-sided,
// shape-preserving end conditions.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut m = vec![0.0; n];
    for k in 1..n - 1 {
        if d[k - 1] * d[k] <= 0.0 {
            continue;
        }
        let w1 = 2.0 * h[k] + h[k - 1];
        let w2 = h[k] + 2.0 * h[k - 1];
        m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| -> f64 {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s.signum() != d0.signum() {
            0.0
        } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    m[0] = end(h[0], h[1], d[0], d[1]);
    m[n - 1] = end(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    m
}

/// `F_beta(x)` from the embedded table.
pub fn tw_cdf(x: f64, beta: Beta) -> f64 {
    TwTable::builtin(beta).cdf(x)
}

/// `s(alpha)` with `F_beta(s) = 1 - alpha`.
pub fn tw_quantile(alpha: f64, beta: Beta) -> Result<f64> {
    TwTable::builtin(beta).quantile(alpha)
}

/// Centering `mu_{n,p} = (sqrt(n - 1/2) + sqrt(p - 1/2))^2 / n`.
pub fn centering_mu(n: usize, p: usize) -> f64 {
    let a = (n as f64 - 0.5).sqrt() + (p as f64 - 0.5).sqrt();
    a * a / n as f64
}

/// Scaling `sigma_{n,p} = sqrt(mu_{n,p} / n) (1/sqrt(n - 1/2) + 1/sqrt(p - 1/2))^{1/3}`.
pub fn scaling_sigma(n: usize, p: usize) -> f64 {
    let sn = (n as f64 - 0.5).sqrt();
    let sp = (p as f64 - 0.5).sqrt();
    (centering_mu(n, p) / n as f64).sqrt() * (1.0 / sn + 1.0 / sp).cbrt()
}
