//! Joint estimation of the noise level and the spike eigenvalues under the
//! hypothesis of `k` signals.
//!
//! The noise level is the mean of the non-signal eigenvalues corrected by
//! the bias each spike pulls out of the bulk. Each spike `rho_j` solves
//!
//! ```text
//! rho^2 - rho (l_j + sigma^2 (1 - (p - k)/n)) + l_j sigma^2 = 0
//! ```
//!
//! and the two are iterated to a fixed point starting from the maximum
//! likelihood noise estimate.

use crate::error::{invalid, Error, Result};
use crate::spectral::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative change in the noise estimate at which iteration stops.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 200 }
    }
}

/// Solver output for one hypothesised signal count.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseFit {
    pub k: usize,
    pub sigma2_hat: f64,
    /// Estimated spike eigenvalues, one per hypothesised signal.
    pub rho_hat: Vec<f64>,
    /// `rho_hat[j] - sigma2_hat`.
    pub lambda_hat: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// `true` where the quadratic had no real root and `rho` was clamped.
    pub degenerate_roots: Vec<bool>,
}

impl NoiseFit {
    pub fn any_degenerate(&self) -> bool {
        self.degenerate_roots.iter().any(|d| *d)
    }
}

/// Root of the spike equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoSolution {
    pub rho: f64,
    /// The discriminant was negative; `rho` is the vertex `b / 2`.
    pub degenerate: bool,
}

/// Mean of the `p - k` smallest eigenvalues.
pub fn mle_noise(spectrum: &Spectrum, k: usize) -> Result<f64> {
    let p = spectrum.p();
    if k >= p {
        return Err(invalid(format!("k = {k} must be below p = {p}")));
    }
    let tail = &spectrum.eigenvalues()[k..];
    Ok(tail.iter().sum::<f64>() / tail.len() as f64)
}

/// Larger root of the spike equation for sample eigenvalue `l`.
pub fn solve_rho(l: f64, sigma2: f64, p: usize, k: usize, n: usize) -> RhoSolution {
    let ratio = p.saturating_sub(k) as f64 / n as f64;
    let b = l + sigma2 * (1.0 - ratio);
    let disc = b * b - 4.0 * l * sigma2;
    if disc < 0.0 {
        RhoSolution { rho: 0.5 * b, degenerate: true }
    } else {
        RhoSolution { rho: 0.5 * (b + disc.sqrt()), degenerate: false }
    }
}

/// Fixed-point solution of the noise/spike system for `k` signals.
///
/// On non-convergence, or if the noise estimate turns non-positive, the
/// MLE initialisation is returned with `converged = false`.
pub fn estimate_noise_and_spikes(spectrum: &Spectrum, k: usize, opts: SolverOptions) -> Result<NoiseFit> {
    let (p, n) = (spectrum.p(), spectrum.n());
    if k > spectrum.max_order() {
        return Err(invalid(format!(
            "k = {k} exceeds min(p, n) - 1 = {}",
            spectrum.max_order()
        )));
    }
    let l = spectrum.eigenvalues();
    let init = mle_noise(spectrum, k)?;
    if !(init > 0.0) {
        return Err(Error::Numerical {
            k,
            message: "noise eigenvalues sum to zero".into(),
        });
    }
    let tail_sum: f64 = l[k..].iter().sum();
    let denom = (p - k) as f64;

    let spikes_at = |sigma2: f64| -> Vec<RhoSolution> {
        l[..k].iter().map(|&lj| solve_rho(lj, sigma2, p, k, n)).collect()
    };
    let build = |sigma2: f64, converged: bool, iterations: usize| -> NoiseFit {
        let roots = spikes_at(sigma2);
        let rho_hat: Vec<f64> = roots.iter().map(|r| r.rho).collect();
        NoiseFit {
            k,
            sigma2_hat: sigma2,
            lambda_hat: rho_hat.iter().map(|r| r - sigma2).collect(),
            rho_hat,
            converged,
            iterations,
            degenerate_roots: roots.iter().map(|r| r.degenerate).collect(),
        }
    };

    if k == 0 {
        return Ok(build(init, true, 0));
    }

    let mut sigma2 = init;
    for iter in 1..=opts.max_iter {
        let bias: f64 = l[..k]
            .iter()
            .zip(spikes_at(sigma2))
            .map(|(lj, r)| lj - r.rho)
            .sum();
        let next = (tail_sum + bias) / denom;
        if !(next > 0.0) || !next.is_finite() {
            return Ok(build(init, false, iter));
        }
        let change = (next - sigma2).abs() / next;
        sigma2 = next;
        if change < opts.tol {
            return Ok(build(sigma2, true, iter));
        }
    }
    Ok(build(init, false, opts.max_iter))
}
