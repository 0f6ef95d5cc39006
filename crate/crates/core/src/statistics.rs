//! Interaction-corrected decision statistic for the signal-search test.
//!
//! Given a fit with `q` hypothesised spikes, the `i`-th sample eigenvalue is
//! debiased by the pairwise interaction with the other spikes and rescaled
//! by the bulk-induced inflation factor, which yields an estimate of the
//! population signal strength:
//!
//! ```text
//! v_i     = (1/n) sum_{j != i} (lam_j + s2)(lam_i + s2) / (lam_i - lam_j)
//! kappa_i = 1 + (p - q) s2 / (n lam_i)
//! z_i     = (l_i - v_i) / kappa_i - s2
//! ```

use crate::error::{invalid, Error, Result};
use crate::noise::NoiseFit;
use crate::normal::normal_tail_inv;
use crate::spectral::Spectrum;
use crate::tracy_widom::Beta;

/// Relative floor applied to near-tied strength gaps in the interaction sum.
pub const TIE_CLAMP: f64 = 1e-6;
/// Floor substituted for a non-positive radicand in the standard deviation.
pub const RADICAND_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalStat {
    pub z: f64,
    pub v: f64,
    pub kappa: f64,
    pub delta: f64,
    /// `false` when the strength sits below `s2 sqrt((p - q)/n)` and the
    /// radicand of `delta` was clamped.
    pub delta_valid: bool,
}

/// Interaction term for spike `i` (1-based) given all estimated strengths.
pub fn interaction_term(i: usize, lambda_hat: &[f64], sigma2: f64, n: usize) -> f64 {
    assert!(i >= 1 && i <= lambda_hat.len(), "spike index {i} out of range");
    let scale = lambda_hat.iter().fold(sigma2, |m, l| m.max(*l));
    let eps = TIE_CLAMP * scale;
    let li = lambda_hat[i - 1];
    let sum: f64 = lambda_hat
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i - 1)
        .map(|(j, &lj)| {
            let mut gap = li - lj;
            if gap.abs() < eps {
                // ties resolve by position: earlier spikes count as larger
                let sign = if gap != 0.0 {
                    gap.signum()
                } else if i - 1 < j {
                    1.0
                } else {
                    -1.0
                };
                gap = sign * eps;
            }
            (lj + sigma2) * (li + sigma2) / gap
        })
        .sum();
    sum / n as f64
}

/// `1 + (p - q) s2 / (n lam)`.
pub fn kappa_factor(lambda_hat_i: f64, sigma2: f64, p: usize, q: usize, n: usize) -> Result<f64> {
    if !(lambda_hat_i > 0.0) {
        return Err(Error::Domain(format!(
            "signal strength must be positive, got {lambda_hat_i}"
        )));
    }
    Ok(1.0 + p.saturating_sub(q) as f64 * sigma2 / (n as f64 * lambda_hat_i))
}

/// Standard deviation of the decision statistic and whether its radicand
/// was valid.
pub fn stat_std_dev(
    lambda_hat_i: f64,
    sigma2: f64,
    p: usize,
    q: usize,
    n: usize,
    beta: Beta,
) -> Result<(f64, bool)> {
    let kappa = kappa_factor(lambda_hat_i, sigma2, p, q, n)?;
    let ratio = p.saturating_sub(q) as f64 / n as f64;
    let inner = 1.0 - ratio * sigma2 * sigma2 / (lambda_hat_i * lambda_hat_i);
    let (inner, valid) = if inner > 0.0 { (inner, true) } else { (RADICAND_FLOOR, false) };
    let radicand = 2.0 / (beta.value() * n as f64) * inner;
    Ok(((lambda_hat_i + sigma2) / kappa * radicand.sqrt(), valid))
}

/// Decision statistic for eigenvalue `i` (1-based) under `fit`.
pub fn decision_statistic(i: usize, spectrum: &Spectrum, fit: &NoiseFit, beta: Beta) -> Result<SignalStat> {
    if i == 0 || i > fit.k {
        return Err(invalid(format!("index {i} outside 1..={}", fit.k)));
    }
    let (p, n) = (spectrum.p(), spectrum.n());
    let sigma2 = fit.sigma2_hat;
    let lam = fit.lambda_hat[i - 1];
    let kappa = kappa_factor(lam, sigma2, p, fit.k, n)?;
    let v = interaction_term(i, &fit.lambda_hat, sigma2, n);
    let (delta, delta_valid) = stat_std_dev(lam, sigma2, p, fit.k, n, beta)?;
    Ok(SignalStat {
        z: statistic_value(spectrum.l(i), v, kappa, sigma2),
        v,
        kappa,
        delta,
        delta_valid,
    })
}

/// `(l - v) / kappa - s2`.
pub fn statistic_value(l: f64, v: f64, kappa: f64, sigma2: f64) -> f64 {
    (l - v) / kappa - sigma2
}

/// Signal-search acceptance threshold `s2 sqrt(gamma) - delta Q^{-1}(alpha0)`.
/// With the upper-tail convention `Q^{-1}(alpha0) < 0` for `alpha0 > 1/2`, so
/// the threshold sits above the detection limit.
pub fn signal_threshold(sigma2: f64, delta: f64, gamma: f64, alpha0: f64) -> Result<f64> {
    Ok(sigma2 * gamma.sqrt() - delta * normal_tail_inv(alpha0)?)
}
