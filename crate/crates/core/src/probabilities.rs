//! Closed-form miss/over-detection scores behind the adaptive criterion
//! selection.
//!
//! Every score is evaluated at hypothesis index `k`, either assuming `l_k`
//! is a signal (noise level `s2(k)`, TW constants for `p - k` noise
//! dimensions) or assuming it is noise (noise level `s2(k - 1)`, TW
//! constants for `p - k + 1`). The "with interaction" variants shift the
//! thresholds by the interaction term `v'_k`.

pub use crate::normal::{normal_cdf, normal_tail, normal_tail_inv};

use crate::error::{invalid, Result};
use crate::noise::NoiseFit;
use crate::spectral::Spectrum;
use crate::statistics::{decision_statistic, SignalStat};
use crate::tracy_widom::{centering_mu, scaling_sigma, tw_cdf, tw_quantile, Beta};

/// A miss probability, an over-detection probability and their sum. The sum
/// is a criterion score and may exceed one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbPair {
    pub p_miss: f64,
    pub p_false: f64,
    pub p_total: f64,
}

impl ProbPair {
    fn new(p_miss: f64, p_false: f64) -> Self {
        Self { p_miss, p_false, p_total: p_miss + p_false }
    }
}

/// Everything the step-`k` scores depend on.
#[derive(Debug, Clone)]
pub struct ThresholdContext<'a> {
    pub k: usize,
    pub spectrum: &'a Spectrum,
    pub fit_k: &'a NoiseFit,
    pub fit_km1: &'a NoiseFit,
    pub gamma: f64,
    pub alpha: f64,
    pub alpha0: f64,
    pub beta: Beta,
    /// `s(alpha)`, the TW upper quantile.
    pub s_alpha: f64,
    /// Decision statistic of `l_k` under `fit_k`.
    pub stat: SignalStat,
}

impl<'a> ThresholdContext<'a> {
    /// Fails with a domain error when `lambda_hat_k <= 0`, in which case the
    /// signal-search quantities are undefined.
    pub fn new(
        spectrum: &'a Spectrum,
        fit_k: &'a NoiseFit,
        fit_km1: &'a NoiseFit,
        alpha: f64,
        alpha0: f64,
        beta: Beta,
    ) -> Result<Self> {
        let k = fit_k.k;
        if k == 0 || fit_km1.k + 1 != k {
            return Err(invalid(format!(
                "fits must be for consecutive hypotheses k - 1, k with k >= 1 (got {}, {k})",
                fit_km1.k
            )));
        }
        if !(alpha0 > 0.0 && alpha0 < 1.0) {
            return Err(invalid(format!("alpha0 must lie in (0, 1), got {alpha0}")));
        }
        let s_alpha = tw_quantile(alpha, beta)?;
        let stat = decision_statistic(k, spectrum, fit_k, beta)?;
        Ok(Self {
            k,
            spectrum,
            fit_k,
            fit_km1,
            gamma: spectrum.gamma(),
            alpha,
            alpha0,
            beta,
            s_alpha,
            stat,
        })
    }

    /// `(s2, mu, sigma_TW)` for the signal (`true`) or noise (`false`) assumption.
    fn noise_frame(&self, assume_signal: bool) -> (f64, f64, f64) {
        let n = self.spectrum.n();
        let p = self.spectrum.p();
        let (s2, dims) = if assume_signal {
            (self.fit_k.sigma2_hat, p - self.k)
        } else {
            (self.fit_km1.sigma2_hat, p - self.k + 1)
        };
        (s2, centering_mu(n, dims), scaling_sigma(n, dims))
    }

    fn q_inv_alpha0(&self) -> f64 {
        // alpha0 validated in new()
        normal_tail_inv(self.alpha0).expect("alpha0 in (0, 1)")
    }
}

/// TW threshold of the RMT test: `s2(k) (mu_{n,p-k} + s(alpha) sigma_{n,p-k})`
/// when `l_k` is taken as a signal, and the same with `s2(k - 1)` and
/// `p - k + 1` noise dimensions when it is taken as noise.
pub fn theta_rmt(ctx: &ThresholdContext<'_>, assume_signal: bool) -> f64 {
    let (s2, mu, sd) = ctx.noise_frame(assume_signal);
    s2 * (mu + ctx.s_alpha * sd)
}

/// Signal-search threshold on the raw eigenvalue scale:
/// `[s2(k)(1 + sqrt(gamma)) - delta'_k Q^{-1}(alpha0)] kappa'_k`.
pub fn theta_srmt(ctx: &ThresholdContext<'_>) -> f64 {
    let s2 = ctx.fit_k.sigma2_hat;
    (s2 * (1.0 + ctx.gamma.sqrt()) - ctx.stat.delta * ctx.q_inv_alpha0()) * ctx.stat.kappa
}

/// Miss/over-detection scores of the RMT test at step `k`.
pub fn pe_rmt(ctx: &ThresholdContext<'_>, with_interaction: bool, assume_signal: bool) -> ProbPair {
    let st = &ctx.stat;
    let v = if with_interaction { st.v } else { 0.0 };
    let p_miss = if st.delta_valid {
        let s2k = ctx.fit_k.sigma2_hat;
        let theta = theta_rmt(ctx, assume_signal);
        let arg = ((theta + v) / st.kappa - (1.0 + ctx.gamma.sqrt()) * s2k) / st.delta;
        normal_cdf(-arg)
    } else {
        1.0
    };
    let p_false = if with_interaction {
        let (s2, _, sd) = ctx.noise_frame(assume_signal);
        1.0 - tw_cdf(ctx.s_alpha - st.v / (s2 * sd), ctx.beta)
    } else {
        ctx.alpha
    };
    ProbPair::new(p_miss, p_false)
}

/// Miss/over-detection scores of the signal-search test at step `k`.
pub fn pe_srmt(ctx: &ThresholdContext<'_>, with_interaction: bool, assume_signal: bool) -> ProbPair {
    let st = &ctx.stat;
    // a subcritical strength cannot be detected by either test
    let p_miss = if !st.delta_valid {
        1.0
    } else if with_interaction {
        normal_cdf(ctx.q_inv_alpha0() + st.v / (st.kappa * st.delta))
    } else {
        1.0 - ctx.alpha0
    };
    let v = if with_interaction { st.v } else { 0.0 };
    let (s2, mu, sd) = ctx.noise_frame(assume_signal);
    let arg = ((theta_srmt(ctx) + v) / s2 - mu) / sd;
    ProbPair::new(p_miss, 1.0 - tw_cdf(arg, ctx.beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{estimate_noise_and_spikes, SolverOptions};

    fn fits(spec: &Spectrum, k: usize) -> (NoiseFit, NoiseFit) {
        let o = SolverOptions::default();
        (
            estimate_noise_and_spikes(spec, k, o).unwrap(),
            estimate_noise_and_spikes(spec, k - 1, o).unwrap(),
        )
    }

    fn sample_spectrum() -> Spectrum {
        let mut v = vec![9.0, 4.0];
        v.extend((0..58).map(|i| 2.6 - 2.4 * i as f64 / 57.0));
        Spectrum::new(v, 120).unwrap()
    }

    #[test]
    fn context_requires_consecutive_fits() {
        let s = sample_spectrum();
        let (f2, f1) = fits(&s, 2);
        assert!(ThresholdContext::new(&s, &f2, &f2, 0.005, 0.995, Beta::Real).is_err());
        assert!(ThresholdContext::new(&s, &f2, &f1, 0.005, 0.995, Beta::Real).is_ok());
    }

    #[test]
    fn plain_rmt_false_alarm_is_alpha() {
        let s = sample_spectrum();
        let (f2, f1) = fits(&s, 2);
        let ctx = ThresholdContext::new(&s, &f2, &f1, 0.005, 0.995, Beta::Real).unwrap();
        for assume in [true, false] {
            assert_eq!(pe_rmt(&ctx, false, assume).p_false, 0.005);
        }
    }

    #[test]
    fn plain_signal_search_miss() {
        let s = sample_spectrum();
        let (f1, f0) = fits(&s, 1);
        let ctx = ThresholdContext::new(&s, &f1, &f0, 0.005, 0.995, Beta::Real).unwrap();
        assert!(ctx.stat.delta_valid);
        for assume in [true, false] {
            assert_eq!(pe_srmt(&ctx, false, assume).p_miss, 1.0 - 0.995);
        }
        // the second spike is subcritical: saturated
        let (f2, f1) = fits(&s, 2);
        let ctx = ThresholdContext::new(&s, &f2, &f1, 0.005, 0.995, Beta::Real).unwrap();
        assert!(!ctx.stat.delta_valid);
        for assume in [true, false] {
            assert_eq!(pe_srmt(&ctx, false, assume).p_miss, 1.0);
        }
    }

    #[test]
    fn zero_interaction_variants_coincide() {
        let s = sample_spectrum();
        let (f1, f0) = fits(&s, 1);
        let ctx = ThresholdContext::new(&s, &f1, &f0, 0.005, 0.995, Beta::Real).unwrap();
        assert_eq!(ctx.stat.v, 0.0);
        for assume in [true, false] {
            let (a, b) = (pe_rmt(&ctx, true, assume), pe_rmt(&ctx, false, assume));
            assert_eq!(a.p_miss, b.p_miss);
            assert!((a.p_false - b.p_false).abs() < 1e-6);
            let (c, d) = (pe_srmt(&ctx, true, assume), pe_srmt(&ctx, false, assume));
            assert!((c.p_miss - d.p_miss).abs() < 1e-9);
            assert_eq!(c.p_false, d.p_false);
        }
    }

    #[test]
    fn theta_rmt_scales_with_noise() {
        let s = sample_spectrum();
        let (f2, f1) = fits(&s, 2);
        let ctx = ThresholdContext::new(&s, &f2, &f1, 0.005, 0.995, Beta::Real).unwrap();
        let mut doubled = f2.clone();
        doubled.sigma2_hat *= 2.0;
        let ctx2 = ThresholdContext { fit_k: &doubled, ..ctx.clone() };
        assert!((theta_rmt(&ctx2, true) - 2.0 * theta_rmt(&ctx, true)).abs() < 1e-12);
    }
}
